//! The scene document: a cover together with named sheaves, morphisms,
//! cochains, sequences, extensions, lifting choices, descent data and
//! complete-intersection data.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use cech::cech::Cochain;
use cech::connecting::{LiftingChoice, SheafMorphism, ShortExactSequence, TwoStepExtension};
use cech::lattice::{FGAbelianGroup, IntMatrix};
use cech::nerve::{build_nerve, faces, Cover, Nerve, Simplex, DEFAULT_DIM_CAP};
use cech::sheaf::{constant_sheaf, AbelianSheaf};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::int::{element, matrix_rows, read_matrix, vector, Int};

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sheaves: BTreeMap<String, SheafDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cochains: BTreeMap<String, CochainDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub sequences: BTreeMap<String, SequenceDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extensions: BTreeMap<String, ExtensionDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lifts: BTreeMap<String, LiftsDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub descent: BTreeMap<String, DescentDoc>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lci: BTreeMap<String, LciDoc>,
}

/// Opens by label; every listed intersection (two or more labels) is
/// nonempty, singletons are implied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub opens: Vec<String>,
    #[serde(default)]
    pub intersections: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_cap: Option<Int>,
}

/// `ℤ^generators` modulo the listed relation vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDoc {
    pub generators: Int,
    #[serde(default)]
    pub relations: Vec<Vec<Int>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEntry {
    pub simplex: Vec<String>,
    pub group: GroupDoc,
}

/// Restriction from `face` to `coface` (one more open), given row by row.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RestrictionDoc {
    pub face: Vec<String>,
    pub coface: Vec<String>,
    pub matrix: Vec<Vec<Int>>,
}

/// Either a constant sheaf or explicit groups and restrictions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<GroupDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub groups: Vec<GroupEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub restrictions: Vec<RestrictionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub simplex: Vec<String>,
    pub matrix: Vec<Vec<Int>>,
}

/// One matrix per simplex; `constant` fills every simplex not listed in `maps`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<Vec<Vec<Int>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueDoc {
    pub simplex: Vec<String>,
    pub value: Vec<Int>,
}

/// Unlisted simplices carry zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CochainDoc {
    pub sheaf: String,
    pub degree: Int,
    #[serde(default)]
    pub values: Vec<ValueDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceDoc {
    pub kernel: String,
    pub middle: String,
    pub quotient: String,
    pub inclusion: String,
    pub projection: String,
}

/// The splice of `lower: 0 → L → A → K → 0` and `upper: 0 → K → B → N → 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDoc {
    pub lower: String,
    pub upper: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftDoc {
    pub simplex: Vec<String>,
    pub value: Vec<Int>,
    pub lift: Vec<Int>,
}

/// Lifts through the projection of `sequence` to use instead of the defaults.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftsDoc {
    pub sequence: String,
    pub entries: Vec<LiftDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandDoc {
    /// Name of a sheaf in the scene.
    Abelian(String),
    /// Only recorded so it can be refused with a clear message.
    Nonabelian(String),
}

/// `source → target` on `simplex` with the given offset from the basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub simplex: Vec<String>,
    pub source: String,
    pub target: String,
    pub offset: Vec<Int>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomorphismDoc {
    pub image_objects: Vec<String>,
    /// `l_i : x_i → h(x_i)`, one per open.
    pub connecting: Vec<ArrowDoc>,
    /// `h(u_ij)`, one per edge.
    pub images: Vec<ArrowDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DescentDoc {
    pub band: BandDoc,
    pub objects: Vec<String>,
    pub transitions: Vec<ArrowDoc>,
    /// Cochain naming the basepoint defect; zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub defect: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<AutomorphismDoc>,
    /// A sequence with this band as quotient, for the degree-3 class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sequence: Option<String>,
}

/// A window on projective space: a preset (`p2`, `p1`, `spec-k`) or forms
/// and constants whose intersection points are added automatically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowDoc {
    Preset(String),
    Custom {
        ambient: Int,
        forms: Vec<String>,
        #[serde(default)]
        constants: Vec<Int>,
    },
}

/// `Π numerator / Π denominator` of linear forms such as `X1-X2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionDoc {
    #[serde(default)]
    pub numerator: Vec<String>,
    #[serde(default)]
    pub denominator: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LciDoc {
    pub window: WindowDoc,
    pub l: Int,
    /// The local tuple on each chart `U1, U2, …`.
    pub charts: Vec<Vec<FunctionDoc>>,
}

impl SceneDocument {
    pub fn empty() -> Self {
        SceneDocument {
            format_version: FORMAT_VERSION.into(),
            cover: None,
            sheaves: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            cochains: BTreeMap::new(),
            sequences: BTreeMap::new(),
            extensions: BTreeMap::new(),
            lifts: BTreeMap::new(),
            descent: BTreeMap::new(),
            lci: BTreeMap::new(),
        }
    }

    /// `sha256:` followed by the hex digest of the compact serialization.
    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("scene serializes");
        format!("sha256:{}", hex::encode(Sha256::digest(&bytes)))
    }
}

/// Parses JSON into `T`, locating errors by document path and line.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, path: &Path) -> Result<T, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let at = e.path().to_string();
        let message = if at == "." { e.inner().to_string() } else { format!("{at}: {}", e.inner()) };
        CliError::Parse {
            path: path.to_path_buf(),
            message,
        }
    })?;
    de.end().map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(value)
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_scene(path: &Path) -> Result<SceneDocument, CliError> {
    let doc: SceneDocument = parse_json(&read_text(path)?, path)?;
    if doc.format_version != FORMAT_VERSION {
        return Err(CliError::invalid(
            "format_version",
            format!("unsupported version `{}` (expected `{FORMAT_VERSION}`)", doc.format_version),
        ));
    }
    Ok(doc)
}

/// A scene with every cross-reference resolved.
#[derive(Clone, Debug)]
pub struct Scene {
    pub doc: SceneDocument,
    pub digest: String,
    pub nerve: Option<Arc<Nerve>>,
    pub sheaves: BTreeMap<String, AbelianSheaf>,
    pub morphisms: BTreeMap<String, SheafMorphism>,
    pub cochains: BTreeMap<String, Cochain>,
    pub sequences: BTreeMap<String, ShortExactSequence>,
    pub extensions: BTreeMap<String, TwoStepExtension>,
    pub lifts: BTreeMap<String, LiftingChoice>,
}

impl Scene {
    pub fn load(doc: SceneDocument) -> Result<Scene, CliError> {
        let digest = doc.digest();
        let mut scene = Scene {
            nerve: None,
            digest,
            sheaves: BTreeMap::new(),
            morphisms: BTreeMap::new(),
            cochains: BTreeMap::new(),
            sequences: BTreeMap::new(),
            extensions: BTreeMap::new(),
            lifts: BTreeMap::new(),
            doc,
        };
        let needs_cover = !(scene.doc.sheaves.is_empty()
            && scene.doc.morphisms.is_empty()
            && scene.doc.cochains.is_empty()
            && scene.doc.sequences.is_empty()
            && scene.doc.descent.is_empty());
        match &scene.doc.cover {
            Some(cover) => scene.nerve = Some(Arc::new(build_cover(cover)?)),
            None if needs_cover => return Err(CliError::invalid("cover", "missing, but the scene has sheaves")),
            None => {}
        }
        let doc = scene.doc.clone();
        for (name, s) in &doc.sheaves {
            let sheaf = scene.build_sheaf(name, s)?;
            scene.sheaves.insert(name.clone(), sheaf);
        }
        for (name, m) in &doc.morphisms {
            let morphism = scene.build_morphism(name, m)?;
            scene.morphisms.insert(name.clone(), morphism);
        }
        for (name, c) in &doc.cochains {
            let at = format!("cochains.{name}");
            let sheaf = scene.sheaf(&c.sheaf, &format!("{at}.sheaf"))?;
            let degree = c.degree.to_usize(&format!("{at}.degree"))?;
            let cochain = scene.read_cochain(sheaf, degree, &c.values, &format!("{at}.values"))?;
            scene.cochains.insert(name.clone(), cochain);
        }
        for (name, q) in &doc.sequences {
            let seq = scene.build_sequence(name, q)?;
            scene.sequences.insert(name.clone(), seq);
        }
        for (name, e) in &doc.extensions {
            let at = format!("extensions.{name}");
            let lower = scene.sequence(&e.lower, &format!("{at}.lower"))?;
            let upper = scene.sequence(&e.upper, &format!("{at}.upper"))?;
            if doc.sequences[&e.lower].quotient != doc.sequences[&e.upper].kernel {
                return Err(CliError::invalid(at, "the quotient of `lower` must be the kernel of `upper`"));
            }
            let ext = TwoStepExtension::splice(lower, upper).map_err(|e| CliError::invalid(&at, e.to_string()))?;
            scene.extensions.insert(name.clone(), ext);
        }
        for (name, l) in &doc.lifts {
            let choice = scene.build_lifts(name, l)?;
            scene.lifts.insert(name.clone(), choice);
        }
        Ok(scene)
    }

    pub fn nerve(&self) -> Result<&Arc<Nerve>, CliError> {
        self.nerve.as_ref().ok_or_else(|| CliError::invalid("cover", "the scene has no cover"))
    }

    pub fn sheaf(&self, name: &str, at: &str) -> Result<&AbelianSheaf, CliError> {
        self.sheaves.get(name).ok_or_else(|| CliError::invalid(at, format!("no sheaf named `{name}`")))
    }

    pub fn cochain(&self, name: &str, at: &str) -> Result<&Cochain, CliError> {
        self.cochains.get(name).ok_or_else(|| CliError::invalid(at, format!("no cochain named `{name}`")))
    }

    pub fn sequence(&self, name: &str, at: &str) -> Result<&ShortExactSequence, CliError> {
        self.sequences.get(name).ok_or_else(|| CliError::invalid(at, format!("no sequence named `{name}`")))
    }

    pub fn extension(&self, name: &str, at: &str) -> Result<&TwoStepExtension, CliError> {
        self.extensions.get(name).ok_or_else(|| CliError::invalid(at, format!("no extension named `{name}`")))
    }

    /// The simplex with the given open labels.
    pub fn simplex(&self, labels: &[String], at: &str) -> Result<Simplex, CliError> {
        simplex_of(self.nerve()?, labels, at)
    }

    fn build_sheaf(&self, name: &str, doc: &SheafDoc) -> Result<AbelianSheaf, CliError> {
        let at = format!("sheaves.{name}");
        let nerve = self.nerve()?;
        match (&doc.constant, doc.groups.is_empty()) {
            (Some(g), true) => {
                if !doc.restrictions.is_empty() {
                    return Err(CliError::invalid(at, "a constant sheaf takes no restrictions"));
                }
                Ok(constant_sheaf(Arc::clone(nerve), &read_group(g, &format!("{at}.constant"))?))
            }
            (Some(_), false) => Err(CliError::invalid(at, "give either `constant` or `groups`, not both")),
            (None, _) => {
                let mut groups: BTreeMap<Simplex, FGAbelianGroup> = BTreeMap::new();
                for (k, entry) in doc.groups.iter().enumerate() {
                    let here = format!("{at}.groups[{k}]");
                    let s = self.simplex(&entry.simplex, &format!("{here}.simplex"))?;
                    let g = read_group(&entry.group, &format!("{here}.group"))?;
                    if groups.insert(s, g).is_some() {
                        return Err(CliError::invalid(here, "second group for the same intersection"));
                    }
                }
                if let Some(s) = nerve.all_simplices().find(|s| !groups.contains_key(s)) {
                    return Err(CliError::invalid(
                        format!("{at}.groups"),
                        format!("no group for {}", labels_of(nerve, s).join("∩")),
                    ));
                }
                let mut sheaf = AbelianSheaf::new(Arc::clone(nerve), |s| groups[s].clone());
                for (k, r) in doc.restrictions.iter().enumerate() {
                    let here = format!("{at}.restrictions[{k}]");
                    let face = self.simplex(&r.face, &format!("{here}.face"))?;
                    let coface = self.simplex(&r.coface, &format!("{here}.coface"))?;
                    if !faces(&coface).iter().any(|(f, _)| *f == face) {
                        return Err(CliError::invalid(here, "`face` must be `coface` with one open removed"));
                    }
                    let shape = (groups[&coface].generator_count(), groups[&face].generator_count());
                    let m = read_matrix(&r.matrix, shape, &format!("{here}.matrix"))?;
                    sheaf.set_restriction(&face, &coface, m).map_err(|e| CliError::invalid(&here, e.to_string()))?;
                }
                Ok(sheaf)
            }
        }
    }

    fn build_morphism(&self, name: &str, doc: &MorphismDoc) -> Result<SheafMorphism, CliError> {
        let at = format!("morphisms.{name}");
        let source = self.sheaf(&doc.source, &format!("{at}.source"))?;
        let target = self.sheaf(&doc.target, &format!("{at}.target"))?;
        let nerve = self.nerve()?;
        let shape = |s: &Simplex| {
            (
                target.group(s).expect("own nerve").generator_count(),
                source.group(s).expect("own nerve").generator_count(),
            )
        };
        let mut matrices: BTreeMap<Simplex, IntMatrix> = BTreeMap::new();
        for (k, m) in doc.maps.iter().enumerate() {
            let here = format!("{at}.maps[{k}]");
            let s = self.simplex(&m.simplex, &format!("{here}.simplex"))?;
            let matrix = read_matrix(&m.matrix, shape(&s), &format!("{here}.matrix"))?;
            if matrices.insert(s, matrix).is_some() {
                return Err(CliError::invalid(here, "second matrix for the same intersection"));
            }
        }
        for s in nerve.all_simplices() {
            if matrices.contains_key(s) {
                continue;
            }
            let Some(rows) = &doc.constant else {
                return Err(CliError::invalid(
                    format!("{at}.maps"),
                    format!("no matrix for {}", labels_of(nerve, s).join("∩")),
                ));
            };
            let m = read_matrix(rows, shape(s), &format!("{at}.constant"))
                .map_err(|e| CliError::invalid(&at, format!("{e} (at {})", labels_of(nerve, s).join("∩"))))?;
            matrices.insert(s.clone(), m);
        }
        SheafMorphism::from_fn(source, target, |s| matrices[s].clone()).map_err(|e| CliError::invalid(at, e.to_string()))
    }

    fn build_sequence(&self, name: &str, doc: &SequenceDoc) -> Result<ShortExactSequence, CliError> {
        let at = format!("sequences.{name}");
        let get_morphism = |m: &str, field: &str| {
            self.morphisms
                .get(m)
                .ok_or_else(|| CliError::invalid(format!("{at}.{field}"), format!("no morphism named `{m}`")))
        };
        for (field, sheaf) in [("kernel", &doc.kernel), ("middle", &doc.middle), ("quotient", &doc.quotient)] {
            self.sheaf(sheaf, &format!("{at}.{field}"))?;
        }
        let inclusion = get_morphism(&doc.inclusion, "inclusion")?;
        let projection = get_morphism(&doc.projection, "projection")?;
        let md = &self.doc.morphisms;
        if md[&doc.inclusion].source != doc.kernel || md[&doc.inclusion].target != doc.middle {
            return Err(CliError::invalid(format!("{at}.inclusion"), "must map the kernel to the middle sheaf"));
        }
        if md[&doc.projection].source != doc.middle || md[&doc.projection].target != doc.quotient {
            return Err(CliError::invalid(format!("{at}.projection"), "must map the middle sheaf to the quotient"));
        }
        ShortExactSequence::new(
            self.sheaves[&doc.kernel].clone(),
            self.sheaves[&doc.middle].clone(),
            self.sheaves[&doc.quotient].clone(),
            inclusion.clone(),
            projection.clone(),
        )
        .map_err(|e| CliError::invalid(at, e.to_string()))
    }

    fn build_lifts(&self, name: &str, doc: &LiftsDoc) -> Result<LiftingChoice, CliError> {
        let at = format!("lifts.{name}");
        let seq = self.sequence(&doc.sequence, &format!("{at}.sequence"))?;
        let mut choice = LiftingChoice::new();
        for (k, e) in doc.entries.iter().enumerate() {
            let here = format!("{at}.entries[{k}]");
            let s = self.simplex(&e.simplex, &format!("{here}.simplex"))?;
            let value = element(&e.value);
            let lift = element(&e.lift);
            seq.quotient
                .group(&s)
                .expect("own nerve")
                .check_element(&value)
                .map_err(|err| CliError::invalid(format!("{here}.value"), err.to_string()))?;
            seq.middle
                .group(&s)
                .expect("own nerve")
                .check_element(&lift)
                .map_err(|err| CliError::invalid(format!("{here}.lift"), err.to_string()))?;
            choice.insert(s, value, lift);
        }
        choice
            .check(seq.nerve(), &seq.projection)
            .map_err(|e| CliError::invalid(at, e.to_string()))?;
        Ok(choice)
    }

    /// Reads listed values (unlisted simplices are zero) into a cochain.
    pub fn read_cochain(&self, sheaf: &AbelianSheaf, degree: usize, values: &[ValueDoc], at: &str) -> Result<Cochain, CliError> {
        read_cochain(sheaf, degree, values, at)
    }
}

pub fn read_cochain(sheaf: &AbelianSheaf, degree: usize, values: &[ValueDoc], at: &str) -> Result<Cochain, CliError> {
    let nerve = sheaf.nerve();
    let mut given = BTreeMap::new();
    for (k, v) in values.iter().enumerate() {
        let here = format!("{at}[{k}]");
        let s = simplex_of(nerve, &v.simplex, &format!("{here}.simplex"))?;
        if s.dimension() != degree {
            return Err(CliError::invalid(here, format!("a degree-{degree} cochain lives on intersections of {} opens", degree + 1)));
        }
        let g = sheaf.group(&s).expect("own nerve");
        let x = element(&v.value);
        g.check_element(&x).map_err(|e| CliError::invalid(format!("{here}.value"), e.to_string()))?;
        if given.insert(s, x).is_some() {
            return Err(CliError::invalid(here, "second value for the same intersection"));
        }
    }
    Cochain::from_fn(sheaf, degree, |s, g| given.remove(s).unwrap_or_else(|| g.zero_element()))
        .map_err(|e| CliError::invalid(at, e.to_string()))
}

fn read_group(doc: &GroupDoc, at: &str) -> Result<FGAbelianGroup, CliError> {
    let n = doc.generators.to_usize(&format!("{at}.generators"))?;
    let mut cols = Vec::with_capacity(doc.relations.len());
    for (k, r) in doc.relations.iter().enumerate() {
        if r.len() != n {
            return Err(CliError::invalid(
                format!("{at}.relations[{k}]"),
                format!("expected {n} entries, found {}", r.len()),
            ));
        }
        cols.push(r.iter().map(|x| x.0.clone()).collect());
    }
    let relations = IntMatrix::from_columns(n, &cols).map_err(|e| CliError::invalid(at, e.to_string()))?;
    FGAbelianGroup::new(n, relations).map_err(|e| CliError::invalid(at, e.to_string()))
}

fn build_cover(doc: &CoverDoc) -> Result<Nerve, CliError> {
    let mut index = BTreeMap::new();
    for (k, label) in doc.opens.iter().enumerate() {
        if index.insert(label.as_str(), k).is_some() {
            return Err(CliError::invalid(format!("cover.opens[{k}]"), format!("duplicate label `{label}`")));
        }
    }
    let mut nonempty = Vec::new();
    for (k, set) in doc.intersections.iter().enumerate() {
        let mut ids = Vec::with_capacity(set.len());
        for (j, label) in set.iter().enumerate() {
            let i = index.get(label.as_str()).ok_or_else(|| {
                CliError::invalid(format!("cover.intersections[{k}][{j}]"), format!("unknown open `{label}`"))
            })?;
            ids.push(*i);
        }
        nonempty.push(ids);
    }
    let cap = match &doc.dim_cap {
        Some(c) => c.to_usize("cover.dim_cap")?,
        None => DEFAULT_DIM_CAP,
    };
    build_nerve(&Cover::new(doc.opens.clone(), nonempty), cap).map_err(|e| CliError::invalid("cover", e.to_string()))
}

pub fn simplex_of(nerve: &Nerve, labels: &[String], at: &str) -> Result<Simplex, CliError> {
    let mut ids = Vec::with_capacity(labels.len());
    for label in labels {
        let i = nerve
            .labels()
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CliError::invalid(at, format!("unknown open `{label}`")))?;
        ids.push(i);
    }
    let s = Simplex::from_unordered(ids).map_err(|_| CliError::invalid(at, "empty intersection"))?;
    nerve
        .index_of(&s)
        .map_err(|_| CliError::invalid(at, format!("{} is not a nonempty intersection", labels.join("∩"))))?;
    Ok(s)
}

pub fn labels_of(nerve: &Nerve, s: &Simplex) -> Vec<String> {
    s.indices().iter().map(|&i| nerve.labels()[i].clone()).collect()
}

/// Every value of `c`, zeros included, in nerve order.
pub fn values_doc(nerve: &Nerve, c: &Cochain) -> Vec<ValueDoc> {
    nerve
        .simplices(c.degree())
        .iter()
        .zip(c.values())
        .map(|(s, v)| ValueDoc {
            simplex: labels_of(nerve, s),
            value: vector(v),
        })
        .collect()
}

/// Exports library objects as a scene document.
pub struct SceneBuilder {
    nerve: Arc<Nerve>,
    doc: SceneDocument,
}

impl SceneBuilder {
    pub fn new(nerve: &Arc<Nerve>) -> Self {
        let mut doc = SceneDocument::empty();
        doc.cover = Some(CoverDoc {
            opens: nerve.labels().to_vec(),
            intersections: nerve
                .all_simplices()
                .filter(|s| s.dimension() > 0)
                .map(|s| labels_of(nerve, s))
                .collect(),
            dim_cap: Some(Int::from(nerve.dim_cap())),
        });
        SceneBuilder {
            nerve: Arc::clone(nerve),
            doc,
        }
    }

    pub fn sheaf(&mut self, name: &str, sheaf: &AbelianSheaf) -> &mut Self {
        let nerve = &self.nerve;
        let group_doc = |g: &FGAbelianGroup| GroupDoc {
            generators: Int::from(g.generator_count()),
            relations: g.relations().columns().iter().map(|c| c.iter().map(Int::from).collect()).collect(),
        };
        let groups = nerve
            .all_simplices()
            .map(|s| GroupEntry {
                simplex: labels_of(nerve, s),
                group: group_doc(sheaf.group(s).expect("own nerve")),
            })
            .collect();
        let mut restrictions = Vec::new();
        for s in nerve.all_simplices() {
            for (face, _) in faces(s) {
                if let Ok(r) = sheaf.restriction(&face, s) {
                    restrictions.push(RestrictionDoc {
                        face: labels_of(nerve, &face),
                        coface: labels_of(nerve, s),
                        matrix: matrix_rows(&r.matrix),
                    });
                }
            }
        }
        self.doc.sheaves.insert(
            name.into(),
            SheafDoc {
                constant: None,
                groups,
                restrictions,
            },
        );
        self
    }

    pub fn morphism(&mut self, name: &str, source: &str, target: &str, m: &SheafMorphism) -> &mut Self {
        let nerve = &self.nerve;
        let maps = nerve
            .all_simplices()
            .map(|s| MapDoc {
                simplex: labels_of(nerve, s),
                matrix: matrix_rows(&m.at(nerve, s).expect("own nerve").matrix),
            })
            .collect();
        self.doc.morphisms.insert(
            name.into(),
            MorphismDoc {
                source: source.into(),
                target: target.into(),
                constant: None,
                maps,
            },
        );
        self
    }

    /// Exports `seq` with sheaves `{name}.kernel` style names given in `names`
    /// (kernel, middle, quotient, inclusion, projection).
    pub fn sequence(&mut self, name: &str, names: [&str; 5], seq: &ShortExactSequence) -> &mut Self {
        let [k, m, q, i, p] = names;
        self.sheaf(k, &seq.kernel).sheaf(m, &seq.middle).sheaf(q, &seq.quotient);
        self.morphism(i, k, m, &seq.inclusion).morphism(p, m, q, &seq.projection);
        self.doc.sequences.insert(
            name.into(),
            SequenceDoc {
                kernel: k.into(),
                middle: m.into(),
                quotient: q.into(),
                inclusion: i.into(),
                projection: p.into(),
            },
        );
        self
    }

    /// Records an extension of two sequences already added.
    pub fn extension(&mut self, name: &str, lower: &str, upper: &str) -> &mut Self {
        self.doc.extensions.insert(
            name.into(),
            ExtensionDoc {
                lower: lower.into(),
                upper: upper.into(),
            },
        );
        self
    }

    pub fn cochain(&mut self, name: &str, sheaf: &str, c: &Cochain) -> &mut Self {
        let values = values_doc(&self.nerve, c);
        self.doc.cochains.insert(
            name.into(),
            CochainDoc {
                sheaf: sheaf.into(),
                degree: Int::from(c.degree()),
                values,
            },
        );
        self
    }

    pub fn finish(self) -> SceneDocument {
        self.doc
    }
}
