//! One function per subcommand. Each returns the report to print; input
//! problems come back as [`CliError`].

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use cech::cech::{cohomology as compute_cohomology, is_cocycle, Cochain, WitnessOutcome};
use cech::connecting::{
    connecting_map, staged_connecting, validate_exact, validate_extension, LiftRecord, LiftingChoice, ShortExactSequence,
};
use cech::descent::{
    automorphism_to_cocycle, gerbe21_classifying, gerbe21_via_connecting, transition_cocycle, AutomorphismDatum, Band,
    DescentError, GerbeDescentDatum, TorsorMorphism,
};
use cech::lattice::GroupElement;
use cech::nerve::{Nerve, Simplex};
use cech::projective::{
    lci_cocycle, p2_gerbe_example, symmetric_power_window, LinearForm, RationalFunctionRep, Window, WindowSequence,
};
use cech::sheaf::{validate_sheaf, SheafIssue};
use cech::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::certificate::{check, Certificate, Check, ClaimKind, Issuer, Verdict, WindowStamp};
use crate::error::CliError;
use crate::int::{element, vector, Int};
use crate::report::Report;
use crate::scene::{
    labels_of, parse_json, read_text, values_doc, ArrowDoc, BandDoc, FunctionDoc, Scene, SceneBuilder, SceneDocument,
    ValueDoc, WindowDoc,
};

fn require_valid_sheaf(scene: &Scene, name: &str, at: &str) -> Result<(), CliError> {
    let report = validate_sheaf(scene.sheaf(name, at)?);
    match report.issues.first() {
        None => Ok(()),
        Some(issue) => Err(CliError::invalid(
            format!("sheaves.{name}"),
            format!("not a valid sheaf: {}", describe_issue(scene.sheaf(name, at)?.nerve(), issue)),
        )),
    }
}

fn require_exact<'a>(scene: &'a Scene, name: &str) -> Result<&'a ShortExactSequence, CliError> {
    let doc = &scene.doc.sequences[name];
    for sheaf in [&doc.kernel, &doc.middle, &doc.quotient] {
        require_valid_sheaf(scene, sheaf, &format!("sequences.{name}"))?;
    }
    let seq = &scene.sequences[name];
    let report = validate_exact(seq).map_err(CliError::compute)?;
    match report.issues.first() {
        None => Ok(seq),
        Some(issue) => Err(CliError::invalid(format!("sequences.{name}"), format!("not exact: {issue}"))),
    }
}

/// The cochain named `name`, which must live on the sheaf `sheaf`.
fn cochain_on<'a>(scene: &'a Scene, name: &str, sheaf: &str, flag: &str) -> Result<&'a Cochain, CliError> {
    let c = scene.cochain(name, flag)?;
    let on = &scene.doc.cochains[name].sheaf;
    if on != sheaf {
        return Err(CliError::invalid(
            format!("cochains.{name}.sheaf"),
            format!("expected a cochain of `{sheaf}`, found one of `{on}`"),
        ));
    }
    Ok(c)
}

#[derive(Serialize)]
struct NerveResult {
    opens: Vec<String>,
    dimension: Option<Int>,
    f_vector: Vec<Int>,
    simplices: Vec<Vec<Vec<String>>>,
}

pub fn nerve(scene: &Scene) -> Result<Report, CliError> {
    let nerve = scene.nerve()?;
    let dims = nerve.dimension().map_or(0, |d| d + 1);
    let result = NerveResult {
        opens: nerve.labels().to_vec(),
        dimension: nerve.dimension().map(Int::from),
        f_vector: nerve.f_vector().into_iter().map(Int::from).collect(),
        simplices: (0..dims)
            .map(|p| nerve.simplices(p).iter().map(|s| labels_of(nerve, s)).collect())
            .collect(),
    };
    Ok(Report::new("nerve", &scene.digest, result, Vec::new(), true))
}

#[derive(Serialize)]
struct SheafCheck {
    valid: bool,
    issues: Vec<String>,
}

#[derive(Serialize)]
struct ValidateResult {
    opens: Vec<String>,
    sheaves: BTreeMap<String, SheafCheck>,
}

pub fn validate(scene: &Scene) -> Result<Report, CliError> {
    let mut sheaves = BTreeMap::new();
    let mut all_valid = true;
    for (name, sheaf) in &scene.sheaves {
        let nerve = sheaf.nerve();
        let issues: Vec<String> = validate_sheaf(sheaf).issues.iter().map(|i| describe_issue(nerve, i)).collect();
        all_valid &= issues.is_empty();
        sheaves.insert(
            name.clone(),
            SheafCheck {
                valid: issues.is_empty(),
                issues,
            },
        );
    }
    let issuer = Issuer { scene, window: None };
    let mut certificates = Vec::new();
    for name in scene.sequences.keys() {
        certificates.push(issuer.exactness_of_sequence(name)?);
    }
    for name in scene.extensions.keys() {
        certificates.push(issuer.exactness_of_extension(name)?);
    }
    let result = ValidateResult {
        opens: scene.nerve.as_ref().map(|n| n.labels().to_vec()).unwrap_or_default(),
        sheaves,
    };
    Ok(Report::new("validate", &scene.digest, result, certificates, all_valid))
}

/// `issue` with simplices spelled by open labels.
fn describe_issue(nerve: &Nerve, issue: &SheafIssue) -> String {
    let at = |s: &Simplex| format!("{{{}}}", labels_of(nerve, s).join(","));
    match issue {
        SheafIssue::MissingRestriction { face, coface } => {
            format!("missing restriction {} -> {}", at(face), at(coface))
        }
        SheafIssue::IllDefinedRestriction { face, coface, relation } => format!(
            "restriction {} -> {} sends relation {relation} of the source to a nonzero element",
            at(face),
            at(coface)
        ),
        SheafIssue::NotFunctorial { face, coface, via } => format!(
            "composites {} -> {} -> {} and through {} disagree",
            at(face),
            at(&via.0),
            at(coface),
            at(&via.1)
        ),
    }
}

#[derive(Serialize)]
struct Generator {
    order: Option<Int>,
    representative: Vec<ValueDoc>,
}

#[derive(Serialize)]
struct CohomologyResult {
    sheaf: String,
    degree: Int,
    group: String,
    free_rank: Int,
    torsion: Vec<Int>,
    generators: Vec<Generator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_of_cocycle: Option<Vec<Int>>,
}

pub fn cohomology(scene: &Scene, sheaf_name: &str, degree: usize, cocycle: Option<&str>) -> Result<Report, CliError> {
    require_valid_sheaf(scene, sheaf_name, "--sheaf")?;
    let sheaf = scene.sheaf(sheaf_name, "--sheaf")?;
    let h = compute_cohomology(sheaf, degree).map_err(CliError::compute)?;
    let inv = h.group.invariants();
    let nerve = sheaf.nerve();
    let generators = (0..h.group.generator_count())
        .map(|k| {
            // One generator per cyclic summand: its relation, if any, is its order.
            let order = h.group.relations().columns().into_iter().find(|c| !c[k].is_zero()).map(|c| Int(c[k].abs()));
            Generator {
                order,
                representative: values_doc(nerve, &h.representatives[k]),
            }
        })
        .collect();
    let issuer = Issuer { scene, window: None };
    let mut certificates = Vec::new();
    let mut class_of_cocycle = None;
    if let Some(name) = cocycle {
        let c = cochain_on(scene, name, sheaf_name, "--cocycle")?;
        if c.degree() != degree {
            return Err(CliError::invalid(
                format!("cochains.{name}.degree"),
                format!("expected degree {degree}, found {}", c.degree()),
            ));
        }
        let cert = issuer.cocycle(&format!("{name} is a cocycle of {sheaf_name}"), sheaf_name, c)?;
        let ok = cert.verdict == Verdict::Verified;
        certificates.push(cert);
        if ok {
            class_of_cocycle = Some(vector(&h.class_of(c).map_err(CliError::compute)?));
            if degree > 0 {
                certificates.push(issuer.class(&format!("class of {name} in H^{degree}({sheaf_name})"), sheaf_name, c)?);
            }
        }
    }
    let result = CohomologyResult {
        sheaf: sheaf_name.into(),
        degree: Int::from(degree),
        group: inv.to_string(),
        free_rank: Int::from(inv.free_rank),
        torsion: inv.torsion.iter().map(Int::from).collect(),
        generators,
        class_of_cocycle,
    };
    Ok(Report::new("cohomology", &scene.digest, result, certificates, true))
}

#[derive(Serialize)]
struct LiftEntry {
    simplex: Vec<String>,
    value: Vec<Int>,
    lift: Vec<Int>,
    source: &'static str,
}

fn transcript_doc(nerve: &Nerve, transcript: &[LiftRecord]) -> Vec<LiftEntry> {
    transcript
        .iter()
        .map(|r| LiftEntry {
            simplex: labels_of(nerve, &r.simplex),
            value: vector(&r.value),
            lift: vector(&r.lift),
            source: if r.injected { "choice" } else { "default" },
        })
        .collect()
}

/// A second set of lifts: the recorded ones moved by ι(1, …, 1). Pullback
/// records, which sit one degree up, are left out.
fn shifted_choice(seq: &ShortExactSequence, degree: usize, transcript: &[LiftRecord]) -> Result<LiftingChoice, CliError> {
    let nerve = seq.nerve();
    let mut choice = LiftingChoice::new();
    for r in transcript.iter().filter(|r| r.simplex.dimension() == degree) {
        let iota = seq.inclusion.at(nerve, &r.simplex).map_err(CliError::compute)?;
        let ones = GroupElement(vec![BigInt::from(1); iota.source.generator_count()]);
        let shift = iota.apply(&ones).map_err(CliError::compute)?;
        choice.insert(r.simplex.clone(), r.value.clone(), &r.lift + &shift);
    }
    Ok(choice)
}

#[derive(Serialize)]
struct ConnectResult {
    sequence: String,
    input_degree: Int,
    #[serde(skip_serializing_if = "Option::is_none")]
    cocycle: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lift: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lifted_boundary: Option<Vec<ValueDoc>>,
    transcript: Vec<LiftEntry>,
}

pub fn connect(scene: &Scene, seq_name: &str, cocycle: &str, lifts: Option<&str>) -> Result<Report, CliError> {
    scene.sequence(seq_name, "--seq")?;
    let seq = require_exact(scene, seq_name)?;
    let sdoc = &scene.doc.sequences[seq_name];
    let c = cochain_on(scene, cocycle, &sdoc.quotient, "--cocycle")?;
    let choice = match lifts {
        None => None,
        Some(name) => {
            let l = scene.lifts.get(name).ok_or_else(|| CliError::invalid("--lifts", format!("no lifts named `{name}`")))?;
            if scene.doc.lifts[name].sequence != seq_name {
                return Err(CliError::invalid(format!("lifts.{name}.sequence"), format!("lifts are for another sequence, not `{seq_name}`")));
            }
            Some(l)
        }
    };
    let issuer = Issuer { scene, window: None };
    let mut certificates = vec![issuer.cocycle(&format!("{cocycle} is a cocycle of {}", sdoc.quotient), &sdoc.quotient, c)?];
    let mut result = ConnectResult {
        sequence: seq_name.into(),
        input_degree: Int::from(c.degree()),
        cocycle: None,
        lift: None,
        lifted_boundary: None,
        transcript: Vec::new(),
    };
    if certificates[0].verdict == Verdict::Verified {
        let nerve = seq.nerve();
        let out = connecting_map(seq, c, choice).map_err(CliError::compute)?;
        let k = &sdoc.kernel;
        let subject = format!("δ({cocycle}) for {seq_name}");
        certificates.push(issuer.cocycle(&format!("{subject} is a cocycle of {k}"), k, &out.cocycle)?);
        certificates.push(issuer.class(&format!("class of {subject} in H^{}({k})", c.degree() + 1), k, &out.cocycle)?);
        let alt = connecting_map(seq, c, Some(&shifted_choice(seq, c.degree(), &out.transcript)?)).map_err(CliError::compute)?;
        certificates.push(issuer.independence(
            &format!("class of {subject} does not depend on the lift"),
            k,
            &out.cocycle,
            &alt.cocycle,
        )?);
        result.cocycle = Some(values_doc(nerve, &out.cocycle));
        result.lift = Some(values_doc(nerve, &out.lift));
        result.lifted_boundary = Some(values_doc(nerve, &out.lifted_boundary));
        result.transcript = transcript_doc(nerve, &out.transcript);
    }
    Ok(Report::new("connect", &scene.digest, result, certificates, true))
}

#[derive(Serialize)]
struct StagedResult {
    extension: String,
    input_degree: Int,
    #[serde(skip_serializing_if = "Option::is_none")]
    cocycle: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    second_lift: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_lift: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_boundary: Option<Vec<ValueDoc>>,
    transcript: Vec<LiftEntry>,
}

pub fn staged_connect(scene: &Scene, ext_name: &str, cocycle: &str) -> Result<Report, CliError> {
    let ext = scene.extension(ext_name, "--ext")?;
    let edoc = &scene.doc.extensions[ext_name];
    let lower = require_exact(scene, &edoc.lower)?;
    let upper = require_exact(scene, &edoc.upper)?;
    let report = validate_extension(ext).map_err(CliError::compute)?;
    if let Some(issue) = report.issues.first() {
        return Err(CliError::invalid(format!("extensions.{ext_name}"), format!("not exact: {issue}")));
    }
    let n = scene.doc.sequences[&edoc.upper].quotient.clone();
    let l = scene.doc.sequences[&edoc.lower].kernel.clone();
    let c = cochain_on(scene, cocycle, &n, "--cocycle")?;
    let issuer = Issuer { scene, window: None };
    let mut certificates = vec![issuer.cocycle(&format!("{cocycle} is a cocycle of {n}"), &n, c)?];
    let mut result = StagedResult {
        extension: ext_name.into(),
        input_degree: Int::from(c.degree()),
        cocycle: None,
        second_lift: None,
        first_lift: None,
        first_boundary: None,
        transcript: Vec::new(),
    };
    if certificates[0].verdict == Verdict::Verified {
        let nerve = ext.nerve();
        let out = staged_connecting(ext, c, None, None).map_err(CliError::compute)?;
        let subject = format!("staged class of {cocycle} for {ext_name}");
        certificates.push(issuer.cocycle(&format!("{subject} is a cocycle of {l}"), &l, &out.cocycle)?);
        certificates.push(issuer.class(&format!("{subject} in H^{}({l})", c.degree() + 2), &l, &out.cocycle)?);
        let middle = connecting_map(upper, c, None).map_err(CliError::compute)?;
        let composite = connecting_map(lower, &middle.cocycle, None).map_err(CliError::compute)?;
        certificates.push(issuer.independence(
            &format!("{subject} equals the composite of the two connecting maps"),
            &l,
            &out.cocycle,
            &composite.cocycle,
        )?);
        result.cocycle = Some(values_doc(nerve, &out.cocycle));
        result.second_lift = Some(values_doc(nerve, &out.second_lift));
        result.first_lift = Some(values_doc(nerve, &out.first_lift));
        result.first_boundary = Some(values_doc(nerve, &out.first_boundary));
        result.transcript = transcript_doc(nerve, &out.transcript);
    }
    Ok(Report::new("staged-connect", &scene.digest, result, certificates, true))
}

/// Arrows keyed by their simplex, returned in nerve order for `degree`.
fn arrows_in_order(
    scene: &Scene,
    arrows: &[ArrowDoc],
    degree: usize,
    at: &str,
) -> Result<Vec<TorsorMorphism>, CliError> {
    let nerve = scene.nerve()?;
    let mut by_simplex = BTreeMap::new();
    for (k, a) in arrows.iter().enumerate() {
        let here = format!("{at}[{k}]");
        let s = scene.simplex(&a.simplex, &format!("{here}.simplex"))?;
        if s.dimension() != degree {
            return Err(CliError::invalid(here, format!("expected an intersection of {} opens", degree + 1)));
        }
        let m = TorsorMorphism::new(a.source.clone(), a.target.clone(), element(&a.offset));
        if by_simplex.insert(s, m).is_some() {
            return Err(CliError::invalid(here, "second arrow for the same intersection"));
        }
    }
    nerve
        .simplices(degree)
        .iter()
        .map(|s| {
            by_simplex
                .remove(s)
                .ok_or_else(|| CliError::invalid(at, format!("no arrow on {}", labels_of(nerve, s).join("∩"))))
        })
        .collect()
}

fn descent_error(at: &str, e: DescentError) -> CliError {
    CliError::invalid(at, e.to_string())
}

#[derive(Serialize)]
struct GerbeResult {
    lifted_loop: Vec<ValueDoc>,
    cocycle: Vec<ValueDoc>,
}

#[derive(Serialize)]
struct DescentResult {
    band: String,
    transition_cocycle: Vec<ValueDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    automorphism_cocycle: Option<Vec<ValueDoc>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gerbe: Option<GerbeResult>,
}

pub fn descent_check(scene: &Scene, only: Option<&str>) -> Result<Report, CliError> {
    if let Some(name) = only {
        if !scene.doc.descent.contains_key(name) {
            return Err(CliError::invalid("--datum", format!("no descent datum named `{name}`")));
        }
    }
    let issuer = Issuer { scene, window: None };
    let mut certificates = Vec::new();
    let mut results = BTreeMap::new();
    for (name, doc) in scene.doc.descent.iter().filter(|(n, _)| only.is_none_or(|o| o == n.as_str())) {
        let at = format!("descent.{name}");
        let band_name = match &doc.band {
            BandDoc::Abelian(b) => b.clone(),
            BandDoc::Nonabelian(desc) => {
                return Err(descent_error(&format!("{at}.band"), DescentError::NonAbelianBand(desc.clone())))
            }
        };
        require_valid_sheaf(scene, &band_name, &format!("{at}.band"))?;
        let band = scene.sheaf(&band_name, &format!("{at}.band"))?;
        let transitions = arrows_in_order(scene, &doc.transitions, 1, &format!("{at}.transitions"))?;
        let defect = match &doc.defect {
            None => Cochain::zero(band, 2),
            Some(d) => {
                let c = cochain_on(scene, d, &band_name, &format!("{at}.defect"))?;
                if c.degree() != 2 {
                    return Err(CliError::invalid(format!("{at}.defect"), "the defect is a 2-cochain"));
                }
                c.clone()
            }
        };
        let datum = GerbeDescentDatum::new(Band::Abelian(band.clone()), doc.objects.clone(), transitions, defect)
            .map_err(|e| descent_error(&at, e))?;
        let loops = transition_cocycle(&datum).map_err(|e| descent_error(&at, e))?;
        let cert = issuer.cocycle(&format!("{name}: the loops c_ijk form a cocycle of {band_name}"), &band_name, &loops.cochain)?;
        let loops_ok = cert.verdict == Verdict::Verified;
        certificates.push(cert);
        if loops_ok {
            certificates.push(issuer.class(&format!("{name}: class of the gerbe in H^2({band_name})"), &band_name, &loops.cochain)?);
        }
        let nerve = band.nerve();
        let mut result = DescentResult {
            band: band_name.clone(),
            transition_cocycle: values_doc(nerve, &loops.cochain.reduced(band).map_err(CliError::compute)?),
            automorphism_cocycle: None,
            gerbe: None,
        };
        if let Some(auto) = &doc.automorphism {
            let here = format!("{at}.automorphism");
            let datum_auto = AutomorphismDatum {
                image_objects: auto.image_objects.clone(),
                connecting: arrows_in_order(scene, &auto.connecting, 0, &format!("{here}.connecting"))?,
                images: arrows_in_order(scene, &auto.images, 1, &format!("{here}.images"))?,
            };
            let h = automorphism_to_cocycle(&datum, &datum_auto).map_err(|e| descent_error(&here, e))?;
            certificates.push(issuer.cocycle(&format!("{name}: h_ij is a cocycle of {band_name}"), &band_name, &h.cochain)?);
            certificates.push(issuer.class(&format!("{name}: class of h in H^1({band_name})"), &band_name, &h.cochain)?);
            result.automorphism_cocycle = Some(values_doc(nerve, &h.cochain));
        }
        if let Some(q) = &doc.sequence {
            let here = format!("{at}.sequence");
            scene.sequence(q, &here)?;
            let seq = require_exact(scene, q)?;
            let sdoc = &scene.doc.sequences[q];
            if sdoc.quotient != band_name {
                return Err(descent_error(&here, DescentError::BandMismatch));
            }
            if !loops_ok {
                return Err(CliError::invalid(&here, "the loops are not a cocycle, so there is no degree-3 class"));
            }
            let out = gerbe21_classifying(&datum, seq).map_err(|e| descent_error(&here, e))?;
            let generic = gerbe21_via_connecting(&datum, seq).map_err(|e| descent_error(&here, e))?;
            let k = &sdoc.kernel;
            certificates.push(issuer.cocycle(&format!("{name}: degree-3 class is a cocycle of {k}"), k, &out.cocycle)?);
            certificates.push(issuer.class(&format!("{name}: degree-3 class in H^3({k})"), k, &out.cocycle)?);
            certificates.push(issuer.independence(
                &format!("{name}: separate lifts agree with the connecting map of the loops"),
                k,
                &out.cocycle,
                &generic,
            )?);
            result.gerbe = Some(GerbeResult {
                lifted_loop: values_doc(nerve, &out.lifted_loop),
                cocycle: values_doc(nerve, &out.cocycle),
            });
        }
        results.insert(name.clone(), result);
    }
    Ok(Report::new("descent-check", &scene.digest, results, certificates, true))
}

fn window_of(doc: &WindowDoc, at: &str) -> Result<Window, CliError> {
    match doc {
        WindowDoc::Preset(p) => match p.as_str() {
            "p2" => Ok(Window::standard_p2()),
            "p1" => Ok(Window::standard_p1()),
            "spec-k" => Ok(Window::spec_k()),
            other => Err(CliError::invalid(at, format!("unknown window `{other}` (expected p2, p1 or spec-k)"))),
        },
        WindowDoc::Custom { ambient, forms, constants } => {
            let n = ambient.to_usize(&format!("{at}.ambient"))?;
            let forms = forms
                .iter()
                .enumerate()
                .map(|(k, f)| LinearForm::parse(f, n).map_err(|e| CliError::invalid(format!("{at}.forms[{k}]"), e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let constants = constants.iter().map(|c| c.0.clone()).collect();
            Window::closure(n, forms, constants).map_err(|e| CliError::invalid(at, e.to_string()))
        }
    }
}

fn function_of(doc: &FunctionDoc, ambient: usize, at: &str) -> Result<RationalFunctionRep, CliError> {
    let mut factors = Vec::new();
    for (part, sign, list) in [("numerator", 1, &doc.numerator), ("denominator", -1, &doc.denominator)] {
        for (k, f) in list.iter().enumerate() {
            let form = LinearForm::parse(f, ambient).map_err(|e| CliError::invalid(format!("{at}.{part}[{k}]"), e.to_string()))?;
            factors.push((form, BigInt::from(sign)));
        }
    }
    RationalFunctionRep::new(factors).map_err(|e| CliError::invalid(at, e.to_string()))
}

/// Scene holding `0 → Z → M → CH → 0` of a window.
fn window_scene(ws: &WindowSequence) -> SceneBuilder {
    let mut b = SceneBuilder::new(ws.nerve());
    b.sequence("window", ["Z", "M", "CH", "inclusion", "projection"], &ws.sequence);
    b
}

#[derive(Serialize)]
struct Term {
    coefficient: Int,
    functions: Vec<String>,
}

fn terms(ws: &WindowSequence, x: &GroupElement) -> Vec<Term> {
    ws.describe_monomials(x)
        .into_iter()
        .map(|(k, fs)| Term {
            coefficient: Int(k),
            functions: fs.iter().map(|f| f.to_string()).collect(),
        })
        .collect()
}

#[derive(Serialize)]
struct GlobalResult {
    section: Vec<Term>,
    correction: Vec<ValueDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tuple: Option<Vec<String>>,
}

#[derive(Serialize)]
struct LciResult {
    data: String,
    l: Int,
    local_products: Vec<Vec<Term>>,
    cocycle: Vec<ValueDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    global: Option<GlobalResult>,
}

pub fn lci(scene: &Scene, data: &str) -> Result<Report, CliError> {
    let doc = scene.doc.lci.get(data).ok_or_else(|| CliError::invalid("--data", format!("no lci data named `{data}`")))?;
    let at = format!("lci.{data}");
    let window = window_of(&doc.window, &format!("{at}.window"))?;
    let l = doc.l.to_usize(&format!("{at}.l"))?;
    let ws = symmetric_power_window(&window, l).map_err(|e| CliError::invalid(format!("{at}.l"), e.to_string()))?;
    let charts = doc
        .charts
        .iter()
        .enumerate()
        .map(|(i, tuple)| {
            tuple
                .iter()
                .enumerate()
                .map(|(k, f)| function_of(f, window.ambient(), &format!("{at}.charts[{i}][{k}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let out = lci_cocycle(&ws, &charts).map_err(|e| CliError::invalid(format!("{at}.charts"), e.to_string()))?;

    let mut builder = window_scene(&ws);
    builder.cochain("h", "Z", &out.cocycle);
    let derived = builder.finish();
    let derived_scene = Scene::load(derived.clone())?;
    let issuer = Issuer {
        scene: &derived_scene,
        window: Some(WindowStamp::of(&window)),
    };
    let mut certificates = vec![issuer.cocycle("h_ij is a cocycle of Z", "Z", &out.cocycle)?];
    if out.is_cocycle {
        certificates.push(issuer.class("class of h in H^1(Z)", "Z", &out.cocycle)?);
    }
    let nerve = ws.nerve();
    let result = LciResult {
        data: data.into(),
        l: Int::from(l),
        local_products: out.local_products.iter().map(|x| terms(&ws, x)).collect(),
        cocycle: values_doc(nerve, &out.cocycle),
        global: out.global.as_ref().map(|g| GlobalResult {
            section: terms(&ws, &g.section),
            correction: values_doc(nerve, &g.correction),
            tuple: g.tuple.as_ref().map(|t| t.iter().map(|f| f.to_string()).collect()),
        }),
    };
    Ok(Report::new("lci", &scene.digest, result, certificates, true).with_scene(derived))
}

#[derive(Serialize)]
struct Intersection {
    edge: Vec<String>,
    lines: [String; 2],
    point: String,
}

#[derive(Serialize)]
struct ChartDivisor {
    chart: String,
    divisor: String,
}

#[derive(Serialize)]
struct Obstruction {
    degree: Int,
    group: String,
}

#[derive(Serialize)]
struct P2Result {
    intersections: Vec<Intersection>,
    triple_restrictions: Vec<String>,
    is_cocycle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<ChartDivisor>>,
    connecting: Vec<ValueDoc>,
    obstruction: Obstruction,
}

pub fn p2_demo() -> Result<Report, CliError> {
    let ex = p2_gerbe_example().map_err(CliError::compute)?;
    let ws = &ex.window;
    let nerve = Arc::clone(ws.nerve());
    let mut builder = window_scene(ws);
    builder.cochain("c", "CH", &ex.cocycle).cochain("delta_c", "Z", &ex.connecting.cocycle);
    let derived = builder.finish();
    let scene = Scene::load(derived.clone())?;
    let issuer = Issuer {
        scene: &scene,
        window: Some(WindowStamp::of(&ws.window)),
    };
    let certificates = vec![
        issuer.cocycle("c is a 1-cocycle of CH^2", "CH", &ex.cocycle)?,
        issuer.class_expecting(
            ClaimKind::ClassNontrivialInWindow,
            "the class of c in H^1(CH^2) is nonzero",
            "CH",
            &ex.cocycle,
        )?,
        issuer.cocycle("δc is a 2-cocycle of Z(2)", "Z", &ex.connecting.cocycle)?,
        issuer.class_expecting(
            ClaimKind::ClassNontrivialInWindow,
            "the gerbe class δc in H^2(Z(2)) is nonzero",
            "Z",
            &ex.connecting.cocycle,
        )?,
    ];
    let witness = match &ex.witness {
        WitnessOutcome::Witness(eta) => Some(
            nerve
                .simplices(0)
                .iter()
                .zip(eta.values())
                .map(|(v, x)| ChartDivisor {
                    chart: labels_of(&nerve, v).join(""),
                    divisor: ws.element_divisor(v, x).to_string(),
                })
                .collect(),
        ),
        WitnessOutcome::NoWitness(_) => None,
    };
    let result = P2Result {
        intersections: ex
            .intersections
            .iter()
            .map(|(e, a, b, p)| Intersection {
                edge: labels_of(&nerve, e),
                lines: [a.to_string(), b.to_string()],
                point: p.to_string(),
            })
            .collect(),
        triple_restrictions: ex.triple_restrictions.iter().map(|d| d.to_string()).collect(),
        is_cocycle: ex.is_cocycle && is_cocycle(&ws.sequence.quotient, &ex.cocycle).map_err(CliError::compute)?,
        witness,
        connecting: values_doc(&nerve, &ex.connecting.cocycle),
        obstruction: Obstruction {
            degree: Int::from(ex.obstruction.degree),
            group: ex.obstruction.group.invariants().to_string(),
        },
    };
    let digest = scene.digest.clone();
    Ok(Report::new("p2-demo", &digest, result, certificates, true).with_scene(derived))
}

#[derive(Serialize)]
struct CheckEntry {
    index: Int,
    claim: ClaimKind,
    subject: String,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct VerifyResult {
    checked: Int,
    certificates: Vec<CheckEntry>,
}

/// Re-checks every certificate in `path` (a report or a single certificate)
/// against `scene_path`, or against the scene embedded in the report.
pub fn verify(path: &Path, scene_path: Option<&Path>) -> Result<Report, CliError> {
    let text = read_text(path)?;
    let value: Value = parse_json(&text, path)?;
    let (certificates, embedded): (Vec<Certificate>, Option<SceneDocument>) = if value.get("certificates").is_some() {
        let report: Report = parse_json(&text, path)?;
        (report.certificates, report.scene)
    } else {
        (vec![parse_json(&text, path)?], None)
    };
    let doc = match (scene_path, embedded) {
        (Some(p), _) => crate::scene::read_scene(p)?,
        (None, Some(doc)) => doc,
        (None, None) => return Err(CliError::invalid("--scene", "required: the certificates carry no scene")),
    };
    let scene = Scene::load(doc)?;
    let mut entries = Vec::new();
    let mut all = true;
    for (k, cert) in certificates.iter().enumerate() {
        let (status, reason) = match check(&scene, cert)? {
            Check::Confirmed => ("confirmed", None),
            Check::Mismatch(r) => ("mismatch", Some(r)),
        };
        all &= reason.is_none();
        entries.push(CheckEntry {
            index: Int::from(k),
            claim: cert.claim,
            subject: cert.subject.clone(),
            status,
            reason,
        });
    }
    let result = VerifyResult {
        checked: Int::from(entries.len()),
        certificates: entries,
    };
    Ok(Report::new("verify", &scene.digest, result, Vec::new(), all))
}
