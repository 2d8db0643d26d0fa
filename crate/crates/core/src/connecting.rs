//! Short exact sequences of sheaves and their connecting maps.
//!
//! For `0 → L → M → N → 0` exact on every simplex, a degree-`p` cocycle `c`
//! of `N` is lifted simplex by simplex to a cochain `b` of `M`; its
//! coboundary `db` maps to `dc = 0` in `N`, so it is the image of a unique
//! cochain of `L`. That cochain is a `(p+1)`-cocycle whose class does not
//! depend on the lift. The two-step version does the same through
//! `L → A → B → N` and lands two degrees up.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::cech::{cohomology, coboundary, is_cocycle, CechError, Cochain, CohomologyGroup};
use crate::lattice::{analyze_morphism, express_in, FGAbelianGroup, GroupElement, GroupMorphism, IntMatrix, LatticeError};
use crate::nerve::{faces, Nerve, Simplex};
use crate::sheaf::{AbelianSheaf, SheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectingError {
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error("sheaves of a sequence must share one nerve")]
    NerveMismatch,
    #[error("input cochain of degree {0} is not a cocycle")]
    NotACocycle(usize),
    #[error("no lift of the value on {simplex} (is the quotient map surjective?)")]
    LiftFailed { simplex: Simplex },
    #[error("{stage}: value on {simplex} is not in the image of the inclusion (sequence not exact?)")]
    PullbackFailed { simplex: Simplex, stage: &'static str },
    #[error("injected lift on {simplex} does not map to the value being lifted")]
    InvalidChoice { simplex: Simplex },
    #[error("result of degree {0} is not a cocycle (sequence not exact?)")]
    OutputNotCocycle(usize),
}

/// A morphism of sheaves on a common nerve: one group morphism per simplex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SheafMorphism {
    maps: Vec<Vec<GroupMorphism>>,
}

impl SheafMorphism {
    /// Builds the family from a matrix per simplex.
    pub fn from_fn(
        source: &AbelianSheaf,
        target: &AbelianSheaf,
        mut matrix_at: impl FnMut(&Simplex) -> IntMatrix,
    ) -> Result<Self, ConnectingError> {
        if source.nerve() != target.nerve() {
            return Err(ConnectingError::NerveMismatch);
        }
        let nerve = source.nerve();
        let dims = nerve.dimension().map_or(0, |d| d + 1);
        let mut maps = Vec::with_capacity(dims);
        for p in 0..dims {
            let mut layer = Vec::new();
            for s in nerve.simplices(p) {
                layer.push(GroupMorphism::new(
                    source.group(s)?.clone(),
                    target.group(s)?.clone(),
                    matrix_at(s),
                )?);
            }
            maps.push(layer);
        }
        Ok(SheafMorphism { maps })
    }

    pub fn identity(sheaf: &AbelianSheaf) -> Self {
        SheafMorphism::from_fn(sheaf, sheaf, |s| {
            IntMatrix::identity(sheaf.group(s).expect("simplex of own nerve").generator_count())
        })
        .expect("identity fits")
    }

    pub fn at(&self, nerve: &Nerve, s: &Simplex) -> Result<&GroupMorphism, ConnectingError> {
        let k = nerve.index_of(s).map_err(SheafError::from)?;
        Ok(&self.maps[s.dimension()][k])
    }

    pub fn in_degree(&self, p: usize) -> &[GroupMorphism] {
        self.maps.get(p).map_or(&[], Vec::as_slice)
    }

    /// `self ∘ inner`, simplex by simplex.
    pub fn compose(&self, inner: &SheafMorphism) -> Result<SheafMorphism, ConnectingError> {
        let maps = self
            .maps
            .iter()
            .zip(&inner.maps)
            .map(|(a, b)| a.iter().zip(b).map(|(f, g)| f.compose(g)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SheafMorphism { maps })
    }

    pub fn apply(&self, target: &AbelianSheaf, c: &Cochain) -> Result<Cochain, ConnectingError> {
        Ok(c.map_through(target, self.in_degree(c.degree()))?)
    }

    /// Face inclusions where the map fails to commute with restriction.
    pub fn naturality_failures(
        &self,
        source: &AbelianSheaf,
        target: &AbelianSheaf,
    ) -> Result<Vec<(Simplex, Simplex)>, ConnectingError> {
        let nerve = source.nerve();
        let mut out = Vec::new();
        for s in nerve.all_simplices() {
            for (face, _) in faces(s) {
                let down_then_over = self.at(nerve, s)?.compose(source.restriction(&face, s)?)?;
                let over_then_down = target.restriction(&face, s)?.compose(self.at(nerve, &face)?)?;
                if !down_then_over.agrees_with(&over_then_down)? {
                    out.push((face, s.clone()));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessIssue {
    IllDefined { simplex: Simplex, map: &'static str },
    NotInjective { simplex: Simplex, map: &'static str },
    NotSurjective { simplex: Simplex, map: &'static str },
    /// `g ∘ f ≠ 0` at the named position.
    CompositeNonzero { simplex: Simplex, at: &'static str },
    /// `ker g ⊄ im f` at the named position.
    KernelNotInImage { simplex: Simplex, at: &'static str },
    NotNatural { face: Simplex, coface: Simplex, map: &'static str },
}

impl fmt::Display for ExactnessIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessIssue::IllDefined { simplex, map } => write!(f, "{map} is ill-defined on {simplex}"),
            ExactnessIssue::NotInjective { simplex, map } => write!(f, "{map} is not injective on {simplex}"),
            ExactnessIssue::NotSurjective { simplex, map } => write!(f, "{map} is not surjective on {simplex}"),
            ExactnessIssue::CompositeNonzero { simplex, at } => {
                write!(f, "composite through {at} is nonzero on {simplex}")
            }
            ExactnessIssue::KernelNotInImage { simplex, at } => {
                write!(f, "kernel is larger than image at {at} on {simplex}")
            }
            ExactnessIssue::NotNatural { face, coface, map } => {
                write!(f, "{map} does not commute with restriction {face} -> {coface}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactnessReport {
    pub issues: Vec<ExactnessIssue>,
}

impl ExactnessReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

fn check_exact_at(
    simplex: &Simplex,
    at: &'static str,
    f: &GroupMorphism,
    g: &GroupMorphism,
    issues: &mut Vec<ExactnessIssue>,
) -> Result<(), ConnectingError> {
    if !g.compose(f)?.is_zero_map()? {
        issues.push(ExactnessIssue::CompositeNonzero {
            simplex: simplex.clone(),
            at,
        });
    }
    let ker = analyze_morphism(g)?;
    for j in 0..ker.kernel.generator_count() {
        let k = ker.kernel_inclusion.apply(&ker.kernel.generator(j))?;
        if express_in(&g.source, &f.matrix, &k)?.is_none() {
            issues.push(ExactnessIssue::KernelNotInImage {
                simplex: simplex.clone(),
                at,
            });
            break;
        }
    }
    Ok(())
}

fn well_defined(simplex: &Simplex, name: &'static str, f: &GroupMorphism, issues: &mut Vec<ExactnessIssue>) -> bool {
    if f.is_well_defined() {
        true
    } else {
        issues.push(ExactnessIssue::IllDefined {
            simplex: simplex.clone(),
            map: name,
        });
        false
    }
}

fn check_injective(simplex: &Simplex, name: &'static str, f: &GroupMorphism, issues: &mut Vec<ExactnessIssue>) -> Result<(), ConnectingError> {
    if !analyze_morphism(f)?.kernel.is_trivial() {
        issues.push(ExactnessIssue::NotInjective {
            simplex: simplex.clone(),
            map: name,
        });
    }
    Ok(())
}

fn check_surjective(simplex: &Simplex, name: &'static str, f: &GroupMorphism, issues: &mut Vec<ExactnessIssue>) -> Result<(), ConnectingError> {
    if !analyze_morphism(f)?.cokernel.is_trivial() {
        issues.push(ExactnessIssue::NotSurjective {
            simplex: simplex.clone(),
            map: name,
        });
    }
    Ok(())
}

fn check_natural(
    map: &SheafMorphism,
    name: &'static str,
    source: &AbelianSheaf,
    target: &AbelianSheaf,
    issues: &mut Vec<ExactnessIssue>,
) -> Result<(), ConnectingError> {
    for (face, coface) in map.naturality_failures(source, target)? {
        issues.push(ExactnessIssue::NotNatural { face, coface, map: name });
    }
    Ok(())
}

/// `0 → kernel → middle → quotient → 0`, exact on every simplex.
#[derive(Clone, Debug)]
pub struct ShortExactSequence {
    pub kernel: AbelianSheaf,
    pub middle: AbelianSheaf,
    pub quotient: AbelianSheaf,
    pub inclusion: SheafMorphism,
    pub projection: SheafMorphism,
}

impl ShortExactSequence {
    pub fn new(
        kernel: AbelianSheaf,
        middle: AbelianSheaf,
        quotient: AbelianSheaf,
        inclusion: SheafMorphism,
        projection: SheafMorphism,
    ) -> Result<Self, ConnectingError> {
        if kernel.nerve() != middle.nerve() || middle.nerve() != quotient.nerve() {
            return Err(ConnectingError::NerveMismatch);
        }
        Ok(ShortExactSequence {
            kernel,
            middle,
            quotient,
            inclusion,
            projection,
        })
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        self.middle.nerve()
    }
}

pub fn validate_exact(seq: &ShortExactSequence) -> Result<ExactnessReport, ConnectingError> {
    let mut issues = Vec::new();
    let nerve = Arc::clone(seq.nerve());
    for s in nerve.all_simplices() {
        let iota = seq.inclusion.at(&nerve, s)?;
        let pi = seq.projection.at(&nerve, s)?;
        let ok_iota = well_defined(s, "inclusion", iota, &mut issues);
        let ok_pi = well_defined(s, "projection", pi, &mut issues);
        if ok_iota {
            check_injective(s, "inclusion", iota, &mut issues)?;
        }
        if ok_pi {
            check_surjective(s, "projection", pi, &mut issues)?;
        }
        if ok_iota && ok_pi {
            check_exact_at(s, "middle", iota, pi, &mut issues)?;
        }
    }
    check_natural(&seq.inclusion, "inclusion", &seq.kernel, &seq.middle, &mut issues)?;
    check_natural(&seq.projection, "projection", &seq.middle, &seq.quotient, &mut issues)?;
    Ok(ExactnessReport { issues })
}

/// Caller-chosen lifts: per simplex, pairs (value downstairs, lift upstairs).
/// Values without an entry are lifted by the deterministic minimal-solution rule.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LiftingChoice {
    lifts: BTreeMap<Simplex, Vec<(GroupElement, GroupElement)>>,
}

impl LiftingChoice {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, simplex: Simplex, value: GroupElement, lift: GroupElement) {
        self.lifts.entry(simplex).or_default().push((value, lift));
    }

    pub fn is_empty(&self) -> bool {
        self.lifts.is_empty()
    }

    fn lookup(&self, group: &FGAbelianGroup, s: &Simplex, value: &GroupElement) -> Result<Option<&GroupElement>, LatticeError> {
        let Some(entries) = self.lifts.get(s) else {
            return Ok(None);
        };
        for (v, lift) in entries {
            if group.element_equal(v, value)? {
                return Ok(Some(lift));
            }
        }
        Ok(None)
    }

    /// Checks `π(lift) = value` for every recorded pair.
    pub fn check(&self, nerve: &Nerve, projection: &SheafMorphism) -> Result<(), ConnectingError> {
        for (s, entries) in &self.lifts {
            let pi = projection.at(nerve, s)?;
            for (v, lift) in entries {
                if !pi.target.element_equal(&pi.apply(lift)?, v)? {
                    return Err(ConnectingError::InvalidChoice { simplex: s.clone() });
                }
            }
        }
        Ok(())
    }
}

/// Record of one lifting step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftRecord {
    pub simplex: Simplex,
    pub value: GroupElement,
    pub lift: GroupElement,
    /// True when the lift came from a [`LiftingChoice`].
    pub injected: bool,
}

/// Output of [`connecting_map`] with its full transcript.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectingOutput {
    /// Cocycle of the kernel sheaf, one degree up.
    pub cocycle: Cochain,
    /// The lift `b` of the input to the middle sheaf.
    pub lift: Cochain,
    /// `db`, which lies in the image of the kernel.
    pub lifted_boundary: Cochain,
    pub transcript: Vec<LiftRecord>,
}

/// Lifts `c` through `projection` simplex by simplex.
fn lift_cochain(
    upstairs: &AbelianSheaf,
    projection: &SheafMorphism,
    c: &Cochain,
    choice: Option<&LiftingChoice>,
    transcript: &mut Vec<LiftRecord>,
) -> Result<Cochain, ConnectingError> {
    let nerve = upstairs.nerve();
    let mut values = Vec::new();
    for (s, (pi, v)) in nerve
        .simplices(c.degree())
        .iter()
        .zip(projection.in_degree(c.degree()).iter().zip(c.values()))
    {
        let injected = match choice {
            Some(ch) => ch.lookup(&pi.target, s, v)?.cloned(),
            None => None,
        };
        let (lift, was_injected) = match injected {
            Some(l) => {
                if !pi.target.element_equal(&pi.apply(&l)?, v)? {
                    return Err(ConnectingError::InvalidChoice { simplex: s.clone() });
                }
                (l, true)
            }
            None => (
                pi.preimage(v)?.ok_or_else(|| ConnectingError::LiftFailed { simplex: s.clone() })?,
                false,
            ),
        };
        transcript.push(LiftRecord {
            simplex: s.clone(),
            value: v.clone(),
            lift: lift.clone(),
            injected: was_injected,
        });
        values.push(lift);
    }
    Ok(Cochain::new(upstairs, c.degree(), values)?)
}

/// Pulls `x` back through the injective family `inclusion`.
fn pull_back(
    downstairs: &AbelianSheaf,
    inclusion: &SheafMorphism,
    x: &Cochain,
    stage: &'static str,
    choice: Option<&LiftingChoice>,
    transcript: &mut Vec<LiftRecord>,
) -> Result<Cochain, ConnectingError> {
    let nerve = downstairs.nerve();
    let mut values = Vec::new();
    for (s, (f, v)) in nerve
        .simplices(x.degree())
        .iter()
        .zip(inclusion.in_degree(x.degree()).iter().zip(x.values()))
    {
        let injected = match choice {
            Some(ch) => ch.lookup(&f.target, s, v)?.cloned(),
            None => None,
        };
        let (y, was_injected) = match injected {
            Some(y) => {
                if !f.target.element_equal(&f.apply(&y)?, v)? {
                    return Err(ConnectingError::InvalidChoice { simplex: s.clone() });
                }
                (y, true)
            }
            None => (
                f.preimage(v)?.ok_or_else(|| ConnectingError::PullbackFailed {
                    simplex: s.clone(),
                    stage,
                })?,
                false,
            ),
        };
        transcript.push(LiftRecord {
            simplex: s.clone(),
            value: v.clone(),
            lift: y.clone(),
            injected: was_injected,
        });
        values.push(y);
    }
    Ok(Cochain::new(downstairs, x.degree(), values)?)
}

/// The connecting map `H^p(N) → H^{p+1}(L)` on a representative cocycle.
pub fn connecting_map(
    seq: &ShortExactSequence,
    c: &Cochain,
    choice: Option<&LiftingChoice>,
) -> Result<ConnectingOutput, ConnectingError> {
    if !is_cocycle(&seq.quotient, c)? {
        return Err(ConnectingError::NotACocycle(c.degree()));
    }
    let mut transcript = Vec::new();
    let lift = lift_cochain(&seq.middle, &seq.projection, c, choice, &mut transcript)?;
    let lifted_boundary = coboundary(&seq.middle, &lift)?;
    let cocycle = pull_back(&seq.kernel, &seq.inclusion, &lifted_boundary, "kernel pullback", None, &mut transcript)?;
    if !is_cocycle(&seq.kernel, &cocycle)? {
        return Err(ConnectingError::OutputNotCocycle(cocycle.degree()));
    }
    Ok(ConnectingOutput {
        cocycle,
        lift,
        lifted_boundary,
        transcript,
    })
}

/// Map induced on `H^p` by a sheaf morphism, on the presentations
/// computed by [`cohomology`].
pub fn induced_on_cohomology(
    map: &SheafMorphism,
    target: &AbelianSheaf,
    h_source: &CohomologyGroup,
    h_target: &CohomologyGroup,
) -> Result<GroupMorphism, ConnectingError> {
    let mut cols = Vec::new();
    for rep in &h_source.representatives {
        let image = map.apply(target, rep)?;
        cols.push(h_target.class_of(&image)?.0);
    }
    let matrix = IntMatrix::from_columns(h_target.group.generator_count(), &cols)?;
    Ok(GroupMorphism::new(h_source.group.clone(), h_target.group.clone(), matrix)?)
}

/// The connecting map on class coordinates: `H^p(N) → H^{p+1}(L)`.
pub fn connecting_on_classes(
    seq: &ShortExactSequence,
    h_quotient: &CohomologyGroup,
    h_kernel_next: &CohomologyGroup,
) -> Result<GroupMorphism, ConnectingError> {
    let mut cols = Vec::new();
    for rep in &h_quotient.representatives {
        let out = connecting_map(seq, rep, None)?;
        cols.push(h_kernel_next.class_of(&out.cocycle)?.0);
    }
    let matrix = IntMatrix::from_columns(h_kernel_next.group.generator_count(), &cols)?;
    Ok(GroupMorphism::new(h_quotient.group.clone(), h_kernel_next.group.clone(), matrix)?)
}

/// `H^p(N) / im(H^p(M) → H^p(N))`: the classes that do not lift.
#[derive(Clone, Debug)]
pub struct ObstructionQuotient {
    pub degree: usize,
    pub group: FGAbelianGroup,
    /// `H^p(N) → group`.
    pub projection: GroupMorphism,
    pub quotient_cohomology: CohomologyGroup,
    /// `H^p(M) → H^p(N)`.
    pub induced: GroupMorphism,
}

impl ObstructionQuotient {
    /// Whether the class of the cocycle `c` of the quotient sheaf lifts to the middle sheaf.
    pub fn lifts(&self, c: &Cochain) -> Result<bool, ConnectingError> {
        let class = self.quotient_cohomology.class_of(c)?;
        Ok(self.group.is_zero(&self.projection.apply(&class)?)?)
    }
}

pub fn obstruction_quotient(seq: &ShortExactSequence, degree: usize) -> Result<ObstructionQuotient, ConnectingError> {
    let hm = cohomology(&seq.middle, degree)?;
    let hn = cohomology(&seq.quotient, degree)?;
    let induced = induced_on_cohomology(&seq.projection, &seq.quotient, &hm, &hn)?;
    let analysis = analyze_morphism(&induced)?;
    Ok(ObstructionQuotient {
        degree,
        group: analysis.cokernel,
        projection: analysis.cokernel_projection,
        quotient_cohomology: hn,
        induced,
    })
}

/// `0 → L → A → B → N → 0`, exact on every simplex.
#[derive(Clone, Debug)]
pub struct TwoStepExtension {
    pub kernel: AbelianSheaf,
    pub first: AbelianSheaf,
    pub second: AbelianSheaf,
    pub quotient: AbelianSheaf,
    pub kernel_to_first: SheafMorphism,
    pub first_to_second: SheafMorphism,
    pub second_to_quotient: SheafMorphism,
}

impl TwoStepExtension {
    /// Splices `0 → L → A → K → 0` and `0 → K → B → N → 0` along `K`.
    pub fn splice(lower: &ShortExactSequence, upper: &ShortExactSequence) -> Result<Self, ConnectingError> {
        if lower.quotient != upper.kernel {
            return Err(ConnectingError::NerveMismatch);
        }
        Ok(TwoStepExtension {
            kernel: lower.kernel.clone(),
            first: lower.middle.clone(),
            second: upper.middle.clone(),
            quotient: upper.quotient.clone(),
            kernel_to_first: lower.inclusion.clone(),
            first_to_second: upper.inclusion.compose(&lower.projection)?,
            second_to_quotient: upper.projection.clone(),
        })
    }

    pub fn nerve(&self) -> &Arc<Nerve> {
        self.first.nerve()
    }
}

pub fn validate_extension(ext: &TwoStepExtension) -> Result<ExactnessReport, ConnectingError> {
    let mut issues = Vec::new();
    let nerve = Arc::clone(ext.nerve());
    for s in nerve.all_simplices() {
        let la = ext.kernel_to_first.at(&nerve, s)?;
        let ab = ext.first_to_second.at(&nerve, s)?;
        let bn = ext.second_to_quotient.at(&nerve, s)?;
        let ok = [("kernel->first", la), ("first->second", ab), ("second->quotient", bn)]
            .into_iter()
            .fold(true, |acc, (name, f)| well_defined(s, name, f, &mut issues) && acc);
        if !ok {
            continue;
        }
        check_injective(s, "kernel->first", la, &mut issues)?;
        check_surjective(s, "second->quotient", bn, &mut issues)?;
        check_exact_at(s, "first", la, ab, &mut issues)?;
        check_exact_at(s, "second", ab, bn, &mut issues)?;
    }
    check_natural(&ext.kernel_to_first, "kernel->first", &ext.kernel, &ext.first, &mut issues)?;
    check_natural(&ext.first_to_second, "first->second", &ext.first, &ext.second, &mut issues)?;
    check_natural(&ext.second_to_quotient, "second->quotient", &ext.second, &ext.quotient, &mut issues)?;
    Ok(ExactnessReport { issues })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StagedOutput {
    /// Cocycle of the kernel sheaf, two degrees up.
    pub cocycle: Cochain,
    /// Lift of the input to the second sheaf.
    pub second_lift: Cochain,
    /// Preimage of its coboundary in the first sheaf.
    pub first_lift: Cochain,
    /// Coboundary of `first_lift`, which lies in the image of the kernel.
    pub first_boundary: Cochain,
    pub transcript: Vec<LiftRecord>,
}

/// Two-stage connecting map `H^p(N) → H^{p+2}(L)`.
///
/// `second_choice` overrides lifts through `B → N`; `first_choice` overrides
/// preimages through `A → B` (keyed by the value in `B`).
pub fn staged_connecting(
    ext: &TwoStepExtension,
    c: &Cochain,
    second_choice: Option<&LiftingChoice>,
    first_choice: Option<&LiftingChoice>,
) -> Result<StagedOutput, ConnectingError> {
    if !is_cocycle(&ext.quotient, c)? {
        return Err(ConnectingError::NotACocycle(c.degree()));
    }
    let mut transcript = Vec::new();
    let second_lift = lift_cochain(&ext.second, &ext.second_to_quotient, c, second_choice, &mut transcript)?;
    let second_boundary = coboundary(&ext.second, &second_lift)?;
    let first_lift = pull_back(
        &ext.first,
        &ext.first_to_second,
        &second_boundary,
        "exactness at the second sheaf",
        first_choice,
        &mut transcript,
    )?;
    let first_boundary = coboundary(&ext.first, &first_lift)?;
    let cocycle = pull_back(
        &ext.kernel,
        &ext.kernel_to_first,
        &first_boundary,
        "exactness at the first sheaf",
        None,
        &mut transcript,
    )?;
    if !is_cocycle(&ext.kernel, &cocycle)? {
        return Err(ConnectingError::OutputNotCocycle(cocycle.degree()));
    }
    Ok(StagedOutput {
        cocycle,
        second_lift,
        first_lift,
        first_boundary,
        transcript,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{coboundary_witness, Cochain};
    use crate::nerve::{build_nerve, Cover};
    use crate::sheaf::constant_sheaf;

    fn mod_two_sequence(nerve: Arc<Nerve>, mult: i64, modulus: i64) -> ShortExactSequence {
        let z = FGAbelianGroup::free(1);
        let l = constant_sheaf(Arc::clone(&nerve), &z);
        let m = constant_sheaf(Arc::clone(&nerve), &z);
        let n = constant_sheaf(nerve, &FGAbelianGroup::cyclic(modulus));
        let iota = SheafMorphism::from_fn(&l, &m, |_| IntMatrix::from_rows(&[[mult]])).unwrap();
        let pi = SheafMorphism::from_fn(&m, &n, |_| IntMatrix::from_rows(&[[1]])).unwrap();
        ShortExactSequence::new(l, m, n, iota, pi).unwrap()
    }

    #[test]
    fn times_two_then_reduce_is_exact() {
        let seq = mod_two_sequence(Arc::new(Nerve::full_simplex(3, 5)), 2, 2);
        assert!(validate_exact(&seq).unwrap().is_valid());
    }

    #[test]
    fn times_two_into_mod_four_is_not_exact() {
        let seq = mod_two_sequence(Arc::new(Nerve::full_simplex(3, 5)), 2, 4);
        let report = validate_exact(&seq).unwrap();
        assert!(!report.is_valid());
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ExactnessIssue::CompositeNonzero { .. } | ExactnessIssue::KernelNotInImage { .. })));
    }

    #[test]
    fn bockstein_on_hollow_triangle() {
        // On a circle H^2(Z) = 0, so every class of H^1(Z/2) lifts.
        let nerve = Arc::new(build_nerve(&Cover::numbered(3, vec![vec![0, 1], vec![0, 2], vec![1, 2]]), 5).unwrap());
        let seq = mod_two_sequence(nerve, 2, 2);
        let c = Cochain::new(
            &seq.quotient,
            1,
            vec![GroupElement::from_i64s(&[1]), GroupElement::from_i64s(&[0]), GroupElement::from_i64s(&[0])],
        )
        .unwrap();
        let out = connecting_map(&seq, &c, None).unwrap();
        assert!(is_cocycle(&seq.kernel, &out.cocycle).unwrap());
        let q = obstruction_quotient(&seq, 1).unwrap();
        assert!(q.group.is_trivial());
        assert!(q.lifts(&c).unwrap());
    }

    #[test]
    fn bockstein_in_degree_zero_on_two_points() {
        // Two disjoint opens: H^0(Z/2) = (Z/2)^2, H^0(Z) → H^0(Z/2) is onto; quotient 0.
        let nerve = Arc::new(build_nerve(&Cover::numbered(2, vec![]), 5).unwrap());
        let seq = mod_two_sequence(nerve, 2, 2);
        assert!(obstruction_quotient(&seq, 0).unwrap().group.is_trivial());
    }

    #[test]
    fn lift_of_global_cocycle_gives_coboundary() {
        let seq = mod_two_sequence(Arc::new(Nerve::full_simplex(3, 5)), 2, 2);
        let b = Cochain::zero(&seq.middle, 1);
        let c = seq.projection.apply(&seq.quotient, &b).unwrap();
        let out = connecting_map(&seq, &c, None).unwrap();
        assert!(coboundary_witness(&seq.kernel, &out.cocycle).unwrap().is_some());
    }

    #[test]
    fn injected_lift_must_project_correctly() {
        let seq = mod_two_sequence(Arc::new(Nerve::full_simplex(2, 5)), 2, 2);
        let c = Cochain::new(&seq.quotient, 0, vec![GroupElement::from_i64s(&[1]); 2]).unwrap();
        let mut choice = LiftingChoice::new();
        choice.insert(Simplex::vertex(0), GroupElement::from_i64s(&[1]), GroupElement::from_i64s(&[2]));
        assert!(matches!(
            connecting_map(&seq, &c, Some(&choice)),
            Err(ConnectingError::InvalidChoice { .. })
        ));
        let mut choice = LiftingChoice::new();
        choice.insert(Simplex::vertex(0), GroupElement::from_i64s(&[1]), GroupElement::from_i64s(&[3]));
        let a = connecting_map(&seq, &c, Some(&choice)).unwrap();
        let b = connecting_map(&seq, &c, None).unwrap();
        assert!(a.transcript[0].injected);
        let diff = a.cocycle.sub(&b.cocycle).unwrap();
        assert!(coboundary_witness(&seq.kernel, &diff).unwrap().is_some());
    }
}
