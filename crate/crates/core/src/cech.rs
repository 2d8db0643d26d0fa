//! Čech cochains, the alternating coboundary, cohomology and coboundary witnesses.
//!
//! Cochains live on strictly increasing simplices. The coboundary is
//! `(dω)_{i_0..i_{p+1}} = Σ_k (-1)^k ω_{i_0..î_k..i_{p+1}}`, each term restricted
//! to the bigger intersection. Cocycle and witness questions are flattened
//! into one integer linear system over the generator coordinates of all
//! simplices of a degree and settled with the Smith normal form.

use num_bigint::BigInt;
use thiserror::Error;

use crate::lattice::{
    analyze_morphism, express_in, solve_or_certify, FGAbelianGroup, GroupElement, GroupMorphism, IntMatrix,
    IntegerInfeasibility, LatticeError, Solvability,
};
use crate::nerve::{faces, Simplex};
use crate::sheaf::{AbelianSheaf, SheafError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("degree {degree} exceeds the nerve dimension cap {cap}")]
    DegreeExceedsCap { degree: usize, cap: usize },
    #[error("cochain of degree {degree} has {found} values, nerve has {expected} simplices")]
    WrongLength { degree: usize, expected: usize, found: usize },
    #[error("value on {simplex} has {found} coordinates, group has {expected} generators")]
    WrongCoordinates { simplex: Simplex, expected: usize, found: usize },
    #[error("cochains of degree {0} and {1} cannot be combined")]
    DegreeMismatch(usize, usize),
    #[error("cochain of degree {0} is not a cocycle")]
    NotACocycle(usize),
    #[error("degree-0 classes have no coboundary witness")]
    NoWitnessInDegreeZero,
}

/// A degree-`p` cochain: one group element per `p`-simplex, in nerve order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    degree: usize,
    values: Vec<GroupElement>,
}

impl Cochain {
    pub fn zero(sheaf: &AbelianSheaf, degree: usize) -> Self {
        Cochain {
            degree,
            values: sheaf
                .groups_in_degree(degree)
                .iter()
                .map(FGAbelianGroup::zero_element)
                .collect(),
        }
    }

    pub fn new(sheaf: &AbelianSheaf, degree: usize, values: Vec<GroupElement>) -> Result<Self, CechError> {
        let simplices = sheaf.nerve().simplices(degree);
        if values.len() != simplices.len() {
            return Err(CechError::WrongLength {
                degree,
                expected: simplices.len(),
                found: values.len(),
            });
        }
        for ((s, g), v) in simplices.iter().zip(sheaf.groups_in_degree(degree)).zip(&values) {
            if v.len() != g.generator_count() {
                return Err(CechError::WrongCoordinates {
                    simplex: s.clone(),
                    expected: g.generator_count(),
                    found: v.len(),
                });
            }
        }
        Ok(Cochain { degree, values })
    }

    pub fn from_fn(
        sheaf: &AbelianSheaf,
        degree: usize,
        mut f: impl FnMut(&Simplex, &FGAbelianGroup) -> GroupElement,
    ) -> Result<Self, CechError> {
        let values = sheaf
            .nerve()
            .simplices(degree)
            .iter()
            .zip(sheaf.groups_in_degree(degree))
            .map(|(s, g)| f(s, g))
            .collect();
        Self::new(sheaf, degree, values)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value_at(&self, sheaf: &AbelianSheaf, s: &Simplex) -> Result<&GroupElement, CechError> {
        let k = sheaf.nerve().index_of(s).map_err(SheafError::from)?;
        Ok(&self.values[k])
    }

    pub fn set_value(&mut self, sheaf: &AbelianSheaf, s: &Simplex, v: GroupElement) -> Result<(), CechError> {
        let k = sheaf.nerve().index_of(s).map_err(SheafError::from)?;
        self.values[k] = v;
        Ok(())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, CechError> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain, CechError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Cochain {
        Cochain {
            degree: self.degree,
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    fn zip_with(&self, other: &Cochain, f: impl Fn(&GroupElement, &GroupElement) -> GroupElement) -> Result<Cochain, CechError> {
        if self.degree != other.degree || self.values.len() != other.values.len() {
            return Err(CechError::DegreeMismatch(self.degree, other.degree));
        }
        Ok(Cochain {
            degree: self.degree,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        })
    }

    /// Zero in every group (modulo relations).
    /// Same class, each value replaced by its canonical representative.
    pub fn reduced(&self, sheaf: &AbelianSheaf) -> Result<Cochain, CechError> {
        let values = sheaf
            .groups_in_degree(self.degree)
            .iter()
            .zip(&self.values)
            .map(|(g, v)| g.reduce(v))
            .collect::<Result<_, _>>()?;
        Ok(Cochain { degree: self.degree, values })
    }

    pub fn is_zero(&self, sheaf: &AbelianSheaf) -> Result<bool, CechError> {
        for (v, g) in self.values.iter().zip(sheaf.groups_in_degree(self.degree)) {
            if !g.is_zero(v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality simplex by simplex, modulo relations.
    pub fn equals(&self, sheaf: &AbelianSheaf, other: &Cochain) -> Result<bool, CechError> {
        self.sub(other)?.is_zero(sheaf)
    }

    /// Applies a per-simplex morphism family, producing a cochain of `target`.
    pub fn map_through(
        &self,
        target: &AbelianSheaf,
        maps: &[GroupMorphism],
    ) -> Result<Cochain, CechError> {
        let values = self
            .values
            .iter()
            .zip(maps)
            .map(|(v, m)| m.apply(v))
            .collect::<Result<Vec<_>, _>>()?;
        Cochain::new(target, self.degree, values)
    }

    pub fn flatten(&self) -> Vec<BigInt> {
        self.values.iter().flat_map(|v| v.coords().iter().cloned()).collect()
    }

    pub fn unflatten(sheaf: &AbelianSheaf, degree: usize, flat: &[BigInt]) -> Result<Cochain, CechError> {
        let mut values = Vec::new();
        let mut at = 0;
        for g in sheaf.groups_in_degree(degree) {
            let n = g.generator_count();
            let Some(chunk) = flat.get(at..at + n) else {
                return Err(CechError::Lattice(LatticeError::DimensionMismatch {
                    context: "flattened cochain",
                    expected: at + n,
                    found: flat.len(),
                }));
            };
            values.push(GroupElement(chunk.to_vec()));
            at += n;
        }
        Cochain::new(sheaf, degree, values)
    }
}

fn check_cap(sheaf: &AbelianSheaf, degree: usize) -> Result<(), CechError> {
    let cap = sheaf.nerve().dim_cap();
    if degree > cap {
        return Err(CechError::DegreeExceedsCap { degree, cap });
    }
    Ok(())
}

/// The group `C^p = ⊕_{p-simplices} F(σ)`.
pub fn cochain_group(sheaf: &AbelianSheaf, degree: usize) -> FGAbelianGroup {
    FGAbelianGroup::direct_sum(sheaf.groups_in_degree(degree))
}

fn offsets(sheaf: &AbelianSheaf, degree: usize) -> Vec<usize> {
    let mut acc = 0;
    let mut out = Vec::new();
    for g in sheaf.groups_in_degree(degree) {
        out.push(acc);
        acc += g.generator_count();
    }
    out.push(acc);
    out
}

/// Matrix of `d: C^p → C^{p+1}` on flattened generator coordinates.
pub fn coboundary_matrix(sheaf: &AbelianSheaf, degree: usize) -> Result<IntMatrix, CechError> {
    check_cap(sheaf, degree + 1)?;
    let nerve = sheaf.nerve();
    let src = offsets(sheaf, degree);
    let dst = offsets(sheaf, degree + 1);
    let mut d = IntMatrix::zeros(*dst.last().unwrap(), *src.last().unwrap());
    for (row_pos, s) in nerve.simplices(degree + 1).iter().enumerate() {
        for (face, k) in faces(s) {
            let col_pos = nerve.index_of(&face).map_err(SheafError::from)?;
            let r = sheaf.restriction(&face, s)?;
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let block = r.matrix.scale(&BigInt::from(sign));
            // blocks from distinct faces land in distinct column ranges
            let mut cur = d.submatrix(dst[row_pos]..dst[row_pos + 1], src[col_pos]..src[col_pos + 1]);
            cur = cur.add(&block)?;
            d.set_block(dst[row_pos], src[col_pos], &cur);
        }
    }
    Ok(d)
}

/// `d` as a morphism of cochain groups.
pub fn coboundary_morphism(sheaf: &AbelianSheaf, degree: usize) -> Result<GroupMorphism, CechError> {
    Ok(GroupMorphism::new(
        cochain_group(sheaf, degree),
        cochain_group(sheaf, degree + 1),
        coboundary_matrix(sheaf, degree)?,
    )?)
}

pub fn coboundary(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<Cochain, CechError> {
    let p = omega.degree;
    check_cap(sheaf, p + 1)?;
    let nerve = sheaf.nerve();
    let mut values = Vec::new();
    for (s, g) in nerve.simplices(p + 1).iter().zip(sheaf.groups_in_degree(p + 1)) {
        let mut acc = g.zero_element();
        for (face, k) in faces(s) {
            let term = sheaf.restriction(&face, s)?.apply(omega.value_at(sheaf, &face)?)?;
            acc = if k % 2 == 0 { &acc + &term } else { &acc - &term };
        }
        values.push(acc);
    }
    Cochain::new(sheaf, p + 1, values)
}

pub fn is_cocycle(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<bool, CechError> {
    coboundary(sheaf, omega)?.is_zero(sheaf)
}

/// `H^p = ker d_p / im d_{p-1}` with representative cocycles.
#[derive(Clone, Debug)]
pub struct CohomologyGroup {
    pub degree: usize,
    /// Presentation with one generator per cyclic summand.
    pub group: FGAbelianGroup,
    /// One representative cocycle per generator of `group`.
    pub representatives: Vec<Cochain>,
    cocycles: FGAbelianGroup,
    cocycle_inclusion: GroupMorphism,
    to_classes: IntMatrix,
}

impl CohomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    /// Coordinates of the class of `omega` on the generators of `group`,
    /// torsion coordinates reduced.
    pub fn class_of(&self, omega: &Cochain) -> Result<GroupElement, CechError> {
        if omega.degree != self.degree {
            return Err(CechError::DegreeMismatch(omega.degree, self.degree));
        }
        let ambient = &self.cocycle_inclusion.target;
        let x = GroupElement(omega.flatten());
        let Some(y) = express_in(ambient, &self.cocycle_inclusion.matrix, &x)? else {
            return Err(CechError::NotACocycle(omega.degree));
        };
        debug_assert_eq!(y.len(), self.cocycles.generator_count());
        let h = GroupElement(self.to_classes.mul_vec(y.coords())?);
        Ok(self.group.reduce_cyclic(&h))
    }
}

pub fn cohomology(sheaf: &AbelianSheaf, degree: usize) -> Result<CohomologyGroup, CechError> {
    let d = coboundary_morphism(sheaf, degree)?;
    let analysis = analyze_morphism(&d)?;
    let cocycles = analysis.kernel;
    let inclusion = analysis.kernel_inclusion;
    let ambient = cochain_group(sheaf, degree);

    // Boundaries, expressed on the cocycle generators.
    let mut boundary_cols = Vec::new();
    if degree > 0 {
        let prev = coboundary_matrix(sheaf, degree - 1)?;
        for j in 0..prev.cols() {
            let b = GroupElement(prev.column(j));
            let y = express_in(&ambient, &inclusion.matrix, &b)?
                .expect("boundaries are cocycles (d∘d = 0)");
            boundary_cols.push(y.0);
        }
    }
    let k = cocycles.generator_count();
    let rels = cocycles
        .relations()
        .hconcat(&IntMatrix::from_columns(k, &boundary_cols)?)?;
    let (group, to_classes, from_classes) = FGAbelianGroup::new(k, rels)?.simplify();
    let reps_matrix = inclusion.matrix.mul(&from_classes)?;
    let representatives = (0..group.generator_count())
        .map(|i| Cochain::unflatten(sheaf, degree, &reps_matrix.column(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CohomologyGroup {
        degree,
        group,
        representatives,
        cocycles,
        cocycle_inclusion: GroupMorphism::new(
            FGAbelianGroup::free(k),
            ambient,
            inclusion.matrix,
        )?,
        to_classes,
    })
}

/// Result of asking whether a cocycle is a coboundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    /// `dη = ω`.
    Witness(Cochain),
    /// No `η` exists: certificate against [`witness_system`].
    NoWitness(IntegerInfeasibility),
}

/// The system `[D_{p-1} | R_{C^p}] · z = ω` whose solvability decides whether
/// a degree-`p` cocycle is a coboundary.
pub fn witness_system(sheaf: &AbelianSheaf, degree: usize) -> Result<IntMatrix, CechError> {
    if degree == 0 {
        return Err(CechError::NoWitnessInDegreeZero);
    }
    let d = coboundary_matrix(sheaf, degree - 1)?;
    Ok(d.hconcat(cochain_group(sheaf, degree).relations())?)
}

pub fn coboundary_witness_or_certificate(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<WitnessOutcome, CechError> {
    let p = omega.degree;
    if p == 0 {
        return Err(CechError::NoWitnessInDegreeZero);
    }
    if !is_cocycle(sheaf, omega)? {
        return Err(CechError::NotACocycle(p));
    }
    let system = witness_system(sheaf, p)?;
    let n = cochain_group(sheaf, p - 1).generator_count();
    match solve_or_certify(&system, &omega.flatten())? {
        Solvability::Solution(z) => Ok(WitnessOutcome::Witness(Cochain::unflatten(sheaf, p - 1, &z[..n])?)),
        Solvability::Infeasible(cert) => Ok(WitnessOutcome::NoWitness(cert)),
    }
}

/// Some `η` with `dη = ω`, or `None` when the class of `ω` is nonzero.
pub fn coboundary_witness(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<Option<Cochain>, CechError> {
    Ok(match coboundary_witness_or_certificate(sheaf, omega)? {
        WitnessOutcome::Witness(eta) => Some(eta),
        WitnessOutcome::NoWitness(_) => None,
    })
}

/// Whether the class of the cocycle `omega` vanishes.
pub fn is_coboundary(sheaf: &AbelianSheaf, omega: &Cochain) -> Result<bool, CechError> {
    if omega.degree == 0 {
        return omega.is_zero(sheaf);
    }
    Ok(coboundary_witness(sheaf, omega)?.is_some())
}

/// `ω` with every value zero except `value` on `s`.
pub fn single_value_cochain(
    sheaf: &AbelianSheaf,
    s: &Simplex,
    value: GroupElement,
) -> Result<Cochain, CechError> {
    let mut c = Cochain::zero(sheaf, s.dimension());
    c.set_value(sheaf, s, value)?;
    Ok(c)
}
