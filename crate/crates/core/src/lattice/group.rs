use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::smith::{smith_normal_form, SnfDecomposition};
use super::solve::{integer_kernel, solve_any};
use super::{IntMatrix, LatticeError};

/// A vector of generator coordinates.
///
/// The derived `PartialEq` compares coordinates literally; equality inside a
/// group (modulo relations) is [`FGAbelianGroup::element_equal`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement(pub Vec<BigInt>);

impl GroupElement {
    pub fn zero(len: usize) -> Self {
        GroupElement(vec![BigInt::zero(); len])
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        GroupElement(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    /// The `i`-th generator of a group with `len` generators.
    pub fn basis(len: usize, i: usize) -> Self {
        let mut e = Self::zero(len);
        e.0[i] = BigInt::one();
        e
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_literally_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        GroupElement(self.0.iter().map(|x| x * k).collect())
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl Add for &GroupElement {
    type Output = GroupElement;
    fn add(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.len(), rhs.len(), "adding elements of different groups");
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &GroupElement {
    type Output = GroupElement;
    fn sub(self, rhs: &GroupElement) -> GroupElement {
        assert_eq!(self.len(), rhs.len(), "subtracting elements of different groups");
        GroupElement(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &GroupElement {
    type Output = GroupElement;
    fn neg(self) -> GroupElement {
        GroupElement(self.0.iter().map(|a| -a).collect())
    }
}

impl From<Vec<BigInt>> for GroupElement {
    fn from(v: Vec<BigInt>) -> Self {
        GroupElement(v)
    }
}

/// Free rank and torsion coefficients (all > 1, each dividing the next).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Finitely presented abelian group `ℤ^n / ⟨relations⟩`; relations are columns.
#[derive(Clone)]
pub struct FGAbelianGroup {
    generators: usize,
    relations: IntMatrix,
    snf: OnceLock<Arc<SnfDecomposition>>,
}

impl PartialEq for FGAbelianGroup {
    fn eq(&self, other: &Self) -> bool {
        self.generators == other.generators && self.relations == other.relations
    }
}

impl Eq for FGAbelianGroup {}

impl fmt::Debug for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FGAbelianGroup(gens={}, rels={:?}) ≅ {}",
            self.generators,
            self.relations,
            self.invariants()
        )
    }
}

impl FGAbelianGroup {
    pub fn new(generators: usize, relations: IntMatrix) -> Result<Self, LatticeError> {
        if relations.rows() != generators {
            return Err(LatticeError::DimensionMismatch {
                context: "relation matrix rows vs generator count",
                expected: generators,
                found: relations.rows(),
            });
        }
        Ok(FGAbelianGroup {
            generators,
            relations,
            snf: OnceLock::new(),
        })
    }

    /// Group with the given relation vectors (each of length `generators`).
    pub fn from_relation_vectors(generators: usize, relations: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let cols: Vec<Vec<BigInt>> = relations
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::new(generators, IntMatrix::from_columns(generators, &cols)?)
    }

    pub fn free(rank: usize) -> Self {
        Self::new(rank, IntMatrix::zeros(rank, 0)).expect("shape is consistent")
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    /// `ℤ/m` on one generator; `m = 0` gives `ℤ`.
    pub fn cyclic(m: i64) -> Self {
        if m == 0 {
            return Self::free(1);
        }
        Self::new(1, IntMatrix::from_rows(&[[m]])).expect("shape is consistent")
    }

    /// `⊕ ℤ/m_i`; a zero modulus contributes a free summand.
    pub fn from_moduli(moduli: &[i64]) -> Self {
        Self::direct_sum(&moduli.iter().map(|&m| Self::cyclic(m)).collect::<Vec<_>>())
    }

    pub fn direct_sum(groups: &[FGAbelianGroup]) -> Self {
        let blocks: Vec<&IntMatrix> = groups.iter().map(|g| &g.relations).collect();
        let generators = groups.iter().map(|g| g.generators).sum();
        Self::new(generators, IntMatrix::block_diagonal(&blocks)).expect("blocks are consistent")
    }

    pub fn generator_count(&self) -> usize {
        self.generators
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn snf(&self) -> &SnfDecomposition {
        self.snf.get_or_init(|| Arc::new(smith_normal_form(&self.relations)))
    }

    /// Invariant factor of coordinate `i` after the SNF change of basis
    /// (`0` for free coordinates).
    fn factor(&self, i: usize) -> BigInt {
        let snf = self.snf();
        if i < snf.s.cols() {
            snf.s.get(i, i).clone()
        } else {
            BigInt::zero()
        }
    }

    pub fn invariants(&self) -> Invariants {
        let mut free_rank = 0;
        let mut torsion = Vec::new();
        for i in 0..self.generators {
            let d = self.factor(i);
            if d.is_zero() {
                free_rank += 1;
            } else if !d.is_one() {
                torsion.push(d);
            }
        }
        Invariants { free_rank, torsion }
    }

    pub fn is_trivial(&self) -> bool {
        let inv = self.invariants();
        inv.free_rank == 0 && inv.torsion.is_empty()
    }

    /// Group order, `None` when infinite.
    pub fn order(&self) -> Option<BigInt> {
        let inv = self.invariants();
        (inv.free_rank == 0).then(|| inv.torsion.iter().product())
    }

    pub fn zero_element(&self) -> GroupElement {
        GroupElement::zero(self.generators)
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        GroupElement::basis(self.generators, i)
    }

    pub fn check_element(&self, x: &GroupElement) -> Result<(), LatticeError> {
        if x.len() != self.generators {
            return Err(LatticeError::DimensionMismatch {
                context: "element coordinates vs generator count",
                expected: self.generators,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Canonical coordinates of `x` in the SNF basis: torsion coordinates
    /// reduced into `[0, d)`, unit factors dropped. Two elements are equal in
    /// the group iff their normal forms coincide.
    pub fn normal_form(&self, x: &GroupElement) -> Result<Vec<BigInt>, LatticeError> {
        self.check_element(x)?;
        let y = self.snf().u.mul_vec(x.coords())?;
        Ok(y
            .into_iter()
            .enumerate()
            .filter_map(|(i, yi)| {
                let d = self.factor(i);
                if d.is_zero() {
                    Some(yi)
                } else if d.is_one() {
                    None
                } else {
                    Some(yi.mod_floor(&d))
                }
            })
            .collect())
    }

    /// Canonical representative of the class of `x`, in generator coordinates.
    pub fn reduce(&self, x: &GroupElement) -> Result<GroupElement, LatticeError> {
        self.check_element(x)?;
        let snf = self.snf();
        let y: Vec<BigInt> = snf
            .u
            .mul_vec(x.coords())?
            .into_iter()
            .enumerate()
            .map(|(i, yi)| {
                let d = self.factor(i);
                if d.is_zero() {
                    yi
                } else {
                    yi.mod_floor(&d)
                }
            })
            .collect();
        Ok(GroupElement(snf.u_inv.mul_vec(&y)?))
    }

    pub fn is_zero(&self, x: &GroupElement) -> Result<bool, LatticeError> {
        Ok(self.normal_form(x)?.iter().all(Zero::is_zero))
    }

    /// Equality modulo the relation lattice.
    pub fn element_equal(&self, a: &GroupElement, b: &GroupElement) -> Result<bool, LatticeError> {
        self.check_element(a)?;
        self.check_element(b)?;
        self.is_zero(&(a - b))
    }

    /// Splits the group into cyclic summands. Returns the simplified group
    /// (one generator per nontrivial invariant factor, relations `d_i·e_i`),
    /// the map old coordinates → new, and new → old.
    pub fn simplify(&self) -> (FGAbelianGroup, IntMatrix, IntMatrix) {
        let snf = self.snf();
        let kept: Vec<usize> = (0..self.generators).filter(|&i| !self.factor(i).is_one()).collect();
        let mut rel_cols = Vec::new();
        for (k, &i) in kept.iter().enumerate() {
            let d = self.factor(i);
            if !d.is_zero() {
                let mut col = vec![BigInt::zero(); kept.len()];
                col[k] = d;
                rel_cols.push(col);
            }
        }
        let group = FGAbelianGroup::new(
            kept.len(),
            IntMatrix::from_columns(kept.len(), &rel_cols).expect("columns sized to kept"),
        )
        .expect("relations sized to kept");
        let to_simple = snf.u.select_rows(&kept);
        let from_simple = snf.u_inv.select_columns(&kept);
        (group, to_simple, from_simple)
    }

    /// Reduces an element of the simplified group into `[0, d)` per torsion coordinate.
    pub(crate) fn reduce_cyclic(&self, x: &GroupElement) -> GroupElement {
        // Only meaningful on groups produced by `simplify`.
        let mut out = x.clone();
        for j in 0..self.relations.cols() {
            let col = self.relations.column(j);
            if let Some((i, d)) = col.iter().enumerate().find(|(_, d)| !d.is_zero()) {
                out.0[i] = out.0[i].mod_floor(d);
            }
        }
        out
    }
}

/// Homomorphism between presented groups, acting on generator coordinates.
#[derive(Clone, PartialEq, Eq)]
pub struct GroupMorphism {
    pub source: FGAbelianGroup,
    pub target: FGAbelianGroup,
    pub matrix: IntMatrix,
}

impl fmt::Debug for GroupMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "GroupMorphism({} -> {}, {:?})",
            self.source.invariants(),
            self.target.invariants(),
            self.matrix
        )
    }
}

impl GroupMorphism {
    /// Checks shapes only; well-definedness is [`GroupMorphism::check_well_defined`].
    pub fn new(source: FGAbelianGroup, target: FGAbelianGroup, matrix: IntMatrix) -> Result<Self, LatticeError> {
        if matrix.rows() != target.generator_count() || matrix.cols() != source.generator_count() {
            return Err(LatticeError::MorphismShape {
                rows: matrix.rows(),
                cols: matrix.cols(),
                source_gens: source.generator_count(),
                target_gens: target.generator_count(),
            });
        }
        Ok(GroupMorphism { source, target, matrix })
    }

    pub fn identity(group: &FGAbelianGroup) -> Self {
        let n = group.generator_count();
        GroupMorphism {
            source: group.clone(),
            target: group.clone(),
            matrix: IntMatrix::identity(n),
        }
    }

    pub fn zero(source: &FGAbelianGroup, target: &FGAbelianGroup) -> Self {
        GroupMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix: IntMatrix::zeros(target.generator_count(), source.generator_count()),
        }
    }

    pub fn apply(&self, x: &GroupElement) -> Result<GroupElement, LatticeError> {
        self.source.check_element(x)?;
        Ok(GroupElement(self.matrix.mul_vec(x.coords())?))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GroupMorphism) -> Result<GroupMorphism, LatticeError> {
        if inner.target.generator_count() != self.source.generator_count() {
            return Err(LatticeError::DimensionMismatch {
                context: "composition of morphisms",
                expected: self.source.generator_count(),
                found: inner.target.generator_count(),
            });
        }
        Ok(GroupMorphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.mul(&inner.matrix)?,
        })
    }

    /// Errors with the first source relation whose image is not a target relation.
    pub fn check_well_defined(&self) -> Result<(), LatticeError> {
        let images = self.matrix.mul(self.source.relations())?;
        for j in 0..images.cols() {
            if !self.target.is_zero(&GroupElement(images.column(j)))? {
                return Err(LatticeError::IllDefinedMorphism { relation: j });
            }
        }
        Ok(())
    }

    pub fn is_well_defined(&self) -> bool {
        self.check_well_defined().is_ok()
    }

    /// True when the two morphisms agree on every generator (modulo target relations).
    pub fn agrees_with(&self, other: &GroupMorphism) -> Result<bool, LatticeError> {
        let diff = self.matrix.sub(&other.matrix)?;
        for j in 0..diff.cols() {
            if !self.target.is_zero(&GroupElement(diff.column(j)))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_zero_map(&self) -> Result<bool, LatticeError> {
        self.agrees_with(&GroupMorphism::zero(&self.source, &self.target))
    }

    /// Some `x` with `f(x) = y` in the target group, if one exists.
    pub fn preimage(&self, y: &GroupElement) -> Result<Option<GroupElement>, LatticeError> {
        self.target.check_element(y)?;
        let system = self.matrix.hconcat(self.target.relations())?;
        Ok(super::solve::solve_linear(&system, y.coords())?
            .map(|z| GroupElement(z[..self.source.generator_count()].to_vec())))
    }
}

/// Kernel, image and cokernel of a morphism, each with its structure map.
#[derive(Clone, Debug)]
pub struct MorphismAnalysis {
    pub kernel: FGAbelianGroup,
    /// kernel → source
    pub kernel_inclusion: GroupMorphism,
    pub image: FGAbelianGroup,
    /// image → target
    pub image_inclusion: GroupMorphism,
    /// source → image (corestriction)
    pub image_projection: GroupMorphism,
    pub cokernel: FGAbelianGroup,
    /// target → cokernel
    pub cokernel_projection: GroupMorphism,
}

/// Lattice `{x : M·x ∈ im R}` as a matrix of generating columns.
fn preimage_lattice(m: &IntMatrix, r: &IntMatrix) -> Result<IntMatrix, LatticeError> {
    let n = m.cols();
    let k = integer_kernel(&m.hconcat(r)?);
    Ok(k.submatrix(0..n, 0..k.cols()))
}

pub fn analyze_morphism(f: &GroupMorphism) -> Result<MorphismAnalysis, LatticeError> {
    f.check_well_defined()?;
    let source = &f.source;
    let target = &f.target;
    let n = source.generator_count();

    // ker f = P / R_source, P = preimage of the target relation lattice.
    let p = preimage_lattice(&f.matrix, target.relations())?;
    let kernel_rels = preimage_lattice(&p, source.relations())?;
    let raw_kernel = FGAbelianGroup::new(p.cols(), kernel_rels)?;
    let (kernel, _, from_simple) = raw_kernel.simplify();
    let kernel_inclusion = GroupMorphism::new(kernel.clone(), source.clone(), p.mul(&from_simple)?)?;

    // im f ≅ ℤ^n / P
    let raw_image = FGAbelianGroup::new(n, p)?;
    let (image, to_simple, from_simple) = raw_image.simplify();
    let image_inclusion = GroupMorphism::new(image.clone(), target.clone(), f.matrix.mul(&from_simple)?)?;
    let image_projection = GroupMorphism::new(source.clone(), image.clone(), to_simple)?;

    // coker f = ℤ^m / [R_target | M]
    let raw_coker = FGAbelianGroup::new(target.generator_count(), target.relations().hconcat(&f.matrix)?)?;
    let (cokernel, to_simple, _) = raw_coker.simplify();
    let cokernel_projection = GroupMorphism::new(target.clone(), cokernel.clone(), to_simple)?;

    Ok(MorphismAnalysis {
        kernel,
        kernel_inclusion,
        image,
        image_inclusion,
        image_projection,
        cokernel,
        cokernel_projection,
    })
}

/// Equality of `a` and `b` in `group`.
pub fn element_equal(group: &FGAbelianGroup, a: &GroupElement, b: &GroupElement) -> Result<bool, LatticeError> {
    group.element_equal(a, b)
}

/// Whether `x` lies in the subgroup generated by the columns of `gens` plus the
/// relations of `group`; returns the coefficients on `gens` when it does.
pub(crate) fn express_in(
    group: &FGAbelianGroup,
    gens: &IntMatrix,
    x: &GroupElement,
) -> Result<Option<GroupElement>, LatticeError> {
    group.check_element(x)?;
    let system = gens.hconcat(group.relations())?;
    Ok(solve_any(&system, x.coords())?.map(|z| GroupElement(z[..gens.cols()].to_vec())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> FGAbelianGroup {
        FGAbelianGroup::free(1)
    }

    #[test]
    fn times_two_on_integers() {
        let f = GroupMorphism::new(z(), z(), IntMatrix::from_rows(&[[2]])).unwrap();
        let a = analyze_morphism(&f).unwrap();
        assert!(a.kernel.is_trivial());
        assert_eq!(a.image.invariants().free_rank, 1);
        assert_eq!(a.cokernel.invariants().torsion, vec![BigInt::from(2)]);
        assert_eq!(a.cokernel.invariants().free_rank, 0);
    }

    #[test]
    fn zero_map_on_integers() {
        let f = GroupMorphism::zero(&z(), &z());
        let a = analyze_morphism(&f).unwrap();
        assert_eq!(a.kernel.invariants().free_rank, 1);
        assert!(a.image.is_trivial());
        assert_eq!(a.cokernel.invariants().free_rank, 1);
    }

    #[test]
    fn sum_projection() {
        let f = GroupMorphism::new(FGAbelianGroup::free(2), z(), IntMatrix::from_rows(&[[1, 1]])).unwrap();
        let a = analyze_morphism(&f).unwrap();
        assert_eq!(a.kernel.invariants().free_rank, 1);
        assert!(a.kernel.invariants().torsion.is_empty());
        assert!(a.cokernel.is_trivial());
        // the kernel generator maps to zero
        let k = a.kernel_inclusion.apply(&a.kernel.generator(0)).unwrap();
        assert!(f.apply(&k).unwrap().is_literally_zero());
    }

    #[test]
    fn ill_defined_morphism_is_rejected() {
        // Z/2 -> Z/3 by identity on the generator does not respect 2·e = 0
        let f = GroupMorphism::new(FGAbelianGroup::cyclic(2), FGAbelianGroup::cyclic(3), IntMatrix::from_rows(&[[1]]))
            .unwrap();
        assert!(matches!(analyze_morphism(&f), Err(LatticeError::IllDefinedMorphism { relation: 0 })));
    }

    #[test]
    fn element_equality_examples() {
        let z4 = FGAbelianGroup::cyclic(4);
        assert!(element_equal(&z4, &GroupElement::from_i64s(&[5]), &GroupElement::from_i64s(&[1])).unwrap());
        assert!(!element_equal(&z(), &GroupElement::from_i64s(&[5]), &GroupElement::from_i64s(&[1])).unwrap());
        let g = FGAbelianGroup::from_relation_vectors(2, &[vec![2, 2]]).unwrap();
        assert!(element_equal(&g, &GroupElement::from_i64s(&[3, 1]), &GroupElement::from_i64s(&[1, -1])).unwrap());
        assert!(element_equal(&z4, &GroupElement::from_i64s(&[1, 2]), &GroupElement::from_i64s(&[1])).is_err());
    }

    #[test]
    fn invariants_of_presentations() {
        let g = FGAbelianGroup::from_relation_vectors(3, &[vec![2, 0, 0], vec![0, 3, 0]]).unwrap();
        let inv = g.invariants();
        assert_eq!(inv.free_rank, 1);
        assert_eq!(inv.torsion, vec![BigInt::from(6)]);
        assert_eq!(inv.to_string(), "Z/6 + Z");
        assert_eq!(FGAbelianGroup::trivial().invariants().to_string(), "0");
    }

    #[test]
    fn simplify_round_trip() {
        let g = FGAbelianGroup::from_relation_vectors(2, &[vec![2, 4], vec![6, 8]]).unwrap();
        let (s, to, from) = g.simplify();
        assert_eq!(s.invariants(), g.invariants());
        for i in 0..2 {
            let e = g.generator(i);
            let there = GroupElement(to.mul_vec(e.coords()).unwrap());
            let back = GroupElement(from.mul_vec(there.coords()).unwrap());
            assert!(g.element_equal(&e, &back).unwrap());
        }
    }

    #[test]
    fn preimage_modulo_relations() {
        // Z -> Z/4, 1 ↦ 1: preimage of 3 exists
        let f = GroupMorphism::new(z(), FGAbelianGroup::cyclic(4), IntMatrix::from_rows(&[[1]])).unwrap();
        let x = f.preimage(&GroupElement::from_i64s(&[3])).unwrap().unwrap();
        assert!(f.target.element_equal(&f.apply(&x).unwrap(), &GroupElement::from_i64s(&[3])).unwrap());
    }
}
