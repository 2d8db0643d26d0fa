//! Random sheaves, exact sequences and descent data for tests and demos.
//!
//! Sheaves are direct sums of *pieces*: a cyclic group on each simplex of a
//! convex support (upward closed, downward closed, or everything), zero
//! elsewhere, with restrictions that are `1` between nonzero groups. Exact
//! sequences are direct sums of a few standard blueprints whose middle sheaf
//! is then scrambled by a random per-simplex automorphism.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cech::{coboundary, cohomology, Cochain};
use crate::connecting::{LiftingChoice, ShortExactSequence, SheafMorphism, TwoStepExtension};
use crate::descent::{AutomorphismDatum, Band, GerbeDescentDatum, TorsorMorphism};
use crate::lattice::{FGAbelianGroup, GroupElement, IntMatrix};
use crate::nerve::{build_nerve, Cover, Nerve, Simplex, DEFAULT_DIM_CAP};
use crate::sheaf::AbelianSheaf;

/// A random nerve on `1..=max_opens` opens.
pub fn random_nerve<R: Rng>(rng: &mut R, max_opens: usize) -> Arc<Nerve> {
    let n = rng.gen_range(1..=max_opens.max(1));
    let mut chosen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for mask in 1u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let p = match subset.len() {
            1 => 1.0,
            2 => 0.75,
            3 => 0.5,
            _ => 0.35,
        };
        if rng.gen_bool(p) {
            chosen.insert(subset);
        }
    }
    // Close downward.
    let mut closed = chosen.clone();
    for s in &chosen {
        for mask in 1u32..(1 << s.len()) {
            closed.insert((0..s.len()).filter(|i| mask & (1 << i) != 0).map(|i| s[i]).collect());
        }
    }
    Arc::new(build_nerve(&Cover::numbered(n, closed.into_iter().collect()), DEFAULT_DIM_CAP).expect("closed"))
}

/// A convex set of simplices on which a piece lives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Support {
    All,
    /// Upward closed: extension by zero from an open part.
    Open(BTreeSet<Simplex>),
    /// Downward closed: pushforward from a closed part.
    Closed(BTreeSet<Simplex>),
}

impl Support {
    pub fn contains(&self, s: &Simplex) -> bool {
        match self {
            Support::All => true,
            Support::Open(u) | Support::Closed(u) => u.contains(s),
        }
    }

    /// The complementary support.
    pub fn complement(&self, nerve: &Nerve) -> Support {
        let rest = |u: &BTreeSet<Simplex>| nerve.all_simplices().filter(|s| !u.contains(s)).cloned().collect();
        match self {
            Support::All => Support::Closed(BTreeSet::new()),
            Support::Open(u) => Support::Closed(rest(u)),
            Support::Closed(u) => Support::Open(rest(u)),
        }
    }
}

pub fn random_open_support<R: Rng>(rng: &mut R, nerve: &Nerve) -> Support {
    let seeds = random_seeds(rng, nerve);
    Support::Open(nerve.all_simplices().filter(|s| seeds.iter().any(|t| s.contains(t))).cloned().collect())
}

fn random_seeds<R: Rng>(rng: &mut R, nerve: &Nerve) -> Vec<Simplex> {
    nerve.all_simplices().filter(|_| rng.gen_bool(0.3)).cloned().collect()
}

pub fn random_closed_support<R: Rng>(rng: &mut R, nerve: &Nerve) -> Support {
    let seeds = random_seeds(rng, nerve);
    Support::Closed(closure(nerve, &seeds))
}

/// The smallest downward closed set containing `seeds`.
pub fn closure(nerve: &Nerve, seeds: &[Simplex]) -> BTreeSet<Simplex> {
    nerve.all_simplices().filter(|s| seeds.iter().any(|t| t.contains(s))).cloned().collect()
}

pub fn random_support<R: Rng>(rng: &mut R, nerve: &Nerve) -> Support {
    match rng.gen_range(0..3) {
        0 => Support::All,
        1 => random_open_support(rng, nerve),
        _ => random_closed_support(rng, nerve),
    }
}

/// A cyclic group (`modulus` 0 is ℤ) on `support`, possibly coarsened to
/// `ℤ/coarse` outside `fine_on` (a downward closed set).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub modulus: i64,
    pub support: Support,
    /// `(fine_on, coarse)`: the group is `ℤ/modulus` on `fine_on` and
    /// `ℤ/coarse` elsewhere, with `coarse | modulus`.
    pub level: Option<(BTreeSet<Simplex>, i64)>,
}

impl Piece {
    pub fn new(modulus: i64, support: Support) -> Self {
        Piece {
            modulus,
            support,
            level: None,
        }
    }

    /// Modulus at `s`, or `None` for the zero group.
    pub fn modulus_at(&self, s: &Simplex) -> Option<i64> {
        if !self.support.contains(s) {
            return None;
        }
        match &self.level {
            Some((fine, coarse)) if !fine.contains(s) => Some(*coarse),
            _ => Some(self.modulus),
        }
    }
}

/// Positions of the nonzero pieces at `s`.
fn active(pieces: &[Piece], s: &Simplex) -> Vec<usize> {
    (0..pieces.len()).filter(|&k| pieces[k].modulus_at(s).is_some()).collect()
}

/// The direct sum of `pieces`.
pub fn piece_sheaf(nerve: &Arc<Nerve>, pieces: &[Piece]) -> AbelianSheaf {
    let mut sheaf = AbelianSheaf::new(Arc::clone(nerve), |s| {
        let moduli: Vec<i64> = pieces.iter().filter_map(|p| p.modulus_at(s)).collect();
        FGAbelianGroup::from_moduli(&moduli)
    });
    sheaf
        .fill_restrictions(|face, coface| {
            let links: Vec<(usize, usize, i64)> = (0..pieces.len()).map(|k| (k, k, 1)).collect();
            link_matrix(pieces, pieces, &links, face, coface)
        })
        .expect("pieces fit the nerve");
    sheaf
}

/// Matrix from the pieces active on `from` to the pieces active on `to`
/// with entry `k` for every link `(source piece, target piece, k)`.
fn link_matrix(
    source: &[Piece],
    target: &[Piece],
    links: &[(usize, usize, i64)],
    from: &Simplex,
    to: &Simplex,
) -> IntMatrix {
    let cols = active(source, from);
    let rows = active(target, to);
    let mut m = IntMatrix::zeros(rows.len(), cols.len());
    for &(a, b, k) in links {
        if let (Some(c), Some(r)) = (cols.iter().position(|&x| x == a), rows.iter().position(|&x| x == b)) {
            m.set(r, c, BigInt::from(k));
        }
    }
    m
}

pub fn random_piece<R: Rng>(rng: &mut R, nerve: &Nerve, moduli: &[i64]) -> Piece {
    let modulus = *moduli.choose(rng).expect("nonempty moduli");
    let support = random_support(rng, nerve);
    let mut piece = Piece::new(modulus, support);
    if modulus == 0 && rng.gen_bool(0.2) {
        if let Support::Closed(fine) = random_closed_support(rng, nerve) {
            piece.level = Some((fine, 2));
        }
    }
    piece
}

/// A random sheaf: a sum of `1..=max_pieces` random pieces with moduli from
/// `moduli`, scrambled by a random gauge.
pub fn random_sheaf<R: Rng>(rng: &mut R, nerve: &Arc<Nerve>, moduli: &[i64], max_pieces: usize) -> AbelianSheaf {
    let count = rng.gen_range(1..=max_pieces.max(1));
    let pieces: Vec<Piece> = (0..count).map(|_| random_piece(rng, nerve, moduli)).collect();
    let sheaf = piece_sheaf(nerve, &pieces);
    let gauge = random_gauge(rng, &sheaf);
    gauge.apply_to_sheaf(&sheaf)
}

/// Per-simplex automorphisms `g_σ` (with inverses) of a sheaf's groups.
#[derive(Clone, Debug)]
pub struct Gauge {
    pub forward: Vec<(Simplex, IntMatrix)>,
    pub inverse: Vec<(Simplex, IntMatrix)>,
}

impl Gauge {
    fn get<'a>(list: &'a [(Simplex, IntMatrix)], s: &Simplex) -> &'a IntMatrix {
        &list.iter().find(|(t, _)| t == s).expect("gauge covers the nerve").1
    }

    pub fn at(&self, s: &Simplex) -> &IntMatrix {
        Self::get(&self.forward, s)
    }

    pub fn inverse_at(&self, s: &Simplex) -> &IntMatrix {
        Self::get(&self.inverse, s)
    }

    /// The sheaf with restrictions `g_τ ∘ r ∘ g_σ⁻¹`.
    pub fn apply_to_sheaf(&self, sheaf: &AbelianSheaf) -> AbelianSheaf {
        let mut out = sheaf.clone();
        out.fill_restrictions(|face, coface| {
            let r = &sheaf.restriction(face, coface).expect("complete sheaf").matrix;
            self.at(coface)
                .mul(r)
                .and_then(|m| m.mul(self.inverse_at(face)))
                .expect("shapes match")
        })
        .expect("same shapes");
        out
    }
}

/// Products of elementary automorphisms `e_j ↦ e_j + k e_i` (allowed when
/// the order of `e_i` divides `k` times the order of `e_j`) and sign flips.
pub fn random_gauge<R: Rng>(rng: &mut R, sheaf: &AbelianSheaf) -> Gauge {
    let mut forward = Vec::new();
    let mut inverse = Vec::new();
    for s in sheaf.nerve().all_simplices() {
        let group = sheaf.group(s).expect("in nerve");
        let n = group.generator_count();
        let order = |i: usize| -> BigInt {
            // Relations of piece sheaves are diagonal: one column per torsion generator.
            let rels = group.relations();
            (0..rels.cols())
                .map(|c| rels.get(i, c).clone())
                .find(|x| *x != BigInt::from(0))
                .unwrap_or_default()
        };
        let mut g = IntMatrix::identity(n);
        let mut g_inv = IntMatrix::identity(n);
        for _ in 0..(2 * n) {
            if n == 0 {
                break;
            }
            if rng.gen_bool(0.3) {
                let i = rng.gen_range(0..n);
                g.negate_row(i);
                g_inv.negate_col(i);
                continue;
            }
            if n < 2 {
                continue;
            }
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i == j {
                continue;
            }
            let k = BigInt::from(rng.gen_range(1..=2i64));
            let (oi, oj) = (order(i), order(j));
            let allowed = if oi == BigInt::from(0) {
                oj == BigInt::from(0)
            } else {
                (&k * &oj) % &oi == BigInt::from(0)
            };
            if !allowed {
                continue;
            }
            // E = I + k E_ij acts on the left of g; its inverse on the right of g_inv.
            g.add_row_multiple(i, j, &k);
            g_inv.add_col_multiple(j, i, &(-&k));
        }
        forward.push((s.clone(), g));
        inverse.push((s.clone(), g_inv));
    }
    Gauge { forward, inverse }
}

/// A short exact sequence of piece sheaves: pieces plus links for the two maps.
#[derive(Clone, Debug, Default)]
pub struct SequenceBlueprint {
    pub kernel: Vec<Piece>,
    pub middle: Vec<Piece>,
    pub quotient: Vec<Piece>,
    pub inclusion: Vec<(usize, usize, i64)>,
    pub projection: Vec<(usize, usize, i64)>,
}

impl SequenceBlueprint {
    /// `0 → ℤ →(×q) ℤ → ℤ/q → 0` on a support.
    pub fn bockstein(support: Support, q: i64) -> Self {
        SequenceBlueprint {
            kernel: vec![Piece::new(0, support.clone())],
            middle: vec![Piece::new(0, support.clone())],
            quotient: vec![Piece::new(q, support)],
            inclusion: vec![(0, 0, q)],
            projection: vec![(0, 0, 1)],
        }
    }

    /// `0 → j_!G_U → G → i_*G_D → 0` for an open support and its complement.
    pub fn open_closed(nerve: &Nerve, open: Support, modulus: i64) -> Self {
        let closed = open.complement(nerve);
        SequenceBlueprint {
            kernel: vec![Piece::new(modulus, open)],
            middle: vec![Piece::new(modulus, Support::All)],
            quotient: vec![Piece::new(modulus, closed)],
            inclusion: vec![(0, 0, 1)],
            projection: vec![(0, 0, 1)],
        }
    }

    /// Mayer–Vietoris for two closed sets:
    /// `0 → G_{A∪B} → G_A ⊕ G_B → G_{A∩B} → 0`.
    pub fn mayer_vietoris(a: &BTreeSet<Simplex>, b: &BTreeSet<Simplex>, modulus: i64) -> Self {
        SequenceBlueprint {
            kernel: vec![Piece::new(modulus, Support::Closed(a.union(b).cloned().collect()))],
            middle: vec![
                Piece::new(modulus, Support::Closed(a.clone())),
                Piece::new(modulus, Support::Closed(b.clone())),
            ],
            quotient: vec![Piece::new(modulus, Support::Closed(a.intersection(b).cloned().collect()))],
            inclusion: vec![(0, 0, 1), (0, 1, 1)],
            projection: vec![(0, 0, 1), (1, 0, -1)],
        }
    }

    /// `0 → A → A ⊕ B → B → 0`.
    pub fn split(a: Vec<Piece>, b: Vec<Piece>) -> Self {
        let na = a.len();
        let nb = b.len();
        let middle = a.iter().chain(&b).cloned().collect();
        SequenceBlueprint {
            kernel: a,
            middle,
            quotient: b,
            inclusion: (0..na).map(|i| (i, i, 1)).collect(),
            projection: (0..nb).map(|j| (na + j, j, 1)).collect(),
        }
    }

    pub fn direct_sum(parts: &[SequenceBlueprint]) -> Self {
        let mut out = SequenceBlueprint::default();
        for p in parts {
            let (ol, om, on) = (out.kernel.len(), out.middle.len(), out.quotient.len());
            out.kernel.extend(p.kernel.iter().cloned());
            out.middle.extend(p.middle.iter().cloned());
            out.quotient.extend(p.quotient.iter().cloned());
            out.inclusion.extend(p.inclusion.iter().map(|&(a, b, k)| (a + ol, b + om, k)));
            out.projection.extend(p.projection.iter().map(|&(a, b, k)| (a + om, b + on, k)));
        }
        out
    }

    /// Builds the sequence, conjugating the middle sheaf by `gauge` when given.
    pub fn build<R: Rng>(&self, nerve: &Arc<Nerve>, rng: Option<&mut R>) -> ShortExactSequence {
        let kernel = piece_sheaf(nerve, &self.kernel);
        let plain_middle = piece_sheaf(nerve, &self.middle);
        let quotient = piece_sheaf(nerve, &self.quotient);
        let gauge = rng.map(|r| random_gauge(r, &plain_middle));
        let middle = gauge.as_ref().map_or_else(|| plain_middle.clone(), |g| g.apply_to_sheaf(&plain_middle));
        let inclusion = SheafMorphism::from_fn(&kernel, &middle, |s| {
            let m = link_matrix(&self.kernel, &self.middle, &self.inclusion, s, s);
            match &gauge {
                Some(g) => g.at(s).mul(&m).expect("shapes"),
                None => m,
            }
        })
        .expect("same nerve");
        let projection = SheafMorphism::from_fn(&middle, &quotient, |s| {
            let m = link_matrix(&self.middle, &self.quotient, &self.projection, s, s);
            match &gauge {
                Some(g) => m.mul(g.inverse_at(s)).expect("shapes"),
                None => m,
            }
        })
        .expect("same nerve");
        ShortExactSequence::new(kernel, middle, quotient, inclusion, projection).expect("same nerve")
    }
}

/// A random blueprint from bocksteins, open/closed sequences and split sums,
/// with groups among ℤ, ℤ/2, ℤ/3 (ℤ² arises as a sum).
pub fn random_blueprint<R: Rng>(rng: &mut R, nerve: &Nerve, parts: usize) -> SequenceBlueprint {
    let blocks: Vec<SequenceBlueprint> = (0..parts.max(1))
        .map(|_| match rng.gen_range(0..4) {
            0 => SequenceBlueprint::bockstein(random_support(rng, nerve), *[2, 3].choose(rng).expect("nonempty")),
            1 => {
                let open = random_open_support(rng, nerve);
                SequenceBlueprint::open_closed(nerve, open, *[0, 2, 3].choose(rng).expect("nonempty"))
            }
            2 => SequenceBlueprint::split(
                vec![random_piece(rng, nerve, &[0, 2, 3])],
                vec![random_piece(rng, nerve, &[0, 2, 3])],
            ),
            _ => SequenceBlueprint::split(vec![Piece::new(0, Support::All)], vec![Piece::new(0, Support::All)]),
        })
        .collect();
    SequenceBlueprint::direct_sum(&blocks)
}

/// A random exact sequence on a random nerve with at most `max_opens` opens.
pub fn random_sequence<R: Rng>(rng: &mut R, max_opens: usize) -> ShortExactSequence {
    let nerve = random_nerve(rng, max_opens);
    let parts = rng.gen_range(1..=2);
    let bp = random_blueprint(rng, &nerve, parts);
    bp.build(&nerve, Some(rng))
}

/// A random cocycle: the coboundary of a random cochain plus a random
/// combination of cohomology representatives.
pub fn random_cocycle<R: Rng>(rng: &mut R, sheaf: &AbelianSheaf, degree: usize) -> Cochain {
    let mut c = Cochain::zero(sheaf, degree);
    if degree > 0 {
        let b = random_cochain(rng, sheaf, degree - 1);
        c = coboundary(sheaf, &b).expect("valid degree");
    }
    if let Ok(h) = cohomology(sheaf, degree) {
        for rep in &h.representatives {
            let k = BigInt::from(rng.gen_range(-2..=2i64));
            let scaled = Cochain::new(sheaf, degree, rep.values().iter().map(|v| v.scale(&k)).collect()).expect("same shape");
            c = c.add(&scaled).expect("same shape");
        }
    }
    c
}

/// A cochain with small random coordinates.
pub fn random_cochain<R: Rng>(rng: &mut R, sheaf: &AbelianSheaf, degree: usize) -> Cochain {
    Cochain::from_fn(sheaf, degree, |_, g| {
        GroupElement((0..g.generator_count()).map(|_| BigInt::from(rng.gen_range(-3..=3i64))).collect())
    })
    .expect("shapes match")
}

/// Lifts of the values of `c` that differ from the default lifts by random
/// elements of the kernel's image.
pub fn random_lifting_choice<R: Rng>(rng: &mut R, seq: &ShortExactSequence, c: &Cochain) -> LiftingChoice {
    let nerve = seq.nerve();
    let mut choice = LiftingChoice::new();
    for (k, s) in nerve.simplices(c.degree()).iter().enumerate() {
        let pi = &seq.projection.in_degree(c.degree())[k];
        let iota = &seq.inclusion.in_degree(c.degree())[k];
        let v = &c.values()[k];
        let Some(base) = pi.preimage(v).expect("valid element") else {
            continue;
        };
        let l = GroupElement((0..iota.source.generator_count()).map(|_| BigInt::from(rng.gen_range(-2..=2i64))).collect());
        let shift = iota.apply(&l).expect("valid");
        choice.insert(s.clone(), v.clone(), &base + &shift);
    }
    choice
}

/// Two sequences sharing the middle term `K` of the extension, and their splice.
#[derive(Clone, Debug)]
pub struct SplicedPair {
    pub lower: ShortExactSequence,
    pub upper: ShortExactSequence,
    pub extension: TwoStepExtension,
}

/// Two Mayer–Vietoris sequences chained through `G_{A∩B}` where
/// `A∩B = E ∪ F`: the staged map is the composite of the two boundaries.
pub fn mayer_vietoris_chain(
    a: &BTreeSet<Simplex>,
    b: &BTreeSet<Simplex>,
    e: &BTreeSet<Simplex>,
    f: &BTreeSet<Simplex>,
    modulus: i64,
) -> (SequenceBlueprint, SequenceBlueprint) {
    debug_assert_eq!(e.union(f).cloned().collect::<BTreeSet<_>>(), a.intersection(b).cloned().collect());
    (
        SequenceBlueprint::mayer_vietoris(a, b, modulus),
        SequenceBlueprint::mayer_vietoris(e, f, modulus),
    )
}

/// Builds the splice of two blueprints whose quotient and kernel pieces agree.
pub fn splice_blueprints<R: Rng>(rng: &mut R, nerve: &Arc<Nerve>, lower: &SequenceBlueprint, upper: &SequenceBlueprint) -> SplicedPair {
    let lower = lower.build(nerve, Some(&mut *rng));
    let upper = upper.build(nerve, Some(&mut *rng));
    let extension = TwoStepExtension::splice(&lower, &upper).expect("shared middle term");
    SplicedPair { lower, upper, extension }
}

/// Nerve of the boundary of a `(dim + 1)`-simplex, a `dim`-sphere on
/// `dim + 2` opens.
pub fn sphere_nerve(dim: usize) -> Arc<Nerve> {
    let n = dim + 2;
    let nonempty = (1u32..(1 << n))
        .filter(|mask| (2..n as u32).contains(&mask.count_ones()))
        .map(|mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
        .collect();
    Arc::new(build_nerve(&Cover::numbered(n, nonempty), DEFAULT_DIM_CAP).expect("closed"))
}

fn facet_without(nerve: &Nerve, missing: usize) -> Simplex {
    let n = nerve.simplices(0).len();
    Simplex::new((0..n).filter(|&i| i != missing).collect()).expect("increasing")
}

/// The sphere cut into two balls: `A` is the two facets missing one of the
/// last two vertices, `B` the rest. `A ∩ B` is a sphere one dimension lower.
pub fn sphere_halves(nerve: &Nerve) -> (BTreeSet<Simplex>, BTreeSet<Simplex>) {
    let n = nerve.simplices(0).len();
    let a = closure(nerve, &[facet_without(nerve, n - 1), facet_without(nerve, n - 2)]);
    let rest: Vec<Simplex> = (0..n - 2).map(|k| facet_without(nerve, k)).collect();
    (a, closure(nerve, &rest))
}

/// Mayer–Vietoris for the halves of a `dim`-sphere. Its connecting map
/// `H^(dim-1)(A ∩ B) → H^dim(sphere)` is onto.
pub fn sphere_mayer_vietoris<R: Rng>(rng: &mut R, dim: usize, modulus: i64) -> ShortExactSequence {
    let nerve = sphere_nerve(dim);
    let (a, b) = sphere_halves(&nerve);
    SequenceBlueprint::mayer_vietoris(&a, &b, modulus).build(&nerve, Some(rng))
}

/// The 2-sphere cut into hemispheres, whose equator is cut into two arcs.
/// The staged map `H^0(two points) → H^2(sphere)` is onto.
pub fn sphere_spliced_pair<R: Rng>(rng: &mut R, modulus: i64) -> SplicedPair {
    let nerve = sphere_nerve(2);
    let s = |v: &[usize]| Simplex::new(v.to_vec()).expect("increasing");
    let (a, b) = sphere_halves(&nerve);
    let e = closure(&nerve, &[s(&[0, 2]), s(&[1, 2])]);
    let f = closure(&nerve, &[s(&[0, 3]), s(&[1, 3])]);
    let (lower, upper) = mayer_vietoris_chain(&a, &b, &e, &f, modulus);
    splice_blueprints(rng, &nerve, &lower, &upper)
}

/// `0 → L → A → K → 0` and `0 → K → B → N → 0` built piece by piece on `K`.
pub fn random_spliced_pair<R: Rng>(rng: &mut R, max_opens: usize) -> SplicedPair {
    let nerve = random_nerve(rng, max_opens);
    if rng.gen_bool(0.3) {
        // Chained Mayer–Vietoris on random closed sets.
        let a = closure(&nerve, &random_seeds(rng, &nerve));
        let b = closure(&nerve, &random_seeds(rng, &nerve));
        let ab: BTreeSet<Simplex> = a.intersection(&b).cloned().collect();
        let c = closure(&nerve, &random_seeds(rng, &nerve));
        let e: BTreeSet<Simplex> = ab.intersection(&c).cloned().collect();
        let rest: Vec<Simplex> = ab.difference(&e).cloned().collect();
        let extra = random_seeds(rng, &nerve);
        let mut f = closure(&nerve, &rest);
        f.extend(closure(&nerve, &extra).intersection(&ab).cloned());
        let modulus = *[0, 2, 3].choose(rng).expect("nonempty");
        let (lower, upper) = mayer_vietoris_chain(&a, &b, &e, &f, modulus);
        return splice_blueprints(rng, &nerve, &lower, &upper);
    }
    let count = rng.gen_range(1..=2);
    let mut lower_parts = Vec::new();
    let mut upper_parts = Vec::new();
    for _ in 0..count {
        let kind = rng.gen_range(0..3);
        let k = match kind {
            0 => Piece::new(*[2, 3].choose(rng).expect("nonempty"), random_support(rng, &nerve)),
            1 => Piece::new(*[0, 2].choose(rng).expect("nonempty"), random_open_support(rng, &nerve)),
            _ => Piece::new(*[0, 2].choose(rng).expect("nonempty"), random_closed_support(rng, &nerve)),
        };
        // Sequences with quotient k.
        let mut lowers = vec![SequenceBlueprint::split(vec![random_piece(rng, &nerve, &[0, 2, 3])], vec![k.clone()])];
        if k.modulus != 0 {
            lowers.push(SequenceBlueprint::bockstein(k.support.clone(), k.modulus));
        }
        if let Support::Closed(_) = k.support {
            let open = k.support.complement(&nerve);
            lowers.push(SequenceBlueprint::open_closed(&nerve, open, k.modulus));
        }
        // Sequences with kernel k.
        let mut uppers = vec![SequenceBlueprint::split(vec![k.clone()], vec![random_piece(rng, &nerve, &[0, 2, 3])])];
        if k.modulus == 0 {
            uppers.push(SequenceBlueprint::bockstein(k.support.clone(), *[2, 3].choose(rng).expect("nonempty")));
        }
        if let Support::Open(_) = k.support {
            uppers.push(SequenceBlueprint::open_closed(&nerve, k.support.clone(), k.modulus));
        }
        // Prefer the non-split choices; they carry the interesting classes.
        let pick = |rng: &mut R, v: Vec<SequenceBlueprint>| {
            if v.len() > 1 && rng.gen_bool(0.75) {
                v[rng.gen_range(1..v.len())].clone()
            } else {
                v[0].clone()
            }
        };
        lower_parts.push(pick(rng, lowers));
        upper_parts.push(pick(rng, uppers));
    }
    let lower = SequenceBlueprint::direct_sum(&lower_parts).build(&nerve, Some(&mut *rng));
    let upper = SequenceBlueprint::direct_sum(&upper_parts).build(&nerve, Some(&mut *rng));
    let extension = TwoStepExtension::splice(&lower, &upper).expect("shared middle term");
    SplicedPair { lower, upper, extension }
}

/// A random descent datum on `band`: random transitions and a cocycle defect.
pub fn random_descent_datum<R: Rng>(rng: &mut R, band: &AbelianSheaf) -> GerbeDescentDatum {
    let nerve = band.nerve();
    let objects: Vec<String> = (0..nerve.simplices(0).len()).map(|i| format!("x{}", i + 1)).collect();
    let offsets = random_cochain(rng, band, 1);
    let transitions = nerve
        .simplices(1)
        .iter()
        .zip(offsets.values())
        .map(|(e, v)| TorsorMorphism::new(objects[e.indices()[0]].clone(), objects[e.indices()[1]].clone(), v.clone()))
        .collect();
    let defect = random_cocycle(rng, band, 2);
    GerbeDescentDatum::new(Band::Abelian(band.clone()), objects, transitions, defect).expect("consistent by construction")
}

/// A random automorphism: random `l_i`, and images `h(u) = u + τ` with `τ` a cocycle.
pub fn random_automorphism<R: Rng>(rng: &mut R, datum: &GerbeDescentDatum) -> AutomorphismDatum {
    let band = datum.band();
    let nerve = band.nerve();
    let image_objects: Vec<String> = datum.objects().iter().map(|x| format!("h({x})")).collect();
    let l = random_cochain(rng, band, 0);
    let connecting = datum
        .objects()
        .iter()
        .zip(&image_objects)
        .zip(l.values())
        .map(|((x, hx), v)| TorsorMorphism::new(x.clone(), hx.clone(), v.clone()))
        .collect();
    let tau = random_cocycle(rng, band, 1);
    let images = nerve
        .simplices(1)
        .iter()
        .zip(datum.transitions().iter().zip(tau.values()))
        .map(|(e, (u, t))| {
            TorsorMorphism::new(
                image_objects[e.indices()[0]].clone(),
                image_objects[e.indices()[1]].clone(),
                &u.offset + t,
            )
        })
        .collect();
    AutomorphismDatum {
        image_objects,
        connecting,
        images,
    }
}
