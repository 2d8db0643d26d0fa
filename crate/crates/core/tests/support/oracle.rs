//! Independent oracles: plain `i64` arithmetic, exhaustive enumeration, and
//! determinants. Nothing here calls the crate's lattice code.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use cech::sheaf::AbelianSheaf;
use num_traits::ToPrimitive;

/// (face vertices, coface vertices) to matrix rows.
type RestrictionTable = HashMap<(Vec<usize>, Vec<usize>), Vec<Vec<i64>>>;

/// A sheaf whose groups are all finite products `ℤ/m_1 × … × ℤ/m_k`.
pub struct FiniteSheaf {
    /// Per dimension: (vertex list, moduli).
    pub cells: Vec<Vec<(Vec<usize>, Vec<i64>)>>,
    pub restrictions: RestrictionTable,
}

impl FiniteSheaf {
    /// `None` when some group is not a diagonal presentation of a finite group.
    pub fn from_sheaf(sheaf: &AbelianSheaf) -> Option<Self> {
        let nerve = sheaf.nerve();
        let mut cells = Vec::new();
        let mut restrictions = HashMap::new();
        let top = nerve.dimension().map_or(0, |d| d + 1);
        for p in 0..top {
            let mut layer = Vec::new();
            for s in nerve.simplices(p) {
                let g = sheaf.group(s).ok()?;
                let rels = g.relations();
                let n = g.generator_count();
                let mut moduli = vec![0i64; n];
                for c in 0..rels.cols() {
                    let nz: Vec<usize> = (0..n).filter(|&r| rels.get(r, c).to_i64() != Some(0)).collect();
                    match nz.as_slice() {
                        [] => {}
                        [r] => moduli[*r] = rels.get(*r, c).to_i64()?.abs(),
                        _ => return None,
                    }
                }
                if moduli.contains(&0) {
                    return None;
                }
                layer.push((s.indices().to_vec(), moduli));
                if p > 0 {
                    for k in 0..=p {
                        let mut f = s.indices().to_vec();
                        f.remove(k);
                        let face = cech::nerve::Simplex::new(f.clone()).ok()?;
                        let m = &sheaf.restriction(&face, s).ok()?.matrix;
                        let rows = (0..m.rows())
                            .map(|i| (0..m.cols()).map(|j| m.get(i, j).to_i64().unwrap()).collect())
                            .collect();
                        restrictions.insert((f, s.indices().to_vec()), rows);
                    }
                }
            }
            cells.push(layer);
        }
        Some(FiniteSheaf { cells, restrictions })
    }

    fn layer(&self, p: usize) -> &[(Vec<usize>, Vec<i64>)] {
        self.cells.get(p).map_or(&[], Vec::as_slice)
    }

    /// Moduli of the flattened cochain group in degree `p`.
    fn flat_moduli(&self, p: usize) -> Vec<i64> {
        self.layer(p).iter().flat_map(|(_, m)| m.iter().copied()).collect()
    }

    pub fn cochain_count(&self, p: usize) -> u128 {
        self.flat_moduli(p).iter().map(|&m| m as u128).product()
    }

    /// The alternating coboundary, straight from the definition.
    fn d(&self, p: usize, x: &[i64]) -> Vec<i64> {
        let src = self.layer(p);
        let mut offsets = HashMap::new();
        let mut at = 0;
        for (v, m) in src {
            offsets.insert(v.clone(), at);
            at += m.len();
        }
        let mut out = Vec::new();
        for (s, moduli) in self.layer(p + 1) {
            let mut acc = vec![0i64; moduli.len()];
            for k in 0..s.len() {
                let mut f = s.clone();
                f.remove(k);
                let o = offsets[&f];
                let r = &self.restrictions[&(f.clone(), s.clone())];
                let sign = if k % 2 == 0 { 1 } else { -1 };
                for (i, row) in r.iter().enumerate() {
                    for (j, a) in row.iter().enumerate() {
                        acc[i] += sign * a * x[o + j];
                    }
                }
            }
            for (a, m) in acc.iter_mut().zip(moduli) {
                *a = a.rem_euclid(*m);
            }
            out.extend(acc);
        }
        out
    }
}

fn enumerate(moduli: &[i64]) -> impl Iterator<Item = Vec<i64>> + '_ {
    let total: u128 = moduli.iter().map(|&m| m as u128).product();
    (0..total).map(move |mut n| {
        moduli
            .iter()
            .map(|&m| {
                let v = (n % m as u128) as i64;
                n /= m as u128;
                v
            })
            .collect()
    })
}

/// Brute-force description of a finite `H^p`: its order and, for each
/// `k = 1..=12`, the number of classes killed by `k`.
#[derive(Debug, PartialEq, Eq)]
pub struct FiniteCohomology {
    pub order: u128,
    pub killed_by: Vec<u128>,
}

pub fn brute_cohomology(sheaf: &FiniteSheaf, p: usize) -> FiniteCohomology {
    let moduli = sheaf.flat_moduli(p);
    let reduce = |v: Vec<i64>| -> Vec<i64> { v.iter().zip(&moduli).map(|(a, m)| a.rem_euclid(*m)).collect() };
    // B = subgroup generated by images of generators (closure under addition).
    let mut boundaries: HashSet<Vec<i64>> = HashSet::new();
    boundaries.insert(vec![0; moduli.len()]);
    if p > 0 {
        let prev = sheaf.flat_moduli(p - 1);
        let gens: Vec<Vec<i64>> = (0..prev.len())
            .map(|i| {
                let mut e = vec![0; prev.len()];
                e[i] = 1;
                sheaf.d(p - 1, &e)
            })
            .collect();
        let mut frontier: Vec<Vec<i64>> = vec![vec![0; moduli.len()]];
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = reduce(x.iter().zip(g).map(|(a, b)| a + b).collect());
                if boundaries.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    let cocycles: Vec<Vec<i64>> = enumerate(&moduli).filter(|x| sheaf.d(p, x).iter().all(|&a| a == 0)).collect();
    let b = boundaries.len() as u128;
    let killed_by = (1..=12)
        .map(|k| {
            let n = cocycles
                .iter()
                .filter(|z| boundaries.contains(&reduce(z.iter().map(|a| a * k).collect())))
                .count() as u128;
            n / b
        })
        .collect();
    FiniteCohomology {
        order: cocycles.len() as u128 / b,
        killed_by,
    }
}

/// Order and `k`-torsion counts of `⊕ ℤ/t_i` (no free part).
pub fn finite_profile(torsion: &[i64]) -> FiniteCohomology {
    let gcd = |mut a: i64, mut b: i64| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    FiniteCohomology {
        order: torsion.iter().map(|&t| t as u128).product(),
        killed_by: (1..=12).map(|k| torsion.iter().map(|&t| gcd(k, t) as u128).product()).collect(),
    }
}

/// Exact determinant by cofactor expansion (small matrices only).
pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0] as i128;
    }
    let mut total = 0i128;
    for j in 0..n {
        if m[0][j] == 0 {
            continue;
        }
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, &x)| x).collect())
            .collect();
        let sign = if j % 2 == 0 { 1 } else { -1 };
        total += sign * m[0][j] as i128 * det(&minor);
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

/// Invariant factors `d_k / d_{k−1}`, `d_k` the gcd of the `k × k` minors.
pub fn invariant_factors_by_minors(m: &[Vec<i64>]) -> Vec<i128> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let gcd = |mut a: i128, mut b: i128| {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a.abs()
    };
    let mut out = Vec::new();
    let mut prev = 1i128;
    for k in 1..=rows.min(cols) {
        let mut g = 0i128;
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let minor: Vec<Vec<i64>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                g = gcd(g, det(&minor));
            }
        }
        if g == 0 {
            break;
        }
        out.push(g / prev);
        prev = g;
    }
    out
}
