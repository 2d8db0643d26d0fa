use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::smith::{hermite_rows, smith_normal_form};
use super::{IntMatrix, LatticeError};

/// Node budget for the exact minimal-norm search over the solution coset.
/// Past it the best solution found so far is returned.
pub const MIN_NORM_SEARCH_BUDGET: usize = 200_000;

/// Proof that `A·x = b` has no integer solution: a multiplier row `u` and a
/// modulus `m` with `u·A ≡ 0 (mod m)` entrywise but `u·b ≢ 0 (mod m)`.
/// A modulus of zero means exact equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerInfeasibility {
    pub multiplier: Vec<BigInt>,
    pub modulus: BigInt,
}

impl IntegerInfeasibility {
    /// Re-checks the certificate against the system it claims to refute.
    pub fn verify(&self, a: &IntMatrix, b: &[BigInt]) -> bool {
        if self.multiplier.len() != a.rows() || b.len() != a.rows() {
            return false;
        }
        let reduces_to_zero = |x: &BigInt| {
            if self.modulus.is_zero() {
                x.is_zero()
            } else {
                x.mod_floor(&self.modulus).is_zero()
            }
        };
        let ua = a.transpose().mul_vec(&self.multiplier).expect("shape checked");
        let ub: BigInt = self.multiplier.iter().zip(b).map(|(u, x)| u * x).sum();
        ua.iter().all(reduces_to_zero) && !reduces_to_zero(&ub)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solvability {
    Solution(Vec<BigInt>),
    Infeasible(IntegerInfeasibility),
}

impl Solvability {
    pub fn solution(self) -> Option<Vec<BigInt>> {
        match self {
            Solvability::Solution(x) => Some(x),
            Solvability::Infeasible(_) => None,
        }
    }
}

/// Integer solution of `A·x = b`, or `None` when there is none.
///
/// Among all solutions the one with minimal ∞-norm is returned, ties broken
/// by the lexicographically smallest coordinate vector.
pub fn solve_linear(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
    Ok(solve_or_certify(a, b)?.solution())
}

/// Like [`solve_linear`], but an unsolvable system comes back with a checkable
/// [`IntegerInfeasibility`] certificate.
pub fn solve_or_certify(a: &IntMatrix, b: &[BigInt]) -> Result<Solvability, LatticeError> {
    let (particular, kernel) = match particular_solution(a, b)? {
        Ok(pair) => pair,
        Err(cert) => return Ok(Solvability::Infeasible(cert)),
    };
    Ok(Solvability::Solution(minimize_in_coset(particular, &kernel)))
}

/// Any solution (the SNF one, not minimized). Cheaper; used for membership tests.
pub(crate) fn solve_any(a: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>, LatticeError> {
    Ok(particular_solution(a, b)?.ok().map(|(x, _)| x))
}

/// Basis of the integer kernel `{x : A·x = 0}` as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    snf.v.submatrix(0..a.cols(), r..a.cols())
}

type Particular = (Vec<BigInt>, IntMatrix);

fn particular_solution(
    a: &IntMatrix,
    b: &[BigInt],
) -> Result<Result<Particular, IntegerInfeasibility>, LatticeError> {
    if b.len() != a.rows() {
        return Err(LatticeError::DimensionMismatch {
            context: "right-hand side of linear system",
            expected: a.rows(),
            found: b.len(),
        });
    }
    let snf = smith_normal_form(a);
    let c = snf.u.mul_vec(b)?;
    let diag = snf.diagonal();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ci) in c.iter().enumerate() {
        let d = diag.get(i).cloned().unwrap_or_default();
        let infeasible = if d.is_zero() {
            !ci.is_zero()
        } else {
            let (q, r) = ci.div_rem(&d);
            y[i] = q;
            !r.is_zero()
        };
        if infeasible {
            return Ok(Err(IntegerInfeasibility {
                multiplier: snf.u.row(i),
                modulus: d,
            }));
        }
    }
    let x = snf.v.mul_vec(&y)?;
    let r = snf.rank();
    let kernel = snf.v.submatrix(0..a.cols(), r..a.cols());
    Ok(Ok((x, kernel)))
}

fn inf_norm(x: &[BigInt]) -> BigInt {
    x.iter().map(Signed::abs).max().unwrap_or_default()
}

/// The `t` with `a - t·b` in `(-b/2, b/2]`, for `b > 0`.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two - b).div_ceil(&(b * &two))
}

fn minimize_in_coset(x0: Vec<BigInt>, kernel: &IntMatrix) -> Vec<BigInt> {
    if kernel.cols() == 0 {
        return x0;
    }
    let basis = hermite_rows(&kernel.transpose());
    let n = x0.len();
    let pivots: Vec<usize> = (0..basis.rows())
        .map(|r| (0..n).find(|&c| !basis.get(r, c).is_zero()).expect("nonzero HNF row"))
        .collect();

    // Canonical coset representative: each pivot coordinate in (-h/2, h/2].
    let mut x = x0;
    for (r, &p) in pivots.iter().enumerate() {
        let h = basis.get(r, p);
        let t = round_div(&x[p], h);
        if !t.is_zero() {
            for (c, xc) in x.iter_mut().enumerate().skip(p) {
                *xc -= &t * basis.get(r, c);
            }
        }
    }

    let mut search = MinSearch {
        basis: &basis,
        pivots: &pivots,
        best_norm: inf_norm(&x),
        best: x.clone(),
        nodes: 0,
    };
    search.descend(0, x);
    search.best
}

struct MinSearch<'a> {
    basis: &'a IntMatrix,
    pivots: &'a [usize],
    best: Vec<BigInt>,
    best_norm: BigInt,
    nodes: usize,
}

impl MinSearch<'_> {
    /// Coordinates `[0, end)` are final once basis rows `< level` are fixed.
    fn settled_end(&self, level: usize) -> usize {
        self.pivots.get(level).copied().unwrap_or(self.best.len())
    }

    /// Compares the settled prefix of `x` with the incumbent; `false` prunes.
    fn admissible(&self, x: &[BigInt], end: usize) -> bool {
        if inf_norm(&x[..end]) > self.best_norm {
            return false;
        }
        if inf_norm(&x[..end]) < self.best_norm {
            return true;
        }
        x[..end].cmp(&self.best[..end]) != Ordering::Greater
    }

    fn descend(&mut self, level: usize, x: Vec<BigInt>) {
        self.nodes += 1;
        if self.nodes > MIN_NORM_SEARCH_BUDGET {
            return;
        }
        let end = self.settled_end(level);
        if !self.admissible(&x, end) {
            return;
        }
        if level == self.pivots.len() {
            let norm = inf_norm(&x);
            if norm < self.best_norm || (norm == self.best_norm && x < self.best) {
                self.best_norm = norm;
                self.best = x;
            }
            return;
        }
        let p = self.pivots[level];
        let h = self.basis.get(level, p).clone();
        // |x[p] + t·h| ≤ best_norm
        let lo = (-&self.best_norm - &x[p]).div_ceil(&h);
        let hi = (&self.best_norm - &x[p]).div_floor(&h);
        let mut t = lo;
        while t <= hi {
            if self.nodes > MIN_NORM_SEARCH_BUDGET {
                return;
            }
            let mut y = x.clone();
            if !t.is_zero() {
                for (c, yc) in y.iter_mut().enumerate().skip(p) {
                    *yc += &t * self.basis.get(level, c);
                }
            }
            if inf_norm(&y[p..=p]) <= self.best_norm {
                self.descend(level + 1, y);
            }
            t += 1;
        }
    }
}
