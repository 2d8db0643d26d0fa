use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// Smith normal form `U·A·V = S` of an integer matrix, together with `U⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfDecomposition {
    /// Diagonal, `d_1 | d_2 | … | d_r`, all non-negative, followed by zeros.
    pub s: IntMatrix,
    /// Left unimodular factor.
    pub u: IntMatrix,
    /// Right unimodular factor.
    pub v: IntMatrix,
    /// Inverse of `u`, kept because cokernel sections need it.
    pub u_inv: IntMatrix,
}

impl SnfDecomposition {
    /// Diagonal entries `S[i][i]` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .collect()
    }

    /// Number of nonzero invariant factors.
    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct Reducer {
    a: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
}

impl Reducer {
    fn swap_rows(&mut self, i: usize, j: usize) {
        self.a.swap_rows(i, j);
        self.u.swap_rows(i, j);
        self.u_inv.swap_cols(i, j);
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        self.a.swap_cols(i, j);
        self.v.swap_cols(i, j);
    }

    /// row dst += k row src, mirrored on U and U⁻¹.
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.a.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Smallest nonzero |entry| in the trailing submatrix; ties go to the lowest (row, col).
    fn find_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..self.a.rows() {
            for j in t..self.a.cols() {
                let x = self.a.get(i, j);
                if x.is_zero() {
                    continue;
                }
                let ax = x.abs();
                if best.as_ref().is_none_or(|(_, _, b)| ax < *b) {
                    best = Some((i, j, ax));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form by elementary unimodular operations.
///
/// The pivot is always the smallest nonzero entry (by absolute value) of the
/// remaining submatrix, ties broken by lowest `(row, col)`. The pivot column
/// is cleared before the pivot row. Signs are normalized at the end, so the
/// output is a deterministic function of the input.
pub fn smith_normal_form(a: &IntMatrix) -> SnfDecomposition {
    let (m, n) = (a.rows(), a.cols());
    let mut r = Reducer {
        a: a.clone(),
        u: IntMatrix::identity(m),
        u_inv: IntMatrix::identity(m),
        v: IntMatrix::identity(n),
    };

    let mut t = 0;
    'stages: while t < m.min(n) {
        loop {
            let Some((pi, pj)) = r.find_pivot(t) else {
                break 'stages;
            };
            r.swap_rows(t, pi);
            r.swap_cols(t, pj);
            let pivot = r.a.get(t, t).clone();

            let mut dirty = false;
            for i in t + 1..m {
                let x = r.a.get(i, t);
                if x.is_zero() {
                    continue;
                }
                let q = x / &pivot;
                r.add_row(i, t, &-q);
                dirty |= !r.a.get(i, t).is_zero();
            }
            for j in t + 1..n {
                let x = r.a.get(t, j);
                if x.is_zero() {
                    continue;
                }
                let q = x / &pivot;
                r.add_col(j, t, &-q);
                dirty |= !r.a.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }

            // Row t and column t are clear; enforce d_t | every remaining entry.
            let offender = (t + 1..m).find_map(|i| {
                (t + 1..n)
                    .find(|&j| !(r.a.get(i, j) % &pivot).is_zero())
                    .map(|_| i)
            });
            match offender {
                Some(i) => r.add_row(t, i, &BigInt::from(1)),
                None => break,
            }
        }
        t += 1;
    }

    for i in 0..m.min(n) {
        if r.a.get(i, i).is_negative() {
            r.negate_row(i);
        }
    }

    SnfDecomposition {
        s: r.a,
        u: r.u,
        v: r.v,
        u_inv: r.u_inv,
    }
}

/// Row-style Hermite normal form: the nonzero rows of an echelon basis of the
/// row lattice, with positive pivots and entries above each pivot reduced into
/// `[0, pivot)`. Unique for a given lattice.
pub fn hermite_rows(a: &IntMatrix) -> IntMatrix {
    let mut m = a.clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut pivot_row = 0;
    for c in 0..cols {
        if pivot_row == rows {
            break;
        }
        // gcd-combine every row below into pivot_row at column c
        loop {
            let nz: Vec<usize> = (pivot_row..rows).filter(|&i| !m.get(i, c).is_zero()).collect();
            if nz.is_empty() {
                break;
            }
            let &best = nz
                .iter()
                .min_by(|&&x, &&y| m.get(x, c).abs().cmp(&m.get(y, c).abs()).then(x.cmp(&y)))
                .unwrap();
            m.swap_rows(pivot_row, best);
            let p = m.get(pivot_row, c).clone();
            let mut done = true;
            for i in pivot_row + 1..rows {
                let x = m.get(i, c).clone();
                if x.is_zero() {
                    continue;
                }
                let q = &x / &p;
                m.add_row_multiple(i, pivot_row, &-q);
                done &= m.get(i, c).is_zero();
            }
            if done {
                break;
            }
        }
        if m.get(pivot_row, c).is_zero() {
            continue;
        }
        if m.get(pivot_row, c).is_negative() {
            m.negate_row(pivot_row);
        }
        let p = m.get(pivot_row, c).clone();
        for i in 0..pivot_row {
            let x = m.get(i, c).clone();
            let q = num_integer::Integer::div_floor(&x, &p);
            m.add_row_multiple(i, pivot_row, &-q);
        }
        pivot_row += 1;
    }
    m.submatrix(0..pivot_row, 0..cols)
}
