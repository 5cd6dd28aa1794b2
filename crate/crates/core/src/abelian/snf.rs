//! Smith normal form over the integers.
//!
//! Pivoting always selects the nonzero entry of smallest absolute value,
//! scanning row-major, so the transforms are reproducible run to run.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::IntMatrix;

/// `u * a * v == d` with `u`, `v` unimodular and `d` diagonal, non-negative,
/// with each diagonal entry dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
    pub u_inv: IntMatrix,
    pub v_inv: IntMatrix,
}

impl SnfResult {
    /// The `min(rows, cols)` diagonal entries of `d`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        let k = self.d.rows().min(self.d.cols());
        (0..k).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

struct SnfCalc {
    d: IntMatrix,
    u: IntMatrix,
    u_inv: IntMatrix,
    v: IntMatrix,
    v_inv: IntMatrix,
}

impl SnfCalc {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_row_multiple(dst, src, k);
        self.u.add_row_multiple(dst, src, k);
        self.u_inv.add_col_multiple(src, dst, &-k);
    }

    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        self.d.add_col_multiple(dst, src, k);
        self.v.add_col_multiple(dst, src, k);
        self.v_inv.add_row_multiple(src, dst, &-k);
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    fn smallest_in_block(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.d.rows() {
            for j in t..self.d.cols() {
                let e = &self.d[(i, j)];
                if e.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.d[(bi, bj)].abs() <= e.abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        best
    }

    /// Smallest nonzero entry in column `t` below or row `t` right of the pivot.
    fn smallest_in_cross(&self, t: usize) -> Option<(usize, usize)> {
        let cells = (t + 1..self.d.rows())
            .map(|i| (i, t))
            .chain((t + 1..self.d.cols()).map(|j| (t, j)));
        let mut best: Option<(usize, usize)> = None;
        for (i, j) in cells {
            let e = &self.d[(i, j)];
            if e.is_zero() {
                continue;
            }
            match best {
                Some((bi, bj)) if self.d[(bi, bj)].abs() <= e.abs() => {}
                _ => best = Some((i, j)),
            }
        }
        best
    }

    fn first_non_multiple(&self, t: usize) -> Option<usize> {
        let pivot = &self.d[(t, t)];
        for i in t + 1..self.d.rows() {
            for j in t + 1..self.d.cols() {
                if !self.d[(i, j)].is_multiple_of(pivot) {
                    return Some(i);
                }
            }
        }
        None
    }

    fn eliminate(&mut self, t: usize) {
        loop {
            let pivot = self.d[(t, t)].clone();
            for i in t + 1..self.d.rows() {
                if !self.d[(i, t)].is_zero() {
                    let q = self.d[(i, t)].div_floor(&pivot);
                    self.add_row(i, t, &-q);
                }
            }
            for j in t + 1..self.d.cols() {
                if !self.d[(t, j)].is_zero() {
                    let q = self.d[(t, j)].div_floor(&pivot);
                    self.add_col(j, t, &-q);
                }
            }
            if let Some((i, j)) = self.smallest_in_cross(t) {
                // a remainder survived; it is strictly smaller than the pivot
                if i != t {
                    self.swap_rows(t, i);
                } else {
                    self.swap_cols(t, j);
                }
                continue;
            }
            if let Some(i) = self.first_non_multiple(t) {
                let one = BigInt::one();
                self.add_row(t, i, &one);
                continue;
            }
            break;
        }
        if self.d[(t, t)].is_negative() {
            self.negate_row(t);
        }
    }
}

/// Smith normal form of an arbitrary integer matrix.
pub fn snf(a: &IntMatrix) -> SnfResult {
    let (r, c) = (a.rows(), a.cols());
    let mut calc = SnfCalc {
        d: a.clone(),
        u: IntMatrix::identity(r),
        u_inv: IntMatrix::identity(r),
        v: IntMatrix::identity(c),
        v_inv: IntMatrix::identity(c),
    };
    for t in 0..r.min(c) {
        let Some((pi, pj)) = calc.smallest_in_block(t) else {
            break;
        };
        calc.swap_rows(t, pi);
        calc.swap_cols(t, pj);
        calc.eliminate(t);
    }
    SnfResult {
        u: calc.u,
        d: calc.d,
        v: calc.v,
        u_inv: calc.u_inv,
        v_inv: calc.v_inv,
    }
}
