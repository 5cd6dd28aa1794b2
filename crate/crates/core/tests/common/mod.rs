//! Oracles shared by the integration tests. Nothing here calls into the
//! code paths it is used to check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Determinant by Leibniz expansion over all permutations.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = BigInt::zero();
    permute(&mut perm, 0, &mut |p| {
        let inversions = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| p[i] > p[j]).count();
        let mut prod = BigInt::one();
        for (i, &j) in p.iter().enumerate() {
            prod *= &m[i][j];
        }
        if inversions % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    });
    total
}

fn permute(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, f);
        p.swap(k, i);
    }
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

/// `g_k` = gcd of all `k × k` minors, for `k = 0 ..= min(rows, cols)`.
pub fn minor_gcds(a: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let rows = a.len();
    let mut out = vec![BigInt::one()];
    for k in 1..=rows.min(cols) {
        let mut g = BigInt::zero();
        for rs in subsets(rows, k) {
            for cs in subsets(cols, k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&r| cs.iter().map(|&c| a[r][c].clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        out.push(g);
    }
    out
}

/// Invariant factors from the minor ladder: `d_k = g_k / g_{k-1}`, zero once `g_k` vanishes.
pub fn invariant_factors(a: &[Vec<BigInt>], cols: usize) -> Vec<BigInt> {
    let g = minor_gcds(a, cols);
    (1..g.len())
        .map(|k| if g[k].is_zero() { BigInt::zero() } else { &g[k] / &g[k - 1] })
        .collect()
}
