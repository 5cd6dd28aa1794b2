use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::group::{FgAbGroup, GroupElement, GroupHom};
use super::matrix::IntMatrix;
use super::snf::snf;
use super::AbelianError;

/// Trial-division factorization of `n ≥ 1` into `(prime, exponent)` pairs, ascending.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(n >= &BigInt::one(), "factorize needs a positive integer");
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while n.is_multiple_of(&p) {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if !n.is_one() {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: &BigInt) -> bool {
    n > &BigInt::one() && factorize(n) == vec![(n.clone(), 1)]
}

/// `Some((p, m))` when `q = p^m` with `p` prime and `m ≥ 1`.
pub fn prime_power(q: &BigInt) -> Option<(BigInt, u32)> {
    if q <= &BigInt::one() {
        return None;
    }
    match factorize(q).as_slice() {
        [(p, m)] => Some((p.clone(), *m)),
        _ => None,
    }
}

fn relation_block(h: &GroupHom) -> IntMatrix {
    let t = h.target();
    let m = t.rank();
    let mut neg_t = IntMatrix::zeros(m, m);
    for (i, q) in t.orders().iter().enumerate() {
        neg_t[(i, i)] = -q;
    }
    h.matrix().hstack(&neg_t)
}

/// Kernel of `h` as a normalized group together with its injection into the source.
pub fn kernel(h: &GroupHom) -> (FgAbGroup, GroupHom) {
    let src = h.source();
    let n = src.rank();

    // integer solutions of A x = T y, projected to x
    let block = relation_block(h);
    let res = snf(&block);
    let r = res.rank();
    let spanning: Vec<Vec<BigInt>> = (r..block.cols())
        .map(|j| res.v.column(j)[..n].to_vec())
        .collect();
    let span = IntMatrix::from_columns(&spanning, n);

    // basis b_i = d_i * (u_inv column i) of the lattice spanned above
    let lat = snf(&span);
    let lat_rank = lat.rank();
    let lat_diag = lat.diagonal();
    let basis: Vec<Vec<BigInt>> = (0..lat_rank)
        .map(|i| lat.u_inv.column(i).into_iter().map(|v| v * &lat_diag[i]).collect())
        .collect();

    // relations q_j e_j expressed in that basis
    let mut relations = Vec::new();
    for (j, q) in src.orders().iter().enumerate() {
        if q.is_zero() {
            continue;
        }
        let mut v = vec![BigInt::zero(); n];
        v[j] = q.clone();
        let uv = lat.u.mul_vec(&v).expect("shape");
        let coords: Vec<BigInt> = (0..lat_rank).map(|i| &uv[i] / &lat_diag[i]).collect();
        relations.push(coords);
    }
    let rel = IntMatrix::from_columns(&relations, lat_rank);
    let pres = snf(&rel);
    let pres_diag = pres.diagonal();

    let mut orders = Vec::new();
    let mut columns = Vec::new();
    for i in 0..lat_rank {
        let e = pres_diag.get(i).cloned().unwrap_or_else(BigInt::zero);
        if e.is_one() {
            continue;
        }
        let c = pres.u_inv.column(i);
        let mut gen = vec![BigInt::zero(); n];
        for (k, ck) in c.iter().enumerate() {
            for (g, b) in gen.iter_mut().zip(&basis[k]) {
                *g += ck * b;
            }
        }
        orders.push(e);
        columns.push(src.reduce(gen));
    }
    let kernel_group = FgAbGroup::new(orders).expect("non-negative orders");
    let inj = GroupHom::new(
        kernel_group.clone(),
        src.clone(),
        IntMatrix::from_columns(&columns, n),
    )
    .expect("kernel injection is well defined");
    (kernel_group, inj)
}

/// Some preimage of `target` under `h`, or `None` when `target` is not in the image.
pub fn solve(h: &GroupHom, target: &GroupElement) -> Result<Option<GroupElement>, AbelianError> {
    if target.group() != h.target() {
        return Err(AbelianError::GroupMismatch {
            left: h.target().clone(),
            right: target.group().clone(),
        });
    }
    let n = h.source().rank();
    let block = relation_block(h);
    let res = snf(&block);
    let r = res.rank();
    let diag = res.diagonal();
    let w = res.u.mul_vec(target.coords())?;
    let mut z = vec![BigInt::zero(); block.cols()];
    for (i, wi) in w.iter().enumerate() {
        if i < r {
            let (q, rem) = wi.div_rem(&diag[i]);
            if !rem.is_zero() {
                return Ok(None);
            }
            z[i] = q;
        } else if !wi.is_zero() {
            return Ok(None);
        }
    }
    let full = res.v.mul_vec(&z)?;
    Ok(Some(h.source().element(full[..n].to_vec())?))
}

/// Splits every finite cyclic summand into prime-power pieces (ascending primes).
///
/// Returns the decomposed group and the isomorphisms `G → G'` and `G' → G`.
pub fn primary_decomposition(g: &FgAbGroup) -> (FgAbGroup, GroupHom, GroupHom) {
    let mut orders = Vec::new();
    // (source summand, multiplier realizing the CRT idempotent)
    let mut pieces: Vec<(usize, BigInt)> = Vec::new();
    for (i, q) in g.orders().iter().enumerate() {
        if q.is_zero() {
            orders.push(BigInt::zero());
            pieces.push((i, BigInt::one()));
            continue;
        }
        for (p, e) in factorize(q) {
            let pe = num_traits::pow(p, e as usize);
            let cofactor = q / &pe;
            let inv = mod_inverse(&cofactor, &pe);
            orders.push(pe);
            pieces.push((i, cofactor * inv));
        }
    }
    let decomposed = FgAbGroup::new(orders).expect("prime powers are positive");
    let mut to = IntMatrix::zeros(decomposed.rank(), g.rank());
    let mut from = IntMatrix::zeros(g.rank(), decomposed.rank());
    for (k, (i, idem)) in pieces.iter().enumerate() {
        to[(k, *i)] = BigInt::one();
        from[(*i, k)] = idem.clone();
    }
    let to = GroupHom::new(g.clone(), decomposed.clone(), to).expect("CRT projection");
    let from = GroupHom::new(decomposed.clone(), g.clone(), from).expect("CRT section");
    (decomposed, to, from)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let ext = a.extended_gcd(m);
    assert!(ext.gcd.is_one(), "not invertible");
    ext.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(orders: &[i64]) -> FgAbGroup {
        FgAbGroup::new(orders.iter().copied()).unwrap()
    }

    #[test]
    fn primes_and_prime_powers() {
        assert!(is_prime(&BigInt::from(7)));
        assert!(!is_prime(&BigInt::from(6)));
        assert!(!is_prime(&BigInt::from(1)));
        assert_eq!(prime_power(&BigInt::from(8)), Some((BigInt::from(2), 3)));
        assert_eq!(prime_power(&BigInt::from(9)), Some((BigInt::from(3), 2)));
        assert_eq!(prime_power(&BigInt::from(6)), None);
        assert_eq!(prime_power(&BigInt::from(1)), None);
    }

    #[test]
    fn kernel_of_reduction_z_to_z2() {
        let h = GroupHom::new(g(&[0]), g(&[2]), IntMatrix::from_i64(&[&[1]])).unwrap();
        let (k, inj) = kernel(&h);
        assert_eq!(k, g(&[0]));
        assert_eq!(inj.matrix(), &IntMatrix::from_i64(&[&[2]]));
    }

    #[test]
    fn kernel_of_identity_is_trivial() {
        let h = GroupHom::identity(&g(&[4]));
        let (k, _) = kernel(&h);
        assert!(k.is_trivial());
    }

    #[test]
    fn kernel_of_z8_to_z4() {
        let h = GroupHom::new(g(&[8]), g(&[4]), IntMatrix::from_i64(&[&[1]])).unwrap();
        let (k, inj) = kernel(&h);
        // exhaustive: elements of Z/8 mapping to zero
        let zeros: Vec<_> = g(&[8])
            .elements()
            .unwrap()
            .into_iter()
            .filter(|x| h.apply(x).unwrap().is_zero())
            .collect();
        assert_eq!(zeros.len(), 2);
        assert_eq!(k, g(&[2]));
        assert_eq!(inj.apply(&k.generator(0)).unwrap(), g(&[8]).element_i64(&[4]).unwrap());
    }

    #[test]
    fn solve_examples() {
        let red = GroupHom::new(g(&[0]), g(&[2]), IntMatrix::from_i64(&[&[1]])).unwrap();
        let x = solve(&red, &g(&[2]).element_i64(&[1]).unwrap()).unwrap().unwrap();
        assert_eq!(red.apply(&x).unwrap(), g(&[2]).element_i64(&[1]).unwrap());
        assert!(x.coords()[0].is_odd());

        let dbl = GroupHom::new(g(&[4]), g(&[4]), IntMatrix::from_i64(&[&[2]])).unwrap();
        assert_eq!(solve(&dbl, &g(&[4]).element_i64(&[1]).unwrap()).unwrap(), None);

        let zero = GroupHom::zero(&g(&[3, 0]), &g(&[5]));
        let x = solve(&zero, &g(&[5]).zero()).unwrap().unwrap();
        assert!(x.is_zero());
    }

    #[test]
    fn solve_rejects_foreign_target() {
        let h = GroupHom::identity(&g(&[4]));
        assert!(matches!(
            solve(&h, &g(&[5]).zero()),
            Err(AbelianError::GroupMismatch { .. })
        ));
    }

    #[test]
    fn primary_decomposition_examples() {
        let (d, _, _) = primary_decomposition(&g(&[12]));
        assert_eq!(d, g(&[4, 3]));
        let (d, _, _) = primary_decomposition(&g(&[8]));
        assert_eq!(d, g(&[8]));
        let (d, to, from) = primary_decomposition(&g(&[0, 60]));
        assert_eq!(d, g(&[0, 4, 3, 5]));
        assert_eq!(from.compose(&to).unwrap(), GroupHom::identity(&g(&[0, 60])));
        assert_eq!(to.compose(&from).unwrap(), GroupHom::identity(&d));
    }
}
