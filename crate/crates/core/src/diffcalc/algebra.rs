use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::DiffError;
use crate::abelian::{FgAbGroup, GroupElement};

/// Finite sets `S`, `T` with an operation `S × T → S` and a right-sided zero in `T`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionAlgebra {
    s_size: usize,
    t_size: usize,
    table: Vec<usize>,
    zero: usize,
}

impl ActionAlgebra {
    /// `table[x * t_size + y]` is `x + y`.
    pub fn new(s_size: usize, t_size: usize, table: Vec<usize>, zero: usize) -> Result<Self, DiffError> {
        if table.len() != s_size * t_size {
            return Err(DiffError::Table(format!(
                "table has {} entries, expected {}",
                table.len(),
                s_size * t_size
            )));
        }
        if zero >= t_size {
            return Err(DiffError::OutOfRange { what: "zero", index: zero, size: t_size });
        }
        if let Some(&bad) = table.iter().find(|&&v| v >= s_size) {
            return Err(DiffError::OutOfRange { what: "table entry", index: bad, size: s_size });
        }
        let alg = Self { s_size, t_size, table, zero };
        if let Some(x) = (0..s_size).find(|&x| alg.act(x, zero) != x) {
            return Err(DiffError::RightZero { x });
        }
        Ok(alg)
    }

    /// A finite group acting on itself by addition, elements in index order.
    pub fn group_addition(group: &FgAbGroup) -> Result<Self, DiffError> {
        let elems = group.elements()?;
        let n = elems.len();
        let mut table = Vec::with_capacity(n * n);
        for a in &elems {
            for b in &elems {
                let s = a.add(b)?;
                table.push(group.index_of(&s).expect("finite group index"));
            }
        }
        Self::new(n, n, table, 0)
    }

    pub fn s_size(&self) -> usize {
        self.s_size
    }

    pub fn t_size(&self) -> usize {
        self.t_size
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn act(&self, x: usize, y: usize) -> usize {
        self.table[x * self.t_size + y]
    }

    pub(crate) fn check_s(&self, x: usize) -> Result<(), DiffError> {
        if x < self.s_size {
            Ok(())
        } else {
            Err(DiffError::OutOfRange { what: "S element", index: x, size: self.s_size })
        }
    }

    pub(crate) fn check_t(&self, y: usize) -> Result<(), DiffError> {
        if y < self.t_size {
            Ok(())
        } else {
            Err(DiffError::OutOfRange { what: "T element", index: y, size: self.t_size })
        }
    }

    /// `x + y + … + y` with `theta` copies of `y`, bracketed from the left.
    ///
    /// The orbit of `x` under `· + y` is eventually periodic, so this costs
    /// at most `|S|` steps whatever the size of `theta`.
    pub fn act_derived(&self, x: usize, y: usize, theta: &BigInt) -> usize {
        debug_assert!(!theta.is_negative());
        let mut first_seen = vec![usize::MAX; self.s_size];
        let mut path = Vec::with_capacity(self.s_size + 1);
        let mut pos = x;
        loop {
            let step = path.len();
            if BigInt::from(step) == *theta {
                return pos;
            }
            if first_seen[pos] != usize::MAX {
                let start = first_seen[pos];
                let cycle = step - start;
                let offset = (theta - start).mod_floor(&BigInt::from(cycle));
                return path[start + offset.to_usize().unwrap()];
            }
            first_seen[pos] = step;
            path.push(pos);
            pos = self.act(pos, y);
        }
    }

    /// The derived action `x +' y = x + θy`, same zero.
    pub fn derive(&self, theta: &BigInt) -> ActionAlgebra {
        assert!(theta.is_positive(), "derivation parameter must be positive");
        let mut table = vec![0; self.table.len()];
        for y in 0..self.t_size {
            // square-and-multiply the self-map x ↦ x + y
            let mut base: Vec<usize> = (0..self.s_size).map(|x| self.act(x, y)).collect();
            let mut acc: Vec<usize> = (0..self.s_size).collect();
            let mut e = theta.clone();
            while !e.is_zero() {
                if e.is_odd() {
                    acc = acc.iter().map(|&x| base[x]).collect();
                }
                base = base.iter().map(|&x| base[x]).collect();
                e >>= 1;
            }
            for x in 0..self.s_size {
                table[x * self.t_size + y] = acc[x];
            }
        }
        ActionAlgebra {
            s_size: self.s_size,
            t_size: self.t_size,
            table,
            zero: self.zero,
        }
    }
}

/// A map `f: S → G` stored as a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GValuedMap {
    algebra: ActionAlgebra,
    target: FgAbGroup,
    table: Vec<GroupElement>,
}

impl GValuedMap {
    pub fn new(algebra: ActionAlgebra, target: FgAbGroup, table: Vec<GroupElement>) -> Result<Self, DiffError> {
        if table.len() != algebra.s_size() {
            return Err(DiffError::Length {
                what: "map table",
                expected: algebra.s_size(),
                got: table.len(),
            });
        }
        if let Some(bad) = table.iter().find(|v| v.group() != &target) {
            return Err(DiffError::Algebra(crate::abelian::AbelianError::GroupMismatch {
                left: target.clone(),
                right: bad.group().clone(),
            }));
        }
        Ok(Self { algebra, target, table })
    }

    pub fn algebra(&self) -> &ActionAlgebra {
        &self.algebra
    }

    pub fn target(&self) -> &FgAbGroup {
        &self.target
    }

    pub fn table(&self) -> &[GroupElement] {
        &self.table
    }

    #[inline]
    pub fn value(&self, x: usize) -> &GroupElement {
        &self.table[x]
    }

    /// Same values viewed over another algebra on the same `S`.
    pub fn with_algebra(&self, algebra: ActionAlgebra) -> Result<Self, DiffError> {
        Self::new(algebra, self.target.clone(), self.table.clone())
    }
}

/// `Δ_ℓ^{(θ)} f(x; y_1, …, y_ℓ)`, summed over all `2^ℓ` index subsets.
pub fn delta(f: &GValuedMap, ell: usize, theta: &BigInt, x: usize, ys: &[usize]) -> Result<GroupElement, DiffError> {
    if ys.len() != ell {
        return Err(DiffError::Length { what: "difference arguments", expected: ell, got: ys.len() });
    }
    if !theta.is_positive() {
        return Err(DiffError::NonPositive("theta"));
    }
    if ell >= usize::BITS as usize - 1 {
        return Err(DiffError::EllTooLarge(ell as u64));
    }
    let alg = f.algebra();
    alg.check_s(x)?;
    for &y in ys {
        alg.check_t(y)?;
    }
    let mut acc = f.target().zero();
    let one = BigInt::one();
    let minus_one = -BigInt::one();
    for mask in 0usize..(1 << ell) {
        let mut pos = x;
        for (i, &y) in ys.iter().enumerate() {
            if mask >> i & 1 == 1 {
                pos = alg.act_derived(pos, y, theta);
            }
        }
        let k = mask.count_ones() as usize;
        let sign = if (ell - k).is_multiple_of(2) { &one } else { &minus_one };
        acc.add_scaled(sign, f.value(pos))?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn z4_addition() -> ActionAlgebra {
        ActionAlgebra::group_addition(&FgAbGroup::cyclic(4)).unwrap()
    }

    #[test]
    fn rejects_missing_right_zero() {
        // 2 × 2 table with x + 0 = 0 for x = 1
        let err = ActionAlgebra::new(2, 2, vec![0, 1, 0, 0], 0).unwrap_err();
        assert_eq!(err, DiffError::RightZero { x: 1 });
    }

    #[test]
    fn derive_by_one_is_identity() {
        let a = z4_addition();
        assert_eq!(a.derive(&BigInt::one()), a);
    }

    #[test]
    fn derive_doubles_on_z4() {
        let d = z4_addition().derive(&BigInt::from(2));
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(d.act(x, y), (x + 2 * y) % 4);
            }
        }
    }

    #[test]
    fn act_derived_matches_iteration() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = sample::random_algebra(&mut rng, 6, 6);
            for theta in 1..40u32 {
                for x in 0..a.s_size() {
                    for y in 0..a.t_size() {
                        let mut pos = x;
                        for _ in 0..theta {
                            pos = a.act(pos, y);
                        }
                        assert_eq!(a.act_derived(x, y, &BigInt::from(theta)), pos);
                        assert_eq!(a.derive(&BigInt::from(theta)).act(x, y), pos);
                    }
                }
            }
        }
    }

    #[test]
    fn derivation_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let a = sample::random_algebra(&mut rng, 6, 6);
            for (s, t) in [(2u32, 3u32), (4, 5), (7, 1), (6, 6)] {
                let lhs = a.derive(&BigInt::from(s)).derive(&BigInt::from(t));
                assert_eq!(lhs, a.derive(&BigInt::from(s * t)));
            }
        }
    }

    #[test]
    fn delta_small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = FgAbGroup::cyclic(7);
        let one = BigInt::one();
        for _ in 0..20 {
            let a = sample::random_algebra_sized(&mut rng, 4, 4);
            let f = sample::random_map(&mut rng, &a, &g);
            for x in 0..4 {
                for y1 in 0..4 {
                    let d1 = delta(&f, 1, &one, x, &[y1]).unwrap();
                    let direct = f.value(a.act(x, y1)).sub(f.value(x)).unwrap();
                    assert_eq!(d1, direct);
                    for y2 in 0..4 {
                        let d2 = delta(&f, 2, &one, x, &[y1, y2]).unwrap();
                        let direct = f
                            .value(a.act(a.act(x, y1), y2))
                            .sub(f.value(a.act(x, y1)))
                            .unwrap()
                            .sub(f.value(a.act(x, y2)))
                            .unwrap()
                            .add(f.value(x))
                            .unwrap();
                        assert_eq!(d2, direct);
                    }
                }
            }
        }
    }

    #[test]
    fn delta_vanishes_on_zero_argument() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let g = FgAbGroup::new([4, 6]).unwrap();
        for _ in 0..20 {
            let a = sample::random_algebra(&mut rng, 6, 6);
            let f = sample::random_map(&mut rng, &a, &g);
            for theta in [1u32, 2, 5] {
                for x in 0..a.s_size() {
                    let ys = [a.t_size() - 1, a.zero(), rng.gen_range(0..a.t_size())];
                    let d = delta(&f, 3, &BigInt::from(theta), x, &ys).unwrap();
                    assert!(d.is_zero());
                }
            }
        }
    }

    #[test]
    fn delta_argument_errors() {
        let a = z4_addition();
        let g = FgAbGroup::cyclic(4);
        let f = GValuedMap::new(a, g.clone(), g.elements().unwrap()).unwrap();
        let one = BigInt::one();
        assert!(matches!(delta(&f, 2, &one, 0, &[1]), Err(DiffError::Length { .. })));
        assert!(matches!(delta(&f, 1, &one, 9, &[1]), Err(DiffError::OutOfRange { .. })));
        assert!(matches!(delta(&f, 1, &one, 0, &[9]), Err(DiffError::OutOfRange { .. })));
    }
}
