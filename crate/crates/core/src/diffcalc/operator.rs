use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::algebra::{ActionAlgebra, GValuedMap};
use super::DiffError;
use crate::abelian::{is_prime, GroupElement};

/// One summand `coefficient · Δ_ℓ^{(superscript)}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffTerm {
    pub coefficient: BigInt,
    pub superscript: BigInt,
}

/// A universal integer combination of derived differences `Δ_ℓ^{(s)}` with
///
/// `f(x + θy) ≡ f(x) + D f(x; y, …, y)  (mod q)`, `q = p^m`,
///
/// for every map `f` from a set with an action into an abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffOperator {
    p: u64,
    m: u32,
    ell: u64,
    theta: BigInt,
    terms: Vec<DiffTerm>,
}

fn pow(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Exponent of `p` in `j` and the cofactor prime to `p`.
fn split_p_part(mut j: u64, p: u64) -> (u32, u64) {
    let mut e = 0;
    while j.is_multiple_of(p) {
        j /= p;
        e += 1;
    }
    (e, j)
}

/// Largest difference length `build` accepts.
pub const MAX_ELL: u64 = 1 << 16;
/// Largest exponent `m` of `q = p^m` that `build` accepts.
pub const MAX_EXPONENT: u32 = 512;

/// Terms of `D_{p^m, p^{m0}}` keyed by superscript, coefficients in `[0, p^m)`.
/// The recursion only ever changes `m`, so results are cached per `m`.
fn build_terms(p: u64, m: u32, m0: u32, cache: &mut HashMap<u32, BTreeMap<BigInt, BigInt>>) -> BTreeMap<BigInt, BigInt> {
    if let Some(hit) = cache.get(&m) {
        return hit.clone();
    }
    let q = pow(p, m);
    let ell = p.pow(m0);
    let mut terms: BTreeMap<BigInt, BigInt> = BTreeMap::new();
    terms.insert(pow(p, m - 1), BigInt::one());

    let mut binom = BigInt::one(); // C(ell, j), updated incrementally
    for j in 1..ell {
        binom = binom * BigInt::from(ell - j + 1) / BigInt::from(j);
        let (m1, unit) = split_p_part(j, p);
        let inner_exp = m1 as i64 + m as i64 - m0 as i64;
        if inner_exp <= 0 {
            // C(ell, j) is already divisible by q
            continue;
        }
        let inner = build_terms(p, inner_exp as u32, m0, cache);
        let sign = if (ell - j).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let factor = -sign * &binom;
        let unit = BigInt::from(unit);
        for (sup, coeff) in inner {
            *terms.entry(sup * &unit).or_insert_with(BigInt::zero) += &factor * coeff;
        }
    }
    let terms: BTreeMap<BigInt, BigInt> = terms
        .into_iter()
        .map(|(s, c)| (s, c.mod_floor(&q)))
        .filter(|(_, c)| !c.is_zero())
        .collect();
    cache.insert(m, terms.clone());
    terms
}

impl DiffOperator {
    /// Builds `D_{q,ℓ}` for `q = p^m`, with `ℓ = p^{m0}` the smallest power
    /// of `p` with `m0 ≥ 1` and `ℓ ≥ ell0`, and `θ = ℓ · p^{m-1}`.
    pub fn build(p: u64, m: u32, ell0: u64) -> Result<Self, DiffError> {
        if !is_prime(&BigInt::from(p)) {
            return Err(DiffError::NotPrime(p));
        }
        if m < 1 {
            return Err(DiffError::NonPositive("m"));
        }
        if ell0 < 1 {
            return Err(DiffError::NonPositive("l0"));
        }
        if m > MAX_EXPONENT {
            return Err(DiffError::ExponentTooLarge(m));
        }
        let mut m0 = 1u32;
        let mut ell = p;
        while ell < ell0 {
            ell = ell.checked_mul(p).ok_or(DiffError::EllTooLarge(ell0))?;
            m0 += 1;
        }
        if ell > MAX_ELL {
            return Err(DiffError::EllTooLarge(ell0));
        }
        let theta = pow(p, m0 + m - 1);
        let terms = build_terms(p, m, m0, &mut HashMap::new())
            .into_iter()
            .rev()
            .map(|(superscript, coefficient)| DiffTerm { coefficient, superscript })
            .collect();
        Ok(Self { p, m, ell, theta, terms })
    }

    /// Reassembles an operator from stored parts, checking only the structural
    /// header; the congruence itself is what `check_congruence` is for.
    pub fn from_parts(p: u64, m: u32, ell: u64, theta: BigInt, terms: Vec<DiffTerm>) -> Result<Self, DiffError> {
        if !is_prime(&BigInt::from(p)) {
            return Err(DiffError::NotPrime(p));
        }
        if m < 1 {
            return Err(DiffError::NonPositive("m"));
        }
        let (m0, rest) = split_p_part(ell.max(1), p);
        if m0 == 0 || rest != 1 {
            return Err(DiffError::Header(format!("l = {ell} is not a power of {p}")));
        }
        if theta != pow(p, m0 + m - 1) {
            return Err(DiffError::Header(format!(
                "theta = {theta} does not match l * p^(m-1) = {}",
                pow(p, m0 + m - 1)
            )));
        }
        if let Some(t) = terms.iter().find(|t| !t.superscript.is_positive()) {
            return Err(DiffError::Header(format!("superscript {} is not positive", t.superscript)));
        }
        Ok(Self { p, m, ell, theta, terms })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> BigInt {
        pow(self.p, self.m)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn theta(&self) -> &BigInt {
        &self.theta
    }

    pub fn terms(&self) -> &[DiffTerm] {
        &self.terms
    }

    pub fn terms_mut(&mut self) -> &mut Vec<DiffTerm> {
        &mut self.terms
    }

    /// Precomputes the derived actions needed to evaluate the operator on the
    /// diagonal `(x; y, …, y)` of `f`, with every superscript scaled by `base`.
    pub fn evaluator<'a>(&'a self, f: &'a GValuedMap, base: &BigInt) -> Result<DiagonalEvaluator<'a>, DiffError> {
        if !base.is_positive() {
            return Err(DiffError::NonPositive("base superscript"));
        }
        let ell = usize::try_from(self.ell).map_err(|_| DiffError::EllTooLarge(self.ell))?;
        // (-1)^{ℓ-k} C(ℓ,k): grouping the 2^ℓ subsets by size on the diagonal
        let mut weights = Vec::with_capacity(ell + 1);
        let mut binom = BigInt::one();
        for k in 0..=ell {
            if k > 0 {
                binom = binom * BigInt::from(ell - k + 1) / BigInt::from(k);
            }
            let w = if (ell - k) % 2 == 0 { binom.clone() } else { -binom.clone() };
            weights.push(w);
        }
        let derived = self
            .terms
            .iter()
            .map(|t| (t.coefficient.clone(), f.algebra().derive(&(&t.superscript * base))))
            .collect();
        Ok(DiagonalEvaluator { f, derived, weights })
    }

    /// `Σ c · Δ_ℓ^{(s·base)} f(x; y, …, y)`.
    pub fn evaluate(&self, f: &GValuedMap, base: &BigInt, x: usize, y: usize) -> Result<GroupElement, DiffError> {
        self.evaluator(f, base)?.eval(x, y)
    }
}

impl fmt::Display for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|t| {
                if t.coefficient.is_one() {
                    format!("Δ_{}^({})", self.ell, t.superscript)
                } else {
                    format!("{}·Δ_{}^({})", t.coefficient, self.ell, t.superscript)
                }
            })
            .collect();
        let body = if parts.is_empty() { "0".to_string() } else { parts.join(" + ") };
        write!(f, "D_{{{},{}}} = {} (theta = {})", self.q(), self.ell, body, self.theta)
    }
}

/// Evaluates an operator on diagonals of one fixed map.
pub struct DiagonalEvaluator<'a> {
    f: &'a GValuedMap,
    derived: Vec<(BigInt, ActionAlgebra)>,
    weights: Vec<BigInt>,
}

impl DiagonalEvaluator<'_> {
    pub fn eval(&self, x: usize, y: usize) -> Result<GroupElement, DiffError> {
        let alg = self.f.algebra();
        alg.check_s(x)?;
        alg.check_t(y)?;
        let mut acc = self.f.target().zero();
        for (coeff, derived) in &self.derived {
            let mut inner = self.f.target().zero();
            let mut pos = x;
            for (k, w) in self.weights.iter().enumerate() {
                if k > 0 {
                    pos = derived.act(pos, y);
                }
                inner.add_scaled(w, self.f.value(pos))?;
            }
            acc.add_scaled(coeff, &inner)?;
        }
        Ok(acc)
    }
}

/// A point where `f(x + θy) - f(x) - D f(x; y, …, y)` is not divisible by `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceViolation {
    pub x: usize,
    pub y: usize,
    pub residual: GroupElement,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CongruenceReport {
    pub checks: usize,
    pub violations: Vec<CongruenceViolation>,
}

impl CongruenceReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive check of the defining congruence of `op` on `f` over all of `S × T`.
pub fn check_congruence(op: &DiffOperator, f: &GValuedMap) -> Result<CongruenceReport, DiffError> {
    let alg = f.algebra();
    let q = op.q();
    let shifted = alg.derive(op.theta());
    let eval = op.evaluator(f, &BigInt::one())?;
    let mut report = CongruenceReport::default();
    for x in 0..alg.s_size() {
        for y in 0..alg.t_size() {
            let d = eval.eval(x, y)?;
            let residual = f.value(shifted.act(x, y)).sub(f.value(x))?.sub(&d)?;
            report.checks += 1;
            if !f.target().is_multiple(&residual, &q) {
                report.violations.push(CongruenceViolation { x, y, residual });
            }
        }
    }
    Ok(report)
}
