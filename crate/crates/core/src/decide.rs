//! Decision procedure over explicit homotopy bookkeeping data.
//!
//! An instance records the groups `[X, P_{2d}]` and `[A, P_{2d}]` (here `GX`,
//! `GA`), the restriction `R': GX → GA`, finitely many lift classes over each
//! side with their projections `Π_X`, `Π_A`, the restriction `R` between
//! lift classes, and the `Θ`-actions of `GX`, `GA` on the lift classes given
//! per standard generator. An extension of `f` exists iff some class over a
//! representative in `H_0` restricts to `f`, where `H = R'^{-1}(f')` and
//! `H = H_0 + Θ·ker R'`.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::abelian::{kernel, solve, AbelianError, FgAbGroup, GroupElement, GroupHom, IntMatrix};
use crate::sample;

/// Largest representative set or lift-class count handled.
pub const MAX_CLASSES: usize = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("brute force needs a finite [X, P] group, got {0}")]
    InfiniteSource(FgAbGroup),
    #[error("too large: {0}")]
    TooLarge(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// Θ-action of a group on finitely many classes, one partial permutation per
/// standard generator. Entries may be `None` only for free generators, where
/// the orbit leaves the modeled classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassAction {
    pub by_generator: Vec<Vec<Option<usize>>>,
}

impl ClassAction {
    fn inverse(&self, j: usize) -> Vec<Option<usize>> {
        let table = &self.by_generator[j];
        let mut inv = vec![None; table.len()];
        for (src, dst) in table.iter().enumerate() {
            if let Some(d) = *dst {
                inv[d] = Some(src);
            }
        }
        inv
    }

    /// `g` acted on by `Θ·k`, extending the generator tables additively.
    pub fn act(&self, group: &FgAbGroup, g: usize, k: &GroupElement) -> Option<usize> {
        let mut cur = g;
        for (j, c) in k.coords().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let steps = c.magnitude().to_usize()?;
            let table = if c.is_negative() {
                std::borrow::Cow::Owned(self.inverse(j))
            } else {
                std::borrow::Cow::Borrowed(&self.by_generator[j])
            };
            // finite generators need at most q_j steps
            let steps = match group.orders()[j].to_usize() {
                Some(q) if q > 0 => steps % q,
                _ => steps,
            };
            for _ in 0..steps {
                cur = table.get(cur).copied().flatten()?;
            }
        }
        Some(cur)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionInstance {
    pub gx: FgAbGroup,
    pub ga: FgAbGroup,
    pub r_prime: GroupHom,
    pub f_prime: GroupElement,
    pub theta: BigInt,
    /// `Π_X` of each lift class of `X`, indexed by class id.
    pub pi_x: Vec<GroupElement>,
    /// `Π_A` of each lift class of `A`.
    pub pi_a: Vec<GroupElement>,
    /// Restriction `R` from classes of `X` to classes of `A`.
    pub r_map: Vec<usize>,
    pub f: usize,
    pub act_x: ClassAction,
    pub act_a: ClassAction,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    pub witness: Option<usize>,
    pub h0: Option<GroupElement>,
    pub h0_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InstanceViolation {
    Shape(String),
    FPrime,
    Square { g: usize },
    Undefined { side: char, generator: usize, class: usize },
    NotInjective { side: char, generator: usize },
    Order { side: char, generator: usize, class: usize },
    Commute { side: char, generators: (usize, usize), class: usize },
    Shift { side: char, generator: usize, class: usize },
    Naturality { generator: usize, class: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceReport {
    pub checks: usize,
    pub violations: Vec<InstanceViolation>,
}

impl InstanceReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, v: impl FnOnce() -> InstanceViolation) {
        self.checks += 1;
        if !ok {
            self.violations.push(v());
        }
    }
}

fn shape_problems(inst: &ExtensionInstance) -> Vec<String> {
    let mut out = Vec::new();
    if !inst.theta.is_positive() {
        out.push(format!("theta = {} must be positive", inst.theta));
    }
    if inst.r_prime.source() != &inst.gx || inst.r_prime.target() != &inst.ga {
        out.push("R' must map GX to GA".into());
    }
    if inst.f_prime.group() != &inst.ga {
        out.push("f' must lie in GA".into());
    }
    if inst.pi_x.iter().any(|e| e.group() != &inst.gx) {
        out.push("Pi_X values must lie in GX".into());
    }
    if inst.pi_a.iter().any(|e| e.group() != &inst.ga) {
        out.push("Pi_A values must lie in GA".into());
    }
    if inst.r_map.len() != inst.pi_x.len() {
        out.push(format!("R has {} entries for {} classes of X", inst.r_map.len(), inst.pi_x.len()));
    }
    if let Some(bad) = inst.r_map.iter().find(|&&a| a >= inst.pi_a.len()) {
        out.push(format!("R maps to unknown class {bad}"));
    }
    if inst.f >= inst.pi_a.len() {
        out.push(format!("f = {} is not a class of A", inst.f));
    }
    for (side, act, group, n) in [
        ('X', &inst.act_x, &inst.gx, inst.pi_x.len()),
        ('A', &inst.act_a, &inst.ga, inst.pi_a.len()),
    ] {
        if act.by_generator.len() != group.rank() {
            out.push(format!(
                "act_{side} has {} generator tables for rank {}",
                act.by_generator.len(),
                group.rank()
            ));
            continue;
        }
        for (j, table) in act.by_generator.iter().enumerate() {
            if table.len() != n {
                out.push(format!("act_{side} generator {j} has {} entries, expected {n}", table.len()));
            }
            if table.iter().flatten().any(|&d| d >= n) {
                out.push(format!("act_{side} generator {j} refers to an unknown class"));
            }
        }
    }
    out
}

fn validate_action(
    report: &mut InstanceReport,
    side: char,
    act: &ClassAction,
    group: &FgAbGroup,
    pi: &[GroupElement],
    theta: &BigInt,
) {
    let n = pi.len();
    for (j, table) in act.by_generator.iter().enumerate() {
        let order = &group.orders()[j];
        let shift = group.generator(j).scalar_mul(theta);
        let mut seen = HashSet::new();
        let injective = table.iter().flatten().all(|d| seen.insert(*d));
        report.check(injective, || InstanceViolation::NotInjective { side, generator: j });
        for (g, dst) in table.iter().enumerate() {
            match dst {
                None => report.check(order.is_zero(), || InstanceViolation::Undefined {
                    side,
                    generator: j,
                    class: g,
                }),
                Some(d) => report.check(pi[*d] == pi[g].add(&shift).unwrap(), || InstanceViolation::Shift {
                    side,
                    generator: j,
                    class: g,
                }),
            }
        }
        if let Some(q) = order.to_usize().filter(|&q| q > 0) {
            for g in 0..n {
                let mut cur = Some(g);
                for _ in 0..q {
                    cur = cur.and_then(|c| table[c]);
                }
                report.check(cur == Some(g), || InstanceViolation::Order { side, generator: j, class: g });
            }
        }
    }
    let tables = &act.by_generator;
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            for g in 0..n {
                let ij = tables[i][g].and_then(|h| tables[j][h]);
                let ji = tables[j][g].and_then(|h| tables[i][h]);
                if let (Some(a), Some(b)) = (ij, ji) {
                    report.check(a == b, || InstanceViolation::Commute { side, generators: (i, j), class: g });
                }
            }
        }
    }
}

/// Exhaustive check of every structural axiom the decision procedure relies on.
pub fn validate_instance(inst: &ExtensionInstance) -> InstanceReport {
    let mut report = InstanceReport::default();
    let problems = shape_problems(inst);
    if !problems.is_empty() {
        report.checks += 1;
        report.violations.extend(problems.into_iter().map(InstanceViolation::Shape));
        return report;
    }
    report.check(inst.pi_a[inst.f] == inst.f_prime, || InstanceViolation::FPrime);
    for (g, pi) in inst.pi_x.iter().enumerate() {
        let down = inst.r_prime.apply(pi).expect("shapes checked");
        report.check(inst.pi_a[inst.r_map[g]] == down, || InstanceViolation::Square { g });
    }
    validate_action(&mut report, 'X', &inst.act_x, &inst.gx, &inst.pi_x, &inst.theta);
    validate_action(&mut report, 'A', &inst.act_a, &inst.ga, &inst.pi_a, &inst.theta);
    for j in 0..inst.gx.rank() {
        let image = inst.r_prime.apply(&inst.gx.generator(j)).unwrap();
        for g in 0..inst.pi_x.len() {
            if let Some(moved) = inst.act_x.by_generator[j][g] {
                let expected = inst.act_a.act(&inst.ga, inst.r_map[g], &image);
                if let Some(e) = expected {
                    report.check(inst.r_map[moved] == e, || InstanceViolation::Naturality { generator: j, class: g });
                }
            }
        }
    }
    report
}

/// `H_0` data: a base solution and coset representatives with `H = reps + Θ·ker R'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H0 {
    pub h0: GroupElement,
    pub kernel: FgAbGroup,
    pub injection: GroupHom,
    pub reps: Vec<GroupElement>,
}

/// `None` when `f'` is not in the image of `R'`.
pub fn compute_h0(inst: &ExtensionInstance) -> Result<Option<H0>, DecideError> {
    let Some(h0) = solve(&inst.r_prime, &inst.f_prime)? else {
        return Ok(None);
    };
    let (kernel, injection) = kernel(&inst.r_prime);
    let half = inst.theta.div_floor(&BigInt::from(2));
    let ranges: Vec<(BigInt, BigInt)> = kernel
        .orders()
        .iter()
        .map(|q| {
            let lo = -half.clone();
            let hi = if q.is_zero() { half.clone() } else { (&lo + q - BigInt::one()).min(half.clone()) };
            (lo, hi)
        })
        .collect();
    let count = ranges
        .iter()
        .try_fold(BigInt::one(), |acc, (lo, hi)| Some(acc * (hi - lo + 1)))
        .and_then(|c| c.to_usize())
        .filter(|&c| c <= MAX_CLASSES)
        .ok_or_else(|| DecideError::TooLarge("H_0 representative count".into()))?;

    let gens: Vec<GroupElement> = (0..kernel.rank())
        .map(|i| injection.apply(&kernel.generator(i)))
        .collect::<Result<_, _>>()?;
    let mut z: Vec<BigInt> = ranges.iter().map(|(lo, _)| lo.clone()).collect();
    let mut seen = HashSet::new();
    let mut reps = Vec::new();
    for _ in 0..count {
        let mut rep = h0.clone();
        for (zi, gen) in z.iter().zip(&gens) {
            rep.add_scaled(zi, gen)?;
        }
        if seen.insert(rep.coords().to_vec()) {
            reps.push(rep);
        }
        for (i, zi) in z.iter_mut().enumerate().rev() {
            *zi += 1;
            if *zi <= ranges[i].1 {
                break;
            }
            *zi = ranges[i].0.clone();
        }
    }
    Ok(Some(H0 { h0, kernel, injection, reps }))
}

fn quick_checks(inst: &ExtensionInstance) -> Result<(), DecideError> {
    if let Some(p) = shape_problems(inst).into_iter().next() {
        return Err(DecideError::Invalid(p));
    }
    if inst.pi_a[inst.f] != inst.f_prime {
        return Err(DecideError::Invalid("Pi_A(f) differs from f'".into()));
    }
    Ok(())
}

/// Scans lift classes over each `H_0` representative for one restricting to `f`.
pub fn decide(inst: &ExtensionInstance) -> Result<Verdict, DecideError> {
    quick_checks(inst)?;
    let Some(h) = compute_h0(inst)? else {
        return Ok(Verdict { answer: Answer::No, witness: None, h0: None, h0_size: 0 });
    };
    let mut fibers: HashMap<&[BigInt], Vec<usize>> = HashMap::new();
    for (g, pi) in inst.pi_x.iter().enumerate() {
        fibers.entry(pi.coords()).or_default().push(g);
    }
    let witness = h.reps.iter().find_map(|rep| {
        fibers
            .get(rep.coords())
            .and_then(|ids| ids.iter().copied().find(|&g| inst.r_map[g] == inst.f))
    });
    Ok(Verdict {
        answer: if witness.is_some() { Answer::Yes } else { Answer::No },
        witness,
        h0: Some(h.h0),
        h0_size: h.reps.len(),
    })
}

/// Independent oracle: any class of `X` at all that restricts to `f`.
pub fn brute_force(inst: &ExtensionInstance) -> Result<Verdict, DecideError> {
    quick_checks(inst)?;
    if !inst.gx.is_finite() {
        return Err(DecideError::InfiniteSource(inst.gx.clone()));
    }
    let witness = (0..inst.r_map.len()).find(|&g| inst.r_map[g] == inst.f);
    Ok(Verdict {
        answer: if witness.is_some() { Answer::Yes } else { Answer::No },
        witness,
        h0: None,
        h0_size: 0,
    })
}

/// Parameters for [`generate_instance`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub theta: u64,
    /// Maximum number of finite summands of `GX` and `GA`.
    pub max_rank: usize,
    /// Orders the finite summands are drawn from.
    pub summands: Vec<u64>,
    /// Number of free summands in `GX`.
    pub free_rank: usize,
    /// Free coordinates of modeled classes range over `[-radius, radius]`.
    pub radius: u64,
    /// Steer towards a YES (`Some(true)`) or NO (`Some(false)`) answer.
    pub hint: Option<bool>,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            theta: 4,
            max_rank: 2,
            summands: vec![2, 3, 4, 8],
            free_rank: 0,
            radius: 3,
            hint: None,
        }
    }
}

fn random_hom<R: Rng>(rng: &mut R, src: &FgAbGroup, dst: &FgAbGroup) -> GroupHom {
    let mut m = IntMatrix::zeros(dst.rank(), src.rank());
    for (i, t) in dst.orders().iter().enumerate() {
        let t = t.to_u64().expect("finite target");
        for (j, q) in src.orders().iter().enumerate() {
            let q = q.to_u64().unwrap();
            // entries must kill q_j in Z/t_i
            let step = if q == 0 { 1 } else { t / t.gcd(&q) };
            m[(i, j)] = BigInt::from(rng.gen_range(0..t / step) * step);
        }
    }
    GroupHom::new(src.clone(), dst.clone(), m).expect("entries chosen well defined")
}

fn odometer(radii: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for &(lo, hi) in radii {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Builds a valid instance in the split model: classes of `X` are pairs
/// `(h, u) ∈ GX × FX`, classes of `A` are pairs `(a, v) ∈ GA × FA` with the
/// exponent of `FA` dividing `Θ`, and `R(h, u) = (R'h, ρu + ηh)`.
pub fn generate_instance(params: &GenParams, seed: u64) -> Result<ExtensionInstance, DecideError> {
    if params.theta == 0 || params.theta > 1 << 16 {
        return Err(DecideError::TooLarge(format!("theta must lie in 1..=65536, got {}", params.theta)));
    }
    if params.summands.is_empty() || params.summands.iter().any(|&q| !(2..=64).contains(&q)) {
        return Err(DecideError::TooLarge("summand orders must lie in 2..=64".into()));
    }
    if params.max_rank > 4 || params.free_rank > 2 || params.radius > 16 {
        return Err(DecideError::TooLarge("max_rank <= 4, free_rank <= 2, radius <= 16".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let theta = params.theta;

    let finite_rank = rng.gen_range(usize::from(params.free_rank == 0).min(params.max_rank)..=params.max_rank);
    let mut gx_orders: Vec<u64> = vec![0; params.free_rank];
    gx_orders.extend((0..finite_rank).map(|_| *params.summands.choose(&mut rng).unwrap()));
    let gx = FgAbGroup::new(gx_orders.iter().copied()).unwrap();
    let ga = sample::random_group(&mut rng, &params.summands, params.max_rank);
    let divisors: Vec<u64> = (2..=theta).filter(|d| theta.is_multiple_of(*d) && *d <= 16).collect();
    let fa = if divisors.is_empty() {
        FgAbGroup::trivial()
    } else {
        sample::random_group(&mut rng, &divisors, 2)
    };
    let fx = sample::random_group(&mut rng, &params.summands, 1);

    let r_prime = random_hom(&mut rng, &gx, &ga);
    let rho = random_hom(&mut rng, &fx, &fa);
    let eta = random_hom(&mut rng, &gx, &fa);

    let radius = params.radius as i64;
    let box_ranges: Vec<(i64, i64)> = gx
        .orders()
        .iter()
        .map(|q| {
            let q = q.to_i64().unwrap();
            if q == 0 { (-radius, radius) } else { (0, q - 1) }
        })
        .collect();
    let hs: Vec<GroupElement> = odometer(&box_ranges)
        .into_iter()
        .map(|c| gx.element_i64(&c).unwrap())
        .collect();
    let us = fx.elements()?;
    let n_x = hs.len() * us.len();
    let n_a = ga.enumerable_size().unwrap() * fa.enumerable_size().unwrap();
    if n_x > MAX_CLASSES / 4 || n_a > MAX_CLASSES / 4 {
        return Err(DecideError::TooLarge(format!("{n_x} classes over X, {n_a} over A")));
    }
    let h_index: HashMap<Vec<BigInt>, usize> =
        hs.iter().enumerate().map(|(i, h)| (h.coords().to_vec(), i)).collect();
    let fa_size = fa.enumerable_size().unwrap();
    let a_id = |a: &GroupElement, v: &GroupElement| ga.index_of(a).unwrap() * fa_size + fa.index_of(v).unwrap();

    let mut pi_x = Vec::with_capacity(n_x);
    let mut r_map = Vec::with_capacity(n_x);
    for h in &hs {
        let rh = r_prime.apply(h)?;
        let eh = eta.apply(h)?;
        for u in &us {
            pi_x.push(h.clone());
            r_map.push(a_id(&rh, &rho.apply(u)?.add(&eh)?));
        }
    }
    let mut pi_a = Vec::with_capacity(n_a);
    for a in ga.elements()? {
        for _ in 0..fa_size {
            pi_a.push(a.clone());
        }
    }
    let theta_big = BigInt::from(theta);
    let act_x = ClassAction {
        by_generator: (0..gx.rank())
            .map(|j| {
                let shift = gx.generator(j).scalar_mul(&theta_big);
                (0..n_x)
                    .map(|g| {
                        let (hi, ui) = (g / us.len(), g % us.len());
                        let moved = hs[hi].add(&shift).unwrap();
                        h_index.get(moved.coords()).map(|&h2| h2 * us.len() + ui)
                    })
                    .collect()
            })
            .collect(),
    };
    let act_a = ClassAction {
        by_generator: (0..ga.rank())
            .map(|j| {
                let shift = ga.generator(j).scalar_mul(&theta_big);
                (0..n_a)
                    .map(|id| {
                        let (ai, vi) = (id / fa_size, id % fa_size);
                        let moved = ga.element_at(ai).add(&shift).unwrap();
                        Some(ga.index_of(&moved).unwrap() * fa_size + vi)
                    })
                    .collect()
            })
            .collect(),
    };

    let reachable: HashSet<usize> = r_map.iter().copied().collect();
    let f = match params.hint {
        Some(true) if !r_map.is_empty() => r_map[rng.gen_range(0..n_x)],
        Some(false) => {
            let mut pick = rng.gen_range(0..n_a);
            for _ in 0..64 {
                if !reachable.contains(&pick) {
                    break;
                }
                pick = rng.gen_range(0..n_a);
            }
            pick
        }
        _ => rng.gen_range(0..n_a),
    };
    let f_prime = pi_a[f].clone();
    Ok(ExtensionInstance {
        gx,
        ga,
        r_prime,
        f_prime,
        theta: theta_big,
        pi_x,
        pi_a,
        r_map,
        f,
        act_x,
        act_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(theta: u64, hint: Option<bool>) -> GenParams {
        GenParams { theta, hint, ..GenParams::default() }
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..200 {
            let theta = 2 + seed % 15;
            let inst = generate_instance(&params(theta, None), seed).unwrap();
            let report = validate_instance(&inst);
            assert!(report.is_clean(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn infinite_instances_validate() {
        for seed in 0..40 {
            let p = GenParams { free_rank: 1, theta: 2 + seed % 7, ..GenParams::default() };
            let inst = generate_instance(&p, seed).unwrap();
            assert!(!inst.gx.is_finite());
            assert!(validate_instance(&inst).is_clean());
            assert!(matches!(brute_force(&inst), Err(DecideError::InfiniteSource(_))));
            let v = decide(&inst).unwrap();
            if let Some(w) = v.witness {
                assert_eq!(inst.r_map[w], inst.f);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = params(6, Some(true));
        assert_eq!(generate_instance(&p, 7).unwrap(), generate_instance(&p, 7).unwrap());
    }

    #[test]
    fn decide_matches_oracle() {
        let mut yes = 0;
        for seed in 0..150 {
            let hint = Some(seed % 2 == 0);
            let inst = generate_instance(&params(2 + seed % 15, hint), seed).unwrap();
            let v = decide(&inst).unwrap();
            let b = brute_force(&inst).unwrap();
            assert_eq!(v.answer, b.answer, "seed {seed}");
            if let Some(w) = v.witness {
                assert_eq!(inst.r_map[w], inst.f);
                yes += 1;
            }
        }
        assert!(yes > 20 && yes < 130, "unbalanced suite: {yes} YES");
    }

    #[test]
    fn outside_image_is_no() {
        // GX trivial, GA = Z/2, f' = 1
        let gx = FgAbGroup::trivial();
        let ga = FgAbGroup::cyclic(2);
        let inst = ExtensionInstance {
            r_prime: GroupHom::zero(&gx, &ga),
            f_prime: ga.element_i64(&[1]).unwrap(),
            theta: BigInt::from(2),
            pi_x: vec![gx.zero()],
            pi_a: vec![ga.zero(), ga.element_i64(&[1]).unwrap()],
            r_map: vec![0],
            f: 1,
            act_x: ClassAction { by_generator: vec![] },
            act_a: ClassAction { by_generator: vec![vec![Some(0), Some(1)]] },
            gx,
            ga,
        };
        assert!(validate_instance(&inst).is_clean());
        let v = decide(&inst).unwrap();
        assert_eq!((v.answer, v.h0_size), (Answer::No, 0));
        assert_eq!(brute_force(&inst).unwrap().answer, Answer::No);
    }

    #[test]
    fn direct_hit_over_h0() {
        let inst = generate_instance(&params(4, Some(true)), 3).unwrap();
        let v = decide(&inst).unwrap();
        assert_eq!(v.answer, Answer::Yes);
        let w = v.witness.unwrap();
        assert!(v.h0.is_some());
        assert_eq!(inst.r_map[w], inst.f);
    }

    #[test]
    fn h0_representative_counts() {
        // ker R' ≅ Z, Θ = 8
        let z = FgAbGroup::free(1);
        let t = FgAbGroup::trivial();
        let mut inst = generate_instance(&params(8, None), 1).unwrap();
        inst.gx = z.clone();
        inst.ga = t.clone();
        inst.r_prime = GroupHom::zero(&z, &t);
        inst.f_prime = t.zero();
        inst.theta = BigInt::from(8);
        let h = compute_h0(&inst).unwrap().unwrap();
        assert_eq!(h.reps.len(), 9);

        // ker R' ≅ Z/3, Θ = 8
        let z3 = FgAbGroup::cyclic(3);
        inst.gx = z3.clone();
        inst.r_prime = GroupHom::zero(&z3, &t);
        let h = compute_h0(&inst).unwrap().unwrap();
        assert_eq!(h.reps.len(), 3);

        // trivial kernel
        inst.gx = z3.clone();
        inst.ga = z3.clone();
        inst.r_prime = GroupHom::identity(&z3);
        inst.f_prime = z3.element_i64(&[2]).unwrap();
        let h = compute_h0(&inst).unwrap().unwrap();
        assert_eq!(h.reps, vec![z3.element_i64(&[2]).unwrap()]);
    }

    #[test]
    fn corruptions_are_reported() {
        let inst = generate_instance(&params(4, Some(true)), 5).unwrap();
        let mut bad = inst.clone();
        bad.f_prime = bad.f_prime.add(&bad.ga.generator(0)).unwrap_or(bad.f_prime.clone());
        if bad.ga.rank() > 0 {
            assert!(validate_instance(&bad).violations.contains(&InstanceViolation::FPrime));
            assert!(matches!(decide(&bad), Err(DecideError::Invalid(_))));
        }

        let mut found = false;
        for seed in 0..20 {
            let mut bad = generate_instance(&params(4, None), seed).unwrap();
            if bad.gx.rank() == 0 || bad.pi_x.len() < 2 {
                continue;
            }
            let table = &mut bad.act_x.by_generator[0];
            table[0] = table[1];
            found = true;
            assert!(!validate_instance(&bad).is_clean());
        }
        assert!(found);
    }

    #[test]
    fn translation_invariance() {
        for seed in 0..60 {
            let inst = generate_instance(&params(2 + seed % 9, Some(seed % 3 == 0)), seed).unwrap();
            let base = decide(&inst).unwrap().answer;
            // shifts by R'(k): the axioms carry witnesses along act_X by k
            for j in 0..inst.gx.rank() {
                let k = inst.r_prime.apply(&inst.gx.generator(j)).unwrap();
                let mut moved = inst.clone();
                moved.f = inst.act_a.act(&inst.ga, inst.f, &k).unwrap();
                moved.f_prime = inst.f_prime.add(&k.scalar_mul(&inst.theta)).unwrap();
                assert!(validate_instance(&moved).is_clean());
                assert_eq!(decide(&moved).unwrap().answer, base, "seed {seed}");
            }
        }
    }
}
