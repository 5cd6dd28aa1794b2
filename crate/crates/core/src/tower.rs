//! Finite model of a refined Postnikov tower and the lifted action ladder.
//!
//! Stage 0 is a finite abelian group acting on itself by addition. Stage `i`
//! sits over stage `i-1` with fiber coordinate `c ∈ Z/q_i²` subject to
//! `c ≡ κ_i(x) (mod q_i)`; the reduction `Z/q² → Z/q` stands in for the path
//! fibration `E(Z/q, n) → K(Z/q, n+1)`. Carrier elements are indexed so that
//! element `x·q_i + t` of stage `i` has parent `x` and fiber `κ_i(x) + q_i·t`.
//!
//! The lift of the action through a layer uses the twist
//! `M_i(x, y) = s(D κ_i(x; y, …, y))` where `s: Z/q → Z/q²` is the canonical
//! representative. Homotopies are not modeled.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::abelian::{prime_power, AbelianError, FgAbGroup};
use crate::diffcalc::{ActionAlgebra, DiffError, DiffOperator, GValuedMap};

/// Upper bound on carrier sizes and lift counts.
pub const MAX_ENUMERATION: usize = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TowerError {
    #[error("layer {layer}: q = {q} is not a prime power")]
    NotPrimePower { layer: usize, q: u64 },
    #[error("layer {layer}: kappa table has {got} entries, carrier has {expected}")]
    KappaLength { layer: usize, expected: usize, got: usize },
    #[error("ground group {0} must be finite")]
    InfiniteGround(FgAbGroup),
    #[error("enumeration of {0} exceeds the supported size")]
    TooLarge(String),
    #[error("stage {stage}: {what} index {index} out of range (size {size})")]
    OutOfRange { stage: usize, what: &'static str, index: usize, size: usize },
    #[error("stage {stage}: acting parameter {at} is not a multiple of {theta}")]
    NotAMultiple { stage: usize, at: BigInt, theta: BigInt },
    #[error("stage {stage}: acting on {x} by {y} leaves the carrier")]
    LeavesCarrier { stage: usize, x: usize, y: usize },
    #[error("ladder does not fit this tower: {0}")]
    LadderMismatch(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

/// One prime-power layer with its invariant `κ: carrier(i-1) → Z/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    q: u64,
    p: u64,
    m: u32,
    kappa: Vec<u64>,
    /// Homotopy degree this layer refines; informational only.
    pub degree: Option<u32>,
}

impl Layer {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.m
    }

    pub fn kappa(&self) -> &[u64] {
        &self.kappa
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerModel {
    ground: FgAbGroup,
    layers: Vec<Layer>,
    sizes: Vec<usize>,
}

/// A carrier element in product coordinates: ground index and fiber values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct StagePoint {
    pub ground: usize,
    pub fibers: Vec<u64>,
}

impl TowerModel {
    /// `layers` are `(q, κ table, degree)`; κ values are reduced mod `q`.
    pub fn new(ground: FgAbGroup, layers: Vec<(u64, Vec<u64>, Option<u32>)>) -> Result<Self, TowerError> {
        let mut size = ground
            .enumerable_size()
            .filter(|&n| n <= MAX_ENUMERATION)
            .ok_or_else(|| {
                if ground.is_finite() {
                    TowerError::TooLarge(format!("ground {ground}"))
                } else {
                    TowerError::InfiniteGround(ground.clone())
                }
            })?;
        let mut sizes = vec![size];
        let mut built = Vec::with_capacity(layers.len());
        for (i, (q, kappa, degree)) in layers.into_iter().enumerate() {
            let layer = i + 1;
            let (p, m) = prime_power(&BigInt::from(q)).ok_or(TowerError::NotPrimePower { layer, q })?;
            if q > u32::MAX as u64 {
                return Err(TowerError::TooLarge(format!("layer {layer} order {q}")));
            }
            if kappa.len() != size {
                return Err(TowerError::KappaLength { layer, expected: size, got: kappa.len() });
            }
            size = size
                .checked_mul(q as usize)
                .filter(|&n| n <= MAX_ENUMERATION)
                .ok_or_else(|| TowerError::TooLarge(format!("carrier of stage {layer}")))?;
            sizes.push(size);
            built.push(Layer {
                q,
                p: p.to_u64().unwrap(),
                m,
                kappa: kappa.into_iter().map(|k| k % q).collect(),
                degree,
            });
        }
        Ok(Self { ground, layers: built, sizes })
    }

    pub fn ground(&self) -> &FgAbGroup {
        &self.ground
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Layer feeding stage `i ≥ 1`.
    pub fn layer(&self, stage: usize) -> &Layer {
        &self.layers[stage - 1]
    }

    pub fn num_stages(&self) -> usize {
        self.layers.len() + 1
    }

    pub fn top(&self) -> usize {
        self.layers.len()
    }

    pub fn carrier_size(&self, stage: usize) -> usize {
        self.sizes[stage]
    }

    pub fn ground_size(&self) -> usize {
        self.sizes[0]
    }

    pub fn parent(&self, stage: usize, x: usize) -> usize {
        x / self.layer(stage).q as usize
    }

    /// Fiber value of element `x` of stage `stage ≥ 1`.
    pub fn fiber(&self, stage: usize, x: usize) -> u64 {
        let layer = self.layer(stage);
        let q = layer.q as usize;
        layer.kappa[x / q] + layer.q * (x % q) as u64
    }

    pub fn point(&self, stage: usize, mut x: usize) -> StagePoint {
        let mut fibers = vec![0; stage];
        for s in (1..=stage).rev() {
            fibers[s - 1] = self.fiber(s, x);
            x = self.parent(s, x);
        }
        StagePoint { ground: x, fibers }
    }

    /// Index of a point, or `None` if some fiber value violates its κ constraint.
    pub fn index_of(&self, point: &StagePoint) -> Option<usize> {
        if point.ground >= self.ground_size() || point.fibers.len() > self.layers.len() {
            return None;
        }
        let mut idx = point.ground;
        for (layer, &c) in self.layers.iter().zip(&point.fibers) {
            if c >= layer.q * layer.q || c % layer.q != layer.kappa[idx] {
                return None;
            }
            idx = idx * layer.q as usize + (c / layer.q) as usize;
        }
        Some(idx)
    }

    /// Stage `stage` element lying over `parent` with fiber value `c`, if compatible.
    pub fn lift_index(&self, stage: usize, parent: usize, c: u64) -> Option<usize> {
        let layer = self.layer(stage);
        let q = layer.q;
        let c = c % (q * q);
        (c % q == layer.kappa[parent]).then(|| parent * q as usize + (c / q) as usize)
    }
}

/// All carriers, stage 0 first, as explicit point lists.
pub fn build_stage_carriers(t: &TowerModel) -> Vec<Vec<StagePoint>> {
    (0..t.num_stages())
        .map(|s| (0..t.carrier_size(s)).map(|x| t.point(s, x)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LadderLayer {
    /// `θ_i` contributed by this layer's operator.
    pub theta_step: BigInt,
    /// `Θ_i = θ_i · Θ_{i-1}`.
    pub theta: BigInt,
    pub op: DiffOperator,
    /// `M_i(x, y)` at `x * |ground| + y`, values in `Z/q_i²`.
    pub twist: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionLadder {
    pub layers: Vec<LadderLayer>,
}

impl ActionLadder {
    /// `[Θ_0, Θ_1, …]` with `Θ_0 = 1`.
    pub fn thetas(&self) -> Vec<BigInt> {
        std::iter::once(BigInt::one())
            .chain(self.layers.iter().map(|l| l.theta.clone()))
            .collect()
    }

    pub fn theta_at(&self, stage: usize) -> BigInt {
        if stage == 0 {
            BigInt::one()
        } else {
            self.layers[stage - 1].theta.clone()
        }
    }
}

/// The common `Θ`: the last rung of the ladder.
pub fn common_theta(ladder: &ActionLadder) -> BigInt {
    ladder.layers.last().map_or_else(BigInt::one, |l| l.theta.clone())
}

/// `k`-fold iterate of a partial self-map, by squaring.
fn power_partial(map: &[Option<usize>], k: &BigInt) -> Vec<Option<usize>> {
    let mut base = map.to_vec();
    let mut acc: Vec<Option<usize>> = (0..map.len()).map(Some).collect();
    let mut e = k.clone();
    while !e.is_zero() {
        if e.is_odd() {
            acc = acc.iter().map(|a| a.and_then(|x| base[x])).collect();
        }
        base = base.iter().map(|b| b.and_then(|x| base[x])).collect();
        e >>= 1;
    }
    acc
}

/// Derives a `|S| × |T|` partial table by `k`.
fn derive_table(table: &[Option<usize>], s: usize, t: usize, k: &BigInt) -> Vec<Option<usize>> {
    let mut out = vec![None; s * t];
    for y in 0..t {
        let map: Vec<Option<usize>> = (0..s).map(|x| table[x * t + y]).collect();
        for (x, v) in power_partial(&map, k).into_iter().enumerate() {
            out[x * t + y] = v;
        }
    }
    out
}

fn ground_table(t: &TowerModel) -> Result<Vec<Option<usize>>, TowerError> {
    let alg = ActionAlgebra::group_addition(t.ground())?;
    Ok(alg.table().iter().map(|&v| Some(v)).collect())
}

/// Stage-`stage` table at `Θ_stage` from the stage below at `Θ_{stage-1}`.
fn lift_table(
    t: &TowerModel,
    stage: usize,
    below: &[Option<usize>],
    layer: &LadderLayer,
) -> Vec<Option<usize>> {
    let g = t.ground_size();
    let q = t.layer(stage).q;
    let derived = derive_table(below, t.carrier_size(stage - 1), g, &layer.theta_step);
    let mut table = vec![None; t.carrier_size(stage) * g];
    for x in 0..t.carrier_size(stage) {
        let parent = t.parent(stage, x);
        let c = t.fiber(stage, x);
        for y in 0..g {
            table[x * g + y] = derived[parent * g + y].and_then(|p2| {
                let c2 = (c + layer.twist[parent * g + y]) % (q * q);
                t.lift_index(stage, p2, c2)
            });
        }
    }
    table
}

fn to_algebra(table: &[Option<usize>], s: usize, t: usize) -> Result<ActionAlgebra, TowerError> {
    let total: Option<Vec<usize>> = table.iter().copied().collect();
    let total = total.ok_or_else(|| TowerError::LadderMismatch("partial action table".into()))?;
    Ok(ActionAlgebra::new(s, t, total, 0)?)
}

/// Lifts the ground action through every layer, one operator per layer.
pub fn build_actions(t: &TowerModel, ell0: u64) -> Result<ActionLadder, TowerError> {
    let g = t.ground_size();
    let mut table = ground_table(t)?;
    let mut theta = BigInt::one();
    let mut layers = Vec::with_capacity(t.layers().len());
    for stage in 1..=t.top() {
        let layer = t.layer(stage);
        let s = t.carrier_size(stage - 1);
        let alg = to_algebra(&table, s, g)?;
        let op = DiffOperator::build(layer.p, layer.m, ell0)?;
        let zq = FgAbGroup::cyclic(layer.q);
        let kappa_map = GValuedMap::new(
            alg,
            zq.clone(),
            layer.kappa.iter().map(|&k| zq.element(vec![BigInt::from(k)])).collect::<Result<_, _>>()?,
        )?;
        let eval = op.evaluator(&kappa_map, &BigInt::one())?;
        let mut twist = Vec::with_capacity(s * g);
        for x in 0..s {
            for y in 0..g {
                let w = eval.eval(x, y)?;
                twist.push(w.coords()[0].to_u64().expect("residue below q"));
            }
        }
        theta = &theta * op.theta();
        let rung = LadderLayer {
            theta_step: op.theta().clone(),
            theta: theta.clone(),
            op,
            twist,
        };
        table = lift_table(t, stage, &table, &rung);
        layers.push(rung);
    }
    Ok(ActionLadder { layers })
}

fn check_ladder_shape(t: &TowerModel, ladder: &ActionLadder) -> Result<(), TowerError> {
    if ladder.layers.len() != t.layers().len() {
        return Err(TowerError::LadderMismatch(format!(
            "{} rungs for {} layers",
            ladder.layers.len(),
            t.layers().len()
        )));
    }
    for (i, rung) in ladder.layers.iter().enumerate() {
        let expected = t.carrier_size(i) * t.ground_size();
        if rung.twist.len() != expected {
            return Err(TowerError::LadderMismatch(format!(
                "layer {}: twist table has {} entries, expected {expected}",
                i + 1,
                rung.twist.len()
            )));
        }
        if !rung.theta_step.is_positive() || !rung.theta.is_positive() {
            return Err(TowerError::LadderMismatch(format!("layer {}: non-positive theta", i + 1)));
        }
    }
    Ok(())
}

/// Action tables of every stage at its own `Θ_i`; entries are `None` where a
/// (corrupted) ladder would push a point off its carrier.
#[derive(Clone, Debug)]
pub struct TowerActions<'a> {
    tower: &'a TowerModel,
    thetas: Vec<BigInt>,
    tables: Vec<Vec<Option<usize>>>,
}

impl<'a> TowerActions<'a> {
    pub fn new(t: &'a TowerModel, ladder: &ActionLadder) -> Result<Self, TowerError> {
        check_ladder_shape(t, ladder)?;
        let mut tables = vec![ground_table(t)?];
        for stage in 1..=t.top() {
            let next = lift_table(t, stage, &tables[stage - 1], &ladder.layers[stage - 1]);
            tables.push(next);
        }
        Ok(Self { tower: t, thetas: ladder.thetas(), tables })
    }

    pub fn theta(&self, stage: usize) -> &BigInt {
        &self.thetas[stage]
    }

    /// Multiplicity `at / Θ_stage`, rejecting non-multiples.
    fn multiplicity(&self, stage: usize, at: &BigInt) -> Result<BigInt, TowerError> {
        let theta = &self.thetas[stage];
        let (k, r) = at.div_rem(theta);
        if !at.is_positive() || !r.is_zero() {
            return Err(TowerError::NotAMultiple { stage, at: at.clone(), theta: theta.clone() });
        }
        Ok(k)
    }

    /// Whole stage table derived to act at `at`.
    pub fn table_at(&self, stage: usize, at: &BigInt) -> Result<Vec<Option<usize>>, TowerError> {
        let k = self.multiplicity(stage, at)?;
        Ok(derive_table(
            &self.tables[stage],
            self.tower.carrier_size(stage),
            self.tower.ground_size(),
            &k,
        ))
    }

    /// `x + at·y` at stage `stage`.
    pub fn act(&self, stage: usize, x: usize, y: usize, at: &BigInt) -> Result<usize, TowerError> {
        let t = self.tower;
        if stage > t.top() {
            return Err(TowerError::OutOfRange { stage, what: "stage", index: stage, size: t.num_stages() });
        }
        if x >= t.carrier_size(stage) {
            return Err(TowerError::OutOfRange { stage, what: "carrier", index: x, size: t.carrier_size(stage) });
        }
        if y >= t.ground_size() {
            return Err(TowerError::OutOfRange { stage, what: "ground", index: y, size: t.ground_size() });
        }
        let k = self.multiplicity(stage, at)?;
        let g = t.ground_size();
        let map: Vec<Option<usize>> = (0..t.carrier_size(stage)).map(|v| self.tables[stage][v * g + y]).collect();
        power_partial(&map, &k)[x].ok_or(TowerError::LeavesCarrier { stage, x, y })
    }
}

/// `x + at·y` at stage `stage`; `at` must be a multiple of `Θ_stage`.
pub fn stage_act(
    t: &TowerModel,
    ladder: &ActionLadder,
    stage: usize,
    x: usize,
    y: usize,
    at: &BigInt,
) -> Result<usize, TowerError> {
    TowerActions::new(t, ladder)?.act(stage, x, y, at)
}

/// Every map `W → carrier(stage)` over `h: W → carrier(stage - 1)`, in odometer order.
pub fn enumerate_lifts(t: &TowerModel, h: &[usize], stage: usize) -> Result<Vec<Vec<usize>>, TowerError> {
    if stage == 0 || stage > t.top() {
        return Err(TowerError::OutOfRange { stage, what: "layer", index: stage, size: t.num_stages() });
    }
    if let Some(&bad) = h.iter().find(|&&v| v >= t.carrier_size(stage - 1)) {
        return Err(TowerError::OutOfRange {
            stage: stage - 1,
            what: "carrier",
            index: bad,
            size: t.carrier_size(stage - 1),
        });
    }
    let q = t.layer(stage).q as usize;
    let count = u32::try_from(h.len())
        .ok()
        .and_then(|w| q.checked_pow(w))
        .filter(|&n| n <= MAX_ENUMERATION)
        .ok_or_else(|| TowerError::TooLarge(format!("{q}^{} lifts", h.len())))?;
    let mut out = Vec::with_capacity(count);
    let mut digits = vec![0usize; h.len()];
    for _ in 0..count {
        out.push(h.iter().zip(&digits).map(|(&p, &d)| p * q + d).collect());
        for d in digits.iter_mut().rev() {
            *d += 1;
            if *d < q {
                break;
            }
            *d = 0;
        }
    }
    Ok(out)
}

/// Lifts of `h: W → carrier(from)` all the way to the top stage.
pub fn enumerate_lifts_to_top(t: &TowerModel, h: &[usize], from: usize) -> Result<Vec<Vec<usize>>, TowerError> {
    let mut current = vec![h.to_vec()];
    for stage in from + 1..=t.top() {
        let mut next = Vec::new();
        for partial in &current {
            next.extend(enumerate_lifts(t, partial, stage)?);
            if next.len() > MAX_ENUMERATION {
                return Err(TowerError::TooLarge("lifts to the top stage".into()));
            }
        }
        current = next;
    }
    Ok(current)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LadderViolation {
    BaseTheta { found: BigInt },
    ThetaStep { layer: usize, expected: BigInt, found: BigInt },
    ThetaProduct { layer: usize },
    Divisibility { layer: usize, theta: BigInt, common: BigInt },
    TwistAtZero { layer: usize, x: usize },
    RightZero { stage: usize, x: usize },
    Fiber { stage: usize, x: usize, y: usize },
    Equivariance { stage: usize, x: usize, y: usize, at: BigInt },
    RouteMismatch { stage: usize, x: usize, y: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LadderReport {
    pub checks: usize,
    pub violations: Vec<LadderViolation>,
}

impl LadderReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    fn check(&mut self, ok: bool, v: impl FnOnce() -> LadderViolation) {
        self.checks += 1;
        if !ok {
            self.violations.push(v());
        }
    }
}

/// Direct evaluation of `x + Θ_stage·y` on product coordinates, without
/// index tables: ground arithmetic at the bottom, twists added fiberwise.
/// `None` when an intermediate point falls off its carrier.
fn raw_act(
    t: &TowerModel,
    ladder: &ActionLadder,
    ground_elems: &[crate::abelian::GroupElement],
    stage: usize,
    point: &StagePoint,
    y: usize,
    times: &BigInt,
) -> Option<StagePoint> {
    if stage == 0 {
        let moved = ground_elems[point.ground]
            .add(&ground_elems[y].scalar_mul(times))
            .ok()?;
        return Some(StagePoint { ground: t.ground().index_of(&moved)?, fibers: vec![] });
    }
    let rung = &ladder.layers[stage - 1];
    let q = t.layer(stage).q;
    let g = t.ground_size();
    let mut cur = point.clone();
    let mut k = BigInt::zero();
    while &k < times {
        let prefix = StagePoint { ground: cur.ground, fibers: cur.fibers[..stage - 1].to_vec() };
        let parent = t.index_of(&prefix)?;
        let below = raw_act(t, ladder, ground_elems, stage - 1, &prefix, y, &rung.theta_step)?;
        let c = (cur.fibers[stage - 1] + rung.twist[parent * g + y]) % (q * q);
        let mut fibers = below.fibers;
        fibers.push(c);
        cur = StagePoint { ground: below.ground, fibers };
        k += 1;
    }
    Some(cur)
}

/// Exhaustive audit of a ladder against its tower.
pub fn verify_ladder(t: &TowerModel, ladder: &ActionLadder) -> Result<LadderReport, TowerError> {
    let actions = TowerActions::new(t, ladder)?;
    let mut report = LadderReport::default();
    let common = common_theta(ladder);
    let g = t.ground_size();
    let ground_elems = t.ground().elements()?;
    let zero_y = 0; // index of the zero element of the ground group

    // Θ ladder arithmetic
    let thetas = ladder.thetas();
    report.check(thetas[0].is_one(), || LadderViolation::BaseTheta { found: thetas[0].clone() });
    for (i, rung) in ladder.layers.iter().enumerate() {
        let layer = i + 1;
        report.check(&rung.theta_step == rung.op.theta(), || LadderViolation::ThetaStep {
            layer,
            expected: rung.op.theta().clone(),
            found: rung.theta_step.clone(),
        });
        report.check(rung.theta == &rung.theta_step * &thetas[i], || LadderViolation::ThetaProduct { layer });
        report.check(thetas[i].is_positive() && rung.theta.is_multiple_of(&thetas[i]), || {
            LadderViolation::Divisibility { layer, theta: thetas[i].clone(), common: rung.theta.clone() }
        });
        report.check(common.is_multiple_of(&rung.theta), || LadderViolation::Divisibility {
            layer,
            theta: rung.theta.clone(),
            common: common.clone(),
        });
        for x in 0..t.carrier_size(i) {
            report.check(rung.twist[x * g + zero_y] == 0, || LadderViolation::TwistAtZero { layer, x });
        }
    }

    let mut common_tables = Vec::with_capacity(t.num_stages());
    for stage in 0..t.num_stages() {
        common_tables.push(actions.table_at(stage, &common)?);
    }

    for stage in 0..t.num_stages() {
        let own = &actions.tables[stage];
        let below_derived = (stage > 0).then(|| {
            derive_table(
                &actions.tables[stage - 1],
                t.carrier_size(stage - 1),
                g,
                &ladder.layers[stage - 1].theta_step,
            )
        });
        for x in 0..t.carrier_size(stage) {
            let point = t.point(stage, x);
            report.check(own[x * g + zero_y] == Some(x), || LadderViolation::RightZero { stage, x });
            for y in 0..g {
                let raw = raw_act(t, ladder, &ground_elems, stage, &point, y, &BigInt::one());
                let raw_idx = raw.as_ref().and_then(|p| t.index_of(p));
                report.check(raw_idx.is_some(), || LadderViolation::Fiber { stage, x, y });
                report.check(raw_idx == own[x * g + y], || LadderViolation::RouteMismatch { stage, x, y });
                if let Some(below) = &below_derived {
                    let parent = t.parent(stage, x);
                    let up = own[x * g + y].map(|v| t.parent(stage, v));
                    report.check(up.is_some() && up == below[parent * g + y], || LadderViolation::Equivariance {
                        stage,
                        x,
                        y,
                        at: actions.theta(stage).clone(),
                    });
                    let up = common_tables[stage][x * g + y].map(|v| t.parent(stage, v));
                    let down = common_tables[stage - 1][parent * g + y];
                    report.check(up.is_some() && up == down, || LadderViolation::Equivariance {
                        stage,
                        x,
                        y,
                        at: common.clone(),
                    });
                }
            }
        }
    }
    Ok(report)
}
