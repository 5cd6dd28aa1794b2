//! Acceptance suite. Runs every criterion, prints one line each and exits
//! non-zero if any of them fails.
//!
//!     cargo test -p extcore --test acceptance

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use extcore::abelian::{primary_decomposition, snf, FgAbGroup, IntMatrix};
use extcore::decide::{brute_force, compute_h0, decide, generate_instance, validate_instance, Answer, GenParams};
use extcore::diffcalc::{check_congruence, DiffOperator, DiffTerm};
use extcore::sample;
use extcore::tower::{build_actions, verify_ladder};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn operators() -> Vec<DiffOperator> {
    let mut out = Vec::new();
    for p in [2u64, 3, 5] {
        for m in 1..=3 {
            for ell0 in 1..=3 {
                out.push(DiffOperator::build(p, m, ell0).unwrap());
            }
        }
    }
    out
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let op = DiffOperator::build(2, 2, 4).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let expected = [
        DiffTerm { coefficient: 1.into(), superscript: 2.into() },
        DiffTerm { coefficient: 2.into(), superscript: 1.into() },
    ];
    ensure(op.ell() == 4, || format!("l = {}", op.ell()))?;
    ensure(op.theta() == &BigInt::from(8), || format!("theta = {}", op.theta()))?;
    ensure(op.terms() == expected, || format!("terms {op}"))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("{op}"))
}

fn congruence_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checks = 0;
    for op in operators() {
        let q = op.q().to_u64().unwrap();
        let targets = [FgAbGroup::cyclic(q), FgAbGroup::new([q, q]).unwrap()];
        for _ in 0..20 {
            let alg = sample::random_algebra(&mut rng, 6, 6);
            for target in &targets {
                for _ in 0..5 {
                    let f = sample::random_map(&mut rng, &alg, target);
                    let report = check_congruence(&op, &f).map_err(|e| e.to_string())?;
                    checks += report.checks;
                    if let Some(v) = report.violations.first() {
                        return Err(format!("{op}: violation at x={} y={}", v.x, v.y));
                    }
                }
            }
        }
    }
    Ok(format!("27 operators, {checks} exhaustive (x, y) checks"))
}

fn vanishing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut n = 0;
    for op in operators() {
        let q = op.q().to_u64().unwrap();
        let target = FgAbGroup::new([q, q]).unwrap();
        for _ in 0..100 {
            let alg = sample::random_algebra(&mut rng, 6, 6);
            let f = sample::random_map(&mut rng, &alg, &target);
            let x = rng.gen_range(0..alg.s_size());
            let v = op.evaluate(&f, &BigInt::one(), x, alg.zero()).map_err(|e| e.to_string())?;
            ensure(v.is_zero(), || format!("{op} at x={x}: {:?}", v.coords()))?;
            n += 1;
        }
    }
    Ok(format!("{n} evaluations at y = 0"))
}

fn tower_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checks = 0;
    let mut layered = 0;
    for i in 0..100 {
        let t = sample::random_tower(&mut rng, &[2, 3, 4, 8, 9]);
        layered += usize::from(t.top() > 0);
        let ladder = build_actions(&t, 2).map_err(|e| format!("tower {i}: {e}"))?;
        let report = verify_ladder(&t, &ladder).map_err(|e| format!("tower {i}: {e}"))?;
        checks += report.checks;
        ensure(report.is_clean(), || format!("tower {i}: {:?}", report.violations.first()))?;
    }
    Ok(format!("100 towers ({layered} with layers), {checks} checks"))
}

fn oracle_equivalence() -> Outcome {
    let mut yes = 0;
    let mut no = 0;
    for seed in 0..100u64 {
        let params = GenParams {
            theta: 2 + seed % 15,
            hint: Some(seed % 2 == 0),
            ..GenParams::default()
        };
        let inst = generate_instance(&params, seed).map_err(|e| format!("seed {seed}: {e}"))?;
        let fast = decide(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        let slow = brute_force(&inst).map_err(|e| format!("seed {seed}: {e}"))?;
        ensure(fast.answer == slow.answer, || format!("seed {seed}: decide {:?}, oracle {:?}", fast.answer, slow.answer))?;
        if let Some(w) = fast.witness {
            ensure(inst.r_map[w] == inst.f, || format!("seed {seed}: witness {w} does not restrict to f"))?;
        }
        match fast.answer {
            Answer::Yes => yes += 1,
            Answer::No => no += 1,
        }
    }
    ensure(yes > 0 && no > 0, || format!("unbalanced: {yes} yes, {no} no"))?;
    Ok(format!("100 instances agree ({yes} yes, {no} no)"))
}

fn h0_coverage() -> Outcome {
    let mut covered = 0;
    let mut elements = 0;
    let mut seed = 0u64;
    while covered < 50 {
        ensure(seed < 5000, || format!("only {covered} usable instances"))?;
        let params = GenParams { theta: 2 + seed % 11, max_rank: 3, hint: Some(true), ..GenParams::default() };
        let inst = generate_instance(&params, seed).map_err(|e| e.to_string())?;
        seed += 1;
        let Some(h) = compute_h0(&inst).map_err(|e| e.to_string())? else { continue };
        let size = h.kernel.cardinality().and_then(|c| c.to_usize());
        if !matches!(size, Some(n) if n <= 81) {
            continue;
        }
        let kernel: Vec<_> = h
            .kernel
            .elements()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|k| h.injection.apply(k).unwrap())
            .collect();
        let mut reachable = HashSet::new();
        for rep in &h.reps {
            for k in &kernel {
                reachable.insert(rep.add(&k.scalar_mul(&inst.theta)).unwrap().coords().to_vec());
            }
        }
        for k in &kernel {
            let e = h.h0.add(k).unwrap();
            ensure(reachable.contains(e.coords()), || format!("seed {}: {:?} not covered", seed - 1, e.coords()))?;
            elements += 1;
        }
        covered += 1;
    }
    Ok(format!("50 instances, {elements} coset elements covered"))
}

fn abelian_foundations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..500 {
        let (r, c) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let rows: Vec<Vec<BigInt>> = (0..r).map(|_| (0..c).map(|_| BigInt::from(rng.gen_range(-9..=9))).collect()).collect();
        let a = IntMatrix::from_rows(rows.clone(), c).unwrap();
        let res = snf(&a);
        ensure(res.u.mul(&a).unwrap().mul(&res.v).unwrap() == res.d, || format!("matrix {i}: U A V != D"))?;
        ensure(common::det(&res.u.to_rows()).abs().is_one(), || format!("matrix {i}: U not unimodular"))?;
        ensure(common::det(&res.v.to_rows()).abs().is_one(), || format!("matrix {i}: V not unimodular"))?;
        let diag = res.diagonal();
        ensure(diag == common::invariant_factors(&rows, c), || format!("matrix {i}: {diag:?} vs minors"))?;
    }
    for i in 0..100 {
        let orders: Vec<u64> = (0..rng.gen_range(0..=4)).map(|_| if rng.gen_bool(0.15) { 0 } else { rng.gen_range(2..=72) }).collect();
        let g = FgAbGroup::new(orders).unwrap();
        let (d, to, from) = primary_decomposition(&g);
        ensure(d.orders().iter().all(|q| q.is_zero() || extcore::abelian::prime_power(q).is_some()), || format!("group {i}: {d}"))?;
        for _ in 0..20 {
            let coords: Vec<BigInt> = (0..g.rank()).map(|_| BigInt::from(rng.gen_range(-100..100))).collect();
            let x = g.element(coords).unwrap();
            ensure(from.apply(&to.apply(&x).unwrap()).unwrap() == x, || format!("group {i}: round trip failed"))?;
        }
        ensure(g.cardinality() == d.cardinality(), || format!("group {i}: order changed"))?;
    }
    Ok("500 SNF matrices, 100 primary decompositions".into())
}

fn mutations() -> Outcome {
    // operator coefficient
    let mut op = DiffOperator::build(2, 2, 4).unwrap();
    op.terms_mut()[1].coefficient = 3.into();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let target = FgAbGroup::cyclic(4);
    let caught = (0..100).any(|_| {
        let alg = sample::random_algebra_sized(&mut rng, 6, 6);
        let f = sample::random_map(&mut rng, &alg, &target);
        !check_congruence(&op, &f).unwrap().is_clean()
    });
    ensure(caught, || "corrupted coefficient went unnoticed".into())?;

    // twist table entry
    let t = extcore::tower::TowerModel::new(FgAbGroup::cyclic(2), vec![(4, vec![1, 3], None)]).unwrap();
    let mut ladder = build_actions(&t, 2).unwrap();
    let twist = &mut ladder.layers[0].twist;
    twist[1] = (twist[1] + 1) % 16;
    let report = verify_ladder(&t, &ladder).map_err(|e| e.to_string())?;
    ensure(!report.is_clean(), || "corrupted twist went unnoticed".into())?;

    // class action entry
    let inst = (0..)
        .map(|s| generate_instance(&GenParams { hint: Some(true), ..GenParams::default() }, s).unwrap())
        .find(|i| i.gx.rank() > 0 && i.r_map.len() > 1)
        .unwrap();
    let mut bad = inst.clone();
    let table = &mut bad.act_x.by_generator[0];
    table[0] = table[0].map(|v| (v + 1) % inst.r_map.len());
    let report = validate_instance(&bad);
    ensure(!report.is_clean(), || "corrupted class action went unnoticed".into())?;
    Ok(format!("3 of 3 mutations detected ({} instance violations)", report.violations.len()))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("worked example D_{4,4}", worked_example),
        ("congruence suite", congruence_suite),
        ("vanishing at y = 0", vanishing),
        ("tower ladder verification", tower_suite),
        ("decide vs brute force", oracle_equivalence),
        ("H0 coverage", h0_coverage),
        ("abelian foundations", abelian_foundations),
        ("mutation sensitivity", mutations),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
