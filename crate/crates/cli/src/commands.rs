use std::fs;
use std::path::Path;

use extcore::abelian::{FgAbGroup, GroupElement};
use extcore::decide::{self, Answer, DecideError, GenParams, Verdict};
use extcore::diffcalc::{check_congruence, DiffOperator};
use extcore::format::{self, JsonInt, LadderExport, OperatorFile};
use extcore::sample;
use extcore::tower::{self, TowerError};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::report::{CliError, Run};
use crate::{BuildArgs, CheckArgs, DecideArgs, GenArgs, OpArgs, VerifyArgs};

/// Violations listed individually in a report; the rest are only counted.
const MAX_LISTED: usize = 20;

fn read(run: &mut Run, path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    run.digest(&bytes);
    String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{}: not UTF-8", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn coords(e: &GroupElement) -> Value {
    json!(e.coords().iter().map(JsonInt::from).collect::<Vec<_>>())
}

fn build_from_args(run: &mut Run, a: &OpArgs) -> Result<DiffOperator, CliError> {
    let (Some(p), Some(m), Some(l0)) = (a.p, a.m, a.l0) else {
        return Err(CliError::Input("--p, --m and --l0 are all required".into()));
    };
    run.digest(format!("p={p} m={m} l0={l0}").as_bytes());
    DiffOperator::build(p, m, l0).map_err(CliError::input)
}

fn operator_json(op: &DiffOperator) -> Value {
    json!({
        "text": op.to_string(),
        "operator": OperatorFile::from_operator(op),
    })
}

pub fn diff_build(run: &mut Run, a: &BuildArgs) -> Result<(), CliError> {
    let op = build_from_args(run, &a.op)?;
    if let Some(out) = &a.out {
        write(out, &format::write_operator(&op))?;
    }
    run.say(op.to_string());
    for t in op.terms() {
        run.say(format!("  coefficient {} on superscript {}", t.coefficient, t.superscript));
    }
    run.result = operator_json(&op);
    Ok(())
}

pub fn diff_check(run: &mut Run, a: &CheckArgs) -> Result<(), CliError> {
    let op = match &a.file {
        Some(path) => {
            let text = read(run, path)?;
            format::parse_operator(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?
        }
        None => build_from_args(run, &a.op)?,
    };
    let q = op.q().to_u64().ok_or_else(|| CliError::Input(format!("q = {} is too large to sample", op.q())))?;
    run.seed = Some(a.seed);
    if a.trials == 0 {
        run.warn("no trials requested; nothing was checked");
    }
    let targets = [FgAbGroup::cyclic(q), FgAbGroup::new([q, q]).map_err(CliError::input)?];
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut listed = Vec::new();
    let mut total = 0usize;
    for trial in 0..a.trials {
        let alg = sample::random_algebra(&mut rng, a.max_s as usize, a.max_t as usize);
        let f = sample::random_map(&mut rng, &alg, &targets[(trial % 2) as usize]);
        let report = check_congruence(&op, &f).map_err(CliError::input)?;
        run.checks += report.checks as u64;
        total += report.violations.len();
        for v in report.violations {
            if listed.len() < MAX_LISTED {
                listed.push(json!({ "trial": trial, "x": v.x, "y": v.y, "residual": coords(&v.residual) }));
            }
        }
    }
    run.failed = total > 0;
    run.say(op.to_string());
    run.say(format!("{} trials, {} violations", a.trials, total));
    run.result = json!({
        "operator": operator_json(&op),
        "trials": a.trials,
        "violation_count": total,
        "violations": listed,
    });
    Ok(())
}

fn tower_error(e: TowerError) -> CliError {
    CliError::input(e)
}

pub fn tower_verify(run: &mut Run, a: &VerifyArgs) -> Result<(), CliError> {
    let text = read(run, &a.file)?;
    let t = format::parse_tower(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.file.display())))?;
    let ladder = tower::build_actions(&t, a.l0).map_err(tower_error)?;
    let report = tower::verify_ladder(&t, &ladder).map_err(tower_error)?;
    run.checks = report.checks as u64;
    run.failed = !report.is_clean();
    let thetas: Vec<JsonInt> = ladder.thetas().iter().map(JsonInt::from).collect();
    let common = tower::common_theta(&ladder);
    run.say(format!(
        "{} stages, carriers {:?}",
        t.num_stages(),
        (0..t.num_stages()).map(|s| t.carrier_size(s)).collect::<Vec<_>>()
    ));
    run.say(format!(
        "Theta ladder {}, common Theta {common}",
        ladder.thetas().iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" | ")
    ));
    if !report.is_clean() {
        run.say(format!("{} violations", report.violations.len()));
    }
    let mut result = json!({
        "stages": t.num_stages(),
        "carrier_sizes": (0..t.num_stages()).map(|s| t.carrier_size(s)).collect::<Vec<_>>(),
        "thetas": thetas,
        "common_theta": JsonInt::from(common),
        "violation_count": report.violations.len(),
        "violations": report.violations.iter().take(MAX_LISTED).map(|v| format!("{v:?}")).collect::<Vec<_>>(),
    });
    if a.ladder {
        result["ladder"] = serde_json::to_value(LadderExport::from_ladder(&ladder)).expect("serializable");
    }
    run.result = result;
    Ok(())
}

fn verdict_json(v: &Verdict) -> Value {
    json!({
        "verdict": match v.answer { Answer::Yes => "YES", Answer::No => "NO" },
        "witness": v.witness,
    })
}

fn decide_error(e: DecideError) -> CliError {
    match e {
        DecideError::InfiniteSource(g) => CliError::Refused(format!("exhaustive search needs a finite GX, got {g}")),
        other => CliError::input(other),
    }
}

pub fn decide(run: &mut Run, a: &DecideArgs) -> Result<(), CliError> {
    let text = read(run, &a.file)?;
    let inst = format::parse_instance(&text).map_err(|e| CliError::Input(format!("{}: {e}", a.file.display())))?;
    if a.oracle && !inst.gx.is_finite() {
        return Err(CliError::Refused(format!(
            "--oracle enumerates every class of X and needs a finite GX; this instance has GX = {}",
            inst.gx
        )));
    }
    let validation = decide::validate_instance(&inst);
    run.checks = validation.checks as u64;
    if !validation.is_clean() {
        run.failed = true;
        run.say(format!("instance is invalid: {} violations", validation.violations.len()));
        run.result = json!({
            "valid": false,
            "violation_count": validation.violations.len(),
            "violations": validation.violations.iter().take(MAX_LISTED).map(|v| format!("{v:?}")).collect::<Vec<_>>(),
        });
        return Ok(());
    }
    let verdict = decide::decide(&inst).map_err(decide_error)?;
    let mut result = verdict_json(&verdict);
    result["valid"] = json!(true);
    result["h0"] = verdict.h0.as_ref().map_or(Value::Null, coords);
    result["h0_size"] = json!(verdict.h0_size);
    run.say(format!(
        "{} (witness {}, |H0 reps| = {})",
        result["verdict"].as_str().unwrap(),
        verdict.witness.map_or("none".into(), |w| w.to_string()),
        verdict.h0_size
    ));
    if a.oracle {
        let oracle = decide::brute_force(&inst).map_err(decide_error)?;
        run.checks += inst.r_map.len() as u64;
        let agrees = oracle.answer == verdict.answer;
        run.failed = !agrees;
        let mut o = verdict_json(&oracle);
        o["agrees"] = json!(agrees);
        result["oracle"] = o;
        run.say(if agrees { "oracle agrees".to_string() } else { "oracle DISAGREES".to_string() });
    }
    run.result = result;
    Ok(())
}

pub fn gen(run: &mut Run, a: &GenArgs) -> Result<(), CliError> {
    let params = GenParams {
        theta: a.theta,
        max_rank: a.max_rank,
        summands: a.summands.clone(),
        free_rank: a.free_rank,
        radius: a.radius,
        hint: a.hint.as_deref().map(|h| h == "yes"),
    };
    run.seed = Some(a.seed);
    run.digest(format!("{params:?}").as_bytes());
    let inst = decide::generate_instance(&params, a.seed).map_err(decide_error)?;
    let validation = decide::validate_instance(&inst);
    run.checks = validation.checks as u64;
    run.failed = !validation.is_clean();
    let text = format::write_instance(&inst);
    write(&a.out, &text)?;
    run.say(format!(
        "wrote {} (GX = {}, GA = {}, {} classes over X)",
        a.out.display(),
        inst.gx,
        inst.ga,
        inst.r_map.len()
    ));
    run.result = json!({
        "path": a.out.display().to_string(),
        "output_digest": crate::report::sha256_hex(text.as_bytes()),
        "gx": inst.gx.to_string(),
        "ga": inst.ga.to_string(),
        "theta": a.theta,
        "classes_x": inst.r_map.len(),
        "classes_a": inst.pi_a.len(),
    });
    Ok(())
}
