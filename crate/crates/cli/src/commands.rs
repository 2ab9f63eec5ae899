use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use cullen_core::baker::{run_pipeline_at, fibonacci_chain_at, BoundLedger, Mode, ProblemInstance, Target as Stage};
use cullen_core::poly::IntegerPolynomial;
use cullen_core::recurrence::{check_hypotheses, RecurrenceSpec};
use cullen_core::reduction::{reduction_stage1, reduction_stage2, StageOutcome};
use cullen_core::search::{
    certify_solution, parse_solutions, search_fibonacci, search_general_range, verify_counterexample_spec,
    SolutionTuple,
};
use cullen_core::Error;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::{Cli, CliResult, Command, InstanceArgs, Target};

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Bound { target, mode, instance, out } => bound(cli.precision, *target, (*mode).into(), instance, out.as_deref()),
        Command::Reduce { target, stage, gap, n1_max, ell_max, out } => {
            reduce(cli.precision, *target, *stage, *gap, n1_max.as_deref(), ell_max.as_deref(), out.as_deref())
        }
        Command::Search { target, ell_max, ell_min, n1_max, instance, expect, out, tsv } => {
            search(*target, *ell_min, *ell_max, *n1_max, instance, expect.as_deref(), out.as_deref(), *tsv)
        }
        Command::VerifyCounterexample { k_max, spec, out } => verify(*k_max, spec.as_deref(), out.as_deref()),
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_json(out: Option<&Path>, value: &Value) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable") + "\n";
    write_text(out, &text)
}

fn write_text(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_spec(path: &Path) -> CliResult<RecurrenceSpec> {
    let text = read(path)?;
    RecurrenceSpec::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_instance(args: &InstanceArgs) -> CliResult<ProblemInstance> {
    let path = args.spec.as_ref().ok_or_else(|| CliError::Input("--spec: required for general instances".into()))?;
    let spec = load_spec(path)?;
    let x: BigInt = args.x.trim().parse().map_err(|_| CliError::Input(format!("--x: not an integer: {}", args.x)))?;
    let q = IntegerPolynomial::parse(&args.q).map_err(|e| CliError::Input(format!("--q: {e}")))?;
    Ok(ProblemInstance::new(spec, q, x, args.k)?)
}

fn parse_big(s: &str, field: &str) -> CliResult<BigInt> {
    s.trim().parse().map_err(|_| CliError::Input(format!("{field}: not an integer: {s}")))
}

fn bound(prec: u32, target: Target, mode: Mode, args: &InstanceArgs, out: Option<&Path>) -> CliResult<()> {
    let ledger = match target {
        Target::Fib => fibonacci_chain_at(mode, prec)?,
        Target::General => {
            let inst = load_instance(args)?;
            match run_pipeline_at(&inst, mode, prec) {
                Err(e @ Error::Hypothesis(_)) => {
                    let report = check_hypotheses(&inst.spec);
                    eprintln!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
                    return Err(e.into());
                }
                r => r?,
            }
        }
    };
    let doc = ledger_json(&ledger, mode);
    if out.is_some() {
        print!("{}", ledger.table());
    }
    write_json(out, &doc)
}

pub fn ledger_json(ledger: &BoundLedger, mode: Mode) -> Value {
    json!({
        "mode": mode,
        "entries": ledger.to_json(),
        "summary": ledger.summary_json(),
    })
}

fn stage_json(s: &StageOutcome) -> Value {
    json!({
        "stage": s.stage,
        "bound": s.bound.as_ref().map(ToString::to_string),
        "failure": s.failure,
        "subproblems": s.report_json(),
    })
}

fn reduce(
    prec: u32,
    target: Target,
    stage: Option<u8>,
    gap: Option<u64>,
    n1_max: Option<&str>,
    ell_max: Option<&str>,
    out: Option<&Path>,
) -> CliResult<()> {
    if target != Target::Fib {
        return Err(CliError::Input("reduce: only the fib preset is supported".into()));
    }
    if stage == Some(2) && gap.is_none() {
        return Err(CliError::Input("--gap: required for stage 2".into()));
    }
    let n1_max = match n1_max {
        Some(s) => parse_big(s, "--n1-max")?,
        None => fibonacci_chain_at(Mode::Replay, prec)?
            .stage(&Stage::Absolute)
            .and_then(|s| s.resolved.clone())
            .ok_or_else(|| CliError::Input("--n1-max: replay chain did not resolve".into()))?,
    };
    let ell_max = match ell_max {
        Some(s) => parse_big(s, "--ell-max")?,
        None => (&n1_max * 3u32 + 3u32) / 4u32,
    };
    let mut stages = Vec::new();
    if stage != Some(2) {
        stages.push(reduction_stage1(&n1_max, &ell_max)?);
    }
    let gap = match (stage, gap) {
        (Some(1), _) => None,
        (_, Some(g)) => Some(g),
        (_, None) => stages[0].bound.as_ref().and_then(|b| u64::try_from(b).ok()),
    };
    if let Some(g) = gap {
        if stages.iter().all(|s| s.failure.is_none()) {
            stages.push(reduction_stage2(&n1_max, &ell_max, g)?);
        }
    }
    let doc = json!({
        "n1_max": n1_max.to_string(),
        "ell_max": ell_max.to_string(),
        "stages": stages.iter().map(stage_json).collect::<Vec<_>>(),
    });
    write_json(out, &doc)?;
    for s in &stages {
        if let Some(sub) = &s.failure {
            return Err(Error::ScaleCapExceeded { subproblem: sub.clone() }.into());
        }
        if let Some(b) = &s.bound {
            eprintln!("stage {}: bound {b}", s.stage);
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn search(
    target: Target,
    ell_min: u64,
    ell_max: u64,
    n1_max: u64,
    args: &InstanceArgs,
    expect: Option<&Path>,
    out: Option<&Path>,
    tsv: bool,
) -> CliResult<()> {
    let (instance, found) = match target {
        Target::Fib => {
            let mut v = search_fibonacci(ell_max, n1_max);
            v.retain(|t| t.ell >= ell_min);
            (cullen_core::baker::fib_instance(), v)
        }
        Target::General => {
            let inst = load_instance(args)?;
            let v = search_general_range(&inst, n1_max, ell_min, ell_max);
            (inst, v)
        }
    };
    if let Some(bad) = found.iter().find(|t| !certify_solution(&instance, t)) {
        return Err(CliError::Mismatch(format!("tuple failed certification: {bad:?}")));
    }
    eprintln!("searched n1 <= {n1_max}, {ell_min} <= l <= {ell_max}: {} solutions", found.len());
    if tsv {
        let mut text = String::from("indices\tell\tx\n");
        for t in &found {
            text.push_str(&t.tsv_row());
            text.push('\n');
        }
        write_text(out, &text)?;
    } else {
        write_json(out, &serde_json::to_value(&found).expect("serializable"))?;
    }
    if let Some(path) = expect {
        let want = parse_solutions(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        compare(&found, &want)?;
    }
    Ok(())
}

fn compare(found: &[SolutionTuple], want: &[SolutionTuple]) -> CliResult<()> {
    let f: BTreeSet<&SolutionTuple> = found.iter().collect();
    let w: BTreeSet<&SolutionTuple> = want.iter().collect();
    if f == w {
        return Ok(());
    }
    let missing: Vec<String> = w.difference(&f).map(|t| t.tsv_row()).collect();
    let extra: Vec<String> = f.difference(&w).map(|t| t.tsv_row()).collect();
    Err(CliError::Mismatch(format!("missing [{}], unexpected [{}]", missing.join("; "), extra.join("; "))))
}

fn verify(k_max: u64, spec: Option<&Path>, out: Option<&Path>) -> CliResult<()> {
    let spec = match spec {
        Some(p) => load_spec(p)?,
        None => RecurrenceSpec::counterexample(),
    };
    let cert = verify_counterexample_spec(&spec, k_max);
    let mut doc = serde_json::to_value(&cert).expect("serializable");
    doc["complete"] = json!(cert.complete());
    write_json(out, &doc)?;
    if cert.complete() {
        Ok(())
    } else {
        Err(CliError::Mismatch("counterexample certificate incomplete".into()))
    }
}
