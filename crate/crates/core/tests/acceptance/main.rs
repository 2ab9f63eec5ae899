//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

mod suites;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cullen_core::baker::{fibonacci_chain, BoundLedger, Mode, Target};
use cullen_core::baker::{FIB_ELL_THRESHOLD, ProblemInstance};
use cullen_core::poly::IntegerPolynomial;
use cullen_core::recurrence::RecurrenceSpec;
use cullen_core::reduction::{reduction_stage1, reduction_stage2};
use cullen_core::search::{search_fibonacci, search_general, verify_counterexample, SolutionTuple};
use num_bigint::BigInt;
use num_traits::ToPrimitive;

type Outcome = Result<String, String>;

fn within(v: f64, target: f64, factor: f64) -> bool {
    v >= target / factor && v <= target * factor
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn value(l: &BoundLedger, name: &str) -> Result<f64, String> {
    l.value(name).map(|v| v.mid_f64()).ok_or_else(|| format!("ledger entry {name} missing"))
}

fn folded(l: &BoundLedger, t: Target) -> Result<f64, String> {
    l.stage(&t).map(|s| s.folded.mid_f64()).ok_or_else(|| format!("stage {} missing", t.label()))
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let r = f();
    let el = start.elapsed();
    match r {
        Ok(d) if el <= limit => Ok(format!("{d}; {:.2?}", el)),
        Ok(d) => Err(format!("{d}; took {:.2?} > {:.0?}", el, limit)),
        Err(d) => Err(format!("{d}; {:.2?}", el)),
    }
}

fn criterion_1() -> Outcome {
    timed(Duration::from_secs(1), || {
        let got = search_fibonacci(135, 200);
        let mut want: Vec<SolutionTuple> =
            [(1, 0, 0), (2, 0, 0), (4, 0, 1), (3, 1, 1), (3, 2, 1), (6, 1, 2), (6, 2, 2), (14, 6, 6)]
                .iter()
                .map(|&(a, b, l)| SolutionTuple::new(vec![a, b], l, 2))
                .collect();
        cullen_core::search::sort_canonical(&mut want);
        check(got == want, format!("{} tuples, exact match {}", got.len(), got == want))
    })
}

fn criterion_2() -> Outcome {
    let inst = ProblemInstance::new(RecurrenceSpec::fibonacci(), IntegerPolynomial::from_i64s(&[1]).unwrap(), 2, 1)
        .map_err(|e| e.to_string())?;
    let got: Vec<(u64, u64)> = search_general(&inst, 200, 135).iter().map(|t| (t.indices[0], t.ell)).collect();
    check(got == vec![(1, 0), (2, 0), (4, 1)], format!("{got:?}"))
}

fn criterion_3() -> Outcome {
    timed(Duration::from_secs(1), || {
        let c = verify_counterexample(10_000);
        let fac = c.factorization.clone().unwrap_or_default();
        let ok = c.complete() && c.verified_k_range == 10_000 && fac == "x^3 - 3x^2 + 3x - 2 = (x - 2)(x^2 - x + 1)";
        check(ok, format!("periodic, f_1 = 0 ({}), {fac}", c.dominant_witness.clone().unwrap_or_default()))
    })
}

fn criterion_4() -> Outcome {
    let l = fibonacci_chain(Mode::Replay).map_err(|e| e.to_string())?;
    let lead = value(&l, "matveev_form1_leading")?;
    check(within(lead, 1.3e14, 1.1), format!("leading constant {lead:.4e} vs 1.3e14 (10%)"))
}

fn criterion_5() -> Outcome {
    let l = fibonacci_chain(Mode::Replay).map_err(|e| e.to_string())?;
    let coef = value(&l, "ell_coefficient")?;
    let threshold = value(&l, "ell_threshold")?;
    let c2 = folded(&l, Target::Gap(2))?;
    let cabs = folded(&l, Target::Absolute)?;
    let n = l
        .stage(&Target::Absolute)
        .and_then(|s| s.resolved.as_ref())
        .and_then(|r| r.to_f64())
        .ok_or("unresolved")?;
    let ok = coef == 0.75
        && threshold == FIB_ELL_THRESHOLD as f64
        && within(c2, 7.27e14, 2.0)
        && within(cabs, 6.9e27, 2.0)
        && within(n, 3.1e35, 2.0);
    check(ok, format!("l <= {coef} n1 for n1 >= {threshold}; C_2 {c2:.3e}; C_abs {cabs:.3e}; n1 < {n:.3e}"))
}

fn criterion_6() -> Outcome {
    let r = fibonacci_chain(Mode::Replay).map_err(|e| e.to_string())?;
    let g = fibonacci_chain(Mode::Rigorous).map_err(|e| e.to_string())?;
    let ratio2 = folded(&g, Target::Gap(2))? / folded(&r, Target::Gap(2))?;
    let ratio_abs = folded(&g, Target::Absolute)? / folded(&r, Target::Absolute)?;
    let s3 = value(&r, "matveev_form2_leading_s3")?;
    let s4 = value(&r, "matveev_form2_leading_s4")?;
    let in_range = |x: f64| (0.01..=100.0).contains(&x);
    let ok = in_range(ratio2) && in_range(ratio_abs) && within(s3, 7.3e11, 1.1) && within(s4, 8e13, 1.1);
    check(ok, format!("rigorous/replay: C_2 x{ratio2:.2}, C_abs x{ratio_abs:.2}; s=3 {s3:.3e}, s=4 {s4:.3e}"))
}

fn criterion_7() -> Outcome {
    timed(Duration::from_secs(600), || {
        let l = fibonacci_chain(Mode::Replay).map_err(|e| e.to_string())?;
        let n1 = l.stage(&Target::Absolute).and_then(|s| s.resolved.clone()).ok_or("unresolved")?;
        let ell = (&n1 * 3u32 + 3u32) / 4u32;
        let s1 = reduction_stage1(&n1, &ell).map_err(|e| e.to_string())?;
        let gap = s1.bound.clone();
        let gap_used = gap.as_ref().and_then(|g| g.to_u64()).unwrap_or(230);
        let s2 = reduction_stage2(&n1, &ell, gap_used).map_err(|e| e.to_string())?;
        let describe = |b: &Option<BigInt>, f: &Option<String>| match (b, f) {
            (Some(b), _) => b.to_string(),
            (None, Some(sub)) => format!("scale cap exceeded at {sub}"),
            (None, None) => "none".into(),
        };
        let ok1 = gap.as_ref().is_some_and(|g| *g <= BigInt::from(500));
        let ok2 = s2.bound.as_ref().is_some_and(|b| *b <= BigInt::from(10u32).pow(20));
        check(
            ok1 && ok2,
            format!(
                "stage 1 n1-n2 <= {}; stage 2 (gap {gap_used}) n1 <= {}",
                describe(&gap, &s1.failure),
                describe(&s2.bound, &s2.failure)
            ),
        )
    })
}

fn criterion_8() -> Outcome {
    let mut failed = Vec::new();
    let mut passed = 0;
    for (name, suite) in suites::ALL {
        let r = timed(Duration::from_secs(30), suite);
        match &r {
            Ok(d) => {
                passed += 1;
                println!("    suite {name}: PASS ({d})");
            }
            Err(d) => {
                failed.push(*name);
                println!("    suite {name}: FAIL ({d})");
            }
        }
    }
    check(failed.is_empty(), format!("{passed}/{} suites passed{}", suites::ALL.len(), if failed.is_empty() {
        String::new()
    } else {
        format!("; failed: {}", failed.join(", "))
    }))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("1 solution list", criterion_1),
        ("2 k=1 boundary", criterion_2),
        ("3 counterexample certificate", criterion_3),
        ("4 Matveev replay constant", criterion_4),
        ("5 replay chain", criterion_5),
        ("6 rigorous recomputation", criterion_6),
        ("7 LLL campaign", criterion_7),
        ("8 property suites", criterion_8),
    ];
    let mut all = true;
    for (name, f) in criteria {
        let r = f();
        all &= r.is_ok();
        match r {
            Ok(d) => println!("criterion {name}: PASS ({d})"),
            Err(d) => println!("criterion {name}: FAIL ({d})"),
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
