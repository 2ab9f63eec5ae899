//! The Fibonacci instance `F_{n_1} + F_{n_2} = l 2^l + 1` and its replay profile.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::Result;
use crate::height::matveev_constant;
use crate::interval::Real;
use crate::poly::IntegerPolynomial;
use crate::recurrence::{BinetDecomposition, RecurrenceSpec};

use super::pipeline::{finish, make_stage, stage_from_form, FormData, PipelineContext};
use super::{BoundLedger, Certificate, Mode, ProblemInstance, StageBound, Target};

/// `l <= 0.75 n_1` for the Fibonacci instance.
pub const FIB_ELL_COEFFICIENT: (i64, i64) = (3, 4);
/// Least `n_1` for which the linear bound on `l` holds.
pub const FIB_ELL_THRESHOLD: u64 = 6;

pub fn fib_instance() -> ProblemInstance {
    ProblemInstance::new(RecurrenceSpec::fibonacci(), IntegerPolynomial::from_i64s(&[1]).expect("constant"), 2, 2)
        .expect("valid instance")
}

pub(super) fn has_replay_profile(instance: &ProblemInstance) -> bool {
    *instance == fib_instance()
}

/// From `2^l < l 2^l + 1 <= 2 alpha^{n_1 - 1}`: `l <= 1 + (n_1 - 1) c` with `c = log alpha / log 2`,
/// which is at most `0.75 n_1` once `n_1 >= (1 - c) / (0.75 - c)`.
pub(super) fn specialized_ell(instance: &ProblemInstance, decomp: &BinetDecomposition) -> Option<(Real, u64)> {
    if !has_replay_profile(instance) {
        return None;
    }
    let prec = decomp.prec();
    let c = &decomp.dominant_root().modulus.ln() / &crate::interval::ln2(prec);
    let coef = Real::from_ratio(FIB_ELL_COEFFICIENT.0, FIB_ELL_COEFFICIENT.1, prec);
    let margin = &coef - &c;
    if !margin.is_positive() {
        return None;
    }
    let threshold = (&(&Real::one(prec) - &c) / &margin).ceil_hi().to_u64()?;
    Some((coef, threshold))
}

fn two_sqrt5_plus_1(prec: u32) -> Real {
    &(&Real::from_int(5, prec).sqrt() * &Real::from_int(2, prec)) + &Real::one(prec)
}

fn lit(num: i64, den: i64, prec: u32) -> Real {
    Real::from_ratio(num, den, prec)
}

/// First form, with the published A-values; the fourth is carried as `log n_1`.
pub(super) fn replay_gap_bounds(ctx: &PipelineContext, ledger: &mut BoundLedger) -> Result<Vec<StageBound>> {
    let prec = ctx.prec;
    let mode = Mode::Replay;
    let lead = &matveev_constant(4, 2, prec) * &lit(1275, 1000, prec);
    ledger.push("matveev_form1_leading", lead, mode, "C(s=4, D=2) * 1.5 * 0.5 * 1.7");
    ledger.push("A_4_listed_stage2", lit(2, 1, prec), mode, "listed A_4 = 2 log n_1; folded as log n_1");
    let form = FormData {
        s: 4,
        a: vec![(lit(3, 2, prec), 0), (lit(1, 2, prec), 0), (lit(17, 10, prec), 0), (Real::one(prec), 1)],
        b_factor: lit(2, 1, prec),
        k_const: two_sqrt5_plus_1(prec),
        rate: Real::one(prec),
    };
    let (coef, b) = stage_from_form("stage2", &form, 2, &ctx.log_alpha, &ctx.log_n_min(), mode, ledger);
    let coef = ledger.push("C_2", coef, mode, "n_1 - n_2 <= C_2 (log n_1)^2");
    Ok(vec![make_stage(ctx, Target::Gap(2), coef, b, 0, mode)])
}

/// Second form, with `s = 3` in the constant and `A_3 = 2.1e15 (log n_1)^2`.
pub(super) fn replay_absolute_bound(ctx: &PipelineContext, ledger: &mut BoundLedger) -> Result<StageBound> {
    let prec = ctx.prec;
    let mode = Mode::Replay;
    let form = FormData {
        s: 3,
        a: vec![
            (lit(3, 2, prec), 0),
            (lit(1, 2, prec), 0),
            (Real::from_int(BigInt::from(21) * BigInt::from(10u64).pow(14), prec), 2),
            (Real::one(prec), 1),
        ],
        b_factor: lit(2, 1, prec),
        k_const: two_sqrt5_plus_1(prec),
        rate: Real::one(prec),
    };
    let (coef, b) = stage_from_form("absolute", &form, 2, &ctx.log_alpha, &ctx.log_n_min(), mode, ledger);
    let coef = ledger.push("C_absolute", coef, mode, "n_1 <= C_absolute (log n_1)^4");
    Ok(make_stage(ctx, Target::Absolute, coef, b, 0, mode))
}

/// `l 2^l sqrt(5) = alpha^{n_1}` is impossible: squaring gives `5 l^2 4^l`, a rational,
/// while `alpha^{2 n_1} = (L_{2 n_1} + F_{2 n_1} sqrt(5)) / 2` with `F_{2 n_1} != 0`.
pub fn lambda1_certificate(n1_max: usize) -> Certificate {
    let fib = RecurrenceSpec::fibonacci().eval_terms(0, 2 * n1_max.max(1));
    let verified = (1..=n1_max).all(|n| !fib[2 * n].is_zero());
    Certificate {
        name: "lambda_1_nonvanishing".into(),
        statement: format!(
            "(l 2^l sqrt5)^2 = 5 l^2 4^l is rational; alpha^(2 n1) = (L_2n1 + F_2n1 sqrt5)/2 is irrational as F_2n1 > 0 (checked n1 <= {n1_max}, and F_m > 0 for all m >= 1)"
        ),
        verified,
    }
}

/// The complete Fibonacci chain in the chosen mode.
pub fn fibonacci_chain(mode: Mode) -> Result<BoundLedger> {
    fibonacci_chain_at(mode, crate::interval::DEFAULT_PRECISION)
}

/// As [`fibonacci_chain`], with root isolation starting at `precision` bits.
pub fn fibonacci_chain_at(mode: Mode, precision: u32) -> Result<BoundLedger> {
    let mut ledger = BoundLedger::default();
    let instance = fib_instance();
    let ctx = PipelineContext::new(&instance, mode, precision, &mut ledger)?;
    ledger.certificates.push(lambda1_certificate(1000));
    ledger.certificates.push(Certificate {
        name: "equal_indices_excluded".into(),
        statement: "2 F_n1 is even while l 2^l + 1 is odd for l >= 1; l = 0 gives 2 F_n1 = 1".into(),
        verified: true,
    });
    let prec = ctx.prec;
    let half_three = Real::from_ratio(3, 4, prec);
    ledger.push(
        "matveev_form2_leading_s3",
        &matveev_constant(3, 2, prec) * &half_three,
        mode,
        "C(s=3, D=2) * 1.5 * 0.5",
    );
    ledger.push(
        "matveev_form2_leading_s4",
        &matveev_constant(4, 2, prec) * &half_three,
        mode,
        "C(s=4, D=2) * 1.5 * 0.5; four gammas enter the second form",
    );
    finish(&ctx, mode, &mut ledger)?;
    Ok(ledger)
}
