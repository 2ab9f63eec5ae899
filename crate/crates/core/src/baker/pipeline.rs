use crate::error::{Error, Result};
use crate::height::{log_height, matveev_constant, matveev_floor, AlgebraicNumberRef};
use crate::interval::{Dyadic, Real};
use crate::interval::DEFAULT_PRECISION;
use crate::recurrence::{check_hypotheses, classify_dominance, decompose_from, growth_constant, BinetDecomposition};

use super::{
    absorb, ell_upper_bound, fib, kappa_thresholds, resolve_fixpoint, BoundLedger, EllBound, KappaThresholds,
    Mode, ProblemInstance, StageBound, Target,
};

/// Constants shared by every stage of one instance.
#[derive(Clone, Debug)]
pub struct PipelineContext {
    pub instance: ProblemInstance,
    pub decomp: BinetDecomposition,
    pub kappa: KappaThresholds,
    pub n_min: u64,
    pub ell: EllBound,
    /// Degree of `Q(alpha_1)`.
    pub d: u32,
    pub log_alpha: Real,
    pub log_x: Real,
    pub f1: Real,
    pub h_alpha: Real,
    pub h_f1: Real,
    pub c1: Real,
    pub c3: Real,
    pub q: Real,
    /// Decay rate of the upper bounds, in units of `log alpha_1`.
    pub rate: Real,
    pub prec: u32,
}

impl PipelineContext {
    /// Builds the context, starting root isolation at `precision` bits.
    pub fn new(instance: &ProblemInstance, mode: Mode, precision: u32, ledger: &mut BoundLedger) -> Result<Self> {
        let report = check_hypotheses(&instance.spec);
        if !report.all_hold() {
            return Err(Error::Hypothesis(format!("failed: {}", report.failures().join(", "))));
        }
        let decomp = decompose_from(&instance.spec, precision)?;
        let prec = decomp.prec();
        let alpha = decomp.dominant_root();
        let f1 = decomp.dominant_coefficient().re.clone();
        if !f1.is_positive() {
            return Err(Error::Hypothesis("dominant coefficient f_1 must be positive".into()));
        }
        let kappa = kappa_thresholds(&decomp, instance.k)?;
        let n_min = kappa.n_min();
        let alpha_val = alpha.real_enclosure().ok_or(Error::NoDominantRoot)?;
        ledger.push("alpha_1", alpha_val, mode, "dominant root of the characteristic polynomial");
        let log_alpha = ledger.push("log_alpha_1", alpha.modulus.ln(), mode, "log alpha_1");
        let f1 = ledger.push("f_1", f1, mode, "M(alpha_1) / f'(alpha_1)");
        for (i, v) in kappa.values.iter().enumerate() {
            let how = if i == 0 {
                "max_m log|f_m / f_1| / log(alpha_1 / |alpha_m|)"
            } else {
                "max_m log(i |f_m / f_1|) / log(alpha_1 / max(1, |alpha_m|))"
            };
            ledger.push(format!("kappa_{}", i + 1), v.clone(), mode, how);
        }
        ledger.push("kappa", kappa.max_kappa.clone(), mode, "max_i kappa_i");
        ledger.push("n_min", Real::from_int(n_min, prec), mode, "floor(max(kappa, 6)) + 1");
        let c1 = ledger.push("c_1", growth_constant(&decomp), mode, "sum_i |f_i|, so |U_n| <= c_1 alpha_1^n");
        let c3 = decomp
            .coefficients
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != decomp.dominant_index)
            .fold(Real::zero(prec), |acc, (_, f)| &acc + &f.abs());
        let c3 = ledger.push("c_3", c3, mode, "sum_{m >= 2} |f_m|");
        let q = Real::from_int(instance.q_value().magnitude().clone(), prec);
        let q = ledger.push("q", q, mode, "|Q(x)|");
        let ell = ell_upper_bound(instance, &decomp, n_min, mode, ledger);
        let dom = classify_dominance(&decomp);
        let delta = dom.delta.ok_or(Error::NoDominantRoot)?;
        if let Some(raw) = &dom.delta_raw {
            ledger.push("delta_raw", raw.clone(), mode, "1 - log|alpha_2| / log alpha_1");
        }
        ledger.push("delta", delta.clone(), mode, "min(delta_raw, 1 - 2^-10)");
        let second_small = decomp.roots.get(1).is_none_or(|r| r.modulus.hi() <= &Dyadic::one());
        let rate = if second_small { Real::one(prec) } else { delta };
        let rate = ledger.push("rate", rate, mode, "1 if |alpha_2| <= 1, else delta");
        let d = instance.spec.order() as u32;
        ledger.push("D", Real::from_int(d, prec), mode, "[Q(alpha_1) : Q]");
        let alpha_ref = AlgebraicNumberRef::from_minpoly(decomp.char_poly.clone(), &alpha.enclosure())?;
        let h_alpha = ledger.push("h_alpha_1", log_height(&alpha_ref)?, mode, "absolute logarithmic height");
        let f1_ref = AlgebraicNumberRef::from_field_element(
            &decomp.char_poly,
            alpha,
            &decomp.dominant_coefficient_element(),
        )?;
        let h_f1 = ledger.push("h_f_1", log_height(&f1_ref)?, mode, "height of f_1 from its minimal polynomial");
        let log_x = Real::from_int(instance.x.clone(), prec).ln();
        Ok(PipelineContext {
            instance: instance.clone(),
            decomp,
            kappa,
            n_min,
            ell,
            d,
            log_alpha,
            log_x,
            f1,
            h_alpha,
            h_f1,
            c1,
            c3,
            q,
            rate,
            prec,
        })
    }

    pub fn log_n_min(&self) -> Real {
        Real::from_int(self.n_min, self.prec).ln()
    }

    /// `c` in `l <= c n_1`: the specialized coefficient when it applies at `n_min`, else `c_8`.
    pub fn ell_coefficient(&self) -> Real {
        match &self.ell.specialized {
            Some((c, threshold)) if self.n_min >= *threshold => c.clone(),
            _ => self.ell.c8.clone(),
        }
    }

    /// `beta_B` with `1 + log B <= beta_B log n_1`, for `B = max(n_1, l)`.
    pub fn b_factor(&self) -> Real {
        let one = Real::one(self.prec);
        &one + &(&(&one + &self.ell_coefficient().log_plus()) / &self.log_n_min())
    }
}

/// A Matveev application whose `A_j` are each `coef * (log n_1)^e`.
pub(super) struct FormData {
    pub s: u32,
    pub a: Vec<(Real, u32)>,
    /// `(beta_B, 1)` with `1 + log B <= beta_B log n_1`.
    pub b_factor: Real,
    /// `K` with `|Lambda| <= K alpha_1^{-rate T}`.
    pub k_const: Real,
    pub rate: Real,
}

/// Bound `T <= coefficient (log n_1)^b` from `L <= log|Lambda| <= log K - rate T log alpha_1`.
pub(super) fn stage_from_form(
    tag: &str,
    form: &FormData,
    ctx_d: u32,
    log_alpha: &Real,
    log_n_floor: &Real,
    mode: Mode,
    ledger: &mut BoundLedger,
) -> (Real, u32) {
    let prec = log_alpha.prec();
    for (j, (c, e)) in form.a.iter().enumerate() {
        let how = match e {
            0 => "constant".to_string(),
            1 => "coefficient of log n_1".to_string(),
            e => format!("coefficient of (log n_1)^{e}"),
        };
        ledger.push(format!("A_{}_{tag}", j + 1), c.clone(), mode, how);
    }
    let c = matveev_constant(form.s, ctx_d, prec);
    let c = ledger.push(
        format!("matveev_C_{tag}"),
        c,
        mode,
        format!("1.4 30^(s+3) s^4.5 D^2 (1 + log D) with s = {}, D = {ctx_d}", form.s),
    );
    let prod = form.a.iter().fold(Real::one(prec), |acc, (x, _)| &acc * x);
    let b = 1 + form.a.iter().map(|(_, e)| e).sum::<u32>();
    let lead = &(&c * &prod) * &form.b_factor;
    let lead = ledger.push(format!("matveev_L_{tag}"), lead, mode, "-log|Lambda| <= L (log n_1)^b");
    let k = ledger.push(format!("K_{tag}"), form.k_const.clone(), mode, "|Lambda| <= K alpha_1^(-rate T)");
    let num = &lead + &absorb(&k.log_plus(), log_n_floor, b);
    let coef = &num / &(&form.rate * log_alpha);
    (coef, b)
}

fn a_const(d: u32, h: &Real, log_abs: &Real, prec: u32) -> Real {
    (&Real::from_int(d, prec) * h).max(log_abs).max(&matveev_floor(prec))
}

/// `A` values and `K` for the form bounding stage `i` (`i = k + 1` is the absolute stage).
fn rigorous_form(ctx: &PipelineContext, i: usize, prev: Option<&StageBound>) -> FormData {
    let prec = ctx.prec;
    let k = ctx.instance.k;
    let d = Real::from_int(ctx.d, prec);
    let terms = (i - 1) as i64;
    let log_terms = Real::from_int(terms, prec).ln();
    let log_f1 = ctx.f1.ln().abs();
    // gamma_a = f_1^{-1} S^{-1}
    let a0 = a_const(ctx.d, &(&ctx.h_f1 + &log_terms), &(&log_f1 + &log_terms), prec);
    let (a_a, e_a) = match prev {
        Some(g) if i > 2 => {
            let e = g.b;
            let growth = &(&(&d * &ctx.h_alpha) * &Real::from_int(terms - 1, prec)) * &g.folded;
            (&absorb(&a0, &ctx.log_n_min(), e) + &growth, e)
        }
        _ => (a0, 0),
    };
    let a_b = a_const(ctx.d, &ctx.h_alpha, &ctx.log_alpha, prec);
    let a_c = a_const(ctx.d, &ctx.log_x, &ctx.log_x, prec);
    let ell_c = ctx.ell_coefficient().log_plus();
    let a_d = &d * &(&Real::one(prec) + &absorb(&ell_c, &ctx.log_n_min(), 1));
    let small = if i <= k { (k - i + 1) as i64 } else { 0 };
    let k_num = &(&(&ctx.c1 * &Real::from_int(small, prec)) + &(&ctx.c3 * &Real::from_int(terms, prec))) + &ctx.q;
    FormData {
        s: 4,
        a: vec![(a_a, e_a), (a_b, 0), (a_c, 0), (a_d, 1)],
        b_factor: ctx.b_factor(),
        k_const: &k_num / &ctx.f1,
        rate: ctx.rate.clone(),
    }
}

pub(super) fn make_stage(ctx: &PipelineContext, target: Target, folded: Real, b: u32, a: u32, mode: Mode) -> StageBound {
    let coefficient = &folded / &ctx.log_x.powi(a);
    StageBound { target, coefficient, a, b, folded, resolved: None, mode }
}

/// Bounds on `n_1 - n_i` for `i = 2..=k`, each in terms of `log n_1`.
pub fn gap_bounds(ctx: &PipelineContext, mode: Mode, ledger: &mut BoundLedger) -> Result<Vec<StageBound>> {
    if mode == Mode::Replay {
        return fib::replay_gap_bounds(ctx, ledger);
    }
    let mut out: Vec<StageBound> = Vec::new();
    for i in 2..=ctx.instance.k {
        let form = rigorous_form(ctx, i, out.last());
        let tag = format!("stage{i}");
        let (coef, b) = stage_from_form(&tag, &form, ctx.d, &ctx.log_alpha, &ctx.log_n_min(), mode, ledger);
        let coef = ledger.push(format!("C_{i}"), coef, mode, format!("n_1 - n_{i} <= C_{i} (log n_1)^{b}"));
        out.push(make_stage(ctx, Target::Gap(i), coef, b, (i - 1) as u32, mode));
    }
    Ok(out)
}

/// Bound on `n_1` in terms of `log n_1`, from the form with all `k` terms.
pub fn absolute_bound(
    ctx: &PipelineContext,
    gaps: &[StageBound],
    mode: Mode,
    ledger: &mut BoundLedger,
) -> Result<StageBound> {
    if mode == Mode::Replay {
        return fib::replay_absolute_bound(ctx, ledger);
    }
    let k = ctx.instance.k;
    let form = rigorous_form(ctx, k + 1, gaps.last());
    let (coef, b) = stage_from_form("absolute", &form, ctx.d, &ctx.log_alpha, &ctx.log_n_min(), mode, ledger);
    let coef = ledger.push("C_absolute", coef, mode, format!("n_1 <= C_absolute (log n_1)^{b}"));
    Ok(make_stage(ctx, Target::Absolute, coef, b, k as u32, mode))
}

/// Full chain for one instance: hypotheses, thresholds, gap bounds, absolute bound, resolution.
pub fn run_pipeline(instance: &ProblemInstance, mode: Mode) -> Result<BoundLedger> {
    run_pipeline_at(instance, mode, DEFAULT_PRECISION)
}

/// As [`run_pipeline`], with root isolation starting at `precision` bits.
pub fn run_pipeline_at(instance: &ProblemInstance, mode: Mode, precision: u32) -> Result<BoundLedger> {
    let mut ledger = BoundLedger::default();
    if mode == Mode::Replay && !fib::has_replay_profile(instance) {
        return Err(Error::MissingAValues);
    }
    let ctx = PipelineContext::new(instance, mode, precision, &mut ledger)?;
    finish(&ctx, mode, &mut ledger)?;
    Ok(ledger)
}

pub(super) fn finish(ctx: &PipelineContext, mode: Mode, ledger: &mut BoundLedger) -> Result<()> {
    let gaps = gap_bounds(ctx, mode, ledger)?;
    let mut abs = absolute_bound(ctx, &gaps, mode, ledger)?;
    let n_star = resolve_fixpoint(&abs.folded, abs.b)?;
    let n_star = n_star.max(num_bigint::BigInt::from(ctx.n_min));
    ledger.push(
        "n1_resolved",
        Real::from_int(n_star.clone(), ctx.prec),
        mode,
        "least N with N > C_absolute (log N)^b",
    );
    abs.resolved = Some(n_star.clone());
    let log_n = Real::from_int(n_star.clone(), ctx.prec).ln();
    let mut gaps = gaps;
    for g in &mut gaps {
        let at = (&g.folded * &log_n.powi(g.b)).ceil_hi();
        ledger.push(
            format!("{}_at_resolved", g.target.label()),
            Real::from_int(at.clone(), ctx.prec),
            mode,
            "gap coefficient times (log N)^b",
        );
        g.resolved = Some(at);
    }
    ledger.stage_bounds.extend(gaps);
    ledger.stage_bounds.push(abs);
    Ok(())
}
