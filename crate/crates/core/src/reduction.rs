//! Inhomogeneous Baker–Davenport reduction via LLL (de Weger's method).

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::Real;
use crate::lattice::{default_delta, distance_lower_bound, lll_reduce, IntegerLattice};

/// Scale increases tried after the initial one.
pub const MAX_RETRIES: u32 = 10;

/// `Lambda' = sum_j b_j theta_j + beta` with `|b_j| <= X_j`; the last variable is the one eliminated.
#[derive(Clone, Debug)]
pub struct ReductionProblem {
    pub thetas: Vec<Real>,
    pub bounds: Vec<BigInt>,
    pub beta: Real,
    /// `(K, rho)` with `|Lambda'| <= K rho^{-T}`; turns the lower bound into a bound on `T`.
    pub decay: Option<(Real, Real)>,
    /// First scale `C`; defaults to `100 prod X_j`.
    pub initial_scale: Option<BigInt>,
}

#[derive(Clone, Debug)]
pub struct ReductionOutcome {
    pub success: bool,
    pub scale_used: BigInt,
    pub attempts: u32,
    /// Lower bound for `|Lambda'|` over the box.
    pub lambda_lower: Option<Real>,
    pub new_bound: Option<BigInt>,
}

impl ReductionOutcome {
    pub fn into_result(self, subproblem: impl Into<String>) -> Result<Self> {
        if self.success {
            Ok(self)
        } else {
            Err(Error::ScaleCapExceeded { subproblem: subproblem.into() })
        }
    }
}

impl ReductionProblem {
    pub fn default_scale(&self) -> BigInt {
        self.bounds.iter().fold(BigInt::from(100), |acc, x| acc * x.max(&BigInt::one()))
    }
}

fn lower_bound_at(problem: &ReductionProblem, c: &BigInt) -> Result<Option<Real>> {
    let m = problem.thetas.len();
    let prec = problem.thetas.iter().map(Real::prec).chain([problem.beta.prec()]).max().unwrap_or(256);
    let cr = Real::from_int(c.clone(), prec);
    let trunc = |v: &Real| -> (BigInt, Real) {
        let cv = &cr * v;
        let t = cv.floor_lo();
        let err = Real::point(cv.hi().clone(), prec) - Real::from_int(t.clone(), prec);
        (t, err)
    };
    let mut t = Vec::with_capacity(m);
    let mut tail = Real::zero(prec);
    for (theta, x) in problem.thetas.iter().zip(&problem.bounds) {
        let (tj, ej) = trunc(theta);
        tail = &tail + &(&Real::from_int(x.clone(), prec) * &ej);
        t.push(tj);
    }
    let (tb, eb) = trunc(&problem.beta);
    tail = &tail + &eb;
    if t[m - 1].is_zero() {
        return Ok(None);
    }
    let mut basis = Vec::with_capacity(m);
    for j in 0..m {
        let mut v = vec![BigInt::zero(); m];
        if j < m - 1 {
            v[j] = BigInt::one();
        }
        v[m - 1] = t[j].clone();
        basis.push(v);
    }
    let lattice = IntegerLattice::new(basis)?;
    let reduced = lll_reduce(&lattice, &default_delta())?;
    let mut y = vec![BigInt::zero(); m];
    y[m - 1] = -tb;
    let l = distance_lower_bound(&reduced, &y, prec);
    let s: BigInt = problem.bounds[..m - 1].iter().map(|x| x * x).sum();
    let slack = &l.sqr() - &Real::from_int(s, prec);
    if !slack.is_positive() {
        return Ok(None);
    }
    let gap = &slack.sqrt() - &tail;
    if !gap.is_positive() {
        return Ok(None);
    }
    let lambda = &gap / &cr;
    Ok(Some(Real::new(lambda.lo().clone(), lambda.lo().clone(), prec)))
}

/// Runs the reduction, multiplying the scale by 10 after each failed attempt.
pub fn reduce_inhomogeneous(problem: &ReductionProblem) -> Result<ReductionOutcome> {
    let m = problem.thetas.len();
    if m == 0 || problem.bounds.len() != m {
        return Err(Error::InvalidInput("one bound per coefficient is required".into()));
    }
    let mut c = problem.initial_scale.clone().unwrap_or_else(|| problem.default_scale());
    for attempt in 0..=MAX_RETRIES {
        if let Some(lambda) = lower_bound_at(problem, &c)? {
            let new_bound = problem.decay.as_ref().map(|(k, rho)| {
                let t = &(k / &lambda).ln() / &rho.ln();
                t.ceil_hi().max(BigInt::zero())
            });
            return Ok(ReductionOutcome {
                success: true,
                scale_used: c,
                attempts: attempt + 1,
                lambda_lower: Some(lambda),
                new_bound,
            });
        }
        if attempt < MAX_RETRIES {
            c *= 10u32;
        }
    }
    Ok(ReductionOutcome { success: false, scale_used: c, attempts: MAX_RETRIES + 1, lambda_lower: None, new_bound: None })
}

/// One row of a campaign report.
#[derive(Clone, Debug, Serialize)]
pub struct SubproblemReport {
    pub stage: u8,
    pub subproblem: String,
    #[serde(rename = "C_used")]
    pub c_used: String,
    pub lambda_lower: Option<f64>,
    pub new_bound: Option<String>,
    pub success: bool,
}

/// Result of one campaign stage; `failure` names the first subproblem that could not be reduced.
#[derive(Clone, Debug)]
pub struct StageOutcome {
    pub stage: u8,
    pub rows: Vec<SubproblemReport>,
    pub bound: Option<BigInt>,
    pub failure: Option<String>,
}

impl StageOutcome {
    pub fn into_bound(self) -> Result<BigInt> {
        match (self.failure, self.bound) {
            (Some(subproblem), _) => Err(Error::ScaleCapExceeded { subproblem }),
            (None, Some(b)) => Ok(b),
            (None, None) => Err(Error::InvalidInput("no subproblems".into())),
        }
    }

    pub fn report_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.rows).expect("serializable rows")
    }
}

/// Dyadic blocks `[2^j, 2^{j+1} - 1]` covering `start..=ell_max`; the first block starts at `start`.
pub fn dyadic_ell_intervals(start: &BigInt, ell_max: &BigInt) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::new();
    let mut lo = start.clone().max(BigInt::one());
    while &lo <= ell_max {
        let next = BigInt::one() << (lo.bits() as usize);
        let hi = (&next - 1u32).min(ell_max.clone());
        out.push((lo, hi));
        lo = next;
    }
    out
}

/// One subproblem of the Fibonacci campaign: `l` in `[lo, hi]` and, in the second stage, the gap `d`.
#[derive(Clone, Debug)]
struct Sub {
    lo: BigInt,
    hi: BigInt,
    d: Option<u64>,
}

impl Sub {
    fn label(&self) -> String {
        match self.d {
            Some(d) => format!("d={d},ell=[{},{}]", self.lo, self.hi),
            None => format!("ell=[{},{}]", self.lo, self.hi),
        }
    }
}

/// Shared data of the Fibonacci campaign.
struct FibForm {
    n1_max: BigInt,
    ell_max: BigInt,
    sqrt5: Real,
    alpha: Real,
    log2: Real,
    log_alpha: Real,
    /// `2 (2 sqrt5 + 1)`: `|Lambda| <= (2 sqrt5 + 1) alpha^-T` and `|log(1 + z)| <= 2|z|` for `|z| <= 1/2`.
    k: Real,
    prec: u32,
}

impl FibForm {
    fn new(n1_max: &BigInt, ell_max: &BigInt) -> Self {
        let prec = (n1_max.bits() + ell_max.bits()) as u32 + 7 + 34 + 192;
        let sqrt5 = Real::from_int(5, prec).sqrt();
        let alpha = (&Real::one(prec) + &sqrt5).mul_pow2(-1);
        let k = (&(&sqrt5 * &Real::from_int(2, prec)) + &Real::one(prec)).mul_pow2(1);
        FibForm {
            n1_max: n1_max.clone(),
            ell_max: ell_max.clone(),
            log2: crate::interval::ln2(prec),
            log_alpha: alpha.ln(),
            sqrt5,
            alpha,
            k,
            prec,
        }
    }

    /// Least `T` beyond which `|Lambda| < 1/2` is guaranteed.
    fn floor(&self) -> BigInt {
        (&self.k.ln() / &self.log_alpha).ceil_hi()
    }

    fn problem(&self, sub: &Sub) -> ReductionProblem {
        let p = self.prec;
        let shift = match sub.d {
            Some(d) => &Real::one(p) + &self.alpha.powi(d as u32).recip(),
            None => Real::one(p),
        };
        let at = |l: &BigInt| (&(&self.sqrt5 * &Real::from_int(l.clone(), p)) / &shift).ln();
        ReductionProblem {
            thetas: vec![self.log2.clone(), -&self.log_alpha],
            bounds: vec![self.ell_max.clone(), self.n1_max.clone()],
            beta: at(&sub.lo).hull(&at(&sub.hi)),
            decay: Some((self.k.clone(), self.alpha.clone())),
            initial_scale: None,
        }
    }
}

fn run_stage(stage: u8, form: &FibForm, subs: Vec<Sub>) -> Result<StageOutcome> {
    let chunk = (rayon::current_num_threads() * 4).max(8);
    let mut rows = Vec::with_capacity(subs.len());
    let mut bound = form.floor();
    for group in subs.chunks(chunk) {
        let results: Vec<Result<ReductionOutcome>> =
            group.par_iter().map(|s| reduce_inhomogeneous(&form.problem(s))).collect();
        let mut failure = None;
        for (s, r) in group.iter().zip(results) {
            let r = r?;
            if let Some(b) = &r.new_bound {
                bound = bound.max(b.clone());
            }
            if !r.success && failure.is_none() {
                failure = Some(s.label());
            }
            rows.push(SubproblemReport {
                stage,
                subproblem: s.label(),
                c_used: r.scale_used.to_string(),
                lambda_lower: r.lambda_lower.as_ref().map(|l| l.lo_f64()),
                new_bound: r.new_bound.as_ref().map(ToString::to_string),
                success: r.success,
            });
        }
        if failure.is_some() {
            return Ok(StageOutcome { stage, rows, bound: None, failure });
        }
    }
    Ok(StageOutcome { stage, rows, bound: Some(bound), failure: None })
}

/// First reduction for `F_{n_1} + F_{n_2} = l 2^l + 1`: bounds `n_1 - n_2` from
/// `Lambda' = l log 2 - n_1 log alpha + log(sqrt5 l)`, one subproblem per dyadic block of `l >= 2`.
pub fn reduction_stage1(n1_max: &BigInt, ell_max: &BigInt) -> Result<StageOutcome> {
    let form = FibForm::new(n1_max, ell_max);
    let subs = dyadic_ell_intervals(&BigInt::from(2), ell_max)
        .into_iter()
        .map(|(lo, hi)| Sub { lo, hi, d: None })
        .collect();
    run_stage(1, &form, subs)
}

/// Second reduction: for each gap `d = n_1 - n_2 <= gap`, bounds `n_1` from
/// `Lambda' = l log 2 - n_1 log alpha + log(sqrt5 l / (1 + alpha^-d))`.
pub fn reduction_stage2(n1_max: &BigInt, ell_max: &BigInt, gap: u64) -> Result<StageOutcome> {
    let form = FibForm::new(n1_max, ell_max);
    let blocks = dyadic_ell_intervals(&BigInt::from(2), ell_max);
    let subs = (1..=gap)
        .flat_map(|d| blocks.iter().map(move |(lo, hi)| Sub { lo: lo.clone(), hi: hi.clone(), d: Some(d) }))
        .collect();
    run_stage(2, &form, subs)
}

/// Both stages: returns the reduced bounds on `n_1 - n_2` and on `n_1`.
pub fn fibonacci_reduction_campaign(n1_max: &BigInt, ell_max: &BigInt) -> Result<(BigInt, BigInt)> {
    let gap = reduction_stage1(n1_max, ell_max)?.into_bound()?;
    let gap = gap.to_u64().ok_or(Error::Divergence)?;
    let n1 = reduction_stage2(n1_max, ell_max, gap)?.into_bound()?;
    Ok((BigInt::from(gap), n1))
}

/// `Lambda'` at an integer point, for checking reduction output.
pub fn evaluate_form(problem: &ReductionProblem, point: &[BigInt]) -> Real {
    let prec = problem.beta.prec();
    problem
        .thetas
        .iter()
        .zip(point)
        .fold(problem.beta.clone(), |acc, (t, b)| &acc + &(t * &Real::from_int(b.clone(), prec)))
}

/// `true` when `|b_j| <= X_j` for every coordinate.
pub fn in_box(problem: &ReductionProblem, point: &[BigInt]) -> bool {
    point.iter().zip(&problem.bounds).all(|(b, x)| b.abs() <= *x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> ReductionProblem {
        let p = 256;
        ReductionProblem {
            thetas: vec![crate::interval::ln2(p)],
            bounds: vec![BigInt::from(10)],
            beta: Real::from_ratio(1, 10, p),
            decay: None,
            initial_scale: None,
        }
    }

    #[test]
    fn one_variable_toy() {
        let out = reduce_inhomogeneous(&toy()).unwrap();
        assert!(out.success);
        let l = out.lambda_lower.unwrap().lo_f64();
        assert!(l > 0.0 && l <= 0.1, "{l}");
        let p = toy();
        for b in -10..=10 {
            let v = evaluate_form(&p, &[BigInt::from(b)]).abs();
            assert!(v.lo_f64() >= l);
        }
    }

    #[test]
    fn degenerate_beta_zero() {
        let p = 256;
        let prob = ReductionProblem {
            thetas: vec![crate::interval::ln2(p), Real::from_int(3, p).ln()],
            bounds: vec![BigInt::from(100), BigInt::from(100)],
            beta: Real::zero(p),
            decay: None,
            initial_scale: None,
        };
        let out = reduce_inhomogeneous(&prob).unwrap();
        assert!(!out.success);
        assert_eq!(out.attempts, MAX_RETRIES + 1);
        assert!(matches!(out.into_result("toy"), Err(Error::ScaleCapExceeded { .. })));
    }

    #[test]
    fn two_variable_bound_holds() {
        let p = 256;
        let prob = ReductionProblem {
            thetas: vec![crate::interval::ln2(p), -Real::from_int(3, p).ln()],
            bounds: vec![BigInt::from(40), BigInt::from(40)],
            beta: Real::from_int(5, p).ln(),
            decay: Some((Real::one(p), Real::from_int(2, p))),
            initial_scale: None,
        };
        let out = reduce_inhomogeneous(&prob).unwrap();
        assert!(out.success);
        let l = out.lambda_lower.unwrap().lo_f64();
        let mut min = f64::MAX;
        for a in -40..=40 {
            for b in -40..=40 {
                let v = evaluate_form(&prob, &[BigInt::from(a), BigInt::from(b)]).abs();
                min = min.min(v.lo_f64());
            }
        }
        assert!(l > 0.0 && l <= min, "{l} {min}");
        assert!(out.new_bound.is_some());
    }

    #[test]
    fn blocks_cover_range() {
        let b = dyadic_ell_intervals(&BigInt::from(2), &BigInt::from(10));
        let want: Vec<(BigInt, BigInt)> =
            [(2, 3), (4, 7), (8, 10)].iter().map(|&(a, b)| (BigInt::from(a), BigInt::from(b))).collect();
        assert_eq!(b, want);
    }
}
