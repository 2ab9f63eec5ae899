//! Effective bounds via linear forms in logarithms.
//!
//! All bounds are carried as `coefficient * (log n_1)^b` for a fixed instance;
//! [`StageBound`] also records the equivalent `(log x)^a (log n_1)^b` shape.

mod fib;
mod pipeline;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Dyadic, Real, Round};
use crate::poly::IntegerPolynomial;
use crate::recurrence::{BinetDecomposition, RecurrenceSpec};

pub use fib::{fib_instance, lambda1_certificate, fibonacci_chain, fibonacci_chain_at, FIB_ELL_COEFFICIENT, FIB_ELL_THRESHOLD};
pub use pipeline::{absolute_bound, gap_bounds, run_pipeline, run_pipeline_at, PipelineContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Replay,
    Rigorous,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Replay => "replay",
            Mode::Rigorous => "rigorous",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "replay" => Ok(Mode::Replay),
            "rigorous" => Ok(Mode::Rigorous),
            other => Err(Error::InvalidInput(format!("mode: expected replay or rigorous, got {other:?}"))),
        }
    }
}

/// `U_{n_1} + ... + U_{n_k} = l * x^l + Q(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    pub spec: RecurrenceSpec,
    pub q: IntegerPolynomial,
    pub x: BigInt,
    pub k: usize,
}

impl ProblemInstance {
    pub fn new(spec: RecurrenceSpec, q: IntegerPolynomial, x: impl Into<BigInt>, k: usize) -> Result<Self> {
        let x = x.into();
        if x < BigInt::from(2) {
            return Err(Error::InvalidInput(format!("x: must be at least 2, got {x}")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("k: must be at least 1".into()));
        }
        Ok(ProblemInstance { spec, q, x, k })
    }

    /// `Q(x)`.
    pub fn q_value(&self) -> BigInt {
        self.q.eval_int(&self.x)
    }
}

/// Thresholds above which the linear forms `Lambda_i` cannot vanish.
#[derive(Clone, Debug)]
pub struct KappaThresholds {
    pub values: Vec<Real>,
    pub max_kappa: Real,
}

impl KappaThresholds {
    /// Smallest `n_1` handled analytically: `floor(max(kappa, 6)) + 1`.
    pub fn n_min(&self) -> u64 {
        let k = self.max_kappa.hi().ceil().to_u64().unwrap_or(u64::MAX);
        k.max(6) + 1
    }
}

/// For `1 <= i <= k`, the largest `n_1` at which `Lambda_i` may vanish.
pub fn kappa_thresholds(decomp: &BinetDecomposition, k: usize) -> Result<KappaThresholds> {
    if decomp.degenerate || decomp.dominant_coefficient().contains_zero() {
        return Err(Error::DegenerateDominantCoefficient);
    }
    let prec = decomp.prec();
    let a1 = decomp.dominant_root();
    let one = Real::one(prec);
    if !a1.is_real || !a1.modulus.gt(&one) {
        return Err(Error::NoDominantRoot);
    }
    let log_a1 = a1.modulus.ln();
    let f1 = decomp.dominant_coefficient().abs();
    let others: Vec<(Real, Real)> = decomp
        .roots
        .iter()
        .zip(&decomp.coefficients)
        .enumerate()
        .filter(|(i, _)| *i != decomp.dominant_index)
        .map(|(_, (r, f))| (r.modulus.clone(), f.abs()))
        .collect();
    if others.is_empty() {
        return Err(Error::Hypothesis("dominant root must not be rational".into()));
    }
    let mut values = Vec::with_capacity(k);
    for i in 1..=k {
        let mut best = Real::zero(prec);
        for (modulus, fm) in &others {
            let ratio = &fm.max(&Real::from_ratio(1, 1 << 30, prec)) / &f1;
            let v = if i == 1 {
                &ratio.ln() / &(&log_a1 - &modulus.ln())
            } else {
                let num = (&ratio * &Real::from_int(i as i64, prec)).ln();
                let small = &num / &log_a1;
                let large = if modulus.hi() > &Dyadic::one() {
                    let lm = modulus.max_one().ln();
                    Some(&num / &(&log_a1 - &lm))
                } else {
                    None
                };
                if modulus.hi() <= &Dyadic::one() {
                    small
                } else if modulus.lo() > &Dyadic::one() {
                    large.expect("modulus above one")
                } else {
                    small.max(&large.expect("modulus above one"))
                }
            };
            best = best.max(&v);
        }
        values.push(best);
    }
    let max_kappa = values.iter().fold(Real::zero(prec), |acc, v| acc.max(v));
    Ok(KappaThresholds { values, max_kappa })
}

/// One named constant in a bound derivation.
#[derive(Clone, Debug)]
pub struct LedgerEntry {
    pub name: String,
    pub value: Real,
    pub mode: Mode,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum Target {
    Ell,
    /// Bound on `n_1 - n_i`.
    Gap(usize),
    Absolute,
}

impl Target {
    pub fn label(&self) -> String {
        match self {
            Target::Ell => "ell".into(),
            Target::Gap(i) => format!("gap_{i}"),
            Target::Absolute => "absolute".into(),
        }
    }
}

/// `target <= coefficient * (log x)^a * (log n_1)^b`; `folded` is `coefficient * (log x)^a`.
#[derive(Clone, Debug)]
pub struct StageBound {
    pub target: Target,
    pub coefficient: Real,
    pub a: u32,
    pub b: u32,
    pub folded: Real,
    pub resolved: Option<BigInt>,
    pub mode: Mode,
}

/// Symbolic facts used by the derivation.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub name: String,
    pub statement: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Default)]
pub struct BoundLedger {
    pub entries: Vec<LedgerEntry>,
    pub stage_bounds: Vec<StageBound>,
    pub certificates: Vec<Certificate>,
}

#[derive(Serialize)]
struct EntryJson<'a> {
    name: &'a str,
    value_lo: f64,
    value_hi: f64,
    mode: Mode,
    provenance: &'a str,
}

impl BoundLedger {
    pub fn push(&mut self, name: impl Into<String>, value: Real, mode: Mode, provenance: impl Into<String>) -> Real {
        let name = name.into();
        debug_assert!(self.get(&name).is_none(), "duplicate ledger entry {name}");
        self.entries.push(LedgerEntry { name, value: value.clone(), mode, provenance: provenance.into() });
        value
    }

    pub fn get(&self, name: &str) -> Option<&LedgerEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn value(&self, name: &str) -> Option<&Real> {
        self.get(name).map(|e| &e.value)
    }

    pub fn stage(&self, target: &Target) -> Option<&StageBound> {
        self.stage_bounds.iter().find(|s| &s.target == target)
    }

    /// JSON array of `{name, value_lo, value_hi, mode, provenance}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<EntryJson> = self
            .entries
            .iter()
            .map(|e| EntryJson {
                name: &e.name,
                value_lo: e.value.lo().to_f64(Round::Down),
                value_hi: e.value.hi().to_f64(Round::Up),
                mode: e.mode,
                provenance: &e.provenance,
            })
            .collect();
        serde_json::to_value(rows).expect("serializable")
    }

    /// Stage bounds and certificates, for reports.
    pub fn summary_json(&self) -> serde_json::Value {
        let stages: Vec<serde_json::Value> = self
            .stage_bounds
            .iter()
            .map(|s| {
                serde_json::json!({
                    "target": s.target.label(),
                    "mode": s.mode,
                    "coefficient_lo": s.coefficient.lo().to_f64(Round::Down),
                    "coefficient_hi": s.coefficient.hi().to_f64(Round::Up),
                    "log_x_exponent": s.a,
                    "log_n1_exponent": s.b,
                    "folded_hi": s.folded.hi().to_f64(Round::Up),
                    "resolved": s.resolved.as_ref().map(|r| r.to_string()),
                })
            })
            .collect();
        serde_json::json!({ "stage_bounds": stages, "certificates": self.certificates })
    }

    /// Plain-text table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&format!(
                "{:<28} {:>12.6e} {:>12.6e}  {:<9} {}\n",
                e.name,
                e.value.lo().to_f64(Round::Down),
                e.value.hi().to_f64(Round::Up),
                e.mode.as_str(),
                e.provenance
            ));
        }
        for s in &self.stage_bounds {
            out.push_str(&format!(
                "{} <= {:.4e} (log x)^{} (log n1)^{}  [folded {:.4e}]{}\n",
                s.target.label(),
                s.coefficient.hi().to_f64(Round::Up),
                s.a,
                s.b,
                s.folded.hi().to_f64(Round::Up),
                s.resolved.as_ref().map(|r| format!("  resolved n1 < {r}")).unwrap_or_default()
            ));
        }
        out
    }
}

/// `c_8` with `l <= c_8 n_1`, plus the instance-specific linear bound when one applies.
#[derive(Clone, Debug)]
pub struct EllBound {
    pub c8: Real,
    /// `(coefficient, threshold)`: `l <= coefficient * n_1` for `n_1 >= threshold`.
    pub specialized: Option<(Real, u64)>,
}

/// Upper bound for `l` in terms of `n_1`, recorded in the ledger.
pub fn ell_upper_bound(
    instance: &ProblemInstance,
    decomp: &BinetDecomposition,
    n_min: u64,
    mode: Mode,
    ledger: &mut BoundLedger,
) -> EllBound {
    let prec = decomp.prec();
    let c1 = crate::recurrence::growth_constant(decomp);
    let q = Real::from_int(instance.q_value().magnitude().clone(), prec);
    let c6 = &(&c1 * &Real::from_int(instance.k as i64, prec)) + &q;
    let c6 = ledger.push("c_6", c6, mode, "k c_1 + |Q(x)|, so l x^l <= c_6 alpha_1^n_1");
    let log_a = decomp.dominant_root().modulus.ln();
    let log_x = Real::from_int(instance.x.clone(), prec).ln();
    let c8 = &(&log_a + &(&c6.log_plus() / &Real::from_int(n_min, prec))) / &log_x;
    let c8 = ledger.push("c_8", c8, mode, "(log alpha_1 + log+ c_6 / n_min) / log x");
    let specialized = fib::specialized_ell(instance, decomp).map(|(coef, threshold)| {
        let coef = ledger.push(
            "ell_coefficient",
            coef,
            mode,
            "l <= 1 + (n_1 - 1) log alpha / log 2 <= 0.75 n_1",
        );
        ledger.push(
            "ell_threshold",
            Real::from_int(threshold, prec),
            mode,
            "least n_1 with 1 + (n_1 - 1) log alpha / log 2 <= 0.75 n_1",
        );
        (coef, threshold)
    });
    EllBound { c8, specialized }
}

/// Least integer `N` (found by upward iteration) with `n > c (log n)^b` for all `n >= N`.
pub fn resolve_fixpoint(coefficient: &Real, b: u32) -> Result<BigInt> {
    if !coefficient.is_positive() {
        return Err(Error::InvalidInput("fixpoint coefficient must be positive".into()));
    }
    let prec = coefficient.prec().max(256);
    let c = Real::point(coefficient.hi().clone(), prec);
    let g = |n: &BigInt| -> Real { &c * &Real::from_int(n.clone(), prec).ln().powi(b) };
    let e2b = Real::from_int(2 * b as i64, prec).exp();
    let mut n = c.ceil_hi().max(e2b.ceil_hi()).max(BigInt::from(2));
    let mut steps = 0u32;
    loop {
        let next = g(&n).ceil_hi();
        if next <= n {
            break;
        }
        n = next;
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Divergence);
        }
    }
    while !Real::from_int(n.clone(), prec).gt(&g(&n)) {
        n += 1;
        steps += 1;
        if steps > 1_000_000 {
            return Err(Error::Divergence);
        }
    }
    Ok(n)
}

/// `c / floor^b`: absorbs a constant into `(log n_1)^b` using `log n_1 >= floor`.
pub(crate) fn absorb(c: &Real, floor: &Real, b: u32) -> Real {
    c / &floor.powi(b)
}
