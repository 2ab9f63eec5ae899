//! Integer linear recurrences and their Binet decomposition.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{eval_ratpoly_complex, irreducibility, Irreducibility, DEFAULT_PRIMES};
use crate::interval::{Complex, Dyadic, Real, DEFAULT_PRECISION};
use crate::poly::{IntegerPolynomial, RatPoly};
use crate::roots::{isolate_roots, RootEnclosure, MAX_PRECISION};

/// `U_n = a_1 U_{n-1} + ... + a_r U_{n-r}` with initial values `U_0 .. U_{r-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SpecJson", into = "SpecJson")]
pub struct RecurrenceSpec {
    coefficients: Vec<BigInt>,
    initials: Vec<BigInt>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Str(String),
    Int(i64),
}

impl IntRepr {
    fn parse(&self, field: &str, idx: usize) -> Result<BigInt> {
        match self {
            IntRepr::Int(v) => Ok(BigInt::from(*v)),
            IntRepr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("{field}[{idx}]: not an integer: {s:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SpecJson {
    order: usize,
    coefficients: Vec<IntRepr>,
    initials: Vec<IntRepr>,
}

impl TryFrom<SpecJson> for RecurrenceSpec {
    type Error = Error;

    fn try_from(raw: SpecJson) -> Result<Self> {
        let parse = |field: &str, v: &[IntRepr]| -> Result<Vec<BigInt>> {
            v.iter().enumerate().map(|(i, x)| x.parse(field, i)).collect()
        };
        let coefficients = parse("coefficients", &raw.coefficients)?;
        let initials = parse("initials", &raw.initials)?;
        if coefficients.len() != raw.order {
            return Err(Error::InvalidRecurrence(format!(
                "coefficients: expected {} entries, got {}",
                raw.order,
                coefficients.len()
            )));
        }
        if initials.len() != raw.order {
            return Err(Error::InvalidRecurrence(format!(
                "initials: expected {} entries, got {}",
                raw.order,
                initials.len()
            )));
        }
        RecurrenceSpec::new(coefficients, initials)
    }
}

impl From<RecurrenceSpec> for SpecJson {
    fn from(s: RecurrenceSpec) -> Self {
        SpecJson {
            order: s.order(),
            coefficients: s.coefficients.iter().map(|c| IntRepr::Str(c.to_string())).collect(),
            initials: s.initials.iter().map(|c| IntRepr::Str(c.to_string())).collect(),
        }
    }
}

impl RecurrenceSpec {
    pub fn new(coefficients: Vec<BigInt>, initials: Vec<BigInt>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidRecurrence("order: must be at least 1".into()));
        }
        if coefficients.len() != initials.len() {
            return Err(Error::InvalidRecurrence("initials: length must equal order".into()));
        }
        if coefficients.last().is_some_and(Zero::is_zero) {
            return Err(Error::InvalidRecurrence("coefficients: a_r must be nonzero".into()));
        }
        if initials.iter().all(Zero::is_zero) {
            return Err(Error::InvalidRecurrence("initials: must not all be zero".into()));
        }
        Ok(RecurrenceSpec { coefficients, initials })
    }

    pub fn from_i64s(coefficients: &[i64], initials: &[i64]) -> Result<Self> {
        Self::new(
            coefficients.iter().map(|&c| BigInt::from(c)).collect(),
            initials.iter().map(|&c| BigInt::from(c)).collect(),
        )
    }

    /// `F_0 = 0`, `F_1 = 1`.
    pub fn fibonacci() -> Self {
        Self::from_i64s(&[1, 1], &[0, 1]).expect("valid")
    }

    /// `G_{n+3} = 3 G_{n+2} - 3 G_{n+1} + 2 G_n` with `G_0 = 0`, `G_1 = G_2 = 1`.
    pub fn counterexample() -> Self {
        Self::from_i64s(&[3, -3, 2], &[0, 1, 1]).expect("valid")
    }

    /// Parses `{"order", "coefficients", "initials"}`; errors name the offending field.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("not valid JSON: {e}")))?;
        let field = |name: &str| v.get(name).ok_or_else(|| Error::InvalidInput(format!("{name}: missing")));
        let order = field("order")?
            .as_u64()
            .ok_or_else(|| Error::InvalidInput("order: not a non-negative integer".into()))? as usize;
        let list = |name: &str| -> Result<Vec<IntRepr>> {
            serde_json::from_value(field(name)?.clone())
                .map_err(|_| Error::InvalidInput(format!("{name}: expected a list of integers or integer strings")))
        };
        SpecJson { order, coefficients: list("coefficients")?, initials: list("initials")? }.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn initials(&self) -> &[BigInt] {
        &self.initials
    }

    /// Exact values `U_from ..= U_to`.
    pub fn eval_terms(&self, from: usize, to: usize) -> Vec<BigInt> {
        assert!(from <= to, "from must not exceed to");
        let r = self.order();
        let mut window: Vec<BigInt> = self.initials.clone();
        let mut out = Vec::with_capacity(to - from + 1);
        for n in 0..=to {
            let value = if n < r {
                self.initials[n].clone()
            } else {
                let v: BigInt = self
                    .coefficients
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a * &window[r - 1 - j])
                    .sum();
                window.remove(0);
                window.push(v.clone());
                v
            };
            if n >= from {
                out.push(value);
            }
        }
        out
    }

    pub fn term(&self, n: usize) -> BigInt {
        self.eval_terms(n, n).pop().expect("one term")
    }

    /// `x^r - a_1 x^{r-1} - ... - a_r`.
    pub fn char_poly(&self) -> IntegerPolynomial {
        let r = self.order();
        let mut c = vec![BigInt::zero(); r + 1];
        c[r] = BigInt::one();
        for (j, a) in self.coefficients.iter().enumerate() {
            c[r - 1 - j] = -a;
        }
        IntegerPolynomial::new(c).expect("monic")
    }

    /// `M(x)` with `f_i = M(alpha_i) / f'(alpha_i)`.
    pub fn binet_numerator(&self) -> RatPoly {
        let r = self.order();
        let mut c = vec![BigRational::zero(); r];
        for m in 0..r {
            let mut n_m = self.initials[m].clone();
            for j in 1..=m {
                n_m -= &self.coefficients[j - 1] * &self.initials[m - j];
            }
            c[r - 1 - m] = BigRational::from_integer(n_m);
        }
        RatPoly::new(c)
    }
}

pub fn eval_terms(spec: &RecurrenceSpec, from: usize, to: usize) -> Vec<BigInt> {
    spec.eval_terms(from, to)
}

pub fn char_poly(spec: &RecurrenceSpec) -> IntegerPolynomial {
    spec.char_poly()
}

/// Roots, Binet coefficients and dominance data.
#[derive(Clone, Debug)]
pub struct BinetDecomposition {
    pub roots: Vec<RootEnclosure>,
    pub coefficients: Vec<Complex>,
    pub dominant_index: usize,
    /// `1 - log|alpha_2| / log alpha_1`, when defined.
    pub dominance_gap: Option<Real>,
    pub degenerate: bool,
    pub char_poly: IntegerPolynomial,
    pub numerator: RatPoly,
    prec: u32,
}

impl BinetDecomposition {
    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn dominant_root(&self) -> &RootEnclosure {
        &self.roots[self.dominant_index]
    }

    pub fn dominant_coefficient(&self) -> &Complex {
        &self.coefficients[self.dominant_index]
    }

    /// Interval for `sum_i f_i alpha_i^n`.
    pub fn reconstruct(&self, n: u32) -> Complex {
        self.roots
            .iter()
            .zip(&self.coefficients)
            .fold(Complex::zero(self.prec), |acc, (r, f)| &acc + &(f * &r.enclosure().powi(n)))
    }

    /// `f_1` as an element of `Q(alpha)`, i.e. `M * (f')^{-1} mod f`.
    pub fn dominant_coefficient_element(&self) -> RatPoly {
        let f = self.char_poly.to_rational();
        let df = f.derivative();
        let (g, s, _) = df.xgcd(&f);
        let inv = s.scale(&g.coeffs()[0].recip());
        self.numerator.mul(&inv).rem(&f)
    }
}

/// Computes the Binet decomposition from certified roots of the characteristic polynomial.
pub fn binet_coefficients(spec: &RecurrenceSpec, roots: &[RootEnclosure]) -> Result<BinetDecomposition> {
    if roots.iter().any(|r| r.multiplicity > 1) {
        return Err(Error::RepeatedRoots);
    }
    let f = spec.char_poly();
    let prec = roots.iter().map(|r| r.prec()).min().unwrap_or(DEFAULT_PRECISION);
    let m = spec.binet_numerator();
    let df = f.derivative().expect("order >= 1");
    let mut coefficients: Vec<Complex> = roots
        .iter()
        .map(|r| {
            let z = r.enclosure();
            &eval_ratpoly_complex(&m, &z) / &df.eval_complex(&z)
        })
        .collect();
    let mut degenerate = false;
    if coefficients[0].contains_zero() {
        degenerate = exact_vanishing(&f, &m, &roots[0]).ok_or(Error::PrecisionExhausted { max_bits: prec })?;
        if degenerate {
            coefficients[0] = Complex::zero(prec);
        }
    }
    let dominance_gap = gap(roots);
    Ok(BinetDecomposition {
        roots: roots.to_vec(),
        coefficients,
        dominant_index: 0,
        dominance_gap,
        degenerate,
        char_poly: f,
        numerator: m,
        prec,
    })
}

/// Whether `M(alpha) = 0` for the root in `root`; `None` if its enclosure is too coarse.
fn exact_vanishing(f: &IntegerPolynomial, m: &RatPoly, root: &RootEnclosure) -> Option<bool> {
    let fr = f.to_rational();
    let g = m.gcd(&fr);
    if g.degree() == Some(0) {
        return Some(false);
    }
    let (h, _) = fr.divrem(&g);
    let z = root.enclosure();
    let g_zero = eval_ratpoly_complex(&g, &z).contains_zero();
    let h_zero = eval_ratpoly_complex(&h, &z).contains_zero();
    match (g_zero, h_zero) {
        (true, false) => Some(true),
        (false, true) => Some(false),
        _ => None,
    }
}

fn gap(roots: &[RootEnclosure]) -> Option<Real> {
    let a1 = &roots[0];
    let a2 = roots.get(1)?;
    if !a1.modulus.gt(&Real::one(a1.prec())) || !a2.modulus.is_positive() {
        return None;
    }
    let one = Real::one(a1.prec());
    Some(&one - &(&a2.modulus.ln() / &a1.modulus.ln()))
}

/// Isolates roots and computes the decomposition, raising precision when certification fails.
pub fn decompose(spec: &RecurrenceSpec) -> Result<BinetDecomposition> {
    decompose_from(spec, DEFAULT_PRECISION)
}

pub fn decompose_from(spec: &RecurrenceSpec, start: u32) -> Result<BinetDecomposition> {
    let f = spec.char_poly();
    let mut prec = start;
    loop {
        let attempt = isolate_roots(&f, prec).and_then(|roots| binet_coefficients(spec, &roots));
        match attempt {
            Err(Error::PrecisionExhausted { .. }) if prec < MAX_PRECISION => prec = (prec * 2).min(MAX_PRECISION),
            Err(Error::PrecisionExhausted { .. }) => return Err(Error::PrecisionExhausted { max_bits: MAX_PRECISION }),
            other => return other,
        }
    }
}

/// Upper limit for the dominance parameter.
pub fn delta_cap(prec: u32) -> Real {
    Real::point(&Dyadic::one() - &Dyadic::one().mul_pow2(-10), prec)
}

#[derive(Clone, Debug)]
pub struct DominanceReport {
    pub has_dominant: bool,
    pub dominant_real_gt1: bool,
    /// `1 - log|alpha_2| / log alpha_1`.
    pub delta_raw: Option<Real>,
    /// `min(delta_raw, 1 - 2^-10)`.
    pub delta: Option<Real>,
}

/// Dominance structure from root enclosures alone.
pub fn classify_roots(roots: &[RootEnclosure]) -> DominanceReport {
    let first = &roots[0];
    let has_dominant = first.multiplicity == 1 && roots[1..].iter().all(|r| first.modulus.gt(&r.modulus));
    let one = Real::one(first.prec());
    let dominant_real_gt1 =
        has_dominant && first.is_real && first.center_re.is_positive() && first.modulus.gt(&one);
    let delta_raw = if dominant_real_gt1 { gap(roots) } else { None };
    let delta = if dominant_real_gt1 {
        let cap = delta_cap(first.prec());
        Some(delta_raw.as_ref().map_or(cap.clone(), |d| d.min(&cap)))
    } else {
        None
    };
    DominanceReport { has_dominant, dominant_real_gt1, delta_raw, delta }
}

pub fn classify_dominance(decomp: &BinetDecomposition) -> DominanceReport {
    classify_roots(&decomp.roots)
}

/// `c_1 = sum |f_i|`, so that `|U_n| <= c_1 |alpha_1|^n`.
pub fn growth_constant(decomp: &BinetDecomposition) -> Real {
    decomp
        .coefficients
        .iter()
        .fold(Real::zero(decomp.prec), |acc, f| &acc + &f.abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisReport {
    pub order_ge_2: bool,
    pub irreducible: Irreducibility,
    pub dominant_real_gt1: bool,
    pub f1_nonzero: bool,
}

impl HypothesisReport {
    pub fn all_hold(&self) -> bool {
        self.order_ge_2 && self.irreducible.is_irreducible() && self.dominant_real_gt1 && self.f1_nonzero
    }

    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.order_ge_2 {
            out.push("order_ge_2");
        }
        if !self.irreducible.is_irreducible() {
            out.push("irreducible");
        }
        if !self.dominant_real_gt1 {
            out.push("dominant_real_gt1");
        }
        if !self.f1_nonzero {
            out.push("f1_nonzero");
        }
        out
    }
}

pub fn check_hypotheses(spec: &RecurrenceSpec) -> HypothesisReport {
    check_hypotheses_with(spec, DEFAULT_PRIMES)
}

pub fn check_hypotheses_with(spec: &RecurrenceSpec, primes: &[u64]) -> HypothesisReport {
    let f = spec.char_poly();
    let irreducible = irreducibility(&f, primes);
    let roots = crate::roots::isolate_roots_auto(&f);
    let dominant_real_gt1 = roots.as_ref().map(|r| classify_roots(r).dominant_real_gt1).unwrap_or(false);
    let f1_nonzero = decompose(spec).map(|d| !d.degenerate && !d.dominant_coefficient().contains_zero()).unwrap_or(false);
    HypothesisReport { order_ge_2: spec.order() >= 2, irreducible, dominant_real_gt1, f1_nonzero }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn terms() {
        assert_eq!(RecurrenceSpec::fibonacci().eval_terms(0, 6), ints(&[0, 1, 1, 2, 3, 5, 8]));
        assert_eq!(RecurrenceSpec::counterexample().eval_terms(0, 8), ints(&[0, 1, 1, 0, -1, -1, 0, 1, 1]));
        assert_eq!(RecurrenceSpec::fibonacci().eval_terms(0, 0), ints(&[0]));
        assert_eq!(RecurrenceSpec::fibonacci().eval_terms(10, 12), ints(&[55, 89, 144]));
    }

    #[test]
    fn char_polys() {
        assert_eq!(RecurrenceSpec::fibonacci().char_poly().to_string(), "x^2 - x - 1");
        assert_eq!(RecurrenceSpec::counterexample().char_poly().to_string(), "x^3 - 3x^2 + 3x - 2");
        assert_eq!(RecurrenceSpec::from_i64s(&[5], &[1]).unwrap().char_poly().to_string(), "x - 5");
    }

    #[test]
    fn json_round_trip() {
        let s = RecurrenceSpec::counterexample();
        let back = RecurrenceSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(s, back);
        let err = RecurrenceSpec::from_json(r#"{"order":2,"coefficients":["1"],"initials":["0","1"]}"#);
        assert!(matches!(err, Err(Error::InvalidRecurrence(m)) if m.contains("coefficients")));
    }

    #[test]
    fn invalid_specs() {
        assert!(RecurrenceSpec::from_i64s(&[1, 0], &[0, 1]).is_err());
        assert!(RecurrenceSpec::from_i64s(&[1, 1], &[0, 0]).is_err());
        assert!(RecurrenceSpec::from_i64s(&[], &[]).is_err());
    }

    #[test]
    fn fibonacci_binet() {
        let d = decompose(&RecurrenceSpec::fibonacci()).unwrap();
        let inv5 = 1.0 / 5f64.sqrt();
        assert!((d.coefficients[0].re.mid_f64() - inv5).abs() < 1e-15);
        assert!((d.coefficients[1].re.mid_f64() + inv5).abs() < 1e-15);
        assert!(!d.degenerate);
        let rep = classify_dominance(&d);
        assert!(rep.has_dominant && rep.dominant_real_gt1);
        assert!((rep.delta_raw.unwrap().mid_f64() - 2.0).abs() < 1e-12);
        assert!(rep.delta.unwrap().hi_f64() < 1.0);
    }

    #[test]
    fn counterexample_is_degenerate() {
        let d = decompose(&RecurrenceSpec::counterexample()).unwrap();
        assert!(d.degenerate);
        assert!(d.dominant_coefficient().re.contains(&Dyadic::zero()));
        let rep = classify_dominance(&d);
        assert!(rep.has_dominant);
        let h = check_hypotheses(&RecurrenceSpec::counterexample());
        assert_eq!(h.irreducible.label(), "false");
        assert!(!h.f1_nonzero);
    }

    #[test]
    fn order_one() {
        let d = decompose(&RecurrenceSpec::from_i64s(&[2], &[3]).unwrap()).unwrap();
        assert!(d.coefficients[0].re.contains_int(&BigInt::from(3)));
        let d = decompose(&RecurrenceSpec::from_i64s(&[2], &[1]).unwrap()).unwrap();
        assert!(growth_constant(&d).contains_int(&BigInt::one()));
    }

    #[test]
    fn repeated_roots() {
        let s = RecurrenceSpec::from_i64s(&[2, -1], &[0, 1]).unwrap();
        assert!(matches!(decompose(&s), Err(Error::RepeatedRoots)));
        let roots = crate::roots::isolate_roots_auto(&s.char_poly()).unwrap();
        assert!(!classify_roots(&roots).has_dominant);
    }

    #[test]
    fn hypotheses() {
        let h = check_hypotheses(&RecurrenceSpec::fibonacci());
        assert!(h.all_hold());
        let h = check_hypotheses(&RecurrenceSpec::from_i64s(&[0, 2], &[1, 1]).unwrap());
        assert!(h.irreducible.is_irreducible());
    }

    #[test]
    fn field_element_for_fibonacci() {
        let d = decompose(&RecurrenceSpec::fibonacci()).unwrap();
        let e = d.dominant_coefficient_element();
        let mp = crate::factor::field_element_minpoly(&d.char_poly, &e);
        assert_eq!(mp, IntegerPolynomial::from_i64s(&[-1, 0, 5]).unwrap());
    }
}
