//! Absolute logarithmic heights and Matveev's lower bound for linear forms in logarithms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::factor::{eval_ratpoly_complex, field_element_minpoly};
use crate::interval::{Complex, Real};
use crate::poly::{IntegerPolynomial, RatPoly};
use crate::roots::{isolate_roots_from, locate, RootEnclosure};

/// An algebraic number given by its minimal polynomial and a designated conjugate.
#[derive(Clone, Debug)]
pub struct AlgebraicNumberRef {
    pub minimal_polynomial: IntegerPolynomial,
    pub conjugates: Vec<RootEnclosure>,
    pub selected: usize,
}

impl AlgebraicNumberRef {
    /// Selects the conjugate whose enclosure meets `value`, raising precision until exactly one does.
    pub fn from_minpoly(minimal_polynomial: IntegerPolynomial, value: &Complex) -> Result<Self> {
        let minimal_polynomial = normalize(minimal_polynomial);
        let mut prec = value.prec().max(64);
        loop {
            let conjugates = isolate_roots_from(&minimal_polynomial, prec)?;
            if let Some(selected) = locate(&conjugates, value) {
                return Ok(AlgebraicNumberRef { minimal_polynomial, conjugates, selected });
            }
            if prec >= crate::roots::MAX_PRECISION {
                return Err(Error::PrecisionExhausted { max_bits: prec });
            }
            prec *= 2;
        }
    }

    /// The element `e(alpha)` of `Q(alpha)`, where `alpha` (given by `root`) is a root of the irreducible `f`.
    pub fn from_field_element(f: &IntegerPolynomial, root: &RootEnclosure, e: &RatPoly) -> Result<Self> {
        let mp = field_element_minpoly(f, e);
        let mut prec = root.prec();
        loop {
            let r = if prec == root.prec() {
                root.clone()
            } else {
                let roots = isolate_roots_from(f, prec)?;
                let idx = locate(&roots, &root.enclosure()).ok_or(Error::PrecisionExhausted { max_bits: prec })?;
                roots[idx].clone()
            };
            let value = eval_ratpoly_complex(e, &r.enclosure());
            match Self::from_minpoly(mp.clone(), &value) {
                Ok(a) => return Ok(a),
                Err(Error::PrecisionExhausted { .. }) if prec < crate::roots::MAX_PRECISION => prec *= 2,
                Err(err) => return Err(err),
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.minimal_polynomial.degree()
    }

    pub fn value(&self) -> Complex {
        self.conjugates[self.selected].enclosure()
    }

    pub fn is_zero(&self) -> bool {
        self.minimal_polynomial.degree() == 1 && self.minimal_polynomial.coeff(0).is_zero()
    }
}

fn normalize(p: IntegerPolynomial) -> IntegerPolynomial {
    let p = p.primitive();
    if p.leading().is_negative() {
        IntegerPolynomial::new(p.coeffs().iter().map(|c| -c).collect()).expect("nonzero")
    } else {
        p
    }
}

/// `log max(|p|, q)` for `p/q` in lowest terms.
pub fn rational_height(q: &BigRational, prec: u32) -> Real {
    let m = q.numer().abs().max(q.denom().abs());
    if m.is_zero() {
        return Real::zero(prec);
    }
    Real::from_int(m, prec).ln()
}

/// `(1/d) (log c_0 + sum log max(1, |conjugate|))`.
pub fn log_height(x: &AlgebraicNumberRef) -> Result<Real> {
    let prec = x.conjugates.iter().map(|r| r.prec()).min().unwrap_or(crate::interval::DEFAULT_PRECISION);
    let c0 = Real::from_int(x.minimal_polynomial.leading().clone(), prec).ln();
    let mut total = c0;
    for r in &x.conjugates {
        for _ in 0..r.multiplicity {
            total = &total + &r.modulus.max_one().ln();
        }
    }
    let h = &total / &Real::from_int(x.degree() as i64, prec);
    Ok(clamp_nonneg(h))
}

fn clamp_nonneg(h: Real) -> Real {
    if h.lo().is_negative() {
        let prec = h.prec();
        Real::new(crate::interval::Dyadic::zero(), h.hi().clone().max(crate::interval::Dyadic::zero()), prec)
    } else {
        h
    }
}

/// Symbolic products, quotients and powers of algebraic numbers and rationals.
#[derive(Clone, Debug)]
pub enum HeightExpr {
    Rational(BigRational),
    Algebraic(Box<AlgebraicNumberRef>),
    Mul(Box<HeightExpr>, Box<HeightExpr>),
    Div(Box<HeightExpr>, Box<HeightExpr>),
    Pow(Box<HeightExpr>, i64),
    /// `h(sum x_i) <= sum h(x_i) + log(count)`.
    Sum(Vec<HeightExpr>),
    /// A number known only through a height bound and a value enclosure.
    Bounded { height: Real, value: Option<Complex> },
}

impl HeightExpr {
    pub fn int(n: impl Into<BigInt>) -> Self {
        HeightExpr::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        HeightExpr::Rational(BigRational::new(p.into(), q.into()))
    }

    pub fn algebraic(a: AlgebraicNumberRef) -> Self {
        HeightExpr::Algebraic(Box::new(a))
    }

    pub fn mul(self, o: HeightExpr) -> Self {
        HeightExpr::Mul(Box::new(self), Box::new(o))
    }

    pub fn div(self, o: HeightExpr) -> Self {
        HeightExpr::Div(Box::new(self), Box::new(o))
    }

    pub fn pow(self, n: i64) -> Self {
        HeightExpr::Pow(Box::new(self), n)
    }

    /// Exact value when the expression is built from rationals only.
    pub fn exact(&self) -> Result<Option<BigRational>> {
        Ok(match self {
            HeightExpr::Rational(q) => Some(q.clone()),
            HeightExpr::Algebraic(a) if a.degree() == 1 => {
                let c = a.minimal_polynomial.coeffs();
                Some(BigRational::new(-c[0].clone(), c[1].clone()))
            }
            HeightExpr::Algebraic(_) | HeightExpr::Bounded { .. } => None,
            HeightExpr::Mul(a, b) => match (a.exact()?, b.exact()?) {
                (Some(x), Some(y)) => Some(x * y),
                _ => None,
            },
            HeightExpr::Div(a, b) => {
                let y = b.exact()?;
                if y.as_ref().is_some_and(Zero::is_zero) {
                    return Err(Error::DivisionByZeroSymbol);
                }
                match (a.exact()?, y) {
                    (Some(x), Some(y)) => Some(x / y),
                    _ => None,
                }
            }
            HeightExpr::Pow(a, n) => match a.exact()? {
                Some(x) if x.is_zero() && *n < 0 => return Err(Error::DivisionByZeroSymbol),
                Some(x) => Some(rational_pow(&x, *n)),
                None => None,
            },
            HeightExpr::Sum(items) => {
                let mut acc = BigRational::zero();
                for it in items {
                    match it.exact()? {
                        Some(x) => acc += x,
                        None => return Ok(None),
                    }
                }
                Some(acc)
            }
        })
    }

    /// Interval value of the designated number, when determinable.
    pub fn value(&self, prec: u32) -> Option<Complex> {
        match self {
            HeightExpr::Rational(q) => Some(Complex::from_real(Real::from_rational(q, prec))),
            HeightExpr::Algebraic(a) => Some(a.value()),
            HeightExpr::Bounded { value, .. } => value.clone(),
            HeightExpr::Mul(a, b) => Some(&a.value(prec)? * &b.value(prec)?),
            HeightExpr::Div(a, b) => {
                let d = b.value(prec)?;
                if d.contains_zero() {
                    return None;
                }
                Some(&a.value(prec)? / &d)
            }
            HeightExpr::Pow(a, n) => {
                let v = a.value(prec)?;
                let p = v.powi(n.unsigned_abs() as u32);
                if *n >= 0 {
                    Some(p)
                } else if p.contains_zero() {
                    None
                } else {
                    Some(p.recip())
                }
            }
            HeightExpr::Sum(items) => items
                .iter()
                .try_fold(Complex::zero(prec), |acc, it| Some(&acc + &it.value(prec)?)),
        }
    }
}

fn rational_pow(x: &BigRational, n: i64) -> BigRational {
    let mut r = BigRational::one();
    for _ in 0..n.unsigned_abs() {
        r *= x;
    }
    if n < 0 {
        r.recip()
    } else {
        r
    }
}

/// Upper bound on the height via subadditivity; exact for pure rationals.
pub fn height_compose(expr: &HeightExpr, prec: u32) -> Result<Real> {
    if let Some(q) = expr.exact()? {
        return Ok(rational_height(&q, prec));
    }
    Ok(match expr {
        HeightExpr::Rational(q) => rational_height(q, prec),
        HeightExpr::Algebraic(a) => log_height(a)?.with_prec(prec),
        HeightExpr::Bounded { height, .. } => height.clone(),
        HeightExpr::Mul(a, b) => &height_compose(a, prec)? + &height_compose(b, prec)?,
        HeightExpr::Div(a, b) => {
            if b.exact()?.is_some_and(|y| y.is_zero()) || matches!(b.as_ref(), HeightExpr::Algebraic(x) if x.is_zero()) {
                return Err(Error::DivisionByZeroSymbol);
            }
            &height_compose(a, prec)? + &height_compose(b, prec)?
        }
        HeightExpr::Pow(a, n) => &height_compose(a, prec)? * &Real::from_int(n.unsigned_abs(), prec),
        HeightExpr::Sum(items) => {
            let mut acc = Real::zero(prec);
            for it in items {
                acc = &acc + &height_compose(it, prec)?;
            }
            if items.len() > 1 {
                acc = &acc + &Real::from_int(items.len() as i64, prec).ln();
            }
            acc
        }
    })
}

/// The floor term in Matveev's `A_j`.
pub fn matveev_floor(prec: u32) -> Real {
    Real::from_ratio(16, 100, prec)
}

/// `A_j = max{D h(gamma), |log gamma|, 0.16}`.
pub fn matveev_a(gamma: &HeightExpr, field_degree: u32, prec: u32) -> Result<Real> {
    let v = gamma.value(prec).ok_or(Error::NonPositiveGamma)?;
    if !v.im.contains_zero() || !v.re.is_positive() {
        return Err(Error::NonPositiveGamma);
    }
    let h = height_compose(gamma, prec)?;
    let dh = &h * &Real::from_int(field_degree as i64, prec);
    let log_abs = v.re.ln().abs();
    Ok(dh.max(&log_abs).max(&matveev_floor(prec)))
}

/// `1.4 * 30^{s+3} * s^{4.5} * D^2 * (1 + log D)`.
pub fn matveev_constant(s: u32, field_degree: u32, prec: u32) -> Real {
    let sr = Real::from_int(s as i64, prec);
    let d = Real::from_int(field_degree as i64, prec);
    let base = &Real::from_ratio(14, 10, prec) * &Real::from_int(30, prec).powi(s + 3);
    let s45 = &sr.powi(4) * &sr.sqrt();
    let one = Real::one(prec);
    &(&(&base * &s45) * &d.sqr()) * &(&one + &d.ln())
}

/// Linear form `gamma_1^{b_1} ... gamma_s^{b_s} - 1` with `|b_j| <= B`.
#[derive(Clone, Debug)]
pub struct LinearFormInstance {
    pub gammas: Vec<HeightExpr>,
    pub exponent_bound: BigInt,
    pub exponents: Option<Vec<BigInt>>,
    pub field_degree: u32,
    pub a_values: Option<Vec<Real>>,
}

impl LinearFormInstance {
    pub fn s(&self) -> usize {
        self.a_values.as_ref().map_or(self.gammas.len(), Vec::len)
    }

    pub fn validate(&self) -> Result<()> {
        if self.s() == 0 {
            return Err(Error::MissingAValues);
        }
        if !self.exponent_bound.is_positive() {
            return Err(Error::InvalidInput("exponent bound B must be positive".into()));
        }
        if self.field_degree == 0 {
            return Err(Error::InvalidInput("field degree must be positive".into()));
        }
        if let Some(b) = &self.exponents {
            if b.iter().any(|x| x.abs() > self.exponent_bound) {
                return Err(Error::InvalidInput("exponent exceeds B".into()));
            }
        }
        Ok(())
    }

    /// The `A_j`: replay values when given, otherwise computed from the gammas.
    pub fn a_values(&self, prec: u32) -> Result<Vec<Real>> {
        match &self.a_values {
            Some(a) => Ok(a.clone()),
            None if self.gammas.is_empty() => Err(Error::MissingAValues),
            None => self.gammas.iter().map(|g| matveev_a(g, self.field_degree, prec)).collect(),
        }
    }
}

/// `L` with `log |Lambda| >= L` whenever `Lambda != 0`.
pub fn matveev_lower_bound(instance: &LinearFormInstance, prec: u32) -> Result<Real> {
    instance.validate()?;
    let a = instance.a_values(prec)?;
    let s = a.len() as u32;
    let one = Real::one(prec);
    let log_b = Real::from_int(instance.exponent_bound.clone(), prec).ln();
    let prod = a.iter().fold(one.clone(), |acc, x| &acc * x);
    let c = matveev_constant(s, instance.field_degree, prec);
    Ok(-(&(&c * &(&one + &log_b)) * &prod))
}
