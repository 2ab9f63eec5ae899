//! Dense univariate polynomials over the integers and the rationals.
//!
//! Coefficients are stored in ascending order of degree. Integer polynomials
//! are the public currency of the crate (characteristic and minimal
//! polynomials); rational polynomials are an internal tool for exact gcds
//! and divisions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Complex, Real};

/// Nonzero polynomial with integer coefficients, ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct IntegerPolynomial {
    coeffs: Vec<BigInt>,
}

impl TryFrom<Vec<String>> for IntegerPolynomial {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        let coeffs = v
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::InvalidPolynomial(format!("bad coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        IntegerPolynomial::new(coeffs)
    }
}

impl From<IntegerPolynomial> for Vec<String> {
    fn from(p: IntegerPolynomial) -> Self {
        p.coeffs.iter().map(|c| c.to_string()).collect()
    }
}

impl IntegerPolynomial {
    /// Builds from ascending coefficients; trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<BigInt>) -> Result<Self> {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("zero polynomial".into()));
        }
        Ok(IntegerPolynomial { coeffs })
    }

    pub fn from_i64s(c: &[i64]) -> Result<Self> {
        IntegerPolynomial::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn constant(c: impl Into<BigInt>) -> Result<Self> {
        IntegerPolynomial::new(vec![c.into()])
    }

    /// `x - a`
    pub fn linear_root(a: impl Into<BigInt>) -> Self {
        IntegerPolynomial { coeffs: vec![-a.into(), BigInt::one()] }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().unwrap()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() == 1
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Content-free with positive leading coefficient.
    pub fn primitive(&self) -> IntegerPolynomial {
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntegerPolynomial { coeffs: self.coeffs.iter().map(|c| c / &g).collect() }
    }

    pub fn derivative(&self) -> Option<IntegerPolynomial> {
        let d: Vec<BigInt> =
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
        IntegerPolynomial::new(d).ok()
    }

    pub fn eval_int(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    pub fn eval_real(&self, x: &Real) -> Real {
        let p = x.prec();
        self.coeffs
            .iter()
            .rev()
            .fold(Real::zero(p), |acc, c| &(&acc * x) + &Real::from_int(c.clone(), p))
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let p = z.prec();
        self.coeffs.iter().rev().fold(Complex::zero(p), |acc, c| {
            &(&acc * z) + &Complex::from_real(Real::from_int(c.clone(), p))
        })
    }

    /// Sum of absolute values of the coefficients.
    pub fn l1_norm(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).sum()
    }

    pub fn mul(&self, other: &IntegerPolynomial) -> IntegerPolynomial {
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntegerPolynomial { coeffs: out }
    }

    pub fn to_rational(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
    }

    /// Exact quotient when `divisor` divides `self` over the integers.
    pub fn exact_div(&self, divisor: &IntegerPolynomial) -> Option<IntegerPolynomial> {
        let (q, r) = self.to_rational().divrem(&divisor.to_rational());
        if !r.is_zero() {
            return None;
        }
        q.to_integer_exact()
    }

    /// Parses `"x^2 - 3x + 1"`, `"-1"`, `"+5"`, or an ascending coefficient
    /// list such as `"[1, 0, 2]"` (meaning `1 + 2x^2`).
    pub fn parse(s: &str) -> Result<IntegerPolynomial> {
        let t = s.trim();
        if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    p.trim()
                        .trim_matches('"')
                        .parse::<BigInt>()
                        .map_err(|_| Error::InvalidPolynomial(format!("bad coefficient {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return IntegerPolynomial::new(coeffs);
        }
        parse_expression(t)
    }
}

fn parse_expression(s: &str) -> Result<IntegerPolynomial> {
    let bad = || Error::InvalidPolynomial(format!("cannot parse polynomial {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad());
    }
    let mut terms = Vec::new();
    let mut start = 0;
    let bytes = compact.as_bytes();
    for i in 1..bytes.len() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
            terms.push(&compact[start..i]);
            start = i;
        }
    }
    terms.push(&compact[start..]);
    let mut coeffs: Vec<BigInt> = Vec::new();
    for term in terms {
        let (neg, body) = match term.as_bytes()[0] {
            b'-' => (true, &term[1..]),
            b'+' => (false, &term[1..]),
            _ => (false, term),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let (c, deg) = match body.find('x') {
            None => (body.parse::<BigInt>().map_err(|_| bad())?, 0usize),
            Some(i) => {
                let cs = body[..i].trim_end_matches('*');
                let c = if cs.is_empty() { BigInt::one() } else { cs.parse().map_err(|_| bad())? };
                let rest = &body[i + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^').ok_or_else(bad)?.parse::<usize>().map_err(|_| bad())?
                };
                (c, deg)
            }
        };
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, BigInt::zero());
        }
        coeffs[deg] += if neg { -c } else { c };
    }
    IntegerPolynomial::new(coeffs)
}

impl fmt::Display for IntegerPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let show_mag = i == 0 || !mag.is_one();
            if show_mag {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Polynomial over the rationals; may be the zero polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly { coeffs: vec![BigRational::one()] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn monic(&self) -> RatPoly {
        match self.leading() {
            None => RatPoly::zero(),
            Some(l) => RatPoly::new(self.coeffs.iter().map(|c| c / l).collect()),
        }
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RatPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default()
                        + o.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &RatPoly) -> RatPoly {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        if self.is_zero() || o.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }

    pub fn divrem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.degree().unwrap();
        let lead = d.leading().unwrap();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn rem(&self, d: &RatPoly) -> RatPoly {
        self.divrem(d).1
    }

    /// Monic gcd (zero only when both inputs are zero).
    pub fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s*self + t*o = g`, `g` monic.
    pub fn xgcd(&self, o: &RatPoly) -> (RatPoly, RatPoly, RatPoly) {
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (RatPoly::one(), RatPoly::zero());
        let (mut t0, mut t1) = (RatPoly::zero(), RatPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        match r0.leading().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let inv = l.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Clears denominators and content; positive leading coefficient.
    pub fn to_primitive_integer(&self) -> Option<IntegerPolynomial> {
        if self.is_zero() {
            return None;
        }
        let l = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &l).to_integer()).collect();
        IntegerPolynomial::new(ints).ok().map(|p| p.primitive())
    }

    /// Integer polynomial with exactly these coefficients, if they are all integral.
    pub fn to_integer_exact(&self) -> Option<IntegerPolynomial> {
        if self.coeffs.iter().any(|c| !c.is_integer()) {
            return None;
        }
        IntegerPolynomial::new(self.coeffs.iter().map(|c| c.to_integer()).collect()).ok()
    }
}

/// Primitive gcd of two integer polynomials (the constant `1` when coprime).
pub fn gcd(a: &IntegerPolynomial, b: &IntegerPolynomial) -> IntegerPolynomial {
    a.to_rational()
        .gcd(&b.to_rational())
        .to_primitive_integer()
        .expect("gcd of nonzero polynomials is nonzero")
}

/// Squarefree decomposition (Yun): pairs `(factor, multiplicity)` whose
/// product, with multiplicities, equals the primitive part of `f`.
/// Constant factors are omitted.
pub fn squarefree_decomposition(f: &IntegerPolynomial) -> Vec<(IntegerPolynomial, usize)> {
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let f = f.to_rational();
    let fd = f.derivative();
    let a0 = f.gcd(&fd);
    let mut b = f.divrem(&a0).0;
    let c = fd.divrem(&a0).0;
    let mut d = c.sub(&b.derivative());
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let nb = b.divrem(&a).0;
        let nc = d.divrem(&a).0;
        d = nc.sub(&nb.derivative());
        if a.degree().unwrap_or(0) > 0 {
            out.push((a.to_primitive_integer().unwrap(), i));
        }
        b = nb;
        i += 1;
    }
    out
}

pub fn is_squarefree(f: &IntegerPolynomial) -> bool {
    match f.derivative() {
        None => true,
        Some(d) => gcd(f, &d).degree() == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> IntegerPolynomial {
        IntegerPolynomial::from_i64s(c).unwrap()
    }

    #[test]
    fn display_and_parse_agree() {
        let f = p(&[-2, 3, -3, 1]);
        assert_eq!(f.to_string(), "x^3 - 3x^2 + 3x - 2");
        assert_eq!(IntegerPolynomial::parse(&f.to_string()).unwrap(), f);
        assert_eq!(IntegerPolynomial::parse("x+1").unwrap(), p(&[1, 1]));
        assert_eq!(IntegerPolynomial::parse("-1").unwrap(), p(&[-1]));
        assert_eq!(IntegerPolynomial::parse("+7").unwrap(), p(&[7]));
        assert_eq!(IntegerPolynomial::parse("[1, 0, 2]").unwrap(), p(&[1, 0, 2]));
        assert_eq!(IntegerPolynomial::parse("2*x^2 - x").unwrap(), p(&[0, -1, 2]));
        assert!(IntegerPolynomial::parse("x^").is_err());
        assert!(IntegerPolynomial::parse("0").is_err());
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(IntegerPolynomial::from_i64s(&[0, 0]).is_err());
    }

    #[test]
    fn gcd_and_division() {
        // (x-2)(x^2-x+1)
        let f = p(&[-2, 3, -3, 1]);
        let g = gcd(&f, &p(&[-2, 1]));
        assert_eq!(g, p(&[-2, 1]));
        assert_eq!(f.exact_div(&g).unwrap(), p(&[1, -1, 1]));
        assert!(f.exact_div(&p(&[1, 1])).is_none());
    }

    #[test]
    fn yun_finds_multiplicities() {
        // (x-1)^2 (x+2)^3
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1])).mul(&p(&[2, 1])).mul(&p(&[2, 1]));
        let sf = squarefree_decomposition(&f);
        assert_eq!(sf, vec![(p(&[-1, 1]), 2), (p(&[2, 1]), 3)]);
        assert!(!is_squarefree(&f));
        assert!(is_squarefree(&p(&[-1, -1, 1])));
    }

    #[test]
    fn xgcd_gives_inverse() {
        let f = p(&[-1, -1, 1]).to_rational();
        let a = p(&[-1, 2]).to_rational(); // 2x - 1 = sqrt5 at x = alpha
        let (g, s, _) = a.xgcd(&f);
        assert_eq!(g, RatPoly::one());
        let prod = a.mul(&s).rem(&f);
        assert_eq!(prod, RatPoly::one());
    }
}
