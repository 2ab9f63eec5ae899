//! Outward-rounded interval arithmetic over arbitrary-precision dyadic numbers.
//!
//! A [`Dyadic`] is an exact number `m * 2^e` with a big-integer mantissa. A
//! [`Real`] is a closed interval `[lo, hi]` of dyadics whose endpoints are
//! rounded outward after every operation, so the true value of any expression
//! evaluated with these types is always contained in the result. [`Complex`]
//! is a rectangle of two real intervals.
//!
//! Precision is counted in mantissa bits and travels with each interval; a
//! binary operation works at the larger of its operands' precisions.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rounding direction for a single dyadic operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// Exact binary floating-point number `mant * 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

fn pow2(k: u64) -> BigInt {
    BigInt::one() << k
}

fn div_round_int(n: &BigInt, d: &BigInt, dir: Round) -> BigInt {
    match dir {
        Round::Down => n.div_floor(d),
        Round::Up => -((-n).div_floor(d)),
        Round::Nearest => {
            let twice: BigInt = n * 2 + d;
            twice.div_floor(&(d * 2))
        }
    }
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mant, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mant.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.mant.trailing_zeros() {
            if tz > 0 {
                self.mant >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Dyadic::new(n.into(), 0)
    }

    /// Exact conversion; panics on NaN or infinity.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite f64 has no dyadic value");
        if x == 0.0 {
            return Dyadic::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (m, e) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | (1u64 << 52), exponent - 1075)
        };
        Dyadic::new(BigInt::from(m) * sign, e)
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Bit length of the mantissa magnitude.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `floor(log2 |x|)` for nonzero `x`.
    pub fn log2_floor(&self) -> i64 {
        debug_assert!(!self.is_zero());
        self.exp + self.bits() as i64 - 1
    }

    pub fn abs(&self) -> Self {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    fn aligned(&self, other: &Self) -> (BigInt, BigInt, i64) {
        let e = self.exp.min(other.exp);
        let a = &self.mant << ((self.exp - e) as u64);
        let b = &other.mant << ((other.exp - e) as u64);
        (a, b, e)
    }

    /// Rounds to at most `prec` mantissa bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Self {
        let bits = self.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let m = div_round_int(&self.mant, &pow2(shift), dir);
        Dyadic::new(m, self.exp + shift as i64)
    }

    /// `self / other` rounded to `prec` bits in direction `dir`.
    pub fn div(&self, other: &Self, prec: u32, dir: Round) -> Self {
        assert!(!other.is_zero(), "dyadic division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let k = (prec as i64 + other.bits() as i64 - self.bits() as i64 + 2).max(0) as u64;
        let num = &self.mant << k;
        let q = div_round_int(&num, &other.mant, dir);
        Dyadic::new(q, self.exp - other.exp - k as i64).round(prec, dir)
    }

    /// Square root of a non-negative dyadic, rounded in direction `dir`.
    pub fn sqrt(&self, prec: u32, dir: Round) -> Self {
        assert!(!self.is_negative(), "square root of a negative dyadic");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let mut shift = (2 * prec as i64 + 4 - self.bits() as i64).max(0);
        if (self.exp - shift) % 2 != 0 {
            shift += 1;
        }
        let m = &self.mant << (shift as u64);
        let e = (self.exp - shift) / 2;
        let mut r = m.sqrt();
        let exact = &r * &r == m;
        match dir {
            Round::Down => {}
            Round::Up | Round::Nearest => {
                if !exact {
                    r += 1;
                }
            }
        }
        Dyadic::new(r, e).round(prec, dir)
    }

    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << (self.exp as u64)
        } else {
            self.mant.div_floor(&pow2((-self.exp) as u64))
        }
    }

    pub fn ceil(&self) -> BigInt {
        -((-self).floor())
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mant << (self.exp as u64))
        } else {
            BigRational::new(self.mant.clone(), pow2((-self.exp) as u64))
        }
    }

    pub fn from_rational(q: &BigRational, prec: u32, dir: Round) -> Self {
        Dyadic::from_int(q.numer().clone()).div(&Dyadic::from_int(q.denom().clone()), prec, dir)
    }

    /// Nearest `f64` in direction `dir` (saturating to +-inf / +-max on overflow).
    pub fn to_f64(&self, dir: Round) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, dir);
        let m = r.mant.to_f64().expect("53-bit mantissa fits in f64");
        let e = r.exp;
        if e > 2000 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -2200 {
            return match dir {
                Round::Up if m > 0.0 => f64::from_bits(1),
                Round::Down if m < 0.0 => -f64::from_bits(1),
                _ => 0.0,
            };
        }
        let mut v = m;
        let mut e = e;
        while e > 0 {
            let step = e.min(1000);
            v *= 2f64.powi(step as i32);
            e -= step;
        }
        while e < 0 {
            let step = (-e).min(1000);
            v /= 2f64.powi(step as i32);
            e += step;
        }
        v
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.aligned(other);
        a.cmp(&b)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, other: &Dyadic) -> Dyadic {
        let (a, b, e) = self.aligned(other);
        Dyadic::new(a - b, e)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mant * &other.mant, self.exp + other.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -&self
    }
}

/// Closed real interval with dyadic endpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Real {
    lo: Dyadic,
    hi: Dyadic,
    prec: u32,
}

pub const DEFAULT_PRECISION: u32 = 256;
const GUARD_BITS: u32 = 32;

impl Real {
    /// Builds `[lo, hi]`, rounding outward to `prec` bits.
    pub fn new(lo: Dyadic, hi: Dyadic, prec: u32) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Real { lo: lo.round(prec, Round::Down), hi: hi.round(prec, Round::Up), prec }
    }

    pub fn point(d: Dyadic, prec: u32) -> Self {
        Real::new(d.clone(), d, prec)
    }

    pub fn zero(prec: u32) -> Self {
        Real::point(Dyadic::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Real::point(Dyadic::one(), prec)
    }

    pub fn from_int(n: impl Into<BigInt>, prec: u32) -> Self {
        Real::point(Dyadic::from_int(n), prec)
    }

    pub fn from_i64(n: i64, prec: u32) -> Self {
        Real::from_int(BigInt::from(n), prec)
    }

    /// Encloses `num / den`.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        Real::from_rational(&BigRational::new(num.into(), den.into()), prec)
    }

    pub fn from_rational(q: &BigRational, prec: u32) -> Self {
        Real {
            lo: Dyadic::from_rational(q, prec, Round::Down),
            hi: Dyadic::from_rational(q, prec, Round::Up),
            prec,
        }
    }

    /// Exact enclosure of an `f64` value.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        Real::point(Dyadic::from_f64(x), prec.max(53))
    }

    /// Encloses a decimal literal such as `"7.27e14"` or `"0.16"` exactly.
    pub fn from_decimal(s: &str, prec: u32) -> Option<Self> {
        let s = s.trim();
        let (mant, exp10) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().ok()?),
            None => (s, 0),
        };
        let (neg, mant) = match mant.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mant.strip_prefix('+').unwrap_or(mant)),
        };
        let (int_part, frac_part) = match mant.find('.') {
            Some(i) => (&mant[..i], &mant[i + 1..]),
            None => (mant, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        let digits: String = format!("{int_part}{frac_part}");
        if !digits.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let mut n: BigInt = digits.parse().ok()?;
        if neg {
            n = -n;
        }
        let e = exp10 - frac_part.len() as i64;
        let ten = BigInt::from(10);
        let q = if e >= 0 {
            BigRational::from_integer(n * num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(n, num_traits::pow(ten, (-e) as usize))
        };
        Some(Real::from_rational(&q, prec))
    }

    pub fn lo(&self) -> &Dyadic {
        &self.lo
    }

    pub fn hi(&self) -> &Dyadic {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        Real { lo: self.lo.round(prec, Round::Down), hi: self.hi.round(prec, Round::Up), prec }
    }

    pub fn hull(&self, other: &Real) -> Real {
        Real {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn intersect(&self, other: &Real) -> Option<Real> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then(|| Real { lo, hi, prec: self.prec.max(other.prec) })
    }

    pub fn width(&self) -> Dyadic {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> Dyadic {
        (&self.lo + &self.hi).mul_pow2(-1)
    }

    /// Half-width rounded up to a single dyadic.
    pub fn radius(&self) -> Dyadic {
        self.width().mul_pow2(-1)
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_int(&self, n: &BigInt) -> bool {
        self.contains(&Dyadic::from_int(n.clone()))
    }

    pub fn contains_interval(&self, other: &Real) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certainly `> 0`.
    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    /// Certainly `< 0`.
    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certainly `self > other`.
    pub fn gt(&self, other: &Real) -> bool {
        self.lo > other.hi
    }

    /// Certainly `self < other`.
    pub fn lt(&self, other: &Real) -> bool {
        self.hi < other.lo
    }

    /// Certainly `self <= other`.
    pub fn le(&self, other: &Real) -> bool {
        self.hi <= other.lo
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64(Round::Up)
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64(Round::Nearest)
    }

    pub fn abs(&self) -> Real {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = self.lo.abs().max(self.hi.abs());
            Real { lo: Dyadic::zero(), hi: m, prec: self.prec }
        } else if self.hi.signum() <= 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn sqr(&self) -> Real {
        if self.contains_zero() {
            let m = self.lo.abs().max(self.hi.abs());
            Real::new(Dyadic::zero(), &m * &m, self.prec)
        } else {
            self * self
        }
    }

    pub fn powi(&self, mut n: u32) -> Real {
        let mut base = self.clone();
        let mut acc = Real::one(self.prec);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn recip(&self) -> Real {
        Real::one(self.prec) / self
    }

    pub fn max(&self, other: &Real) -> Real {
        Real {
            lo: self.lo.clone().max(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn min(&self, other: &Real) -> Real {
        Real {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().min(other.hi.clone()),
            prec: self.prec.max(other.prec),
        }
    }

    pub fn mul_pow2(&self, k: i64) -> Real {
        Real { lo: self.lo.mul_pow2(k), hi: self.hi.mul_pow2(k), prec: self.prec }
    }

    pub fn sqrt(&self) -> Real {
        assert!(!self.hi.is_negative(), "square root of a negative interval");
        let lo = if self.lo.is_negative() { Dyadic::zero() } else { self.lo.clone() };
        Real {
            lo: lo.sqrt(self.prec, Round::Down),
            hi: self.hi.sqrt(self.prec, Round::Up),
            prec: self.prec,
        }
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Real {
        assert!(self.is_positive(), "logarithm of a non-positive interval");
        let lo = ln_point(&self.lo, self.prec);
        let hi = if self.hi == self.lo { lo.clone() } else { ln_point(&self.hi, self.prec) };
        Real { lo: lo.lo, hi: hi.hi, prec: self.prec }
    }

    pub fn exp(&self) -> Real {
        let lo = exp_point(&self.lo, self.prec);
        let hi = if self.hi == self.lo { lo.clone() } else { exp_point(&self.hi, self.prec) };
        let lo_end = if lo.lo.is_negative() { Dyadic::zero() } else { lo.lo };
        Real { lo: lo_end, hi: hi.hi, prec: self.prec }
    }

    /// `max(1, self)` endpointwise.
    pub fn max_one(&self) -> Real {
        self.max(&Real::one(self.prec))
    }

    /// `log max(1, self)` for a non-negative interval.
    pub fn log_plus(&self) -> Real {
        let m = self.max_one();
        if m.hi == Dyadic::one() {
            Real::zero(self.prec)
        } else {
            m.ln()
        }
    }

    /// Certified `ceil(hi)`: an integer `N` with `N >= x` for every `x` in the interval.
    pub fn ceil_hi(&self) -> BigInt {
        self.hi.ceil()
    }

    pub fn floor_lo(&self) -> BigInt {
        self.lo.floor()
    }
}

fn binop_prec(a: &Real, b: &Real) -> u32 {
    a.prec.max(b.prec)
}

impl Add for &Real {
    type Output = Real;
    fn add(self, other: &Real) -> Real {
        Real::new(&self.lo + &other.lo, &self.hi + &other.hi, binop_prec(self, other))
    }
}

impl Sub for &Real {
    type Output = Real;
    fn sub(self, other: &Real) -> Real {
        Real::new(&self.lo - &other.hi, &self.hi - &other.lo, binop_prec(self, other))
    }
}

impl Mul for &Real {
    type Output = Real;
    fn mul(self, other: &Real) -> Real {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().cloned().unwrap();
        let hi = c.iter().max().cloned().unwrap();
        Real::new(lo, hi, binop_prec(self, other))
    }
}

impl Div for &Real {
    type Output = Real;
    fn div(self, other: &Real) -> Real {
        assert!(!other.contains_zero(), "interval division by an interval containing zero");
        let p = binop_prec(self, other);
        let ends = [(&self.lo, &other.lo), (&self.lo, &other.hi), (&self.hi, &other.lo), (&self.hi, &other.hi)];
        let lo = ends.iter().map(|(a, b)| a.div(b, p, Round::Down)).min().unwrap();
        let hi = ends.iter().map(|(a, b)| a.div(b, p, Round::Up)).max().unwrap();
        Real { lo, hi, prec: p }
    }
}

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { lo: -&self.hi, hi: -&self.lo, prec: self.prec }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, other: $ty) -> $ty { (&self).$m(&other) }
        }
        impl $tr<&$ty> for $ty {
            type Output = $ty;
            fn $m(self, other: &$ty) -> $ty { (&self).$m(other) }
        }
        impl $tr<$ty> for &$ty {
            type Output = $ty;
            fn $m(self, other: $ty) -> $ty { self.$m(&other) }
        }
    )*};
}

forward_owned!(Real, Add add, Sub sub, Mul mul, Div div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", self.lo_f64(), self.hi_f64())
    }
}

fn ln2_cache() -> &'static Mutex<HashMap<u32, Real>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Real>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Enclosure of `ln 2` at `prec` bits.
pub fn ln2(prec: u32) -> Real {
    if let Some(v) = ln2_cache().lock().unwrap().get(&prec) {
        return v.clone();
    }
    // ln 2 = 2 atanh(1/3)
    let wp = prec + GUARD_BITS;
    let z = Real::from_ratio(1, 3, wp);
    let v = atanh_series(&z, wp).mul_pow2(1).with_prec(prec);
    ln2_cache().lock().unwrap().insert(prec, v.clone());
    v
}

/// `atanh(z)` for `|z| <= 1/2`, with an explicit tail bound.
fn atanh_series(z: &Real, wp: u32) -> Real {
    let z2 = z.sqr();
    let mut pow = z.clone();
    let mut sum = Real::zero(wp);
    let eps = Dyadic::one().mul_pow2(-(wp as i64) - 8);
    let mut j: i64 = 0;
    loop {
        let term = &pow / &Real::from_i64(2 * j + 1, wp);
        sum = &sum + &term;
        pow = &pow * &z2;
        j += 1;
        let mag = pow.abs().hi.clone();
        if mag < eps {
            // tail <= |z|^(2j+1) / (1 - z^2) <= 2 |z|^(2j+1) for |z| <= 1/2
            let t = mag.mul_pow2(1);
            let tail = Real::new(-&t, t, wp);
            return &sum + &tail;
        }
    }
}

fn ln_point(x: &Dyadic, prec: u32) -> Real {
    assert!(x.is_positive());
    let wp = prec + GUARD_BITS + 8;
    // x = y * 2^k with y in [1/sqrt2, sqrt2)
    let mut k = x.exp + x.bits() as i64;
    let mut y = x.mul_pow2(-k);
    // y in [1/2, 1): double it when y^2 < 1/2
    if (&y * &y).mul_pow2(1) < Dyadic::one() {
        y = y.mul_pow2(1);
        k -= 1;
    }
    let y = Real::point(y, wp);
    let one = Real::one(wp);
    let z = (&y - &one) / (&y + &one);
    let ln_y = atanh_series(&z, wp).mul_pow2(1);
    let res = &ln_y + &(&ln2(wp) * &Real::from_i64(k, wp));
    res.with_prec(prec)
}

fn exp_point(x: &Dyadic, prec: u32) -> Real {
    if x.is_zero() {
        return Real::one(prec);
    }
    let xf = x.to_f64(Round::Nearest);
    assert!(xf.abs() < 1e9, "exp argument out of supported range");
    let k = (xf / std::f64::consts::LN_2).round() as i64;
    let wp = prec + GUARD_BITS + 8 + (64 - k.unsigned_abs().leading_zeros());
    let r = &Real::point(x.clone(), wp) - &(&ln2(wp) * &Real::from_i64(k, wp));
    // halve to |r| < 2^-8 and square back
    let halvings = 8u32;
    let r = r.mul_pow2(-(halvings as i64));
    let mut term = Real::one(wp);
    let mut sum = Real::one(wp);
    let eps = Dyadic::one().mul_pow2(-(wp as i64) - 8);
    let mut j = 1i64;
    loop {
        term = &(&term * &r) / &Real::from_i64(j, wp);
        sum = &sum + &term;
        j += 1;
        let mag = term.abs().hi.clone();
        if mag < eps {
            let t = mag.mul_pow2(1);
            sum = &sum + &Real::new(-&t, t, wp);
            break;
        }
    }
    for _ in 0..halvings {
        sum = sum.sqr();
    }
    sum.mul_pow2(k).with_prec(prec)
}

/// Rectangular complex interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    pub re: Real,
    pub im: Real,
}

impl Complex {
    pub fn new(re: Real, im: Real) -> Self {
        Complex { re, im }
    }

    pub fn from_real(re: Real) -> Self {
        let p = re.prec();
        Complex { re, im: Real::zero(p) }
    }

    pub fn zero(prec: u32) -> Self {
        Complex::from_real(Real::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        Complex::from_real(Real::one(prec))
    }

    /// The square `[c.re +- r] x [c.im +- r]` around a dyadic center.
    pub fn ball(re: &Dyadic, im: &Dyadic, r: &Dyadic, prec: u32) -> Self {
        Complex {
            re: Real::new(re - r, re + r, prec),
            im: Real::new(im - r, im + r, prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn conj(&self) -> Complex {
        Complex { re: self.re.clone(), im: -&self.im }
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re.sqr() + &self.im.sqr()
    }

    /// Modulus `|z|`.
    pub fn abs(&self) -> Real {
        if self.im.lo().is_zero() && self.im.hi().is_zero() {
            return self.re.abs();
        }
        self.norm_sqr().sqrt()
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn sqr(&self) -> Complex {
        let re = &self.re.sqr() - &self.im.sqr();
        let im = (&self.re * &self.im).mul_pow2(1);
        Complex { re, im }
    }

    pub fn powi(&self, mut n: u32) -> Complex {
        let mut base = self.clone();
        let mut acc = Complex::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn scale(&self, k: &Real) -> Complex {
        Complex { re: &self.re * k, im: &self.im * k }
    }

    pub fn recip(&self) -> Complex {
        let d = self.norm_sqr();
        Complex { re: &self.re / &d, im: -(&self.im / &d) }
    }
}

impl Add for &Complex {
    type Output = Complex;
    fn add(self, o: &Complex) -> Complex {
        Complex { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &Complex {
    type Output = Complex;
    fn sub(self, o: &Complex) -> Complex {
        Complex { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &Complex {
    type Output = Complex;
    fn mul(self, o: &Complex) -> Complex {
        Complex {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }
}

impl Div for &Complex {
    type Output = Complex;
    fn div(self, o: &Complex) -> Complex {
        if o.im.lo().is_zero() && o.im.hi().is_zero() {
            return Complex { re: &self.re / &o.re, im: &self.im / &o.re };
        }
        let d = o.norm_sqr();
        let n = self * &o.conj();
        Complex { re: &n.re / &d, im: &n.im / &d }
    }
}

impl Neg for &Complex {
    type Output = Complex;
    fn neg(self) -> Complex {
        Complex { re: -&self.re, im: -&self.im }
    }
}

forward_owned!(Complex, Add add, Sub sub, Mul mul, Div div);
