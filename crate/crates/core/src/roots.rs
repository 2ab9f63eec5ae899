//! Certified isolation of all complex roots of an integer polynomial.
//!
//! Approximations come from the Weierstrass (Durand–Kerner) iteration, first
//! in `f64` and then at the working precision. Certification uses the fact
//! that for a squarefree polynomial with leading coefficient `c` and pairwise
//! distinct points `z_i`, the discs
//! `D(z_i - W_i, (n - 1)|W_i|)` with `W_i = q(z_i) / (c * prod_{j != i} (z_i - z_j))`
//! are Gerschgorin discs of a matrix whose eigenvalues are the roots of `q`:
//! their union holds every root, and an isolated disc holds exactly one.

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::interval::{Complex, Dyadic, Real, Round, DEFAULT_PRECISION};
use crate::poly::{squarefree_decomposition, IntegerPolynomial};

/// Largest precision tried by [`isolate_roots_auto`].
pub const MAX_PRECISION: u32 = 8192;

/// A disc certified to contain exactly one distinct root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootEnclosure {
    pub center_re: Dyadic,
    pub center_im: Dyadic,
    pub radius: Dyadic,
    pub multiplicity: usize,
    pub is_real: bool,
    pub modulus: Real,
    prec: u32,
}

impl RootEnclosure {
    /// Rectangle containing the root. Real roots get an exactly-zero imaginary part.
    pub fn enclosure(&self) -> Complex {
        if self.is_real {
            Complex::from_real(Real::new(
                &self.center_re - &self.radius,
                &self.center_re + &self.radius,
                self.prec,
            ))
        } else {
            Complex::ball(&self.center_re, &self.center_im, &self.radius, self.prec)
        }
    }

    /// Real interval for a certified-real root.
    pub fn real_enclosure(&self) -> Option<Real> {
        self.is_real.then(|| self.enclosure().re)
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn center_f64(&self) -> (f64, f64) {
        (self.center_re.to_f64(Round::Nearest), self.center_im.to_f64(Round::Nearest))
    }

    /// Whether this disc and `other` are certainly disjoint.
    pub fn disjoint_from(&self, other: &RootEnclosure) -> bool {
        discs_disjoint(
            (&self.center_re, &self.center_im, &self.radius),
            (&other.center_re, &other.center_im, &other.radius),
        )
    }

    /// Whether the point lies in the closed disc.
    pub fn contains_point(&self, re: &Dyadic, im: &Dyadic) -> bool {
        let dr = re - &self.center_re;
        let di = im - &self.center_im;
        &(&dr * &dr) + &(&di * &di) <= &self.radius * &self.radius
    }
}

fn discs_disjoint(a: (&Dyadic, &Dyadic, &Dyadic), b: (&Dyadic, &Dyadic, &Dyadic)) -> bool {
    let dr = a.0 - b.0;
    let di = a.1 - b.1;
    let dist2 = &(&dr * &dr) + &(&di * &di);
    let rs = a.2 + b.2;
    dist2 > &rs * &rs
}

/// Isolates all roots at one working precision.
pub fn isolate_roots(poly: &IntegerPolynomial, precision: u32) -> Result<Vec<RootEnclosure>> {
    if poly.degree() == 0 {
        return Err(Error::InvalidPolynomial("constant polynomial has no roots".into()));
    }
    let fail = || Error::PrecisionExhausted { max_bits: precision };
    let mut out: Vec<RootEnclosure> = Vec::new();
    for (factor, mult) in squarefree_decomposition(poly) {
        let approx = refine(&factor, &initial_approximations(&factor), precision).ok_or_else(fail)?;
        let discs = certify(&factor, &approx, precision).ok_or_else(fail)?;
        for (re, im, r, is_real) in discs {
            let prec = precision;
            let modulus = if is_real {
                Real::new(&re - &r, &re + &r, prec).abs()
            } else {
                let c = Complex::new(Real::point(re.clone(), prec), Real::point(im.clone(), prec)).abs();
                let rr = Real::point(r.clone(), prec);
                let lo = &c - &rr;
                let hi = &c + &rr;
                let lo_end = if lo.lo().is_negative() { Dyadic::zero() } else { lo.lo().clone() };
                Real::new(lo_end, hi.hi().clone(), prec)
            };
            let (center_im, radius) = if is_real { (Dyadic::zero(), r) } else { (im, r) };
            out.push(RootEnclosure {
                center_re: re,
                center_im,
                radius,
                multiplicity: mult,
                is_real,
                modulus,
                prec,
            });
        }
    }
    for i in 0..out.len() {
        for j in i + 1..out.len() {
            if !out[i].disjoint_from(&out[j]) {
                return Err(fail());
            }
        }
    }
    out.sort_by(|a, b| {
        b.modulus
            .hi()
            .cmp(a.modulus.hi())
            .then_with(|| b.center_im.cmp(&a.center_im))
            .then_with(|| b.center_re.cmp(&a.center_re))
    });
    Ok(out)
}

/// Isolates roots starting at [`DEFAULT_PRECISION`] and doubling up to [`MAX_PRECISION`].
pub fn isolate_roots_auto(poly: &IntegerPolynomial) -> Result<Vec<RootEnclosure>> {
    isolate_roots_from(poly, DEFAULT_PRECISION)
}

pub fn isolate_roots_from(poly: &IntegerPolynomial, start: u32) -> Result<Vec<RootEnclosure>> {
    let mut p = start.max(64);
    loop {
        match isolate_roots(poly, p) {
            Err(Error::PrecisionExhausted { .. }) if p < MAX_PRECISION => p = (p * 2).min(MAX_PRECISION),
            Err(Error::PrecisionExhausted { .. }) => return Err(Error::PrecisionExhausted { max_bits: MAX_PRECISION }),
            other => return other,
        }
    }
}

type C64 = (f64, f64);

fn cmul(a: C64, b: C64) -> C64 {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C64, b: C64) -> C64 {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn initial_approximations(q: &IntegerPolynomial) -> Vec<C64> {
    let n = q.degree();
    let c: Vec<f64> = q.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let lead = c[n];
    if n == 1 {
        return vec![(-c[0] / lead, 0.0)];
    }
    // Fujiwara-type bound
    let bound = (0..n)
        .map(|i| (c[i] / lead).abs().powf(1.0 / (n - i) as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let bound = if bound.is_finite() && bound > 0.0 { bound } else { 1.0 };
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            (0.9 * bound * t.cos(), 0.9 * bound * t.sin())
        })
        .collect();
    let eval = |x: C64| c.iter().rev().fold((0.0, 0.0), |acc, &a| {
        let m = cmul(acc, x);
        (m.0 + a, m.1)
    });
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = (lead, 0.0);
            for j in 0..n {
                if i != j {
                    den = cmul(den, (z[i].0 - z[j].0, z[i].1 - z[j].1));
                }
            }
            let w = cdiv(eval(z[i]), den);
            if w.0.is_finite() && w.1.is_finite() {
                z[i] = (z[i].0 - w.0, z[i].1 - w.1);
                delta = delta.max(w.0.hypot(w.1) / z[i].0.hypot(z[i].1).max(1.0));
            }
        }
        if delta < 1e-15 {
            break;
        }
    }
    z
}

fn point(re: &Dyadic, im: &Dyadic, prec: u32) -> Complex {
    Complex::new(Real::point(re.clone(), prec), Real::point(im.clone(), prec))
}

/// Interval enclosure of the Weierstrass correction at each point.
fn corrections(q: &IntegerPolynomial, z: &[(Dyadic, Dyadic)], prec: u32) -> Option<Vec<Complex>> {
    let n = z.len();
    let lead = Complex::from_real(Real::from_int(q.leading().clone(), prec));
    let pts: Vec<Complex> = z.iter().map(|(a, b)| point(a, b, prec)).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = lead.clone();
        for j in 0..n {
            if i != j {
                den = &den * &(&pts[i] - &pts[j]);
            }
        }
        if den.contains_zero() {
            return None;
        }
        out.push(&q.eval_complex(&pts[i]) / &den);
    }
    Some(out)
}

fn refine(q: &IntegerPolynomial, start: &[C64], prec: u32) -> Option<Vec<(Dyadic, Dyadic)>> {
    if start.iter().any(|c| !c.0.is_finite() || !c.1.is_finite()) {
        return None;
    }
    let wp = prec + 32;
    let mut z: Vec<(Dyadic, Dyadic)> =
        start.iter().map(|&(a, b)| (Dyadic::from_f64(a), Dyadic::from_f64(b))).collect();
    let tol = Dyadic::one().mul_pow2(-(prec as i64) - 4);
    for _ in 0..(64 + 2 * prec.ilog2() as usize) {
        let mut done = true;
        for i in 0..z.len() {
            let w = corrections(q, &z, wp)?;
            let (wr, wi) = (w[i].re.mid(), w[i].im.mid());
            let scale = z[i].0.abs().max(z[i].1.abs()).max(Dyadic::one());
            if wr.abs().max(wi.abs()) > &scale * &tol {
                done = false;
            }
            z[i] = ((&z[i].0 - &wr).round(wp, Round::Nearest), (&z[i].1 - &wi).round(wp, Round::Nearest));
        }
        if done {
            return Some(z);
        }
    }
    Some(z)
}

/// Certified discs `(center_re, center_im, radius, is_real)` for a squarefree factor.
fn certify(q: &IntegerPolynomial, z: &[(Dyadic, Dyadic)], prec: u32) -> Option<Vec<(Dyadic, Dyadic, Dyadic, bool)>> {
    let n = z.len();
    let w = corrections(q, z, prec)?;
    let mut discs = Vec::with_capacity(n);
    for i in 0..n {
        let shifted = &point(&z[i].0, &z[i].1, prec) - &w[i];
        let cr = shifted.re.mid().round(prec, Round::Nearest);
        let ci = shifted.im.mid().round(prec, Round::Nearest);
        let off = (&shifted - &point(&cr, &ci, prec)).abs();
        let spread = &w[i].abs() * &Real::from_int(n as i64 - 1, prec);
        let r = (&off + &spread).hi().clone();
        discs.push((cr, ci, r));
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = &discs[i];
            let b = &discs[j];
            if !discs_disjoint((&a.0, &a.1, &a.2), (&b.0, &b.1, &b.2)) {
                return None;
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (cr, ci, r) = &discs[i];
        let touches_axis = ci.abs() <= *r;
        if !touches_axis {
            out.push((cr.clone(), ci.clone(), r.clone(), false));
            continue;
        }
        let conj_im = -ci;
        let isolated = (0..n).filter(|&j| j != i).all(|j| {
            let d = &discs[j];
            discs_disjoint((cr, &conj_im, r), (&d.0, &d.1, &d.2))
        });
        if !isolated {
            return None;
        }
        // The root is real; re-centre on the axis with a radius covering the old disc.
        let r_real = &ci.abs() + r;
        out.push((cr.clone(), Dyadic::zero(), r_real, true));
    }
    Some(out)
}

/// Index of the unique root whose enclosure meets `v`, if exactly one does.
pub fn locate(roots: &[RootEnclosure], v: &Complex) -> Option<usize> {
    let hits: Vec<usize> = roots
        .iter()
        .enumerate()
        .filter(|(_, r)| {
            let e = r.enclosure();
            e.re.intersect(&v.re).is_some() && e.im.intersect(&v.im).is_some()
        })
        .map(|(i, _)| i)
        .collect();
    (hits.len() == 1).then(|| hits[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn p(c: &[i64]) -> IntegerPolynomial {
        IntegerPolynomial::from_i64s(c).unwrap()
    }

    #[test]
    fn golden_ratio_roots() {
        let roots = isolate_roots(&p(&[-1, -1, 1]), 256).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots.iter().all(|r| r.is_real && r.multiplicity == 1));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((roots[0].center_f64().0 - phi).abs() < 1e-15);
        assert!((roots[1].center_f64().0 - (1.0 - phi)).abs() < 1e-15);
        assert!(roots[0].radius < Dyadic::one().mul_pow2(-200));
    }

    #[test]
    fn counterexample_roots() {
        let roots = isolate_roots(&p(&[-2, 3, -3, 1]), 256).unwrap();
        assert_eq!(roots.len(), 3);
        assert!(roots[0].is_real);
        assert!(roots[0].enclosure().re.contains_int(&BigInt::from(2)));
        for r in &roots[1..] {
            assert!(!r.is_real);
            let (re, im) = r.center_f64();
            assert!((re - 0.5).abs() < 1e-15);
            assert!((im.abs() - 3f64.sqrt() / 2.0).abs() < 1e-15);
            assert!(r.modulus.contains(&Dyadic::one()));
        }
    }

    #[test]
    fn repeated_root_multiplicity() {
        let roots = isolate_roots(&p(&[1, -2, 1]), 128).unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].multiplicity, 2);
        assert!(roots[0].enclosure().re.contains(&Dyadic::one()));
    }

    #[test]
    fn close_roots_need_more_precision() {
        // (x - 1)(x - 1 - 2^-80): 2^80 x^2 - (2^81 + 1) x + (2^80 + 1)
        let two80 = BigInt::from(1) << 80;
        let mid: BigInt = &two80 * 2u32 + 1u32;
        let f = IntegerPolynomial::new(vec![&two80 + 1u32, -mid, two80]).unwrap();
        let roots = isolate_roots_from(&f, 64).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(roots[0].disjoint_from(&roots[1]));
    }

    #[test]
    fn radii_shrink_with_precision() {
        let f = p(&[-1, -1, -1, 1]);
        let a = isolate_roots(&f, 128).unwrap();
        let b = isolate_roots(&f, 256).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!(y.radius <= x.radius);
        }
    }
}
