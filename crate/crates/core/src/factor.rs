//! Irreducibility over the rationals and minimal polynomials of elements of `Q(alpha)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::interval::{Complex, Dyadic, Real};
use crate::poly::{IntegerPolynomial, RatPoly};
use crate::roots::{isolate_roots, MAX_PRECISION};

/// Primes tried by the modular irreducibility test.
pub const DEFAULT_PRIMES: &[u64] = &[
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103,
    107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199,
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Irreducibility {
    Irreducible,
    /// A proper factor was found.
    Reducible(IntegerPolynomial),
    Unverified,
}

impl Irreducibility {
    pub fn is_irreducible(&self) -> bool {
        matches!(self, Irreducibility::Irreducible)
    }

    pub fn label(&self) -> &'static str {
        match self {
            Irreducibility::Irreducible => "true",
            Irreducibility::Reducible(_) => "false",
            Irreducibility::Unverified => "unverified",
        }
    }
}

/// Decides irreducibility exactly for degree at most 4; above that, tries the
/// given primes and reports `Unverified` if none certifies it.
pub fn irreducibility(f: &IntegerPolynomial, primes: &[u64]) -> Irreducibility {
    let f = f.primitive();
    let n = f.degree();
    if n <= 1 {
        return Irreducibility::Irreducible;
    }
    if f.coeff(0).is_zero() {
        return Irreducibility::Reducible(IntegerPolynomial::linear_root(0));
    }
    if n <= 4 {
        return match small_factor(&f) {
            Some(Some(g)) => Irreducibility::Reducible(g),
            Some(None) => Irreducibility::Irreducible,
            None => Irreducibility::Unverified,
        };
    }
    if primes.iter().any(|&p| irreducible_mod_p(&f, p)) {
        Irreducibility::Irreducible
    } else {
        Irreducibility::Unverified
    }
}

fn positive_divisors(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.abs().to_u64()?;
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            out.push(BigInt::from(d));
            if d * d != n {
                out.push(BigInt::from(n / d));
            }
        }
        d += 1;
        if d > 1 << 20 {
            return None;
        }
    }
    Some(out)
}

/// Searches for a factor of degree at most `deg/2` by grouping certified roots.
/// Outer `None` means precision ran out.
fn small_factor(f: &IntegerPolynomial) -> Option<Option<IntegerPolynomial>> {
    let n = f.degree();
    let lead_divs = positive_divisors(f.leading())?;
    let mut prec = 128;
    'outer: while prec <= MAX_PRECISION {
        let roots = match isolate_roots(f, prec) {
            Ok(r) => r,
            Err(_) => {
                prec *= 2;
                continue;
            }
        };
        let mut flat: Vec<Complex> = Vec::new();
        for r in &roots {
            for _ in 0..r.multiplicity {
                flat.push(r.enclosure());
            }
        }
        for size in 1..=n / 2 {
            for subset in subsets(flat.len(), size) {
                let mut prod = vec![Complex::one(prec)];
                for &i in &subset {
                    // multiply by (x - r_i)
                    let mut next = vec![Complex::zero(prec); prod.len() + 1];
                    for (k, c) in prod.iter().enumerate() {
                        next[k + 1] = &next[k + 1] + c;
                        next[k] = &next[k] - &(c * &flat[i]);
                    }
                    prod = next;
                }
                for b in &lead_divs {
                    let bb = Real::from_int(b.clone(), prec);
                    let mut coeffs = Vec::with_capacity(prod.len());
                    for c in &prod {
                        let re = &c.re * &bb;
                        let im = &c.im * &bb;
                        if re.width() >= Dyadic::one() || im.width() >= Dyadic::one() {
                            prec *= 2;
                            continue 'outer;
                        }
                        let k = re.lo().ceil();
                        if !im.contains_zero() || !re.contains_int(&k) {
                            break;
                        }
                        coeffs.push(k);
                    }
                    if coeffs.len() < prod.len() {
                        continue;
                    }
                    if let Ok(g) = IntegerPolynomial::new(coeffs) {
                        if g.degree() >= 1 && f.exact_div(&g).is_some() {
                            return Some(Some(g.primitive()));
                        }
                    }
                }
            }
        }
        return Some(None);
    }
    None
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

type Fp = Vec<u64>;

fn fp_trim(mut a: Fp) -> Fp {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_inv(a: u64, p: u64) -> u64 {
    let (mut t, mut nt, mut r, mut nr) = (0i128, 1i128, p as i128, a as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    t.rem_euclid(p as i128) as u64
}

fn fp_rem(a: &Fp, m: &Fp, p: u64) -> Fp {
    let mut a = a.clone();
    let dm = m.len() - 1;
    let inv = fp_inv(m[dm], p);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = a[top] * inv % p;
        if c != 0 {
            for i in 0..=dm {
                let idx = top - dm + i;
                a[idx] = (a[idx] + p - c * m[i] % p) % p;
            }
        }
        a.pop();
        a = fp_trim(a);
    }
    fp_trim(a)
}

fn fp_mulmod(a: &Fp, b: &Fp, m: &Fp, p: u64) -> Fp {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    fp_rem(&fp_trim(out), m, p)
}

fn fp_gcd(a: &Fp, b: &Fp, p: u64) -> Fp {
    let (mut a, mut b) = (fp_trim(a.clone()), fp_trim(b.clone()));
    while !b.is_empty() {
        let r = fp_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

fn fp_pow_x(e: &BigInt, m: &Fp, p: u64) -> Fp {
    let mut result: Fp = fp_rem(&vec![1], m, p);
    let mut base: Fp = fp_rem(&vec![0, 1], m, p);
    let mut e = e.clone();
    let two = BigInt::from(2);
    while e.is_positive() {
        if e.is_odd() {
            result = fp_mulmod(&result, &base, m, p);
        }
        base = fp_mulmod(&base, &base, m, p);
        e = e.div_floor(&two);
    }
    result
}

/// Ben-Or test: `f mod p` keeps its degree, is squarefree and has no factor of degree `<= n/2`.
pub fn irreducible_mod_p(f: &IntegerPolynomial, p: u64) -> bool {
    let pb = BigInt::from(p);
    let fp: Fp = f.coeffs().iter().map(|c| c.mod_floor(&pb).to_u64().unwrap_or(0)).collect();
    let n = f.degree();
    if fp[n] == 0 {
        return false;
    }
    let fp = fp_trim(fp);
    let deriv: Fp = fp_trim((1..fp.len()).map(|i| (i as u64 % p) * fp[i] % p).collect());
    if deriv.is_empty() || fp_gcd(&fp, &deriv, p).len() != 1 {
        return false;
    }
    let mut q = BigInt::one();
    for _ in 1..=n / 2 {
        q *= &pb;
        let mut h = fp_pow_x(&q, &fp, p);
        // h - x
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        let h = fp_trim(h);
        if h.is_empty() || fp_gcd(&fp, &h, p).len() != 1 {
            return false;
        }
    }
    true
}

/// Characteristic polynomial of a rational square matrix (Faddeev–LeVerrier), ascending coefficients.
pub fn char_poly(a: &[Vec<BigRational>]) -> RatPoly {
    let n = a.len();
    let zero = BigRational::zero();
    let mut c = vec![zero.clone(); n + 1];
    c[n] = BigRational::one();
    let mut m = vec![vec![zero.clone(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![zero.clone(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = zero.clone();
                for l in 0..n {
                    if !a[i][l].is_zero() && !m[l][j].is_zero() {
                        s += &a[i][l] * &m[l][j];
                    }
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        m = next;
        let mut tr = zero.clone();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &m[l][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k));
    }
    RatPoly::new(c)
}

/// Minimal polynomial over Q of `e(alpha)` where `alpha` is a root of the irreducible `f`.
/// Returned primitive with positive leading coefficient.
pub fn field_element_minpoly(f: &IntegerPolynomial, e: &RatPoly) -> IntegerPolynomial {
    let fr = f.to_rational();
    let n = f.degree();
    let e = e.rem(&fr);
    let mut matrix = vec![vec![BigRational::zero(); n]; n];
    let mut col = e.clone();
    for j in 0..n {
        for (i, c) in col.coeffs().iter().enumerate() {
            matrix[i][j] = c.clone();
        }
        col = col.mul(&RatPoly::new(vec![BigRational::zero(), BigRational::one()])).rem(&fr);
    }
    let cp = char_poly(&matrix);
    let g = cp.gcd(&cp.derivative());
    let (m, _) = cp.divrem(&g);
    let mut p = m.to_primitive_integer().expect("nonzero minimal polynomial");
    if p.leading().is_negative() {
        p = IntegerPolynomial::new(p.coeffs().iter().map(|c| -c).collect()).expect("nonzero");
    }
    p
}

/// Interval value of a rational polynomial at a complex enclosure.
pub fn eval_ratpoly_complex(e: &RatPoly, z: &Complex) -> Complex {
    let prec = z.prec();
    let mut acc = Complex::zero(prec);
    for c in e.coeffs().iter().rev() {
        acc = &(&acc * z) + &Complex::from_real(Real::from_rational(c, prec));
    }
    acc
}
