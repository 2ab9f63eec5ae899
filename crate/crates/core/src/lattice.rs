//! Exact-arithmetic LLL reduction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::interval::Real;

/// A full-rank integer lattice; `basis[j]` is the `j`-th basis vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    basis: Vec<Vec<BigInt>>,
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

fn to_rat(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

/// Nearest integer, ties away from zero.
fn round_rat(q: &BigRational) -> BigInt {
    let two = BigInt::from(2);
    let num = q.numer() * &two + q.denom();
    num.div_floor(&(q.denom() * two))
}

/// Gram–Schmidt data: orthogonal vectors, their squared norms and the `mu` coefficients.
pub struct GramSchmidt {
    pub ortho: Vec<Vec<BigRational>>,
    pub norms: Vec<BigRational>,
    pub mu: Vec<Vec<BigRational>>,
}

impl IntegerLattice {
    /// Basis from vectors; fails if they are not linearly independent or not all of the same length.
    pub fn new(basis: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = basis.len();
        if m == 0 || basis.iter().any(|v| v.len() != m) {
            return Err(Error::InvalidInput("lattice basis must be square".into()));
        }
        let lat = IntegerLattice { basis };
        if lat.gram_schmidt().norms.iter().any(Zero::is_zero) {
            return Err(Error::SingularBasis);
        }
        Ok(lat)
    }

    /// Basis vectors given as matrix columns.
    pub fn from_columns(matrix: &[Vec<BigInt>]) -> Result<Self> {
        let m = matrix.len();
        let cols = (0..m).map(|j| (0..m).map(|i| matrix[i][j].clone()).collect()).collect();
        Self::new(cols)
    }

    pub fn from_i64(basis: &[&[i64]]) -> Result<Self> {
        Self::new(basis.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn norm_sqr(&self, j: usize) -> BigInt {
        dot(&self.basis[j], &self.basis[j])
    }

    pub fn gram_schmidt(&self) -> GramSchmidt {
        let m = self.basis.len();
        let mut ortho: Vec<Vec<BigRational>> = Vec::with_capacity(m);
        let mut norms: Vec<BigRational> = Vec::with_capacity(m);
        let mut mu = vec![vec![BigRational::zero(); m]; m];
        for i in 0..m {
            let bi = to_rat(&self.basis[i]);
            let mut v = bi.clone();
            for j in 0..i {
                if norms[j].is_zero() {
                    continue;
                }
                let c = rdot(&bi, &ortho[j]) / &norms[j];
                for (x, y) in v.iter_mut().zip(&ortho[j]) {
                    *x -= &c * y;
                }
                mu[i][j] = c;
            }
            mu[i][i] = BigRational::one();
            norms.push(rdot(&v, &v));
            ortho.push(v);
        }
        GramSchmidt { ortho, norms, mu }
    }

    /// Absolute value of the determinant (square root of the Gram determinant).
    pub fn det_sqr(&self) -> BigRational {
        self.gram_schmidt().norms.iter().fold(BigRational::one(), |acc, n| acc * n)
    }

    /// Coordinates of `y` in this basis.
    pub fn coordinates(&self, y: &[BigInt]) -> Vec<BigRational> {
        let m = self.basis.len();
        // Solve sum_j s_j b_j = y by Gaussian elimination over Q.
        let mut a: Vec<Vec<BigRational>> = (0..m)
            .map(|i| {
                let mut row: Vec<BigRational> =
                    (0..m).map(|j| BigRational::from_integer(self.basis[j][i].clone())).collect();
                row.push(BigRational::from_integer(y[i].clone()));
                row
            })
            .collect();
        for col in 0..m {
            let pivot = (col..m).find(|&r| !a[r][col].is_zero()).expect("nonsingular");
            a.swap(col, pivot);
            let p = a[col][col].clone();
            for x in a[col].iter_mut() {
                *x /= &p;
            }
            for r in 0..m {
                if r != col && !a[r][col].is_zero() {
                    let f = a[r][col].clone();
                    let pivot_row = a[col].clone();
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
        }
        a.into_iter().map(|row| row[m].clone()).collect()
    }

    /// Whether `v` is an integer combination of the basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).iter().all(|c| c.is_integer())
    }
}

/// LLL-reduces the basis with parameter `delta` in `(1/4, 1)`.
pub fn lll_reduce(lattice: &IntegerLattice, delta: &BigRational) -> Result<IntegerLattice> {
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    if *delta <= quarter || *delta >= BigRational::one() {
        return Err(Error::InvalidInput("delta must lie in (1/4, 1)".into()));
    }
    let mut b = lattice.basis.clone();
    let m = b.len();
    let mut gs = IntegerLattice { basis: b.clone() }.gram_schmidt();
    if gs.norms.iter().any(Zero::is_zero) {
        return Err(Error::SingularBasis);
    }
    let mut k = 1;
    while k < m {
        for j in (0..k).rev() {
            let q = round_rat(&gs.mu[k][j]);
            if !q.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &q * y;
                }
                let qr = BigRational::from_integer(q);
                for l in 0..=j {
                    let t = &qr * &gs.mu[j][l];
                    gs.mu[k][l] -= t;
                }
            }
        }
        let mu = &gs.mu[k][k - 1];
        if gs.norms[k] >= (delta - mu * mu) * &gs.norms[k - 1] {
            k += 1;
        } else {
            b.swap(k, k - 1);
            gs = IntegerLattice { basis: b.clone() }.gram_schmidt();
            k = (k - 1).max(1);
        }
    }
    Ok(IntegerLattice { basis: b })
}

pub fn default_delta() -> BigRational {
    BigRational::new(BigInt::from(3), BigInt::from(4))
}

/// Rational lower bound for `||b_1|| / 2^{(m-1)/2}`, a lower bound on the shortest nonzero vector
/// of a `3/4`-reduced basis.
pub fn shortest_vector_floor(reduced: &IntegerLattice) -> BigRational {
    let prec = 128;
    let m = reduced.dimension();
    let n = Real::from_int(reduced.norm_sqr(0), prec).sqrt();
    let scale = Real::from_int(2, prec).sqrt().powi((m - 1) as u32);
    (&n / &scale).lo().to_rational()
}

/// Lower bound on the distance from `y` to the lattice, by projecting onto the last
/// Gram–Schmidt directions. Zero when `y` lies in the lattice.
pub fn distance_lower_bound(lattice: &IntegerLattice, y: &[BigInt], prec: u32) -> Real {
    let gs = lattice.gram_schmidt();
    let sigma = lattice.coordinates(y);
    fn rec(level: usize, sigma: &[BigRational], gs: &GramSchmidt, prec: u32) -> Real {
        let s = &sigma[level];
        let norm = Real::from_rational(&gs.norms[level], prec).sqrt();
        if !s.is_integer() {
            let frac = s - BigRational::from_integer(s.floor().to_integer());
            let dist = if frac > BigRational::new(BigInt::one(), BigInt::from(2)) {
                BigRational::one() - frac
            } else {
                frac
            };
            return &Real::from_rational(&dist, prec) * &norm;
        }
        if level == 0 {
            return Real::zero(prec);
        }
        // sigma_level integral: a lattice point with a different last coefficient is at least
        // ||b*_level|| away, otherwise the problem drops to the first `level` vectors.
        let inner = rec(level - 1, sigma, gs, prec);
        norm.min(&inner)
    }
    let d = rec(sigma.len() - 1, &sigma, &gs, prec);
    if d.lo().is_negative() {
        Real::zero(prec)
    } else {
        d
    }
}
