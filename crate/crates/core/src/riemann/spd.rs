//! Floating-point kernels: symmetric eigensolver, SPD exp/log/sqrt, polar
//! decomposition, general matrix logarithm, and rationalization.

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactmat::{to_f64, Mat, Rational};

/// Converts an exact matrix to `f64`.
pub fn to_dmatrix(m: &Mat) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| to_f64(&m[(i, j)]))
}

/// Symmetric `f64` matrix; asymmetry above `1e-12` is rejected, the rest is averaged away.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatF {
    m: DMatrix<f64>,
}

impl SymMatF {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Numeric("symmetric matrix must be square".into()));
        }
        let asym = (&m - m.transpose()).abs().max();
        if asym >= 1e-12 {
            return Err(Error::Numeric(format!("matrix is not symmetric (asymmetry {asym:e})")));
        }
        let s = (&m + m.transpose()) * 0.5;
        Ok(SymMatF { m: s })
    }

    pub fn from_exact(m: &Mat) -> Result<Self> {
        SymMatF::new(to_dmatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        SymMatF { m: DMatrix::identity(n, n) }
    }

    pub fn zeros(n: usize) -> Self {
        SymMatF { m: DMatrix::zeros(n, n) }
    }

    pub fn n(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    fn map_eigen(&self, f: impl Fn(f64) -> f64) -> SymMatF {
        let (vals, vecs) = jacobi_eigen(self);
        let d = DMatrix::from_diagonal(&vals.map(f));
        let out = &vecs * d * vecs.transpose();
        SymMatF {
            m: (&out + out.transpose()) * 0.5,
        }
    }

    fn require_pd(&self, what: &str) -> Result<()> {
        let (vals, _) = jacobi_eigen(self);
        let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        if self.n() > 0 && min <= 1e-12 {
            return Err(Error::Numeric(format!("{what} needs a positive-definite matrix (min eigenvalue {min:e})")));
        }
        Ok(())
    }
}

/// Cyclic Jacobi rotations; returns ascending eigenvalues and orthonormal eigenvectors (columns).
pub fn jacobi_eigen(s: &SymMatF) -> (DVector<f64>, DMatrix<f64>) {
    let n = s.n();
    let mut a = s.m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[(p, q)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = DVector::from_iterator(n, order.iter().map(|&i| a[(i, i)]));
    let vecs = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

pub fn spd_exp(y: &SymMatF) -> SymMatF {
    y.map_eigen(f64::exp)
}

pub fn spd_log(p: &SymMatF) -> Result<SymMatF> {
    p.require_pd("spd_log")?;
    Ok(p.map_eigen(f64::ln))
}

pub fn spd_sqrt(p: &SymMatF) -> Result<SymMatF> {
    p.require_pd("spd_sqrt")?;
    Ok(p.map_eigen(f64::sqrt))
}

/// `m = P Q` with `P = sqrt(m m^T)` positive definite and `Q` orthogonal.
pub fn polar_decompose(m: &DMatrix<f64>) -> Result<(SymMatF, DMatrix<f64>)> {
    if !m.is_square() {
        return Err(Error::Numeric("polar decomposition needs a square matrix".into()));
    }
    let det = m.determinant();
    if det.abs() <= 1e-12 {
        return Err(Error::Numeric(format!("matrix is numerically singular (det {det:e})")));
    }
    let p = spd_sqrt(&SymMatF::new(m * m.transpose())?)?;
    let pinv = p
        .m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numeric("polar factor is singular".into()))?;
    let q = pinv * m;
    Ok((p, q))
}

/// Principal square root by the Denman–Beavers iteration.
fn db_sqrt(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = DMatrix::<f64>::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse().ok_or_else(|| Error::Numeric("singular iterate in square root".into()))?;
        let zi = z.clone().try_inverse().ok_or_else(|| Error::Numeric("singular iterate in square root".into()))?;
        let y2 = (&y + zi) * 0.5;
        let z2 = (&z + yi) * 0.5;
        let delta = (&y2 - &y).norm();
        y = y2;
        z = z2;
        if delta <= 1e-15 * y.norm().max(1.0) {
            return Ok(y);
        }
    }
    if (&y * &y - a).norm() < 1e-10 * a.norm().max(1.0) {
        Ok(y)
    } else {
        Err(Error::Numeric("square root iteration did not converge".into()))
    }
}

/// Principal logarithm of a general real matrix by inverse scaling and squaring.
pub fn general_log(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if !a.is_square() {
        return Err(Error::Numeric("logarithm needs a square matrix".into()));
    }
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let mut x = a.clone();
    let mut k = 0;
    while (&x - &id).norm() > 0.25 {
        if k >= 60 {
            return Err(Error::Numeric("logarithm: too many square roots".into()));
        }
        x = db_sqrt(&x)?;
        k += 1;
    }
    let e = &x - &id;
    let mut term = e.clone();
    let mut sum = DMatrix::<f64>::zeros(n, n);
    for j in 1..=60 {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        sum += &term * (sign / j as f64);
        term = &term * &e;
        if term.norm() < 1e-18 {
            break;
        }
    }
    let out = sum * 2f64.powi(k);
    if (out.clone().exp() - a).norm() > 1e-8 * a.norm().max(1.0) {
        return Err(Error::Numeric("logarithm failed to reproduce its input".into()));
    }
    Ok(out)
}

/// Best rational approximation with denominator at most `max_den` (continued fractions).
pub fn rationalize(x: f64, max_den: u64) -> Rational {
    if !x.is_finite() {
        return Rational::from_integer(BigInt::from(0));
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e18 {
            break;
        }
        let ai = a as i128;
        let h2 = ai * h1 + h0;
        let k2 = ai * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = r - a;
        if frac.abs() < 1e-15 || (h1 as f64 / k1 as f64 - x).abs() < 1e-15 * x.abs().max(1.0) {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return Rational::from_integer(BigInt::from(x.round() as i64));
    }
    Rational::new(BigInt::from(h1), BigInt::from(k1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::ratio;

    #[test]
    fn eigen_of_identity_and_diagonal_log() {
        let (vals, _) = jacobi_eigen(&SymMatF::identity(3));
        assert!(vals.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let e = std::f64::consts::E;
        let d = SymMatF::new(DMatrix::from_diagonal(&DVector::from_vec(vec![e, e, 1.0]))).unwrap();
        let l = spd_log(&d).unwrap();
        let want = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0]));
        assert!((l.matrix() - want).norm() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, -2.0, 1.0, 3.0, 0.5, -2.0, 0.5, 5.0]);
        let s = SymMatF::new(m.clone()).unwrap();
        let (vals, vecs) = jacobi_eigen(&s);
        let back = &vecs * DMatrix::from_diagonal(&vals) * vecs.transpose();
        assert!((back - m).norm() < 1e-12);
        assert!((vecs.transpose() * &vecs - DMatrix::identity(3, 3)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SymMatF::new(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])).is_err());
        let indefinite = SymMatF::new(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0])).unwrap();
        assert!(spd_log(&indefinite).is_err());
        assert!(spd_sqrt(&indefinite).is_err());
        assert!(polar_decompose(&DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0])).is_err());
    }

    #[test]
    fn polar_trivial_cases() {
        let (c, s) = (0.6, 0.8);
        let q = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let (p, q2) = polar_decompose(&q).unwrap();
        assert!((p.matrix() - DMatrix::identity(2, 2)).norm() < 1e-12);
        assert!((q2 - &q).norm() < 1e-12);
        let spd = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let (p, q3) = polar_decompose(&spd).unwrap();
        assert!((p.matrix() - &spd).norm() < 1e-12);
        assert!((q3 - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn general_log_of_rotation() {
        let t = 0.7f64;
        let r = DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()]);
        let l = general_log(&r).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[0.0, -t, t, 0.0]);
        assert!((l - want).norm() < 1e-12);
    }

    #[test]
    fn rationalize_examples() {
        assert_eq!(rationalize(0.5, 1000), ratio(1, 2));
        assert_eq!(rationalize(-0.75, 1000), ratio(-3, 4));
        assert_eq!(rationalize(3.0, 10), ratio(3, 1));
        assert_eq!(rationalize(1.0 / 3.0, 1_000_000), ratio(1, 3));
        let pi = rationalize(std::f64::consts::PI, 1000);
        assert_eq!(pi, ratio(355, 113));
    }
}
