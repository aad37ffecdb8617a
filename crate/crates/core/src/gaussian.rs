//! Gaussian belief algebra over 2-D and 3-D positions, symmetric
//! eigendecomposition, and the chi-squared / normal special functions used by
//! every probability computation in this crate.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use statrs::function::erf::erf;

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

/// A Gaussian distribution over a position: mean and covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBelief {
    pub mean: Vector,
    pub cov: Matrix,
}

impl GaussianBelief {
    /// Validates symmetry and positive semidefiniteness of the covariance.
    pub fn new(mean: Vector, cov: Matrix) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch(mean.len(), cov.nrows()));
        }
        check_symmetric(&cov)?;
        let (eigs, _) = eigen_sym(&cov)?;
        let trace: f64 = cov.diagonal().iter().sum();
        let floor = -1e-10 * trace.max(1.0);
        if eigs.iter().any(|&l| l < floor) {
            return Err(Error::DegenerateCovariance);
        }
        if mean.iter().any(|v| !v.is_finite()) || cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("non-finite belief entries".into()));
        }
        Ok(Self { mean, cov })
    }

    /// A point-mass belief (zero covariance).
    pub fn deterministic(mean: Vector) -> Self {
        let n = mean.len();
        Self {
            mean,
            cov: Matrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Belief of the difference a − b of two independent Gaussians.
pub fn relative_belief(a: &GaussianBelief, b: &GaussianBelief) -> Result<GaussianBelief> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok(GaussianBelief {
        mean: &a.mean - &b.mean,
        cov: &a.cov + &b.cov,
    })
}

fn check_symmetric(m: &Matrix) -> Result<()> {
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Asymmetric);
            }
        }
    }
    Ok(())
}

/// Eigendecomposition of a symmetric matrix: eigenvalues in descending order
/// with matching orthonormal eigenvector columns.
///
/// 2×2 uses the closed-form quadratic, 3×3 the trigonometric closed form,
/// falling back to cyclic Jacobi sweeps when eigenvalues are nearly
/// degenerate (or for larger matrices).
pub fn eigen_sym(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    check_symmetric(m)?;
    let n = m.nrows();
    let (vals, vecs) = match n {
        1 => (vec![m[(0, 0)]], Matrix::identity(1, 1)),
        2 => eigen2(m),
        3 => match eigen3_closed(m) {
            Some(res) => res,
            None => jacobi(m),
        },
        _ => jacobi(m),
    };
    Ok(sort_descending(vals, vecs))
}

fn sort_descending(vals: Vec<f64>, vecs: Matrix) -> (Vec<f64>, Matrix) {
    let n = vals.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let sorted: Vec<f64> = idx.iter().map(|&i| vals[i]).collect();
    let mut q = Matrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        q.set_column(col, &vecs.column(i));
    }
    (sorted, q)
}

fn eigen2(m: &Matrix) -> (Vec<f64>, Matrix) {
    let (a, b, c) = (m[(0, 0)], m[(0, 1)], m[(1, 1)]);
    let half_trace = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let l1 = half_trace + disc;
    let l2 = half_trace - disc;
    let mut q = Matrix::identity(2, 2);
    if disc > 1e-300 && b.abs() > 0.0 {
        // eigenvector of l1: pick the better-conditioned row of (M - l1 I)
        let v = if (l1 - a).abs() > (l1 - c).abs() {
            Vector::from_vec(vec![b, l1 - a])
        } else {
            Vector::from_vec(vec![l1 - c, b])
        };
        let v = v.normalize();
        q[(0, 0)] = v[0];
        q[(1, 0)] = v[1];
        q[(0, 1)] = -v[1];
        q[(1, 1)] = v[0];
    } else if a < c {
        // diagonal with swapped order
        q = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
    }
    (vec![l1, l2], q)
}

/// Trigonometric closed form for symmetric 3×3; returns None when the
/// eigenvalue gaps are too small to trust the cross-product eigenvectors.
fn eigen3_closed(m: &Matrix) -> Option<(Vec<f64>, Matrix)> {
    use std::f64::consts::PI;
    let p1 = m[(0, 1)].powi(2) + m[(0, 2)].powi(2) + m[(1, 2)].powi(2);
    let q = m.trace() / 3.0;
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1e-300);
    if p1 <= f64::MIN_POSITIVE || p1 < (1e-14 * scale).powi(2) {
        // effectively diagonal
        let vals = vec![m[(0, 0)], m[(1, 1)], m[(2, 2)]];
        return Some((vals, Matrix::identity(3, 3)));
    }
    let p2 = (m[(0, 0)] - q).powi(2) + (m[(1, 1)] - q).powi(2) + (m[(2, 2)] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let b = (m - Matrix::identity(3, 3) * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    let vals = [l1, l2, l3];
    // relative gap check drives the Jacobi fallback
    let gap_scale = vals
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(1e-300);
    let min_gap = (l1 - l2).abs().min((l2 - l3).abs());
    if min_gap < 1e-9 * gap_scale {
        return None;
    }
    let mut q_mat = Matrix::zeros(3, 3);
    for (col, &lam) in vals.iter().enumerate() {
        let v = eigvec3(m, lam)?;
        q_mat.set_column(col, &v.column(0));
    }
    // re-orthonormalize (Gram-Schmidt) to hit the 1e-10 contract
    let c0 = q_mat.column(0).normalize();
    let mut c1 = q_mat.column(1) - &c0 * c0.dot(&q_mat.column(1));
    c1.normalize_mut();
    let mut c2 = q_mat.column(2) - &c0 * c0.dot(&q_mat.column(2)) - &c1 * c1.dot(&q_mat.column(2));
    c2.normalize_mut();
    q_mat.set_column(0, &c0);
    q_mat.set_column(1, &c1);
    q_mat.set_column(2, &c2);
    Some((vals.to_vec(), q_mat))
}

/// Eigenvector of a 3×3 symmetric matrix for eigenvalue `lam`, via the largest
/// cross product of rows of (M − λI).
fn eigvec3(m: &Matrix, lam: f64) -> Option<Matrix> {
    let a = m - Matrix::identity(3, 3) * lam;
    let r0 = nalgebra::Vector3::new(a[(0, 0)], a[(0, 1)], a[(0, 2)]);
    let r1 = nalgebra::Vector3::new(a[(1, 0)], a[(1, 1)], a[(1, 2)]);
    let r2 = nalgebra::Vector3::new(a[(2, 0)], a[(2, 1)], a[(2, 2)]);
    let c01 = r0.cross(&r1);
    let c02 = r0.cross(&r2);
    let c12 = r1.cross(&r2);
    let (mut best, mut best_n) = (c01, c01.norm_squared());
    if c02.norm_squared() > best_n {
        best = c02;
        best_n = c02.norm_squared();
    }
    if c12.norm_squared() > best_n {
        best = c12;
        best_n = c12.norm_squared();
    }
    if best_n < 1e-60 {
        return None;
    }
    let v = best / best_n.sqrt();
    Some(Matrix::from_column_slice(3, 1, &[v[0], v[1], v[2]]))
}

/// Cyclic Jacobi sweeps with accumulated rotations.
fn jacobi(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut q = Matrix::identity(n, n);
    for _sweep in 0..64 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off < 1e-26 * (a.trace().abs().max(1.0)).powi(2) {
            break;
        }
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[(p, r)];
                if apr.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(r, r)] - a[(p, p)]) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akr = a[(k, r)];
                    a[(k, p)] = c * akp - s * akr;
                    a[(k, r)] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let ark = a[(r, k)];
                    a[(p, k)] = c * apk - s * ark;
                    a[(r, k)] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[(k, p)];
                    let qkr = q[(k, r)];
                    q[(k, p)] = c * qkp - s * qkr;
                    q[(k, r)] = s * qkp + c * qkr;
                }
            }
        }
    }
    let vals = (0..n).map(|i| a[(i, i)]).collect();
    (vals, q)
}

/// Largest eigenvalue of a symmetric matrix.
pub fn max_eigenvalue(m: &Matrix) -> Result<f64> {
    let (vals, _) = eigen_sym(m)?;
    Ok(vals[0])
}

/// λ_max(Σ⁻¹) computed as 1/λ_min(Σ) without forming the inverse.
///
/// Rejects Σ with λ_min below 1e−12·trace as degenerate.
pub fn lambda_max_of_inverse(sigma: &Matrix) -> Result<f64> {
    let (vals, _) = eigen_sym(sigma)?;
    let lam_min = *vals.last().unwrap();
    let trace: f64 = sigma.diagonal().iter().sum();
    if lam_min <= 1e-12 * trace.max(1e-300) || lam_min <= 0.0 {
        return Err(Error::DegenerateCovariance);
    }
    Ok(1.0 / lam_min)
}

/// Symmetric PSD square root via eigendecomposition (negative round-off
/// eigenvalues clipped to zero).
pub fn sqrt_psd(m: &Matrix) -> Result<Matrix> {
    let (vals, q) = eigen_sym(m)?;
    let n = m.nrows();
    let mut d = Matrix::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        d[(i, i)] = l.max(0.0).sqrt();
    }
    Ok(&q * d * q.transpose())
}

/// Chi-squared cdf for 2 or 3 degrees of freedom (closed forms).
pub fn chi2_cdf(x: f64, dof: usize) -> Result<f64> {
    if x <= 0.0 {
        return match dof {
            2 | 3 => Ok(0.0),
            _ => Err(Error::UnsupportedDof(dof)),
        };
    }
    match dof {
        2 => Ok(1.0 - (-x / 2.0).exp()),
        3 => {
            let v = erf((x / 2.0).sqrt())
                - (2.0 / std::f64::consts::PI).sqrt() * x.sqrt() * (-x / 2.0).exp();
            Ok(v.clamp(0.0, 1.0))
        }
        _ => Err(Error::UnsupportedDof(dof)),
    }
}

/// Chi-squared density, used by the inverse cdf's Newton refinement.
fn chi2_pdf(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    match dof {
        2 => 0.5 * (-x / 2.0).exp(),
        3 => (x / (2.0 * std::f64::consts::PI)).sqrt() * (-x / 2.0).exp(),
        _ => unreachable!(),
    }
}

/// Inverse chi-squared cdf by bisection refined with Newton steps.
pub fn chi2_inv_cdf(eps: f64, dof: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidProbability(eps));
    }
    if dof != 2 && dof != 3 {
        return Err(Error::UnsupportedDof(dof));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while chi2_cdf(hi, dof)? < eps {
        hi *= 2.0;
        if hi > 1e8 {
            break;
        }
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if chi2_cdf(mid, dof)? < eps {
            lo = mid;
        } else {
            hi = mid;
        }
        // Newton polish once the bracket is tight enough for it to stay inside
        if hi - lo < 1e-6 {
            let x = 0.5 * (lo + hi);
            let f = chi2_cdf(x, dof)? - eps;
            let d = chi2_pdf(x, dof);
            if d > 0.0 {
                let x_new = x - f / d;
                if x_new > lo && x_new < hi {
                    if f > 0.0 {
                        hi = x;
                    } else {
                        lo = x;
                    }
                    if chi2_cdf(x_new, dof)? < eps {
                        lo = lo.max(x_new);
                    } else {
                        hi = hi.min(x_new);
                    }
                }
            }
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Standard normal cdf Φ(z).
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Density of N(mu, sigma) evaluated at x.
pub fn gaussian_pdf(x: &Vector, b: &GaussianBelief) -> Result<f64> {
    let n = b.dim();
    let (vals, q) = eigen_sym(&b.cov)?;
    let trace: f64 = b.cov.diagonal().iter().sum();
    if vals.iter().any(|&l| l <= 1e-12 * trace.max(1e-300)) {
        return Err(Error::DegenerateCovariance);
    }
    let d = x - &b.mean;
    let y = q.transpose() * d;
    let mut quad = 0.0;
    let mut logdet = 0.0;
    for i in 0..n {
        quad += y[i] * y[i] / vals[i];
        logdet += vals[i].ln();
    }
    let log_norm = -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + logdet);
    Ok((log_norm - 0.5 * quad).exp())
}
