//! Robot kinematics (unicycle, 3-D double integrator), EKF prediction and
//! update, and the last-loop horizon covariance propagation used by the
//! planner.

use crate::error::{Error, Result};
use crate::gaussian::{eigen_sym, Matrix, Vector};

/// Kinematic model of a simulated robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    /// State (x, y, θ), control (v, ω).
    Unicycle,
    /// State (p, v) in 3-D, control = acceleration. Stand-in for the 3-D
    /// scenarios; exactly linear, so the EKF reduces to a Kalman filter.
    DoubleIntegrator3d,
}

impl Model {
    pub fn state_dim(self) -> usize {
        match self {
            Model::Unicycle => 3,
            Model::DoubleIntegrator3d => 6,
        }
    }

    pub fn control_dim(self) -> usize {
        match self {
            Model::Unicycle => 2,
            Model::DoubleIntegrator3d => 3,
        }
    }

    /// Dimension of the position block (always the leading state entries).
    pub fn position_dim(self) -> usize {
        match self {
            Model::Unicycle => 2,
            Model::DoubleIntegrator3d => 3,
        }
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut t = theta % two_pi;
    if t <= -std::f64::consts::PI {
        t += two_pi;
    } else if t > std::f64::consts::PI {
        t -= two_pi;
    }
    t
}

/// sin(z)/z, switching to its Taylor series for small z.
fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// (cos(z) − sinc(z)) / z², switching to its Taylor series for small z.
/// This is the quantity that makes d(sinc)/dz well conditioned near zero.
fn sinc_cos_ratio(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        -1.0 / 3.0 + z2 / 30.0
    } else {
        (z.cos() - sinc(z)) / (z * z)
    }
}

/// One step of the unicycle kinematics. The exact arc displacement
/// r·(sin(θ+ωdt) − sin θ) is rewritten via the half-angle identity as
/// v·dt·sinc(ωdt/2)·cos(θ+ωdt/2), which stays fully accurate as ω → 0
/// instead of cancelling in the v/ω difference form.
pub fn unicycle_step(state: &Vector, u: &Vector, dt: f64) -> Vector {
    let (x, y, theta) = (state[0], state[1], state[2]);
    let (v, omega) = (u[0], u[1]);
    let mid = theta + 0.5 * omega * dt;
    let s = dt * sinc(0.5 * omega * dt);
    let nx = x + v * s * mid.cos();
    let ny = y + v * s * mid.sin();
    Vector::from_vec(vec![nx, ny, wrap_angle(theta + omega * dt)])
}

fn double_integrator_step(state: &Vector, u: &Vector, dt: f64) -> Vector {
    let mut next = Vector::zeros(6);
    for i in 0..3 {
        next[i] = state[i] + state[i + 3] * dt + 0.5 * u[i] * dt * dt;
        next[i + 3] = state[i + 3] + u[i] * dt;
    }
    next
}

/// Noise-free mean dynamics for either model.
pub fn step(model: Model, state: &Vector, u: &Vector, dt: f64) -> Vector {
    match model {
        Model::Unicycle => unicycle_step(state, u, dt),
        Model::DoubleIntegrator3d => double_integrator_step(state, u, dt),
    }
}

/// Analytic Jacobians (F = ∂f/∂x, G = ∂f/∂u) of [`step`].
pub fn motion_jacobians(model: Model, state: &Vector, u: &Vector, dt: f64) -> (Matrix, Matrix) {
    match model {
        Model::Unicycle => unicycle_jacobians(state, u, dt),
        Model::DoubleIntegrator3d => {
            let mut f = Matrix::identity(6, 6);
            let mut g = Matrix::zeros(6, 3);
            for i in 0..3 {
                f[(i, i + 3)] = dt;
                g[(i, i)] = 0.5 * dt * dt;
                g[(i + 3, i)] = dt;
            }
            (f, g)
        }
    }
}

fn unicycle_jacobians(state: &Vector, u: &Vector, dt: f64) -> (Matrix, Matrix) {
    let theta = state[2];
    let (v, omega) = (u[0], u[1]);
    let mut f = Matrix::identity(3, 3);
    let mut g = Matrix::zeros(3, 2);
    // Differentiate the sinc form of the step; everything below is well
    // conditioned for every ω, including the straight-line limit.
    let z = 0.5 * omega * dt;
    let mid = theta + z;
    let s = dt * sinc(z);
    // ds/dω = dt · (cos z − sinc z)/z² · z · dt/2 = sinc_cos_ratio(z) · ω·dt³/4
    let ds = sinc_cos_ratio(z) * omega * dt * dt * dt / 4.0;
    f[(0, 2)] = -v * s * mid.sin();
    f[(1, 2)] = v * s * mid.cos();
    g[(0, 0)] = s * mid.cos();
    g[(1, 0)] = s * mid.sin();
    g[(0, 1)] = v * (ds * mid.cos() - 0.5 * dt * s * mid.sin());
    g[(1, 1)] = v * (ds * mid.sin() + 0.5 * dt * s * mid.cos());
    g[(2, 1)] = dt;
    (f, g)
}

/// Gaussian state belief.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefState {
    pub mean: Vector,
    pub cov: Matrix,
}

impl BeliefState {
    pub fn new(mean: Vector, cov: Matrix) -> Self {
        Self { mean, cov }
    }

    /// Position block of the mean.
    pub fn position(&self, model: Model) -> Vector {
        let p = model.position_dim();
        Vector::from_iterator(p, (0..p).map(|i| self.mean[i]))
    }

    /// Position block of the covariance.
    pub fn position_cov(&self, model: Model) -> Matrix {
        let p = model.position_dim();
        let mut c = Matrix::zeros(p, p);
        for i in 0..p {
            for j in 0..p {
                c[(i, j)] = self.cov[(i, j)];
            }
        }
        c
    }
}

fn symmetrize(c: &Matrix) -> Matrix {
    (c + c.transpose()) * 0.5
}

/// EKF prediction: mean through the dynamics, covariance F·Σ·Fᵀ + R.
pub fn ekf_predict(model: Model, b: &BeliefState, u: &Vector, dt: f64, r: &Matrix) -> BeliefState {
    let (f, _) = motion_jacobians(model, &b.mean, u, dt);
    let mean = step(model, &b.mean, u, dt);
    let cov = symmetrize(&(&f * &b.cov * f.transpose() + r));
    BeliefState { mean, cov }
}

/// Kalman update with identity measurement (pose measured directly).
/// Joseph-form covariance update; the heading innovation is wrapped for the
/// unicycle.
pub fn ekf_update(model: Model, b: &BeliefState, z: &Vector, q: &Matrix) -> Result<BeliefState> {
    let n = b.mean.len();
    let s = &b.cov + q;
    let s_inv = s.clone().try_inverse().ok_or(Error::DegenerateCovariance)?;
    let k = &b.cov * s_inv;
    let mut innovation = z - &b.mean;
    if model == Model::Unicycle {
        innovation[2] = wrap_angle(innovation[2]);
    }
    let mut mean = &b.mean + &k * innovation;
    if model == Model::Unicycle {
        mean[2] = wrap_angle(mean[2]);
    }
    let i_k = Matrix::identity(n, n) - &k;
    let cov = symmetrize(&(&i_k * &b.cov * i_k.transpose() + &k * q * k.transpose()));
    let (eigs, _) = eigen_sym(&cov)?;
    let trace: f64 = cov.diagonal().iter().sum();
    if eigs.iter().any(|&l| l < -1e-10 * trace.max(1.0)) {
        return Err(Error::FilterDivergence);
    }
    Ok(BeliefState { mean, cov })
}

/// Propagates a belief open-loop along a control sequence (the last-loop
/// approximation): returns L+1 beliefs whose covariances the planner treats
/// as constants.
pub fn propagate_horizon(
    model: Model,
    b: &BeliefState,
    controls: &[Vector],
    dt: f64,
    r: &Matrix,
) -> Vec<BeliefState> {
    let mut out = Vec::with_capacity(controls.len() + 1);
    out.push(b.clone());
    let mut current = b.clone();
    for u in controls {
        current = ekf_predict(model, &current, u, dt, r);
        out.push(current.clone());
    }
    out
}
