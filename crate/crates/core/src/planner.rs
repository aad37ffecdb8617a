//! Receding-horizon planner: single shooting over the control sequence with a
//! quadratic-penalty treatment of the per-step, per-obstacle collision
//! constraint. Gradients are analytic (dynamics Jacobians chained backwards).

use crate::collision::{constraint_margin, ProbabilityEstimate};
use crate::error::{Error, Result};
use crate::gaussian::{
    chi2_inv_cdf, eigen_sym, lambda_max_of_inverse, GaussianBelief, Matrix, Vector,
};
use crate::propagation::{
    motion_jacobians, propagate_horizon, step, wrap_angle, BeliefState, Model,
};

/// Box bounds on the control input.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlBounds {
    pub lower: Vector,
    pub upper: Vector,
}

impl ControlBounds {
    pub fn new(lower: Vector, upper: Vector) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(lower.len(), upper.len()));
        }
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidConfig("empty control box".into()));
        }
        Ok(Self { lower, upper })
    }

    /// v ∈ [v_min, v_max], ω ∈ [−ω_max, ω_max].
    pub fn unicycle(v_min: f64, v_max: f64, omega_max: f64) -> Self {
        Self {
            lower: Vector::from_vec(vec![v_min, -omega_max]),
            upper: Vector::from_vec(vec![v_max, omega_max]),
        }
    }

    /// Per-axis |a| ≤ a_max.
    pub fn double_integrator(a_max: f64) -> Self {
        Self {
            lower: Vector::from_vec(vec![-a_max; 3]),
            upper: Vector::from_vec(vec![a_max; 3]),
        }
    }

    pub fn clamp(&self, u: &mut Vector) {
        for i in 0..u.len() {
            u[i] = u[i].clamp(self.lower[i], self.upper[i]);
        }
    }
}

/// Quadratic stage/terminal cost weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSpec {
    pub position: f64,
    pub control: f64,
    pub terminal: f64,
}

impl CostSpec {
    pub fn new(position: f64, control: f64, terminal: f64) -> Result<Self> {
        if position < 0.0 || control < 0.0 || terminal < 0.0 {
            return Err(Error::InvalidConfig(
                "cost weights must be nonnegative".into(),
            ));
        }
        if position == 0.0 && control == 0.0 && terminal == 0.0 {
            return Err(Error::InvalidConfig(
                "at least one cost weight must be positive".into(),
            ));
        }
        Ok(Self {
            position,
            control,
            terminal,
        })
    }
}

impl Default for CostSpec {
    fn default() -> Self {
        Self {
            position: 1.0,
            control: 0.05,
            terminal: 10.0,
        }
    }
}

/// Per look-ahead step Gaussian belief of an obstacle center, plus its
/// radius. Forecasts shorter than the horizon are extended by holding the
/// last belief.
#[derive(Debug, Clone)]
pub struct ObstacleForecast {
    pub steps: Vec<GaussianBelief>,
    pub radius: f64,
}

impl ObstacleForecast {
    /// Zero-velocity forecast for a static body.
    pub fn stationary(center: GaussianBelief, radius: f64) -> Self {
        Self {
            steps: vec![center],
            radius,
        }
    }

    fn at(&self, l: usize) -> &GaussianBelief {
        self.steps
            .get(l)
            .unwrap_or_else(|| self.steps.last().unwrap())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverStatus {
    Converged,
    IterationCapped,
    InfeasibleRelaxed,
}

/// How collision avoidance enters the optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstraintMode {
    /// Chance constraint with probability threshold ε.
    Chance { eps: f64 },
    /// Inflated-sphere overlap margin with k·σ inflation.
    BoundingVolume { k_sigma: f64 },
}

/// Result of one planning call.
#[derive(Debug, Clone)]
pub struct HorizonPlan {
    pub controls: Vec<Vector>,
    pub states: Vec<Vector>,
    /// margins[l−1][i] is the constraint margin at step l against obstacle i.
    pub margins: Vec<Vec<f64>>,
    pub cost: f64,
    pub status: SolverStatus,
}

pub struct PlanRequest<'a> {
    pub model: Model,
    pub belief: &'a BeliefState,
    pub goal: &'a Vector,
    pub obstacles: &'a [ObstacleForecast],
    pub mode: ConstraintMode,
    pub bounds: &'a ControlBounds,
    pub cost: CostSpec,
    pub horizon: usize,
    pub dt: f64,
    pub process_noise: &'a Matrix,
    pub warm_start: Option<&'a HorizonPlan>,
    pub robot_radius: f64,
}

const MAX_ITERS: usize = 800;
/// Worst margin violation still reported as feasible; the quadratic penalty
/// leaves a residual violation of this order at its optimum.
const FEASIBLE_TOL: f64 = 1e-6;

/// Chance-constrained plan (the Eq.-17-style problem).
#[allow(clippy::too_many_arguments)]
pub fn plan(
    model: Model,
    belief: &BeliefState,
    goal: &Vector,
    obstacles: &[ObstacleForecast],
    eps: f64,
    bounds: &ControlBounds,
    cost: CostSpec,
    horizon: usize,
    dt: f64,
    process_noise: &Matrix,
    robot_radius: f64,
    warm_start: Option<&HorizonPlan>,
) -> Result<HorizonPlan> {
    plan_with_mode(&PlanRequest {
        model,
        belief,
        goal,
        obstacles,
        mode: ConstraintMode::Chance { eps },
        bounds,
        cost,
        horizon,
        dt,
        process_noise,
        warm_start,
        robot_radius,
    })
}

/// Constraint data frozen per planning call (the last-loop approximation):
/// per step and obstacle, the quantities needed to evaluate the margin and
/// its gradient without touching the decision variables.
struct FrozenConstraint {
    /// obstacle mean position at this step
    obs_mean: Vector,
    /// squared contact distance
    alpha: f64,
    /// chance mode: λ_max(Σ_w⁻¹); bounding mode: inflated contact distance
    scalar: f64,
    /// penalty activation band: the penalty engages while the margin is below
    /// this positive value, so the solver feels the obstacle shortly before
    /// the boundary and picks up a lateral push-away direction
    band: f64,
    /// penalty normalization so the penalty works in squared-distance units
    /// regardless of the margin's λ scaling
    weight: f64,
}

/// Constant-control sequence that arcs to one side, used as an extra descent
/// start when obstacles are present.
fn arc_start(model: Model, req: &PlanRequest<'_>, sign: f64, horizon: usize) -> Vec<Vector> {
    let mut u = Vector::zeros(model.control_dim());
    match model {
        Model::Unicycle => {
            u[0] = 0.5 * (req.bounds.lower[0] + req.bounds.upper[0]);
            u[1] = sign * 0.5 * req.bounds.upper[1];
        }
        Model::DoubleIntegrator3d => {
            let dx = req.goal[0] - req.belief.mean[0];
            let dy = req.goal[1] - req.belief.mean[1];
            let n = (dx * dx + dy * dy).sqrt();
            let (px, py) = if n > 1e-9 {
                (-dy / n, dx / n)
            } else {
                (1.0, 0.0)
            };
            u[0] = sign * 0.5 * req.bounds.upper[0] * px;
            u[1] = sign * 0.5 * req.bounds.upper[1] * py;
        }
    }
    req.bounds.clamp(&mut u);
    vec![u; horizon]
}

/// Greedy goal-seeking feedback rollout used as a descent start. For the
/// unicycle this turns toward the goal bearing before driving, which plain
/// gradient steps cannot discover from a stopped, facing-away state.
fn aim_start(model: Model, req: &PlanRequest<'_>, horizon: usize) -> Vec<Vector> {
    let cdim = model.control_dim();
    let dt = req.dt;
    let mut x = req.belief.mean.clone();
    let mut controls = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut u = Vector::zeros(cdim);
        match model {
            Model::Unicycle => {
                let dx = req.goal[0] - x[0];
                let dy = req.goal[1] - x[1];
                let dist = (dx * dx + dy * dy).sqrt();
                let err = wrap_angle(dy.atan2(dx) - x[2]);
                u[1] = (err / dt).clamp(req.bounds.lower[1], req.bounds.upper[1]);
                let v = if err.abs() < 0.8 { dist / dt } else { 0.0 };
                u[0] = v.clamp(req.bounds.lower[0], req.bounds.upper[0]);
            }
            Model::DoubleIntegrator3d => {
                for i in 0..3 {
                    let a = 2.0 * (req.goal[i] - x[i]) - 2.0 * x[i + 3];
                    u[i] = a.clamp(req.bounds.lower[i], req.bounds.upper[i]);
                }
            }
        }
        x = step(model, &x, &u, dt);
        controls.push(u);
    }
    controls
}

pub fn plan_with_mode(req: &PlanRequest<'_>) -> Result<HorizonPlan> {
    let model = req.model;
    let horizon = req.horizon;
    if horizon == 0 {
        return Err(Error::InvalidConfig("horizon must be >= 1".into()));
    }
    if let ConstraintMode::Chance { eps } = req.mode {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidProbability(eps));
        }
    }
    let pdim = model.position_dim();
    let cdim = model.control_dim();
    if req.goal.len() != pdim {
        return Err(Error::DimensionMismatch(req.goal.len(), pdim));
    }
    for obs in req.obstacles {
        if obs.steps.is_empty() || obs.radius <= 0.0 {
            return Err(Error::InvalidConfig("malformed obstacle forecast".into()));
        }
        for b in &obs.steps {
            if b.dim() != pdim {
                return Err(Error::DimensionMismatch(b.dim(), pdim));
            }
        }
    }

    // initial controls
    let mut controls: Vec<Vector> = match req.warm_start {
        Some(ws) if ws.controls.len() == horizon && ws.controls[0].len() == cdim => {
            ws.controls.clone()
        }
        _ => vec![Vector::zeros(cdim); horizon],
    };
    for u in &mut controls {
        req.bounds.clamp(u);
    }

    // last-loop horizon covariances of the robot position
    let horizon_beliefs =
        propagate_horizon(model, req.belief, &controls, req.dt, req.process_noise);

    // freeze everything decision-independent about the constraints
    let threshold = match req.mode {
        ConstraintMode::Chance { eps } => chi2_inv_cdf(eps, pdim)?,
        ConstraintMode::BoundingVolume { .. } => 0.0,
    };
    let mut frozen: Vec<Vec<FrozenConstraint>> = Vec::with_capacity(horizon);
    for l in 1..=horizon {
        let robot_cov = horizon_beliefs[l].position_cov(model);
        let mut row = Vec::with_capacity(req.obstacles.len());
        for obs in req.obstacles {
            let ob = obs.at(l);
            let r_sum = req.robot_radius + obs.radius;
            let scalar = match req.mode {
                ConstraintMode::Chance { .. } => {
                    let sigma_w = &robot_cov + &ob.cov;
                    lambda_max_of_inverse(&sigma_w)?
                }
                ConstraintMode::BoundingVolume { k_sigma } => {
                    let (vr, _) = eigen_sym(&robot_cov)?;
                    let (vs, _) = eigen_sym(&ob.cov)?;
                    r_sum + k_sigma * (vr[0].max(0.0).sqrt() + vs[0].max(0.0).sqrt())
                }
            };
            let band = match req.mode {
                // 5% of the contact area in squared-distance units
                ConstraintMode::Chance { .. } => scalar * 0.05 * r_sum * r_sum,
                ConstraintMode::BoundingVolume { .. } => 0.05 * r_sum,
            };
            let weight = match req.mode {
                ConstraintMode::Chance { .. } => 1.0 / (scalar * scalar),
                ConstraintMode::BoundingVolume { .. } => 1.0,
            };
            row.push(FrozenConstraint {
                obs_mean: ob.mean.clone(),
                alpha: r_sum * r_sum,
                scalar,
                band,
                weight,
            });
        }
        frozen.push(row);
    }

    let margin_of = |x_rel: &Vector, c: &FrozenConstraint| -> f64 {
        match req.mode {
            ConstraintMode::Chance { .. } => {
                threshold - c.scalar * (c.alpha - x_rel.norm_squared())
            }
            ConstraintMode::BoundingVolume { .. } => x_rel.norm() - c.scalar,
        }
    };
    // gradient of the margin with respect to the position
    let margin_grad = |x_rel: &Vector, c: &FrozenConstraint| -> Vector {
        match req.mode {
            ConstraintMode::Chance { .. } => x_rel * (2.0 * c.scalar),
            ConstraintMode::BoundingVolume { .. } => {
                let n = x_rel.norm();
                if n > 1e-12 {
                    x_rel / n
                } else {
                    Vector::zeros(x_rel.len())
                }
            }
        }
    };

    let rollout = |u: &[Vector]| -> Vec<Vector> {
        let mut states = Vec::with_capacity(horizon + 1);
        states.push(req.belief.mean.clone());
        for l in 0..horizon {
            let next = step(model, &states[l], &u[l], req.dt);
            states.push(next);
        }
        states
    };
    let position_of = |x: &Vector| Vector::from_iterator(pdim, (0..pdim).map(|i| x[i]));

    let margins_of = |states: &[Vector]| -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(horizon);
        for l in 1..=horizon {
            let p = position_of(&states[l]);
            out.push(
                frozen[l - 1]
                    .iter()
                    .map(|c| margin_of(&(&p - &c.obs_mean), c))
                    .collect(),
            );
        }
        out
    };

    let tracking_cost = |states: &[Vector], u: &[Vector]| -> f64 {
        let mut j = 0.0;
        for l in 0..horizon {
            let p = position_of(&states[l]);
            j += req.cost.position * (&p - req.goal).norm_squared();
            j += req.cost.control * u[l].norm_squared();
        }
        j += req.cost.terminal * (&position_of(&states[horizon]) - req.goal).norm_squared();
        j
    };
    let penalty_of = |margins: &[Vec<f64>], rho: f64| -> f64 {
        let mut p = 0.0;
        for (row, crow) in margins.iter().zip(frozen.iter()) {
            for (&g, c) in row.iter().zip(crow.iter()) {
                if g < c.band {
                    let d = g - c.band;
                    p += rho * c.weight * d * d;
                }
            }
        }
        p
    };
    let worst_violation = |margins: &[Vec<f64>]| -> f64 {
        margins
            .iter()
            .flat_map(|r| r.iter())
            .fold(0.0f64, |acc, &g| acc.max(-g))
    };

    // gradient of J + penalty via a backward (adjoint) pass
    let gradient = |states: &[Vector], u: &[Vector], rho: f64| -> Vec<Vector> {
        let sdim = model.state_dim();
        let mut direct: Vec<Vector> = vec![Vector::zeros(sdim); horizon + 1];
        for l in 1..=horizon {
            let p = position_of(&states[l]);
            let mut d = Vector::zeros(sdim);
            if l < horizon {
                let dp = (&p - req.goal) * (2.0 * req.cost.position);
                for i in 0..pdim {
                    d[i] += dp[i];
                }
            } else {
                let dp = (&p - req.goal) * (2.0 * req.cost.terminal);
                for i in 0..pdim {
                    d[i] += dp[i];
                }
            }
            for c in &frozen[l - 1] {
                let x_rel = &p - &c.obs_mean;
                let g = margin_of(&x_rel, c);
                if g < c.band {
                    let mg = margin_grad(&x_rel, c) * (2.0 * rho * c.weight * (g - c.band));
                    for i in 0..pdim {
                        d[i] += mg[i];
                    }
                }
            }
            direct[l] = d;
        }
        let mut grads = vec![Vector::zeros(cdim); horizon];
        let mut lambda = direct[horizon].clone();
        for l in (0..horizon).rev() {
            let (f, g) = motion_jacobians(model, &states[l], &u[l], req.dt);
            grads[l] = &u[l] * (2.0 * req.cost.control) + g.transpose() * &lambda;
            lambda = &direct[l] + f.transpose() * lambda;
        }
        grads
    };

    // per-run best iterates
    struct RunResult {
        feasible: Option<(f64, Vec<Vector>)>,
        any: (f64, f64, Vec<Vector>),
        converged: bool,
    }

    let run_descent = |init: Vec<Vector>| -> RunResult {
        let mut controls = init;
        // rho acts on squared-distance deficits (see FrozenConstraint::weight)
        let mut rho = 1e4;
        let mut alpha: f64 = 0.1;
        let mut states = rollout(&controls);
        let mut margins = margins_of(&states);
        let mut j = tracking_cost(&states, &controls);
        let mut phi = j + penalty_of(&margins, rho);

        let mut best_feasible: Option<(f64, Vec<Vector>)> = None;
        let mut best_any: Option<(f64, f64, Vec<Vector>)> = None;
        let mut converged = false;
        let record = |viol: f64,
                      j: f64,
                      u: &Vec<Vector>,
                      best_feasible: &mut Option<(f64, Vec<Vector>)>,
                      best_any: &mut Option<(f64, f64, Vec<Vector>)>| {
            if viol <= FEASIBLE_TOL {
                match best_feasible {
                    Some((bj, _)) if *bj <= j => {}
                    _ => *best_feasible = Some((j, u.clone())),
                }
            }
            match best_any {
                Some((bv, bj, _)) if (*bv, *bj) <= (viol, j) => {}
                _ => *best_any = Some((viol, j, u.clone())),
            }
        };
        record(
            worst_violation(&margins),
            j,
            &controls,
            &mut best_feasible,
            &mut best_any,
        );

        let mut iters = 0;
        // heavy-ball momentum over the descent direction
        let mut velocity = vec![Vector::zeros(cdim); horizon];
        let mut stagnant = 0usize;
        while iters < MAX_ITERS {
            iters += 1;
            let grads = gradient(&states, &controls, rho);
            let mut improved = false;
            let mut with_momentum = velocity.iter().any(|w| w.norm_squared() > 0.0);
            'search: loop {
                let dir: Vec<Vector> = if with_momentum {
                    velocity
                        .iter()
                        .zip(grads.iter())
                        .map(|(w, g)| w * 0.8 + g)
                        .collect()
                } else {
                    grads.clone()
                };
                let mut trial_alpha = (alpha * 2.0).min(1.0);
                for _ in 0..20 {
                    let mut trial: Vec<Vector> = controls
                        .iter()
                        .zip(dir.iter())
                        .map(|(u, d)| u - d * trial_alpha)
                        .collect();
                    for u in &mut trial {
                        req.bounds.clamp(u);
                    }
                    let t_states = rollout(&trial);
                    let t_margins = margins_of(&t_states);
                    let t_j = tracking_cost(&t_states, &trial);
                    let t_phi = t_j + penalty_of(&t_margins, rho);
                    if t_phi < phi - 1e-14 {
                        if phi - t_phi < 1e-6 * (1.0 + phi.abs()) {
                            stagnant += 1;
                        } else {
                            stagnant = 0;
                        }
                        controls = trial;
                        states = t_states;
                        margins = t_margins;
                        j = t_j;
                        phi = t_phi;
                        alpha = trial_alpha;
                        velocity = dir;
                        improved = true;
                        break 'search;
                    }
                    trial_alpha *= 0.5;
                }
                if with_momentum {
                    // momentum direction failed, retry with plain gradient
                    with_momentum = false;
                    for w in &mut velocity {
                        w.fill(0.0);
                    }
                } else {
                    break;
                }
            }
            let viol = worst_violation(&margins);
            record(viol, j, &controls, &mut best_feasible, &mut best_any);
            if !improved || stagnant >= 8 {
                if viol > FEASIBLE_TOL && rho < 1e8 {
                    rho *= 2.0;
                    phi = j + penalty_of(&margins, rho);
                    alpha = alpha.max(1e-4);
                    stagnant = 0;
                } else {
                    converged = true;
                    break;
                }
            }
        }
        RunResult {
            feasible: best_feasible,
            any: best_any.unwrap(),
            converged,
        }
    };

    let mut results = vec![run_descent(controls.clone())];
    results.push(run_descent(aim_start(model, req, horizon)));
    if !req.obstacles.is_empty() {
        // symmetry-breaking arc starts so head-on geometries still resolve
        for sign in [1.0f64, -1.0] {
            results.push(run_descent(arc_start(model, req, sign, horizon)));
        }
    }

    let any_converged = results.iter().any(|r| r.converged);
    let best_feasible = results
        .iter()
        .filter_map(|r| r.feasible.as_ref())
        .min_by(|a, b| a.0.total_cmp(&b.0));
    // keep the warm-started solution unless another start is clearly better;
    // sticking with the incumbent keeps successive receding-horizon calls
    // (and the trajectories broadcast to other robots) consistent
    let chosen_feasible = match (results[0].feasible.as_ref(), best_feasible) {
        (Some(warm), Some(best)) if warm.0 <= 1.05 * best.0 + 0.5 => Some(warm),
        (_, best) => best,
    };

    let mut status = if any_converged {
        SolverStatus::Converged
    } else {
        SolverStatus::IterationCapped
    };
    let final_controls = match chosen_feasible {
        Some((_, u)) => u.clone(),
        None => {
            status = SolverStatus::InfeasibleRelaxed;
            results
                .iter()
                .map(|r| &r.any)
                .min_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap())
                .map(|(_, _, u)| u.clone())
                .unwrap()
        }
    };
    let final_states = rollout(&final_controls);
    let final_margins = margins_of(&final_states);
    let final_cost = tracking_cost(&final_states, &final_controls);
    Ok(HorizonPlan {
        controls: final_controls,
        states: final_states,
        margins: final_margins,
        cost: final_cost,
        status,
    })
}

/// Shifts a previous plan one step for use as the next warm start: controls
/// advance by one with the last duplicated, and the states are re-rolled from
/// the new initial state.
pub fn shift_warm_start(
    previous: &HorizonPlan,
    model: Model,
    new_initial_state: &Vector,
    dt: f64,
) -> HorizonPlan {
    let mut controls: Vec<Vector> = previous.controls.iter().skip(1).cloned().collect();
    if let Some(last) = previous.controls.last() {
        controls.push(last.clone());
    }
    let mut states = Vec::with_capacity(controls.len() + 1);
    states.push(new_initial_state.clone());
    for (l, u) in controls.iter().enumerate() {
        let next = step(model, &states[l], u, dt);
        states.push(next);
    }
    HorizonPlan {
        controls,
        states,
        margins: Vec::new(),
        cost: f64::NAN,
        status: previous.status,
    }
}

/// Re-evaluates the quadratic tracking cost of a plan.
pub fn evaluate_cost(plan: &HorizonPlan, model: Model, goal: &Vector, cost: CostSpec) -> f64 {
    let pdim = model.position_dim();
    let horizon = plan.controls.len();
    let pos = |x: &Vector| Vector::from_iterator(pdim, (0..pdim).map(|i| x[i]));
    let mut j = 0.0;
    for l in 0..horizon {
        j += cost.position * (&pos(&plan.states[l]) - goal).norm_squared();
        j += cost.control * plan.controls[l].norm_squared();
    }
    j + cost.terminal * (&pos(&plan.states[horizon]) - goal).norm_squared()
}

/// Cross-check helper: the per-step margin evaluated at the plan's own
/// predicted relative mean, matching [`constraint_margin`].
pub fn margin_at_mean(x_rel: &Vector, sigma_w: &Matrix, alpha: f64, eps: f64) -> Result<f64> {
    constraint_margin(x_rel, x_rel, sigma_w, alpha, eps)
}

/// Convenience: wraps a value as a [`ProbabilityEstimate`] for callers that
/// report margins alongside probabilities.
pub fn margin_estimate(value: f64) -> ProbabilityEstimate {
    ProbabilityEstimate {
        value: value.clamp(0.0, 1.0),
        half_width_95: None,
        wall_time: 0.0,
    }
}
