//! Deterministic closed-loop multi-robot simulator: ground-truth integration
//! with noise, noisy pose measurements, per-robot EKF + MPC, trajectory
//! exchange between robots, and run metrics.

pub mod export;

use crate::collision::Body;
use crate::error::{Error, Result};
use crate::gaussian::{GaussianBelief, Matrix, Vector};
use crate::planner::{
    plan_with_mode, shift_warm_start, ConstraintMode, ControlBounds, CostSpec, HorizonPlan,
    ObstacleForecast, PlanRequest,
};
use crate::propagation::{ekf_predict, ekf_update, propagate_horizon, step, BeliefState, Model};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// One robot in a scenario file. `start` is the full pose in file units
/// (heading in degrees for the unicycle); `goal` is a position.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RobotSpec {
    pub id: String,
    pub start: Vec<f64>,
    pub goal: Vec<f64>,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstacleSpec {
    pub position: Vec<f64>,
    pub radius: f64,
    /// Diagonal position covariance, m². Omitted = deterministic obstacle.
    #[serde(default)]
    pub cov_diag: Option<Vec<f64>>,
}

fn default_seed() -> u64 {
    0
}

fn default_method() -> String {
    "bound".into()
}

/// Planner knobs with model-dependent defaults.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct PlannerSpec {
    pub horizon: Option<usize>,
    pub v_min: Option<f64>,
    pub v_max: Option<f64>,
    pub omega_max: Option<f64>,
    pub a_max: Option<f64>,
}

/// Declarative scenario description, mirroring the on-disk TOML document.
/// Angles are degrees in files and radians internally.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    /// "unicycle" or "double-integrator-3d"
    pub model: String,
    pub robots: Vec<RobotSpec>,
    #[serde(default)]
    pub static_obstacles: Vec<ObstacleSpec>,
    pub eps: f64,
    /// Diagonal measurement covariance in file units: [m², m², deg²] for the
    /// unicycle, six m²/(m/s)² entries for the double integrator.
    pub measurement_noise: Vec<f64>,
    pub noise_scale: f64,
    pub dt: f64,
    pub max_duration: f64,
    pub goal_tolerance: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Constraint method: "bound" (chance constraint) or "bounding-volume".
    #[serde(default = "default_method")]
    pub method: String,
    #[serde(default)]
    pub planner: PlannerSpec,
    /// Diagonal process noise per step; defaults to 1e-4 on every state.
    #[serde(default)]
    pub process_noise: Option<Vec<f64>>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn model(&self) -> Result<Model> {
        match self.model.as_str() {
            "unicycle" => Ok(Model::Unicycle),
            "double-integrator-3d" => Ok(Model::DoubleIntegrator3d),
            other => Err(Error::InvalidConfig(format!("unknown model '{other}'"))),
        }
    }

    pub fn constraint_mode(&self) -> Result<ConstraintMode> {
        match self.method.as_str() {
            "bound" => Ok(ConstraintMode::Chance { eps: self.eps }),
            "bounding-volume" => Ok(ConstraintMode::BoundingVolume { k_sigma: 3.0 }),
            other => Err(Error::UnknownMethod(other.into())),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let model = self.model()?;
        self.constraint_mode()?;
        if self.robots.is_empty() {
            return Err(Error::InvalidConfig("at least one robot required".into()));
        }
        let mut ids: Vec<&str> = self.robots.iter().map(|r| r.id.as_str()).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() != self.robots.len() {
            return Err(Error::InvalidConfig("robot ids must be distinct".into()));
        }
        let sdim = model.state_dim();
        let pdim = model.position_dim();
        for r in &self.robots {
            if r.radius <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "robot {}: radius must be > 0",
                    r.id
                )));
            }
            let pose_len = match model {
                Model::Unicycle => 3,
                Model::DoubleIntegrator3d => 3,
            };
            if r.start.len() != pose_len {
                return Err(Error::InvalidConfig(format!(
                    "robot {}: start must have {pose_len} entries",
                    r.id
                )));
            }
            if r.goal.len() != pdim {
                return Err(Error::InvalidConfig(format!(
                    "robot {}: goal must have {pdim} entries",
                    r.id
                )));
            }
        }
        for (i, o) in self.static_obstacles.iter().enumerate() {
            if o.radius <= 0.0 {
                return Err(Error::InvalidConfig(format!(
                    "obstacle {i}: radius must be > 0"
                )));
            }
            if o.position.len() != pdim {
                return Err(Error::InvalidConfig(format!(
                    "obstacle {i}: position must have {pdim} entries"
                )));
            }
            if let Some(cd) = &o.cov_diag {
                if cd.len() != pdim {
                    return Err(Error::InvalidConfig(format!(
                        "obstacle {i}: cov_diag must have {pdim} entries"
                    )));
                }
            }
        }
        if self.measurement_noise.len() != sdim {
            return Err(Error::InvalidConfig(format!(
                "measurement_noise must have {sdim} entries"
            )));
        }
        if self.measurement_noise.iter().any(|&v| v <= 0.0) {
            return Err(Error::InvalidConfig(
                "measurement_noise entries must be > 0".into(),
            ));
        }
        if self.dt <= 0.0 {
            return Err(Error::InvalidConfig("dt must be > 0".into()));
        }
        if self.max_duration <= 0.0 {
            return Err(Error::InvalidConfig("max_duration must be > 0".into()));
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::InvalidProbability(self.eps));
        }
        if self.noise_scale < 0.0 {
            return Err(Error::InvalidConfig("noise_scale must be >= 0".into()));
        }
        if let Some(pn) = &self.process_noise {
            if pn.len() != sdim {
                return Err(Error::InvalidConfig(format!(
                    "process_noise must have {sdim} entries"
                )));
            }
        }
        Ok(())
    }

    /// Measurement covariance in internal units (rad² for heading), scaled by
    /// `noise_scale`.
    pub fn measurement_cov(&self) -> Result<Matrix> {
        let model = self.model()?;
        let mut diag: Vec<f64> = self.measurement_noise.clone();
        if model == Model::Unicycle {
            let deg2rad = std::f64::consts::PI / 180.0;
            diag[2] *= deg2rad * deg2rad;
        }
        for v in &mut diag {
            *v *= self.noise_scale;
        }
        Ok(Matrix::from_diagonal(&Vector::from_vec(diag)))
    }

    pub fn process_cov(&self) -> Result<Matrix> {
        let model = self.model()?;
        let diag = match &self.process_noise {
            Some(pn) => pn.clone(),
            None => vec![1e-4; model.state_dim()],
        };
        Ok(Matrix::from_diagonal(&Vector::from_vec(diag)))
    }

    /// Initial ground-truth state in internal units.
    pub fn start_state(&self, robot: &RobotSpec) -> Result<Vector> {
        match self.model()? {
            Model::Unicycle => {
                let deg2rad = std::f64::consts::PI / 180.0;
                Ok(Vector::from_vec(vec![
                    robot.start[0],
                    robot.start[1],
                    robot.start[2] * deg2rad,
                ]))
            }
            Model::DoubleIntegrator3d => {
                let mut s = vec![0.0; 6];
                s[..3].copy_from_slice(&robot.start);
                Ok(Vector::from_vec(s))
            }
        }
    }

    pub fn horizon(&self) -> Result<usize> {
        Ok(self.planner.horizon.unwrap_or(match self.model()? {
            Model::Unicycle => 10,
            Model::DoubleIntegrator3d => 20,
        }))
    }

    pub fn bounds(&self) -> Result<ControlBounds> {
        Ok(match self.model()? {
            Model::Unicycle => ControlBounds::unicycle(
                self.planner.v_min.unwrap_or(0.0),
                self.planner.v_max.unwrap_or(0.5),
                self.planner.omega_max.unwrap_or(1.5),
            ),
            Model::DoubleIntegrator3d => {
                ControlBounds::double_integrator(self.planner.a_max.unwrap_or(1.0))
            }
        })
    }

    pub fn max_ticks(&self) -> usize {
        (self.max_duration / self.dt).round() as usize
    }
}

/// Per look-ahead step (mean pose, covariance) a robot broadcasts to others.
#[derive(Debug, Clone)]
pub struct TrajectoryMessage {
    pub sender: String,
    pub steps: Vec<GaussianBelief>,
}

/// One robot's record within a tick.
#[derive(Debug, Clone)]
pub struct RobotTick {
    pub ground_truth: Vector,
    pub belief_mean: Vector,
    pub belief_cov: Matrix,
    pub control: Vector,
    pub min_margin: f64,
    pub plan_time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct TickRecord {
    pub tick: usize,
    pub robots: Vec<RobotTick>,
}

/// Append-only per-tick trace of a run.
#[derive(Debug, Clone, Default)]
pub struct RunLog {
    pub records: Vec<TickRecord>,
}

#[derive(Debug, Clone)]
pub struct RobotMetrics {
    pub id: String,
    /// total trajectory length, m
    pub length: f64,
    /// trajectory duration until goal, s
    pub duration: f64,
    pub reached: bool,
    pub plan_time_mean_ms: f64,
    pub plan_time_max_ms: f64,
}

#[derive(Debug, Clone)]
pub struct RunMetrics {
    /// minimum raw center distance over all ticks and pairs
    /// (robot-robot and robot-obstacle), m
    pub min_center_distance: f64,
    pub robots: Vec<RobotMetrics>,
    pub collisions: usize,
    pub success: bool,
}

struct Agent {
    spec: RobotSpec,
    ground_truth: Vector,
    belief: BeliefState,
    goal: Vector,
    last_plan: Option<HorizonPlan>,
    last_message: TrajectoryMessage,
    last_control: Vector,
    arrived: bool,
    plan_times_ms: Vec<f64>,
}

/// Runs a scenario to completion. Fully deterministic given the config
/// (including its seed).
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<(RunMetrics, RunLog)> {
    cfg.validate()?;
    let model = cfg.model()?;
    let mode = cfg.constraint_mode()?;
    let meas_cov = cfg.measurement_cov()?;
    let proc_cov = cfg.process_cov()?;
    let horizon = cfg.horizon()?;
    let bounds = cfg.bounds()?;
    let cost = CostSpec::default();
    let cdim = model.control_dim();
    let pdim = model.position_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let static_bodies: Vec<Body> = cfg
        .static_obstacles
        .iter()
        .map(|o| {
            let mean = Vector::from_vec(o.position.clone());
            let belief = match &o.cov_diag {
                Some(cd) => {
                    GaussianBelief::new(mean, Matrix::from_diagonal(&Vector::from_vec(cd.clone())))?
                }
                None => Ok::<_, Error>(GaussianBelief::deterministic(mean))?,
            };
            Body::new(belief, o.radius)
        })
        .collect::<Result<_>>()?;

    let sample_diag_noise = |rng: &mut ChaCha8Rng, cov: &Matrix| -> Vector {
        let n = cov.nrows();
        Vector::from_iterator(
            n,
            (0..n).map(|i| {
                let z: f64 = StandardNormal.sample(rng);
                z * cov[(i, i)].sqrt()
            }),
        )
    };

    // initialize agents; initial belief = true start with measurement-level cov
    let mut agents: Vec<Agent> = Vec::with_capacity(cfg.robots.len());
    for spec in &cfg.robots {
        let gt = cfg.start_state(spec)?;
        let belief = BeliefState::new(gt.clone(), meas_cov.clone());
        let hold = hold_message(&spec.id, &belief, model, horizon);
        agents.push(Agent {
            spec: spec.clone(),
            goal: Vector::from_vec(spec.goal.clone()),
            ground_truth: gt,
            belief,
            last_plan: None,
            last_message: hold,
            last_control: Vector::zeros(cdim),
            arrived: false,
            plan_times_ms: Vec::new(),
        });
    }

    let stale_buffer = 3.0
        * cfg.dt
        * match model {
            Model::Unicycle => bounds.upper[0],
            Model::DoubleIntegrator3d => 1.0,
        };

    let mut log = RunLog::default();
    let max_ticks = cfg.max_ticks();
    for tick in 0..max_ticks {
        // 1. EKF predict (with the last applied control) + update from a
        //    noisy ground-truth measurement
        for agent in agents.iter_mut() {
            if tick > 0 {
                agent.belief =
                    ekf_predict(model, &agent.belief, &agent.last_control, cfg.dt, &proc_cov);
            }
            let noise = sample_diag_noise(&mut rng, &meas_cov);
            let z = &agent.ground_truth + noise;
            agent.belief =
                ekf_update(model, &agent.belief, &z, &meas_cov).map_err(|e| Error::AtTick {
                    tick,
                    source: Box::new(e),
                })?;
        }

        // 2. exchange last-loop trajectory messages
        let messages: Vec<TrajectoryMessage> =
            agents.iter().map(|a| a.last_message.clone()).collect();

        // 3. plan; every other robot is a dynamic obstacle, statics are
        //    zero-velocity forecasts
        let mut tick_rows: Vec<RobotTick> = Vec::with_capacity(agents.len());
        let mut controls: Vec<Vector> = Vec::with_capacity(agents.len());
        for (idx, agent) in agents.iter_mut().enumerate() {
            let dist_to_goal = {
                let p = agent.belief.position(model);
                (&p - &agent.goal).norm()
            };
            if dist_to_goal <= cfg.goal_tolerance {
                agent.arrived = true;
            }
            let (control, min_margin, plan_ms) = if agent.arrived {
                agent.last_plan = None;
                agent.last_message = hold_message(&agent.spec.id, &agent.belief, model, horizon);
                (Vector::zeros(cdim), f64::INFINITY, 0.0)
            } else {
                let mut forecasts: Vec<ObstacleForecast> = Vec::new();
                for (j, msg) in messages.iter().enumerate() {
                    if j == idx {
                        continue;
                    }
                    // one-tick staleness: drop the first (past) step
                    let steps: Vec<GaussianBelief> = if msg.steps.len() > 1 {
                        msg.steps[1..].to_vec()
                    } else {
                        msg.steps.clone()
                    };
                    // inflate by the distance the sender can move during one
                    // tick of message staleness
                    forecasts.push(ObstacleForecast {
                        steps,
                        radius: cfg.robots[j].radius + stale_buffer,
                    });
                }
                for body in &static_bodies {
                    forecasts.push(ObstacleForecast::stationary(
                        body.center.clone(),
                        body.radius,
                    ));
                }
                let warm = agent
                    .last_plan
                    .as_ref()
                    .map(|p| shift_warm_start(p, model, &agent.belief.mean, cfg.dt));
                let started = Instant::now();
                let plan = plan_with_mode(&PlanRequest {
                    model,
                    belief: &agent.belief,
                    goal: &agent.goal,
                    obstacles: &forecasts,
                    mode,
                    bounds: &bounds,
                    cost,
                    horizon,
                    dt: cfg.dt,
                    process_noise: &proc_cov,
                    warm_start: warm.as_ref(),
                    robot_radius: agent.spec.radius,
                })
                .map_err(|e| Error::AtTick {
                    tick,
                    source: Box::new(e),
                })?;
                let plan_ms = started.elapsed().as_secs_f64() * 1e3;
                agent.plan_times_ms.push(plan_ms);
                let min_margin = plan
                    .margins
                    .iter()
                    .flat_map(|r| r.iter())
                    .fold(f64::INFINITY, |a, &g| a.min(g));
                // on InfeasibleRelaxed the returned plan is the least
                // violating one found, i.e. an active escape maneuver, so the
                // first control is applied unchanged
                let u = plan.controls[0].clone();
                // broadcast this plan's beliefs for the next tick
                let beliefs =
                    propagate_horizon(model, &agent.belief, &plan.controls, cfg.dt, &proc_cov);
                agent.last_message = TrajectoryMessage {
                    sender: agent.spec.id.clone(),
                    steps: beliefs
                        .iter()
                        .zip(plan.states.iter())
                        .map(|(b, s)| GaussianBelief {
                            mean: Vector::from_iterator(pdim, (0..pdim).map(|i| s[i])),
                            cov: b.position_cov(model),
                        })
                        .collect(),
                };
                agent.last_plan = Some(plan);
                (u, min_margin, plan_ms)
            };
            controls.push(control.clone());
            tick_rows.push(RobotTick {
                ground_truth: agent.ground_truth.clone(),
                belief_mean: agent.belief.mean.clone(),
                belief_cov: agent.belief.cov.clone(),
                control,
                min_margin,
                plan_time_ms: plan_ms,
            });
        }

        // 4. apply first controls to ground truth with process noise
        for (agent, u) in agents.iter_mut().zip(controls.iter()) {
            let noise = sample_diag_noise(&mut rng, &proc_cov);
            agent.ground_truth = step(model, &agent.ground_truth, u, cfg.dt) + noise;
            if model == Model::Unicycle {
                agent.ground_truth[2] = crate::propagation::wrap_angle(agent.ground_truth[2]);
            }
            agent.last_control = u.clone();
        }

        log.records.push(TickRecord {
            tick,
            robots: tick_rows,
        });

        if agents.iter().all(|a| a.arrived) {
            break;
        }
    }

    let mut metrics = compute_metrics(&log, cfg)?;
    for (m, a) in metrics.robots.iter_mut().zip(agents.iter()) {
        if a.plan_times_ms.is_empty() {
            continue;
        }
        m.plan_time_mean_ms = a.plan_times_ms.iter().sum::<f64>() / a.plan_times_ms.len() as f64;
        m.plan_time_max_ms = a.plan_times_ms.iter().cloned().fold(0.0, f64::max);
    }
    Ok((metrics, log))
}

fn hold_message(id: &str, belief: &BeliefState, model: Model, horizon: usize) -> TrajectoryMessage {
    let pos = belief.position(model);
    let cov = belief.position_cov(model);
    TrajectoryMessage {
        sender: id.to_string(),
        steps: vec![GaussianBelief { mean: pos, cov }; horizon + 1],
    }
}

/// Recomputes run metrics from a log: minimum center distance, per-robot
/// length and duration, collision count (center distance below the radii
/// sum at any tick), and overall success.
pub fn compute_metrics(log: &RunLog, cfg: &ScenarioConfig) -> Result<RunMetrics> {
    let model = cfg.model()?;
    let pdim = model.position_dim();
    let n = cfg.robots.len();
    let pos_of = |s: &Vector| Vector::from_iterator(pdim, (0..pdim).map(|i| s[i]));

    let mut min_dist = f64::INFINITY;
    let mut collisions = 0usize;
    let mut lengths = vec![0.0f64; n];
    let mut arrival_tick: Vec<Option<usize>> = vec![None; n];

    for rec in &log.records {
        let positions: Vec<Vector> = rec.robots.iter().map(|r| pos_of(&r.ground_truth)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (&positions[i] - &positions[j]).norm();
                min_dist = min_dist.min(d);
                if d < cfg.robots[i].radius + cfg.robots[j].radius {
                    collisions += 1;
                }
            }
            for obs in &cfg.static_obstacles {
                let d = (&positions[i] - &Vector::from_vec(obs.position.clone())).norm();
                min_dist = min_dist.min(d);
                if d < cfg.robots[i].radius + obs.radius {
                    collisions += 1;
                }
            }
            let goal = Vector::from_vec(cfg.robots[i].goal.clone());
            // arrival follows the controller's own stopping rule, which acts
            // on the believed position
            let believed = pos_of(&rec.robots[i].belief_mean);
            if arrival_tick[i].is_none() && (&believed - &goal).norm() <= cfg.goal_tolerance {
                arrival_tick[i] = Some(rec.tick);
            }
        }
    }
    for w in log.records.windows(2) {
        for i in 0..n {
            if let Some(t) = arrival_tick[i] {
                if w[0].tick >= t {
                    continue;
                }
            }
            let a = pos_of(&w[0].robots[i].ground_truth);
            let b = pos_of(&w[1].robots[i].ground_truth);
            lengths[i] += (b - a).norm();
        }
    }

    let robots: Vec<RobotMetrics> = (0..n)
        .map(|i| RobotMetrics {
            id: cfg.robots[i].id.clone(),
            length: lengths[i],
            duration: arrival_tick[i]
                .map(|t| (t + 1) as f64 * cfg.dt)
                .unwrap_or(log.records.len() as f64 * cfg.dt),
            reached: arrival_tick[i].is_some(),
            plan_time_mean_ms: 0.0,
            plan_time_max_ms: 0.0,
        })
        .collect();
    let success = robots.iter().all(|r| r.reached) && collisions == 0;
    Ok(RunMetrics {
        min_center_distance: min_dist,
        robots,
        collisions,
        success,
    })
}

/// Builds the §5-style position-exchange scenario: robots on a circle of
/// radius 2 m (2-D) or at 1 m altitude (3-D), each heading to the antipodal
/// start. Supported sizes: 2 or 4 unicycles, 4 or 6 double integrators.
pub fn scenario_position_exchange(
    n_robots: usize,
    three_d: bool,
    radius: f64,
    eps: f64,
    seed: u64,
) -> Result<ScenarioConfig> {
    let supported = if three_d { [4usize, 6] } else { [2usize, 4] };
    if !supported.contains(&n_robots) {
        return Err(Error::InvalidConfig(format!(
            "unsupported robot count {n_robots} for {} exchange",
            if three_d { "3-D" } else { "2-D" }
        )));
    }
    let circle_radius = 2.0;
    let altitude = 1.0;
    let mut robots = Vec::with_capacity(n_robots);
    for i in 0..n_robots {
        let angle = std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n_robots as f64;
        let (x, y) = (circle_radius * angle.cos(), circle_radius * angle.sin());
        let (gx, gy) = (-x, -y);
        let (start, goal) = if three_d {
            (vec![x, y, altitude], vec![gx, gy, altitude])
        } else {
            // heading toward the goal, in degrees on disk
            let heading = (gy - y).atan2(gx - x).to_degrees();
            (vec![x, y, heading], vec![gx, gy])
        };
        robots.push(RobotSpec {
            id: format!("r{}", i + 1),
            start,
            goal,
            radius,
        });
    }
    let (model, measurement_noise, max_duration) = if three_d {
        (
            "double-integrator-3d".to_string(),
            vec![0.02, 0.02, 0.02, 0.01, 0.01, 0.01],
            60.0,
        )
    } else {
        ("unicycle".to_string(), vec![0.02, 0.02, 1.2], 60.0)
    };
    Ok(ScenarioConfig {
        model,
        robots,
        static_obstacles: Vec::new(),
        eps,
        measurement_noise,
        noise_scale: 1.0,
        dt: 0.1,
        max_duration,
        goal_tolerance: 0.15,
        seed,
        method: "bound".into(),
        planner: PlannerSpec::default(),
        process_noise: None,
    })
}

/// The single-robot obstacle-avoidance scenario used by the noise-scaling
/// study: start (0,0), goal (3,0), one obstacle of radius 0.2 m at (1.5,0).
pub fn scenario_obstacle_course(eps: f64, noise_scale: f64, seed: u64) -> ScenarioConfig {
    ScenarioConfig {
        model: "unicycle".into(),
        robots: vec![RobotSpec {
            id: "r1".into(),
            start: vec![0.0, 0.0, 0.0],
            goal: vec![3.0, 0.0],
            radius: 0.2,
        }],
        static_obstacles: vec![ObstacleSpec {
            position: vec![1.5, 0.0],
            radius: 0.2,
            cov_diag: None,
        }],
        eps,
        measurement_noise: vec![0.02, 0.02, 1.2],
        noise_scale,
        dt: 0.1,
        max_duration: 40.0,
        goal_tolerance: 0.1,
        seed,
        method: "bound".into(),
        planner: PlannerSpec::default(),
        process_noise: None,
    }
}

/// One averaged cell of the noise-scaling comparison.
#[derive(Debug, Clone)]
pub struct NoiseScalingRow {
    pub method: String,
    pub scale: f64,
    pub min_distance: f64,
    pub length: f64,
    pub duration: f64,
    pub success_rate: f64,
}

/// Runs method × noise-scale × seed combinations of the obstacle-course
/// scenario and averages d, l, T over seeds.
pub fn experiment_noise_scaling(
    base: &ScenarioConfig,
    methods: &[&str],
    scales: &[f64],
    seeds: &[u64],
) -> Result<Vec<NoiseScalingRow>> {
    let mut rows = Vec::new();
    for &method in methods {
        for &scale in scales {
            let mut d = 0.0;
            let mut l = 0.0;
            let mut t = 0.0;
            let mut successes = 0usize;
            for &seed in seeds {
                let mut cfg = base.clone();
                cfg.method = method.to_string();
                cfg.noise_scale = scale;
                cfg.seed = seed;
                let (metrics, _) = run_scenario(&cfg)?;
                d += metrics.min_center_distance;
                l += metrics.robots[0].length;
                t += metrics.robots[0].duration;
                if metrics.success {
                    successes += 1;
                }
            }
            let nf = seeds.len() as f64;
            rows.push(NoiseScalingRow {
                method: method.to_string(),
                scale,
                min_distance: d / nf,
                length: l / nf,
                duration: t / nf,
                success_rate: successes as f64 / nf,
            });
        }
    }
    Ok(rows)
}
