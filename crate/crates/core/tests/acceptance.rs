//! Acceptance gate: one test per release criterion, each printing a single
//! PASS line (run with `--nocapture` to see them). Numeric references come
//! from independent oracles in `common` or from frozen expected values.

mod common;

use std::time::Instant;

use probcoll::collision::{
    bound_collision_probability, constraint_margin, mc_collision_probability, Body, CollisionQuery,
    Method,
};
use probcoll::gaussian::{chi2_cdf, chi2_inv_cdf, GaussianBelief, Matrix, Vector};
use probcoll::planner::{plan, ControlBounds, CostSpec};
use probcoll::propagation::{motion_jacobians, step, BeliefState, Model};
use probcoll::sim::export::{metrics_csv, trajectory_csv};
use probcoll::sim::{
    experiment_noise_scaling, run_scenario, scenario_obstacle_course, scenario_position_exchange,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn v(entries: &[f64]) -> Vector {
    Vector::from_vec(entries.to_vec())
}

fn diag(entries: &[f64]) -> Matrix {
    Matrix::from_diagonal(&v(entries))
}

/// The reference two-body configuration used throughout the comparisons.
fn reference_query() -> CollisionQuery {
    let robot = Body::new(
        GaussianBelief::new(v(&[0.38, 0.0]), diag(&[0.04, 0.04])).unwrap(),
        0.2,
    )
    .unwrap();
    let obstacle = Body::new(GaussianBelief::deterministic(v(&[0.0, 0.0])), 0.2).unwrap();
    CollisionQuery::new(robot, obstacle).unwrap()
}

#[test]
fn criterion_01_bound_reproduction() {
    let start = Instant::now();
    let q = reference_query();
    let est = bound_collision_probability(&q).unwrap();
    let delta = (est.value - 0.1772).abs();
    assert!(
        delta <= 5e-4,
        "bound {} off reference by {delta}",
        est.value
    );
    assert!(start.elapsed().as_secs_f64() < 1.0);
    println!(
        "criterion 1 PASS: bound = {:.6} (reference 0.1772, |delta| = {:.2e})",
        est.value, delta
    );
}

#[test]
fn criterion_02_baseline_values() {
    let start = Instant::now();
    let q = reference_query();
    let cl = probcoll::collision::linearized_chance_constraint(&q).unwrap();
    assert!(
        (cl.value - 0.5398).abs() <= 5e-4,
        "chance-linear {}",
        cl.value
    );
    let bv = probcoll::collision::bounding_volume_check(&q, 3.0).unwrap();
    assert_eq!(bv.value, 1.0, "bounding-volume must be exactly 1");
    let md = probcoll::collision::max_density_approximation(&q).unwrap();
    assert_eq!(md.value, 1.0, "max-density must be exactly 1");
    assert!(start.elapsed().as_secs_f64() < 1.0);
    println!(
        "criterion 2 PASS: chance-linear = {:.6}, bounding-volume = 1, max-density = 1",
        cl.value
    );
}

#[test]
fn criterion_03_mc_vs_radial_quadrature() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut worst = 0.0f64;
    for k in 0..20 {
        let n = if k < 10 { 2 } else { 3 };
        // isotropic covariances so the relative belief is radially symmetric
        let sr: f64 = rng.gen_range(0.05..0.4);
        let ss: f64 = rng.gen_range(0.05..0.4);
        let r1: f64 = rng.gen_range(0.05..0.5);
        let s1: f64 = rng.gen_range(0.05..0.5);
        let mut mu_r = vec![0.0; n];
        let mut mu_s = vec![0.0; n];
        for i in 0..n {
            mu_r[i] = rng.gen_range(-1.0..1.0);
            mu_s[i] = rng.gen_range(-1.0..1.0);
        }
        let robot = Body::new(
            GaussianBelief::new(v(&mu_r), diag(&vec![sr * sr; n])).unwrap(),
            r1,
        )
        .unwrap();
        let obstacle = Body::new(
            GaussianBelief::new(v(&mu_s), diag(&vec![ss * ss; n])).unwrap(),
            s1,
        )
        .unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let mc = mc_collision_probability(&q, 1_000_000, 11 + k as u64).unwrap();
        let sigma_w = (sr * sr + ss * ss).sqrt();
        let oracle =
            common::radial_collision_probability(q.w.mean.norm(), sigma_w, q.contact_radius(), n);
        let hw = mc.half_width_95.unwrap();
        let err = (mc.value - oracle).abs();
        worst = worst.max(if hw > 0.0 { err / hw } else { err / 1e-12 });
        assert!(
            err <= 3.0 * hw.max(1e-9),
            "query {k}: mc {} vs quadrature {} (3hw {})",
            mc.value,
            oracle,
            3.0 * hw
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 60.0, "took {secs} s");
    println!(
        "criterion 3 PASS: 20 random queries agree within 3 Wilson half-widths (worst {:.2}hw, {:.1} s)",
        worst, secs
    );
}

#[test]
fn criterion_04_special_functions() {
    let mut worst_cdf = 0.0f64;
    for dof in [2usize, 3] {
        for i in 0..=100 {
            let x = 50.0 * i as f64 / 100.0;
            let got = chi2_cdf(x, dof).unwrap();
            let want = common::integrate(|t| common::chi2_pdf_oracle(t, dof), 0.0, x, 1e-12);
            worst_cdf = worst_cdf.max((got - want).abs());
            assert!(
                (got - want).abs() <= 1e-8,
                "chi2_cdf({x},{dof}) = {got} vs quadrature {want}"
            );
        }
    }
    let mut worst_rt = 0.0f64;
    for dof in [2usize, 3] {
        for i in 1..1000 {
            let p = i as f64 / 1000.0;
            let x = chi2_inv_cdf(p, dof).unwrap();
            let back = chi2_cdf(x, dof).unwrap();
            worst_rt = worst_rt.max((back - p).abs());
            assert!(
                (back - p).abs() <= 1e-10,
                "round trip p={p} dof={dof}: {back}"
            );
        }
    }
    println!(
        "criterion 4 PASS: chi2_cdf max err {:.1e} vs quadrature, inverse round-trip max err {:.1e}",
        worst_cdf, worst_rt
    );
}

#[test]
fn criterion_05_jacobian_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    // large enough that rounding in the v/ω arc terms stays below the
    // comparison tolerance, small enough that truncation does too
    let h = 1e-4;
    let mut checked = 0usize;
    for case in 0..1000 {
        let (model, sdim, cdim) = if case % 2 == 0 {
            (Model::Unicycle, 3, 2)
        } else {
            (Model::DoubleIntegrator3d, 6, 3)
        };
        let state = Vector::from_iterator(sdim, (0..sdim).map(|_| rng.gen_range(-2.0..2.0)));
        let mut control = Vector::from_iterator(cdim, (0..cdim).map(|_| rng.gen_range(-1.0..1.0)));
        if model == Model::Unicycle && case % 10 < 3 {
            // exercise the straight-line switch region
            control[1] = rng.gen_range(-5e-6..5e-6);
        }
        let dt = 0.1;
        let (fx, fu) = motion_jacobians(model, &state, &control, dt);
        let scale = |m: &Matrix| m.amax().max(1.0);
        for j in 0..sdim {
            let mut sp = state.clone();
            let mut sm = state.clone();
            sp[j] += h;
            sm[j] -= h;
            let col = (step(model, &sp, &control, dt) - step(model, &sm, &control, dt)) / (2.0 * h);
            for i in 0..sdim {
                assert!(
                    (fx[(i, j)] - col[i]).abs() <= 1e-5 * scale(&fx),
                    "case {case}: dF/dx[{i},{j}] {} vs fd {}",
                    fx[(i, j)],
                    col[i]
                );
            }
        }
        for j in 0..cdim {
            let mut up = control.clone();
            let mut um = control.clone();
            up[j] += h;
            um[j] -= h;
            let col = (step(model, &state, &up, dt) - step(model, &state, &um, dt)) / (2.0 * h);
            for i in 0..sdim {
                assert!(
                    (fu[(i, j)] - col[i]).abs() <= 1e-5 * scale(&fu),
                    "case {case}: dF/du[{i},{j}] {} vs fd {}",
                    fu[(i, j)],
                    col[i]
                );
            }
        }
        checked += 1;
    }
    println!("criterion 5 PASS: {checked} random Jacobian pairs match central differences");
}

#[test]
fn criterion_06_constraint_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut checked = 0usize;
    for _ in 0..1000 {
        let n = if rng.gen_bool(0.5) { 2 } else { 3 };
        let mu = Vector::from_iterator(n, (0..n).map(|_| rng.gen_range(-1.5..1.5)));
        let sd: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.5)).collect();
        let sigma = diag(&sd.iter().map(|s| s * s).collect::<Vec<_>>());
        let r: f64 = rng.gen_range(0.05..0.8);
        let alpha = r * r;
        let eps: f64 = rng.gen_range(0.01..0.5);

        let robot = Body::new(
            GaussianBelief::new(mu.clone(), sigma.clone()).unwrap(),
            r / 2.0,
        )
        .unwrap();
        let obstacle = Body::new(GaussianBelief::deterministic(Vector::zeros(n)), r / 2.0).unwrap();
        let q = CollisionQuery::new(robot, obstacle).unwrap();
        let bound = bound_collision_probability(&q).unwrap().value;
        let margin = constraint_margin(&mu, &mu, &sigma, alpha, eps).unwrap();
        if (bound - eps).abs() <= 1e-9 {
            continue; // boundary tolerance
        }
        assert_eq!(
            margin >= 0.0,
            bound <= eps,
            "margin {margin} vs bound {bound} at eps {eps}"
        );
        checked += 1;
    }
    println!("criterion 6 PASS: margin sign matches bound-vs-eps on {checked} random queries");
}

#[test]
fn criterion_07_two_robot_exchange() {
    let start = Instant::now();
    let mut min_sep = f64::INFINITY;
    for seed in 0..10u64 {
        let cfg = scenario_position_exchange(2, false, 0.2, 0.1, seed).unwrap();
        let (metrics, _log) = run_scenario(&cfg).unwrap();
        assert_eq!(
            metrics.collisions, 0,
            "seed {seed}: {} collision ticks",
            metrics.collisions
        );
        let radii_sum = cfg.robots[0].radius + cfg.robots[1].radius;
        assert!(
            metrics.min_center_distance >= radii_sum,
            "seed {seed}: min center distance {}",
            metrics.min_center_distance
        );
        min_sep = min_sep.min(metrics.min_center_distance - radii_sum);
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 300.0, "took {secs} s");
    println!(
        "criterion 7 PASS: 10 seeds collision free, min separation beyond contact {:.3} m ({:.1} s)",
        min_sep, secs
    );
}

#[test]
fn criterion_08_noise_scaling_trends() {
    let start = Instant::now();
    let base = scenario_obstacle_course(0.1, 1.0, 0);
    let seeds: Vec<u64> = (0..10).collect();
    let rows = experiment_noise_scaling(
        &base,
        &["bound", "bounding-volume"],
        &[1.0, 4.0, 16.0],
        &seeds,
    )
    .unwrap();
    let get = |method: &str, scale: f64| {
        rows.iter()
            .find(|r| r.method == method && r.scale == scale)
            .unwrap()
    };
    let b1 = get("bound", 1.0);
    let b4 = get("bound", 4.0);
    let b16 = get("bound", 16.0);
    let v4 = get("bounding-volume", 4.0);
    let v16 = get("bounding-volume", 16.0);
    assert!(
        b1.length <= b4.length && b4.length <= b16.length,
        "bound lengths not nondecreasing: {} {} {}",
        b1.length,
        b4.length,
        b16.length
    );
    assert!(
        v4.length >= b4.length,
        "4x: bounding-volume length {} < bound length {}",
        v4.length,
        b4.length
    );
    assert!(
        v16.length >= b16.length,
        "16x: bounding-volume length {} < bound length {}",
        v16.length,
        b16.length
    );
    assert!(
        v16.min_distance >= b16.min_distance,
        "16x: bounding-volume min distance {} < bound {}",
        v16.min_distance,
        b16.min_distance
    );
    let secs = start.elapsed().as_secs_f64();
    assert!(secs < 600.0, "took {secs} s");
    println!(
        "criterion 8 PASS: l(bound) {:.3}/{:.3}/{:.3} nondecreasing, l(bv) >= l(bound) at 4x/16x, d(bv) {:.3} >= d(bound) {:.3} at 16x ({:.1} s)",
        b1.length, b4.length, b16.length, v16.min_distance, b16.min_distance, secs
    );
}

#[test]
fn criterion_09_planner_grid_search_oracle() {
    let bounds = ControlBounds::unicycle(0.0, 0.5, 1.5);
    let belief = BeliefState::new(v(&[0.0, 0.0, 0.0]), diag(&[1e-3, 1e-3, 1e-3]));
    let goal = v(&[0.4, 0.1]);
    let horizon = 10;
    let dt = 0.1;
    let noise = diag(&[1e-4, 1e-4, 1e-4]);
    let cost = CostSpec::default();
    let plan = plan(
        Model::Unicycle,
        &belief,
        &goal,
        &[],
        0.1,
        &bounds,
        cost,
        horizon,
        dt,
        &noise,
        0.2,
        None,
    )
    .unwrap();
    for u in &plan.controls {
        assert!(
            u[0] >= bounds.lower[0] - 0.0
                && u[0] <= bounds.upper[0]
                && u[1] >= bounds.lower[1]
                && u[1] <= bounds.upper[1],
            "control outside bounds: {u:?}"
        );
    }
    // constant-control grid search oracle over the same cost
    let eval = |vc: f64, wc: f64| -> (f64, Vector) {
        let u = v(&[vc, wc]);
        let mut x = belief.mean.clone();
        let mut j = 0.0;
        for _ in 0..horizon {
            let p = v(&[x[0], x[1]]);
            j += cost.position * (&p - &goal).norm_squared();
            j += cost.control * u.norm_squared();
            x = step(Model::Unicycle, &x, &u, dt);
        }
        let p = v(&[x[0], x[1]]);
        j += cost.terminal * (&p - &goal).norm_squared();
        (j, p)
    };
    let mut best = (f64::INFINITY, Vector::zeros(2));
    for iv in 0..=200 {
        for iw in 0..=200 {
            let vc = 0.5 * iv as f64 / 200.0;
            let wc = -1.5 + 3.0 * iw as f64 / 200.0;
            let (j, p) = eval(vc, wc);
            if j < best.0 {
                best = (j, p);
            }
        }
    }
    let end = v(&[plan.states[horizon][0], plan.states[horizon][1]]);
    let d = (&end - &best.1).norm();
    assert!(
        d <= 0.05,
        "plan endpoint {end:?} vs oracle {:?} (distance {d})",
        best.1
    );
    println!(
        "criterion 9 PASS: obstacle-free endpoint within {:.3} m of grid-search oracle, bounds respected",
        d
    );
}

#[test]
fn criterion_10_determinism() {
    let start = Instant::now();
    // exchange preset
    for seed in [0u64, 5] {
        let cfg = scenario_position_exchange(2, false, 0.2, 0.1, seed).unwrap();
        let (m1, l1) = run_scenario(&cfg).unwrap();
        let (m2, l2) = run_scenario(&cfg).unwrap();
        let t1 = trajectory_csv(&l1, &cfg).unwrap();
        let t2 = trajectory_csv(&l2, &cfg).unwrap();
        assert!(t1 == t2, "seed {seed}: trajectory CSVs differ");
        assert_eq!(
            metrics_csv(&m1),
            metrics_csv(&m2),
            "seed {seed}: metrics differ"
        );
    }
    // noise-scaling cell
    let mut cfg = scenario_obstacle_course(0.1, 4.0, 3);
    cfg.method = "bound".into();
    let (m1, l1) = run_scenario(&cfg).unwrap();
    let (m2, l2) = run_scenario(&cfg).unwrap();
    assert!(
        trajectory_csv(&l1, &cfg).unwrap() == trajectory_csv(&l2, &cfg).unwrap(),
        "obstacle course trajectory CSVs differ"
    );
    assert_eq!(metrics_csv(&m1), metrics_csv(&m2));
    println!(
        "criterion 10 PASS: repeated runs byte-identical ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
}

#[test]
fn criterion_11_four_robot_plan_time() {
    let cfg = scenario_position_exchange(4, false, 0.2, 0.1, 0).unwrap();
    let (_metrics, log) = run_scenario(&cfg).unwrap();
    let per_tick: Vec<f64> = log
        .records
        .iter()
        .map(|t| t.robots.iter().map(|r| r.plan_time_ms).sum())
        .collect();
    let mean = per_tick.iter().sum::<f64>() / per_tick.len() as f64;
    assert!(mean < 50.0, "mean per-tick plan time {mean} ms");
    println!(
        "criterion 11 PASS: four-robot mean per-tick plan time {:.1} ms < 50 ms",
        mean
    );
}

#[test]
fn table1_method_summary() {
    // not a gate on the documented-mismatch rows; prints the full comparison
    let q = reference_query();
    for m in Method::ALL {
        let q_used = if m == Method::Lambert {
            // the lambert baseline needs an uncertain obstacle
            let robot = Body::new(
                GaussianBelief::new(v(&[0.38, 0.0]), diag(&[0.04, 0.04])).unwrap(),
                0.2,
            )
            .unwrap();
            let obstacle = Body::new(
                GaussianBelief::new(v(&[0.0, 0.0]), diag(&[0.04, 0.04])).unwrap(),
                0.2,
            )
            .unwrap();
            CollisionQuery::new(robot, obstacle).unwrap()
        } else {
            q.clone()
        };
        let est = probcoll::collision::estimate(m, &q_used, 200_000, 1).unwrap();
        println!("table1 {:16} {:.6}", m.id(), est.value);
    }
}
