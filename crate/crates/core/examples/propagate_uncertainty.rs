//! Propagates a unicycle belief with the EKF: open-loop prediction grows the
//! position covariance along a constant-turn arc, and a position/heading
//! measurement shrinks it again.

use probcoll::gaussian::{Matrix, Vector};
use probcoll::propagation::{ekf_update, propagate_horizon, BeliefState, Model};

fn position_sd(b: &BeliefState) -> f64 {
    // largest marginal standard deviation over x and y
    b.cov[(0, 0)].max(b.cov[(1, 1)]).sqrt()
}

fn main() {
    let dt = 0.1;
    let process = Matrix::from_diagonal(&Vector::from_vec(vec![4e-4, 4e-4, 1e-3]));
    let start = BeliefState::new(
        Vector::from_vec(vec![0.0, 0.0, 0.0]),
        Matrix::from_diagonal(&Vector::from_vec(vec![1e-4, 1e-4, 1e-4])),
    );

    // constant-turn arc for two seconds
    let controls: Vec<Vector> = (0..20).map(|_| Vector::from_vec(vec![0.5, 0.4])).collect();
    let beliefs = propagate_horizon(Model::Unicycle, &start, &controls, dt, &process);

    println!("open-loop prediction along a constant-turn arc:");
    println!("{:>5} {:>8} {:>8} {:>10}", "step", "x", "y", "pos sd");
    for (k, b) in beliefs.iter().enumerate().step_by(5) {
        println!(
            "{:>5} {:>8.3} {:>8.3} {:>10.4}",
            k,
            b.mean[0],
            b.mean[1],
            position_sd(b)
        );
    }

    let drifted = beliefs.last().unwrap();
    let measurement_noise = Matrix::from_diagonal(&Vector::from_vec(vec![4e-4, 4e-4, 1.44]));
    let z = Vector::from_vec(vec![
        drifted.mean[0] + 0.03,
        drifted.mean[1] - 0.02,
        drifted.mean[2],
    ]);
    let updated = ekf_update(Model::Unicycle, drifted, &z, &measurement_noise).unwrap();

    println!("\nafter one pose measurement:");
    println!(
        "  position sd {:.4} -> {:.4}",
        position_sd(drifted),
        position_sd(&updated)
    );
    println!(
        "  mean moved ({:.3}, {:.3}) -> ({:.3}, {:.3})",
        drifted.mean[0], drifted.mean[1], updated.mean[0], updated.mean[1]
    );
}
