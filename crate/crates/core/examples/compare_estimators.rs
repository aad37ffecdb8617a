//! Runs every collision-probability estimator on one two-body configuration
//! and prints the estimates side by side.
//!
//! The chi-squared bound is the only method guaranteed to sit at or above the
//! true probability; the Monte Carlo column (with its 95% half-width) is the
//! reference to judge the others against.

use probcoll::collision::{estimate, Body, CollisionQuery, Method};
use probcoll::gaussian::{GaussianBelief, Matrix, Vector};

fn main() {
    let robot = Body::new(
        GaussianBelief::new(
            Vector::from_vec(vec![0.38, 0.0]),
            Matrix::from_diagonal(&Vector::from_vec(vec![0.04, 0.04])),
        )
        .unwrap(),
        0.2,
    )
    .unwrap();
    let obstacle = Body::new(
        GaussianBelief::deterministic(Vector::from_vec(vec![0.0, 0.0])),
        0.2,
    )
    .unwrap();
    let query = CollisionQuery::new(robot, obstacle).unwrap();

    println!("robot N((0.38, 0), 0.04 I), radius 0.2  vs  fixed obstacle at origin, radius 0.2\n");
    println!(
        "{:<16} {:>10} {:>12} {:>12}",
        "method", "estimate", "95% hw", "time [us]"
    );
    for method in Method::ALL {
        // lambert needs an uncertain obstacle; skip it for this fixed one
        if method == Method::Lambert {
            continue;
        }
        let est = estimate(method, &query, 100_000, 7).unwrap();
        let hw = est
            .half_width_95
            .map(|h| format!("{h:.5}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "{:<16} {:>10.5} {:>12} {:>12.1}",
            method.id(),
            est.value,
            hw,
            est.wall_time * 1e6
        );
    }
}
