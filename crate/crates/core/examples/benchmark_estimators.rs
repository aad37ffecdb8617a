//! Times each collision-probability estimator over repeated calls (one
//! warm-up call, then mean and standard deviation over the repetitions).

use probcoll::collision::{benchmark_method, Body, CollisionQuery, Method};
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
        GaussianBelief::new(
            Vector::from_vec(vec![0.0, 0.0]),
            Matrix::from_diagonal(&Vector::from_vec(vec![0.04, 0.04])),
        )
        .unwrap(),
        0.2,
    )
    .unwrap();
    let query = CollisionQuery::new(robot, obstacle).unwrap();

    println!("50 repetitions each, Monte Carlo style methods at 10^5 samples\n");
    println!("{:<16} {:>12} {:>12}", "method", "mean [us]", "std [us]");
    for method in Method::ALL {
        let t = benchmark_method(method, &query, 50, 100_000, 7).unwrap();
        println!(
            "{:<16} {:>12.2} {:>12.2}",
            method.id(),
            t.mean_ms * 1e3,
            t.std_ms * 1e3
        );
    }
}
