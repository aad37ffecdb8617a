//! Plans a chance-constrained unicycle trajectory past an uncertain static
//! obstacle sitting between the robot and its goal, then prints the planned
//! waypoints and the per-step constraint margins.

use probcoll::gaussian::{GaussianBelief, Matrix, Vector};
use probcoll::planner::{plan, ControlBounds, CostSpec, ObstacleForecast};
use probcoll::propagation::{BeliefState, Model};

fn main() {
    let belief = BeliefState::new(
        Vector::from_vec(vec![0.0, 0.0, 0.0]),
        Matrix::from_diagonal(&Vector::from_vec(vec![1e-4, 1e-4, 1e-4])),
    );
    let goal = Vector::from_vec(vec![1.2, 0.0]);
    let obstacle = ObstacleForecast::stationary(
        GaussianBelief::new(
            Vector::from_vec(vec![0.6, 0.05]),
            Matrix::from_diagonal(&Vector::from_vec(vec![4e-3, 4e-3])),
        )
        .unwrap(),
        0.15,
    );
    let bounds = ControlBounds::unicycle(0.0, 0.5, 1.5);
    let process = Matrix::from_diagonal(&Vector::from_vec(vec![1e-5, 1e-5, 1e-5]));

    let result = plan(
        Model::Unicycle,
        &belief,
        &goal,
        std::slice::from_ref(&obstacle),
        0.05,
        &bounds,
        CostSpec::default(),
        25,
        0.1,
        &process,
        0.1,
        None,
    )
    .unwrap();

    println!("status {:?}, cost {:.2}\n", result.status, result.cost);
    println!(
        "{:>5} {:>8} {:>8} {:>8} {:>10}",
        "step", "x", "y", "theta", "margin"
    );
    for (l, s) in result.states.iter().enumerate() {
        let margin = if l == 0 {
            String::from("-")
        } else {
            format!("{:.2}", result.margins[l - 1][0])
        };
        if l % 5 == 0 || l == result.states.len() - 1 {
            println!(
                "{:>5} {:>8.3} {:>8.3} {:>8.3} {:>10}",
                l, s[0], s[1], s[2], margin
            );
        }
    }

    let max_lateral = result
        .states
        .iter()
        .map(|s| s[1].abs())
        .fold(0.0f64, f64::max);
    println!(
        "\nthe straight line to the goal is blocked; the plan swings {:.2} m sideways",
        max_lateral
    );
}
