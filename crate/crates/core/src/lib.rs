//! Probabilistic collision checking and chance-constrained receding-horizon
//! planning for uncertain spherical robots and obstacles.
//!
//! The crate provides:
//! - a chi-squared upper bound on robot-obstacle collision probability, plus
//!   six baseline estimators for comparison ([`collision`]);
//! - Gaussian belief algebra and the underlying special functions
//!   ([`gaussian`]);
//! - unicycle / double-integrator kinematics with EKF uncertainty
//!   propagation ([`propagation`]);
//! - a penalty-method MPC planner enforcing per-step chance constraints
//!   ([`planner`]);
//! - a deterministic multi-robot simulator with trajectory exchange, metrics
//!   and CSV/SVG export ([`sim`]).
//!
//! See the `examples/` directory for one runnable example per capability and
//! the `probcoll` binary for the command-line interface.

pub mod cli;
pub mod collision;
pub mod error;
pub mod gaussian;
pub mod planner;
pub mod propagation;
pub mod sim;

pub use error::{Error, Result};
