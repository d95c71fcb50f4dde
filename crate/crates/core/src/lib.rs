//! Semismooth Newton solver for sparsity-constrained quadratically constrained
//! quadratic programs.
//!
//! The solver works on the stationary equations `F(Y;T) = 0` of the problem,
//! where `Y = (x, ν, μ, λ, ζ)` collects the primal vector and the multipliers and
//! `T` is a support of size `s` chosen from the top entries of `x − τ(∇ₓL + ν)`.
//! Each iteration solves a reduced `(2s + k + m + m_eq)`-dimensional Newton system
//! and backtracks on `½‖F‖²`.
//!
//! ```
//! use snsqp::{make_initial_point, snsqp_solve, InitStrategy, Matrix, ProblemParts, QuadraticForm, SolverConfig};
//!
//! // min ½‖x − (2, 1)‖²  s.t. ‖x‖₀ <= 1
//! let f0 = QuadraticForm::new(Matrix::identity(2), vec![-2.0, -1.0], 2.5).unwrap();
//! let problem = ProblemParts::new(f0, 1).build().unwrap();
//! let config = SolverConfig::default();
//! let y0 = make_initial_point(&problem, &InitStrategy::Zeros, &config).unwrap();
//! let report = snsqp_solve(&problem, &y0, &config).unwrap();
//! assert!(report.converged());
//! assert_eq!(report.final_point.x, vec![2.0, 0.0]);
//! ```

pub mod config;
pub mod error;
pub mod generators;
pub mod init;
pub mod io;
pub mod jacobian;
pub mod linalg;
pub mod ncp;
pub mod oracle;
pub mod problem;
pub mod projection;
pub mod scalar;
pub mod solver;
pub mod stationary;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use init::{make_initial_point, InitStrategy};
pub use io::{instance_from_str, instance_to_string, point_from_str, read_instance, write_instance, Instance};
pub use jacobian::{
    apply_d_sparse, apply_w, assemble_g, classify_indices, flatten_point, smallest_singular_value, unflatten_point,
    IndexClassification, JacobianBlocks,
};
pub use linalg::Matrix;
pub use ncp::{fb_coefficients, fb_phi, phi_vec, psi_vec, FbCoefficients};
pub use oracle::{brute_force_solve, restricted_solve, OracleResult, RestrictedSolution, SupportOutcome};
pub use problem::{
    eval_objective, l0_norm, lagrangian_gradient, lagrangian_hessian, lagrangian_value, tau_lower_bound,
    validate_problem, BoxSet, PrimalDualPoint, ProblemParts, QuadraticForm, SqcqpProblem,
};
pub use projection::{
    box_derivative, enumerate_supports, project_box, project_sparse, select_support, support_scores, SupportFamily,
    SupportSet,
};
pub use scalar::Scalar;
pub use solver::{
    apply_step, line_search, newton_direction, snsqp_solve, solve_reduced, LineSearchOutcome, NewtonDirection,
    SolveReport, SolveStatus,
};
pub use stationary::{assemble_f, merit, verify_p_stationarity, ResidualVector, StationarityReport};

/// Double-precision problem.
pub type Problem = SqcqpProblem<f64>;
/// Double-precision primal-dual point.
pub type Point = PrimalDualPoint<f64>;
/// Double-precision solve report.
pub type Report = SolveReport<f64>;
/// Single-precision problem.
pub type ProblemF32 = SqcqpProblem<f32>;
/// Single-precision primal-dual point.
pub type PointF32 = PrimalDualPoint<f32>;
/// Single-precision solve report.
pub type ReportF32 = SolveReport<f32>;
