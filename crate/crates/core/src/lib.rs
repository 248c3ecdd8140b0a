//! Solvers for equilibrium problems regularized by `(k / 2r)|v - u|^2` over
//! uniformly prox-regular, possibly nonconvex, sets in R^n.
//!
//! The building blocks:
//!
//! * [`geometry`]: constraint sets, projections and prox-regularity certificates;
//! * [`model`]: bifunctions, problems, solver configuration and traces;
//! * [`schemes`]: inertial proximal, proximal and explicit iterations;
//! * [`gap`]: gap function, its gradient and the descent method;
//! * [`oracle`]: brute-force grid solutions and sampled property checks;
//! * [`catalog`]: ready-made problems used by the examples and tests;
//! * [`cli`]: the batch front-end behind the `urep` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod cli;
pub mod error;
pub mod gap;
pub mod geometry;
mod inner;
pub mod model;
pub mod oracle;
pub mod point;
pub mod schemes;

pub use error::{Error, Result};
pub use gap::{check_necessary_condition, descent_solve, gap_gradient, gap_value, line_search, w_map, GapModel, Regularizer};
pub use geometry::{proximal_normal_check, AxisBox, ConstraintSet, Projection, SetKind};
pub use model::{
    make_vi_bifunction, problem_residual, Bifunction, GammaSchedule, SolverConfig, Status, Trace, TraceRecord,
    UREProblem,
};
pub use oracle::{check_pseudomonotone, finite_diff_gradient, grid_solve, GridSpec, OracleResult};
pub use point::{Matrix, Point};
pub use schemes::{explicit_solve, fejer_check, inertial_proximal_solve, proximal_solve, solve_subproblem, SubproblemSpec};
