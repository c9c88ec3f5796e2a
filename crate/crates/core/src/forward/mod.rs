//! Forward solvers for single-term, space-time, multi-term and
//! distributed-order time-fractional diffusion on an interval.
//!
//! Every solver works mode by mode in the Dirichlet eigenbasis. The
//! single-term and space-time problems are solved exactly through the
//! Mittag-Leffler relaxation factor; multi-term and distributed-order
//! problems use the implicit L1 scheme.

mod l1;
mod solve;
mod types;

pub use l1::{caputo_l1_weights, march, operator_weights, step_modal_multiterm, L1Weights};
pub use solve::{
    distributed_spectrum, lift_boundary, observe, solve_distributed_modal, solve_multi_modal,
    solve_single_modal, solve_spacetime_modal, solve_with_boundary, Scenario, TimeOperator,
};
pub use types::{
    discrete_l2, discrete_l2_sq, BoundaryData, BoundaryProfile, Grading, LiftSamples,
    ObservationSeries, OrderSpectrum, SolutionField, TimeGrid, WeightFunction,
};
