//! Time integration of the perturbation system.

mod initial;
mod linear_model;
mod rhs;
mod run;
mod state;
mod stepper;

pub use initial::{initial_gaussian, jackson_weights, vorticity_mode};
pub use linear_model::{run_linear_model, weighted_operator_rows};
pub use rhs::{rhs_nonlinear, NonlinearRhs, RhsStats};
pub use run::{
    run, Classification, GrowthMonitor, NoObserver, RunObserver, RunOptions, RunRecord,
    RunSnapshot, Simulation,
};
pub use state::State;
pub use stepper::{StepReport, Stepper};
