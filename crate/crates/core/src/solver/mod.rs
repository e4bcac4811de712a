//! Time integration of the semidiscrete scheme.

pub mod config;
pub mod scheme;
pub mod stepper;
pub mod trajectory;

pub use config::SolveConfig;
pub use scheme::Scheme;
pub use stepper::{SolverState, StepStats, Stepper};
pub use trajectory::{
    initial_state, run, time_quotients, History, NoObserver, StepObserver, StepRecord,
    TimeQuotients, Trajectory,
};
