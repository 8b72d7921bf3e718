//! Monte-Carlo trial engine: drops, controller runs, coverage metrics.
//!
//! Trial `t` of an experiment with seed `s` draws from its own ChaCha stream
//! `(s, t)`; within a trial the draws come in a fixed order (target azimuth,
//! interferers, shadowing, indoor users, outdoor users).

mod config;
mod experiment;
mod scenario;
mod trial;

pub use config::{BuildingKind, NeighborList, SimConfig};
pub use experiment::{
    aggregate, reference_gamma_delta_max, run_experiment, run_sweep, run_trials, trial_rng, GammaDeltaMaxReport,
    Metrics, SweepPoint,
};
pub use scenario::{generate_environment, generate_scenario, generate_users, Environment, Scenario};
pub use trial::{run_trial, trace_controller, ControllerTrace, DropEvaluator, TraceRow, TrialOutcome};
