//! Experiment harness for the streaming sparse regression toolkit: config
//! loading, run orchestration, dev-set sweeps, rate fitting, and report
//! emission. The `ssr` binary is a thin CLI over this library.

pub mod config;
pub mod error;
pub mod ratefit;
pub mod registry;
pub mod report;
pub mod runner;
pub mod sweep;

pub use config::{
    load_experiment, load_stream_spec, load_sweep, AlgoKind, ExperimentConfig, FileSource,
    SelectionMetric, StreamSource, SweepConfig,
};
pub use error::{HarnessError, Result};
pub use ratefit::rate_fit;
pub use registry::{LearnerFactory, PluginRegistry};
pub use report::{report, SvgOptions};
pub use runner::{
    build_learner, run_experiment, run_experiment_hooked, write_results_csv, NoopHook,
    ResolvedStream, ResultRow, RunOutput, SeedFailure, StreamHook, RESULT_COLUMNS,
};
pub use sweep::{sweep, write_grid_csv, GridRow, SweepOutcome};
