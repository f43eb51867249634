//! Experiment harness: the prequential run loop, evaluation metrics,
//! cross-method ranking, the supervision-sensitivity grid, and byte-stable
//! report emission.
//!
//! The harness owns every label that leaves the oracle, so cost accounting
//! is an enforced invariant rather than a convention: a run that touches
//! labels outside its budget fails instead of reporting a wrong ratio.

pub mod grid;
pub mod metrics;
pub mod ranks;
pub mod report;
pub mod runner;

pub use grid::{sensitivity_grid, GridEntry, GridOutput};
pub use metrics::{cohen_kappa, label_cost_ratio, sliding_kappa};
pub use ranks::{average_ranks, RankTable, ScoreMatrix};
pub use report::{emit_rank_table, emit_report, render_rank_table, render_reports, ReportFormat};
pub use runner::{run_experiment, ExperimentConfig, RunReport};
