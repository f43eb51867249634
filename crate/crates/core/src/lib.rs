//! Unsupervised concept drift detection for deployed classifiers.
//!
//! The centerpiece is the student-teacher scheme: a `teacher` classifier is
//! deployed on a data stream, a `student` is trained to mimic the teacher's
//! predictions, and the student's mimicking loss is monitored with a
//! Page-Hinkley test. A rise in that loss signals that the input distribution
//! has moved into regions where the two models no longer agree, which is
//! observable without any true labels.
//!
//! Around that core, the crate provides everything needed to reproduce a
//! full comparison study: CSV and synthetic stream sources, from-scratch
//! decision-tree and random-forest learners, supervised and
//! output/feature-monitoring baselines, label-availability simulation, and
//! an experiment harness producing deterministic, byte-stable reports.

pub mod drift;
pub mod error;
pub mod harness;
pub mod learners;
pub mod rng;
pub mod stream;
pub mod studd;
pub mod supervision;

pub use error::{Error, Result};
pub use harness::{
    average_ranks, cohen_kappa, emit_rank_table, emit_report, label_cost_ratio, run_experiment,
    sensitivity_grid, sliding_kappa, ExperimentConfig, GridOutput, RankTable, ReportFormat,
    RunReport, ScoreMatrix,
};
pub use learners::{DecisionTree, FeatureSubset, RandomForest, TreeConfig};
pub use stream::{DataStream, Instance, StreamSchema, SyntheticDriftSpec};
pub use studd::StuddModel;
pub use supervision::{LabelOracle, MethodKind, PredictionLog};
