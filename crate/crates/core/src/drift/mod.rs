//! Stateful change detectors over scalar or per-feature signals.
//!
//! Three detectors cover the designs compared in the experiments: the
//! Page-Hinkley test for cumulative mean increases in a loss stream, the
//! two-sample Kolmogorov-Smirnov test as a building block, and
//! reference/detection window monitors (sliding or fixed reference) that
//! apply the KS test at every step once their buffers are warm.
//!
//! Detector state is single-owner and mutable; after a [`Detection::Change`]
//! the caller is expected to adapt and reset before feeding more values.

mod ks;
mod page_hinkley;
mod window;

pub use ks::{ks_pvalue, ks_statistic, ks_test, KsResult};
pub use page_hinkley::{ph_reset, ph_update, PageHinkleyState};
pub use window::{monitor_reset, monitor_update, MonitorMode, WindowMonitor};

/// Outcome of feeding one value to a detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Detection {
    /// Buffers are not yet full; no test was run.
    Warming,
    NoChange,
    Change,
}

impl Detection {
    pub fn is_change(self) -> bool {
        self == Detection::Change
    }
}
