//! Label-availability oracles and the supervised detection path.
//!
//! Supervised monitoring needs to know which true labels the stream ever
//! surrenders and when. [`LabelOracle`] models both axes: `l_access` is the
//! percentage chance a label becomes available at all (drawn once, at
//! observation time; a lost label stays lost), and `l_delay` is how many
//! instances later an available label actually arrives. The strongly
//! supervised setting is the degenerate oracle (100, 0).
//!
//! Arrived labels are scored against the prediction the deployed model made
//! at the time, not against a fresh prediction: after an adaptation the
//! current model no longer is the one that answered. [`PredictionLog`]
//! keeps that history over a bounded horizon.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::drift::{ph_update, Detection, PageHinkleyState};
use crate::error::{Error, Result};
use crate::rng::rng_from;

#[derive(Debug, Clone)]
struct Pending {
    due: usize,
    index: usize,
    label: usize,
}

/// Seeded source of delayed, possibly lossy true labels.
///
/// Every delivery path goes through this type, and `labels_dispensed`
/// counts them all: monitoring labels handed out by [`oracle_poll`] and
/// batch annotations charged by [`LabelOracle::annotate_batch`]. Runs audit
/// their label cost against this counter.
#[derive(Debug, Clone)]
pub struct LabelOracle {
    l_access: f64,
    l_delay: usize,
    rng: ChaCha8Rng,
    pending: VecDeque<Pending>,
    dispensed: u64,
    last_observed: Option<usize>,
}

impl LabelOracle {
    pub fn new(l_access: f64, l_delay: usize, seed: u64) -> Result<Self> {
        if !(l_access > 0.0 && l_access <= 100.0) {
            return Err(Error::invalid(format!(
                "l_access must be in (0, 100], got {l_access}"
            )));
        }
        Ok(LabelOracle {
            l_access,
            l_delay,
            rng: rng_from(seed),
            pending: VecDeque::new(),
            dispensed: 0,
            last_observed: None,
        })
    }

    pub fn l_access(&self) -> f64 {
        self.l_access
    }

    pub fn l_delay(&self) -> usize {
        self.l_delay
    }

    pub fn labels_dispensed(&self) -> u64 {
        self.dispensed
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    /// Records `n` on-demand annotations (a retraining batch). The labels
    /// themselves come from the stream; this only charges the cost.
    pub fn annotate_batch(&mut self, n: usize) {
        self.dispensed += n as u64;
    }
}

/// Presents the true label of instance `t` to the oracle, which decides
/// once whether it will ever come back. With probability `l_access`% the
/// label is queued for arrival at `t + l_delay`; otherwise it is lost.
///
/// `t` must be strictly increasing across calls, which keeps the pending
/// queue sorted by due time for free (the delay is constant).
pub fn oracle_observe(oracle: &mut LabelOracle, t: usize, true_label: usize) -> Result<()> {
    if let Some(last) = oracle.last_observed {
        if t <= last {
            return Err(Error::invalid(format!(
                "observations must have strictly increasing time, got {t} after {last}"
            )));
        }
    }
    oracle.last_observed = Some(t);

    let u: f64 = oracle.rng.gen();
    if u < oracle.l_access / 100.0 {
        oracle.pending.push_back(Pending {
            due: t + oracle.l_delay,
            index: t,
            label: true_label,
        });
    }
    Ok(())
}

/// Returns and removes every pending label whose due time has passed, as
/// `(instance index, true label)` pairs in due order (which, the delay
/// being constant, is also instance order).
pub fn oracle_poll(oracle: &mut LabelOracle, t: usize) -> Vec<(usize, usize)> {
    let mut arrived = Vec::new();
    while let Some(front) = oracle.pending.front() {
        if front.due > t {
            break;
        }
        let p = oracle.pending.pop_front().unwrap();
        arrived.push((p.index, p.label));
    }
    oracle.dispensed += arrived.len() as u64;
    arrived
}

/// Bounded map from instance index to the prediction served for it.
///
/// Entries older than `retention` instances behind the newest record are
/// dropped, so memory stays flat on unbounded streams. Callers size the
/// retention to cover the longest wait a lookup can have: the label delay
/// plus a retraining window.
#[derive(Debug, Clone, Default)]
pub struct PredictionLog {
    entries: VecDeque<(usize, usize)>,
    retention: usize,
}

impl PredictionLog {
    pub fn new(retention: usize) -> Self {
        PredictionLog {
            entries: VecDeque::new(),
            retention,
        }
    }

    /// Records the prediction for instance `t`, evicting entries that have
    /// fallen out of the retention horizon. `t` must increase across calls.
    pub fn record(&mut self, t: usize, predicted: usize) -> Result<()> {
        if let Some(&(last, _)) = self.entries.back() {
            if t <= last {
                return Err(Error::invalid(format!(
                    "predictions must be recorded in increasing time, got {t} after {last}"
                )));
            }
        }
        self.entries.push_back((t, predicted));
        while let Some(&(oldest, _)) = self.entries.front() {
            if oldest + self.retention < t {
                self.entries.pop_front();
            } else {
                break;
            }
        }
        Ok(())
    }

    pub fn get(&self, t: usize) -> Option<usize> {
        // Indices are recorded consecutively in practice, so the offset
        // from the front is a direct hit; fall back gracefully if not.
        let &(front, _) = self.entries.front()?;
        let at = t.checked_sub(front)?;
        match self.entries.get(at) {
            Some(&(index, predicted)) if index == t => Some(predicted),
            _ => self
                .entries
                .iter()
                .find(|&&(index, _)| index == t)
                .map(|&(_, predicted)| predicted),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Scores one arrived label against the logged prediction for its instance
/// and feeds the 0/1 error to the detector.
pub fn supervised_error_step(
    arrived: (usize, usize),
    log: &PredictionLog,
    detector: &mut PageHinkleyState,
) -> Result<Detection> {
    let (index, true_label) = arrived;
    let predicted = log.get(index).ok_or_else(|| {
        Error::invalid(format!(
            "no logged prediction for instance {index}; retention too short or never predicted"
        ))
    })?;
    let e = if predicted == true_label { 0.0 } else { 1.0 };
    ph_update(detector, e)
}

/// Every evaluated adaptation strategy, including the two baselines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodKind {
    /// Static baseline: train once, never adapt.
    BlSt,
    /// Periodic baseline: retrain every W instances, no detection.
    BlRet,
    /// Strongly supervised detection (all labels, immediate).
    Ss,
    /// Weakly supervised detection (a fraction of labels, immediate).
    Ws,
    /// Strongly supervised with delayed labels.
    Dss,
    /// Weakly supervised with delayed labels.
    Dws,
    /// Output sliding monitor: windowed test on predicted-score streams.
    Os,
    /// Output fixed monitor: frozen reference window on predicted scores.
    Of,
    /// Feature monitor: per-feature windowed tests on raw inputs.
    Ff,
    /// Student-teacher mimicking-loss detection.
    Studd,
}

impl MethodKind {
    pub const ALL: [MethodKind; 10] = [
        MethodKind::BlSt,
        MethodKind::BlRet,
        MethodKind::Ss,
        MethodKind::Ws,
        MethodKind::Dss,
        MethodKind::Dws,
        MethodKind::Os,
        MethodKind::Of,
        MethodKind::Ff,
        MethodKind::Studd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::BlSt => "bl-st",
            MethodKind::BlRet => "bl-ret",
            MethodKind::Ss => "ss",
            MethodKind::Ws => "ws",
            MethodKind::Dss => "dss",
            MethodKind::Dws => "dws",
            MethodKind::Os => "os",
            MethodKind::Of => "of",
            MethodKind::Ff => "ff",
            MethodKind::Studd => "studd",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .iter()
            .copied()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method '{s}'")))
    }
}
