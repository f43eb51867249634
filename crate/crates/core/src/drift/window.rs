//! Reference/detection window monitors driven by the KS test.
//!
//! Two buffers of equal size are compared at every update once both are
//! full. In sliding mode the reference window trails immediately behind the
//! detection window, so both advance each step; in fixed mode the reference
//! is frozen as soon as it fills (the first `window_size` values after
//! construction or reset) and only the detection window slides.
//!
//! Buffers keep a sorted mirror updated incrementally, so one update costs
//! O(window) instead of a fresh O(window log window) sort per test. That
//! matters: monitors test at every step, and the experiments feed them
//! streams of 10^5 values.

use std::collections::VecDeque;

use crate::drift::ks::{ks_d_sorted, ks_pvalue};
use crate::drift::Detection;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonitorMode {
    /// Reference window holds the `window_size` values immediately before
    /// the detection window.
    SlidingReference,
    /// Reference window holds the first `window_size` values seen after
    /// construction or reset.
    FixedReference,
}

#[derive(Debug, Clone, Default)]
struct Channel {
    reference: VecDeque<f64>,
    detection: VecDeque<f64>,
    reference_sorted: Vec<f64>,
    detection_sorted: Vec<f64>,
}

impl Channel {
    fn push(&mut self, mode: MonitorMode, window: usize, x: f64) {
        match mode {
            MonitorMode::SlidingReference => {
                self.detection.push_back(x);
                sorted_insert(&mut self.detection_sorted, x);
                if self.detection.len() > window {
                    let old = self.detection.pop_front().unwrap();
                    sorted_remove(&mut self.detection_sorted, old);
                    self.reference.push_back(old);
                    sorted_insert(&mut self.reference_sorted, old);
                    if self.reference.len() > window {
                        let dead = self.reference.pop_front().unwrap();
                        sorted_remove(&mut self.reference_sorted, dead);
                    }
                }
            }
            MonitorMode::FixedReference => {
                if self.reference.len() < window {
                    self.reference.push_back(x);
                    sorted_insert(&mut self.reference_sorted, x);
                } else {
                    self.detection.push_back(x);
                    sorted_insert(&mut self.detection_sorted, x);
                    if self.detection.len() > window {
                        let old = self.detection.pop_front().unwrap();
                        sorted_remove(&mut self.detection_sorted, old);
                    }
                }
            }
        }
    }

    fn warm(&self, window: usize) -> bool {
        self.reference.len() == window && self.detection.len() == window
    }
}

fn sorted_insert(v: &mut Vec<f64>, x: f64) {
    let at = v.partition_point(|&e| e < x);
    v.insert(at, x);
}

fn sorted_remove(v: &mut Vec<f64>, x: f64) {
    let at = v.partition_point(|&e| e < x);
    debug_assert!(at < v.len() && v[at] == x);
    v.remove(at);
}

/// A latched drift monitor over one scalar signal or one signal per feature.
#[derive(Debug, Clone)]
pub struct WindowMonitor {
    mode: MonitorMode,
    window_size: usize,
    significance: f64,
    channels: Vec<Channel>,
    alarmed: bool,
}

impl WindowMonitor {
    pub const DEFAULT_SIGNIFICANCE: f64 = 0.001;

    /// Monitor for a single scalar signal (e.g. predicted-class confidence).
    pub fn scalar(mode: MonitorMode, window_size: usize, significance: f64) -> Result<Self> {
        Self::build(mode, window_size, significance, 1)
    }

    /// Monitor with one buffer pair per feature; an alarm on any feature is
    /// an alarm of the monitor (no multiplicity correction).
    pub fn per_feature(
        mode: MonitorMode,
        window_size: usize,
        significance: f64,
        n_features: usize,
    ) -> Result<Self> {
        if n_features == 0 {
            return Err(Error::invalid("per-feature monitor needs features"));
        }
        Self::build(mode, window_size, significance, n_features)
    }

    fn build(
        mode: MonitorMode,
        window_size: usize,
        significance: f64,
        channels: usize,
    ) -> Result<Self> {
        if window_size == 0 {
            return Err(Error::invalid("monitor window size must be positive"));
        }
        if !(significance > 0.0 && significance < 1.0) {
            return Err(Error::invalid("monitor significance must be in (0, 1)"));
        }
        Ok(WindowMonitor {
            mode,
            window_size,
            significance,
            channels: vec![Channel::default(); channels],
            alarmed: false,
        })
    }

    pub fn n_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn is_alarmed(&self) -> bool {
        self.alarmed
    }
}

/// Feeds one observation: a 1-slice for scalar monitors, the full feature
/// vector for per-feature monitors.
///
/// Returns `Warming` until both buffers are full, then runs the KS test
/// (per channel) at every step. A `Change` latches: further updates return
/// `Change` without touching the buffers until [`monitor_reset`].
pub fn monitor_update(mon: &mut WindowMonitor, values: &[f64]) -> Result<Detection> {
    if values.len() != mon.channels.len() {
        return Err(Error::DimensionMismatch {
            expected: mon.channels.len(),
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("monitor input must be finite"));
    }
    if mon.alarmed {
        return Ok(Detection::Change);
    }

    for (ch, &x) in mon.channels.iter_mut().zip(values) {
        ch.push(mon.mode, mon.window_size, x);
    }
    if !mon.channels[0].warm(mon.window_size) {
        return Ok(Detection::Warming);
    }

    for ch in &mon.channels {
        let d = ks_d_sorted(&ch.reference_sorted, &ch.detection_sorted);
        let p = ks_pvalue(d, mon.window_size, mon.window_size)?;
        if p < mon.significance {
            mon.alarmed = true;
            return Ok(Detection::Change);
        }
    }
    Ok(Detection::NoChange)
}

/// Empties every buffer and clears the alarm latch; parameters survive. In
/// fixed mode the reference refills from the next `window_size` values.
pub fn monitor_reset(mon: &mut WindowMonitor) {
    for ch in mon.channels.iter_mut() {
        ch.reference.clear();
        ch.detection.clear();
        ch.reference_sorted.clear();
        ch.detection_sorted.clear();
    }
    mon.alarmed = false;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{rng_from, standard_normal};
    use proptest::prelude::*;

    #[test]
    fn fixed_mode_warms_for_2w_minus_1_updates() {
        let mut mon =
            WindowMonitor::scalar(MonitorMode::FixedReference, 100, 0.001).unwrap();
        for _ in 0..199 {
            assert_eq!(monitor_update(&mut mon, &[1.0]).unwrap(), Detection::Warming);
        }
        assert_eq!(monitor_update(&mut mon, &[1.0]).unwrap(), Detection::NoChange);
    }

    #[test]
    fn constant_signal_never_alarms() {
        for mode in [MonitorMode::SlidingReference, MonitorMode::FixedReference] {
            let mut mon = WindowMonitor::scalar(mode, 50, 0.001).unwrap();
            for _ in 0..500 {
                assert_ne!(monitor_update(&mut mon, &[0.25]).unwrap(), Detection::Change);
            }
        }
    }

    #[test]
    fn sliding_buffers_hold_exact_ranges() {
        // Stationary noise: no alarm fires, so the buffers keep sliding and
        // must hold exactly the (t-2w, t-w] and (t-w, t] input ranges.
        let w = 20;
        let mut mon =
            WindowMonitor::scalar(MonitorMode::SlidingReference, w, 0.001).unwrap();
        let mut rng = rng_from(3);
        let mut fed: Vec<f64> = Vec::new();
        for t in 1..=100usize {
            let x = standard_normal(&mut rng);
            fed.push(x);
            monitor_update(&mut mon, &[x]).unwrap();
            assert!(!mon.is_alarmed(), "t = {t}");
            if t >= 2 * w {
                let ch = &mon.channels[0];
                let reference: Vec<f64> = ch.reference.iter().copied().collect();
                let detection: Vec<f64> = ch.detection.iter().copied().collect();
                assert_eq!(reference, fed[t - 2 * w..t - w], "t = {t}");
                assert_eq!(detection, fed[t - w..t], "t = {t}");
            }
        }
    }

    #[test]
    fn mean_shift_alarms_at_first_possible_test() {
        // Fixed reference from N(0,1); detection values from N(2,1). The
        // true CDF distance is about 0.68, far past the critical value near
        // 0.38 for w = 50 at significance 0.001, so the first test after
        // the detection window fills with post-shift values should fire.
        let mut rng = rng_from(905);
        let w = 50;
        let mut mon =
            WindowMonitor::scalar(MonitorMode::FixedReference, w, 0.001).unwrap();
        let mut outcome = Detection::Warming;
        for t in 1..=2 * w {
            let x = if t <= w {
                standard_normal(&mut rng)
            } else {
                2.0 + standard_normal(&mut rng)
            };
            outcome = monitor_update(&mut mon, &[x]).unwrap();
        }
        assert_eq!(outcome, Detection::Change);
    }

    #[test]
    fn alarm_latches_until_reset() {
        let mut mon =
            WindowMonitor::scalar(MonitorMode::FixedReference, 30, 0.001).unwrap();
        let mut rng = rng_from(7);
        let mut fired = false;
        for t in 0..200 {
            let x = if t < 60 {
                standard_normal(&mut rng)
            } else {
                5.0 + standard_normal(&mut rng)
            };
            if monitor_update(&mut mon, &[x]).unwrap() == Detection::Change {
                fired = true;
                break;
            }
        }
        assert!(fired);
        assert_eq!(monitor_update(&mut mon, &[0.0]).unwrap(), Detection::Change);
        assert!(mon.is_alarmed());

        monitor_reset(&mut mon);
        assert!(!mon.is_alarmed());
        assert_eq!(monitor_update(&mut mon, &[0.0]).unwrap(), Detection::Warming);
    }

    #[test]
    fn per_feature_alarms_on_any_feature() {
        let w = 40;
        let mut mon =
            WindowMonitor::per_feature(MonitorMode::FixedReference, w, 0.001, 2).unwrap();
        let mut rng = rng_from(11);
        let mut fired_at = None;
        for t in 1..=4 * w {
            // Feature 0 stays stationary; feature 1 shifts by 4 after the
            // reference window is frozen.
            let f0 = standard_normal(&mut rng);
            let f1 = if t <= w {
                standard_normal(&mut rng)
            } else {
                4.0 + standard_normal(&mut rng)
            };
            if monitor_update(&mut mon, &[f0, f1]).unwrap() == Detection::Change {
                fired_at = Some(t);
                break;
            }
        }
        assert_eq!(fired_at, Some(2 * w));
    }

    #[test]
    fn per_feature_dimension_mismatch_is_rejected() {
        let mut mon =
            WindowMonitor::per_feature(MonitorMode::SlidingReference, 10, 0.001, 3).unwrap();
        let err = monitor_update(&mut mon, &[1.0, 2.0]).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 3, got: 2 }));
    }

    #[test]
    fn constructor_validation() {
        assert!(WindowMonitor::scalar(MonitorMode::SlidingReference, 0, 0.001).is_err());
        assert!(WindowMonitor::scalar(MonitorMode::SlidingReference, 10, 0.0).is_err());
        assert!(WindowMonitor::scalar(MonitorMode::SlidingReference, 10, 1.0).is_err());
        assert!(WindowMonitor::per_feature(MonitorMode::SlidingReference, 10, 0.5, 0).is_err());
    }

    proptest! {
        #[test]
        fn sorted_mirrors_stay_consistent(xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
            let w = 16;
            let mut mon =
                WindowMonitor::scalar(MonitorMode::SlidingReference, w, 1e-9).unwrap();
            for &x in &xs {
                monitor_update(&mut mon, &[x]).unwrap();
                let ch = &mon.channels[0];
                let mut expect: Vec<f64> = ch.reference.iter().copied().collect();
                expect.sort_unstable_by(f64::total_cmp);
                prop_assert_eq!(&expect, &ch.reference_sorted);
                let mut expect: Vec<f64> = ch.detection.iter().copied().collect();
                expect.sort_unstable_by(f64::total_cmp);
                prop_assert_eq!(&expect, &ch.detection_sorted);
            }
        }
    }
}
