//! Page-Hinkley test for one-sided mean increases.
//!
//! The detector tracks how far the signal runs above its own running mean
//! (minus a tolerance `delta`) and alarms when the accumulated excess
//! crosses `lambda_threshold`. The exact recurrence is pinned:
//!
//! ```text
//! count += 1
//! mean  += (x - mean) / count
//! cum   := max(0, alpha * cum + (x - mean - delta))
//! change iff count >= min_instances and cum > lambda_threshold
//! ```
//!
//! Defaults match the parameterization used throughout the experiments:
//! delta 0.001, lambda 50, alpha 0.9999, min_instances 30.

use crate::drift::Detection;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PageHinkleyState {
    /// Magnitude tolerance subtracted from every deviation.
    pub delta: f64,
    /// Alarm threshold on the accumulated excess.
    pub lambda_threshold: f64,
    /// Forgetting factor applied to the accumulator each step.
    pub alpha: f64,
    /// Updates to absorb before alarms are allowed.
    pub min_instances: u64,

    count: u64,
    running_mean: f64,
    cum_sum: f64,
}

impl PageHinkleyState {
    pub fn new(delta: f64, lambda_threshold: f64, alpha: f64, min_instances: u64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::invalid("page-hinkley delta must be >= 0"));
        }
        if !(lambda_threshold > 0.0) {
            return Err(Error::invalid("page-hinkley lambda must be > 0"));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid("page-hinkley alpha must be in (0, 1]"));
        }
        if min_instances == 0 {
            return Err(Error::invalid("page-hinkley min_instances must be >= 1"));
        }
        Ok(PageHinkleyState {
            delta,
            lambda_threshold,
            alpha,
            min_instances,
            count: 0,
            running_mean: 0.0,
            cum_sum: 0.0,
        })
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn running_mean(&self) -> f64 {
        self.running_mean
    }

    pub fn cum_sum(&self) -> f64 {
        self.cum_sum
    }
}

impl Default for PageHinkleyState {
    fn default() -> Self {
        PageHinkleyState::new(0.001, 50.0, 0.9999, 30).unwrap()
    }
}

/// Feeds one loss value; returns [`Detection::Change`] when the test fires.
///
/// After a change the state keeps accumulating; the caller decides when to
/// [`ph_reset`] (normally right after adapting the model).
pub fn ph_update(state: &mut PageHinkleyState, x: f64) -> Result<Detection> {
    if !x.is_finite() {
        return Err(Error::invalid(format!("page-hinkley input {x} not finite")));
    }
    state.count += 1;
    state.running_mean += (x - state.running_mean) / state.count as f64;
    state.cum_sum = (state.alpha * state.cum_sum + (x - state.running_mean - state.delta)).max(0.0);

    if state.count >= state.min_instances && state.cum_sum > state.lambda_threshold {
        Ok(Detection::Change)
    } else {
        Ok(Detection::NoChange)
    }
}

/// Returns the state to freshly-initialized form, keeping its parameters.
pub fn ph_reset(state: &mut PageHinkleyState) {
    state.count = 0;
    state.running_mean = 0.0;
    state.cum_sum = 0.0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constant_stream_never_fires() {
        let mut ph = PageHinkleyState::default();
        for _ in 0..100_000 {
            assert_eq!(ph_update(&mut ph, 0.1).unwrap(), Detection::NoChange);
        }
        assert_eq!(ph.cum_sum(), 0.0);
    }

    #[test]
    fn mean_step_fires_at_pinned_step() {
        // 100 zeros then ones: with the default parameters the accumulator
        // crosses lambda=50 on overall update 166, i.e. 66 steps after the
        // shift. Pinned from an exact hand simulation of the recurrence.
        let mut ph = PageHinkleyState::default();
        let mut fired_at = None;
        for step in 1..=300 {
            let x = if step <= 100 { 0.0 } else { 1.0 };
            if ph_update(&mut ph, x).unwrap() == Detection::Change && fired_at.is_none() {
                fired_at = Some(step);
                break;
            }
        }
        assert_eq!(fired_at, Some(166));
    }

    #[test]
    fn constant_high_stream_stays_quiet() {
        // Constant 10s never charge the accumulator: after the first step
        // every deviation is exactly -delta.
        let mut ph = PageHinkleyState::new(0.001, 1.0, 0.9999, 30).unwrap();
        for _ in 0..29 {
            assert_eq!(ph_update(&mut ph, 10.0).unwrap(), Detection::NoChange);
        }
        assert_eq!(ph.cum_sum(), 0.0);
    }

    #[test]
    fn min_instances_gates_early_alarms() {
        // A ramp drives cum_sum far past lambda=1 well before update 30,
        // so only the warm-up gate separates NoChange from Change.
        let mut ph = PageHinkleyState::new(0.001, 1.0, 0.9999, 30).unwrap();
        for t in 0..29 {
            assert_eq!(ph_update(&mut ph, t as f64).unwrap(), Detection::NoChange);
        }
        assert!(ph.cum_sum() > 1.0);
        assert_eq!(ph_update(&mut ph, 29.0).unwrap(), Detection::Change);
    }

    #[test]
    fn non_finite_input_is_rejected() {
        let mut ph = PageHinkleyState::default();
        assert!(ph_update(&mut ph, f64::NAN).is_err());
        assert!(ph_update(&mut ph, f64::INFINITY).is_err());
    }

    #[test]
    fn reset_restores_fresh_state() {
        let mut ph = PageHinkleyState::new(0.01, 5.0, 0.99, 10).unwrap();
        for i in 0..50 {
            ph_update(&mut ph, i as f64 * 0.3).unwrap();
        }
        ph_reset(&mut ph);
        assert_eq!(ph.count(), 0);
        assert_eq!(ph.cum_sum(), 0.0);
        assert_eq!(ph.running_mean(), 0.0);
        assert_eq!(ph, PageHinkleyState::new(0.01, 5.0, 0.99, 10).unwrap());
    }

    #[test]
    fn parameter_validation() {
        assert!(PageHinkleyState::new(-0.1, 50.0, 0.9999, 30).is_err());
        assert!(PageHinkleyState::new(0.001, 0.0, 0.9999, 30).is_err());
        assert!(PageHinkleyState::new(0.001, 50.0, 0.0, 30).is_err());
        assert!(PageHinkleyState::new(0.001, 50.0, 1.1, 30).is_err());
        assert!(PageHinkleyState::new(0.001, 50.0, 0.9999, 0).is_err());
    }

    proptest! {
        #[test]
        fn replay_after_reset_is_identical(xs in prop::collection::vec(-10.0f64..10.0, 1..300)) {
            let mut ph = PageHinkleyState::default();
            let first: Vec<Detection> =
                xs.iter().map(|&x| ph_update(&mut ph, x).unwrap()).collect();
            ph_reset(&mut ph);
            let second: Vec<Detection> =
                xs.iter().map(|&x| ph_update(&mut ph, x).unwrap()).collect();
            prop_assert_eq!(first, second);
        }

        #[test]
        fn cum_sum_stays_nonnegative(xs in prop::collection::vec(-100.0f64..100.0, 1..300)) {
            let mut ph = PageHinkleyState::new(0.001, 50.0, 0.5, 30).unwrap();
            for &x in &xs {
                ph_update(&mut ph, x).unwrap();
                prop_assert!(ph.cum_sum() >= 0.0);
            }
        }
    }
}
