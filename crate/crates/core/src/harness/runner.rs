//! The prequential experiment loop.
//!
//! One run: fit on the first W labeled instances, then walk the rest of the
//! stream. Every instance is predicted by the deployed model and scored for
//! evaluation; the method under test decides what signal (if any) feeds its
//! detector and when to retrain. On an alarm the model is refit on the
//! latest W observations, whose labels are annotated on demand and charged
//! to the label budget whether or not some had already arrived for free.
//!
//! Labels flow through exactly one accounting point, the run's
//! [`LabelOracle`]: monitoring labels via observe/poll, batch annotations
//! via [`LabelOracle::annotate_batch`]. Unsupervised methods must end a run
//! with exactly W·(1 + alarms) dispensed labels; the runner audits this and
//! fails loudly rather than report an impossible cost.

use crate::drift::{
    monitor_reset, monitor_update, ph_reset, Detection, MonitorMode, PageHinkleyState,
    WindowMonitor,
};
use crate::error::{Error, Result};
use crate::harness::metrics::{cohen_kappa, label_cost_ratio, sliding_kappa};
use crate::learners::{fit_forest, RandomForest, TreeConfig};
use crate::rng::{mix, mix_str};
use crate::stream::{DataStream, Instance, StreamSchema};
use crate::studd::{fit_student_teacher, studd_adapt, studd_step, StuddModel};
use crate::supervision::{
    oracle_observe, oracle_poll, supervised_error_step, LabelOracle, MethodKind, PredictionLog,
};

/// Everything a single run needs beyond the stream itself.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub method: MethodKind,
    /// Training window W: the initial fit and every adaptation batch.
    pub window: usize,
    /// Detector prototype for the error-rate methods; its state is ignored,
    /// its parameters are copied into each fresh detector.
    pub ph: PageHinkleyState,
    /// Significance level for the KS window monitors.
    pub ks_significance: f64,
    /// Percentage of labels that ever arrive, for WS and DWS.
    pub l_access: f64,
    /// Label delay for DSS and DWS; `None` means W/2.
    pub l_delay: Option<usize>,
    pub n_trees: usize,
    pub seed: u64,
    /// Window for the sliding-kappa evaluation series.
    pub sliding_eval_window: usize,
}

impl ExperimentConfig {
    pub fn new(dataset: impl Into<String>, method: MethodKind, window: usize, seed: u64) -> Self {
        ExperimentConfig {
            dataset: dataset.into(),
            method,
            window,
            ph: PageHinkleyState::default(),
            ks_significance: 0.001,
            l_access: 50.0,
            l_delay: None,
            n_trees: 100,
            seed,
            sliding_eval_window: 200,
        }
    }

    pub fn effective_l_delay(&self) -> usize {
        self.l_delay.unwrap_or(self.window / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.window == 0 {
            return Err(Error::invalid("training window must be positive"));
        }
        if self.n_trees == 0 {
            return Err(Error::invalid("n_trees must be positive"));
        }
        if !(self.ks_significance > 0.0 && self.ks_significance < 1.0) {
            return Err(Error::invalid(format!(
                "ks_significance must be in (0, 1), got {}",
                self.ks_significance
            )));
        }
        if !(self.l_access > 0.0 && self.l_access <= 100.0) {
            return Err(Error::invalid(format!(
                "l_access must be in (0, 100], got {}",
                self.l_access
            )));
        }
        if self.sliding_eval_window < 2 {
            return Err(Error::invalid(
                "sliding evaluation window must be at least 2",
            ));
        }
        Ok(())
    }
}

/// The complete outcome of one run.
///
/// `alarm_times` are 1-based positions within the online phase (instance
/// W+t of the full stream), so the periodic baseline reads exactly
/// W, 2W, 3W, …. Each `sliding_kappa` pair is (online position of the
/// window's last instance, kappa over that window).
///
/// Report files are written by hand (see the report module) to keep the
/// bytes pinned; the serde derives exist for reading reports back in.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RunReport {
    pub dataset: String,
    pub method: MethodKind,
    pub kappa: f64,
    pub label_ratio: f64,
    pub n_alarms: usize,
    pub alarm_times: Vec<usize>,
    pub sliding_kappa: Vec<(usize, f64)>,
    pub labels_used: u64,
    pub stream_length: usize,
    pub seed: u64,
}

enum MethodState {
    Static,
    Periodic,
    Supervised {
        log: PredictionLog,
        detector: PageHinkleyState,
    },
    Studd(StuddModel),
    Output(WindowMonitor),
    Feature(WindowMonitor),
}

fn is_unsupervised(method: MethodKind) -> bool {
    !matches!(
        method,
        MethodKind::Ss | MethodKind::Ws | MethodKind::Dss | MethodKind::Dws
    )
}

/// Oracle availability parameters implied by the method.
fn oracle_params(config: &ExperimentConfig) -> (f64, usize) {
    match config.method {
        MethodKind::Ss => (100.0, 0),
        MethodKind::Ws => (config.l_access, 0),
        MethodKind::Dss => (100.0, config.effective_l_delay()),
        MethodKind::Dws => (config.l_access, config.effective_l_delay()),
        // Unsupervised methods never poll; the parameters are inert.
        _ => (100.0, 0),
    }
}

fn max_probability(proba: &[f64]) -> f64 {
    proba.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
}

struct Run<'a> {
    config: &'a ExperimentConfig,
    tree_config: TreeConfig,
    schema: &'a StreamSchema,
    all: &'a [Instance],
    oracle: LabelOracle,
    /// Deployed model for every method except STUDD, whose teacher lives
    /// inside its state.
    teacher: Option<RandomForest>,
    state: MethodState,
    alarm_times: Vec<usize>,
    adaptations: u64,
}

impl Run<'_> {
    /// Retrains on the latest W observations ending at online position `t`
    /// (inclusive) and resets the method's detector. Batch labels are
    /// annotated on demand and charged, even where redundant.
    fn adapt(&mut self, t: usize) -> Result<()> {
        self.alarm_times.push(t);
        self.adaptations += 1;
        let seed = mix(self.config.seed, self.adaptations);
        let w = self.config.window;
        // The alarm instance sits at absolute 0-based index w + t - 1; the
        // latest W observations including it span [t, w + t).
        let batch = &self.all[t..w + t];
        self.oracle.annotate_batch(w);

        match &mut self.state {
            MethodState::Studd(model) => {
                *model = studd_adapt(model, batch, seed)?;
            }
            _ => {
                self.teacher = Some(fit_forest(
                    batch,
                    self.schema,
                    self.config.n_trees,
                    &self.tree_config,
                    seed,
                )?);
                match &mut self.state {
                    MethodState::Supervised { detector, .. } => ph_reset(detector),
                    MethodState::Output(monitor) | MethodState::Feature(monitor) => {
                        monitor_reset(monitor)
                    }
                    MethodState::Periodic => {}
                    MethodState::Static => unreachable!("the static baseline never alarms"),
                    MethodState::Studd(_) => unreachable!(),
                }
            }
        }
        Ok(())
    }

    /// Processes online instance `t` (1-based): predicts, feeds the
    /// method's signal, adapts on alarm. Returns (truth, prediction).
    fn step(&mut self, t: usize, inst: &Instance) -> Result<(usize, usize)> {
        let truth = inst.label.unwrap();

        let mut fire = false;
        let pred = match &mut self.state {
            MethodState::Studd(model) => {
                let (pred, status) = studd_step(model, &inst.features)?;
                fire = status == Detection::Change;
                pred
            }
            _ => self.teacher.as_ref().unwrap().predict(&inst.features)?,
        };

        match &mut self.state {
            MethodState::Static | MethodState::Studd(_) => {}
            MethodState::Periodic => fire = t % self.config.window == 0,
            MethodState::Supervised { log, .. } => log.record(t, pred)?,
            MethodState::Output(monitor) => {
                let proba = self.teacher.as_ref().unwrap().predict_proba(&inst.features)?;
                fire = monitor_update(monitor, &[max_probability(&proba)])? == Detection::Change;
            }
            MethodState::Feature(monitor) => {
                fire = monitor_update(monitor, &inst.features)? == Detection::Change;
            }
        }

        // Supervised methods score arrivals one at a time, adapting
        // mid-batch so later arrivals meet the fresh detector.
        if matches!(self.state, MethodState::Supervised { .. }) {
            oracle_observe(&mut self.oracle, t, truth)?;
            for arrived in oracle_poll(&mut self.oracle, t) {
                let fired = match &mut self.state {
                    MethodState::Supervised { log, detector } => {
                        supervised_error_step(arrived, log, detector)? == Detection::Change
                    }
                    _ => unreachable!(),
                };
                if fired {
                    self.adapt(t)?;
                }
            }
        }

        if fire {
            self.adapt(t)?;
        }
        Ok((truth, pred))
    }
}

pub fn run_experiment(stream: &DataStream, config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let w = config.window;
    let all = stream.instances();
    let n = all.len();
    if n <= w {
        return Err(Error::invalid(format!(
            "stream of length {n} cannot cover a training window of {w}"
        )));
    }
    if let Some(i) = all.iter().position(|inst| inst.label.is_none()) {
        return Err(Error::invalid(format!(
            "evaluation requires a fully labeled stream; instance {} has no label",
            i + 1
        )));
    }

    let schema = stream.schema();
    let tree_config = TreeConfig::default();
    let (l_access, l_delay) = oracle_params(config);
    let mut oracle = LabelOracle::new(l_access, l_delay, mix_str(config.seed, "oracle"))?;

    // Initial fit on the first W instances, charged to the label budget.
    oracle.annotate_batch(w);
    let train = &all[..w];
    let fit_teacher =
        || -> Result<RandomForest> { fit_forest(train, schema, config.n_trees, &tree_config, config.seed) };
    let fresh_detector = || {
        let mut d = config.ph.clone();
        ph_reset(&mut d);
        d
    };

    let (teacher, state) = match config.method {
        MethodKind::BlSt => (Some(fit_teacher()?), MethodState::Static),
        MethodKind::BlRet => (Some(fit_teacher()?), MethodState::Periodic),
        MethodKind::Ss | MethodKind::Ws | MethodKind::Dss | MethodKind::Dws => (
            Some(fit_teacher()?),
            MethodState::Supervised {
                log: PredictionLog::new(l_delay + w),
                detector: fresh_detector(),
            },
        ),
        MethodKind::Os => (
            Some(fit_teacher()?),
            MethodState::Output(WindowMonitor::scalar(
                MonitorMode::SlidingReference,
                w,
                config.ks_significance,
            )?),
        ),
        MethodKind::Of => (
            Some(fit_teacher()?),
            MethodState::Output(WindowMonitor::scalar(
                MonitorMode::FixedReference,
                w,
                config.ks_significance,
            )?),
        ),
        MethodKind::Ff => (
            Some(fit_teacher()?),
            MethodState::Feature(WindowMonitor::per_feature(
                MonitorMode::SlidingReference,
                w,
                config.ks_significance,
                schema.n_features,
            )?),
        ),
        MethodKind::Studd => (
            None,
            MethodState::Studd(fit_student_teacher(
                train,
                schema,
                config.n_trees,
                &tree_config,
                fresh_detector(),
                config.seed,
            )?),
        ),
    };

    let mut run = Run {
        config,
        tree_config,
        schema,
        all,
        oracle,
        teacher,
        state,
        alarm_times: Vec::new(),
        adaptations: 0,
    };

    let online = &all[w..];
    let mut y_true = Vec::with_capacity(online.len());
    let mut y_pred = Vec::with_capacity(online.len());
    for (offset, inst) in online.iter().enumerate() {
        let (truth, pred) = run.step(offset + 1, inst)?;
        y_true.push(truth);
        y_pred.push(pred);
    }

    if is_unsupervised(config.method) {
        let expected = (w as u64) * (1 + run.alarm_times.len() as u64);
        if run.oracle.labels_dispensed() != expected {
            return Err(Error::audit(format!(
                "unsupervised {} run dispensed {} labels, expected {}",
                config.method,
                run.oracle.labels_dispensed(),
                expected
            )));
        }
    }

    let kappa = cohen_kappa(&y_true, &y_pred)?;
    let series = sliding_kappa(&y_true, &y_pred, config.sliding_eval_window)?;
    let sliding = series
        .into_iter()
        .enumerate()
        .map(|(j, v)| (config.sliding_eval_window + j, v))
        .collect();
    let labels_used = run.oracle.labels_dispensed();

    Ok(RunReport {
        dataset: config.dataset.clone(),
        method: config.method,
        kappa,
        label_ratio: label_cost_ratio(labels_used, n)?,
        n_alarms: run.alarm_times.len(),
        alarm_times: run.alarm_times,
        sliding_kappa: sliding,
        labels_used,
        stream_length: n,
        seed: config.seed,
    })
}
