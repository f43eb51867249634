//! Sensitivity grid over supervision strength.
//!
//! The question the grid answers: how weak and how late can labels get
//! before supervised monitoring stops being worth its cost? For every
//! (l_access, l_delay) pair we run the delayed-weak supervised detector,
//! naming the variant by its delay (S_W250, ..., S_W4000). The fully
//! supervised reference and the unsupervised student-teacher run are
//! executed once each and joined into every comparison, then one rank
//! table is built per l_access level.
//!
//! Runs are independent, so they execute in parallel; results are
//! collected back into declaration order, keeping output bytes identical
//! regardless of scheduling.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::ranks::{average_ranks, RankTable, ScoreMatrix};
use crate::harness::runner::{run_experiment, ExperimentConfig, RunReport};
use crate::stream::DataStream;
use crate::supervision::MethodKind;

/// One grid run: the variant label it is ranked under, the supervision
/// parameters it ran with, and its full report. The reference runs carry
/// their effective parameters (full access, no delay).
#[derive(Debug, Clone, PartialEq)]
pub struct GridEntry {
    pub variant: String,
    pub l_access: f64,
    pub l_delay: usize,
    pub report: RunReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOutput {
    /// Variant runs grouped by l_access in input order, delays in input
    /// order within each group, then the SS and STUDD reference runs.
    pub entries: Vec<GridEntry>,
    /// One kappa rank table per l_access level, keyed `l_access_<value>`.
    pub tables: Vec<(String, RankTable)>,
}

fn check_distinct<T: PartialEq + std::fmt::Display>(values: &[T], what: &str) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{what} grid is empty")));
    }
    for (i, v) in values.iter().enumerate() {
        if values[..i].contains(v) {
            return Err(Error::invalid(format!("duplicate {what} value {v}")));
        }
    }
    Ok(())
}

pub fn sensitivity_grid(
    stream: &DataStream,
    base: &ExperimentConfig,
    l_access_set: &[f64],
    l_delay_set: &[usize],
) -> Result<GridOutput> {
    check_distinct(l_access_set, "l_access")?;
    check_distinct(l_delay_set, "l_delay")?;
    base.validate()?;
    for &la in l_access_set {
        if !(la > 0.0 && la <= 100.0) {
            return Err(Error::invalid(format!(
                "l_access grid value must be in (0, 100], got {la}"
            )));
        }
    }

    let mut jobs: Vec<(String, f64, usize, ExperimentConfig)> = Vec::new();
    for &la in l_access_set {
        for &ld in l_delay_set {
            let mut config = base.clone();
            config.method = MethodKind::Dws;
            config.l_access = la;
            config.l_delay = Some(ld);
            jobs.push((format!("S_W{ld}"), la, ld, config));
        }
    }
    for (variant, method) in [("SS", MethodKind::Ss), ("STUDD", MethodKind::Studd)] {
        let mut config = base.clone();
        config.method = method;
        config.l_access = 100.0;
        config.l_delay = Some(0);
        jobs.push((variant.to_string(), 100.0, 0, config));
    }

    let reports: Vec<RunReport> = jobs
        .par_iter()
        .map(|(_, _, _, config)| run_experiment(stream, config))
        .collect::<Result<_>>()?;

    let entries: Vec<GridEntry> = jobs
        .into_iter()
        .zip(reports)
        .map(|((variant, l_access, l_delay, _), report)| GridEntry {
            variant,
            l_access,
            l_delay,
            report,
        })
        .collect();

    // Per-l_access comparison: the delay variants at that access level
    // against the two references, ranked on kappa.
    let mut methods: Vec<String> = l_delay_set.iter().map(|ld| format!("S_W{ld}")).collect();
    methods.push("SS".into());
    methods.push("STUDD".into());

    let kappa_of = |variant: &str, l_access: f64| {
        entries
            .iter()
            .find(|e| e.variant == variant && e.l_access == l_access)
            .map(|e| e.report.kappa)
            .expect("every scheduled variant produced a report")
    };

    let mut tables = Vec::with_capacity(l_access_set.len());
    for &la in l_access_set {
        let mut matrix = ScoreMatrix::new(methods.clone())?;
        for ld in l_delay_set {
            matrix.insert(&base.dataset, &format!("S_W{ld}"), kappa_of(&format!("S_W{ld}"), la))?;
        }
        matrix.insert(&base.dataset, "SS", kappa_of("SS", 100.0))?;
        matrix.insert(&base.dataset, "STUDD", kappa_of("STUDD", 100.0))?;
        tables.push((format!("l_access_{la}"), average_ranks(&matrix, true)?));
    }

    Ok(GridOutput { entries, tables })
}
