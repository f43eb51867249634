//! `studd`: drift-detection experiments from the command line.
//!
//! Three subcommands cover the workflow end to end: `run` executes one
//! method on one stream and writes its report, `grid` sweeps supervision
//! strength (label access and delay) and writes per-level rank tables next
//! to the raw reports, and `ranks` folds a directory of report files into
//! one average-rank table.
//!
//! Exit codes: 0 success, 1 bad input (arguments, config, malformed data),
//! 2 failure while running an otherwise valid experiment.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use studd_core::harness::{
    average_ranks, emit_rank_table, emit_report, run_experiment, sensitivity_grid,
    ExperimentConfig, ReportFormat, RunReport, ScoreMatrix,
};
use studd_core::drift::PageHinkleyState;
use studd_core::stream::{generate_synthetic, load_csv, LabelColumn, SyntheticDriftSpec};
use studd_core::supervision::MethodKind;
use studd_core::{DataStream, Error, Result};

#[derive(Parser)]
#[command(
    name = "studd",
    version,
    about = "Student-teacher drift detection and its supervised/unsupervised rivals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one method over one stream and write its report.
    Run(RunArgs),
    /// Sweep label access and delay over a grid; write reports and
    /// per-access rank tables into a directory.
    Grid(GridArgs),
    /// Aggregate a directory of JSON reports into an average-rank table.
    Ranks(RanksArgs),
}

#[derive(Args)]
struct RunArgs {
    /// CSV file, or `synth:<spec.json>` for a generated stream.
    #[arg(long)]
    data: String,
    /// One of: bl-st, bl-ret, ss, ws, dss, dws, os, of, ff, studd.
    #[arg(long)]
    method: MethodKind,
    /// Training window W (initial fit and every adaptation batch).
    #[arg(long)]
    window: usize,
    #[arg(long)]
    seed: u64,
    /// Percentage of labels that ever arrive (ws, dws).
    #[arg(long)]
    l_access: Option<f64>,
    /// Label arrival delay in instances (dss, dws). Defaults to W/2.
    #[arg(long)]
    l_delay: Option<usize>,
    /// Page-Hinkley magnitude tolerance.
    #[arg(long)]
    delta: Option<f64>,
    /// Significance level for the KS window monitors (os, of, ff).
    #[arg(long)]
    alpha_ks: Option<f64>,
    /// Report file to write.
    #[arg(long)]
    out: PathBuf,
    /// json or csv.
    #[arg(long)]
    format: ReportFormat,
}

#[derive(Args)]
struct GridArgs {
    /// CSV file, or `synth:<spec.json>` for a generated stream.
    #[arg(long)]
    data: String,
    /// Training window W.
    #[arg(long)]
    window: usize,
    #[arg(long)]
    seed: u64,
    /// Label-access percentages to sweep.
    #[arg(long, value_delimiter = ',', default_value = "1,10,25,50")]
    l_access: Vec<f64>,
    /// Label delays to sweep.
    #[arg(long, value_delimiter = ',', default_value = "250,500,1000,1500,2000,4000")]
    l_delay: Vec<usize>,
    /// Page-Hinkley magnitude tolerance.
    #[arg(long)]
    delta: Option<f64>,
    /// Significance level for the KS window monitors.
    #[arg(long)]
    alpha_ks: Option<f64>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RanksArgs {
    /// Directory holding JSON report files, one report per
    /// (dataset, method) pair; arrays of reports count element-wise.
    #[arg(long)]
    reports: PathBuf,
    /// kappa (higher is better) or cost (label ratio, lower is better).
    #[arg(long, default_value = "kappa")]
    metric: Metric,
    /// Output file; a .csv extension selects CSV, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Metric {
    Kappa,
    Cost,
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kappa" => Ok(Metric::Kappa),
            "cost" => Ok(Metric::Cost),
            other => Err(Error::invalid(format!(
                "unknown metric '{other}' (expected kappa or cost)"
            ))),
        }
    }
}

/// Loads `--data`: either `synth:<spec.json>` or a CSV path. CSV headers
/// are sniffed from the first row (any non-numeric field marks a header);
/// the label is the last column.
fn load_data(data: &str) -> Result<(String, DataStream)> {
    if let Some(spec_path) = data.strip_prefix("synth:") {
        let text = std::fs::read_to_string(spec_path)?;
        let spec: SyntheticDriftSpec = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("bad synthetic spec {spec_path}: {e}")))?;
        let stream = generate_synthetic(&spec)?;
        return Ok((stem_of(Path::new(spec_path)), stream));
    }

    let path = Path::new(data);
    let has_header = sniff_header(path)?;
    let stream = load_csv(path, has_header, &LabelColumn::Last)?;
    Ok((stem_of(path), stream))
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.to_string_lossy().into_owned())
}

fn sniff_header(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    let first = text
        .lines()
        .next()
        .ok_or_else(|| Error::invalid(format!("{} is empty", path.display())))?;
    Ok(first
        .split(',')
        .any(|field| field.trim().parse::<f64>().is_err()))
}

fn build_config(
    dataset: String,
    method: MethodKind,
    window: usize,
    seed: u64,
    l_access: Option<f64>,
    l_delay: Option<usize>,
    delta: Option<f64>,
    alpha_ks: Option<f64>,
) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::new(dataset, method, window, seed);
    if let Some(v) = l_access {
        config.l_access = v;
    }
    config.l_delay = l_delay;
    if let Some(v) = delta {
        let ph = &config.ph;
        config.ph = PageHinkleyState::new(v, ph.lambda_threshold, ph.alpha, ph.min_instances)?;
    }
    if let Some(v) = alpha_ks {
        config.ks_significance = v;
    }
    config.validate()?;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (dataset, stream) = load_data(&args.data)?;
    let config = build_config(
        dataset,
        args.method,
        args.window,
        args.seed,
        args.l_access,
        args.l_delay,
        args.delta,
        args.alpha_ks,
    )?;
    let report = run_experiment(&stream, &config)?;
    emit_report(&[report], args.format, &args.out)?;
    Ok(())
}

fn cmd_grid(args: GridArgs) -> Result<()> {
    let (dataset, stream) = load_data(&args.data)?;
    let base = build_config(
        dataset,
        MethodKind::Dws,
        args.window,
        args.seed,
        None,
        None,
        args.delta,
        args.alpha_ks,
    )?;
    let output = sensitivity_grid(&stream, &base, &args.l_access, &args.l_delay)?;

    std::fs::create_dir_all(&args.out)?;
    let reports: Vec<RunReport> = output.entries.iter().map(|e| e.report.clone()).collect();
    emit_report(&reports, ReportFormat::Json, &args.out.join("reports.json"))?;
    emit_report(&reports, ReportFormat::Csv, &args.out.join("reports.csv"))?;
    for (key, table) in &output.tables {
        emit_rank_table(table, ReportFormat::Json, &args.out.join(format!("ranks_{key}.json")))?;
        emit_rank_table(table, ReportFormat::Csv, &args.out.join(format!("ranks_{key}.csv")))?;
    }
    Ok(())
}

fn cmd_ranks(args: RanksArgs) -> Result<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(&args.reports)?
        .collect::<std::io::Result<Vec<_>>>()?
        .into_iter()
        .map(|entry| entry.path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::invalid(format!(
            "no .json reports under {}",
            args.reports.display()
        )));
    }

    let mut reports: Vec<RunReport> = Vec::new();
    for file in &files {
        let text = std::fs::read_to_string(file)?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::invalid(format!("bad report file {}: {e}", file.display())))?;
        let items = match value {
            serde_json::Value::Array(items) => items,
            single => vec![single],
        };
        for item in items {
            let report: RunReport = serde_json::from_value(item)
                .map_err(|e| Error::invalid(format!("bad report in {}: {e}", file.display())))?;
            reports.push(report);
        }
    }

    // Canonical method order, restricted to the methods actually present;
    // datasets sorted by name. Both keep the table independent of
    // directory iteration order.
    let methods: Vec<String> = MethodKind::ALL
        .iter()
        .filter(|m| reports.iter().any(|r| r.method == **m))
        .map(|m| m.as_str().to_string())
        .collect();
    let mut matrix = ScoreMatrix::new(methods)?;
    let mut order: Vec<&RunReport> = reports.iter().collect();
    order.sort_by(|a, b| {
        (&a.dataset, a.method.as_str()).cmp(&(&b.dataset, b.method.as_str()))
    });
    for report in order {
        let score = match args.metric {
            Metric::Kappa => report.kappa,
            Metric::Cost => report.label_ratio,
        };
        matrix.insert(&report.dataset, report.method.as_str(), score)?;
    }
    let table = average_ranks(&matrix, args.metric == Metric::Kappa)?;

    let format = if args.out.extension().is_some_and(|e| e == "csv") {
        ReportFormat::Csv
    } else {
        ReportFormat::Json
    };
    emit_rank_table(&table, format, &args.out)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    env_logger::init();

    let result = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Grid(args) => cmd_grid(args),
        Command::Ranks(args) => cmd_ranks(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_validation() { 1 } else { 2 })
        }
    }
}
