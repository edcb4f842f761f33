//! `bootcorr` command-line tool.
//!
//! Summaries are printed as `key=value` lines; tabular output is CSV. When a
//! command writes its CSV to standard output (no `--out`), the summary moves
//! to standard error so the CSV stays machine-clean.

pub mod csvio;
pub mod error;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use bootcorr::predictor::{erf_argument, k_plus_with, prob_pd_with, MomentSource};
use bootcorr::special::normal_cdf;
use bootcorr::{
    approx_moments, average_correlation, exact_moments, is_positive_definite, occupancy_pmf,
    run_occupancy_sweep, run_pd_sweep, BootstrapBudget, DataMatrix, SimulationConfig,
    SimulationReport,
};
use clap::{Args, Parser, Subcommand};

pub use error::CliError;

/// Reference confidence argument printed next to simulation sweeps.
pub const REFERENCE_A: f64 = 1.82;

#[derive(Debug, Parser)]
#[command(name = "bootcorr", version, about = "Bootstrap-averaged correlation matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Distinct-column distribution of one bootstrap draw: exact PMF, normal
    /// model and an optional sampled CDF.
    Occupancy(OccupancyArgs),
    /// Predicted probability of positive-definiteness, or the replicate
    /// budget for a confidence level.
    Predict(PredictArgs),
    /// Average bootstrap correlation matrices of a data file.
    Regularize(RegularizeArgs),
    /// Monte Carlo sweep of the positive-definite frequency over k.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct OccupancyArgs {
    /// Number of features (columns drawn from).
    pub t: usize,
    /// Bootstrap draws for the empirical CDF; 0 skips sampling.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["k", "alpha"])))]
pub struct PredictArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    /// Number of replicates (may be fractional).
    #[arg(long)]
    pub k: Option<f64>,
    /// Tolerated probability of a singular average.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Use the large-t moment approximations instead of the exact moments.
    #[arg(long)]
    pub approx_moments: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("count").required(true).args(["k", "auto_k"])))]
pub struct RegularizeArgs {
    /// Data CSV: one object per row, one feature per column.
    pub input: PathBuf,
    #[arg(long)]
    pub k: Option<usize>,
    /// Choose k as min(ceil(k⁺), n) for the given --alpha.
    #[arg(long)]
    pub auto_k: bool,
    #[arg(long, default_value_t = 0.01, requires = "auto_k")]
    pub alpha: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Input rows are features and columns are objects.
    #[arg(long)]
    pub transpose: bool,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long, default_value_t = 1)]
    pub k_min: usize,
    #[arg(long)]
    pub k_max: usize,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

/// Where the summary goes and the CSV goes.
pub struct Streams<'a> {
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

pub fn run(cli: Cli, streams: Streams<'_>) -> Result<(), CliError> {
    match cli.command {
        Command::Occupancy(args) => cmd_occupancy(&args, streams),
        Command::Predict(args) => cmd_predict(&args, streams.stdout),
        Command::Regularize(args) => cmd_regularize(&args, streams.stdout),
        Command::Simulate(args) => cmd_simulate(&args, streams).map(|_| ()),
    }
}

fn with_threads<T: Send>(
    threads: usize,
    f: impl FnOnce() -> Result<T, CliError> + Send,
) -> Result<T, CliError> {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Domain(format!("cannot start {threads} threads: {e}")))?
        .install(f)
}

/// Opens `path` for writing, or hands back standard output.
fn with_sink<T>(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    write: impl FnOnce(&mut dyn Write) -> csv::Result<T>,
) -> Result<T, CliError> {
    let to_io = |label: &str, e: csv::Error| {
        let source = match e.into_kind() {
            csv::ErrorKind::Io(io) => io,
            other => std::io::Error::other(format!("{other:?}")),
        };
        CliError::Io {
            path: label.to_string(),
            source,
        }
    };
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut w = BufWriter::new(file);
            let value = write(&mut w).map_err(|e| to_io(&p.display().to_string(), e))?;
            w.flush().map_err(|e| CliError::io(p, e))?;
            Ok(value)
        }
        None => write(stdout).map_err(|e| to_io("<stdout>", e)),
    }
}

pub fn cmd_occupancy(args: &OccupancyArgs, streams: Streams<'_>) -> Result<(), CliError> {
    if args.t < 2 {
        return Err(CliError::Domain(format!(
            "occupancy needs t >= 2 (the normal model is degenerate at t = {})",
            args.t
        )));
    }
    let dist = occupancy_pmf(args.t)?;
    let (mean, var) = exact_moments(args.t)?;
    let (amean, avar) = approx_moments(args.t);
    let sd = var.sqrt();
    let sweep = if args.samples > 0 {
        Some(run_occupancy_sweep(args.t, args.samples, args.seed)?)
    } else {
        None
    };

    with_sink(args.out.as_deref(), streams.stdout, |w| {
        let mut wtr = csv::Writer::from_writer(w);
        let mut head = vec!["u", "exact_pmf", "normal_cdf"];
        if sweep.is_some() {
            head.push("empirical_cdf");
        }
        wtr.write_record(&head)?;
        for u in 1..=args.t {
            let mut rec = vec![
                u.to_string(),
                dist.prob(u).to_string(),
                normal_cdf(u as f64, mean, sd).to_string(),
            ];
            if let Some(s) = &sweep {
                rec.push(s.ecdf[u - 1].to_string());
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    })?;

    let summary: &mut dyn Write = if args.out.is_some() { streams.stdout } else { streams.stderr };
    let mut lines = vec![
        format!("t={}", args.t),
        format!("exact_mean={mean}"),
        format!("exact_variance={var}"),
        format!("approx_mean={amean}"),
        format!("approx_variance={avar}"),
        format!("samples={}", args.samples),
        format!("seed={}", args.seed),
    ];
    if let Some(s) = &sweep {
        lines.push(format!("ks_distance={}", s.ks_distance));
        lines.push(format!("ks_distance_continuity_corrected={}", s.ks_distance_corrected));
    }
    for l in lines {
        writeln!(summary, "{l}").map_err(out_err)?;
    }
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if args.n == 0 {
        return Err(CliError::Domain("predict needs n >= 1".into()));
    }
    if args.t < 2 {
        return Err(CliError::Domain("predict needs t >= 2".into()));
    }
    let moments = if args.approx_moments {
        MomentSource::Approximate
    } else {
        MomentSource::Exact
    };
    let mut lines = vec![format!("n={}", args.n), format!("t={}", args.t)];
    match (args.k, args.alpha) {
        (Some(k), None) => {
            lines.push(format!("k={k}"));
            lines.push(format!("erf_argument={}", erf_argument(args.n, args.t, k, moments)?));
            lines.push(format!("probability={}", prob_pd_with(args.n, args.t, k, moments)?));
        }
        (None, Some(alpha)) => {
            let mut budget = BootstrapBudget::from_alpha(args.n, args.t, alpha)?;
            budget.k_plus = k_plus_with(args.n, args.t, budget.a, moments)?;
            lines.push(format!("alpha={alpha}"));
            lines.push(format!("a={}", budget.a));
            lines.push(format!("k_plus={}", budget.k_plus));
            lines.push(format!("k_plus_ceil={}", budget.k_plus.ceil()));
            lines.push(format!("k_star={}", budget.k_star));
            lines.push(format!("k_limit={}", budget.k_limit));
            lines.push(format!("k_upper={}", budget.k_upper));
            lines.push(format!("recommended_k={}", budget.recommended()));
        }
        _ => return Err(CliError::Domain("give exactly one of --k and --alpha".into())),
    }
    for l in lines {
        writeln!(out, "{l}").map_err(out_err)?;
    }
    Ok(())
}

/// Loads the data file in object-per-row orientation.
pub fn load_data(path: &Path, transpose: bool) -> Result<DataMatrix, CliError> {
    let file = csvio::read_matrix(path)?;
    let (values, labels) = if transpose {
        (file.values.transpose(), file.column_labels())
    } else {
        let labels = file.row_labels.clone();
        (file.values, labels)
    };
    let data = DataMatrix::new(values)?;
    Ok(match labels {
        Some(l) => data.with_labels(l)?,
        None => data,
    })
}

pub fn cmd_regularize(args: &RegularizeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let data = load_data(&args.input, args.transpose)?;
    let (n, t) = (data.n(), data.t());
    let k = if args.auto_k {
        BootstrapBudget::from_alpha(n, t, args.alpha)?.recommended()
    } else {
        match args.k {
            Some(0) | None => return Err(CliError::Domain("--k must be at least 1".into())),
            Some(k) => k,
        }
    };
    let avg = with_threads(args.threads, || Ok(average_correlation(&data, k, args.seed)?))?;
    let (pd, smallest) = is_positive_definite(&avg.matrix)?;

    with_sink(Some(&args.out), out, |w| {
        csvio::write_matrix(w, avg.matrix.values(), data.labels())
    })?;

    for l in [
        format!("n={n}"),
        format!("t={t}"),
        format!("k={k}"),
        format!("seed={}", args.seed),
        format!("smallest_eigenvalue={smallest}"),
        format!("positive_definite={pd}"),
        format!("redraws={}", avg.redraws),
    ] {
        writeln!(out, "{l}").map_err(out_err)?;
    }
    if pd {
        Ok(())
    } else {
        Err(CliError::NotPositiveDefinite { smallest })
    }
}

/// Writes the sweep table.
pub fn write_report<W: Write>(out: W, report: &SimulationReport) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["k", "empirical_pd_frequency", "predicted_prob", "mean_lambda0", "redraws"])?;
    for r in &report.per_k {
        wtr.write_record([
            r.k.to_string(),
            r.empirical_pd_frequency.to_string(),
            r.predicted.to_string(),
            r.mean_lambda0.to_string(),
            r.redraws.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs, streams: Streams<'_>) -> Result<SimulationReport, CliError> {
    let config = SimulationConfig::k_range(args.n, args.t, args.k_min, args.k_max, args.trials, args.seed)?;
    let budget = BootstrapBudget::new(args.n, args.t, REFERENCE_A)?;
    let report = with_threads(args.threads, || Ok(run_pd_sweep(&config)?))?;

    with_sink(args.out.as_deref(), streams.stdout, |w| write_report(w, &report))?;

    let summary: &mut dyn Write = if args.out.is_some() { streams.stdout } else { streams.stderr };
    let crossing = report
        .empirical_crossing(0.5)
        .map_or_else(|| "none".to_string(), |c| c.to_string());
    for l in [
        format!("n={}", args.n),
        format!("t={}", args.t),
        format!("trials={}", args.trials),
        format!("seed={}", args.seed),
        format!("a={REFERENCE_A}"),
        format!("k_plus={}", budget.k_plus),
        format!("k_star={}", budget.k_star),
        format!("k_limit={}", budget.k_limit),
        format!("max_abs_deviation={}", report.max_abs_deviation()),
        format!("empirical_crossing={crossing}"),
    ] {
        writeln!(summary, "{l}").map_err(out_err)?;
    }
    writeln!(streams.stderr, "elapsed_seconds={:.3}", report.elapsed.as_secs_f64()).map_err(out_err)?;
    Ok(report)
}
