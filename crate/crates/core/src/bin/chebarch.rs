use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use chebarch::adc::{build_timeline, power_report, split_samples};
use chebarch::bench::{build_interpolant, measure_error, min_points_for_error, ErrorReport, MinPoints, Scheme};
use chebarch::config::{resolve_output, ExperimentConfig, OutputFormat};
use chebarch::repro::{run_all, Tolerances};
use chebarch::systolic::{analytic_metrics, compute_metrics, simulate_window, Architecture, SystolicConfig};
use chebarch::{cheb_nodes, compute_coeffs, Error, Interval, SignalSpec};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;

/// Errors below this are rounding noise; a ratio against them is meaningless.
const ZERO_ERROR_PERCENT: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "chebarch", version, about = "Chebyshev interpolation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Chebyshev window of a given degree as JSON.
    Nodes {
        #[arg(long)]
        degree: usize,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
    },
    /// Print the expansion coefficients of a signal as JSON.
    Coeffs {
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Interpolation error of both schemes across a sweep of point counts.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Also write interpolant curves at the configured point count.
        #[arg(long)]
        curves: Option<PathBuf>,
    },
    /// Run the word-serial datapath on one window and report its metrics.
    Systolic {
        #[command(flatten)]
        common: Common,
        /// proposed, zhu_time or zhu_transform.
        #[arg(long, default_value = "proposed")]
        arch: String,
        /// Comma-separated query points; defaults to one per sample, evenly spaced.
        #[arg(long, allow_hyphen_values = true)]
        queries: Option<String>,
        /// Write the per-cycle trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write `query_x,value` pairs as CSV.
        #[arg(long)]
        outputs: Option<PathBuf>,
    },
    /// Hybrid ADC split and comparator power for one window.
    Power {
        #[command(flatten)]
        common: Common,
        /// Chebyshev window degree (window of degree + 1 samples).
        #[arg(long, default_value_t = 7)]
        degree: usize,
        /// Derive the baseline point count from the equispaced error search.
        #[arg(long)]
        measure_baseline: bool,
    },
    /// Run every acceptance check and print a pass/fail table.
    Repro {
        #[arg(long)]
        json: bool,
        /// Override a threshold, e.g. `--set ratio_max=4`.
        #[arg(long = "set", value_name = "NAME=VALUE")]
        overrides: Vec<String>,
    },
}

/// Options shared by the experiment subcommands. Each maps onto a config key
/// and overrides the value from `--config`.
#[derive(Args, Default)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// harmonic, damped, const:V, poly:c0,c1,..., sines:a@w,..., damped:d@w
    #[arg(long)]
    signal: Option<String>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    interval: Option<Vec<f64>>,
    /// Point count (window size for the datapath).
    #[arg(long = "n")]
    n_points: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    /// Comma-separated list of chebyshev, equispaced.
    #[arg(long)]
    schemes: Option<String>,
    /// Error target in percent.
    #[arg(long = "target")]
    error_target_percent: Option<String>,
    #[arg(long)]
    grid_density: Option<String>,
    #[arg(long)]
    bits: Option<String>,
    #[arg(long)]
    t_sar: Option<String>,
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    baseline_points: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Output file; relative paths go under $CHEBARCH_OUT_DIR when set.
    #[arg(long)]
    output: Option<String>,
    /// Worker threads for independent sweep points.
    #[arg(long)]
    jobs: Option<String>,
}

impl Common {
    fn overrides(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        let mut put = |key: &str, value: &Option<String>| {
            if let Some(v) = value {
                map.insert(key.to_string(), v.clone());
            }
        };
        put("signal", &self.signal);
        put("n_points", &self.n_points);
        put("n_min", &self.n_min);
        put("n_max", &self.n_max);
        put("schemes", &self.schemes);
        put("error_target_percent", &self.error_target_percent);
        put("grid_density", &self.grid_density);
        put("bits", &self.bits);
        put("t_sar", &self.t_sar);
        put("policy", &self.policy);
        put("baseline_points", &self.baseline_points);
        put("format", &self.format);
        put("output", &self.output);
        put("jobs", &self.jobs);
        if let Some(iv) = &self.interval {
            map.insert("interval".into(), format!("{} {}", iv[0], iv[1]));
        }
        map
    }

    fn load(&self) -> Result<ExperimentConfig, Error> {
        ExperimentConfig::load(self.config.as_deref(), &self.overrides())
    }
}

/// Writes to the configured file, or stdout.
fn emit(output: Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match output {
        Some(path) => write_file(&path, body),
        None => std::io::stdout().write_all(body.as_bytes()),
    }
}

fn write_file(path: &Path, body: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, body)
}

enum Failure {
    Invalid(String),
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_nodes(degree: usize, interval: Option<Vec<f64>>) -> Result<(), Failure> {
    let interval = match interval {
        Some(iv) => Interval::new(iv[0], iv[1])?,
        None => Interval::UNIT,
    };
    emit(None, &to_json(&cheb_nodes(degree, interval)))?;
    Ok(())
}

fn cmd_coeffs(degree: usize, common: &Common) -> Result<(), Failure> {
    let cfg = common.load()?;
    let window = cheb_nodes(degree, cfg.interval);
    let coeffs = compute_coeffs(&window.sample(|x| cfg.signal.eval(x)), &window)?;
    emit(cfg.resolved_output(), &to_json(&coeffs))?;
    Ok(())
}

fn cmd_compare(common: &Common, curves: Option<PathBuf>) -> Result<(), Failure> {
    let cfg = common.load()?;
    let points: Vec<(Scheme, usize)> = cfg
        .schemes
        .iter()
        .flat_map(|&s| (cfg.n_min..=cfg.n_max).map(move |n| (s, n)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Invalid(e.to_string()))?;
    let reports: Vec<ErrorReport> = pool.install(|| {
        points
            .par_iter()
            .map(|&(scheme, n)| measure_error(&cfg.signal, scheme, n, cfg.interval, cfg.grid_density))
            .collect::<Result<_, _>>()
    })?;

    let body = match cfg.format {
        OutputFormat::Csv => {
            let mut s = String::from(ErrorReport::CSV_HEADER);
            s.push('\n');
            for r in &reports {
                s.push_str(&r.csv_row(&cfg.signal));
                s.push('\n');
            }
            s
        }
        OutputFormat::Json => {
            let rows: Vec<_> = reports
                .iter()
                .map(|r| json!({"signal": cfg.signal.label(), "report": r}))
                .collect();
            to_json(&rows)
        }
    };
    emit(cfg.resolved_output(), &body)?;

    let at = |scheme| measure_error(&cfg.signal, scheme, cfg.n_points, cfg.interval, cfg.grid_density);
    let cheb = at(Scheme::Chebyshev)?.relative_error_percent;
    let equi = at(Scheme::Equispaced)?.relative_error_percent;
    if cheb > ZERO_ERROR_PERCENT {
        eprintln!(
            "ratio equispaced/chebyshev at n={}: {:.4} ({:.4}% vs {:.4}%)",
            cfg.n_points,
            equi / cheb,
            equi,
            cheb
        );
    } else {
        eprintln!("ratio equispaced/chebyshev at n={}: undefined (chebyshev error is zero)", cfg.n_points);
    }

    let mut unreachable = false;
    if let Some(target) = cfg.error_target_percent {
        for &scheme in &cfg.schemes {
            let found = min_points_for_error(&cfg.signal, scheme, target, cfg.interval, cfg.n_max)?;
            unreachable |= matches!(found, MinPoints::NotReached { .. });
            eprintln!("min points for error < {target}% ({scheme}): {found}");
        }
    }

    if let Some(path) = curves {
        let interps = cfg
            .schemes
            .iter()
            .map(|&s| build_interpolant(&cfg.signal, s, cfg.n_points, cfg.interval))
            .collect::<Result<Vec<_>, _>>()?;
        let mut s = String::from("x,signal");
        for scheme in &cfg.schemes {
            s.push_str(&format!(",{scheme}"));
        }
        s.push('\n');
        for x in cfg.interval.linspace(cfg.grid_density) {
            s.push_str(&format!("{x},{}", cfg.signal.eval(x)));
            for f in &interps {
                s.push_str(&format!(",{}", f(x)));
            }
            s.push('\n');
        }
        write_file(&resolve_output(&path), &s)?;
    }

    if unreachable {
        return Err(Failure::Failed("error target not reached within n_max".into()));
    }
    Ok(())
}

fn parse_queries(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Failure::Invalid(format!("invalid value for `queries`: `{s}`")))
        })
        .collect()
}

fn cmd_systolic(
    common: &Common,
    arch: &str,
    queries: Option<String>,
    trace_path: Option<PathBuf>,
    outputs_path: Option<PathBuf>,
) -> Result<(), Failure> {
    let cfg = common.load()?;
    let arch: Architecture = arch.parse()?;
    let window_size = cfg.n_points;
    if arch != Architecture::Proposed {
        emit(cfg.resolved_output(), &to_json(&analytic_metrics(arch, window_size)?))?;
        return Ok(());
    }
    let config = SystolicConfig::proposed(window_size).with_interval(cfg.interval);
    let window = cheb_nodes(window_size - 1, cfg.interval);
    let samples = window.sample(|x| cfg.signal.eval(x));
    let queries = match queries {
        Some(q) => parse_queries(&q)?,
        None => cfg.interval.linspace(window_size),
    };
    let trace = simulate_window(&samples, &queries, &config)?;
    if let Some(path) = trace_path {
        write_file(&resolve_output(&path), &trace.to_csv())?;
    }
    if let Some(path) = outputs_path {
        let mut s = String::from("query_x,value\n");
        for (x, v) in trace.output_values() {
            s.push_str(&format!("{x},{v}\n"));
        }
        write_file(&resolve_output(&path), &s)?;
    }
    emit(cfg.resolved_output(), &to_json(&compute_metrics(&trace, &config)))?;
    Ok(())
}

/// Reference flash-only point counts and error targets for the preset signals.
fn reference_baseline(signal: &SignalSpec) -> Option<(usize, f64)> {
    if *signal == SignalSpec::harmonic() {
        Some((10, 1.1))
    } else if *signal == SignalSpec::damped() {
        Some((11, 4.1))
    } else {
        None
    }
}

fn cmd_power(common: &Common, degree: usize, measure_baseline: bool) -> Result<(), Failure> {
    let cfg = common.load()?;
    let reference = reference_baseline(&cfg.signal);
    let (baseline_points, source) = if let Some(p) = cfg.baseline_points {
        (p, "explicit")
    } else if measure_baseline {
        let target = cfg
            .error_target_percent
            .or(reference.map(|r| r.1))
            .ok_or_else(|| Failure::Invalid("invalid value for `error_target_percent`: required to measure the baseline".into()))?;
        match min_points_for_error(&cfg.signal, Scheme::Equispaced, target, cfg.interval, cfg.n_max)? {
            MinPoints::Reached { n_points } => (n_points, "measured"),
            not => return Err(Failure::Failed(format!("equispaced baseline: {not}"))),
        }
    } else {
        match reference {
            Some((p, _)) => (p, "reference"),
            None => {
                return Err(Failure::Invalid(
                    "invalid value for `baseline_points`: required for signals without a reference count".into(),
                ))
            }
        }
    };
    let timeline = build_timeline(degree)?;
    let split = split_samples(&timeline, cfg.t_sar, cfg.policy)?;
    let report = power_report(&split, cfg.bits, baseline_points)?;
    let body = json!({
        "signal": cfg.signal.label(),
        "policy": split.policy,
        "t_sar": split.t_sar,
        "assignments": split.assignments,
        "a_flash": split.a_flash,
        "a_sar": split.a_sar,
        "bits": report.bits,
        "flash_comparisons_per_sample": report.flash_comparisons_per_sample,
        "sar_comparisons_per_sample": report.sar_comparisons_per_sample,
        "total_au": report.total_au,
        "baseline_points": baseline_points,
        "baseline_source": source,
        "baseline_au": report.baseline_au,
        "savings_percent": report.savings_percent,
    });
    emit(cfg.resolved_output(), &to_json(&body))?;
    Ok(())
}

fn cmd_repro(json_out: bool, overrides: &[String]) -> Result<(), Failure> {
    let mut tol = Tolerances::default();
    for item in overrides {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Invalid(format!("expected NAME=VALUE, got `{item}`")))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Invalid(format!("invalid value for `{name}`: `{value}`")))?;
        tol.set(name.trim(), value)?;
    }
    let results = run_all(&tol);
    let passed = results.iter().all(|r| r.passed);
    if json_out {
        emit(None, &to_json(&json!({"passed": passed, "criteria": results})))?;
    } else {
        let mut s = String::new();
        for r in &results {
            s.push_str(&r.line());
            s.push('\n');
        }
        let n_pass = results.iter().filter(|r| r.passed).count();
        s.push_str(&format!("{n_pass}/{} criteria passed\n", results.len()));
        emit(None, &s)?;
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::Failed("acceptance criteria failed".into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Nodes { degree, interval } => cmd_nodes(degree, interval),
        Command::Coeffs { degree, common } => cmd_coeffs(degree, &common),
        Command::Compare { common, curves } => cmd_compare(&common, curves),
        Command::Systolic {
            common,
            arch,
            queries,
            trace,
            outputs,
        } => cmd_systolic(&common, &arch, queries, trace, outputs),
        Command::Power {
            common,
            degree,
            measure_baseline,
        } => cmd_power(&common, degree, measure_baseline),
        Command::Repro { json, overrides } => cmd_repro(json, &overrides),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("failed: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
