use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use coupon_limits::experiments::calibration::{run_pilot, PILOT_N, PILOT_REPLICATIONS, PILOT_SEED};
use coupon_limits::experiments::report::write_csv;
use coupon_limits::experiments::{
    battery_configs, default_workers, emit_report, read_json, run_all, ConfigFile, ExperimentKind,
    Format, Interval, Overrides, RunReport, Verdict, WORKERS_ENV,
};
use coupon_limits::{run_coupled, run_discrete, SeedSpec};

/// Coupon collector and Dixie cup simulations checked against their
/// point-process limits.
#[derive(Parser)]
#[command(name = "coupon-limits", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write raw arrival matrices of seeded replications as CSV.
    Simulate(SimulateArgs),
    /// Run experiments from a config file and/or flags.
    Verify(VerifyArgs),
    /// Run the full acceptance battery.
    Battery(BatteryArgs),
    /// Re-render a persisted JSON report.
    Report(ReportArgs),
    /// Measure the KS distances used as calibrated tolerances.
    Calibrate(CalibrateArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    n: usize,
    /// Largest multiplicity recorded.
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long, default_value_t = 1)]
    reps: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also record poissonized arrival times.
    #[arg(long)]
    poissonized: bool,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
    /// Record wall-clock time per experiment (breaks byte-identical reruns).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// TOML file with `[[experiment]]` tables.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    kind: Option<ExperimentKind>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    r: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    c: Option<Vec<u32>>,
    #[arg(long, value_delimiter = ',')]
    m: Option<Vec<u32>>,
    /// Intervals as `lo:hi`, comma separated; `lo:` is unbounded above.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    intervals: Option<Vec<Interval>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    thresholds: Option<Vec<f64>>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sig: Option<f64>,
    #[arg(long)]
    trial_size: Option<usize>,
    #[arg(long)]
    epsilon_exponent: Option<f64>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct BatteryArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON report written by `verify` or `battery`.
    input: PathBuf,
    /// Re-emit to this path; prints a summary only if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct CalibrateArgs {
    #[arg(long, default_value_t = PILOT_N)]
    n: usize,
    #[arg(long, default_value_t = PILOT_REPLICATIONS)]
    reps: u64,
    #[arg(long, default_value_t = PILOT_SEED)]
    seed: u64,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

enum Outcome {
    Pass,
    Fail,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Battery(a) => battery(a),
        Command::Report(a) => report(a),
        Command::Calibrate(a) => calibrate(a),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn warn_small_n(ns: &[usize]) {
    if ns.iter().any(|&n| n < 3) {
        eprintln!("warning: n < 3 gives ln ln n <= 0; the normalization is defined but far from its regime");
    }
}

fn simulate(a: SimulateArgs) -> Result<Outcome> {
    warn_small_n(&[a.n]);
    let out: Box<dyn Write> = match &a.out {
        Some(p) => {
            Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?)
        }
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["replication", "type", "r", "arrival"];
    if a.poissonized {
        header.push("time");
    }
    w.write_record(&header)?;
    for j in 0..a.reps {
        let seed = SeedSpec::new(a.seed, j);
        let coupled = if a.poissonized {
            Some(run_coupled(a.n, a.r, seed)?)
        } else {
            None
        };
        let discrete = match &coupled {
            Some(c) => c.discrete().clone(),
            None => run_discrete(a.n, a.r, seed)?,
        };
        for i in 0..a.n {
            for r in 1..=a.r {
                let mut row = vec![j.to_string(), (i + 1).to_string(), r.to_string()];
                row.push(discrete.arrival(i, r).to_string());
                if let Some(c) = &coupled {
                    row.push(c.time(i, r).to_string());
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(Outcome::Pass)
}

fn overrides(a: &VerifyArgs) -> Overrides {
    Overrides {
        kind: a.kind,
        n_grid: a.n.clone(),
        r: a.r.clone(),
        c: a.c.clone(),
        m: a.m.clone(),
        intervals: a.intervals.clone(),
        thresholds: a.thresholds.clone(),
        replications: a.reps,
        master_seed: a.seed,
        significance: a.sig,
        trial_size: a.trial_size,
        epsilon_exponent: a.epsilon_exponent,
        workers: a.workers,
    }
}

fn verify(a: VerifyArgs) -> Result<Outcome> {
    let o = overrides(&a);
    let configs = match &a.config {
        Some(path) => {
            let mut file =
                ConfigFile::load(path).with_context(|| format!("loading {}", path.display()))?;
            for cfg in &mut file.experiments {
                o.apply(cfg);
                cfg.validate()?;
            }
            file.experiments
        }
        None => vec![o.to_config()?],
    };
    for cfg in &configs {
        warn_small_n(&cfg.n_grid);
    }
    let seed = configs[0].master_seed;
    let report = run_all(&configs, seed, a.output.timings)?;
    finish(&report, &a.output)
}

fn battery(a: BatteryArgs) -> Result<Outcome> {
    let workers = a.workers.unwrap_or_else(default_workers);
    let mut configs = battery_configs(a.seed);
    for c in &mut configs {
        c.workers = Some(workers);
    }
    let report = run_all(&configs, a.seed, a.output.timings)?;
    finish(&report, &a.output)
}

fn report(a: ReportArgs) -> Result<Outcome> {
    let report = read_json(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    match &a.out {
        Some(path) => emit(&report, a.format, path)?,
        None if a.format == Format::Csv => write_csv(&report, io::stdout().lock())?,
        None => println!("{}", report.to_json()?),
    }
    print_summary(&report);
    Ok(outcome(&report))
}

fn calibrate(a: CalibrateArgs) -> Result<Outcome> {
    let workers = a.workers.unwrap_or_else(default_workers);
    let pilot = run_pilot(a.n, a.reps, a.seed, workers)?;
    println!(
        "// pilot: n = {}, replications = {}, seed = {:#x}",
        pilot.n, pilot.replications, pilot.master_seed
    );
    print!("{}", pilot.to_rust());
    Ok(Outcome::Pass)
}

fn emit(report: &RunReport, format: Format, path: &Path) -> Result<()> {
    emit_report(report, format, path).with_context(|| format!("writing {}", path.display()))
}

fn finish(report: &RunReport, out: &OutputArgs) -> Result<Outcome> {
    match &out.out {
        Some(path) => emit(report, out.format, path)?,
        None if out.format == Format::Csv => write_csv(report, io::stdout().lock())?,
        None => println!("{}", report.to_json()?),
    }
    print_summary(report);
    Ok(outcome(report))
}

fn outcome(report: &RunReport) -> Outcome {
    if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn print_summary(report: &RunReport) {
    let mut err = io::stderr().lock();
    for exp in &report.experiments {
        let gated = exp
            .entries
            .iter()
            .filter(|e| e.verdict != Verdict::Info)
            .count();
        let failed = exp.failures().count();
        let _ = writeln!(
            err,
            "{:<24} {:>3} checks, {:>3} failed, {} draws{}",
            exp.name,
            gated,
            failed,
            exp.telemetry.total_draws,
            exp.wall_clock_ms
                .map(|t| format!(", {t} ms"))
                .unwrap_or_default()
        );
        for e in exp.failures() {
            let coords: Vec<String> = [
                ("n", e.n.map(|v| v as u64)),
                ("r", e.r.map(u64::from)),
                ("c", e.c.map(u64::from)),
                ("m", e.m.map(u64::from)),
            ]
            .iter()
            .filter_map(|(k, v)| v.map(|v| format!("{k}={v}")))
            .collect();
            let p = e.p_value.map(|p| format!(" p={p:.3e}")).unwrap_or_default();
            let _ = writeln!(
                err,
                "    FAIL {} [{}] value={:.6}{p} rule={:?}",
                e.statistic_name,
                coords.join(" "),
                e.value,
                e.rule
            );
        }
    }
    let _ = writeln!(
        err,
        "{}",
        if report.passed() {
            "all verdicts pass"
        } else {
            "statistical failures present"
        }
    );
}
