use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tradesim::harness::{
    build_family, emit, run_trials, scaling_experiment, run_experiment, ExperimentConfig, Format, HorizonSummary,
    InstanceSpec, RegretReport, TrialResult,
};
use tradesim::instances::{verify_family, FamilyKind};
use tradesim::mechanisms::MechanismSpec;
use tradesim::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "trade-sim", version, about = "Repeated bilateral trade simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run trials at a single horizon and write a regret report.
    Run {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        mechanism: String,
        #[arg(long = "T", value_parser = parse_horizon)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
        /// Keep per-round logs (embedded in JSON, or written to `<out>.rounds.csv`).
        #[arg(long)]
        log_rounds: bool,
    },
    /// Run several horizons and fit ln(regret) against ln(T).
    Scale {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        mechanism: String,
        #[arg(long = "T-list", value_delimiter = ',', value_parser = parse_horizon, required = true)]
        horizons: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "csv")]
        format: String,
    },
    /// Numerically check the claims attached to a hard-instance family.
    VerifyInstance {
        #[arg(long)]
        family: String,
        #[arg(long = "T", value_parser = parse_horizon)]
        horizon: u64,
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Also write the report as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Count trials whose realized profit went negative.
    AuditGbb {
        #[arg(long)]
        instance: String,
        #[arg(long)]
        mechanism: String,
        #[arg(long = "T", value_parser = parse_horizon)]
        horizon: u64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Integer horizons, also written as `1e6`.
fn parse_horizon(s: &str) -> std::result::Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(f) if f >= 1.0 && f.fract() == 0.0 && f < 1.8e19 => Ok(f as u64),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

enum Outcome {
    Ok,
    Failed,
}

fn config(instance: &str, mechanism: &str, horizons: Vec<u64>, trials: usize, seed: u64) -> Result<ExperimentConfig> {
    let instance: InstanceSpec = instance.parse()?;
    let mechanism: MechanismSpec = mechanism.parse()?;
    let cfg = ExperimentConfig::new(instance, mechanism, horizons, trials, seed);
    cfg.validate()?;
    Ok(cfg)
}

fn print_rows(report: &RegretReport) {
    for r in &report.rows {
        println!(
            "T={} trials={} mean_regret={:.3} se={:.3} min_profit={:.6} gbb_violations={}",
            r.horizon, r.trials, r.mean_regret, r.se_regret, r.min_profit, r.gbb_violations
        );
    }
    if let Some(f) = &report.fit {
        println!("slope={:.4} (se {:.4}) intercept={:.4}", f.slope, f.slope_se, f.intercept);
    }
}

fn write_round_logs(path: &Path, trials: &[TrialResult]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["trial", "t", "p", "q", "phase", "s", "b", "traded"])?;
    for (i, trial) in trials.iter().enumerate() {
        for (t, r) in trial.rounds.iter().flatten().enumerate() {
            w.write_record([
                i.to_string(),
                t.to_string(),
                r.p.to_string(),
                r.q.to_string(),
                r.phase.to_string(),
                r.s.to_string(),
                r.b.to_string(),
                (r.traded as u8).to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn run(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Run { instance, mechanism, horizon, trials, seed, out, format, log_rounds } => {
            let format: Format = format.parse()?;
            let mut cfg = config(&instance, &mechanism, vec![horizon], trials, seed)?;
            cfg.log_rounds = log_rounds;
            let report = if log_rounds {
                let all = run_trials(&cfg)?;
                let rows = all.iter().map(|t| HorizonSummary::from_trials(t)).collect();
                if format == Format::Csv {
                    let mut p = out.clone().into_os_string();
                    p.push(".rounds.csv");
                    write_round_logs(Path::new(&p), &all[0])?;
                }
                RegretReport {
                    family: cfg.instance.to_string(),
                    mechanism: cfg.mechanism.to_string(),
                    rows,
                    fit: None,
                    trials: (format == Format::Json).then_some(all),
                }
            } else {
                run_experiment(&cfg)?
            };
            emit(&report, &out, format)?;
            print_rows(&report);
            Ok(Outcome::Ok)
        }
        Command::Scale { instance, mechanism, horizons, trials, seed, out, format } => {
            let format: Format = format.parse()?;
            let cfg = config(&instance, &mechanism, horizons, trials, seed)?;
            let report = scaling_experiment(&cfg)?;
            emit(&report, &out, format)?;
            print_rows(&report);
            if report.fit.is_none() {
                log::warn!("fewer than 3 horizons with positive regret; no fit");
            }
            Ok(Outcome::Ok)
        }
        Command::VerifyInstance { family, horizon, grid, json } => {
            let kind: FamilyKind = family.parse()?;
            if grid < 2 {
                return Err(Error::Config("grid must be at least 2".into()));
            }
            let fam = build_family(kind, horizon)?;
            let report = verify_family(&fam, grid)?;
            print!("{report}");
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
            }
            Ok(if report.passed() { Outcome::Ok } else { Outcome::Failed })
        }
        Command::AuditGbb { instance, mechanism, horizon, trials, seed } => {
            let cfg = config(&instance, &mechanism, vec![horizon], trials, seed)?;
            let all = run_trials(&cfg)?;
            let trials = &all[0];
            let mut violations = 0;
            for (i, t) in trials.iter().enumerate() {
                if !t.gbb_ok {
                    violations += 1;
                    println!("trial {i} seed={} total_profit={}", t.seed, t.total_profit);
                }
            }
            let min_profit = trials.iter().map(|t| t.total_profit).fold(f64::INFINITY, f64::min);
            let gpb = trials.iter().map(|t| t.gpb_sum).sum::<f64>() / trials.len() as f64;
            println!(
                "{} {}/{} trials budget balanced, min_profit={min_profit:.6}, gpb_mean={gpb:.6}",
                if violations == 0 { "PASS" } else { "FAIL" },
                trials.len() - violations,
                trials.len()
            );
            Ok(if violations == 0 { Outcome::Ok } else { Outcome::Failed })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::Domain(_) => 3,
                Error::Verification(_) => 2,
                _ => 1,
            })
        }
    }
}
