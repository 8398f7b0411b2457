use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use tunable_oracle::experiment::{emit_outputs, run_experiment, summarize, toy_problem, ExperimentConfig};
use tunable_oracle::schedule::io::{read_coefficients_file, write_schedule_file};
use tunable_oracle::schedule::{kkt_report, reference_budget, solve_accuracy, solve_work};
use tunable_oracle::{CostKind, ScheduleProblem, WorkProblem};

#[derive(Parser)]
#[command(name = "tunable-oracle", version, about = "Optimal inexactness schedules for inexact first-order methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an allocation problem from a `k,a,b` coefficient file.
    Schedule {
        #[arg(long)]
        coeffs: PathBuf,
        /// `power:R`, `log` or `logsq`.
        #[arg(long)]
        cost: CostKind,
        #[arg(long = "delta-ref")]
        delta_ref: Option<f64>,
        #[arg(long = "m", default_value_t = 0.0)]
        m: f64,
        #[arg(long = "M", default_value_t = f64::INFINITY)]
        big_m: f64,
        /// Solve the work-controlled problem instead.
        #[arg(long)]
        work: bool,
        #[arg(long)]
        budget: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        wmin: f64,
        #[arg(long, default_value_t = f64::INFINITY)]
        wmax: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a benchmark experiment and write its CSV outputs.
    Experiment {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        id: u8,
        /// `key = value` overrides of the experiment defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seeds: Option<Vec<u64>>,
    },
    /// Solve and print the 80-iteration toy instance.
    Toy,
}

fn schedule_cmd(cmd: Command) -> Result<()> {
    let Command::Schedule { coeffs, cost, delta_ref, m, big_m, work, budget, wmin, wmax, out } = cmd else {
        unreachable!()
    };
    let (a, b) = read_coefficients_file(&coeffs).with_context(|| format!("reading {}", coeffs.display()))?;
    let (schedule, cert) = if work {
        let Some(r) = cost.exponent() else {
            bail!("the work problem needs a power or log cost, got {cost}");
        };
        let Some(budget) = budget else { bail!("--work needs --budget") };
        solve_work(&WorkProblem::new(a, b, budget, wmin, wmax, r)?)?
    } else {
        let Some(delta_ref) = delta_ref else { bail!("--delta-ref is required") };
        let p = ScheduleProblem::new(a, b, cost, delta_ref, m, big_m)?;
        let (s, cert) = solve_accuracy(&p)?;
        let kkt = kkt_report(&p, &s, &cert)?;
        eprintln!(
            "budget {:.6e}, stationarity {:.2e}, budget residual {:.2e}",
            reference_budget(&p),
            kkt.stationarity,
            kkt.budget
        );
        (s, cert)
    };
    eprintln!(
        "N = {}, pinned loose {}, pinned tight {}, lambda* = {:.10e}",
        schedule.len(),
        cert.n_plus,
        cert.n_minus,
        cert.lambda_star
    );
    write_schedule_file(&out, &schedule).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

fn experiment_cmd(id: u8, config: Option<PathBuf>, out: Option<PathBuf>, seeds: Option<Vec<u64>>) -> Result<()> {
    let text = match &config {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut cfg = ExperimentConfig::parse(&text, id)?;
    if let Some(seeds) = seeds {
        cfg.seeds = seeds;
    }
    let Some(dir) = out.or_else(|| cfg.out.clone()) else {
        bail!("no output directory: pass --out or set 'out' in the config");
    };
    let result = run_experiment(&cfg)?;
    emit_outputs(&result, &dir).with_context(|| format!("writing outputs to {}", dir.display()))?;
    for row in summarize(&result) {
        println!(
            "{:<15} {:<40} median gap {:.4e}  work {:.4e}{}",
            row.schedule.name(),
            result.instances[row.instance].label(),
            row.median_gap,
            row.total_inner_work,
            if row.failed_runs > 0 { format!("  ({} failed)", row.failed_runs) } else { String::new() }
        );
    }
    Ok(())
}

fn toy_cmd() -> Result<()> {
    let p = toy_problem()?;
    let (s, cert) = solve_accuracy(&p)?;
    let kkt = kkt_report(&p, &s, &cert)?;
    println!("lambda* = {:.10e}", cert.lambda_star);
    println!("pinned loose {}, pinned tight {}, transient {}", cert.n_plus, cert.n_minus, cert.transient_set().len());
    println!("stationarity {:.2e}, budget residual {:.2e}", kkt.stationarity, kkt.budget);
    println!("k,delta");
    for (k, d) in s.values.iter().enumerate() {
        println!("{k},{d:.16e}");
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        cmd @ Command::Schedule { .. } => schedule_cmd(cmd),
        Command::Experiment { id, config, out, seeds } => experiment_cmd(id, config, out, seeds),
        Command::Toy => toy_cmd(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
