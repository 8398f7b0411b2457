//! A shortened hull experiment run end to end, writing the CSV outputs to a
//! temporary directory (or the directory given as the first argument).
//!
//! `cargo run --release --example run_experiment [-- OUT_DIR]`

use std::path::PathBuf;

use tunable_oracle::experiment::{emit_outputs, run_experiment, summarize, ExperimentConfig};

fn main() -> tunable_oracle::Result<()> {
    let text = "\
d = 40
mu = 0.1
N = 200
seeds = 1, 2
fstar_iterations = 800
";
    let cfg = ExperimentConfig::parse(text, 2)?;
    let out = run_experiment(&cfg)?;
    for row in summarize(&out) {
        println!(
            "{:<9} {:<36} median gap {:.3e}  inner work {:.0}",
            row.schedule.name(),
            out.instances[row.instance].label(),
            row.median_gap,
            row.total_inner_work
        );
    }
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("tunable-oracle-demo"));
    emit_outputs(&out, &dir)?;
    println!("wrote {}", dir.display());
    Ok(())
}
