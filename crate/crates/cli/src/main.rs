use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qiga_bench::spec::ExperimentSpec;
use qiga_bench::{compute_oracle, run_experiment, write_report, OUT_ENV};

#[derive(Parser)]
#[command(
    name = "qiga-bench",
    about = "Seeded GA/QIGA/D-QIGA benchmark sweeps",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (algorithm, test case, seed) cell of an experiment spec.
    Run {
        /// Experiment spec or run manifest file.
        spec: PathBuf,
        /// Override the spec's seed list (comma-separated).
        #[arg(long)]
        seeds: Option<String>,
        /// Output root; falls back to the spec's `out` key, then $QIGA_BENCH_OUT, then `runs`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Parallel worker count.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Compute and cache the spec's reference values (knapsack DP optimum,
    /// feature-selection centroid baseline).
    Oracle {
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Aggregate run directories into summary tables.
    Report {
        /// Root holding run directories.
        root: PathBuf,
        /// Where the table CSVs go; defaults to the root itself.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn resolve_out(cli_out: Option<PathBuf>, spec_out: Option<&PathBuf>) -> PathBuf {
    cli_out
        .or_else(|| spec_out.cloned())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            spec,
            seeds,
            out,
            workers,
        } => {
            let mut spec = ExperimentSpec::load(&spec)?;
            if let Some(seeds) = seeds {
                spec.seeds = seeds
                    .split(',')
                    .map(|s| s.trim().parse().context("parsing --seeds"))
                    .collect::<Result<Vec<u64>>>()?;
            }
            let out_root = resolve_out(out, spec.out.as_ref());
            let dirs = run_experiment(&spec, &out_root, workers)?;
            println!("{} runs written under {}", dirs.len(), out_root.display());
        }
        Command::Oracle { spec, out } => {
            let spec = ExperimentSpec::load(&spec)?;
            let out_root = resolve_out(out, spec.out.as_ref());
            let record = compute_oracle(&spec, &out_root)?;
            println!("{}", serde_json::to_string_pretty(&record)?);
        }
        Command::Report { root, out } => {
            let out = out.unwrap_or_else(|| root.clone());
            write_report(&root, &out)?;
            println!(
                "wrote table_fitness.csv, table_accuracy.csv, table_timing.csv under {}",
                out.display()
            );
        }
    }
    Ok(())
}
