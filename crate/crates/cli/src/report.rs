//! Aggregation of run directories into the three summary tables:
//! best/average fitness, accuracy/loss, and per-phase timing statistics.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use crate::runner::RunSummary;

/// Per-phase wall-clock summary: always `optimal <= average <= worst`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingSummary {
    pub optimal: f64,
    pub worst: f64,
    pub average: f64,
}

/// Minimum, maximum, and arithmetic mean of a non-empty duration list.
pub fn timing_stats(durations: &[f64]) -> Option<TimingSummary> {
    if durations.is_empty() {
        return None;
    }
    Some(TimingSummary {
        optimal: durations.iter().copied().fold(f64::INFINITY, f64::min),
        worst: durations.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        average: durations.iter().sum::<f64>() / durations.len() as f64,
    })
}

#[derive(Debug, Default, Clone)]
struct Accumulator {
    best_fit: Vec<f64>,
    avg_fit: Vec<f64>,
    accuracy: Vec<f64>,
    loss: Vec<f64>,
    // phase -> per-run (optimal, worst, average)
    timing: BTreeMap<String, Vec<(f64, f64, f64)>>,
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Parsed contents of one run directory.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub summary: RunSummary,
    pub timing: Vec<(String, f64, f64, f64)>,
}

/// Load every run directory under `root` (directories holding a
/// `summary.json`).
pub fn collect_runs(root: &Path) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    for entry in fs::read_dir(root).with_context(|| format!("reading {}", root.display()))? {
        let dir = entry?.path();
        let summary_path = dir.join("summary.json");
        if !summary_path.is_file() {
            continue;
        }
        let summary: RunSummary = serde_json::from_str(&fs::read_to_string(&summary_path)?)
            .with_context(|| format!("parsing {}", summary_path.display()))?;
        let timing_path = dir.join("timing.csv");
        let mut timing = Vec::new();
        if timing_path.is_file() {
            for (i, line) in fs::read_to_string(&timing_path)?.lines().enumerate() {
                if i == 0 {
                    continue;
                }
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != 4 {
                    return Err(anyhow!("{}: bad row {line:?}", timing_path.display()));
                }
                timing.push((
                    fields[0].to_string(),
                    fields[1].parse()?,
                    fields[2].parse()?,
                    fields[3].parse()?,
                ));
            }
        }
        records.push(RunRecord { summary, timing });
    }
    if records.is_empty() {
        return Err(anyhow!("no run directories under {}", root.display()));
    }
    records.sort_by(|a, b| {
        (
            &a.summary.problem,
            &a.summary.algorithm,
            a.summary.test_case,
            a.summary.seed,
        )
            .cmp(&(
                &b.summary.problem,
                &b.summary.algorithm,
                b.summary.test_case,
                b.summary.seed,
            ))
    });
    Ok(records)
}

/// The three aggregated tables as CSV texts:
/// fitness (best/avg), accuracy/loss, and per-phase timing.
pub struct ReportTables {
    pub fitness: String,
    pub accuracy: String,
    pub timing: String,
}

/// Aggregate run records over seeds, grouped by
/// (problem, test case, algorithm).
pub fn aggregate(records: &[RunRecord]) -> ReportTables {
    let mut groups: BTreeMap<(String, usize, String), Accumulator> = BTreeMap::new();
    for record in records {
        let key = (
            record.summary.problem.clone(),
            record.summary.test_case,
            record.summary.algorithm.clone(),
        );
        let acc = groups.entry(key).or_default();
        acc.best_fit.push(record.summary.best_fit);
        acc.avg_fit.push(record.summary.avg_fit);
        acc.accuracy.push(record.summary.accuracy);
        acc.loss.push(record.summary.loss);
        for (phase, optimal, worst, average) in &record.timing {
            acc.timing
                .entry(phase.clone())
                .or_default()
                .push((*optimal, *worst, *average));
        }
    }

    let mut fitness = String::from("problem,test_case,algorithm,best_fit,avg_fit\n");
    let mut accuracy = String::from("problem,test_case,algorithm,accuracy,loss\n");
    let mut timing = String::from("problem,test_case,algorithm,phase,optimal,worst,average\n");
    for ((problem, test_case, algorithm), acc) in &groups {
        fitness.push_str(&format!(
            "{problem},{test_case},{algorithm},{:.6},{:.6}\n",
            mean(&acc.best_fit),
            mean(&acc.avg_fit),
        ));
        accuracy.push_str(&format!(
            "{problem},{test_case},{algorithm},{:.6},{:.6}\n",
            mean(&acc.accuracy),
            mean(&acc.loss),
        ));
        for (phase, stats) in &acc.timing {
            let optimal = mean(&stats.iter().map(|s| s.0).collect::<Vec<_>>());
            let worst = mean(&stats.iter().map(|s| s.1).collect::<Vec<_>>());
            let average = mean(&stats.iter().map(|s| s.2).collect::<Vec<_>>());
            timing.push_str(&format!(
                "{problem},{test_case},{algorithm},{phase},{optimal:.6},{worst:.6},{average:.6}\n"
            ));
        }
    }
    ReportTables {
        fitness,
        accuracy,
        timing,
    }
}

/// Aggregate every run under `root` and write
/// `table_fitness.csv`, `table_accuracy.csv`, `table_timing.csv` into `out`.
pub fn write_report(root: &Path, out: &Path) -> Result<ReportTables> {
    let records = collect_runs(root)?;
    let tables = aggregate(&records);
    fs::create_dir_all(out)?;
    fs::write(out.join("table_fitness.csv"), &tables.fitness)?;
    fs::write(out.join("table_accuracy.csv"), &tables.accuracy)?;
    fs::write(out.join("table_timing.csv"), &tables.timing)?;
    Ok(tables)
}
