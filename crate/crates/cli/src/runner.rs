//! Experiment execution: problem construction, seeded sweeps, and the
//! per-run output files (generation CSV, summary JSON, timing CSV, manifest).

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qiga::derive_substream;
use qiga::engine::{run_classical_ga, run_dqiga, run_qiga, RunResult};
use qiga::fitness::{
    knapsack_dp_oracle, synthetic_separable, Dataset, FeatureSelectProblem, KnapsackInstance,
    KnapsackProblem, OneMax, Problem,
};

use crate::idx;
use crate::report::timing_stats;
use crate::spec::{Algorithm, ExperimentSpec, ProblemSpec};

/// Build the problem a spec describes. Knapsack instances derive from the
/// instance seed; feature selection loads IDX files when paths are given and
/// falls back to the bundled synthetic separable dataset otherwise.
pub fn build_problem(spec: &ExperimentSpec) -> Result<Box<dyn Problem<f64>>> {
    match &spec.problem {
        ProblemSpec::OneMax { bits } => Ok(Box::new(OneMax::new(*bits))),
        ProblemSpec::Knapsack {
            items,
            instance_seed,
        } => {
            let mut rng = derive_substream(*instance_seed, 0, 0);
            let instance = KnapsackInstance::random(*items, &mut rng);
            Ok(Box::new(KnapsackProblem::new(instance)?))
        }
        ProblemSpec::FeatureSelection {
            images,
            labels,
            features,
            classes,
            dataset_seed,
        } => {
            let (train, fitness_set) = if let (Some(images), Some(labels)) = (images, labels) {
                let total = spec.train_samples + spec.fitness_samples;
                let data = idx::load_idx(images, labels, total)
                    .map_err(|e| anyhow!("loading IDX dataset: {e}"))?;
                split_dataset(&data, spec.train_samples, spec.fitness_samples)?
            } else {
                let total = spec.train_samples + spec.fitness_samples;
                let per_class = total.div_ceil(*classes);
                let mut rng = derive_substream(*dataset_seed, 0, 0);
                let informative = (features / 16).max(1);
                let data = synthetic_separable::<f64, _>(
                    *classes,
                    per_class,
                    *features,
                    informative,
                    &mut rng,
                );
                split_dataset(&data, spec.train_samples, spec.fitness_samples)?
            };
            Ok(Box::new(FeatureSelectProblem::new(
                train,
                fitness_set,
                spec.batch_epochs,
            )?))
        }
    }
}

/// Interleave the first `train + fitness` samples into disjoint train and
/// fitness sets. Interleaving keeps every class present in both halves for
/// class-sorted sources like the synthetic generator.
fn split_dataset(
    data: &Dataset<f64>,
    train_samples: usize,
    fitness_samples: usize,
) -> Result<(Dataset<f64>, Dataset<f64>)> {
    let total = train_samples + fitness_samples;
    if data.len() < total {
        return Err(anyhow!(
            "dataset holds {} samples, spec needs {total} (train {train_samples} + fitness {fitness_samples})",
            data.len()
        ));
    }
    let mut train = (Vec::new(), Vec::new());
    let mut fitness = (Vec::new(), Vec::new());
    // Fitness picks are spread evenly through the prefix.
    let stride = total.div_ceil(fitness_samples.max(1)).max(1);
    for i in 0..total {
        let sample = data.samples()[i].clone();
        let label = data.labels()[i];
        if i % stride == 0 && fitness.0.len() < fitness_samples {
            fitness.0.push(sample);
            fitness.1.push(label);
        } else if train.0.len() < train_samples {
            train.0.push(sample);
            train.1.push(label);
        } else {
            fitness.0.push(sample);
            fitness.1.push(label);
        }
    }
    Ok((
        Dataset::new(data.features(), train.0, train.1)?,
        Dataset::new(data.features(), fitness.0, fitness.1)?,
    ))
}

/// Per-run summary mirroring the accuracy/loss table roles.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub problem: String,
    pub algorithm: String,
    pub test_case: usize,
    pub seed: u64,
    pub best_fit: f64,
    pub avg_fit: f64,
    pub accuracy: f64,
    pub loss: f64,
    pub param_count: usize,
    pub evaluations: usize,
    pub generations: usize,
    pub generations_to_optimum: Option<usize>,
}

fn dispatch(
    algorithm: Algorithm,
    cfg: &qiga::EngineConfig64,
    problem: &dyn Problem<f64>,
) -> qiga::Result<RunResult<f64>> {
    match algorithm {
        Algorithm::Ga => run_classical_ga(cfg, problem),
        Algorithm::Qiga => run_qiga(cfg, problem),
        Algorithm::Dqiga => run_dqiga(cfg, problem),
    }
}

fn generations_csv(result: &RunResult<f64>) -> String {
    let mut csv = String::from("generation,best_fit,avg_fit\n");
    for (g, (best, avg)) in result
        .best_per_generation
        .iter()
        .zip(&result.avg_per_generation)
        .enumerate()
    {
        csv.push_str(&format!("{},{},{}\n", g + 1, best, avg));
    }
    csv
}

fn timing_csv(result: &RunResult<f64>) -> String {
    let mut csv = String::from("phase,optimal,worst,average\n");
    for (phase, samples) in [
        ("rotation", &result.timings.rotation),
        ("mutation", &result.timings.mutation),
        ("crossover", &result.timings.crossover),
    ] {
        // Phases a driver never ran (GA rotation) report zeros.
        let (optimal, worst, average) = timing_stats(samples)
            .map(|s| (s.optimal, s.worst, s.average))
            .unwrap_or((0.0, 0.0, 0.0));
        csv.push_str(&format!("{phase},{optimal:.6},{worst:.6},{average:.6}\n"));
    }
    csv
}

/// Run one (algorithm, test case, seed) cell and write its four files.
fn run_one(
    spec: &ExperimentSpec,
    problem: &dyn Problem<f64>,
    algorithm: Algorithm,
    test_case: usize,
    seed: u64,
    out_root: &Path,
) -> Result<PathBuf> {
    let cfg = spec.engine_config(test_case, seed, problem.encoding_length())?;
    let result = dispatch(algorithm, &cfg, problem)
        .map_err(|e| anyhow!("{} t{test_case} seed {seed}: {e}", algorithm.name()))?;

    let dir = out_root.join(format!(
        "{}-{}-t{}-s{}",
        spec.problem.name(),
        algorithm.name(),
        test_case,
        seed
    ));
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let summary = RunSummary {
        problem: spec.problem.name().to_string(),
        algorithm: algorithm.name().to_string(),
        test_case,
        seed,
        best_fit: *result
            .best_per_generation
            .last()
            .expect("runs record at least one generation"),
        avg_fit: *result
            .avg_per_generation
            .last()
            .expect("runs record at least one generation"),
        accuracy: result.final_accuracy,
        loss: result.final_loss,
        param_count: result.best.stats().param_count,
        evaluations: result.evaluations,
        generations: result.best_per_generation.len(),
        generations_to_optimum: result.generations_to_optimum,
    };

    fs::write(dir.join("generations.csv"), generations_csv(&result))?;
    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    fs::write(dir.join("timing.csv"), timing_csv(&result))?;
    fs::write(
        dir.join("manifest.txt"),
        spec.manifest(algorithm, test_case, seed, &cfg),
    )?;
    Ok(dir)
}

/// Run the full (algorithm, test case, seed) grid; cells execute in parallel
/// across `workers` threads, each owning its output directory.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out_root: &Path,
    workers: usize,
) -> Result<Vec<PathBuf>> {
    let problem = build_problem(spec)?;
    fs::create_dir_all(out_root)?;
    let mut jobs = Vec::new();
    for &algorithm in &spec.algorithms {
        for &test_case in &spec.test_cases {
            for &seed in &spec.seeds {
                jobs.push((algorithm, test_case, seed));
            }
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()?;
    let mut dirs = pool.install(|| {
        jobs.par_iter()
            .map(|&(algorithm, test_case, seed)| {
                run_one(spec, problem.as_ref(), algorithm, test_case, seed, out_root)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    dirs.sort();
    Ok(dirs)
}

/// Problem-level reference values, cached as `oracle.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleRecord {
    pub problem: String,
    /// Exact optimum for knapsack (DP) and OneMax (all ones).
    pub optimum: Option<f64>,
    /// Knapsack optimum in raw value units.
    pub knapsack_optimum_value: Option<u64>,
    /// Full-feature nearest-centroid baseline error for feature selection.
    pub baseline_error: Option<f64>,
}

/// Compute the spec's reference values and cache them under `out_root`.
pub fn compute_oracle(spec: &ExperimentSpec, out_root: &Path) -> Result<OracleRecord> {
    let record = match &spec.problem {
        ProblemSpec::OneMax { .. } => OracleRecord {
            problem: "onemax".into(),
            optimum: Some(1.0),
            knapsack_optimum_value: None,
            baseline_error: None,
        },
        ProblemSpec::Knapsack {
            items,
            instance_seed,
        } => {
            let mut rng = derive_substream(*instance_seed, 0, 0);
            let instance = KnapsackInstance::random(*items, &mut rng);
            let optimum = knapsack_dp_oracle(&instance).map_err(|e| anyhow!("{e}"))?;
            OracleRecord {
                problem: "knapsack".into(),
                optimum: Some(1.0),
                knapsack_optimum_value: Some(optimum),
                baseline_error: None,
            }
        }
        ProblemSpec::FeatureSelection { .. } => {
            let problem = build_problem(spec)?;
            let all_features = vec![true; problem.encoding_length()];
            let errors = problem.batch_errors(&all_features, problem.batch_config().batch_count());
            let baseline = errors.iter().sum::<f64>() / errors.len() as f64;
            OracleRecord {
                problem: "feature-selection".into(),
                optimum: None,
                knapsack_optimum_value: None,
                baseline_error: Some(baseline),
            }
        }
    };
    fs::create_dir_all(out_root)?;
    fs::write(
        out_root.join("oracle.json"),
        serde_json::to_string_pretty(&record)? + "\n",
    )?;
    Ok(record)
}
