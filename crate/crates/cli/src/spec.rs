//! Experiment specification files: flat `key = value` text, `#` comments,
//! unknown keys rejected. The same format serves as the per-run manifest
//! (fully resolved, single algorithm/test case/seed), so any manifest can be
//! fed back to `run` to reproduce its run.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use qiga::engine::{EngineConfig, LevelParams};
use qiga::rotation::TestCase;

/// Which driver to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Ga,
    Qiga,
    Dqiga,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "ga",
            Algorithm::Qiga => "qiga",
            Algorithm::Dqiga => "dqiga",
        }
    }

    pub fn parse(token: &str) -> Result<Self> {
        match token {
            "ga" => Ok(Algorithm::Ga),
            "qiga" => Ok(Algorithm::Qiga),
            "dqiga" => Ok(Algorithm::Dqiga),
            other => bail!("unknown algorithm {other:?} (expected ga, qiga, or dqiga)"),
        }
    }
}

/// The optimization problem under benchmark.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    OneMax {
        bits: usize,
    },
    Knapsack {
        items: usize,
        instance_seed: u64,
    },
    /// Feature selection over an IDX dataset pair, or over the bundled
    /// synthetic separable dataset when no paths are given.
    FeatureSelection {
        images: Option<PathBuf>,
        labels: Option<PathBuf>,
        features: usize,
        classes: usize,
        dataset_seed: u64,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::OneMax { .. } => "onemax",
            ProblemSpec::Knapsack { .. } => "knapsack",
            ProblemSpec::FeatureSelection { .. } => "feature-selection",
        }
    }
}

/// A parsed experiment specification.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub algorithms: Vec<Algorithm>,
    pub test_cases: Vec<usize>,
    pub seeds: Vec<u64>,
    pub problem: ProblemSpec,
    pub out: Option<PathBuf>,
    pub population: Option<usize>,
    pub epochs: Option<usize>,
    pub crossover: Option<f64>,
    pub mutation: Option<f64>,
    pub rotation_min: Option<f64>,
    pub rotation_max: Option<f64>,
    pub boost_c: Option<f64>,
    pub elitism_fraction: Option<f64>,
    pub mean_threshold: Option<f64>,
    pub param_threshold: Option<usize>,
    pub env_epsilon: Option<f64>,
    pub level_min: Option<usize>,
    pub level_max: Option<usize>,
    pub level_interval: Option<usize>,
    pub target_score: Option<f64>,
    pub train_samples: usize,
    pub fitness_samples: usize,
    pub batch_epochs: usize,
    pub engine_seed_base: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            algorithms: vec![Algorithm::Ga, Algorithm::Qiga, Algorithm::Dqiga],
            test_cases: vec![1, 2, 3],
            seeds: vec![1],
            problem: ProblemSpec::OneMax { bits: 32 },
            out: None,
            population: None,
            epochs: None,
            crossover: None,
            mutation: None,
            rotation_min: None,
            rotation_max: None,
            boost_c: None,
            elitism_fraction: None,
            mean_threshold: None,
            param_threshold: None,
            env_epsilon: None,
            level_min: None,
            level_max: None,
            level_interval: None,
            target_score: None,
            train_samples: 1000,
            fitness_samples: 500,
            batch_epochs: 100,
            engine_seed_base: 0,
        }
    }
}

/// Angles accept a `pi` suffix (`0.08pi`) or plain radians.
fn parse_angle(value: &str) -> Result<f64> {
    if let Some(multiple) = value.strip_suffix("pi") {
        Ok(multiple.trim().parse::<f64>()? * std::f64::consts::PI)
    } else {
        Ok(value.parse::<f64>()?)
    }
}

fn parse_list<V, F: Fn(&str) -> Result<V>>(value: &str, parse: F) -> Result<Vec<V>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(parse)
        .collect()
}

impl ExperimentSpec {
    /// Parse a specification or manifest from its text form.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw: BTreeMap<String, String> = BTreeMap::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("line {}: expected `key = value`, got {line:?}", line_no + 1)
            })?;
            raw.insert(key.trim().to_string(), value.trim().to_string());
        }

        let mut spec = ExperimentSpec::default();
        let mut problem_kind: Option<String> = None;
        let mut onemax_bits = 32usize;
        let mut knapsack_items = 20usize;
        let mut knapsack_seed = 7000u64;
        let mut images: Option<PathBuf> = None;
        let mut labels: Option<PathBuf> = None;
        let mut features = 64usize;
        let mut classes = 4usize;
        let mut dataset_seed = 1u64;

        for (key, value) in &raw {
            match key.as_str() {
                "algorithms" => spec.algorithms = parse_list(value, Algorithm::parse)?,
                "algorithm" => spec.algorithms = vec![Algorithm::parse(value)?],
                "test_cases" => {
                    spec.test_cases = parse_list(value, |t| Ok(t.parse::<usize>()?))?;
                }
                "test_case" => spec.test_cases = vec![value.parse()?],
                "seeds" => spec.seeds = parse_list(value, |t| Ok(t.parse::<u64>()?))?,
                "seed" => spec.seeds = vec![value.parse()?],
                "problem" => problem_kind = Some(value.clone()),
                "onemax_bits" => onemax_bits = value.parse()?,
                "knapsack_items" => knapsack_items = value.parse()?,
                "knapsack_seed" => knapsack_seed = value.parse()?,
                "images" => images = Some(PathBuf::from(value)),
                "labels" => labels = Some(PathBuf::from(value)),
                "features" => features = value.parse()?,
                "classes" => classes = value.parse()?,
                "dataset_seed" => dataset_seed = value.parse()?,
                "train_samples" => spec.train_samples = value.parse()?,
                "fitness_samples" => spec.fitness_samples = value.parse()?,
                "batch_epochs" => spec.batch_epochs = value.parse()?,
                "out" => spec.out = Some(PathBuf::from(value)),
                "population" => spec.population = Some(value.parse()?),
                "epochs" => spec.epochs = Some(value.parse()?),
                "crossover" => spec.crossover = Some(value.parse()?),
                "mutation" => spec.mutation = Some(value.parse()?),
                "rotation_min" => spec.rotation_min = Some(parse_angle(value)?),
                "rotation_max" => spec.rotation_max = Some(parse_angle(value)?),
                "boost_c" => spec.boost_c = Some(value.parse()?),
                "elitism_fraction" => spec.elitism_fraction = Some(value.parse()?),
                "mean_threshold" => spec.mean_threshold = Some(value.parse()?),
                "param_threshold" => spec.param_threshold = Some(value.parse()?),
                "env_epsilon" => spec.env_epsilon = Some(value.parse()?),
                "level_min" => spec.level_min = Some(value.parse()?),
                "level_max" => spec.level_max = Some(value.parse()?),
                "level_interval" => spec.level_interval = Some(value.parse()?),
                "target_score" => spec.target_score = Some(value.parse()?),
                "engine_seed_base" => spec.engine_seed_base = value.parse()?,
                other => bail!("unknown key {other:?}"),
            }
        }

        let kind = problem_kind.ok_or_else(|| anyhow!("missing required key `problem`"))?;
        spec.problem = match kind.as_str() {
            "onemax" => ProblemSpec::OneMax { bits: onemax_bits },
            "knapsack" => ProblemSpec::Knapsack {
                items: knapsack_items,
                instance_seed: knapsack_seed,
            },
            "feature-selection" => {
                if images.is_some() != labels.is_some() {
                    bail!("feature-selection needs both `images` and `labels`, or neither");
                }
                ProblemSpec::FeatureSelection {
                    images,
                    labels,
                    features,
                    classes,
                    dataset_seed,
                }
            }
            other => {
                bail!("unknown problem {other:?} (expected onemax, knapsack, or feature-selection)")
            }
        };

        if spec.algorithms.is_empty() {
            bail!("`algorithms` must name at least one driver");
        }
        if spec.test_cases.is_empty() {
            bail!("`test_cases` must name at least one case");
        }
        if spec.seeds.is_empty() {
            bail!("`seeds` must name at least one seed");
        }
        for &case in &spec.test_cases {
            TestCase::from_number(case).map_err(|e| anyhow!("{e}"))?;
        }
        Ok(spec)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading spec {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing spec {}", path.display()))
    }

    /// The resolved engine configuration for one (test case, seed) pair.
    /// Unset keys fall back to the published per-test-case defaults.
    pub fn engine_config(
        &self,
        test_case: usize,
        seed: u64,
        encoding_length: usize,
    ) -> Result<EngineConfig<f64>> {
        let tc = TestCase::from_number(test_case).map_err(|e| anyhow!("{e}"))?;
        let mut cfg = EngineConfig::<f64>::for_test_case(tc, encoding_length);
        cfg.seed = self.engine_seed_base.wrapping_add(seed);
        if let Some(p) = self.population {
            cfg.population_size = p;
        }
        if let Some(e) = self.epochs {
            cfg.epochs = e;
        }
        if let Some(v) = self.crossover {
            cfg.p_crossover = v;
        }
        if let Some(v) = self.mutation {
            cfg.p_mutation = v;
        }
        if let Some(v) = self.rotation_min {
            cfg.theta_min = v;
        }
        if let Some(v) = self.rotation_max {
            cfg.theta_max = v.max(cfg.theta_min);
        }
        if let Some(v) = self.boost_c {
            cfg.boost_c = v;
        }
        if let Some(v) = self.elitism_fraction {
            cfg.selection.elitism_fraction = v;
        }
        if let Some(v) = self.mean_threshold {
            cfg.selection.mean_threshold = v;
        }
        if let Some(v) = self.param_threshold {
            cfg.selection.param_threshold = v;
        }
        if let Some(v) = self.env_epsilon {
            cfg.selection.env_epsilon = v;
        }
        if let (Some(min), Some(max), Some(interval)) =
            (self.level_min, self.level_max, self.level_interval)
        {
            cfg.level = LevelParams {
                min_length: min,
                max_length: max,
                interval,
            };
        }
        cfg.target_score = self.target_score;
        Ok(cfg)
    }

    /// Render the fully resolved manifest for a single run. Feeding the
    /// manifest back through `run` reproduces the run.
    pub fn manifest(
        &self,
        algorithm: Algorithm,
        test_case: usize,
        seed: u64,
        cfg: &EngineConfig<f64>,
    ) -> String {
        let mut lines = vec![
            "# resolved run manifest; pass back to `run` to reproduce".to_string(),
            format!("algorithm = {}", algorithm.name()),
            format!("test_case = {test_case}"),
            format!("seed = {seed}"),
            format!("engine_seed_base = {}", self.engine_seed_base),
        ];
        match &self.problem {
            ProblemSpec::OneMax { bits } => {
                lines.push("problem = onemax".to_string());
                lines.push(format!("onemax_bits = {bits}"));
            }
            ProblemSpec::Knapsack {
                items,
                instance_seed,
            } => {
                lines.push("problem = knapsack".to_string());
                lines.push(format!("knapsack_items = {items}"));
                lines.push(format!("knapsack_seed = {instance_seed}"));
            }
            ProblemSpec::FeatureSelection {
                images,
                labels,
                features,
                classes,
                dataset_seed,
            } => {
                lines.push("problem = feature-selection".to_string());
                if let (Some(i), Some(l)) = (images, labels) {
                    lines.push(format!("images = {}", i.display()));
                    lines.push(format!("labels = {}", l.display()));
                }
                lines.push(format!("features = {features}"));
                lines.push(format!("classes = {classes}"));
                lines.push(format!("dataset_seed = {dataset_seed}"));
                lines.push(format!("train_samples = {}", self.train_samples));
                lines.push(format!("fitness_samples = {}", self.fitness_samples));
                lines.push(format!("batch_epochs = {}", self.batch_epochs));
            }
        }
        lines.push(format!("population = {}", cfg.population_size));
        lines.push(format!("epochs = {}", cfg.epochs));
        lines.push(format!("crossover = {}", cfg.p_crossover));
        lines.push(format!("mutation = {}", cfg.p_mutation));
        lines.push(format!("rotation_min = {}", cfg.theta_min));
        lines.push(format!("rotation_max = {}", cfg.theta_max));
        lines.push(format!("boost_c = {}", cfg.boost_c));
        lines.push(format!(
            "elitism_fraction = {}",
            cfg.selection.elitism_fraction
        ));
        lines.push(format!("mean_threshold = {}", cfg.selection.mean_threshold));
        lines.push(format!(
            "param_threshold = {}",
            cfg.selection.param_threshold
        ));
        lines.push(format!("env_epsilon = {}", cfg.selection.env_epsilon));
        lines.push(format!("level_min = {}", cfg.level.min_length));
        lines.push(format!("level_max = {}", cfg.level.max_length));
        lines.push(format!("level_interval = {}", cfg.level.interval));
        if let Some(t) = cfg.target_score {
            lines.push(format!("target_score = {t}"));
        }
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_a_full_spec() {
        let spec = ExperimentSpec::parse(
            "# comment\n\
             algorithms = ga, qiga, dqiga\n\
             test_cases = 1,3\n\
             seeds = 1,2,3\n\
             problem = knapsack\n\
             knapsack_items = 20\n\
             knapsack_seed = 7000\n\
             population = 30\n\
             rotation_max = 0.08pi\n",
        )
        .unwrap();
        assert_eq!(spec.algorithms.len(), 3);
        assert_eq!(spec.test_cases, vec![1, 3]);
        assert_eq!(spec.population, Some(30));
        assert!((spec.rotation_max.unwrap() - 0.08 * std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(
            spec.problem,
            ProblemSpec::Knapsack {
                items: 20,
                instance_seed: 7000
            }
        );
    }

    #[test]
    fn unknown_keys_fail_fast() {
        let err = ExperimentSpec::parse("problem = onemax\nrotation = 0.1\n").unwrap_err();
        assert!(err.to_string().contains("unknown key"));
    }

    #[test]
    fn missing_problem_is_an_error() {
        assert!(ExperimentSpec::parse("algorithms = ga\n").is_err());
    }

    #[test]
    fn manifest_round_trips_to_the_same_config() {
        let spec = ExperimentSpec::parse(
            "problem = onemax\nonemax_bits = 16\nseeds = 9\nalgorithms = qiga\ntest_cases = 2\nmutation = 0.3\n",
        )
        .unwrap();
        let cfg = spec.engine_config(2, 9, 16).unwrap();
        let manifest = spec.manifest(Algorithm::Qiga, 2, 9, &cfg);
        let reparsed = ExperimentSpec::parse(&manifest).unwrap();
        assert_eq!(reparsed.algorithms, vec![Algorithm::Qiga]);
        assert_eq!(reparsed.test_cases, vec![2]);
        assert_eq!(reparsed.seeds, vec![9]);
        let cfg2 = reparsed.engine_config(2, 9, 16).unwrap();
        assert_eq!(cfg, cfg2);
    }

    #[test]
    fn test_case_bounds_checked() {
        let err = ExperimentSpec::parse("problem = onemax\ntest_cases = 4\n").unwrap_err();
        assert!(err.to_string().contains("test case"));
    }
}
