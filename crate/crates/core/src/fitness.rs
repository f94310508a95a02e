//! Fitness statistics and the built-in problem suite.
//!
//! Every phenotype is scored as batched error fractions; the mean and
//! population standard deviation of those batches, plus the count of active
//! genes, form the comparison key used by selection and elitism. Evaluators
//! are deterministic: closed-form scores for OneMax and 0/1 knapsack, and a
//! nearest-centroid classifier for feature-selection masks.

use crate::error::{Error, Result};
use crate::qubit::BinaryChromosome;
use crate::scalar::Scalar;
use rand::Rng;

/// Mean/spread of per-batch error fractions plus the active-gene count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitnessStats<T> {
    /// Mean error fraction in [0, 1]; smaller is better.
    pub mean_error: T,
    /// Population standard deviation of the batch errors.
    pub std_error: T,
    /// Number of active (1) genes in the phenotype.
    pub param_count: usize,
}

impl<T: Scalar> FitnessStats<T> {
    /// The maximized score `1 - mean_error`.
    pub fn score(&self) -> T {
        T::one() - self.mean_error
    }
}

/// Batching plan for the evaluation set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchConfig {
    /// Training-epoch count the batch width is derived from.
    pub total_epochs: usize,
    /// Size of the evaluation set.
    pub fitness_set_size: usize,
}

impl BatchConfig {
    pub fn new(total_epochs: usize, fitness_set_size: usize) -> Self {
        Self {
            total_epochs,
            fitness_set_size,
        }
    }

    /// Number of evaluation batches: `fitness_set_size / total_epochs`
    /// (integer division, at least one batch; the division remainder is
    /// folded into the last batch).
    pub fn batch_count(&self) -> usize {
        if self.total_epochs == 0 {
            return 1;
        }
        (self.fitness_set_size / self.total_epochs).max(1)
    }
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            total_epochs: 100,
            fitness_set_size: 100,
        }
    }
}

/// Mean and population standard deviation of per-batch error fractions.
pub fn batch_error_stats<T: Scalar>(errors: &[T], param_count: usize) -> Result<FitnessStats<T>> {
    if errors.is_empty() {
        return Err(Error::InvalidParameter(
            "no valid batches to aggregate".into(),
        ));
    }
    let n = T::from_f64_lossy(errors.len() as f64);
    let mean = errors.iter().fold(T::zero(), |acc, &e| acc + e) / n;
    let variance = errors
        .iter()
        .fold(T::zero(), |acc, &e| acc + (e - mean) * (e - mean))
        / n;
    Ok(FitnessStats {
        mean_error: mean,
        std_error: variance.sqrt(),
        param_count,
    })
}

/// A binary optimization problem evaluated over batched error fractions.
pub trait Problem<T: Scalar>: Send + Sync {
    /// Phenotype width the problem decodes.
    fn encoding_length(&self) -> usize;

    /// Per-batch error fractions for a full-width phenotype. Batches with no
    /// samples are skipped, so the result may be shorter than `batches` but
    /// never empty for `batches >= 1`.
    fn batch_errors(&self, bits: &[bool], batches: usize) -> Vec<T>;

    /// Best achievable score, when the optimum is known.
    fn optimum_score(&self) -> Option<T> {
        None
    }

    /// The problem's batching plan; synthetic problems default to one batch.
    fn batch_config(&self) -> BatchConfig {
        BatchConfig::default()
    }

    fn name(&self) -> &str;
}

/// Evaluate a list of phenotypes. Short phenotypes decode zero-padded to the
/// problem's width; `param_count` counts the active genes of the raw
/// phenotype.
pub fn evaluate_fitness<T: Scalar>(
    problem: &dyn Problem<T>,
    phenotypes: &[BinaryChromosome],
    cfg: &BatchConfig,
) -> Result<Vec<FitnessStats<T>>> {
    let width = problem.encoding_length();
    let batches = cfg.batch_count();
    phenotypes
        .iter()
        .map(|phenotype| {
            if phenotype.len() > width {
                return Err(Error::EncodingMismatch {
                    expected: width,
                    got: phenotype.len(),
                });
            }
            let bits = phenotype.padded(width);
            let errors = problem.batch_errors(&bits, batches);
            batch_error_stats(&errors, phenotype.ones())
        })
        .collect()
}

/// Number of 1-bits; the OneMax score.
pub fn onemax(bits: &[bool]) -> usize {
    bits.iter().filter(|&&b| b).count()
}

/// Maximize the number of 1-bits; error is `1 - ones/length`.
#[derive(Debug, Clone)]
pub struct OneMax {
    pub length: usize,
}

impl OneMax {
    pub fn new(length: usize) -> Self {
        Self { length }
    }
}

impl<T: Scalar> Problem<T> for OneMax {
    fn encoding_length(&self) -> usize {
        self.length
    }

    fn batch_errors(&self, bits: &[bool], batches: usize) -> Vec<T> {
        let error = T::one() - T::from_f64_lossy(onemax(bits) as f64 / self.length as f64);
        vec![error; batches.max(1)]
    }

    fn optimum_score(&self) -> Option<T> {
        Some(T::one())
    }

    fn name(&self) -> &str {
        "onemax"
    }
}

/// A 0/1 knapsack instance with integer weights and values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnapsackInstance {
    pub weights: Vec<u64>,
    pub values: Vec<u64>,
    pub capacity: u64,
}

impl KnapsackInstance {
    pub fn new(weights: Vec<u64>, values: Vec<u64>, capacity: u64) -> Result<Self> {
        if weights.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                got: values.len(),
            });
        }
        if weights.is_empty() {
            return Err(Error::InvalidParameter(
                "knapsack needs at least one item".into(),
            ));
        }
        Ok(Self {
            weights,
            values,
            capacity,
        })
    }

    /// A reproducible instance: weights and values uniform in [1, 30],
    /// capacity 40% of the total weight.
    pub fn random<R: Rng + ?Sized>(items: usize, rng: &mut R) -> Self {
        let weights: Vec<u64> = (0..items).map(|_| rng.random_range(1..=30)).collect();
        let values: Vec<u64> = (0..items).map(|_| rng.random_range(1..=30)).collect();
        let capacity = (weights.iter().sum::<u64>() * 2 / 5).max(1);
        Self {
            weights,
            values,
            capacity,
        }
    }

    pub fn items(&self) -> usize {
        self.weights.len()
    }
}

/// Total value of a selection, or 0 when it exceeds capacity (death penalty).
pub fn knapsack_value(bits: &[bool], instance: &KnapsackInstance) -> u64 {
    let mut weight = 0u64;
    let mut value = 0u64;
    for (i, &selected) in bits.iter().enumerate().take(instance.items()) {
        if selected {
            weight += instance.weights[i];
            value += instance.values[i];
        }
    }
    if weight <= instance.capacity {
        value
    } else {
        0
    }
}

/// Exact optimum by dynamic programming over capacity.
pub fn knapsack_dp_oracle(instance: &KnapsackInstance) -> Result<u64> {
    let capacity = instance.capacity as usize;
    if capacity.saturating_mul(instance.items()) > 10_000_000 {
        return Err(Error::InvalidParameter(
            "knapsack DP table would exceed 10^7 cells".into(),
        ));
    }
    let mut best = vec![0u64; capacity + 1];
    for i in 0..instance.items() {
        let weight = instance.weights[i] as usize;
        if weight > capacity {
            continue;
        }
        for cap in (weight..=capacity).rev() {
            best[cap] = best[cap].max(best[cap - weight] + instance.values[i]);
        }
    }
    Ok(best[capacity])
}

/// Knapsack as a problem: error is `1 - value/optimum`.
#[derive(Debug, Clone)]
pub struct KnapsackProblem {
    instance: KnapsackInstance,
    optimum: u64,
}

impl KnapsackProblem {
    /// Resolve the optimum with the DP oracle at construction.
    pub fn new(instance: KnapsackInstance) -> Result<Self> {
        let optimum = knapsack_dp_oracle(&instance)?;
        Ok(Self::with_optimum(instance, optimum))
    }

    pub fn with_optimum(instance: KnapsackInstance, optimum: u64) -> Self {
        Self { instance, optimum }
    }

    pub fn instance(&self) -> &KnapsackInstance {
        &self.instance
    }

    pub fn optimum(&self) -> u64 {
        self.optimum
    }
}

impl<T: Scalar> Problem<T> for KnapsackProblem {
    fn encoding_length(&self) -> usize {
        self.instance.items()
    }

    fn batch_errors(&self, bits: &[bool], batches: usize) -> Vec<T> {
        let value = knapsack_value(bits, &self.instance);
        let error = if self.optimum == 0 {
            T::zero()
        } else {
            T::one() - T::from_f64_lossy(value as f64 / self.optimum as f64)
        };
        vec![error; batches.max(1)]
    }

    fn optimum_score(&self) -> Option<T> {
        Some(T::one())
    }

    fn name(&self) -> &str {
        "knapsack"
    }
}

/// A labeled sample set with dense features in [0, 1].
#[derive(Debug, Clone)]
pub struct Dataset<T> {
    features: usize,
    samples: Vec<Vec<T>>,
    labels: Vec<usize>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(features: usize, samples: Vec<Vec<T>>, labels: Vec<usize>) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: samples.len(),
                got: labels.len(),
            });
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != features) {
            return Err(Error::LengthMismatch {
                expected: features,
                got: bad.len(),
            });
        }
        Ok(Self {
            features,
            samples,
            labels,
        })
    }

    pub fn features(&self) -> usize {
        self.features
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Vec<T>] {
        &self.samples
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// The first `count` samples as a new dataset.
    pub fn take(&self, count: usize) -> Self {
        let count = count.min(self.len());
        Self {
            features: self.features,
            samples: self.samples[..count].to_vec(),
            labels: self.labels[..count].to_vec(),
        }
    }
}

/// Per-class mean vectors over the masked feature subset.
struct Centroids<T> {
    classes: Vec<usize>,
    means: Vec<Vec<T>>,
    selected: Vec<usize>,
}

impl<T: Scalar> Centroids<T> {
    fn fit(train: &Dataset<T>, mask: &[bool]) -> Self {
        let selected: Vec<usize> = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &on)| (on && i < train.features()).then_some(i))
            .collect();
        let mut classes: Vec<usize> = train.labels().to_vec();
        classes.sort_unstable();
        classes.dedup();
        let mut sums = vec![vec![T::zero(); selected.len()]; classes.len()];
        let mut counts = vec![0usize; classes.len()];
        for (sample, &label) in train.samples().iter().zip(train.labels()) {
            let k = classes.binary_search(&label).expect("label catalogued");
            counts[k] += 1;
            for (j, &f) in selected.iter().enumerate() {
                sums[k][j] += sample[f];
            }
        }
        for (sum, &count) in sums.iter_mut().zip(&counts) {
            if count > 0 {
                let n = T::from_f64_lossy(count as f64);
                for v in sum.iter_mut() {
                    *v /= n;
                }
            }
        }
        Self {
            classes,
            means: sums,
            selected,
        }
    }

    fn classify(&self, sample: &[T]) -> usize {
        let mut best_class = self.classes.first().copied().unwrap_or(0);
        let mut best_distance = T::infinity();
        for (k, mean) in self.means.iter().enumerate() {
            let mut distance = T::zero();
            for (j, &f) in self.selected.iter().enumerate() {
                let d = sample[f] - mean[j];
                distance += d * d;
            }
            if distance < best_distance {
                best_distance = distance;
                best_class = self.classes[k];
            }
        }
        best_class
    }
}

/// Per-batch nearest-centroid error fractions for a feature mask.
/// An empty mask scores every batch at the hard-penalty error 1.0.
pub fn feature_selection_error<T: Scalar>(
    mask: &[bool],
    train: &Dataset<T>,
    fitness_set: &Dataset<T>,
    batches: usize,
) -> Result<Vec<T>> {
    if mask.len() != train.features() {
        return Err(Error::EncodingMismatch {
            expected: train.features(),
            got: mask.len(),
        });
    }
    if train.is_empty() || fitness_set.is_empty() {
        return Err(Error::InvalidParameter(
            "train and fitness sets must be non-empty".into(),
        ));
    }
    let batches = batches.max(1);
    if !mask.iter().any(|&b| b) {
        return Ok(vec![T::one(); batches]);
    }
    let centroids = Centroids::fit(train, mask);
    let n = fitness_set.len();
    let base = n / batches;
    let mut errors = Vec::with_capacity(batches);
    let mut start = 0usize;
    for b in 0..batches {
        // Remainder folds into the last batch.
        let end = if b + 1 == batches { n } else { start + base };
        if end > start {
            let mut wrong = 0usize;
            for i in start..end {
                if centroids.classify(&fitness_set.samples()[i]) != fitness_set.labels()[i] {
                    wrong += 1;
                }
            }
            errors.push(T::from_f64_lossy(wrong as f64 / (end - start) as f64));
        }
        start = end;
    }
    Ok(errors)
}

/// Feature-selection masks scored by nearest-centroid classification.
#[derive(Debug, Clone)]
pub struct FeatureSelectProblem<T> {
    train: Dataset<T>,
    fitness_set: Dataset<T>,
    batch: BatchConfig,
}

impl<T: Scalar> FeatureSelectProblem<T> {
    pub fn new(train: Dataset<T>, fitness_set: Dataset<T>, total_epochs: usize) -> Result<Self> {
        if train.features() != fitness_set.features() {
            return Err(Error::LengthMismatch {
                expected: train.features(),
                got: fitness_set.features(),
            });
        }
        let batch = BatchConfig::new(total_epochs, fitness_set.len());
        Ok(Self {
            train,
            fitness_set,
            batch,
        })
    }

    pub fn train(&self) -> &Dataset<T> {
        &self.train
    }

    pub fn fitness_set(&self) -> &Dataset<T> {
        &self.fitness_set
    }

    /// Mean error of the all-ones mask: the full-feature centroid baseline.
    pub fn full_feature_baseline(&self) -> Result<FitnessStats<T>> {
        let mask = vec![true; self.train.features()];
        let errors = feature_selection_error(
            &mask,
            &self.train,
            &self.fitness_set,
            self.batch.batch_count(),
        )?;
        batch_error_stats(&errors, mask.len())
    }
}

impl<T: Scalar> Problem<T> for FeatureSelectProblem<T> {
    fn encoding_length(&self) -> usize {
        self.train.features()
    }

    fn batch_errors(&self, bits: &[bool], batches: usize) -> Vec<T> {
        feature_selection_error(bits, &self.train, &self.fitness_set, batches)
            .expect("mask width matches the dataset by construction")
    }

    fn batch_config(&self) -> BatchConfig {
        self.batch
    }

    fn name(&self) -> &str {
        "feature-selection"
    }
}

/// Deterministic separable dataset: each class owns a block of informative
/// coordinates whose means are far apart, remaining coordinates hover at 0.5
/// with tiny jitter. Nearest-centroid classification over any mask containing
/// an informative coordinate is exact.
pub fn synthetic_separable<T: Scalar, R: Rng + ?Sized>(
    classes: usize,
    per_class: usize,
    features: usize,
    informative: usize,
    rng: &mut R,
) -> Dataset<T> {
    assert!(classes >= 2 && per_class >= 1);
    assert!(informative >= 1 && informative <= features);
    let jitter = 0.01;
    let mut samples = Vec::with_capacity(classes * per_class);
    let mut labels = Vec::with_capacity(classes * per_class);
    for class in 0..classes {
        let level = 0.1 + 0.8 * class as f64 / (classes - 1) as f64;
        for _ in 0..per_class {
            let mut sample = Vec::with_capacity(features);
            for feature in 0..features {
                let value = if feature < informative {
                    level + jitter * (rng.random::<f64>() - 0.5)
                } else {
                    0.5 + jitter * (rng.random::<f64>() - 0.5)
                };
                sample.push(T::from_f64_lossy(value.clamp(0.0, 1.0)));
            }
            samples.push(sample);
            labels.push(class);
        }
    }
    Dataset::new(features, samples, labels).expect("generated shapes agree")
}
