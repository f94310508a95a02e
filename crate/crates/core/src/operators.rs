//! Genetic operators: tournament selection, quantum crossover and mutation,
//! elitism with opposition reflection, offspring generation, and environment
//! selection.
//!
//! Selection maximizes the score `1 - mean_error`; fitness statistics store
//! the error itself.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fitness::FitnessStats;
use crate::qubit::{BinaryChromosome, QuantumChromosome, Qubit, POLE_EPSILON};
use crate::scalar::Scalar;
use rand::Rng;

/// Mean errors closer than this compare as tied.
pub const MEAN_TIE_TOLERANCE: f64 = 1e-12;

/// A genotype with its last measured phenotype and, once evaluated, its
/// fitness statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual<T> {
    pub genotype: QuantumChromosome<T>,
    pub phenotype: BinaryChromosome,
    pub fitness: Option<FitnessStats<T>>,
    // Amplitudes at the phenotype's collapse: genes whose current amplitudes
    // still match keep their classical bit on the next measurement pass.
    collapse_ref: QuantumChromosome<T>,
}

impl<T: Scalar> Individual<T> {
    /// Measure a genotype into a fresh, unevaluated individual.
    pub fn from_measurement<R: Rng + ?Sized>(genotype: QuantumChromosome<T>, rng: &mut R) -> Self {
        let phenotype = genotype.measure(rng);
        Self {
            collapse_ref: genotype.clone(),
            genotype,
            phenotype,
            fitness: None,
        }
    }

    /// Pair an existing phenotype with its genotype.
    pub fn with_phenotype(genotype: QuantumChromosome<T>, phenotype: BinaryChromosome) -> Self {
        assert_eq!(
            genotype.len(),
            phenotype.len(),
            "phenotype length must match genotype"
        );
        Self {
            collapse_ref: genotype.clone(),
            genotype,
            phenotype,
            fitness: None,
        }
    }

    /// Lift a classical bitstring into an individual whose genotype is
    /// collapsed onto the bits (up to the pole clamp).
    pub fn from_bits(bits: &[bool]) -> Self {
        let qubits = bits
            .iter()
            .map(|&b| {
                let theta = if b {
                    T::half_pi() - T::from_f64_lossy(POLE_EPSILON)
                } else {
                    T::from_f64_lossy(POLE_EPSILON)
                };
                Qubit::from_theta(theta)
            })
            .collect();
        let genotype = QuantumChromosome::from_qubits(qubits);
        Self {
            collapse_ref: genotype.clone(),
            genotype,
            phenotype: BinaryChromosome::from_bits(bits.to_vec()),
            fitness: None,
        }
    }

    pub fn len(&self) -> usize {
        self.genotype.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genotype.is_empty()
    }

    /// Evaluated statistics; panics when called before evaluation.
    pub fn stats(&self) -> FitnessStats<T> {
        self.fitness.expect("individual has been evaluated")
    }

    /// Maximized score `1 - mean_error`; panics when called before evaluation.
    pub fn score(&self) -> T {
        self.stats().score()
    }

    /// Re-collapse every gene whose amplitudes changed since its last
    /// measurement (and every appended gene). Untouched genes keep their
    /// classical bit. Returns the number of re-collapsed genes.
    pub fn refresh_collapse<R: Rng + ?Sized>(&mut self, rng: &mut R) -> usize {
        let mut refreshed = 0;
        let len = self.genotype.len();
        let mut bits = self.phenotype.bits().to_vec();
        bits.resize(len, false);
        let mut reference = self.collapse_ref.qubits().to_vec();
        reference.resize(len, Qubit::uniform());
        let stale_tail = self.collapse_ref.len() < len || self.phenotype.len() < len;
        for g in 0..len {
            let current = self.genotype.get(g);
            let appended = g >= self.phenotype.len().min(self.collapse_ref.len());
            if current != reference[g] || (stale_tail && appended) {
                bits[g] = current.collapse(rng);
                reference[g] = current;
                refreshed += 1;
            }
        }
        if refreshed > 0 || stale_tail {
            self.phenotype = BinaryChromosome::from_bits(bits);
            self.collapse_ref = QuantumChromosome::from_qubits(reference);
            if refreshed > 0 {
                self.fitness = None;
            }
        }
        refreshed
    }

    /// Replace the genotype (e.g. after a rotation update) without touching
    /// the phenotype; changed genes re-collapse on the next refresh.
    pub fn set_genotype(&mut self, genotype: QuantumChromosome<T>) {
        self.genotype = genotype;
    }

    /// Lengthen the genotype to `new_length` with uniform genes appended.
    pub fn lengthen(&mut self, new_length: usize) -> Result<()> {
        self.genotype = self.genotype.resized(new_length)?;
        Ok(())
    }

    fn set_gene(&mut self, index: usize, qubit: Qubit<T>, bit: bool) {
        self.genotype.set(index, qubit);
        self.collapse_ref.set(index, qubit);
        self.phenotype.set(index, bit);
    }

    fn insert_gene(&mut self, index: usize, qubit: Qubit<T>, bit: bool) {
        self.genotype.insert(index, qubit);
        self.collapse_ref.insert(index, qubit);
        self.phenotype.insert(index, bit);
    }

    fn remove_gene(&mut self, index: usize) {
        self.genotype.remove(index);
        self.collapse_ref.remove(index);
        self.phenotype.remove(index);
    }

    fn swap_genes(&mut self, a: usize, b: usize) {
        self.genotype.qubits_mut().swap(a, b);
        self.collapse_ref.qubits_mut().swap(a, b);
        self.phenotype.bits_mut().swap(a, b);
    }

    /// Reverse the gene order over the inclusive range `[a, b]`.
    fn invert_range(&mut self, a: usize, b: usize) {
        let (mut lo, mut hi) = (a.min(b), a.max(b));
        while lo < hi {
            self.swap_genes(lo, hi);
            lo += 1;
            hi -= 1;
        }
    }

    /// Fisher-Yates shuffle of the inclusive range `[a, b]`.
    fn scramble_range<R: Rng + ?Sized>(&mut self, a: usize, b: usize, rng: &mut R) {
        let (lo, hi) = (a.min(b), a.max(b));
        for i in (lo + 1..=hi).rev() {
            let j = rng.random_range(lo..=i);
            self.swap_genes(i, j);
        }
    }

    /// Gene angles, for multiset-conservation checks.
    pub fn gene_angles(&self) -> Vec<T> {
        self.genotype.qubits().iter().map(|q| q.theta()).collect()
    }

    /// Largest normalization defect across the genotype.
    pub fn max_norm_defect(&self) -> T {
        self.genotype
            .qubits()
            .iter()
            .map(|q| q.norm_defect())
            .fold(T::zero(), T::max)
    }
}

/// Thresholds used by tournament and environment selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig<T> {
    /// Mean-score threshold in the top-rank tournament branch.
    pub mean_threshold: T,
    /// Parameter-count threshold in the tournament tie branch.
    pub param_threshold: usize,
    /// Mean-score threshold in environment-selection contests.
    pub env_epsilon: T,
    /// Fraction of the next population copied in as elites.
    pub elitism_fraction: T,
}

impl<T: Scalar> Default for SelectionConfig<T> {
    fn default() -> Self {
        Self {
            mean_threshold: T::from_f64_lossy(0.01),
            param_threshold: 5,
            env_epsilon: T::from_f64_lossy(0.01),
            elitism_fraction: T::from_f64_lossy(0.1),
        }
    }
}

impl<T: Scalar> SelectionConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.mean_threshold < T::zero() || self.env_epsilon < T::zero() {
            return Err(Error::InvalidParameter(
                "selection thresholds must be >= 0".into(),
            ));
        }
        if !(T::zero()..=T::one()).contains(&self.elitism_fraction) {
            return Err(Error::InvalidParameter(
                "elitism_fraction outside [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Ranking order: `Less` means `a` is the better individual.
/// Mean error decides (ties within `MEAN_TIE_TOLERANCE`), then standard
/// deviation, then parameter count; exact ties are `Equal` so stable sorts
/// break them by index.
pub fn compare_fitness<T: Scalar>(a: &FitnessStats<T>, b: &FitnessStats<T>) -> Ordering {
    let tie = T::from_f64_lossy(MEAN_TIE_TOLERANCE);
    if (a.mean_error - b.mean_error).abs() > tie {
        return a
            .mean_error
            .partial_cmp(&b.mean_error)
            .unwrap_or(Ordering::Equal);
    }
    if a.std_error != b.std_error {
        return a
            .std_error
            .partial_cmp(&b.std_error)
            .unwrap_or(Ordering::Equal);
    }
    a.param_count.cmp(&b.param_count)
}

/// Decide between two drawn tournament contestants. The special branch fires
/// only when the drawn pair occupies the top of the current ranking (no other
/// individual scores above either of them, ties within `MEAN_TIE_TOLERANCE`);
/// otherwise the winner is a uniform pick.
fn tournament_decide<T: Scalar, R: Rng + ?Sized>(
    population: &[Individual<T>],
    first: usize,
    second: usize,
    cfg: &SelectionConfig<T>,
    rng: &mut R,
) -> usize {
    let tie = T::from_f64_lossy(MEAN_TIE_TOLERANCE);
    let score_first = population[first].score();
    let score_second = population[second].score();
    let pair_floor = score_first.min(score_second);
    let pair_at_top = population
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != first && *k != second)
        .all(|(_, ind)| ind.score() <= pair_floor + tie);

    if pair_at_top {
        if score_first - score_second > cfg.mean_threshold {
            return first;
        }
        let stats_first = population[first].stats();
        let stats_second = population[second].stats();
        let param_gap = stats_first.param_count as i64 - stats_second.param_count as i64;
        if param_gap > cfg.param_threshold as i64 && stats_first.std_error > stats_second.std_error
        {
            return second;
        }
        first
    } else if rng.random::<bool>() {
        first
    } else {
        second
    }
}

/// Binary tournament returning the winner's index.
pub(crate) fn tournament_index<T: Scalar, R: Rng + ?Sized>(
    population: &[Individual<T>],
    cfg: &SelectionConfig<T>,
    rng: &mut R,
) -> Result<usize> {
    if population.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    if population.len() == 1 {
        return Ok(0);
    }
    let first = rng.random_range(0..population.len());
    let mut second = rng.random_range(0..population.len() - 1);
    if second >= first {
        second += 1;
    }
    Ok(tournament_decide(population, first, second, cfg, rng))
}

/// Binary tournament: draw two distinct individuals and return the winner.
pub fn binary_tournament<T: Scalar, R: Rng + ?Sized>(
    population: &[Individual<T>],
    cfg: &SelectionConfig<T>,
    rng: &mut R,
) -> Result<Individual<T>> {
    Ok(population[tournament_index(population, cfg, rng)?].clone())
}

/// Exchange the gene segments starting at `pos1`/`pos2` between two parents;
/// the shared segment length is `min(len_i - pos1, len_j - pos2)` so both
/// offspring keep their parent's length.
fn crossover_at<T: Scalar>(
    parent_i: &Individual<T>,
    parent_j: &Individual<T>,
    pos1: usize,
    pos2: usize,
) -> (Individual<T>, Individual<T>) {
    let mut a = parent_i.clone();
    let mut b = parent_j.clone();
    let span = (a.len() - pos1).min(b.len() - pos2);
    for k in 0..span {
        let (ga, gb) = (pos1 + k, pos2 + k);
        let qa = a.genotype.get(ga);
        let qb = b.genotype.get(gb);
        a.genotype.set(ga, qb);
        b.genotype.set(gb, qa);
        let ra = a.collapse_ref.get(ga);
        let rb = b.collapse_ref.get(gb);
        a.collapse_ref.set(ga, rb);
        b.collapse_ref.set(gb, ra);
        let ba = a.phenotype.get(ga);
        let bb = b.phenotype.get(gb);
        a.phenotype.set(ga, bb);
        b.phenotype.set(gb, ba);
    }
    a.fitness = None;
    b.fitness = None;
    (a, b)
}

fn offspring_valid<T: Scalar>(ind: &Individual<T>, parent_len: usize) -> bool {
    ind.len() == parent_len && ind.max_norm_defect() <= T::from_f64_lossy(1e-9)
}

/// Quantum crossover: with probability `p_crossover` exchange a random gene
/// segment (amplitude pairs move intact together with their measured bits);
/// invalid draws are retried up to 16 times before returning the parents
/// unchanged.
pub fn crossover<T: Scalar, R: Rng + ?Sized>(
    parent_i: &Individual<T>,
    parent_j: &Individual<T>,
    p_crossover: T,
    rng: &mut R,
) -> Result<(Individual<T>, Individual<T>)> {
    if parent_i.len() != parent_j.len() {
        return Err(Error::LengthMismatch {
            expected: parent_i.len(),
            got: parent_j.len(),
        });
    }
    if T::from_f64_lossy(rng.random::<f64>()) >= p_crossover {
        return Ok((parent_i.clone(), parent_j.clone()));
    }
    let len = parent_i.len();
    for _ in 0..16 {
        let pos1 = rng.random_range(0..len);
        let pos2 = rng.random_range(0..len);
        let (a, b) = crossover_at(parent_i, parent_j, pos1, pos2);
        if offspring_valid(&a, len) && offspring_valid(&b, len) {
            return Ok((a, b));
        }
    }
    Ok((parent_i.clone(), parent_j.clone()))
}

/// The mutation operator kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationOp {
    Addition,
    Remove,
    Modified,
    Swap,
    Inversion,
    Scramble,
}

/// Operator set for fixed-length encodings.
pub const FIXED_LENGTH_OPS: [MutationOp; 4] = [
    MutationOp::Modified,
    MutationOp::Swap,
    MutationOp::Inversion,
    MutationOp::Scramble,
];

/// Operator set for variable-length levels.
pub const VARIABLE_LENGTH_OPS: [MutationOp; 6] = [
    MutationOp::Addition,
    MutationOp::Remove,
    MutationOp::Modified,
    MutationOp::Swap,
    MutationOp::Inversion,
    MutationOp::Scramble,
];

fn random_pair<R: Rng + ?Sized>(len: usize, rng: &mut R) -> (usize, usize) {
    (rng.random_range(0..len), rng.random_range(0..len))
}

/// Per-gene mutation: with probability `mutation_rate` an operation drawn
/// uniformly from `allowed_ops` applies at random positions. Addition/Remove
/// respect `length_bounds` and are rejected outright in fixed-length mode
/// (equal bounds).
pub fn mutate<T: Scalar, R: Rng + ?Sized>(
    individual: &Individual<T>,
    mutation_rate: T,
    allowed_ops: &[MutationOp],
    length_bounds: (usize, usize),
    rng: &mut R,
) -> Result<Individual<T>> {
    if allowed_ops.is_empty() {
        return Err(Error::InvalidParameter(
            "allowed_ops must be non-empty".into(),
        ));
    }
    if !(T::zero()..=T::one()).contains(&mutation_rate) {
        return Err(Error::InvalidParameter(
            "mutation_rate outside [0, 1]".into(),
        ));
    }
    let (min_len, max_len) = length_bounds;
    if min_len == max_len
        && allowed_ops
            .iter()
            .any(|op| matches!(op, MutationOp::Addition | MutationOp::Remove))
    {
        return Err(Error::InvalidParameter(
            "Addition/Remove are excluded from fixed-length mode".into(),
        ));
    }

    let mut out = individual.clone();
    let mut fired = false;
    for _ in 0..individual.len() {
        if T::from_f64_lossy(rng.random::<f64>()) >= mutation_rate {
            continue;
        }
        let op = allowed_ops[rng.random_range(0..allowed_ops.len())];
        match op {
            MutationOp::Addition => {
                if out.len() < max_len {
                    let pos = rng.random_range(0..=out.len());
                    let qubit = Qubit::uniform();
                    let bit = qubit.collapse(rng);
                    out.insert_gene(pos, qubit, bit);
                    fired = true;
                }
            }
            MutationOp::Remove => {
                if out.len() > min_len {
                    let pos = rng.random_range(0..out.len());
                    out.remove_gene(pos);
                    fired = true;
                }
            }
            MutationOp::Modified => {
                let pos = rng.random_range(0..out.len());
                let lo = POLE_EPSILON;
                let hi = std::f64::consts::FRAC_PI_2 - POLE_EPSILON;
                let theta = lo + (hi - lo) * rng.random::<f64>();
                let qubit = Qubit::from_theta(T::from_f64_lossy(theta));
                let bit = qubit.collapse(rng);
                out.set_gene(pos, qubit, bit);
                fired = true;
            }
            MutationOp::Swap => {
                let (a, b) = random_pair(out.len(), rng);
                out.swap_genes(a, b);
                fired = true;
            }
            MutationOp::Inversion => {
                let (a, b) = random_pair(out.len(), rng);
                out.invert_range(a, b);
                fired = true;
            }
            MutationOp::Scramble => {
                let (a, b) = random_pair(out.len(), rng);
                out.scramble_range(a, b, rng);
                fired = true;
            }
        }
    }
    if fired {
        out.fitness = None;
    }
    Ok(out)
}

/// One non-negative weight per individual; elitism's working state.
#[derive(Debug, Clone, PartialEq)]
pub struct ElitismScores<T> {
    scores: Vec<T>,
}

impl<T: Scalar> ElitismScores<T> {
    pub fn new(scores: Vec<T>) -> Self {
        Self { scores }
    }

    /// Seed each weight from the individual's score `1 - mean_error`.
    pub fn from_stats(stats: &[FitnessStats<T>]) -> Self {
        Self {
            scores: stats.iter().map(FitnessStats::score).collect(),
        }
    }

    pub fn scores(&self) -> &[T] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Opposition reflection `s -> max + min - s`; an involution that swaps the
/// roles of the best and worst weights.
pub fn opposition_reflect<T: Scalar>(scores: &[T]) -> Vec<T> {
    let max = scores.iter().copied().fold(T::neg_infinity(), T::max);
    let min = scores.iter().copied().fold(T::infinity(), T::min);
    scores.iter().map(|&s| max + min - s).collect()
}

/// Elitism weight update: perturb one of a random pair toward the other
/// (scaled by a uniform draw, credited to the lower-deviation side), then
/// reflect the whole weight list. `best_index` is the argmax of the
/// reflected weights, first occurrence winning so duplicate weights are
/// considered once.
pub fn elitism_update<T: Scalar, R: Rng + ?Sized>(
    scores: &ElitismScores<T>,
    stds: &[T],
    rng: &mut R,
) -> Result<(ElitismScores<T>, usize)> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::PopulationTooSmall { needed: 2, got: n });
    }
    if stds.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: stds.len(),
        });
    }
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    let mut working = scores.scores.clone();
    let u = T::from_f64_lossy(rng.random::<f64>());
    let temp = (u * (working[j] - working[i])).abs();
    if stds[i] < stds[j] {
        working[i] += temp;
    } else {
        working[j] += temp;
    }
    let reflected = opposition_reflect(&working);
    let mut best_index = 0;
    for (k, &score) in reflected.iter().enumerate() {
        if score > reflected[best_index] {
            best_index = k;
        }
    }
    Ok((ElitismScores::new(reflected), best_index))
}

/// Wall-clock seconds spent inside the crossover and mutation operators of
/// one offspring pass.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct OffspringTiming {
    pub crossover: f64,
    pub mutation: f64,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn generate_offspring_timed<T: Scalar, R: Rng + ?Sized>(
    mating_pool: &[Individual<T>],
    p_crossover: T,
    mutation_rate: T,
    allowed_ops: &[MutationOp],
    length_bounds: (usize, usize),
    rng: &mut R,
) -> Result<(Vec<Individual<T>>, OffspringTiming)> {
    let mut pool: Vec<Individual<T>> = mating_pool.to_vec();
    let mut offspring = Vec::with_capacity(pool.len());
    let mut timing = OffspringTiming::default();
    while pool.len() >= 2 {
        let a = pool.swap_remove(rng.random_range(0..pool.len()));
        let b = pool.swap_remove(rng.random_range(0..pool.len()));
        // Parents from different lengthening levels skip recombination.
        let started = std::time::Instant::now();
        let (first, second) = if a.len() == b.len() {
            crossover(&a, &b, p_crossover, rng)?
        } else {
            (a.clone(), b.clone())
        };
        timing.crossover += started.elapsed().as_secs_f64();
        let started = std::time::Instant::now();
        let first = mutate(&first, mutation_rate, allowed_ops, length_bounds, rng)?;
        let second = mutate(&second, mutation_rate, allowed_ops, length_bounds, rng)?;
        timing.mutation += started.elapsed().as_secs_f64();
        let bounds_ok = |ind: &Individual<T>| {
            ind.len() >= length_bounds.0
                && ind.len() <= length_bounds.1
                && ind.max_norm_defect() <= T::from_f64_lossy(1e-9)
        };
        offspring.push(if bounds_ok(&first) { first } else { a.clone() });
        offspring.push(if bounds_ok(&second) {
            second
        } else {
            b.clone()
        });
    }
    Ok((offspring, timing))
}

/// Pair up the mating pool, apply crossover then mutation to every pair, and
/// collect the validated offspring. Odd pools drop the final unpaired member,
/// so the result holds `2 * floor(pool/2)` offspring.
#[allow(clippy::too_many_arguments)]
pub fn generate_offspring<T: Scalar, R: Rng + ?Sized>(
    population: &[Individual<T>],
    mating_pool: &[Individual<T>],
    p_crossover: T,
    mutation_rate: T,
    allowed_ops: &[MutationOp],
    length_bounds: (usize, usize),
    rng: &mut R,
) -> Result<Vec<Individual<T>>> {
    debug_assert!(mating_pool.len() <= population.len().max(mating_pool.len()));
    let (offspring, _) = generate_offspring_timed(
        mating_pool,
        p_crossover,
        mutation_rate,
        allowed_ops,
        length_bounds,
        rng,
    )?;
    Ok(offspring)
}

/// Pick `n` survivors from `union` by elite copying plus top-two contests;
/// returns indices into `union` in selection order.
pub(crate) fn environment_select_from_union<T: Scalar, R: Rng + ?Sized>(
    union: &[Individual<T>],
    cfg: &SelectionConfig<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if union.len() < n {
        return Err(Error::PopulationTooSmall {
            needed: n,
            got: union.len(),
        });
    }
    cfg.validate()?;
    let mut order: Vec<usize> = (0..union.len()).collect();
    order.sort_by(|&a, &b| compare_fitness(&union[a].stats(), &union[b].stats()));

    let elites = ((cfg.elitism_fraction * T::from_f64_lossy(n as f64))
        .round()
        .to_f64()
        .unwrap_or(0.0) as usize)
        .min(n);
    let mut selected: Vec<usize> = order[..elites].to_vec();
    let mut remaining: Vec<usize> = order[elites..].to_vec();

    while selected.len() < n {
        if remaining.len() == 1 {
            selected.push(remaining.remove(0));
            continue;
        }
        // remaining is score-sorted: the two highest-mean candidates lead it.
        let lead = union[remaining[0]].stats();
        let runner_up = union[remaining[1]].stats();
        let winner = if lead.score() - runner_up.score() > cfg.env_epsilon
            || lead.std_error < runner_up.std_error
        {
            0
        } else if runner_up.std_error < lead.std_error {
            1
        } else if rng.random::<bool>() {
            0
        } else {
            1
        };
        selected.push(remaining.remove(winner));
    }
    Ok(selected)
}

/// Survivor selection over `current` and `offspring`: the best
/// `round(elitism_fraction * n)` are copied in, remaining slots are filled by
/// repeated contests between the two highest-scoring remaining candidates
/// (score gap over `env_epsilon` wins, else the smaller deviation, else a
/// uniform pick). Exactly `n` distinct members are returned.
pub fn environment_select<T: Scalar, R: Rng + ?Sized>(
    current: &[Individual<T>],
    offspring: &[Individual<T>],
    cfg: &SelectionConfig<T>,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Individual<T>>> {
    let union: Vec<Individual<T>> = current.iter().chain(offspring).cloned().collect();
    let indices = environment_select_from_union(&union, cfg, n, rng)?;
    Ok(indices.into_iter().map(|i| union[i].clone()).collect())
}
