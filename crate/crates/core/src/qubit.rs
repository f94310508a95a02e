//! Qubit and chromosome representation.
//!
//! A gene is a pair of real, non-negative probability amplitudes `(alpha, beta)`
//! with `alpha^2 + beta^2 = 1`; `beta^2` is the probability of measuring bit 1.
//! The implied angle `theta = atan2(beta, alpha)` is kept inside
//! `[POLE_EPSILON, pi/2 - POLE_EPSILON]` so no gene ever collapses permanently.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use rand::Rng;

/// Pole clamp: the implied angle always stays this far away from 0 and pi/2.
pub const POLE_EPSILON: f64 = 1e-3;

/// Maximum tolerated deviation of `alpha^2 + beta^2` from 1 before
/// construction rejects the pair instead of renormalizing it.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// A two-amplitude gene. `alpha` weights basis state 0, `beta` basis state 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Qubit<T> {
    alpha: T,
    beta: T,
}

impl<T: Scalar> Qubit<T> {
    /// Build a qubit from amplitudes, renormalizing small deviations and
    /// clamping into the first quadrant away from the poles.
    ///
    /// Rejects `(0, 0)` and pairs whose squared sum deviates from 1 by more
    /// than `NORM_TOLERANCE`.
    pub fn new(alpha: T, beta: T) -> Result<Self> {
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::NonFinite);
        }
        let norm_squared = alpha * alpha + beta * beta;
        let deviation = (norm_squared - T::one()).abs();
        if norm_squared == T::zero() || deviation > T::from_f64_lossy(NORM_TOLERANCE) {
            return Err(Error::Normalization {
                norm_squared: norm_squared.to_f64().unwrap_or(f64::NAN),
            });
        }
        let scale = norm_squared.sqrt().recip();
        Ok(Self {
            alpha: (alpha * scale).abs(),
            beta: (beta * scale).abs(),
        }
        .pole_clamped())
    }

    /// The uniform superposition `(1/sqrt(2), 1/sqrt(2))`.
    pub fn uniform() -> Self {
        let amp = T::from_f64_lossy(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            alpha: amp,
            beta: amp,
        }
    }

    /// Build from an implied angle; the angle is clamped into
    /// `[POLE_EPSILON, pi/2 - POLE_EPSILON]` first.
    pub fn from_theta(theta: T) -> Self {
        let theta = clamp_theta(theta);
        Self {
            alpha: theta.cos(),
            beta: theta.sin(),
        }
    }

    /// Amplitude of basis state 0.
    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// Amplitude of basis state 1.
    pub fn beta(&self) -> T {
        self.beta
    }

    /// Implied angle `atan2(beta, alpha)` in `[POLE_EPSILON, pi/2 - POLE_EPSILON]`.
    pub fn theta(&self) -> T {
        self.beta.atan2(self.alpha)
    }

    /// Probability of measuring bit 1.
    pub fn prob_one(&self) -> T {
        self.beta * self.beta
    }

    /// Probability of measuring bit 0.
    pub fn prob_zero(&self) -> T {
        self.alpha * self.alpha
    }

    /// `|alpha^2 + beta^2 - 1|`, for invariant checks.
    pub fn norm_defect(&self) -> T {
        (self.alpha * self.alpha + self.beta * self.beta - T::one()).abs()
    }

    /// Collapse to a classical bit using one draw from `rng`.
    pub fn collapse<R: Rng + ?Sized>(&self, rng: &mut R) -> bool {
        let r = T::from_f64_lossy(rng.random::<f64>());
        r < self.prob_one()
    }

    fn pole_clamped(self) -> Self {
        let theta = self.theta();
        let clamped = clamp_theta(theta);
        if clamped == theta {
            self
        } else {
            Self {
                alpha: clamped.cos(),
                beta: clamped.sin(),
            }
        }
    }
}

fn clamp_theta<T: Scalar>(theta: T) -> T {
    let lo = T::from_f64_lossy(POLE_EPSILON);
    let hi = T::half_pi() - lo;
    theta.max(lo).min(hi)
}

/// An ordered list of qubit genes; the genotype.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumChromosome<T> {
    qubits: Vec<Qubit<T>>,
}

impl<T: Scalar> QuantumChromosome<T> {
    /// A chromosome of `length` uniform-superposition genes.
    pub fn uniform(length: usize) -> Self {
        assert!(length >= 1, "chromosomes hold at least one gene");
        Self {
            qubits: vec![Qubit::uniform(); length],
        }
    }

    /// A chromosome with angles drawn uniformly from the clamped range.
    pub fn random_angle<R: Rng + ?Sized>(length: usize, rng: &mut R) -> Self {
        assert!(length >= 1, "chromosomes hold at least one gene");
        let lo = POLE_EPSILON;
        let hi = std::f64::consts::FRAC_PI_2 - POLE_EPSILON;
        let qubits = (0..length)
            .map(|_| {
                let theta = lo + (hi - lo) * rng.random::<f64>();
                Qubit::from_theta(T::from_f64_lossy(theta))
            })
            .collect();
        Self { qubits }
    }

    pub fn from_qubits(qubits: Vec<Qubit<T>>) -> Self {
        assert!(!qubits.is_empty(), "chromosomes hold at least one gene");
        Self { qubits }
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubits(&self) -> &[Qubit<T>] {
        &self.qubits
    }

    pub fn qubits_mut(&mut self) -> &mut [Qubit<T>] {
        &mut self.qubits
    }

    pub fn get(&self, index: usize) -> Qubit<T> {
        self.qubits[index]
    }

    pub fn set(&mut self, index: usize, qubit: Qubit<T>) {
        self.qubits[index] = qubit;
    }

    pub fn insert(&mut self, index: usize, qubit: Qubit<T>) {
        self.qubits.insert(index, qubit);
    }

    pub fn remove(&mut self, index: usize) -> Qubit<T> {
        self.qubits.remove(index)
    }

    /// Non-destructive observation: draw one bit per gene
    /// (`bit = 1` when `r < beta^2`), leaving the amplitudes untouched.
    pub fn measure<R: Rng + ?Sized>(&self, rng: &mut R) -> BinaryChromosome {
        BinaryChromosome {
            bits: self.qubits.iter().map(|q| q.collapse(rng)).collect(),
        }
    }

    /// Lengthen to `new_length`, preserving existing genes in place and
    /// appending uniform genes. Shrinking is rejected.
    pub fn resized(&self, new_length: usize) -> Result<Self> {
        if new_length < self.len() {
            return Err(Error::ShrinkRejected {
                current: self.len(),
                requested: new_length,
            });
        }
        let mut qubits = self.qubits.clone();
        qubits.resize(new_length, Qubit::uniform());
        Ok(Self { qubits })
    }
}

/// A measured bitstring; the phenotype.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryChromosome {
    bits: Vec<bool>,
}

impl BinaryChromosome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bits_mut(&mut self) -> &mut [bool] {
        &mut self.bits
    }

    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    /// Bit at `index`, reading 0 past the end (zero-padded decode).
    pub fn get_padded(&self, index: usize) -> bool {
        self.bits.get(index).copied().unwrap_or(false)
    }

    pub fn set(&mut self, index: usize, bit: bool) {
        self.bits[index] = bit;
    }

    pub fn insert(&mut self, index: usize, bit: bool) {
        self.bits.insert(index, bit);
    }

    pub fn remove(&mut self, index: usize) -> bool {
        self.bits.remove(index)
    }

    /// Number of 1-bits.
    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// The bitstring zero-padded (or kept) to `length` entries. Shorter
    /// chromosomes decode to a full-width phenotype with an all-zero tail.
    pub fn padded(&self, length: usize) -> Vec<bool> {
        let mut bits = self.bits.clone();
        if bits.len() < length {
            bits.resize(length, false);
        }
        bits
    }
}
