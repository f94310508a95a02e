//! Quantum-inspired genetic algorithm engine.
//!
//! Candidate solutions are encoded as chromosomes of probability-amplitude
//! pairs (qubits). Measurement collapses a chromosome into a classical
//! bitstring, a table-driven rotation gate plus an amplitude boost pull the
//! population toward the best individual found so far, and quantum crossover
//! and mutation act on whole genes. Three drivers share the machinery:
//!
//! - [`engine::run_classical_ga`] — bitstring GA baseline,
//! - [`engine::run_qiga`] — fixed-length quantum-inspired GA,
//! - [`engine::run_dqiga`] — the dynamic variant that grows chromosomes
//!   through a lengthening schedule, carrying the best individual across
//!   levels.
//!
//! The problem suite ([`fitness`]) ships OneMax, 0/1 knapsack with an exact
//! dynamic-programming oracle, and feature-selection masks scored by a
//! nearest-centroid classifier.
//!
//! All numeric code is generic over the [`Scalar`] floating-point type;
//! concrete `f32`/`f64` aliases live at the crate root.

pub mod engine;
pub mod error;
pub mod fitness;
pub mod operators;
pub mod qubit;
pub mod rng;
pub mod rotation;
pub mod scalar;
pub mod schedule;

pub use engine::{
    run_classical_ga, run_dqiga, run_dqiga_observed, run_qiga, run_qiga_observed, EngineConfig,
    InitMode, LevelParams, RunResult,
};
pub use error::{Error, Result};
pub use fitness::{FitnessStats, Problem};
pub use operators::{Individual, SelectionConfig};
pub use qubit::{BinaryChromosome, QuantumChromosome, Qubit};
pub use rng::derive_substream;
pub use rotation::{RotationPolicy, TestCase};
pub use scalar::Scalar;
pub use schedule::LevelSchedule;

/// Single-precision aliases.
pub type Qubit32 = qubit::Qubit<f32>;
pub type QuantumChromosome32 = qubit::QuantumChromosome<f32>;
pub type FitnessStats32 = fitness::FitnessStats<f32>;
pub type Individual32 = operators::Individual<f32>;
pub type EngineConfig32 = engine::EngineConfig<f32>;
pub type RunResult32 = engine::RunResult<f32>;

/// Double-precision aliases; the benchmark CLI runs on these.
pub type Qubit64 = qubit::Qubit<f64>;
pub type QuantumChromosome64 = qubit::QuantumChromosome<f64>;
pub type FitnessStats64 = fitness::FitnessStats<f64>;
pub type Individual64 = operators::Individual<f64>;
pub type EngineConfig64 = engine::EngineConfig<f64>;
pub type RunResult64 = engine::RunResult<f64>;
