//! Rotation-gate update machinery.
//!
//! Each gene update is driven by three pieces: a *direction* (sign) looked up
//! from the 8-row table in `data/rotation_lookup.txt`, a *magnitude* from one
//! of three case formulas scaled by per-test-case constants, and a linearly
//! annealed per-epoch *cap*. The applied step is the signed minimum of
//! magnitude and cap. A separate amplitude-boost update pulls every gene
//! toward the best individual's bit.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::qubit::{BinaryChromosome, QuantumChromosome, Qubit};
use crate::scalar::Scalar;

/// Zero tolerance for quadrant classification and the direction determinant.
pub const ZERO_TOLERANCE: f64 = 1e-9;

/// The three shipped rotation test cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TestCase {
    T1,
    T2,
    T3,
}

impl TestCase {
    pub fn index(self) -> usize {
        match self {
            TestCase::T1 => 0,
            TestCase::T2 => 1,
            TestCase::T3 => 2,
        }
    }

    pub fn from_number(n: usize) -> Result<Self> {
        match n {
            1 => Ok(TestCase::T1),
            2 => Ok(TestCase::T2),
            3 => Ok(TestCase::T3),
            other => Err(Error::InvalidParameter(format!(
                "test case {other} not in 1..=3"
            ))),
        }
    }

    pub fn number(self) -> usize {
        self.index() + 1
    }
}

/// Rotation constants and angle bounds for one test case.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationPolicy<T> {
    pub test_case: TestCase,
    pub theta_min: T,
    pub theta_max: T,
    pub const_a: T,
    pub const_b: T,
    pub const_c: T,
    pub level_max: usize,
}

impl<T: Scalar> RotationPolicy<T> {
    /// Policy with the shipped constants for `test_case`:
    /// a = 1, b in {20, 25, 30}, c in {400, 500, 600}.
    pub fn for_test_case(
        test_case: TestCase,
        theta_min: T,
        theta_max: T,
        level_max: usize,
    ) -> Result<Self> {
        if !(theta_min > T::zero() && theta_min <= theta_max && theta_max <= T::half_pi()) {
            return Err(Error::InvalidParameter(format!(
                "angle bounds must satisfy 0 < theta_min <= theta_max <= pi/2, got [{theta_min}, {theta_max}]"
            )));
        }
        let (b, c) = match test_case {
            TestCase::T1 => (20.0, 400.0),
            TestCase::T2 => (25.0, 500.0),
            TestCase::T3 => (30.0, 600.0),
        };
        Ok(Self {
            test_case,
            theta_min,
            theta_max,
            const_a: T::one(),
            const_b: T::from_f64_lossy(b),
            const_c: T::from_f64_lossy(c),
            level_max,
        })
    }
}

/// Rotation direction decided by the angle determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Negative,
    Positive,
    /// Determinant is zero: the direction is unconstrained.
    Free,
}

/// A sign token from the lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignToken {
    Plus,
    Minus,
    Zero,
    /// Resolved at run time via the angle determinant.
    PlusMinus,
}

/// Magnitude case selecting which constant divides the raw step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagnitudeCase {
    Case1,
    Case2,
    Case3,
}

/// Quadrant column of the lookup table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrant {
    /// alpha * beta > 0 (the only reachable column after clamping).
    BothPositive,
    /// alpha * beta < 0.
    OppositeSigns,
    AlphaZero,
    BetaZero,
}

/// One row of the lookup table, keyed by `(x_bit, b_bit, fx_ge_fb)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupRow {
    pub x_bit: bool,
    pub b_bit: bool,
    pub fx_ge_fb: bool,
    /// Sign token per quadrant column (outer) and test case (inner).
    pub signs: [[SignToken; 3]; 4],
    /// Magnitude case per test case; `None` marks a no-rotation cell.
    pub magnitude: [Option<MagnitudeCase>; 3],
}

/// The 8-row dispatch table parsed from `data/rotation_lookup.txt`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LookupTable {
    rows: Vec<LookupRow>,
}

impl LookupTable {
    pub fn rows(&self) -> &[LookupRow] {
        &self.rows
    }

    pub fn row(&self, x_bit: bool, b_bit: bool, fx_ge_fb: bool) -> Result<&LookupRow> {
        self.rows
            .iter()
            .find(|r| r.x_bit == x_bit && r.b_bit == b_bit && r.fx_ge_fb == fx_ge_fb)
            .ok_or(Error::UnknownLookupKey)
    }
}

const LOOKUP_SOURCE: &str = include_str!("../data/rotation_lookup.txt");

/// The bundled lookup table.
pub fn lookup_table() -> &'static LookupTable {
    static TABLE: OnceLock<LookupTable> = OnceLock::new();
    TABLE.get_or_init(|| parse_lookup_table(LOOKUP_SOURCE).expect("bundled lookup table parses"))
}

fn parse_sign(token: &str) -> Result<SignToken> {
    match token {
        "+" => Ok(SignToken::Plus),
        "-" => Ok(SignToken::Minus),
        "0" => Ok(SignToken::Zero),
        "±" => Ok(SignToken::PlusMinus),
        other => Err(Error::InvalidParameter(format!(
            "unknown sign token {other:?}"
        ))),
    }
}

fn parse_magnitude(token: &str) -> Result<Option<MagnitudeCase>> {
    match token {
        "d1" => Ok(Some(MagnitudeCase::Case1)),
        "d2" => Ok(Some(MagnitudeCase::Case2)),
        "d3" => Ok(Some(MagnitudeCase::Case3)),
        "0" | "-" => Ok(None),
        other => Err(Error::InvalidParameter(format!(
            "unknown magnitude token {other:?}"
        ))),
    }
}

fn parse_bit(token: &str) -> Result<bool> {
    match token {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(Error::InvalidParameter(format!(
            "unknown bit token {other:?}"
        ))),
    }
}

fn parse_triplet<V, F: Fn(&str) -> Result<V>>(cell: &str, parse: F) -> Result<[V; 3]> {
    let mut parts = cell.split(',');
    let a = parse(parts.next().unwrap_or(""))?;
    let b = parse(parts.next().unwrap_or(""))?;
    let c = parse(parts.next().unwrap_or(""))?;
    if parts.next().is_some() {
        return Err(Error::InvalidParameter(format!(
            "cell {cell:?} holds more than 3 entries"
        )));
    }
    Ok([a, b, c])
}

fn parse_lookup_table(source: &str) -> Result<LookupTable> {
    let mut rows = Vec::with_capacity(8);
    for line in source.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let sections: Vec<&str> = line.split('|').map(str::trim).collect();
        if sections.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "expected 4 |-separated sections, got {} in {line:?}",
                sections.len()
            )));
        }
        let key: Vec<&str> = sections[0].split_whitespace().collect();
        if key.len() != 3 {
            return Err(Error::InvalidParameter(format!(
                "bad key section {:?}",
                sections[0]
            )));
        }
        let quadrant_cells: Vec<&str> = sections[1].split_whitespace().collect();
        if quadrant_cells.len() != 4 {
            return Err(Error::InvalidParameter(format!(
                "bad sign section {:?}",
                sections[1]
            )));
        }
        let mut signs = [[SignToken::Zero; 3]; 4];
        for (q, cell) in quadrant_cells.iter().enumerate() {
            signs[q] = parse_triplet(cell, parse_sign)?;
        }
        rows.push(LookupRow {
            x_bit: parse_bit(key[0])?,
            b_bit: parse_bit(key[1])?,
            fx_ge_fb: match key[2] {
                "T" => true,
                "F" => false,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown flag token {other:?}"
                    )))
                }
            },
            signs,
            magnitude: parse_triplet(sections[2], parse_magnitude)?,
        });
        // sections[3] carries the cited-rule notes; informational only.
    }
    if rows.len() != 8 {
        return Err(Error::InvalidParameter(format!(
            "expected 8 rows, parsed {}",
            rows.len()
        )));
    }
    Ok(LookupTable { rows })
}

/// The planar rotation matrix `[[cos, -sin], [sin, cos]]`.
pub fn rotation_matrix<T: Scalar>(theta: T) -> [[T; 2]; 2] {
    let (sin, cos) = (theta.sin(), theta.cos());
    [[cos, -sin], [sin, cos]]
}

/// Rotate a qubit's amplitude vector by `signed_delta`, then clamp back into
/// the first quadrant away from the poles.
pub fn apply_rotation<T: Scalar>(q: Qubit<T>, signed_delta: T) -> Qubit<T> {
    if signed_delta == T::zero() {
        return q;
    }
    let (sin, cos) = (signed_delta.sin(), signed_delta.cos());
    let alpha = q.alpha() * cos - q.beta() * sin;
    let beta = q.alpha() * sin + q.beta() * cos;
    // atan2 maps the rotated vector back to an angle; from_theta clamps it.
    Qubit::from_theta(beta.atan2(alpha))
}

/// Decide the rotation direction from the two angles' determinant
/// `D = sin(theta_j - theta_i)`.
pub fn rotation_direction<T: Scalar>(theta_i: T, theta_j: T) -> Direction {
    let delta = theta_j - theta_i;
    let determinant = delta.sin();
    if determinant.abs() <= T::from_f64_lossy(ZERO_TOLERANCE) {
        Direction::Free
    } else if delta.abs() <= T::pi() {
        Direction::Negative
    } else {
        Direction::Positive
    }
}

/// The per-epoch rotation cap, annealed linearly from `theta_max` at epoch 0
/// down to `theta_min` at `epoch == reps`. Endpoints are exact.
pub fn annealed_cap<T: Scalar>(policy: &RotationPolicy<T>, epoch: usize, reps: usize) -> T {
    debug_assert!(reps >= 1 && epoch <= reps);
    if epoch == 0 {
        return policy.theta_max;
    }
    if epoch >= reps {
        return policy.theta_min;
    }
    let span = policy.theta_max - policy.theta_min;
    let fraction = T::from_f64_lossy(epoch as f64 / reps as f64);
    policy.theta_max - span * fraction
}

/// Raw (unsigned) rotation magnitude for one case: the remaining angular
/// distance to the target pole divided by the case constant.
pub fn magnitude<T: Scalar>(
    policy: &RotationPolicy<T>,
    case: MagnitudeCase,
    theta: T,
    target_bit: bool,
) -> T {
    let branch = if target_bit {
        T::half_pi() - theta
    } else {
        theta
    };
    let constant = match case {
        MagnitudeCase::Case1 => policy.const_a,
        MagnitudeCase::Case2 => policy.const_b,
        MagnitudeCase::Case3 => policy.const_c,
    };
    (branch / constant).abs()
}

fn classify_quadrant<T: Scalar>(q: &Qubit<T>) -> Quadrant {
    let tol = T::from_f64_lossy(ZERO_TOLERANCE);
    if q.alpha().abs() <= tol {
        Quadrant::AlphaZero
    } else if q.beta().abs() <= tol {
        Quadrant::BetaZero
    } else if q.alpha() * q.beta() > T::zero() {
        Quadrant::BothPositive
    } else {
        Quadrant::OppositeSigns
    }
}

fn quadrant_index(q: Quadrant) -> usize {
    match q {
        Quadrant::BothPositive => 0,
        Quadrant::OppositeSigns => 1,
        Quadrant::AlphaZero => 2,
        Quadrant::BetaZero => 3,
    }
}

/// Resolve the rotation sign and magnitude case for one gene.
///
/// `best_theta` is the remembered angle of the best individual's gene at this
/// position; it feeds the determinant rule when the table cell reads `±`
/// (the determinant-zero case resolves to +1).
pub fn lookup<T: Scalar>(
    x_bit: bool,
    b_bit: bool,
    fx_ge_fb: bool,
    q: &Qubit<T>,
    best_theta: T,
    policy: &RotationPolicy<T>,
) -> Result<(i8, Option<MagnitudeCase>)> {
    let row = lookup_table().row(x_bit, b_bit, fx_ge_fb)?;
    let tc = policy.test_case.index();
    let token = row.signs[quadrant_index(classify_quadrant(q))][tc];
    let sign = match token {
        SignToken::Plus => 1,
        SignToken::Minus => -1,
        SignToken::Zero => 0,
        SignToken::PlusMinus => match rotation_direction(q.theta(), best_theta) {
            Direction::Negative => -1,
            Direction::Positive | Direction::Free => 1,
        },
    };
    Ok((sign, row.magnitude[tc]))
}

/// Apply one table-driven rotation update to a gene.
///
/// The applied step is `sign * min(case magnitude, annealed cap)`; rows whose
/// sign or magnitude cell is empty leave the gene untouched.
#[allow(clippy::too_many_arguments)]
pub fn rotate_gene<T: Scalar>(
    q: Qubit<T>,
    x_bit: bool,
    b_bit: bool,
    fx_ge_fb: bool,
    best_theta: T,
    policy: &RotationPolicy<T>,
    epoch: usize,
    reps: usize,
) -> Result<Qubit<T>> {
    let (sign, case) = lookup(x_bit, b_bit, fx_ge_fb, &q, best_theta, policy)?;
    let Some(case) = case else { return Ok(q) };
    if sign == 0 {
        return Ok(q);
    }
    let raw = magnitude(policy, case, q.theta(), b_bit);
    let cap = annealed_cap(policy, epoch, reps);
    let step = raw.min(cap);
    let signed = if sign < 0 { -step } else { step };
    Ok(apply_rotation(q, signed))
}

/// Amplitude boost toward `best_bit`: the non-matching amplitude is scaled by
/// `c` and the matching one rebuilt as `sqrt(1 - k)`, so normalization is
/// exact by construction.
pub fn boost_best<T: Scalar>(q: Qubit<T>, best_bit: bool, c: T) -> Result<Qubit<T>> {
    if !(T::zero()..=T::one()).contains(&c) {
        return Err(Error::InvalidParameter(format!(
            "boost factor {c} outside [0, 1]"
        )));
    }
    if c == T::one() {
        return Ok(q);
    }
    let (alpha, beta) = if best_bit {
        let alpha = q.alpha() * c;
        (alpha, (T::one() - alpha * alpha).sqrt())
    } else {
        let beta = q.beta() * c;
        ((T::one() - beta * beta).sqrt(), beta)
    };
    // new() renormalizes within tolerance and applies the pole clamp.
    Qubit::new(alpha, beta)
}

/// Rotate and boost every gene of every individual toward the best
/// individual's bits.
///
/// `best_bits` and `best_thetas` must agree in length. Genes beyond the
/// best's length are left untouched: the best individual carries no evidence
/// about genes it does not have, so freshly lengthened genes keep exploring.
#[allow(clippy::too_many_arguments)]
pub fn update_population<T: Scalar>(
    population: &[QuantumChromosome<T>],
    best_bits: &BinaryChromosome,
    best_thetas: &[T],
    binaries: &[BinaryChromosome],
    fitness_flags: &[bool],
    policy: &RotationPolicy<T>,
    epoch: usize,
    reps: usize,
    c: T,
) -> Result<Vec<QuantumChromosome<T>>> {
    if binaries.len() != population.len() {
        return Err(Error::LengthMismatch {
            expected: population.len(),
            got: binaries.len(),
        });
    }
    if fitness_flags.len() != population.len() {
        return Err(Error::LengthMismatch {
            expected: population.len(),
            got: fitness_flags.len(),
        });
    }
    if best_thetas.len() != best_bits.len() {
        return Err(Error::LengthMismatch {
            expected: best_bits.len(),
            got: best_thetas.len(),
        });
    }

    let mut updated = Vec::with_capacity(population.len());
    for (i, chromosome) in population.iter().enumerate() {
        if binaries[i].len() != chromosome.len() {
            return Err(Error::LengthMismatch {
                expected: chromosome.len(),
                got: binaries[i].len(),
            });
        }
        let guided = chromosome.len().min(best_bits.len());
        let mut qubits = Vec::with_capacity(chromosome.len());
        #[allow(clippy::needless_range_loop)] // four parallel per-gene reads
        for g in 0..guided {
            let rotated = rotate_gene(
                chromosome.get(g),
                binaries[i].get(g),
                best_bits.get(g),
                fitness_flags[i],
                best_thetas[g],
                policy,
                epoch,
                reps,
            )?;
            qubits.push(boost_best(rotated, best_bits.get(g), c)?);
        }
        for g in guided..chromosome.len() {
            qubits.push(chromosome.get(g));
        }
        updated.push(QuantumChromosome::from_qubits(qubits));
    }
    Ok(updated)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubit::POLE_EPSILON;
    use crate::rng::derive_substream;
    use proptest::prelude::*;
    use rand::Rng;

    fn policy_t1() -> RotationPolicy<f64> {
        RotationPolicy::for_test_case(
            TestCase::T1,
            0.001 * std::f64::consts::PI,
            0.08 * std::f64::consts::PI,
            4,
        )
        .unwrap()
    }

    fn policy(tc: TestCase) -> RotationPolicy<f64> {
        RotationPolicy::for_test_case(
            tc,
            0.001 * std::f64::consts::PI,
            0.08 * std::f64::consts::PI,
            4,
        )
        .unwrap()
    }

    #[test]
    fn matrix_identity_and_quarter_turn() {
        let m = rotation_matrix(0.0f64);
        assert_eq!(m, [[1.0, -0.0], [0.0, 1.0]]);
        let q = rotation_matrix(std::f64::consts::FRAC_PI_2);
        let (x, y) = (q[0][0] * 1.0 + q[0][1] * 0.0, q[1][0] * 1.0 + q[1][1] * 0.0);
        assert!(x.abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_is_orthogonal() {
        let m = rotation_matrix(0.3f64);
        let dot = |r: [f64; 2], c: [f64; 2]| r[0] * c[0] + r[1] * c[1];
        let col0 = [m[0][0], m[1][0]];
        let col1 = [m[0][1], m[1][1]];
        assert!((dot(col0, col0) - 1.0).abs() < 1e-12);
        assert!((dot(col1, col1) - 1.0).abs() < 1e-12);
        assert!(dot(col0, col1).abs() < 1e-12);
    }

    #[test]
    fn apply_rotation_examples() {
        let q = Qubit::<f64>::new(0.6, 0.8).unwrap();
        assert_eq!(apply_rotation(q, 0.0), q);

        let q = Qubit::<f64>::from_theta(std::f64::consts::FRAC_PI_4);
        let rotated = apply_rotation(q, 0.05 * std::f64::consts::PI);
        assert!(
            (rotated.theta() - (std::f64::consts::FRAC_PI_4 + 0.05 * std::f64::consts::PI)).abs()
                < 1e-12
        );

        let near_pole = Qubit::<f64>::from_theta(std::f64::consts::FRAC_PI_2 - POLE_EPSILON);
        let clamped = apply_rotation(near_pole, 0.1);
        assert!((clamped.theta() - (std::f64::consts::FRAC_PI_2 - POLE_EPSILON)).abs() < 1e-12);
    }

    #[test]
    fn direction_examples() {
        assert_eq!(rotation_direction(0.3f64, 0.3), Direction::Free);
        assert_eq!(rotation_direction(0.1f64, 0.4), Direction::Negative);
        assert_eq!(
            rotation_direction(0.1f64, 0.1 + 1.2 * std::f64::consts::PI),
            Direction::Positive
        );
    }

    #[test]
    fn annealed_cap_endpoints_exact() {
        let p = policy_t1();
        assert_eq!(annealed_cap(&p, 0, 100), p.theta_max);
        assert_eq!(annealed_cap(&p, 100, 100), p.theta_min);
        let mid = annealed_cap(&p, 50, 100);
        assert!((mid - 0.0405 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn magnitude_examples() {
        let p = policy_t1();
        let m1 = magnitude(&p, MagnitudeCase::Case1, 0.3, true);
        assert!((m1 - (std::f64::consts::FRAC_PI_2 - 0.3)).abs() < 1e-12);

        let p3 = policy(TestCase::T2);
        let m3 = magnitude(&p3, MagnitudeCase::Case3, 0.3, false);
        assert!((m3 - 0.3 / 500.0).abs() < 1e-15);

        let near_pole = std::f64::consts::FRAC_PI_2 - POLE_EPSILON;
        let m = magnitude(&p, MagnitudeCase::Case1, near_pole, true);
        assert!(m < 2.0 * POLE_EPSILON);
    }

    #[test]
    fn lookup_matches_cited_rows() {
        let q = Qubit::<f64>::uniform();
        let p = policy_t1();
        // Row 4: x=0, b=1, f(x)>=f(b) under T1.
        let (sign, case) = lookup(false, true, true, &q, q.theta(), &p).unwrap();
        assert_eq!((sign, case), (-1, Some(MagnitudeCase::Case2)));
        // Row 1: x=0, b=0, worse-than-best under T1 has an all-zero sign row.
        let (sign, case) = lookup(false, false, false, &q, q.theta(), &p).unwrap();
        assert_eq!(sign, 0);
        assert_eq!(case, None);
        // Row 6: x=1, b=0, f(x)>=f(b) under T1.
        let (sign, case) = lookup(true, false, true, &q, q.theta(), &p).unwrap();
        assert_eq!((sign, case), (1, Some(MagnitudeCase::Case3)));
    }

    #[test]
    fn lookup_transcription_is_cell_exact() {
        use MagnitudeCase::*;
        use SignToken::{Minus as M, Plus as P, PlusMinus as PM, Zero as Z};
        let t = lookup_table();
        assert_eq!(t.rows().len(), 8);
        let expected = [
            (
                false,
                false,
                false,
                [[Z, M, M], [Z, P, P], [Z, PM, PM], [Z, PM, Z]],
                [None, Some(Case1), Some(Case1)],
            ),
            (
                false,
                false,
                true,
                [[Z, M, M], [Z, P, P], [Z, PM, PM], [Z, PM, Z]],
                [None, Some(Case1), Some(Case1)],
            ),
            (
                false,
                true,
                false,
                [[Z, M, P], [Z, P, P], [Z, PM, Z], [Z, PM, PM]],
                [None, Some(Case3), Some(Case1)],
            ),
            (
                false,
                true,
                true,
                [[M, M, M], [P, P, P], [PM, PM, PM], [Z, PM, Z]],
                [Some(Case2), Some(Case2), Some(Case1)],
            ),
            (
                true,
                false,
                false,
                [[M, P, M], [P, M, M], [PM, PM, PM], [Z, PM, Z]],
                [Some(Case1), Some(Case1), Some(Case1)],
            ),
            (
                true,
                false,
                true,
                [[P, P, P], [M, M, P], [Z, PM, Z], [PM, PM, PM]],
                [Some(Case3), Some(Case3), Some(Case1)],
            ),
            (
                true,
                true,
                false,
                [[P, P, P], [M, M, P], [Z, PM, Z], [PM, PM, PM]],
                [Some(Case1), Some(Case1), Some(Case1)],
            ),
            (
                true,
                true,
                true,
                [[P, P, P], [M, M, M], [Z, PM, Z], [PM, PM, PM]],
                [Some(Case3), Some(Case1), Some(Case1)],
            ),
        ];
        for (x, b, f, signs, mags) in expected {
            let row = t.row(x, b, f).unwrap();
            assert_eq!(row.signs, signs, "sign cells for ({x}, {b}, {f})");
            assert_eq!(row.magnitude, mags, "magnitude cells for ({x}, {b}, {f})");
        }
    }

    #[test]
    fn rotate_gene_examples() {
        let p = policy_t1();
        let q = Qubit::<f64>::uniform();
        // Matching bits with a zero sign cell leave the gene untouched.
        let out = rotate_gene(q, false, false, false, q.theta(), &p, 0, 100).unwrap();
        assert_eq!(out, q);

        // Case-1 raw magnitude is capped by the annealed bound at epoch 0.
        let q = Qubit::<f64>::from_theta(0.3);
        let out = rotate_gene(
            q,
            false,
            true,
            false,
            q.theta(),
            &policy(TestCase::T3),
            0,
            100,
        )
        .unwrap();
        let applied = (out.theta() - q.theta()).abs();
        assert!((applied - 0.08 * std::f64::consts::PI).abs() < 1e-12);

        // At the anneal endpoint the applied step cannot exceed theta_min.
        let out = rotate_gene(
            q,
            false,
            true,
            false,
            q.theta(),
            &policy(TestCase::T3),
            100,
            100,
        )
        .unwrap();
        let applied = (out.theta() - q.theta()).abs();
        assert!(applied <= 0.001 * std::f64::consts::PI + 1e-15);
    }

    #[test]
    fn boost_examples() {
        let q = Qubit::<f64>::new(0.6, 0.8).unwrap();
        assert_eq!(boost_best(q, true, 1.0).unwrap(), q);

        let boosted = boost_best(q, true, 0.5).unwrap();
        assert!((boosted.alpha() - 0.3).abs() < 1e-12);
        assert!((boosted.beta() - 0.91f64.sqrt()).abs() < 1e-12);

        let collapsed = boost_best(q, false, 0.0).unwrap();
        assert!((collapsed.theta() - POLE_EPSILON).abs() < 1e-12);
        assert!(collapsed.alpha() > 0.999);

        assert!(boost_best(q, true, 1.5).is_err());
    }

    #[test]
    fn boost_normalization_is_exact() {
        let mut rng = derive_substream(3, 1, 4);
        for _ in 0..1000 {
            let q = Qubit::<f64>::from_theta(rng.random::<f64>() * std::f64::consts::FRAC_PI_2);
            let c = rng.random::<f64>();
            let out = boost_best(q, rng.random::<bool>(), c).unwrap();
            assert!(out.norm_defect() <= 4.0 * f64::EPSILON);
        }
    }

    #[test]
    fn update_population_boost_only_drift_for_best_clones() {
        // All-zero best and clones of it: lookup row 1/2 sign cells are zero
        // under T1, so only the boost moves amplitudes.
        let p = policy_t1();
        let genotype = QuantumChromosome::<f64>::uniform(8);
        let population = vec![genotype.clone(); 4];
        let bits = BinaryChromosome::from_bits(vec![false; 8]);
        let binaries = vec![bits.clone(); 4];
        let thetas: Vec<f64> = genotype.qubits().iter().map(|q| q.theta()).collect();
        let updated = update_population(
            &population,
            &bits,
            &thetas,
            &binaries,
            &[true; 4],
            &p,
            0,
            100,
            0.9,
        )
        .unwrap();
        for chromosome in &updated {
            for (g, qubit) in chromosome.qubits().iter().enumerate() {
                let expected = boost_best(genotype.get(g), false, 0.9).unwrap();
                assert_eq!(*qubit, expected);
            }
        }
    }

    #[test]
    fn update_population_identity_composition() {
        // c = 1 plus all-zero sign rows: the population comes back unchanged.
        let p = policy_t1();
        let genotype = QuantumChromosome::<f64>::uniform(6);
        let population = vec![genotype.clone(); 3];
        let bits = BinaryChromosome::from_bits(vec![false; 6]);
        let binaries = vec![bits.clone(); 3];
        let thetas = vec![std::f64::consts::FRAC_PI_4; 6];
        let updated = update_population(
            &population,
            &bits,
            &thetas,
            &binaries,
            &[false; 3],
            &p,
            5,
            100,
            1.0,
        )
        .unwrap();
        assert_eq!(updated, population);
    }

    #[test]
    fn update_population_converges_on_fixed_best() {
        // 200 updates toward a fixed best collapse measurement onto its bits.
        let p = policy(TestCase::T3);
        let best_bits = BinaryChromosome::from_bits(vec![true, false, true, false, true, true]);
        let best_thetas: Vec<f64> = best_bits
            .bits()
            .iter()
            .map(|&b| {
                if b {
                    std::f64::consts::FRAC_PI_2 - POLE_EPSILON
                } else {
                    POLE_EPSILON
                }
            })
            .collect();
        let mut population = vec![QuantumChromosome::<f64>::uniform(6); 3];
        let mut rng = derive_substream(9, 0, 0);
        for epoch in 0..200 {
            let binaries: Vec<BinaryChromosome> =
                population.iter().map(|c| c.measure(&mut rng)).collect();
            population = update_population(
                &population,
                &best_bits,
                &best_thetas,
                &binaries,
                &[false; 3],
                &p,
                epoch.min(199),
                200,
                0.95,
            )
            .unwrap();
        }
        for chromosome in &population {
            for (g, qubit) in chromosome.qubits().iter().enumerate() {
                let p_best = if best_bits.get(g) {
                    qubit.prob_one()
                } else {
                    qubit.prob_zero()
                };
                assert!(
                    p_best >= 0.99,
                    "gene {g} best-bit probability {p_best} < 0.99"
                );
            }
        }
    }

    #[test]
    fn update_population_rejects_misaligned_lists() {
        let p = policy_t1();
        let population = vec![QuantumChromosome::<f64>::uniform(4); 2];
        let bits = BinaryChromosome::from_bits(vec![false; 4]);
        let err = update_population(
            &population,
            &bits,
            &[0.5; 4],
            std::slice::from_ref(&bits),
            &[true; 2],
            &p,
            0,
            10,
            0.9,
        );
        assert!(matches!(err, Err(Error::LengthMismatch { .. })));
    }

    proptest! {
        #[test]
        fn matrix_orthogonality_many_angles(theta in -10.0f64..10.0) {
            let m = rotation_matrix(theta);
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            prop_assert!((det - 1.0).abs() < 1e-12);
            let dot = m[0][0] * m[0][1] + m[1][0] * m[1][1];
            prop_assert!(dot.abs() < 1e-12);
        }

        #[test]
        fn rotation_composes_additively(
            theta in 0.1f64..1.4,
            a in -0.05f64..0.05,
            b in -0.05f64..0.05,
        ) {
            // Away from the clamp boundaries composition is additive.
            let q = Qubit::<f64>::from_theta(theta);
            let stepwise = apply_rotation(apply_rotation(q, a), b);
            let joint = apply_rotation(q, a + b);
            prop_assert!((stepwise.theta() - joint.theta()).abs() < 1e-9);
            prop_assert!(stepwise.norm_defect() < 1e-9);
        }

        #[test]
        fn anneal_is_monotone_and_bounded(reps in 1usize..500, seed in 0u64..100) {
            let p = policy_t1();
            let mut rng = derive_substream(seed, 0, 0);
            let a = rng.random_range(0..=reps);
            let b = rng.random_range(0..=reps);
            let (lo, hi) = (a.min(b), a.max(b));
            let cap_lo = annealed_cap(&p, hi, reps);
            let cap_hi = annealed_cap(&p, lo, reps);
            prop_assert!(cap_lo <= cap_hi + 1e-15);
            prop_assert!(cap_lo >= p.theta_min - 1e-15 && cap_hi <= p.theta_max + 1e-15);
        }

        #[test]
        fn direction_swap_never_positive_within_pi(
            theta_i in 0.0f64..std::f64::consts::FRAC_PI_2,
            delta in 1e-6f64..std::f64::consts::PI,
        ) {
            // For |delta| in (0, pi], neither argument order yields Positive;
            // exactly pi degenerates to Free.
            let theta_j = theta_i + delta;
            prop_assert_ne!(rotation_direction(theta_i, theta_j), Direction::Positive);
            prop_assert_ne!(rotation_direction(theta_j, theta_i), Direction::Positive);
            prop_assert_eq!(
                rotation_direction(theta_i, theta_i + std::f64::consts::PI),
                Direction::Free
            );
        }

        #[test]
        fn rotate_gene_preserves_normalization(
            theta in 0.002f64..1.56,
            x in any::<bool>(),
            b in any::<bool>(),
            flag in any::<bool>(),
            epoch in 0usize..100,
            tc in 0usize..3,
        ) {
            let p = policy([TestCase::T1, TestCase::T2, TestCase::T3][tc]);
            let q = Qubit::<f64>::from_theta(theta);
            let out = rotate_gene(q, x, b, flag, q.theta(), &p, epoch, 100).unwrap();
            prop_assert!(out.norm_defect() <= 1e-9);
        }

        #[test]
        fn convergence_pressure_toward_best(
            theta in 0.1f64..1.4,
            x in any::<bool>(),
            b in any::<bool>(),
        ) {
            // Worse-than-best genes never move away from the best bit under T1.
            let p = policy_t1();
            let q = Qubit::<f64>::from_theta(theta);
            let (sign, _) = lookup(x, b, false, &q, q.theta(), &p).unwrap();
            prop_assume!(sign != 0);
            let out = rotate_gene(q, x, b, false, q.theta(), &p, 0, 100).unwrap();
            let before = if b { q.prob_one() } else { q.prob_zero() };
            let after = if b { out.prob_one() } else { out.prob_zero() };
            prop_assert!(after >= before - 1e-12, "best-bit probability fell {before} -> {after}");
        }
    }
}
