//! Qubit strategies under the first-zero exit rule.
//!
//! Qubit `i` is measured at intersection `i`. A 0 means exit, a 1 means
//! keep driving. Qubit 1 is the leftmost character of a basis string and
//! the most significant bit of the amplitude index.

use std::collections::HashSet;

use num_complex::Complex64;

use crate::classical::DestinationDistribution;
use crate::error::{Error, Result};
use crate::model::{DriveProblem, Probability};

/// Dense storage is used, so the qubit count is capped.
pub const MAX_QUBITS: usize = 20;

/// Tolerance on the norm accepted by [`build_state`] without rescaling.
pub const BUILD_NORM_TOLERANCE: f64 = 1e-6;
/// Tolerance on the squared norm of a stored state.
pub const STATE_NORM_TOLERANCE: f64 = 1e-9;

/// One ket of a state: a bit string and its amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisTerm {
    pub bits: String,
    pub amplitude: Complex64,
}

impl BasisTerm {
    pub fn new(bits: impl Into<String>, re: f64, im: f64) -> Self {
        BasisTerm { bits: bits.into(), amplitude: Complex64::new(re, im) }
    }

    pub fn real(bits: impl Into<String>, re: f64) -> Self {
        BasisTerm::new(bits, re, 0.0)
    }
}

/// Parses a basis string such as `"0110"` into its amplitude index.
pub fn parse_bits(bits: &str) -> Result<usize> {
    if bits.is_empty() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::BadBasisString(bits.to_string()));
    }
    if bits.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits(bits.len()));
    }
    Ok(bits.bytes().fold(0, |acc, b| (acc << 1) | usize::from(b == b'1')))
}

pub fn format_bits(index: usize, num_qubits: usize) -> String {
    (0..num_qubits).map(|q| if index >> (num_qubits - 1 - q) & 1 == 1 { '1' } else { '0' }).collect()
}

/// Destination (1-based) selected by the first-zero rule for a basis index.
pub fn first_zero_destination(index: usize, num_qubits: usize) -> usize {
    (0..num_qubits).find(|&q| index >> (num_qubits - 1 - q) & 1 == 0).map_or(num_qubits + 1, |q| q + 1)
}

/// `2^m` complex amplitudes with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Wraps raw amplitudes. The length must be a power of two and the
    /// squared norm must be within `1e-9` of one.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::DegenerateProblem);
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits(num_qubits));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidAmplitude("?".into()));
        }
        let state = StateVector { num_qubits, amplitudes };
        state.check_norm()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Non-zero amplitudes as basis terms, in index order.
    pub fn terms(&self) -> Vec<BasisTerm> {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(i, &a)| BasisTerm { bits: format_bits(i, self.num_qubits), amplitude: a })
            .collect()
    }

    /// `|amplitude|^2` for every basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Multiplies every amplitude by `phase`, which must have unit modulus.
    pub fn with_global_phase(&self, phase: Complex64) -> Result<Self> {
        StateVector::from_amplitudes(self.amplitudes.iter().map(|a| a * phase).collect())
    }

    fn check_norm(&self) -> Result<()> {
        let n = self.norm_sqr();
        if (n - 1.0).abs() > STATE_NORM_TOLERANCE {
            Err(Error::NotNormalized(n.sqrt()))
        } else {
            Ok(())
        }
    }
}

/// Builds a state from listed kets. Unlisted basis strings get amplitude 0.
///
/// With `normalize` the state is rescaled to unit norm. Without it, a norm
/// off by more than `1e-6` is rejected; smaller deviations are rescaled.
pub fn build_state(terms: &[BasisTerm], normalize: bool) -> Result<StateVector> {
    let first = terms.first().ok_or(Error::DegenerateProblem)?;
    let m = first.bits.len();
    parse_bits(&first.bits)?;

    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << m];
    let mut seen = HashSet::with_capacity(terms.len());
    for term in terms {
        let index = parse_bits(&term.bits)?;
        if term.bits.len() != m {
            return Err(Error::RaggedTerms { found: term.bits.clone(), expected: m });
        }
        if !seen.insert(index) {
            return Err(Error::DuplicateTerm(term.bits.clone()));
        }
        if !term.amplitude.re.is_finite() || !term.amplitude.im.is_finite() {
            return Err(Error::InvalidAmplitude(term.bits.clone()));
        }
        amplitudes[index] = term.amplitude;
    }

    let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    let norm = norm_sqr.sqrt();
    if !norm.is_finite() || norm == 0.0 {
        return Err(Error::NotNormalized(norm));
    }
    if !normalize && (norm - 1.0).abs() > BUILD_NORM_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    // Leave exact inputs bit-for-bit alone so canonical documents round-trip.
    if (norm_sqr - 1.0).abs() > 1e-12 {
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
    }
    StateVector::from_amplitudes(amplitudes)
}

/// `m`-fold tensor power of `sqrt(alpha)|0> + sqrt(1 - alpha)|1>`.
pub fn product_state(alpha: Probability, m: usize) -> Result<StateVector> {
    if m == 0 {
        return Err(Error::DegenerateProblem);
    }
    if m > MAX_QUBITS {
        return Err(Error::TooManyQubits(m));
    }
    let zero = alpha.get().sqrt();
    let one = (1.0 - alpha.get()).sqrt();
    let amplitudes = (0..1usize << m)
        .map(|index| {
            let ones = index.count_ones() as i32;
            Complex64::new(one.powi(ones) * zero.powi(m as i32 - ones), 0.0)
        })
        .collect();
    Ok(StateVector { num_qubits: m, amplitudes })
}

/// Destination distribution under the first-zero rule, summing
/// `|amplitude|^2` over the basis strings whose first 0 sits at each
/// position. The all-ones string goes to the terminal.
pub fn first_zero_distribution(state: &StateVector) -> Result<DestinationDistribution> {
    state.check_norm()?;
    let m = state.num_qubits;
    let norm = state.norm_sqr();
    let mut probs = vec![0.0; m + 1];
    for (index, a) in state.amplitudes.iter().enumerate() {
        probs[first_zero_destination(index, m) - 1] += a.norm_sqr() / norm;
    }
    DestinationDistribution::new(probs)
}

/// Destination distribution obtained by measuring one qubit at a time and
/// collapsing the state after each outcome of 1.
///
/// This follows the physical procedure step by step and does not share
/// code with [`first_zero_distribution`].
pub fn sequential_measurement_distribution(state: &StateVector) -> Result<DestinationDistribution> {
    state.check_norm()?;
    let m = state.num_qubits;
    let mut current: Vec<Complex64> = state.amplitudes.clone();
    let mut still_driving = 1.0;
    let mut probs = Vec::with_capacity(m + 1);

    for q in 0..m {
        let mask = 1usize << (m - 1 - q);
        let p_zero: f64 = current.iter().enumerate().filter(|(i, _)| i & mask == 0).map(|(_, a)| a.norm_sqr()).sum();
        let p_zero = p_zero.clamp(0.0, 1.0);
        probs.push(still_driving * p_zero);
        let p_one = 1.0 - p_zero;
        still_driving *= p_one;
        if p_one <= 0.0 {
            probs.resize(m + 1, 0.0);
            return DestinationDistribution::new(probs);
        }
        // Collapse onto "qubit q measured 1".
        let scale = p_one.sqrt();
        for (i, a) in current.iter_mut().enumerate() {
            *a = if i & mask == 0 { Complex64::new(0.0, 0.0) } else { *a / scale };
        }
    }
    probs.push(still_driving);
    DestinationDistribution::new(probs)
}

/// Expected payoff of a qubit strategy.
pub fn quantum_expected_payoff(problem: &DriveProblem, state: &StateVector) -> Result<f64> {
    if state.num_qubits() != problem.num_intersections() {
        return Err(Error::Mismatch { strategy: state.num_qubits(), problem: problem.num_intersections() });
    }
    first_zero_distribution(state)?.expectation(&problem.payoffs())
}
