//! Dense statevector simulation and Z-basis sampling.
//!
//! Basis-state index `j` encodes qubit `q` in bit `q` (qubit 0 is the least
//! significant bit).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::Rng;

use crate::circuit::{CircuitError, Gate, GateKind, QuantumProgram};

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    qubit_count: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `qubit_count` qubits.
    pub fn zero(qubit_count: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << qubit_count];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            qubit_count,
            amplitudes,
        }
    }

    /// Wraps raw amplitudes. Returns `None` unless the length is `2^n`.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Option<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return None;
        }
        Some(Self {
            qubit_count: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `Σ |a_j|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` in place. The gate's qubits must be `< qubit_count`.
    pub fn apply_gate(&mut self, gate: &Gate) {
        let q = gate.qubits();
        match gate.kind() {
            GateKind::H => {
                let bit = 1 << q[0];
                let s = FRAC_1_SQRT_2;
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 {
                        let a = self.amplitudes[i];
                        let b = self.amplitudes[i | bit];
                        self.amplitudes[i] = (a + b) * s;
                        self.amplitudes[i | bit] = (a - b) * s;
                    }
                }
            }
            GateKind::X => self.swap_where(0, 1 << q[0]),
            GateKind::Z => self.phase_where(1 << q[0], Complex64::new(-1.0, 0.0)),
            GateKind::S => self.phase_where(1 << q[0], Complex64::new(0.0, 1.0)),
            GateKind::T => {
                self.phase_where(1 << q[0], Complex64::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2))
            }
            GateKind::CX => self.swap_where(1 << q[0], 1 << q[1]),
            GateKind::CZ => self.phase_where((1 << q[0]) | (1 << q[1]), Complex64::new(-1.0, 0.0)),
            GateKind::CCX => self.swap_where((1 << q[0]) | (1 << q[1]), 1 << q[2]),
        }
    }

    pub fn apply_all<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for g in gates {
            self.apply_gate(g);
        }
    }

    /// Swaps `i` and `i | target` for every `i` with all `controls` set and the target clear.
    fn swap_where(&mut self, controls: usize, target: usize) {
        for i in 0..self.amplitudes.len() {
            if i & controls == controls && i & target == 0 {
                self.amplitudes.swap(i, i | target);
            }
        }
    }

    fn phase_where(&mut self, mask: usize, phase: Complex64) {
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// Z-basis outcome probabilities `p_j = |a_j|²`.
    pub fn exact_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `shots` independent Z-basis measurements of this state.
    pub fn sample_measurements<R: Rng + ?Sized>(
        &self,
        shots: u64,
        rng: &mut R,
    ) -> MeasurementHistogram {
        let dist = self.exact_distribution();
        let sampler = MeasurementSampler::new(&dist);
        let mut hist = MeasurementHistogram::empty(dist.len());
        sampler.sample_into(&mut hist, shots, rng);
        hist
    }
}

/// Runs `s_1..s_x` on `|0…0⟩`.
pub fn run_prefix(program: &QuantumProgram, x: usize) -> Result<Statevector, CircuitError> {
    program.segment(x)?;
    let mut state = Statevector::zero(program.qubit_count());
    for seg in &program.segments()[..x] {
        state.apply_all(seg.gates());
    }
    Ok(state)
}

/// Z-basis distributions of every prefix `s_1..s_x`, `x = 1..=l`.
///
/// One pass over the program; prefix `x` is the state after prefix `x - 1`
/// followed by segment `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixDistributions {
    distributions: Vec<Vec<f64>>,
}

impl PrefixDistributions {
    pub fn of(program: &QuantumProgram) -> Self {
        let mut state = Statevector::zero(program.qubit_count());
        let distributions = program
            .segments()
            .iter()
            .map(|seg| {
                state.apply_all(seg.gates());
                state.exact_distribution()
            })
            .collect();
        Self { distributions }
    }

    pub fn segment_count(&self) -> usize {
        self.distributions.len()
    }

    /// Distribution after `s_1..s_x`.
    pub fn prefix(&self, x: usize) -> Result<&[f64], CircuitError> {
        if x == 0 || x > self.distributions.len() {
            return Err(CircuitError::SegmentOutOfRange {
                index: x,
                segment_count: self.distributions.len(),
            });
        }
        Ok(&self.distributions[x - 1])
    }
}

/// Dense outcome counts over `2^n` basis states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementHistogram {
    counts: Vec<u64>,
    shots: u64,
}

impl MeasurementHistogram {
    pub fn empty(outcomes: usize) -> Self {
        Self {
            counts: vec![0; outcomes],
            shots: 0,
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let shots = counts.iter().sum();
        Self { counts, shots }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn record(&mut self, outcome: usize) {
        self.counts[outcome] += 1;
        self.shots += 1;
    }

    /// Observed relative frequencies; all zero for an empty histogram.
    pub fn frequencies(&self) -> Vec<f64> {
        if self.shots == 0 {
            return vec![0.0; self.counts.len()];
        }
        let m = self.shots as f64;
        self.counts.iter().map(|&c| c as f64 / m).collect()
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for MeasurementHistogram {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let nonzero = self.counts.iter().filter(|&&c| c > 0).count();
        let mut map = serializer.serialize_map(Some(nonzero))?;
        for (outcome, &count) in self.counts.iter().enumerate() {
            if count > 0 {
                map.serialize_entry(&outcome, &count)?;
            }
        }
        map.end()
    }
}

/// Inverse-CDF sampler over the outcomes with nonzero probability.
///
/// Zero-probability outcomes are never produced, even under rounding.
#[derive(Debug, Clone)]
pub struct MeasurementSampler {
    outcomes: Vec<usize>,
    cumulative: Vec<f64>,
    len: usize,
}

impl MeasurementSampler {
    pub fn new(distribution: &[f64]) -> Self {
        let mut outcomes = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for (j, &p) in distribution.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                outcomes.push(j);
                cumulative.push(acc);
            }
        }
        // normalize so the last bucket ends exactly at 1
        if let Some(total) = cumulative.last().copied() {
            for c in &mut cumulative {
                *c /= total;
            }
        }
        Self {
            outcomes,
            cumulative,
            len: distribution.len(),
        }
    }

    pub fn outcome_count(&self) -> usize {
        self.len
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.outcomes[i.min(self.outcomes.len() - 1)]
    }

    pub fn sample_into<R: Rng + ?Sized>(
        &self,
        hist: &mut MeasurementHistogram,
        shots: u64,
        rng: &mut R,
    ) {
        for _ in 0..shots {
            hist.record(self.sample(rng));
        }
    }
}

/// Half the L1 distance between two distributions.
pub fn total_variation_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| libm::fabs(a - b)).sum::<f64>()
}
