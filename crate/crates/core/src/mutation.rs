//! Random programs and gate-replacement bugs with Z-basis ground truth.

use alloc::vec::Vec;
use core::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::circuit::{CircuitError, Gate, GateKind, QuantumProgram};
use crate::sim::{total_variation_distance, PrefixDistributions};

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct GenSpec {
    pub qubit_count: usize,
    pub segment_count: usize,
    pub gates_per_segment: RangeInclusive<usize>,
    pub seed: u64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            qubit_count: 5,
            segment_count: 8,
            gates_per_segment: 4..=8,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenSpecError {
    #[error("qubit count must be at least 1")]
    NoQubits,
    #[error("segment count must be at least 2")]
    TooFewSegments,
    #[error("gates per segment must be a nonempty range starting at 1 or more")]
    BadGateRange,
}

impl GenSpec {
    pub fn validate(&self) -> Result<(), GenSpecError> {
        if self.qubit_count == 0 {
            return Err(GenSpecError::NoQubits);
        }
        if self.segment_count < 2 {
            return Err(GenSpecError::TooFewSegments);
        }
        if self.gates_per_segment.is_empty() || *self.gates_per_segment.start() == 0 {
            return Err(GenSpecError::BadGateRange);
        }
        Ok(())
    }
}

/// Uniform gate kind among those that fit on `qubit_count` qubits, on uniform
/// distinct qubits.
pub fn random_gate<R: Rng + ?Sized>(qubit_count: usize, rng: &mut R) -> Gate {
    let kinds: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() <= qubit_count)
        .collect();
    let kind = *kinds.choose(rng).expect("single-qubit kinds always fit");
    let mut qubits: Vec<usize> = (0..qubit_count).collect();
    let (chosen, _) = qubits.partial_shuffle(rng, kind.arity());
    Gate::new(kind, chosen).expect("distinct qubits of matching arity")
}

/// Program with a uniform gate count per segment and uniform random gates.
pub fn generate_program<R: Rng + ?Sized>(
    spec: &GenSpec,
    rng: &mut R,
) -> Result<QuantumProgram, GenSpecError> {
    spec.validate()?;
    let segments = (0..spec.segment_count)
        .map(|_| {
            let n = rng.random_range(spec.gates_per_segment.clone());
            (0..n).map(|_| random_gate(spec.qubit_count, rng)).collect()
        })
        .collect();
    Ok(QuantumProgram::new(spec.qubit_count, segments).expect("spec was validated"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InjectedBug {
    /// Segment the gate was replaced in.
    pub segment: usize,
    /// Position of the gate within that segment, from 0.
    pub gate_position: usize,
    pub original: Gate,
    pub replacement: Gate,
    /// Earliest prefix whose Z-basis distribution visibly deviates.
    pub ground_truth_segment: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InjectError {
    #[error("no visible bug after {attempts} attempt(s)")]
    Exhausted { attempts: usize },
}

/// Earliest `x` whose prefix distributions differ by more than `delta` in
/// total variation, or `None` if the bug is invisible in the Z basis.
pub fn ground_truth_segment(
    reference: &PrefixDistributions,
    mutant: &PrefixDistributions,
    delta: f64,
) -> Option<usize> {
    (1..=reference.segment_count()).find(|&x| {
        let a = reference.prefix(x).expect("in range");
        let b = mutant.prefix(x).expect("in range");
        total_variation_distance(a, b) > delta
    })
}

/// Replaces one gate and computes the ground truth. `None` if the change is
/// invisible at every prefix.
pub fn apply_mutation(
    program: &QuantumProgram,
    reference: &PrefixDistributions,
    segment: usize,
    gate_position: usize,
    replacement: Gate,
    delta: f64,
) -> Result<Option<(QuantumProgram, InjectedBug)>, CircuitError> {
    let original = *program.segment(segment)?.gates().get(gate_position).ok_or(
        CircuitError::GatePositionOutOfRange {
            index: segment,
            position: gate_position,
            gate_count: program.segment(segment)?.gate_count(),
        },
    )?;
    let mutant = program.with_gate_replaced(segment, gate_position, replacement)?;
    let dists = PrefixDistributions::of(&mutant);
    Ok(ground_truth_segment(reference, &dists, delta).map(|x| {
        (
            mutant,
            InjectedBug {
                segment,
                gate_position,
                original,
                replacement,
                ground_truth_segment: x,
            },
        )
    }))
}

/// One attempt: uniform segment and gate, replaced by a different gate of the
/// same arity on the same qubits. `None` if rejected (no alternative kind,
/// or the change is invisible).
pub fn try_inject_bug<R: Rng + ?Sized>(
    program: &QuantumProgram,
    reference: &PrefixDistributions,
    rng: &mut R,
    delta: f64,
) -> Option<(QuantumProgram, InjectedBug)> {
    let segment = rng.random_range(1..=program.segment_count());
    let gates = program.segment(segment).ok()?.gates();
    let gate_position = rng.random_range(0..gates.len());
    let original = gates[gate_position];
    let alternatives: Vec<GateKind> = GateKind::ALL
        .into_iter()
        .filter(|k| k.arity() == original.kind().arity() && *k != original.kind())
        .collect();
    let kind = *alternatives.choose(rng)?;
    let replacement = original.with_kind(kind).ok()?;
    apply_mutation(
        program,
        reference,
        segment,
        gate_position,
        replacement,
        delta,
    )
    .ok()
    .flatten()
}

/// Retries [`try_inject_bug`] up to `max_attempts` times.
pub fn inject_bug<R: Rng + ?Sized>(
    program: &QuantumProgram,
    rng: &mut R,
    delta: f64,
    max_attempts: usize,
) -> Result<(QuantumProgram, InjectedBug), InjectError> {
    let reference = PrefixDistributions::of(program);
    (0..max_attempts)
        .find_map(|_| try_inject_bug(program, &reference, rng, delta))
        .ok_or(InjectError::Exhausted {
            attempts: max_attempts,
        })
}
