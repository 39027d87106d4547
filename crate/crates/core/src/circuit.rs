//! Segmented quantum programs over a fixed gate set.
//!
//! Segments are numbered from 1, so `s_1` is `program.segment(1)`. The cost of
//! testing segment `x` is the number of gates in `s_1..s_x`, see
//! [`QuantumProgram::prefix_cost`].

use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("program must have at least one qubit")]
    NoQubits,
    #[error("gate `{kind}` takes {expected} qubit(s), got {found}")]
    ArityMismatch {
        kind: GateKind,
        expected: usize,
        found: usize,
    },
    #[error("duplicate qubit index {qubit}")]
    DuplicateQubit { qubit: usize },
    #[error("qubit index {qubit} out of range for {qubit_count} qubit(s)")]
    QubitOutOfRange { qubit: usize, qubit_count: usize },
    #[error("segment {index} has no gates")]
    EmptySegment { index: usize },
    #[error("program needs at least 2 segments, found {found}")]
    TooFewSegments { found: usize },
    #[error("segment index {index} out of range 1..={segment_count}")]
    SegmentOutOfRange { index: usize, segment_count: usize },
    #[error("gate position {position} out of range for segment {index} with {gate_count} gate(s)")]
    GatePositionOutOfRange {
        index: usize,
        position: usize,
        gate_count: usize,
    },
    #[error("programs differ in qubit count or segmentation")]
    SegmentationMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum GateKind {
    H,
    X,
    Z,
    S,
    T,
    CX,
    CZ,
    CCX,
}

impl GateKind {
    pub const ALL: [GateKind; 8] = [
        GateKind::H,
        GateKind::X,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::CX,
        GateKind::CZ,
        GateKind::CCX,
    ];

    pub fn arity(self) -> usize {
        match self {
            GateKind::H | GateKind::X | GateKind::Z | GateKind::S | GateKind::T => 1,
            GateKind::CX | GateKind::CZ => 2,
            GateKind::CCX => 3,
        }
    }

    /// Lowercase name used in circuit files.
    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::CX => "cx",
            GateKind::CZ => "cz",
            GateKind::CCX => "ccx",
        }
    }

    pub fn from_mnemonic(name: &str) -> Option<Self> {
        GateKind::ALL.into_iter().find(|k| k.mnemonic() == name)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.mnemonic())
    }
}

/// A gate applied to `kind.arity()` distinct qubits.
///
/// For controlled gates the last qubit is the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    kind: GateKind,
    qubits: [usize; 3],
}

impl Gate {
    pub fn new(kind: GateKind, qubits: &[usize]) -> Result<Self, CircuitError> {
        if qubits.len() != kind.arity() {
            return Err(CircuitError::ArityMismatch {
                kind,
                expected: kind.arity(),
                found: qubits.len(),
            });
        }
        for (i, &q) in qubits.iter().enumerate() {
            if qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit { qubit: q });
            }
        }
        let mut stored = [0; 3];
        stored[..qubits.len()].copy_from_slice(qubits);
        Ok(Self {
            kind,
            qubits: stored,
        })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits[..self.kind.arity()]
    }

    /// Same qubits, different kind. Fails if the arities differ.
    pub fn with_kind(&self, kind: GateKind) -> Result<Self, CircuitError> {
        Gate::new(kind, self.qubits())
    }

    fn max_qubit(&self) -> usize {
        self.qubits().iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.mnemonic())?;
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[cfg(feature = "serde")]
mod gate_serde {
    use super::{Gate, GateKind};
    use alloc::vec::Vec;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct GateRepr {
        kind: GateKind,
        qubits: Vec<usize>,
    }

    impl Serialize for Gate {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            GateRepr {
                kind: self.kind,
                qubits: self.qubits().to_vec(),
            }
            .serialize(serializer)
        }
    }

    impl<'de> Deserialize<'de> for Gate {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            let repr = GateRepr::deserialize(deserializer)?;
            Gate::new(repr.kind, &repr.qubits).map_err(serde::de::Error::custom)
        }
    }
}

/// A contiguous block of gates, `s_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    index: usize,
    gates: Vec<Gate>,
}

impl Segment {
    /// 1-based position in the program.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// `g_x`, always at least 1.
    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// An ordered list of at least two non-empty segments over `qubit_count` qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumProgram {
    qubit_count: usize,
    segments: Vec<Segment>,
}

impl QuantumProgram {
    pub fn new(qubit_count: usize, segments: Vec<Vec<Gate>>) -> Result<Self, CircuitError> {
        if qubit_count == 0 {
            return Err(CircuitError::NoQubits);
        }
        if segments.len() < 2 {
            return Err(CircuitError::TooFewSegments {
                found: segments.len(),
            });
        }
        let mut built = Vec::with_capacity(segments.len());
        for (i, gates) in segments.into_iter().enumerate() {
            let index = i + 1;
            if gates.is_empty() {
                return Err(CircuitError::EmptySegment { index });
            }
            if let Some(g) = gates.iter().find(|g| g.max_qubit() >= qubit_count) {
                return Err(CircuitError::QubitOutOfRange {
                    qubit: g.max_qubit(),
                    qubit_count,
                });
            }
            built.push(Segment { index, gates });
        }
        Ok(Self {
            qubit_count,
            segments: built,
        })
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    /// `l`, the number of segments.
    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Segment `s_x` for `1 <= x <= l`.
    pub fn segment(&self, x: usize) -> Result<&Segment, CircuitError> {
        self.check_index(x)?;
        Ok(&self.segments[x - 1])
    }

    /// The vector `g_1..g_l`.
    pub fn gate_counts(&self) -> Vec<usize> {
        self.segments.iter().map(Segment::gate_count).collect()
    }

    /// `c_x = g_1 + … + g_x`: gates executed by one shot of the test of `s_x`.
    pub fn prefix_cost(&self, x: usize) -> Result<u64, CircuitError> {
        self.check_index(x)?;
        Ok(self.segments[..x]
            .iter()
            .map(|s| s.gate_count() as u64)
            .sum())
    }

    /// `c_1..c_l`.
    pub fn prefix_costs(&self) -> Vec<u64> {
        self.segments
            .iter()
            .scan(0u64, |acc, s| {
                *acc += s.gate_count() as u64;
                Some(*acc)
            })
            .collect()
    }

    pub fn total_gates(&self) -> u64 {
        self.segments.iter().map(|s| s.gate_count() as u64).sum()
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.segments.iter().flat_map(|s| s.gates.iter())
    }

    /// True when both programs have the same qubit count and gate counts per segment.
    pub fn same_shape(&self, other: &QuantumProgram) -> bool {
        self.qubit_count == other.qubit_count && self.gate_counts() == other.gate_counts()
    }

    /// Copy of the program with one gate swapped out.
    pub fn with_gate_replaced(
        &self,
        x: usize,
        position: usize,
        replacement: Gate,
    ) -> Result<QuantumProgram, CircuitError> {
        self.check_index(x)?;
        if replacement.max_qubit() >= self.qubit_count {
            return Err(CircuitError::QubitOutOfRange {
                qubit: replacement.max_qubit(),
                qubit_count: self.qubit_count,
            });
        }
        let mut out = self.clone();
        let gates = &mut out.segments[x - 1].gates;
        let slot = gates
            .get_mut(position)
            .ok_or(CircuitError::GatePositionOutOfRange {
                index: x,
                position,
                gate_count: self.segments[x - 1].gate_count(),
            })?;
        *slot = replacement;
        Ok(out)
    }

    fn check_index(&self, x: usize) -> Result<(), CircuitError> {
        if x == 0 || x > self.segments.len() {
            return Err(CircuitError::SegmentOutOfRange {
                index: x,
                segment_count: self.segments.len(),
            });
        }
        Ok(())
    }
}
