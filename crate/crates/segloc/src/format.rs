//! Plain-text circuit files.
//!
//! ```text
//! # comment
//! qubits 2
//! seg
//! h 0
//! h 1
//! seg
//! cz 0 1
//! ```
//!
//! One statement per line. `qubits <n>` comes first, `seg` opens a segment and
//! every gate line is `<kind> <qubit>...` with a lowercase mnemonic. `#`
//! starts a comment anywhere on a line.

use std::fmt::Write as _;

use segloc_core::{CircuitError, Gate, GateKind, QuantumProgram};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    /// 1-based; the last line for errors found at end of input.
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("expected `qubits <n>` before anything else")]
    MissingHeader,
    #[error("`qubits` given twice")]
    DuplicateHeader,
    #[error("invalid qubit count `{0}`")]
    BadQubitCount(String),
    #[error("gate outside of a segment; add `seg` first")]
    GateOutsideSegment,
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("invalid qubit index `{0}`")]
    BadQubitIndex(String),
    #[error("`{0}` takes no arguments")]
    UnexpectedArguments(&'static str),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

fn err(line: usize, kind: impl Into<ParseErrorKind>) -> ParseError {
    ParseError {
        line,
        kind: kind.into(),
    }
}

pub fn parse_program(text: &str) -> Result<QuantumProgram, ParseError> {
    let mut qubits: Option<usize> = None;
    // gates of each segment plus the line of its `seg`
    let mut segments: Vec<(usize, Vec<Gate>)> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(head) = words.next() else {
            continue;
        };
        let args: Vec<&str> = words.collect();

        if head == "qubits" {
            if qubits.is_some() {
                return Err(err(line, ParseErrorKind::DuplicateHeader));
            }
            let n = match args.as_slice() {
                [n] => n
                    .parse::<usize>()
                    .map_err(|_| err(line, ParseErrorKind::BadQubitCount(n.to_string())))?,
                _ => return Err(err(line, ParseErrorKind::BadQubitCount(args.join(" ")))),
            };
            if n == 0 {
                return Err(err(line, CircuitError::NoQubits));
            }
            qubits = Some(n);
            continue;
        }
        let Some(n) = qubits else {
            return Err(err(line, ParseErrorKind::MissingHeader));
        };
        if head == "seg" {
            if !args.is_empty() {
                return Err(err(line, ParseErrorKind::UnexpectedArguments("seg")));
            }
            if let Some((start, gates)) = segments.last() {
                if gates.is_empty() {
                    let index = segments.len();
                    return Err(err(*start, CircuitError::EmptySegment { index }));
                }
            }
            segments.push((line, Vec::new()));
            continue;
        }

        let kind = GateKind::from_mnemonic(head)
            .ok_or_else(|| err(line, ParseErrorKind::UnknownGate(head.to_string())))?;
        let qs = args
            .iter()
            .map(|a| {
                a.parse::<usize>()
                    .map_err(|_| err(line, ParseErrorKind::BadQubitIndex(a.to_string())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gate = Gate::new(kind, &qs).map_err(|e| err(line, e))?;
        if let Some(&q) = qs.iter().find(|&&q| q >= n) {
            return Err(err(
                line,
                CircuitError::QubitOutOfRange {
                    qubit: q,
                    qubit_count: n,
                },
            ));
        }
        match segments.last_mut() {
            Some((_, gates)) => gates.push(gate),
            None => return Err(err(line, ParseErrorKind::GateOutsideSegment)),
        }
    }

    let Some(n) = qubits else {
        return Err(err(last_line.max(1), ParseErrorKind::MissingHeader));
    };
    if let Some((start, gates)) = segments.last() {
        if gates.is_empty() {
            let index = segments.len();
            return Err(err(*start, CircuitError::EmptySegment { index }));
        }
    }
    QuantumProgram::new(n, segments.into_iter().map(|(_, g)| g).collect())
        .map_err(|e| err(last_line, e))
}

pub fn serialize_program(program: &QuantumProgram) -> String {
    let mut out = String::new();
    writeln!(out, "qubits {}", program.qubit_count()).unwrap();
    for segment in program.segments() {
        out.push_str("seg\n");
        for gate in segment.gates() {
            writeln!(out, "{gate}").unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_qubit_example() {
        let p = parse_program("qubits 2\nseg\nh 0\nh 1\nseg\ncz 0 1\n").unwrap();
        assert_eq!(p.qubit_count(), 2);
        assert_eq!(p.gate_counts(), vec![2, 1]);
        assert_eq!(parse_program(&serialize_program(&p)).unwrap(), p);
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header\n\nqubits 1  # one\nseg\n  h 0 # hadamard\nseg\nx 0\n";
        let p = parse_program(text).unwrap();
        assert_eq!(serialize_program(&p), "qubits 1\nseg\nh 0\nseg\nx 0\n");
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_program("qubits 1\nseg\nh 0\n").unwrap_err();
        assert_eq!(
            e.kind,
            ParseErrorKind::Circuit(CircuitError::TooFewSegments { found: 1 })
        );
        let e = parse_program("qubits 2\nseg\ncx 0 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(
            e.kind,
            ParseErrorKind::Circuit(CircuitError::DuplicateQubit { qubit: 0 })
        );
        let e = parse_program("seg\n").unwrap_err();
        assert_eq!((e.line, e.kind), (1, ParseErrorKind::MissingHeader));
        let e = parse_program("qubits 1\nh 0\n").unwrap_err();
        assert_eq!((e.line, e.kind), (2, ParseErrorKind::GateOutsideSegment));
        let e = parse_program("qubits 1\nseg\nseg\nh 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_program("qubits 1\nseg\nrx 0\nseg\nh 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownGate("rx".into()));
        let e = parse_program("qubits 2\nseg\nh 2\nseg\nh 0\n").unwrap_err();
        assert_eq!(e.line, 3);
        assert!(e.to_string().starts_with("line 3: "));
    }
}
