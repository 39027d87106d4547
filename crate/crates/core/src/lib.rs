//! Locating the buggy segment of a segmented quantum program.
//!
//! A program is split into segments `s_1..s_l`. Testing segment `s_x` means
//! executing `s_1..s_x` from `|0…0⟩`, measuring in the Z basis and comparing
//! the histogram with the expected distribution. Testing later segments is
//! therefore more expensive, a detected deviation only proves a bug somewhere
//! in the executed prefix, and verdicts are statistical.
//!
//! The crate provides:
//!
//! - [`circuit`]: programs, segments, gates and prefix costs.
//! - [`sim`]: dense statevector simulation and seeded Z-basis sampling.
//! - [`stats`]: chi-square tails, quantiles and noncentral power.
//! - [`segment_test`]: the adaptive shot-escalating segment test.
//! - [`search_tree`]: the cost-balanced binary search tree.
//! - [`locator`]: cost-based search with early determination, finalization
//!   and looking back, plus naive linear and naive binary baselines.
//! - [`return_analysis`]: the approximate posterior of having to return to a
//!   node.
//! - [`mutation`]: random program generation and gate-replacement bugs.
//!
//! The crate is `no_std` and needs only `alloc`. Qubit 0 is the least
//! significant bit of a basis-state index.

#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod circuit;
pub mod locator;
pub mod mutation;
pub mod return_analysis;
pub mod search_tree;
pub mod sim;
pub mod stats;

pub use circuit::{CircuitError, Gate, GateKind, QuantumProgram, Segment};
pub use locator::{
    Direction, Edge, FailureReason, LocateResult, LocatorConfig, Method, SearchTrace, TestPurpose,
    TestRecord,
};
pub use search_tree::{NodeId, SearchNode, SearchTree, SplitRule};
pub use segment_test::{
    Decision, ExactTester, SegmentTester, StatisticalTester, TestMode, TestThresholds, TestVerdict,
};
pub use sim::{MeasurementHistogram, PrefixDistributions, Statevector};
