//! Locating the first buggy segment.
//!
//! [`locate_with`] walks a [`SearchTree`] using relaxed ("early") tests and
//! backs them up in two ways:
//!
//! - **Finalization.** At leaf `s_x`, `s_{x-1}` must test clean and `s_x` must
//!   test buggy, both at sufficient accuracy.
//! - **Looking back.** When the last `k` edges of the path share a direction,
//!   the most recent edge of the opposite direction is re-tested at sufficient
//!   accuracy, unless it is already confirmed.
//!
//! A sufficient verdict that disagrees with a node's early verdict pins the
//! node to the sufficient result and restarts the descent from the root.
//! Verdicts are cached per node, so a restart only measures nodes it has not
//! visited before. A node can only be pinned once, which bounds the number of
//! restarts by the number of internal nodes.
//!
//! [`linear_search`] and [`naive_binary_search`] are the baselines: every test
//! is at sufficient accuracy and none of the strategies above apply.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::circuit::{CircuitError, QuantumProgram};
use crate::search_tree::{NodeId, SearchTree};
use crate::segment_test::{
    Decision, SegmentTester, StatisticalTester, TestMode, TestThresholds, TestVerdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Direction {
    /// Bug detected in the executed sequence.
    L,
    /// No bug detected.
    R,
}

impl Direction {
    fn of(decision: Decision) -> Option<Self> {
        match decision {
            Decision::Bug => Some(Direction::L),
            Decision::NoBug => Some(Direction::R),
            Decision::Inconclusive => None,
        }
    }
}

/// One step of a descent, `e_i^{d_i}`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Edge {
    pub node: NodeId,
    pub direction: Direction,
    /// The verdict the direction was taken from.
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub verdict: TestVerdict,
    /// Backed by a sufficient-accuracy verdict.
    pub confirmed: bool,
    /// Overridden by a sufficient-accuracy verdict after a contradiction.
    pub pinned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TestPurpose {
    Descent,
    LookBack,
    Finalization,
    /// A step of the naive linear scan.
    Scan,
    /// A node of the naive binary search.
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TestRecord {
    pub purpose: TestPurpose,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub verdict: TestVerdict,
}

#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchTrace {
    /// Edges of the last descent.
    pub path: Vec<Edge>,
    /// Every test performed, in order.
    pub tests: Vec<TestRecord>,
    pub restarts: usize,
    pub lookbacks: usize,
    /// Sum of `gates_executed` over `tests`.
    pub total_gates: u64,
}

impl SearchTrace {
    fn record(&mut self, purpose: TestPurpose, verdict: TestVerdict) {
        self.total_gates += verdict.gates_executed;
        self.tests.push(TestRecord { purpose, verdict });
    }

    pub fn total_shots(&self) -> u64 {
        self.tests.iter().map(|t| t.verdict.shots_used).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Method {
    CostBinary,
    NaiveBinary,
    Linear,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::CostBinary, Method::NaiveBinary, Method::Linear];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum FailureReason {
    #[error("test of segment {segment} reached the shot limit")]
    Inconclusive { segment: usize },
    #[error("no segment tested buggy")]
    NoBugDetected,
    #[error("restart limit exceeded")]
    RestartLimit,
    #[error("sufficient verdicts on segment {segment} contradict each other")]
    ConflictingVerdicts { segment: usize },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LocateResult {
    pub method: Method,
    pub located_segment: Option<usize>,
    pub failure: Option<FailureReason>,
    pub trace: SearchTrace,
    /// Set by whoever knows the ground truth.
    pub success: bool,
}

impl LocateResult {
    fn finish(method: Method, outcome: Result<usize, FailureReason>, trace: SearchTrace) -> Self {
        let (located_segment, failure) = match outcome {
            Ok(x) => (Some(x), None),
            Err(f) => (None, Some(f)),
        };
        Self {
            method,
            located_segment,
            failure,
            trace,
            success: false,
        }
    }

    /// Sets `success` against the true buggy segment.
    pub fn judge(&mut self, ground_truth: usize) {
        self.success = self.located_segment == Some(ground_truth);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(default, deny_unknown_fields)
)]
pub struct LocatorConfig {
    /// Same-direction edges in a row that trigger looking back; 0 disables it.
    pub lookback_run_length: usize,
    pub thresholds: TestThresholds,
    /// Defaults to the segment count.
    pub max_restarts: Option<usize>,
    /// Optional cap on shots over a whole search.
    pub shot_budget: Option<u64>,
}

impl Default for LocatorConfig {
    fn default() -> Self {
        Self {
            lookback_run_length: 3,
            thresholds: TestThresholds::default(),
            max_restarts: None,
            shot_budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct NodeState {
    direction: Direction,
    verdict: TestVerdict,
    confirmed: bool,
    pinned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Settled {
    Agree,
    Contradiction,
}

struct CostSearch<'a, T: ?Sized> {
    tester: &'a mut T,
    tree: &'a SearchTree,
    config: &'a LocatorConfig,
    node_of_segment: Vec<Option<NodeId>>,
    states: Vec<Option<NodeState>>,
    sufficient: BTreeMap<usize, TestVerdict>,
    trace: SearchTrace,
}

impl<T: SegmentTester + ?Sized> CostSearch<'_, T> {
    fn run(&mut self) -> Result<usize, FailureReason> {
        let max_restarts = self
            .config
            .max_restarts
            .unwrap_or(self.tree.segment_count());
        'descent: loop {
            self.trace.path.clear();
            let mut id = self.tree.root();
            loop {
                let node = self.tree.node(id);
                let Some(x) = node.middle else {
                    match self.finalize(node.lo)? {
                        Settled::Agree => return Ok(node.lo),
                        Settled::Contradiction => {
                            self.restart(max_restarts)?;
                            continue 'descent;
                        }
                    }
                };
                let state = self.early_state(id, x)?;
                self.trace.path.push(Edge {
                    node: id,
                    direction: state.direction,
                    verdict: state.verdict,
                    confirmed: state.confirmed,
                    pinned: state.pinned,
                });
                if let Some(target) = self.lookback_target() {
                    self.trace.lookbacks += 1;
                    let segment = self.trace.path[target].verdict.segment;
                    let verdict = self.sufficient_verdict(segment, TestPurpose::LookBack)?;
                    if self.reconcile(segment, verdict) == Settled::Contradiction {
                        self.restart(max_restarts)?;
                        continue 'descent;
                    }
                }
                id = match state.direction {
                    Direction::L => node.left,
                    Direction::R => node.right,
                }
                .expect("internal node has children");
            }
        }
    }

    fn restart(&mut self, max_restarts: usize) -> Result<(), FailureReason> {
        self.trace.restarts += 1;
        if self.trace.restarts > max_restarts {
            return Err(FailureReason::RestartLimit);
        }
        Ok(())
    }

    fn early_state(&mut self, id: NodeId, x: usize) -> Result<NodeState, FailureReason> {
        if let Some(state) = self.states[id.0] {
            return Ok(state);
        }
        let (verdict, confirmed) = match self.sufficient.get(&x) {
            Some(v) => (*v, true),
            None => {
                let v = self.tester.test(x, TestMode::Early);
                self.trace.record(TestPurpose::Descent, v);
                (v, false)
            }
        };
        let direction =
            Direction::of(verdict.decision).ok_or(FailureReason::Inconclusive { segment: x })?;
        let state = NodeState {
            direction,
            verdict,
            confirmed,
            pinned: false,
        };
        self.states[id.0] = Some(state);
        Ok(state)
    }

    /// Index in the path of the edge to look back to, if any.
    fn lookback_target(&self) -> Option<usize> {
        let k = self.config.lookback_run_length;
        let path = &self.trace.path;
        if k == 0 || path.len() < k {
            return None;
        }
        let last = path[path.len() - 1].direction;
        let run_start = path.len() - k;
        if path[run_start..].iter().any(|e| e.direction != last) {
            return None;
        }
        let target = path[..run_start]
            .iter()
            .rposition(|e| e.direction != last)?;
        (!path[target].confirmed).then_some(target)
    }

    /// Sufficient-accuracy verdict for `x`, measured at most once per search.
    fn sufficient_verdict(
        &mut self,
        x: usize,
        purpose: TestPurpose,
    ) -> Result<TestVerdict, FailureReason> {
        if let Some(v) = self.sufficient.get(&x) {
            return Ok(*v);
        }
        let v = self.tester.test(x, TestMode::Sufficient);
        self.trace.record(purpose, v);
        if v.decision == Decision::Inconclusive {
            return Err(FailureReason::Inconclusive { segment: x });
        }
        self.sufficient.insert(x, v);
        Ok(v)
    }

    /// Brings the node testing `x` in line with a sufficient verdict.
    fn reconcile(&mut self, x: usize, verdict: TestVerdict) -> Settled {
        let Some(id) = self.node_of_segment.get(x).copied().flatten() else {
            return Settled::Agree;
        };
        let Some(state) = self.states[id.0].as_mut() else {
            return Settled::Agree;
        };
        let direction = Direction::of(verdict.decision).expect("decisive verdict");
        let settled = if state.direction == direction {
            state.confirmed = true;
            Settled::Agree
        } else {
            *state = NodeState {
                direction,
                verdict,
                confirmed: true,
                pinned: true,
            };
            Settled::Contradiction
        };
        let state = *state;
        for e in self.trace.path.iter_mut().filter(|e| e.node == id) {
            e.direction = state.direction;
            e.verdict = state.verdict;
            e.confirmed = state.confirmed;
            e.pinned = state.pinned;
        }
        settled
    }

    fn finalize(&mut self, x: usize) -> Result<Settled, FailureReason> {
        if x > 1 {
            let before = self.sufficient_verdict(x - 1, TestPurpose::Finalization)?;
            if self.reconcile(x - 1, before) == Settled::Contradiction {
                return Ok(Settled::Contradiction);
            }
            if before.decision != Decision::NoBug {
                return Err(FailureReason::ConflictingVerdicts { segment: x - 1 });
            }
        }
        let at = self.sufficient_verdict(x, TestPurpose::Finalization)?;
        if at.decision == Decision::NoBug && x == self.tree.segment_count() {
            return Err(FailureReason::NoBugDetected);
        }
        if self.reconcile(x, at) == Settled::Contradiction {
            return Ok(Settled::Contradiction);
        }
        if at.decision != Decision::Bug {
            return Err(FailureReason::ConflictingVerdicts { segment: x });
        }
        Ok(Settled::Agree)
    }
}

/// Cost-based search with early determination, finalization and looking back.
///
/// `tree` must cover `tester.segment_count()` segments.
pub fn locate_with<T: SegmentTester + ?Sized>(
    tester: &mut T,
    tree: &SearchTree,
    config: &LocatorConfig,
) -> LocateResult {
    assert_eq!(tree.segment_count(), tester.segment_count());
    let mut node_of_segment = vec![None; tree.segment_count() + 1];
    for n in tree.nodes() {
        if let Some(x) = n.middle {
            node_of_segment[x] = Some(n.id);
        }
    }
    let mut search = CostSearch {
        tester,
        tree,
        config,
        node_of_segment,
        states: vec![None; tree.nodes().len()],
        sufficient: BTreeMap::new(),
        trace: SearchTrace::default(),
    };
    let outcome = search.run();
    LocateResult::finish(Method::CostBinary, outcome, search.trace)
}

/// Tests `s_1, s_2, …` at sufficient accuracy until one is buggy.
pub fn linear_search<T: SegmentTester + ?Sized>(tester: &mut T) -> LocateResult {
    let mut trace = SearchTrace::default();
    let mut outcome = Err(FailureReason::NoBugDetected);
    for x in 1..=tester.segment_count() {
        let v = tester.test(x, TestMode::Sufficient);
        trace.record(TestPurpose::Scan, v);
        match v.decision {
            Decision::Bug => {
                outcome = Ok(x);
                break;
            }
            Decision::NoBug => {}
            Decision::Inconclusive => {
                outcome = Err(FailureReason::Inconclusive { segment: x });
                break;
            }
        }
    }
    LocateResult::finish(Method::Linear, outcome, trace)
}

/// Midpoint bisection, every node tested at sufficient accuracy; the leaf
/// reached is the answer.
pub fn naive_binary_search<T: SegmentTester + ?Sized>(tester: &mut T) -> LocateResult {
    let tree = SearchTree::midpoint(tester.segment_count());
    let mut trace = SearchTrace::default();
    let mut id = tree.root();
    let outcome = loop {
        let node = tree.node(id);
        let Some(x) = node.middle else {
            break Ok(node.lo);
        };
        let v = tester.test(x, TestMode::Sufficient);
        trace.record(TestPurpose::Bisection, v);
        let Some(direction) = Direction::of(v.decision) else {
            break Err(FailureReason::Inconclusive { segment: x });
        };
        trace.path.push(Edge {
            node: id,
            direction,
            verdict: v,
            confirmed: true,
            pinned: false,
        });
        id = match direction {
            Direction::L => node.left,
            Direction::R => node.right,
        }
        .expect("internal node has children");
    };
    LocateResult::finish(Method::NaiveBinary, outcome, trace)
}

/// Statistical cost-based search of `under_test` against `reference`.
pub fn locate<R: Rng>(
    under_test: &QuantumProgram,
    reference: &QuantumProgram,
    tree: &SearchTree,
    config: &LocatorConfig,
    rng: R,
) -> Result<LocateResult, CircuitError> {
    if tree.segment_count() != reference.segment_count() {
        return Err(CircuitError::SegmentationMismatch);
    }
    let mut tester = StatisticalTester::new(under_test, reference, config.thresholds, rng)?
        .with_shot_budget(config.shot_budget);
    Ok(locate_with(&mut tester, tree, config))
}

pub fn locate_linear<R: Rng>(
    under_test: &QuantumProgram,
    reference: &QuantumProgram,
    thresholds: &TestThresholds,
    rng: R,
) -> Result<LocateResult, CircuitError> {
    let mut tester = StatisticalTester::new(under_test, reference, *thresholds, rng)?;
    Ok(linear_search(&mut tester))
}

pub fn locate_naive_binary<R: Rng>(
    under_test: &QuantumProgram,
    reference: &QuantumProgram,
    thresholds: &TestThresholds,
    rng: R,
) -> Result<LocateResult, CircuitError> {
    let mut tester = StatisticalTester::new(under_test, reference, *thresholds, rng)?;
    Ok(naive_binary_search(&mut tester))
}
