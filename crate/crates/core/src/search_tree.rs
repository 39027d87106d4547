//! Binary search trees over segment indices.
//!
//! Each internal node owns a target range `[lo, hi]` and tests its middle
//! segment `x` (`lo <= x < hi`); the executed sequence of that test is
//! `s_1..s_x`. A detected bug sends the search left to `[lo, x]`, otherwise
//! right to `[x + 1, hi]`. Leaves are single segments.

use alloc::vec::Vec;

/// Index into [`SearchTree::nodes`]; the root is `NodeId(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(transparent)
)]
pub struct NodeId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchNode {
    pub id: NodeId,
    pub lo: usize,
    pub hi: usize,
    /// Tested segment; `None` for leaves.
    pub middle: Option<usize>,
    pub left: Option<NodeId>,
    pub right: Option<NodeId>,
}

impl SearchNode {
    pub fn is_leaf(&self) -> bool {
        self.middle.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SplitRule {
    /// Balance the testing costs of the two sides.
    CostBalanced,
    /// `⌊(lo + hi) / 2⌋`, ignoring costs.
    Midpoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SearchTree {
    rule: SplitRule,
    segment_count: usize,
    nodes: Vec<SearchNode>,
}

/// Cost-balanced middle of `[lo, hi]`.
///
/// `costs[i - 1]` is the prefix cost `c_i`. Returns the `x` in `[lo, hi - 1]`
/// minimizing `|Σ_{i=lo}^{x-1} c_i - Σ_{i=x+1}^{hi-1} c_i|`, smallest `x` on
/// ties. Panics if `hi <= lo`.
pub fn select_middle(costs: &[u64], lo: usize, hi: usize) -> usize {
    assert!(
        lo >= 1 && hi > lo && hi <= costs.len(),
        "need 1 <= lo < hi <= l"
    );
    let c = |i: usize| costs[i - 1] as i128;
    // candidates x = lo..hi-1; left = Σ c[lo..x-1], right = Σ c[x+1..hi-1]
    let mut left: i128 = 0;
    let mut right: i128 = (lo + 1..hi).map(c).sum();
    let mut best = (lo, (left - right).abs());
    for x in lo + 1..hi {
        left += c(x - 1);
        right -= c(x);
        let score = (left - right).abs();
        if score < best.1 {
            best = (x, score);
        }
    }
    best.0
}

impl SearchTree {
    /// Cost-balanced tree over prefix costs `c_1..c_l` (`l >= 2`).
    pub fn cost_balanced(costs: &[u64]) -> Self {
        Self::build(costs, SplitRule::CostBalanced)
    }

    /// Midpoint tree over `l` segments (`l >= 2`).
    pub fn midpoint(segment_count: usize) -> Self {
        Self::build(&alloc::vec![1; segment_count], SplitRule::Midpoint)
    }

    pub fn build(costs: &[u64], rule: SplitRule) -> Self {
        assert!(costs.len() >= 2, "need at least two segments");
        let mut tree = Self {
            rule,
            segment_count: costs.len(),
            nodes: Vec::with_capacity(2 * costs.len() - 1),
        };
        tree.grow(costs, 1, costs.len());
        tree
    }

    fn grow(&mut self, costs: &[u64], lo: usize, hi: usize) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(SearchNode {
            id,
            lo,
            hi,
            middle: None,
            left: None,
            right: None,
        });
        if lo < hi {
            let x = match self.rule {
                SplitRule::CostBalanced => select_middle(costs, lo, hi),
                SplitRule::Midpoint => (lo + hi) / 2,
            };
            let left = self.grow(costs, lo, x);
            let right = self.grow(costs, x + 1, hi);
            let node = &mut self.nodes[id.0];
            node.middle = Some(x);
            node.left = Some(left);
            node.right = Some(right);
        }
        id
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn rule(&self) -> SplitRule {
        self.rule
    }

    pub fn segment_count(&self) -> usize {
        self.segment_count
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    /// The internal node whose tested segment is `x` (each `x < l` has exactly one).
    pub fn node_testing(&self, x: usize) -> Option<NodeId> {
        self.nodes
            .iter()
            .find(|n| n.middle == Some(x))
            .map(|n| n.id)
    }

    /// Leaf segments from left to right.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.segment_count);
        let mut stack = alloc::vec![self.root()];
        while let Some(id) = stack.pop() {
            let n = self.node(id);
            match (n.left, n.right) {
                (Some(l), Some(r)) => {
                    stack.push(r);
                    stack.push(l);
                }
                _ => out.push(n.lo),
            }
        }
        out
    }

    /// Number of edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn go(t: &SearchTree, id: NodeId) -> usize {
            let n = t.node(id);
            match (n.left, n.right) {
                (Some(l), Some(r)) => 1 + go(t, l).max(go(t, r)),
                _ => 0,
            }
        }
        go(self, self.root())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn prefix(g: &[u64]) -> Vec<u64> {
        g.iter()
            .scan(0, |a, &x| {
                *a += x;
                Some(*a)
            })
            .collect()
    }

    #[test]
    fn middle_examples() {
        assert_eq!(select_middle(&prefix(&[2, 2, 2, 2]), 1, 4), 2);
        assert_eq!(select_middle(&prefix(&[1, 1, 1, 5]), 1, 4), 2);
        assert_eq!(select_middle(&prefix(&[2, 2, 2, 2]), 3, 4), 3);
    }

    #[test]
    #[should_panic]
    fn middle_of_singleton_panics() {
        select_middle(&[1, 2, 3], 2, 2);
    }

    #[test]
    fn four_uniform() {
        let t = SearchTree::cost_balanced(&prefix(&[2, 2, 2, 2]));
        let root = t.node(t.root());
        assert_eq!(root.middle, Some(2));
        let left = t.node(root.left.unwrap());
        let right = t.node(root.right.unwrap());
        assert_eq!((left.lo, left.hi, left.middle), (1, 2, Some(1)));
        assert_eq!((right.lo, right.hi, right.middle), (3, 4, Some(3)));
        assert_eq!(t.leaves(), vec![1, 2, 3, 4]);
        assert_eq!(t.node_testing(3), Some(right.id));
        assert_eq!(t.node_testing(4), None);
    }

    #[test]
    fn smallest_tree() {
        let t = SearchTree::cost_balanced(&[3, 5]);
        assert_eq!(t.node(t.root()).middle, Some(1));
        assert_eq!(t.leaves(), vec![1, 2]);
        assert_eq!(t.nodes().len(), 3);
        assert_eq!(t.depth(), 1);
    }

    #[test]
    fn midpoint_tree() {
        let t = SearchTree::midpoint(4);
        assert_eq!(t.node(t.root()).middle, Some(2));
        assert_eq!(t.rule(), SplitRule::Midpoint);
        let t = SearchTree::midpoint(7);
        assert_eq!(t.node(t.root()).middle, Some(4));
    }

    #[test]
    fn cost_balancing_shifts_the_root_right() {
        // prefix costs grow, so the balanced root sits right of the midpoint
        let t = SearchTree::cost_balanced(&prefix(&[1; 7]));
        assert_eq!(t.node(t.root()).middle, Some(5));
    }
}
