//! Approximate probability that a search has to return to an earlier node.
//!
//! Node `n_i` tested segment `x` and went left (bug detected); `w` of the
//! `k - i` edges from `n_i` onward are L edges. If the executed sequence
//! `s_1..s_x` is in fact bug-free (prior `(l - x)/l` with one uniformly placed
//! bug), each of those L edges is a false alarm of rate `α`. Approximating
//! the evidence by its dominant term, correct narrowing down with rates
//! `1 - β` and `1 - α`, gives
//!
//! ```text
//! P(B|A) ≈ α^w (1-α)^(k-i-w) ((l-x)/l) / ((1-β)^w (1-α)^(k-i-w))
//!        = ((l-x)/l) (α / (1-β))^w
//! ```
//!
//! which shrinks geometrically with every reinforcing L edge. The same holds
//! for R edges with the roles of the error rates swapped.

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReturnRiskQuery {
    /// `l`
    pub segment_count: usize,
    /// `x`, the segment tested at `n_i`.
    pub tested_segment: usize,
    /// `w >= 1`, L edges from `e_i^L` to the end of the path.
    pub l_edges: usize,
    pub alpha: f64,
    pub beta: f64,
    /// `k - i`
    pub path_length: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReturnRiskError {
    #[error("tested segment must satisfy 1 <= x <= l - 1")]
    SegmentOutOfRange,
    #[error("alpha must lie in (0, 1) and beta in [0, 1)")]
    RateOutOfRange,
    #[error("need 1 <= w <= path length")]
    EdgeCountOutOfRange,
}

impl ReturnRiskQuery {
    pub fn validate(&self) -> Result<(), ReturnRiskError> {
        if self.tested_segment == 0 || self.tested_segment >= self.segment_count {
            return Err(ReturnRiskError::SegmentOutOfRange);
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0 && self.beta >= 0.0 && self.beta < 1.0) {
            return Err(ReturnRiskError::RateOutOfRange);
        }
        if self.l_edges == 0 || self.l_edges > self.path_length {
            return Err(ReturnRiskError::EdgeCountOutOfRange);
        }
        Ok(())
    }

    /// Prior that the executed sequence `s_1..s_x` holds no bug.
    pub fn prior_bug_free(&self) -> f64 {
        (self.segment_count - self.tested_segment) as f64 / self.segment_count as f64
    }
}

/// `((l - x)/l) (α / (1 - β))^w`, clamped to `[0, 1]`.
///
/// The `(1 - α)^(k-i-w)` factors cancel, so the path length only enters
/// through validation.
pub fn posterior_return_probability(q: &ReturnRiskQuery) -> Result<f64, ReturnRiskError> {
    q.validate()?;
    posterior_unchecked(q)
}

/// As [`posterior_return_probability`], but also accepts `α = 0`.
pub fn posterior_unchecked(q: &ReturnRiskQuery) -> Result<f64, ReturnRiskError> {
    let ratio = q.alpha / (1.0 - q.beta);
    let w = i32::try_from(q.l_edges).map_err(|_| ReturnRiskError::EdgeCountOutOfRange)?;
    Ok((q.prior_bug_free() * libm::pow(ratio, w as f64)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query(w: usize) -> ReturnRiskQuery {
        ReturnRiskQuery {
            segment_count: 8,
            tested_segment: 4,
            l_edges: w,
            alpha: 0.1,
            beta: 0.2,
            path_length: 3,
        }
    }

    #[test]
    fn reference_values() {
        assert_eq!(posterior_return_probability(&query(1)), Ok(0.0625));
        let v = posterior_return_probability(&query(2)).unwrap();
        assert!((v - 0.0078125).abs() < 1e-17);
    }

    #[test]
    fn zero_alpha_never_returns() {
        let q = ReturnRiskQuery {
            alpha: 0.0,
            ..query(1)
        };
        assert_eq!(q.validate(), Err(ReturnRiskError::RateOutOfRange));
        assert_eq!(posterior_unchecked(&q), Ok(0.0));
    }

    #[test]
    fn path_length_cancels() {
        let a = posterior_return_probability(&query(2)).unwrap();
        let b = posterior_return_probability(&ReturnRiskQuery {
            path_length: 9,
            ..query(2)
        })
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clamped_when_alpha_exceeds_one_minus_beta() {
        let q = ReturnRiskQuery {
            segment_count: 2,
            tested_segment: 1,
            l_edges: 3,
            alpha: 0.9,
            beta: 0.8,
            path_length: 3,
        };
        assert_eq!(posterior_return_probability(&q), Ok(1.0));
    }

    #[test]
    fn invalid_queries() {
        let q = ReturnRiskQuery {
            tested_segment: 8,
            ..query(1)
        };
        assert_eq!(q.validate(), Err(ReturnRiskError::SegmentOutOfRange));
        let q = ReturnRiskQuery {
            l_edges: 4,
            ..query(1)
        };
        assert_eq!(q.validate(), Err(ReturnRiskError::EdgeCountOutOfRange));
        assert!(query(0).validate().is_err());
    }
}
