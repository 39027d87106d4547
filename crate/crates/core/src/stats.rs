//! Chi-square goodness of fit and noncentral chi-square power.
//!
//! Everything here works on `f64` through `libm`, so it stays usable without
//! `std`.

use alloc::vec::Vec;

use crate::sim::MeasurementHistogram;

/// Oracle probabilities below this are treated as exactly zero.
///
/// Simulation leaves round-off residue around `1e-32` on outcomes that are
/// impossible in exact arithmetic.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;

/// Minimum expected count for a bin to stand alone (Cochran's rule).
pub const MIN_EXPECTED_COUNT: f64 = 5.0;

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Regularized lower incomplete gamma `P(a, x)`.
pub fn regularized_gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        gamma_series(a, x)
    } else {
        1.0 - gamma_continued_fraction(a, x)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_series(a, x)
    } else {
        gamma_continued_fraction(a, x)
    }
}

fn gamma_prefactor(a: f64, x: f64) -> f64 {
    libm::exp(a * libm::log(x) - x - libm::lgamma(a))
}

fn gamma_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut del = 1.0 / a;
    let mut sum = del;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if libm::fabs(del) < libm::fabs(sum) * EPS {
            break;
        }
    }
    (sum * gamma_prefactor(a, x)).min(1.0)
}

// modified Lentz evaluation of the continued fraction for Q(a, x)
fn gamma_continued_fraction(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if libm::fabs(d) < TINY {
            d = TINY;
        }
        c = b + an / c;
        if libm::fabs(c) < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if libm::fabs(del - 1.0) < EPS {
            break;
        }
    }
    (h * gamma_prefactor(a, x)).clamp(0.0, 1.0)
}

/// Upper tail `P[χ²_dof > x]`.
pub fn chi_square_sf(x: f64, dof: usize) -> f64 {
    debug_assert!(dof > 0);
    regularized_gamma_q(dof as f64 / 2.0, x / 2.0)
}

/// Critical value `c` with `P[χ²_dof > c] = alpha`.
pub fn chi_square_critical(alpha: f64, dof: usize) -> f64 {
    debug_assert!(alpha > 0.0 && alpha < 1.0 && dof > 0);
    let mut lo = 0.0;
    let mut hi = dof as f64 + 10.0;
    while chi_square_sf(hi, dof) > alpha {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if chi_square_sf(mid, dof) > alpha {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= hi * 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Upper tail of the noncentral chi-square `P[χ²_{dof,λ} > x]`.
///
/// Poisson mixture of central tails, summed as `1 - Σ w_j P(dof/2 + j, x/2)`.
/// `P(a, x/2)` falls off quickly once `a` passes `x/2`, so the number of terms
/// is bounded by the critical value, not by `λ`.
pub fn noncentral_chi_square_sf(x: f64, dof: usize, noncentrality: f64) -> f64 {
    debug_assert!(dof > 0 && noncentrality >= 0.0);
    if x <= 0.0 {
        return 1.0;
    }
    if noncentrality == 0.0 {
        return chi_square_sf(x, dof);
    }
    let half_lambda = noncentrality / 2.0;
    let log_half_lambda = libm::log(half_lambda);
    let mut cdf = 0.0;
    let mut weight_seen = 0.0;
    for j in 0..MAX_ITER {
        let jf = j as f64;
        let weight = libm::exp(-half_lambda + jf * log_half_lambda - libm::lgamma(jf + 1.0));
        let p = regularized_gamma_p(dof as f64 / 2.0 + jf, x / 2.0);
        cdf += weight * p;
        weight_seen += weight;
        // P decreases in j, so the remaining terms are bounded by p
        if p < 1e-17 || (jf > half_lambda && 1.0 - weight_seen < 1e-17) {
            break;
        }
    }
    (1.0 - cdf).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct PooledBin {
    pub probability: f64,
    pub observed: u64,
}

/// Result of a Pearson goodness-of-fit test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    /// Retained bins minus one. Zero means the test has nothing to compare.
    pub dof: usize,
    pub p_value: f64,
    /// Number of outcomes with nonzero oracle probability.
    pub support: usize,
    /// Bins after dropping zero-probability outcomes and pooling small ones.
    pub bins: Vec<PooledBin>,
}

impl ChiSquareTest {
    /// False when pooling collapsed a multi-outcome oracle into a single bin;
    /// more shots are needed before the statistic means anything.
    pub fn is_informative(&self) -> bool {
        self.dof > 0 || self.support <= 1
    }
}

/// An outcome was observed that the oracle says cannot happen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("outcome {outcome} observed {count} time(s) but has zero expected probability")]
pub struct ImpossibleOutcome {
    pub outcome: usize,
    pub count: u64,
}

/// Pearson chi-square test of `hist` against `expected`.
///
/// Outcomes with zero expected probability are excluded; observing one of them
/// is reported as [`ImpossibleOutcome`]. Outcomes whose expected count is below
/// [`MIN_EXPECTED_COUNT`] are pooled into one bin.
pub fn chi_square(
    hist: &MeasurementHistogram,
    expected: &[f64],
) -> Result<ChiSquareTest, ImpossibleOutcome> {
    debug_assert_eq!(hist.counts().len(), expected.len());
    let m = hist.shots() as f64;
    let mut bins = Vec::new();
    let mut pooled = PooledBin {
        probability: 0.0,
        observed: 0,
    };
    let mut support = 0;
    for (outcome, (&observed, &p)) in hist.counts().iter().zip(expected).enumerate() {
        if p < NEGLIGIBLE_PROBABILITY {
            if observed > 0 {
                return Err(ImpossibleOutcome {
                    outcome,
                    count: observed,
                });
            }
            continue;
        }
        support += 1;
        if m * p < MIN_EXPECTED_COUNT {
            pooled.probability += p;
            pooled.observed += observed;
        } else {
            bins.push(PooledBin {
                probability: p,
                observed,
            });
        }
    }
    if pooled.probability > 0.0 {
        bins.push(pooled);
    }

    let statistic = if m > 0.0 {
        bins.iter()
            .map(|b| {
                let e = m * b.probability;
                let d = b.observed as f64 - e;
                d * d / e
            })
            .sum()
    } else {
        0.0
    };
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        chi_square_sf(statistic, dof)
    };
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
        support,
        bins,
    })
}

/// Post-hoc power of the goodness-of-fit test at level `alpha`.
///
/// Noncentrality is `λ = M Σ (q_i - p_i)² / p_i` over the bins with `p_i > 0`
/// and the degrees of freedom are those bins minus one. With a single bin the
/// test can never reject and the power is 0.
pub fn chi_square_power(expected: &[f64], observed_freqs: &[f64], shots: u64, alpha: f64) -> f64 {
    let mut bins = 0usize;
    let mut effect = 0.0;
    for (&p, &q) in expected.iter().zip(observed_freqs) {
        if p > 0.0 {
            bins += 1;
            effect += (q - p) * (q - p) / p;
        }
    }
    if bins < 2 {
        return 0.0;
    }
    let dof = bins - 1;
    let critical = chi_square_critical(alpha, dof);
    noncentral_chi_square_sf(critical, dof, shots as f64 * effect)
}
