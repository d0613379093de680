//! Entropy and relative entropy, natural log, with `0 * ln 0 = 0`.

use crate::error::Result;
use crate::model::{Labelling, WorldDistribution};

/// `-p ln p`, zero at `p = 0`.
pub fn plogp_neg(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.ln()
    } else {
        0.0
    }
}

/// Binary entropy `-x ln x - (1 - x) ln(1 - x)`.
pub fn binary_entropy(x: f64) -> f64 {
    plogp_neg(x) + plogp_neg(1.0 - x)
}

/// H(L): sum of per-argument binary entropies.
pub fn entropy_labelling(l: &Labelling) -> f64 {
    l.values().iter().map(|&x| binary_entropy(x)).sum()
}

/// H(P) = -sum_w P(w) ln P(w).
pub fn entropy_distribution(p: &WorldDistribution) -> f64 {
    p.probs().iter().map(|&x| plogp_neg(x)).sum()
}

/// KL(P, Q) = sum_w P(w) ln(P(w) / Q(w)).
///
/// Returns `f64::INFINITY` when P puts mass on a world where Q has none.
pub fn kl_divergence(p: &WorldDistribution, q: &WorldDistribution) -> Result<f64> {
    if p.num_args() != q.num_args() {
        return Err(crate::Error::DimensionMismatch {
            expected: p.num_args(),
            found: q.num_args(),
        });
    }
    let mut total = 0.0;
    for (&pw, &qw) in p.probs().iter().zip(q.probs()) {
        if pw > 0.0 {
            if qw <= 0.0 {
                return Ok(f64::INFINITY);
            }
            total += pw * (pw / qw).ln();
        }
    }
    // Rounding can leave a tiny negative sum when P == Q.
    Ok(total.max(0.0))
}
