//! Exact small-n ground truth in rational arithmetic: structure counts,
//! likelihood ratios, total-variation and χ² divergences, optimal-test risk,
//! and brute-force collision distributions.
//!
//! Everything here is float-free end to end; real-valued output appears only
//! at the reporting boundary.

mod count;
mod divergence;
mod enumerate;

pub use count::{count_perfect_matchings, count_spanning_trees};
pub use divergence::{
    exact_divergences, likelihood_ratio, q_weighted_likelihood_square_sum,
    q_weighted_likelihood_sum, DivergenceReport,
};
pub use enumerate::{
    enumerate_matchings, enumerate_trees, exhaustive_matching_count, exhaustive_tree_count,
};

use num::{BigInt, BigRational};

use crate::error::{Error, Result};
use crate::graph::edge_slot_count;
use crate::model::ModelKind;

/// Arbitrary-precision rational scalar used throughout the oracle.
pub type ExactScalar = BigRational;

/// Exact integer power of a rational (negative exponents invert).
pub(crate) fn rat_pow(base: &BigRational, exp: i64) -> BigRational {
    use num::One;
    if exp < 0 {
        return BigRational::one() / rat_pow(base, -exp);
    }
    let mut result = BigRational::one();
    let mut b = base.clone();
    let mut e = exp as u64;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// (n-1)!! for matchings, n^(n-2) for trees: the number of structures.
pub fn structure_count(kind: ModelKind, n: usize) -> Result<BigInt> {
    kind.check_n(n)?;
    Ok(match kind {
        ModelKind::Matching => {
            let mut acc = BigInt::from(1u32);
            let mut k = n as i64 - 1;
            while k > 1 {
                acc *= k;
                k -= 2;
            }
            acc
        }
        ModelKind::SpanningTree => BigInt::from(n).pow(n as u32 - 2),
    })
}

/// Exact distribution of `collisions(H1, H2) = 2 e_H - |E(H1 ∪ H2)|` over
/// independent uniform structure pairs. `probs[k]` is the probability of
/// exactly `k` shared edges; the support is `0..=e_h`.
#[derive(Clone, Debug, PartialEq)]
pub struct CollisionPmf {
    pub e_h: usize,
    pub probs: Vec<BigRational>,
}

impl CollisionPmf {
    pub fn to_f64s(&self) -> Vec<f64> {
        self.probs.iter().map(crate::model::rational_to_f64).collect()
    }

    /// Point pmf with zero collisions almost surely; the k = 1 moment
    /// identity uses it as the trivial MGF.
    pub fn zero_collisions(e_h: usize) -> Self {
        use num::{One, Zero};
        let mut probs = vec![BigRational::zero(); e_h + 1];
        probs[0] = BigRational::one();
        CollisionPmf { e_h, probs }
    }

    /// Exact MGF value E[s^(-collisions)] at a rational s > 0.
    pub fn mgf_exact(&self, s: &BigRational) -> Result<BigRational> {
        use num::{Zero};
        if s <= &BigRational::zero() {
            return Err(Error::Domain(format!(
                "MGF argument must be positive, got {s}"
            )));
        }
        let mut acc = BigRational::zero();
        for (k, pr) in self.probs.iter().enumerate() {
            if !pr.is_zero() {
                acc += pr * rat_pow(s, -(k as i64));
            }
        }
        Ok(acc)
    }
}

/// Brute-force collision pmf by enumerating all ordered structure pairs.
/// Capacity: matchings up to n = 10, trees up to n = 6.
pub fn brute_collision_pmf(n: usize, kind: ModelKind) -> Result<CollisionPmf> {
    kind.check_n(n)?;
    let cap = match kind {
        ModelKind::Matching => 10,
        ModelKind::SpanningTree => 6,
    };
    if n > cap {
        return Err(Error::Capacity(format!(
            "brute-force collision pmf supports {kind} only up to n = {cap}, got {n}"
        )));
    }
    let structs = match kind {
        ModelKind::Matching => enumerate_matchings(n)?,
        ModelKind::SpanningTree => enumerate_trees(n)?,
    };
    let e_h = kind.planted_edge_count(n)?;
    // C(n,2) <= 45 at these capacities, so edge sets fit in a u64 mask.
    debug_assert!(edge_slot_count(n) <= 64);
    let masks: Vec<u64> = structs
        .iter()
        .map(|edges| edges.iter().fold(0u64, |m, e| m | 1u64 << e.index()))
        .collect();
    let mut hist = vec![0u64; e_h + 1];
    for &a in &masks {
        for &b in &masks {
            hist[(a & b).count_ones() as usize] += 1;
        }
    }
    let total = BigInt::from(masks.len() as u64) * BigInt::from(masks.len() as u64);
    let probs = hist
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), total.clone()))
        .collect();
    Ok(CollisionPmf { e_h, probs })
}
