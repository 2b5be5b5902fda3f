//! Closed-form moment machinery: the r_k / Z_k / q_k reparameterization of
//! likelihood-ratio moments, the inclusion-exclusion collision pmf for
//! matchings, the Poisson(1/2) MGF, the negative-association binomial bound
//! for trees, and the collision-MGF route to χ².
//!
//! All quantities exist in two flavors: exact rationals for small n and
//! log-domain f64 for large n, where Z_k (exponent C(n,2)) would otherwise
//! under- or overflow.

use num::{BigInt, BigRational, One, Zero};

use crate::error::{Error, Result};
use crate::exact::{rat_pow, CollisionPmf};
use crate::model::{ExactModelParams, ModelKind, ModelParams};
use crate::util::log_sum_exp;

/// Reparameterized moment quantities for order k:
/// r_k = (1 - δ/q)^k, Z_k = (1 - q + q r_k)^C(n,2), q_k = q r_k / (1 - q + q r_k).
/// Z_k is carried in log form.
#[derive(Clone, Copy, Debug)]
pub struct MomentParams {
    pub k: u32,
    pub r_k: f64,
    pub ln_z_k: f64,
    pub q_k: f64,
    /// ln(q_k), assembled from accurate pieces rather than ln of the product.
    ln_q_k: f64,
}

impl MomentParams {
    /// (1 - q + q r_k)^C(n,2); underflows to 0 for large n by design.
    pub fn z_k(&self) -> f64 {
        self.ln_z_k.exp()
    }

    pub fn ln_q_k(&self) -> f64 {
        self.ln_q_k
    }
}

pub fn moment_params(params: &ModelParams, k: u32) -> Result<MomentParams> {
    if k < 1 {
        return Err(Error::Param("moment order k must be >= 1".into()));
    }
    let (q, delta) = (params.q, params.delta_n);
    if q <= 0.0 {
        return Err(Error::Param("q must be positive".into()));
    }
    if q < delta {
        return Err(Error::Param(format!(
            "q = {q} below delta_n = {delta} (p < 0)"
        )));
    }
    let c = params.edge_slots() as f64;
    let ratio = 1.0 - delta / q;
    let r_k = ratio.powi(k as i32);
    // 1 - q + q r_k = 1 - q(1 - ratio^k) = 1 - δ Σ_{j<k} ratio^j; the
    // telescoped form avoids the cancellation in q(1 - r_k).
    let geom: f64 = (0..k).map(|j| ratio.powi(j as i32)).sum();
    let ln_a = (-delta * geom).ln_1p();
    let a = 1.0 - delta * geom;
    let ln_q_k = q.ln() + k as f64 * ratio.ln() - ln_a;
    Ok(MomentParams {
        k,
        r_k,
        ln_z_k: c * ln_a,
        q_k: q * r_k / a,
        ln_q_k,
    })
}

/// Exact-rational counterpart of [`MomentParams`] with Z_k held directly.
#[derive(Clone, Debug)]
pub struct ExactMomentParams {
    pub k: u32,
    pub r_k: BigRational,
    pub z_k: BigRational,
    pub q_k: BigRational,
}

pub fn moment_params_exact(params: &ExactModelParams, k: u32) -> Result<ExactMomentParams> {
    if k < 1 {
        return Err(Error::Param("moment order k must be >= 1".into()));
    }
    if params.q.is_zero() {
        return Err(Error::Param("q must be positive".into()));
    }
    if params.q < params.delta_n {
        return Err(Error::Param("q below delta_n (p < 0)".into()));
    }
    let one = BigRational::one();
    let ratio = &one - &params.delta_n / &params.q;
    let r_k = rat_pow(&ratio, k as i64);
    let a = &one - &params.q + &params.q * &r_k;
    let z_k = rat_pow(&a, params.edge_slots() as i64);
    let q_k = &params.q * &r_k / &a;
    Ok(ExactMomentParams { k, r_k, z_k, q_k })
}

fn big_binomial(a: usize, b: usize) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..b {
        acc = acc * BigInt::from(a - i) / BigInt::from(i + 1);
    }
    acc
}

/// k!! with the conventions (-1)!! = 0!! = 1.
fn double_factorial(mut k: i64) -> BigInt {
    let mut acc = BigInt::one();
    while k > 1 {
        acc *= BigInt::from(k);
        k -= 2;
    }
    acc
}

/// Probability that two independent uniform perfect matchings of K_n share
/// exactly `k` edges, by inclusion-exclusion:
///
///   C(n/2, k) Σ_ℓ (-1)^ℓ C(n/2 - k, ℓ) (n - 2k - 2ℓ - 1)!! / (n-1)!!
///
/// Terms whose double-factorial argument drops below -1 count negative-size
/// matchings and are 0.
pub fn collision_pmf_matching(n: usize, k: usize) -> Result<BigRational> {
    ModelKind::Matching.check_n(n)?;
    let half = n / 2;
    if k > half {
        return Err(Error::Domain(format!(
            "collision count {k} out of range 0..={half}"
        )));
    }
    let mut sum = BigInt::zero();
    for l in 0..=half {
        let arg = n as i64 - 2 * k as i64 - 2 * l as i64 - 1;
        if arg < -1 {
            continue;
        }
        let term = big_binomial(half - k, l) * double_factorial(arg);
        if l % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(BigRational::new(
        big_binomial(half, k) * sum,
        double_factorial(n as i64 - 1),
    ))
}

/// Full closed-form collision pmf over `0..=n/2`.
pub fn collision_pmf_matching_full(n: usize) -> Result<CollisionPmf> {
    let e_h = n / 2;
    let probs = (0..=e_h)
        .map(|k| collision_pmf_matching(n, k))
        .collect::<Result<_>>()?;
    Ok(CollisionPmf { e_h, probs })
}

/// E[s^(-Y)] for Y ~ Pois(λ): exp(λ (1/s - 1)).
pub fn poisson_mgf(s: f64, lambda: f64) -> Result<f64> {
    if s <= 0.0 {
        return Err(Error::Domain(format!("MGF argument must be positive, got {s}")));
    }
    Ok((lambda * (1.0 / s - 1.0)).exp())
}

/// Negative-association upper bound on the tree collision MGF:
/// E[s^(-collisions)] <= (1 + (2/n)(1/s - 1))^(n-1), the MGF of
/// Bin(n-1, (n-1)/C(n,2)) built from independent copies of the edge
/// indicators' marginals.
pub fn tree_collision_mgf_bound(params: &ModelParams, s: f64) -> Result<f64> {
    if params.kind != ModelKind::SpanningTree {
        return Err(Error::Model("binomial MGF bound applies to the tree model".into()));
    }
    if s <= 0.0 || s > 1.0 {
        return Err(Error::Domain(format!("bound argument must lie in (0,1], got {s}")));
    }
    let n = params.n as f64;
    Ok(((params.n - 1) as f64 * (2.0 / n * (1.0 / s - 1.0)).ln_1p()).exp())
}

/// Exact-rational form of [`tree_collision_mgf_bound`]:
/// ((n - 2 + 2/s) / n)^(n-1).
pub fn tree_collision_mgf_bound_exact(n: usize, s: &BigRational) -> Result<BigRational> {
    ModelKind::SpanningTree.check_n(n)?;
    if s <= &BigRational::zero() || s > &BigRational::one() {
        return Err(Error::Domain("bound argument must lie in (0,1]".into()));
    }
    let two = BigRational::from_integer(BigInt::from(2));
    let base = (BigRational::from_integer(BigInt::from(n as i64 - 2)) + two / s)
        / BigRational::from_integer(BigInt::from(n));
    Ok(rat_pow(&base, n as i64 - 1))
}

/// An evaluator for E[s^(-collisions)] with a provenance tag saying where the
/// collision law came from.
#[derive(Clone, Debug)]
pub enum CollisionMgf {
    /// Exact pmf (brute force or closed form), rounded to f64 weights.
    ExactPmf { probs: Vec<f64> },
    /// Empirical pmf from Monte Carlo structure pairs.
    MonteCarlo { probs: Vec<f64> },
    /// The Pois(λ) surrogate MGF.
    PoissonBound { lambda: f64 },
    /// The negative-association binomial bound for trees.
    BinomialBound { n: usize },
}

impl CollisionMgf {
    pub fn provenance(&self) -> &'static str {
        match self {
            CollisionMgf::ExactPmf { .. } => "exact-pmf",
            CollisionMgf::MonteCarlo { .. } => "monte-carlo",
            CollisionMgf::PoissonBound { .. } => "poisson-bound",
            CollisionMgf::BinomialBound { .. } => "binomial-bound",
        }
    }

    pub fn from_pmf(pmf: &CollisionPmf) -> Self {
        CollisionMgf::ExactPmf { probs: pmf.to_f64s() }
    }

    /// ln E[s^(-collisions)]; the log domain keeps huge 1/s powers in range.
    pub fn ln_eval(&self, s: f64) -> Result<f64> {
        if s <= 0.0 {
            return Err(Error::Domain(format!("MGF argument must be positive, got {s}")));
        }
        match self {
            CollisionMgf::ExactPmf { probs } | CollisionMgf::MonteCarlo { probs } => {
                let ln_s = s.ln();
                Ok(log_sum_exp(
                    probs
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(k, &p)| p.ln() - k as f64 * ln_s),
                ))
            }
            CollisionMgf::PoissonBound { lambda } => Ok(lambda * (1.0 / s - 1.0)),
            CollisionMgf::BinomialBound { n } => {
                let nf = *n as f64;
                Ok((nf - 1.0) * (2.0 / nf * (1.0 / s - 1.0)).ln_1p())
            }
        }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        Ok(self.ln_eval(s)?.exp())
    }
}

fn check_p_open(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Degenerate(format!(
            "moment formulas require p strictly inside (0,1), got {p}"
        )));
    }
    Ok(())
}

/// ln of the moment prefactor (1-δ)^{-k C} (q_k/p)^{k e_H} Z_k.
pub fn ln_moment_prefactor(params: &ModelParams, k: u32) -> Result<f64> {
    check_p_open(params.p)?;
    let mp = moment_params(params, k)?;
    if mp.q_k <= 0.0 {
        return Err(Error::Degenerate("q_k vanished; MGF argument degenerate".into()));
    }
    let c = params.edge_slots() as f64;
    let kf = k as f64;
    Ok(-kf * c * (-params.delta_n).ln_1p()
        + kf * params.e_h as f64 * (mp.ln_q_k() - params.p.ln())
        + mp.ln_z_k)
}

/// ln E_Q[L^k] through the collision MGF:
///
///   ln[(1-δ)^{-k C} (q_k/p)^{k e_H} Z_k] + ln E[q_k^{-collisions}].
pub fn ln_second_moment_via_collisions(
    params: &ModelParams,
    k: u32,
    mgf: &CollisionMgf,
) -> Result<f64> {
    let q_k = moment_params(params, k)?.q_k;
    Ok(ln_moment_prefactor(params, k)? + mgf.ln_eval(q_k)?)
}

/// E_Q[L^k] evaluated in the log domain; may overflow to +inf deep in the
/// undetectable regime, which is meaningful output there.
pub fn second_moment_via_collisions(
    params: &ModelParams,
    k: u32,
    mgf: &CollisionMgf,
) -> Result<f64> {
    Ok(ln_second_moment_via_collisions(params, k, mgf)?.exp())
}

/// Exact-rational E_Q[L^k] from an exact collision pmf.
pub fn second_moment_exact(
    params: &ExactModelParams,
    k: u32,
    pmf: &CollisionPmf,
) -> Result<BigRational> {
    if params.p <= BigRational::zero() || params.p >= BigRational::one() {
        return Err(Error::Degenerate(
            "moment formulas require p strictly inside (0,1)".into(),
        ));
    }
    let mp = moment_params_exact(params, k)?;
    if mp.q_k.is_zero() {
        return Err(Error::Degenerate("q_k vanished; MGF argument degenerate".into()));
    }
    let one = BigRational::one();
    let kc = (k as i64) * params.edge_slots() as i64;
    let prefactor = rat_pow(&(&one - &params.delta_n), -kc)
        * rat_pow(&(&mp.q_k / &params.p), (k as usize * params.e_h) as i64)
        * &mp.z_k;
    Ok(prefactor * pmf.mgf_exact(&mp.q_k)?)
}

/// Poisson-approximation χ² diagnostic for the matching model:
/// E_Q[L²] via the Pois(1/2) MGF, minus 1. An approximation to the exact
/// collision MGF, not a bound; its value is the cheap large-n indicator of
/// which side of the detection threshold the parameters sit on.
pub fn chi2_diagnostic_matching(params: &ModelParams) -> Result<f64> {
    if params.kind != ModelKind::Matching {
        return Err(Error::Model("the Poisson diagnostic applies to the matching model".into()));
    }
    let m = second_moment_via_collisions(params, 2, &CollisionMgf::PoissonBound { lambda: 0.5 })?;
    Ok(m - 1.0)
}
