//! Exhaustive likelihood-ratio, total-variation, and χ² computation over all
//! 2^C(n,2) graphs, in exact rational arithmetic.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::{count_perfect_matchings, count_spanning_trees, rat_pow, structure_count};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{rational_string, rational_to_f64, ExactModelParams, ModelKind};

/// Exact divergence quantities for one calibrated hypothesis pair.
#[derive(Clone, Debug)]
pub struct DivergenceReport {
    pub n: usize,
    pub kind: ModelKind,
    pub p: BigRational,
    pub tv: BigRational,
    pub chi2: BigRational,
    pub optimal_risk: BigRational,
}

impl DivergenceReport {
    /// JSON rendering with rationals as "numerator/denominator" strings plus
    /// decimal approximations.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "n": self.n,
            "model": self.kind.to_string(),
            "p": rational_string(&self.p),
            "p_decimal": rational_to_f64(&self.p),
            "tv": rational_string(&self.tv),
            "tv_decimal": rational_to_f64(&self.tv),
            "chi2": rational_string(&self.chi2),
            "chi2_decimal": rational_to_f64(&self.chi2),
            "optimal_risk": rational_string(&self.optimal_risk),
            "optimal_risk_decimal": rational_to_f64(&self.optimal_risk),
        })
    }
}

fn check_open_interval(p: &BigRational) -> Result<()> {
    if p <= &BigRational::zero() || p >= &BigRational::one() {
        return Err(Error::Degenerate(format!(
            "likelihood formulas require p strictly inside (0,1), got {}",
            rational_string(p)
        )));
    }
    Ok(())
}

fn structures_in(g: &Graph, kind: ModelKind) -> Result<BigInt> {
    Ok(match kind {
        ModelKind::Matching => BigInt::from(count_perfect_matchings(g)?),
        ModelKind::SpanningTree => count_spanning_trees(g)?,
    })
}

/// Likelihood ratio L(G) = dP/dQ(G), evaluated from the structure count:
///
///   L(G) = (1 - δ)^{-C(n,2)} · (count(G) / #structures) · p^{-e_H}
///          · (1 - δ/q)^{e_G}.
pub fn likelihood_ratio(g: &Graph, params: &ExactModelParams) -> Result<BigRational> {
    check_open_interval(&params.p)?;
    if g.n() != params.n {
        return Err(Error::DimensionMismatch {
            left: g.n(),
            right: params.n,
        });
    }
    let count = structures_in(g, params.kind)?;
    if count.is_zero() {
        return Ok(BigRational::zero());
    }
    let c = params.edge_slots() as i64;
    let one = BigRational::one();
    let total = structure_count(params.kind, params.n)?;
    let base = rat_pow(&(&one - &params.delta_n), -c)
        * BigRational::new(count, total)
        * rat_pow(&params.p, -(params.e_h as i64));
    let decay = &one - &params.delta_n / &params.q;
    Ok(base * rat_pow(&decay, g.edge_count() as i64))
}

/// Per-graph probabilities under both hypotheses:
/// P(G) = (count(G)/#structures) · p^{e_G - e_H} (1-p)^{C - e_G} and
/// Q(G) = q^{e_G} (1-q)^{C - e_G}.
struct EnumContext {
    params: ExactModelParams,
    total_structures: BigInt,
    pow_p: Vec<BigRational>,
    pow_1p: Vec<BigRational>,
    pow_q: Vec<BigRational>,
    pow_1q: Vec<BigRational>,
}

impl EnumContext {
    fn new(params: &ExactModelParams) -> Result<Self> {
        let c = params.edge_slots();
        let one = BigRational::one();
        let table = |base: &BigRational| -> Vec<BigRational> {
            let mut v = Vec::with_capacity(c + 1);
            let mut acc = BigRational::one();
            for _ in 0..=c {
                v.push(acc.clone());
                acc *= base;
            }
            v
        };
        Ok(EnumContext {
            total_structures: structure_count(params.kind, params.n)?,
            pow_p: table(&params.p),
            pow_1p: table(&(&one - &params.p)),
            pow_q: table(&params.q),
            pow_1q: table(&(&one - &params.q)),
            params: params.clone(),
        })
    }

    fn p_q_of(&self, bits: u64) -> Result<(BigRational, BigRational)> {
        let c = self.params.edge_slots();
        let g = Graph::from_bits_u64(self.params.n, bits)?;
        let e_g = g.edge_count();
        let q_mass = &self.pow_q[e_g] * &self.pow_1q[c - e_g];
        let count = structures_in(&g, self.params.kind)?;
        let p_mass = if count.is_zero() || e_g < self.params.e_h {
            BigRational::zero()
        } else {
            BigRational::new(count, self.total_structures.clone())
                * &self.pow_p[e_g - self.params.e_h]
                * &self.pow_1p[c - e_g]
        };
        Ok((p_mass, q_mass))
    }
}

#[derive(Clone)]
struct Sums {
    abs_diff: BigRational,
    chi2: BigRational,
    p_total: BigRational,
    q_total: BigRational,
}

impl Sums {
    fn zero() -> Self {
        Sums {
            abs_diff: BigRational::zero(),
            chi2: BigRational::zero(),
            p_total: BigRational::zero(),
            q_total: BigRational::zero(),
        }
    }

    fn absorb(mut self, other: Sums) -> Self {
        self.abs_diff += other.abs_diff;
        self.chi2 += other.chi2;
        self.p_total += other.p_total;
        self.q_total += other.q_total;
        self
    }

    fn add_graph(&mut self, p: BigRational, q: BigRational) {
        let diff = &p - &q;
        self.abs_diff += if diff < BigRational::zero() { -diff } else { diff };
        self.chi2 += &p * &p / &q;
        self.p_total += p;
        self.q_total += q;
    }
}

/// Exact TV distance, χ² divergence, and optimal-test risk by enumerating all
/// 2^C(n,2) graphs. Capacity n <= 6. The rational partial sums make the
/// reduction order irrelevant, so the enumeration may be split across
/// workers freely.
pub fn exact_divergences(params: &ExactModelParams) -> Result<DivergenceReport> {
    check_open_interval(&params.p)?;
    if params.n > 6 {
        return Err(Error::Capacity(format!(
            "divergence enumeration supports n <= 6, got {}",
            params.n
        )));
    }
    let ctx = EnumContext::new(params)?;
    let total_graphs: u64 = 1u64 << params.edge_slots();

    #[cfg(feature = "parallel")]
    let sums = (0..total_graphs)
        .into_par_iter()
        .try_fold(Sums::zero, |mut acc, bits| {
            let (p, q) = ctx.p_q_of(bits)?;
            acc.add_graph(p, q);
            Ok::<Sums, Error>(acc)
        })
        .try_reduce(Sums::zero, |a, b| Ok(a.absorb(b)))?;

    #[cfg(not(feature = "parallel"))]
    let sums = {
        let mut acc = Sums::zero();
        for bits in 0..total_graphs {
            let (p, q) = ctx.p_q_of(bits)?;
            acc.add_graph(p, q);
        }
        acc
    };

    debug_assert!(sums.p_total.is_one() && sums.q_total.is_one());
    let one = BigRational::one();
    let tv = sums.abs_diff / BigRational::from_integer(BigInt::from(2));
    let chi2 = sums.chi2 - &one;
    let optimal_risk = &one - &tv;
    Ok(DivergenceReport {
        n: params.n,
        kind: params.kind,
        p: params.p.clone(),
        tv,
        chi2,
        optimal_risk,
    })
}

/// Normalization check: Σ_G P(G) and Σ_G Q(G), both exactly 1 for valid
/// parameters.
pub fn mass_totals(params: &ExactModelParams) -> Result<(BigRational, BigRational)> {
    let ctx = EnumContext::new(params)?;
    let mut p_total = BigRational::zero();
    let mut q_total = BigRational::zero();
    for bits in 0..(1u64 << params.edge_slots()) {
        let (p, q) = ctx.p_q_of(bits)?;
        p_total += p;
        q_total += q;
    }
    Ok((p_total, q_total))
}

/// First-moment identity Σ_G Q(G) L(G), evaluated through the likelihood
/// ratio (the density route, distinct from the direct mass sum).
pub fn q_weighted_likelihood_sum(params: &ExactModelParams) -> Result<BigRational> {
    check_open_interval(&params.p)?;
    if params.n > 6 {
        return Err(Error::Capacity(format!(
            "enumeration supports n <= 6, got {}",
            params.n
        )));
    }
    let ctx = EnumContext::new(params)?;
    let mut acc = BigRational::zero();
    for bits in 0..(1u64 << params.edge_slots()) {
        let g = Graph::from_bits_u64(params.n, bits)?;
        let e_g = g.edge_count();
        let q_mass = &ctx.pow_q[e_g] * &ctx.pow_1q[params.edge_slots() - e_g];
        acc += q_mass * likelihood_ratio(&g, params)?;
    }
    Ok(acc)
}

/// Second-moment route: Σ_G Q(G) L(G)², for the oracle-consistency check
/// E_Q[L²] - 1 == χ².
pub fn q_weighted_likelihood_square_sum(params: &ExactModelParams) -> Result<BigRational> {
    check_open_interval(&params.p)?;
    if params.n > 6 {
        return Err(Error::Capacity(format!(
            "enumeration supports n <= 6, got {}",
            params.n
        )));
    }
    let ctx = EnumContext::new(params)?;
    let mut acc = BigRational::zero();
    for bits in 0..(1u64 << params.edge_slots()) {
        let g = Graph::from_bits_u64(params.n, bits)?;
        let e_g = g.edge_count();
        let q_mass = &ctx.pow_q[e_g] * &ctx.pow_1q[params.edge_slots() - e_g];
        let l = likelihood_ratio(&g, params)?;
        acc += q_mass * (&l * &l);
    }
    Ok(acc)
}

impl DivergenceReport {
    pub fn tv_f64(&self) -> f64 {
        self.tv.to_f64().unwrap_or(f64::NAN)
    }

    pub fn chi2_f64(&self) -> f64 {
        self.chi2.to_f64().unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::enumerate::{enumerate_matchings, enumerate_trees};

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    fn params(n: usize, kind: ModelKind, a: i64, b: i64) -> ExactModelParams {
        ExactModelParams::new(n, kind, rat(a, b)).unwrap()
    }

    #[test]
    fn likelihood_zero_without_contained_structure() {
        let p = params(4, ModelKind::Matching, 1, 10);
        let g = Graph::from_edges(4, &[(0, 1)]).unwrap();
        assert!(likelihood_ratio(&g, &p).unwrap().is_zero());
    }

    #[test]
    fn likelihood_rejects_degenerate_p() {
        let p = params(4, ModelKind::Matching, 0, 1);
        assert!(likelihood_ratio(&Graph::complete(4), &p).is_err());
        let p = params(4, ModelKind::Matching, 1, 1);
        assert!(likelihood_ratio(&Graph::complete(4), &p).is_err());
    }

    #[test]
    fn likelihood_of_complete_graph_matches_direct_ratio() {
        // L(K_4) must equal P(K_4)/Q(K_4) computed from first principles:
        // P(K_4) = p^4 (all six edges present, matching contained surely),
        // Q(K_4) = q^6.
        let p = params(4, ModelKind::Matching, 1, 10);
        let l = likelihood_ratio(&Graph::complete(4), &p).unwrap();
        let direct = rat_pow(&p.p, 4) / rat_pow(&p.q, 6);
        assert_eq!(l, direct);
    }

    #[test]
    fn probability_masses_normalize_exactly() {
        for kind in [ModelKind::Matching, ModelKind::SpanningTree] {
            let p = params(4, kind, 1, 10);
            let (pm, qm) = mass_totals(&p).unwrap();
            assert!(pm.is_one(), "{kind}: P mass {pm}");
            assert!(qm.is_one(), "{kind}: Q mass {qm}");
        }
    }

    #[test]
    fn divergence_identities_at_n4() {
        let p = params(4, ModelKind::Matching, 1, 10);
        let rep = exact_divergences(&p).unwrap();
        assert_eq!(rep.optimal_risk, BigRational::one() - &rep.tv);
        // Cauchy–Schwarz direction as an exact squared comparison.
        let four = BigRational::from_integer(BigInt::from(4));
        assert!(four * &rep.tv * &rep.tv <= rep.chi2);
        // Oracle consistency: chi2 equals E_Q[L^2] - 1 via the likelihood route.
        let via_l = q_weighted_likelihood_square_sum(&p).unwrap() - BigRational::one();
        assert_eq!(via_l, rep.chi2);
    }

    /// Independent dual-path enumerator: accumulate P's mass by summing over
    /// (structure, background) pairs instead of using per-graph counts.
    fn tv_by_pair_enumeration(par: &ExactModelParams) -> BigRational {
        let c = par.edge_slots();
        let structs = match par.kind {
            ModelKind::Matching => enumerate_matchings(par.n).unwrap(),
            ModelKind::SpanningTree => enumerate_trees(par.n).unwrap(),
        };
        let masks: Vec<u64> = structs
            .iter()
            .map(|edges| edges.iter().fold(0u64, |m, e| m | 1u64 << e.index()))
            .collect();
        let one = BigRational::one();
        let h_mass = BigRational::new(BigInt::one(), BigInt::from(masks.len() as u64));
        let mut p_mass = vec![BigRational::zero(); 1 << c];
        for &h in &masks {
            for bg in 0u64..(1 << c) {
                let union = (h | bg) as usize;
                let e_bg = bg.count_ones() as i64;
                p_mass[union] += &h_mass
                    * rat_pow(&par.p, e_bg)
                    * rat_pow(&(&one - &par.p), c as i64 - e_bg);
            }
        }
        let mut abs = BigRational::zero();
        for (bits, pm) in p_mass.iter().enumerate() {
            let e_g = (bits as u64).count_ones() as i64;
            let qm = rat_pow(&par.q, e_g) * rat_pow(&(&one - &par.q), c as i64 - e_g);
            let d = pm - &qm;
            abs += if d < BigRational::zero() { -d } else { d };
        }
        abs / BigRational::from_integer(BigInt::from(2))
    }

    #[test]
    fn tv_agrees_with_pair_enumeration_oracle() {
        let p = params(4, ModelKind::Matching, 1, 10);
        let rep = exact_divergences(&p).unwrap();
        assert_eq!(rep.tv, tv_by_pair_enumeration(&p));
        let pt = params(4, ModelKind::SpanningTree, 1, 4);
        let rept = exact_divergences(&pt).unwrap();
        assert_eq!(rept.tv, tv_by_pair_enumeration(&pt));
    }

    #[test]
    fn capacity_guard() {
        let p = params(8, ModelKind::Matching, 1, 10);
        assert!(matches!(
            exact_divergences(&p),
            Err(crate::error::Error::Capacity(_))
        ));
    }
}
