//! Reproducible Monte Carlo experiments: risk estimation for a registered
//! detector, p-sweeps across the detection threshold, and Monte Carlo χ²
//! estimation from structure pairs.
//!
//! Reproducibility contract: every trial owns the RNG stream derived from
//! `(master seed; domain, cell index, hypothesis, trial index)`, and all
//! aggregation is either integer counting or a fixed-order reduction, so
//! reports are byte-identical across runs and thread counts.

use std::fmt;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{ln_moment_prefactor, moment_params};
use crate::detect::{
    build_tournament_partition, edge_count_detect, y_detect_with_offset, y_statistic, Decision,
    TournamentPartition, DEFAULT_Y_OFFSET,
};
use crate::error::{Error, Result};
use crate::model::{ModelKind, ModelParams};
use crate::sample::{sample_null, sample_planted, sample_structure, SeededRng};
use crate::util::mean_and_sd;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hypothesis {
    Null,
    Planted,
}

/// Stream-id families; distinct experiments never share a stream.
#[derive(Clone, Copy, Debug)]
pub enum StreamDomain {
    RiskTrial = 0,
    StructurePair = 1,
    StatisticBatch = 2,
}

/// Pack (domain, cell, hypothesis, trial) into one 64-bit stream id:
/// 2 domain bits, 29 cell bits, 1 hypothesis bit, 32 trial bits.
pub fn trial_stream(domain: StreamDomain, cell: u64, hyp: Hypothesis, trial: u64) -> u64 {
    assert!(cell < 1 << 29, "cell index out of stream range");
    assert!(trial < 1 << 32, "trial index out of stream range");
    let h = matches!(hyp, Hypothesis::Planted) as u64;
    (domain as u64) << 62 | cell << 33 | h << 32 | trial
}

/// Ordered map over trial indices; parallel when the feature and flag allow,
/// with output order fixed by index either way.
fn collect_indexed<T: Send, F: Fn(u64) -> T + Sync + Send>(count: u64, parallel: bool, f: F) -> Vec<T> {
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..count).map(f).collect()
}

/// Count trials satisfying a predicate; integer sum, so reduction order is
/// irrelevant.
fn count_indexed<F: Fn(u64) -> bool + Sync + Send>(count: u64, parallel: bool, f: F) -> u64 {
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..count).into_par_iter().map(|i| f(i) as u64).sum();
    }
    let _ = parallel;
    (0..count).map(|i| f(i) as u64).sum()
}

/// A registered detector: the degree-variance test, the edge-count negative
/// control, and two trivial baselines used to sanity-check the risk harness
/// itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DetectorSpec {
    YVar { offset: f64 },
    EdgeCount { threshold_sd: f64 },
    AlwaysNull,
    CoinFlip,
}

impl DetectorSpec {
    pub fn yvar() -> Self {
        DetectorSpec::YVar {
            offset: DEFAULT_Y_OFFSET,
        }
    }

    fn needs_partition(&self) -> bool {
        matches!(self, DetectorSpec::YVar { .. })
    }

    fn decide(
        &self,
        graph: &crate::graph::Graph,
        params: &ModelParams,
        partition: Option<&TournamentPartition>,
        rng: &mut rand_chacha::ChaCha8Rng,
    ) -> Decision {
        match self {
            DetectorSpec::YVar { offset } => {
                let partition = partition.expect("yvar detector requires a partition");
                y_detect_with_offset(graph, partition, params, *offset)
                    .expect("partition dimension checked at cell setup")
                    .decision
            }
            DetectorSpec::EdgeCount { threshold_sd } => {
                edge_count_detect(graph, params, *threshold_sd).decision
            }
            DetectorSpec::AlwaysNull => Decision::Null,
            DetectorSpec::CoinFlip => {
                use rand::Rng;
                if rng.random::<bool>() {
                    Decision::Planted
                } else {
                    Decision::Null
                }
            }
        }
    }
}

impl fmt::Display for DetectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DetectorSpec::YVar { .. } => "yvar",
            DetectorSpec::EdgeCount { .. } => "edgecount",
            DetectorSpec::AlwaysNull => "always-null",
            DetectorSpec::CoinFlip => "coin-flip",
        })
    }
}

impl FromStr for DetectorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "yvar" => Ok(DetectorSpec::yvar()),
            "edgecount" => Ok(DetectorSpec::EdgeCount { threshold_sd: 0.0 }),
            other => Err(Error::UnknownDetector(other.to_string())),
        }
    }
}

/// One row of a risk report.
#[derive(Clone, Debug, Serialize)]
pub struct RiskRecord {
    pub n: usize,
    pub p: f64,
    pub model: ModelKind,
    pub detector: String,
    pub trials: u64,
    pub false_alarm: f64,
    pub miss: f64,
    pub risk: f64,
    pub half_width: f64,
    pub seed: u64,
}

fn estimate_risk_impl(
    params: &ModelParams,
    detector: DetectorSpec,
    trials: u64,
    master_seed: u64,
    cell_index: u64,
    parallel: bool,
) -> Result<RiskRecord> {
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let partition = if detector.needs_partition() {
        Some(build_tournament_partition(params.n)?)
    } else {
        None
    };
    let partition = partition.as_ref();

    let run_side = |hyp: Hypothesis| -> u64 {
        count_indexed(trials, parallel, |t| {
            let mut rng = SeededRng::new(
                master_seed,
                trial_stream(StreamDomain::RiskTrial, cell_index, hyp, t),
            )
            .rng();
            let (graph, truth) = match hyp {
                Hypothesis::Null => (
                    sample_null(params, &mut rng).expect("params validated"),
                    Decision::Null,
                ),
                Hypothesis::Planted => (
                    sample_planted(params, &mut rng).expect("params validated").0,
                    Decision::Planted,
                ),
            };
            detector.decide(&graph, params, partition, &mut rng) != truth
        })
    };

    let false_alarms = run_side(Hypothesis::Null);
    let misses = run_side(Hypothesis::Planted);
    let t = trials as f64;
    let false_alarm = false_alarms as f64 / t;
    let miss = misses as f64 / t;
    // Normal-approximation 95% half-width of the Bernoulli-sum estimate.
    let half_width =
        1.96 * (false_alarm * (1.0 - false_alarm) / t + miss * (1.0 - miss) / t).sqrt();
    Ok(RiskRecord {
        n: params.n,
        p: params.p,
        model: params.kind,
        detector: detector.to_string(),
        trials,
        false_alarm,
        miss,
        // Emitted as the f64 sum of the two emitted rates so the additivity
        // invariant is checkable from the report alone.
        risk: false_alarm + miss,
        half_width,
        seed: master_seed,
    })
}

/// Empirical risk of a detector over `trials` independent draws from each
/// hypothesis. Deterministic given `(master_seed, cell_index)`.
pub fn estimate_risk(
    params: &ModelParams,
    detector: DetectorSpec,
    trials: u64,
    master_seed: u64,
    cell_index: u64,
) -> Result<RiskRecord> {
    estimate_risk_impl(params, detector, trials, master_seed, cell_index, true)
}

/// Sequential fallback of [`estimate_risk`]; same output bytes.
pub fn estimate_risk_sequential(
    params: &ModelParams,
    detector: DetectorSpec,
    trials: u64,
    master_seed: u64,
    cell_index: u64,
) -> Result<RiskRecord> {
    estimate_risk_impl(params, detector, trials, master_seed, cell_index, false)
}

/// The p values swept by an experiment: an explicit list or a power law
/// `c * n^-a` evaluated per n.
#[derive(Clone, Debug, PartialEq)]
pub enum PSpec {
    PowerLaw { c: f64, a: f64 },
    List(Vec<f64>),
}

impl PSpec {
    pub fn values_for(&self, n: usize) -> Vec<f64> {
        match self {
            PSpec::PowerLaw { c, a } => vec![c * (n as f64).powf(-a)],
            PSpec::List(ps) => ps.clone(),
        }
    }
}

/// Parse a power-law expression of the form `c*n^-a` (decimal c and a; the
/// `c*` prefix may be omitted).
pub fn parse_p_expr(s: &str) -> Result<PSpec> {
    let err = || Error::Config(format!("bad p-expression `{s}`; expected c*n^-a"));
    let (c, rest) = match s.split_once('*') {
        Some((c, rest)) => (c.trim().parse::<f64>().map_err(|_| err())?, rest.trim()),
        None => (1.0, s.trim()),
    };
    let a = rest
        .strip_prefix("n^-")
        .and_then(|a| a.trim().parse::<f64>().ok())
        .ok_or_else(err)?;
    Ok(PSpec::PowerLaw { c, a })
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n_list: Vec<usize>,
    pub p_spec: PSpec,
    pub kind: ModelKind,
    pub detector: DetectorSpec,
    pub trials: u64,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Cells in report order: the Cartesian product of n-list and p-list.
    pub fn cells(&self) -> Result<Vec<(usize, f64)>> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        let mut cells = Vec::new();
        for &n in &self.n_list {
            for p in self.p_spec.values_for(n) {
                if !(p > 0.0 && p < 1.0) {
                    return Err(Error::Config(format!(
                        "p must lie in (0,1) after evaluation, got {p} at n={n}"
                    )));
                }
                cells.push((n, p));
            }
        }
        Ok(cells)
    }
}

/// Run every cell of the sweep. Cells are individually reproducible from
/// `(master seed, cell index)`; trials parallelize inside each cell.
pub fn risk_sweep(config: &ExperimentConfig) -> Result<Vec<RiskRecord>> {
    config
        .cells()?
        .into_iter()
        .enumerate()
        .map(|(idx, (n, p))| {
            let params = ModelParams::new(n, config.kind, p)?;
            estimate_risk(&params, config.detector, config.trials, config.seed, idx as u64)
        })
        .collect()
}

/// Frozen CSV rendering of a risk report.
pub fn risk_csv(records: &[RiskRecord]) -> String {
    let mut out = String::from("n,p,model,detector,trials,false_alarm,miss,risk,half_width,seed\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            r.n, r.p, r.model, r.detector, r.trials, r.false_alarm, r.miss, r.risk, r.half_width,
            r.seed
        ));
    }
    out
}

/// JSON report mirroring the CSV columns as field names.
pub fn risk_json(records: &[RiskRecord]) -> serde_json::Value {
    serde_json::to_value(records).expect("risk records serialize")
}

/// Monte Carlo χ² estimate from independent structure pairs.
#[derive(Clone, Debug, Serialize)]
pub struct Chi2McEstimate {
    pub n: usize,
    pub p: f64,
    pub model: ModelKind,
    pub pairs: u64,
    /// The MGF argument q_2.
    pub q2: f64,
    /// Sample mean of q_2^(-collisions).
    pub mgf_mean: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub seed: u64,
}

fn estimate_chi2_mc_impl(
    params: &ModelParams,
    pairs: u64,
    seed: u64,
    parallel: bool,
) -> Result<Chi2McEstimate> {
    if pairs < 1 {
        return Err(Error::Config("pairs must be >= 1".into()));
    }
    if !(params.p > 0.0 && params.p < 1.0) {
        return Err(Error::Degenerate("chi2 estimation requires p in (0,1)".into()));
    }
    let q2 = moment_params(params, 2)?.q_k;
    if q2 <= 0.0 {
        return Err(Error::Degenerate("q_2 vanished".into()));
    }
    let ln_q2 = q2.ln();
    let (n, kind) = (params.n, params.kind);
    // Per-pair weights gathered in trial order so the reduction below is
    // independent of the thread count.
    let weights = collect_indexed(pairs, parallel, |i| {
        let mut rng = SeededRng::new(
            seed,
            trial_stream(StreamDomain::StructurePair, 0, Hypothesis::Null, i),
        )
        .rng();
        let h1 = sample_structure(kind, n, &mut rng).expect("params validated");
        let h2 = sample_structure(kind, n, &mut rng).expect("params validated");
        (-(h1.collisions_with(&h2) as f64) * ln_q2).exp()
    });
    let (mean, sd) = mean_and_sd(&weights);
    let prefactor = ln_moment_prefactor(params, 2)?.exp();
    Ok(Chi2McEstimate {
        n,
        p: params.p,
        model: kind,
        pairs,
        q2,
        mgf_mean: mean,
        estimate: prefactor * mean - 1.0,
        std_error: prefactor * sd / (pairs as f64).sqrt(),
        seed,
    })
}

/// Unbiased Monte Carlo estimate of E[q_2^(-collisions)] plugged into the
/// second-moment formula, minus 1, with its standard error (which can be
/// large when q_2 is small; it is reported, not hidden).
pub fn estimate_chi2_mc(params: &ModelParams, pairs: u64, seed: u64) -> Result<Chi2McEstimate> {
    estimate_chi2_mc_impl(params, pairs, seed, true)
}

/// Sequential fallback of [`estimate_chi2_mc`]; same output bytes.
pub fn estimate_chi2_mc_sequential(
    params: &ModelParams,
    pairs: u64,
    seed: u64,
) -> Result<Chi2McEstimate> {
    estimate_chi2_mc_impl(params, pairs, seed, false)
}

/// Empirical collision pmf over Monte Carlo structure pairs, as frequencies
/// on the support `0..=e_H`.
pub fn mc_collision_pmf(n: usize, kind: ModelKind, pairs: u64, seed: u64) -> Result<Vec<f64>> {
    mc_collision_pmf_impl(n, kind, pairs, seed, true)
}

/// Sequential fallback of [`mc_collision_pmf`]; same output.
pub fn mc_collision_pmf_sequential(
    n: usize,
    kind: ModelKind,
    pairs: u64,
    seed: u64,
) -> Result<Vec<f64>> {
    mc_collision_pmf_impl(n, kind, pairs, seed, false)
}

fn mc_collision_pmf_impl(
    n: usize,
    kind: ModelKind,
    pairs: u64,
    seed: u64,
    parallel: bool,
) -> Result<Vec<f64>> {
    kind.check_n(n)?;
    if pairs < 1 {
        return Err(Error::Config("pairs must be >= 1".into()));
    }
    let e_h = kind.planted_edge_count(n)?;
    let counts = collect_indexed(pairs, parallel, |i| {
        let mut rng = SeededRng::new(
            seed,
            trial_stream(StreamDomain::StructurePair, 1, Hypothesis::Null, i),
        )
        .rng();
        let h1 = sample_structure(kind, n, &mut rng).expect("n validated");
        let h2 = sample_structure(kind, n, &mut rng).expect("n validated");
        h1.collisions_with(&h2)
    });
    let mut hist = vec![0u64; e_h + 1];
    for c in counts {
        hist[c] += 1;
    }
    Ok(hist.into_iter().map(|c| c as f64 / pairs as f64).collect())
}

/// Per-trial values of the degree-variance statistic under one hypothesis,
/// in trial order.
pub fn y_statistic_batch(
    params: &ModelParams,
    partition: &TournamentPartition,
    hyp: Hypothesis,
    trials: u64,
    seed: u64,
    cell_index: u64,
) -> Result<Vec<f64>> {
    if partition.n != params.n {
        return Err(Error::DimensionMismatch {
            left: partition.n,
            right: params.n,
        });
    }
    Ok(collect_indexed(trials, true, |t| {
        let mut rng = SeededRng::new(
            seed,
            trial_stream(StreamDomain::StatisticBatch, cell_index, hyp, t),
        )
        .rng();
        let graph = match hyp {
            Hypothesis::Null => sample_null(params, &mut rng).expect("params validated"),
            Hypothesis::Planted => {
                sample_planted(params, &mut rng).expect("params validated").0
            }
        };
        y_statistic(&graph, partition, params).expect("dimensions checked")
    }))
}
