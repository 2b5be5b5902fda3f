//! The polynomial-time degree-variance test and the calibrated edge-count
//! negative control.
//!
//! The variance test partitions the edges of K_n into parts P_1..P_n, one per
//! vertex (a near-regular tournament), counts the observed edges X_i in each
//! part, and evaluates Y = (1/n) Σ (X_i - |P_i| q)². A planted structure
//! depresses the mean of Y by about 1/4, so Y below E_Q[Y] - 1/8 votes
//! "planted".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge_index_unchecked, edge_slot_count, EdgeId, Graph};
use crate::model::ModelParams;
use crate::util::KahanSum;

/// Default offset below the null mean for the variance-test threshold.
pub const DEFAULT_Y_OFFSET: f64 = 0.125;

/// Owner vertex of edge `{i, j}` (`i < j`) in the fixed near-regular
/// tournament: `i` takes the edge when `(j - i) mod n` lies in the first half
/// of the cycle distances, `j` otherwise. For even `n` the antipodal edges
/// `(j - i) = n/2` go to the endpoint in the first half, which for `i < j`
/// is always `i`. Both cases collapse to one comparison.
#[inline]
pub fn part_owner(i: usize, j: usize, n: usize) -> usize {
    debug_assert!(i < j && j < n);
    if 2 * (j - i) <= n {
        i
    } else {
        j
    }
}

/// Partition P_1..P_n of K_n's edges with every edge of P_i incident to
/// vertex i and near-regular part sizes.
#[derive(Clone, Debug)]
pub struct TournamentPartition {
    pub n: usize,
    pub parts: Vec<Vec<EdgeId>>,
    pub sizes: Vec<u32>,
}

pub fn build_tournament_partition(n: usize) -> Result<TournamentPartition> {
    if n < 2 {
        return Err(Error::Model(format!("need n >= 2, got {n}")));
    }
    let mut parts = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let owner = part_owner(i, j, n);
            parts[owner].push(EdgeId(edge_index_unchecked(i, j, n) as u32));
        }
    }
    let sizes = parts.iter().map(|p| p.len() as u32).collect();
    Ok(TournamentPartition { n, parts, sizes })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Null,
    Planted,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DetectorOutcome {
    pub statistic: f64,
    pub threshold: f64,
    pub decision: Decision,
}

/// E_Q[Y] = (n-1)/2 · q(1-q). Identical to (1/n) Σ |P_i| q(1-q) because the
/// part sizes sum to C(n,2).
pub fn null_mean_y(params: &ModelParams) -> f64 {
    let q = params.q;
    (params.n - 1) as f64 / 2.0 * q * (1.0 - q)
}

/// The degree-variance statistic Y = (1/n) Σ_i (X_i - |P_i| q)², where X_i
/// counts the observed edges inside part P_i. Centering uses the exact
/// finite-n mean |P_i| q, which is the same under both hypotheses.
pub fn y_statistic(
    graph: &Graph,
    partition: &TournamentPartition,
    params: &ModelParams,
) -> Result<f64> {
    if graph.n() != partition.n {
        return Err(Error::DimensionMismatch {
            left: graph.n(),
            right: partition.n,
        });
    }
    let q = params.q;
    // Y aggregates n squared terms; compensated summation keeps cross-platform
    // drift below the test tolerances at large n.
    let mut acc = KahanSum::new();
    for (part, &size) in partition.parts.iter().zip(&partition.sizes) {
        let x: u32 = part.iter().map(|&e| graph.has_edge_id(e) as u32).sum();
        let dev = x as f64 - size as f64 * q;
        acc.add(dev * dev);
    }
    Ok(acc.total() / partition.n as f64)
}

/// Variance test with an explicit threshold offset: decide Null iff
/// Y > E_Q[Y] - offset. Exact ties decide Planted.
pub fn y_detect_with_offset(
    graph: &Graph,
    partition: &TournamentPartition,
    params: &ModelParams,
    offset: f64,
) -> Result<DetectorOutcome> {
    let statistic = y_statistic(graph, partition, params)?;
    let threshold = null_mean_y(params) - offset;
    let decision = if statistic > threshold {
        Decision::Null
    } else {
        Decision::Planted
    };
    Ok(DetectorOutcome {
        statistic,
        threshold,
        decision,
    })
}

/// Variance test at the standard offset of 1/8.
pub fn y_detect(
    graph: &Graph,
    partition: &TournamentPartition,
    params: &ModelParams,
) -> Result<DetectorOutcome> {
    y_detect_with_offset(graph, partition, params, DEFAULT_Y_OFFSET)
}

/// Edge-count test: decide Planted iff e_G exceeds C(n,2)q by more than
/// `threshold_sd` null standard deviations. The calibration equalizes the
/// means, so this control hovers near risk 1 for any threshold.
pub fn edge_count_detect(
    graph: &Graph,
    params: &ModelParams,
    threshold_sd: f64,
) -> DetectorOutcome {
    let slots = edge_slot_count(graph.n()) as f64;
    let mean = slots * params.q;
    let sd = (slots * params.q * (1.0 - params.q)).sqrt();
    let statistic = graph.edge_count() as f64;
    let threshold = mean + threshold_sd * sd;
    let decision = if statistic > threshold {
        Decision::Planted
    } else {
        Decision::Null
    };
    DetectorOutcome {
        statistic,
        threshold,
        decision,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_pair;
    use crate::model::ModelKind;
    use crate::sample::PlantedStructure;

    fn partition_invariants_hold(n: usize) {
        let tp = build_tournament_partition(n).unwrap();
        let mut seen = vec![false; edge_slot_count(n)];
        let (hi, lo) = ((n - 1).div_ceil(2), (n - 1) / 2);
        for (i, part) in tp.parts.iter().enumerate() {
            let size = part.len();
            assert!(
                size == hi || size == lo,
                "n={n} part {i} has size {size}, expected {lo} or {hi}"
            );
            for &e in part {
                assert!(!seen[e.index()], "n={n}: edge {e:?} assigned twice");
                seen[e.index()] = true;
                let (a, b) = edge_pair(e, n).unwrap();
                assert!(a == i || b == i, "n={n}: edge {e:?} not incident to {i}");
            }
        }
        assert!(seen.iter().all(|&s| s), "n={n}: partition not exhaustive");
    }

    #[test]
    fn partition_structural_invariants_small() {
        for n in 2..=200 {
            partition_invariants_hold(n);
        }
    }

    #[test]
    fn partition_structural_invariants_full_range() {
        for n in 201..=1000 {
            partition_invariants_hold(n);
        }
    }

    #[test]
    fn partition_part_sizes_examples() {
        let tp5 = build_tournament_partition(5).unwrap();
        assert_eq!(tp5.sizes, vec![2, 2, 2, 2, 2]);
        let tp4 = build_tournament_partition(4).unwrap();
        assert_eq!(tp4.sizes, vec![2, 2, 1, 1]);
        assert!(build_tournament_partition(1).is_err());
    }

    #[test]
    fn null_mean_examples() {
        let params = ModelParams::new(4, ModelKind::Matching, 0.0).unwrap();
        assert!((null_mean_y(&params) - 1.0 / 3.0).abs() < 1e-15);
        // q = 0 and q = 1 both zero the variance.
        let p1 = ModelParams::new(6, ModelKind::Matching, 1.0).unwrap();
        assert_eq!(null_mean_y(&p1), 0.0);
        let p0 = ModelParams {
            q: 0.0,
            ..ModelParams::new(6, ModelKind::Matching, 0.0).unwrap()
        };
        assert_eq!(null_mean_y(&p0), 0.0);
    }

    #[test]
    fn y_statistic_hand_computed_values() {
        // n=4, q=1/3, part sizes (2,2,1,1).
        let params = ModelParams::new(4, ModelKind::Matching, 0.0).unwrap();
        let tp = build_tournament_partition(4).unwrap();
        let empty = Graph::empty(4);
        assert!((y_statistic(&empty, &tp, &params).unwrap() - 5.0 / 18.0).abs() < 1e-15);
        let full = Graph::complete(4);
        assert!((y_statistic(&full, &tp, &params).unwrap() - 10.0 / 9.0).abs() < 1e-15);
        assert!(y_statistic(&Graph::empty(6), &tp, &params).is_err());
    }

    #[test]
    fn y_detect_empty_graph_votes_null() {
        // Y = 5/18 > 1/3 - 1/8 = 5/24.
        let params = ModelParams::new(4, ModelKind::Matching, 0.0).unwrap();
        let tp = build_tournament_partition(4).unwrap();
        let out = y_detect(&Graph::empty(4), &tp, &params).unwrap();
        assert_eq!(out.decision, Decision::Null);
        assert!((out.threshold - 5.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn y_detect_all_three_matchings_at_n4() {
        // With zero background the observed graph is the matching itself.
        // Enumerating all three matchings of K_4 against the fixed partition:
        // {02,13} scores Y = 1/9 (detected), while {01,23} and {03,12} both
        // score Y = 5/18 (missed). Exactly one of three is detected; the
        // asymptotic quarter-separation has no force at n = 4.
        let params = ModelParams::new(4, ModelKind::Matching, 0.0).unwrap();
        let tp = build_tournament_partition(4).unwrap();
        let cases = [
            (vec![(0, 1), (2, 3)], Decision::Null),
            (vec![(0, 2), (1, 3)], Decision::Planted),
            (vec![(0, 3), (1, 2)], Decision::Null),
        ];
        let mut planted_votes = 0;
        for (edges, expected) in cases {
            let g = Graph::from_edges(4, &edges).unwrap();
            let out = y_detect(&g, &tp, &params).unwrap();
            assert_eq!(out.decision, expected, "matching {edges:?}");
            planted_votes += (out.decision == Decision::Planted) as u32;
        }
        assert_eq!(planted_votes, 1);
    }

    #[test]
    fn y_detect_tie_decides_planted() {
        let params = ModelParams::new(4, ModelKind::Matching, 0.0).unwrap();
        let tp = build_tournament_partition(4).unwrap();
        let g = Graph::empty(4);
        let y = y_statistic(&g, &tp, &params).unwrap();
        // Offset chosen so the threshold equals the statistic exactly.
        let out = y_detect_with_offset(&g, &tp, &params, null_mean_y(&params) - y).unwrap();
        assert_eq!(out.statistic, out.threshold);
        assert_eq!(out.decision, Decision::Planted);
    }

    #[test]
    fn edge_count_detect_edge_cases() {
        let params = ModelParams::new(16, ModelKind::Matching, 0.2).unwrap();
        let out = edge_count_detect(&Graph::complete(16), &params, f64::INFINITY);
        assert_eq!(out.decision, Decision::Null);
        let out = edge_count_detect(&Graph::empty(16), &params, 0.0);
        assert_eq!(out.decision, Decision::Null);
    }

    #[test]
    fn planted_structure_graph_roundtrip() {
        let h = PlantedStructure {
            kind: ModelKind::Matching,
            n: 4,
            edges: vec![EdgeId(0), EdgeId(5)],
        };
        assert_eq!(h.as_graph().edge_count(), 2);
    }
}
