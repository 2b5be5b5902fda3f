//! Seeded samplers for the null distribution G(n,q), the hidden structures
//! (uniform perfect matchings via permutation pairing, uniform spanning trees
//! via Prüfer decoding), and the planted distribution formed by their union.
//!
//! Determinism contract: every sampler consumes the RNG in a fixed order,
//! so an identical `(seed, stream_id)` pair reproduces bit-identical output
//! across runs, platforms, and thread counts. Concurrent trials must use
//! disjoint stream ids.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{edge_index_unchecked, EdgeId, Graph};
use crate::model::{ModelKind, ModelParams};

/// A reproducible RNG handle: a master seed plus a logical stream id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeededRng {
    pub seed: u64,
    pub stream_id: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        SeededRng { seed, stream_id }
    }

    /// Instantiate the concrete generator for this stream.
    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// A hidden structure: either a perfect matching or a spanning tree of K_n,
/// stored as a sorted list of canonical edge ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedStructure {
    pub kind: ModelKind,
    pub n: usize,
    pub edges: Vec<EdgeId>,
}

impl PlantedStructure {
    pub fn as_graph(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for &e in &self.edges {
            g.set_edge_id(e);
        }
        g
    }

    /// Shared-edge count with another structure. For two structures this is
    /// exactly `collisions(H1, H2) = 2 e_H - |E(H1 ∪ H2)|`.
    pub fn collisions_with(&self, other: &PlantedStructure) -> usize {
        // Both edge lists are sorted; merge-count the intersection.
        let (a, b) = (&self.edges, &other.edges);
        let (mut i, mut j, mut shared) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        shared
    }

    /// Check the defining invariants: matchings are vertex-disjoint and cover
    /// all vertices; trees are connected and acyclic with n-1 edges.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        let pairs: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&e| crate::graph::edge_pair(e, n))
            .collect::<Result<_>>()?;
        match self.kind {
            ModelKind::Matching => {
                if self.edges.len() != n / 2 {
                    return Err(Error::Model("matching has wrong edge count".into()));
                }
                let mut seen = vec![false; n];
                for (i, j) in pairs {
                    if seen[i] || seen[j] {
                        return Err(Error::Model("matching edges are not disjoint".into()));
                    }
                    seen[i] = true;
                    seen[j] = true;
                }
                if !seen.iter().all(|&s| s) {
                    return Err(Error::Model("matching does not cover all vertices".into()));
                }
            }
            ModelKind::SpanningTree => {
                if self.edges.len() != n - 1 {
                    return Err(Error::Model("tree has wrong edge count".into()));
                }
                let mut dsu: Vec<usize> = (0..n).collect();
                fn find(dsu: &mut Vec<usize>, mut x: usize) -> usize {
                    while dsu[x] != x {
                        dsu[x] = dsu[dsu[x]];
                        x = dsu[x];
                    }
                    x
                }
                for (i, j) in pairs {
                    let (ri, rj) = (find(&mut dsu, i), find(&mut dsu, j));
                    if ri == rj {
                        return Err(Error::Model("tree contains a cycle".into()));
                    }
                    dsu[ri] = rj;
                }
            }
        }
        Ok(())
    }
}

/// One Bernoulli(p) decision from a single `u64` draw. The draw is consumed
/// even for degenerate p, so the per-edge stream layout never depends on p.
#[inline]
fn bernoulli_draw(rng: &mut impl RngCore, p: f64) -> bool {
    let r = rng.next_u64();
    if p >= 1.0 {
        true
    } else if p <= 0.0 {
        false
    } else {
        // floor(p * 2^64) out of 2^64 equally likely values.
        r < (p * 18_446_744_073_709_551_616.0) as u64
    }
}

/// Sample G(n, prob): each of the C(n,2) edges present independently with
/// probability `prob`, drawn one per edge in canonical edge order.
pub fn sample_gnp(n: usize, prob: f64, rng: &mut impl RngCore) -> Result<Graph> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::Param(format!("probability out of range: {prob}")));
    }
    let mut g = Graph::empty(n);
    let mut idx = 0u32;
    for _i in 0..n {
        for _j in _i + 1..n {
            if bernoulli_draw(rng, prob) {
                g.set_edge_id(EdgeId(idx));
            }
            idx += 1;
        }
    }
    Ok(g)
}

/// Uniform perfect matching of K_n: shuffle the vertices uniformly and pair
/// consecutive elements.
pub fn sample_perfect_matching(n: usize, rng: &mut impl Rng) -> Result<PlantedStructure> {
    ModelKind::Matching.check_n(n)?;
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(rng);
    let mut edges: Vec<EdgeId> = verts
        .chunks_exact(2)
        .map(|c| {
            let (i, j) = (c[0].min(c[1]), c[0].max(c[1]));
            EdgeId(edge_index_unchecked(i, j, n) as u32)
        })
        .collect();
    edges.sort_unstable();
    Ok(PlantedStructure {
        kind: ModelKind::Matching,
        n,
        edges,
    })
}

/// Decode a Prüfer sequence into the edge list of the tree it encodes.
/// Linear-time pointer/leaf scan.
pub fn prufer_decode(code: &[usize], n: usize) -> Vec<(usize, usize)> {
    debug_assert_eq!(code.len() + 2, n);
    let mut degree = vec![1u32; n];
    for &a in code {
        degree[a] += 1;
    }
    let mut ptr = 0;
    while degree[ptr] != 1 {
        ptr += 1;
    }
    let mut leaf = ptr;
    let mut edges = Vec::with_capacity(n - 1);
    for &v in code {
        edges.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 && v < ptr {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    edges.push((leaf.min(n - 1), leaf.max(n - 1)));
    edges
}

/// Uniform spanning tree of K_n: draw a uniform sequence in [n]^(n-2) and
/// Prüfer-decode it.
pub fn sample_spanning_tree(n: usize, rng: &mut impl Rng) -> Result<PlantedStructure> {
    ModelKind::SpanningTree.check_n(n)?;
    let code: Vec<usize> = (0..n.saturating_sub(2))
        .map(|_| rng.random_range(0..n))
        .collect();
    let mut edges: Vec<EdgeId> = prufer_decode(&code, n)
        .into_iter()
        .map(|(i, j)| EdgeId(edge_index_unchecked(i, j, n) as u32))
        .collect();
    edges.sort_unstable();
    Ok(PlantedStructure {
        kind: ModelKind::SpanningTree,
        n,
        edges,
    })
}

pub fn sample_structure(kind: ModelKind, n: usize, rng: &mut impl Rng) -> Result<PlantedStructure> {
    match kind {
        ModelKind::Matching => sample_perfect_matching(n, rng),
        ModelKind::SpanningTree => sample_spanning_tree(n, rng),
    }
}

/// Draw from the planted distribution P: a G(n,p) background first, then an
/// independent hidden structure, returned together with their union.
pub fn sample_planted(
    params: &ModelParams,
    rng: &mut impl Rng,
) -> Result<(Graph, PlantedStructure)> {
    let mut g = sample_gnp(params.n, params.p, rng)?;
    let h = sample_structure(params.kind, params.n, rng)?;
    for &e in &h.edges {
        g.set_edge_id(e);
    }
    Ok((g, h))
}

/// Draw from the calibrated null distribution Q = G(n, q).
pub fn sample_null(params: &ModelParams, rng: &mut impl RngCore) -> Result<Graph> {
    sample_gnp(params.n, params.q, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::edge_slot_count;
    use std::collections::HashMap;

    #[test]
    fn gnp_degenerate_probabilities() {
        let mut rng = SeededRng::new(1, 0).rng();
        assert_eq!(sample_gnp(20, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(
            sample_gnp(20, 1.0, &mut rng).unwrap().edge_count(),
            edge_slot_count(20)
        );
        assert!(sample_gnp(20, 1.5, &mut rng).is_err());
    }

    #[test]
    fn same_stream_is_bit_identical_distinct_streams_differ() {
        let a = sample_gnp(50, 0.3, &mut SeededRng::new(7, 3).rng()).unwrap();
        let b = sample_gnp(50, 0.3, &mut SeededRng::new(7, 3).rng()).unwrap();
        let c = sample_gnp(50, 0.3, &mut SeededRng::new(7, 4).rng()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn matching_base_cases() {
        let mut rng = SeededRng::new(2, 0).rng();
        let m = sample_perfect_matching(2, &mut rng).unwrap();
        assert_eq!(m.edges, vec![EdgeId(0)]);
        m.validate().unwrap();
        assert!(sample_perfect_matching(3, &mut rng).is_err());
    }

    #[test]
    fn tree_base_cases() {
        let mut rng = SeededRng::new(3, 0).rng();
        let t = sample_spanning_tree(2, &mut rng).unwrap();
        assert_eq!(t.edges, vec![EdgeId(0)]);
        t.validate().unwrap();
        assert!(sample_spanning_tree(1, &mut rng).is_err());
    }

    #[test]
    fn sampled_structures_satisfy_invariants() {
        let mut rng = SeededRng::new(4, 0).rng();
        for n in [4usize, 10, 64, 101] {
            if n % 2 == 0 {
                sample_perfect_matching(n, &mut rng).unwrap().validate().unwrap();
            }
            sample_spanning_tree(n, &mut rng).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn planted_with_zero_background_equals_structure() {
        for kind in [ModelKind::Matching, ModelKind::SpanningTree] {
            let params = ModelParams::new(8, kind, 0.0).unwrap();
            let mut rng = SeededRng::new(5, 1).rng();
            let (g, h) = sample_planted(&params, &mut rng).unwrap();
            assert_eq!(g, h.as_graph());
            assert_eq!(g.edge_count(), params.e_h);
            h.validate().unwrap();
        }
    }

    #[test]
    fn small_tree_frequencies_are_uniform() {
        // n=3 has exactly 3 trees (the 3 paths); each should appear ~1/3.
        let mut rng = SeededRng::new(6, 0).rng();
        let mut counts: HashMap<Vec<EdgeId>, u32> = HashMap::new();
        let trials = 30_000;
        for _ in 0..trials {
            let t = sample_spanning_tree(3, &mut rng).unwrap();
            *counts.entry(t.edges).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for (_k, c) in counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "freq={freq}");
        }
    }

    #[test]
    fn collision_count_matches_union_identity() {
        let mut rng = SeededRng::new(8, 0).rng();
        for _ in 0..50 {
            let a = sample_perfect_matching(12, &mut rng).unwrap();
            let b = sample_perfect_matching(12, &mut rng).unwrap();
            let union = a.as_graph().union(&b.as_graph()).unwrap();
            assert_eq!(
                a.collisions_with(&b),
                2 * a.edges.len() - union.edge_count()
            );
        }
    }
}
