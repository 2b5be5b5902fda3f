//! Exhaustive structure enumeration. Deliberately naive: these lists are the
//! independent oracles the fast counting routines are checked against.

use crate::error::{Error, Result};
use crate::graph::{edge_index_unchecked, EdgeId, Graph};
use crate::model::ModelKind;
use crate::sample::prufer_decode;

/// All perfect matchings of K_n as sorted edge-id lists, by recursively
/// pairing the lowest unmatched vertex. Capacity n <= 12.
pub fn enumerate_matchings(n: usize) -> Result<Vec<Vec<EdgeId>>> {
    ModelKind::Matching.check_n(n)?;
    if n > 12 {
        return Err(Error::Capacity(format!(
            "matching enumeration supports n <= 12, got {n}"
        )));
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    let mut acc: Vec<EdgeId> = Vec::with_capacity(n / 2);
    fn rec(n: usize, used: &mut [bool], acc: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        let Some(v) = (0..n).find(|&v| !used[v]) else {
            let mut edges = acc.clone();
            edges.sort_unstable();
            out.push(edges);
            return;
        };
        used[v] = true;
        for u in v + 1..n {
            if !used[u] {
                used[u] = true;
                acc.push(EdgeId(edge_index_unchecked(v, u, n) as u32));
                rec(n, used, acc, out);
                acc.pop();
                used[u] = false;
            }
        }
        used[v] = false;
    }
    rec(n, &mut used, &mut acc, &mut out);
    Ok(out)
}

/// All spanning trees of K_n as sorted edge-id lists, by decoding every
/// Prüfer sequence in [n]^(n-2). Capacity n <= 8.
pub fn enumerate_trees(n: usize) -> Result<Vec<Vec<EdgeId>>> {
    ModelKind::SpanningTree.check_n(n)?;
    if n > 8 {
        return Err(Error::Capacity(format!(
            "tree enumeration supports n <= 8, got {n}"
        )));
    }
    if n == 2 {
        return Ok(vec![vec![EdgeId(0)]]);
    }
    let len = n - 2;
    let total = (n as u64).pow(len as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut code = vec![0usize; len];
    for idx in 0..total {
        let mut x = idx;
        for slot in code.iter_mut() {
            *slot = (x % n as u64) as usize;
            x /= n as u64;
        }
        let mut edges: Vec<EdgeId> = prufer_decode(&code, n)
            .into_iter()
            .map(|(i, j)| EdgeId(edge_index_unchecked(i, j, n) as u32))
            .collect();
        edges.sort_unstable();
        out.push(edges);
    }
    Ok(out)
}

fn contained_count(structs: &[Vec<EdgeId>], g: &Graph) -> u64 {
    structs
        .iter()
        .filter(|edges| edges.iter().all(|&e| g.has_edge_id(e)))
        .count() as u64
}

/// Matching count by scanning the full matching list (permanent-style
/// enumeration); independent of the bitmask DP.
pub fn exhaustive_matching_count(g: &Graph) -> Result<u64> {
    Ok(contained_count(&enumerate_matchings(g.n())?, g))
}

/// Spanning-tree count by scanning all Cayley trees; independent of the
/// matrix-tree determinant.
pub fn exhaustive_tree_count(g: &Graph) -> Result<u64> {
    Ok(contained_count(&enumerate_trees(g.n())?, g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn enumeration_counts_match_closed_forms() {
        assert_eq!(enumerate_matchings(4).unwrap().len(), 3);
        assert_eq!(enumerate_matchings(8).unwrap().len(), 105);
        assert_eq!(enumerate_trees(3).unwrap().len(), 3);
        assert_eq!(enumerate_trees(5).unwrap().len(), 125);
        // Prüfer decoding is a bijection: all trees distinct.
        let trees = enumerate_trees(5).unwrap();
        let distinct: HashSet<_> = trees.iter().cloned().collect();
        assert_eq!(distinct.len(), trees.len());
    }

    #[test]
    fn exhaustive_counts_on_small_graphs() {
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        assert_eq!(exhaustive_matching_count(&c6).unwrap(), 2);
        assert_eq!(exhaustive_tree_count(&c6).unwrap(), 6);
    }
}
