//! Labeled simple graphs on `n` vertices stored as a dense edge-membership
//! bitset in canonical edge order.
//!
//! The canonical order is lexicographic on the pair `(i, j)` with `i < j`:
//! `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. Every file format and hash in
//! this crate uses that order.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Number of unordered vertex pairs, `n * (n - 1) / 2`.
#[inline]
pub const fn edge_slot_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Position of an unordered pair `{i, j}` in the canonical edge order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl EdgeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Canonical index of the edge `{i, j}`, `i < j`, in lexicographic order.
pub fn edge_index(i: usize, j: usize, n: usize) -> Result<EdgeId> {
    if i >= j || j >= n {
        return Err(Error::InvalidEdge { i, j, n });
    }
    Ok(EdgeId(edge_index_unchecked(i, j, n) as u32))
}

/// `edge_index` without the range checks. Callers guarantee `i < j < n`.
#[inline]
pub(crate) fn edge_index_unchecked(i: usize, j: usize, n: usize) -> usize {
    // Rows 0..i contribute (n-1) + (n-2) + ... + (n-i) slots.
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// Inverse of [`edge_index`]: the pair `(i, j)`, `i < j`, at canonical
/// position `e`.
pub fn edge_pair(e: EdgeId, n: usize) -> Result<(usize, usize)> {
    let m = edge_slot_count(n);
    let idx = e.index();
    if idx >= m {
        return Err(Error::InvalidEdge { i: idx, j: idx, n });
    }
    // Initial guess from the quadratic row-offset formula, then fix up.
    let mut i = (((2 * n - 1) as f64 - ((2 * n - 1).pow(2) as f64 - 8.0 * idx as f64).sqrt())
        / 2.0) as usize;
    i = i.min(n - 2);
    while edge_index_unchecked(i, i + 1, n) > idx {
        i -= 1;
    }
    while i + 1 < n - 1 && edge_index_unchecked(i + 1, i + 2, n) <= idx {
        i += 1;
    }
    let j = i + 1 + (idx - edge_index_unchecked(i, i + 1, n));
    Ok((i, j))
}

/// A labeled simple undirected graph. One membership bit per unordered pair;
/// self-loops are not representable. Immutable in spirit: mutation happens
/// only during construction, so values can be shared freely across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    bits: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let m = edge_slot_count(n);
        Graph {
            n,
            bits: vec![0u64; m.div_ceil(64)],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        let m = edge_slot_count(n);
        for w in 0..g.bits.len() {
            g.bits[w] = u64::MAX;
        }
        // Clear the tail past the last valid slot.
        let rem = m % 64;
        if rem != 0 {
            if let Some(last) = g.bits.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            g.set_edge_id(edge_index(a, b, n)?);
        }
        Ok(g)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of membership slots, `C(n, 2)`.
    #[inline]
    pub fn slot_count(&self) -> usize {
        edge_slot_count(self.n)
    }

    #[inline]
    pub fn set_edge_id(&mut self, e: EdgeId) {
        let idx = e.index();
        debug_assert!(idx < self.slot_count());
        self.bits[idx / 64] |= 1u64 << (idx % 64);
    }

    #[inline]
    pub fn has_edge_id(&self, e: EdgeId) -> bool {
        let idx = e.index();
        debug_assert!(idx < self.slot_count());
        self.bits[idx / 64] >> (idx % 64) & 1 != 0
    }

    pub fn has_edge(&self, i: usize, j: usize) -> Result<bool> {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        Ok(self.has_edge_id(edge_index(a, b, self.n)?))
    }

    pub fn edge_count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edges as `(i, j)` pairs in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (i + 1..n).filter_map(move |j| {
                if self.has_edge_id(EdgeId(edge_index_unchecked(i, j, n) as u32)) {
                    Some((i, j))
                } else {
                    None
                }
            })
        })
    }

    /// Edge-set union. Both graphs must have the same vertex count.
    pub fn union(&self, other: &Graph) -> Result<Graph> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| a | b)
            .collect();
        Ok(Graph { n: self.n, bits })
    }

    /// Number of edges present in both graphs.
    pub fn intersection_count(&self, other: &Graph) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum())
    }

    /// Build a graph whose first 64 membership slots are the bits of `word`.
    /// Only valid when `C(n,2) <= 64`; used by exhaustive enumerations.
    pub fn from_bits_u64(n: usize, word: u64) -> Result<Graph> {
        let m = edge_slot_count(n);
        if m > 64 {
            return Err(Error::Capacity(format!(
                "bit-word construction requires C(n,2) <= 64, got {m}"
            )));
        }
        let mut g = Graph::empty(n);
        if m > 0 {
            g.bits[0] = word & if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        }
        Ok(g)
    }

    /// Serialize as the edge-list text format: a header line `n <n>` followed
    /// by one `i j` line per edge in canonical (sorted) order.
    pub fn write_edge_list(&self, mut w: impl Write) -> Result<()> {
        let mut out = String::new();
        writeln!(out, "n {}", self.n).unwrap();
        for (i, j) in self.edges() {
            writeln!(out, "{i} {j}").unwrap();
        }
        w.write_all(out.as_bytes())?;
        Ok(())
    }

    /// Parse the edge-list format. Trailing sections (anything after a line
    /// that does not parse as an `i j` pair, such as a `planted` section) are
    /// ignored so planted sample files remain readable as plain graphs.
    pub fn read_edge_list(r: impl BufRead) -> Result<Graph> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))??;
        let n: usize = header
            .strip_prefix("n ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("expected header `n <count>`, got `{header}`")))?;
        let mut g = Graph::empty(n);
        for line in lines {
            let line = line?;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            let mut it = t.split_whitespace();
            let (a, b) = (it.next(), it.next());
            match (
                a.and_then(|s| s.parse::<usize>().ok()),
                b.and_then(|s| s.parse::<usize>().ok()),
            ) {
                (Some(i), Some(j)) => g.set_edge_id(edge_index(i.min(j), i.max(j), n)?),
                // First non-edge line starts a trailing section.
                _ => break,
            }
        }
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent oracle: position of (i, j) in the explicitly enumerated
    /// lexicographic pair list.
    fn enumerated_index(i: usize, j: usize, n: usize) -> usize {
        let mut pairs = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
        pairs.iter().position(|&p| p == (i, j)).unwrap()
    }

    #[test]
    fn edge_index_examples() {
        assert_eq!(edge_index(0, 1, 4).unwrap(), EdgeId(0));
        assert_eq!(edge_index(2, 3, 4).unwrap().index(), enumerated_index(2, 3, 4));
        assert_eq!(edge_index(2, 3, 4).unwrap(), EdgeId(5));
        assert_eq!(edge_index(0, 3, 4).unwrap().index(), enumerated_index(0, 3, 4));
        assert_eq!(edge_index(0, 3, 4).unwrap(), EdgeId(2));
    }

    #[test]
    fn edge_index_rejects_bad_pairs() {
        assert!(edge_index(1, 1, 4).is_err());
        assert!(edge_index(2, 1, 4).is_err());
        assert!(edge_index(0, 4, 4).is_err());
    }

    #[test]
    fn edge_pair_roundtrip_exhaustive() {
        for n in 2..=64 {
            for i in 0..n {
                for j in i + 1..n {
                    let e = edge_index(i, j, n).unwrap();
                    assert_eq!(e.index(), enumerated_index(i, j, n));
                    assert_eq!(edge_pair(e, n).unwrap(), (i, j));
                }
            }
        }
    }

    #[test]
    fn union_identity_and_overlap() {
        let m1 = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        let empty = Graph::empty(4);
        assert_eq!(m1.union(&empty).unwrap(), m1);

        let m2 = Graph::from_edges(4, &[(0, 2), (1, 3)]).unwrap();
        assert_eq!(m1.union(&m2).unwrap().edge_count(), 4);

        let h = Graph::from_edges(4, &[(0, 1), (1, 3)]).unwrap();
        assert_eq!(m1.union(&h).unwrap().edge_count(), 3);

        assert!(m1.union(&Graph::empty(6)).is_err());
    }

    #[test]
    fn complete_graph_counts() {
        for n in 2..=20 {
            assert_eq!(Graph::complete(n).edge_count(), edge_slot_count(n));
        }
    }

    #[test]
    fn edge_list_format_bytes() {
        let g = Graph::from_edges(4, &[(2, 3), (0, 1)]).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n 4\n0 1\n2 3\n");
    }

    #[test]
    fn edge_list_roundtrip_ignores_trailing_section() {
        let text = "n 5\n0 1\n1 4\nplanted\n0 1\n";
        let g = Graph::read_edge_list(text.as_bytes()).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert!(g.has_edge(1, 4).unwrap());
    }

    proptest! {
        #[test]
        fn edge_pair_roundtrip_large(n in 2usize..2000, seed in 0u64..u64::MAX) {
            let m = edge_slot_count(n) as u64;
            let idx = (seed % m) as u32;
            let (i, j) = edge_pair(EdgeId(idx), n).unwrap();
            prop_assert!(i < j && j < n);
            prop_assert_eq!(edge_index(i, j, n).unwrap(), EdgeId(idx));
        }

        #[test]
        fn union_counts_inclusion_exclusion(
            n in 2usize..12,
            picks_a in proptest::collection::vec((0usize..100, 0usize..100), 0..20),
            picks_b in proptest::collection::vec((0usize..100, 0usize..100), 0..20),
        ) {
            let clamp = |v: Vec<(usize, usize)>| -> Vec<(usize, usize)> {
                v.into_iter()
                    .map(|(a, b)| (a % n, b % n))
                    .filter(|(a, b)| a != b)
                    .collect()
            };
            let g = Graph::from_edges(n, &clamp(picks_a)).unwrap();
            let h = Graph::from_edges(n, &clamp(picks_b)).unwrap();
            let overlap = g.intersection_count(&h).unwrap();
            prop_assert_eq!(
                g.union(&h).unwrap().edge_count(),
                g.edge_count() + h.edge_count() - overlap
            );
        }
    }
}
