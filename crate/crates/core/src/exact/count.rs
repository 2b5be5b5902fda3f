//! Exact structure counting: perfect matchings by bitmask dynamic
//! programming over vertex subsets, spanning trees by an integer-determinant
//! matrix-tree computation.

use num::{BigInt, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Exact number of perfect matchings contained in `G`.
///
/// Bitmask DP: `f[S]` counts perfect matchings of the induced subgraph on the
/// vertex set `S`, pairing the lowest unmatched vertex first. Capacity
/// n <= 24 (the table has 2^n entries).
pub fn count_perfect_matchings(g: &Graph) -> Result<u64> {
    let n = g.n();
    if n % 2 != 0 {
        return Err(Error::Model(format!(
            "perfect matchings require even n, got {n}"
        )));
    }
    if n > 24 {
        return Err(Error::Capacity(format!(
            "matching count supports n <= 24, got {n}"
        )));
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| {
            let mut mask = 0u32;
            for u in 0..n {
                if u != v && g.has_edge(u.min(v), u.max(v)).unwrap() {
                    mask |= 1 << u;
                }
            }
            mask
        })
        .collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut f = vec![0u64; 1usize << n];
    f[0] = 1;
    for mask in 1..=full {
        if mask.count_ones() % 2 != 0 {
            continue;
        }
        let v = mask.trailing_zeros();
        let mut partners = mask & adj[v as usize] & !(1 << v);
        let mut acc = 0u64;
        while partners != 0 {
            let u = partners.trailing_zeros();
            acc += f[(mask ^ (1 << v) ^ (1 << u)) as usize];
            partners &= partners - 1;
        }
        f[mask as usize] = acc;
    }
    Ok(f[full as usize])
}

/// Exact number of spanning trees of `G` via the matrix-tree theorem:
/// the determinant of any (n-1)x(n-1) Laplacian minor, evaluated with
/// fraction-free (Bareiss) elimination over big integers.
pub fn count_spanning_trees(g: &Graph) -> Result<BigInt> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Model(format!("need n >= 2, got {n}")));
    }
    let m = n - 1;
    // Laplacian minor deleting the last row and column.
    let mut a: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); m]; m];
    for i in 0..m {
        let mut deg = 0i64;
        for j in 0..n {
            if j != i && g.has_edge(i.min(j), i.max(j)).unwrap() {
                deg += 1;
                if j < m {
                    a[i][j] = BigInt::from(-1);
                }
            }
        }
        a[i][i] = BigInt::from(deg);
    }
    Ok(bareiss_determinant(a).abs())
}

fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let m = a.len();
    if m == 0 {
        return BigInt::one();
    }
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..m - 1 {
        if a[k][k].is_zero() {
            match (k + 1..m).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..m {
            for j in k + 1..m {
                let num = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev; // exact by the Bareiss identity
            }
        }
        prev = a[k][k].clone();
    }
    if sign < 0 {
        -a[m - 1][m - 1].clone()
    } else {
        a[m - 1][m - 1].clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_count_examples() {
        assert_eq!(count_perfect_matchings(&Graph::complete(4)).unwrap(), 3);
        assert_eq!(count_perfect_matchings(&Graph::empty(4)).unwrap(), 0);
        // 6-cycle: exactly the two alternating matchings.
        let c6 = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5)]).unwrap();
        assert_eq!(count_perfect_matchings(&c6).unwrap(), 2);
        assert!(count_perfect_matchings(&Graph::complete(5)).is_err());
        assert!(count_perfect_matchings(&Graph::complete(26)).is_err());
    }

    #[test]
    fn matching_count_complete_is_double_factorial() {
        // (n-1)!! on K_n.
        let mut expect = 1u64;
        for n in (2..=12).step_by(2) {
            expect *= n as u64 - 1;
            assert_eq!(count_perfect_matchings(&Graph::complete(n)).unwrap(), expect);
        }
    }

    #[test]
    fn tree_count_examples() {
        assert_eq!(count_spanning_trees(&Graph::complete(4)).unwrap(), BigInt::from(16));
        let path = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(count_spanning_trees(&path).unwrap(), BigInt::from(1));
        let disconnected = Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(count_spanning_trees(&disconnected).unwrap(), BigInt::zero());
        // Cayley's formula on larger complete graphs.
        for n in [5usize, 8, 12] {
            assert_eq!(
                count_spanning_trees(&Graph::complete(n)).unwrap(),
                BigInt::from(n).pow(n as u32 - 2)
            );
        }
    }
}
