//! The calibrated hypothesis pair: planted distribution `P` (background
//! G(n,p) plus a hidden structure) versus null `Q = G(n,q)`, with `q`
//! adjusted so both have the same expected edge count.
//!
//! Probabilities come in two flavors that never mix inside one computation:
//! `f64` for the Monte Carlo path and arbitrary-precision rationals for the
//! exact oracle path.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::edge_slot_count;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Matching,
    #[serde(rename = "tree")]
    SpanningTree,
}

impl ModelKind {
    /// Edge count of the hidden structure: n/2 for matchings, n-1 for trees.
    pub fn planted_edge_count(self, n: usize) -> Result<usize> {
        self.check_n(n)?;
        Ok(match self {
            ModelKind::Matching => n / 2,
            ModelKind::SpanningTree => n - 1,
        })
    }

    pub fn check_n(self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::Model(format!("need n >= 2, got {n}")));
        }
        if self == ModelKind::Matching && n % 2 != 0 {
            return Err(Error::Model(format!(
                "perfect matchings require even n, got {n}"
            )));
        }
        Ok(())
    }

    /// δ_n = e_H / C(n,2): 1/(n-1) for matchings, 2/n for trees.
    pub fn delta(self, n: usize) -> Result<f64> {
        self.check_n(n)?;
        Ok(match self {
            ModelKind::Matching => 1.0 / (n - 1) as f64,
            ModelKind::SpanningTree => 2.0 / n as f64,
        })
    }

    pub fn delta_exact(self, n: usize) -> Result<BigRational> {
        let e_h = self.planted_edge_count(n)?;
        Ok(BigRational::new(
            BigInt::from(e_h),
            BigInt::from(edge_slot_count(n)),
        ))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Matching => "matching",
            ModelKind::SpanningTree => "tree",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "matching" => Ok(ModelKind::Matching),
            "tree" | "spanning-tree" => Ok(ModelKind::SpanningTree),
            other => Err(Error::Config(format!(
                "unknown model `{other}` (expected `matching` or `tree`)"
            ))),
        }
    }
}

/// Calibrated null probability `q = p + (1-p) * delta_n`, so that the
/// expected edge counts under the planted and null hypotheses coincide.
pub fn adjusted_q(p: f64, n: usize, kind: ModelKind) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Param(format!("p must lie in [0,1], got {p}")));
    }
    Ok(p + (1.0 - p) * kind.delta(n)?)
}

/// Exact-rational counterpart of [`adjusted_q`].
pub fn adjusted_q_exact(p: &BigRational, n: usize, kind: ModelKind) -> Result<BigRational> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(Error::Param(format!("p must lie in [0,1], got {p}")));
    }
    let delta = kind.delta_exact(n)?;
    Ok(p + (BigRational::one() - p) * delta)
}

/// Inverse of the calibration map: the `p` whose adjusted null probability
/// equals `q`. Handy when an experiment is parameterized by `q` directly.
pub fn p_from_q(q: f64, n: usize, kind: ModelKind) -> Result<f64> {
    let delta = kind.delta(n)?;
    if q < delta || q > 1.0 {
        return Err(Error::Param(format!(
            "q must lie in [delta, 1] = [{delta}, 1], got {q}"
        )));
    }
    Ok((q - delta) / (1.0 - delta))
}

/// Float-mode parameters of one hypothesis pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: usize,
    pub kind: ModelKind,
    /// Planted-background edge probability.
    pub p: f64,
    /// Calibrated null probability.
    pub q: f64,
    /// e_H / C(n,2).
    pub delta_n: f64,
    /// Edge count of the hidden structure.
    pub e_h: usize,
}

impl ModelParams {
    pub fn new(n: usize, kind: ModelKind, p: f64) -> Result<Self> {
        let q = adjusted_q(p, n, kind)?;
        Ok(ModelParams {
            n,
            kind,
            p,
            q,
            delta_n: kind.delta(n)?,
            e_h: kind.planted_edge_count(n)?,
        })
    }

    #[inline]
    pub fn edge_slots(&self) -> usize {
        edge_slot_count(self.n)
    }
}

/// Exact-rational parameters for the oracle path.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactModelParams {
    pub n: usize,
    pub kind: ModelKind,
    pub p: BigRational,
    pub q: BigRational,
    pub delta_n: BigRational,
    pub e_h: usize,
}

impl ExactModelParams {
    pub fn new(n: usize, kind: ModelKind, p: BigRational) -> Result<Self> {
        let q = adjusted_q_exact(&p, n, kind)?;
        Ok(ExactModelParams {
            n,
            kind,
            q,
            delta_n: kind.delta_exact(n)?,
            e_h: kind.planted_edge_count(n)?,
            p,
        })
    }

    #[inline]
    pub fn edge_slots(&self) -> usize {
        edge_slot_count(self.n)
    }
}

/// Parse a rational given as `a/b` or a bare integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let parse_int = |t: &str| {
        BigInt::from_str(t.trim()).map_err(|_| Error::Parse(format!("bad rational `{s}`")))
    };
    match s.split_once('/') {
        Some((a, b)) => {
            let den = parse_int(b)?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in `{s}`")));
            }
            Ok(BigRational::new(parse_int(a)?, den))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

/// Render a rational as `numerator/denominator`.
pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn adjusted_q_matches_kind_formulas() {
        // q = p + (1-p)/(n-1) for matchings; q = p + 2(1-p)/n for trees.
        assert_eq!(adjusted_q(0.0, 4, ModelKind::Matching).unwrap(), 1.0 / 3.0);
        assert_eq!(adjusted_q(0.0, 4, ModelKind::SpanningTree).unwrap(), 0.5);
        assert_eq!(adjusted_q(1.0, 7, ModelKind::SpanningTree).unwrap(), 1.0);
        assert_eq!(adjusted_q(1.0, 10, ModelKind::Matching).unwrap(), 1.0);
        assert!(adjusted_q(0.5, 5, ModelKind::Matching).is_err());
        assert!(adjusted_q(-0.1, 4, ModelKind::Matching).is_err());
    }

    #[test]
    fn calibration_identity_exact() {
        // C(n,2) * q == e_H + p * (C(n,2) - e_H), exactly.
        for n in [4usize, 6, 8, 10, 50] {
            for (a, b) in [(0i64, 1i64), (1, 10), (1, 4), (1, 2), (9, 10), (1, 1)] {
                for kind in [ModelKind::Matching, ModelKind::SpanningTree] {
                    let p = rat(a, b);
                    let params = ExactModelParams::new(n, kind, p.clone()).unwrap();
                    let c = BigRational::from_integer(BigInt::from(edge_slot_count(n)));
                    let e_h = BigRational::from_integer(BigInt::from(params.e_h));
                    assert_eq!(&c * &params.q, &e_h + &p * (&c - &e_h));
                    // q - p == (1 - p) * delta_n, exactly.
                    assert_eq!(
                        &params.q - &p,
                        (BigRational::one() - &p) * &params.delta_n
                    );
                }
            }
        }
    }

    #[test]
    fn p_from_q_inverts_calibration() {
        let p = 0.0123;
        for kind in [ModelKind::Matching, ModelKind::SpanningTree] {
            let q = adjusted_q(p, 100, kind).unwrap();
            assert!((p_from_q(q, 100, kind).unwrap() - p).abs() < 1e-15);
        }
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/10").unwrap(), rat(1, 10));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/y").is_err());
        assert_eq!(rational_string(&rat(2, 4)), "1/2");
    }
}
