//! Detection experiments for planted perfect matchings and spanning trees in
//! edge-count-calibrated Erdős–Rényi graphs.
//!
//! The planted distribution P takes a G(n,p) background and unions in a
//! uniform hidden structure H (a perfect matching or a spanning tree); the
//! null Q = G(n,q) has q calibrated so both hypotheses share the same
//! expected edge count. This crate provides:
//!
//! - seeded samplers for Q, P, and the hidden structures ([`sample`]);
//! - the polynomial-time degree-variance detector and an edge-count negative
//!   control ([`detect`]);
//! - exact small-n likelihood/TV/χ² oracles in rational arithmetic
//!   ([`exact`]);
//! - the collision-MGF moment machinery for likelihood-ratio moments
//!   ([`analytics`]);
//! - a reproducible Monte Carlo harness for risk sweeps and χ² estimation
//!   ([`harness`]).
//!
//! With the default `parallel` feature, Monte Carlo trials run on rayon;
//! building with `--no-default-features` selects the sequential fallback.
//! Either way the outputs are byte-identical: every trial owns a derived RNG
//! stream and all reductions are order-independent.

pub mod analytics;
pub mod detect;
pub mod error;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod model;
pub mod sample;
pub mod util;

pub use error::{Error, Result};
