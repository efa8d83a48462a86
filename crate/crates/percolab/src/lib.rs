//! Continuum-percolation laboratory for heterogeneous wireless networks.
//!
//! A secondary (opportunistic) network is overlaid on a primary Poisson
//! network. A pair of secondary users can communicate only when they are
//! within transmission range of each other and neither endpoint has primary
//! activity nearby. This crate provides:
//!
//! - exact and quadrature-based circle-overlap geometry ([`geometry`]),
//! - reproducible sampling of the primary/secondary point processes
//!   ([`pointprocess`]),
//! - opportunity evaluation, graph construction, component labeling and
//!   window-crossing detection ([`oppgraph`]),
//! - Monte-Carlo crossing experiments and connectivity-region boundary
//!   sweeps ([`percolation`]),
//! - analytical quantities: conditional average degree, outer/inner bounds
//!   on the connectivity region, critical-density bounds and the
//!   transmit-power design rule ([`bounds`]),
//! - a batch CLI front-end ([`config`], [`runner`]).
//!
//! All lengths are meters and all densities are per square meter internally;
//! CLI inputs and CSV outputs use km⁻² for densities.

// Negated comparisons (`!(x > 0.0)`) are used on purpose in input validation:
// unlike `x <= 0.0`, they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod geometry;
pub mod oppgraph;
pub mod percolation;
pub mod pointprocess;
pub mod quad;
pub mod runner;

mod error;

pub use error::{Error, Result};
