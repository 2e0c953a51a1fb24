//! Local computation of PageRank contributions and single-node PageRank.
//!
//! Every algorithm in this crate talks to the graph exclusively through an
//! [`Oracle`](oracle::Oracle), the arc-centric access model with `indeg`,
//! `outdeg`, `parent`, `child` and `jump` queries. Oracles count each query
//! kind, so the query complexity of a run is measured rather than estimated.
//!
//! The pieces:
//!
//! - [`graph`]: immutable CSR digraph with forward and backward adjacency.
//! - [`oracle`]: counting query facade plus a label-permuting wrapper.
//! - [`exact`]: power-iteration PageRank and contribution vectors, used as
//!   ground truth.
//! - [`push`]: backward push (reserves, residues, per-node push counts).
//! - [`detect`]: contributing-set detection with known `nπ(t)` or by
//!   adaptive halving of the push threshold.
//! - [`walk`]: α-discounted random walks and plain Monte Carlo.
//! - [`bippr`]: the bidirectional estimator, fixed and adaptive.
//! - [`hard`]: generators for the lower-bound instance families.
//!
//! The crate is `no_std` and needs only `alloc`. File formats and the
//! command-line harness live in the `backpush-cli` crate.

#![cfg_attr(not(test), no_std)]
#![deny(unsafe_code)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bippr;
pub mod detect;
mod error;
pub mod exact;
pub mod graph;
pub mod hard;
pub mod oracle;
pub mod push;
mod sparse;
pub mod walk;

pub use error::{Error, GraphError, QueryError};
pub use graph::{Graph, NodeId};
pub use oracle::{AccessOracle, Oracle, PermutedOracle, QueryStats};
pub use sparse::SparseMap;

pub(crate) fn check_alpha(alpha: f64) -> Result<(), Error> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Parameter("alpha must lie in (0, 1)"))
    }
}
