// SPDX-License-Identifier: Apache-2.0

//! Functional de-rating (FDR) prediction for gate-level netlists.
//!
//! The pipeline parses a structural netlist ([`netlist`]), turns it into a
//! circuit graph ([`graph`]), embeds its nodes with node2vec
//! ([`embed`]), estimates ground-truth FDR per flip-flop by SEU fault
//! injection ([`fault`]), trains a small bias-free graph convolutional
//! network on a handful of labeled flip-flops ([`gcn`]) and compares the
//! predicted FDR population against the simulated one ([`eval`]).
//! [`pipeline`] ties the stages together behind the `gcnfdr` binary.

pub mod embed;
pub mod error;
pub mod eval;
pub mod fault;
pub mod fixtures;
pub mod gcn;
pub mod graph;
pub mod netlist;
pub mod pipeline;
pub mod seed;

pub use error::{Error, Result};
