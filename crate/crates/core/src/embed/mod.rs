// SPDX-License-Identifier: Apache-2.0

//! node2vec node features.

mod skipgram;
mod walk;

use std::fmt::Write;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::CircuitGraph;

pub use skipgram::{initial_embeddings, train_skipgram};
pub use walk::generate_walks;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbedError {
    #[error("cannot embed an empty graph")]
    EmptyGraph,
    #[error("no walks to train on")]
    EmptyWalks,
    #[error("walk visits node {node} but the graph has {count} nodes")]
    NodeOutOfRange { node: usize, count: usize },
    #[error("invalid embedding configuration: {0}")]
    InvalidConfig(String),
    #[error("embeddings csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 40,
            p: 1.0,
            q: 1.0,
            seed: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidConfig(m.to_string()));
        if !(self.p > 0.0 && self.p.is_finite()) {
            return bad("p must be a positive finite number");
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return bad("q must be a positive finite number");
        }
        if self.walk_length == 0 {
            return bad("walk_length must be at least 1");
        }
        if self.walks_per_node == 0 {
            return bad("walks_per_node must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Starting rate, decayed linearly to `min_learning_rate`.
    pub learning_rate: f64,
    pub min_learning_rate: f64,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dimension: 16,
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_learning_rate: 1e-4,
            seed: 2,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |m: &str| Err(EmbedError::InvalidConfig(m.to_string()));
        if self.dimension == 0 {
            return bad("dimension must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return bad("learning rates must be positive");
        }
        Ok(())
    }
}

/// `N x D` node features; row `i` belongs to graph node `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix(Array2<f64>);

impl FeatureMatrix {
    pub fn new(values: Array2<f64>) -> Self {
        FeatureMatrix(values)
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.0
    }

    /// Header `node_id,f0,...,f{D-1}`, one row per node, 9 significant
    /// digits in scientific notation.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node_id");
        for j in 0..self.cols() {
            let _ = write!(out, ",f{j}");
        }
        out.push('\n');
        for (i, row) in self.0.rows().into_iter().enumerate() {
            let _ = write!(out, "{i}");
            for v in row {
                let _ = write!(out, ",{v:.8e}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<FeatureMatrix, EmbedError> {
        let err = |line: usize, msg: String| EmbedError::Csv { line, msg };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.first() != Some(&"node_id")
            || cols[1..].iter().enumerate().any(|(j, c)| *c != format!("f{j}"))
        {
            return Err(err(1, format!("unexpected header `{header}`")));
        }
        let d = cols.len() - 1;
        let mut values = Vec::new();
        let mut rows = 0;
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != d + 1 {
                return Err(err(ln + 1, format!("expected {} fields, found {}", d + 1, fields.len())));
            }
            if fields[0].trim().parse::<usize>().ok() != Some(rows) {
                return Err(err(ln + 1, format!("expected node_id {rows}")));
            }
            for f in &fields[1..] {
                let v: f64 = f
                    .trim()
                    .parse()
                    .map_err(|_| err(ln + 1, format!("bad value `{f}`")))?;
                if !v.is_finite() {
                    return Err(err(ln + 1, format!("non-finite value `{f}`")));
                }
                values.push(v);
            }
            rows += 1;
        }
        Ok(FeatureMatrix(
            Array2::from_shape_vec((rows, d), values).expect("shape checked per row"),
        ))
    }
}

pub fn embed(
    g: &CircuitGraph,
    wcfg: &WalkConfig,
    ecfg: &EmbeddingConfig,
) -> Result<FeatureMatrix, EmbedError> {
    let walks = generate_walks(g, wcfg)?;
    train_skipgram(&walks, ecfg, g.len())
}
