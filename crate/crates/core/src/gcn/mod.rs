// SPDX-License-Identifier: Apache-2.0

//! Bias-free graph convolutional regressor.
//!
//! Layer `l` computes `H^{l+1} = act(S H^l W^l)` with `tanh` on hidden
//! layers and the logistic function on the single-unit output layer.

mod adam;
mod weights;

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fault::FdrTable;
use crate::graph::{CircuitGraph, NodeKind, NormalizedAdjacency};
use crate::seed;

pub use adam::{adam_step, AdamState};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GcnError {
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("{what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("training set is empty")]
    EmptyMask,
    #[error("training node {0} is not a flip-flop")]
    NotFlipFlop(usize),
    #[error("training node {0} is listed twice")]
    DuplicateLabel(usize),
    #[error("label {value} for node {node} is outside [0, 1]")]
    LabelOutOfRange { node: usize, value: f64 },
    #[error("node index {index} out of range for {count} nodes")]
    NodeOutOfRange { index: usize, count: usize },
    #[error("forward cache does not match the model")]
    StaleCache,
    #[error("weights file line {line}: {msg}")]
    Weights { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GcnConfig {
    /// Input width, hidden widths, then the output width 1.
    pub layer_dims: Vec<usize>,
    pub learning_rate: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_epsilon: f64,
    pub epochs: usize,
    pub weight_init_seed: u64,
}

impl Default for GcnConfig {
    fn default() -> Self {
        GcnConfig {
            layer_dims: vec![16, 4, 2, 1],
            learning_rate: 0.01,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_epsilon: 1e-8,
            epochs: 2000,
            weight_init_seed: 3,
        }
    }
}

impl GcnConfig {
    pub fn validate(&self) -> Result<(), GcnError> {
        let bad = |m: &str| Err(GcnError::InvalidConfig(m.to_string()));
        if self.layer_dims.len() < 3 {
            return bad("layer_dims needs an input, at least one hidden layer and an output");
        }
        if self.layer_dims.contains(&0) {
            return bad("layer widths must be positive");
        }
        if self.layer_dims.last() != Some(&1) {
            return bad("output width must be 1");
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if !((0.0..1.0).contains(&self.adam_beta1) && (0.0..1.0).contains(&self.adam_beta2)) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if self.adam_epsilon.is_nan() || self.adam_epsilon <= 0.0 {
            return bad("adam_epsilon must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    /// `weights[l]` has shape `dims[l] x dims[l + 1]`.
    pub weights: Vec<Array2<f64>>,
}

impl GcnModel {
    pub fn from_weights(weights: Vec<Array2<f64>>) -> Result<GcnModel, GcnError> {
        if weights.len() < 2 {
            return Err(GcnError::InvalidConfig("model needs at least two layers".into()));
        }
        for pair in weights.windows(2) {
            if pair[0].ncols() != pair[1].nrows() {
                return Err(GcnError::DimensionMismatch {
                    what: "layer chain",
                    expected: pair[0].ncols(),
                    got: pair[1].nrows(),
                });
            }
        }
        let out = weights.last().unwrap().ncols();
        if out != 1 {
            return Err(GcnError::DimensionMismatch {
                what: "output width",
                expected: 1,
                got: out,
            });
        }
        if weights.iter().flatten().any(|v| !v.is_finite()) {
            return Err(GcnError::InvalidConfig("non-finite weight".into()));
        }
        Ok(GcnModel { weights })
    }

    pub fn zeros(dims: &[usize]) -> GcnModel {
        GcnModel {
            weights: dims.windows(2).map(|d| Array2::zeros((d[0], d[1]))).collect(),
        }
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.weights[0].nrows()];
        dims.extend(self.weights.iter().map(|w| w.ncols()));
        dims
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(|w| w.len()).sum()
    }
}

/// Glorot-uniform weights, drawn layer by layer in row-major order.
pub fn init_weights(cfg: &GcnConfig) -> Result<GcnModel, GcnError> {
    cfg.validate()?;
    let mut rng = seed::rng(cfg.weight_init_seed);
    let weights = cfg
        .layer_dims
        .windows(2)
        .map(|d| {
            let s = (6.0 / (d[0] + d[1]) as f64).sqrt();
            Array2::from_shape_simple_fn((d[0], d[1]), || rng.random_range(-s..=s))
        })
        .collect();
    Ok(GcnModel { weights })
}

/// Intermediates of one forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    /// `h[l]` is the input to layer `l`; `h[0] = X`.
    pub h: Vec<Array2<f64>>,
    /// `p[l] = S h[l]`.
    pub p: Vec<Array2<f64>>,
    /// `u[l] = p[l] W^l`, the pre-activation of layer `l`.
    pub u: Vec<Array2<f64>>,
    /// Logistic output per node.
    pub z: Array1<f64>,
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn forward(
    s: &NormalizedAdjacency,
    x: ArrayView2<'_, f64>,
    m: &GcnModel,
) -> Result<(Array1<f64>, ForwardCache), GcnError> {
    if x.nrows() != s.size() {
        return Err(GcnError::DimensionMismatch {
            what: "feature rows",
            expected: s.size(),
            got: x.nrows(),
        });
    }
    if x.ncols() != m.weights[0].nrows() {
        return Err(GcnError::DimensionMismatch {
            what: "feature columns",
            expected: m.weights[0].nrows(),
            got: x.ncols(),
        });
    }
    let last = m.weights.len() - 1;
    let mut h = vec![x.to_owned()];
    let mut p = Vec::with_capacity(m.weights.len());
    let mut u = Vec::with_capacity(m.weights.len());
    for (l, w) in m.weights.iter().enumerate() {
        let pl = s.apply(h[l].view());
        let ul = pl.dot(w);
        if l < last {
            h.push(ul.mapv(f64::tanh));
        }
        p.push(pl);
        u.push(ul);
    }
    let z = u[last].column(0).mapv(logistic);
    Ok((z.clone(), ForwardCache { h, p, u, z }))
}

/// Labeled flip-flop nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    nodes: Vec<usize>,
    labels: Vec<f64>,
}

impl TrainingSet {
    pub fn new(g: &CircuitGraph, nodes: Vec<usize>, labels: Vec<f64>) -> Result<TrainingSet, GcnError> {
        if nodes.len() != labels.len() {
            return Err(GcnError::DimensionMismatch {
                what: "label count",
                expected: nodes.len(),
                got: labels.len(),
            });
        }
        if nodes.is_empty() {
            return Err(GcnError::EmptyMask);
        }
        let mut seen = std::collections::HashSet::new();
        for (&node, &value) in nodes.iter().zip(&labels) {
            if node >= g.len() {
                return Err(GcnError::NodeOutOfRange {
                    index: node,
                    count: g.len(),
                });
            }
            if g.nodes[node].kind != NodeKind::FlipFlop {
                return Err(GcnError::NotFlipFlop(node));
            }
            if !seen.insert(node) {
                return Err(GcnError::DuplicateLabel(node));
            }
            if !(0.0..=1.0).contains(&value) {
                return Err(GcnError::LabelOutOfRange { node, value });
            }
        }
        Ok(TrainingSet { nodes, labels })
    }

    /// Labels the named flip-flops with their FDR from `table`.
    pub fn from_table(g: &CircuitGraph, table: &FdrTable, names: &[String]) -> Result<TrainingSet, GcnError> {
        let mut nodes = Vec::with_capacity(names.len());
        let mut labels = Vec::with_capacity(names.len());
        for name in names {
            let bad = || GcnError::InvalidConfig(format!("`{name}` is not a labeled flip-flop"));
            nodes.push(g.node_index(name).ok_or_else(bad)?);
            labels.push(table.get(name).ok_or_else(bad)?.fdr);
        }
        TrainingSet::new(g, nodes, labels)
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn masked_mse_loss(z: ArrayView1<'_, f64>, t: &TrainingSet) -> f64 {
    let sum: f64 = t
        .nodes
        .iter()
        .zip(&t.labels)
        .map(|(&i, &y)| (z[i] - y).powi(2))
        .sum();
    sum / t.len() as f64
}

fn check_cache(cache: &ForwardCache, s: &NormalizedAdjacency, m: &GcnModel) -> Result<(), GcnError> {
    let layers = m.weights.len();
    let ok = cache.h.len() == layers
        && cache.p.len() == layers
        && cache.u.len() == layers
        && cache.z.len() == s.size()
        && cache
            .h
            .iter()
            .zip(&m.weights)
            .all(|(h, w)| h.nrows() == s.size() && h.ncols() == w.nrows())
        && cache.u.iter().zip(&m.weights).all(|(u, w)| u.ncols() == w.ncols());
    if ok {
        Ok(())
    } else {
        Err(GcnError::StaleCache)
    }
}

/// Gradients of a loss given `dL/dZ` per node.
pub fn backward_from_output_grad(
    cache: &ForwardCache,
    dz: ArrayView1<'_, f64>,
    s: &NormalizedAdjacency,
    m: &GcnModel,
) -> Result<Vec<Array2<f64>>, GcnError> {
    check_cache(cache, s, m)?;
    if dz.len() != s.size() {
        return Err(GcnError::StaleCache);
    }
    let layers = m.weights.len();
    let mut grads = vec![Array2::zeros((0, 0)); layers];
    // dL/du for the current layer
    let mut du: Array2<f64> = (&dz * &cache.z.mapv(|z| z * (1.0 - z)))
        .insert_axis(Axis(1))
        .to_owned();
    for l in (0..layers).rev() {
        grads[l] = cache.p[l].t().dot(&du);
        if l == 0 {
            break;
        }
        let dp = du.dot(&m.weights[l].t());
        // S is symmetric, so S^T dp = S dp
        let dh = s.apply(dp.view());
        du = dh * cache.h[l].mapv(|h| 1.0 - h * h);
    }
    Ok(grads)
}

pub fn backward(
    cache: &ForwardCache,
    t: &TrainingSet,
    s: &NormalizedAdjacency,
    m: &GcnModel,
) -> Result<Vec<Array2<f64>>, GcnError> {
    let mut dz = Array1::zeros(cache.z.len());
    let scale = 2.0 / t.len() as f64;
    for (&i, &y) in t.nodes.iter().zip(&t.labels) {
        if i >= dz.len() {
            return Err(GcnError::StaleCache);
        }
        dz[i] = scale * (cache.z[i] - y);
    }
    backward_from_output_grad(cache, dz.view(), s, m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: GcnModel,
    /// Loss before each update, one entry per epoch.
    pub loss_history: Vec<f64>,
    /// Loss after the last update.
    pub final_loss: f64,
}

pub fn train(
    s: &NormalizedAdjacency,
    x: ArrayView2<'_, f64>,
    t: &TrainingSet,
    cfg: &GcnConfig,
) -> Result<TrainOutcome, GcnError> {
    let mut model = init_weights(cfg)?;
    let mut state = AdamState::new(&model);
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        let (z, cache) = forward(s, x, &model)?;
        loss_history.push(masked_mse_loss(z.view(), t));
        let grads = backward(&cache, t, s, &model)?;
        adam_step(&mut model, &grads, &mut state, cfg);
    }
    let (z, _) = forward(s, x, &model)?;
    Ok(TrainOutcome {
        final_loss: masked_mse_loss(z.view(), t),
        model,
        loss_history,
    })
}

/// Predicted FDR for every flip-flop node, in graph order.
pub fn predict(
    s: &NormalizedAdjacency,
    x: ArrayView2<'_, f64>,
    m: &GcnModel,
    g: &CircuitGraph,
) -> Result<FdrTable, GcnError> {
    let targets = g.flipflop_nodes();
    let values = predict_nodes(s, x, m, &targets)?;
    let names = targets.iter().map(|&i| g.nodes[i].name.clone()).collect();
    Ok(FdrTable::predicted(names, values))
}

pub fn predict_nodes(
    s: &NormalizedAdjacency,
    x: ArrayView2<'_, f64>,
    m: &GcnModel,
    targets: &[usize],
) -> Result<Vec<f64>, GcnError> {
    let (z, _) = forward(s, x, m)?;
    targets
        .iter()
        .map(|&i| {
            z.get(i).copied().ok_or(GcnError::NodeOutOfRange {
                index: i,
                count: z.len(),
            })
        })
        .collect()
}
