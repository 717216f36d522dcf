// SPDX-License-Identifier: Apache-2.0

//! Skip-gram with negative sampling over node sequences.

use ndarray::Array2;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

use super::{EmbedError, EmbeddingConfig, FeatureMatrix};
use crate::seed;

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Uniform `[-0.5/D, 0.5/D]` input vectors, drawn row-major from the
/// configured seed.
pub fn initial_embeddings(n: usize, cfg: &EmbeddingConfig) -> Array2<f64> {
    let mut rng = seed::rng(cfg.seed);
    let half = 0.5 / cfg.dimension as f64;
    Array2::from_shape_simple_fn((n, cfg.dimension), || rng.random_range(-half..=half))
}

pub fn train_skipgram(
    walks: &[Vec<usize>],
    cfg: &EmbeddingConfig,
    n: usize,
) -> Result<FeatureMatrix, EmbedError> {
    cfg.validate()?;
    if walks.iter().all(|w| w.is_empty()) {
        return Err(EmbedError::EmptyWalks);
    }
    let mut counts = vec![0u64; n];
    for &v in walks.iter().flatten() {
        if v >= n {
            return Err(EmbedError::NodeOutOfRange { node: v, count: n });
        }
        counts[v] += 1;
    }

    // The init stream is consumed first so zero epochs returns it unchanged.
    let mut input = initial_embeddings(n, cfg);
    let mut rng = seed::derived_rng(cfg.seed, &[1]);
    if cfg.epochs == 0 {
        return Ok(FeatureMatrix::new(input));
    }
    let mut output = Array2::<f64>::zeros((n, cfg.dimension));
    let noise = WeightedIndex::new(counts.iter().map(|&c| (c as f64).powf(0.75)))
        .expect("at least one node occurs in the walks");

    let tokens: usize = walks.iter().map(Vec::len).sum();
    let total = (cfg.epochs * tokens) as f64;
    let mut processed = 0usize;
    let mut grad = vec![0.0; cfg.dimension];

    for _ in 0..cfg.epochs {
        for walk in walks {
            for (i, &center) in walk.iter().enumerate() {
                let progress = processed as f64 / total;
                let lr = cfg.learning_rate + (cfg.min_learning_rate - cfg.learning_rate) * progress;
                processed += 1;
                let lo = i.saturating_sub(cfg.window);
                let hi = (i + cfg.window + 1).min(walk.len());
                for (j, &context) in walk.iter().enumerate().take(hi).skip(lo) {
                    if j == i {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    for k in 0..=cfg.negatives {
                        let (target, label) = if k == 0 {
                            (context, 1.0)
                        } else {
                            let neg = noise.sample(&mut rng);
                            if neg == context {
                                continue;
                            }
                            (neg, 0.0)
                        };
                        let dot: f64 = input
                            .row(center)
                            .iter()
                            .zip(output.row(target))
                            .map(|(a, b)| a * b)
                            .sum();
                        let g = (label - sigmoid(dot)) * lr;
                        for (acc, o) in grad.iter_mut().zip(output.row(target)) {
                            *acc += g * o;
                        }
                        let center_row = input.row(center).to_owned();
                        output.row_mut(target).scaled_add(g, &center_row);
                    }
                    for (x, g) in input.row_mut(center).iter_mut().zip(&grad) {
                        *x += g;
                    }
                }
            }
        }
    }
    Ok(FeatureMatrix::new(input))
}
