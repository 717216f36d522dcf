// SPDX-License-Identifier: Apache-2.0

use ndarray::{Array2, Zip};

use super::{GcnConfig, GcnModel};

/// First and second moment estimates, zero at step 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub m: Vec<Array2<f64>>,
    pub v: Vec<Array2<f64>>,
    pub step: u64,
}

impl AdamState {
    pub fn new(model: &GcnModel) -> AdamState {
        let zeros: Vec<_> = model.weights.iter().map(|w| Array2::zeros(w.raw_dim())).collect();
        AdamState {
            m: zeros.clone(),
            v: zeros,
            step: 0,
        }
    }
}

/// Bias-corrected Adam update.
pub fn adam_step(model: &mut GcnModel, grads: &[Array2<f64>], state: &mut AdamState, cfg: &GcnConfig) {
    state.step += 1;
    let (b1, b2) = (cfg.adam_beta1, cfg.adam_beta2);
    let c1 = 1.0 - b1.powi(state.step as i32);
    let c2 = 1.0 - b2.powi(state.step as i32);
    for (((w, g), m), v) in model
        .weights
        .iter_mut()
        .zip(grads)
        .zip(&mut state.m)
        .zip(&mut state.v)
    {
        Zip::from(w).and(g).and(m).and(v).for_each(|w, &g, m, v| {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *w -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.adam_epsilon);
        });
    }
}
