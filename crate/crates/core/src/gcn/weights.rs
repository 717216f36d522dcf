// SPDX-License-Identifier: Apache-2.0

//! Text weights file.
//!
//! ```text
//! gcnfdr-weights 1
//! layer_dims 16 4 2 1
//! weight_init_seed 3
//! layer 0 16 4
//! <16 lines of 4 values>
//! ...
//! ```
//!
//! Values use the shortest decimal form that parses back to the same `f64`.

use std::fmt::Write;

use ndarray::Array2;

use super::{GcnError, GcnModel};

const MAGIC: &str = "gcnfdr-weights 1";

impl GcnModel {
    pub fn to_text(&self, weight_init_seed: u64) -> String {
        let mut out = format!("{MAGIC}\nlayer_dims");
        for d in self.layer_dims() {
            let _ = write!(out, " {d}");
        }
        let _ = writeln!(out, "\nweight_init_seed {weight_init_seed}");
        for (l, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "layer {l} {} {}", w.nrows(), w.ncols());
            for row in w.rows() {
                let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GcnModel, GcnError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let mut next = |what: &str| {
            lines.next().ok_or_else(|| GcnError::Weights {
                line: 0,
                msg: format!("unexpected end of file, expected {what}"),
            })
        };
        let err = |line: usize, msg: String| GcnError::Weights { line, msg };
        let (ln, magic) = next("header")?;
        if magic != MAGIC {
            return Err(err(ln, format!("expected `{MAGIC}`")));
        }
        let (ln, dims_line) = next("layer_dims")?;
        let dims: Vec<usize> = match dims_line.strip_prefix("layer_dims") {
            Some(rest) => rest
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| err(ln, format!("bad width `{t}`"))))
                .collect::<Result<_, _>>()?,
            None => return Err(err(ln, "expected `layer_dims`".into())),
        };
        if dims.len() < 2 {
            return Err(err(ln, "need at least two widths".into()));
        }
        let (ln, seed_line) = next("weight_init_seed")?;
        match seed_line.strip_prefix("weight_init_seed") {
            Some(rest) if rest.trim().parse::<u64>().is_ok() => {}
            _ => return Err(err(ln, "expected `weight_init_seed <n>`".into())),
        }
        let mut weights = Vec::with_capacity(dims.len() - 1);
        for (l, pair) in dims.windows(2).enumerate() {
            let (ln, head) = next("layer header")?;
            let expected = format!("layer {l} {} {}", pair[0], pair[1]);
            if head.split_whitespace().collect::<Vec<_>>().join(" ") != expected {
                return Err(err(ln, format!("expected `{expected}`")));
            }
            let mut values = Vec::with_capacity(pair[0] * pair[1]);
            for _ in 0..pair[0] {
                let (ln, row) = next("weight row")?;
                let before = values.len();
                for t in row.split_whitespace() {
                    let v: f64 = t.parse().map_err(|_| err(ln, format!("bad value `{t}`")))?;
                    values.push(v);
                }
                if values.len() - before != pair[1] {
                    return Err(err(ln, format!("expected {} values", pair[1])));
                }
            }
            weights.push(Array2::from_shape_vec((pair[0], pair[1]), values).expect("row lengths checked"));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(err(ln, "trailing content".into()));
        }
        GcnModel::from_weights(weights)
    }
}
