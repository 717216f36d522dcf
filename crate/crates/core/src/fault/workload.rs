// SPDX-License-Identifier: Apache-2.0

//! Stimulus for the cycle simulator.
//!
//! Text form: one hexadecimal vector per line (optional `0x` prefix), one
//! line per cycle. Bit `i` (LSB first) drives the `i`-th data input port in
//! declaration order; the clock port carries no stimulus. Blank lines and
//! text after `#` are ignored.

use rand::Rng;

use super::FaultError;
use crate::netlist::Netlist;
use crate::seed;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workload {
    /// `stimulus[cycle][i]` is the value of data input `i` at `cycle`.
    pub stimulus: Vec<Vec<bool>>,
    /// Output port indices compared against the golden run every cycle.
    pub observed: Vec<usize>,
    /// Flip-flop values before cycle 0, in flip-flop order; all zero when
    /// `None`.
    pub initial_state: Option<Vec<bool>>,
}

impl Workload {
    pub fn n_cycles(&self) -> usize {
        self.stimulus.len()
    }

    /// Uniformly random input vectors, observing every output port.
    pub fn random(n: &Netlist, n_cycles: usize, seed: u64) -> Result<Workload, FaultError> {
        if n_cycles == 0 {
            return Err(FaultError::InvalidConfig("n_cycles must be at least 1".into()));
        }
        let width = n.data_inputs().len();
        let mut rng = seed::derived_rng(seed, &[0x574b_4c44]);
        let stimulus = (0..n_cycles)
            .map(|_| (0..width).map(|_| rng.random::<bool>()).collect())
            .collect();
        Ok(Workload {
            stimulus,
            observed: n.outputs(),
            initial_state: None,
        })
    }

    pub fn from_vectors(n: &Netlist, stimulus: Vec<Vec<bool>>) -> Result<Workload, FaultError> {
        let w = Workload {
            stimulus,
            observed: n.outputs(),
            initial_state: None,
        };
        w.check(n)?;
        Ok(w)
    }

    pub fn check(&self, n: &Netlist) -> Result<(), FaultError> {
        if self.stimulus.is_empty() {
            return Err(FaultError::InvalidConfig("workload has no cycles".into()));
        }
        let width = n.data_inputs().len();
        if let Some((cycle, v)) = self.stimulus.iter().enumerate().find(|(_, v)| v.len() != width) {
            return Err(FaultError::StimulusShape {
                cycle,
                expected: width,
                got: v.len(),
            });
        }
        if let Some(init) = &self.initial_state {
            if init.len() != n.flipflop_cells().len() {
                return Err(FaultError::InvalidConfig(format!(
                    "initial state has {} bits for {} flip-flops",
                    init.len(),
                    n.flipflop_cells().len()
                )));
            }
        }
        let outputs = n.outputs();
        if self.observed.iter().any(|p| !outputs.contains(p)) {
            return Err(FaultError::InvalidConfig("observed port is not an output".into()));
        }
        Ok(())
    }

    pub fn parse_hex(n: &Netlist, text: &str) -> Result<Workload, FaultError> {
        let width = n.data_inputs().len();
        let mut stimulus = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| FaultError::Workload { line: ln + 1, msg };
            let digits = line
                .strip_prefix("0x")
                .or_else(|| line.strip_prefix("0X"))
                .unwrap_or(line);
            let mut bits = vec![false; width];
            for (k, ch) in digits.chars().rev().enumerate() {
                let nibble = ch
                    .to_digit(16)
                    .ok_or_else(|| err(format!("`{ch}` is not a hex digit")))?;
                for b in 0..4 {
                    if nibble >> b & 1 == 1 {
                        let idx = 4 * k + b;
                        if idx >= width {
                            return Err(err(format!("vector `{digits}` wider than {width} inputs")));
                        }
                        bits[idx] = true;
                    }
                }
            }
            stimulus.push(bits);
        }
        if stimulus.is_empty() {
            return Err(FaultError::Workload {
                line: 0,
                msg: "no vectors".into(),
            });
        }
        Workload::from_vectors(n, stimulus)
    }

    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for v in &self.stimulus {
            let digits = v.len().div_ceil(4).max(1);
            for k in (0..digits).rev() {
                let nibble = (0..4)
                    .filter(|b| v.get(4 * k + b).copied().unwrap_or(false))
                    .fold(0u32, |acc, b| acc | 1 << b);
                out.push(char::from_digit(nibble, 16).unwrap());
            }
            out.push('\n');
        }
        out
    }
}
