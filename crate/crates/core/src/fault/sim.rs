// SPDX-License-Identifier: Apache-2.0

//! Zero-delay, cycle-based two-valued simulation.
//!
//! Each cycle: drive data inputs and flip-flop outputs, evaluate the
//! combinational cells in topological order, sample the observed outputs,
//! then latch every flip-flop's D input simultaneously.

use std::collections::VecDeque;

use super::{FaultError, Workload};
use crate::netlist::{Driver, NetId, Netlist};

/// Netlist compiled for repeated simulation.
#[derive(Debug, Clone)]
pub struct Simulator<'a> {
    netlist: &'a Netlist,
    order: Vec<usize>,
    data_inputs: Vec<NetId>,
    ff_q: Vec<NetId>,
    ff_d: Vec<NetId>,
}

/// Fault-free reference run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenTrace {
    /// All net values per cycle, sampled after combinational settling.
    pub nets: Vec<Vec<bool>>,
    /// Flip-flop state at the start of each cycle (after latching).
    pub states: Vec<Vec<bool>>,
    /// Observed output values per cycle, in `Workload::observed` order.
    pub outputs: Vec<Vec<bool>>,
}

impl<'a> Simulator<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self, FaultError> {
        let cells = &netlist.cells;
        let mut indegree = vec![0usize; cells.len()];
        let mut readers: Vec<Vec<usize>> = vec![Vec::new(); cells.len()];
        for (ci, c) in cells.iter().enumerate() {
            if c.kind.is_sequential() {
                continue;
            }
            for &net in &c.inputs {
                if let Driver::Cell(d) = netlist.driver(net) {
                    if !cells[d].kind.is_sequential() {
                        indegree[ci] += 1;
                        readers[d].push(ci);
                    }
                }
            }
        }
        let mut queue: VecDeque<usize> = (0..cells.len())
            .filter(|&i| !cells[i].kind.is_sequential() && indegree[i] == 0)
            .collect();
        let mut order = Vec::with_capacity(cells.len());
        while let Some(c) = queue.pop_front() {
            order.push(c);
            for &r in &readers[c] {
                indegree[r] -= 1;
                if indegree[r] == 0 {
                    queue.push_back(r);
                }
            }
        }
        let comb = cells.iter().filter(|c| !c.kind.is_sequential()).count();
        if order.len() != comb {
            let stuck = (0..cells.len())
                .filter(|&i| !cells[i].kind.is_sequential() && indegree[i] > 0)
                .map(|i| cells[i].name.clone())
                .collect();
            return Err(FaultError::CombinationalLoop { cells: stuck });
        }

        let ffs = netlist.flipflop_cells();
        Ok(Simulator {
            netlist,
            order,
            data_inputs: netlist
                .data_inputs()
                .into_iter()
                .map(|p| netlist.ports[p].net)
                .collect(),
            ff_q: ffs.iter().map(|&c| cells[c].output).collect(),
            ff_d: ffs.iter().map(|&c| cells[c].inputs[0]).collect(),
        })
    }

    pub fn netlist(&self) -> &Netlist {
        self.netlist
    }

    pub fn flipflop_count(&self) -> usize {
        self.ff_q.len()
    }

    fn settle(&self, values: &mut [bool], inputs: &[bool], state: &[bool]) {
        for (net, &v) in self.data_inputs.iter().zip(inputs) {
            values[net.0] = v;
        }
        for (net, &v) in self.ff_q.iter().zip(state) {
            values[net.0] = v;
        }
        let mut pins = [false; 3];
        for &ci in &self.order {
            let cell = &self.netlist.cells[ci];
            for (slot, net) in pins.iter_mut().zip(&cell.inputs) {
                *slot = values[net.0];
            }
            values[cell.output.0] = cell.kind.eval(&pins[..cell.inputs.len()]);
        }
    }

    fn observe(&self, values: &[bool], w: &Workload, out: &mut Vec<bool>) {
        out.clear();
        out.extend(w.observed.iter().map(|&p| values[self.netlist.ports[p].net.0]));
    }

    fn latch(&self, values: &[bool], state: &mut [bool]) {
        for (s, d) in state.iter_mut().zip(&self.ff_d) {
            *s = values[d.0];
        }
    }

    fn initial_state(&self, w: &Workload) -> Vec<bool> {
        w.initial_state
            .clone()
            .unwrap_or_else(|| vec![false; self.ff_q.len()])
    }

    pub fn golden(&self, w: &Workload) -> Result<GoldenTrace, FaultError> {
        w.check(self.netlist)?;
        let mut values = vec![false; self.netlist.nets.len()];
        let mut state = self.initial_state(w);
        let mut trace = GoldenTrace {
            nets: Vec::with_capacity(w.n_cycles()),
            states: Vec::with_capacity(w.n_cycles()),
            outputs: Vec::with_capacity(w.n_cycles()),
        };
        let mut out = Vec::new();
        for inputs in &w.stimulus {
            trace.states.push(state.clone());
            self.settle(&mut values, inputs, &state);
            self.observe(&values, w, &mut out);
            trace.outputs.push(out.clone());
            trace.nets.push(values.clone());
            self.latch(&values, &mut state);
        }
        Ok(trace)
    }

    /// Full simulation with state-bit inversions `(flip-flop position,
    /// cycle)` applied at the start of their cycles. Returns the observed
    /// outputs per cycle.
    pub fn run_with_flips(&self, w: &Workload, flips: &[(usize, usize)]) -> Result<Vec<Vec<bool>>, FaultError> {
        w.check(self.netlist)?;
        for &(ff, t) in flips {
            self.check_target(ff, t, w)?;
        }
        let mut values = vec![false; self.netlist.nets.len()];
        let mut state = self.initial_state(w);
        let mut outputs = Vec::with_capacity(w.n_cycles());
        let mut out = Vec::new();
        for (cycle, inputs) in w.stimulus.iter().enumerate() {
            for &(ff, t) in flips {
                if t == cycle {
                    state[ff] = !state[ff];
                }
            }
            self.settle(&mut values, inputs, &state);
            self.observe(&values, w, &mut out);
            outputs.push(out.clone());
            self.latch(&values, &mut state);
        }
        Ok(outputs)
    }

    fn check_target(&self, ff: usize, t: usize, w: &Workload) -> Result<(), FaultError> {
        if ff >= self.ff_q.len() {
            return Err(FaultError::UnknownFlipFlop(format!("#{ff}")));
        }
        if t >= w.n_cycles() {
            return Err(FaultError::CycleOutOfRange {
                cycle: t,
                n_cycles: w.n_cycles(),
            });
        }
        Ok(())
    }

    /// Whether flipping flip-flop `ff` at the start of cycle `t` causes an
    /// observed-output mismatch at any cycle `>= t`.
    ///
    /// Resumes from the golden state at `t` and stops at the first mismatch
    /// or as soon as the faulty state re-converges with the golden one.
    pub fn injection_fails(
        &self,
        w: &Workload,
        golden: &GoldenTrace,
        ff: usize,
        t: usize,
    ) -> Result<bool, FaultError> {
        self.check_target(ff, t, w)?;
        let mut state = golden.states[t].clone();
        state[ff] = !state[ff];
        let mut values = vec![false; self.netlist.nets.len()];
        let mut out = Vec::new();
        for cycle in t..w.n_cycles() {
            self.settle(&mut values, &w.stimulus[cycle], &state);
            self.observe(&values, w, &mut out);
            if out != golden.outputs[cycle] {
                return Ok(true);
            }
            self.latch(&values, &mut state);
            if cycle + 1 < w.n_cycles() && state == golden.states[cycle + 1] {
                return Ok(false);
            }
        }
        Ok(false)
    }
}
