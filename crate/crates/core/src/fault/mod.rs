// SPDX-License-Identifier: Apache-2.0

//! SEU fault injection and per-flip-flop functional de-rating.
//!
//! An injection inverts one flip-flop's state at the start of one cycle
//! and is a failure when any observed output differs from the golden run
//! at that cycle or later. FDR is the failure fraction over the injected
//! cycles.

mod sim;
mod workload;

use std::fmt::Write;

use rand::seq::index;
use rayon::prelude::*;
use thiserror::Error;

use crate::netlist::Netlist;
use crate::seed;

pub use sim::{GoldenTrace, Simulator};
pub use workload::Workload;

/// Upper bound on `flip-flops x cycles` for [`exhaustive_fdr`].
pub const EXHAUSTIVE_LIMIT: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaultError {
    #[error("combinational loop through cells {cells:?}")]
    CombinationalLoop { cells: Vec<String> },
    #[error("unknown flip-flop `{0}`")]
    UnknownFlipFlop(String),
    #[error("injection cycle {cycle} outside workload of {n_cycles} cycles")]
    CycleOutOfRange { cycle: usize, n_cycles: usize },
    #[error("exhaustive campaign needs {requested} injections, limit is {limit}")]
    GuardExceeded { requested: usize, limit: usize },
    #[error("invalid campaign configuration: {0}")]
    InvalidConfig(String),
    #[error("stimulus for cycle {cycle} has {got} bits, expected {expected}")]
    StimulusShape {
        cycle: usize,
        expected: usize,
        got: usize,
    },
    #[error("workload line {line}: {msg}")]
    Workload { line: usize, msg: String },
    #[error("fdr csv line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectionResult {
    pub flipflop: String,
    pub cycle: usize,
    pub failed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdrSource {
    Simulated,
    Predicted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdrEntry {
    pub flipflop: String,
    pub injections: u64,
    pub failures: u64,
    pub fdr: f64,
}

/// FDR per flip-flop, in netlist flip-flop order.
#[derive(Debug, Clone, PartialEq)]
pub struct FdrTable {
    pub source: FdrSource,
    pub entries: Vec<FdrEntry>,
}

impl FdrTable {
    pub fn predicted(names: Vec<String>, values: Vec<f64>) -> FdrTable {
        FdrTable {
            source: FdrSource::Predicted,
            entries: names
                .into_iter()
                .zip(values)
                .map(|(flipflop, fdr)| FdrEntry {
                    flipflop,
                    injections: 0,
                    failures: 0,
                    fdr,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, flipflop: &str) -> Option<&FdrEntry> {
        self.entries.iter().find(|e| e.flipflop == flipflop)
    }

    pub fn fdr_values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.fdr).collect()
    }

    /// Header `flipflop,injections,failures,fdr`; values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("flipflop,injections,failures,fdr\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{}", e.flipflop, e.injections, e.failures, e.fdr);
        }
        out
    }

    pub fn from_csv(text: &str, source: FdrSource) -> Result<FdrTable, FaultError> {
        let err = |line: usize, msg: String| FaultError::Csv { line, msg };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "flipflop,injections,failures,fdr" => {}
            Some((_, h)) => return Err(err(1, format!("unexpected header `{h}`"))),
            None => return Err(err(1, "empty file".into())),
        }
        let mut entries = Vec::new();
        for (ln, line) in lines {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 4 {
                return Err(err(ln + 1, format!("expected 4 fields, found {}", f.len())));
            }
            let injections: u64 = f[1].parse().map_err(|_| err(ln + 1, format!("bad count `{}`", f[1])))?;
            let failures: u64 = f[2].parse().map_err(|_| err(ln + 1, format!("bad count `{}`", f[2])))?;
            let fdr: f64 = f[3].parse().map_err(|_| err(ln + 1, format!("bad fdr `{}`", f[3])))?;
            if failures > injections && source == FdrSource::Simulated {
                return Err(err(ln + 1, "failures exceed injections".into()));
            }
            if !(0.0..=1.0).contains(&fdr) {
                return Err(err(ln + 1, format!("fdr {fdr} outside [0, 1]")));
            }
            if source == FdrSource::Simulated
                && injections > 0
                && fdr != failures as f64 / injections as f64
            {
                return Err(err(ln + 1, "fdr inconsistent with counts".into()));
            }
            entries.push(FdrEntry {
                flipflop: f[0].to_string(),
                injections,
                failures,
                fdr,
            });
        }
        Ok(FdrTable { source, entries })
    }
}

fn flipflop_position(n: &Netlist, ff: &str) -> Result<usize, FaultError> {
    n.list_flipflops()
        .iter()
        .position(|&name| name == ff)
        .ok_or_else(|| FaultError::UnknownFlipFlop(ff.to_string()))
}

pub fn simulate_golden(n: &Netlist, w: &Workload) -> Result<GoldenTrace, FaultError> {
    Simulator::new(n)?.golden(w)
}

pub fn inject_seu(n: &Netlist, w: &Workload, ff: &str, t: usize) -> Result<InjectionResult, FaultError> {
    let pos = flipflop_position(n, ff)?;
    let sim = Simulator::new(n)?;
    let golden = sim.golden(w)?;
    Ok(InjectionResult {
        flipflop: ff.to_string(),
        cycle: t,
        failed: sim.injection_fails(w, &golden, pos, t)?,
    })
}

fn campaign(
    n: &Netlist,
    w: &Workload,
    cycles_for: impl Fn(usize) -> Vec<usize> + Sync,
) -> Result<FdrTable, FaultError> {
    let sim = Simulator::new(n)?;
    let golden = sim.golden(w)?;
    let names = n.list_flipflops();
    let entries = (0..names.len())
        .into_par_iter()
        .map(|ff| {
            let cycles = cycles_for(ff);
            let mut failures = 0u64;
            for &t in &cycles {
                if sim.injection_fails(w, &golden, ff, t)? {
                    failures += 1;
                }
            }
            let injections = cycles.len() as u64;
            Ok(FdrEntry {
                flipflop: names[ff].to_string(),
                injections,
                failures,
                fdr: failures as f64 / injections as f64,
            })
        })
        .collect::<Result<Vec<_>, FaultError>>()?;
    Ok(FdrTable {
        source: FdrSource::Simulated,
        entries,
    })
}

/// Samples `injections_per_ff` distinct cycles per flip-flop (all cycles
/// once `injections_per_ff >= n_cycles`).
pub fn run_campaign(
    n: &Netlist,
    w: &Workload,
    injections_per_ff: usize,
    seed: u64,
) -> Result<FdrTable, FaultError> {
    if injections_per_ff == 0 {
        return Err(FaultError::InvalidConfig("injections_per_ff must be at least 1".into()));
    }
    let n_cycles = w.n_cycles();
    campaign(n, w, |ff| {
        if injections_per_ff >= n_cycles {
            return (0..n_cycles).collect();
        }
        let mut rng = seed::derived_rng(seed, &[ff as u64]);
        let mut cycles = index::sample(&mut rng, n_cycles, injections_per_ff).into_vec();
        cycles.sort_unstable();
        cycles
    })
}

/// Injects every `(flip-flop, cycle)` pair once.
pub fn exhaustive_fdr(n: &Netlist, w: &Workload) -> Result<FdrTable, FaultError> {
    let requested = n.flipflop_cells().len() * w.n_cycles();
    if requested > EXHAUSTIVE_LIMIT {
        return Err(FaultError::GuardExceeded {
            requested,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let n_cycles = w.n_cycles();
    campaign(n, w, |_| (0..n_cycles).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netlist::verilog;

    /// `fo` drives an output directly, `fm` is ANDed with a constant zero,
    /// `fu` reaches nothing observable.
    const MIXED: &str = "module mixed(clk, a, b, y, z);
        input clk, a, b; output y, z;
        wire qm, qu, zero, na;
        DFF fo(.D(a), .CLK(clk), .Q(y));
        XOR2 tie(.A(a), .B(a), .Y(zero));
        DFF fm(.D(b), .CLK(clk), .Q(qm));
        AND2 mask(.A(qm), .B(zero), .Y(z));
        DFF fu(.D(b), .CLK(clk), .Q(qu));
        NOT dead(.A(qu), .Y(na));
    endmodule";

    fn mixed() -> (Netlist, Workload) {
        let n = verilog::parse(MIXED).unwrap();
        let w = Workload::random(&n, 10, 1).unwrap();
        (n, w)
    }

    #[test]
    fn observability_cases() {
        let (n, w) = mixed();
        for t in 0..10 {
            assert!(inject_seu(&n, &w, "fo", t).unwrap().failed);
            assert!(!inject_seu(&n, &w, "fm", t).unwrap().failed);
            assert!(!inject_seu(&n, &w, "fu", t).unwrap().failed);
        }
        assert_eq!(inject_seu(&n, &w, "nope", 0), Err(FaultError::UnknownFlipFlop("nope".into())));
        assert!(matches!(inject_seu(&n, &w, "fo", 10), Err(FaultError::CycleOutOfRange { .. })));
    }

    #[test]
    fn exhaustive_counts() {
        let (n, w) = mixed();
        let t = exhaustive_fdr(&n, &w).unwrap();
        let fo = t.get("fo").unwrap();
        assert_eq!((fo.injections, fo.failures, fo.fdr), (10, 10, 1.0));
        assert_eq!(t.get("fm").unwrap().fdr, 0.0);
        assert_eq!(t.get("fu").unwrap().fdr, 0.0);
        assert_eq!(t.entries.iter().map(|e| e.flipflop.as_str()).collect::<Vec<_>>(), ["fo", "fm", "fu"]);
    }

    #[test]
    fn sampled_campaign_counts() {
        let (n, w) = mixed();
        let t = run_campaign(&n, &w, 4, 9).unwrap();
        assert_eq!(t.get("fo").unwrap().fdr, 1.0);
        assert_eq!(t.get("fu").unwrap().fdr, 0.0);
        assert!(t.entries.iter().all(|e| e.injections == 4 && e.failures <= e.injections));
        assert_eq!(t, run_campaign(&n, &w, 4, 9).unwrap());
        // saturates to every cycle
        assert_eq!(run_campaign(&n, &w, 50, 9).unwrap(), exhaustive_fdr(&n, &w).unwrap());
        assert!(matches!(run_campaign(&n, &w, 0, 9), Err(FaultError::InvalidConfig(_))));
    }

    #[test]
    fn sr4_fdr_matches_hand_count() {
        // A flip in ffk reaches dout after 3-k cycles and is always visible
        // there, so it fails iff t + 3 - k < 64.
        let n = verilog::parse(fixtures::SR4).unwrap();
        let w = Workload::random(&n, 64, 1).unwrap();
        let t = exhaustive_fdr(&n, &w).unwrap();
        for (k, e) in t.entries.iter().enumerate() {
            assert_eq!(e.failures, 64 - (3 - k as u64), "{}", e.flipflop);
        }
    }

    #[test]
    fn guard() {
        let n = verilog::parse(fixtures::LFSR_CMP).unwrap();
        let w = Workload::random(&n, 20_001, 1).unwrap();
        assert_eq!(
            exhaustive_fdr(&n, &w),
            Err(FaultError::GuardExceeded {
                requested: 1_000_050,
                limit: EXHAUSTIVE_LIMIT
            })
        );
    }

    #[test]
    fn csv_round_trip() {
        let (n, w) = mixed();
        let t = run_campaign(&n, &w, 3, 2).unwrap();
        let text = t.to_csv();
        assert!(text.starts_with("flipflop,injections,failures,fdr\nfo,3,3,1\n"));
        assert_eq!(FdrTable::from_csv(&text, FdrSource::Simulated).unwrap(), t);
        assert!(FdrTable::from_csv("flipflop,injections,failures,fdr\nx,2,3,1\n", FdrSource::Simulated).is_err());
        assert!(FdrTable::from_csv("flipflop,injections,failures,fdr\nx,2,1,0.4\n", FdrSource::Simulated).is_err());
        let p = FdrTable::predicted(vec!["a".into()], vec![0.25]);
        assert_eq!(FdrTable::from_csv(&p.to_csv(), FdrSource::Predicted).unwrap(), p);
    }
}
