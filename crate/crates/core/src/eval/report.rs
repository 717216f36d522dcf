// SPDX-License-Identifier: Apache-2.0

//! Sectioned CSV report and whitespace-separated plot data.
//!
//! Sections start with a `[name]` line followed by a CSV header:
//! `pairs`, `ci`, `histogram`, `sorted_predicted`, `sorted_simulated`,
//! `summary`.

use std::fmt::Write;

use super::{
    confidence_interval, histogram, iqr_fence, mean_absolute_error, sorted_entries, spearman, CiSummary, EvalError,
    Histogram,
};
use crate::fault::{FdrEntry, FdrSource, FdrTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub bins: usize,
    pub filter_outliers: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            bins: 20,
            filter_outliers: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pair {
    pub flipflop: String,
    pub predicted: f64,
    pub simulated: f64,
    /// False when dropped by the outlier filter.
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    /// In simulated-table order.
    pub pairs: Vec<Pair>,
    pub ci_predicted: CiSummary,
    pub ci_simulated: CiSummary,
    pub hist_predicted: Histogram,
    pub hist_simulated: Histogram,
    pub sorted_predicted: Vec<(String, f64)>,
    pub sorted_simulated: Vec<(String, f64)>,
    pub mae: f64,
    pub ci_overlap: bool,
    pub spearman: f64,
}

fn kept_table(pairs: &[Pair], pick: impl Fn(&Pair) -> f64) -> FdrTable {
    FdrTable {
        source: FdrSource::Predicted,
        entries: pairs
            .iter()
            .filter(|p| p.kept)
            .map(|p| FdrEntry {
                flipflop: p.flipflop.clone(),
                injections: 0,
                failures: 0,
                fdr: pick(p),
            })
            .collect(),
    }
}

/// Pairs the tables by flip-flop name; statistics use kept pairs only.
pub fn compare_report(predicted: &FdrTable, simulated: &FdrTable, opts: ReportOptions) -> Result<Report, EvalError> {
    for e in &predicted.entries {
        if simulated.get(&e.flipflop).is_none() {
            return Err(EvalError::MismatchedFlipFlops(e.flipflop.clone()));
        }
    }
    let mut pairs = Vec::with_capacity(simulated.len());
    for e in &simulated.entries {
        let p = predicted
            .get(&e.flipflop)
            .ok_or_else(|| EvalError::MismatchedFlipFlops(e.flipflop.clone()))?;
        pairs.push(Pair {
            flipflop: e.flipflop.clone(),
            predicted: p.fdr,
            simulated: e.fdr,
            kept: true,
        });
    }
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }
    if opts.filter_outliers {
        let sim: Vec<f64> = pairs.iter().map(|p| p.simulated).collect();
        let (lo, hi) = iqr_fence(&sim)?;
        for p in &mut pairs {
            p.kept = (lo..=hi).contains(&p.simulated);
        }
    }
    let pt = kept_table(&pairs, |p| p.predicted);
    let st = kept_table(&pairs, |p| p.simulated);
    let (pv, sv) = (pt.fdr_values(), st.fdr_values());
    let ci_predicted = confidence_interval(&pv)?;
    let ci_simulated = confidence_interval(&sv)?;
    let owned = |t: &FdrTable| {
        sorted_entries(t)
            .into_iter()
            .map(|(n, v)| (n.to_string(), v))
            .collect::<Vec<_>>()
    };
    Ok(Report {
        hist_predicted: histogram(&pv, opts.bins)?,
        hist_simulated: histogram(&sv, opts.bins)?,
        sorted_predicted: owned(&pt),
        sorted_simulated: owned(&st),
        mae: mean_absolute_error(&pv, &sv),
        ci_overlap: ci_predicted.overlaps(&ci_simulated),
        spearman: spearman(&pv, &sv),
        ci_predicted,
        ci_simulated,
        pairs,
    })
}

impl Report {
    pub fn to_csv(&self) -> String {
        let mut o = String::new();
        o.push_str("[pairs]\nflipflop,predicted,simulated,abs_error,kept\n");
        for p in &self.pairs {
            let _ = writeln!(
                o,
                "{},{},{},{},{}",
                p.flipflop,
                p.predicted,
                p.simulated,
                (p.predicted - p.simulated).abs(),
                u8::from(p.kept)
            );
        }
        o.push_str("\n[ci]\nsource,mean,half_width,n,lower,upper\n");
        for (name, c) in [("predicted", &self.ci_predicted), ("simulated", &self.ci_simulated)] {
            let _ = writeln!(o, "{name},{},{},{},{},{}", c.mean, c.half_width, c.n, c.lower(), c.upper());
        }
        o.push_str("\n[histogram]\nbin,lower,upper,predicted,simulated\n");
        let e = &self.hist_predicted.bin_edges;
        for b in 0..self.hist_predicted.counts.len() {
            let _ = writeln!(
                o,
                "{b},{},{},{},{}",
                e[b],
                e[b + 1],
                self.hist_predicted.counts[b],
                self.hist_simulated.counts[b]
            );
        }
        for (name, curve) in [
            ("sorted_predicted", &self.sorted_predicted),
            ("sorted_simulated", &self.sorted_simulated),
        ] {
            let _ = write!(o, "\n[{name}]\nrank,flipflop,fdr\n");
            for (rank, (ff, v)) in curve.iter().enumerate() {
                let _ = writeln!(o, "{rank},{ff},{v}");
            }
        }
        o.push_str("\n[summary]\nkey,value\n");
        let kept = self.pairs.iter().filter(|p| p.kept).count();
        let _ = writeln!(o, "flipflops,{}", self.pairs.len());
        let _ = writeln!(o, "kept,{kept}");
        let _ = writeln!(o, "mae,{}", self.mae);
        let _ = writeln!(o, "ci_overlap,{}", self.ci_overlap);
        let _ = writeln!(o, "spearman,{}", self.spearman);
        o
    }

    /// `ci.dat`: `index source mean half_width lower upper n`.
    pub fn ci_dat(&self) -> String {
        let mut o = String::from("# index source mean half_width lower upper n\n");
        for (i, (name, c)) in [("predicted", &self.ci_predicted), ("simulated", &self.ci_simulated)]
            .into_iter()
            .enumerate()
        {
            let _ = writeln!(o, "{i} {name} {} {} {} {} {}", c.mean, c.half_width, c.lower(), c.upper(), c.n);
        }
        o
    }

    /// `hist_pred.dat` / `hist_sim.dat`: `lower upper center count`.
    pub fn hist_dat(h: &Histogram) -> String {
        let mut o = String::from("# lower upper center count\n");
        for (b, c) in h.counts.iter().enumerate() {
            let (lo, hi) = (h.bin_edges[b], h.bin_edges[b + 1]);
            let _ = writeln!(o, "{lo} {hi} {} {c}", (lo + hi) / 2.0);
        }
        o
    }

    /// `sorted.dat`: `rank predicted simulated`.
    pub fn sorted_dat(&self) -> String {
        let mut o = String::from("# rank predicted simulated\n");
        for (rank, (p, s)) in self.sorted_predicted.iter().zip(&self.sorted_simulated).enumerate() {
            let _ = writeln!(o, "{rank} {} {}", p.1, s.1);
        }
        o
    }

    /// `(file name, contents)` for every plot data file.
    pub fn plot_files(&self) -> Vec<(&'static str, String)> {
        vec![
            ("ci.dat", self.ci_dat()),
            ("hist_pred.dat", Report::hist_dat(&self.hist_predicted)),
            ("hist_sim.dat", Report::hist_dat(&self.hist_simulated)),
            ("sorted.dat", self.sorted_dat()),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(source: FdrSource, pairs: &[(&str, f64)]) -> FdrTable {
        let mut t = FdrTable::predicted(
            pairs.iter().map(|p| p.0.to_string()).collect(),
            pairs.iter().map(|p| p.1).collect(),
        );
        t.source = source;
        t
    }

    #[test]
    fn identical_tables() {
        let t = table(FdrSource::Simulated, &[("a", 0.1), ("b", 0.6), ("c", 0.9), ("d", 0.35)]);
        let r = compare_report(&t, &t, ReportOptions::default()).unwrap();
        assert_eq!(r.mae, 0.0);
        assert_eq!(r.spearman, 1.0);
        assert!(r.ci_overlap);
        assert_eq!(r.hist_predicted, r.hist_simulated);
        assert_eq!(r.ci_predicted, confidence_interval(&t.fdr_values()).unwrap());
        let csv = r.to_csv();
        for s in ["[pairs]", "[ci]", "[histogram]", "[sorted_predicted]", "[sorted_simulated]", "[summary]"] {
            assert!(csv.contains(s), "{s}");
        }
        assert!(csv.contains("mae,0\n"));
        assert_eq!(r.plot_files().len(), 4);
        assert_eq!(r.sorted_dat().lines().count(), 5);
    }

    #[test]
    fn mismatched_sets() {
        let a = table(FdrSource::Predicted, &[("a", 0.1)]);
        let b = table(FdrSource::Simulated, &[("b", 0.1)]);
        assert_eq!(
            compare_report(&a, &b, ReportOptions::default()),
            Err(EvalError::MismatchedFlipFlops("a".into()))
        );
        let c = table(FdrSource::Simulated, &[("a", 0.1), ("b", 0.2)]);
        assert_eq!(
            compare_report(&a, &c, ReportOptions::default()),
            Err(EvalError::MismatchedFlipFlops("b".into()))
        );
    }

    #[test]
    fn outlier_filter() {
        let sim = table(
            FdrSource::Simulated,
            &[("a", 0.50), ("b", 0.52), ("c", 0.48), ("d", 0.51), ("e", 0.49), ("f", 0.0)],
        );
        let pred = table(
            FdrSource::Predicted,
            &[("a", 0.5), ("b", 0.5), ("c", 0.5), ("d", 0.5), ("e", 0.5), ("f", 0.9)],
        );
        let opts = ReportOptions {
            filter_outliers: true,
            ..ReportOptions::default()
        };
        let r = compare_report(&pred, &sim, opts).unwrap();
        assert!(!r.pairs[5].kept);
        assert_eq!(r.ci_simulated.n, 5);
        assert_eq!(r.sorted_predicted.len(), 5);
        assert!(r.mae < 0.02);
        let unfiltered = compare_report(&pred, &sim, ReportOptions::default()).unwrap();
        assert_eq!(unfiltered.ci_simulated.n, 6);
    }
}
