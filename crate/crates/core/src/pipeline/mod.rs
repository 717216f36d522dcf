// SPDX-License-Identifier: Apache-2.0

//! Stage orchestration over a working directory.
//!
//! | stage     | reads                               | writes                                   |
//! |-----------|-------------------------------------|------------------------------------------|
//! | `graph`   | netlist                             | `{stem}.gml`                             |
//! | `embed`   | `{stem}.gml`                        | `embeddings.csv`                         |
//! | `labels`  | netlist, optional workload file     | `labels.csv`                             |
//! | `train`   | gml, embeddings, labels             | `weights.txt`, `loss.csv`, `training_set.csv` |
//! | `predict` | gml, embeddings, weights            | `predictions.csv`                        |
//! | `report`  | predictions, labels                 | `report.csv`, `*.dat`                    |

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::embed::{embed, FeatureMatrix};
use crate::eval::{compare_report, ReportOptions};
use crate::fault::{exhaustive_fdr, run_campaign, FdrSource, FdrTable, Workload};
use crate::gcn::{predict, train, GcnModel, TrainingSet};
use crate::graph::gml::{export_gml, import_gml};
use crate::graph::{adjacency_matrix, build_graph, normalize_adjacency, CircuitGraph, NormalizedAdjacency};
use crate::netlist::{parse_netlist, Netlist, NetlistFormat};
use crate::{seed, Error, Result};

pub use config::{CampaignConfig, PipelineConfig, ReportConfig, TrainingConfig};

pub const EMBEDDINGS: &str = "embeddings.csv";
pub const LABELS: &str = "labels.csv";
pub const WEIGHTS: &str = "weights.txt";
pub const LOSS: &str = "loss.csv";
pub const TRAINING_SET: &str = "training_set.csv";
pub const PREDICTIONS: &str = "predictions.csv";
pub const REPORT: &str = "report.csv";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Graph,
    Embed,
    Labels,
    Train,
    Predict,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Graph,
        Stage::Embed,
        Stage::Labels,
        Stage::Train,
        Stage::Predict,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Graph => "graph",
            Stage::Embed => "embed",
            Stage::Labels => "labels",
            Stage::Train => "train",
            Stage::Predict => "predict",
            Stage::Report => "report",
        }
    }
}

/// Picks `k` flip-flops: sorted by simulated FDR (ties by name), cut into
/// `k` contiguous strata, one seeded uniform pick per stratum. Returned in
/// table order.
pub fn select_training(table: &FdrTable, k: usize, seed_value: u64) -> Result<Vec<String>> {
    let n = table.len();
    if k == 0 || k > n {
        return Err(Error::Config(format!("training count {k} must be in 1..={n}")));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (ea, eb) = (&table.entries[a], &table.entries[b]);
        ea.fdr.total_cmp(&eb.fdr).then_with(|| ea.flipflop.cmp(&eb.flipflop))
    });
    let mut picked: Vec<usize> = (0..k)
        .map(|i| {
            let (lo, hi) = (i * n / k, (i + 1) * n / k);
            let mut rng = seed::derived_rng(seed_value, &[i as u64]);
            order[rng.random_range(lo..hi)]
        })
        .collect();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| table.entries[i].flipflop.clone()).collect())
}

pub struct Pipeline {
    cfg: PipelineConfig,
}

impl Pipeline {
    pub fn new(cfg: PipelineConfig) -> Result<Pipeline> {
        cfg.validate()?;
        Ok(Pipeline { cfg })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn workdir(&self) -> &Path {
        &self.cfg.workdir
    }

    fn netlist_path(&self) -> Result<&Path> {
        self.cfg
            .netlist
            .as_deref()
            .ok_or_else(|| Error::Usage("no netlist given (use --netlist or the config `netlist` key)".into()))
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.cfg.workdir.join(name)
    }

    pub fn gml_path(&self) -> Result<PathBuf> {
        let stem = self
            .netlist_path()?
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("netlist")
            .to_string();
        Ok(self.artifact(&format!("{stem}.gml")))
    }

    fn load_netlist(&self) -> Result<Netlist> {
        let path = self.netlist_path()?;
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(parse_netlist(&text, NetlistFormat::from_path(path))?)
    }

    fn write(&self, name: &Path, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.cfg.workdir).map_err(|e| Error::io(&self.cfg.workdir, e))?;
        std::fs::write(name, contents).map_err(|e| Error::io(name, e))?;
        Ok(name.to_path_buf())
    }

    fn read(&self, path: &Path, stage: Stage) -> Result<String> {
        match std::fs::read_to_string(path) {
            Ok(s) => Ok(s),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(Error::MissingArtifact {
                stage: stage.name(),
                path: path.to_path_buf(),
            }),
            Err(e) => Err(Error::io(path, e)),
        }
    }

    fn load_graph(&self) -> Result<CircuitGraph> {
        Ok(import_gml(&self.read(&self.gml_path()?, Stage::Graph)?)?)
    }

    fn load_features(&self) -> Result<FeatureMatrix> {
        Ok(FeatureMatrix::from_csv(&self.read(&self.artifact(EMBEDDINGS), Stage::Embed)?)?)
    }

    fn load_labels(&self) -> Result<FdrTable> {
        Ok(FdrTable::from_csv(
            &self.read(&self.artifact(LABELS), Stage::Labels)?,
            FdrSource::Simulated,
        )?)
    }

    fn operator_and_features(&self) -> Result<(CircuitGraph, NormalizedAdjacency, FeatureMatrix)> {
        let g = self.load_graph()?;
        let x = self.load_features()?;
        if x.rows() != g.len() {
            return Err(Error::Config(format!(
                "{EMBEDDINGS} has {} rows but the graph has {} nodes; rerun `embed`",
                x.rows(),
                g.len()
            )));
        }
        let s = normalize_adjacency(&adjacency_matrix(&g))?;
        Ok((g, s, x))
    }

    pub fn workload(&self, n: &Netlist) -> Result<Workload> {
        let c = &self.cfg.campaign;
        match &c.workload_file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Ok(Workload::parse_hex(n, &text)?)
            }
            None => Ok(Workload::random(n, c.n_cycles, c.workload_seed)?),
        }
    }

    pub fn graph(&self) -> Result<Vec<PathBuf>> {
        let g = build_graph(&self.load_netlist()?);
        Ok(vec![self.write(&self.gml_path()?, &export_gml(&g))?])
    }

    pub fn embed(&self) -> Result<Vec<PathBuf>> {
        let g = self.load_graph()?;
        let x = embed(&g, &self.cfg.walk, &self.cfg.embedding)?;
        Ok(vec![self.write(&self.artifact(EMBEDDINGS), &x.to_csv())?])
    }

    pub fn labels(&self) -> Result<Vec<PathBuf>> {
        let n = self.load_netlist()?;
        let w = self.workload(&n)?;
        let c = &self.cfg.campaign;
        let table = if c.exhaustive {
            exhaustive_fdr(&n, &w)?
        } else {
            run_campaign(&n, &w, c.injections_per_ff, c.seed)?
        };
        Ok(vec![self.write(&self.artifact(LABELS), &table.to_csv())?])
    }

    /// Names of the labeled flip-flops per the training config.
    pub fn training_flipflops(&self, labels: &FdrTable) -> Result<Vec<String>> {
        let t = &self.cfg.training;
        if let Some(list) = &t.flipflops {
            return Ok(list.clone());
        }
        let k = t.count.unwrap_or(5.min(labels.len()));
        select_training(labels, k, t.seed)
    }

    pub fn train(&self) -> Result<Vec<PathBuf>> {
        let (g, s, x) = self.operator_and_features()?;
        let labels = self.load_labels()?;
        let names = self.training_flipflops(&labels)?;
        let t = TrainingSet::from_table(&g, &labels, &names)?;
        let out = train(&s, x.values().view(), &t, &self.cfg.gcn)?;

        let mut loss = String::from("epoch,loss\n");
        for (e, l) in out.loss_history.iter().enumerate() {
            let _ = writeln!(loss, "{e},{l}");
        }
        let _ = writeln!(loss, "{},{}", out.loss_history.len(), out.final_loss);
        let mut ts = String::from("flipflop,node,label\n");
        for (i, name) in names.iter().enumerate() {
            let _ = writeln!(ts, "{name},{},{}", t.nodes()[i], t.labels()[i]);
        }
        Ok(vec![
            self.write(&self.artifact(WEIGHTS), &out.model.to_text(self.cfg.gcn.weight_init_seed))?,
            self.write(&self.artifact(LOSS), &loss)?,
            self.write(&self.artifact(TRAINING_SET), &ts)?,
        ])
    }

    pub fn predict(&self) -> Result<Vec<PathBuf>> {
        let model = GcnModel::from_text(&self.read(&self.artifact(WEIGHTS), Stage::Train)?)?;
        let (g, s, x) = self.operator_and_features()?;
        let table = predict(&s, x.values().view(), &model, &g)?;
        Ok(vec![self.write(&self.artifact(PREDICTIONS), &table.to_csv())?])
    }

    pub fn report(&self) -> Result<Vec<PathBuf>> {
        let predicted = FdrTable::from_csv(
            &self.read(&self.artifact(PREDICTIONS), Stage::Predict)?,
            FdrSource::Predicted,
        )?;
        let simulated = self.load_labels()?;
        let opts = ReportOptions {
            bins: self.cfg.report.bins,
            filter_outliers: self.cfg.report.filter_outliers,
        };
        let r = compare_report(&predicted, &simulated, opts)?;
        let mut written = vec![self.write(&self.artifact(REPORT), &r.to_csv())?];
        for (name, contents) in r.plot_files() {
            written.push(self.write(&self.artifact(name), &contents)?);
        }
        Ok(written)
    }

    pub fn run(&self, stage: Stage) -> Result<Vec<PathBuf>> {
        match stage {
            Stage::Graph => self.graph(),
            Stage::Embed => self.embed(),
            Stage::Labels => self.labels(),
            Stage::Train => self.train(),
            Stage::Predict => self.predict(),
            Stage::Report => self.report(),
        }
    }

    /// Every stage in order.
    pub fn run_all(&self) -> Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for stage in Stage::ALL {
            written.extend(self.run(stage)?);
        }
        Ok(written)
    }
}
