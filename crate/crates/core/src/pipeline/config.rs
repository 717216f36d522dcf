// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingConfig, WalkConfig};
use crate::gcn::GcnConfig;
use crate::seed;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CampaignConfig {
    pub n_cycles: usize,
    pub injections_per_ff: usize,
    pub workload_seed: u64,
    /// Seed for the sampled injection cycles.
    pub seed: u64,
    /// Inject every cycle of every flip-flop instead of sampling.
    pub exhaustive: bool,
    /// Hex stimulus file; replaces the random workload when set.
    pub workload_file: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            n_cycles: 1024,
            injections_per_ff: 256,
            workload_seed: 4,
            seed: 5,
            exhaustive: false,
            workload_file: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    /// Explicit labeled flip-flops; overrides `count`.
    pub flipflops: Option<Vec<String>>,
    /// Number of stratified random picks; `None` means `min(5, #flip-flops)`.
    pub count: Option<usize>,
    pub seed: u64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            flipflops: None,
            count: None,
            seed: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub bins: usize,
    pub filter_outliers: bool,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            bins: 20,
            filter_outliers: false,
        }
    }
}

/// JSON pipeline configuration. Relative paths resolve against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub netlist: Option<PathBuf>,
    pub workdir: PathBuf,
    pub walk: WalkConfig,
    pub embedding: EmbeddingConfig,
    pub gcn: GcnConfig,
    pub campaign: CampaignConfig,
    pub training: TrainingConfig,
    pub report: ReportConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            netlist: None,
            workdir: PathBuf::from("gcnfdr-out"),
            walk: WalkConfig::default(),
            embedding: EmbeddingConfig::default(),
            gcn: GcnConfig::default(),
            campaign: CampaignConfig::default(),
            training: TrainingConfig::default(),
            report: ReportConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_json(text: &str, base: &Path) -> Result<PipelineConfig> {
        let mut cfg: PipelineConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.resolve(base);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        PipelineConfig::from_json(&text, base)
    }

    fn resolve(&mut self, base: &Path) {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(p) = &mut self.netlist {
            join(p);
        }
        join(&mut self.workdir);
        if let Some(p) = &mut self.campaign.workload_file {
            join(p);
        }
    }

    /// Replaces every seed with one derived from `root`.
    pub fn override_seeds(&mut self, root: u64) {
        self.walk.seed = seed::derive(root, &[1]);
        self.embedding.seed = seed::derive(root, &[2]);
        self.gcn.weight_init_seed = seed::derive(root, &[3]);
        self.campaign.workload_seed = seed::derive(root, &[4]);
        self.campaign.seed = seed::derive(root, &[5]);
        self.training.seed = seed::derive(root, &[6]);
    }

    pub fn validate(&self) -> Result<()> {
        self.walk.validate()?;
        self.embedding.validate()?;
        self.gcn.validate()?;
        if self.gcn.layer_dims[0] != self.embedding.dimension {
            return Err(Error::Config(format!(
                "gcn.layer_dims[0] = {} must equal embedding.dimension = {}",
                self.gcn.layer_dims[0], self.embedding.dimension
            )));
        }
        if self.campaign.n_cycles == 0 {
            return Err(Error::Config("campaign.n_cycles must be at least 1".into()));
        }
        if self.campaign.injections_per_ff == 0 && !self.campaign.exhaustive {
            return Err(Error::Config("campaign.injections_per_ff must be at least 1".into()));
        }
        if self.training.count == Some(0) {
            return Err(Error::Config("training.count must be at least 1".into()));
        }
        if matches!(&self.training.flipflops, Some(v) if v.is_empty()) {
            return Err(Error::Config("training.flipflops is empty".into()));
        }
        if self.report.bins == 0 {
            return Err(Error::Config("report.bins must be at least 1".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
