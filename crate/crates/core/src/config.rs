//! Experiment configuration and result records.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::estimators::SiteSet;
use crate::geometry::{RegionSpec, Site};
use crate::metric::DEFAULT_SITE_CAP;
use crate::randomness::DistributionSpec;

pub const SEED_ENV: &str = "CONEFPP_SEED";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Mu,
    CylinderMu,
    Deviation,
    TailSum,
    Lp,
    Shape,
    LogWedge,
    Dynamical,
    VerifyGeometry,
    MuContinuity,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Mu => "mu",
            ExperimentKind::CylinderMu => "cylinder-mu",
            ExperimentKind::Deviation => "deviation",
            ExperimentKind::TailSum => "tail-sum",
            ExperimentKind::Lp => "lp",
            ExperimentKind::Shape => "shape",
            ExperimentKind::LogWedge => "log-wedge",
            ExperimentKind::Dynamical => "dynamical",
            ExperimentKind::VerifyGeometry => "verify-geometry",
            ExperimentKind::MuContinuity => "mu-continuity",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sizes {
    #[serde(default)]
    pub n: Vec<i64>,
    #[serde(default)]
    pub t: Vec<f64>,
    /// Euclidean radius for tail sums.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default)]
    pub replicas: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MuMethod {
    /// Polygon through the direction fan (d = 2).
    Shape,
    /// μ̂ along the target direction only.
    Direction,
}

/// How the plug-in μ̂ is built. It uses its own seed stream, independent of
/// the replicas it is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuReferenceConfig {
    pub method: MuMethod,
    pub n: i64,
    pub replicas: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistributionSpec>,
    /// Weight laws for mu-continuity.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dists: Vec<DistributionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default)]
    pub sizes: Sizes,
    /// Target site z (or direction for mu kinds).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site_set: Option<SiteSet>,
    /// Cylinder radii for cylinder-mu.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(f64, f64)>,
    /// Subwindow length for the dynamical envelope cross-check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Sup-statistic cutoff as a fraction of t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_reference: Option<MuReferenceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
    /// Root of the output tree. Not part of the experiment: it is left out
    /// of the hash and of the config echoed in result records.
    #[serde(default = "default_output_dir", skip_serializing_if = "is_unset")]
    pub output_dir: PathBuf,
}

fn is_unset(p: &Path) -> bool {
    p.as_os_str().is_empty()
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        ExperimentConfig {
            experiment,
            region: None,
            dist: None,
            dists: Vec::new(),
            seed: None,
            sizes: Sizes::default(),
            site: None,
            dim: None,
            epsilon: None,
            p: None,
            site_set: None,
            radii: Vec::new(),
            window: None,
            delta: None,
            cutoff: None,
            mu_reference: None,
            cap: None,
            output_dir: default_output_dir(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::validation("config", e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Seed precedence: explicit flag, then the config field, then
    /// `CONEFPP_SEED`, then 0.
    pub fn resolve_seed(&mut self, flag: Option<u64>, env: Option<&str>) -> Result<()> {
        if let Some(s) = flag {
            self.seed = Some(s);
        } else if self.seed.is_none() {
            let from_env = match env {
                Some(v) => Some(
                    v.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::validation("seed", format!("{SEED_ENV}={v} is not a u64")))?,
                ),
                None => None,
            };
            self.seed = Some(from_env.unwrap_or(0));
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn cap(&self) -> usize {
        self.cap.unwrap_or(DEFAULT_SITE_CAP)
    }

    /// Hex SHA-256 of the canonical JSON with the output directory blanked,
    /// so the same experiment hashes alike wherever it is written.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn dimension(&self) -> Option<usize> {
        self.dim
            .or_else(|| self.region.as_ref().map(|r| r.dim()))
            .or_else(|| self.site.as_ref().map(|s| s.len()))
    }

    pub fn dist(&self) -> Result<&DistributionSpec> {
        self.dist.as_ref().ok_or_else(|| missing("dist"))
    }

    pub fn region(&self) -> Result<&RegionSpec> {
        self.region.as_ref().ok_or_else(|| missing("region"))
    }

    pub fn site(&self) -> Result<Site> {
        let s = self.site.as_ref().ok_or_else(|| missing("site"))?;
        Site::try_new(s).map_err(|e| Error::validation("site", e.to_string()))
    }

    pub fn epsilon(&self) -> Result<f64> {
        self.epsilon.ok_or_else(|| missing("epsilon"))
    }

    pub fn p(&self) -> Result<f64> {
        self.p.ok_or_else(|| missing("p"))
    }

    pub fn mu_reference(&self) -> Result<&MuReferenceConfig> {
        self.mu_reference.as_ref().ok_or_else(|| missing("mu_reference"))
    }

    /// Field-level checks that need no simulation.
    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        let kind = self.experiment;
        if let Some(r) = &self.region {
            r.validate().map_err(|e| Error::validation("region", e.to_string()))?;
        }
        if let Some(d) = &self.dist {
            d.validate().map_err(|e| Error::validation("dist", e.to_string()))?;
        }
        for d in &self.dists {
            d.validate().map_err(|e| Error::validation("dists", e.to_string()))?;
        }
        let dims = [
            ("dim", self.dim),
            ("region", self.region.as_ref().map(|r| r.dim())),
            ("site", self.site.as_ref().map(|s| s.len())),
        ];
        let mut seen: Option<(&str, usize)> = None;
        for (field, d) in dims.into_iter().filter_map(|(f, d)| d.map(|d| (f, d))) {
            match seen {
                Some((first, e)) if e != d => {
                    return Err(Error::validation(
                        field,
                        format!("dimension {d} disagrees with {first} dimension {e}"),
                    ))
                }
                None => seen = Some((field, d)),
                _ => {}
            }
        }
        if let Some(cap) = self.cap {
            if cap == 0 {
                return Err(Error::validation("cap", "site cap must be positive"));
            }
        }
        if let Some(e) = self.epsilon {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::validation("epsilon", "must lie in (0, 1)"));
            }
        }
        if self.sizes.n.iter().any(|&n| n < 1) {
            return Err(Error::validation("sizes.n", "sizes must be positive"));
        }
        if self.sizes.t.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(Error::validation("sizes.t", "times must be positive and finite"));
        }
        if let Some((a, b)) = self.window {
            if !(0.0 <= a && a <= b && b.is_finite()) {
                return Err(Error::validation("window", "need 0 ≤ start ≤ end < ∞"));
            }
        }
        if let Some(m) = &self.mu_reference {
            if m.n < 1 || m.replicas < 2 {
                return Err(Error::validation("mu_reference", "need n ≥ 1 and at least two replicas"));
            }
        }
        let needs_replicas = !matches!(kind, VerifyGeometry);
        if needs_replicas && self.sizes.replicas == 0 {
            return Err(Error::validation("sizes.replicas", "at least one replica is required"));
        }
        match kind {
            Mu | CylinderMu => {
                self.dist()?;
                self.site()?;
                nonempty("sizes.n", self.sizes.n.len())?;
                if self.sizes.replicas < 2 {
                    return Err(Error::validation("sizes.replicas", "at least two replicas are needed"));
                }
                if kind == CylinderMu {
                    nonempty("radii", self.radii.len())?;
                }
            }
            MuContinuity => {
                nonempty("dists", self.dists.len())?;
                self.site()?;
                nonempty("sizes.n", self.sizes.n.len())?;
            }
            Deviation | Lp => {
                self.dist()?;
                self.site()?;
                self.mu_reference()?;
                if kind == Deviation {
                    self.epsilon()?;
                } else {
                    self.p()?;
                }
            }
            TailSum => {
                self.dist()?;
                if !self.region()?.is_cone() {
                    return Err(Error::validation("region", "tail sums need a cone region"));
                }
                self.epsilon()?;
                self.p()?;
                self.sizes.radius.ok_or_else(|| missing("sizes.radius"))?;
                self.mu_reference()?;
            }
            Shape => {
                self.dist()?;
                self.region()?;
                self.epsilon()?;
                nonempty("sizes.t", self.sizes.t.len())?;
                self.mu_reference()?;
            }
            LogWedge => {
                self.dist()?;
                if !matches!(self.region()?, RegionSpec::LogWedge { .. }) {
                    return Err(Error::validation("region", "log-wedge runs need a log-wedge region"));
                }
                nonempty("sizes.n", self.sizes.n.len())?;
            }
            Dynamical => {
                self.dist()?;
                self.region()?;
                self.site()?;
                self.window.ok_or_else(|| missing("window"))?;
                if self.epsilon.is_some() {
                    self.mu_reference()?;
                }
            }
            VerifyGeometry => {
                let d = self.dimension().ok_or_else(|| missing("dim"))?;
                if !(d == 2 || d == 3) {
                    return Err(Error::validation("dim", "geometry checks run in d = 2 or 3"));
                }
            }
        }
        Ok(())
    }
}

fn missing(field: &str) -> Error {
    Error::validation(field, "required for this experiment")
}

fn nonempty(field: &str, len: usize) -> Result<()> {
    if len == 0 {
        Err(Error::validation(field, "must not be empty"))
    } else {
        Ok(())
    }
}

/// One raw number, traceable to its replica.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawValue {
    pub label: String,
    pub replica: usize,
    pub seed: u64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub artifact: String,
    pub version: String,
    pub config_hash: String,
}

impl Provenance {
    pub fn for_config(config: &ExperimentConfig) -> Self {
        Provenance {
            artifact: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: config.hash(),
        }
    }
}

/// Wall-clock data, kept apart from everything the config determines.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum PlotData {
    Shape {
        /// Cells of the empirical ball, scaled by 1/t.
        cells: Vec<[f64; 2]>,
        cell_size: f64,
        inner: Vec<[f64; 2]>,
        outer: Vec<[f64; 2]>,
        /// Cone axis and aperture when the region is a cone.
        cone: Option<([f64; 2], f64)>,
    },
    Trajectory {
        window: (f64, f64),
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        bar: Option<f64>,
        hat: f64,
    },
    Trend {
        x_label: String,
        y_label: String,
        xs: Vec<f64>,
        ys: Vec<f64>,
        log_log: bool,
        slope: Option<f64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub metrics: serde_json::Value,
    pub raw: Vec<RawValue>,
    /// Rows of data.csv.
    pub table: Table,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plot: Option<PlotData>,
    /// Verify modes: did every check pass.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub passed: Option<bool>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl ResultRecord {
    /// The record as JSON without the wall-clock metadata.
    pub fn deterministic_json(&self) -> String {
        let mut r = self.clone();
        r.metadata = Metadata::default();
        serde_json::to_string_pretty(&r).expect("record serializes")
    }
}
