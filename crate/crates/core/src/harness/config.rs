//! JSON experiment configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codec::{ImageBuffer, Subsampling};
use crate::error::{Error, Result};
use crate::objectives::{PsnrMode, Weights};
use crate::pareto::{ParetoAlgorithm, ParetoConfig};
use crate::scalar::{Algorithm, RunBudget, ScalarConfig};

use super::pnm::{image_name, read_pnm};
use super::synth::{generate, Pattern};

/// Any algorithm an experiment can schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AlgorithmId {
    Baseline,
    Scalar(Algorithm),
    Pareto(ParetoAlgorithm),
}

impl AlgorithmId {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmId::Baseline => "baseline",
            AlgorithmId::Scalar(a) => a.name(),
            AlgorithmId::Pareto(a) => a.name(),
        }
    }
}

impl std::fmt::Display for AlgorithmId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AlgorithmId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("baseline") {
            return Ok(AlgorithmId::Baseline);
        }
        if let Ok(a) = s.parse::<Algorithm>() {
            return Ok(AlgorithmId::Scalar(a));
        }
        s.parse::<ParetoAlgorithm>().map(AlgorithmId::Pareto)
    }
}

impl TryFrom<String> for AlgorithmId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AlgorithmId> for String {
    fn from(a: AlgorithmId) -> String {
        a.name().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthSpec {
    pub pattern: Pattern,
    pub width: usize,
    pub height: usize,
    #[serde(default = "three")]
    pub channels: usize,
    #[serde(default)]
    pub seed: u64,
}

fn three() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ImageSource {
    File {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    Synthetic {
        synthetic: SynthSpec,
        name: String,
    },
}

/// A decoded benchmark image.
#[derive(Debug, Clone)]
pub struct LoadedImage {
    pub name: String,
    pub image: ImageBuffer,
    /// Byte size of the source file, when there is one.
    pub file_bytes: Option<u64>,
}

impl ImageSource {
    pub fn name(&self) -> String {
        match self {
            ImageSource::File { path, name } => name.clone().unwrap_or_else(|| image_name(path)),
            ImageSource::Synthetic { name, .. } => name.clone(),
        }
    }

    pub fn load(&self) -> Result<LoadedImage> {
        match self {
            ImageSource::File { path, .. } => {
                let image = read_pnm(path)?;
                let file_bytes = std::fs::metadata(path).ok().map(|m| m.len());
                Ok(LoadedImage {
                    name: self.name(),
                    image,
                    file_bytes,
                })
            }
            ImageSource::Synthetic { synthetic: s, name } => Ok(LoadedImage {
                name: name.clone(),
                image: generate(s.pattern, s.width, s.height, s.channels, s.seed)?,
                file_bytes: None,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FsBasis {
    /// width × height × channels
    #[default]
    Raw,
    /// The image file's size on disk.
    SourceFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budget {
    #[serde(default = "default_pop")]
    pub pop_size: usize,
    #[serde(default = "default_nfe")]
    pub nfe_max: usize,
}

fn default_pop() -> usize {
    50
}

fn default_nfe() -> usize {
    1000
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            pop_size: default_pop(),
            nfe_max: default_nfe(),
        }
    }
}

impl Budget {
    pub fn with_seed(&self, seed: u64) -> RunBudget {
        RunBudget {
            pop_size: self.pop_size,
            nfe_max: self.nfe_max,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub images: Vec<ImageSource>,
    pub algorithms: Vec<AlgorithmId>,
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default)]
    pub budget: Budget,
    /// Run `i` uses seed `master_seed + i`.
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub weights: Weights,
    #[serde(default)]
    pub subsampling: Subsampling,
    #[serde(default)]
    pub psnr_mode: PsnrMode,
    #[serde(default)]
    pub fs_basis: FsBasis,
    #[serde(default)]
    pub scalar: ScalarConfig,
    #[serde(default)]
    pub pareto: ParetoConfig,
    #[serde(default = "default_out")]
    pub output_dir: PathBuf,
    /// Worker threads; all cores when absent.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Adds wall-clock times to run files, which makes them differ between
    /// repeats.
    #[serde(default)]
    pub record_wall_time: bool,
}

fn default_runs() -> usize {
    30
}

fn default_out() -> PathBuf {
    PathBuf::from("results")
}

impl ExperimentConfig {
    /// A config with defaults for everything but the images and algorithms.
    pub fn new(images: Vec<ImageSource>, algorithms: Vec<AlgorithmId>) -> Self {
        Self {
            images,
            algorithms,
            runs: default_runs(),
            budget: Budget::default(),
            master_seed: 0,
            weights: Weights::default(),
            subsampling: Subsampling::default(),
            psnr_mode: PsnrMode::default(),
            fs_basis: FsBasis::default(),
            scalar: ScalarConfig::default(),
            pareto: ParetoConfig::default(),
            output_dir: default_out(),
            workers: None,
            record_wall_time: false,
        }
    }

    /// Parses JSON and resolves relative image paths against `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("config: {e}")))?;
        for img in &mut cfg.images {
            if let ImageSource::File { path, .. } = img {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Checks every field that can be checked without running anything.
    pub fn validate(&self) -> Result<()> {
        if self.images.is_empty() {
            return Err(Error::Config("no images configured".into()));
        }
        if self.algorithms.is_empty() {
            return Err(Error::Config("no algorithms configured".into()));
        }
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        let mut names = HashSet::new();
        for img in &self.images {
            if !names.insert(img.name()) {
                return Err(Error::Config(format!("duplicate image name {:?}", img.name())));
            }
        }
        let mut seen = HashSet::new();
        for &a in &self.algorithms {
            if !seen.insert(a) {
                return Err(Error::Config(format!("algorithm {a} listed twice")));
            }
            let b = self.budget.with_seed(self.master_seed);
            match a {
                AlgorithmId::Baseline => {}
                AlgorithmId::Scalar(s) => b.validate(s)?,
                AlgorithmId::Pareto(_) => {
                    if b.pop_size < 2 || b.nfe_max < b.pop_size {
                        return Err(Error::Config(
                            "Pareto search needs pop_size >= 2 and nfe_max >= pop_size".into(),
                        ));
                    }
                }
            }
        }
        self.scalar.validate()?;
        self.pareto.ga.validate()?;
        Ok(())
    }
}
