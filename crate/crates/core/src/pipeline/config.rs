use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::augment::DEFAULT_MAX_TOKENS;
use crate::postprocess::RepairPolicy;
use crate::tagger::{Strategy, TrainConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable that, when set, replaces every seed in a config.
pub const SEED_ENV: &str = "PUNCT_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPaths {
    pub es_indomain: PathBuf,
    pub ldc: PathBuf,
    #[serde(default)]
    pub opensubtitle_pool: Option<PathBuf>,
    #[serde(default)]
    pub en_indomain: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitConfig {
    fn default() -> Self {
        let (train, validation, test) = crate::evaluate::DEFAULT_FRACTIONS;
        SplitConfig { train, validation, test }
    }
}

impl SplitConfig {
    pub fn fractions(&self) -> (f64, f64, f64) {
        (self.train, self.validation, self.test)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionConfig {
    /// How many pool utterances to keep; `None` skips the pool entirely.
    pub k: Option<usize>,
    #[serde(default = "default_order")]
    pub order: usize,
}

fn default_order() -> usize {
    4
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { k: None, order: default_order() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationConfig {
    pub seed: u64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: usize,
}

fn default_max_tokens() -> usize {
    DEFAULT_MAX_TOKENS
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        AugmentationConfig { seed: 0, max_tokens: DEFAULT_MAX_TOKENS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    /// Pairing repair applied to predictions before scoring; `null` scores raw output.
    pub repair: Option<RepairPolicy>,
    /// Seed of the in-domain train/validation/test split.
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { repair: Some(RepairPolicy::default()), seed: 0 }
    }
}

/// Out-of-domain training sets compared against each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DataRow {
    Ldc,
    LdcSelected,
    Augmented,
}

impl DataRow {
    pub const ALL: [DataRow; 3] = [DataRow::Ldc, DataRow::LdcSelected, DataRow::Augmented];

    pub fn id(self) -> &'static str {
        match self {
            DataRow::Ldc => "ldc",
            DataRow::LdcSelected => "ldc_selected",
            DataRow::Augmented => "augmented",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            DataRow::Ldc => "LDC",
            DataRow::LdcSelected => "LDC + Selected OpenSubtitle",
            DataRow::Augmented => "Augmented (LDC + Selected OpenSubtitle)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub data: DataPaths,
    /// Lowercase every token after labeling, as ASR output carries no case.
    #[serde(default = "yes")]
    pub lowercase: bool,
    #[serde(default)]
    pub split: SplitConfig,
    #[serde(default)]
    pub selection: SelectionConfig,
    #[serde(default)]
    pub augmentation: AugmentationConfig,
    #[serde(default = "all_data_rows")]
    pub data_rows: Vec<DataRow>,
    #[serde(default = "all_strategies")]
    pub strategies: Vec<Strategy>,
    /// Size the in-domain train split is oversampled to; defaults to the size of
    /// the augmented out-of-domain set.
    #[serde(default)]
    pub oversample_to: Option<usize>,
    #[serde(default)]
    pub tagger: TrainConfig,
    #[serde(default)]
    pub eval: EvalConfig,
    pub output_dir: PathBuf,
}

fn yes() -> bool {
    true
}

fn all_data_rows() -> Vec<DataRow> {
    DataRow::ALL.to_vec()
}

fn all_strategies() -> Vec<Strategy> {
    Strategy::ALL.to_vec()
}

impl ExperimentConfig {
    pub fn new(data: DataPaths, output_dir: impl Into<PathBuf>) -> ExperimentConfig {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            data,
            lowercase: true,
            split: SplitConfig::default(),
            selection: SelectionConfig::default(),
            augmentation: AugmentationConfig::default(),
            data_rows: all_data_rows(),
            strategies: all_strategies(),
            oversample_to: None,
            tagger: TrainConfig::default(),
            eval: EvalConfig::default(),
            output_dir: output_dir.into(),
        }
    }

    /// Parses a config document. Relative paths are taken relative to `base`.
    pub fn from_json(text: &str, base: &Path) -> Result<ExperimentConfig, PipelineError> {
        let mut c: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        rebase(&mut c.data.es_indomain);
        rebase(&mut c.data.ldc);
        c.data.opensubtitle_pool.as_mut().map(rebase);
        c.data.en_indomain.as_mut().map(rebase);
        rebase(&mut c.output_dir);
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<ExperimentConfig, PipelineError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Uses `seed` for the split, augmentation, oversampling and training.
    pub fn with_seed(mut self, seed: u64) -> ExperimentConfig {
        self.augmentation.seed = seed;
        self.tagger.seed = seed;
        self.eval.seed = seed;
        self
    }

    /// Applies the seed from [`SEED_ENV`] if it is set.
    pub fn with_env_seed(self) -> Result<ExperimentConfig, PipelineError> {
        match seed_from_env()? {
            Some(seed) => Ok(self.with_seed(seed)),
            None => Ok(self),
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unsupported schema_version {}", self.schema_version));
        }
        let (a, b, c) = self.split.fractions();
        if [a, b, c].iter().any(|f| !(0.0..=1.0).contains(f)) || (a + b + c - 1.0).abs() > 1e-9 {
            return bad("split fractions must lie in [0, 1] and sum to 1".into());
        }
        if self.selection.order == 0 {
            return bad("selection.order must be at least 1".into());
        }
        if self.selection.k.is_some() && self.data.opensubtitle_pool.is_none() {
            return bad("selection.k is set but data.opensubtitle_pool is missing".into());
        }
        if self.augmentation.max_tokens == 0 {
            return bad("augmentation.max_tokens must be positive".into());
        }
        if self.tagger.epochs == 0 {
            return bad("tagger.epochs must be at least 1".into());
        }
        if self.data_rows.is_empty() && self.strategies.is_empty() {
            return bad("nothing to run: data_rows and strategies are both empty".into());
        }
        if self.strategies.iter().any(|s| *s != Strategy::EsOnly) && self.data.en_indomain.is_none() {
            return bad("cross-lingual strategies need data.en_indomain".into());
        }
        Ok(())
    }

    /// Checks that every referenced input file exists.
    pub fn check_paths(&self) -> Result<(), PipelineError> {
        let d = &self.data;
        let paths = [Some(&d.es_indomain), Some(&d.ldc), d.opensubtitle_pool.as_ref(), d.en_indomain.as_ref()];
        for p in paths.into_iter().flatten() {
            if !p.is_file() {
                return Err(PipelineError::Config(format!("input file {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}

/// Reads [`SEED_ENV`]. Unset or empty means no override.
pub fn seed_from_env() -> Result<Option<u64>, PipelineError> {
    match std::env::var(SEED_ENV) {
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| PipelineError::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}
