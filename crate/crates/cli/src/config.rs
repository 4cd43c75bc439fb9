//! Run configuration: one JSON document, overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use umrahguard_core::corpus::{GeneratorConfig, SynonymMap, DEFAULT_WATCHLIST};
use umrahguard_core::features::FeatureConfig;
use umrahguard_core::textprep::TextPipeline;
use umrahguard_core::tuning::{Augmentation, Metric};
use umrahguard_core::{ModelSpec, ParamGrid};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentationConfig {
    pub enabled: bool,
    pub rate: f64,
    pub copies: usize,
    pub official_only: bool,
    /// Synonym map file; the bundled map when absent.
    pub synonyms: Option<PathBuf>,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        AugmentationConfig {
            enabled: false,
            rate: 0.2,
            copies: 1,
            official_only: true,
            synonyms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub folds: usize,
    pub out: PathBuf,
    pub dataset: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub roots: Option<PathBuf>,
    pub generator: GeneratorConfig,
    pub features: FeatureConfig,
    pub watchlist: Vec<String>,
    /// Model for `train`, `grid-search` and `ablate`.
    pub model: Option<ModelSpec>,
    /// Models compared by `evaluate`.
    pub models: Option<Vec<ModelSpec>>,
    pub grid: Option<ParamGrid>,
    /// Feature configurations for `ablate`.
    pub ablation: Option<Vec<FeatureConfig>>,
    pub augmentation: AugmentationConfig,
    pub metric: Metric,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            folds: 10,
            out: PathBuf::from("out"),
            dataset: None,
            registry: None,
            stopwords: None,
            roots: None,
            generator: GeneratorConfig::default(),
            features: FeatureConfig::HYBRID,
            watchlist: DEFAULT_WATCHLIST.iter().map(|s| s.to_string()).collect(),
            model: None,
            models: None,
            grid: None,
            ablation: None,
            augmentation: AugmentationConfig::default(),
            metric: Metric::Accuracy,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        let de = &mut serde_json::Deserializer::from_str(&text);
        serde_path_to_error::deserialize(de).with_context(|| format!("invalid config {}", path.display()))
    }

    /// Checks that every referenced input exists.
    pub fn validate_paths(&self) -> Result<()> {
        let inputs = [
            ("dataset", &self.dataset),
            ("registry", &self.registry),
            ("stopwords", &self.stopwords),
            ("roots", &self.roots),
            ("augmentation.synonyms", &self.augmentation.synonyms),
        ];
        for (name, path) in inputs {
            if let Some(p) = path {
                if !p.exists() {
                    bail!("{name} file {} does not exist", p.display());
                }
            }
        }
        if self.folds < 2 {
            bail!("folds must be at least 2, got {}", self.folds);
        }
        Ok(())
    }

    pub fn text_pipeline(&self) -> Result<TextPipeline> {
        TextPipeline::from_paths(self.stopwords.as_deref(), self.roots.as_deref()).context("cannot load word lists")
    }

    pub fn augmentation(&self, seed: u64) -> Result<Option<Augmentation>> {
        let a = &self.augmentation;
        if !a.enabled {
            return Ok(None);
        }
        let synonyms = match &a.synonyms {
            Some(p) => SynonymMap::load(p).with_context(|| format!("cannot load synonyms {}", p.display()))?,
            None => SynonymMap::bundled(),
        };
        Ok(Some(Augmentation {
            synonyms,
            rate: a.rate,
            copies: a.copies,
            official_only: a.official_only,
            seed,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_partial_documents() {
        let c: RunConfig = serde_json::from_str(r#"{"seed": 7, "model": {"type": "nb", "alpha": 1.0}}"#).unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.folds, 10);
        assert_eq!(c.model, Some(ModelSpec::nb(1.0)));
        assert!(!c.augmentation.enabled);
        assert_eq!(c.watchlist.len(), 5);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"sed": 7}"#).is_err());
    }

    #[test]
    fn missing_inputs_reported() {
        let c = RunConfig {
            dataset: Some(PathBuf::from("/nonexistent/data.jsonl")),
            ..RunConfig::default()
        };
        assert!(c.validate_paths().unwrap_err().to_string().contains("dataset"));
    }
}
