use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::metadata::{MetadataStats, METADATA_FEATURES};
use super::permissions::encode_permissions;
use super::tfidf::{fit_tfidf, transform_tfidf, TfIdfError, TfIdfModel};
use super::vector::SparseVec;
use crate::corpus::AppRecord;
use crate::textprep::TextPipeline;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("feature config enables no blocks")]
    NoBlocks,
    #[error("feature pipeline needs at least one training record")]
    NoRecords,
    #[error("permission watchlist is empty")]
    EmptyWatchlist,
    #[error(transparent)]
    TfIdf(#[from] TfIdfError),
}

/// Which blocks go into the feature vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub use_text: bool,
    pub use_permissions: bool,
    pub use_metadata: bool,
}

impl FeatureConfig {
    pub const HYBRID: FeatureConfig = FeatureConfig {
        use_text: true,
        use_permissions: true,
        use_metadata: true,
    };
    pub const TEXT_ONLY: FeatureConfig = FeatureConfig {
        use_text: true,
        use_permissions: false,
        use_metadata: false,
    };
    pub const PERMISSIONS_ONLY: FeatureConfig = FeatureConfig {
        use_text: false,
        use_permissions: true,
        use_metadata: false,
    };
    /// Text plus permissions, without the numeric metadata block.
    pub const TEXT_AND_PERMISSIONS: FeatureConfig = FeatureConfig {
        use_text: true,
        use_permissions: true,
        use_metadata: false,
    };

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.use_text || self.use_permissions || self.use_metadata {
            Ok(())
        } else {
            Err(FeatureError::NoBlocks)
        }
    }

    /// Row label used in ablation reports.
    pub fn label(&self) -> String {
        match (self.use_text, self.use_permissions, self.use_metadata) {
            (false, true, false) => "Metadata Only (Permissions)".into(),
            (true, false, false) => "Text Only (TF-IDF)".into(),
            (true, true, true) => "Hybrid".into(),
            (t, p, m) => {
                let parts: Vec<&str> = [(t, "Text"), (p, "Permissions"), (m, "Metadata")]
                    .iter()
                    .filter(|(on, _)| *on)
                    .map(|(_, n)| *n)
                    .collect();
                parts.join(" + ")
            }
        }
    }
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig::HYBRID
    }
}

/// A record with its preprocessed description tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedRecord {
    pub record: AppRecord,
    pub tokens: Vec<String>,
}

impl PreparedRecord {
    pub fn new(record: AppRecord, text: &TextPipeline) -> Self {
        let tokens = text.preprocess(&record.description);
        PreparedRecord { record, tokens }
    }

    pub fn prepare_all(records: Vec<AppRecord>, text: &TextPipeline) -> Vec<PreparedRecord> {
        records.into_iter().map(|r| PreparedRecord::new(r, text)).collect()
    }
}

/// Column ranges of each block inside the concatenated vector. Disabled
/// blocks have zero width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockMap {
    pub text: Range<usize>,
    pub permissions: Range<usize>,
    pub metadata: Range<usize>,
}

impl BlockMap {
    pub fn width(&self) -> usize {
        self.metadata.end
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// Sparse `(column, weight)` pairs local to the text block.
    pub text_block: Vec<(u32, f64)>,
    pub perm_block: Vec<f64>,
    pub meta_block: Vec<f64>,
    pub block_map: BlockMap,
}

impl FeatureVector {
    pub fn width(&self) -> usize {
        self.block_map.width()
    }

    /// Flattens the blocks into one sparse vector over the full width.
    pub fn to_sparse(&self) -> SparseVec {
        let perm_offset = self.block_map.permissions.start as u32;
        let meta_offset = self.block_map.metadata.start as u32;
        let pairs = self
            .text_block
            .iter()
            .copied()
            .chain(
                self.perm_block
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (perm_offset + i as u32, v)),
            )
            .chain(
                self.meta_block
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (meta_offset + i as u32, v)),
            );
        SparseVec::from_pairs(self.width(), pairs)
    }
}

/// Fitted feature extraction state. Everything here is computed from the
/// training split only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeaturePipeline {
    #[serde(flatten)]
    pub tfidf: TfIdfModel,
    pub watchlist: Vec<String>,
    pub meta_stats: MetadataStats,
    pub feature_config: FeatureConfig,
}

impl FeaturePipeline {
    pub fn fit(training: &[PreparedRecord], watchlist: &[String], config: FeatureConfig) -> Result<Self, FeatureError> {
        config.validate()?;
        if training.is_empty() {
            return Err(FeatureError::NoRecords);
        }
        if config.use_permissions && watchlist.is_empty() {
            return Err(FeatureError::EmptyWatchlist);
        }
        let tfidf = if config.use_text {
            let docs: Vec<&Vec<String>> = training.iter().map(|p| &p.tokens).collect();
            let docs: Vec<Vec<&str>> = docs.iter().map(|d| d.iter().map(String::as_str).collect()).collect();
            fit_tfidf(&docs)?
        } else {
            TfIdfModel::default()
        };
        Ok(FeaturePipeline {
            tfidf,
            watchlist: watchlist.to_vec(),
            meta_stats: MetadataStats::fit(training.iter().map(|p| &p.record)),
            feature_config: config,
        })
    }

    pub fn block_map(&self) -> BlockMap {
        let c = self.feature_config;
        let text = if c.use_text { self.tfidf.len() } else { 0 };
        let perms = if c.use_permissions { self.watchlist.len() } else { 0 };
        let meta = if c.use_metadata { METADATA_FEATURES.len() } else { 0 };
        BlockMap {
            text: 0..text,
            permissions: text..text + perms,
            metadata: text + perms..text + perms + meta,
        }
    }

    pub fn width(&self) -> usize {
        self.block_map().width()
    }

    pub fn assemble(&self, prepared: &PreparedRecord) -> FeatureVector {
        let c = self.feature_config;
        FeatureVector {
            text_block: if c.use_text {
                transform_tfidf(&self.tfidf, &prepared.tokens)
            } else {
                Vec::new()
            },
            perm_block: if c.use_permissions {
                encode_permissions(&prepared.record.permissions, &self.watchlist)
            } else {
                Vec::new()
            },
            meta_block: if c.use_metadata {
                self.meta_stats.scale(&prepared.record)
            } else {
                Vec::new()
            },
            block_map: self.block_map(),
        }
    }

    pub fn transform(&self, prepared: &PreparedRecord) -> SparseVec {
        self.assemble(prepared).to_sparse()
    }

    /// Human-readable name of every column.
    pub fn feature_names(&self) -> Vec<String> {
        let c = self.feature_config;
        let mut names = Vec::with_capacity(self.width());
        if c.use_text {
            names.extend(self.tfidf.terms().iter().cloned());
        }
        if c.use_permissions {
            names.extend(self.watchlist.iter().cloned());
        }
        if c.use_metadata {
            names.extend(METADATA_FEATURES.iter().map(|s| s.to_string()));
        }
        names
    }
}

/// Fits a pipeline with `config` on `training` and transforms every record.
pub fn fit_transform(
    training: &[PreparedRecord],
    watchlist: &[String],
    config: FeatureConfig,
) -> Result<(FeaturePipeline, Vec<SparseVec>), FeatureError> {
    let pipeline = FeaturePipeline::fit(training, watchlist, config)?;
    let rows = training.iter().map(|p| pipeline.transform(p)).collect();
    Ok((pipeline, rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{generate_synthetic, GeneratorConfig, RegistrySnapshot};

    fn prepared() -> Vec<PreparedRecord> {
        let records = generate_synthetic(&GeneratorConfig {
            n_official: 10,
            n_unofficial: 10,
            ..Default::default()
        })
        .unwrap();
        PreparedRecord::prepare_all(records, &TextPipeline::default())
    }

    fn watchlist() -> Vec<String> {
        RegistrySnapshot::default_watchlist()
    }

    #[test]
    fn widths_follow_config() {
        let data = prepared();
        let text = FeaturePipeline::fit(&data, &watchlist(), FeatureConfig::TEXT_ONLY).unwrap();
        let v = text.assemble(&data[0]);
        assert!(v.perm_block.is_empty() && v.meta_block.is_empty());
        assert_eq!(v.block_map.permissions.len(), 0);
        assert_eq!(v.block_map.metadata.len(), 0);

        let perms = FeaturePipeline::fit(&data, &watchlist(), FeatureConfig::PERMISSIONS_ONLY).unwrap();
        assert_eq!(perms.width(), watchlist().len());

        let hybrid = FeaturePipeline::fit(&data, &watchlist(), FeatureConfig::HYBRID).unwrap();
        assert_eq!(hybrid.width(), hybrid.tfidf.len() + watchlist().len() + 5);
        assert_eq!(hybrid.feature_names().len(), hybrid.width());
    }

    #[test]
    fn all_blocks_disabled_rejected() {
        let none = FeatureConfig {
            use_text: false,
            use_permissions: false,
            use_metadata: false,
        };
        assert_eq!(
            FeaturePipeline::fit(&prepared(), &watchlist(), none).unwrap_err(),
            FeatureError::NoBlocks
        );
    }

    #[test]
    fn value_domains() {
        let data = prepared();
        let p = FeaturePipeline::fit(&data, &watchlist(), FeatureConfig::HYBRID).unwrap();
        for rec in &data {
            let v = p.assemble(rec);
            assert!(v.text_block.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(v.text_block.iter().all(|&(_, w)| w >= 0.0));
            assert!(v.perm_block.iter().all(|&b| b == 0.0 || b == 1.0));
            assert!(v.meta_block.iter().all(|m| (0.0..=1.0).contains(m)));
            let s = v.to_sparse();
            assert_eq!(s.dim, p.width());
            assert!(s.values.iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn blocks_independent_of_each_other() {
        let data = prepared();
        let wl = watchlist();
        let hybrid = FeaturePipeline::fit(&data, &wl, FeatureConfig::HYBRID).unwrap();
        let text = FeaturePipeline::fit(&data, &wl, FeatureConfig::TEXT_ONLY).unwrap();
        let perms = FeaturePipeline::fit(&data, &wl, FeatureConfig::PERMISSIONS_ONLY).unwrap();
        let meta = FeaturePipeline::fit(
            &data,
            &wl,
            FeatureConfig {
                use_text: false,
                use_permissions: false,
                use_metadata: true,
            },
        )
        .unwrap();
        for rec in &data {
            let full = hybrid.assemble(rec);
            assert_eq!(full.text_block, text.assemble(rec).text_block);
            assert_eq!(full.perm_block, perms.assemble(rec).perm_block);
            assert_eq!(full.meta_block, meta.assemble(rec).meta_block);
        }
    }

    #[test]
    fn deterministic_fit_transform() {
        let data = prepared();
        let (p1, rows1) = fit_transform(&data, &watchlist(), FeatureConfig::HYBRID).unwrap();
        let (p2, rows2) = fit_transform(&data, &watchlist(), FeatureConfig::HYBRID).unwrap();
        assert_eq!(p1, p2);
        assert_eq!(rows1, rows2);
    }

    #[test]
    fn ablation_labels() {
        assert_eq!(FeatureConfig::PERMISSIONS_ONLY.label(), "Metadata Only (Permissions)");
        assert_eq!(FeatureConfig::TEXT_ONLY.label(), "Text Only (TF-IDF)");
        assert_eq!(FeatureConfig::HYBRID.label(), "Hybrid");
        assert_eq!(FeatureConfig::TEXT_AND_PERMISSIONS.label(), "Text + Permissions");
    }
}
