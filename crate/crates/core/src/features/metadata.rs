use serde::{Deserialize, Serialize};

use crate::corpus::AppRecord;

pub const METADATA_FEATURES: [&str; 5] = [
    "download_count",
    "rating",
    "size_mb",
    "days_since_update",
    "permission_count",
];

pub(crate) fn raw_metadata(record: &AppRecord) -> [f64; 5] {
    [
        record.download_count as f64,
        record.rating,
        record.size_mb,
        record.days_since_update as f64,
        record.permissions.len() as f64,
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureRange {
    pub min: f64,
    pub max: f64,
    /// Training mean; stands in for a missing value at inference time.
    pub mean: f64,
}

/// Per-feature training-split ranges, in `METADATA_FEATURES` order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetadataStats {
    pub ranges: [FeatureRange; 5],
}

impl MetadataStats {
    /// Panics on an empty training set.
    pub fn fit<'a>(records: impl IntoIterator<Item = &'a AppRecord>) -> Self {
        let mut ranges = [FeatureRange {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            mean: 0.0,
        }; 5];
        let mut n = 0usize;
        for record in records {
            n += 1;
            for (range, v) in ranges.iter_mut().zip(raw_metadata(record)) {
                range.min = range.min.min(v);
                range.max = range.max.max(v);
                range.mean += v;
            }
        }
        assert!(n > 0, "metadata statistics need at least one record");
        for range in &mut ranges {
            range.mean /= n as f64;
        }
        MetadataStats { ranges }
    }

    /// `(v - min) / (max - min)` clamped to `[0, 1]`; 0.5 for a feature that
    /// was constant in training.
    pub fn scale(&self, record: &AppRecord) -> Vec<f64> {
        self.ranges
            .iter()
            .zip(raw_metadata(record))
            .map(|(r, v)| {
                if r.max == r.min {
                    0.5
                } else {
                    ((v - r.min) / (r.max - r.min)).clamp(0.0, 1.0)
                }
            })
            .collect()
    }
}
