//! Feature extraction: TF-IDF text block, binary watchlist-permission block
//! and min-max scaled metadata block, concatenated in that order.

mod metadata;
mod permissions;
mod pipeline;
mod tfidf;
mod vector;

pub use metadata::{FeatureRange, MetadataStats, METADATA_FEATURES};
pub use permissions::encode_permissions;
pub use pipeline::{
    fit_transform, BlockMap, FeatureConfig, FeatureError, FeaturePipeline, FeatureVector, PreparedRecord,
};
pub use tfidf::{fit_tfidf, transform_tfidf, TfIdfError, TfIdfModel};
pub use vector::SparseVec;
