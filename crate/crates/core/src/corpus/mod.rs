//! App records, dataset files, cleaning, labeling, synthetic generation and
//! augmentation.

mod augment;
mod clean;
mod generator;
mod io;
mod labeling;
mod record;

pub use augment::{augment_synonyms, SynonymMap, SynonymMapError};
pub use clean::clean_dataset;
pub use generator::{generate_synthetic, official_agencies, GeneratorConfig, GeneratorError, WeightedTerm};
pub use io::{load_dataset, parse_dataset, write_dataset, DatasetError};
pub use labeling::{
    apply_labeling_criteria, normalize_name, LabelDecision, Rationale, RegistryError, RegistrySnapshot,
};
pub use record::{is_permission_id, AppRecord, Label};

/// High-risk permissions watched by default, in slot order.
pub const DEFAULT_WATCHLIST: [&str; 5] = [
    "READ_PHONE_STATE",
    "ACCESS_FINE_LOCATION",
    "READ_CONTACTS",
    "READ_SMS",
    "RECORD_AUDIO",
];
