use std::collections::HashSet;

use super::record::AppRecord;

/// Drops duplicate listings and records without a description.
///
/// Two records are duplicates when their lowercased name and developer name
/// match; the first occurrence is kept. Order is preserved.
pub fn clean_dataset(records: Vec<AppRecord>) -> Vec<AppRecord> {
    let mut seen = HashSet::new();
    records
        .into_iter()
        .filter(|r| !r.description.trim().is_empty())
        .filter(|r| seen.insert((r.name.to_lowercase(), r.developer_name.clone())))
        .collect()
}
