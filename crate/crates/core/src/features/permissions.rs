use std::collections::BTreeSet;

/// Slot `k` is 1 iff `watchlist[k]` is requested.
pub fn encode_permissions(perms: &BTreeSet<String>, watchlist: &[String]) -> Vec<f64> {
    watchlist
        .iter()
        .map(|p| if perms.contains(p) { 1.0 } else { 0.0 })
        .collect()
}
