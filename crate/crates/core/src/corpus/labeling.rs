//! Registry snapshot and the rule set that assigns ground-truth labels.
//!
//! Registration with the ministry is necessary for `Official`. The free-email
//! and risky-permission criteria only contribute to the rationale of an
//! `Unofficial` decision. The "physical office on a map" criterion cannot be
//! checked offline and is not part of the executable rules.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{is_permission_id, AppRecord, Label};
use super::DEFAULT_WATCHLIST;

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("failed to read registry: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid registry file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("registry field `{0}` must not be empty")]
    Empty(&'static str),
    #[error("registry watchlist entry {0:?} is not a permission identifier")]
    BadPermission(String),
    #[error("registry watchlist lists {0:?} twice")]
    DuplicatePermission(String),
}

/// Local copy of the licensed-organizer registry plus the labeling lists.
///
/// `registered_names` are stored normalized; `high_risk_permissions` order
/// defines the permission feature slot order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistrySnapshot {
    pub registered_names: BTreeSet<String>,
    pub free_email_domains: BTreeSet<String>,
    pub high_risk_permissions: Vec<String>,
}

impl RegistrySnapshot {
    pub fn new(
        registered_names: impl IntoIterator<Item = impl AsRef<str>>,
        free_email_domains: impl IntoIterator<Item = impl AsRef<str>>,
        high_risk_permissions: impl IntoIterator<Item = impl Into<String>>,
    ) -> Result<Self, RegistryError> {
        let snapshot = RegistrySnapshot {
            registered_names: registered_names
                .into_iter()
                .map(|n| normalize_name(n.as_ref()))
                .filter(|n| !n.is_empty())
                .collect(),
            free_email_domains: free_email_domains
                .into_iter()
                .map(|d| d.as_ref().trim().to_lowercase())
                .collect(),
            high_risk_permissions: high_risk_permissions.into_iter().map(Into::into).collect(),
        };
        snapshot.validate()?;
        Ok(snapshot)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, RegistryError> {
        let raw: RegistrySnapshot = serde_json::from_str(&fs::read_to_string(path)?)?;
        RegistrySnapshot::new(raw.registered_names, raw.free_email_domains, raw.high_risk_permissions)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let mut json = serde_json::to_string_pretty(self)?;
        json.push('\n');
        fs::write(path, json)
    }

    fn validate(&self) -> Result<(), RegistryError> {
        if self.registered_names.is_empty() {
            return Err(RegistryError::Empty("registered_names"));
        }
        if self.free_email_domains.is_empty() {
            return Err(RegistryError::Empty("free_email_domains"));
        }
        if self.high_risk_permissions.is_empty() {
            return Err(RegistryError::Empty("high_risk_permissions"));
        }
        let mut seen = BTreeSet::new();
        for p in &self.high_risk_permissions {
            if !is_permission_id(p) {
                return Err(RegistryError::BadPermission(p.clone()));
            }
            if !seen.insert(p) {
                return Err(RegistryError::DuplicatePermission(p.clone()));
            }
        }
        Ok(())
    }

    pub fn is_registered(&self, developer_name: &str) -> bool {
        self.registered_names.contains(&normalize_name(developer_name))
    }

    /// Free-mail domains used when no registry file is supplied.
    pub fn default_free_email_domains() -> Vec<&'static str> {
        vec![
            "gmail.com",
            "yahoo.com",
            "yahoo.co.id",
            "hotmail.com",
            "outlook.com",
            "ymail.com",
        ]
    }

    pub fn default_watchlist() -> Vec<String> {
        DEFAULT_WATCHLIST.iter().map(|s| s.to_string()).collect()
    }
}

/// Case-folds, strips punctuation and collapses whitespace.
pub fn normalize_name(name: &str) -> String {
    let stripped: String = name
        .to_lowercase()
        .chars()
        .filter(|c| c.is_alphanumeric() || c.is_whitespace())
        .collect();
    stripped.split_whitespace().collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rationale {
    NotRegistered,
    FreeEmail,
    RiskyPermissions,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDecision {
    pub label: Label,
    /// Empty for `Official`.
    pub rationale: Vec<Rationale>,
}

pub fn apply_labeling_criteria(record: &AppRecord, registry: &RegistrySnapshot) -> LabelDecision {
    if registry.is_registered(&record.developer_name) {
        return LabelDecision {
            label: Label::Official,
            rationale: Vec::new(),
        };
    }
    let mut rationale = vec![Rationale::NotRegistered];
    let domain = record.developer_email_domain.trim().to_lowercase();
    if registry.free_email_domains.contains(&domain) {
        rationale.push(Rationale::FreeEmail);
    }
    if registry
        .high_risk_permissions
        .iter()
        .any(|p| record.permissions.contains(p))
    {
        rationale.push(Rationale::RiskyPermissions);
    }
    LabelDecision {
        label: Label::Unofficial,
        rationale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> RegistrySnapshot {
        RegistrySnapshot::new(
            ["PT. Amanah  Mulia Wisata"],
            RegistrySnapshot::default_free_email_domains(),
            RegistrySnapshot::default_watchlist(),
        )
        .unwrap()
    }

    fn record(dev: &str, domain: &str, perms: &[&str]) -> AppRecord {
        AppRecord {
            app_id: "A1".into(),
            name: "Umrah".into(),
            developer_name: dev.into(),
            developer_email_domain: domain.into(),
            description: "resmi".into(),
            permissions: perms.iter().map(|s| s.to_string()).collect(),
            download_count: 1,
            rating: 4.0,
            size_mb: 1.0,
            days_since_update: 1,
            label: None,
        }
    }

    #[test]
    fn normalization() {
        assert_eq!(
            normalize_name("  PT. Amanah   Mulia, Wisata "),
            "pt amanah mulia wisata"
        );
    }

    #[test]
    fn registered_corporate_is_official() {
        let d = apply_labeling_criteria(&record("pt amanah mulia wisata", "amanah.co.id", &[]), &registry());
        assert_eq!(d.label, Label::Official);
        assert!(d.rationale.is_empty());
    }

    #[test]
    fn registration_alone_decides_official() {
        let d = apply_labeling_criteria(
            &record("PT Amanah Mulia Wisata", "gmail.com", &["READ_CONTACTS"]),
            &registry(),
        );
        assert_eq!(d.label, Label::Official);
    }

    #[test]
    fn unregistered_gmail_flags_free_email() {
        let d = apply_labeling_criteria(&record("Promo Umroh", "gmail.com", &[]), &registry());
        assert_eq!(d.label, Label::Unofficial);
        assert!(d.rationale.contains(&Rationale::FreeEmail));
    }

    #[test]
    fn unregistered_corporate_clean_permissions() {
        let d = apply_labeling_criteria(&record("Barokah Tour", "barokah.id", &["INTERNET"]), &registry());
        assert_eq!(d.label, Label::Unofficial);
        assert_eq!(d.rationale, vec![Rationale::NotRegistered]);
    }

    #[test]
    fn risky_permissions_in_rationale() {
        let d = apply_labeling_criteria(&record("X", "Yahoo.com", &["READ_PHONE_STATE"]), &registry());
        assert_eq!(
            d.rationale,
            vec![
                Rationale::NotRegistered,
                Rationale::FreeEmail,
                Rationale::RiskyPermissions
            ]
        );
    }

    #[test]
    fn labeling_is_pure() {
        let r = record("X", "gmail.com", &["READ_SMS"]);
        let reg = registry();
        assert_eq!(apply_labeling_criteria(&r, &reg), apply_labeling_criteria(&r, &reg));
    }

    #[test]
    fn empty_sets_rejected() {
        let empty: [&str; 0] = [];
        assert!(matches!(
            RegistrySnapshot::new(empty, ["gmail.com"], ["READ_SMS"]),
            Err(RegistryError::Empty("registered_names"))
        ));
        assert!(matches!(
            RegistrySnapshot::new(["a"], ["gmail.com"], ["read_sms"]),
            Err(RegistryError::BadPermission(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("registry.json");
        registry().save(&path).unwrap();
        assert_eq!(RegistrySnapshot::load(&path).unwrap(), registry());
    }
}
