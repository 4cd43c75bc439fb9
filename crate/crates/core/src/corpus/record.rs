use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Class of an app. `Official` is class 0 and the positive class for
/// precision and recall.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Official = 0,
    Unofficial = 1,
}

impl Label {
    pub const ALL: [Label; 2] = [Label::Official, Label::Unofficial];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Label> {
        match index {
            0 => Some(Label::Official),
            1 => Some(Label::Unofficial),
            _ => None,
        }
    }

    pub fn other(self) -> Label {
        match self {
            Label::Official => Label::Unofficial,
            Label::Unofficial => Label::Official,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Official => "official",
            Label::Unofficial => "unofficial",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Label {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_u8(*self as u8)
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = u8::deserialize(deserializer)?;
        Label::from_index(raw as usize)
            .ok_or_else(|| serde::de::Error::custom(format!("label must be 0 or 1, got {raw}")))
    }
}

/// One application listing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppRecord {
    pub app_id: String,
    pub name: String,
    pub developer_name: String,
    pub developer_email_domain: String,
    pub description: String,
    pub permissions: BTreeSet<String>,
    pub download_count: u64,
    pub rating: f64,
    pub size_mb: f64,
    pub days_since_update: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
}

impl AppRecord {
    /// Checks the per-record invariants. Returns the offending field name and
    /// a message on failure.
    pub fn validate(&self) -> Result<(), (&'static str, String)> {
        if self.app_id.trim().is_empty() {
            return Err(("app_id", "must be non-empty".into()));
        }
        if !(0.0..=5.0).contains(&self.rating) {
            return Err(("rating", format!("{} is outside [0, 5]", self.rating)));
        }
        if self.size_mb <= 0.0 || !self.size_mb.is_finite() {
            return Err(("size_mb", format!("{} is not a positive size", self.size_mb)));
        }
        if let Some(bad) = self.permissions.iter().find(|p| !is_permission_id(p)) {
            return Err(("permissions", format!("{bad:?} is not a permission identifier")));
        }
        Ok(())
    }
}

/// `[A-Z][A-Z0-9_]*`
pub fn is_permission_id(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b'A'..=b'Z'))
        && bytes.all(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || b == b'_')
}
