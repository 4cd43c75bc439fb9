//! Synonym-replacement augmentation.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::AppRecord;
use crate::rng;
use crate::textprep::{tokenize, Stoplist};

#[derive(Debug, Error)]
pub enum SynonymMapError {
    #[error("failed to read synonym map: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid synonym map file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("synonym entry {0:?} is not lowercase")]
    NotLowercase(String),
    #[error("synonym entry {0:?} is not a single token")]
    NotSingleToken(String),
    #[error("synonym entry {0:?} has no replacement other than itself")]
    SelfOnly(String),
}

/// Root token to replacement tokens. All tokens lowercase.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SynonymMap {
    entries: BTreeMap<String, Vec<String>>,
}

impl SynonymMap {
    pub fn new(entries: BTreeMap<String, Vec<String>>) -> Result<Self, SynonymMapError> {
        for (root, replacements) in &entries {
            for token in std::iter::once(root).chain(replacements) {
                if token.to_lowercase() != *token {
                    return Err(SynonymMapError::NotLowercase(token.clone()));
                }
                if tokenize(token) != [token.as_str()] {
                    return Err(SynonymMapError::NotSingleToken(token.clone()));
                }
            }
            if replacements.iter().all(|r| r == root) {
                return Err(SynonymMapError::SelfOnly(root.clone()));
            }
        }
        Ok(SynonymMap { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, SynonymMapError> {
        let entries = serde_json::from_str(&fs::read_to_string(path)?)?;
        SynonymMap::new(entries)
    }

    pub fn get(&self, token: &str) -> Option<&[String]> {
        self.entries.get(token).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// A small formal-register thesaurus covering the generator's official
    /// vocabulary.
    pub fn bundled() -> Self {
        let pairs: [(&str, &[&str]); 14] = [
            ("mendaftar", &["registrasi"]),
            ("resmi", &["sah", "legal"]),
            ("terdaftar", &["tercatat"]),
            ("izin", &["lisensi"]),
            ("berizin", &["berlisensi"]),
            ("amanah", &["terpercaya"]),
            ("terpercaya", &["amanah"]),
            ("bimbingan", &["tuntunan"]),
            ("pelayanan", &["layanan"]),
            ("nyaman", &["tenang"]),
            ("jadwal", &["agenda"]),
            ("keberangkatan", &["pemberangkatan"]),
            ("profesional", &["handal"]),
            ("perlindungan", &["pengamanan"]),
        ];
        let entries = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect()))
            .collect();
        SynonymMap::new(entries).expect("bundled synonyms are valid")
    }
}

/// Returns `records` followed by `copies` augmented copies of each record.
///
/// Each eligible token (not a stopword, present in `map`) of the case-folded,
/// tokenized description is replaced with probability `rate` by a synonym
/// drawn from the record's own RNG stream. Copy `k` of record `X` gets the id
/// `X-aug<k>` (1-based). Labels and all other fields are copied unchanged.
pub fn augment_synonyms(
    records: &[AppRecord],
    map: &SynonymMap,
    rate: f64,
    seed: u64,
    stoplist: &Stoplist,
    copies: usize,
) -> Vec<AppRecord> {
    let rate = rate.clamp(0.0, 1.0);
    let mut out = records.to_vec();
    for (i, record) in records.iter().enumerate() {
        let tokens = tokenize(&record.description.to_lowercase());
        for k in 1..=copies {
            let mut rng = rng::stream(seed, rng::DOMAIN_AUGMENT, (i * copies + k - 1) as u64);
            let replaced: Vec<&str> = tokens
                .iter()
                .map(|t| match map.get(t) {
                    Some(synonyms) if !stoplist.contains(t) && rng.gen_bool(rate) => {
                        synonyms.choose(&mut rng).map(String::as_str).unwrap_or(t)
                    }
                    _ => t.as_str(),
                })
                .collect();
            let mut copy = record.clone();
            copy.app_id = format!("{}-aug{k}", record.app_id);
            copy.description = replaced.join(" ");
            out.push(copy);
        }
    }
    out
}
