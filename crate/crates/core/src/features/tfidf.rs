//! Term weighting: `tf(t, d) = f(t, d) / |d|`, `idf(t) = ln(N / df(t))`,
//! weight = `tf * idf`. No smoothing; every vocabulary term has `df >= 1`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TfIdfError {
    #[error("cannot fit TF-IDF on a corpus with no tokens")]
    EmptyCorpus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TfIdfFile {
    vocabulary: Vec<String>,
    document_frequency: Vec<usize>,
    n_documents: usize,
    idf: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "TfIdfFile", into = "TfIdfFile")]
pub struct TfIdfModel {
    /// Terms in column order (lexicographic).
    terms: Vec<String>,
    index: HashMap<String, usize>,
    document_frequency: Vec<usize>,
    n_documents: usize,
    idf: Vec<f64>,
}

impl From<TfIdfFile> for TfIdfModel {
    fn from(f: TfIdfFile) -> Self {
        let index = f.vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        TfIdfModel {
            terms: f.vocabulary,
            index,
            document_frequency: f.document_frequency,
            n_documents: f.n_documents,
            idf: f.idf,
        }
    }
}

impl From<TfIdfModel> for TfIdfFile {
    fn from(m: TfIdfModel) -> Self {
        TfIdfFile {
            vocabulary: m.terms,
            document_frequency: m.document_frequency,
            n_documents: m.n_documents,
            idf: m.idf,
        }
    }
}

impl TfIdfModel {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.column(term).map(|c| self.idf[c])
    }

    pub fn idf_values(&self) -> &[f64] {
        &self.idf
    }

    pub fn document_frequency(&self, term: &str) -> Option<usize> {
        self.column(term).map(|c| self.document_frequency[c])
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }
}

pub fn fit_tfidf<S: AsRef<str>>(docs: &[Vec<S>]) -> Result<TfIdfModel, TfIdfError> {
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let distinct: BTreeSet<&str> = doc.iter().map(AsRef::as_ref).collect();
        for term in distinct {
            *df.entry(term).or_default() += 1;
        }
    }
    if df.is_empty() {
        return Err(TfIdfError::EmptyCorpus);
    }
    let n = docs.len();
    let terms: Vec<String> = df.keys().map(|t| t.to_string()).collect();
    let document_frequency: Vec<usize> = df.values().copied().collect();
    let idf = document_frequency.iter().map(|&d| (n as f64 / d as f64).ln()).collect();
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(TfIdfModel {
        terms,
        index,
        document_frequency,
        n_documents: n,
        idf,
    })
}

/// Sparse `(column, weight)` pairs sorted by column. Out-of-vocabulary tokens
/// count toward the document length but emit nothing. Terms whose weight is
/// exactly zero (idf = 0) are omitted.
pub fn transform_tfidf<S: AsRef<str>>(model: &TfIdfModel, tokens: &[S]) -> Vec<(u32, f64)> {
    if tokens.is_empty() {
        return Vec::new();
    }
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(c) = model.column(t.as_ref()) {
            *counts.entry(c).or_default() += 1;
        }
    }
    let total = tokens.len() as f64;
    counts
        .into_iter()
        .map(|(c, f)| (c as u32, (f as f64 / total) * model.idf[c]))
        .filter(|&(_, w)| w != 0.0)
        .collect()
}
