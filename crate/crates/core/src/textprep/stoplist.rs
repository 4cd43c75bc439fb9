use std::collections::HashSet;
use std::fs;
use std::path::Path;

use thiserror::Error;

const BUNDLED_STOPWORDS: &str = include_str!("../../data/stopwords-id.txt");

#[derive(Debug, Error)]
pub enum StoplistError {
    #[error("failed to read word list {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("stoplist is missing required word {0:?}")]
    MissingRequired(&'static str),
    #[error("word list is empty")]
    Empty,
}

/// Lowercase stopwords. Always contains "dan", "yang" and "adalah".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

pub(crate) fn read_word_list(path: &Path) -> Result<String, StoplistError> {
    fs::read_to_string(path).map_err(|source| StoplistError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// One word per line; blank lines and `#` comments are ignored.
pub(crate) fn parse_word_list(text: &str) -> impl Iterator<Item = String> + '_ {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
}

impl Stoplist {
    pub const REQUIRED: [&'static str; 3] = ["dan", "yang", "adalah"];

    pub fn from_words(words: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Self, StoplistError> {
        let words: HashSet<String> = words.into_iter().map(|w| w.as_ref().to_lowercase()).collect();
        if let Some(missing) = Self::REQUIRED.iter().find(|w| !words.contains(**w)) {
            return Err(StoplistError::MissingRequired(missing));
        }
        Ok(Stoplist { words })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self, StoplistError> {
        let text = read_word_list(path.as_ref())?;
        Self::from_words(parse_word_list(&text))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Default for Stoplist {
    fn default() -> Self {
        Stoplist::from_words(parse_word_list(BUNDLED_STOPWORDS)).expect("bundled stoplist is valid")
    }
}
