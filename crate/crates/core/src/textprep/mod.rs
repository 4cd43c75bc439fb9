//! Indonesian text normalization: case folding, tokenization, stopword
//! removal and affix-stripping stemming, applied in that order.

mod stemmer;
mod stoplist;

use std::path::Path;

pub use stemmer::{stem_token, StemmerRules};
pub use stoplist::{Stoplist, StoplistError};

/// Splits on every non-alphanumeric character, dropping tokens shorter than
/// two characters and purely numeric tokens. Does not case-fold.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .filter(|t| !t.chars().all(|c| c.is_numeric()))
        .map(str::to_owned)
        .collect()
}

/// Case fold, tokenize, drop stopwords, stem.
pub fn preprocess_text(text: &str, stoplist: &Stoplist, rules: &StemmerRules) -> Vec<String> {
    tokenize(&text.to_lowercase())
        .into_iter()
        .filter(|t| !stoplist.contains(t))
        .map(|t| stem_token(&t, rules))
        .collect()
}

/// The stoplist and stemmer rules bundled together.
#[derive(Debug, Clone, Default)]
pub struct TextPipeline {
    pub stoplist: Stoplist,
    pub rules: StemmerRules,
}

impl TextPipeline {
    /// Builds a pipeline from optional word-list files, falling back to the
    /// bundled lists.
    pub fn from_paths(stopwords: Option<&Path>, roots: Option<&Path>) -> Result<Self, StoplistError> {
        let stoplist = match stopwords {
            Some(p) => Stoplist::from_path(p)?,
            None => Stoplist::default(),
        };
        let rules = match roots {
            Some(p) => StemmerRules::from_dictionary_path(p)?,
            None => StemmerRules::default(),
        };
        Ok(TextPipeline { stoplist, rules })
    }

    pub fn preprocess(&self, text: &str) -> Vec<String> {
        preprocess_text(text, &self.stoplist, &self.rules)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenize_drops_numbers_and_punctuation() {
        assert_eq!(tokenize(&"Umrah 2024, resmi!".to_lowercase()), ["umrah", "resmi"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("biro-resmi"), ["biro", "resmi"]);
        assert_eq!(tokenize("a b cd 1446h 12"), ["cd", "1446h"]);
    }

    #[test]
    fn preprocess_reference_sentence() {
        let p = TextPipeline::default();
        assert_eq!(p.preprocess("Mendaftar Umrah yang Resmi"), ["daftar", "umrah", "resmi"]);
        assert!(p.preprocess("dan yang adalah").is_empty());
    }

    #[test]
    fn uppercase_matches_lowercase() {
        let p = TextPipeline::default();
        let text = "Pendaftaran Jamaah Umrah Terdaftar di Kemenag, Pelayanan Resmi";
        assert_eq!(p.preprocess(&text.to_uppercase()), p.preprocess(&text.to_lowercase()));
    }

    #[test]
    fn stemmed_forms_are_not_rechecked_against_stoplist() {
        let p = TextPipeline::default();
        assert!(p.stoplist.contains("sampai"));
        assert_eq!(p.preprocess("sesampai"), ["sampai"]);
    }

    proptest! {
        #[test]
        fn case_fold_invariance(text in "[a-zA-Z0-9 ,.!-]{0,60}") {
            let p = TextPipeline::default();
            prop_assert_eq!(p.preprocess(&text), p.preprocess(&text.to_lowercase()));
        }

        #[test]
        fn output_has_no_stopwords(words in prop::collection::vec(
            prop::sample::select(vec![
                "dan", "yang", "adalah", "pendaftaran", "umrah", "resmi", "untuk",
                "murah", "dengan", "pelayanan", "kami", "promo",
            ]),
            0..20,
        )) {
            let p = TextPipeline::default();
            let out = p.preprocess(&words.join(" "));
            prop_assert!(out.iter().all(|t| !p.stoplist.contains(t)));
        }
    }
}
