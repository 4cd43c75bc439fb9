//! Dictionary-backed affix stripping for Indonesian.
//!
//! An ordered subset of the Nazief-Adriani rules:
//!
//! 1. A token found in the root dictionary is returned as is.
//! 2. Inflectional particles (`-lah`, `-kah`, `-pun`), then possessive
//!    pronouns (`-nya`, `-ku`, `-mu`), then derivational suffixes (`-kan`,
//!    `-an`, `-i`) are removed, at most one from each group, checking the
//!    dictionary after every removal.
//! 3. Derivational prefixes are removed, up to three deep, trying each form
//!    produced by step 2 from the most stripped back to the original token.
//!    Nasal prefixes recode the first letter of the root (`meny-` + vowel
//!    becomes `s-`, `mem-` + vowel `p-`, `men-` + vowel `t-`, `meng-` +
//!    vowel `k-`, and the same for `pe-`).
//! 4. With no dictionary hit the original token is returned unchanged.

use std::collections::HashSet;
use std::path::Path;

use super::stoplist::{parse_word_list, read_word_list, StoplistError};

const BUNDLED_ROOTS: &str = include_str!("../../data/roots-id.txt");

const PARTICLES: [&str; 3] = ["lah", "kah", "pun"];
const POSSESSIVES: [&str; 3] = ["nya", "ku", "mu"];
const DERIVATIONAL_SUFFIXES: [&str; 3] = ["kan", "an", "i"];

const MAX_PREFIX_DEPTH: usize = 3;
const MIN_ROOT_LEN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Recode {
    /// Only the bare remainder.
    None,
    /// Remainder, plus `letter + remainder` when the remainder starts with a
    /// vowel.
    Optional(char),
    /// Only `letter + remainder`, and only before a vowel.
    Required(char),
}

/// Prefix rules in application order. Within a family the longer allomorph
/// comes first.
const PREFIXES: [(&str, Recode); 17] = [
    ("di", Recode::None),
    ("ke", Recode::None),
    ("se", Recode::None),
    ("ter", Recode::Optional('r')),
    ("ber", Recode::Optional('r')),
    ("be", Recode::None),
    ("meng", Recode::Optional('k')),
    ("meny", Recode::Required('s')),
    ("mem", Recode::Optional('p')),
    ("men", Recode::Optional('t')),
    ("me", Recode::None),
    ("peng", Recode::Optional('k')),
    ("peny", Recode::Required('s')),
    ("pem", Recode::Optional('p')),
    ("pen", Recode::Optional('t')),
    ("per", Recode::Optional('r')),
    ("pe", Recode::None),
];

fn is_vowel(c: char) -> bool {
    matches!(c, 'a' | 'e' | 'i' | 'o' | 'u')
}

/// Root dictionary plus the fixed affix tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StemmerRules {
    root_dictionary: HashSet<String>,
}

impl StemmerRules {
    pub fn from_roots(roots: impl IntoIterator<Item = impl AsRef<str>>) -> Result<Self, StoplistError> {
        let root_dictionary: HashSet<String> = roots.into_iter().map(|r| r.as_ref().to_lowercase()).collect();
        if root_dictionary.is_empty() {
            return Err(StoplistError::Empty);
        }
        Ok(StemmerRules { root_dictionary })
    }

    pub fn from_dictionary_path(path: impl AsRef<Path>) -> Result<Self, StoplistError> {
        let text = read_word_list(path.as_ref())?;
        Self::from_roots(parse_word_list(&text))
    }

    pub fn is_root(&self, word: &str) -> bool {
        self.root_dictionary.contains(word)
    }

    pub fn roots(&self) -> impl Iterator<Item = &str> {
        self.root_dictionary.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.root_dictionary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root_dictionary.is_empty()
    }
}

impl Default for StemmerRules {
    fn default() -> Self {
        StemmerRules::from_roots(parse_word_list(BUNDLED_ROOTS)).expect("bundled dictionary")
    }
}

fn strip_suffix<'a>(word: &'a str, group: &[&str]) -> Option<&'a str> {
    group
        .iter()
        .find_map(|s| word.strip_suffix(s).filter(|rest| rest.chars().count() >= MIN_ROOT_LEN))
}

fn prefix_candidates(word: &str) -> Vec<String> {
    let mut out = Vec::new();
    for (prefix, recode) in PREFIXES {
        let Some(rest) = word.strip_prefix(prefix) else {
            continue;
        };
        let starts_with_vowel = rest.chars().next().is_some_and(is_vowel);
        match recode {
            Recode::None => out.push(rest.to_owned()),
            Recode::Optional(letter) => {
                out.push(rest.to_owned());
                if starts_with_vowel {
                    out.push(format!("{letter}{rest}"));
                }
            }
            Recode::Required(letter) => {
                if starts_with_vowel {
                    out.push(format!("{letter}{rest}"));
                }
            }
        }
    }
    out.retain(|c| c.chars().count() >= MIN_ROOT_LEN);
    out
}

fn strip_prefixes(word: &str, rules: &StemmerRules, depth: usize) -> Option<String> {
    if depth == MAX_PREFIX_DEPTH {
        return None;
    }
    for candidate in prefix_candidates(word) {
        if rules.is_root(&candidate) {
            return Some(candidate);
        }
        if let Some(root) = strip_prefixes(&candidate, rules, depth + 1) {
            return Some(root);
        }
    }
    None
}

/// Reduces a lowercase token to its dictionary root, or returns it unchanged
/// when no rule sequence reaches the dictionary.
pub fn stem_token(token: &str, rules: &StemmerRules) -> String {
    if rules.is_root(token) {
        return token.to_owned();
    }
    let mut forms = vec![token];
    let mut current = token;
    for group in [&PARTICLES[..], &POSSESSIVES[..], &DERIVATIONAL_SUFFIXES[..]] {
        if let Some(rest) = strip_suffix(current, group) {
            if rules.is_root(rest) {
                return rest.to_owned();
            }
            current = rest;
            forms.push(rest);
        }
    }
    forms
        .iter()
        .rev()
        .find_map(|form| strip_prefixes(form, rules, 0))
        .unwrap_or_else(|| token.to_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stem(t: &str) -> String {
        stem_token(t, &StemmerRules::default())
    }

    #[test]
    fn daftar_family() {
        assert_eq!(stem("pendaftaran"), "daftar");
        assert_eq!(stem("mendaftar"), "daftar");
        assert_eq!(stem("terdaftar"), "daftar");
        assert_eq!(stem("didaftarkan"), "daftar");
    }

    #[test]
    fn roots_unchanged() {
        assert_eq!(stem("umrah"), "umrah");
        assert_eq!(stem("haji"), "haji");
        assert_eq!(stem("resmi"), "resmi");
    }

    #[test]
    fn recoding_rules() {
        assert_eq!(stem("penyelenggara"), "selenggara");
        assert_eq!(stem("menulis"), "tulis");
        assert_eq!(stem("memakai"), "pakai");
        assert_eq!(stem("mengirim"), "kirim");
        assert_eq!(stem("menyimpan"), "simpan");
        assert_eq!(stem("pengiriman"), "kirim");
    }

    #[test]
    fn generator_vocabulary() {
        for (word, root) in [
            ("pelayanan", "layan"),
            ("layanan", "layan"),
            ("berizin", "izin"),
            ("bimbingan", "bimbing"),
            ("pembimbing", "bimbing"),
            ("keberangkatan", "berangkat"),
            ("perlindungan", "lindung"),
            ("terpercaya", "percaya"),
            ("perjalanan", "jalan"),
            ("terjangkau", "jangkau"),
            ("cicilan", "cicil"),
            ("termurah", "murah"),
            ("dijamin", "jamin"),
            ("potongan", "potong"),
            ("terbatas", "batas"),
            ("buruan", "buru"),
            ("perizinan", "izin"),
        ] {
            assert_eq!(stem(word), root, "{word}");
        }
    }

    #[test]
    fn particles_and_possessives() {
        assert_eq!(stem("jamaahnya"), "jamaah");
        assert_eq!(stem("datanglah"), "datang");
        assert_eq!(stem("kirimkanlah"), "kirim");
        assert_eq!(stem("pelayanannya"), "layan");
    }

    #[test]
    fn unknown_word_unchanged() {
        assert_eq!(stem("xyzzyan"), "xyzzyan");
        assert_eq!(stem("instan"), "instan");
    }

    #[test]
    fn dictionary_is_fixed_point() {
        let rules = StemmerRules::default();
        assert!(rules.len() >= 2000);
        for root in rules.roots() {
            let once = stem_token(root, &rules);
            assert_eq!(once, root);
            assert_eq!(stem_token(&once, &rules), once);
        }
    }

    proptest! {
        #[test]
        fn idempotent(token in "(di|ke|se|ter|ber|meng|meny|mem|men|pe|per|peng)?[a-z]{2,8}(lah|nya|kan|an|i)?") {
            let rules = StemmerRules::default();
            let once = stem_token(&token, &rules);
            prop_assert_eq!(stem_token(&once, &rules), once);
        }
    }
}
