//! Seeded synthetic dataset in the shape of the reference study: balanced
//! classes, formal vs marketing vocabulary, and high-risk permission rates
//! per class.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::{AppRecord, Label};
use super::DEFAULT_WATCHLIST;
use crate::rng;

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("invalid generator config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub term: String,
    pub weight: f64,
}

fn pool(terms: &[(&str, f64)]) -> Vec<WeightedTerm> {
    terms
        .iter()
        .map(|(t, w)| WeightedTerm {
            term: t.to_string(),
            weight: *w,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub seed: u64,
    pub n_official: usize,
    pub n_unofficial: usize,
    pub official_vocab: Vec<WeightedTerm>,
    pub unofficial_vocab: Vec<WeightedTerm>,
    pub shared_vocab: Vec<WeightedTerm>,
    pub p_highrisk_official: f64,
    pub p_highrisk_unofficial: f64,
    /// Inclusive `[min, max]` content-token count per description.
    pub description_length_range: [usize; 2],
    /// Per-token probability of drawing from the other class's pool.
    pub noise_rate: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 42,
            n_official: 100,
            n_unofficial: 100,
            official_vocab: pool(&[
                ("resmi", 5.0),
                ("kemenag", 3.5),
                ("jamaah", 2.0),
                ("izin", 1.6),
                ("ibadah", 1.5),
                ("pelayanan", 1.5),
                ("visa", 1.2),
                ("terdaftar", 1.2),
                ("berizin", 1.0),
                ("bimbingan", 1.0),
                ("manasik", 1.0),
                ("penyelenggara", 1.0),
                ("ppiu", 0.8),
                ("amanah", 0.8),
                ("keberangkatan", 0.8),
                ("sertifikat", 0.6),
                ("akreditasi", 0.6),
                ("syariah", 0.6),
                ("pembimbing", 0.6),
                ("terpercaya", 0.6),
                ("mendaftar", 0.6),
                ("pendaftaran", 0.6),
                ("perlindungan", 0.5),
                ("kantor", 0.5),
                ("profesional", 0.5),
                ("pihk", 0.4),
                ("siskopatuh", 0.4),
            ]),
            unofficial_vocab: pool(&[
                ("murah", 3.0),
                ("promo", 2.5),
                ("diskon", 2.0),
                ("cepat", 2.0),
                ("hemat", 1.2),
                ("gratis", 1.2),
                ("bonus", 1.0),
                ("terjangkau", 1.0),
                ("cicilan", 1.0),
                ("termurah", 1.0),
                ("kilat", 0.8),
                ("spesial", 0.8),
                ("dijamin", 0.8),
                ("segera", 0.8),
                ("langsung", 0.8),
                ("potongan", 0.7),
                ("terbatas", 0.7),
                ("hadiah", 0.6),
                ("kuota", 0.6),
                ("transfer", 0.6),
                ("buruan", 0.6),
                ("instan", 0.5),
            ]),
            shared_vocab: pool(&[
                ("umrah", 3.0),
                ("paket", 2.0),
                ("haji", 1.5),
                ("travel", 1.5),
                ("perjalanan", 1.2),
                ("hotel", 1.0),
                ("makkah", 1.0),
                ("madinah", 1.0),
                ("aplikasi", 1.0),
                ("pesawat", 0.8),
                ("tiket", 0.8),
                ("mudah", 0.8),
                ("keluarga", 0.6),
                ("nyaman", 0.6),
                ("hari", 0.6),
                ("jadwal", 0.6),
                ("harga", 0.6),
                ("berangkat", 0.6),
                ("bintang", 0.5),
                ("info", 0.5),
            ]),
            p_highrisk_official: 0.15,
            p_highrisk_unofficial: 0.85,
            description_length_range: [8, 20],
            noise_rate: 0.15,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        let invalid = |msg: String| Err(GeneratorError::Invalid(msg));
        if self.n_official == 0 || self.n_unofficial == 0 {
            return invalid("class counts must be positive".into());
        }
        for (name, p) in [
            ("p_highrisk_official", self.p_highrisk_official),
            ("p_highrisk_unofficial", self.p_highrisk_unofficial),
            ("noise_rate", self.noise_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("{name} = {p} is not a probability"));
            }
        }
        let [min, max] = self.description_length_range;
        if min == 0 || min > max {
            return invalid(format!("description_length_range [{min}, {max}] is empty"));
        }
        for (name, pool) in [
            ("official_vocab", &self.official_vocab),
            ("unofficial_vocab", &self.unofficial_vocab),
            ("shared_vocab", &self.shared_vocab),
        ] {
            if pool.is_empty() {
                return invalid(format!("{name} is empty"));
            }
            if let Some(t) = pool.iter().find(|t| t.weight <= 0.0 || !t.weight.is_finite()) {
                return invalid(format!("{name}: weight of {:?} must be positive", t.term));
            }
        }
        Ok(())
    }
}

const STOP_FILLER: [&str; 14] = [
    "dan", "yang", "untuk", "dengan", "di", "ke", "dari", "kami", "anda", "adalah", "bagi", "serta", "juga", "ini",
];

const OFFICIAL_BRAND_A: [&str; 16] = [
    "Amanah",
    "Barokah",
    "Nur",
    "Rahmah",
    "Safar",
    "Hidayah",
    "Madani",
    "Mabrur",
    "Salsabila",
    "Annisa",
    "Firdaus",
    "Zamzam",
    "Raudhah",
    "Arafah",
    "Mina",
    "Multazam",
];
const OFFICIAL_BRAND_B: [&str; 16] = [
    "Mulia",
    "Sejahtera",
    "Utama",
    "Insani",
    "Mandiri",
    "Berkah",
    "Sentosa",
    "Abadi",
    "Jaya",
    "Lestari",
    "Makmur",
    "Persada",
    "Prima",
    "Nusantara",
    "Cahaya",
    "Permata",
];
const OFFICIAL_BRAND_C: [&str; 8] = [
    "Wisata",
    "Tour",
    "Travel",
    "Tours & Travel",
    "Wisata Religi",
    "Haji Umrah",
    "Mitra Umrah",
    "Tour Travel",
];

const UNOFFICIAL_A: [&str; 16] = [
    "Promo", "Hemat", "Kilat", "Cepat", "Murah", "Sahabat", "Sultan", "Berkah", "Mega", "Super", "Top", "Jitu",
    "Pasti", "Andalan", "Idola", "Kita",
];
const UNOFFICIAL_B: [&str; 8] = ["Umroh", "Umrah", "Haji", "Travel", "Tour", "Religi", "Ziarah", "Mekah"];
const UNOFFICIAL_C: [&str; 16] = [
    "Apps", "Dev", "Studio", "Id", "Indo", "Mobile", "Digital", "Corp", "Group", "Media", "Labs", "Tech", "Online",
    "Center", "Go", "Plus",
];

const APP_KINDS: [&str; 6] = ["Umrah", "Haji & Umrah", "Travel", "Jamaah", "Mobile", "Go"];

const BENIGN_PERMISSIONS: [&str; 6] = [
    "WRITE_EXTERNAL_STORAGE",
    "VIBRATE",
    "WAKE_LOCK",
    "RECEIVE_BOOT_COMPLETED",
    "POST_NOTIFICATIONS",
    "CAMERA",
];

/// Watchlist draw weights, aligned with `DEFAULT_WATCHLIST`.
const WATCHLIST_WEIGHTS: [f64; 5] = [0.35, 0.30, 0.15, 0.10, 0.10];

fn mixed_radix(index: usize, radices: &[usize]) -> Vec<usize> {
    let mut rest = index;
    radices
        .iter()
        .map(|&r| {
            let digit = rest % r;
            rest /= r;
            digit
        })
        .collect()
}

/// Developer name of the `index`-th official agency. Unique for every index.
pub(crate) fn official_agency(index: usize) -> String {
    let radices = [OFFICIAL_BRAND_A.len(), OFFICIAL_BRAND_B.len(), OFFICIAL_BRAND_C.len()];
    let cycle: usize = radices.iter().product();
    // stride coprime to 16 so neighbouring indices differ in every word
    let d = mixed_radix((index * 37) % cycle, &radices);
    let mut name = format!(
        "PT {} {} {}",
        OFFICIAL_BRAND_A[d[0]], OFFICIAL_BRAND_B[d[1]], OFFICIAL_BRAND_C[d[2]]
    );
    if index >= cycle {
        name.push_str(&format!(" {}", index / cycle + 1));
    }
    name
}

fn unofficial_developer(index: usize) -> String {
    let radices = [UNOFFICIAL_A.len(), UNOFFICIAL_B.len(), UNOFFICIAL_C.len()];
    let cycle: usize = radices.iter().product();
    let d = mixed_radix((index * 41) % cycle, &radices);
    let mut name = format!("{} {} {}", UNOFFICIAL_A[d[0]], UNOFFICIAL_B[d[1]], UNOFFICIAL_C[d[2]]);
    if index >= cycle {
        name.push_str(&format!(" {}", index / cycle + 1));
    }
    name
}

/// Registered agency names for the first `n_official` generated records.
pub fn official_agencies(n_official: usize) -> Vec<String> {
    (0..n_official).map(official_agency).collect()
}

struct Sampler<'a> {
    terms: &'a [WeightedTerm],
    cumulative: Vec<f64>,
}

impl<'a> Sampler<'a> {
    fn new(terms: &'a [WeightedTerm]) -> Self {
        let mut acc = 0.0;
        let cumulative = terms
            .iter()
            .map(|t| {
                acc += t.weight;
                acc
            })
            .collect();
        Sampler { terms, cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> &'a str {
        let total = *self.cumulative.last().expect("validated non-empty");
        let x = rng.gen::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= x).min(self.terms.len() - 1);
        &self.terms[i].term
    }
}

fn weighted_index(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if x < *w {
            return i;
        }
        x -= w;
    }
    weights.len() - 1
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn description(
    own: &Sampler,
    other: &Sampler,
    shared: &Sampler,
    config: &GeneratorConfig,
    rng: &mut ChaCha8Rng,
) -> String {
    let [min, max] = config.description_length_range;
    let n_content = rng.gen_range(min..=max);
    let mut words: Vec<String> = Vec::with_capacity(n_content * 2);
    let mut sentence_len = 0;
    for _ in 0..n_content {
        if rng.gen_bool(0.3) {
            words.push(STOP_FILLER.choose(rng).unwrap().to_string());
        }
        let term = if rng.gen_bool(config.noise_rate) {
            other.sample(rng)
        } else if rng.gen_bool(0.35) {
            shared.sample(rng)
        } else {
            own.sample(rng)
        };
        words.push(term.to_string());
        sentence_len += 1;
        if sentence_len >= 4 && rng.gen_bool(0.25) {
            words.last_mut().unwrap().push('.');
            sentence_len = 0;
        }
    }
    if rng.gen_bool(0.2) {
        words.push("2025".into());
    }
    let mut text = String::new();
    let mut start = true;
    for w in words {
        if !text.is_empty() {
            text.push(' ');
        }
        if start {
            text.push_str(&capitalize(&w));
        } else {
            text.push_str(&w);
        }
        start = w.ends_with('.');
    }
    if !text.ends_with('.') {
        text.push('.');
    }
    text
}

fn permissions(label: Label, config: &GeneratorConfig, rng: &mut ChaCha8Rng) -> BTreeSet<String> {
    let mut perms = BTreeSet::new();
    perms.insert("INTERNET".to_string());
    if label == Label::Official || rng.gen_bool(0.6) {
        perms.insert("ACCESS_NETWORK_STATE".to_string());
    }
    for p in BENIGN_PERMISSIONS {
        if rng.gen_bool(0.2) {
            perms.insert(p.to_string());
        }
    }
    let p_risky = match label {
        Label::Official => config.p_highrisk_official,
        Label::Unofficial => config.p_highrisk_unofficial,
    };
    if rng.gen_bool(p_risky) {
        let count = match label {
            Label::Official => 1,
            Label::Unofficial => rng.gen_range(1..=3),
        };
        for _ in 0..count {
            let slot = weighted_index(&WATCHLIST_WEIGHTS, rng);
            perms.insert(DEFAULT_WATCHLIST[slot].to_string());
        }
    }
    perms
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Generates `n_official + n_unofficial` labeled records, officials first.
///
/// Each record draws from its own RNG stream, so the output is a pure
/// function of the config.
pub fn generate_synthetic(config: &GeneratorConfig) -> Result<Vec<AppRecord>, GeneratorError> {
    config.validate()?;
    let official = Sampler::new(&config.official_vocab);
    let unofficial = Sampler::new(&config.unofficial_vocab);
    let shared = Sampler::new(&config.shared_vocab);
    let total = config.n_official + config.n_unofficial;
    let width = total.to_string().len().max(4);

    let records = (0..total)
        .map(|i| {
            let mut rng = rng::stream(config.seed, rng::DOMAIN_GENERATOR, i as u64);
            let (label, class_index) = if i < config.n_official {
                (Label::Official, i)
            } else {
                (Label::Unofficial, i - config.n_official)
            };
            let (own, other) = match label {
                Label::Official => (&official, &unofficial),
                Label::Unofficial => (&unofficial, &official),
            };
            let description = description(own, other, &shared, config, &mut rng);
            let permissions = permissions(label, config, &mut rng);
            match label {
                Label::Official => {
                    let developer = official_agency(class_index);
                    let brand = developer.split_whitespace().nth(1).unwrap_or("Umrah").to_string();
                    let domain = format!(
                        "{}.co.id",
                        developer
                            .to_lowercase()
                            .split_whitespace()
                            .skip(1)
                            .take(2)
                            .collect::<String>()
                    );
                    let rating = Normal::new(4.4f64, 0.3).unwrap().sample(&mut rng).clamp(1.0, 5.0);
                    AppRecord {
                        app_id: format!("app-{:0width$}", i + 1),
                        name: format!("{brand} {}", APP_KINDS.choose(&mut rng).unwrap()),
                        developer_name: developer,
                        developer_email_domain: domain,
                        description,
                        permissions,
                        download_count: 10f64.powf(rng.gen_range(3.5..6.0)).round() as u64,
                        rating: round1(rating),
                        size_mb: round1(rng.gen_range(15.0..60.0)),
                        days_since_update: rng.gen_range(0..120),
                        label: Some(label),
                    }
                }
                Label::Unofficial => {
                    let developer = unofficial_developer(class_index);
                    let free_mail = ["gmail.com", "yahoo.com", "yahoo.co.id", "outlook.com"];
                    let domain = if rng.gen_bool(0.8) {
                        free_mail.choose(&mut rng).unwrap().to_string()
                    } else {
                        format!("{}.com", developer.to_lowercase().replace(' ', ""))
                    };
                    let rating = Normal::new(3.6f64, 0.7).unwrap().sample(&mut rng).clamp(1.0, 5.0);
                    let lead = developer.split_whitespace().next().unwrap_or("Promo").to_string();
                    AppRecord {
                        app_id: format!("app-{:0width$}", i + 1),
                        name: format!("{lead} {}", APP_KINDS.choose(&mut rng).unwrap()),
                        developer_name: developer,
                        developer_email_domain: domain,
                        description,
                        permissions,
                        download_count: 10f64.powf(rng.gen_range(2.0..5.0)).round() as u64,
                        rating: round1(rating),
                        size_mb: round1(rng.gen_range(3.0..30.0)),
                        days_since_update: rng.gen_range(30..700),
                        label: Some(label),
                    }
                }
            }
        })
        .collect();
    Ok(records)
}
