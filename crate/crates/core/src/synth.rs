//! Synthetic corpora with controllable abbreviation habits.
//!
//! A [`HabitProfile`] draws words uniformly from a lexicon and abbreviates
//! them by rewriting rules that fire independently with a fixed probability.
//! Used by the test suites and by `scriptorium synth` for demo corpora.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use crate::corpus::{
    segment_graphemes, BrevigraphInventory, ClusterClass, Manifest, ManifestEntry, ProductionUnitDoc,
    ScribeLabel,
};
use crate::error::{CorpusError, Error, SynthError};
use crate::learn::seed::{derive_seed, derive_seed_for};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbbreviationRule {
    pub full: String,
    pub abbreviated: String,
    pub probability: f64,
}

impl AbbreviationRule {
    pub fn new(full: &str, abbreviated: &str, probability: f64) -> Self {
        Self {
            full: full.into(),
            abbreviated: abbreviated.into(),
            probability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HabitProfile {
    pub base_lexicon: Vec<String>,
    pub abbreviation_rules: Vec<AbbreviationRule>,
    /// When set, rule probabilities are rescaled by a common factor so the
    /// expected character-level density matches this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_density_char: Option<f64>,
    pub seed: u64,
}

fn clusters_of(s: &str) -> Vec<&str> {
    s.graphemes(true).collect()
}

/// (brevigraphs, letters) of a string under `inventory`.
fn letter_counts(s: &str, inventory: &BrevigraphInventory) -> (f64, f64) {
    segment_graphemes(s, inventory)
        .iter()
        .fold((0.0, 0.0), |(b, l), c| match c.class() {
            ClusterClass::Brevigraph => (b + 1.0, l),
            ClusterClass::Letter => (b, l + 1.0),
            _ => (b, l),
        })
}

impl HabitProfile {
    pub fn validate(&self, inventory: &BrevigraphInventory) -> Result<(), SynthError> {
        if self.base_lexicon.is_empty() {
            return Err(SynthError::EmptyLexicon);
        }
        if self.base_lexicon.iter().any(|w| w.is_empty() || w.chars().any(char::is_whitespace)) {
            return Err(SynthError::InvalidRule("lexicon words must be non-empty and contain no whitespace".into()));
        }
        if let Some(t) = self.target_density_char {
            if !(0.0..=1.0).contains(&t) {
                return Err(SynthError::InvalidRule(format!("target density {t} outside [0, 1]")));
            }
        }
        for rule in &self.abbreviation_rules {
            if !(0.0..=1.0).contains(&rule.probability) {
                return Err(SynthError::InvalidRule(format!(
                    "probability {} of {:?} outside [0, 1]",
                    rule.probability, rule.full
                )));
            }
            if rule.full.is_empty() || rule.full.chars().any(|c| inventory.contains(c)) {
                return Err(SynthError::InvalidRule(format!(
                    "full form {:?} must be non-empty and free of brevigraphs",
                    rule.full
                )));
            }
            if !rule.abbreviated.chars().any(|c| inventory.contains(c)) {
                return Err(SynthError::InvalidRule(format!(
                    "abbreviated form {:?} contains no brevigraph",
                    rule.abbreviated
                )));
            }
            if rule.abbreviated.chars().any(char::is_whitespace) {
                return Err(SynthError::InvalidRule("abbreviated forms cannot contain whitespace".into()));
            }
        }
        Ok(())
    }

    fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for r in &mut out.abbreviation_rules {
            r.probability = (r.probability * factor).clamp(0.0, 1.0);
        }
        out.target_density_char = None;
        out
    }

    /// The profile with its probabilities rescaled to hit `target_density_char`
    /// (as closely as the rules allow), or an unchanged copy when no target is set.
    pub fn calibrated(&self, inventory: &BrevigraphInventory) -> Self {
        let Some(target) = self.target_density_char else {
            return self.clone();
        };
        let min_p = self
            .abbreviation_rules
            .iter()
            .map(|r| r.probability)
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !min_p.is_finite() {
            return self.scaled(1.0);
        }
        let (mut lo, mut hi) = (0.0, 1.0 / min_p);
        for _ in 0..100 {
            let mid = (lo + hi) / 2.0;
            if self.scaled(mid).expected_density_chars(inventory) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        self.scaled((lo + hi) / 2.0)
    }

    /// Expected (brevigraphs, letters) for one realization of `word`.
    fn expected_word_counts(&self, word: &str, inventory: &BrevigraphInventory) -> (f64, f64) {
        let clusters = clusters_of(word);
        let rules: Vec<(Vec<&str>, (f64, f64), f64)> = self
            .abbreviation_rules
            .iter()
            .map(|r| (clusters_of(&r.full), letter_counts(&r.abbreviated, inventory), r.probability))
            .collect();
        // suffix[p] = expected counts of the realization of clusters[p..]
        let mut suffix = vec![(0.0, 0.0); clusters.len() + 1];
        for p in (0..clusters.len()).rev() {
            let mut remaining = 1.0;
            let mut acc = (0.0, 0.0);
            for (full, counts, prob) in &rules {
                if clusters[p..].starts_with(full) {
                    let next = suffix[p + full.len()];
                    let w = remaining * prob;
                    acc.0 += w * (counts.0 + next.0);
                    acc.1 += w * (counts.1 + next.1);
                    remaining *= 1.0 - prob;
                }
            }
            let own = letter_counts(clusters[p], inventory);
            let next = suffix[p + 1];
            acc.0 += remaining * (own.0 + next.0);
            acc.1 += remaining * (own.1 + next.1);
            suffix[p] = acc;
        }
        suffix[0]
    }

    /// Long-run character-level abbreviation density of generated text.
    pub fn expected_density_chars(&self, inventory: &BrevigraphInventory) -> f64 {
        let (b, l) = self
            .base_lexicon
            .iter()
            .map(|w| self.expected_word_counts(w, inventory))
            .fold((0.0, 0.0), |acc, c| (acc.0 + c.0, acc.1 + c.1));
        if b + l == 0.0 {
            0.0
        } else {
            b / (b + l)
        }
    }

    fn realize(&self, word: &str, rng: &mut ChaCha8Rng) -> String {
        let clusters = clusters_of(word);
        let rules: Vec<(Vec<&str>, &AbbreviationRule)> = self
            .abbreviation_rules
            .iter()
            .map(|r| (clusters_of(&r.full), r))
            .collect();
        let mut out = String::with_capacity(word.len());
        let mut p = 0;
        'outer: while p < clusters.len() {
            for (full, rule) in &rules {
                if clusters[p..].starts_with(full) && rng.random::<f64>() < rule.probability {
                    out.push_str(&rule.abbreviated);
                    p += full.len();
                    continue 'outer;
                }
            }
            out.push_str(clusters[p]);
            p += 1;
        }
        out
    }

    /// Raw text of roughly `n_clusters` clusters (not yet truncated).
    fn generate_text(&self, n_clusters: usize, rng: &mut ChaCha8Rng) -> String {
        let mut text = String::new();
        let mut count = 0;
        while count < n_clusters {
            if !text.is_empty() {
                text.push(' ');
                count += 1;
            }
            let word = &self.base_lexicon[rng.random_range(0..self.base_lexicon.len())];
            let realized = self.realize(word, rng);
            count += realized.graphemes(true).count();
            text.push_str(&realized);
        }
        text
    }
}

/// Generates one production unit of `n_clusters` clusters, or one fewer when
/// the cut falls on a space. The random
/// stream depends on the profile seed and the unit's codex and id.
pub fn generate_unit(
    profile: &HabitProfile,
    n_clusters: usize,
    codex_id: &str,
    unit_id: &str,
    scribe: ScribeLabel,
    inventory: &BrevigraphInventory,
) -> Result<ProductionUnitDoc, SynthError> {
    profile.validate(inventory)?;
    if n_clusters == 0 {
        return Err(SynthError::ZeroLength);
    }
    let profile = profile.calibrated(inventory);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed_for(profile.seed, &format!("{codex_id}\u{1f}{unit_id}")));
    let text = profile.generate_text(n_clusters, &mut rng);
    let mut clusters = segment_graphemes(&text, inventory);
    clusters.truncate(n_clusters);
    if clusters.last().is_some_and(|c| c.is_whitespace()) {
        clusters.pop();
    }
    Ok(ProductionUnitDoc::new(codex_id, unit_id, scribe, None, clusters))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthUnit {
    pub codex: String,
    pub unit: String,
    pub scribe: String,
    pub profile: String,
    pub n_clusters: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_from: Option<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub date_to: Option<i32>,
}

/// A whole synthetic corpus: named profiles and the units drawn from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthCorpusSpec {
    pub profiles: BTreeMap<String, HabitProfile>,
    pub units: Vec<SynthUnit>,
}

impl SynthCorpusSpec {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Generates every unit. `master_seed` is mixed into each profile seed.
    pub fn generate(
        &self,
        master_seed: u64,
        inventory: &BrevigraphInventory,
    ) -> Result<Vec<ProductionUnitDoc>, Error> {
        let mut calibrated: HashMap<&str, HabitProfile> = HashMap::new();
        for (name, p) in &self.profiles {
            p.validate(inventory)?;
            let mut p = p.calibrated(inventory);
            p.seed = derive_seed(p.seed, master_seed);
            calibrated.insert(name, p);
        }
        self.units
            .iter()
            .map(|u| {
                let profile = calibrated
                    .get(u.profile.as_str())
                    .ok_or_else(|| SynthError::UnknownProfile(u.profile.clone()))?;
                let scribe = ScribeLabel::new(u.scribe.clone())?;
                let mut doc = generate_unit(profile, u.n_clusters, &u.codex, &u.unit, scribe, inventory)?;
                doc.date_range = match (u.date_from, u.date_to) {
                    (Some(a), Some(b)) => Some((a, b)),
                    (Some(a), None) | (None, Some(a)) => Some((a, a)),
                    _ => None,
                };
                Ok(doc)
            })
            .collect()
    }
}

fn file_stem(codex: &str, unit: &str) -> String {
    let raw = format!("{codex}_{unit}");
    raw.chars()
        .map(|c| if c.is_alphanumeric() || c == '-' { c } else { '_' })
        .collect()
}

/// Writes one transcription file per unit plus `manifest.json` into `dir`.
pub fn write_corpus(docs: &[ProductionUnitDoc], dir: &Path) -> Result<PathBuf, CorpusError> {
    std::fs::create_dir_all(dir).map_err(|source| CorpusError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(docs.len());
    for (i, doc) in docs.iter().enumerate() {
        let name = format!("{:03}_{}.txt", i, file_stem(&doc.codex_id, &doc.unit_id));
        let path = dir.join(&name);
        std::fs::write(&path, doc.text()).map_err(|source| CorpusError::Io { path, source })?;
        entries.push(ManifestEntry {
            file: PathBuf::from(name),
            codex: doc.codex_id.clone(),
            unit: doc.unit_id.clone(),
            scribe: doc.scribe.clone(),
            date_from: doc.date_range.map(|d| d.0),
            date_to: doc.date_range.map(|d| d.1),
            notes: None,
        });
    }
    let manifest = Manifest::from_entries(entries, dir.to_path_buf())?;
    let path = dir.join("manifest.json");
    std::fs::write(&path, manifest.to_json()).map_err(|source| CorpusError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

const LEXICON: [&str; 32] = [
    "ende", "die", "dat", "hi", "si", "van", "in", "een", "den", "der", "te", "niet", "met", "men",
    "sijn", "was", "wort", "god", "heren", "ons", "onse", "minne", "mensche", "hem", "haer", "om",
    "also", "want", "dan", "wel", "prophete", "verstaen",
];

/// A profile over a small Middle Dutch-like lexicon. `weights` scales the
/// probabilities of, in order: en→ē, in→ī, an→ā, on→ō, ende→⁊, er→ꝛ, per/pro→ꝑ/ꝓ, ver→ꝟ.
pub fn demo_profile(weights: [f64; 8], seed: u64) -> HabitProfile {
    let r = |full: &str, abbr: &str, p: f64| AbbreviationRule::new(full, abbr, p);
    HabitProfile {
        base_lexicon: LEXICON.iter().map(|s| s.to_string()).collect(),
        abbreviation_rules: vec![
            r("ende", "⁊", weights[4]),
            r("per", "ꝑ", weights[6]),
            r("pro", "ꝓ", weights[6]),
            r("ver", "ꝟ", weights[7]),
            r("en", "ē", weights[0]),
            r("in", "ī", weights[1]),
            r("an", "ā", weights[2]),
            r("on", "ō", weights[3]),
            r("er", "ꝛ", weights[5]),
        ],
        target_density_char: None,
        seed,
    }
}

/// A five-scribe demo corpus whose `alpha` hand includes one production unit
/// ("Vienna, ÖNB, SN 65" II) written with clearly different habits.
pub fn demo_corpus_spec(unit_clusters: usize) -> SynthCorpusSpec {
    let mut profiles = BTreeMap::new();
    profiles.insert("alpha".into(), demo_profile([0.7, 0.6, 0.2, 0.2, 0.5, 0.1, 0.5, 0.4], 1));
    profiles.insert("alpha-sn65".into(), demo_profile([0.03, 0.02, 0.5, 0.5, 0.1, 0.4, 0.5, 0.1], 2));
    profiles.insert("beta".into(), demo_profile([0.2, 0.2, 0.7, 0.3, 0.9, 0.1, 0.3, 0.6], 3));
    profiles.insert("gamma".into(), demo_profile([0.4, 0.1, 0.1, 0.8, 0.2, 0.6, 0.2, 0.2], 4));
    profiles.insert("epsilon".into(), demo_profile([0.9, 0.9, 0.8, 0.8, 0.9, 0.5, 0.9, 0.9], 5));
    let unit = |codex: &str, unit: &str, scribe: &str, profile: &str, n: usize| SynthUnit {
        codex: codex.into(),
        unit: unit.into(),
        scribe: scribe.into(),
        profile: profile.into(),
        n_clusters: n,
        date_from: None,
        date_to: None,
    };
    let n = unit_clusters;
    SynthCorpusSpec {
        profiles,
        units: vec![
            unit("Vienna, ÖNB, Cod. 13.708", "I", "alpha", "alpha", 2 * n),
            unit("Ghent, UL, 1374", "I", "alpha", "alpha", 2 * n),
            unit("Vienna, ÖNB, Cod. 12.857", "I", "alpha", "alpha", 2 * n),
            unit("Vienna, ÖNB, Cod. 13.807", "II", "alpha", "alpha", 2 * n),
            unit("Vienna, ÖNB, Cod. 13.807", "X", "alpha", "alpha", 2 * n),
            unit("Vienna, ÖNB, SN 65", "II", "alpha", "alpha-sn65", 2 * n),
            unit("Vienna, ÖNB, SN 65", "I", "gamma", "gamma", n),
            unit("Vienna, ÖNB, SN 65", "III", "gamma", "gamma", n),
            unit("Paris, BM, 920", "IV", "gamma?", "gamma", n),
            unit("Brussels, KBR, 2905", "I", "beta", "beta", 2 * n),
            unit("Vienna, ÖNB, Cod. 15.258", "I", "epsilon", "epsilon", 2 * n),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::abbreviation_density_chars;

    fn inv() -> BrevigraphInventory {
        BrevigraphInventory::default()
    }

    fn label() -> ScribeLabel {
        ScribeLabel::new("s").unwrap()
    }

    #[test]
    fn zero_probabilities_give_zero_density() {
        let p = demo_profile([0.0; 8], 3);
        let doc = generate_unit(&p, 2_000, "C", "I", label(), &inv()).unwrap();
        assert_eq!(abbreviation_density_chars(&doc).unwrap(), 0.0);
        assert!((1_999..=2_000).contains(&doc.grapheme_count()));
    }

    #[test]
    fn single_word_rule() {
        let p = HabitProfile {
            base_lexicon: vec!["ende".into()],
            abbreviation_rules: vec![AbbreviationRule::new("ende", "en\u{0303}", 1.0)],
            target_density_char: None,
            seed: 0,
        };
        let doc = generate_unit(&p, 3 * 400, "C", "I", label(), &inv()).unwrap();
        assert_eq!(abbreviation_density_chars(&doc).unwrap(), 0.5);
        assert!((p.expected_density_chars(&inv()) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deterministic() {
        let p = demo_profile([0.5; 8], 11);
        let a = generate_unit(&p, 1_000, "C", "I", label(), &inv()).unwrap();
        let b = generate_unit(&p, 1_000, "C", "I", label(), &inv()).unwrap();
        assert_eq!(a.text(), b.text());
        let c = generate_unit(&p, 1_000, "C", "II", label(), &inv()).unwrap();
        assert_ne!(a.text(), c.text());
    }

    #[test]
    fn validation() {
        let mut p = demo_profile([0.5; 8], 0);
        p.base_lexicon.clear();
        assert_eq!(p.validate(&inv()), Err(SynthError::EmptyLexicon));
        let mut p = demo_profile([0.5; 8], 0);
        p.abbreviation_rules[0].probability = 1.5;
        assert!(matches!(p.validate(&inv()), Err(SynthError::InvalidRule(_))));
        let mut p = demo_profile([0.5; 8], 0);
        p.abbreviation_rules[0].abbreviated = "x".into();
        assert!(matches!(p.validate(&inv()), Err(SynthError::InvalidRule(_))));
        let mut p = demo_profile([0.5; 8], 0);
        p.abbreviation_rules[0].full = "ē".into();
        assert!(matches!(p.validate(&inv()), Err(SynthError::InvalidRule(_))));
    }

    #[test]
    fn calibration_hits_target() {
        let mut p = demo_profile([0.5; 8], 0);
        p.target_density_char = Some(0.1);
        let c = p.calibrated(&inv());
        assert!((c.expected_density_chars(&inv()) - 0.1).abs() < 1e-9);
    }

    #[test]
    fn density_converges_to_expectation() {
        let p = demo_profile([0.6, 0.3, 0.2, 0.4, 0.5, 0.2, 0.5, 0.3], 21);
        let n = 40_000;
        let doc = generate_unit(&p, n, "C", "I", label(), &inv()).unwrap();
        let expected = p.expected_density_chars(&inv());
        let got = abbreviation_density_chars(&doc).unwrap();
        let counts = crate::metrics::ClusterCounts::of(&doc.shared_clusters());
        let letters = counts.letters + counts.brevigraphs;
        let sigma = (expected * (1.0 - expected) / letters as f64).sqrt();
        assert!((got - expected).abs() <= 3.0 * sigma, "got {got} expected {expected} sigma {sigma}");
    }

    #[test]
    fn corpus_round_trip() {
        let spec = demo_corpus_spec(600);
        let docs = spec.generate(42, &inv()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let manifest = write_corpus(&docs, dir.path()).unwrap();
        let corpus = crate::corpus::Corpus::load_path(&manifest, &inv()).unwrap();
        assert_eq!(corpus.docs.len(), docs.len());
        for (a, b) in corpus.docs.iter().zip(&docs) {
            assert_eq!(a.text(), b.text());
            assert_eq!(a.scribe, b.scribe);
        }
        let again = SynthCorpusSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
    }
}
