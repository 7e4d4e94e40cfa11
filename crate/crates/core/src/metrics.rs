//! Descriptive statistics: abbreviation densities, type-token ratio and
//! character inventories, per sample and per group.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{Clusters, GraphemeCluster, ProductionUnitDoc};
use crate::error::MetricsError;
use crate::segmentation::Segment;

/// Maximal runs of non-whitespace clusters.
pub fn words(clusters: &[GraphemeCluster]) -> impl Iterator<Item = &[GraphemeCluster]> {
    clusters
        .split(GraphemeCluster::is_whitespace)
        .filter(|w| !w.is_empty())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClusterCounts {
    pub letters: usize,
    pub brevigraphs: usize,
    pub words: usize,
    pub abbreviated_words: usize,
}

impl ClusterCounts {
    pub fn of(clusters: &[GraphemeCluster]) -> Self {
        let mut counts = Self::default();
        for c in clusters {
            match c.class() {
                crate::corpus::ClusterClass::Letter => counts.letters += 1,
                crate::corpus::ClusterClass::Brevigraph => counts.brevigraphs += 1,
                _ => {}
            }
        }
        for w in words(clusters) {
            counts.words += 1;
            if w.iter().any(GraphemeCluster::is_brevigraph) {
                counts.abbreviated_words += 1;
            }
        }
        counts
    }

    fn add(&mut self, other: &Self) {
        self.letters += other.letters;
        self.brevigraphs += other.brevigraphs;
        self.words += other.words;
        self.abbreviated_words += other.abbreviated_words;
    }

    pub fn density_chars(&self) -> Result<f64, MetricsError> {
        let denom = self.letters + self.brevigraphs;
        if denom == 0 {
            return Err(MetricsError::EmptyDocument);
        }
        Ok(self.brevigraphs as f64 / denom as f64)
    }

    pub fn density_words(&self) -> Result<f64, MetricsError> {
        if self.words == 0 {
            return Err(MetricsError::EmptyDocument);
        }
        Ok(self.abbreviated_words as f64 / self.words as f64)
    }
}

/// Brevigraph clusters over letter-like clusters (letters plus brevigraphs).
pub fn abbreviation_density_chars<T: Clusters + ?Sized>(doc: &T) -> Result<f64, MetricsError> {
    ClusterCounts::of(doc.clusters()).density_chars()
}

/// Words containing at least one brevigraph over all words.
pub fn abbreviation_density_words<T: Clusters + ?Sized>(doc: &T) -> Result<f64, MetricsError> {
    ClusterCounts::of(doc.clusters()).density_words()
}

pub fn type_token_ratio<T: Clusters + ?Sized>(doc: &T) -> Result<f64, MetricsError> {
    let mut types: HashSet<&[GraphemeCluster]> = HashSet::new();
    let mut tokens = 0usize;
    for w in words(doc.clusters()) {
        types.insert(w);
        tokens += 1;
    }
    if tokens == 0 {
        return Err(MetricsError::EmptyDocument);
    }
    Ok(types.len() as f64 / tokens as f64)
}

/// Type-token ratio pooled over several documents.
pub fn pooled_type_token_ratio<'a, T: Clusters + 'a>(
    docs: impl IntoIterator<Item = &'a T>,
) -> Result<f64, MetricsError> {
    let mut types: HashSet<&[GraphemeCluster]> = HashSet::new();
    let mut tokens = 0usize;
    for doc in docs {
        for w in words(doc.clusters()) {
            types.insert(w);
            tokens += 1;
        }
    }
    if tokens == 0 {
        return Err(MetricsError::EmptyDocument);
    }
    Ok(types.len() as f64 / tokens as f64)
}

/// Distinct non-whitespace clusters.
pub fn unique_characters<T: Clusters + ?Sized>(doc: &T) -> usize {
    doc.clusters()
        .iter()
        .filter(|c| !c.is_whitespace())
        .map(GraphemeCluster::as_str)
        .collect::<HashSet<_>>()
        .len()
}

pub fn pooled_unique_characters<'a, T: Clusters + 'a>(docs: impl IntoIterator<Item = &'a T>) -> usize {
    let mut seen: HashSet<&str> = HashSet::new();
    for doc in docs {
        seen.extend(
            doc.clusters()
                .iter()
                .filter(|c| !c.is_whitespace())
                .map(GraphemeCluster::as_str),
        );
    }
    seen.len()
}

/// Five-number summary with linearly interpolated quartiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxStats {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

impl BoxStats {
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (sorted.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
        };
        Some(Self {
            min: sorted[0],
            q1: q(0.25),
            median: q(0.5),
            q3: q(0.75),
            max: sorted[sorted.len() - 1],
        })
    }
}

pub fn mean(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return f64::NAN;
    }
    samples.iter().sum::<f64>() / samples.len() as f64
}

/// Codex, unit and scribe of a sample, for grouping.
pub trait SampleMeta {
    fn codex(&self) -> &str;
    fn unit(&self) -> &str;
    fn scribe(&self) -> &str;
}

impl SampleMeta for ProductionUnitDoc {
    fn codex(&self) -> &str {
        &self.codex_id
    }
    fn unit(&self) -> &str {
        &self.unit_id
    }
    fn scribe(&self) -> &str {
        self.scribe.as_str()
    }
}

impl SampleMeta for Segment {
    fn codex(&self) -> &str {
        Segment::codex(self)
    }
    fn unit(&self) -> &str {
        Segment::unit(self)
    }
    fn scribe(&self) -> &str {
        Segment::scribe(self).as_str()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupBy {
    Scribe,
    Codex,
    Unit,
    CodexUnit,
}

impl GroupBy {
    pub fn key<S: SampleMeta + ?Sized>(&self, s: &S) -> String {
        match self {
            GroupBy::Scribe => s.scribe().to_string(),
            GroupBy::Codex => s.codex().to_string(),
            GroupBy::Unit => s.unit().to_string(),
            GroupBy::CodexUnit => format!("{} {}", s.codex(), s.unit()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityLevel {
    Character,
    Word,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub key: String,
    pub n_documents: usize,
    pub n_samples: usize,
    pub mean_density_char: f64,
    pub mean_density_word: f64,
    pub per_sample_densities: Vec<f64>,
    pub summary: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub group_by: GroupBy,
    pub level: DensityLevel,
    pub pooled: bool,
    pub rows: Vec<DensityRow>,
}

/// Groups samples and reports mean densities plus the per-sample
/// distribution at `level`. Means are unweighted over samples unless
/// `pooled` is set, in which case counts are summed before dividing.
/// Groups appear in first-seen order.
pub fn density_report<S: Clusters + SampleMeta>(
    samples: &[S],
    group_by: GroupBy,
    level: DensityLevel,
    pooled: bool,
) -> Result<DensityReport, MetricsError> {
    struct Acc<'a> {
        units: HashSet<(&'a str, &'a str)>,
        chars: Vec<f64>,
        words: Vec<f64>,
        totals: ClusterCounts,
    }
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, Acc> = HashMap::new();
    for s in samples {
        let key = group_by.key(s);
        let counts = ClusterCounts::of(s.clusters());
        let acc = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            Acc {
                units: HashSet::new(),
                chars: Vec::new(),
                words: Vec::new(),
                totals: ClusterCounts::default(),
            }
        });
        acc.units.insert((s.codex(), s.unit()));
        acc.chars.push(counts.density_chars()?);
        acc.words.push(counts.density_words()?);
        acc.totals.add(&counts);
    }
    let rows = order
        .into_iter()
        .map(|key| {
            let acc = &groups[&key];
            if acc.chars.is_empty() {
                return Err(MetricsError::EmptyGroup(key));
            }
            let (mean_char, mean_word) = if pooled {
                (acc.totals.density_chars()?, acc.totals.density_words()?)
            } else {
                (mean(&acc.chars), mean(&acc.words))
            };
            let per_sample = match level {
                DensityLevel::Character => acc.chars.clone(),
                DensityLevel::Word => acc.words.clone(),
            };
            let summary = BoxStats::from_samples(&per_sample).expect("non-empty");
            Ok(DensityRow {
                n_documents: acc.units.len(),
                n_samples: per_sample.len(),
                mean_density_char: mean_char,
                mean_density_word: mean_word,
                per_sample_densities: per_sample,
                summary,
                key,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DensityReport {
        group_by,
        level,
        pooled,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{segment_graphemes, BrevigraphInventory, ScribeLabel};

    fn clusters(text: &str) -> Vec<GraphemeCluster> {
        segment_graphemes(text, &BrevigraphInventory::default())
    }

    #[test]
    fn char_density_example() {
        let d = abbreviation_density_chars(&clusters("eñ dē wīsheit")).unwrap();
        assert!((d - 3.0 / 11.0).abs() < 1e-12);
        assert_eq!(abbreviation_density_chars(&clusters("ende die")).unwrap(), 0.0);
    }

    #[test]
    fn word_density_example() {
        let d = abbreviation_density_words(&clusters("eñ dē wisheit")).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(abbreviation_density_words(&clusters("ende die")).unwrap(), 0.0);
    }

    #[test]
    fn empty_documents_error() {
        assert_eq!(
            abbreviation_density_chars(&clusters("")),
            Err(MetricsError::EmptyDocument)
        );
        assert_eq!(
            abbreviation_density_chars(&clusters("12 34")),
            Err(MetricsError::EmptyDocument)
        );
        assert_eq!(
            abbreviation_density_words(&clusters(" ")),
            Err(MetricsError::EmptyDocument)
        );
        assert_eq!(type_token_ratio(&clusters("")), Err(MetricsError::EmptyDocument));
    }

    #[test]
    fn ttr_and_unique() {
        assert!((type_token_ratio(&clusters("die die boec")).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(type_token_ratio(&clusters("boec")).unwrap(), 1.0);
        assert_eq!(unique_characters(&clusters("aba")), 2);
        assert_eq!(unique_characters(&clusters("")), 0);
        assert_eq!(unique_characters(&clusters("a a")), 1);
    }

    #[test]
    fn decomposed_and_precomposed_are_distinct_types_but_same_density() {
        let nfc = clusters("\u{00F1}");
        let nfd = clusters("n\u{0303}");
        assert_eq!(
            abbreviation_density_chars(&nfc).unwrap(),
            abbreviation_density_chars(&nfd).unwrap()
        );
    }

    struct Fake {
        scribe: &'static str,
        unit: &'static str,
        clusters: Vec<GraphemeCluster>,
    }
    impl Clusters for Fake {
        fn clusters(&self) -> &[GraphemeCluster] {
            &self.clusters
        }
    }
    impl SampleMeta for Fake {
        fn codex(&self) -> &str {
            "C"
        }
        fn unit(&self) -> &str {
            self.unit
        }
        fn scribe(&self) -> &str {
            self.scribe
        }
    }

    // 10 letter-like clusters with `b` brevigraphs
    fn with_density(b: usize) -> Vec<GraphemeCluster> {
        let text: String = std::iter::repeat('ē')
            .take(b)
            .chain(std::iter::repeat('a').take(10 - b))
            .collect();
        clusters(&text)
    }

    #[test]
    fn report_means_and_distributions() {
        let samples = vec![
            Fake { scribe: "x", unit: "I", clusters: with_density(1) },
            Fake { scribe: "y", unit: "II", clusters: with_density(2) },
            Fake { scribe: "x", unit: "III", clusters: with_density(3) },
        ];
        let r = density_report(&samples, GroupBy::Scribe, DensityLevel::Character, false).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.rows[0].key, "x");
        assert!((r.rows[0].mean_density_char - 0.2).abs() < 1e-12);
        assert_eq!(r.rows[0].per_sample_densities, vec![0.1, 0.3]);
        assert_eq!(r.rows[0].n_documents, 2);
        assert!((r.rows[1].mean_density_char - 0.2).abs() < 1e-12);
        assert_eq!(r.rows[1].per_sample_densities, vec![0.2]);
    }

    #[test]
    fn pooled_mode_weights_by_counts() {
        let samples = vec![
            Fake { scribe: "x", unit: "I", clusters: with_density(1) },
            Fake { scribe: "x", unit: "I", clusters: clusters("ēēē") },
        ];
        let r = density_report(&samples, GroupBy::Scribe, DensityLevel::Character, true).unwrap();
        assert!((r.rows[0].mean_density_char - 4.0 / 13.0).abs() < 1e-12);
        let r = density_report(&samples, GroupBy::Scribe, DensityLevel::Character, false).unwrap();
        assert!((r.rows[0].mean_density_char - 0.55).abs() < 1e-12);
    }

    #[test]
    fn box_stats() {
        let b = BoxStats::from_samples(&[4.0, 1.0, 3.0, 2.0, 5.0]).unwrap();
        assert_eq!((b.min, b.q1, b.median, b.q3, b.max), (1.0, 2.0, 3.0, 4.0, 5.0));
        let b = BoxStats::from_samples(&[1.0, 2.0]).unwrap();
        assert_eq!(b.median, 1.5);
        assert!(BoxStats::from_samples(&[]).is_none());
    }

    #[test]
    fn docs_group_by_codex() {
        let inv = BrevigraphInventory::default();
        let a = ProductionUnitDoc::from_raw("G", "I", ScribeLabel::new("alpha").unwrap(), None, "ēa", &inv);
        let b = ProductionUnitDoc::from_raw("V", "I", ScribeLabel::new("alpha").unwrap(), None, "aa", &inv);
        let r = density_report(&[a, b], GroupBy::Codex, DensityLevel::Word, false).unwrap();
        assert_eq!(r.rows[0].per_sample_densities, vec![1.0]);
        assert_eq!(r.rows[1].per_sample_densities, vec![0.0]);
    }
}
