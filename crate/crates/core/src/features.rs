//! Bag-of-characters model: grapheme bigrams that contain a brevigraph,
//! a top-k vocabulary, raw counts and TF-IDF weights.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClusterClass, Clusters, GraphemeCluster};
use crate::segmentation::{Segment, SegmentId};

pub const DEFAULT_TOP_K: usize = 100;

/// Two adjacent grapheme clusters. Whitespace clusters are stored as U+0020.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bigram {
    pub first: String,
    pub second: String,
    pub first_class: ClusterClass,
    pub second_class: ClusterClass,
}

fn canonical(c: &GraphemeCluster) -> &str {
    if c.is_whitespace() {
        " "
    } else {
        c.as_str()
    }
}

impl Bigram {
    pub fn from_pair(a: &GraphemeCluster, b: &GraphemeCluster) -> Self {
        Self {
            first: canonical(a).to_string(),
            second: canonical(b).to_string(),
            first_class: a.class(),
            second_class: b.class(),
        }
    }

    pub fn has_brevigraph(&self) -> bool {
        self.first_class == ClusterClass::Brevigraph || self.second_class == ClusterClass::Brevigraph
    }

    pub fn text(&self) -> String {
        format!("{}{}", self.first, self.second)
    }

    fn key(&self) -> (&str, &str) {
        (&self.first, &self.second)
    }
}

impl fmt::Display for Bigram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

/// Code-point order of the concatenated text, then of the first cluster.
fn lexicographic(a: (&str, &str), b: (&str, &str)) -> Ordering {
    a.0.chars()
        .chain(a.1.chars())
        .cmp(b.0.chars().chain(b.1.chars()))
        .then_with(|| a.0.cmp(b.0))
}

impl Ord for Bigram {
    fn cmp(&self, other: &Self) -> Ordering {
        lexicographic(self.key(), other.key())
    }
}

impl PartialOrd for Bigram {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Every adjacent cluster pair of the segment, in order.
pub fn extract_bigrams<T: Clusters + ?Sized>(segment: &T) -> Vec<Bigram> {
    segment
        .clusters()
        .windows(2)
        .map(|w| Bigram::from_pair(&w[0], &w[1]))
        .collect()
}

/// Keeps the bigrams with at least one brevigraph member.
pub fn filter_brevigraph_bigrams(bigrams: impl IntoIterator<Item = Bigram>) -> Vec<Bigram> {
    bigrams.into_iter().filter(Bigram::has_brevigraph).collect()
}

type PairKey<'a> = (&'a str, &'a str);

fn brevigraph_pair_counts(clusters: &[GraphemeCluster]) -> HashMap<PairKey<'_>, (u64, &GraphemeCluster, &GraphemeCluster)> {
    let mut counts: HashMap<PairKey<'_>, (u64, &GraphemeCluster, &GraphemeCluster)> = HashMap::new();
    for w in clusters.windows(2) {
        if w[0].is_brevigraph() || w[1].is_brevigraph() {
            counts
                .entry((canonical(&w[0]), canonical(&w[1])))
                .or_insert((0, &w[0], &w[1]))
                .0 += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub bigram: Bigram,
    pub count: u64,
}

/// Ordered feature columns with their corpus-wide occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub entries: Vec<VocabEntry>,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn bigrams(&self) -> impl Iterator<Item = &Bigram> {
        self.entries.iter().map(|e| &e.bigram)
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            bigram: String,
            count: u64,
            first: &'a str,
            second: &'a str,
        }
        let rows: Vec<Row> = self
            .entries
            .iter()
            .map(|e| Row {
                bigram: e.bigram.text(),
                count: e.count,
                first: &e.bigram.first,
                second: &e.bigram.second,
            })
            .collect();
        serde_json::to_string_pretty(&rows).expect("vocabulary serializes")
    }
}

/// Selects the `k` brevigraph bigrams with the highest total count over
/// `segments`. Ties are broken by code-point order.
pub fn build_vocab<T: Clusters + Sync>(segments: &[T], k: usize) -> Vocabulary {
    assert!(k >= 1, "k must be positive");
    let per_segment: Vec<_> = segments
        .par_iter()
        .map(|s| brevigraph_pair_counts(s.clusters()))
        .collect();
    let mut totals: HashMap<PairKey<'_>, (u64, &GraphemeCluster, &GraphemeCluster)> = HashMap::new();
    for counts in &per_segment {
        for (key, (n, a, b)) in counts {
            totals.entry(*key).or_insert((0, *a, *b)).0 += n;
        }
    }
    let mut ranked: Vec<(PairKey<'_>, u64, &GraphemeCluster, &GraphemeCluster)> = totals
        .into_iter()
        .map(|(key, (n, a, b))| (key, n, a, b))
        .collect();
    ranked.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| lexicographic(x.0, y.0)));
    ranked.truncate(k);
    Vocabulary {
        entries: ranked
            .into_iter()
            .map(|(_, count, a, b)| VocabEntry {
                bigram: Bigram::from_pair(a, b),
                count,
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Raw,
    Tfidf,
}

/// Dense segments-by-bigrams matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureMatrix {
    pub rows: Vec<SegmentId>,
    pub cols: Vec<Bigram>,
    pub values: Vec<f64>,
    pub weighting: Weighting,
}

impl FeatureMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_cols();
        &self.values[i * d..(i + 1) * d]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n_rows()).map(|i| self.row(i).to_vec()).collect()
    }

    /// Keeps the rows at `indices`, in that order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.n_cols());
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            cols: self.cols.clone(),
            values,
            weighting: self.weighting,
        }
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "codex".to_string(),
            "unit".to_string(),
            "scribe".to_string(),
            "segment".to_string(),
        ];
        header.extend(self.cols.iter().map(Bigram::text));
        w.write_record(&header)?;
        for (i, id) in self.rows.iter().enumerate() {
            let mut record = vec![
                id.codex.clone(),
                id.unit.clone(),
                id.scribe.to_string(),
                id.index.to_string(),
            ];
            record.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&record)?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }
}

/// Raw counts of each vocabulary bigram per segment.
pub fn vectorize(segments: &[Segment], vocab: &Vocabulary) -> FeatureMatrix {
    let index: HashMap<PairKey<'_>, usize> = vocab
        .entries
        .iter()
        .enumerate()
        .map(|(j, e)| (e.bigram.key(), j))
        .collect();
    let d = vocab.len();
    let rows: Vec<Vec<f64>> = segments
        .par_iter()
        .map(|s| {
            let mut row = vec![0.0; d];
            for w in s.clusters().windows(2) {
                if let Some(&j) = index.get(&(canonical(&w[0]), canonical(&w[1]))) {
                    row[j] += 1.0;
                }
            }
            row
        })
        .collect();
    FeatureMatrix {
        rows: segments.iter().map(|s| s.id.clone()).collect(),
        cols: vocab.bigrams().cloned().collect(),
        values: rows.concat(),
        weighting: Weighting::Raw,
    }
}

/// Smoothed inverse document frequency, `ln((1 + n) / (1 + df)) + 1`.
pub fn idf(matrix: &FeatureMatrix) -> Vec<f64> {
    let n = matrix.n_rows() as f64;
    (0..matrix.n_cols())
        .map(|j| {
            let df = (0..matrix.n_rows()).filter(|&i| matrix.get(i, j) > 0.0).count() as f64;
            ((1.0 + n) / (1.0 + df)).ln() + 1.0
        })
        .collect()
}

/// Multiplies counts by IDF and scales every non-zero row to unit L2 norm.
pub fn tfidf(matrix: &FeatureMatrix) -> FeatureMatrix {
    assert_eq!(matrix.weighting, Weighting::Raw, "tfidf expects raw counts");
    let weights = idf(matrix);
    let d = matrix.n_cols();
    let mut values = matrix.values.clone();
    for row in values.chunks_mut(d.max(1)) {
        for (v, w) in row.iter_mut().zip(&weights) {
            *v *= w;
        }
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            for v in row.iter_mut() {
                *v /= norm;
            }
        }
    }
    FeatureMatrix {
        rows: matrix.rows.clone(),
        cols: matrix.cols.clone(),
        values,
        weighting: Weighting::Tfidf,
    }
}
