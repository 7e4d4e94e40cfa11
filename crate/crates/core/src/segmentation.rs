//! Fixed-size, non-overlapping segments of a production unit.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::corpus::{Clusters, Corpus, GraphemeCluster, ProductionUnitDoc, ScribeLabel};

pub const DEFAULT_SEGMENT_SIZE: usize = 5000;

/// Identifies a segment within the corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SegmentId {
    pub codex: String,
    pub unit: String,
    pub scribe: ScribeLabel,
    pub index: usize,
}

impl fmt::Display for SegmentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}|{}", self.codex, self.unit, self.scribe, self.index)
    }
}

/// A window of exactly `len` clusters borrowed from its unit.
#[derive(Debug, Clone)]
pub struct Segment {
    pub id: SegmentId,
    source: Arc<[GraphemeCluster]>,
    start: usize,
    len: usize,
}

impl Segment {
    /// Builds a stand-alone segment from an owned cluster sequence.
    pub fn from_clusters(id: SegmentId, clusters: Vec<GraphemeCluster>) -> Self {
        let len = clusters.len();
        Self {
            id,
            source: clusters.into(),
            start: 0,
            len,
        }
    }

    pub fn codex(&self) -> &str {
        &self.id.codex
    }

    pub fn unit(&self) -> &str {
        &self.id.unit
    }

    pub fn scribe(&self) -> &ScribeLabel {
        &self.id.scribe
    }

    pub fn index(&self) -> usize {
        self.id.index
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

impl Clusters for Segment {
    fn clusters(&self) -> &[GraphemeCluster] {
        &self.source[self.start..self.start + self.len]
    }
}

/// Cuts `doc` into `floor(n / size)` consecutive segments; the remainder is dropped.
pub fn segment_unit(doc: &ProductionUnitDoc, size: usize) -> Vec<Segment> {
    assert!(size >= 1, "segment size must be positive");
    let source = doc.shared_clusters();
    let n_segments = source.len() / size;
    (0..n_segments)
        .map(|index| Segment {
            id: SegmentId {
                codex: doc.codex_id.clone(),
                unit: doc.unit_id.clone(),
                scribe: doc.scribe.clone(),
                index,
            },
            source: Arc::clone(&source),
            start: index * size,
            len: size,
        })
        .collect()
}

/// Segments every unit of the corpus, in manifest order.
pub fn segment_corpus(corpus: &Corpus, size: usize) -> Vec<Segment> {
    corpus
        .docs
        .iter()
        .flat_map(|doc| segment_unit(doc, size))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentRow {
    pub codex: String,
    pub unit: String,
    pub scribe: String,
    pub index: usize,
    pub n_clusters: usize,
}

pub fn segment_table(segments: &[Segment]) -> Vec<SegmentRow> {
    segments
        .iter()
        .map(|s| SegmentRow {
            codex: s.id.codex.clone(),
            unit: s.id.unit.clone(),
            scribe: s.id.scribe.to_string(),
            index: s.id.index,
            n_clusters: s.len(),
        })
        .collect()
}
