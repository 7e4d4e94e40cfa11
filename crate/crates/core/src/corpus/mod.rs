//! Ingestion: manifests, cleaning, grapheme segmentation and classification.

mod clean;
mod grapheme;
mod inventory;
mod manifest;

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

pub use clean::{clean_text, Cleaner, EXTRA_PUNCTUATION};
pub use grapheme::{
    count_characters, join_clusters, segment_graphemes, ClusterClass, CountMode, GraphemeCluster,
};
pub use inventory::BrevigraphInventory;
pub use manifest::{load_manifest, Manifest, ManifestEntry, ScribeLabel};

use crate::error::CorpusError;

/// Anything that exposes a classified cluster sequence: whole units or segments.
pub trait Clusters {
    fn clusters(&self) -> &[GraphemeCluster];
}

impl Clusters for [GraphemeCluster] {
    fn clusters(&self) -> &[GraphemeCluster] {
        self
    }
}

impl Clusters for Vec<GraphemeCluster> {
    fn clusters(&self) -> &[GraphemeCluster] {
        self
    }
}

/// One cleaned production unit with its metadata.
///
/// Clusters are shared with the segments cut from the unit. Digits and other
/// non-letter symbols survive cleaning as `Other` clusters; punctuation does not.
#[derive(Debug, Clone)]
pub struct ProductionUnitDoc {
    pub codex_id: String,
    pub unit_id: String,
    pub scribe: ScribeLabel,
    pub date_range: Option<(i32, i32)>,
    clusters: Arc<[GraphemeCluster]>,
}

impl ProductionUnitDoc {
    pub fn new(
        codex_id: impl Into<String>,
        unit_id: impl Into<String>,
        scribe: ScribeLabel,
        date_range: Option<(i32, i32)>,
        clusters: Vec<GraphemeCluster>,
    ) -> Self {
        Self {
            codex_id: codex_id.into(),
            unit_id: unit_id.into(),
            scribe,
            date_range,
            clusters: clusters.into(),
        }
    }

    /// Cleans and segments `raw` text into a unit.
    pub fn from_raw(
        codex_id: impl Into<String>,
        unit_id: impl Into<String>,
        scribe: ScribeLabel,
        date_range: Option<(i32, i32)>,
        raw: &str,
        inventory: &BrevigraphInventory,
    ) -> Self {
        let cleaned = Cleaner::new(inventory).clean(raw);
        let clusters = segment_graphemes(&cleaned, inventory);
        Self::new(codex_id, unit_id, scribe, date_range, clusters)
    }

    pub(crate) fn shared_clusters(&self) -> Arc<[GraphemeCluster]> {
        Arc::clone(&self.clusters)
    }

    pub fn text(&self) -> String {
        join_clusters(&self.clusters)
    }

    pub fn codepoint_count(&self) -> usize {
        self.clusters.iter().map(|c| c.code_points().count()).sum()
    }

    pub fn grapheme_count(&self) -> usize {
        self.clusters.len()
    }
}

impl Clusters for ProductionUnitDoc {
    fn clusters(&self) -> &[GraphemeCluster] {
        &self.clusters
    }
}

/// All production units named by a manifest, in manifest order.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub docs: Vec<ProductionUnitDoc>,
}

impl Corpus {
    pub fn new(docs: Vec<ProductionUnitDoc>) -> Self {
        Self { docs }
    }

    pub fn load(manifest: &Manifest, inventory: &BrevigraphInventory) -> Result<Self, CorpusError> {
        let docs = manifest
            .entries
            .par_iter()
            .map(|entry| {
                let path = manifest.resolve(entry);
                let bytes = std::fs::read(&path).map_err(|source| match source.kind() {
                    std::io::ErrorKind::NotFound => CorpusError::MissingFile(path.clone()),
                    _ => CorpusError::Io {
                        path: path.clone(),
                        source,
                    },
                })?;
                let raw = String::from_utf8(bytes).map_err(|_| CorpusError::InvalidUtf8(path))?;
                Ok(ProductionUnitDoc::from_raw(
                    entry.codex.clone(),
                    entry.unit.clone(),
                    entry.scribe.clone(),
                    entry.date_range(),
                    &raw,
                    inventory,
                ))
            })
            .collect::<Result<Vec<_>, CorpusError>>()?;
        Ok(Self { docs })
    }

    pub fn load_path(path: &Path, inventory: &BrevigraphInventory) -> Result<Self, CorpusError> {
        Self::load(&load_manifest(path)?, inventory)
    }

    /// Distinct scribe labels in first-seen order.
    pub fn scribes(&self) -> Vec<ScribeLabel> {
        let mut out: Vec<ScribeLabel> = Vec::new();
        for doc in &self.docs {
            if !out.contains(&doc.scribe) {
                out.push(doc.scribe.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_raw_cleans_and_classifies() {
        let inv = BrevigraphInventory::default();
        let doc = ProductionUnitDoc::from_raw(
            "C",
            "I",
            ScribeLabel::new("alpha").unwrap(),
            None,
            "eñ .\n dē ",
            &inv,
        );
        assert_eq!(doc.text(), "eñ dē");
        assert_eq!(doc.grapheme_count(), 5);
        assert!(doc
            .clusters()
            .iter()
            .all(|c| !c.as_str().chars().any(|ch| ch == '.')));
    }

    #[test]
    fn load_rejects_invalid_utf8() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("a.txt"), [0xffu8, 0xfe]).unwrap();
        std::fs::write(
            dir.path().join("m.json"),
            r#"[{"file": "a.txt", "codex": "C", "unit": "I", "scribe": "alpha"}]"#,
        )
        .unwrap();
        let err = Corpus::load_path(&dir.path().join("m.json"), &BrevigraphInventory::default())
            .unwrap_err();
        assert!(matches!(err, CorpusError::InvalidUtf8(_)));
    }
}
