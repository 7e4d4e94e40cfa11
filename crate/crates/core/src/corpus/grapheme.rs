use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_segmentation::UnicodeSegmentation;

use super::inventory::BrevigraphInventory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterClass {
    Letter,
    Brevigraph,
    Whitespace,
    Other,
}

/// One user-perceived character: an extended grapheme cluster with its class.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GraphemeCluster {
    text: Box<str>,
    class: ClusterClass,
}

impl GraphemeCluster {
    /// Classifies a single cluster. `text` must be non-empty.
    pub fn classify(text: &str, inventory: &BrevigraphInventory) -> Self {
        assert!(!text.is_empty(), "grapheme cluster cannot be empty");
        let class = if text.chars().any(|c| inventory.contains(c)) {
            ClusterClass::Brevigraph
        } else if text.chars().all(char::is_whitespace) {
            ClusterClass::Whitespace
        } else if text.chars().next().is_some_and(char::is_alphabetic) {
            ClusterClass::Letter
        } else {
            ClusterClass::Other
        };
        Self {
            text: text.into(),
            class,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn class(&self) -> ClusterClass {
        self.class
    }

    pub fn code_points(&self) -> impl Iterator<Item = char> + '_ {
        self.text.chars()
    }

    pub fn is_brevigraph(&self) -> bool {
        self.class == ClusterClass::Brevigraph
    }

    pub fn is_whitespace(&self) -> bool {
        self.class == ClusterClass::Whitespace
    }

    /// Letters and brevigraphs: the denominator of character-level density.
    pub fn is_letter_like(&self) -> bool {
        matches!(self.class, ClusterClass::Letter | ClusterClass::Brevigraph)
    }
}

impl fmt::Display for GraphemeCluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// Splits `text` into extended grapheme clusters and classifies each one.
pub fn segment_graphemes(text: &str, inventory: &BrevigraphInventory) -> Vec<GraphemeCluster> {
    text.graphemes(true)
        .map(|g| GraphemeCluster::classify(g, inventory))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Codepoint,
    Grapheme,
}

pub fn count_characters(text: &str, mode: CountMode) -> usize {
    match mode {
        CountMode::Codepoint => text.chars().count(),
        CountMode::Grapheme => text.graphemes(true).count(),
    }
}

/// Concatenates cluster text back into a string.
pub fn join_clusters(clusters: &[GraphemeCluster]) -> String {
    clusters.iter().map(GraphemeCluster::as_str).collect()
}
