//! Scribal profiling from diplomatic transcriptions.
//!
//! Grapheme-aware character statistics, abbreviation densities and a
//! brevigraph-bigram stylometry pipeline (TF-IDF, PCA, 2-D embeddings,
//! one-class SVM outlier detection, random-forest importances, kNN attribution).

pub mod analyze;
pub mod corpus;
pub mod error;
pub mod features;
pub mod learn;
pub mod metrics;
pub mod plot;
pub mod reduce;
pub mod segmentation;
pub mod synth;

pub use corpus::{
    clean_text, load_manifest, segment_graphemes, BrevigraphInventory, ClusterClass, Clusters,
    Corpus, CountMode, GraphemeCluster, Manifest, ManifestEntry, ProductionUnitDoc, ScribeLabel,
};
pub use error::{
    AnalysisError, CorpusError, Error, LearnError, MetricsError, ReduceError, Result, SynthError,
};
pub use features::{build_vocab, tfidf, vectorize, Bigram, FeatureMatrix, Vocabulary, Weighting};
pub use metrics::{
    abbreviation_density_chars, abbreviation_density_words, density_report, type_token_ratio,
    unique_characters, BoxStats, DensityLevel, DensityReport, GroupBy,
};
pub use reduce::{embed_2d, pca_fit_transform, EmbedMethod, EmbeddingResult, PcaModel};
pub use segmentation::{segment_corpus, segment_unit, Segment, SegmentId, DEFAULT_SEGMENT_SIZE};
pub use analyze::{
    attribute_segments, downsampled_scatter, importance_analysis, loo_outlier_analysis,
    pairwise_scatter, scatter_analysis, AggregateBy, Attribution, ImportanceParams,
    ImportanceReport, OutlierParams, OutlierReport, ScatterParams,
};
