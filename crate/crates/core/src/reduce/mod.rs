//! Dimensionality reduction: PCA and 2-D projections for scatterplots.

mod embed;
mod pca;

pub use embed::{embed_2d, embed_2d_with, EmbedMethod, EmbeddingResult, NeighborParams};
pub use pca::{pca_fit_transform, PcaModel, DEFAULT_PCA_DIMS};
