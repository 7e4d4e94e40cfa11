//! In-tree learners: one-class SVM, random forest with MDI, nearest neighbours.

mod forest;
mod knn;
mod ocsvm;
pub mod seed;

pub use forest::{
    gini, rf_mdi, rf_train, ForestModel, ForestParams, MaxFeatures, Node, Tree,
    FOREST_FORMAT_VERSION,
};
pub use knn::knn_classify;
pub use ocsvm::{
    kernel_matrix, ocsvm_predict, ocsvm_train, rbf, solve_dual, DualSolution, Gamma, OcsvmModel,
    OcsvmParams, Verdict, MODEL_FORMAT_VERSION,
};
