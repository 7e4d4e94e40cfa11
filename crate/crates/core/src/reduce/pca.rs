use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::ReduceError;

pub const DEFAULT_PCA_DIMS: usize = 25;

/// Principal axes fitted on mean-centred data.
///
/// Components are unit-norm rows, ordered by decreasing explained variance
/// (sample variance, `n - 1` denominator). Each component's sign is chosen so
/// that its largest-magnitude loading is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Vec<Vec<f64>>,
    pub explained_variance: Vec<f64>,
    pub total_variance: f64,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn transform_row(&self, x: &[f64]) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                c.iter()
                    .zip(x.iter().zip(&self.mean))
                    .map(|(w, (v, m))| w * (v - m))
                    .sum()
            })
            .collect()
    }

    pub fn transform(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }

    pub fn inverse_transform_row(&self, scores: &[f64]) -> Vec<f64> {
        let mut out = self.mean.clone();
        for (s, c) in scores.iter().zip(&self.components) {
            for (o, w) in out.iter_mut().zip(c) {
                *o += s * w;
            }
        }
        out
    }

    pub fn explained_variance_ratio(&self) -> Vec<f64> {
        self.explained_variance
            .iter()
            .map(|v| if self.total_variance > 0.0 { v / self.total_variance } else { 0.0 })
            .collect()
    }
}

fn check_rows(rows: &[Vec<f64>]) -> Result<usize, ReduceError> {
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(ReduceError::DegenerateInput("rows have unequal length".into()));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ReduceError::DegenerateInput("non-finite value".into()));
    }
    Ok(d)
}

/// Fits `k` principal components and returns the model with the n-by-k scores.
pub fn pca_fit_transform(
    rows: &[Vec<f64>],
    k: usize,
) -> Result<(PcaModel, Vec<Vec<f64>>), ReduceError> {
    let n = rows.len();
    if n < 2 {
        return Err(ReduceError::DegenerateInput(format!("PCA needs at least 2 rows, got {n}")));
    }
    let d = check_rows(rows)?;
    let max_k = (n - 1).min(d);
    if k == 0 || k > max_k {
        return Err(ReduceError::DegenerateInput(format!(
            "k = {k} outside 1..={max_k} for a {n}x{d} matrix"
        )));
    }

    let mut mean = vec![0.0; d];
    for r in rows {
        for (m, v) in mean.iter_mut().zip(r) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let centered = DMatrix::from_fn(n, d, |i, j| rows[i][j] - mean[j]);
    let cov = (centered.transpose() * &centered) / (n as f64 - 1.0);
    let total_variance = cov.trace();
    let eig = SymmetricEigen::new(cov);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = Vec::with_capacity(k);
    let mut explained_variance = Vec::with_capacity(k);
    for &idx in order.iter().take(k) {
        let mut axis: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
        let mut pivot = 0;
        for (j, v) in axis.iter().enumerate() {
            if v.abs() > axis[pivot].abs() {
                pivot = j;
            }
        }
        if axis[pivot] < 0.0 {
            axis.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(axis);
        explained_variance.push(eig.eigenvalues[idx].max(0.0));
    }

    let model = PcaModel {
        mean,
        components,
        explained_variance,
        total_variance,
    };
    let scores = model.transform(rows);
    Ok((model, scores))
}
