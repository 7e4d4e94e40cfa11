use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::LearnError;

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// RBF width. `Scale` resolves to `1 / (d * var(X))` over all entries of the
/// training matrix, falling back to 1 when the matrix is constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gamma {
    Scale,
    Value(f64),
}

impl Gamma {
    pub fn resolve(&self, rows: &[Vec<f64>]) -> f64 {
        match *self {
            Gamma::Value(g) => g,
            Gamma::Scale => {
                let d = rows.first().map_or(0, Vec::len);
                let n = (rows.len() * d) as f64;
                if n == 0.0 {
                    return 1.0;
                }
                let mean = rows.iter().flatten().sum::<f64>() / n;
                let var = rows.iter().flatten().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                if var > 0.0 {
                    1.0 / (d as f64 * var)
                } else {
                    1.0
                }
            }
        }
    }
}

impl fmt::Display for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Scale => f.write_str("scale"),
            Gamma::Value(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for Gamma {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "scale" {
            return Ok(Gamma::Scale);
        }
        s.parse::<f64>()
            .ok()
            .filter(|g| g.is_finite() && *g > 0.0)
            .map(Gamma::Value)
            .ok_or_else(|| format!("gamma must be \"scale\" or a positive number, got {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcsvmParams {
    pub nu: f64,
    pub gamma: Gamma,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for OcsvmParams {
    fn default() -> Self {
        Self {
            nu: 0.1,
            gamma: Gamma::Scale,
            tol: 1e-4,
            max_iter: 10_000,
        }
    }
}

/// A trained one-class SVM with an RBF kernel.
///
/// Dual coefficients live on the scaled simplex: each is in `(0, 1/(nu n)]`
/// and they sum to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OcsvmModel {
    pub version: u32,
    pub support_vectors: Vec<Vec<f64>>,
    pub dual_coefs: Vec<f64>,
    pub support_indices: Vec<usize>,
    pub rho: f64,
    pub gamma: f64,
    pub nu: f64,
    pub n_train: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[inline]
pub fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * d2).exp()
}

fn validate(rows: &[Vec<f64>]) -> Result<usize, LearnError> {
    let d = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != d) {
        return Err(LearnError::DimensionMismatch {
            expected: d,
            got: rows.iter().map(Vec::len).find(|&l| l != d).unwrap_or(d),
        });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(LearnError::NonFiniteInput);
    }
    Ok(d)
}

/// Result of the dual solver on a precomputed kernel matrix.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    pub rho: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `0.5 a'Ka` over `0 <= a_i <= 1/(nu n)`, `sum a = 1` with
/// sequential minimal optimization and second-order working-set selection.
pub fn solve_dual(kernel: &[Vec<f64>], nu: f64, tol: f64, max_iter: usize) -> DualSolution {
    let n = kernel.len();
    let ub = 1.0 / (nu * n as f64);

    let mut alpha = vec![0.0; n];
    let mut remaining: f64 = 1.0;
    for a in alpha.iter_mut() {
        let v = remaining.min(ub);
        *a = v;
        remaining -= v;
        if remaining <= 0.0 {
            break;
        }
    }
    let mut grad: Vec<f64> = (0..n)
        .map(|t| (0..n).map(|s| kernel[t][s] * alpha[s]).sum())
        .collect();

    let at_upper = |a: f64| a >= ub * (1.0 - 1e-12);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        // i: steepest feasible ascent direction for alpha_i
        let mut i = usize::MAX;
        let mut g_max = f64::NEG_INFINITY;
        for t in 0..n {
            if !at_upper(alpha[t]) && -grad[t] > g_max {
                g_max = -grad[t];
                i = t;
            }
        }
        let mut g_min = f64::INFINITY;
        let mut j = usize::MAX;
        let mut best = f64::INFINITY;
        for t in 0..n {
            if alpha[t] <= 0.0 {
                continue;
            }
            g_min = g_min.min(-grad[t]);
            if i == usize::MAX {
                continue;
            }
            let b = g_max + grad[t];
            if b > 0.0 {
                let a = (kernel[i][i] + kernel[t][t] - 2.0 * kernel[i][t]).max(1e-12);
                let score = -(b * b) / a;
                if score < best {
                    best = score;
                    j = t;
                }
            }
        }
        if i == usize::MAX || j == usize::MAX || g_max - g_min < tol {
            converged = true;
            break;
        }
        let curvature = (kernel[i][i] + kernel[j][j] - 2.0 * kernel[i][j]).max(1e-12);
        let mut delta = (grad[j] - grad[i]) / curvature;
        delta = delta.min(ub - alpha[i]).min(alpha[j]);
        if delta <= 0.0 {
            converged = true;
            break;
        }
        alpha[i] += delta;
        alpha[j] -= delta;
        if alpha[j] < 1e-15 {
            alpha[j] = 0.0;
        }
        for t in 0..n {
            grad[t] += delta * (kernel[t][i] - kernel[t][j]);
        }
        iterations += 1;
    }

    // rho: gradient on free variables; otherwise the midpoint of the feasible interval
    let free: Vec<f64> = (0..n)
        .filter(|&t| alpha[t] > 0.0 && !at_upper(alpha[t]))
        .map(|t| grad[t])
        .collect();
    let rho = if !free.is_empty() {
        free.iter().sum::<f64>() / free.len() as f64
    } else {
        let lower = (0..n)
            .filter(|&t| at_upper(alpha[t]))
            .map(|t| grad[t])
            .fold(f64::NEG_INFINITY, f64::max);
        let upper = (0..n)
            .filter(|&t| alpha[t] <= 0.0)
            .map(|t| grad[t])
            .fold(f64::INFINITY, f64::min);
        match (lower.is_finite(), upper.is_finite()) {
            (true, true) => (lower + upper) / 2.0,
            (true, false) => lower,
            (false, true) => upper,
            (false, false) => 0.0,
        }
    };
    DualSolution {
        alpha,
        rho,
        iterations,
        converged,
    }
}

pub fn kernel_matrix(rows: &[Vec<f64>], gamma: f64) -> Vec<Vec<f64>> {
    (0..rows.len())
        .into_par_iter()
        .map(|i| rows.iter().map(|r| rbf(&rows[i], r, gamma)).collect())
        .collect()
}

pub fn ocsvm_train(rows: &[Vec<f64>], params: &OcsvmParams) -> Result<OcsvmModel, LearnError> {
    if !(params.nu > 0.0 && params.nu <= 1.0) {
        return Err(LearnError::BadHyperparameter(format!("nu = {} not in (0, 1]", params.nu)));
    }
    if let Gamma::Value(g) = params.gamma {
        if !(g.is_finite() && g > 0.0) {
            return Err(LearnError::BadHyperparameter(format!("gamma = {g} must be positive")));
        }
    }
    if rows.len() < 2 {
        return Err(LearnError::BadHyperparameter(format!(
            "one-class SVM needs at least 2 rows, got {}",
            rows.len()
        )));
    }
    validate(rows)?;
    let gamma = params.gamma.resolve(rows);
    let kernel = kernel_matrix(rows, gamma);
    let sol = solve_dual(&kernel, params.nu, params.tol, params.max_iter);

    let support_indices: Vec<usize> = (0..rows.len()).filter(|&i| sol.alpha[i] > 0.0).collect();
    Ok(OcsvmModel {
        version: MODEL_FORMAT_VERSION,
        support_vectors: support_indices.iter().map(|&i| rows[i].clone()).collect(),
        dual_coefs: support_indices.iter().map(|&i| sol.alpha[i]).collect(),
        support_indices,
        rho: sol.rho,
        gamma,
        nu: params.nu,
        n_train: rows.len(),
        iterations: sol.iterations,
        converged: sol.converged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Inlier,
    Outlier,
}

impl Verdict {
    pub fn sign(&self) -> i8 {
        match self {
            Verdict::Inlier => 1,
            Verdict::Outlier => -1,
        }
    }
}

impl OcsvmModel {
    pub fn dim(&self) -> usize {
        self.support_vectors.first().map_or(0, Vec::len)
    }

    pub fn decision_value(&self, x: &[f64]) -> f64 {
        self.support_vectors
            .iter()
            .zip(&self.dual_coefs)
            .map(|(sv, a)| a * rbf(sv, x, self.gamma))
            .sum::<f64>()
            - self.rho
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, LearnError> {
        let model: Self = serde_json::from_str(json)
            .map_err(|e| LearnError::BadHyperparameter(format!("invalid model json: {e}")))?;
        if model.version != MODEL_FORMAT_VERSION {
            return Err(LearnError::UnsupportedVersion(model.version));
        }
        Ok(model)
    }
}

/// Labels each row and returns the decision values. A decision value of
/// exactly zero counts as an inlier.
pub fn ocsvm_predict(
    model: &OcsvmModel,
    rows: &[Vec<f64>],
) -> Result<(Vec<Verdict>, Vec<f64>), LearnError> {
    let d = model.dim();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(LearnError::DimensionMismatch {
            expected: d,
            got: r.len(),
        });
    }
    let values: Vec<f64> = rows.iter().map(|r| model.decision_value(r)).collect();
    let verdicts = values
        .iter()
        .map(|&v| if v >= 0.0 { Verdict::Inlier } else { Verdict::Outlier })
        .collect();
    Ok((verdicts, values))
}
