use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ReduceError;
use crate::segmentation::SegmentId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedMethod {
    /// The first two input dimensions (PCA scores are already ordered).
    Pca2d,
    /// Seeded k-nearest-neighbour graph layout with negative sampling.
    Neighbor,
}

impl fmt::Display for EmbedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmbedMethod::Pca2d => "pca2d",
            EmbedMethod::Neighbor => "neighbor",
        })
    }
}

impl FromStr for EmbedMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pca2d" => Ok(EmbedMethod::Pca2d),
            "neighbor" | "umap" => Ok(EmbedMethod::Neighbor),
            other => Err(format!("unknown embedding method {other:?}")),
        }
    }
}

/// Hyperparameters of the neighbour embedding. The attraction/repulsion
/// curve `1 / (1 + a d^2b)` uses the usual values for a minimum distance of 0.1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeighborParams {
    pub n_neighbors: usize,
    pub n_epochs: usize,
    pub learning_rate: f64,
    pub negative_sample_rate: usize,
    pub a: f64,
    pub b: f64,
}

impl Default for NeighborParams {
    fn default() -> Self {
        Self {
            n_neighbors: 15,
            n_epochs: 500,
            learning_rate: 1.0,
            negative_sample_rate: 5,
            a: 1.576_943_460_405_378,
            b: 0.895_060_878_123_700_3,
        }
    }
}

/// Two-dimensional coordinates with per-row segment metadata.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddingResult {
    pub coords: Vec<[f64; 2]>,
    pub labels: Vec<SegmentId>,
    pub method: EmbedMethod,
    pub seed: u64,
}

impl EmbeddingResult {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["x", "y", "scribe", "codex", "unit", "segment"])?;
        for (c, l) in self.coords.iter().zip(&self.labels) {
            w.write_record([
                c[0].to_string(),
                c[1].to_string(),
                l.scribe.to_string(),
                l.codex.clone(),
                l.unit.clone(),
                l.index.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }
}

pub fn embed_2d(
    scores: &[Vec<f64>],
    method: EmbedMethod,
    seed: u64,
) -> Result<Vec<[f64; 2]>, ReduceError> {
    embed_2d_with(scores, method, seed, &NeighborParams::default())
}

pub fn embed_2d_with(
    scores: &[Vec<f64>],
    method: EmbedMethod,
    seed: u64,
    params: &NeighborParams,
) -> Result<Vec<[f64; 2]>, ReduceError> {
    let d = scores.first().map_or(0, Vec::len);
    if scores.iter().any(|r| r.len() != d) {
        return Err(ReduceError::DegenerateInput("rows have unequal length".into()));
    }
    if scores.iter().flatten().any(|v| !v.is_finite()) {
        return Err(ReduceError::DegenerateInput("non-finite value".into()));
    }
    match method {
        EmbedMethod::Pca2d => {
            if scores.is_empty() || d == 0 {
                return Err(ReduceError::DegenerateInput("pca2d needs at least one row and column".into()));
            }
            Ok(scores
                .iter()
                .map(|r| [r[0], r.get(1).copied().unwrap_or(0.0)])
                .collect())
        }
        EmbedMethod::Neighbor => {
            if scores.len() < 3 {
                return Err(ReduceError::DegenerateInput(format!(
                    "neighbor embedding needs at least 3 rows, got {}",
                    scores.len()
                )));
            }
            Ok(neighbor_embedding(scores, seed, params))
        }
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Fuzzy k-NN membership strengths, symmetrized with the probabilistic t-conorm.
fn neighbor_graph(rows: &[&[f64]], k: usize) -> Vec<(usize, usize, f64)> {
    let n = rows.len();
    let target = (k as f64).log2();
    let directed: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut dists: Vec<(usize, f64)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (j, sq_dist(rows[i], rows[j]).sqrt()))
                .collect();
            dists.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            dists.truncate(k);
            let rho = dists.iter().map(|d| d.1).find(|&d| d > 0.0).unwrap_or(0.0);
            let membership = |sigma: f64| -> f64 {
                dists
                    .iter()
                    .map(|&(_, d)| (-((d - rho).max(0.0)) / sigma).exp())
                    .sum()
            };
            let (mut lo, mut hi, mut sigma) = (0.0, f64::INFINITY, 1.0);
            for _ in 0..64 {
                let s = membership(sigma);
                if (s - target).abs() < 1e-5 {
                    break;
                }
                if s > target {
                    hi = sigma;
                    sigma = (lo + hi) / 2.0;
                } else {
                    lo = sigma;
                    sigma = if hi.is_infinite() { sigma * 2.0 } else { (lo + hi) / 2.0 };
                }
            }
            let sigma = sigma.max(1e-3 * mean_dist(&dists));
            dists
                .into_iter()
                .map(|(j, d)| (j, (-((d - rho).max(0.0)) / sigma.max(f64::MIN_POSITIVE)).exp()))
                .collect()
        })
        .collect();

    let mut weights = std::collections::BTreeMap::new();
    for (i, nbrs) in directed.iter().enumerate() {
        for &(j, w) in nbrs {
            let key = (i.min(j), i.max(j));
            let entry = weights.entry(key).or_insert((0.0, 0.0));
            if i < j {
                entry.0 = w;
            } else {
                entry.1 = w;
            }
        }
    }
    weights
        .into_iter()
        .map(|((i, j), (a, b))| (i, j, a + b - a * b))
        .filter(|&(_, _, w)| w > 0.0)
        .collect()
}

fn mean_dist(dists: &[(usize, f64)]) -> f64 {
    if dists.is_empty() {
        return 1.0;
    }
    let m = dists.iter().map(|d| d.1).sum::<f64>() / dists.len() as f64;
    if m > 0.0 {
        m
    } else {
        1.0
    }
}

fn clip(v: f64) -> f64 {
    v.clamp(-4.0, 4.0)
}

/// Rows are processed in a canonical (lexicographic) order and the layout is
/// mapped back afterwards, so permuting distinct input rows permutes the output.
fn neighbor_embedding(scores: &[Vec<f64>], seed: u64, params: &NeighborParams) -> Vec<[f64; 2]> {
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| lexicographic(&scores[a], &scores[b]));
    let rows: Vec<&[f64]> = order.iter().map(|&i| scores[i].as_slice()).collect();

    let k = params.n_neighbors.min(n - 1).max(1);
    let edges = neighbor_graph(&rows, k);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // initial layout: first two input dimensions rescaled to [0, 10]
    let mut pos: Vec<[f64; 2]> = rows
        .iter()
        .map(|r| [r[0], r.get(1).copied().unwrap_or(0.0)])
        .collect();
    for axis in 0..2 {
        let (lo, hi) = pos
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[axis]), hi.max(p[axis])));
        let span = if hi > lo { hi - lo } else { 1.0 };
        for p in &mut pos {
            p[axis] = 10.0 * (p[axis] - lo) / span + rng.random_range(-1e-4..1e-4);
        }
    }

    if edges.is_empty() {
        return unpermute(&order, &pos);
    }
    let max_w = edges.iter().map(|e| e.2).fold(0.0, f64::max);
    let epochs_per_sample: Vec<f64> = edges.iter().map(|e| max_w / e.2).collect();
    let neg_rate = params.negative_sample_rate.max(1) as f64;
    let epochs_per_negative: Vec<f64> = epochs_per_sample.iter().map(|e| e / neg_rate).collect();
    let mut next_sample = epochs_per_sample.clone();
    let mut next_negative = epochs_per_negative.clone();
    let (a, b) = (params.a, params.b);

    for epoch in 0..params.n_epochs {
        let alpha = params.learning_rate * (1.0 - epoch as f64 / params.n_epochs as f64);
        let t = epoch as f64;
        for (e, &(head, tail, _)) in edges.iter().enumerate() {
            if next_sample[e] > t {
                continue;
            }
            let d2 = sq_dist(&pos[head], &pos[tail]);
            if d2 > 0.0 {
                let coef = -2.0 * a * b * d2.powf(b - 1.0) / (1.0 + a * d2.powf(b));
                for axis in 0..2 {
                    let g = clip(coef * (pos[head][axis] - pos[tail][axis])) * alpha;
                    pos[head][axis] += g;
                    pos[tail][axis] -= g;
                }
            }
            next_sample[e] += epochs_per_sample[e];

            let n_neg = ((t - next_negative[e]) / epochs_per_negative[e]).floor().max(0.0) as usize;
            for _ in 0..n_neg {
                let other = rng.random_range(0..n);
                if other == head {
                    continue;
                }
                let d2 = sq_dist(&pos[head], &pos[other]);
                let coef = if d2 > 0.0 {
                    2.0 * b / ((0.001 + d2) * (1.0 + a * d2.powf(b)))
                } else {
                    0.0
                };
                for axis in 0..2 {
                    let g = if coef > 0.0 {
                        clip(coef * (pos[head][axis] - pos[other][axis]))
                    } else {
                        4.0
                    };
                    pos[head][axis] += g * alpha;
                }
            }
            next_negative[e] += n_neg as f64 * epochs_per_negative[e];
        }
    }
    unpermute(&order, &pos)
}

fn unpermute(order: &[usize], pos: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut out = vec![[0.0; 2]; pos.len()];
    for (sorted_idx, &orig) in order.iter().enumerate() {
        out[orig] = pos[sorted_idx];
    }
    out
}
