use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::LearnError;
use crate::learn::seed::derive_seed;

pub const FOREST_FORMAT_VERSION: u32 = 1;
const LEAF: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaxFeatures {
    /// `ceil(sqrt(d))` candidate features per split.
    Sqrt,
    All,
    Count(usize),
}

impl MaxFeatures {
    fn resolve(&self, d: usize) -> usize {
        match *self {
            MaxFeatures::Sqrt => ((d as f64).sqrt().ceil() as usize).max(1),
            MaxFeatures::All => d,
            MaxFeatures::Count(c) => c.clamp(1, d.max(1)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub max_features: MaxFeatures,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestParams {
    fn default() -> Self {
        Self {
            n_trees: 200,
            max_depth: None,
            min_samples_split: 2,
            max_features: MaxFeatures::Sqrt,
            bootstrap: true,
            seed: 42,
        }
    }
}

/// One node of a binary classification tree. Leaves have `feature == usize::MAX`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub feature: usize,
    pub threshold: f64,
    pub impurity: f64,
    pub weight: f64,
    pub class_weights: [f64; 2],
    pub left: usize,
    pub right: usize,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.feature == LEAF
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_for(&self, x: &[f64]) -> &Node {
        let mut node = &self.nodes[0];
        while !node.is_leaf() {
            node = if x[node.feature] <= node.threshold {
                &self.nodes[node.left]
            } else {
                &self.nodes[node.right]
            };
        }
        node
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let leaf = self.leaf_for(x);
        leaf.class_weights[1] / leaf.weight
    }

    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.is_leaf() {
                0
            } else {
                1 + walk(nodes, n.left).max(walk(nodes, n.right))
            }
        }
        walk(&self.nodes, 0)
    }

    /// Weighted Gini decrease per feature, divided by the root weight.
    pub fn impurity_decrease(&self, d: usize) -> Vec<f64> {
        let mut out = vec![0.0; d];
        let root = self.nodes[0].weight;
        for n in &self.nodes {
            if n.is_leaf() {
                continue;
            }
            let (l, r) = (&self.nodes[n.left], &self.nodes[n.right]);
            out[n.feature] +=
                n.weight * n.impurity - l.weight * l.impurity - r.weight * r.impurity;
        }
        out.iter_mut().for_each(|v| *v /= root);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub version: u32,
    pub params: ForestParams,
    pub n_features: usize,
    pub trees: Vec<Tree>,
}

pub fn gini(class_weights: [f64; 2]) -> f64 {
    let total = class_weights[0] + class_weights[1];
    if total <= 0.0 {
        return 0.0;
    }
    let p0 = class_weights[0] / total;
    let p1 = class_weights[1] / total;
    1.0 - p0 * p0 - p1 * p1
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [bool],
    weights: Vec<f64>,
    params: &'a ForestParams,
    n_candidates: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

struct Split {
    feature: usize,
    threshold: f64,
    score: f64,
}

impl Builder<'_> {
    fn class_weights(&self, samples: &[usize]) -> [f64; 2] {
        let mut cw = [0.0; 2];
        for &s in samples {
            cw[self.labels[s] as usize] += self.weights[s];
        }
        cw
    }

    fn best_split(&mut self, samples: &[usize]) -> Option<Split> {
        let d = self.rows[0].len();
        let mut features: Vec<usize> = (0..d).collect();
        features.shuffle(&mut self.rng);
        let mut evaluated = 0;
        let mut best: Option<Split> = None;
        let mut sorted = samples.to_vec();
        for f in features {
            if evaluated >= self.n_candidates {
                break;
            }
            let first = self.rows[samples[0]][f];
            if samples.iter().all(|&s| self.rows[s][f] == first) {
                continue;
            }
            evaluated += 1;
            sorted.sort_by(|&a, &b| self.rows[a][f].total_cmp(&self.rows[b][f]).then(a.cmp(&b)));
            let total = self.class_weights(&sorted);
            let mut left = [0.0; 2];
            for w in 0..sorted.len() - 1 {
                let s = sorted[w];
                left[self.labels[s] as usize] += self.weights[s];
                let (lo, hi) = (self.rows[s][f], self.rows[sorted[w + 1]][f]);
                if lo == hi {
                    continue;
                }
                let right = [total[0] - left[0], total[1] - left[1]];
                let score = (left[0] + left[1]) * gini(left) + (right[0] + right[1]) * gini(right);
                if best.as_ref().is_none_or(|b| score < b.score) {
                    let mut threshold = lo + (hi - lo) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some(Split {
                        feature: f,
                        threshold,
                        score,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> usize {
        let cw = self.class_weights(&samples);
        let idx = self.nodes.len();
        self.nodes.push(Node {
            feature: LEAF,
            threshold: 0.0,
            impurity: gini(cw),
            weight: cw[0] + cw[1],
            class_weights: cw,
            left: LEAF,
            right: LEAF,
        });
        let pure = cw[0] == 0.0 || cw[1] == 0.0;
        let depth_reached = self.params.max_depth.is_some_and(|m| depth >= m);
        if pure || depth_reached || samples.len() < self.params.min_samples_split {
            return idx;
        }
        let Some(split) = self.best_split(&samples) else {
            return idx;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&s| self.rows[s][split.feature] <= split.threshold);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        let node = &mut self.nodes[idx];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        idx
    }
}

fn grow_tree(rows: &[Vec<f64>], labels: &[bool], params: &ForestParams, tree_seed: u64) -> Tree {
    let n = rows.len();
    let mut rng = ChaCha8Rng::seed_from_u64(tree_seed);
    let mut weights = vec![0.0; n];
    if params.bootstrap {
        for _ in 0..n {
            weights[rng.random_range(0..n)] += 1.0;
        }
    } else {
        weights.iter_mut().for_each(|w| *w = 1.0);
    }
    let samples: Vec<usize> = (0..n).filter(|&i| weights[i] > 0.0).collect();
    let mut builder = Builder {
        rows,
        labels,
        weights,
        params,
        n_candidates: params.max_features.resolve(rows[0].len()),
        rng,
        nodes: Vec::new(),
    };
    builder.grow(samples, 0);
    Tree {
        nodes: builder.nodes,
    }
}

/// Trains a binary random forest with Gini splits on bootstrap samples.
/// Tree `t` draws from its own stream seeded by `(seed, t)`, so the result
/// does not depend on the number of worker threads.
pub fn rf_train(rows: &[Vec<f64>], labels: &[bool], params: &ForestParams) -> Result<ForestModel, LearnError> {
    if rows.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    if rows.len() != labels.len() {
        return Err(LearnError::DimensionMismatch {
            expected: rows.len(),
            got: labels.len(),
        });
    }
    let d = rows[0].len();
    if let Some(r) = rows.iter().find(|r| r.len() != d) {
        return Err(LearnError::DimensionMismatch { expected: d, got: r.len() });
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(LearnError::NonFiniteInput);
    }
    if labels.iter().all(|&l| l) || labels.iter().all(|&l| !l) {
        return Err(LearnError::SingleClassInput);
    }
    if params.n_trees == 0 || params.min_samples_split < 2 {
        return Err(LearnError::BadHyperparameter(
            "n_trees must be positive and min_samples_split at least 2".into(),
        ));
    }
    let trees = (0..params.n_trees)
        .into_par_iter()
        .map(|t| grow_tree(rows, labels, params, derive_seed(params.seed, t as u64)))
        .collect();
    Ok(ForestModel {
        version: FOREST_FORMAT_VERSION,
        params: *params,
        n_features: d,
        trees,
    })
}

impl ForestModel {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> bool {
        self.predict_proba(x) > 0.5
    }

    pub fn accuracy(&self, rows: &[Vec<f64>], labels: &[bool]) -> f64 {
        let hits = rows
            .iter()
            .zip(labels)
            .filter(|(r, &l)| self.predict(r) == l)
            .count();
        hits as f64 / rows.len() as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("forest serializes")
    }

    pub fn from_json(json: &str) -> Result<Self, LearnError> {
        let model: Self = serde_json::from_str(json)
            .map_err(|e| LearnError::BadHyperparameter(format!("invalid model json: {e}")))?;
        if model.version != FOREST_FORMAT_VERSION {
            return Err(LearnError::UnsupportedVersion(model.version));
        }
        Ok(model)
    }
}

/// Mean decrease in impurity, normalized per tree and again over the forest.
pub fn rf_mdi(forest: &ForestModel) -> Vec<f64> {
    let d = forest.n_features;
    let mut total = vec![0.0; d];
    for tree in &forest.trees {
        let mut imp = tree.impurity_decrease(d);
        let sum: f64 = imp.iter().sum();
        if sum > 0.0 {
            imp.iter_mut().for_each(|v| *v /= sum);
            for (t, v) in total.iter_mut().zip(imp) {
                *t += v;
            }
        }
    }
    let sum: f64 = total.iter().sum();
    if sum > 0.0 {
        total.iter_mut().for_each(|v| *v /= sum);
    }
    total
}
