//! End-to-end workflows: scatterplots, leave-one-unit-out outlier detection,
//! random-forest feature importances and nearest-neighbour attribution.
//!
//! Every workflow takes already segmented text and refits the vocabulary on
//! the subset it works with.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, ScribeLabel};
use crate::error::{AnalysisError, MetricsError, ReduceError};
use crate::features::{build_vocab, tfidf, vectorize, FeatureMatrix, DEFAULT_TOP_K};
use crate::learn::seed::derive_seed_for;
use crate::learn::{
    knn_classify, ocsvm_predict, ocsvm_train, rf_mdi, rf_train, ForestParams, OcsvmParams, Verdict,
};
use crate::metrics::{mean, pooled_type_token_ratio, pooled_unique_characters, BoxStats};
use crate::reduce::{
    embed_2d_with, pca_fit_transform, EmbedMethod, EmbeddingResult, NeighborParams, DEFAULT_PCA_DIMS,
};
use crate::segmentation::{segment_unit, Segment};

pub const DEFAULT_MIN_SEGMENTS: usize = 10;

/// Settings shared by the scatterplot workflows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterParams {
    pub top_k: usize,
    pub pca_k: usize,
    pub method: EmbedMethod,
    pub neighbor: NeighborParams,
    pub seed: u64,
}

impl Default for ScatterParams {
    fn default() -> Self {
        Self {
            top_k: DEFAULT_TOP_K,
            pca_k: DEFAULT_PCA_DIMS,
            method: EmbedMethod::Pca2d,
            neighbor: NeighborParams::default(),
            seed: 42,
        }
    }
}

/// Fits a brevigraph-bigram vocabulary on `segments` and returns their
/// TF-IDF rows.
pub fn featurize(segments: &[Segment], top_k: usize) -> Result<FeatureMatrix, AnalysisError> {
    let vocab = build_vocab(segments, top_k);
    if vocab.is_empty() {
        return Err(AnalysisError::EmptyVocabulary);
    }
    Ok(tfidf(&vectorize(segments, &vocab)))
}

/// PCA to at most `pca_k` components, then the 2-D projection.
pub fn project(matrix: &FeatureMatrix, params: &ScatterParams) -> Result<EmbeddingResult, AnalysisError> {
    let n = matrix.n_rows();
    let k = params.pca_k.min(n.saturating_sub(1)).min(matrix.n_cols());
    if k == 0 {
        return Err(ReduceError::DegenerateInput(format!(
            "cannot project {n} rows with {} features",
            matrix.n_cols()
        ))
        .into());
    }
    let (_, scores) = pca_fit_transform(&matrix.to_rows(), k)?;
    let coords = embed_2d_with(&scores, params.method, params.seed, &params.neighbor)?;
    Ok(EmbeddingResult {
        coords,
        labels: matrix.rows.clone(),
        method: params.method,
        seed: params.seed,
    })
}

fn count_by_scribe(segments: &[Segment]) -> Vec<(ScribeLabel, usize)> {
    let mut counts: Vec<(ScribeLabel, usize)> = Vec::new();
    for s in segments {
        match counts.iter_mut().find(|(l, _)| l == s.scribe()) {
            Some((_, c)) => *c += 1,
            None => counts.push((s.scribe().clone(), 1)),
        }
    }
    counts
}

/// Scribes with at least `min_segments` segments, in first-seen order.
pub fn eligible_scribes(segments: &[Segment], min_segments: usize) -> Vec<ScribeLabel> {
    count_by_scribe(segments)
        .into_iter()
        .filter(|(_, c)| *c >= min_segments)
        .map(|(l, _)| l)
        .collect()
}

/// Drops scribes with fewer than `min_segments` segments and embeds the rest.
pub fn scatter_analysis(
    segments: &[Segment],
    min_segments: usize,
    params: &ScatterParams,
) -> Result<EmbeddingResult, AnalysisError> {
    let keep = eligible_scribes(segments, min_segments);
    if keep.len() < 2 {
        return Err(AnalysisError::InsufficientScribes { min_segments });
    }
    let retained: Vec<Segment> = segments
        .iter()
        .filter(|s| keep.contains(s.scribe()))
        .cloned()
        .collect();
    project(&featurize(&retained, params.top_k)?, params)
}

fn check_distinct(labels: &[ScribeLabel]) -> Result<(), AnalysisError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(AnalysisError::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

/// Scatter restricted to two scribes.
pub fn pairwise_scatter(
    segments: &[Segment],
    scribes: [&ScribeLabel; 2],
    params: &ScatterParams,
) -> Result<EmbeddingResult, AnalysisError> {
    let labels = [scribes[0].clone(), scribes[1].clone()];
    check_distinct(&labels)?;
    let retained: Vec<Segment> = segments
        .iter()
        .filter(|s| labels.contains(s.scribe()))
        .cloned()
        .collect();
    for l in &labels {
        if !retained.iter().any(|s| s.scribe() == l) {
            return Err(AnalysisError::NotEnoughSegments {
                label: l.to_string(),
                available: 0,
                requested: 1,
            });
        }
    }
    project(&featurize(&retained, params.top_k)?, params)
}

/// Draws `n_per_scribe` segments per label without replacement. Each label
/// gets its own stream derived from `seed` and the label, so adding a label
/// leaves the other samples unchanged. Sampled segments keep corpus order.
pub fn downsample(
    segments: &[Segment],
    labels: &[ScribeLabel],
    n_per_scribe: usize,
    seed: u64,
) -> Result<Vec<Segment>, AnalysisError> {
    check_distinct(labels)?;
    let mut out = Vec::with_capacity(labels.len() * n_per_scribe);
    for label in labels {
        let pool: Vec<&Segment> = segments.iter().filter(|s| s.scribe() == label).collect();
        if pool.len() < n_per_scribe {
            return Err(AnalysisError::NotEnoughSegments {
                label: label.to_string(),
                available: pool.len(),
                requested: n_per_scribe,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed_for(seed, label.as_str()));
        let mut picked = rand::seq::index::sample(&mut rng, pool.len(), n_per_scribe).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| pool[i].clone()));
    }
    Ok(out)
}

pub fn downsampled_scatter(
    segments: &[Segment],
    labels: &[ScribeLabel],
    n_per_scribe: usize,
    params: &ScatterParams,
) -> Result<EmbeddingResult, AnalysisError> {
    let sample = downsample(segments, labels, n_per_scribe, params.seed)?;
    project(&featurize(&sample, params.top_k)?, params)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateBy {
    Unit,
    Codex,
}

impl std::str::FromStr for AggregateBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unit" => Ok(Self::Unit),
            "codex" => Ok(Self::Codex),
            other => Err(format!("unknown aggregation {other:?}; expected unit or codex")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutlierParams {
    pub ocsvm: OcsvmParams,
    pub top_k: usize,
}

impl Default for OutlierParams {
    fn default() -> Self {
        Self {
            ocsvm: OcsvmParams::default(),
            top_k: DEFAULT_TOP_K,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierRow {
    pub codex_id: String,
    /// `None` for codex-level aggregates.
    pub unit_id: Option<String>,
    pub n_segments: usize,
    pub n_inliers: usize,
    pub n_outliers: usize,
    pub outlier_fraction: f64,
}

impl OutlierRow {
    fn new(codex_id: String, unit_id: Option<String>, n_inliers: usize, n_outliers: usize) -> Self {
        let n = n_inliers + n_outliers;
        Self {
            codex_id,
            unit_id,
            n_segments: n,
            n_inliers,
            n_outliers,
            outlier_fraction: if n == 0 { 0.0 } else { n_outliers as f64 / n as f64 },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutlierReport {
    pub scribe: ScribeLabel,
    pub aggregated_by: AggregateBy,
    pub rows: Vec<OutlierRow>,
    /// Always at unit level; `rows` sums these when aggregating by codex.
    pub unit_rows: Vec<OutlierRow>,
    pub params: OutlierParams,
}

impl OutlierReport {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["scribe", "codex", "unit", "n_segments", "n_inliers", "n_outliers", "outlier_fraction"])?;
        for r in &self.rows {
            w.write_record([
                self.scribe.to_string(),
                r.codex_id.clone(),
                r.unit_id.clone().unwrap_or_default(),
                r.n_segments.to_string(),
                r.n_inliers.to_string(),
                r.n_outliers.to_string(),
                r.outlier_fraction.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }

    pub fn row(&self, codex: &str, unit: Option<&str>) -> Option<&OutlierRow> {
        let rows = if unit.is_some() { &self.unit_rows } else { &self.rows };
        rows.iter()
            .find(|r| r.codex_id == codex && r.unit_id.as_deref() == unit)
    }
}

/// Production units of `segments` in first-seen order, as index lists.
fn group_units(segments: &[Segment]) -> Vec<((String, String), Vec<usize>)> {
    let mut groups: Vec<((String, String), Vec<usize>)> = Vec::new();
    let mut pos: HashMap<(&str, &str), usize> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        let key = (s.codex(), s.unit());
        match pos.get(&key) {
            Some(&g) => groups[g].1.push(i),
            None => {
                pos.insert(key, groups.len());
                groups.push(((key.0.to_string(), key.1.to_string()), vec![i]));
            }
        }
    }
    groups
}

/// For each production unit, trains a one-class SVM on the scribe's other
/// units and labels the held-out segments. The vocabulary and IDF weights are
/// fitted once on all of the scribe's segments.
pub fn loo_outlier_analysis(
    segments: &[Segment],
    params: &OutlierParams,
    aggregate_by: AggregateBy,
) -> Result<OutlierReport, AnalysisError> {
    let scribe = match count_by_scribe(segments).as_slice() {
        [] => return Err(AnalysisError::EmptyClass("scribe".into())),
        [(label, _)] => label.clone(),
        many => return Err(AnalysisError::DuplicateLabel(many[1].0.to_string())),
    };
    let units = group_units(segments);
    if units.len() < 2 {
        return Err(AnalysisError::SingleUnit);
    }
    let rows = featurize(segments, params.top_k)?.to_rows();

    let unit_rows = units
        .par_iter()
        .map(|((codex, unit), held_out)| {
            let train: Vec<Vec<f64>> = rows
                .iter()
                .enumerate()
                .filter(|(i, _)| held_out.binary_search(i).is_err())
                .map(|(_, r)| r.clone())
                .collect();
            let test: Vec<Vec<f64>> = held_out.iter().map(|&i| rows[i].clone()).collect();
            let model = ocsvm_train(&train, &params.ocsvm)?;
            let (verdicts, _) = ocsvm_predict(&model, &test)?;
            let outliers = verdicts.iter().filter(|v| **v == Verdict::Outlier).count();
            Ok(OutlierRow::new(
                codex.clone(),
                Some(unit.clone()),
                verdicts.len() - outliers,
                outliers,
            ))
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;

    let rows = match aggregate_by {
        AggregateBy::Unit => unit_rows.clone(),
        AggregateBy::Codex => {
            let mut out: Vec<OutlierRow> = Vec::new();
            for r in &unit_rows {
                match out.iter_mut().find(|o| o.codex_id == r.codex_id) {
                    Some(o) => *o = OutlierRow::new(o.codex_id.clone(), None, o.n_inliers + r.n_inliers, o.n_outliers + r.n_outliers),
                    None => out.push(OutlierRow::new(r.codex_id.clone(), None, r.n_inliers, r.n_outliers)),
                }
            }
            out
        }
    };
    Ok(OutlierReport {
        scribe,
        aggregated_by: aggregate_by,
        rows,
        unit_rows,
        params: params.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceParams {
    pub forest: ForestParams,
    pub top_k: usize,
    pub top_m: usize,
}

impl Default for ImportanceParams {
    fn default() -> Self {
        Self {
            forest: ForestParams::default(),
            top_k: DEFAULT_TOP_K,
            top_m: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureImportance {
    pub rank: usize,
    pub bigram: String,
    pub mdi: f64,
    pub target_mean_tfidf: f64,
    pub rest_mean_tfidf: f64,
    /// Present for the `top_m` highest-ranked features only.
    pub target_distribution: Option<BoxStats>,
    pub rest_distribution: Option<BoxStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImportanceReport {
    pub target: (String, String),
    pub n_target: usize,
    pub n_rest: usize,
    pub features: Vec<FeatureImportance>,
    pub params: ImportanceParams,
}

impl ImportanceReport {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "bigram", "mdi", "target_mean_tfidf", "rest_mean_tfidf"])?;
        for f in &self.features {
            w.write_record([
                f.rank.to_string(),
                f.bigram.clone(),
                f.mdi.to_string(),
                f.target_mean_tfidf.to_string(),
                f.rest_mean_tfidf.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }

    pub fn top(&self, n: usize) -> impl Iterator<Item = &str> {
        self.features.iter().take(n).map(|f| f.bigram.as_str())
    }
}

/// Random forest separating the target unit's segments from the rest of
/// `segments`, with features ranked by mean decrease in impurity.
pub fn importance_analysis(
    segments: &[Segment],
    target: (&str, &str),
    params: &ImportanceParams,
) -> Result<ImportanceReport, AnalysisError> {
    let labels: Vec<bool> = segments
        .iter()
        .map(|s| s.codex() == target.0 && s.unit() == target.1)
        .collect();
    let n_target = labels.iter().filter(|&&l| l).count();
    if n_target == 0 {
        return Err(AnalysisError::EmptyClass(format!("{} {}", target.0, target.1)));
    }
    if n_target == labels.len() {
        return Err(AnalysisError::EmptyClass("rest".into()));
    }
    let matrix = featurize(segments, params.top_k)?;
    let rows = matrix.to_rows();
    let forest = rf_train(&rows, &labels, &params.forest)?;
    let mdi = rf_mdi(&forest);

    let mut order: Vec<usize> = (0..mdi.len()).collect();
    order.sort_by(|&a, &b| mdi[b].total_cmp(&mdi[a]).then(a.cmp(&b)));
    let features = order
        .iter()
        .enumerate()
        .map(|(rank, &j)| {
            let (t, r): (Vec<f64>, Vec<f64>) = {
                let col = matrix.column(j);
                let t = col.iter().zip(&labels).filter(|(_, &l)| l).map(|(v, _)| *v).collect();
                let r = col.iter().zip(&labels).filter(|(_, &l)| !l).map(|(v, _)| *v).collect();
                (t, r)
            };
            let detailed = rank < params.top_m;
            FeatureImportance {
                rank: rank + 1,
                bigram: matrix.cols[j].text(),
                mdi: mdi[j],
                target_mean_tfidf: mean(&t),
                rest_mean_tfidf: mean(&r),
                target_distribution: detailed.then(|| BoxStats::from_samples(&t)).flatten(),
                rest_distribution: detailed.then(|| BoxStats::from_samples(&r)).flatten(),
            }
        })
        .collect();
    Ok(ImportanceReport {
        target: (target.0.to_string(), target.1.to_string()),
        n_target,
        n_rest: labels.len() - n_target,
        features,
        params: params.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentPrediction {
    pub codex: String,
    pub unit: String,
    pub index: usize,
    pub predicted: ScribeLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Attribution {
    pub query: ScribeLabel,
    pub references: Vec<ScribeLabel>,
    pub k: usize,
    pub predictions: Vec<SegmentPrediction>,
    /// Votes per reference label, in reference order.
    pub votes: Vec<(ScribeLabel, usize)>,
    pub verdict: ScribeLabel,
    pub agreement: f64,
}

impl Attribution {
    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["query", "codex", "unit", "segment", "predicted"])?;
        for p in &self.predictions {
            w.write_record([
                self.query.to_string(),
                p.codex.clone(),
                p.unit.clone(),
                p.index.to_string(),
                p.predicted.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
    }
}

/// Classifies every segment of `query` by k-nearest neighbours among the
/// reference scribes' segments. The verdict is the most frequent prediction;
/// ties go to the label listed first in `references`.
pub fn attribute_segments(
    segments: &[Segment],
    query: &ScribeLabel,
    references: &[ScribeLabel],
    k: usize,
    top_k: usize,
) -> Result<Attribution, AnalysisError> {
    let mut all = references.to_vec();
    all.push(query.clone());
    check_distinct(&all)?;
    let subset: Vec<Segment> = segments
        .iter()
        .filter(|s| all.contains(s.scribe()))
        .cloned()
        .collect();
    let is_query: Vec<bool> = subset.iter().map(|s| s.scribe() == query).collect();
    if !is_query.iter().any(|&q| q) {
        return Err(AnalysisError::EmptyQuery(query.to_string()));
    }
    if is_query.iter().all(|&q| q) {
        return Err(AnalysisError::EmptyReference);
    }
    let rows = featurize(&subset, top_k)?.to_rows();
    let (mut train_x, mut train_y) = (Vec::new(), Vec::new());
    for (i, s) in subset.iter().enumerate() {
        if !is_query[i] {
            train_x.push(rows[i].clone());
            train_y.push(s.scribe().clone());
        }
    }
    let predictions = subset
        .par_iter()
        .enumerate()
        .filter(|(i, _)| is_query[*i])
        .map(|(i, s)| {
            Ok(SegmentPrediction {
                codex: s.codex().to_string(),
                unit: s.unit().to_string(),
                index: s.index(),
                predicted: knn_classify(&train_x, &train_y, &rows[i], k)?,
            })
        })
        .collect::<Result<Vec<_>, AnalysisError>>()?;
    let votes: Vec<(ScribeLabel, usize)> = references
        .iter()
        .map(|r| (r.clone(), predictions.iter().filter(|p| &p.predicted == r).count()))
        .collect();
    let (verdict, best) = votes
        .iter()
        .fold(None::<&(ScribeLabel, usize)>, |acc, v| match acc {
            Some(a) if a.1 >= v.1 => Some(a),
            _ => Some(v),
        })
        .cloned()
        .expect("references are non-empty");
    Ok(Attribution {
        query: query.clone(),
        references: references.to_vec(),
        k,
        agreement: best as f64 / predictions.len() as f64,
        predictions,
        votes,
        verdict,
    })
}

/// One row of the per-scribe corpus overview.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScribeStats {
    pub scribe: ScribeLabel,
    pub codices: usize,
    pub units: usize,
    pub chars_codepoint: usize,
    pub chars_grapheme: usize,
    pub segments: usize,
    pub unique_characters: usize,
    pub type_token_ratio: f64,
}

/// Per-scribe counts of codices, units, characters, segments and types.
pub fn scribe_statistics(corpus: &Corpus, segment_size: usize) -> Result<Vec<ScribeStats>, MetricsError> {
    corpus
        .scribes()
        .into_iter()
        .map(|scribe| {
            let docs: Vec<_> = corpus.docs.iter().filter(|d| d.scribe == scribe).collect();
            let mut codices: Vec<&str> = docs.iter().map(|d| d.codex_id.as_str()).collect();
            codices.sort_unstable();
            codices.dedup();
            Ok(ScribeStats {
                codices: codices.len(),
                units: docs.len(),
                chars_codepoint: docs.iter().map(|d| d.codepoint_count()).sum(),
                chars_grapheme: docs.iter().map(|d| d.grapheme_count()).sum(),
                segments: docs.iter().map(|d| segment_unit(d, segment_size).len()).sum(),
                unique_characters: pooled_unique_characters(docs.iter().copied()),
                type_token_ratio: pooled_type_token_ratio(docs.iter().copied())?,
                scribe,
            })
        })
        .collect()
}

pub fn scribe_statistics_csv(rows: &[ScribeStats]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "scribe",
        "codices",
        "units",
        "chars_codepoint",
        "chars_grapheme",
        "segments",
        "unique_characters",
        "type_token_ratio",
    ])?;
    for r in rows {
        w.write_record([
            r.scribe.to_string(),
            r.codices.to_string(),
            r.units.to_string(),
            r.chars_codepoint.to_string(),
            r.chars_grapheme.to_string(),
            r.segments.to_string(),
            r.unique_characters.to_string(),
            r.type_token_ratio.to_string(),
        ])?;
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{BrevigraphInventory, ProductionUnitDoc};
    use crate::segmentation::segment_corpus;
    use crate::synth::{demo_profile, generate_unit};

    fn label(s: &str) -> ScribeLabel {
        ScribeLabel::new(s).unwrap()
    }

    fn corpus(units: &[(&str, &str, &str, [f64; 8], usize)]) -> Corpus {
        let inv = BrevigraphInventory::default();
        Corpus::new(
            units
                .iter()
                .map(|(codex, unit, scribe, w, n)| {
                    generate_unit(&demo_profile(*w, 7), *n, codex, unit, label(scribe), &inv).unwrap()
                })
                .collect(),
        )
    }

    const A: [f64; 8] = [0.8, 0.8, 0.0, 0.0, 0.8, 0.0, 0.8, 0.0];
    const B: [f64; 8] = [0.0, 0.0, 0.8, 0.8, 0.0, 0.8, 0.0, 0.8];

    #[test]
    fn scatter_filters_small_scribes() {
        let c = corpus(&[
            ("C1", "I", "a", A, 12 * 500),
            ("C2", "I", "b", B, 12 * 500),
            ("C3", "I", "c", A, 9 * 500 + 10),
        ]);
        let segs = segment_corpus(&c, 500);
        let e = scatter_analysis(&segs, 10, &ScatterParams::default()).unwrap();
        assert_eq!(e.labels.len(), 24);
        assert!(e.labels.iter().all(|l| l.scribe.as_str() != "c"));
        assert!(matches!(
            scatter_analysis(&segs, 20, &ScatterParams::default()),
            Err(AnalysisError::InsufficientScribes { min_segments: 20 })
        ));
    }

    #[test]
    fn downsample_counts_and_errors() {
        let c = corpus(&[("C1", "I", "a", A, 40 * 200), ("C2", "I", "b", B, 11 * 200)]);
        let segs = segment_corpus(&c, 200);
        let picked = downsample(&segs, &[label("a")], 37, 1).unwrap();
        assert_eq!(picked.len(), 37);
        let again = downsample(&segs, &[label("a")], 37, 1).unwrap();
        assert_eq!(
            picked.iter().map(|s| s.id.clone()).collect::<Vec<_>>(),
            again.iter().map(|s| s.id.clone()).collect::<Vec<_>>()
        );
        assert!(matches!(
            downsample(&segs, &[label("a"), label("b")], 37, 1),
            Err(AnalysisError::NotEnoughSegments { available: 11, requested: 37, .. })
        ));
        assert!(matches!(
            pairwise_scatter(&segs, [&label("a"), &label("a")], &ScatterParams::default()),
            Err(AnalysisError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn outlier_rows_partition() {
        let c = corpus(&[
            ("X", "I", "a", A, 6 * 300),
            ("X", "II", "a", A, 5 * 300),
            ("Y", "I", "a", A, 6 * 300),
            ("Z", "I", "a", B, 6 * 300),
        ]);
        let segs = segment_corpus(&c, 300);
        let r = loo_outlier_analysis(&segs, &OutlierParams::default(), AggregateBy::Codex).unwrap();
        assert_eq!(r.unit_rows.len(), 4);
        assert_eq!(r.rows.len(), 3);
        assert_eq!(r.rows.iter().map(|r| r.n_segments).sum::<usize>(), segs.len());
        assert_eq!(r.row("X", None).unwrap().n_segments, 11);
        assert_eq!(r.row("Z", None).unwrap().outlier_fraction, 1.0);
        let single = segment_corpus(&corpus(&[("X", "I", "a", A, 3 * 300)]), 300);
        assert!(matches!(
            loo_outlier_analysis(&single, &OutlierParams::default(), AggregateBy::Unit),
            Err(AnalysisError::SingleUnit)
        ));
    }

    #[test]
    fn duplicated_unit_is_inlier() {
        let inv = BrevigraphInventory::default();
        let base = generate_unit(&demo_profile(A, 3), 6 * 300, "X", "I", label("a"), &inv).unwrap();
        let copy = ProductionUnitDoc::from_raw("Y", "I", label("a"), None, &base.text(), &inv);
        let other = generate_unit(&demo_profile(A, 4), 6 * 300, "Z", "I", label("a"), &inv).unwrap();
        let segs = segment_corpus(&Corpus::new(vec![base, copy, other]), 300);
        let r = loo_outlier_analysis(&segs, &OutlierParams::default(), AggregateBy::Unit).unwrap();
        // copies of training rows can only be outliers where the training rows are
        let n_train = segs.len() - 6;
        let bound = (OutlierParams::default().ocsvm.nu * n_train as f64).ceil() as usize;
        assert!(r.row("Y", Some("I")).unwrap().n_outliers <= bound);
    }

    #[test]
    fn importance_sums_to_one() {
        let c = corpus(&[("X", "I", "a", A, 8 * 300), ("Y", "I", "a", B, 8 * 300)]);
        let segs = segment_corpus(&c, 300);
        let mut params = ImportanceParams::default();
        params.forest.n_trees = 20;
        let r = importance_analysis(&segs, ("X", "I"), &params).unwrap();
        let total: f64 = r.features.iter().map(|f| f.mdi).sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(r.features.windows(2).all(|w| w[0].mdi >= w[1].mdi));
        assert_eq!(r.features.iter().filter(|f| f.target_distribution.is_some()).count(), 10);
        assert!(matches!(
            importance_analysis(&segs, ("Q", "I"), &params),
            Err(AnalysisError::EmptyClass(_))
        ));
    }

    #[test]
    fn attribution_of_copied_query() {
        let inv = BrevigraphInventory::default();
        let a = generate_unit(&demo_profile(A, 3), 5 * 300, "X", "I", label("a"), &inv).unwrap();
        let b = generate_unit(&demo_profile(B, 3), 5 * 300, "Y", "I", label("b"), &inv).unwrap();
        let q = ProductionUnitDoc::from_raw("Q", "I", label("q"), None, &b.text(), &inv);
        let segs = segment_corpus(&Corpus::new(vec![a, b, q]), 300);
        let r = attribute_segments(&segs, &label("q"), &[label("a"), label("b")], 1, 100).unwrap();
        assert_eq!(r.verdict, label("b"));
        assert_eq!(r.agreement, 1.0);
        assert!(matches!(
            attribute_segments(&segs, &label("none"), &[label("a")], 1, 100),
            Err(AnalysisError::EmptyQuery(_))
        ));
        assert!(matches!(
            attribute_segments(&segs, &label("q"), &[label("none")], 1, 100),
            Err(AnalysisError::EmptyReference)
        ));
    }

    #[test]
    fn statistics_table() {
        let inv = BrevigraphInventory::default();
        let doc = ProductionUnitDoc::from_raw("X", "I", label("a"), None, "ende dē ende", &inv);
        let doc2 = ProductionUnitDoc::from_raw("Y", "I", label("a"), None, "dat", &inv);
        let rows = scribe_statistics(&Corpus::new(vec![doc, doc2]), 5).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!((r.codices, r.units), (2, 2));
        assert_eq!(r.chars_grapheme, 12 + 3);
        assert_eq!(r.segments, 2);
        assert_eq!(r.unique_characters, 6);
        assert!((r.type_token_ratio - 0.75).abs() < 1e-12);
    }
}
