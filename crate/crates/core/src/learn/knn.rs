use crate::error::LearnError;

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Majority label among the `k` nearest training rows (Euclidean).
///
/// Neighbours are ranked by distance, then by training index. Vote ties go to
/// the label with the smallest summed distance, then to the label that appears
/// first in the training set.
pub fn knn_classify<L: Clone + PartialEq>(
    train_x: &[Vec<f64>],
    train_y: &[L],
    x: &[f64],
    k: usize,
) -> Result<L, LearnError> {
    if train_x.is_empty() {
        return Err(LearnError::EmptyTrainingSet);
    }
    if k == 0 {
        return Err(LearnError::BadHyperparameter("k must be positive".into()));
    }
    if train_x.len() < k {
        return Err(LearnError::TooFewRows { n: train_x.len(), k });
    }
    if train_x.len() != train_y.len() {
        return Err(LearnError::DimensionMismatch {
            expected: train_x.len(),
            got: train_y.len(),
        });
    }
    if let Some(r) = train_x.iter().find(|r| r.len() != x.len()) {
        return Err(LearnError::DimensionMismatch {
            expected: r.len(),
            got: x.len(),
        });
    }
    let mut dists: Vec<(f64, usize)> = train_x
        .iter()
        .enumerate()
        .map(|(i, r)| (euclidean(r, x), i))
        .collect();
    dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // (label, votes, summed distance, first training index of the label)
    let mut tally: Vec<(L, usize, f64, usize)> = Vec::new();
    for &(d, i) in dists.iter().take(k) {
        match tally.iter_mut().find(|t| t.0 == train_y[i]) {
            Some(t) => {
                t.1 += 1;
                t.2 += d;
            }
            None => {
                let first = train_y.iter().position(|l| *l == train_y[i]).unwrap_or(i);
                tally.push((train_y[i].clone(), 1, d, first));
            }
        }
    }
    tally.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.2.total_cmp(&b.2))
            .then(a.3.cmp(&b.3))
    });
    Ok(tally.swap_remove(0).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_match() {
        let x = vec![vec![0.0, 1.0], vec![5.0, 5.0]];
        assert_eq!(knn_classify(&x, &["a", "b"], &[5.0, 5.0], 1).unwrap(), "b");
    }

    #[test]
    fn two_clusters() {
        let x = vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]];
        let y = ["A", "A", "B", "B"];
        assert_eq!(knn_classify(&x, &y, &[0.05], 2).unwrap(), "A");
        assert_eq!(knn_classify(&x, &y, &[9.0], 3).unwrap(), "B");
    }

    #[test]
    fn tie_goes_to_closer_label() {
        let x = vec![vec![0.0], vec![3.0]];
        assert_eq!(knn_classify(&x, &["far", "near"], &[2.0], 2).unwrap(), "near");
        // equal summed distance: first-seen label wins
        assert_eq!(knn_classify(&x, &["first", "second"], &[1.5], 2).unwrap(), "first");
    }

    #[test]
    fn zero_training_error_on_distinct_rows() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let y: Vec<usize> = (0..20).map(|i| i % 3).collect();
        for (r, l) in x.iter().zip(&y) {
            assert_eq!(knn_classify(&x, &y, r, 1).unwrap(), *l);
        }
    }

    #[test]
    fn errors() {
        let empty: Vec<Vec<f64>> = vec![];
        let none: [u8; 0] = [];
        assert_eq!(knn_classify(&empty, &none, &[0.0], 1), Err(LearnError::EmptyTrainingSet));
        assert!(matches!(
            knn_classify(&[vec![0.0]], &[1], &[0.0], 2),
            Err(LearnError::TooFewRows { .. })
        ));
    }
}
