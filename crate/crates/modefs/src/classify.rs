//! k-NN wrapper evaluation: the (feature ratio, error rate) objective pair.

use crate::data::Dataset;
use crate::error::{Error, Result};

/// The two minimization objectives of a feature subset.
///
/// `fr` is the selected-feature count over the total feature count; `er` is
/// the fraction of misclassified instances. Both lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectivePair {
    pub fr: f64,
    pub er: f64,
}

impl ObjectivePair {
    pub fn new(fr: f64, er: f64) -> Self {
        ObjectivePair { fr, er }
    }
}

/// Anything that can score a mask. Implementations must be pure: the engine
/// evaluates population batches in parallel and relies on order independence.
pub trait Evaluate: Sync {
    fn evaluate(&self, mask: &[bool]) -> ObjectivePair;
}

/// The production evaluator: leave-one-out k-NN error on the training split.
pub struct KnnEvaluator<'a> {
    train: &'a Dataset,
    k: usize,
}

impl<'a> KnnEvaluator<'a> {
    pub fn new(train: &'a Dataset, k: usize) -> Self {
        KnnEvaluator { train, k }
    }
}

impl Evaluate for KnnEvaluator<'_> {
    fn evaluate(&self, mask: &[bool]) -> ObjectivePair {
        evaluate(mask, self.train, self.k)
    }
}

fn selected_indices(mask: &[bool]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, &m)| m)
        .map(|(j, _)| j)
        .collect()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Copies the masked columns into a compact row-major buffer so the O(n^2)
/// distance scans run over contiguous memory.
fn masked_matrix(d: &Dataset, selected: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(d.n_instances() * selected.len());
    for i in 0..d.n_instances() {
        let row = d.row(i);
        out.extend(selected.iter().map(|&j| row[j]));
    }
    out
}

/// Majority vote over the k nearest of the `(distance, index)` candidates.
/// Distance ties prefer the lower index; vote ties go to the label of the
/// nearest neighbor that belongs to one of the tied classes.
fn vote(dists: &mut [(f64, usize)], k: usize, labels: &[usize], n_classes: usize) -> usize {
    // The index tie-break makes the comparator a strict total order, so
    // partitioning first and sorting only the head returns exactly the
    // full-sort prefix at O(n + k log k).
    let cmp =
        |a: &(f64, usize), b: &(f64, usize)| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1));
    if k < dists.len() {
        dists.select_nth_unstable_by(k - 1, cmp);
    }
    dists[..k].sort_unstable_by(cmp);
    let top = &dists[..k];
    let mut counts = vec![0usize; n_classes];
    for &(_, idx) in top {
        counts[labels[idx]] += 1;
    }
    let best = *counts.iter().max().unwrap();
    top.iter()
        .map(|&(_, idx)| labels[idx])
        .find(|&l| counts[l] == best)
        .unwrap()
}

/// Predicts the label of `query` from its k nearest training rows, with
/// distances taken over the `selected` feature columns only.
pub fn knn_predict(train: &Dataset, selected: &[usize], query: &[f64], k: usize) -> Result<usize> {
    if selected.is_empty() {
        return Err(Error::EmptyMask);
    }
    if query.len() != train.n_features() {
        return Err(Error::LengthMismatch {
            left: query.len(),
            right: train.n_features(),
        });
    }
    let n = train.n_instances();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let mut dists: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let row = train.row(i);
            let d: f64 = selected
                .iter()
                .map(|&j| (query[j] - row[j]) * (query[j] - row[j]))
                .sum();
            (d, i)
        })
        .collect();
    Ok(vote(&mut dists, k, train.labels(), train.n_classes()))
}

/// Scores a mask on the training split: feature ratio plus leave-one-out
/// k-NN error (the instance being classified is excluded from its own
/// neighbor scan). The empty mask scores `(0, 1)` by convention, without
/// touching the classifier. `k` is silently capped at `n - 1` so the
/// leave-one-out scan always has enough neighbors.
pub fn evaluate(mask: &[bool], train: &Dataset, k: usize) -> ObjectivePair {
    assert_eq!(mask.len(), train.n_features(), "mask width mismatch");
    let selected = selected_indices(mask);
    let d = train.n_features();
    if selected.is_empty() {
        return ObjectivePair::new(0.0, 1.0);
    }
    let fr = selected.len() as f64 / d as f64;

    let n = train.n_instances();
    let m = selected.len();
    let k = k.max(1).min(n - 1);
    let matrix = masked_matrix(train, &selected);
    let labels = train.labels();
    let n_classes = train.n_classes();

    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    let mut errors = 0usize;
    for i in 0..n {
        dists.clear();
        let a = &matrix[i * m..(i + 1) * m];
        for j in 0..n {
            if j != i {
                let b = &matrix[j * m..(j + 1) * m];
                dists.push((sq_dist(a, b), j));
            }
        }
        if vote(&mut dists, k, labels, n_classes) != labels[i] {
            errors += 1;
        }
    }
    ObjectivePair::new(fr, errors as f64 / n as f64)
}

/// Fraction of test instances misclassified by k-NN fit on the training
/// split, restricted to the masked features. `k` is capped at the training
/// size.
pub fn holdout_error(mask: &[bool], train: &Dataset, test: &Dataset, k: usize) -> Result<f64> {
    if train.n_features() != test.n_features() {
        return Err(Error::FeatureMismatch {
            train: train.n_features(),
            test: test.n_features(),
        });
    }
    assert_eq!(mask.len(), train.n_features(), "mask width mismatch");
    let selected = selected_indices(mask);
    if selected.is_empty() {
        return Err(Error::EmptyMask);
    }
    let n_train = train.n_instances();
    let m = selected.len();
    let k = k.max(1).min(n_train);
    let train_matrix = masked_matrix(train, &selected);
    let test_matrix = masked_matrix(test, &selected);
    let labels = train.labels();
    let n_classes = train.n_classes();

    let mut dists: Vec<(f64, usize)> = Vec::with_capacity(n_train);
    let mut errors = 0usize;
    for i in 0..test.n_instances() {
        dists.clear();
        let q = &test_matrix[i * m..(i + 1) * m];
        for j in 0..n_train {
            let b = &train_matrix[j * m..(j + 1) * m];
            dists.push((sq_dist(q, b), j));
        }
        if vote(&mut dists, k, labels, n_classes) != test.labels()[i] {
            errors += 1;
        }
    }
    Ok(errors as f64 / test.n_instances() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::Dataset;
    use crate::synth;
    use rand::Rng;

    fn toy3() -> Dataset {
        Dataset::from_rows(
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![0.9, 0.9]],
            vec![0, 1, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap()
    }

    #[test]
    fn nearest_point_wins_at_k1() {
        let d = toy3();
        let label = knn_predict(&d, &[0, 1], &[1.0, 0.9], 1).unwrap();
        assert_eq!(label, 1);
    }

    #[test]
    fn majority_wins_at_k3() {
        let d = toy3();
        let label = knn_predict(&d, &[0, 1], &[0.5, 0.5], 3).unwrap();
        assert_eq!(label, 1);
    }

    #[test]
    fn k_larger_than_train_errors() {
        let d = toy3();
        let err = knn_predict(&d, &[0, 1], &[0.5, 0.5], 4).unwrap_err();
        assert!(matches!(err, Error::KTooLarge { k: 4, n: 3 }));
    }

    #[test]
    fn empty_mask_errors_in_predict() {
        let d = toy3();
        let err = knn_predict(&d, &[], &[0.5, 0.5], 1).unwrap_err();
        assert!(matches!(err, Error::EmptyMask));
    }

    // Independent oracle: full distance sort with explicit tie handling,
    // written against the contract rather than sharing any code with
    // knn_predict.
    fn oracle_knn(
        points: &[(Vec<f64>, usize)],
        query: &[f64],
        k: usize,
        n_classes: usize,
    ) -> usize {
        let mut ranked: Vec<(f64, usize, usize)> = points
            .iter()
            .enumerate()
            .map(|(idx, (row, label))| {
                let dist: f64 = row
                    .iter()
                    .zip(query)
                    .map(|(a, b)| (a - b).powi(2))
                    .sum::<f64>()
                    .sqrt();
                (dist, idx, *label)
            })
            .collect();
        ranked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        ranked.truncate(k);
        let mut histogram = vec![0usize; n_classes];
        for &(_, _, label) in &ranked {
            histogram[label] += 1;
        }
        let top = *histogram.iter().max().unwrap();
        for &(_, _, label) in &ranked {
            if histogram[label] == top {
                return label;
            }
        }
        unreachable!()
    }

    #[test]
    fn predict_matches_exhaustive_sort_oracle() {
        let mut rng = crate::seed::sub_rng(77, &[1]);
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|_| vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)])
            .collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let points: Vec<(Vec<f64>, usize)> =
            rows.iter().cloned().zip(labels.iter().copied()).collect();
        let d = Dataset::from_rows(rows, labels, vec!["a".into(), "b".into()]).unwrap();
        for _ in 0..50 {
            let query = vec![rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let got = knn_predict(&d, &[0, 1], &query, 5).unwrap();
            let want = oracle_knn(&points, &query, 5, 2);
            assert_eq!(got, want);
        }
    }

    #[test]
    fn feature_ratio_is_exact() {
        let d = synth::informative(12, 2, 30, 0.2, 1);
        let mut mask = vec![false; 30];
        mask[0] = true;
        mask[3] = true;
        mask[7] = true;
        let pair = evaluate(&mask, &d, 1);
        assert_eq!(pair.fr, 0.1);
    }

    #[test]
    fn empty_mask_convention() {
        let d = toy3();
        let pair = evaluate(&[false, false], &d, 1);
        assert_eq!(pair, ObjectivePair::new(0.0, 1.0));
    }

    #[test]
    fn full_mask_has_fr_one() {
        let d = synth::informative(10, 1, 4, 0.2, 2);
        let pair = evaluate(&[true; 4], &d, 1);
        assert_eq!(pair.fr, 1.0);
    }

    // Independent oracle: per-instance nearest-neighbor scan for 1-NN
    // leave-one-out, written without knn_predict.
    fn oracle_loocv_1nn(d: &Dataset, selected: &[usize]) -> f64 {
        let n = d.n_instances();
        let mut wrong = 0;
        for i in 0..n {
            let mut best = (f64::INFINITY, usize::MAX);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let dist: f64 = selected
                    .iter()
                    .map(|&c| (d.value(i, c) - d.value(j, c)).powi(2))
                    .sum();
                if dist < best.0 || (dist == best.0 && j < best.1) {
                    best = (dist, j);
                }
            }
            if d.labels()[best.1] != d.labels()[i] {
                wrong += 1;
            }
        }
        wrong as f64 / n as f64
    }

    #[test]
    fn loocv_matches_brute_force_oracle() {
        let d = synth::informative(12, 2, 4, 0.35, 9);
        let pair = evaluate(&[true; 4], &d, 1);
        assert_eq!(pair.er, oracle_loocv_1nn(&d, &[0, 1, 2, 3]));

        let mask = [true, false, true, false];
        let pair = evaluate(&mask, &d, 1);
        assert_eq!(pair.er, oracle_loocv_1nn(&d, &[0, 2]));
    }

    #[test]
    fn holdout_on_train_itself_is_zero() {
        let d = synth::informative(10, 2, 3, 0.2, 4);
        let er = holdout_error(&[true; 3], &d, &d, 1).unwrap();
        assert_eq!(er, 0.0);
    }

    #[test]
    fn holdout_with_flipped_labels_is_one() {
        let train = synth::separable(10, 2, 5);
        let flipped = Dataset::from_rows(
            (0..train.n_instances())
                .map(|i| train.row(i).to_vec())
                .collect(),
            train.labels().iter().map(|&l| 1 - l).collect(),
            train.feature_names().to_vec(),
        )
        .unwrap();
        let mut mask = vec![false; 2];
        mask[0] = true;
        let er = holdout_error(&mask, &train, &flipped, 1).unwrap();
        assert_eq!(er, 1.0);
    }

    // Same brute-force scan applied to the holdout protocol.
    fn oracle_holdout_1nn(train: &Dataset, test: &Dataset, selected: &[usize]) -> f64 {
        let mut wrong = 0;
        for i in 0..test.n_instances() {
            let mut best = (f64::INFINITY, usize::MAX);
            for j in 0..train.n_instances() {
                let dist: f64 = selected
                    .iter()
                    .map(|&c| (test.value(i, c) - train.value(j, c)).powi(2))
                    .sum();
                if dist < best.0 || (dist == best.0 && j < best.1) {
                    best = (dist, j);
                }
            }
            if train.labels()[best.1] != test.labels()[i] {
                wrong += 1;
            }
        }
        wrong as f64 / test.n_instances() as f64
    }

    #[test]
    fn holdout_matches_brute_force_oracle() {
        let d = synth::informative(50, 2, 4, 0.3, 21);
        let (train, test) = crate::data::stratified_split(&d, 0.6, 7).unwrap();
        let er = holdout_error(&[true; 4], &train, &test, 1).unwrap();
        assert_eq!(er, oracle_holdout_1nn(&train, &test, &[0, 1, 2, 3]));
    }

    #[test]
    fn loocv_invariant_under_row_permutation() {
        let d = synth::informative(16, 2, 4, 0.3, 13);
        let pair = evaluate(&[true; 4], &d, 3);
        // Reverse the instance order; continuous random features make
        // distance ties a measure-zero event.
        let perm: Vec<usize> = (0..d.n_instances()).rev().collect();
        let rows: Vec<Vec<f64>> = perm.iter().map(|&i| d.row(i).to_vec()).collect();
        let labels: Vec<usize> = perm.iter().map(|&i| d.labels()[i]).collect();
        let reversed = Dataset::from_rows(rows, labels, d.feature_names().to_vec()).unwrap();
        let pair_rev = evaluate(&[true; 4], &reversed, 3);
        assert_eq!(pair.er, pair_rev.er);
    }

    #[test]
    fn duplicated_column_changes_fr_not_er() {
        // Distances on {f1, copy-of-f1} are the single-feature distances
        // scaled by sqrt(2), so the neighbor ordering is untouched.
        let d = synth::informative(14, 1, 4, 0.3, 17);
        let mut single = vec![false; 4];
        single[0] = true;
        let base = evaluate(&single, &d, 1);

        let rows: Vec<Vec<f64>> = (0..d.n_instances())
            .map(|i| {
                let mut row = d.row(i).to_vec();
                row.push(d.value(i, 0));
                row
            })
            .collect();
        let wide = Dataset::from_rows(
            rows,
            d.labels().to_vec(),
            (1..=5).map(|j| format!("f{j}")).collect(),
        )
        .unwrap();
        let mut pair_mask = vec![false; 5];
        pair_mask[0] = true;
        pair_mask[4] = true;
        let extended = evaluate(&pair_mask, &wide, 1);

        assert_eq!(base.er, extended.er);
        assert_eq!(base.fr, 0.25);
        assert_eq!(extended.fr, 0.4);
    }
}
