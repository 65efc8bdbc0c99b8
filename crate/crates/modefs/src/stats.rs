//! Feature weights and redundancy: the inputs that steer initialization,
//! mutation gating, and grid refinement.
//!
//! Weights `q` come from a single-layer fuzzy cognitive map — one node per
//! feature feeding a sigmoid label node — trained with delta-rule gradient
//! descent. Redundancy is the pairwise cosine similarity of feature columns,
//! reduced to a per-feature index and thresholded at the median `tau`.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::seed::{sub_rng, STREAM_FCM};

/// How the similarity matrix row collapses to one redundancy score per
/// feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Mean off-diagonal similarity of the feature's row (the default).
    #[default]
    Mean,
    /// Maximum off-diagonal similarity of the feature's row.
    Max,
}

impl std::str::FromStr for Reduction {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "mean" => Ok(Reduction::Mean),
            "max" => Ok(Reduction::Max),
            other => Err(format!("unknown reduction {other:?} (expected mean|max)")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RedundancyOptions {
    pub reduction: Reduction,
    /// Whether the forced `A_ii = 1` diagonal participates in the median
    /// threshold. Off by default: with few features the forced ones drag
    /// the median upward.
    pub tau_includes_diagonal: bool,
}

impl Default for RedundancyOptions {
    fn default() -> Self {
        RedundancyOptions {
            reduction: Reduction::Mean,
            tau_includes_diagonal: false,
        }
    }
}

/// Everything the search mechanisms need to know about the features of one
/// training split.
#[derive(Debug, Clone)]
pub struct FeatureStats {
    /// Per-feature weight toward the label, rescaled to `[0, 1]`.
    pub q: Vec<f64>,
    /// Pairwise cosine similarity, `a_matrix[i][j] = A_ij`, diagonal 1.
    pub a_matrix: Vec<Vec<f64>>,
    /// Per-feature redundancy score (row reduction of `a_matrix`).
    pub a_index: Vec<f64>,
    /// Median off-diagonal similarity; values above it flag redundancy.
    pub tau: f64,
}

impl FeatureStats {
    pub fn compute(
        train: &Dataset,
        fcm_epochs: usize,
        fcm_learning_rate: f64,
        seed: u64,
        opts: &RedundancyOptions,
    ) -> FeatureStats {
        let q = fcm_learn(train, fcm_epochs, fcm_learning_rate, seed);
        let (a_matrix, a_index, tau) = redundancy_stats_with(train, opts);
        FeatureStats {
            q,
            a_matrix,
            a_index,
            tau,
        }
    }

    /// Index of the feature with the largest weight (ties: lowest index).
    /// Used as the repair feature whenever a construction rule produces an
    /// empty mask.
    pub fn argmax_q(&self) -> usize {
        let mut best = 0;
        for (j, &w) in self.q.iter().enumerate() {
            if w > self.q[best] {
                best = j;
            }
        }
        best
    }
}

/// `u . v / (|u||v|)`, with 0 by convention when either norm is zero.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok(dot / (nu * nv))
}

/// Builds the similarity matrix `A`, the per-feature redundancy index, and
/// the median threshold `tau` with default options.
pub fn redundancy_stats(train: &Dataset) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    redundancy_stats_with(train, &RedundancyOptions::default())
}

#[allow(clippy::needless_range_loop)]
pub fn redundancy_stats_with(
    train: &Dataset,
    opts: &RedundancyOptions,
) -> (Vec<Vec<f64>>, Vec<f64>, f64) {
    let d = train.n_features();
    let columns: Vec<Vec<f64>> = (0..d).map(|j| train.column(j)).collect();

    let mut a = vec![vec![0.0; d]; d];
    for i in 0..d {
        a[i][i] = 1.0;
        for j in (i + 1)..d {
            let s = cosine_similarity(&columns[i], &columns[j]).expect("equal column lengths");
            a[i][j] = s;
            a[j][i] = s;
        }
    }

    let a_index: Vec<f64> = (0..d)
        .map(|i| {
            if d < 2 {
                return 0.0;
            }
            let others = (0..d).filter(|&j| j != i).map(|j| a[i][j]);
            match opts.reduction {
                Reduction::Mean => others.sum::<f64>() / (d - 1) as f64,
                Reduction::Max => others.fold(f64::NEG_INFINITY, f64::max),
            }
        })
        .collect();

    let mut entries: Vec<f64> = Vec::with_capacity(d * (d - 1) / 2 + d);
    for i in 0..d {
        for j in (i + 1)..d {
            entries.push(a[i][j]);
        }
    }
    if opts.tau_includes_diagonal {
        entries.extend(std::iter::repeat_n(1.0, d));
    }
    let tau = median(&mut entries);

    (a, a_index, tau)
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Learns per-feature weights toward the label.
///
/// A single sigmoid output node is trained with the delta rule: per visited
/// instance, `w_j += lr * (target - y) * y * (1 - y) * x_j` where
/// `y = sigmoid(w . x)`. Weights start at zero, so identical columns follow
/// identical trajectories and all-zero columns never move. The instance
/// visit order is reshuffled every epoch from the seed, which is the only
/// randomness involved.
///
/// Binary labels train one pass with the class index as the target; more
/// classes train one one-vs-rest pass each and average the absolute weights.
/// The result is `|w|` rescaled by its maximum into `[0, 1]` (all ones when
/// every weight is zero).
pub fn fcm_learn(train: &Dataset, epochs: usize, learning_rate: f64, seed: u64) -> Vec<f64> {
    let d = train.n_features();
    let n = train.n_instances();
    let mut rng = sub_rng(seed, &[STREAM_FCM]);

    let passes: Vec<Vec<f64>> = if train.n_classes() == 2 {
        vec![train.labels().iter().map(|&l| l as f64).collect()]
    } else {
        (0..train.n_classes())
            .map(|c| {
                train
                    .labels()
                    .iter()
                    .map(|&l| if l == c { 1.0 } else { 0.0 })
                    .collect()
            })
            .collect()
    };

    let mut q = vec![0.0; d];
    for targets in &passes {
        let mut w = vec![0.0; d];
        let mut order: Vec<usize> = (0..n).collect();
        for _ in 0..epochs {
            order.shuffle(&mut rng);
            for &t in &order {
                let row = train.row(t);
                let z: f64 = w.iter().zip(row).map(|(wi, xi)| wi * xi).sum();
                let y = sigmoid(z);
                let step = learning_rate * (targets[t] - y) * y * (1.0 - y);
                for (wi, xi) in w.iter_mut().zip(row) {
                    *wi += step * xi;
                }
            }
        }
        for (qi, wi) in q.iter_mut().zip(&w) {
            *qi += wi.abs();
        }
    }
    let scale = passes.len() as f64;
    for qi in q.iter_mut() {
        *qi /= scale;
    }

    let max = q.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        vec![1.0; d]
    } else {
        q.iter().map(|&v| v / max).collect()
    }
}
