//! Seeded synthetic datasets for tests, examples, and benchmarks.
//!
//! All generators are deterministic in their seed and return raw (not yet
//! normalized) datasets whose values already lie in `[0, 1]`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::data::Dataset;
use crate::seed::sub_rng;

fn names(d: usize) -> Vec<String> {
    (1..=d).map(|j| format!("f{j}")).collect()
}

/// Binary-class dataset. The first `n_informative` features cluster around
/// per-class centers 0.3 / 0.7 with uniform half-width `noise` (so values
/// overlap once `noise > 0.2`); the remaining features are label-independent
/// uniform noise. Labels alternate, so classes are balanced.
pub fn informative(
    n_rows: usize,
    n_informative: usize,
    n_features: usize,
    noise: f64,
    seed: u64,
) -> Dataset {
    assert!(n_informative <= n_features);
    let mut rng = sub_rng(seed, &[0x1F0]);
    let labels: Vec<usize> = (0..n_rows).map(|i| i % 2).collect();
    let rows = (0..n_rows)
        .map(|i| {
            let center = if labels[i] == 0 { 0.3 } else { 0.7 };
            (0..n_features)
                .map(|j| {
                    if j < n_informative {
                        (center + rng.random_range(-noise..=noise)).clamp(0.0, 1.0)
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows, labels, names(n_features)).unwrap()
}

/// Binary-class dataset whose first feature separates the classes with a
/// guaranteed margin: class 0 values are evenly spaced in `[0.05, 0.30]`,
/// class 1 values in `[0.70, 0.95]`. The within-class spread (0.25) stays
/// below the cross-class gap (0.40), so leave-one-out k-NN on that single
/// feature is error-free for any k below the class size. All other features
/// are uniform noise.
pub fn separable(n_rows: usize, n_features: usize, seed: u64) -> Dataset {
    assert!(n_features >= 1 && n_rows >= 4);
    let mut rng = sub_rng(seed, &[0x5E9]);
    let labels: Vec<usize> = (0..n_rows).map(|i| i % 2).collect();
    let class_count = |c: usize| (n_rows + 1 - c) / 2;
    let mut rank = [0usize; 2];
    let rows = (0..n_rows)
        .map(|i| {
            let c = labels[i];
            let count = class_count(c);
            let t = if count > 1 {
                rank[c] as f64 / (count - 1) as f64
            } else {
                0.0
            };
            rank[c] += 1;
            let base = if c == 0 { 0.05 } else { 0.70 };
            let mut row = vec![base + 0.25 * t];
            for _ in 1..n_features {
                row.push(rng.random_range(0.0..1.0));
            }
            row
        })
        .collect();
    Dataset::from_rows(rows, labels, names(n_features)).unwrap()
}

/// Like [`informative`], plus `n_copies` exact duplicates of the first
/// (informative) feature appended as the trailing columns. The duplicates
/// give the redundancy index visible structure: their pairwise cosine
/// similarity is exactly 1.
pub fn with_duplicates(
    n_rows: usize,
    n_features: usize,
    n_copies: usize,
    noise: f64,
    seed: u64,
) -> Dataset {
    let base = informative(n_rows, 2, n_features, noise, seed);
    let d = base.n_features();
    let rows: Vec<Vec<f64>> = (0..base.n_instances())
        .map(|i| {
            let mut row = base.row(i).to_vec();
            for _ in 0..n_copies {
                row.push(base.value(i, 0));
            }
            row
        })
        .collect();
    Dataset::from_rows(rows, base.labels().to_vec(), names(d + n_copies)).unwrap()
}

/// Multi-class dataset: feature `c` clusters high (center 0.7) for class `c`
/// and low (center 0.3) for every other class, with uniform half-width
/// `noise`; features beyond the first `n_classes` are uniform noise.
pub fn multiclass(
    n_rows: usize,
    n_classes: usize,
    n_features: usize,
    noise: f64,
    seed: u64,
) -> Dataset {
    assert!(n_classes >= 2 && n_features >= n_classes);
    let mut rng = sub_rng(seed, &[0x3C1]);
    let labels: Vec<usize> = (0..n_rows).map(|i| i % n_classes).collect();
    let rows = (0..n_rows)
        .map(|i| {
            (0..n_features)
                .map(|j| {
                    if j < n_classes {
                        let center = if labels[i] == j { 0.7 } else { 0.3 };
                        (center + rng.random_range(-noise..=noise)).clamp(0.0, 1.0)
                    } else {
                        rng.random_range(0.0..1.0)
                    }
                })
                .collect()
        })
        .collect();
    Dataset::from_rows(rows, labels, names(n_features)).unwrap()
}

/// A 569-instance, 30-feature, 2-class dataset shaped like the WBCD table:
/// five informative features of decreasing strength, three high-redundancy
/// near-copies, and 22 noise columns.
pub fn wbcd_like(seed: u64) -> Dataset {
    const N: usize = 569;
    const D: usize = 30;
    let mut rng = sub_rng(seed, &[0xB5C]);
    let labels: Vec<usize> = (0..N).map(|i| usize::from(i % 3 == 0)).collect();
    let widths: [f64; 5] = [0.10, 0.15, 0.20, 0.25, 0.30];
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(N);
    for &label in &labels {
        let center = if label == 0 { 0.35 } else { 0.65 };
        let mut row = vec![0.0; D];
        for (j, &w) in widths.iter().enumerate() {
            row[j] = (center + rng.random_range(-w..=w)).clamp(0.0, 1.0);
        }
        // Near-duplicates of the informative block.
        row[5] = (row[0] + rng.random_range(-0.02_f64..=0.02)).clamp(0.0, 1.0);
        row[6] = (0.8 * row[1] + 0.1 + rng.random_range(-0.02_f64..=0.02)).clamp(0.0, 1.0);
        row[7] = (row[2] + rng.random_range(-0.02_f64..=0.02)).clamp(0.0, 1.0);
        for slot in row.iter_mut().skip(8) {
            *slot = rng.random_range(0.0..1.0);
        }
        rows.push(row);
    }
    Dataset::from_rows(rows, labels, names(D)).unwrap()
}

#[allow(unused)]
fn _rng_type_check(r: &mut ChaCha8Rng) -> f64 {
    r.random_range(0.0..1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn informative_shape_and_determinism() {
        let a = informative(30, 2, 6, 0.2, 5);
        let b = informative(30, 2, 6, 0.2, 5);
        assert_eq!(a, b);
        assert_eq!(a.n_instances(), 30);
        assert_eq!(a.n_features(), 6);
        assert_eq!(a.n_classes(), 2);
    }

    #[test]
    fn wbcd_like_shape() {
        let d = wbcd_like(0);
        assert_eq!(d.n_instances(), 569);
        assert_eq!(d.n_features(), 30);
        assert_eq!(d.n_classes(), 2);
    }

    #[test]
    fn separable_margin_holds() {
        let d = separable(30, 4, 3);
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for i in 0..d.n_instances() {
            let v = d.value(i, 0);
            if d.labels()[i] == 0 {
                lo = lo.max(v);
            } else {
                hi = hi.min(v);
            }
        }
        assert!(hi - lo >= 0.39, "margin {} too small", hi - lo);
    }

    #[test]
    fn duplicates_are_exact() {
        let d = with_duplicates(20, 5, 2, 0.2, 8);
        assert_eq!(d.n_features(), 7);
        assert_eq!(d.column(0), d.column(5));
        assert_eq!(d.column(0), d.column(6));
    }
}
