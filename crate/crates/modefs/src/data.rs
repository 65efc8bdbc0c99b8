//! Dataset ingestion, min-max normalization, and stratified splitting.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// An immutable table of instances: a row-major feature matrix plus 0-based
/// class labels. Feature values are expected in `[0, 1]` once normalized;
/// construction only enforces the structural invariants (shape, label range,
/// at least 2 instances / 1 feature / 2 classes).
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
    labels: Vec<usize>,
    feature_names: Vec<String>,
    n_classes: usize,
}

impl Dataset {
    pub fn from_rows(
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
    ) -> Result<Self> {
        let n_rows = rows.len();
        if n_rows < 2 {
            return Err(Error::DatasetTooSmall {
                what: "instances",
                need: 2,
                got: n_rows,
            });
        }
        if rows.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: labels.len(),
            });
        }
        let n_cols = rows[0].len();
        if n_cols < 1 {
            return Err(Error::DatasetTooSmall {
                what: "features",
                need: 1,
                got: 0,
            });
        }
        if feature_names.len() != n_cols {
            return Err(Error::LengthMismatch {
                left: feature_names.len(),
                right: n_cols,
            });
        }
        let mut features = Vec::with_capacity(n_rows * n_cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_cols {
                return Err(Error::RaggedRow {
                    line: i + 1,
                    expected: n_cols,
                    found: row.len(),
                });
            }
            features.extend_from_slice(row);
        }
        let n_classes = labels.iter().copied().max().unwrap() + 1;
        let mut seen = vec![false; n_classes];
        for &l in &labels {
            seen[l] = true;
        }
        if n_classes < 2 || seen.iter().any(|s| !s) {
            return Err(Error::TooFewClasses);
        }
        Ok(Dataset {
            features,
            n_rows,
            n_cols,
            labels,
            feature_names,
            n_classes,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.n_rows
    }

    pub fn n_features(&self) -> usize {
        self.n_cols
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.features[i * self.n_cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows).map(|i| self.value(i, j)).collect()
    }

    /// Min-max scales every column to `[0, 1]`. A constant column maps to
    /// all zeros. Idempotent: applying it to an already-normalized dataset
    /// returns the same values bit for bit.
    pub fn normalize(&self) -> Dataset {
        NormParams::fit(self).apply_unclamped(self)
    }

    /// Extracts the sub-dataset at the given row indices (kept in the order
    /// given). Labels, names, and the class count carry over.
    fn subset(&self, indices: &[usize]) -> Dataset {
        let mut features = Vec::with_capacity(indices.len() * self.n_cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            features.extend_from_slice(self.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features,
            n_rows: indices.len(),
            n_cols: self.n_cols,
            labels,
            feature_names: self.feature_names.clone(),
            n_classes: self.n_classes,
        }
    }

    /// Writes the dataset as a headered CSV with the label in a trailing
    /// `class` column; the inverse of [`load_csv`] up to label renaming.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        let mut header: Vec<String> = self.feature_names.clone();
        header.push("class".to_string());
        w.write_record(&header)?;
        for i in 0..self.n_rows {
            let mut record: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            record.push(self.labels[i].to_string());
            w.write_record(&record)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Selects the label column of a CSV by header name or 0-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Name(String),
    Index(usize),
}

impl fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelColumn::Name(n) => write!(f, "{n}"),
            LabelColumn::Index(i) => write!(f, "#{i}"),
        }
    }
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// A purely numeric argument is taken as a 0-based column index,
    /// anything else as a header name.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => LabelColumn::Index(i),
            Err(_) => LabelColumn::Name(s.to_string()),
        })
    }
}

/// Loads a headered, comma-separated CSV into a raw (unnormalized) dataset.
///
/// Class labels may be arbitrary strings; they are mapped to `0..n_classes`
/// in first-appearance order. All non-label columns must parse as numbers.
pub fn load_csv(path: &Path, label: &LabelColumn) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)?;

    let header = reader.headers()?.clone();
    let label_idx = match label {
        LabelColumn::Name(name) => header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::LabelColumnNotFound(name.clone()))?,
        LabelColumn::Index(i) => {
            if *i >= header.len() {
                return Err(Error::LabelColumnNotFound(format!("#{i}")));
            }
            *i
        }
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_order: Vec<String> = Vec::new();

    for (rec_idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = rec_idx + 2; // 1-based, after the header
        if record.len() != header.len() {
            return Err(Error::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut row = Vec::with_capacity(header.len() - 1);
        for (j, field) in record.iter().enumerate() {
            if j == label_idx {
                continue;
            }
            let v: f64 = field.trim().parse().map_err(|_| Error::NonNumeric {
                line,
                column: header[j].to_string(),
                value: field.to_string(),
            })?;
            row.push(v);
        }
        let class_name = record[label_idx].trim().to_string();
        let next_id = class_ids.len();
        let id = *class_ids.entry(class_name.clone()).or_insert_with(|| {
            class_order.push(class_name);
            next_id
        });
        labels.push(id);
        rows.push(row);
    }

    if class_ids.len() < 2 {
        return Err(Error::TooFewClasses);
    }
    Dataset::from_rows(rows, labels, feature_names)
}

/// Per-column min-max parameters, fit on one dataset (the training split)
/// and applied to another (the test split) so normalization never leaks
/// test statistics.
#[derive(Debug, Clone)]
pub struct NormParams {
    mins: Vec<f64>,
    ranges: Vec<f64>,
}

impl NormParams {
    pub fn fit(d: &Dataset) -> NormParams {
        let mut mins = vec![f64::INFINITY; d.n_cols];
        let mut maxs = vec![f64::NEG_INFINITY; d.n_cols];
        for i in 0..d.n_rows {
            for (j, &v) in d.row(i).iter().enumerate() {
                mins[j] = mins[j].min(v);
                maxs[j] = maxs[j].max(v);
            }
        }
        let ranges = mins.iter().zip(&maxs).map(|(lo, hi)| hi - lo).collect();
        NormParams { mins, ranges }
    }

    /// Scales `d` with these parameters, clamping into `[0, 1]` so that test
    /// values outside the training range cannot break the dataset invariant.
    /// Columns that were constant at fit time map to zero.
    pub fn apply(&self, d: &Dataset) -> Dataset {
        self.transform(d, true)
    }

    fn apply_unclamped(&self, d: &Dataset) -> Dataset {
        self.transform(d, false)
    }

    fn transform(&self, d: &Dataset, clamp: bool) -> Dataset {
        assert_eq!(
            self.mins.len(),
            d.n_cols,
            "parameter/feature count mismatch"
        );
        let mut out = d.clone();
        for i in 0..d.n_rows {
            for j in 0..d.n_cols {
                let idx = i * d.n_cols + j;
                let v = if self.ranges[j] == 0.0 {
                    0.0
                } else {
                    (d.features[idx] - self.mins[j]) / self.ranges[j]
                };
                out.features[idx] = if clamp { v.clamp(0.0, 1.0) } else { v };
            }
        }
        out
    }
}

/// Splits per class: `round(train_fraction * class_count)` instances go to
/// the training side (clamped so both sides keep at least one per class).
/// Deterministic for a fixed seed; row order within each side follows the
/// original dataset.
pub fn stratified_split(d: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::BadTrainFraction(train_fraction));
    }
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); d.n_classes];
    for (i, &l) in d.labels.iter().enumerate() {
        per_class[l].push(i);
    }
    for (class, members) in per_class.iter().enumerate() {
        if members.len() < 2 {
            return Err(Error::ClassTooSmall {
                class,
                count: members.len(),
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for members in &mut per_class {
        let count = members.len();
        let want = (train_fraction * count as f64).round() as usize;
        let n_train = want.clamp(1, count - 1);
        members.shuffle(&mut rng);
        train_idx.extend_from_slice(&members[..n_train]);
        test_idx.extend_from_slice(&members[n_train..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((d.subset(&train_idx), d.subset(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_maps_labels_by_first_appearance() {
        let f = write_tmp("f1,f2,class\n1,2,A\n3,4,B\n5,6,A\n7,8,B\n");
        let d = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(d.n_instances(), 4);
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.labels(), &[0, 1, 0, 1]);
        assert_eq!(d.feature_names(), &["f1".to_string(), "f2".to_string()]);
    }

    #[test]
    fn load_by_column_index() {
        let f = write_tmp("y,a,b\nx,1,2\nz,3,4\n");
        let d = load_csv(f.path(), &LabelColumn::Index(0)).unwrap();
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.labels(), &[0, 1]);
    }

    #[test]
    fn load_rejects_single_class() {
        let f = write_tmp("f1,class\n1,A\n2,A\n3,A\n");
        let err = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        assert!(matches!(err, Error::TooFewClasses), "{err}");
    }

    #[test]
    fn load_rejects_ragged_rows() {
        let f = write_tmp("f1,f2,class\n1,2,A\n3,B\n");
        let err = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        assert!(matches!(err, Error::RaggedRow { line: 3, .. }), "{err}");
    }

    #[test]
    fn load_rejects_non_numeric_feature() {
        let f = write_tmp("f1,f2,class\n1,2,A\n3,oops,B\n");
        let err = load_csv(f.path(), &LabelColumn::Name("class".into())).unwrap_err();
        match err {
            Error::NonNumeric {
                line,
                column,
                value,
            } => {
                assert_eq!(line, 3);
                assert_eq!(column, "f2");
                assert_eq!(value, "oops");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_missing_file() {
        let err = load_csv(
            Path::new("/nonexistent/nothing.csv"),
            &LabelColumn::Index(0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Csv(_) | Error::Io(_)), "{err}");
    }

    #[test]
    fn load_wbcd_shaped_csv() {
        // 569 instances, 30 feature columns, 2 classes.
        let d = crate::synth::wbcd_like(1);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("wbcd_like.csv");
        d.write_csv(&path).unwrap();
        let loaded = load_csv(&path, &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(loaded.n_instances(), 569);
        assert_eq!(loaded.n_features(), 30);
        assert_eq!(loaded.n_classes(), 2);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let d = crate::synth::informative(20, 2, 5, 0.3, 9);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round.csv");
        d.write_csv(&path).unwrap();
        let loaded = load_csv(&path, &LabelColumn::Name("class".into())).unwrap();
        assert_eq!(d, loaded);
    }

    #[test]
    fn normalize_min_max_column() {
        let d = Dataset::from_rows(
            vec![vec![2.0], vec![4.0], vec![6.0]],
            vec![0, 1, 0],
            vec!["a".into()],
        )
        .unwrap();
        assert_eq!(d.normalize().column(0), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn normalize_constant_column_to_zeros() {
        let d = Dataset::from_rows(
            vec![vec![5.0, 1.0], vec![5.0, 2.0]],
            vec![0, 1],
            vec!["a".into(), "b".into()],
        )
        .unwrap();
        let n = d.normalize();
        assert_eq!(n.column(0), vec![0.0, 0.0]);
        assert_eq!(n.column(1), vec![0.0, 1.0]);
    }

    #[test]
    fn normalize_leaves_unit_column_unchanged() {
        let d = Dataset::from_rows(
            vec![vec![0.0], vec![0.25], vec![1.0]],
            vec![0, 1, 0],
            vec!["a".into()],
        )
        .unwrap();
        assert_eq!(d.normalize(), d);
    }

    #[test]
    fn norm_params_clamp_out_of_range_test_values() {
        let train =
            Dataset::from_rows(vec![vec![0.0], vec![10.0]], vec![0, 1], vec!["a".into()]).unwrap();
        let test =
            Dataset::from_rows(vec![vec![-5.0], vec![20.0]], vec![0, 1], vec!["a".into()]).unwrap();
        let applied = NormParams::fit(&train).apply(&test);
        assert_eq!(applied.column(0), vec![0.0, 1.0]);
    }

    #[test]
    fn split_10_instances_60_40() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let d = Dataset::from_rows(rows, labels, vec!["a".into()]).unwrap();
        let (train, test) = stratified_split(&d, 0.6, 3).unwrap();
        assert_eq!(train.n_instances(), 6);
        assert_eq!(test.n_instances(), 4);
        for class in 0..2 {
            assert_eq!(train.labels().iter().filter(|&&l| l == class).count(), 3);
            assert_eq!(test.labels().iter().filter(|&&l| l == class).count(), 2);
        }
    }

    #[test]
    fn split_is_deterministic() {
        let d = crate::synth::informative(40, 2, 4, 0.3, 11);
        let a = stratified_split(&d, 0.6, 42).unwrap();
        let b = stratified_split(&d, 0.6, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_rejects_singleton_class() {
        let d = Dataset::from_rows(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0, 0, 1],
            vec!["a".into()],
        )
        .unwrap();
        let err = stratified_split(&d, 0.6, 0).unwrap_err();
        assert!(matches!(err, Error::ClassTooSmall { class: 1, count: 1 }));
    }

    proptest! {
        #[test]
        fn split_is_a_partition(
            seed in 0u64..1000,
            n_per_class in 2usize..20,
            frac in 0.2f64..0.8,
        ) {
            let n = 2 * n_per_class;
            let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![i as f64]).collect();
            let labels: Vec<usize> = (0..n).map(|i| i % 2).collect();
            let d = Dataset::from_rows(rows, labels, vec!["a".into()]).unwrap();
            let (train, test) = stratified_split(&d, frac, seed).unwrap();

            prop_assert_eq!(train.n_instances() + test.n_instances(), n);
            let mut seen: Vec<f64> = train.column(0);
            seen.extend(test.column(0));
            seen.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let original: Vec<f64> = (0..n).map(|i| i as f64).collect();
            prop_assert_eq!(seen, original);

            // Per-class train share within one instance of the requested fraction.
            for class in 0..2 {
                let got = train.labels().iter().filter(|&&l| l == class).count() as f64;
                let want = frac * n_per_class as f64;
                prop_assert!((got - want).abs() <= 1.0);
            }
        }

        #[test]
        fn normalize_is_idempotent(seed in 0u64..200) {
            let d = crate::synth::informative(12, 1, 4, 0.5, seed);
            let once = d.normalize();
            let twice = once.normalize();
            prop_assert_eq!(once, twice);
        }
    }
}
