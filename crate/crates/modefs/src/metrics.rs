//! Front quality indicators (hypervolume, IGD) and the exhaustive Pareto
//! oracle for small feature counts.

use std::path::Path;

use rayon::prelude::*;

use crate::classify::{evaluate, ObjectivePair};
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::evo::{dominates, nondominated_sort_pairs};

/// A nondominated set of objective points, sorted by ascending feature
/// ratio (hence strictly descending error after duplicate removal). Serves
/// as the ground truth for IGD.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFront {
    points: Vec<ObjectivePair>,
}

impl ReferenceFront {
    /// Keeps the nondominated subset, removes duplicate points, sorts by fr.
    pub fn from_points(candidates: Vec<ObjectivePair>) -> ReferenceFront {
        let mut keep: Vec<ObjectivePair> = Vec::new();
        for c in candidates {
            if keep.iter().any(|&k| dominates(k, c)) {
                continue;
            }
            keep.retain(|&k| !dominates(c, k));
            let duplicate = keep
                .iter()
                .any(|k| k.fr.to_bits() == c.fr.to_bits() && k.er.to_bits() == c.er.to_bits());
            if !duplicate {
                keep.push(c);
            }
        }
        keep.sort_by(|a, b| a.fr.partial_cmp(&b.fr).unwrap());
        ReferenceFront { points: keep }
    }

    pub fn points(&self) -> &[ObjectivePair] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Two-column CSV (`fr,er`), one row per point.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["fr", "er"])?;
        for p in &self.points {
            w.write_record([p.fr.to_string(), p.er.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<ReferenceFront> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_path(path)?;
        let mut points = Vec::new();
        for (idx, record) in reader.records().enumerate() {
            let record = record?;
            let parse = |field: usize| -> Result<f64> {
                record
                    .get(field)
                    .and_then(|s| s.trim().parse().ok())
                    .ok_or_else(|| Error::NonNumeric {
                        line: idx + 2,
                        column: if field == 0 { "fr" } else { "er" }.into(),
                        value: record.get(field).unwrap_or("").to_string(),
                    })
            };
            points.push(ObjectivePair::new(parse(0)?, parse(1)?));
        }
        if points.is_empty() {
            return Err(Error::EmptyReference);
        }
        Ok(ReferenceFront::from_points(points))
    }
}

/// Exact two-objective hypervolume against `ref_point` by the sorted sweep.
///
/// Points that fail to strictly dominate the reference point contribute
/// nothing and are discarded up front, as are dominated points (they add no
/// volume). An empty front yields 0.
pub fn hypervolume(points: &[ObjectivePair], ref_point: (f64, f64)) -> f64 {
    let (r1, r2) = ref_point;
    let inside: Vec<ObjectivePair> = points
        .iter()
        .copied()
        .filter(|p| p.fr < r1 && p.er < r2)
        .collect();
    if inside.is_empty() {
        return 0.0;
    }
    let fronts = nondominated_sort_pairs(&inside);
    let mut sweep: Vec<ObjectivePair> = fronts[0].iter().map(|&i| inside[i]).collect();
    sweep.sort_by(|a, b| a.fr.partial_cmp(&b.fr).unwrap());
    sweep.dedup_by(|a, b| a.fr == b.fr && a.er == b.er);

    let mut hv = 0.0;
    for (i, p) in sweep.iter().enumerate() {
        let next_fr = if i + 1 < sweep.len() {
            sweep[i + 1].fr
        } else {
            r1
        };
        hv += (next_fr - p.fr) * (r2 - p.er);
    }
    hv
}

/// Mean distance from each reference point to its nearest front point.
/// An empty front maps to +inf; an empty reference is an error.
pub fn igd(front: &[ObjectivePair], reference: &ReferenceFront) -> Result<f64> {
    if reference.is_empty() {
        return Err(Error::EmptyReference);
    }
    if front.is_empty() {
        return Ok(f64::INFINITY);
    }
    let total: f64 = reference
        .points()
        .iter()
        .map(|r| {
            front
                .iter()
                .map(|p| ((p.fr - r.fr).powi(2) + (p.er - r.er).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    Ok(total / reference.len() as f64)
}

/// Evaluates every nonempty feature subset with the engine's own fitness
/// definition and returns the exact Pareto front. Cost is `2^D - 1`
/// leave-one-out evaluations, so `D` is capped by `max_features` (at most
/// 20).
pub fn exhaustive_pareto(train: &Dataset, k: usize, max_features: usize) -> Result<ReferenceFront> {
    let d = train.n_features();
    let limit = max_features.min(20);
    if d > limit {
        return Err(Error::TooManyFeatures { d, limit });
    }
    let total: u64 = (1u64 << d) - 1;
    let points: Vec<ObjectivePair> = (1..=total)
        .into_par_iter()
        .map(|bits| {
            let mask: Vec<bool> = (0..d).map(|j| bits >> j & 1 == 1).collect();
            evaluate(&mask, train, k)
        })
        .collect();
    Ok(ReferenceFront::from_points(points))
}
