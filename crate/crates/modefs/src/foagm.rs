//! Adaptive grid density control in objective space.
//!
//! The population is binned into an `n x n` grid over its own objective
//! bounds. Cells holding more than `rho` members are subdivided 2x2 until
//! they thin out or the depth cap is reached; members of the leaves that
//! stay dense are then nondominated-sorted, the best are retained, and the
//! rest are refined by swapping their lowest-weight feature for the best
//! unselected one (highest weight over redundancy).

use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{Evaluate, ObjectivePair};
use crate::error::Result;
use crate::evo::{dominates, nondominated_sort_pairs, Individual, Population};
use crate::seed::{sub_rng, STREAM_FOAGM};
use crate::stats::FeatureStats;

/// Floor for the redundancy divisor in the replacement score `q / a`.
pub const REDUNDANCY_EPS: f64 = 1e-6;

/// Objective-space rectangle, derived from the population being gridded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridBounds {
    pub min_f1: f64,
    pub max_f1: f64,
    pub min_f2: f64,
    pub max_f2: f64,
}

impl GridBounds {
    pub fn of(objs: &[ObjectivePair]) -> GridBounds {
        let mut b = GridBounds {
            min_f1: f64::INFINITY,
            max_f1: f64::NEG_INFINITY,
            min_f2: f64::INFINITY,
            max_f2: f64::NEG_INFINITY,
        };
        for p in objs {
            b.min_f1 = b.min_f1.min(p.fr);
            b.max_f1 = b.max_f1.max(p.fr);
            b.min_f2 = b.min_f2.min(p.er);
            b.max_f2 = b.max_f2.max(p.er);
        }
        b
    }

    /// Half-open binning along one axis; the maximum folds into the last
    /// cell and a zero-range axis collapses to a single cell.
    fn axis_cell(value: f64, lo: f64, hi: f64, n: usize) -> usize {
        if hi <= lo {
            return 0;
        }
        let step = (hi - lo) / n as f64;
        let idx = ((value - lo) / step).floor() as isize;
        idx.clamp(0, n as isize - 1) as usize
    }

    pub fn cell_of(&self, p: ObjectivePair, n: usize) -> (usize, usize) {
        (
            Self::axis_cell(p.fr, self.min_f1, self.max_f1, n),
            Self::axis_cell(p.er, self.min_f2, self.max_f2, n),
        )
    }

    /// The rectangle of one cell in an `n x n` division of these bounds.
    fn cell_bounds(&self, cell: (usize, usize), n: usize) -> GridBounds {
        let dx = (self.max_f1 - self.min_f1) / n as f64;
        let dy = (self.max_f2 - self.min_f2) / n as f64;
        GridBounds {
            min_f1: self.min_f1 + cell.0 as f64 * dx,
            max_f1: self.min_f1 + (cell.0 + 1) as f64 * dx,
            min_f2: self.min_f2 + cell.1 as f64 * dy,
            max_f2: self.min_f2 + (cell.1 + 1) as f64 * dy,
        }
    }
}

/// The top-level population grid: cell coordinate to member slots.
#[derive(Debug, Clone)]
pub struct Grid {
    pub n: usize,
    pub bounds: GridBounds,
    pub cells: HashMap<(usize, usize), Vec<usize>>,
}

impl Grid {
    pub fn build(objs: &[ObjectivePair], n: usize) -> Grid {
        let bounds = GridBounds::of(objs);
        let mut cells: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (i, &p) in objs.iter().enumerate() {
            cells.entry(bounds.cell_of(p, n)).or_default().push(i);
        }
        Grid { n, bounds, cells }
    }

    pub fn assign(&self, p: ObjectivePair) -> (usize, usize) {
        self.bounds.cell_of(p, self.n)
    }
}

/// Cells whose member count strictly exceeds the density threshold,
/// in deterministic coordinate order.
pub fn find_dense_cells(grid: &Grid, rho_threshold: usize) -> Vec<(usize, usize)> {
    let mut dense: Vec<(usize, usize)> = grid
        .cells
        .iter()
        .filter(|(_, members)| members.len() > rho_threshold)
        .map(|(&cell, _)| cell)
        .collect();
    dense.sort_unstable();
    dense
}

fn collect_dense_leaves(
    members: &[usize],
    objs: &[ObjectivePair],
    bounds: &GridBounds,
    rho_threshold: usize,
    depth: usize,
    max_depth: usize,
    out: &mut Vec<Vec<usize>>,
) {
    if members.len() <= rho_threshold {
        return;
    }
    if depth >= max_depth {
        out.push(members.to_vec());
        return;
    }
    let mut sub: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for &i in members {
        sub.entry(bounds.cell_of(objs[i], 2)).or_default().push(i);
    }
    let mut coords: Vec<(usize, usize)> = sub.keys().copied().collect();
    coords.sort_unstable();
    for cell in coords {
        let inner = bounds.cell_bounds(cell, 2);
        collect_dense_leaves(
            &sub[&cell],
            objs,
            &inner,
            rho_threshold,
            depth + 1,
            max_depth,
            out,
        );
    }
}

/// Recursively subdivides one dense cell 2x2 and returns the member groups
/// of the leaves that are still dense after `max_depth` levels.
pub fn subdivide(
    grid: &Grid,
    cell: (usize, usize),
    objs: &[ObjectivePair],
    rho_threshold: usize,
    max_depth: usize,
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if let Some(members) = grid.cells.get(&cell) {
        let bounds = grid.bounds.cell_bounds(cell, grid.n);
        collect_dense_leaves(
            members,
            objs,
            &bounds,
            rho_threshold,
            0,
            max_depth,
            &mut out,
        );
    }
    out
}

/// Swaps the selected feature with the lowest weight for the unselected
/// feature with the best weight-to-redundancy score (`q / max(a, eps)`;
/// ties on either side go to the lower index). Subset size is preserved.
/// A full mask is returned unchanged, re-evaluation included.
pub fn refine_individual(
    ind: &Individual,
    stats: &FeatureStats,
    theta: f64,
    rng: &mut impl Rng,
    evaluator: &dyn Evaluate,
) -> Individual {
    let selected = ind.selected();
    if selected.len() == ind.mask.len() || selected.is_empty() {
        return ind.clone();
    }

    let mut j_min = selected[0];
    for &j in &selected {
        if stats.q[j] < stats.q[j_min] {
            j_min = j;
        }
    }

    let mut j_new = None;
    let mut best_score = f64::NEG_INFINITY;
    for j in 0..ind.mask.len() {
        if ind.mask[j] {
            continue;
        }
        let score = stats.q[j] / stats.a_index[j].max(REDUNDANCY_EPS);
        if score > best_score {
            best_score = score;
            j_new = Some(j);
        }
    }
    let j_new = j_new.expect("non-full mask has an unselected feature");

    let mut mask = ind.mask.clone();
    mask[j_min] = false;
    mask[j_new] = true;
    let mut refined = Individual::from_mask(mask, theta, rng);
    refined.set_objectives(evaluator.evaluate(&refined.mask));
    refined
}

/// What to do with a refined individual that scores worse than the
/// original.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RefineAccept {
    /// Replace unconditionally (the default).
    #[default]
    Always,
    /// Keep the original when it dominates the refined candidate.
    NonDominated,
}

impl std::str::FromStr for RefineAccept {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "always" => Ok(RefineAccept::Always),
            "non-dominated" | "nondominated" => Ok(RefineAccept::NonDominated),
            other => Err(format!(
                "unknown refine acceptance {other:?} (expected always|non-dominated)"
            )),
        }
    }
}

/// One refinement, with both masks kept so audits can recompute the
/// removed/added features instead of trusting the log.
#[derive(Debug, Clone, PartialEq)]
pub struct RefinementEvent {
    pub generation: u64,
    pub slot: usize,
    pub mask_before: Vec<bool>,
    pub mask_after: Vec<bool>,
    pub before: ObjectivePair,
    pub after: ObjectivePair,
    pub applied: bool,
}

/// Runs the density-control pass over one evaluated population. Population
/// size is preserved; only members of dense leaves can change.
#[allow(clippy::too_many_arguments)]
pub fn foagm_step(
    pop: &Population,
    stats: &FeatureStats,
    grid_n: usize,
    rho_threshold: usize,
    max_depth: usize,
    theta: f64,
    accept: RefineAccept,
    seed: u64,
    evaluator: &dyn Evaluate,
) -> Result<(Population, Vec<RefinementEvent>)> {
    let objs = pop.objectives()?;
    let grid = Grid::build(&objs, grid_n);

    // Which slots to refine, decided cell by cell.
    let mut to_refine: Vec<usize> = Vec::new();
    for cell in find_dense_cells(&grid, rho_threshold) {
        for leaf in subdivide(&grid, cell, &objs, rho_threshold, max_depth) {
            let local: Vec<ObjectivePair> = leaf.iter().map(|&i| objs[i]).collect();
            let fronts = nondominated_sort_pairs(&local);
            if fronts.len() > 1 {
                for front in &fronts[1..] {
                    to_refine.extend(front.iter().map(|&l| leaf[l]));
                }
            } else {
                // Everyone is nondominated: keep the rho_threshold members
                // with the lowest error, refine the rest.
                let mut order: Vec<usize> = leaf.clone();
                order.sort_by(|&a, &b| {
                    objs[a]
                        .er
                        .partial_cmp(&objs[b].er)
                        .unwrap()
                        .then(objs[a].fr.partial_cmp(&objs[b].fr).unwrap())
                        .then(a.cmp(&b))
                });
                to_refine.extend(order.into_iter().skip(rho_threshold));
            }
        }
    }
    to_refine.sort_unstable();
    to_refine.dedup();

    let refined: Vec<(usize, Individual)> = to_refine
        .par_iter()
        .map(|&slot| {
            let mut rng = sub_rng(seed, &[STREAM_FOAGM, pop.generation, slot as u64]);
            let ind = refine_individual(&pop.members[slot], stats, theta, &mut rng, evaluator);
            (slot, ind)
        })
        .collect();

    let mut members = pop.members.clone();
    let mut events = Vec::with_capacity(refined.len());
    for (slot, ind) in refined {
        let before = objs[slot];
        let after = ind.objectives().expect("refined member was evaluated");
        let applied = match accept {
            RefineAccept::Always => true,
            RefineAccept::NonDominated => !dominates(before, after),
        };
        events.push(RefinementEvent {
            generation: pop.generation,
            slot,
            mask_before: pop.members[slot].mask.clone(),
            mask_after: ind.mask.clone(),
            before,
            after,
            applied,
        });
        if applied {
            members[slot] = ind;
        }
    }

    Ok((
        Population {
            members,
            generation: pop.generation,
        },
        events,
    ))
}
