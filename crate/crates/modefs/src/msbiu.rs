//! Mutation-selection individual update.
//!
//! Each generation builds one candidate per slot from a DE mutant vector
//! that is Hadamard-scaled by the mean-shifted weights, then gated: feature
//! `j` enters the candidate mask only when its redundancy index sits below
//! `tau` and the scaled mutant component is positive. Candidates replace
//! their incumbents only when they dominate or, being mutually
//! nondominated, carry a strictly lower error rate.

use rayon::prelude::*;

use crate::classify::{Evaluate, ObjectivePair};
use crate::error::{Error, Result};
use crate::evo::{dominates, mutate, Individual, MutationStrategy, Population};
use crate::seed::{sub_rng, STREAM_MSBIU};
use crate::stats::FeatureStats;

/// Weights recentered on their mean; components sum to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftedWeights {
    pub q1: Vec<f64>,
}

pub fn mean_shift(q: &[f64]) -> ShiftedWeights {
    let mean = q.iter().sum::<f64>() / q.len() as f64;
    ShiftedWeights {
        q1: q.iter().map(|&w| w - mean).collect(),
    }
}

/// One replacement decision, kept for post-hoc soundness audits.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplacementEvent {
    pub generation: u64,
    pub slot: usize,
    pub incumbent: ObjectivePair,
    pub candidate: ObjectivePair,
    pub candidate_mask: Vec<bool>,
    pub accepted: bool,
}

/// The candidate mask rule: keep feature `j` iff `a_index[j] < tau` and the
/// weight-scaled mutant component `v[j] * q1[j]` is positive. An empty
/// result is repaired with the highest-weight feature overall.
pub fn candidate_mask(
    v: &[f64],
    shifted: &ShiftedWeights,
    a_index: &[f64],
    tau: f64,
    repair_feature: usize,
) -> Vec<bool> {
    let mut mask: Vec<bool> = v
        .iter()
        .zip(&shifted.q1)
        .zip(a_index)
        .map(|((&vj, &q1j), &aj)| aj < tau && vj * q1j > 0.0)
        .collect();
    if mask.iter().all(|&m| !m) {
        mask[repair_feature] = true;
    }
    mask
}

/// Replacement rule: dominate the incumbent, or be mutually nondominated
/// with strictly lower error.
pub fn replaces(candidate: ObjectivePair, incumbent: ObjectivePair) -> bool {
    if dominates(candidate, incumbent) {
        return true;
    }
    if dominates(incumbent, candidate) {
        return false;
    }
    candidate.er < incumbent.er
}

/// Runs one synchronous generation: every candidate is built against the
/// generation-start population, evaluated (in parallel), and applied at the
/// end. Returns the next population (generation counter advanced) and the
/// per-slot replacement log.
pub fn msbiu_step(
    pop: &Population,
    stats: &FeatureStats,
    strategy: MutationStrategy,
    f_scale: f64,
    theta: f64,
    seed: u64,
    evaluator: &dyn Evaluate,
) -> Result<(Population, Vec<ReplacementEvent>)> {
    if pop.len() < 4 {
        return Err(Error::PopulationTooSmall {
            need: 4,
            got: pop.len(),
        });
    }
    let next_gen = pop.generation + 1;
    let shifted = mean_shift(&stats.q);
    let repair = stats.argmax_q();

    let candidates: Vec<Individual> = (0..pop.len())
        .into_par_iter()
        .map(|slot| {
            let mut rng = sub_rng(seed, &[STREAM_MSBIU, next_gen, slot as u64]);
            let v = mutate(strategy, pop, slot, f_scale, &mut rng)?;
            let mask = candidate_mask(&v, &shifted, &stats.a_index, stats.tau, repair);
            let mut ind = Individual::from_mask(mask, theta, &mut rng);
            ind.set_objectives(evaluator.evaluate(&ind.mask));
            Ok(ind)
        })
        .collect::<Result<_>>()?;

    let mut members = Vec::with_capacity(pop.len());
    let mut events = Vec::with_capacity(pop.len());
    for (slot, (old, new)) in pop.members.iter().zip(candidates).enumerate() {
        let incumbent = old.objectives().ok_or(Error::Unevaluated(slot))?;
        let candidate = new.objectives().expect("candidate was just evaluated");
        let accepted = replaces(candidate, incumbent);
        events.push(ReplacementEvent {
            generation: next_gen,
            slot,
            incumbent,
            candidate,
            candidate_mask: new.mask.clone(),
            accepted,
        });
        members.push(if accepted { new } else { old.clone() });
    }

    Ok((
        Population {
            members,
            generation: next_gen,
        },
        events,
    ))
}
