//! Real-coded individuals, Pareto dominance, nondominated sorting, and the
//! classical differential-evolution operators.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classify::ObjectivePair;
use crate::error::{Error, Result};

/// One candidate solution: a position in `[0, 1]^D`, its decoded feature
/// mask, and (once scored) the objective pair. The mask always equals
/// `decode(position, theta)` for the theta it was built with.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub position: Vec<f64>,
    pub mask: Vec<bool>,
    objectives: Option<ObjectivePair>,
}

impl Individual {
    pub fn from_position(position: Vec<f64>, theta: f64) -> Self {
        let mask = decode(&position, theta);
        Individual {
            position,
            mask,
            objectives: None,
        }
    }

    pub fn from_mask(mask: Vec<bool>, theta: f64, rng: &mut impl Rng) -> Self {
        let position = encode(&mask, theta, rng);
        Individual {
            position,
            mask,
            objectives: None,
        }
    }

    pub fn objectives(&self) -> Option<ObjectivePair> {
        self.objectives
    }

    pub fn set_objectives(&mut self, pair: ObjectivePair) {
        self.objectives = Some(pair);
    }

    pub fn is_evaluated(&self) -> bool {
        self.objectives.is_some()
    }

    /// Indices of the selected features.
    pub fn selected(&self) -> Vec<usize> {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(j, _)| j)
            .collect()
    }
}

/// An ordered population plus its generation counter.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub generation: u64,
}

impl Population {
    pub fn new(members: Vec<Individual>) -> Self {
        Population {
            members,
            generation: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Objective pairs of all members, or the slot of the first unevaluated
    /// one.
    pub fn objectives(&self) -> Result<Vec<ObjectivePair>> {
        self.members
            .iter()
            .enumerate()
            .map(|(i, ind)| ind.objectives().ok_or(Error::Unevaluated(i)))
            .collect()
    }
}

/// `mask[j] = position[j] >= theta` (boundary inclusive).
pub fn decode(position: &[f64], theta: f64) -> Vec<bool> {
    position.iter().map(|&x| x >= theta).collect()
}

/// Inverse of [`decode`]: selected components draw uniformly from
/// `[theta, 1]`, unselected ones from `[0, theta)`, so the round trip is the
/// identity on masks.
pub fn encode(mask: &[bool], theta: f64, rng: &mut impl Rng) -> Vec<f64> {
    mask.iter()
        .map(|&m| {
            if m {
                rng.random_range(theta..=1.0)
            } else {
                rng.random_range(0.0..theta)
            }
        })
        .collect()
}

/// Strict Pareto dominance under minimization of both objectives.
pub fn dominates(a: ObjectivePair, b: ObjectivePair) -> bool {
    a.fr <= b.fr && a.er <= b.er && (a.fr < b.fr || a.er < b.er)
}

/// Pareto ranking: returns index fronts, rank 0 first. The fronts partition
/// `0..objs.len()`.
pub fn nondominated_sort_pairs(objs: &[ObjectivePair]) -> Vec<Vec<usize>> {
    let n = objs.len();
    let mut dominated_by: Vec<usize> = vec![0; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dominates(objs[i], objs[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(objs[j], objs[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut fronts: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// [`nondominated_sort_pairs`] over a population; errors if any member is
/// still unevaluated.
pub fn nondominated_sort(pop: &Population) -> Result<Vec<Vec<usize>>> {
    Ok(nondominated_sort_pairs(&pop.objectives()?))
}

/// The donor pick for `best/*` mutation: the rank-0 member with the lowest
/// error rate (ties: lower feature ratio, then lower index).
pub fn best_index(pop: &Population) -> Result<usize> {
    let objs = pop.objectives()?;
    let rank0 = &nondominated_sort_pairs(&objs)[0];
    let mut best = rank0[0];
    for &i in rank0 {
        let (a, b) = (objs[i], objs[best]);
        if a.er < b.er || (a.er == b.er && a.fr < b.fr) {
            best = i;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationStrategy {
    Rand1,
    Rand2,
    Best1,
    Best2,
    CurrentToBest1,
}

impl MutationStrategy {
    /// How many distinct random donors the formula consumes.
    pub fn donor_count(&self) -> usize {
        match self {
            MutationStrategy::Rand1 => 3,
            MutationStrategy::Rand2 => 5,
            MutationStrategy::Best1 => 2,
            MutationStrategy::Best2 => 4,
            MutationStrategy::CurrentToBest1 => 2,
        }
    }

    fn uses_best(&self) -> bool {
        matches!(
            self,
            MutationStrategy::Best1 | MutationStrategy::Best2 | MutationStrategy::CurrentToBest1
        )
    }
}

impl std::fmt::Display for MutationStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MutationStrategy::Rand1 => "rand/1",
            MutationStrategy::Rand2 => "rand/2",
            MutationStrategy::Best1 => "best/1",
            MutationStrategy::Best2 => "best/2",
            MutationStrategy::CurrentToBest1 => "current-to-best/1",
        };
        f.pad(s)
    }
}

impl std::str::FromStr for MutationStrategy {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "rand/1" | "rand1" => Ok(MutationStrategy::Rand1),
            "rand/2" | "rand2" => Ok(MutationStrategy::Rand2),
            "best/1" | "best1" => Ok(MutationStrategy::Best1),
            "best/2" | "best2" => Ok(MutationStrategy::Best2),
            "current-to-best/1" | "current-to-best1" => Ok(MutationStrategy::CurrentToBest1),
            other => Err(format!(
                "unknown mutation strategy {other:?} \
                 (expected rand/1, rand/2, best/1, best/2, current-to-best/1)"
            )),
        }
    }
}

/// The mutation arithmetic with donors supplied explicitly (unit-testable
/// without a population). Output is clamped to `[0, 1]` componentwise.
pub fn mutant_vector(
    strategy: MutationStrategy,
    current: &[f64],
    best: &[f64],
    donors: &[&[f64]],
    f_scale: f64,
) -> Vec<f64> {
    assert_eq!(donors.len(), strategy.donor_count(), "donor count");
    let d = current.len();
    let mut v = vec![0.0; d];
    for j in 0..d {
        let x = match strategy {
            MutationStrategy::Rand1 => donors[0][j] + f_scale * (donors[1][j] - donors[2][j]),
            MutationStrategy::Rand2 => {
                donors[0][j]
                    + f_scale * (donors[1][j] - donors[2][j])
                    + f_scale * (donors[3][j] - donors[4][j])
            }
            MutationStrategy::Best1 => best[j] + f_scale * (donors[0][j] - donors[1][j]),
            MutationStrategy::Best2 => {
                best[j]
                    + f_scale * (donors[0][j] - donors[1][j])
                    + f_scale * (donors[2][j] - donors[3][j])
            }
            MutationStrategy::CurrentToBest1 => {
                current[j]
                    + f_scale * (best[j] - current[j])
                    + f_scale * (donors[0][j] - donors[1][j])
            }
        };
        v[j] = x.clamp(0.0, 1.0);
    }
    v
}

/// Samples `count` mutually distinct indices from `0..n`, all different from
/// `exclude`, by a partial Fisher-Yates shuffle.
fn sample_distinct(n: usize, exclude: usize, count: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut candidates: Vec<usize> = (0..n).filter(|&i| i != exclude).collect();
    for t in 0..count {
        let pick = t + rng.random_range(0..candidates.len() - t);
        candidates.swap(t, pick);
    }
    candidates.truncate(count);
    candidates
}

/// Builds the mutant vector for slot `i` with uniformly sampled, mutually
/// distinct donors (all different from `i`).
pub fn mutate(
    strategy: MutationStrategy,
    pop: &Population,
    i: usize,
    f_scale: f64,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let need = strategy.donor_count() + 1;
    if pop.len() < need {
        return Err(Error::PopulationTooSmall {
            need,
            got: pop.len(),
        });
    }
    let best_pos = if strategy.uses_best() {
        pop.members[best_index(pop)?].position.clone()
    } else {
        Vec::new()
    };
    let donor_idx = sample_distinct(pop.len(), i, strategy.donor_count(), rng);
    let donors: Vec<&[f64]> = donor_idx
        .iter()
        .map(|&r| pop.members[r].position.as_slice())
        .collect();
    Ok(mutant_vector(
        strategy,
        &pop.members[i].position,
        &best_pos,
        &donors,
        f_scale,
    ))
}

/// Binomial crossover: each component comes from `v` with probability `cr`,
/// and the uniformly drawn forced index `j_rand` always does.
pub fn crossover(x: &[f64], v: &[f64], cr: f64, rng: &mut impl Rng) -> Vec<f64> {
    assert_eq!(x.len(), v.len(), "parent lengths");
    let j_rand = rng.random_range(0..x.len());
    x.iter()
        .zip(v)
        .enumerate()
        .map(|(j, (&xj, &vj))| {
            if rng.random_range(0.0..1.0) < cr || j == j_rand {
                vj
            } else {
                xj
            }
        })
        .collect()
}

/// Scalar-fitness selection: the trial `u` survives iff its fitness is no
/// worse than the incumbent's.
pub fn classic_select<'a>(
    x: &'a Individual,
    u: &'a Individual,
    fitness: impl Fn(ObjectivePair) -> f64,
) -> Result<&'a Individual> {
    let fx = fitness(x.objectives().ok_or(Error::Unevaluated(0))?);
    let fu = fitness(u.objectives().ok_or(Error::Unevaluated(1))?);
    Ok(if fu <= fx { u } else { x })
}

/// A nondominated set of solutions with their masks. Construction filters
/// dominated members and removes exact duplicates (same mask and same
/// objectives); distinct masks with equal objectives both survive.
#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    members: Vec<FrontMember>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontMember {
    pub mask: Vec<bool>,
    pub objectives: ObjectivePair,
}

impl Front {
    pub fn from_members(candidates: Vec<FrontMember>) -> Front {
        let mut keep: Vec<FrontMember> = Vec::new();
        for c in candidates {
            if keep.iter().any(|k| dominates(k.objectives, c.objectives)) {
                continue;
            }
            keep.retain(|k| !dominates(c.objectives, k.objectives));
            let duplicate = keep.iter().any(|k| {
                k.mask == c.mask
                    && k.objectives.fr.to_bits() == c.objectives.fr.to_bits()
                    && k.objectives.er.to_bits() == c.objectives.er.to_bits()
            });
            if !duplicate {
                keep.push(c);
            }
        }
        keep.sort_by(|a, b| {
            a.objectives
                .fr
                .partial_cmp(&b.objectives.fr)
                .unwrap()
                .then(a.objectives.er.partial_cmp(&b.objectives.er).unwrap())
                .then(a.mask.cmp(&b.mask))
        });
        Front { members: keep }
    }

    pub fn members(&self) -> &[FrontMember] {
        &self.members
    }

    pub fn points(&self) -> Vec<ObjectivePair> {
        self.members.iter().map(|m| m.objectives).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
