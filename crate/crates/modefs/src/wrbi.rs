//! Weighted-redundancy balanced initialization: the starting population is
//! assembled from four subpopulations drawn from weight pools.
//!
//! * P1 — random subsets of the high-weight pool,
//! * P2 — random subsets of the low-weight pool (redundancy ignored),
//! * P3 — high-weight subsets with redundant features filtered out,
//! * P4 — high-weight subsets biased toward small cardinalities (the
//!   "elite" population; the bias is the observable difference from P1 and
//!   can be switched off).
//!
//! Any remainder after the even four-way division is topped up from the
//! high-weight pool.

use rand::Rng;
use rayon::prelude::*;

use crate::classify::Evaluate;
use crate::error::{Error, Result};
use crate::evo::{Individual, Population};
use crate::seed::{sub_rng, STREAM_INIT};
use crate::stats::FeatureStats;

/// The feature index pools: the top 60% of features by weight (descending,
/// ties broken by lower index) and the remaining bottom 40%.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightPools {
    pub high: Vec<usize>,
    pub low: Vec<usize>,
}

/// Sorts features by weight descending (ties: lower index first) and cuts
/// after `ceil(0.6 * D)`.
pub fn split_weight_pools(q: &[f64]) -> WeightPools {
    let d = q.len();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| q[b].partial_cmp(&q[a]).unwrap().then(a.cmp(&b)));
    let cut = (0.6 * d as f64).ceil() as usize;
    let low = order.split_off(cut.min(d));
    WeightPools { high: order, low }
}

/// Redundancy screen applied to P3 draws: features whose redundancy index
/// exceeds `tau` are dropped from the sampled subset.
#[derive(Debug, Clone, Copy)]
pub struct RedundancyFilter<'a> {
    pub a_index: &'a [f64],
    pub tau: f64,
}

/// Draws one individual from a pool: cardinality uniform in
/// `[1, max_cardinality]`, membership uniform without replacement, the
/// optional redundancy filter applied afterwards. A draw left empty by the
/// filter is repaired with the pool's highest-weight feature.
pub fn sample_individual(
    pool: &[usize],
    filter: Option<&RedundancyFilter>,
    q: &[f64],
    max_cardinality: usize,
    theta: f64,
    rng: &mut impl Rng,
) -> Result<Individual> {
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let cap = max_cardinality.clamp(1, pool.len());
    let cardinality = rng.random_range(1..=cap);

    let mut shuffled = pool.to_vec();
    for t in 0..cardinality {
        let pick = t + rng.random_range(0..shuffled.len() - t);
        shuffled.swap(t, pick);
    }
    let mut chosen: Vec<usize> = shuffled[..cardinality].to_vec();

    if let Some(f) = filter {
        chosen.retain(|&j| f.a_index[j] <= f.tau);
    }
    if chosen.is_empty() {
        // Repair: fall back to the pool's highest-weight feature.
        let best = pool
            .iter()
            .copied()
            .max_by(|&a, &b| q[a].partial_cmp(&q[b]).unwrap().then(b.cmp(&a)))
            .unwrap();
        chosen.push(best);
    }

    let mut mask = vec![false; q.len()];
    for j in chosen {
        mask[j] = true;
    }
    Ok(Individual::from_mask(mask, theta, rng))
}

#[derive(Clone, Copy)]
enum Subpop {
    HighFull,
    Low,
    HighFiltered,
    Elite,
}

/// Builds and evaluates the initial population of `pop_size` members.
/// Deterministic in `seed`: each slot draws from its own sub-seeded rng and
/// evaluation order cannot affect the result.
pub fn initialize(
    pop_size: usize,
    stats: &FeatureStats,
    theta: f64,
    elite_bias: bool,
    seed: u64,
    evaluator: &dyn Evaluate,
) -> Result<Population> {
    if pop_size < 4 {
        return Err(Error::PopulationTooSmall {
            need: 4,
            got: pop_size,
        });
    }
    let pools = split_weight_pools(&stats.q);
    let quarter = pop_size / 4;

    let mut plan: Vec<Subpop> = Vec::with_capacity(pop_size);
    for kind in [
        Subpop::HighFull,
        Subpop::Low,
        Subpop::HighFiltered,
        Subpop::Elite,
    ] {
        plan.extend(std::iter::repeat_n(kind, quarter));
    }
    while plan.len() < pop_size {
        plan.push(Subpop::HighFull);
    }

    let filter = RedundancyFilter {
        a_index: &stats.a_index,
        tau: stats.tau,
    };
    let elite_cap = if elite_bias {
        pools.high.len().div_ceil(4)
    } else {
        pools.high.len()
    };

    let mut members: Vec<Individual> = plan
        .iter()
        .enumerate()
        .map(|(slot, kind)| {
            let mut rng = sub_rng(seed, &[STREAM_INIT, slot as u64]);
            match kind {
                Subpop::HighFull => sample_individual(
                    &pools.high,
                    None,
                    &stats.q,
                    pools.high.len(),
                    theta,
                    &mut rng,
                ),
                Subpop::Low => {
                    sample_individual(&pools.low, None, &stats.q, pools.low.len(), theta, &mut rng)
                }
                Subpop::HighFiltered => sample_individual(
                    &pools.high,
                    Some(&filter),
                    &stats.q,
                    pools.high.len(),
                    theta,
                    &mut rng,
                ),
                Subpop::Elite => {
                    sample_individual(&pools.high, None, &stats.q, elite_cap, theta, &mut rng)
                }
            }
        })
        .collect::<Result<_>>()?;

    members.par_iter_mut().for_each(|ind| {
        let pair = evaluator.evaluate(&ind.mask);
        ind.set_objectives(pair);
    });

    Ok(Population::new(members))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::ObjectivePair;
    use crate::seed::sub_rng;
    use crate::stats::FeatureStats;

    /// Mask-counting evaluator: fr from the mask, er from a fixed rule.
    struct ToyEval;

    impl Evaluate for ToyEval {
        fn evaluate(&self, mask: &[bool]) -> ObjectivePair {
            let m = mask.iter().filter(|&&b| b).count();
            let d = mask.len();
            ObjectivePair::new(m as f64 / d as f64, 1.0 / (1.0 + m as f64))
        }
    }

    fn toy_stats(q: Vec<f64>, a_index: Vec<f64>, tau: f64) -> FeatureStats {
        let d = q.len();
        FeatureStats {
            q,
            a_matrix: vec![vec![0.0; d]; d],
            a_index,
            tau,
        }
    }

    #[test]
    fn pools_split_60_40() {
        let q: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let pools = split_weight_pools(&q);
        assert_eq!(pools.high.len(), 6);
        assert_eq!(pools.low.len(), 4);
        // Highest weights live at the top indices here.
        assert_eq!(pools.high, vec![9, 8, 7, 6, 5, 4]);
        assert_eq!(pools.low, vec![3, 2, 1, 0]);
    }

    #[test]
    fn pools_ceiling_rule_for_small_d() {
        let pools = split_weight_pools(&[0.1, 0.9, 0.5]);
        assert_eq!(pools.high.len(), 2); // ceil(1.8)
        assert_eq!(pools.low.len(), 1);
    }

    #[test]
    fn pools_break_ties_by_lower_index() {
        let pools = split_weight_pools(&[0.5; 5]);
        assert_eq!(pools.high, vec![0, 1, 2]);
        assert_eq!(pools.low, vec![3, 4]);
    }

    #[test]
    fn sampled_masks_stay_inside_the_pool() {
        let q = vec![0.9, 0.8, 0.7, 0.6, 0.5, 0.4];
        let pool = vec![0, 1, 2, 3, 4, 5];
        let mut rng = sub_rng(3, &[40]);
        for _ in 0..100 {
            let ind = sample_individual(&pool, None, &q, pool.len(), 0.6, &mut rng).unwrap();
            let selected = ind.selected();
            assert!(!selected.is_empty());
            assert!(selected.iter().all(|j| pool.contains(j)));
        }
    }

    #[test]
    fn filter_that_rejects_everything_triggers_repair() {
        let q = vec![0.2, 0.9, 0.5];
        let a_index = vec![0.8, 0.8, 0.8];
        let filter = RedundancyFilter {
            a_index: &a_index,
            tau: 0.5,
        };
        let pool = vec![0, 1, 2];
        let mut rng = sub_rng(5, &[41]);
        for _ in 0..20 {
            let ind =
                sample_individual(&pool, Some(&filter), &q, pool.len(), 0.6, &mut rng).unwrap();
            assert_eq!(
                ind.selected(),
                vec![1],
                "repair inserts the argmax-q feature"
            );
        }
    }

    #[test]
    fn empty_pool_is_an_error() {
        let mut rng = sub_rng(0, &[42]);
        let err = sample_individual(&[], None, &[0.5], 1, 0.6, &mut rng).unwrap_err();
        assert!(matches!(err, Error::EmptyPool));
    }

    #[test]
    fn cardinality_is_uniform_chi_squared() {
        // 10^4 draws from a pool of 8 with full cardinality range; compare
        // against the exact uniform pmf at a chi-squared threshold of 26.02
        // (7 degrees of freedom, far tail).
        let q: Vec<f64> = (0..8).map(|i| 0.1 + 0.1 * i as f64).collect();
        let pool: Vec<usize> = (0..8).collect();
        let mut rng = sub_rng(11, &[43]);
        let mut counts = [0usize; 8];
        let draws = 10_000;
        for _ in 0..draws {
            let ind = sample_individual(&pool, None, &q, 8, 0.6, &mut rng).unwrap();
            counts[ind.selected().len() - 1] += 1;
        }
        let expected = draws as f64 / 8.0;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let diff = c as f64 - expected;
                diff * diff / expected
            })
            .sum();
        assert!(chi2 < 26.02, "chi-squared {chi2} too large: {counts:?}");
    }

    #[test]
    fn initialize_divides_population_evenly() {
        let stats = toy_stats(
            (0..10).map(|i| i as f64 / 10.0).collect(),
            vec![0.1; 10],
            0.5,
        );
        let pop = initialize(20, &stats, 0.6, true, 1, &ToyEval).unwrap();
        assert_eq!(pop.len(), 20);
        assert!(pop.members.iter().all(|m| m.is_evaluated()));
    }

    #[test]
    fn initialize_tops_up_the_remainder() {
        let stats = toy_stats(
            (0..10).map(|i| i as f64 / 10.0).collect(),
            vec![0.1; 10],
            0.5,
        );
        let pop = initialize(10, &stats, 0.6, true, 2, &ToyEval).unwrap();
        assert_eq!(pop.len(), 10); // 2+2+2+2 plus 2 top-up
    }

    #[test]
    fn initialize_rejects_tiny_population() {
        let stats = toy_stats(vec![0.5; 4], vec![0.1; 4], 0.5);
        let err = initialize(3, &stats, 0.6, true, 0, &ToyEval).unwrap_err();
        assert!(matches!(err, Error::PopulationTooSmall { need: 4, got: 3 }));
    }

    #[test]
    fn subpopulation_masks_respect_their_pools() {
        // D = 10: high pool is the top-6 weight features, low pool the rest.
        let q: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
        let mut a_index = vec![0.1; 10];
        // Flag two high-pool features as redundant.
        a_index[9] = 0.9;
        a_index[8] = 0.9;
        let stats = toy_stats(q, a_index, 0.5);
        let pools = split_weight_pools(&stats.q);
        let pop = initialize(40, &stats, 0.6, true, 7, &ToyEval).unwrap();

        for (slot, member) in pop.members.iter().enumerate() {
            let selected = member.selected();
            assert!(!selected.is_empty(), "slot {slot} empty");
            if !(10..30).contains(&slot) {
                // P1, P4, and top-up draw from the high pool.
                assert!(selected.iter().all(|j| pools.high.contains(j)));
            } else if slot < 20 {
                // P2 draws from the low pool.
                assert!(selected.iter().all(|j| pools.low.contains(j)));
            } else {
                // P3: high pool minus redundant features, unless repaired.
                let repaired = selected == vec![9]; // argmax-q of the pool
                assert!(
                    repaired
                        || selected
                            .iter()
                            .all(|&j| pools.high.contains(&j) && stats.a_index[j] <= stats.tau),
                    "slot {slot}: {selected:?}"
                );
            }
        }
    }

    #[test]
    fn initialize_is_deterministic() {
        let stats = toy_stats(
            (0..12).map(|i| (i as f64 * 0.37).fract()).collect(),
            vec![0.2; 12],
            0.5,
        );
        let a = initialize(16, &stats, 0.6, true, 33, &ToyEval).unwrap();
        let b = initialize(16, &stats, 0.6, true, 33, &ToyEval).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn elite_bias_caps_cardinality() {
        let q: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let stats = toy_stats(q, vec![0.1; 20], 0.5);
        let pools = split_weight_pools(&stats.q);
        let cap = pools.high.len().div_ceil(4);
        let pop = initialize(40, &stats, 0.6, true, 9, &ToyEval).unwrap();
        // Slots 30..40 are the elite subpopulation.
        for member in &pop.members[30..40] {
            assert!(member.selected().len() <= cap);
        }
    }
}
