//! Weighted-redundancy balanced initialization versus plain uniform-random
//! initialization: hypervolume of the generation-0 nondominated set, over
//! ten seeds.
//!
//!     cargo run --release --example init_comparison

use modefs::classify::{Evaluate, KnnEvaluator};
use modefs::engine::{prepare_splits, RunConfig};
use modefs::evo::{nondominated_sort_pairs, Individual, Population};
use modefs::seed::sub_rng;
use modefs::stats::{FeatureStats, RedundancyOptions};
use modefs::{hypervolume, synth, wrbi};
use rand::Rng;

fn rank0_hv(pop: &Population) -> f64 {
    let objs = pop.objectives().unwrap();
    let rank0: Vec<_> = nondominated_sort_pairs(&objs)[0]
        .iter()
        .map(|&i| objs[i])
        .collect();
    hypervolume(&rank0, (1.0, 1.0))
}

fn main() {
    let dataset = synth::informative(80, 3, 20, 0.25, 77);
    let config = RunConfig {
        pop_size: Some(40),
        ..RunConfig::default()
    };
    let (train, _) = prepare_splits(&config, &dataset).expect("split failed");
    let evaluator = KnnEvaluator::new(&train, config.knn_k);
    let d = train.n_features();

    println!("{:>4} {:>10} {:>10}", "seed", "weighted", "uniform");
    let mut wins = 0;
    for seed in 0..10u64 {
        let stats = FeatureStats::compute(
            &train,
            config.fcm_epochs,
            config.fcm_learning_rate,
            seed,
            &RedundancyOptions::default(),
        );
        let weighted = wrbi::initialize(40, &stats, config.theta, true, seed, &evaluator)
            .expect("initialization failed");

        let mut rng = sub_rng(seed, &[0xDEAD]);
        let members: Vec<Individual> = (0..40)
            .map(|_| {
                let pos: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
                let mut ind = Individual::from_position(pos, config.theta);
                let pair = evaluator.evaluate(&ind.mask);
                ind.set_objectives(pair);
                ind
            })
            .collect();
        let uniform = Population::new(members);

        let (hw, hu) = (rank0_hv(&weighted), rank0_hv(&uniform));
        if hw >= hu {
            wins += 1;
        }
        println!("{seed:>4} {hw:>10.4} {hu:>10.4}");
    }
    println!("\nweighted initialization wins {wins}/10 seeds");
}
