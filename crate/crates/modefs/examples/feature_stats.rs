//! Feature weights and redundancy on a dataset with known structure:
//! which features the FCM ranks high, how duplicated columns light up the
//! cosine redundancy index, and where the median threshold tau lands.
//!
//!     cargo run --release --example feature_stats

use modefs::engine::{prepare_splits, RunConfig};
use modefs::stats::{FeatureStats, RedundancyOptions};
use modefs::synth;
use modefs::wrbi::split_weight_pools;

fn main() {
    // Features 1-2 informative, 9-10 exact copies of feature 1.
    let dataset = synth::with_duplicates(60, 8, 2, 0.25, 3);
    let config = RunConfig::default();
    let (train, _) = prepare_splits(&config, &dataset).expect("split failed");

    let stats = FeatureStats::compute(
        &train,
        config.fcm_epochs,
        config.fcm_learning_rate,
        config.seed,
        &RedundancyOptions::default(),
    );

    println!(
        "tau (median off-diagonal cosine similarity) = {:.4}\n",
        stats.tau
    );
    println!("{:<8} {:>8} {:>9}  flagged", "feature", "q", "a_index");
    for j in 0..train.n_features() {
        println!(
            "{:<8} {:>8.4} {:>9.4}  {}",
            train.feature_names()[j],
            stats.q[j],
            stats.a_index[j],
            if stats.a_index[j] > stats.tau {
                "redundant"
            } else {
                ""
            }
        );
    }

    let pools = split_weight_pools(&stats.q);
    println!("\nhigh-weight pool (top 60%): {:?}", pools.high);
    println!("low-weight pool  (bottom 40%): {:?}", pools.low);
}
