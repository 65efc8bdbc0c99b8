//! Repeated runs over one fixed split, reported mean +/- std, with IGD
//! against the exhaustive reference front.
//!
//!     cargo run --release --example batch_aggregate

use modefs::engine::{prepare_splits, run_batch, RunConfig};
use modefs::{exhaustive_pareto, synth};

fn main() {
    let dataset = synth::with_duplicates(60, 8, 2, 0.25, 3);
    let config = RunConfig {
        pop_size: Some(50),
        max_generations: 50,
        ..RunConfig::default()
    };

    let (train, _) = prepare_splits(&config, &dataset).expect("split failed");
    let reference = exhaustive_pareto(&train, config.knn_k, 12).expect("oracle failed");

    let batch = run_batch(&config, &dataset, 10, Some(&reference)).expect("batch failed");

    println!("10 runs, seeds {}..{}:", config.seed, config.seed + 9);
    println!("  hv:  {}", batch.hv);
    println!("  igd: {}", batch.igd.expect("reference was supplied"));
    println!("\nper run:");
    for r in &batch.runs {
        println!(
            "  seed {:>2}: hv {:.4}  igd {:.5}  front size {}",
            r.seed,
            r.final_hv,
            r.igd.unwrap(),
            r.result.front.len()
        );
    }
}
