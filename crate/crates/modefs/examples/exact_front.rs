//! Exhaustive Pareto oracle: enumerate all 2^D - 1 feature subsets of a
//! small dataset, print the exact front, then measure how close one
//! optimization run gets to it (IGD).
//!
//!     cargo run --release --example exact_front

use modefs::engine::{prepare_splits, run, RunConfig};
use modefs::{exhaustive_pareto, igd, synth, ObjectivePair};

fn main() {
    let dataset = synth::informative(60, 2, 10, 0.3, 2);
    let config = RunConfig {
        pop_size: Some(50),
        max_generations: 50,
        seed: 0,
        ..RunConfig::default()
    };

    // The oracle must score masks against the same training split the
    // engine uses, so derive it through the same preparation step.
    let (train, _) = prepare_splits(&config, &dataset).expect("split failed");
    let reference = exhaustive_pareto(&train, config.knn_k, 12).expect("oracle failed");

    println!(
        "exact front ({} points over 2^10 - 1 subsets):",
        reference.len()
    );
    for p in reference.points() {
        println!("  fr {:.4}  er {:.4}", p.fr, p.er);
    }

    let result = run(&config, &dataset).expect("run failed");
    let points: Vec<ObjectivePair> = result.front.iter().map(|e| e.objectives).collect();
    println!("\nrun front ({} points):", points.len());
    for p in &points {
        println!("  fr {:.4}  er {:.4}", p.fr, p.er);
    }
    println!(
        "\nigd(run, exact) = {:.5}",
        igd(&points, &reference).expect("igd failed")
    );
}
