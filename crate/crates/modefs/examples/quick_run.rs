//! Minimal end-to-end run on an in-memory synthetic dataset.
//!
//!     cargo run --release --example quick_run

use modefs::engine::{run, RunConfig};
use modefs::synth;

fn main() {
    // 80 instances, 20 features of which 3 carry signal.
    let dataset = synth::informative(80, 3, 20, 0.25, 7);

    let config = RunConfig {
        pop_size: Some(40),
        max_generations: 50,
        seed: 1,
        ..RunConfig::default()
    };

    let result = run(&config, &dataset).expect("run failed");

    println!(
        "finished in {:.2?}: hv {:.4} -> {:.4} over {} generations",
        result.elapsed,
        result.hv_trace.first().unwrap(),
        result.hv_trace.last().unwrap(),
        config.max_generations,
    );
    println!("\nfinal front ({} members):", result.front.len());
    println!("{:>4} {:>8} {:>10} {:>9}", "m", "fr", "er_train", "er_test");
    for entry in &result.front {
        println!(
            "{:>4} {:>8.4} {:>10.4} {:>9.4}",
            entry.mask.iter().filter(|&&b| b).count(),
            entry.objectives.fr,
            entry.objectives.er,
            entry.test_error,
        );
    }
}
