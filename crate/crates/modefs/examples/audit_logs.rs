//! Replay the per-run audit logs: every replacement decision is re-checked
//! against the dominance rule, and every grid refinement is verified to
//! have swapped exactly one feature (cardinality preserved).
//!
//!     cargo run --release --example audit_logs

use modefs::engine::{run, RunConfig};
use modefs::evo::dominates;
use modefs::msbiu::replaces;
use modefs::synth;

fn main() {
    let dataset = synth::informative(60, 2, 10, 0.3, 2);
    let config = RunConfig {
        pop_size: Some(30),
        max_generations: 30,
        seed: 5,
        ..RunConfig::default()
    };
    let result = run(&config, &dataset).expect("run failed");

    let accepted = result.replacements.iter().filter(|e| e.accepted).count();
    let mut bad = 0;
    for e in &result.replacements {
        if e.accepted != replaces(e.candidate, e.incumbent) {
            bad += 1;
        }
        if e.accepted && dominates(e.incumbent, e.candidate) {
            bad += 1;
        }
    }
    println!(
        "replacements: {} events, {} accepted, {} rule violations",
        result.replacements.len(),
        accepted,
        bad
    );

    let mut swaps = 0;
    let mut full_mask_skips = 0;
    let mut violations = 0;
    for e in &result.refinements {
        let removed = (0..e.mask_before.len())
            .filter(|&j| e.mask_before[j] && !e.mask_after[j])
            .count();
        let added = (0..e.mask_before.len())
            .filter(|&j| !e.mask_before[j] && e.mask_after[j])
            .count();
        match (removed, added) {
            (1, 1) => swaps += 1,
            (0, 0) if e.mask_before.iter().all(|&m| m) => full_mask_skips += 1,
            _ => violations += 1,
        }
    }
    println!(
        "refinements:  {} events, {} one-for-one swaps, {} full-mask skips, {} violations",
        result.refinements.len(),
        swaps,
        full_mask_skips,
        violations
    );

    assert_eq!(bad + violations, 0, "audit found contract violations");
    println!("\naudit clean");
}
