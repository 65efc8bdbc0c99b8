//! The full file-based workflow: write a dataset CSV, load it back, run,
//! and export every artifact (front.csv, hv_trace.csv, config.json,
//! front.svg, and the audit logs). This mirrors what the `modefs run`
//! subcommand does.
//!
//!     cargo run --release --example csv_workflow

use modefs::engine::{export, run_csv, RunConfig};
use modefs::{synth, LabelColumn};

fn main() {
    let dir = std::env::temp_dir().join("modefs_csv_workflow");
    std::fs::create_dir_all(&dir).expect("create temp dir");
    let csv_path = dir.join("dataset.csv");

    synth::informative(60, 2, 10, 0.3, 11)
        .write_csv(&csv_path)
        .expect("write dataset");
    println!("dataset written to {}", csv_path.display());

    let config = RunConfig {
        pop_size: Some(30),
        max_generations: 30,
        seed: 4,
        ..RunConfig::default()
    };
    let result =
        run_csv(&config, &csv_path, &LabelColumn::Name("class".into())).expect("run failed");

    let out = dir.join("artifacts");
    export(&result, &out).expect("export failed");
    println!("artifacts written to {}:", out.display());
    for entry in std::fs::read_dir(&out).expect("read dir") {
        let entry = entry.unwrap();
        println!(
            "  {} ({} bytes)",
            entry.file_name().to_string_lossy(),
            entry.metadata().unwrap().len()
        );
    }
}
