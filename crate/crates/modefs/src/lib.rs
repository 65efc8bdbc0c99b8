//! Wrapper feature selection by multiobjective differential evolution.
//!
//! The engine searches for feature subsets that simultaneously minimize the
//! feature ratio (selected / total) and the k-NN classification error rate,
//! and returns the nondominated trade-off front. The search (MODE-FS) is
//! plain differential evolution augmented with three mechanisms:
//!
//! * **WRBI** — initialization from four subpopulations built on FCM-learned
//!   feature weights and a cosine redundancy index ([`wrbi`]),
//! * **MSBIU** — a mutation/selection step whose candidate masks are gated by
//!   mean-shifted weights and the redundancy threshold ([`msbiu`]),
//! * **FOAGM** — an adaptive grid over objective space that refines crowded
//!   solutions by swapping low-weight features for informative ones
//!   ([`foagm`]).
//!
//! Quality is reported with the exact two-objective hypervolume and IGD
//! indicators ([`metrics`]), which also houses an exhaustive Pareto oracle
//! for small feature counts.
//!
//! ## Quick start
//!
//! ```
//! use modefs::engine::{run, RunConfig};
//! use modefs::synth;
//!
//! let dataset = synth::informative(80, 2, 8, 0.2, 7);
//! let config = RunConfig {
//!     pop_size: Some(20),
//!     max_generations: 10,
//!     ..RunConfig::default()
//! };
//! let result = run(&config, &dataset).unwrap();
//! for entry in &result.front {
//!     println!(
//!         "fr={:.3} er={:.3} test_er={:.3}",
//!         entry.objectives.fr, entry.objectives.er, entry.test_error
//!     );
//! }
//! ```
//!
//! Runnable demonstrations of every subsystem live in `examples/`; the
//! `modefs` binary exposes the same functionality as CLI subcommands
//! (`run`, `batch`, `oracle`, `metrics`, `stats`).

pub mod classify;
pub mod data;
pub mod engine;
pub mod error;
pub mod evo;
pub mod foagm;
pub mod metrics;
pub mod msbiu;
pub mod seed;
pub mod stats;
pub mod synth;
pub mod wrbi;

pub use classify::{evaluate, holdout_error, knn_predict, Evaluate, KnnEvaluator, ObjectivePair};
pub use data::{load_csv, stratified_split, Dataset, LabelColumn, NormParams};
pub use engine::{run, run_batch, RunConfig, RunResult};
pub use error::{Error, Result};
pub use evo::{
    decode, dominates, encode, nondominated_sort, Front, Individual, MutationStrategy, Population,
};
pub use metrics::{exhaustive_pareto, hypervolume, igd, ReferenceFront};
pub use stats::{cosine_similarity, fcm_learn, redundancy_stats, FeatureStats};
