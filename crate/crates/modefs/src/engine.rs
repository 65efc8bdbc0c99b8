//! Run orchestration: configuration, the generation loop, batching, and
//! artifact export.

use std::fmt;
use std::path::Path;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::classify::{holdout_error, KnnEvaluator, ObjectivePair};
use crate::data::{load_csv, stratified_split, Dataset, LabelColumn, NormParams};
use crate::error::{Error, Result, StageExt};
use crate::evo::{nondominated_sort_pairs, Front, FrontMember, MutationStrategy};
use crate::foagm::{foagm_step, RefineAccept, RefinementEvent};
use crate::metrics::{hypervolume, igd, ReferenceFront};
use crate::msbiu::{msbiu_step, ReplacementEvent};
use crate::stats::{FeatureStats, Reduction, RedundancyOptions};
use crate::wrbi;

/// Grid resolution: a fixed cell count per axis, or the population size
/// (one cell per member per axis).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridResolution {
    Cells(usize),
    PopulationSize,
}

impl GridResolution {
    pub fn resolve(&self, pop_size: usize) -> usize {
        match self {
            GridResolution::Cells(n) => *n,
            GridResolution::PopulationSize => pop_size,
        }
    }
}

impl fmt::Display for GridResolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridResolution::Cells(n) => write!(f, "{n}"),
            GridResolution::PopulationSize => f.write_str("pop"),
        }
    }
}

impl std::str::FromStr for GridResolution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "pop" {
            return Ok(GridResolution::PopulationSize);
        }
        s.parse::<usize>()
            .map(GridResolution::Cells)
            .map_err(|_| format!("grid resolution must be a cell count or \"pop\", got {s:?}"))
    }
}

impl Serialize for GridResolution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GridResolution {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Generation count matching a total-evaluation budget of `100 x P`
/// (one candidate evaluation per member per generation). The desk-scale
/// default below is half of it.
pub const FULL_BUDGET_GENERATIONS: usize = 100;

/// Everything a run depends on besides the dataset bytes. Serialized next
/// to the results so every artifact is reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Population size; `None` resolves to `min(D, 200)` (floored at 4).
    pub pop_size: Option<usize>,
    pub max_generations: usize,
    /// Decoding threshold: feature selected iff its component >= theta.
    pub theta: f64,
    /// Neighbor count of the wrapper classifier.
    pub knn_k: usize,
    /// DE scaling factor F.
    pub f_scale: f64,
    pub grid_n: GridResolution,
    pub rho_threshold: usize,
    pub max_depth: usize,
    pub fcm_epochs: usize,
    pub fcm_learning_rate: f64,
    pub seed: u64,
    /// Split randomness is independent of the run seed so that batch runs
    /// share one train/test partition.
    pub split_seed: u64,
    pub train_fraction: f64,
    pub mutation_strategy: MutationStrategy,
    pub ref_point: (f64, f64),
    /// Bias the elite subpopulation toward small subsets (see `wrbi`).
    pub elite_bias: bool,
    pub a_reduction: Reduction,
    pub tau_includes_diagonal: bool,
    pub refine_accept: RefineAccept,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pop_size: None,
            max_generations: 50,
            theta: 0.6,
            knn_k: 5,
            f_scale: 0.5,
            grid_n: GridResolution::Cells(10),
            rho_threshold: 3,
            max_depth: 3,
            fcm_epochs: 200,
            fcm_learning_rate: 0.1,
            seed: 0,
            split_seed: 0,
            train_fraction: 0.6,
            mutation_strategy: MutationStrategy::Rand1,
            ref_point: (1.0, 1.0),
            elite_bias: true,
            a_reduction: Reduction::Mean,
            tau_includes_diagonal: false,
            refine_accept: RefineAccept::Always,
        }
    }
}

impl RunConfig {
    pub fn resolved_pop_size(&self, n_features: usize) -> usize {
        self.pop_size.unwrap_or_else(|| n_features.clamp(4, 200))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return fail(format!("theta {} outside (0, 1]", self.theta));
        }
        if !(self.f_scale > 0.0 && self.f_scale < 1.0) {
            return fail(format!("f_scale {} outside (0, 1)", self.f_scale));
        }
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return fail(format!(
                "train_fraction {} outside (0, 1)",
                self.train_fraction
            ));
        }
        if self.knn_k == 0 {
            return fail("knn_k must be positive".into());
        }
        if self.rho_threshold == 0 || self.max_depth == 0 {
            return fail("rho_threshold and max_depth must be positive".into());
        }
        if let GridResolution::Cells(0) = self.grid_n {
            return fail("grid_n must be positive".into());
        }
        if let Some(p) = self.pop_size {
            if p < 4 {
                return fail(format!("pop_size {p} below the minimum of 4"));
            }
        }
        Ok(())
    }
}

/// One front member with its holdout verification error.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontEntry {
    pub mask: Vec<bool>,
    pub objectives: ObjectivePair,
    pub test_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// Final nondominated front (training objectives), fr-ascending.
    pub front: Vec<FrontEntry>,
    /// Hypervolume of the rank-0 set per generation, index 0 = initial
    /// population; length is `max_generations + 1`.
    pub hv_trace: Vec<f64>,
    pub replacements: Vec<ReplacementEvent>,
    pub refinements: Vec<RefinementEvent>,
    pub elapsed: Duration,
    pub config: RunConfig,
}

/// The split/normalize front half of the pipeline, shared by `run` and by
/// anything that must score masks against the identical training split
/// (the exhaustive oracle, offline re-verification).
pub fn prepare_splits(config: &RunConfig, dataset: &Dataset) -> Result<(Dataset, Dataset)> {
    let (train_raw, test_raw) =
        stratified_split(dataset, config.train_fraction, config.split_seed).at_stage("split")?;
    let params = NormParams::fit(&train_raw);
    Ok((params.apply(&train_raw), params.apply(&test_raw)))
}

fn rank0_points(objs: &[ObjectivePair]) -> Vec<ObjectivePair> {
    nondominated_sort_pairs(objs)[0]
        .iter()
        .map(|&i| objs[i])
        .collect()
}

/// Executes one full run on a raw dataset: split, normalize, learn feature
/// stats, initialize, loop (update then grid refinement, recording the
/// hypervolume after each generation), then verify the final front on the
/// test split. Bitwise deterministic in (dataset, config).
pub fn run(config: &RunConfig, dataset: &Dataset) -> Result<RunResult> {
    let started = Instant::now();
    config.validate()?;
    let (train, test) = prepare_splits(config, dataset)?;

    let opts = RedundancyOptions {
        reduction: config.a_reduction,
        tau_includes_diagonal: config.tau_includes_diagonal,
    };
    let stats = FeatureStats::compute(
        &train,
        config.fcm_epochs,
        config.fcm_learning_rate,
        config.seed,
        &opts,
    );
    let evaluator = KnnEvaluator::new(&train, config.knn_k);
    let pop_size = config.resolved_pop_size(train.n_features());
    let grid_n = config.grid_n.resolve(pop_size);

    let mut pop = wrbi::initialize(
        pop_size,
        &stats,
        config.theta,
        config.elite_bias,
        config.seed,
        &evaluator,
    )
    .at_stage("init")?;

    let mut hv_trace = Vec::with_capacity(config.max_generations + 1);
    hv_trace.push(hypervolume(
        &rank0_points(&pop.objectives().at_stage("init")?),
        config.ref_point,
    ));

    let mut replacements = Vec::new();
    let mut refinements = Vec::new();
    for _ in 0..config.max_generations {
        let (updated, events) = msbiu_step(
            &pop,
            &stats,
            config.mutation_strategy,
            config.f_scale,
            config.theta,
            config.seed,
            &evaluator,
        )
        .at_stage("evolve")?;
        replacements.extend(events);

        let (refined, events) = foagm_step(
            &updated,
            &stats,
            grid_n,
            config.rho_threshold,
            config.max_depth,
            config.theta,
            config.refine_accept,
            config.seed,
            &evaluator,
        )
        .at_stage("evolve")?;
        refinements.extend(events);

        pop = refined;
        hv_trace.push(hypervolume(
            &rank0_points(&pop.objectives().at_stage("evolve")?),
            config.ref_point,
        ));
    }

    let objs = pop.objectives().at_stage("evolve")?;
    let members: Vec<FrontMember> = nondominated_sort_pairs(&objs)[0]
        .iter()
        .map(|&i| FrontMember {
            mask: pop.members[i].mask.clone(),
            objectives: objs[i],
        })
        .collect();
    let front = Front::from_members(members);
    let entries: Vec<FrontEntry> = front
        .members()
        .iter()
        .map(|m| {
            Ok(FrontEntry {
                mask: m.mask.clone(),
                objectives: m.objectives,
                test_error: holdout_error(&m.mask, &train, &test, config.knn_k)?,
            })
        })
        .collect::<Result<_>>()
        .at_stage("verify")?;

    Ok(RunResult {
        front: entries,
        hv_trace,
        replacements,
        refinements,
        elapsed: started.elapsed(),
        config: config.clone(),
    })
}

/// Loads a CSV and runs on it.
pub fn run_csv(config: &RunConfig, path: &Path, label: &LabelColumn) -> Result<RunResult> {
    let dataset = load_csv(path, label).at_stage("load")?;
    run(config, &dataset)
}

/// Location and spread of one indicator over a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndicatorStats {
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

impl IndicatorStats {
    fn of(values: &[f64]) -> IndicatorStats {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            0.5 * (sorted[mid - 1] + sorted[mid])
        };
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        IndicatorStats { mean, median, std }
    }
}

impl fmt::Display for IndicatorStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:.4e} +/- {:.4e} (median {:.4e})",
            self.mean, self.std, self.median
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchRun {
    pub seed: u64,
    pub final_hv: f64,
    pub igd: Option<f64>,
    pub result: RunResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub runs: Vec<BatchRun>,
    pub hv: IndicatorStats,
    pub igd: Option<IndicatorStats>,
}

/// Executes `n_runs` independent runs with seeds `base, base+1, ...` over a
/// fixed split, reporting hypervolume (and IGD when a reference front is
/// supplied) in mean/median/std form.
pub fn run_batch(
    config: &RunConfig,
    dataset: &Dataset,
    n_runs: usize,
    reference: Option<&ReferenceFront>,
) -> Result<BatchResult> {
    if n_runs == 0 {
        return Err(Error::InvalidConfig("batch needs at least one run".into()));
    }
    let mut runs = Vec::with_capacity(n_runs);
    for i in 0..n_runs {
        let cfg = RunConfig {
            seed: config.seed + i as u64,
            ..config.clone()
        };
        let result = run(&cfg, dataset)?;
        let points: Vec<ObjectivePair> = result.front.iter().map(|e| e.objectives).collect();
        let run_igd = reference.map(|r| igd(&points, r)).transpose()?;
        runs.push(BatchRun {
            seed: cfg.seed,
            final_hv: *result.hv_trace.last().expect("trace is never empty"),
            igd: run_igd,
            result,
        });
    }
    let hv = IndicatorStats::of(&runs.iter().map(|r| r.final_hv).collect::<Vec<_>>());
    let igd_stats = if runs.iter().all(|r| r.igd.is_some()) && reference.is_some() {
        Some(IndicatorStats::of(
            &runs.iter().map(|r| r.igd.unwrap()).collect::<Vec<_>>(),
        ))
    } else {
        None
    };
    Ok(BatchResult {
        runs,
        hv,
        igd: igd_stats,
    })
}

fn mask_string(mask: &[bool]) -> String {
    mask.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Minimal scatter plot of the front: feature ratio on x, error rate on y,
/// one marker per member.
fn front_svg(front: &[FrontEntry]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 360.0;
    const L: f64 = 56.0;
    const R: f64 = 16.0;
    const T: f64 = 16.0;
    const B: f64 = 48.0;
    let pw = W - L - R;
    let ph = H - T - B;
    let x = |fr: f64| L + fr * pw;
    let y = |er: f64| T + (1.0 - er) * ph;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"{L}\" y=\"{T}\" width=\"{pw}\" height=\"{ph}\" \
         fill=\"none\" stroke=\"#444\"/>\n"
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"middle\">{tick}</text>\n",
            x(tick),
            H - B + 16.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"11\" text-anchor=\"end\">{tick}</text>\n",
            L - 6.0,
            y(tick) + 4.0
        ));
    }
    svg.push_str(&format!(
        "  <text x=\"{:.1}\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\">feature ratio</text>\n",
        L + pw / 2.0,
        H - 10.0
    ));
    svg.push_str(&format!(
        "  <text x=\"14\" y=\"{:.1}\" font-size=\"12\" text-anchor=\"middle\" \
         transform=\"rotate(-90 14 {:.1})\">error rate</text>\n",
        T + ph / 2.0,
        T + ph / 2.0
    ));
    for e in front {
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#3572b0\"/>\n",
            x(e.objectives.fr),
            y(e.objectives.er)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes the run artifacts into `out_dir`:
/// `front.csv`, `hv_trace.csv`, `config.json`, `front.svg`,
/// `replacements.csv`, and `refinements.csv`. Output bytes are a pure
/// function of the result.
pub fn export(result: &RunResult, out_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(out_dir)?;

    let mut w = csv::Writer::from_path(out_dir.join("front.csv"))?;
    w.write_record(["mask", "fr", "er_train", "er_test"])?;
    for e in &result.front {
        w.write_record([
            mask_string(&e.mask),
            e.objectives.fr.to_string(),
            e.objectives.er.to_string(),
            e.test_error.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(out_dir.join("hv_trace.csv"))?;
    w.write_record(["generation", "hv"])?;
    for (g, hv) in result.hv_trace.iter().enumerate() {
        w.write_record([g.to_string(), hv.to_string()])?;
    }
    w.flush()?;

    let config = serde_json::to_string_pretty(&result.config)
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    std::fs::write(out_dir.join("config.json"), config + "\n")?;

    std::fs::write(out_dir.join("front.svg"), front_svg(&result.front))?;

    let mut w = csv::Writer::from_path(out_dir.join("replacements.csv"))?;
    w.write_record([
        "generation",
        "slot",
        "incumbent_fr",
        "incumbent_er",
        "candidate_fr",
        "candidate_er",
        "candidate_mask",
        "accepted",
    ])?;
    for e in &result.replacements {
        w.write_record([
            e.generation.to_string(),
            e.slot.to_string(),
            e.incumbent.fr.to_string(),
            e.incumbent.er.to_string(),
            e.candidate.fr.to_string(),
            e.candidate.er.to_string(),
            mask_string(&e.candidate_mask),
            e.accepted.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(out_dir.join("refinements.csv"))?;
    w.write_record([
        "generation",
        "slot",
        "mask_before",
        "mask_after",
        "fr_before",
        "er_before",
        "fr_after",
        "er_after",
        "applied",
    ])?;
    for e in &result.refinements {
        w.write_record([
            e.generation.to_string(),
            e.slot.to_string(),
            mask_string(&e.mask_before),
            mask_string(&e.mask_after),
            e.before.fr.to_string(),
            e.before.er.to_string(),
            e.after.fr.to_string(),
            e.after.er.to_string(),
            e.applied.to_string(),
        ])?;
    }
    w.flush()?;

    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::evaluate;
    use crate::evo::dominates;
    use crate::synth;

    fn small_config() -> RunConfig {
        RunConfig {
            pop_size: Some(12),
            max_generations: 5,
            knn_k: 1,
            fcm_epochs: 30,
            seed: 3,
            ..RunConfig::default()
        }
    }

    #[test]
    fn run_is_deterministic() {
        let d = synth::informative(40, 2, 8, 0.25, 5);
        let cfg = small_config();
        let a = run(&cfg, &d).unwrap();
        let b = run(&cfg, &d).unwrap();
        assert_eq!(a.front, b.front);
        assert_eq!(a.hv_trace, b.hv_trace);
        assert_eq!(a.replacements, b.replacements);
        assert_eq!(a.refinements, b.refinements);
    }

    #[test]
    fn zero_generations_reports_the_initial_front() {
        let d = synth::informative(40, 2, 8, 0.25, 5);
        let cfg = RunConfig {
            max_generations: 0,
            ..small_config()
        };
        let result = run(&cfg, &d).unwrap();
        assert_eq!(result.hv_trace.len(), 1);
        assert!(!result.front.is_empty());
        assert!(result.replacements.is_empty());

        // The reported front must be exactly the nondominated set of the
        // initial population, rebuilt here through the same pipeline.
        let (train, _) = prepare_splits(&cfg, &d).unwrap();
        let opts = RedundancyOptions {
            reduction: cfg.a_reduction,
            tau_includes_diagonal: cfg.tau_includes_diagonal,
        };
        let stats = FeatureStats::compute(
            &train,
            cfg.fcm_epochs,
            cfg.fcm_learning_rate,
            cfg.seed,
            &opts,
        );
        let evaluator = KnnEvaluator::new(&train, cfg.knn_k);
        let pop = wrbi::initialize(
            cfg.resolved_pop_size(train.n_features()),
            &stats,
            cfg.theta,
            cfg.elite_bias,
            cfg.seed,
            &evaluator,
        )
        .unwrap();
        let objs = pop.objectives().unwrap();
        let members: Vec<FrontMember> = nondominated_sort_pairs(&objs)[0]
            .iter()
            .map(|&i| FrontMember {
                mask: pop.members[i].mask.clone(),
                objectives: objs[i],
            })
            .collect();
        let expected = Front::from_members(members);
        let got: Vec<(&[bool], ObjectivePair)> = result
            .front
            .iter()
            .map(|e| (e.mask.as_slice(), e.objectives))
            .collect();
        let want: Vec<(&[bool], ObjectivePair)> = expected
            .members()
            .iter()
            .map(|m| (m.mask.as_slice(), m.objectives))
            .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn batch_igd_median_matches_offline_recomputation() {
        let d = synth::informative(60, 2, 10, 0.3, 2);
        let cfg = RunConfig {
            pop_size: Some(30),
            max_generations: 20,
            ..RunConfig::default()
        };
        let (train, _) = prepare_splits(&cfg, &d).unwrap();
        let reference = crate::metrics::exhaustive_pareto(&train, cfg.knn_k, 12).unwrap();
        let batch = run_batch(&cfg, &d, 30, Some(&reference)).unwrap();

        // Independent recomputation from the stored per-run fronts.
        let mut values: Vec<f64> = batch
            .runs
            .iter()
            .map(|r| {
                let points: Vec<ObjectivePair> = r.result.front.iter().map(|e| e.objectives).collect();
                igd(&points, &reference).unwrap()
            })
            .collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (values[14] + values[15]);
        assert_eq!(batch.igd.unwrap().median, median);
    }

    #[test]
    fn hv_trace_has_one_entry_per_generation_plus_init() {
        let d = synth::informative(40, 2, 8, 0.25, 5);
        let cfg = small_config();
        let result = run(&cfg, &d).unwrap();
        assert_eq!(result.hv_trace.len(), cfg.max_generations + 1);
    }

    #[test]
    fn front_is_mutually_nondominated_and_sorted() {
        let d = synth::informative(50, 2, 10, 0.3, 8);
        let result = run(&small_config(), &d).unwrap();
        let front = &result.front;
        for (i, a) in front.iter().enumerate() {
            for (j, b) in front.iter().enumerate() {
                if i != j {
                    assert!(!dominates(a.objectives, b.objectives));
                }
            }
        }
        for pair in front.windows(2) {
            assert!(pair[0].objectives.fr <= pair[1].objectives.fr);
        }
    }

    #[test]
    fn reported_objectives_reproduce_from_scratch() {
        let d = synth::informative(50, 2, 10, 0.3, 8);
        let cfg = small_config();
        let result = run(&cfg, &d).unwrap();
        let (train, test) = prepare_splits(&cfg, &d).unwrap();
        for entry in &result.front {
            let fresh = evaluate(&entry.mask, &train, cfg.knn_k);
            assert_eq!(fresh, entry.objectives);
            let holdout = holdout_error(&entry.mask, &train, &test, cfg.knn_k).unwrap();
            assert_eq!(holdout, entry.test_error);
        }
    }

    /// Everything in a result except the wall-clock time.
    fn deterministic_parts(
        r: &RunResult,
    ) -> (
        &Vec<FrontEntry>,
        &Vec<f64>,
        &Vec<ReplacementEvent>,
        &Vec<RefinementEvent>,
        &RunConfig,
    ) {
        (
            &r.front,
            &r.hv_trace,
            &r.replacements,
            &r.refinements,
            &r.config,
        )
    }

    #[test]
    fn batch_of_one_equals_the_single_run() {
        let d = synth::informative(40, 2, 8, 0.25, 9);
        let cfg = small_config();
        let single = run(&cfg, &d).unwrap();
        let batch = run_batch(&cfg, &d, 1, None).unwrap();
        assert_eq!(batch.runs.len(), 1);
        assert_eq!(
            deterministic_parts(&batch.runs[0].result),
            deterministic_parts(&single)
        );
        assert_eq!(batch.hv.mean, *single.hv_trace.last().unwrap());
        assert_eq!(batch.hv.std, 0.0);
    }

    #[test]
    fn batch_is_deterministic() {
        let d = synth::informative(40, 2, 8, 0.25, 10);
        let cfg = small_config();
        let a = run_batch(&cfg, &d, 3, None).unwrap();
        let b = run_batch(&cfg, &d, 3, None).unwrap();
        assert_eq!(a.hv, b.hv);
        assert_eq!(a.igd, b.igd);
        for (ra, rb) in a.runs.iter().zip(&b.runs) {
            assert_eq!(ra.seed, rb.seed);
            assert_eq!(ra.final_hv, rb.final_hv);
            assert_eq!(ra.igd, rb.igd);
            assert_eq!(
                deterministic_parts(&ra.result),
                deterministic_parts(&rb.result)
            );
        }
    }

    #[test]
    fn config_validation_rejects_bad_values() {
        let cases = [
            RunConfig {
                theta: 0.0,
                ..RunConfig::default()
            },
            RunConfig {
                f_scale: 1.0,
                ..RunConfig::default()
            },
            RunConfig {
                train_fraction: 1.0,
                ..RunConfig::default()
            },
            RunConfig {
                pop_size: Some(2),
                ..RunConfig::default()
            },
            RunConfig {
                knn_k: 0,
                ..RunConfig::default()
            },
        ];
        for cfg in cases {
            assert!(cfg.validate().is_err());
        }
        assert!(RunConfig::default().validate().is_ok());
    }

    #[test]
    fn default_pop_size_tracks_feature_count() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.resolved_pop_size(30), 30);
        assert_eq!(cfg.resolved_pop_size(1000), 200);
        assert_eq!(cfg.resolved_pop_size(2), 4);
    }

    #[test]
    fn config_json_round_trips() {
        let cfg = RunConfig {
            grid_n: GridResolution::PopulationSize,
            mutation_strategy: MutationStrategy::Best2,
            ..RunConfig::default()
        };
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn export_writes_all_artifacts() {
        let d = synth::informative(40, 2, 8, 0.25, 11);
        let result = run(&small_config(), &d).unwrap();
        let dir = tempfile::tempdir().unwrap();
        export(&result, dir.path()).unwrap();

        let front = std::fs::read_to_string(dir.path().join("front.csv")).unwrap();
        assert_eq!(front.lines().count(), result.front.len() + 1);
        assert!(front.starts_with("mask,fr,er_train,er_test\n"));

        let trace = std::fs::read_to_string(dir.path().join("hv_trace.csv")).unwrap();
        assert_eq!(trace.lines().count(), result.hv_trace.len() + 1);

        let config: RunConfig =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join("config.json")).unwrap())
                .unwrap();
        assert_eq!(config, result.config);

        let svg = std::fs::read_to_string(dir.path().join("front.svg")).unwrap();
        assert_eq!(svg.matches("<circle").count(), result.front.len());
        assert!(svg.ends_with("</svg>\n"));
        assert!(xml_is_well_formed(&svg), "front.svg is not well-formed");
    }

    /// Tiny well-formedness check: every open tag is closed in order,
    /// self-closing and declaration tags ignored.
    fn xml_is_well_formed(text: &str) -> bool {
        let mut stack: Vec<&str> = Vec::new();
        let mut rest = text;
        while let Some(start) = rest.find('<') {
            let Some(end) = rest[start..].find('>') else {
                return false;
            };
            let tag = &rest[start + 1..start + end];
            rest = &rest[start + end + 1..];
            if tag.starts_with('?') || tag.starts_with('!') {
                continue;
            }
            if let Some(name) = tag.strip_prefix('/') {
                if stack.pop() != Some(name.trim()) {
                    return false;
                }
            } else if !tag.ends_with('/') {
                let name = tag.split_whitespace().next().unwrap_or("");
                stack.push(name);
            }
        }
        stack.is_empty()
    }

    #[test]
    fn export_is_byte_stable() {
        let d = synth::informative(40, 2, 8, 0.25, 12);
        let cfg = small_config();
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        export(&run(&cfg, &d).unwrap(), dir_a.path()).unwrap();
        export(&run(&cfg, &d).unwrap(), dir_b.path()).unwrap();
        for file in ["front.csv", "hv_trace.csv", "config.json", "front.svg"] {
            let a = std::fs::read(dir_a.path().join(file)).unwrap();
            let b = std::fs::read(dir_b.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs between identical runs");
        }
    }
}
