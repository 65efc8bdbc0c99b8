use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use modefs::engine::{export, prepare_splits, run_batch, run_csv, GridResolution, RunConfig};
use modefs::foagm::RefineAccept;
use modefs::stats::{FeatureStats, Reduction, RedundancyOptions};
use modefs::{
    exhaustive_pareto, hypervolume, igd, load_csv, LabelColumn, MutationStrategy, ObjectivePair,
    ReferenceFront,
};

#[derive(Parser)]
#[command(
    name = "modefs",
    version,
    about = "Multiobjective differential evolution for wrapper feature selection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_point(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"x,y\", got {s:?}"));
    }
    let x = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let y = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((x, y))
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Population size (default: min(feature count, 200))
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long, default_value_t = 50)]
    generations: usize,
    /// Feature selection threshold on position components
    #[arg(long, default_value_t = 0.6)]
    theta: f64,
    /// Neighbor count of the wrapper k-NN classifier
    #[arg(long = "knn-k", default_value_t = 5)]
    knn_k: usize,
    /// DE scaling factor F
    #[arg(long, default_value_t = 0.5)]
    f_scale: f64,
    /// Grid cells per objective axis, or "pop" for one per member
    #[arg(long, default_value = "10")]
    grid_n: GridResolution,
    /// Grid density threshold
    #[arg(long = "rho", default_value_t = 3)]
    rho_threshold: usize,
    /// Maximum grid subdivision depth
    #[arg(long, default_value_t = 3)]
    max_depth: usize,
    #[arg(long, default_value_t = 200)]
    fcm_epochs: usize,
    #[arg(long, default_value_t = 0.1)]
    fcm_learning_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Train/test split seed, independent of the run seed
    #[arg(long, default_value_t = 0)]
    split_seed: u64,
    #[arg(long, default_value_t = 0.6)]
    train_fraction: f64,
    /// rand/1, rand/2, best/1, best/2, or current-to-best/1
    #[arg(long, default_value = "rand/1")]
    mutation_strategy: MutationStrategy,
    /// Hypervolume reference point "x,y"
    #[arg(long, default_value = "1,1", value_parser = parse_point)]
    ref_point: (f64, f64),
    /// Bias the elite subpopulation toward small subsets
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    elite_bias: bool,
    /// Redundancy row reduction: mean or max
    #[arg(long, default_value = "mean")]
    a_reduction: Reduction,
    /// Include the unit diagonal in the tau median
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    tau_diagonal: bool,
    /// Refined-individual acceptance: always or non-dominated
    #[arg(long, default_value = "always")]
    refine_accept: RefineAccept,
}

impl ConfigArgs {
    fn into_config(self) -> RunConfig {
        RunConfig {
            pop_size: self.pop_size,
            max_generations: self.generations,
            theta: self.theta,
            knn_k: self.knn_k,
            f_scale: self.f_scale,
            grid_n: self.grid_n,
            rho_threshold: self.rho_threshold,
            max_depth: self.max_depth,
            fcm_epochs: self.fcm_epochs,
            fcm_learning_rate: self.fcm_learning_rate,
            seed: self.seed,
            split_seed: self.split_seed,
            train_fraction: self.train_fraction,
            mutation_strategy: self.mutation_strategy,
            ref_point: self.ref_point,
            elite_bias: self.elite_bias,
            a_reduction: self.a_reduction,
            tau_includes_diagonal: self.tau_diagonal,
            refine_accept: self.refine_accept,
        }
    }
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Dataset CSV (header row, comma separated)
    #[arg(long)]
    data: PathBuf,
    /// Label column, by header name or 0-based index
    #[arg(long, default_value = "class")]
    label_column: LabelColumn,
}

#[derive(Subcommand)]
enum Command {
    /// One optimization run; prints the front and optionally exports it
    Run {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Directory for front.csv, hv_trace.csv, config.json, front.svg,
        /// and the replacement/refinement logs
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated runs over one split; reports hypervolume/IGD statistics
    Batch {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, default_value_t = 30)]
        runs: usize,
        /// Reference front CSV for IGD (fr,er columns)
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Directory for per-run fronts and the summary table
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive Pareto front of the training split (cost 2^D)
    Oracle {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Refuse datasets with more features than this (hard cap 20)
        #[arg(long, default_value_t = 20)]
        max_features: usize,
        /// Output CSV path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hypervolume (and IGD against a reference) of a stored front CSV
    Metrics {
        /// Front CSV: any file with fr and er (or er_train) columns
        #[arg(long)]
        front: PathBuf,
        /// Reference front CSV for IGD
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long, default_value = "1,1", value_parser = parse_point)]
        ref_point: (f64, f64),
    },
    /// Feature weights, redundancy index, and tau of the training split
    Stats {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        /// Output CSV path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_front(front: &[modefs::engine::FrontEntry]) {
    println!(
        "{:<6} {:>8} {:>10} {:>9}  mask",
        "m", "fr", "er_train", "er_test"
    );
    for e in front {
        let m = e.mask.iter().filter(|&&b| b).count();
        let mask: String = e.mask.iter().map(|&b| if b { '1' } else { '0' }).collect();
        println!(
            "{:<6} {:>8.4} {:>10.4} {:>9.4}  {}",
            m, e.objectives.fr, e.objectives.er, e.test_error, mask
        );
    }
}

/// Reads objective points from any CSV carrying fr and er(_train) columns,
/// so both exported fronts and reference fronts work.
fn read_points(path: &PathBuf) -> modefs::Result<Vec<ObjectivePair>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)?;
    let header = reader.headers()?.clone();
    let col = |names: &[&str]| {
        names
            .iter()
            .find_map(|n| header.iter().position(|h| h == *n))
    };
    let fr_col = col(&["fr"]).ok_or_else(|| modefs::Error::LabelColumnNotFound("fr".into()))?;
    let er_col =
        col(&["er", "er_train"]).ok_or_else(|| modefs::Error::LabelColumnNotFound("er".into()))?;
    let mut points = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let parse = |c: usize, name: &str| -> modefs::Result<f64> {
            record
                .get(c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| modefs::Error::NonNumeric {
                    line: idx + 2,
                    column: name.into(),
                    value: record.get(c).unwrap_or("").into(),
                })
        };
        points.push(ObjectivePair::new(
            parse(fr_col, "fr")?,
            parse(er_col, "er")?,
        ));
    }
    Ok(points)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> modefs::Result<()> {
    match command {
        Command::Run { data, config, out } => {
            let config = config.into_config();
            let result = run_csv(&config, &data.data, &data.label_column)?;
            println!(
                "front of {} member(s), final hv {:.6}, {:.2?}",
                result.front.len(),
                result.hv_trace.last().unwrap(),
                result.elapsed
            );
            print_front(&result.front);
            if let Some(dir) = out {
                export(&result, &dir)?;
                println!("artifacts written to {}", dir.display());
            }
            Ok(())
        }
        Command::Batch {
            data,
            config,
            runs,
            reference,
            out,
        } => {
            let config = config.into_config();
            let dataset =
                load_csv(&data.data, &data.label_column).map_err(|e| e.at_stage("load"))?;
            let reference = reference
                .map(|p| ReferenceFront::read_csv(&p))
                .transpose()?;
            let batch = run_batch(&config, &dataset, runs, reference.as_ref())?;
            println!("hv:  {}", batch.hv);
            match &batch.igd {
                Some(stats) => println!("igd: {stats}"),
                None => println!("igd: (no reference front supplied)"),
            }
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                let mut w = csv::Writer::from_path(dir.join("batch_summary.csv"))?;
                w.write_record(["seed", "hv", "igd", "front_size"])?;
                for r in &batch.runs {
                    w.write_record([
                        r.seed.to_string(),
                        r.final_hv.to_string(),
                        r.igd.map(|v| v.to_string()).unwrap_or_default(),
                        r.result.front.len().to_string(),
                    ])?;
                }
                w.flush()?;
                for r in &batch.runs {
                    let mut w =
                        csv::Writer::from_path(dir.join(format!("front_seed{}.csv", r.seed)))?;
                    w.write_record(["mask", "fr", "er_train", "er_test"])?;
                    for e in &r.result.front {
                        let mask: String =
                            e.mask.iter().map(|&b| if b { '1' } else { '0' }).collect();
                        w.write_record([
                            mask,
                            e.objectives.fr.to_string(),
                            e.objectives.er.to_string(),
                            e.test_error.to_string(),
                        ])?;
                    }
                    w.flush()?;
                }
                println!("batch artifacts written to {}", dir.display());
            }
            Ok(())
        }
        Command::Oracle {
            data,
            config,
            max_features,
            out,
        } => {
            let config = config.into_config();
            let dataset =
                load_csv(&data.data, &data.label_column).map_err(|e| e.at_stage("load"))?;
            let (train, _) = prepare_splits(&config, &dataset)?;
            let front = exhaustive_pareto(&train, config.knn_k, max_features)?;
            println!("{:>8} {:>8}", "fr", "er");
            for p in front.points() {
                println!("{:>8.4} {:>8.4}", p.fr, p.er);
            }
            if let Some(path) = out {
                front.write_csv(&path)?;
                println!("reference front written to {}", path.display());
            }
            Ok(())
        }
        Command::Metrics {
            front,
            reference,
            ref_point,
        } => {
            let points = read_points(&front)?;
            println!("hv:  {}", hypervolume(&points, ref_point));
            if let Some(path) = reference {
                let reference = ReferenceFront::read_csv(&path)?;
                println!("igd: {}", igd(&points, &reference)?);
            }
            Ok(())
        }
        Command::Stats { data, config, out } => {
            let config = config.into_config();
            let dataset =
                load_csv(&data.data, &data.label_column).map_err(|e| e.at_stage("load"))?;
            let (train, _) = prepare_splits(&config, &dataset)?;
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
            let mut rows = vec!["feature,name,q,a_index,tau".to_string()];
            for j in 0..train.n_features() {
                rows.push(format!(
                    "{j},{},{},{},{}",
                    train.feature_names()[j],
                    stats.q[j],
                    stats.a_index[j],
                    stats.tau
                ));
            }
            let body = rows.join("\n") + "\n";
            match out {
                Some(path) => {
                    std::fs::write(&path, body)?;
                    println!("feature stats written to {}", path.display());
                }
                None => print!("{body}"),
            }
            Ok(())
        }
    }
}
