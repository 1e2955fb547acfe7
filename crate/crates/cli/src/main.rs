use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use divmax::doc::InstanceDoc;
use divmax::report::{self, SolveConfig};
use divmax::{canonical, read_instance, read_scores, CliError};
use divmax_core::geometry::{PointMetric, SetMetric};
use divmax_core::lab::{self, MatroidChoice, PointCloud};

#[derive(Parser)]
#[command(
    name = "divmax",
    version,
    about = "Max-sum diversification under matroid constraints"
)]
struct Cli {
    /// Worker threads for the slice sweep (default: all cores).
    #[arg(long, global = true, env = "DIVMAX_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the instance distance is of negative type. Exits 3 if not.
    Certify {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Relax, round and report.
    Solve(SolveArgs),
    /// Exact optimum by enumeration (at most 20 elements).
    Exact {
        instance: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Relaxation bound, rounding and baselines side by side.
    Compare {
        instance: PathBuf,
        /// Emit JSON instead of a text table.
        #[arg(long)]
        json: bool,
        #[arg(long, default_value_t = 1e-6)]
        gap: f64,
        #[arg(long)]
        force: bool,
    },
    /// Write a generated instance document.
    Gen {
        #[command(subcommand)]
        generator: Generator,
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Relative duality-gap tolerance for each slice.
    #[arg(long, default_value_t = 1e-6)]
    gap: f64,
    /// JSON array of nonnegative scores, replacing any in the instance.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Include every rounding step in the report.
    #[arg(long)]
    trace: bool,
    /// Also write the per-slice table as CSV.
    #[arg(long)]
    slices_csv: Option<PathBuf>,
    /// Solve even if certification fails. Voids every guarantee.
    #[arg(long)]
    force: bool,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct MatroidArgs {
    /// Rank of a uniform matroid (ignored with --blocks).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Use a partition matroid with this many contiguous blocks.
    #[arg(long)]
    blocks: Option<usize>,
    /// Per-block capacity of the partition matroid.
    #[arg(long, default_value_t = 1)]
    capacity: usize,
    /// Attach uniform scores in [0, 1).
    #[arg(long)]
    with_scores: bool,
}

impl MatroidArgs {
    fn choice(&self) -> MatroidChoice {
        match self.blocks {
            Some(blocks) => MatroidChoice::Partition {
                blocks,
                capacity: self.capacity,
            },
            None => MatroidChoice::Uniform { k: self.k },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CloudArg {
    Uniform,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointMetricArg {
    L1,
    L2,
    Lp,
    Cosine,
}

#[derive(Clone, Copy, ValueEnum)]
enum SetMetricArg {
    Jaccard,
    Dice,
    SimpleMatching,
    RussellRao,
}

#[derive(Subcommand)]
enum Generator {
    /// All-ones distances with a rank-k uniform matroid.
    IntegralityGap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Random points under a norm or angular distance.
    Points {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value = "uniform")]
        cloud: CloudArg,
        #[arg(long, value_enum, default_value = "l2")]
        metric: PointMetricArg,
        /// Exponent for the lp metric, in [1, 2].
        #[arg(long, default_value_t = 1.5)]
        p: f64,
        #[command(flatten)]
        matroid: MatroidArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Random fixed-size subsets of a universe under a set distance.
    Sets {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        universe: usize,
        #[arg(long, default_value_t = 5)]
        set_size: usize,
        #[arg(long, value_enum, default_value = "jaccard")]
        metric: SetMetricArg,
        #[command(flatten)]
        matroid: MatroidArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Densest-subgraph reduction of a random graph.
    Dks {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        edge_prob: f64,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json<T: serde::Serialize>(value: &T, out: Option<&Path>) -> Result<(), CliError> {
    emit(&canonical::to_string(value)?, out)
}

fn attach_scores(g: &mut lab::GeneratedInstance, with_scores: bool) {
    if with_scores {
        // offset keeps the score stream apart from the geometry stream
        let mut rng = lab::rng(g.seed ^ 0x9e37_79b9_7f4a_7c15);
        g.scores = Some(lab::random_scores(g.matroid.n(), 1.0, &mut rng));
    }
}

fn generate(generator: &Generator) -> Result<InstanceDoc, CliError> {
    let g = match generator {
        Generator::IntegralityGap { n, k } => lab::integrality_gap(*n, *k)?,
        Generator::Points {
            n,
            dim,
            cloud,
            metric,
            p,
            matroid,
            seed,
        } => {
            let cloud = match cloud {
                CloudArg::Uniform => PointCloud::UniformCube,
                CloudArg::Gaussian => PointCloud::Gaussian,
            };
            let metric = match metric {
                PointMetricArg::L1 => PointMetric::L1,
                PointMetricArg::L2 => PointMetric::L2,
                PointMetricArg::Lp => PointMetric::Lp(*p),
                PointMetricArg::Cosine => PointMetric::Cosine,
            };
            let mut g = lab::random_points(*n, *dim, cloud, metric, &matroid.choice(), *seed)?;
            attach_scores(&mut g, matroid.with_scores);
            g
        }
        Generator::Sets {
            n,
            universe,
            set_size,
            metric,
            matroid,
            seed,
        } => {
            let metric = match metric {
                SetMetricArg::Jaccard => SetMetric::Jaccard,
                SetMetricArg::Dice => SetMetric::Dice,
                SetMetricArg::SimpleMatching => SetMetric::SimpleMatching,
                SetMetricArg::RussellRao => SetMetric::RussellRao,
            };
            let mut g = lab::random_sets(*n, *universe, *set_size, metric, &matroid.choice(), *seed)?;
            attach_scores(&mut g, matroid.with_scores);
            g
        }
        Generator::Dks { n, edge_prob, k, seed } => {
            if !(0.0..=1.0).contains(edge_prob) {
                return Err(CliError::Invalid("edge probability must lie in [0, 1]".into()));
            }
            let edges = lab::random_graph(*n, *edge_prob, &mut lab::rng(*seed));
            let mut g = lab::dks_reduction(*n, &edges, *k)?;
            g.seed = *seed;
            g
        }
    };
    // validate before writing
    g.build()?;
    Ok(InstanceDoc::from_generated(&g))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Invalid("--threads must be positive".into())),
        t => t,
    };
    match cli.command {
        Command::Certify { instance, out } => {
            let inst = read_instance(&instance)?.to_instance()?;
            let cert = report::certify(&inst);
            emit_json(&cert, out.as_deref())?;
            Ok(if cert.witness.is_some() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Solve(args) => {
            let mut inst = read_instance(&args.instance)?.to_instance()?;
            if let Some(path) = &args.scores {
                inst = inst.with_scores(Some(read_scores(path)?))?;
            }
            let cfg = SolveConfig {
                gap_tol: args.gap,
                force: args.force,
                trace: args.trace,
                threads,
                exact: true,
            };
            let rep = report::solve(inst, &cfg)?;
            if let Some(path) = &args.slices_csv {
                let file = File::create(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
                rep.write_slices_csv(BufWriter::new(file))?;
            }
            if rep.forced {
                eprintln!("warning: distance is not of negative type; guarantees do not apply");
            }
            emit_json(&rep, args.out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Exact { instance, out } => {
            let inst = read_instance(&instance)?.to_instance()?;
            emit_json(&report::exact(&inst)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare {
            instance,
            json,
            gap,
            force,
        } => {
            let inst = read_instance(&instance)?.to_instance()?;
            let cfg = SolveConfig {
                gap_tol: gap,
                force,
                threads,
                ..SolveConfig::default()
            };
            let rep = report::compare(inst, &cfg)?;
            if json {
                emit_json(&rep, None)?;
            } else {
                print!("{}", rep.table());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen { generator, out } => {
            emit_json(&generate(&generator)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
