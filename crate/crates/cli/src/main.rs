//! `entrobound`: certified lower bounds on ground and free energies of local
//! Hamiltonians from entropy-strengthened marginal relaxations.

mod format;
mod jobs;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use entrobound::graphcover::Graph;
use entrobound::hamiltonians::Instance;
use entrobound::solver::SolverConfig;

use jobs::{Job, Relaxation};
use manifest::RunManifest;

/// Exit status for results that hit the iteration cap (bounds remain valid).
const EXIT_CAPPED: u8 = 2;
const EXIT_INPUT: u8 = 1;
const EXIT_LANCZOS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "entrobound",
    version,
    about = "Certified energy lower bounds from entropy-constrained marginal relaxations"
)]
struct Cli {
    /// Worker threads for parallel solves (defaults to all cores).
    #[arg(long, global = true, env = "ENTROBOUND_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct SolverArgs {
    /// Solver configuration JSON; missing fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the iteration cap of the configuration.
    #[arg(long)]
    max_iters: Option<usize>,
}

impl SolverArgs {
    fn load(&self) -> Result<SolverConfig> {
        let mut cfg = match &self.config {
            Some(p) => serde_json::from_str(&read(p)?)
                .with_context(|| format!("parsing {}", p.display()))?,
            None => SolverConfig::default(),
        };
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve one relaxation and print its certified bound.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum)]
        relaxation: Relaxation,
        #[arg(long)]
        level: usize,
        #[command(flatten)]
        solver: SolverArgs,
        /// Write the solver trace CSV here.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the result JSON here (manifest beside it).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a range of levels and tabulate bounds against the reference energy.
    Sweep {
        instance: PathBuf,
        #[arg(long, value_enum)]
        relaxation: Relaxation,
        /// Inclusive range `a..b`, or a single level.
        #[arg(long, value_parser = parse_levels)]
        levels: [usize; 2],
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Trace the boundary of a chain relaxation in the (x, z) plane.
    Slice {
        #[arg(long, allow_negative_numbers = true)]
        delta: f64,
        #[arg(long, value_enum)]
        relaxation: Relaxation,
        #[arg(long)]
        level: usize,
        /// Number of equally spaced directions (at least 4).
        #[arg(long, default_value_t = 64)]
        angles: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact smallest eigenvalue and energy per site.
    Ed {
        instance: PathBuf,
        /// Ring size for chain instances (default 12).
        #[arg(long)]
        sites: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pair adjacent edges of a graph and report the resulting energy bound.
    Paircover {
        graph: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat the run recorded in a manifest and compare its summary.
    Rerun {
        manifest: PathBuf,
        /// Largest accepted relative difference between summaries.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
}

fn parse_levels(s: &str) -> std::result::Result<[usize; 2], String> {
    let num = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad level {t:?}"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok([num(a)?, num(b.trim_start_matches('='))?]),
        None => {
            let l = num(s)?;
            Ok([l, l])
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read(path)?)
        .with_context(|| format!("parsing instance {}", path.display()))
}

fn execute(job: Job, out: Option<PathBuf>) -> Result<u8> {
    let start = Instant::now();
    let outcome = jobs::run(&job)?;
    let manifest = RunManifest::new(job, start.elapsed().as_secs_f64(), outcome.summary.clone());
    manifest.emit(&outcome.data, out.as_deref())?;
    Ok(if outcome.complete { 0 } else { EXIT_CAPPED })
}

fn rerun(path: &Path, tolerance: f64) -> Result<u8> {
    let recorded = RunManifest::load(path)?;
    let outcome = jobs::run(&recorded.job)?;
    let fresh = RunManifest::new(recorded.job.clone(), 0.0, outcome.summary);
    match format::compare_json(&recorded.summary, &fresh.summary, tolerance, "summary") {
        None => {
            writeln!(
                std::io::stdout().lock(),
                "reproduced {} within {tolerance:e}",
                path.display()
            )?;
            Ok(if outcome.complete { 0 } else { EXIT_CAPPED })
        }
        Some(diff) => bail!("rerun differs from {}: {diff}", path.display()),
    }
}

fn dispatch(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve {
            instance,
            relaxation,
            level,
            solver,
            trace,
            out,
        } => {
            let mut config = solver.load()?;
            if trace.is_some() {
                config.trace_path = trace;
            }
            execute(
                Job::Solve {
                    instance: load_instance(&instance)?,
                    relaxation,
                    level,
                    config,
                },
                out,
            )
        }
        Command::Sweep {
            instance,
            relaxation,
            levels,
            solver,
            out,
        } => {
            let job = Job::Sweep {
                instance: load_instance(&instance)?,
                relaxation,
                levels,
                config: solver.load()?,
            };
            execute(job, out)
        }
        Command::Slice {
            delta,
            relaxation,
            level,
            angles,
            solver,
            out,
        } => execute(
            Job::Slice {
                delta,
                relaxation,
                level,
                angles,
                config: solver.load()?,
            },
            out,
        ),
        Command::Ed {
            instance,
            sites,
            out,
        } => execute(
            Job::Ed {
                instance: load_instance(&instance)?,
                sites,
            },
            out,
        ),
        Command::Paircover { graph, out } => {
            let g = Graph::parse(&read(&graph)?)
                .with_context(|| format!("parsing graph {}", graph.display()))?;
            execute(Job::Paircover { graph: g }, out)
        }
        Command::Rerun {
            manifest,
            tolerance,
        } => rerun(&manifest, tolerance),
    }
}

fn broken_pipe(err: &anyhow::Error) -> bool {
    err.chain().any(|e| matches!(e.downcast_ref::<std::io::Error>(), Some(io) if io.kind() == std::io::ErrorKind::BrokenPipe))
}

fn exit_code(err: &anyhow::Error) -> u8 {
    let lanczos = err.chain().any(|e| {
        matches!(
            e.downcast_ref::<entrobound::Error>(),
            Some(entrobound::Error::LanczosNotConverged { .. })
        )
    });
    if lanczos {
        EXIT_LANCZOS
    } else {
        EXIT_INPUT
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(EXIT_INPUT);
        }
    }
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
