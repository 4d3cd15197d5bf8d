//! `cmkill`: theory and simulation for giant components of configuration
//! models under degree- and centrality-based vertex removal.
//!
//! Jobs are JSON files (`-` reads stdin); results are JSON or CSV on stdout
//! unless `--out` is given. The exit code is nonzero when a job's embedded
//! assertions fail (ordering violations, infeasible removals).

use std::error::Error;
use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use cmkill::centrality::{finite_radius_pagerank, kill_by_threshold, local_limit_estimates};
use cmkill::degrees::{AlphaSequence, DegreeDistribution};
use cmkill::graphs::{sample_degree_sequence, HalfEdgeGraph, RemovalConvention};
use cmkill::harness::{compare_sequences, report_csv, run, ExperimentSpec, RemovalSpec};
use cmkill::rng::{stream, Purpose};
use cmkill::theory::{critical_alpha, giant_fractions, RemovalMode, SOLVER_TOL};

#[derive(Parser)]
#[command(name = "cmkill", version, about)]
struct Cli {
    /// Override the seed of the loaded job.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replica parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct JobArg {
    /// Path to the JSON job, or `-` for stdin.
    #[arg(long)]
    job: String,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form predictions for one (p, r) pair or a quantile mode.
    Theory(JobArg),
    /// Critical removal proportion for a quantile mode.
    CriticalAlpha(JobArg),
    /// Sample, remove, and measure over an n-grid of seeded replicas.
    Simulate(JobArg),
    /// Compare equal-alpha removal sequences in theory and simulation.
    Compare(JobArg),
    /// Decompose a dominated sequence pair into elementary transforms.
    Decompose(JobArg),
    /// Sample a graph, kill by truncated-PageRank threshold, and measure.
    PagerankKill {
        #[command(flatten)]
        job: JobArg,
        /// Damping factor in (0, 1).
        #[arg(long, default_value_t = 0.85)]
        c: f64,
        /// Number of walk steps kept.
        #[arg(long, default_value_t = 2)]
        radius: usize,
        /// Kill every vertex scoring strictly above this.
        #[arg(long)]
        threshold: f64,
        /// Dump the killed graph (`v`/`e` lines) to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Branching-process estimates of the killed local limit.
    LocalLimit(JobArg),
    /// Component summary CSV for one sampled (optionally removed) graph.
    Components {
        #[command(flatten)]
        job: JobArg,
        /// Dump the measured graph to this path.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
}

fn read_job(path: &str) -> Result<String, Box<dyn Error>> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<(), Box<dyn Error>> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn default_tol() -> f64 {
    SOLVER_TOL
}

#[derive(Deserialize)]
struct TheoryJob {
    p: DegreeDistribution,
    r: Option<AlphaSequence>,
    mode: Option<RemovalMode>,
    alpha: Option<f64>,
    #[serde(default = "default_tol")]
    tol: f64,
}

impl TheoryJob {
    fn sequence(&self) -> Result<AlphaSequence, Box<dyn Error>> {
        match (&self.r, self.mode, self.alpha) {
            (Some(r), None, None) => Ok(r.clone()),
            (None, Some(mode), Some(alpha)) => {
                let spec = match mode {
                    RemovalMode::Top => RemovalSpec::Top { alpha },
                    RemovalMode::Bottom => RemovalSpec::Bottom { alpha },
                    RemovalMode::Uniform => RemovalSpec::Uniform { alpha },
                };
                Ok(spec
                    .theory_sequence(&self.p)?
                    .expect("degree-class removal"))
            }
            _ => Err("job needs either `r` or both `mode` and `alpha`".into()),
        }
    }
}

#[derive(Deserialize)]
struct CriticalJob {
    p: DegreeDistribution,
    mode: RemovalMode,
    #[serde(default = "default_tol")]
    tol: f64,
}

#[derive(Deserialize)]
struct CompareJob {
    p: DegreeDistribution,
    sequences: Vec<AlphaSequence>,
    n: usize,
    #[serde(default = "one")]
    replicas: usize,
    #[serde(default)]
    seed: u64,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
struct DecomposeJob {
    p: DegreeDistribution,
    r: AlphaSequence,
    r2: AlphaSequence,
}

#[derive(Deserialize)]
struct GraphJob {
    p: DegreeDistribution,
    n: usize,
    #[serde(default)]
    seed: u64,
    removal: Option<RemovalSpec>,
}

#[derive(Deserialize)]
struct LocalLimitJob {
    p: DegreeDistribution,
    kill: AlphaSequence,
    #[serde(default = "default_cutoff")]
    cutoff: usize,
    #[serde(default = "default_samples")]
    samples: usize,
    #[serde(default)]
    seed: u64,
}

fn default_cutoff() -> usize {
    10_000
}

fn default_samples() -> usize {
    100_000
}

#[derive(Serialize)]
struct KillReport {
    n: usize,
    removed: usize,
    summary: cmkill::graphs::ComponentSummary,
}

fn sample_graph(job: &GraphJob, seed: u64) -> Result<HalfEdgeGraph, Box<dyn Error>> {
    let degrees =
        sample_degree_sequence(&job.p, job.n, &mut stream(seed, 0, Purpose::DegreeSampling));
    Ok(HalfEdgeGraph::sample(
        &degrees,
        &mut stream(seed, 0, Purpose::Matching),
    )?)
}

fn apply_removal(
    g: &mut HalfEdgeGraph,
    p: &DegreeDistribution,
    removal: &RemovalSpec,
    seed: u64,
) -> Result<usize, Box<dyn Error>> {
    let mut rng = stream(seed, 0, Purpose::Removal);
    let max_degree = g.live_vertices().map(|v| g.degree(v)).max().unwrap_or(1);
    Ok(match removal {
        RemovalSpec::AlphaSequence { r, limiting } => {
            let convention = if *limiting {
                RemovalConvention::Limiting(p)
            } else {
                RemovalConvention::Empirical
            };
            g.remove_by_alpha_sequence(r, convention, &mut rng)?
        }
        RemovalSpec::Uniform { alpha } => {
            let r = AlphaSequence::uniform(*alpha, max_degree)?;
            g.remove_by_alpha_sequence(&r, RemovalConvention::Empirical, &mut rng)?
        }
        RemovalSpec::Top { alpha } => {
            g.remove_quantile_fraction(*alpha, cmkill::graphs::QuantileSide::Top, &mut rng)
        }
        RemovalSpec::Bottom { alpha } => {
            g.remove_quantile_fraction(*alpha, cmkill::graphs::QuantileSide::Bottom, &mut rng)
        }
        RemovalSpec::Pagerank {
            c,
            steps,
            threshold,
        } => {
            let scores = finite_radius_pagerank(g, *c, *steps)?;
            kill_by_threshold(g, &scores, *threshold)?
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("cmkill: {e}");
            return ExitCode::FAILURE;
        }
    }
    match dispatch(cli) {
        Ok(clean) if clean => ExitCode::SUCCESS,
        Ok(_) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("cmkill: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Returns Ok(false) when the job ran but an embedded assertion failed.
fn dispatch(cli: Cli) -> Result<bool, Box<dyn Error>> {
    match cli.command {
        Command::Theory(job) => {
            let job: TheoryJob = serde_json::from_str(&read_job(&job.job)?)?;
            let report = giant_fractions(&job.p, &job.sequence()?, job.tol)?;
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
            )?;
            Ok(true)
        }
        Command::CriticalAlpha(job) => {
            let job: CriticalJob = serde_json::from_str(&read_job(&job.job)?)?;
            let alpha_c = critical_alpha(&job.p, job.mode, job.tol)?;
            let body = serde_json::json!({ "alpha_c": alpha_c, "mode": job.mode });
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&body)?),
            )?;
            Ok(true)
        }
        Command::Simulate(job) => {
            let mut spec: ExperimentSpec = serde_json::from_str(&read_job(&job.job)?)?;
            if let Some(seed) = cli.seed {
                spec.seed = seed;
            }
            let report = run(&spec)?;
            let csv = report_csv(&report);
            let target = cli
                .out
                .clone()
                .or_else(|| spec.out.clone().map(PathBuf::from));
            emit(&target, &csv)?;
            if target.is_some() {
                // CSV went to a file; the summary is still useful on stdout.
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            Ok(true)
        }
        Command::Compare(job) => {
            let mut job: CompareJob = serde_json::from_str(&read_job(&job.job)?)?;
            if let Some(seed) = cli.seed {
                job.seed = seed;
            }
            let table = compare_sequences(&job.p, &job.sequences, job.n, job.replicas, job.seed)?;
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&table)?),
            )?;
            for v in &table.violations {
                eprintln!("cmkill: {v}");
            }
            Ok(table.violations.is_empty())
        }
        Command::Decompose(job) => {
            let job: DecomposeJob = serde_json::from_str(&read_job(&job.job)?)?;
            let transforms = cmkill::degrees::decompose_to_transforms(&job.p, &job.r, &job.r2)?;
            let replayed = cmkill::degrees::replay_transforms(&job.p, &job.r, &transforms)?;
            let body = serde_json::json!({ "transforms": transforms, "replayed": replayed });
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&body)?),
            )?;
            Ok(true)
        }
        Command::PagerankKill {
            job,
            c,
            radius,
            threshold,
            dump,
        } => {
            let mut graph_job: GraphJob = serde_json::from_str(&read_job(&job.job)?)?;
            if let Some(seed) = cli.seed {
                graph_job.seed = seed;
            }
            let mut g = sample_graph(&graph_job, graph_job.seed)?;
            let scores = finite_radius_pagerank(&g, c, radius)?;
            let removed = kill_by_threshold(&mut g, &scores, threshold)?;
            if let Some(path) = dump {
                fs::write(path, g.dump())?;
            }
            let report = KillReport {
                n: graph_job.n,
                removed,
                summary: g.components(),
            };
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&report)?),
            )?;
            Ok(true)
        }
        Command::LocalLimit(job) => {
            let mut job: LocalLimitJob = serde_json::from_str(&read_job(&job.job)?)?;
            if let Some(seed) = cli.seed {
                job.seed = seed;
            }
            let estimate = local_limit_estimates(
                &job.p,
                &job.kill,
                job.cutoff,
                job.samples,
                &mut stream(job.seed, 0, Purpose::Estimator),
            )?;
            emit(
                &cli.out,
                &format!("{}\n", serde_json::to_string_pretty(&estimate)?),
            )?;
            Ok(true)
        }
        Command::Components { job, dump } => {
            let mut graph_job: GraphJob = serde_json::from_str(&read_job(&job.job)?)?;
            if let Some(seed) = cli.seed {
                graph_job.seed = seed;
            }
            let mut g = sample_graph(&graph_job, graph_job.seed)?;
            let removed = match &graph_job.removal {
                Some(removal) => apply_removal(&mut g, &graph_job.p, removal, graph_job.seed)?,
                None => 0,
            };
            let summary = g.components();
            if let Some(path) = dump {
                fs::write(path, g.dump())?;
            }
            let alpha = removed as f64 / graph_job.n as f64;
            let csv = format!(
                "n,alpha,seed,K,v_giant,e_giant\n{},{},{},{},{},{}\n",
                graph_job.n,
                alpha,
                graph_job.seed,
                summary.component_count,
                summary.giant_vertices,
                summary.giant_edges
            );
            emit(&cli.out, &csv)?;
            Ok(true)
        }
    }
}
