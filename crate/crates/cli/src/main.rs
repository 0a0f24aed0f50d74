//! `obnox`: command-line front end for the obnoxious-facilities p-median pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use obnox_core::candidates::{all_candidates, candidates_csv};
use obnox_core::discrete::{build_matrix, solve_discrete, DEFAULT_NODE_BUDGET, DEFAULT_STARTS};
use obnox_core::frontier::{frontier_csv, frontier_svg, solve_one, solve_unconstrained, sweep, uniform_grid, validate_grid};
use obnox_core::refine::{multistart_random, refine, trace_csv};
use obnox_core::report::{gap_percent, to_json, BaselineReport, DiscreteReport, SolveReport};
use obnox_core::{
    feasible_candidates, DiscreteOptions, Error, Instance, PipelineOptions, Point, RefineOptions, SearchBudget, SolveMode,
};

#[derive(Parser)]
#[command(name = "obnox", version, about = "Planar p-median with minimum distances from obnoxious points")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the benchmark instance with the first n generated points.
    Generate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=1000))]
        n: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// List Voronoi candidate sites at least `dmin` from every obnoxious point.
    Candidates {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = non_negative)]
        dmin: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one instance: discrete p-median over candidates, then refine.
    Solve {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value = "auto")]
        mode: SolveMode,
        /// Interchange restarts.
        #[arg(long, default_value_t = DEFAULT_STARTS, value_parser = positive)]
        starts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Branch-and-bound node limit in exact mode.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        node_budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-round refinement objectives as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Trace the best objective over a uniform grid of minimum distances.
    Frontier {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_parser = positive)]
        p: usize,
        /// Largest distance (default: 1.2 times the largest candidate clearance).
        #[arg(long, value_parser = non_negative)]
        grid_max: Option<f64>,
        #[arg(long, default_value_t = 60)]
        grid_steps: usize,
        /// Random starts for the unconstrained end point.
        #[arg(long, default_value_t = 100, value_parser = positive)]
        tries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_csv: PathBuf,
        #[arg(long)]
        out_svg: Option<PathBuf>,
    },
    /// Compare Voronoi seeding against random feasible multistart.
    Baseline {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 1000, value_parser = positive)]
        tries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Problem {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long, value_parser = non_negative)]
    dmin: f64,
    #[arg(long, value_parser = positive)]
    p: usize,
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a finite non-negative number, got {s}"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

/// Failure with its process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Domain(_) => 2,
            Error::Io { .. } | Error::Parse { .. } | Error::InvalidInstance(_) | Error::InvalidBox { .. } | Error::NonFinite => 4,
            Error::BudgetExhausted(_) => 5,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

type CliResult = Result<(), Failure>;

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| Failure { code: 4, message: format!("{}: {e}", path.display()) })
}

fn generate(n: usize, out: &Path) -> CliResult {
    let inst = Instance::generate(n)?;
    inst.write(out)?;
    println!("wrote {n} points to {}", out.display());
    Ok(())
}

fn candidates(instance: &Path, dmin: f64, out: Option<&Path>) -> CliResult {
    let inst = Instance::read(instance)?;
    let cands = feasible_candidates(&inst, dmin)?;
    if let Some(out) = out {
        write(out, &candidates_csv(&cands))?;
    }
    println!("m={}", cands.len());
    Ok(())
}

struct SolveArgs<'a> {
    problem: &'a Problem,
    discrete: DiscreteOptions,
    out: Option<&'a Path>,
    trace: Option<&'a Path>,
}

fn solve(args: SolveArgs) -> CliResult {
    let Problem { instance, dmin, p } = args.problem;
    let (dmin, p) = (*dmin, *p);
    let inst = Instance::read(instance)?;
    let refine_opts = RefineOptions::default();
    let mode = match args.discrete.mode {
        SolveMode::Exact => "exact",
        SolveMode::Heuristic => "heuristic",
        SolveMode::Auto => "auto",
    };
    let mut exhausted = None;
    let report = if dmin == 0.0 {
        let opts = PipelineOptions { discrete: args.discrete, refine: refine_opts, seed: args.discrete.seed, ..PipelineOptions::default() };
        let refined = solve_unconstrained(&inst, p, &opts)?;
        SolveReport { dmin, p, mode: mode.into(), candidate_count: 0, discrete: None, refined }
    } else {
        let cands = feasible_candidates(&inst, dmin)?;
        if cands.is_empty() {
            return Err(Error::NoFeasibleCandidates.into());
        }
        let matrix = build_matrix(&inst, &cands);
        let discrete = match solve_discrete(&matrix, &inst.weights(), p, &args.discrete) {
            Ok(s) => s,
            Err(Error::BudgetExhausted(s)) => {
                exhausted = Some(format!("search budget exhausted; reporting the unproven incumbent {:.2}", s.objective));
                *s
            }
            Err(e) => return Err(e.into()),
        };
        let start: Vec<Point> = discrete.selected.iter().map(|&j| cands[j].location).collect();
        let refined = refine(&inst, dmin, &start, &refine_opts)?;
        SolveReport {
            dmin,
            p,
            mode: mode.into(),
            candidate_count: cands.len(),
            discrete: Some(DiscreteReport::new(&discrete, &cands)),
            refined,
        }
    };
    if let Some(out) = args.out {
        write(out, &to_json(&report))?;
    }
    if let Some(trace) = args.trace {
        write(trace, &trace_csv(&report.refined))?;
    }
    if let Some(d) = &report.discrete {
        println!("m={} discrete={:.2} proven={}", report.candidate_count, d.objective, d.proven);
    }
    println!("refined={:.2}", report.refined.objective);
    if args.out.is_none() {
        print!("{}", to_json(&report));
    }
    match exhausted {
        Some(message) => Err(Failure { code: 5, message }),
        None => Ok(()),
    }
}

#[allow(clippy::too_many_arguments)]
fn frontier(instance: &Path, p: usize, grid_max: Option<f64>, grid_steps: usize, tries: usize, seed: u64, out_csv: &Path, out_svg: Option<&Path>) -> CliResult {
    let inst = Instance::read(instance)?;
    let grid_max = match grid_max {
        Some(max) => max,
        None => 1.2 * all_candidates(&inst)?.first().map_or(0.0, |c| c.d_nearest),
    };
    let grid = uniform_grid(grid_max, grid_steps);
    // A zero maximum with several steps repeats 0.
    validate_grid(&grid)?;
    let opts = PipelineOptions { tries, seed, ..PipelineOptions::default() };
    let entries = sweep(&inst, p, &grid, &opts)?;
    write(out_csv, &frontier_csv(&entries, p))?;
    if let Some(svg) = out_svg {
        write(svg, &frontier_svg(&entries, p))?;
    }
    let solved = entries.iter().filter(|e| e.record().is_some()).count();
    println!("{} grid points, {} solved", entries.len(), solved);
    Ok(())
}

fn baseline(problem: &Problem, tries: usize, seed: u64, out: Option<&Path>) -> CliResult {
    let Problem { instance, dmin, p } = problem;
    let inst = Instance::read(instance)?;
    let opts = PipelineOptions { seed, ..PipelineOptions::default() };
    let record = solve_one(&inst, *p, *dmin, &opts)?;
    let random = multistart_random(&inst, *dmin, *p, tries, seed, &opts.refine)?;
    let (assignment, _) = obnox_core::refine::assign(&record.facilities, &inst);
    let voronoi = obnox_core::ContinuousSolution {
        facilities: record.facilities,
        assignment,
        objective: record.objective,
        feasible: true,
        trace: Vec::new(),
    };
    let report = BaselineReport {
        dmin: *dmin,
        p: *p,
        tries,
        seed,
        voronoi_objective: voronoi.objective,
        random_objective: random.objective,
        gap_percent: gap_percent(random.objective, voronoi.objective),
        voronoi,
        random,
    };
    if let Some(out) = out {
        write(out, &to_json(&report))?;
    }
    println!(
        "voronoi={:.2} random={:.2} gap={:.2}%",
        report.voronoi_objective, report.random_objective, report.gap_percent
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure { code: 2, message: format!("--threads: {e}") })?;
    }
    match cli.command {
        Command::Generate { n, out } => generate(n as usize, &out),
        Command::Candidates { instance, dmin, out } => candidates(&instance, dmin, out.as_deref()),
        Command::Solve { problem, mode, starts, seed, node_budget, out, trace } => solve(SolveArgs {
            problem: &problem,
            discrete: DiscreteOptions {
                mode,
                budget: SearchBudget { max_nodes: node_budget, ..SearchBudget::default() },
                starts,
                seed,
            },
            out: out.as_deref(),
            trace: trace.as_deref(),
        }),
        Command::Frontier { instance, p, grid_max, grid_steps, tries, seed, out_csv, out_svg } => {
            frontier(&instance, p, grid_max, grid_steps, tries, seed, &out_csv, out_svg.as_deref())
        }
        Command::Baseline { problem, tries, seed, out } => baseline(&problem, tries, seed, out.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
