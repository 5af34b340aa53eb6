//! `superconv` command-line driver.
//!
//! Exit codes: 0 success, 1 validation failure, 2 solver failure.

mod config;

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use superconv::mesh::{
    analyze_structure, generate_perturbed, generate_piecewise_uniform, generate_uniform, read_mesh, refine_regular,
    write_mesh,
};
use superconv::spaces::{vectors_to_csv, Quadrature, RtField};
use superconv::study::{run_experiment, verify_identities, ErrorRule, ExperimentConfig, MeshFamily, ProblemKind};
use superconv::{estimator, Mesh};

use config::ConfigFile;

const THREADS_VAR: &str = "RT_SUPERCONV_THREADS";

#[derive(Parser, Debug)]
#[command(name = "superconv", version, about = "RT0/CR convergence and recovery studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a convergence study and write the error table as CSV.
    Run(RunArgs),
    /// Classify a mesh (or a refinement sequence) by parallelogram structure.
    AnalyzeMesh(AnalyzeArgs),
    /// Run the randomized identity oracles and print the worst defects.
    VerifyIdentities(VerifyArgs),
    /// Apply the recovery operator to an RT solution and emit indicators.
    Recover(RecoverArgs),
    /// Write a generated mesh in the plain-text mesh format.
    GenerateMesh(GenerateArgs),
    /// Solve a manufactured mixed problem on a mesh file and write the fluxes.
    Solve(SolveArgs),
}

#[derive(Args, Debug)]
struct RunArgs {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// uniform | piecewise | perturbed [default: uniform]
    #[arg(long)]
    family: Option<MeshFamily>,
    /// Subdivisions per side on the coarsest level [default: 8]
    #[arg(long)]
    n0: Option<usize>,
    /// Number of levels, each halving h [default: 4]
    #[arg(long)]
    levels: Option<usize>,
    /// Perturbation exponent of the perturbed family [default: 0.5]
    #[arg(long)]
    alpha: Option<f64>,
    /// Perturbation size as a fraction of h^(1+alpha) [default: 1.0]
    #[arg(long)]
    amplitude: Option<f64>,
    /// Seed of the perturbed family [default: 1]
    #[arg(long)]
    seed: Option<u64>,
    /// mixed | mixed-neumann | mixed-poisson | mixed-convection | cr [default: mixed]
    #[arg(long)]
    problem: Option<ProblemKind>,
    /// Exactness degree of the triangle rule [default: 5]
    #[arg(long)]
    triangle_degree: Option<usize>,
    /// Gauss points per edge [default: 4]
    #[arg(long)]
    edge_points: Option<usize>,
    /// Required relative residual of every solve [default: 1e-10]
    #[arg(long)]
    solver_tolerance: Option<f64>,
    /// Also report the gradient part of the supercloseness error [default: false]
    #[arg(long)]
    helmholtz: Option<bool>,
    /// midpoint | quadrature: how errors against the exact solution are sampled [default: midpoint]
    #[arg(long)]
    error_rule: Option<ErrorRule>,
    /// CSV output path; a .dat file is written beside it [default: stdout only]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Mesh files, coarse to fine.
    #[arg(long, required = true)]
    mesh: Vec<PathBuf>,
    /// Regular refinements appended after the last mesh [default: 0]
    #[arg(long, default_value_t = 0)]
    refine: usize,
    /// Structure exponent hypothesis
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    /// Threshold constant C
    #[arg(long = "C", default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Args, Debug)]
struct RecoverArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// `edge,value` rows of RT fluxes, one per edge.
    #[arg(long)]
    solution: PathBuf,
    /// Output prefix: writes <prefix>_gh.csv and <prefix>_eta.csv [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, default_value = "uniform")]
    family: MeshFamily,
    #[arg(long, default_value_t = 8)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    mesh: PathBuf,
    /// Mixed problem kind (cr is not accepted)
    #[arg(long, default_value = "mixed")]
    problem: ProblemKind,
    /// `edge,value` flux output [default: stdout]
    #[arg(long)]
    out: Option<PathBuf>,
}

const RUN_KEYS: &[&str] = &[
    "family",
    "n0",
    "levels",
    "alpha",
    "amplitude",
    "seed",
    "problem",
    "triangle_degree",
    "edge_points",
    "solver_tolerance",
    "helmholtz",
    "error_rule",
    "out",
];

/// Flags over config file over defaults.
fn resolve_run(args: &RunArgs) -> Result<(ExperimentConfig, Option<PathBuf>)> {
    let file = match &args.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    file.check_keys(RUN_KEYS)?;
    let d = ExperimentConfig::default();
    macro_rules! pick {
        ($field:ident) => {
            match args.$field.clone() {
                Some(v) => v,
                None => file.get(stringify!($field))?.unwrap_or(d.$field),
            }
        };
    }
    let config = ExperimentConfig {
        family: pick!(family),
        n0: pick!(n0),
        levels: pick!(levels),
        alpha: pick!(alpha),
        amplitude: pick!(amplitude),
        seed: pick!(seed),
        problem: pick!(problem),
        triangle_degree: pick!(triangle_degree),
        edge_points: pick!(edge_points),
        solver_tolerance: pick!(solver_tolerance),
        helmholtz: pick!(helmholtz),
        error_rule: pick!(error_rule),
    };
    let out = match &args.out {
        Some(p) => Some(p.clone()),
        None => file.get::<PathBuf>("out")?,
    };
    config.validate()?;
    Ok((config, out))
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let (config, out) = resolve_run(args)?;
    eprint!("{}", config.describe());
    eprintln!(
        "out = {}",
        out.as_ref().map_or("-".to_string(), |p| p.display().to_string())
    );
    let report = run_experiment(&config)?;
    print!("{}", report.to_csv());
    if let Some(path) = &out {
        report
            .write(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(e) = report.failure {
        return Err(e.into());
    }
    Ok(())
}

fn load_mesh(path: &Path) -> Result<Mesh> {
    let f = File::open(path).with_context(|| format!("opening mesh {}", path.display()))?;
    read_mesh(BufReader::new(f)).with_context(|| format!("reading mesh {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    eprintln!(
        "mesh = {:?}\nrefine = {}\nalpha = {}\nC = {}",
        args.mesh, args.refine, args.alpha, args.c
    );
    let mut meshes = args.mesh.iter().map(|p| load_mesh(p)).collect::<Result<Vec<_>>>()?;
    for _ in 0..args.refine {
        let next = refine_regular(meshes.last().expect("at least one mesh"))?;
        meshes.push(next);
    }
    let refs: Vec<&Mesh> = meshes.iter().collect();
    let report = analyze_structure(&refs, args.alpha, args.c)?;
    emit(args.out.as_deref(), &report.to_csv())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    eprintln!("trials = {}\nseed = {}", args.trials, args.seed);
    if args.trials == 0 {
        bail!("trials must be positive");
    }
    let checks = verify_identities(args.trials, args.seed)?;
    for c in &checks {
        println!("{c}");
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
    if !failed.is_empty() {
        bail!("identity checks failed: {}", failed.join(", "));
    }
    Ok(())
}

fn read_fluxes(path: &Path, expected: usize) -> Result<RtField> {
    let f = File::open(path).with_context(|| format!("opening solution {}", path.display()))?;
    let mut dofs = vec![f64::NAN; expected];
    for (no, line) in BufReader::new(f).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (no == 0 && line.chars().next().is_some_and(|c| c.is_alphabetic())) {
            continue;
        }
        let Some((i, v)) = line.split_once(',') else {
            bail!("solution line {}: expected `index,value`", no + 1);
        };
        let i: usize = i.trim().parse().with_context(|| format!("solution line {}", no + 1))?;
        let v: f64 = v.trim().parse().with_context(|| format!("solution line {}", no + 1))?;
        if i >= expected {
            bail!("solution line {}: edge {i} out of range ({expected} edges)", no + 1);
        }
        dofs[i] = v;
    }
    if let Some(i) = dofs.iter().position(|v| v.is_nan()) {
        bail!("solution has no value for edge {i}");
    }
    Ok(RtField { dofs })
}

fn cmd_recover(args: &RecoverArgs) -> Result<()> {
    eprintln!(
        "mesh = {}\nsolution = {}\nout = {}",
        args.mesh.display(),
        args.solution.display(),
        args.out.as_ref().map_or("-".to_string(), |p| p.display().to_string())
    );
    let mesh = load_mesh(&args.mesh)?;
    let p_h = read_fluxes(&args.solution, mesh.num_edges())?;
    let est = estimator(&mesh, &p_h, &Quadrature::default());
    eprintln!("eta = {:.6e}", est.eta);
    let gh = vectors_to_csv("edge", &est.recovered.field.values);
    match &args.out {
        Some(prefix) => {
            let name = |suffix: &str| {
                let mut s = prefix.as_os_str().to_owned();
                s.push(suffix);
                PathBuf::from(s)
            };
            emit(Some(&name("_gh.csv")), &gh)?;
            emit(Some(&name("_eta.csv")), &est.to_csv())
        }
        None => {
            emit(None, &gh)?;
            emit(None, &est.to_csv())
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    eprintln!(
        "family = {}\nn = {}\nalpha = {}\namplitude = {}\nseed = {}\nout = {}",
        args.family,
        args.n,
        args.alpha,
        args.amplitude,
        args.seed,
        args.out.display()
    );
    let mesh = match args.family {
        MeshFamily::Uniform => generate_uniform(args.n)?,
        MeshFamily::Piecewise => generate_piecewise_uniform(args.n)?,
        MeshFamily::Perturbed => generate_perturbed(args.n, args.alpha, args.amplitude, args.seed)?,
    };
    let f = File::create(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    let mut w = std::io::BufWriter::new(f);
    write_mesh(&mesh, &mut w)?;
    w.flush()?;
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Result<()> {
    eprintln!(
        "mesh = {}\nproblem = {}\nout = {}",
        args.mesh.display(),
        args.problem,
        args.out.as_ref().map_or("-".to_string(), |p| p.display().to_string())
    );
    if args.problem == ProblemKind::Cr {
        bail!("solve writes RT fluxes; use a mixed problem");
    }
    let mesh = load_mesh(&args.mesh)?;
    let sol = superconv::solver::solve_problem(&mesh, &args.problem.spec(), &Quadrature::default())?;
    eprintln!("{}", sol.report);
    emit(
        args.out.as_deref(),
        &superconv::spaces::scalars_to_csv("edge", &sol.p_h.dofs),
    )
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("{THREADS_VAR} must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    eprintln!("threads = {n}");
    Ok(())
}

/// 2 for solver failures anywhere in the chain, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    let solver = err
        .chain()
        .filter_map(|e| e.downcast_ref::<superconv::Error>())
        .any(|e| e.is_solver_failure());
    if solver {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = init_threads().and_then(|()| match &cli.command {
        Command::Run(a) => cmd_run(a),
        Command::AnalyzeMesh(a) => cmd_analyze(a),
        Command::VerifyIdentities(a) => cmd_verify(a),
        Command::Recover(a) => cmd_recover(a),
        Command::GenerateMesh(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
