//! Command-line front end for `ruelle-kit`.
//!
//! [`run`] takes the argument vector and returns the exit code together with
//! the text destined for standard output and standard error, so the whole
//! command surface can be driven from tests without spawning processes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use ruelle_kit::io::{
    to_json, to_tsv, BetaSearchReport, CocycleReport, Envelope, JointRpfReport, KGraphRpfReport,
    KmsEvalReport, MapDescriptor, MapReport, RpfReport, SpaceDescriptor, SystemDescriptor, SystemValidationReport,
};
use ruelle_kit::kgraph::{
    kgraph_rpf_solve, kms_check, kms_check_all_pairs, validate as validate_graph, verify_rpf_identity, CategoricalCocycle,
    GaugeDynamics, KGraph, KGraphRpfOptions, KGraphSpec,
};
use ruelle_kit::ksystem::{
    beta_search, cocycle_condition_witness, commutation_witness, joint_rpf_solve, kms_functional, normalize_system,
    quasi_invariance_residuals, BetaSearchOptions, JointRpfOptions, KRuelleSystem,
};
use ruelle_kit::nkmod::NkVector;
use ruelle_kit::ruelle::{rpf_solve, RpfOptions};
use ruelle_kit::symspace::maps_commute as maps_commute_on;
use ruelle_kit::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dynamics {
    /// `ςᵢ = (ln λᵢ − φᵢ)/β`.
    Normalized,
    /// The potentials themselves.
    Unnormalized,
}

#[derive(Debug, Parser)]
#[command(name = "ruelle-kit", version, about = "Ruelle operators, RPF eigendata and KMS checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Cylinder depth for solvers and checks.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Solver or check tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Iteration cap for the power methods.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = -50.0)]
    pub beta_min: f64,
    #[arg(long, global = true, allow_negative_numbers = true, default_value_t = 50.0)]
    pub beta_max: f64,
    /// Inverse temperature for `kms-eval` and `kgraph kms`.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Comma-separated degree bound such as `2,2`.
    #[arg(long, global = true)]
    pub degree_bound: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = Dynamics::Normalized)]
    pub dynamics: Dynamics,
    /// Coordinate solved by `rpf`.
    #[arg(long, global = true, default_value_t = 0)]
    pub index: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Evaluate `kgraph kms` on every pair of matrix units, not only graded ones.
    #[arg(long, global = true)]
    pub all_pairs: bool,
    /// Worker threads for parallel sweeps.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a system descriptor or a k-graph.
    Validate { input: PathBuf },
    /// Eigendata of one Ruelle triple of a system.
    Rpf { input: PathBuf },
    /// Common eigenmeasure and eigenvalues of all coordinates.
    JointRpf { input: PathBuf },
    /// Exact cocycle condition and operator commutation.
    CocycleCheck { input: PathBuf },
    /// Inverse temperatures admitting quasi-invariant-measure KMS states.
    BetaSearch { input: PathBuf },
    /// Value of the KMS functional on the bisection terms in the input.
    KmsEval { input: PathBuf },
    /// Finite higher-rank graphs: validation, eigenmeasure and KMS check.
    #[command(subcommand)]
    Kgraph(KgraphCommand),
}

#[derive(Debug, Subcommand)]
pub enum KgraphCommand {
    Validate { input: PathBuf },
    Rpf { input: PathBuf },
    Kms { input: PathBuf },
}

/// Validated settings for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: String,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub beta_interval: (f64, f64),
    pub beta: Option<f64>,
    pub degree_bound: Option<Vec<u32>>,
    pub dynamics: Dynamics,
    pub index: usize,
    pub all_pairs: bool,
    pub format: Format,
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<Self, String> {
        let (command, input) = match &cli.command {
            Command::Validate { input } => ("validate", input),
            Command::Rpf { input } => ("rpf", input),
            Command::JointRpf { input } => ("joint-rpf", input),
            Command::CocycleCheck { input } => ("cocycle-check", input),
            Command::BetaSearch { input } => ("beta-search", input),
            Command::KmsEval { input } => ("kms-eval", input),
            Command::Kgraph(KgraphCommand::Validate { input }) => ("kgraph validate", input),
            Command::Kgraph(KgraphCommand::Rpf { input }) => ("kgraph rpf", input),
            Command::Kgraph(KgraphCommand::Kms { input }) => ("kgraph kms", input),
        };
        if let Some(t) = cli.tol {
            if !(t > 0.0) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if cli.depth == Some(0) {
            return Err("--depth must be at least 1".into());
        }
        if cli.max_iter == Some(0) {
            return Err("--max-iter must be at least 1".into());
        }
        if !(cli.beta_min < cli.beta_max) {
            return Err(format!("empty β interval [{}, {}]", cli.beta_min, cli.beta_max));
        }
        let degree_bound = cli
            .degree_bound
            .as_deref()
            .map(|s| {
                s.split(',')
                    .map(|x| x.trim().parse::<u32>().map_err(|e| format!("bad --degree-bound {s:?}: {e}")))
                    .collect::<Result<Vec<_>, _>>()
            })
            .transpose()?;
        Ok(RunConfig {
            input: input.clone(),
            command: command.into(),
            depth: cli.depth,
            tol: cli.tol,
            max_iter: cli.max_iter,
            beta_interval: (cli.beta_min, cli.beta_max),
            beta: cli.beta,
            degree_bound,
            dynamics: cli.dynamics,
            index: cli.index,
            all_pairs: cli.all_pairs,
            format: cli.format,
        })
    }
}

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn failure(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        stderr.push('\n');
        Outcome { code, stdout: String::new(), stderr }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome::failure(code, text.trim_end())
            };
        }
    };
    let config = match RunConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(msg) => return Outcome::failure(EXIT_IO, msg),
    };
    match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&config)),
            Err(e) => Outcome::failure(EXIT_IO, format!("cannot start {n} workers: {e}")),
        },
        None => execute(&config),
    }
}

pub fn execute(config: &RunConfig) -> Outcome {
    let text = match fs::read_to_string(&config.input) {
        Ok(t) => t,
        Err(e) => return Outcome::failure(EXIT_IO, format!("{}: {e}", config.input.display())),
    };
    let result = match config.command.as_str() {
        "validate" if looks_like_graph(&text) => graph_validate(config, &text),
        "validate" => system_validate(config, &text),
        "rpf" => rpf(config, &text),
        "joint-rpf" => joint(config, &text),
        "cocycle-check" => cocycle_check(config, &text),
        "beta-search" => beta(config, &text),
        "kms-eval" => kms_eval(config, &text),
        "kgraph validate" => graph_validate(config, &text),
        "kgraph rpf" => graph_rpf(config, &text),
        "kgraph kms" => graph_kms(config, &text),
        other => return Outcome::failure(EXIT_IO, format!("unknown command {other:?}")),
    };
    match result {
        Ok(done) => done,
        Err(e) => Outcome::failure(exit_code(&e), format!("{}: {e}", config.input.display())),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Json(_) | Error::Schema(_) => EXIT_IO,
        Error::NoConvergence { .. } => EXIT_NO_CONVERGENCE,
        _ => EXIT_FAILED,
    }
}

type Run = ruelle_kit::Result<Outcome>;

fn emit<T: Serialize>(config: &RunConfig, report: T, pass: bool, note: Option<String>) -> Run {
    let env = Envelope::new(&config.command, report);
    let mut stdout = match config.format {
        Format::Json => to_json(&env)?,
        Format::Tsv => to_tsv(&env)?,
    };
    if !stdout.ends_with('\n') {
        stdout.push('\n');
    }
    let stderr = note.map(|n| format!("{n}\n")).unwrap_or_default();
    Ok(Outcome {
        code: if pass { EXIT_OK } else { EXIT_FAILED },
        stdout,
        stderr,
    })
}

fn looks_like_graph(text: &str) -> bool {
    serde_json::from_str::<serde_json::Value>(text)
        .map(|v| v.get("edges").is_some() && v.get("space").is_none())
        .unwrap_or(false)
}

fn load_system(text: &str) -> ruelle_kit::Result<(SystemDescriptor, KRuelleSystem<f64>)> {
    let d = SystemDescriptor::from_json(text)?;
    let sys = d.build_f64()?;
    Ok((d, sys))
}

fn default_depth(config: &RunConfig, sys: &KRuelleSystem<f64>) -> usize {
    config
        .depth
        .unwrap_or_else(|| sys.potentials().iter().map(|p| p.depth()).max().unwrap_or(1).max(1))
}

fn solver_options(config: &RunConfig) -> RpfOptions {
    let mut o = RpfOptions::default();
    if let Some(t) = config.tol {
        o.tol = t;
    }
    if let Some(m) = config.max_iter {
        o.max_iter = m;
    }
    o
}

fn joint_options(config: &RunConfig) -> JointRpfOptions {
    JointRpfOptions {
        solver: solver_options(config),
        ..JointRpfOptions::default()
    }
}

fn system_validate(config: &RunConfig, text: &str) -> Run {
    let d = SystemDescriptor::from_json(text)?;
    let space = d.space.build()?;
    let maps: Vec<_> = d.maps.iter().map(MapDescriptor::build).collect();
    let mut errors = Vec::new();
    let mut map_reports = Vec::new();
    for (i, (m, desc)) in maps.iter().zip(&d.maps).enumerate() {
        match (m.normal_form(&space), m.certificates(&space)) {
            (Ok(nf), Ok(certificates)) => map_reports.push(MapReport {
                map: desc.clone(),
                consumption: nf.consumption(),
                certificates,
            }),
            (Err(e), _) | (_, Err(e)) => errors.push(format!("map {i}: {e}")),
        }
    }
    let mut maps_commute = true;
    if errors.is_empty() {
        for i in 0..maps.len() {
            for j in i + 1..maps.len() {
                if !maps_commute_on(&space, &maps[i], &maps[j])? {
                    maps_commute = false;
                    errors.push(format!("maps {i} and {j} do not commute"));
                }
            }
        }
    }
    if d.potentials.len() != maps.len() {
        errors.push(format!("{} maps but {} potentials", maps.len(), d.potentials.len()));
    }
    let exact = if errors.is_empty() {
        match d.build_exact() {
            Ok(s) => Some(s),
            Err(e) => {
                errors.push(e.to_string());
                None
            }
        }
    } else {
        None
    };
    let violating = exact.as_ref().and_then(cocycle_condition_witness).map(|(i, j)| [i, j]);
    if let Some([i, j]) = violating {
        errors.push(format!("cocycle condition fails for coordinates {i} and {j}"));
    }
    let composed_certificates = match &exact {
        Some(s) => Some(s.composed_triple(&NkVector::ones(s.rank()))?.map().certificates(&space)?),
        None => None,
    };
    let valid = errors.is_empty();
    let report = SystemValidationReport {
        valid,
        rank: maps.len(),
        space: SpaceDescriptor::describe(&space),
        maps: map_reports,
        maps_commute,
        cocycle_condition: exact.is_some() && violating.is_none(),
        violating_pair: violating,
        composed_certificates,
        errors: errors.clone(),
    };
    emit(config, report, valid, (!valid).then(|| errors.join("; ")))
}

fn rpf(config: &RunConfig, text: &str) -> Run {
    let (_, sys) = load_system(text)?;
    if config.index >= sys.rank() {
        return Err(Error::Schema(format!("--index {} but the system has rank {}", config.index, sys.rank())));
    }
    let depth = default_depth(config, &sys);
    let sol = rpf_solve(&sys.triple(config.index), depth, &solver_options(config))?;
    emit(config, RpfReport::new(config.index, depth, &sol), true, None)
}

fn joint(config: &RunConfig, text: &str) -> Run {
    let (_, sys) = load_system(text)?;
    let depth = default_depth(config, &sys);
    let sol = joint_rpf_solve(&sys, depth, &joint_options(config))?;
    emit(config, JointRpfReport::new(depth, &sol), true, None)
}

fn cocycle_check(config: &RunConfig, text: &str) -> Run {
    let d = SystemDescriptor::from_json(text)?;
    let sys = d.build_exact()?;
    let depth = config.depth.unwrap_or(1);
    let violating = cocycle_condition_witness(&sys).map(|(i, j)| [i, j]);
    let witness = commutation_witness(&sys, depth)?;
    let report = CocycleReport {
        rank: sys.rank(),
        cocycle_condition: violating.is_none(),
        violating_pair: violating,
        depth,
        operators_commute: witness.is_none(),
        commutation_witness: witness.map(|w| (w.i, w.j, sys.space().format_word(&w.word))),
    };
    let pass = report.cocycle_condition && report.operators_commute;
    emit(config, report, pass, None)
}

fn beta(config: &RunConfig, text: &str) -> Run {
    let (_, sys) = load_system(text)?;
    let mut opts = BetaSearchOptions {
        beta_min: config.beta_interval.0,
        beta_max: config.beta_interval.1,
        depth: default_depth(config, &sys),
        joint: joint_options(config),
        ..BetaSearchOptions::default()
    };
    if let Some(t) = config.tol {
        opts.tol = t;
    }
    let r = beta_search(&sys, &opts)?;
    emit(config, BetaSearchReport::new(&opts, &r), true, None)
}

fn kms_eval(config: &RunConfig, text: &str) -> Run {
    let (d, sys) = load_system(text)?;
    let depth = default_depth(config, &sys);
    let beta = config.beta.unwrap_or(1.0);
    let sol = joint_rpf_solve(&sys, depth, &joint_options(config))?;
    let terms = d
        .elements
        .iter()
        .map(|e| e.build(&sys))
        .collect::<ruelle_kit::Result<Vec<_>>>()?;
    let value = kms_functional(&sol.measure, &terms)?;
    let normalized = normalize_system(&sys, &sol, beta)?;
    let report = KmsEvalReport {
        state_type: "quasi_invariant_measure".into(),
        depth,
        beta,
        eigenvalues: sol.eigenvalues.clone(),
        terms: terms.len(),
        value,
        quasi_invariance_residuals: quasi_invariance_residuals(&normalized.scaled(&-beta), &sol.measure)?,
    };
    emit(config, report, true, None)
}

fn load_graph(text: &str) -> ruelle_kit::Result<(KGraphSpec, KGraph)> {
    let spec: KGraphSpec = serde_json::from_str(text)?;
    let graph = KGraph::try_from(&spec)?;
    Ok((spec, graph))
}

fn graph_validate(config: &RunConfig, text: &str) -> Run {
    let spec: KGraphSpec = serde_json::from_str(text)?;
    let report = validate_graph(&spec);
    let note = report
        .violations
        .iter()
        .map(|v| format!("{:?}: {} [{}]", v.kind, v.message, v.witness.join(", ")))
        .collect::<Vec<_>>()
        .join("\n");
    let valid = report.valid;
    emit(config, report, valid, (!valid).then_some(note))
}

fn graph_bound(config: &RunConfig, graph: &KGraph) -> ruelle_kit::Result<NkVector> {
    let bound = match &config.degree_bound {
        Some(b) => NkVector::new(b.clone()),
        None => NkVector::ones(graph.rank()),
    };
    if bound.rank() != graph.rank() {
        return Err(Error::RankMismatch {
            expected: graph.rank(),
            found: bound.rank(),
        });
    }
    Ok(bound)
}

fn graph_measure(config: &RunConfig, spec: &KGraphSpec, graph: &KGraph) -> ruelle_kit::Result<ruelle_kit::kgraph::KGraphMeasure> {
    let cocycle = CategoricalCocycle::from_spec(graph, spec)?;
    let mut opts = KGraphRpfOptions::default();
    if let Some(m) = config.max_iter {
        opts.max_iter = m;
    }
    kgraph_rpf_solve(graph, &cocycle, &opts)
}

fn graph_rpf(config: &RunConfig, text: &str) -> Run {
    let (spec, graph) = load_graph(text)?;
    let measure = graph_measure(config, &spec, &graph)?;
    let bound = graph_bound(config, &graph)?;
    let paths: Vec<_> = (0..graph.num_vertices()).flat_map(|v| graph.paths_up_to(v, &bound)).collect();
    let identity = verify_rpf_identity(&graph, &measure, &paths, config.tol.unwrap_or(1e-10))?;
    let pass = identity.pass;
    emit(config, KGraphRpfReport::new(&graph, &measure, identity, &paths), pass, None)
}

fn graph_kms(config: &RunConfig, text: &str) -> Run {
    let (spec, graph) = load_graph(text)?;
    let measure = graph_measure(config, &spec, &graph)?;
    let bound = graph_bound(config, &graph)?;
    let beta = config.beta.unwrap_or(1.0);
    let dynamics = match config.dynamics {
        Dynamics::Normalized => GaugeDynamics::normalized(&measure, beta)?,
        Dynamics::Unnormalized => GaugeDynamics::unnormalized(&measure.cocycle, graph.rank()),
    };
    let tol = config.tol.unwrap_or(1e-9);
    let report = if config.all_pairs {
        kms_check_all_pairs(&graph, &measure, beta, &dynamics, &bound, tol)?
    } else {
        kms_check(&graph, &measure, beta, &dynamics, &bound, tol)?
    };
    let pass = report.pass;
    emit(config, report, pass, None)
}
