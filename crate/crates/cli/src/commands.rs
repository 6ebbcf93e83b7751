use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use schelling_core::constructions::{construct_2zts_grid, construct_band_grid, construct_binary_grid, construct_tree_equilibrium};
use schelling_core::equilibrium::placement_count;
use schelling_core::instances::{evaluate_bound, BoundKind, BoundParams};
use schelling_core::rational::{format_rational, Exact};
use schelling_core::{
    best_response_dynamics, enumerate_equilibria, is_equilibrium, optimal_welfare, social_welfare, standard_tolerance,
    utility, Assignment, DynamicsOutcome, EnumerationConfig, GameInstance, Rational, ToleranceKind, ToleranceVector,
};

use crate::file::{named_instance, parse_tolerance_kind, parse_tolerance_list, InstanceFile, NamedParams, TopologySource};
use crate::random::random_tree;
use crate::{sweep, verify, CliError};

#[derive(Debug, Parser)]
#[command(name = "schelling", version, about = "Equilibrium experiments for tolerance Schelling games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an instance file for a named instance or a standard graph.
    Generate(GenerateArgs),
    /// Check whether a stored assignment is an equilibrium.
    Check(CheckArgs),
    /// Run a construction and store its output in the instance file.
    Construct(ConstructArgs),
    /// Run improving-jump dynamics from a stored assignment.
    Dynamics(DynamicsArgs),
    /// Enumerate every equilibrium and report welfare and price ratios.
    Enumerate(EnumerateArgs),
    /// Evaluate a closed-form price bound.
    Bounds(BoundsArgs),
    /// Run the acceptance suite and print one PASS/FAIL line per criterion.
    VerifyPaper(VerifyArgs),
    /// Write a Graphviz file of the topology, coloured by an assignment.
    ExportDot(ExportDotArgs),
    /// Enumerate a family of small graphs and write a CSV summary.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ToleranceArgs {
    /// Explicit vector, e.g. `1,1/2,0`.
    #[arg(long)]
    pub tolerance: Option<String>,
    /// zero, alpha-binary, proportional or inverse-proportional.
    #[arg(long)]
    pub tolerance_kind: Option<String>,
    #[arg(long)]
    pub alpha: Option<usize>,
}

impl ToleranceArgs {
    pub fn resolve(&self, lambda: usize) -> Result<Option<ToleranceVector>, CliError> {
        match (&self.tolerance, &self.tolerance_kind) {
            (Some(_), Some(_)) => Err(CliError::Usage("give --tolerance or --tolerance-kind, not both".into())),
            (Some(list), None) => Ok(Some(parse_tolerance_list(list)?)),
            (None, Some(kind)) => Ok(Some(standard_tolerance(parse_tolerance_kind(kind)?, lambda, self.alpha)?)),
            (None, None) => Ok(None),
        }
    }

    fn resolve_or_zero(&self, lambda: usize) -> Result<ToleranceVector, CliError> {
        match self.resolve(lambda)? {
            Some(tv) => Ok(tv),
            None => Ok(standard_tolerance(ToleranceKind::Zero, lambda, None)?),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// no-eq-tree, poa-lb, pos, seven-type-grid, grid, path, cycle, clique,
    /// star or random-tree.
    pub instance: String,
    #[arg(long)]
    pub lambda: Option<usize>,
    #[arg(long)]
    pub mu: Option<usize>,
    #[arg(long)]
    pub b: Option<usize>,
    #[arg(long)]
    pub t1: Option<String>,
    #[arg(long = "agents-per-type", short = 'x')]
    pub agents_per_type: Option<usize>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub assignment: String,
    /// Print every agent's utility.
    #[arg(long)]
    pub utilities: bool,
    /// Check under this vector instead of the file's.
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ZtsGrid,
    BinaryGrid,
    BandGrid,
    Tree,
}

impl Method {
    fn label(self) -> &'static str {
        match self {
            Method::ZtsGrid => "zts-grid",
            Method::BinaryGrid => "binary-grid",
            Method::BandGrid => "band-grid",
            Method::Tree => "tree",
        }
    }
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Label for the new assignment; defaults to the method name.
    #[arg(long)]
    pub label: Option<String>,
    /// Where to write the updated file; defaults to the input.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub assignment: String,
    #[arg(long, default_value_t = 10_000)]
    pub max_steps: usize,
    /// Store the final placement under this label.
    #[arg(long)]
    pub save: Option<String>,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Also print every equilibrium.
    #[arg(long)]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub lambda: usize,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run only these criteria (1-12).
    #[arg(long)]
    pub criterion: Vec<usize>,
}

#[derive(Debug, Args)]
pub struct ExportDotArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub assignment: Option<String>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub lambda: usize,
    #[arg(long = "agents-per-type", short = 'x')]
    pub agents_per_type: usize,
    /// Largest node count to try.
    #[arg(long)]
    pub max_nodes: usize,
    /// Comma-separated subset of path,cycle,star,clique,grid.
    #[arg(long, default_value = "path,cycle,star,clique,grid")]
    pub kinds: String,
    #[command(flatten)]
    pub tolerance: ToleranceArgs,
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u128,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code. Errors go to `err` as a single line.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            let _ = writeln!(err, "error: usage: {first}");
            return crate::EXIT_FAILURE;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let line = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: {line}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    let text = match command {
        Command::Generate(args) => generate(&args)?,
        Command::Check(args) => check(&args)?,
        Command::Construct(args) => construct(&args)?,
        Command::Dynamics(args) => dynamics(&args)?,
        Command::Enumerate(args) => {
            let loaded = InstanceFile::read(&args.input)?.load()?;
            let config = EnumerationConfig { budget: args.budget, workers: args.workers.max(1) };
            enumeration_report(&loaded.game, &config, args.list)?
        }
        Command::Bounds(args) => bounds(&args)?,
        Command::VerifyPaper(args) => {
            let reports = verify::run_criteria(&args.criterion)?;
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.line());
                text.push('\n');
            }
            let failed = reports.iter().filter(|r| !r.passed).count();
            out.write_all(text.as_bytes()).map_err(io)?;
            if failed > 0 {
                return Err(CliError::VerificationFailed(failed));
            }
            return Ok(());
        }
        Command::ExportDot(args) => {
            let loaded = InstanceFile::read(&args.input)?.load()?;
            let a = args.assignment.as_deref().map(|l| loaded.assignment(l)).transpose()?;
            std::fs::write(&args.output, loaded.game.topology().to_dot(a))
                .map_err(|e| CliError::Io(format!("{}: {e}", args.output.display())))?;
            format!("wrote {}\n", args.output.display())
        }
        Command::Sweep(args) => sweep::run_sweep(&args)?,
    };
    out.write_all(text.as_bytes()).map_err(io)
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn emit(file: &InstanceFile, output: Option<&PathBuf>) -> Result<String, CliError> {
    match output {
        Some(path) => {
            file.write(path)?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(file.to_json()),
    }
}

fn generate(args: &GenerateArgs) -> Result<String, CliError> {
    let need = |value: Option<usize>, what: &str| {
        value.ok_or_else(|| CliError::Usage(format!("{} needs --{what}", args.instance)))
    };
    let standard = |topology: TopologySource| -> Result<InstanceFile, CliError> {
        let lambda = need(args.lambda, "lambda")?;
        let x = need(args.agents_per_type, "agents-per-type")?;
        let tv = args.tolerance.resolve_or_zero(lambda)?;
        let game = GameInstance::new(lambda, x, Arc::new(topology.build()?), tv)?;
        let mut file = InstanceFile::from_game(&args.instance, &game, &BTreeMap::new());
        file.topology = topology;
        Ok(file)
    };
    let file = match args.instance.as_str() {
        "grid" => standard(TopologySource::Grid { rows: need(args.rows, "rows")?, cols: need(args.cols, "cols")? })?,
        "path" => standard(TopologySource::Path { nodes: need(args.nodes, "nodes")? })?,
        "cycle" => standard(TopologySource::Cycle { nodes: need(args.nodes, "nodes")? })?,
        "clique" => standard(TopologySource::Clique { nodes: need(args.nodes, "nodes")? })?,
        "star" => standard(TopologySource::Star { nodes: need(args.nodes, "nodes")? })?,
        "random-tree" => {
            let nodes = need(args.nodes, "nodes")?;
            if nodes < 2 {
                return Err(CliError::Usage("random-tree needs at least 2 nodes".into()));
            }
            let tree = random_tree(&mut ChaCha8Rng::seed_from_u64(args.seed), nodes);
            standard(TopologySource::Explicit { node_count: nodes, edges: tree.edges().collect() })?
        }
        name => {
            let tolerance = match args.lambda.or(if name == "pos" { Some(2) } else { None }) {
                Some(lambda) => args.tolerance.resolve(lambda)?,
                None if args.tolerance.tolerance.is_some() => args.tolerance.resolve(0)?,
                None => None,
            };
            let params = NamedParams {
                lambda: args.lambda,
                mu: args.mu,
                b: args.b,
                t1: args.t1.clone().map(crate::file::RationalText::Text),
                tolerance: tolerance.map(|tv| tv.values().iter().map(|&r| r.into()).collect()),
            };
            InstanceFile::from_named(&named_instance(name, &params)?)
        }
    };
    emit(&file, args.output.as_ref())
}

fn verdict_line(game: &GameInstance, a: &Assignment) -> String {
    match is_equilibrium(game, a) {
        (true, _) => "EQUILIBRIUM".to_string(),
        (false, w) => {
            let w = w.expect("unstable placement has a witness");
            format!(
                "NOT EQUILIBRIUM; witness: node {} -> node {}, gain {} -> {}",
                w.from_node,
                w.to_node,
                format_rational(&w.old_utility),
                format_rational(&w.new_utility)
            )
        }
    }
}

fn check(args: &CheckArgs) -> Result<String, CliError> {
    let loaded = InstanceFile::read(&args.input)?.load()?;
    let a = loaded.assignment(&args.assignment)?.clone();
    let game = match args.tolerance.resolve(loaded.game.lambda())? {
        Some(tv) => loaded.game.with_tolerance(tv)?,
        None => loaded.game,
    };
    let mut text = format!("assignment: {}\n{}\n", args.assignment, verdict_line(&game, &a));
    text.push_str(&format!("social welfare: {}\n", Exact(&social_welfare(&game, &a))));
    if args.utilities {
        for v in a.occupied_nodes() {
            let u = utility(&game, &a, v)?.value();
            text.push_str(&format!("node {v} type {}: {}\n", a.type_at(v), Exact(&u)));
        }
    }
    Ok(text)
}

fn construct(args: &ConstructArgs) -> Result<String, CliError> {
    let mut file = InstanceFile::read(&args.input)?;
    let loaded = file.load()?;
    let game = &loaded.game;
    let a = match args.method {
        Method::ZtsGrid => construct_2zts_grid(game)?,
        Method::BinaryGrid => construct_binary_grid(game)?,
        Method::BandGrid => construct_band_grid(game)?,
        Method::Tree => construct_tree_equilibrium(game)?,
    };
    let label = args.label.clone().unwrap_or_else(|| args.method.label().to_string());
    file.assignments.insert(label.clone(), a.pairs().collect());
    file.write(args.output.as_ref().unwrap_or(&args.input))?;
    Ok(format!(
        "constructed: {label}\n{}\nsocial welfare: {}\n",
        verdict_line(game, &a),
        Exact(&social_welfare(game, &a))
    ))
}

fn dynamics(args: &DynamicsArgs) -> Result<String, CliError> {
    let mut file = InstanceFile::read(&args.input)?;
    let loaded = file.load()?;
    let start = loaded.assignment(&args.assignment)?;
    let result = best_response_dynamics(&loaded.game, start, args.max_steps);
    let outcome = match result.outcome {
        DynamicsOutcome::Converged => "converged",
        DynamicsOutcome::CycleDetected => "cycle detected",
        DynamicsOutcome::StepLimit => "step limit",
    };
    const SHOWN: usize = 20;
    let moves: Vec<String> = result.trace.iter().take(SHOWN).map(|(f, t)| format!("{f}->{t}")).collect();
    let more = result.trace.len().saturating_sub(SHOWN);
    let mut text = format!(
        "outcome: {outcome}\nsteps: {}\ntrace: {}{}\n",
        result.steps,
        moves.join(" "),
        if more > 0 { format!(" ... ({more} more)") } else { String::new() }
    );
    text.push_str(&format!("initial welfare: {}\n", Exact(&social_welfare(&loaded.game, start))));
    text.push_str(&format!("final welfare: {}\n", Exact(&social_welfare(&loaded.game, &result.final_assignment))));
    if let Some(label) = &args.save {
        file.assignments.insert(label.clone(), result.final_assignment.pairs().collect());
        file.write(&args.input)?;
        text.push_str(&format!("saved: {label}\n"));
    }
    Ok(text)
}

/// The text printed by `enumerate`; identical for every worker count.
pub fn enumeration_report(game: &GameInstance, config: &EnumerationConfig, list: bool) -> Result<String, CliError> {
    let equilibria = enumerate_equilibria(game, config)?;
    let (_, opt) = optimal_welfare(game, config)?;
    let count = placement_count(game).map_or_else(|| "overflow".to_string(), |c| c.to_string());
    let mut text = format!("placements: {count}\nequilibria: {}\nopt: {}\n", equilibria.len(), Exact(&opt));
    let welfare: Vec<Rational> = equilibria.iter().map(|a| social_welfare(game, a)).collect();
    match (welfare.iter().min(), welfare.iter().max()) {
        (Some(worst), Some(best)) => {
            let ratio = |w: &Rational| if *w == Rational::from_integer(0) { "unbounded".to_string() } else { Exact(&(opt / w)).to_string() };
            text.push_str(&format!("worst equilibrium welfare: {}\n", Exact(worst)));
            text.push_str(&format!("best equilibrium welfare: {}\n", Exact(best)));
            text.push_str(&format!("poa: {}\npos: {}\n", ratio(worst), ratio(best)));
        }
        _ => text.push_str("poa: undefined\npos: undefined\n"),
    }
    if list {
        for (a, w) in equilibria.iter().zip(&welfare) {
            let slots: Vec<String> = a.slots().iter().map(u8::to_string).collect();
            text.push_str(&format!("{} | {}\n", slots.join(" "), format_rational(w)));
        }
    }
    Ok(text)
}

fn bounds(args: &BoundsArgs) -> Result<String, CliError> {
    let kind: BoundKind = args.kind.parse()?;
    let tolerance = args.tolerance.resolve(args.lambda)?;
    let value = evaluate_bound(kind, &BoundParams { lambda: args.lambda, n: args.n, tolerance })?;
    Ok(format!("{}\n", Exact(&value)))
}
