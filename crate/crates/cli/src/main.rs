//! Command-line front end for the netspread toolkit.
//!
//! Exit codes: 0 success, 1 IO/parse/usage, 2 assumption failure under
//! `--strict`, 3 unidentifiable data, 4 no stability certificate, 5
//! pipeline precondition violated.

mod fixtures;
mod formats;

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use netspread_core::analysis::{classify, endemic_equilibrium, lyapunov_weights, AnalysisError};
use netspread_core::dynamics::{
    check_assumptions, simulate, AssumptionReport, ConditionCheck, DynamicsError, ModelKind,
};
use netspread_core::graph::{build_from_edge_list, WeightedDigraph};
use netspread_core::identify::{
    identify_heterogeneous, identify_homogeneous, identify_ratio, ratio_from_endemic,
    EstimationResult, IdentifyError,
};
use netspread_core::pipeline::{
    snow_pipeline, usda_pipeline, EndemicObservation, PipelineError, SnowOptions, SnowStructure,
};
use netspread_core::rng::SplitMix64;

const EXIT_IO: i32 = 1;
const EXIT_ASSUMPTIONS: i32 = 2;
const EXIT_UNIDENTIFIABLE: i32 = 3;
const EXIT_NO_CERTIFICATE: i32 = 4;
const EXIT_PIPELINE: i32 = 5;

struct Failure {
    code: i32,
    message: String,
}

type CliResult = Result<(), Failure>;

fn fail(code: i32, message: impl std::fmt::Display) -> Failure {
    Failure {
        code,
        message: format!("{message}"),
    }
}

fn io_fail(err: anyhow::Error) -> Failure {
    fail(EXIT_IO, format!("{err:#}"))
}

fn dynamics_fail(err: DynamicsError) -> Failure {
    match err {
        DynamicsError::InvariantViolated { .. } => fail(EXIT_PIPELINE, err),
        _ => fail(EXIT_IO, err),
    }
}

fn identify_fail(err: IdentifyError) -> Failure {
    match err {
        IdentifyError::RatioUndefined | IdentifyError::EndemicEntryTooSmall { .. } => {
            fail(EXIT_UNIDENTIFIABLE, err)
        }
        _ => fail(EXIT_IO, err),
    }
}

fn pipeline_fail(err: PipelineError) -> Failure {
    match &err {
        PipelineError::Unidentifiable { .. } => fail(EXIT_UNIDENTIFIABLE, err),
        PipelineError::Identify(IdentifyError::InsufficientData) => fail(EXIT_IO, err),
        PipelineError::Graph(_) => fail(EXIT_IO, err),
        _ => fail(EXIT_PIPELINE, err),
    }
}

#[derive(Parser)]
#[command(
    name = "netspread",
    version,
    about = "Networked spread models: simulate, analyze, identify, validate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Roll out a spread model and write the trajectory as CSV
    Simulate(SimulateArgs),
    /// Recover spread parameters from trajectory data
    Identify(IdentifyArgs),
    /// Classify the regime via the spectral threshold
    Analyze(AnalyzeArgs),
    /// Compute the endemic equilibrium
    Endemic(EndemicArgs),
    /// End-to-end validation workflows
    Validate {
        #[command(subcommand)]
        workflow: ValidateCommand,
    },
    /// Deterministic fixture generation
    Fixtures {
        #[command(subcommand)]
        what: FixturesCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Euler,
    Product,
    Truncated,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> ModelKind {
        match m {
            ModelArg::Euler => ModelKind::Euler,
            ModelArg::Product => ModelKind::Product,
            ModelArg::Truncated => ModelKind::Truncated,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Parameters JSON ({h, delta, beta, adjacency | combined_b})
    #[arg(long)]
    params: PathBuf,
    /// Initial state CSV (one headerless row)
    #[arg(long, conflicts_with = "random_infected")]
    x0: Option<PathBuf>,
    /// Draw a random binary initial state with this many infected nodes
    #[arg(long)]
    random_infected: Option<usize>,
    /// Seed for the documented splitmix64 generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = ModelArg::Euler)]
    model: ModelArg,
    /// Output trajectory CSV
    #[arg(long)]
    out: PathBuf,
    /// Exit with code 2 if any model assumption fails
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum IdentifyMode {
    Homogeneous,
    Heterogeneous,
    Ratio,
    EndemicRatio,
}

#[derive(Args)]
struct GraphInput {
    /// Adjacency as headerless matrix CSV
    #[arg(long, conflicts_with = "edges")]
    adjacency: Option<PathBuf>,
    /// Adjacency as an i,j,weight edge list CSV
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Node count for edge lists (default: largest index + 1)
    #[arg(long)]
    nodes: Option<usize>,
    /// Mirror each edge-list entry
    #[arg(long)]
    symmetric: bool,
    /// Place a unit diagonal when building from an edge list
    #[arg(long)]
    self_loops: bool,
}

impl GraphInput {
    fn load(&self) -> Result<WeightedDigraph, Failure> {
        match (&self.adjacency, &self.edges) {
            (Some(path), None) => {
                let weights = formats::read_matrix_csv(path).map_err(io_fail)?;
                WeightedDigraph::from_weights(weights)
                    .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
            }
            (None, Some(path)) => {
                let edges = formats::read_edge_list_csv(path).map_err(io_fail)?;
                let inferred = edges
                    .iter()
                    .map(|&(i, j, _)| i.max(j) + 1)
                    .max()
                    .unwrap_or(0);
                let n = self.nodes.unwrap_or(inferred);
                build_from_edge_list(&edges, n, self.symmetric, self.self_loops)
                    .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
            }
            _ => Err(fail(EXIT_IO, "give exactly one of --adjacency or --edges")),
        }
    }
}

#[derive(Args)]
struct IdentifyArgs {
    /// Trajectory CSV (header k,x0,...)
    #[arg(long)]
    trajectory: PathBuf,
    #[command(flatten)]
    graph: GraphInput,
    /// Known step size (or the guess, in ratio mode)
    #[arg(long)]
    h: f64,
    #[arg(long, value_enum, default_value_t = IdentifyMode::Homogeneous)]
    mode: IdentifyMode,
    /// Emit machine-readable JSON instead of the summary
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    params: PathBuf,
    /// Add a diagonal Lyapunov certificate (fails above the threshold)
    #[arg(long)]
    certificate: bool,
    /// Add the endemic state
    #[arg(long)]
    endemic: bool,
    /// Also write the JSON document to this path
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EndemicArgs {
    #[arg(long)]
    params: PathBuf,
}

#[derive(Subcommand)]
enum ValidateCommand {
    /// Outbreak workflow: derive rates from terminal counts, simulate from
    /// the source, aggregate incidence
    Snow(SnowArgs),
    /// Adoption workflow: fit on a training region, replay on the full graph
    Usda(UsdaArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum StructureArg {
    /// Binary proximity graph with self loops
    Radius,
    /// Proximity graph plus a source column of ones
    RadiusBroadcast,
    /// Self loops plus directed source-to-node edges
    Broadcast,
}

#[derive(Args)]
struct SnowArgs {
    /// Observation CSV (header id,count,capacity)
    #[arg(long)]
    observation: PathBuf,
    /// Row id of the broadcast source
    #[arg(long)]
    source_id: String,
    /// Pinned equilibrium level of the source
    #[arg(long, default_value_t = 0.95)]
    source_level: f64,
    #[arg(long, value_enum, default_value_t = StructureArg::Broadcast)]
    structure: StructureArg,
    /// Positions CSV, required for the proximity structures
    #[arg(long)]
    positions: Option<PathBuf>,
    /// Connection radius for the proximity structures
    #[arg(long)]
    radius: Option<f64>,
    /// Source-column weight override, `id=weight` (repeatable)
    #[arg(long = "override", value_name = "ID=WEIGHT")]
    overrides: Vec<String>,
    #[arg(long)]
    h: f64,
    #[arg(long)]
    steps: usize,
    /// Re-pin the source at its initial level after every step
    #[arg(long)]
    hold_source: bool,
    /// Steps aggregated into one incidence period (default derived from h)
    #[arg(long)]
    steps_per_period: Option<usize>,
    /// Reference incidence CSV to score against
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct UsdaArgs {
    /// Training trajectory CSV
    #[arg(long)]
    train_trajectory: PathBuf,
    /// Training-region adjacency (edge list CSV)
    #[arg(long)]
    train_edges: PathBuf,
    /// Full-region adjacency (edge list CSV)
    #[arg(long)]
    full_edges: PathBuf,
    /// Mirror edge-list entries
    #[arg(long)]
    symmetric: bool,
    /// Place unit diagonals
    #[arg(long)]
    self_loops: bool,
    /// Full-region initial state CSV (one headerless row)
    #[arg(long)]
    x0: PathBuf,
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    h: f64,
    /// Reference trajectory CSV to score against
    #[arg(long)]
    reference: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum FixturesCommand {
    /// Write a deterministic fixture set
    Generate(FixturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureKind {
    /// Proximity graph with shared rates and a binary initial state
    Geometric,
    /// Proximity graph with per-node rates
    Heterogeneous,
    /// Synthetic terminal-count observation plus positions
    EndemicObservation,
    /// Grid adjacencies plus simulated training/reference trajectories
    CountyGrid,
}

#[derive(Args)]
struct FixturesArgs {
    #[arg(long, value_enum)]
    kind: FixtureKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    /// Node count (geometric, heterogeneous)
    #[arg(long, default_value_t = 40)]
    nodes: usize,
    /// Connection radius (geometric, heterogeneous)
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    /// Side of the square sampling box (geometric, heterogeneous)
    #[arg(long = "box", default_value_t = 10.0)]
    box_side: f64,
    /// Initially infected nodes (geometric)
    #[arg(long, default_value_t = 8)]
    infected: usize,
    /// Household count (endemic-observation)
    #[arg(long, default_value_t = 200)]
    households: usize,
    /// Household capacity (endemic-observation)
    #[arg(long, default_value_t = 20.0)]
    capacity: f64,
    /// Full grid side (county-grid)
    #[arg(long, default_value_t = 6)]
    side: usize,
    /// Training grid side (county-grid)
    #[arg(long, default_value_t = 3)]
    train_side: usize,
    /// Shared infection rate (county-grid)
    #[arg(long, default_value_t = 0.15)]
    beta: f64,
    /// Shared healing rate (county-grid)
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Step size (county-grid)
    #[arg(long, default_value_t = 1.0)]
    h: f64,
    /// Simulated transitions (county-grid)
    #[arg(long, default_value_t = 4)]
    steps: usize,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_IO,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(failure) = run(cli) {
        eprintln!("error: {}", failure.message);
        std::process::exit(failure.code);
    }
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Identify(args) => cmd_identify(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Endemic(args) => cmd_endemic(args),
        Command::Validate { workflow } => match workflow {
            ValidateCommand::Snow(args) => cmd_validate_snow(args),
            ValidateCommand::Usda(args) => cmd_validate_usda(args),
        },
        Command::Fixtures { what } => match what {
            FixturesCommand::Generate(args) => cmd_fixtures_generate(args),
        },
    }
}

fn print_assumptions(report: &AssumptionReport) {
    let line = |name: &str, check: &ConditionCheck| {
        let status = if check.passed { "ok" } else { "FAILED" };
        if check.offending.is_empty() {
            println!("  {name}: {status} (worst {:.6})", check.worst);
        } else {
            println!(
                "  {name}: {status} (worst {:.6}, nodes {:?})",
                check.worst, check.offending
            );
        }
    };
    println!("assumptions:");
    line("initial state in [0,1]^n", &report.initial_state_in_unit_box);
    line("rates nonnegative", &report.rates_nonnegative);
    line("per-step rate bounds", &report.step_size_within_bounds);
    line("nontrivial spread", &report.nontrivial_spread);
    line("irreducible coupling", &report.irreducible_coupling);
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    let params = formats::read_params_json(&args.params).map_err(io_fail)?;
    let x0 = match (&args.x0, args.random_infected) {
        (Some(path), None) => {
            let state = formats::read_state_csv(path).map_err(io_fail)?;
            if state.len() != params.n() {
                return Err(fail(
                    EXIT_IO,
                    format!("{} has {} entries, expected {}", path.display(), state.len(), params.n()),
                ));
            }
            state
        }
        (None, Some(count)) => {
            if count > params.n() {
                return Err(fail(EXIT_IO, "cannot infect more nodes than exist"));
            }
            let mut rng = SplitMix64::new(args.seed);
            let mut state = vec![0.0; params.n()];
            let mut placed = 0;
            while placed < count {
                let pick = rng.below(params.n());
                if state[pick] == 0.0 {
                    state[pick] = 1.0;
                    placed += 1;
                }
            }
            state
        }
        _ => return Err(fail(EXIT_IO, "give exactly one of --x0 or --random-infected")),
    };

    let report = check_assumptions(&params, &x0);
    print_assumptions(&report);
    if args.strict && !report.all_passed() {
        return Err(fail(
            EXIT_ASSUMPTIONS,
            "assumptions failed and --strict was given",
        ));
    }

    let run = simulate(&params, &x0, args.steps, args.model.into()).map_err(dynamics_fail)?;
    for warning in &run.warnings {
        eprintln!("warning: {warning}");
    }
    for excursion in &run.excursions {
        eprintln!(
            "warning: state left [0,1]^n by {:e} at step {}",
            excursion.magnitude, excursion.step
        );
    }
    formats::write_trajectory_csv(&args.out, &run.trajectory).map_err(io_fail)?;
    println!(
        "wrote {} states ({} transitions) to {}",
        run.trajectory.states.len(),
        run.trajectory.transitions(),
        args.out.display()
    );
    Ok(())
}

fn print_estimate(result: &EstimationResult) {
    let show = |estimate: &netspread_core::identify::Estimate| match estimate {
        netspread_core::identify::Estimate::Scalar(v) => format!("{v}"),
        netspread_core::identify::Estimate::PerNode(v) => format!("{v:?}"),
    };
    println!("beta:  {}", show(&result.beta_hat));
    println!("delta: {}", show(&result.delta_hat));
    println!("ratio: {}", show(&result.ratio_hat));
    println!(
        "residual {:.3e}, rank {}, transitions {}, movement {}",
        result.residual_norm,
        result.rank,
        result.diagnostics.transitions,
        result.diagnostics.movement_detected
    );
    if !result.diagnostics.nodes_stationary.is_empty() {
        println!("stationary nodes: {:?}", result.diagnostics.nodes_stationary);
    }
    if let Some(case) = result.diagnostics.stationary_case {
        println!("stationary case: {case:?}");
    }
    if result.diagnostics.scaled_by_step_guess {
        println!("note: estimates are scaled by the step-size guess; the ratio is not");
    }
    if result.diagnostics.negative_estimates {
        println!("warning: negative estimates indicate model mismatch");
    }
}

fn cmd_identify(args: IdentifyArgs) -> CliResult {
    let trajectory = formats::read_trajectory_csv(&args.trajectory, args.h).map_err(io_fail)?;
    let graph = args.graph.load()?;

    if matches!(args.mode, IdentifyMode::EndemicRatio) {
        let ratios = ratio_from_endemic(trajectory.last(), &graph).map_err(identify_fail)?;
        if args.json {
            println!(
                "{}",
                serde_json::json!({ "ratio_delta_over_beta": ratios })
            );
        } else {
            println!("per-node delta/beta from the final state: {ratios:?}");
        }
        return Ok(());
    }

    let result = match args.mode {
        IdentifyMode::Homogeneous => identify_homogeneous(&trajectory, &graph, args.h),
        IdentifyMode::Heterogeneous => identify_heterogeneous(&trajectory, &graph, args.h),
        IdentifyMode::Ratio => identify_ratio(&trajectory, &graph, args.h),
        IdentifyMode::EndemicRatio => unreachable!("handled above"),
    }
    .map_err(identify_fail)?;

    if args.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).expect("serializable result")
        );
    } else {
        print_estimate(&result);
    }
    if !result.identifiable {
        return Err(fail(
            EXIT_UNIDENTIFIABLE,
            "parameters are not identifiable from this trajectory",
        ));
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult {
    let params = formats::read_params_json(&args.params).map_err(io_fail)?;
    let report = classify(&params);
    let mut doc = serde_json::json!({ "threshold": report });

    if args.certificate {
        match lyapunov_weights(&params) {
            Ok(cert) => {
                doc["certificate"] = serde_json::json!(cert);
            }
            Err(err @ AnalysisError::CertificateUnavailable { .. }) => {
                return Err(fail(EXIT_NO_CERTIFICATE, err));
            }
            Err(err) => return Err(fail(EXIT_NO_CERTIFICATE, err)),
        }
    }
    if args.endemic {
        let state = endemic_equilibrium(&params).map_err(|e| fail(EXIT_PIPELINE, e))?;
        doc["endemic"] = serde_json::json!(state);
    }

    let text = serde_json::to_string_pretty(&doc).expect("serializable report");
    println!("{text}");
    if let Some(out) = &args.out {
        std::fs::write(out, format!("{text}\n"))
            .map_err(|e| fail(EXIT_IO, format!("cannot write {}: {e}", out.display())))?;
    }
    Ok(())
}

fn cmd_endemic(args: EndemicArgs) -> CliResult {
    let params = formats::read_params_json(&args.params).map_err(io_fail)?;
    let state = endemic_equilibrium(&params).map_err(|e| fail(EXIT_PIPELINE, e))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&state).expect("serializable state")
    );
    Ok(())
}

fn resolve_id(ids: &[String], wanted: &str, what: &str) -> Result<usize, Failure> {
    ids.iter()
        .position(|id| id == wanted)
        .ok_or_else(|| fail(EXIT_IO, format!("{what} id {wanted:?} not found in observation")))
}

fn cmd_validate_snow(args: SnowArgs) -> CliResult {
    let (ids, counts, capacities) =
        formats::read_observation_csv(&args.observation).map_err(io_fail)?;
    let source_index = resolve_id(&ids, &args.source_id, "source")?;
    let obs = EndemicObservation::new(counts, capacities, source_index, args.source_level)
        .map_err(pipeline_fail)?;

    let structure = match args.structure {
        StructureArg::Radius | StructureArg::RadiusBroadcast => {
            let positions_path = args.positions.as_ref().ok_or_else(|| {
                fail(EXIT_IO, "--positions is required for the proximity structures")
            })?;
            let radius = args
                .radius
                .ok_or_else(|| fail(EXIT_IO, "--radius is required for the proximity structures"))?;
            let (_, positions) = formats::read_positions_csv(positions_path).map_err(io_fail)?;
            if matches!(args.structure, StructureArg::Radius) {
                SnowStructure::Radius { positions, radius }
            } else {
                SnowStructure::RadiusBroadcast { positions, radius }
            }
        }
        StructureArg::Broadcast => {
            let mut overrides = Vec::new();
            for spec in &args.overrides {
                let (id, weight) = spec.split_once('=').ok_or_else(|| {
                    fail(EXIT_IO, format!("override {spec:?} must look like id=weight"))
                })?;
                let node = resolve_id(&ids, id, "override")?;
                let weight: f64 = weight
                    .parse()
                    .map_err(|_| fail(EXIT_IO, format!("bad override weight in {spec:?}")))?;
                overrides.push((node, weight));
            }
            SnowStructure::SelfLoopBroadcast { overrides }
        }
    };

    let reference = match &args.reference {
        Some(path) => Some(formats::read_incidence_csv(path).map_err(io_fail)?),
        None => None,
    };

    let opts = SnowOptions {
        steps: args.steps,
        hold_source: args.hold_source,
        steps_per_period: args.steps_per_period,
    };
    let run =
        snow_pipeline(&obs, &structure, args.h, &opts, reference.as_ref()).map_err(pipeline_fail)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| fail(EXIT_IO, format!("cannot create {}: {e}", args.out_dir.display())))?;
    formats::write_trajectory_csv(&args.out_dir.join("trajectory.csv"), &run.trajectory)
        .map_err(io_fail)?;
    formats::write_incidence_csv(&args.out_dir.join("incidence.csv"), &run.incidence)
        .map_err(io_fail)?;
    let report = serde_json::json!({
        "equilibrium_defect": run.equilibrium_defect,
        "terminal_gap": run.terminal_gap,
        "derived_delta": run.derived_delta,
        "total_events": run.incidence.total,
        "steps_per_period": run.incidence.steps_per_period,
        "assumptions": run.assumptions,
        "fit": run.fit,
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable report");
    std::fs::write(args.out_dir.join("report.json"), format!("{text}\n"))
        .map_err(|e| fail(EXIT_IO, format!("cannot write report.json: {e}")))?;

    print_assumptions(&run.assumptions);
    println!(
        "equilibrium defect {:.3e}, terminal gap {:.3e}, {} events over {} periods",
        run.equilibrium_defect,
        run.terminal_gap,
        run.incidence.total,
        run.incidence.per_period.len()
    );
    if let Some(fit) = &run.fit {
        println!("scaled error vs reference: {:.6}", fit.scaled_frobenius_error);
    }
    println!("outputs in {}", args.out_dir.display());
    Ok(())
}

fn cmd_validate_usda(args: UsdaArgs) -> CliResult {
    let train_trajectory =
        formats::read_trajectory_csv(&args.train_trajectory, args.h).map_err(io_fail)?;
    let load_edges = |path: &Path| -> Result<WeightedDigraph, Failure> {
        let edges = formats::read_edge_list_csv(path).map_err(io_fail)?;
        let n = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
        build_from_edge_list(&edges, n, args.symmetric, args.self_loops)
            .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
    };
    let train_graph = load_edges(&args.train_edges)?;
    let full_graph = load_edges(&args.full_edges)?;
    let full_x0 = formats::read_state_csv(&args.x0).map_err(io_fail)?;
    if full_x0.len() != full_graph.n() {
        return Err(fail(
            EXIT_IO,
            format!("x0 has {} entries, expected {}", full_x0.len(), full_graph.n()),
        ));
    }
    let reference = match &args.reference {
        Some(path) => Some(formats::read_trajectory_csv(path, args.h).map_err(io_fail)?),
        None => None,
    };

    let run = usda_pipeline(
        &train_trajectory,
        &train_graph,
        &full_graph,
        &full_x0,
        args.steps,
        args.h,
        reference.as_ref(),
    )
    .map_err(pipeline_fail)?;

    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| fail(EXIT_IO, format!("cannot create {}: {e}", args.out_dir.display())))?;
    formats::write_trajectory_csv(&args.out_dir.join("simulated.csv"), &run.trajectory)
        .map_err(io_fail)?;
    let report = serde_json::json!({
        "estimate": run.estimate,
        "fit": run.fit,
    });
    let text = serde_json::to_string_pretty(&report).expect("serializable report");
    std::fs::write(args.out_dir.join("report.json"), format!("{text}\n"))
        .map_err(|e| fail(EXIT_IO, format!("cannot write report.json: {e}")))?;

    print_estimate(&run.estimate);
    if let Some(fit) = &run.fit {
        println!("scaled error vs reference: {:.6}", fit.scaled_frobenius_error);
    }
    println!("outputs in {}", args.out_dir.display());
    Ok(())
}

fn cmd_fixtures_generate(args: FixturesArgs) -> CliResult {
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| fail(EXIT_IO, format!("cannot create {}: {e}", args.out_dir.display())))?;
    let files = match args.kind {
        FixtureKind::Geometric => fixtures::generate_geometric(
            &args.out_dir,
            args.seed,
            args.nodes,
            args.radius,
            args.box_side,
            args.infected,
        ),
        FixtureKind::Heterogeneous => fixtures::generate_heterogeneous(
            &args.out_dir,
            args.seed,
            args.nodes,
            args.radius,
            args.box_side,
        ),
        FixtureKind::EndemicObservation => fixtures::generate_endemic_observation(
            &args.out_dir,
            args.seed,
            args.households,
            args.capacity,
        ),
        FixtureKind::CountyGrid => fixtures::generate_county_grid(
            &args.out_dir,
            args.seed,
            args.side,
            args.train_side,
            args.beta,
            args.delta,
            args.h,
            args.steps,
        ),
    }
    .map_err(io_fail)?;
    for file in &files {
        println!("{}", args.out_dir.join(file).display());
    }
    Ok(())
}
