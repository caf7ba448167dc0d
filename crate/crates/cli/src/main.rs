//! Command-line front end: solve, certify, gen, and bench.
//!
//! Exit codes: 0 success, 1 failed validation or gap above target, 2 input or
//! i/o problems, 3 iteration budget exceeded.

mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use congestflow::solver::SolverError;
use congestflow::*;
use report::{ApproxInfo, BenchRow, ConfigEcho, InstanceInfo, RunReport, SolutionFile, StInfo};

const EXIT_FAIL: i32 = 1;
const EXIT_IO: i32 = 2;
const EXIT_BUDGET: i32 = 3;

/// Instance sizes up to this get a measured alpha when none is supplied.
const MEASURE_LIMIT: usize = 300;

#[derive(Parser)]
#[command(name = "congestflow", version, about = "Approximate minimum-congestion flow solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a demand-routing or source-sink instance.
    Solve(SolveArgs),
    /// Re-validate a solution file against its instance.
    Certify(CertifyArgs),
    /// Generate an instance file.
    Gen(GenArgs),
    /// Sweep accuracies and approximators on one instance.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ApproxKind {
    Degree,
    Tree,
    Hierarchy,
}

impl ApproxKind {
    fn name(self) -> &'static str {
        match self {
            ApproxKind::Degree => "degree",
            ApproxKind::Tree => "tree",
            ApproxKind::Hierarchy => "hierarchy",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// The descent solver.
    Gradient,
    /// The exact oracle (small instances only).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    Auto,
    Dimacs,
    Edgelist,
}

#[derive(Args)]
struct InstanceArgs {
    /// Graph file (DIMACS max or edge list).
    #[arg(long)]
    graph: PathBuf,
    /// Input format; auto picks by extension.
    #[arg(long, value_enum, default_value = "auto")]
    format: FileFormat,
    /// Demand file ("vertex value" lines, 1-indexed).
    #[arg(long)]
    demands: Option<PathBuf>,
    /// Source vertex (1-indexed) for a max-flow style run.
    #[arg(long, alias = "s")]
    source: Option<usize>,
    /// Sink vertex (1-indexed).
    #[arg(long)]
    sink: Option<usize>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Target accuracy.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    /// Congestion approximator.
    #[arg(long, value_enum, default_value = "hierarchy")]
    approx: ApproxKind,
    /// Override the approximator's claimed alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Measure alpha with the exact oracle (small instances) instead of using
    /// the claimed value; trades startup time for far fewer iterations.
    #[arg(long)]
    measure_alpha: bool,
    /// Hierarchy branching factor (default: ceil(sqrt(n))).
    #[arg(long)]
    t: Option<usize>,
    /// Seed for hierarchy construction.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "gradient")]
    method: Method,
    /// Write the solution JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run report JSON here (it is always printed to stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Reuse a saved hierarchy instead of building one.
    #[arg(long)]
    hierarchy_file: Option<PathBuf>,
    /// Save the built hierarchy for later runs.
    #[arg(long)]
    save_hierarchy: Option<PathBuf>,
    /// Iteration budget coefficient (tuning/testing knob).
    #[arg(long)]
    max_iter_coeff: Option<f64>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Solution file produced by `solve --out`.
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Instance family.
    #[arg(value_enum)]
    kind: GenKind,
    /// Vertex count (path/cycle/gnp), grid side, or clique size (barbell).
    #[arg(long)]
    n: usize,
    /// Edge probability for gnp.
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    #[arg(long, value_enum, default_value = "uniform")]
    cap: CapKind,
    #[arg(long, default_value_t = 1.0)]
    cap_lo: f64,
    #[arg(long, default_value_t = 2.0)]
    cap_hi: f64,
    #[arg(long, default_value_t = 1.0)]
    cap_mean: f64,
    /// Clique edge capacity (barbell).
    #[arg(long, default_value_t = 4.0)]
    clique_cap: f64,
    /// Bridge capacity (barbell).
    #[arg(long, default_value_t = 1.0)]
    bridge_cap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit DIMACS instead of an edge list (source 1, sink n).
    #[arg(long)]
    dimacs: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Path,
    Cycle,
    Grid,
    Gnp,
    Barbell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CapKind {
    Uniform,
    Exp,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Override alpha for every approximator (otherwise measured on small
    /// instances, claimed on large ones).
    #[arg(long)]
    alpha: Option<f64>,
    /// Hierarchy branching factor (default: ceil(sqrt(n))).
    #[arg(long)]
    t: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_json: Option<PathBuf>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Command::Solve(args) => cmd_solve(args),
        Command::Certify(args) => cmd_certify(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Bench(args) => cmd_bench(args),
    };
    let code = code.unwrap_or_else(|e| {
        eprintln!("error: {:#}", e.message);
        e.exit
    });
    std::process::exit(code);
}

struct Failure {
    exit: i32,
    message: anyhow::Error,
}

impl Failure {
    fn io(e: impl Into<anyhow::Error>) -> Self {
        Failure { exit: EXIT_IO, message: e.into() }
    }
}

fn solver_failure(e: SolverError) -> Failure {
    let exit = match e {
        SolverError::IterationBudget { .. } | SolverError::ScalingBudget { .. } => EXIT_BUDGET,
        _ => EXIT_IO,
    };
    Failure { exit, message: e.into() }
}

type CmdResult = Result<i32, Failure>;

// ---------------------------------------------------------------------------
// Shared input handling.

struct LoadedInstance {
    graph: Graph,
    demands: DemandVector,
    st: Option<(usize, usize)>,
    source_desc: String,
}

fn load_instance(args: &InstanceArgs) -> Result<LoadedInstance, Failure> {
    let format = match args.format {
        FileFormat::Auto => io::detect_format(&args.graph),
        FileFormat::Dimacs => io::GraphFormat::Dimacs,
        FileFormat::Edgelist => io::GraphFormat::EdgeList,
    };
    let (graph, file_st) = io::load_graph(&args.graph, format).map_err(Failure::io)?;
    let n = graph.vertex_count();
    let one_indexed = |v: usize, what: &str| -> Result<usize, Failure> {
        if v == 0 || v > n {
            Err(Failure::io(anyhow::anyhow!("{what} {v} out of range 1..={n}")))
        } else {
            Ok(v - 1)
        }
    };
    let (demands, st) = if let Some(path) = &args.demands {
        (io::load_demands(path, n).map_err(Failure::io)?, None)
    } else {
        let st = match (args.source, args.sink) {
            (Some(s), Some(t)) => Some((one_indexed(s, "source")?, one_indexed(t, "sink")?)),
            (None, None) => file_st,
            _ => {
                return Err(Failure::io(anyhow::anyhow!(
                    "--source and --sink must be given together"
                )))
            }
        };
        let Some((s, t)) = st else {
            return Err(Failure::io(anyhow::anyhow!(
                "no demands: pass --demands, or --source/--sink, or a DIMACS file with s/t lines"
            )));
        };
        if s == t {
            return Err(Failure::io(anyhow::anyhow!("source and sink must differ")));
        }
        (DemandVector::unit_pair(n, s, t), Some((s, t)))
    };
    Ok(LoadedInstance {
        graph,
        demands,
        st,
        source_desc: args.graph.display().to_string(),
    })
}

enum BuiltApprox {
    Degree(DegreeApproximator),
    Tree(TreeApproximator),
    Hierarchy(ForestHierarchy),
}

impl BuiltApprox {
    fn as_dyn(&self) -> &dyn CongestionApproximator {
        match self {
            BuiltApprox::Degree(a) => a,
            BuiltApprox::Tree(a) => a,
            BuiltApprox::Hierarchy(a) => a,
        }
    }
}

fn default_branching(n: usize) -> usize {
    (n as f64).sqrt().ceil().max(1.0) as usize
}

struct ApproxSetup {
    built: BuiltApprox,
    alpha: f64,
    measured: Option<f64>,
    build_ms: f64,
}

#[allow(clippy::too_many_arguments)]
fn build_approximator(
    g: &Graph,
    kind: ApproxKind,
    alpha_override: Option<f64>,
    measure: bool,
    t: Option<usize>,
    seed: u64,
    hierarchy_file: Option<&Path>,
    save_hierarchy: Option<&Path>,
) -> Result<ApproxSetup, Failure> {
    let start = Instant::now();
    let built = match kind {
        ApproxKind::Degree => BuiltApprox::Degree(DegreeApproximator::new(g, 1.0)),
        ApproxKind::Tree => BuiltApprox::Tree(build_tree_approximator(g)),
        ApproxKind::Hierarchy => {
            let h = match hierarchy_file {
                Some(path) => load_hierarchy(path, g).map_err(Failure::io)?,
                None => {
                    let t = t.unwrap_or_else(|| default_branching(g.vertex_count()));
                    build_hierarchy(g, t, seed).map_err(Failure::io)?
                }
            };
            if let Some(path) = save_hierarchy {
                save_hierarchy_file(&h, path)?;
            }
            BuiltApprox::Hierarchy(h)
        }
    };
    let build_ms = start.elapsed().as_secs_f64() * 1e3;

    let mut measured = None;
    let alpha = if let Some(a) = alpha_override {
        a
    } else if measure {
        if g.vertex_count() > MEASURE_LIMIT {
            return Err(Failure::io(anyhow::anyhow!(
                "--measure-alpha uses the exact oracle and is limited to n <= {MEASURE_LIMIT}"
            )));
        }
        let m = measure_alpha(built.as_dyn(), g, 16, seed);
        measured = Some(m);
        m * 1.25
    } else if kind == ApproxKind::Degree {
        return Err(Failure::io(anyhow::anyhow!(
            "the degree approximator has no certified alpha; pass --alpha or --measure-alpha"
        )));
    } else {
        built.as_dyn().alpha_claimed()
    };
    Ok(ApproxSetup { built, alpha, measured, build_ms })
}

fn save_hierarchy_file(h: &ForestHierarchy, path: &Path) -> Result<(), Failure> {
    save_hierarchy(h, path).map_err(Failure::io)
}

// ---------------------------------------------------------------------------
// solve

fn cmd_solve(args: SolveArgs) -> CmdResult {
    let total_start = Instant::now();
    let inst = load_instance(&args.instance)?;
    let g = &inst.graph;
    if inst.demands.is_zero() {
        return Err(Failure::io(anyhow::anyhow!("demand vector is identically zero")));
    }
    if !(args.eps > 0.0 && args.eps <= 0.5) {
        return Err(Failure::io(anyhow::anyhow!("--eps must lie in (0, 1/2]")));
    }

    let (solution, approx_info, alpha_used, solve_ms) = match args.method {
        Method::Gradient => {
            let setup = build_approximator(
                g,
                args.approx,
                args.alpha,
                args.measure_alpha,
                args.t,
                args.seed,
                args.hierarchy_file.as_deref(),
                args.save_hierarchy.as_deref(),
            )?;
            let mut cfg = SolverConfig::with_epsilon(args.eps);
            cfg.alpha = Some(setup.alpha);
            if let Some(c) = args.max_iter_coeff {
                cfg.max_iter_coeff = c;
            }
            let solve_start = Instant::now();
            let sol = route(g, setup.built.as_dyn(), &inst.demands, args.eps, &cfg)
                .map_err(solver_failure)?;
            let solve_ms = solve_start.elapsed().as_secs_f64() * 1e3;
            let info = ApproxInfo {
                kind: args.approx.name().to_string(),
                rows: setup.built.as_dyn().rows(),
                alpha_claimed: setup.built.as_dyn().alpha_claimed(),
                alpha_measured: setup.measured,
                build_ms: setup.build_ms,
            };
            (sol, info, setup.alpha, solve_ms)
        }
        Method::Exact => {
            let solve_start = Instant::now();
            let sol = exact_solution(g, &inst.demands)?;
            let solve_ms = solve_start.elapsed().as_secs_f64() * 1e3;
            let info = ApproxInfo {
                kind: "exact-oracle".to_string(),
                rows: 0,
                alpha_claimed: 1.0,
                alpha_measured: None,
                build_ms: 0.0,
            };
            (sol, info, 1.0, solve_ms)
        }
    };

    let config = ConfigEcho {
        eps: args.eps,
        approx: approx_info.kind.clone(),
        alpha: alpha_used,
        t: args.t.unwrap_or_else(|| default_branching(g.vertex_count())),
        seed: args.seed,
        method: match args.method {
            Method::Gradient => "gradient".to_string(),
            Method::Exact => "exact".to_string(),
        },
    };
    let file = build_solution_file(g, &inst, &solution, config, inst.st);

    if let Some(out) = &args.out {
        std::fs::write(out, serde_json::to_string_pretty(&file).map_err(Failure::io)?)
            .map_err(Failure::io)?;
    }
    let report = RunReport {
        schema: report::SCHEMA_VERSION,
        instance: file.instance.clone(),
        config: file.config.clone(),
        approximator: approx_info,
        primal: file.primal,
        dual: file.dual,
        gap: file.gap,
        iterations_per_round: file.rounds.iter().map(|r| r.iterations).collect(),
        scalings_per_round: file.rounds.iter().map(|r| r.scalings).collect(),
        solve_ms,
        total_ms: total_start.elapsed().as_secs_f64() * 1e3,
    };
    println!("{}", serde_json::to_string_pretty(&report).map_err(Failure::io)?);
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&report).map_err(Failure::io)?)
            .map_err(Failure::io)?;
    }

    let ok = file.gap <= (1.0 + args.eps) * (1.0 + 1e-9);
    Ok(if ok { 0 } else { EXIT_FAIL })
}

/// Solves with the exact oracle, shaping the result like the solver's.
fn exact_solution(g: &Graph, b: &DemandVector) -> Result<FlowSolution, Failure> {
    let oracle = exact_opt_congestion(g, b, 1e-9).map_err(|e| Failure::io(anyhow::anyhow!(e)))?;
    let flow = oracle.witness_flow.ok_or_else(|| Failure::io(anyhow::anyhow!("no witness flow")))?;
    let cut = oracle
        .witness_cut
        .ok_or_else(|| Failure::io(anyhow::anyhow!("oracle produced no witness cut")))?;
    let primal = max_congestion(g, &flow);
    let dual = cut.ratio;
    Ok(FlowSolution { flow, primal, dual, gap: primal / dual, cut, rounds: Vec::new() })
}

fn build_solution_file(
    g: &Graph,
    inst: &LoadedInstance,
    solution: &FlowSolution,
    config: ConfigEcho,
    st: Option<(usize, usize)>,
) -> SolutionFile {
    // For source/sink runs the stored artifact is the feasible scaled flow and
    // the demand it actually routes, so certification is uniform.
    let (flow, demands_vec, st_info, primal, dual) = match st {
        Some((s, t)) => {
            let value = 1.0 / solution.primal;
            let mut flow = solution.flow.clone();
            flow.scale(value);
            let mut d = vec![0.0; g.vertex_count()];
            d[s] = -value;
            d[t] = value;
            (
                flow,
                d,
                Some(StInfo { source: s + 1, sink: t + 1, value }),
                1.0,
                solution.dual * value,
            )
        }
        None => (
            solution.flow.clone(),
            inst.demands.values().to_vec(),
            None,
            solution.primal,
            solution.dual,
        ),
    };
    let demand_vector = DemandVector::from_raw_unchecked(demands_vec.clone());
    let cut = cut_quantities(g, &demand_vector, &solution.cut.side).expect("valid cut side");
    SolutionFile {
        schema: report::SCHEMA_VERSION,
        instance: InstanceInfo {
            n: g.vertex_count(),
            m: g.edge_count(),
            source: inst.source_desc.clone(),
        },
        config,
        demands: demands_vec
            .iter()
            .enumerate()
            .filter(|(_, x)| **x != 0.0)
            .map(|(v, x)| (v + 1, *x))
            .collect(),
        flow: flow.values().to_vec(),
        cut: cut.side.iter().map(|v| v + 1).collect(),
        cut_demand: cut.demand,
        cut_capacity: cut.capacity,
        primal,
        dual,
        gap: primal / dual,
        st: st_info,
        rounds: solution.rounds.clone(),
    }
}

// ---------------------------------------------------------------------------
// certify

fn cmd_certify(args: CertifyArgs) -> CmdResult {
    let inst = load_instance_allow_missing_demands(&args.instance)?;
    let g = &inst.graph;
    let text = std::fs::read_to_string(&args.solution).map_err(Failure::io)?;
    let file: SolutionFile = serde_json::from_str(&text).map_err(Failure::io)?;
    if file.schema != report::SCHEMA_VERSION {
        return Err(Failure::io(anyhow::anyhow!("unsupported solution schema {}", file.schema)));
    }
    if file.flow.len() != g.edge_count() {
        return Err(Failure::io(anyhow::anyhow!(
            "solution flow length {} does not match graph edge count {}",
            file.flow.len(),
            g.edge_count()
        )));
    }
    let mut demand = vec![0.0; g.vertex_count()];
    for &(v, x) in &file.demands {
        if v == 0 || v > g.vertex_count() {
            return Err(Failure::io(anyhow::anyhow!("solution demand vertex {v} out of range")));
        }
        demand[v - 1] += x;
    }
    let b = DemandVector::new(demand).map_err(Failure::io)?;

    // Cross-check the embedded demand against an independently supplied one.
    if let Some(given) = &inst.demands {
        let scale = given.linf_norm().max(1.0);
        // Source/sink runs store the scaled demand; compare directions.
        let matches = if let Some(st) = &file.st {
            inst.st.map_or(true, |(s, t)| st.source == s + 1 && st.sink == t + 1)
        } else {
            b.values()
                .iter()
                .zip(given.values())
                .all(|(a, c)| (a - c).abs() <= 1e-9 * scale)
        };
        if !matches {
            println!("demand mismatch: solution file was produced for a different instance");
            return Ok(EXIT_FAIL);
        }
    }

    let side: Vec<usize> = file.cut.iter().map(|v| v - 1).collect();
    let flow = Flow::new(file.flow.clone()).map_err(Failure::io)?;
    let solution = FlowSolution {
        flow,
        cut: Cut {
            side,
            demand: file.cut_demand,
            capacity: file.cut_capacity,
            ratio: file.dual,
        },
        primal: file.primal,
        dual: file.dual,
        gap: file.gap,
        rounds: Vec::new(),
    };
    let report = certify(g, &b, &solution, file.config.eps);
    println!("{}", serde_json::to_string_pretty(&report).map_err(Failure::io)?);
    Ok(if report.passed { 0 } else { EXIT_FAIL })
}

struct LoadedForCertify {
    graph: Graph,
    demands: Option<DemandVector>,
    st: Option<(usize, usize)>,
}

fn load_instance_allow_missing_demands(args: &InstanceArgs) -> Result<LoadedForCertify, Failure> {
    let format = match args.format {
        FileFormat::Auto => io::detect_format(&args.graph),
        FileFormat::Dimacs => io::GraphFormat::Dimacs,
        FileFormat::Edgelist => io::GraphFormat::EdgeList,
    };
    let (graph, file_st) = io::load_graph(&args.graph, format).map_err(Failure::io)?;
    let n = graph.vertex_count();
    let demands = match &args.demands {
        Some(path) => Some(io::load_demands(path, n).map_err(Failure::io)?),
        None => None,
    };
    let st = match (args.source, args.sink) {
        (Some(s), Some(t)) if s >= 1 && t >= 1 && s <= n && t <= n => Some((s - 1, t - 1)),
        (None, None) => file_st,
        _ => None,
    };
    Ok(LoadedForCertify {
        graph,
        demands: demands
            .or_else(|| st.map(|(s, t)| DemandVector::unit_pair(n, s, t)))
            .filter(|_| args.demands.is_some()),
        st,
    })
}

// ---------------------------------------------------------------------------
// gen

fn cmd_gen(args: GenArgs) -> CmdResult {
    let dist = match args.cap {
        CapKind::Uniform => CapDist::Uniform { lo: args.cap_lo, hi: args.cap_hi },
        CapKind::Exp => CapDist::Exponential { mean: args.cap_mean },
    };
    let g = match args.kind {
        GenKind::Path => gen::path(args.n, dist, args.seed),
        GenKind::Cycle => gen::cycle(args.n, dist, args.seed),
        GenKind::Grid => gen::grid(args.n, dist, args.seed),
        GenKind::Gnp => gen::gnp(args.n, args.p, dist, args.seed),
        GenKind::Barbell => gen::barbell(args.n, args.clique_cap, args.bridge_cap),
    }
    .map_err(Failure::io)?;
    let text = if args.dimacs {
        io::write_dimacs(&g, Some((0, g.vertex_count() - 1)))
    } else {
        io::write_edge_list(&g)
    };
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(Failure::io)?,
        None => print!("{text}"),
    }
    eprintln!(
        "generated {} instance: n = {}, m = {}",
        args.kind.name(),
        g.vertex_count(),
        g.edge_count()
    );
    Ok(0)
}

impl GenKind {
    fn name(self) -> &'static str {
        match self {
            GenKind::Path => "path",
            GenKind::Cycle => "cycle",
            GenKind::Grid => "grid",
            GenKind::Gnp => "gnp",
            GenKind::Barbell => "barbell",
        }
    }
}

// ---------------------------------------------------------------------------
// bench

fn cmd_bench(args: BenchArgs) -> CmdResult {
    let inst = load_instance(&args.instance)?;
    let g = &inst.graph;
    if args.alpha.is_none() && g.vertex_count() > MEASURE_LIMIT {
        return Err(Failure::io(anyhow::anyhow!(
            "bench measures alpha with the exact oracle (n <= {MEASURE_LIMIT}); pass --alpha for larger instances"
        )));
    }
    let mut rows = Vec::new();
    for kind in [ApproxKind::Degree, ApproxKind::Tree, ApproxKind::Hierarchy] {
        let setup = build_approximator(
            g,
            kind,
            args.alpha,
            args.alpha.is_none(),
            args.t,
            args.seed,
            None,
            None,
        )?;
        for eps in [0.5, 0.2, 0.1, 0.05] {
            let mut cfg = SolverConfig::with_epsilon(eps);
            cfg.alpha = Some(setup.alpha);
            let start = Instant::now();
            let sol =
                route(g, setup.built.as_dyn(), &inst.demands, eps, &cfg).map_err(solver_failure)?;
            let solve_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow {
                eps,
                approx: kind.name().to_string(),
                alpha: setup.alpha,
                iterations: sol.rounds.iter().map(|r| r.iterations).sum(),
                scalings: sol.rounds.iter().map(|r| r.scalings).sum(),
                rounds: sol.rounds.len(),
                primal: sol.primal,
                dual: sol.dual,
                gap: sol.gap,
                build_ms: setup.build_ms,
                solve_ms,
            });
        }
    }
    let json = serde_json::to_string_pretty(&rows).map_err(Failure::io)?;
    println!("{json}");
    if let Some(path) = &args.out_json {
        std::fs::write(path, &json).map_err(Failure::io)?;
    }
    if let Some(path) = &args.out_csv {
        std::fs::write(path, report::bench_csv(&rows)).map_err(Failure::io)?;
    }
    Ok(0)
}
