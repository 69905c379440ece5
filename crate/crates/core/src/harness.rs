//! Command-line front end: graph generation, single verified runs, and
//! multi-seed benchmark sweeps.
//!
//! One binary, three subcommands. `gen` writes an edge-list file, `run`
//! executes one algorithm on one graph and prints a JSON record, `bench`
//! sweeps a seed/parameter grid and prints CSV (config columns first, then
//! verdicts, then metrics — diff-able goldens). All randomness flows from
//! `--seed`; records never contain wall-clock readings, so re-running a
//! config reproduces its record byte for byte.
//!
//! Exit codes: 0 all checks pass, 1 verification failure, 2 usage error,
//! 3 resource-audit failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::algorithms::{
    beta_ruling_set, deg_ordered_sparsify, luby_mis, shatter, Engine, Planner, RulingSetParams,
    RunMetrics,
};
use crate::compression::PhaseRecord;
use crate::congest::EngineError;
use crate::graph::{gen_graph, load_graph, save_graph, GenModel, Graph};
use crate::mpc::{MachineConfig, MemoryMode};
use crate::randomness::RandomTape;
use crate::verify::{verify_domination, verify_independent};
use crate::NodeId;

/// Bumped whenever the record schema changes shape.
pub const SCHEMA_VERSION: u32 = 1;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VERIFY: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_AUDIT: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgoKind {
    /// Maximal independent set via the full pipeline (β = 1).
    Mis,
    /// 2-ruling set: one sparsify peel, then an MIS of the survivors.
    #[value(name = "2rs")]
    #[serde(rename = "2rs")]
    TwoRs,
    /// β-ruling set with β from --beta.
    Brs,
    /// Degree-ordered sparsification alone.
    Sparsify,
    /// One shattering pass alone (no cleanup).
    Shatter,
    /// Luby's MIS baseline.
    Luby,
}

impl AlgoKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgoKind::Mis => "mis",
            AlgoKind::TwoRs => "2rs",
            AlgoKind::Brs => "brs",
            AlgoKind::Sparsify => "sparsify",
            AlgoKind::Shatter => "shatter",
            AlgoKind::Luby => "luby",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum EngineKind {
    #[serde(rename = "congest")]
    Congest,
    /// Fabric engine, uniform phase planner.
    #[serde(rename = "mpc-v1")]
    MpcV1,
    /// Fabric engine, degree-staged phase planner.
    #[serde(rename = "mpc-v2")]
    MpcV2,
}

impl EngineKind {
    pub fn label(self) -> &'static str {
        match self {
            EngineKind::Congest => "congest",
            EngineKind::MpcV1 => "mpc-v1",
            EngineKind::MpcV2 => "mpc-v2",
        }
    }

    fn is_mpc(self) -> bool {
        self != EngineKind::Congest
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
pub enum MemoryKind {
    #[serde(rename = "unrestricted")]
    Unrestricted,
    #[serde(rename = "input-linear")]
    InputLinear,
}

impl MemoryKind {
    pub fn label(self) -> &'static str {
        match self {
            MemoryKind::Unrestricted => "unrestricted",
            MemoryKind::InputLinear => "input-linear",
        }
    }

    fn mode(self) -> MemoryMode {
        match self {
            MemoryKind::Unrestricted => MemoryMode::Unrestricted,
            MemoryKind::InputLinear => MemoryMode::InputLinear,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Gnp,
    #[value(name = "random_regular")]
    RandomRegular,
    Path,
    Cycle,
    Clique,
    Star,
    #[value(name = "disjoint_cliques")]
    DisjointCliques,
}

#[derive(Parser)]
#[command(name = "mpcsim", version, about = "Round-compressed graph algorithms on simulated machine fabrics")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Generate a seeded graph and write it as an edge-list file.
    Gen(GenArgs),
    /// Execute one run, verify its output, print the record as JSON.
    Run(RunArgs),
    /// Sweep a seed/parameter grid and print one CSV row per run.
    Bench(BenchArgs),
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Number of nodes.
    #[arg(long)]
    pub n: usize,
    /// Edge probability (gnp only).
    #[arg(long)]
    pub p: Option<f64>,
    /// Degree (random_regular only).
    #[arg(long)]
    pub d: Option<u32>,
    /// Number of cliques (disjoint_cliques only).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct RunArgs {
    /// Edge-list file produced by `gen`.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum)]
    pub algo: AlgoKind,
    /// Ruling-set radius (brs only; mis is 1, 2rs is 2).
    #[arg(long)]
    pub beta: Option<u32>,
    #[arg(long, value_enum, default_value = "congest")]
    pub engine: EngineKind,
    /// Machine-memory exponent S = n^ε (mpc engines only).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Global memory regime; also selects the brs peel schedule.
    #[arg(long, value_enum)]
    pub memory: Option<MemoryKind>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sparsify peel factor (sparsify only; stages pick their own for brs).
    #[arg(long)]
    pub f: Option<f64>,
    /// Re-chop planned phases to this length (mpc engines only).
    #[arg(long)]
    pub force_ell: Option<u32>,
    /// Sparsify density constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Shatter phase-length parameter δ.
    #[arg(long)]
    pub delta: Option<f64>,
}

#[derive(Args)]
pub struct BenchArgs {
    /// Inclusive seed range `A..B`; `1..0` gives an empty grid.
    #[arg(long, default_value = "1..1")]
    pub seeds: String,
    /// Node counts, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1000")]
    pub n: Vec<usize>,
    /// β values to sweep (implies --algo brs).
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<u32>>,
    #[arg(long, value_enum, default_value = "gnp")]
    pub model: ModelKind,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Defaults to brs when --beta is given, else 2rs.
    #[arg(long, value_enum)]
    pub algo: Option<AlgoKind>,
    #[arg(long, value_enum, default_value = "congest")]
    pub engine: EngineKind,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, value_enum)]
    pub memory: Option<MemoryKind>,
    #[arg(long)]
    pub f: Option<f64>,
    #[arg(long)]
    pub force_ell: Option<u32>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

/// Fully resolved run configuration: defaults applied, contradictions
/// rejected.
#[derive(Clone, Debug)]
pub struct RunSpec {
    pub algo: AlgoKind,
    pub engine: EngineKind,
    /// Radius the domination verdict is checked at.
    pub beta: u32,
    pub epsilon: f64,
    pub memory: MemoryKind,
    pub seed: u64,
    pub f: f64,
    pub c: f64,
    pub delta: f64,
    pub force_ell: Option<u32>,
}

#[allow(clippy::too_many_arguments)]
pub fn resolve_spec(
    algo: AlgoKind,
    beta: Option<u32>,
    engine: EngineKind,
    epsilon: Option<f64>,
    memory: Option<MemoryKind>,
    seed: u64,
    f: Option<f64>,
    force_ell: Option<u32>,
    c: Option<f64>,
    delta: Option<f64>,
) -> Result<RunSpec, String> {
    let beta = match (algo, beta) {
        (AlgoKind::Brs, b) => b.unwrap_or(2),
        (_, Some(_)) => {
            return Err(format!("--beta only applies to --algo brs, not {}", algo.label()))
        }
        (AlgoKind::TwoRs, None) => 2,
        (_, None) => 1,
    };
    if f.is_some() && algo != AlgoKind::Sparsify {
        return Err(format!("--f only applies to --algo sparsify, not {}", algo.label()));
    }
    let takes_c = matches!(
        algo,
        AlgoKind::Sparsify | AlgoKind::Mis | AlgoKind::TwoRs | AlgoKind::Brs
    );
    if c.is_some() && !takes_c {
        return Err(format!("--c does not apply to --algo {}", algo.label()));
    }
    let takes_delta = matches!(
        algo,
        AlgoKind::Shatter | AlgoKind::Mis | AlgoKind::TwoRs | AlgoKind::Brs
    );
    if delta.is_some() && !takes_delta {
        return Err(format!("--delta does not apply to --algo {}", algo.label()));
    }
    if !engine.is_mpc() {
        if epsilon.is_some() {
            return Err("--epsilon requires an mpc engine".into());
        }
        if force_ell.is_some() {
            return Err("--force-ell requires an mpc engine".into());
        }
        // on the reference engine --memory still matters where it selects
        // the peel schedule
        if memory.is_some() && !matches!(algo, AlgoKind::TwoRs | AlgoKind::Brs) {
            return Err("--memory on the congest engine only affects 2rs/brs schedules".into());
        }
    }
    if force_ell == Some(0) {
        return Err("--force-ell must be at least 1".into());
    }
    Ok(RunSpec {
        algo,
        engine,
        beta,
        epsilon: epsilon.unwrap_or(0.5),
        memory: memory.unwrap_or(MemoryKind::Unrestricted),
        seed,
        f: f.unwrap_or(8.0),
        c: c.unwrap_or(3.0),
        delta: delta.unwrap_or(1.0),
        force_ell,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub algo: AlgoKind,
    pub engine: EngineKind,
    pub graph: String,
    pub n: usize,
    pub m: usize,
    pub max_degree: u32,
    pub beta: u32,
    /// Peel factors the run actually used, comma separated.
    pub f_schedule: String,
    pub epsilon: f64,
    pub memory: MemoryKind,
    pub seed: u64,
    pub force_ell: Option<u32>,
    pub c: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultBlock {
    pub set_size: usize,
    pub independent: bool,
    pub dominated: bool,
    /// Radius the domination verdict was checked at.
    pub beta: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct MetricsBlock {
    /// Message-passing rounds simulated (units: rounds).
    pub congest_rounds: u32,
    /// Fabric rounds consumed (units: rounds; 0 on the reference engine).
    pub mpc_rounds: u32,
    /// Largest per-machine, per-round send volume (units: words).
    pub max_sent_words: u64,
    /// Largest per-machine, per-round receive volume (units: words).
    pub max_recv_words: u64,
    /// Largest resident footprint on any machine (units: words).
    pub peak_machine_words: u64,
    /// Largest total resident footprint across machines (units: words).
    pub peak_total_words: u64,
    pub machines: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub config: ConfigEcho,
    pub result: ResultBlock,
    pub metrics: MetricsBlock,
    pub version: u32,
}

pub struct RunOutput {
    pub record: RunRecord,
    /// The output set, ascending.
    pub set: Vec<NodeId>,
    /// All hard verdicts passed.
    pub hard_pass: bool,
    /// Per-round caps and the global budget held on the fabric.
    pub audit_pass: bool,
    /// Fabric phase records, for cost-model fits.
    pub phases: Vec<PhaseRecord>,
}

fn build_engine(spec: &RunSpec) -> Result<Engine, EngineError> {
    match spec.engine {
        EngineKind::Congest => Ok(Engine::Congest),
        EngineKind::MpcV1 | EngineKind::MpcV2 => {
            let cfg = MachineConfig::new(spec.epsilon, spec.memory.mode())?;
            Ok(Engine::Mpc {
                planner: if spec.engine == EngineKind::MpcV1 { Planner::V1 } else { Planner::V2 },
                cfg,
                force_ell: spec.force_ell,
                direct_only: false,
            })
        }
    }
}

/// Which of the two verdicts an algorithm guarantees. The other is still
/// measured and reported, it just cannot fail the run.
fn hard_verdicts(algo: AlgoKind) -> (bool, bool) {
    match algo {
        AlgoKind::Mis | AlgoKind::TwoRs | AlgoKind::Brs | AlgoKind::Luby => (true, true),
        // a sparsifier dominates but is nowhere near independent
        AlgoKind::Sparsify => (false, true),
        // a shatter pass is independent but leaves a residue undominated
        AlgoKind::Shatter => (true, false),
    }
}

pub fn execute_run(g: &Graph, graph_label: &str, spec: &RunSpec) -> Result<RunOutput, EngineError> {
    let engine = build_engine(spec)?;
    let tape = RandomTape::new(spec.seed, g.n());
    let (set, metrics, phases, f_schedule) = match spec.algo {
        AlgoKind::Mis | AlgoKind::TwoRs | AlgoKind::Brs => {
            let params = RulingSetParams {
                beta: spec.beta,
                c: spec.c,
                memory_mode: spec.memory.mode(),
                shatter_delta: spec.delta,
            };
            let rs = beta_ruling_set(g, params, &engine, &tape)?;
            let schedule: Vec<String> =
                rs.stages.iter().filter_map(|s| s.f).map(|f| format!("{f:.2}")).collect();
            (rs.set().to_vec(), rs.metrics, rs.phases, schedule.join(","))
        }
        AlgoKind::Sparsify => {
            let out = deg_ordered_sparsify(g, spec.f, spec.c, &engine, &tape)?;
            let label = format!("{:.2}", spec.f);
            (out.set, out.run.metrics, out.run.phases, label)
        }
        AlgoKind::Shatter => {
            let sh = shatter(g, None, spec.delta, &engine, &tape)?;
            (sh.independent, sh.run.metrics, sh.run.phases, String::new())
        }
        AlgoKind::Luby => {
            let mis = luby_mis(g, &engine, &tape)?;
            (mis.set, mis.run.metrics, mis.run.phases, String::new())
        }
    };

    let independent = verify_independent(g, &set);
    let dominated = verify_domination(g, &set, spec.beta);
    let (ind_hard, dom_hard) = hard_verdicts(spec.algo);
    let hard_pass = (independent.pass || !ind_hard) && (dominated.pass || !dom_hard);

    let record = RunRecord {
        config: ConfigEcho {
            algo: spec.algo,
            engine: spec.engine,
            graph: graph_label.to_string(),
            n: g.n(),
            m: g.m(),
            max_degree: g.max_degree(),
            beta: spec.beta,
            f_schedule,
            epsilon: spec.epsilon,
            memory: spec.memory,
            seed: spec.seed,
            force_ell: spec.force_ell,
            c: spec.c,
            delta: spec.delta,
        },
        result: ResultBlock {
            set_size: set.len(),
            independent: independent.pass,
            dominated: dominated.pass,
            beta: spec.beta,
        },
        metrics: metrics_block(&metrics),
        version: SCHEMA_VERSION,
    };
    Ok(RunOutput { record, set, hard_pass, audit_pass: metrics.audit_pass, phases })
}

fn metrics_block(m: &RunMetrics) -> MetricsBlock {
    MetricsBlock {
        congest_rounds: m.congest_rounds,
        mpc_rounds: m.mpc_rounds,
        max_sent_words: m.max_sent_words,
        max_recv_words: m.max_recv_words,
        peak_machine_words: m.peak_machine_words,
        peak_total_words: m.peak_total_words,
        machines: m.machines,
    }
}

// ---- CSV ----------------------------------------------------------------

pub fn csv_header() -> &'static str {
    "algo,engine,graph,n,m,max_degree,beta,f_schedule,epsilon,memory,seed,force_ell,c,delta,\
     set_size,independent,dominated,verified_beta,\
     congest_rounds,mpc_rounds,max_sent_words,max_recv_words,peak_machine_words,\
     peak_total_words,machines"
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn csv_row(r: &RunRecord) -> String {
    let c = &r.config;
    let force_ell = c.force_ell.map(|l| l.to_string()).unwrap_or_default();
    format!(
        "{algo},{engine},{graph},{n},{m},{max_degree},{beta},{fs},{eps},{mem},{seed},{fell},{cc},{delta},\
         {size},{ind},{dom},{vbeta},{cr},{mr},{sent},{recv},{pm},{pt},{mach}",
        algo = c.algo.label(),
        engine = c.engine.label(),
        graph = csv_quote(&c.graph),
        n = c.n,
        m = c.m,
        max_degree = c.max_degree,
        beta = c.beta,
        fs = csv_quote(&c.f_schedule),
        eps = c.epsilon,
        mem = c.memory.label(),
        seed = c.seed,
        fell = force_ell,
        cc = c.c,
        delta = c.delta,
        size = r.result.set_size,
        ind = r.result.independent,
        dom = r.result.dominated,
        vbeta = r.result.beta,
        cr = r.metrics.congest_rounds,
        mr = r.metrics.mpc_rounds,
        sent = r.metrics.max_sent_words,
        recv = r.metrics.max_recv_words,
        pm = r.metrics.peak_machine_words,
        pt = r.metrics.peak_total_words,
        mach = r.metrics.machines,
    )
}

// ---- subcommands ---------------------------------------------------------

pub fn run_cli() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Gen(args) => cmd_gen(&args),
        Cmd::Run(args) => cmd_run(&args),
        Cmd::Bench(args) => cmd_bench(&args),
    };
    ExitCode::from(code)
}

fn build_model(
    kind: ModelKind,
    n: usize,
    p: Option<f64>,
    d: Option<u32>,
    k: Option<usize>,
) -> Result<GenModel, String> {
    let forbid = |flag: Option<()>, name: &str, model: &str| -> Result<(), String> {
        if flag.is_some() {
            Err(format!("--{name} does not apply to --model {model}"))
        } else {
            Ok(())
        }
    };
    let p_flag = p.map(|_| ());
    let d_flag = d.map(|_| ());
    let k_flag = k.map(|_| ());
    match kind {
        ModelKind::Gnp => {
            forbid(d_flag, "d", "gnp")?;
            forbid(k_flag, "k", "gnp")?;
            let p = p.ok_or("--model gnp requires --p")?;
            Ok(GenModel::Gnp { n, p })
        }
        ModelKind::RandomRegular => {
            forbid(p_flag, "p", "random_regular")?;
            forbid(k_flag, "k", "random_regular")?;
            let d = d.ok_or("--model random_regular requires --d")?;
            Ok(GenModel::RandomRegular { n, d })
        }
        ModelKind::DisjointCliques => {
            forbid(p_flag, "p", "disjoint_cliques")?;
            forbid(d_flag, "d", "disjoint_cliques")?;
            let k = k.ok_or("--model disjoint_cliques requires --k")?;
            Ok(GenModel::DisjointCliques { n, k })
        }
        ModelKind::Path | ModelKind::Cycle | ModelKind::Clique | ModelKind::Star => {
            let name = match kind {
                ModelKind::Path => "path",
                ModelKind::Cycle => "cycle",
                ModelKind::Clique => "clique",
                _ => "star",
            };
            forbid(p_flag, "p", name)?;
            forbid(d_flag, "d", name)?;
            forbid(k_flag, "k", name)?;
            match kind {
                ModelKind::Path => Ok(GenModel::Path { n }),
                ModelKind::Cycle => Ok(GenModel::Cycle { n }),
                ModelKind::Clique => Ok(GenModel::Clique { n }),
                _ => Ok(GenModel::Star { n }),
            }
        }
    }
}

fn cmd_gen(args: &GenArgs) -> u8 {
    let model = match build_model(args.model, args.n, args.p, args.d, args.k) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    let g = match gen_graph(&model, args.seed) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = save_graph(&g, &args.out) {
        eprintln!("cannot write {}: {e}", args.out.display());
        return EXIT_USAGE;
    }
    println!("wrote {} — {} with n={} m={}", args.out.display(), model.describe(), g.n(), g.m());
    EXIT_PASS
}

/// Engine failures that indicate a configuration the graph cannot satisfy
/// exit as usage errors; everything else is a resource violation.
fn engine_error_code(e: &EngineError) -> u8 {
    match e {
        EngineError::Config(_) | EngineError::Plan(_) => EXIT_USAGE,
        _ => EXIT_AUDIT,
    }
}

fn cmd_run(args: &RunArgs) -> u8 {
    let spec = match resolve_spec(
        args.algo,
        args.beta,
        args.engine,
        args.epsilon,
        args.memory,
        args.seed,
        args.f,
        args.force_ell,
        args.c,
        args.delta,
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    let g = match load_graph(&args.graph) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("cannot load {}: {e}", args.graph.display());
            return EXIT_USAGE;
        }
    };
    let label = args.graph.display().to_string();
    let out = match execute_run(&g, &label, &spec) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("run failed: {e}");
            return engine_error_code(&e);
        }
    };
    match serde_json::to_string_pretty(&out.record) {
        Ok(json) => println!("{json}"),
        Err(e) => {
            eprintln!("cannot serialize record: {e}");
            return EXIT_AUDIT;
        }
    }
    if !out.hard_pass {
        EXIT_VERIFY
    } else if !out.audit_pass {
        EXIT_AUDIT
    } else {
        EXIT_PASS
    }
}

/// Inclusive `A..B`; `B < A` is the empty range.
fn parse_seed_range(s: &str) -> Result<(u64, u64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("--seeds wants A..B, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|_| format!("bad seed {a:?}"))?;
    let b: u64 = b.trim().parse().map_err(|_| format!("bad seed {b:?}"))?;
    Ok((a, b))
}

/// Least-squares fit of per-phase fabric rounds against
/// `c_g·(⌈log2 ℓ⌉+1) + c_a·⌈1/ε⌉`.
pub fn fit_phase_cost(points: &[(f64, f64, f64)]) -> (f64, f64) {
    let (mut x11, mut x12, mut x22, mut x1y, mut x2y) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x1, x2, y) in points {
        x11 += x1 * x1;
        x12 += x1 * x2;
        x22 += x2 * x2;
        x1y += x1 * y;
        x2y += x2 * y;
    }
    let det = x11 * x22 - x12 * x12;
    if det.abs() > 1e-9 {
        ((x22 * x1y - x12 * x2y) / det, (x11 * x2y - x12 * x1y) / det)
    } else if x11 > 0.0 {
        // all phases share the same ⌈1/ε⌉ column; fold it into c_g
        (x1y / x11, 0.0)
    } else {
        (0.0, 0.0)
    }
}

/// Per-phase fit points for one run: x1 = ⌈log2 ℓ⌉+1, x2 = ⌈1/ε⌉, y = rounds.
pub fn phase_fit_points(phases: &[PhaseRecord], epsilon: f64) -> Vec<(f64, f64, f64)> {
    let x2 = (1.0 / epsilon).ceil();
    phases
        .iter()
        .map(|ph| {
            let x1 = f64::from(ph.len.max(1)).log2().ceil() + 1.0;
            (x1, x2, f64::from(ph.mpc_rounds))
        })
        .collect()
}

fn cmd_bench(args: &BenchArgs) -> u8 {
    let (lo, hi) = match parse_seed_range(&args.seeds) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("usage error: {e}");
            return EXIT_USAGE;
        }
    };
    let algo = match (args.algo, &args.beta) {
        (Some(a), Some(_)) if a != AlgoKind::Brs => {
            eprintln!("usage error: --beta sweeps require --algo brs, not {}", a.label());
            return EXIT_USAGE;
        }
        (Some(a), _) => a,
        (None, Some(_)) => AlgoKind::Brs,
        (None, None) => AlgoKind::TwoRs,
    };
    let betas: Vec<Option<u32>> = match &args.beta {
        Some(list) => list.iter().map(|&b| Some(b)).collect(),
        None => vec![None],
    };

    println!("{}", csv_header());
    let mut worst = EXIT_PASS;
    let mut fit_points = Vec::new();
    let mut rows = 0usize;
    let mut all_hard = true;
    let mut agg = MetricsBlock {
        congest_rounds: 0,
        mpc_rounds: 0,
        max_sent_words: 0,
        max_recv_words: 0,
        peak_machine_words: 0,
        peak_total_words: 0,
        machines: 0,
    };
    let mut resolved_eps = 0.5;
    for &n in &args.n {
        for beta in &betas {
            for seed in lo..=hi {
                let spec = match resolve_spec(
                    algo,
                    *beta,
                    args.engine,
                    args.epsilon,
                    args.memory,
                    seed,
                    args.f,
                    args.force_ell,
                    args.c,
                    args.delta,
                ) {
                    Ok(s) => s,
                    Err(e) => {
                        eprintln!("usage error: {e}");
                        return EXIT_USAGE;
                    }
                };
                resolved_eps = spec.epsilon;
                let model = match build_model(args.model, n, args.p, args.d, args.k) {
                    Ok(m) => m,
                    Err(e) => {
                        eprintln!("usage error: {e}");
                        return EXIT_USAGE;
                    }
                };
                let g = match gen_graph(&model, seed) {
                    Ok(g) => g,
                    Err(e) => {
                        eprintln!("usage error: {e}");
                        return EXIT_USAGE;
                    }
                };
                rows += 1;
                match execute_run(&g, &model.describe(), &spec) {
                    Ok(out) => {
                        println!("{}", csv_row(&out.record));
                        fit_points.extend(phase_fit_points(&out.phases, spec.epsilon));
                        all_hard &= out.hard_pass;
                        let m = &out.record.metrics;
                        agg.congest_rounds = agg.congest_rounds.max(m.congest_rounds);
                        agg.mpc_rounds = agg.mpc_rounds.max(m.mpc_rounds);
                        agg.max_sent_words = agg.max_sent_words.max(m.max_sent_words);
                        agg.max_recv_words = agg.max_recv_words.max(m.max_recv_words);
                        agg.peak_machine_words = agg.peak_machine_words.max(m.peak_machine_words);
                        agg.peak_total_words = agg.peak_total_words.max(m.peak_total_words);
                        agg.machines = agg.machines.max(m.machines);
                        if !out.hard_pass {
                            worst = worst.max(EXIT_VERIFY);
                        } else if !out.audit_pass {
                            worst = worst.max(EXIT_AUDIT);
                        }
                    }
                    Err(e) => {
                        eprintln!("run failed (n={n} beta={beta:?} seed={seed}): {e}");
                        all_hard = false;
                        worst = worst.max(EXIT_VERIFY);
                    }
                }
            }
        }
    }

    if rows > 0 {
        let (c_g, c_a) = fit_phase_cost(&fit_points);
        // summary row: maxima over all rows, fitted constants in the graph
        // column, row count in set_size
        let summary = RunRecord {
            config: ConfigEcho {
                algo,
                engine: args.engine,
                graph: format!("summary c_g={c_g:.3} c_a={c_a:.3}"),
                n: 0,
                m: 0,
                max_degree: 0,
                beta: 0,
                f_schedule: String::new(),
                epsilon: resolved_eps,
                memory: args.memory.unwrap_or(MemoryKind::Unrestricted),
                seed: 0,
                force_ell: args.force_ell,
                c: args.c.unwrap_or(3.0),
                delta: args.delta.unwrap_or(1.0),
            },
            result: ResultBlock {
                set_size: rows,
                independent: all_hard,
                dominated: all_hard,
                beta: 0,
            },
            metrics: agg,
            version: SCHEMA_VERSION,
        };
        println!("{}", csv_row(&summary));
    }
    worst
}
