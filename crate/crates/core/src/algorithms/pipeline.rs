//! End-to-end set algorithms assembled from the node programs, runnable on
//! the lockstep reference engine or on the space-bounded machine fabric.
//!
//! Multi-stage constructions (β-ruling sets) run each stage on the subgraph
//! induced by the previous stage's output, with a salted tape per stage so
//! stages draw independent coins from one master seed. Final answers are
//! always reported in the input graph's node ids.

use serde::Serialize;

use crate::algorithms::luby::{round_cap, LubyProgram, LubyState};
use crate::algorithms::shatter::{default_iterations, Membership, ShatterProgram, ShatterState};
use crate::algorithms::sparsify::{SparsifyProgram, SparsifyState};
use crate::compression::{
    force_phase_len, halving_partition, plan_phases_v1, plan_phases_v2, run_compressed,
    run_uncompressed, PhasePlan, PhaseRecord, SparseProgram,
};
use crate::congest::{run_congest, EngineError, NodeProgram, Status};
use crate::graph::Graph;
use crate::mpc::{audit, build_layout, Fabric, MachineConfig, MemoryMode, RoutedMessage};
use crate::randomness::RandomTape;
use crate::{word_bits, NodeId, Round};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Planner {
    /// Uniform phase lengths from the activity growth factor.
    V1,
    /// Degree-staged phases with high-degree centers.
    V2,
}

#[derive(Clone, Debug)]
pub enum Engine {
    /// Lockstep message-passing reference.
    Congest,
    /// Machine-fabric execution with phase compression.
    Mpc {
        planner: Planner,
        cfg: MachineConfig,
        /// Re-chop every planned phase to this length.
        force_ell: Option<Round>,
        /// Disable compression: per-round tree delivery only.
        direct_only: bool,
    },
}

/// Resource totals of a run (or of several stages combined): round counts
/// sum, per-machine peaks take the maximum, audits must all pass.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RunMetrics {
    pub congest_rounds: Round,
    pub mpc_rounds: u32,
    pub max_sent_words: u64,
    pub max_recv_words: u64,
    pub peak_machine_words: u64,
    pub peak_total_words: u64,
    pub machines: u32,
    pub audit_pass: bool,
}

impl RunMetrics {
    pub fn empty() -> Self {
        RunMetrics {
            congest_rounds: 0,
            mpc_rounds: 0,
            max_sent_words: 0,
            max_recv_words: 0,
            peak_machine_words: 0,
            peak_total_words: 0,
            machines: 0,
            audit_pass: true,
        }
    }

    fn from_congest(rounds: Round) -> Self {
        RunMetrics { congest_rounds: rounds, ..RunMetrics::empty() }
    }

    fn from_fabric(
        congest_rounds: Round,
        fabric: &crate::mpc::FabricSummary,
        audit_pass: bool,
    ) -> Self {
        RunMetrics {
            congest_rounds,
            mpc_rounds: fabric.mpc_rounds,
            max_sent_words: fabric.max_sent_words,
            max_recv_words: fabric.max_recv_words,
            peak_machine_words: fabric.peak_machine_words,
            peak_total_words: fabric.peak_total_words,
            machines: fabric.machines,
            audit_pass,
        }
    }

    pub fn absorb(&mut self, other: &RunMetrics) {
        self.congest_rounds += other.congest_rounds;
        self.mpc_rounds += other.mpc_rounds;
        self.max_sent_words = self.max_sent_words.max(other.max_sent_words);
        self.max_recv_words = self.max_recv_words.max(other.max_recv_words);
        self.peak_machine_words = self.peak_machine_words.max(other.peak_machine_words);
        self.peak_total_words = self.peak_total_words.max(other.peak_total_words);
        self.machines = self.machines.max(other.machines);
        self.audit_pass &= other.audit_pass;
    }
}

/// Outcome of one program on one engine. Final states are identical across
/// engines by construction; the metrics differ.
pub struct EngineRun<S> {
    pub states: Vec<S>,
    pub statuses: Vec<Status>,
    pub rounds_executed: Round,
    pub metrics: RunMetrics,
    /// Phase records from the fabric engine; empty on the reference engine.
    pub phases: Vec<PhaseRecord>,
}

fn build_plans(
    planner: Planner,
    alpha: f64,
    g: &Graph,
    total: Round,
    cfg: &MachineConfig,
) -> Result<Vec<PhasePlan>, EngineError> {
    match planner {
        Planner::V1 => plan_phases_v1(total, alpha, g.n(), cfg.epsilon),
        Planner::V2 => {
            let delta = g.max_degree();
            let lg_delta = f64::from(delta.max(2)).log2();
            let max_stages = (lg_delta.log2().ceil() as i64).clamp(0, 7) as u32 + 1;
            let spans = halving_partition(total, max_stages);
            plan_phases_v2(&spans, alpha, delta, g.n(), cfg.epsilon)
        }
    }
}

/// Runs a program on the chosen engine. `max_rounds` caps open-ended
/// programs; fixed-length programs run to their declared horizon.
pub fn run_on_engine<P: SparseProgram>(
    g: &Graph,
    prog: &P,
    tape: &RandomTape,
    engine: &Engine,
    max_rounds: Round,
) -> Result<EngineRun<P::State>, EngineError> {
    match engine {
        Engine::Congest => {
            let run = run_congest(g, prog, tape, max_rounds)?;
            Ok(EngineRun {
                metrics: RunMetrics::from_congest(run.rounds_executed),
                states: run.states,
                statuses: run.statuses,
                rounds_executed: run.rounds_executed,
                phases: Vec::new(),
            })
        }
        Engine::Mpc { planner, cfg, force_ell, direct_only } => {
            let total = prog.total_rounds().unwrap_or(max_rounds);
            let mut plans = build_plans(*planner, prog.alpha(), g, total, cfg)?;
            if let Some(l) = force_ell {
                plans = force_phase_len(&plans, *l);
            }
            let run = if *direct_only {
                run_uncompressed(g, prog, tape, cfg, &plans)?
            } else {
                run_compressed(g, prog, tape, cfg, &plans)?
            };
            Ok(EngineRun {
                metrics: RunMetrics::from_fabric(run.rounds_executed, &run.fabric, run.audit.pass),
                states: run.states,
                statuses: run.statuses,
                rounds_executed: run.rounds_executed,
                phases: run.phases,
            })
        }
    }
}

pub struct SparsifyOutcome {
    /// The sparse dominating set U, ascending.
    pub set: Vec<NodeId>,
    pub run: EngineRun<SparsifyState>,
}

/// Degree-ordered sparsification: peels degree classes from the top,
/// sampling a dominating set U with per-node U-degree O(c f log n).
pub fn deg_ordered_sparsify(
    g: &Graph,
    f: f64,
    c: f64,
    engine: &Engine,
    tape: &RandomTape,
) -> Result<SparsifyOutcome, EngineError> {
    let prog = SparsifyProgram::new(g, f, c)?;
    let total = prog.total_rounds().expect("sparsify has a fixed horizon");
    let run = run_on_engine(g, &prog, tape, engine, total)?;
    let set = (0..g.n() as NodeId).filter(|&v| run.states[v as usize].joined).collect();
    Ok(SparsifyOutcome { set, run })
}

pub struct ShatterOutcome {
    /// The independent set I, ascending.
    pub independent: Vec<NodeId>,
    /// Residue: nodes with no closed-neighborhood contact with I,
    /// i.e. V minus N+(I). Left for the gather-and-solve cleanup.
    pub residual: Vec<NodeId>,
    pub run: EngineRun<ShatterState>,
}

/// Beep-style shattering; `iterations` defaults to `ceil(4 log2(Δ+2))`.
pub fn shatter(
    g: &Graph,
    iterations: Option<u32>,
    delta_param: f64,
    engine: &Engine,
    tape: &RandomTape,
) -> Result<ShatterOutcome, EngineError> {
    let t = iterations.unwrap_or_else(|| default_iterations(g.max_degree()));
    let prog = ShatterProgram::new(g.n(), t, delta_param)?;
    let total = prog.total_rounds().expect("shatter has a fixed horizon");
    let run = run_on_engine(g, &prog, tape, engine, total)?;
    let in_set: Vec<bool> =
        run.states.iter().map(|s| s.member == Membership::InSet).collect();
    let mut independent = Vec::new();
    let mut residual = Vec::new();
    for v in 0..g.n() as NodeId {
        if in_set[v as usize] {
            independent.push(v);
        } else if !g.neighbors(v).iter().any(|&u| in_set[u as usize]) {
            residual.push(v);
        }
    }
    Ok(ShatterOutcome { independent, residual, run })
}

pub struct FinishReport {
    /// A maximal independent set of the residue's induced subgraph, in the
    /// ids of the graph passed in.
    pub set: Vec<NodeId>,
    pub components: usize,
    pub largest_component: usize,
    pub metrics: RunMetrics,
}

/// Deterministic cleanup of a shattered residue: split `g[residual]` into
/// connected components and take each component's greedy MIS by ascending
/// id. On the fabric this charges label flooding to discover components,
/// then a gather of each component to one machine and a one-word writeback;
/// a component that cannot fit one machine is an error.
pub fn finish_off(
    g: &Graph,
    residual: &[NodeId],
    engine: &Engine,
) -> Result<FinishReport, EngineError> {
    let (sub, ids) = g.induced_subgraph(residual);
    let comps = sub.components();
    let mut chosen = vec![false; sub.n()];
    for comp in &comps {
        let mut order = comp.clone();
        order.sort_unstable_by_key(|&v| ids[v as usize]);
        for &v in &order {
            if !sub.neighbors(v).iter().any(|&u| chosen[u as usize]) {
                chosen[v as usize] = true;
            }
        }
    }
    let mut set: Vec<NodeId> =
        (0..sub.n()).filter(|&v| chosen[v]).map(|v| ids[v]).collect();
    set.sort_unstable();
    let largest_component = comps.iter().map(|c| c.len()).max().unwrap_or(0);

    let metrics = match engine {
        Engine::Congest => RunMetrics::empty(),
        Engine::Mpc { cfg, .. } => {
            if sub.n() == 0 {
                RunMetrics::empty()
            } else {
                charge_finish_fabric(g, &sub, &ids, &comps, cfg)?
            }
        }
    };
    Ok(FinishReport { set, components: comps.len(), largest_component, metrics })
}

/// Fabric accounting for the cleanup. The machines still hold the stage
/// graph, so capacity and the global budget come from `g`, not the residue.
fn charge_finish_fabric(
    g: &Graph,
    sub: &Graph,
    ids: &[NodeId],
    comps: &[Vec<NodeId>],
    cfg: &MachineConfig,
) -> Result<RunMetrics, EngineError> {
    let layout = build_layout(g, cfg)?;
    let mut fabric = Fabric::new(layout.s, layout.graph_words.clone());
    let primary = |v: NodeId| layout.nodes[ids[v as usize] as usize].primary;
    for v in 0..sub.n() as NodeId {
        // a label word next to each residual node's state
        fabric.adjust_resident(primary(v), 2);
    }

    // min-label flooding with pointer jumping: O(log of the largest
    // component) sweeps, each pushing one word across every residue edge
    let max_comp = comps.iter().map(|c| c.len()).max().unwrap_or(1);
    let sweeps = word_bits(max_comp.max(1)) + 1;
    let flood: Vec<RoutedMessage> = sub
        .edges()
        .into_iter()
        .flat_map(|(u, v)| {
            [
                RoutedMessage { src: primary(u), dst: primary(v), words: 1 },
                RoutedMessage { src: primary(v), dst: primary(u), words: 1 },
            ]
        })
        .collect();
    for _ in 0..sweeps {
        if flood.is_empty() {
            break;
        }
        fabric.route(&flood)?;
    }

    for comp in comps {
        if comp.len() == 1 {
            continue; // solved in place on its own machine
        }
        let footprint: u64 = comp.iter().map(|&v| 2 + u64::from(sub.degree(v))).sum();
        if footprint > layout.s {
            return Err(EngineError::ComponentTooLarge {
                node: ids[comp[0] as usize],
                words: footprint,
                cap: layout.s,
            });
        }
        let host = fabric.alloc_extra();
        fabric.adjust_resident(host, footprint as i64);
        let gather: Vec<RoutedMessage> = comp
            .iter()
            .map(|&v| RoutedMessage {
                src: primary(v),
                dst: host,
                words: 2 + u64::from(sub.degree(v)),
            })
            .collect();
        fabric.route(&gather)?;
        let back: Vec<RoutedMessage> = comp
            .iter()
            .map(|&v| RoutedMessage { src: host, dst: primary(v), words: 1 })
            .collect();
        fabric.route(&back)?;
        fabric.adjust_resident(host, -(footprint as i64));
        fabric.free_extra(host);
    }
    let budget = cfg.total_budget_words(g.n(), g.m() as u64);
    let report = audit(&fabric.rounds, layout.s, budget);
    Ok(RunMetrics::from_fabric(0, &fabric.metrics(), report.pass))
}

#[derive(Clone, Copy, Debug)]
pub struct RulingSetParams {
    pub beta: u32,
    /// Sparsify density constant.
    pub c: f64,
    /// Selects the peel-factor schedule.
    pub memory_mode: MemoryMode,
    /// Shatter phase-length parameter δ.
    pub shatter_delta: f64,
}

impl Default for RulingSetParams {
    fn default() -> Self {
        RulingSetParams {
            beta: 2,
            c: 3.0,
            memory_mode: MemoryMode::Unrestricted,
            shatter_delta: 1.0,
        }
    }
}

/// Peel-factor exponents for the β−1 sparsify stages: stage i uses
/// `f_i = 2^((log2 Δ_i)^(d_i))` on its own subgraph's max degree Δ_i.
fn stage_exponents(beta: u32, mode: MemoryMode) -> Vec<f64> {
    let k = beta.saturating_sub(1) as usize;
    if k == 0 {
        return Vec::new();
    }
    match mode {
        MemoryMode::Unrestricted => {
            // d_{β-1} = 1/2 + 1/(2^(β+1) - 2), then d_{i-1} = d_{β-1} + d_i/2
            let base = 0.5 + 1.0 / ((2f64).powi(beta as i32 + 1) - 2.0);
            let mut d = vec![0.0; k];
            d[k - 1] = base;
            for i in (0..k.saturating_sub(1)).rev() {
                d[i] = base + d[i + 1] / 2.0;
            }
            d
        }
        MemoryMode::InputLinear => (1..=k).map(|i| 1.0 - i as f64 / f64::from(beta)).collect(),
    }
}

fn peel_factor(delta: u32, exponent: f64) -> f64 {
    let lg = f64::from(delta.max(2)).log2();
    (2f64).powf(lg.powf(exponent)).max(4.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageSummary {
    pub kind: &'static str,
    /// Peel factor for sparsify stages.
    pub f: Option<f64>,
    /// Nodes of the subgraph the stage ran on.
    pub vertices: usize,
    pub rounds: Round,
}

pub struct RulingSetRun {
    /// The survivor chain in input-graph ids: `stage_sets[0]` is all of V,
    /// then each sparsify output, and finally the ruling set itself. Each
    /// set dominates the previous one's induced subgraph at distance 1.
    pub stage_sets: Vec<Vec<NodeId>>,
    pub beta: u32,
    pub stages: Vec<StageSummary>,
    pub metrics: RunMetrics,
    /// Fabric phase records from all stages, in execution order.
    pub phases: Vec<PhaseRecord>,
}

impl RulingSetRun {
    pub fn set(&self) -> &[NodeId] {
        self.stage_sets.last().expect("at least the input set")
    }
}

/// β-ruling set: β−1 sparsify peels, then an MIS (shatter plus cleanup) of
/// the final survivor graph. β = 1 is a plain MIS of the input.
pub fn beta_ruling_set(
    g: &Graph,
    params: RulingSetParams,
    engine: &Engine,
    tape: &RandomTape,
) -> Result<RulingSetRun, EngineError> {
    if params.beta == 0 {
        return Err(EngineError::Config("a 0-ruling set would be the whole graph".into()));
    }
    let exponents = stage_exponents(params.beta, params.memory_mode);
    let mut stage_sets: Vec<Vec<NodeId>> = vec![(0..g.n() as NodeId).collect()];
    let mut stages = Vec::new();
    let mut metrics = RunMetrics::empty();
    let mut phases = Vec::new();

    // current survivor graph and its ids in the input graph
    let mut cur = g.clone();
    let mut ids: Vec<NodeId> = (0..g.n() as NodeId).collect();
    for (i, &exp) in exponents.iter().enumerate() {
        let f = peel_factor(cur.max_degree(), exp);
        let stape = tape.derive(0x10 + i as u64 + 1);
        let out = deg_ordered_sparsify(&cur, f, params.c, engine, &stape)?;
        metrics.absorb(&out.run.metrics);
        phases.extend(out.run.phases);
        stages.push(StageSummary {
            kind: "sparsify",
            f: Some(f),
            vertices: cur.n(),
            rounds: out.run.rounds_executed,
        });
        stage_sets.push(out.set.iter().map(|&v| ids[v as usize]).collect());
        let (next, sub_ids) = cur.induced_subgraph(&out.set);
        ids = sub_ids.iter().map(|&v| ids[v as usize]).collect();
        cur = next;
    }

    let stape = tape.derive(0x20);
    let sh = shatter(&cur, None, params.shatter_delta, engine, &stape)?;
    metrics.absorb(&sh.run.metrics);
    phases.extend(sh.run.phases);
    stages.push(StageSummary {
        kind: "shatter",
        f: None,
        vertices: cur.n(),
        rounds: sh.run.rounds_executed,
    });
    let fin = finish_off(&cur, &sh.residual, engine)?;
    metrics.absorb(&fin.metrics);
    stages.push(StageSummary { kind: "finish", f: None, vertices: sh.residual.len(), rounds: 0 });

    let mut final_set: Vec<NodeId> =
        sh.independent.iter().chain(fin.set.iter()).map(|&v| ids[v as usize]).collect();
    final_set.sort_unstable();
    stage_sets.push(final_set);
    Ok(RulingSetRun { stage_sets, beta: params.beta, stages, metrics, phases })
}

/// 2-ruling set: one sparsify peel, then an MIS of the survivor graph.
pub fn two_ruling_set(
    g: &Graph,
    params: RulingSetParams,
    engine: &Engine,
    tape: &RandomTape,
) -> Result<RulingSetRun, EngineError> {
    beta_ruling_set(g, RulingSetParams { beta: 2, ..params }, engine, tape)
}

pub struct MisOutcome {
    pub set: Vec<NodeId>,
    pub run: EngineRun<LubyState>,
}

/// Luby's algorithm as an MIS baseline. Errors if any node is still
/// undecided at the round cap.
pub fn luby_mis(g: &Graph, engine: &Engine, tape: &RandomTape) -> Result<MisOutcome, EngineError> {
    let prog = LubyProgram::new(g.n());
    let run = run_on_engine(g, &prog, tape, engine, round_cap(g.n()))?;
    if run.statuses.iter().any(|s| *s != Status::Halted) {
        return Err(EngineError::Config(format!(
            "nodes still contending after {} rounds",
            run.rounds_executed
        )));
    }
    let set = (0..g.n() as NodeId).filter(|&v| run.states[v as usize].in_set).collect();
    Ok(MisOutcome { set, run })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GenModel};

    fn mpc(planner: Planner, eps: f64) -> Engine {
        Engine::Mpc {
            planner,
            cfg: MachineConfig::new(eps, MemoryMode::Unrestricted).unwrap(),
            force_ell: None,
            direct_only: false,
        }
    }

    fn is_independent(g: &Graph, set: &[NodeId]) -> bool {
        let mark: Vec<bool> = {
            let mut m = vec![false; g.n()];
            for &v in set {
                m[v as usize] = true;
            }
            m
        };
        g.edges().into_iter().all(|(u, v)| !(mark[u as usize] && mark[v as usize]))
    }

    fn within_distance(g: &Graph, set: &[NodeId], beta: u32) -> bool {
        let mut dist = vec![u32::MAX; g.n()];
        let mut queue: std::collections::VecDeque<NodeId> = Default::default();
        for &v in set {
            dist[v as usize] = 0;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            if dist[v as usize] >= beta {
                continue;
            }
            for &u in g.neighbors(v) {
                if dist[u as usize] == u32::MAX {
                    dist[u as usize] = dist[v as usize] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist.iter().all(|&d| d <= beta)
    }

    #[test]
    fn sparsify_states_agree_across_engines() {
        let g = gen_graph(&GenModel::Gnp { n: 250, p: 0.05 }, 21).unwrap();
        let tape = RandomTape::new(5, g.n());
        let reference = deg_ordered_sparsify(&g, 8.0, 3.0, &Engine::Congest, &tape).unwrap();
        for engine in [mpc(Planner::V1, 0.5), mpc(Planner::V2, 0.7)] {
            let fab = deg_ordered_sparsify(&g, 8.0, 3.0, &engine, &tape).unwrap();
            assert_eq!(fab.run.states, reference.run.states);
            assert_eq!(fab.set, reference.set);
            assert_eq!(fab.run.rounds_executed, reference.run.rounds_executed);
            assert!(fab.run.metrics.audit_pass);
            assert!(fab.run.metrics.mpc_rounds > 0);
        }
    }

    #[test]
    fn shatter_states_agree_across_engines() {
        let g = gen_graph(&GenModel::RandomRegular { n: 200, d: 8 }, 3).unwrap();
        let tape = RandomTape::new(9, g.n());
        let reference = shatter(&g, None, 1.0, &Engine::Congest, &tape).unwrap();
        let fab = shatter(&g, None, 1.0, &mpc(Planner::V1, 0.6), &tape).unwrap();
        assert_eq!(fab.run.states, reference.run.states);
        assert_eq!(fab.independent, reference.independent);
        assert_eq!(fab.residual, reference.residual);
        assert!(fab.run.metrics.audit_pass);
    }

    #[test]
    fn finish_off_solves_the_residue_greedily() {
        // two triangles and an isolated pair as the "residue"
        let g = Graph::from_edges(
            8,
            &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (6, 7)],
        )
        .unwrap();
        let residual: Vec<NodeId> = (0..8).collect();
        let fin = finish_off(&g, &residual, &Engine::Congest).unwrap();
        assert_eq!(fin.set, vec![0, 3, 6]);
        assert_eq!(fin.components, 3);
        assert_eq!(fin.largest_component, 3);
    }

    #[test]
    fn ruling_sets_dominate_at_their_beta() {
        let g = gen_graph(&GenModel::Gnp { n: 400, p: 0.03 }, 17).unwrap();
        for beta in [1u32, 2, 3] {
            for seed in 1..4u64 {
                let tape = RandomTape::new(seed, g.n());
                let params = RulingSetParams { beta, ..Default::default() };
                let run = beta_ruling_set(&g, params, &Engine::Congest, &tape).unwrap();
                assert!(is_independent(&g, run.set()), "beta {beta} seed {seed}");
                assert!(within_distance(&g, run.set(), beta), "beta {beta} seed {seed}");
                assert_eq!(run.stage_sets.len(), beta as usize + 1);
            }
        }
    }

    #[test]
    fn ruling_set_chain_shrinks_and_metrics_audit_on_the_fabric() {
        let g = gen_graph(&GenModel::Gnp { n: 300, p: 0.04 }, 29).unwrap();
        let tape = RandomTape::new(2, g.n());
        let params = RulingSetParams { beta: 3, ..Default::default() };
        let run = beta_ruling_set(&g, params, &mpc(Planner::V1, 0.5), &tape).unwrap();
        assert!(run.metrics.audit_pass);
        assert!(run.metrics.mpc_rounds > 0);
        for pair in run.stage_sets.windows(2) {
            let prev: std::collections::HashSet<_> = pair[0].iter().collect();
            assert!(pair[1].iter().all(|v| prev.contains(v)), "chain must be nested");
        }
        // congest agrees on the final answer
        let same = beta_ruling_set(&g, params, &Engine::Congest, &tape).unwrap();
        assert_eq!(same.stage_sets, run.stage_sets);
    }

    #[test]
    fn luby_runs_on_both_engines() {
        let g = gen_graph(&GenModel::Gnp { n: 150, p: 0.05 }, 31).unwrap();
        let tape = RandomTape::new(6, g.n());
        let reference = luby_mis(&g, &Engine::Congest, &tape).unwrap();
        assert!(is_independent(&g, &reference.set));
        assert!(within_distance(&g, &reference.set, 1));
        let fab = luby_mis(&g, &mpc(Planner::V1, 0.6), &tape).unwrap();
        assert_eq!(fab.set, reference.set);
        assert!(fab.run.metrics.audit_pass);
    }
}
