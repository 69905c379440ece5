//! The phase engine: runs a node program on the machine fabric, replacing
//! runs of sparse rounds by gathered-ball fast-forwarding whenever that
//! costs fewer machine rounds than per-round delivery.
//!
//! The node-state evolution is computed once, by the same stepping rules as
//! the lockstep reference engine, so final states are bit-identical to a
//! reference run by construction. What the phase machinery adds is the
//! *resource* story: every word that would move between machines is staged
//! and audited, balls are only used when they provably fit one machine, and
//! the in-ball replay re-derives the designated states independently and
//! must agree with the reference evolution.
//!
//! Messages that rest across a segment boundary live as the sender's
//! posted wire on the sender's primary machine; delivery is charged when a
//! consumer pulls them (a tree pass for per-round execution, gather
//! traffic for a ball).

use std::collections::{HashMap, HashSet};

use crate::compression::ball::{
    assemble_ball, fast_forward, sweep_marked_sources, Ball, MEMBER_HEADER_WORDS,
};
use crate::compression::plan::{CenterRule, PhasePlan};
use crate::congest::{
    fold_messages, AggSpec, Coin, EngineError, NodeProgram, Outbox, RoundInput, RoundKind, Status,
    WireValue, MESSAGE_WORDS,
};
use crate::graph::Graph;
use crate::mpc::{
    audit, build_layout, neighborhood_aggregate, AuditReport, Fabric, FabricSummary, Layout,
    MachineConfig, MachineId, RoutedMessage,
};
use crate::randomness::RandomTape;
use crate::{word_bits, NodeId, Round};

/// Fixed-point denominator for exact activity sums: estimates are dyadic
/// (or rounded once, on entry) in 2^-64 units.
const FIXED_ONE: u128 = 1u128 << 64;

fn to_fixed(p: f64) -> u128 {
    (p * FIXED_ONE as f64) as u128
}

pub fn fixed_to_f64(x: u128) -> f64 {
    x as f64 / FIXED_ONE as f64
}

/// A program the phase engine can compress: it must predict, from a node's
/// state at the start of a phase, an upper bound on the probability that
/// the node sends in each coming round.
pub trait SparseProgram: NodeProgram {
    /// Name reported when an estimate leaves [0, 1].
    fn estimator_name(&self) -> &'static str;

    /// Upper bound on the probability (over the coins) that `node` emits
    /// messages in `round`, given its state as of `phase_start`. Must
    /// dominate the true sending probability for every reachable
    /// intermediate state; the engine aborts the run if a node sends
    /// without having been marked.
    fn estimate_activation(
        &self,
        node: NodeId,
        degree: u32,
        round: Round,
        phase_start: Round,
        snapshot: &Self::State,
    ) -> f64;

    /// Promised per-round growth factor of neighborhood activity, used by
    /// the phase planners.
    fn alpha(&self) -> f64;

    /// Send-only nodes never read their inboxes, so the activity maximum
    /// skips their neighborhoods.
    fn is_send_only(&self, _state: &Self::State) -> bool {
        false
    }
}

/// Per-round activity level: the largest estimate mass any listening
/// node's neighborhood carries.
#[derive(Clone, Copy, Debug)]
pub struct ActivitySample {
    /// Max over non-halted, non-send-only nodes of the sum of neighbor
    /// estimates, in 2^-64 fixed point (exact for dyadic estimates).
    pub fixed: u128,
    /// When every positive estimate in the round is one common value `p`:
    /// `(p, contributor count at the maximizing node)`. Growth checks can
    /// then compare counts and `p` exactly instead of rounded products.
    pub uniform: Option<(f64, u64)>,
}

impl ActivitySample {
    pub fn as_f64(&self) -> f64 {
        fixed_to_f64(self.fixed)
    }
}

/// Marking decisions for one phase: which nodes may send in which rounds.
pub struct Marks {
    pub start: Round,
    pub len: Round,
    /// Bit `t` of `masks[u]`: node `u` is marked for round `start + t`.
    pub masks: Vec<u64>,
    /// Nodes with any mark bit, ascending.
    pub marked: Vec<NodeId>,
    pub activity: Vec<ActivitySample>,
}

/// Evaluates the activation estimator for every node and round of a phase,
/// marks nodes by coupling the estimate against the round coin, and records
/// per-round activity levels. The coupling mirrors the coin's event
/// sampling exactly, so a node that samples any true probability at or
/// below its estimate is marked.
pub fn compute_marks<P: SparseProgram>(
    g: &Graph,
    prog: &P,
    tape: &RandomTape,
    start: Round,
    len: Round,
    snapshot: &[P::State],
    statuses: &[Status],
) -> Result<Marks, EngineError> {
    let n = g.n();
    assert!(len <= 64, "phase masks are 64-bit");
    let mut masks = vec![0u64; n];
    let mut activity = Vec::with_capacity(len as usize);
    let mut p_hat = vec![0.0f64; n];
    for t in 0..len {
        let round = start + t;
        let mut uniform_p: Option<f64> = None;
        let mut mixed = false;
        for u in 0..n as NodeId {
            let ui = u as usize;
            if statuses[ui] == Status::Halted {
                p_hat[ui] = 0.0;
                continue;
            }
            let p = prog.estimate_activation(u, g.degree(u), round, start, &snapshot[ui]);
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(EngineError::EstimatorOutOfRange {
                    estimator: prog.estimator_name(),
                    node: u,
                    round,
                    value: p,
                });
            }
            p_hat[ui] = p;
            if p > 0.0 {
                match uniform_p {
                    None => uniform_p = Some(p),
                    Some(q) if q == p => {}
                    Some(_) => mixed = true,
                }
                // mirrors RandomTape::sample_event
                if p >= 1.0 || tape.round_real(u, round) <= p {
                    masks[ui] |= 1 << t;
                }
            }
        }
        let mut best: u128 = 0;
        let mut best_count: u64 = 0;
        for v in 0..n as NodeId {
            let vi = v as usize;
            if statuses[vi] == Status::Halted || prog.is_send_only(&snapshot[vi]) {
                continue;
            }
            let mut sum: u128 = 0;
            let mut count: u64 = 0;
            for &u in g.neighbors(v) {
                let p = p_hat[u as usize];
                if p > 0.0 {
                    sum += to_fixed(p);
                    count += 1;
                }
            }
            if sum > best {
                best = sum;
                best_count = count;
            }
        }
        let uniform = match (uniform_p, mixed) {
            (Some(p), false) => Some((p, best_count)),
            _ => None,
        };
        activity.push(ActivitySample { fixed: best, uniform });
    }
    let marked: Vec<NodeId> = (0..n as NodeId).filter(|&u| masks[u as usize] != 0).collect();
    Ok(Marks { start, len, masks, marked, activity })
}

/// Why a phase (or piece of one) ran per-round instead of compressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirectReason {
    /// Per-round delivery was at least as cheap.
    Cheaper,
    /// The marked set was too dense to even sweep within the ops budget.
    EstimateTooDense,
    /// Some ball exceeded the machine word capacity.
    BallOverCapacity,
    /// Some ball exceeded the activity-derived member bound.
    BallOverActivityBound,
    /// The engine was asked not to compress.
    ForcedPolicy,
}

#[derive(Clone, Debug)]
pub enum PhaseMode {
    Compressed {
        balls: u32,
        /// Largest acting-member count over all balls.
        max_acting: u32,
        /// The activity-derived bound those counts stayed under.
        acting_bound: f64,
        /// Largest gathered footprint (ball plus boundary wires).
        max_ball_words: u64,
    },
    Direct {
        reason: DirectReason,
    },
}

#[derive(Clone, Debug)]
pub struct PhaseRecord {
    pub start: Round,
    pub len: Round,
    pub stage: u32,
    pub radius: u32,
    pub mode: PhaseMode,
    /// Per-round activity estimates; empty when the phase ran direct
    /// without consulting the estimator.
    pub activity: Vec<ActivitySample>,
    pub mpc_rounds: u32,
}

#[derive(Clone, Debug)]
pub struct CompressedRun<S> {
    pub states: Vec<S>,
    pub statuses: Vec<Status>,
    pub rounds_executed: Round,
    /// One record per executed phase piece (exchange rounds not included).
    pub phases: Vec<PhaseRecord>,
    /// Machine rounds spent on exchange rounds and resting-send delivery.
    pub exchange_mpc_rounds: u32,
    pub fabric: FabricSummary,
    pub audit: AuditReport,
}

impl<S> CompressedRun<S> {
    pub fn compressed_phases(&self) -> usize {
        self.phases.iter().filter(|p| matches!(p.mode, PhaseMode::Compressed { .. })).count()
    }

    pub fn total_mpc_rounds(&self) -> u32 {
        self.fabric.mpc_rounds
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Policy {
    Auto,
    DirectOnly,
}

/// Runs the program on the machine fabric, compressing phases when
/// beneficial. Plans must tile `1..=R` for a fixed-length program; for an
/// open-ended program they cap how far it may run.
pub fn run_compressed<P: SparseProgram>(
    g: &Graph,
    prog: &P,
    tape: &RandomTape,
    cfg: &MachineConfig,
    plans: &[PhasePlan],
) -> Result<CompressedRun<P::State>, EngineError> {
    Exec::new(g, prog, tape, cfg, Policy::Auto)?.run(plans)
}

/// Same machinery with compression disabled: every sparse round is
/// delivered on the aggregation trees. The baseline for round counts.
pub fn run_uncompressed<P: SparseProgram>(
    g: &Graph,
    prog: &P,
    tape: &RandomTape,
    cfg: &MachineConfig,
    plans: &[PhasePlan],
) -> Result<CompressedRun<P::State>, EngineError> {
    Exec::new(g, prog, tape, cfg, Policy::DirectOnly)?.run(plans)
}

/// Canonical evolution of one sparse span, computed by the reference
/// stepping rules. Index `t` is the offset within the span.
struct SpanSim<S> {
    /// `states[t]` = state vector entering round `start + t`; the last
    /// entry is the post-span vector.
    states: Vec<Vec<S>>,
    statuses: Vec<Vec<Status>>,
    /// `inbox_at[t][v]` = messages round `start + t` consumes, sorted by
    /// sender. Entry 0 is the engine's resting input.
    inbox_at: Vec<Vec<Vec<(NodeId, u64, u8)>>>,
    /// Sends of the span's last round, keyed by receiver: the next
    /// segment's resting input.
    carry: Vec<Vec<(NodeId, u64, u8)>>,
    /// Per round: sending nodes and their payload words.
    senders: Vec<Vec<(NodeId, u8)>>,
    /// Per round: whether every send was a broadcast (trees can deliver).
    broadcast: Vec<bool>,
}

impl<S> SpanSim<S> {
    /// Messages consumed at offset `t` (== sends of round `start+t-1`);
    /// `t == len` yields the carry.
    fn inbox(&self, t: Round) -> &Vec<Vec<(NodeId, u64, u8)>> {
        if (t as usize) < self.inbox_at.len() {
            &self.inbox_at[t as usize]
        } else {
            &self.carry
        }
    }
}

/// Width of each sender's resting wire, derived from the receiver-keyed
/// message lists: `1 + words` when the sender broadcast one payload,
/// otherwise the full addressed list at `2 + words` per entry.
fn posted_wire_words(lists: &[Vec<(NodeId, u64, u8)>]) -> HashMap<NodeId, u64> {
    struct Acc {
        payload: u64,
        words: u8,
        uniform: bool,
        sum: u64,
    }
    let mut per: HashMap<NodeId, Acc> = HashMap::new();
    for list in lists {
        for &(src, payload, words) in list {
            per.entry(src)
                .and_modify(|a| {
                    if a.payload != payload || a.words != words {
                        a.uniform = false;
                    }
                    a.sum += 2 + u64::from(words);
                })
                .or_insert(Acc { payload, words, uniform: true, sum: 2 + u64::from(words) });
        }
    }
    per.into_iter()
        .map(|(src, a)| {
            let w = if a.uniform { 1 + u64::from(a.words) } else { a.sum };
            (src, w)
        })
        .collect()
}

/// A machine reference that may point at a ball host not yet allocated.
#[derive(Clone, Copy, Debug)]
enum MRef {
    Fixed(MachineId),
    Ball(u32),
}

/// Bulk word movements comprising one accounted transfer (one machine
/// round, or more if some machine's load exceeds its per-round cap).
#[derive(Default)]
struct BulkLoads {
    sends: Vec<(MRef, u64)>,
    recvs: Vec<(MRef, u64)>,
}

impl BulkLoads {
    fn is_empty(&self) -> bool {
        self.sends.is_empty() && self.recvs.is_empty()
    }

    fn apply(&self, fabric: &mut Fabric, resolve: &[MachineId]) -> u32 {
        if self.is_empty() {
            return 0;
        }
        let res = |m: MRef| match m {
            MRef::Fixed(id) => id,
            MRef::Ball(i) => resolve[i as usize],
        };
        for &(m, w) in &self.sends {
            fabric.stage_send(res(m), w);
        }
        for &(m, w) in &self.recvs {
            fabric.stage_recv(res(m), w);
        }
        fabric.commit_staged()
    }
}

struct Prepared {
    marks: Marks,
    balls: Vec<Ball>,
    /// Ball index -> nodes whose outputs this ball is responsible for.
    designated: Vec<Vec<NodeId>>,
    gather: BulkLoads,
    writeback: BulkLoads,
    /// Words resident on each ball's host while it is gathered.
    host_resident: Vec<u64>,
    cost: u32,
    acting_bound: f64,
    max_gathered: u64,
}

enum Choice {
    Direct,
    Compressed(Box<Prepared>),
    Split(Round),
}

struct Solved {
    cost: u32,
    choice: Choice,
    /// Why compression was unavailable, when it was.
    reason: Option<DirectReason>,
    /// Activity estimates, kept even when direct execution won.
    activity: Vec<ActivitySample>,
}

struct Exec<'a, P: SparseProgram> {
    g: &'a Graph,
    prog: &'a P,
    tape: &'a RandomTape,
    layout: Layout,
    fabric: Fabric,
    w: u32,
    states: Vec<P::State>,
    statuses: Vec<Status>,
    state_words: Vec<u64>,
    /// Sum of neighbor degrees per node, for sweep cost prediction.
    deg2: Vec<u64>,
    /// Sends awaiting the next segment, per receiver: (sender, payload,
    /// payload words), sorted by sender. The physical words rest at the
    /// sender primaries (`pending_post`).
    pending: Vec<Vec<(NodeId, u64, u8)>>,
    /// Resident wire words charged at each sender's primary.
    pending_post: Vec<u64>,
    /// Whether the resting sends were all broadcasts.
    pending_broadcast: bool,
    phases: Vec<PhaseRecord>,
    exchange_mpc_rounds: u32,
    policy: Policy,
    total_budget: u64,
}

impl<'a, P: SparseProgram> Exec<'a, P> {
    fn new(
        g: &'a Graph,
        prog: &'a P,
        tape: &'a RandomTape,
        cfg: &MachineConfig,
        policy: Policy,
    ) -> Result<Self, EngineError> {
        let layout = build_layout(g, cfg)?;
        let mut fabric = Fabric::new(layout.s, layout.graph_words.clone());
        let n = g.n();
        let w = word_bits(n);
        let states: Vec<P::State> = (0..n as NodeId).map(|v| prog.init(v, g.degree(v))).collect();
        let mut state_words = vec![0u64; n];
        for v in 0..n {
            let sw = words_of_bits(prog.state_bits(&states[v]), w);
            state_words[v] = sw;
            fabric.adjust_resident(layout.nodes[v].primary, sw as i64);
        }
        let total_budget = cfg.total_budget_words(n, g.m() as u64);
        let deg2: Vec<u64> = (0..n as NodeId)
            .map(|v| g.neighbors(v).iter().map(|&u| u64::from(g.degree(u))).sum())
            .collect();
        Ok(Exec {
            g,
            prog,
            tape,
            layout,
            fabric,
            w,
            states,
            statuses: vec![Status::Active; n],
            state_words,
            deg2,
            pending: vec![Vec::new(); n],
            pending_post: vec![0; n],
            pending_broadcast: true,
            phases: Vec::new(),
            exchange_mpc_rounds: 0,
            policy,
            total_budget,
        })
    }

    fn run(mut self, plans: &[PhasePlan]) -> Result<CompressedRun<P::State>, EngineError> {
        if plans.is_empty() {
            return Err(EngineError::Plan("no phase plans supplied".into()));
        }
        let mut expect = 1;
        for p in plans {
            if p.start != expect || p.len == 0 {
                return Err(EngineError::Plan(format!(
                    "plans must tile the rounds: expected start {expect}, got {} (len {})",
                    p.start, p.len
                )));
            }
            expect += p.len;
        }
        let r_end = expect - 1;
        if let Some(r) = self.prog.total_rounds() {
            if r != r_end {
                return Err(EngineError::Plan(format!(
                    "plans cover {r_end} rounds but the program runs {r}"
                )));
            }
        }

        let mut rounds_executed = 0;
        let mut r: Round = 1;
        let mut plan_idx = 0;
        while r <= r_end {
            if self.statuses.iter().all(|s| *s == Status::Halted) {
                break;
            }
            match self.prog.round_kind(r) {
                RoundKind::Exchange(specs) => {
                    self.exchange_segment(r, &specs)?;
                    rounds_executed = r;
                    r += 1;
                }
                RoundKind::Sparse => {
                    while plans[plan_idx].start + plans[plan_idx].len <= r {
                        plan_idx += 1;
                    }
                    let plan = plans[plan_idx];
                    let plan_end = plan.start + plan.len;
                    let mut e = r;
                    while e < plan_end && matches!(self.prog.round_kind(e), RoundKind::Sparse) {
                        e += 1;
                    }
                    let executed = self.phase_span(r, e - r, &plan, r_end)?;
                    rounds_executed = r + executed - 1;
                    r = e;
                }
            }
        }

        let audit_report = audit(&self.fabric.rounds, self.layout.s, self.total_budget);
        Ok(CompressedRun {
            states: self.states,
            statuses: self.statuses,
            rounds_executed,
            phases: self.phases,
            exchange_mpc_rounds: self.exchange_mpc_rounds,
            fabric: self.fabric.metrics(),
            audit: audit_report,
        })
    }

    /// Stores `carry` as the resting sends between segments, charging each
    /// sender's posted wire at its primary.
    fn set_pending(&mut self, carry: Vec<Vec<(NodeId, u64, u8)>>, broadcast: bool) {
        debug_assert!(self.pending.iter().all(|l| l.is_empty()));
        let widths = posted_wire_words(&carry);
        for (&src, &w) in &widths {
            self.fabric.adjust_resident(self.layout.nodes[src as usize].primary, w as i64);
            self.pending_post[src as usize] = w;
        }
        self.pending = carry;
        self.pending_broadcast = broadcast;
    }

    fn clear_pending(&mut self) {
        for u in 0..self.g.n() {
            if self.pending_post[u] > 0 {
                self.fabric
                    .adjust_resident(self.layout.nodes[u].primary, -(self.pending_post[u] as i64));
                self.pending_post[u] = 0;
            }
            self.pending[u].clear();
        }
        self.pending_broadcast = true;
    }

    /// Deduped (sender, payload words) list for the resting sends.
    fn pending_senders(&self) -> Vec<(NodeId, u8)> {
        let mut flat: Vec<(NodeId, u8)> = self
            .pending
            .iter()
            .flat_map(|l| l.iter().map(|&(s, _, w)| (s, w)))
            .collect();
        flat.sort_unstable();
        flat.dedup_by_key(|e| e.0);
        flat
    }

    /// Reconstructs per-sender wires from the resting sends. `None` if the
    /// payloads are not a broadcast pattern.
    fn pending_wires(&self) -> Option<Vec<Option<WireValue>>> {
        let mut wires: Vec<Option<WireValue>> = vec![None; self.g.n()];
        for list in &self.pending {
            for &(src, payload, words) in list {
                match wires[src as usize] {
                    None => wires[src as usize] = Some(WireValue { value: payload, words }),
                    Some(w) if w.value == payload && w.words == words => {}
                    Some(_) => return None,
                }
            }
        }
        Some(wires)
    }

    /// Machine rounds to deliver the given sender set through the trees,
    /// measured on a scratch fabric. Round counts depend only on staged
    /// loads, so the measurement equals what the real pass will cost.
    fn tree_cost(&self, senders: &[(NodeId, u8)], specs: &[AggSpec]) -> u32 {
        if senders.is_empty() {
            return 0;
        }
        let mut wires: Vec<Option<WireValue>> = vec![None; self.g.n()];
        for &(u, words) in senders {
            wires[u as usize] = Some(WireValue { value: 0, words });
        }
        let mut scratch = Fabric::new(self.layout.s, vec![0; self.layout.machines as usize]);
        let (_, rounds) = neighborhood_aggregate(&mut scratch, self.g, &self.layout, &wires, specs);
        rounds
    }

    /// One exchange round: deliver resting sends, step every non-halted
    /// node, collect wire values, fold on the trees, absorb.
    fn exchange_segment(&mut self, r: Round, specs: &[AggSpec]) -> Result<(), EngineError> {
        let n = self.g.n();
        let digest_specs = self.prog.inbox_digest(r);
        let have_pending = self.pending.iter().any(|p| !p.is_empty());

        if have_pending {
            let tree_wires = if self.pending_broadcast { self.pending_wires() } else { None };
            match (tree_wires, &digest_specs) {
                (Some(wires), Some(dspecs)) => {
                    let (_, rounds) = neighborhood_aggregate(
                        &mut self.fabric,
                        self.g,
                        &self.layout,
                        &wires,
                        dspecs,
                    );
                    self.exchange_mpc_rounds += rounds;
                }
                _ => {
                    let msgs = self.pending_route_msgs();
                    let rounds = self.fabric.route(&msgs)?;
                    self.exchange_mpc_rounds += rounds;
                }
            }
        }

        let mut folded: Vec<Vec<i128>> = Vec::new();
        if let Some(dspecs) = &digest_specs {
            folded = self
                .pending
                .iter()
                .map(|msgs| {
                    let raw: Vec<(NodeId, u64)> = msgs.iter().map(|&(s, p, _)| (s, p)).collect();
                    fold_messages(dspecs, &raw)
                })
                .collect();
        }
        for u in 0..n as NodeId {
            let ui = u as usize;
            if self.statuses[ui] == Status::Halted {
                continue;
            }
            let raw: Vec<(NodeId, u64)>;
            let input = match &digest_specs {
                Some(_) => RoundInput::Digest(&folded[ui]),
                None => {
                    raw = self.pending[ui].iter().map(|&(s, p, _)| (s, p)).collect();
                    RoundInput::Raw(&raw)
                }
            };
            let coin = Coin::new(self.tape, u, r);
            let out = self.prog.step(u, r, &self.states[ui], &input, &coin);
            if !matches!(out.outbox, Outbox::Silent) {
                return Err(EngineError::SendInExchangeRound { node: u, round: r });
            }
            self.states[ui] = out.state;
            self.statuses[ui] = out.status;
        }
        self.clear_pending();

        let wires: Vec<Option<WireValue>> = (0..n as NodeId)
            .map(|v| {
                if self.statuses[v as usize] == Status::Halted {
                    None
                } else {
                    self.prog.exchange_value(v, r, &self.states[v as usize])
                }
            })
            .collect();
        let (folds, rounds) =
            neighborhood_aggregate(&mut self.fabric, self.g, &self.layout, &wires, specs);
        self.exchange_mpc_rounds += rounds;
        for u in 0..n as NodeId {
            let ui = u as usize;
            if self.statuses[ui] == Status::Halted {
                continue;
            }
            self.states[ui] =
                self.prog.absorb_aggregates(u, r, self.states[ui].clone(), &folds[ui]);
        }
        self.refresh_state_words();
        Ok(())
    }

    fn pending_route_msgs(&self) -> Vec<RoutedMessage> {
        let mut msgs = Vec::new();
        for (v, list) in self.pending.iter().enumerate() {
            for &(src, _, words) in list {
                msgs.push(RoutedMessage {
                    src: self.layout.nodes[src as usize].primary,
                    dst: self.layout.nodes[v].primary,
                    words: 1 + u64::from(words),
                });
            }
        }
        msgs
    }

    fn refresh_state_words(&mut self) {
        for v in 0..self.g.n() {
            let sw = words_of_bits(self.prog.state_bits(&self.states[v]), self.w);
            if sw != self.state_words[v] {
                let delta = sw as i64 - self.state_words[v] as i64;
                self.fabric.adjust_resident(self.layout.nodes[v].primary, delta);
                self.state_words[v] = sw;
            }
        }
    }

    /// Canonical evolution of the sparse span `[start, start+len)` from
    /// the current engine state, by the reference stepping rules.
    fn simulate_span(&self, start: Round, len: Round) -> Result<SpanSim<P::State>, EngineError> {
        let n = self.g.n();
        let mut states = Vec::with_capacity(len as usize + 1);
        let mut statuses = Vec::with_capacity(len as usize + 1);
        let mut inbox_at = Vec::with_capacity(len as usize);
        let mut senders_by_round = Vec::with_capacity(len as usize);
        let mut broadcast_by_round = Vec::with_capacity(len as usize);
        states.push(self.states.clone());
        statuses.push(self.statuses.clone());
        let mut cur_states = self.states.clone();
        let mut cur_statuses = self.statuses.clone();
        let mut inbox: Vec<Vec<(NodeId, u64, u8)>> = self.pending.clone();
        for t in 0..len {
            let round = start + t;
            debug_assert!(matches!(self.prog.round_kind(round), RoundKind::Sparse));
            let digest_specs = self.prog.inbox_digest(round);
            let mut next: Vec<Vec<(NodeId, u64, u8)>> = vec![Vec::new(); n];
            let mut senders: Vec<(NodeId, u8)> = Vec::new();
            let mut all_broadcast = true;
            for u in 0..n as NodeId {
                let ui = u as usize;
                if cur_statuses[ui] == Status::Halted {
                    continue;
                }
                let raw: Vec<(NodeId, u64)> = inbox[ui].iter().map(|&(s, p, _)| (s, p)).collect();
                let folded;
                let input = match &digest_specs {
                    Some(specs) => {
                        folded = fold_messages(specs, &raw);
                        RoundInput::Digest(&folded)
                    }
                    None => RoundInput::Raw(&raw),
                };
                let coin = Coin::new(self.tape, u, round);
                let out = self.prog.step(u, round, &cur_states[ui], &input, &coin);
                cur_states[ui] = out.state;
                cur_statuses[ui] = out.status;
                match out.outbox {
                    Outbox::Silent => {}
                    Outbox::Broadcast { payload, words } => {
                        check_words(u, round, words)?;
                        senders.push((u, words));
                        for &v in self.g.neighbors(u) {
                            next[v as usize].push((u, payload, words));
                        }
                    }
                    Outbox::Unicast(list) => {
                        let mut max_w = 0;
                        for &(v, payload, words) in &list {
                            check_words(u, round, words)?;
                            if !self.g.has_edge(u, v) {
                                return Err(EngineError::NonNeighborSend {
                                    node: u,
                                    target: v,
                                    round,
                                });
                            }
                            next[v as usize].push((u, payload, words));
                            max_w = max_w.max(words);
                        }
                        if !list.is_empty() {
                            senders.push((u, max_w));
                            all_broadcast = false;
                        }
                    }
                }
            }
            for nb in &mut next {
                nb.sort_unstable_by_key(|&(from, _, _)| from);
            }
            inbox_at.push(std::mem::replace(&mut inbox, next));
            senders_by_round.push(senders);
            broadcast_by_round.push(all_broadcast);
            states.push(cur_states.clone());
            statuses.push(cur_statuses.clone());
        }
        Ok(SpanSim {
            states,
            statuses,
            inbox_at,
            carry: inbox,
            senders: senders_by_round,
            broadcast: broadcast_by_round,
        })
    }

    /// Plans and executes one sparse span: solves for the cheapest mix of
    /// compressed and per-round execution, performs it against the fabric,
    /// and commits the canonical states. Returns how many rounds actually
    /// ran (the span is cut short when every node halts inside it).
    fn phase_span(
        &mut self,
        start: Round,
        len: Round,
        plan: &PhasePlan,
        r_end: Round,
    ) -> Result<Round, EngineError> {
        let mut sim = self.simulate_span(start, len)?;
        // Cut the span at the first point where everyone has halted; the
        // remaining rounds would execute nothing.
        let mut eff = len;
        for k in 1..=len {
            if sim.statuses[k as usize].iter().all(|s| *s == Status::Halted) {
                eff = k;
                break;
            }
        }
        let truncated = eff < len;
        if truncated {
            let cut = std::mem::take(&mut sim.inbox_at[eff as usize]);
            sim.states.truncate(eff as usize + 1);
            sim.statuses.truncate(eff as usize + 1);
            sim.inbox_at.truncate(eff as usize);
            sim.senders.truncate(eff as usize);
            sim.broadcast.truncate(eff as usize);
            sim.carry = cut;
        }
        let len = eff;

        // Per-offset tree delivery cost; None when trees cannot deliver
        // (raw inboxes or addressed sends).
        let mut deliver: Vec<Option<u32>> = Vec::with_capacity(len as usize);
        for t in 0..len {
            let round = start + t;
            let (senders, bcast) = if t == 0 {
                (self.pending_senders(), self.pending_broadcast)
            } else {
                (sim.senders[t as usize - 1].clone(), sim.broadcast[t as usize - 1])
            };
            if senders.is_empty() {
                deliver.push(Some(0));
            } else if !bcast {
                deliver.push(None);
            } else {
                match self.prog.inbox_digest(round) {
                    Some(specs) => deliver.push(Some(self.tree_cost(&senders, &specs))),
                    None => deliver.push(None),
                }
            }
        }

        let mut memo: HashMap<(Round, Round), Solved> = HashMap::new();
        self.solve(start, 0, len, plan, &sim, &deliver, &mut memo)?;
        self.execute(start, 0, len, plan, &sim, &deliver, &mut memo)?;

        self.states = sim.states[len as usize].clone();
        self.statuses = sim.statuses[len as usize].clone();
        self.refresh_state_words();
        self.clear_pending();
        if !truncated && start + len <= r_end {
            let bcast = sim.broadcast.last().copied().unwrap_or(true);
            self.set_pending(std::mem::take(&mut sim.carry), bcast);
        }
        Ok(len)
    }

    /// Cheapest cost of executing `[start+t, start+t+l)`; memoized.
    #[allow(clippy::too_many_arguments)]
    fn solve(
        &self,
        start: Round,
        t: Round,
        l: Round,
        plan: &PhasePlan,
        sim: &SpanSim<P::State>,
        deliver: &[Option<u32>],
        memo: &mut HashMap<(Round, Round), Solved>,
    ) -> Result<u32, EngineError> {
        if let Some(s) = memo.get(&(t, l)) {
            return Ok(s.cost);
        }
        let direct_cost: Option<u32> = deliver[t as usize..(t + l) as usize]
            .iter()
            .try_fold(0u32, |acc, d| d.map(|x| acc + x));
        let (compressed, reason, rejected_activity) = if self.policy == Policy::DirectOnly {
            (None, Some(DirectReason::ForcedPolicy), Vec::new())
        } else {
            match self.prepare_compressed(start, t, l, plan, sim)? {
                Ok(prep) => (Some(prep), None, Vec::new()),
                Err((reason, activity)) => (None, Some(reason), activity),
            }
        };
        let activity = compressed
            .as_ref()
            .map(|p| p.marks.activity.clone())
            .unwrap_or(rejected_activity);
        let split = if l >= 2 {
            let mid = l / 2;
            let a = self.solve(start, t, mid, plan, sim, deliver, memo)?;
            let b = self.solve(start, t + mid, l - mid, plan, sim, deliver, memo)?;
            Some((a.saturating_add(b), mid))
        } else {
            None
        };

        // preference on ties: compressed, then split, then direct
        let mut best: Option<(u32, Choice)> = direct_cost.map(|d| (d, Choice::Direct));
        if let Some((c, mid)) = split {
            if best.as_ref().map_or(true, |b| c <= b.0) {
                best = Some((c, Choice::Split(mid)));
            }
        }
        if let Some(prep) = compressed {
            if best.as_ref().map_or(true, |b| prep.cost <= b.0) {
                best = Some((prep.cost, Choice::Compressed(Box::new(prep))));
            }
        }
        let (cost, choice) = best.ok_or_else(|| {
            EngineError::Config(format!(
                "no space-bounded execution for rounds {}..{}: raw inboxes and oversized balls",
                start + t,
                start + t + l
            ))
        })?;
        memo.insert((t, l), Solved { cost, choice, reason, activity });
        Ok(cost)
    }

    /// Tries to set up ball fast-forwarding for `[start+t, start+t+l)`.
    /// `Ok(Err(..))` means compression is unavailable but the span can
    /// still run per-round; the activity estimates computed on the way are
    /// returned with the reason so the phase record keeps them. Hard errors
    /// abort the run.
    fn prepare_compressed(
        &self,
        start: Round,
        t: Round,
        l: Round,
        plan: &PhasePlan,
        sim: &SpanSim<P::State>,
    ) -> Result<Result<Prepared, (DirectReason, Vec<ActivitySample>)>, EngineError> {
        let n = self.g.n();
        let s_cap = self.layout.s;
        let first = start + t;
        let snapshot = &sim.states[t as usize];
        let statuses = &sim.statuses[t as usize];
        let marks = compute_marks(self.g, self.prog, self.tape, first, l, snapshot, statuses)?;

        let extra = match plan.center_rule {
            CenterRule::AllActive => 0,
            CenterRule::DegreeAbove(_) => 1,
        };
        let radius = l + extra;
        let lg = f64::from(word_bits(n));
        let mass: f64 = marks.activity.iter().map(|a| a.as_f64() * lg).sum();
        let acting_bound = mass.powi(radius as i32);

        let mut is_center = vec![false; n];
        let mut centers: Vec<NodeId> = Vec::new();
        for v in 0..n as NodeId {
            let vi = v as usize;
            if statuses[vi] == Status::Halted {
                continue;
            }
            let c = match plan.center_rule {
                CenterRule::AllActive => true,
                CenterRule::DegreeAbove(thr) => {
                    f64::from(self.g.degree(v)) > thr || marks.masks[vi] != 0
                }
            };
            if c {
                is_center[vi] = true;
                centers.push(v);
            }
        }
        // adoption: non-center nodes with a marked neighbor ride in their
        // lowest-id center neighbor's ball; the rest provably receive
        // nothing and advance on their own primary
        let mut adopted: Vec<(NodeId, NodeId)> = Vec::new();
        if matches!(plan.center_rule, CenterRule::DegreeAbove(_)) {
            for v in 0..n as NodeId {
                let vi = v as usize;
                if statuses[vi] == Status::Halted || is_center[vi] {
                    continue;
                }
                if self.g.neighbors(v).iter().any(|&u| marks.masks[u as usize] != 0) {
                    let owner = self
                        .g
                        .neighbors(v)
                        .iter()
                        .copied()
                        .find(|&u| is_center[u as usize])
                        .expect("a marked neighbor is always a center");
                    adopted.push((v, owner));
                }
            }
        }

        // entry width: the header is priced in assembly, so this is state
        let mut entry_words = vec![0u64; n];
        for v in 0..n {
            entry_words[v] = words_of_bits(self.prog.state_bits(&snapshot[v]), self.w);
        }

        // cheap necessary condition before the sweep: a ball holds its
        // center plus the center's marked neighbors
        let mut marked_nbrs = vec![0u32; n];
        for &u in &marks.marked {
            for &v in self.g.neighbors(u) {
                marked_nbrs[v as usize] += 1;
            }
        }
        for &c in &centers {
            let lower = (1 + u64::from(marked_nbrs[c as usize])) * (MEMBER_HEADER_WORDS + 1);
            if lower > s_cap {
                return Ok(Err((DirectReason::BallOverCapacity, marks.activity)));
            }
        }

        let mut center_index: Vec<Option<u32>> = vec![None; n];
        for (i, &c) in centers.iter().enumerate() {
            center_index[c as usize] = Some(i as u32);
        }
        let ops_budget = 16 * (n as u64 + 2 * self.g.m() as u64);
        // Predict the sweep cost before paying for it: the search from a
        // marked node u pops u itself (deg(u) traversals) and, past radius
        // 1, up to its whole 1-hop frontier (deg2(u)), growing by at most Δ
        // per extra hop. Skipping a hopeless sweep only changes how fast we
        // fall back to per-round delivery, never the simulated states.
        let dmax = u64::from(self.g.max_degree());
        let mut predicted: u64 = 0;
        for &u in &marks.marked {
            let mut cost = u64::from(self.g.degree(u));
            if radius >= 2 {
                let mut frontier = self.deg2[u as usize];
                for _ in 2..radius {
                    frontier = frontier.saturating_mul(dmax);
                }
                cost = cost.saturating_add(frontier);
            }
            predicted = predicted.saturating_add(cost);
            if predicted > ops_budget {
                return Ok(Err((DirectReason::EstimateTooDense, marks.activity)));
            }
        }
        let Some(drafts) = sweep_marked_sources(
            self.g,
            &center_index,
            &centers,
            &marks.marked,
            radius,
            ops_budget,
        ) else {
            return Ok(Err((DirectReason::EstimateTooDense, marks.activity)));
        };

        let mut entries_by_center: Vec<Vec<(NodeId, u32, bool)>> = drafts
            .lists
            .into_iter()
            .map(|list| list.into_iter().map(|(u, d)| (u, d, true)).collect())
            .collect();
        let mut designated: Vec<Vec<NodeId>> = centers.iter().map(|&c| vec![c]).collect();
        for (i, &c) in centers.iter().enumerate() {
            entries_by_center[i].push((c, 0, marks.masks[c as usize] != 0));
        }
        for &(v, owner) in &adopted {
            let oi = center_index[owner as usize].unwrap() as usize;
            entries_by_center[oi].push((v, 1, false));
            designated[oi].push(v);
        }

        let boundary_in = posted_wire_words(sim.inbox(t));
        let mut balls = Vec::with_capacity(centers.len());
        let mut input_senders: Vec<Vec<NodeId>> = Vec::with_capacity(centers.len());
        let mut host_resident = Vec::with_capacity(centers.len());
        let mut max_gathered = 0u64;
        for (i, &c) in centers.iter().enumerate() {
            let ball = assemble_ball(
                self.g,
                c,
                radius,
                std::mem::take(&mut entries_by_center[i]),
                &entry_words,
            );
            let mut senders: HashSet<NodeId> = HashSet::new();
            for m in &ball.members {
                for &(src, _, _) in &sim.inbox(t)[m.node as usize] {
                    senders.insert(src);
                }
            }
            let mut senders: Vec<NodeId> = senders.into_iter().collect();
            senders.sort_unstable();
            let input_words: u64 = senders.iter().map(|s| boundary_in[s]).sum();
            let gathered = ball.words + input_words;
            if gathered > s_cap {
                return Ok(Err((DirectReason::BallOverCapacity, marks.activity)));
            }
            if f64::from(ball.acting_count) > acting_bound {
                return Ok(Err((DirectReason::BallOverActivityBound, marks.activity)));
            }
            max_gathered = max_gathered.max(gathered);
            host_resident.push(if ball.members.len() > 1 { gathered } else { input_words });
            input_senders.push(senders);
            balls.push(ball);
        }

        let (gather, writeback) =
            self.build_phase_traffic(&balls, &designated, &input_senders, &boundary_in, t, l, sim);
        let mut scratch =
            Fabric::new(s_cap, vec![0; self.layout.machines as usize + balls.len()]);
        let hypothetical: Vec<MachineId> =
            (0..balls.len() as u32).map(|i| self.layout.machines + i).collect();
        let cost = gather.apply(&mut scratch, &hypothetical)
            + writeback.apply(&mut scratch, &hypothetical);
        Ok(Ok(Prepared {
            marks,
            balls,
            designated,
            gather,
            writeback,
            host_resident,
            cost,
            acting_bound,
            max_gathered,
        }))
    }

    /// Word loads for gathering balls and writing results home. Singleton
    /// balls live on their center's primary: their member entry never
    /// moves and their outputs are already home.
    #[allow(clippy::too_many_arguments)]
    fn build_phase_traffic(
        &self,
        balls: &[Ball],
        designated: &[Vec<NodeId>],
        input_senders: &[Vec<NodeId>],
        boundary_in: &HashMap<NodeId, u64>,
        t: Round,
        l: Round,
        sim: &SpanSim<P::State>,
    ) -> (BulkLoads, BulkLoads) {
        let mut gather = BulkLoads::default();
        let mut writeback = BulkLoads::default();
        let snapshot = &sim.states[t as usize];
        let final_states = &sim.states[(t + l) as usize];
        let boundary_out = posted_wire_words(sim.inbox(t + l));
        for (b, ball) in balls.iter().enumerate() {
            let singleton = ball.members.len() == 1;
            let center_primary = self.layout.nodes[ball.center as usize].primary;
            let host = if singleton { MRef::Fixed(center_primary) } else { MRef::Ball(b as u32) };
            if !singleton {
                gather.recvs.push((host, ball.words));
                for m in &ball.members {
                    let mi = m.node as usize;
                    let words = MEMBER_HEADER_WORDS
                        + words_of_bits(self.prog.state_bits(&snapshot[mi]), self.w);
                    gather.sends.push((MRef::Fixed(self.layout.nodes[mi].primary), words));
                    for (j, &w) in self.g.neighbors(m.node).iter().enumerate() {
                        if ball.member_index(w).is_some() {
                            gather
                                .sends
                                .push((MRef::Fixed(self.layout.slot_machine(m.node, j as u32)), 1));
                        }
                    }
                }
            }
            for &u in &input_senders[b] {
                let src = self.layout.nodes[u as usize].primary;
                if singleton && src == center_primary {
                    continue;
                }
                let w = boundary_in[&u];
                gather.sends.push((MRef::Fixed(src), w));
                gather.recvs.push((host, w));
            }
            for &d in &designated[b] {
                if !singleton {
                    let dp = self.layout.nodes[d as usize].primary;
                    let words =
                        words_of_bits(self.prog.state_bits(&final_states[d as usize]), self.w);
                    writeback.sends.push((host, words));
                    writeback.recvs.push((MRef::Fixed(dp), words));
                    if let Some(&w) = boundary_out.get(&d) {
                        writeback.sends.push((host, w));
                        writeback.recvs.push((MRef::Fixed(dp), w));
                    }
                }
            }
        }
        (gather, writeback)
    }

    /// Executes the memoized decision for `[start+t, start+t+l)`.
    #[allow(clippy::too_many_arguments)]
    fn execute(
        &mut self,
        start: Round,
        t: Round,
        l: Round,
        plan: &PhasePlan,
        sim: &SpanSim<P::State>,
        deliver: &[Option<u32>],
        memo: &mut HashMap<(Round, Round), Solved>,
    ) -> Result<(), EngineError> {
        let solved = memo.remove(&(t, l)).expect("solve ran before execute");
        let extra = match plan.center_rule {
            CenterRule::AllActive => 0,
            CenterRule::DegreeAbove(_) => 1,
        };
        match solved.choice {
            Choice::Split(mid) => {
                self.execute(start, t, mid, plan, sim, deliver, memo)?;
                self.execute(start, t + mid, l - mid, plan, sim, deliver, memo)
            }
            Choice::Direct => {
                let before = self.fabric.rounds.len();
                for off in t..t + l {
                    let round = start + off;
                    let senders: Vec<(NodeId, u8)> = if off == 0 {
                        self.pending_senders()
                    } else {
                        sim.senders[off as usize - 1].clone()
                    };
                    if senders.is_empty() {
                        continue;
                    }
                    let specs = self
                        .prog
                        .inbox_digest(round)
                        .expect("solve only allows direct rounds with digests");
                    let mut wires: Vec<Option<WireValue>> = vec![None; self.g.n()];
                    for &(u, words) in &senders {
                        // loads only; the folds were computed in the span
                        // simulation from identical message sets
                        wires[u as usize] = Some(WireValue { value: 0, words });
                    }
                    let (_, rounds) = neighborhood_aggregate(
                        &mut self.fabric,
                        self.g,
                        &self.layout,
                        &wires,
                        &specs,
                    );
                    debug_assert_eq!(Some(rounds), deliver[off as usize]);
                }
                let mpc_rounds = (self.fabric.rounds.len() - before) as u32;
                self.phases.push(PhaseRecord {
                    start: start + t,
                    len: l,
                    stage: plan.stage,
                    radius: l + extra,
                    mode: PhaseMode::Direct {
                        reason: solved.reason.unwrap_or(DirectReason::Cheaper),
                    },
                    activity: solved.activity,
                    mpc_rounds,
                });
                Ok(())
            }
            Choice::Compressed(prep) => {
                self.execute_compressed(start, t, l, plan.stage, l + extra, sim, *prep)
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn execute_compressed(
        &mut self,
        start: Round,
        t: Round,
        l: Round,
        stage: u32,
        radius: u32,
        sim: &SpanSim<P::State>,
        prep: Prepared,
    ) -> Result<(), EngineError> {
        let Prepared {
            marks,
            balls,
            designated,
            gather,
            writeback,
            host_resident,
            cost,
            acting_bound,
            max_gathered,
        } = prep;
        let first = start + t;
        let before = self.fabric.rounds.len();

        // soundness: every actual sender in the span must carry its mark
        for off in 0..l {
            for &(u, _) in &sim.senders[(t + off) as usize] {
                if marks.masks[u as usize] & (1 << off) == 0 {
                    return Err(EngineError::UnsoundSend { node: u, round: first + off });
                }
            }
        }

        // allocate hosts and gather
        let mut hosts: Vec<MachineId> = Vec::with_capacity(balls.len());
        for (b, ball) in balls.iter().enumerate() {
            let host = if ball.members.len() == 1 {
                self.layout.nodes[ball.center as usize].primary
            } else {
                self.fabric.alloc_extra()
            };
            if host_resident[b] > 0 {
                self.fabric.adjust_resident(host, host_resident[b] as i64);
            }
            hosts.push(host);
        }
        let mut used = gather.apply(&mut self.fabric, &hosts);

        // fast-forward every ball and verify the designated outputs
        let final_states = &sim.states[(t + l) as usize];
        let final_statuses = &sim.statuses[(t + l) as usize];
        let mut sent_got: Vec<Vec<(NodeId, u64, u8)>> = vec![Vec::new(); self.g.n()];
        for (b, ball) in balls.iter().enumerate() {
            let member_states: Vec<P::State> = ball
                .members
                .iter()
                .map(|m| sim.states[t as usize][m.node as usize].clone())
                .collect();
            let member_statuses: Vec<Status> = ball
                .members
                .iter()
                .map(|m| sim.statuses[t as usize][m.node as usize])
                .collect();
            let member_pending: Vec<Vec<(NodeId, u64)>> = ball
                .members
                .iter()
                .map(|m| sim.inbox(t)[m.node as usize].iter().map(|&(s, p, _)| (s, p)).collect())
                .collect();
            let member_marks: Vec<u64> =
                ball.members.iter().map(|m| marks.masks[m.node as usize]).collect();
            let ff = fast_forward(
                ball,
                self.prog,
                self.tape,
                first,
                l,
                member_states,
                member_statuses,
                member_pending,
                &member_marks,
            )?;
            for &d in &designated[b] {
                let idx = ball.member_index(d).expect("designated nodes are members");
                let (state, status) = ff.outputs[idx]
                    .as_ref()
                    .expect("designated members advance the whole phase");
                assert_eq!(
                    *state, final_states[d as usize],
                    "ball replay diverged from the reference evolution at node {d}"
                );
                assert_eq!(*status, final_statuses[d as usize]);
                match ff.final_sends[idx].as_ref().expect("full horizon implies a final outbox") {
                    Outbox::Silent => {}
                    Outbox::Broadcast { payload, words } => {
                        for &v in self.g.neighbors(d) {
                            sent_got[v as usize].push((d, *payload, *words));
                        }
                    }
                    Outbox::Unicast(list) => {
                        for &(v, payload, words) in list {
                            sent_got[v as usize].push((d, payload, words));
                        }
                    }
                }
            }
        }
        // the designated final sends must reproduce the canonical ones
        for (v, got) in sent_got.iter_mut().enumerate() {
            got.sort_unstable_by_key(|&(s, _, _)| s);
            assert_eq!(
                got, &sim.inbox(t + l)[v],
                "final sends diverged from the reference evolution at node {v}"
            );
        }

        used += writeback.apply(&mut self.fabric, &hosts);
        for (b, ball) in balls.iter().enumerate() {
            if host_resident[b] > 0 {
                self.fabric.adjust_resident(hosts[b], -(host_resident[b] as i64));
            }
            if ball.members.len() > 1 {
                self.fabric.free_extra(hosts[b]);
            }
        }
        debug_assert_eq!(used, cost, "staged cost drifted between solve and execute");

        let max_acting = balls.iter().map(|b| b.acting_count).max().unwrap_or(0);
        self.phases.push(PhaseRecord {
            start: first,
            len: l,
            stage,
            radius,
            mode: PhaseMode::Compressed {
                balls: balls.len() as u32,
                max_acting,
                acting_bound,
                max_ball_words: max_gathered,
            },
            activity: marks.activity,
            mpc_rounds: (self.fabric.rounds.len() - before) as u32,
        });
        Ok(())
    }
}

fn check_words(node: NodeId, round: Round, words: u8) -> Result<(), EngineError> {
    if words > MESSAGE_WORDS {
        Err(EngineError::PayloadTooLarge { node, round, words, budget: MESSAGE_WORDS })
    } else {
        Ok(())
    }
}

fn words_of_bits(bits: u64, w: u32) -> u64 {
    (bits.div_ceil(u64::from(w))).max(1)
}
