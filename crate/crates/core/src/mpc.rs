//! Space-bounded machine model: graph layout, word-exact traffic and
//! residency accounting, a deterministic message router, and tree-shaped
//! neighborhood aggregation.
//!
//! Every machine holds at most `S = ceil(n^epsilon)` words. A node's
//! adjacency list is charged one word per edge slot; nodes whose list fits
//! share machines, larger lists are chunked across dedicated slice machines
//! arranged as a shallow tree so a separable fold reaches the node's primary
//! machine in `O(1/epsilon)` rounds. The fabric records, per machine round,
//! the maximum words any machine sent or received and the resident words, so
//! a run can be audited after the fact with no tolerance.

use serde::Serialize;
use std::collections::BTreeSet;

use crate::congest::{fold_neighbor_wires, AggSpec, EngineError, WireValue};
use crate::graph::Graph;
use crate::{word_bits, NodeId};

pub type MachineId = u32;

/// Words reserved next to each hosted node for its program state plus the
/// folded pending inbox that rests there between segments (audited).
pub const STATE_RESERVE_WORDS: u64 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MemoryMode {
    /// Global memory up to `C * (m + n^(1+eps)) * log2(n)^2` words.
    Unrestricted,
    /// Global memory up to `C * max(m, n) * log2(n)^2` words.
    InputLinear,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MachineConfig {
    pub epsilon: f64,
    pub memory_mode: MemoryMode,
    /// `C` in the global memory budget.
    pub mem_constant: u64,
    /// `C` in the `C * n^(1-eps)` machine-count guideline.
    pub machine_constant: u64,
}

impl MachineConfig {
    pub fn new(epsilon: f64, memory_mode: MemoryMode) -> Result<Self, EngineError> {
        if !(epsilon > 0.0 && epsilon <= 1.0) || !epsilon.is_finite() {
            return Err(EngineError::Config(format!(
                "epsilon must be in (0, 1], got {epsilon}"
            )));
        }
        Ok(MachineConfig { epsilon, memory_mode, mem_constant: 4, machine_constant: 4 })
    }

    /// Machine capacity in words.
    pub fn s_words(&self, n: usize) -> Result<u64, EngineError> {
        let s = (n as f64).powf(self.epsilon).ceil() as u64;
        if s < 2 {
            return Err(EngineError::Config(format!(
                "machine capacity S = ceil(n^eps) = {s} is below the minimum of 2"
            )));
        }
        Ok(s)
    }

    /// Levels allowed in an aggregation tree: `ceil(1/epsilon)`.
    pub fn tree_depth_limit(&self) -> u32 {
        (1.0 / self.epsilon).ceil() as u32
    }

    /// Total words all machines may hold at once.
    pub fn total_budget_words(&self, n: usize, m: u64) -> u64 {
        let lg = u64::from(word_bits(n));
        let lg2 = (lg * lg).max(1);
        match self.memory_mode {
            MemoryMode::Unrestricted => {
                let n_pow = (n as f64).powf(1.0 + self.epsilon).ceil() as u64;
                self.mem_constant * (m + n_pow) * lg2
            }
            MemoryMode::InputLinear => self.mem_constant * m.max(n as u64) * lg2,
        }
    }

    /// Guideline machine count; exceeding it is recorded, not fatal.
    pub fn machine_budget(&self, n: usize) -> u64 {
        let pow = (n as f64).powf(1.0 - self.epsilon).ceil() as u64;
        self.machine_constant * pow.max(1)
    }
}

/// One chunk of a node's adjacency list.
#[derive(Clone, Debug)]
pub struct Slice {
    pub machine: MachineId,
    pub len: u32,
}

#[derive(Clone, Debug)]
pub struct NodeLayout {
    /// Machine holding the node's control state; root of its fold tree.
    pub primary: MachineId,
    /// Adjacency chunks in neighbor order. Empty for isolated nodes.
    /// `slices[0]` may sit on the primary itself; all middle chunks have
    /// length exactly S so slot lookup is O(1).
    pub slices: Vec<Slice>,
    /// Tree level of each slice; 0 means "on the primary, no hop".
    pub levels: Vec<u8>,
    pub fan: u32,
    pub depth: u32,
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub s: u64,
    pub n: usize,
    /// Base machines (bins + dedicated slice machines).
    pub machines: u32,
    pub nodes: Vec<NodeLayout>,
    /// Adjacency words resident per base machine.
    pub graph_words: Vec<u64>,
    pub depth_max: u32,
    pub over_machine_budget: bool,
    pub warnings: Vec<String>,
}

impl Layout {
    /// Machine holding slot `j` of node `u`'s adjacency list.
    pub fn slot_machine(&self, u: NodeId, j: u32) -> MachineId {
        let nl = &self.nodes[u as usize];
        let len0 = nl.slices[0].len;
        if j < len0 {
            nl.slices[0].machine
        } else {
            let idx = 1 + ((u64::from(j - len0)) / self.s) as usize;
            nl.slices[idx].machine
        }
    }
}

/// Smallest fan whose D-level heap covers `k` slices, computed in integers.
fn fan_for(k: usize, depth_limit: u32, s: u64) -> u32 {
    let max_fan = ((s / 2) as u32).max(2);
    let mut fan = 2u32;
    while fan < max_fan {
        // does a heap of this arity reach k nodes within depth_limit levels?
        let mut reach: u64 = 1;
        let mut width: u64 = 1;
        for _ in 0..depth_limit {
            width = width.saturating_mul(u64::from(fan));
            reach = reach.saturating_add(width);
            if reach >= k as u64 {
                break;
            }
        }
        if reach >= k as u64 {
            break;
        }
        fan += 1;
    }
    fan.min(max_fan)
}

/// Heap levels for `k` slices with slice 0 as root at level `root_level`.
fn heap_levels(k: usize, fan: u32, root_level: u8) -> Vec<u8> {
    let mut levels = vec![root_level; k];
    for j in 1..k {
        let parent = (j - 1) / fan as usize;
        levels[j] = levels[parent] + 1;
    }
    levels
}

/// Places the graph onto machines of `S` words.
///
/// * `deg + reserve <= S`: adjacency and state pack together into shared
///   bins (best-fit decreasing, deterministic).
/// * `deg <= S` otherwise: the full adjacency gets a dedicated machine (so
///   any node whose list fits one machine keeps it whole); the state packs
///   into a bin, which becomes the primary, one tree level above the list.
/// * `deg > S`: chunked. The first chunk shares the primary with the state
///   (length `S - reserve`), the rest fill dedicated machines of `S` words
///   arranged as a heap of arity `fan`, `fan^depth >= chunks`, depth capped
///   by `ceil(1/epsilon)`.
pub fn build_layout(g: &Graph, cfg: &MachineConfig) -> Result<Layout, EngineError> {
    let n = g.n();
    let s = cfg.s_words(n)?;
    if s < STATE_RESERVE_WORDS {
        return Err(EngineError::Config(format!(
            "machine capacity S = {s} cannot hold a node state reserve of {STATE_RESERVE_WORDS}"
        )));
    }
    let depth_limit = cfg.tree_depth_limit();

    #[derive(Clone, Copy, PartialEq)]
    enum Kind {
        Packed,
        WholeList,
        Chunked,
    }
    let mut kinds = Vec::with_capacity(n);
    for v in 0..n as NodeId {
        let deg = u64::from(g.degree(v));
        kinds.push(if deg + STATE_RESERVE_WORDS <= s {
            Kind::Packed
        } else if deg <= s {
            Kind::WholeList
        } else {
            if s < STATE_RESERVE_WORDS + 2 {
                return Err(EngineError::Config(format!(
                    "machine capacity S = {s} is too small to chunk a degree-{deg} node"
                )));
            }
            Kind::Chunked
        });
    }

    // Bin items: packed nodes weigh deg + reserve, others just the reserve.
    let mut items: Vec<(u64, NodeId)> = (0..n as NodeId)
        .map(|v| {
            let w = match kinds[v as usize] {
                Kind::Packed => u64::from(g.degree(v)) + STATE_RESERVE_WORDS,
                _ => STATE_RESERVE_WORDS,
            };
            (w, v)
        })
        .collect();
    items.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    // Best-fit decreasing: smallest free space that still fits, ties to the
    // lowest bin id. BTreeSet of (free, bin) makes each placement O(log n).
    let mut bin_free: Vec<u64> = Vec::new();
    let mut by_free: BTreeSet<(u64, u32)> = BTreeSet::new();
    let mut bin_of: Vec<u32> = vec![0; n];
    for &(w, v) in &items {
        let chosen = by_free.range((w, 0)..).next().copied();
        let b = match chosen {
            Some(key @ (_, b)) => {
                by_free.remove(&key);
                b
            }
            None => {
                bin_free.push(s);
                (bin_free.len() - 1) as u32
            }
        };
        bin_free[b as usize] -= w;
        by_free.insert((bin_free[b as usize], b));
        bin_of[v as usize] = b;
    }
    let bins = bin_free.len() as u32;

    // Machine ids: bins first, then per-node dedicated machines in id order.
    let mut next_machine = bins;
    let mut graph_words: Vec<u64> = vec![0; bins as usize];
    let mut alloc_machine = |graph_words: &mut Vec<u64>, words: u64| -> MachineId {
        let m = next_machine;
        next_machine += 1;
        graph_words.push(words);
        m
    };

    let mut nodes = Vec::with_capacity(n);
    let mut depth_max = 0u32;
    for v in 0..n as NodeId {
        let deg = u64::from(g.degree(v));
        let bin = bin_of[v as usize];
        let nl = match kinds[v as usize] {
            Kind::Packed => {
                graph_words[bin as usize] += deg;
                let slices = if deg == 0 {
                    Vec::new()
                } else {
                    vec![Slice { machine: bin, len: deg as u32 }]
                };
                NodeLayout {
                    primary: bin,
                    levels: vec![0; slices.len()],
                    slices,
                    fan: 1,
                    depth: 0,
                }
            }
            Kind::WholeList => {
                let m = alloc_machine(&mut graph_words, deg);
                NodeLayout {
                    primary: bin,
                    slices: vec![Slice { machine: m, len: deg as u32 }],
                    levels: vec![1],
                    fan: 1,
                    depth: 1,
                }
            }
            Kind::Chunked => {
                let head = s - STATE_RESERVE_WORDS;
                let rest = deg - head;
                let extra = rest.div_ceil(s) as usize;
                let mut slices = Vec::with_capacity(1 + extra);
                let m0 = alloc_machine(&mut graph_words, head);
                slices.push(Slice { machine: m0, len: head as u32 });
                let mut left = rest;
                for _ in 0..extra {
                    let len = left.min(s);
                    let m = alloc_machine(&mut graph_words, len);
                    slices.push(Slice { machine: m, len: len as u32 });
                    left -= len;
                }
                debug_assert_eq!(left, 0);
                // middle chunks must be exactly S for O(1) slot lookup
                debug_assert!(slices[1..slices.len().max(2) - 1].iter().all(|c| u64::from(c.len) == s));
                let fan = fan_for(slices.len(), depth_limit, s);
                let levels = heap_levels(slices.len(), fan, 0);
                let depth = u32::from(*levels.iter().max().unwrap());
                if depth > depth_limit {
                    return Err(EngineError::Config(format!(
                        "degree-{deg} node {v} needs tree depth {depth} > ceil(1/eps) = {depth_limit}"
                    )));
                }
                NodeLayout { primary: m0, slices, levels, fan, depth }
            }
        };
        depth_max = depth_max.max(nl.depth);
        nodes.push(nl);
    }

    let machines = next_machine;
    let mut warnings = Vec::new();
    let budget = cfg.machine_budget(n);
    let over = u64::from(machines) > budget;
    if over {
        warnings.push(format!(
            "{machines} machines exceed the C*n^(1-eps) guideline of {budget}"
        ));
    }
    debug_assert!(graph_words.iter().all(|&w| w <= s));
    debug_assert_eq!(graph_words.iter().sum::<u64>(), 2 * g.m() as u64);

    Ok(Layout {
        s,
        n,
        machines,
        nodes,
        graph_words,
        depth_max,
        over_machine_budget: over,
        warnings,
    })
}

// ---------------------------------------------------------------------------
// fabric: per-round accounting
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Serialize)]
pub struct MpcRoundMetrics {
    pub max_sent: u64,
    pub max_recv: u64,
    pub total_resident: u64,
    /// First machine seen over capacity while this round was open, if any.
    pub resident_violation: Option<(MachineId, u64)>,
}

/// Mutable accounting state for one machine-model execution.
pub struct Fabric {
    pub s: u64,
    base_machines: u32,
    resident: Vec<u64>,
    in_use: Vec<bool>,
    free_extras: Vec<MachineId>,
    extras_active: u32,
    pub machines_peak: u32,
    total_resident: u64,
    pub peak_machine_words: u64,
    pub peak_total_words: u64,
    pub rounds: Vec<MpcRoundMetrics>,
    pending_violation: Option<(MachineId, u64)>,
    // staged per-round loads, cleared on commit
    sent: Vec<u64>,
    recv: Vec<u64>,
    touched: Vec<MachineId>,
}

impl Fabric {
    pub fn new(s: u64, base_resident: Vec<u64>) -> Self {
        let base = base_resident.len();
        let total: u64 = base_resident.iter().sum();
        let peak = base_resident.iter().copied().max().unwrap_or(0);
        Fabric {
            s,
            base_machines: base as u32,
            in_use: vec![true; base],
            sent: vec![0; base],
            recv: vec![0; base],
            resident: base_resident,
            free_extras: Vec::new(),
            extras_active: 0,
            machines_peak: base as u32,
            total_resident: total,
            peak_machine_words: peak,
            peak_total_words: total,
            rounds: Vec::new(),
            pending_violation: None,
            touched: Vec::new(),
        }
    }

    pub fn machines_in_use(&self) -> u32 {
        self.base_machines + self.extras_active
    }

    pub fn resident(&self, m: MachineId) -> u64 {
        self.resident[m as usize]
    }

    pub fn total_resident(&self) -> u64 {
        self.total_resident
    }

    /// Adds or removes resident words on a machine, updating peaks and
    /// capacity violations as of the currently open round.
    pub fn adjust_resident(&mut self, m: MachineId, delta: i64) {
        let r = &mut self.resident[m as usize];
        if delta >= 0 {
            *r += delta as u64;
            self.total_resident += delta as u64;
            if *r > self.s && self.pending_violation.is_none() {
                self.pending_violation = Some((m, *r));
            }
            self.peak_machine_words = self.peak_machine_words.max(*r);
            self.peak_total_words = self.peak_total_words.max(self.total_resident);
        } else {
            let d = (-delta) as u64;
            debug_assert!(*r >= d, "machine {m} resident underflow");
            *r -= d;
            self.total_resident -= d;
        }
    }

    /// Fresh scratch machine (ball storage). Reuses freed ids.
    pub fn alloc_extra(&mut self) -> MachineId {
        let m = match self.free_extras.pop() {
            Some(m) => m,
            None => {
                self.resident.push(0);
                self.in_use.push(false);
                self.sent.push(0);
                self.recv.push(0);
                (self.resident.len() - 1) as MachineId
            }
        };
        self.in_use[m as usize] = true;
        self.extras_active += 1;
        self.machines_peak = self.machines_peak.max(self.machines_in_use());
        m
    }

    pub fn free_extra(&mut self, m: MachineId) {
        debug_assert!(m >= self.base_machines, "cannot free a base machine");
        let words = self.resident[m as usize];
        if words > 0 {
            self.adjust_resident(m, -(words as i64));
        }
        self.in_use[m as usize] = false;
        self.extras_active -= 1;
        self.free_extras.push(m);
    }

    pub fn stage_send(&mut self, m: MachineId, words: u64) {
        if words == 0 {
            return;
        }
        if self.sent[m as usize] == 0 && self.recv[m as usize] == 0 {
            self.touched.push(m);
        }
        self.sent[m as usize] += words;
    }

    pub fn stage_recv(&mut self, m: MachineId, words: u64) {
        if words == 0 {
            return;
        }
        if self.sent[m as usize] == 0 && self.recv[m as usize] == 0 {
            self.touched.push(m);
        }
        self.recv[m as usize] += words;
    }

    /// Ships everything staged, splitting over as many rounds as the
    /// per-machine cap requires (at least one round). This models a
    /// conflict-free schedule: with per-machine loads L, `ceil(max L / S)`
    /// rounds always suffice for a degree-constrained transfer.
    pub fn commit_staged(&mut self) -> u32 {
        let mut max_sent = 0u64;
        let mut max_recv = 0u64;
        for &m in &self.touched {
            max_sent = max_sent.max(self.sent[m as usize]);
            max_recv = max_recv.max(self.recv[m as usize]);
        }
        let span = max_sent.max(max_recv);
        let rounds = span.div_ceil(self.s).max(1) as u32;
        for j in 0..u64::from(rounds) {
            let shipped = |load: u64| load.saturating_sub(j * self.s).min(self.s);
            self.push_round(shipped(max_sent), shipped(max_recv));
        }
        for &m in &std::mem::take(&mut self.touched) {
            self.sent[m as usize] = 0;
            self.recv[m as usize] = 0;
        }
        rounds
    }

    fn push_round(&mut self, max_sent: u64, max_recv: u64) {
        self.rounds.push(MpcRoundMetrics {
            max_sent,
            max_recv,
            total_resident: self.total_resident,
            resident_violation: self.pending_violation.take(),
        });
    }

    /// Explicit deterministic router. Messages are fragmented greedily in a
    /// fixed order (rotation distance, then source, then submission order);
    /// each fragment takes whatever the sender and receiver caps leave. A
    /// message wider than a whole machine can never be delivered.
    pub fn route(&mut self, msgs: &[RoutedMessage]) -> Result<u32, EngineError> {
        for msg in msgs {
            if msg.words > self.s {
                return Err(EngineError::UndeliverableMessage { words: msg.words, cap: self.s });
            }
        }
        let machines = self.resident.len() as u64;
        let mut pending: Vec<(u64, MachineId, MachineId)> = msgs
            .iter()
            .filter(|m| m.src != m.dst && m.words > 0)
            .map(|m| (m.words, m.src, m.dst))
            .collect();
        let keyed = {
            let mut idx: Vec<usize> = (0..pending.len()).collect();
            idx.sort_by_key(|&i| {
                let (_, src, dst) = pending[i];
                let shift = (u64::from(dst) + machines - u64::from(src)) % machines;
                (shift, src, i)
            });
            idx
        };
        let mut order: Vec<(u64, MachineId, MachineId)> =
            keyed.into_iter().map(|i| pending[i]).collect();
        std::mem::swap(&mut pending, &mut order);

        if pending.is_empty() {
            // an exchange step happens even when nobody talks
            self.push_round(0, 0);
            return Ok(1);
        }
        let mut rounds = 0u32;
        while !pending.is_empty() {
            let mut max_sent = 0u64;
            let mut max_recv = 0u64;
            for &mut (ref mut words, src, dst) in pending.iter_mut() {
                let src_left = self.s - self.sent[src as usize];
                let dst_left = self.s - self.recv[dst as usize];
                let take = (*words).min(src_left).min(dst_left);
                if take > 0 {
                    if self.sent[src as usize] == 0 && self.recv[src as usize] == 0 {
                        self.touched.push(src);
                    }
                    if self.sent[dst as usize] == 0 && self.recv[dst as usize] == 0 {
                        self.touched.push(dst);
                    }
                    self.sent[src as usize] += take;
                    self.recv[dst as usize] += take;
                    max_sent = max_sent.max(self.sent[src as usize]);
                    max_recv = max_recv.max(self.recv[dst as usize]);
                    *words -= take;
                }
            }
            pending.retain(|&(words, _, _)| words > 0);
            for &m in &std::mem::take(&mut self.touched) {
                self.sent[m as usize] = 0;
                self.recv[m as usize] = 0;
            }
            self.push_round(max_sent, max_recv);
            rounds += 1;
        }
        Ok(rounds)
    }

    pub fn metrics(&self) -> FabricSummary {
        FabricSummary {
            mpc_rounds: self.rounds.len() as u32,
            max_sent_words: self.rounds.iter().map(|r| r.max_sent).max().unwrap_or(0),
            max_recv_words: self.rounds.iter().map(|r| r.max_recv).max().unwrap_or(0),
            peak_machine_words: self.peak_machine_words,
            peak_total_words: self.peak_total_words,
            machines: self.machines_peak,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RoutedMessage {
    pub src: MachineId,
    pub dst: MachineId,
    pub words: u64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FabricSummary {
    pub mpc_rounds: u32,
    pub max_sent_words: u64,
    pub max_recv_words: u64,
    pub peak_machine_words: u64,
    pub peak_total_words: u64,
    pub machines: u32,
}

// ---------------------------------------------------------------------------
// tree aggregation
// ---------------------------------------------------------------------------

/// Runs one neighborhood aggregation: every node with `Some` wire value
/// shows it to all neighbors, every node receives the requested folds over
/// its neighbors' wires. Returns the folds plus the machine rounds used.
///
/// Traffic: wires travel primary -> slices (tree levels down), then slot to
/// opposing slot, then partials fold slices -> primary (levels up). With fan
/// capped at S/2 and wires of at most 2 words, each tree level fits one
/// round; the middle transfer splits if slot machines are saturated.
pub fn neighborhood_aggregate(
    fabric: &mut Fabric,
    g: &Graph,
    layout: &Layout,
    wires: &[Option<WireValue>],
    specs: &[AggSpec],
) -> (Vec<Vec<i128>>, u32) {
    let n = g.n();
    let w_bits = word_bits(n);
    let max_wire_bits = wires
        .iter()
        .flatten()
        .map(|w| u32::from(w.words) * w_bits)
        .max()
        .unwrap_or(w_bits);
    let partial_words: u64 = specs
        .iter()
        .map(|s| u64::from(s.partial_bits(n, max_wire_bits).div_ceil(w_bits).max(1)))
        .sum();

    let mut rounds = 0u32;

    // down: distribute each participating node's wire to its slice machines
    for level in 1..=layout.depth_max {
        let mut any = false;
        for v in 0..n as NodeId {
            let nl = &layout.nodes[v as usize];
            if nl.depth < level {
                continue;
            }
            let Some(wv) = wires[v as usize] else { continue };
            let words = u64::from(wv.words);
            for (j, &lv) in nl.levels.iter().enumerate() {
                if u32::from(lv) != level {
                    continue;
                }
                let parent = if j == 0 {
                    nl.primary
                } else {
                    nl.slices[(j - 1) / nl.fan as usize].machine
                };
                let child = nl.slices[j].machine;
                if parent != child {
                    fabric.stage_send(parent, words);
                    fabric.stage_recv(child, words);
                    any = true;
                }
            }
        }
        if any {
            rounds += fabric.commit_staged();
        }
    }

    // transfer: each slot holding edge (u, v) ships u's wire to the opposing
    // slot. Loads only; the fold results themselves are computed below.
    // Every slot of a slice sits on one machine, so loads are accumulated
    // per slice and staged once — same per-machine totals, fewer calls.
    {
        for u in 0..n as NodeId {
            let send_words = wires[u as usize].map_or(0, |w| u64::from(w.words));
            let nbrs = g.neighbors(u);
            let mut start = 0usize;
            for slice in &layout.nodes[u as usize].slices {
                let end = start + slice.len as usize;
                let mut recv = 0u64;
                for &v in &nbrs[start..end] {
                    if let Some(w) = wires[v as usize] {
                        recv += u64::from(w.words);
                    }
                }
                fabric.stage_send(slice.machine, send_words * u64::from(slice.len));
                fabric.stage_recv(slice.machine, recv);
                start = end;
            }
        }
        // an exchange burns a round even if nobody participates
        rounds += fabric.commit_staged();
    }

    // up: fold partials along every tree, leaves to primary. Trees always
    // run their full schedule so the round structure is input-independent.
    for level in (1..=layout.depth_max).rev() {
        let mut any = false;
        for v in 0..n as NodeId {
            let nl = &layout.nodes[v as usize];
            if nl.depth < level {
                continue;
            }
            for (j, &lv) in nl.levels.iter().enumerate() {
                if u32::from(lv) != level {
                    continue;
                }
                let parent = if j == 0 {
                    nl.primary
                } else {
                    nl.slices[(j - 1) / nl.fan as usize].machine
                };
                let child = nl.slices[j].machine;
                if parent != child {
                    fabric.stage_send(child, partial_words);
                    fabric.stage_recv(parent, partial_words);
                    any = true;
                }
            }
        }
        if any {
            rounds += fabric.commit_staged();
        }
    }

    let folds: Vec<Vec<i128>> = (0..n as NodeId)
        .map(|u| fold_neighbor_wires(g, u, specs, wires))
        .collect();
    (folds, rounds)
}

/// One-word-per-node separable aggregate over neighborhoods.
pub fn aggregate_separable(
    fabric: &mut Fabric,
    g: &Graph,
    layout: &Layout,
    spec: AggSpec,
    values: &[u64],
) -> (Vec<i128>, u32) {
    let wires: Vec<Option<WireValue>> =
        values.iter().map(|&v| Some(WireValue { value: v, words: 1 })).collect();
    let (folds, rounds) = neighborhood_aggregate(fabric, g, layout, &wires, &[spec]);
    (folds.into_iter().map(|f| f[0]).collect(), rounds)
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct AuditReport {
    pub pass: bool,
    pub s_cap: u64,
    pub total_budget: u64,
    /// (1-based machine round, what went over) for the first violation.
    pub first_violation: Option<(u32, String)>,
}

/// Checks every recorded machine round against the word caps. Exact: a
/// single word over is a failure.
pub fn audit(rounds: &[MpcRoundMetrics], s_cap: u64, total_budget: u64) -> AuditReport {
    let mut first: Option<(u32, String)> = None;
    for (i, r) in rounds.iter().enumerate() {
        let idx = (i + 1) as u32;
        let what = if r.max_sent > s_cap {
            Some(format!("sent {} words > cap {s_cap}", r.max_sent))
        } else if r.max_recv > s_cap {
            Some(format!("received {} words > cap {s_cap}", r.max_recv))
        } else if let Some((m, words)) = r.resident_violation {
            Some(format!("machine {m} resident {words} words > capacity"))
        } else if r.total_resident > total_budget {
            Some(format!("total resident {} words > budget {total_budget}", r.total_resident))
        } else {
            None
        };
        if let Some(what) = what {
            first = Some((idx, what));
            break;
        }
    }
    AuditReport { pass: first.is_none(), s_cap, total_budget, first_violation: first }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congest::{AggOp, Decode};
    use crate::graph::{gen_graph, GenModel};
    use crate::randomness::RandomTape;
    use proptest::prelude::*;

    fn cfg(eps: f64) -> MachineConfig {
        MachineConfig::new(eps, MemoryMode::Unrestricted).unwrap()
    }

    fn fabric_for(layout: &Layout) -> Fabric {
        Fabric::new(layout.s, layout.graph_words.clone())
    }

    #[test]
    fn star_hub_is_chunked_within_depth() {
        let g = gen_graph(&GenModel::Star { n: 64 }, 0).unwrap();
        let layout = build_layout(&g, &cfg(0.5)).unwrap();
        assert_eq!(layout.s, 8);
        let hub = &layout.nodes[0];
        assert!(hub.slices.len() > 1, "degree 63 must be chunked at S=8");
        assert_eq!(hub.slices[0].machine, hub.primary);
        assert_eq!(u64::from(hub.slices[0].len), layout.s - STATE_RESERVE_WORDS);
        assert!(hub.depth <= 2, "depth {} exceeds ceil(1/eps) = 2", hub.depth);
        assert!(layout.graph_words.iter().all(|&w| w <= layout.s));
        // leaves have degree 1 and pack into shared bins
        assert_eq!(layout.nodes[5].depth, 0);
        assert!(layout.over_machine_budget, "a split star needs more machines than n^(1-eps)");
    }

    #[test]
    fn whole_list_nodes_keep_their_adjacency_on_one_machine() {
        // clique(8) at eps=0.99: S=8, deg=7, so 7+reserve > S but deg <= S
        let g = gen_graph(&GenModel::Clique { n: 8 }, 0).unwrap();
        let layout = build_layout(&g, &cfg(0.99)).unwrap();
        assert_eq!(layout.s, 8);
        for v in 0..8 {
            let nl = &layout.nodes[v];
            assert_eq!(nl.slices.len(), 1, "degree 7 fits one machine whole");
            assert_eq!(nl.slices[0].len, 7);
            assert_ne!(nl.slices[0].machine, nl.primary, "state lives in a bin one hop up");
            assert_eq!(nl.depth, 1);
        }
    }

    #[test]
    fn layout_covers_every_edge_slot_exactly_once() {
        let g = gen_graph(&GenModel::Gnp { n: 1000, p: 0.01 }, 3).unwrap();
        let layout = build_layout(&g, &cfg(0.5)).unwrap();
        assert!(layout.graph_words.iter().all(|&w| w <= layout.s));
        let total: u64 = layout
            .nodes
            .iter()
            .map(|nl| nl.slices.iter().map(|c| u64::from(c.len)).sum::<u64>())
            .sum();
        assert_eq!(total, 2 * g.m() as u64);
        assert!(layout.depth_max <= 2);
        // slot lookup agrees with slice boundaries
        for v in 0..1000u32 {
            let nl = &layout.nodes[v as usize];
            let mut j = 0u32;
            for c in &nl.slices {
                for _ in 0..c.len {
                    assert_eq!(layout.slot_machine(v, j), c.machine);
                    j += 1;
                }
            }
            assert_eq!(j, g.degree(v));
        }
    }

    #[test]
    fn sum_of_ones_yields_degrees() {
        let g = gen_graph(&GenModel::Gnp { n: 200, p: 0.05 }, 7).unwrap();
        let layout = build_layout(&g, &cfg(0.5)).unwrap();
        let mut fabric = fabric_for(&layout);
        let ones: Vec<u64> = vec![1; 200];
        let (folds, rounds) =
            aggregate_separable(&mut fabric, &g, &layout, AggSpec::new(AggOp::Sum, Decode::One), &ones);
        for v in 0..200u32 {
            assert_eq!(folds[v as usize], i128::from(g.degree(v)));
        }
        let limit = 2 * cfg(0.5).tree_depth_limit() + 2;
        assert!(rounds <= limit, "{rounds} rounds > {limit}");
    }

    #[test]
    fn max_aggregate_on_a_path() {
        let g = gen_graph(&GenModel::Path { n: 8 }, 0).unwrap();
        let layout = build_layout(&g, &cfg(0.9)).unwrap();
        let mut fabric = fabric_for(&layout);
        let (folds, _) = aggregate_separable(
            &mut fabric,
            &g,
            &layout,
            AggSpec::new(AggOp::Max, Decode::Value),
            &[5, 1, 9, 2, 8, 3, 7, 4],
        );
        assert_eq!(folds, vec![1, 9, 2, 9, 3, 8, 4, 7]);
    }

    #[test]
    fn or_aggregate_matches_brute_force() {
        let g = gen_graph(&GenModel::Gnp { n: 2000, p: 0.01 }, 5).unwrap();
        let layout = build_layout(&g, &cfg(0.5)).unwrap();
        let mut fabric = fabric_for(&layout);
        let tape = RandomTape::new(42, 2000);
        let vals: Vec<u64> = (0..2000u32).map(|v| u64::from(tape.sample_event(v, 1, 0.3))).collect();
        let (folds, _) = aggregate_separable(
            &mut fabric,
            &g,
            &layout,
            AggSpec::new(AggOp::Or, Decode::Value),
            &vals,
        );
        for v in 0..2000u32 {
            let want = g.neighbors(v).iter().any(|&u| vals[u as usize] != 0);
            assert_eq!(folds[v as usize] != 0, want, "node {v}");
        }
    }

    #[test]
    fn empty_exchange_still_burns_one_round() {
        let mut fabric = Fabric::new(16, vec![0; 4]);
        let rounds = fabric.route(&[]).unwrap();
        assert_eq!(rounds, 1);
        assert_eq!(fabric.rounds.len(), 1);
        assert_eq!(fabric.rounds[0].max_sent, 0);
    }

    #[test]
    fn saturated_sender_splits_across_rounds() {
        // one machine sends 3S one-word messages to 3S distinct targets
        let s = 8u64;
        let targets = 3 * s as u32;
        let mut fabric = Fabric::new(s, vec![0; targets as usize + 1]);
        let msgs: Vec<RoutedMessage> =
            (0..targets).map(|t| RoutedMessage { src: 0, dst: t + 1, words: 1 }).collect();
        let rounds = fabric.route(&msgs).unwrap();
        assert_eq!(rounds, 3);
        assert!(fabric.rounds.iter().all(|r| r.max_sent <= s && r.max_recv <= s));
    }

    #[test]
    fn all_to_all_achieves_the_rotation_optimum() {
        let machines = 7u32;
        let s = 3u64;
        let mut fabric = Fabric::new(s, vec![0; machines as usize]);
        let mut msgs = Vec::new();
        for a in 0..machines {
            for b in 0..machines {
                if a != b {
                    msgs.push(RoutedMessage { src: a, dst: b, words: 1 });
                }
            }
        }
        let rounds = fabric.route(&msgs).unwrap();
        let optimum = (u64::from(machines) - 1).div_ceil(s) as u32;
        assert_eq!(rounds, optimum, "rotation schedule should hit ceil((M-1)/S)");
    }

    #[test]
    fn oversized_message_is_undeliverable() {
        let mut fabric = Fabric::new(4, vec![0; 2]);
        let err = fabric.route(&[RoutedMessage { src: 0, dst: 1, words: 5 }]).unwrap_err();
        assert!(matches!(err, EngineError::UndeliverableMessage { words: 5, cap: 4 }));
    }

    #[test]
    fn forced_tiny_budget_fails_the_audit_naming_the_round() {
        let g = gen_graph(&GenModel::Path { n: 50 }, 0).unwrap();
        let layout = build_layout(&g, &cfg(0.5)).unwrap();
        let mut fabric = fabric_for(&layout);
        let ones: Vec<u64> = vec![1; 50];
        let _ = aggregate_separable(&mut fabric, &g, &layout, AggSpec::new(AggOp::Sum, Decode::One), &ones);
        let report = audit(&fabric.rounds, layout.s, 1);
        assert!(!report.pass);
        let (round, what) = report.first_violation.unwrap();
        assert_eq!(round, 1, "the first round already holds the graph");
        assert!(what.contains("total resident"), "unexpected reason: {what}");
    }

    #[test]
    fn honest_budget_passes_the_audit() {
        let g = gen_graph(&GenModel::Gnp { n: 500, p: 0.02 }, 9).unwrap();
        let c = cfg(0.5);
        let layout = build_layout(&g, &c).unwrap();
        let mut fabric = fabric_for(&layout);
        let ones: Vec<u64> = vec![1; 500];
        let _ = aggregate_separable(&mut fabric, &g, &layout, AggSpec::new(AggOp::Sum, Decode::One), &ones);
        let report = audit(&fabric.rounds, layout.s, c.total_budget_words(500, g.m() as u64));
        assert!(report.pass, "violation: {:?}", report.first_violation);
    }

    #[test]
    fn ball_machines_are_recycled() {
        let mut fabric = Fabric::new(8, vec![4; 3]);
        let a = fabric.alloc_extra();
        fabric.adjust_resident(a, 6);
        assert_eq!(fabric.machines_in_use(), 4);
        assert_eq!(fabric.peak_total_words, 18);
        fabric.free_extra(a);
        assert_eq!(fabric.total_resident(), 12);
        let b = fabric.alloc_extra();
        assert_eq!(a, b, "freed machine ids are reused");
        assert_eq!(fabric.resident(b), 0);
        assert_eq!(fabric.machines_peak, 4);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn aggregate_rounds_respect_the_depth_bound(
            n in 20usize..160,
            seed in 0u64..500,
            eps_idx in 0usize..3,
        ) {
            let eps = [0.3, 0.5, 0.8][eps_idx];
            let g = gen_graph(&GenModel::Gnp { n, p: 0.15 }, seed).unwrap();
            let c = cfg(eps);
            if let Ok(layout) = build_layout(&g, &c) {
                let mut fabric = fabric_for(&layout);
                let ones: Vec<u64> = vec![1; n];
                let (_, rounds) = aggregate_separable(
                    &mut fabric, &g, &layout, AggSpec::new(AggOp::Sum, Decode::One), &ones);
                let limit = 2 * c.tree_depth_limit() + 2;
                prop_assert!(rounds <= limit, "{} rounds > {}", rounds, limit);
            }
        }
    }
}
