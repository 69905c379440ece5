//! Node programs and the lockstep reference engine.
//!
//! A [`NodeProgram`] describes one synchronous algorithm from a single node's
//! point of view. Rounds come in two kinds:
//!
//! * **Sparse** rounds — the node reads its inbox (messages sent to it in the
//!   previous round), optionally flips its per-round coin, updates state, and
//!   may send messages of at most [`MESSAGE_WORDS`] words to neighbors.
//! * **Exchange** rounds — every participating node broadcasts one small wire
//!   value and receives declared separable aggregates (sum/min/max/or/and)
//!   folded over its neighbors' wire values. The fold result is absorbed into
//!   the state at the end of the same round, in both engines, so traces agree.
//!
//! The engine is deliberately dumb: it delivers messages, enforces the word
//! budget, rejects sends to non-neighbors, and records enough trace data to
//! audit state sizes afterwards. All cleverness lives in the programs and in
//! the compressed engine, which must reproduce this engine's states exactly.

use serde::Serialize;
use thiserror::Error;

use crate::graph::Graph;
use crate::randomness::RandomTape;
use crate::{word_bits, NodeId, Round};

/// Per-message word budget (the classic "O(log n) bits per edge per round").
pub const MESSAGE_WORDS: u8 = 2;

/// Multiplier in the per-node state budget: `deg(v)*κ*w + κ*w` bits.
pub const DEFAULT_KAPPA: u64 = 8;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("node {node} sent to non-neighbor {target} in round {round}")]
    NonNeighborSend { node: NodeId, target: NodeId, round: Round },
    #[error("node {node} message of {words} words exceeds budget {budget} in round {round}")]
    PayloadTooLarge { node: NodeId, round: Round, words: u8, budget: u8 },
    #[error("node {node} emitted sparse messages in exchange round {round}")]
    SendInExchangeRound { node: NodeId, round: Round },
    #[error("estimator {estimator} produced {value} outside [0,1] for node {node}, round {round}")]
    EstimatorOutOfRange { estimator: &'static str, node: NodeId, round: Round, value: f64 },
    #[error("node {node} sent in round {round} without being marked; activation estimator is unsound")]
    UnsoundSend { node: NodeId, round: Round },
    #[error("ball at center {center} needs {words} words, machine cap is {cap}: phase length too aggressive")]
    BallOverflow { center: NodeId, words: u64, cap: u64 },
    #[error("component containing node {node} needs {words} words, machine cap is {cap}")]
    ComponentTooLarge { node: NodeId, words: u64, cap: u64 },
    #[error("message of {words} words cannot fit machine capacity {cap}")]
    UndeliverableMessage { words: u64, cap: u64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid phase plan: {0}")]
    Plan(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Status {
    Active,
    /// Sends but no longer changes state in a data-dependent way; excluded
    /// from activity-level maxima.
    SendOnly,
    /// Absorbing: a halted node neither sends nor changes state again.
    Halted,
}

/// Separable fold over neighbor wire values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AggOp {
    Sum,
    /// Sum saturating at the given cap. Still associative, so it folds on
    /// trees, but partial results stay within a fixed word budget — used
    /// when only a threshold comparison against the sum is needed.
    SatSum(u64),
    Min,
    Max,
    Or,
    And,
}

/// How a wire value is decoded before folding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Decode {
    /// Every participant contributes 1 (so Sum counts participants).
    One,
    /// The wire value itself.
    Value,
    /// Wire value `k` encodes the dyadic probability `2^-k` and contributes
    /// `2^(frac_bits - k)`: fixed point with denominator `2^frac_bits`.
    /// Exponents past the precision contribute 0.
    DyadicWeight { frac_bits: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AggSpec {
    pub op: AggOp,
    pub decode: Decode,
}

impl AggSpec {
    pub const fn new(op: AggOp, decode: Decode) -> Self {
        AggSpec { op, decode }
    }

    pub fn identity(&self) -> i128 {
        match self.op {
            AggOp::Sum | AggOp::SatSum(_) | AggOp::Or => 0,
            AggOp::And => 1,
            AggOp::Min => i128::MAX,
            AggOp::Max => i128::MIN,
        }
    }

    pub fn decode(&self, wire: u64) -> i128 {
        match self.decode {
            Decode::One => 1,
            Decode::Value => wire as i128,
            Decode::DyadicWeight { frac_bits } => {
                let k = wire as u32;
                if k <= u32::from(frac_bits) {
                    1i128 << (u32::from(frac_bits) - k)
                } else {
                    0
                }
            }
        }
    }

    pub fn fold(&self, acc: i128, x: i128) -> i128 {
        match self.op {
            AggOp::Sum => acc + x,
            AggOp::SatSum(cap) => (acc + x).min(cap as i128),
            AggOp::Min => acc.min(x),
            AggOp::Max => acc.max(x),
            AggOp::Or => i128::from(acc != 0 || x != 0),
            AggOp::And => i128::from(acc != 0 && x != 0),
        }
    }

    /// Width of any partial fold result in bits, for tree accounting.
    pub fn partial_bits(&self, n: usize, max_wire_bits: u32) -> u32 {
        let decode_bits = match self.decode {
            Decode::One => 1,
            Decode::Value => max_wire_bits.max(1),
            Decode::DyadicWeight { frac_bits } => u32::from(frac_bits) + 1,
        };
        match self.op {
            // a sum over at most n terms gains log2(n) bits
            AggOp::Sum => decode_bits + word_bits(n),
            AggOp::SatSum(cap) => (u64::BITS - cap.leading_zeros()).max(1),
            AggOp::Min | AggOp::Max => decode_bits,
            AggOp::Or | AggOp::And => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RoundKind {
    Sparse,
    Exchange(Vec<AggSpec>),
}

/// Value broadcast in an exchange round; `words` is its on-wire size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WireValue {
    pub value: u64,
    pub words: u8,
}

/// What a node emits in a sparse round.
#[derive(Clone, Debug, PartialEq)]
pub enum Outbox {
    Silent,
    /// Same payload to every neighbor.
    Broadcast { payload: u64, words: u8 },
    /// Individually addressed messages; targets must be neighbors.
    Unicast(Vec<(NodeId, u64, u8)>),
}

#[derive(Clone, Debug)]
pub struct StepOutcome<S> {
    pub state: S,
    pub outbox: Outbox,
    pub status: Status,
}

/// Inbox for the current round: either the raw messages sent in the previous
/// round (sorted by sender id), or — when the program declares an inbox
/// digest for the round — only the folded aggregates over those messages.
/// Digested rounds never see raw messages, in any engine, so a program
/// cannot accidentally depend on data that a space-bounded machine would
/// not hold.
pub enum RoundInput<'a> {
    Raw(&'a [(NodeId, u64)]),
    Digest(&'a [i128]),
}

impl RoundInput<'_> {
    pub const EMPTY: RoundInput<'static> = RoundInput::Raw(&[]);

    pub fn raw(&self) -> &[(NodeId, u64)] {
        match self {
            RoundInput::Raw(msgs) => msgs,
            RoundInput::Digest(_) => panic!("program declared an inbox digest for this round"),
        }
    }

    pub fn digest(&self) -> &[i128] {
        match self {
            RoundInput::Digest(aggs) => aggs,
            RoundInput::Raw(_) => panic!("program did not declare an inbox digest for this round"),
        }
    }

    pub fn agg(&self, i: usize) -> i128 {
        self.digest()[i]
    }
}

/// Access to this node's coin for the current round. Reads are idempotent;
/// the engine hands each step only its own (node, round) address.
pub struct Coin<'a> {
    tape: &'a RandomTape,
    node: NodeId,
    round: Round,
}

impl<'a> Coin<'a> {
    pub fn new(tape: &'a RandomTape, node: NodeId, round: Round) -> Self {
        Coin { tape, node, round }
    }

    pub fn real(&self) -> f64 {
        self.tape.round_real(self.node, self.round)
    }

    pub fn real_numerator(&self) -> u64 {
        self.tape.round_real_numerator(self.node, self.round)
    }

    pub fn event(&self, p: f64) -> bool {
        self.tape.sample_event(self.node, self.round, p)
    }
}

pub trait NodeProgram {
    type State: Clone + PartialEq + std::fmt::Debug + Serialize;

    /// Fixed round count, if the program has one. `None` means "run until
    /// every node halts or the caller's cap is reached".
    fn total_rounds(&self) -> Option<Round>;

    fn round_kind(&self, round: Round) -> RoundKind;

    /// Declares that this round's inbox is consumed only through the given
    /// folds. Engines then deliver [`RoundInput::Digest`] instead of raw
    /// messages; the space-bounded engines can build the folds on aggregation
    /// trees without ever materializing an inbox.
    fn inbox_digest(&self, _round: Round) -> Option<Vec<AggSpec>> {
        None
    }

    fn init(&self, node: NodeId, degree: u32) -> Self::State;

    fn step(
        &self,
        node: NodeId,
        round: Round,
        state: &Self::State,
        input: &RoundInput<'_>,
        coin: &Coin<'_>,
    ) -> StepOutcome<Self::State>;

    /// Wire value for an exchange round, read *after* that round's step.
    /// `None` means the node stays silent and contributes nothing.
    fn exchange_value(&self, _node: NodeId, _round: Round, _state: &Self::State) -> Option<WireValue> {
        None
    }

    /// Folds of the exchange round's aggregates, absorbed at the end of the
    /// same round. `aggs[i]` corresponds to `RoundKind::Exchange(specs)[i]`.
    fn absorb_aggregates(
        &self,
        _node: NodeId,
        _round: Round,
        state: Self::State,
        _aggs: &[i128],
    ) -> Self::State {
        state
    }

    /// Honest size of the state in bits, for the congestion audit.
    fn state_bits(&self, state: &Self::State) -> u64;
}

/// Per-round trace entry. Message counts are totals across the graph;
/// `state_bits` and `statuses` are per node.
#[derive(Clone, Debug, Serialize)]
pub struct RoundTrace {
    pub round: Round,
    pub messages_sent: u64,
    pub message_words: u64,
    pub max_message_words: u8,
    pub senders: u64,
    pub state_bits: Vec<u64>,
    pub statuses: Vec<Status>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExecutionTrace {
    pub rounds: Vec<RoundTrace>,
}

impl ExecutionTrace {
    pub fn rounds_executed(&self) -> Round {
        self.rounds.len() as Round
    }

    /// Communication rounds actually used: the last round in which any
    /// message travelled. A program whose nodes all halt in round 1 without
    /// sending used 0 effective rounds even though the engine ticked once.
    pub fn effective_rounds(&self) -> Round {
        self.rounds
            .iter()
            .rev()
            .find(|rt| rt.messages_sent > 0)
            .map_or(0, |rt| rt.round)
    }
}

#[derive(Clone, Debug)]
pub struct CongestRun<S> {
    pub states: Vec<S>,
    pub statuses: Vec<Status>,
    pub rounds_executed: Round,
    pub trace: ExecutionTrace,
}

/// Node iteration order. The default ascending order and any permutation
/// must produce identical results; a test shuffles to prove it.
pub fn run_congest<P: NodeProgram>(
    graph: &Graph,
    prog: &P,
    tape: &RandomTape,
    max_rounds: Round,
) -> Result<CongestRun<P::State>, EngineError> {
    let order: Vec<NodeId> = (0..graph.n() as NodeId).collect();
    run_congest_with_order(graph, prog, tape, max_rounds, &order)
}

pub fn run_congest_with_order<P: NodeProgram>(
    graph: &Graph,
    prog: &P,
    tape: &RandomTape,
    max_rounds: Round,
    order: &[NodeId],
) -> Result<CongestRun<P::State>, EngineError> {
    let n = graph.n();
    let mut states: Vec<P::State> = (0..n as NodeId).map(|v| prog.init(v, graph.degree(v))).collect();
    let mut statuses = vec![Status::Active; n];
    let limit = match prog.total_rounds() {
        Some(r) => r.min(max_rounds),
        None => max_rounds,
    };

    let mut inboxes: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n];
    let mut next_inboxes: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); n];
    let mut trace = ExecutionTrace { rounds: Vec::new() };
    let mut rounds_executed = 0;

    for round in 1..=limit {
        if statuses.iter().all(|s| *s == Status::Halted) {
            break;
        }
        rounds_executed = round;
        let kind = prog.round_kind(round);
        let digest_specs = prog.inbox_digest(round);
        let digests: Option<Vec<Vec<i128>>> = digest_specs.as_ref().map(|specs| {
            inboxes.iter().map(|msgs| fold_messages(specs, msgs)).collect()
        });
        let mut messages_sent = 0u64;
        let mut message_words = 0u64;
        let mut max_message_words = 0u8;
        let mut senders = 0u64;

        for &u in order {
            if statuses[u as usize] == Status::Halted {
                continue;
            }
            let coin = Coin::new(tape, u, round);
            let input = match &digests {
                Some(d) => RoundInput::Digest(&d[u as usize]),
                None => RoundInput::Raw(&inboxes[u as usize]),
            };
            let outcome = prog.step(u, round, &states[u as usize], &input, &coin);
            states[u as usize] = outcome.state;
            statuses[u as usize] = outcome.status;
            match outcome.outbox {
                Outbox::Silent => {}
                ref sending => {
                    if matches!(kind, RoundKind::Exchange(_)) {
                        return Err(EngineError::SendInExchangeRound { node: u, round });
                    }
                    senders += 1;
                    match sending {
                        Outbox::Broadcast { payload, words } => {
                            check_words(u, round, *words)?;
                            for &v in graph.neighbors(u) {
                                next_inboxes[v as usize].push((u, *payload));
                            }
                            let deg = graph.degree(u) as u64;
                            messages_sent += deg;
                            message_words += deg * u64::from(*words);
                            max_message_words = max_message_words.max(*words);
                        }
                        Outbox::Unicast(msgs) => {
                            for &(v, payload, words) in msgs {
                                check_words(u, round, words)?;
                                if !graph.has_edge(u, v) {
                                    return Err(EngineError::NonNeighborSend { node: u, target: v, round });
                                }
                                next_inboxes[v as usize].push((u, payload));
                                messages_sent += 1;
                                message_words += u64::from(words);
                                max_message_words = max_message_words.max(words);
                            }
                        }
                        Outbox::Silent => unreachable!(),
                    }
                }
            }
        }

        // exchange rounds: broadcast wire values, fold per receiving node,
        // absorb in the same round
        if let RoundKind::Exchange(specs) = &kind {
            let wires: Vec<Option<WireValue>> = (0..n as NodeId)
                .map(|v| {
                    if statuses[v as usize] == Status::Halted {
                        None
                    } else {
                        prog.exchange_value(v, round, &states[v as usize])
                    }
                })
                .collect();
            for (v, wire) in wires.iter().enumerate() {
                if let Some(w) = wire {
                    check_words(v as NodeId, round, w.words)?;
                    let deg = graph.degree(v as NodeId) as u64;
                    senders += 1;
                    messages_sent += deg;
                    message_words += deg * u64::from(w.words);
                    max_message_words = max_message_words.max(w.words);
                }
            }
            for u in 0..n as NodeId {
                if statuses[u as usize] == Status::Halted {
                    continue;
                }
                let aggs = fold_neighbor_wires(graph, u, specs, &wires);
                states[u as usize] = prog.absorb_aggregates(u, round, states[u as usize].clone(), &aggs);
            }
        }

        for (u, inbox) in next_inboxes.iter_mut().enumerate() {
            inbox.sort_unstable_by_key(|&(from, _)| from);
            std::mem::swap(&mut inboxes[u], inbox);
            inbox.clear();
        }

        trace.rounds.push(RoundTrace {
            round,
            messages_sent,
            message_words,
            max_message_words,
            senders,
            state_bits: states.iter().map(|s| prog.state_bits(s)).collect(),
            statuses: statuses.clone(),
        });
    }

    Ok(CongestRun { states, statuses, rounds_executed, trace })
}

fn check_words(node: NodeId, round: Round, words: u8) -> Result<(), EngineError> {
    if words > MESSAGE_WORDS {
        Err(EngineError::PayloadTooLarge { node, round, words, budget: MESSAGE_WORDS })
    } else {
        Ok(())
    }
}

pub fn fold_neighbor_wires(
    graph: &Graph,
    u: NodeId,
    specs: &[AggSpec],
    wires: &[Option<WireValue>],
) -> Vec<i128> {
    let mut aggs: Vec<i128> = specs.iter().map(|s| s.identity()).collect();
    for &v in graph.neighbors(u) {
        if let Some(w) = wires[v as usize] {
            for (acc, spec) in aggs.iter_mut().zip(specs) {
                *acc = spec.fold(*acc, spec.decode(w.value));
            }
        }
    }
    aggs
}

/// Folds a raw inbox down to the declared digest. Message payloads are
/// decoded exactly like exchange wire values.
pub fn fold_messages(specs: &[AggSpec], msgs: &[(NodeId, u64)]) -> Vec<i128> {
    let mut aggs: Vec<i128> = specs.iter().map(|s| s.identity()).collect();
    for &(_, payload) in msgs {
        for (acc, spec) in aggs.iter_mut().zip(specs) {
            *acc = spec.fold(*acc, spec.decode(payload));
        }
    }
    aggs
}

/// Bit budget for a node's state: `deg(v)*κ*w + κ*w` where `w = ceil(log2 n)`.
pub fn congestion_budget(graph: &Graph, v: NodeId, kappa: u64) -> u64 {
    let w = u64::from(word_bits(graph.n()));
    u64::from(graph.degree(v)) * kappa * w + kappa * w
}

#[derive(Clone, Debug, Serialize)]
pub struct CongestionReport {
    pub pass: bool,
    pub kappa: u64,
    /// Worst (bits / budget) offender: (node, round, bits, budget).
    pub worst: Option<(NodeId, Round, u64, u64)>,
}

/// Checks every recorded round against the per-node state budget.
pub fn check_state_congested(trace: &ExecutionTrace, graph: &Graph, kappa: u64) -> CongestionReport {
    let mut pass = true;
    let mut worst: Option<(NodeId, Round, u64, u64, f64)> = None;
    for rt in &trace.rounds {
        for (v, &bits) in rt.state_bits.iter().enumerate() {
            let budget = congestion_budget(graph, v as NodeId, kappa);
            let ratio = bits as f64 / budget.max(1) as f64;
            if worst.map_or(true, |(_, _, _, _, r)| ratio > r) {
                worst = Some((v as NodeId, rt.round, bits, budget, ratio));
            }
            if bits > budget {
                pass = false;
            }
        }
    }
    CongestionReport { pass, kappa, worst: worst.map(|(v, r, b, bud, _)| (v, r, b, bud)) }
}

// ---------------------------------------------------------------------------
// small programs used by tests in several modules
// ---------------------------------------------------------------------------

pub mod testprog {
    use super::*;

    /// Halts everyone in round 1 without sending.
    pub struct HaltImmediately;

    impl NodeProgram for HaltImmediately {
        type State = u32;

        fn total_rounds(&self) -> Option<Round> {
            None
        }

        fn round_kind(&self, _round: Round) -> RoundKind {
            RoundKind::Sparse
        }

        fn init(&self, node: NodeId, _degree: u32) -> u32 {
            node
        }

        fn step(&self, _n: NodeId, _r: Round, state: &u32, _i: &RoundInput<'_>, _c: &Coin<'_>) -> StepOutcome<u32> {
            StepOutcome { state: *state, outbox: Outbox::Silent, status: Status::Halted }
        }

        fn state_bits(&self, _s: &u32) -> u64 {
            32
        }
    }

    /// Round 1: broadcast own id. Round 2: record sorted inbox, halt.
    pub struct BroadcastIdOnce;

    #[derive(Clone, Debug, PartialEq, Serialize)]
    pub struct SeenState {
        pub id: NodeId,
        pub seen: Vec<NodeId>,
    }

    impl NodeProgram for BroadcastIdOnce {
        type State = SeenState;

        fn total_rounds(&self) -> Option<Round> {
            Some(2)
        }

        fn round_kind(&self, _round: Round) -> RoundKind {
            RoundKind::Sparse
        }

        fn init(&self, node: NodeId, _degree: u32) -> SeenState {
            SeenState { id: node, seen: Vec::new() }
        }

        fn step(
            &self,
            _n: NodeId,
            round: Round,
            state: &SeenState,
            input: &RoundInput<'_>,
            _c: &Coin<'_>,
        ) -> StepOutcome<SeenState> {
            let mut st = state.clone();
            if round == 1 {
                StepOutcome {
                    outbox: Outbox::Broadcast { payload: u64::from(st.id), words: 1 },
                    state: st,
                    status: Status::Active,
                }
            } else {
                st.seen = input.raw().iter().map(|&(_, p)| p as NodeId).collect();
                StepOutcome { state: st, outbox: Outbox::Silent, status: Status::Halted }
            }
        }

        fn state_bits(&self, s: &SeenState) -> u64 {
            32 + 32 * s.seen.len() as u64
        }
    }

    /// Round 1: broadcast own id. Round 2 consumes the inbox through a
    /// digest only: [count of senders, min payload].
    pub struct DigestedCount;

    #[derive(Clone, Debug, PartialEq, Serialize)]
    pub struct CountState {
        pub id: NodeId,
        pub count: i128,
        pub min_seen: i128,
    }

    impl NodeProgram for DigestedCount {
        type State = CountState;

        fn total_rounds(&self) -> Option<Round> {
            Some(2)
        }

        fn round_kind(&self, _round: Round) -> RoundKind {
            RoundKind::Sparse
        }

        fn inbox_digest(&self, round: Round) -> Option<Vec<AggSpec>> {
            (round == 2).then(|| {
                vec![
                    AggSpec::new(AggOp::Sum, Decode::One),
                    AggSpec::new(AggOp::Min, Decode::Value),
                ]
            })
        }

        fn init(&self, node: NodeId, _degree: u32) -> CountState {
            CountState { id: node, count: -1, min_seen: -1 }
        }

        fn step(
            &self,
            _n: NodeId,
            round: Round,
            state: &CountState,
            input: &RoundInput<'_>,
            _c: &Coin<'_>,
        ) -> StepOutcome<CountState> {
            let mut st = state.clone();
            if round == 1 {
                StepOutcome {
                    outbox: Outbox::Broadcast { payload: u64::from(st.id), words: 1 },
                    state: st,
                    status: Status::Active,
                }
            } else {
                st.count = input.agg(0);
                st.min_seen = input.agg(1);
                StepOutcome { state: st, outbox: Outbox::Silent, status: Status::Halted }
            }
        }

        fn state_bits(&self, _s: &CountState) -> u64 {
            32 + 128 + 128
        }
    }

    /// Deliberately hoards deg(v)^2 words of state; must fail the audit.
    pub struct StateHog;

    #[derive(Clone, Debug, PartialEq, Serialize)]
    pub struct HogState {
        pub words: u64,
    }

    impl NodeProgram for StateHog {
        type State = HogState;

        fn total_rounds(&self) -> Option<Round> {
            Some(1)
        }

        fn round_kind(&self, _round: Round) -> RoundKind {
            RoundKind::Sparse
        }

        fn init(&self, _node: NodeId, degree: u32) -> HogState {
            HogState { words: u64::from(degree) * u64::from(degree) }
        }

        fn step(&self, _n: NodeId, _r: Round, state: &HogState, _i: &RoundInput<'_>, _c: &Coin<'_>) -> StepOutcome<HogState> {
            StepOutcome { state: state.clone(), outbox: Outbox::Silent, status: Status::Halted }
        }

        fn state_bits(&self, s: &HogState) -> u64 {
            s.words * 64
        }
    }

    /// Tries to unicast to node (self + 2) regardless of adjacency.
    pub struct NonNeighborSender;

    impl NodeProgram for NonNeighborSender {
        type State = u32;

        fn total_rounds(&self) -> Option<Round> {
            Some(1)
        }

        fn round_kind(&self, _round: Round) -> RoundKind {
            RoundKind::Sparse
        }

        fn init(&self, node: NodeId, _degree: u32) -> u32 {
            node
        }

        fn step(&self, node: NodeId, _r: Round, state: &u32, _i: &RoundInput<'_>, _c: &Coin<'_>) -> StepOutcome<u32> {
            StepOutcome {
                state: *state,
                outbox: Outbox::Unicast(vec![(node + 2, 0, 1)]),
                status: Status::Halted,
            }
        }

        fn state_bits(&self, _s: &u32) -> u64 {
            32
        }
    }
}
