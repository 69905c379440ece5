//! Luby's maximal-independent-set baseline.
//!
//! Two rounds per iteration. In a *propose* round every contender draws a
//! random rank, packs it with its id into a single comparable candidate,
//! and broadcasts it. In the following *resolve* round a node whose
//! candidate is strictly below every neighbor's joins the set and beeps;
//! hearers drop out at their next propose step. Candidates are distinct
//! (the id is the low half), so two neighbors can never both be local
//! minima. Nodes halt as they decide, and the run ends when everyone has.

use serde::Serialize;

use crate::congest::{
    AggOp, AggSpec, Coin, Decode, NodeProgram, Outbox, RoundInput, RoundKind, StepOutcome, Status,
};
use crate::compression::SparseProgram;
use crate::{word_bits, NodeId, Round};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LubyState {
    /// Still contending (not joined, not dropped out).
    pub alive: bool,
    pub in_set: bool,
    /// Rank drawn in the last propose round.
    pub rank: u64,
    /// Had degree 0 in the input graph; joins unopposed and never sends.
    pub isolated: bool,
}

pub struct LubyProgram {
    pub n: usize,
}

/// Round budget that the caller should pass as `max_rounds`; the algorithm
/// finishes far earlier with overwhelming probability.
pub fn round_cap(n: usize) -> Round {
    16 * word_bits(n) + 80
}

impl LubyProgram {
    pub fn new(n: usize) -> Self {
        LubyProgram { n }
    }

    fn is_propose(round: Round) -> bool {
        round % 2 == 1
    }

    /// Rank in the high bits, id in the low bits: comparing candidates
    /// orders by rank with ties broken toward the smaller id.
    fn pack(&self, rank: u64, id: NodeId) -> u64 {
        let w = word_bits(self.n);
        (rank << w) | u64::from(id)
    }

    fn draw_rank(&self, coin: &Coin<'_>) -> u64 {
        let w = word_bits(self.n);
        let scaled = (coin.real() * (1u64 << w) as f64).floor() as u64;
        scaled.min((1u64 << w) - 1)
    }
}

impl NodeProgram for LubyProgram {
    type State = LubyState;

    fn total_rounds(&self) -> Option<Round> {
        None
    }

    fn round_kind(&self, _round: Round) -> RoundKind {
        RoundKind::Sparse
    }

    fn inbox_digest(&self, round: Round) -> Option<Vec<AggSpec>> {
        if Self::is_propose(round) {
            // did any neighbor join last resolve round
            Some(vec![AggSpec::new(AggOp::Or, Decode::One)])
        } else {
            Some(vec![AggSpec::new(AggOp::Min, Decode::Value)])
        }
    }

    fn init(&self, _node: NodeId, degree: u32) -> LubyState {
        LubyState { alive: true, in_set: false, rank: 0, isolated: degree == 0 }
    }

    fn step(
        &self,
        node: NodeId,
        round: Round,
        state: &LubyState,
        input: &RoundInput<'_>,
        coin: &Coin<'_>,
    ) -> StepOutcome<LubyState> {
        let mut st = state.clone();
        if Self::is_propose(round) {
            if input.agg(0) != 0 {
                // a neighbor joined; this node is dominated and done
                st.alive = false;
                return StepOutcome { state: st, outbox: Outbox::Silent, status: Status::Halted };
            }
            st.rank = self.draw_rank(coin);
            let outbox = if st.isolated {
                Outbox::Silent
            } else {
                Outbox::Broadcast { payload: self.pack(st.rank, node), words: 2 }
            };
            StepOutcome { state: st, outbox, status: Status::Active }
        } else {
            let min_nbr = input.agg(0);
            if i128::from(self.pack(st.rank, node)) < min_nbr {
                st.in_set = true;
                st.alive = false;
                let outbox = if st.isolated {
                    Outbox::Silent
                } else {
                    Outbox::Broadcast { payload: 1, words: 1 }
                };
                StepOutcome { state: st, outbox, status: Status::Halted }
            } else {
                StepOutcome { state: st, outbox: Outbox::Silent, status: Status::Active }
            }
        }
    }

    fn state_bits(&self, _state: &LubyState) -> u64 {
        // rank + three flags
        let w = u64::from(word_bits(self.n));
        w + 3
    }
}

impl SparseProgram for LubyProgram {
    fn estimator_name(&self) -> &'static str {
        "luby-contender"
    }

    /// Every contender may send in every round, so the only useful bound
    /// is 1; this baseline gains nothing from compression.
    fn estimate_activation(
        &self,
        _node: NodeId,
        degree: u32,
        _round: Round,
        _phase_start: Round,
        snapshot: &LubyState,
    ) -> f64 {
        if degree > 0 && snapshot.alive {
            1.0
        } else {
            0.0
        }
    }

    fn alpha(&self) -> f64 {
        2.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congest::run_congest;
    use crate::graph::{gen_graph, GenModel};
    use crate::randomness::RandomTape;

    fn check_mis(g: &crate::graph::Graph, in_set: &[bool]) {
        for (u, v) in g.edges() {
            assert!(!(in_set[u as usize] && in_set[v as usize]), "edge ({u},{v}) inside set");
        }
        for v in 0..g.n() as NodeId {
            let covered = in_set[v as usize]
                || g.neighbors(v).iter().any(|&u| in_set[u as usize]);
            assert!(covered, "node {v} neither in the set nor dominated");
        }
    }

    #[test]
    fn finds_a_maximal_independent_set() {
        let g = gen_graph(&GenModel::Gnp { n: 300, p: 0.02 }, 4).unwrap();
        for seed in 1..6u64 {
            let tape = RandomTape::new(seed, g.n());
            let run = run_congest(&g, &LubyProgram::new(g.n()), &tape, round_cap(g.n())).unwrap();
            assert!(run.statuses.iter().all(|s| *s == Status::Halted), "seed {seed} unfinished");
            let in_set: Vec<bool> = run.states.iter().map(|s| s.in_set).collect();
            check_mis(&g, &in_set);
        }
    }

    #[test]
    fn isolated_nodes_join_at_the_first_resolve() {
        let g = gen_graph(&GenModel::Gnp { n: 10, p: 0.0 }, 0).unwrap();
        let run = run_congest(&g, &LubyProgram::new(10), &RandomTape::new(7, 10), 50).unwrap();
        assert_eq!(run.rounds_executed, 2);
        assert!(run.states.iter().all(|s| s.in_set));
    }

    #[test]
    fn two_connected_nodes_split_deterministically() {
        let g = gen_graph(&GenModel::Path { n: 2 }, 0).unwrap();
        for seed in 0..10u64 {
            let tape = RandomTape::new(seed, 2);
            let run = run_congest(&g, &LubyProgram::new(2), &tape, 50).unwrap();
            let set: Vec<bool> = run.states.iter().map(|s| s.in_set).collect();
            assert_eq!(set.iter().filter(|&&b| b).count(), 1, "seed {seed}");
            check_mis(&g, &set);
        }
    }

    #[test]
    fn candidate_packing_breaks_ties_by_id() {
        let prog = LubyProgram::new(1000);
        let a = prog.pack(5, 3);
        let b = prog.pack(5, 17);
        let c = prog.pack(4, 900);
        assert!(a < b, "equal ranks must order by id");
        assert!(c < a, "lower rank must dominate id");
    }
}
