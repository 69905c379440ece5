//! Sparsified graph shattering.
//!
//! Runs `total_iterations` beep-style iterations grouped into phases of
//! `phase_iterations` each. A phase opens with one exchange round in which
//! every active node publishes its desire-level exponent `k` (the node's
//! probability is `2^-k`); each node folds its neighbors' levels into the
//! activity mass `d = Σ 2^-k` in saturating fixed point and calls itself
//! *super-heavy* for the phase when `d ≥ 2^(√(log₂ n)/5)`.
//!
//! Each iteration then costs two rounds:
//!
//! 1. **beep** — active nodes beep with probability `2^-k`;
//! 2. **join** — a node that beeped, is not super-heavy, and heard no
//!    neighbor beep joins the independent set and beeps once more; everyone
//!    else halves or doubles its desire-level (doubling capped at `1/2`).
//!
//! Hearing a join-beep deactivates a node at its next step. Nodes never
//! halt, so a run is always exactly `2·T + ⌈T/ℓ⌉` rounds; membership lives
//! in the state, and the caller computes the residual set from the graph.

use serde::Serialize;

use crate::congest::{
    AggOp, AggSpec, Coin, Decode, EngineError, NodeProgram, Outbox, RoundInput, RoundKind,
    StepOutcome, Status, WireValue,
};
use crate::compression::SparseProgram;
use crate::{word_bits, NodeId, Round};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    /// Still contending.
    Active,
    /// Joined the independent set; permanent.
    InSet,
    /// Deactivated by a joining neighbor; permanent.
    Inactive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShatterState {
    /// Desire-level exponent: the node's probability is `2^-k`, `k ≥ 1`.
    pub k: u8,
    pub member: Membership,
    /// High activity mass this phase; beeps but may not join.
    pub super_heavy: bool,
    /// Beeped in the current iteration's first round.
    pub beeped: bool,
    /// Had degree 0 in the input graph; behaves normally but never sends.
    pub isolated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    /// Desire-level exchange opening a phase.
    Exchange,
    Beep,
    Join,
}

pub struct ShatterProgram {
    pub total_iterations: u32,
    /// Iterations per phase (`ℓ`).
    pub phase_iterations: u32,
    pub n: usize,
    /// Fixed-point denominator exponent for desire-level sums.
    frac_bits: u8,
    /// `ceil(2^(√(log₂ n)/5) · 2^frac_bits)` — the super-heavy threshold.
    thresh_fixed: u64,
}

/// `max(1, ⌊√(δ·log₂ n)/10⌋)` — iterations per phase.
pub fn phase_iterations(n: usize, delta_param: f64) -> u32 {
    let l = (delta_param * f64::from(word_bits(n))).sqrt() / 10.0;
    (l.floor() as u32).max(1)
}

/// Default iteration budget `⌈4·log₂(Δ+2)⌉`.
pub fn default_iterations(max_degree: u32) -> u32 {
    (4.0 * f64::from(max_degree + 2).log2()).ceil() as u32
}

impl ShatterProgram {
    pub fn new(n: usize, total_iterations: u32, delta_param: f64) -> Result<Self, EngineError> {
        if total_iterations == 0 {
            return Err(EngineError::Config("shatter needs at least one iteration".into()));
        }
        if !(delta_param > 0.0) || !delta_param.is_finite() {
            return Err(EngineError::Config(format!("shatter needs δ > 0, got {delta_param}")));
        }
        let frac_bits = word_bits(n).min(32) as u8;
        let thresh = (2f64).powf(f64::from(word_bits(n)).sqrt() / 5.0);
        let thresh_fixed = (thresh * (1u64 << frac_bits) as f64).ceil() as u64;
        Ok(ShatterProgram {
            total_iterations,
            phase_iterations: phase_iterations(n, delta_param),
            n,
            frac_bits,
            thresh_fixed: thresh_fixed.max(1),
        })
    }

    pub fn phases(&self) -> u32 {
        self.total_iterations.div_ceil(self.phase_iterations)
    }

    pub fn super_heavy_threshold_fixed(&self) -> u64 {
        self.thresh_fixed
    }

    fn role(&self, round: Round) -> Role {
        let span = 2 * self.phase_iterations + 1;
        match (round - 1) % span {
            0 => Role::Exchange,
            off if off % 2 == 1 => Role::Beep,
            _ => Role::Join,
        }
    }

    fn desire(k: u8) -> f64 {
        (0.5f64).powi(i32::from(k))
    }
}

impl NodeProgram for ShatterProgram {
    type State = ShatterState;

    fn total_rounds(&self) -> Option<Round> {
        Some(2 * self.total_iterations + self.phases())
    }

    fn round_kind(&self, round: Round) -> RoundKind {
        match self.role(round) {
            Role::Exchange => RoundKind::Exchange(vec![AggSpec::new(
                AggOp::SatSum(self.thresh_fixed),
                Decode::DyadicWeight { frac_bits: self.frac_bits },
            )]),
            _ => RoundKind::Sparse,
        }
    }

    fn inbox_digest(&self, _round: Round) -> Option<Vec<AggSpec>> {
        // every round only asks "did any neighbor beep in the previous one"
        Some(vec![AggSpec::new(AggOp::Or, Decode::One)])
    }

    fn init(&self, _node: NodeId, degree: u32) -> ShatterState {
        ShatterState {
            k: 1,
            member: Membership::Active,
            super_heavy: false,
            beeped: false,
            isolated: degree == 0,
        }
    }

    fn step(
        &self,
        _node: NodeId,
        round: Round,
        state: &ShatterState,
        input: &RoundInput<'_>,
        coin: &Coin<'_>,
    ) -> StepOutcome<ShatterState> {
        let mut st = state.clone();
        let heard = input.agg(0) != 0;
        let outbox = match self.role(round) {
            Role::Exchange => {
                // the previous round was a join round (except at round 1)
                if heard && st.member == Membership::Active {
                    st.member = Membership::Inactive;
                }
                st.beeped = false;
                Outbox::Silent
            }
            Role::Beep => {
                if heard && st.member == Membership::Active {
                    st.member = Membership::Inactive;
                }
                if st.member == Membership::Active {
                    st.beeped = coin.event(Self::desire(st.k));
                    if st.beeped && !st.isolated {
                        Outbox::Broadcast { payload: 1, words: 1 }
                    } else {
                        Outbox::Silent
                    }
                } else {
                    st.beeped = false;
                    Outbox::Silent
                }
            }
            Role::Join => {
                if st.member != Membership::Active {
                    Outbox::Silent
                } else {
                    let joins = st.beeped && !st.super_heavy && !heard;
                    st.beeped = false;
                    if joins {
                        st.member = Membership::InSet;
                        if st.isolated {
                            Outbox::Silent
                        } else {
                            Outbox::Broadcast { payload: 1, words: 1 }
                        }
                    } else {
                        if st.super_heavy || heard {
                            st.k = st.k.saturating_add(1);
                        } else if st.k > 1 {
                            st.k -= 1; // doubling, capped at 1/2
                        }
                        Outbox::Silent
                    }
                }
            }
        };
        StepOutcome { state: st, outbox, status: Status::Active }
    }

    fn exchange_value(&self, _node: NodeId, _round: Round, state: &ShatterState) -> Option<WireValue> {
        if state.member == Membership::Active {
            Some(WireValue { value: u64::from(state.k), words: 1 })
        } else {
            None
        }
    }

    fn absorb_aggregates(
        &self,
        _node: NodeId,
        _round: Round,
        mut state: ShatterState,
        aggs: &[i128],
    ) -> ShatterState {
        if state.member == Membership::Active {
            state.super_heavy = aggs[0] >= i128::from(self.thresh_fixed);
        }
        state
    }

    fn state_bits(&self, _state: &ShatterState) -> u64 {
        // desire exponent (≤ T + 1) + membership + three flags
        let k_bits = u64::from(u32::BITS - (self.total_iterations + 1).leading_zeros());
        k_bits + 2 + 3
    }
}

impl SparseProgram for ShatterProgram {
    fn estimator_name(&self) -> &'static str {
        "shatter-desire-level"
    }

    /// Desire-levels at most double per iteration, so the beep probability
    /// `g` join rounds after the snapshot is at most `2^g` times the
    /// snapshot's, capped at `1/2`. A join round is bounded by the same
    /// iteration's beep bound — except when the phase boundary split a
    /// beep/join pair, where the snapshot already fixes whether the node
    /// beeped and the estimate is 0 or 1 accordingly.
    fn estimate_activation(
        &self,
        _node: NodeId,
        degree: u32,
        round: Round,
        phase_start: Round,
        snapshot: &ShatterState,
    ) -> f64 {
        if degree == 0 || snapshot.member != Membership::Active {
            return 0.0;
        }
        let grown = |up_to: Round| -> f64 {
            let doublings =
                (phase_start..up_to).filter(|&r| self.role(r) == Role::Join).count() as u32;
            let k_eff = u32::from(snapshot.k).saturating_sub(doublings).max(1);
            (0.5f64).powi(k_eff as i32)
        };
        match self.role(round) {
            Role::Exchange => 0.0,
            Role::Beep => grown(round),
            Role::Join => {
                if round == phase_start {
                    if snapshot.beeped {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    grown(round - 1)
                }
            }
        }
    }

    fn alpha(&self) -> f64 {
        2.0
    }

    /// Super-heavy nodes beep but cannot join; their neighborhoods are
    /// excluded from the activity-level maximum.
    fn is_send_only(&self, state: &ShatterState) -> bool {
        state.member == Membership::Active && state.super_heavy
    }
}
