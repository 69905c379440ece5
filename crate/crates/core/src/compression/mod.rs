//! Phase compression: planning sparse-round phases, gathering balls, and
//! fast-forwarding them on single machines.

pub mod ball;
pub mod engine;
pub mod plan;

pub use ball::{assemble_ball, ball_membership, fast_forward, sweep_marked_sources, Ball,
    BallMember, FastForward, MEMBER_HEADER_WORDS};
pub use engine::{
    compute_marks, fixed_to_f64, run_compressed, run_uncompressed, ActivitySample, CompressedRun,
    DirectReason, Marks, PhaseMode, PhaseRecord, SparseProgram,
};
pub use plan::{
    force_phase_len, halving_partition, phase_len_v1, plan_phases_v1, plan_phases_v2, CenterRule,
    PhasePlan,
};
