//! Node programs for the set algorithms and the pipelines that compose
//! them into ruling sets.

pub mod luby;
pub mod pipeline;
pub mod shatter;
pub mod sparsify;

pub use luby::LubyProgram;
pub use pipeline::{
    beta_ruling_set, deg_ordered_sparsify, finish_off, luby_mis, run_on_engine, shatter,
    two_ruling_set, Engine, EngineRun, FinishReport, MisOutcome, Planner, RulingSetParams,
    RulingSetRun, RunMetrics, ShatterOutcome, SparsifyOutcome, StageSummary,
};
pub use shatter::ShatterProgram;
pub use sparsify::SparsifyProgram;
