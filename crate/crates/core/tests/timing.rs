use std::time::Instant;
use mpcsim::algorithms::ShatterProgram;
use mpcsim::compression::{compute_marks, plan_phases_v1, run_compressed};
use mpcsim::congest::{run_congest, NodeProgram};
use mpcsim::graph::{gen_graph, GenModel};
use mpcsim::mpc::{MachineConfig, MemoryMode};
use mpcsim::randomness::RandomTape;

#[test]
fn timing_probe() {
    let g = gen_graph(&GenModel::Gnp { n: 10_000, p: 0.02 }, 1).unwrap();
    let tape = RandomTape::new(1, g.n());
    let cfg = MachineConfig::new(0.5, MemoryMode::Unrestricted).unwrap();
    let prog = ShatterProgram::new(g.n(), 32, 1.0).unwrap();
    let total = prog.total_rounds().unwrap();

    let t = Instant::now();
    let c = run_congest(&g, &prog, &tape, total).unwrap();
    println!("congest ref: {:?} rounds={}", t.elapsed(), c.rounds_executed);

    // marks cost alone over every sparse span
    let t = Instant::now();
    let snap = run_congest(&g, &prog, &tape, 1).unwrap();
    let mut mark_time = t.elapsed();
    let t = Instant::now();
    let _ = compute_marks(&g, &prog, &tape, 2, 2, &snap.states, &snap.statuses).unwrap();
    mark_time += t.elapsed();
    println!("one snapshot+marks: {mark_time:?}");

    let plans = plan_phases_v1(total, 2.0, g.n(), 0.5).unwrap();
    let t = Instant::now();
    let r = run_compressed(&g, &prog, &tape, &cfg, &plans).unwrap();
    println!(
        "compressed: {:?} mpc_rounds(phases)={} exchange_mpc_rounds={} phases={}",
        t.elapsed(),
        r.phases.iter().map(|p| p.mpc_rounds).sum::<u32>(),
        r.exchange_mpc_rounds,
        r.phases.len()
    );
}
