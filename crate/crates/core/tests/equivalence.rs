//! Cross-engine equivalence and brute-force oracles for the compression
//! machinery. The fabric engines must be *perfect* simulations: same tape,
//! same final states, bit for bit, no matter how phases are chopped.

use proptest::prelude::*;

use mpcsim::algorithms::{
    deg_ordered_sparsify, luby_mis, shatter, Engine, Planner, SparsifyProgram,
};
use mpcsim::compression::{ball_membership, compute_marks, sweep_marked_sources};
use mpcsim::congest::{run_congest, NodeProgram, RoundKind};
use mpcsim::graph::{gen_graph, GenModel, Graph};
use mpcsim::mpc::{MachineConfig, MemoryMode};
use mpcsim::randomness::RandomTape;
use mpcsim::verify::verify_independent;
use mpcsim::NodeId;

fn mpc_engine(planner: Planner, epsilon: f64, force_ell: Option<u32>) -> Engine {
    Engine::Mpc {
        planner,
        cfg: MachineConfig::new(epsilon, MemoryMode::Unrestricted).unwrap(),
        force_ell,
        direct_only: false,
    }
}

fn direct_engine(epsilon: f64) -> Engine {
    Engine::Mpc {
        planner: Planner::V1,
        cfg: MachineConfig::new(epsilon, MemoryMode::Unrestricted).unwrap(),
        force_ell: None,
        direct_only: true,
    }
}

/// All-pairs distances by Floyd–Warshall — deliberately a different
/// algorithm from the BFS the library uses.
fn distance_matrix(g: &Graph) -> Vec<Vec<u32>> {
    const INF: u32 = u32::MAX / 2;
    let n = g.n();
    let mut d = vec![vec![INF; n]; n];
    for (row, item) in d.iter_mut().enumerate() {
        item[row] = 0;
    }
    for (u, v) in g.edges() {
        d[u as usize][v as usize] = 1;
        d[v as usize][u as usize] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].saturating_add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sparsify_final_states_are_engine_independent(
        n in 8usize..56,
        p in 0.0f64..0.3,
        seed in 0u64..10_000,
        f in prop::sample::select(vec![4.0, 8.0, 16.0]),
    ) {
        let g = gen_graph(&GenModel::Gnp { n, p }, seed).unwrap();
        let tape = RandomTape::new(seed, n);
        let reference = deg_ordered_sparsify(&g, f, 3.0, &Engine::Congest, &tape).unwrap();
        for planner in [Planner::V1, Planner::V2] {
            let engine = mpc_engine(planner, 0.8, None);
            let run = deg_ordered_sparsify(&g, f, 3.0, &engine, &tape).unwrap();
            prop_assert_eq!(&run.run.states, &reference.run.states);
            prop_assert_eq!(&run.set, &reference.set);
            prop_assert_eq!(run.run.rounds_executed, reference.run.rounds_executed);
            prop_assert!(run.run.metrics.audit_pass);
        }
    }

    #[test]
    fn shatter_final_states_are_engine_independent(
        n in 8usize..56,
        p in 0.0f64..0.3,
        seed in 0u64..10_000,
    ) {
        let g = gen_graph(&GenModel::Gnp { n, p }, seed).unwrap();
        let tape = RandomTape::new(seed, n);
        let reference = shatter(&g, None, 1.0, &Engine::Congest, &tape).unwrap();
        for planner in [Planner::V1, Planner::V2] {
            let engine = mpc_engine(planner, 0.8, None);
            let run = shatter(&g, None, 1.0, &engine, &tape).unwrap();
            prop_assert_eq!(&run.run.states, &reference.run.states);
            prop_assert_eq!(&run.independent, &reference.independent);
            prop_assert_eq!(&run.residual, &reference.residual);
            prop_assert!(run.run.metrics.audit_pass);
        }
    }

    #[test]
    fn ball_membership_matches_the_distance_matrix(
        n in 2usize..36,
        p in 0.0f64..0.4,
        seed in 0u64..10_000,
        radius in 0u32..4,
        mark_bits in prop::collection::vec(any::<bool>(), 36),
    ) {
        let g = gen_graph(&GenModel::Gnp { n, p }, seed).unwrap();
        let marked: Vec<bool> = (0..n).map(|v| mark_bits[v]).collect();
        let dist = distance_matrix(&g);
        for center in 0..n as NodeId {
            let got = ball_membership(&g, center, radius, &marked);
            let mut want: Vec<(NodeId, u32)> = (0..n)
                .filter(|&v| {
                    let d = dist[center as usize][v];
                    v != center as usize && marked[v] && d <= radius
                })
                .map(|v| (v as NodeId, dist[center as usize][v]))
                .collect();
            want.push((center, 0));
            want.sort_unstable();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn marked_source_sweep_matches_the_distance_matrix(
        n in 2usize..32,
        p in 0.0f64..0.4,
        seed in 0u64..10_000,
        radius in 1u32..4,
        bits in prop::collection::vec(any::<bool>(), 64),
    ) {
        let g = gen_graph(&GenModel::Gnp { n, p }, seed).unwrap();
        let marked: Vec<NodeId> = (0..n as NodeId).filter(|&v| bits[v as usize]).collect();
        let centers: Vec<NodeId> = (0..n as NodeId).filter(|&v| bits[32 + v as usize]).collect();
        let mut center_index = vec![None; n];
        for (i, &c) in centers.iter().enumerate() {
            center_index[c as usize] = Some(i as u32);
        }
        let drafts =
            sweep_marked_sources(&g, &center_index, &centers, &marked, radius, u64::MAX)
                .expect("unbounded sweep cannot run out of budget");
        let dist = distance_matrix(&g);
        for (i, &c) in centers.iter().enumerate() {
            let mut got = drafts.lists[i].clone();
            got.sort_unstable();
            // a marked center never lists itself; assembly adds centers
            let mut want: Vec<(NodeId, u32)> = marked
                .iter()
                .filter(|&&u| u != c && dist[c as usize][u as usize] <= radius)
                .map(|&u| (u, dist[c as usize][u as usize]))
                .collect();
            want.sort_unstable();
            prop_assert_eq!(got, want);
        }
    }

    #[test]
    fn independence_verdict_equals_an_edge_scan(
        n in 2usize..200,
        p in 0.0f64..0.1,
        seed in 0u64..10_000,
        bits in prop::collection::vec(any::<bool>(), 200),
    ) {
        let g = gen_graph(&GenModel::Gnp { n, p }, seed).unwrap();
        let set: Vec<NodeId> = (0..n as NodeId).filter(|&v| bits[v as usize]).collect();
        let in_set: Vec<bool> = (0..n).map(|v| bits[v]).collect();
        let scan_clean = g.edges().into_iter().all(|(u, v)| {
            !(in_set[u as usize] && in_set[v as usize])
        });
        prop_assert_eq!(verify_independent(&g, &set).pass, scan_clean);
    }
}

#[test]
fn forced_phase_lengths_never_change_sparsify_results() {
    let g = gen_graph(&GenModel::Gnp { n: 120, p: 0.05 }, 7).unwrap();
    let tape = RandomTape::new(7, 120);
    let reference = deg_ordered_sparsify(&g, 8.0, 3.0, &Engine::Congest, &tape).unwrap();
    for planner in [Planner::V1, Planner::V2] {
        for ell in 1..=3 {
            let engine = mpc_engine(planner, 0.5, Some(ell));
            let run = deg_ordered_sparsify(&g, 8.0, 3.0, &engine, &tape).unwrap();
            assert_eq!(run.run.states, reference.run.states, "ell = {ell}");
            assert!(run.run.metrics.audit_pass, "ell = {ell}");
        }
    }
}

#[test]
fn forced_phase_lengths_never_change_shatter_results() {
    let g = gen_graph(&GenModel::RandomRegular { n: 150, d: 6 }, 3).unwrap();
    let tape = RandomTape::new(3, 150);
    let reference = shatter(&g, None, 1.0, &Engine::Congest, &tape).unwrap();
    for planner in [Planner::V1, Planner::V2] {
        for ell in 1..=3 {
            let engine = mpc_engine(planner, 0.5, Some(ell));
            let run = shatter(&g, None, 1.0, &engine, &tape).unwrap();
            assert_eq!(run.run.states, reference.run.states, "ell = {ell}");
        }
    }
}

#[test]
fn single_round_fast_forward_equals_direct_delivery() {
    // ℓ = 1 compression must degenerate to exactly the per-round semantics
    let g = gen_graph(&GenModel::Gnp { n: 90, p: 0.06 }, 11).unwrap();
    let tape = RandomTape::new(11, 90);
    let forced = deg_ordered_sparsify(&g, 8.0, 3.0, &mpc_engine(Planner::V1, 0.6, Some(1)), &tape)
        .unwrap();
    let direct = deg_ordered_sparsify(&g, 8.0, 3.0, &direct_engine(0.6), &tape).unwrap();
    assert_eq!(forced.run.states, direct.run.states);
    assert_eq!(forced.set, direct.set);
}

#[test]
fn luby_agrees_across_engines_and_phase_lengths() {
    let g = gen_graph(&GenModel::Gnp { n: 100, p: 0.07 }, 19).unwrap();
    let tape = RandomTape::new(19, 100);
    let reference = luby_mis(&g, &Engine::Congest, &tape).unwrap();
    for engine in [
        mpc_engine(Planner::V1, 0.6, None),
        mpc_engine(Planner::V2, 0.6, None),
        mpc_engine(Planner::V1, 0.6, Some(2)),
        direct_engine(0.6),
    ] {
        let run = luby_mis(&g, &engine, &tape).unwrap();
        assert_eq!(run.set, reference.set);
        assert_eq!(run.run.rounds_executed, reference.run.rounds_executed);
    }
}

#[test]
fn edgeless_graphs_run_identically_on_every_engine() {
    // Degree-0 nodes trip the degenerate corners at once: Δ = 0 zeroes the
    // sparsify heavy threshold, every estimator must report silence, and no
    // fabric traffic may be charged for beeps that reach nobody.
    let g = gen_graph(&GenModel::Gnp { n: 8, p: 0.0 }, 0).unwrap();
    let tape = RandomTape::new(0, 8);
    let sp_ref = deg_ordered_sparsify(&g, 4.0, 3.0, &Engine::Congest, &tape).unwrap();
    let sh_ref = shatter(&g, None, 1.0, &Engine::Congest, &tape).unwrap();
    let mis_ref = luby_mis(&g, &Engine::Congest, &tape).unwrap();
    assert!(sp_ref.run.states.iter().all(|s| s.joined));
    for engine in [
        mpc_engine(Planner::V1, 0.8, None),
        mpc_engine(Planner::V2, 0.8, None),
        direct_engine(0.8),
    ] {
        let sp = deg_ordered_sparsify(&g, 4.0, 3.0, &engine, &tape).unwrap();
        assert_eq!(sp.run.states, sp_ref.run.states);
        assert!(sp.run.metrics.audit_pass);
        let sh = shatter(&g, None, 1.0, &engine, &tape).unwrap();
        assert_eq!(sh.run.states, sh_ref.run.states);
        let mis = luby_mis(&g, &engine, &tape).unwrap();
        assert_eq!(mis.set, mis_ref.set);
    }
}

#[test]
fn marks_cover_every_sender_the_reference_run_sees() {
    // |marked(t)| bounds the number of nodes that actually send in round t:
    // the mark coupling can only over-approximate the coin outcomes.
    let g = gen_graph(&GenModel::Gnp { n: 100, p: 0.05 }, 23).unwrap();
    let tape = RandomTape::new(23, 100);
    let prog = SparsifyProgram::new(&g, 8.0, 3.0).unwrap();
    let total = prog.total_rounds().unwrap();
    let full = run_congest(&g, &prog, &tape, total).unwrap();

    // each iteration is [exchange, heavy, join]; the sparse piece is the
    // two rounds after the exchange
    let mut iteration_start = 1;
    while iteration_start + 2 <= total {
        let snapshot = run_congest(&g, &prog, &tape, iteration_start).unwrap();
        let marks = compute_marks(
            &g,
            &prog,
            &tape,
            iteration_start + 1,
            2,
            &snapshot.states,
            &snapshot.statuses,
        )
        .unwrap();
        for t in 0..2u32 {
            let round = iteration_start + 1 + t;
            assert!(matches!(prog.round_kind(round), RoundKind::Sparse));
            let marked_now =
                marks.masks.iter().filter(|&&mask| mask & (1 << t) != 0).count() as u64;
            let sent = full.trace.rounds[round as usize - 1].senders;
            assert!(
                sent <= marked_now,
                "round {round}: {sent} senders but only {marked_now} marks"
            );
        }
        iteration_start += 3;
    }
}
