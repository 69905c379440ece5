//! Balls: the per-center state a machine needs to fast-forward a phase.
//!
//! A ball for center `v` and radius `r` holds `v`, every node marked as a
//! potential sender within distance `r` of `v`, and (for staged runs) the
//! quiet neighbors `v` simulates on their behalf. Members carry their
//! state snapshot, mark bits, and pending inbox; the ball also stores the
//! edges induced among members, since the hosting machine cannot consult
//! the graph.

use crate::congest::{
    fold_messages, Coin, EngineError, NodeProgram, Outbox, RoundInput, RoundKind, Status,
};
use crate::graph::Graph;
use crate::randomness::RandomTape;
use crate::{NodeId, Round};

/// Per-member header shipped alongside the state: node id, distance/mark
/// word, and pending-inbox length.
pub const MEMBER_HEADER_WORDS: u64 = 3;

#[derive(Clone, Debug)]
pub struct BallMember {
    pub node: NodeId,
    /// Distance from the center in the underlying graph.
    pub dist: u32,
    /// Marked members may send during the phase; everyone else (including
    /// an unmarked center) is simulated but must stay silent.
    pub acting: bool,
}

#[derive(Clone, Debug)]
pub struct Ball {
    pub center: NodeId,
    pub radius: u32,
    /// Sorted by node id; contains the center.
    pub members: Vec<BallMember>,
    /// Induced adjacency, as indices into `members`.
    pub adj: Vec<Vec<u32>>,
    /// Words to ship: member entries plus induced edge endpoints.
    pub words: u64,
    /// Members allowed to send — the size the activity bound constrains.
    pub acting_count: u32,
}

impl Ball {
    pub fn member_index(&self, node: NodeId) -> Option<usize> {
        self.members.binary_search_by_key(&node, |m| m.node).ok()
    }
}

/// Reference membership rule: the center plus every marked node within
/// `radius` hops. Distances are graph distances, marked or not.
pub fn ball_membership(
    g: &Graph,
    center: NodeId,
    radius: u32,
    marked: &[bool],
) -> Vec<(NodeId, u32)> {
    let mut dist = vec![u32::MAX; g.n()];
    let mut queue = std::collections::VecDeque::new();
    dist[center as usize] = 0;
    queue.push_back(center);
    let mut out = vec![(center, 0)];
    while let Some(u) = queue.pop_front() {
        let d = dist[u as usize];
        if d == radius {
            continue;
        }
        for &w in g.neighbors(u) {
            if dist[w as usize] == u32::MAX {
                dist[w as usize] = d + 1;
                if marked[w as usize] && w != center {
                    out.push((w, d + 1));
                }
                queue.push_back(w);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Draft membership lists produced by the marked-source sweep, before
/// adoption and edge induction.
pub struct BallDrafts {
    /// Parallel to the centers list handed in: (node, dist) pairs.
    pub lists: Vec<Vec<(NodeId, u32)>>,
}

/// Computes, for every center, the marked nodes within `radius`, by
/// breadth-first search from each marked node. Returns `None` when the
/// sweep exceeds `ops_budget` edge traversals, which callers treat as
/// "too dense to compress".
pub fn sweep_marked_sources(
    g: &Graph,
    center_index: &[Option<u32>],
    centers: &[NodeId],
    marked: &[NodeId],
    radius: u32,
    mut ops_budget: u64,
) -> Option<BallDrafts> {
    let mut lists: Vec<Vec<(NodeId, u32)>> = vec![Vec::new(); centers.len()];
    let mut stamp = vec![0u32; g.n()];
    let mut dist = vec![0u32; g.n()];
    let mut queue = std::collections::VecDeque::new();
    let mut epoch = 0u32;
    for &u in marked {
        epoch += 1;
        stamp[u as usize] = epoch;
        dist[u as usize] = 0;
        queue.clear();
        queue.push_back(u);
        while let Some(x) = queue.pop_front() {
            let d = dist[x as usize];
            if let Some(ci) = center_index[x as usize] {
                if x != u {
                    lists[ci as usize].push((u, d));
                }
            }
            if d == radius {
                continue;
            }
            let deg = g.degree(x) as u64;
            if ops_budget < deg {
                return None;
            }
            ops_budget -= deg;
            for &w in g.neighbors(x) {
                if stamp[w as usize] != epoch {
                    stamp[w as usize] = epoch;
                    dist[w as usize] = d + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    Some(BallDrafts { lists })
}

/// Assembles a ball from its membership list: sorts, dedupes, induces
/// edges, and totals the shipping cost. `entry_words[u]` is the per-node
/// payload (state + pending inbox); the induced edges cost one word per
/// directed slot.
pub fn assemble_ball(
    g: &Graph,
    center: NodeId,
    radius: u32,
    mut entries: Vec<(NodeId, u32, bool)>,
    entry_words: &[u64],
) -> Ball {
    entries.sort_unstable_by_key(|e| e.0);
    entries.dedup_by_key(|e| e.0);
    let members: Vec<BallMember> = entries
        .iter()
        .map(|&(node, dist, acting)| BallMember { node, dist, acting })
        .collect();
    let index: std::collections::HashMap<NodeId, u32> = members
        .iter()
        .enumerate()
        .map(|(i, m)| (m.node, i as u32))
        .collect();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); members.len()];
    let mut edge_slots = 0u64;
    for (i, m) in members.iter().enumerate() {
        // induce by scanning the sparser side: the member's true adjacency
        for &w in g.neighbors(m.node) {
            if let Some(&j) = index.get(&w) {
                adj[i].push(j);
                edge_slots += 1;
            }
        }
    }
    let mut words = edge_slots;
    let mut acting_count = 0;
    for m in &members {
        words += MEMBER_HEADER_WORDS + entry_words[m.node as usize];
        if m.acting {
            acting_count += 1;
        }
    }
    Ball { center, radius, members, adj, words, acting_count }
}

/// Result of fast-forwarding one ball. `outputs[i]` is `Some` exactly when
/// member `i` was advanced through the whole phase.
pub struct FastForward<S> {
    pub outputs: Vec<Option<(S, Status)>>,
    /// What each fully-advanced member emitted in the phase's last round.
    /// These wires escape the ball: the host ships them back to the
    /// member's primary, which knows the actual receivers.
    pub final_sends: Vec<Option<Outbox>>,
}

/// Replays `len` rounds starting at `first_round` inside the ball. Member
/// `x` is stepped for `min(len, radius - dist(x))` rounds — exactly as far
/// as its inputs are provably complete. Any send by a member without its
/// mark bit for that round aborts the run: the marking estimator failed.
#[allow(clippy::too_many_arguments)]
pub fn fast_forward<P: NodeProgram>(
    ball: &Ball,
    prog: &P,
    tape: &RandomTape,
    first_round: Round,
    len: Round,
    states: Vec<P::State>,
    statuses: Vec<Status>,
    pending: Vec<Vec<(NodeId, u64)>>,
    marks: &[u64],
) -> Result<FastForward<P::State>, EngineError> {
    let k = ball.members.len();
    debug_assert_eq!(states.len(), k);
    let mut states = states;
    let mut statuses = statuses;
    let mut inboxes = pending;
    let mut final_sends: Vec<Option<Outbox>> = vec![None; k];
    let mut next: Vec<Vec<(NodeId, u64)>> = vec![Vec::new(); k];
    for t in 0..len {
        let round = first_round + t;
        debug_assert!(
            matches!(prog.round_kind(round), RoundKind::Sparse),
            "balls only fast-forward sparse rounds"
        );
        let digest_specs = prog.inbox_digest(round);
        for v in &mut next {
            v.clear();
        }
        let last = t + 1 == len;
        for (i, m) in ball.members.iter().enumerate() {
            let budget = len.min(ball.radius - m.dist);
            if t >= budget || statuses[i] == Status::Halted {
                continue;
            }
            inboxes[i].sort_unstable_by_key(|&(src, _)| src);
            let folded;
            let input = match &digest_specs {
                Some(specs) => {
                    folded = fold_messages(specs, &inboxes[i]);
                    RoundInput::Digest(&folded)
                }
                None => RoundInput::Raw(&inboxes[i]),
            };
            let coin = Coin::new(tape, m.node, round);
            let out = prog.step(m.node, round, &states[i], &input, &coin);
            states[i] = out.state;
            statuses[i] = out.status;
            let sent = match &out.outbox {
                Outbox::Silent => false,
                Outbox::Broadcast { .. } => true,
                Outbox::Unicast(list) => !list.is_empty(),
            };
            if sent && marks[i] & (1 << t) == 0 {
                return Err(EngineError::UnsoundSend { node: m.node, round });
            }
            if last {
                if budget >= len {
                    final_sends[i] = Some(out.outbox);
                }
            } else {
                match out.outbox {
                    Outbox::Silent => {}
                    Outbox::Broadcast { payload, .. } => {
                        for &j in &ball.adj[i] {
                            next[j as usize].push((m.node, payload));
                        }
                    }
                    Outbox::Unicast(list) => {
                        for (dst, payload, _) in list {
                            if let Some(j) = ball.member_index(dst) {
                                next[j].push((m.node, payload));
                            }
                        }
                    }
                }
            }
        }
        std::mem::swap(&mut inboxes, &mut next);
    }
    let outputs = ball
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            if len.min(ball.radius - m.dist) >= len {
                Some((states[i].clone(), statuses[i]))
            } else {
                None
            }
        })
        .collect();
    Ok(FastForward { outputs, final_sends })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{gen_graph, GenModel};

    #[test]
    fn membership_is_center_plus_nearby_marked() {
        let g = gen_graph(&GenModel::Path { n: 5 }, 1).unwrap();
        let mut marked = vec![false; 5];
        marked[2] = true;
        let ball = ball_membership(&g, 0, 2, &marked);
        assert_eq!(ball, vec![(0, 0), (2, 2)]);
        let ball = ball_membership(&g, 0, 1, &marked);
        assert_eq!(ball, vec![(0, 0)]);
        marked[1] = true;
        let ball = ball_membership(&g, 3, 2, &marked);
        assert_eq!(ball, vec![(1, 2), (2, 1), (3, 0)]);
    }

    #[test]
    fn sweep_agrees_with_per_center_search() {
        let g = gen_graph(&GenModel::Gnp { n: 200, p: 0.03 }, 7).unwrap();
        let marked_flags: Vec<bool> = (0..200).map(|u| u % 5 == 0).collect();
        let marked: Vec<NodeId> =
            (0..200u32).filter(|&u| marked_flags[u as usize]).collect();
        let centers: Vec<NodeId> = (0..200u32).step_by(3).collect();
        let mut center_index = vec![None; 200];
        for (i, &c) in centers.iter().enumerate() {
            center_index[c as usize] = Some(i as u32);
        }
        let drafts =
            sweep_marked_sources(&g, &center_index, &centers, &marked, 2, u64::MAX).unwrap();
        for (i, &c) in centers.iter().enumerate() {
            let mut want = ball_membership(&g, c, 2, &marked_flags);
            want.retain(|&(u, _)| u != c);
            let mut got = drafts.lists[i].clone();
            got.sort_unstable();
            assert_eq!(got, want, "center {c}");
        }
    }

    #[test]
    fn sweep_respects_its_ops_budget() {
        let g = gen_graph(&GenModel::Clique { n: 50 }, 1).unwrap();
        let marked: Vec<NodeId> = (0..50).collect();
        let centers: Vec<NodeId> = vec![0];
        let center_index: Vec<Option<u32>> =
            (0..50).map(|u| if u == 0 { Some(0) } else { None }).collect();
        assert!(sweep_marked_sources(&g, &center_index, &centers, &marked, 2, 10).is_none());
        assert!(sweep_marked_sources(&g, &center_index, &centers, &marked, 2, u64::MAX).is_some());
    }

    #[test]
    fn assembled_ball_prices_members_and_edges() {
        let g = gen_graph(&GenModel::Path { n: 4 }, 1).unwrap();
        // members 1,2 adjacent; 0 header=3 + entry words
        let entries = vec![(1u32, 0, true), (2u32, 1, false)];
        let entry_words = vec![2u64; 4];
        let ball = assemble_ball(&g, 1, 1, entries, &entry_words);
        assert_eq!(ball.members.len(), 2);
        assert_eq!(ball.acting_count, 1);
        // two entries of (3 + 2) plus two directed edge slots
        assert_eq!(ball.words, 12);
        assert_eq!(ball.adj[0], vec![1]);
        assert_eq!(ball.adj[1], vec![0]);
    }
}
