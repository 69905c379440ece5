//! Simple undirected graphs with dense ids and sorted adjacency.

mod gen;
mod io;

pub use gen::{gen_graph, GenModel};
pub use io::{load_graph, save_graph, ParseErrorKind};

use serde::Serialize;
use thiserror::Error;

use crate::NodeId;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("node id {id} out of range for n = {n}")]
    IdOutOfRange { id: u64, n: usize },
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("parse error at line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Undirected simple graph. Adjacency lists are sorted ascending and are
/// symmetric by construction; those two invariants are what the engines and
/// the verification oracles rely on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<Vec<NodeId>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self-loops, duplicates
    /// (in either orientation) and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Self, GraphError> {
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::IdOutOfRange { id: u as u64, n });
            }
            if v as usize >= n {
                return Err(GraphError::IdOutOfRange { id: v as u64, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for (u, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                let dup = list.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                let (a, b) = if (u as NodeId) < dup { (u as NodeId, dup) } else { (dup, u as NodeId) };
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { n, m: edges.len(), adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: NodeId) -> u32 {
        self.adj[v as usize].len() as u32
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> u32 {
        self.adj.iter().map(|l| l.len() as u32).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n as NodeId {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Induced subgraph on `nodes` (deduplicated, any order). Returns the
    /// subgraph plus the mapping from new ids to original ids; new ids
    /// preserve the relative order of the originals.
    pub fn induced_subgraph(&self, nodes: &[NodeId]) -> (Graph, Vec<NodeId>) {
        let mut keep: Vec<NodeId> = nodes.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut old_to_new: Vec<Option<NodeId>> = vec![None; self.n];
        for (new, &old) in keep.iter().enumerate() {
            old_to_new[old as usize] = Some(new as NodeId);
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); keep.len()];
        let mut m = 0usize;
        for (new, &old) in keep.iter().enumerate() {
            for &w in self.neighbors(old) {
                if let Some(nw) = old_to_new[w as usize] {
                    adj[new].push(nw);
                    if (new as NodeId) < nw {
                        m += 1;
                    }
                }
            }
        }
        // source adjacency is sorted and the id map is monotone, so each new
        // list is already sorted
        debug_assert!(adj.iter().all(|l| l.windows(2).all(|w| w[0] < w[1])));
        (Graph { n: keep.len(), m, adj }, keep)
    }

    /// Connected components as sorted lists of nodes, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        let mut queue = std::collections::VecDeque::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s as NodeId);
            let mut comp = Vec::new();
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in self.neighbors(u) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn stats(&self) -> GraphStats {
        let max_degree = self.max_degree();
        let mut histogram = vec![0usize; max_degree as usize + 1];
        for v in 0..self.n as NodeId {
            histogram[self.degree(v) as usize] += 1;
        }
        GraphStats {
            n: self.n,
            m: self.m,
            max_degree,
            degree_histogram: histogram,
            components: self.components().len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: u32,
    /// `degree_histogram[d]` = number of nodes of degree `d`; sums to `n`.
    pub degree_histogram: Vec<usize>,
    pub components: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, &[(0, 1), (1, 2)]).is_ok());
        assert!(matches!(
            Graph::from_edges(3, &[(0, 0)]),
            Err(GraphError::SelfLoop(0))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]),
            Err(GraphError::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::from_edges(3, &[(0, 3)]),
            Err(GraphError::IdOutOfRange { id: 3, n: 3 })
        ));
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::from_edges(5, &[(4, 0), (2, 1), (0, 2), (3, 0)]).unwrap();
        for u in 0..5u32 {
            assert!(g.neighbors(u).windows(2).all(|w| w[0] < w[1]));
            for &v in g.neighbors(u) {
                assert!(g.has_edge(v, u));
            }
        }
        assert_eq!(g.neighbors(0), &[2, 3, 4]);
    }

    #[test]
    fn degree_sum_is_twice_m() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        let sum: u32 = (0..6u32).map(|v| g.degree(v)).sum();
        assert_eq!(sum as usize, 2 * g.m());
    }

    #[test]
    fn induced_subgraph_matches_filter() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (0, 5), (1, 4)]).unwrap();
        let (sub, map) = g.induced_subgraph(&[4, 1, 2, 4]);
        assert_eq!(map, vec![1, 2, 4]);
        let expected: Vec<(u32, u32)> = vec![(0, 1), (0, 2)]; // edges (1,2) and (1,4)
        assert_eq!(sub.edges(), expected);

        // brute-force check: subgraph has edge iff original had one
        for (a, & old_a) in map.iter().enumerate() {
            for (b, &old_b) in map.iter().enumerate() {
                if a != b {
                    assert_eq!(sub.has_edge(a as u32, b as u32), g.has_edge(old_a, old_b));
                }
            }
        }
    }

    #[test]
    fn induced_subgraph_composes() {
        // taking S then T' inside it equals taking T = map(T') directly
        let g = Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (1, 5)]).unwrap();
        let s = [0u32, 1, 2, 4, 5, 6];
        let (g_s, map_s) = g.induced_subgraph(&s);
        let t_prime = [0u32, 1, 4, 5]; // ids within g_s
        let (g_t1, map_t1) = g_s.induced_subgraph(&t_prime);
        let t: Vec<u32> = t_prime.iter().map(|&x| map_s[x as usize]).collect();
        let (g_t2, map_t2) = g.induced_subgraph(&t);
        assert_eq!(g_t1, g_t2);
        let composed: Vec<u32> = map_t1.iter().map(|&x| map_s[x as usize]).collect();
        assert_eq!(composed, map_t2);
    }

    #[test]
    fn stats_on_star() {
        let g = gen_graph(&GenModel::Star { n: 8 }, 0).unwrap();
        let st = g.stats();
        assert_eq!(st.n, 8);
        assert_eq!(st.m, 7);
        assert_eq!(st.max_degree, 7);
        assert_eq!(st.degree_histogram[1], 7);
        assert_eq!(st.degree_histogram[7], 1);
        assert_eq!(st.degree_histogram.iter().sum::<usize>(), st.n);
        assert_eq!(st.components, 1);
    }

    #[test]
    fn components_on_disjoint_cliques() {
        let g = gen_graph(&GenModel::DisjointCliques { n: 12, k: 3 }, 1).unwrap();
        let comps = g.components();
        assert_eq!(comps.len(), 3);
        assert!(comps.iter().all(|c| c.len() == 4));
    }
}
