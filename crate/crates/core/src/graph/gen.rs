//! Seeded graph generators. Same model + same seed = same graph, always.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::NodeId;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GenModel {
    Gnp { n: usize, p: f64 },
    RandomRegular { n: usize, d: u32 },
    Path { n: usize },
    Cycle { n: usize },
    Clique { n: usize },
    Star { n: usize },
    DisjointCliques { n: usize, k: usize },
}

impl GenModel {
    /// Short human-readable descriptor, used in run records and CSV output.
    pub fn describe(&self) -> String {
        match self {
            GenModel::Gnp { n, p } => format!("gnp(n={n},p={p})"),
            GenModel::RandomRegular { n, d } => format!("random_regular(n={n},d={d})"),
            GenModel::Path { n } => format!("path(n={n})"),
            GenModel::Cycle { n } => format!("cycle(n={n})"),
            GenModel::Clique { n } => format!("clique(n={n})"),
            GenModel::Star { n } => format!("star(n={n})"),
            GenModel::DisjointCliques { n, k } => format!("disjoint_cliques(n={n},k={k})"),
        }
    }
}

pub fn gen_graph(model: &GenModel, seed: u64) -> Result<Graph, GraphError> {
    match *model {
        GenModel::Gnp { n, p } => gnp(n, p, seed),
        GenModel::RandomRegular { n, d } => random_regular(n, d, seed),
        GenModel::Path { n } => {
            let edges: Vec<_> = (1..n).map(|v| ((v - 1) as NodeId, v as NodeId)).collect();
            Graph::from_edges(n, &edges)
        }
        GenModel::Cycle { n } => {
            if n < 3 {
                return Err(GraphError::BadParams(format!("cycle needs n >= 3, got {n}")));
            }
            let mut edges: Vec<_> = (1..n).map(|v| ((v - 1) as NodeId, v as NodeId)).collect();
            edges.push((0, (n - 1) as NodeId));
            Graph::from_edges(n, &edges)
        }
        GenModel::Clique { n } => {
            let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
            for u in 0..n {
                for v in (u + 1)..n {
                    edges.push((u as NodeId, v as NodeId));
                }
            }
            Graph::from_edges(n, &edges)
        }
        GenModel::Star { n } => {
            if n == 0 {
                return Err(GraphError::BadParams("star needs n >= 1".into()));
            }
            let edges: Vec<_> = (1..n).map(|v| (0 as NodeId, v as NodeId)).collect();
            Graph::from_edges(n, &edges)
        }
        GenModel::DisjointCliques { n, k } => {
            if k == 0 || n % k != 0 {
                return Err(GraphError::BadParams(format!(
                    "disjoint_cliques needs k >= 1 dividing n, got n={n} k={k}"
                )));
            }
            let size = n / k;
            let mut edges = Vec::new();
            for c in 0..k {
                let base = c * size;
                for u in 0..size {
                    for v in (u + 1)..size {
                        edges.push(((base + u) as NodeId, (base + v) as NodeId));
                    }
                }
            }
            Graph::from_edges(n, &edges)
        }
    }
}

/// G(n, p) by geometric skipping over the `n(n-1)/2` ordered pairs, so the
/// cost is proportional to the number of edges rather than pairs.
fn gnp(n: usize, p: f64, seed: u64) -> Result<Graph, GraphError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::BadParams(format!("gnp needs 0 <= p <= 1, got {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    if n < 2 || p == 0.0 {
        return Graph::from_edges(n, &edges);
    }
    if p >= 1.0 {
        return gen_graph(&GenModel::Clique { n }, seed);
    }
    let total_pairs = n as u64 * (n as u64 - 1) / 2;
    let ln_q = (1.0 - p).ln();
    // walk pair indices; (row u, index of first pair in row) tracked incrementally
    let mut idx: u64 = 0;
    let mut row: u64 = 0;
    let mut row_base: u64 = 0;
    let mut first = true;
    loop {
        let skip = {
            let u: f64 = rng.gen::<f64>();
            ((1.0 - u).ln() / ln_q).floor() as u64
        };
        idx = if first { skip } else { idx + 1 + skip };
        first = false;
        if idx >= total_pairs {
            break;
        }
        let mut row_len = n as u64 - 1 - row;
        while idx >= row_base + row_len {
            row_base += row_len;
            row += 1;
            row_len = n as u64 - 1 - row;
        }
        let col = row + 1 + (idx - row_base);
        edges.push((row as NodeId, col as NodeId));
    }
    Graph::from_edges(n, &edges)
}

/// Random d-regular graph via the pairing model with local 2-swap repair of
/// self-loops and duplicate edges. Deterministic under the seed.
fn random_regular(n: usize, d: u32, seed: u64) -> Result<Graph, GraphError> {
    let d = d as usize;
    if d >= n && !(d == 0 && n <= 1) {
        return Err(GraphError::BadParams(format!("random_regular needs d < n, got n={n} d={d}")));
    }
    if (n * d) % 2 != 0 {
        return Err(GraphError::BadParams(format!("random_regular needs n*d even, got n={n} d={d}")));
    }
    if d == 0 {
        return Graph::from_edges(n, &[]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<NodeId> = (0..n as NodeId).flat_map(|v| std::iter::repeat(v).take(d)).collect();

    for _attempt in 0..50 {
        // Fisher-Yates
        for i in (1..stubs.len()).rev() {
            let j = rng.gen_range(0..=i);
            stubs.swap(i, j);
        }
        let mut pairs: Vec<(NodeId, NodeId)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        if repair_pairing(&mut pairs, &mut rng) {
            let edges: Vec<(NodeId, NodeId)> = pairs
                .into_iter()
                .map(|(a, b)| if a < b { (a, b) } else { (b, a) })
                .collect();
            return Graph::from_edges(n, &edges);
        }
    }
    Err(GraphError::BadParams(format!(
        "random_regular(n={n}, d={d}) did not converge; parameters too tight"
    )))
}

/// Swap endpoints between bad pairs and random good pairs until the pairing
/// is a simple graph. Returns false if it stops making progress.
fn repair_pairing(pairs: &mut [(NodeId, NodeId)], rng: &mut ChaCha8Rng) -> bool {
    use std::collections::HashSet;
    let key = |a: NodeId, b: NodeId| if a < b { (a, b) } else { (b, a) };
    for _pass in 0..500 {
        let mut seen: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(pairs.len());
        let mut bad: Vec<usize> = Vec::new();
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if a == b || !seen.insert(key(a, b)) {
                bad.push(i);
            }
        }
        if bad.is_empty() {
            return true;
        }
        for &i in &bad {
            // swap second components with a random partner pair
            let j = rng.gen_range(0..pairs.len());
            if i == j {
                continue;
            }
            let (a, b) = pairs[i];
            let (c, dd) = pairs[j];
            // candidate: (a, dd), (c, b)
            if a != dd && c != b {
                pairs[i] = (a, dd);
                pairs[j] = (c, b);
            }
        }
    }
    false
}
