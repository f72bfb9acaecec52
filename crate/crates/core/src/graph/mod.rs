//! Undirected simple graphs and structural queries.
//!
//! Nodes are `0..n`. Edges are stored once as `(u, v)` with `u < v`, sorted
//! lexicographically; adjacency lists are derived from them and kept sorted.

mod edgelist;
mod generators;

use std::collections::VecDeque;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub use edgelist::{parse_edge_list, write_edge_list};
pub use generators::{
    make_circulant, make_complete, make_erdos_renyi, make_path, make_star, make_watts_strogatz,
};

/// Largest node count for which dense matrices are materialized by default.
pub const DEFAULT_DENSE_CAP: usize = 2000;

/// An undirected simple graph.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    label: String,
}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints. `(u, v)` and `(v, u)` denote the same edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n == 0 {
            return Err(Error::InvalidSize("graph needs at least one node".into()));
        }
        let mut canon = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { node, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            canon.push((u.min(v), u.max(v)));
        }
        canon.sort_unstable();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in &canon {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(Self {
            n,
            edges: canon,
            adjacency,
            label: String::from("graph"),
        })
    }

    /// A graph with `n` nodes and no edges.
    pub fn empty(n: usize) -> Result<Self> {
        Self::from_edges(n, std::iter::empty())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Human-readable family label, e.g. `C_20({1,2,3})`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edge density `2M / (n(n-1))`; zero for a single node.
    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// First node with degree zero, if any.
    pub fn first_isolated_node(&self) -> Option<usize> {
        self.adjacency.iter().position(Vec::is_empty)
    }

    /// Returns a copy of this graph with one extra edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        if self.has_edge(u, v) {
            return Err(Error::EdgeExists(u.min(v), u.max(v)));
        }
        let mut edges = self.edges.clone();
        edges.push((u, v));
        Ok(Self::from_edges(self.n, edges)?.with_label(format!("{}+({u},{v})", self.label)))
    }

    /// Disjoint union; nodes of `other` are shifted by `self.node_count()`.
    pub fn disjoint_union(&self, other: &Graph) -> Self {
        let shift = self.n;
        let edges = self
            .edges
            .iter()
            .copied()
            .chain(other.edges.iter().map(|&(u, v)| (u + shift, v + shift)));
        Self::from_edges(self.n + other.n, edges)
            .expect("union of valid graphs is valid")
            .with_label(format!("{}+{}", self.label, other.label))
    }

    /// Dense 0/1 adjacency matrix, refused above [`DEFAULT_DENSE_CAP`] nodes.
    pub fn dense_adjacency(&self) -> Result<DMatrix<f64>> {
        self.dense_adjacency_capped(DEFAULT_DENSE_CAP)
    }

    pub fn dense_adjacency_capped(&self, cap: usize) -> Result<DMatrix<f64>> {
        if self.n > cap {
            return Err(Error::TooLarge { n: self.n, cap });
        }
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(u, v) in &self.edges {
            a[(u, v)] = 1.0;
            a[(v, u)] = 1.0;
        }
        Ok(a)
    }

    pub fn is_connected(&self) -> bool {
        connected_components(self).len() == 1
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("label", &self.label)
            .field("n", &self.n)
            .field("m", &self.edges.len())
            .finish()
    }
}

/// Step set `S` of a circulant graph `C_n(S)`: strictly increasing offsets in `1..=n/2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepSet(Vec<usize>);

impl StepSet {
    /// Validates `steps` for an `n`-node circulant. Order in the input does not matter.
    pub fn new(n: usize, steps: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut steps: Vec<usize> = steps.into_iter().collect();
        steps.sort_unstable();
        if steps.is_empty() {
            return Err(Error::InvalidStep("step set is empty".into()));
        }
        if steps.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidStep("repeated step".into()));
        }
        if steps[0] == 0 {
            return Err(Error::InvalidStep("steps must be positive".into()));
        }
        let max = *steps.last().unwrap();
        if max > n / 2 {
            return Err(Error::InvalidStep(format!(
                "step {max} exceeds floor({n}/2) = {}",
                n / 2
            )));
        }
        Ok(Self(steps))
    }

    /// The steps `{1, ..., k}` of a Watts-Strogatz skeleton.
    pub fn first_k(n: usize, k: usize) -> Result<Self> {
        Self::new(n, 1..=k)
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Common node degree of `C_n(S)`.
    pub fn degree(&self, n: usize) -> usize {
        let half = n.is_multiple_of(2) && self.0.contains(&(n / 2));
        2 * self.0.len() - usize::from(half)
    }
}

impl fmt::Display for StepSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Seed for the graph generators.
///
/// Streams come from ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64`), a
/// counter-based cipher generator. Sub-seeds for ensemble members are derived
/// with SplitMix64 so that each member gets an independent stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Deterministic child seed for ensemble member `index`.
    pub fn derive(self, index: u64) -> RngSeed {
        let mut z = self
            .0
            .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        RngSeed(z ^ (z >> 31))
    }
}

/// Connected components as sorted node lists, ordered by smallest member.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n];
    let mut components = Vec::new();
    for start in 0..g.n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut part = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    part.push(v);
                    queue.push_back(v);
                }
            }
        }
        part.sort_unstable();
        components.push(part);
    }
    components
}

/// Hop distances from `source`; `None` marks unreachable nodes.
pub fn bfs_distances(g: &Graph, source: usize) -> Result<Vec<Option<usize>>> {
    if source >= g.n {
        return Err(Error::NodeOutOfRange { node: source, n: g.n });
    }
    let mut dist = vec![None; g.n];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &v in g.neighbors(u) {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    Ok(dist)
}

/// Largest eccentricity; errors on disconnected graphs.
pub fn diameter(g: &Graph) -> Result<usize> {
    let mut best = 0;
    for s in 0..g.n {
        for d in bfs_distances(g, s)? {
            best = best.max(d.ok_or(Error::Disconnected)?);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert_eq!(Graph::from_edges(3, [(1, 1)]), Err(Error::SelfLoop(1)));
        assert_eq!(
            Graph::from_edges(3, [(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(Error::NodeOutOfRange { node: 3, n: 3 })
        ));
        assert!(Graph::empty(0).is_err());
    }

    #[test]
    fn components() {
        let k5 = make_complete(5).unwrap();
        assert_eq!(connected_components(&k5), vec![vec![0, 1, 2, 3, 4]]);
        let parts = connected_components(&two_triangles());
        assert_eq!(parts, vec![vec![0, 1, 2], vec![3, 4, 5]]);
        assert_eq!(connected_components(&make_path(10).unwrap()).len(), 1);
    }

    #[test]
    fn distances() {
        let p5 = make_path(5).unwrap();
        let d: Vec<_> = bfs_distances(&p5, 0).unwrap().into_iter().flatten().collect();
        assert_eq!(d, vec![0, 1, 2, 3, 4]);
        let k4 = make_complete(4).unwrap();
        for s in 0..4 {
            let d = bfs_distances(&k4, s).unwrap();
            assert_eq!(d.iter().filter(|x| **x == Some(1)).count(), 3);
            assert_eq!(d[s], Some(0));
        }
        assert!(bfs_distances(&k4, 4).is_err());
        let d = bfs_distances(&two_triangles(), 0).unwrap();
        assert_eq!(d[4], None);
    }

    #[test]
    fn diameters() {
        assert_eq!(diameter(&make_path(5).unwrap()).unwrap(), 4);
        for n in 2..8 {
            assert_eq!(diameter(&make_complete(n).unwrap()).unwrap(), 1);
        }
        let c = |s: &[usize]| {
            make_circulant(20, &StepSet::new(20, s.iter().copied()).unwrap()).unwrap()
        };
        assert_eq!(diameter(&c(&[1])).unwrap(), 10);
        assert_eq!(diameter(&c(&[1, 2])).unwrap(), 5);
        assert_eq!(diameter(&c(&[1, 2, 3])).unwrap(), 4);
        assert_eq!(diameter(&two_triangles()), Err(Error::Disconnected));
    }

    #[test]
    fn step_set_validation() {
        assert!(StepSet::new(20, [11]).is_err());
        assert!(StepSet::new(20, [10]).is_ok());
        assert!(StepSet::new(20, Vec::<usize>::new()).is_err());
        assert!(StepSet::new(20, [0, 1]).is_err());
        assert!(StepSet::new(20, [2, 2]).is_err());
        assert_eq!(StepSet::new(20, [3, 1]).unwrap().steps(), &[1, 3]);
        assert_eq!(StepSet::new(20, [1, 10]).unwrap().degree(20), 3);
        assert_eq!(StepSet::new(21, [1, 10]).unwrap().degree(21), 4);
    }

    #[test]
    fn with_edge_and_union() {
        let p3 = make_path(3).unwrap();
        assert_eq!(p3.with_edge(0, 1), Err(Error::EdgeExists(0, 1)));
        let k3 = p3.with_edge(2, 0).unwrap();
        assert_eq!(k3, make_complete(3).unwrap());
        let u = make_complete(3).unwrap().disjoint_union(&make_path(7).unwrap());
        assert_eq!(u.node_count(), 10);
        assert_eq!(u.edge_count(), 9);
        assert!(u.has_edge(3, 4));
        assert!(!u.is_connected());
    }

    #[test]
    fn derived_seeds_differ() {
        let base = RngSeed(7);
        let seeds: std::collections::HashSet<_> = (0..100).map(|i| base.derive(i)).collect();
        assert_eq!(seeds.len(), 100);
        assert_eq!(base.derive(3), RngSeed(7).derive(3));
    }
}
