use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, RngSeed, StepSet};
use crate::error::{Error, Result};

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidSize("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// Complete graph `K_n`.
pub fn make_complete(n: usize) -> Result<Graph> {
    check_size(n)?;
    let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
    Ok(Graph::from_edges(n, edges)?.with_label(format!("K_{n}")))
}

/// Path graph `P_n` with edges `(i, i + 1)`.
pub fn make_path(n: usize) -> Result<Graph> {
    check_size(n)?;
    let edges = (1..n).map(|i| (i - 1, i));
    Ok(Graph::from_edges(n, edges)?.with_label(format!("P_{n}")))
}

/// Star with one center (node 0) and `leaves` leaves.
pub fn make_star(leaves: usize) -> Result<Graph> {
    Ok(Graph::from_edges(leaves + 1, (1..=leaves).map(|j| (0, j)))?.with_label(format!("S_{leaves}")))
}

/// Circulant graph `C_n(S)`: `i ~ j` iff `j - i ≡ ±s (mod n)` for some `s ∈ S`.
pub fn make_circulant(n: usize, steps: &StepSet) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidSize("circulant graph needs n >= 2".into()));
    }
    // Revalidate: the step set may have been built for another n.
    let steps = StepSet::new(n, steps.steps().iter().copied())?;
    let mut edges = BTreeSet::new();
    for i in 0..n {
        for &s in steps.steps() {
            let j = (i + s) % n;
            edges.insert((i.min(j), i.max(j)));
        }
    }
    Ok(Graph::from_edges(n, edges)?.with_label(format!("C_{n}({steps})")))
}

/// Erdős–Rényi `G(n, p)`: each pair `i < j` is visited in lexicographic order
/// and kept when a uniform draw falls below `p`.
pub fn make_erdos_renyi(n: usize, p: f64, seed: RngSeed) -> Result<Graph> {
    check_size(n)?;
    check_probability(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    Ok(Graph::from_edges(n, edges)?.with_label(format!("ER({n},{p})")))
}

/// Watts–Strogatz graph on the skeleton `C_n({1..k})`.
///
/// Skeleton edges are visited in sorted order. Each is rewired with
/// probability `p`: the lower endpoint is kept and the other one is drawn
/// uniformly among nodes that would create neither a self-loop nor a
/// duplicate. If no such node exists the edge stays as it is.
pub fn make_watts_strogatz(n: usize, k: usize, p: f64, seed: RngSeed) -> Result<Graph> {
    check_probability(p)?;
    if n < 3 || k == 0 || k > (n - 1) / 2 {
        return Err(Error::InvalidParameter(format!(
            "Watts-Strogatz needs 1 <= k <= floor((n-1)/2), got n={n}, k={k}"
        )));
    }
    let skeleton = make_circulant(n, &StepSet::first_k(n, k)?)?;
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|i| skeleton.neighbors(i).iter().copied().collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut candidates = Vec::with_capacity(n);
    for &(u, v) in skeleton.edges() {
        if rng.random::<f64>() >= p {
            continue;
        }
        candidates.clear();
        candidates.extend((0..n).filter(|&w| w != u && !adj[u].contains(&w)));
        if candidates.is_empty() {
            continue;
        }
        let w = candidates[rng.random_range(0..candidates.len())];
        adj[u].remove(&v);
        adj[v].remove(&u);
        adj[u].insert(w);
        adj[w].insert(u);
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, set)| set.iter().filter(move |&&w| w > u).map(move |&w| (u, w)));
    Ok(Graph::from_edges(n, edges)?.with_label(format!("WS({n},{k},{p})")))
}
