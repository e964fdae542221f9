use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::rng;

/// G(n, p): each of the `n(n-1)/2` pairs becomes an undirected unit-weight
/// edge independently with probability `p`.
pub fn generate_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::Invalid("Erdős–Rényi graph needs n >= 1".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = rng::stream(seed, &[n as u64]);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::from_edges(n, false, edges)
}

pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(Error::Invalid("a cycle needs at least 3 nodes".into()));
    }
    let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
    Graph::undirected(n, &edges)
}

pub fn complete(n: usize) -> Result<Graph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            edges.push((u, v));
        }
    }
    Graph::undirected(n, &edges)
}

pub fn path(n: usize) -> Result<Graph> {
    let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
    Graph::undirected(n, &edges)
}

/// Star with center 0 and one leaf per weight.
pub fn star(weights: &[f64]) -> Result<Graph> {
    Graph::from_edges(
        weights.len() + 1,
        false,
        weights.iter().enumerate().map(|(i, &w)| (0, i + 1, w)),
    )
}
