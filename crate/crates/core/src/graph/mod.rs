//! Graphs, graph collections, dataset ingestion and synthetic generators.

mod generate;
mod io;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use generate::{complete, cycle, generate_erdos_renyi, path, star};
pub use io::{load_collection, save_edge_list_dir, DatasetFormat};

/// A weighted arc `source -> target`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
}

/// Weighted directed multigraph with contiguous node ids `0..node_count`.
///
/// Undirected graphs are stored as symmetric arc sets: every edge `{u, v}`
/// becomes the two arcs `u -> v` and `v -> u` with the same weight. Arcs
/// are kept sorted by `(source, target)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    node_count: usize,
    arcs: Vec<Arc>,
    label: Option<usize>,
    directed: bool,
    self_loops_stripped: usize,
}

impl Graph {
    /// Build a graph from raw `(u, v, weight)` edges.
    ///
    /// Self-loops are dropped and counted. Repeated edges are collapsed,
    /// keeping the weight of the first occurrence; for undirected graphs
    /// `(u, v)` and `(v, u)` are the same edge.
    pub fn from_edges<I>(node_count: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if node_count == 0 {
            return Err(Error::Invalid("graph with zero nodes".into()));
        }
        let mut kept: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut self_loops = 0;
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::Invalid(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Invalid(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            if u == v {
                self_loops += 1;
                continue;
            }
            let key = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            kept.entry(key).or_insert(w);
        }

        let mut arcs = Vec::with_capacity(if directed { kept.len() } else { 2 * kept.len() });
        for (&(u, v), &w) in &kept {
            arcs.push(Arc {
                source: u,
                target: v,
                weight: w,
            });
            if !directed {
                arcs.push(Arc {
                    source: v,
                    target: u,
                    weight: w,
                });
            }
        }
        arcs.sort_by_key(|a| (a.source, a.target));

        Ok(Graph {
            node_count,
            arcs,
            label: None,
            directed,
            self_loops_stripped: self_loops,
        })
    }

    /// Undirected graph with unit weights.
    pub fn undirected(node_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::from_edges(node_count, false, edges.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn self_loops_stripped(&self) -> usize {
        self.self_loops_stripped
    }

    /// Number of edges: arcs for directed graphs, unordered pairs otherwise.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.arcs.len()
        } else {
            self.arcs.len() / 2
        }
    }

    /// Edges as given to [`Graph::from_edges`]: every arc for directed
    /// graphs, one `(u, v)` with `u < v` per undirected edge.
    pub fn edges(&self) -> impl Iterator<Item = &Arc> + '_ {
        let directed = self.directed;
        self.arcs.iter().filter(move |a| directed || a.source < a.target)
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for a in &self.arcs {
            deg[a.source] += 1;
        }
        deg
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count];
        for a in &self.arcs {
            deg[a.target] += 1;
        }
        deg
    }

    /// Nodes without any incident arc. They stay in the graph; embeddings
    /// never start walks from them.
    pub fn isolated_nodes(&self) -> Vec<usize> {
        let mut touched = vec![false; self.node_count];
        for a in &self.arcs {
            touched[a.source] = true;
            touched[a.target] = true;
        }
        (0..self.node_count).filter(|&u| !touched[u]).collect()
    }

    /// Relabel nodes: node `u` becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.node_count {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} nodes",
                perm.len(),
                self.node_count
            )));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Invalid("not a permutation".into()));
            }
        }
        let mut g = Self::from_edges(
            self.node_count,
            self.directed,
            self.edges().map(|a| (perm[a.source], perm[a.target], a.weight)),
        )?;
        g.label = self.label;
        Ok(g)
    }
}

/// Map raw labels to class ids by sorted order: numeric when every label
/// parses as an integer, lexicographic otherwise. Returns the id of every
/// label and the raw name of every id.
pub fn class_ids(raw_labels: &[String]) -> (Vec<usize>, Vec<String>) {
    let mut names: Vec<String> = raw_labels.to_vec();
    let numeric: Option<Vec<i64>> = names.iter().map(|s| s.parse().ok()).collect();
    if numeric.is_some() {
        names.sort_by_key(|s| s.parse::<i64>().unwrap());
    } else {
        names.sort();
    }
    names.dedup();
    let ids = raw_labels
        .iter()
        .map(|s| {
            names
                .binary_search_by(|c| cmp_labels(c, s, numeric.is_some()))
                .unwrap()
        })
        .collect();
    (ids, names)
}

fn cmp_labels(a: &str, b: &str, numeric: bool) -> std::cmp::Ordering {
    if numeric {
        a.parse::<i64>().unwrap().cmp(&b.parse::<i64>().unwrap())
    } else {
        a.cmp(b)
    }
}

/// An ordered, labelled set of graphs (one classification dataset).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphCollection {
    pub name: String,
    pub graphs: Vec<Graph>,
    /// Class id per graph, contiguous from 0.
    pub labels: Vec<usize>,
    /// Raw label string of each class id, as found in the input files.
    pub class_names: Vec<String>,
}

impl GraphCollection {
    /// Assemble a collection from graphs and raw labels. Raw labels are
    /// mapped to class ids by sorted order (numeric when all parse as
    /// integers, lexicographic otherwise).
    pub fn new(name: impl Into<String>, graphs: Vec<Graph>, raw_labels: &[String]) -> Result<Self> {
        if graphs.len() != raw_labels.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} graphs but {} labels",
                graphs.len(),
                raw_labels.len()
            )));
        }
        let (labels, class_names) = class_ids(raw_labels);
        let graphs = graphs
            .into_iter()
            .zip(&labels)
            .map(|(g, &l)| g.with_label(l))
            .collect();
        Ok(GraphCollection {
            name: name.into(),
            graphs,
            labels,
            class_names,
        })
    }

    /// Collection whose labels are already class ids.
    pub fn from_labeled(name: impl Into<String>, graphs: Vec<Graph>, labels: Vec<usize>) -> Result<Self> {
        let raw: Vec<String> = labels.iter().map(|l| l.to_string()).collect();
        Self::new(name, graphs, &raw)
    }

    pub fn len(&self) -> usize {
        self.graphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graphs.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn mean_node_count(&self) -> f64 {
        let total: usize = self.graphs.iter().map(Graph::node_count).sum();
        total as f64 / self.graphs.len().max(1) as f64
    }

    pub fn self_loops_stripped(&self) -> usize {
        self.graphs.iter().map(Graph::self_loops_stripped).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undirected_edges_are_symmetric_and_deduplicated() {
        let g = Graph::from_edges(3, false, vec![(0, 1, 1.0), (1, 0, 1.0), (1, 2, 2.0)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.arcs().len(), 4);
        for a in g.arcs() {
            assert!(g
                .arcs()
                .iter()
                .any(|b| b.source == a.target && b.target == a.source && b.weight == a.weight));
        }
    }

    #[test]
    fn self_loops_are_stripped_and_counted() {
        let g = Graph::from_edges(2, false, vec![(0, 0, 1.0), (0, 1, 1.0), (1, 1, 1.0)]).unwrap();
        assert_eq!(g.self_loops_stripped(), 2);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Graph::from_edges(0, false, vec![]).is_err());
        assert!(Graph::from_edges(2, false, vec![(0, 2, 1.0)]).is_err());
        assert!(Graph::from_edges(2, false, vec![(0, 1, 0.0)]).is_err());
        assert!(Graph::from_edges(2, false, vec![(0, 1, f64::NAN)]).is_err());
    }

    #[test]
    fn isolated_nodes_are_kept() {
        let g = Graph::undirected(4, &[(0, 1)]).unwrap();
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.isolated_nodes(), vec![2, 3]);
    }

    #[test]
    fn labels_are_made_contiguous() {
        let graphs = vec![Graph::undirected(2, &[(0, 1)]).unwrap(); 3];
        let raw = vec!["1".to_string(), "-1".to_string(), "1".to_string()];
        let c = GraphCollection::new("t", graphs, &raw).unwrap();
        assert_eq!(c.labels, vec![1, 0, 1]);
        assert_eq!(c.class_names, vec!["-1", "1"]);
        assert_eq!(c.graphs[1].label(), Some(0));
    }
}
