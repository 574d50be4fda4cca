//! Finite directed graphs: the combinatorial core of a topological Markov
//! shift. Every vertex must have at least one outgoing and one ingoing edge,
//! and the vertex order given at construction fixes the canonical order used
//! by every enumeration in the crate.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeSet, HashMap};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Index of a vertex in the graph's canonical order.
pub type VertexId = u32;

/// A finite directed graph over labelled vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, VertexId>,
    /// Outgoing neighbours per vertex, sorted ascending.
    out: Vec<Vec<VertexId>>,
    /// Ingoing neighbours per vertex, sorted ascending.
    into: Vec<Vec<VertexId>>,
    edges: BTreeSet<(VertexId, VertexId)>,
    fingerprint: u64,
}

impl Graph {
    /// Validate a raw vertex/edge description and build the graph.
    ///
    /// Rejects duplicate labels, edges with unknown endpoints, and vertices
    /// missing an outgoing or ingoing edge (the standing assumption that
    /// every vertex continues both ways).
    pub fn new<S: AsRef<str>>(vertices: &[S], edge_pairs: &[(S, S)]) -> Result<Graph> {
        let mut labels = Vec::with_capacity(vertices.len());
        let mut index = HashMap::new();
        for v in vertices {
            let label = v.as_ref().to_string();
            if index.insert(label.clone(), labels.len() as VertexId).is_some() {
                return Err(Error::DuplicateVertex(label));
            }
            labels.push(label);
        }
        if labels.is_empty() {
            return Err(Error::Parse("graph has no vertices".into()));
        }
        let mut edges = BTreeSet::new();
        for (u, v) in edge_pairs {
            let ui = *index
                .get(u.as_ref())
                .ok_or_else(|| Error::UnknownEndpoint(u.as_ref().to_string()))?;
            let vi = *index
                .get(v.as_ref())
                .ok_or_else(|| Error::UnknownEndpoint(v.as_ref().to_string()))?;
            edges.insert((ui, vi));
        }
        let n = labels.len();
        let mut out = vec![Vec::new(); n];
        let mut into = vec![Vec::new(); n];
        for &(u, v) in &edges {
            out[u as usize].push(v);
            into[v as usize].push(u);
        }
        for v in 0..n {
            if out[v].is_empty() {
                return Err(Error::DanglingVertex(labels[v].clone(), "outgoing"));
            }
        }
        for v in 0..n {
            if into[v].is_empty() {
                return Err(Error::DanglingVertex(labels[v].clone(), "ingoing"));
            }
        }
        let mut hasher = DefaultHasher::new();
        labels.hash(&mut hasher);
        edges.hash(&mut hasher);
        Ok(Graph {
            labels,
            index,
            out,
            into,
            edges,
            fingerprint: hasher.finish(),
        })
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Number of edges.
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Canonical vertex labels in construction order.
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Label of one vertex.
    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v as usize]
    }

    /// Look a label up.
    pub fn vertex(&self, label: &str) -> Option<VertexId> {
        self.index.get(label).copied()
    }

    /// Sorted outgoing neighbours.
    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out[v as usize]
    }

    /// Sorted ingoing neighbours.
    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.into[v as usize]
    }

    /// Edge test.
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains(&(u, v))
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.iter().copied()
    }

    /// Cheap identity token used to detect cross-graph point mixing.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    /// Dense 0/1 adjacency matrix in canonical order.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.vertex_count();
        let mut a = vec![vec![0u8; n]; n];
        for &(u, v) in &self.edges {
            a[u as usize][v as usize] = 1;
        }
        a
    }

    /// True iff every adjacent pair of `word` is an edge.
    pub fn is_walk(&self, word: &[VertexId]) -> bool {
        word.windows(2).all(|w| self.has_edge(w[0], w[1]))
    }

    /// True iff `word` read cyclically is a closed walk.
    pub fn is_closed_walk(&self, word: &[VertexId]) -> bool {
        !word.is_empty() && self.is_walk(word) && self.has_edge(word[word.len() - 1], word[0])
    }

    /// Strong connectivity, which for a shift is topological transitivity.
    pub fn is_transitive(&self) -> bool {
        let n = self.vertex_count();
        let reach = |adj: &Vec<Vec<VertexId>>| -> bool {
            let mut seen = vec![false; n];
            let mut stack = vec![0 as VertexId];
            seen[0] = true;
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &w in &adj[v as usize] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        count += 1;
                        stack.push(w);
                    }
                }
            }
            count == n
        };
        reach(&self.out) && reach(&self.into)
    }
}

/// Join block symbols into a target-graph label: plain concatenation when
/// every source label is one character, comma-separated otherwise.
pub(crate) fn join_block(labels: &[String], block: &[VertexId]) -> String {
    let single = labels.iter().all(|l| l.chars().count() == 1);
    let parts: Vec<&str> = block.iter().map(|&v| labels[v as usize].as_str()).collect();
    if single {
        parts.concat()
    } else {
        parts.join(",")
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// Full 2-shift.
    pub fn g2() -> Graph {
        Graph::new(
            &["a", "b"],
            &[("a", "a"), ("a", "b"), ("b", "a"), ("b", "b")],
        )
        .unwrap()
    }

    /// Golden-mean shift: forbids the word `bb`.
    pub fn gm() -> Graph {
        Graph::new(&["a", "b"], &[("a", "a"), ("a", "b"), ("b", "a")]).unwrap()
    }

    /// Two-cycle a -> b -> a.
    pub fn two_cycle() -> Graph {
        Graph::new(&["a", "b"], &[("a", "b"), ("b", "a")]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn builds_the_full_shift() {
        let g = g2();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 4);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn golden_mean_adjacency() {
        let g = gm();
        assert_eq!(g.adjacency(), vec![vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn rejects_dangling_vertices() {
        let err = Graph::new(&["a", "b"], &[("a", "b")]).unwrap_err();
        match err {
            Error::DanglingVertex(v, _) => assert_eq!(v, "b"),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_duplicates_and_unknown_endpoints() {
        assert!(matches!(
            Graph::new(&["a", "a"], &[("a", "a")]),
            Err(Error::DuplicateVertex(_))
        ));
        assert!(matches!(
            Graph::new(&["a"], &[("a", "c")]),
            Err(Error::UnknownEndpoint(_))
        ));
    }

    #[test]
    fn transitivity() {
        assert!(g2().is_transitive());
        assert!(gm().is_transitive());
        let disjoint = Graph::new(&["a", "b"], &[("a", "a"), ("b", "b")]).unwrap();
        assert!(!disjoint.is_transitive());
    }
}
