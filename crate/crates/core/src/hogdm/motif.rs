//! Motif-weighted graphs, subgraph-count graphs, and nested graphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPermutation};

/// Edge weights as a dense symmetric non-negative integer matrix.
pub type WeightMatrix = Vec<Vec<u64>>;

/// A base graph with one edge-weighted adjacency matrix per motif; the
/// weight of an edge counts the motif copies containing it and is zero on
/// non-edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifGraph {
    base: Graph,
    motifs: Vec<Graph>,
    weighted_adjacency: Vec<WeightMatrix>,
}

impl MotifGraph {
    pub fn new(base: Graph, motifs: Vec<Graph>, weighted_adjacency: Vec<WeightMatrix>) -> Result<Self> {
        if motifs.len() != weighted_adjacency.len() {
            return Err(Error::SizeMismatch {
                expected: motifs.len(),
                got: weighted_adjacency.len(),
            });
        }
        let n = base.n();
        for w in &weighted_adjacency {
            if w.len() != n || w.iter().any(|row| row.len() != n) {
                return Err(Error::SizeMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            for u in 0..n {
                for v in 0..n {
                    if w[u][v] != w[v][u] {
                        return Err(Error::InvalidDocument(format!(
                            "motif weights not symmetric at ({u}, {v})"
                        )));
                    }
                    if w[u][v] > 0 && !base.has_edge(u, v) {
                        return Err(Error::InvalidDocument(format!(
                            "motif weight on non-edge ({u}, {v})"
                        )));
                    }
                }
            }
        }
        Ok(MotifGraph {
            base,
            motifs,
            weighted_adjacency,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn motifs(&self) -> &[Graph] {
        &self.motifs
    }

    pub fn weights(&self) -> &[WeightMatrix] {
        &self.weighted_adjacency
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<MotifGraph> {
        let base = self.base.apply_permutation(p)?;
        let n = base.n();
        let weights: Vec<WeightMatrix> = self
            .weighted_adjacency
            .iter()
            .map(|w| {
                let mut out = vec![vec![0u64; n]; n];
                for u in 0..n {
                    for v in 0..n {
                        out[p.apply(u)][p.apply(v)] = w[u][v];
                    }
                }
                out
            })
            .collect();
        MotifGraph::new(base, self.motifs.clone(), weights)
    }
}

/// A base graph whose vertices (and optionally edges) carry integer vectors
/// of motif-participation counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphCountGraph {
    base: Graph,
    vertex_counts: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edge_counts: Vec<((usize, usize), Vec<u64>)>,
}

impl SubgraphCountGraph {
    pub fn new(base: Graph, vertex_counts: Vec<Vec<u64>>) -> Result<Self> {
        if vertex_counts.len() != base.n() {
            return Err(Error::SizeMismatch {
                expected: base.n(),
                got: vertex_counts.len(),
            });
        }
        Ok(SubgraphCountGraph {
            base,
            vertex_counts,
            edge_counts: Vec::new(),
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn vertex_counts(&self) -> &[Vec<u64>] {
        &self.vertex_counts
    }

    /// Count vectors as float features, for feeding the engine.
    pub fn counts_as_features(&self) -> Vec<Vec<f64>> {
        self.vertex_counts
            .iter()
            .map(|row| row.iter().map(|&c| c as f64).collect())
            .collect()
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<SubgraphCountGraph> {
        let base = self.base.apply_permutation(p)?;
        let mut counts = vec![Vec::new(); self.vertex_counts.len()];
        for (v, row) in self.vertex_counts.iter().enumerate() {
            counts[p.apply(v)] = row.clone();
        }
        SubgraphCountGraph::new(base, counts)
    }
}

/// An outer graph whose vertices each hold an inner graph (possibly empty).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NestedGraph {
    outer: Graph,
    inner: Vec<Graph>,
}

impl NestedGraph {
    pub fn new(outer: Graph, inner: Vec<Graph>) -> Result<Self> {
        if inner.len() != outer.n() {
            return Err(Error::SizeMismatch {
                expected: outer.n(),
                got: inner.len(),
            });
        }
        Ok(NestedGraph { outer, inner })
    }

    pub fn outer(&self) -> &Graph {
        &self.outer
    }

    pub fn inner(&self) -> &[Graph] {
        &self.inner
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<NestedGraph> {
        let outer = self.outer.apply_permutation(p)?;
        let mut inner = vec![Graph::new(0, &[])?; self.inner.len()];
        for (v, g) in self.inner.iter().enumerate() {
            inner[p.apply(v)] = g.clone();
        }
        NestedGraph::new(outer, inner)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph};

    #[test]
    fn motif_graph_checks_support() {
        let base = complete_graph(3);
        let w = vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]];
        assert!(MotifGraph::new(base.clone(), vec![complete_graph(3)], vec![w]).is_ok());
        let off_edge = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 0]];
        let p3 = path_graph(3);
        // weight on (0, 1) is fine for P3; weight on the chord (0, 2) is not
        assert!(MotifGraph::new(p3.clone(), vec![complete_graph(3)], vec![off_edge]).is_ok());
        let chord = vec![vec![0, 0, 1], vec![0, 0, 0], vec![1, 0, 0]];
        assert!(MotifGraph::new(p3, vec![complete_graph(3)], vec![chord]).is_err());
    }

    #[test]
    fn nested_requires_one_inner_per_vertex() {
        let outer = path_graph(2);
        assert!(NestedGraph::new(outer.clone(), vec![complete_graph(2)]).is_err());
        let ok = NestedGraph::new(outer, vec![complete_graph(2), Graph::new(0, &[]).unwrap()]);
        assert!(ok.is_ok());
    }
}
