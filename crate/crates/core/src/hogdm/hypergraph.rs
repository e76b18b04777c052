//! Attributed hypergraphs and the simplicial-complex refinement.
//!
//! A hypergraph is a vertex count plus a set of distinct vertex subsets
//! (size >= 1), with optional features over vertices and hyperedges.
//! Hyperedges are stored sorted ascending and the list is kept in the
//! canonical order (size, then lexicographic member list), which fixes the
//! hyperedge ids used by features, incidence matrices, and serialization.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::entity::{EntityClass, EntityRef, FeatureMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPermutation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    hyperedges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "FeatureMap::is_empty")]
    features: FeatureMap,
}

/// Sorts member lists and puts the hyperedge list into canonical order.
fn canonicalize(hyperedges: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut edges: Vec<Vec<usize>> = hyperedges
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.sort_unstable();
            e
        })
        .collect();
    edges.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    edges
}

impl Hypergraph {
    pub fn new(n: usize, hyperedges: &[Vec<usize>]) -> Result<Self> {
        Self::with_features(n, hyperedges, FeatureMap::new())
    }

    pub fn with_features(n: usize, hyperedges: &[Vec<usize>], features: FeatureMap) -> Result<Self> {
        let edges = canonicalize(hyperedges);
        for e in &edges {
            if e.is_empty() {
                return Err(Error::InvalidDocument("empty hyperedge".into()));
            }
            for &v in e {
                if v >= n {
                    return Err(Error::OutOfRange { index: v, size: n });
                }
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidDocument(format!(
                    "hyperedge {e:?} repeats a vertex"
                )));
            }
        }
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidDocument("duplicate hyperedge".into()));
        }
        let hg = Hypergraph {
            n,
            hyperedges: edges,
            features,
        };
        hg.check_features()?;
        Ok(hg)
    }

    fn check_features(&self) -> Result<()> {
        let mut width: Option<usize> = None;
        for (e, v) in self.features.iter() {
            let in_range = match e.class {
                EntityClass::Vertex => e.id < self.n,
                EntityClass::Hyperedge => e.id < self.hyperedges.len(),
                _ => false,
            };
            if !in_range {
                return Err(Error::UnknownEntity(e.to_string()));
            }
            match width {
                None => width = Some(v.len()),
                Some(w) if w != v.len() => {
                    return Err(Error::FeatureWidthMismatch {
                        left: w,
                        right: v.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hyperedges(&self) -> &[Vec<usize>] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, id: usize) -> Option<&[usize]> {
        self.hyperedges.get(id).map(Vec::as_slice)
    }

    /// Canonical id of a hyperedge given by its member set.
    pub fn hyperedge_id(&self, members: &[usize]) -> Option<usize> {
        let mut key = members.to_vec();
        key.sort_unstable();
        self.hyperedges
            .binary_search_by(|e| (e.len(), e.as_slice()).cmp(&(key.len(), key.as_slice())))
            .ok()
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn set_feature(&mut self, entity: EntityRef, value: Vec<f64>) -> Result<()> {
        self.features.insert(entity, value);
        self.check_features()
    }

    /// Hyperedges incident on vertex `v`, as canonical ids.
    pub fn incident_hyperedges(&self, v: usize) -> Vec<usize> {
        self.hyperedges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.binary_search(&v).is_ok())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn vertex_degree(&self, v: usize) -> usize {
        self.incident_hyperedges(v).len()
    }

    /// Sum of hyperedge cardinalities (the incidence count).
    pub fn total_incidence(&self) -> usize {
        self.hyperedges.iter().map(Vec::len).sum()
    }

    /// `p`-node-sets: vertex singletons for `p = 0`, hyperedges of
    /// cardinality `p + 1` otherwise.
    pub fn p_node_sets(&self, p: usize) -> Vec<Vec<usize>> {
        if p == 0 {
            (0..self.n).map(|v| vec![v]).collect()
        } else {
            self.hyperedges
                .iter()
                .filter(|e| e.len() == p + 1)
                .cloned()
                .collect()
        }
    }

    /// Maximum `p` with a `p`-node-set present.
    pub fn dimension(&self) -> Result<usize> {
        if self.n == 0 {
            return Err(Error::EmptyStructure);
        }
        Ok(self
            .hyperedges
            .iter()
            .map(|e| e.len() - 1)
            .max()
            .unwrap_or(0))
    }

    /// Relabels vertices along `p`, re-canonicalizing hyperedge ids and
    /// carrying features.
    pub fn relabel(&self, p: &VertexPermutation) -> Result<Hypergraph> {
        if p.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: p.len(),
            });
        }
        let mapped: Vec<Vec<usize>> = self
            .hyperedges
            .iter()
            .map(|e| e.iter().map(|&v| p.apply(v)).collect())
            .collect();
        let out = Hypergraph::new(self.n, &mapped)?;
        let features = self.features.renamed(|e| match e.class {
            EntityClass::Vertex => Some(EntityRef::vertex(p.apply(e.id))),
            EntityClass::Hyperedge => {
                let members: Vec<usize> = self.hyperedges[e.id].iter().map(|&v| p.apply(v)).collect();
                out.hyperedge_id(&members).map(EntityRef::hyperedge)
            }
            _ => None,
        });
        Hypergraph::with_features(self.n, &mapped, features)
    }

    /// Reads a plain graph as a hypergraph with 2-element hyperedges.
    pub fn from_graph(g: &Graph) -> Hypergraph {
        let edges: Vec<Vec<usize>> = g.edges().map(|(u, v)| vec![u, v]).collect();
        let mut hg = Hypergraph::new(g.n(), &edges).expect("graph edges are valid hyperedges");
        hg.features = g.features().renamed(|e| match e.class {
            EntityClass::Vertex => Some(e),
            EntityClass::Hyperedge => {
                let (u, v) = g.edge_vec()[e.id];
                hg.hyperedge_id(&[u, v]).map(EntityRef::hyperedge)
            }
            _ => None,
        });
        hg
    }
}

/// A hypergraph claimed to satisfy downward closure. The claim is checked
/// by [`validate`](crate::hogdm::validate), not at construction, so invalid
/// candidates can be inspected and reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SimplicialComplex(pub Hypergraph);

impl SimplicialComplex {
    pub fn new(hg: Hypergraph) -> Self {
        SimplicialComplex(hg)
    }

    pub fn hg(&self) -> &Hypergraph {
        &self.0
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<SimplicialComplex> {
        Ok(SimplicialComplex(self.0.relabel(p)?))
    }

    /// Closure violations: hyperedges of size 1 (vertices play that role in
    /// an SC) and missing proper subsets of size >= 2.
    pub fn closure_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let present: BTreeSet<&Vec<usize>> = self.0.hyperedges.iter().collect();
        for e in &self.0.hyperedges {
            if e.len() == 1 {
                out.push(format!("hyperedge {e:?} has size 1; vertices play that role"));
                continue;
            }
            for subset in proper_subsets_at_least_two(e) {
                if !present.contains(&subset) {
                    out.push(format!("hyperedge {e:?} is missing subset {subset:?}"));
                }
            }
        }
        out
    }
}

impl std::ops::Deref for SimplicialComplex {
    type Target = Hypergraph;

    fn deref(&self) -> &Hypergraph {
        &self.0
    }
}

/// All proper subsets of `e` with at least two members, sorted.
fn proper_subsets_at_least_two(e: &[usize]) -> Vec<Vec<usize>> {
    let k = e.len();
    let mut out = Vec::new();
    for mask in 1u32..((1 << k) - 1) {
        if mask.count_ones() < 2 {
            continue;
        }
        let subset: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).map(|i| e[i]).collect();
        out.push(subset);
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    out.dedup();
    out
}
