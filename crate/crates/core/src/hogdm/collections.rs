//! Graphs enriched with node-tuple or subgraph collections.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::entity::{EntityClass, EntityRef, FeatureMap};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexPermutation};

/// A base graph plus a collection of ordered node tuples (length 2..=k_max).
/// Tuples are kept sorted by (length, content); the position is the tuple's
/// canonical id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeTupleCollection {
    base: Graph,
    tuples: Vec<Vec<usize>>,
    k_max: usize,
    #[serde(default, skip_serializing_if = "FeatureMap::is_empty")]
    features: FeatureMap,
}

impl NodeTupleCollection {
    pub fn new(base: Graph, tuples: &[Vec<usize>], k_max: usize) -> Result<Self> {
        Self::with_features(base, tuples, k_max, FeatureMap::new())
    }

    pub fn with_features(
        base: Graph,
        tuples: &[Vec<usize>],
        k_max: usize,
        features: FeatureMap,
    ) -> Result<Self> {
        let mut list: Vec<Vec<usize>> = tuples.to_vec();
        list.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        list.dedup();
        for t in &list {
            if t.len() < 2 || t.len() > k_max {
                return Err(Error::InvalidDocument(format!(
                    "tuple {t:?} has length outside [2, {k_max}]"
                )));
            }
            for &v in t {
                if v >= base.n() {
                    return Err(Error::OutOfRange {
                        index: v,
                        size: base.n(),
                    });
                }
            }
        }
        let c = NodeTupleCollection {
            base,
            tuples: list,
            k_max,
            features,
        };
        c.check_features()?;
        Ok(c)
    }

    fn check_features(&self) -> Result<()> {
        // Widths are uniform per class; tuple widths are checked per length
        // because iso-type widths grow with arity.
        let mut per_len: std::collections::BTreeMap<usize, usize> = Default::default();
        let mut flat: Option<usize> = None;
        for (e, v) in self.features.iter() {
            match e.class {
                EntityClass::Vertex if e.id < self.base.n() => match flat {
                    None => flat = Some(v.len()),
                    Some(w) if w != v.len() => {
                        return Err(Error::FeatureWidthMismatch {
                            left: w,
                            right: v.len(),
                        })
                    }
                    _ => {}
                },
                EntityClass::Hyperedge if e.id < self.base.m() => {}
                EntityClass::Tuple if e.id < self.tuples.len() => {
                    let len = self.tuples[e.id].len();
                    match per_len.get(&len) {
                        None => {
                            per_len.insert(len, v.len());
                        }
                        Some(&w) if w != v.len() => {
                            return Err(Error::FeatureWidthMismatch {
                                left: w,
                                right: v.len(),
                            })
                        }
                        _ => {}
                    }
                }
                _ => return Err(Error::UnknownEntity(e.to_string())),
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn set_feature(&mut self, entity: EntityRef, value: Vec<f64>) -> Result<()> {
        self.features.insert(entity, value);
        self.check_features()
    }

    pub fn tuple_id(&self, t: &[usize]) -> Option<usize> {
        self.tuples
            .binary_search_by(|x| (x.len(), x.as_slice()).cmp(&(t.len(), t)))
            .ok()
    }

    /// Does the collection contain every length-`k` tuple over the base
    /// vertex set?
    pub fn is_full_for_length(&self, k: usize) -> bool {
        let count = self.tuples.iter().filter(|t| t.len() == k).count();
        count == self.base.n().pow(k as u32)
    }

    /// The single tuple length, when uniform.
    pub fn uniform_length(&self) -> Result<usize> {
        let mut lens = self.tuples.iter().map(Vec::len);
        let first = lens.next().ok_or(Error::EmptyStructure)?;
        for l in lens {
            if l != first {
                return Err(Error::MixedTupleLengths(first, l));
            }
        }
        Ok(first)
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<NodeTupleCollection> {
        let base = self.base.apply_permutation(p)?;
        let mapped: Vec<Vec<usize>> = self
            .tuples
            .iter()
            .map(|t| t.iter().map(|&v| p.apply(v)).collect())
            .collect();
        let plain = NodeTupleCollection::new(base.clone(), &mapped, self.k_max)?;
        let features = self.features.renamed(|e| match e.class {
            EntityClass::Vertex => Some(EntityRef::vertex(p.apply(e.id))),
            EntityClass::Tuple => {
                let t: Vec<usize> = self.tuples[e.id].iter().map(|&v| p.apply(v)).collect();
                plain.tuple_id(&t).map(EntityRef::tuple)
            }
            _ => None,
        });
        NodeTupleCollection::with_features(base, &mapped, self.k_max, features)
    }
}

/// One member of a subgraph collection: a vertex subset of the base graph
/// plus an edge set over it. Edges may be non-induced or virtual (absent
/// from the base graph).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubgraphDef {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<(usize, usize)>,
}

impl SubgraphDef {
    pub fn new(vertices: impl IntoIterator<Item = usize>, edges: &[(usize, usize)]) -> Self {
        SubgraphDef {
            vertices: vertices.into_iter().collect(),
            edges: edges
                .iter()
                .map(|&(u, v)| (u.min(v), u.max(v)))
                .collect(),
        }
    }

    /// This subgraph as a standalone graph; vertices are re-indexed in
    /// sorted order and the map from base labels to local ones is returned.
    pub fn to_graph(&self, base: &Graph) -> Result<(Graph, std::collections::BTreeMap<usize, usize>)> {
        let remap: std::collections::BTreeMap<usize, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i))
            .collect();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (remap[&u], remap[&v]))
            .collect();
        let mut g = Graph::new(self.vertices.len(), &edges)?;
        let width = base.feature_width();
        if width > 0 {
            let rows: Vec<Vec<f64>> = self
                .vertices
                .iter()
                .map(|&v| base.vertex_feature(v).to_vec())
                .collect();
            g = g.with_vertex_features(&rows)?;
        }
        Ok((g, remap))
    }
}

/// A base graph plus a list of subgraphs. When `ordered` is set the list
/// order is part of the structure's identity (subgraph-tuple collections);
/// otherwise the list is a multiset and order only fixes entity ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgraphCollection {
    base: Graph,
    subgraphs: Vec<SubgraphDef>,
    #[serde(default)]
    ordered: bool,
    #[serde(default, skip_serializing_if = "FeatureMap::is_empty")]
    features: FeatureMap,
}

impl SubgraphCollection {
    pub fn new(base: Graph, subgraphs: Vec<SubgraphDef>, ordered: bool) -> Result<Self> {
        Self::with_features(base, subgraphs, ordered, FeatureMap::new())
    }

    pub fn with_features(
        base: Graph,
        subgraphs: Vec<SubgraphDef>,
        ordered: bool,
        features: FeatureMap,
    ) -> Result<Self> {
        for sg in &subgraphs {
            for &v in &sg.vertices {
                if v >= base.n() {
                    return Err(Error::OutOfRange {
                        index: v,
                        size: base.n(),
                    });
                }
            }
            for &(u, v) in &sg.edges {
                if !sg.vertices.contains(&u) || !sg.vertices.contains(&v) {
                    return Err(Error::InvalidDocument(format!(
                        "subgraph edge ({u}, {v}) leaves its vertex set"
                    )));
                }
            }
        }
        Ok(SubgraphCollection {
            base,
            subgraphs,
            ordered,
            features,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn subgraphs(&self) -> &[SubgraphDef] {
        &self.subgraphs
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn set_feature(&mut self, entity: EntityRef, value: Vec<f64>) {
        self.features.insert(entity, value);
    }

    /// True when subgraph `i` contains base vertex `i` for every vertex,
    /// the anchoring the per-vertex pipeline modes require.
    pub fn is_vertex_anchored(&self) -> bool {
        self.subgraphs.len() == self.base.n()
            && self
                .subgraphs
                .iter()
                .enumerate()
                .all(|(i, sg)| sg.vertices.contains(&i))
    }

    pub fn relabel(&self, p: &VertexPermutation) -> Result<SubgraphCollection> {
        let base = self.base.apply_permutation(p)?;
        let subgraphs: Vec<SubgraphDef> = self
            .subgraphs
            .iter()
            .map(|sg| SubgraphDef {
                vertices: sg.vertices.iter().map(|&v| p.apply(v)).collect(),
                edges: sg
                    .edges
                    .iter()
                    .map(|&(u, v)| {
                        let (pu, pv) = (p.apply(u), p.apply(v));
                        (pu.min(pv), pu.max(pv))
                    })
                    .collect(),
            })
            .collect();
        SubgraphCollection::with_features(base, subgraphs, self.ordered, self.features.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, path_graph};

    #[test]
    fn tuples_canonicalized_and_checked() {
        let c = NodeTupleCollection::new(
            path_graph(3),
            &[vec![2, 0], vec![0, 1], vec![0, 1, 2]],
            3,
        )
        .unwrap();
        assert_eq!(c.tuples(), &[vec![0, 1], vec![2, 0], vec![0, 1, 2]][..]);
        assert_eq!(c.tuple_id(&[2, 0]), Some(1));
        assert!(c.tuple_id(&[1, 0]).is_none());
        assert!(NodeTupleCollection::new(path_graph(3), &[vec![0]], 3).is_err());
        assert!(NodeTupleCollection::new(path_graph(3), &[vec![0, 3]], 3).is_err());
    }

    #[test]
    fn fullness_and_uniform_length() {
        let all: Vec<Vec<usize>> = (0..3)
            .flat_map(|a| (0..3).map(move |b| vec![a, b]))
            .collect();
        let c = NodeTupleCollection::new(complete_graph(3), &all, 2).unwrap();
        assert!(c.is_full_for_length(2));
        assert_eq!(c.uniform_length().unwrap(), 2);
    }

    #[test]
    fn subgraph_edges_must_stay_inside() {
        let base = complete_graph(3);
        let bad = SubgraphCollection::new(
            base.clone(),
            vec![SubgraphDef::new([0, 1], &[(1, 2)])],
            false,
        );
        assert!(bad.is_err());
        let ok = SubgraphCollection::new(base, vec![SubgraphDef::new([0, 1], &[(0, 1)])], false);
        assert!(ok.is_ok());
    }

    #[test]
    fn subgraph_to_graph_reindexes() {
        let base = path_graph(3);
        let sg = SubgraphDef::new([1, 2], &[(1, 2)]);
        let (g, remap) = sg.to_graph(&base).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(remap[&1], 0);
        assert_eq!(remap[&2], 1);
    }
}
