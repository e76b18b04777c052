//! Combinatorial cell complexes as Hasse diagrams.
//!
//! A complex is a list of cells, each with a dimension and a boundary set of
//! cell ids one dimension down. Only the combinatorial poset axioms are
//! checked; the topological conditions of regular complexes are trusted by
//! construction. Parallel cells (same boundary) are allowed, which is how
//! multigraph 1-skeletons are represented.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::entity::{EntityClass, EntityRef, FeatureMap};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub id: usize,
    pub dim: usize,
    #[serde(default)]
    pub boundary: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellComplex {
    cells: Vec<Cell>,
    #[serde(default, skip_serializing_if = "FeatureMap::is_empty")]
    features: FeatureMap,
}

impl CellComplex {
    /// Builds a complex, sorting cells into canonical (dim, id) order.
    /// Boundary references must resolve; deeper axioms are left to
    /// [`validate`](crate::hogdm::validate).
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        Self::with_features(cells, FeatureMap::new())
    }

    pub fn with_features(mut cells: Vec<Cell>, features: FeatureMap) -> Result<Self> {
        cells.sort_by_key(|c| (c.dim, c.id));
        let ids: BTreeSet<usize> = cells.iter().map(|c| c.id).collect();
        if ids.len() != cells.len() {
            return Err(Error::InvalidDocument("duplicate cell id".into()));
        }
        for c in &cells {
            for b in &c.boundary {
                if !ids.contains(b) {
                    return Err(Error::UnknownEntity(format!("cell {b}")));
                }
            }
        }
        let cc = CellComplex { cells, features };
        for (e, _) in cc.features.iter() {
            if e.class != EntityClass::Cell || e.id >= cc.cells.len() {
                return Err(Error::UnknownEntity(e.to_string()));
            }
        }
        Ok(cc)
    }

    /// Cells in canonical (dim, id) order; the position in this slice is the
    /// cell's canonical index, used by [`EntityRef`]s and the engine.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn set_feature(&mut self, entity: EntityRef, value: Vec<f64>) -> Result<()> {
        if entity.class != EntityClass::Cell || entity.id >= self.cells.len() {
            return Err(Error::UnknownEntity(entity.to_string()));
        }
        self.features.insert(entity, value);
        Ok(())
    }

    /// Canonical index of the cell with the given id.
    pub fn index_of(&self, id: usize) -> Option<usize> {
        self.cells.iter().position(|c| c.id == id)
    }

    pub fn cells_of_dim(&self, dim: usize) -> impl Iterator<Item = (usize, &Cell)> {
        self.cells
            .iter()
            .enumerate()
            .filter(move |(_, c)| c.dim == dim)
    }

    pub fn dimension(&self) -> Result<usize> {
        self.cells
            .iter()
            .map(|c| c.dim)
            .max()
            .ok_or(Error::EmptyStructure)
    }

    /// Immediate boundary of the cell at canonical index `idx`, as canonical
    /// indices.
    pub fn boundary_indices(&self, idx: usize) -> Vec<usize> {
        let id_to_index: BTreeMap<usize, usize> = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id, i))
            .collect();
        let mut out: Vec<usize> = self.cells[idx]
            .boundary
            .iter()
            .map(|b| id_to_index[b])
            .collect();
        out.sort_unstable();
        out
    }

    /// Strict partial order `a < b` via the transitive closure of boundary
    /// containment (is `a` in the iterated boundary of `b`?).
    pub fn lt(&self, a: usize, b: usize) -> bool {
        let mut frontier = vec![b];
        let mut seen = BTreeSet::new();
        while let Some(c) = frontier.pop() {
            for d in self.boundary_indices(c) {
                if d == a {
                    return true;
                }
                if seen.insert(d) {
                    frontier.push(d);
                }
            }
        }
        false
    }

    /// The multigraph of 0- and 1-cells, as (number of 0-cells, list of
    /// endpoint index pairs per 1-cell). Endpoints index 0-cells in
    /// canonical order.
    pub fn one_skeleton_multigraph(&self) -> (usize, Vec<(usize, usize)>) {
        let zero: Vec<usize> = self.cells_of_dim(0).map(|(i, _)| i).collect();
        let pos: BTreeMap<usize, usize> = zero.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut edges = Vec::new();
        for (i, _) in self.cells_of_dim(1) {
            let b = self.boundary_indices(i);
            if b.len() == 2 {
                edges.push((pos[&b[0]], pos[&b[1]]));
            }
        }
        (zero.len(), edges)
    }

    /// 1-skeleton as a simple graph; errors if parallel 1-cells exist.
    pub fn one_skeleton(&self) -> Result<Graph> {
        let (n, edges) = self.one_skeleton_multigraph();
        Graph::new(n, &edges)
    }

    /// Renames cell ids along `rename` (a bijection on the used ids),
    /// carrying features to the re-sorted canonical positions.
    pub fn relabel_ids(&self, rename: &BTreeMap<usize, usize>) -> Result<CellComplex> {
        let cells: Vec<Cell> = self
            .cells
            .iter()
            .map(|c| {
                Ok(Cell {
                    id: *rename
                        .get(&c.id)
                        .ok_or_else(|| Error::UnknownEntity(format!("cell {}", c.id)))?,
                    dim: c.dim,
                    boundary: c
                        .boundary
                        .iter()
                        .map(|b| {
                            rename
                                .get(b)
                                .copied()
                                .ok_or_else(|| Error::UnknownEntity(format!("cell {b}")))
                        })
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        let out = CellComplex::new(cells)?;
        let features = self.features.renamed(|e| {
            let old_id = self.cells[e.id].id;
            out.index_of(rename[&old_id]).map(EntityRef::cell)
        });
        CellComplex::with_features(out.cells, features)
    }

    /// Poset and attachment axioms; each violation names the offending cell.
    pub fn axiom_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (idx, c) in self.cells.iter().enumerate() {
            let b = self.boundary_indices(idx);
            if c.dim == 0 && !b.is_empty() {
                out.push(format!("0-cell {} has a non-empty boundary", c.id));
                continue;
            }
            if c.dim > 0 && b.is_empty() {
                out.push(format!("{}-cell {} has an empty boundary", c.dim, c.id));
                continue;
            }
            if b.iter().any(|&d| self.cells[d].dim + 1 != c.dim) {
                out.push(format!(
                    "{}-cell {} has boundary cells of the wrong dimension",
                    c.dim, c.id
                ));
                continue;
            }
            if c.dim == 1 && b.len() != 2 {
                out.push(format!("1-cell {} must have exactly two 0-cells", c.id));
            }
            if c.dim == 2 && !self.is_closed_cycle(&b) {
                out.push(format!(
                    "2-cell {} boundary does not form a single closed cycle",
                    c.id
                ));
            }
        }
        out
    }

    /// Do the given 1-cells form one closed cycle in the 1-skeleton?
    fn is_closed_cycle(&self, one_cells: &[usize]) -> bool {
        if one_cells.len() < 3 {
            return false;
        }
        let mut degree: BTreeMap<usize, usize> = BTreeMap::new();
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &e in one_cells {
            let b = self.boundary_indices(e);
            if b.len() != 2 || b[0] == b[1] {
                return false;
            }
            *degree.entry(b[0]).or_default() += 1;
            *degree.entry(b[1]).or_default() += 1;
            adj.entry(b[0]).or_default().push(b[1]);
            adj.entry(b[1]).or_default().push(b[0]);
        }
        if degree.values().any(|&d| d != 2) {
            return false;
        }
        // Connected + all degrees 2 + |E| = |V| is a single cycle.
        if degree.len() != one_cells.len() {
            return false;
        }
        let start = *degree.keys().next().unwrap();
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == degree.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_complex() -> CellComplex {
        CellComplex::new(vec![
            Cell { id: 0, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 1, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 2, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 3, dim: 1, boundary: BTreeSet::from([0, 1]) },
            Cell { id: 4, dim: 1, boundary: BTreeSet::from([1, 2]) },
            Cell { id: 5, dim: 1, boundary: BTreeSet::from([0, 2]) },
            Cell { id: 6, dim: 2, boundary: BTreeSet::from([3, 4, 5]) },
        ])
        .unwrap()
    }

    #[test]
    fn valid_triangle_complex() {
        let cc = triangle_complex();
        assert!(cc.axiom_violations().is_empty());
        assert_eq!(cc.dimension().unwrap(), 2);
        assert!(cc.lt(0, 6));
        assert!(!cc.lt(6, 0));
        let skel = cc.one_skeleton().unwrap();
        assert_eq!((skel.n(), skel.m()), (3, 3));
    }

    #[test]
    fn broken_cycle_reported() {
        let cc = CellComplex::new(vec![
            Cell { id: 0, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 1, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 2, dim: 0, boundary: BTreeSet::new() },
            Cell { id: 3, dim: 1, boundary: BTreeSet::from([0, 1]) },
            Cell { id: 4, dim: 1, boundary: BTreeSet::from([1, 2]) },
            Cell { id: 5, dim: 2, boundary: BTreeSet::from([3, 4]) },
        ])
        .unwrap();
        let violations = cc.axiom_violations();
        assert_eq!(violations.len(), 1);
        assert!(violations[0].contains("closed cycle"));
    }

    #[test]
    fn dangling_boundary_rejected() {
        let err = CellComplex::new(vec![Cell {
            id: 0,
            dim: 1,
            boundary: BTreeSet::from([7]),
        }]);
        assert!(err.is_err());
    }

    #[test]
    fn relabel_preserves_axioms() {
        let cc = triangle_complex();
        let rename: BTreeMap<usize, usize> = (0..7).map(|i| (i, 6 - i)).collect();
        let cc2 = cc.relabel_ids(&rename).unwrap();
        assert!(cc2.axiom_violations().is_empty());
        assert_eq!(cc2.dimension().unwrap(), 2);
    }
}
