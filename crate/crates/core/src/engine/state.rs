//! Per-entity-class feature matrices evolved by the engine. Row order is
//! the canonical entity order of the owning structure.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};

use crate::entity::{EntityClass, EntityRef};
use crate::error::{Error, Result};
use crate::hogdm::HoStructure;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelState {
    pub features: BTreeMap<EntityClass, Array2<f64>>,
}

impl ModelState {
    pub fn new() -> Self {
        ModelState {
            features: BTreeMap::new(),
        }
    }

    /// Entity counts per class, in canonical order.
    pub fn class_sizes(structure: &HoStructure) -> Vec<(EntityClass, usize)> {
        match structure {
            HoStructure::Hypergraph(h) => vec![
                (EntityClass::Vertex, h.n()),
                (EntityClass::Hyperedge, h.hyperedges().len()),
            ],
            HoStructure::SimplicialComplex(s) => vec![
                (EntityClass::Vertex, s.n()),
                (EntityClass::Hyperedge, s.hyperedges().len()),
            ],
            HoStructure::CellComplex(c) => vec![(EntityClass::Cell, c.len())],
            HoStructure::NodeTupleCollection(c) => vec![
                (EntityClass::Vertex, c.base().n()),
                (EntityClass::Tuple, c.tuples().len()),
            ],
            HoStructure::SubgraphCollection(c) => vec![
                (EntityClass::Vertex, c.base().n()),
                (EntityClass::Subgraph, c.subgraphs().len()),
            ],
            HoStructure::MotifGraph(m) => vec![(EntityClass::Vertex, m.base().n())],
            HoStructure::SubgraphCountGraph(s) => vec![(EntityClass::Vertex, s.base().n())],
            HoStructure::NestedGraph(n) => vec![(EntityClass::Vertex, n.outer().n())],
        }
    }

    fn structure_features(structure: &HoStructure) -> Vec<(EntityRef, Vec<f64>)> {
        let map = match structure {
            HoStructure::Hypergraph(h) => h.features(),
            HoStructure::SimplicialComplex(s) => s.features(),
            HoStructure::CellComplex(c) => c.features(),
            HoStructure::NodeTupleCollection(c) => c.features(),
            HoStructure::SubgraphCollection(c) => c.features(),
            HoStructure::MotifGraph(m) => m.base().features(),
            HoStructure::SubgraphCountGraph(s) => s.base().features(),
            HoStructure::NestedGraph(n) => n.outer().features(),
        };
        map.iter().map(|(e, v)| (*e, v.clone())).collect()
    }

    /// Builds the state from the structure's own features; entities without
    /// a feature get a zero row of their class width. Classes without any
    /// features get width-zero matrices.
    pub fn from_structure(structure: &HoStructure) -> Result<ModelState> {
        let sizes = Self::class_sizes(structure);
        let entries = Self::structure_features(structure);
        let mut widths: BTreeMap<EntityClass, usize> = BTreeMap::new();
        for (e, v) in &entries {
            let w = widths.entry(e.class).or_insert(v.len());
            if *w != v.len() {
                return Err(Error::ShapeMismatch {
                    context: "structure features",
                    expected: format!("{w}"),
                    got: format!("{}", v.len()),
                });
            }
        }
        let mut features = BTreeMap::new();
        for (class, count) in sizes {
            let width = widths.get(&class).copied().unwrap_or(0);
            features.insert(class, Array2::zeros((count, width)));
        }
        let mut state = ModelState { features };
        for (e, v) in entries {
            let m = state.features.get_mut(&e.class).expect("class exists");
            for (j, x) in v.iter().enumerate() {
                m[[e.id, j]] = *x;
            }
        }
        Ok(state)
    }

    /// All-ones features of the given width for every class.
    pub fn uniform(structure: &HoStructure, width: usize) -> ModelState {
        let mut features = BTreeMap::new();
        for (class, count) in Self::class_sizes(structure) {
            features.insert(class, Array2::ones((count, width)));
        }
        ModelState { features }
    }

    /// Keeps the structure's features when it has any, otherwise uniform
    /// ones of the given width.
    pub fn from_structure_or_uniform(structure: &HoStructure, width: usize) -> Result<ModelState> {
        let state = Self::from_structure(structure)?;
        let has_any = state.features.values().any(|m| m.ncols() > 0);
        Ok(if has_any {
            state
        } else {
            Self::uniform(structure, width)
        })
    }

    pub fn class(&self, class: EntityClass) -> Result<&Array2<f64>> {
        self.features
            .get(&class)
            .ok_or_else(|| Error::UnknownEntity(class.to_string()))
    }

    pub fn row(&self, entity: EntityRef) -> Result<Array1<f64>> {
        let m = self.class(entity.class)?;
        if entity.id >= m.nrows() {
            return Err(Error::UnknownEntity(entity.to_string()));
        }
        Ok(m.row(entity.id).to_owned())
    }

    pub fn width(&self, class: EntityClass) -> usize {
        self.features.get(&class).map(|m| m.ncols()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty() || self.features.values().all(|m| m.nrows() == 0)
    }

    /// Reorders rows per class along `maps[class]`, where the map sends old
    /// indices to new ones. Classes without a map pass through.
    pub fn permuted(&self, maps: &BTreeMap<EntityClass, Vec<usize>>) -> ModelState {
        let mut out = self.clone();
        for (class, map) in maps {
            if let Some(m) = self.features.get(class) {
                let mut new = Array2::zeros((m.nrows(), m.ncols()));
                for (old, &newi) in map.iter().enumerate() {
                    new.row_mut(newi).assign(&m.row(old));
                }
                out.features.insert(*class, new);
            }
        }
        out
    }

    /// Largest absolute difference over all classes (shape mismatch is
    /// infinite).
    pub fn max_abs_diff(&self, other: &ModelState) -> f64 {
        let mut worst: f64 = 0.0;
        for (class, m) in &self.features {
            match other.features.get(class) {
                Some(o) if o.shape() == m.shape() => {
                    for (a, b) in m.iter().zip(o.iter()) {
                        worst = worst.max((a - b).abs());
                    }
                }
                _ => return f64::INFINITY,
            }
        }
        worst
    }
}

impl Default for ModelState {
    fn default() -> Self {
        Self::new()
    }
}
