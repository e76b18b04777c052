//! Higher-order graph data models: hypergraphs, simplicial and cell
//! complexes, node-tuple and subgraph collections, motif and count graphs,
//! and nested graphs, with validation and desk-scale isomorphism oracles.

mod cell;
mod collections;
mod hypergraph;
mod iso;
mod motif;

pub use cell::{Cell, CellComplex};
pub use collections::{NodeTupleCollection, SubgraphCollection, SubgraphDef};
pub use hypergraph::{Hypergraph, SimplicialComplex};
pub use iso::{ho_isomorphic_bruteforce, relabel_structure, relabel_with_maps, HO_ISO_CAP};
pub use motif::{MotifGraph, NestedGraph, SubgraphCountGraph, WeightMatrix};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tagged union over all higher-order structures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum HoStructure {
    #[serde(rename = "hypergraph")]
    Hypergraph(Hypergraph),
    #[serde(rename = "sc")]
    SimplicialComplex(SimplicialComplex),
    #[serde(rename = "cc")]
    CellComplex(CellComplex),
    #[serde(rename = "ntcol")]
    NodeTupleCollection(NodeTupleCollection),
    #[serde(rename = "scol")]
    SubgraphCollection(SubgraphCollection),
    #[serde(rename = "motif")]
    MotifGraph(MotifGraph),
    #[serde(rename = "scnt")]
    SubgraphCountGraph(SubgraphCountGraph),
    #[serde(rename = "nested")]
    NestedGraph(NestedGraph),
}

impl HoStructure {
    pub fn kind(&self) -> &'static str {
        match self {
            HoStructure::Hypergraph(_) => "hypergraph",
            HoStructure::SimplicialComplex(_) => "sc",
            HoStructure::CellComplex(_) => "cc",
            HoStructure::NodeTupleCollection(_) => "ntcol",
            HoStructure::SubgraphCollection(_) => "scol",
            HoStructure::MotifGraph(_) => "motif",
            HoStructure::SubgraphCountGraph(_) => "scnt",
            HoStructure::NestedGraph(_) => "nested",
        }
    }

    /// Number of base vertices (0-cells for complexes).
    pub fn vertex_count(&self) -> usize {
        match self {
            HoStructure::Hypergraph(h) => h.n(),
            HoStructure::SimplicialComplex(s) => s.n(),
            HoStructure::CellComplex(c) => c.cells_of_dim(0).count(),
            HoStructure::NodeTupleCollection(c) => c.base().n(),
            HoStructure::SubgraphCollection(c) => c.base().n(),
            HoStructure::MotifGraph(m) => m.base().n(),
            HoStructure::SubgraphCountGraph(s) => s.base().n(),
            HoStructure::NestedGraph(n) => n.outer().n(),
        }
    }
}

/// One invariant failure, naming the offending entity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub entity: String,
    pub message: String,
}

/// Outcome of [`validate`]: empty iff every type invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the kind-specific axioms that construction cannot enforce:
/// downward closure for simplicial complexes, poset and cycle axioms for
/// cell complexes. Structures of the remaining kinds are fully checked at
/// construction, so they validate cleanly.
pub fn validate(structure: &HoStructure) -> ValidationReport {
    let mut report = ValidationReport::default();
    match structure {
        HoStructure::SimplicialComplex(sc) => {
            for message in sc.closure_violations() {
                let entity = message
                    .split(|c| c == '[' || c == ']')
                    .nth(1)
                    .map(|inner| format!("hyperedge [{inner}]"))
                    .unwrap_or_else(|| "hyperedge".into());
                report.violations.push(Violation { entity, message });
            }
        }
        HoStructure::CellComplex(cc) => {
            for message in cc.axiom_violations() {
                let entity = message
                    .split_whitespace()
                    .take(2)
                    .collect::<Vec<_>>()
                    .join(" ");
                report.violations.push(Violation { entity, message });
            }
        }
        _ => {}
    }
    report
}

/// Dimension of a simplicial or cell complex.
pub fn dimension(structure: &HoStructure) -> Result<usize> {
    match structure {
        HoStructure::SimplicialComplex(sc) => sc.dimension(),
        HoStructure::Hypergraph(h) => h.dimension(),
        HoStructure::CellComplex(cc) => cc.dimension(),
        other => Err(Error::KindMismatch {
            left: "sc|cc",
            right: other.kind(),
        }),
    }
}
