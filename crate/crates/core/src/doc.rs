//! The structured-text document format: one JSON object per structure with
//! a `kind` tag. Round trips are byte-stable because every structure is
//! kept in canonical order and maps serialize with sorted string keys.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::{
    CellComplex, HoStructure, Hypergraph, MotifGraph, NestedGraph, NodeTupleCollection,
    SimplicialComplex, SubgraphCollection, SubgraphCountGraph,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum HoDocument {
    Graph(Graph),
    Hypergraph(Hypergraph),
    Sc(SimplicialComplex),
    Cc(CellComplex),
    Ntcol(NodeTupleCollection),
    Scol(SubgraphCollection),
    Motif(MotifGraph),
    Scnt(SubgraphCountGraph),
    Nested(NestedGraph),
}

impl HoDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            HoDocument::Graph(_) => "graph",
            HoDocument::Hypergraph(_) => "hypergraph",
            HoDocument::Sc(_) => "sc",
            HoDocument::Cc(_) => "cc",
            HoDocument::Ntcol(_) => "ntcol",
            HoDocument::Scol(_) => "scol",
            HoDocument::Motif(_) => "motif",
            HoDocument::Scnt(_) => "scnt",
            HoDocument::Nested(_) => "nested",
        }
    }

    pub fn as_graph(&self) -> Result<&Graph> {
        match self {
            HoDocument::Graph(g) => Ok(g),
            other => Err(Error::KindMismatch {
                left: "graph",
                right: other.kind(),
            }),
        }
    }

    pub fn as_hypergraph(&self) -> Result<&Hypergraph> {
        match self {
            HoDocument::Hypergraph(h) => Ok(h),
            HoDocument::Sc(sc) => Ok(sc.hg()),
            other => Err(Error::KindMismatch {
                left: "hypergraph",
                right: other.kind(),
            }),
        }
    }

    /// The document as an engine-facing structure; plain graphs read as
    /// hypergraphs with 2-element hyperedges.
    pub fn to_structure(&self) -> HoStructure {
        match self.clone() {
            HoDocument::Graph(g) => HoStructure::Hypergraph(Hypergraph::from_graph(&g)),
            HoDocument::Hypergraph(h) => HoStructure::Hypergraph(h),
            HoDocument::Sc(s) => HoStructure::SimplicialComplex(s),
            HoDocument::Cc(c) => HoStructure::CellComplex(c),
            HoDocument::Ntcol(c) => HoStructure::NodeTupleCollection(c),
            HoDocument::Scol(c) => HoStructure::SubgraphCollection(c),
            HoDocument::Motif(m) => HoStructure::MotifGraph(m),
            HoDocument::Scnt(s) => HoStructure::SubgraphCountGraph(s),
            HoDocument::Nested(n) => HoStructure::NestedGraph(n),
        }
    }
}

impl From<HoStructure> for HoDocument {
    fn from(s: HoStructure) -> Self {
        match s {
            HoStructure::Hypergraph(h) => HoDocument::Hypergraph(h),
            HoStructure::SimplicialComplex(s) => HoDocument::Sc(s),
            HoStructure::CellComplex(c) => HoDocument::Cc(c),
            HoStructure::NodeTupleCollection(c) => HoDocument::Ntcol(c),
            HoStructure::SubgraphCollection(c) => HoDocument::Scol(c),
            HoStructure::MotifGraph(m) => HoDocument::Motif(m),
            HoStructure::SubgraphCountGraph(s) => HoDocument::Scnt(s),
            HoStructure::NestedGraph(n) => HoDocument::Nested(n),
        }
    }
}

pub fn parse_document(text: &str) -> Result<HoDocument> {
    serde_json::from_str(text).map_err(|e| Error::InvalidDocument(e.to_string()))
}

/// Canonical rendering: pretty JSON with a trailing newline. Re-rendering a
/// parsed document reproduces the bytes exactly.
pub fn render_document(doc: &HoDocument) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("documents always serialize");
    text.push('\n');
    text
}
