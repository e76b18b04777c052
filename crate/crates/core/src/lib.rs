//! Higher-order graph learning toolkit: data models beyond plain graphs
//! (hypergraphs, simplicial and cell complexes, node-tuple and subgraph
//! collections, motif and nested graphs), isomorphism-preserving liftings
//! and lossy lowerings, explicit message-channel wiring, a forward-only
//! message-passing engine, and a Weisfeiler-Lehman refinement lab for
//! desk-scale expressiveness experiments.

pub mod adjacency;
pub mod budget;
pub mod corpus;
pub mod doc;
pub mod entity;
pub mod error;
pub mod graph;
pub mod engine;
pub mod hogdm;
pub mod transform;
pub mod wiring;
pub mod wl;

pub use entity::{EntityClass, EntityRef, FeatureMap};
pub use error::{Error, Result};
