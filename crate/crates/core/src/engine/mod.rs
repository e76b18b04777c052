//! Forward-only execution of message-passing layer stacks over compiled
//! wiring, with readouts, the subgraph pipeline, and nested evaluation.

mod func;
mod layers;
mod pipeline;
pub mod presets;
mod state;
#[cfg(test)]
mod tests;

pub use func::{Aggregator, ArgSelect, Func, FuncSpec, Nonlinearity, Params};
pub use layers::{
    hat_attention, BampLayer, CwnLayer, HatLayer, HgConvLayer, ImpLayer, KgnnLayer, Layer,
    RelationAggregators,
};
pub use pipeline::{nested_run, run_subgraph_pipeline, OuterScheme};
pub use state::ModelState;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::entity::EntityClass;
use crate::error::{Error, Result};
use crate::hogdm::HoStructure;

/// Per-entity-class pooling for readouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    #[default]
    Sum,
    Mean,
    Max,
    /// Rows sorted lexicographically and flattened; invariant under entity
    /// relabeling and near-injective on multisets.
    Histogram,
}

fn pool_matrix(m: &Array2<f64>, kind: Pooling) -> Vec<f64> {
    let (rows, cols) = m.dim();
    match kind {
        Pooling::Sum | Pooling::Mean | Pooling::Max => {
            let mut out = vec![0.0; cols];
            if rows == 0 {
                return out;
            }
            match kind {
                Pooling::Sum | Pooling::Mean => {
                    for r in m.rows() {
                        for (o, x) in out.iter_mut().zip(r.iter()) {
                            *o += x;
                        }
                    }
                    if kind == Pooling::Mean {
                        for o in &mut out {
                            *o /= rows as f64;
                        }
                    }
                }
                Pooling::Max => {
                    out.copy_from_slice(m.row(0).to_slice().expect("contiguous"));
                    for r in m.rows() {
                        for (o, x) in out.iter_mut().zip(r.iter()) {
                            if *x > *o {
                                *o = *x;
                            }
                        }
                    }
                }
                Pooling::Histogram => unreachable!(),
            }
            out
        }
        Pooling::Histogram => {
            let mut sorted: Vec<Vec<f64>> = m.rows().into_iter().map(|r| r.to_vec()).collect();
            sorted.sort_by(|a, b| {
                a.iter()
                    .zip(b.iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            sorted.into_iter().flatten().collect()
        }
    }
}

/// Pools every entity class and concatenates the results in class order.
pub fn readout(state: &ModelState, kind: Pooling) -> Result<Vec<f64>> {
    if state.features.is_empty() {
        return Err(Error::EmptyState);
    }
    let mut out = Vec::new();
    for m in state.features.values() {
        out.extend(pool_matrix(m, kind));
    }
    Ok(out)
}

/// An ordered layer stack plus the readout pooling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub layers: Vec<Layer>,
    #[serde(default)]
    pub readout: Pooling,
}

impl ModelSpec {
    pub fn new(layers: Vec<Layer>) -> Self {
        ModelSpec {
            layers,
            readout: Pooling::Sum,
        }
    }

    /// Runs the layer stack, threading the state through.
    pub fn run(&self, structure: &HoStructure, state: &ModelState) -> Result<ModelState> {
        let mut current = state.clone();
        for layer in &self.layers {
            current = layer.apply(structure, &current)?;
        }
        Ok(current)
    }

    /// Runs the stack and pools the final state.
    pub fn embed(&self, structure: &HoStructure, state: &ModelState) -> Result<Vec<f64>> {
        readout(&self.run(structure, state)?, self.readout)
    }
}

/// Vertex-class width after running `spec` from `input_width` features, for
/// chaining model stages.
pub fn vertex_output_width(
    spec: &ModelSpec,
    structure: &HoStructure,
    state: &ModelState,
) -> Result<usize> {
    Ok(spec.run(structure, state)?.width(EntityClass::Vertex))
}
