//! The subgraph pipeline (run a base model on every subgraph, then combine)
//! and nested two-level evaluation.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::engine::state::ModelState;
use crate::engine::{readout, ModelSpec, Pooling};
use crate::entity::EntityClass;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::{HoStructure, Hypergraph, NestedGraph, SubgraphCollection};

/// How per-subgraph results combine into one structure embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outer", rename_all = "snake_case")]
pub enum OuterScheme {
    /// Average each vertex's representations across the subgraphs that
    /// contain it, then pool the averaged vertex rows.
    EgoAverage { pool: Pooling },
    /// Pool each subgraph to one vector, use those vectors as base-vertex
    /// features, and run an outer stack on the base graph.
    NestedOuterMp { spec: ModelSpec },
    /// Pool the multiset of subgraph embeddings directly.
    BagPool { pool: Pooling },
    /// Concatenate each vertex's centroid representation (its row in its
    /// own subgraph) with its subgraph-pooled representation, then pool.
    Fuse { pool: Pooling },
}

/// Runs `base` on one subgraph (as a hypergraph over its local graph) and
/// returns the final state plus the local remap.
fn run_on_subgraph(
    base_graph: &Graph,
    sg: &crate::hogdm::SubgraphDef,
    base: &ModelSpec,
) -> Result<(ModelState, std::collections::BTreeMap<usize, usize>)> {
    let (local, remap) = sg.to_graph(base_graph)?;
    let structure = HoStructure::Hypergraph(Hypergraph::from_graph(&local));
    let state = ModelState::from_structure_or_uniform(&structure, 1)?;
    Ok((base.run(&structure, &state)?, remap))
}

/// The four-step subgraph pipeline: per-subgraph base runs combined by the
/// outer scheme into one embedding.
pub fn run_subgraph_pipeline(
    collection: &SubgraphCollection,
    base: &ModelSpec,
    outer: &OuterScheme,
) -> Result<Vec<f64>> {
    if collection.subgraphs().is_empty() {
        return Err(Error::EmptyCollection);
    }
    let g = collection.base();
    let needs_anchoring = matches!(
        outer,
        OuterScheme::EgoAverage { .. } | OuterScheme::NestedOuterMp { .. } | OuterScheme::Fuse { .. }
    );
    if needs_anchoring && !collection.is_vertex_anchored() {
        let name = match outer {
            OuterScheme::EgoAverage { .. } => "ego-average",
            OuterScheme::NestedOuterMp { .. } => "nested-outer-mp",
            _ => "fuse",
        };
        return Err(Error::OuterRequiresVertexAnchoring(name));
    }

    let runs: Vec<(ModelState, std::collections::BTreeMap<usize, usize>)> = collection
        .subgraphs()
        .iter()
        .map(|sg| run_on_subgraph(g, sg, base))
        .collect::<Result<_>>()?;

    match outer {
        OuterScheme::EgoAverage { pool } => {
            let width = runs[0].0.width(EntityClass::Vertex);
            if runs.iter().any(|(s, _)| s.width(EntityClass::Vertex) != width) {
                return Err(Error::ShapeMismatch {
                    context: "ego averaging",
                    expected: format!("{width}"),
                    got: "mixed vertex widths across subgraphs".into(),
                });
            }
            let mut rows = Array2::zeros((g.n(), width));
            for v in 0..g.n() {
                let mut acc = Array1::<f64>::zeros(width);
                let mut count = 0usize;
                for (state, remap) in &runs {
                    if let Some(&local) = remap.get(&v) {
                        acc += &state.class(EntityClass::Vertex)?.row(local);
                        count += 1;
                    }
                }
                if count > 0 {
                    acc /= count as f64;
                }
                rows.row_mut(v).assign(&acc);
            }
            Ok(pool_rows(&rows, *pool))
        }
        OuterScheme::NestedOuterMp { spec } => {
            let embeddings: Vec<Vec<f64>> = runs
                .iter()
                .map(|(state, _)| readout(state, base.readout))
                .collect::<Result<_>>()?;
            run_outer_on_features(g, &embeddings, spec)
        }
        OuterScheme::BagPool { pool } => {
            let embeddings: Vec<Vec<f64>> = runs
                .iter()
                .map(|(state, _)| readout(state, base.readout))
                .collect::<Result<_>>()?;
            let width = embeddings.iter().map(Vec::len).max().unwrap_or(0);
            if embeddings.iter().any(|e| e.len() != width) {
                return Err(Error::ShapeMismatch {
                    context: "bag pooling",
                    expected: format!("{width}"),
                    got: "mixed embedding widths".into(),
                });
            }
            let flat: Vec<f64> = embeddings.iter().flatten().copied().collect();
            let m = Array2::from_shape_vec((embeddings.len(), width), flat).expect("rectangular");
            Ok(pool_rows(&m, *pool))
        }
        OuterScheme::Fuse { pool } => {
            let width = runs[0].0.width(EntityClass::Vertex);
            let mut rows = Array2::zeros((g.n(), 2 * width));
            for v in 0..g.n() {
                let (state, remap) = &runs[v];
                let vertex_matrix = state.class(EntityClass::Vertex)?;
                let centroid = vertex_matrix.row(remap[&v]).to_owned();
                let pooled = Array1::from_vec(pool_rows(vertex_matrix, *pool));
                if centroid.len() != width || pooled.len() != width {
                    return Err(Error::ShapeMismatch {
                        context: "fuse",
                        expected: format!("{width}"),
                        got: format!("{} and {}", centroid.len(), pooled.len()),
                    });
                }
                for j in 0..width {
                    rows[[v, j]] = centroid[j];
                    rows[[v, width + j]] = pooled[j];
                }
            }
            Ok(pool_rows(&rows, *pool))
        }
    }
}

fn pool_rows(m: &Array2<f64>, pool: Pooling) -> Vec<f64> {
    let mut state = ModelState::new();
    state.features.insert(EntityClass::Vertex, m.clone());
    readout(&state, pool).expect("single-class state")
}

/// Runs `spec` on the plain graph `g` with the supplied per-vertex feature
/// rows, reading the graph as a hypergraph.
fn run_outer_on_features(g: &Graph, rows: &[Vec<f64>], spec: &ModelSpec) -> Result<Vec<f64>> {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    if rows.len() != g.n() || rows.iter().any(|r| r.len() != width) {
        return Err(Error::ShapeMismatch {
            context: "outer features",
            expected: format!("{} rows of width {width}", g.n()),
            got: format!("{} rows", rows.len()),
        });
    }
    let structure = HoStructure::Hypergraph(Hypergraph::from_graph(g));
    let mut state = ModelState::uniform(&structure, width.max(1));
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    if width > 0 {
        state.features.insert(
            EntityClass::Vertex,
            Array2::from_shape_vec((g.n(), width), flat).expect("rectangular"),
        );
    }
    spec.embed(&structure, &state)
}

/// Nested evaluation: pool each inner graph to a vector, use the vectors as
/// outer vertex features, run the outer stack, and read out. Empty inner
/// graphs pool to the zero vector.
pub fn nested_run(n: &NestedGraph, inner: &ModelSpec, outer: &ModelSpec) -> Result<Vec<f64>> {
    let embeddings: Vec<Vec<f64>> = n
        .inner()
        .iter()
        .map(|g| {
            let structure = HoStructure::Hypergraph(Hypergraph::from_graph(g));
            let state = ModelState::from_structure_or_uniform(&structure, 1)?;
            inner.embed(&structure, &state)
        })
        .collect::<Result<_>>()?;
    run_outer_on_features(n.outer(), &embeddings, outer)
}
