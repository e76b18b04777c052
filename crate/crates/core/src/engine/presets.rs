//! Ready-made layer stacks, one per surveyed model family. Parameters are
//! seed-generated with declared shapes; widths stay constant through each
//! stack so the presets compose with the pipelines.

use crate::engine::func::{Aggregator, FuncSpec, Nonlinearity, Params};
use crate::engine::layers::{
    BampLayer, CwnLayer, HatLayer, HgConvLayer, ImpLayer, KgnnLayer, Layer, RelationAggregators,
};
use crate::engine::{ModelSpec, Pooling};
use crate::wiring::Relation;

fn seeded(rows: usize, cols: usize, seed: u64) -> Params {
    Params::Seeded { rows, cols, seed }
}

/// General-flavor incidence message passing: learnable vector-valued
/// message and update maps with the three aggregation sites pinned to sum.
pub fn imp_general(width: usize, seed: u64) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Imp(ImpLayer {
            psi_v: FuncSpec::mlp(seeded(width, width, seed), seeded(width, width, seed + 1)),
            phi_e: FuncSpec::linear(seeded(2 * width, width, seed + 2)),
            psi_e: FuncSpec::linear(seeded(2 * width, width, seed + 3)),
            phi_v: FuncSpec::linear(seeded(2 * width, width, seed + 4)),
            agg_edge_update: Aggregator::Sum,
            agg_edge_message: Aggregator::Sum,
            agg_vertex: Aggregator::Sum,
        })],
        readout: Pooling::Sum,
    }
}

/// Convolutional hypergraph layer: degree-normalized incidence operator.
pub fn hgconv(width: usize, seed: u64) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Hgconv(HgConvLayer {
            hyperedge_weights: None,
            theta: seeded(width, width, seed),
            nonlinearity: Nonlinearity::Identity,
        })],
        readout: Pooling::Sum,
    }
}

/// Attentional hypergraph layer: softmax-learned incidence weights.
pub fn hat(width: usize, seed: u64) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Hat(HatLayer {
            theta: seeded(width, width, seed),
            attention_nonlinearity: Nonlinearity::Sigmoid,
            nonlinearity: Nonlinearity::Identity,
        })],
        readout: Pooling::Sum,
    }
}

/// General-flavor simplicial message passing over all four boundary-family
/// relations.
pub fn mpsn(width: usize, seed: u64) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Bamp(BampLayer {
            relations: vec![
                Relation::Boundary,
                Relation::Coboundary,
                Relation::Upper,
                Relation::Lower,
            ],
            psi_boundary: FuncSpec::linear(seeded(2 * width, width, seed)),
            psi_coboundary: FuncSpec::linear(seeded(2 * width, width, seed + 1)),
            psi_upper: FuncSpec::linear(seeded(3 * width, width, seed + 2)),
            psi_lower: FuncSpec::linear(seeded(3 * width, width, seed + 3)),
            phi: FuncSpec::linear(seeded(5 * width, width, seed + 4)),
            aggregators: RelationAggregators::default(),
            nonlinearity: Nonlinearity::Relu,
        })],
        readout: Pooling::Sum,
    }
}

/// General-flavor CW-network layer: boundary and upper messages only.
pub fn cwn(width: usize, seed: u64) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Cwn(CwnLayer {
            psi_boundary: FuncSpec::linear(seeded(2 * width, width, seed)),
            psi_upper: FuncSpec::linear(seeded(3 * width, width, seed + 1)),
            phi: FuncSpec::linear(seeded(3 * width, width, seed + 2)),
            aggregators: RelationAggregators::default(),
            nonlinearity: Nonlinearity::Relu,
        })],
        readout: Pooling::Sum,
    }
}

/// Convolutional tuple layer over exclusive down-adjacency.
pub fn kgnn(width: usize, seed: u64, local: bool) -> ModelSpec {
    ModelSpec {
        layers: vec![Layer::Kgnn(KgnnLayer {
            theta1: seeded(width, width, seed),
            theta2: seeded(width, width, seed + 1),
            local,
            nonlinearity: Nonlinearity::Relu,
        })],
        readout: Pooling::Sum,
    }
}

/// The six named presets with their expected flavor strings, as surveyed.
pub fn surveyed_presets(width: usize, seed: u64) -> Vec<(&'static str, ModelSpec, &'static str)> {
    vec![
        ("imp-general", imp_general(width, seed), "gen"),
        ("hgconv", hgconv(width, seed), "conv"),
        ("hat", hat(width, seed), "att"),
        ("mpsn", mpsn(width, seed), "gen"),
        ("cwn", cwn(width, seed), "gen"),
        ("kgnn", kgnn(width, seed, false), "conv"),
    ]
}
