//! Permutation equivariance of every layer kind and invariance of the
//! readout paths, on randomized inputs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hognn_core::engine::{presets, readout, ModelState};
use hognn_core::graph::{Graph, VertexPermutation};
use hognn_core::hogdm::{relabel_with_maps, HoStructure, Hypergraph};
use hognn_core::transform::{all_tuples, cell_lift, clique_complex_lift};

const TOLERANCE: f64 = 1e-9;

fn random_connectedish_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(0.3) && !edges.contains(&(i, j)) {
                edges.push((i, j));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> VertexPermutation {
    let mut mapping: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        mapping.swap(i, rng.gen_range(0..=i));
    }
    VertexPermutation::new(mapping).unwrap()
}

fn randomize_state(rng: &mut ChaCha8Rng, state: &mut ModelState) {
    for matrix in state.features.values_mut() {
        for x in matrix.iter_mut() {
            *x = rng.gen_range(-1.0..1.0);
        }
    }
}

fn structure_for(preset: &str, g: &Graph) -> HoStructure {
    match preset {
        "mpsn" => HoStructure::SimplicialComplex(clique_complex_lift(g, 3)),
        "cwn" => HoStructure::CellComplex(cell_lift(g, 2, 6, 0).unwrap()),
        "kgnn" => HoStructure::NodeTupleCollection(
            hognn_core::hogdm::NodeTupleCollection::new(g.clone(), &all_tuples(g.n(), 2), 2)
                .unwrap(),
        ),
        _ => HoStructure::Hypergraph(Hypergraph::from_graph(g)),
    }
}

/// layer(relabel(input)) must equal relabel(layer(input)), and the readout
/// must agree, for every preset and random input.
#[test]
fn presets_are_equivariant_and_readout_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    for (name, spec, _) in presets::surveyed_presets(2, 31) {
        for trial in 0..10 {
            let n = rng.gen_range(3..6);
            let g = random_connectedish_graph(&mut rng, n);
            let structure = structure_for(name, &g);
            let mut state = ModelState::uniform(&structure, 2);
            randomize_state(&mut rng, &mut state);

            let p = random_permutation(&mut rng, n);
            let (relabeled, maps) = relabel_with_maps(&structure, &p).unwrap();
            let permuted_state = state.permuted(&maps);

            let out = spec.run(&structure, &state).unwrap();
            let out_permuted_input = spec.run(&relabeled, &permuted_state).unwrap();
            let deviation = out.permuted(&maps).max_abs_diff(&out_permuted_input);
            assert!(
                deviation < TOLERANCE,
                "{name} trial {trial}: equivariance deviation {deviation}"
            );

            let r1 = readout(&out, spec.readout).unwrap();
            let r2 = readout(&out_permuted_input, spec.readout).unwrap();
            let dr = r1
                .iter()
                .zip(&r2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(
                dr < TOLERANCE,
                "{name} trial {trial}: readout deviation {dr}"
            );
        }
    }
}

/// The subgraph pipelines and the nested evaluator are functions of the
/// graph alone: relabeling the input must not change the embedding.
#[test]
fn pipeline_and_nested_embeddings_are_invariant() {
    use hognn_core::engine::{nested_run, run_subgraph_pipeline, OuterScheme, Pooling};
    use hognn_core::hogdm::NestedGraph;
    use hognn_core::transform::ego_net_collection;

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let base = presets::hgconv(1, 17);
    for trial in 0..10 {
        let n = rng.gen_range(3..6);
        let g = random_connectedish_graph(&mut rng, n);
        let p = random_permutation(&mut rng, n);
        let permuted = g.apply_permutation(&p).unwrap();

        // pipeline invariance across all outer modes
        for outer in [
            OuterScheme::EgoAverage { pool: Pooling::Sum },
            // the base readout concatenates the vertex and hyperedge pools,
            // so the outer stack sees width-2 features
            OuterScheme::NestedOuterMp {
                spec: presets::hgconv(2, 23),
            },
            OuterScheme::BagPool { pool: Pooling::Sum },
            OuterScheme::Fuse { pool: Pooling::Sum },
        ] {
            let e1 = run_subgraph_pipeline(
                &ego_net_collection(&g, 1, true).unwrap(),
                &base,
                &outer,
            )
            .unwrap();
            let e2 = run_subgraph_pipeline(
                &ego_net_collection(&permuted, 1, true).unwrap(),
                &base,
                &outer,
            )
            .unwrap();
            let d = e1
                .iter()
                .zip(&e2)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(d < TOLERANCE, "pipeline trial {trial}: deviation {d}");
        }

        // nested invariance: inner graphs travel with the outer relabeling
        let inner_graphs: Vec<Graph> = (0..n)
            .map(|_| {
                let m = rng.gen_range(1..4);
                random_connectedish_graph(&mut rng, m)
            })
            .collect();
        let nested = NestedGraph::new(g.clone(), inner_graphs).unwrap();
        let nested_permuted = nested.relabel(&p).unwrap();
        // inner readouts are width 2 (vertex pool + hyperedge pool)
        let outer_spec = presets::hgconv(2, 29);
        let e1 = nested_run(&nested, &base, &outer_spec).unwrap();
        let e2 = nested_run(&nested_permuted, &base, &outer_spec).unwrap();
        let d = e1
            .iter()
            .zip(&e2)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(d < TOLERANCE, "nested trial {trial}: deviation {d}");
    }
}

/// Channel evaluation order is not observable: feeding the engine the same
/// structure twice gives bit-identical outputs (reductions run in canonical
/// order internally).
#[test]
fn repeated_runs_are_bit_identical() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (name, spec, _) in presets::surveyed_presets(2, 8) {
        let g = random_connectedish_graph(&mut rng, 5);
        let structure = structure_for(name, &g);
        let mut state = ModelState::uniform(&structure, 2);
        randomize_state(&mut rng, &mut state);
        let a = spec.run(&structure, &state).unwrap();
        let b = spec.run(&structure, &state).unwrap();
        assert_eq!(a.max_abs_diff(&b), 0.0, "{name} runs differ");
    }
}
