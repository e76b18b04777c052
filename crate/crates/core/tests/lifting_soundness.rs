//! Liftings must preserve isomorphisms in both directions; lowerings are
//! allowed to lose structure but the bipartite form must keep the witness
//! pair apart.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hognn_core::graph::{are_isomorphic_bruteforce, Graph, VertexPermutation};
use hognn_core::hogdm::{ho_isomorphic_bruteforce, HoStructure, Hypergraph};
use hognn_core::transform::{
    cell_lift, clique_complex_lift, clique_expansion, bipartite_lowering, ego_net_collection,
    iso_type_lift, motif_lift,
};

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
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

/// One pair per trial: permuted-isomorphic on even trials, independent on
/// odd ones.
fn sample_pair(rng: &mut ChaCha8Rng, trial: usize, n_max: usize) -> (Graph, Graph) {
    let n = rng.gen_range(2..=n_max);
    let g1 = random_graph(rng, n, 0.5);
    let g2 = if trial % 2 == 0 {
        g1.apply_permutation(&random_permutation(rng, n)).unwrap()
    } else {
        random_graph(rng, n, 0.5)
    };
    (g1, g2)
}

fn lifts(g: &Graph) -> Vec<(&'static str, HoStructure)> {
    vec![
        (
            "cqc",
            HoStructure::SimplicialComplex(clique_complex_lift(g, 3)),
        ),
        ("cell", HoStructure::CellComplex(cell_lift(g, 2, 6, 0).unwrap())),
        (
            "isotype",
            HoStructure::NodeTupleCollection(iso_type_lift(g, 2).unwrap()),
        ),
        (
            "ego",
            HoStructure::SubgraphCollection(ego_net_collection(g, 1, true).unwrap()),
        ),
        (
            "motif",
            HoStructure::MotifGraph(
                motif_lift(g, &[hognn_core::graph::complete_graph(3)]).unwrap(),
            ),
        ),
    ]
}

#[test]
fn liftings_preserve_isomorphism_on_sampled_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..40 {
        let (g1, g2) = sample_pair(&mut rng, trial, 6);
        let base = are_isomorphic_bruteforce(&g1, &g2).unwrap();
        for ((name, l1), (_, l2)) in lifts(&g1).into_iter().zip(lifts(&g2)) {
            let lifted = ho_isomorphic_bruteforce(&l1, &l2).unwrap();
            assert_eq!(
                base, lifted,
                "trial {trial}: {name} lifting broke isomorphism preservation"
            );
        }
    }
}

#[test]
fn cell_lift_preserves_the_one_skeleton() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let n = rng.gen_range(2..=7);
        let g = random_graph(&mut rng, n, 0.4);
        let cc = cell_lift(&g, 3, 6, 0).unwrap();
        let skeleton = cc.one_skeleton().unwrap();
        assert!(are_isomorphic_bruteforce(&skeleton, &g).unwrap());
    }
}

#[test]
fn clique_expansion_loses_the_witness_pair_but_bipartite_keeps_it() {
    let h1 = Hypergraph::new(3, &[vec![0, 1], vec![0, 1, 2]]).unwrap();
    let h2 = Hypergraph::new(3, &[vec![0, 1, 2]]).unwrap();
    assert!(
        are_isomorphic_bruteforce(&clique_expansion(&h1), &clique_expansion(&h2)).unwrap(),
        "clique expansion must collapse the witness pair"
    );
    assert!(
        !are_isomorphic_bruteforce(&bipartite_lowering(&h1), &bipartite_lowering(&h2)).unwrap(),
        "bipartite lowering must keep the witness pair apart"
    );
}

#[test]
fn cqc_output_is_always_a_valid_sc() {
    use hognn_core::hogdm::validate;
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    for _ in 0..30 {
        let n = rng.gen_range(1..=7);
        let g = random_graph(&mut rng, n, 0.5);
        let sc = clique_complex_lift(&g, 4);
        assert!(validate(&HoStructure::SimplicialComplex(sc)).is_valid());
    }
}
