//! Brute-force structure isomorphism at desk scale.
//!
//! Every kind reduces to a search over vertex bijections that must preserve
//! the kind's constituents and features; cell complexes additionally search
//! over per-dimension cell matchings because cells are abstract ids.

use std::collections::BTreeSet;

use crate::entity::EntityRef;
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic_bruteforce, permute_all, Graph, VertexPermutation};
use crate::hogdm::{
    CellComplex, HoStructure, Hypergraph, MotifGraph, NestedGraph, NodeTupleCollection,
    SubgraphCollection, SubgraphCountGraph,
};

/// Vertex-count cap for the structure-level search.
pub const HO_ISO_CAP: usize = 8;

/// True iff a vertex bijection preserves all hyperedges, cells, tuples,
/// subgraphs, weights, and features of the two structures. Both inputs must
/// be of the same kind and have at most [`HO_ISO_CAP`] vertices.
pub fn ho_isomorphic_bruteforce(a: &HoStructure, b: &HoStructure) -> Result<bool> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    let cap = crate::budget::cap(HO_ISO_CAP);
    for s in [a, b] {
        let n = s.vertex_count();
        if n > cap {
            return Err(Error::TooLarge { n, cap });
        }
    }
    Ok(match (a, b) {
        (HoStructure::Hypergraph(x), HoStructure::Hypergraph(y)) => hypergraphs_isomorphic(x, y),
        (HoStructure::SimplicialComplex(x), HoStructure::SimplicialComplex(y)) => {
            hypergraphs_isomorphic(x.hg(), y.hg())
        }
        (HoStructure::CellComplex(x), HoStructure::CellComplex(y)) => cell_complexes_isomorphic(x, y),
        (HoStructure::NodeTupleCollection(x), HoStructure::NodeTupleCollection(y)) => {
            ntcols_isomorphic(x, y)
        }
        (HoStructure::SubgraphCollection(x), HoStructure::SubgraphCollection(y)) => {
            scols_isomorphic(x, y)
        }
        (HoStructure::MotifGraph(x), HoStructure::MotifGraph(y)) => motif_graphs_isomorphic(x, y)?,
        (HoStructure::SubgraphCountGraph(x), HoStructure::SubgraphCountGraph(y)) => {
            scnt_graphs_isomorphic(x, y)
        }
        (HoStructure::NestedGraph(x), HoStructure::NestedGraph(y)) => nested_isomorphic(x, y)?,
        _ => unreachable!("kinds already matched"),
    })
}

/// Runs `check` over all bijections `0..n -> 0..n` until one succeeds.
fn any_permutation(n: usize, mut check: impl FnMut(&[usize]) -> bool) -> bool {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut found = false;
    permute_all(&mut perm, &mut |p| {
        if check(p) {
            found = true;
            false
        } else {
            true
        }
    });
    found
}

fn hypergraphs_isomorphic(x: &Hypergraph, y: &Hypergraph) -> bool {
    if x.n() != y.n() || x.hyperedges().len() != y.hyperedges().len() {
        return false;
    }
    let mut sizes_x: Vec<usize> = x.hyperedges().iter().map(Vec::len).collect();
    let mut sizes_y: Vec<usize> = y.hyperedges().iter().map(Vec::len).collect();
    sizes_x.sort_unstable();
    sizes_y.sort_unstable();
    if sizes_x != sizes_y {
        return false;
    }
    any_permutation(x.n(), |p| {
        for (i, e) in x.hyperedges().iter().enumerate() {
            let image: Vec<usize> = e.iter().map(|&v| p[v]).collect();
            match y.hyperedge_id(&image) {
                Some(j) => {
                    if x.features().get(EntityRef::hyperedge(i))
                        != y.features().get(EntityRef::hyperedge(j))
                    {
                        return false;
                    }
                }
                None => return false,
            }
        }
        (0..x.n()).all(|v| {
            x.features().get(EntityRef::vertex(v)) == y.features().get(EntityRef::vertex(p[v]))
        })
    })
}

fn cell_complexes_isomorphic(x: &CellComplex, y: &CellComplex) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let max_dim = match (x.dimension(), y.dimension()) {
        (Ok(a), Ok(b)) if a == b => a,
        (Err(_), Err(_)) => return true, // both empty
        _ => return false,
    };
    for d in 0..=max_dim {
        if x.cells_of_dim(d).count() != y.cells_of_dim(d).count() {
            return false;
        }
    }
    // mapping[i] = canonical index in y assigned to x's canonical index i
    let mut mapping: Vec<Option<usize>> = vec![None; x.len()];
    let mut used: Vec<bool> = vec![false; y.len()];
    let per_dim: Vec<Vec<usize>> = (0..=max_dim)
        .map(|d| x.cells_of_dim(d).map(|(i, _)| i).collect())
        .collect();
    let flat: Vec<usize> = per_dim.into_iter().flatten().collect();
    extend_cell_match(x, y, &flat, 0, &mut mapping, &mut used)
}

fn extend_cell_match(
    x: &CellComplex,
    y: &CellComplex,
    order: &[usize],
    pos: usize,
    mapping: &mut Vec<Option<usize>>,
    used: &mut Vec<bool>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let xi = order[pos];
    let dim = x.cells()[xi].dim;
    let image: BTreeSet<usize> = x
        .boundary_indices(xi)
        .into_iter()
        .map(|b| mapping[b].expect("boundary cells are matched before their cofaces"))
        .collect();
    let feat = x.features().get(EntityRef::cell(xi));
    for (yi, cell) in y.cells_of_dim(dim) {
        if used[yi] || cell.dim != dim {
            continue;
        }
        let y_boundary: BTreeSet<usize> = y.boundary_indices(yi).into_iter().collect();
        if y_boundary != image || y.features().get(EntityRef::cell(yi)) != feat {
            continue;
        }
        mapping[xi] = Some(yi);
        used[yi] = true;
        if extend_cell_match(x, y, order, pos + 1, mapping, used) {
            return true;
        }
        mapping[xi] = None;
        used[yi] = false;
    }
    false
}

fn graph_preserved(gx: &Graph, gy: &Graph, p: &[usize]) -> bool {
    gx.m() == gy.m()
        && gx.edges().all(|(u, v)| gy.has_edge(p[u], p[v]))
        && (0..gx.n()).all(|v| gx.vertex_feature(v) == gy.vertex_feature(p[v]))
}

fn ntcols_isomorphic(x: &NodeTupleCollection, y: &NodeTupleCollection) -> bool {
    if x.base().n() != y.base().n() || x.tuples().len() != y.tuples().len() {
        return false;
    }
    any_permutation(x.base().n(), |p| {
        if !graph_preserved(x.base(), y.base(), p) {
            return false;
        }
        x.tuples().iter().enumerate().all(|(i, t)| {
            let image: Vec<usize> = t.iter().map(|&v| p[v]).collect();
            match y.tuple_id(&image) {
                Some(j) => {
                    x.features().get(EntityRef::tuple(i)) == y.features().get(EntityRef::tuple(j))
                }
                None => false,
            }
        })
    })
}

fn scols_isomorphic(x: &SubgraphCollection, y: &SubgraphCollection) -> bool {
    if x.base().n() != y.base().n()
        || x.subgraphs().len() != y.subgraphs().len()
        || x.is_ordered() != y.is_ordered()
    {
        return false;
    }
    any_permutation(x.base().n(), |p| {
        if !graph_preserved(x.base(), y.base(), p) {
            return false;
        }
        let mapped: Vec<(BTreeSet<usize>, BTreeSet<(usize, usize)>, Vec<u8>)> = x
            .subgraphs()
            .iter()
            .enumerate()
            .map(|(i, sg)| {
                let vs: BTreeSet<usize> = sg.vertices.iter().map(|&v| p[v]).collect();
                let es: BTreeSet<(usize, usize)> = sg
                    .edges
                    .iter()
                    .map(|&(u, v)| {
                        let (a, b) = (p[u], p[v]);
                        (a.min(b), a.max(b))
                    })
                    .collect();
                (vs, es, feature_bytes(x.features().get(EntityRef::subgraph(i))))
            })
            .collect();
        let targets: Vec<(BTreeSet<usize>, BTreeSet<(usize, usize)>, Vec<u8>)> = y
            .subgraphs()
            .iter()
            .enumerate()
            .map(|(j, sg)| {
                (
                    sg.vertices.clone(),
                    sg.edges.clone(),
                    feature_bytes(y.features().get(EntityRef::subgraph(j))),
                )
            })
            .collect();
        if x.is_ordered() {
            mapped == targets
        } else {
            let mut a = mapped;
            let mut b = targets;
            a.sort();
            b.sort();
            a == b
        }
    })
}

/// f64 bit patterns, so feature vectors can be ordered and compared exactly.
fn feature_bytes(f: &[f64]) -> Vec<u8> {
    f.iter().flat_map(|x| x.to_bits().to_be_bytes()).collect()
}

fn motif_graphs_isomorphic(x: &MotifGraph, y: &MotifGraph) -> Result<bool> {
    if x.base().n() != y.base().n() || x.motifs().len() != y.motifs().len() {
        return Ok(false);
    }
    for (mx, my) in x.motifs().iter().zip(y.motifs()) {
        if !are_isomorphic_bruteforce(mx, my)? {
            return Ok(false);
        }
    }
    let n = x.base().n();
    Ok(any_permutation(n, |p| {
        graph_preserved(x.base(), y.base(), p)
            && x.weights().iter().zip(y.weights()).all(|(wx, wy)| {
                (0..n).all(|u| (0..n).all(|v| wx[u][v] == wy[p[u]][p[v]]))
            })
    }))
}

fn scnt_graphs_isomorphic(x: &SubgraphCountGraph, y: &SubgraphCountGraph) -> bool {
    if x.base().n() != y.base().n() {
        return false;
    }
    any_permutation(x.base().n(), |p| {
        graph_preserved(x.base(), y.base(), p)
            && (0..x.base().n()).all(|v| x.vertex_counts()[v] == y.vertex_counts()[p[v]])
    })
}

fn nested_isomorphic(x: &NestedGraph, y: &NestedGraph) -> Result<bool> {
    if x.outer().n() != y.outer().n() {
        return Ok(false);
    }
    // Precompute the inner-graph isomorphism table so the permutation loop
    // stays cheap.
    let n = x.outer().n();
    let mut inner_iso = vec![vec![false; n]; n];
    for (i, gi) in x.inner().iter().enumerate() {
        for (j, gj) in y.inner().iter().enumerate() {
            inner_iso[i][j] = are_isomorphic_bruteforce(gi, gj)?;
        }
    }
    Ok(any_permutation(n, |p| {
        graph_preserved(x.outer(), y.outer(), p) && (0..n).all(|v| inner_iso[v][p[v]])
    }))
}

/// Relabels any structure along a vertex permutation (cell complexes get a
/// matching id permutation derived from the 0-cell order). Used by tests
/// and the equivariance suite.
pub fn relabel_structure(s: &HoStructure, p: &VertexPermutation) -> Result<HoStructure> {
    Ok(match s {
        HoStructure::Hypergraph(h) => HoStructure::Hypergraph(h.relabel(p)?),
        HoStructure::SimplicialComplex(sc) => HoStructure::SimplicialComplex(sc.relabel(p)?),
        HoStructure::CellComplex(cc) => {
            // Permute 0-cell ids along p (0-cells in canonical order play
            // the vertex role); higher cells keep their ids.
            let zero: Vec<usize> = cc.cells_of_dim(0).map(|(_, c)| c.id).collect();
            let mut rename: std::collections::BTreeMap<usize, usize> =
                cc.cells().iter().map(|c| (c.id, c.id)).collect();
            for (i, &id) in zero.iter().enumerate() {
                rename.insert(id, zero[p.apply(i)]);
            }
            HoStructure::CellComplex(cc.relabel_ids(&rename)?)
        }
        HoStructure::NodeTupleCollection(c) => HoStructure::NodeTupleCollection(c.relabel(p)?),
        HoStructure::SubgraphCollection(c) => HoStructure::SubgraphCollection(c.relabel(p)?),
        HoStructure::MotifGraph(m) => HoStructure::MotifGraph(m.relabel(p)?),
        HoStructure::SubgraphCountGraph(s) => HoStructure::SubgraphCountGraph(s.relabel(p)?),
        HoStructure::NestedGraph(n) => HoStructure::NestedGraph(n.relabel(p)?),
    })
}

/// Relabels a structure and also returns, per entity class, the map from
/// old canonical indices to new ones, so state matrices can be permuted
/// alongside the structure.
pub fn relabel_with_maps(
    s: &HoStructure,
    p: &VertexPermutation,
) -> Result<(
    HoStructure,
    std::collections::BTreeMap<crate::entity::EntityClass, Vec<usize>>,
)> {
    use crate::entity::EntityClass;
    let relabeled = relabel_structure(s, p)?;
    let mut maps = std::collections::BTreeMap::new();
    let vertex_map: Vec<usize> = (0..s.vertex_count()).map(|v| p.apply(v)).collect();
    match (s, &relabeled) {
        (HoStructure::Hypergraph(a), HoStructure::Hypergraph(b)) => {
            maps.insert(EntityClass::Vertex, vertex_map);
            maps.insert(EntityClass::Hyperedge, hyperedge_index_map(a, b, p));
        }
        (HoStructure::SimplicialComplex(a), HoStructure::SimplicialComplex(b)) => {
            maps.insert(EntityClass::Vertex, vertex_map);
            maps.insert(
                EntityClass::Hyperedge,
                hyperedge_index_map(a.hg(), b.hg(), p),
            );
        }
        (HoStructure::CellComplex(a), HoStructure::CellComplex(b)) => {
            let zero: Vec<usize> = a.cells_of_dim(0).map(|(_, c)| c.id).collect();
            let rename: std::collections::BTreeMap<usize, usize> = a
                .cells()
                .iter()
                .map(|c| (c.id, c.id))
                .chain(
                    zero.iter()
                        .enumerate()
                        .map(|(i, &id)| (id, zero[p.apply(i)])),
                )
                .collect();
            let cell_map: Vec<usize> = a
                .cells()
                .iter()
                .map(|c| b.index_of(rename[&c.id]).expect("renamed cell exists"))
                .collect();
            maps.insert(EntityClass::Cell, cell_map);
        }
        (HoStructure::NodeTupleCollection(a), HoStructure::NodeTupleCollection(b)) => {
            maps.insert(EntityClass::Vertex, vertex_map);
            let tuple_map: Vec<usize> = a
                .tuples()
                .iter()
                .map(|t| {
                    let image: Vec<usize> = t.iter().map(|&v| p.apply(v)).collect();
                    b.tuple_id(&image).expect("relabeled tuple exists")
                })
                .collect();
            maps.insert(EntityClass::Tuple, tuple_map);
        }
        (HoStructure::SubgraphCollection(a), HoStructure::SubgraphCollection(_)) => {
            maps.insert(EntityClass::Vertex, vertex_map);
            // Subgraph list order is preserved by relabeling.
            maps.insert(EntityClass::Subgraph, (0..a.subgraphs().len()).collect());
        }
        _ => {
            maps.insert(EntityClass::Vertex, vertex_map);
        }
    }
    Ok((relabeled, maps))
}

fn hyperedge_index_map(a: &Hypergraph, b: &Hypergraph, p: &VertexPermutation) -> Vec<usize> {
    a.hyperedges()
        .iter()
        .map(|e| {
            let image: Vec<usize> = e.iter().map(|&v| p.apply(v)).collect();
            b.hyperedge_id(&image).expect("relabeled hyperedge exists")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete_graph;

    fn hg(n: usize, edges: &[Vec<usize>]) -> HoStructure {
        HoStructure::Hypergraph(Hypergraph::new(n, edges).unwrap())
    }

    #[test]
    fn hypergraph_relabeling_found() {
        let a = hg(3, &[vec![0, 1], vec![0, 1, 2]]);
        let b = hg(3, &[vec![1, 2], vec![0, 1, 2]]);
        assert!(ho_isomorphic_bruteforce(&a, &b).unwrap());
    }

    #[test]
    fn hyperedge_count_mismatch() {
        let a = hg(3, &[vec![0, 1], vec![0, 1, 2]]);
        let b = hg(3, &[vec![0, 1, 2]]);
        assert!(!ho_isomorphic_bruteforce(&a, &b).unwrap());
    }

    #[test]
    fn tuple_order_needs_automorphism() {
        let base = complete_graph(2);
        let a = HoStructure::NodeTupleCollection(
            NodeTupleCollection::new(base.clone(), &[vec![0, 1]], 2).unwrap(),
        );
        let b = HoStructure::NodeTupleCollection(
            NodeTupleCollection::new(base, &[vec![1, 0]], 2).unwrap(),
        );
        // 0 <-> 1 is an automorphism of K2 mapping (0,1) to (1,0)
        assert!(ho_isomorphic_bruteforce(&a, &b).unwrap());
    }

    #[test]
    fn kind_and_size_guards() {
        let a = hg(3, &[vec![0, 1]]);
        let cc = HoStructure::CellComplex(CellComplex::new(vec![]).unwrap());
        assert!(matches!(
            ho_isomorphic_bruteforce(&a, &cc),
            Err(Error::KindMismatch { .. })
        ));
        let big = hg(9, &[]);
        assert!(matches!(
            ho_isomorphic_bruteforce(&big, &big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn relabel_is_isomorphic_for_every_kind() {
        use crate::transform::{cell_lift, clique_complex_lift, ego_net_collection, motif_lift};
        let g = crate::graph::two_triangles();
        let p = VertexPermutation::new(vec![3, 5, 4, 0, 2, 1]).unwrap();
        let structures = vec![
            hg(6, &[vec![0, 1, 2], vec![3, 4], vec![5]]),
            HoStructure::SimplicialComplex(clique_complex_lift(&g, 3)),
            HoStructure::CellComplex(cell_lift(&g, 2, 6, 0).unwrap()),
            HoStructure::SubgraphCollection(ego_net_collection(&g, 1, true).unwrap()),
            HoStructure::MotifGraph(motif_lift(&g, &[complete_graph(3)]).unwrap()),
        ];
        for s in structures {
            let r = relabel_structure(&s, &p).unwrap();
            assert!(
                ho_isomorphic_bruteforce(&s, &r).unwrap(),
                "relabeled {} must stay isomorphic",
                s.kind()
            );
        }
    }
}
