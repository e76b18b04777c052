//! Liftings from plain graphs to higher-order structures and lossy
//! lowerings back.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adjacency::motif_adjacency;
use crate::entity::{EntityRef, FeatureMap};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::{
    Cell, CellComplex, Hypergraph, MotifGraph, NodeTupleCollection, SimplicialComplex,
    SubgraphCollection, SubgraphDef, WeightMatrix,
};

/// How lifted entities inherit features from their member vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LiftFeatureMode {
    /// Sum of member-vertex features (injectivity-friendlier default).
    #[default]
    Sum,
    Mean,
}

fn combine_features(g: &Graph, members: &[usize], mode: LiftFeatureMode) -> Option<Vec<f64>> {
    let width = g.feature_width();
    if width == 0 {
        return None;
    }
    let mut acc = vec![0.0; width];
    for &v in members {
        for (i, x) in g.vertex_feature(v).iter().enumerate() {
            acc[i] += x;
        }
    }
    if mode == LiftFeatureMode::Mean && !members.is_empty() {
        for x in &mut acc {
            *x /= members.len() as f64;
        }
    }
    Some(acc)
}

/// All cliques of size 2..=k, each sorted ascending.
fn enumerate_cliques(g: &Graph, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(g: &Graph, k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() >= 2 {
            out.push(current.clone());
        }
        if current.len() == k {
            return;
        }
        for v in start..g.n() {
            if current.iter().all(|&u| g.has_edge(u, v)) {
                current.push(v);
                extend(g, k, v + 1, current, out);
                current.pop();
            }
        }
    }
    extend(g, k, 0, &mut current, &mut out);
    out
}

/// Clique-complex lifting: a hyperedge for every clique of size 2..=k.
pub fn clique_complex_lift(g: &Graph, k: usize) -> SimplicialComplex {
    clique_complex_lift_with(g, k, LiftFeatureMode::default())
}

pub fn clique_complex_lift_with(g: &Graph, k: usize, mode: LiftFeatureMode) -> SimplicialComplex {
    assert!(k >= 2, "clique cap must be at least 2");
    let cliques = enumerate_cliques(g, k);
    let hg = Hypergraph::new(g.n(), &cliques).expect("cliques are valid hyperedges");
    let mut features = FeatureMap::new();
    for v in 0..g.n() {
        let f = g.vertex_feature(v);
        if !f.is_empty() {
            features.insert(EntityRef::vertex(v), f.to_vec());
        }
    }
    for (i, e) in hg.hyperedges().iter().enumerate() {
        if let Some(f) = combine_features(g, e, mode) {
            features.insert(EntityRef::hyperedge(i), f);
        }
    }
    SimplicialComplex::new(
        Hypergraph::with_features(g.n(), &cliques, features).expect("validated above"),
    )
}

/// All simple cycles of length 3..=max_len, each as a closed vertex walk
/// starting at its minimum vertex, deduplicated up to rotation and
/// reflection.
fn enumerate_cycles(g: &Graph, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if max_len < 3 {
        return out;
    }
    let n = g.n();
    let mut path: Vec<usize> = Vec::new();
    fn dfs(g: &Graph, start: usize, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().unwrap();
        for v in g.neighbors(last) {
            if v == start && path.len() >= 3 {
                // Reflection dedup: keep the orientation whose second vertex
                // is smaller than the last.
                if path[1] < *path.last().unwrap() {
                    out.push(path.clone());
                }
                continue;
            }
            // Rotation dedup: the start is the minimum vertex of the cycle.
            if v <= start || path.contains(&v) || path.len() == max_len {
                continue;
            }
            path.push(v);
            dfs(g, start, max_len, path, out);
            path.pop();
        }
    }
    for start in 0..n {
        path.clear();
        path.push(start);
        dfs(g, start, max_len, &mut path, &mut out);
    }
    out
}

/// Is the cycle chordless (no edge between non-consecutive members)?
fn is_induced_cycle(g: &Graph, cycle: &[usize]) -> bool {
    let len = cycle.len();
    for i in 0..len {
        for j in (i + 1)..len {
            let consecutive = j == i + 1 || (i == 0 && j == len - 1);
            if !consecutive && g.has_edge(cycle[i], cycle[j]) {
                return false;
            }
        }
    }
    true
}

/// Cell lifting: a (s-1)-cell for every clique of size s <= k_cl, a 2-cell
/// for every induced cycle of length <= k_ind_cycle and every cycle of
/// length <= k_cycle. Each distinct cycle contributes at most one 2-cell.
pub fn cell_lift(g: &Graph, k_cl: usize, k_ind_cycle: usize, k_cycle: usize) -> Result<CellComplex> {
    cell_lift_with(g, k_cl, k_ind_cycle, k_cycle, LiftFeatureMode::default())
}

pub fn cell_lift_with(
    g: &Graph,
    k_cl: usize,
    k_ind_cycle: usize,
    k_cycle: usize,
    mode: LiftFeatureMode,
) -> Result<CellComplex> {
    if k_cycle > k_ind_cycle {
        return Err(Error::BoundsInverted {
            k_cycle,
            k_ind_cycle,
        });
    }
    if k_cl < 2 {
        return Err(Error::InvalidDocument(
            "clique cap below 2 cannot preserve the 1-skeleton".into(),
        ));
    }
    let n = g.n();
    let edges = g.edge_vec();
    // id scheme: 0-cells are 0..n, 1-cells follow in canonical edge order,
    // then higher cells in insertion order.
    let mut cells: Vec<Cell> = (0..n)
        .map(|v| Cell {
            id: v,
            dim: 0,
            boundary: BTreeSet::new(),
        })
        .collect();
    let edge_cell: BTreeMap<(usize, usize), usize> = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, n + i))
        .collect();
    for (&(u, v), &id) in &edge_cell {
        cells.push(Cell {
            id,
            dim: 1,
            boundary: BTreeSet::from([u, v]),
        });
    }
    let mut next_id = n + edges.len();
    let mut members_of: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    // Clique cells of dimension >= 2, level by level so boundaries resolve.
    let mut clique_cell: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let cliques = enumerate_cliques(g, k_cl);
    let mut by_size: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for c in cliques {
        by_size.entry(c.len()).or_default().push(c);
    }
    for (size, list) in by_size.range(3..) {
        for clique in list {
            let boundary: BTreeSet<usize> = subsets_one_smaller(clique)
                .into_iter()
                .map(|sub| {
                    if sub.len() == 2 {
                        edge_cell[&(sub[0], sub[1])]
                    } else {
                        clique_cell[&sub]
                    }
                })
                .collect();
            cells.push(Cell {
                id: next_id,
                dim: size - 1,
                boundary,
            });
            clique_cell.insert(clique.clone(), next_id);
            members_of.insert(next_id, clique.clone());
            next_id += 1;
        }
    }

    // Cycle 2-cells, one per distinct edge set. Triangles may already be
    // present as clique cells.
    let max_len = k_ind_cycle.max(k_cycle);
    let mut seen_edge_sets: BTreeSet<BTreeSet<usize>> = cells
        .iter()
        .filter(|c| c.dim == 2)
        .map(|c| c.boundary.clone())
        .collect();
    for cycle in enumerate_cycles(g, max_len) {
        let len = cycle.len();
        let qualifies = (len <= k_cycle) || (len <= k_ind_cycle && is_induced_cycle(g, &cycle));
        if !qualifies {
            continue;
        }
        let boundary: BTreeSet<usize> = (0..len)
            .map(|i| {
                let (u, v) = (cycle[i], cycle[(i + 1) % len]);
                edge_cell[&(u.min(v), u.max(v))]
            })
            .collect();
        if seen_edge_sets.insert(boundary.clone()) {
            cells.push(Cell {
                id: next_id,
                dim: 2,
                boundary,
            });
            members_of.insert(next_id, cycle.clone());
            next_id += 1;
        }
    }

    let cc = CellComplex::new(cells)?;
    let mut features = FeatureMap::new();
    if g.feature_width() > 0 {
        for (idx, cell) in cc.cells().iter().enumerate() {
            let members: Vec<usize> = if cell.dim == 0 {
                vec![cell.id]
            } else if cell.dim == 1 {
                let (u, v) = edges[cell.id - n];
                vec![u, v]
            } else {
                members_of[&cell.id].clone()
            };
            if let Some(f) = combine_features(g, &members, mode) {
                features.insert(EntityRef::cell(idx), f);
            }
        }
    }
    CellComplex::with_features(cc.cells().to_vec(), features)
}

fn subsets_one_smaller(set: &[usize]) -> Vec<Vec<usize>> {
    (0..set.len())
        .map(|skip| {
            set.iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect()
        })
        .collect()
}

/// Budget caps for the dense tuple lifting.
pub const ISO_TYPE_N_CAP: usize = 8;
pub const ISO_TYPE_K_CAP: usize = 3;

/// Equality indicators, adjacency indicators (both in i < j lexicographic
/// order), then the member-vertex features.
pub fn iso_type(tuple: &[usize], g: &Graph) -> Result<Vec<f64>> {
    for &v in tuple {
        if v >= g.n() {
            return Err(Error::OutOfRange {
                index: v,
                size: g.n(),
            });
        }
    }
    let k = tuple.len();
    let mut out = Vec::with_capacity(k * (k - 1) + k * g.feature_width());
    for i in 0..k {
        for j in (i + 1)..k {
            out.push(if tuple[i] == tuple[j] { 1.0 } else { 0.0 });
        }
    }
    for i in 0..k {
        for j in (i + 1)..k {
            out.push(if g.has_edge(tuple[i], tuple[j]) { 1.0 } else { 0.0 });
        }
    }
    for &v in tuple {
        out.extend_from_slice(g.vertex_feature(v));
    }
    Ok(out)
}

/// All tuples of length `k` over `0..n`, in lexicographic order.
pub fn all_tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t2 = t.clone();
                    t2.push(v);
                    t2
                })
            })
            .collect();
    }
    out
}

/// Dense iso-type lifting: every tuple of length 2..=k_max with its
/// iso-type attached as the tuple feature.
pub fn iso_type_lift(g: &Graph, k_max: usize) -> Result<NodeTupleCollection> {
    let n_cap = crate::budget::cap(ISO_TYPE_N_CAP);
    if g.n() > n_cap {
        return Err(Error::BudgetExceeded {
            what: "n",
            value: g.n(),
            cap: n_cap,
        });
    }
    if k_max > ISO_TYPE_K_CAP {
        return Err(Error::BudgetExceeded {
            what: "k_max",
            value: k_max,
            cap: ISO_TYPE_K_CAP,
        });
    }
    let mut tuples = Vec::new();
    for k in 2..=k_max {
        tuples.extend(all_tuples(g.n(), k));
    }
    let mut c = NodeTupleCollection::new(g.clone(), &tuples, k_max.max(2))?;
    for (i, t) in c.tuples().to_vec().iter().enumerate() {
        c.set_feature(EntityRef::tuple(i), iso_type(t, g)?)?;
    }
    Ok(c)
}

/// One subgraph per vertex: the ball of radius `r` around it. `induced`
/// keeps all base edges inside the ball; otherwise only the BFS level
/// edges (between vertices at consecutive distances) are kept.
pub fn ego_net_collection(g: &Graph, r: usize, induced: bool) -> Result<SubgraphCollection> {
    if r == 0 {
        return Err(Error::InvalidDocument("ego radius must be at least 1".into()));
    }
    let mut subgraphs = Vec::with_capacity(g.n());
    for v in 0..g.n() {
        let dist = g.distances(v);
        let ball: BTreeSet<usize> = (0..g.n())
            .filter(|&u| matches!(dist[u], Some(d) if d <= r))
            .collect();
        let edges: Vec<(usize, usize)> = g
            .edges()
            .filter(|&(a, b)| ball.contains(&a) && ball.contains(&b))
            .filter(|&(a, b)| induced || dist[a].unwrap().abs_diff(dist[b].unwrap()) == 1)
            .collect();
        subgraphs.push(SubgraphDef::new(ball, &edges));
    }
    SubgraphCollection::new(g.clone(), subgraphs, false)
}

/// How node-deleted subgraphs are generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DeletionMode {
    /// One subgraph per vertex, deleting exactly that vertex.
    AllSingleDeletions,
    /// `count` subgraphs; each deletes every vertex independently with
    /// probability 1/n, reproducibly under `seed`.
    Sampled { count: usize, seed: u64 },
}

/// Induced subgraphs after node deletions; original vertex labels are kept.
pub fn node_deleted_collection(g: &Graph, mode: DeletionMode) -> Result<SubgraphCollection> {
    if g.n() < 2 {
        return Err(Error::InvalidDocument(
            "node deletion needs at least two vertices".into(),
        ));
    }
    let induced = |keep: &BTreeSet<usize>| -> SubgraphDef {
        let edges: Vec<(usize, usize)> = g
            .edges()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .collect();
        SubgraphDef::new(keep.iter().copied(), &edges)
    };
    let mut subgraphs = Vec::new();
    match mode {
        DeletionMode::AllSingleDeletions => {
            for v in 0..g.n() {
                let keep: BTreeSet<usize> = (0..g.n()).filter(|&u| u != v).collect();
                subgraphs.push(induced(&keep));
            }
        }
        DeletionMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = 1.0 / g.n() as f64;
            // All randomness is drawn sequentially up front so results do
            // not depend on any later evaluation order.
            for _ in 0..count {
                let keep: BTreeSet<usize> =
                    (0..g.n()).filter(|_| rng.gen::<f64>() >= p).collect();
                subgraphs.push(induced(&keep));
            }
        }
    }
    SubgraphCollection::new(g.clone(), subgraphs, false)
}

/// Clique expansion: every hyperedge becomes a clique on its members.
pub fn clique_expansion(h: &Hypergraph) -> Graph {
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for e in h.hyperedges() {
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                edges.insert((e[i], e[j]));
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    let mut features = FeatureMap::new();
    for v in 0..h.n() {
        let f = h.features().get(EntityRef::vertex(v));
        if !f.is_empty() {
            features.insert(EntityRef::vertex(v), f.to_vec());
        }
    }
    Graph::with_options(h.n(), &edges, false, features).expect("expansion edges are valid")
}

/// Bipartite lowering: one new vertex per hyperedge, joined to its members.
pub fn bipartite_lowering(h: &Hypergraph) -> Graph {
    let n = h.n();
    let edges: Vec<(usize, usize)> = h
        .hyperedges()
        .iter()
        .enumerate()
        .flat_map(|(j, e)| e.iter().map(move |&v| (v, n + j)))
        .collect();
    Graph::new(n + h.hyperedges().len(), &edges).expect("bipartite edges are valid")
}

/// Star expansion: the bipartite lowering with a class flag appended to
/// every feature row (0 for original vertices, 1 for hyperedge vertices),
/// so consumers can tell the two sides apart and the hypergraph stays
/// recoverable.
pub fn star_expansion(h: &Hypergraph) -> Graph {
    let g = bipartite_lowering(h);
    let n = h.n();
    let width = (0..n)
        .map(|v| h.features().get(EntityRef::vertex(v)).len())
        .max()
        .unwrap_or(0);
    let rows: Vec<Vec<f64>> = (0..g.n())
        .map(|v| {
            let mut row = vec![0.0; width + 1];
            if v < n {
                for (i, x) in h.features().get(EntityRef::vertex(v)).iter().enumerate() {
                    row[i] = *x;
                }
            } else {
                row[width] = 1.0;
            }
            row
        })
        .collect();
    g.with_vertex_features(&rows).expect("row count matches")
}

/// A plain graph with a symmetric integer weight on every edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub graph: Graph,
    pub weights: WeightMatrix,
}

/// Weighted lowering: w(u, v) counts the hyperedges containing both.
pub fn weighted_lowering(h: &Hypergraph) -> WeightedGraph {
    let n = h.n();
    let mut w = vec![vec![0u64; n]; n];
    for e in h.hyperedges() {
        for i in 0..e.len() {
            for j in (i + 1)..e.len() {
                w[e[i]][e[j]] += 1;
                w[e[j]][e[i]] += 1;
            }
        }
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|&(u, v)| w[u][v] > 0)
        .collect();
    WeightedGraph {
        graph: Graph::new(n, &edges).expect("weighted edges are valid"),
        weights: w,
    }
}

/// Bundles the per-motif weighted adjacencies into a motif graph.
pub fn motif_lift(g: &Graph, motifs: &[Graph]) -> Result<MotifGraph> {
    let weights: Vec<WeightMatrix> = motifs
        .iter()
        .map(|m| motif_adjacency(g, m))
        .collect::<Result<_>>()?;
    MotifGraph::new(g.clone(), motifs.to_vec(), weights)
}
