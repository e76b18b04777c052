//! Neighborhood operators over hypergraphs, simplicial complexes, and cell
//! complexes, node-tuple adjacencies, and the incidence/boundary matrices
//! feeding matrix-form updates.
//!
//! For hypergraphs and simplicial complexes the strict-containment relation
//! `b < c` means "the vertex set of b is a proper subset of the vertex set
//! of c". For cell complexes it is the stored attachment relation (one
//! dimension down). The four derived neighborhoods quantify the witness
//! entity over all of V union E literally; the focal entity itself is
//! excluded by default, with an inclusive switch for reproducing the
//! paper-style message accounting.

use ndarray::Array2;

use crate::entity::{EntityClass, EntityRef};
use crate::error::{Error, Result};
use crate::graph::{are_isomorphic_bruteforce, Graph};
use crate::hogdm::{
    CellComplex, Hypergraph, NodeTupleCollection, SimplicialComplex, SubgraphCountGraph,
    WeightMatrix,
};

/// Cap on motif size: subgraph enumeration is exponential in it.
pub const MOTIF_CAP: usize = 5;

/// A structure the containment-based neighborhoods operate on.
#[derive(Debug, Clone, Copy)]
pub enum Complex<'a> {
    Hypergraph(&'a Hypergraph),
    CellComplex(&'a CellComplex),
}

impl<'a> From<&'a Hypergraph> for Complex<'a> {
    fn from(h: &'a Hypergraph) -> Self {
        Complex::Hypergraph(h)
    }
}

impl<'a> From<&'a SimplicialComplex> for Complex<'a> {
    fn from(s: &'a SimplicialComplex) -> Self {
        Complex::Hypergraph(s.hg())
    }
}

impl<'a> From<&'a CellComplex> for Complex<'a> {
    fn from(c: &'a CellComplex) -> Self {
        Complex::CellComplex(c)
    }
}

impl<'a> Complex<'a> {
    /// All entities in canonical order.
    pub fn entities(&self) -> Vec<EntityRef> {
        match self {
            Complex::Hypergraph(h) => (0..h.n())
                .map(EntityRef::vertex)
                .chain((0..h.hyperedges().len()).map(EntityRef::hyperedge))
                .collect(),
            Complex::CellComplex(c) => (0..c.len()).map(EntityRef::cell).collect(),
        }
    }

    pub fn contains(&self, e: EntityRef) -> bool {
        match self {
            Complex::Hypergraph(h) => match e.class {
                EntityClass::Vertex => e.id < h.n(),
                EntityClass::Hyperedge => e.id < h.hyperedges().len(),
                _ => false,
            },
            Complex::CellComplex(c) => e.class == EntityClass::Cell && e.id < c.len(),
        }
    }

    /// Entity level: vertex-set cardinality minus one for hypergraph
    /// entities, cell dimension for complexes.
    pub fn level(&self, e: EntityRef) -> usize {
        match self {
            Complex::Hypergraph(h) => match e.class {
                EntityClass::Vertex => 0,
                EntityClass::Hyperedge => h.hyperedges()[e.id].len() - 1,
                _ => 0,
            },
            Complex::CellComplex(c) => c.cells()[e.id].dim,
        }
    }

    /// Strict containment `b < c`.
    pub fn prec(&self, b: EntityRef, c: EntityRef) -> bool {
        match self {
            Complex::Hypergraph(h) => {
                let sub = hat(h, b);
                let sup = hat(h, c);
                sub.len() < sup.len() && sub.iter().all(|v| sup.binary_search(v).is_ok())
            }
            Complex::CellComplex(cc) => {
                c.class == EntityClass::Cell
                    && b.class == EntityClass::Cell
                    && cc.boundary_indices(c.id).contains(&b.id)
            }
        }
    }

    fn check(&self, c: EntityRef) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::UnknownEntity(c.to_string()))
        }
    }
}

/// The vertex set an entity stands for.
fn hat(h: &Hypergraph, e: EntityRef) -> Vec<usize> {
    match e.class {
        EntityClass::Vertex => vec![e.id],
        EntityClass::Hyperedge => h.hyperedges()[e.id].clone(),
        _ => Vec::new(),
    }
}

/// Entities strictly contained in `c`.
pub fn boundary(host: Complex<'_>, c: EntityRef) -> Result<Vec<EntityRef>> {
    host.check(c)?;
    Ok(host
        .entities()
        .into_iter()
        .filter(|&b| host.prec(b, c))
        .collect())
}

/// Entities strictly containing `c`.
pub fn coboundary(host: Complex<'_>, c: EntityRef) -> Result<Vec<EntityRef>> {
    host.check(c)?;
    Ok(host
        .entities()
        .into_iter()
        .filter(|&d| host.prec(c, d))
        .collect())
}

/// Entities sharing some boundary witness with `c`.
pub fn lower_adjacent(host: Complex<'_>, c: EntityRef, include_self: bool) -> Result<Vec<EntityRef>> {
    host.check(c)?;
    let entities = host.entities();
    Ok(entities
        .iter()
        .copied()
        .filter(|&b| {
            (include_self || b != c)
                && entities.iter().any(|&tau| host.prec(tau, b) && host.prec(tau, c))
        })
        .collect())
}

/// Entities sharing some coboundary witness with `c`.
pub fn upper_adjacent(host: Complex<'_>, c: EntityRef, include_self: bool) -> Result<Vec<EntityRef>> {
    host.check(c)?;
    let entities = host.entities();
    Ok(entities
        .iter()
        .copied()
        .filter(|&d| {
            (include_self || d != c)
                && entities.iter().any(|&tau| host.prec(c, tau) && host.prec(d, tau))
        })
        .collect())
}

/// Shared coboundary witnesses of `c` and `d`, for materializing
/// upper-adjacency channels as (c, d, via) triples.
pub fn shared_coboundaries(host: Complex<'_>, c: EntityRef, d: EntityRef) -> Vec<EntityRef> {
    host.entities()
        .into_iter()
        .filter(|&tau| host.prec(c, tau) && host.prec(d, tau))
        .collect()
}

/// Shared boundary witnesses of `c` and `d`, the lower-adjacency analogue.
pub fn shared_boundaries(host: Complex<'_>, c: EntityRef, d: EntityRef) -> Vec<EntityRef> {
    host.entities()
        .into_iter()
        .filter(|&tau| host.prec(tau, c) && host.prec(tau, d))
        .collect()
}

/// Down-adjacency of a node tuple.
///
/// Exclusive mode returns the tuples of the collection differing from `v`
/// in exactly one coordinate. Inclusive mode is the message-accounting
/// neighborhood: tuples agreeing with `v` in at least one coordinate (for
/// pairs the two notions coincide; `v` itself is reachable). Counted with
/// one channel per agreeing coordinate, a full length-k collection yields
/// exactly k * n^(k-1) neighbors per tuple.
pub fn down_adjacency(c: &NodeTupleCollection, v: &[usize], inclusive: bool) -> Result<Vec<Vec<usize>>> {
    if c.tuple_id(v).is_none() {
        return Err(Error::UnknownTuple(v.to_vec()));
    }
    let k = v.len();
    let mut out: Vec<Vec<usize>> = c
        .tuples()
        .iter()
        .filter(|u| u.len() == k)
        .filter(|u| {
            let agree = v.iter().zip(u.iter()).filter(|(a, b)| a == b).count();
            if inclusive {
                agree >= 1
            } else {
                agree == k - 1
            }
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// Local down-adjacency: tuples differing in exactly one coordinate whose
/// replaced pair is a base edge.
pub fn local_down_adjacency(c: &NodeTupleCollection, v: &[usize]) -> Result<Vec<Vec<usize>>> {
    if c.tuple_id(v).is_none() {
        return Err(Error::UnknownTuple(v.to_vec()));
    }
    let k = v.len();
    let base = c.base();
    let mut out: Vec<Vec<usize>> = c
        .tuples()
        .iter()
        .filter(|u| u.len() == k)
        .filter(|u| {
            let diffs: Vec<usize> = (0..k).filter(|&j| v[j] != u[j]).collect();
            diffs.len() == 1 && base.has_edge(v[diffs[0]], u[diffs[0]])
        })
        .cloned()
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// A dense matrix whose rows and columns are labeled by entities in
/// canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledMatrix {
    pub rows: Vec<EntityRef>,
    pub cols: Vec<EntityRef>,
    pub data: Array2<f64>,
}

impl LabeledMatrix {
    /// Dense comma-separated text; the header names the column entities and
    /// each row leads with its entity.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entity");
        for c in &self.cols {
            out.push(',');
            out.push_str(&c.to_string());
        }
        out.push('\n');
        for (i, r) in self.rows.iter().enumerate() {
            out.push_str(&r.to_string());
            for j in 0..self.cols.len() {
                out.push(',');
                out.push_str(&format_value(self.data[[i, j]]));
            }
            out.push('\n');
        }
        out
    }
}

fn format_value(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

/// Vertex-by-hyperedge 0/1 incidence matrix.
pub fn incidence_matrix(h: &Hypergraph) -> LabeledMatrix {
    let n = h.n();
    let m = h.hyperedges().len();
    let mut data = Array2::zeros((n, m));
    for (j, e) in h.hyperedges().iter().enumerate() {
        for &v in e {
            data[[v, j]] = 1.0;
        }
    }
    LabeledMatrix {
        rows: (0..n).map(EntityRef::vertex).collect(),
        cols: (0..m).map(EntityRef::hyperedge).collect(),
        data,
    }
}

/// Unsigned boundary matrix of a simplicial complex: rows index the
/// (p-1)-node-sets, columns the p-node-sets, with a 1 whenever the row set
/// is contained in the column set.
pub fn boundary_matrix(s: &SimplicialComplex, p: usize) -> Result<LabeledMatrix> {
    let h = s.hg();
    let cols_sets = h.p_node_sets(p);
    if cols_sets.is_empty() {
        return Err(Error::EmptyClass("p-node-sets"));
    }
    let rows_sets = if p >= 1 { h.p_node_sets(p - 1) } else { Vec::new() };
    let row_refs: Vec<EntityRef> = if p == 1 {
        (0..h.n()).map(EntityRef::vertex).collect()
    } else {
        rows_sets
            .iter()
            .map(|set| EntityRef::hyperedge(h.hyperedge_id(set).expect("closure")))
            .collect()
    };
    let col_refs: Vec<EntityRef> = cols_sets
        .iter()
        .map(|set| EntityRef::hyperedge(h.hyperedge_id(set).expect("p-node-set exists")))
        .collect();
    let mut data = Array2::zeros((rows_sets.len(), cols_sets.len()));
    for (i, r) in rows_sets.iter().enumerate() {
        for (j, c) in cols_sets.iter().enumerate() {
            if r.iter().all(|v| c.binary_search(v).is_ok()) {
                data[[i, j]] = 1.0;
            }
        }
    }
    Ok(LabeledMatrix {
        rows: row_refs,
        cols: col_refs,
        data,
    })
}

/// All subgraphs of `g` isomorphic to `motif`, as (vertex set, edge set)
/// pairs counted once each (embeddings up to motif automorphism).
fn motif_occurrences(g: &Graph, motif: &Graph) -> Result<Vec<(Vec<usize>, Vec<(usize, usize)>)>> {
    if motif.n() > MOTIF_CAP {
        return Err(Error::MotifTooLarge {
            n: motif.n(),
            cap: MOTIF_CAP,
        });
    }
    if !motif.is_connected() {
        return Err(Error::InvalidDocument("motif must be connected".into()));
    }
    let k = motif.n();
    let mut out = Vec::new();
    if k == 0 || k > g.n() {
        return Ok(out);
    }
    let mut subset: Vec<usize> = Vec::with_capacity(k);
    enumerate_subsets(g.n(), k, 0, &mut subset, &mut |vs| {
        let available: Vec<(usize, usize)> = vs
            .iter()
            .enumerate()
            .flat_map(|(i, &u)| {
                vs[i + 1..]
                    .iter()
                    .filter(move |&&v| g.has_edge(u, v))
                    .map(move |&v| (u, v))
            })
            .collect();
        // Every edge subset of the induced edges is a candidate subgraph.
        let m = available.len();
        if m < motif.m() {
            return Ok(());
        }
        for mask in 0u32..(1 << m) {
            if mask.count_ones() as usize != motif.m() {
                continue;
            }
            let edges: Vec<(usize, usize)> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| available[i])
                .collect();
            // Re-index onto 0..k for the isomorphism check.
            let local: Vec<(usize, usize)> = edges
                .iter()
                .map(|&(u, v)| {
                    (
                        vs.iter().position(|&x| x == u).unwrap(),
                        vs.iter().position(|&x| x == v).unwrap(),
                    )
                })
                .collect();
            let candidate = Graph::new(k, &local)?;
            if are_isomorphic_bruteforce(&candidate, motif)? {
                out.push((vs.to_vec(), edges.clone()));
            }
        }
        Ok(())
    })?;
    Ok(out)
}

fn enumerate_subsets(
    n: usize,
    k: usize,
    start: usize,
    acc: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if acc.len() == k {
        return f(acc);
    }
    for v in start..n {
        acc.push(v);
        enumerate_subsets(n, k, v + 1, acc, f)?;
        acc.pop();
    }
    Ok(())
}

/// Motif-weighted adjacency: entry (u, v) counts the subgraphs of `g`
/// isomorphic to `motif` that contain the edge {u, v}; zero on non-edges.
pub fn motif_adjacency(g: &Graph, motif: &Graph) -> Result<WeightMatrix> {
    let n = g.n();
    let mut w = vec![vec![0u64; n]; n];
    for (_, edges) in motif_occurrences(g, motif)? {
        for (u, v) in edges {
            w[u][v] += 1;
            w[v][u] += 1;
        }
    }
    Ok(w)
}

/// Per-vertex motif participation counts, one column per motif.
pub fn subgraph_counts(g: &Graph, motifs: &[Graph]) -> Result<SubgraphCountGraph> {
    let n = g.n();
    let mut counts = vec![vec![0u64; motifs.len()]; n];
    for (mi, motif) in motifs.iter().enumerate() {
        for (vs, _) in motif_occurrences(g, motif)? {
            for v in vs {
                counts[v][mi] += 1;
            }
        }
    }
    SubgraphCountGraph::new(g.clone(), counts)
}
