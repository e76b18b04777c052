//! Compilation of message channels: explicit (src, dst) tuples per scheme,
//! with relation tags, optional witness entities, and exact count
//! accounting.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adjacency::{
    boundary, coboundary, lower_adjacent, shared_boundaries, shared_coboundaries, upper_adjacent,
    Complex,
};
use crate::entity::EntityRef;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::{CellComplex, Hypergraph, NodeTupleCollection};

/// Relation kind carried by a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationTag {
    IncidenceUp,
    IncidenceDown,
    Boundary,
    Coboundary,
    Upper,
    Lower,
    Down,
    LocalDown,
    Hop(usize),
    SubgraphAdj,
}

impl fmt::Display for RelationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationTag::IncidenceUp => write!(f, "incidence-up"),
            RelationTag::IncidenceDown => write!(f, "incidence-down"),
            RelationTag::Boundary => write!(f, "boundary"),
            RelationTag::Coboundary => write!(f, "coboundary"),
            RelationTag::Upper => write!(f, "upper"),
            RelationTag::Lower => write!(f, "lower"),
            RelationTag::Down => write!(f, "down"),
            RelationTag::LocalDown => write!(f, "local-down"),
            RelationTag::Hop(k) => write!(f, "hop-{k}"),
            RelationTag::SubgraphAdj => write!(f, "subgraph-adj"),
        }
    }
}

/// One directed message channel. Upper and lower channels carry the shared
/// witness entity in `via`, one channel per (src, dst, via) triple, so the
/// engine can feed the witness feature into the message function. Multi-hop
/// channels carry the walk count in `weight`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub src: EntityRef,
    pub dst: EntityRef,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub via: Option<EntityRef>,
    pub tag: RelationTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<u64>,
}

impl Channel {
    fn new(src: EntityRef, dst: EntityRef, tag: RelationTag) -> Self {
        Channel {
            src,
            dst,
            via: None,
            tag,
            weight: None,
        }
    }

    fn with_via(src: EntityRef, dst: EntityRef, via: EntityRef, tag: RelationTag) -> Self {
        Channel {
            src,
            dst,
            via: Some(via),
            tag,
            weight: None,
        }
    }

    fn sort_key(&self) -> (EntityRef, EntityRef, Option<EntityRef>, RelationTag) {
        (self.src, self.dst, self.via, self.tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Imp,
    Bamp,
    Cwn,
    Damp,
    Multihop,
    Subgraph,
}

/// The compiled channel set of one scheme over one structure, sorted
/// canonically for reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiringSet {
    pub scheme: Scheme,
    pub channels: Vec<Channel>,
}

impl WiringSet {
    fn sorted(scheme: Scheme, mut channels: Vec<Channel>) -> Self {
        channels.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        WiringSet { scheme, channels }
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// One channel per row: src, dst, via, tag, weight.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("src,dst,via,tag,weight\n");
        for c in &self.channels {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                c.src,
                c.dst,
                c.via.map(|v| v.to_string()).unwrap_or_default(),
                c.tag,
                c.weight.map(|w| w.to_string()).unwrap_or_default(),
            ));
        }
        out
    }
}

/// Incidence wiring: one node-to-hyperedge and one hyperedge-to-node
/// channel per incidence.
pub fn compile_imp(h: &Hypergraph) -> WiringSet {
    let mut channels = Vec::with_capacity(2 * h.total_incidence());
    for (j, e) in h.hyperedges().iter().enumerate() {
        let he = EntityRef::hyperedge(j);
        for &v in e {
            channels.push(Channel::new(EntityRef::vertex(v), he, RelationTag::IncidenceUp));
            channels.push(Channel::new(he, EntityRef::vertex(v), RelationTag::IncidenceDown));
        }
    }
    WiringSet::sorted(Scheme::Imp, channels)
}

/// The boundary-family relations BAMP can select.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Boundary,
    Coboundary,
    Upper,
    Lower,
}

pub const ALL_RELATIONS: [Relation; 4] = [
    Relation::Boundary,
    Relation::Coboundary,
    Relation::Upper,
    Relation::Lower,
];

/// Boundary-adjacency wiring over a simplicial or cell complex. Upper and
/// lower channels materialize one channel per shared witness.
pub fn compile_bamp(host: Complex<'_>, relations: &[Relation]) -> Result<WiringSet> {
    if relations.is_empty() {
        return Err(Error::EmptyRelationSet);
    }
    let mut channels = Vec::new();
    for c in host.entities() {
        for rel in relations {
            match rel {
                Relation::Boundary => {
                    for b in boundary(host, c)? {
                        channels.push(Channel::new(b, c, RelationTag::Boundary));
                    }
                }
                Relation::Coboundary => {
                    for d in coboundary(host, c)? {
                        channels.push(Channel::new(d, c, RelationTag::Coboundary));
                    }
                }
                Relation::Upper => {
                    for d in upper_adjacent(host, c, false)? {
                        for via in shared_coboundaries(host, c, d) {
                            channels.push(Channel::with_via(d, c, via, RelationTag::Upper));
                        }
                    }
                }
                Relation::Lower => {
                    for d in lower_adjacent(host, c, false)? {
                        for via in shared_boundaries(host, c, d) {
                            channels.push(Channel::with_via(d, c, via, RelationTag::Lower));
                        }
                    }
                }
            }
        }
    }
    Ok(WiringSet::sorted(Scheme::Bamp, channels))
}

/// CW-network wiring: boundary and upper adjacency only.
pub fn compile_cwn(c: &CellComplex) -> Result<WiringSet> {
    let mut w = compile_bamp(Complex::from(c), &[Relation::Boundary, Relation::Upper])?;
    w.scheme = Scheme::Cwn;
    Ok(w)
}

/// Down-adjacency wiring over a uniform-length tuple collection.
///
/// Exclusive mode emits one channel per neighbor differing in exactly one
/// coordinate. Inclusive mode is the message-accounting variant: one
/// channel per (coordinate, tuple agreeing at that coordinate), so a full
/// length-k collection over n vertices emits exactly k * n^(2k-1) channels.
/// Local mode restricts exclusive channels to base edges.
pub fn compile_damp(c: &NodeTupleCollection, local: bool, inclusive: bool) -> Result<WiringSet> {
    let k = c.uniform_length()?;
    let tuples = c.tuples();
    let base = c.base();
    let mut channels = Vec::new();
    for (dst_id, v) in tuples.iter().enumerate() {
        let dst = EntityRef::tuple(dst_id);
        for (src_id, u) in tuples.iter().enumerate() {
            let src = EntityRef::tuple(src_id);
            if local {
                let diffs: Vec<usize> = (0..k).filter(|&j| v[j] != u[j]).collect();
                if diffs.len() == 1 && base.has_edge(v[diffs[0]], u[diffs[0]]) {
                    channels.push(Channel::new(src, dst, RelationTag::LocalDown));
                }
            } else if inclusive {
                let agreements = (0..k).filter(|&j| v[j] == u[j]).count();
                for _ in 0..agreements {
                    channels.push(Channel::new(src, dst, RelationTag::Down));
                }
            } else {
                let agreements = (0..k).filter(|&j| v[j] == u[j]).count();
                if agreements == k - 1 {
                    channels.push(Channel::new(src, dst, RelationTag::Down));
                }
            }
        }
    }
    Ok(WiringSet::sorted(Scheme::Damp, channels))
}

/// Multi-hop wiring: a hop-k channel for every ordered vertex pair joined
/// by a walk of length k, excluding self-walks; walk counts ride along as
/// channel weights.
pub fn compile_multihop(g: &Graph, hops: &[usize]) -> Result<WiringSet> {
    if hops.iter().any(|&h| h == 0) {
        return Err(Error::InvalidDocument("hops must be at least 1".into()));
    }
    let n = g.n();
    let a = g.adjacency();
    let mut channels = Vec::new();
    for &hop in hops {
        let mut power = identity_matrix(n);
        for _ in 0..hop {
            power = mat_mul(&power, &a);
        }
        for u in 0..n {
            for v in 0..n {
                if u != v && power[u][v] > 0 {
                    let mut ch = Channel::new(
                        EntityRef::vertex(u),
                        EntityRef::vertex(v),
                        RelationTag::Hop(hop),
                    );
                    ch.weight = Some(power[u][v]);
                    channels.push(ch);
                }
            }
        }
    }
    Ok(WiringSet::sorted(Scheme::Multihop, channels))
}

fn identity_matrix(n: usize) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1;
    }
    m
}

fn mat_mul(a: &[Vec<u64>], b: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut out = vec![vec![0u64; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == 0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

/// Exact channel counts per relation tag.
pub fn channel_count(w: &WiringSet) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    for c in &w.channels {
        *counts.entry(c.tag.to_string()).or_insert(0) += 1;
    }
    counts
}

/// Checks that every channel endpoint (and witness) exists in the given
/// entity table.
pub fn referentially_intact(w: &WiringSet, exists: impl Fn(EntityRef) -> bool) -> bool {
    w.channels.iter().all(|c| {
        exists(c.src) && exists(c.dst) && c.via.map(&exists).unwrap_or(true)
    })
}

/// Wiring flavor per the coefficient functions a model uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlavorTag {
    /// Every coefficient function is a fixed scalar.
    Convolutional,
    /// Some function is learnable; all return scalars.
    Attentional,
    /// Some learnable function returns a vector.
    GeneralMp,
}

impl fmt::Display for FlavorTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlavorTag::Convolutional => write!(f, "conv"),
            FlavorTag::Attentional => write!(f, "att"),
            FlavorTag::GeneralMp => write!(f, "gen"),
        }
    }
}

/// Folds per-layer coefficient-function descriptions into the model flavor.
pub fn classify_flavor(spec: &crate::engine::ModelSpec) -> FlavorTag {
    let mut flavor = FlavorTag::Convolutional;
    for layer in &spec.layers {
        flavor = match (flavor, layer.coefficient_flavor()) {
            (_, FlavorTag::GeneralMp) | (FlavorTag::GeneralMp, _) => FlavorTag::GeneralMp,
            (_, FlavorTag::Attentional) | (FlavorTag::Attentional, _) => FlavorTag::Attentional,
            _ => FlavorTag::Convolutional,
        };
    }
    flavor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entity::EntityClass;
    use crate::graph::{complete_graph, cycle_graph, path_graph, two_triangles, Graph};
    use crate::hogdm::SimplicialComplex;
    use crate::transform::{all_tuples, cell_lift, clique_complex_lift};

    #[test]
    fn imp_channel_counts() {
        let h = Hypergraph::new(2, &[vec![0, 1]]).unwrap();
        assert_eq!(compile_imp(&h).len(), 4);
        let h = Hypergraph::new(3, &[vec![0, 1, 2]]).unwrap();
        let w = compile_imp(&h);
        assert_eq!(w.len(), 6);
        let counts = channel_count(&w);
        assert_eq!(counts["incidence-up"], 3);
        assert_eq!(counts["incidence-down"], 3);
        let h = Hypergraph::new(3, &[vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert_eq!(compile_imp(&h).len(), 10);
    }

    #[test]
    fn imp_count_is_twice_total_incidence() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.gen_range(2..7);
            let mut edges = Vec::new();
            for _ in 0..rng.gen_range(1..5) {
                let size = rng.gen_range(1..=n);
                let mut members: Vec<usize> = (0..n).collect();
                for i in (1..members.len()).rev() {
                    members.swap(i, rng.gen_range(0..=i));
                }
                members.truncate(size);
                members.sort_unstable();
                edges.push(members);
            }
            edges.sort_by(|a: &Vec<usize>, b| (a.len(), a).cmp(&(b.len(), b)));
            edges.dedup();
            let h = Hypergraph::new(n, &edges).unwrap();
            assert_eq!(compile_imp(&h).len(), 2 * h.total_incidence());
        }
    }

    #[test]
    fn bamp_boundary_count_on_cqc_k3() {
        let sc = clique_complex_lift(&complete_graph(3), 3);
        let w = compile_bamp(Complex::from(&sc), &[Relation::Boundary]).unwrap();
        // triangle receives 6 (3 edges + 3 vertices), each edge receives 2
        assert_eq!(w.len(), 12);
        assert!(compile_bamp(Complex::from(&sc), &[]).is_err());
    }

    #[test]
    fn bamp_upper_between_edges_of_cqc_k3() {
        let sc = clique_complex_lift(&complete_graph(3), 3);
        let w = compile_bamp(Complex::from(&sc), &[Relation::Upper]).unwrap();
        let edge_to_edge = w
            .channels
            .iter()
            .filter(|c| {
                c.src.class == EntityClass::Hyperedge && c.dst.class == EntityClass::Hyperedge
            })
            .count();
        // 3 unordered edge pairs x 2 directions x 1 shared triangle
        assert_eq!(edge_to_edge, 6);
        assert!(w
            .channels
            .iter()
            .filter(|c| c.tag == RelationTag::Upper)
            .all(|c| c.via.is_some()));
    }

    #[test]
    fn bamp_coboundary_on_path_sc() {
        let sc = SimplicialComplex::new(Hypergraph::from_graph(&path_graph(3)));
        let w = compile_bamp(Complex::from(&sc), &[Relation::Coboundary]).unwrap();
        assert_eq!(w.len(), 4);
    }

    #[test]
    fn cwn_channels_on_lifted_hexagon() {
        let cc = cell_lift(&cycle_graph(6), 2, 6, 0).unwrap();
        let w = compile_cwn(&cc).unwrap();
        let counts = channel_count(&w);
        assert_eq!(counts["boundary"], 18);
        // vertices: 12 channels via shared edges; edges: 30 via the hexagon
        assert_eq!(counts["upper"], 42);
        let two_cell = cc.cells_of_dim(2).next().unwrap().0;
        let into_two_cell = w
            .channels
            .iter()
            .filter(|c| c.dst == EntityRef::cell(two_cell) && c.tag == RelationTag::Boundary)
            .count();
        assert_eq!(into_two_cell, 6);
        // 0-cells receive only upper channels
        for (idx, _) in cc.cells_of_dim(0) {
            assert!(w
                .channels
                .iter()
                .filter(|c| c.dst == EntityRef::cell(idx))
                .all(|c| c.tag == RelationTag::Upper));
        }
    }

    #[test]
    fn cwn_on_acyclic_lift_has_no_two_cell_channels() {
        let cc = cell_lift(&path_graph(3), 2, 6, 0).unwrap();
        let w = compile_cwn(&cc).unwrap();
        assert!(w
            .channels
            .iter()
            .all(|c| cc.cells()[c.dst.id].dim < 2 && cc.cells()[c.src.id].dim < 2));
    }

    #[test]
    fn bamp_with_all_relations_contains_cwn() {
        let cc = cell_lift(&cycle_graph(6), 2, 6, 0).unwrap();
        let bamp = compile_bamp(Complex::from(&cc), &ALL_RELATIONS).unwrap();
        let cwn = compile_cwn(&cc).unwrap();
        for ch in &cwn.channels {
            assert!(bamp.channels.contains(ch));
        }
    }

    #[test]
    fn damp_inclusive_matches_closed_form() {
        for (k, n) in [(2usize, 3usize), (2, 4), (2, 5), (3, 3)] {
            let c = NodeTupleCollection::new(
                Graph::new(n, &[]).unwrap(),
                &all_tuples(n, k),
                k,
            )
            .unwrap();
            let w = compile_damp(&c, false, true).unwrap();
            let expect = k * n.pow(2 * k as u32 - 1);
            assert_eq!(w.len(), expect, "k={k} n={n}");
        }
    }

    #[test]
    fn damp_exclusive_neighbor_count() {
        let c = NodeTupleCollection::new(
            complete_graph(3),
            &all_tuples(3, 2),
            2,
        )
        .unwrap();
        let w = compile_damp(&c, false, false).unwrap();
        // every tuple has k(n-1) = 4 exclusive neighbors
        assert_eq!(w.len(), 9 * 4);
    }

    #[test]
    fn damp_local_stays_on_base_edges() {
        let c = NodeTupleCollection::new(path_graph(3), &all_tuples(3, 2), 2).unwrap();
        let w = compile_damp(&c, true, false).unwrap();
        for ch in &w.channels {
            let v = &c.tuples()[ch.dst.id];
            let u = &c.tuples()[ch.src.id];
            let j = (0..2).find(|&j| v[j] != u[j]).unwrap();
            assert!(c.base().has_edge(v[j], u[j]));
        }
        let mixed = NodeTupleCollection::new(
            path_graph(3),
            &[vec![0, 1], vec![0, 1, 2]],
            3,
        )
        .unwrap();
        assert!(matches!(
            compile_damp(&mixed, false, false),
            Err(Error::MixedTupleLengths(..))
        ));
    }

    #[test]
    fn multihop_examples() {
        let w = compile_multihop(&cycle_graph(6), &[2]).unwrap();
        // each vertex reaches its two distance-2 vertices; self-walks excluded
        assert_eq!(w.len(), 12);
        assert!(w.channels.iter().all(|c| c.src != c.dst));

        let w = compile_multihop(&path_graph(3), &[1]).unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.channels.iter().all(|c| c.weight == Some(1)));

        let w = compile_multihop(&two_triangles(), &[2]).unwrap();
        for c in &w.channels {
            assert_eq!(c.src.id < 3, c.dst.id < 3, "channels stay within components");
        }
    }

    #[test]
    fn hop_one_equals_directed_edges() {
        let g = two_triangles();
        let w = compile_multihop(&g, &[1]).unwrap();
        assert_eq!(w.len(), 2 * g.m());
        for c in &w.channels {
            assert!(g.has_edge(c.src.id, c.dst.id));
        }
    }

    #[test]
    fn wiring_is_referentially_intact() {
        let sc = clique_complex_lift(&two_triangles(), 3);
        let host = Complex::from(&sc);
        let w = compile_bamp(host, &ALL_RELATIONS).unwrap();
        assert!(referentially_intact(&w, |e| host.contains(e)));
    }
}
