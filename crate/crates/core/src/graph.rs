//! Plain graphs with dense integer vertices, vertex permutations, disjoint
//! unions, and a brute-force isomorphism oracle for desk-scale verification.
//!
//! Vertices are `0..n`. Undirected edges are canonicalized with the smaller
//! endpoint first; directed graphs store ordered pairs. Everything is
//! immutable after construction.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::entity::{EntityClass, EntityRef, FeatureMap};
use crate::error::{Error, Result};

/// Hard cap for the exhaustive isomorphism search: 10! permutations.
pub const ISO_BRUTEFORCE_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    #[serde(default)]
    directed: bool,
    #[serde(default, skip_serializing_if = "FeatureMap::is_empty")]
    features: FeatureMap,
}

impl Graph {
    /// Builds a graph, canonicalizing undirected edges (smaller endpoint
    /// first) and rejecting out-of-range endpoints, duplicates, and
    /// undirected self-loops.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_options(n, edges, false, FeatureMap::new())
    }

    pub fn directed(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::with_options(n, edges, true, FeatureMap::new())
    }

    pub fn with_options(
        n: usize,
        edges: &[(usize, usize)],
        directed: bool,
        features: FeatureMap,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n {
                return Err(Error::OutOfRange { index: u, size: n });
            }
            if v >= n {
                return Err(Error::OutOfRange { index: v, size: n });
            }
            if u == v && !directed {
                return Err(Error::SelfLoop(u));
            }
            let e = if directed { (u, v) } else { (u.min(v), u.max(v)) };
            if !set.insert(e) {
                return Err(Error::DuplicateEdge(e.0, e.1));
            }
        }
        let g = Graph {
            n,
            edges: set,
            directed,
            features,
        };
        g.check_features()?;
        Ok(g)
    }

    /// Attaches per-vertex feature rows (row `i` belongs to vertex `i`).
    pub fn with_vertex_features(mut self, rows: &[Vec<f64>]) -> Result<Self> {
        if rows.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: rows.len(),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            self.features.insert(EntityRef::vertex(i), row.clone());
        }
        self.check_features()?;
        Ok(self)
    }

    fn check_features(&self) -> Result<()> {
        let mut width: Option<usize> = None;
        for (e, v) in self.features.iter() {
            match e.class {
                EntityClass::Vertex if e.id < self.n => {}
                EntityClass::Hyperedge => {
                    // Edge features are keyed by the edge's canonical index.
                    if e.id >= self.edges.len() {
                        return Err(Error::OutOfRange {
                            index: e.id,
                            size: self.edges.len(),
                        });
                    }
                }
                _ => {
                    return Err(Error::UnknownEntity(e.to_string()));
                }
            }
            match width {
                None => width = Some(v.len()),
                Some(w) if w != v.len() => {
                    return Err(Error::FeatureWidthMismatch {
                        left: w,
                        right: v.len(),
                    })
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_vec(&self) -> Vec<(usize, usize)> {
        self.edges.iter().copied().collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if self.directed {
            self.edges.contains(&(u, v))
        } else {
            u != v && self.edges.contains(&(u.min(v), u.max(v)))
        }
    }

    pub fn features(&self) -> &FeatureMap {
        &self.features
    }

    pub fn vertex_feature(&self, v: usize) -> &[f64] {
        self.features.get(EntityRef::vertex(v))
    }

    pub fn feature_width(&self) -> usize {
        self.features.uniform_width().unwrap_or(0)
    }

    /// Out-neighbors for directed graphs, all neighbors otherwise.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for &(a, b) in &self.edges {
            if a == v {
                out.push(b);
            } else if b == v && !self.directed {
                out.push(a);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut degs: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        degs.sort_unstable();
        degs
    }

    /// Adjacency matrix as dense 0/1 rows.
    pub fn adjacency(&self) -> Vec<Vec<u64>> {
        let mut a = vec![vec![0u64; self.n]; self.n];
        for &(u, v) in &self.edges {
            a[u][v] = 1;
            if !self.directed {
                a[v][u] = 1;
            }
        }
        a
    }

    /// BFS distances from `v`; `None` for unreachable vertices.
    pub fn distances(&self, v: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            for w in self.neighbors(u) {
                if dist[w].is_none() {
                    dist[w] = Some(du + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances(0).iter().all(Option::is_some)
    }

    /// Number of connected components (undirected reading).
    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(u) = queue.pop_front() {
                for &(a, b) in &self.edges {
                    for w in [a, b] {
                        if (a == u || b == u) && !seen[w] {
                            seen[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        count
    }

    /// Induced subgraph on `vertices` (kept in their original labels is not
    /// possible with dense ids, so vertices are re-indexed in sorted order;
    /// the returned map sends old labels to new ones).
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<(Graph, BTreeMap<usize, usize>)> {
        let keep: BTreeSet<usize> = vertices.iter().copied().collect();
        for &v in &keep {
            if v >= self.n {
                return Err(Error::OutOfRange {
                    index: v,
                    size: self.n,
                });
            }
        }
        let remap: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|(u, v)| keep.contains(u) && keep.contains(v))
            .map(|&(u, v)| (remap[&u], remap[&v]))
            .collect();
        let mut features = FeatureMap::new();
        for (&old, &new) in &remap {
            let f = self.vertex_feature(old);
            if !f.is_empty() {
                features.insert(EntityRef::vertex(new), f.to_vec());
            }
        }
        let g = Graph::with_options(keep.len(), &edges, self.directed, features)?;
        Ok((g, remap))
    }

    /// Relabels the graph along `p`, carrying features.
    pub fn apply_permutation(&self, p: &VertexPermutation) -> Result<Graph> {
        if p.len() != self.n {
            return Err(Error::SizeMismatch {
                expected: self.n,
                got: p.len(),
            });
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| (p.apply(u), p.apply(v)))
            .collect();
        let old_edges: Vec<(usize, usize)> = self.edges.iter().copied().collect();
        let mut g = Graph::with_options(self.n, &edges, self.directed, FeatureMap::new())?;
        let new_index: BTreeMap<(usize, usize), usize> = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        g.features = self.features.renamed(|e| match e.class {
            EntityClass::Vertex => Some(EntityRef::vertex(p.apply(e.id))),
            EntityClass::Hyperedge => {
                let (u, v) = old_edges[e.id];
                let (pu, pv) = (p.apply(u), p.apply(v));
                let key = if self.directed {
                    (pu, pv)
                } else {
                    (pu.min(pv), pu.max(pv))
                };
                Some(EntityRef::hyperedge(new_index[&key]))
            }
            _ => None,
        });
        Ok(g)
    }

    /// Disjoint union; vertices of `other` are shifted by `self.n`.
    /// Returns the union and the offset applied to `other`.
    pub fn disjoint_union(&self, other: &Graph) -> Result<(Graph, usize)> {
        let lw = self.feature_width();
        let rw = other.feature_width();
        let (l_has, r_has) = (!self.features.is_empty(), !other.features.is_empty());
        if l_has != r_has || (l_has && lw != rw) {
            return Err(Error::FeatureWidthMismatch {
                left: lw,
                right: rw,
            });
        }
        let offset = self.n;
        let mut edges = self.edge_vec();
        edges.extend(other.edges().map(|(u, v)| (u + offset, v + offset)));
        let mut features = FeatureMap::new();
        for (e, f) in self.features.iter() {
            if e.class == EntityClass::Vertex {
                features.insert(*e, f.clone());
            }
        }
        for (e, f) in other.features.iter() {
            if e.class == EntityClass::Vertex {
                features.insert(EntityRef::vertex(e.id + offset), f.clone());
            }
        }
        let g = Graph::with_options(self.n + other.n, &edges, self.directed, features)?;
        Ok((g, offset))
    }

    /// Canonical edge bitmask: minimum over all vertex permutations of the
    /// upper-triangle adjacency bits. Exhaustive, so equality of canonical
    /// forms is exactly isomorphism. Undirected only, `n <= 10`.
    pub fn canonical_bits(&self) -> Result<u64> {
        let cap = crate::budget::cap(ISO_BRUTEFORCE_CAP);
        if self.n > cap {
            return Err(Error::TooLarge { n: self.n, cap });
        }
        let adj = self.adjacency();
        let mut best = u64::MAX;
        let mut perm: Vec<usize> = (0..self.n).collect();
        permute_all(&mut perm, &mut |p| {
            let mut bits = 0u64;
            let mut idx = 0;
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    if adj[p[i]][p[j]] == 1 {
                        bits |= 1 << idx;
                    }
                    idx += 1;
                }
            }
            if bits < best {
                best = bits;
            }
            true
        });
        Ok(best)
    }
}

/// A bijection on `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexPermutation {
    mapping: Vec<usize>,
}

impl VertexPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n {
                return Err(Error::OutOfRange { index: v, size: n });
            }
            if seen[v] {
                return Err(Error::DuplicateEdge(v, v));
            }
            seen[v] = true;
        }
        Ok(VertexPermutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        VertexPermutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn apply(&self, v: usize) -> usize {
        self.mapping[v]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.mapping
    }

    pub fn inverse(&self) -> VertexPermutation {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &v) in self.mapping.iter().enumerate() {
            inv[v] = i;
        }
        VertexPermutation { mapping: inv }
    }
}

/// Calls `f` with every permutation of `items` (Heap's algorithm); stops
/// early when `f` returns false.
pub(crate) fn permute_all(items: &mut [usize], f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn rec(k: usize, items: &mut [usize], f: &mut impl FnMut(&[usize]) -> bool) -> bool {
        if k <= 1 {
            return f(items);
        }
        for i in 0..k {
            if !rec(k - 1, items, f) {
                return false;
            }
            if k % 2 == 0 {
                items.swap(i, k - 1);
            } else {
                items.swap(0, k - 1);
            }
        }
        true
    }
    rec(items.len(), items, f)
}

/// Exhaustive isomorphism test with degree-sequence pruning. Features must
/// be preserved pointwise (vertices) and edgewise. `n <= 10`.
pub fn are_isomorphic_bruteforce(g1: &Graph, g2: &Graph) -> Result<bool> {
    let cap = crate::budget::cap(ISO_BRUTEFORCE_CAP);
    if g1.n > cap {
        return Err(Error::TooLarge { n: g1.n, cap });
    }
    if g2.n > cap {
        return Err(Error::TooLarge { n: g2.n, cap });
    }
    if g1.n != g2.n || g1.m() != g2.m() || g1.directed != g2.directed {
        return Ok(false);
    }
    if g1.degree_sequence() != g2.degree_sequence() {
        return Ok(false);
    }
    let n = g1.n;
    let edges1: Vec<(usize, usize)> = g1.edge_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut found = false;
    permute_all(&mut perm, &mut |p| {
        let ok = edges1.iter().all(|&(u, v)| g2.has_edge(p[u], p[v]))
            && (0..n).all(|v| g1.vertex_feature(v) == g2.vertex_feature(p[v]))
            && edge_features_match(g1, g2, p);
        if ok {
            found = true;
            false
        } else {
            true
        }
    });
    Ok(found)
}

fn edge_features_match(g1: &Graph, g2: &Graph, p: &[usize]) -> bool {
    let index2: BTreeMap<(usize, usize), usize> = g2
        .edges
        .iter()
        .enumerate()
        .map(|(i, &e)| (e, i))
        .collect();
    g1.edge_vec().iter().enumerate().all(|(i, &(u, v))| {
        let (pu, pv) = (p[u], p[v]);
        let key = if g1.directed {
            (pu, pv)
        } else {
            (pu.min(pv), pu.max(pv))
        };
        let f1 = g1.features.get(EntityRef::hyperedge(i));
        match index2.get(&key) {
            Some(&j) => f1 == g2.features.get(EntityRef::hyperedge(j)),
            None => false,
        }
    })
}

/// Parses the edge-list text format: first line `n m`, then `m` lines `u v`.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidDocument("empty edge list".into()))?;
    let mut parts = header.split_whitespace();
    let n: usize = parse_field(parts.next(), "n")?;
    let m: usize = parse_field(parts.next(), "m")?;
    let mut edges = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines
            .next()
            .ok_or_else(|| Error::InvalidDocument("fewer edge lines than m".into()))?;
        let mut ep = line.split_whitespace();
        let u: usize = parse_field(ep.next(), "u")?;
        let v: usize = parse_field(ep.next(), "v")?;
        edges.push((u, v));
    }
    Graph::new(n, &edges)
}

fn parse_field(field: Option<&str>, name: &str) -> Result<usize> {
    field
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::InvalidDocument(format!("missing or invalid field {name}")))
}

/// Renders the edge-list text format.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses a per-vertex feature file: one comma-separated row per vertex.
pub fn parse_feature_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|line| {
            line.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidDocument(format!("bad feature value {x:?}")))
                })
                .collect()
        })
        .collect()
}

// Small named constructions used throughout tests and the corpus tooling.
pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            edges.push((i, j));
        }
    }
    Graph::new(n, &edges).expect("complete graph is valid")
}

pub fn cycle_graph(n: usize) -> Graph {
    assert!(n >= 3, "cycles need at least 3 vertices");
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges).expect("cycle graph is valid")
}

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &edges).expect("path graph is valid")
}

/// Two disjoint triangles on six vertices.
pub fn two_triangles() -> Graph {
    Graph::new(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).expect("2K3 is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_rejects_bad_edges() {
        assert_eq!(
            Graph::new(3, &[(0, 3)]),
            Err(Error::OutOfRange { index: 3, size: 3 })
        );
        assert_eq!(
            Graph::new(3, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        );
        assert_eq!(Graph::new(3, &[(1, 1)]), Err(Error::SelfLoop(1)));
    }

    #[test]
    fn build_named_graphs() {
        let k3 = complete_graph(3);
        assert_eq!(k3.m(), 3);
        let c6 = cycle_graph(6);
        assert!(c6.degree_sequence().iter().all(|&d| d == 2));
        let tt = two_triangles();
        assert_eq!(tt.component_count(), 2);
        assert_eq!(c6.component_count(), 1);
    }

    #[test]
    fn permutation_examples() {
        let k3 = complete_graph(3);
        let id = VertexPermutation::identity(3);
        assert_eq!(k3.apply_permutation(&id).unwrap(), k3);

        let p3 = path_graph(3);
        let swap = VertexPermutation::new(vec![2, 1, 0]).unwrap();
        let swapped = p3.apply_permutation(&swap).unwrap();
        assert_eq!(swapped, p3);

        let c6 = cycle_graph(6);
        let rot = VertexPermutation::new(vec![1, 2, 3, 4, 5, 0]).unwrap();
        assert_eq!(c6.apply_permutation(&rot).unwrap(), c6);

        let bad = VertexPermutation::identity(4);
        assert!(matches!(
            p3.apply_permutation(&bad),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn permutation_carries_features() {
        let g = Graph::new(2, &[(0, 1)])
            .unwrap()
            .with_vertex_features(&[vec![1.0], vec![2.0]])
            .unwrap();
        let p = VertexPermutation::new(vec![1, 0]).unwrap();
        let h = g.apply_permutation(&p).unwrap();
        assert_eq!(h.vertex_feature(0), &[2.0]);
        assert_eq!(h.vertex_feature(1), &[1.0]);
    }

    #[test]
    fn bruteforce_iso_examples() {
        let c6 = cycle_graph(6);
        let tt = two_triangles();
        assert!(!are_isomorphic_bruteforce(&c6, &tt).unwrap());

        let p3 = path_graph(3);
        let relabeled = p3
            .apply_permutation(&VertexPermutation::new(vec![2, 0, 1]).unwrap())
            .unwrap();
        assert!(are_isomorphic_bruteforce(&p3, &relabeled).unwrap());

        let k3 = complete_graph(3);
        assert!(!are_isomorphic_bruteforce(&k3, &p3).unwrap());

        let big = Graph::new(11, &[]).unwrap();
        assert!(matches!(
            are_isomorphic_bruteforce(&big, &big),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn iso_respects_features() {
        let a = Graph::new(2, &[(0, 1)])
            .unwrap()
            .with_vertex_features(&[vec![1.0], vec![0.0]])
            .unwrap();
        let b = Graph::new(2, &[(0, 1)])
            .unwrap()
            .with_vertex_features(&[vec![0.0], vec![1.0]])
            .unwrap();
        let c = Graph::new(2, &[(0, 1)])
            .unwrap()
            .with_vertex_features(&[vec![0.0], vec![0.0]])
            .unwrap();
        assert!(are_isomorphic_bruteforce(&a, &b).unwrap());
        assert!(!are_isomorphic_bruteforce(&a, &c).unwrap());
    }

    #[test]
    fn disjoint_union_examples() {
        let k3 = complete_graph(3);
        let (g, off) = k3.disjoint_union(&k3).unwrap();
        assert_eq!((g.n(), g.m(), off), (6, 6, 3));
        assert_eq!(g.component_count(), 2);

        let empty = Graph::new(0, &[]).unwrap();
        let c6 = cycle_graph(6);
        let (g, off) = empty.disjoint_union(&c6).unwrap();
        assert_eq!(off, 0);
        assert!(are_isomorphic_bruteforce(&g, &c6).unwrap());

        let p3 = path_graph(3);
        let (g, _) = p3.disjoint_union(&k3).unwrap();
        assert_eq!((g.n(), g.m()), (6, 5));
    }

    #[test]
    fn disjoint_union_feature_width_guard() {
        let a = Graph::new(1, &[])
            .unwrap()
            .with_vertex_features(&[vec![1.0]])
            .unwrap();
        let b = Graph::new(1, &[])
            .unwrap()
            .with_vertex_features(&[vec![1.0, 2.0]])
            .unwrap();
        assert!(matches!(
            a.disjoint_union(&b),
            Err(Error::FeatureWidthMismatch { .. })
        ));
    }

    #[test]
    fn disjoint_union_preserves_degree_multisets() {
        let p3 = path_graph(3);
        let k3 = complete_graph(3);
        let (g, off) = p3.disjoint_union(&k3).unwrap();
        let mut left: Vec<usize> = (0..3).map(|v| g.degree(v)).collect();
        left.sort_unstable();
        assert_eq!(left, p3.degree_sequence());
        let mut right: Vec<usize> = (0..3).map(|v| g.degree(v + off)).collect();
        right.sort_unstable();
        assert_eq!(right, k3.degree_sequence());
    }

    #[test]
    fn edge_list_round_trip() {
        let g = two_triangles();
        let text = format_edge_list(&g);
        let parsed = parse_edge_list(&text).unwrap();
        assert_eq!(parsed, g);
        assert!(text.starts_with("6 6\n"));
    }

    #[test]
    fn canonical_bits_matches_oracle() {
        let p3 = path_graph(3);
        let relabeled = p3
            .apply_permutation(&VertexPermutation::new(vec![1, 2, 0]).unwrap())
            .unwrap();
        assert_eq!(
            p3.canonical_bits().unwrap(),
            relabeled.canonical_bits().unwrap()
        );
        let k3 = complete_graph(3);
        assert_ne!(p3.canonical_bits().unwrap(), k3.canonical_bits().unwrap());
    }
}
