//! Color-refinement engines: vertex refinement, the two tuple-refinement
//! families with their delta and local-plus variants, and generic
//! refinement over lifted structures, all sharing one interner per
//! comparison so verdicts come from a common color space.
//!
//! Hashing is realized as injective interning of (previous color, canonical
//! signature) pairs; nothing is ever lossy. Refinement runs on both inputs
//! simultaneously and stops when the joint partition no longer refines,
//! or as soon as the two color histograms differ (they can never re-align
//! once split, because colors refine).

mod battery;

pub use battery::{battery, BatteryReport, BatteryRow, WlTest};

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::adjacency::{boundary, coboundary, lower_adjacent, upper_adjacent, Complex};
use crate::entity::EntityRef;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::hogdm::HoStructure;
use crate::transform::iso_type;
use crate::wiring::Relation;

pub const WL_N_CAP: usize = 8;
pub const WL_K_MIN: usize = 2;
pub const WL_K_MAX: usize = 3;

type Color = u32;

/// Injective interning of (previous color, encoded signature) pairs.
/// Initial colors use a sentinel previous color.
#[derive(Debug, Default)]
pub struct Interner {
    table: HashMap<(Color, Vec<u64>), Color>,
}

const INITIAL: Color = Color::MAX;

impl Interner {
    fn intern(&mut self, prev: Color, payload: Vec<u64>) -> Color {
        let next = self.table.len() as Color;
        *self.table.entry((prev, payload)).or_insert(next)
    }

    fn intern_initial(&mut self, payload: Vec<u64>) -> Color {
        self.intern(INITIAL, payload)
    }
}

fn encode_f64s(xs: &[f64]) -> Vec<u64> {
    xs.iter().map(|x| x.to_bits()).collect()
}

/// Canonical histogram: sorted (color, count) pairs.
fn histogram(colors: &[Color]) -> Vec<(Color, usize)> {
    let mut sorted: Vec<Color> = colors.to_vec();
    sorted.sort_unstable();
    let mut out: Vec<(Color, usize)> = Vec::new();
    for c in sorted {
        match out.last_mut() {
            Some((color, count)) if *color == c => *count += 1,
            _ => out.push((c, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    Distinguished,
    Inconclusive,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Distinguished => write!(f, "Distinguished"),
            Outcome::Inconclusive => write!(f, "Inconclusive"),
        }
    }
}

/// Test outcome with the executed round count and total messages sent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub rounds: usize,
    pub messages: usize,
}

impl Verdict {
    pub fn distinguished(&self) -> bool {
        self.outcome == Outcome::Distinguished
    }
}

/// Drives any synchronized two-sided refinement: `sides` holds the current
/// colors of each input, `refine` maps (side, entity index, colors) to the
/// new signature payload, and `messages_per_round` is the fixed channel
/// count. Stops on histogram divergence or joint stabilization.
fn run_refinement(
    mut sides: [Vec<Color>; 2],
    interner: &mut Interner,
    messages_per_round: usize,
    mut refine: impl FnMut(usize, usize, &[Vec<Color>; 2]) -> Vec<u64>,
) -> Verdict {
    let mut rounds = 0;
    let mut messages = 0;
    if histogram(&sides[0]) != histogram(&sides[1]) {
        return Verdict {
            outcome: Outcome::Distinguished,
            rounds,
            messages,
        };
    }
    let mut distinct = count_distinct(&sides);
    loop {
        let mut next = [
            Vec::with_capacity(sides[0].len()),
            Vec::with_capacity(sides[1].len()),
        ];
        for side in 0..2 {
            for i in 0..sides[side].len() {
                let payload = refine(side, i, &sides);
                next[side].push(interner.intern(sides[side][i], payload));
            }
        }
        rounds += 1;
        messages += messages_per_round;
        sides = next;
        if histogram(&sides[0]) != histogram(&sides[1]) {
            return Verdict {
                outcome: Outcome::Distinguished,
                rounds,
                messages,
            };
        }
        let now = count_distinct(&sides);
        if now == distinct {
            return Verdict {
                outcome: Outcome::Inconclusive,
                rounds,
                messages,
            };
        }
        distinct = now;
    }
}

fn count_distinct(sides: &[Vec<Color>; 2]) -> usize {
    let mut all: Vec<Color> = sides.iter().flatten().copied().collect();
    all.sort_unstable();
    all.dedup();
    all.len()
}

fn check_feature_widths(g1: &Graph, g2: &Graph) -> Result<()> {
    let (w1, w2) = (g1.feature_width(), g2.feature_width());
    if w1 != w2 {
        return Err(Error::FeatureWidthMismatch { left: w1, right: w2 });
    }
    Ok(())
}

/// Vertex color refinement on the disjoint union with a shared interner.
/// Initial colors come from vertex features when present; each round sends
/// two messages per union edge.
pub fn wl1(g1: &Graph, g2: &Graph) -> Result<Verdict> {
    check_feature_widths(g1, g2)?;
    let (union, offset) = g1.disjoint_union(g2)?;
    let mut interner = Interner::default();
    let colors: Vec<Color> = (0..union.n())
        .map(|v| interner.intern_initial(encode_f64s(union.vertex_feature(v))))
        .collect();
    let neighbors: Vec<Vec<usize>> = (0..union.n()).map(|v| union.neighbors(v)).collect();
    let split = |all: Vec<Color>| -> [Vec<Color>; 2] {
        let (a, b) = all.split_at(offset.min(all.len()));
        [a.to_vec(), b.to_vec()]
    };
    // Refinement runs over union indices; side 0 holds vertices < offset.
    let sides = split(colors);
    let verdict = run_refinement(sides, &mut interner, 2 * union.m(), |side, i, sides| {
        let v = if side == 0 { i } else { i + offset };
        let mut ns: Vec<Color> = neighbors[v]
            .iter()
            .map(|&u| {
                if u < offset {
                    sides[0][u]
                } else {
                    sides[1][u - offset]
                }
            })
            .collect();
        ns.sort_unstable();
        let mut payload = vec![ns.len() as u64];
        payload.extend(ns.iter().map(|&c| c as u64));
        payload
    });
    Ok(verdict)
}

fn check_tuple_budget(g1: &Graph, g2: &Graph, k: usize) -> Result<()> {
    if !(WL_K_MIN..=WL_K_MAX).contains(&k) {
        return Err(Error::BudgetExceeded {
            what: "k",
            value: k,
            cap: WL_K_MAX,
        });
    }
    let n_cap = crate::budget::cap(WL_N_CAP);
    for g in [g1, g2] {
        if g.n() > n_cap {
            return Err(Error::BudgetExceeded {
                what: "n",
                value: g.n(),
                cap: n_cap,
            });
        }
    }
    check_feature_widths(g1, g2)
}

/// Dense tuple universe of one graph: every tuple in V^k, indexed in mixed
/// radix, with iso-type initial colors.
struct TupleSide {
    n: usize,
    k: usize,
    tuples: Vec<Vec<usize>>,
}

impl TupleSide {
    fn new(g: &Graph, k: usize) -> Self {
        let n = g.n();
        let count = n.pow(k as u32);
        let mut tuples = Vec::with_capacity(count);
        for idx in 0..count {
            let mut t = vec![0usize; k];
            let mut rest = idx;
            for slot in t.iter_mut() {
                *slot = rest % n;
                rest /= n;
            }
            tuples.push(t);
        }
        TupleSide { n, k, tuples }
    }

    fn index_with(&self, t: &[usize], j: usize, w: usize) -> usize {
        let mut idx = 0usize;
        let mut stride = 1usize;
        for (pos, &v) in t.iter().enumerate() {
            idx += stride * if pos == j { w } else { v };
            stride *= self.n;
        }
        idx
    }

    fn initial_colors(&self, g: &Graph, interner: &mut Interner) -> Result<Vec<Color>> {
        self.tuples
            .iter()
            .map(|t| Ok(interner.intern_initial(encode_f64s(&iso_type(t, g)?))))
            .collect()
    }
}

/// The classic tuple refinement: the signature is the k-tuple of per
/// coordinate neighbor color multisets, the j-th ranging over every
/// replacement of coordinate j (the tuple itself included via w = v_j).
pub fn kwl(g1: &Graph, g2: &Graph, k: usize) -> Result<Verdict> {
    check_tuple_budget(g1, g2, k)?;
    kwl_with_locality(g1, g2, k, false)
}

/// Tuple refinement with each neighbor color extended by the bit saying
/// whether the replacement crosses a base edge.
pub fn delta_kwl(g1: &Graph, g2: &Graph, k: usize) -> Result<Verdict> {
    check_tuple_budget(g1, g2, k)?;
    kwl_with_locality(g1, g2, k, true)
}

fn kwl_with_locality(g1: &Graph, g2: &Graph, k: usize, locality: bool) -> Result<Verdict> {
    let graphs = [g1, g2];
    let universes = [TupleSide::new(g1, k), TupleSide::new(g2, k)];
    let mut interner = Interner::default();
    let sides = [
        universes[0].initial_colors(g1, &mut interner)?,
        universes[1].initial_colors(g2, &mut interner)?,
    ];
    let per_round: usize = universes.iter().map(|u| u.tuples.len() * k * u.n).sum();
    let verdict = run_refinement(sides, &mut interner, per_round, |side, i, sides| {
        let u = &universes[side];
        let g = graphs[side];
        let t = &u.tuples[i];
        let mut payload = Vec::with_capacity(k * (u.n + 1));
        for j in 0..k {
            let mut ms: Vec<u64> = (0..u.n)
                .map(|w| {
                    let c = sides[side][u.index_with(t, j, w)] as u64;
                    if locality {
                        (c << 1) | u64::from(g.has_edge(t[j], w))
                    } else {
                        c
                    }
                })
                .collect();
            ms.sort_unstable();
            payload.push(ms.len() as u64);
            payload.extend(ms);
        }
        payload
    });
    Ok(verdict)
}

/// The folklore variant: the signature is the multiset over vertices w of
/// the k-tuple of colors obtained by substituting w into each coordinate.
pub fn kfwl(g1: &Graph, g2: &Graph, k: usize) -> Result<Verdict> {
    check_tuple_budget(g1, g2, k)?;
    let universes = [TupleSide::new(g1, k), TupleSide::new(g2, k)];
    let mut interner = Interner::default();
    let sides = [
        universes[0].initial_colors(g1, &mut interner)?,
        universes[1].initial_colors(g2, &mut interner)?,
    ];
    let per_round: usize = universes.iter().map(|u| u.tuples.len() * k * u.n).sum();
    let verdict = run_refinement(sides, &mut interner, per_round, |side, i, sides| {
        let u = &universes[side];
        let t = &u.tuples[i];
        let mut rows: Vec<Vec<u64>> = (0..u.n)
            .map(|w| {
                (0..k)
                    .map(|j| sides[side][u.index_with(t, j, w)] as u64)
                    .collect()
            })
            .collect();
        rows.sort_unstable();
        let mut payload = Vec::with_capacity(u.n * (k + 1));
        for row in rows {
            payload.push(row.len() as u64);
            payload.extend(row);
        }
        payload
    });
    Ok(verdict)
}

/// Local tuple refinement with same-color counts: only edge-crossing
/// replacements send messages, each carrying the number of (global,
/// exclusive) down-adjacencies of the receiver sharing the sender's color.
/// Both graphs must be connected; lift disconnected inputs with
/// [`add_auxiliary_vertex`] first.
pub fn klwl_plus(g1: &Graph, g2: &Graph, k: usize) -> Result<Verdict> {
    check_tuple_budget(g1, g2, k)?;
    for g in [g1, g2] {
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
    }
    let graphs = [g1, g2];
    let universes = [TupleSide::new(g1, k), TupleSide::new(g2, k)];
    let mut interner = Interner::default();
    let sides = [
        universes[0].initial_colors(g1, &mut interner)?,
        universes[1].initial_colors(g2, &mut interner)?,
    ];
    let per_round: usize = universes
        .iter()
        .zip(graphs)
        .map(|(u, g)| {
            u.tuples
                .iter()
                .map(|t| (0..u.k).map(|j| g.degree(t[j])).sum::<usize>())
                .sum::<usize>()
        })
        .sum();
    let verdict = run_refinement(sides, &mut interner, per_round, |side, i, sides| {
        let u = &universes[side];
        let g = graphs[side];
        let t = &u.tuples[i];
        // Color counts over the exclusive down-adjacency of t, for the
        // same-color annotations.
        let mut down_counts: HashMap<Color, u64> = HashMap::new();
        for j in 0..k {
            for w in 0..u.n {
                if w != t[j] {
                    *down_counts
                        .entry(sides[side][u.index_with(t, j, w)])
                        .or_insert(0) += 1;
                }
            }
        }
        let mut payload = Vec::new();
        for j in 0..k {
            let mut ms: Vec<(u64, u64)> = g
                .neighbors(t[j])
                .into_iter()
                .map(|w| {
                    let c = sides[side][u.index_with(t, j, w)];
                    (c as u64, down_counts.get(&c).copied().unwrap_or(0))
                })
                .collect();
            ms.sort_unstable();
            payload.push(ms.len() as u64);
            for (c, cnt) in ms {
                payload.push(c);
                payload.push(cnt);
            }
        }
        payload
    });
    Ok(verdict)
}

/// The connectivity lift: one auxiliary vertex joined to every vertex.
pub fn add_auxiliary_vertex(g: &Graph) -> Graph {
    let n = g.n();
    let mut edges = g.edge_vec();
    edges.extend((0..n).map(|v| (v, n)));
    Graph::new(n + 1, &edges).expect("auxiliary edges are valid")
}

/// Generic refinement over a lifted structure pair: each entity's
/// signature is the tuple of per-relation neighbor color multisets.
/// Initial colors pair the entity level with its feature vector, so
/// different dimensions never share a color.
pub fn lifted_refine(a: &HoStructure, b: &HoStructure, relations: &[Relation]) -> Result<Verdict> {
    if a.kind() != b.kind() {
        return Err(Error::KindMismatch {
            left: a.kind(),
            right: b.kind(),
        });
    }
    if relations.is_empty() {
        return Err(Error::EmptyRelationSet);
    }
    let mut relations: Vec<Relation> = relations.to_vec();
    relations.sort();
    relations.dedup();

    // Neighbor tables are fixed across rounds; build them once.
    let mut tables: Vec<Vec<Vec<Vec<usize>>>> = Vec::new(); // [side][relation][entity] -> neighbor ids
    let mut initial_payloads: Vec<Vec<Vec<u64>>> = Vec::new();
    for structure in [a, b] {
        let host = complex_of(structure)?;
        let features = features_of(structure);
        let entities = host.entities();
        let position: HashMap<EntityRef, usize> = entities
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i))
            .collect();
        let mut per_rel = Vec::new();
        for rel in &relations {
            let mut lists = Vec::with_capacity(entities.len());
            for &c in &entities {
                let ns: Vec<EntityRef> = match rel {
                    Relation::Boundary => boundary(host, c)?,
                    Relation::Coboundary => coboundary(host, c)?,
                    Relation::Upper => upper_adjacent(host, c, false)?,
                    Relation::Lower => lower_adjacent(host, c, false)?,
                };
                lists.push(ns.into_iter().map(|e| position[&e]).collect::<Vec<_>>());
            }
            per_rel.push(lists);
        }
        tables.push(per_rel);
        initial_payloads.push(
            entities
                .iter()
                .map(|&e| {
                    let mut payload = vec![host.level(e) as u64];
                    payload.extend(encode_f64s(features.get(e)));
                    payload
                })
                .collect(),
        );
    }

    let mut interner = Interner::default();
    let sides = [
        initial_payloads[0]
            .iter()
            .map(|p| interner.intern_initial(p.clone()))
            .collect::<Vec<Color>>(),
        initial_payloads[1]
            .iter()
            .map(|p| interner.intern_initial(p.clone()))
            .collect(),
    ];
    let per_round: usize = tables
        .iter()
        .map(|rels| rels.iter().flatten().map(Vec::len).sum::<usize>())
        .sum();
    let verdict = run_refinement(sides, &mut interner, per_round, |side, i, sides| {
        let mut payload = Vec::new();
        for rel_lists in &tables[side] {
            let mut ms: Vec<u64> = rel_lists[i]
                .iter()
                .map(|&j| sides[side][j] as u64)
                .collect();
            ms.sort_unstable();
            payload.push(ms.len() as u64);
            payload.extend(ms);
        }
        payload
    });
    Ok(verdict)
}

fn complex_of(s: &HoStructure) -> Result<Complex<'_>> {
    match s {
        HoStructure::SimplicialComplex(sc) => Ok(Complex::from(sc)),
        HoStructure::CellComplex(cc) => Ok(Complex::from(cc)),
        HoStructure::Hypergraph(h) => Ok(Complex::from(h)),
        other => Err(Error::KindMismatch {
            left: "sc|cc|hypergraph",
            right: other.kind(),
        }),
    }
}

fn features_of(s: &HoStructure) -> &crate::entity::FeatureMap {
    match s {
        HoStructure::Hypergraph(h) => h.features(),
        HoStructure::SimplicialComplex(sc) => sc.features(),
        HoStructure::CellComplex(cc) => cc.features(),
        _ => unreachable!("guarded by complex_of"),
    }
}
