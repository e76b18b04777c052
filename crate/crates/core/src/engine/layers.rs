//! The concrete layer updates: incidence message passing, hypergraph
//! convolution, hypergraph attention, boundary-adjacency message passing,
//! CW-network updates, and the tuple convolution.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::adjacency::{incidence_matrix, Complex};
use crate::engine::func::{Aggregator, FuncSpec, Nonlinearity, Params};
use crate::engine::state::ModelState;
use crate::entity::{EntityClass, EntityRef};
use crate::error::{Error, Result};
use crate::hogdm::{CellComplex, HoStructure, Hypergraph, NodeTupleCollection};
use crate::wiring::{compile_bamp, compile_cwn, compile_damp, FlavorTag, Relation, RelationTag};

/// Incidence message passing with the two-level nested aggregation: each
/// hyperedge aggregates member messages to update itself and to build its
/// outgoing message, then each vertex aggregates the messages of its
/// incident hyperedges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImpLayer {
    pub psi_v: FuncSpec,
    pub phi_e: FuncSpec,
    pub psi_e: FuncSpec,
    pub phi_v: FuncSpec,
    #[serde(default)]
    pub agg_edge_update: Aggregator,
    #[serde(default)]
    pub agg_edge_message: Aggregator,
    #[serde(default)]
    pub agg_vertex: Aggregator,
}

impl ImpLayer {
    pub fn apply(&self, h: &Hypergraph, state: &ModelState) -> Result<ModelState> {
        let xv = state.class(EntityClass::Vertex)?.clone();
        let xe = state.class(EntityClass::Hyperedge)?.clone();
        let wv = xv.ncols();
        let we = xe.ncols();
        let psi_w = self.psi_v.output_width(&[wv])?;
        // With no hyperedges there are no channels; the state passes
        // through untouched.
        if h.hyperedges().is_empty() {
            return Ok(state.clone());
        }
        let msg_w = self.psi_e.output_width(&[we, psi_w])?;
        let new_we = self.phi_e.output_width(&[we, psi_w])?;
        let new_wv = self.phi_v.output_width(&[wv, msg_w])?;

        let mut new_xe = Array2::zeros((h.hyperedges().len(), new_we));
        let mut messages: Vec<Array1<f64>> = Vec::with_capacity(h.hyperedges().len());
        for (j, e) in h.hyperedges().iter().enumerate() {
            let member_msgs: Vec<Array1<f64>> = e
                .iter()
                .map(|&u| self.psi_v.apply(&[xv.row(u).to_owned()]))
                .collect::<Result<_>>()?;
            let xe_row = xe.row(j).to_owned();
            let inner_update = self.agg_edge_update.reduce(&member_msgs, psi_w);
            new_xe
                .row_mut(j)
                .assign(&self.phi_e.apply(&[xe_row.clone(), inner_update])?);
            let inner_msg = self.agg_edge_message.reduce(&member_msgs, psi_w);
            messages.push(self.psi_e.apply(&[xe_row, inner_msg])?);
        }

        let mut new_xv = Array2::zeros((h.n(), new_wv));
        for v in 0..h.n() {
            let incident = h.incident_hyperedges(v);
            let rows: Vec<Array1<f64>> = incident.iter().map(|&j| messages[j].clone()).collect();
            let agg = self.agg_vertex.reduce(&rows, msg_w);
            new_xv
                .row_mut(v)
                .assign(&self.phi_v.apply(&[xv.row(v).to_owned(), agg])?);
        }

        let mut out = state.clone();
        out.features.insert(EntityClass::Vertex, new_xv);
        out.features.insert(EntityClass::Hyperedge, new_xe);
        Ok(out)
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        let learnable = [&self.psi_v, &self.phi_e, &self.psi_e, &self.phi_v]
            .iter()
            .any(|f| f.is_learnable());
        if learnable {
            FlavorTag::GeneralMp
        } else {
            FlavorTag::Convolutional
        }
    }
}

/// Degree-normalized hyperedge convolution over the incidence matrix, with
/// zero-degree entries masked to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HgConvLayer {
    /// Diagonal hyperedge weights; ones when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperedge_weights: Option<Vec<f64>>,
    pub theta: Params,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

/// The normalized operator D_V^{-1/2} B W D_E^{-1} B^T D_V^{-1/2} for an
/// arbitrary (possibly attention-weighted) incidence matrix.
fn hgconv_operator(b: &Array2<f64>, w: &[f64]) -> Array2<f64> {
    let (n, m) = b.dim();
    let mut dv = vec![0.0; n];
    let mut de = vec![0.0; m];
    for i in 0..n {
        for j in 0..m {
            dv[i] += w[j] * b[[i, j]];
            de[j] += b[[i, j]];
        }
    }
    let dv_isqrt: Vec<f64> = dv
        .iter()
        .map(|&d| if d > 0.0 { d.powf(-0.5) } else { 0.0 })
        .collect();
    let de_inv: Vec<f64> = de
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();
    let mut left = Array2::zeros((n, m));
    for i in 0..n {
        for j in 0..m {
            left[[i, j]] = dv_isqrt[i] * b[[i, j]] * w[j] * de_inv[j];
        }
    }
    let mut right = Array2::zeros((m, n));
    for j in 0..m {
        for i in 0..n {
            right[[j, i]] = b[[i, j]] * dv_isqrt[i];
        }
    }
    left.dot(&right)
}

impl HgConvLayer {
    pub fn apply(&self, h: &Hypergraph, state: &ModelState) -> Result<ModelState> {
        let xv = state.class(EntityClass::Vertex)?;
        let b = incidence_matrix(h).data;
        let m = h.hyperedges().len();
        let w = match &self.hyperedge_weights {
            Some(w) if w.len() != m => {
                return Err(Error::ShapeMismatch {
                    context: "hyperedge weights",
                    expected: format!("{m}"),
                    got: format!("{}", w.len()),
                })
            }
            Some(w) => w.clone(),
            None => vec![1.0; m],
        };
        let theta = self.theta.materialize()?;
        if theta.nrows() != xv.ncols() {
            return Err(Error::ShapeMismatch {
                context: "hgconv theta",
                expected: format!("{} rows", xv.ncols()),
                got: format!("{}", theta.nrows()),
            });
        }
        let mut out_v = hgconv_operator(&b, &w).dot(xv).dot(&theta);
        self.nonlinearity.apply_inplace(&mut out_v);
        let mut out = state.clone();
        out.features.insert(EntityClass::Vertex, out_v);
        Ok(out)
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        FlavorTag::Convolutional
    }
}

/// Softmax-normalized attention weights over the incidence structure: the
/// competing set of an entry (v, e) is the member set of e.
pub fn hat_attention(
    h: &Hypergraph,
    state: &ModelState,
    theta: &Params,
    nonlinearity: Nonlinearity,
) -> Result<Array2<f64>> {
    if h.hyperedges().is_empty() {
        return Err(Error::EmptyIncidence);
    }
    let xv = state.class(EntityClass::Vertex)?;
    let xe = state.class(EntityClass::Hyperedge)?;
    let t = theta.materialize()?;
    if t.nrows() != xv.ncols() || t.nrows() != xe.ncols() {
        return Err(Error::ShapeMismatch {
            context: "hat theta",
            expected: format!("{} = {} rows", xv.ncols(), xe.ncols()),
            got: format!("{}", t.nrows()),
        });
    }
    let pv = xv.dot(&t);
    let pe = xe.dot(&t);
    let mut b = Array2::zeros((h.n(), h.hyperedges().len()));
    for (j, e) in h.hyperedges().iter().enumerate() {
        let scores: Vec<f64> = e
            .iter()
            .map(|&v| nonlinearity.apply(pv.row(v).dot(&pe.row(j))))
            .collect();
        let denom: f64 = scores.iter().map(|s| s.exp()).sum();
        for (&v, s) in e.iter().zip(&scores) {
            b[[v, j]] = s.exp() / denom;
        }
    }
    Ok(b)
}

/// Hypergraph attention: the learned incidence matrix plugged into the
/// degree-normalized convolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HatLayer {
    pub theta: Params,
    #[serde(default)]
    pub attention_nonlinearity: Nonlinearity,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl HatLayer {
    pub fn apply(&self, h: &Hypergraph, state: &ModelState) -> Result<ModelState> {
        let b_att = hat_attention(h, state, &self.theta, self.attention_nonlinearity)?;
        let xv = state.class(EntityClass::Vertex)?;
        let theta = self.theta.materialize()?;
        let w = vec![1.0; h.hyperedges().len()];
        let mut out_v = hgconv_operator(&b_att, &w).dot(xv).dot(&theta);
        self.nonlinearity.apply_inplace(&mut out_v);
        let mut out = state.clone();
        out.features.insert(EntityClass::Vertex, out_v);
        Ok(out)
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        FlavorTag::Attentional
    }
}

/// Per-relation aggregators for the boundary family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct RelationAggregators {
    #[serde(default)]
    pub boundary: Aggregator,
    #[serde(default)]
    pub coboundary: Aggregator,
    #[serde(default)]
    pub upper: Aggregator,
    #[serde(default)]
    pub lower: Aggregator,
}

impl RelationAggregators {
    fn for_relation(&self, r: Relation) -> Aggregator {
        match r {
            Relation::Boundary => self.boundary,
            Relation::Coboundary => self.coboundary,
            Relation::Upper => self.upper,
            Relation::Lower => self.lower,
        }
    }
}

/// Boundary-adjacency message passing: every entity is updated from the
/// selected relations, with the upper/lower message functions receiving the
/// shared witness feature as their third argument.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BampLayer {
    pub relations: Vec<Relation>,
    pub psi_boundary: FuncSpec,
    pub psi_coboundary: FuncSpec,
    pub psi_upper: FuncSpec,
    pub psi_lower: FuncSpec,
    pub phi: FuncSpec,
    #[serde(default)]
    pub aggregators: RelationAggregators,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl BampLayer {
    fn psi(&self, r: Relation) -> &FuncSpec {
        match r {
            Relation::Boundary => &self.psi_boundary,
            Relation::Coboundary => &self.psi_coboundary,
            Relation::Upper => &self.psi_upper,
            Relation::Lower => &self.psi_lower,
        }
    }

    fn tag_of(r: Relation) -> RelationTag {
        match r {
            Relation::Boundary => RelationTag::Boundary,
            Relation::Coboundary => RelationTag::Coboundary,
            Relation::Upper => RelationTag::Upper,
            Relation::Lower => RelationTag::Lower,
        }
    }

    pub fn apply(&self, host: Complex<'_>, state: &ModelState) -> Result<ModelState> {
        let mut relations: Vec<Relation> = self.relations.clone();
        relations.sort();
        relations.dedup();
        if relations.is_empty() {
            return Err(Error::EmptyRelationSet);
        }
        let wiring = compile_bamp(host, &relations)?;
        self.apply_wired(host, state, &wiring.channels, &relations)
    }

    /// Shared core for BAMP and CWN: channels are already compiled and
    /// sorted canonically.
    fn apply_wired(
        &self,
        host: Complex<'_>,
        state: &ModelState,
        channels: &[crate::wiring::Channel],
        relations: &[Relation],
    ) -> Result<ModelState> {
        let entities = host.entities();
        let in_width = |e: EntityRef| state.width(e.class);
        // Uniform input width across the complex's classes is required
        // because one phi serves every entity.
        let width0 = entities.first().map(|&e| in_width(e)).unwrap_or(0);
        if entities.iter().any(|&e| in_width(e) != width0) {
            return Err(Error::ShapeMismatch {
                context: "bamp input widths",
                expected: format!("{width0}"),
                got: "mixed class widths".into(),
            });
        }
        let msg_widths: Vec<usize> = relations
            .iter()
            .map(|&r| {
                let psi = self.psi(r);
                match r {
                    Relation::Boundary | Relation::Coboundary => {
                        psi.output_width(&[width0, width0])
                    }
                    Relation::Upper | Relation::Lower => {
                        psi.output_width(&[width0, width0, width0])
                    }
                }
            })
            .collect::<Result<_>>()?;
        let phi_widths: Vec<usize> = std::iter::once(width0)
            .chain(msg_widths.iter().copied())
            .collect();
        let out_width = self.phi.output_width(&phi_widths)?;

        let mut new_rows: std::collections::BTreeMap<EntityRef, Array1<f64>> = Default::default();
        for &c in &entities {
            let xc = state.row(c)?;
            let mut phi_args = vec![xc.clone()];
            for (ri, &r) in relations.iter().enumerate() {
                let tag = Self::tag_of(r);
                let psi = self.psi(r);
                let rows: Vec<Array1<f64>> = channels
                    .iter()
                    .filter(|ch| ch.dst == c && ch.tag == tag)
                    .map(|ch| {
                        let xs = state.row(ch.src)?;
                        match ch.via {
                            Some(via) => psi.apply(&[xc.clone(), xs, state.row(via)?]),
                            None => psi.apply(&[xc.clone(), xs]),
                        }
                    })
                    .collect::<Result<_>>()?;
                phi_args.push(self.aggregators.for_relation(r).reduce(&rows, msg_widths[ri]));
            }
            let mut row = self.phi.apply(&phi_args)?;
            row.mapv_inplace(|x| self.nonlinearity.apply(x));
            new_rows.insert(c, row);
        }

        let mut out = state.clone();
        for (class, count) in entities
            .iter()
            .map(|e| e.class)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .map(|class| (class, entities.iter().filter(|e| e.class == class).count()))
        {
            let mut m = Array2::zeros((count, out_width));
            for (e, row) in new_rows.iter().filter(|(e, _)| e.class == class) {
                m.row_mut(e.id).assign(row);
            }
            out.features.insert(class, m);
        }
        Ok(out)
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        let learnable = [
            &self.psi_boundary,
            &self.psi_coboundary,
            &self.psi_upper,
            &self.psi_lower,
            &self.phi,
        ]
        .iter()
        .any(|f| f.is_learnable());
        if learnable {
            FlavorTag::GeneralMp
        } else {
            FlavorTag::Convolutional
        }
    }
}

/// CW-network update: boundary and upper messages only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CwnLayer {
    pub psi_boundary: FuncSpec,
    pub psi_upper: FuncSpec,
    pub phi: FuncSpec,
    #[serde(default)]
    pub aggregators: RelationAggregators,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl CwnLayer {
    fn as_bamp(&self) -> BampLayer {
        BampLayer {
            relations: vec![Relation::Boundary, Relation::Upper],
            psi_boundary: self.psi_boundary.clone(),
            psi_coboundary: FuncSpec::identity(),
            psi_upper: self.psi_upper.clone(),
            psi_lower: FuncSpec::identity(),
            phi: self.phi.clone(),
            aggregators: self.aggregators,
            nonlinearity: self.nonlinearity,
        }
    }

    pub fn apply(&self, cc: &CellComplex, state: &ModelState) -> Result<ModelState> {
        let wiring = compile_cwn(cc)?;
        self.as_bamp().apply_wired(
            Complex::from(cc),
            state,
            &wiring.channels,
            &[Relation::Boundary, Relation::Upper],
        )
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        self.as_bamp().coefficient_flavor()
    }
}

/// Tuple convolution over exclusive (optionally local) down-adjacency:
/// x' = sigma(x Theta1 + sum of neighbors x_u Theta2).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KgnnLayer {
    pub theta1: Params,
    pub theta2: Params,
    #[serde(default)]
    pub local: bool,
    #[serde(default)]
    pub nonlinearity: Nonlinearity,
}

impl KgnnLayer {
    pub fn apply(&self, c: &NodeTupleCollection, state: &ModelState) -> Result<ModelState> {
        let x = state.class(EntityClass::Tuple)?;
        let t1 = self.theta1.materialize()?;
        let t2 = self.theta2.materialize()?;
        if t1.nrows() != x.ncols() || t2.nrows() != x.ncols() || t1.ncols() != t2.ncols() {
            return Err(Error::ShapeMismatch {
                context: "kgnn thetas",
                expected: format!("{}xC twice", x.ncols()),
                got: format!("{:?} and {:?}", t1.dim(), t2.dim()),
            });
        }
        let wiring = compile_damp(c, self.local, false)?;
        let mut neighbor_sum = Array2::zeros(x.dim());
        for ch in &wiring.channels {
            let src = x.row(ch.src.id).to_owned();
            let mut dst_row = neighbor_sum.row_mut(ch.dst.id);
            dst_row += &src;
        }
        let mut out_x = x.dot(&t1) + neighbor_sum.dot(&t2);
        self.nonlinearity.apply_inplace(&mut out_x);
        let mut out = state.clone();
        out.features.insert(EntityClass::Tuple, out_x);
        Ok(out)
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        FlavorTag::Convolutional
    }
}

/// One layer of any kind; dispatch checks the structure kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "layer", rename_all = "lowercase")]
pub enum Layer {
    Imp(ImpLayer),
    Hgconv(HgConvLayer),
    Hat(HatLayer),
    Bamp(BampLayer),
    Cwn(CwnLayer),
    Kgnn(KgnnLayer),
}

impl Layer {
    pub fn apply(&self, structure: &HoStructure, state: &ModelState) -> Result<ModelState> {
        match (self, structure) {
            (Layer::Imp(l), HoStructure::Hypergraph(h)) => l.apply(h, state),
            (Layer::Imp(l), HoStructure::SimplicialComplex(s)) => l.apply(s.hg(), state),
            (Layer::Hgconv(l), HoStructure::Hypergraph(h)) => l.apply(h, state),
            (Layer::Hgconv(l), HoStructure::SimplicialComplex(s)) => l.apply(s.hg(), state),
            (Layer::Hat(l), HoStructure::Hypergraph(h)) => l.apply(h, state),
            (Layer::Hat(l), HoStructure::SimplicialComplex(s)) => l.apply(s.hg(), state),
            (Layer::Bamp(l), HoStructure::SimplicialComplex(s)) => {
                l.apply(Complex::from(s), state)
            }
            (Layer::Bamp(l), HoStructure::CellComplex(c)) => l.apply(Complex::from(c), state),
            (Layer::Cwn(l), HoStructure::CellComplex(c)) => l.apply(c, state),
            (Layer::Kgnn(l), HoStructure::NodeTupleCollection(c)) => l.apply(c, state),
            (layer, s) => Err(Error::KindMismatch {
                left: layer.kind(),
                right: s.kind(),
            }),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Layer::Imp(_) => "imp",
            Layer::Hgconv(_) => "hgconv",
            Layer::Hat(_) => "hat",
            Layer::Bamp(_) => "bamp",
            Layer::Cwn(_) => "cwn",
            Layer::Kgnn(_) => "kgnn",
        }
    }

    pub fn coefficient_flavor(&self) -> FlavorTag {
        match self {
            Layer::Imp(l) => l.coefficient_flavor(),
            Layer::Hgconv(l) => l.coefficient_flavor(),
            Layer::Hat(l) => l.coefficient_flavor(),
            Layer::Bamp(l) => l.coefficient_flavor(),
            Layer::Cwn(l) => l.coefficient_flavor(),
            Layer::Kgnn(l) => l.coefficient_flavor(),
        }
    }
}
