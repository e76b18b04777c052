//! Pluggable function descriptors: nonlinearities, aggregators, parameter
//! matrices (explicit or seed-generated), and the small psi/phi library
//! (identity, linear, one-hidden-layer map).

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    #[default]
    Identity,
    Relu,
    Sigmoid,
}

impl Nonlinearity {
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            Nonlinearity::Identity => x,
            Nonlinearity::Relu => x.max(0.0),
            Nonlinearity::Sigmoid => 1.0 / (1.0 + (-x).exp()),
        }
    }

    pub fn apply_inplace(&self, m: &mut Array2<f64>) {
        if *self != Nonlinearity::Identity {
            m.mapv_inplace(|x| self.apply(x));
        }
    }
}

/// Permutation-invariant reduction. Reductions run in the caller-supplied
/// (canonical) order; the empty reduction yields the zero vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregator {
    #[default]
    Sum,
    Mean,
    Max,
}

impl Aggregator {
    pub fn reduce(&self, rows: &[Array1<f64>], width: usize) -> Array1<f64> {
        if rows.is_empty() {
            return Array1::zeros(width);
        }
        match self {
            Aggregator::Sum => {
                let mut acc = Array1::zeros(width);
                for r in rows {
                    acc += r;
                }
                acc
            }
            Aggregator::Mean => {
                let mut acc = Array1::<f64>::zeros(width);
                for r in rows {
                    acc += r;
                }
                acc / rows.len() as f64
            }
            Aggregator::Max => {
                let mut acc = rows[0].clone();
                for r in &rows[1..] {
                    for (a, &b) in acc.iter_mut().zip(r.iter()) {
                        if b > *a {
                            *a = b;
                        }
                    }
                }
                acc
            }
        }
    }
}

/// A parameter matrix: given explicitly or generated from a seed with a
/// declared shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Params {
    Explicit(Vec<Vec<f64>>),
    Seeded { rows: usize, cols: usize, seed: u64 },
}

impl Params {
    pub fn scalar(x: f64) -> Params {
        Params::Explicit(vec![vec![x]])
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Params::Explicit(rows) => (rows.len(), rows.first().map(Vec::len).unwrap_or(0)),
            Params::Seeded { rows, cols, .. } => (*rows, *cols),
        }
    }

    pub fn materialize(&self) -> Result<Array2<f64>> {
        match self {
            Params::Explicit(rows) => {
                let (r, c) = self.shape();
                if rows.iter().any(|row| row.len() != c) {
                    return Err(Error::ShapeMismatch {
                        context: "parameter matrix",
                        expected: format!("{r}x{c}"),
                        got: "ragged rows".into(),
                    });
                }
                let flat: Vec<f64> = rows.iter().flatten().copied().collect();
                Array2::from_shape_vec((r, c), flat).map_err(|_| Error::ShapeMismatch {
                    context: "parameter matrix",
                    expected: format!("{r}x{c}"),
                    got: "bad shape".into(),
                })
            }
            Params::Seeded { rows, cols, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let scale = 1.0 / (*rows as f64).sqrt().max(1.0);
                let data: Vec<f64> = (0..rows * cols)
                    .map(|_| rng.gen_range(-1.0..1.0) * scale)
                    .collect();
                Ok(Array2::from_shape_vec((*rows, *cols), data).expect("shape matches"))
            }
        }
    }
}

/// How a multi-argument site collapses its inputs before the map runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArgSelect {
    /// Concatenate all arguments.
    #[default]
    Concat,
    /// Take the argument at this index.
    Arg(usize),
    /// Elementwise sum of all arguments (widths must agree).
    Sumall,
}

/// The built-in map library.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Func {
    #[default]
    Identity,
    Linear {
        weight: Params,
    },
    /// One hidden layer with an internal ReLU.
    Mlp {
        hidden: Params,
        out: Params,
    },
}

impl Func {
    pub fn is_learnable(&self) -> bool {
        !matches!(self, Func::Identity)
    }
}

/// A message or update function: argument selection followed by a map.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FuncSpec {
    #[serde(default)]
    pub select: ArgSelect,
    #[serde(default)]
    pub func: Func,
}

impl FuncSpec {
    pub fn identity() -> Self {
        FuncSpec::default()
    }

    pub fn pick(index: usize) -> Self {
        FuncSpec {
            select: ArgSelect::Arg(index),
            func: Func::Identity,
        }
    }

    pub fn sum_all() -> Self {
        FuncSpec {
            select: ArgSelect::Sumall,
            func: Func::Identity,
        }
    }

    pub fn linear(weight: Params) -> Self {
        FuncSpec {
            select: ArgSelect::Concat,
            func: Func::Linear { weight },
        }
    }

    pub fn mlp(hidden: Params, out: Params) -> Self {
        FuncSpec {
            select: ArgSelect::Concat,
            func: Func::Mlp { hidden, out },
        }
    }

    fn selected_width(&self, input_widths: &[usize]) -> Result<usize> {
        match self.select {
            ArgSelect::Concat => Ok(input_widths.iter().sum()),
            ArgSelect::Arg(i) => input_widths.get(i).copied().ok_or(Error::ShapeMismatch {
                context: "argument selection",
                expected: format!("at least {} arguments", i + 1),
                got: format!("{}", input_widths.len()),
            }),
            ArgSelect::Sumall => {
                let w = input_widths.first().copied().unwrap_or(0);
                if input_widths.iter().any(|&x| x != w) {
                    return Err(Error::ShapeMismatch {
                        context: "argument sum",
                        expected: format!("uniform width {w}"),
                        got: format!("{input_widths:?}"),
                    });
                }
                Ok(w)
            }
        }
    }

    /// Output width for the given argument widths, with shape checking.
    pub fn output_width(&self, input_widths: &[usize]) -> Result<usize> {
        let sel = self.selected_width(input_widths)?;
        match &self.func {
            Func::Identity => Ok(sel),
            Func::Linear { weight } => {
                let (r, c) = weight.shape();
                if r != sel {
                    return Err(Error::ShapeMismatch {
                        context: "linear map",
                        expected: format!("{sel} input rows"),
                        got: format!("{r}"),
                    });
                }
                Ok(c)
            }
            Func::Mlp { hidden, out } => {
                let (hr, hc) = hidden.shape();
                let (or, oc) = out.shape();
                if hr != sel || or != hc {
                    return Err(Error::ShapeMismatch {
                        context: "mlp",
                        expected: format!("{sel} -> h -> out chain"),
                        got: format!("{hr}x{hc} then {or}x{oc}"),
                    });
                }
                Ok(oc)
            }
        }
    }

    pub fn apply(&self, args: &[Array1<f64>]) -> Result<Array1<f64>> {
        let widths: Vec<usize> = args.iter().map(|a| a.len()).collect();
        self.output_width(&widths)?;
        let selected: Array1<f64> = match self.select {
            ArgSelect::Concat => {
                let mut v = Vec::with_capacity(widths.iter().sum());
                for a in args {
                    v.extend(a.iter().copied());
                }
                Array1::from_vec(v)
            }
            ArgSelect::Arg(i) => args[i].clone(),
            ArgSelect::Sumall => {
                let w = widths.first().copied().unwrap_or(0);
                let mut acc = Array1::zeros(w);
                for a in args {
                    acc += a;
                }
                acc
            }
        };
        match &self.func {
            Func::Identity => Ok(selected),
            Func::Linear { weight } => Ok(selected.dot(&weight.materialize()?)),
            Func::Mlp { hidden, out } => {
                let mut h = selected.dot(&hidden.materialize()?);
                h.mapv_inplace(|x| x.max(0.0));
                Ok(h.dot(&out.materialize()?))
            }
        }
    }

    pub fn is_learnable(&self) -> bool {
        self.func.is_learnable()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::arr1;

    #[test]
    fn selection_modes() {
        let a = arr1(&[1.0, 2.0]);
        let b = arr1(&[3.0, 4.0]);
        assert_eq!(
            FuncSpec::identity().apply(&[a.clone(), b.clone()]).unwrap(),
            arr1(&[1.0, 2.0, 3.0, 4.0])
        );
        assert_eq!(
            FuncSpec::pick(1).apply(&[a.clone(), b.clone()]).unwrap(),
            arr1(&[3.0, 4.0])
        );
        assert_eq!(
            FuncSpec::sum_all().apply(&[a, b]).unwrap(),
            arr1(&[4.0, 6.0])
        );
    }

    #[test]
    fn linear_and_mlp_shapes() {
        let lin = FuncSpec::linear(Params::Explicit(vec![vec![2.0], vec![1.0]]));
        assert_eq!(lin.apply(&[arr1(&[3.0, 4.0])]).unwrap(), arr1(&[10.0]));
        assert!(lin.apply(&[arr1(&[3.0])]).is_err());
        let mlp = FuncSpec::mlp(
            Params::Explicit(vec![vec![1.0, -1.0]]),
            Params::Explicit(vec![vec![1.0], vec![1.0]]),
        );
        // relu([x, -x]) . [1, 1]^T = |x|
        assert_eq!(mlp.apply(&[arr1(&[-2.5])]).unwrap(), arr1(&[2.5]));
    }

    #[test]
    fn seeded_params_are_reproducible() {
        let p = Params::Seeded {
            rows: 3,
            cols: 2,
            seed: 42,
        };
        assert_eq!(p.materialize().unwrap(), p.materialize().unwrap());
    }

    #[test]
    fn aggregators_reduce_empty_to_zero() {
        for agg in [Aggregator::Sum, Aggregator::Mean, Aggregator::Max] {
            assert_eq!(agg.reduce(&[], 3), Array1::<f64>::zeros(3));
        }
        let rows = vec![arr1(&[1.0, 5.0]), arr1(&[3.0, 2.0])];
        assert_eq!(Aggregator::Sum.reduce(&rows, 2), arr1(&[4.0, 7.0]));
        assert_eq!(Aggregator::Mean.reduce(&rows, 2), arr1(&[2.0, 3.5]));
        assert_eq!(Aggregator::Max.reduce(&rows, 2), arr1(&[3.0, 5.0]));
    }
}
