//! Layered networks evaluated under floating-point arithmetic.
//!
//! Neuron `i` of layer `l` reads the previous layer's outputs `z` extended by a
//! trailing constant 1 (index `N_{l-1}`, zero-based), through a sorted index
//! set. Hidden layers apply the activation; the output layer is affine only.

mod doc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

pub use doc::NetworkDoc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Step,
    Relu,
}

impl Activation {
    /// σ applied to an already rounded pre-activation.
    pub fn apply(&self, fmt: &Format, x: &Float) -> Float {
        match self {
            Activation::Step => {
                let on = match *x {
                    Float::Finite { neg, m, .. } => !neg || m == 0,
                    Float::PosInf => true,
                    Float::NegInf | Float::NaN => false,
                };
                if on {
                    fmt.one()
                } else {
                    fmt.zero(false)
                }
            }
            Activation::Relu => {
                if x.is_nan() || x.is_positive() {
                    *x
                } else {
                    fmt.zero(false)
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neuron {
    /// Zero-based, strictly increasing; the previous width denotes the bias input.
    pub indices: Vec<usize>,
    pub weights: Vec<Float>,
}

impl Neuron {
    pub fn new(indices: Vec<usize>, weights: Vec<Float>) -> Self {
        Neuron { indices, weights }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layer {
    pub neurons: Vec<Neuron>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    pub format: Format,
    pub input_dim: usize,
    pub activation: Activation,
    pub layers: Vec<Layer>,
    /// Free-form provenance label carried through documents.
    pub label: Option<String>,
}

/// Accumulated side effects of floating-point operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpStats {
    pub inexact_ops: u32,
    pub overflow: bool,
    pub nan: bool,
}

impl OpStats {
    fn record(&mut self, r: &Float, flags: crate::format::OpFlags) {
        self.inexact_ops += flags.inexact as u32;
        self.overflow |= flags.overflow;
        self.nan |= r.is_nan();
    }

    fn merge(&mut self, o: &OpStats) {
        self.inexact_ops += o.inexact_ops;
        self.overflow |= o.overflow;
        self.nan |= o.nan;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeuronTrace {
    pub pre: Float,
    pub post: Float,
    pub stats: OpStats,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvalTrace {
    /// One entry per layer, one per neuron; the last layer's post equals its pre.
    pub layers: Vec<Vec<NeuronTrace>>,
    /// Some ⊕/⊗ turned finite operands into ±∞.
    pub overflow_seen: bool,
    pub nan_seen: bool,
    pub inexact_ops: u32,
}

/// ⨁_j w_j ⊗ z_{i_j} folded left in index order, where z = (x, 1).
pub fn aff(fmt: &Format, x: &[Float], w: &[Float], idx: &[usize]) -> Result<Float> {
    aff_stats(fmt, x, w, idx).map(|(v, _)| v)
}

pub fn aff_stats(fmt: &Format, x: &[Float], w: &[Float], idx: &[usize]) -> Result<(Float, OpStats)> {
    if idx.is_empty() {
        return Err(Error::Domain("empty affine map".into()));
    }
    if w.len() != idx.len() {
        return Err(Error::ShapeMismatch(format!("{} weights for {} indices", w.len(), idx.len())));
    }
    if idx.windows(2).any(|p| p[0] >= p[1]) || *idx.last().unwrap() > x.len() {
        return Err(Error::ShapeMismatch(format!("index set {idx:?} invalid for {} inputs", x.len())));
    }
    Ok(aff_unchecked(fmt, x, w, idx))
}

fn aff_unchecked(fmt: &Format, x: &[Float], w: &[Float], idx: &[usize]) -> (Float, OpStats) {
    let one = fmt.one();
    let z = |i: usize| if i == x.len() { &one } else { &x[i] };
    let mut st = OpStats::default();
    let (mut acc, f) = fmt.mul_flags(&w[0], z(idx[0]));
    st.record(&acc, f);
    for (wj, &ij) in w.iter().zip(idx).skip(1) {
        let (t, f) = fmt.mul_flags(wj, z(ij));
        st.record(&t, f);
        let (s, f) = fmt.add_flags(&acc, &t);
        st.record(&s, f);
        acc = s;
    }
    (acc, st)
}

impl Network {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// N_0 … N_L.
    pub fn widths(&self) -> Vec<usize> {
        std::iter::once(self.input_dim).chain(self.layers.iter().map(|l| l.neurons.len())).collect()
    }

    /// Σ |I_{l,i}|.
    pub fn count_params(&self) -> usize {
        self.layers.iter().flat_map(|l| &l.neurons).map(|n| n.indices.len()).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let err = |m: String| Err(Error::Validation(m));
        if self.layers.is_empty() {
            return err("network has no layers".into());
        }
        if self.input_dim == 0 {
            return err("input dimension is zero".into());
        }
        if self.layers.last().unwrap().neurons.len() != 1 {
            return err("output layer must have exactly one neuron".into());
        }
        let mut prev = self.input_dim;
        for (l, layer) in self.layers.iter().enumerate() {
            if layer.neurons.is_empty() {
                return err(format!("layer {l} is empty"));
            }
            for (i, n) in layer.neurons.iter().enumerate() {
                if n.indices.is_empty() {
                    return err(format!("neuron ({l},{i}) has an empty index set"));
                }
                if n.indices.len() != n.weights.len() {
                    return err(format!("neuron ({l},{i}): {} indices, {} weights", n.indices.len(), n.weights.len()));
                }
                if n.indices.windows(2).any(|p| p[0] >= p[1]) || *n.indices.last().unwrap() > prev {
                    return err(format!("neuron ({l},{i}): index set {:?} not ascending within 0..={prev}", n.indices));
                }
                if let Some(w) = n.weights.iter().find(|w| !w.is_finite() || !self.format.is_canonical(w)) {
                    return err(format!("neuron ({l},{i}): weight {w:?} is not a finite canonical value"));
                }
            }
            prev = layer.neurons.len();
        }
        Ok(())
    }

    /// Output value only.
    pub fn eval_value(&self, x: &[Float]) -> Result<Float> {
        self.run(x, false).map(|(v, _)| v)
    }

    /// Output and full trace. Specials propagate into the trace; evaluation never aborts
    /// once the input shape is right.
    pub fn eval(&self, x: &[Float]) -> Result<(Float, EvalTrace)> {
        self.run(x, true)
    }

    /// Output plus flags, without per-neuron records.
    pub fn eval_flags(&self, x: &[Float]) -> Result<(Float, EvalTrace)> {
        self.run(x, false)
    }

    pub fn eval_batch(&self, xs: &[Vec<Float>]) -> Result<Vec<(Float, EvalTrace)>> {
        xs.par_iter().map(|x| self.eval(x)).collect()
    }

    fn run(&self, x: &[Float], keep: bool) -> Result<(Float, EvalTrace)> {
        if x.len() != self.input_dim {
            return Err(Error::ShapeMismatch(format!("input has {} entries, network expects {}", x.len(), self.input_dim)));
        }
        let fmt = &self.format;
        let mut trace = EvalTrace::default();
        let mut total = OpStats::default();
        let mut cur: Vec<Float> = x.to_vec();
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut next = Vec::with_capacity(layer.neurons.len());
            let mut recs = Vec::new();
            for n in &layer.neurons {
                let (pre, st) = aff_unchecked(fmt, &cur, &n.weights, &n.indices);
                total.merge(&st);
                let post = if l == last { pre } else { self.activation.apply(fmt, &pre) };
                assert!(fmt.is_canonical(&post), "activation output must already be representable");
                if keep {
                    recs.push(NeuronTrace { pre, post, stats: st });
                }
                next.push(post);
            }
            if keep {
                trace.layers.push(recs);
            }
            cur = next;
        }
        trace.overflow_seen = total.overflow;
        trace.nan_seen = total.nan;
        trace.inexact_ops = total.inexact_ops;
        Ok((cur[0], trace))
    }
}
