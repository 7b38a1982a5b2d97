//! Two-network ReLU threshold gadgets: ψ₁(x) ⊕ ψ₂(x) = 1{x ≥ z} (or 1{x ≤ z}).

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::network::{Activation, Layer, Network, Neuron};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// 1{x ≥ z}
    Ge,
    /// 1{x ≤ z}
    Le,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Ge => Direction::Le,
            Direction::Le => Direction::Ge,
        }
    }
}

/// Constants of one gadget. For negative z the gadget of the opposite
/// direction at |z| is used on −x; `mirrored` records that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetParams {
    pub z: Float,
    pub direction: Direction,
    pub mirrored: bool,
    /// 𝔢 of |z|
    pub e: i64,
    /// 𝔞 of |z|
    pub a: Dyadic,
    pub c: i64,
    pub u0: Dyadic,
    pub u0_tilde: Dyadic,
    pub c_tilde: i64,
    pub k: i64,
}

/// One of the two three-layer networks, as its five weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetTerm {
    pub in_weight: Float,
    pub in_bias: Float,
    pub mid_weight: Float,
    pub mid_bias: Float,
    pub out_weight: Float,
}

impl GadgetTerm {
    pub fn negated(&self, fmt: &Format) -> GadgetTerm {
        GadgetTerm { out_weight: fmt.neg(&self.out_weight), ..self.clone() }
    }
}

pub fn gadget_params(fmt: &Format, z: &Float, direction: Direction) -> Result<GadgetParams> {
    let Some(nz) = fmt.normalized(z) else {
        return Err(Error::ThresholdOutOfRange(format!("threshold must be finite and nonzero, got {}", fmt.format_text(z))));
    };
    if let Some(kappa) = fmt.kappa() {
        if fmt.value(z).unwrap().abs() > kappa {
            return Err(Error::ThresholdOutOfRange(format!("|{}| exceeds κ = {kappa}", fmt.format_text(z))));
        }
    }
    let p = fmt.p() as i64;
    let one = Dyadic::one();
    let (u0, k, special) = match (fmt.e_min(), fmt.e_max(), fmt.e0()) {
        (Some(emin), Some(emax), Some(e0)) => {
            let u0 = if nz.e >= emin { fmt.u() } else { Dyadic::pow2(-p + nz.c) };
            let k = if nz.e > 0 {
                debug_assert!(nz.e <= -2 - p + emax);
                -p + e0
            } else {
                3 - p - e0 - nz.c
            };
            (u0, k, nz.e == -p + emin)
        }
        _ => (fmt.u(), 0, false),
    };
    let (u0_tilde, c_tilde) = if nz.a == one && !special { (u0.mul_pow2(-1), 1) } else { (Dyadic::zero(), 0) };
    Ok(GadgetParams {
        z: *z,
        direction,
        mirrored: nz.neg,
        e: nz.e,
        a: nz.a,
        c: nz.c,
        u0,
        u0_tilde,
        c_tilde,
        k,
    })
}

/// The two terms (ψ₁, ψ₂) of the gadget at `z`.
pub fn gadget_terms(fmt: &Format, z: &Float, direction: Direction) -> Result<[GadgetTerm; 2]> {
    let g = gadget_params(fmt, z, direction)?;
    let p = fmt.p() as i64;
    let x = |d: Dyadic| fmt.exact(&d);
    let two = Dyadic::from_i64(2);
    let one = Dyadic::one();
    let base = if g.mirrored { direction.flip() } else { direction };
    let sx: i64 = if g.mirrored { -1 } else { 1 };
    let mid_weight = x(-Dyadic::pow2(p - g.e + g.k))?;
    let scale = |s: Dyadic| s.mul_pow2(p + g.k);
    match base {
        Direction::Ge => {
            let in_weight = x(Dyadic::from_i64(-sx))?;
            let in_bias = x((&two - &g.u0).mul_pow2(g.e))?;
            let out = Dyadic::pow2(g.c_tilde - g.c - g.k);
            let b1 = scale(&(&two - &g.a) - &g.u0_tilde);
            let b2 = scale(&(&two - &g.a) - &g.u0);
            Ok([
                GadgetTerm { in_weight, in_bias, mid_weight, mid_bias: x(b1)?, out_weight: x(out.clone())? },
                GadgetTerm { in_weight, in_bias, mid_weight, mid_bias: x(b2)?, out_weight: x(-out)? },
            ])
        }
        Direction::Le => {
            let in_weight = x(Dyadic::from_i64(sx))?;
            let in_bias = x(-Dyadic::pow2(g.e))?;
            let out = Dyadic::pow2(-g.c - g.k);
            let b1 = scale(&(&g.a - &one) + &g.u0);
            let b2 = scale(&g.a - &one);
            Ok([
                GadgetTerm { in_weight, in_bias, mid_weight, mid_bias: x(b1)?, out_weight: x(out.clone())? },
                GadgetTerm { in_weight, in_bias, mid_weight, mid_bias: x(b2)?, out_weight: x(-out)? },
            ])
        }
    }
}

/// A single term as a standalone 3-layer, 5-parameter ReLU network.
pub fn term_network(fmt: &Format, t: &GadgetTerm, label: &str) -> Network {
    Network {
        format: *fmt,
        input_dim: 1,
        activation: Activation::Relu,
        layers: vec![
            Layer { neurons: vec![Neuron::new(vec![0, 1], vec![t.in_weight, t.in_bias])] },
            Layer { neurons: vec![Neuron::new(vec![0, 1], vec![t.mid_weight, t.mid_bias])] },
            Layer { neurons: vec![Neuron::new(vec![0], vec![t.out_weight])] },
        ],
        label: Some(label.into()),
    }
}

/// (ψ₁, ψ₂) with ψ₁(x) ⊕ ψ₂(x) equal to the chosen indicator of x against z.
pub fn relu_threshold_gadget(fmt: &Format, z: &Float, direction: Direction) -> Result<(Network, Network)> {
    let [t1, t2] = gadget_terms(fmt, z, direction)?;
    let zt = fmt.format_text(z);
    let dir = match direction {
        Direction::Ge => "ge",
        Direction::Le => "le",
    };
    Ok((
        term_network(fmt, &t1, &format!("relu-gadget {dir} z={zt} psi1")),
        term_network(fmt, &t2, &format!("relu-gadget {dir} z={zt} psi2")),
    ))
}
