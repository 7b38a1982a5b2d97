//! ReLU memorizer and approximator assembled from threshold gadgets.
//!
//! Layout (4 layers): one first-layer and one second-layer neuron per gadget
//! term; one aggregate neuron per indicator block, ReLU((⨁ h) ⊕ b); one output
//! neuron summing y ⊗ indicator over the blocks in order.

use crate::dataset::Dataset;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::network::{Activation, Layer, Network, Neuron};

use super::gadget::{gadget_terms, Direction, GadgetTerm};
use super::grid::GridPlan;
use super::step::{check_dataset, check_dim, int};

/// One coordinate's four h-terms, or a whole indicator block.
struct Block {
    /// (input coordinate, term) in h order.
    terms: Vec<(usize, GadgetTerm)>,
    bias: i64,
    out: Float,
}

/// Appends ±(ψ₁, ψ₂) of the gadget at z.
fn push_pair(fmt: &Format, terms: &mut Vec<(usize, GadgetTerm)>, j: usize, z: &Float, dir: Direction, negate: bool) -> Result<()> {
    for t in gadget_terms(fmt, z, dir)? {
        terms.push((j, if negate { t.negated(fmt) } else { t }));
    }
    Ok(())
}

fn within_kappa(fmt: &Format, z: &Float) -> bool {
    match fmt.kappa() {
        Some(kappa) => fmt.value(z).is_some_and(|v| v.abs() <= kappa),
        None => true,
    }
}

/// Terms realizing 1{x_j = z} − (1 if `zero_style`), returning the bias shift.
///
/// Nonzero z: ψ(z, ≥) − ψ(z⁺, ≥); when z⁺ is not a usable threshold (zero, or past κ)
/// the upper half becomes ψ(z, ≤) with an extra −1 in the bias.
fn point_terms(fmt: &Format, terms: &mut Vec<(usize, GadgetTerm)>, j: usize, z: &Float, delta: &Float) -> Result<i64> {
    if z.is_zero() {
        if fmt.is_fpq() {
            // −1{x ≤ −η} − 1{x ≥ η} = 1{x = 0} − 1
            let eta = fmt.exact(&fmt.eta().unwrap())?;
            push_pair(fmt, terms, j, &fmt.neg(&eta), Direction::Le, true)?;
            push_pair(fmt, terms, j, &eta, Direction::Ge, true)?;
            return Ok(1);
        }
        push_pair(fmt, terms, j, &fmt.neg(delta), Direction::Ge, false)?;
        let up = fmt.succ(delta).expect("Fp successor of a positive value");
        push_pair(fmt, terms, j, &up, Direction::Ge, true)?;
        return Ok(0);
    }
    push_pair(fmt, terms, j, z, Direction::Ge, false)?;
    match fmt.succ(z) {
        Some(up) if !up.is_zero() && within_kappa(fmt, &up) => {
            push_pair(fmt, terms, j, &up, Direction::Ge, true)?;
            Ok(0)
        }
        _ => {
            push_pair(fmt, terms, j, z, Direction::Le, false)?;
            Ok(-1)
        }
    }
}

fn assemble(fmt: &Format, d: usize, blocks: &[Block], label: String) -> Result<Network> {
    let total: usize = blocks.iter().map(|b| b.terms.len()).sum();
    let mut first = Vec::with_capacity(total);
    let mut second = Vec::with_capacity(total);
    let mut third = Vec::with_capacity(blocks.len());
    let mut t = 0usize;
    for b in blocks {
        let start = t;
        let mut w = Vec::with_capacity(b.terms.len() + 1);
        for (j, term) in &b.terms {
            first.push(Neuron::new(vec![*j, d], vec![term.in_weight, term.in_bias]));
            second.push(Neuron::new(vec![t, total], vec![term.mid_weight, term.mid_bias]));
            w.push(term.out_weight);
            t += 1;
        }
        let mut idx: Vec<usize> = (start..t).collect();
        idx.push(total);
        w.push(fmt.exact(&Dyadic::from_i64(b.bias)).map_err(|_| Error::DimensionTooLarge { d, limit: "bias range".into() })?);
        third.push(Neuron::new(idx, w));
    }
    let outputs = blocks.iter().map(|b| b.out).collect();
    Ok(Network {
        format: *fmt,
        input_dim: d,
        activation: Activation::Relu,
        layers: vec![
            Layer { neurons: first },
            Layer { neurons: second },
            Layer { neurons: third },
            Layer { neurons: vec![Neuron::new((0..blocks.len()).collect(), outputs)] },
        ],
        label: Some(label),
    })
}

/// δ = ½·min |z_{i,j}| over nonzero coordinates, or 1 when all coordinates are zero.
fn fp_delta(fmt: &Format, data: &Dataset) -> Float {
    let min = data.inputs.iter().flatten().filter(|v| !v.is_zero()).map(|v| fmt.value(v).unwrap().abs()).min();
    match min {
        Some(m) => fmt.exact(&m.mul_pow2(-1)).expect("Fp halves exactly"),
        None => fmt.one(),
    }
}

/// 4-layer ReLU network with f(z_i) = y_i and 20dn+2n parameters.
pub fn relu_memorizer(fmt: &Format, data: &Dataset) -> Result<Network> {
    check_dataset(fmt, data)?;
    let d = data.dim();
    if fmt.is_fpq() {
        if let Some((i, v)) = data.inputs.iter().enumerate().flat_map(|(i, z)| z.iter().map(move |v| (i, v))).find(|(_, v)| !within_kappa(fmt, v)) {
            return Err(Error::InputOutOfRange(format!("input {i} has coordinate {} beyond κ = {}", fmt.format_text(v), fmt.kappa().unwrap())));
        }
    }
    let delta = if fmt.is_fpq() { fmt.one() } else { fp_delta(fmt, data) };
    let mut blocks = Vec::with_capacity(data.len());
    for (z, y) in data.inputs.iter().zip(&data.outputs) {
        let mut terms = Vec::with_capacity(4 * d);
        let mut bias = -(d as i64 - 1);
        for (j, zj) in z.iter().enumerate() {
            bias += point_terms(fmt, &mut terms, j, zj, &delta)?;
        }
        blocks.push(Block { terms, bias, out: *y });
    }
    assemble(fmt, d, &blocks, format!("relu-memorizer n={} d={d}", data.len()))
}

/// 4-layer ReLU network equal to the cell value on every cell, with at most (20d+2)K^d parameters.
pub fn relu_approximator(plan: &GridPlan) -> Result<Network> {
    let fmt = &plan.format;
    let d = plan.d;
    check_dim(fmt, d)?;
    let mut blocks = Vec::with_capacity(plan.reps.len());
    for rep in &plan.reps {
        let mut terms = Vec::with_capacity(4 * d);
        let mut bias = -(d as i64 - 1);
        for (j, &c) in rep.iota.iter().enumerate() {
            let cell = &plan.cells[c];
            if c == 0 {
                if fmt.is_fpq() {
                    // −1{x ≤ −η}: equals 0 on [0,1]; the bias absorbs the shift
                    let eta = fmt.exact(&fmt.eta().unwrap())?;
                    push_pair(fmt, &mut terms, j, &fmt.neg(&eta), Direction::Le, true)?;
                    bias += 1;
                } else {
                    // the lower threshold 0 is not a valid gadget threshold; any negative one works on [0,1]
                    push_pair(fmt, &mut terms, j, &fmt.neg(&fmt.one()), Direction::Ge, false)?;
                }
            } else {
                push_pair(fmt, &mut terms, j, &cell.lo, Direction::Ge, false)?;
            }
            push_pair(fmt, &mut terms, j, &cell.next, Direction::Ge, true)?;
        }
        blocks.push(Block { terms, bias, out: rep.value });
    }
    assemble(fmt, d, &blocks, format!("relu-approximator {} d={d} cells={}", plan.target, plan.cells.len()))
}

/// f(x) = ReLU((x ⊗ 2^p) ⊖ (1−u)·2^p) ⊖ ReLU((x ⊗ 2^p) ⊖ 2^p): the naive ReLU indicator attempt.
pub fn oscillation_net(fmt: &Format) -> Network {
    let p = fmt.p() as i64;
    let scale = fmt.exact(&Dyadic::pow2(p)).expect("2^p representable");
    let one = fmt.one();
    Network {
        format: *fmt,
        input_dim: 1,
        activation: Activation::Relu,
        layers: vec![
            Layer {
                neurons: vec![
                    Neuron::new(vec![0, 1], vec![scale, int(fmt, -((1i64 << p) - 1))]),
                    Neuron::new(vec![0, 1], vec![scale, fmt.neg(&scale)]),
                ],
            },
            Layer { neurons: vec![Neuron::new(vec![0, 1], vec![one, fmt.neg(&one)])] },
        ],
        label: Some("naive-relu-indicator".into()),
    }
}
