//! Step-activation constructions: cube indicator, memorizer, approximator.

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::network::{Activation, Layer, Network, Neuron};

use super::grid::GridPlan;

pub(crate) fn check_dim(fmt: &Format, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::ShapeMismatch("input dimension must be positive".into()));
    }
    if (d as u128) > (1u128 << fmt.p()) {
        return Err(Error::DimensionTooLarge { d, limit: format!("2^{}", fmt.p()) });
    }
    Ok(())
}

/// −x, with zero kept as +0.
pub(crate) fn negate(fmt: &Format, x: &Float) -> Float {
    if x.is_zero() {
        fmt.zero(false)
    } else {
        fmt.neg(x)
    }
}

pub(crate) fn int(fmt: &Format, v: i64) -> Float {
    fmt.from_i64(v).expect("small integers are representable")
}

/// First-layer pair for coordinate j: Step(−x_j ⊕ β_j), Step(x_j ⊖ α_j).
fn cube_pair(fmt: &Format, d: usize, j: usize, alpha: &Float, beta: &Float) -> [Neuron; 2] {
    let one = fmt.one();
    [
        Neuron::new(vec![j, d], vec![fmt.neg(&one), *beta]),
        Neuron::new(vec![j, d], vec![one, negate(fmt, alpha)]),
    ]
}

/// Aggregate Step neuron over a block of `width` first-layer neurons at `offset`.
fn block_neuron(offset: usize, weights: Vec<Float>, bias: Float, total: usize) -> Neuron {
    let mut idx: Vec<usize> = (offset..offset + weights.len()).collect();
    idx.push(total);
    let mut w = weights;
    w.push(bias);
    Neuron::new(idx, w)
}

fn check_box(fmt: &Format, alpha: &[Float], beta: &[Float]) -> Result<()> {
    if alpha.len() != beta.len() {
        return Err(Error::ShapeMismatch(format!("{} lower and {} upper bounds", alpha.len(), beta.len())));
    }
    check_dim(fmt, alpha.len())?;
    for (a, b) in alpha.iter().zip(beta) {
        if !a.is_finite() || !b.is_finite() || a > b {
            return Err(Error::Domain(format!("bad interval [{}, {}]", fmt.format_text(a), fmt.format_text(b))));
        }
    }
    Ok(())
}

/// 1{x ∈ Π[α_j, β_j]} as a 3-layer Step network with 6d+2 parameters.
pub fn step_cube_indicator(fmt: &Format, alpha: &[Float], beta: &[Float]) -> Result<Network> {
    check_box(fmt, alpha, beta)?;
    let d = alpha.len();
    let first: Vec<Neuron> = (0..d).flat_map(|j| cube_pair(fmt, d, j, &alpha[j], &beta[j])).collect();
    let agg = block_neuron(0, vec![fmt.one(); 2 * d], int(fmt, -2 * d as i64), 2 * d);
    Ok(Network {
        format: *fmt,
        input_dim: d,
        activation: Activation::Step,
        layers: vec![
            Layer { neurons: first },
            Layer { neurons: vec![agg] },
            Layer { neurons: vec![Neuron::new(vec![0], vec![fmt.one()])] },
        ],
        label: Some(format!("step-cube-indicator d={d}")),
    })
}

pub(crate) fn check_dataset(fmt: &Format, data: &Dataset) -> Result<()> {
    if data.format != *fmt {
        return Err(Error::FormatMismatch(format!("dataset is {}, expected {fmt}", data.format)));
    }
    check_dim(fmt, data.dim())?;
    if let Some((i, j)) = data.find_duplicate() {
        return Err(Error::DuplicateInput(i, j));
    }
    Ok(())
}

/// ⨁_i y_i ⊗ 1{x = z_i}: a 3-layer Step network with 6dn+2n parameters.
pub fn step_memorizer(fmt: &Format, data: &Dataset) -> Result<Network> {
    check_dataset(fmt, data)?;
    let (n, d) = (data.len(), data.dim());
    let mut first = Vec::with_capacity(2 * d * n);
    for z in &data.inputs {
        for (j, zj) in z.iter().enumerate() {
            first.extend(cube_pair(fmt, d, j, zj, zj));
        }
    }
    let bias = int(fmt, -2 * d as i64);
    let second = (0..n).map(|i| block_neuron(2 * d * i, vec![fmt.one(); 2 * d], bias, 2 * d * n)).collect();
    Ok(Network {
        format: *fmt,
        input_dim: d,
        activation: Activation::Step,
        layers: vec![
            Layer { neurons: first },
            Layer { neurons: second },
            Layer { neurons: vec![Neuron::new((0..n).collect(), data.outputs.clone())] },
        ],
        label: Some(format!("step-memorizer n={n} d={d}")),
    })
}

/// ⨁_ι ⟦f*(γ_ι)⟧ ⊗ 1{(⨁ h_ι) ⊖ d ≥ 0}: a 3-layer Step network with at most (6d+2)K^d parameters.
pub fn step_approximator(plan: &GridPlan) -> Result<Network> {
    let fmt = &plan.format;
    let d = plan.d;
    check_dim(fmt, d)?;
    let one = fmt.one();
    let m = plan.reps.len();
    let mut first = Vec::with_capacity(2 * d * m);
    for rep in &plan.reps {
        for (j, &c) in rep.iota.iter().enumerate() {
            let cell = &plan.cells[c];
            first.push(Neuron::new(vec![j, d], vec![one, negate(fmt, &cell.lo)]));
            first.push(Neuron::new(vec![j, d], vec![one, negate(fmt, &cell.next)]));
        }
    }
    let signs: Vec<Float> = (0..2 * d).map(|t| if t % 2 == 0 { one } else { fmt.neg(&one) }).collect();
    let bias = int(fmt, -(d as i64));
    let second = (0..m).map(|i| block_neuron(2 * d * i, signs.clone(), bias, 2 * d * m)).collect();
    let values = plan.reps.iter().map(|r| r.value).collect();
    Ok(Network {
        format: *fmt,
        input_dim: d,
        activation: Activation::Step,
        layers: vec![
            Layer { neurons: first },
            Layer { neurons: second },
            Layer { neurons: vec![Neuron::new((0..m).collect(), values)] },
        ],
        label: Some(format!("step-approximator {} d={d} cells={}", plan.target, plan.cells.len())),
    })
}
