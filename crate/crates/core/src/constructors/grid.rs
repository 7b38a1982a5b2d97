//! Partition of [0,1]∩F into cells of width δ, with one representative per
//! multi-index and its correctly rounded target value.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::target::{certified_round, Target};

/// How the cell width is chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum Resolution {
    /// Explicit δ > 0.
    Delta(BigRational),
    /// δ = ε/L for an L-Lipschitz target (sup-norm); ε = 0 is allowed only on Fpq.
    Lipschitz { eps: BigRational, lip: BigRational },
}

/// How γ_ι is picked inside a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepPolicy {
    /// argmin over the (finite) cell of |f*(x) − ⟦f*(x)⟧|.
    Argmin,
    /// The cell's lower corner.
    LowerCorner,
}

/// One nonempty cell on an axis: the floats in [lo, hi]; `next` is the first float above.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    /// 1-based index i of [α_{i-1}, α_i) before empty cells were dropped.
    pub index: u64,
    pub lo: Float,
    pub hi: Float,
    pub next: Float,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellRep {
    /// Positions into `GridPlan::cells`, one per axis.
    pub iota: Vec<usize>,
    pub gamma: Vec<Float>,
    /// ⟦f*(γ)⟧
    pub value: Float,
    /// |f*(γ) − ⟦f*(γ)⟧| as an exact upper bound.
    pub gamma_err: BigRational,
}

#[derive(Clone, Debug)]
pub struct GridPlan {
    pub format: Format,
    pub d: usize,
    pub delta: BigRational,
    /// K = ⌈1/δ⌉ (before dropping empty cells).
    pub k: BigUint,
    pub cells: Vec<Cell>,
    /// Multi-indices in lexicographic order, first axis slowest.
    pub reps: Vec<CellRep>,
    pub policy: RepPolicy,
    pub target: String,
}

/// Refuse plans whose representative table would exceed this many entries.
pub const MAX_REPS: usize = 1 << 20;
/// Refuse argmin searches over more than this many points in total.
pub const MAX_ARGMIN_POINTS: u128 = 1 << 26;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// δ from the resolution spec, before clamping to η.
fn resolve_delta(fmt: &Format, res: &Resolution) -> Result<Option<BigRational>> {
    let delta = match res {
        Resolution::Delta(d) => {
            if !d.is_positive() {
                return Err(Error::Domain("δ must be positive".into()));
            }
            Some(d.clone())
        }
        Resolution::Lipschitz { eps, lip } => {
            if eps.is_negative() || lip.is_negative() {
                return Err(Error::Domain("ε and L must be non-negative".into()));
            }
            if eps.is_zero() {
                if !fmt.is_fpq() {
                    return Err(Error::RequiresFiniteDomain);
                }
                Some(BigRational::zero())
            } else if lip.is_zero() {
                None
            } else {
                Some(eps / lip)
            }
        }
    };
    Ok(delta)
}

pub fn build_grid_plan(fmt: &Format, d: usize, res: &Resolution, target: &dyn Target) -> Result<GridPlan> {
    if target.dim() != d {
        return Err(Error::ShapeMismatch(format!("target {} has dimension {}, plan has {d}", target.describe(), target.dim())));
    }
    super::step::check_dim(fmt, d)?;
    let raw = resolve_delta(fmt, res)?;
    // δ = max(η, ·) on Fpq; an infinite δ (constant target) means one cell
    let mut delta = match raw {
        None => rat(1),
        Some(v) => match fmt.eta() {
            Some(eta) => v.max(eta.to_rational()),
            None => v,
        },
    };
    if delta > rat(1) {
        delta = rat(1);
    }
    let k = ceil_int(&(rat(1) / &delta));
    let cells = walk_cells(fmt, &delta, &k)?;
    let count = cells.len().checked_pow(d as u32).filter(|&c| c <= MAX_REPS);
    let Some(count) = count else {
        return Err(Error::PlanTooLarge(format!("{} cells per axis in dimension {d}", cells.len())));
    };
    let policy = if fmt.is_fpq() { RepPolicy::Argmin } else { RepPolicy::LowerCorner };
    let sizes: Vec<u128> = if policy == RepPolicy::Argmin {
        cells.iter().map(|c| count_floats(fmt, &c.lo, &c.hi)).collect()
    } else {
        vec![]
    };
    if policy == RepPolicy::Argmin {
        let per_axis: u128 = sizes.iter().sum();
        if per_axis.checked_pow(d as u32).is_none_or(|t| t > MAX_ARGMIN_POINTS) {
            return Err(Error::PlanTooLarge(format!("{per_axis} points per axis in dimension {d}")));
        }
    }
    let members: Vec<Vec<Float>> = if policy == RepPolicy::Argmin {
        cells.iter().map(|c| floats_between(fmt, &c.lo, &c.hi)).collect()
    } else {
        vec![]
    };
    let reps = (0..count)
        .into_par_iter()
        .map(|flat| {
            let iota = unflatten(flat, cells.len(), d);
            match policy {
                RepPolicy::LowerCorner => {
                    let gamma: Vec<Float> = iota.iter().map(|&c| cells[c].lo).collect();
                    let (value, err) = rounded(fmt, target, &gamma)?;
                    Ok(CellRep { iota, gamma, value, gamma_err: err })
                }
                RepPolicy::Argmin => {
                    let axes: Vec<&[Float]> = iota.iter().map(|&c| members[c].as_slice()).collect();
                    let mut best: Option<CellRep> = None;
                    for point in product(&axes) {
                        let (value, err) = rounded(fmt, target, &point)?;
                        if best.as_ref().is_none_or(|b| err < b.gamma_err) {
                            best = Some(CellRep { iota: iota.clone(), gamma: point, value, gamma_err: err });
                        }
                    }
                    Ok(best.expect("cells are nonempty"))
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GridPlan { format: *fmt, d, delta, k, cells, reps, policy, target: target.describe() })
}

/// ⟦f*(x)⟧ and the worst-case |f*(x) − ⟦f*(x)⟧| over the oracle's enclosure.
fn rounded(fmt: &Format, target: &dyn Target, x: &[Float]) -> Result<(Float, BigRational)> {
    let (r, lo, hi) = certified_round(fmt, target, x)?;
    let rv = fmt
        .value(&r)
        .ok_or_else(|| Error::OracleFailure(format!("{} overflows at {x:?}", target.describe())))?
        .to_rational();
    let err = (&lo - &rv).abs().max((&hi - &rv).abs());
    Ok((r, err))
}

fn ceil_int(r: &BigRational) -> BigUint {
    let (q, rem) = r.numer().div_rem(r.denom());
    let q = if rem.is_zero() { q } else { q + 1 };
    q.to_biguint().expect("positive")
}

/// Nonempty cells in increasing order, found by jumping from each cell's upper threshold.
fn walk_cells(fmt: &Format, delta: &BigRational, k: &BigUint) -> Result<Vec<Cell>> {
    let one = fmt.one();
    let top = fmt.succ(&one).expect("1 has a successor");
    let k_rat = BigRational::from_integer(k.clone().into());
    let mut cells = Vec::new();
    let mut x = fmt.zero(false);
    loop {
        let xv = fmt.value(&x).unwrap().to_rational();
        // c = min(K, ⌊x/δ⌋ + 1)
        let c = ((&xv / delta).floor() + rat(1)).min(k_rat.clone());
        let next = if c == k_rat { top } else { fmt.ceil_rational(&(&c * delta)) };
        let hi = fmt.pred(&next).expect("threshold above zero");
        let index = c.to_integer().to_u64().ok_or_else(|| Error::PlanTooLarge("cell index overflow".into()))?;
        cells.push(Cell { index, lo: x, hi, next });
        if next > one {
            break;
        }
        x = next;
        if cells.len() > MAX_REPS {
            return Err(Error::PlanTooLarge("too many nonempty cells".into()));
        }
    }
    Ok(cells)
}

fn count_floats(fmt: &Format, lo: &Float, hi: &Float) -> u128 {
    floats_between(fmt, lo, hi).len() as u128
}

fn floats_between(fmt: &Format, lo: &Float, hi: &Float) -> Vec<Float> {
    let mut out = vec![*lo];
    let mut x = *lo;
    while x < *hi {
        x = fmt.succ(&x).expect("bounded walk");
        out.push(x);
    }
    out
}

fn unflatten(mut flat: usize, base: usize, d: usize) -> Vec<usize> {
    let mut out = vec![0; d];
    for slot in out.iter_mut().rev() {
        *slot = flat % base;
        flat /= base;
    }
    out
}

/// Cartesian product in lexicographic order.
pub(crate) fn product(axes: &[&[Float]]) -> Vec<Vec<Float>> {
    let mut out: Vec<Vec<Float>> = vec![vec![]];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

impl GridPlan {
    /// Position of the cell containing `x` on one axis, if x ∈ [0,1].
    pub fn axis_cell(&self, x: &Float) -> Option<usize> {
        if x.is_nan() || *x < self.cells[0].lo || *x > self.cells.last().unwrap().hi {
            return None;
        }
        let pos = self.cells.partition_point(|c| c.lo <= *x);
        Some(pos - 1)
    }

    /// Representative entry for the cell containing `x`.
    pub fn locate(&self, x: &[Float]) -> Option<&CellRep> {
        let mut flat = 0usize;
        for v in x {
            flat = flat * self.cells.len() + self.axis_cell(v)?;
        }
        self.reps.get(flat)
    }

    /// (6d+2)·K^d
    pub fn step_param_bound(&self) -> BigUint {
        BigUint::from(6 * self.d + 2) * self.k.pow(self.d as u32)
    }

    /// (20d+2)·K^d
    pub fn relu_param_bound(&self) -> BigUint {
        BigUint::from(20 * self.d + 2) * self.k.pow(self.d as u32)
    }

    pub fn is_trivial(&self) -> bool {
        self.k == BigUint::one()
    }
}
