use std::time::Instant;

use num_rational::BigRational;
use num_traits::Signed;

use super::{enumerate_floats, par_tally, ExpWindow, Report};
use crate::constructors::grid::{product, GridPlan, RepPolicy};
use crate::dataset::Dataset;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::network::Network;
use crate::target::{certified_round, Target};

fn show(fmt: &Format, x: &[Float]) -> Vec<String> {
    x.iter().map(|v| fmt.format_text(v)).collect()
}

/// f(z_i) = y_i for every pair (±0 compared equal) with no NaN anywhere in the evaluation.
pub fn verify_memorization(net: &Network, data: &Dataset) -> Result<Report> {
    let start = Instant::now();
    let fmt = &net.format;
    if data.format != *fmt {
        return Err(Error::FormatMismatch(format!("dataset is {}, network is {fmt}", data.format)));
    }
    net.validate()?;
    let mut report = Report::new("memorize", &fmt.to_string(), &format!("{} pairs, d={}", data.len(), data.dim()));
    let t = par_tally(data.len(), |i, t| {
        let x = &data.inputs[i];
        match net.eval_flags(x) {
            Ok((y, tr)) => t.check(
                y == data.outputs[i] && !y.is_nan() && !tr.nan_seen,
                || show(fmt, x),
                || format!("got {}, want {}, nan_seen={}", fmt.format_text(&y), fmt.format_text(&data.outputs[i]), tr.nan_seen),
            ),
            Err(e) => t.fail(show(fmt, x), e.to_string()),
        }
    });
    report.absorb(t);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// max over t ∈ [lo, hi] of |f − t| − |t − r|; piecewise linear, so the endpoints and kinks suffice.
fn worst_excess(f: &BigRational, r: &BigRational, lo: &BigRational, hi: &BigRational) -> BigRational {
    let g = |t: &BigRational| (f - t).abs() - (t - r).abs();
    let mut best = g(lo).max(g(hi));
    for k in [f, r] {
        if lo <= k && k <= hi {
            best = best.max(g(k));
        }
    }
    best
}

/// Checks |f(x) − f*(x)| ≤ |f*(x) − ⟦f*(x)⟧| + ε at every x, comparing exact rationals over the
/// whole oracle enclosure. For lower-corner plans the rounding error at the representative
/// replaces the one at x. Also checks f(x) equals the cell value and that no NaN appears.
pub fn verify_bound(net: &Network, plan: &GridPlan, target: &dyn Target, eps: &BigRational, xs: &[Vec<Float>]) -> Result<Report> {
    let start = Instant::now();
    let fmt = &net.format;
    if plan.format != *fmt {
        return Err(Error::FormatMismatch(format!("plan is {}, network is {fmt}", plan.format)));
    }
    net.validate()?;
    let bound = match plan.policy {
        RepPolicy::Argmin => "pointwise",
        RepPolicy::LowerCorner => "lower-corner",
    };
    let mut report = Report::new(&format!("approx/{bound}"), &fmt.to_string(), &format!("{} points, d={}, f*={}, eps={eps}", xs.len(), plan.d, plan.target));
    let t = par_tally(xs.len(), |i, t| {
        let x = &xs[i];
        let (y, tr) = match net.eval_flags(x) {
            Ok(v) => v,
            Err(e) => return t.fail(show(fmt, x), e.to_string()),
        };
        let Some(rep) = plan.locate(x) else {
            return t.fail(show(fmt, x), "point outside the plan's domain");
        };
        if !y.identical(&rep.value) && !(y.is_zero() && rep.value.is_zero()) || tr.nan_seen {
            return t.fail(show(fmt, x), format!("net gives {}, cell value {}", fmt.format_text(&y), fmt.format_text(&rep.value)));
        }
        let (r, lo, hi) = match certified_round(fmt, target, x) {
            Ok(v) => v,
            Err(e) => return t.fail(show(fmt, x), e.to_string()),
        };
        let fv = fmt.value(&y).unwrap().to_rational();
        let excess = match plan.policy {
            RepPolicy::Argmin => worst_excess(&fv, &fmt.value(&r).unwrap().to_rational(), &lo, &hi),
            RepPolicy::LowerCorner => {
                let dev = (&fv - &lo).abs().max((&fv - &hi).abs());
                dev - &rep.gamma_err
            }
        };
        t.check(&excess <= eps, || show(fmt, x), || format!("error exceeds the bound by {}", &excess - eps));
    });
    report.absorb(t);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// No ⊕/⊗ overflows and no NaN at any of the points.
pub fn overflow_scan(net: &Network, xs: &[Vec<Float>]) -> Result<Report> {
    let start = Instant::now();
    let fmt = &net.format;
    net.validate()?;
    let mut report = Report::new("overflow", &fmt.to_string(), &format!("{} points, d={}", xs.len(), net.input_dim));
    let t = par_tally(xs.len(), |i, t| match net.eval_flags(&xs[i]) {
        Ok((_, tr)) => t.check(!tr.overflow_seen && !tr.nan_seen, || show(fmt, &xs[i]), || format!("overflow_seen={} nan_seen={}", tr.overflow_seen, tr.nan_seen)),
        Err(e) => t.fail(show(fmt, &xs[i]), e.to_string()),
    });
    report.absorb(t);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// [0,1]^d ∩ F^d in lexicographic order. Fp needs an exponent window.
pub fn unit_box(fmt: &Format, d: usize, window: Option<ExpWindow>) -> Result<Vec<Vec<Float>>> {
    let axis = enumerate_floats(fmt, &fmt.zero(false), &fmt.one(), window)?;
    check_size(axis.len(), d)?;
    Ok(product(&vec![axis.as_slice(); d]))
}

fn check_size(n: usize, d: usize) -> Result<()> {
    match n.checked_pow(d as u32) {
        Some(c) if c <= 1 << 26 => Ok(()),
        _ => Err(Error::PlanTooLarge(format!("{n}^{d} points"))),
    }
}

/// Points of [−b, b]^d ∩ F^d: the full grid when it has at most `max_points` points,
/// otherwise an evenly spaced subsequence of each axis (keeping both ends and zero).
pub fn grid_points(fmt: &Format, d: usize, b: &Dyadic, max_points: usize, window: Option<ExpWindow>) -> Result<Vec<Vec<Float>>> {
    let hi = fmt.round(b);
    let axis = enumerate_floats(fmt, &fmt.neg(&hi), &hi, window)?;
    let full = axis.len().checked_pow(d as u32).is_some_and(|c| c <= max_points);
    let axis = if full {
        axis
    } else {
        let m = ((max_points as f64).powf(1.0 / d as f64).floor() as usize).max(3);
        let mut pick: Vec<Float> = (0..m).map(|i| axis[i * (axis.len() - 1) / (m - 1)]).collect();
        let zero = fmt.zero(false);
        if !pick.contains(&zero) && axis.contains(&zero) {
            pick.push(zero);
            pick.sort_by(|a, b| a.partial_cmp(b).unwrap());
            // keep the count within budget
            if pick.len().pow(d as u32) > max_points {
                let z = pick.iter().position(|v| v.is_zero()).unwrap();
                pick.remove(if z + 1 < pick.len() - 1 { z + 1 } else { z - 1 });
            }
        }
        pick
    };
    check_size(axis.len(), d)?;
    Ok(product(&vec![axis.as_slice(); d]))
}
