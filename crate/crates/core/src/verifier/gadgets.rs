use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use super::{par_tally, Report};
use crate::constructors::gadget::{gadget_terms, term_network, Direction, GadgetTerm};
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::float::Float;
use crate::format::Format;
use crate::lemmas::is_representable;
use crate::network::Activation;

/// Rounded intermediates of one term: the two affine stages, their activations and the output.
struct TermRun {
    vals: [Float; 7],
    inexact: u32,
}

fn run_term(fmt: &Format, t: &GadgetTerm, x: &Float) -> TermRun {
    let relu = Activation::Relu;
    let mut inexact = 0;
    let mut step = |(v, f): (Float, crate::format::OpFlags)| {
        inexact += f.inexact as u32;
        v
    };
    let a1 = step(fmt.mul_flags(&t.in_weight, x));
    let s1 = step(fmt.add_flags(&a1, &t.in_bias));
    let h = relu.apply(fmt, &s1);
    let a2 = step(fmt.mul_flags(&t.mid_weight, &h));
    let s2 = step(fmt.add_flags(&a2, &t.mid_bias));
    let m = relu.apply(fmt, &s2);
    let o = step(fmt.mul_flags(&t.out_weight, &m));
    TermRun { vals: [a1, s1, h, a2, s2, m, o], inexact }
}

fn in_range(fmt: &Format, v: &Float, top: &Dyadic) -> bool {
    match fmt.value(v) {
        Some(d) => d.is_integer() && !d.is_negative() && d <= *top,
        None => false,
    }
}

/// For every z and both directions: ψ₁(x) ⊕ ψ₂(x) equals the indicator on every x,
/// ψ₁ ∈ {0}∪[2^p], ψ₂ ∈ −({0}∪[2^p]), and every intermediate is a finite value
/// passing the representability test. Thresholds the constructor rejects count as failures.
pub fn verify_gadgets(fmt: &Format, zs: &[Float], xs: &[Float]) -> Result<Report> {
    let start = Instant::now();
    let top = Dyadic::pow2(fmt.p() as i64);
    let mut report = Report::new("gadgets", &fmt.to_string(), &format!("{} thresholds x {} inputs, ge and le", zs.len(), xs.len()));
    let jobs: Vec<(usize, Direction)> = (0..zs.len()).flat_map(|i| [(i, Direction::Ge), (i, Direction::Le)]).collect();
    let inexact = AtomicU64::new(0);
    // indicator, range, representability
    let kinds = [AtomicU64::new(0), AtomicU64::new(0), AtomicU64::new(0)];
    let t = par_tally(jobs.len(), |i, t| {
        let (zi, dir) = jobs[i];
        let z = &zs[zi];
        let zt = fmt.format_text(z);
        let dname = if dir == Direction::Ge { "ge" } else { "le" };
        let terms = match gadget_terms(fmt, z, dir) {
            Ok(ts) => ts,
            Err(e) => {
                t.fail(vec![zt, dname.into()], e.to_string());
                return;
            }
        };
        let nets = [term_network(fmt, &terms[0], "psi1"), term_network(fmt, &terms[1], "psi2")];
        let mut local = 0u64;
        let mut kind_fails = [0u64; 3];
        for (xi, x) in xs.iter().enumerate() {
            let r1 = run_term(fmt, &terms[0], x);
            let r2 = run_term(fmt, &terms[1], x);
            local += (r1.inexact + r2.inexact) as u64;
            let sum = fmt.add(&r1.vals[6], &r2.vals[6]);
            let want = match dir {
                Direction::Ge => *x >= *z,
                Direction::Le => *x <= *z,
            };
            let want_f = if want { fmt.one() } else { fmt.zero(false) };
            let input = || vec![zt.clone(), dname.to_string(), fmt.format_text(x)];
            if !sum.identical(&want_f) {
                t.fail(input(), format!("psi1 + psi2 = {}, indicator {}", fmt.format_text(&sum), want as u8));
                kind_fails[0] += 1;
                continue;
            }
            let neg2 = fmt.neg(&r2.vals[6]);
            if !in_range(fmt, &r1.vals[6], &top) || !in_range(fmt, &neg2, &top) {
                t.fail(input(), format!("outputs {} and {} outside the range", fmt.format_text(&r1.vals[6]), fmt.format_text(&r2.vals[6])));
                kind_fails[1] += 1;
                continue;
            }
            let bad = r1.vals.iter().chain(r2.vals.iter()).find(|v| !fmt.value(v).is_some_and(|d| is_representable(fmt, &d)));
            if let Some(v) = bad {
                t.fail(input(), format!("intermediate {} fails the representability test", fmt.format_text(v)));
                kind_fails[2] += 1;
                continue;
            }
            // the hand-rolled evaluation must agree with the networks
            if xi % 61 == 0 {
                let n1 = nets[0].eval_value(std::slice::from_ref(x));
                let n2 = nets[1].eval_value(std::slice::from_ref(x));
                let same = matches!((&n1, &n2), (Ok(a), Ok(b)) if a.identical(&r1.vals[6]) && b.identical(&r2.vals[6]));
                if !same {
                    t.fail(input(), "network evaluation disagrees with the term evaluation");
                    continue;
                }
            }
            t.pass();
        }
        inexact.fetch_add(local, Ordering::Relaxed);
        for (k, b) in kinds.iter().zip(kind_fails) {
            k.fetch_add(b, Ordering::Relaxed);
        }
    });
    report.absorb(t);
    let [a, b, c] = kinds.map(AtomicU64::into_inner);
    report.note(format!("failures: indicator {a}, output range {b}, representability {c}"));
    report.note(format!("{} rounded operations among all intermediates", inexact.into_inner()));
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Floats around the case splits of the gadget at z (z, 2^𝔢, (2−u)2^{𝔢−1}, (2−2u)2^𝔢, (2−u)2^𝔢, 0),
/// each with `radius` successors and predecessors, both signs, deduplicated and sorted.
pub fn boundary_points(fmt: &Format, z: &Float, radius: usize) -> Vec<Float> {
    let Some(nz) = fmt.normalized(z) else { return vec![] };
    let u = fmt.u();
    let two = Dyadic::from_i64(2);
    let e = nz.e;
    let mut seeds = vec![*z, fmt.zero(false)];
    for d in [
        Dyadic::pow2(e),
        (&two - &u).mul_pow2(e - 1),
        (&two - &u.mul_pow2(1)).mul_pow2(e),
        (&two - &u).mul_pow2(e),
    ] {
        if let Ok(f) = fmt.exact(&d) {
            seeds.push(f);
        }
    }
    let mut out: Vec<Float> = Vec::new();
    for s in seeds {
        for base in [s, fmt.neg(&s)] {
            out.push(base);
            let mut up = base;
            let mut down = base;
            for _ in 0..radius {
                if let Some(n) = fmt.succ(&up).filter(|v| v.is_finite()) {
                    up = n;
                    out.push(n);
                }
                if let Some(n) = fmt.pred(&down).filter(|v| v.is_finite()) {
                    down = n;
                    out.push(n);
                }
            }
        }
    }
    let mut out: Vec<Float> = out.into_iter().map(|v| if v.is_zero() { fmt.zero(false) } else { v }).collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| a == b);
    out
}
