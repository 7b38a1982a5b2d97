use std::time::Instant;

use super::{enumerate_floats, par_tally, ExpWindow, Report, Tally};
use crate::constructors::oscillation_net;
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::float::Float;
use crate::format::Format;

/// Closed form of the naive two-ReLU indicator on F_p:
/// 0 below 1, 1 on [1, 3), 1 + (−1)^{n+1} on [3, 5) with n = (x−3)·2^{p−1}, 0 from 5 on.
pub fn eq3_closed_form(p: u32, x: &Dyadic) -> Dyadic {
    let one = Dyadic::one();
    let three = Dyadic::from_i64(3);
    let five = Dyadic::from_i64(5);
    if *x < one || *x >= five {
        Dyadic::zero()
    } else if *x < three {
        one
    } else {
        let n = (x - &three).mul_pow2(p as i64 - 1);
        let odd = n.to_i128().expect("grid point") & 1 == 1;
        if odd {
            Dyadic::from_i64(2)
        } else {
            Dyadic::zero()
        }
    }
}

fn branch(x: &Dyadic) -> usize {
    if *x < Dyadic::one() {
        0
    } else if *x < Dyadic::from_i64(3) {
        1
    } else if *x < Dyadic::from_i64(5) {
        2
    } else {
        3
    }
}

/// ⟦2^{p+1} + n⟧ for 0 ≤ n < 2^{p+1} against the mod-4 table: n for n ≡ 0, 2; n − 1 for n ≡ 1; n + 1 for n ≡ 3.
pub fn rounding_parity_table(p: u32) -> Result<Report> {
    let fmt = Format::fp(p)?;
    let base = 1i64 << (p + 1);
    let mut report = Report::new("oscillation/parity", &fmt.to_string(), &format!("2^{} + n, 0 <= n < 2^{}", p + 1, p + 1));
    let t = par_tally(base as usize, |i, t| {
        let n = i as i64;
        let want = match n % 4 {
            1 => n - 1,
            3 => n + 1,
            _ => n,
        };
        let got = fmt.round(&Dyadic::from_i64(base + n));
        let ok = fmt.value(&got) == Some(Dyadic::from_i64(base + want));
        t.check(ok, || vec![format!("n={n}")], || format!("rounded to {}, table says 2^{} + {want}", fmt.format_text(&got), p + 1));
    });
    report.absorb(t);
    Ok(report)
}

/// Evaluates the two-ReLU net on every float of F_p with exponent in [−4, 4] (both signs,
/// plus zero and a few large magnitudes) against the closed form, then checks the parity table.
pub fn reproduce_oscillation(p: u32) -> Result<Report> {
    let start = Instant::now();
    let fmt = Format::fp(p)?;
    let net = oscillation_net(&fmt);
    let window = ExpWindow::new(-4, 4);
    let mut xs = enumerate_floats(&fmt, &Float::NegInf, &Float::PosInf, Some(window))?;
    for k in [8, 16, 40, 100] {
        xs.push(fmt.exact(&Dyadic::pow2(k))?);
        xs.push(fmt.exact(&(Dyadic::pow2(k) + Dyadic::pow2(k - p as i64)))?);
    }
    let mut report = Report::new("oscillation", &fmt.to_string(), &format!("{window}, both signs, plus 2^8, 2^16, 2^40, 2^100"));
    let t = par_tally(xs.len(), |i, t| {
        let x = &xs[i];
        let v = fmt.value(x).unwrap();
        let want = eq3_closed_form(p, &v);
        match net.eval_value(std::slice::from_ref(x)) {
            Ok(y) => t.check(
                fmt.value(&y) == Some(want.clone()),
                || vec![fmt.format_text(x)],
                || format!("net gives {}, closed form {want}", fmt.format_text(&y)),
            ),
            Err(e) => t.fail(vec![fmt.format_text(x)], e.to_string()),
        }
    });
    report.absorb(t);

    // every branch and both parities must actually be exercised
    let mut hits = [0u64; 4];
    let mut twos = 0u64;
    for x in &xs {
        let v = fmt.value(x).unwrap();
        hits[branch(&v)] += 1;
        if eq3_closed_form(p, &v) == Dyadic::from_i64(2) {
            twos += 1;
        }
    }
    let mut cover = Tally::default();
    for (b, h) in hits.iter().enumerate() {
        cover.check(*h > 0, || vec![format!("branch {b}")], || "branch not covered by the window".into());
    }
    cover.check(twos > 0 && hits[2] > twos, || vec!["parity".into()], || "odd and even n not both covered".into());
    report.absorb(cover);
    report.note(format!("branch counts {hits:?}, value 2 at {twos} points"));

    let parity = rounding_parity_table(p)?;
    report.checked += parity.checked;
    report.passed += parity.passed;
    report.counterexamples.extend(parity.counterexamples);
    report.counterexamples.truncate(super::MAX_COUNTEREXAMPLES);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// (1/δ) ⊗ ((1 ⊕ δ) ⊖ 1) with δ = 2^{−(p+2)}: rounds to 0 while the exact value is 1.
pub fn catastrophic_identity(fmt: &Format) -> Result<Report> {
    let p = fmt.p() as i64;
    let delta = fmt.exact(&Dyadic::pow2(-(p + 2)))?;
    let inv = fmt.exact(&Dyadic::pow2(p + 2))?;
    let one = fmt.one();
    let sum = fmt.add(&one, &delta);
    let diff = fmt.sub(&sum, &one);
    let got = fmt.mul(&inv, &diff);
    let exact = Dyadic::one();
    let gv = fmt.value(&got);
    let mut report = Report::new("catastrophic", &fmt.to_string(), "delta = 2^-(p+2)");
    let mut t = Tally::default();
    t.check(got.is_zero(), || vec![fmt.format_text(&delta)], || format!("computed {}, expected 0", fmt.format_text(&got)));
    let rel = gv.map(|g| (&g - &exact).abs());
    t.check(rel == Some(Dyadic::one()), || vec![fmt.format_text(&delta)], || "relative error is not 1".into());
    report.absorb(t);
    report.note(format!("computed {}, exact 1, relative error 1", fmt.format_text(&got)));
    Ok(report)
}
