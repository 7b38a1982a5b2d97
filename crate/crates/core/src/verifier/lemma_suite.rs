use std::time::Instant;

use serde::Serialize;

use super::{enumerate_floats, par_tally, ExpWindow, Report};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;
use crate::lemmas::{check_exact_lemma, check_ignore, check_integer_exact, check_sterbenz, is_representable, IgnoreHypothesis, LemmaVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LemmaId {
    Sterbenz,
    Exact,
    IntegerExact,
    Ignore(IgnoreHypothesis),
    Representable,
}

impl LemmaId {
    pub fn name(&self) -> String {
        match self {
            LemmaId::Sterbenz => "sterbenz".into(),
            LemmaId::Exact => "exact".into(),
            LemmaId::IntegerExact => "integer-exact".into(),
            LemmaId::Ignore(IgnoreHypothesis::ExponentGap) => "ignore".into(),
            LemmaId::Ignore(IgnoreHypothesis::LowestTermsScale) => "ignore-mu".into(),
            LemmaId::Ignore(IgnoreHypothesis::MagnitudeBound) => "ignore-magnitude".into(),
            LemmaId::Representable => "representable".into(),
        }
    }

    /// The five suites with the exponent-gap form of the ignore lemma.
    pub fn all() -> [LemmaId; 5] {
        [
            LemmaId::Sterbenz,
            LemmaId::Exact,
            LemmaId::IntegerExact,
            LemmaId::Ignore(IgnoreHypothesis::ExponentGap),
            LemmaId::Representable,
        ]
    }
}

/// Sweeps every ordered pair of the domain (all finite values for Fpq, the
/// exponent window for Fp) through the lemma's hypothesis filter.
pub fn run_lemma_suite(fmt: &Format, lemma: LemmaId, window: Option<ExpWindow>) -> Result<Report> {
    let start = Instant::now();
    if !fmt.is_fpq() && window.is_none() {
        return Err(Error::UnboundedEnumeration);
    }
    let dom = enumerate_floats(fmt, &Float::NegInf, &Float::PosInf, window)?;
    let desc = match window {
        Some(w) => format!("all finite pairs, {w}"),
        None => "all finite pairs".to_string(),
    };
    let mut report = Report::new(&format!("lemma/{}", lemma.name()), &fmt.to_string(), &desc);
    let t = match lemma {
        LemmaId::Representable => representable_sweep(fmt, &dom, window),
        _ => {
            // cheap pre-filters on the operand lists; the predicates re-check the full hypothesis
            let (xs, ys): (Vec<Float>, Vec<Float>) = match lemma {
                LemmaId::Sterbenz => {
                    let nn: Vec<Float> = dom.iter().copied().filter(|v| !v.is_negative()).collect();
                    (nn.clone(), nn)
                }
                LemmaId::IntegerExact => {
                    let top = Dyadic::pow2(fmt.p() as i64 + 1);
                    let ints: Vec<Float> = dom
                        .iter()
                        .copied()
                        .filter(|v| fmt.value(v).is_some_and(|d| d.is_integer() && d >= Dyadic::one() && d <= top))
                        .collect();
                    (ints.clone(), ints)
                }
                LemmaId::Exact => {
                    let nz: Vec<Float> = dom.iter().copied().filter(|v| !v.is_zero()).collect();
                    (nz.clone(), nz)
                }
                _ => (dom.clone(), dom.iter().copied().filter(|v| !v.is_zero()).collect()),
            };
            par_tally(xs.len(), |i, t| {
                let x = &xs[i];
                for y in &ys {
                    let v: LemmaVerdict = match lemma {
                        LemmaId::Sterbenz => check_sterbenz(fmt, x, y),
                        LemmaId::Exact => check_exact_lemma(fmt, x, y),
                        LemmaId::IntegerExact => check_integer_exact(fmt, x, y),
                        LemmaId::Ignore(h) => check_ignore(fmt, x, y, h),
                        LemmaId::Representable => unreachable!(),
                    };
                    if !v.applicable {
                        continue;
                    }
                    if v.holds {
                        t.pass();
                    } else {
                        let w = v.witness.unwrap();
                        t.fail(vec![fmt.format_text(x), fmt.format_text(y)], format!("{}: exact {} but rounded {}", w.op, w.exact, w.rounded));
                    }
                }
            })
        }
    };
    report.absorb(t);
    report.wall_time = start.elapsed();
    Ok(report)
}

/// Representability: every float passes the test, every midpoint of neighbors fails it,
/// the test agrees with round-trip rounding on a dense dyadic grid, and the
/// sufficient condition `n·2^m, 0 < n < 2^{1+p-c}` always yields representable values.
fn representable_sweep(fmt: &Format, dom: &[Float], window: Option<ExpWindow>) -> super::Tally {
    let p = fmt.p() as i64;
    let round_trip = |d: &Dyadic| fmt.value(&fmt.round(d)).as_ref() == Some(d);
    let mut t = par_tally(dom.len(), |i, t| {
        let x = &dom[i];
        let v = fmt.value(x).unwrap();
        t.check(is_representable(fmt, &v) && fmt.round(&v).identical(x), || vec![fmt.format_text(x)], || "float fails the representability test".into());
        if let Some(s) = fmt.succ(x) {
            let mid = (&v + &fmt.value(&s).unwrap()).mul_pow2(-1);
            t.check(!is_representable(fmt, &mid), || vec![fmt.format_text(x), fmt.format_text(&s)], || format!("midpoint {mid} passes the test"));
        }
    });
    let (mlo, mhi) = match (window, fmt.e_min(), fmt.e_max()) {
        (_, Some(emin), Some(emax)) => (-p + emin - 3, -p + emax + 3),
        (Some(w), _, _) => (w.min - p, w.max - p),
        _ => (-p, p),
    };
    let ms: Vec<i64> = (mlo..=mhi).collect();
    let nmax = 1i64 << (p + 3).min(20);
    let grid = par_tally(ms.len(), |i, t| {
        let m = ms[i];
        for n in 1..nmax {
            let d = Dyadic::from_u128(false, n as u128, m);
            let rt = round_trip(&d);
            t.check(is_representable(fmt, &d) == rt, || vec![format!("{n}·2^{m}")], || format!("test says {}, rounding says {rt}", !rt));
            let c = fmt.e_min().map_or(0, |emin| (emin - m).max(0));
            let in_range = match (fmt.e_min(), fmt.e_max()) {
                (Some(emin), Some(emax)) => -p + emin <= m && m <= -p + emax,
                _ => true,
            };
            if in_range && c <= p && (n as u128) < (1u128 << (1 + p - c)) {
                t.check(rt, || vec![format!("{n}·2^{m}")], || "sufficient condition holds but value is not representable".into());
            }
        }
    });
    t = super::Tally::merge(t, grid);
    t
}
