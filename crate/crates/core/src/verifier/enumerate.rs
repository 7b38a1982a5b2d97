use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

/// Inclusive bounds on the normalized exponent 𝔢 of nonzero values.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExpWindow {
    pub min: i64,
    pub max: i64,
}

impl ExpWindow {
    pub fn new(min: i64, max: i64) -> Self {
        ExpWindow { min, max }
    }
}

impl std::fmt::Display for ExpWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "exponents [{}, {}]", self.min, self.max)
    }
}

/// All positive floats with normalized exponent `ee`, ascending.
pub fn binade(fmt: &Format, ee: i64) -> Vec<Float> {
    let p = fmt.p();
    match (fmt.e_min(), fmt.e_max()) {
        (Some(emin), Some(emax)) => {
            if ee > emax || ee < emin - p as i64 {
                return vec![];
            }
            if ee >= emin {
                return ((1u128 << p)..(1u128 << (p + 1))).map(|m| Float::Finite { neg: false, m, e: ee }).collect();
            }
            let j = (ee - emin + p as i64) as u32;
            ((1u128 << j)..(1u128 << (j + 1))).map(|m| Float::Finite { neg: false, m, e: emin }).collect()
        }
        _ => ((1u128 << p)..(1u128 << (p + 1))).map(|m| Float::Finite { neg: false, m, e: ee }).collect(),
    }
}

/// The floats in [lo, hi] (±0 once, as +0), strictly increasing. Fp needs a window.
pub fn enumerate_floats(fmt: &Format, lo: &Float, hi: &Float, window: Option<ExpWindow>) -> Result<Vec<Float>> {
    if !matches!(lo.partial_cmp(hi), Some(std::cmp::Ordering::Less | std::cmp::Ordering::Equal)) {
        return Err(Error::Domain("enumeration needs lo <= hi".into()));
    }
    let (wmin, wmax) = match (window, fmt.e_min(), fmt.e_max()) {
        (Some(w), Some(emin), Some(emax)) => (w.min.max(emin - fmt.p() as i64), w.max.min(emax)),
        (Some(w), _, _) => (w.min, w.max),
        (None, Some(emin), Some(emax)) => (emin - fmt.p() as i64, emax),
        (None, _, _) => return Err(Error::UnboundedEnumeration),
    };
    let exp_of = |x: &Float| fmt.normalized(x).map(|n| n.e);
    let mut pos = Vec::new();
    if hi.is_positive() {
        // restrict exponents to those that can meet [lo, hi]
        let top = exp_of(hi).map_or(wmax, |e| e.min(wmax));
        let bottom = if lo.is_positive() { exp_of(lo).map_or(wmin, |e| e.max(wmin)) } else { wmin };
        for ee in bottom..=top {
            pos.extend(binade(fmt, ee).into_iter().filter(|x| x >= lo && x <= hi));
        }
    }
    let mut neg = Vec::new();
    if lo.is_negative() {
        let nlo = fmt.neg(hi);
        let nhi = fmt.neg(lo);
        let top = exp_of(&nhi).map_or(wmax, |e| e.min(wmax));
        let bottom = if nlo.is_positive() { exp_of(&nlo).map_or(wmin, |e| e.max(wmin)) } else { wmin };
        for ee in bottom..=top {
            neg.extend(binade(fmt, ee).into_iter().filter(|x| *x >= nlo && *x <= nhi).map(|x| fmt.neg(&x)));
        }
        neg.reverse();
    }
    let zero = fmt.zero(false);
    let with_zero = *lo <= zero && zero <= *hi;
    let mut out = neg;
    if with_zero {
        out.push(zero);
    }
    out.extend(pos);
    Ok(out)
}
