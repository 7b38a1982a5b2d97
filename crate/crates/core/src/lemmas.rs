//! μ(x), the representability test, and decidable per-pair checks of the
//! exactness lemmas (Sterbenz, exact, integer-exact, ignore).

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

/// Outcome of one lemma instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaVerdict {
    /// The pair satisfies the lemma's hypothesis (otherwise the verdict is vacuous).
    pub applicable: bool,
    pub holds: bool,
    /// Present exactly when `holds` is false.
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub op: String,
    pub inputs: Vec<String>,
    pub exact: String,
    pub rounded: String,
}

impl LemmaVerdict {
    fn vacuous() -> Self {
        LemmaVerdict { applicable: false, holds: true, witness: None }
    }

    fn ok() -> Self {
        LemmaVerdict { applicable: true, holds: true, witness: None }
    }
}

/// Which hypothesis to use for the ignore lemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum IgnoreHypothesis {
    /// 𝔢_x ≤ 𝔢_y − p − 2.
    ExponentGap,
    /// μ(x) ≤ 𝔢_y − p − 2, the form stated for F_p.
    LowestTermsScale,
    /// |x| ≤ 2^{𝔢_y − p − 2}.
    MagnitudeBound,
}

/// μ(x) = inf{ m : x·2^{-m} ∈ ℤ }.
pub fn mu(fmt: &Format, x: &Float) -> Result<i64> {
    match fmt.value(x) {
        Some(v) if !v.is_zero() => Ok(v.mu().unwrap()),
        _ => Err(Error::Domain("μ is defined for nonzero finite values only".into())),
    }
}

/// The representability test on an exact dyadic.
pub fn is_representable(fmt: &Format, x: &Dyadic) -> bool {
    if x.is_zero() {
        return true;
    }
    let e = x.floor_log2().unwrap();
    let gap = e - x.mu().unwrap();
    let p = fmt.p() as i64;
    match (fmt.e_min(), fmt.e_max()) {
        (Some(emin), Some(emax)) => {
            let c = (emin - e).max(0);
            -p + emin <= e && e <= emax && 0 <= gap && gap <= p - c
        }
        _ => gap <= p,
    }
}

fn witness(fmt: &Format, op: &str, inputs: &[&Float], exact: &Dyadic, rounded: &Float) -> Witness {
    Witness {
        op: op.into(),
        inputs: inputs.iter().map(|x| fmt.format_text(x)).collect(),
        exact: exact.to_string(),
        rounded: fmt.format_text(rounded),
    }
}

/// Checks that each listed operation is exact; first failure becomes the witness.
fn all_exact(fmt: &Format, cases: &[(&str, &Float, &Float, bool)]) -> LemmaVerdict {
    for &(op, a, b, is_add) in cases {
        let (va, vb) = (fmt.value(a).unwrap(), fmt.value(b).unwrap());
        let (exact, r) = if is_add { (&va + &vb, fmt.add(a, b)) } else { (&va - &vb, fmt.sub(a, b)) };
        if fmt.value(&r).as_ref() != Some(&exact) {
            return LemmaVerdict { applicable: true, holds: false, witness: Some(witness(fmt, op, &[a, b], &exact, &r)) };
        }
    }
    LemmaVerdict::ok()
}

/// Sterbenz: 0 ≤ y/2 ≤ x ≤ y implies x ⊖ y and y ⊖ x are exact.
pub fn check_sterbenz(fmt: &Format, x: &Float, y: &Float) -> LemmaVerdict {
    let (Some(vx), Some(vy)) = (fmt.value(x), fmt.value(y)) else { return LemmaVerdict::vacuous() };
    let half_y = vy.mul_pow2(-1);
    if !(half_y >= Dyadic::zero() && half_y <= vx && vx <= vy) {
        return LemmaVerdict::vacuous();
    }
    all_exact(fmt, &[("x - y", x, y, false), ("y - x", y, x, false)])
}

/// Same sign, 𝔢_x ≤ 𝔢_y and μ(x) ≥ 𝔢_y − p give exact x ⊖ y and y ⊖ x;
/// adding |x + y| ≤ 2^{1+𝔢_y} also makes x ⊕ y exact.
pub fn check_exact_lemma(fmt: &Format, x: &Float, y: &Float) -> LemmaVerdict {
    let (Some(nx), Some(ny)) = (fmt.normalized(x), fmt.normalized(y)) else { return LemmaVerdict::vacuous() };
    let p = fmt.p() as i64;
    if nx.neg != ny.neg || nx.e > ny.e || mu(fmt, x).unwrap() < ny.e - p {
        return LemmaVerdict::vacuous();
    }
    let sub = all_exact(fmt, &[("x - y", x, y, false), ("y - x", y, x, false)]);
    if !sub.holds {
        return sub;
    }
    let sum = &fmt.value(x).unwrap() + &fmt.value(y).unwrap();
    if sum.abs() <= Dyadic::pow2(1 + ny.e) {
        return all_exact(fmt, &[("x + y", x, y, true)]);
    }
    sub
}

/// x, y ∈ {1..2^{p+1}} give exact x ⊖ y, y ⊖ x; x, y ∈ {1..2^p} give exact x ⊕ y.
pub fn check_integer_exact(fmt: &Format, x: &Float, y: &Float) -> LemmaVerdict {
    let (Some(vx), Some(vy)) = (fmt.value(x), fmt.value(y)) else { return LemmaVerdict::vacuous() };
    let p = fmt.p() as i64;
    let in_range = |v: &Dyadic, top: i64| v.is_integer() && *v >= Dyadic::one() && *v <= Dyadic::pow2(top);
    if !(in_range(&vx, p + 1) && in_range(&vy, p + 1)) {
        return LemmaVerdict::vacuous();
    }
    let sub = all_exact(fmt, &[("x - y", x, y, false), ("y - x", y, x, false)]);
    if !sub.holds || !(in_range(&vx, p) && in_range(&vy, p)) {
        return sub;
    }
    all_exact(fmt, &[("x + y", x, y, true)])
}

/// Under the chosen hypothesis (or x = 0), y ⊕ x = y ⊖ x = y.
pub fn check_ignore(fmt: &Format, x: &Float, y: &Float, hyp: IgnoreHypothesis) -> LemmaVerdict {
    let Some(ny) = fmt.normalized(y) else { return LemmaVerdict::vacuous() };
    if !x.is_finite() {
        return LemmaVerdict::vacuous();
    }
    if let Some(nx) = fmt.normalized(x) {
        let p = fmt.p() as i64;
        let ok = match hyp {
            IgnoreHypothesis::ExponentGap => nx.e <= ny.e - p - 2,
            IgnoreHypothesis::LowestTermsScale => mu(fmt, x).unwrap() <= ny.e - p - 2,
            IgnoreHypothesis::MagnitudeBound => fmt.value(x).unwrap().abs() <= Dyadic::pow2(ny.e - p - 2),
        };
        if nx.e > ny.e || !ok {
            return LemmaVerdict::vacuous();
        }
    }
    let vy = fmt.value(y).unwrap();
    let vx = fmt.value(x).unwrap();
    for (op, r, exact) in [("y + x", fmt.add(y, x), &vy + &vx), ("y - x", fmt.sub(y, x), &vy - &vx)] {
        if r != *y {
            return LemmaVerdict { applicable: true, holds: false, witness: Some(witness(fmt, op, &[x, y], &exact, &r)) };
        }
    }
    LemmaVerdict::ok()
}
