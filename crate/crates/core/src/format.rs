//! Number systems F_p and F_{p,q}: derived constants, rounding, arithmetic, neighbors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;

/// Largest supported significand width; significands live in a u128.
pub const MAX_P: u32 = 120;
/// Largest supported exponent width; exponents live in an i64.
pub const MAX_Q: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// p significand bits, unbounded exponent.
    Fp,
    /// p significand bits, q exponent bits, subnormals and overflow.
    Fpq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Format {
    kind: Kind,
    p: u32,
    q: u32,
}

/// Side information about a single rounded operation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpFlags {
    /// The rounded result differs from the exact one.
    pub inexact: bool,
    /// Finite operands produced an infinite result.
    pub overflow: bool,
}

/// The normalized view `𝔰 · 𝔞 · 2^𝔢` of a nonzero finite value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    pub neg: bool,
    /// 𝔞 in [1, 2).
    pub a: Dyadic,
    /// 𝔢 = ⌊log2 |x|⌋.
    pub e: i64,
    /// c_x = max(0, e_min − 𝔢); always 0 for Fp.
    pub c: i64,
}

impl Format {
    pub fn fp(p: u32) -> Result<Self> {
        if p == 0 || p > MAX_P {
            return Err(Error::ConstraintViolation(format!("Fp needs 1 <= p <= {MAX_P}, got p={p}")));
        }
        Ok(Format { kind: Kind::Fp, p, q: 0 })
    }

    pub fn fpq(p: u32, q: u32) -> Result<Self> {
        if !(5..=MAX_Q).contains(&q) {
            return Err(Error::ConstraintViolation(format!("Fpq needs 5 <= q <= {MAX_Q}, got q={q}")));
        }
        let hi = (1u64 << (q - 2)) + 2;
        if p < 4 || p as u64 > hi {
            return Err(Error::ConstraintViolation(format!("Fpq needs 4 <= p <= 2^(q-2)+2 = {hi}, got p={p}")));
        }
        if p > MAX_P {
            return Err(Error::ConstraintViolation(format!("p={p} exceeds supported maximum {MAX_P}")));
        }
        Ok(Format { kind: Kind::Fpq, p, q })
    }

    pub fn new(kind: Kind, p: u32, q: Option<u32>) -> Result<Self> {
        match (kind, q) {
            (Kind::Fp, None) => Self::fp(p),
            (Kind::Fp, Some(_)) => Err(Error::ConstraintViolation("Fp takes no q".into())),
            (Kind::Fpq, Some(q)) => Self::fpq(p, q),
            (Kind::Fpq, None) => Err(Error::ConstraintViolation("Fpq needs q".into())),
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> Option<u32> {
        (self.kind == Kind::Fpq).then_some(self.q)
    }

    pub fn is_fpq(&self) -> bool {
        self.kind == Kind::Fpq
    }

    /// u = 2^{-p}.
    pub fn u(&self) -> Dyadic {
        Dyadic::pow2(-(self.p as i64))
    }

    pub fn e_min(&self) -> Option<i64> {
        self.q().map(|q| -(1i64 << (q - 1)) + 2)
    }

    pub fn e_max(&self) -> Option<i64> {
        self.q().map(|q| (1i64 << (q - 1)) - 1)
    }

    /// e₀ = 2^{q-2} − 1.
    pub fn e0(&self) -> Option<i64> {
        self.q().map(|q| (1i64 << (q - 2)) - 1)
    }

    /// Ω = (2−u)·2^{e_max}.
    pub fn omega(&self) -> Option<Dyadic> {
        self.e_max().map(|em| self.two_minus_u().mul_pow2(em))
    }

    /// Ω′ = Ω + 2^{e_max−p−1}.
    pub fn omega_prime(&self) -> Option<Dyadic> {
        let em = self.e_max()?;
        Some(&self.omega()? + &Dyadic::pow2(em - self.p as i64 - 1))
    }

    /// η = 2^{−p+e_min}.
    pub fn eta(&self) -> Option<Dyadic> {
        self.e_min().map(|e| Dyadic::pow2(e - self.p as i64))
    }

    /// κ = (2−u)·2^{−2−p+e_max}.
    pub fn kappa(&self) -> Option<Dyadic> {
        self.e_max().map(|em| self.two_minus_u().mul_pow2(em - 2 - self.p as i64))
    }

    /// (2−u)·2^{−2+e₀}: the input window of the Fpq ReLU gadgets.
    pub fn gadget_window(&self) -> Option<Dyadic> {
        self.e0().map(|e0| self.two_minus_u().mul_pow2(e0 - 2))
    }

    fn two_minus_u(&self) -> Dyadic {
        &Dyadic::from_i64(2) - &self.u()
    }

    fn p_i(&self) -> i64 {
        self.p as i64
    }

    // ---- canonical values ----

    pub fn zero(&self, neg: bool) -> Float {
        match self.kind {
            Kind::Fp => Float::Finite { neg: false, m: 0, e: 0 },
            Kind::Fpq => Float::Finite { neg, m: 0, e: self.e_min().unwrap() },
        }
    }

    pub fn one(&self) -> Float {
        Float::Finite { neg: false, m: 1u128 << self.p, e: 0 }
    }

    pub fn inf(&self, neg: bool) -> Float {
        if neg {
            Float::NegInf
        } else {
            Float::PosInf
        }
    }

    /// Largest finite value (Fpq only).
    pub fn max_finite(&self) -> Option<Float> {
        self.e_max().map(|e| Float::Finite { neg: false, m: (1u128 << (self.p + 1)) - 1, e })
    }

    /// Whether `x` is in this format's canonical form.
    pub fn is_canonical(&self, x: &Float) -> bool {
        let Float::Finite { neg, m, e } = *x else { return true };
        let lo = 1u128 << self.p;
        let hi = 1u128 << (self.p + 1);
        if m >= hi {
            return false;
        }
        match self.kind {
            Kind::Fp => {
                if m == 0 {
                    !neg && e == 0
                } else {
                    m >= lo
                }
            }
            Kind::Fpq => {
                let (emin, emax) = (self.e_min().unwrap(), self.e_max().unwrap());
                if e == emin {
                    true
                } else {
                    e > emin && e <= emax && m >= lo
                }
            }
        }
    }

    /// Exact value of a finite float.
    pub fn value(&self, x: &Float) -> Option<Dyadic> {
        match *x {
            Float::Finite { neg, m, e } => Some(Dyadic::from_u128(neg, m, e - self.p_i())),
            _ => None,
        }
    }

    /// Normalized view of a nonzero finite value.
    pub fn normalized(&self, x: &Float) -> Option<Normalized> {
        let Float::Finite { neg, m, e } = *x else { return None };
        if m == 0 {
            return None;
        }
        let bits = (128 - m.leading_zeros()) as i64;
        let ne = e - self.p_i() + bits - 1;
        let a = Dyadic::from_u128(false, m, -(bits - 1));
        let c = self.e_min().map_or(0, |emin| (emin - ne).max(0));
        Some(Normalized { neg, a, e: ne, c })
    }

    // ---- rounding ----

    /// Round to nearest, ties to even. Fpq maps |x| ≥ Ω′ to ±∞.
    pub fn round(&self, x: &Dyadic) -> Float {
        self.round_with_zero_sign(x, false)
    }

    /// Rounding where an exact zero takes the given sign (Fpq only).
    fn round_with_zero_sign(&self, x: &Dyadic, zero_neg: bool) -> Float {
        if x.is_zero() {
            return self.zero(zero_neg);
        }
        let neg = x.is_negative();
        let l = x.floor_log2().unwrap();
        let k = x.scale();
        let qe = match self.kind {
            Kind::Fp => l - self.p_i(),
            Kind::Fpq => l.max(self.e_min().unwrap()) - self.p_i(),
        };
        let s = qe - k;
        let n = x.numerator();
        let mut m: u128;
        if s <= 0 {
            m = (n << (-s) as usize).to_u128().expect("significand fits");
        } else {
            let su = s as u64;
            m = if n.bits() <= su { 0 } else { (n >> su as usize).to_u128().expect("significand fits") };
            // n is odd, so the discarded part is nonzero; it is exactly half iff s == 1
            let half_bit = n.bit(su - 1);
            if half_bit && (s > 1 || m & 1 == 1) {
                m += 1;
            }
        }
        let mut e = qe + self.p_i();
        if m == 1u128 << (self.p + 1) {
            m >>= 1;
            e += 1;
        }
        if m == 0 {
            return self.zero(neg);
        }
        if let Some(emax) = self.e_max() {
            if e > emax {
                return self.inf(neg);
            }
        }
        Float::Finite { neg, m, e }
    }

    /// Round an arbitrary rational (ties to even).
    pub fn round_rational(&self, r: &BigRational) -> Float {
        if let Some(d) = Dyadic::from_rational(r) {
            return self.round(&d);
        }
        let neg = r.is_negative();
        let num = r.numer().magnitude().clone();
        let den = r.denom().magnitude().clone();
        // ⌊log2 (num/den)⌋
        let mut l = num.bits() as i64 - den.bits() as i64;
        if shifted_cmp(&num, &den, l) == std::cmp::Ordering::Less {
            l -= 1;
        }
        let qe = match self.kind {
            Kind::Fp => l - self.p_i(),
            Kind::Fpq => l.max(self.e_min().unwrap()) - self.p_i(),
        };
        // scaled = |r| · 2^{-qe} = N / D
        let (nn, dd) = if qe >= 0 { (num, den << qe as usize) } else { (num << (-qe) as usize, den) };
        let (mut mq, rem) = nn.div_rem(&dd);
        let twice = rem << 1usize;
        match twice.cmp(&dd) {
            std::cmp::Ordering::Greater => mq += 1u32,
            std::cmp::Ordering::Equal if mq.bit(0) => mq += 1u32,
            _ => {}
        }
        let d = Dyadic::new(neg, mq, qe);
        // re-round the (already representable or carry-overflowed) integer multiple
        self.round(&d).with_zero_sign(neg)
    }

    /// Smallest float ≥ r (finite inputs of interest; may be +∞ on Fpq).
    pub fn ceil_rational(&self, r: &BigRational) -> Float {
        let f = self.round_rational(r);
        match self.value(&f) {
            Some(v) if v.to_rational() < *r => self.succ(&f).unwrap_or(Float::PosInf),
            _ => f,
        }
    }

    /// The float whose value is exactly `x`.
    pub fn exact(&self, x: &Dyadic) -> Result<Float> {
        let f = self.round(x);
        match self.value(&f) {
            Some(v) if v == *x => Ok(f),
            _ => Err(Error::NotRepresentable(format!("{x} in {self}"))),
        }
    }

    pub fn from_i64(&self, v: i64) -> Result<Float> {
        self.exact(&Dyadic::from_i64(v))
    }

    // ---- arithmetic ----

    pub fn neg(&self, x: &Float) -> Float {
        match *x {
            Float::Finite { neg, m, e } => {
                if m == 0 && self.kind == Kind::Fp {
                    *x
                } else {
                    Float::Finite { neg: !neg, m, e }
                }
            }
            Float::PosInf => Float::NegInf,
            Float::NegInf => Float::PosInf,
            Float::NaN => Float::NaN,
        }
    }

    pub fn add(&self, a: &Float, b: &Float) -> Float {
        self.add_flags(a, b).0
    }

    pub fn sub(&self, a: &Float, b: &Float) -> Float {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Float, b: &Float) -> Float {
        self.mul_flags(a, b).0
    }

    pub fn sub_flags(&self, a: &Float, b: &Float) -> (Float, OpFlags) {
        self.add_flags(a, &self.neg(b))
    }

    pub fn add_flags(&self, a: &Float, b: &Float) -> (Float, OpFlags) {
        if let (Float::Finite { neg: na, m: ma, e: ea }, Float::Finite { neg: nb, m: mb, e: eb }) = (*a, *b) {
            if ma == 0 && mb == 0 {
                return (self.zero(na && nb), OpFlags::default());
            }
            if ma == 0 {
                return (*b, OpFlags::default());
            }
            if mb == 0 {
                return (*a, OpFlags::default());
            }
            // both nonzero: align on the smaller exponent when the shift keeps everything in 127 bits
            let (hi, lo) = if ea >= eb { ((na, ma, ea), (nb, mb, eb)) } else { ((nb, mb, eb), (na, ma, ea)) };
            let d = hi.2 - lo.2;
            if d <= 125 - self.p as i64 {
                let x = (hi.1 << d) as i128;
                let y = lo.1 as i128;
                let sx = if hi.0 { -x } else { x };
                let sy = if lo.0 { -y } else { y };
                let s = sx + sy;
                if s == 0 {
                    return (self.zero(false), OpFlags::default());
                }
                return self.round_u128(s < 0, s.unsigned_abs(), lo.2 - self.p_i());
            }
        }
        self.add_flags_reference(a, b)
    }

    /// ⊕ through exact dyadic arithmetic; the oracle for the integer fast path.
    pub fn add_flags_reference(&self, a: &Float, b: &Float) -> (Float, OpFlags) {
        use Float::*;
        let none = OpFlags::default();
        match (*a, *b) {
            (NaN, _) | (_, NaN) => (NaN, none),
            (PosInf, NegInf) | (NegInf, PosInf) => (NaN, none),
            (PosInf, _) | (_, PosInf) => (PosInf, none),
            (NegInf, _) | (_, NegInf) => (NegInf, none),
            (Finite { neg: na, .. }, Finite { neg: nb, .. }) => {
                let exact = &self.value(a).unwrap() + &self.value(b).unwrap();
                if exact.is_zero() {
                    let both_neg = na && nb && a.is_zero() && b.is_zero();
                    return (self.zero(both_neg), none);
                }
                self.finish(exact)
            }
        }
    }

    pub fn mul_flags(&self, a: &Float, b: &Float) -> (Float, OpFlags) {
        if let (Float::Finite { neg: na, m: ma, e: ea }, Float::Finite { neg: nb, m: mb, e: eb }) = (*a, *b) {
            if ma == 0 || mb == 0 {
                return (self.zero(na ^ nb), OpFlags::default());
            }
            if self.p <= 62 {
                return self.round_u128(na ^ nb, ma * mb, ea + eb - 2 * self.p_i());
            }
        }
        self.mul_flags_reference(a, b)
    }

    /// ⊗ through exact dyadic arithmetic.
    pub fn mul_flags_reference(&self, a: &Float, b: &Float) -> (Float, OpFlags) {
        use Float::*;
        let none = OpFlags::default();
        let neg = a.sign_bit() ^ b.sign_bit();
        match (*a, *b) {
            (NaN, _) | (_, NaN) => (NaN, none),
            (PosInf | NegInf, PosInf | NegInf) => (self.inf(neg), none),
            (PosInf | NegInf, Finite { m, .. }) | (Finite { m, .. }, PosInf | NegInf) => {
                if m == 0 {
                    (NaN, none)
                } else {
                    (self.inf(neg), none)
                }
            }
            (Finite { .. }, Finite { .. }) => {
                let exact = &self.value(a).unwrap() * &self.value(b).unwrap();
                if exact.is_zero() {
                    return (self.zero(neg), none);
                }
                self.finish(exact)
            }
        }
    }

    /// RNE of ±n·2^k for n > 0.
    fn round_u128(&self, neg: bool, n: u128, k: i64) -> (Float, OpFlags) {
        let l = 127 - n.leading_zeros() as i64 + k;
        let qe = match self.kind {
            Kind::Fp => l - self.p_i(),
            Kind::Fpq => l.max(self.e_min().unwrap()) - self.p_i(),
        };
        let s = qe - k;
        let (mut m, inexact) = if s <= 0 {
            (n << (-s) as u32, false)
        } else if s > 128 {
            // n < 2^{s-1}: below half an ulp
            (0, true)
        } else {
            let m = if s == 128 { 0 } else { n >> s };
            let rem = if s == 128 { n } else { n & ((1u128 << s) - 1) };
            let half = 1u128 << (s - 1);
            let up = rem > half || (rem == half && m & 1 == 1);
            (m + up as u128, rem != 0)
        };
        let mut e = qe + self.p_i();
        if m == 1u128 << (self.p + 1) {
            m >>= 1;
            e += 1;
        }
        let flags = OpFlags { inexact, overflow: false };
        if m == 0 {
            return (self.zero(neg), flags);
        }
        if self.e_max().is_some_and(|emax| e > emax) {
            return (self.inf(neg), OpFlags { inexact: true, overflow: true });
        }
        (Float::Finite { neg, m, e }, flags)
    }

    fn finish(&self, exact: Dyadic) -> (Float, OpFlags) {
        let r = self.round(&exact);
        let flags = match self.value(&r) {
            Some(v) => OpFlags { inexact: v != exact, overflow: false },
            None => OpFlags { inexact: true, overflow: true },
        };
        (r, flags)
    }

    // ---- neighbors ----

    /// x⁺: the next larger float, absent at the top of the range and at 0 in Fp.
    pub fn succ(&self, x: &Float) -> Option<Float> {
        let Float::Finite { neg, m, e } = *x else { return None };
        let lo = 1u128 << self.p;
        let top = 1u128 << (self.p + 1);
        if m == 0 {
            return match self.kind {
                Kind::Fp => None,
                Kind::Fpq => Some(Float::Finite { neg: false, m: 1, e: self.e_min().unwrap() }),
            };
        }
        if !neg {
            let (m2, e2) = if m + 1 == top { (lo, e + 1) } else { (m + 1, e) };
            if self.e_max().is_some_and(|emax| e2 > emax) {
                return None;
            }
            return Some(Float::Finite { neg: false, m: m2, e: e2 });
        }
        // negative: shrink magnitude
        let at_floor = self.e_min().is_some_and(|emin| e == emin);
        if m == 1 && at_floor {
            return Some(self.zero(false));
        }
        if m - 1 < lo && !at_floor {
            Some(Float::Finite { neg: true, m: top - 1, e: e - 1 })
        } else {
            Some(Float::Finite { neg: true, m: m - 1, e })
        }
    }

    /// x⁻: the next smaller float.
    pub fn pred(&self, x: &Float) -> Option<Float> {
        if !x.is_finite() {
            return None;
        }
        let s = self.succ(&self.neg(&x.abs_zero()))?;
        Some(self.neg(&s))
    }
}

impl Float {
    /// Zero keeps its magnitude but drops its sign; others unchanged.
    fn abs_zero(&self) -> Float {
        match *self {
            Float::Finite { m: 0, e, .. } => Float::Finite { neg: false, m: 0, e },
            other => other,
        }
    }

    fn with_zero_sign(self, neg: bool) -> Float {
        match self {
            Float::Finite { m: 0, e, .. } => Float::Finite { neg, m: 0, e },
            other => other,
        }
    }
}

/// Compare num with den·2^l.
fn shifted_cmp(num: &BigUint, den: &BigUint, l: i64) -> std::cmp::Ordering {
    if l >= 0 {
        num.cmp(&(den << l as usize))
    } else {
        (num << (-l) as usize).cmp(den)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            Kind::Fp => write!(f, "fp:p={}", self.p),
            Kind::Fpq => write!(f, "fpq:p={},q={}", self.p, self.q),
        }
    }
}

/// Accepts `fp:p=4`, `fp:4`, `fpq:p=4,q=5` and `fpq:4,5`.
impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad format spec {s:?}"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        let mut p = None;
        let mut q = None;
        for (i, part) in rest.split(',').enumerate() {
            let part = part.trim();
            let (key, val) = match part.split_once('=') {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (if i == 0 { "p" } else { "q" }, part),
            };
            let v: u32 = val.parse().map_err(|_| bad())?;
            match key {
                "p" => p = Some(v),
                "q" => q = Some(v),
                _ => return Err(bad()),
            }
        }
        let p = p.ok_or_else(bad)?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "fp" => Format::new(Kind::Fp, p, q),
            "fpq" => Format::new(Kind::Fpq, p, q),
            _ => Err(bad()),
        }
    }
}

impl Serialize for Format {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Format {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact rational `n/d`, a small convenience for tests and tables.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

/// Half-ulp bound helper: ulp of a nonzero finite value, 2^{e−p}.
pub fn ulp(fmt: &Format, x: &Float) -> Option<Dyadic> {
    match *x {
        Float::Finite { e, .. } => Some(Dyadic::pow2(e - fmt.p() as i64)),
        _ => None,
    }
}
