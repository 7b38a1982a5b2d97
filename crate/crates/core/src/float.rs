//! Values of a format: finite triples plus the IEEE-style specials.

use std::cmp::Ordering;

/// A floating-point value relative to some [`crate::Format`].
///
/// A finite value is `(-1)^neg · m · 2^{e-p}` where `p` comes from the format.
/// Canonical forms are produced by the format's rounding; see
/// [`crate::Format::is_canonical`].
#[derive(Clone, Copy, Debug)]
pub enum Float {
    Finite { neg: bool, m: u128, e: i64 },
    PosInf,
    NegInf,
    NaN,
}

impl Float {
    pub fn is_finite(&self) -> bool {
        matches!(self, Float::Finite { .. })
    }

    pub fn is_nan(&self) -> bool {
        matches!(self, Float::NaN)
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Float::PosInf | Float::NegInf)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Float::Finite { m: 0, .. })
    }

    /// Sign bit (true for -0 and negative values; false for NaN).
    pub fn sign_bit(&self) -> bool {
        match *self {
            Float::Finite { neg, .. } => neg,
            Float::NegInf => true,
            _ => false,
        }
    }

    /// Strictly negative value.
    pub fn is_negative(&self) -> bool {
        match *self {
            Float::Finite { neg, m, .. } => neg && m != 0,
            Float::NegInf => true,
            _ => false,
        }
    }

    /// Strictly positive value.
    pub fn is_positive(&self) -> bool {
        match *self {
            Float::Finite { neg, m, .. } => !neg && m != 0,
            Float::PosInf => true,
            _ => false,
        }
    }

    /// Bitwise identity: distinguishes -0 from +0.
    pub fn identical(&self, other: &Float) -> bool {
        match (self, other) {
            (Float::Finite { neg: a, m: ma, e: ea }, Float::Finite { neg: b, m: mb, e: eb }) => {
                a == b && ma == mb && (ea == eb || *ma == 0)
            }
            (Float::PosInf, Float::PosInf) | (Float::NegInf, Float::NegInf) | (Float::NaN, Float::NaN) => true,
            _ => false,
        }
    }

    /// Magnitude comparison of two finite values of the same format.
    fn cmp_magnitude(m1: u128, e1: i64, m2: u128, e2: i64) -> Ordering {
        match (m1 == 0, m2 == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let t1 = e1 + (128 - m1.leading_zeros()) as i64;
        let t2 = e2 + (128 - m2.leading_zeros()) as i64;
        if t1 != t2 {
            return t1.cmp(&t2);
        }
        if e1 >= e2 {
            (m1 << (e1 - e2)).cmp(&m2)
        } else {
            m1.cmp(&(m2 << (e2 - e1)))
        }
    }
}

/// Value equality: +0 == -0, and the single NaN equals itself so that
/// results can be compared bit-for-bit in sweeps.
impl PartialEq for Float {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Float::NaN, Float::NaN) => true,
            (Float::NaN, _) | (_, Float::NaN) => false,
            _ => self.partial_cmp(other) == Some(Ordering::Equal),
        }
    }
}

impl Eq for Float {}

impl PartialOrd for Float {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Float::*;
        match (*self, *other) {
            (NaN, _) | (_, NaN) => None,
            (PosInf, PosInf) | (NegInf, NegInf) => Some(Ordering::Equal),
            (PosInf, _) | (_, NegInf) => Some(Ordering::Greater),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (Finite { neg: n1, m: m1, e: e1 }, Finite { neg: n2, m: m2, e: e2 }) => {
                let s1 = if m1 == 0 { 0 } else if n1 { -1 } else { 1 };
                let s2 = if m2 == 0 { 0 } else if n2 { -1 } else { 1 };
                if s1 != s2 {
                    return Some(s1.cmp(&s2));
                }
                let mag = Float::cmp_magnitude(m1, e1, m2, e2);
                Some(if s1 < 0 { mag.reverse() } else { mag })
            }
        }
    }
}
