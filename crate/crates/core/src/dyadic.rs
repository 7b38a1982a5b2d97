//! Exact dyadic rationals `±n·2^k`, the carrier for every pre-rounding result.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `sign · n · 2^k` in lowest terms: `n` is odd unless the value is zero,
/// in which case `n = 0`, `k = 0` and the sign is positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    neg: bool,
    n: BigUint,
    k: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { neg: false, n: BigUint::zero(), k: 0 }
    }

    pub fn one() -> Self {
        Self::pow2(0)
    }

    /// `2^k`.
    pub fn pow2(k: i64) -> Self {
        Dyadic { neg: false, n: BigUint::one(), k }
    }

    /// `(-1)^neg · n · 2^k`, normalized.
    pub fn new(neg: bool, n: BigUint, k: i64) -> Self {
        if n.is_zero() {
            return Self::zero();
        }
        let tz = n.trailing_zeros().unwrap_or(0);
        Dyadic { neg, n: n >> tz, k: k + tz as i64 }
    }

    pub fn from_u128(neg: bool, n: u128, k: i64) -> Self {
        if n == 0 {
            return Self::zero();
        }
        let tz = n.trailing_zeros();
        Dyadic { neg, n: BigUint::from(n >> tz), k: k + tz as i64 }
    }

    pub fn from_i64(v: i64) -> Self {
        Self::from_u128(v < 0, v.unsigned_abs() as u128, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.n.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    /// -1, 0 or +1.
    pub fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.neg {
            -1
        } else {
            1
        }
    }

    /// The odd numerator (zero for zero).
    pub fn numerator(&self) -> &BigUint {
        &self.n
    }

    /// The lowest-terms scale `k`; this is μ(x) for nonzero x.
    pub fn scale(&self) -> i64 {
        self.k
    }

    /// μ(x): the smallest m with x·2^{-m} an integer. `None` at zero.
    pub fn mu(&self) -> Option<i64> {
        (!self.is_zero()).then_some(self.k)
    }

    /// ⌊log2 |x|⌋, `None` at zero.
    pub fn floor_log2(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.k + self.n.bits() as i64 - 1)
    }

    pub fn abs(&self) -> Self {
        Dyadic { neg: false, ..self.clone() }
    }

    /// `x · 2^s`, exact.
    pub fn mul_pow2(&self, s: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        Dyadic { neg: self.neg, n: self.n.clone(), k: self.k + s }
    }

    /// Integer value if the dyadic is an integer fitting in i128.
    pub fn to_i128(&self) -> Option<i128> {
        if self.k < 0 {
            return None;
        }
        if self.n.bits() as i64 + self.k > 126 {
            return None;
        }
        let mag: u128 = (&self.n << self.k as usize).try_into().ok()?;
        Some(if self.neg { -(mag as i128) } else { mag as i128 })
    }

    pub fn is_integer(&self) -> bool {
        self.k >= 0 || self.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        let num = BigInt::from_biguint(if self.neg { Sign::Minus } else { Sign::Plus }, self.n.clone());
        if self.k >= 0 {
            BigRational::from_integer(num << self.k as usize)
        } else {
            BigRational::new(num, BigInt::one() << (-self.k) as usize)
        }
    }

    /// Exact conversion from a rational whose reduced denominator is a power of two.
    pub fn from_rational(r: &BigRational) -> Option<Self> {
        let den = r.denom().magnitude();
        let tz = den.trailing_zeros().unwrap_or(0);
        if (den >> tz) != BigUint::one() {
            return None;
        }
        Some(Self::new(r.is_negative(), r.numer().magnitude().clone(), -(tz as i64)))
    }

    /// Approximate f64 value, for diagnostics only.
    pub fn to_f64_lossy(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.n.bits() as i64;
        let shift = (bits - 60).max(0);
        let top: u64 = (&self.n >> shift as usize).try_into().unwrap_or(u64::MAX);
        let v = top as f64 * 2f64.powi((self.k + shift).clamp(-2000, 2000) as i32);
        if self.neg {
            -v
        } else {
            v
        }
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let (la, lb) = (self.floor_log2().unwrap(), other.floor_log2().unwrap());
        if la != lb {
            return la.cmp(&lb);
        }
        let m = self.k.min(other.k);
        let a = &self.n << (self.k - m) as usize;
        let b = &other.n << (other.k - m) as usize;
        a.cmp(&b)
    }

    fn add_impl(&self, other: &Self, negate_other: bool) -> Self {
        let oneg = other.neg ^ negate_other;
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return Dyadic { neg: oneg, n: other.n.clone(), k: other.k };
        }
        let m = self.k.min(other.k);
        let a = &self.n << (self.k - m) as usize;
        let b = &other.n << (other.k - m) as usize;
        if self.neg == oneg {
            Self::new(self.neg, a + b, m)
        } else {
            match a.cmp(&b) {
                Ordering::Equal => Self::zero(),
                Ordering::Greater => Self::new(self.neg, a - b, m),
                Ordering::Less => Self::new(oneg, b - a, m),
            }
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.signum(), other.signum()) {
            (a, b) if a != b => a.cmp(&b),
            (-1, _) => other.cmp_magnitude(self),
            _ => self.cmp_magnitude(other),
        }
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // product of odd numbers is odd: already in lowest terms
        Dyadic { neg: self.neg ^ rhs.neg, n: &self.n * &rhs.n, k: self.k + rhs.k }
    }
}

impl Add for Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        if self.is_zero() {
            return self;
        }
        Dyadic { neg: !self.neg, ..self }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        -(self.clone())
    }
}

impl From<i64> for Dyadic {
    fn from(v: i64) -> Self {
        Dyadic::from_i64(v)
    }
}

/// Exact decimal expansion (every dyadic has a finite one).
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let sign = if self.neg { "-" } else { "" };
        if self.k >= 0 {
            return write!(f, "{sign}{}", &self.n << self.k as usize);
        }
        let frac_digits = (-self.k) as usize;
        let digits = (&self.n * BigUint::from(5u32).pow(frac_digits as u32)).to_string();
        let padded = if digits.len() <= frac_digits {
            format!("{}{}", "0".repeat(frac_digits + 1 - digits.len()), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - frac_digits);
        write!(f, "{sign}{int}.{frac}")
    }
}
