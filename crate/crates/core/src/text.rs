//! Lossless text form: `1.0110 × 2^-3`, `0.0011 × 2^-14`, `0`, `-0`, `inf`, `-inf`, `nan`.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, Zero};

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

impl Format {
    /// Text form with exactly p fraction digits.
    pub fn format_text(&self, x: &Float) -> String {
        match *x {
            Float::NaN => "nan".into(),
            Float::PosInf => "inf".into(),
            Float::NegInf => "-inf".into(),
            Float::Finite { neg, m, e } => {
                let sign = if neg { "-" } else { "" };
                if m == 0 {
                    return format!("{sign}0");
                }
                let p = self.p() as usize;
                let lead = if m >> p != 0 { '1' } else { '0' };
                let frac = m & ((1u128 << p) - 1);
                format!("{sign}{lead}.{frac:0p$b} × 2^{e}")
            }
        }
    }

    /// Parse the text form. Plain decimal literals (`0.375`, `-3`) are also
    /// accepted when their value is exactly representable.
    pub fn parse_text(&self, s: &str) -> Result<Float> {
        let t = s.trim();
        let bad = || Error::Parse(format!("malformed float {s:?}"));
        match t.to_ascii_lowercase().as_str() {
            "nan" => return Ok(Float::NaN),
            "inf" | "+inf" => return Ok(Float::PosInf),
            "-inf" => return Ok(Float::NegInf),
            "0" | "+0" => return Ok(self.zero(false)),
            "-0" => return Ok(self.zero(true)),
            _ => {}
        }
        let split = ["×", "*", "x"].iter().find_map(|sep| t.split_once(sep));
        let Some((mant, pow)) = split else {
            return self.parse_decimal(t).ok_or_else(bad)?;
        };
        let (neg, mant) = strip_sign(mant.trim());
        let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
        if !matches!(int, "0" | "1") || !frac.chars().all(|c| c == '0' || c == '1') {
            return Err(bad());
        }
        let pow = pow.trim().strip_prefix("2^").ok_or_else(bad)?;
        let pow = pow.strip_prefix('{').and_then(|r| r.strip_suffix('}')).unwrap_or(pow);
        let e: i64 = pow.trim().parse().map_err(|_| bad())?;
        if frac.len() > self.p() as usize {
            return Err(Error::NotRepresentable(format!("{s:?} has {} fraction digits, p = {}", frac.len(), self.p())));
        }
        let digits = format!("{int}{frac}");
        let n = BigUint::from_str_radix(&digits, 2).map_err(|_| bad())?;
        let v = Dyadic::new(neg, n, e - frac.len() as i64);
        if v.is_zero() {
            return Ok(self.zero(neg));
        }
        self.exact(&v)
    }

    fn parse_decimal(&self, t: &str) -> Option<Result<Float>> {
        let (neg, body) = strip_sign(t);
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty() {
            return None;
        }
        if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int}{frac}");
        let n = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let mut r = BigRational::new(n, den);
        if neg {
            r = -r;
        }
        if r.is_zero() {
            return Some(Ok(self.zero(neg)));
        }
        Some(match Dyadic::from_rational(&r) {
            Some(d) => self.exact(&d),
            None => Err(Error::NotRepresentable(format!("{t} is not a dyadic rational"))),
        })
    }
}

fn strip_sign(s: &str) -> (bool, &str) {
    if let Some(r) = s.strip_prefix('-') {
        (true, r.trim_start())
    } else if let Some(r) = s.strip_prefix('+') {
        (false, r.trim_start())
    } else {
        (false, s)
    }
}
