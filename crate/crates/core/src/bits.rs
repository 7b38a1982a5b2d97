//! IEEE-754-style bit layout for F_{p,q}: sign | q biased-exponent bits | p trailing bits.
//!
//! The bias is 2^{q-1}-1. Exponent field 0 holds zeros and subnormals; all ones
//! holds infinities (trailing 0) and NaN (trailing nonzero; encoded as the quiet
//! pattern with only the top trailing bit set).

use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

impl Format {
    /// Total encoding width 1+q+p.
    pub fn bit_width(&self) -> Option<u32> {
        self.q().map(|q| 1 + q + self.p())
    }

    fn layout(&self) -> Result<(u32, u32)> {
        let q = self.q().ok_or_else(|| Error::FormatMismatch("Fp has no bit encoding".into()))?;
        if 1 + q + self.p() > 128 {
            return Err(Error::FormatMismatch(format!("{self} needs more than 128 bits")));
        }
        Ok((self.p(), q))
    }

    pub fn encode_bits(&self, x: &Float) -> Result<u128> {
        let (p, q) = self.layout()?;
        let all_ones = (1u128 << q) - 1;
        let bias = self.e_max().unwrap() as i128;
        let (sign, field, trailing) = match *x {
            Float::NaN => (0, all_ones, 1u128 << (p - 1)),
            Float::PosInf => (0, all_ones, 0),
            Float::NegInf => (1, all_ones, 0),
            Float::Finite { neg, m, e } => {
                let lo = 1u128 << p;
                if m < lo {
                    (neg as u128, 0, m)
                } else {
                    ((neg as u128), (e as i128 + bias) as u128, m - lo)
                }
            }
        };
        Ok((sign << (q + p)) | (field << p) | trailing)
    }

    pub fn decode_bits(&self, bits: u128) -> Result<Float> {
        let (p, q) = self.layout()?;
        let width = 1 + q + p;
        if width < 128 && bits >> width != 0 {
            return Err(Error::FormatMismatch(format!("{bits:#x} wider than {width} bits")));
        }
        let all_ones = (1u128 << q) - 1;
        let neg = (bits >> (q + p)) & 1 == 1;
        let field = (bits >> p) & all_ones;
        let trailing = bits & ((1u128 << p) - 1);
        let emin = self.e_min().unwrap();
        Ok(if field == all_ones {
            if trailing != 0 {
                Float::NaN
            } else {
                self.inf(neg)
            }
        } else if field == 0 {
            Float::Finite { neg, m: trailing, e: emin }
        } else {
            let e = field as i64 - self.e_max().unwrap();
            Float::Finite { neg, m: trailing | (1u128 << p), e }
        })
    }
}
