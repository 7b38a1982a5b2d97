use fpnet::format::{ratio, ulp};
use fpnet::{Dyadic, Error, Float, Format};
use num_rational::BigRational;
use proptest::prelude::*;

fn fpq45() -> Format {
    Format::fpq(4, 5).unwrap()
}

fn d(n: i64, k: i64) -> Dyadic {
    Dyadic::from_i64(n).mul_pow2(k)
}

/// Every value of an Fpq format, by decoding all bit patterns.
fn all_values(fmt: &Format) -> Vec<Float> {
    let w = fmt.bit_width().unwrap();
    (0..1u128 << w).map(|b| fmt.decode_bits(b).unwrap()).collect()
}

/// Nearest-even oracle: scan the candidates bracketing x among an explicit value list.
fn nearest_even(fmt: &Format, sorted: &[Float], x: &Dyadic) -> Float {
    let vals: Vec<Dyadic> = sorted.iter().map(|v| fmt.value(v).unwrap()).collect();
    let i = vals.partition_point(|v| v <= x);
    if i > 0 && vals[i - 1] == *x {
        return sorted[i - 1];
    }
    let (lo, hi) = (i - 1, i);
    let dl = x - &vals[lo];
    let dh = &vals[hi] - x;
    if dl < dh {
        sorted[lo]
    } else if dh < dl {
        sorted[hi]
    } else {
        let even = |f: &Float| matches!(f, Float::Finite { m, .. } if m & 1 == 0);
        if even(&sorted[lo]) {
            sorted[lo]
        } else {
            sorted[hi]
        }
    }
}

#[test]
fn format_constraints_and_constants() {
    let h = Format::fpq(10, 5).unwrap();
    assert_eq!(h.e_min(), Some(-14));
    assert_eq!(h.e_max(), Some(15));
    assert!(Format::fpq(7, 8).is_ok());
    assert!(matches!(Format::fpq(3, 5), Err(Error::ConstraintViolation(_))));
    assert!(matches!(Format::fpq(11, 5), Err(Error::ConstraintViolation(_))));
    assert!(matches!(Format::fpq(4, 4), Err(Error::ConstraintViolation(_))));

    let f = fpq45();
    let u = d(1, -4);
    let two_minus_u = &Dyadic::from_i64(2) - &u;
    assert_eq!(f.omega().unwrap(), Dyadic::from_i64(63488));
    assert_eq!(f.omega().unwrap(), two_minus_u.mul_pow2(15));
    assert_eq!(f.omega_prime().unwrap(), Dyadic::from_i64(64512));
    assert_eq!(f.eta().unwrap(), d(1, -18));
    assert_eq!(f.e0(), Some(7));
    assert_eq!(f.kappa().unwrap(), two_minus_u.mul_pow2(-2 - 4 + 15));
    assert_eq!(f.kappa().unwrap(), Dyadic::from_i64(992));
    assert_eq!(f.gadget_window().unwrap(), two_minus_u.mul_pow2(-2 + 7));
    assert_eq!(Format::fp(4).unwrap().e_min(), None);
}

#[test]
fn format_spec_strings() {
    assert_eq!("fp:p=4".parse::<Format>().unwrap(), Format::fp(4).unwrap());
    assert_eq!("fpq:p=4,q=5".parse::<Format>().unwrap(), fpq45());
    assert_eq!("fpq:4,5".parse::<Format>().unwrap(), fpq45());
    assert_eq!(fpq45().to_string(), "fpq:p=4,q=5");
    assert!("fpq:p=3,q=5".parse::<Format>().is_err());
    assert!("float32".parse::<Format>().is_err());
}

#[test]
fn rounding_examples() {
    let f = fpq45();
    assert_eq!(f.round(&Dyadic::from_i64(64512)), Float::PosInf);
    assert_eq!(f.round(&Dyadic::from_i64(-64512)), Float::NegInf);
    assert_eq!(f.value(&f.round(&Dyadic::from_i64(64511))), Some(Dyadic::from_i64(63488)));
    let f2 = Format::fp(2).unwrap();
    assert_eq!(f2.value(&f2.round(&d(9, -3))), Some(Dyadic::one()));
    assert_eq!(f2.value(&f2.round(&d(11, -3))), Some(d(3, -1)));
    // subnormal ties
    assert_eq!(f.round(&d(1, -19)), f.zero(false));
    assert!(f.round(&d(-1, -19)).identical(&f.zero(true)));
    assert_eq!(f.value(&f.round(&d(3, -19))), Some(d(1, -17)));
    assert_eq!(Format::fp(4).unwrap().round(&Dyadic::zero()), Format::fp(4).unwrap().zero(false));
}

#[test]
fn rounding_matches_nearest_even_scan_fpq45() {
    let f = fpq45();
    let mut finite: Vec<Float> = all_values(&f).into_iter().filter(|v| v.is_finite() && !v.identical(&f.zero(true))).collect();
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let omega = f.omega().unwrap();
    for k in -21..=17 {
        for n in -70..=70 {
            let x = d(n, k);
            if x.abs() > omega {
                continue;
            }
            let want = nearest_even(&f, &finite, &x);
            let got = f.round(&x);
            assert_eq!(got, want, "round({x})");
        }
    }
}

#[test]
fn arithmetic_examples() {
    for p in [2u32, 4, 10, 23] {
        let f = Format::fp(p).unwrap();
        let delta = f.exact(&d(1, -(p as i64 + 2))).unwrap();
        assert_eq!(f.add(&f.one(), &delta), f.one());
    }
    let f2 = Format::fp(2).unwrap();
    let a = f2.parse_text("1.25").unwrap();
    assert_eq!(f2.value(&f2.mul(&a, &a)), Some(d(3, -1)));
    let f = fpq45();
    let x = f.parse_text("1.0110 × 2^3").unwrap();
    assert_eq!(f.add(&x, &f.zero(false)), x);
    assert_eq!(f.mul(&x, &f.one()), x);
    // IEEE specials and zero signs
    assert!(f.add(&Float::PosInf, &Float::NegInf).is_nan());
    assert!(f.mul(&Float::PosInf, &f.zero(false)).is_nan());
    assert!(f.add(&Float::NaN, &x).is_nan());
    assert_eq!(f.mul(&Float::NegInf, &x), Float::NegInf);
    assert!(f.add(&f.neg(&x), &x).identical(&f.zero(false)));
    assert!(f.add(&f.zero(true), &f.zero(true)).identical(&f.zero(true)));
    assert!(f.mul(&f.neg(&x), &f.zero(false)).identical(&f.zero(true)));
    assert!(f.sub(&f.zero(true), &f.zero(false)).identical(&f.zero(true)));
    // overflow
    let big = f.exact(&Dyadic::from_i64(63488)).unwrap();
    let (r, flags) = f.add_flags(&big, &f.exact(&Dyadic::from_i64(1024)).unwrap());
    assert_eq!(r, Float::PosInf);
    assert!(flags.overflow && flags.inexact);
}

#[test]
fn neighbors() {
    let f = fpq45();
    let eta = f.exact(&f.eta().unwrap()).unwrap();
    assert_eq!(f.succ(&f.zero(false)), Some(eta));
    assert_eq!(f.succ(&f.zero(true)), Some(eta));
    assert_eq!(f.pred(&eta), Some(f.zero(false)));
    assert_eq!(f.succ(&f.max_finite().unwrap()), None);
    assert_eq!(f.pred(&f.neg(&f.max_finite().unwrap())), None);
    assert_eq!(f.value(&f.succ(&f.one()).unwrap()), Some(d(17, -4)));
    assert_eq!(f.value(&f.pred(&f.one()).unwrap()), Some(d(31, -5)));
    let fp = Format::fp(4).unwrap();
    assert_eq!(fp.succ(&fp.zero(false)), None);
    assert_eq!(fp.pred(&fp.zero(false)), None);
    assert_eq!(fp.value(&fp.pred(&fp.one()).unwrap()), Some(d(31, -5)));
}

#[test]
fn succ_walks_every_value_in_order() {
    let f = fpq45();
    let mut all: Vec<Float> = all_values(&f).into_iter().filter(|v| v.is_finite() && !v.identical(&f.zero(true))).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut x = all[0];
    for want in &all[1..] {
        let s = f.succ(&x).unwrap();
        assert!(s.identical(want), "succ({x:?})");
        assert!(f.pred(want).unwrap().identical(&x) || x.is_zero());
        x = s;
    }
    assert_eq!(f.succ(&x), None);
}

#[test]
fn bit_encoding() {
    let s = Format::fpq(23, 8).unwrap();
    assert_eq!(s.encode_bits(&s.one()).unwrap(), 0x3F80_0000);
    for v in [1.0f32, -2.5, 1e-40, -0.0, f32::MAX, f32::MIN_POSITIVE, 3.0e-45] {
        let x = s.decode_bits(v.to_bits() as u128).unwrap();
        assert_eq!(s.encode_bits(&x).unwrap(), v.to_bits() as u128);
        assert_eq!(s.value(&x).unwrap().to_f64_lossy(), v as f64);
    }
    let f = fpq45();
    assert_eq!(f.bit_width(), Some(10));
    assert_eq!(f.encode_bits(&f.zero(false)).unwrap(), 0);
    assert_eq!(f.decode_bits(0b0_11111_0000).unwrap(), Float::PosInf);
    assert!(f.decode_bits(0b0_11111_0100).unwrap().is_nan());
    assert!(matches!(Format::fp(4).unwrap().encode_bits(&Format::fp(4).unwrap().one()), Err(Error::FormatMismatch(_))));
    for x in all_values(&f) {
        let b = f.encode_bits(&x).unwrap();
        let y = f.decode_bits(b).unwrap();
        assert!(y.identical(&x) || (x.is_nan() && y.is_nan()));
    }
}

#[test]
fn text_form() {
    let f3 = Format::fp(3).unwrap();
    assert_eq!(f3.parse_text("1.101 × 2^-2").unwrap(), Float::Finite { neg: false, m: 13, e: -2 });
    assert!(matches!(f3.parse_text("1.1011 × 2^0"), Err(Error::NotRepresentable(_))));
    assert!(matches!(f3.parse_text("1.1x"), Err(Error::Parse(_))));
    let f = fpq45();
    assert_eq!(f.parse_text("0.0001 × 2^-14").unwrap(), f.exact(&f.eta().unwrap()).unwrap());
    assert_eq!(f.format_text(&f.exact(&f.eta().unwrap()).unwrap()), "0.0001 × 2^-14");
    assert_eq!(f.parse_text("1.1 * 2^{3}").unwrap(), f.from_i64(12).unwrap());
    assert!(f.parse_text("-0").unwrap().identical(&f.zero(true)));
    for x in all_values(&f) {
        let s = f.format_text(&x);
        let y = f.parse_text(&s).unwrap();
        assert!(y.identical(&x) || (x.is_nan() && y.is_nan()), "{s}");
    }
}

#[test]
fn exhaustive_fpq45_algebra_and_reference_paths() {
    let f = fpq45();
    let vals = all_values(&f);
    for a in &vals {
        for b in &vals {
            let (s, fs) = f.add_flags(a, b);
            let (sr, fsr) = f.add_flags_reference(a, b);
            assert!(s.identical(&sr) || (s.is_nan() && sr.is_nan()), "{a:?} + {b:?}");
            assert_eq!(fs, fsr);
            let (m, fm) = f.mul_flags(a, b);
            let (mr, fmr) = f.mul_flags_reference(a, b);
            assert!(m.identical(&mr) || (m.is_nan() && mr.is_nan()), "{a:?} * {b:?}");
            assert_eq!(fm, fmr);
            let s2 = f.add(b, a);
            assert!(s.identical(&s2) || (s.is_nan() && s2.is_nan()));
            let m2 = f.mul(b, a);
            assert!(m.identical(&m2) || (m.is_nan() && m2.is_nan()));
        }
    }
}

#[test]
fn monotone_idempotent_half_ulp_dense_grid() {
    for f in [fpq45(), Format::fpq(5, 5).unwrap(), Format::fp(3).unwrap()] {
        let mut prev: Option<(Dyadic, Float)> = None;
        let omega = f.omega();
        for n in -5000i64..=5000 {
            let x = d(n, -9).mul_pow2(if f.is_fpq() { -8 } else { 0 });
            let r = f.round(&x);
            if let Some((_, pr)) = &prev {
                assert!(pr <= &r, "monotonicity at {x}");
            }
            if omega.as_ref().is_none_or(|o| x.abs() <= *o) {
                let v = f.value(&r).unwrap();
                assert_eq!(f.round(&v), r);
                if !r.is_zero() {
                    let err = (&v - &x).abs();
                    let half = ulp(&f, &r).unwrap().mul_pow2(-1);
                    assert!(err <= half, "half-ulp at {x}");
                }
            }
            prev = Some((x, r));
        }
    }
}

#[test]
fn round_rational_agrees_with_dyadic_rounding() {
    let f = fpq45();
    for n in -300i64..300 {
        let x = d(n, -7);
        assert_eq!(f.round_rational(&x.to_rational()), f.round(&x));
    }
    // 1/3 lies strictly between two floats; the nearer one is 1.0101 × 2^-2 = 21/64
    let third: BigRational = ratio(1, 3);
    assert_eq!(f.value(&f.round_rational(&third)), Some(d(21, -6)));
    assert_eq!(f.value(&f.ceil_rational(&third)), Some(d(11, -5)));
}

fn fp_float(p: u32) -> impl Strategy<Value = Float> {
    (any::<bool>(), (1u128 << p)..(1u128 << (p + 1)), -40i64..40).prop_map(|(neg, m, e)| Float::Finite { neg, m, e })
}

proptest! {
    #[test]
    fn fp_ops_match_reference(p in 1u32..60, a in any::<u64>(), b in any::<u64>(), ea in -60i64..60, eb in -60i64..60, sa: bool, sb: bool) {
        let f = Format::fp(p).unwrap();
        let mask = (1u128 << p) - 1;
        let x = Float::Finite { neg: sa, m: (1u128 << p) | (a as u128 & mask), e: ea };
        let y = Float::Finite { neg: sb, m: (1u128 << p) | (b as u128 & mask), e: eb };
        prop_assert_eq!(f.add_flags(&x, &y), f.add_flags_reference(&x, &y));
        prop_assert_eq!(f.mul_flags(&x, &y), f.mul_flags_reference(&x, &y));
    }

    #[test]
    fn fp_rounding_is_monotone_and_within_half_ulp(n1 in -1i64<<40..1i64<<40, n2 in -1i64<<40..1i64<<40, k in -80i64..80) {
        let f = Format::fp(6).unwrap();
        let (x, y) = (d(n1.min(n2), k), d(n1.max(n2), k));
        let (rx, ry) = (f.round(&x), f.round(&y));
        prop_assert!(rx <= ry);
        if !x.is_zero() {
            let err = (&f.value(&rx).unwrap() - &x).abs();
            prop_assert!(err <= ulp(&f, &rx).unwrap().mul_pow2(-1));
        }
    }

    #[test]
    fn fp_commutative_and_sterbenz(x in fp_float(5), y in fp_float(5)) {
        let f = Format::fp(5).unwrap();
        prop_assert_eq!(f.add(&x, &y), f.add(&y, &x));
        prop_assert_eq!(f.mul(&x, &y), f.mul(&y, &x));
        let (vx, vy) = (f.value(&x).unwrap(), f.value(&y).unwrap());
        if !vx.is_negative() && vy.mul_pow2(-1) <= vx && vx <= vy {
            prop_assert_eq!(f.value(&f.sub(&x, &y)), Some(&vx - &vy));
        }
    }
}
