use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{par_tally, Report, Tally};
use crate::error::Result;
use crate::format::Format;

/// Operands around the edges of binary32: zeros, subnormals, the normal boundary,
/// the largest finite values and the overflow threshold, ties, and specials.
pub fn adversarial_f32() -> Vec<f32> {
    let b = f32::from_bits;
    let mut v = vec![
        0.0,
        b(1),
        b(2),
        b(3),
        b(0x007f_ffff),
        b(0x007f_fffe),
        f32::MIN_POSITIVE,
        b(0x0080_0001),
        b(0x0100_0000),
        0.5,
        1.0,
        b(0x3f80_0001),
        b(0x3f7f_ffff),
        1.5,
        3.0,
        1.0 / 3.0,
        2f32.powi(-24),
        2f32.powi(-25),
        2f32.powi(24),
        2f32.powi(24) + 2.0,
        2f32.powi(102),
        2f32.powi(103),
        2f32.powi(104),
        3.0 * 2f32.powi(102),
        2f32.powi(127),
        1.5 * 2f32.powi(127),
        f32::MAX,
        b(0x7f7f_fffe),
        2f32.powi(64),
        2f32.powi(-64),
        2f32.powi(-63) * 1.5,
        f32::INFINITY,
        f32::NAN,
    ];
    let neg: Vec<f32> = v.iter().map(|x| -x).collect();
    v.extend(neg);
    v
}

fn emulate(fmt: &Format, op: usize, a: u32, b: u32) -> Result<u32> {
    let x = fmt.decode_bits(a as u128)?;
    let y = fmt.decode_bits(b as u128)?;
    let r = match op {
        0 => fmt.add(&x, &y),
        1 => fmt.sub(&x, &y),
        _ => fmt.mul(&x, &y),
    };
    Ok(fmt.encode_bits(&r)? as u32)
}

fn native(op: usize, a: u32, b: u32) -> u32 {
    let (x, y) = (f32::from_bits(a), f32::from_bits(b));
    let r = match op {
        0 => x + y,
        1 => x - y,
        _ => x * y,
    };
    r.to_bits()
}

fn compare(fmt: &Format, a: u32, b: u32, t: &mut Tally) {
    for op in 0..3 {
        let want = native(op, a, b);
        let name = ["add", "sub", "mul"][op];
        let input = || vec![format!("{name}"), format!("{:#010x}", a), format!("{:#010x}", b)];
        match emulate(fmt, op, a, b) {
            Ok(got) => {
                let both_nan = f32::from_bits(got).is_nan() && f32::from_bits(want).is_nan();
                t.check(got == want || both_nan, input, || format!("emulated {got:#010x}, hardware {want:#010x}"));
            }
            Err(e) => t.fail(input(), e.to_string()),
        }
    }
}

/// ⊕, ⊖, ⊗ of F_{23,8} against the host's binary32 arithmetic, bit for bit (NaN payloads ignored),
/// on `n_random` seeded operand pairs plus all pairs of the adversarial set.
pub fn hardware_conformance(n_random: usize, seed: u64) -> Result<Report> {
    let start = Instant::now();
    let fmt = Format::fpq(23, 8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // half uniform bit patterns, half with nearby exponents so that cancellation and alignment get exercised
    let pairs: Vec<(u32, u32)> = (0..n_random)
        .map(|i| {
            let a: u32 = rng.gen();
            if i % 2 == 0 {
                (a, rng.gen())
            } else {
                let exp = ((a >> 23) & 0xff) as i32 + rng.gen_range(-26..=26);
                let exp = exp.clamp(0, 255) as u32;
                let b = (rng.gen::<u32>() & 0x807f_ffff) | (exp << 23);
                (a, b)
            }
        })
        .collect();
    let adv: Vec<u32> = adversarial_f32().iter().map(|x| x.to_bits()).collect();
    let mut report = Report::new(
        "hardware-conformance",
        &fmt.to_string(),
        &format!("{n_random} random pairs (seed {seed}) plus {}^2 adversarial pairs, add/sub/mul", adv.len()),
    );
    let t = par_tally(pairs.len(), |i, t| compare(&fmt, pairs[i].0, pairs[i].1, t));
    report.absorb(t);
    let t = par_tally(adv.len(), |i, t| {
        for b in &adv {
            compare(&fmt, adv[i], *b, t);
        }
    });
    report.absorb(t);
    report.wall_time = start.elapsed();
    Ok(report)
}
