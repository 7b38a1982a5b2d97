use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fpnet::constructors::*;
use fpnet::dataset::Dataset;
use fpnet::lemmas::is_representable;
use fpnet::target::ExprTarget;
use fpnet::verifier::{enumerate_floats, overflow_scan, unit_box, verify_bound, verify_memorization, ExpWindow};
use fpnet::{Dyadic, Error, Float, Format, Network};

fn r(a: i64, b: i64) -> BigRational {
    BigRational::new(a.into(), b.into())
}

fn fl(f: &Format, s: &str) -> Float {
    f.parse_text(s).unwrap()
}

/// [0,1] ∩ F_{4,5} straight from the bit layout: 1 sign, 5 exponent, 4 fraction bits.
fn unit_values_fpq45() -> Vec<Dyadic> {
    let mut v = Vec::new();
    for e in 0..31i64 {
        for frac in 0..16i64 {
            let x = if e == 0 { Dyadic::from_i64(frac).mul_pow2(-18) } else { Dyadic::from_i64(16 + frac).mul_pow2(e - 19) };
            if x <= Dyadic::one() {
                v.push(x);
            }
        }
    }
    v
}

#[test]
fn cube_indicator_point() {
    let f = Format::fp(4).unwrap();
    let h = fl(&f, "0.5");
    let net = step_cube_indicator(&f, &[h], &[h]).unwrap();
    assert_eq!(net.count_params(), 8);
    assert_eq!(net.eval_value(&[h]).unwrap(), f.one());
    assert!(net.eval_value(&[f.succ(&h).unwrap()]).unwrap().is_zero());
    assert!(net.eval_value(&[f.pred(&h).unwrap()]).unwrap().is_zero());
}

#[test]
fn cube_indicator_exhaustive_fpq() {
    let f = Format::fpq(4, 5).unwrap();
    let all = enumerate_floats(&f, &Float::NegInf, &Float::PosInf, None).unwrap();
    let (a, b) = (fl(&f, "-0.375"), fl(&f, "1.0100 × 2^3"));
    let net = step_cube_indicator(&f, &[a], &[b]).unwrap();
    for x in &all {
        let want = a <= *x && *x <= b;
        assert_eq!(net.eval_value(&[*x]).unwrap() == f.one(), want, "{}", f.format_text(x));
    }
}

#[test]
fn dimension_limit() {
    let f = Format::fp(2).unwrap();
    let z = vec![f.zero(false); 5];
    assert!(matches!(step_cube_indicator(&f, &z, &z), Err(Error::DimensionTooLarge { .. })));
    assert!(step_cube_indicator(&f, &z[..4], &z[..4]).is_ok());
    let data = Dataset::new(f, vec![z], vec![f.one()]).unwrap();
    assert!(matches!(step_memorizer(&f, &data), Err(Error::DimensionTooLarge { .. })));
    assert!(matches!(relu_memorizer(&f, &data), Err(Error::DimensionTooLarge { .. })));
}

fn random_dataset(f: &Format, rng: &mut ChaCha8Rng, pool: &[Float], ypool: &[Float], n: usize, d: usize) -> Dataset {
    let mut inputs: Vec<Vec<Float>> = Vec::new();
    while inputs.len() < n {
        let z: Vec<Float> = (0..d).map(|_| if rng.gen_bool(0.15) { f.zero(false) } else { *pool.choose(rng).unwrap() }).collect();
        if !inputs.contains(&z) {
            inputs.push(z);
        }
    }
    let ys = (0..n).map(|_| *ypool.choose(rng).unwrap()).collect();
    Dataset::new(*f, inputs, ys).unwrap()
}

/// Aggregate neurons sum integers of size at most 2^{p+1}; none of those folds may round.
fn aggregates_exact(net: &Network, layer: usize, x: &[Float]) -> bool {
    let (_, tr) = net.eval(x).unwrap();
    tr.layers[layer].iter().all(|n| n.stats.inexact_ops == 0) && tr.layers.last().unwrap()[0].stats.inexact_ops == 0
}

#[test]
fn memorizers_random() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for f in [Format::fp(4).unwrap(), Format::fpq(4, 5).unwrap()] {
        let pool = if f.is_fpq() {
            let k = f.round(&f.kappa().unwrap());
            enumerate_floats(&f, &f.neg(&k), &k, None).unwrap()
        } else {
            enumerate_floats(&f, &Float::NegInf, &Float::PosInf, Some(ExpWindow::new(-6, 6))).unwrap()
        };
        let ypool = enumerate_floats(&f, &Float::NegInf, &Float::PosInf, Some(ExpWindow::new(-6, 6))).unwrap();
        for _ in 0..30 {
            let (n, d) = (rng.gen_range(1..=12), rng.gen_range(1..=3));
            let data = random_dataset(&f, &mut rng, &pool, &ypool, n, d);
            let step = step_memorizer(&f, &data).unwrap();
            let relu = relu_memorizer(&f, &data).unwrap();
            assert_eq!(step.count_params(), 6 * d * n + 2 * n);
            assert_eq!(relu.count_params(), 20 * d * n + 2 * n);
            assert_eq!(step.depth(), 3);
            assert_eq!(relu.depth(), 4);
            for net in [&step, &relu] {
                let rep = verify_memorization(net, &data).unwrap();
                assert!(rep.is_pass(), "{f}: {}", rep.summary());
            }
            for x in &data.inputs {
                assert!(aggregates_exact(&step, 1, x));
                assert!(aggregates_exact(&relu, 2, x));
            }
        }
    }
}

#[test]
fn memorizer_examples() {
    let f = Format::fpq(4, 5).unwrap();
    let z = |s: &str| vec![fl(&f, s)];
    let data = Dataset::new(f, vec![z("0.25"), z("-3"), z("1.0110 × 2^-14")], vec![fl(&f, "7"), fl(&f, "-0.0001 × 2^-14"), fl(&f, "1.1111 × 2^15")]).unwrap();
    for net in [step_memorizer(&f, &data).unwrap(), relu_memorizer(&f, &data).unwrap()] {
        for (x, y) in data.inputs.iter().zip(&data.outputs) {
            assert!(net.eval_value(x).unwrap().identical(y));
        }
    }
    // y = 0: zero on and off the point
    let data = Dataset::new(f, vec![z("0.5")], vec![f.zero(false)]).unwrap();
    let net = step_memorizer(&f, &data).unwrap();
    assert!(net.eval_value(&z("0.5")).unwrap().is_zero());
    assert!(net.eval_value(&z("0.75")).unwrap().is_zero());
    // duplicates
    let dup = Dataset::new(f, vec![z("0.5"), z("1"), z("0.5")], vec![f.one(); 3]).unwrap();
    assert!(matches!(step_memorizer(&f, &dup), Err(Error::DuplicateInput(0, 2))));
    assert!(matches!(relu_memorizer(&f, &dup), Err(Error::DuplicateInput(0, 2))));
    // ReLU on F_{p,q} needs |z| ≤ κ
    let big = Dataset::new(f, vec![z("1.0 × 2^10")], vec![f.one()]).unwrap();
    assert!(matches!(relu_memorizer(&f, &big), Err(Error::InputOutOfRange(_))));
    assert!(step_memorizer(&f, &big).is_ok());
}

#[test]
fn relu_memorizer_zero_coordinates_and_overflow() {
    let f = Format::fpq(4, 5).unwrap();
    let v = |a: &str, b: &str| vec![fl(&f, a), fl(&f, b)];
    let inputs = vec![v("0", "0.5"), v("-0.25", "0"), v("0", "0"), v("1.1111 × 2^9", "-1.1111 × 2^9"), v("0.0001 × 2^-14", "3")];
    let ys: Vec<Float> = ["1", "2", "-4", "0.375", "1.0 × 2^15"].iter().map(|s| fl(&f, s)).collect();
    let data = Dataset::new(f, inputs, ys).unwrap();
    let net = relu_memorizer(&f, &data).unwrap();
    assert_eq!(net.count_params(), 20 * 2 * 5 + 2 * 5);
    assert!(verify_memorization(&net, &data).unwrap().is_pass());
    let b = fl(&f, "62");
    let axis = enumerate_floats(&f, &f.neg(&b), &b, None).unwrap();
    let pts: Vec<Vec<Float>> = axis.iter().step_by(3).flat_map(|a| axis.iter().step_by(5).map(move |c| vec![*a, *c])).collect();
    let rep = overflow_scan(&net, &pts).unwrap();
    assert!(rep.is_pass(), "{}", rep.summary());
}

#[test]
fn relu_memorizer_all_zero_fp() {
    let f = Format::fp(4).unwrap();
    let data = Dataset::new(f, vec![vec![f.zero(false), f.zero(false)]], vec![fl(&f, "-5")]).unwrap();
    let net = relu_memorizer(&f, &data).unwrap();
    assert_eq!(net.eval_value(&data.inputs[0]).unwrap(), fl(&f, "-5"));
    assert_eq!(net.eval_value(&[f.zero(true), f.zero(false)]).unwrap(), fl(&f, "-5"));
    // δ = 1, so the zero test accepts [−1, 1]
    assert_eq!(net.eval_value(&[f.one(), f.zero(false)]).unwrap(), fl(&f, "-5"));
    assert!(net.eval_value(&[fl(&f, "1.0001 × 2^0"), f.zero(false)]).unwrap().is_zero());
    assert_eq!(net.eval_value(&[fl(&f, "1.0 × 2^-30"), f.zero(false)]).unwrap(), fl(&f, "-5"));
}

#[test]
fn gadget_examples() {
    let f = Format::fp(4).unwrap();
    let (p1, p2) = relu_threshold_gadget(&f, &f.one(), Direction::Ge).unwrap();
    let sum = |x: &Float| f.add(&p1.eval_value(&[*x]).unwrap(), &p2.eval_value(&[*x]).unwrap());
    assert_eq!(sum(&f.one()), f.one());
    assert!(sum(&f.pred(&f.one()).unwrap()).is_zero());
    assert!(matches!(relu_threshold_gadget(&f, &f.zero(false), Direction::Ge), Err(Error::ThresholdOutOfRange(_))));

    let q = Format::fpq(4, 5).unwrap();
    let omega = q.exact(&q.omega().unwrap()).unwrap();
    assert!(matches!(relu_threshold_gadget(&q, &omega, Direction::Ge), Err(Error::ThresholdOutOfRange(_))));
    let kappa = q.exact(&q.kappa().unwrap()).unwrap();
    assert!(relu_threshold_gadget(&q, &kappa, Direction::Le).is_ok());
    assert!(relu_threshold_gadget(&q, &q.succ(&kappa).unwrap(), Direction::Le).is_err());

    let eta = q.exact(&q.eta().unwrap()).unwrap();
    let (p1, p2) = relu_threshold_gadget(&q, &eta, Direction::Ge).unwrap();
    let w = q.parse_text("62").unwrap();
    for x in enumerate_floats(&q, &q.neg(&w), &w, None).unwrap() {
        let s = q.add(&p1.eval_value(&[x]).unwrap(), &p2.eval_value(&[x]).unwrap());
        assert_eq!(s, if x >= eta { q.one() } else { q.zero(false) }, "{}", q.format_text(&x));
    }
}

#[test]
fn gadget_params_representable() {
    let q = Format::fpq(4, 5).unwrap();
    let kappa = q.exact(&q.kappa().unwrap()).unwrap();
    for z in enumerate_floats(&q, &q.neg(&kappa), &kappa, None).unwrap().into_iter().filter(|z| !z.is_zero()) {
        for dir in [Direction::Ge, Direction::Le] {
            let gp = gadget_params(&q, &z, dir).unwrap();
            for v in [&gp.u0, &gp.u0_tilde] {
                assert!(v.is_zero() || is_representable(&q, v));
            }
            for t in gadget_terms(&q, &z, dir).unwrap() {
                for w in [t.in_weight, t.in_bias, t.mid_weight, t.mid_bias, t.out_weight] {
                    assert!(w.is_finite() && q.is_canonical(&w));
                }
            }
        }
    }
}

#[test]
fn grid_plan_cells() {
    let f = Format::fpq(4, 5).unwrap();
    let t = ExprTarget::parse("x").unwrap();
    let plan = build_grid_plan(&f, 1, &Resolution::Delta(r(1, 4)), &t).unwrap();
    assert_eq!(plan.k, BigUint::from(4u32));
    assert_eq!(plan.cells.len(), 4);
    let unit = unit_values_fpq45();
    assert_eq!(unit.len(), 241);
    // every value lands in exactly one cell, and each cell is [lo, hi] with hi < next
    for v in &unit {
        let x = f.exact(v).unwrap();
        let hits = plan.cells.iter().filter(|c| c.lo <= x && x <= c.hi).count();
        assert_eq!(hits, 1);
    }
    let sizes: usize = plan.cells.iter().map(|c| enumerate_floats(&f, &c.lo, &c.hi, None).unwrap().len()).sum();
    assert_eq!(sizes, 241);
    for w in plan.cells.windows(2) {
        assert_eq!(f.succ(&w[0].hi).unwrap(), w[1].lo);
        assert_eq!(w[0].next, w[1].lo);
    }

    let one = build_grid_plan(&f, 1, &Resolution::Delta(r(3, 2)), &t).unwrap();
    assert_eq!(one.k, BigUint::from(1u32));
    assert!(one.is_trivial());
    let none = build_grid_plan(&f, 2, &Resolution::Lipschitz { eps: r(1, 2), lip: r(0, 1) }, &ExprTarget::parse("1").unwrap().with_dim(2).unwrap()).unwrap();
    assert_eq!(none.reps.len(), 1);

    let fp = Format::fp(4).unwrap();
    assert!(matches!(build_grid_plan(&fp, 1, &Resolution::Lipschitz { eps: r(0, 1), lip: r(1, 1) }, &t), Err(Error::RequiresFiniteDomain)));
    let zero = build_grid_plan(&f, 1, &Resolution::Lipschitz { eps: r(0, 1), lip: r(1, 1) }, &t).unwrap();
    assert_eq!(zero.cells.len(), 241);
}

#[test]
fn param_bounds() {
    let f = Format::fpq(4, 5).unwrap();
    let t2 = ExprTarget::parse("x1*x2").unwrap();
    let plan = build_grid_plan(&f, 2, &Resolution::Delta(r(1, 3)), &t2).unwrap();
    assert_eq!(plan.k, BigUint::from(3u32));
    assert_eq!(plan.step_param_bound(), BigUint::from(126u32));
    assert!(BigUint::from(step_approximator(&plan).unwrap().count_params()) <= plan.step_param_bound());
    let t = ExprTarget::parse("x^2").unwrap();
    let plan = build_grid_plan(&f, 1, &Resolution::Delta(r(1, 8)), &t).unwrap();
    assert_eq!(plan.relu_param_bound(), BigUint::from(176u32));
    assert_eq!(BigUint::from(relu_approximator(&plan).unwrap().count_params()), plan.relu_param_bound());
}

#[test]
fn step_approximator_cell_values() {
    let f = Format::fpq(4, 5).unwrap();
    let t = ExprTarget::parse("x").unwrap();
    let plan = build_grid_plan(&f, 1, &Resolution::Delta(r(1, 4)), &t).unwrap();
    let net = step_approximator(&plan).unwrap();
    for v in unit_values_fpq45() {
        let x = f.exact(&v).unwrap();
        let rep = plan.locate(&[x]).unwrap();
        // argmin of |x − ⟦x⟧| is any point, all error-free; the cell value is that point
        assert_eq!(rep.value, rep.gamma[0]);
        assert_eq!(net.eval_value(&[x]).unwrap(), rep.value);
    }
    let c = ExprTarget::parse("3/8").unwrap();
    let plan = build_grid_plan(&f, 1, &Resolution::Delta(r(1, 4)), &c).unwrap();
    let net = step_approximator(&plan).unwrap();
    for v in unit_values_fpq45() {
        assert_eq!(net.eval_value(&[f.exact(&v).unwrap()]).unwrap(), fl(&f, "0.375"));
    }
}

#[test]
fn approximators_bound_fpq() {
    let f = Format::fpq(4, 5).unwrap();
    for (src, d, lip, eps) in [("x^2", 1, 2, r(1, 8)), ("abs(2*x-1)", 1, 2, r(1, 2)), ("x", 1, 1, r(0, 1)), ("x1*x2", 2, 2, r(1, 2))] {
        let t = ExprTarget::parse(src).unwrap().with_dim(d).unwrap();
        let plan = build_grid_plan(&f, d, &Resolution::Lipschitz { eps: eps.clone(), lip: r(lip, 1) }, &t).unwrap();
        let pts = unit_box(&f, d, None).unwrap();
        for (net, bound) in [(step_approximator(&plan).unwrap(), plan.step_param_bound()), (relu_approximator(&plan).unwrap(), plan.relu_param_bound())] {
            let rep = verify_bound(&net, &plan, &t, &eps, &pts).unwrap();
            assert!(rep.is_pass(), "{src}: {}", rep.summary());
            assert!(BigUint::from(net.count_params()) <= bound);
        }
    }
}

#[test]
fn approximators_fp_lower_corner() {
    let f = Format::fp(4).unwrap();
    let t = ExprTarget::parse("x^2").unwrap();
    let plan = build_grid_plan(&f, 1, &Resolution::Lipschitz { eps: r(1, 4), lip: r(2, 1) }, &t).unwrap();
    assert_eq!(plan.policy, RepPolicy::LowerCorner);
    let pts = unit_box(&f, 1, Some(ExpWindow::new(-40, 0))).unwrap();
    for net in [step_approximator(&plan).unwrap(), relu_approximator(&plan).unwrap()] {
        let rep = verify_bound(&net, &plan, &t, &r(1, 4), &pts).unwrap();
        assert!(rep.is_pass(), "{}", rep.summary());
    }
}
