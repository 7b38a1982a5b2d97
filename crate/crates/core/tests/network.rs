use fpnet::constructors::{oscillation_net, relu_threshold_gadget, step_cube_indicator, step_memorizer, Direction};
use fpnet::dataset::Dataset;
use fpnet::network::aff;
use fpnet::{Activation, Error, Format, Layer, Network, Neuron};

fn single(fmt: &Format, act: Activation, w: &[&str], idx: Vec<usize>, d: usize) -> Network {
    let w = w.iter().map(|s| fmt.parse_text(s).unwrap()).collect();
    Network { format: *fmt, input_dim: d, activation: act, layers: vec![Layer { neurons: vec![Neuron::new(idx, w)] }], label: None }
}

#[test]
fn aff_fold_order() {
    let f = Format::fp(2).unwrap();
    let e = f.parse_text("0.125").unwrap();
    let one = f.one();
    let x = [e, e];
    let got = aff(&f, &x, &[one, one, one], &[0, 1, 2]).unwrap();
    assert_eq!(f.value(&got), Some(fpnet::Dyadic::from_i64(5).mul_pow2(-2)));
    // the same terms with the constant first: 1 ⊕ 0.125 ties to 1, twice
    let bias_first = f.add(&f.add(&one, &e), &e);
    assert_eq!(bias_first, one);
    // pure bias
    assert_eq!(aff(&f, &x, &[one], &[2]).unwrap(), one);
}

#[test]
fn aff_errors() {
    let f = Format::fp(2).unwrap();
    let x = [f.one()];
    assert!(matches!(aff(&f, &x, &[], &[]), Err(Error::Domain(_))));
    assert!(matches!(aff(&f, &x, &[f.one()], &[0, 1]), Err(Error::ShapeMismatch(_))));
    assert!(matches!(aff(&f, &x, &[f.one(), f.one()], &[1, 0]), Err(Error::ShapeMismatch(_))));
    assert!(matches!(aff(&f, &x, &[f.one()], &[2]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn identity_and_shape() {
    let f = Format::fpq(4, 5).unwrap();
    let net = single(&f, Activation::Relu, &["1"], vec![0], 1);
    for s in ["-3", "0.375", "1.1111 × 2^15"] {
        let x = f.parse_text(s).unwrap();
        assert_eq!(net.eval_value(&[x]).unwrap(), x);
    }
    assert!(matches!(net.eval_value(&[f.one(), f.one()]), Err(Error::ShapeMismatch(_))));
}

#[test]
fn activations() {
    let f = Format::fpq(4, 5).unwrap();
    for s in ["-0", "0", "0.5", "-0.5", "inf", "-inf"] {
        let x = f.parse_text(s).unwrap();
        let st = Activation::Step.apply(&f, &x);
        let want_on = !x.is_negative() || x.is_zero();
        assert_eq!(st, if want_on { f.one() } else { f.zero(false) }, "step({s})");
        let r = Activation::Relu.apply(&f, &x);
        if x.is_positive() {
            assert_eq!(r, x);
        } else {
            assert!(r.is_zero() && !r.is_negative());
        }
    }
}

#[test]
fn eval_trace_and_flags() {
    let f = Format::fpq(4, 5).unwrap();
    let net = oscillation_net(&f);
    let x = f.parse_text("1.1000 × 2^1").unwrap();
    let x = f.succ(&x).unwrap();
    let (y, tr) = net.eval(&[x]).unwrap();
    assert_eq!(y, f.from_i64(2).unwrap());
    assert_eq!(tr.layers.len(), 2);
    assert_eq!(tr.layers[0].len(), 2);
    for n in &tr.layers[0] {
        assert!(n.post.is_zero() || n.post == n.pre);
    }
    assert!(!tr.nan_seen);
    // large inputs overflow in the first layer
    let big = f.parse_text("1.0 × 2^15").unwrap();
    let (_, tr) = net.eval(&[big]).unwrap();
    assert!(tr.overflow_seen);
    let (_, tr) = net.eval(&[f.parse_text("nan").unwrap()]).unwrap();
    assert!(tr.nan_seen && !tr.overflow_seen);
    // deterministic
    assert_eq!(net.eval(&[x]).unwrap(), net.eval(&[x]).unwrap());
}

#[test]
fn cube_indicator_eval() {
    let f = Format::fp(4).unwrap();
    let a = vec![f.parse_text("0.25").unwrap(), f.zero(false)];
    let b = vec![f.parse_text("0.5").unwrap(), f.one()];
    let net = step_cube_indicator(&f, &a, &b).unwrap();
    assert_eq!(net.activation, Activation::Step);
    assert_eq!(net.count_params(), 6 * 2 + 2);
    let inside = [f.parse_text("0.375").unwrap(), f.parse_text("0.75").unwrap()];
    assert_eq!(net.eval_value(&inside).unwrap(), f.one());
    assert_eq!(net.eval_value(&[a[0], b[1]]).unwrap(), f.one());
    let out = [f.succ(&b[0]).unwrap(), f.one()];
    assert!(net.eval_value(&out).unwrap().is_zero());
}

#[test]
fn param_counts() {
    let f = Format::fp(4).unwrap();
    let data = Dataset::new(f, vec![vec![f.parse_text("0.25").unwrap()], vec![f.parse_text("0.75").unwrap()]], vec![f.from_i64(3).unwrap(), f.from_i64(-1).unwrap()]).unwrap();
    let net = step_memorizer(&f, &data).unwrap();
    assert_eq!(net.count_params(), 16);
    let (p1, p2) = relu_threshold_gadget(&f, &f.one(), Direction::Ge).unwrap();
    assert_eq!(p1.count_params(), 5);
    assert_eq!(p2.count_params(), 5);
    assert_eq!(p1.depth(), 3);
    assert_eq!(p1.widths(), vec![1, 1, 1, 1]);
}

#[test]
fn validation() {
    let f = Format::fp(4).unwrap();
    let empty = Network { format: f, input_dim: 1, activation: Activation::Relu, layers: vec![], label: None };
    assert!(matches!(empty.validate(), Err(Error::Validation(_))));
    let mut net = single(&f, Activation::Relu, &["1", "1"], vec![0, 1], 1);
    assert!(net.validate().is_ok());
    net.layers[0].neurons[0].indices = vec![0, 2];
    assert!(net.validate().is_err());
    net.layers[0].neurons[0].indices = vec![1, 0];
    assert!(net.validate().is_err());
    net.layers[0].neurons[0].indices = vec![0];
    assert!(net.validate().is_err());
    let mut net = single(&f, Activation::Relu, &["1"], vec![0], 1);
    net.layers[0].neurons[0].weights[0] = f.parse_text("inf").unwrap();
    assert!(net.validate().is_err());
    let mut two = single(&f, Activation::Relu, &["1"], vec![0], 1);
    two.layers[0].neurons.push(Neuron::new(vec![0], vec![f.one()]));
    assert!(two.validate().is_err());
}

#[test]
fn document_round_trip() {
    let f = Format::fpq(4, 5).unwrap();
    let data = Dataset::new(f, vec![vec![f.parse_text("0.25").unwrap()], vec![f.parse_text("-0.75").unwrap()]], vec![f.from_i64(3).unwrap(), f.parse_text("0.1010 × 2^-14").unwrap()]).unwrap();
    for net in [step_memorizer(&f, &data).unwrap(), relu_threshold_gadget(&f, &f.parse_text("-0.375").unwrap(), Direction::Le).unwrap().0, oscillation_net(&f)] {
        let s = net.to_json();
        let back = Network::from_json(&s).unwrap();
        assert_eq!(back, net);
        assert_eq!(back.to_json(), s);
        assert!(Network::from_json_in(&s, &Format::fpq(5, 5).unwrap()).is_err());
    }
}

#[test]
fn document_weights() {
    let f = Format::fp(2).unwrap();
    let doc = |w: &str| {
        format!(r#"{{"format":"{f}","activation":"relu","input_dim":1,"layers":[[{{"indices":[0],"weights":["{w}"]}}]]}}"#)
    };
    let net = Network::from_json(&doc("1.11 × 2^0")).unwrap();
    assert_eq!(net.layers[0].neurons[0].weights[0], f.parse_text("1.75").unwrap());
    assert!(matches!(Network::from_json(&doc("1.111 × 2^0")), Err(Error::Schema(_))));
    let extra = doc("1.00 × 2^0").replace("\"layers\"", "\"bogus\":1,\"layers\"");
    assert!(matches!(Network::from_json(&extra), Err(Error::Schema(_))));
    let wrong = doc("1.00 × 2^0").replace("\"input_dim\":1", "\"params\":7,\"input_dim\":1");
    assert!(matches!(Network::from_json(&wrong), Err(Error::Schema(_))));
}
