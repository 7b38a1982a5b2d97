//! `fpnet`: build memorizing and approximating networks, evaluate them, and run
//! the verification sweeps. Exit status 0 on success, 1 when a sweep finds a
//! counterexample, 2 on usage or configuration errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use fpnet::constructors::*;
use fpnet::dataset::Dataset;
use fpnet::lemmas::IgnoreHypothesis;
use fpnet::target::ExprTarget;
use fpnet::verifier::*;
use fpnet::{Dyadic, Float, Format, Network};

#[derive(Parser)]
#[command(name = "fpnet", version, about = "Floating-point network constructions and their exhaustive verification")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites.
    Verify(VerifyArgs),
    /// Build a network reproducing a dataset exactly.
    Memorize(MemorizeArgs),
    /// Build a network approximating a function on [0,1]^d and check its error bound.
    Approximate(ApproxArgs),
    /// Evaluate a network document at one input.
    Eval(EvalArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Lemmas,
    Oscillation,
    Gadgets,
    Memorize,
    Approx,
    Overflow,
    HardwareConformance,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Act {
    Step,
    Relu,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// fp:p=P or fpq:p=P,q=Q
    #[arg(long)]
    format: String,
    #[arg(long = "suite", value_enum, required = true)]
    suites: Vec<Suite>,
    /// Exponent window MIN:MAX; required for fp sweeps.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Random operand pairs for hardware-conformance.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    /// Network document (memorize, overflow).
    #[arg(long)]
    network: Option<PathBuf>,
    /// Dataset document (memorize).
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Target expression (approx), e.g. "x^2" or "x1*x2".
    #[arg(long)]
    function: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    lipschitz: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Input dimension for approx; defaults to the variables used.
    #[arg(long)]
    dim: Option<usize>,
    /// Scan bound for overflow on fp; fpq uses (2-u)*2^(-3+2^(q-2)).
    #[arg(long)]
    bound: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_points: usize,
    /// Write the reports as a JSON array.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct MemorizeArgs {
    #[arg(long)]
    format: String,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, value_enum)]
    activation: Act,
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct ApproxArgs {
    #[arg(long)]
    format: String,
    #[arg(long)]
    function: String,
    #[arg(long, value_enum)]
    activation: Act,
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<String>,
    #[arg(long)]
    lipschitz: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    dim: Option<usize>,
    /// Exponent window MIN:MAX for the fp bound sweep.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(clap::Args)]
struct EvalArgs {
    #[arg(long)]
    network: PathBuf,
    /// Require the network to use this format.
    #[arg(long)]
    format: Option<String>,
    /// Input coordinates in text form.
    #[arg(required = true, allow_hyphen_values = true)]
    input: Vec<String>,
}

/// Failure of a command: a usage/configuration problem, or a sweep that found counterexamples.
enum Failure {
    Config(String),
    Counterexample,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Config(e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn config<T>(msg: impl Into<String>) -> Res<T> {
    Err(Failure::Config(msg.into()))
}

fn parse_format(s: &str) -> Res<Format> {
    Ok(Format::from_str(s)?)
}

fn parse_window(s: &Option<String>) -> Res<Option<ExpWindow>> {
    let Some(s) = s else { return Ok(None) };
    let Some((a, b)) = s.split_once(':') else { return config(format!("window {s:?} is not MIN:MAX")) };
    let (a, b): (i64, i64) = (a.trim().parse()?, b.trim().parse()?);
    if a > b {
        return config(format!("window {s:?} is empty"));
    }
    Ok(Some(ExpWindow::new(a, b)))
}

/// "0.125", "1/8", "3".
fn parse_rational(s: &str) -> Res<BigRational> {
    let s = s.trim();
    if let Ok(r) = BigRational::from_str(s) {
        return Ok(r);
    }
    let bad = || Failure::Config(format!("{s:?} is not a number"));
    let (int, frac) = s.split_once('.').ok_or_else(bad)?;
    if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let n: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(n, BigInt::from(10).pow(frac.len() as u32)))
}

fn resolution(eps: &Option<String>, lip: &Option<String>, delta: &Option<String>) -> Res<(Resolution, Option<BigRational>)> {
    match (eps, lip, delta) {
        (Some(e), Some(l), None) => {
            let eps = parse_rational(e)?;
            Ok((Resolution::Lipschitz { eps: eps.clone(), lip: parse_rational(l)? }, Some(eps)))
        }
        (e, None, Some(d)) => Ok((Resolution::Delta(parse_rational(d)?), e.as_deref().map(parse_rational).transpose()?)),
        _ => config("give --eps with --lipschitz, or --delta (optionally with --eps for the bound check)"),
    }
}

fn target(src: &str, dim: Option<usize>) -> Res<ExprTarget> {
    let t = ExprTarget::parse(src)?;
    Ok(match dim {
        Some(d) => t.with_dim(d)?,
        None => t,
    })
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write(path: &Path, s: &str) -> Res<()> {
    fs::write(path, s).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn load_dataset(path: &Path, fmt: &Format) -> Res<Dataset> {
    let data = Dataset::from_json(&read(path)?)?;
    if data.format != *fmt {
        return config(format!("format mismatch: dataset is {}, expected {fmt}", data.format));
    }
    Ok(data)
}

fn load_network(path: &Path, fmt: Option<&Format>) -> Res<Network> {
    let s = read(path)?;
    Ok(match fmt {
        Some(f) => Network::from_json_in(&s, f)?,
        None => Network::from_json(&s)?,
    })
}

/// Points of [0,1]^d to check a bound on: everything for fpq, the window for fp.
fn bound_points(fmt: &Format, d: usize, window: Option<ExpWindow>) -> Res<Vec<Vec<Float>>> {
    if !fmt.is_fpq() && window.is_none() {
        return config("fp sweeps need --window MIN:MAX");
    }
    Ok(unit_box(fmt, d, window)?)
}

fn build_approximator(plan: &GridPlan, act: Act) -> Res<Network> {
    Ok(match act {
        Act::Step => step_approximator(plan)?,
        Act::Relu => relu_approximator(plan)?,
    })
}

fn run_suite(suite: Suite, fmt: &Format, a: &VerifyArgs, window: Option<ExpWindow>) -> Res<Vec<Report>> {
    let need_window = || if !fmt.is_fpq() && window.is_none() { config("fp sweeps need --window MIN:MAX") } else { Ok(()) };
    let mut out = Vec::new();
    match suite {
        Suite::Lemmas => {
            need_window()?;
            for id in LemmaId::all().into_iter().chain([LemmaId::Ignore(IgnoreHypothesis::MagnitudeBound)]) {
                out.push(run_lemma_suite(fmt, id, window)?);
            }
        }
        Suite::Oscillation => {
            if fmt.is_fpq() {
                return config("the oscillation table is stated for fp formats");
            }
            out.push(reproduce_oscillation(fmt.p())?);
            out.push(catastrophic_identity(fmt)?);
        }
        Suite::Gadgets => {
            if let Some(kappa) = fmt.kappa() {
                let k = fmt.exact(&kappa)?;
                let zs: Vec<Float> = enumerate_floats(fmt, &fmt.neg(&k), &k, None)?.into_iter().filter(|z| !z.is_zero()).collect();
                let w = fmt.exact(&fmt.gadget_window().unwrap())?;
                out.push(verify_gadgets(fmt, &zs, &enumerate_floats(fmt, &fmt.neg(&w), &w, None)?)?);
            } else {
                need_window()?;
                let all = enumerate_floats(fmt, &Float::NegInf, &Float::PosInf, window)?;
                let zs: Vec<Float> = all.iter().copied().filter(|z| !z.is_zero()).collect();
                let mut total = Report::new("gadgets", &fmt.to_string(), &format!("thresholds and inputs in {}, plus boundary chains", window.unwrap()));
                for z in &zs {
                    let mut xs = all.clone();
                    xs.extend(boundary_points(fmt, z, 3));
                    let r = verify_gadgets(fmt, std::slice::from_ref(z), &xs)?;
                    total.checked += r.checked;
                    total.passed += r.passed;
                    let room = MAX_COUNTEREXAMPLES.saturating_sub(total.counterexamples.len());
                    total.counterexamples.extend(r.counterexamples.into_iter().take(room));
                }
                out.push(total);
            }
        }
        Suite::Memorize => {
            let (Some(n), Some(d)) = (&a.network, &a.dataset) else { return config("memorize needs --network and --dataset") };
            let net = load_network(n, Some(fmt))?;
            out.push(verify_memorization(&net, &load_dataset(d, fmt)?)?);
        }
        Suite::Approx => {
            let Some(src) = &a.function else { return config("approx needs --function") };
            let t = target(src, a.dim)?;
            let (res, eps) = resolution(&a.eps, &a.lipschitz, &a.delta)?;
            let Some(eps) = eps else { return config("approx needs --eps") };
            let plan = build_grid_plan(fmt, fpnet::target::Target::dim(&t), &res, &t)?;
            let pts = bound_points(fmt, plan.d, window)?;
            for act in [Act::Step, Act::Relu] {
                out.push(verify_bound(&build_approximator(&plan, act)?, &plan, &t, &eps, &pts)?);
            }
        }
        Suite::Overflow => {
            let Some(n) = &a.network else { return config("overflow needs --network") };
            let net = load_network(n, Some(fmt))?;
            let b = match (&a.bound, fmt.gadget_window()) {
                (Some(b), _) => Dyadic::from_rational(&parse_rational(b)?).ok_or_else(|| Failure::Config(format!("bound {b} is not dyadic")))?,
                (None, Some(w)) => w,
                (None, None) => return config("overflow on fp needs --bound"),
            };
            need_window()?;
            out.push(overflow_scan(&net, &grid_points(fmt, net.input_dim, &b, a.max_points, window)?)?);
        }
        Suite::HardwareConformance => {
            if *fmt != Format::fpq(23, 8)? {
                return config("hardware-conformance compares against binary32: use fpq:p=23,q=8");
            }
            out.push(hardware_conformance(a.samples, a.seed)?);
        }
    }
    Ok(out)
}

fn finish(reports: &[Report], path: &Option<PathBuf>) -> Res<()> {
    for r in reports {
        println!("{}", r.summary());
        for n in &r.notes {
            println!("  note: {n}");
        }
    }
    if let Some(p) = path {
        let docs: Vec<serde_json::Value> = reports.iter().map(|r| serde_json::to_value(r).expect("reports serialize")).collect();
        write(p, &(serde_json::to_string_pretty(&docs)? + "\n"))?;
    }
    if reports.iter().all(Report::is_pass) {
        Ok(())
    } else {
        Err(Failure::Counterexample)
    }
}

fn verify(a: &VerifyArgs) -> Res<()> {
    let fmt = parse_format(&a.format)?;
    let window = parse_window(&a.window)?;
    let mut reports = Vec::new();
    for s in &a.suites {
        reports.extend(run_suite(*s, &fmt, a, window)?);
    }
    finish(&reports, &a.report)
}

fn memorize(a: &MemorizeArgs) -> Res<()> {
    let fmt = parse_format(&a.format)?;
    let data = load_dataset(&a.dataset, &fmt)?;
    let (n, d) = (data.len(), data.dim());
    let (net, formula, want) = match a.activation {
        Act::Step => (step_memorizer(&fmt, &data)?, format!("6·{d}·{n}+2·{n}"), 6 * d * n + 2 * n),
        Act::Relu => (relu_memorizer(&fmt, &data)?, format!("20·{d}·{n}+2·{n}"), 20 * d * n + 2 * n),
    };
    write(&a.out, &(net.to_json() + "\n"))?;
    let got = net.count_params();
    println!("params {got} {} {formula}", if got == want { "=" } else { "!=" });
    Ok(())
}

fn approximate(a: &ApproxArgs) -> Res<()> {
    let fmt = parse_format(&a.format)?;
    let t = target(&a.function, a.dim)?;
    let (res, eps) = resolution(&a.eps, &a.lipschitz, &a.delta)?;
    let window = parse_window(&a.window)?;
    let d = fpnet::target::Target::dim(&t);
    let plan = build_grid_plan(&fmt, d, &res, &t)?;
    let net = build_approximator(&plan, a.activation)?;
    write(&a.out, &(net.to_json() + "\n"))?;
    let bound = match a.activation {
        Act::Step => plan.step_param_bound(),
        Act::Relu => plan.relu_param_bound(),
    };
    println!("delta {} K {} cells {} params {} <= {bound}", plan.delta, plan.k, plan.reps.len(), net.count_params());
    let Some(eps) = eps else { return Ok(()) };
    let pts = bound_points(&fmt, d, window)?;
    finish(&[verify_bound(&net, &plan, &t, &eps, &pts)?], &a.report)
}

fn eval(a: &EvalArgs) -> Res<()> {
    let fmt = a.format.as_deref().map(parse_format).transpose()?;
    let net = load_network(&a.network, fmt.as_ref())?;
    let f = net.format;
    let x: Vec<Float> = a.input.iter().map(|s| f.parse_text(s)).collect::<Result<_, _>>()?;
    let (y, tr) = net.eval(&x)?;
    println!("{}", f.format_text(&y));
    println!("overflow_seen {}", tr.overflow_seen);
    println!("nan_seen {}", tr.nan_seen);
    println!("inexact_ops {}", tr.inexact_ops);
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::Memorize(a) => memorize(a),
        Cmd::Approximate(a) => approximate(a),
        Cmd::Eval(a) => eval(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Counterexample) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
