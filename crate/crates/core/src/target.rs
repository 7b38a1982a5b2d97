//! Target functions f*: exact rational expressions, or black boxes returning
//! certified enclosures, plus correctly rounded evaluation.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::float::Float;
use crate::format::Format;

/// f* : [0,1]^d → ℝ, evaluated at exact rational points.
pub trait Target: Send + Sync {
    fn dim(&self) -> usize;

    /// An interval [lo, hi] containing f*(x), of relative width about 2^{-prec}.
    /// Exact targets return lo = hi.
    fn enclose(&self, x: &[BigRational], prec: u32) -> Result<(BigRational, BigRational)>;

    fn describe(&self) -> String;
}

/// ⟦f*(x)⟧ with the rounding decision certified at 2p+64 bits.
pub fn certified_round(fmt: &Format, f: &dyn Target, x: &[Float]) -> Result<(Float, BigRational, BigRational)> {
    let xs: Vec<BigRational> = x
        .iter()
        .map(|v| fmt.value(v).map(|d| d.to_rational()).ok_or_else(|| Error::Domain("non-finite input".into())))
        .collect::<Result<_>>()?;
    let (lo, hi) = f.enclose(&xs, 2 * fmt.p() + 64)?;
    let (a, b) = (fmt.round_rational(&lo), fmt.round_rational(&hi));
    if a != b {
        return Err(Error::OracleFailure(format!(
            "{} at {:?}: enclosure rounds to both {} and {}",
            f.describe(),
            x.iter().map(|v| fmt.format_text(v)).collect::<Vec<_>>(),
            fmt.format_text(&a),
            fmt.format_text(&b)
        )));
    }
    Ok((a, lo, hi))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: &[BigRational]) -> Result<BigRational> {
        use Expr::*;
        Ok(match self {
            Num(r) => r.clone(),
            Var(i) => x.get(*i).cloned().ok_or_else(|| Error::ShapeMismatch(format!("variable x{} unbound", i + 1)))?,
            Neg(a) => -a.eval(x)?,
            Add(a, b) => a.eval(x)? + b.eval(x)?,
            Sub(a, b) => a.eval(x)? - b.eval(x)?,
            Mul(a, b) => a.eval(x)? * b.eval(x)?,
            Div(a, b) => {
                let d = b.eval(x)?;
                if d.is_zero() {
                    return Err(Error::Domain("division by zero".into()));
                }
                a.eval(x)? / d
            }
            Pow(a, n) => num_traits::pow(a.eval(x)?, *n as usize),
            Abs(a) => a.eval(x)?.abs(),
            Min(a, b) => a.eval(x)?.min(b.eval(x)?),
            Max(a, b) => a.eval(x)?.max(b.eval(x)?),
        })
    }

    /// Number of variables referenced (highest index + 1).
    pub fn arity(&self) -> usize {
        use Expr::*;
        match self {
            Num(_) => 0,
            Var(i) => i + 1,
            Neg(a) | Pow(a, _) | Abs(a) => a.arity(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Min(a, b) | Max(a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn parse(s: &str) -> Result<Expr> {
        let toks = lex(s)?;
        let mut p = Parser { toks, pos: 0 };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(e)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            let lit: String = cs[st..i].iter().collect();
            out.push(Tok::Num(decimal(&lit)?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

fn decimal(lit: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("bad number {lit:?}"));
    let (int, frac) = lit.split_once('.').unwrap_or((lit, ""));
    if frac.contains('.') || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().map_err(|_| bad())?;
    Ok(BigRational::new(n, num_traits::pow(BigInt::from(10), frac.len())))
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut e = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let r = self.term()?;
            e = if c == '+' { Expr::Add(e.into(), r.into()) } else { Expr::Sub(e.into(), r.into()) };
        }
        Ok(e)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let r = self.unary()?;
            e = if c == '*' { Expr::Mul(e.into(), r.into()) } else { Expr::Div(e.into(), r.into()) };
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(self.unary()?.into()))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let Some(Tok::Num(n)) = self.toks.get(self.pos).cloned() else {
                return Err(Error::Parse("exponent must be a non-negative integer literal".into()));
            };
            self.pos += 1;
            let k: u32 = n
                .is_integer()
                .then(|| n.to_integer().try_into().ok())
                .flatten()
                .ok_or_else(|| Error::Parse("exponent must be a non-negative integer literal".into()))?;
            return Ok(Expr::Pow(base.into(), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        let tok = self.toks.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(r) => Ok(Expr::Num(r)),
            Tok::Op('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if self.peek_op() == Some('(') {
                    self.pos += 1;
                    let a = self.expr()?;
                    let e = match name.as_str() {
                        "abs" => Expr::Abs(a.into()),
                        "min" | "max" => {
                            self.expect(',')?;
                            let b = self.expr()?;
                            if name == "min" {
                                Expr::Min(a.into(), b.into())
                            } else {
                                Expr::Max(a.into(), b.into())
                            }
                        }
                        _ => return Err(Error::Parse(format!("unknown function {name}"))),
                    };
                    self.expect(')')?;
                    return Ok(e);
                }
                if name == "x" {
                    return Ok(Expr::Var(0));
                }
                match name.strip_prefix('x').and_then(|n| n.trim_start_matches('_').parse::<usize>().ok()) {
                    Some(i) if i >= 1 => Ok(Expr::Var(i - 1)),
                    _ => Err(Error::Parse(format!("unknown identifier {name}"))),
                }
            }
            Tok::Op(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
        }
    }
}

/// An exactly evaluable expression target.
#[derive(Clone, Debug)]
pub struct ExprTarget {
    expr: Expr,
    src: String,
    dim: usize,
}

impl ExprTarget {
    pub fn parse(src: &str) -> Result<Self> {
        let expr = Expr::parse(src)?;
        let dim = expr.arity().max(1);
        Ok(ExprTarget { expr, src: src.trim().to_string(), dim })
    }

    /// Declare a larger input dimension than the variables used.
    pub fn with_dim(mut self, d: usize) -> Result<Self> {
        if d < self.expr.arity() {
            return Err(Error::ShapeMismatch(format!("{} uses {} variables", self.src, self.expr.arity())));
        }
        self.dim = d.max(1);
        Ok(self)
    }

    pub fn eval(&self, x: &[BigRational]) -> Result<BigRational> {
        self.expr.eval(x)
    }
}

impl Target for ExprTarget {
    fn dim(&self) -> usize {
        self.dim
    }

    fn enclose(&self, x: &[BigRational], _prec: u32) -> Result<(BigRational, BigRational)> {
        let v = self.expr.eval(x)?;
        Ok((v.clone(), v))
    }

    fn describe(&self) -> String {
        self.src.clone()
    }
}

type EncloseFn = dyn Fn(&[BigRational], u32) -> (BigRational, BigRational) + Send + Sync;

/// A black-box target supplying its own enclosures.
#[derive(Clone)]
pub struct BlackBox {
    name: String,
    dim: usize,
    f: Arc<EncloseFn>,
}

impl BlackBox {
    pub fn new(name: &str, dim: usize, f: impl Fn(&[BigRational], u32) -> (BigRational, BigRational) + Send + Sync + 'static) -> Self {
        BlackBox { name: name.into(), dim, f: Arc::new(f) }
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BlackBox({})", self.name)
    }
}

impl Target for BlackBox {
    fn dim(&self) -> usize {
        self.dim
    }

    fn enclose(&self, x: &[BigRational], prec: u32) -> Result<(BigRational, BigRational)> {
        let (lo, hi) = (self.f)(x, prec);
        if lo > hi {
            return Err(Error::OracleFailure(format!("{}: empty enclosure", self.name)));
        }
        Ok((lo, hi))
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::ratio;

    #[test]
    fn parses_and_evaluates() {
        let t = ExprTarget::parse("x^2").unwrap();
        assert_eq!(t.eval(&[ratio(3, 4)]).unwrap(), ratio(9, 16));
        let t = ExprTarget::parse("x1*x2").unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.eval(&[ratio(1, 2), ratio(3, 4)]).unwrap(), ratio(3, 8));
        let t = ExprTarget::parse("abs(2*x - 1)").unwrap();
        assert_eq!(t.eval(&[ratio(1, 4)]).unwrap(), ratio(1, 2));
        let t = ExprTarget::parse("max(x, 0.25) - min(x, 1/3)").unwrap();
        assert_eq!(t.eval(&[ratio(1, 8)]).unwrap(), ratio(1, 8));
        assert!(ExprTarget::parse("sin(x)").is_err());
        assert!(ExprTarget::parse("x +").is_err());
        assert!(ExprTarget::parse("x^0.5").is_err());
    }

    #[test]
    fn certified_round_flags_undecided_ties() {
        let f = Format::fpq(4, 5).unwrap();
        // enclosure straddling the midpoint 1 + 2^-5 between 1 and 1 + 2^-4
        let bb = BlackBox::new("straddle", 1, |_, _| (ratio(1, 1), ratio(17, 16)));
        let x = [f.one()];
        assert!(matches!(certified_round(&f, &bb, &x), Err(Error::OracleFailure(_))));
        let exact = ExprTarget::parse("x/3").unwrap();
        let (r, _, _) = certified_round(&f, &exact, &x).unwrap();
        assert_eq!(r, f.round_rational(&ratio(1, 3)));
    }
}
