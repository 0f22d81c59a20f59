//! A small expression language for functions on (-1, 1).
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'w' | 'pi' | 'e' | '(' expr ')'
//!         | fn '(' expr ')' | 'chi' '(' expr ',' expr ')'
//! fn     := log | exp | sqrt | abs | sin | cos
//! ```
//!
//! `w` is `sqrt(1 - x^2)` and `chi(a, b)` the characteristic function of
//! `[a, b)`; its bounds must be constants with `-1 <= a < b <= 1`.
//! Differences `1 - x`, `1 + x` and `x - c` are evaluated without
//! cancellation, so logarithmic profiles stay accurate next to their
//! singular points.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use crate::error::{FhtError, Result};
use crate::function::FunctionHandle;
use crate::point::Abscissa;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sqrt,
    Abs,
    Sin,
    Cos,
}

impl Func {
    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Log => v.ln(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(f64),
    X,
    W,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// Characteristic function of `[a, b)`.
    Chi(f64, f64),
}

impl Node {
    fn constant(&self) -> Option<f64> {
        match self {
            Node::Num(c) => Some(*c),
            Node::X | Node::W | Node::Chi(..) => None,
            Node::Neg(a) => a.constant().map(|v| -v),
            Node::Add(a, b) => Some(a.constant()? + b.constant()?),
            Node::Sub(a, b) => Some(a.constant()? - b.constant()?),
            Node::Mul(a, b) => Some(a.constant()? * b.constant()?),
            Node::Div(a, b) => Some(a.constant()? / b.constant()?),
            Node::Pow(a, b) => Some(a.constant()?.powf(b.constant()?)),
            Node::Call(f, a) => Some(f.apply(a.constant()?)),
        }
    }

    /// `x - c` if the node is an affine shift of `x`, as `(sign, c)` with
    /// value `sign * (x - c)`.
    fn shift(&self) -> Option<(f64, f64)> {
        match self {
            Node::X => Some((1.0, 0.0)),
            Node::Sub(a, b) => match (&**a, &**b) {
                (Node::X, k) => k.constant().map(|c| (1.0, c)),
                (k, Node::X) => k.constant().map(|c| (-1.0, c)),
                _ => None,
            },
            Node::Add(a, b) => match (&**a, &**b) {
                (Node::X, k) | (k, Node::X) => k.constant().map(|c| (1.0, -c)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn eval(&self, p: Abscissa) -> f64 {
        if let Some((sign, c)) = self.shift() {
            let d = if c == 1.0 {
                -p.one_minus()
            } else if c == -1.0 {
                p.one_plus()
            } else {
                p.sub(c)
            };
            return sign * d;
        }
        match self {
            Node::Num(c) => *c,
            Node::X => p.value(),
            Node::W => p.weight(),
            Node::Neg(a) => -a.eval(p),
            Node::Add(a, b) => a.eval(p) + b.eval(p),
            Node::Sub(a, b) => a.eval(p) - b.eval(p),
            Node::Mul(a, b) => {
                let u = a.eval(p);
                // chi(...) * (something singular) is zero off the support
                if u == 0.0 && matches!(**a, Node::Chi(..)) {
                    return 0.0;
                }
                let v = b.eval(p);
                if v == 0.0 && matches!(**b, Node::Chi(..)) {
                    return 0.0;
                }
                u * v
            }
            Node::Div(a, b) => a.eval(p) / b.eval(p),
            Node::Pow(a, b) => {
                let base = a.eval(p);
                let ex = b.eval(p);
                if ex == ex.round() && ex.abs() <= 64.0 {
                    base.powi(ex as i32)
                } else {
                    base.powf(ex)
                }
            }
            Node::Call(f, a) => f.apply(a.eval(p)),
            Node::Chi(a, b) => {
                let x = p.value();
                let lo = *a <= -1.0 || p.sub(*a) >= 0.0;
                let hi = *b >= 1.0 || p.sub(*b) < 0.0;
                if lo && hi && x.is_finite() {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn contains_w_denominator(&self) -> bool {
        match self {
            Node::Div(a, b) => matches!(**b, Node::W) || a.contains_w_denominator() || b.contains_w_denominator(),
            Node::Pow(a, b) => {
                (matches!(**a, Node::W) && b.constant().is_some_and(|c| c < 0.0))
                    || a.contains_w_denominator()
            }
            Node::Neg(a) | Node::Call(_, a) => a.contains_w_denominator(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
                a.contains_w_denominator() || b.contains_w_denominator()
            }
            _ => false,
        }
    }

    /// A node equal to `self * w`, with `/ w` factors cancelled where the
    /// structure allows it.
    fn times_w(&self) -> Node {
        match self {
            Node::Div(a, b) if matches!(**b, Node::W) => (**a).clone(),
            Node::Neg(a) => Node::Neg(Box::new(a.times_w())),
            Node::Add(a, b) => Node::Add(Box::new(a.times_w()), Box::new(b.times_w())),
            Node::Sub(a, b) => Node::Sub(Box::new(a.times_w()), Box::new(b.times_w())),
            Node::Mul(a, b) if a.contains_w_denominator() => Node::Mul(Box::new(a.times_w()), b.clone()),
            Node::Mul(a, b) if b.contains_w_denominator() => Node::Mul(a.clone(), Box::new(b.times_w())),
            Node::Div(a, b) if a.contains_w_denominator() => Node::Div(Box::new(a.times_w()), b.clone()),
            other => Node::Mul(Box::new(other.clone()), Box::new(Node::W)),
        }
    }

    /// Collects jump locations, interior singular points and whether the
    /// endpoints may be singular.
    fn singularities(&self, jumps: &mut Vec<f64>, singular: &mut Vec<f64>, kinks: &mut Vec<f64>, endpoint: &mut bool) {
        let mark_zero = |arg: &Node, singular: &mut Vec<f64>, endpoint: &mut bool| {
            if let Some((_, c)) = arg.shift() {
                if c.abs() < 1.0 {
                    singular.push(c);
                } else {
                    *endpoint = true;
                }
            } else if arg.constant().is_none() {
                *endpoint = true;
            }
        };
        match self {
            Node::Num(_) | Node::X => {}
            Node::W => *endpoint = true,
            Node::Chi(a, b) => jumps.extend([*a, *b]),
            Node::Neg(a) => a.singularities(jumps, singular, kinks, endpoint),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
                a.singularities(jumps, singular, kinks, endpoint);
                b.singularities(jumps, singular, kinks, endpoint);
            }
            Node::Div(a, b) => {
                a.singularities(jumps, singular, kinks, endpoint);
                b.singularities(jumps, singular, kinks, endpoint);
                let inner = match &**b {
                    Node::Call(Func::Abs, x) => &**x,
                    other => other,
                };
                mark_zero(inner, singular, endpoint);
            }
            Node::Pow(a, b) => {
                a.singularities(jumps, singular, kinks, endpoint);
                b.singularities(jumps, singular, kinks, endpoint);
                let integral_power = b.constant().is_some_and(|c| c >= 0.0 && c == c.round());
                if !integral_power {
                    mark_zero(a, singular, endpoint);
                }
            }
            Node::Call(f, a) => {
                a.singularities(jumps, singular, kinks, endpoint);
                if *f == Func::Abs {
                    match a.shift() {
                        Some((_, c)) if c.abs() < 1.0 => kinks.push(c),
                        Some(_) => {}
                        None if a.constant().is_none() => *endpoint = true,
                        None => {}
                    }
                }
                if matches!(f, Func::Log | Func::Sqrt) {
                    let inner = match &**a {
                        Node::Call(Func::Abs, x) => &**x,
                        other => other,
                    };
                    mark_zero(inner, singular, endpoint);
                    if let Node::Div(n, d) = inner {
                        mark_zero(n, singular, endpoint);
                        mark_zero(d, singular, endpoint);
                    }
                }
            }
        }
    }
}

/// A parsed expression.
#[derive(Clone, Debug)]
pub struct FunctionExpr {
    pub source: String,
    pub root: Node,
}

impl FunctionExpr {
    pub fn parse(source: &str) -> Result<FunctionExpr> {
        let mut p = Parser::new(source);
        let root = p.expr()?;
        p.skip_ws();
        if let Some(c) = p.peek() {
            return Err(p.error(format!("unexpected character {c:?}")));
        }
        Ok(FunctionExpr {
            source: source.to_string(),
            root,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.root.eval(Abscissa::new(x))
    }

    /// The function handle with its inferred singularity tag.
    pub fn to_handle(&self) -> FunctionHandle {
        let (mut jumps, mut singular, mut kinks, mut endpoint) = (Vec::new(), Vec::new(), Vec::new(), false);
        self.root.singularities(&mut jumps, &mut singular, &mut kinks, &mut endpoint);
        let name = self.source.clone();
        let handle = if self.root.contains_w_denominator() {
            let num = Arc::new(self.root.times_w());
            FunctionHandle::over_weight(name, move |p| num.eval(p))
        } else {
            let root = Arc::new(self.root.clone());
            FunctionHandle::precise(name, move |p| root.eval(p)).with_endpoint_singular(endpoint)
        };
        handle
            .with_breakpoints(jumps.into_iter().filter(|c| c.abs() < 1.0))
            .with_singular_points(singular)
            .with_kinks(kinks)
    }
}

/// Parses `source` into a function handle.
pub fn parse_function(source: &str) -> Result<FunctionHandle> {
    Ok(FunctionExpr::parse(source)?.to_handle())
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, pos: 0 }
    }

    fn error(&self, message: impl Into<String>) -> FhtError {
        self.error_at(self.pos, message)
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> FhtError {
        let before = &self.src[..pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        FhtError::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(self.error(format!("expected {c:?}, found {found:?}"))),
                None => Err(self.error(format!("expected {c:?}, found end of input"))),
            }
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat('-') {
            Ok(Node::Neg(Box::new(self.unary()?)))
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat('^') {
            Ok(Node::Pow(Box::new(base), Box::new(self.unary()?)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Node> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let ident = &self.src[start..self.pos];
                match ident {
                    "x" => Ok(Node::X),
                    "w" => Ok(Node::W),
                    "pi" => Ok(Node::Num(PI)),
                    "e" => Ok(Node::Num(E)),
                    "chi" => self.chi(start),
                    _ => match Func::from_name(ident) {
                        Some(f) => {
                            self.expect('(')?;
                            let arg = self.expr()?;
                            self.expect(')')?;
                            Ok(Node::Call(f, Box::new(arg)))
                        }
                        None => Err(self.error_at(start, format!("unknown identifier {ident:?}"))),
                    },
                }
            }
            Some(c) => Err(self.error(format!("unexpected character {c:?}"))),
        }
    }

    fn chi(&mut self, start: usize) -> Result<Node> {
        self.expect('(')?;
        let a_pos = self.pos;
        let a = self.expr()?;
        self.expect(',')?;
        let b_pos = self.pos;
        let b = self.expr()?;
        self.expect(')')?;
        let a = a
            .constant()
            .ok_or_else(|| self.error_at(a_pos, "chi bounds must be constants"))?;
        let b = b
            .constant()
            .ok_or_else(|| self.error_at(b_pos, "chi bounds must be constants"))?;
        if !(-1.0 <= a && a < b && b <= 1.0) {
            return Err(self.error_at(start, format!("chi({a},{b}) needs -1 <= a < b <= 1")));
        }
        Ok(Node::Chi(a, b))
    }

    fn number(&mut self) -> Result<Node> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = self.pos;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let v: f64 = text
            .parse()
            .map_err(|_| self.error_at(start, format!("malformed number {text:?}")))?;
        self.pos = end;
        Ok(Node::Num(v))
    }
}
