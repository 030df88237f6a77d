//! A small expression language for immersion components and section
//! coefficients.
//!
//! Supported syntax: real literals, declared variables, binary `+ - * / ^`,
//! unary negation, and the functions exp, log, sin, cos, sinh, cosh, sqrt,
//! atan. `^` binds tightest and is right-associative, then unary minus, then
//! `* /`, then `+ -`, all left-associative. Every input either parses to an
//! AST or yields a positioned error; undeclared identifiers are hard errors.
//!
//! Evaluation produces either a plain value or a second-order jet (value,
//! gradient, Hessian) computed analytically by forward accumulation, so the
//! geometry layer never needs finite-difference step tuning.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },
    #[error("unknown identifier '{name}' at byte {offset}; known: {}", known.join(", "))]
    UnknownIdent {
        offset: usize,
        name: String,
        known: Vec<String>,
    },
    #[error("domain error in '{subexpr}' at bytes {span_start}..{span_end}: {what}")]
    Domain {
        span_start: usize,
        span_end: usize,
        subexpr: String,
        what: String,
    },
    #[error("expected {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnOp {
    Neg,
    Exp,
    Log,
    Sin,
    Cos,
    Sinh,
    Cosh,
    Sqrt,
    Atan,
}

impl UnOp {
    fn func_name(self) -> Option<&'static str> {
        match self {
            UnOp::Neg => None,
            UnOp::Exp => Some("exp"),
            UnOp::Log => Some("log"),
            UnOp::Sin => Some("sin"),
            UnOp::Cos => Some("cos"),
            UnOp::Sinh => Some("sinh"),
            UnOp::Cosh => Some("cosh"),
            UnOp::Sqrt => Some("sqrt"),
            UnOp::Atan => Some("atan"),
        }
    }
}

const FUNCTIONS: [(&str, UnOp); 8] = [
    ("exp", UnOp::Exp),
    ("log", UnOp::Log),
    ("sin", UnOp::Sin),
    ("cos", UnOp::Cos),
    ("sinh", UnOp::Sinh),
    ("cosh", UnOp::Cosh),
    ("sqrt", UnOp::Sqrt),
    ("atan", UnOp::Atan),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

/// Parsed expression over a declared variable set. Spans are byte ranges in
/// the source, kept for positioned domain errors.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub node: Node,
    pub span: (usize, usize),
    vars: Vec<String>,
}

/// Value, gradient, and symmetric Hessian of an expression at a point.
#[derive(Debug, Clone)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet2 {
    fn constant(v: f64, p: usize) -> Jet2 {
        Jet2 {
            value: v,
            gradient: DVector::zeros(p),
            hessian: DMatrix::zeros(p, p),
        }
    }

    fn variable(idx: usize, x: f64, p: usize) -> Jet2 {
        let mut g = DVector::zeros(p);
        g[idx] = 1.0;
        Jet2 {
            value: x,
            gradient: g,
            hessian: DMatrix::zeros(p, p),
        }
    }

    fn add(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            gradient: &self.gradient + &o.gradient,
            hessian: &self.hessian + &o.hessian,
        }
    }

    fn sub(&self, o: &Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            gradient: &self.gradient - &o.gradient,
            hessian: &self.hessian - &o.hessian,
        }
    }

    fn neg(&self) -> Jet2 {
        Jet2 {
            value: -self.value,
            gradient: -&self.gradient,
            hessian: -&self.hessian,
        }
    }

    fn mul(&self, o: &Jet2) -> Jet2 {
        let outer = &self.gradient * o.gradient.transpose();
        Jet2 {
            value: self.value * o.value,
            gradient: &self.gradient * o.value + &o.gradient * self.value,
            hessian: &self.hessian * o.value + &o.hessian * self.value + &outer + outer.transpose(),
        }
    }

    /// Composition with a scalar function given value and two derivatives at
    /// self.value.
    fn chain(&self, w: f64, dw: f64, ddw: f64) -> Jet2 {
        let outer = &self.gradient * self.gradient.transpose();
        Jet2 {
            value: w,
            gradient: &self.gradient * dw,
            hessian: &self.hessian * dw + outer * ddw,
        }
    }
}

const POW_INT_EPS: f64 = 1e-9;

impl Expr {
    /// Parse `text` against the declared variable names.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Expr, ExprError> {
        let var_names: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let tokens = lex(text)?;
        let mut parser = Parser {
            tokens,
            pos: 0,
            vars: &var_names,
        };
        let expr = parser.expression()?;
        match parser.peek() {
            (Tok::Eof, _) => Ok(expr),
            (tok, offset) => Err(ExprError::Syntax {
                offset,
                found: tok.describe(),
                expected: vec!["end of input".into(), "operator".into()],
            }),
        }
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    /// Plain value at a point.
    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.vars.len() {
            return Err(ExprError::Arity {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.eval_node(point)
    }

    fn eval_node(&self, point: &[f64]) -> Result<f64, ExprError> {
        match &self.node {
            Node::Num(v) => Ok(*v),
            Node::Var(i) => Ok(point[*i]),
            Node::Unary(op, a) => {
                let x = a.eval_node(point)?;
                match op {
                    UnOp::Neg => Ok(-x),
                    UnOp::Exp => Ok(x.exp()),
                    UnOp::Log => {
                        if x <= 0.0 {
                            Err(self.domain_error("log of non-positive value"))
                        } else {
                            Ok(x.ln())
                        }
                    }
                    UnOp::Sin => Ok(x.sin()),
                    UnOp::Cos => Ok(x.cos()),
                    UnOp::Sinh => Ok(x.sinh()),
                    UnOp::Cosh => Ok(x.cosh()),
                    UnOp::Sqrt => {
                        if x < 0.0 {
                            Err(self.domain_error("sqrt of negative value"))
                        } else {
                            Ok(x.sqrt())
                        }
                    }
                    UnOp::Atan => Ok(x.atan()),
                }
            }
            Node::Binary(op, a, b) => {
                let x = a.eval_node(point)?;
                let y = b.eval_node(point)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y == 0.0 {
                            Err(self.domain_error("division by zero"))
                        } else {
                            Ok(x / y)
                        }
                    }
                    BinOp::Pow => {
                        let rounded = y.round();
                        if (y - rounded).abs() < POW_INT_EPS {
                            if x == 0.0 && rounded < 0.0 {
                                return Err(self.domain_error("zero to a negative power"));
                            }
                            Ok(x.powi(rounded as i32))
                        } else if x > 0.0 {
                            Ok(x.powf(y))
                        } else {
                            Err(self.domain_error("non-integer power of a non-positive base"))
                        }
                    }
                }
            }
        }
    }

    /// Value, gradient, and Hessian at a point, by forward accumulation.
    pub fn eval_jet2(&self, point: &[f64]) -> Result<Jet2, ExprError> {
        if point.len() != self.vars.len() {
            return Err(ExprError::Arity {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.jet_node(point, point.len())
    }

    fn jet_node(&self, point: &[f64], p: usize) -> Result<Jet2, ExprError> {
        match &self.node {
            Node::Num(v) => Ok(Jet2::constant(*v, p)),
            Node::Var(i) => Ok(Jet2::variable(*i, point[*i], p)),
            Node::Unary(op, a) => {
                let ja = a.jet_node(point, p)?;
                let x = ja.value;
                match op {
                    UnOp::Neg => Ok(ja.neg()),
                    UnOp::Exp => {
                        let w = x.exp();
                        Ok(ja.chain(w, w, w))
                    }
                    UnOp::Log => {
                        if x <= 0.0 {
                            Err(self.domain_error("log of non-positive value"))
                        } else {
                            Ok(ja.chain(x.ln(), 1.0 / x, -1.0 / (x * x)))
                        }
                    }
                    UnOp::Sin => Ok(ja.chain(x.sin(), x.cos(), -x.sin())),
                    UnOp::Cos => Ok(ja.chain(x.cos(), -x.sin(), -x.cos())),
                    UnOp::Sinh => Ok(ja.chain(x.sinh(), x.cosh(), x.sinh())),
                    UnOp::Cosh => Ok(ja.chain(x.cosh(), x.sinh(), x.cosh())),
                    UnOp::Sqrt => {
                        if x <= 0.0 {
                            Err(self.domain_error("sqrt of a non-positive value (derivative undefined)"))
                        } else {
                            let r = x.sqrt();
                            Ok(ja.chain(r, 0.5 / r, -0.25 / (r * x)))
                        }
                    }
                    UnOp::Atan => {
                        let d = 1.0 + x * x;
                        Ok(ja.chain(x.atan(), 1.0 / d, -2.0 * x / (d * d)))
                    }
                }
            }
            Node::Binary(op, a, b) => match op {
                BinOp::Add => Ok(a.jet_node(point, p)?.add(&b.jet_node(point, p)?)),
                BinOp::Sub => Ok(a.jet_node(point, p)?.sub(&b.jet_node(point, p)?)),
                BinOp::Mul => Ok(a.jet_node(point, p)?.mul(&b.jet_node(point, p)?)),
                BinOp::Div => {
                    let ja = a.jet_node(point, p)?;
                    let jb = b.jet_node(point, p)?;
                    if jb.value == 0.0 {
                        return Err(self.domain_error("division by zero"));
                    }
                    let inv = 1.0 / jb.value;
                    let recip = jb.chain(inv, -inv * inv, 2.0 * inv * inv * inv);
                    Ok(ja.mul(&recip))
                }
                BinOp::Pow => {
                    let ja = a.jet_node(point, p)?;
                    // literal integer exponents work for any base
                    if let Node::Num(y) = b.node {
                        let rounded = y.round();
                        if (y - rounded).abs() < POW_INT_EPS {
                            return self.jet_pow_int(ja, rounded as i32);
                        }
                    }
                    let jb = b.jet_node(point, p)?;
                    if ja.value <= 0.0 {
                        return Err(self.domain_error("non-integer power of a non-positive base"));
                    }
                    let x = ja.value;
                    let ln = ja.chain(x.ln(), 1.0 / x, -1.0 / (x * x));
                    let prod = jb.mul(&ln);
                    let w = prod.value.exp();
                    Ok(prod.chain(w, w, w))
                }
            },
        }
    }

    fn jet_pow_int(&self, ja: Jet2, m: i32) -> Result<Jet2, ExprError> {
        let x = ja.value;
        if x == 0.0 && m < 2 {
            if m == 0 {
                return Ok(Jet2::constant(1.0, ja.gradient.len()));
            }
            if m == 1 {
                return Ok(ja);
            }
            return Err(self.domain_error("zero to a negative power"));
        }
        let w = x.powi(m);
        let dw = f64::from(m) * x.powi(m - 1);
        let ddw = f64::from(m) * f64::from(m - 1) * x.powi(m - 2);
        Ok(ja.chain(w, dw, ddw))
    }

    fn domain_error(&self, what: &str) -> ExprError {
        ExprError::Domain {
            span_start: self.span.0,
            span_end: self.span.1,
            subexpr: self.to_string(),
            what: what.to_string(),
        }
    }

    fn prec(&self) -> u8 {
        match &self.node {
            Node::Num(v) if *v < 0.0 => 3,
            Node::Num(_) | Node::Var(_) => 5,
            Node::Unary(UnOp::Neg, _) => 3,
            Node::Unary(..) => 5,
            Node::Binary(BinOp::Pow, ..) => 4,
            Node::Binary(BinOp::Mul | BinOp::Div, ..) => 2,
            Node::Binary(BinOp::Add | BinOp::Sub, ..) => 1,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.prec() < min_prec {
                write!(f, "(")?;
                write!(f, "{e}")?;
                write!(f, ")")
            } else {
                write!(f, "{e}")
            }
        }
        match &self.node {
            Node::Num(v) => write!(f, "{v}"),
            Node::Var(i) => write!(f, "{}", self.vars[*i]),
            Node::Unary(UnOp::Neg, a) => {
                write!(f, "-")?;
                child(f, a, 3)
            }
            Node::Unary(op, a) => write!(f, "{}({a})", op.func_name().unwrap()),
            Node::Binary(op, a, b) => {
                let (sym, lp, rp) = match op {
                    BinOp::Add => ("+", 1, 1),
                    BinOp::Sub => ("-", 1, 2),
                    BinOp::Mul => ("*", 2, 2),
                    BinOp::Div => ("/", 2, 3),
                    BinOp::Pow => ("^", 5, 4),
                };
                child(f, a, lp)?;
                write!(f, "{sym}")?;
                child(f, b, rp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Tok::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Tok::Slash, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    found: format!("'{lit}'"),
                    expected: vec!["number".into()],
                })?;
                out.push((Tok::Num(v), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError::Syntax {
                    offset: i,
                    found: format!("'{c}'"),
                    expected: vec!["number".into(), "identifier".into(), "operator".into()],
                })
            }
        }
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        if let (Tok::Minus, offset) = self.peek() {
            self.bump();
            let inner = self.factor()?;
            let span = (offset, inner.span.1);
            let vars = inner.vars.clone();
            return Ok(Expr {
                node: Node::Unary(UnOp::Neg, Box::new(inner)),
                span,
                vars,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if let (Tok::Caret, _) = self.peek() {
            self.bump();
            // right-associative; unary minus allowed in the exponent
            let exponent = self.factor()?;
            let span = (base.span.0, exponent.span.1);
            let vars = base.vars.clone();
            return Ok(Expr {
                node: Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)),
                span,
                vars,
            });
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr {
                node: Node::Num(v),
                span: (offset, offset + format!("{v}").len()),
                vars: self.vars.to_vec(),
            }),
            Tok::Ident(name) => {
                if let Some((_, op)) = FUNCTIONS.iter().find(|(n, _)| *n == name) {
                    let (next, noff) = self.bump();
                    if next != Tok::LParen {
                        return Err(ExprError::Syntax {
                            offset: noff,
                            found: next.describe(),
                            expected: vec!["'('".into()],
                        });
                    }
                    let arg = self.expression()?;
                    let (close, coff) = self.bump();
                    if close != Tok::RParen {
                        return Err(ExprError::Syntax {
                            offset: coff,
                            found: close.describe(),
                            expected: vec!["')'".into()],
                        });
                    }
                    Ok(Expr {
                        node: Node::Unary(*op, Box::new(arg)),
                        span: (offset, coff + 1),
                        vars: self.vars.to_vec(),
                    })
                } else if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                    let span = (offset, offset + name.len());
                    Ok(Expr {
                        node: Node::Var(idx),
                        span,
                        vars: self.vars.to_vec(),
                    })
                } else {
                    Err(ExprError::UnknownIdent {
                        offset,
                        name,
                        known: self.vars.to_vec(),
                    })
                }
            }
            Tok::LParen => {
                let inner = self.expression()?;
                let (close, coff) = self.bump();
                if close != Tok::RParen {
                    return Err(ExprError::Syntax {
                        offset: coff,
                        found: close.describe(),
                        expected: vec!["')'".into()],
                    });
                }
                Ok(Expr {
                    span: (offset, coff + 1),
                    ..inner
                })
            }
            other => Err(ExprError::Syntax {
                offset,
                found: other.describe(),
                expected: vec![
                    "number".into(),
                    "identifier".into(),
                    "'('".into(),
                    "'-'".into(),
                ],
            }),
        }
    }
}

fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Expr {
    let span = (lhs.span.0, rhs.span.1);
    let vars = lhs.vars.clone();
    Expr {
        node: Node::Binary(op, Box::new(lhs), Box::new(rhs)),
        span,
        vars,
    }
}
