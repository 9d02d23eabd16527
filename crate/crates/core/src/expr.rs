//! Scalar-field expressions over the chart coordinates `x`, `y`, `z`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := primary ("^" exponent)?
//! exponent:= "-"? INT ("^" exponent)? | "(" "-"? INT ")" ("^" exponent)?
//! primary := NUMBER | IDENT | IDENT "(" expr ")" | "(" expr ")"
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`. Exponents
//! must be integer literals; chained exponents fold right-to-left.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::jet::{ChartPoint, Coord, Jet2, JetError, UnaryFn};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
    },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbound identifier `{0}`")]
    UnboundIdentifier(String),
    #[error("`epsilon` must be exactly +1 or -1, got {0}")]
    InvalidEpsilon(f64),
    #[error(transparent)]
    Jet(#[from] JetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Coord(Coord),
    Const(String),
    Neg(Box<ExprAst>),
    Binary {
        op: BinOp,
        lhs: Box<ExprAst>,
        rhs: Box<ExprAst>,
    },
    Pow {
        base: Box<ExprAst>,
        exp: i32,
    },
    Call {
        func: UnaryFn,
        arg: Box<ExprAst>,
    },
}

impl ExprAst {
    pub fn num(v: f64) -> Self {
        ExprAst::Num(v)
    }

    pub fn coord(c: Coord) -> Self {
        ExprAst::Coord(c)
    }

    pub fn binary(op: BinOp, lhs: ExprAst, rhs: ExprAst) -> Self {
        ExprAst::Binary {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn add(lhs: ExprAst, rhs: ExprAst) -> Self {
        Self::binary(BinOp::Add, lhs, rhs)
    }

    pub fn sub(lhs: ExprAst, rhs: ExprAst) -> Self {
        Self::binary(BinOp::Sub, lhs, rhs)
    }

    pub fn mul(lhs: ExprAst, rhs: ExprAst) -> Self {
        Self::binary(BinOp::Mul, lhs, rhs)
    }

    pub fn div(lhs: ExprAst, rhs: ExprAst) -> Self {
        Self::binary(BinOp::Div, lhs, rhs)
    }

    pub fn neg(inner: ExprAst) -> Self {
        ExprAst::Neg(Box::new(inner))
    }

    pub fn pow(base: ExprAst, exp: i32) -> Self {
        ExprAst::Pow {
            base: Box::new(base),
            exp,
        }
    }

    pub fn call(func: UnaryFn, arg: ExprAst) -> Self {
        ExprAst::Call {
            func,
            arg: Box::new(arg),
        }
    }

    /// True when the expression mentions no chart coordinate.
    pub fn is_coordinate_free(&self) -> bool {
        match self {
            ExprAst::Num(_) | ExprAst::Const(_) => true,
            ExprAst::Coord(_) => false,
            ExprAst::Neg(a) | ExprAst::Call { arg: a, .. } | ExprAst::Pow { base: a, .. } => {
                a.is_coordinate_free()
            }
            ExprAst::Binary { lhs, rhs, .. } => lhs.is_coordinate_free() && rhs.is_coordinate_free(),
        }
    }

    pub fn mentions(&self, c: Coord) -> bool {
        match self {
            ExprAst::Num(_) | ExprAst::Const(_) => false,
            ExprAst::Coord(d) => *d == c,
            ExprAst::Neg(a) | ExprAst::Call { arg: a, .. } | ExprAst::Pow { base: a, .. } => a.mentions(c),
            ExprAst::Binary { lhs, rhs, .. } => lhs.mentions(c) || rhs.mentions(c),
        }
    }

    /// Named constants referenced by the expression, sorted.
    pub fn identifiers(&self) -> Vec<String> {
        fn walk(e: &ExprAst, out: &mut Vec<String>) {
            match e {
                ExprAst::Const(name) => out.push(name.clone()),
                ExprAst::Num(_) | ExprAst::Coord(_) => {}
                ExprAst::Neg(a) | ExprAst::Call { arg: a, .. } | ExprAst::Pow { base: a, .. } => {
                    walk(a, out)
                }
                ExprAst::Binary { lhs, rhs, .. } => {
                    walk(lhs, out);
                    walk(rhs, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort();
        out.dedup();
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            ExprAst::Binary { op, .. } => op.precedence(),
            ExprAst::Neg(_) => 3,
            ExprAst::Pow { .. } => 4,
            _ => 5,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &ExprAst, parens: bool) -> fmt::Result {
    if parens {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{:?})", v.abs())
                } else {
                    write!(f, "{v:?}")
                }
            }
            ExprAst::Coord(c) => f.write_str(c.name()),
            ExprAst::Const(name) => f.write_str(name),
            ExprAst::Neg(inner) => {
                f.write_str("-")?;
                write_child(f, inner, inner.precedence() < 3)
            }
            ExprAst::Binary { op, lhs, rhs } => {
                let p = op.precedence();
                write_child(f, lhs, lhs.precedence() < p)?;
                write!(f, " {} ", op.symbol())?;
                write_child(f, rhs, rhs.precedence() <= p)
            }
            ExprAst::Pow { base, exp } => {
                write_child(f, base, base.precedence() <= 4)?;
                if *exp < 0 {
                    write!(f, "^({exp})")
                } else {
                    write!(f, "^{exp}")
                }
            }
            ExprAst::Call { func, arg } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Named constant values available during evaluation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Bindings {
    values: BTreeMap<String, f64>,
}

impl Bindings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, value: f64) -> Result<(), ExprError> {
        let name = name.into();
        if name == "epsilon" && value != 1.0 && value != -1.0 {
            return Err(ExprError::InvalidEpsilon(value));
        }
        self.values.insert(name, value);
        Ok(())
    }

    pub fn with(mut self, name: &str, value: f64) -> Result<Self, ExprError> {
        self.insert(name, value)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.values.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Evaluate `ast` as a second-order jet at `p`.
pub fn eval_jet(ast: &ExprAst, p: &ChartPoint, env: &Bindings) -> Result<Jet2, ExprError> {
    Ok(match ast {
        ExprAst::Num(v) => Jet2::constant(*v),
        ExprAst::Coord(c) => Jet2::seed(p, *c),
        ExprAst::Const(name) => Jet2::constant(
            env.get(name)
                .ok_or_else(|| ExprError::UnboundIdentifier(name.clone()))?,
        ),
        ExprAst::Neg(inner) => -eval_jet(inner, p, env)?,
        ExprAst::Binary { op, lhs, rhs } => {
            let a = eval_jet(lhs, p, env)?;
            let b = eval_jet(rhs, p, env)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => a.checked_div(b)?,
            }
        }
        ExprAst::Pow { base, exp } => eval_jet(base, p, env)?.powi(*exp)?,
        ExprAst::Call { func, arg } => eval_jet(arg, p, env)?.apply(*func)?,
    })
}

/// Parse an expression.
pub fn parse(text: &str) -> Result<ExprAst, ExprError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let ast = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.src.len() {
        return Err(parser.expected(&["operator", "end of input"]));
    }
    Ok(ast)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expected(&self, what: &[&str]) -> ExprError {
        ExprError::Syntax {
            offset: self.pos,
            expected: what.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ExprAst::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if self.eat(b'-') {
            Ok(ExprAst::neg(self.unary()?))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.primary()?;
        if self.eat(b'^') {
            let exp = self.exponent()?;
            Ok(ExprAst::pow(base, exp))
        } else {
            Ok(base)
        }
    }

    fn exponent(&mut self) -> Result<i32, ExprError> {
        let parenthesized = self.eat(b'(');
        let negative = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            self.pos = start;
            return Err(self.expected(&["integer literal"]));
        }
        // reject fractional or scientific exponents such as `2.5`
        if matches!(self.src.get(self.pos), Some(b'.' | b'e' | b'E')) {
            return Err(self.expected(&["integer literal"]));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        let mut n: i32 = digits.parse().map_err(|_| ExprError::Syntax {
            offset: start,
            expected: vec!["integer exponent in i32 range".into()],
        })?;
        if negative {
            n = -n;
        }
        if parenthesized && !self.eat(b')') {
            return Err(self.expected(&["`)`"]));
        }
        if self.eat(b'^') {
            let at = self.pos;
            let inner = self.exponent()?;
            let folded = u32::try_from(inner)
                .ok()
                .and_then(|k| n.checked_pow(k))
                .ok_or(ExprError::Syntax {
                    offset: at,
                    expected: vec!["non-negative integer exponent".into()],
                })?;
            n = folded;
        }
        Ok(n)
    }

    fn primary(&mut self) -> Result<ExprAst, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.expected(&["`)`", "operator"]));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.identifier(),
            _ => Err(self.expected(&["number", "identifier", "`(`", "`-`"])),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ExprError> {
        let start = self.pos;
        let src = self.src;
        let digits = |pos: &mut usize| {
            let s = *pos;
            while *pos < src.len() && src[*pos].is_ascii_digit() {
                *pos += 1;
            }
            *pos - s
        };
        let mut pos = self.pos;
        let mut n = digits(&mut pos);
        if pos < src.len() && src[pos] == b'.' {
            pos += 1;
            n += digits(&mut pos);
        }
        if n == 0 {
            return Err(self.expected(&["digit"]));
        }
        if pos < src.len() && matches!(src[pos], b'e' | b'E') {
            let mut q = pos + 1;
            if q < src.len() && matches!(src[q], b'+' | b'-') {
                q += 1;
            }
            if digits(&mut q) == 0 {
                self.pos = q;
                return Err(self.expected(&["exponent digits"]));
            }
            pos = q;
        }
        self.pos = pos;
        let text = std::str::from_utf8(&src[start..pos]).expect("ascii number");
        text.parse::<f64>()
            .map(ExprAst::Num)
            .map_err(|_| ExprError::Syntax {
                offset: start,
                expected: vec!["number".into()],
            })
    }

    fn identifier(&mut self) -> Result<ExprAst, ExprError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii identifier");
        if self.eat(b'(') {
            let func = UnaryFn::from_call_name(name).ok_or_else(|| ExprError::UnknownFunction {
                name: name.to_string(),
                offset: start,
            })?;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.expected(&["`)`", "operator"]));
            }
            return Ok(ExprAst::call(func, arg));
        }
        Ok(match Coord::from_name(name) {
            Some(c) => ExprAst::Coord(c),
            None => ExprAst::Const(name.to_string()),
        })
    }
}
