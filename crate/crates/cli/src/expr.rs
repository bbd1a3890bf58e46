//! Amplitude expressions over `k`, `theta`, `phi` and the scale `a`.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := atom ('^' unary)?
//! atom    := number | constant | variable | function '(' sum ')' | '(' sum ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-k^2`
//! is `-(k^2)`. Evaluation is complex throughout; `i` is the imaginary unit.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use photon_ur::momentum::{Descriptor, ZeroAmplitude};
use photon_ur::{Amplitude, HelicityAmplitudes, SphericalPoint};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown identifier \"{name}\" at position {position}")]
    UnknownIdentifier { name: String, position: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    K,
    Theta,
    Phi,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    I,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::K => "k",
            Var::Theta => "theta",
            Var::Phi => "phi",
            Var::A => "a",
        }
    }
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Fully parenthesized, so printing and reparsing gives the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(x) => write!(f, "{x}"),
            Expr::Pi => f.write_str("pi"),
            Expr::I => f.write_str("i"),
            Expr::Var(v) => f.write_str(v.name()),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Env {
    pub k: f64,
    pub theta: f64,
    pub phi: f64,
    pub a: f64,
}

impl Expr {
    pub fn eval(&self, env: &Env) -> Complex64 {
        match self {
            Expr::Num(x) => Complex64::from(*x),
            Expr::Pi => Complex64::from(PI),
            Expr::I => Complex64::i(),
            Expr::Var(v) => Complex64::from(match v {
                Var::K => env.k,
                Var::Theta => env.theta,
                Var::Phi => env.phi,
                Var::A => env.a,
            }),
            // `0 − x` keeps a real operand's imaginary part at +0, so
            // `sqrt(-4)` lands on the upper side of the branch cut.
            Expr::Neg(e) => Complex64::default() - e.eval(env),
            Expr::Bin(op, l, r) => {
                let (x, y) = (l.eval(env), r.eval(env));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => power(x, y),
                }
            }
            Expr::Call(func, e) => {
                let x = e.eval(env);
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Sqrt => x.sqrt(),
                }
            }
        }
    }
}

/// Small integer exponents by repeated multiplication, which is exact for
/// negative real bases; everything else through the principal branch.
fn power(x: Complex64, y: Complex64) -> Complex64 {
    if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() <= 64.0 {
        let mut n = y.re.abs() as u32;
        let (mut base, mut acc) = (x, Complex64::from(1.0));
        while n > 0 {
            if n & 1 == 1 {
                acc *= base;
            }
            base *= base;
            n >>= 1;
        }
        if y.re < 0.0 {
            acc.inv()
        } else {
            acc
        }
    } else {
        x.powc(y)
    }
}

pub fn parse(source: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { chars: source.chars().collect(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    match p.peek() {
        None => Ok(e),
        Some(c) => Err(p.error(format!("unexpected '{c}'"))),
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax { position: self.pos, message: message.into() }
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

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error("expected an expression")),
            Some('(') => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        let digits = |p: &mut Parser| {
            while p.peek().is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
        };
        digits(self);
        if self.peek() == Some('.') {
            self.pos += 1;
            digits(self);
        }
        // An exponent needs at least one digit, so `2e` stays a syntax error
        // at the `e` rather than swallowing an identifier.
        if matches!(self.peek(), Some('e' | 'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                digits(self);
            } else {
                self.pos = mark;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Expr::Num)
            .ok_or(ExprError::Syntax { position: start, message: format!("invalid number '{text}'") })
    }

    fn identifier(&mut self) -> Result<Expr, ExprError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let func = match name.as_str() {
            "k" => return Ok(Expr::Var(Var::K)),
            "theta" => return Ok(Expr::Var(Var::Theta)),
            "phi" => return Ok(Expr::Var(Var::Phi)),
            "a" => return Ok(Expr::Var(Var::A)),
            "pi" => return Ok(Expr::Pi),
            "i" => return Ok(Expr::I),
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            _ => return Err(ExprError::UnknownIdentifier { name, position: start }),
        };
        if !self.eat('(') {
            return Err(self.error(format!("expected '(' after {name}")));
        }
        let arg = self.sum()?;
        if !self.eat(')') {
            return Err(self.error("expected ')'"));
        }
        Ok(Expr::Call(func, Box::new(arg)))
    }
}

/// A parsed expression bound to a scale `a`; partials by finite differences.
pub struct ExprAmplitude {
    expr: Expr,
    a: f64,
}

impl ExprAmplitude {
    pub fn new(expr: Expr, a: f64) -> Self {
        Self { expr, a }
    }
}

impl Amplitude for ExprAmplitude {
    fn value(&self, p: SphericalPoint) -> Complex64 {
        self.expr.eval(&Env { k: p.k, theta: p.theta, phi: p.phi, a: self.a })
    }
}

/// Both helicity components from source text; an absent component is zero.
pub fn expression_amplitudes(
    plus: Option<&str>,
    minus: Option<&str>,
    a: f64,
) -> Result<HelicityAmplitudes, ExprError> {
    let component = |src: Option<&str>| -> Result<Arc<dyn Amplitude>, ExprError> {
        Ok(match src {
            Some(s) => Arc::new(ExprAmplitude::new(parse(s)?, a)),
            None => Arc::new(ZeroAmplitude),
        })
    };
    Ok(HelicityAmplitudes::new(
        component(plus)?,
        component(minus)?,
        Descriptor::new("expression").with("a", a),
    ))
}
