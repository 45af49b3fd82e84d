//! Arithmetic expressions over disk coordinates.
//!
//! Curvature data arrives as strings like `1 - 0.2*r^2` or
//! `1 + 0.1*cos(theta)`. The grammar is deliberately small: variables `x1`,
//! `x2`, `r`, `theta`, the constant `pi`, unary functions
//! `sin cos tan exp log sqrt abs`, binary `+ - * /` and right-associative `^`,
//! unary minus, and parentheses. There is no implicit multiplication; `2x1` is
//! a parse error, `2*x1` is not. Parse errors carry the byte offset of the
//! offending token.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("parse error at byte {offset}: {message}")]
pub struct ParseError {
    pub message: String,
    pub offset: usize,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-finite result in {0}")]
    NonFinite(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X1,
    X2,
    R,
    Theta,
}

impl Var {
    fn name(self) -> &'static str {
        match self {
            Var::X1 => "x1",
            Var::X2 => "x2",
            Var::R => "r",
            Var::Theta => "theta",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }
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
enum Node {
    Num(f64),
    Var(Var),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed expression over `(x1, x2, r, theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
}

/// Evaluation point carrying both Cartesian and polar coordinates.
///
/// The two views are kept consistent by the constructors: `r`/`theta` derive
/// `x1`/`x2`, so `r^2` and `x1^2 + x2^2` evaluate identically up to roundoff.
#[derive(Debug, Clone, Copy)]
pub struct EvalPoint {
    pub x1: f64,
    pub x2: f64,
    pub r: f64,
    pub theta: f64,
}

impl EvalPoint {
    pub fn polar(r: f64, theta: f64) -> EvalPoint {
        EvalPoint {
            x1: r * theta.cos(),
            x2: r * theta.sin(),
            r,
            theta,
        }
    }

    pub fn boundary(theta: f64) -> EvalPoint {
        EvalPoint::polar(1.0, theta)
    }
}

// Pratt binding powers. `^` is right-associative (its right binding power is
// below its left one); unary minus sits between `*` and `^` so that `-x^2`
// reads `-(x^2)` while `-x*y` reads `(-x)*y`.
const BP_ADD: (u8, u8) = (1, 2);
const BP_MUL: (u8, u8) = (3, 4);
const BP_NEG: u8 = 6;
const BP_POW: (u8, u8) = (8, 7);

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
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the next token and its byte offset, or `None` at end of input.
    fn next(&mut self) -> Result<Option<(Tok, usize)>, ParseError> {
        self.skip_ws();
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => {
                self.pos += 1;
                Tok::Plus
            }
            b'-' => {
                self.pos += 1;
                Tok::Minus
            }
            b'*' => {
                self.pos += 1;
                Tok::Star
            }
            b'/' => {
                self.pos += 1;
                Tok::Slash
            }
            b'^' => {
                self.pos += 1;
                Tok::Caret
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b'0'..=b'9' | b'.' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
                    let mark = self.pos;
                    self.pos += 1;
                    if self.pos < self.src.len()
                        && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
                    {
                        self.pos += 1;
                    }
                    if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                            self.pos += 1;
                        }
                    } else {
                        // Not an exponent after all (e.g. "2e" would be "2" then ident "e").
                        self.pos = mark;
                    }
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    message: format!("malformed number `{text}`"),
                    offset: start,
                })?;
                Tok::Num(value)
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                Tok::Ident(text.to_string())
            }
            _ => {
                return Err(ParseError {
                    message: format!("unexpected character `{}`", c as char),
                    offset: start,
                })
            }
        };
        Ok(Some((tok, start)))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.idx)
    }

    fn bump(&mut self) -> Option<(Tok, usize)> {
        let t = self.toks.get(self.idx).cloned();
        if t.is_some() {
            self.idx += 1;
        }
        t
    }

    fn unexpected_end(&self) -> ParseError {
        ParseError {
            message: "unexpected end of expression".to_string(),
            offset: self.end,
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Node, ParseError> {
        let (tok, offset) = self.bump().ok_or_else(|| self.unexpected_end())?;
        let mut lhs = match tok {
            Tok::Num(v) => Node::Num(v),
            Tok::Minus => Node::Neg(Box::new(self.expr(BP_NEG)?)),
            Tok::LParen => {
                let inner = self.expr(0)?;
                match self.bump() {
                    Some((Tok::RParen, _)) => inner,
                    Some((_, off)) => {
                        return Err(ParseError {
                            message: "expected `)`".to_string(),
                            offset: off,
                        })
                    }
                    None => return Err(self.unexpected_end()),
                }
            }
            Tok::Ident(name) => match name.as_str() {
                "x1" => Node::Var(Var::X1),
                "x2" => Node::Var(Var::X2),
                "r" => Node::Var(Var::R),
                "theta" => Node::Var(Var::Theta),
                "pi" => Node::Num(std::f64::consts::PI),
                other => {
                    if let Some(f) = Func::from_name(other) {
                        match self.bump() {
                            Some((Tok::LParen, _)) => {}
                            Some((_, off)) => {
                                return Err(ParseError {
                                    message: format!("expected `(` after `{other}`"),
                                    offset: off,
                                })
                            }
                            None => return Err(self.unexpected_end()),
                        }
                        let arg = self.expr(0)?;
                        match self.bump() {
                            Some((Tok::RParen, _)) => Node::Call(f, Box::new(arg)),
                            Some((_, off)) => {
                                return Err(ParseError {
                                    message: "expected `)`".to_string(),
                                    offset: off,
                                })
                            }
                            None => return Err(self.unexpected_end()),
                        }
                    } else {
                        return Err(ParseError {
                            message: format!("unknown identifier `{other}`"),
                            offset,
                        });
                    }
                }
            },
            other => {
                return Err(ParseError {
                    message: format!("unexpected token `{}`", tok_text(&other)),
                    offset,
                })
            }
        };

        loop {
            let (op, lbp, rbp) = match self.peek() {
                None => break,
                Some((Tok::Plus, _)) => (BinOp::Add, BP_ADD.0, BP_ADD.1),
                Some((Tok::Minus, _)) => (BinOp::Sub, BP_ADD.0, BP_ADD.1),
                Some((Tok::Star, _)) => (BinOp::Mul, BP_MUL.0, BP_MUL.1),
                Some((Tok::Slash, _)) => (BinOp::Div, BP_MUL.0, BP_MUL.1),
                Some((Tok::Caret, _)) => (BinOp::Pow, BP_POW.0, BP_POW.1),
                Some((Tok::RParen, _)) => break,
                Some((other, off)) => {
                    return Err(ParseError {
                        message: format!("unexpected token `{}`", tok_text(other)),
                        offset: *off,
                    })
                }
            };
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rhs = self.expr(rbp)?;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }
}

fn tok_text(tok: &Tok) -> String {
    match tok {
        Tok::Num(v) => format!("{v}"),
        Tok::Ident(s) => s.clone(),
        Tok::Plus => "+".to_string(),
        Tok::Minus => "-".to_string(),
        Tok::Star => "*".to_string(),
        Tok::Slash => "/".to_string(),
        Tok::Caret => "^".to_string(),
        Tok::LParen => "(".to_string(),
        Tok::RParen => ")".to_string(),
    }
}

impl Expression {
    pub fn parse(src: &str) -> Result<Expression, ParseError> {
        let mut lexer = Lexer::new(src);
        let mut toks = Vec::new();
        while let Some(t) = lexer.next()? {
            toks.push(t);
        }
        let mut parser = Parser {
            toks,
            idx: 0,
            end: src.len(),
        };
        let root = parser.expr(0)?;
        if let Some((tok, off)) = parser.peek() {
            return Err(ParseError {
                message: format!("unexpected token `{}`", tok_text(tok)),
                offset: *off,
            });
        }
        Ok(Expression { root })
    }

    pub fn eval(&self, p: EvalPoint) -> Result<f64, EvalError> {
        eval_node(&self.root, p)
    }
}

fn eval_node(node: &Node, p: EvalPoint) -> Result<f64, EvalError> {
    let v = match node {
        Node::Num(v) => *v,
        Node::Var(Var::X1) => p.x1,
        Node::Var(Var::X2) => p.x2,
        Node::Var(Var::R) => p.r,
        Node::Var(Var::Theta) => p.theta,
        Node::Neg(a) => -eval_node(a, p)?,
        Node::Bin(op, a, b) => {
            let x = eval_node(a, p)?;
            let y = eval_node(b, p)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => {
                    if y == 0.0 {
                        return Err(EvalError::Domain("division by zero".to_string()));
                    }
                    x / y
                }
                BinOp::Pow => {
                    if x < 0.0 && y.fract() != 0.0 {
                        return Err(EvalError::Domain(format!(
                            "negative base {x} with non-integer exponent {y}"
                        )));
                    }
                    x.powf(y)
                }
            }
        }
        Node::Call(f, a) => {
            let x = eval_node(a, p)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Tan => x.tan(),
                Func::Exp => x.exp(),
                Func::Log => {
                    if x <= 0.0 {
                        return Err(EvalError::Domain(format!("log of nonpositive value {x}")));
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x < 0.0 {
                        return Err(EvalError::Domain(format!("sqrt of negative value {x}")));
                    }
                    x.sqrt()
                }
                Func::Abs => x.abs(),
            }
        }
    };
    if !v.is_finite() {
        return Err(EvalError::NonFinite("expression evaluation"));
    }
    Ok(v)
}

// Printing precedence levels; children that bind looser than their parent get
// parenthesized, which makes print -> parse -> print a fixed point.
fn prec(node: &Node) -> u8 {
    match node {
        Node::Num(_) | Node::Var(_) | Node::Call(..) => 5,
        Node::Bin(BinOp::Pow, ..) => 4,
        Node::Neg(_) => 3,
        Node::Bin(BinOp::Mul, ..) | Node::Bin(BinOp::Div, ..) => 2,
        Node::Bin(BinOp::Add, ..) | Node::Bin(BinOp::Sub, ..) => 1,
    }
}

fn fmt_node(node: &Node, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Num(v) => write!(f, "{v}"),
        Node::Var(v) => write!(f, "{}", v.name()),
        Node::Neg(a) => {
            write!(f, "-")?;
            fmt_child(a, prec(node), f)
        }
        Node::Bin(op, a, b) => {
            let (sym, wrap_left, wrap_right) = match op {
                BinOp::Add => ("+", 1, 2),
                BinOp::Sub => ("-", 1, 2),
                BinOp::Mul => ("*", 2, 3),
                BinOp::Div => ("/", 2, 3),
                // `^` is right-associative: wrap any non-atomic left child.
                BinOp::Pow => ("^", 5, 4),
            };
            fmt_child(a, wrap_left, f)?;
            write!(f, "{sym}")?;
            // A leading `-` on the right of an additive operator is legal but
            // unreadable; parenthesize it.
            if matches!(op, BinOp::Add | BinOp::Sub) && matches!(**b, Node::Neg(_)) {
                write!(f, "(")?;
                fmt_node(b, f)?;
                write!(f, ")")
            } else {
                fmt_child(b, wrap_right, f)
            }
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            fmt_node(a, f)?;
            write!(f, ")")
        }
    }
}

fn fmt_child(child: &Node, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(child) < min_prec {
        write!(f, "(")?;
        fmt_node(child, f)?;
        write!(f, ")")
    } else {
        fmt_node(child, f)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_node(&self.root, f)
    }
}
