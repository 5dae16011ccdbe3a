//! Text grammar shared by curve equations, system equations and zeta
//! expressions:
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' '-'? nat)?
//! base   := nat | var | '(' expr ')'
//! ```
//!
//! Whitespace is ignored. Division and negative exponents are only
//! meaningful in zeta expressions, which admit at most one `/`.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::classpoly::ClassPoly;
use super::mpoly::MPoly;
use super::series::{RationalFn, TPoly};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].1.is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().map(|p| p.1).collect();
            out.push((Tok::Num(s.parse().unwrap()), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].1.is_ascii_alphanumeric() || chars[i].1 == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().map(|p| p.1).collect()), pos));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Sym(c), pos));
            i += 1;
        } else {
            return Err(Error::Syntax { pos, msg: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Node {
    Num(BigInt),
    Var(String, usize),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>, usize),
    Neg(Box<Node>),
    Pow(Box<Node>, i64, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    end: usize,
    divisions: Vec<usize>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|t| t.1).unwrap_or(self.end)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<Node> {
        let mut acc = if self.eat('-') {
            Node::Neg(Box::new(self.term()?))
        } else {
            self.eat('+');
            self.term()?
        };
        loop {
            if self.eat('+') {
                acc = Node::Add(Box::new(acc), Box::new(self.term()?));
            } else if self.eat('-') {
                acc = Node::Sub(Box::new(acc), Box::new(self.term()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = Node::Mul(Box::new(acc), Box::new(self.factor()?));
            } else if self.peek() == Some(&Tok::Sym('/')) {
                let pos = self.pos();
                self.at += 1;
                self.divisions.push(pos);
                acc = Node::Div(Box::new(acc), Box::new(self.factor()?), pos);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Node> {
        let base = self.base()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let pos = self.pos();
        let neg = self.eat('-');
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                let e: i64 = n
                    .try_into()
                    .map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?;
                Ok(Node::Pow(Box::new(base), if neg { -e } else { e }, pos))
            }
            _ => self.fail("expected an exponent"),
        }
    }

    fn base(&mut self) -> Result<Node> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.at += 1;
                Ok(Node::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Node::Var(name, pos))
            }
            Some(Tok::Sym('(')) => {
                self.at += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.fail("expected `)`");
                }
                Ok(e)
            }
            Some(_) => self.fail("expected a number, a variable or `(`"),
            None => self.fail("unexpected end of input"),
        }
    }
}

fn parse_tree(text: &str) -> Result<(Node, Vec<usize>)> {
    let mut p = Parser { toks: lex(text)?, at: 0, end: text.len(), divisions: Vec::new() };
    let node = p.expr()?;
    if p.at != p.toks.len() {
        return p.fail("unexpected trailing input");
    }
    Ok((node, p.divisions))
}

/// Parse an integer polynomial in the given variables.
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<MPoly> {
    let owned: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
    parse_poly_in(text, &owned)
}

pub fn parse_poly_in(text: &str, vars: &[String]) -> Result<MPoly> {
    let (node, _) = parse_tree(text)?;
    eval_poly(&node, vars)
}

/// Parse a plane curve equation in `x` and `y`.
pub fn parse_curve(text: &str) -> Result<MPoly> {
    parse_poly(text, &["x", "y"])
}

fn eval_poly(node: &Node, vars: &[String]) -> Result<MPoly> {
    let v = vars.to_vec();
    Ok(match node {
        Node::Num(n) => MPoly::constant_in(v, n.clone()),
        Node::Var(name, pos) => match vars.iter().position(|w| w == name) {
            Some(i) => MPoly::var_in(v, i),
            None => return Err(Error::UnknownSymbol { name: name.clone(), pos: *pos }),
        },
        Node::Add(a, b) => &eval_poly(a, vars)? + &eval_poly(b, vars)?,
        Node::Sub(a, b) => &eval_poly(a, vars)? - &eval_poly(b, vars)?,
        Node::Mul(a, b) => &eval_poly(a, vars)? * &eval_poly(b, vars)?,
        Node::Neg(a) => -&eval_poly(a, vars)?,
        Node::Div(_, _, pos) => {
            return Err(Error::Syntax { pos: *pos, msg: "division is not allowed in polynomials".into() })
        }
        Node::Pow(a, e, pos) => {
            if *e < 0 {
                return Err(Error::Syntax { pos: *pos, msg: "negative exponent in a polynomial".into() });
            }
            eval_poly(a, vars)?.pow(*e as u32)
        }
    })
}

/// Parse a zeta expression in `L` and `t` into a rational function.
pub fn parse_lt_expr(text: &str) -> Result<RationalFn> {
    let (node, divisions) = parse_tree(text)?;
    if let Some(&pos) = divisions.get(1) {
        return Err(Error::Syntax { pos, msg: "only a single division is allowed".into() });
    }
    eval_lt(&node)
}

fn eval_lt(node: &Node) -> Result<RationalFn> {
    Ok(match node {
        Node::Num(n) => RationalFn::polynomial(TPoly::constant(ClassPoly::from_int(n.clone()))),
        Node::Var(name, pos) => match name.as_str() {
            "L" => RationalFn::polynomial(TPoly::constant(ClassPoly::l_pow(1))),
            "t" => RationalFn::polynomial(TPoly::new(vec![ClassPoly::zero(), ClassPoly::one()])),
            _ => return Err(Error::UnknownSymbol { name: name.clone(), pos: *pos }),
        },
        Node::Add(a, b) => eval_lt(a)?.add(&eval_lt(b)?),
        Node::Sub(a, b) => eval_lt(a)?.sub(&eval_lt(b)?),
        Node::Mul(a, b) => eval_lt(a)?.mul(&eval_lt(b)?),
        Node::Neg(a) => eval_lt(a)?.neg(),
        Node::Div(a, b, pos) => {
            let d = eval_lt(b)?;
            if d.num().is_zero() {
                return Err(Error::Syntax { pos: *pos, msg: "division by zero".into() });
            }
            eval_lt(a)?.div(&d).map_err(|_| Error::Syntax {
                pos: *pos,
                msg: "divisor has zero constant term in t".into(),
            })?
        }
        Node::Pow(a, e, pos) => eval_lt(a)?.pow(*e).ok_or_else(|| Error::Syntax {
            pos: *pos,
            msg: "negative power of an expression with zero constant term in t".into(),
        })?,
    })
}
