//! Element expression grammar: parsing, evaluation to normal form, printing.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*'? unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' '-'? digits)?
//! atom   := rational | identifier | '(' expr ')'
//! ```
//! Juxtaposed single-letter generators (`BCDA`) read as a product.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::ring::{Element, GradedRing, RingError, RingMatrix};
use crate::scalar::{fmt_rational, Field};

#[derive(Error, Debug, Clone, PartialEq)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    fn err(self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(BigRational),
    Gen { name: String, exp: i64, pos: Pos },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Sym(char),
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: Pos,
}

impl<'a> Lexer<'a> {
    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.col = 1;
        } else {
            self.pos.col += 1;
        }
        Some(c)
    }

    fn digits(&mut self) -> String {
        let mut s = String::new();
        while let Some(&c) = self.chars.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            s.push(c);
            self.bump();
        }
        s
    }

    fn tokens(mut self) -> Result<Vec<(Tok, Pos)>, ParseError> {
        let mut out = Vec::new();
        while let Some(&c) = self.chars.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump();
            } else if c.is_ascii_digit() {
                let n = self.digits();
                let mut v = BigRational::from_integer(n.parse::<BigInt>().unwrap());
                if self.chars.peek() == Some(&'/') {
                    self.bump();
                    let d = self.digits();
                    if d.is_empty() {
                        return Err(self.pos.err("expected a denominator after '/'"));
                    }
                    let d: BigInt = d.parse().unwrap();
                    if d.is_zero() {
                        return Err(start.err("zero denominator"));
                    }
                    v = v / BigRational::from_integer(d);
                }
                out.push((Tok::Num(v), start));
            } else if c.is_ascii_alphabetic() || c == '_' {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if !(c.is_ascii_alphanumeric() || c == '_') {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                out.push((Tok::Ident(s), start));
            } else {
                let sym = match c {
                    '·' => '*',
                    '−' => '-',
                    '+' | '-' | '*' | '^' | '(' | ')' | '[' | ']' | ',' => c,
                    '/' => return Err(start.err("'/' is only allowed inside a rational literal")),
                    _ => return Err(start.err(format!("unexpected character '{c}'"))),
                };
                self.bump();
                out.push((Tok::Sym(sym), start));
            }
        }
        Ok(out)
    }
}

fn lex(src: &str, origin: Pos) -> Result<Vec<(Tok, Pos)>, ParseError> {
    Lexer { chars: src.chars().peekable(), pos: origin }.tokens()
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
    end: Pos,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.i).map_or(self.end, |t| t.1)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.pos().err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.term()?;
        loop {
            if self.eat('+') {
                e = Expr::Add(Box::new(e), Box::new(self.term()?));
            } else if self.eat('-') {
                e = Expr::Sub(Box::new(e), Box::new(self.term()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Sym('(')))
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') || self.starts_factor() {
                e = Expr::Mul(Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        let atom = self.atom()?;
        if !self.eat('^') {
            return Ok(atom);
        }
        let Expr::Gen { name, exp: 1, pos } = atom else {
            return Err(pos.err("'^' applies to generators only"));
        };
        let neg = self.eat('-');
        let epos = self.pos();
        let Some(Tok::Num(n)) = self.peek().cloned() else {
            return Err(epos.err("expected an integer exponent"));
        };
        self.i += 1;
        let k = n
            .is_integer()
            .then(|| n.to_integer().to_string().parse::<i64>().ok())
            .flatten()
            .filter(|k| *k <= 4096)
            .ok_or_else(|| epos.err("exponent must be a small integer"))?;
        Ok(Expr::Gen { name, exp: if neg { -k } else { k }, pos })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                Ok(Expr::Gen { name, exp: 1, pos })
            }
            Some(Tok::Sym('(')) => {
                self.i += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(t) => Err(pos.err(format!("unexpected token {t:?}"))),
            None => Err(pos.err("unexpected end of input")),
        }
    }
}

fn end_pos(src: &str, origin: Pos) -> Pos {
    let mut p = origin;
    for c in src.chars() {
        if c == '\n' {
            p.line += 1;
            p.col = 1;
        } else {
            p.col += 1;
        }
    }
    p
}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_expr_at(src, Pos { line: 1, col: 1 })
}

/// Parses `src`, reporting positions relative to `origin`.
pub fn parse_expr_at(src: &str, origin: Pos) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(src, origin)?, i: 0, end: end_pos(src, origin) };
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return Err(p.pos().err("unexpected trailing input"));
    }
    Ok(e)
}

fn eval_gen<R: GradedRing>(ring: &R, name: &str, exp: i64) -> Result<Element<R::Hom>, RingError> {
    match ring.generator(name, exp) {
        Err(RingError::UnknownGenerator(_)) if name.chars().count() > 1 => {
            let letters = ring.letters();
            if exp != 1 || !name.chars().all(|c| letters.contains(&c)) {
                return Err(RingError::UnknownGenerator(name.into()));
            }
            let mut acc = ring.one();
            for c in name.chars() {
                acc = ring.mul(&acc, &ring.generator(&c.to_string(), 1)?);
            }
            Ok(acc)
        }
        r => r,
    }
}

fn eval_at<R: GradedRing>(ring: &R, e: &Expr) -> Result<Element<R::Hom>, (RingError, Option<Pos>)> {
    Ok(match e {
        Expr::Num(q) => ring.scalar(&R::Scalar::from_rational(q)),
        Expr::Gen { name, exp, pos } => eval_gen(ring, name, *exp).map_err(|err| (err, Some(*pos)))?,
        Expr::Neg(a) => ring.neg(&eval_at(ring, a)?),
        Expr::Add(a, b) => ring.add(&eval_at(ring, a)?, &eval_at(ring, b)?),
        Expr::Sub(a, b) => ring.sub(&eval_at(ring, a)?, &eval_at(ring, b)?),
        Expr::Mul(a, b) => ring.mul(&eval_at(ring, a)?, &eval_at(ring, b)?),
    })
}

/// Canonical normal form of an expression; the result is reduced by construction.
pub fn normal_form<R: GradedRing>(ring: &R, e: &Expr) -> Result<Element<R::Hom>, RingError> {
    eval_at(ring, e).map_err(|(err, _)| err)
}

pub fn parse_element<R: GradedRing>(ring: &R, src: &str) -> Result<Element<R::Hom>, ParseError> {
    parse_element_at(ring, src, Pos { line: 1, col: 1 })
}

pub fn parse_element_at<R: GradedRing>(ring: &R, src: &str, origin: Pos) -> Result<Element<R::Hom>, ParseError> {
    let e = parse_expr_at(src, origin)?;
    eval_at(ring, &e).map_err(|(err, pos)| pos.unwrap_or(origin).err(err.to_string()))
}

/// Prints an element in the input grammar, highest degree last.
pub fn print_element<R: GradedRing>(ring: &R, x: &Element<R::Hom>) -> String {
    let mut out = String::new();
    for (d, h) in x.components() {
        for (c, word) in ring.hom_terms(h, *d) {
            if c.is_zero() {
                continue;
            }
            let q = c.to_rational();
            let (neg, mag) = match &q {
                Some(q) if q.is_negative() => (true, fmt_rational(&-q.clone())),
                Some(q) => (false, fmt_rational(q)),
                None => (false, format!("({c})")),
            };
            let unit = q.as_ref().is_some_and(|q| q.abs().is_one());
            let body = match (word.is_empty(), unit) {
                (true, _) => mag,
                (false, true) => word,
                (false, false) => format!("{mag}*{word}"),
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Parses `[[e, e], [e, e]]` into a matrix over `ring`.
pub fn parse_matrix<R: GradedRing>(ring: &R, src: &str) -> Result<RingMatrix<R::Hom>, ParseError> {
    parse_matrix_at(ring, src, Pos { line: 1, col: 1 })
}

pub fn parse_matrix_at<R: GradedRing>(ring: &R, src: &str, origin: Pos) -> Result<RingMatrix<R::Hom>, ParseError> {
    // Split on the bracket structure first, then hand each cell to the element parser.
    let mut rows: Vec<Vec<Element<R::Hom>>> = Vec::new();
    let mut depth = 0;
    let mut cell = String::new();
    let mut cell_pos = origin;
    let mut pos = origin;
    let mut row: Vec<Element<R::Hom>> = Vec::new();
    let mut closed = false;
    for c in src.chars() {
        let here = pos;
        if c == '\n' {
            pos.line += 1;
            pos.col = 1;
        } else {
            pos.col += 1;
        }
        if closed {
            if !c.is_whitespace() {
                return Err(here.err("unexpected input after matrix"));
            }
            continue;
        }
        match c {
            '[' => {
                depth += 1;
                if depth > 2 {
                    return Err(here.err("matrices nest at most two levels"));
                }
                cell.clear();
                cell_pos = pos;
            }
            ']' | ',' if depth == 2 => {
                if cell.trim().is_empty() {
                    return Err(here.err("empty matrix entry"));
                }
                row.push(parse_element_at(ring, &cell, cell_pos)?);
                cell.clear();
                cell_pos = pos;
                if c == ']' {
                    depth -= 1;
                    rows.push(std::mem::take(&mut row));
                }
            }
            ']' if depth == 1 => {
                depth = 0;
                closed = true;
            }
            ',' if depth == 1 => {}
            _ if depth == 2 => cell.push(c),
            _ if c.is_whitespace() => {}
            _ => return Err(here.err(format!("unexpected '{c}' outside a matrix row"))),
        }
    }
    if !closed {
        return Err(pos.err("unterminated matrix"));
    }
    if rows.is_empty() || rows[0].is_empty() {
        return Err(origin.err("matrix must have at least one entry"));
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return Err(origin.err("rows of different lengths"));
    }
    Ok(RingMatrix::from_rows(rows))
}

pub fn print_matrix<R: GradedRing>(ring: &R, m: &RingMatrix<R::Hom>) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|j| print_element(ring, m.get(i, j))).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leavitt_examples() {
        let l = crate::Leavitt::leavitt11();
        let nf = |s: &str| print_element(&l, &parse_element(&l, s).unwrap());
        assert_eq!(nf("B*A"), "1");
        assert_eq!(nf("A*B"), "1 - C*D");
        assert_eq!(nf("B*C*D*A"), "0");
        assert_eq!(nf("BCDA"), "0");
        assert_eq!(nf("D·C"), "1");
        assert_eq!(nf("A*B + C*D"), "1");
    }

    #[test]
    fn laurent_examples() {
        let r = crate::Laurent::laurent();
        let x = parse_element(&r, "(2 + t)*t^-1").unwrap();
        assert_eq!(print_element(&r, &x), "2*t^-1 + 1");
        assert_eq!(print_element(&r, &parse_element(&r, "-1/2 t^2 + 3/4").unwrap()), "3/4 - 1/2*t^2");
    }

    #[test]
    fn errors_carry_positions() {
        let l = crate::Leavitt::leavitt11();
        let e = parse_element(&l, "A + X").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        assert!(e.message.contains("unknown generator"));
        let e = parse_element(&l, "A^2").unwrap_err();
        assert!(e.message.contains("exponent"));
        let r = crate::Laurent::laurent();
        let e = parse_element(&r, "1 + (t").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
        let e = parse_matrix(&r, "[[1, t],\n [0, q]]").unwrap_err();
        assert_eq!((e.line, e.col), (2, 6));
    }

    #[test]
    fn matrix_round_trip() {
        let r = crate::Laurent::matrix_laurent(2);
        let m = parse_matrix(&r, "[[E_1_2*t + 1, 0], [t^-1, 2*E_2_2]]").unwrap();
        let printed = print_matrix(&r, &m);
        assert_eq!(parse_matrix(&r, &printed).unwrap(), m);
    }
}
