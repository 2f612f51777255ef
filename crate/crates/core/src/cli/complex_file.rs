//! Text format for chain complexes:
//!
//! ```text
//! # comment
//! ring laurent
//! level 0 rank 1
//! level 1 rank 1
//! d 1 = [[t]]
//! ```
//!
//! `d n` maps level `n` to level `n-1`; a matrix may continue over several
//! lines until its brackets balance.  Undeclared differentials are zero.

use std::collections::BTreeMap;

use crate::complexes::FreeChainComplex;
use crate::expr::{parse_matrix_at, print_matrix, ParseError, Pos};
use crate::ring::GradedRing;

use super::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ComplexSpec {
    pub ring: Option<String>,
    pub ranks: BTreeMap<i64, usize>,
    /// Matrix source text with the position it starts at.
    pub d: BTreeMap<i64, (String, Pos)>,
}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, col, message: message.into() }
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("")
}

fn bracket_balance(s: &str) -> i64 {
    s.chars().map(|c| if c == '[' { 1 } else if c == ']' { -1 } else { 0 }).sum()
}

fn int<T: std::str::FromStr>(tok: Option<(usize, &str)>, line: usize, what: &str) -> Result<T, ParseError> {
    let (col, s) = tok.ok_or_else(|| err(line, 1, format!("missing {what}")))?;
    s.parse().map_err(|_| err(line, col, format!("expected {what}, found `{s}`")))
}

/// Whitespace-separated tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((line[..s].chars().count() + 1, &line[s..]));
    }
    out
}

pub fn parse_complex_text(src: &str) -> Result<ComplexSpec, ParseError> {
    let mut spec = ComplexSpec::default();
    let lines: Vec<&str> = src.lines().collect();
    let mut i = 0;
    while i < lines.len() {
        let lineno = i + 1;
        let line = strip_comment(lines[i]);
        i += 1;
        let toks = tokens(line);
        let Some(&(col, head)) = toks.first() else { continue };
        match head {
            "ring" => {
                let (c, id) = toks.get(1).copied().ok_or_else(|| err(lineno, col, "missing ring identifier"))?;
                if toks.len() > 2 {
                    return Err(err(lineno, toks[2].0, "unexpected input after ring identifier"));
                }
                if spec.ring.is_some() {
                    return Err(err(lineno, c, "ring declared twice"));
                }
                spec.ring = Some(id.to_string());
            }
            "level" => {
                let n: i64 = int(toks.get(1).copied(), lineno, "level number")?;
                if toks.get(2).map(|t| t.1) != Some("rank") {
                    return Err(err(lineno, toks.get(2).map_or(line.len() + 1, |t| t.0), "expected `rank`"));
                }
                let r: usize = int(toks.get(3).copied(), lineno, "rank")?;
                if toks.len() > 4 {
                    return Err(err(lineno, toks[4].0, "unexpected input after rank"));
                }
                if spec.ranks.insert(n, r).is_some() {
                    return Err(err(lineno, col, format!("level {n} declared twice")));
                }
            }
            "d" => {
                let eq = line.find('=').ok_or_else(|| err(lineno, col, "expected `d <level> = <matrix>`"))?;
                let left = tokens(&line[..eq]);
                let n: i64 = int(left.get(1).copied(), lineno, "level number")?;
                if left.len() != 2 {
                    return Err(err(lineno, col, "expected `d <level> = <matrix>`"));
                }
                let body = &line[eq + 1..];
                let lead = body.len() - body.trim_start().len();
                let pos = Pos { line: lineno, col: line[..eq + 1 + lead].chars().count() + 1 };
                let mut text = body.trim_start().to_string();
                let mut depth = bracket_balance(&text);
                while depth > 0 && i < lines.len() {
                    let more = strip_comment(lines[i]);
                    i += 1;
                    text.push('\n');
                    text.push_str(more);
                    depth += bracket_balance(more);
                }
                if spec.d.insert(n, (text, pos)).is_some() {
                    return Err(err(lineno, col, format!("d {n} declared twice")));
                }
            }
            other => return Err(err(lineno, col, format!("unknown directive `{other}`"))),
        }
    }
    Ok(spec)
}

/// Parses the matrices over `ring` and assembles the complex.
pub fn build_complex<R: GradedRing>(ring: &R, spec: &ComplexSpec) -> Result<FreeChainComplex<R::Hom>, CliError> {
    if let Some(id) = &spec.ring {
        if *id != ring.id() {
            return Err(CliError::Option(format!("complex is over {id} but the ring is {}", ring.id())));
        }
    }
    let mut d = Vec::new();
    for (n, (text, pos)) in &spec.d {
        d.push((*n, parse_matrix_at(ring, text, *pos)?));
    }
    Ok(FreeChainComplex::new(ring.id(), spec.ranks.clone(), d)?)
}

pub fn print_complex<R: GradedRing>(ring: &R, c: &FreeChainComplex<R::Hom>) -> String {
    let mut out = format!("ring {}\n", c.ring);
    for (n, r) in c.ranks() {
        out.push_str(&format!("level {n} rank {r}\n"));
    }
    for (n, m) in c.differentials() {
        if m.rows() > 0 && m.cols() > 0 {
            out.push_str(&format!("d {n} = {}\n", print_matrix(ring, m)));
        }
    }
    out
}
