//! Shared generators for the integration tests and the acceptance runner.
#![allow(dead_code)]

use std::path::PathBuf;

use gradedfd::complexes::FreeChainComplex;
use gradedfd::expr::parse_element;
use gradedfd::ring::{matrix_mul, Element, GradedRing, RingMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn oracle() -> serde_json::Value {
    let src = std::fs::read_to_string(data_dir().join("oracle.json")).expect("oracle data");
    serde_json::from_str(&src).expect("oracle json")
}

/// `sum c_d t^d` for `lo <= d <= hi`, each term present with probability `density`.
pub fn laurent_poly(rng: &mut impl Rng, var: &str, lo: i64, hi: i64, density: f64) -> String {
    let mut terms = Vec::new();
    for d in lo..=hi {
        if rng.gen_bool(density) {
            let c = *[-2i64, -1, 1, 1, 2, 3].choose(rng).unwrap();
            terms.push(match d {
                0 => format!("{c}"),
                _ => format!("{c}*{var}^{d}"),
            });
        }
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

pub fn matrix_text(rows: &[Vec<String>]) -> String {
    let r: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
    format!("[{}]", r.join(", "))
}

pub fn random_square(rng: &mut impl Rng, k: usize, lo: i64, hi: i64, density: f64) -> String {
    let rows: Vec<Vec<String>> = (0..k).map(|_| (0..k).map(|_| laurent_poly(rng, "t", lo, hi, density)).collect()).collect();
    matrix_text(&rows)
}

/// Square matrix with invertible constant term: a unimodular rational
/// constant part plus positive-degree noise.
pub fn random_psp_unit(rng: &mut impl Rng, k: usize, hi: i64) -> String {
    loop {
        let c: Vec<Vec<i64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-1..=2)).collect()).collect();
        let m = gradedfd::QMatrix::from_fn(k, k, |i, j| gradedfd::Q::from_integer(c[i][j].into()));
        if m.inverse().is_none() {
            continue;
        }
        let rows = (0..k)
            .map(|i| (0..k).map(|j| format!("{} + {}", c[i][j], laurent_poly(rng, "t", 1, hi, 0.4))).collect())
            .collect::<Vec<Vec<String>>>();
        return matrix_text(&rows);
    }
}

pub struct ComplexShape<'a> {
    /// Candidate entries for the differentials before conjugation.
    pub pieces: &'a [&'a str],
    /// Candidate off-diagonal entries of the elementary conjugating matrices.
    pub shears: &'a [&'a str],
    pub max_levels: usize,
    pub max_rank: usize,
    pub max_degree: i64,
}

pub const LAURENT_SHAPE: ComplexShape<'static> = ComplexShape {
    pieces: &["1", "-2", "t", "1 - t", "1 + t", "t + t^2", "2 - t^2", "0"],
    shears: &["1", "-1", "2", "t", "-t"],
    max_levels: 4,
    max_rank: 3,
    max_degree: 3,
};

pub const MATRIX2_SHAPE: ComplexShape<'static> = ComplexShape {
    pieces: &["1", "t", "1 - t", "t*E_1_1 + E_2_2", "E_1_2 + E_2_1", "t*E_1_2 + 1", "0"],
    shears: &["1", "E_1_2", "t*E_2_1", "-t"],
    max_levels: 3,
    max_rank: 2,
    max_degree: 3,
};

fn identity<R: GradedRing>(ring: &R, n: usize) -> RingMatrix<R::Hom> {
    let mut m = RingMatrix::zeros(n, n);
    for k in 0..n {
        m.set(k, k, ring.one());
    }
    m
}

fn elementary<R: GradedRing>(ring: &R, n: usize, i: usize, j: usize, x: Element<R::Hom>) -> RingMatrix<R::Hom> {
    let mut m = identity(ring, n);
    m.set(i, j, x);
    m
}

/// Direct sum of one- and two-term pieces, conjugated by elementary
/// matrices `I + x E_ij` so that `d^2 = 0` survives and the entries stay in `R_+`.
pub fn random_complex<R: GradedRing>(ring: &R, rng: &mut impl Rng, shape: &ComplexShape) -> FreeChainComplex<R::Hom> {
    let e = |s: &str| parse_element(ring, s).expect("generator element");
    loop {
        let levels = rng.gen_range(2..=shape.max_levels);
        let mut ranks = vec![0usize; levels];
        let mut pairs = Vec::new();
        for _ in 0..rng.gen_range(1..=4) {
            let n = if rng.gen_bool(0.9) { rng.gen_range(1..levels) } else { rng.gen_range(0..levels) };
            if n > 0 && ranks[n] < shape.max_rank && ranks[n - 1] < shape.max_rank && rng.gen_bool(0.9) {
                pairs.push((n, ranks[n], ranks[n - 1], e(shape.pieces.choose(rng).unwrap())));
                ranks[n] += 1;
                ranks[n - 1] += 1;
            } else if ranks[n] < shape.max_rank {
                ranks[n] += 1;
            }
        }
        let mut conj = Vec::new();
        for &r in &ranks {
            let mut p = identity(ring, r);
            let mut p_inv = p.clone();
            if r > 1 {
                for _ in 0..rng.gen_range(0..=2) {
                    let mut ij: Vec<usize> = (0..r).collect();
                    ij.shuffle(rng);
                    let x = e(shape.shears.choose(rng).unwrap());
                    p = matrix_mul(ring, &p, &elementary(ring, r, ij[0], ij[1], x.clone()));
                    p_inv = matrix_mul(ring, &elementary(ring, r, ij[0], ij[1], ring.neg(&x)), &p_inv);
                }
            }
            conj.push((p, p_inv));
        }
        let mut d = Vec::new();
        for n in 1..levels {
            let mut m = RingMatrix::zeros(ranks[n - 1], ranks[n]);
            for (lvl, s, t, x) in &pairs {
                if *lvl == n {
                    m.set(*t, *s, x.clone());
                }
            }
            if ranks[n] > 0 && ranks[n - 1] > 0 {
                m = matrix_mul(ring, &matrix_mul(ring, &conj[n - 1].0, &m), &conj[n].1);
            }
            d.push((n as i64, m));
        }
        if d.iter().any(|(_, m)| m.max_degree().is_some_and(|x| x > shape.max_degree)) {
            continue;
        }
        let ranks = ranks.iter().enumerate().map(|(n, r)| (n as i64, *r));
        return FreeChainComplex::new(ring.id(), ranks, d).expect("well-formed complex");
    }
}
