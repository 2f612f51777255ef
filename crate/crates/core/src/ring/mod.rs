//! Graded rings, their elements, and the partition-of-unity machinery.
//!
//! A ring is a value implementing [`GradedRing`]; elements are plain data
//! ([`Element`]) and all arithmetic goes through the ring, so the same
//! element type serves every backend.

mod any;
mod leavitt;
mod matrix_laurent;
mod partition;
mod tensor;
mod word;

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

pub use any::AnyRing;
pub use leavitt::{leavitt_q_iso, QIsoDirection, QIsoDomain};
pub use matrix_laurent::MatrixLaurent;
pub use partition::{
    check_strongly_graded, compose_partitions, partition_for_degree, trivial_partition, verify_partition, PartitionCheck,
    PartitionOfUnity,
    StrongGradingVerdict,
};
pub use tensor::{bimodule_iso_check, BalancedTensor, BimoduleReport, TensorCache};
pub use word::{Rule, Strategy, Word, WordAlgebra};

use crate::scalar::Field;

pub type Degree = i64;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Tier {
    Symbolic,
    FiniteType,
}

#[derive(Error, Debug, Clone, PartialEq)]
pub enum RingError {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("rewrite rule {0} is not homogeneous")]
    NonHomogeneousRule(String),
    #[error("partitions belong to different rings ({0} vs {1})")]
    RingMismatch(String, String),
    #[error("ring {0} is not strongly graded")]
    NotStronglyGraded(String),
    #[error("ring {0} is not of finite type")]
    NotFiniteType(String),
    #[error("degree out of range: {0}")]
    DegreeOutOfRange(String),
    #[error("unknown ring `{0}`")]
    UnknownRing(String),
    #[error("exponent not allowed on `{0}`")]
    BadExponent(String),
}

/// Finite sum of homogeneous components; zero is the empty map.
#[derive(Clone, PartialEq, Debug)]
pub struct Element<H> {
    comps: BTreeMap<Degree, H>,
}

impl<H> Default for Element<H> {
    fn default() -> Self {
        Element { comps: BTreeMap::new() }
    }
}

impl<H: Clone> Element<H> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn components(&self) -> &BTreeMap<Degree, H> {
        &self.comps
    }

    pub fn component(&self, d: Degree) -> Option<&H> {
        self.comps.get(&d)
    }

    pub fn degrees(&self) -> impl Iterator<Item = Degree> + '_ {
        self.comps.keys().copied()
    }

    pub fn min_degree(&self) -> Option<Degree> {
        self.comps.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.comps.keys().next_back().copied()
    }

    /// The single degree of a non-zero homogeneous element.
    pub fn homogeneous_degree(&self) -> Option<Degree> {
        if self.comps.len() == 1 {
            self.min_degree()
        } else {
            None
        }
    }

    /// Components with `lo <= degree <= hi`; `None` bounds are open.
    pub fn truncate(&self, lo: Option<Degree>, hi: Option<Degree>) -> Self {
        let comps = self
            .comps
            .iter()
            .filter(|(d, _)| lo.is_none_or(|l| **d >= l) && hi.is_none_or(|h| **d <= h))
            .map(|(d, h)| (*d, h.clone()))
            .collect();
        Element { comps }
    }
}

/// A graded ring over an exact field.
///
/// Homogeneous values (`Hom`) are stored per degree; the ring decides what a
/// homogeneous value is (a matrix of scalars, a combination of words, ...).
pub trait GradedRing: Clone + fmt::Debug + Send + Sync {
    type Scalar: Field;
    type Hom: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn id(&self) -> String;
    fn tier(&self) -> Tier;

    fn hom_is_zero(&self, h: &Self::Hom) -> bool;
    fn hom_add(&self, a: &Self::Hom, b: &Self::Hom) -> Self::Hom;
    fn hom_scale(&self, a: &Self::Hom, c: &Self::Scalar) -> Self::Hom;
    /// Product of homogeneous values of degrees `da` and `db`; lands in degree `da + db`.
    fn hom_mul(&self, a: &Self::Hom, da: Degree, b: &Self::Hom, db: Degree) -> Self::Hom;
    fn hom_one(&self) -> Self::Hom;
    /// Monomials `(coefficient, word)` used by the printer; the empty word is `1`.
    fn hom_terms(&self, h: &Self::Hom, d: Degree) -> Vec<(Self::Scalar, String)>;

    /// Value of a named generator raised to `exp` (`exp = 1` for a bare name).
    fn generator(&self, name: &str, exp: i64) -> Result<Element<Self::Hom>, RingError>;
    /// Generator names a juxtaposed identifier such as `BCDA` may be split into.
    fn letters(&self) -> Vec<char> {
        Vec::new()
    }

    /// Stored partitions of unity of types (1,-1) and (-1,1).
    fn stored_partitions(&self) -> Option<(PartitionOfUnity<Self::Hom>, PartitionOfUnity<Self::Hom>)>;

    /// Whether `R_n (x) R_-n -> R_0` is onto, when the ring can decide it.
    fn multiplication_surjective(&self, _n: Degree) -> Option<bool> {
        None
    }

    fn homogeneous(&self, d: Degree, h: Self::Hom) -> Element<Self::Hom> {
        let mut comps = BTreeMap::new();
        if !self.hom_is_zero(&h) {
            comps.insert(d, h);
        }
        Element { comps }
    }

    fn one(&self) -> Element<Self::Hom> {
        self.homogeneous(0, self.hom_one())
    }

    fn scalar(&self, c: &Self::Scalar) -> Element<Self::Hom> {
        self.homogeneous(0, self.hom_scale(&self.hom_one(), c))
    }

    fn add(&self, x: &Element<Self::Hom>, y: &Element<Self::Hom>) -> Element<Self::Hom> {
        let mut comps = x.comps.clone();
        for (d, h) in &y.comps {
            match comps.remove(d) {
                Some(g) => {
                    let s = self.hom_add(&g, h);
                    if !self.hom_is_zero(&s) {
                        comps.insert(*d, s);
                    }
                }
                None => {
                    comps.insert(*d, h.clone());
                }
            }
        }
        Element { comps }
    }

    fn scale(&self, x: &Element<Self::Hom>, c: &Self::Scalar) -> Element<Self::Hom> {
        if c.is_zero() {
            return Element::zero();
        }
        Element { comps: x.comps.iter().map(|(d, h)| (*d, self.hom_scale(h, c))).collect() }
    }

    fn neg(&self, x: &Element<Self::Hom>) -> Element<Self::Hom> {
        self.scale(x, &-Self::Scalar::one())
    }

    fn sub(&self, x: &Element<Self::Hom>, y: &Element<Self::Hom>) -> Element<Self::Hom> {
        self.add(x, &self.neg(y))
    }

    fn mul(&self, x: &Element<Self::Hom>, y: &Element<Self::Hom>) -> Element<Self::Hom> {
        let mut out = Element::zero();
        for (da, a) in &x.comps {
            for (db, b) in &y.comps {
                let p = self.hom_mul(a, *da, b, *db);
                out = self.add(&out, &self.homogeneous(da + db, p));
            }
        }
        out
    }

    fn sum<'a>(&self, xs: impl IntoIterator<Item = &'a Element<Self::Hom>>) -> Element<Self::Hom>
    where
        Self::Hom: 'a,
    {
        xs.into_iter().fold(Element::zero(), |acc, x| self.add(&acc, x))
    }
}

/// Graded rings whose components are finite-dimensional with explicit bases.
pub trait FiniteTypeRing: GradedRing {
    fn dim(&self, d: Degree) -> usize;
    fn basis(&self, d: Degree) -> Vec<Self::Hom>;
    fn coords(&self, h: &Self::Hom, d: Degree) -> Vec<Self::Scalar>;
    fn from_coords(&self, d: Degree, c: &[Self::Scalar]) -> Self::Hom;
}

/// Matrix with entries in a graded ring, row-major.
#[derive(Clone, PartialEq, Debug)]
pub struct RingMatrix<H> {
    rows: usize,
    cols: usize,
    entries: Vec<Element<H>>,
}

impl<H: Clone> RingMatrix<H> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix { rows, cols, entries: vec![Element::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<Element<H>>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        RingMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Element<H> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Element<H>) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &Element<H>> {
        self.entries.iter()
    }

    pub fn map(&self, f: impl Fn(&Element<H>) -> Element<H>) -> Self {
        RingMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn min_degree(&self) -> Option<Degree> {
        self.entries.iter().filter_map(|e| e.min_degree()).min()
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.entries.iter().filter_map(|e| e.max_degree()).max()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }
}

pub fn matrix_mul<R: GradedRing>(ring: &R, a: &RingMatrix<R::Hom>, b: &RingMatrix<R::Hom>) -> RingMatrix<R::Hom> {
    assert_eq!(a.cols, b.rows, "shape mismatch in ring matrix product");
    let mut out = RingMatrix::zeros(a.rows, b.cols);
    for i in 0..a.rows {
        for j in 0..b.cols {
            let mut acc = Element::zero();
            for k in 0..a.cols {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if !x.is_zero() && !y.is_zero() {
                    acc = ring.add(&acc, &ring.mul(x, y));
                }
            }
            out.set(i, j, acc);
        }
    }
    out
}

/// `truncate(x, lo, hi)`: keeps exactly the components with `lo <= degree <= hi`.
pub fn truncate<H: Clone>(x: &Element<H>, lo: Option<Degree>, hi: Option<Degree>) -> Element<H> {
    x.truncate(lo, hi)
}

/// Constant-coefficient map `tr^0`.
pub fn tr0<H: Clone>(x: &Element<H>) -> Element<H> {
    x.truncate(Some(0), Some(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;

    #[test]
    fn truncation_examples() {
        let r = crate::Laurent::laurent();
        let x = parse_element(&r, "t^-1 + 3 + t^2").unwrap();
        assert_eq!(truncate(&x, Some(0), None), parse_element(&r, "3 + t^2").unwrap());
        assert_eq!(tr0(&parse_element(&r, "1 - t").unwrap()), r.one());
        assert_eq!(truncate(&x, None, None), x);
        let l = crate::Leavitt::leavitt11();
        let y = parse_element(&l, "B + A").unwrap();
        assert_eq!(truncate(&y, Some(1), Some(1)), parse_element(&l, "B").unwrap());
    }
}
