//! Laurent-type matrices, windowed graded series and their inversion.
//!
//! A matrix over `Mat_n(F)[t, t^-1]` is stored in Morita-expanded form: one
//! scalar block matrix per degree.  The same representation carries
//! truncated power series (`Psp`, degrees `>= 0`) and truncated Novikov
//! series (`Novm`, finite top degree, tail toward `-inf`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::Matrix;
use crate::poly::RationalFunction;
use crate::ring::{Degree, Element, GradedRing, MatrixLaurent, RingMatrix};
use crate::scalar::Field;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SeriesError {
    #[error("constant term is not invertible over R_0")]
    ConstantTermSingular,
    #[error("degree-0 term is not invertible over R_0")]
    LeadingTermSingular,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("entry has a component in negative degree {0}")]
    NegativeDegreeEntry(Degree),
    #[error("entry has a component in positive degree {0}")]
    PositiveDegreeEntry(Degree),
    #[error("component in degree {0} lies outside the window")]
    OutsideWindow(Degree),
    #[error("ring {0} is not of finite type")]
    NotFiniteType(String),
}

/// Laurent polynomial with matrix coefficients; zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentMatrix<F> {
    rows: usize,
    cols: usize,
    coeffs: BTreeMap<Degree, Matrix<F>>,
}

impl<F: Field> LaurentMatrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        LaurentMatrix { rows, cols, coeffs: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::constant(Matrix::identity(n))
    }

    pub fn constant(m: Matrix<F>) -> Self {
        Self::monomial(m, 0)
    }

    pub fn monomial(m: Matrix<F>, d: Degree) -> Self {
        let mut out = Self::zeros(m.rows(), m.cols());
        out.insert(d, m);
        out
    }

    pub fn from_coeffs(rows: usize, cols: usize, coeffs: impl IntoIterator<Item = (Degree, Matrix<F>)>) -> Self {
        let mut out = Self::zeros(rows, cols);
        for (d, m) in coeffs {
            assert_eq!((m.rows(), m.cols()), (rows, cols), "coefficient shape");
            out.accumulate(d, &m);
        }
        out
    }

    fn insert(&mut self, d: Degree, m: Matrix<F>) {
        if m.is_zero() {
            self.coeffs.remove(&d);
        } else {
            self.coeffs.insert(d, m);
        }
    }

    fn accumulate(&mut self, d: Degree, m: &Matrix<F>) {
        let v = match self.coeffs.get(&d) {
            Some(x) => x.add(m),
            None => m.clone(),
        };
        self.insert(d, v);
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn coeffs(&self) -> &BTreeMap<Degree, Matrix<F>> {
        &self.coeffs
    }

    pub fn coeff(&self, d: Degree) -> Matrix<F> {
        self.coeffs.get(&d).cloned().unwrap_or_else(|| Matrix::zeros(self.rows, self.cols))
    }

    pub fn min_degree(&self) -> Option<Degree> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|m| m.is_identity())
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch in sum");
        let mut out = self.clone();
        for (d, m) in &o.coeffs {
            out.accumulate(*d, m);
        }
        out
    }

    pub fn neg(&self) -> Self {
        LaurentMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs.iter().map(|(d, m)| (*d, m.neg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (d, m) in &self.coeffs {
            out.insert(*d, m.scale(c));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_window(o, None, None)
    }

    /// Product with only the degrees in `[lo, hi]` computed.
    pub fn mul_window(&self, o: &Self, lo: Option<Degree>, hi: Option<Degree>) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, o.cols);
        for (da, a) in &self.coeffs {
            for (db, b) in &o.coeffs {
                let d = da + db;
                if lo.is_some_and(|l| d < l) || hi.is_some_and(|h| d > h) {
                    continue;
                }
                out.accumulate(d, &a.mul(b));
            }
        }
        out
    }

    pub fn truncate(&self, lo: Option<Degree>, hi: Option<Degree>) -> Self {
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(d, _)| lo.is_none_or(|l| **d >= l) && hi.is_none_or(|h| **d <= h))
                .map(|(d, m)| (*d, m.clone()))
                .collect(),
        }
    }

    pub fn tr0(&self) -> Matrix<F> {
        self.coeff(0)
    }

    /// Degree `d` becomes degree `-d`.
    pub fn mirror(&self) -> Self {
        LaurentMatrix { rows: self.rows, cols: self.cols, coeffs: self.coeffs.iter().map(|(d, m)| (-d, m.clone())).collect() }
    }

    pub fn transpose(&self) -> Self {
        LaurentMatrix { rows: self.cols, cols: self.rows, coeffs: self.coeffs.iter().map(|(d, m)| (*d, m.transpose())).collect() }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_coeffs(rows, cols, self.coeffs.iter().map(|(d, m)| (*d, m.block(r0, c0, rows, cols))))
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Self) {
        let degrees: Vec<Degree> = self.coeffs.keys().chain(b.coeffs.keys()).copied().collect();
        for d in degrees {
            let mut m = self.coeff(d);
            m.set_block(r0, c0, &b.coeff(d));
            self.insert(d, m);
        }
    }

    /// Column `j` of the coefficient in every degree.
    pub fn column(&self, j: usize) -> BTreeMap<Degree, Vec<F>> {
        self.coeffs.iter().map(|(d, m)| (*d, m.column(j))).filter(|(_, v)| v.iter().any(|x| !x.is_zero())).collect()
    }

    /// Entry `(i, j)` as a rational function of `t`.
    pub fn entry_function(&self, i: usize, j: usize) -> RationalFunction<F> {
        let terms: BTreeMap<Degree, F> =
            self.coeffs.iter().map(|(d, m)| (*d, m.get(i, j).clone())).filter(|(_, c)| !c.is_zero()).collect();
        RationalFunction::from_laurent(&terms)
    }

    pub fn to_function_matrix(&self) -> Matrix<RationalFunction<F>> {
        Matrix::from_fn(self.rows, self.cols, |i, j| self.entry_function(i, j))
    }

    /// Novikov expansion (series in `t^-1`) of a matrix of rational
    /// functions, keeping degrees `>= low`.
    pub fn from_function_matrix(m: &Matrix<RationalFunction<F>>, low: Degree) -> Self {
        let mut coeffs: BTreeMap<Degree, Matrix<F>> = BTreeMap::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                for (d, c) in m.get(i, j).expand_conegative(low) {
                    coeffs.entry(d).or_insert_with(|| Matrix::zeros(m.rows(), m.cols())).set(i, j, c);
                }
            }
        }
        Self::from_coeffs(m.rows(), m.cols(), coeffs)
    }

    /// Morita expansion: an `r x c` matrix over `Mat_n(F)[t^±]` becomes
    /// scalar blocks of size `rn x cn`.
    pub fn from_ring_matrix(ring: &MatrixLaurent<F>, m: &RingMatrix<Matrix<F>>) -> Self {
        let n = ring.block();
        let mut coeffs: BTreeMap<Degree, Matrix<F>> = BTreeMap::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                for (d, h) in m.get(i, j).components() {
                    coeffs.entry(*d).or_insert_with(|| Matrix::zeros(m.rows() * n, m.cols() * n)).set_block(i * n, j * n, h);
                }
            }
        }
        Self::from_coeffs(m.rows() * n, m.cols() * n, coeffs)
    }

    pub fn to_ring_matrix(&self, ring: &MatrixLaurent<F>) -> RingMatrix<Matrix<F>> {
        let n = ring.block();
        assert!(self.rows % n == 0 && self.cols % n == 0, "shape is not a multiple of the block size");
        let mut out = RingMatrix::zeros(self.rows / n, self.cols / n);
        for i in 0..self.rows / n {
            for j in 0..self.cols / n {
                let mut e = Element::zero();
                for (d, m) in &self.coeffs {
                    e = ring.add(&e, &ring.homogeneous(*d, m.block(i * n, j * n, n, n)));
                }
                out.set(i, j, e);
            }
        }
        out
    }
}

/// Degree window of a stored series; `None` bounds are infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeriesWindow {
    pub lo: Option<Degree>,
    pub hi: Option<Degree>,
    pub order: u32,
}

impl SeriesWindow {
    pub fn psp(order: u32) -> Self {
        SeriesWindow { lo: Some(0), hi: None, order }
    }

    pub fn novm(hi: Degree, order: u32) -> Self {
        SeriesWindow { lo: None, hi: Some(hi), order }
    }

    /// The degrees actually stored.
    pub fn stored(&self) -> (Option<Degree>, Option<Degree>) {
        match (self.lo, self.hi) {
            (Some(l), None) => (Some(l), Some(l + self.order as Degree)),
            (None, Some(h)) => (Some(h - self.order as Degree), Some(h)),
            (lo, hi) => (lo, hi),
        }
    }

    pub fn contains(&self, d: Degree) -> bool {
        let (lo, hi) = self.stored();
        lo.is_none_or(|l| d >= l) && hi.is_none_or(|h| d <= h)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesMatrix<F> {
    pub ring: String,
    pub window: SeriesWindow,
    body: LaurentMatrix<F>,
}

impl<F: Field> SeriesMatrix<F> {
    pub fn new(ring: impl Into<String>, window: SeriesWindow, body: LaurentMatrix<F>) -> Result<Self, SeriesError> {
        if let Some(d) = body.coeffs.keys().find(|d| !window.contains(**d)) {
            return Err(SeriesError::OutsideWindow(*d));
        }
        Ok(SeriesMatrix { ring: ring.into(), window, body })
    }

    /// A matrix over `R_+` viewed in `Psp`, truncated to the stored degrees.
    pub fn psp(ring: impl Into<String>, body: &LaurentMatrix<F>, order: u32) -> Result<Self, SeriesError> {
        if let Some(d) = body.min_degree().filter(|d| *d < 0) {
            return Err(SeriesError::NegativeDegreeEntry(d));
        }
        Ok(SeriesMatrix { ring: ring.into(), window: SeriesWindow::psp(order), body: body.truncate(None, Some(order as Degree)) })
    }

    pub fn body(&self) -> &LaurentMatrix<F> {
        &self.body
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InversionMode {
    /// Power series in `t`: invertible iff the constant term is.
    Nonneg,
    /// Unit plus strictly negative part, inverted toward `-inf`.
    Conegative,
}

impl fmt::Display for InversionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InversionMode::Nonneg => "nonneg",
            InversionMode::Conegative => "conegative",
        })
    }
}

/// Which side the recursion solves first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Recursion {
    /// `X_d = -M_0^-1 sum_p M_p X_{d-p}`
    Right,
    /// `X_d = -(sum_p X_{d-p} M_p) M_0^-1`
    Left,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InversionCertificate<F> {
    pub mode: InversionMode,
    pub order: u32,
    pub matrix: SeriesMatrix<F>,
    pub inverse: SeriesMatrix<F>,
    pub residual_check: bool,
}

impl<F: Field> InversionCertificate<F> {
    /// Recomputes both residual identities through the order.
    pub fn validate(&self) -> bool {
        let (m, x) = (self.matrix.body(), self.inverse.body());
        if !m.is_square() || (x.rows(), x.cols()) != (m.rows(), m.cols()) {
            return false;
        }
        let shape_ok = match self.mode {
            InversionMode::Nonneg => m.min_degree().is_none_or(|d| d >= 0) && x.min_degree().is_none_or(|d| d >= 0),
            InversionMode::Conegative => m.max_degree().is_none_or(|d| d <= 0) && x.max_degree().is_none_or(|d| d <= 0),
        };
        shape_ok && residual_ok(m, x, self.mode, self.order)
    }
}

/// `M X` and `X M` equal the identity in every degree within `order` of 0.
pub fn residual_ok<F: Field>(m: &LaurentMatrix<F>, x: &LaurentMatrix<F>, mode: InversionMode, order: u32) -> bool {
    let o = order as Degree;
    let (lo, hi) = match mode {
        InversionMode::Nonneg => (0, o),
        InversionMode::Conegative => (-o, 0),
    };
    let id = LaurentMatrix::identity(m.rows());
    let m = m.truncate(Some(lo), Some(hi));
    let x = x.truncate(Some(lo), Some(hi));
    m.mul_window(&x, Some(lo), Some(hi)) == id && x.mul_window(&m, Some(lo), Some(hi)) == id
}

/// Inverse coefficients `X_0, ..., X_order` of a power series with
/// invertible constant term.
pub fn invert_coefficients<F: Field>(
    m: &LaurentMatrix<F>,
    order: u32,
    recursion: Recursion,
) -> Result<LaurentMatrix<F>, SeriesError> {
    if !m.is_square() {
        return Err(SeriesError::NotSquare(m.rows(), m.cols()));
    }
    if let Some(d) = m.min_degree().filter(|d| *d < 0) {
        return Err(SeriesError::NegativeDegreeEntry(d));
    }
    let m0_inv = m.coeff(0).inverse().ok_or(SeriesError::ConstantTermSingular)?;
    let n = m.rows();
    let mut xs: Vec<Matrix<F>> = vec![m0_inv.clone()];
    for d in 1..=order as Degree {
        let mut acc = Matrix::zeros(n, n);
        for (p, mp) in m.coeffs().range(1..=d) {
            let prev = &xs[(d - p) as usize];
            acc = match recursion {
                Recursion::Right => acc.add(&mp.mul(prev)),
                Recursion::Left => acc.add(&prev.mul(mp)),
            };
        }
        xs.push(match recursion {
            Recursion::Right => m0_inv.mul(&acc).neg(),
            Recursion::Left => acc.mul(&m0_inv).neg(),
        });
    }
    Ok(LaurentMatrix::from_coeffs(n, n, xs.into_iter().enumerate().map(|(d, x)| (d as Degree, x))))
}

/// Inverse of `m` through degree `order` (or `-order`), with its residual check.
pub fn invert_series_matrix<F: Field>(
    m: &SeriesMatrix<F>,
    mode: InversionMode,
    order: u32,
) -> Result<InversionCertificate<F>, SeriesError> {
    invert_series_matrix_with(m, mode, order, Recursion::Right)
}

pub fn invert_series_matrix_with<F: Field>(
    m: &SeriesMatrix<F>,
    mode: InversionMode,
    order: u32,
    recursion: Recursion,
) -> Result<InversionCertificate<F>, SeriesError> {
    let body = m.body();
    let (inverse, window) = match mode {
        InversionMode::Nonneg => (invert_coefficients(body, order, recursion)?, SeriesWindow::psp(order)),
        InversionMode::Conegative => {
            if let Some(d) = body.max_degree().filter(|d| *d > 0) {
                return Err(SeriesError::PositiveDegreeEntry(d));
            }
            let x = invert_coefficients(&body.mirror(), order, recursion).map_err(|e| match e {
                SeriesError::ConstantTermSingular => SeriesError::LeadingTermSingular,
                e => e,
            })?;
            (x.mirror(), SeriesWindow::novm(0, order))
        }
    };
    let residual_check = residual_ok(body, &inverse, mode, order);
    Ok(InversionCertificate {
        mode,
        order,
        matrix: m.clone(),
        inverse: SeriesMatrix { ring: m.ring.clone(), window, body: inverse },
        residual_check,
    })
}

/// Whether `tr^0(M)` is invertible over `R_0`, for a square matrix over `R_+`.
pub fn in_tilde_omega_plus<F: Field>(m: &LaurentMatrix<F>) -> Result<bool, SeriesError> {
    if !m.is_square() {
        return Err(SeriesError::NotSquare(m.rows(), m.cols()));
    }
    if let Some(d) = m.min_degree().filter(|d| *d < 0) {
        return Err(SeriesError::NegativeDegreeEntry(d));
    }
    Ok(m.tr0().inverse().is_some())
}

/// `1 x 1` helper: the Laurent polynomial `sum c_d t^d` as a matrix.
pub fn scalar_series<F: Field>(terms: &[(Degree, F)]) -> LaurentMatrix<F> {
    LaurentMatrix::from_coeffs(1, 1, terms.iter().map(|(d, c)| (*d, Matrix::scalar(1, c.clone()))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::Q;

    fn s(terms: &[(Degree, i64, i64)]) -> LaurentMatrix<Q> {
        scalar_series(&terms.iter().map(|(d, n, m)| (*d, q(*n, *m))).collect::<Vec<_>>())
    }

    #[test]
    fn geometric_series() {
        let m = SeriesMatrix::psp("laurent", &s(&[(0, 2, 1), (1, -1, 1)]), 4).unwrap();
        let c = invert_series_matrix(&m, InversionMode::Nonneg, 4).unwrap();
        assert!(c.residual_check && c.validate());
        assert_eq!(c.inverse.body(), &s(&[(0, 1, 2), (1, 1, 4), (2, 1, 8), (3, 1, 16), (4, 1, 32)]));

        let m = SeriesMatrix::new("laurent", SeriesWindow::novm(0, 4), s(&[(0, 1, 1), (-1, -1, 1)])).unwrap();
        let c = invert_series_matrix(&m, InversionMode::Conegative, 4).unwrap();
        assert!(c.validate());
        assert_eq!(c.inverse.body(), &s(&[(0, 1, 1), (-1, 1, 1), (-2, 1, 1), (-3, 1, 1), (-4, 1, 1)]));
    }

    #[test]
    fn singular_and_shape_errors() {
        let t = SeriesMatrix::psp("laurent", &s(&[(1, 1, 1)]), 4).unwrap();
        assert_eq!(invert_series_matrix(&t, InversionMode::Nonneg, 4).unwrap_err(), SeriesError::ConstantTermSingular);
        let m = SeriesMatrix::new("laurent", SeriesWindow::novm(0, 4), s(&[(-1, 1, 1)])).unwrap();
        assert_eq!(invert_series_matrix(&m, InversionMode::Conegative, 4).unwrap_err(), SeriesError::LeadingTermSingular);
        let rect = SeriesMatrix::psp("laurent", &LaurentMatrix::constant(Matrix::<Q>::zeros(1, 2)), 4).unwrap();
        assert_eq!(invert_series_matrix(&rect, InversionMode::Nonneg, 4).unwrap_err(), SeriesError::NotSquare(1, 2));
        let id = SeriesMatrix::psp("laurent", &LaurentMatrix::<Q>::identity(3), 24).unwrap();
        assert!(invert_series_matrix(&id, InversionMode::Nonneg, 24).unwrap().inverse.body().is_identity());
    }

    #[test]
    fn tilde_omega_membership() {
        assert!(in_tilde_omega_plus(&s(&[(0, 1, 1), (1, -1, 1)])).unwrap());
        assert!(!in_tilde_omega_plus(&s(&[(1, 1, 1)])).unwrap());
        let mut m = LaurentMatrix::<Q>::identity(2);
        m.set_block(0, 1, &s(&[(1, 1, 1)]));
        m.set_block(1, 1, &s(&[(0, 1, 1), (1, -1, 1)]));
        assert!(in_tilde_omega_plus(&m).unwrap());
        assert_eq!(in_tilde_omega_plus(&s(&[(-1, 1, 1)])).unwrap_err(), SeriesError::NegativeDegreeEntry(-1));
    }

    #[test]
    fn recursions_agree() {
        let mut m = LaurentMatrix::<Q>::identity(2);
        m.set_block(0, 1, &s(&[(1, 3, 1), (2, 1, 2)]));
        m.set_block(1, 0, &s(&[(0, 1, 1), (3, -2, 1)]));
        let r = invert_coefficients(&m, 12, Recursion::Right).unwrap();
        let l = invert_coefficients(&m, 12, Recursion::Left).unwrap();
        assert_eq!(r, l);
    }
}
