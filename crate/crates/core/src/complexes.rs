//! Bounded complexes of finitely generated free modules, base change,
//! contractions and the R_0-contractibility routes.
//!
//! Modules are right modules of column vectors and `d_n` acts by left
//! multiplication, so `d_n` has shape `rank(n-1) x rank(n)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::linalg::{Echelon, Matrix, SparseVec};
use crate::poly::RationalFunction;
use crate::ring::{matrix_mul, Degree, GradedRing, MatrixLaurent, RingMatrix, Tier};
use crate::scalar::Field;
use crate::series::{
    in_tilde_omega_plus, invert_series_matrix, InversionCertificate, InversionMode, LaurentMatrix, SeriesError,
    SeriesMatrix, SeriesWindow,
};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ComplexError {
    #[error("composite of differentials ending at d_{0} is not zero")]
    NotAComplex(i64),
    #[error("differential d_{0} has an entry of negative degree")]
    NegativeDegree(i64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("base change to {0} is not supported for this ring")]
    UnsupportedTarget(String),
    #[error("Delta_{0} is singular")]
    DeltaSingular(i64),
    #[error("Delta does not commute with d_{0}")]
    DeltaNotChainMap(i64),
    #[error("contraction identity fails at level {0}")]
    ContractionFailed(i64),
    #[error("ring {0} is not of finite type")]
    NotFiniteType(String),
    #[error("complex belongs to {0}, not {1}")]
    RingMismatch(String, String),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Matrices whose shape is known.
pub trait Shape {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
}

/// Matrix arithmetic needed to turn proto-contractions into contractions.
pub trait MatrixAlgebra: Shape + Clone + PartialEq + fmt::Debug {
    fn zeros_like(&self, rows: usize, cols: usize) -> Self;
    fn identity_like(&self, n: usize) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn try_inverse(&self) -> Option<Self>;
    fn is_zero(&self) -> bool;
    fn is_identity(&self) -> bool;
}

impl<F: Field> Shape for Matrix<F> {
    fn rows(&self) -> usize {
        Matrix::rows(self)
    }
    fn cols(&self) -> usize {
        Matrix::cols(self)
    }
}

impl<F: Field> MatrixAlgebra for Matrix<F> {
    fn zeros_like(&self, rows: usize, cols: usize) -> Self {
        Matrix::zeros(rows, cols)
    }
    fn identity_like(&self, n: usize) -> Self {
        Matrix::identity(n)
    }
    fn mul(&self, o: &Self) -> Self {
        Matrix::mul(self, o)
    }
    fn add(&self, o: &Self) -> Self {
        Matrix::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Matrix::sub(self, o)
    }
    fn try_inverse(&self) -> Option<Self> {
        self.inverse()
    }
    fn is_zero(&self) -> bool {
        Matrix::is_zero(self)
    }
    fn is_identity(&self) -> bool {
        Matrix::is_identity(self)
    }
}

impl<F: Field> Shape for LaurentMatrix<F> {
    fn rows(&self) -> usize {
        LaurentMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        LaurentMatrix::cols(self)
    }
}

/// Matrix over the power-series ring, exact in degrees `0..=order`.
#[derive(Clone, PartialEq, Debug)]
pub struct PspMatrix<F> {
    pub order: u32,
    m: LaurentMatrix<F>,
}

impl<F: Field> PspMatrix<F> {
    pub fn new(order: u32, m: &LaurentMatrix<F>) -> Self {
        assert!(m.min_degree().is_none_or(|d| d >= 0), "power series with a negative degree");
        PspMatrix { order, m: m.truncate(None, Some(order as Degree)) }
    }

    pub fn series(&self) -> &LaurentMatrix<F> {
        &self.m
    }
}

impl<F: Field> Shape for PspMatrix<F> {
    fn rows(&self) -> usize {
        self.m.rows()
    }
    fn cols(&self) -> usize {
        self.m.cols()
    }
}

impl<F: Field> MatrixAlgebra for PspMatrix<F> {
    fn zeros_like(&self, rows: usize, cols: usize) -> Self {
        PspMatrix { order: self.order, m: LaurentMatrix::zeros(rows, cols) }
    }
    fn identity_like(&self, n: usize) -> Self {
        PspMatrix { order: self.order, m: LaurentMatrix::identity(n) }
    }
    fn mul(&self, o: &Self) -> Self {
        PspMatrix { order: self.order, m: self.m.mul_window(&o.m, None, Some(self.order as Degree)) }
    }
    fn add(&self, o: &Self) -> Self {
        PspMatrix { order: self.order, m: self.m.add(&o.m) }
    }
    fn sub(&self, o: &Self) -> Self {
        PspMatrix { order: self.order, m: self.m.sub(&o.m) }
    }
    fn try_inverse(&self) -> Option<Self> {
        let sm = SeriesMatrix::psp("", &self.m, self.order).ok()?;
        let c = invert_series_matrix(&sm, InversionMode::Nonneg, self.order).ok()?;
        Some(PspMatrix { order: self.order, m: c.inverse.body().clone() })
    }
    fn is_zero(&self) -> bool {
        self.m.is_zero()
    }
    fn is_identity(&self) -> bool {
        self.m.is_identity()
    }
}

/// Bounded complex with differentials in some matrix type.  Levels form the
/// contiguous range `lo..=hi`; `d_n` is stored for `lo < n <= hi`.
#[derive(Clone, PartialEq, Debug)]
pub struct Complex<M> {
    ranks: BTreeMap<i64, usize>,
    d: BTreeMap<i64, M>,
}

impl<M: Shape> Complex<M> {
    pub fn new(ranks: BTreeMap<i64, usize>, d: BTreeMap<i64, M>) -> Result<Self, ComplexError> {
        let ranks = contiguous(ranks);
        let Some((lo, hi)) = bounds(&ranks) else {
            return if d.is_empty() { Ok(Complex { ranks, d }) } else { Err(ComplexError::ShapeMismatch("differential on an empty complex".into())) };
        };
        for n in lo + 1..=hi {
            let m = d.get(&n).ok_or_else(|| ComplexError::ShapeMismatch(format!("missing d_{n}")))?;
            if (m.rows(), m.cols()) != (ranks[&(n - 1)], ranks[&n]) {
                return Err(ComplexError::ShapeMismatch(format!(
                    "d_{n} is {}x{}, expected {}x{}",
                    m.rows(),
                    m.cols(),
                    ranks[&(n - 1)],
                    ranks[&n]
                )));
            }
        }
        if let Some(n) = d.keys().find(|n| **n <= lo || **n > hi) {
            return Err(ComplexError::ShapeMismatch(format!("d_{n} outside the level range")));
        }
        Ok(Complex { ranks, d })
    }

    pub fn levels(&self) -> Option<(i64, i64)> {
        bounds(&self.ranks)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn rank(&self, n: i64) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn d(&self, n: i64) -> Option<&M> {
        self.d.get(&n)
    }

    pub fn differentials(&self) -> &BTreeMap<i64, M> {
        &self.d
    }

    pub fn map<N: Shape>(&self, f: impl Fn(&M) -> N) -> Complex<N> {
        Complex { ranks: self.ranks.clone(), d: self.d.iter().map(|(n, m)| (*n, f(m))).collect() }
    }
}

fn contiguous(ranks: BTreeMap<i64, usize>) -> BTreeMap<i64, usize> {
    let Some((lo, hi)) = bounds(&ranks) else {
        return ranks;
    };
    (lo..=hi).map(|n| (n, ranks.get(&n).copied().unwrap_or(0))).collect()
}

fn bounds<V>(m: &BTreeMap<i64, V>) -> Option<(i64, i64)> {
    Some((*m.keys().next()?, *m.keys().next_back()?))
}

/// Contracting homotopy: `s_n : C_n -> C_{n+1}` for `lo <= n < hi`.
#[derive(Clone, PartialEq, Debug)]
pub struct Contraction<M> {
    pub s: BTreeMap<i64, M>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ProtoContraction<M> {
    pub s: BTreeMap<i64, M>,
    pub delta: BTreeMap<i64, M>,
    pub delta_inverse: BTreeMap<i64, M>,
}

/// `d_{n+1} s_n + s_{n-1} d_n`, or `None` when every term is absent.
fn homotopy_sum<M: MatrixAlgebra>(c: &Complex<M>, s: &BTreeMap<i64, M>, n: i64) -> Option<M> {
    let up = c.d(n + 1).zip(s.get(&n)).map(|(d, s)| d.mul(s));
    let down = s.get(&(n - 1)).zip(c.d(n)).map(|(s, d)| s.mul(d));
    match (up, down) {
        (Some(a), Some(b)) => Some(a.add(&b)),
        (a, b) => a.or(b),
    }
}

impl<M: MatrixAlgebra> Contraction<M> {
    /// First level at which `d s + s d = id` fails.
    pub fn failure(&self, c: &Complex<M>) -> Option<i64> {
        let (lo, hi) = c.levels()?;
        (lo..=hi).find(|&n| {
            let r = c.rank(n);
            r > 0 && !homotopy_sum(c, &self.s, n).is_some_and(|h| h.is_identity())
        })
    }

    pub fn verify(&self, c: &Complex<M>) -> bool {
        self.failure(c).is_none()
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum Contractibility<M> {
    Contractible(Contraction<M>),
    /// Homology is non-zero at `level`.
    NotContractible { level: i64 },
}

impl<M> Contractibility<M> {
    pub fn is_contractible(&self) -> bool {
        matches!(self, Contractibility::Contractible(_))
    }
}

/// Contractibility of a complex of finite-dimensional vector spaces, with an
/// explicit contraction solved level by level from the bottom.
pub fn field_contraction<F: Field>(c: &Complex<Matrix<F>>) -> Contractibility<Matrix<F>> {
    let mut s: BTreeMap<i64, Matrix<F>> = BTreeMap::new();
    let Some((lo, hi)) = c.levels() else {
        return Contractibility::Contractible(Contraction { s });
    };
    for n in lo..=hi {
        let r = c.rank(n);
        let mut target = Matrix::identity(r);
        if let (Some(prev), Some(d)) = (s.get(&(n - 1)), c.d(n)) {
            target = target.sub(&prev.mul(d));
        }
        match c.d(n + 1) {
            None => {
                if !target.is_zero() {
                    return Contractibility::NotContractible { level: n };
                }
            }
            Some(d) => match d.solve(&target) {
                Some(x) => {
                    s.insert(n, x);
                }
                None => return Contractibility::NotContractible { level: n },
            },
        }
    }
    Contractibility::Contractible(Contraction { s })
}

/// Whether the complex is exact, by ranks.
pub fn field_acyclic<F: Field>(c: &Complex<Matrix<F>>) -> bool {
    let Some((lo, hi)) = c.levels() else { return true };
    let ranks: BTreeMap<i64, usize> = c.differentials().iter().map(|(n, d)| (*n, d.rank())).collect();
    (lo..=hi).all(|n| c.rank(n) == ranks.get(&n).copied().unwrap_or(0) + ranks.get(&(n + 1)).copied().unwrap_or(0))
}

/// Contraction of an `R_0`-complex (Morita-expanded), or the level where homology survives.
pub fn r0_contractibility<F: Field>(c0: &Complex<Matrix<F>>) -> Contractibility<Matrix<F>> {
    field_contraction(c0)
}

/// `s'_n = s_n Delta_n^-1` for a proto-contraction `s`.
pub fn proto_to_contraction<M: MatrixAlgebra>(
    c: &Complex<M>,
    s: &BTreeMap<i64, M>,
) -> Result<(ProtoContraction<M>, Contraction<M>), ComplexError> {
    let mut proto = ProtoContraction { s: s.clone(), delta: BTreeMap::new(), delta_inverse: BTreeMap::new() };
    let Some((lo, hi)) = c.levels() else {
        return Ok((proto, Contraction { s: BTreeMap::new() }));
    };
    for n in lo..=hi {
        if c.rank(n) == 0 {
            continue;
        }
        let delta = homotopy_sum(c, s, n).ok_or(ComplexError::DeltaSingular(n))?;
        let inv = delta.try_inverse().ok_or(ComplexError::DeltaSingular(n))?;
        proto.delta.insert(n, delta);
        proto.delta_inverse.insert(n, inv);
    }
    for (n, d) in c.differentials() {
        if let (Some(a), Some(b)) = (proto.delta.get(n), proto.delta.get(&(n - 1))) {
            if d.mul(a) != b.mul(d) {
                return Err(ComplexError::DeltaNotChainMap(*n));
            }
        }
    }
    let mut out = BTreeMap::new();
    for (n, sn) in s {
        match proto.delta_inverse.get(n) {
            Some(inv) => out.insert(*n, sn.mul(inv)),
            None => out.insert(*n, sn.clone()),
        };
    }
    let contraction = Contraction { s: out };
    if let Some(n) = contraction.failure(c) {
        return Err(ComplexError::ContractionFailed(n));
    }
    Ok((proto, contraction))
}

/// Complex of finitely generated free modules over a graded ring.
#[derive(Clone, PartialEq, Debug)]
pub struct FreeChainComplex<H> {
    pub ring: String,
    ranks: BTreeMap<i64, usize>,
    d: BTreeMap<i64, RingMatrix<H>>,
}

impl<H: Clone> Shape for RingMatrix<H> {
    fn rows(&self) -> usize {
        RingMatrix::rows(self)
    }
    fn cols(&self) -> usize {
        RingMatrix::cols(self)
    }
}

impl<H: Clone> FreeChainComplex<H> {
    /// Missing differentials between consecutive levels are zero.
    pub fn new(
        ring: impl Into<String>,
        ranks: impl IntoIterator<Item = (i64, usize)>,
        d: impl IntoIterator<Item = (i64, RingMatrix<H>)>,
    ) -> Result<Self, ComplexError> {
        let ranks = contiguous(ranks.into_iter().collect());
        let mut d: BTreeMap<i64, RingMatrix<H>> = d.into_iter().collect();
        if let Some((lo, hi)) = bounds(&ranks) {
            for n in lo + 1..=hi {
                d.entry(n).or_insert_with(|| RingMatrix::zeros(ranks[&(n - 1)], ranks[&n]));
            }
        }
        let checked = Complex::new(ranks, d)?;
        Ok(FreeChainComplex { ring: ring.into(), ranks: checked.ranks, d: checked.d })
    }

    pub fn zero(ring: impl Into<String>) -> Self {
        FreeChainComplex { ring: ring.into(), ranks: BTreeMap::new(), d: BTreeMap::new() }
    }

    pub fn levels(&self) -> Option<(i64, i64)> {
        bounds(&self.ranks)
    }

    pub fn ranks(&self) -> &BTreeMap<i64, usize> {
        &self.ranks
    }

    pub fn rank(&self, n: i64) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    pub fn d(&self, n: i64) -> Option<&RingMatrix<H>> {
        self.d.get(&n)
    }

    pub fn differentials(&self) -> &BTreeMap<i64, RingMatrix<H>> {
        &self.d
    }

    pub fn map_entries(&self, f: impl Fn(&RingMatrix<H>) -> RingMatrix<H>) -> Self {
        FreeChainComplex { ring: self.ring.clone(), ranks: self.ranks.clone(), d: self.d.iter().map(|(n, m)| (*n, f(m))).collect() }
    }

    pub fn max_entry_degree(&self) -> Option<Degree> {
        self.d.values().filter_map(|m| m.max_degree()).max()
    }
}

/// Checks ring, non-negative degrees and `d_{n-1} d_n = 0`, lowest `n` first.
pub fn validate_complex<R: GradedRing>(ring: &R, c: &FreeChainComplex<R::Hom>) -> Result<(), ComplexError> {
    if c.ring != ring.id() {
        return Err(ComplexError::RingMismatch(c.ring.clone(), ring.id()));
    }
    for (n, m) in c.differentials() {
        if m.min_degree().is_some_and(|d| d < 0) {
            return Err(ComplexError::NegativeDegree(*n));
        }
    }
    for (n, m) in c.differentials() {
        if let Some(below) = c.d(n - 1) {
            if !matrix_mul(ring, below, m).is_zero() {
                return Err(ComplexError::NotAComplex(*n));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseChangeTarget {
    R0,
    PspWindow(u32),
    NovmWindow(u32),
    RationalFunctionField,
    FullRing,
}

impl fmt::Display for BaseChangeTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseChangeTarget::R0 => write!(f, "R0"),
            BaseChangeTarget::PspWindow(o) => write!(f, "Psp(order {o})"),
            BaseChangeTarget::NovmWindow(o) => write!(f, "Novm(order {o})"),
            BaseChangeTarget::RationalFunctionField => write!(f, "Q(t)"),
            BaseChangeTarget::FullRing => write!(f, "R"),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub enum BaseChanged<H, F> {
    /// Entries mapped within the graded ring; `window` tags series targets.
    Ring { target: BaseChangeTarget, window: Option<SeriesWindow>, complex: FreeChainComplex<H> },
    /// Morita-expanded complex over the rational function field.
    FunctionField(Complex<Matrix<RationalFunction<F>>>),
}

/// Entrywise base change for targets that only truncate or embed.
pub fn base_change_entrywise<R: GradedRing>(
    ring: &R,
    c: &FreeChainComplex<R::Hom>,
    target: BaseChangeTarget,
) -> Result<BaseChanged<R::Hom, R::Scalar>, ComplexError> {
    let (window, lo, hi) = match target {
        BaseChangeTarget::R0 => (None, Some(0), Some(0)),
        BaseChangeTarget::FullRing => (None, None, None),
        BaseChangeTarget::PspWindow(order) if ring.tier() == Tier::FiniteType => {
            let w = SeriesWindow::psp(order);
            let (lo, hi) = w.stored();
            (Some(w), lo, hi)
        }
        BaseChangeTarget::NovmWindow(order) if ring.tier() == Tier::FiniteType => {
            let w = SeriesWindow::novm(c.max_entry_degree().unwrap_or(0).max(0), order);
            let (lo, hi) = w.stored();
            (Some(w), lo, hi)
        }
        other => return Err(ComplexError::UnsupportedTarget(other.to_string())),
    };
    let complex = c.map_entries(|m| m.map(|e| e.truncate(lo, hi)));
    Ok(BaseChanged::Ring { target, window, complex })
}

pub fn base_change<F: Field>(
    ring: &MatrixLaurent<F>,
    c: &FreeChainComplex<Matrix<F>>,
    target: BaseChangeTarget,
) -> Result<BaseChanged<Matrix<F>, F>, ComplexError> {
    if target == BaseChangeTarget::RationalFunctionField {
        if ring.step() != 1 {
            return Err(ComplexError::UnsupportedTarget(target.to_string()));
        }
        return Ok(BaseChanged::FunctionField(expand(ring, c).map(|m| m.to_function_matrix())));
    }
    base_change_entrywise(ring, c, target)
}

/// Morita expansion of every differential.
pub fn expand<F: Field>(ring: &MatrixLaurent<F>, c: &FreeChainComplex<Matrix<F>>) -> Complex<LaurentMatrix<F>> {
    let n = ring.block();
    Complex {
        ranks: c.ranks().iter().map(|(k, r)| (*k, r * n)).collect(),
        d: c.differentials().iter().map(|(k, m)| (*k, LaurentMatrix::from_ring_matrix(ring, m))).collect(),
    }
}

/// `C (x)_{R_+} R_0`, Morita-expanded to a complex of scalar matrices.
pub fn r0_complex<F: Field>(ring: &MatrixLaurent<F>, c: &FreeChainComplex<Matrix<F>>) -> Complex<Matrix<F>> {
    expand(ring, c).map(|m| m.tr0())
}

/// `C (x)_{R_+} Q(t)`, Morita-expanded.
pub fn function_field_complex<F: Field>(
    ring: &MatrixLaurent<F>,
    c: &FreeChainComplex<Matrix<F>>,
) -> Complex<Matrix<RationalFunction<F>>> {
    expand(ring, c).map(|m| m.to_function_matrix())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaVerdict {
    pub horizon: u32,
    /// First truncation degree at which the cone fails to be exact.
    pub first_failure: Option<u32>,
}

impl ZetaVerdict {
    pub fn quasi_iso(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Column `j` of `m` applied to a basis vector sitting in degree `e`:
/// the components `(degree, column)` of the image.
fn image_of<F: Field>(m: &LaurentMatrix<F>, j: usize, e: Degree) -> Vec<(Degree, Vec<F>)> {
    m.column(j).into_iter().map(|(c, v)| (e + c, v)).collect()
}

fn sparse_rank<F: Field>(cols: impl IntoIterator<Item = SparseVec<F>>) -> usize {
    let mut e = Echelon::new();
    for v in cols {
        e.insert(v);
    }
    e.rank()
}

/// Exactness of the cone of `zeta : C (x) tR_+ -> C`.
///
/// The differential need not be homogeneous, so the cone is checked through
/// its quotients by the subcomplexes concentrated in degrees `> h`; each
/// such subcomplex is the cone of an isomorphism, so every quotient has the
/// homology of the cone.
pub fn zeta_cone<F: Field>(ring: &MatrixLaurent<F>, c: &FreeChainComplex<Matrix<F>>, horizon: u32) -> ZetaVerdict {
    let x = expand(ring, c);
    let first_failure = (0..=horizon).find(|&h| !truncated_cone_exact(ring, &x, h as Degree));
    ZetaVerdict { horizon, first_failure }
}

fn truncated_cone_exact<F: Field>(ring: &MatrixLaurent<F>, x: &Complex<LaurentMatrix<F>>, h: Degree) -> bool {
    let Some((lo, hi)) = x.levels() else { return true };
    let degs = |from: Degree| -> Vec<Degree> { (from..=h).filter(|e| ring.has_degree(*e)).collect() };
    let (xdeg, ydeg) = (degs(1), degs(0));
    // cone_n = (C_{n-1} in degrees 1..=h) (+) (C_n in degrees 0..=h)
    let layout = |n: i64| -> (usize, usize) { (x.rank(n - 1) * xdeg.len(), x.rank(n) * ydeg.len()) };
    let pos = |degs: &[Degree], r: usize, e: Degree, i: usize| degs.iter().position(|d| *d == e).map(|p| p * r + i);
    let cone_dim = |n: i64| {
        let (a, b) = layout(n);
        a + b
    };
    let mut ranks = BTreeMap::new();
    for n in lo..=hi + 1 {
        let mut cols = Vec::new();
        let (xa, _) = layout(n - 1);
        let (r2, r1) = (x.rank(n - 2), x.rank(n - 1));
        // (u, 0) with u in C_{n-1}: -(d u) in the X part, zeta(u) in the Y part
        for &e in &xdeg {
            for j in 0..r1 {
                let mut v = BTreeMap::new();
                if let Some(d) = x.d(n - 1) {
                    for (f, col) in image_of(d, j, e) {
                        for (i, c) in col.into_iter().enumerate() {
                            if let Some(k) = pos(&xdeg, r2, f, i) {
                                v.insert(k, -c);
                            }
                        }
                    }
                }
                if let Some(k) = pos(&ydeg, r1, e, j) {
                    v.insert(xa + k, F::one());
                }
                cols.push(SparseVec::from_map(v));
            }
        }
        // (0, y) with y in C_n: d y in the Y part
        let rn = x.rank(n);
        for &e in &ydeg {
            for j in 0..rn {
                let mut v = BTreeMap::new();
                if let Some(d) = x.d(n) {
                    for (f, col) in image_of(d, j, e) {
                        for (i, c) in col.into_iter().enumerate() {
                            if let Some(k) = pos(&ydeg, r1, f, i) {
                                v.insert(xa + k, c);
                            }
                        }
                    }
                }
                cols.push(SparseVec::from_map(v));
            }
        }
        ranks.insert(n, sparse_rank(cols));
    }
    (lo..=hi + 1).all(|n| cone_dim(n) == ranks[&n] + ranks.get(&(n + 1)).copied().unwrap_or(0))
}

/// Psp-contraction obtained from the lifted `R_0`-contraction.
#[derive(Clone, PartialEq, Debug)]
pub struct PspCertificate<F> {
    pub order: u32,
    /// `S+_n`: the `R_0`-contraction as degree-0 matrices.
    pub s_plus: BTreeMap<i64, LaurentMatrix<F>>,
    /// `E_n = D+_{n+1} S+_n + S+_{n-1} D+_n`, which lies in tilde-Omega_+.
    pub e: BTreeMap<i64, LaurentMatrix<F>>,
    pub e_inverse: BTreeMap<i64, InversionCertificate<F>>,
    /// `s'_n = S+_n E_n^-1` through the order.
    pub contraction: BTreeMap<i64, LaurentMatrix<F>>,
}

impl<F: Field> PspCertificate<F> {
    /// Re-checks every identity from the complex and the stored matrices.
    pub fn validate(&self, x: &Complex<LaurentMatrix<F>>) -> bool {
        let psp = x.map(|m| PspMatrix::new(self.order, m));
        let s_plus: BTreeMap<i64, PspMatrix<F>> = self.s_plus.iter().map(|(n, m)| (*n, PspMatrix::new(self.order, m))).collect();
        let Some((lo, hi)) = x.levels() else { return self.contraction.is_empty() };
        for n in lo..=hi {
            if x.rank(n) == 0 {
                continue;
            }
            let Some(e) = homotopy_sum(&psp, &s_plus, n) else { return false };
            let Some(stored) = self.e.get(&n) else { return false };
            if &e.m != stored || !in_tilde_omega_plus(stored).unwrap_or(false) {
                return false;
            }
            let Some(inv) = self.e_inverse.get(&n) else { return false };
            if inv.mode != InversionMode::Nonneg || inv.matrix.body() != stored || !inv.validate() {
                return false;
            }
        }
        for (n, s) in &self.s_plus {
            if s.coeffs().keys().any(|d| *d != 0) {
                return false;
            }
            let expected = match self.e_inverse.get(n) {
                Some(inv) => PspMatrix::new(self.order, s).mul(&PspMatrix::new(self.order, inv.inverse.body())),
                None => PspMatrix::new(self.order, s),
            };
            if self.contraction.get(n) != Some(&expected.m) {
                return false;
            }
        }
        let s: BTreeMap<i64, PspMatrix<F>> = self.contraction.iter().map(|(n, m)| (*n, PspMatrix::new(self.order, m))).collect();
        Contraction { s }.verify(&psp)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct RouteReport<F> {
    pub order: u32,
    pub horizon: u32,
    /// Route (1): `C (x) R_0` contractible.
    pub r0_contractible: bool,
    pub r0_failure_level: Option<i64>,
    /// Route (2): the Psp certificate, when one was produced and validated.
    pub psp_certificate: Option<PspCertificate<F>>,
    /// Route (4): the cone of zeta.
    pub zeta: ZetaVerdict,
}

impl<F> RouteReport<F> {
    pub fn agree(&self) -> bool {
        self.r0_contractible == self.psp_certificate.is_some() && self.r0_contractible == self.zeta.quasi_iso()
    }

    pub fn verdict(&self) -> bool {
        self.r0_contractible
    }
}

/// Routes (1), (2) and (4) to R_0-contractibility of an `R_+`-complex.
pub fn r0_routes_report<F: Field>(
    ring: &MatrixLaurent<F>,
    c: &FreeChainComplex<Matrix<F>>,
    order: u32,
    horizon: u32,
) -> Result<RouteReport<F>, ComplexError> {
    validate_complex(ring, c)?;
    let x = expand(ring, c);
    let (r0_contractible, r0_failure_level, sigma) = match r0_contractibility(&x.map(|m| m.tr0())) {
        Contractibility::Contractible(k) => (true, None, Some(k.s)),
        Contractibility::NotContractible { level } => (false, Some(level), None),
    };
    let psp_certificate = match sigma {
        Some(sigma) => Some(psp_route(&x, &sigma, order)?),
        None => None,
    };
    if let Some(cert) = &psp_certificate {
        if !cert.validate(&x) {
            return Err(ComplexError::ContractionFailed(x.levels().map_or(0, |l| l.0)));
        }
    }
    let zeta = zeta_cone(ring, c, horizon);
    Ok(RouteReport { order, horizon, r0_contractible, r0_failure_level, psp_certificate, zeta })
}

/// Lifts `sigma` to degree-0 matrices and converts the resulting
/// proto-contraction of `C (x) Psp` into a contraction.
pub fn psp_route<F: Field>(
    x: &Complex<LaurentMatrix<F>>,
    sigma: &BTreeMap<i64, Matrix<F>>,
    order: u32,
) -> Result<PspCertificate<F>, ComplexError> {
    let s_plus: BTreeMap<i64, LaurentMatrix<F>> = sigma.iter().map(|(n, m)| (*n, LaurentMatrix::constant(m.clone()))).collect();
    let psp = x.map(|m| PspMatrix::new(order, m));
    let s: BTreeMap<i64, PspMatrix<F>> = s_plus.iter().map(|(n, m)| (*n, PspMatrix::new(order, m))).collect();
    let (proto, contraction) = proto_to_contraction(&psp, &s)?;
    let mut e_inverse = BTreeMap::new();
    for (n, e) in &proto.delta {
        if !in_tilde_omega_plus(e.series())? {
            return Err(ComplexError::DeltaSingular(*n));
        }
        let sm = SeriesMatrix::psp("", e.series(), order)?;
        e_inverse.insert(*n, invert_series_matrix(&sm, InversionMode::Nonneg, order)?);
    }
    Ok(PspCertificate {
        order,
        s_plus,
        e: proto.delta.into_iter().map(|(n, m)| (n, m.m)).collect(),
        e_inverse,
        contraction: contraction.s.into_iter().map(|(n, m)| (n, m.m)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_matrix;
    use crate::scalar::q;
    use crate::{Laurent, Q};

    fn cx(ring: &Laurent, ranks: &[(i64, usize)], d: &[(i64, &str)]) -> FreeChainComplex<Matrix<Q>> {
        FreeChainComplex::new(
            ring.id(),
            ranks.iter().copied(),
            d.iter().map(|(n, s)| (*n, parse_matrix(ring, s).unwrap())),
        )
        .unwrap()
    }

    fn qm(rows: Vec<Vec<i64>>) -> Matrix<Q> {
        Matrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| q(x, 1)).collect()).collect())
    }

    fn field(ranks: &[(i64, usize)], d: Vec<(i64, Matrix<Q>)>) -> Complex<Matrix<Q>> {
        Complex::new(ranks.iter().copied().collect(), d.into_iter().collect()).unwrap()
    }

    #[test]
    fn validation() {
        let r = Laurent::laurent();
        assert!(validate_complex(&r, &FreeChainComplex::zero("laurent")).is_ok());
        assert!(validate_complex(&r, &cx(&r, &[(0, 1), (1, 1)], &[(1, "[[t]]")])).is_ok());
        let bad = cx(&r, &[(0, 1), (1, 1), (2, 1)], &[(1, "[[t]]"), (2, "[[t]]")]);
        assert_eq!(validate_complex(&r, &bad), Err(ComplexError::NotAComplex(2)));
    }

    #[test]
    fn base_change_examples() {
        let r = Laurent::laurent();
        let c = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[1 - t]]")]);
        let BaseChanged::Ring { complex, .. } = base_change(&r, &c, BaseChangeTarget::R0).unwrap() else { panic!() };
        assert_eq!(complex.d(1).unwrap(), &parse_matrix(&r, "[[1]]").unwrap());
        let BaseChanged::FunctionField(f) = base_change(&r, &c, BaseChangeTarget::RationalFunctionField).unwrap() else {
            panic!()
        };
        assert_eq!(f.d(1).unwrap().get(0, 0).to_string(), "1 - t");
        let l = crate::Leavitt::leavitt11();
        let lc = FreeChainComplex::<<crate::Leavitt as GradedRing>::Hom>::zero("leavitt11");
        assert!(matches!(
            base_change_entrywise(&l, &lc, BaseChangeTarget::PspWindow(4)),
            Err(ComplexError::UnsupportedTarget(_))
        ));
    }

    #[test]
    fn r0_examples() {
        let one = field(&[(0, 1), (1, 1)], vec![(1, qm(vec![vec![1]]))]);
        let Contractibility::Contractible(k) = r0_contractibility(&one) else { panic!() };
        assert_eq!(k.s[&0], qm(vec![vec![1]]));
        let zero = field(&[(0, 1), (1, 1)], vec![(1, qm(vec![vec![0]]))]);
        assert!(!r0_contractibility(&zero).is_contractible());
        let three =
            field(&[(0, 1), (1, 2), (2, 1)], vec![(1, qm(vec![vec![0, 1]])), (2, qm(vec![vec![1], vec![0]]))]);
        let Contractibility::Contractible(k) = r0_contractibility(&three) else { panic!() };
        assert!(k.verify(&three));
    }

    #[test]
    fn proto_examples() {
        let two = field(&[(0, 1), (1, 1)], vec![(1, qm(vec![vec![2]]))]);
        let s: BTreeMap<_, _> = [(0, qm(vec![vec![1]]))].into();
        let (p, k) = proto_to_contraction(&two, &s).unwrap();
        assert_eq!(p.delta[&0], qm(vec![vec![2]]));
        assert_eq!(k.s[&0], Matrix::from_rows(vec![vec![q(1, 2)]]));
        let zero = field(&[(0, 1), (1, 1)], vec![(1, qm(vec![vec![0]]))]);
        assert_eq!(proto_to_contraction(&zero, &s).unwrap_err(), ComplexError::DeltaSingular(0));
    }

    #[test]
    fn zeta_and_routes() {
        let r = Laurent::laurent();
        let good = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[1 - t]]")]);
        assert!(zeta_cone(&r, &good, 16).quasi_iso());
        let bad = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[t]]")]);
        assert_eq!(zeta_cone(&r, &bad, 16).first_failure, Some(0));
        assert!(zeta_cone(&r, &FreeChainComplex::zero("laurent"), 4).quasi_iso());

        let rep = r0_routes_report(&r, &good, 24, 12).unwrap();
        assert!(rep.verdict() && rep.agree());
        let rep = r0_routes_report(&r, &bad, 24, 12).unwrap();
        assert!(!rep.verdict() && rep.agree());
        let col = cx(&r, &[(0, 2), (1, 1)], &[(1, "[[1], [t]]")]);
        let rep = r0_routes_report(&r, &col, 24, 8).unwrap();
        assert!(rep.agree());
    }
}
