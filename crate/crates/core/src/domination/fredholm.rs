//! Fredholm matrices: injectivity of `A : R_+^k -> (t^-m R_+)^k` and
//! finiteness of its graded cokernel.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::linalg::{Echelon, Matrix, SparseVec};
use crate::poly::RationalFunction;
use crate::ring::{Degree, MatrixLaurent, RingMatrix};
use crate::scalar::Field;
use crate::series::LaurentMatrix;

use super::DominationError;

/// Consecutive zero pieces past the maximal entry degree that count as stabilised.
pub const STABILIZATION_WINDOW: Degree = 8;

/// Least `m` with `-m` at most the minimal degree of a non-zero component.
pub fn suitable_shift<H: Clone>(a: &RingMatrix<H>) -> Result<Degree, DominationError> {
    a.min_degree().map(|d| -d).ok_or(DominationError::ZeroMatrix)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CokernelReport {
    pub m: Degree,
    pub injective: bool,
    /// Dimension over the prime field of each graded piece, degrees `-m ..= computed_to`.
    pub dims: BTreeMap<Degree, usize>,
    pub stabilized: bool,
    pub total_dim: Option<usize>,
    pub computed_to: Degree,
    pub window: Degree,
}

fn check_square<H: Clone>(a: &RingMatrix<H>) -> Result<(), DominationError> {
    if a.rows() != a.cols() || a.rows() == 0 {
        return Err(DominationError::ShapeMismatch(format!("expected a non-empty square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(())
}

/// Graded pieces of `(t^-m R_+)^k / A R_+^k` in degrees `[-m, E]`, where
/// `E >= horizon` is large enough for the stabilisation window to sit past
/// every entry degree.
pub fn graded_cokernel<F: Field>(
    ring: &MatrixLaurent<F>,
    a: &RingMatrix<crate::linalg::Matrix<F>>,
    m: Degree,
    horizon: u32,
) -> Result<CokernelReport, DominationError> {
    check_square(a)?;
    if let Some(min) = a.min_degree() {
        if min < -m {
            return Err(DominationError::NotSuitable { m, min });
        }
    }
    let n = ring.block();
    let x = LaurentMatrix::from_ring_matrix(ring, a);
    let k = x.rows();
    let mx = x.max_degree().unwrap_or(0);
    let span = (k as Degree) * (mx + m).max(0);
    let top = (horizon as Degree).max(mx + STABILIZATION_WINDOW).max(span - m + STABILIZATION_WINDOW).max(-m + STABILIZATION_WINDOW - 1);
    let src_top = top + m + span + 2;
    let coord_top = top.max(src_top + mx);

    // target coordinates, highest degree first
    let mut base = HashMap::new();
    let mut next = 0;
    let mut degree_of = Vec::new();
    for e in (-m..=coord_top).rev().filter(|e| ring.has_degree(*e)) {
        base.insert(e, next);
        next += k;
        degree_of.extend(std::iter::repeat_n(e, k));
    }
    let mut ech = Echelon::new();
    let mut sources = 0;
    let mut independent = 0;
    for d in (0..=src_top).filter(|d| ring.has_degree(*d)) {
        for j in 0..k {
            let mut v = BTreeMap::new();
            for (c, mc) in x.coeffs() {
                let b = base[&(d + c)];
                for i in 0..k {
                    let y = mc.get(i, j);
                    if !y.is_zero() {
                        v.insert(b + i, y.clone());
                    }
                }
            }
            sources += 1;
            if ech.insert(SparseVec::from_map(v)).is_some() {
                independent += 1;
            }
        }
    }
    let injective = independent == sources;
    let mut pivot_count: BTreeMap<Degree, usize> = BTreeMap::new();
    for p in ech.pivots() {
        *pivot_count.entry(degree_of[p]).or_default() += 1;
    }
    let mut dims = BTreeMap::new();
    for e in -m..=top {
        let piece = if ring.has_degree(e) { k - pivot_count.get(&e).copied().unwrap_or(0) } else { 0 };
        dims.insert(e, piece * n);
    }
    let window_start = top - STABILIZATION_WINDOW + 1;
    let stabilized = injective && window_start > mx && (window_start..=top).all(|e| dims[&e] == 0);
    let total_dim = stabilized.then(|| dims.values().sum());
    Ok(CokernelReport { m, injective, dims, stabilized, total_dim, computed_to: top, window: STABILIZATION_WINDOW })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FredholmVerdict {
    pub size: usize,
    /// `None` for the zero matrix.
    pub suitable_m: Option<Degree>,
    /// Shift used for the cokernel, `max(0, suitable_m)`.
    pub m: Degree,
    pub injective: bool,
    pub cokernel_dims: BTreeMap<Degree, usize>,
    pub stabilized: bool,
    pub total_dim: Option<usize>,
    pub window: Degree,
    /// Degree of `det(t^m A)` over `Q(t)` after Morita expansion.
    pub oracle_det_degree: Option<i64>,
    pub oracle_det: Option<String>,
    pub oracle_fredholm: Option<bool>,
    pub fredholm: bool,
}

impl FredholmVerdict {
    /// Both backends agree, and the cokernel has the predicted size.
    pub fn agree(&self, block: usize) -> bool {
        match self.oracle_fredholm {
            None => true,
            Some(o) => {
                o == self.fredholm
                    && (!self.fredholm || self.total_dim.map(|t| t as i64) == self.oracle_det_degree.map(|d| d * block as i64))
            }
        }
    }
}

fn top_degree<F: Field>(f: &RationalFunction<F>) -> Option<i64> {
    Some(f.numer().degree()? as i64 - f.denom().degree()? as i64)
}

pub fn is_fredholm<F: Field>(
    ring: &MatrixLaurent<F>,
    a: &RingMatrix<Matrix<F>>,
    horizon: u32,
) -> Result<FredholmVerdict, DominationError> {
    check_square(a)?;
    let suitable_m = match suitable_shift(a) {
        Ok(m) => Some(m),
        Err(DominationError::ZeroMatrix) => None,
        Err(e) => return Err(e),
    };
    let m = suitable_m.unwrap_or(0).max(0);
    let rep = graded_cokernel(ring, a, m, horizon)?;
    let (mut oracle_det_degree, mut oracle_det, mut oracle_fredholm) = (None, None, None);
    if ring.step() == 1 {
        let x = LaurentMatrix::from_ring_matrix(ring, a);
        let shifted = x.mul(&LaurentMatrix::monomial(Matrix::identity(x.rows()), m));
        let det = shifted.to_function_matrix().det();
        oracle_fredholm = Some(!det.is_zero());
        oracle_det_degree = top_degree(&det);
        oracle_det = Some(det.to_string());
    }
    Ok(FredholmVerdict {
        size: a.rows(),
        suitable_m,
        m,
        injective: rep.injective,
        fredholm: rep.injective && rep.stabilized,
        cokernel_dims: rep.dims,
        stabilized: rep.stabilized,
        total_dim: rep.total_dim,
        window: rep.window,
        oracle_det_degree,
        oracle_det,
        oracle_fredholm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_matrix;

    fn mat(r: &crate::Laurent, s: &str) -> RingMatrix<crate::QMatrix> {
        parse_matrix(r, s).unwrap()
    }

    #[test]
    fn shifts() {
        let r = crate::Laurent::laurent();
        assert_eq!(suitable_shift(&mat(&r, "[[t^-2 + 1]]")).unwrap(), 2);
        assert_eq!(suitable_shift(&mat(&r, "[[1 + t]]")).unwrap(), 0);
        assert_eq!(suitable_shift(&mat(&r, "[[t^3]]")).unwrap(), -3);
        assert_eq!(suitable_shift(&mat(&r, "[[0]]")).unwrap_err(), DominationError::ZeroMatrix);
    }

    #[test]
    fn cokernels() {
        let r = crate::Laurent::laurent();
        let t = mat(&r, "[[t]]");
        let c0 = graded_cokernel(&r, &t, 0, 10).unwrap();
        assert!(c0.injective && c0.stabilized);
        assert_eq!(c0.dims[&0], 1);
        assert!(c0.dims.iter().all(|(d, n)| *d == 0 || *n == 0));
        assert_eq!(c0.total_dim, Some(1));
        assert_eq!(graded_cokernel(&r, &t, 1, 10).unwrap().total_dim, Some(2));
        assert!(!graded_cokernel(&r, &mat(&r, "[[0]]"), 0, 10).unwrap().injective);
        assert_eq!(
            graded_cokernel(&r, &mat(&r, "[[t^-1]]"), 0, 4).unwrap_err(),
            DominationError::NotSuitable { m: 0, min: -1 }
        );
    }

    #[test]
    fn fredholm_examples() {
        let r = crate::Laurent::laurent();
        for (s, total, det) in [("[[t]]", 1, 1), ("[[t, 1], [0, t]]", 2, 2), ("[[1 - t]]", 1, 1)] {
            let v = is_fredholm(&r, &mat(&r, s), 16).unwrap();
            assert!(v.fredholm && v.agree(1), "{s}: {v:?}");
            assert_eq!(v.total_dim, Some(total));
            assert_eq!(v.oracle_det_degree, Some(det));
        }
        let v = is_fredholm(&r, &mat(&r, "[[t, 1], [0, t]]"), 16).unwrap();
        assert_eq!(v.oracle_det.as_deref(), Some("t^2"));
        let v = is_fredholm(&r, &mat(&r, "[[0]]"), 16).unwrap();
        assert!(!v.fredholm && !v.injective && v.agree(1));
        let v = is_fredholm(&r, &mat(&r, "[[1 + t, 1 + t], [1, 1]]"), 16).unwrap();
        assert!(!v.fredholm && v.agree(1));
        let r2 = crate::Laurent::matrix_laurent(2);
        let v = is_fredholm(&r2, &mat(&r2, "[[t*E_1_1 + E_2_2]]"), 16).unwrap();
        assert!(v.fredholm && v.agree(2), "{v:?}");
        assert_eq!(v.total_dim, Some(2));
    }
}
