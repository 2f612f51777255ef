//! Novikov acyclicity and the finite-domination certificate.

use std::collections::BTreeMap;

use crate::complexes::{expand, field_acyclic, field_contraction, function_field_complex, validate_complex, Complex, Contractibility, FreeChainComplex};
use crate::linalg::Matrix;
use crate::ring::{GradedRing, MatrixLaurent};
use crate::scalar::Field;
use crate::series::{invert_series_matrix, InversionCertificate, InversionMode, LaurentMatrix, SeriesMatrix, SeriesWindow};

use super::DominationError;

fn laurent_type<F: Field>(ring: &MatrixLaurent<F>) -> Result<(), DominationError> {
    if ring.step() != 1 {
        return Err(DominationError::UnsupportedRing(ring.id()));
    }
    Ok(())
}

/// Acyclicity of `C (x) Q(t)`, Morita-expanded, decided by ranks.
pub fn novikov_contractibility<F: Field>(
    ring: &MatrixLaurent<F>,
    c: &FreeChainComplex<Matrix<F>>,
) -> Result<bool, DominationError> {
    laurent_type(ring)?;
    validate_complex(ring, c)?;
    Ok(field_acyclic(&function_field_complex(ring, c)))
}

/// Truncated homotopy `S+` with `E_n = D_{n+1} S_n + S_{n-1} D_n` and a
/// conegative inverse of every `E_n`, all on the Morita-expanded complex.
#[derive(Clone, Debug, PartialEq)]
pub struct FinDomCertificate<F> {
    pub ring: String,
    pub order: u32,
    /// `S_n : C_n -> C_{n+1}`.
    pub s_plus: BTreeMap<i64, LaurentMatrix<F>>,
    pub e: BTreeMap<i64, LaurentMatrix<F>>,
    pub e_inverse: BTreeMap<i64, InversionCertificate<F>>,
}

fn e_matrix<F: Field>(x: &Complex<LaurentMatrix<F>>, s: &BTreeMap<i64, LaurentMatrix<F>>, n: i64) -> LaurentMatrix<F> {
    let r = x.rank(n);
    let mut e = LaurentMatrix::zeros(r, r);
    if let (Some(d), Some(sn)) = (x.d(n + 1), s.get(&n)) {
        e = e.add(&d.mul(sn));
    }
    if let (Some(d), Some(sl)) = (x.d(n), s.get(&(n - 1))) {
        e = e.add(&sl.mul(d));
    }
    e
}

impl<F: Field> FinDomCertificate<F> {
    /// Recomputes every `E_n` from `S+` and the complex and re-checks its
    /// shape and inverse.
    pub fn validate(&self, x: &Complex<LaurentMatrix<F>>) -> bool {
        for (n, s) in &self.s_plus {
            if (s.rows(), s.cols()) != (x.rank(n + 1), x.rank(*n)) {
                return false;
            }
        }
        for (&n, &r) in x.ranks() {
            if r == 0 {
                continue;
            }
            let e = e_matrix(x, &self.s_plus, n);
            let (Some(stored), Some(inv)) = (self.e.get(&n), self.e_inverse.get(&n)) else {
                return false;
            };
            let unit_plus_negative = e.max_degree().is_some_and(|d| d <= 0) && e.coeff(0).inverse().is_some();
            if e != *stored
                || !unit_plus_negative
                || inv.mode != InversionMode::Conegative
                || inv.order != self.order
                || inv.matrix.body() != stored
                || !inv.validate()
            {
                return false;
            }
        }
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FinDomVerdict<F> {
    pub finitely_dominated: bool,
    pub certificate: Option<FinDomCertificate<F>>,
}

/// Finite domination over `R_0` via the Novikov criterion; affirmative
/// verdicts carry a certificate built from a contraction over `Q(t)`
/// expanded toward `-inf` and clipped at degree `-order`.
pub fn findom_detect<F: Field>(
    ring: &MatrixLaurent<F>,
    c: &FreeChainComplex<Matrix<F>>,
    order: u32,
) -> Result<FinDomVerdict<F>, DominationError> {
    laurent_type(ring)?;
    validate_complex(ring, c)?;
    let x = expand(ring, c);
    let ff = x.map(|m| m.to_function_matrix());
    let sigma = match field_contraction(&ff) {
        Contractibility::NotContractible { .. } => return Ok(FinDomVerdict { finitely_dominated: false, certificate: None }),
        Contractibility::Contractible(s) => s.s,
    };
    let low = -(order as i64);
    let s_plus: BTreeMap<i64, LaurentMatrix<F>> =
        sigma.iter().map(|(n, s)| (*n, LaurentMatrix::from_function_matrix(s, low))).collect();
    let mut e = BTreeMap::new();
    let mut e_inverse = BTreeMap::new();
    for (&n, &r) in x.ranks() {
        if r == 0 {
            continue;
        }
        let en = e_matrix(&x, &s_plus, n);
        if en.max_degree().is_none_or(|d| d > 0) {
            return Err(DominationError::CertificateFailure(format!("E_{n} is not a unit plus a negative part")));
        }
        let sm = SeriesMatrix::new(ring.id(), SeriesWindow::novm(0, order), en.clone())?;
        let cert = invert_series_matrix(&sm, InversionMode::Conegative, order)
            .map_err(|err| DominationError::CertificateFailure(format!("E_{n}: {err}")))?;
        e.insert(n, en);
        e_inverse.insert(n, cert);
    }
    let cert = FinDomCertificate { ring: ring.id(), order, s_plus, e, e_inverse };
    if !cert.validate(&x) {
        return Err(DominationError::CertificateFailure("certificate does not re-validate".into()));
    }
    Ok(FinDomVerdict { finitely_dominated: true, certificate: Some(cert) })
}
