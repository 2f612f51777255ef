mod common;

use gradedfd::expr::parse_matrix;
use gradedfd::linalg::Matrix;
use gradedfd::series::{
    in_tilde_omega_plus, invert_series_matrix, invert_series_matrix_with, InversionMode, LaurentMatrix, Recursion,
    SeriesError, SeriesMatrix, SeriesWindow,
};
use gradedfd::ring::GradedRing;
use gradedfd::{Laurent, Q};
use proptest::prelude::*;
use rand::Rng;

fn lm(ring: &Laurent, s: &str) -> LaurentMatrix<Q> {
    LaurentMatrix::from_ring_matrix(ring, &parse_matrix(ring, s).unwrap())
}

fn nonneg(ring: &Laurent, m: &LaurentMatrix<Q>, order: u32) -> Result<LaurentMatrix<Q>, SeriesError> {
    let sm = SeriesMatrix::psp(ring.id(), m, order)?;
    invert_series_matrix(&sm, InversionMode::Nonneg, order).map(|c| c.inverse.body().clone())
}

#[test]
fn geometric_series() {
    let r = Laurent::laurent();
    let inv = nonneg(&r, &lm(&r, "[[2 - t]]"), 4).unwrap();
    assert_eq!(inv, lm(&r, "[[1/2 + 1/4*t + 1/8*t^2 + 1/16*t^3 + 1/32*t^4]]"));
    assert_eq!(nonneg(&r, &LaurentMatrix::identity(3), 6).unwrap(), LaurentMatrix::identity(3));
    assert_eq!(nonneg(&r, &lm(&r, "[[t]]"), 4).unwrap_err(), SeriesError::ConstantTermSingular);

    let m = lm(&r, "[[1 - t^-1]]");
    let sm = SeriesMatrix::new(r.id(), SeriesWindow::novm(0, 4), m).unwrap();
    let c = invert_series_matrix(&sm, InversionMode::Conegative, 4).unwrap();
    assert!(c.residual_check && c.validate());
    assert_eq!(*c.inverse.body(), lm(&r, "[[1 + t^-1 + t^-2 + t^-3 + t^-4]]"));
}

#[test]
fn tilde_omega_plus() {
    let r = Laurent::laurent();
    assert!(in_tilde_omega_plus(&lm(&r, "[[1 - t]]")).unwrap());
    assert!(!in_tilde_omega_plus(&lm(&r, "[[t]]")).unwrap());
    assert!(in_tilde_omega_plus(&lm(&r, "[[1, t], [0, 1 - t]]")).unwrap());
    assert_eq!(in_tilde_omega_plus(&lm(&r, "[[t^-1]]")).unwrap_err(), SeriesError::NegativeDegreeEntry(-1));
}

#[test]
fn frozen_oracle_inverses() {
    let r = Laurent::laurent();
    let data = common::oracle();
    let cases = data["series"].as_array().unwrap();
    assert!(cases.len() >= 10);
    for case in cases {
        let order = case["order"].as_u64().unwrap() as u32;
        let got = nonneg(&r, &lm(&r, case["matrix"].as_str().unwrap()), order).unwrap();
        assert_eq!(got, lm(&r, case["inverse"].as_str().unwrap()), "{}", case["matrix"]);
    }
}

#[test]
fn matrix_laurent_inverse() {
    let r = Laurent::matrix_laurent(2);
    let m = lm(&r, "[[1 + t*E_1_2]]");
    let sm = SeriesMatrix::psp(r.id(), &m, 5).unwrap();
    let c = invert_series_matrix(&sm, InversionMode::Nonneg, 5).unwrap();
    assert_eq!(*c.inverse.body(), lm(&r, "[[1 - t*E_1_2]]"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residuals_and_uniqueness(seed in any::<u64>()) {
        let r = Laurent::laurent();
        let mut g = common::rng(seed);
        let k = g.gen_range(1..=4);
        let m = lm(&r, &common::random_psp_unit(&mut g, k, 3));
        let sm = SeriesMatrix::psp(r.id(), &m, 24).unwrap();
        let right = invert_series_matrix_with(&sm, InversionMode::Nonneg, 24, Recursion::Right).unwrap();
        let left = invert_series_matrix_with(&sm, InversionMode::Nonneg, 24, Recursion::Left).unwrap();
        prop_assert!(right.residual_check && right.validate());
        prop_assert_eq!(right.inverse.body(), left.inverse.body());
    }

    #[test]
    fn tilde_omega_decides_inversion(seed in any::<u64>(), order in 1u32..=12) {
        let r = Laurent::laurent();
        let mut g = common::rng(seed);
        let k = g.gen_range(1..=3);
        let m = lm(&r, &common::random_square(&mut g, k, 0, 2, 0.5));
        let res = nonneg(&r, &m, order);
        if in_tilde_omega_plus(&m).unwrap() {
            prop_assert!(res.is_ok());
        } else {
            prop_assert_eq!(res.unwrap_err(), SeriesError::ConstantTermSingular);
        }
    }

    #[test]
    fn conegative_geometric(u in 1i64..=5, sign in prop::bool::ANY, order in 1u32..=10) {
        // (u - s t^-1)^-1 = sum_k s^k t^-k / u^(k+1)
        let r = Laurent::laurent();
        let s: i64 = if sign { 1 } else { -1 };
        let m = LaurentMatrix::from_coeffs(1, 1, [(0, Matrix::scalar(1, Q::from_integer(u.into()))), (-1, Matrix::scalar(1, Q::from_integer((-s).into())))]);
        let sm = SeriesMatrix::new(r.id(), SeriesWindow::novm(0, order), m).unwrap();
        let c = invert_series_matrix(&sm, InversionMode::Conegative, order).unwrap();
        let expected = LaurentMatrix::from_coeffs(1, 1, (0..=order as i64).map(|k| {
            let num = Q::from_integer(s.pow(k as u32).into());
            let den = Q::from_integer(u.pow(k as u32 + 1).into());
            (-k, Matrix::scalar(1, num / den))
        }));
        prop_assert!(c.validate());
        prop_assert_eq!(c.inverse.body(), &expected);
    }
}
