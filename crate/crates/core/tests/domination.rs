mod common;

use gradedfd::cli::{build_complex, parse_complex_text};
use gradedfd::complexes::{expand, FreeChainComplex};
use gradedfd::domination::{
    canonical_resolution, findom_detect, half_torus, is_fredholm, leavitt_findom_example, mather_cone,
    mather_constructed_example, mather_identity_example, novikov_contractibility, DominationError, WindowedTerm,
};
use gradedfd::expr::parse_matrix;
use gradedfd::ring::{GradedRing, RingMatrix};
use gradedfd::series::LaurentMatrix;
use gradedfd::{Laurent, QMatrix};
use proptest::prelude::*;
use rand::Rng;

fn cx(ring: &Laurent, ranks: &[(i64, usize)], d: &[(i64, &str)]) -> FreeChainComplex<QMatrix> {
    FreeChainComplex::new(ring.id(), ranks.iter().copied(), d.iter().map(|(n, s)| (*n, parse_matrix(ring, s).unwrap())))
        .unwrap()
}

#[test]
fn frozen_oracle_fredholm() {
    let r = Laurent::laurent();
    let data = common::oracle();
    for case in data["fredholm"].as_array().unwrap() {
        let src = case["matrix"].as_str().unwrap();
        let v = is_fredholm(&r, &parse_matrix(&r, src).unwrap(), 24).unwrap();
        assert_eq!(v.fredholm, case["fredholm"].as_bool().unwrap(), "{src}");
        assert_eq!(v.m, case["m"].as_i64().unwrap(), "{src}");
        assert_eq!(v.oracle_det.as_deref(), Some(case["det"].as_str().unwrap_or("0")), "{src}");
        assert_eq!(v.total_dim.map(|d| d as u64), case["total_dim"].as_u64(), "{src}");
        assert!(v.agree(1), "{src}");
    }
}

#[test]
fn frozen_oracle_findom() {
    let r = Laurent::laurent();
    let data = common::oracle();
    for case in data["complexes"].as_array().unwrap() {
        let text = case["complex"].as_str().unwrap();
        let c = build_complex(&r, &parse_complex_text(text).unwrap()).unwrap();
        let expected = case["novikov_acyclic"].as_bool().unwrap();
        assert_eq!(novikov_contractibility(&r, &c).unwrap(), expected, "{text}");
        let v = findom_detect(&r, &c, 10).unwrap();
        assert_eq!(v.finitely_dominated, expected, "{text}");
        assert_eq!(v.certificate.is_some_and(|k| k.validate(&expand(&r, &c))), expected, "{text}");
    }
}

#[test]
fn findom_examples() {
    let r = Laurent::laurent();
    let t = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[t]]")]);
    let v = findom_detect(&r, &t, 6).unwrap();
    assert!(v.finitely_dominated);
    let cert = v.certificate.unwrap();
    assert_eq!(cert.s_plus[&0], LaurentMatrix::from_ring_matrix(&r, &parse_matrix(&r, "[[t^-1]]").unwrap()));
    let zero = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[0]]")]);
    assert!(!findom_detect(&r, &zero, 6).unwrap().finitely_dominated);

    let r2 = Laurent::laurent_step2();
    let c2 = FreeChainComplex::zero(r2.id());
    assert!(matches!(findom_detect(&r2, &c2, 6), Err(DominationError::UnsupportedRing(_))));
}

#[test]
fn fredholm_examples() {
    let r = Laurent::laurent();
    let v = is_fredholm(&r, &parse_matrix(&r, "[[t^-1 + 1]]").unwrap(), 16).unwrap();
    assert_eq!((v.suitable_m, v.m, v.total_dim), (Some(1), 1, Some(1)));
    let v = is_fredholm(&r, &parse_matrix(&r, "[[1, 1], [1, 1]]").unwrap(), 16).unwrap();
    assert!(!v.fredholm && !v.injective);
    assert!(matches!(
        is_fredholm(&r, &parse_matrix(&r, "[[1, 1]]").unwrap(), 16),
        Err(DominationError::ShapeMismatch(_))
    ));
}

#[test]
fn resolution_and_half_torus() {
    let r = Laurent::laurent();
    let c = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[1 + t]]")]);
    let pou = r.stored_partitions().unwrap().0;
    let data = canonical_resolution(&r, &c, &pou, 8).unwrap();
    assert!(data.all_hold(), "{:?}", data.checks);
    let h = half_torus(&r, &c, 8).unwrap();
    assert!(h.ses_exact && h.first_failure.is_none());

    let r2 = Laurent::laurent_step2();
    let c2 = FreeChainComplex::zero(r2.id());
    assert!(matches!(half_torus(&r2, &c2, 4), Err(DominationError::NotStronglyGraded(_))));
}

#[test]
fn mather_examples() {
    for ring in [Laurent::laurent(), Laurent::matrix_laurent(2)] {
        let input = mather_constructed_example(&ring);
        let (_, v) = mather_cone(&ring, &input, 10).unwrap();
        assert!(v.holds(), "{v:?}");
        let mut bad = input.clone();
        bad.h = bad.h.with(0, WindowedTerm::window(RingMatrix::from_rows(vec![vec![ring.one()]]), Some(2), Some(2)));
        assert!(!mather_cone(&ring, &bad, 10).unwrap().1.holds());
    }
    let r = Laurent::laurent();
    let c = cx(&r, &[(0, 1), (1, 1)], &[(1, "[[1 - t]]")]);
    let (_, v) = mather_cone(&r, &mather_identity_example(&r, &c), 8).unwrap();
    assert!(v.hypotheses);
}

#[test]
fn leavitt_report() {
    let rep = leavitt_findom_example();
    assert!(rep.all_pass(), "{:?}", rep.failures());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn findom_matches_novikov(seed in any::<u64>()) {
        let r = Laurent::laurent();
        let c = common::random_complex(&r, &mut common::rng(seed), &common::LAURENT_SHAPE);
        let v = findom_detect(&r, &c, 8).unwrap();
        prop_assert_eq!(v.finitely_dominated, novikov_contractibility(&r, &c).unwrap());
        if let Some(cert) = v.certificate {
            prop_assert!(cert.validate(&expand(&r, &c)));
        }
    }

    #[test]
    fn shifting_by_t_adds_the_size(seed in any::<u64>()) {
        let r = Laurent::laurent();
        let mut g = common::rng(seed);
        let k = g.gen_range(1..=3);
        let a = parse_matrix(&r, &common::random_square(&mut g, k, 0, 2, 0.5)).unwrap();
        let t = parse_matrix(&r, "[[t]]").unwrap().get(0, 0).clone();
        let ta = a.map(|e| r.mul(&t, e));
        let (v, w) = (is_fredholm(&r, &a, 16).unwrap(), is_fredholm(&r, &ta, 16).unwrap());
        prop_assert_eq!(v.fredholm, w.fredholm);
        if v.fredholm {
            prop_assert_eq!(w.total_dim, v.total_dim.map(|d| d + k));
        }
    }
}
