//! The isomorphism `R_+ -> Q (+) Q`, `r -> (B r, D r)`, for `Q = t R_+` in L(1,1).

use crate::scalar::Field;

use super::{Element, GradedRing, RingError, WordAlgebra};

type Elem<F> = Element<<WordAlgebra<F> as GradedRing>::Hom>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QIsoDirection {
    Forward,
    Backward,
}

/// `Graded` enforces `r` in `R_+` and `x, y` in `t R_+`; `Full` applies the
/// same formulas on the whole ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QIsoDomain {
    Graded,
    Full,
}

fn check_min_degree<F: Field>(x: &Elem<F>, min: i64, what: &str) -> Result<(), RingError> {
    match x.min_degree() {
        Some(d) if d < min => Err(RingError::DegreeOutOfRange(format!("{what} has a component in degree {d} < {min}"))),
        _ => Ok(()),
    }
}

/// Forward takes `[r]` and returns `[B r, D r]`; backward takes `[x, y]` and
/// returns `[A x + C y]`.
pub fn leavitt_q_iso<F: Field>(
    ring: &WordAlgebra<F>,
    direction: QIsoDirection,
    domain: QIsoDomain,
    input: &[Elem<F>],
) -> Result<Vec<Elem<F>>, RingError> {
    if ring.id() != "leavitt11" {
        return Err(RingError::RingMismatch(ring.id(), "leavitt11".into()));
    }
    let g = |n: &str| ring.generator(n, 1).expect("Leavitt generator");
    match (direction, input) {
        (QIsoDirection::Forward, [r]) => {
            if domain == QIsoDomain::Graded {
                check_min_degree(r, 0, "input")?;
            }
            Ok(vec![ring.mul(&g("B"), r), ring.mul(&g("D"), r)])
        }
        (QIsoDirection::Backward, [x, y]) => {
            if domain == QIsoDomain::Graded {
                check_min_degree(x, 1, "first component")?;
                check_min_degree(y, 1, "second component")?;
            }
            Ok(vec![ring.add(&ring.mul(&g("A"), x), &ring.mul(&g("C"), y))])
        }
        _ => Err(RingError::DegreeOutOfRange(format!("wrong number of inputs ({})", input.len()))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_element;

    #[test]
    fn examples() {
        let l = crate::Leavitt::leavitt11();
        let e = |s: &str| parse_element(&l, s).unwrap();
        let fwd = |x| leavitt_q_iso(&l, QIsoDirection::Forward, QIsoDomain::Graded, &[x]).unwrap();
        let bwd = |x, y| leavitt_q_iso(&l, QIsoDirection::Backward, QIsoDomain::Graded, &[x, y]).unwrap();
        assert_eq!(fwd(l.one()), vec![e("B"), e("D")]);
        assert_eq!(bwd(e("B"), e("D")), vec![l.one()]);
        assert_eq!(bwd(Element::zero(), Element::zero()), vec![Element::zero()]);
        let full = leavitt_q_iso(&l, QIsoDirection::Forward, QIsoDomain::Full, &[e("A")]).unwrap();
        assert_eq!(full, vec![l.one(), Element::zero()]);
        let back = leavitt_q_iso(&l, QIsoDirection::Backward, QIsoDomain::Full, &full).unwrap();
        assert_eq!(back, vec![e("A")]);
        assert!(matches!(
            leavitt_q_iso(&l, QIsoDirection::Forward, QIsoDomain::Graded, &[e("A")]),
            Err(RingError::DegreeOutOfRange(_))
        ));
        assert!(matches!(
            leavitt_q_iso(&l, QIsoDirection::Backward, QIsoDomain::Graded, &[l.one(), Element::zero()]),
            Err(RingError::DegreeOutOfRange(_))
        ));
    }
}
