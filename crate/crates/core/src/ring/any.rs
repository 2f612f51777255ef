use std::str::FromStr;

use crate::Q;

use super::{GradedRing, MatrixLaurent, RingError, WordAlgebra};

/// A built-in ring selected by its identifier.
#[derive(Clone, Debug)]
pub enum AnyRing {
    Finite(MatrixLaurent<Q>),
    Symbolic(WordAlgebra<Q>),
}

impl AnyRing {
    pub fn id(&self) -> String {
        match self {
            AnyRing::Finite(r) => r.id(),
            AnyRing::Symbolic(r) => r.id(),
        }
    }
}

impl FromStr for AnyRing {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, RingError> {
        let s = s.trim();
        match s {
            "laurent" => return Ok(AnyRing::Finite(MatrixLaurent::laurent())),
            "laurent_step2" => return Ok(AnyRing::Finite(MatrixLaurent::laurent_step2())),
            "leavitt11" => return Ok(AnyRing::Symbolic(WordAlgebra::leavitt11())),
            _ => {}
        }
        let n = s
            .strip_prefix("matrix_laurent:")
            .or_else(|| s.strip_prefix("matrix_laurent(").and_then(|r| r.strip_suffix(')')))
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|&n| (1..=8).contains(&n))
            .ok_or_else(|| RingError::UnknownRing(s.into()))?;
        Ok(AnyRing::Finite(MatrixLaurent::matrix_laurent(n)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_ids() {
        for id in ["laurent", "laurent_step2", "leavitt11", "matrix_laurent:3"] {
            assert_eq!(id.parse::<AnyRing>().unwrap().id(), id);
        }
        assert_eq!("matrix_laurent(2)".parse::<AnyRing>().unwrap().id(), "matrix_laurent:2");
        assert!("matrix_laurent:0".parse::<AnyRing>().is_err());
        assert!("polynomial".parse::<AnyRing>().is_err());
    }
}
