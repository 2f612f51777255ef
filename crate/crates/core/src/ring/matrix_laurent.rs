use std::marker::PhantomData;

use crate::linalg::Matrix;
use crate::scalar::Field;

use super::{Degree, Element, FiniteTypeRing, GradedRing, PartitionOfUnity, RingError, Tier};

/// `Mat_n(F)[t, t^-1]` graded by powers of `t`, or with `step = 2` the ring
/// `F[u, u^-1]` with `u` in degree 2 (odd components vanish).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLaurent<F> {
    n: usize,
    step: i64,
    _f: PhantomData<F>,
}

impl<F: Field> MatrixLaurent<F> {
    pub fn new(n: usize, step: i64) -> Self {
        assert!(n >= 1 && step >= 1);
        MatrixLaurent { n, step, _f: PhantomData }
    }

    pub fn laurent() -> Self {
        Self::new(1, 1)
    }

    pub fn matrix_laurent(n: usize) -> Self {
        Self::new(n, 1)
    }

    pub fn laurent_step2() -> Self {
        Self::new(1, 2)
    }

    /// Size of the coefficient matrices.
    pub fn block(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    pub fn has_degree(&self, d: Degree) -> bool {
        d.rem_euclid(self.step) == 0
    }

    fn var(&self) -> &'static str {
        if self.step == 1 {
            "t"
        } else {
            "u"
        }
    }

    fn monomial(&self, d: Degree) -> String {
        let k = d / self.step;
        match k {
            0 => String::new(),
            1 => self.var().to_string(),
            _ => format!("{}^{}", self.var(), k),
        }
    }

    /// `c * t^d` times the identity matrix.
    pub fn scalar_monomial(&self, c: F, d: Degree) -> Element<Matrix<F>> {
        if !self.has_degree(d) {
            return Element::zero();
        }
        self.homogeneous(d, Matrix::scalar(self.n, c))
    }
}

impl<F: Field> GradedRing for MatrixLaurent<F> {
    type Scalar = F;
    type Hom = Matrix<F>;

    fn id(&self) -> String {
        match (self.n, self.step) {
            (1, 1) => "laurent".into(),
            (1, 2) => "laurent_step2".into(),
            (n, 1) => format!("matrix_laurent:{n}"),
            (n, s) => format!("matrix_laurent:{n}:step{s}"),
        }
    }

    fn tier(&self) -> Tier {
        Tier::FiniteType
    }

    fn hom_is_zero(&self, h: &Matrix<F>) -> bool {
        h.is_zero()
    }

    fn hom_add(&self, a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
        a.add(b)
    }

    fn hom_scale(&self, a: &Matrix<F>, c: &F) -> Matrix<F> {
        a.scale(c)
    }

    fn hom_mul(&self, a: &Matrix<F>, _da: Degree, b: &Matrix<F>, _db: Degree) -> Matrix<F> {
        a.mul(b)
    }

    fn hom_one(&self) -> Matrix<F> {
        Matrix::identity(self.n)
    }

    fn hom_terms(&self, h: &Matrix<F>, d: Degree) -> Vec<(F, String)> {
        let mono = self.monomial(d);
        if self.n == 1 {
            return vec![(h.get(0, 0).clone(), mono)];
        }
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                let c = h.get(i, j);
                if c.is_zero() {
                    continue;
                }
                let unit = format!("E_{}_{}", i + 1, j + 1);
                let word = if mono.is_empty() { unit } else { format!("{unit}*{mono}") };
                out.push((c.clone(), word));
            }
        }
        out
    }

    fn generator(&self, name: &str, exp: i64) -> Result<Element<Matrix<F>>, RingError> {
        if name == self.var() {
            return Ok(self.scalar_monomial(F::one(), exp * self.step));
        }
        if let Some(rest) = name.strip_prefix("E_") {
            let mut it = rest.split('_');
            let parse = |s: Option<&str>| s.and_then(|s| s.parse::<usize>().ok()).filter(|&k| k >= 1 && k <= self.n);
            if let (Some(i), Some(j), None) = (parse(it.next()), parse(it.next()), it.next()) {
                if exp != 1 {
                    return Err(RingError::BadExponent(name.into()));
                }
                let mut m = Matrix::zeros(self.n, self.n);
                m.set(i - 1, j - 1, F::one());
                return Ok(self.homogeneous(0, m));
            }
        }
        Err(RingError::UnknownGenerator(name.into()))
    }

    fn stored_partitions(&self) -> Option<(PartitionOfUnity<Matrix<F>>, PartitionOfUnity<Matrix<F>>)> {
        if self.step != 1 {
            return None;
        }
        let t = self.scalar_monomial(F::one(), 1);
        let ti = self.scalar_monomial(F::one(), -1);
        Some((
            PartitionOfUnity::new(self.id(), 1, vec![(t.clone(), ti.clone())]),
            PartitionOfUnity::new(self.id(), -1, vec![(ti, t)]),
        ))
    }

    fn multiplication_surjective(&self, n: Degree) -> Option<bool> {
        let rows: Vec<Vec<F>> = self
            .basis(n)
            .iter()
            .flat_map(|x| self.basis(-n).into_iter().map(move |y| (x.clone(), y)))
            .map(|(x, y)| self.coords(&x.mul(&y), 0))
            .collect();
        if rows.is_empty() {
            return Some(self.dim(0) == 0);
        }
        Some(Matrix::from_rows(rows).rank() == self.dim(0))
    }
}

impl<F: Field> FiniteTypeRing for MatrixLaurent<F> {
    fn dim(&self, d: Degree) -> usize {
        if self.has_degree(d) {
            self.n * self.n
        } else {
            0
        }
    }

    fn basis(&self, d: Degree) -> Vec<Matrix<F>> {
        if !self.has_degree(d) {
            return Vec::new();
        }
        (0..self.n * self.n)
            .map(|k| {
                let mut m = Matrix::zeros(self.n, self.n);
                m.set(k / self.n, k % self.n, F::one());
                m
            })
            .collect()
    }

    fn coords(&self, h: &Matrix<F>, d: Degree) -> Vec<F> {
        if !self.has_degree(d) {
            return Vec::new();
        }
        (0..self.n * self.n).map(|k| h.get(k / self.n, k % self.n).clone()).collect()
    }

    fn from_coords(&self, d: Degree, c: &[F]) -> Matrix<F> {
        if !self.has_degree(d) {
            return Matrix::zeros(self.n, self.n);
        }
        Matrix::from_fn(self.n, self.n, |i, j| c[i * self.n + j].clone())
    }
}
