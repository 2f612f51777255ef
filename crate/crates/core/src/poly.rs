//! Univariate polynomials and the rational function field `F(t)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::{fmt_rational, Field};

/// Dense polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, PartialEq, Debug)]
pub struct Polynomial<F> {
    coeffs: Vec<F>,
}

impl<F: Field> Polynomial<F> {
    pub fn new(mut coeffs: Vec<F>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: F) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: F, k: usize) -> Self {
        let mut v = vec![F::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> F {
        self.coeffs.get(k).cloned().unwrap_or_else(F::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    /// Lowest exponent with a non-zero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.mul_ref(c)).collect())
    }

    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let inv = d.lead().inv();
        let mut r = self.coeffs.clone();
        let mut quot = vec![F::zero(); r.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1;
            let c = r[k].mul_ref(&inv);
            if !c.is_zero() {
                for (i, dc) in d.coeffs.iter().enumerate() {
                    r[k - dd + i] = r[k - dd + i].sub_ref(&c.mul_ref(dc));
                }
                quot[k - dd] = c;
            }
            r.pop();
        }
        (Self::new(quot), Self::new(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.lead().inv())
    }

    pub fn gcd(a: &Self, b: &Self) -> Self {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }
}

impl<F: Field> Zero for Polynomial<F> {
    fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl<F: Field> One for Polynomial<F> {
    fn one() -> Self {
        Self::constant(F::one())
    }
}

impl<F: Field> Add for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn add(self, o: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k).add_ref(&o.coeff(k))).collect())
    }
}

impl<F: Field> Sub for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn sub(self, o: Self) -> Polynomial<F> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Polynomial::new((0..n).map(|k| self.coeff(k).sub_ref(&o.coeff(k))).collect())
    }
}

impl<F: Field> Mul for &Polynomial<F> {
    type Output = Polynomial<F>;
    fn mul(self, o: Self) -> Polynomial<F> {
        if self.is_zero() || o.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![F::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Polynomial::new(v)
    }
}

impl<F: Field> Add for Polynomial<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl<F: Field> Mul for Polynomial<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl<F: Field> fmt::Display for Polynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let var = match k {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{k}"),
            };
            let (neg, mag) = match c.to_rational() {
                Some(q) if q.is_negative() => (true, fmt_rational(&-q)),
                Some(q) => (false, fmt_rational(&q)),
                None => (false, format!("({c})")),
            };
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            match (var.is_empty(), mag == "1") {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{var}")?,
                (false, false) => write!(f, "{mag}*{var}")?,
            }
        }
        Ok(())
    }
}

/// Element of `F(t)` kept as a reduced fraction with monic denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalFunction<F> {
    num: Polynomial<F>,
    den: Polynomial<F>,
}

impl<F: Field> RationalFunction<F> {
    pub fn new(num: Polynomial<F>, den: Polynomial<F>) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = Polynomial::gcd(&num, &den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let l = den.lead().inv();
        num = num.scale(&l);
        den = den.scale(&l);
        RationalFunction { num, den }
    }

    pub fn from_poly(p: Polynomial<F>) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    /// Laurent polynomial `sum c_k t^k` as a rational function.
    pub fn from_laurent(terms: &BTreeMap<i64, F>) -> Self {
        let Some(low) = terms.keys().next().copied() else {
            return Self::zero();
        };
        let shift = low.min(0);
        let mut coeffs = Vec::new();
        for (&k, c) in terms {
            let e = (k - shift) as usize;
            if coeffs.len() <= e {
                coeffs.resize(e + 1, F::zero());
            }
            coeffs[e] = c.clone();
        }
        Self::new(Polynomial::new(coeffs), Polynomial::monomial(F::one(), (-shift) as usize))
    }

    pub fn numer(&self) -> &Polynomial<F> {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial<F> {
        &self.den
    }

    /// Expansion as a series in `t^{-1}` with terms of degree `>= low`.
    ///
    /// Every rational function is a Laurent series in `t^{-1}` with finitely
    /// many positive powers; the expansion is exact in the degrees returned.
    pub fn expand_conegative(&self, low: i64) -> BTreeMap<i64, F> {
        let mut out = BTreeMap::new();
        let Some(dn) = self.num.degree() else {
            return out;
        };
        let dd = self.den.degree().unwrap() as i64;
        let mut rem: BTreeMap<i64, F> =
            self.num.coeffs().iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as i64, c.clone())).collect();
        let lead_inv = self.den.lead().inv();
        let mut k = dn as i64 - dd;
        while k >= low {
            let top = k + dd;
            if let Some(c) = rem.remove(&top) {
                let c = c.mul_ref(&lead_inv);
                for (i, dc) in self.den.coeffs().iter().enumerate().take(dd as usize) {
                    if dc.is_zero() {
                        continue;
                    }
                    let e = k + i as i64;
                    let v = rem.get(&e).cloned().unwrap_or_else(F::zero).sub_ref(&c.mul_ref(dc));
                    if v.is_zero() {
                        rem.remove(&e);
                    } else {
                        rem.insert(e, v);
                    }
                }
                out.insert(k, c);
            }
            k -= 1;
        }
        out
    }
}

impl<F: Field> Zero for RationalFunction<F> {
    fn zero() -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Field> One for RationalFunction<F> {
    fn one() -> Self {
        RationalFunction { num: Polynomial::one(), den: Polynomial::one() }
    }
}

impl<F: Field> Add for RationalFunction<F> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            return Self::new(&self.num + &o.num, self.den);
        }
        Self::new(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl<F: Field> Sub for RationalFunction<F> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl<F: Field> Mul for RationalFunction<F> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<F: Field> Div for RationalFunction<F> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(!o.is_zero(), "division by zero in F(t)");
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }
}

/// Remainder in a field is always zero; present only to satisfy `NumOps`.
impl<F: Field> Rem for RationalFunction<F> {
    type Output = Self;
    fn rem(self, _o: Self) -> Self {
        Self::zero()
    }
}

impl<F: Field> Neg for RationalFunction<F> {
    type Output = Self;
    fn neg(self) -> Self {
        RationalFunction { num: self.num.scale(&-F::one()), den: self.den }
    }
}

impl<F: Field> fmt::Display for RationalFunction<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl<F: Field> Field for RationalFunction<F> {
    fn from_rational(q: &BigRational) -> Self {
        Self::from_poly(Polynomial::constant(F::from_rational(q)))
    }

    fn to_rational(&self) -> Option<BigRational> {
        if self.den.is_one() && self.num.degree().unwrap_or(0) == 0 {
            return self.num.coeff(0).to_rational();
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;
    use crate::Q;

    fn p(c: &[i64]) -> Polynomial<Q> {
        Polynomial::new(c.iter().map(|&x| q(x, 1)).collect())
    }

    #[test]
    fn gcd_and_reduction() {
        let a = &p(&[-1, 0, 1]) * &p(&[2, 1]);
        let b = &p(&[1, 1]) * &p(&[3, 1]);
        assert_eq!(Polynomial::gcd(&a, &b), p(&[1, 1]));
        let f = RationalFunction::new(a, b);
        assert_eq!(f.denom(), &p(&[3, 1]));
    }

    #[test]
    fn field_arithmetic() {
        let x = RationalFunction::new(p(&[1]), p(&[0, 1]));
        let y = RationalFunction::from_poly(p(&[0, 1]));
        assert!((x.clone() * y.clone()).is_one());
        assert_eq!(x.clone() + x.clone() - x.clone(), x);
        assert!((y.clone() / y).is_one());
    }

    #[test]
    fn conegative_expansion_of_geometric_series() {
        // 1 / (1 - t^{-1}) = t / (t - 1) = 1 + t^{-1} + t^{-2} + ...
        let f = RationalFunction::new(p(&[0, 1]), p(&[-1, 1]));
        let s = f.expand_conegative(-4);
        assert_eq!(s.len(), 5);
        assert!(s.values().all(|c| *c == q(1, 1)));
        // (t^2 + 1) / t = t + t^{-1}
        let g = RationalFunction::new(p(&[1, 0, 1]), p(&[0, 1]));
        let s = g.expand_conegative(-6);
        assert_eq!(s.keys().copied().collect::<Vec<_>>(), vec![-1, 1]);
    }
}
