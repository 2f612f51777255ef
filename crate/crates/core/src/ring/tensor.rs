//! Balanced tensor products `R_a (x)_{R_0} R_b` of components of a
//! finite-type graded ring, realised as a quotient of the field tensor
//! product by the relations `x r (x) y - x (x) r y`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use num_traits::{One, Zero};

use crate::linalg::{Matrix, SparseVec};
use crate::scalar::Field;

use super::{partition_for_degree, Degree, FiniteTypeRing, RingError};

#[derive(Clone, Debug)]
pub struct BalancedTensor<F> {
    pub a: Degree,
    pub b: Degree,
    dim_b: usize,
    /// Field-tensor columns `u * dim_b + v` that survive in the quotient.
    free: Vec<usize>,
    /// Quotient coordinates of each field-tensor basis vector.
    image: Vec<SparseVec<F>>,
}

impl<F: Field> BalancedTensor<F> {
    pub fn new<R: FiniteTypeRing<Scalar = F>>(ring: &R, a: Degree, b: Degree) -> Self {
        let (ba, b0, bb) = (ring.basis(a), ring.basis(0), ring.basis(b));
        let (da, db) = (ba.len(), bb.len());
        let width = da * db;
        let mut rels = Vec::new();
        for (u, x) in ba.iter().enumerate() {
            for r in &b0 {
                let xr = ring.coords(&ring.hom_mul(x, a, r, 0), a);
                for (v, y) in bb.iter().enumerate() {
                    let ry = ring.coords(&ring.hom_mul(r, 0, y, b), b);
                    let mut row = vec![F::zero(); width];
                    for (i, c) in xr.iter().enumerate() {
                        if !c.is_zero() {
                            row[i * db + v] = row[i * db + v].add_ref(c);
                        }
                    }
                    for (j, c) in ry.iter().enumerate() {
                        if !c.is_zero() {
                            row[u * db + j] = row[u * db + j].sub_ref(c);
                        }
                    }
                    if row.iter().any(|c| !c.is_zero()) {
                        rels.push(row);
                    }
                }
            }
        }
        let (rref, pivots) = if rels.is_empty() { (Matrix::zeros(0, width), Vec::new()) } else { Matrix::from_rows(rels).rref() };
        let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
        let qidx: HashMap<usize, usize> = free.iter().enumerate().map(|(q, &c)| (c, q)).collect();
        let mut image = vec![SparseVec::new(); width];
        for &c in &free {
            image[c] = SparseVec::from_dense(&unit::<F>(free.len(), qidx[&c]));
        }
        for (i, &p) in pivots.iter().enumerate() {
            let v: Vec<F> = free.iter().map(|&c| -rref.get(i, c).clone()).collect();
            image[p] = SparseVec::from_dense(&v);
        }
        BalancedTensor { a, b, dim_b: db, free, image }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Field-tensor basis pair `(u, v)` represented by quotient basis vector `q`.
    pub fn basis_pair(&self, q: usize) -> (usize, usize) {
        (self.free[q] / self.dim_b, self.free[q] % self.dim_b)
    }

    /// Quotient coordinates of `x (x) y` from the coordinates of `x` and `y`.
    pub fn pure(&self, x: &[F], y: &[F]) -> SparseVec<F> {
        let mut acc = SparseVec::new();
        for (u, xu) in x.iter().enumerate() {
            if xu.is_zero() {
                continue;
            }
            for (v, yv) in y.iter().enumerate() {
                if yv.is_zero() {
                    continue;
                }
                acc = acc.axpy(&xu.mul_ref(yv), &self.image[u * self.dim_b + v]);
            }
        }
        acc
    }
}

fn unit<F: Field>(n: usize, k: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[k] = F::one();
    v
}

/// Lazily built balanced tensors for one ring.
pub struct TensorCache<'r, R: FiniteTypeRing> {
    ring: &'r R,
    cache: RefCell<HashMap<(Degree, Degree), Rc<BalancedTensor<R::Scalar>>>>,
}

impl<'r, R: FiniteTypeRing> TensorCache<'r, R> {
    pub fn new(ring: &'r R) -> Self {
        TensorCache { ring, cache: RefCell::new(HashMap::new()) }
    }

    pub fn ring(&self) -> &'r R {
        self.ring
    }

    pub fn get(&self, a: Degree, b: Degree) -> Rc<BalancedTensor<R::Scalar>> {
        self.cache.borrow_mut().entry((a, b)).or_insert_with(|| Rc::new(BalancedTensor::new(self.ring, a, b))).clone()
    }

    /// `x (x) y` for homogeneous `x` of degree `a` and `y` of degree `b`.
    pub fn pure(&self, a: Degree, x: &R::Hom, b: Degree, y: &R::Hom) -> SparseVec<R::Scalar> {
        let t = self.get(a, b);
        t.pure(&self.ring.coords(x, a), &self.ring.coords(y, b))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BimoduleReport {
    pub n: Degree,
    pub tensor_dim: usize,
    pub kappa_after_pi: bool,
    pub pi_after_kappa: bool,
    pub mult_iso_degrees: Vec<Degree>,
    pub mult_iso: bool,
    pub failures: Vec<String>,
}

impl BimoduleReport {
    pub fn ok(&self) -> bool {
        self.kappa_after_pi && self.pi_after_kappa && self.mult_iso
    }
}

/// Checks that `pi_n : R_n (x) R_-n -> R_0` and `kappa_n` are mutually
/// inverse, and that multiplication `R_-n (x) R_b -> R_{b-n}` is invertible
/// with inverse `z -> sum_j alpha_j (x) beta_j z` for `0 <= b <= horizon`.
pub fn bimodule_iso_check<R: FiniteTypeRing>(ring: &R, n: Degree, horizon: u32) -> Result<BimoduleReport, RingError> {
    let p = partition_for_degree(ring, n)?;
    let q = partition_for_degree(ring, -n)?;
    let tc = TensorCache::new(ring);
    let mut failures = Vec::new();

    let t = tc.get(n, -n);
    let (bn, bm, b0) = (ring.basis(n), ring.basis(-n), ring.basis(0));
    // kappa(r) = sum_j alpha_j (x) beta_j r
    let kappa = |r: &R::Hom, deg_r: Degree, part: &super::PartitionOfUnity<R::Hom>, a: Degree| {
        let mut acc = SparseVec::new();
        for (al, be) in &part.pairs {
            let (Some(x), Some(y)) = (al.component(a), be.component(-a)) else { continue };
            let yr = ring.hom_mul(y, -a, r, deg_r);
            acc = acc.axpy(&R::Scalar::one(), &tc.pure(a, x, -a + deg_r, &yr));
        }
        acc
    };

    let mut kappa_after_pi = true;
    for qi in 0..t.dim() {
        let (u, v) = t.basis_pair(qi);
        let prod = ring.hom_mul(&bn[u], n, &bm[v], -n);
        let back = kappa(&prod, 0, &p, n);
        if back != SparseVec::from_dense(&unit::<R::Scalar>(t.dim(), qi)) {
            kappa_after_pi = false;
            failures.push(format!("kappa(pi(e_{qi})) != e_{qi} in degree {n}"));
        }
    }
    let mut pi_after_kappa = true;
    for (k, r) in b0.iter().enumerate() {
        let mut total = vec![R::Scalar::zero(); ring.dim(0)];
        for (al, be) in &p.pairs {
            let (Some(x), Some(y)) = (al.component(n), be.component(-n)) else { continue };
            let xyr = ring.hom_mul(&ring.hom_mul(x, n, y, -n), 0, r, 0);
            for (i, c) in ring.coords(&xyr, 0).into_iter().enumerate() {
                total[i] = total[i].add_ref(&c);
            }
        }
        if total != ring.coords(r, 0) {
            pi_after_kappa = false;
            failures.push(format!("pi(kappa(r_{k})) != r_{k} for degree {n}"));
        }
    }

    let mut mult_iso = true;
    let mut mult_iso_degrees = Vec::new();
    for b in 0..=horizon as Degree {
        let t = tc.get(-n, b);
        let target = b - n;
        for qi in 0..t.dim() {
            let (u, v) = t.basis_pair(qi);
            let (x, y) = (&ring.basis(-n)[u], &ring.basis(b)[v]);
            let z = ring.hom_mul(x, -n, y, b);
            if kappa(&z, target, &q, -n) != SparseVec::from_dense(&unit::<R::Scalar>(t.dim(), qi)) {
                mult_iso = false;
                failures.push(format!("multiplication inverse fails on R_{} (x) R_{b}", -n));
            }
        }
        for (k, z) in ring.basis(target).iter().enumerate() {
            let mut total = vec![R::Scalar::zero(); ring.dim(target)];
            for (al, be) in &q.pairs {
                let (Some(x), Some(y)) = (al.component(-n), be.component(n)) else { continue };
                let xyz = ring.hom_mul(&ring.hom_mul(x, -n, y, n), 0, z, target);
                for (i, c) in ring.coords(&xyz, target).into_iter().enumerate() {
                    total[i] = total[i].add_ref(&c);
                }
            }
            if total != ring.coords(z, target) {
                mult_iso = false;
                failures.push(format!("multiplication fails to recover basis vector {k} of R_{target}"));
            }
        }
        mult_iso_degrees.push(b);
    }

    Ok(BimoduleReport { n, tensor_dim: t.dim(), kappa_after_pi, pi_after_kappa, mult_iso_degrees, mult_iso, failures })
}
