//! Replacing `C` inside the half-torus by a homotopy equivalent `R_0`-complex.

use std::collections::{BTreeMap, HashMap};

use num_traits::One;

use crate::complexes::{validate_complex, FreeChainComplex};
use crate::linalg::{Echelon, Matrix, SparseVec};
use crate::ring::{Degree, FiniteTypeRing, GradedRing, MatrixLaurent, RingMatrix};
use crate::scalar::Field;

use super::resolution::{gaxpy, gunit, stored_pou, terms_of, GVec, LinMap, Piece, Realiser};
use super::DominationError;

/// `x -> tr_[lo, hi](K x)`; open bounds are `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedTerm<H> {
    pub matrix: RingMatrix<H>,
    pub lo: Option<Degree>,
    pub hi: Option<Degree>,
}

impl<H: Clone> WindowedTerm<H> {
    pub fn full(matrix: RingMatrix<H>) -> Self {
        WindowedTerm { matrix, lo: None, hi: None }
    }

    pub fn window(matrix: RingMatrix<H>, lo: Option<Degree>, hi: Option<Degree>) -> Self {
        WindowedTerm { matrix, lo, hi }
    }
}

/// Levelwise `R_0`-linear map, a sum of windowed matrix multiplications.
/// Levels without terms map to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct WindowedMap<H> {
    pub levels: BTreeMap<i64, Vec<WindowedTerm<H>>>,
}

impl<H: Clone> Default for WindowedMap<H> {
    fn default() -> Self {
        WindowedMap { levels: BTreeMap::new() }
    }
}

impl<H: Clone> WindowedMap<H> {
    pub fn with(mut self, level: i64, term: WindowedTerm<H>) -> Self {
        self.levels.entry(level).or_default().push(term);
        self
    }

    pub fn terms(&self, level: i64) -> &[WindowedTerm<H>] {
        self.levels.get(&level).map_or(&[], |v| v.as_slice())
    }
}

/// `alpha : C -> D`, `beta : D -> C` and `H` with `id - beta alpha = dH + Hd`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatherInput<H> {
    pub c: FreeChainComplex<H>,
    pub d: FreeChainComplex<H>,
    /// Module degrees of `D` run over `[0, d_top]`; `Some(0)` is a complex of free `R_0`-modules.
    pub d_top: Option<Degree>,
    pub alpha: WindowedMap<H>,
    pub beta: WindowedMap<H>,
    pub h: WindowedMap<H>,
}

/// Realised `psi` and `J` on basis vectors of `C_n (x) tR_+` and `D_n (x) tR_+`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatherData<F> {
    pub horizon: u32,
    /// `psi` on the basis of `(D_n (x) tR_+)_e`, keyed by `(n, e)`.
    pub psi: BTreeMap<(i64, Degree), Vec<BTreeMap<Degree, SparseVec<F>>>>,
    /// `J` on the basis of `(C_n (x) tR_+)_e`, keyed by `(n, e)`.
    pub j: BTreeMap<(i64, Degree), Vec<BTreeMap<Degree, SparseVec<F>>>>,
    /// Dimensions of the components of `cone(Xi)` per `(level, degree)`.
    pub xi_cone_dims: BTreeMap<(i64, Degree), usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatherVerdict {
    pub horizon: u32,
    pub hypotheses: bool,
    /// `(what, level, degree)` of the first failed hypothesis.
    pub hypothesis_failure: Option<(String, i64, Degree)>,
    pub homotopy_identity: bool,
    pub first_failure: Option<Degree>,
    /// `None` when the cone was not examined.
    pub cone_exact: Option<bool>,
    pub cone_failure: Option<(i64, Degree)>,
}

impl MatherVerdict {
    pub fn holds(&self) -> bool {
        self.hypotheses && self.homotopy_identity && self.cone_exact == Some(true)
    }
}

fn check_shapes<H: Clone>(input: &MatherInput<H>) -> Result<(), DominationError> {
    let (c, d) = (&input.c, &input.d);
    let check = |name: &str, map: &WindowedMap<H>, rows: &dyn Fn(i64) -> usize, cols: &dyn Fn(i64) -> usize| {
        for (n, terms) in &map.levels {
            for t in terms {
                if (t.matrix.rows(), t.matrix.cols()) != (rows(*n), cols(*n)) {
                    return Err(DominationError::ShapeMismatch(format!(
                        "{name}_{n} is {}x{}, expected {}x{}",
                        t.matrix.rows(),
                        t.matrix.cols(),
                        rows(*n),
                        cols(*n)
                    )));
                }
            }
        }
        Ok(())
    };
    check("alpha", &input.alpha, &|n| d.rank(n), &|n| c.rank(n))?;
    check("beta", &input.beta, &|n| c.rank(n), &|n| d.rank(n))?;
    check("H", &input.h, &|n| c.rank(n + 1), &|n| c.rank(n))?;
    if input.d_top.is_some() {
        for (n, m) in d.differentials() {
            if m.entries().any(|x| x.degrees().any(|e| e != 0)) {
                return Err(DominationError::ShapeMismatch(format!("d_{n} of D has entries outside R_0")));
            }
        }
    }
    Ok(())
}

/// Per-level maps that are zero where absent.
struct Family<'a, F>(BTreeMap<i64, LinMap<'a, F>>);

impl<F: Field> Family<'_, F> {
    fn apply(&self, n: i64, v: &GVec<F>) -> GVec<F> {
        self.0.get(&n).map_or_else(GVec::new, |m| m.apply(v))
    }
}

fn dif<H>(t: &BTreeMap<i64, Vec<WindowedTerm<H>>>, n: i64) -> &[WindowedTerm<H>] {
    t.get(&n).map_or(&[][..], |v| v.as_slice())
}

fn family<'a, R: FiniteTypeRing>(
    rl: &'a Realiser<'_, R>,
    levels: &[i64],
    spec: impl Fn(i64) -> (&'a [WindowedTerm<R::Hom>], Piece, Piece),
) -> Family<'a, R::Scalar> {
    let mut out = BTreeMap::new();
    for &n in levels {
        let (t, s, g) = spec(n);
        if !t.is_empty() {
            out.insert(n, LinMap::new(move |e, i| rl.left_mul(t, s, g, e, i)));
        }
    }
    Family(out)
}

/// Builds `psi`, `J` and `Xi`, checks the hypotheses on `alpha`, `beta`, `H`,
/// the homotopy `(alpha (x) 1)(iota - mu) - psi (alpha (x) 1) = dJ + Jd`
/// through total degree `horizon`, and, when those hold, exactness of
/// `cone(Xi)` along the degree filtration.
pub fn mather_cone<R: FiniteTypeRing>(
    ring: &R,
    input: &MatherInput<R::Hom>,
    horizon: u32,
) -> Result<(MatherData<R::Scalar>, MatherVerdict), DominationError> {
    validate_complex(ring, &input.c)?;
    validate_complex(ring, &input.d)?;
    check_shapes(input)?;
    let owned = Realiser::new(ring, stored_pou(ring)?);
    let rl = &owned;
    let (c, d, top) = (&input.c, &input.d, input.d_top);
    let h = horizon as Degree;

    let mut levels: Vec<i64> = c.ranks().keys().chain(d.ranks().keys()).copied().collect();
    levels.sort();
    levels.dedup();
    let cx = |n: i64| Piece::tensor(c.rank(n), None, 1);
    let cy = |n: i64| Piece::tensor(c.rank(n), None, 0);
    let cp = |n: i64| Piece::plain(c.rank(n), None);
    let dx = |n: i64| Piece::tensor(d.rank(n), top, 1);
    let dy = |n: i64| Piece::tensor(d.rank(n), top, 0);
    let dp = |n: i64| Piece::plain(d.rank(n), top);

    let (ct, dt) = (terms_of(c), terms_of(d));
    let lv = &levels;
    let d_cp = family(rl, lv, |n| (dif(&ct, n), cp(n), cp(n - 1)));
    let d_cx = family(rl, lv, |n| (dif(&ct, n), cx(n), cx(n - 1)));
    let d_cy = family(rl, lv, |n| (dif(&ct, n), cy(n), cy(n - 1)));
    let d_dp = family(rl, lv, |n| (dif(&dt, n), dp(n), dp(n - 1)));
    let d_dx = family(rl, lv, |n| (dif(&dt, n), dx(n), dx(n - 1)));
    let d_dy = family(rl, lv, |n| (dif(&dt, n), dy(n), dy(n - 1)));
    let a_p = family(rl, lv, |n| (input.alpha.terms(n), cp(n), dp(n)));
    let a_x = family(rl, lv, |n| (input.alpha.terms(n), cx(n), dx(n)));
    let a_y = family(rl, lv, |n| (input.alpha.terms(n), cy(n), dy(n)));
    let b_p = family(rl, lv, |n| (input.beta.terms(n), dp(n), cp(n)));
    let b_x = family(rl, lv, |n| (input.beta.terms(n), dx(n), cx(n)));
    let h_p = family(rl, lv, |n| (input.h.terms(n), cp(n), cp(n + 1)));
    let h_x = family(rl, lv, |n| (input.h.terms(n), cx(n), cx(n + 1)));
    let f = Family(levels.iter().map(|&n| (n, LinMap::new(move |e, i| rl.iota_minus_mu(cx(n), cy(n), e, i)))).collect());
    let (a_y, f, b_x, h_x) = (&a_y, &f, &b_x, &h_x);
    let psi = Family(levels.iter().map(|&n| (n, LinMap::new(move |e, i| a_y.apply(n, &f.apply(n, &b_x.apply(n, &gunit(e, i))))))).collect());
    let jmap =
        Family(levels.iter().map(|&n| (n, LinMap::new(move |e, i| a_y.apply(n + 1, &f.apply(n + 1, &h_x.apply(n, &gunit(e, i))))))).collect());

    let mut verdict = MatherVerdict {
        horizon,
        hypotheses: true,
        hypothesis_failure: None,
        homotopy_identity: true,
        first_failure: None,
        cone_exact: None,
        cone_failure: None,
    };
    let one = R::Scalar::one();
    let mut fail_hyp = |what: &str, n: i64, e: Degree| {
        if verdict.hypotheses {
            verdict.hypotheses = false;
            verdict.hypothesis_failure = Some((what.into(), n, e));
        }
    };
    let diff = |a: GVec<R::Scalar>, b: &GVec<R::Scalar>| {
        let mut a = a;
        gaxpy(&mut a, &-one.clone(), b);
        a
    };
    for e in 0..=h {
        for &n in &levels {
            for i in 0..rl.dim(cp(n), e) {
                let x = gunit(e, i);
                if d_dp.apply(n, &a_p.apply(n, &x)) != a_p.apply(n - 1, &d_cp.apply(n, &x)) {
                    fail_hyp("alpha chain map", n, e);
                }
                let lhs = diff(x.clone(), &b_p.apply(n, &a_p.apply(n, &x)));
                let mut rhs = d_cp.apply(n + 1, &h_p.apply(n, &x));
                gaxpy(&mut rhs, &one, &h_p.apply(n - 1, &d_cp.apply(n, &x)));
                if lhs != rhs {
                    fail_hyp("homotopy", n, e);
                }
            }
            for i in 0..rl.dim(dp(n), e) {
                let x = gunit(e, i);
                if d_cp.apply(n, &b_p.apply(n, &x)) != b_p.apply(n - 1, &d_dp.apply(n, &x)) {
                    fail_hyp("beta chain map", n, e);
                }
            }
        }
    }

    let mut data = MatherData { horizon, psi: BTreeMap::new(), j: BTreeMap::new(), xi_cone_dims: BTreeMap::new() };
    'outer: for e in 1..=h {
        for &n in &levels {
            for i in 0..rl.dim(cx(n), e) {
                let x = gunit(e, i);
                let ax = a_x.apply(n, &x);
                let lhs = diff(a_y.apply(n, &f.apply(n, &x)), &psi.apply(n, &ax));
                let mut rhs = d_dy.apply(n + 1, &jmap.apply(n, &x));
                gaxpy(&mut rhs, &one, &jmap.apply(n - 1, &d_cx.apply(n, &x)));
                if lhs != rhs {
                    verdict.homotopy_identity = false;
                    verdict.first_failure = Some(e);
                    break 'outer;
                }
            }
        }
    }
    for &n in &levels {
        for e in 1..=h {
            data.j.insert((n, e), (0..rl.dim(cx(n), e)).map(|i| (*jmap.0[&n].on_basis(e, i)).clone()).collect());
            data.psi.insert((n, e), (0..rl.dim(dx(n), e)).map(|i| (*psi.0[&n].on_basis(e, i)).clone()).collect());
        }
    }

    if !(verdict.hypotheses && verdict.homotopy_identity) {
        return Ok((data, verdict));
    }

    // cone(Xi)_k = X_C(k-2) + Y_C(k-1) + X_D(k-1) + Y_D(k)
    let comp_piece = |k: i64, comp: usize| match comp {
        0 => cx(k - 2),
        1 => cy(k - 1),
        2 => dx(k - 1),
        _ => dy(k),
    };
    let comp_level = |k: i64, comp: usize| match comp {
        0 => k - 2,
        1 | 2 => k - 1,
        _ => k,
    };
    let boundary = |k: i64, comp: usize, v: &GVec<R::Scalar>| -> [GVec<R::Scalar>; 4] {
        let m = comp_level(k, comp);
        let neg = |g: GVec<R::Scalar>| diff(GVec::new(), &g);
        match comp {
            0 => [d_cx.apply(m, v), neg(f.apply(m, v)), a_x.apply(m, v), jmap.apply(m, v)],
            1 => [GVec::new(), neg(d_cy.apply(m, v)), GVec::new(), a_y.apply(m, v)],
            2 => [GVec::new(), GVec::new(), neg(d_dx.apply(m, v)), psi.apply(m, v)],
            _ => [GVec::new(), GVec::new(), GVec::new(), d_dy.apply(m, v)],
        }
    };
    let up = [c.max_entry_degree(), d.max_entry_degree()]
        .into_iter()
        .chain([&input.alpha, &input.beta, &input.h].iter().flat_map(|m| m.levels.values().flatten().map(|t| t.matrix.max_degree())))
        .flatten()
        .max()
        .unwrap_or(0)
        .max(0);
    let down = [&input.alpha, &input.beta, &input.h]
        .iter()
        .flat_map(|m| m.levels.values().flatten().map(|t| t.matrix.min_degree()))
        .flatten()
        .min()
        .unwrap_or(0)
        .min(0);
    let lookahead = 4 + 2 * (-down);
    let src_top = h + lookahead;
    let coord_top = src_top + 2 * up + 2;

    let (klo, khi) = (levels.first().copied().unwrap_or(0), levels.last().copied().unwrap_or(-1) + 2);
    // coordinates of level k: degree descending, so echelon leads sit at the top degree
    let coords = |k: i64| -> HashMap<(Degree, usize), usize> {
        let mut off = HashMap::new();
        let mut next = 0;
        for e in (0..=coord_top).rev() {
            for comp in 0..4 {
                off.insert((e, comp), next);
                next += rl.dim(comp_piece(k, comp), e);
            }
        }
        off
    };
    let flatten = |off: &HashMap<(Degree, usize), usize>, parts: &[GVec<R::Scalar>; 4]| {
        let mut m = BTreeMap::new();
        for (comp, g) in parts.iter().enumerate() {
            for (e, s) in g {
                let base = off[&(*e, comp)];
                for (i, x) in s.entries() {
                    m.insert(base + i, x.clone());
                }
            }
        }
        SparseVec::from_map(m)
    };
    let mut cone_ok = true;
    'levels: for k in klo..=khi {
        let below = coords(k - 1);
        let here = coords(k);
        let degree_of = |idx: usize| (0..=coord_top).find(|e| here[&(*e, 0)] <= idx).unwrap();
        // rank of the boundary restricted to F_h(k)
        let mut ech = Echelon::new();
        let mut zdims = Vec::new();
        let mut fdim = 0;
        for e in 0..=h {
            for comp in 0..4 {
                let p = comp_piece(k, comp);
                let n = rl.dim(p, e);
                data.xi_cone_dims.entry((k, e)).and_modify(|x| *x += n).or_insert(n);
                fdim += n;
                for i in 0..n {
                    ech.insert(flatten(&below, &boundary(k, comp, &gunit(e, i))));
                }
            }
            zdims.push(fdim - ech.rank());
        }
        let mut bech = Echelon::new();
        for e in 0..=src_top {
            for comp in 0..4 {
                for i in 0..rl.dim(comp_piece(k + 1, comp), e) {
                    bech.insert(flatten(&here, &boundary(k + 1, comp, &gunit(e, i))));
                }
            }
        }
        let pivot_degrees: Vec<Degree> = bech.pivots().map(degree_of).collect();
        for e in 0..=h {
            let b = pivot_degrees.iter().filter(|d| **d <= e).count();
            if b != zdims[e as usize] {
                cone_ok = false;
                verdict.cone_failure = Some((k, e));
                break 'levels;
            }
        }
    }
    verdict.cone_exact = Some(cone_ok);
    Ok((data, verdict))
}

fn identity_matrix<R: GradedRing>(ring: &R, n: usize) -> RingMatrix<R::Hom> {
    let mut m = RingMatrix::zeros(n, n);
    for i in 0..n {
        m.set(i, i, ring.one());
    }
    m
}

/// `alpha = beta = id`, `H = 0` on `C` itself.
pub fn mather_identity_example<R: GradedRing>(ring: &R, c: &FreeChainComplex<R::Hom>) -> MatherInput<R::Hom> {
    let mut alpha = WindowedMap::default();
    for (n, r) in c.ranks() {
        alpha = alpha.with(*n, WindowedTerm::full(identity_matrix(ring, *r)));
    }
    MatherInput { c: c.clone(), d: c.clone(), d_top: None, beta: alpha.clone(), alpha, h: WindowedMap::default() }
}

/// `C = (R_+ --t--> R_+)` in levels 1, 0 and `D = R_0` in level 0, with
/// `alpha_0 = tr^0`, `beta_0` the inclusion and `H_0 = tr_{>=0}(t^-1 .)`.
pub fn mather_constructed_example<F: Field>(ring: &MatrixLaurent<F>) -> MatherInput<Matrix<F>> {
    let one = RingMatrix::from_rows(vec![vec![ring.one()]]);
    let t = RingMatrix::from_rows(vec![vec![ring.scalar_monomial(F::one(), 1)]]);
    let t_inv = RingMatrix::from_rows(vec![vec![ring.scalar_monomial(F::one(), -1)]]);
    let c = FreeChainComplex::new(ring.id(), [(0, 1), (1, 1)], [(1, t)]).expect("valid complex");
    let d = FreeChainComplex::new(ring.id(), [(0, 1)], []).expect("valid complex");
    MatherInput {
        c,
        d,
        d_top: Some(0),
        alpha: WindowedMap::default().with(0, WindowedTerm::window(one.clone(), Some(0), Some(0))),
        beta: WindowedMap::default().with(0, WindowedTerm::full(one)),
        h: WindowedMap::default().with(0, WindowedTerm::window(t_inv, Some(0), None)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_matrix;

    #[test]
    fn identity_case() {
        let r = crate::Laurent::laurent();
        let m = parse_matrix(&r, "[[t]]").unwrap();
        let c = FreeChainComplex::new(r.id(), [(0, 1), (1, 1)], [(1, m)]).unwrap();
        let (data, v) = mather_cone(&r, &mather_identity_example(&r, &c), 6).unwrap();
        assert!(v.holds(), "{v:?}");
        assert!(data.j.values().flatten().all(|g| g.is_empty()));
    }

    #[test]
    fn constructed_and_perturbed() {
        let r = crate::Laurent::laurent();
        let input = mather_constructed_example(&r);
        let (_, v) = mather_cone(&r, &input, 8).unwrap();
        assert!(v.holds(), "{v:?}");

        let mut bad = input.clone();
        let one = RingMatrix::from_rows(vec![vec![r.one()]]);
        bad.h = bad.h.with(0, WindowedTerm::window(one, Some(2), Some(2)));
        let (_, v) = mather_cone(&r, &bad, 8).unwrap();
        assert!(!v.hypotheses);
        assert_eq!(v.hypothesis_failure, Some(("homotopy".into(), 1, 1)));
    }

    #[test]
    fn shape_errors() {
        let r = crate::Laurent::laurent();
        let mut input = mather_constructed_example(&r);
        input.beta = WindowedMap::default().with(0, WindowedTerm::full(RingMatrix::zeros(2, 1)));
        assert!(matches!(mather_cone(&r, &input, 4), Err(DominationError::ShapeMismatch(_))));
    }
}
