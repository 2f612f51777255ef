use super::{Degree, Element, GradedRing, RingError};

/// `1 = sum_j alpha_j beta_j` with `alpha_j` in degree `n`, `beta_j` in degree `-n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartitionOfUnity<H> {
    pub ring: String,
    pub n: Degree,
    pub pairs: Vec<(Element<H>, Element<H>)>,
}

impl<H> PartitionOfUnity<H> {
    pub fn new(ring: String, n: Degree, pairs: Vec<(Element<H>, Element<H>)>) -> Self {
        PartitionOfUnity { ring, n, pairs }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionCheck {
    pub ok: bool,
    pub diagnostics: Vec<String>,
}

pub fn verify_partition<R: GradedRing>(ring: &R, p: &PartitionOfUnity<R::Hom>) -> PartitionCheck {
    let mut diagnostics = Vec::new();
    if p.ring != ring.id() {
        diagnostics.push(format!("partition belongs to {}, not {}", p.ring, ring.id()));
    }
    for (j, (a, b)) in p.pairs.iter().enumerate() {
        if a.homogeneous_degree() != Some(p.n) {
            diagnostics.push(format!("alpha_{j} is not homogeneous of degree {}", p.n));
        }
        if b.homogeneous_degree() != Some(-p.n) {
            diagnostics.push(format!("beta_{j} is not homogeneous of degree {}", -p.n));
        }
    }
    let products: Vec<_> = p.pairs.iter().map(|(a, b)| ring.mul(a, b)).collect();
    if ring.sum(&products) != ring.one() {
        diagnostics.push("sum of alpha_j * beta_j is not 1".into());
    }
    PartitionCheck { ok: diagnostics.is_empty(), diagnostics }
}

/// Pairs `(alpha_i alpha'_j, beta'_j beta_i)`, a partition of type `(m+n, -m-n)`.
pub fn compose_partitions<R: GradedRing>(
    ring: &R,
    p: &PartitionOfUnity<R::Hom>,
    q: &PartitionOfUnity<R::Hom>,
) -> Result<PartitionOfUnity<R::Hom>, RingError> {
    if p.ring != q.ring {
        return Err(RingError::RingMismatch(p.ring.clone(), q.ring.clone()));
    }
    if p.ring != ring.id() {
        return Err(RingError::RingMismatch(p.ring.clone(), ring.id()));
    }
    let mut pairs = Vec::new();
    for (a, b) in &p.pairs {
        for (qa, qb) in &q.pairs {
            let alpha = ring.mul(a, qa);
            let beta = ring.mul(qb, b);
            if !alpha.is_zero() && !beta.is_zero() {
                pairs.push((alpha, beta));
            }
        }
    }
    Ok(PartitionOfUnity::new(p.ring.clone(), p.n + q.n, pairs))
}

pub fn trivial_partition<R: GradedRing>(ring: &R) -> PartitionOfUnity<R::Hom> {
    PartitionOfUnity::new(ring.id(), 0, vec![(ring.one(), ring.one())])
}

/// Partition of type `(n,-n)` by `|n|`-fold composition of the stored one.
pub fn partition_for_degree<R: GradedRing>(ring: &R, n: Degree) -> Result<PartitionOfUnity<R::Hom>, RingError> {
    if n == 0 {
        return Ok(trivial_partition(ring));
    }
    let (pos, neg) = ring.stored_partitions().ok_or_else(|| RingError::NotStronglyGraded(ring.id()))?;
    let base = if n > 0 { pos } else { neg };
    let mut acc = base.clone();
    for _ in 1..n.unsigned_abs() {
        acc = compose_partitions(ring, &acc, &base)?;
    }
    Ok(acc)
}

#[derive(Clone, Debug)]
pub struct StrongGradingVerdict<H> {
    pub strongly_graded: bool,
    pub witnesses: Option<(PartitionOfUnity<H>, PartitionOfUnity<H>)>,
    /// Degrees at which surjectivity of `R_n (x) R_-n -> R_0` was checked directly.
    pub surjective_degrees: Vec<Degree>,
    pub failure_degree: Option<Degree>,
}

/// Strong-grading verdict from stored partitions plus, where the ring can
/// decide it, degreewise surjectivity for `|n| <= n_max`.
pub fn check_strongly_graded<R: GradedRing>(ring: &R, n_max: u32) -> StrongGradingVerdict<R::Hom> {
    let witnesses = ring
        .stored_partitions()
        .filter(|(p, m)| p.n == 1 && m.n == -1 && verify_partition(ring, p).ok && verify_partition(ring, m).ok);
    let mut surjective_degrees = Vec::new();
    let mut failure_degree = None;
    'outer: for k in 1..=n_max as Degree {
        for n in [k, -k] {
            match ring.multiplication_surjective(n) {
                Some(true) => surjective_degrees.push(n),
                Some(false) => {
                    failure_degree = Some(n);
                    break 'outer;
                }
                None => break 'outer,
            }
        }
    }
    StrongGradingVerdict {
        strongly_graded: witnesses.is_some() && failure_degree.is_none(),
        witnesses,
        surjective_degrees,
        failure_degree,
    }
}
