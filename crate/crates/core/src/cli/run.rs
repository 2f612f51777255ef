use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::complexes::{r0_routes_report, FreeChainComplex};
use crate::domination::{findom_detect, half_torus, is_fredholm, leavitt_findom_example};
use crate::expr::{parse_expr, parse_matrix, print_element, normal_form};
use crate::ring::{check_strongly_graded, AnyRing, GradedRing, WordAlgebra};
use crate::series::{invert_series_matrix, LaurentMatrix, SeriesError, SeriesMatrix};
use crate::Laurent;

use super::certificate::{
    check_strong_witness, findom_witness, fredholm_witness, half_torus_witness, invert_witness, leavitt_witness, nf_witness,
    parse_mode, psp_witness, series_window,
};
use super::complex_file::{build_complex, parse_complex_text, print_complex, ComplexSpec};
use super::{verify_certificate, CertificateFile, CertificateInput, CliError, JobDescription, Task};

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub verdict: bool,
    pub certificate: Option<CertificateFile>,
    pub summary: Value,
}

impl Outcome {
    /// 0 for an affirmative verdict, 1 for a negative one.
    pub fn exit_code(&self) -> i32 {
        if self.verdict {
            0
        } else {
            1
        }
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

struct Inputs {
    ring: AnyRing,
    complex: Option<ComplexSpec>,
}

fn inputs(job: &JobDescription, base: &Path) -> Result<Inputs, CliError> {
    let text = match (&job.complex, &job.complex_file) {
        (Some(t), _) => Some(t.clone()),
        (None, Some(p)) => Some(read(&resolve(base, p))?),
        (None, None) => None,
    };
    let complex = text.as_deref().map(parse_complex_text).transpose()?;
    let id = match (&job.ring, complex.as_ref().and_then(|c| c.ring.clone())) {
        (Some(r), _) => r.clone(),
        (None, Some(r)) => r,
        (None, None) if job.task == Task::LeavittExample => "leavitt11".into(),
        (None, None) => return Err(CliError::Option("a ring is required".into())),
    };
    Ok(Inputs { ring: id.parse()?, complex })
}

fn finite<'a>(ring: &'a AnyRing, task: Task) -> Result<&'a Laurent, CliError> {
    match ring {
        AnyRing::Finite(r) => Ok(r),
        AnyRing::Symbolic(r) => Err(CliError::Unsupported(format!("{task} needs a ring of finite type, got {}", r.id()))),
    }
}

fn need_matrix(job: &JobDescription) -> Result<&str, CliError> {
    job.matrix.as_deref().ok_or_else(|| CliError::Option(format!("{} needs a matrix", job.task)))
}

fn need_complex<R: GradedRing>(ring: &R, inp: &Inputs, task: Task) -> Result<FreeChainComplex<R::Hom>, CliError> {
    let spec = inp.complex.as_ref().ok_or_else(|| CliError::Option(format!("{task} needs a complex")))?;
    build_complex(ring, spec)
}

fn check_strong<R: GradedRing>(ring: &R, nmax: u32, cert: &mut CertificateFile) -> Value {
    let v = check_strongly_graded(ring, nmax);
    cert.verdict = v.strongly_graded;
    cert.nmax = Some(nmax);
    if let (true, Some((p, m))) = (v.strongly_graded, &v.witnesses) {
        cert.witness = check_strong_witness(ring, p, m, &v.surjective_degrees);
    }
    json!({
        "strongly_graded": v.strongly_graded,
        "partitions_verified": v.witnesses.is_some(),
        "surjective_degrees": v.surjective_degrees,
        "failure_degree": v.failure_degree,
    })
}

fn nf<R: GradedRing>(ring: &R, src: &str, cert: &mut CertificateFile) -> Result<Value, CliError> {
    let e = parse_expr(src)?;
    let x = normal_form(ring, &e)?;
    let printed = print_element(ring, &x);
    cert.verdict = true;
    cert.witness = nf_witness(&printed);
    Ok(json!({ "normal_form": printed, "degrees": x.degrees().collect::<Vec<_>>() }))
}

/// Runs one job without touching the filesystem beyond its inputs.
pub fn run(job: &JobDescription, base: &Path) -> Result<Outcome, CliError> {
    job.validate()?;
    if job.task == Task::VerifyCert {
        let path = job.cert.as_ref().ok_or_else(|| CliError::Option("verify-cert needs a certificate path".into()))?;
        let report = verify_certificate(&CertificateFile::load(&resolve(base, path))?)?;
        return Ok(Outcome { verdict: report.valid, certificate: None, summary: json!(report) });
    }
    let inp = inputs(job, base)?;
    let echo = CertificateInput { expr: job.expr.clone(), matrix: job.matrix.clone(), complex: None };
    let mut cert = CertificateFile::new(job.task, inp.ring.id(), false, echo);
    let summary = match job.task {
        Task::CheckStrong => match &inp.ring {
            AnyRing::Finite(r) => check_strong(r, job.nmax, &mut cert),
            AnyRing::Symbolic(r) => check_strong(r, job.nmax, &mut cert),
        },
        Task::Nf => {
            let src = job.expr.as_deref().ok_or_else(|| CliError::Option("nf needs an expression".into()))?;
            match &inp.ring {
                AnyRing::Finite(r) => nf(r, src, &mut cert)?,
                AnyRing::Symbolic(r) => nf(r, src, &mut cert)?,
            }
        }
        Task::InvertSeries => {
            let r = finite(&inp.ring, job.task)?;
            let mode = parse_mode(job.mode.as_deref()).map_err(CliError::Option)?;
            let m = LaurentMatrix::from_ring_matrix(r, &parse_matrix(r, need_matrix(job)?)?);
            let sm = match mode {
                crate::series::InversionMode::Nonneg => SeriesMatrix::psp(r.id(), &m, job.order)?,
                crate::series::InversionMode::Conegative => {
                    if let Some(d) = m.max_degree().filter(|d| *d > 0) {
                        return Err(SeriesError::PositiveDegreeEntry(d).into());
                    }
                    let clipped = m.truncate(Some(-(job.order as i64)), None);
                    SeriesMatrix::new(r.id(), series_window(mode, job.order), clipped)?
                }
            };
            cert.order = Some(job.order);
            cert.mode = Some(mode.to_string());
            match invert_series_matrix(&sm, mode, job.order) {
                Ok(c) => {
                    cert.verdict = c.residual_check;
                    if c.residual_check {
                        cert.witness = invert_witness(r, c.inverse.body());
                    }
                    json!({ "invertible": true, "residual_check": c.residual_check })
                }
                Err(SeriesError::ConstantTermSingular | SeriesError::LeadingTermSingular) => json!({ "invertible": false }),
                Err(e) => return Err(e.into()),
            }
        }
        Task::R0Routes => {
            let r = finite(&inp.ring, job.task)?;
            let c = need_complex(r, &inp, job.task)?;
            cert.input.complex = Some(print_complex(r, &c));
            let rep = r0_routes_report(r, &c, job.order, job.horizon)?;
            cert.order = Some(job.order);
            cert.horizon = Some(job.horizon);
            cert.verdict = rep.verdict();
            if let (true, Some(p)) = (rep.verdict(), &rep.psp_certificate) {
                cert.witness = psp_witness(r, p);
            }
            json!({
                "r0_contractible": rep.r0_contractible,
                "r0_failure_level": rep.r0_failure_level,
                "psp_certificate": rep.psp_certificate.is_some(),
                "zeta_quasi_iso": rep.zeta.quasi_iso(),
                "zeta_first_failure": rep.zeta.first_failure,
                "routes_agree": rep.agree(),
            })
        }
        Task::HalfTorus => {
            let r = finite(&inp.ring, job.task)?;
            let c = need_complex(r, &inp, job.task)?;
            cert.input.complex = Some(print_complex(r, &c));
            let h = half_torus(r, &c, job.horizon)?;
            cert.horizon = Some(job.horizon);
            cert.verdict = h.ses_exact;
            if cert.verdict {
                cert.witness = half_torus_witness(&h);
            }
            json!({
                "cone_is_zero": h.is_zero_cone(),
                "ses_exact": h.ses_exact,
                "first_failure": h.first_failure,
                "nonzero_cone_pieces": h.cone_dims.values().filter(|d| **d > 0).count(),
            })
        }
        Task::Fredholm => {
            let r = finite(&inp.ring, job.task)?;
            let a = parse_matrix(r, need_matrix(job)?)?;
            let v = is_fredholm(r, &a, job.horizon)?;
            cert.horizon = Some(job.horizon);
            cert.verdict = v.fredholm;
            if v.fredholm {
                cert.witness = fredholm_witness(&v);
            }
            json!({
                "fredholm": v.fredholm,
                "injective": v.injective,
                "m": v.m,
                "total_dim": v.total_dim,
                "stabilized": v.stabilized,
                "det": v.oracle_det,
                "oracle_agrees": v.agree(r.block()),
            })
        }
        Task::Findom => {
            let r = finite(&inp.ring, job.task)?;
            let c = need_complex(r, &inp, job.task)?;
            cert.input.complex = Some(print_complex(r, &c));
            let v = findom_detect(r, &c, job.order)?;
            cert.order = Some(job.order);
            cert.verdict = v.finitely_dominated;
            if let Some(fc) = &v.certificate {
                cert.witness = findom_witness(r, fc);
            }
            json!({ "finitely_dominated": v.finitely_dominated })
        }
        Task::LeavittExample => {
            if !matches!(inp.ring, AnyRing::Symbolic(_)) {
                return Err(CliError::Unsupported(format!("leavitt-example runs over leavitt11, not {}", inp.ring.id())));
            }
            let rep = leavitt_findom_example();
            cert.ring = WordAlgebra::<crate::Q>::leavitt11().id();
            cert.verdict = rep.all_pass();
            if cert.verdict {
                cert.witness = leavitt_witness(&rep);
            }
            json!({ "checks": rep.checks.len(), "failures": rep.failures() })
        }
        Task::VerifyCert => unreachable!("handled above"),
    };
    let mut head = serde_json::Map::new();
    head.insert("task".into(), json!(job.task));
    head.insert("ring".into(), json!(cert.ring));
    head.insert("verdict".into(), json!(cert.verdict));
    if let Value::Object(m) = summary {
        head.extend(m);
    }
    let summary = Value::Object(head);
    Ok(Outcome { verdict: cert.verdict, certificate: Some(cert), summary })
}

/// `run`, then writes the certificate to the job's `cert` path if one is set.
pub fn run_job(job: &JobDescription, base: &Path) -> Result<Outcome, CliError> {
    let out = run(job, base)?;
    if let (Some(path), Some(cert)) = (&job.cert, &out.certificate) {
        let path = resolve(base, path);
        std::fs::write(&path, cert.to_json()).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(out)
}
