//! Certificate files and their independent re-verification.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::complexes::{expand, FreeChainComplex, PspCertificate};
use crate::domination::{half_torus, is_fredholm, leavitt_findom_example, FinDomCertificate, FredholmVerdict, HalfTorus, LeavittReport};
use crate::expr::{parse_element, parse_expr, parse_matrix, print_element, normal_form};
use crate::ring::{verify_partition, AnyRing, Element, GradedRing, PartitionOfUnity, RingMatrix};
use crate::series::{residual_ok, InversionCertificate, InversionMode, LaurentMatrix, SeriesMatrix, SeriesWindow};
use crate::{Laurent, Q};

use super::complex_file::{build_complex, parse_complex_text};
use super::{CliError, Task};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateInput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<String>,
    /// Canonical complex-file text.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub complex: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    pub schema_version: u32,
    pub task: Task,
    pub ring: String,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub input: CertificateInput,
    /// Empty for negative verdicts.
    #[serde(default)]
    pub witness: Map<String, Value>,
}

impl CertificateFile {
    pub fn new(task: Task, ring: String, verdict: bool, input: CertificateInput) -> Self {
        CertificateFile {
            schema_version: SCHEMA_VERSION,
            task,
            ring,
            verdict,
            order: None,
            horizon: None,
            nmax: None,
            mode: None,
            input,
            witness: Map::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificates serialise")
    }

    pub fn from_json(src: &str) -> Result<Self, CliError> {
        serde_json::from_str(src).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let src = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&src)
    }
}

/// Matrix over a ring as printed entries, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixText {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

impl MatrixText {
    pub fn from_matrix<R: GradedRing>(ring: &R, m: &RingMatrix<R::Hom>) -> Self {
        let entries = (0..m.rows()).map(|i| (0..m.cols()).map(|j| print_element(ring, m.get(i, j))).collect()).collect();
        MatrixText { rows: m.rows(), cols: m.cols(), entries }
    }

    pub fn to_matrix<R: GradedRing>(&self, ring: &R) -> Result<RingMatrix<R::Hom>, String> {
        if self.entries.len() != self.rows || self.entries.iter().any(|r| r.len() != self.cols) {
            return Err(format!("entries do not form a {}x{} matrix", self.rows, self.cols));
        }
        let mut m = RingMatrix::zeros(self.rows, self.cols);
        for (i, row) in self.entries.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                m.set(i, j, parse_element(ring, s).map_err(|e| format!("entry ({i}, {j}): {e}"))?);
            }
        }
        Ok(m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

pub(crate) fn laurent_value(ring: &Laurent, m: &LaurentMatrix<Q>) -> Value {
    serde_json::to_value(MatrixText::from_matrix(ring, &m.to_ring_matrix(ring))).expect("matrix text serialises")
}

pub(crate) fn levels_value(ring: &Laurent, ms: &BTreeMap<i64, LaurentMatrix<Q>>) -> Value {
    Value::Object(ms.iter().map(|(n, m)| (n.to_string(), laurent_value(ring, m))).collect())
}

fn laurent_from(ring: &Laurent, v: &Value) -> Result<LaurentMatrix<Q>, String> {
    let t: MatrixText = serde_json::from_value(v.clone()).map_err(|e| e.to_string())?;
    Ok(LaurentMatrix::from_ring_matrix(ring, &t.to_matrix(ring)?))
}

fn field<'a>(w: &'a Map<String, Value>, name: &str) -> Result<&'a Value, String> {
    w.get(name).ok_or_else(|| format!("witness has no `{name}`"))
}

fn levels_from(ring: &Laurent, w: &Map<String, Value>, name: &str) -> Result<BTreeMap<i64, LaurentMatrix<Q>>, String> {
    let Value::Object(obj) = field(w, name)? else { return Err(format!("`{name}` is not an object")) };
    obj.iter()
        .map(|(k, v)| {
            let n: i64 = k.parse().map_err(|_| format!("`{name}`: bad level `{k}`"))?;
            Ok((n, laurent_from(ring, v).map_err(|e| format!("{name}[{k}]: {e}"))?))
        })
        .collect()
}

fn pairs_value<R: GradedRing>(ring: &R, p: &PartitionOfUnity<R::Hom>) -> Value {
    Value::Array(p.pairs.iter().map(|(a, b)| json!([print_element(ring, a), print_element(ring, b)])).collect())
}

pub(crate) fn check_strong_witness<R: GradedRing>(
    ring: &R,
    pos: &PartitionOfUnity<R::Hom>,
    neg: &PartitionOfUnity<R::Hom>,
    surjective: &[i64],
) -> Map<String, Value> {
    let mut w = Map::new();
    w.insert("positive".into(), pairs_value(ring, pos));
    w.insert("negative".into(), pairs_value(ring, neg));
    w.insert("surjective_degrees".into(), json!(surjective));
    w
}

pub(crate) fn nf_witness(printed: &str) -> Map<String, Value> {
    let mut w = Map::new();
    w.insert("normal_form".into(), json!(printed));
    w
}

pub(crate) fn half_torus_witness(h: &HalfTorus) -> Map<String, Value> {
    let mut w = Map::new();
    w.insert("cone_dims".into(), json!(h.cone_dims.iter().map(|((n, e), d)| [*n, *e, *d as i64]).collect::<Vec<_>>()));
    w.insert("ses_exact".into(), json!(h.ses_exact));
    w
}

pub(crate) fn fredholm_witness(v: &FredholmVerdict) -> Map<String, Value> {
    let mut w = Map::new();
    if let Some(det) = &v.oracle_det {
        w.insert("det".into(), json!(det));
    }
    w.insert("m".into(), json!(v.m));
    w.insert("total_dim".into(), json!(v.total_dim));
    w.insert("cokernel_dims".into(), json!(v.cokernel_dims.iter().map(|(e, d)| [*e, *d as i64]).collect::<Vec<_>>()));
    w
}

pub(crate) fn leavitt_witness(r: &LeavittReport) -> Map<String, Value> {
    let mut w = Map::new();
    w.insert("checks".into(), json!(r.checks));
    w
}

pub(crate) fn psp_witness(ring: &Laurent, c: &PspCertificate<Q>) -> Map<String, Value> {
    let inv = c.e_inverse.iter().map(|(n, i)| (*n, i.inverse.body().clone())).collect();
    let mut w = Map::new();
    w.insert("contraction".into(), levels_value(ring, &c.contraction));
    w.insert("s_plus".into(), levels_value(ring, &c.s_plus));
    w.insert("e".into(), levels_value(ring, &c.e));
    w.insert("e_inverse".into(), levels_value(ring, &inv));
    w
}

pub(crate) fn findom_witness(ring: &Laurent, c: &FinDomCertificate<Q>) -> Map<String, Value> {
    let inv = c.e_inverse.iter().map(|(n, i)| (*n, i.inverse.body().clone())).collect();
    let mut w = Map::new();
    w.insert("s_plus".into(), levels_value(ring, &c.s_plus));
    w.insert("e".into(), levels_value(ring, &c.e));
    w.insert("e_inverse".into(), levels_value(ring, &inv));
    w
}

pub(crate) fn series_window(mode: InversionMode, order: u32) -> SeriesWindow {
    match mode {
        InversionMode::Nonneg => SeriesWindow::psp(order),
        InversionMode::Conegative => SeriesWindow::novm(0, order),
    }
}

pub(crate) fn parse_mode(mode: Option<&str>) -> Result<InversionMode, String> {
    match mode.unwrap_or("nonneg") {
        "nonneg" => Ok(InversionMode::Nonneg),
        "conegative" => Ok(InversionMode::Conegative),
        m => Err(format!("unknown mode `{m}`")),
    }
}

pub(crate) fn invert_witness(ring: &Laurent, inverse: &LaurentMatrix<Q>) -> Map<String, Value> {
    let mut w = Map::new();
    w.insert("inverse".into(), laurent_value(ring, inverse));
    w
}

fn schema(msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(msg.to_string())
}

fn finite(ring: &AnyRing) -> Result<&Laurent, CliError> {
    match ring {
        AnyRing::Finite(r) => Ok(r),
        AnyRing::Symbolic(r) => Err(schema(format!("ring {} is not of finite type", r.id()))),
    }
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, CliError> {
    v.ok_or_else(|| schema(format!("certificate has no `{name}`")))
}

fn input_complex(ring: &Laurent, cert: &CertificateFile) -> Result<FreeChainComplex<crate::QMatrix>, CliError> {
    let text = cert.input.complex.as_deref().ok_or_else(|| schema("certificate has no input complex"))?;
    let spec = parse_complex_text(text).map_err(schema)?;
    build_complex(ring, &spec).map_err(schema)
}

fn input_matrix<R: GradedRing>(ring: &R, cert: &CertificateFile) -> Result<RingMatrix<R::Hom>, CliError> {
    let text = cert.input.matrix.as_deref().ok_or_else(|| schema("certificate has no input matrix"))?;
    parse_matrix(ring, text).map_err(schema)
}

fn same(expected: Map<String, Value>, got: &Map<String, Value>) -> Result<(), String> {
    if expected == *got {
        return Ok(());
    }
    let key = expected.iter().find(|(k, v)| got.get(*k) != Some(*v)).map(|(k, _)| k.clone());
    Err(match key {
        Some(k) => format!("witness field `{k}` does not match the recomputation"),
        None => "witness has unexpected fields".into(),
    })
}

fn check_strong<R: GradedRing>(ring: &R, w: &Map<String, Value>) -> Result<(), String> {
    let pairs = |name: &str| -> Result<Vec<(Element<R::Hom>, Element<R::Hom>)>, String> {
        let raw: Vec<(String, String)> = serde_json::from_value(field(w, name)?.clone()).map_err(|e| format!("{name}: {e}"))?;
        raw.iter()
            .map(|(a, b)| {
                let p = |s: &str| parse_element(ring, s).map_err(|e| format!("{name}: {e}"));
                Ok((p(a)?, p(b)?))
            })
            .collect()
    };
    for (name, n) in [("positive", 1), ("negative", -1)] {
        let check = verify_partition(ring, &PartitionOfUnity::new(ring.id(), n, pairs(name)?));
        if !check.ok {
            return Err(format!("{name} partition: {}", check.diagnostics.join("; ")));
        }
    }
    let degrees: Vec<i64> =
        serde_json::from_value(field(w, "surjective_degrees")?.clone()).map_err(|e| format!("surjective_degrees: {e}"))?;
    match degrees.iter().find(|n| ring.multiplication_surjective(**n) != Some(true)) {
        Some(n) => Err(format!("multiplication onto degree 0 is not surjective from degree {n}")),
        None => Ok(()),
    }
}

fn inversion(
    ring: &Laurent,
    mode: InversionMode,
    order: u32,
    m: &LaurentMatrix<Q>,
    x: &LaurentMatrix<Q>,
) -> Result<InversionCertificate<Q>, String> {
    let matrix = match mode {
        InversionMode::Nonneg => SeriesMatrix::psp(ring.id(), m, order),
        InversionMode::Conegative => SeriesMatrix::new(ring.id(), series_window(mode, order), m.clone()),
    }
    .map_err(|e| e.to_string())?;
    let inverse = SeriesMatrix::new(ring.id(), series_window(mode, order), x.clone()).map_err(|e| format!("inverse: {e}"))?;
    Ok(InversionCertificate { mode, order, matrix, inverse, residual_check: true })
}

fn verify_positive(ring: &AnyRing, cert: &CertificateFile) -> Result<Result<(), String>, CliError> {
    let w = &cert.witness;
    Ok(match cert.task {
        Task::CheckStrong => match ring {
            AnyRing::Finite(r) => check_strong(r, w),
            AnyRing::Symbolic(r) => check_strong(r, w),
        },
        Task::Nf => {
            let src = cert.input.expr.as_deref().ok_or_else(|| schema("certificate has no input expression"))?;
            let e = parse_expr(src).map_err(schema)?;
            let printed = match ring {
                AnyRing::Finite(r) => print_element(r, &normal_form(r, &e).map_err(schema)?),
                AnyRing::Symbolic(r) => print_element(r, &normal_form(r, &e).map_err(schema)?),
            };
            same(nf_witness(&printed), w)
        }
        Task::InvertSeries => {
            let r = finite(ring)?;
            let order = need(cert.order, "order")?;
            let mode = parse_mode(cert.mode.as_deref()).map_err(schema)?;
            let m = LaurentMatrix::from_ring_matrix(r, &input_matrix(r, cert)?);
            (|| {
                let x = laurent_from(r, field(w, "inverse")?).map_err(|e| format!("inverse: {e}"))?;
                let c = inversion(r, mode, order, &m, &x)?;
                if c.validate() && residual_ok(&m, &x, mode, order) {
                    Ok(())
                } else {
                    Err(format!("M X = X M = 1 fails through order {order}"))
                }
            })()
        }
        Task::R0Routes => {
            let r = finite(ring)?;
            let order = need(cert.order, "order")?;
            let x = expand(r, &input_complex(r, cert)?);
            (|| {
                let e = levels_from(r, w, "e")?;
                let mut e_inverse = BTreeMap::new();
                for (n, inv) in levels_from(r, w, "e_inverse")? {
                    let en = e.get(&n).ok_or_else(|| format!("no E_{n} for its inverse"))?;
                    e_inverse.insert(n, inversion(r, InversionMode::Nonneg, order, en, &inv)?);
                }
                let c = PspCertificate {
                    order,
                    s_plus: levels_from(r, w, "s_plus")?,
                    e,
                    e_inverse,
                    contraction: levels_from(r, w, "contraction")?,
                };
                if c.validate(&x) {
                    Ok(())
                } else {
                    Err("contraction identities fail over Psp".into())
                }
            })()
        }
        Task::Findom => {
            let r = finite(ring)?;
            let order = need(cert.order, "order")?;
            let x = expand(r, &input_complex(r, cert)?);
            (|| {
                let e = levels_from(r, w, "e")?;
                let mut e_inverse = BTreeMap::new();
                for (n, inv) in levels_from(r, w, "e_inverse")? {
                    let en = e.get(&n).ok_or_else(|| format!("no E_{n} for its inverse"))?;
                    e_inverse.insert(n, inversion(r, InversionMode::Conegative, order, en, &inv)?);
                }
                let c = FinDomCertificate { ring: r.id(), order, s_plus: levels_from(r, w, "s_plus")?, e, e_inverse };
                if c.validate(&x) {
                    Ok(())
                } else {
                    Err("truncated homotopy does not give invertible E_n".into())
                }
            })()
        }
        Task::HalfTorus => {
            let r = finite(ring)?;
            let h = half_torus(r, &input_complex(r, cert)?, need(cert.horizon, "horizon")?).map_err(schema)?;
            same(half_torus_witness(&h), w)
        }
        Task::Fredholm => {
            let r = finite(ring)?;
            let v = is_fredholm(r, &input_matrix(r, cert)?, need(cert.horizon, "horizon")?).map_err(schema)?;
            if !v.fredholm {
                Err("matrix is not Fredholm".into())
            } else {
                same(fredholm_witness(&v), w)
            }
        }
        Task::LeavittExample => same(leavitt_witness(&leavitt_findom_example()), w),
        Task::VerifyCert => return Err(schema("verify-cert does not produce certificates")),
    })
}

/// Re-checks a certificate from its recorded input.  Malformed certificates
/// are errors; well-formed ones with a wrong witness are reported invalid.
pub fn verify_certificate(cert: &CertificateFile) -> Result<VerifyReport, CliError> {
    if cert.schema_version != SCHEMA_VERSION {
        return Err(schema(format!("unsupported schema version {}", cert.schema_version)));
    }
    let ring: AnyRing = cert.ring.parse().map_err(schema)?;
    if !cert.verdict {
        return Ok(if cert.witness.is_empty() {
            VerifyReport { valid: true, diagnostics: Vec::new() }
        } else {
            VerifyReport { valid: false, diagnostics: vec!["negative verdict carries a witness".into()] }
        });
    }
    Ok(match verify_positive(&ring, cert)? {
        Ok(()) => VerifyReport { valid: true, diagnostics: Vec::new() },
        Err(d) => VerifyReport { valid: false, diagnostics: vec![d] },
    })
}

fn perturb_value(v: &mut Value, strings: bool) -> bool {
    match v {
        Value::String(s) if strings => {
            s.push_str(" + 1/7");
            true
        }
        Value::Number(n) if !strings => {
            *v = json!(n.as_i64().unwrap_or(0) + 1);
            true
        }
        Value::Bool(b) if !strings => {
            *b = !*b;
            true
        }
        Value::Array(xs) => xs.iter_mut().any(|x| perturb_value(x, strings)),
        Value::Object(m) => m.values_mut().any(|x| perturb_value(x, strings)),
        _ => false,
    }
}

/// Corrupts the first witness entry: a string gets ` + 1/7` appended,
/// otherwise the first number or flag changes.  Returns false for an empty witness.
pub fn perturb_certificate(cert: &mut CertificateFile) -> bool {
    cert.witness.values_mut().any(|v| perturb_value(v, true)) || cert.witness.values_mut().any(|v| perturb_value(v, false))
}
