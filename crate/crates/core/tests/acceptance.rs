//! Acceptance runner: one PASS/FAIL line per criterion.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use gradedfd::cli::{parse_complex_text, perturb_certificate, print_complex, run_job, verify_certificate, build_complex, JobDescription, Task};
use gradedfd::complexes::{expand, r0_routes_report};
use gradedfd::domination::{
    canonical_resolution, findom_detect, graded_cokernel, is_fredholm, leavitt_findom_example, mather_cone,
    mather_constructed_example, mu_independent, novikov_contractibility, WindowedTerm,
};
use gradedfd::expr::{parse_element, parse_matrix};
use gradedfd::ring::{
    bimodule_iso_check, check_strongly_graded, partition_for_degree, verify_partition, GradedRing, PartitionOfUnity,
    FiniteTypeRing, RingMatrix, Strategy,
};
use gradedfd::series::{invert_series_matrix, InversionMode, LaurentMatrix, SeriesError, SeriesMatrix};
use gradedfd::{Laurent, Leavitt};
use rand::Rng;

use common::{random_complex, random_psp_unit, random_square, rng, LAURENT_SHAPE, MATRIX2_SHAPE};

const LEAVITT_WORDS: usize = 1000;
const LEAVITT_MAX_LEN: usize = 12;
const LEAVITT_BUDGET: Duration = Duration::from_secs(10);
const N_MAX: i64 = 5;
const BIMODULE_HORIZON: u32 = 12;
const BIMODULE_N: i64 = 4;
const SERIES_CASES: usize = 100;
const SERIES_ORDER: u32 = 24;
const SERIES_BUDGET: Duration = Duration::from_secs(30);
const ROUTE_CASES: usize = 200;
const ROUTE_ORDER: u32 = 24;
const ROUTE_HORIZON: u32 = 24;
const RESOLUTION_CASES: usize = 50;
const RESOLUTION_HORIZON: u32 = 24;
const MATHER_HORIZON: u32 = 16;
const FREDHOLM_CASES: usize = 200;
const FREDHOLM_HORIZON: u32 = 24;
const FREDHOLM_MAX_SIZE: usize = 4;
const FREDHOLM_DEGREES: (i64, i64) = (-2, 3);
const SHIFT_SPAN: i64 = 3;
const FINDOM_CASES: usize = 200;
const FINDOM_ORDER: u32 = 24;
const CORPUS_MIN: usize = 12;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn leavitt_kernel() -> Outcome {
    let start = Instant::now();
    let l = Leavitt::leavitt11();
    let e = |s: &str| parse_element(&l, s).unwrap();
    for (lhs, rhs) in [("A*B + C*D", "1"), ("B*A", "1"), ("D*C", "1"), ("B*C", "0"), ("D*A", "0")] {
        ensure(e(lhs) == e(rhs), || format!("{lhs} does not reduce to {rhs}"))?;
    }
    let mut r = rng(1);
    for _ in 0..LEAVITT_WORDS {
        let len = r.gen_range(0..=LEAVITT_MAX_LEN);
        let w: Vec<u8> = (0..len).map(|_| r.gen_range(0..4)).collect();
        let nf = l.normal_form_word(&w, Strategy::Leftmost);
        ensure(nf.keys().all(|u| l.is_irreducible(u)), || format!("reducible word in nf({})", l.word_string(&w)))?;
        let again = nf.keys().all(|u| l.normal_form_word(u, Strategy::Rightmost).len() == 1);
        ensure(again, || format!("nf not idempotent on {}", l.word_string(&w)))?;
        ensure(l.normal_form_word(&w, Strategy::Rightmost) == nf, || format!("strategies disagree on {}", l.word_string(&w)))?;
        ensure(l.is_locally_confluent_at(&w), || format!("not locally confluent at {}", l.word_string(&w)))?;
    }
    let pairs = l.critical_pairs();
    ensure(pairs.iter().all(|w| l.is_locally_confluent_at(w)), || "critical pair not joinable".into())?;
    let took = start.elapsed();
    ensure(took < LEAVITT_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{LEAVITT_WORDS} words, {} critical pairs, {took:.2?}", pairs.len()))
}

fn partitions_compose<R: GradedRing>(ring: &R) -> Result<(), String> {
    for n in -N_MAX..=N_MAX {
        let p = partition_for_degree(ring, n).map_err(|e| e.to_string())?;
        let check = verify_partition(ring, &p);
        ensure(check.ok, || format!("{} n={n}: {:?}", ring.id(), check.diagnostics))?;
    }
    Ok(())
}

fn strong_grading() -> Outcome {
    let laurent = Laurent::laurent();
    let leavitt = Leavitt::leavitt11();
    let step2 = Laurent::laurent_step2();
    ensure(check_strongly_graded(&laurent, N_MAX as u32).strongly_graded, || "laurent rejected".into())?;
    ensure(check_strongly_graded(&leavitt, N_MAX as u32).strongly_graded, || "leavitt11 rejected".into())?;
    let v = check_strongly_graded(&step2, N_MAX as u32);
    ensure(!v.strongly_graded && v.failure_degree == Some(1), || format!("laurent_step2: {:?}", v.failure_degree))?;
    partitions_compose(&laurent)?;
    partitions_compose(&leavitt)?;
    Ok(format!("verdicts yes/yes/no(1); compositions |n| <= {N_MAX}"))
}

fn bimodules() -> Outcome {
    let mut checked = 0;
    for ring in [Laurent::laurent(), Laurent::matrix_laurent(2)] {
        for n in -BIMODULE_N..=BIMODULE_N {
            let rep = bimodule_iso_check(&ring, n, BIMODULE_HORIZON).map_err(|e| e.to_string())?;
            ensure(rep.ok(), || format!("{} n={n}: {:?}", ring.id(), rep.failures))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (ring, n) pairs to horizon {BIMODULE_HORIZON}"))
}

fn series_inversion() -> Outcome {
    let start = Instant::now();
    let ring = Laurent::laurent();
    let mut r = rng(4);
    for i in 0..SERIES_CASES {
        let k = r.gen_range(1..=4);
        let src = random_psp_unit(&mut r, k, 3);
        let m = LaurentMatrix::from_ring_matrix(&ring, &parse_matrix(&ring, &src).unwrap());
        let sm = SeriesMatrix::psp(ring.id(), &m, SERIES_ORDER).unwrap();
        let cert = invert_series_matrix(&sm, InversionMode::Nonneg, SERIES_ORDER).map_err(|e| format!("case {i}: {e}"))?;
        ensure(cert.residual_check && cert.validate(), || format!("case {i}: residual fails for {src}"))?;
    }
    for src in ["[[t]]", "[[t, 1], [2*t, 2 + t]]", "[[1 + t, 1], [1, 1 + t^2]]"] {
        let m = LaurentMatrix::from_ring_matrix(&ring, &parse_matrix(&ring, src).unwrap());
        let sm = SeriesMatrix::psp(ring.id(), &m, SERIES_ORDER).unwrap();
        let res = invert_series_matrix(&sm, InversionMode::Nonneg, SERIES_ORDER);
        ensure(res.as_ref().err() == Some(&SeriesError::ConstantTermSingular), || format!("{src} accepted"))?;
    }
    let took = start.elapsed();
    ensure(took < SERIES_BUDGET, || format!("took {took:?}"))?;
    Ok(format!("{SERIES_CASES} inverses through degree {SERIES_ORDER}, 3 singular rejected, {took:.2?}"))
}

fn route_agreement() -> Outcome {
    let ring = Laurent::laurent();
    let mut r = rng(5);
    let mut yes = 0;
    for i in 0..ROUTE_CASES {
        let c = random_complex(&ring, &mut r, &LAURENT_SHAPE);
        let rep = r0_routes_report(&ring, &c, ROUTE_ORDER, ROUTE_HORIZON).map_err(|e| format!("case {i}: {e}"))?;
        ensure(rep.agree(), || format!("case {i}: routes disagree on\n{}", print_complex(&ring, &c)))?;
        if let Some(cert) = &rep.psp_certificate {
            ensure(cert.validate(&expand(&ring, &c)), || format!("case {i}: certificate does not re-validate"))?;
            yes += 1;
        }
    }
    Ok(format!("{ROUTE_CASES} complexes, {yes} R_0-contractible with validated certificates"))
}

fn resolutions() -> Outcome {
    let mut r = rng(6);
    let laurent = Laurent::laurent();
    let m2 = Laurent::matrix_laurent(2);
    for i in 0..RESOLUTION_CASES {
        let (ring, shape) = if i % 2 == 0 { (&laurent, &LAURENT_SHAPE) } else { (&m2, &MATRIX2_SHAPE) };
        let c = random_complex(ring, &mut r, shape);
        let pou = ring.stored_partitions().unwrap().0;
        let data = canonical_resolution(ring, &c, &pou, RESOLUTION_HORIZON).map_err(|e| format!("case {i}: {e}"))?;
        ensure(data.all_hold(), || format!("case {i} over {}: {:?}", ring.id(), data.checks))?;
        let two = ring.scalar(&gradedfd::Q::from_integer(2.into()));
        let q = PartitionOfUnity::new(ring.id(), 0, vec![(two, ring.one()), (ring.neg(&ring.one()), ring.one())]);
        let same = mu_independent(ring, &c, &pou, &q, RESOLUTION_HORIZON).map_err(|e| format!("case {i}: {e}"))?;
        ensure(same, || format!("case {i}: mu depends on the partition"))?;
    }
    Ok(format!("{RESOLUTION_CASES} instances over laurent and matrix_laurent:2 to degree {RESOLUTION_HORIZON}"))
}

fn mather() -> Outcome {
    let mut cases = 0;
    for ring in [Laurent::laurent(), Laurent::matrix_laurent(2)] {
        let input = mather_constructed_example(&ring);
        let (_, v) = mather_cone(&ring, &input, MATHER_HORIZON).map_err(|e| e.to_string())?;
        ensure(v.holds() && v.cone_exact == Some(true), || format!("{}: {v:?}", ring.id()))?;
        let mut bad = input.clone();
        let one = RingMatrix::from_rows(vec![vec![ring.one()]]);
        bad.h = bad.h.with(0, WindowedTerm::window(one, Some(2), Some(2)));
        let (_, v) = mather_cone(&ring, &bad, MATHER_HORIZON).map_err(|e| e.to_string())?;
        ensure(!v.holds(), || format!("{}: perturbed H accepted", ring.id()))?;
        cases += 1;
    }
    Ok(format!("{cases} constructed instances to degree {MATHER_HORIZON}; perturbed H rejected"))
}

fn fredholm() -> Outcome {
    let ring = Laurent::laurent();
    let mut r = rng(8);
    let mut yes = 0;
    for i in 0..FREDHOLM_CASES {
        let k = r.gen_range(1..=FREDHOLM_MAX_SIZE);
        let mut src = random_square(&mut r, k, FREDHOLM_DEGREES.0, FREDHOLM_DEGREES.1, 0.3);
        if i % 7 == 6 && k > 1 {
            // duplicate the first row: singular
            let m = parse_matrix(&ring, &src).unwrap();
            let row: Vec<String> = (0..k).map(|j| gradedfd::expr::print_element(&ring, m.get(0, j))).collect();
            let rows: Vec<Vec<String>> =
                (0..k).map(|ii| if ii == k - 1 { row.clone() } else { (0..k).map(|j| gradedfd::expr::print_element(&ring, m.get(ii, j))).collect() }).collect();
            src = common::matrix_text(&rows);
        }
        let a = parse_matrix(&ring, &src).unwrap();
        let v = is_fredholm(&ring, &a, FREDHOLM_HORIZON).map_err(|e| format!("case {i}: {e}"))?;
        ensure(v.agree(1), || format!("case {i}: {src} backend/oracle disagree: {v:?}"))?;
        if v.fredholm {
            yes += 1;
            let base = v.total_dim.unwrap() as i64;
            for n in v.m..=v.m + SHIFT_SPAN {
                let rep = graded_cokernel(&ring, &a, n, FREDHOLM_HORIZON).map_err(|e| e.to_string())?;
                let extra: usize = (-n..=-v.m - 1).map(|j| ring.dim(j)).sum();
                let want = base + (k * extra) as i64;
                ensure(rep.total_dim.map(|t| t as i64) == Some(want), || format!("case {i}: shift {n} gives {:?}, want {want}", rep.total_dim))?;
            }
        }
    }
    Ok(format!("{FREDHOLM_CASES} matrices, {yes} Fredholm, shifts m..m+{SHIFT_SPAN} consistent"))
}

fn findom() -> Outcome {
    let ring = Laurent::laurent();
    let mut r = rng(9);
    let (mut yes, mut r0) = (0, 0);
    for i in 0..FINDOM_CASES {
        let c = random_complex(&ring, &mut r, &LAURENT_SHAPE);
        let v = findom_detect(&ring, &c, FINDOM_ORDER).map_err(|e| format!("case {i}: {e}"))?;
        let oracle = novikov_contractibility(&ring, &c).map_err(|e| e.to_string())?;
        ensure(v.finitely_dominated == oracle, || format!("case {i}: detector {} oracle {oracle}", v.finitely_dominated))?;
        if let Some(cert) = &v.certificate {
            ensure(cert.validate(&expand(&ring, &c)), || format!("case {i}: certificate does not re-validate"))?;
            let mut job = JobDescription::new(Task::Findom);
            job.complex = Some(print_complex(&ring, &c));
            job.order = FINDOM_ORDER;
            let file = run_job(&job, Path::new(".")).map_err(|e| e.to_string())?.certificate.unwrap();
            let reread = gradedfd::cli::CertificateFile::from_json(&file.to_json()).map_err(|e| e.to_string())?;
            let rep = verify_certificate(&reread).map_err(|e| e.to_string())?;
            ensure(rep.valid, || format!("case {i}: serialised certificate rejected: {:?}", rep.diagnostics))?;
            yes += 1;
        }
        let rep = r0_routes_report(&ring, &c, 8, 8).map_err(|e| e.to_string())?;
        if rep.r0_contractible {
            r0 += 1;
            ensure(v.finitely_dominated, || format!("case {i}: R_0-contractible but not dominated"))?;
        }
    }
    let frozen = common::oracle();
    let cases = frozen["complexes"].as_array().unwrap();
    for (i, case) in cases.iter().enumerate() {
        let c = build_complex(&ring, &parse_complex_text(case["complex"].as_str().unwrap()).unwrap()).unwrap();
        let v = findom_detect(&ring, &c, FINDOM_ORDER).map_err(|e| e.to_string())?;
        ensure(v.finitely_dominated == case["novikov_acyclic"].as_bool().unwrap(), || format!("frozen case {i} disagrees"))?;
    }
    Ok(format!("{FINDOM_CASES} random ({yes} dominated, {r0} R_0-contractible) + {} frozen oracle cases", cases.len()))
}

fn leavitt_example() -> Outcome {
    let rep = leavitt_findom_example();
    ensure(rep.all_pass(), || format!("failing: {:?}", rep.failures()))?;
    Ok(format!("{} identities", rep.checks.len()))
}

fn cli_corpus() -> Outcome {
    let jobs = common::data_dir().join("jobs");
    let mut files: Vec<_> = std::fs::read_dir(&jobs)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    ensure(files.len() >= CORPUS_MIN, || format!("only {} job files", files.len()))?;
    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut tasks = std::collections::BTreeSet::new();
    let (mut certs, mut perturbed) = (0, 0);
    for f in &files {
        let name = f.file_name().unwrap().to_string_lossy().to_string();
        let mut job = JobDescription::from_toml(&std::fs::read_to_string(f).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        tasks.insert(job.task.to_string());
        if job.task != Task::VerifyCert {
            job.cert = Some(out.path().join(format!("{name}.json")));
        }
        let res = run_job(&job, f.parent().unwrap_or(Path::new("."))).map_err(|e| format!("{name}: {e}"))?;
        let Some(cert) = res.certificate else {
            ensure(res.verdict, || format!("{name}: checked-in certificate rejected"))?;
            continue;
        };
        if let Some(text) = &cert.input.complex {
            let spec = parse_complex_text(text).map_err(|e| format!("{name}: {e}"))?;
            ensure(parse_complex_text(text).is_ok() && spec.ring.as_deref() == Some(cert.ring.as_str()), || format!("{name}: complex echo"))?;
        }
        let written = gradedfd::cli::CertificateFile::load(job.cert.as_ref().unwrap()).map_err(|e| e.to_string())?;
        ensure(written == cert, || format!("{name}: written certificate differs"))?;
        let rep = verify_certificate(&written).map_err(|e| format!("{name}: {e}"))?;
        ensure(rep.valid, || format!("{name}: certificate rejected: {:?}", rep.diagnostics))?;
        certs += 1;
        let mut bad = written.clone();
        if perturb_certificate(&mut bad) {
            let rep = verify_certificate(&bad).map_err(|e| format!("{name}: {e}"))?;
            ensure(!rep.valid, || format!("{name}: perturbed certificate accepted"))?;
            perturbed += 1;
        }
    }
    let all = ["check-strong", "nf", "invert-series", "r0-routes", "half-torus", "fredholm", "findom", "verify-cert", "leavitt-example"];
    let missing: Vec<_> = all.iter().filter(|t| !tasks.contains(**t)).collect();
    ensure(missing.is_empty(), || format!("tasks without a job: {missing:?}"))?;
    Ok(format!("{} jobs, {certs} certificates verified, {perturbed} perturbations rejected", files.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("Leavitt kernel", leavitt_kernel),
        ("strong-grading verdicts", strong_grading),
        ("bimodule isomorphisms", bimodules),
        ("series inversion", series_inversion),
        ("R_0-contractibility routes", route_agreement),
        ("canonical resolution", resolutions),
        ("Mather trick", mather),
        ("Fredholm equivalence", fredholm),
        ("finite-domination equivalence", findom),
        ("L(1,1) example suite", leavitt_example),
        ("CLI round trip", cli_corpus),
    ];
    let only: Option<usize> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        match res {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{took:.1?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{took:.1?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
