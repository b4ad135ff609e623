//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Every numeric comparison is certified with intervals.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::Value;

use lucaslcm_core::bounds::asymptotics::{akiyama_series, ratio_t7, theorem4_scan};
use lucaslcm_core::bounds::{bound_grid, bousla_farhi_series, BoundReport, Theorem};
use lucaslcm_core::numerics::interval::Precision;
use lucaslcm_core::{RealInterval, RecurrenceParams};

const BITS: u32 = 256;

// Pinned tolerances.
const MG_REL: (i64, i64) = (2, 100);
const T7_REL: (i64, i64) = (1, 100);
const T4_REL: (i64, i64) = (3, 100);
const KAPPA_CENTER: (i64, i64) = (2823, 10_000);
const KAPPA_HALF_WIDTH: (i64, i64) = (1, 1000);
const AKIYAMA_REL: (i64, i64) = (5, 100);

// Pinned grid extents.
const PQ_LIMIT: i64 = 6;
const R_LIMIT: i64 = 5;
const CERT_N_MAX: u64 = 25;
const IDENTITY_N_MAX: u64 = 40;
const DIF_MAX: u64 = 60;
const PF_SAMPLES: u64 = 500;
const PF_MAX_SPAN: u64 = 12;
const GCD_M_MAX: u64 = 200;
const E15_N_MAX: u64 = 25;
const BOUND_LIMIT: i64 = 6;
const BOUND_N_MAX: u64 = 30;
const BF_N_MAX: u64 = 200;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn rat(r: (i64, i64)) -> BigRational {
    BigRational::new(BigInt::from(r.0), BigInt::from(r.1))
}

fn fib() -> RecurrenceParams {
    RecurrenceParams::lucas(1, -1).expect("Fibonacci parameters")
}

fn pi_squared_over(k: i64) -> RealInterval {
    let pi = RealInterval::pi(BITS);
    pi.mul(&pi).div(&RealInterval::from_i64(k, BITS)).expect("nonzero divisor")
}

/// `|x − target| ≤ rel · target`, certified.
fn within_rel(x: &RealInterval, target: &RealInterval, rel: (i64, i64)) -> bool {
    let dist = x.sub(target).abs();
    let tol = target.mul_rational(&rat(rel));
    dist.hi() <= tol.lo()
}

fn dist(x: &RealInterval, target: &RealInterval) -> RealInterval {
    x.sub(target).abs()
}

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("lucaslcm").chain(args.iter().copied());
    let code = lucaslcm_cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).expect("utf-8"), String::from_utf8(err).expect("utf-8"))
}

struct GridRun {
    report: Value,
    bytes_jobs8: String,
    bytes_jobs1: String,
    exit8: i32,
    exit1: i32,
    secs: f64,
}

fn verify_all() -> Result<GridRun, String> {
    let start = Instant::now();
    let (exit8, bytes_jobs8, err8) = run_cli(&["verify", "all", "--grid", "default", "--json", "--jobs", "8"]);
    let secs = start.elapsed().as_secs_f64();
    let (exit1, bytes_jobs1, err1) = run_cli(&["verify", "all", "--grid", "default", "--json", "--jobs", "1"]);
    if !err8.is_empty() || !err1.is_empty() {
        return Err(format!("diagnostics: {err8}{err1}"));
    }
    let report: Value = serde_json::from_str(&bytes_jobs8).map_err(|e| format!("bad JSON: {e}"))?;
    Ok(GridRun { report, bytes_jobs8, bytes_jobs1, exit8, exit1, secs })
}

fn grid_value<'a>(run: &'a GridRun, key: &str) -> Option<&'a Value> {
    run.report["config"]["grid"].get(key)
}

fn pin_u64(run: &GridRun, key: &str, want: u64) -> Result<(), String> {
    match grid_value(run, key).and_then(Value::as_u64) {
        Some(v) if v == want => Ok(()),
        other => Err(format!("grid {key} = {other:?}, expected {want}")),
    }
}

fn pin_range(run: &GridRun, key: &str, limit: i64) -> Result<(), String> {
    let r = grid_value(run, key).ok_or(format!("grid {key} missing"))?;
    if r["min"].as_i64() == Some(-limit) && r["max"].as_i64() == Some(limit) {
        Ok(())
    } else {
        Err(format!("grid {key} = {r}, expected ±{limit}"))
    }
}

struct Tally {
    rows: usize,
    passed: usize,
    failed: usize,
    skipped: usize,
    checked: u64,
}

/// Result rows for one check name, by verdict.
fn tally(run: &GridRun, check: &str) -> Tally {
    let results = run.report["results"].as_array().map(Vec::as_slice).unwrap_or(&[]);
    let rows: Vec<&Value> = results.iter().filter(|e| e["check"] == check).collect();
    let count = |v: &str| rows.iter().filter(|e| e["verdict"] == v).count();
    Tally {
        rows: rows.len(),
        passed: count("pass"),
        failed: count("fail"),
        skipped: count("skipped"),
        checked: rows
            .iter()
            .filter(|e| e["verdict"] == "pass")
            .map(|e| e["detail"]["checked"].as_u64().unwrap_or(1))
            .sum(),
    }
}

fn checks_pass(run: &GridRun, checks: &[&str]) -> Outcome {
    let mut parts = Vec::new();
    for &c in checks {
        let t = tally(run, c);
        if t.passed == 0 || t.failed > 0 || t.passed + t.skipped != t.rows {
            return Err(format!("{c}: {} rows, {} passing, {} failing", t.rows, t.passed, t.failed));
        }
        let skipped = if t.skipped > 0 { format!(", {} skipped", t.skipped) } else { String::new() };
        parts.push(format!("{c} {} rows/{} checked{skipped}", t.rows, t.checked));
    }
    Ok(parts.join(", "))
}

fn criterion_1(run: &GridRun) -> Outcome {
    pin_range(run, "P", PQ_LIMIT)?;
    pin_range(run, "Q", PQ_LIMIT)?;
    pin_range(run, "R0", R_LIMIT)?;
    pin_range(run, "R1", R_LIMIT)?;
    pin_u64(run, "cert_n_max", CERT_N_MAX)?;
    let detail = checks_pass(run, &["cert"])?;
    let results = run.report["results"].as_array().map(Vec::as_slice).unwrap_or(&[]);
    let skipped: u64 = results
        .iter()
        .filter(|e| e["check"] == "cert")
        .map(|e| e["detail"]["skipped_zero_windows"].as_u64().unwrap_or(0))
        .sum();
    Ok(format!("{detail}, {skipped} zero windows skipped, grid run {:.1}s", run.secs))
}

fn criterion_2(run: &GridRun) -> Outcome {
    pin_u64(run, "identity_n_max", IDENTITY_N_MAX)?;
    checks_pass(run, &["co", "co2", "tri", "derrr"])
}

fn criterion_3(run: &GridRun) -> Outcome {
    pin_u64(run, "dif_max", DIF_MAX)?;
    pin_u64(run, "pf_samples", PF_SAMPLES)?;
    pin_u64(run, "pf_max_span", PF_MAX_SPAN)?;
    pin_u64(run, "gcd_m_max", GCD_M_MAX)?;
    pin_u64(run, "e15_n_max", E15_N_MAX)?;
    let pf_rows = tally(run, "pf").rows as u64;
    if pf_rows != PF_SAMPLES {
        return Err(format!("pf drew {pf_rows} windows"));
    }
    checks_pass(run, &["dif", "pf", "gcd", "e15"])
}

fn all_pass(name: &str, reports: &[BoundReport]) -> Result<String, String> {
    let failed: Vec<&BoundReport> =
        reports.iter().filter(|r| !r.pass || r.slack.lo() < BigRational::from_integer(0.into())).collect();
    if reports.is_empty() || !failed.is_empty() {
        let first = failed.first().map(|r| format!(" first {} m={} n={}", r.params, r.m, r.n)).unwrap_or_default();
        return Err(format!("{name}: {} instances, {} failed{first}", reports.len(), failed.len()));
    }
    Ok(format!("{name} {}", reports.len()))
}

fn criterion_4() -> Outcome {
    let precision = Precision::default();
    let mut parts = Vec::new();
    for (name, theorem) in [("t2", Theorem::T2), ("t6", Theorem::T6), ("t3", Theorem::T3)] {
        let reports = bound_grid(theorem, BOUND_LIMIT, BOUND_N_MAX, precision).map_err(|e| e.to_string())?;
        parts.push(all_pass(name, &reports)?);
    }
    let bf = bousla_farhi_series(BF_N_MAX, precision).map_err(|e| e.to_string())?;
    if bf.len() as u64 != BF_N_MAX {
        return Err(format!("bf covered {} values of n", bf.len()));
    }
    parts.push(all_pass("bf", &bf)?);
    Ok(parts.join(", "))
}

fn criterion_5() -> Outcome {
    let limit = pi_squared_over(6);
    let (pts, _) = akiyama_series(&fib(), &[100, 200, 500], Precision::default()).map_err(|e| e.to_string())?;
    let d: Vec<RealInterval> = pts.iter().map(|p| dist(&p.ratio, &limit)).collect();
    if !within_rel(&pts[2].ratio, &limit, MG_REL) {
        return Err(format!("ratio at n=500 is {}", pts[2].ratio));
    }
    if !(d[1].hi() < d[0].lo() && d[2].hi() < d[1].lo()) {
        return Err(format!("distances {} {} {}", d[0], d[1], d[2]));
    }
    Ok(format!("ratios {:.6} {:.6} {:.6}", pts[0].ratio.mid_f64(), pts[1].ratio.mid_f64(), pts[2].ratio.mid_f64()))
}

fn criterion_6() -> Outcome {
    let one = RealInterval::from_i64(1, BITS);
    let mut parts = Vec::new();
    for m in 1..=3 {
        for n in [10, 50, 100, 200, 300, 400] {
            let (first, second) = ratio_t7(&fib(), m, n, Precision::default()).map_err(|e| e.to_string())?;
            if first.ratio.hi() > BigRational::from_integer(1.into()) {
                return Err(format!("first ratio m={m} n={n} is {}", first.ratio));
            }
            if n == 300 {
                if !within_rel(&second.ratio, &one, T7_REL) {
                    return Err(format!("second ratio m={m} n=300 is {}", second.ratio));
                }
                parts.push(format!("m={m} {:.5}", second.ratio.mid_f64()));
            }
        }
    }
    Ok(parts.join(", "))
}

fn criterion_7() -> Outcome {
    let ns: Vec<u64> = (40..=120).chain([400]).collect();
    let pts = theorem4_scan(&fib(), &ns, Precision::default()).map_err(|e| e.to_string())?;
    let one = BigRational::from_integer(1.into());
    if let Some(p) = pts.iter().filter(|p| p.n <= 120).find(|p| p.ratio.lo() < one) {
        return Err(format!("ratio at n={} is {}", p.n, p.ratio));
    }
    let last = pts.last().expect("n=400 point");
    let twelve_over_pi2 = RealInterval::from_i64(12, BITS).div(&pi_squared_over(1)).map_err(|e| e.to_string())?;
    if !within_rel(&last.ratio, &twelve_over_pi2, T4_REL) {
        return Err(format!("ratio at n=400 is {}", last.ratio));
    }
    let min = pts.iter().filter(|p| p.n <= 120).map(|p| p.ratio.lo_f64()).fold(f64::INFINITY, f64::min);
    Ok(format!("min over 40..=120 {min:.5}, n=400 {:.6}", last.ratio.mid_f64()))
}

fn criterion_8() -> Outcome {
    let p = RecurrenceParams::lucas(4, 2).map_err(|e| e.to_string())?;
    let (pts, est) = akiyama_series(&p, &[400], Precision::default()).map_err(|e| e.to_string())?;
    let (center, half) = (rat(KAPPA_CENTER), rat(KAPPA_HALF_WIDTH));
    if !(est.kappa.lo() >= &center - &half && est.kappa.hi() <= &center + &half) {
        return Err(format!("kappa {}", est.kappa));
    }
    if !within_rel(&pts[0].ratio, &est.predicted_limit, AKIYAMA_REL) {
        return Err(format!("ratio {} vs limit {}", pts[0].ratio, est.predicted_limit));
    }
    Ok(format!(
        "kappa {:.6}, limit {:.6}, ratio {:.6}",
        est.kappa.mid_f64(),
        est.predicted_limit.mid_f64(),
        pts[0].ratio.mid_f64()
    ))
}

fn criterion_9(run: &GridRun) -> Outcome {
    if run.exit8 != 0 || run.exit1 != 0 {
        return Err(format!("exit codes {} and {}", run.exit8, run.exit1));
    }
    if run.bytes_jobs8 != run.bytes_jobs1 {
        return Err("reports differ between --jobs 8 and --jobs 1".into());
    }
    Ok(format!("{} identical bytes", run.bytes_jobs8.len()))
}

fn main() {
    let grid = verify_all();
    let from_grid = |f: fn(&GridRun) -> Outcome| -> Outcome {
        match &grid {
            Ok(run) => f(run),
            Err(e) => Err(e.clone()),
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("1 theorem 1 certificate grid", Box::new(|| from_grid(criterion_1))),
        ("2 identity suite", Box::new(|| from_grid(criterion_2))),
        ("3 lemma suite", Box::new(|| from_grid(criterion_3))),
        ("4 bound suite", Box::new(criterion_4)),
        ("5 Matiyasevich-Guy ratio", Box::new(criterion_5)),
        ("6 T7 ratios", Box::new(criterion_6)),
        ("7 T4 ratios", Box::new(criterion_7)),
        ("8 Akiyama kappa", Box::new(criterion_8)),
        ("9 determinism across --jobs", Box::new(|| from_grid(criterion_9))),
    ];
    let mut failures = 0;
    for (name, check) in &criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failures += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
