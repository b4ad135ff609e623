//! Deterministic parameter-grid runners for the lcm lab checks.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::combinatorics::{exponent_relations_from, u_factorials};
use crate::error::{Error, Result};
use crate::numerics::{lcm, BigRational};
use crate::recurrences::{lucas_terms, RecurrenceParams};
use crate::report::{Report, ResultEntry, Verdict};

use super::identities::{
    dif_from_table, gcd_lemma_scan, partial_fractions_from_table, tri_report, IdentityReport, IdentityTag, Window,
};
use super::{certificate_sweep, SequenceTable};

/// Inclusive integer range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Range {
    pub min: i64,
    pub max: i64,
}

impl Range {
    pub fn sym(r: i64) -> Self {
        Range { min: -r, max: r }
    }

    fn values(self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

/// Grid ranges, window limits and the seed for randomized windows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "P")]
    pub p: Range,
    #[serde(rename = "Q")]
    pub q: Range,
    #[serde(rename = "R0")]
    pub r0: Range,
    #[serde(rename = "R1")]
    pub r1: Range,
    pub cert_n_max: u64,
    pub identity_n_max: u64,
    pub dif_max: u64,
    pub pf_samples: u64,
    pub pf_n_max: u64,
    pub pf_max_span: u64,
    pub gcd_m_max: u64,
    pub e15_n_max: u64,
    pub seed: u64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            p: Range::sym(6),
            q: Range::sym(6),
            r0: Range::sym(5),
            r1: Range::sym(5),
            cert_n_max: 25,
            identity_n_max: 40,
            dif_max: 60,
            pf_samples: 500,
            pf_n_max: 30,
            pf_max_span: 12,
            gcd_m_max: 200,
            e15_n_max: 25,
            seed: 0x5eed_1ca5,
        }
    }
}

impl GridConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("P", self.p), ("Q", self.q), ("R0", self.r0), ("R1", self.r1)] {
            if r.min > r.max || r.min.abs().max(r.max.abs()) > 1 << 20 {
                return Err(Error::domain(format!("bad {name} range [{}, {}]", r.min, r.max)));
            }
        }
        if self.pf_max_span == 0 || self.pf_n_max < 2 {
            return Err(Error::domain("pf windows need pf_n_max ≥ 2 and pf_max_span ≥ 1"));
        }
        Ok(())
    }

    /// Theorem-scope, nondegenerate tuples in lexicographic `(P, Q, R0, R1)` order.
    pub fn scope_cells(&self) -> Vec<RecurrenceParams> {
        let mut out = Vec::new();
        for p in self.p.values() {
            for q in self.q.values() {
                for r0 in self.r0.values() {
                    for r1 in self.r1.values() {
                        if let Ok(params) = RecurrenceParams::validate(p, q, r0, r1) {
                            if params.theorem_scope && params.require_nondegenerate().is_ok() {
                                out.push(params);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Nondegenerate `U(P, Q)` in lexicographic order; `scope` additionally
    /// requires `gcd(P, Q) = 1`.
    pub fn lucas_cells(&self, scope: bool) -> Vec<RecurrenceParams> {
        let mut out = Vec::new();
        for p in self.p.values() {
            for q in self.q.values() {
                if let Ok(params) = RecurrenceParams::lucas(p, q) {
                    if params.require_nondegenerate().is_ok() && (!scope || params.theorem_scope) {
                        out.push(params);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Cert,
    Co,
    Co2,
    Tri,
    Derrr,
    Dif,
    Pf,
    Gcd,
    E15,
}

impl Check {
    pub const ALL: [Check; 9] =
        [Check::Cert, Check::Co, Check::Co2, Check::Tri, Check::Derrr, Check::Dif, Check::Pf, Check::Gcd, Check::E15];

    pub fn name(self) -> &'static str {
        match self {
            Check::Cert => "cert",
            Check::Co => "co",
            Check::Co2 => "co2",
            Check::Tri => "tri",
            Check::Derrr => "derrr",
            Check::Dif => "dif",
            Check::Pf => "pf",
            Check::Gcd => "gcd",
            Check::E15 => "e15",
        }
    }

    pub fn parse(s: &str) -> Option<Check> {
        Check::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Number of failing instances kept verbatim in a cell's detail.
const FAILURE_SAMPLE: usize = 8;

struct Cell {
    entry: ResultEntry,
    skipped: u64,
}

fn params_json(p: &RecurrenceParams) -> Value {
    serde_json::to_value(p).expect("params serialize")
}

fn aggregate(
    tag: IdentityTag,
    check: Check,
    params: &RecurrenceParams,
    reports: impl Iterator<Item = IdentityReport>,
) -> Cell {
    let mut checked = 0u64;
    let mut failures = Vec::new();
    let mut failed = 0u64;
    for r in reports {
        checked += 1;
        if !r.pass {
            failed += 1;
            if failures.len() < FAILURE_SAMPLE {
                failures.push(r);
            }
        }
    }
    Cell {
        entry: ResultEntry {
            tag: tag.label().to_string(),
            check: check.name().to_string(),
            verdict: Verdict::from_bool(failed == 0),
            params: params_json(params),
            detail: json!({ "checked": checked, "failed": failed, "failures": failures }),
        },
        skipped: 0,
    }
}

fn run_cert(params: &RecurrenceParams, n_max: u64) -> Cell {
    let table = SequenceTable::new(params, n_max);
    let sweep = certificate_sweep(&table, n_max);
    let failures: Vec<_> = sweep.failures.iter().take(FAILURE_SAMPLE).collect();
    Cell {
        entry: ResultEntry {
            tag: IdentityTag::Cert.label().to_string(),
            check: Check::Cert.name().to_string(),
            verdict: Verdict::from_bool(sweep.failures.is_empty()),
            params: params_json(params),
            detail: json!({
                "checked": sweep.checked,
                "failed": sweep.failures.len(),
                "skipped_zero_windows": sweep.skipped_zero_windows,
                "failures": failures,
            }),
        },
        skipped: sweep.skipped_zero_windows,
    }
}

/// All `1 ≤ k ≤ n ≤ n_max` instances of one of the four Lucas identities,
/// built row by row with incremental lcms.
fn lucas_identity_reports(check: Check, u: &[BigInt], n_max: usize) -> Vec<IdentityReport> {
    let mut prefix = vec![BigInt::one()];
    for m in 1..=n_max + 1 {
        let next = lcm(&prefix[m - 1], &u[m]).expect("U_m ≠ 0");
        prefix.push(next);
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        if check == Check::Derrr {
            let mut top = BigInt::one();
            for um in &u[(n - n.div_ceil(2) + 1)..=n] {
                top = lcm(&top, um).expect("U_m ≠ 0");
            }
            out.push(IdentityReport::ints(IdentityTag::Derrr, Window::n(n as u64), prefix[n].clone(), top));
            continue;
        }
        // binom(n, m)_U for m = 0..=n; integral throughout for Lucas scope.
        let mut row = vec![BigInt::one()];
        for m in 1..=n {
            let (q, r) = (&row[m - 1] * &u[n - m + 1]).div_rem(&u[m]);
            debug_assert!(r.is_zero());
            let _ = r;
            row.push(q);
        }
        let mut top = BigInt::one();
        let mut top_shift = u[n + 1].clone();
        let mut rhs_co = BigInt::one();
        let mut lhs_co2 = BigInt::one();
        for k in 1..=n {
            let w = Window::kn(k as u64, n as u64);
            top = lcm(&top, &u[n - k + 1]).expect("U_m ≠ 0");
            match check {
                Check::Co => {
                    rhs_co = lcm(&rhs_co, &(&u[k] * &row[k])).expect("nonzero");
                    out.push(IdentityReport::ints(IdentityTag::Co, w, top.clone(), rhs_co.clone()));
                }
                Check::Co2 => {
                    top_shift = lcm(&top_shift, &u[n - k + 1]).expect("U_m ≠ 0");
                    lhs_co2 = lcm(&lhs_co2, &row[k]).expect("nonzero");
                    let rhs = BigRational::new(top_shift.clone(), u[n + 1].clone().abs());
                    out.push(IdentityReport::equality(
                        IdentityTag::Co2,
                        w,
                        BigRational::from_integer(lhs_co2.clone()),
                        rhs,
                    ));
                }
                Check::Tri => {
                    let lhs = BigRational::new(top.clone(), prefix[k].clone());
                    out.push(tri_report(w, lhs, row[k].clone()));
                }
                _ => unreachable!("not a Lucas identity check"),
            }
        }
    }
    out
}

fn lucas_identity_cell(check: Check, params: &RecurrenceParams, n_max: u64) -> Cell {
    let u = lucas_terms(params, n_max as usize + 2);
    let tag = match check {
        Check::Co => IdentityTag::Co,
        Check::Co2 => IdentityTag::Co2,
        Check::Tri => IdentityTag::Tri,
        _ => IdentityTag::Derrr,
    };
    aggregate(tag, check, params, lucas_identity_reports(check, &u, n_max as usize).into_iter())
}

fn dif_cell(params: &RecurrenceParams, max: u64) -> Cell {
    let u = lucas_terms(params, max as usize + 1);
    let reports = (1..=max as usize)
        .flat_map(|i| (1..=max as usize).map(move |j| (i, j)))
        .map(|(i, j)| dif_from_table(params.q, &u, i, j));
    aggregate(IdentityTag::Dif, Check::Dif, params, reports)
}

fn gcd_cell(params: &RecurrenceParams, m_max: u64) -> Cell {
    let worst = gcd_lemma_scan(params, m_max);
    Cell {
        entry: ResultEntry {
            tag: IdentityTag::GcdLemmas.label().to_string(),
            check: Check::Gcd.name().to_string(),
            verdict: Verdict::from_bool(worst == 1),
            params: params_json(params),
            detail: json!({ "m_max": m_max, "max_gcd": worst.to_string() }),
        },
        skipped: 0,
    }
}

fn e15_cell(params: &RecurrenceParams, n_max: u64) -> Cell {
    let u = lucas_terms(params, n_max as usize + 1);
    let fact = u_factorials(&u);
    let mut checked = 0u64;
    let mut failures = Vec::new();
    for n in 1..=n_max {
        for k in 1..=n {
            let (plain, shifted) = exponent_relations_from(params.q, &fact, k, n);
            checked += 2;
            if !plain {
                failures.push(json!({ "relation": IdentityTag::E15, "k": k, "n": n }));
            }
            if !shifted {
                failures.push(json!({ "relation": IdentityTag::E15Shifted, "k": k, "n": n }));
            }
        }
    }
    let failed = failures.len();
    failures.truncate(FAILURE_SAMPLE);
    Cell {
        entry: ResultEntry {
            tag: format!("{} / {}", IdentityTag::E15.label(), IdentityTag::E15Shifted.label()),
            check: Check::E15.name().to_string(),
            verdict: Verdict::from_bool(failed == 0),
            params: params_json(params),
            detail: json!({ "checked": checked, "failed": failed, "failures": failures }),
        },
        skipped: 0,
    }
}

/// One seeded random partial-fraction window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PfSample {
    pub cell: usize,
    pub k: u64,
    pub n: u64,
}

/// Draws `cfg.pf_samples` windows `(cell, k, n)` with `1 ≤ k ≤ n ≤ pf_n_max`,
/// `n ≥ 2` and `n − k ≤ pf_max_span`, from a ChaCha8 stream seeded by `cfg.seed`.
pub fn pf_samples(cfg: &GridConfig, cells: usize) -> Vec<PfSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.pf_samples)
        .map(|_| {
            let cell = rng.gen_range(0..cells);
            let n = rng.gen_range(2..=cfg.pf_n_max);
            let span = rng.gen_range(0..=cfg.pf_max_span.min(n - 1));
            PfSample { cell, k: n - span, n }
        })
        .collect()
}

fn pf_cell(params: &RecurrenceParams, sample: PfSample) -> Cell {
    let table = SequenceTable::new(params, sample.n);
    let window = json!({ "k": sample.k, "n": sample.n });
    let mut entry = ResultEntry {
        tag: format!("{} / {}", IdentityTag::PfE5.label(), IdentityTag::PfE6.label()),
        check: Check::Pf.name().to_string(),
        verdict: Verdict::Skipped,
        params: params_json(params),
        detail: Value::Null,
    };
    if let Some(index) = table.zero_in(sample.k, sample.n) {
        entry.detail = json!({ "window": window, "zero_term": index });
        return Cell { entry, skipped: 1 };
    }
    let reports = partial_fractions_from_table(&table, sample.k, sample.n);
    entry.verdict = Verdict::from_bool(reports.iter().all(|r| r.pass));
    entry.detail = json!({ "window": window, "reports": reports });
    Cell { entry, skipped: 0 }
}

fn run_check(check: Check, cfg: &GridConfig) -> Vec<Cell> {
    match check {
        Check::Cert => cfg.scope_cells().par_iter().map(|p| run_cert(p, cfg.cert_n_max)).collect(),
        Check::Co | Check::Co2 | Check::Tri | Check::Derrr => {
            cfg.lucas_cells(true).par_iter().map(|p| lucas_identity_cell(check, p, cfg.identity_n_max)).collect()
        }
        Check::Dif => cfg.lucas_cells(false).par_iter().map(|p| dif_cell(p, cfg.dif_max)).collect(),
        Check::Gcd => cfg.scope_cells().par_iter().map(|p| gcd_cell(p, cfg.gcd_m_max)).collect(),
        Check::E15 => cfg.lucas_cells(true).par_iter().map(|p| e15_cell(p, cfg.e15_n_max)).collect(),
        Check::Pf => {
            let cells = cfg.scope_cells();
            if cells.is_empty() {
                return Vec::new();
            }
            pf_samples(cfg, cells.len()).par_iter().map(|s| pf_cell(&cells[s.cell], *s)).collect()
        }
    }
}

/// Runs the requested checks in the given order over the grid. Results are
/// ordered by check, then by cell key, independent of scheduling.
pub fn run_grid(checks: &[Check], cfg: &GridConfig) -> Result<Report> {
    cfg.validate()?;
    let config = json!({ "grid": cfg, "checks": checks });
    let mut report = Report::new(config);
    for &check in checks {
        for cell in run_check(check, cfg) {
            report.push(cell.entry, cell.skipped);
        }
    }
    Ok(report)
}
