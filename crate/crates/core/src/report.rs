//! JSON report schema shared by the library runners and the CLI.
//!
//! Arbitrary-precision values are always emitted as decimal strings
//! (`"n"` or `"n/d"`), never as JSON numbers.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize, Serializer};

use crate::numerics::interval::RealInterval;
use crate::numerics::{rational_to_string, BigRational};

/// Fractional digits of directed decimal endpoints in reports.
pub const INTERVAL_DIGITS: u32 = 30;

pub fn ser_bigint<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(x)
}

pub fn ser_rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational_to_string(x))
}

/// `{"lo": …, "hi": …}` with `lo` rounded down and `hi` rounded up.
pub fn ser_interval<S: Serializer>(x: &RealInterval, s: S) -> Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Endpoints {
        lo: String,
        hi: String,
    }
    Endpoints { lo: x.lo_decimal(INTERVAL_DIGITS), hi: x.hi_decimal(INTERVAL_DIGITS) }.serialize(s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// No failure, but nothing was checked (every window had a zero term).
    Skipped,
    /// A computed value with no pass/fail claim attached, e.g. a ratio series.
    Info,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: u64,
    pub fail: u64,
    pub skipped_zero_windows: u64,
}

impl Summary {
    pub fn record(&mut self, verdict: Verdict, skipped_zero_windows: u64) {
        match verdict {
            Verdict::Pass => self.pass += 1,
            Verdict::Fail => self.fail += 1,
            Verdict::Skipped | Verdict::Info => {}
        }
        self.skipped_zero_windows += skipped_zero_windows;
    }
}

/// One result entry: the theorem or lemma label, the check it belongs to, and a
/// check-specific payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub tag: String,
    pub check: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub params: serde_json::Value,
    pub detail: serde_json::Value,
}

/// Top-level report: `{config, results, summary}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: serde_json::Value,
    pub results: Vec<ResultEntry>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: serde_json::Value) -> Self {
        Report { config, results: Vec::new(), summary: Summary::default() }
    }

    pub fn push(&mut self, entry: ResultEntry, skipped_zero_windows: u64) {
        self.summary.record(entry.verdict, skipped_zero_windows);
        self.results.push(entry);
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
