//! Empirical estimators for the growth of `log lcm`: ratio series compared
//! against the predicted limits.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::interval::{Precision, RealInterval};
use crate::numerics::{gcd, lcm, BigRational};
use crate::recurrences::{roots, terms, RecurrenceParams};
use crate::report::ser_interval;

#[derive(Clone, Debug, Serialize)]
pub struct RatioPoint {
    pub n: u64,
    #[serde(serialize_with = "ser_interval")]
    pub numerator_log: RealInterval,
    #[serde(serialize_with = "ser_interval")]
    pub denominator_log: RealInterval,
    #[serde(serialize_with = "ser_interval")]
    pub ratio: RealInterval,
}

impl RatioPoint {
    fn new(n: u64, numerator_log: RealInterval, denominator_log: RealInterval) -> Result<Self> {
        let ratio = numerator_log.div(&denominator_log)?;
        Ok(RatioPoint { n, numerator_log, denominator_log, ratio })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AkiyamaEstimate {
    #[serde(serialize_with = "ser_interval")]
    pub kappa: RealInterval,
    /// `π² / (6(1 − κ))`
    #[serde(serialize_with = "ser_interval")]
    pub predicted_limit: RealInterval,
}

/// Evaluates `f` along the precision schedule until every returned interval
/// is tight.
fn escalate<T>(precision: Precision, f: impl Fn(u32) -> Result<(T, Vec<RealInterval>)>) -> Result<T> {
    let mut last = None;
    for bits in precision.schedule() {
        let (value, checks) = f(bits)?;
        if checks.iter().all(RealInterval::is_tight) {
            return Ok(value);
        }
        last = Some(value);
    }
    Ok(last.expect("schedule is nonempty"))
}

fn ln_int(x: &BigInt, bits: u32) -> Result<RealInterval> {
    RealInterval::ln_rational(&BigRational::from_integer(x.abs()), bits)
}

fn log_abs_alpha(params: &RecurrenceParams, bits: u32) -> Result<RealInterval> {
    roots(params, bits)?.log_abs_alpha()
}

fn nonzero_window(r: &[BigInt], from: usize, to: usize) -> Result<()> {
    match (from..=to).find(|&i| r[i].is_zero()) {
        Some(i) => Err(Error::ZeroTerm { index: i as u64 }),
        None => Ok(()),
    }
}

fn window_lcm(r: &[BigInt], from: usize, to: usize) -> Result<BigInt> {
    nonzero_window(r, from, to)?;
    r[from..=to].iter().try_fold(BigInt::one(), |acc, x| lcm(&acc, x))
}

/// `log lcm(R_{⌊n/2⌋}, …, R_n) / ((log|α|/4)·n²)` for each `n` in the list.
pub fn theorem4_scan(params: &RecurrenceParams, n_list: &[u64], precision: Precision) -> Result<Vec<RatioPoint>> {
    params.require_nondegenerate()?;
    if let Some(&n) = n_list.iter().find(|&&n| n < 2) {
        return Err(Error::pre(format!("need n ≥ 2, got n={n}")));
    }
    let n_max = n_list.iter().copied().max().unwrap_or(0);
    let r = terms(params, n_max as usize + 1);
    n_list
        .par_iter()
        .map(|&n| {
            let l = window_lcm(&r, n as usize / 2, n as usize)?;
            escalate(precision, |bits| {
                let num = ln_int(&l, bits)?;
                let den =
                    log_abs_alpha(params, bits)?.mul_rational(&BigRational::new(BigInt::from(n) * n, BigInt::from(4)));
                let p = RatioPoint::new(n, num, den)?;
                let check = p.ratio.clone();
                Ok((p, vec![check]))
            })
        })
        .collect()
}

/// `log lcm / log|R_n⋯R_{n+m}|` and `log lcm / (n(m+1)·log|α|)` over the
/// window `R_n, …, R_{n+m}`.
pub fn ratio_t7(params: &RecurrenceParams, m: u64, n: u64, precision: Precision) -> Result<(RatioPoint, RatioPoint)> {
    params.require_nondegenerate()?;
    if n == 0 {
        return Err(Error::pre("need n ≥ 1"));
    }
    let r = terms(params, (n + m) as usize + 1);
    let (from, to) = (n as usize, (n + m) as usize);
    let l = window_lcm(&r, from, to)?;
    let product: BigInt = r[from..=to].iter().product::<BigInt>().abs();
    if product.is_one() {
        return Err(Error::pre("log|product| = 0 over this window"));
    }
    debug_assert!((&product % &l).is_zero());
    escalate(precision, |bits| {
        let num = ln_int(&l, bits)?;
        let mut first = RatioPoint::new(n, num.clone(), ln_int(&product, bits)?)?;
        // the lcm divides the product
        first.ratio = if l == product { RealInterval::from_i64(1, bits) } else { first.ratio.cap_above(1) };
        let scale = BigInt::from(n) * (m + 1);
        let second = RatioPoint::new(n, num, log_abs_alpha(params, bits)?.mul_integer(&scale))?;
        let checks = vec![first.ratio.clone(), second.ratio.clone()];
        Ok(((first, second), checks))
    })
}

/// κ and the predicted limit `π²/(6(1−κ))` for the pair `(P, Q)`.
pub fn akiyama_estimate(params: &RecurrenceParams, bits: u32) -> Result<AkiyamaEstimate> {
    let p2 = BigInt::from(params.p) * params.p;
    let g = gcd(&p2, &BigInt::from(params.q))?;
    let kappa = ln_int(&g, bits)?.div(&log_abs_alpha(params, bits)?.mul_integer(&BigInt::from(2)))?;
    let one_minus = RealInterval::from_i64(1, bits).sub(&kappa);
    if one_minus.contains_zero() {
        return Err(Error::Inconclusive("the interval for 1 − κ contains 0".into()));
    }
    let pi = RealInterval::pi(bits);
    let predicted_limit = pi.mul(&pi).div(&one_minus.mul_integer(&BigInt::from(6)))?;
    Ok(AkiyamaEstimate { kappa, predicted_limit })
}

/// `log|R_1⋯R_n| / log lcm(R_1, …, R_n)` with the predicted limit.
pub fn ratio_akiyama(params: &RecurrenceParams, n: u64, precision: Precision) -> Result<(RatioPoint, AkiyamaEstimate)> {
    let mut series = akiyama_series(params, &[n], precision)?;
    let (point, est) = series.0.pop().map(|p| (p, series.1)).expect("one point");
    Ok((point, est))
}

/// The empirical ratio at each `n` of the list, sharing one estimate.
pub fn akiyama_series(
    params: &RecurrenceParams,
    n_list: &[u64],
    precision: Precision,
) -> Result<(Vec<RatioPoint>, AkiyamaEstimate)> {
    if params.r0 != 0 || params.r1 == 0 {
        return Err(Error::pre("need R0 = 0 and R1 ≠ 0"));
    }
    params.require_nondegenerate()?;
    let est = escalate(precision, |bits| {
        let e = akiyama_estimate(params, bits)?;
        let checks = vec![e.kappa.clone(), e.predicted_limit.clone()];
        Ok((e, checks))
    })?;
    if let Some(&n) = n_list.iter().find(|&&n| n == 0) {
        return Err(Error::pre(format!("need n ≥ 1, got n={n}")));
    }
    let n_max = n_list.iter().copied().max().unwrap_or(0) as usize;
    let r = terms(params, n_max + 1);
    nonzero_window(&r, 1, n_max.max(1))?;
    // prefix lcms and products, shared by all points
    let mut lcms = vec![BigInt::one()];
    let mut prods = vec![BigInt::one()];
    for t in 1..=n_max {
        let l = lcm(&lcms[t - 1], &r[t])?;
        lcms.push(l);
        let p = &prods[t - 1] * r[t].abs();
        prods.push(p);
    }
    let points = n_list
        .par_iter()
        .map(|&n| {
            let (l, p) = (&lcms[n as usize], &prods[n as usize]);
            if l.is_one() {
                return Err(Error::pre(format!("lcm(R_1..R_{n}) = 1")));
            }
            escalate(precision, |bits| {
                let pt = RatioPoint::new(n, ln_int(p, bits)?, ln_int(l, bits)?)?;
                let check = pt.ratio.clone();
                Ok((pt, vec![check]))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((points, est))
}

/// CSV with header `n,ratio_lo,ratio_hi`; endpoints are rounded outward.
pub fn ratio_csv(points: &[RatioPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "ratio_lo", "ratio_hi"]).expect("in-memory write");
    for p in points {
        w.write_record([
            p.n.to_string(),
            p.ratio.lo_decimal(crate::report::INTERVAL_DIGITS),
            p.ratio.hi_decimal(crate::report::INTERVAL_DIGITS),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii")
}
