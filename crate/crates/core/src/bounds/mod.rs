//! Effective lower bounds for windowed lcms, certified in log space with
//! outward-rounded intervals.
//!
//! A bound is a product `∏ bᵢ^{eᵢ}` of positive real quadratic surds with
//! rational exponents. When every base is rational the sign of
//! `lcm − bound` is also decided exactly, by raising both sides to the
//! common denominator of the exponents.

pub mod asymptotics;

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::numerics::interval::{Precision, RealInterval};
use crate::numerics::{lcm, lcm_all, BigRational};
use crate::recurrences::surd::QuadSurd;
use crate::recurrences::{lucas_terms, roots, terms, RecurrenceParams};
use crate::report::{ser_bigint, ser_interval};

/// Exact exponents beyond this are not expanded; the interval path decides.
const EXACT_EXPONENT_LIMIT: i64 = 1 << 16;
/// Escalation ceiling when the exact comparison already fixes the sign.
const EXACT_ESCALATION_CAP: u32 = 1 << 15;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `∏ base^exp` over positive real surds.
#[derive(Clone, Debug, Default)]
pub struct BoundExpr {
    factors: Vec<(QuadSurd, BigRational)>,
}

impl BoundExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn factor(mut self, base: QuadSurd, exp: BigRational) -> Self {
        debug_assert!(base.is_real() && base.signum() > 0);
        self.factors.push((base, exp));
        self
    }

    pub fn log(&self, frac_bits: u32) -> Result<RealInterval> {
        let mut acc = RealInterval::zero(frac_bits);
        for (base, exp) in &self.factors {
            if exp.is_zero() {
                continue;
            }
            let l = match base.as_rational() {
                Some(r) => RealInterval::ln_rational(r, frac_bits)?,
                None => base.to_interval(frac_bits).ln()?,
            };
            acc = acc.add(&l.mul_rational(exp));
        }
        Ok(acc)
    }

    /// Sign of `x − bound` when all bases are rational and the exponents are
    /// small enough to expand.
    pub fn exact_cmp(&self, x: &BigInt) -> Option<Ordering> {
        let mut d = BigInt::one();
        for (base, exp) in &self.factors {
            base.as_rational()?;
            d = d.lcm(exp.denom());
        }
        let d = d.to_i64()?;
        let mut lhs = BigRational::from_integer(x.pow(u32::try_from(d).ok()?));
        let mut rhs = BigRational::one();
        for (base, exp) in &self.factors {
            let k = (exp * BigRational::from_integer(d.into())).to_integer().to_i64()?;
            if k.abs() > EXACT_EXPONENT_LIMIT {
                return None;
            }
            let b = base.as_rational()?;
            if k >= 0 {
                rhs *= b.pow(k as i32);
            } else {
                lhs *= b.pow((-k) as i32);
            }
        }
        Some(lhs.cmp(&rhs))
    }

    pub fn is_rational(&self) -> bool {
        self.factors.iter().all(|(b, _)| b.is_rational())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Rational bound: sign fixed by integer arithmetic, intervals reported.
    Exact,
    Interval,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    /// `x ≥ bound`
    Lower,
    /// `x ≤ bound`
    Upper,
}

#[derive(Clone, Debug)]
struct Certified {
    log_x: RealInterval,
    log_bound: RealInterval,
    slack: RealInterval,
    method: Method,
    pass: bool,
}

fn certify(x: &BigInt, expr: &BoundExpr, side: Side, precision: Precision) -> Result<Certified> {
    certify_with(x, expr, None, side, precision)
}

/// `log_bound_hint`, when given, is `expr.log` at the first scheduled precision.
fn certify_with(
    x: &BigInt,
    expr: &BoundExpr,
    log_bound_hint: Option<&RealInterval>,
    side: Side,
    precision: Precision,
) -> Result<Certified> {
    let exact = expr.exact_cmp(x).map(|o| match side {
        Side::Lower => o,
        Side::Upper => o.reverse(),
    });
    let method = if exact.is_some() { Method::Exact } else { Method::Interval };
    let mut schedule = precision.schedule();
    if matches!(exact, Some(o) if o != Ordering::Equal) {
        let mut w = *schedule.last().expect("nonempty");
        while w < EXACT_ESCALATION_CAP {
            w *= 2;
            schedule.push(w);
        }
    }
    let x_rat = BigRational::from_integer(x.clone());
    let mut last = None;
    for bits in schedule {
        let log_x = RealInterval::ln_rational(&x_rat, bits)?;
        let log_bound = match log_bound_hint {
            Some(h) if h.frac_bits() == bits => h.clone(),
            _ => expr.log(bits)?,
        };
        let slack = match (exact, side) {
            (Some(Ordering::Equal), _) => RealInterval::zero(bits),
            (_, Side::Lower) => log_x.sub(&log_bound),
            (_, Side::Upper) => log_bound.sub(&log_x),
        };
        let decided = slack.is_nonnegative() || slack.is_negative();
        let out = Certified { log_x, log_bound, pass: slack.is_nonnegative(), slack, method };
        if decided {
            return Ok(out);
        }
        last = Some(out);
    }
    // Undecided at the cap: not certified, so not a pass.
    Ok(last.expect("schedule is nonempty"))
}

/// The theorems with a closed-form lower bound on a windowed lcm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theorem {
    T2,
    T6,
    Fibo,
    T3,
    BouslaFarhi,
}

impl Theorem {
    pub fn label(self) -> &'static str {
        match self {
            Theorem::T2 => "Theorem 2",
            Theorem::T6 => "Theorem T6",
            Theorem::Fibo => "Corollary fibo",
            Theorem::T3 => "Theorem T3",
            Theorem::BouslaFarhi => "Eq. (6)",
        }
    }
}

/// The opposite inequality, reported for two-sided checks.
#[derive(Clone, Debug, Serialize)]
pub struct UpperCheck {
    #[serde(serialize_with = "ser_interval")]
    pub log_bound: RealInterval,
    #[serde(serialize_with = "ser_interval")]
    pub slack: RealInterval,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub tag: String,
    pub params: Value,
    pub m: u64,
    pub n: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub lcm: BigInt,
    #[serde(serialize_with = "ser_interval")]
    pub log_lcm: RealInterval,
    #[serde(serialize_with = "ser_interval")]
    pub log_bound: RealInterval,
    /// `log_lcm − log_bound`
    #[serde(serialize_with = "ser_interval")]
    pub slack: RealInterval,
    /// `log gcd(R0, R1)`
    #[serde(serialize_with = "ser_interval")]
    pub t_const: RealInterval,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<UpperCheck>,
    /// `gcd(P,Q) = gcd(R1,Q) = 1` for the underlying recurrence.
    pub theorem_scope: bool,
    pub method: Method,
    pub pass: bool,
}

/// One admissible parameter choice for T2, T6 or T3, as a recurrence plus
/// the bases of its bound.
#[derive(Clone, Debug)]
pub struct BoundInstance {
    pub theorem: Theorem,
    pub params: Value,
    pub seq: RecurrenceParams,
    bases: [QuadSurd; 3],
}

impl BoundInstance {
    /// `lcm(cU_{m+1}+dU_m, …, cU_{n+1}+dU_n)`, the recurrence with
    /// `R0 = c`, `R1 = cP + d`.
    pub fn t2(p: i64, q: i64, c: i64, d: i64) -> Result<Self> {
        if p < 1 || q < 1 {
            return Err(Error::pre(format!("Theorem 2 needs P ≥ 1 and Q ≥ 1, got P={p}, Q={q}")));
        }
        if p * p - 4 * q <= 0 {
            return Err(Error::pre(format!("Theorem 2 needs Δ > 0, got Δ={}", p * p - 4 * q)));
        }
        if c < 1 || d < 1 {
            return Err(Error::pre(format!("Theorem 2 needs c ≥ 1 and d ≥ 1, got c={c}, d={d}")));
        }
        if p.gcd(&q) != 1 {
            return Err(Error::OutOfScope(format!("gcd(P,Q) = {}", p.gcd(&q))));
        }
        let r1 = c.checked_mul(p).and_then(|x| x.checked_add(d)).ok_or_else(|| Error::domain("cP + d overflows"))?;
        let seq = RecurrenceParams::validate(p, q, c, r1)?;
        let alpha = roots(&seq, 64)?.alpha_exact;
        let c_alpha_d = &(&QuadSurd::from_int(c) * &alpha) + &QuadSurd::from_int(d);
        let g = QuadSurd::from_int(c.gcd(&d));
        let ratio = &c_alpha_d / &(&alpha * &g);
        Ok(BoundInstance {
            theorem: Theorem::T2,
            params: json!({ "P": p, "Q": q, "c": c, "d": d }),
            seq,
            bases: [c_alpha_d, ratio, alpha],
        })
    }

    pub fn t6(p: i64, q: i64, r0: i64, r1: i64) -> Result<Self> {
        if p <= 0 || q >= 0 {
            return Err(Error::pre(format!("Theorem T6 needs P > 0 and Q < 0, got P={p}, Q={q}")));
        }
        if r0 < 1 || r1 < 1 {
            return Err(Error::pre(format!("Theorem T6 needs R0, R1 ≥ 1, got R0={r0}, R1={r1}")));
        }
        let seq = RecurrenceParams::validate(p, q, r0, r1)?;
        seq.require_scope()?;
        let rd = roots(&seq, 64)?;
        let g = QuadSurd::from_int(r0.gcd(&r1));
        let abs_beta = -rd.beta_exact.clone();
        let lead = &(&QuadSurd::from_int(r1) + &(&QuadSurd::from_int(r0) * &abs_beta)) / &g;
        Ok(BoundInstance {
            theorem: Theorem::T6,
            params: serde_json::to_value(&seq).expect("params serialize"),
            seq,
            bases: [g, lead, rd.alpha_exact],
        })
    }

    /// The `(P, Q) = (1, −1)` instance of T6 for `cF_m + dF_{m−1}`, i.e.
    /// `R0 = d`, `R1 = c`.
    pub fn fibo(c: i64, d: i64) -> Result<Self> {
        let mut inst = Self::t6(1, -1, d, c)?;
        inst.theorem = Theorem::Fibo;
        inst.params = json!({ "P": 1, "Q": -1, "c": c, "d": d });
        Ok(inst)
    }

    /// `u_t = u0 + r[t]_q`, the recurrence with `P = q+1`, `Q = q`,
    /// `R0 = u0`, `R1 = u0 + r`.
    pub fn t3(q: i64, u0: i64, r: i64) -> Result<Self> {
        if q < 2 || u0 < 1 || r < 1 {
            return Err(Error::pre(format!("Theorem T3 needs q ≥ 2, u0 ≥ 1, r ≥ 1, got q={q}, u0={u0}, r={r}")));
        }
        let r1 = u0.checked_add(r).ok_or_else(|| Error::domain("u0 + r overflows"))?;
        if r1.gcd(&q) != 1 {
            return Err(Error::OutOfScope(format!("gcd(u0+r, q) = {}", r1.gcd(&q))));
        }
        let seq = RecurrenceParams::validate(q + 1, q, u0, r1)?;
        let g = u0.gcd(&r);
        Ok(BoundInstance {
            theorem: Theorem::T3,
            params: json!({ "q": q, "u0": u0, "r": r }),
            seq,
            bases: [QuadSurd::from_int(g), QuadSurd::rational(rat(r, g)), QuadSurd::from_int(q)],
        })
    }

    /// Largest admissible `m` for a given `n`, or `None` if `n` is too small.
    pub fn max_m(&self, n: u64) -> Option<u64> {
        let top = match self.theorem {
            Theorem::T6 | Theorem::Fibo => {
                if n < 2 {
                    return None;
                }
                n.min(n.div_ceil(2) + 1)
            }
            _ => n / 2,
        };
        (top >= 1).then_some(top)
    }

    pub fn check_window(&self, m: u64, n: u64) -> Result<()> {
        match self.max_m(n) {
            Some(top) if (1..=top).contains(&m) => Ok(()),
            Some(top) => Err(Error::pre(format!("{} needs 1 ≤ m ≤ {top} for n={n}, got m={m}", self.theorem.label()))),
            None => Err(Error::pre(format!("{} needs n ≥ 2, got n={n}", self.theorem.label()))),
        }
    }

    pub fn expr(&self, n: u64) -> BoundExpr {
        let n = n as i64;
        let exps = match self.theorem {
            Theorem::T2 => [rat(1, 1), rat(n, 2), rat(n * n, 4)],
            Theorem::T6 | Theorem::Fibo => [rat(1, 1), rat(n - 1, 2), rat(n * n - 2 * n - 7, 4)],
            Theorem::T3 => [rat(1, 1), rat(n + 2, 2), rat(n * (n - 2), 4)],
            Theorem::BouslaFarhi => unreachable!("not a three-factor bound"),
        };
        self.bases.iter().cloned().zip(exps).fold(BoundExpr::new(), |e, (b, x)| e.factor(b, x))
    }

    /// Certifies `lcm(R_m, …, R_n) ≥ bound(n)` given the lcm.
    pub fn evaluate(&self, m: u64, n: u64, lcm_value: BigInt, precision: Precision) -> Result<BoundReport> {
        self.evaluate_with(m, n, lcm_value, &self.expr(n), None, precision)
    }

    fn evaluate_with(
        &self,
        m: u64,
        n: u64,
        lcm_value: BigInt,
        expr: &BoundExpr,
        hint: Option<&RealInterval>,
        precision: Precision,
    ) -> Result<BoundReport> {
        let c = certify_with(&lcm_value, expr, hint, Side::Lower, precision)?;
        let bits = c.slack.frac_bits();
        let t_const = RealInterval::ln_rational(&BigRational::from_integer(self.seq.gcd_r0_r1.clone()), bits)?;
        Ok(BoundReport {
            tag: self.theorem.label().to_string(),
            params: self.params.clone(),
            m,
            n,
            lcm: lcm_value,
            log_lcm: c.log_x,
            log_bound: c.log_bound,
            slack: c.slack,
            t_const,
            upper: None,
            theorem_scope: self.seq.theorem_scope,
            method: c.method,
            pass: c.pass,
        })
    }

    pub fn report(&self, m: u64, n: u64, precision: Precision) -> Result<BoundReport> {
        self.check_window(m, n)?;
        let r = terms(&self.seq, n as usize + 1);
        let l = lcm_all(&r[m as usize..=n as usize])?;
        self.evaluate(m, n, l, precision)
    }

    /// Every admissible `(m, n)` with `n ≤ n_max`, ordered by `m` then `n`.
    pub fn sweep(&self, n_max: u64, precision: Precision) -> Result<Vec<BoundReport>> {
        let r = terms(&self.seq, n_max as usize + 1);
        let start = precision.schedule()[0];
        let exprs = (0..=n_max)
            .map(|n| {
                let e = self.expr(n.max(1));
                let l = e.log(start)?;
                Ok((e, l))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::new();
        for m in 1..=n_max {
            let mut acc = BigInt::one();
            for n in m..=n_max {
                acc = lcm(&acc, &r[n as usize])?;
                if self.check_window(m, n).is_ok() {
                    let (e, l) = &exprs[n as usize];
                    out.push(self.evaluate_with(m, n, acc.clone(), e, Some(l), precision)?);
                }
            }
        }
        Ok(out)
    }
}

pub fn bound_t2(p: i64, q: i64, c: i64, d: i64, m: u64, n: u64, precision: Precision) -> Result<BoundReport> {
    BoundInstance::t2(p, q, c, d)?.report(m, n, precision)
}

pub fn bound_t6(params: &RecurrenceParams, m: u64, n: u64, precision: Precision) -> Result<BoundReport> {
    BoundInstance::t6(params.p, params.q, params.r0, params.r1)?.report(m, n, precision)
}

pub fn bound_fibo(c: i64, d: i64, m: u64, n: u64, precision: Precision) -> Result<BoundReport> {
    BoundInstance::fibo(c, d)?.report(m, n, precision)
}

pub fn bound_t3(q: i64, u0: i64, r: i64, m: u64, n: u64, precision: Precision) -> Result<BoundReport> {
    BoundInstance::t3(q, u0, r)?.report(m, n, precision)
}

fn golden() -> QuadSurd {
    QuadSurd::new(rat(1, 2), rat(1, 2), 5)
}

fn bousla_farhi_at(n: u64, lcm_value: BigInt, precision: Precision) -> Result<BoundReport> {
    let n_i = n as i64;
    let lower = BoundExpr::new().factor(golden(), rat(n_i * n_i - 9, 4));
    let upper = BoundExpr::new().factor(golden(), rat(n_i * n_i + 4 * n_i, 3));
    let lo = certify(&lcm_value, &lower, Side::Lower, precision)?;
    let hi = certify(&lcm_value, &upper, Side::Upper, precision)?;
    Ok(BoundReport {
        tag: Theorem::BouslaFarhi.label().to_string(),
        params: json!({ "P": 1, "Q": -1, "R0": 0, "R1": 1 }),
        m: 1,
        n,
        lcm: lcm_value,
        t_const: RealInterval::zero(lo.slack.frac_bits()),
        log_lcm: lo.log_x,
        log_bound: lo.log_bound,
        slack: lo.slack,
        upper: Some(UpperCheck { log_bound: hi.log_bound, slack: hi.slack, pass: hi.pass }),
        theorem_scope: true,
        method: Method::Interval,
        pass: lo.pass && hi.pass,
    })
}

/// `Φ^{n²/4−9/4} ≤ lcm(F_1, …, F_n) ≤ Φ^{n²/3+4n/3}`.
pub fn check_bousla_farhi(n: u64, precision: Precision) -> Result<BoundReport> {
    if n == 0 {
        return Err(Error::pre("need n ≥ 1"));
    }
    let f = lucas_terms(&RecurrenceParams::lucas(1, -1)?, n as usize + 1);
    bousla_farhi_at(n, lcm_all(&f[1..])?, precision)
}

/// The two-sided check for every `1 ≤ n ≤ n_max`.
pub fn bousla_farhi_series(n_max: u64, precision: Precision) -> Result<Vec<BoundReport>> {
    let f = lucas_terms(&RecurrenceParams::lucas(1, -1)?, n_max as usize + 1);
    let mut prefix = Vec::with_capacity(n_max as usize);
    let mut acc = BigInt::one();
    for x in &f[1..] {
        acc = lcm(&acc, x)?;
        prefix.push(acc.clone());
    }
    prefix.into_par_iter().enumerate().map(|(i, l)| bousla_farhi_at(i as u64 + 1, l, precision)).collect()
}

/// Admissible instances with every parameter of absolute value ≤ `limit`,
/// in lexicographic parameter order.
pub fn hypothesis_grid(theorem: Theorem, limit: i64) -> Vec<BoundInstance> {
    let pos = || 1..=limit;
    let mut out = Vec::new();
    match theorem {
        Theorem::T2 => {
            for p in pos() {
                for q in pos() {
                    for c in pos() {
                        for d in pos() {
                            // the proof applies Theorem 1 to R0 = c, R1 = cP + d,
                            // which needs gcd(cP + d, Q) = 1
                            let inst = BoundInstance::t2(p, q, c, d).ok();
                            out.extend(inst.filter(|i| i.seq.theorem_scope));
                        }
                    }
                }
            }
        }
        Theorem::T6 => {
            for p in pos() {
                for q in -limit..=-1 {
                    for r0 in pos() {
                        for r1 in pos() {
                            out.extend(BoundInstance::t6(p, q, r0, r1).ok());
                        }
                    }
                }
            }
        }
        Theorem::Fibo => {
            for c in pos() {
                for d in pos() {
                    out.extend(BoundInstance::fibo(c, d).ok());
                }
            }
        }
        Theorem::T3 => {
            for q in 2..=limit {
                for u0 in pos() {
                    for r in pos() {
                        out.extend(BoundInstance::t3(q, u0, r).ok());
                    }
                }
            }
        }
        Theorem::BouslaFarhi => {}
    }
    out
}

/// Sweeps every admissible `(m, n)` with `n ≤ n_max` over the hypothesis grid.
pub fn bound_grid(theorem: Theorem, limit: i64, n_max: u64, precision: Precision) -> Result<Vec<BoundReport>> {
    let cells: Vec<Vec<BoundReport>> =
        hypothesis_grid(theorem, limit).par_iter().map(|inst| inst.sweep(n_max, precision)).collect::<Result<_>>()?;
    Ok(cells.into_iter().flatten().collect())
}
