//! Exact checks of the lcm identities for Lucas sequences and of the
//! auxiliary lemmas used to build the divisor certificate.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{binomial_row, f_exponent, u_factorials, window_lcm};
use crate::error::{Error, Result};
use crate::numerics::BigRational;
use crate::recurrences::{lucas_terms, RecurrenceParams};
use crate::report::ser_rational;

use super::SequenceTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum IdentityTag {
    /// Divisor certificate of `L_{k,n}`.
    Cert,
    Co,
    Co2,
    Tri,
    Derrr,
    Dif,
    PfE5,
    PfE6,
    GcdLemmas,
    /// lcm over `j` of `Q^{f(j,k,n)}[j−k]_U![n−j]_U!` divides `Q^{h(k,n)}[n−k]_U!`.
    E15,
    /// Same with exponent `f(j,k,n) − (n−k)`.
    E15Shifted,
}

impl IdentityTag {
    /// Human-facing label used in reports.
    pub fn label(self) -> &'static str {
        match self {
            IdentityTag::Cert => "Theorem 1",
            IdentityTag::Co => "Theorem co (id)",
            IdentityTag::Co2 => "Corollary co2 (id2)",
            IdentityTag::Tri => "Theorem tri",
            IdentityTag::Derrr => "Corollary derrr",
            IdentityTag::Dif => "Lemma dif",
            IdentityTag::PfE5 => "Lemma 4 (e5)",
            IdentityTag::PfE6 => "Lemma 4 (e6)",
            IdentityTag::GcdLemmas => "Lemmas lucas/gcd1",
            IdentityTag::E15 => "Relation (e15)",
            IdentityTag::E15Shifted => "Relation (eeeee)",
        }
    }
}

/// Which indices a report refers to. Unused coordinates are omitted from JSON.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Window {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<u64>,
}

impl Window {
    pub fn kn(k: u64, n: u64) -> Self {
        Window { k: Some(k), n: Some(n), ..Default::default() }
    }

    pub fn n(n: u64) -> Self {
        Window { n: Some(n), ..Default::default() }
    }

    pub fn ij(i: u64, j: u64) -> Self {
        Window { i: Some(i), j: Some(j), ..Default::default() }
    }

    pub fn m_max(m: u64) -> Self {
        Window { m_max: Some(m), ..Default::default() }
    }
}

/// Both sides of one identity (or divisibility) instance, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub tag: IdentityTag,
    pub window: Window,
    #[serde(serialize_with = "ser_rational")]
    pub lhs: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub rhs: BigRational,
    pub pass: bool,
}

impl IdentityReport {
    pub(crate) fn equality(tag: IdentityTag, window: Window, lhs: BigRational, rhs: BigRational) -> Self {
        let pass = lhs == rhs;
        IdentityReport { tag, window, lhs, rhs, pass }
    }

    pub(crate) fn ints(tag: IdentityTag, window: Window, lhs: BigInt, rhs: BigInt) -> Self {
        Self::equality(tag, window, BigRational::from_integer(lhs), BigRational::from_integer(rhs))
    }
}

fn lucas_preconditions(params: &RecurrenceParams, k: u64, n: u64) -> Result<()> {
    params.require_lucas()?;
    params.require_scope()?;
    params.require_nondegenerate()?;
    if k == 0 || k > n {
        return Err(Error::pre(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    Ok(())
}

fn rat(x: BigInt) -> BigRational {
    BigRational::from_integer(x)
}

/// `lcm(U_n, …, U_{n−k+1}) = lcm{U_m·binom(n,m)_U : 1 ≤ m ≤ k}`.
pub fn check_identity_co(params: &RecurrenceParams, n: u64, k: u64) -> Result<IdentityReport> {
    lucas_preconditions(params, k, n)?;
    let u = lucas_terms(params, n as usize + 2);
    let (n, k) = (n as usize, k as usize);
    let lhs = window_lcm(&u, n - k + 1, n)?;
    let row = binomial_row(&u, n, k)?;
    let items: Vec<BigInt> = (1..=k).map(|m| &u[m] * &row[m]).collect();
    let rhs = crate::numerics::lcm_all(&items)?;
    Ok(IdentityReport::ints(IdentityTag::Co, Window::kn(k as u64, n as u64), lhs, rhs))
}

/// `lcm{binom(n,m)_U : 1 ≤ m ≤ k} = lcm(U_{n+1}, …, U_{n−k+1}) / |U_{n+1}|`.
pub fn check_identity_co2(params: &RecurrenceParams, n: u64, k: u64) -> Result<IdentityReport> {
    lucas_preconditions(params, k, n)?;
    let u = lucas_terms(params, n as usize + 2);
    let (n, k) = (n as usize, k as usize);
    let row = binomial_row(&u, n, k)?;
    let lhs = crate::numerics::lcm_all(&row[1..=k])?;
    let top = window_lcm(&u, n - k + 1, n + 1)?;
    let rhs = BigRational::new(top, u[n + 1].abs());
    Ok(IdentityReport::equality(IdentityTag::Co2, Window::kn(k as u64, n as u64), rat(lhs), rhs))
}

/// `{n k}_U` is a positive integer dividing `binom(n,k)_U`.
pub fn check_theorem_tri(params: &RecurrenceParams, n: u64, k: u64) -> Result<IdentityReport> {
    lucas_preconditions(params, k, n)?;
    let u = lucas_terms(params, n as usize + 1);
    let (n, k) = (n as usize, k as usize);
    let lhs = BigRational::new(window_lcm(&u, n - k + 1, n)?, window_lcm(&u, 1, k)?);
    let rhs = binomial_row(&u, n, k)?.pop().expect("row has k+1 entries");
    Ok(tri_report(Window::kn(k as u64, n as u64), lhs, rhs))
}

pub(crate) fn tri_report(window: Window, lhs: BigRational, rhs: BigInt) -> IdentityReport {
    let pass = lhs.is_integer() && lhs.is_positive() && rhs.is_multiple_of(&lhs.to_integer());
    IdentityReport { tag: IdentityTag::Tri, window, lhs, rhs: rat(rhs), pass }
}

/// `lcm(U_1, …, U_n) = lcm(U_n, …, U_{n−⌈n/2⌉+1})`.
pub fn check_corollary_derrr(params: &RecurrenceParams, n: u64) -> Result<IdentityReport> {
    lucas_preconditions(params, 1, n)?;
    let u = lucas_terms(params, n as usize + 1);
    let n = n as usize;
    let lhs = window_lcm(&u, 1, n)?;
    let rhs = window_lcm(&u, n - n.div_ceil(2) + 1, n)?;
    Ok(IdentityReport::ints(IdentityTag::Derrr, Window::n(n as u64), lhs, rhs))
}

/// `U_i U_{j−1} − U_{i−1} U_j = −Q^{j−1} U_{i−j}` if `i ≥ j`, else
/// `Q^{i−1} U_{j−i}`.
pub fn check_lemma_dif(params: &RecurrenceParams, i: u64, j: u64) -> Result<IdentityReport> {
    if i == 0 || j == 0 {
        return Err(Error::pre("Lemma dif needs i, j ≥ 1"));
    }
    let u = lucas_terms(params, i.max(j) as usize + 1);
    Ok(dif_from_table(params.q, &u, i as usize, j as usize))
}

pub(crate) fn dif_from_table(q: i64, u: &[BigInt], i: usize, j: usize) -> IdentityReport {
    let q = BigInt::from(q);
    let lhs = &u[i] * &u[j - 1] - &u[i - 1] * &u[j];
    let rhs = if i >= j { -(q.pow(j as u32 - 1) * &u[i - j]) } else { q.pow(i as u32 - 1) * &u[j - i] };
    IdentityReport::ints(IdentityTag::Dif, Window::ij(i as u64, j as u64), lhs, rhs)
}

/// Evaluates the partial-fraction expansions of `R0^{n−k}/(R_k⋯R_n)` and
/// `R1^{n−k}/(R_k⋯R_n)`; one report per applicable equation (R0 ≠ 0, R1 ≠ 0).
pub fn check_partial_fractions(params: &RecurrenceParams, k: u64, n: u64) -> Result<Vec<IdentityReport>> {
    params.require_scope()?;
    params.require_nondegenerate()?;
    if k == 0 || k > n || n < 2 {
        return Err(Error::pre(format!("need 1 ≤ k ≤ n and n ≥ 2, got k={k}, n={n}")));
    }
    let table = SequenceTable::new(params, n);
    if let Some(index) = table.zero_in(k, n) {
        return Err(Error::ZeroTerm { index });
    }
    Ok(partial_fractions_from_table(&table, k, n))
}

pub(crate) fn partial_fractions_from_table(t: &SequenceTable, k: u64, n: u64) -> Vec<IdentityReport> {
    let p = &t.params;
    let span = (n - k) as u32;
    let product: BigInt = t.r[k as usize..=n as usize].iter().product();
    let q = BigInt::from(p.q);
    let sum = |shifted: bool| -> BigRational {
        let mut acc = BigRational::zero();
        for j in k..=n {
            let ju = j as usize;
            let base = if shifted { &t.u[ju - 1] } else { &t.u[ju] };
            let mut f = f_exponent(j, k, n);
            if shifted {
                f -= n - k;
            }
            let num = base.pow(span);
            let den = q.pow(f as u32) * &t.fact[(j - k) as usize] * &t.fact[(n - j) as usize] * &t.r[ju];
            let term = BigRational::new(num, den);
            if (n - j).is_multiple_of(2) {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    };
    let mut out = Vec::new();
    if p.r0 != 0 {
        let lhs = BigRational::new(BigInt::from(p.r0).pow(span), product.clone());
        out.push(IdentityReport::equality(IdentityTag::PfE5, Window::kn(k, n), lhs, sum(false)));
    }
    if p.r1 != 0 {
        let lhs = BigRational::new(BigInt::from(p.r1).pow(span), product);
        out.push(IdentityReport::equality(IdentityTag::PfE6, Window::kn(k, n), lhs, sum(true)));
    }
    out
}

/// `gcd(U_m, Q) = gcd(R_m, Q) = 1` for `1 ≤ m ≤ m_max`. The report's lhs is
/// the largest gcd encountered.
pub fn check_gcd_lemmas(params: &RecurrenceParams, m_max: u64) -> Result<IdentityReport> {
    params.require_scope()?;
    let worst = gcd_lemma_scan(params, m_max);
    Ok(IdentityReport::ints(IdentityTag::GcdLemmas, Window::m_max(m_max), BigInt::from(worst), BigInt::one()))
}

/// Largest `gcd(U_m, Q)` or `gcd(R_m, Q)` over `1 ≤ m ≤ m_max`, computed from
/// both recurrences reduced modulo `|Q|`.
pub(crate) fn gcd_lemma_scan(params: &RecurrenceParams, m_max: u64) -> i128 {
    let modulus = (params.q as i128).abs();
    let (p, q) = (params.p as i128, params.q as i128);
    let step = |a: i128, b: i128| (p * b - q * a).rem_euclid(modulus);
    let (mut u0, mut u1) = (0i128, 1i128.rem_euclid(modulus));
    let (mut r0, mut r1) = ((params.r0 as i128).rem_euclid(modulus), (params.r1 as i128).rem_euclid(modulus));
    let mut worst = 1;
    for _ in 1..=m_max {
        worst = worst.max(gcd_i128(u1, modulus)).max(gcd_i128(r1, modulus));
        (u0, u1) = (u1, step(u0, u1));
        (r0, r1) = (r1, step(r0, r1));
    }
    worst
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

/// All `(n, k)` with `1 ≤ k ≤ n ≤ n_max` where `{n k}_U = binom(n,k)_U`, in
/// lexicographic order.
pub fn explore_equality(params: &RecurrenceParams, n_max: u64) -> Result<Vec<(u64, u64)>> {
    params.require_lucas()?;
    params.require_nondegenerate()?;
    let u = lucas_terms(params, n_max as usize + 1);
    let fact = u_factorials(&u);
    let mut prefix = Vec::with_capacity(n_max as usize + 1);
    prefix.push(BigInt::one());
    for m in 1..=n_max as usize {
        let next = crate::numerics::lcm(&prefix[m - 1], &u[m])?;
        prefix.push(next);
    }
    let mut out = Vec::new();
    for n in 1..=n_max as usize {
        let mut top = BigInt::one();
        for k in 1..=n {
            top = crate::numerics::lcm(&top, &u[n - k + 1])?;
            let lcm_binom = BigRational::new(top.clone(), prefix[k].clone());
            let binom = BigRational::new(fact[n].clone(), &fact[k] * &fact[n - k]);
            if lcm_binom == binom {
                out.push((n as u64, k as u64));
            }
        }
    }
    Ok(out)
}
