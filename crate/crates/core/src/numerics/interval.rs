//! Outward-rounded real intervals over dyadic fixed-point endpoints.
//!
//! A [`RealInterval`] stores `[lo, hi] · 2^-frac_bits` with integer `lo`,
//! `hi`. Every operation rounds the lower endpoint toward −∞ and the upper
//! endpoint toward +∞, so the true value is never lost. Transcendental
//! functions carry an explicit error bound in units of the last place.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::BigRational;
use crate::error::{Error, Result};

pub const DEFAULT_FRAC_BITS: u32 = 128;
pub const MAX_FRAC_BITS: u32 = 1024;
/// Environment variable overriding the precision cap (fractional bits).
pub const PREC_CAP_ENV: &str = "LUCASLCM_PREC_CAP";

/// Precision escalation policy: start at `start` fractional bits and double
/// up to `cap`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start: u32,
    pub cap: u32,
}

impl Default for Precision {
    fn default() -> Self {
        Precision { start: DEFAULT_FRAC_BITS, cap: MAX_FRAC_BITS }
    }
}

impl Precision {
    /// Default policy with the cap taken from `LUCASLCM_PREC_CAP` when set.
    pub fn from_env() -> Self {
        let mut p = Precision::default();
        if let Some(cap) = std::env::var(PREC_CAP_ENV).ok().and_then(|v| v.trim().parse::<u32>().ok()) {
            p = p.with_cap(cap);
        }
        p
    }

    pub fn with_cap(self, cap: u32) -> Self {
        let cap = cap.max(16);
        Precision { start: self.start.min(cap), cap }
    }

    /// The doubling schedule `start, 2·start, …` ending exactly at `cap`.
    pub fn schedule(&self) -> Vec<u32> {
        let mut out = Vec::new();
        let mut w = self.start.max(1);
        while w < self.cap {
            out.push(w);
            w = w.saturating_mul(2);
        }
        out.push(self.cap);
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealInterval {
    lo: BigInt,
    hi: BigInt,
    frac_bits: u32,
}

fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    x.div_floor(&(BigInt::one() << k))
}

fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    if k == 0 {
        return x.clone();
    }
    x.div_ceil(&(BigInt::one() << k))
}

fn ceil_sqrt(x: &BigInt) -> BigInt {
    let s = x.sqrt();
    if &s * &s == *x {
        s
    } else {
        s + 1
    }
}

impl RealInterval {
    fn from_parts(lo: BigInt, hi: BigInt, frac_bits: u32) -> Self {
        debug_assert!(lo <= hi);
        RealInterval { lo, hi, frac_bits }
    }

    pub fn from_integer(x: &BigInt, frac_bits: u32) -> Self {
        let v = x << frac_bits;
        Self::from_parts(v.clone(), v, frac_bits)
    }

    pub fn from_i64(x: i64, frac_bits: u32) -> Self {
        Self::from_integer(&BigInt::from(x), frac_bits)
    }

    pub fn from_rational(r: &BigRational, frac_bits: u32) -> Self {
        let scaled = r.numer() << frac_bits;
        Self::from_parts(scaled.div_floor(r.denom()), scaled.div_ceil(r.denom()), frac_bits)
    }

    /// The interval `[lo, hi]` of two rationals, rounded outward.
    pub fn hull(lo: &BigRational, hi: &BigRational, frac_bits: u32) -> Self {
        let a = Self::from_rational(lo, frac_bits);
        let b = Self::from_rational(hi, frac_bits);
        Self::from_parts(a.lo.min(b.lo.clone()), b.hi.max(a.hi), frac_bits)
    }

    pub fn zero(frac_bits: u32) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::zero(), frac_bits)
    }

    /// Intersection with `(−∞, k]`, for a value known exactly to be at most `k`.
    pub fn cap_above(&self, k: i64) -> Self {
        let b = BigInt::from(k) << self.frac_bits;
        Self::from_parts(self.lo.clone().min(b.clone()), self.hi.clone().min(b), self.frac_bits)
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), BigInt::one() << self.frac_bits)
    }

    pub fn width(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, BigInt::one() << self.frac_bits)
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// `width < 2^-64 · |midpoint|`, or a point interval.
    pub fn is_tight(&self) -> bool {
        if self.is_point() {
            return true;
        }
        let width = &self.hi - &self.lo;
        (width << 65u32) < (&self.lo + &self.hi).abs()
    }

    fn rescale(&self, frac_bits: u32) -> Self {
        match frac_bits.cmp(&self.frac_bits) {
            Ordering::Equal => self.clone(),
            Ordering::Greater => {
                let s = frac_bits - self.frac_bits;
                Self::from_parts(&self.lo << s, &self.hi << s, frac_bits)
            }
            Ordering::Less => {
                let s = self.frac_bits - frac_bits;
                Self::from_parts(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), frac_bits)
            }
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let w = self.frac_bits.max(other.frac_bits);
        (self.rescale(w), other.rescale(w))
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        Self::from_parts(a.lo + b.lo, a.hi + b.hi, a.frac_bits)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(-&self.hi, -&self.lo, self.frac_bits)
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = (-&self.lo).max(self.hi.clone());
            Self::from_parts(BigInt::zero(), m, self.frac_bits)
        } else if self.hi.sign() != Sign::Plus {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let (a, b) = self.aligned(other);
        let w = a.frac_bits;
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Self::from_parts(floor_shr(min, w), ceil_shr(max, w), w)
    }

    pub fn mul_integer(&self, k: &BigInt) -> Self {
        let (a, b) = (&self.lo * k, &self.hi * k);
        if a <= b {
            Self::from_parts(a, b, self.frac_bits)
        } else {
            Self::from_parts(b, a, self.frac_bits)
        }
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        self.mul(&Self::from_rational(r, self.frac_bits))
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn recip(&self) -> Result<Self> {
        if self.contains_zero() {
            return Err(Error::domain("reciprocal of an interval containing 0"));
        }
        let w = self.frac_bits;
        let one = BigInt::one() << (2 * w);
        Ok(Self::from_parts(one.div_floor(&self.hi), one.div_ceil(&self.lo), w))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other);
        Ok(a.mul(&b.recip()?))
    }

    pub fn sqrt(&self) -> Result<Self> {
        if self.lo.is_negative() {
            return Err(Error::domain("sqrt of an interval with negative part"));
        }
        let w = self.frac_bits;
        Ok(Self::from_parts((&self.lo << w).sqrt(), ceil_sqrt(&(&self.hi << w)), w))
    }

    /// Natural logarithm; the interval must be strictly positive.
    pub fn ln(&self) -> Result<Self> {
        if !self.lo.is_positive() {
            return Err(Error::domain("log of an interval that is not strictly positive"));
        }
        let w = self.frac_bits;
        let den = BigUint::one() << w;
        let (lo, _) = ln_fixed(self.lo.magnitude(), &den, w);
        let (_, hi) = ln_fixed(self.hi.magnitude(), &den, w);
        Ok(Self::from_parts(lo, hi, w))
    }

    /// Enclosure of `ln(num/den)` for a positive rational.
    pub fn ln_rational(r: &BigRational, frac_bits: u32) -> Result<Self> {
        if !r.is_positive() {
            return Err(Error::domain("log of a nonpositive number"));
        }
        let (lo, hi) = ln_fixed(r.numer().magnitude(), r.denom().magnitude(), frac_bits);
        Ok(Self::from_parts(lo, hi, frac_bits))
    }

    pub fn pi(frac_bits: u32) -> Self {
        let guard = 16;
        let wg = frac_bits + guard;
        let (a5_lo, a5_hi) = atan_inv_fixed(5, wg);
        let (a239_lo, a239_hi) = atan_inv_fixed(239, wg);
        let lo = a5_lo * 16 - a239_hi * 4;
        let hi = a5_hi * 16 - a239_lo * 4;
        Self::from_parts(floor_shr(&lo, guard), ceil_shr(&hi, guard), frac_bits)
    }

    pub fn ln2(frac_bits: u32) -> Self {
        Self::ln_rational(&BigRational::from_integer(BigInt::from(2)), frac_bits).expect("2 > 0")
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certified `self ≤ other` (every point of self is ≤ every point of other).
    pub fn certainly_le(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.hi <= b.lo
    }

    pub fn certainly_lt(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.hi < b.lo
    }

    pub fn contains(&self, r: &BigRational) -> bool {
        let scale = BigInt::one() << self.frac_bits;
        let x = r.numer() * &scale;
        &self.lo * r.denom() <= x && x <= &self.hi * r.denom()
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.lo <= b.hi && b.lo <= a.hi
    }

    pub fn contains_interval(&self, inner: &Self) -> bool {
        let (a, b) = self.aligned(inner);
        a.lo <= b.lo && b.hi <= a.hi
    }

    pub fn lo_f64(&self) -> f64 {
        fixed_to_f64(&self.lo, self.frac_bits)
    }

    pub fn hi_f64(&self) -> f64 {
        fixed_to_f64(&self.hi, self.frac_bits)
    }

    pub fn mid_f64(&self) -> f64 {
        fixed_to_f64(&(&self.lo + &self.hi), self.frac_bits + 1)
    }

    /// Lower endpoint as a decimal rounded down to `digits` fractional digits.
    pub fn lo_decimal(&self, digits: u32) -> String {
        fixed_to_decimal(&self.lo, self.frac_bits, digits, false)
    }

    /// Upper endpoint as a decimal rounded up to `digits` fractional digits.
    pub fn hi_decimal(&self, digits: u32) -> String {
        fixed_to_decimal(&self.hi, self.frac_bits, digits, true)
    }
}

impl fmt::Display for RealInterval {
    /// `≈mid ∈ [lo↓, hi↑]`; the arrows mark the rounding direction of each
    /// printed endpoint.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(12) as u32;
        write!(
            f,
            "≈{:.*} ∈ [{}↓, {}↑]",
            digits.min(15) as usize,
            self.mid_f64(),
            self.lo_decimal(digits),
            self.hi_decimal(digits)
        )
    }
}

fn fixed_to_f64(x: &BigInt, frac_bits: u32) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let m = (x >> shift).to_f64().unwrap_or(0.0);
    let exp = shift as i64 - frac_bits as i64;
    m * 2f64.powi(exp.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

fn fixed_to_decimal(x: &BigInt, frac_bits: u32, digits: u32, round_up: bool) -> String {
    let scaled = x * BigInt::from(10u8).pow(digits);
    let q = if round_up { ceil_shr(&scaled, frac_bits) } else { floor_shr(&scaled, frac_bits) };
    let neg = q.is_negative();
    let s = q.magnitude().to_string();
    let d = digits as usize;
    let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
    let (int, frac) = s.split_at(s.len() - d);
    let sign = if neg { "-" } else { "" };
    if d == 0 {
        format!("{sign}{int}")
    } else {
        format!("{sign}{int}.{frac}")
    }
}

/// Bounds `(lo, hi)` on `atanh(num/den) · 2^w` for `|num/den| ≤ 1/3`.
///
/// Each series term is truncated; the accumulated truncation plus the tail
/// after the first vanishing power stays below `(K+2)²` ulps for `K` terms.
fn atanh_fixed(num: &BigInt, den: &BigUint, w: u32) -> (BigInt, BigInt) {
    if num.is_zero() {
        return (BigInt::zero(), BigInt::zero());
    }
    let a = num.magnitude();
    debug_assert!(a * 3u8 <= *den);
    let a2 = a * a;
    let b2 = den * den;
    let mut p: BigUint = (a << w) / den;
    let mut sum = BigUint::zero();
    let mut k: u64 = 0;
    while !p.is_zero() {
        sum += &p / (2 * k + 1);
        p = p * &a2 / &b2;
        k += 1;
    }
    let err = BigUint::from((k + 2) * (k + 2));
    let lo = BigInt::from(sum.clone());
    let hi = BigInt::from(sum + err);
    if num.is_negative() {
        (-hi, -lo)
    } else {
        (lo, hi)
    }
}

/// Bounds on `atan(1/m) · 2^w` for an integer `m ≥ 2`.
fn atan_inv_fixed(m: u32, w: u32) -> (BigInt, BigInt) {
    let m2 = BigUint::from(m) * m;
    let mut p: BigUint = (BigUint::one() << w) / m;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !p.is_zero() {
        let term = BigInt::from(&p / (2 * k + 1));
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        p /= &m2;
        k += 1;
    }
    let err = BigInt::from((k + 2) * (k + 2));
    (&sum - &err, sum + err)
}

/// Bounds on `ln(num/den) · 2^w`.
fn ln_fixed(num: &BigUint, den: &BigUint, w: u32) -> (BigInt, BigInt) {
    if num == den {
        return (BigInt::zero(), BigInt::zero());
    }
    // x = num/den = y · 2^e with y in [2/3, 4/3)
    let mut e: i64 = num.bits() as i64 - den.bits() as i64;
    let (mut a, mut b) = if e >= 0 { (num.clone(), den << (e as u64)) } else { (num << ((-e) as u64), den.clone()) };
    while &a * 3u8 < &b * 2u8 {
        a <<= 1u8;
        e -= 1;
    }
    while &a * 3u8 >= &b * 4u8 {
        b <<= 1u8;
        e += 1;
    }
    let e_bits = 64 - e.unsigned_abs().leading_zeros();
    let guard = 40 + e_bits;
    let wg = w + guard;
    // 2·atanh((a−b)/(a+b)) = ln(a/b), scaled by 2^wg
    let series = |a: &BigUint, b: &BigUint, upper: bool| {
        let z_num = BigInt::from(a.clone()) - BigInt::from(b.clone());
        let (s_lo, s_hi) = atanh_fixed(&z_num, &(a + b), wg);
        if upper {
            s_hi * 2
        } else {
            s_lo * 2
        }
    };
    // Long mantissas are cut to working precision: a/b lies between
    // ⌊a⌋/(⌊b⌋+1) and (⌊a⌋+1)/⌊b⌋ after dropping the same low bits.
    let keep = u64::from(wg) + 16;
    let (mut lo, mut hi) = if b.bits() > keep + 8 {
        let shift = b.bits() - keep;
        let (ta, tb) = (&a >> shift, &b >> shift);
        let one = BigUint::one();
        (series(&ta, &(&tb + &one), false), series(&(&ta + &one), &tb, true))
    } else {
        (series(&a, &b, false), series(&a, &b, true))
    };
    if e != 0 {
        let (l_lo, l_hi) = atanh_fixed(&BigInt::one(), &BigUint::from(3u8), wg);
        let two_e = BigInt::from(2 * e);
        if e > 0 {
            lo += &two_e * l_lo;
            hi += &two_e * l_hi;
        } else {
            lo += &two_e * l_hi;
            hi += &two_e * l_lo;
        }
    }
    (floor_shr(&lo, guard), ceil_shr(&hi, guard))
}

/// Enclosure of `ln x` for a positive integer, escalating precision until
/// the interval is tight (`width < 2^-64·|mid|`) or the cap is reached.
pub fn log_interval(x: &BigInt) -> Result<RealInterval> {
    log_interval_with(x, Precision::from_env())
}

pub fn log_interval_with(x: &BigInt, precision: Precision) -> Result<RealInterval> {
    if !x.is_positive() {
        return Err(Error::domain("log_interval requires x > 0"));
    }
    let r = BigRational::from_integer(x.clone());
    let mut last = None;
    for w in precision.schedule() {
        let iv = RealInterval::ln_rational(&r, w)?;
        if iv.is_tight() {
            return Ok(iv);
        }
        last = Some(iv);
    }
    Ok(last.expect("schedule is nonempty"))
}
