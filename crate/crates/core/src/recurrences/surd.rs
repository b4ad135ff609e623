//! Exact arithmetic in `Q(√d)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::numerics::interval::RealInterval;
use crate::numerics::BigRational;

/// `a + b·√d` with `d` squarefree. `d = 1` means the value is rational and
/// `b` is always zero; `d < 0` denotes `√d = i·√|d|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSurd {
    a: BigRational,
    b: BigRational,
    d: i64,
}

/// Splits `n ≠ 0` as `s²·d` with `d` squarefree (sign kept in `d`).
pub fn squarefree_split(n: i64) -> (i64, i64) {
    assert!(n != 0);
    let mut m = n.unsigned_abs();
    let mut s: u64 = 1;
    let mut f: u64 = 2;
    while f * f <= m {
        while m.is_multiple_of(f * f) {
            m /= f * f;
            s *= f;
        }
        f += 1;
    }
    (s as i64, n.signum() * m as i64)
}

impl QuadSurd {
    pub fn rational(a: BigRational) -> Self {
        QuadSurd { a, b: BigRational::zero(), d: 1 }
    }

    pub fn from_int(a: i64) -> Self {
        Self::rational(BigRational::from_integer(a.into()))
    }

    /// `a + b·√n` for an arbitrary nonzero integer `n`.
    pub fn new(a: BigRational, b: BigRational, n: i64) -> Self {
        let (s, d) = squarefree_split(n);
        let b = b * BigRational::from_integer(s.into());
        if d == 1 {
            QuadSurd::rational(a + b)
        } else {
            QuadSurd { a, b, d }
        }
    }

    /// `√n` itself.
    pub fn sqrt_of(n: i64) -> Self {
        Self::new(BigRational::zero(), BigRational::one(), n)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_real(&self) -> bool {
        self.d > 0 || self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadSurd { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// `a² − d·b²`, the field norm.
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - BigRational::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QuadSurd::from_int(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    fn common_radicand(&self, other: &Self) -> i64 {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => other.d,
            (_, true) => self.d,
            _ => {
                assert_eq!(self.d, other.d, "mixing different quadratic fields");
                self.d
            }
        }
    }

    fn with(a: BigRational, b: BigRational, d: i64) -> Self {
        if b.is_zero() {
            QuadSurd::rational(a)
        } else {
            QuadSurd { a, b, d }
        }
    }

    /// Enclosure of a real surd. Panics on a non-real value.
    pub fn to_interval(&self, frac_bits: u32) -> RealInterval {
        assert!(self.is_real(), "interval of a non-real surd");
        let a = RealInterval::from_rational(&self.a, frac_bits);
        if self.b.is_zero() {
            return a;
        }
        let root = RealInterval::from_i64(self.d, frac_bits).sqrt().expect("d > 0");
        a.add(&root.mul_rational(&self.b))
    }

    /// Exact sign of a real surd.
    pub fn signum(&self) -> i32 {
        assert!(self.is_real());
        let sa = sign_of(&self.a);
        let sb = sign_of(&self.b);
        if sb == 0 || sa == sb {
            return if sa != 0 { sa } else { sb };
        }
        if sa == 0 {
            return sb;
        }
        // opposite signs: compare a² with d·b²
        let a2 = &self.a * &self.a;
        let db2 = BigRational::from_integer(self.d.into()) * &self.b * &self.b;
        if a2 > db2 {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Midpoint of a 64-bit enclosure, for display.
    pub fn approx_f64(&self) -> f64 {
        assert!(self.is_real());
        self.to_interval(64).mid_f64()
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &QuadSurd {
    type Output = QuadSurd;
    fn add(self, rhs: &QuadSurd) -> QuadSurd {
        let d = self.common_radicand(rhs);
        QuadSurd::with(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl Sub for &QuadSurd {
    type Output = QuadSurd;
    fn sub(self, rhs: &QuadSurd) -> QuadSurd {
        let d = self.common_radicand(rhs);
        QuadSurd::with(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl Mul for &QuadSurd {
    type Output = QuadSurd;
    fn mul(self, rhs: &QuadSurd) -> QuadSurd {
        let d = self.common_radicand(rhs);
        let dd = BigRational::from_integer(d.into());
        QuadSurd::with(&self.a * &rhs.a + dd * &self.b * &rhs.b, &self.a * &rhs.b + &self.b * &rhs.a, d)
    }
}

impl Div for &QuadSurd {
    type Output = QuadSurd;
    /// Panics on division by zero.
    fn div(self, rhs: &QuadSurd) -> QuadSurd {
        let n = rhs.norm();
        assert!(!n.is_zero(), "division by zero in Q(√d)");
        let num = self * &rhs.conjugate();
        QuadSurd::with(&num.a / &n, &num.b / &n, num.d)
    }
}

impl Neg for QuadSurd {
    type Output = QuadSurd;
    fn neg(self) -> QuadSurd {
        QuadSurd { a: -self.a, b: -self.b, d: self.d }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        write!(f, "{} + {}·√{}", self.a, self.b, self.d)
    }
}

/// `⌊√n⌋` for `n ≥ 0`, used to detect perfect-square discriminants.
pub fn perfect_square_root(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let s = BigInt::from(n).sqrt();
    let s: i64 = s.try_into().ok()?;
    (s * s == n).then_some(s)
}
