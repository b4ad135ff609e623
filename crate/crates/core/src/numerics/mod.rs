//! Arbitrary-precision integer helpers and the interval type used for
//! every bound that involves an irrational root.

pub mod interval;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Exact rationals, always in lowest terms with a positive denominator.
pub type BigRational = num_rational::BigRational;

/// Nonnegative gcd. Fails only when both arguments are zero.
pub fn gcd(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::domain("gcd(0, 0) is undefined"));
    }
    Ok(BigInt::from(gcd_magnitude(a.magnitude(), b.magnitude())))
}

/// Positive lcm of two nonzero integers.
pub fn lcm(a: &BigInt, b: &BigInt) -> Result<BigInt> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::domain("lcm is only taken over nonzero integers"));
    }
    Ok(BigInt::from_biguint(Sign::Plus, lcm_magnitude(a.magnitude(), b.magnitude())))
}

/// Left-to-right fold of binary lcm over a nonempty list of nonzero integers.
pub fn lcm_all<'a, I>(values: I) -> Result<BigInt>
where
    I: IntoIterator<Item = &'a BigInt>,
{
    let mut acc: Option<BigUint> = None;
    for v in values {
        if v.is_zero() {
            return Err(Error::domain("lcm is only taken over nonzero integers"));
        }
        acc = Some(match acc {
            None => v.magnitude().clone(),
            Some(a) => lcm_magnitude(&a, v.magnitude()),
        });
    }
    acc.map(BigInt::from).ok_or_else(|| Error::domain("lcm of an empty list"))
}

/// gcd on magnitudes; `gcd(0, 0) = 0`.
///
/// Running lcm accumulators grow far larger than the next term, so Euclidean
/// remainder steps shrink the pair before handing off to the binary algorithm.
pub(crate) fn gcd_magnitude(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut x, mut y) = if a >= b { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !y.is_zero() && x.bits() > y.bits() + 32 {
        let r = &x % &y;
        x = y;
        y = r;
    }
    if y.is_zero() {
        x
    } else {
        x.gcd(&y)
    }
}

pub(crate) fn lcm_magnitude(a: &BigUint, b: &BigUint) -> BigUint {
    let g = gcd_magnitude(a, b);
    if a.bits() >= b.bits() {
        a * (b / &g)
    } else {
        b * (a / &g)
    }
}

/// True iff `d` divides `n` (with `0 | n` only for `n = 0`).
pub fn divides(d: &BigInt, n: &BigInt) -> bool {
    if d.is_zero() {
        return n.is_zero();
    }
    (n % d).is_zero()
}

pub fn is_integer(r: &BigRational) -> bool {
    r.denom().is_one()
}

/// Decimal rendering used by the JSON reports: `"n"` or `"n/d"`.
pub fn rational_to_string(r: &BigRational) -> String {
    if is_integer(r) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn euclid(mut a: i128, mut b: i128) -> i128 {
        a = a.abs();
        b = b.abs();
        while b != 0 {
            let r = a % b;
            a = b;
            b = r;
        }
        a
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&big(21), &big(34)).unwrap(), big(1));
        assert_eq!(gcd(&big(0), &big(5)).unwrap(), big(5));
        assert_eq!(euclid(120120, 2042040), 120120);
        assert_eq!(gcd(&big(120120), &big(2042040)).unwrap(), big(120120));
        assert!(matches!(gcd(&big(0), &big(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn lcm_examples() {
        assert_eq!(lcm(&big(8), &big(5)).unwrap(), big(40));
        assert_eq!(lcm(&big(-3), &big(4)).unwrap(), big(12));
        assert_eq!(10 * 22 / euclid(10, 22), 110);
        assert_eq!(lcm(&big(10), &big(22)).unwrap(), big(110));
        assert!(lcm(&big(0), &big(3)).is_err());
        assert!(lcm_all([].iter()).is_err());
    }

    #[test]
    fn gcd_of_huge_and_small() {
        let huge = BigInt::from(3u8).pow(20_000) * big(1_000_003);
        assert_eq!(gcd(&huge, &big(2_000_006)).unwrap(), big(1_000_003));
        assert_eq!(gcd(&big(-7), &huge).unwrap(), big(1));
    }

    #[test]
    fn rational_normalization() {
        let r = BigRational::new(big(-2), big(-4));
        assert_eq!(r.numer(), &big(1));
        assert_eq!(r.denom(), &big(2));
        let s = BigRational::new(big(3), big(-6));
        assert_eq!((s.numer().clone(), s.denom().clone()), (big(-1), big(2)));
        assert_eq!(rational_to_string(&s), "-1/2");
        assert!(is_integer(&BigRational::new(big(10), big(5))));
    }

    proptest! {
        #[test]
        fn lcm_times_gcd_is_product(a in any::<i64>().prop_filter("nz", |v| *v != 0),
                                    b in any::<i64>().prop_filter("nz", |v| *v != 0)) {
            let (a, b) = (big(a), big(b));
            let l = lcm(&a, &b).unwrap();
            let g = gcd(&a, &b).unwrap();
            prop_assert_eq!(l * g, (&a * &b).abs());
        }

        #[test]
        fn gcd_matches_euclid(a in any::<i64>(), b in any::<i64>()) {
            prop_assume!(a != 0 || b != 0);
            prop_assert_eq!(gcd(&big(a), &big(b)).unwrap(), BigInt::from(euclid(a as i128, b as i128)));
        }

        #[test]
        fn normalization_idempotent(n in any::<i32>(), d in any::<i32>().prop_filter("nz", |v| *v != 0)) {
            let r = BigRational::new(big(n as i64), big(d as i64));
            prop_assert!(r.denom() > &BigInt::zero());
            prop_assert!(gcd_magnitude(r.numer().magnitude(), r.denom().magnitude()).is_one() || r.numer().is_zero());
            let again = BigRational::new(r.numer().clone(), r.denom().clone());
            prop_assert_eq!(again, r);
        }
    }
}
