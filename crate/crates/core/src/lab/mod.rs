//! Windowed lcms `L_{k,n} = lcm(R_k, …, R_n)`, the rational divisor
//! certificate for `L_{k,n}`, and exact checks of the lcm identities.

pub mod grid;
pub mod identities;

pub use identities::{
    check_corollary_derrr, check_gcd_lemmas, check_identity_co, check_identity_co2, check_lemma_dif,
    check_partial_fractions, check_theorem_tri, explore_equality, IdentityReport, IdentityTag,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinatorics::u_factorials;
use crate::error::{Error, Result};
use crate::numerics::{lcm_magnitude, BigRational};
use crate::recurrences::{lucas_terms, terms, RecurrenceParams};
use crate::report::{ser_bigint, ser_rational};

/// Precomputed `R_0..R_len`, `U_0..U_len` and `[0]_U!..[len]_U!`.
#[derive(Clone, Debug)]
pub struct SequenceTable {
    pub params: RecurrenceParams,
    pub r: Vec<BigInt>,
    pub u: Vec<BigInt>,
    pub fact: Vec<BigInt>,
}

impl SequenceTable {
    pub fn new(params: &RecurrenceParams, n_max: u64) -> Self {
        let len = n_max as usize + 2;
        let u = lucas_terms(params, len);
        let fact = u_factorials(&u);
        SequenceTable { params: params.clone(), r: terms(params, len), u, fact }
    }

    pub fn n_max(&self) -> u64 {
        self.r.len() as u64 - 2
    }

    /// First zero term in `R_k..=R_n`.
    pub fn zero_in(&self, k: u64, n: u64) -> Option<u64> {
        (k..=n).find(|&i| self.r[i as usize].is_zero())
    }

    pub fn lcm_range(&self, k: u64, n: u64) -> Result<BigInt> {
        check_window(k, n)?;
        if let Some(index) = self.zero_in(k, n) {
            return Err(Error::ZeroTerm { index });
        }
        let mut acc = num_bigint::BigUint::one();
        for x in &self.r[k as usize..=n as usize] {
            acc = lcm_magnitude(&acc, x.magnitude());
        }
        Ok(BigInt::from(acc))
    }

    /// `gcd(R0,R1)^{n−k} · [n−k]_U!`, the denominator of the divisor.
    fn divisor_denominator(&self, k: u64, n: u64) -> BigInt {
        let span = (n - k) as usize;
        &self.fact[span] * self.params.gcd_r0_r1.pow(span as u32)
    }

    pub fn certificate(&self, k: u64, n: u64) -> Result<DivisorCertificate> {
        let lcm_value = self.lcm_range(k, n)?;
        let product: BigInt = self.r[k as usize..=n as usize].iter().product();
        Ok(DivisorCertificate::new(k, n, lcm_value, product, self.divisor_denominator(k, n)))
    }
}

fn check_window(k: u64, n: u64) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::pre(format!("window needs 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    Ok(())
}

/// The divisor `R_k⋯R_n / ([n−k]_U! · gcd(R0,R1)^{n−k})` of `L_{k,n}` together
/// with the quotient that witnesses divisibility.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorCertificate {
    pub k: u64,
    pub n: u64,
    #[serde(serialize_with = "ser_bigint")]
    pub lcm_value: BigInt,
    #[serde(serialize_with = "ser_rational")]
    pub divisor: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub quotient: BigRational,
}

impl DivisorCertificate {
    fn new(k: u64, n: u64, lcm_value: BigInt, product: BigInt, denominator: BigInt) -> Self {
        let divisor = BigRational::new(product, denominator);
        let quotient = BigRational::from_integer(lcm_value.clone()) / &divisor;
        DivisorCertificate { k, n, lcm_value, divisor, quotient }
    }

    /// Valid iff the quotient is an integer (its sign may be negative).
    pub fn is_valid(&self) -> bool {
        self.quotient.is_integer()
    }
}

/// `L_{k,n}`: positive lcm of `|R_k|, …, |R_n|`. Rejects windows containing a
/// zero term, naming its index.
pub fn lcm_range(params: &RecurrenceParams, k: u64, n: u64) -> Result<BigInt> {
    check_window(k, n)?;
    SequenceTable::new(params, n).lcm_range(k, n)
}

/// Builds the divisor certificate for `L_{k,n}`. Parameters must be in
/// theorem scope and nondegenerate.
pub fn theorem1_certificate(params: &RecurrenceParams, k: u64, n: u64) -> Result<DivisorCertificate> {
    params.require_scope()?;
    params.require_nondegenerate()?;
    check_window(k, n)?;
    SequenceTable::new(params, n).certificate(k, n)
}

/// Outcome of sweeping every window `1 ≤ k ≤ n ≤ n_max` of one table.
#[derive(Clone, Debug, Default)]
pub struct CertificateSweep {
    pub checked: u64,
    pub skipped_zero_windows: u64,
    pub failures: Vec<DivisorCertificate>,
    /// Certificate of the widest nonzero window `(k, n_max)` with least `k`.
    pub witness: Option<DivisorCertificate>,
}

/// Checks every window with incremental lcms and products; a window is valid
/// iff `R_k⋯R_n` divides `L_{k,n} · [n−k]_U! · gcd(R0,R1)^{n−k}`, which is
/// integrality of the certificate quotient.
pub fn certificate_sweep(table: &SequenceTable, n_max: u64) -> CertificateSweep {
    let mut out = CertificateSweep::default();
    let g = &table.params.gcd_r0_r1;
    let mut g_pows = vec![BigInt::one()];
    for i in 1..=n_max as usize {
        let next = &g_pows[i - 1] * g;
        g_pows.push(next);
    }
    for k in 1..=n_max {
        let mut lcm = num_bigint::BigUint::one();
        let mut product = BigInt::one();
        for n in k..=n_max {
            let term = &table.r[n as usize];
            if term.is_zero() {
                out.skipped_zero_windows += n_max - n + 1;
                break;
            }
            lcm = lcm_magnitude(&lcm, term.magnitude());
            product *= term;
            let span = (n - k) as usize;
            let scaled = BigInt::from(lcm.clone()) * &table.fact[span] * &g_pows[span];
            out.checked += 1;
            if !scaled.is_multiple_of(&product) {
                out.failures.push(DivisorCertificate::new(
                    k,
                    n,
                    BigInt::from(lcm.clone()),
                    product.clone(),
                    table.divisor_denominator(k, n),
                ));
            }
            if n == n_max && out.witness.is_none() {
                out.witness = table.certificate(k, n).ok();
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn params(p: i64, q: i64, r0: i64, r1: i64) -> RecurrenceParams {
        RecurrenceParams::validate(p, q, r0, r1).unwrap()
    }

    fn lcm_oracle(xs: &[i128]) -> i128 {
        fn g(a: i128, b: i128) -> i128 {
            if b == 0 {
                a.abs()
            } else {
                g(b, a % b)
            }
        }
        xs.iter().fold(1, |acc, &x| acc / g(acc, x) * x.abs())
    }

    #[test]
    fn lcm_range_examples() {
        let fib = params(1, -1, 0, 1);
        assert_eq!(lcm_oracle(&[1, 1, 2, 3, 5, 8, 13, 21, 34, 55]), 2042040);
        assert_eq!(lcm_range(&fib, 1, 10).unwrap(), BigInt::from(2042040));
        let lucas_numbers = params(1, -1, 2, 1);
        for k in 1..20 {
            assert_eq!(lcm_range(&lucas_numbers, k, k).unwrap(), crate::recurrences::term(&lucas_numbers, k).abs());
        }
        let with_zero = params(1, -1, 1, -1);
        assert_eq!(lcm_range(&with_zero, 1, 4), Err(Error::ZeroTerm { index: 2 }));
        assert!(lcm_range(&fib, 0, 3).is_err());
        assert!(lcm_range(&fib, 4, 3).is_err());
    }

    #[test]
    fn certificate_examples() {
        let fib = params(1, -1, 0, 1);
        let c = theorem1_certificate(&fib, 1, 5).unwrap();
        assert_eq!(c.lcm_value, BigInt::from(30));
        assert_eq!(c.divisor, BigRational::from_integer(5.into()));
        assert_eq!(c.quotient, BigRational::from_integer(6.into()));
        assert!(c.is_valid());

        let lucas_numbers = params(1, -1, 2, 1);
        let c = theorem1_certificate(&lucas_numbers, 2, 4).unwrap();
        assert_eq!(c.divisor, BigRational::from_integer(84.into()));
        assert_eq!(c.quotient, BigRational::one());

        let neg = params(2, -3, -4, 1);
        for n in 1..12 {
            let c = theorem1_certificate(&neg, n, n).unwrap();
            assert_eq!(c.divisor.abs(), BigRational::from_integer(c.lcm_value.clone()));
            assert_eq!(c.quotient.abs(), BigRational::one());
        }
        assert!(matches!(theorem1_certificate(&params(2, 4, 0, 1), 1, 3), Err(Error::OutOfScope(_))));
    }

    #[test]
    fn sweep_agrees_with_single_certificates() {
        for (p, q, r0, r1) in [(1, -1, 2, 1), (3, 2, -1, 5), (1, -1, 1, -1), (-5, 3, 4, 2)] {
            let pr = params(p, q, r0, r1);
            let table = SequenceTable::new(&pr, 14);
            let sweep = certificate_sweep(&table, 14);
            assert!(sweep.failures.is_empty());
            let mut checked = 0;
            let mut skipped = 0;
            for k in 1..=14 {
                for n in k..=14 {
                    match theorem1_certificate(&pr, k, n) {
                        Ok(c) => {
                            assert!(c.is_valid());
                            checked += 1;
                        }
                        Err(Error::ZeroTerm { .. }) => skipped += 1,
                        Err(e) => panic!("{e}"),
                    }
                }
            }
            assert_eq!((sweep.checked, sweep.skipped_zero_windows), (checked, skipped));
        }
    }

    #[test]
    fn shrinking_window_lcm_divides() {
        let pr = params(3, -2, 1, 4);
        let t = SequenceTable::new(&pr, 20);
        for n in 1..=20 {
            for k in 1..=n {
                let big = t.lcm_range(k, n).unwrap();
                for k2 in k..=n {
                    let small = t.lcm_range(k2, n).unwrap();
                    assert!((&big % &small).is_zero());
                }
            }
        }
    }
}
