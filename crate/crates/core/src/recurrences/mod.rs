//! Parameter validation, root data and term generation for
//! `R(P, Q, R0, R1)` and the Lucas sequence `U(P, Q)`.

mod roots;
pub mod surd;

pub use roots::{roots, RootData};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Hypothesis, Result};

/// A validated quadruple `(P, Q, R0, R1)` with its derived quantities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceParams {
    #[serde(rename = "P")]
    pub p: i64,
    #[serde(rename = "Q")]
    pub q: i64,
    #[serde(rename = "R0")]
    pub r0: i64,
    #[serde(rename = "R1")]
    pub r1: i64,
    /// `Δ = P² − 4Q`
    #[serde(skip)]
    pub delta: i64,
    /// `gcd(R0, R1)`, with `gcd(0, x) = |x|`
    #[serde(skip)]
    pub gcd_r0_r1: BigInt,
    /// `gcd(P, Q) = gcd(R1, Q) = 1`
    #[serde(skip)]
    pub theorem_scope: bool,
}

/// Parameters are limited so that `P²` and `4Q` cannot overflow.
const PARAM_LIMIT: i64 = 1 << 30;

impl RecurrenceParams {
    /// Checks the standing hypotheses `PQ ≠ 0`, `Δ ≠ 0`, `|R0| + |R1| > 0`.
    pub fn validate(p: i64, q: i64, r0: i64, r1: i64) -> Result<Self> {
        for (name, v) in [("P", p), ("Q", q), ("R0", r0), ("R1", r1)] {
            if v.abs() > PARAM_LIMIT {
                return Err(Error::domain(format!("|{name}| exceeds 2^30")));
            }
        }
        if p == 0 || q == 0 {
            return Err(Error::Hypothesis(Hypothesis::NonzeroPQ));
        }
        let delta = p * p - 4 * q;
        if delta == 0 {
            return Err(Error::Hypothesis(Hypothesis::NonzeroDiscriminant));
        }
        if r0 == 0 && r1 == 0 {
            return Err(Error::Hypothesis(Hypothesis::NonzeroInitialTerms));
        }
        let theorem_scope = p.gcd(&q) == 1 && r1.gcd(&q) == 1;
        Ok(RecurrenceParams { p, q, r0, r1, delta, gcd_r0_r1: BigInt::from(r0.gcd(&r1)), theorem_scope })
    }

    /// The Lucas sequence `U(P, Q)`, i.e. `(R0, R1) = (0, 1)`.
    pub fn lucas(p: i64, q: i64) -> Result<Self> {
        Self::validate(p, q, 0, 1)
    }

    pub fn is_lucas(&self) -> bool {
        self.r0 == 0 && self.r1 == 1
    }

    /// The `U(P, Q)` companion of these parameters.
    pub fn lucas_companion(&self) -> Self {
        Self::lucas(self.p, self.q).expect("P, Q already validated")
    }

    pub fn require_scope(&self) -> Result<()> {
        if self.theorem_scope {
            Ok(())
        } else {
            Err(Error::OutOfScope(format!(
                "need gcd(P,Q) = gcd(R1,Q) = 1, got gcd(P,Q) = {}, gcd(R1,Q) = {}",
                self.p.gcd(&self.q),
                self.r1.gcd(&self.q)
            )))
        }
    }

    pub fn require_nondegenerate(&self) -> Result<()> {
        if is_degenerate(self) {
            Err(Error::Degenerate)
        } else {
            Ok(())
        }
    }

    pub fn require_lucas(&self) -> Result<()> {
        if self.is_lucas() {
            Ok(())
        } else {
            Err(Error::pre("identity is stated for the Lucas sequence (R0, R1) = (0, 1)"))
        }
    }
}

/// True iff `α/β` is a root of unity.
///
/// `(α/β) + (β/α) + 2 = P²/Q`, and `α/β` is a root of unity exactly when this
/// is an integer in `{0, 1, 2, 3, 4}`; 4 is excluded by `Δ ≠ 0`.
pub fn is_degenerate(params: &RecurrenceParams) -> bool {
    let p2 = params.p * params.p;
    p2 % params.q == 0 && matches!(p2 / params.q, 0..=3)
}

/// `U_n` by fast doubling.
pub fn lucas_u(params: &RecurrenceParams, n: u64) -> BigInt {
    lucas_pair(params.p, params.q, n).0
}

/// `(U_n, U_{n+1})` by fast doubling:
/// `U_{2k} = U_k (2U_{k+1} − P U_k)`, `U_{2k+1} = U_{k+1}² − Q U_k²`.
pub(crate) fn lucas_pair(p: i64, q: i64, n: u64) -> (BigInt, BigInt) {
    let (p, q) = (BigInt::from(p), BigInt::from(q));
    let mut a = BigInt::zero();
    let mut b = BigInt::one();
    for bit in (0..64 - n.leading_zeros()).rev() {
        let u2k = &a * ((&b << 1u8) - &p * &a);
        let u2k1 = &b * &b - &q * &a * &a;
        if (n >> bit) & 1 == 1 {
            let u2k2 = &p * &u2k1 - &q * &u2k;
            a = u2k1;
            b = u2k2;
        } else {
            a = u2k;
            b = u2k1;
        }
    }
    (a, b)
}

/// `R_n = R1 U_n − R0 Q U_{n−1}` for `n ≥ 1`; `R_0` is returned directly.
pub fn term(params: &RecurrenceParams, n: u64) -> BigInt {
    if n == 0 {
        return BigInt::from(params.r0);
    }
    let (u_prev, u_n) = lucas_pair(params.p, params.q, n - 1);
    BigInt::from(params.r1) * u_n - BigInt::from(params.r0) * params.q * u_prev
}

/// The q-integer `[n]_q = (q^n − 1)/(q − 1) = U_n(q + 1, q)`.
pub fn q_integer(q: i64, n: u64) -> Result<BigInt> {
    if q < 2 {
        return Err(Error::domain("q-integers need q ≥ 2"));
    }
    Ok(lucas_pair(q + 1, q, n).0)
}

/// `R_0, …, R_len−1` by the recurrence.
pub fn terms(params: &RecurrenceParams, len: usize) -> Vec<BigInt> {
    linear_terms(params.p, params.q, params.r0, params.r1, len)
}

/// `U_0, …, U_len−1` by the recurrence.
pub fn lucas_terms(params: &RecurrenceParams, len: usize) -> Vec<BigInt> {
    linear_terms(params.p, params.q, 0, 1, len)
}

fn linear_terms(p: i64, q: i64, r0: i64, r1: i64, len: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = Vec::with_capacity(len);
    for i in 0..len {
        let next = match i {
            0 => BigInt::from(r0),
            1 => BigInt::from(r1),
            _ => &out[i - 1] * p - &out[i - 2] * q,
        };
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gcd;
    use proptest::prelude::*;

    fn fib() -> RecurrenceParams {
        RecurrenceParams::validate(1, -1, 0, 1).unwrap()
    }

    #[test]
    fn validate_examples() {
        let f = fib();
        assert!(f.theorem_scope);
        assert_eq!(f.delta, 5);
        assert_eq!(RecurrenceParams::validate(2, 1, 0, 1), Err(Error::Hypothesis(Hypothesis::NonzeroDiscriminant)));
        assert_eq!(Error::Hypothesis(Hypothesis::NonzeroDiscriminant).to_string(), "Δ=0 violates standing hypothesis");
        let p = RecurrenceParams::validate(2, 4, 0, 1).unwrap();
        assert!(!p.theorem_scope);
        assert!(p.require_scope().is_err());
        assert_eq!(RecurrenceParams::validate(0, 3, 1, 1), Err(Error::Hypothesis(Hypothesis::NonzeroPQ)));
        assert_eq!(RecurrenceParams::validate(1, -1, 0, 0), Err(Error::Hypothesis(Hypothesis::NonzeroInitialTerms)));
    }

    #[test]
    fn gcd_of_initial_terms() {
        assert_eq!(fib().gcd_r0_r1, BigInt::from(1));
        assert_eq!(RecurrenceParams::validate(1, -1, 0, -4).unwrap().gcd_r0_r1, BigInt::from(4));
        assert_eq!(RecurrenceParams::validate(1, -1, 6, -4).unwrap().gcd_r0_r1, BigInt::from(2));
    }

    #[test]
    fn degeneracy() {
        let d = |p, q| is_degenerate(&RecurrenceParams::lucas(p, q).unwrap());
        assert!(d(1, 1));
        assert!(!d(1, -1));
        assert!(!d(4, 2));
        assert!(d(1, 1) && d(2, 2) && d(3, 3) && d(-2, 2) && d(3, 9));
        assert!(!d(3, 2) && !d(2, 3));
    }

    #[test]
    fn lucas_examples() {
        assert_eq!(lucas_u(&fib(), 10), BigInt::from(55));
        let p32 = RecurrenceParams::lucas(3, 2).unwrap();
        assert_eq!(lucas_u(&p32, 5), BigInt::from((1 << 5) - 1));
        for (p, q) in [(1, -1), (3, 2), (-5, 7), (2, 9)] {
            assert_eq!(lucas_u(&RecurrenceParams::lucas(p, q).unwrap(), 0), BigInt::zero());
            assert_eq!(lucas_u(&RecurrenceParams::lucas(p, q).unwrap(), 1), BigInt::one());
        }
    }

    #[test]
    fn term_examples() {
        let lucas_numbers = RecurrenceParams::validate(1, -1, 2, 1).unwrap();
        assert_eq!(term(&lucas_numbers, 4), BigInt::from(7));
        // R_4 = R1 U_4 − R0 Q U_3
        assert_eq!(lucas_u(&fib(), 4) + BigInt::from(2) * lucas_u(&fib(), 3), BigInt::from(7));
        assert_eq!(terms(&lucas_numbers, 5), [2, 1, 3, 4, 7].map(BigInt::from).to_vec());
        assert_eq!(term(&fib(), 12), BigInt::from(144));
        assert_eq!(term(&lucas_numbers, 0), BigInt::from(2));
    }

    #[test]
    fn q_integers() {
        assert_eq!(q_integer(2, 1).unwrap(), BigInt::one());
        assert_eq!(q_integer(2, 3).unwrap(), BigInt::from(7));
        assert_eq!(q_integer(3, 4).unwrap(), BigInt::from(1 + 3 + 9 + 27));
        assert!(q_integer(1, 3).is_err());
        for q in 2..7i64 {
            for n in 0..20u32 {
                let direct = (BigInt::from(q).pow(n) - 1) / (q - 1);
                assert_eq!(q_integer(q, n as u64).unwrap(), direct);
            }
        }
    }

    fn grid_params() -> impl Strategy<Value = RecurrenceParams> {
        (-6i64..=6, -6i64..=6, -5i64..=5, -5i64..=5)
            .prop_filter_map("standing hypotheses", |(p, q, r0, r1)| RecurrenceParams::validate(p, q, r0, r1).ok())
    }

    proptest! {
        #[test]
        fn fast_doubling_matches_recurrence(params in grid_params()) {
            let table = lucas_terms(&params, 201);
            for (n, u) in table.iter().enumerate() {
                prop_assert_eq!(&lucas_u(&params, n as u64), u);
            }
        }

        #[test]
        fn closed_form_matches_recurrence(params in grid_params()) {
            let table = terms(&params, 201);
            for (n, r) in table.iter().enumerate() {
                prop_assert_eq!(&term(&params, n as u64), r);
            }
        }

        #[test]
        fn terms_coprime_to_q_in_scope(params in grid_params()) {
            prop_assume!(params.theorem_scope);
            let q = BigInt::from(params.q);
            let u = lucas_terms(&params, 201);
            let r = terms(&params, 201);
            for m in 1..=200 {
                prop_assert_eq!(gcd(&u[m], &q).unwrap(), BigInt::one());
                prop_assert_eq!(gcd(&r[m], &q).unwrap(), BigInt::one());
            }
        }
    }
}
