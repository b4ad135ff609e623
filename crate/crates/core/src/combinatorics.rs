//! U-factorials, U-binomial coefficients, lcm-binomials and the exponent
//! bookkeeping functions `f`, `g`, `h`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{lcm_all, BigRational};
use crate::recurrences::{lucas_terms, RecurrenceParams};

/// `[j]_U! = U_1 U_2 ⋯ U_j`, with `[0]_U! = 1`.
pub fn u_factorial(params: &RecurrenceParams, j: u64) -> BigInt {
    let u = lucas_terms(params, j as usize + 1);
    u[1..].iter().product()
}

/// Prefix products `[0]_U!, [1]_U!, …` of a Lucas table.
pub fn u_factorials(u: &[BigInt]) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(u.len());
    let mut acc = BigInt::one();
    out.push(acc.clone());
    for x in u.iter().skip(1) {
        acc *= x;
        out.push(acc.clone());
    }
    out
}

/// A U-binomial coefficient `[n]_U! / ([k]_U! [n−k]_U!)`, held as an exact
/// rational so integrality is checked rather than assumed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UBinomial {
    pub n: u64,
    pub k: u64,
    pub value: BigRational,
}

impl UBinomial {
    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    pub fn integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.value.to_integer())
    }
}

/// `binom(n, k)_U = U_n U_{n−1} ⋯ U_{n−k+1} / (U_1 ⋯ U_k)`.
pub fn u_binomial(params: &RecurrenceParams, n: u64, k: u64) -> Result<UBinomial> {
    if k > n {
        return Err(Error::pre(format!("U-binomial needs n ≥ k, got n={n}, k={k}")));
    }
    let u = lucas_terms(params, n as usize + 1);
    let value = binomial_from_table(&u, n as usize, k as usize)?;
    Ok(UBinomial { n, k, value })
}

/// Multiply/exact-divide evaluation: after step `i` the accumulator holds
/// `binom(n−k+i, i)_U`, so it stays integral whenever the final value is.
pub(crate) fn binomial_from_table(u: &[BigInt], n: usize, k: usize) -> Result<BigRational> {
    let mut int_acc = Some(BigInt::one());
    let mut rat_acc = BigRational::one();
    for i in 1..=k {
        let num = &u[n - k + i];
        let den = &u[i];
        if den.is_zero() {
            return Err(Error::Degenerate);
        }
        match int_acc.take() {
            Some(acc) => {
                let t = acc * num;
                let (q, r) = t.div_rem(den);
                if r.is_zero() {
                    int_acc = Some(q);
                } else {
                    rat_acc = BigRational::new(t, den.clone());
                }
            }
            None => rat_acc *= BigRational::new(num.clone(), den.clone()),
        }
    }
    Ok(match int_acc {
        Some(v) => BigRational::from_integer(v),
        None => rat_acc,
    })
}

/// Integer U-binomials `binom(n, m)_U` for `m = 0..=kmax`, by the row
/// recurrence `binom(n, m) = binom(n, m−1) · U_{n−m+1} / U_m`.
pub(crate) fn binomial_row(u: &[BigInt], n: usize, kmax: usize) -> Result<Vec<BigInt>> {
    let mut row = Vec::with_capacity(kmax + 1);
    let mut acc = BigInt::one();
    row.push(acc.clone());
    for m in 1..=kmax {
        if u[m].is_zero() {
            return Err(Error::Degenerate);
        }
        let (q, r) = (acc * &u[n - m + 1]).div_rem(&u[m]);
        if !r.is_zero() {
            return Err(Error::NotIntegral(format!("binom({n},{m})_U")));
        }
        acc = q;
        row.push(acc.clone());
    }
    Ok(row)
}

/// `{n k}_U = lcm(U_n, …, U_{n−k+1}) / lcm(U_1, …, U_k)`.
pub fn lcm_binomial(params: &RecurrenceParams, n: u64, k: u64) -> Result<BigInt> {
    if k == 0 || k > n {
        return Err(Error::pre(format!("lcm-binomial needs n ≥ k ≥ 1, got n={n}, k={k}")));
    }
    let u = lucas_terms(params, n as usize + 1);
    lcm_binomial_from_table(&u, n as usize, k as usize)
}

pub(crate) fn lcm_binomial_from_table(u: &[BigInt], n: usize, k: usize) -> Result<BigInt> {
    let top = window_lcm(u, n - k + 1, n)?;
    let bottom = window_lcm(u, 1, k)?;
    let (q, r) = top.div_rem(&bottom);
    if !r.is_zero() {
        return Err(Error::NotIntegral(format!("lcm(U_{}..U_{n}) is not a multiple of lcm(U_1..U_{k})", n - k + 1)));
    }
    Ok(q)
}

pub(crate) fn window_lcm(u: &[BigInt], from: usize, to: usize) -> Result<BigInt> {
    if let Some(i) = (from..=to).find(|&i| u[i].is_zero()) {
        return Err(Error::ZeroTerm { index: i as u64 });
    }
    lcm_all(&u[from..=to])
}

/// `f(j,k,n)`, `g(k,n)`, `h(k,n)` for one `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExponentTriple {
    pub f: u64,
    pub g: u64,
    pub h: u64,
}

/// `f(j,k,n) = Σ_{k ≤ i ≤ n, i ≠ j} min(i, j)` by direct summation.
pub fn f_exponent(j: u64, k: u64, n: u64) -> u64 {
    (k..=n).filter(|&i| i != j).map(|i| i.min(j)).sum()
}

/// `g(k,n) = k + (k+1) + ⋯ + n = (n+k)(n−k+1)/2`.
pub fn g_exponent(k: u64, n: u64) -> u64 {
    (n + k) * (n - k + 1) / 2
}

/// `h(k,n) = max_{k ≤ j ≤ n} f(j,k,n)`.
pub fn h_exponent(k: u64, n: u64) -> u64 {
    (k..=n).map(|j| f_exponent(j, k, n)).max().unwrap_or(0)
}

pub fn schedule_exponents(j: u64, k: u64, n: u64) -> Result<ExponentTriple> {
    if !(k <= j && j <= n) {
        return Err(Error::pre(format!("need k ≤ j ≤ n, got j={j}, k={k}, n={n}")));
    }
    Ok(ExponentTriple { f: f_exponent(j, k, n), g: g_exponent(k, n), h: h_exponent(k, n) })
}

/// Relations (e15) and its `f − (n−k)` variant: the lcm over `j` of
/// `Q^{f(j,k,n)−s}·[j−k]_U!·[n−j]_U!` divides `Q^{h(k,n)}·[n−k]_U!`, for
/// `s = 0` and `s = n − k` respectively. Returns both verdicts.
pub fn exponent_relations(params: &RecurrenceParams, k: u64, n: u64) -> Result<(bool, bool)> {
    if k == 0 || k > n {
        return Err(Error::pre(format!("need 1 ≤ k ≤ n, got k={k}, n={n}")));
    }
    let u = lucas_terms(params, n as usize + 1);
    let fact = u_factorials(&u);
    Ok(exponent_relations_from(params.q, &fact, k, n))
}

pub(crate) fn exponent_relations_from(q: i64, fact: &[BigInt], k: u64, n: u64) -> (bool, bool) {
    let q = BigInt::from(q).abs();
    let h = h_exponent(k, n);
    let target = q.pow(h as u32) * fact[(n - k) as usize].abs();
    let check = |shift: u64| {
        let items: Vec<BigInt> = (k..=n)
            .map(|j| {
                let f = f_exponent(j, k, n) - shift;
                q.pow(f as u32) * &fact[(j - k) as usize] * &fact[(n - j) as usize]
            })
            .collect();
        match lcm_all(&items) {
            Ok(l) => (&target % l).is_zero(),
            Err(_) => false,
        }
    };
    (check(0), check(n - k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fib() -> RecurrenceParams {
        RecurrenceParams::lucas(1, -1).unwrap()
    }

    fn int(b: &UBinomial) -> i64 {
        b.integer().unwrap().try_into().unwrap()
    }

    #[test]
    fn factorials() {
        assert_eq!(u_factorial(&fib(), 0), BigInt::one());
        // 1·1·2·3 and 1·3·7
        assert_eq!(u_factorial(&fib(), 4), BigInt::from(6));
        assert_eq!(u_factorial(&RecurrenceParams::lucas(3, 2).unwrap(), 3), BigInt::from(21));
        let negative = RecurrenceParams::lucas(-1, -1).unwrap();
        assert_eq!(u_factorial(&negative, 2), BigInt::from(-1));
    }

    #[test]
    fn fibonomials() {
        // F5 F4 / (F1 F2) = 5·3
        assert_eq!(int(&u_binomial(&fib(), 5, 2).unwrap()), 15);
        assert_eq!(int(&u_binomial(&fib(), 7, 0).unwrap()), 1);
        assert_eq!(int(&u_binomial(&fib(), 6, 3).unwrap()), 8 * 5 * 3 / 2);
        assert!(u_binomial(&fib(), 2, 3).is_err());
    }

    #[test]
    fn out_of_scope_binomial_matches_product() {
        // gcd(4, 2) = 2 puts U(4, 2) outside theorem scope; its U-binomials
        // are still integers.
        let p = RecurrenceParams::lucas(4, 2).unwrap();
        for n in 1..12 {
            for k in 0..=n {
                let b = u_binomial(&p, n, k).unwrap();
                let direct: BigRational = (0..k)
                    .map(|i| {
                        BigRational::new(crate::recurrences::lucas_u(&p, n - i), crate::recurrences::lucas_u(&p, i + 1))
                    })
                    .product();
                assert_eq!(b.value, direct);
                assert!(b.is_integer());
            }
        }
    }

    #[test]
    fn lcm_binomials() {
        assert_eq!(lcm_binomial(&fib(), 6, 3).unwrap(), BigInt::from(120 / 2));
        for n in 1..15 {
            assert_eq!(lcm_binomial(&fib(), n, n).unwrap(), BigInt::one());
        }
        assert_eq!(lcm_binomial(&fib(), 6, 4).unwrap(), BigInt::from(120 / 6));
        assert_eq!(int(&u_binomial(&fib(), 6, 4).unwrap()), 40);
        assert!(lcm_binomial(&fib(), 3, 0).is_err());
    }

    #[test]
    fn exponents() {
        assert_eq!(schedule_exponents(2, 1, 3).unwrap(), ExponentTriple { f: 3, g: 6, h: 3 });
        assert_eq!(schedule_exponents(7, 7, 7).unwrap().f, 0);
        assert_eq!(schedule_exponents(3, 2, 4).unwrap().f, 2 + 3);
        assert!(schedule_exponents(1, 2, 4).is_err());
        assert!(schedule_exponents(5, 2, 4).is_err());
    }

    #[test]
    fn g_closed_form_matches_sum() {
        for n in 1..=100u64 {
            for k in 1..=n {
                assert_eq!(g_exponent(k, n), (k..=n).sum::<u64>());
            }
        }
    }

    #[test]
    fn f_bounded_by_h_bounded_by_g() {
        for n in 1..=30u64 {
            for k in 1..=n {
                for j in k..=n {
                    let t = schedule_exponents(j, k, n).unwrap();
                    assert!(t.f <= t.h && t.h <= t.g);
                }
            }
        }
    }

    #[test]
    fn pascal_like_identities() {
        for (p, q) in [(1, -1), (3, 2), (-2, -5), (5, 3), (1, 4)] {
            let params = RecurrenceParams::lucas(p, q).unwrap();
            let u = lucas_terms(&params, 61);
            for n in 1..=60usize {
                let row = binomial_row(&u, n, n).unwrap();
                let prev = binomial_row(&u, n - 1, n - 1).unwrap();
                for m in 1..=n {
                    assert_eq!(&u[m] * &row[m], &u[n - m + 1] * &row[m - 1]);
                    assert_eq!(&u[m] * &row[m], &u[n] * &prev[m - 1]);
                    assert_eq!(row[m], row[n - m], "symmetry");
                }
            }
        }
    }

    #[test]
    fn exponent_relations_small() {
        for (p, q) in [(1, -1), (3, 2), (5, -6), (2, 3)] {
            let params = RecurrenceParams::lucas(p, q).unwrap();
            for n in 1..=12 {
                for k in 1..=n {
                    assert_eq!(exponent_relations(&params, k, n).unwrap(), (true, true));
                }
            }
        }
    }
}
