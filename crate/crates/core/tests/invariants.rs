use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use lucaslcm_core::bounds::asymptotics::ratio_t7;
use lucaslcm_core::combinatorics::u_binomial;
use lucaslcm_core::lab::{lcm_range, theorem1_certificate};
use lucaslcm_core::numerics::interval::Precision;
use lucaslcm_core::recurrences::terms;
use lucaslcm_core::RecurrenceParams;

fn scope_params() -> impl Strategy<Value = RecurrenceParams> {
    (-6i64..=6, -6i64..=6, -5i64..=5, -5i64..=5).prop_filter_map("theorem scope", |(p, q, r0, r1)| {
        let params = RecurrenceParams::validate(p, q, r0, r1).ok()?;
        params.require_scope().ok()?;
        params.require_nondegenerate().ok()?;
        Some(params)
    })
}

fn lucas_params() -> impl Strategy<Value = RecurrenceParams> {
    (-6i64..=6, -6i64..=6).prop_filter_map("nondegenerate", |(p, q)| {
        let params = RecurrenceParams::lucas(p, q).ok()?;
        params.require_nondegenerate().ok()?;
        Some(params)
    })
}

proptest! {
    #[test]
    fn nested_windows_divide(params in scope_params(), k in 1u64..15, extra in 0u64..10, shrink in 0u64..5) {
        let n = k + extra;
        let inner = (k + shrink).min(n);
        let r = terms(&params, n as usize + 1);
        prop_assume!(r[k as usize..=n as usize].iter().all(|x| !x.is_zero()));
        let outer = lcm_range(&params, k, n).unwrap();
        let inner_lcm = lcm_range(&params, inner, n).unwrap();
        prop_assert!(outer.is_positive());
        prop_assert!(outer.is_multiple_of(&inner_lcm));
        for x in &r[k as usize..=n as usize] {
            prop_assert!(outer.is_multiple_of(x));
        }
    }

    #[test]
    fn certificate_quotient_is_integral(params in scope_params(), k in 1u64..12, extra in 0u64..10) {
        let n = k + extra;
        let r = terms(&params, n as usize + 1);
        prop_assume!(r[k as usize..=n as usize].iter().all(|x| !x.is_zero()));
        let cert = theorem1_certificate(&params, k, n).unwrap();
        prop_assert!(cert.is_valid());
        prop_assert!(cert.quotient.is_integer());
    }

    #[test]
    fn u_binomials_are_integers_with_symmetry(params in lucas_params(), n in 0u64..25, k in 0u64..25) {
        prop_assume!(k <= n);
        let u = terms(&params, n as usize + 1);
        prop_assume!(u[1..=n as usize].iter().all(|x| !x.is_zero()));
        let b = u_binomial(&params, n, k).unwrap();
        prop_assert!(b.value.is_integer());
        prop_assert_eq!(&b.value, &u_binomial(&params, n, n - k).unwrap().value);
        // product of k consecutive terms is divisible by U_1⋯U_k
        let top: BigInt = u[(n - k + 1) as usize..=n as usize].iter().product();
        let bottom: BigInt = u[1..=k as usize].iter().product();
        prop_assert_eq!(b.value.to_integer() * bottom, top);
    }
}

#[test]
fn t7_first_ratio_is_nondecreasing_on_fibonacci() {
    let fib = RecurrenceParams::lucas(1, -1).unwrap();
    let one = num_rational::BigRational::one();
    for m in 1..=4 {
        let firsts: Vec<_> =
            [50, 100, 200, 400].iter().map(|&n| ratio_t7(&fib, m, n, Precision::default()).unwrap().0.ratio).collect();
        for pair in firsts.windows(2) {
            assert!(pair[0].hi() <= pair[1].lo(), "m={m}: {} then {}", pair[0], pair[1]);
        }
        assert!(firsts.iter().all(|r| r.hi() <= one));
    }
}
