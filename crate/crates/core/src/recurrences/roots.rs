use num_traits::Zero;

use super::surd::QuadSurd;
use super::RecurrenceParams;
use crate::error::Result;
use crate::numerics::interval::RealInterval;
use crate::numerics::BigRational;

/// The zeros `α, β` of `x² − Px + Q` (ordered so that `|α| ≥ |β|`) and the
/// coefficients of `R_n = a αⁿ + b βⁿ`.
#[derive(Clone, Debug)]
pub struct RootData {
    /// `(P ± √Δ)/2`, exact.
    pub alpha_exact: QuadSurd,
    pub beta_exact: QuadSurd,
    /// Real enclosures; `None` when `Δ < 0`.
    pub alpha: Option<RealInterval>,
    pub beta: Option<RealInterval>,
    pub abs_alpha: RealInterval,
    pub abs_beta: RealInterval,
    /// `a = (R1 − β R0)/(α − β)`
    pub a_coeff: QuadSurd,
    /// `b = (R1 − α R0)/(β − α)`
    pub b_coeff: QuadSurd,
}

/// Root data at `frac_bits` of interval precision. Rejects degenerate
/// parameters.
pub fn roots(params: &RecurrenceParams, frac_bits: u32) -> Result<RootData> {
    params.require_nondegenerate()?;
    let half = BigRational::new(1.into(), 2.into());
    let p_half = QuadSurd::rational(BigRational::from_integer(params.p.into()) * &half);
    let root_half = QuadSurd::new(BigRational::zero(), half.clone(), params.delta);
    let (alpha_exact, beta_exact) = if params.delta > 0 && params.p < 0 {
        (&p_half - &root_half, &p_half + &root_half)
    } else {
        (&p_half + &root_half, &p_half - &root_half)
    };

    let (alpha, beta, abs_alpha, abs_beta) = if params.delta > 0 {
        let a = alpha_exact.to_interval(frac_bits);
        let b = beta_exact.to_interval(frac_bits);
        let (aa, ab) = (a.abs(), b.abs());
        (Some(a), Some(b), aa, ab)
    } else {
        let m = RealInterval::from_i64(params.q, frac_bits).sqrt().expect("Q > 0 when Δ < 0");
        (None, None, m.clone(), m)
    };

    let r0 = QuadSurd::from_int(params.r0);
    let r1 = QuadSurd::from_int(params.r1);
    let diff = &alpha_exact - &beta_exact;
    let a_coeff = &(&r1 - &(&beta_exact * &r0)) / &diff;
    let b_coeff = &(&r1 - &(&alpha_exact * &r0)) / &(-diff);

    Ok(RootData { alpha_exact, beta_exact, alpha, beta, abs_alpha, abs_beta, a_coeff, b_coeff })
}

impl RootData {
    /// `log |α|` as an interval at the precision of `abs_alpha`.
    pub fn log_abs_alpha(&self) -> Result<RealInterval> {
        self.abs_alpha.ln()
    }

    /// True when `α` is rational (then an integer, `Δ` a perfect square).
    pub fn alpha_is_rational(&self) -> bool {
        self.alpha_exact.is_rational()
    }

    pub fn alpha_rational(&self) -> Option<&BigRational> {
        self.alpha_exact.as_rational()
    }
}
