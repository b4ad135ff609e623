//! Exact arithmetic on binary linear recurrence sequences
//! `R_{n+2} = P R_{n+1} - Q R_n`.
//!
//! The crate computes least common multiples of windows of such sequences,
//! builds rational divisor certificates for them, checks the lcm identities
//! satisfied by Lucas sequences, and evaluates effective lower bounds and
//! asymptotic ratio estimators with outward-rounded interval arithmetic.
//!
//! ```
//! use lucaslcm_core::{lab, recurrences::RecurrenceParams};
//!
//! let fib = RecurrenceParams::validate(1, -1, 0, 1).unwrap();
//! assert_eq!(lab::lcm_range(&fib, 1, 10).unwrap(), 2042040u32.into());
//! ```

pub mod bounds;
pub mod combinatorics;
pub mod error;
pub mod lab;
pub mod numerics;
pub mod recurrences;
pub mod report;

pub use error::{Error, Hypothesis, Result};
pub use num_bigint::BigInt;
pub use numerics::interval::RealInterval;
pub use numerics::BigRational;
pub use recurrences::{RecurrenceParams, RootData};
