//! Exact finite-precision computation in discretely valued fields.
//!
//! The two concrete fields are the p-adic numbers `Q_p` and formal Laurent
//! series `F_q((T))` over a prime field. On top of the arithmetic sit power
//! series with certified tail bounds, Hensel and contraction root solvers,
//! Strassmann zero bounds, the p-adic exponential, and Haar/Hausdorff measure
//! computations on finite ball families.
//!
//! ```
//! use localfield::local_fields::{FieldDescriptor, LocalElement, PAdicNumber};
//! use num_bigint::BigInt;
//!
//! let q5 = FieldDescriptor::padic(5).unwrap();
//! let half = PAdicNumber::from_rational(q5, &BigInt::from(1), &BigInt::from(2), 3).unwrap();
//! assert_eq!(half.to_string(), "3 + 2*5 + 2*5^2 + O(5^3)");
//! ```

pub mod cli;
pub mod error;
pub mod local_fields;
pub mod measure;
pub mod parallel;
pub mod rootfind;
pub mod series;
pub mod special;
pub mod valuation;

pub use error::{Error, Result};
pub use local_fields::{FieldDescriptor, FieldKind, LaurentNumber, LocalElement, PAdicNumber};
pub use parallel::ExecutionMode;
pub use valuation::{ExtendedValuation, Magnitude};
