//! Exact computation with clopen subsets of Cantor space `2^ω` under
//! Bernoulli product measures.
//!
//! * [`clopen`]: canonical decision-diagram representation and boolean
//!   algebra of clopen sets.
//! * [`measure`]: exact `μ_p` as rationals and as integer polynomials in `p`.
//! * [`maps`]: permutation pullbacks, block codes and coordinate shifts.
//! * [`ml_test`]: finite Martin-Löf test stages and their transport.
//! * [`density`]: conditional densities and majority-vote enumeration.
//! * [`recovery`]: recovering a permutation from a noisy functional.

pub mod clopen;
pub mod density;
pub mod error;
pub mod functional;
pub mod maps;
pub mod measure;
pub mod recovery;
pub mod word;

pub use clopen::{ClopenSet, DEFAULT_DEPTH_CAP};
pub use error::{Error, Result};
pub use functional::{AnyFunctional, BitFunctional, BitOutput, Enumerator, TruncatedFunctional};
pub use maps::{BlockCode, CoordinateShift, FiniteSupportPermutation};
pub use measure::{MeasurePoly, RationalProb};
pub use ml_test::TestStage;
pub use recovery::{RecoveryConfig, RecoveryInstance, RecoveryMode};
pub use word::{BinaryWord, ConstraintCylinder};
