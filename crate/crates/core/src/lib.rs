//! Familywise error rate (FWER) control for discrete test statistics.
//!
//! Discrete tests (Fisher's exact test, the exact binomial test) can only
//! attain finitely many p-values, and the null distribution of each p-value
//! is known exactly: it is the step function through the attainable values.
//! Conventional multiple-testing procedures ignore this and pay for it in
//! power. This crate implements procedures that exploit the full null
//! distributions:
//!
//! * [`exact`] — observed p-values and complete attainable supports for the
//!   two-by-two Fisher exact test and the conditional binomial exact test,
//!   computed stably in log space.
//! * [`null`] — the per-hypothesis null model ([`DiscreteNull`]) and test
//!   families ([`Family`]), with the step CDF, merged supports, and CDF sums
//!   the procedures are built on.
//! * [`procedures`] — ten FWER-controlling procedures: Bonferroni, Sidak,
//!   Holm, Hochberg, Tarone, modified Tarone, Tarone-Holm, and the modified
//!   Bonferroni / Holm / Hochberg procedures driven by the null CDFs.
//! * [`sim`] — a deterministic, parallel Monte Carlo harness estimating
//!   FWER, minimal power, and mean rejections under binomial (FET) and
//!   Poisson (BET) designs, including a block-dependent Poisson generator.
//! * [`clinical`] — an embedded adverse-event safety dataset with reference
//!   results for self-verification.
//!
//! ```
//! use discrete_fwer::exact::{fisher_exact, TwoByTwoInput};
//! use discrete_fwer::procedures::{apply, ProcedureId};
//! use discrete_fwer::{Family, Hypothesis};
//!
//! # fn main() -> discrete_fwer::Result<()> {
//! let hypotheses = [(13, 3), (8, 1), (4, 0)]
//!     .iter()
//!     .map(|&(x1, x2)| {
//!         let result = fisher_exact(&TwoByTwoInput::new(x1, x2, 600, 650)?)?;
//!         Ok(Hypothesis::from(result))
//!     })
//!     .collect::<discrete_fwer::Result<Vec<_>>>()?;
//! let family = Family::new(hypotheses)?;
//! let decision = apply(ProcedureId::MBonf, &family, 0.05)?;
//! assert_eq!(decision.rejected, vec![true, true, false]);
//! # Ok(())
//! # }
//! ```

pub mod clinical;
pub mod exact;
pub mod null;
pub mod procedures;
pub mod sim;

mod error;

pub use error::{Error, Result};
pub use exact::{ExactTestResult, PoissonPairInput, TwoByTwoInput};
pub use null::{DiscreteNull, Family, Hypothesis};
pub use procedures::{Decision, ProcedureId};
pub use sim::{SimConfig, SimResult, TestKind};

/// Relative slack used everywhere two probabilities are compared for
/// equality or ordering: support membership, CDF lookup, and p-value vs
/// critical-constant comparisons (in the direction of rejection).
///
/// On-support equality cases (`F(u) = u`) are the heart of these methods,
/// so a value recomputed through a different floating-point path must still
/// compare equal.
pub const REL_TOL: f64 = 1e-12;

/// `a <= b` with [`REL_TOL`] relative slack in favor of the comparison.
#[inline]
pub(crate) fn leq_tol(a: f64, b: f64) -> bool {
    a <= b + REL_TOL * b.abs()
}

/// `a == b` within [`REL_TOL`] relative tolerance.
#[inline]
pub(crate) fn eq_tol(a: f64, b: f64) -> bool {
    (a - b).abs() <= REL_TOL * a.abs().max(b.abs())
}
