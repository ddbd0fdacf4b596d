//! Composition operators, analytic Toeplitz operators and the conjugation
//! `J f(z) = conj(f(conj z))` on the Hardy space H², together with three
//! independent ways of measuring the 2-complex-symmetry defect of `C_φ`
//! for linear-fractional symbols:
//!
//! * closed-form kernel actions ([`msym`]),
//! * truncated operator matrices ([`opmat`]),
//! * exact rational-function identities over ℚ(i) ([`symbolic`]).
//!
//! [`classify`] turns the known case analysis into a decision procedure.

pub mod classify;
pub mod hardy;
pub mod moebius;
pub mod msym;
pub mod opmat;
pub mod scalar;
pub mod symbolic;
pub mod sweep;
pub mod verify;

pub use classify::{classify, classify_with, is_normal, Case, ClassificationResult};
pub use hardy::{HardyVector, KernelPoint};
pub use moebius::{ConstantMap, ExactMoebius, MoebiusMap, SelfMap};
pub use msym::{run_defect_suite, DefectConfig, DefectReport, Verdict, Which};
pub use opmat::OperatorMatrix;
pub use scalar::{ComplexScalar, GaussianRational};
pub use symbolic::{BivariatePoly, RationalFunction2};

