//! Numerical laboratory for norm inequalities of concave and convex matrix
//! functions and for dominated majorization.
//!
//! * [`matcore`]: dense Hermitian matrices, Jacobi eigensolver, spectral
//!   calculus, seeded random ensembles, JSON I/O.
//! * [`specfun`]: piecewise-linear scalar functions built from angle
//!   functions.
//! * [`major`]: Ky Fan / Schatten norms and weak majorization verdicts.
//! * [`delta`]: the vector `delta(B; A)` of one-sided derivatives of
//!   eigenvalue partial sums, and `A`-majorization.
//! * [`ineq`]: one checker per inequality.
//! * [`lab`]: reproduction registry, randomized search, trial runner.

pub mod delta;
pub mod error;
pub mod ineq;
pub mod lab;
pub mod major;
pub mod matcore;
pub mod par;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use matcore::HermitianMatrix;
pub use report::TrialReport;
