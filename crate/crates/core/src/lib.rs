//! Numerical laboratory for the critical-line moments of the Riemann zeta
//! function.
//!
//! The crate is organised around six subsystems:
//!
//! * [`zeta`]: Riemann–Siegel, Euler–Maclaurin and Laurent evaluation of ζ,
//!   plus cached uniform grids of Hardy's `Z(t)`.
//! * [`partition`]: the prime-window scheme, the window polynomials
//!   `𝒫_j(s)` and `𝒩_j(s; α)`, and their coefficient expansions.
//! * [`meanvalue`]: exact and diagonal mean squares of Dirichlet polynomials
//!   over `[T, 2T]`, together with the combinatorial Ω-stratified sums.
//! * [`twisted4`]: the twisted fourth-moment main term as a quadruple
//!   contour integral, its arithmetic factors, and the direct integral.
//! * [`verify`]: pointwise inequality checks, Taylor remainder certificates,
//!   and the summation budget, all in log space.
//! * [`lab`]: moment quadrature, configuration, and report emission.

pub mod error;
pub mod lab;
pub mod meanvalue;
pub mod partition;
pub mod quad;
pub mod sum;
pub mod twisted4;
pub mod verify;
pub mod zeta;

pub use error::{LabError, Result};
pub use num_complex::Complex64;

pub use lab::{LabConfig, MomentEstimate};
pub use partition::{DirichletPoly, PartitionMode, PartitionParams, PartitionScheme, Window};
pub use twisted4::{BumpFunction, ShiftTuple};
pub use verify::MarginReport;
pub use zeta::{EvalRequest, ZetaGrid};
