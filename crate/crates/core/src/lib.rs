//! Markov–Bernstein constants for the seven coherent pairs of measures.
//!
//! For a coherent pair `(c0, c1)` the sharp constant in
//! `c1((p')^2) <= M_n^2 c0(p^2)` over polynomials of degree at most `n` is
//! `M_n = 1/sqrt(mu_{1,n})`, where `mu_{1,n}` is the smallest eigenvalue of a
//! symmetric tridiagonal matrix built from the orthogonal families of the pair.
//!
//! Module map:
//! - [`orthopoly`]: monic Laguerre and Jacobi polynomials, norms, kernels.
//! - [`coherent`]: the seven cases, their `sigma_n` and square norms.
//! - [`functionals`]: quadrature rules and non-classical moment sequences.
//! - [`recurrence`]: the tridiagonal matrix / three-term recurrence of `A_n`.
//! - [`solver`]: bisection, Newton/Laguerre lower bounds, qd upper bounds, extremal polynomial.
//! - [`verify`]: quadrature checks of the inequality and identity suites.
//! - [`cli`]: command-line front end.

pub mod cli;
pub mod coherent;
pub mod error;
pub mod functionals;
pub mod numeric;
pub mod orthopoly;
pub mod recurrence;
pub mod solver;
pub mod verify;

pub use coherent::{CaseTag, CoherentCase, PairData};
pub use error::{Error, Result};
pub use recurrence::RecurrenceSpec;
pub use solver::{BoundsReport, Interval};
