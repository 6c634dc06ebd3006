//! Closed-form objects and numerical oracles for Kramers-Fokker-Planck
//! operators with potentials of degree at most two.
//!
//! The scaled one-dimensional models are `K = O_p + z X_alpha` with
//! `z = e^{i alpha} sqrt(nu)` and `alpha` in `{0, pi/2}`. The crate covers the
//! biquaternion algebra behind their Hamilton maps, the explicit flows and
//! positivity thresholds, exact semigroup norms, the Bargmann-side quotients,
//! the degenerate (linear potential) case, and a Hermite-Galerkin oracle used
//! to check the resulting bounds.

pub mod acceptance;
pub mod bargmann;
pub mod biquat;
pub mod degenerate;
pub mod error;
pub mod exactnorms;
pub mod galerkin;
pub mod linalg;
pub mod positivity;
pub mod quadrature;
pub mod symbols;

pub use error::{Error, Result};
pub use linalg::C64;
