//! Exact computation of twisted elliptic genera of almost complex manifolds
//! from splitting-principle root data, together with the modular-form
//! machinery that turns their q-expansions into cancellation identities.
//!
//! All symbolic work happens over Q(i) with the factor `2*pi*i` absorbed
//! into every variable: a Chern root `x` enters as `X = 2*pi*i*x = eps * a`
//! and the elliptic variable as `Z = 2*pi*i*z`. Floating point only appears
//! in the numeric transformation-law checks.

pub mod arith;
pub mod bundle;
pub mod error;
pub mod genus;
pub mod jet;
pub mod modforms;
pub mod qseries;
pub mod report;
pub mod theta;

pub use arith::{bernoulli, sigma, GaussianRational, Rational};
pub use error::{Error, Result};
pub use jet::JetElement;
pub use qseries::{eisenstein_normalized, eisenstein_raw, eta_pow, QXSeries, Q_UNIT};
