//! Explicit spectral transform for the cubic Szegő equation on the real line.
//!
//! The crate maps a rational symbol `u` in the Hardy space of the upper
//! half-plane to its spectral data (singular values of the Hankel operator
//! `H_u`, phases, generator values and Herglotz level data) and back, and
//! evolves the data along the Szegő flow in closed form.
//!
//! Modules, bottom-up:
//!
//! * [`rational`]: polynomials and rational functions in partial-fraction
//!   form with exact residue-based `L²` calculus.
//! * [`blaschke`]: finite Blaschke products, Frostman shifts and the
//!   Herglotz functions attached to them.
//! * [`model_space`]: the model space `K_θ`, its orthonormal basis and the
//!   model operator `A_θ`.
//! * [`hankel`]: the Hankel operator of a symbol and the direct problem.
//! * [`inverse`]: the explicit inverse formula and its verification suite.
//! * [`flow`]: linear evolution of spectral data, flow residuals and
//!   Sobolev growth scans.
//! * [`io`]: JSON and CSV formats shared with the command-line front end.

// `!(x > 0.0)` is used on purpose so that NaN is rejected with the bad values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blaschke;
pub mod error;
pub mod flow;
pub mod hankel;
pub mod inverse;
pub mod io;
pub mod linalg;
pub mod model_space;
pub mod quadrature;
pub mod rational;

pub use blaschke::{BlaschkeProduct, HerglotzData};
pub use error::{Result, SzegoError};
pub use flow::{FlowState, GrowthSeries};
pub use hankel::{direct_spectral_data, HankelOperator};
pub use inverse::{InverseSolution, Level, SpectralData};
pub use model_space::ModelSpace;
pub use rational::{ComplexPolynomial, PoleTerm, RationalFunction, Root};

/// Complex double used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Shorthand constructor for [`C64`].
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
