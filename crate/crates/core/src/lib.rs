//! Ray transforms over rotation-indexed curve families in the unit disc, and
//! their inversion through the λ-complexified transport equation.
//!
//! A curve family is given by polarized coefficient functions (see
//! [`geometry::CurveFamily`]). Substituting `(z/λ, λz̄)` for `(z, z̄)` yields a
//! field whose coefficient ratio `ξ/ρ` is a finite Blaschke product in `λ`.
//! A density is recovered from its sinogram by Hilbert-filtering in the
//! transverse variable, differentiating across the curves and averaging over
//! rotation angles with the Poisson weight at any zero `λ_i` of that product.
//! The attenuated variant adds an integrating factor and a twisted Hilbert
//! filter.
//!
//! # Modules
//!
//! - [`geometry`]: families, complexified coefficients, zero location, admissibility checks.
//! - [`transforms`]: ray, beam and attenuated transforms, Hilbert filtering.
//! - [`inversion`]: filtered backprojection through the Poisson kernel, plain and attenuated.
//! - [`verification`]: Green's function solutions and the checks built on them.
//! - [`phantom`] and [`io`]: test densities, error metrics and file formats.
//! - [`cli`]: the `raytomo` command line.
//!
//! All numerics are generic over [`Real`]; the `f64` aliases below are what the
//! command line uses.

// `!(a < b)` is used on purpose so that NaN fails every range check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod geometry;
pub mod inversion;
pub mod io;
pub mod phantom;
pub mod quadrature;
pub mod scalar;
pub mod spline;
pub mod transforms;
pub mod verification;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Double-precision sinogram.
pub type Sinogram64 = transforms::Sinogram<f64>;
/// Double-precision sampling grid.
pub type SGrid64 = transforms::SGrid<f64>;
/// Double-precision reconstruction.
pub type ReconImage64 = inversion::ReconImage<f64>;
/// Double-precision phantom.
pub type Phantom64 = phantom::Phantom<f64>;
/// Double-precision polynomial-ratio family loaded from JSON.
pub type RationalFamily64 = geometry::RationalFamily<f64>;
/// Complex double.
pub type Cx64 = Cx<f64>;
