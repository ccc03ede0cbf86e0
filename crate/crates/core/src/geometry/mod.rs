//! Curve families as vector fields on the unit disc and their λ-complexification.
//!
//! A family is described by polarized functions `A, B, s, t` of two independent
//! complex arguments. Substituting `(w1, w2) = (z/λ, λz̄)` gives the complexified
//! coefficients `ξ = λA`, `ρ = B/λ` and the complexified transverse coordinate
//! `s(z, λ)`. For admissible families the ratio `ξ/ρ` is a finite Blaschke
//! product in `λ`, whose zeros drive the inversion formulas.

mod builtin;
mod family;
mod field;
mod rational;
mod typeh;
mod zeros;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use builtin::{EuclideanLines, HyperbolicGeodesics};
pub use family::{contour_jet, Coefficient, CurveFamily, Jet};
pub use field::{apply_x, apply_x_perp, directional_derivatives, SampledField};
pub(crate) use field::five_point;
pub use rational::{FamilySpec, RationalFamily, RationalSpec, TermSpec};
pub use typeh::{check_type_h, default_type_h_samples, ConditionReport, TypeHReport};
pub use zeros::{count_zeros, find_zeros, ContourOptions, ZeroCache, ZeroSet};

use crate::error::{Error, Result};
use crate::scalar::{Cx, Real};

const BOUNDARY_TOLERANCE: f64 = 1e-12;
const LAMBDA_FLOOR: f64 = 1e-14;
const RHO_FLOOR: f64 = 1e-14;

/// A point of the closed unit disc.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscPoint<T> {
    pub re: T,
    pub im: T,
    pub on_boundary: bool,
}

impl<T: Real> DiscPoint<T> {
    /// Interior point; `Domain` if `re² + im² ≥ 1`.
    pub fn interior(re: T, im: T) -> Result<Self> {
        if re * re + im * im < T::one() {
            Ok(Self {
                re,
                im,
                on_boundary: false,
            })
        } else {
            Err(Error::Domain(format!("({re}, {im}) is not inside the unit disc")))
        }
    }

    /// The boundary point `e^{iθ}`.
    pub fn boundary(theta: T) -> Self {
        Self {
            re: theta.cos(),
            im: theta.sin(),
            on_boundary: true,
        }
    }

    /// Classifies a complex number as interior or boundary (tolerance 1e-12 on `|z|²`).
    pub fn from_complex(z: Cx<T>) -> Result<Self> {
        let modulus = z.norm_sqr();
        if (modulus - T::one()).abs() <= T::lit(BOUNDARY_TOLERANCE) {
            Ok(Self {
                re: z.re,
                im: z.im,
                on_boundary: true,
            })
        } else {
            Self::interior(z.re, z.im)
        }
    }

    pub fn as_complex(&self) -> Cx<T> {
        Cx::new(self.re, self.im)
    }
}

pub(crate) fn require_interior<T: Real>(z: Cx<T>) -> Result<()> {
    if z.norm_sqr() < T::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("z = {z} is not an interior disc point")))
    }
}

fn require_lambda<T: Real>(lambda: Cx<T>) -> Result<()> {
    let modulus = lambda.norm();
    if modulus < T::lit(LAMBDA_FLOOR) || !modulus.is_finite() {
        Err(Error::SingularLambda(modulus.as_f64()))
    } else {
        Ok(())
    }
}

/// Complexified coefficients at a point `(z, λ)`.
#[derive(Clone, Copy, Debug)]
pub struct ComplexifiedCoeffs<T> {
    pub xi: Cx<T>,
    pub rho: Cx<T>,
    pub s_lambda: Cx<T>,
    pub ds_dz: Cx<T>,
    pub ds_dzbar: Cx<T>,
}

impl<T: Real> ComplexifiedCoeffs<T> {
    /// `X⊥ s = i(−ξ s_z + ρ s_z̄)`.
    pub fn perp_s(&self) -> Cx<T> {
        Cx::new(T::zero(), T::one()) * (self.rho * self.ds_dzbar - self.xi * self.ds_dz)
    }

    /// `ξ s_z + ρ s_z̄`, which vanishes identically.
    pub fn transport_of_s(&self) -> Cx<T> {
        self.xi * self.ds_dz + self.rho * self.ds_dzbar
    }
}

/// Evaluates `ξ, ρ, s(z, λ)` and the chain-rule partials of `s` at `(z, λ)`.
///
/// # Errors
/// `SingularLambda` for `|λ| < 1e-14`; `Domain` if `z` is not interior or the
/// substitution leaves the polarization domain.
pub fn eval_coeffs<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
) -> Result<ComplexifiedCoeffs<T>> {
    require_lambda(lambda)?;
    require_interior(z)?;
    let (w1, w2) = (z / lambda, lambda * z.conj());
    let a = family.polarized(Coefficient::A, w1, w2)?;
    let b = family.polarized(Coefficient::B, w1, w2)?;
    let s = family.polarized_jet(Coefficient::S, w1, w2)?;
    Ok(ComplexifiedCoeffs {
        xi: lambda * a,
        rho: b / lambda,
        s_lambda: s.value,
        ds_dz: s.d1 / lambda,
        ds_dzbar: s.d2 * lambda,
    })
}

/// The Beltrami coefficient `ξ/ρ` at `(z, λ)`.
///
/// # Errors
/// `DegenerateField` if `|ρ| < 1e-14`, plus the errors of [`eval_coeffs`].
pub fn mu_ratio<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, z: Cx<T>, lambda: Cx<T>) -> Result<Cx<T>> {
    require_lambda(lambda)?;
    require_interior(z)?;
    let (w1, w2) = (z / lambda, lambda * z.conj());
    let a = family.polarized(Coefficient::A, w1, w2)?;
    let b = family.polarized(Coefficient::B, w1, w2)?;
    let rho = b / lambda;
    if rho.norm() < T::lit(RHO_FLOOR) {
        return Err(Error::DegenerateField(rho.norm().as_f64()));
    }
    Ok(lambda * a / rho)
}

/// `ξ/ρ` together with its logarithmic λ-derivative `(ξ/ρ)'/(ξ/ρ)`.
pub(crate) fn ratio_with_log_derivative<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
) -> Result<(Cx<T>, Cx<T>)> {
    require_lambda(lambda)?;
    let (w1, w2) = (z / lambda, lambda * z.conj());
    let a = family.polarized_jet(Coefficient::A, w1, w2)?;
    let b = family.polarized_jet(Coefficient::B, w1, w2)?;
    let xi = lambda * a.value;
    let rho = b.value / lambda;
    if rho.norm() < T::lit(RHO_FLOOR) {
        return Err(Error::DegenerateField(rho.norm().as_f64()));
    }
    // dw1/dλ = −z/λ², dw2/dλ = z̄.
    let dxi = a.value - w1 * a.d1 + lambda * z.conj() * a.d2;
    let drho = (-b.value - w1 * b.d1 + lambda * z.conj() * b.d2) / (lambda * lambda);
    Ok((xi / rho, dxi / xi - drho / rho))
}

/// Logarithmic λ-derivative of `ρ` alone.
pub(crate) fn rho_log_derivative<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
) -> Result<Cx<T>> {
    require_lambda(lambda)?;
    let (w1, w2) = (z / lambda, lambda * z.conj());
    let b = family.polarized_jet(Coefficient::B, w1, w2)?;
    if b.value.norm() < T::lit(RHO_FLOOR) {
        return Err(Error::DegenerateField(b.value.norm().as_f64()));
    }
    let drho_scaled = -b.value - w1 * b.d1 + lambda * z.conj() * b.d2;
    Ok(drho_scaled / (lambda * b.value))
}

/// `|s_z|² − |s_z̄|²` at `(z, λ)`: positive inside the unit λ-disc, negative outside.
pub fn jacobian_ds<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, z: Cx<T>, lambda: Cx<T>) -> Result<T> {
    let coeffs = eval_coeffs(family, z, lambda)?;
    Ok(coeffs.ds_dz.norm_sqr() - coeffs.ds_dzbar.norm_sqr())
}

/// Resolves a builtin family by name, or loads a JSON family definition when
/// `name` ends in `.json`.
pub fn family_by_name<T: Real>(name: &str) -> Result<Box<dyn CurveFamily<T>>> {
    match name {
        EuclideanLines::NAME => Ok(Box::new(EuclideanLines)),
        HyperbolicGeodesics::NAME => Ok(Box::new(HyperbolicGeodesics)),
        other if other.ends_with(".json") => Ok(Box::new(RationalFamily::<T>::load(Path::new(other))?)),
        other => Err(Error::UnknownFamily(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Cx<f64> {
        Cx::new(re, im)
    }

    #[test]
    fn lines_coefficients_at_unit_lambdas() {
        let coeffs = eval_coeffs(&EuclideanLines, c(0.3, 0.4), c(1.0, 0.0)).unwrap();
        assert!((coeffs.xi - c(1.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.rho - c(1.0, 0.0)).norm() < 1e-15);
        assert!((coeffs.s_lambda - c(-0.4, 0.0)).norm() < 1e-15);
        let rotated = eval_coeffs(&EuclideanLines, c(-0.1, 0.2), c(0.0, 1.0)).unwrap();
        assert!((rotated.xi - c(0.0, 1.0)).norm() < 1e-15);
        assert!((rotated.rho - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn lines_ratio_is_lambda_squared() {
        let lambda = c(0.3, -0.45);
        let ratio = mu_ratio(&EuclideanLines, c(0.2, 0.1), lambda).unwrap();
        assert!((ratio - lambda * lambda).norm() < 1e-15);
        let on_circle = mu_ratio(&EuclideanLines, c(0.2, 0.1), Cx::from_polar(1.0, 2.1)).unwrap();
        assert!((on_circle.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hyperbolic_ratio_contracts_inside() {
        for z in [c(0.2, 0.1), c(-0.5, 0.3), c(0.0, -0.7)] {
            let ratio = mu_ratio(&HyperbolicGeodesics, z, c(0.3, 0.1)).unwrap();
            assert!(ratio.norm() < 1.0);
            let expected = (z * z - c(0.3, 0.1).powi(2)) / (c(1.0, 0.0) - c(0.3, 0.1).powi(2) * z.conj().powi(2));
            assert!((ratio - expected).norm() < 1e-14);
        }
    }

    #[test]
    fn lines_jacobian_values() {
        let value = jacobian_ds(&EuclideanLines, c(0.1, 0.2), c(0.5, 0.0)).unwrap();
        assert!((value - 0.9375).abs() < 1e-14);
        let boundary = jacobian_ds(&EuclideanLines, c(0.1, 0.2), Cx::from_polar(1.0, 0.4)).unwrap();
        assert!(boundary.abs() < 1e-15);
        let hyperbolic = jacobian_ds(
            &HyperbolicGeodesics,
            c(0.1, 0.0),
            Cx::from_polar(0.7, std::f64::consts::FRAC_PI_3),
        )
        .unwrap();
        assert!(hyperbolic > 0.0);
    }

    #[test]
    fn singular_lambda_is_rejected() {
        assert!(matches!(
            eval_coeffs(&EuclideanLines, c(0.0, 0.0), c(1e-15, 0.0)),
            Err(Error::SingularLambda(_))
        ));
        assert!(matches!(
            eval_coeffs(&EuclideanLines, c(1.0, 0.0), c(0.5, 0.0)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn degenerate_rho_is_reported() {
        // ρ = B/λ vanishes for the hyperbolic family where λ z̄ = ±1, i.e. outside the unit λ-disc.
        let z = c(0.5, 0.0);
        let err = mu_ratio(&HyperbolicGeodesics, z, c(2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::DegenerateField(_)));
    }

    #[test]
    fn log_derivative_matches_difference_quotient() {
        let z = c(0.3, -0.2);
        let lambda = c(0.4, 0.25);
        let (ratio, log_derivative) = ratio_with_log_derivative(&HyperbolicGeodesics, z, lambda).unwrap();
        let step = 1e-6;
        let forward = mu_ratio(&HyperbolicGeodesics, z, lambda + c(step, 0.0)).unwrap();
        let backward = mu_ratio(&HyperbolicGeodesics, z, lambda - c(step, 0.0)).unwrap();
        let numeric = (forward - backward) / (2.0 * step) / ratio;
        assert!((numeric - log_derivative).norm() < 1e-8);
    }

    #[test]
    fn disc_point_classification() {
        assert!(DiscPoint::interior(0.6, 0.8).is_err());
        let boundary = DiscPoint::from_complex(c(0.6, 0.8)).unwrap();
        assert!(boundary.on_boundary);
        assert!(!DiscPoint::from_complex(c(0.1, 0.1)).unwrap().on_boundary);
        assert!(DiscPoint::<f64>::from_complex(c(1.1, 0.0)).is_err());
        assert!(DiscPoint::boundary(0.3_f64).on_boundary);
    }

    #[test]
    fn family_lookup() {
        assert_eq!(family_by_name::<f64>("euclidean-lines").unwrap().name(), "euclidean-lines");
        assert!(matches!(family_by_name::<f64>("spirals"), Err(Error::UnknownFamily(_))));
    }
}
