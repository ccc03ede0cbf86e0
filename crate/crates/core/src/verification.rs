//! Numerical oracles for the complexified transport problem.
//!
//! For `|λ| ≠ 1` the solution of `X_λ u = f` is `u(z, λ) = ∫ G_λ(z; z₀) f(z₀) dμ(z₀)`
//! with the Green's function
//! `G_λ(z; z₀) = sign(1 − |λ|) · s_z(z₀, λ) / (π ρ(z₀, λ) (s(z, λ) − s(z₀, λ)))`.
//! The routines here evaluate `u` by quadrature and test what should hold of it:
//! holomorphy in `λ`, the transport equation, and the boundary values as `|λ| → 1`.

use std::cell::Cell;

use crate::error::{Error, Result};
use crate::geometry::{eval_coeffs, find_zeros, Coefficient, ContourOptions, CurveFamily, DiscPoint, Jet};
use crate::phantom::{Density, FnDensity, Phantom};
use crate::quadrature::{circle_mean, integrate_adaptive, Integral, Tolerance};
use crate::scalar::{imag_unit, real, unit, Cx, Real};
use crate::spline::NaturalSpline;
use crate::transforms::{beam_transform, hilbert_s, ray_transform, SGrid};

/// Smallest `|s(z, λ) − s(z₀, λ)|` accepted off the diagonal.
const CHARACTERISTIC_FLOOR: f64 = 1e-13;
/// Closest approach of `λ` to the unit circle and to the origin.
const LAMBDA_MARGIN: f64 = 0.02;
/// Boundary-limit step sizes, coarse to fine.
const EPSILONS: [f64; 5] = [0.08, 0.04, 0.02, 0.01, 0.005];

/// One evaluation of the Green's function.
#[derive(Clone, Copy, Debug)]
pub struct GreensEval<T> {
    pub z: DiscPoint<T>,
    pub z0: DiscPoint<T>,
    pub lambda: Cx<T>,
    pub value: Cx<T>,
}

fn sign_of_branch<T: Real>(lambda: Cx<T>) -> Result<T> {
    let modulus = lambda.norm();
    if (modulus - T::one()).abs() < T::lit(1e-14) {
        return Err(Error::Domain("the Green's function is undefined on |lambda| = 1".into()));
    }
    Ok(if modulus < T::one() { T::one() } else { -T::one() })
}

/// `G_λ(z; z₀)`.
///
/// # Errors
/// `OnCharacteristic` when `|s(z, λ) − s(z₀, λ)| < 1e-13`; `Domain` for
/// `|λ| = 1` or points outside the disc; `SingularLambda` for `λ ≈ 0`.
pub fn greens_eval<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    z0: Cx<T>,
    lambda: Cx<T>,
) -> Result<GreensEval<T>> {
    let value = greens_value(family, z, z0, lambda)?;
    Ok(GreensEval {
        z: DiscPoint::from_complex(z)?,
        z0: DiscPoint::from_complex(z0)?,
        lambda,
        value,
    })
}

fn greens_value<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, z: Cx<T>, z0: Cx<T>, lambda: Cx<T>) -> Result<Cx<T>> {
    let sign = sign_of_branch(lambda)?;
    let at_source = eval_coeffs(family, z0, lambda)?;
    let at_target = eval_coeffs(family, z, lambda)?;
    greens_from(sign, at_target.s_lambda, &at_source)
}

fn greens_from<T: Real>(sign: T, s_target: Cx<T>, at_source: &crate::geometry::ComplexifiedCoeffs<T>) -> Result<Cx<T>> {
    let gap = s_target - at_source.s_lambda;
    if gap.norm() < T::lit(CHARACTERISTIC_FLOOR) {
        return Err(Error::OnCharacteristic(gap.norm().as_f64()));
    }
    Ok(at_source.ds_dz / at_source.rho / (gap * T::PI()) * sign)
}

/// Accuracy of [`solve_u`].
#[derive(Clone, Copy, Debug)]
pub struct SolveOptions<T> {
    pub tolerance: Tolerance<T>,
}

impl<T: Real> Default for SolveOptions<T> {
    fn default() -> Self {
        let mut tolerance = Tolerance::new(T::lit(1e-13), T::lit(1e-10));
        tolerance.max_intervals = 2000;
        Self { tolerance }
    }
}

/// `u(z, λ) = ∫ G_λ(z; z₀) f(z₀) dμ(z₀)` with default accuracy.
pub fn solve_u<T: Real, F: CurveFamily<T> + ?Sized>(f: &Phantom<T>, family: &F, z: Cx<T>, lambda: Cx<T>) -> Result<Cx<T>> {
    solve_u_with(f, family, z, lambda, &SolveOptions::default())
}

/// `u(z, λ)` by nested adaptive Gauss–Kronrod quadrature in polar coordinates
/// about `z`, one bump at a time. The factor `r` of the area element cancels
/// the `1/|z − z₀|` singularity of the kernel, so every integral is proper.
///
/// # Errors
/// As [`greens_eval`]; `OnCharacteristic` only if a node still hits the
/// singular set after one retry with rotated angular nodes.
pub fn solve_u_with<T: Real, F: CurveFamily<T> + ?Sized>(
    f: &Phantom<T>,
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
    options: &SolveOptions<T>,
) -> Result<Cx<T>> {
    let sign = sign_of_branch(lambda)?;
    let s_target = eval_coeffs(family, z, lambda)?.s_lambda;
    let mut total = Cx::new(T::zero(), T::zero());
    for (centre, cutoff, bump) in f.components() {
        let attempt = |twist: T| polar_integral(&bump, family, z, lambda, sign, s_target, centre, cutoff, twist, options);
        total = total
            + match attempt(T::zero()) {
                Err(Error::OnCharacteristic(_)) => attempt(T::PI() / T::lit(997.0))?,
                other => other?,
            };
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn polar_integral<T: Real, F: CurveFamily<T> + ?Sized>(
    bump: &Phantom<T>,
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
    sign: T,
    s_target: Cx<T>,
    centre: Cx<T>,
    cutoff: T,
    twist: T,
    options: &SolveOptions<T>,
) -> Result<Cx<T>> {
    let offset = centre - z;
    let distance = offset.norm();
    let inside = distance < cutoff;
    // Angular range of rays from z that meet the bump's disc.
    let (phi_lo, phi_hi) = if inside {
        (twist, twist + T::TAU())
    } else {
        let half_width = (cutoff / distance).min(T::one()).asin();
        (offset.arg() - half_width, offset.arg() + half_width)
    };
    let failure: Cell<Option<Error>> = Cell::new(None);
    let record = |error: Error| {
        let previous = failure.take();
        failure.set(previous.or(Some(error)));
    };
    let zero = Cx::new(T::zero(), T::zero());
    let outer = integrate_adaptive(
        |phi: T| {
            let direction = unit(phi);
            let along = (direction.conj() * offset).re;
            let reach = (along * along + cutoff * cutoff - distance * distance).max(T::zero()).sqrt();
            let (r_lo, r_hi) = if inside {
                (T::zero(), along + reach)
            } else {
                ((along - reach).max(T::zero()), along + reach)
            };
            if !(r_hi > r_lo) {
                return zero;
            }
            let inner: Integral<T> = integrate_adaptive(
                |r: T| {
                    let source = z + direction * r;
                    let density = bump.eval(source);
                    if density == T::zero() {
                        return zero;
                    }
                    match eval_coeffs(family, source, lambda).and_then(|c| greens_from(sign, s_target, &c)) {
                        Ok(kernel) => kernel * (density * r),
                        Err(error) => {
                            record(error);
                            zero
                        }
                    }
                },
                r_lo,
                r_hi,
                options.tolerance,
            );
            inner.value
        },
        phi_lo,
        phi_hi,
        options.tolerance,
    );
    match failure.take() {
        Some(error) => Err(error),
        None => Ok(outer.value),
    }
}

/// `|g(λ₀) − (1/2πi)∮ g(λ)/(λ − λ₀) dλ|` on `nodes` points of `|λ − λ₀| = radius`.
pub fn cauchy_residual<T: Real, G>(mut g: G, lambda0: Cx<T>, radius: T, nodes: usize) -> Result<T>
where
    G: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let centre = g(lambda0)?;
    let failure: Cell<Option<Error>> = Cell::new(None);
    let mean = circle_mean(
        |lambda| {
            g(lambda).unwrap_or_else(|error| {
                let previous = failure.take();
                failure.set(previous.or(Some(error)));
                Cx::new(T::zero(), T::zero())
            })
        },
        lambda0,
        radius,
        nodes,
    );
    match failure.take() {
        Some(error) => Err(error),
        None => Ok((centre - mean).norm()),
    }
}

/// Checks that the circle `|λ − λ₀| = radius` keeps clear of `λ = 0` and of the unit circle.
pub fn require_admissible_circle<T: Real>(lambda0: Cx<T>, radius: T) -> Result<()> {
    let modulus = lambda0.norm();
    let margin = T::lit(LAMBDA_MARGIN);
    let clear_of_origin = modulus - radius >= margin;
    let clear_of_circle = modulus + radius <= T::one() - margin || modulus - radius >= T::one() + margin;
    if radius > T::zero() && clear_of_origin && clear_of_circle {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "circle of radius {radius} about |lambda0| = {modulus} meets lambda = 0 or |lambda| = 1"
        )))
    }
}

/// Cauchy self-consistency of `λ ↦ u(z, λ)` on a 64-node circle.
///
/// # Errors
/// `Domain` if the circle leaves `{0.02 ≤ |λ| ≤ 0.98} ∪ {|λ| ≥ 1.02}`.
pub fn holomorphy_residual<T: Real, F: CurveFamily<T> + ?Sized>(
    f: &Phantom<T>,
    family: &F,
    z: Cx<T>,
    lambda0: Cx<T>,
    radius: T,
) -> Result<T> {
    require_admissible_circle(lambda0, radius)?;
    cauchy_residual(|lambda| solve_u(f, family, z, lambda), lambda0, radius, 64)
}

/// `|X_λ u − f(z)|` with `X_λ = ξ∂_z + ρ∂_z̄` applied to [`solve_u`] by fourth-order
/// central differences of step `step`.
pub fn transport_residual<T: Real, F: CurveFamily<T> + ?Sized>(
    f: &Phantom<T>,
    family: &F,
    z: Cx<T>,
    lambda: Cx<T>,
    step: T,
) -> Result<T> {
    let (dz, dzbar) = wirtinger(|w| solve_u(f, family, w, lambda), z, step)?;
    let coeffs = eval_coeffs(family, z, lambda)?;
    Ok((coeffs.xi * dz + coeffs.rho * dzbar - real(f.eval(z))).norm())
}

/// `(∂_z g, ∂_z̄ g)` of a complex field by fourth-order central differences.
pub fn wirtinger<T: Real, G>(mut g: G, z: Cx<T>, step: T) -> Result<(Cx<T>, Cx<T>)>
where
    G: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let mut derivative = |direction: Cx<T>| -> Result<Cx<T>> {
        let at = |k: T| z + direction * (step * k);
        let samples = [g(at(-T::lit(2.0)))?, g(at(-T::one()))?, g(at(T::one()))?, g(at(T::lit(2.0)))?];
        Ok((samples[0] - samples[1] * T::lit(8.0) + samples[2] * T::lit(8.0) - samples[3]) / (step * T::lit(12.0)))
    };
    let along_x = derivative(Cx::new(T::one(), T::zero()))?;
    let along_y = derivative(Cx::new(T::zero(), T::one()))?;
    let half = T::lit(0.5);
    let i = imag_unit::<T>();
    Ok(((along_x - i * along_y) * half, (along_x + i * along_y) * half))
}

/// Boundary values of `u` at `λ = e^{iθ}` from inside (`u_plus`) and outside
/// (`u_minus`), next to the values they should take.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryPair<T> {
    pub u_plus: Cx<T>,
    pub u_minus: Cx<T>,
    /// Smallest `ε` used in `λ = (1 ∓ ε) e^{iθ}`.
    pub epsilon_used: T,
    /// Difference between the last two extrapolants, worst of both sides.
    pub extrapolation_gap: T,
    /// `H(I_θ f)(s(z e^{−iθ}))`.
    pub hilbert_term: T,
    /// `(D_θ f)(z)`.
    pub beam_term: T,
}

impl<T: Real> BoundaryPair<T> {
    /// `(i/2)·H(I_θ f) + D_θ f`.
    pub fn predicted_plus(&self) -> Cx<T> {
        Cx::new(self.beam_term, self.hilbert_term * T::lit(0.5))
    }

    /// `−(i/2)·H(I_θ f) + D_θ f`.
    pub fn predicted_minus(&self) -> Cx<T> {
        Cx::new(self.beam_term, -self.hilbert_term * T::lit(0.5))
    }

    /// `i·H(I_θ f)`, the value the jump `u_plus − u_minus` should take.
    pub fn predicted_jump(&self) -> Cx<T> {
        Cx::new(T::zero(), self.hilbert_term)
    }

    /// Largest deviation among `u_plus`, `u_minus` and the jump from their predictions.
    pub fn worst_deviation(&self) -> T {
        let plus = (self.u_plus - self.predicted_plus()).norm();
        let minus = (self.u_minus - self.predicted_minus()).norm();
        let jump = (self.u_plus - self.u_minus - self.predicted_jump()).norm();
        plus.max(minus).max(jump)
    }
}

/// Extrapolates `u((1 ∓ ε)e^{iθ})` to `ε → 0` from values at halving steps,
/// assuming an expansion in integer powers of `ε`. Returns the top of the
/// Richardson table and its distance to the finest entry one level below.
fn richardson<T: Real>(values: &[Cx<T>]) -> (Cx<T>, T) {
    let mut column = values.to_vec();
    let mut previous = column[column.len() - 1];
    let mut factor = T::one();
    while column.len() > 1 {
        factor = factor * T::lit(2.0);
        previous = column[column.len() - 1];
        column = column
            .windows(2)
            .map(|pair| (pair[1] * factor - pair[0]) / (factor - T::one()))
            .collect();
    }
    (column[0], (column[0] - previous).norm())
}

/// `H(I_θ f)` at `s(z e^{−iθ})`, from a single-angle sinogram of the rotated density.
fn hilbert_of_ray_transform<T: Real, F: CurveFamily<T> + ?Sized>(f: &Phantom<T>, family: &F, z: Cx<T>, theta: T) -> Result<T> {
    let rotation = unit(theta);
    let support = f.support_radius().as_f64();
    let cover = support + (1.0 - support) / 2.0;
    let rotated = FnDensity::new(|w: Cx<T>| f.eval(w * rotation), support);
    let (s_lo, s_hi) = family.s_range(T::lit(cover));
    let grid = SGrid::new(4, 2049, s_lo, s_hi, 2048, T::lit(cover))?;
    let sino = ray_transform(&rotated, family, &grid)?;
    let filtered = hilbert_s(&sino)?;
    let spline = NaturalSpline::new(grid.s_lo(), grid.s_step(), filtered.row(0).to_vec())?;
    let s = family.transverse(z * rotation.conj())?;
    spline
        .value(s)
        .ok_or_else(|| Error::SupportViolation(format!("transverse coordinate {s} outside the sampled range")))
}

/// Richardson-extrapolated boundary values of [`solve_u`] at `λ = e^{iθ}`.
///
/// # Errors
/// `NonConvergent` if the last two extrapolants differ by more than
/// `1e-2·‖f‖∞`; errors of [`solve_u`] otherwise.
pub fn boundary_limits<T: Real, F: CurveFamily<T> + ?Sized>(
    f: &Phantom<T>,
    family: &F,
    z: Cx<T>,
    theta: T,
) -> Result<BoundaryPair<T>> {
    let direction = unit(theta);
    let side = |outside: bool| -> Result<[Cx<T>; EPSILONS.len()]> {
        let mut values = [Cx::new(T::zero(), T::zero()); EPSILONS.len()];
        for (slot, &epsilon) in values.iter_mut().zip(&EPSILONS) {
            let modulus = if outside { 1.0 + epsilon } else { 1.0 - epsilon };
            *slot = solve_u(f, family, z, direction * T::lit(modulus))?;
        }
        Ok(values)
    };
    let (u_plus, gap_plus) = richardson(&side(false)?);
    let (u_minus, gap_minus) = richardson(&side(true)?);
    let gap = gap_plus.max(gap_minus);
    let limit = T::lit(10.0 * 1e-3) * f.peak();
    if gap > limit {
        return Err(Error::NonConvergent {
            gap: gap.as_f64(),
            limit: limit.as_f64(),
        });
    }
    Ok(BoundaryPair {
        u_plus,
        u_minus,
        epsilon_used: T::lit(EPSILONS[EPSILONS.len() - 1]),
        extrapolation_gap: gap,
        hilbert_term: hilbert_of_ray_transform(f, family, z, theta)?,
        beam_term: beam_transform(f, family, z, theta)?,
    })
}

/// `u(z, λ_k)` for the attenuation `a` at each zero `λ_k` of `ξ/ρ(z, ·)`.
///
/// The attenuated inversion additionally needs these values to vanish. Zeros
/// closer than 0.02 to the origin are evaluated by the Cauchy integral over
/// `|λ| = 0.3`, relying on the removable singularity of `u` at `λ = 0`.
pub fn attenuation_assumption<T: Real, F: CurveFamily<T> + ?Sized>(
    a: &Phantom<T>,
    family: &F,
    z: Cx<T>,
) -> Result<Vec<(Cx<T>, Cx<T>)>> {
    let zeros = find_zeros(family, z, &ContourOptions::default())?;
    zeros
        .zeros
        .iter()
        .map(|&(lambda, _)| {
            let value = if lambda.norm() >= T::lit(LAMBDA_MARGIN) {
                solve_u(a, family, z, lambda)?
            } else {
                cauchy_value(|mu| solve_u(a, family, z, mu), lambda, T::lit(0.3), 64)?
            };
            Ok((lambda, value))
        })
        .collect()
}

/// `(1/2πi)∮_{|λ| = radius} g(λ)/(λ − target) dλ` by the trapezoid rule.
fn cauchy_value<T: Real, G>(mut g: G, target: Cx<T>, radius: T, nodes: usize) -> Result<Cx<T>>
where
    G: FnMut(Cx<T>) -> Result<Cx<T>>,
{
    let step = T::TAU() / T::from_count(nodes);
    let mut sum = Cx::new(T::zero(), T::zero());
    for k in 0..nodes {
        let lambda = Cx::from_polar(radius, step * T::from_count(k));
        sum = sum + g(lambda)? * lambda / (lambda - target);
    }
    Ok(sum / T::from_count(nodes))
}

/// Negative control: the lines family with `B(w1, w2) = conj(w1)/w2`.
///
/// On `|λ| = 1` this is the lines field, but the conjugation breaks
/// holomorphy in `λ`, so the Green's-function solution is not holomorphic.
#[derive(Clone, Copy, Debug, Default)]
pub struct NonHolomorphicControl;

impl NonHolomorphicControl {
    pub const NAME: &'static str = "non-holomorphic-control";
}

impl<T: Real> CurveFamily<T> for NonHolomorphicControl {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn polarized(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Cx<T>> {
        Ok(self.polarized_jet(which, w1, w2)?.value)
    }

    fn polarized_jet(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        match which {
            Coefficient::B => {
                if w2.norm() < T::lit(1e-14) {
                    return Err(Error::Domain("w2 = 0 in the control field".into()));
                }
                Ok(Jet {
                    value: w1.conj() / w2,
                    d1: Cx::new(T::zero(), T::zero()),
                    d2: -w1.conj() / (w2 * w2),
                })
            }
            other => crate::geometry::EuclideanLines.polarized_jet(other, w1, w2),
        }
    }

    fn curve(&self, t: T, s: T) -> Result<Cx<T>> {
        crate::geometry::EuclideanLines.curve(t, s)
    }

    fn transverse(&self, z: Cx<T>) -> Result<T> {
        crate::geometry::EuclideanLines.transverse(z)
    }

    fn along(&self, z: Cx<T>) -> Result<T> {
        crate::geometry::EuclideanLines.along(z)
    }

    fn s_range(&self, radius: T) -> (T, T) {
        (-radius, radius)
    }

    fn t_limits(&self, s: T, radius: T) -> Option<(T, T)> {
        crate::geometry::EuclideanLines.t_limits(s, radius)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EuclideanLines, HyperbolicGeodesics};
    use crate::phantom::{BumpSpec, PhantomSpec};

    fn smooth_phantom() -> Phantom<f64> {
        Phantom::from_spec(PhantomSpec {
            delta: 0.05,
            bumps: vec![
                BumpSpec::mollifier([0.1, -0.05], 0.45, 1.0),
                BumpSpec::mollifier([-0.3, 0.2], 0.3, 0.5),
            ],
        })
        .unwrap()
    }

    #[test]
    fn lines_kernel_depends_only_on_the_s_difference() {
        let lambda = Cx::new(0.3, 0.2);
        let shift = Cx::new(0.11, -0.07);
        let first = greens_eval(&EuclideanLines, Cx::new(0.1, 0.2), Cx::new(-0.2, 0.1), lambda).unwrap();
        let second = greens_eval(&EuclideanLines, Cx::new(0.1, 0.2) + shift, Cx::new(-0.2, 0.1) + shift, lambda).unwrap();
        assert!((first.value - second.value).norm() < 1e-12 * first.value.norm());
        assert!(matches!(
            greens_eval(&EuclideanLines, Cx::new(0.1, 0.2), Cx::new(0.1, 0.2), lambda),
            Err(Error::OnCharacteristic(_))
        ));
        assert!(matches!(
            greens_eval(&EuclideanLines, Cx::new(0.1, 0.2), Cx::new(0.0, 0.0), unit(0.3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn branch_sign_flips_across_the_circle() {
        assert_eq!(sign_of_branch(Cx::new(0.5, 0.0)).unwrap(), 1.0);
        assert_eq!(sign_of_branch(Cx::new(0.0, 2.0)).unwrap(), -1.0);
    }

    #[test]
    fn zero_density_gives_zero() {
        let zero = Phantom::<f64>::zero();
        assert_eq!(solve_u(&zero, &EuclideanLines, Cx::new(0.1, 0.0), Cx::new(0.4, 0.1)).unwrap(), Cx::new(0.0, 0.0));
        assert_eq!(
            holomorphy_residual(&zero, &EuclideanLines, Cx::new(0.1, 0.0), Cx::new(0.5, 0.0), 0.2).unwrap(),
            0.0
        );
    }

    #[test]
    fn solution_is_linear_in_the_density() {
        let f = smooth_phantom();
        let doubled = f.scaled(2.0).unwrap();
        let (z, lambda) = (Cx::new(0.2, 0.1), Cx::new(0.3, -0.4));
        let single = solve_u(&f, &HyperbolicGeodesics, z, lambda).unwrap();
        let double = solve_u(&doubled, &HyperbolicGeodesics, z, lambda).unwrap();
        assert!((double - single * 2.0).norm() < 1e-12 * single.norm());
    }

    #[test]
    fn solution_solves_the_transport_equation() {
        let f = smooth_phantom();
        for (z, lambda) in [(Cx::new(0.1, 0.1), Cx::new(0.5, 0.2)), (Cx::new(-0.2, 0.3), Cx::new(-1.2, 0.9))] {
            let lines = transport_residual(&f, &EuclideanLines, z, lambda, 1e-3).unwrap();
            let hyperbolic = transport_residual(&f, &HyperbolicGeodesics, z, lambda, 1e-3).unwrap();
            assert!(lines < 1e-3, "lines {lines}");
            assert!(hyperbolic < 1e-3, "hyperbolic {hyperbolic}");
        }
    }

    #[test]
    fn solution_is_holomorphic_but_control_is_not() {
        let f = smooth_phantom();
        let (z, lambda0) = (Cx::new(0.1, -0.1), Cx::new(0.3, 0.2));
        let scale = solve_u(&f, &EuclideanLines, z, lambda0).unwrap().norm();
        let residual = holomorphy_residual(&f, &EuclideanLines, z, lambda0, 0.15).unwrap();
        assert!(residual < 1e-6 * scale, "{residual} vs {scale}");
        let control_scale = solve_u(&f, &NonHolomorphicControl, z, lambda0).unwrap().norm();
        let control = holomorphy_residual(&f, &NonHolomorphicControl, z, lambda0, 0.15).unwrap();
        assert!(control > 1e-2 * control_scale, "{control} vs {control_scale}");
    }

    #[test]
    fn circles_crossing_the_boundary_are_rejected() {
        assert!(require_admissible_circle(Cx::new(0.8, 0.0), 0.3).is_err());
        assert!(require_admissible_circle(Cx::new(0.1, 0.0), 0.2).is_err());
        assert!(require_admissible_circle(Cx::new(0.5, 0.0), 0.2).is_ok());
        assert!(require_admissible_circle(Cx::new(2.0, 0.0), 0.5).is_ok());
    }

    #[test]
    fn lines_zero_at_origin_satisfies_the_attenuation_assumption() {
        let a = smooth_phantom();
        let values = attenuation_assumption(&a, &EuclideanLines, Cx::new(0.2, 0.1)).unwrap();
        assert_eq!(values.len(), 1);
        assert!(values[0].1.norm() < 1e-10);
    }

    #[test]
    fn richardson_removes_polynomial_terms_below_table_depth() {
        let exact = Cx::new(1.0, -2.0);
        let model = |e: f64| exact + Cx::new(0.3, 0.1) * e + Cx::new(-2.0, 0.5) * e * e + Cx::new(4.0, 1.0) * e.powi(4);
        let values: Vec<_> = EPSILONS.iter().map(|&e| model(e)).collect();
        let (value, gap) = richardson(&values);
        assert!((value - exact).norm() < 1e-12);
        assert!(gap < 1e-6);
    }

    #[test]
    fn boundary_values_match_hilbert_and_beam_terms() {
        let f = smooth_phantom();
        for family in [&EuclideanLines as &dyn CurveFamily<f64>, &HyperbolicGeodesics] {
            let pair = boundary_limits(&f, family, Cx::new(0.15, -0.2), 0.7).unwrap();
            assert!(pair.worst_deviation() < 1e-3 * f.peak());
        }
        let zero = boundary_limits(&Phantom::<f64>::zero(), &EuclideanLines, Cx::new(0.1, 0.1), 1.0).unwrap();
        assert_eq!(zero.u_plus, Cx::new(0.0, 0.0));
        assert_eq!(zero.u_minus, Cx::new(0.0, 0.0));
    }
}
