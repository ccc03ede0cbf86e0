//! Ray, beam and attenuated transforms by trapezoid quadrature along curves.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{require_interior, CurveFamily};
use crate::phantom::Density;
use crate::quadrature::trapezoid;
use crate::scalar::{unit, Cx, Real};
use crate::transforms::{SGrid, Sinogram, SinogramKind, DEFAULT_T_INTERVALS};

fn check_support<T: Real, D: Density<T> + ?Sized>(density: &D, grid: &SGrid<T>, label: &str) -> Result<()> {
    if density.support_radius() > grid.cover_radius() {
        return Err(Error::SupportViolation(format!(
            "{label} support radius {} exceeds the integration disc {}",
            density.support_radius(),
            grid.cover_radius()
        )));
    }
    Ok(())
}

/// Trapezoid nodes of the base curve with transverse parameter `s` inside the
/// cover disc, with their spacing. Empty when the curve misses the disc.
fn curve_nodes<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, s: T, grid: &SGrid<T>) -> Result<(Vec<Cx<T>>, T)> {
    let Some((lo, hi)) = family.t_limits(s, grid.cover_radius()) else {
        return Ok((Vec::new(), T::zero()));
    };
    let intervals = grid.t_intervals();
    let step = (hi - lo) / T::from_count(intervals);
    let nodes = (0..=intervals)
        .map(|m| family.curve(lo + step * T::from_count(m), s))
        .collect::<Result<Vec<_>>>()?;
    Ok((nodes, step))
}

/// Assembles per-`s` columns into row-major `(θ, s)` order.
fn transpose<T: Real>(columns: Vec<Vec<T>>, ntheta: usize) -> Vec<T> {
    let ns = columns.len();
    let mut values = vec![T::zero(); ntheta * ns];
    for (j, column) in columns.into_iter().enumerate() {
        for (k, value) in column.into_iter().enumerate() {
            values[k * ns + j] = value;
        }
    }
    values
}

/// Ray transform `(I_θ f)(s) = ∫ f(e^{iθ}·curve(t, s)) dt` on every grid node.
///
/// # Errors
/// `SupportViolation` if `f` is not supported inside the grid's cover disc.
pub fn ray_transform<T: Real, D: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    f: &D,
    family: &F,
    grid: &SGrid<T>,
) -> Result<Sinogram<T>> {
    check_support(f, grid, "density")?;
    let ntheta = grid.ntheta();
    let columns = grid
        .s_nodes()
        .par_iter()
        .map(|&s| -> Result<Vec<T>> {
            let (nodes, step) = curve_nodes(family, s, grid)?;
            if nodes.is_empty() {
                return Ok(vec![T::zero(); ntheta]);
            }
            let mut samples = vec![T::zero(); nodes.len()];
            Ok(grid
                .thetas()
                .iter()
                .map(|&theta| {
                    let rotation = unit(theta);
                    for (sample, &point) in samples.iter_mut().zip(&nodes) {
                        *sample = f.value(rotation * point);
                    }
                    trapezoid(&samples, step)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Sinogram::new(grid.clone(), transpose(columns, ntheta), SinogramKind::Plain, family.name())
}

/// Attenuated ray transform `∫ f·exp(D_θ a) dt` along every grid curve.
///
/// `D_θ a` at each node is `cum − total/2`, where `cum` is the running
/// trapezoid integral of `a` along the same curve and `total` its full value.
///
/// # Errors
/// `SupportViolation` if `f` or `a` is not supported inside the cover disc.
pub fn attenuated_ray_transform<T: Real, D: Density<T> + ?Sized, A: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    f: &D,
    a: &A,
    family: &F,
    grid: &SGrid<T>,
) -> Result<Sinogram<T>> {
    check_support(f, grid, "density")?;
    check_support(a, grid, "attenuation")?;
    let ntheta = grid.ntheta();
    let half = T::lit(0.5);
    let columns = grid
        .s_nodes()
        .par_iter()
        .map(|&s| -> Result<Vec<T>> {
            let (nodes, step) = curve_nodes(family, s, grid)?;
            if nodes.is_empty() {
                return Ok(vec![T::zero(); ntheta]);
            }
            let count = nodes.len();
            let mut attenuation = vec![T::zero(); count];
            let mut running = vec![T::zero(); count];
            let mut samples = vec![T::zero(); count];
            Ok(grid
                .thetas()
                .iter()
                .map(|&theta| {
                    let rotation = unit(theta);
                    for (value, &point) in attenuation.iter_mut().zip(&nodes) {
                        *value = a.value(rotation * point);
                    }
                    for m in 1..count {
                        running[m] = running[m - 1] + (attenuation[m - 1] + attenuation[m]) * step * half;
                    }
                    let total = running[count - 1];
                    for m in 0..count {
                        let weight = (running[m] - total * half).exp();
                        samples[m] = f.value(rotation * nodes[m]) * weight;
                    }
                    trapezoid(&samples, step)
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;
    Sinogram::new(
        grid.clone(),
        transpose(columns, ntheta),
        SinogramKind::Attenuated,
        family.name(),
    )
}

/// Symmetrized beam transform `(D_θ ψ)(z)` with the default resolution.
pub fn beam_transform<T: Real, D: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    psi: &D,
    family: &F,
    z: Cx<T>,
    theta: T,
) -> Result<T> {
    beam_transform_with(psi, family, z, theta, DEFAULT_T_INTERVALS)
}

/// Half the difference between the integrals of `ψ` behind and ahead of `z`
/// along the `θ`-rotated curve through `z`, each by an `intervals`-panel
/// trapezoid rule.
///
/// # Errors
/// `Domain` if `z` is not interior; errors of the family's curve evaluation.
pub fn beam_transform_with<T: Real, D: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    psi: &D,
    family: &F,
    z: Cx<T>,
    theta: T,
    intervals: usize,
) -> Result<T> {
    require_interior(z)?;
    let rotation = unit(theta);
    let base = z * rotation.conj();
    let s = family.transverse(base)?;
    let t = family.along(base)?;
    let radius = psi.support_radius();
    if !(radius > T::zero()) {
        return Ok(T::zero());
    }
    let Some((lo, hi)) = family.t_limits(s, radius) else {
        return Ok(T::zero());
    };
    let piece = |from: T, to: T| -> Result<T> {
        if !(to > from) {
            return Ok(T::zero());
        }
        let step = (to - from) / T::from_count(intervals);
        let samples = (0..=intervals)
            .map(|m| Ok(psi.value(rotation * family.curve(from + step * T::from_count(m), s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(trapezoid(&samples, step))
    };
    let behind = piece(lo, t.min(hi))?;
    let ahead = piece(t.max(lo), hi)?;
    Ok((behind - ahead) * T::lit(0.5))
}
