//! Sampled scalar fields and the directional derivatives `X_λ`, `X⊥_λ` at `|λ| = 1`.

use crate::error::{Error, Result};
use crate::geometry::{eval_coeffs, ComplexifiedCoeffs, CurveFamily};
use crate::scalar::{unit, Cx, Real};

/// Real scalar field sampled on a uniform Cartesian grid.
#[derive(Clone, Debug)]
pub struct SampledField<T> {
    origin: Cx<T>,
    spacing: T,
    nx: usize,
    ny: usize,
    values: Vec<T>,
}

impl<T: Real> SampledField<T> {
    /// Samples `field` at `origin + spacing·(ix + i·iy)` for `ix < nx`, `iy < ny`.
    pub fn from_fn<F: FnMut(Cx<T>) -> T>(origin: Cx<T>, spacing: T, nx: usize, ny: usize, mut field: F) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in 0..ny {
            for ix in 0..nx {
                values.push(field(origin + Cx::new(T::from_count(ix), T::from_count(iy)) * spacing));
            }
        }
        Self {
            origin,
            spacing,
            nx,
            ny,
            values,
        }
    }

    /// Square patch of `(2·half_width + 1)²` nodes centred on `center`.
    pub fn around<F: FnMut(Cx<T>) -> T>(center: Cx<T>, spacing: T, half_width: usize, field: F) -> Self {
        let offset = T::from_count(half_width) * spacing;
        let side = 2 * half_width + 1;
        Self::from_fn(center - Cx::new(offset, offset), spacing, side, side, field)
    }

    pub fn spacing(&self) -> T {
        self.spacing
    }

    pub fn value_at(&self, ix: usize, iy: usize) -> T {
        self.values[iy * self.nx + ix]
    }

    fn node_of(&self, z: Cx<T>) -> Result<(usize, usize)> {
        let position = (z - self.origin) / self.spacing;
        let (fx, fy) = (position.re.round(), position.im.round());
        let snap = T::lit(1e-6);
        if (position.re - fx).abs() > snap || (position.im - fy).abs() > snap {
            return Err(Error::Domain(format!("{z} is not a node of the sampled grid")));
        }
        if fx < T::zero() || fy < T::zero() {
            return Err(Error::GridBoundary);
        }
        let (ix, iy) = (fx.to_usize().unwrap_or(usize::MAX), fy.to_usize().unwrap_or(usize::MAX));
        if ix >= self.nx || iy >= self.ny {
            return Err(Error::GridBoundary);
        }
        Ok((ix, iy))
    }

    /// Fourth-order centred gradient `(∂_x u, ∂_y u)` at the node nearest to `z`.
    ///
    /// # Errors
    /// `GridBoundary` when the five-point stencil leaves the grid.
    pub fn gradient(&self, z: Cx<T>) -> Result<(T, T)> {
        let (ix, iy) = self.node_of(z)?;
        if ix < 2 || iy < 2 || ix + 2 >= self.nx || iy + 2 >= self.ny {
            return Err(Error::GridBoundary);
        }
        let along_x = [-2isize, -1, 1, 2].map(|d| self.value_at((ix as isize + d) as usize, iy));
        let along_y = [-2isize, -1, 1, 2].map(|d| self.value_at(ix, (iy as isize + d) as usize));
        Ok((
            five_point(along_x, self.spacing),
            five_point(along_y, self.spacing),
        ))
    }
}

/// Derivative from samples at offsets −2h, −h, h, 2h.
#[inline]
pub(crate) fn five_point<T: Real>(samples: [T; 4], spacing: T) -> T {
    (samples[0] - samples[1] * T::lit(8.0) + samples[2] * T::lit(8.0) - samples[3]) / (spacing * T::lit(12.0))
}

/// `(X u, X⊥ u)` from the Cartesian gradient of a real field:
/// `X u = ξ∂_z u + ρ∂_z̄ u`, `X⊥ u = i(−ξ∂_z u + ρ∂_z̄ u)`.
pub fn directional_derivatives<T: Real>(coeffs: &ComplexifiedCoeffs<T>, ux: T, uy: T) -> (Cx<T>, Cx<T>) {
    let half = T::lit(0.5);
    let dz = Cx::new(ux * half, -uy * half);
    let dzbar = dz.conj();
    let along = coeffs.xi * dz + coeffs.rho * dzbar;
    let across = Cx::new(T::zero(), T::one()) * (coeffs.rho * dzbar - coeffs.xi * dz);
    (along, across)
}

/// `X_θ u` at the grid node `z`.
pub fn apply_x<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    field: &SampledField<T>,
    z: Cx<T>,
    theta: T,
) -> Result<Cx<T>> {
    let (ux, uy) = field.gradient(z)?;
    let coeffs = eval_coeffs(family, z, unit(theta))?;
    Ok(directional_derivatives(&coeffs, ux, uy).0)
}

/// `X⊥_θ u` at the grid node `z`.
pub fn apply_x_perp<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    field: &SampledField<T>,
    z: Cx<T>,
    theta: T,
) -> Result<Cx<T>> {
    let (ux, uy) = field.gradient(z)?;
    let coeffs = eval_coeffs(family, z, unit(theta))?;
    Ok(directional_derivatives(&coeffs, ux, uy).1)
}
