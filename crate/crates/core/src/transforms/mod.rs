//! Forward operators: ray transform, symmetrized beam transform, attenuated
//! ray transform and the Hilbert filters applied in the transverse variable.

mod forward;
mod hilbert;

use serde::{Deserialize, Serialize};

pub use forward::{attenuated_ray_transform, beam_transform, beam_transform_with, ray_transform};
pub use hilbert::{attenuation_phases, build_ha, hilbert_row, hilbert_row_extended, hilbert_s, HilbertFilter};

use crate::error::{Error, Result};
use crate::geometry::CurveFamily;
use crate::scalar::Real;

/// Default number of trapezoid intervals along each curve.
pub const DEFAULT_T_INTERVALS: usize = 1024;

/// Sampling of the `(θ, s)` parameter plane.
#[derive(Clone, Debug, PartialEq)]
pub struct SGrid<T> {
    thetas: Vec<T>,
    s_nodes: Vec<T>,
    s_step: T,
    t_intervals: usize,
    cover_radius: T,
}

impl<T: Real> SGrid<T> {
    /// `ntheta` angles `2πk/ntheta` and `ns` transverse nodes uniform on `[s_lo, s_hi]`.
    /// Curves are integrated inside the disc of radius `cover_radius` with
    /// `t_intervals` trapezoid intervals each.
    ///
    /// # Errors
    /// `InvalidGrid` unless `ntheta ≥ 4` is even, `ns ≥ 9` is odd,
    /// `s_lo < s_hi`, `t_intervals ≥ 2` and `0 < cover_radius ≤ 1`.
    pub fn new(ntheta: usize, ns: usize, s_lo: T, s_hi: T, t_intervals: usize, cover_radius: T) -> Result<Self> {
        if ntheta < 4 || !ntheta.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("ntheta = {ntheta} must be even and at least 4")));
        }
        if ns < 9 || ns.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("ns = {ns} must be odd and at least 9")));
        }
        if !(s_lo < s_hi) || !s_lo.is_finite() || !s_hi.is_finite() {
            return Err(Error::InvalidGrid(format!("s range [{s_lo}, {s_hi}] is empty")));
        }
        if t_intervals < 2 {
            return Err(Error::InvalidGrid("at least two intervals per curve are required".into()));
        }
        if !(cover_radius > T::zero() && cover_radius <= T::one()) {
            return Err(Error::InvalidGrid(format!("cover radius {cover_radius} outside (0, 1]")));
        }
        let theta_step = T::TAU() / T::from_count(ntheta);
        let s_step = (s_hi - s_lo) / T::from_count(ns - 1);
        let middle = (s_lo + s_hi) / T::lit(2.0);
        let centre = (ns - 1) / 2;
        // Nodes mirror exactly about the middle of the range.
        let s_nodes = (0..ns)
            .map(|j| {
                if j >= centre {
                    middle + s_step * T::from_count(j - centre)
                } else {
                    middle - s_step * T::from_count(centre - j)
                }
            })
            .collect();
        Ok(Self {
            thetas: (0..ntheta).map(|k| theta_step * T::from_count(k)).collect(),
            s_nodes,
            s_step,
            t_intervals,
            cover_radius,
        })
    }

    /// Grid covering every curve that meets the disc of radius `1 − δ/2`.
    pub fn for_family<F: CurveFamily<T> + ?Sized>(family: &F, ntheta: usize, ns: usize, delta: T) -> Result<Self> {
        if !(delta > T::zero() && delta < T::one()) {
            return Err(Error::InvalidGrid(format!("delta {delta} outside (0, 1)")));
        }
        let cover = T::one() - delta / T::lit(2.0);
        let (lo, hi) = family.s_range(cover);
        Self::new(ntheta, ns, lo, hi, DEFAULT_T_INTERVALS, cover)
    }

    /// Same grid with a different number of intervals per curve.
    pub fn with_t_intervals(self, t_intervals: usize) -> Result<Self> {
        Self::new(
            self.ntheta(),
            self.ns(),
            self.s_lo(),
            self.s_hi(),
            t_intervals,
            self.cover_radius,
        )
    }

    pub fn ntheta(&self) -> usize {
        self.thetas.len()
    }

    pub fn ns(&self) -> usize {
        self.s_nodes.len()
    }

    pub fn thetas(&self) -> &[T] {
        &self.thetas
    }

    pub fn s_nodes(&self) -> &[T] {
        &self.s_nodes
    }

    pub fn s_lo(&self) -> T {
        self.s_nodes[0]
    }

    pub fn s_hi(&self) -> T {
        self.s_nodes[self.s_nodes.len() - 1]
    }

    pub fn s_step(&self) -> T {
        self.s_step
    }

    pub fn theta_step(&self) -> T {
        T::TAU() / T::from_count(self.ntheta())
    }

    pub fn t_intervals(&self) -> usize {
        self.t_intervals
    }

    pub fn cover_radius(&self) -> T {
        self.cover_radius
    }

    /// True when both grids sample the same `(θ, s)` nodes.
    pub fn same_nodes(&self, other: &Self) -> bool {
        self.ntheta() == other.ntheta()
            && self.ns() == other.ns()
            && self.s_lo() == other.s_lo()
            && self.s_hi() == other.s_hi()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SinogramKind {
    Plain,
    Attenuated,
}

impl SinogramKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SinogramKind::Plain => "plain",
            SinogramKind::Attenuated => "attenuated",
        }
    }
}

/// Sampled ray transform: `values[k·ns + j]` is the integral along the curve
/// with angle `θ_k` and transverse parameter `s_j`.
#[derive(Clone, Debug)]
pub struct Sinogram<T> {
    grid: SGrid<T>,
    values: Vec<T>,
    kind: SinogramKind,
    family: String,
}

impl<T: Real> Sinogram<T> {
    /// # Errors
    /// `InvalidGrid` on a size mismatch; `Format` for non-finite values.
    pub fn new(grid: SGrid<T>, values: Vec<T>, kind: SinogramKind, family: &str) -> Result<Self> {
        if values.len() != grid.ntheta() * grid.ns() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a {}x{} grid",
                values.len(),
                grid.ntheta(),
                grid.ns()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Format("sinogram contains non-finite values".into()));
        }
        Ok(Self {
            grid,
            values,
            kind,
            family: family.to_string(),
        })
    }

    pub fn grid(&self) -> &SGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn kind(&self) -> SinogramKind {
        self.kind
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn row(&self, k: usize) -> &[T] {
        let ns = self.grid.ns();
        &self.values[k * ns..(k + 1) * ns]
    }

    /// `α·self + other`, for linearity checks.
    pub fn combine(&self, alpha: T, other: &Self) -> Result<Self> {
        if !self.grid.same_nodes(&other.grid) || self.family != other.family {
            return Err(Error::GridMismatch("sinograms sample different grids".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| alpha * a + b).collect();
        Self::new(self.grid.clone(), values, self.kind, &self.family)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FilterKind {
    Hilbert,
    Ha,
}

/// Row-wise filtered sinogram, same layout as [`Sinogram`].
#[derive(Clone, Debug)]
pub struct FilteredSinogram<T> {
    grid: SGrid<T>,
    values: Vec<T>,
    filter: FilterKind,
    family: String,
}

impl<T: Real> FilteredSinogram<T> {
    pub(crate) fn new(grid: SGrid<T>, values: Vec<T>, filter: FilterKind, family: &str) -> Self {
        Self {
            grid,
            values,
            filter,
            family: family.to_string(),
        }
    }

    pub fn grid(&self) -> &SGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn filter(&self) -> FilterKind {
        self.filter
    }

    pub fn family(&self) -> &str {
        &self.family
    }

    pub fn row(&self, k: usize) -> &[T] {
        let ns = self.grid.ns();
        &self.values[k * ns..(k + 1) * ns]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EuclideanLines, HyperbolicGeodesics};

    #[test]
    fn grid_invariants_are_enforced() {
        assert!(SGrid::<f64>::new(3, 9, -1.0, 1.0, 64, 0.9).is_err());
        assert!(SGrid::<f64>::new(6, 8, -1.0, 1.0, 64, 0.9).is_err());
        assert!(SGrid::<f64>::new(6, 9, 1.0, 1.0, 64, 0.9).is_err());
        assert!(SGrid::<f64>::new(6, 9, -1.0, 1.0, 64, 1.5).is_err());
        let grid = SGrid::<f64>::new(6, 9, -1.0, 1.0, 64, 0.9).unwrap();
        assert!(grid.s_nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(grid.s_nodes()[4], 0.0);
    }

    #[test]
    fn family_grids_cover_the_shrunken_disc() {
        let lines: SGrid<f64> = SGrid::for_family(&EuclideanLines, 8, 9, 0.05).unwrap();
        assert!((lines.s_hi() - 0.975).abs() < 1e-15);
        let hyperbolic = SGrid::for_family(&HyperbolicGeodesics, 8, 9, 0.05).unwrap();
        let expected = 2.0 * 0.975 / (1.0 + 0.975f64.powi(2));
        assert!((hyperbolic.s_hi() - expected).abs() < 1e-15);
    }
}
