//! Reconstruction by Poisson-weighted backprojection of Hilbert-filtered data.
//!
//! For a plain sinogram the density at `z` is
//! `f(z) = (1/4π) Σ_k Δθ · P(λ_i, θ_k) · g_k'(s(z e^{−iθ_k})) · Re X⊥_θk s(z)`,
//! where `g_k` is the Hilbert-filtered row, `λ_i` a zero of `ξ/ρ(z, ·)` and `P`
//! the Poisson kernel. For lines `λ_i = 0`, `P ≡ 1` and `X⊥s ≡ 1`, so this is
//! classical filtered backprojection. The attenuated variant replaces `g_k` by
//! `Φ_k = exp(−D_θ a)·(H_a data)_k(s)` and differentiates `Φ_k` across the curves
//! by finite differences, since the integrating factor is not a function of `s`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    check_type_h, default_type_h_samples, directional_derivatives, eval_coeffs, five_point, ContourOptions,
    CurveFamily, ZeroCache, ZeroSet,
};
use crate::phantom::Density;
use crate::quadrature::trapezoid;
use crate::scalar::{unit, Cx, Real};
use crate::spline::NaturalSpline;
use crate::transforms::{build_ha, hilbert_s, ray_transform, FilteredSinogram, SGrid, Sinogram, SinogramKind};

/// Reconstructed density on the pixel centres `−1 + (i + ½)·2/n` of `[−1, 1]²`.
///
/// Pixel `index = row·n + col` sits at `x = centre(col)`, `y = centre(row)`, so
/// row 0 is the bottom of the image. Values outside the mask `|z| ≤ 1 − δ` are 0.
#[derive(Clone, Debug, PartialEq)]
pub struct ReconImage<T> {
    n: usize,
    values: Vec<T>,
    mask: Vec<bool>,
    delta: T,
}

impl<T: Real> ReconImage<T> {
    /// All-zero image with the mask for margin `delta`.
    ///
    /// # Errors
    /// `InvalidGrid` for `n < 2` or `delta` outside `(0, 1)`.
    pub fn empty(n: usize, delta: T) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("image size {n} is below 2")));
        }
        if !(delta > T::zero() && delta < T::one()) {
            return Err(Error::InvalidGrid(format!("delta {delta} outside (0, 1)")));
        }
        let limit = T::one() - delta;
        let mask = (0..n * n)
            .map(|index| Self::centre_of(n, index).norm() <= limit)
            .collect();
        Ok(Self {
            n,
            values: vec![T::zero(); n * n],
            mask,
            delta,
        })
    }

    fn centre_of(n: usize, index: usize) -> Cx<T> {
        let coordinate = |k: usize| -T::one() + (T::from_count(k) + T::lit(0.5)) * T::lit(2.0) / T::from_count(n);
        Cx::new(coordinate(index % n), coordinate(index / n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn pixel_center(&self, index: usize) -> Cx<T> {
        Self::centre_of(self.n, index)
    }

    /// Sets a masked pixel; writes outside the mask are ignored.
    pub fn set(&mut self, index: usize, value: T) {
        if self.mask[index] {
            self.values[index] = value;
        }
    }

    /// Indices of the masked pixels in ascending order.
    pub fn masked_indices(&self) -> Vec<usize> {
        (0..self.n * self.n).filter(|&index| self.mask[index]).collect()
    }

    /// Masked relative L2 distance to another image on the same grid.
    pub fn relative_l2(&self, other: &Self) -> Result<T> {
        if self.n != other.n || self.mask != other.mask {
            return Err(Error::GridMismatch("images use different grids or masks".into()));
        }
        let (mut difference, mut reference) = (T::zero(), T::zero());
        for index in self.masked_indices() {
            difference = difference + (self.values[index] - other.values[index]).powi(2);
            reference = reference + other.values[index].powi(2);
        }
        Ok(if reference > T::zero() {
            (difference / reference).sqrt()
        } else {
            difference.sqrt()
        })
    }
}

/// `P(λ, θ) = (1 − |λ|²)/|1 − e^{−iθ}λ|²`.
///
/// # Errors
/// `Domain` if `|λ| ≥ 1`.
pub fn poisson_kernel<T: Real>(lambda: Cx<T>, theta: T) -> Result<T> {
    let modulus = lambda.norm_sqr();
    if !(modulus < T::one()) {
        return Err(Error::Domain(format!("Poisson kernel needs |lambda| < 1, got {}", lambda.norm())));
    }
    let denominator = (Cx::new(T::one(), T::zero()) - unit(-theta) * lambda).norm_sqr();
    Ok((T::one() - modulus) / denominator)
}

/// Which zero `λ_i` of `ξ/ρ(z, ·)` weights the backprojection.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum LambdaChoice {
    /// Smallest modulus, ties broken by smallest argument in `[0, 2π)`.
    #[default]
    Smallest,
    /// The zero at this position in that order (distinct zeros, 0-based).
    Index(usize),
}

impl LambdaChoice {
    /// # Errors
    /// `Config` if the requested index exceeds the number of distinct zeros.
    pub fn select<T: Real>(&self, zeros: &ZeroSet<T>) -> Result<Cx<T>> {
        let position = match self {
            LambdaChoice::Smallest => 0,
            LambdaChoice::Index(i) => *i,
        };
        zeros.zeros.get(position).map(|&(lambda, _)| lambda).ok_or_else(|| {
            Error::Config(format!(
                "zero index {position} requested but only {} distinct zeros exist at z = {}{:+}i",
                zeros.zeros.len(),
                zeros.at_point.re,
                zeros.at_point.im
            ))
        })
    }
}

/// Tuning of the reconstruction routines.
#[derive(Clone, Copy, Debug)]
pub struct ReconOptions<T> {
    /// Mask margin: pixels with `|z| > 1 − δ` are left at zero.
    pub delta: T,
    pub lambda: LambdaChoice,
    pub contour: ContourOptions,
    /// Run the admissibility checks before reconstructing.
    pub check_family: bool,
    /// Finite-difference step of the attenuated path.
    pub fd_step: T,
}

impl<T: Real> Default for ReconOptions<T> {
    fn default() -> Self {
        Self {
            delta: T::lit(0.05),
            lambda: LambdaChoice::Smallest,
            contour: ContourOptions::default(),
            check_family: true,
            fd_step: T::lit(2e-3),
        }
    }
}

fn require_family<T: Real, F: CurveFamily<T> + ?Sized>(sino: &Sinogram<T>, family: &F, kind: SinogramKind) -> Result<()> {
    if sino.kind() != kind {
        return Err(Error::Config(format!(
            "expected a {} sinogram, got {}",
            kind.as_str(),
            sino.kind().as_str()
        )));
    }
    if sino.family() != family.name() {
        return Err(Error::GridMismatch(format!(
            "sinogram was computed for `{}`, not `{}`",
            sino.family(),
            family.name()
        )));
    }
    Ok(())
}

fn certify<T: Real, F: CurveFamily<T> + ?Sized>(family: &F) -> Result<()> {
    let (points, lambdas) = default_type_h_samples::<T>();
    let report = check_type_h(family, &points, &lambdas);
    if report.passed() {
        Ok(())
    } else {
        Err(Error::TypeHViolation {
            family: family.name().to_string(),
            failed: report.failures().join(", "),
        })
    }
}

fn row_splines<T: Real>(filtered: &FilteredSinogram<T>) -> Result<Vec<NaturalSpline<T>>> {
    let grid = filtered.grid();
    (0..grid.ntheta())
        .map(|k| NaturalSpline::new(grid.s_lo(), grid.s_step(), filtered.row(k).to_vec()))
        .collect()
}

fn outside_grid<T: Real>(s: T, grid: &SGrid<T>) -> Error {
    Error::SupportViolation(format!(
        "transverse coordinate {s} outside the sampled range [{}, {}]",
        grid.s_lo(),
        grid.s_hi()
    ))
}

/// Pixel index, pixel centre and the selected zero there.
type PixelLambda<T> = (usize, Cx<T>, Cx<T>);

/// Per-pixel weights `λ_i` for the masked pixels of `image`.
fn pixel_lambdas<T: Real, F: CurveFamily<T> + ?Sized>(
    image: &ReconImage<T>,
    family: &F,
    options: &ReconOptions<T>,
    cache: &ZeroCache<T>,
) -> Result<Vec<PixelLambda<T>>> {
    image
        .masked_indices()
        .into_par_iter()
        .map(|index| {
            let z = image.pixel_center(index);
            let zeros = cache.get_or_compute(family, z)?;
            Ok((index, z, options.lambda.select(&zeros)?))
        })
        .collect()
}

/// Reconstructs a density from its plain sinogram with default options.
pub fn reconstruct<T: Real, F: CurveFamily<T> + ?Sized>(sino: &Sinogram<T>, family: &F, n: usize) -> Result<ReconImage<T>> {
    reconstruct_with(sino, family, n, &ReconOptions::default())
}

/// Reconstructs a density from its plain sinogram.
///
/// # Errors
/// `TypeHViolation` if the family fails the admissibility checks,
/// `ZeroClusterUnresolved` from zero location, `SupportViolation` if a pixel's
/// curve parameter leaves the sampled `s` range, `GridMismatch`/`Config` for a
/// sinogram of the wrong family or kind.
pub fn reconstruct_with<T: Real, F: CurveFamily<T> + ?Sized>(
    sino: &Sinogram<T>,
    family: &F,
    n: usize,
    options: &ReconOptions<T>,
) -> Result<ReconImage<T>> {
    require_family(sino, family, SinogramKind::Plain)?;
    if options.check_family {
        certify(family)?;
    }
    let mut image = ReconImage::empty(n, options.delta)?;
    let filtered = hilbert_s(sino)?;
    let splines = row_splines(&filtered)?;
    let grid = sino.grid();
    let cache = ZeroCache::new(family.name(), T::lit(2.0) / T::from_count(n), options.contour);
    let pixels = pixel_lambdas(&image, family, options, &cache)?;
    let weight = grid.theta_step() / (T::lit(4.0) * T::PI());
    let values = pixels
        .par_iter()
        .map(|&(_, z, lambda)| {
            let mut sum = T::zero();
            for (k, &theta) in grid.thetas().iter().enumerate() {
                let rotation = unit(theta);
                let s = family.transverse(z * rotation.conj())?;
                let slope = splines[k].derivative(s).ok_or_else(|| outside_grid(s, grid))?;
                let across = eval_coeffs(family, z, rotation)?.perp_s().re;
                sum = sum + poisson_kernel(lambda, theta)? * slope * across;
            }
            Ok(sum * weight)
        })
        .collect::<Result<Vec<T>>>()?;
    for (&(index, _, _), value) in pixels.iter().zip(values) {
        image.set(index, value);
    }
    Ok(image)
}

/// Integrating factor `D_θ a` for one angle, tabulated on the `(s_j, t_m)`
/// nodes and interpolated bicubically.
struct BeamTable<T> {
    s_lo: T,
    s_step: T,
    t_lo: T,
    t_step: T,
    ns: usize,
    nt: usize,
    /// Running integral of `a` along each curve, row-major in `(s_j, t_m)`.
    running: Vec<T>,
    totals: Vec<T>,
}

/// Curve points in the base (unrotated) frame, shared across all angles.
struct CurveLattice<T> {
    s_nodes: Vec<T>,
    t_lo: T,
    t_step: T,
    nt: usize,
    /// `None` where the node lies outside the curve's part inside the cover disc.
    points: Vec<Option<Cx<T>>>,
}

impl<T: Real> CurveLattice<T> {
    fn new<F: CurveFamily<T> + ?Sized>(family: &F, grid: &SGrid<T>) -> Result<Self> {
        let cover = grid.cover_radius();
        let limits: Vec<Option<(T, T)>> = grid.s_nodes().iter().map(|&s| family.t_limits(s, cover)).collect();
        let (t_lo, t_hi) = limits
            .iter()
            .flatten()
            .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &(a, b)| (lo.min(a), hi.max(b)));
        if !(t_lo < t_hi) {
            return Err(Error::InvalidGrid("no grid curve meets the cover disc".into()));
        }
        let nt = grid.t_intervals() + 1;
        let t_step = (t_hi - t_lo) / T::from_count(nt - 1);
        let points = grid
            .s_nodes()
            .par_iter()
            .zip(&limits)
            .map(|(&s, limit)| -> Result<Vec<Option<Cx<T>>>> {
                (0..nt)
                    .map(|m| {
                        let t = t_lo + t_step * T::from_count(m);
                        match limit {
                            Some((a, b)) if t >= *a && t <= *b => Ok(Some(family.curve(t, s)?)),
                            _ => Ok(None),
                        }
                    })
                    .collect()
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        Ok(Self {
            s_nodes: grid.s_nodes().to_vec(),
            t_lo,
            t_step,
            nt,
            points,
        })
    }

    fn beam_table<A: Density<T> + ?Sized>(&self, a: &A, theta: T) -> BeamTable<T> {
        let rotation = unit(theta);
        let nt = self.nt;
        let half = T::lit(0.5);
        let rows: Vec<Vec<T>> = self
            .points
            .par_chunks(nt)
            .map(|column| {
                let samples: Vec<T> = column
                    .iter()
                    .map(|point| point.map_or(T::zero(), |p| a.value(rotation * p)))
                    .collect();
                let mut running = vec![T::zero(); nt];
                for m in 1..nt {
                    running[m] = running[m - 1] + (samples[m - 1] + samples[m]) * self.t_step * half;
                }
                running
            })
            .collect();
        let totals = rows.iter().map(|row| row[nt - 1]).collect();
        let ns = self.s_nodes.len();
        BeamTable {
            s_lo: self.s_nodes[0],
            s_step: (self.s_nodes[ns - 1] - self.s_nodes[0]) / T::from_count(ns - 1),
            t_lo: self.t_lo,
            t_step: self.t_step,
            ns,
            nt,
            running: rows.into_iter().flatten().collect(),
            totals,
        }
    }
}

/// Four-point Lagrange weights and the first stencil index for `position`
/// (in units of the node spacing) on `count` nodes.
fn cubic_stencil<T: Real>(position: T, count: usize) -> (usize, [T; 4]) {
    let base = position.floor().to_isize().unwrap_or(0) - 1;
    let first = base.clamp(0, count as isize - 4) as usize;
    let x = position - T::from_count(first);
    let (one, two, three, six) = (T::one(), T::lit(2.0), T::lit(3.0), T::lit(6.0));
    (
        first,
        [
            -(x - one) * (x - two) * (x - three) / six,
            x * (x - two) * (x - three) / two,
            -x * (x - one) * (x - three) / two,
            x * (x - one) * (x - two) / six,
        ],
    )
}

impl<T: Real> BeamTable<T> {
    /// `D_θ a` at the point with base-frame coordinates `(s, t)`.
    fn value(&self, s: T, t: T) -> T {
        let (j0, ws) = cubic_stencil((s - self.s_lo) / self.s_step, self.ns);
        let t_position = ((t - self.t_lo) / self.t_step).max(T::zero()).min(T::from_count(self.nt - 1));
        let (m0, wt) = cubic_stencil(t_position, self.nt);
        let mut running = T::zero();
        let mut total = T::zero();
        for (dj, &weight_s) in ws.iter().enumerate() {
            let row = (j0 + dj) * self.nt;
            let mut along = T::zero();
            for (dm, &weight_t) in wt.iter().enumerate() {
                along = along + weight_t * self.running[row + m0 + dm];
            }
            running = running + weight_s * along;
            total = total + weight_s * self.totals[j0 + dj];
        }
        running - total * T::lit(0.5)
    }
}

/// Reconstructs a density from its attenuated sinogram with default options.
pub fn reconstruct_attenuated<T: Real, A: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    sino_a: &Sinogram<T>,
    a: &A,
    family: &F,
    n: usize,
) -> Result<ReconImage<T>> {
    reconstruct_attenuated_with(sino_a, a, family, n, &ReconOptions::default())
}

/// Reconstructs a density from its attenuated sinogram. `a` must be the
/// attenuation that produced `sino_a`.
///
/// # Errors
/// As [`reconstruct_with`], plus `GridMismatch` from the attenuated filter.
pub fn reconstruct_attenuated_with<T: Real, A: Density<T> + ?Sized, F: CurveFamily<T> + ?Sized>(
    sino_a: &Sinogram<T>,
    a: &A,
    family: &F,
    n: usize,
    options: &ReconOptions<T>,
) -> Result<ReconImage<T>> {
    require_family(sino_a, family, SinogramKind::Attenuated)?;
    if options.check_family {
        certify(family)?;
    }
    let mut image = ReconImage::empty(n, options.delta)?;
    let grid = sino_a.grid();
    let a_sino = ray_transform(a, family, grid)?;
    let filtered = build_ha(sino_a, &a_sino)?;
    let splines = row_splines(&filtered)?;
    let lattice = CurveLattice::new(family, grid)?;
    let cache = ZeroCache::new(family.name(), T::lit(2.0) / T::from_count(n), options.contour);
    let pixels = pixel_lambdas(&image, family, options, &cache)?;
    let step = options.fd_step;
    let offsets = [-T::lit(2.0), -T::one(), T::one(), T::lit(2.0)];
    let mut sums = vec![T::zero(); pixels.len()];
    for (k, &theta) in grid.thetas().iter().enumerate() {
        let table = lattice.beam_table(a, theta);
        let rotation = unit(theta);
        let spline = &splines[k];
        let field = |w: Cx<T>| -> Result<T> {
            let base = w * rotation.conj();
            let s = family.transverse(base)?;
            let t = family.along(base)?;
            let filtered = spline.value(s).ok_or_else(|| outside_grid(s, grid))?;
            Ok((-table.value(s, t)).exp() * filtered)
        };
        sums.par_iter_mut().zip(&pixels).try_for_each(|(sum, &(_, z, lambda))| -> Result<()> {
            let mut along_x = [T::zero(); 4];
            let mut along_y = [T::zero(); 4];
            for (slot, &offset) in offsets.iter().enumerate() {
                along_x[slot] = field(z + Cx::new(offset * step, T::zero()))?;
                along_y[slot] = field(z + Cx::new(T::zero(), offset * step))?;
            }
            let coeffs = eval_coeffs(family, z, rotation)?;
            let (_, across) =
                directional_derivatives(&coeffs, five_point(along_x, step), five_point(along_y, step));
            *sum = *sum + poisson_kernel(lambda, theta)? * across.re;
            Ok(())
        })?;
    }
    let weight = grid.theta_step() / (T::lit(4.0) * T::PI());
    for (&(index, _, _), sum) in pixels.iter().zip(sums) {
        image.set(index, sum * weight);
    }
    Ok(image)
}

/// Boundary jump `φ(z, e^{iθ_k}) = i·H(I_θk f)(s(z e^{−iθ_k}))` for every grid angle.
pub struct JumpField<T> {
    grid: SGrid<T>,
    family: String,
    splines: Vec<NaturalSpline<T>>,
}

impl<T: Real> JumpField<T> {
    /// # Errors
    /// Errors of [`hilbert_s`]; `Config` for an attenuated sinogram.
    pub fn new(sino: &Sinogram<T>) -> Result<Self> {
        if sino.kind() != SinogramKind::Plain {
            return Err(Error::Config("the jump field needs a plain sinogram".into()));
        }
        let filtered = hilbert_s(sino)?;
        Ok(Self {
            grid: sino.grid().clone(),
            family: sino.family().to_string(),
            splines: row_splines(&filtered)?,
        })
    }

    /// `φ` at `z` for grid angle `k`.
    ///
    /// # Errors
    /// `SupportViolation` if `s(z e^{−iθ_k})` leaves the sampled range.
    pub fn value<F: CurveFamily<T> + ?Sized>(&self, family: &F, z: Cx<T>, k: usize) -> Result<Cx<T>> {
        if family.name() != self.family {
            return Err(Error::GridMismatch(format!(
                "jump field built for `{}` queried with `{}`",
                self.family,
                family.name()
            )));
        }
        let theta = self.grid.thetas()[k];
        let s = family.transverse(z * unit(theta).conj())?;
        let filtered = self.splines[k].value(s).ok_or_else(|| outside_grid(s, &self.grid))?;
        Ok(Cx::new(T::zero(), filtered))
    }
}

/// `φ(z, e^{iθ})` for an angle `θ` of the sinogram grid.
///
/// # Errors
/// `InvalidGrid` if `θ` is not a grid angle; otherwise as [`JumpField::value`].
pub fn jump_field<T: Real, F: CurveFamily<T> + ?Sized>(sino: &Sinogram<T>, family: &F, z: Cx<T>, theta: T) -> Result<Cx<T>> {
    let k = sino
        .grid()
        .thetas()
        .iter()
        .position(|&grid_theta| (grid_theta - theta).abs() < T::lit(1e-9))
        .ok_or_else(|| Error::InvalidGrid(format!("angle {theta} is not on the sinogram grid")))?;
    JumpField::new(sino)?.value(family, z, k)
}

/// `(1/2π)·Σ_k Δθ·P(λ, θ_k)` on `nodes` equispaced angles.
pub fn poisson_mean<T: Real>(lambda: Cx<T>, nodes: usize) -> Result<T> {
    let step = T::TAU() / T::from_count(nodes);
    let samples = (0..=nodes)
        .map(|k| poisson_kernel(lambda, step * T::from_count(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(trapezoid(&samples, step) / T::TAU())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EuclideanLines, HyperbolicGeodesics};
    use crate::phantom::Phantom;
    use crate::transforms::{attenuated_ray_transform, SGrid};

    #[test]
    fn poisson_kernel_values() {
        assert!((poisson_kernel(Cx::new(0.0_f64, 0.0), 1.234).unwrap() - 1.0).abs() < 1e-15);
        assert!((poisson_kernel(Cx::new(0.5_f64, 0.0), 0.0).unwrap() - 3.0).abs() < 1e-15);
        assert!(matches!(poisson_kernel(Cx::new(1.0, 0.0), 0.0), Err(Error::Domain(_))));
        for lambda in [Cx::new(0.3_f64, 0.2), Cx::new(-0.9, 0.0), Cx::new(0.0, 0.6)] {
            assert!((poisson_mean(lambda, 4096).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn image_mask_and_centres() {
        let image = ReconImage::<f64>::empty(4, 0.05).unwrap();
        assert_eq!(image.pixel_center(0), Cx::new(-0.75, -0.75));
        assert_eq!(image.pixel_center(7), Cx::new(0.75, -0.25));
        assert_eq!(image.masked_indices().len(), 12);
        assert!(ReconImage::<f64>::empty(1, 0.05).is_err());
    }

    #[test]
    fn lambda_index_beyond_zero_count_is_rejected() {
        let zeros = crate::geometry::find_zeros(&EuclideanLines, Cx::new(0.1, 0.1), &ContourOptions::default()).unwrap();
        assert!(LambdaChoice::Index(0).select(&zeros).is_ok());
        assert!(matches!(LambdaChoice::Index(1).select(&zeros), Err(Error::Config(_))));
    }

    #[test]
    fn zero_sinogram_reconstructs_to_zero() {
        let grid = SGrid::for_family(&EuclideanLines, 16, 33, 0.05).unwrap();
        let sino = ray_transform(&Phantom::<f64>::zero(), &EuclideanLines, &grid).unwrap();
        let image = reconstruct(&sino, &EuclideanLines, 16).unwrap();
        assert!(image.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn coarse_lines_round_trip() {
        let f = Phantom::<f64>::default_gaussian();
        let grid = SGrid::for_family(&EuclideanLines, 90, 129, 0.05).unwrap();
        let sino = ray_transform(&f, &EuclideanLines, &grid).unwrap();
        let image = reconstruct(&sino, &EuclideanLines, 48).unwrap();
        let metrics = crate::phantom::error_metrics(&image, &f).unwrap();
        assert!(metrics.l2_rel < 0.05, "{metrics:?}");
    }

    #[test]
    fn wrong_kind_or_family_is_rejected() {
        let grid = SGrid::for_family(&EuclideanLines, 8, 17, 0.05).unwrap();
        let f = Phantom::<f64>::default_gaussian();
        let plain = ray_transform(&f, &EuclideanLines, &grid).unwrap();
        assert!(matches!(
            reconstruct(&plain, &HyperbolicGeodesics, 8),
            Err(Error::GridMismatch(_))
        ));
        assert!(matches!(
            reconstruct_attenuated(&plain, &f, &EuclideanLines, 8),
            Err(Error::Config(_))
        ));
        let attenuated = attenuated_ray_transform(&f, &Phantom::zero(), &EuclideanLines, &grid).unwrap();
        assert!(matches!(reconstruct(&attenuated, &EuclideanLines, 8), Err(Error::Config(_))));
    }

    #[test]
    fn jump_field_is_imaginary() {
        let f = Phantom::<f64>::default_gaussian();
        let grid = SGrid::for_family(&EuclideanLines, 8, 129, 0.05).unwrap();
        let sino = ray_transform(&f, &EuclideanLines, &grid).unwrap();
        let theta = grid.thetas()[3];
        let value = jump_field(&sino, &EuclideanLines, Cx::new(0.1, 0.2), theta).unwrap();
        assert_eq!(value.re, 0.0);
        assert!(value.im.abs() > 0.0);
        assert!(matches!(
            jump_field(&sino, &EuclideanLines, Cx::new(0.1, 0.2), 0.1),
            Err(Error::InvalidGrid(_))
        ));
    }

    #[test]
    fn cubic_stencil_reproduces_cubics() {
        let f = |x: f64| 0.3 * x * x * x - x + 2.0;
        for position in [0.2, 3.7, 8.9] {
            let (first, weights) = cubic_stencil(position, 10);
            let value: f64 = (0..4).map(|d| weights[d] * f((first + d) as f64)).sum();
            assert!((value - f(position)).abs() < 1e-12);
        }
    }
}
