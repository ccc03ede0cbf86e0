//! Hilbert transform in the transverse variable and the attenuated filter `H_a`.
//!
//! Convention: `(Hg)(x) = (1/π) p.v.∫ g(y)/(x − y) dy`, the Fourier multiplier
//! `−i·sign(ω)`. On a uniform grid this multiplier is realized exactly (for
//! band-limited rows) by convolution with the discrete kernel `2/(πk)` for odd
//! `k` and 0 for even `k`. The convolution is linear, carried out by FFT on rows
//! zero-padded to four times their length, so no periodic wraparound enters.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Cx, FftPlan, Real};
use crate::transforms::{FilterKind, FilteredSinogram, Sinogram, SinogramKind};

const PADDING: usize = 4;
/// Largest edge value a row may carry, relative to the sinogram peak.
const DECAY_LIMIT: f64 = 1e-9;

/// Reusable Hilbert filter for rows of a fixed length.
pub struct HilbertFilter<T> {
    len: usize,
    padded: usize,
    kernel: Vec<Cx<T>>,
    forward: FftPlan<T>,
    inverse: FftPlan<T>,
}

impl<T: Real> HilbertFilter<T> {
    pub fn new(len: usize) -> Self {
        let padded = (PADDING * len).max(2);
        let forward = T::fft_plan(padded, false);
        let inverse = T::fft_plan(padded, true);
        let mut kernel = vec![Cx::new(T::zero(), T::zero()); padded];
        for offset in (1..len).step_by(2) {
            let tap = T::lit(2.0) / (T::PI() * T::from_count(offset));
            kernel[offset] = Cx::new(tap, T::zero());
            kernel[padded - offset] = Cx::new(-tap, T::zero());
        }
        forward(&mut kernel);
        Self {
            len,
            padded,
            kernel,
            forward,
            inverse,
        }
    }

    /// Filters one row; returns the real part and the largest imaginary residue.
    pub fn apply(&self, row: &[T]) -> (Vec<T>, T) {
        assert_eq!(row.len(), self.len, "row length does not match the filter");
        let mut buffer = vec![Cx::new(T::zero(), T::zero()); self.padded];
        for (slot, &value) in buffer.iter_mut().zip(row) {
            *slot = Cx::new(value, T::zero());
        }
        (self.forward)(&mut buffer);
        for (slot, &tap) in buffer.iter_mut().zip(&self.kernel) {
            *slot = *slot * tap;
        }
        (self.inverse)(&mut buffer);
        let scale = T::from_count(self.padded);
        let mut residue = T::zero();
        let filtered = buffer[..self.len]
            .iter()
            .map(|value| {
                residue = residue.max((value.im / scale).abs());
                value.re / scale
            })
            .collect();
        (filtered, residue)
    }
}

/// Hilbert transform of one uniformly sampled row, without a decay check.
pub fn hilbert_row<T: Real>(row: &[T]) -> Vec<T> {
    HilbertFilter::new(row.len()).apply(row).0
}

/// Hilbert transform of a row embedded in the middle of a zero lattice
/// `factor` times as long; returns the whole lattice. Keeping the far field
/// matters when the output is filtered again.
pub fn hilbert_row_extended<T: Real>(row: &[T], factor: usize) -> Vec<T> {
    let factor = factor.max(1);
    let len = row.len() * factor;
    let offset = (len - row.len()) / 2;
    let mut lattice = vec![T::zero(); len];
    lattice[offset..offset + row.len()].copy_from_slice(row);
    HilbertFilter::new(len).apply(&lattice).0
}

fn check_decay<T: Real>(sino: &Sinogram<T>) -> Result<()> {
    let peak = sino.values().iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let ns = sino.grid().ns();
    for k in 0..sino.grid().ntheta() {
        let row = sino.row(k);
        let edge = row[0].abs().max(row[ns - 1].abs());
        if edge > T::lit(DECAY_LIMIT) * peak {
            return Err(Error::SupportViolation(format!(
                "row {k} does not decay at the ends of the s grid (edge {edge}, peak {peak})"
            )));
        }
    }
    Ok(())
}

/// Row-wise Hilbert transform of a sinogram.
///
/// # Errors
/// `SupportViolation` if a row does not decay below 1e-9 of the sinogram peak
/// at both ends of the `s` grid.
pub fn hilbert_s<T: Real>(sino: &Sinogram<T>) -> Result<FilteredSinogram<T>> {
    check_decay(sino)?;
    let ns = sino.grid().ns();
    let filter = HilbertFilter::new(ns);
    let mut values = vec![T::zero(); sino.values().len()];
    values
        .par_chunks_mut(ns)
        .enumerate()
        .for_each(|(k, out)| out.copy_from_slice(&filter.apply(sino.row(k)).0));
    Ok(FilteredSinogram::new(
        sino.grid().clone(),
        values,
        FilterKind::Hilbert,
        sino.family(),
    ))
}

/// Pointwise `C = cos(H(I a)/2)` and `S = sin(H(I a)/2)` for every row of the
/// plain ray transform of the attenuation.
pub fn attenuation_phases<T: Real>(a_sino: &Sinogram<T>) -> Result<(Vec<T>, Vec<T>)> {
    let filtered = hilbert_s(a_sino)?;
    let half = T::lit(0.5);
    Ok(filtered
        .values()
        .iter()
        .map(|&phase| ((phase * half).cos(), (phase * half).sin()))
        .unzip())
}

/// Attenuated filter `H_a g = C·H(C·g) + S·H(S·g)` applied row by row.
///
/// # Errors
/// `GridMismatch` if the sinograms differ in grid or family, or if `a_sino` is
/// not a plain transform; `SupportViolation` as in [`hilbert_s`].
pub fn build_ha<T: Real>(sino_a: &Sinogram<T>, a_sino: &Sinogram<T>) -> Result<FilteredSinogram<T>> {
    if !sino_a.grid().same_nodes(a_sino.grid()) {
        return Err(Error::GridMismatch("data and attenuation sinograms use different grids".into()));
    }
    if sino_a.family() != a_sino.family() {
        return Err(Error::GridMismatch(format!(
            "data family `{}` differs from attenuation family `{}`",
            sino_a.family(),
            a_sino.family()
        )));
    }
    if a_sino.kind() != SinogramKind::Plain {
        return Err(Error::GridMismatch("attenuation sinogram must be a plain ray transform".into()));
    }
    check_decay(sino_a)?;
    let (cosines, sines) = attenuation_phases(a_sino)?;
    let ns = sino_a.grid().ns();
    let filter = HilbertFilter::new(ns);
    let mut values = vec![T::zero(); sino_a.values().len()];
    values.par_chunks_mut(ns).enumerate().for_each(|(k, out)| {
        let row = sino_a.row(k);
        let c = &cosines[k * ns..(k + 1) * ns];
        let s = &sines[k * ns..(k + 1) * ns];
        let weighted_c: Vec<T> = row.iter().zip(c).map(|(&g, &w)| g * w).collect();
        let weighted_s: Vec<T> = row.iter().zip(s).map(|(&g, &w)| g * w).collect();
        let hc = filter.apply(&weighted_c).0;
        let hs = filter.apply(&weighted_s).0;
        for j in 0..ns {
            out[j] = c[j] * hc[j] + s[j] * hs[j];
        }
    });
    Ok(FilteredSinogram::new(
        sino_a.grid().clone(),
        values,
        FilterKind::Ha,
        sino_a.family(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_row(n: usize, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (Vec<f64>, Vec<f64>) {
        let step = (hi - lo) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|k| lo + k as f64 * step).collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        (xs, ys)
    }

    #[test]
    fn cosine_under_a_wide_window_maps_to_sine() {
        // Window exp(−x²/50) is nearly flat across |x| < 1 and its spectrum is
        // far narrower than ω, so H[cos(ωx)w] = sin(ωx)w to high accuracy.
        let omega = 6.0;
        let window = |x: f64| (-x * x / 50.0).exp();
        let (xs, row) = grid_row(4097, -60.0, 60.0, |x| (omega * x).cos() * window(x));
        let filtered = hilbert_row(&row);
        for (x, h) in xs.iter().zip(&filtered) {
            if x.abs() < 1.0 {
                assert!((h - (omega * x).sin() * window(*x)).abs() < 1e-6, "x = {x}: {h}");
            }
        }
    }

    #[test]
    fn lorentzian_pair_on_a_wide_grid() {
        let (xs, row) = grid_row(8193, -400.0, 400.0, |x| 1.0 / (1.0 + x * x));
        let filtered = hilbert_row(&row);
        for (x, h) in xs.iter().zip(&filtered) {
            if x.abs() < 2.0 {
                assert!((h - x / (1.0 + x * x)).abs() < 1e-4, "x = {x}: {h}");
            }
        }
    }

    #[test]
    fn zero_row_stays_zero_and_residue_is_small() {
        let filter = HilbertFilter::<f64>::new(33);
        let (out, residue) = filter.apply(&[0.0; 33]);
        assert!(out.iter().all(|&v| v == 0.0));
        assert_eq!(residue, 0.0);
        let (_, row) = grid_row(513, -1.0, 1.0, |x| (-x * x / 0.02).exp());
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (_, residue) = HilbertFilter::new(513).apply(&row);
        assert!(residue < 1e-10 * norm);
    }

    #[test]
    fn applying_twice_negates_mean_zero_rows() {
        // Hg decays like (∫g)/x, so the second pass needs the far field of the
        // first; a row with vanishing mean and first moment keeps that tail small.
        let (xs, row) = grid_row(1025, -1.0, 1.0, |x| (1.0 - 2.0 * x * x / 0.0225) * (-x * x / 0.0225).exp());
        let factor = 9;
        let once = hilbert_row_extended(&row, factor);
        let offset = (once.len() - row.len()) / 2;
        let twice = &hilbert_row(&once)[offset..offset + row.len()];
        let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
        let error = xs
            .iter()
            .zip(twice.iter().zip(&row))
            .filter(|(x, _)| x.abs() < 0.5)
            .map(|(_, (h, g))| (h + g).powi(2))
            .sum::<f64>()
            .sqrt();
        assert!(error < 1e-5 * norm, "{}", error / norm);
    }
}
