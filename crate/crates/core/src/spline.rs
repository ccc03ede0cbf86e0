//! Natural cubic spline on a uniform grid.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// C² interpolant with vanishing second derivative at both ends.
#[derive(Clone, Debug)]
pub struct NaturalSpline<T> {
    start: T,
    step: T,
    values: Vec<T>,
    curvature: Vec<T>,
}

impl<T: Real> NaturalSpline<T> {
    /// Interpolates `values` sampled at `start + k·step`.
    ///
    /// # Errors
    /// `InvalidGrid` for fewer than two samples or a non-positive step.
    pub fn new(start: T, step: T, values: Vec<T>) -> Result<Self> {
        let n = values.len();
        if n < 2 || !(step > T::zero()) {
            return Err(Error::InvalidGrid(format!(
                "spline needs at least two samples and a positive step (got {n} samples)"
            )));
        }
        let mut curvature = vec![T::zero(); n];
        if n > 2 {
            // Thomas algorithm on the interior system [1 4 1] M = 6 Δ²y / h².
            let interior = n - 2;
            let six_over_h2 = T::lit(6.0) / (step * step);
            let mut diag = vec![T::lit(4.0); interior];
            let mut rhs: Vec<T> = (1..n - 1)
                .map(|k| (values[k + 1] - values[k] * T::lit(2.0) + values[k - 1]) * six_over_h2)
                .collect();
            for k in 1..interior {
                let factor = T::one() / diag[k - 1];
                diag[k] = diag[k] - factor;
                rhs[k] = rhs[k] - rhs[k - 1] * factor;
            }
            curvature[interior] = rhs[interior - 1] / diag[interior - 1];
            for k in (0..interior - 1).rev() {
                curvature[k + 1] = (rhs[k] - curvature[k + 2]) / diag[k];
            }
        }
        Ok(Self {
            start,
            step,
            values,
            curvature,
        })
    }

    pub fn start(&self) -> T {
        self.start
    }

    pub fn end(&self) -> T {
        self.start + self.step * T::from_count(self.values.len() - 1)
    }

    fn locate(&self, x: T) -> Option<(usize, T)> {
        let last = self.values.len() - 1;
        let position = (x - self.start) / self.step;
        let slack = T::lit(1e-9);
        if !(position >= -slack && position <= T::from_count(last) + slack) {
            return None;
        }
        let cell = position.floor().max(T::zero()).to_usize().unwrap_or(0).min(last - 1);
        Some((cell, position - T::from_count(cell)))
    }

    /// Spline value, or `None` outside the sampled interval.
    pub fn value(&self, x: T) -> Option<T> {
        let (cell, frac) = self.locate(x)?;
        let h2 = self.step * self.step;
        let six = T::lit(6.0);
        let left = T::one() - frac;
        let (y0, y1) = (self.values[cell], self.values[cell + 1]);
        let (m0, m1) = (self.curvature[cell], self.curvature[cell + 1]);
        Some(
            y0 * left
                + y1 * frac
                + (m0 * (left * left * left - left) + m1 * (frac * frac * frac - frac)) * h2 / six,
        )
    }

    /// First derivative of the spline, or `None` outside the sampled interval.
    pub fn derivative(&self, x: T) -> Option<T> {
        let (cell, frac) = self.locate(x)?;
        let six = T::lit(6.0);
        let three = T::lit(3.0);
        let left = T::one() - frac;
        let (y0, y1) = (self.values[cell], self.values[cell + 1]);
        let (m0, m1) = (self.curvature[cell], self.curvature[cell + 1]);
        Some(
            (y1 - y0) / self.step
                + self.step * (m1 * (three * frac * frac - T::one()) - m0 * (three * left * left - T::one())) / six,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_linear_data_exactly() {
        let values: Vec<f64> = (0..9).map(|k| 2.0 * k as f64 * 0.25 - 1.0).collect();
        let spline = NaturalSpline::new(0.0, 0.25, values).unwrap();
        assert!((spline.value(0.6).unwrap() - 0.2).abs() < 1e-14);
        assert!((spline.derivative(1.3).unwrap() - 2.0).abs() < 1e-13);
    }

    #[test]
    fn smooth_function_converges_at_fourth_order_in_the_interior() {
        let error_at = |n: usize| {
            let step = 2.0 / (n - 1) as f64;
            let values = (0..n).map(|k| (-1.0 + k as f64 * step).sin()).collect();
            let spline = NaturalSpline::new(-1.0, step, values).unwrap();
            (0..50)
                .map(|k| -0.5 + k as f64 / 50.0)
                .map(|x| (spline.value(x).unwrap() - x.sin()).abs())
                .fold(0.0, f64::max)
        };
        let coarse = error_at(41);
        let fine = error_at(81);
        assert!(coarse / fine > 12.0, "ratio {}", coarse / fine);
    }

    #[test]
    fn outside_interval_is_none() {
        let spline = NaturalSpline::new(0.0, 1.0, vec![0.0, 1.0, 0.0]).unwrap();
        assert!(spline.value(-0.1).is_none());
        assert!(spline.derivative(2.5).is_none());
        assert!(spline.value(2.0).is_some());
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(NaturalSpline::new(0.0, 1.0, vec![1.0]).is_err());
        assert!(NaturalSpline::new(0.0, 0.0, vec![1.0, 2.0]).is_err());
    }
}
