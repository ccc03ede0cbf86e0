//! Built-in families: Euclidean lines and hyperbolic geodesics of the Poincaré disc.

use crate::error::{Error, Result};
use crate::geometry::family::{Coefficient, CurveFamily, Jet};
use crate::scalar::{imag_unit, real, Cx, Real};

/// Straight lines `t ↦ t − is`, with `μ ≡ 1`, `s(z) = −Im z` and `t(z) = Re z`.
#[derive(Clone, Copy, Debug, Default)]
pub struct EuclideanLines;

impl EuclideanLines {
    pub const NAME: &'static str = "euclidean-lines";
}

impl<T: Real> CurveFamily<T> for EuclideanLines {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn polarized(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Cx<T>> {
        Ok(self.polarized_jet(which, w1, w2)?.value)
    }

    fn polarized_jet(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        let zero = Cx::new(T::zero(), T::zero());
        let two = T::lit(2.0);
        let half_i = imag_unit::<T>() / two;
        Ok(match which {
            Coefficient::A | Coefficient::B => Jet {
                value: real(T::one()),
                d1: zero,
                d2: zero,
            },
            // (w2 − w1)/(2i) = (i/2)(w1 − w2)
            Coefficient::S => Jet {
                value: half_i * (w1 - w2),
                d1: half_i,
                d2: -half_i,
            },
            Coefficient::T => Jet {
                value: (w1 + w2) / two,
                d1: real(T::one() / two),
                d2: real(T::one() / two),
            },
        })
    }

    fn curve(&self, t: T, s: T) -> Result<Cx<T>> {
        Ok(Cx::new(t, -s))
    }

    fn transverse(&self, z: Cx<T>) -> Result<T> {
        Ok(-z.im)
    }

    fn along(&self, z: Cx<T>) -> Result<T> {
        Ok(z.re)
    }

    fn s_range(&self, radius: T) -> (T, T) {
        (-radius, radius)
    }

    fn t_limits(&self, s: T, radius: T) -> Option<(T, T)> {
        if s.abs() >= radius {
            return None;
        }
        let half_chord = (radius * radius - s * s).sqrt();
        Some((-half_chord, half_chord))
    }

    fn is_builtin(&self) -> bool {
        true
    }
}

/// Geodesics of the Poincaré disc orthogonal to the real diameter.
///
/// Curves are parametrized conformally: `curve(t, q) = tanh((artanh q + it)/2)`
/// for `q ∈ (−1, 1)` and `t ∈ (−π/2, π/2)`, so that `μ = (i/2)(1 − z²)`,
/// `s(z) = 2 Re z / (1 + |z|²)` and `t(z) = arg((1 + z)/(1 − z))`. The ratio
/// `ξ/ρ = (z² − λ²)/(1 − λ²z̄²)` has simple zeros at `λ = ±z`.
#[derive(Clone, Copy, Debug, Default)]
pub struct HyperbolicGeodesics;

impl HyperbolicGeodesics {
    pub const NAME: &'static str = "hyperbolic-geodesics";
}

const POLE_GUARD: f64 = 1e-14;

impl<T: Real> CurveFamily<T> for HyperbolicGeodesics {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn polarized(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Cx<T>> {
        Ok(self.polarized_jet(which, w1, w2)?.value)
    }

    fn polarized_jet(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        let zero = Cx::new(T::zero(), T::zero());
        let one = real(T::one());
        let i = imag_unit::<T>();
        let half_i = i / T::lit(2.0);
        let guard = T::lit(POLE_GUARD);
        Ok(match which {
            Coefficient::A => Jet {
                value: half_i * (one - w1 * w1),
                d1: -i * w1,
                d2: zero,
            },
            Coefficient::B => Jet {
                value: -half_i * (one - w2 * w2),
                d1: zero,
                d2: i * w2,
            },
            Coefficient::S => {
                let denominator = one + w1 * w2;
                if denominator.norm() < guard {
                    return Err(Error::Domain(format!("1 + w1·w2 vanishes at ({w1}, {w2})")));
                }
                let squared = denominator * denominator;
                Jet {
                    value: (w1 + w2) / denominator,
                    d1: (one - w2 * w2) / squared,
                    d2: (one - w1 * w1) / squared,
                }
            }
            Coefficient::T => {
                let gap1 = one - w1 * w1;
                let gap2 = one - w2 * w2;
                if gap1.norm() < guard || gap2.norm() < guard {
                    return Err(Error::Domain(format!("artanh pole at ({w1}, {w2})")));
                }
                Jet {
                    value: -i * (w1.atanh() - w2.atanh()),
                    d1: -i / gap1,
                    d2: i / gap2,
                }
            }
        })
    }

    fn curve(&self, t: T, s: T) -> Result<Cx<T>> {
        if !(s.abs() < T::one()) {
            return Err(Error::Domain(format!("transverse parameter {s} outside (-1, 1)")));
        }
        Ok((Cx::new(s.atanh(), t) / T::lit(2.0)).tanh())
    }

    fn transverse(&self, z: Cx<T>) -> Result<T> {
        Ok(T::lit(2.0) * z.re / (T::one() + z.norm_sqr()))
    }

    fn along(&self, z: Cx<T>) -> Result<T> {
        Ok((T::lit(2.0) * z.im).atan2(T::one() - z.norm_sqr()))
    }

    fn s_range(&self, radius: T) -> (T, T) {
        let reach = T::lit(2.0) * radius / (T::one() + radius * radius);
        (-reach, reach)
    }

    fn t_limits(&self, s: T, radius: T) -> Option<(T, T)> {
        if !(s.abs() < T::one()) {
            return None;
        }
        let r2 = radius * radius;
        let threshold = (T::one() - r2) / ((T::one() + r2) * (T::one() - s * s).sqrt());
        if threshold >= T::one() {
            return None;
        }
        let half_width = threshold.acos();
        Some((-half_width, half_width))
    }

    fn is_builtin(&self) -> bool {
        true
    }
}
