//! User-defined families given by rational polarized coefficients, loaded from JSON.
//!
//! ```json
//! {
//!   "name": "tilted-lines",
//!   "a": { "num": [ { "c": [1.0, 0.0], "p": [0, 0] } ] },
//!   "b": { "num": [ { "c": [1.0, 0.0], "p": [0, 0] } ] },
//!   "s": { "num": [ { "c": [0.0, 0.5], "p": [1, 0] }, { "c": [0.0, -0.5], "p": [0, 1] } ] },
//!   "t": { "num": [ { "c": [0.5, 0.0], "p": [1, 0] }, { "c": [0.5, 0.0], "p": [0, 1] } ] },
//!   "s_range": [-1.0, 1.0],
//!   "t_range": [-1.0, 1.0]
//! }
//! ```
//!
//! Each term `{ "c": [re, im], "p": [p1, p2] }` stands for `c·w1^p1·w2^p2`; a
//! missing `den` means denominator 1. `s_range`/`t_range` bound the parameters
//! of the curves that meet the closed unit disc.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::family::{Coefficient, CurveFamily, Jet};
use crate::scalar::{Cx, Real};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermSpec {
    pub c: [f64; 2],
    pub p: [u32; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalSpec {
    pub num: Vec<TermSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub den: Option<Vec<TermSpec>>,
}

/// On-disk description of a rational family.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub a: RationalSpec,
    pub b: RationalSpec,
    pub s: RationalSpec,
    pub t: RationalSpec,
    pub s_range: [f64; 2],
    pub t_range: [f64; 2],
}

#[derive(Clone, Debug)]
struct Polynomial<T> {
    terms: Vec<(Cx<T>, i32, i32)>,
}

impl<T: Real> Polynomial<T> {
    fn from_spec(terms: &[TermSpec]) -> Self {
        Self {
            terms: terms
                .iter()
                .map(|term| {
                    (
                        Cx::new(T::lit(term.c[0]), T::lit(term.c[1])),
                        term.p[0] as i32,
                        term.p[1] as i32,
                    )
                })
                .collect(),
        }
    }

    fn one() -> Self {
        Self {
            terms: vec![(Cx::new(T::one(), T::zero()), 0, 0)],
        }
    }

    fn jet(&self, w1: Cx<T>, w2: Cx<T>) -> Jet<T> {
        let zero = Cx::new(T::zero(), T::zero());
        let mut jet = Jet {
            value: zero,
            d1: zero,
            d2: zero,
        };
        for &(coefficient, p1, p2) in &self.terms {
            let a = w1.powi(p1);
            let b = w2.powi(p2);
            jet.value = jet.value + coefficient * a * b;
            if p1 > 0 {
                jet.d1 = jet.d1 + coefficient * T::from_i32(p1).expect("small power") * w1.powi(p1 - 1) * b;
            }
            if p2 > 0 {
                jet.d2 = jet.d2 + coefficient * T::from_i32(p2).expect("small power") * a * w2.powi(p2 - 1);
            }
        }
        jet
    }
}

#[derive(Clone, Debug)]
struct RationalFunction<T> {
    numerator: Polynomial<T>,
    denominator: Polynomial<T>,
}

impl<T: Real> RationalFunction<T> {
    fn from_spec(spec: &RationalSpec) -> Result<Self> {
        if spec.num.is_empty() {
            return Err(Error::Format("rational coefficient with empty numerator".into()));
        }
        let denominator = match &spec.den {
            Some(terms) if terms.is_empty() => {
                return Err(Error::Format("rational coefficient with empty denominator".into()))
            }
            Some(terms) => Polynomial::from_spec(terms),
            None => Polynomial::one(),
        };
        Ok(Self {
            numerator: Polynomial::from_spec(&spec.num),
            denominator,
        })
    }

    fn jet(&self, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        let top = self.numerator.jet(w1, w2);
        let bottom = self.denominator.jet(w1, w2);
        if bottom.value.norm() < T::lit(1e-14) {
            return Err(Error::Domain(format!("denominator vanishes at ({w1}, {w2})")));
        }
        let squared = bottom.value * bottom.value;
        Ok(Jet {
            value: top.value / bottom.value,
            d1: (top.d1 * bottom.value - top.value * bottom.d1) / squared,
            d2: (top.d2 * bottom.value - top.value * bottom.d2) / squared,
        })
    }
}

/// Family with rational polarized coefficients; curves are traced by Newton
/// continuation on `(t(z), s(z)) = (t, s)`.
#[derive(Clone, Debug)]
pub struct RationalFamily<T> {
    name: String,
    coefficients: [RationalFunction<T>; 4],
    s_span: (T, T),
    t_span: (T, T),
}

const CONTINUATION_STEPS: usize = 8;
const SCAN_SAMPLES: usize = 257;

impl<T: Real> RationalFamily<T> {
    pub fn from_spec(spec: &FamilySpec) -> Result<Self> {
        let span = |range: [f64; 2], label: &str| {
            if range[0].is_finite() && range[1].is_finite() && range[0] < range[1] {
                Ok((T::lit(range[0]), T::lit(range[1])))
            } else {
                Err(Error::Format(format!("{label} must be an increasing finite pair")))
            }
        };
        if spec.name.trim().is_empty() || spec.name.contains(char::is_whitespace) {
            return Err(Error::Format("family name must be a non-empty token".into()));
        }
        Ok(Self {
            name: spec.name.clone(),
            coefficients: [
                RationalFunction::from_spec(&spec.a)?,
                RationalFunction::from_spec(&spec.b)?,
                RationalFunction::from_spec(&spec.s)?,
                RationalFunction::from_spec(&spec.t)?,
            ],
            s_span: span(spec.s_range, "s_range")?,
            t_span: span(spec.t_range, "t_range")?,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_spec(&serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    fn residual(&self, z: Cx<T>, t: T, s: T) -> Result<(T, T, Jet<T>, Jet<T>)> {
        let t_jet = self.polarized_jet(Coefficient::T, z, z.conj())?;
        let s_jet = self.polarized_jet(Coefficient::S, z, z.conj())?;
        Ok((t_jet.value.re - t, s_jet.value.re - s, t_jet, s_jet))
    }

    fn newton(&self, mut z: Cx<T>, t: T, s: T) -> Result<Cx<T>> {
        let tolerance = T::lit(1e-13) * (T::one() + t.abs() + s.abs());
        let (mut rt, mut rs, mut t_jet, mut s_jet) = self.residual(z, t, s)?;
        for _ in 0..60 {
            let norm = rt.hypot(rs);
            if norm < tolerance {
                return Ok(z);
            }
            // ∂/∂x = ∂1 + ∂2, ∂/∂y = i(∂1 − ∂2) on the real slice w2 = conj(w1).
            let i = Cx::new(T::zero(), T::one());
            let tx = (t_jet.d1 + t_jet.d2).re;
            let ty = (i * (t_jet.d1 - t_jet.d2)).re;
            let sx = (s_jet.d1 + s_jet.d2).re;
            let sy = (i * (s_jet.d1 - s_jet.d2)).re;
            let det = tx * sy - ty * sx;
            if det.abs() < T::lit(1e-300) {
                break;
            }
            let dx = (rt * sy - rs * ty) / det;
            let dy = (tx * rs - sx * rt) / det;
            let mut damping = T::one();
            let mut accepted = false;
            for _ in 0..30 {
                let trial = z - Cx::new(dx, dy) * damping;
                if trial.norm() < T::one() {
                    if let Ok(next) = self.residual(trial, t, s) {
                        if next.0.hypot(next.1) < norm {
                            z = trial;
                            (rt, rs, t_jet, s_jet) = next;
                            accepted = true;
                            break;
                        }
                    }
                }
                damping = damping / T::lit(2.0);
            }
            if !accepted {
                break;
            }
        }
        if rt.hypot(rs) < tolerance {
            Ok(z)
        } else {
            Err(Error::Domain(format!(
                "no disc point with (t, s) = ({t}, {s}) in family {}",
                self.name
            )))
        }
    }

    fn inside(&self, t: T, s: T, radius: T) -> bool {
        matches!(self.curve(t, s), Ok(z) if z.norm() <= radius)
    }

    /// Bisects between an outside parameter and an inside one.
    fn refine_edge<F: Fn(T) -> bool>(inside: F, mut outside_at: T, mut inside_at: T) -> T {
        for _ in 0..60 {
            let mid = (outside_at + inside_at) / T::lit(2.0);
            if inside(mid) {
                inside_at = mid;
            } else {
                outside_at = mid;
            }
        }
        inside_at
    }

    fn scan<F: Fn(T) -> bool>(inside: F, span: (T, T)) -> Option<(T, T)> {
        let step = (span.1 - span.0) / T::from_count(SCAN_SAMPLES - 1);
        let node = |k: usize| span.0 + step * T::from_count(k);
        let hits: Vec<usize> = (0..SCAN_SAMPLES).filter(|&k| inside(node(k))).collect();
        let (&first, &last) = (hits.first()?, hits.last()?);
        let lo = if first == 0 {
            span.0
        } else {
            Self::refine_edge(&inside, node(first - 1), node(first))
        };
        let hi = if last == SCAN_SAMPLES - 1 {
            span.1
        } else {
            Self::refine_edge(&inside, node(last + 1), node(last))
        };
        Some((lo, hi))
    }
}

impl<T: Real> CurveFamily<T> for RationalFamily<T> {
    fn name(&self) -> &str {
        &self.name
    }

    fn polarized(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Cx<T>> {
        Ok(self.polarized_jet(which, w1, w2)?.value)
    }

    fn polarized_jet(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        let index = match which {
            Coefficient::A => 0,
            Coefficient::B => 1,
            Coefficient::S => 2,
            Coefficient::T => 3,
        };
        self.coefficients[index].jet(w1, w2)
    }

    fn curve(&self, t: T, s: T) -> Result<Cx<T>> {
        let origin = Cx::new(T::zero(), T::zero());
        let (t0, s0, _, _) = self.residual(origin, T::zero(), T::zero())?;
        let mut z = origin;
        for step in 1..=CONTINUATION_STEPS {
            let fraction = T::from_count(step) / T::from_count(CONTINUATION_STEPS);
            z = self.newton(z, t0 + (t - t0) * fraction, s0 + (s - s0) * fraction)?;
        }
        Ok(z)
    }

    fn s_range(&self, radius: T) -> (T, T) {
        Self::scan(|s| self.t_limits(s, radius).is_some(), self.s_span).unwrap_or(self.s_span)
    }

    fn t_limits(&self, s: T, radius: T) -> Option<(T, T)> {
        Self::scan(|t| self.inside(t, s, radius), self.t_span)
    }
}
