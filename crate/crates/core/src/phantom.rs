//! Smooth, compactly supported test densities and attenuation maps.
//!
//! A phantom is a sum of bumps. Mollifier bumps `A·exp(1 − 1/(1 − r²))`,
//! `r = |z − c|/radius`, vanish identically outside their radius. Gaussian bumps
//! `A·exp(−|z − c|²/radius²)` are cut off at a truncation radius where the tail
//! is below 1e-14 of the peak, or at an explicit radius whose tail is below 1e-9.
//!
//! JSON schema:
//!
//! ```json
//! {
//!   "delta": 0.05,
//!   "bumps": [
//!     { "kind": "gaussian", "center": [0.0, 0.0], "radius": 0.15, "amplitude": 1.0 },
//!     { "kind": "mollifier", "center": [0.2, 0.0], "radius": 0.25, "amplitude": 1.0 },
//!     { "kind": "gaussian", "center": [0.0, 0.0], "radius": 0.2, "amplitude": 0.5, "truncation": 0.95 }
//!   ]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inversion::ReconImage;
use crate::scalar::{Cx, Real};

/// Anything that can be integrated along curves: a real field with known support.
pub trait Density<T: Real>: Sync {
    fn value(&self, z: Cx<T>) -> T;
    /// Radius of a centred disc outside which the density vanishes.
    fn support_radius(&self) -> T;
}

/// A closure paired with a declared support radius.
pub struct FnDensity<F> {
    field: F,
    support: f64,
}

impl<F> FnDensity<F> {
    pub fn new(field: F, support: f64) -> Self {
        Self { field, support }
    }
}

impl<T: Real, F: Fn(Cx<T>) -> T + Sync> Density<T> for FnDensity<F> {
    fn value(&self, z: Cx<T>) -> T {
        (self.field)(z)
    }
    fn support_radius(&self) -> T {
        T::lit(self.support)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BumpKind {
    Gaussian,
    Mollifier,
}

/// Tail level that fixes the default Gaussian truncation radius.
const DEFAULT_TAIL: f64 = 1e-14;
/// Largest tail accepted for an explicit Gaussian truncation radius.
const EXPLICIT_TAIL: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BumpSpec {
    pub kind: BumpKind,
    pub center: [f64; 2],
    pub radius: f64,
    pub amplitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<f64>,
}

impl BumpSpec {
    pub fn gaussian(center: [f64; 2], sigma: f64, amplitude: f64) -> Self {
        Self {
            kind: BumpKind::Gaussian,
            center,
            radius: sigma,
            amplitude,
            truncation: None,
        }
    }

    pub fn mollifier(center: [f64; 2], radius: f64, amplitude: f64) -> Self {
        Self {
            kind: BumpKind::Mollifier,
            center,
            radius,
            amplitude,
            truncation: None,
        }
    }

    pub fn truncated_at(mut self, radius: f64) -> Self {
        self.truncation = Some(radius);
        self
    }
}

/// On-disk phantom description.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PhantomSpec {
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub bumps: Vec<BumpSpec>,
}

fn default_delta() -> f64 {
    0.05
}

#[derive(Clone, Copy, Debug)]
struct Bump<T> {
    kind: BumpKind,
    center: Cx<T>,
    radius: T,
    amplitude: T,
    cutoff: T,
}

impl<T: Real> Bump<T> {
    fn value(&self, z: Cx<T>) -> T {
        let distance_sqr = (z - self.center).norm_sqr();
        if distance_sqr >= self.cutoff * self.cutoff {
            return T::zero();
        }
        let scaled = distance_sqr / (self.radius * self.radius);
        match self.kind {
            BumpKind::Gaussian => self.amplitude * (-scaled).exp(),
            BumpKind::Mollifier => self.amplitude * (T::one() - T::one() / (T::one() - scaled)).exp(),
        }
    }
}

/// Validated sum of bumps supported in `|z| ≤ 1 − δ`.
#[derive(Clone, Debug)]
pub struct Phantom<T> {
    bumps: Vec<Bump<T>>,
    support_radius: T,
    delta: T,
    spec: PhantomSpec,
}

/// Attenuation maps share the phantom representation; values are real.
pub type AttenuationMap<T> = Phantom<T>;

impl<T: Real> Phantom<T> {
    /// Validates a specification.
    ///
    /// # Errors
    /// `SupportViolation` if a bump reaches beyond `1 − δ` or an explicit Gaussian
    /// truncation leaves a tail above 1e-9; `Format` for non-positive radii or
    /// non-finite values.
    pub fn from_spec(spec: PhantomSpec) -> Result<Self> {
        if !(spec.delta > 0.0 && spec.delta < 1.0) {
            return Err(Error::Format(format!("delta {} outside (0, 1)", spec.delta)));
        }
        let limit = 1.0 - spec.delta;
        let mut bumps = Vec::with_capacity(spec.bumps.len());
        let mut support: f64 = 0.0;
        for (index, bump) in spec.bumps.iter().enumerate() {
            let finite = bump.center.iter().all(|c| c.is_finite()) && bump.amplitude.is_finite();
            if !finite || !(bump.radius > 0.0) {
                return Err(Error::Format(format!("bump {index}: invalid center, radius or amplitude")));
            }
            let cutoff = match (bump.kind, bump.truncation) {
                (BumpKind::Mollifier, _) => bump.radius,
                (BumpKind::Gaussian, None) => bump.radius * (-DEFAULT_TAIL.ln()).sqrt(),
                (BumpKind::Gaussian, Some(cut)) => {
                    let tail = (-(cut / bump.radius).powi(2)).exp();
                    if !(cut > 0.0) || tail > EXPLICIT_TAIL {
                        return Err(Error::SupportViolation(format!(
                            "bump {index}: truncation {cut} leaves a Gaussian tail of {tail:e}"
                        )));
                    }
                    cut
                }
            };
            let reach = bump.center[0].hypot(bump.center[1]) + cutoff;
            if reach > limit + 1e-12 {
                return Err(Error::SupportViolation(format!(
                    "bump {index} reaches radius {reach:.6} beyond 1 - delta = {limit}"
                )));
            }
            support = support.max(reach);
            bumps.push(Bump {
                kind: bump.kind,
                center: Cx::new(T::lit(bump.center[0]), T::lit(bump.center[1])),
                radius: T::lit(bump.radius),
                amplitude: T::lit(bump.amplitude),
                cutoff: T::lit(cutoff),
            });
        }
        Ok(Self {
            bumps,
            support_radius: T::lit(support),
            delta: T::lit(spec.delta),
            spec,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_spec(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// The bundled default: a centred unit Gaussian with σ = 0.15.
    pub fn default_gaussian() -> Self {
        Self::from_spec(PhantomSpec {
            delta: 0.05,
            bumps: vec![BumpSpec::gaussian([0.0, 0.0], 0.15, 1.0)],
        })
        .expect("bundled phantom is valid")
    }

    /// The identically zero density.
    pub fn zero() -> Self {
        Self::from_spec(PhantomSpec {
            delta: 0.05,
            bumps: Vec::new(),
        })
        .expect("empty phantom is valid")
    }

    /// Evaluates the phantom; bumps are summed in declaration order.
    pub fn eval(&self, z: Cx<T>) -> T {
        self.bumps.iter().fold(T::zero(), |acc, bump| acc + bump.value(z))
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn spec(&self) -> &PhantomSpec {
        &self.spec
    }

    /// Largest absolute value of any single bump; bounds `‖f‖∞` when bumps do not overlap.
    pub fn peak(&self) -> T {
        self.bumps.iter().fold(T::zero(), |acc, bump| acc.max(bump.amplitude.abs()))
    }

    /// Phantom with one bump per entry, each scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let mut spec = self.spec.clone();
        for bump in &mut spec.bumps {
            bump.amplitude *= factor;
        }
        Self::from_spec(spec)
    }

    /// Individual bumps as single-bump phantoms, each with its centre and cut-off radius.
    pub(crate) fn components(&self) -> Vec<(Cx<T>, T, Self)> {
        self.spec
            .bumps
            .iter()
            .zip(&self.bumps)
            .map(|(spec, bump)| {
                let single = Self::from_spec(PhantomSpec {
                    delta: self.spec.delta,
                    bumps: vec![spec.clone()],
                })
                .expect("components of a valid phantom are valid");
                (bump.center, bump.cutoff, single)
            })
            .collect()
    }

    /// Samples the phantom on the reconstruction grid, zero outside `|z| ≤ 1 − δ`.
    pub fn rasterize(&self, n: usize, delta: T) -> Result<ReconImage<T>> {
        let mut image = ReconImage::empty(n, delta)?;
        for index in 0..n * n {
            if image.mask()[index] {
                let value = self.eval(image.pixel_center(index));
                image.set(index, value);
            }
        }
        Ok(image)
    }
}

impl<T: Real> Density<T> for Phantom<T> {
    fn value(&self, z: Cx<T>) -> T {
        self.eval(z)
    }
    fn support_radius(&self) -> T {
        self.support_radius
    }
}

/// Masked relative errors of a reconstruction against a reference density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ErrorMetrics {
    /// `‖img − ref‖₂ / ‖ref‖₂` over the mask.
    pub l2_rel: f64,
    /// `max|img − ref| / max|ref|` over the mask.
    pub linf_rel: f64,
}

/// Compares `image` against `reference` sampled at the same pixel centres.
///
/// # Errors
/// `InvalidGrid` if the mask is empty.
pub fn error_metrics<T: Real, D: Density<T> + ?Sized>(image: &ReconImage<T>, reference: &D) -> Result<ErrorMetrics> {
    let mut difference_sqr = 0.0;
    let mut reference_sqr = 0.0;
    let mut difference_max: f64 = 0.0;
    let mut reference_max: f64 = 0.0;
    let mut any = false;
    for (index, &inside) in image.mask().iter().enumerate() {
        if !inside {
            continue;
        }
        any = true;
        let expected = reference.value(image.pixel_center(index)).as_f64();
        let got = image.values()[index].as_f64();
        difference_sqr += (got - expected).powi(2);
        reference_sqr += expected * expected;
        difference_max = difference_max.max((got - expected).abs());
        reference_max = reference_max.max(expected.abs());
    }
    if !any {
        return Err(Error::InvalidGrid("reconstruction mask is empty".into()));
    }
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else if num > 0.0 { f64::INFINITY } else { 0.0 };
    Ok(ErrorMetrics {
        l2_rel: ratio(difference_sqr.sqrt(), reference_sqr.sqrt()),
        linf_rel: ratio(difference_max, reference_max),
    })
}
