//! Numerical certification of the admissibility conditions of a family.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::zeros::winding_number;
use crate::geometry::{
    count_zeros, eval_coeffs, mu_ratio, rho_log_derivative, Coefficient, ContourOptions, CurveFamily,
};
use crate::scalar::{unit, Cx, Real};

/// Outcome of one admissibility condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Per-condition results of [`check_type_h`].
#[derive(Clone, Debug, Serialize)]
pub struct TypeHReport {
    pub family: String,
    pub conditions: Vec<ConditionReport>,
}

impl TypeHReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|condition| condition.passed)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.conditions
            .iter()
            .filter(|condition| !condition.passed)
            .map(|condition| condition.name.as_str())
            .collect()
    }

    pub fn condition(&self, name: &str) -> Option<&ConditionReport> {
        self.conditions.iter().find(|condition| condition.name == name)
    }
}

/// Deterministic sample points and λ values: 8 disc points, 24 interior λ on
/// four radii and 8 boundary λ.
pub fn default_type_h_samples<T: Real>() -> (Vec<Cx<T>>, Vec<Cx<T>>) {
    let points = [
        (0.1, 0.05),
        (-0.3, 0.2),
        (0.45, -0.35),
        (-0.6, -0.1),
        (0.0, 0.7),
        (0.75, 0.1),
        (-0.2, -0.55),
        (0.33, 0.0),
    ]
    .iter()
    .map(|&(re, im)| Cx::new(T::lit(re), T::lit(im)))
    .collect();
    let mut lambdas = Vec::new();
    for radius in [0.2, 0.45, 0.7, 0.9] {
        for k in 0..6 {
            let angle = 0.3 + k as f64 * std::f64::consts::FRAC_PI_3;
            lambdas.push(Cx::from_polar(T::lit(radius), T::lit(angle)));
        }
    }
    for k in 0..8 {
        lambdas.push(unit(T::lit(0.1 + k as f64 * std::f64::consts::FRAC_PI_4)));
    }
    (points, lambdas)
}

const NODES: usize = 64;
const NEGATIVE_MODES: i64 = 4;

/// Relative failure of `g` to be holomorphic near `center`: the larger of the
/// Cauchy reproduction error and the first few negative Fourier modes on the
/// circle `|λ − center| = radius`.
fn holomorphy_defect<T: Real, G>(g: &G, center: Cx<T>, radius: T) -> Result<T>
where
    G: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let step = T::TAU() / T::from_count(NODES);
    let samples = (0..NODES)
        .map(|k| {
            let angle = step * T::from_count(k);
            Ok((angle, g(center + Cx::from_polar(radius, angle))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let count = T::from_count(NODES);
    let at_center = g(center)?;
    let mean = samples.iter().fold(Cx::new(T::zero(), T::zero()), |acc, &(_, v)| acc + v) / count;
    let mut defect = (at_center - mean).norm();
    for order in 1..=NEGATIVE_MODES {
        let order = T::from_i64(order).expect("small order");
        let coefficient = samples
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, &(angle, v)| {
                acc + v * Cx::from_polar(T::one(), order * angle)
            })
            / count;
        defect = defect.max(coefficient.norm());
    }
    let scale = samples
        .iter()
        .fold(at_center.norm(), |acc, &(_, v)| acc.max(v.norm()))
        .max(T::min_positive_value());
    Ok(defect / scale)
}

/// Largest normalized Laurent coefficient of order ≤ −`from` on `|λ| = radius`,
/// relative to the largest coefficient overall. Small values mean the function
/// has at most a finite-order pole inside the circle and no branch cut on it.
fn laurent_tail<T: Real, G>(g: &G, radius: T, from: usize, to: usize, nodes: usize) -> Result<T>
where
    G: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let step = T::TAU() / T::from_count(nodes);
    let samples = (0..nodes)
        .map(|k| g(Cx::from_polar(radius, step * T::from_count(k))))
        .collect::<Result<Vec<_>>>()?;
    let forward = T::fft_plan(nodes, false);
    let mut spectrum = samples;
    forward(&mut spectrum);
    // spectrum[j] = Σ g_k e^{−2πijk/N}; negative Laurent order −m sits at index N − m.
    let peak = spectrum.iter().fold(T::zero(), |acc, v| acc.max(v.norm())).max(T::min_positive_value());
    let tail = (from..=to).fold(T::zero(), |acc, order| acc.max(spectrum[nodes - order].norm()));
    Ok(tail / peak)
}

struct Accumulator {
    name: &'static str,
    threshold: f64,
    residual: f64,
    failed: bool,
    note: Option<String>,
}

impl Accumulator {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self {
            name,
            threshold,
            residual: 0.0,
            failed: false,
            note: None,
        }
    }

    fn record<T: Real>(&mut self, value: Result<T>) {
        match value {
            Ok(v) => {
                let v = v.as_f64();
                if !v.is_finite() {
                    self.fail("non-finite residual".into());
                } else {
                    self.residual = self.residual.max(v);
                }
            }
            Err(err) => self.fail(err.to_string()),
        }
    }

    fn fail(&mut self, note: String) {
        self.failed = true;
        if self.note.is_none() {
            self.note = Some(note);
        }
    }

    fn finish(self, strict: bool) -> ConditionReport {
        let within = if strict {
            self.residual < self.threshold
        } else {
            self.residual <= self.threshold
        };
        ConditionReport {
            name: self.name.to_string(),
            residual: self.residual,
            threshold: self.threshold,
            passed: !self.failed && within,
            note: self.note,
        }
    }
}

/// Checks the admissibility conditions at the given samples.
///
/// Conditions, by report name:
/// - `xi-holomorphic`: local Cauchy test of `λ ↦ ξ(z, λ)`;
/// - `rho-zero-free`: zeros of `ρ` detected from jumps of its winding number over a sweep of radii;
/// - `ratio-holomorphic-with-zeros`: Cauchy test of `ξ/ρ` and at least one zero;
/// - `s-meromorphic`: Cauchy test of `s`, `s_z`, `s_z̄` plus Laurent-tail decay on two annuli;
/// - `boundary-modulus`: `||ξ/ρ| − 1|` on 512 boundary λ;
/// - `interior-contraction`: `|ξ/ρ| < 1` at the interior λ;
/// - `transport-annihilation`: `|ξ s_z + ρ s_z̄|` relative to its terms.
///
/// Never fails; evaluation errors are recorded as failures with a note.
pub fn check_type_h<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    sample_points: &[Cx<T>],
    sample_lambdas: &[Cx<T>],
) -> TypeHReport {
    let interior: Vec<Cx<T>> = sample_lambdas
        .iter()
        .copied()
        .filter(|l| l.norm() < T::one() - T::lit(1e-9) && l.norm() > T::lit(1e-6))
        .collect();
    let boundary: Vec<Cx<T>> = sample_lambdas
        .iter()
        .copied()
        .filter(|l| (l.norm() - T::one()).abs() <= T::lit(1e-9))
        .collect();

    let mut xi_holomorphic = Accumulator::new("xi-holomorphic", 1e-8);
    let mut rho_zero_free = Accumulator::new("rho-zero-free", 0.0);
    let mut ratio_holomorphic = Accumulator::new("ratio-holomorphic-with-zeros", 1e-8);
    let mut s_meromorphic = Accumulator::new("s-meromorphic", 1e-8);
    let mut boundary_modulus = Accumulator::new("boundary-modulus", 1e-10);
    let mut contraction = Accumulator::new("interior-contraction", 1.0);
    let mut annihilation = Accumulator::new("transport-annihilation", 1e-9);

    let options = ContourOptions::default();
    for &z in sample_points {
        let xi = |lambda: Cx<T>| -> Result<Cx<T>> {
            Ok(lambda * family.polarized(Coefficient::A, z / lambda, lambda * z.conj())?)
        };
        let ratio = |lambda: Cx<T>| mu_ratio(family, z, lambda);
        let s_value = |lambda: Cx<T>| Ok(eval_coeffs(family, z, lambda)?.s_lambda);
        let s_z = |lambda: Cx<T>| Ok(eval_coeffs(family, z, lambda)?.ds_dz);
        let s_zbar = |lambda: Cx<T>| Ok(eval_coeffs(family, z, lambda)?.ds_dzbar);

        for &lambda in &interior {
            let radius = lambda.norm().min(T::one() - lambda.norm()) * T::lit(0.5);
            xi_holomorphic.record(holomorphy_defect(&xi, lambda, radius));
            ratio_holomorphic.record(holomorphy_defect(&ratio, lambda, radius));
            s_meromorphic.record(holomorphy_defect(&s_value, lambda, radius));
            s_meromorphic.record(holomorphy_defect(&s_z, lambda, radius));
            s_meromorphic.record(holomorphy_defect(&s_zbar, lambda, radius));
            contraction.record(ratio(lambda).map(|r| r.norm()));
            annihilation.record(eval_coeffs(family, z, lambda).map(|c| {
                let scale = (c.xi * c.ds_dz).norm() + (c.rho * c.ds_dzbar).norm();
                c.transport_of_s().norm() / scale.max(T::min_positive_value())
            }));
        }
        for &lambda in &boundary {
            annihilation.record(eval_coeffs(family, z, lambda).map(|c| {
                let scale = (c.xi * c.ds_dz).norm() + (c.rho * c.ds_dzbar).norm();
                c.transport_of_s().norm() / scale.max(T::min_positive_value())
            }));
            boundary_modulus.record(ratio(lambda).map(|r| (r.norm() - T::one()).abs()));
        }
        for k in 0..512 {
            let lambda = unit(T::TAU() * T::from_count(k) / T::lit(512.0));
            boundary_modulus.record(ratio(lambda).map(|r| (r.norm() - T::one()).abs()));
        }

        for radius in [0.5, 0.9] {
            let radius = T::lit(radius);
            for g in [&s_value as &dyn Fn(Cx<T>) -> Result<Cx<T>>, &s_z, &s_zbar] {
                s_meromorphic.record(laurent_tail(&g, radius, 24, 64, 256));
            }
        }

        match count_zeros(family, z, &options) {
            Ok(0) => ratio_holomorphic.fail(format!("no zeros of xi/rho at z = {z}")),
            Ok(_) => {}
            Err(err) => ratio_holomorphic.fail(err.to_string()),
        }

        rho_zero_free.record(rho_zero_count(family, z).map(T::from_count));
    }

    TypeHReport {
        family: family.name().to_string(),
        conditions: vec![
            xi_holomorphic.finish(true),
            rho_zero_free.finish(false),
            ratio_holomorphic.finish(true),
            s_meromorphic.finish(true),
            boundary_modulus.finish(true),
            contraction.finish(true),
            annihilation.finish(true),
        ],
    }
}

/// Zeros of `ρ(z, ·)` inside the unit λ-disc, detected as increases of the
/// winding number of `ρ` over a sweep of radii (poles only ever decrease it).
fn rho_zero_count<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, z: Cx<T>) -> Result<usize> {
    let options = ContourOptions {
        nodes: 256,
        max_doublings: 3,
        integer_tolerance: 1e-6,
    };
    let log_derivative = |lambda: Cx<T>| rho_log_derivative(family, z, lambda);
    let origin = Cx::new(T::zero(), T::zero());
    let radii = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.97, 0.995];
    let mut previous: Option<i64> = None;
    let mut zeros = 0usize;
    for radius in radii {
        let radius = T::lit(radius);
        let winding = winding_number(&log_derivative, origin, radius, &options)
            .or_else(|_| winding_number(&log_derivative, origin, radius * T::lit(1.013), &options))?
            .0;
        let increase = match previous {
            None => winding.max(0),
            Some(before) => (winding - before).max(0),
        };
        zeros += increase as usize;
        previous = Some(winding);
    }
    Ok(zeros)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EuclideanLines, HyperbolicGeodesics, Jet};

    /// Lines with `B ≡ 2`, so `|ξ/ρ| = 1/2` on the unit circle.
    struct HalfModulus;

    impl CurveFamily<f64> for HalfModulus {
        fn name(&self) -> &str {
            "half-modulus"
        }
        fn polarized(&self, which: Coefficient, w1: Cx<f64>, w2: Cx<f64>) -> Result<Cx<f64>> {
            Ok(match which {
                Coefficient::B => Cx::new(2.0, 0.0),
                other => CurveFamily::<f64>::polarized(&EuclideanLines, other, w1, w2)?,
            })
        }
        fn polarized_jet(&self, which: Coefficient, w1: Cx<f64>, w2: Cx<f64>) -> Result<Jet<f64>> {
            let mut jet = CurveFamily::<f64>::polarized_jet(&EuclideanLines, which, w1, w2)?;
            if which == Coefficient::B {
                jet.value = Cx::new(2.0, 0.0);
            }
            Ok(jet)
        }
        fn curve(&self, t: f64, s: f64) -> Result<Cx<f64>> {
            Ok(Cx::new(t, -s))
        }
        fn s_range(&self, radius: f64) -> (f64, f64) {
            (-radius, radius)
        }
        fn t_limits(&self, s: f64, radius: f64) -> Option<(f64, f64)> {
            CurveFamily::<f64>::t_limits(&EuclideanLines, s, radius)
        }
    }

    #[test]
    fn lines_pass_every_condition() {
        let (points, lambdas) = default_type_h_samples::<f64>();
        let report = check_type_h(&EuclideanLines, &points, &lambdas);
        assert!(report.passed(), "{report:#?}");
    }

    #[test]
    fn hyperbolic_passes_every_condition() {
        let (points, lambdas) = default_type_h_samples::<f64>();
        let report = check_type_h(&HyperbolicGeodesics, &points, &lambdas);
        assert!(report.passed(), "{report:#?}");
    }

    #[test]
    fn constant_b_two_fails_boundary_modulus() {
        let (points, lambdas) = default_type_h_samples::<f64>();
        let report = check_type_h(&HalfModulus, &points, &lambdas);
        let modulus = report.condition("boundary-modulus").unwrap();
        assert!(!modulus.passed);
        assert!((modulus.residual - 0.5).abs() < 1e-12);
        assert!(report.condition("xi-holomorphic").unwrap().passed);
    }

    #[test]
    fn laurent_tail_flags_branch_cut() {
        let tail = laurent_tail(&|l: Cx<f64>| Ok((l - 0.3).ln()), 0.5, 24, 64, 256).unwrap();
        assert!(tail > 1e-4);
        let pole = laurent_tail(&|l: Cx<f64>| Ok(l.inv() + l), 0.5, 24, 64, 256).unwrap();
        assert!(pole < 1e-12);
    }
}
