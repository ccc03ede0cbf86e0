//! One-dimensional quadrature rules: adaptive Gauss–Kronrod for complex-valued
//! integrands, composite trapezoid sums and periodic contour means.

use crate::scalar::{Cx, Real};

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for [`integrate_adaptive`].
#[derive(Clone, Copy, Debug)]
pub struct Tolerance<T> {
    pub absolute: T,
    pub relative: T,
    pub max_intervals: usize,
}

impl<T: Real> Tolerance<T> {
    pub fn new(absolute: T, relative: T) -> Self {
        Self {
            absolute,
            relative,
            max_intervals: 400,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Integral<T> {
    pub value: Cx<T>,
    pub error: T,
    pub converged: bool,
}

struct Panel<T> {
    lo: T,
    hi: T,
    value: Cx<T>,
    error: T,
}

fn kronrod_panel<T: Real, F>(integrand: &mut F, lo: T, hi: T) -> Panel<T>
where
    F: FnMut(T) -> Cx<T>,
{
    let half = (hi - lo) / T::lit(2.0);
    let mid = lo + half;
    let mut kronrod = Cx::new(T::zero(), T::zero());
    let mut gauss = Cx::new(T::zero(), T::zero());
    for (k, (&node, &weight)) in KRONROD_NODES.iter().zip(&KRONROD_WEIGHTS).enumerate() {
        let offset = half * T::lit(node);
        let samples = if k == 7 {
            integrand(mid)
        } else {
            integrand(mid - offset) + integrand(mid + offset)
        };
        kronrod = kronrod + samples * T::lit(weight);
        if k % 2 == 1 {
            gauss = gauss + samples * T::lit(GAUSS_WEIGHTS[k / 2]);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { lo, hi, value, error }
}

/// Globally adaptive 15-point Gauss–Kronrod integration over `[lo, hi]`.
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate meets `max(absolute, relative·|value|)` or the panel budget runs out;
/// `converged` reports which.
pub fn integrate_adaptive<T: Real, F>(mut integrand: F, lo: T, hi: T, tol: Tolerance<T>) -> Integral<T>
where
    F: FnMut(T) -> Cx<T>,
{
    let mut panels = vec![kronrod_panel(&mut integrand, lo, hi)];
    loop {
        let value = panels
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, panel| acc + panel.value);
        let error = panels.iter().fold(T::zero(), |acc, panel| acc + panel.error);
        let target = tol.absolute.max(tol.relative * value.norm());
        if error <= target || panels.len() >= tol.max_intervals {
            return Integral {
                value,
                error,
                converged: error <= target,
            };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.partial_cmp(&b.1.error).unwrap_or(std::cmp::Ordering::Equal))
            .map(|(index, _)| index)
            .unwrap_or(0);
        let panel = panels.swap_remove(worst);
        let mid = (panel.lo + panel.hi) / T::lit(2.0);
        if !(mid > panel.lo && mid < panel.hi) {
            // Panel can no longer be split in this precision.
            panels.push(panel);
            let value = panels
                .iter()
                .fold(Cx::new(T::zero(), T::zero()), |acc, p| acc + p.value);
            let error = panels.iter().fold(T::zero(), |acc, p| acc + p.error);
            return Integral {
                value,
                error,
                converged: false,
            };
        }
        panels.push(kronrod_panel(&mut integrand, panel.lo, mid));
        panels.push(kronrod_panel(&mut integrand, mid, panel.hi));
    }
}

/// Composite trapezoid sum of equally spaced samples with spacing `step`.
pub fn trapezoid<T: Real>(samples: &[T], step: T) -> T {
    match samples.len() {
        0 | 1 => T::zero(),
        n => {
            let interior = samples[1..n - 1].iter().fold(T::zero(), |acc, &v| acc + v);
            step * (interior + (samples[0] + samples[n - 1]) / T::lit(2.0))
        }
    }
}

/// Mean of `g` over `nodes` equispaced points of the circle `|λ − center| = radius`,
/// which is the trapezoid value of `(1/2πi)∮ g(λ)/(λ − center) dλ`.
pub fn circle_mean<T: Real, G>(mut g: G, center: Cx<T>, radius: T, nodes: usize) -> Cx<T>
where
    G: FnMut(Cx<T>) -> Cx<T>,
{
    let step = T::TAU() / T::from_count(nodes);
    let mut sum = Cx::new(T::zero(), T::zero());
    for k in 0..nodes {
        let angle = step * T::from_count(k);
        sum = sum + g(center + Cx::from_polar(radius, angle));
    }
    sum / T::from_count(nodes)
}

/// Fourier coefficient of `g` on the circle `|λ − center| = radius`:
/// `mean(g(center + r e^{iφ}) e^{−ikφ})`, i.e. `c_k r^k` of the Laurent expansion.
pub fn circle_coefficient<T: Real, G>(mut g: G, center: Cx<T>, radius: T, order: i64, nodes: usize) -> Cx<T>
where
    G: FnMut(Cx<T>) -> Cx<T>,
{
    let step = T::TAU() / T::from_count(nodes);
    let order = T::from_i64(order).expect("small integer");
    let mut sum = Cx::new(T::zero(), T::zero());
    for k in 0..nodes {
        let angle = step * T::from_count(k);
        sum = sum + g(center + Cx::from_polar(radius, angle)) * Cx::from_polar(T::one(), -order * angle);
    }
    sum / T::from_count(nodes)
}
