//! Counting and locating the zeros of `λ ↦ ξ/ρ(z, λ)` in the unit λ-disc.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::geometry::{ratio_with_log_derivative, require_interior, CurveFamily, DiscPoint};
use crate::scalar::{Cx, Real};

/// Discretization of the contour integrals on `|λ| = 1`.
#[derive(Clone, Copy, Debug)]
pub struct ContourOptions {
    /// Trapezoid nodes on the unit circle.
    pub nodes: usize,
    /// How many times the node count may double before giving up.
    pub max_doublings: usize,
    /// Maximum distance of the winding sum from an integer.
    pub integer_tolerance: f64,
}

impl Default for ContourOptions {
    fn default() -> Self {
        Self {
            nodes: 2048,
            max_doublings: 3,
            integer_tolerance: 1e-6,
        }
    }
}

/// Zeros `λ_i` with multiplicities and the unimodular factor `ζ` of
/// `ξ/ρ = ζ·Π((λ − λ_i)/(1 − conj(λ_i)λ))^{m_i}`.
#[derive(Clone, Debug)]
pub struct ZeroSet<T> {
    /// Sorted by modulus, then by argument in `[0, 2π)`.
    pub zeros: Vec<(Cx<T>, usize)>,
    pub unimodular_factor: Cx<T>,
    pub at_point: DiscPoint<T>,
}

impl<T: Real> ZeroSet<T> {
    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|&(_, multiplicity)| multiplicity).sum()
    }

    /// The Blaschke product `ζ·Π((λ − λ_i)/(1 − conj(λ_i)λ))^{m_i}`.
    pub fn blaschke(&self, lambda: Cx<T>) -> Cx<T> {
        self.zeros
            .iter()
            .fold(self.unimodular_factor, |acc, &(zero, multiplicity)| {
                acc * blaschke_factor(zero, lambda).powi(multiplicity as i32)
            })
    }
}

fn blaschke_factor<T: Real>(zero: Cx<T>, lambda: Cx<T>) -> Cx<T> {
    (lambda - zero) / (Cx::new(T::one(), T::zero()) - zero.conj() * lambda)
}

/// `(cos, sin)` of equally spaced angles.
type DirectionTable = Arc<Vec<(f64, f64)>>;

/// Unit directions `e^{2πik/nodes}`, computed once per node count.
fn unit_directions(nodes: usize) -> DirectionTable {
    static TABLES: OnceLock<Mutex<HashMap<usize, DirectionTable>>> = OnceLock::new();
    let mut tables = TABLES
        .get_or_init(Default::default)
        .lock()
        .unwrap_or_else(|poisoned| poisoned.into_inner());
    tables
        .entry(nodes)
        .or_insert_with(|| {
            let step = std::f64::consts::TAU / nodes as f64;
            Arc::new((0..nodes).map(|k| (step * k as f64).sin_cos()).map(|(sin, cos)| (cos, sin)).collect())
        })
        .clone()
}

/// Trapezoid samples of a contour integral over `|λ − center| = radius`:
/// the nodes `λ_k` and `g(λ_k)·(λ_k − center)/nodes`, so that
/// `Σ_k λ_k^p·weighted_k ≈ (1/2πi)∮ λ^p g(λ) dλ`.
pub(crate) struct ContourSamples<T> {
    points: Vec<Cx<T>>,
    weighted: Vec<Cx<T>>,
}

impl<T: Real> ContourSamples<T> {
    fn collect<G>(g: &G, center: Cx<T>, radius: T, nodes: usize) -> Result<Self>
    where
        G: Fn(Cx<T>) -> Result<Cx<T>>,
    {
        let count = T::from_count(nodes);
        let mut points = Vec::with_capacity(nodes);
        let mut weighted = Vec::with_capacity(nodes);
        for &(cos, sin) in unit_directions(nodes).iter() {
            let offset = Cx::new(T::lit(cos), T::lit(sin)) * radius;
            let lambda = center + offset;
            weighted.push(g(lambda)? * offset / count);
            points.push(lambda);
        }
        Ok(Self { points, weighted })
    }

    /// `(1/2πi)∮ g dλ`.
    fn integral(&self) -> Cx<T> {
        self.weighted.iter().fold(Cx::new(T::zero(), T::zero()), |acc, &w| acc + w)
    }

    /// `(1/2πi)∮ λ^p g dλ` for `p = 1..=max_power`.
    fn power_moments(&self, max_power: usize) -> Vec<Cx<T>> {
        let mut moments = vec![Cx::new(T::zero(), T::zero()); max_power];
        for (&lambda, &weight) in self.points.iter().zip(&self.weighted) {
            let mut term = weight;
            for moment in moments.iter_mut() {
                term = term * lambda;
                *moment = *moment + term;
            }
        }
        moments
    }

    /// `(1/2πi)∮ (λ − center) g dλ`.
    fn centred_moment(&self, center: Cx<T>) -> Cx<T> {
        self.points
            .iter()
            .zip(&self.weighted)
            .fold(Cx::new(T::zero(), T::zero()), |acc, (&lambda, &weight)| acc + (lambda - center) * weight)
    }
}

/// Integer winding of a logarithmic derivative around a circle, doubling the
/// node count while the sum is not integer-close. Returns the winding and the
/// samples that achieved it.
pub(crate) fn winding_number<T: Real, G>(
    log_derivative: &G,
    center: Cx<T>,
    radius: T,
    options: &ContourOptions,
) -> Result<(i64, ContourSamples<T>)>
where
    G: Fn(Cx<T>) -> Result<Cx<T>>,
{
    let mut nodes = options.nodes;
    let mut last = (f64::NAN, f64::INFINITY);
    for _ in 0..=options.max_doublings {
        let samples = ContourSamples::collect(log_derivative, center, radius, nodes)?;
        let value = samples.integral();
        let (re, im) = (value.re.as_f64(), value.im.as_f64());
        let nearest = re.round();
        let distance = (re - nearest).hypot(im);
        if distance <= options.integer_tolerance {
            return Ok((nearest as i64, samples));
        }
        last = (re, distance);
        nodes *= 2;
    }
    Err(Error::NonIntegerWinding {
        value: last.0,
        distance: last.1,
        nodes: nodes / 2,
    })
}

fn count_with_samples<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    options: &ContourOptions,
) -> Result<(usize, ContourSamples<T>)> {
    require_interior(z)?;
    let log_derivative = |lambda: Cx<T>| Ok(ratio_with_log_derivative(family, z, lambda)?.1);
    let origin = Cx::new(T::zero(), T::zero());
    let (winding, samples) = winding_number(&log_derivative, origin, T::one(), options)?;
    if winding < 0 {
        return Err(Error::TypeHViolation {
            family: family.name().to_string(),
            failed: format!("xi/rho has net winding {winding} on the unit circle"),
        });
    }
    Ok((winding as usize, samples))
}

/// Number of zeros of `ξ/ρ(z, ·)` in the unit λ-disc, counted with multiplicity,
/// by the argument principle on `|λ| = 1`.
///
/// # Errors
/// `NonIntegerWinding` if the contour sum stays away from an integer after all
/// doublings; `TypeHViolation` if the winding is negative.
pub fn count_zeros<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    options: &ContourOptions,
) -> Result<usize> {
    Ok(count_with_samples(family, z, options)?.0)
}

/// Roots of the monic polynomial with power sums `sums[k-1] = Σ λ_i^k`.
fn roots_from_power_sums<T: Real>(sums: &[Cx<T>]) -> Vec<Cx<T>> {
    let degree = sums.len();
    // Newton identities: k·e_k = Σ_{i=1..k} (−1)^{i−1} e_{k−i} p_i.
    let mut elementary = vec![Cx::new(T::one(), T::zero())];
    for k in 1..=degree {
        let mut acc = Cx::new(T::zero(), T::zero());
        for i in 1..=k {
            let term = elementary[k - i] * sums[i - 1];
            acc = if i % 2 == 1 { acc + term } else { acc - term };
        }
        elementary.push(acc / T::from_count(k));
    }
    match degree {
        0 => Vec::new(),
        1 => vec![elementary[1]],
        2 => {
            let two = T::lit(2.0);
            let root = (elementary[1] * elementary[1] - elementary[2] * T::lit(4.0)).sqrt();
            vec![(elementary[1] + root) / two, (elementary[1] - root) / two]
        }
        _ => {
            // Monic coefficients of λ^{degree−j}: (−1)^j e_j.
            let coefficients: Vec<Cx<T>> = (0..=degree)
                .map(|j| if j % 2 == 0 { elementary[j] } else { -elementary[j] })
                .collect();
            durand_kerner(&coefficients)
        }
    }
}

fn durand_kerner<T: Real>(coefficients: &[Cx<T>]) -> Vec<Cx<T>> {
    let degree = coefficients.len() - 1;
    let eval = |x: Cx<T>| coefficients.iter().fold(Cx::new(T::zero(), T::zero()), |acc, &c| acc * x + c);
    let seed = Cx::new(T::lit(0.4), T::lit(0.9));
    let mut roots: Vec<Cx<T>> = (0..degree).map(|k| seed.powi(k as i32) * T::lit(0.5)).collect();
    for _ in 0..500 {
        let mut largest_step = T::zero();
        for k in 0..degree {
            let mut denominator = Cx::new(T::one(), T::zero());
            for j in 0..degree {
                if j != k {
                    denominator = denominator * (roots[k] - roots[j]);
                }
            }
            if denominator.norm() == T::zero() {
                denominator = Cx::new(T::lit(1e-300), T::zero());
            }
            let step = eval(roots[k]) / denominator;
            roots[k] = roots[k] - step;
            largest_step = largest_step.max(step.norm());
        }
        if largest_step < T::lit(1e-15) {
            break;
        }
    }
    roots
}

const CLUSTER_RADIUS: f64 = 1e-4;
const ORIGIN_SNAP: f64 = 1e-12;
const NEWTON_TOLERANCE: f64 = 1e-10;
const NEWTON_ITERATIONS: usize = 100;
const RESIDUAL_LIMIT: f64 = 1e-9;

fn cluster<T: Real>(mut roots: Vec<Cx<T>>) -> Vec<(Cx<T>, usize)> {
    roots.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let mut groups: Vec<(Cx<T>, Vec<Cx<T>>)> = Vec::new();
    for root in roots {
        match groups
            .iter_mut()
            .find(|(anchor, _)| (*anchor - root).norm() < T::lit(CLUSTER_RADIUS))
        {
            Some((_, members)) => members.push(root),
            None => groups.push((root, vec![root])),
        }
    }
    groups
        .into_iter()
        .map(|(_, members)| {
            let count = members.len();
            let sum = members.into_iter().fold(Cx::new(T::zero(), T::zero()), |acc, m| acc + m);
            (sum / T::from_count(count), count)
        })
        .collect()
}

/// Modified Newton iteration `λ ← λ − m·F/F'` for a zero of multiplicity `m`.
fn polish<T: Real, F: CurveFamily<T> + ?Sized>(family: &F, z: Cx<T>, start: Cx<T>, multiplicity: usize) -> Option<Cx<T>> {
    let mut lambda = start;
    let weight = T::from_count(multiplicity);
    for _ in 0..NEWTON_ITERATIONS {
        if lambda.norm() < T::lit(ORIGIN_SNAP) {
            return Some(Cx::new(T::zero(), T::zero()));
        }
        let (ratio, log_derivative) = ratio_with_log_derivative(family, z, lambda).ok()?;
        if ratio.norm() == T::zero() {
            return Some(lambda);
        }
        let step = Cx::new(weight, T::zero()) / log_derivative;
        if !step.re.is_finite() || !step.im.is_finite() {
            return None;
        }
        lambda = lambda - step;
        if lambda.norm() >= T::one() {
            return None;
        }
        if step.norm() < T::lit(NEWTON_TOLERANCE) {
            return Some(lambda);
        }
    }
    None
}

/// Locates the zeros of `ξ/ρ(z, ·)` in the unit λ-disc together with the
/// unimodular factor of its Blaschke-product form.
///
/// Power sums of the zeros come from contour moments on `|λ| = 1`; the roots
/// of the resulting polynomial are grouped into clusters, each cluster is
/// re-centred by a local contour integral and polished by modified Newton.
///
/// # Errors
/// `ZeroClusterUnresolved` if a cluster neither converges under Newton nor
/// leaves a residual `|ξ/ρ| < 1e-9`; `NotBlaschke` if `|ζ|` differs from 1 by
/// more than 1e-8; plus the errors of [`count_zeros`].
pub fn find_zeros<T: Real, F: CurveFamily<T> + ?Sized>(
    family: &F,
    z: Cx<T>,
    options: &ContourOptions,
) -> Result<ZeroSet<T>> {
    let (count, samples) = count_with_samples(family, z, options)?;
    let log_derivative = |lambda: Cx<T>| Ok(ratio_with_log_derivative(family, z, lambda)?.1);
    let origin = Cx::new(T::zero(), T::zero());
    let sums = samples.power_moments(count);
    let clusters = cluster(roots_from_power_sums(&sums));

    let mut zeros = Vec::with_capacity(clusters.len());
    for (index, &(center, multiplicity)) in clusters.iter().enumerate() {
        let unresolved = || Error::ZeroClusterUnresolved {
            re: center.re.as_f64(),
            im: center.im.as_f64(),
        };
        let neighbour = clusters
            .iter()
            .enumerate()
            .filter(|&(other, _)| other != index)
            .map(|(_, &(c, _))| (c - center).norm())
            .fold(T::infinity(), T::min);
        let radius = T::lit(1e-3)
            .min(neighbour * T::lit(0.3))
            .min((T::one() - center.norm()) * T::lit(0.5));
        let local_options = ContourOptions {
            nodes: 64,
            ..*options
        };
        let (local, local_samples) =
            winding_number(&log_derivative, center, radius, &local_options).map_err(|_| unresolved())?;
        if local != multiplicity as i64 {
            return Err(unresolved());
        }
        let centroid = local_samples.centred_moment(center) / T::from_count(multiplicity) + center;
        let located = match polish(family, z, centroid, multiplicity) {
            Some(lambda) => lambda,
            None if centroid.norm() < T::lit(ORIGIN_SNAP) => origin,
            None => {
                let (ratio, _) = ratio_with_log_derivative(family, z, centroid).map_err(|_| unresolved())?;
                if ratio.norm() < T::lit(RESIDUAL_LIMIT) {
                    centroid
                } else {
                    return Err(unresolved());
                }
            }
        };
        zeros.push((located, multiplicity));
    }
    sort_zeros(&mut zeros);

    // Probe away from every zero.
    let probe = (0..7)
        .map(|k| Cx::from_polar(T::lit(0.5), T::lit(0.3) + T::TAU() * T::from_count(k) / T::lit(7.0)))
        .max_by(|a, b| {
            let clearance = |p: &Cx<T>| zeros.iter().map(|(w, _)| (*w - *p).norm()).fold(T::infinity(), T::min);
            clearance(a).partial_cmp(&clearance(b)).unwrap_or(std::cmp::Ordering::Equal)
        })
        .expect("seven probe candidates");
    let (ratio, _) = ratio_with_log_derivative(family, z, probe)?;
    let product = zeros.iter().fold(Cx::new(T::one(), T::zero()), |acc, &(zero, multiplicity)| {
        acc * blaschke_factor(zero, probe).powi(multiplicity as i32)
    });
    let unimodular_factor = ratio / product;
    if (unimodular_factor.norm() - T::one()).abs() > T::lit(1e-8) {
        return Err(Error::NotBlaschke(unimodular_factor.norm().as_f64()));
    }
    Ok(ZeroSet {
        zeros,
        unimodular_factor: unimodular_factor / unimodular_factor.norm(),
        at_point: DiscPoint::interior(z.re, z.im)?,
    })
}

fn sort_zeros<T: Real>(zeros: &mut [(Cx<T>, usize)]) {
    let argument = |w: Cx<T>| {
        let angle = w.arg();
        if angle < T::zero() {
            angle + T::TAU()
        } else {
            angle
        }
    };
    zeros.sort_by(|a, b| {
        let (ma, mb) = (a.0.norm(), b.0.norm());
        if (ma - mb).abs() > T::lit(1e-9) {
            ma.partial_cmp(&mb).unwrap_or(std::cmp::Ordering::Equal)
        } else {
            argument(a.0).partial_cmp(&argument(b.0)).unwrap_or(std::cmp::Ordering::Equal)
        }
    });
}

type CellMap<T> = HashMap<(i64, i64), Arc<ZeroSet<T>>>;

/// Per-point cache of [`ZeroSet`]s for one family, keyed on cells of a square
/// lattice. An entry is reused only for the exact point it was computed at;
/// a different point in the same cell overwrites it.
pub struct ZeroCache<T> {
    family: String,
    cell: T,
    options: ContourOptions,
    entries: RwLock<CellMap<T>>,
}

impl<T: Real> ZeroCache<T> {
    pub fn new(family: &str, cell: T, options: ContourOptions) -> Self {
        Self {
            family: family.to_string(),
            cell,
            options,
            entries: RwLock::new(HashMap::new()),
        }
    }

    fn key(&self, z: Cx<T>) -> (i64, i64) {
        let index = |x: T| (x / self.cell).floor().to_i64().unwrap_or(i64::MIN);
        (index(z.re), index(z.im))
    }

    /// Cached zeros at `z`, computing them on a miss.
    ///
    /// # Errors
    /// `GridMismatch` if `family` is not the family the cache was built for.
    pub fn get_or_compute<F: CurveFamily<T> + ?Sized>(&self, family: &F, z: Cx<T>) -> Result<Arc<ZeroSet<T>>> {
        if family.name() != self.family {
            return Err(Error::GridMismatch(format!(
                "zero cache built for `{}` queried with `{}`",
                self.family,
                family.name()
            )));
        }
        let key = self.key(z);
        if let Ok(entries) = self.entries.read() {
            if let Some(hit) = entries.get(&key) {
                if hit.at_point.as_complex() == z {
                    return Ok(Arc::clone(hit));
                }
            }
        }
        let computed = Arc::new(find_zeros(family, z, &self.options)?);
        if let Ok(mut entries) = self.entries.write() {
            entries.insert(key, Arc::clone(&computed));
        }
        Ok(computed)
    }

    pub fn len(&self) -> usize {
        self.entries.read().map(|entries| entries.len()).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Coefficient, EuclideanLines, HyperbolicGeodesics};

    /// `ξ/ρ = ζ·(λ − a)/(1 − a λ)` for a fixed real `a`, independent of `z`.
    struct SingleFactor {
        zero: f64,
    }

    impl CurveFamily<f64> for SingleFactor {
        fn name(&self) -> &str {
            "single-factor"
        }
        fn polarized(&self, which: Coefficient, w1: Cx<f64>, w2: Cx<f64>) -> Result<Cx<f64>> {
            // With B = 1 the ratio is λ²A; tests fix z = 0.5, so λ = w2/0.5.
            let lambda = w2 / 0.5;
            let _ = w1;
            Ok(match which {
                Coefficient::A => (lambda - self.zero) / (lambda * lambda * (1.0 - self.zero * lambda)),
                Coefficient::B => Cx::new(1.0, 0.0),
                Coefficient::S | Coefficient::T => Cx::new(0.0, 0.0),
            })
        }
        fn curve(&self, t: f64, s: f64) -> Result<Cx<f64>> {
            Ok(Cx::new(t, -s))
        }
        fn s_range(&self, radius: f64) -> (f64, f64) {
            (-radius, radius)
        }
        fn t_limits(&self, _s: f64, _radius: f64) -> Option<(f64, f64)> {
            None
        }
    }

    #[test]
    fn lines_have_a_double_zero_at_origin() {
        let options = ContourOptions::default();
        let z = Cx::new(0.3, -0.2);
        assert_eq!(count_zeros(&EuclideanLines, z, &options).unwrap(), 2);
        let set: ZeroSet<f64> = find_zeros(&EuclideanLines, z, &options).unwrap();
        assert_eq!(set.zeros.len(), 1);
        assert_eq!(set.zeros[0].1, 2);
        assert!(set.zeros[0].0.norm() < 1e-12);
        assert!((set.unimodular_factor.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_blaschke_factor_is_found() {
        let family = SingleFactor { zero: 0.5 };
        let options = ContourOptions::default();
        let z = Cx::new(0.5, 0.0);
        assert_eq!(count_zeros(&family, z, &options).unwrap(), 1);
        let set = find_zeros(&family, z, &options).unwrap();
        assert_eq!(set.zeros.len(), 1);
        assert!((set.zeros[0].0 - Cx::new(0.5, 0.0)).norm() < 1e-10);
        assert_eq!(set.zeros[0].1, 1);
    }

    #[test]
    fn hyperbolic_zeros_are_plus_minus_z() {
        let options = ContourOptions::default();
        let z = Cx::new(0.2, 0.1);
        let set = find_zeros(&HyperbolicGeodesics, z, &options).unwrap();
        assert_eq!(set.total_multiplicity(), count_zeros(&HyperbolicGeodesics, z, &options).unwrap());
        assert_eq!(set.zeros.len(), 2);
        for &(zero, multiplicity) in &set.zeros {
            assert_eq!(multiplicity, 1);
            let residual = crate::geometry::mu_ratio(&HyperbolicGeodesics, z, zero).unwrap();
            assert!(residual.norm() < 1e-9);
            assert!((zero - z).norm() < 1e-10 || (zero + z).norm() < 1e-10);
        }
        // Equal moduli: ordered by argument in [0, 2π), so z (arg ≈ 0.46) comes first.
        assert!((set.zeros[0].0 - z).norm() < 1e-10);
    }

    #[test]
    fn blaschke_form_reproduces_ratio() {
        let options = ContourOptions::default();
        let z = Cx::new(-0.4, 0.3);
        let set = find_zeros(&HyperbolicGeodesics, z, &options).unwrap();
        for k in 0..12 {
            let lambda = Cx::from_polar(0.15 + 0.07 * k as f64, 0.5 * k as f64);
            let direct = crate::geometry::mu_ratio(&HyperbolicGeodesics, z, lambda).unwrap();
            assert!((direct - set.blaschke(lambda)).norm() < 1e-7);
        }
    }

    #[test]
    fn hyperbolic_near_centre_resolves() {
        let options = ContourOptions::default();
        for z in [Cx::new(3e-3, 2e-3), Cx::new(1e-6, 0.0)] {
            let set = find_zeros(&HyperbolicGeodesics, z, &options).unwrap();
            assert_eq!(set.total_multiplicity(), 2);
        }
    }

    #[test]
    fn durand_kerner_finds_cubic_roots() {
        let roots = [Cx::new(0.1, 0.2), Cx::new(-0.3, 0.0), Cx::new(0.2, -0.5)];
        let sums: Vec<Cx<f64>> = (1..=3).map(|k| roots.iter().map(|r| r.powi(k)).sum()).collect();
        let found = roots_from_power_sums(&sums);
        for root in roots {
            assert!(found.iter().any(|f| (*f - root).norm() < 1e-12));
        }
    }

    #[test]
    fn cache_reuses_exact_points_only() {
        let cache = ZeroCache::new("hyperbolic-geodesics", 0.1, ContourOptions::default());
        let first = cache.get_or_compute(&HyperbolicGeodesics, Cx::new(0.21, 0.11)).unwrap();
        let again = cache.get_or_compute(&HyperbolicGeodesics, Cx::new(0.21, 0.11)).unwrap();
        assert!(Arc::ptr_eq(&first, &again));
        let neighbour = cache.get_or_compute(&HyperbolicGeodesics, Cx::new(0.22, 0.12)).unwrap();
        assert!((neighbour.zeros[0].0 - first.zeros[0].0).norm() > 1e-3);
        assert_eq!(cache.len(), 1);
        assert!(cache.get_or_compute(&EuclideanLines, Cx::new(0.0, 0.1)).is_err());
    }
}
