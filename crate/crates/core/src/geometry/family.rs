//! Curve families described by polarized coefficient functions.

use crate::error::Result;
use crate::scalar::{Cx, Real};

/// The four polarized functions every family supplies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Coefficient {
    /// `A(w1, w2)` with `A(z, z̄) = μ(z)`.
    A,
    /// `B(w1, w2)` with `B(z, z̄) = conj μ(z)`.
    B,
    /// Transverse coordinate `s(w1, w2)`.
    S,
    /// Coordinate along the curves, `t(w1, w2)`.
    T,
}

/// Value of a polarized function together with its two partial derivatives.
#[derive(Clone, Copy, Debug)]
pub struct Jet<T> {
    pub value: Cx<T>,
    pub d1: Cx<T>,
    pub d2: Cx<T>,
}

/// Number of contour nodes used by [`contour_jet`].
const JET_NODES: usize = 16;

/// Partial derivatives of a function holomorphic in each argument, from the
/// Cauchy integral on a small circle around each argument.
///
/// The radius is `1e-3·(1 + |w|)`, so the rule is exact to rounding unless a
/// singularity lies within a few radii of the evaluation point.
pub fn contour_jet<T: Real, F>(mut eval: F, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>>
where
    F: FnMut(Cx<T>, Cx<T>) -> Result<Cx<T>>,
{
    let value = eval(w1, w2)?;
    let step = T::TAU() / T::from_count(JET_NODES);
    let mut d1 = Cx::new(T::zero(), T::zero());
    let mut d2 = Cx::new(T::zero(), T::zero());
    let r1 = T::lit(1e-3) * (T::one() + w1.norm());
    let r2 = T::lit(1e-3) * (T::one() + w2.norm());
    for k in 0..JET_NODES {
        let angle = step * T::from_count(k);
        let direction = Cx::from_polar(T::one(), angle);
        d1 = d1 + eval(w1 + direction * r1, w2)? * direction.conj();
        d2 = d2 + eval(w1, w2 + direction * r2)? * direction.conj();
    }
    let count = T::from_count(JET_NODES);
    Ok(Jet {
        value,
        d1: d1 / (count * r1),
        d2: d2 / (count * r2),
    })
}

/// A rotation-indexed family of curves in the unit disc.
///
/// The base family is the set of curves `t ↦ curve(t, s)`; rotating every curve
/// by `e^{iθ}` generates the full family. Coefficient functions are given in
/// polarized form so they can be evaluated at `(z/λ, λz̄)` for complex `λ`.
pub trait CurveFamily<T: Real>: Send + Sync {
    /// Identifier written into sinogram headers.
    fn name(&self) -> &str;

    /// Evaluates one polarized function.
    ///
    /// # Errors
    /// `Domain` when `(w1, w2)` leaves the polarization domain.
    fn polarized(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Cx<T>>;

    /// Value and partials of a polarized function. Families with closed-form
    /// partials override this; the default differentiates on a small contour.
    fn polarized_jet(&self, which: Coefficient, w1: Cx<T>, w2: Cx<T>) -> Result<Jet<T>> {
        contour_jet(|a, b| self.polarized(which, a, b), w1, w2)
    }

    /// Point of the base curve with parameters `(t, s)`.
    fn curve(&self, t: T, s: T) -> Result<Cx<T>>;

    /// Transverse coordinate `s(z)` of a disc point on the base family.
    fn transverse(&self, z: Cx<T>) -> Result<T> {
        Ok(self.polarized(Coefficient::S, z, z.conj())?.re)
    }

    /// Curve parameter `t(z)` of a disc point on the base family.
    fn along(&self, z: Cx<T>) -> Result<T> {
        Ok(self.polarized(Coefficient::T, z, z.conj())?.re)
    }

    /// Interval of `s` whose curves meet the disc of the given radius.
    fn s_range(&self, radius: T) -> (T, T);

    /// Parameter interval on which `curve(·, s)` stays inside the disc of the
    /// given radius, or `None` if the curve misses it.
    fn t_limits(&self, s: T, radius: T) -> Option<(T, T)>;

    /// True for families whose structure is certified by the crate.
    fn is_builtin(&self) -> bool {
        false
    }
}
