//! Adaptive Gauss–Legendre integration along straight segments of the unit disk.
//!
//! The integrands handled here are analytic in the open disk, so any path that
//! stays inside the disk gives the same value. Segments are integrated with a
//! fixed-order Gauss–Legendre panel that is bisected until the difference
//! between the panel value and the sum of its two halves passes the tolerance.

use std::collections::HashMap;
use std::ops::{Add, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points with modulus at or above this are flagged as near-boundary.
pub const NEAR_BOUNDARY: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    /// Relative tolerance, needed where the integrand is large near boundary
    /// singularities and an absolute target would sit below rounding noise.
    pub rel_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_subdivisions: usize,
    /// Gauss–Legendre panel order.
    pub order: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: 1e-12,
            rel_tol: 1e-13,
            max_subdivisions: 40,
            order: 15,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidQuadrature("abs_tol must be positive"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::InvalidQuadrature("rel_tol must be non-negative"));
        }
        if self.order < 5 {
            return Err(Error::InvalidQuadrature("panel order must be at least 5"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::InvalidQuadrature("max_subdivisions must be positive"));
        }
        Ok(())
    }

    pub fn with_abs_tol(mut self, tol: f64) -> Self {
        self.abs_tol = tol;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }
}

/// Values that can be integrated: complex scalars and small complex vectors.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn scale(self, c: Complex64) -> Self;
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn scale(self, c: Complex64) -> Self {
        self * c
    }
}

/// A pair of complex values integrated together (typically h' and g').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub Complex64, pub Complex64);

impl Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

impl Sub for Pair {
    type Output = Pair;
    fn sub(self, o: Pair) -> Pair {
        Pair(self.0 - o.0, self.1 - o.1)
    }
}

impl Mul<f64> for Pair {
    type Output = Pair;
    fn mul(self, s: f64) -> Pair {
        Pair(self.0 * s, self.1 * s)
    }
}

impl QuadValue for Pair {
    fn zero() -> Self {
        Pair(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }
    fn norm(&self) -> f64 {
        self.0.norm().max(self.1.norm())
    }
    fn scale(self, c: Complex64) -> Self {
        Pair(self.0 * c, self.1 * c)
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on the Legendre three-term recurrence.
    pub fn new(order: usize) -> Self {
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule for `order`, built once per process.
    pub fn cached(order: usize) -> Arc<GaussLegendre> {
        static RULES: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let rules = RULES.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = rules.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(order)
            .or_insert_with(|| Arc::new(GaussLegendre::new(order)))
            .clone()
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of a segment integration with its diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct Integral<V> {
    pub value: V,
    pub error_estimate: f64,
    pub panels: usize,
    pub near_boundary: bool,
}

struct Panel<'a, V, F> {
    f: &'a F,
    rule: &'a GaussLegendre,
    z0: Complex64,
    dz: Complex64,
    cfg: &'a QuadratureConfig,
    _v: std::marker::PhantomData<V>,
}

impl<V: QuadValue, F: Fn(Complex64) -> V> Panel<'_, V, F> {
    /// Panel integral over t in [a, b] plus the sum of |f| for the roundoff floor.
    fn apply(&self, a: f64, b: f64) -> (V, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::zero();
        let mut abs = 0.0;
        for (x, w) in self.rule.nodes.iter().zip(&self.rule.weights) {
            let t = mid + half * x;
            let v = (self.f)(self.z0 + self.dz * t);
            abs += w * v.norm();
            acc = acc + v * *w;
        }
        (acc.scale(self.dz * half), abs * half * self.dz.norm())
    }

    fn recurse(
        &self,
        a: f64,
        b: f64,
        whole: V,
        depth: usize,
        panels: &mut usize,
    ) -> std::result::Result<(V, f64), f64> {
        let m = 0.5 * (a + b);
        let (left, labs) = self.apply(a, m);
        let (right, rabs) = self.apply(m, b);
        *panels += 2;
        let fine = left + right;
        let err = (fine - whole).norm();
        // integrands with poles on the unit circle lose about 1/(1 − |z|) of
        // relative accuracy in their evaluation, which sets the rounding floor
        let edge = (self.z0 + self.dz * a).norm().max((self.z0 + self.dz * b).norm());
        let conditioning = 1.0 / (1.0 - edge).max(f64::EPSILON);
        let tol = (self.cfg.abs_tol * (b - a))
            .max(self.cfg.rel_tol * fine.norm())
            .max(50.0 * f64::EPSILON * conditioning * (labs + rabs));
        if err <= tol {
            return Ok((fine, err));
        }
        if depth >= self.cfg.max_subdivisions {
            return Err(err);
        }
        let (l, le) = self.recurse(a, m, left, depth + 1, panels)?;
        let (r, re) = self.recurse(m, b, right, depth + 1, panels)?;
        Ok((l + r, le + re))
    }
}

fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() < 1.0 && z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::OutsideDisk(z))
    }
}

/// Integrates `fprime` along the straight segment from `z0` to `z1` with diagnostics.
pub fn integrate_segment_detailed<V, F>(
    fprime: &F,
    z0: Complex64,
    z1: Complex64,
    cfg: &QuadratureConfig,
) -> Result<Integral<V>>
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    cfg.validate()?;
    check_in_disk(z0)?;
    check_in_disk(z1)?;
    let near_boundary = z0.norm() >= NEAR_BOUNDARY || z1.norm() >= NEAR_BOUNDARY;
    if z0 == z1 {
        return Ok(Integral {
            value: V::zero(),
            error_estimate: 0.0,
            panels: 0,
            near_boundary,
        });
    }
    let rule = GaussLegendre::cached(cfg.order);
    let panel = Panel {
        f: fprime,
        rule: &rule,
        z0,
        dz: z1 - z0,
        cfg,
        _v: std::marker::PhantomData,
    };
    let (whole, _) = panel.apply(0.0, 1.0);
    let mut panels = 1;
    match panel.recurse(0.0, 1.0, whole, 0, &mut panels) {
        Ok((value, error_estimate)) => Ok(Integral {
            value,
            error_estimate,
            panels,
            near_boundary,
        }),
        Err(estimate) => Err(Error::ToleranceNotMet {
            z0,
            z1,
            tol: cfg.abs_tol,
            estimate,
        }),
    }
}

/// ∫ fprime(ζ) dζ over the segment [z0, z1].
pub fn integrate_segment<V, F>(
    fprime: &F,
    z0: Complex64,
    z1: Complex64,
    cfg: &QuadratureConfig,
) -> Result<V>
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    integrate_segment_detailed(fprime, z0, z1, cfg).map(|i| i.value)
}

/// The primitive F with F(0) = 0, evaluated at `z` along the radial segment.
pub fn antiderivative<V, F>(fprime: &F, z: Complex64, cfg: &QuadratureConfig) -> Result<V>
where
    V: QuadValue,
    F: Fn(Complex64) -> V,
{
    integrate_segment(fprime, Complex64::new(0.0, 0.0), z, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(15);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // degree 28 monomial: ∫ x^28 = 2/29
        let v: f64 = rule
            .nodes
            .iter()
            .zip(&rule.weights)
            .map(|(x, w)| w * x.powi(28))
            .sum();
        assert!((v - 2.0 / 29.0).abs() < 1e-14);
    }

    #[test]
    fn constant_integrand_gives_displacement() {
        let cfg = QuadratureConfig::default();
        let v: Complex64 = integrate_segment(&|_| c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.4), &cfg).unwrap();
        assert!((v - c(0.3, 0.4)).norm() < 1e-15);
    }

    #[test]
    fn half_plane_derivative_integrates_to_half_plane_map() {
        let cfg = QuadratureConfig::default();
        let f = |z: Complex64| 1.0 / ((1.0 - z) * (1.0 - z));
        let v: Complex64 = integrate_segment(&f, c(0.0, 0.0), c(0.5, 0.0), &cfg).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-13);
        let k = |z: Complex64| (1.0 + z) / ((1.0 - z) * (1.0 - z) * (1.0 - z));
        let v: Complex64 = antiderivative(&k, c(-0.5, 0.0), &cfg).unwrap();
        assert!((v - c(-2.0 / 9.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn empty_path_is_zero() {
        let cfg = QuadratureConfig::default();
        let v: Complex64 = antiderivative(&|z: Complex64| z.exp(), c(0.0, 0.0), &cfg).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn rejects_points_outside_disk() {
        let cfg = QuadratureConfig::default();
        let r: Result<Complex64> = integrate_segment(&|_| c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), &cfg);
        assert!(matches!(r, Err(Error::OutsideDisk(_))));
    }

    #[test]
    fn reports_tolerance_failure() {
        let cfg = QuadratureConfig {
            max_subdivisions: 1,
            abs_tol: 1e-15,
            rel_tol: 0.0,
            order: 5,
        };
        let f = |z: Complex64| 1.0 / ((1.0 - z).powi(4));
        let r: Result<Complex64> = integrate_segment(&f, c(0.0, 0.0), c(0.999, 0.0), &cfg);
        assert!(matches!(r, Err(Error::ToleranceNotMet { .. })));
    }

    #[test]
    fn rejects_bad_config() {
        let cfg = QuadratureConfig::default().with_order(3);
        assert!(cfg.validate().is_err());
        let cfg = QuadratureConfig::default().with_abs_tol(0.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn flags_near_boundary_segments() {
        let cfg = QuadratureConfig::default();
        let f = |z: Complex64| 1.0 / (1.0 + z * z);
        let i = integrate_segment_detailed(&f, c(0.0, 0.0), c(0.9995, 0.0), &cfg).unwrap();
        assert!(i.near_boundary);
        let i = integrate_segment_detailed(&f, c(0.0, 0.0), c(0.5, 0.0), &cfg).unwrap();
        assert!(!i.near_boundary);
    }
}
