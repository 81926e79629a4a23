//! Shears: harmonic maps f = h + conj(g) with h − ηg = φ and g′/h′ = ω.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::analytic::{rotate_analytic, unimodular, Analytic, AnalyticFunction, Combination, Jet, C64};
use crate::error::{Error, Result};
use crate::quadrature::{antiderivative, integrate_segment, Pair, QuadratureConfig};
use crate::schwarz::SchwarzFunction;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Tolerance for φ(0) = 0, φ′(0) = 1.
pub const NORMALIZATION_TOL: f64 = 1e-10;
/// Points between two radial anchors when values are chained along a circle.
pub const ANCHOR_STRIDE: usize = 64;

/// Data of a shear: φ, the dilatation ω and the direction parameter η = e^{2iθ}.
#[derive(Debug, Clone)]
pub struct ShearSystem {
    pub phi: AnalyticFunction,
    pub omega: SchwarzFunction,
    pub eta: C64,
}

impl ShearSystem {
    pub fn new(phi: AnalyticFunction, omega: SchwarzFunction, eta: C64) -> Result<Self> {
        let eta = unimodular("eta", eta)?;
        let j = phi.eval(ZERO)?;
        if j.value.norm() > NORMALIZATION_TOL || (j.d1 - ONE).norm() > NORMALIZATION_TOL {
            return Err(Error::InvalidParameter(format!(
                "phi = {} is not normalized: phi(0) = {}, phi'(0) = {}",
                phi.label(),
                j.value,
                j.d1
            )));
        }
        Ok(ShearSystem { phi, omega, eta })
    }

    /// Shear in the direction θ, η = e^{2iθ}.
    pub fn with_theta(phi: AnalyticFunction, omega: SchwarzFunction, theta: f64) -> Result<Self> {
        ShearSystem::new(phi, omega, C64::from_polar(1.0, 2.0 * theta))
    }

    pub fn label(&self) -> String {
        format!(
            "shear({};{};{})",
            self.phi.label(),
            self.omega.spec(),
            crate::text::complex_to_string(self.eta)
        )
    }
}

/// f = h + conj(g) together with the shear data it came from, if any.
#[derive(Debug, Clone)]
pub struct HarmonicMap {
    pub h: AnalyticFunction,
    pub g: AnalyticFunction,
    pub provenance: Option<ShearSystem>,
}

impl HarmonicMap {
    pub fn new(h: AnalyticFunction, g: AnalyticFunction) -> Self {
        HarmonicMap {
            h,
            g,
            provenance: None,
        }
    }

    /// The analytic map φ seen as a harmonic map with g ≡ 0.
    pub fn analytic(phi: AnalyticFunction) -> Self {
        HarmonicMap::new(phi, zero_function())
    }

    pub fn label(&self) -> String {
        match &self.provenance {
            Some(sys) => sys.label(),
            None => format!("harmonic({};{})", self.h.label(), self.g.label()),
        }
    }

    /// f(z) = h(z) + conj(g(z)).
    pub fn eval(&self, z: C64) -> Result<C64> {
        let (h, g) = self.parts(z)?;
        Ok(h + g.conj())
    }

    /// (h(z), g(z)).
    pub fn parts(&self, z: C64) -> Result<(C64, C64)> {
        Ok((self.h.value(z)?, self.g.value(z)?))
    }

    pub fn jets(&self, z: C64) -> Result<(Jet, Jet)> {
        Ok((self.h.eval(z)?, self.g.eval(z)?))
    }

    /// (h′, h″, g′, g″) at z.
    pub fn derivs(&self, z: C64) -> (C64, C64, C64, C64) {
        let (h1, h2) = self.h.derivs(z);
        let (g1, g2) = self.g.derivs(z);
        (h1, h2, g1, g2)
    }

    pub fn jacobian(&self, z: C64) -> f64 {
        self.h.d1(z).norm_sqr() - self.g.d1(z).norm_sqr()
    }

    /// d/dθ of f(r·e^{iθ}) at z = r·e^{iθ}.
    pub fn tangent(&self, z: C64) -> C64 {
        let (h1, _, g1, _) = self.derivs(z);
        I * z * h1 - I * (z * g1).conj()
    }

    /// The tangent and its θ-derivative.
    pub fn tangent_with_rate(&self, z: C64) -> (C64, C64) {
        let (h1, h2, g1, g2) = self.derivs(z);
        let t = I * z * h1 - I * (z * g1).conj();
        let dt = -z * (h1 + z * h2) - (z * (g1 + z * g2)).conj();
        (t, dt)
    }

    /// (h, g) at r·e^{iθ} for ascending angles.
    ///
    /// Closed forms are evaluated directly. Otherwise every `ANCHOR_STRIDE`-th
    /// point is a radial value and the rest are chained from it along chords.
    pub fn circle_parts(&self, r: f64, thetas: &[f64], cfg: &QuadratureConfig) -> Result<Vec<(C64, C64)>> {
        let zs: Vec<C64> = thetas.iter().map(|t| C64::from_polar(r, *t)).collect();
        if self.h.is_closed_form() && self.g.is_closed_form() {
            return zs.iter().map(|z| self.parts(*z)).collect();
        }
        let d = |w: C64| Pair(self.h.d1(w), self.g.d1(w));
        let mut out = Vec::with_capacity(zs.len());
        let mut prev = (ZERO, ZERO);
        for (j, z) in zs.iter().enumerate() {
            let cur = if j % ANCHOR_STRIDE == 0 {
                self.parts(*z)?
            } else {
                let Pair(dh, dg) = integrate_segment(&d, zs[j - 1], *z, cfg)?;
                (prev.0 + dh, prev.1 + dg)
            };
            out.push(cur);
            prev = cur;
        }
        Ok(out)
    }

    /// f at r·e^{iθ} for ascending angles.
    pub fn circle_values(&self, r: f64, thetas: &[f64], cfg: &QuadratureConfig) -> Result<Vec<C64>> {
        Ok(self
            .circle_parts(r, thetas, cfg)?
            .into_iter()
            .map(|(h, g)| h + g.conj())
            .collect())
    }
}

struct Zero;

impl Analytic for Zero {
    fn derivs(&self, _z: C64) -> (C64, C64) {
        (ZERO, ZERO)
    }
    fn value(&self, _z: C64) -> Result<C64> {
        Ok(ZERO)
    }
    fn label(&self) -> String {
        "0".into()
    }
}

pub fn zero_function() -> AnalyticFunction {
    AnalyticFunction::new(Zero)
}

const CACHE_LIMIT: usize = 1 << 16;

/// Shared state of the two analytic parts of a shear.
struct ShearCore {
    phi: AnalyticFunction,
    omega: SchwarzFunction,
    eta: C64,
    cfg: QuadratureConfig,
    label: String,
    cache: Mutex<HashMap<(u64, u64), Pair>>,
}

impl ShearCore {
    /// (h′, h″, g′, g″).
    fn derivs(&self, z: C64) -> (C64, C64, C64, C64) {
        let (p1, p2) = self.phi.derivs(z);
        let (w, w1) = self.omega.eval(z);
        let den = ONE - self.eta * w;
        let h1 = p1 / den;
        let h2 = (p2 * den + self.eta * w1 * p1) / (den * den);
        (h1, h2, w * h1, w1 * h1 + w * h2)
    }

    fn values(&self, z: C64) -> Result<Pair> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        let v: Pair = antiderivative(
            &|w| {
                let (h1, _, g1, _) = self.derivs(w);
                Pair(h1, g1)
            },
            z,
            &self.cfg,
        )?;
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }
}

struct ShearPart {
    core: Arc<ShearCore>,
    co_analytic: bool,
}

impl Analytic for ShearPart {
    fn derivs(&self, z: C64) -> (C64, C64) {
        let (h1, h2, g1, g2) = self.core.derivs(z);
        if self.co_analytic {
            (g1, g2)
        } else {
            (h1, h2)
        }
    }

    fn value(&self, z: C64) -> Result<C64> {
        let v = self.core.values(z)?;
        Ok(if self.co_analytic { v.1 } else { v.0 })
    }

    fn closed_form(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        format!("{}.{}", self.core.label, if self.co_analytic { "g" } else { "h" })
    }
}

/// Solves the shear system. h and g are primitives of h′ = φ′/(1 − ηω) and
/// g′ = ωh′ normalized by h(0) = g(0) = 0.
pub fn shear_construct(sys: &ShearSystem, cfg: &QuadratureConfig) -> Result<HarmonicMap> {
    cfg.validate()?;
    let sys = ShearSystem::new(sys.phi.clone(), sys.omega.clone(), sys.eta)?;
    if sys.omega.value(ZERO) != ZERO {
        return Err(Error::NotSchwarz(ZERO));
    }
    if sys.omega.is_zero() {
        return Ok(HarmonicMap {
            h: sys.phi.clone(),
            g: zero_function(),
            provenance: Some(sys),
        });
    }
    let core = Arc::new(ShearCore {
        phi: sys.phi.clone(),
        omega: sys.omega.clone(),
        eta: sys.eta,
        cfg: *cfg,
        label: sys.label(),
        cache: Mutex::new(HashMap::new()),
    });
    Ok(HarmonicMap {
        h: AnalyticFunction::new(ShearPart {
            core: core.clone(),
            co_analytic: false,
        }),
        g: AnalyticFunction::new(ShearPart {
            core,
            co_analytic: true,
        }),
        provenance: Some(sys),
    })
}

/// f_ξ(z) = conj(ξ)·f(ξz), with parts conj(ξ)·h(ξz) and ξ·g(ξz).
///
/// A shear of φ with dilatation ω₀ and parameter η rotates into the shear of
/// φ_ξ with dilatation ξ²·ω₀(ξz) and parameter η·conj(ξ)².
pub fn rotate_harmonic(f: &HarmonicMap, xi: C64) -> Result<HarmonicMap> {
    let xi = unimodular("xi", xi)?;
    let h = rotate_analytic(&f.h, xi)?;
    let g = rotate_analytic(&f.g, xi)?.scaled(xi * xi);
    let provenance = match &f.provenance {
        Some(sys) => Some(ShearSystem {
            phi: rotate_analytic(&sys.phi, xi)?,
            omega: sys.omega.rotated(xi)?,
            eta: sys.eta * xi.conj() * xi.conj(),
        }),
        None => None,
    };
    Ok(HarmonicMap { h, g, provenance })
}

/// Moves f into the normalized class: F = (f − f(0))/h′(0), then the affine
/// map w ↦ (w − conj(a)·conj(w))/(1 − |a|²) with a = g′(0)/conj(h′(0)).
pub fn normalize(f: &HarmonicMap) -> Result<HarmonicMap> {
    let (hj, gj) = f.jets(ZERO)?;
    let b = hj.d1;
    if b.norm() == 0.0 {
        return Err(Error::VanishingDerivative(ZERO));
    }
    let a = gj.d1 / b.conj();
    if a.norm() >= 1.0 {
        return Err(Error::NotOrientationPreserving(a.norm()));
    }
    let s = 1.0 - a.norm_sqr();
    // new h = (H − conj(a)·G)/s and new g = (G − a·H)/s with
    // H = (h − h(0))/b and G = (g − g(0))/conj(b)
    let (cb, cbc) = (ONE / b, ONE / b.conj());
    let h = Combination::new(
        vec![(cb / s, f.h.clone()), (-a.conj() * cbc / s, f.g.clone())],
        (-hj.value * cb + a.conj() * gj.value * cbc) / s,
    );
    let g = Combination::new(
        vec![(cbc / s, f.g.clone()), (-a * cb / s, f.h.clone())],
        (-gj.value * cbc + a * hj.value * cb) / s,
    );
    let untouched = hj.value == ZERO && gj.value == ZERO && b == ONE && a == ZERO;
    Ok(HarmonicMap {
        h,
        g,
        provenance: if untouched { f.provenance.clone() } else { None },
    })
}

/// h − e^{2it}·g.
pub fn analytic_combination(f: &HarmonicMap, t: f64) -> AnalyticFunction {
    f.h.minus(C64::from_polar(1.0, 2.0 * t), &f.g)
}

/// Largest defect among h(0) = g(0) = 0, h′(0) = 1, g′(0) = 0.
pub fn normalization_defect(f: &HarmonicMap) -> Result<f64> {
    let (hj, gj) = f.jets(ZERO)?;
    Ok(hj
        .value
        .norm()
        .max(gj.value.norm())
        .max((hj.d1 - ONE).norm())
        .max(gj.d1.norm()))
}

impl fmt::Display for HarmonicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
