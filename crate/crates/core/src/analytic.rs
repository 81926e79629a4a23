//! Analytic functions on the unit disk: closed-form catalog entries, rotations,
//! affine combinations and quadrature-backed primitives.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{antiderivative, QuadratureConfig};

pub type C64 = Complex64;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Inputs whose modulus is within this of one are renormalized.
pub const UNIMODULAR_SLACK: f64 = 1e-9;
/// Exclusion radius around ±1 for the strip parameter.
pub const LAMBDA_EXCLUSION: f64 = 1e-9;

/// Renormalizes a nearly unimodular number, rejecting anything further off.
pub fn unimodular(name: &'static str, value: C64) -> Result<C64> {
    let modulus = value.norm();
    if (modulus - 1.0).abs() <= UNIMODULAR_SLACK && modulus.is_finite() {
        Ok(value / modulus)
    } else {
        Err(Error::NotUnimodular {
            name,
            value,
            modulus,
        })
    }
}

/// Value with first and second complex derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: C64,
    pub d1: C64,
    pub d2: C64,
}

/// An analytic function on the disk.
///
/// Derivatives are always available in closed form; the value may need a path
/// integral, which is why it is fallible.
pub trait Analytic: Send + Sync {
    fn derivs(&self, z: C64) -> (C64, C64);
    fn value(&self, z: C64) -> Result<C64>;
    /// True when `value` is a closed form (no quadrature behind it).
    fn closed_form(&self) -> bool {
        true
    }
    fn label(&self) -> String;
}

#[derive(Clone)]
pub struct AnalyticFunction(Arc<dyn Analytic>);

impl fmt::Debug for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnalyticFunction({})", self.label())
    }
}

impl AnalyticFunction {
    pub fn new(f: impl Analytic + 'static) -> Self {
        AnalyticFunction(Arc::new(f))
    }

    pub fn eval(&self, z: C64) -> Result<Jet> {
        let value = self.0.value(z)?;
        let (d1, d2) = self.0.derivs(z);
        Ok(Jet { value, d1, d2 })
    }

    pub fn value(&self, z: C64) -> Result<C64> {
        self.0.value(z)
    }

    pub fn derivs(&self, z: C64) -> (C64, C64) {
        self.0.derivs(z)
    }

    pub fn d1(&self, z: C64) -> C64 {
        self.0.derivs(z).0
    }

    pub fn is_closed_form(&self) -> bool {
        self.0.closed_form()
    }

    pub fn label(&self) -> String {
        self.0.label()
    }

    /// `c · self`.
    pub fn scaled(&self, c: C64) -> AnalyticFunction {
        Combination::new(vec![(c, self.clone())], ZERO)
    }

    /// `self − c · other`.
    pub fn minus(&self, c: C64, other: &AnalyticFunction) -> AnalyticFunction {
        Combination::new(vec![(ONE, self.clone()), (-c, other.clone())], ZERO)
    }
}

/// Named closed-form functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CatalogId {
    /// z/(1−z), onto the half-plane Re w > −1/2.
    H,
    /// The rotation of `H` by −1, z/(1+z).
    HRotMinus1,
    /// Strip map with parameter λ on the unit circle, λ ≠ ±1.
    LLambda(C64),
    Koebe,
    /// z/(1−cz) with |c| = 1.
    MobiusHalfplane(C64),
    Identity,
    /// Analytic part h₀ of the parabola map f₀.
    F0HPart,
    /// Co-analytic part g₀ of the parabola map f₀.
    F0GPart,
}

impl CatalogId {
    /// Checks parameters and renormalizes unimodular ones.
    pub fn validated(self) -> Result<CatalogId> {
        match self {
            CatalogId::LLambda(lambda) => {
                let lambda = unimodular("lambda", lambda)?;
                if (lambda - ONE).norm() <= LAMBDA_EXCLUSION || (lambda + ONE).norm() <= LAMBDA_EXCLUSION
                {
                    return Err(Error::ExcludedLambda(lambda));
                }
                Ok(CatalogId::LLambda(lambda))
            }
            CatalogId::MobiusHalfplane(c) => Ok(CatalogId::MobiusHalfplane(unimodular("c", c)?)),
            other => Ok(other),
        }
    }

    /// Catalog entries normalized with φ(0) = 0, φ'(0) = 1.
    pub fn is_normalized(&self) -> bool {
        !matches!(self, CatalogId::F0GPart)
    }

    /// Entries whose image of the disk is convex.
    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            CatalogId::H
                | CatalogId::HRotMinus1
                | CatalogId::LLambda(_)
                | CatalogId::MobiusHalfplane(_)
                | CatalogId::Identity
        )
    }
}

/// A catalog entry, optionally rotated: φ or φ_ξ(z) = conj(ξ)·φ(ξz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSpec {
    pub id: CatalogId,
    pub xi: Option<C64>,
}

impl PhiSpec {
    pub fn catalog(id: CatalogId) -> Self {
        PhiSpec { id, xi: None }
    }

    pub fn rotated(id: CatalogId, xi: C64) -> Self {
        PhiSpec { id, xi: Some(xi) }
    }

    pub fn build(&self) -> Result<AnalyticFunction> {
        let phi = catalog(self.id)?;
        match self.xi {
            Some(xi) => rotate_analytic(&phi, xi),
            None => Ok(phi),
        }
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::phi_to_string(self))
    }
}

#[derive(Debug, Clone, Copy)]
struct Catalog(CatalogId);

impl Catalog {
    fn jet(&self, z: C64) -> Jet {
        match self.0 {
            CatalogId::H => {
                let u = ONE / (ONE - z);
                Jet {
                    value: z * u,
                    d1: u * u,
                    d2: 2.0 * u * u * u,
                }
            }
            CatalogId::HRotMinus1 => {
                let u = ONE / (ONE + z);
                Jet {
                    value: z * u,
                    d1: u * u,
                    d2: -2.0 * u * u * u,
                }
            }
            CatalogId::LLambda(lambda) => {
                let a = ONE - lambda.conj() * z;
                let b = ONE - lambda * z;
                let k = ONE / (2.0 * I * lambda.im);
                let d1 = ONE / (a * b);
                Jet {
                    value: k * (a / b).ln(),
                    d1,
                    d2: d1 * (lambda / b + lambda.conj() / a),
                }
            }
            CatalogId::Koebe => {
                let u = ONE / (ONE - z);
                let u2 = u * u;
                Jet {
                    value: z * u2,
                    d1: (ONE + z) * u2 * u,
                    d2: (4.0 + 2.0 * z) * u2 * u2,
                }
            }
            CatalogId::MobiusHalfplane(c) => {
                let u = ONE / (ONE - c * z);
                Jet {
                    value: z * u,
                    d1: u * u,
                    d2: 2.0 * c * u * u * u,
                }
            }
            CatalogId::Identity => Jet {
                value: z,
                d1: ONE,
                d2: ZERO,
            },
            CatalogId::F0HPart => {
                let u = ONE / (ONE - z);
                let u2 = u * u;
                Jet {
                    value: (2.0 * z - z * z) * u2 * 0.5,
                    d1: u2 * u,
                    d2: 3.0 * u2 * u2,
                }
            }
            CatalogId::F0GPart => {
                let u = ONE / (ONE - z);
                let u2 = u * u;
                Jet {
                    value: z * z * u2 * 0.5,
                    d1: z * u2 * u,
                    d2: (ONE + 2.0 * z) * u2 * u2,
                }
            }
        }
    }
}

impl Analytic for Catalog {
    fn derivs(&self, z: C64) -> (C64, C64) {
        let j = self.jet(z);
        (j.d1, j.d2)
    }

    fn value(&self, z: C64) -> Result<C64> {
        Ok(self.jet(z).value)
    }

    fn label(&self) -> String {
        crate::text::catalog_to_string(&self.0)
    }
}

/// The closed form for `id`.
pub fn catalog(id: CatalogId) -> Result<AnalyticFunction> {
    Ok(AnalyticFunction::new(Catalog(id.validated()?)))
}

struct Rotated {
    inner: AnalyticFunction,
    xi: C64,
}

impl Analytic for Rotated {
    fn derivs(&self, z: C64) -> (C64, C64) {
        let (d1, d2) = self.inner.derivs(self.xi * z);
        (d1, self.xi * d2)
    }

    fn value(&self, z: C64) -> Result<C64> {
        Ok(self.xi.conj() * self.inner.value(self.xi * z)?)
    }

    fn closed_form(&self) -> bool {
        self.inner.is_closed_form()
    }

    fn label(&self) -> String {
        format!("rot({};{})", self.inner.label(), crate::text::complex_to_string(self.xi))
    }
}

/// φ_ξ(z) = conj(ξ)·φ(ξz).
pub fn rotate_analytic(phi: &AnalyticFunction, xi: C64) -> Result<AnalyticFunction> {
    let xi = unimodular("xi", xi)?;
    Ok(AnalyticFunction::new(Rotated {
        inner: phi.clone(),
        xi,
    }))
}

/// Σ cₖ·fₖ + constant.
pub struct Combination {
    terms: Vec<(C64, AnalyticFunction)>,
    constant: C64,
}

impl Combination {
    pub fn new(terms: Vec<(C64, AnalyticFunction)>, constant: C64) -> AnalyticFunction {
        AnalyticFunction::new(Combination { terms, constant })
    }
}

impl Analytic for Combination {
    fn derivs(&self, z: C64) -> (C64, C64) {
        self.terms.iter().fold((ZERO, ZERO), |(a, b), (c, f)| {
            let (d1, d2) = f.derivs(z);
            (a + c * d1, b + c * d2)
        })
    }

    fn value(&self, z: C64) -> Result<C64> {
        let mut acc = self.constant;
        for (c, f) in &self.terms {
            acc += c * f.value(z)?;
        }
        Ok(acc)
    }

    fn closed_form(&self) -> bool {
        self.terms.iter().all(|(_, f)| f.is_closed_form())
    }

    fn label(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .map(|(c, f)| format!("({})*{}", crate::text::complex_to_string(*c), f.label()))
            .collect();
        if self.constant != ZERO {
            parts.push(crate::text::complex_to_string(self.constant));
        }
        parts.join(" + ")
    }
}

pub type DerivativeFn = dyn Fn(C64) -> (C64, C64) + Send + Sync;

const CACHE_LIMIT: usize = 1 << 16;

/// A function known through its first two derivatives, with value F(0) = 0
/// recovered by radial quadrature and memoized per point.
pub struct Primitive {
    derivative: Arc<DerivativeFn>,
    cfg: QuadratureConfig,
    label: String,
    cache: Mutex<HashMap<(u64, u64), C64>>,
}

impl Primitive {
    pub fn new(
        label: impl Into<String>,
        cfg: QuadratureConfig,
        derivative: impl Fn(C64) -> (C64, C64) + Send + Sync + 'static,
    ) -> AnalyticFunction {
        AnalyticFunction::new(Primitive {
            derivative: Arc::new(derivative),
            cfg,
            label: label.into(),
            cache: Mutex::new(HashMap::new()),
        })
    }
}

impl Analytic for Primitive {
    fn derivs(&self, z: C64) -> (C64, C64) {
        (self.derivative)(z)
    }

    fn value(&self, z: C64) -> Result<C64> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(v) = self.cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(*v);
        }
        let d = &self.derivative;
        let v: C64 = antiderivative(&|w| d(w).0, z, &self.cfg)?;
        let mut cache = self.cache.lock().unwrap_or_else(|e| e.into_inner());
        if cache.len() >= CACHE_LIMIT {
            cache.clear();
        }
        cache.insert(key, v);
        Ok(v)
    }

    fn closed_form(&self) -> bool {
        false
    }

    fn label(&self) -> String {
        self.label.clone()
    }
}
