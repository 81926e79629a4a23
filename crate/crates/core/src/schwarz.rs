//! Schwarz functions: analytic self-maps of the disk fixing the origin.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::analytic::{unimodular, C64};
use crate::error::{Error, Result};

/// Blaschke zeros are kept inside this radius.
pub const MAX_ZERO_RADIUS: f64 = 0.95;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SchwarzSpec {
    Zero,
    /// λ·zᴺ.
    Monomial { lambda: C64, n: u32 },
    /// c·z·e^{iγ}·∏(aₖ − z)/(1 − conj(aₖ)z).
    Blaschke { zeros: Vec<C64>, gamma: f64, scale: C64 },
    /// A Blaschke dilatation with zeros and phase drawn from a seeded generator.
    RandomBlaschke { seed: u64, degree: usize, scale: f64 },
    /// z ↦ ξ²·ω₀(ξz), the dilatation of a rotated shear.
    Rotated { inner: Box<SchwarzSpec>, xi: C64 },
}

impl fmt::Display for SchwarzSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::text::schwarz_to_string(self))
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Resolved {
    Zero,
    Monomial { lambda: C64, n: u32 },
    Blaschke { zeros: Vec<C64>, lead: C64 },
    Rotated { inner: Box<Resolved>, xi: C64 },
}

impl Resolved {
    fn eval(&self, z: C64) -> (C64, C64) {
        match self {
            Resolved::Zero => (C64::new(0.0, 0.0), C64::new(0.0, 0.0)),
            Resolved::Monomial { lambda, n } => {
                let n = *n as i32;
                let zn1 = z.powi(n - 1);
                (lambda * zn1 * z, lambda * zn1 * n as f64)
            }
            Resolved::Blaschke { zeros, lead } => {
                let mut p = lead * z;
                let mut dp = *lead;
                for a in zeros {
                    let den = 1.0 - a.conj() * z;
                    let b = (a - z) / den;
                    let db = -(1.0 - a.norm_sqr()) / (den * den);
                    dp = dp * b + p * db;
                    p *= b;
                }
                (p, dp)
            }
            Resolved::Rotated { inner, xi } => {
                let (v, d) = inner.eval(xi * z);
                let xi2 = xi * xi;
                (xi2 * v, xi2 * xi * d)
            }
        }
    }
}

/// An evaluable Schwarz function together with the spec it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwarzFunction {
    spec: SchwarzSpec,
    resolved: Resolved,
}

impl SchwarzFunction {
    /// (ω(z), ω'(z)).
    pub fn eval(&self, z: C64) -> (C64, C64) {
        self.resolved.eval(z)
    }

    pub fn value(&self, z: C64) -> C64 {
        self.resolved.eval(z).0
    }

    pub fn spec(&self) -> &SchwarzSpec {
        &self.spec
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.resolved, Resolved::Zero)
    }

    /// ξ²·ω(ξz).
    pub fn rotated(&self, xi: C64) -> Result<SchwarzFunction> {
        make_schwarz(&SchwarzSpec::Rotated {
            inner: Box::new(self.spec.clone()),
            xi,
        })
    }

    /// Largest |ω| over a polar grid of the closed disk of radius `r`.
    pub fn grid_max_modulus(&self, r: f64, rings: usize, spokes: usize) -> f64 {
        let mut m: f64 = 0.0;
        for i in 1..=rings {
            let rho = r * i as f64 / rings as f64;
            for k in 0..spokes {
                let z = C64::from_polar(rho, std::f64::consts::TAU * k as f64 / spokes as f64);
                m = m.max(self.value(z).norm());
            }
        }
        m
    }
}

/// Zeros, phase and scale of a seeded random Blaschke dilatation.
pub fn random_blaschke_parts(seed: u64, degree: usize) -> (Vec<C64>, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zeros = (0..degree)
        .map(|_| {
            // uniform in the disk of radius MAX_ZERO_RADIUS
            let rho = MAX_ZERO_RADIUS * rng.gen::<f64>().sqrt();
            C64::from_polar(rho, std::f64::consts::TAU * rng.gen::<f64>())
        })
        .collect();
    let gamma = std::f64::consts::TAU * rng.gen::<f64>();
    (zeros, gamma)
}

fn resolve(spec: &SchwarzSpec) -> Result<Resolved> {
    match spec {
        SchwarzSpec::Zero => Ok(Resolved::Zero),
        SchwarzSpec::Monomial { lambda, n } => {
            if *n == 0 {
                return Err(Error::ZeroDegree);
            }
            Ok(Resolved::Monomial {
                lambda: unimodular("lambda", *lambda)?,
                n: *n,
            })
        }
        SchwarzSpec::Blaschke { zeros, gamma, scale } => {
            if scale.norm() > 1.0 || !scale.norm().is_finite() {
                return Err(Error::ScaleTooLarge(*scale));
            }
            if let Some(a) = zeros.iter().find(|a| !(a.norm() <= MAX_ZERO_RADIUS)) {
                return Err(Error::ZeroOutsideRadius(*a));
            }
            if !gamma.is_finite() {
                return Err(Error::InvalidParameter(format!("gamma = {gamma}")));
            }
            Ok(Resolved::Blaschke {
                zeros: zeros.clone(),
                lead: scale * C64::from_polar(1.0, *gamma),
            })
        }
        SchwarzSpec::RandomBlaschke { seed, degree, scale } => {
            let (zeros, gamma) = random_blaschke_parts(*seed, *degree);
            resolve(&SchwarzSpec::Blaschke {
                zeros,
                gamma,
                scale: C64::new(*scale, 0.0),
            })
        }
        SchwarzSpec::Rotated { inner, xi } => Ok(Resolved::Rotated {
            inner: Box::new(resolve(inner)?),
            xi: unimodular("xi", *xi)?,
        }),
    }
}

pub fn make_schwarz(spec: &SchwarzSpec) -> Result<SchwarzFunction> {
    Ok(SchwarzFunction {
        spec: spec.clone(),
        resolved: resolve(spec)?,
    })
}
