//! The boundary rotation functional (1/π)∮|Re(1 + zφ″/φ′)| dθ and the
//! transform ψ′ = φ′·(1 − λzᴺ)/(1 + λzᴺ).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{unimodular, AnalyticFunction, Primitive, C64};
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;

pub const MIN_ROTATION_SAMPLES: usize = 8192;

/// Trapezoid sample count for radius r. The integrand varies on the scale
/// 1 − r near boundary singularities, so the count grows like 32/(1 − r).
pub fn default_rotation_samples(r: f64) -> usize {
    let need = (32.0 / (1.0 - r)).ceil();
    if !need.is_finite() || need > (1u64 << 26) as f64 {
        return 1 << 26;
    }
    (need as usize).next_power_of_two().max(MIN_ROTATION_SAMPLES)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationValue {
    pub r: f64,
    pub n: usize,
    pub value_over_pi: f64,
}

/// (1/π)·∫₀^{2π} |Re(1 + zφ″(z)/φ′(z))| dθ on |z| = r by the trapezoid rule.
pub fn boundary_rotation_value(phi: &AnalyticFunction, r: f64, n: usize) -> Result<RotationValue> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidRadius(r));
    }
    if n < 8 {
        return Err(Error::TooFewSamples { got: n, min: 8 });
    }
    let mut sum = 0.0;
    for j in 0..n {
        let z = C64::from_polar(r, std::f64::consts::TAU * j as f64 / n as f64);
        let (d1, d2) = phi.derivs(z);
        if d1.norm() < 1e-12 {
            return Err(Error::VanishingDerivative(z));
        }
        sum += (1.0 + z * d2 / d1).re.abs();
    }
    Ok(RotationValue {
        r,
        n,
        value_over_pi: 2.0 * sum / n as f64,
    })
}

/// ψ with ψ(0) = 0 and ψ′ = φ′·(1 − λzᴺ)/(1 + λzᴺ).
pub fn brannan_transform(
    phi: &AnalyticFunction,
    lambda: C64,
    n: u32,
    cfg: &QuadratureConfig,
) -> Result<AnalyticFunction> {
    let lambda = unimodular("lambda", lambda)?;
    if n == 0 {
        return Err(Error::ZeroDegree);
    }
    cfg.validate()?;
    let label = format!(
        "brannan({};{};{})",
        phi.label(),
        crate::text::complex_to_string(lambda),
        n
    );
    let phi = phi.clone();
    Ok(Primitive::new(label, *cfg, move |z| {
        let (p1, p2) = phi.derivs(z);
        let u = lambda * z.powu(n);
        let du = lambda * z.powu(n - 1) * n as f64;
        let q = (1.0 - u) / (1.0 + u);
        let dq = -2.0 * du / ((1.0 + u) * (1.0 + u));
        (p1 * q, p2 * q + p1 * dq)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VkReport {
    pub k: f64,
    pub tol: f64,
    pub values: Vec<RotationValue>,
    pub max_value: f64,
    pub member: bool,
    /// Whether the values are nondecreasing along the ladder.
    pub nondecreasing: bool,
}

/// Membership in V_k judged on a ladder of radii: the largest value over the
/// ladder must not exceed k + tol.
pub fn vk_membership(phi: &AnalyticFunction, k: f64, radii: &[f64], tol: f64) -> Result<VkReport> {
    let values = radii
        .par_iter()
        .map(|r| boundary_rotation_value(phi, *r, default_rotation_samples(*r)))
        .collect::<Result<Vec<_>>>()?;
    let max_value = values.iter().map(|v| v.value_over_pi).fold(f64::NEG_INFINITY, f64::max);
    let mut sorted = values.clone();
    sorted.sort_by(|a, b| a.r.total_cmp(&b.r));
    let nondecreasing = sorted
        .windows(2)
        .all(|w| w[1].value_over_pi >= w[0].value_over_pi - 1e-9);
    Ok(VkReport {
        k,
        tol,
        member: max_value <= k + tol,
        values,
        max_value,
        nondecreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{catalog, CatalogId};
    use crate::geometry::DEFAULT_RADII;

    const ONE: C64 = C64::new(1.0, 0.0);

    #[test]
    fn convex_maps_give_two() {
        for id in [
            CatalogId::H,
            CatalogId::HRotMinus1,
            CatalogId::LLambda(C64::new(0.0, 1.0)),
            CatalogId::Identity,
            CatalogId::MobiusHalfplane(C64::from_polar(1.0, 0.3)),
        ] {
            let phi = catalog(id).unwrap();
            for r in DEFAULT_RADII {
                let v = boundary_rotation_value(&phi, r, default_rotation_samples(r)).unwrap();
                assert!((v.value_over_pi - 2.0).abs() <= 1e-9, "{id:?} r {r}: {}", v.value_over_pi);
            }
        }
    }

    #[test]
    fn koebe_is_near_four() {
        let k = catalog(CatalogId::Koebe).unwrap();
        let v = boundary_rotation_value(&k, 0.999, default_rotation_samples(0.999)).unwrap();
        assert!(v.value_over_pi <= 4.0 + 1e-6 && v.value_over_pi > 3.9, "{}", v.value_over_pi);
        let rep = vk_membership(&k, 2.0, &DEFAULT_RADII, 1e-6).unwrap();
        assert!(!rep.member);
        assert!(rep.nondecreasing);
        assert!(vk_membership(&k, 4.0, &DEFAULT_RADII, 1e-6).unwrap().member);
    }

    #[test]
    fn transform_of_half_plane_map_is_koebe() {
        let cfg = QuadratureConfig::default();
        let psi = brannan_transform(&catalog(CatalogId::H).unwrap(), -ONE, 1, &cfg).unwrap();
        let k = catalog(CatalogId::Koebe).unwrap();
        for i in 1..6 {
            for a in 0..8 {
                let z = C64::from_polar(0.19 * i as f64, 0.3 + a as f64 * 0.785);
                let (v, w) = (psi.eval(z).unwrap(), k.eval(z).unwrap());
                assert!((v.value - w.value).norm() <= 1e-10 * w.value.norm().max(1.0));
                assert!((v.d1 - w.d1).norm() <= 1e-12 * w.d1.norm());
                assert!((v.d2 - w.d2).norm() <= 1e-12 * w.d2.norm().max(1.0));
            }
        }
    }

    #[test]
    fn transform_bounds() {
        let cfg = QuadratureConfig::default();
        let id = brannan_transform(&catalog(CatalogId::Identity).unwrap(), ONE, 1, &cfg).unwrap();
        let v = boundary_rotation_value(&id, 0.99, default_rotation_samples(0.99)).unwrap();
        assert!(v.value_over_pi <= 4.0 + 1e-6, "{}", v.value_over_pi);
        let psi = brannan_transform(&catalog(CatalogId::H).unwrap(), ONE, 2, &cfg).unwrap();
        let rep = vk_membership(&psi, 6.0, &DEFAULT_RADII, 1e-6).unwrap();
        assert!(rep.member, "{rep:?}");
    }

    #[test]
    fn value_is_at_least_two() {
        let cfg = QuadratureConfig::default();
        let phi = brannan_transform(&catalog(CatalogId::Koebe).unwrap(), C64::from_polar(1.0, 1.0), 3, &cfg).unwrap();
        for r in [0.3, 0.7, 0.95] {
            let v = boundary_rotation_value(&phi, r, default_rotation_samples(r)).unwrap();
            assert!(v.value_over_pi >= 2.0 - 1e-9);
        }
    }

    #[test]
    fn sample_count_grows_near_boundary() {
        assert_eq!(default_rotation_samples(0.9), 8192);
        assert_eq!(default_rotation_samples(0.999), 32768);
    }
}
