//! Named reproduction suites. Each check compares an observed outcome with
//! the expected one.

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use anyhow::Result;
use clap::ValueEnum;
use hshear::analytic::PhiSpec;
use hshear::boundary_rotation::{boundary_rotation_value, brannan_transform, default_rotation_samples};
use hshear::geometry::{
    convexity_check, directional_convexity_check, parabola_residual, sample_boundary, winding_number,
    DEFAULT_DEADBAND, DEFAULT_RADII, DEFAULT_SAMPLES, DEFAULT_TOL_BACKTURN,
};
use hshear::probe::{
    default_family, halfplane_strip_identifier, probe_admissibility, rotated_counterexample_suite, ProbeConfig, Shape,
    Summary, IDENTIFIER_RADIUS,
};
use hshear::{catalog, make_schwarz, shear_construct, CatalogId, HarmonicMap, QuadratureConfig, SchwarzSpec, ShearSystem, C64};
use serde::Serialize;

const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Case {
    #[value(name = "f0")]
    F0,
    #[value(name = "rotatedH")]
    RotatedH,
    #[value(name = "Llambda")]
    Llambda,
    #[value(name = "halfplane")]
    Halfplane,
    #[value(name = "koebe-directions")]
    KoebeDirections,
    #[value(name = "brannan")]
    Brannan,
}

impl Serialize for Case {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.to_possible_value() {
            Some(v) => s.serialize_str(v.get_name()),
            None => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

fn check(name: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, pass: bool) -> Check {
    Check {
        name: name.into(),
        expected: expected.into(),
        observed: observed.into(),
        pass,
    }
}

fn tag<T: Serialize>(x: &T) -> String {
    match serde_json::to_value(x) {
        Ok(serde_json::Value::String(s)) => s,
        _ => String::new(),
    }
}

fn grid(rmax: f64) -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for i in 1..=6 {
        for k in 0..24 {
            pts.push(C64::from_polar(rmax * i as f64 / 6.0, 0.1 + TAU * k as f64 / 24.0));
        }
    }
    pts
}

fn shear(id: CatalogId, omega: SchwarzSpec, eta: C64, cfg: &QuadratureConfig) -> Result<HarmonicMap> {
    let sys = ShearSystem::new(catalog(id)?, make_schwarz(&omega)?, eta)?;
    Ok(shear_construct(&sys, cfg)?)
}

fn no_failure(id: CatalogId, seed: u64, cfg: &QuadratureConfig) -> Result<Check> {
    let mut pc = ProbeConfig::new(PhiSpec::catalog(id), -ONE, default_family(seed));
    pc.quad = *cfg;
    let rep = probe_admissibility(&pc)?;
    Ok(check(
        format!("probe {} eta=-1 ({} dilatations)", rep.phi, rep.entries.len()),
        tag(&Summary::NoFailureFound),
        tag(&rep.summary),
        rep.summary == Summary::NoFailureFound && rep.errors == 0,
    ))
}

fn passing_directions(f: &HarmonicMap, r: f64, cfg: &QuadratureConfig) -> Result<Vec<usize>> {
    let curve = sample_boundary(f, r, DEFAULT_SAMPLES, cfg)?;
    Ok((0..64)
        .filter(|k| directional_convexity_check(&curve, PI * *k as f64 / 64.0, DEFAULT_DEADBAND).pass)
        .collect())
}

fn f0(cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let f = shear(CatalogId::H, SchwarzSpec::Monomial { lambda: ONE, n: 1 }, ONE, cfg)?;
    let (h0, g0) = (catalog(CatalogId::F0HPart)?, catalog(CatalogId::F0GPart)?);
    let mut worst: f64 = 0.0;
    for z in grid(0.99) {
        let (h, g) = f.parts(z)?;
        let (eh, eg) = (h0.value(z)?, g0.value(z)?);
        worst = worst
            .max((h - eh).norm() / eh.norm().max(1.0))
            .max((g - eg).norm() / eg.norm().max(1.0));
    }
    let residual = parabola_residual(&sample_boundary(&f, 0.9999, 4096, cfg)?);
    let curve = sample_boundary(&f, 0.99, DEFAULT_SAMPLES, cfg)?;
    let rep = convexity_check(&curve, DEFAULT_TOL_BACKTURN);
    let mid = 0.5 * (f.eval(C64::new(0.0, 0.98))? + f.eval(C64::new(0.0, -0.98))?);
    let wn = winding_number(&curve, mid)?;
    Ok(vec![
        check("closed forms h0, g0", "<= 1e-10", format!("{worst:.3e}"), worst <= 1e-10),
        check("parabola residual r=0.9999 n=4096", "<= 5e-3", format!("{residual:.3e}"), residual <= 5e-3),
        check("convexity r=0.99", "NON_CONVEX", tag(&rep.verdict), tag(&rep.verdict) == "NON_CONVEX"),
        check(
            format!("winding number at chord midpoint {:.6}{:+.6}i", mid.re, mid.im),
            "0",
            wn.to_string(),
            wn == 0,
        ),
    ])
}

fn rotated_h(seed: u64) -> Result<Vec<Check>> {
    let suite = rotated_counterexample_suite(seed)?;
    Ok(suite
        .cases
        .iter()
        .map(|c| {
            let mut observed = tag(&c.report.summary);
            if let Some(w) = c.report.failures.iter().min_by(|a, b| a.r.total_cmp(&b.r)) {
                observed.push_str(&format!(" (smallest witness r={:.4}, {} failing directions)", w.r, c.failing_directions.len()));
            }
            check(
                format!("probe H_xi xi={}", hshear::text::complex_to_string(c.xi)),
                tag(&c.expected),
                observed,
                c.matches,
            )
        })
        .collect())
}

fn strip_parameter(shape: &Shape) -> Option<f64> {
    match shape {
        Shape::Strip { strip_parameter, .. } => Some(*strip_parameter),
        _ => None,
    }
}

fn llambda(seed: u64, cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for lambda in [C64::new(0.0, 1.0), C64::from_polar(1.0, FRAC_PI_3)] {
        let id = CatalogId::LLambda(lambda);
        let want = 1.0 / (2.0 * lambda.im);
        let shape = halfplane_strip_identifier(&HarmonicMap::analytic(catalog(id)?), IDENTIFIER_RADIUS, cfg)?;
        let got = strip_parameter(&shape);
        out.push(check(
            format!("strip parameter of L_lambda lambda={}", hshear::text::complex_to_string(lambda)),
            format!("{want:.6} +- 1e-3"),
            got.map_or_else(|| format!("{shape:?}"), |a| format!("{a:.6}")),
            got.is_some_and(|a| (a - want).abs() <= 1e-3),
        ));
        out.push(no_failure(id, seed, cfg)?);
    }
    let lambda = C64::new(0.0, 1.0);
    let f = shear(CatalogId::LLambda(lambda), SchwarzSpec::Monomial { lambda: -ONE, n: 1 }, -ONE, cfg)?;
    let c = 1.0 / (2.0 - 2.0 * lambda.re);
    let mut worst: f64 = 0.0;
    for z in grid(0.99) {
        let want = c * ((ONE - lambda * z) * (ONE - lambda.conj() * z) / ((ONE - z) * (ONE - z))).ln();
        worst = worst.max((f.h.value(z)? - f.g.value(z)? - want).norm());
    }
    out.push(check("slit strip formula for h - g", "<= 1e-9", format!("{worst:.3e}"), worst <= 1e-9));
    let combo = HarmonicMap::analytic(f.h.minus(ONE, &f.g));
    let pass = passing_directions(&combo, 0.999, cfg)?;
    out.push(check("h - g convex directions on 64-point grid", "[0]", format!("{pass:?}"), pass == vec![0]));
    Ok(out)
}

fn halfplane(seed: u64, cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let shape = halfplane_strip_identifier(&HarmonicMap::analytic(catalog(CatalogId::H)?), IDENTIFIER_RADIUS, cfg)?;
    let ok = matches!(shape, Shape::HalfPlane { offset, normal } if (offset + 0.5).abs() <= 1e-3 && (normal - ONE).norm() <= 1e-3);
    let observed = match shape {
        Shape::HalfPlane { normal, offset } => format!("Re(conj({:.6}{:+.6}i) w) > {offset:.6}", normal.re, normal.im),
        other => format!("{other:?}"),
    };
    Ok(vec![
        check("half-plane of H", "Re w > -0.5 +- 1e-3", observed, ok),
        no_failure(CatalogId::H, seed, cfg)?,
        no_failure(CatalogId::HRotMinus1, seed, cfg)?,
    ])
}

fn koebe_directions(cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let pass = passing_directions(&HarmonicMap::analytic(catalog(CatalogId::Koebe)?), 0.999, cfg)?;
    Ok(vec![check(
        "Koebe r=0.999 convex directions on 64-point grid",
        "[0]",
        format!("{pass:?}"),
        pass == vec![0],
    )])
}

fn brannan(cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    let h = catalog(CatalogId::H)?;
    let mut out = Vec::new();
    for (lambda, n, bound) in [(-ONE, 1, 4.0), (ONE, 2, 6.0)] {
        let psi = brannan_transform(&h, lambda, n, cfg)?;
        let mut max: f64 = f64::NEG_INFINITY;
        for r in DEFAULT_RADII {
            max = max.max(boundary_rotation_value(&psi, r, default_rotation_samples(r))?.value_over_pi);
        }
        out.push(check(
            format!("boundary rotation of transform lambda={} N={n}", hshear::text::complex_to_string(lambda)),
            format!("<= {bound} + 1e-6"),
            format!("{max:.9}"),
            max <= bound + 1e-6,
        ));
    }
    let psi = brannan_transform(&h, -ONE, 1, cfg)?;
    let k = catalog(CatalogId::Koebe)?;
    let mut gap: f64 = 0.0;
    for z in grid(0.99) {
        let v = k.value(z)?;
        gap = gap.max((psi.value(z)? - v).norm() / v.norm().max(1.0));
    }
    out.push(check("transform lambda=-1 N=1 against Koebe", "<= 1e-10", format!("{gap:.3e}"), gap <= 1e-10));
    Ok(out)
}

pub fn run(case: Case, seed: u64, cfg: &QuadratureConfig) -> Result<Vec<Check>> {
    match case {
        Case::F0 => f0(cfg),
        Case::RotatedH => rotated_h(seed),
        Case::Llambda => llambda(seed, cfg),
        Case::Halfplane => halfplane(seed, cfg),
        Case::KoebeDirections => koebe_directions(cfg),
        Case::Brannan => brannan(cfg),
    }
}
