//! Searches for convexity failures of shears over families of dilatations.
//!
//! A curve f(|z| = r) that turns back only shows that f(rD) is not convex,
//! which can happen for maps whose full image is convex. A failure is
//! therefore recorded only when, in addition, a chord between two points of
//! f(|z| = r) leaves the region bounded by f(|z| = r′) for a radius r′
//! much closer to the circle. Curves that turn back without such a chord are
//! INCONCLUSIVE.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{CatalogId, PhiSpec, C64};
use crate::error::{Error, Result};
use crate::geometry::{
    adaptive_boundary, chord_escape, convexity_check, directional_convexity_check, sample_boundary,
    ConvexityReport, DirectionalReport, EscapeWitness, TurnWindow, Verdict, DEFAULT_DEADBAND, DEFAULT_RADII,
    DEFAULT_SAMPLES, DEFAULT_TOL_BACKTURN,
};
use crate::quadrature::QuadratureConfig;
use crate::schwarz::{make_schwarz, SchwarzSpec};
use crate::shear::{analytic_combination, shear_construct, HarmonicMap, ShearSystem};

pub const DEFAULT_SEED: u64 = 7;
/// The outer radius of the chord test is 1 − (1 − r)/`OUTER_FACTOR`.
pub const OUTER_FACTOR: f64 = 1000.0;
/// Tangent turn allowed between neighbouring samples of the outer curve.
pub const OUTER_MAX_TURN: f64 = PI / 32.0;
/// Bisection steps used to shrink a failure radius.
pub const MINIMIZE_STEPS: usize = 6;

pub const NO_PROOF_NOTE: &str =
    "NO_FAILURE_FOUND means no tested dilatation produced a failure; it does not prove admissibility";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum OmegaFamily {
    /// λ·zᴺ for λ = e^{2πik/phases} and 1 ≤ N ≤ n_max.
    MonomialGrid { phases: usize, n_max: u32 },
    /// Seeded Blaschke dilatations of degree ≤ max_degree, half of them with
    /// scale 1 and half with a uniform scale in (0, 1).
    BlaschkeRandom { count: usize, max_degree: usize, seed: u64 },
    Explicit(Vec<SchwarzSpec>),
}

impl OmegaFamily {
    pub fn members(&self) -> Vec<SchwarzSpec> {
        match self {
            OmegaFamily::MonomialGrid { phases, n_max } => {
                let mut out = Vec::new();
                for n in 1..=*n_max {
                    for k in 0..*phases {
                        out.push(SchwarzSpec::Monomial {
                            lambda: C64::from_polar(1.0, TAU * k as f64 / *phases as f64),
                            n,
                        });
                    }
                }
                out
            }
            OmegaFamily::BlaschkeRandom {
                count,
                max_degree,
                seed,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                (0..*count)
                    .map(|_| {
                        let member = rng.gen::<u64>();
                        let degree = rng.gen_range(0..=*max_degree);
                        let scale = if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            1.0 - rng.gen::<f64>()
                        };
                        SchwarzSpec::RandomBlaschke {
                            seed: member,
                            degree,
                            scale,
                        }
                    })
                    .collect()
            }
            OmegaFamily::Explicit(list) => list.clone(),
        }
    }
}

/// 8 phases × N ≤ 3 monomials and 50 random Blaschke dilatations of degree ≤ 3.
pub fn default_family(seed: u64) -> Vec<OmegaFamily> {
    vec![
        OmegaFamily::MonomialGrid { phases: 8, n_max: 3 },
        OmegaFamily::BlaschkeRandom {
            count: 50,
            max_degree: 3,
            seed,
        },
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub phi: PhiSpec,
    pub eta: C64,
    pub omega_family: Vec<OmegaFamily>,
    pub radii: Vec<f64>,
    pub n_samples: usize,
    pub tol_backturn: f64,
    pub quad: QuadratureConfig,
}

impl ProbeConfig {
    pub fn new(phi: PhiSpec, eta: C64, omega_family: Vec<OmegaFamily>) -> Self {
        ProbeConfig {
            phi,
            eta,
            omega_family,
            radii: DEFAULT_RADII.to_vec(),
            n_samples: DEFAULT_SAMPLES,
            tol_backturn: DEFAULT_TOL_BACKTURN,
            quad: QuadratureConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        crate::analytic::unimodular("eta", self.eta)?;
        self.quad.validate()?;
        if self.radii.is_empty() {
            return Err(Error::InvalidParameter("empty radius ladder".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(Error::InvalidRadius(*r));
        }
        if !(self.tol_backturn > 0.0) {
            return Err(Error::InvalidParameter("tol_backturn must be positive".into()));
        }
        Ok(())
    }

    /// Family members, deduplicated by canonical text and sorted by it.
    pub fn members(&self) -> Vec<SchwarzSpec> {
        let mut all: Vec<(String, SchwarzSpec)> = self
            .omega_family
            .iter()
            .flat_map(|f| f.members())
            .map(|s| (s.to_string(), s))
            .collect();
        all.sort_by(|a, b| a.0.cmp(&b.0));
        all.dedup_by(|a, b| a.0 == b.0);
        all.into_iter().map(|(_, s)| s).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusOutcome {
    pub r: f64,
    pub curve: ConvexityReport,
    /// Verdict about the image of the whole disk.
    pub disk: Verdict,
    pub escape: Option<EscapeWitness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaOutcome {
    pub omega: String,
    pub outcomes: Vec<RadiusOutcome>,
    /// A failure seen at some radius is also seen at every larger one.
    pub scale_coherent: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub omega: String,
    pub r: f64,
    pub window: Option<TurnWindow>,
    pub escape: EscapeWitness,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Summary {
    NoFailureFound,
    Failure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub phi: String,
    pub eta: C64,
    pub radii: Vec<f64>,
    pub n_samples: usize,
    pub tol_backturn: f64,
    pub entries: Vec<OmegaOutcome>,
    pub failures: Vec<FailureWitness>,
    pub summary: Summary,
    pub errors: usize,
    pub note: String,
}

/// Curve verdict at r plus the chord test when the curve turns back.
pub fn radius_outcome(f: &HarmonicMap, r: f64, n: usize, tol: f64, cfg: &QuadratureConfig) -> Result<RadiusOutcome> {
    let curve = sample_boundary(f, r, n, cfg)?;
    let rep = convexity_check(&curve, tol);
    let (disk, escape) = match rep.verdict {
        Verdict::Convex => (Verdict::Convex, None),
        _ => {
            let r_out = 1.0 - (1.0 - r) / OUTER_FACTOR;
            let (_, outer) = adaptive_boundary(f, r_out, n, OUTER_MAX_TURN, cfg)?;
            match chord_escape(&curve, &outer, r_out) {
                Some(w) if rep.verdict == Verdict::NonConvex => (Verdict::NonConvex, Some(w)),
                other => (Verdict::Inconclusive, other),
            }
        }
    };
    Ok(RadiusOutcome {
        r,
        curve: rep,
        disk,
        escape,
    })
}

fn build_shear(phi: &PhiSpec, omega: &SchwarzSpec, eta: C64, cfg: &QuadratureConfig) -> Result<HarmonicMap> {
    let sys = ShearSystem::new(phi.build()?, make_schwarz(omega)?, eta)?;
    shear_construct(&sys, cfg)
}

/// Bisects between a passing radius and a failing one to the smallest
/// failing radius found.
fn minimize(
    f: &HarmonicMap,
    lo: f64,
    mut hi: RadiusOutcome,
    cfg: &ProbeConfig,
) -> RadiusOutcome {
    let mut lo = lo;
    for _ in 0..MINIMIZE_STEPS {
        let mid = 0.5 * (lo + hi.r);
        match radius_outcome(f, mid, cfg.n_samples, cfg.tol_backturn, &cfg.quad) {
            Ok(o) if o.disk == Verdict::NonConvex => hi = o,
            _ => lo = mid,
        }
    }
    hi
}

fn probe_one(cfg: &ProbeConfig, omega: &SchwarzSpec) -> (OmegaOutcome, Option<FailureWitness>) {
    let label = omega.to_string();
    let fail = |e: Error| {
        (
            OmegaOutcome {
                omega: label.clone(),
                outcomes: Vec::new(),
                scale_coherent: true,
                error: Some(e.to_string()),
            },
            None,
        )
    };
    let f = match build_shear(&cfg.phi, omega, cfg.eta, &cfg.quad) {
        Ok(f) => f,
        Err(e) => return fail(e),
    };
    let mut radii = cfg.radii.clone();
    radii.sort_by(f64::total_cmp);
    let mut outcomes = Vec::with_capacity(radii.len());
    for r in &radii {
        match radius_outcome(&f, *r, cfg.n_samples, cfg.tol_backturn, &cfg.quad) {
            Ok(o) => outcomes.push(o),
            Err(e) => return fail(e),
        }
    }
    let first = outcomes.iter().position(|o| o.disk == Verdict::NonConvex);
    let scale_coherent = match first {
        Some(k) => outcomes[k..].iter().all(|o| o.disk == Verdict::NonConvex),
        None => true,
    };
    let witness = first.map(|k| {
        let lo = if k == 0 { 0.5 * radii[0] } else { radii[k - 1] };
        let best = minimize(&f, lo, outcomes[k].clone(), cfg);
        FailureWitness {
            omega: label.clone(),
            r: best.r,
            window: best.curve.witness,
            escape: best.escape.expect("a NON_CONVEX disk verdict carries its chord"),
        }
    });
    (
        OmegaOutcome {
            omega: label,
            outcomes,
            scale_coherent,
            error: None,
        },
        witness,
    )
}

/// Runs the convexity tests for every dilatation of the family at every
/// radius of the ladder. Failures of single dilatations are recorded in the
/// report and do not stop the sweep.
pub fn probe_admissibility(cfg: &ProbeConfig) -> Result<ProbeReport> {
    cfg.validate()?;
    cfg.phi.build()?;
    let members = cfg.members();
    let results: Vec<(OmegaOutcome, Option<FailureWitness>)> =
        members.par_iter().map(|w| probe_one(cfg, w)).collect();
    let mut entries = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (e, w) in results {
        entries.push(e);
        failures.extend(w);
    }
    let mut radii = cfg.radii.clone();
    radii.sort_by(f64::total_cmp);
    Ok(ProbeReport {
        phi: cfg.phi.to_string(),
        eta: crate::analytic::unimodular("eta", cfg.eta)?,
        radii,
        n_samples: cfg.n_samples,
        tol_backturn: cfg.tol_backturn,
        errors: entries.iter().filter(|e| e.error.is_some()).count(),
        summary: if failures.is_empty() {
            Summary::NoFailureFound
        } else {
            Summary::Failure
        },
        entries,
        failures,
        note: NO_PROOF_NOTE.to_string(),
    })
}

/// Re-runs a witness from its own data: shear, curve, turning test, chord test.
pub fn reproduce_witness(cfg: &ProbeConfig, w: &FailureWitness) -> Result<bool> {
    let spec = crate::text::parse_schwarz(&w.omega)?;
    let f = build_shear(&cfg.phi, &spec, cfg.eta, &cfg.quad)?;
    let o = radius_outcome(&f, w.r, cfg.n_samples, cfg.tol_backturn, &cfg.quad)?;
    Ok(o.curve.verdict == Verdict::NonConvex && o.disk == Verdict::NonConvex)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCase {
    pub xi: C64,
    pub expected: Summary,
    pub report: ProbeReport,
    /// Directions t on a 16-point grid where h − e^{2it}g fails directional
    /// convexity at the largest ladder radius.
    pub failing_directions: Vec<f64>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub cases: Vec<SuiteCase>,
    pub all_match: bool,
}

/// Vertical shears of the rotations ℋ_ξ. With ω = −ξz they fail for
/// ξ ∈ {e^{iπ/4}, e^{iπ/3}, i}; for ξ = ±1 the whole default family passes.
pub fn rotated_counterexample_suite(seed: u64) -> Result<SuiteReport> {
    let eta = C64::new(-1.0, 0.0);
    let mut cases = Vec::new();
    for (xi, expected) in [
        (C64::from_polar(1.0, FRAC_PI_4), Summary::Failure),
        (C64::from_polar(1.0, FRAC_PI_3), Summary::Failure),
        (C64::new(0.0, 1.0), Summary::Failure),
        (C64::new(1.0, 0.0), Summary::NoFailureFound),
        (C64::new(-1.0, 0.0), Summary::NoFailureFound),
    ] {
        let phi = PhiSpec::rotated(CatalogId::H, xi);
        let family = match expected {
            Summary::Failure => vec![OmegaFamily::Explicit(vec![SchwarzSpec::Monomial { lambda: -xi, n: 1 }])],
            Summary::NoFailureFound => default_family(seed),
        };
        let cfg = ProbeConfig::new(phi, eta, family);
        let report = probe_admissibility(&cfg)?;
        let failing_directions = if expected == Summary::Failure {
            let f = build_shear(&phi, &SchwarzSpec::Monomial { lambda: -xi, n: 1 }, eta, &cfg.quad)?;
            let r = *cfg.radii.last().expect("nonempty ladder");
            let grid: Vec<f64> = (0..16).map(|k| PI * k as f64 / 16.0).collect();
            directional_failures(&f, r, &grid, cfg.n_samples, &cfg.quad)?
        } else {
            Vec::new()
        };
        cases.push(SuiteCase {
            xi,
            expected,
            matches: report.summary == expected,
            report,
            failing_directions,
        });
    }
    Ok(SuiteReport {
        all_match: cases.iter().all(|c| c.matches),
        cases,
    })
}

fn directional_reports(
    f: &HarmonicMap,
    r: f64,
    ts: &[f64],
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<Vec<DirectionalReport>> {
    ts.par_iter()
        .map(|t| {
            let combo = HarmonicMap::analytic(analytic_combination(f, *t));
            let c = sample_boundary(&combo, r, n, cfg)?;
            Ok(directional_convexity_check(&c, *t, DEFAULT_DEADBAND))
        })
        .collect()
}

fn directional_failures(f: &HarmonicMap, r: f64, ts: &[f64], n: usize, cfg: &QuadratureConfig) -> Result<Vec<f64>> {
    Ok(directional_reports(f, r, ts, n, cfg)?
        .into_iter()
        .filter(|d| !d.pass)
        .map(|d| d.t)
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssRow {
    pub r: f64,
    pub convexity: Verdict,
    pub directions: Vec<DirectionalReport>,
    pub all_directions_pass: bool,
    /// False when the curve is convex but some direction fails.
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CssReport {
    pub rows: Vec<CssRow>,
    pub inconsistencies: usize,
}

/// Compares the turning test of f at each radius with the directional tests
/// of h − e^{2it}g in the directions t of `t_grid`.
pub fn css_characterization_check(
    f: &HarmonicMap,
    t_grid: &[f64],
    radii: &[f64],
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<CssReport> {
    let mut rows = Vec::new();
    for r in radii {
        let curve = sample_boundary(f, *r, n, cfg)?;
        let convexity = convexity_check(&curve, DEFAULT_TOL_BACKTURN).verdict;
        let directions = directional_reports(f, *r, t_grid, n, cfg)?;
        let all = directions.iter().all(|d| d.pass);
        rows.push(CssRow {
            r: *r,
            convexity,
            consistent: !(convexity == Verdict::Convex && !all),
            all_directions_pass: all,
            directions,
        });
    }
    Ok(CssReport {
        inconsistencies: rows.iter().filter(|r| !r.consistent).count(),
        rows,
    })
}

pub const IDENTIFIER_RADIUS: f64 = 0.99999;
/// Points farther than this multiple of min |γ| are left out of the line fit.
pub const IDENTIFIER_WINDOW: f64 = 4.0;
/// Fit residual allowed, relative to the window diameter.
pub const IDENTIFIER_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Shape {
    /// {w : Re(conj(normal)·w) > offset}.
    HalfPlane { normal: C64, offset: f64 },
    /// {w : a < Re(conj(normal)·w) < b}; the strip parameter is (b − a)/π.
    Strip { normal: C64, a: f64, b: f64, strip_parameter: f64 },
    Other { residual: f64 },
}

/// Principal direction and centroid of a point set.
fn principal_axis(points: &[C64]) -> (C64, C64) {
    let m = points.iter().sum::<C64>() / points.len() as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = p - m;
        sxx += d.re * d.re;
        syy += d.im * d.im;
        sxy += d.re * d.im;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    (m, C64::from_polar(1.0, angle))
}

/// Fits the part of f(|z| = r_max) near the origin by one line or by two
/// parallel lines.
pub fn halfplane_strip_identifier(f: &HarmonicMap, r_max: f64, cfg: &QuadratureConfig) -> Result<Shape> {
    let curve = sample_boundary(f, r_max, DEFAULT_SAMPLES, cfg)?;
    let inside = f.eval(C64::new(0.0, 0.0))?;
    let d_min = curve.gamma.iter().map(|g| (g - inside).norm()).fold(f64::INFINITY, f64::min);
    let radius = IDENTIFIER_WINDOW * d_min;
    let pts: Vec<C64> = curve
        .gamma
        .iter()
        .filter(|g| (*g - inside).norm() <= radius)
        .copied()
        .collect();
    if pts.len() < 8 {
        return Ok(Shape::Other { residual: f64::INFINITY });
    }
    let tol = IDENTIFIER_TOL * 2.0 * radius;
    let (m, dir) = principal_axis(&pts);
    let mut normal = C64::new(0.0, 1.0) * dir;
    let coord = |n: C64, p: C64| (n.conj() * p).re;
    let one = pts
        .iter()
        .map(|p| (coord(normal, *p) - coord(normal, m)).abs())
        .fold(0.0, f64::max);
    if one <= tol {
        let mut offset = coord(normal, m);
        if coord(normal, inside) < offset {
            normal = -normal;
            offset = -offset;
        }
        return Ok(Shape::HalfPlane { normal, offset });
    }
    // two groups on either side of a central line, fitted with one direction;
    // both axes are tried since the samples may spread more across the strip
    // than along it
    let mut best: Option<(f64, C64, f64, f64)> = None;
    for split in [normal, dir] {
        let (upper, lower): (Vec<C64>, Vec<C64>) = pts.iter().partition(|p| coord(split, **p) > coord(split, m));
        if upper.len() < 4 || lower.len() < 4 {
            continue;
        }
        let mu = upper.iter().sum::<C64>() / upper.len() as f64;
        let ml = lower.iter().sum::<C64>() / lower.len() as f64;
        let centred: Vec<C64> = upper
            .iter()
            .map(|p| p - mu)
            .chain(lower.iter().map(|p| p - ml))
            .collect();
        let (_, d2) = principal_axis(&centred);
        let n2 = C64::new(0.0, 1.0) * d2;
        let res = upper
            .iter()
            .map(|p| (coord(n2, *p) - coord(n2, mu)).abs())
            .chain(lower.iter().map(|p| (coord(n2, *p) - coord(n2, ml)).abs()))
            .fold(0.0, f64::max);
        if best.is_none_or(|b| res < b.0) {
            best = Some((res, n2, coord(n2, ml), coord(n2, mu)));
        }
    }
    let Some((residual, mut n2, mut a, mut b)) = best else {
        return Ok(Shape::Other { residual: one });
    };
    if residual > tol {
        return Ok(Shape::Other { residual: residual.min(one) });
    }
    if a > b {
        n2 = -n2;
        (a, b) = (-a, -b);
    }
    Ok(Shape::Strip {
        normal: n2,
        a,
        b,
        strip_parameter: (b - a) / PI,
    })
}
