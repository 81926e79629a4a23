//! Sampled boundary curves f(r·e^{iθ}) and the convexity tests run on them.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::analytic::C64;
use crate::error::{Error, Result};
use crate::quadrature::QuadratureConfig;
use crate::shear::HarmonicMap;

pub const DEFAULT_SAMPLES: usize = 4096;
pub const MIN_SAMPLES: usize = 64;
pub const DEFAULT_RADII: [f64; 3] = [0.9, 0.99, 0.999];
pub const DEFAULT_TOL_BACKTURN: f64 = 1e-6;
/// Relative deadband for plateau merging in the directional test.
pub const DEFAULT_DEADBAND: f64 = 1e-9;
/// Total turning must be this close to 2π for a CONVEX verdict.
pub const TOTAL_TURNING_TOL: f64 = 1e-6;

/// Largest tangent rotation accepted between two refinement nodes.
const MAX_STEP_TURN: f64 = PI / 8.0;
const MIN_STEP: f64 = 1e-11;
const MAX_DEPTH: u32 = 48;

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidRadius(r))
    }
}

/// The image of |z| = r at `n` uniform angles with exact tangent turning.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub r: f64,
    pub theta: Vec<f64>,
    pub gamma: Vec<C64>,
    /// dγ/dθ = i·z·h′(z) − i·conj(z·g′(z)).
    pub tangent: Vec<C64>,
    /// Net change of arg(tangent) from sample j to j + 1 (cyclic).
    pub turning: Vec<f64>,
    /// Largest back-turn inside the step from j to j + 1.
    pub intra_backturn: Vec<f64>,
    /// Largest forward turn reached inside the step, relative to its start.
    #[serde(skip)]
    step_hi: Vec<f64>,
    /// Smallest turn reached inside the step, relative to its start.
    #[serde(skip)]
    step_lo: Vec<f64>,
}

impl BoundaryCurve {
    pub fn n(&self) -> usize {
        self.gamma.len()
    }

    pub fn total_turning(&self) -> f64 {
        self.turning.iter().sum()
    }

    /// A curve from points alone, with the tangent approximated by chords.
    /// Used when re-reading a curve written to disk.
    pub fn from_samples(r: f64, theta: Vec<f64>, gamma: Vec<C64>, turning: Vec<f64>, intra: Vec<f64>) -> Result<Self> {
        let n = gamma.len();
        if n < MIN_SAMPLES {
            return Err(Error::TooFewSamples { got: n, min: MIN_SAMPLES });
        }
        if theta.len() != n || turning.len() != n || intra.len() != n {
            return Err(Error::InvalidParameter("curve columns differ in length".into()));
        }
        let tangent = (0..n).map(|j| gamma[(j + 1) % n] - gamma[(j + n - 1) % n]).collect();
        let step_hi = turning.iter().map(|t| t.max(0.0)).collect();
        let step_lo = turning.iter().zip(&intra).map(|(t, d)| t.min(0.0).min(-d)).collect();
        Ok(BoundaryCurve {
            r,
            theta,
            gamma,
            tangent,
            turning,
            intra_backturn: intra,
            step_hi,
            step_lo,
        })
    }
}

/// Rate of change of arg T in θ.
fn turning_rate(t: C64, dt: C64) -> f64 {
    (dt * t.conj()).im / t.norm_sqr()
}

#[derive(Debug, Clone, Copy)]
struct Step {
    net: f64,
    hi: f64,
    lo: f64,
    backturn: f64,
}

impl Step {
    fn monotone(net: f64) -> Step {
        Step {
            net,
            hi: net.max(0.0),
            lo: net.min(0.0),
            backturn: (-net).max(0.0),
        }
    }

    fn then(self, o: Step) -> Step {
        Step {
            net: self.net + o.net,
            hi: self.hi.max(self.net + o.hi),
            lo: self.lo.min(self.net + o.lo),
            backturn: self.backturn.max(o.backturn).max(self.hi - (self.net + o.lo)),
        }
    }
}

struct Node {
    theta: f64,
    t: C64,
    rate: f64,
}

fn node(f: &HarmonicMap, r: f64, theta: f64) -> Node {
    let (t, dt) = f.tangent_with_rate(C64::from_polar(r, theta));
    Node {
        theta,
        t,
        rate: turning_rate(t, dt),
    }
}

/// Turning of the tangent over [a.theta, b.theta], bisecting until each piece
/// turns by at most π/8 and the turning rate keeps one sign on it.
fn refine(f: &HarmonicMap, r: f64, a: &Node, b: &Node, depth: u32) -> Step {
    let d = (b.t / a.t).arg();
    let width = b.theta - a.theta;
    let sign_change = a.rate * b.rate < 0.0;
    if depth >= MAX_DEPTH || width < MIN_STEP || (d.abs() <= MAX_STEP_TURN && !sign_change) {
        return Step::monotone(d);
    }
    let m = node(f, r, 0.5 * (a.theta + b.theta));
    refine(f, r, a, &m, depth + 1).then(refine(f, r, &m, b, depth + 1))
}

/// Samples f on |z| = r at n uniform angles.
pub fn sample_boundary(f: &HarmonicMap, r: f64, n: usize, cfg: &QuadratureConfig) -> Result<BoundaryCurve> {
    check_radius(r)?;
    if n < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: n, min: MIN_SAMPLES });
    }
    let theta: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
    let gamma = f.circle_values(r, &theta, cfg)?;
    let nodes: Vec<Node> = theta.iter().map(|t| node(f, r, *t)).collect();
    if let Some(k) = nodes.iter().position(|nd| !(nd.t.norm() > 0.0)) {
        return Err(Error::VanishingDerivative(C64::from_polar(r, theta[k])));
    }
    let steps: Vec<Step> = (0..n)
        .map(|j| {
            let b = if j + 1 < n {
                Node {
                    theta: nodes[j + 1].theta,
                    t: nodes[j + 1].t,
                    rate: nodes[j + 1].rate,
                }
            } else {
                Node {
                    theta: TAU,
                    t: nodes[0].t,
                    rate: nodes[0].rate,
                }
            };
            refine(f, r, &nodes[j], &b, 0)
        })
        .collect();
    Ok(BoundaryCurve {
        r,
        tangent: nodes.iter().map(|nd| nd.t).collect(),
        turning: steps.iter().map(|s| s.net).collect(),
        intra_backturn: steps.iter().map(|s| s.backturn).collect(),
        step_hi: steps.iter().map(|s| s.hi).collect(),
        step_lo: steps.iter().map(|s| s.lo).collect(),
        theta,
        gamma,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Convex,
    NonConvex,
    Inconclusive,
}

/// Angular window on the circle where the tangent turns back.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurnWindow {
    pub theta_start: f64,
    pub theta_end: f64,
    pub backturn: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub verdict: Verdict,
    pub total_turning: f64,
    pub worst_backturn: f64,
    pub min_increment: f64,
    pub witness: Option<TurnWindow>,
}

/// Monotone-turning test: CONVEX when the tangent never turns back by more
/// than `tol_backturn` and turns once around; NON_CONVEX when some window
/// turns back by more than 10·`tol_backturn`.
pub fn convexity_check(curve: &BoundaryCurve, tol_backturn: f64) -> ConvexityReport {
    let n = curve.n();
    let total = curve.total_turning();
    let min_increment = curve.turning.iter().copied().fold(f64::INFINITY, f64::min);

    // largest drop of the cumulative turning, scanned over two laps for cyclic windows
    let mut base = 0.0;
    let mut peak = 0.0;
    let mut peak_at = 0usize;
    let mut worst = 0.0;
    let mut window = (0usize, 0usize);
    for k in 0..2 * n {
        let j = k % n;
        let (hi, lo) = (curve.step_hi[j], curve.step_lo[j]);
        if curve.intra_backturn[j] > worst {
            worst = curve.intra_backturn[j];
            window = (k, k + 1);
        }
        if peak - (base + lo) > worst {
            worst = peak - (base + lo);
            window = (peak_at, k + 1);
        }
        if base + hi > peak {
            peak = base + hi;
            peak_at = k;
        }
        base += curve.turning[j];
    }
    let verdict = if min_increment >= -tol_backturn
        && worst <= tol_backturn
        && (total - TAU).abs() <= TOTAL_TURNING_TOL
    {
        Verdict::Convex
    } else if worst > 10.0 * tol_backturn {
        Verdict::NonConvex
    } else {
        Verdict::Inconclusive
    };
    let angle = |k: usize| {
        let lap = (k / n) as f64;
        curve.theta[k % n] + lap * TAU
    };
    let witness = (worst > tol_backturn).then(|| {
        let s = angle(window.0);
        let e = angle(window.1);
        let s_mod = s.rem_euclid(TAU);
        TurnWindow {
            theta_start: s_mod,
            theta_end: s_mod + (e - s),
            backturn: worst,
        }
    });
    ConvexityReport {
        verdict,
        total_turning: total,
        worst_backturn: worst,
        min_increment,
        witness,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalReport {
    pub t: f64,
    pub sign_changes: usize,
    pub pass: bool,
    pub deadband: f64,
}

/// Convexity in the direction e^{it}: the coordinate q = Im(e^{−it}·γ) must
/// rise and fall exactly once around the curve. Reversals smaller than
/// `deadband` times the range of q are merged.
pub fn directional_convexity_check(curve: &BoundaryCurve, t: f64, deadband: f64) -> DirectionalReport {
    let rot = C64::from_polar(1.0, -t);
    let q: Vec<f64> = curve.gamma.iter().map(|g| (rot * g).im).collect();
    let (mut lo, mut hi, mut start) = (f64::INFINITY, f64::NEG_INFINITY, 0);
    for (j, v) in q.iter().enumerate() {
        lo = lo.min(*v);
        if *v > hi {
            hi = *v;
            start = j;
        }
    }
    let band = deadband * (hi - lo);
    let n = q.len();
    let mut descending = true;
    let mut extreme = q[start];
    let mut changes = 0;
    for k in 1..=n {
        let v = q[(start + k) % n];
        if descending {
            if v < extreme {
                extreme = v;
            } else if v - extreme > band {
                changes += 1;
                descending = false;
                extreme = v;
            }
        } else if v > extreme {
            extreme = v;
        } else if extreme - v > band {
            changes += 1;
            descending = true;
            extreme = v;
        }
    }
    if !descending {
        // closes the cycle at the global maximum
        changes += 1;
    }
    DirectionalReport {
        t,
        sign_changes: changes,
        pass: changes == 2,
        deadband: band,
    }
}

/// Winding number of a closed polygon around `w`.
pub fn winding_number_points(points: &[C64], w: C64) -> Result<i64> {
    let mut total = 0.0;
    let n = points.len();
    for j in 0..n {
        let a = points[j] - w;
        if a.norm() < 1e-9 {
            return Err(Error::TooCloseToCurve(w));
        }
        total += ((points[(j + 1) % n] - w) / a).arg();
    }
    Ok((total / TAU).round() as i64)
}

pub fn winding_number(curve: &BoundaryCurve, w: C64) -> Result<i64> {
    winding_number_points(&curve.gamma, w)
}

/// Samples farther than this from the origin are left out of the parabola
/// residual: a curve at finite radius closes its image with a far arc that
/// the parabola does not describe.
pub const PARABOLA_WINDOW: f64 = 100.0;

/// max |Re γ + (Im γ)² + 1/4| over the samples with |γ| ≤ `PARABOLA_WINDOW`.
pub fn parabola_residual(curve: &BoundaryCurve) -> f64 {
    parabola_residual_within(curve, PARABOLA_WINDOW)
}

pub fn parabola_residual_within(curve: &BoundaryCurve, window: f64) -> f64 {
    curve
        .gamma
        .iter()
        .filter(|g| g.norm() <= window)
        .map(|g| (g.re + g.im * g.im + 0.25).abs())
        .fold(0.0, f64::max)
}

/// Largest relative gap between the analytic tangent and a five-point
/// centered difference of the samples.
pub fn tangent_difference_error(curve: &BoundaryCurve) -> f64 {
    let n = curve.n();
    let h = TAU / n as f64;
    let g = |k: isize| curve.gamma[k.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|j| {
            let fd = (g(j - 2) - 8.0 * g(j - 1) + 8.0 * g(j + 1) - g(j + 2)) / (12.0 * h);
            let t = curve.tangent[j as usize];
            (fd - t).norm() / t.norm()
        })
        .fold(0.0, f64::max)
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Indices of the convex hull in counter-clockwise order (monotone chain).
pub fn convex_hull(points: &[C64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| {
        points[a]
            .re
            .total_cmp(&points[b].re)
            .then(points[a].im.total_cmp(&points[b].im))
    });
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let seq: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in seq {
            while hull.len() >= start + 2
                && cross(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// θ-refined samples of f on |z| = r: uniform base angles, bisected wherever
/// the tangent turns by more than `max_turn` between neighbours.
pub fn adaptive_boundary(
    f: &HarmonicMap,
    r: f64,
    base_n: usize,
    max_turn: f64,
    cfg: &QuadratureConfig,
) -> Result<(Vec<f64>, Vec<C64>)> {
    check_radius(r)?;
    let base: Vec<f64> = (0..=base_n).map(|j| TAU * j as f64 / base_n as f64).collect();
    let mut thetas = Vec::with_capacity(2 * base_n);
    fn split(f: &HarmonicMap, r: f64, a: (f64, C64), b: (f64, C64), max_turn: f64, depth: u32, out: &mut Vec<f64>) {
        if depth >= 30 || (b.1 / a.1).arg().abs() <= max_turn {
            return;
        }
        let m = 0.5 * (a.0 + b.0);
        let tm = f.tangent(C64::from_polar(r, m));
        split(f, r, a, (m, tm), max_turn, depth + 1, out);
        out.push(m);
        split(f, r, (m, tm), b, max_turn, depth + 1, out);
    }
    let ts: Vec<C64> = base.iter().map(|t| f.tangent(C64::from_polar(r, *t))).collect();
    for j in 0..base_n {
        thetas.push(base[j]);
        split(f, r, (base[j], ts[j]), (base[j + 1], ts[j + 1]), max_turn, 0, &mut thetas);
    }
    let gamma = f.circle_values(r, &thetas, cfg)?;
    Ok((thetas, gamma))
}

/// A point on a chord of f(|z| = r) that lies outside the region bounded by
/// f(|z| = r_out).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EscapeWitness {
    pub theta_a: f64,
    pub theta_b: f64,
    pub s: f64,
    pub point: C64,
    pub r_outer: f64,
}

/// Points tested along each chord.
const CHORD_POINTS: usize = 16;

fn distance_to_polygon(points: &[C64], w: C64) -> f64 {
    let n = points.len();
    (0..n)
        .map(|j| {
            let (a, b) = (points[j], points[(j + 1) % n]);
            let ab = b - a;
            let s = if ab.norm_sqr() > 0.0 {
                (((w - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0)
            } else {
                0.0
            };
            (a + ab * s - w).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Looks for a chord between two points of `inner` that leaves the region
/// bounded by `outer`. Candidate chords are the hull edges of `inner` that
/// skip over part of the curve.
pub fn chord_escape(inner: &BoundaryCurve, outer: &[C64], r_outer: f64) -> Option<EscapeWitness> {
    let n = inner.n();
    let hull = convex_hull(&inner.gamma);
    for k in 0..hull.len() {
        let (a, b) = (hull[k], hull[(k + 1) % hull.len()]);
        let gap = (b + n - a) % n;
        if gap <= 1 || gap == n - 1 {
            continue;
        }
        let (ga, gb) = (inner.gamma[a], inner.gamma[b]);
        // points this close to the outer curve are not trusted either way
        let margin = 1e-7 * (gb - ga).norm();
        for s in (1..=CHORD_POINTS).map(|i| i as f64 / (CHORD_POINTS + 1) as f64).chain([0.5]) {
            let w = ga + (gb - ga) * s;
            if distance_to_polygon(outer, w) <= margin {
                continue;
            }
            if let Ok(0) = winding_number_points(outer, w) {
                return Some(EscapeWitness {
                    theta_a: inner.theta[a],
                    theta_b: inner.theta[b],
                    s,
                    point: w,
                    r_outer,
                });
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{catalog, CatalogId};
    use crate::schwarz::{make_schwarz, SchwarzSpec};
    use crate::shear::{shear_construct, ShearSystem};

    const ONE: C64 = C64::new(1.0, 0.0);

    fn analytic(id: CatalogId) -> HarmonicMap {
        HarmonicMap::analytic(catalog(id).unwrap())
    }

    fn f0() -> HarmonicMap {
        let w = make_schwarz(&SchwarzSpec::Monomial { lambda: ONE, n: 1 }).unwrap();
        let sys = ShearSystem::new(catalog(CatalogId::H).unwrap(), w, ONE).unwrap();
        shear_construct(&sys, &QuadratureConfig::default()).unwrap()
    }

    fn curve(f: &HarmonicMap, r: f64, n: usize) -> BoundaryCurve {
        sample_boundary(f, r, n, &QuadratureConfig::default()).unwrap()
    }

    #[test]
    fn identity_circle() {
        let c = curve(&analytic(CatalogId::Identity), 0.5, 256);
        for j in 0..c.n() {
            assert!((c.gamma[j].norm() - 0.5).abs() < 1e-15);
            let z = C64::from_polar(0.5, c.theta[j]);
            assert!((c.tangent[j] - C64::new(0.0, 1.0) * z).norm() < 1e-15);
        }
        let rep = convexity_check(&c, DEFAULT_TOL_BACKTURN);
        assert_eq!(rep.verdict, Verdict::Convex);
        assert!((rep.total_turning - TAU).abs() < 1e-12);
        assert_eq!(winding_number(&c, C64::new(0.0, 0.0)).unwrap(), 1);
        assert_eq!(winding_number(&c, ONE).unwrap(), 0);
        let res = parabola_residual(&c);
        assert!((res - 0.75).abs() < 1e-12, "{res}");
    }

    #[test]
    fn half_plane_map_gives_convex_circle() {
        let c = curve(&analytic(CatalogId::H), 0.9, 1024);
        let rep = convexity_check(&c, DEFAULT_TOL_BACKTURN);
        assert_eq!(rep.verdict, Verdict::Convex);
        assert!((rep.total_turning - TAU).abs() < 1e-9);
        // Möbius image: centre 1/(1 − r²) − 1/2... every point equidistant from the centre
        let centre = C64::new(0.81 / (1.0 - 0.81), 0.0);
        let rad = 0.9 / (1.0 - 0.81);
        for g in &c.gamma {
            assert!(((g - centre).norm() - rad).abs() < 1e-9);
        }
    }

    #[test]
    fn koebe_stops_being_convex() {
        let k = analytic(CatalogId::Koebe);
        assert_eq!(convexity_check(&curve(&k, 0.25, 1024), 1e-6).verdict, Verdict::Convex);
        let rep = convexity_check(&curve(&k, 0.5, 1024), 1e-6);
        assert_eq!(rep.verdict, Verdict::NonConvex);
        let w = rep.witness.unwrap();
        let mid = 0.5 * (w.theta_start + w.theta_end);
        assert!((mid.rem_euclid(TAU) - PI).abs() < 0.5, "{w:?}");
    }

    #[test]
    fn parabola_map_is_not_convex() {
        let f = f0();
        let c = curve(&f, 0.99, 4096);
        let rep = convexity_check(&c, DEFAULT_TOL_BACKTURN);
        assert_eq!(rep.verdict, Verdict::NonConvex);
        let w = 0.5 * (f.eval(C64::new(0.0, 0.98)).unwrap() + f.eval(C64::new(0.0, -0.98)).unwrap());
        assert_eq!(winding_number(&c, w).unwrap(), 0);
        assert_eq!(winding_number(&c, C64::new(0.0, 0.0)).unwrap(), 1);
    }

    #[test]
    fn parabola_residual_decreases_toward_boundary() {
        let f = f0();
        let r90 = parabola_residual(&curve(&f, 0.9, 1024));
        let r999 = parabola_residual(&curve(&f, 0.999, 1024));
        assert!(r90 > r999, "{r90} {r999}");
        let tight = parabola_residual(&curve(&f, 0.9999, 4096));
        assert!(tight <= 5e-3, "{tight}");
    }

    #[test]
    fn tangent_matches_differences() {
        for f in [f0(), analytic(CatalogId::LLambda(C64::new(0.0, 1.0)))] {
            let e = tangent_difference_error(&curve(&f, 0.9, 4096));
            assert!(e < 1e-5, "{e}");
        }
    }

    #[test]
    fn koebe_horizontal_only() {
        let c = curve(&analytic(CatalogId::Koebe), 0.999, 4096);
        assert!(directional_convexity_check(&c, 0.0, DEFAULT_DEADBAND).pass);
        assert!(!directional_convexity_check(&c, PI / 2.0, DEFAULT_DEADBAND).pass);
    }

    #[test]
    fn hull_of_square_with_dent() {
        let pts = vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 1.0),
            C64::new(0.5, 0.2),
            C64::new(0.0, 1.0),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&3));
    }

    #[test]
    fn rejects_bad_inputs() {
        let f = analytic(CatalogId::H);
        let cfg = QuadratureConfig::default();
        assert!(matches!(sample_boundary(&f, 1.0, 128, &cfg), Err(Error::InvalidRadius(_))));
        assert!(matches!(
            sample_boundary(&f, 0.5, 10, &cfg),
            Err(Error::TooFewSamples { .. })
        ));
        let c = curve(&analytic(CatalogId::Identity), 0.5, 64);
        assert!(winding_number(&c, C64::new(0.5, 0.0)).is_err());
    }
}
