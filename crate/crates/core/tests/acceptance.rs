//! Acceptance gate: one PASS/FAIL line per criterion.

use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::process::ExitCode;
use std::time::Instant;

use hshear::analytic::{catalog, CatalogId, PhiSpec, C64};
use hshear::boundary_rotation::{boundary_rotation_value, brannan_transform, default_rotation_samples};
use hshear::geometry::{
    convexity_check, directional_convexity_check, parabola_residual, sample_boundary, tangent_difference_error,
    winding_number, Verdict, DEFAULT_DEADBAND, DEFAULT_RADII, DEFAULT_TOL_BACKTURN,
};
use hshear::probe::{
    default_family, halfplane_strip_identifier, probe_admissibility, reproduce_witness,
    rotated_counterexample_suite, OmegaFamily, ProbeConfig, ProbeReport, Shape, Summary, DEFAULT_SEED,
    IDENTIFIER_RADIUS,
};
use hshear::quadrature::{integrate_segment, QuadratureConfig};
use hshear::schwarz::{make_schwarz, SchwarzSpec};
use hshear::shear::{shear_construct, HarmonicMap, ShearSystem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

struct Gate {
    failed: usize,
}

impl Gate {
    fn record(&mut self, id: &str, ok: bool, detail: String) {
        println!("{} criterion {id}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

fn grid(rmax: f64, rings: usize, spokes: usize) -> Vec<C64> {
    let mut pts = vec![C64::new(0.0, 0.0)];
    for i in 1..=rings {
        let r = rmax * i as f64 / rings as f64;
        for k in 0..spokes {
            pts.push(C64::from_polar(r, 0.1 + TAU * k as f64 / spokes as f64));
        }
    }
    pts
}

fn shear(id: CatalogId, omega: SchwarzSpec, eta: C64) -> HarmonicMap {
    let sys = ShearSystem::new(catalog(id).unwrap(), make_schwarz(&omega).unwrap(), eta).unwrap();
    shear_construct(&sys, &QuadratureConfig::default()).unwrap()
}

fn monomial(lambda: C64, n: u32) -> SchwarzSpec {
    SchwarzSpec::Monomial { lambda, n }
}

fn criterion_1(gate: &mut Gate) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let unit = |rng: &mut ChaCha8Rng| C64::from_polar(1.0, rng.gen_range(0.0..TAU));
        let id = match rng.gen_range(0..6) {
            0 => CatalogId::H,
            1 => CatalogId::HRotMinus1,
            2 => CatalogId::LLambda(C64::from_polar(1.0, rng.gen_range(0.1..PI - 0.1))),
            3 => CatalogId::Koebe,
            4 => CatalogId::MobiusHalfplane(unit(&mut rng)),
            _ => CatalogId::Identity,
        };
        let omega = if rng.gen_bool(0.5) {
            monomial(unit(&mut rng), rng.gen_range(1..=3))
        } else {
            SchwarzSpec::RandomBlaschke {
                seed: rng.gen(),
                degree: rng.gen_range(0..=3),
                scale: rng.gen_range(0.1..=1.0),
            }
        };
        let eta = unit(&mut rng);
        let phi = catalog(id).unwrap();
        let f = shear(id, omega, eta);
        for z in grid(0.99, 6, 24) {
            let (h, g) = f.parts(z).unwrap();
            worst = worst.max((h - eta * g - phi.value(z).unwrap()).norm());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    gate.record(
        "1",
        worst <= 1e-9 && secs <= 10.0,
        format!("shear reconstruction, 20 triples: max |h - eta g - phi| = {worst:.3e} (<= 1e-9), {secs:.2}s (<= 10s)"),
    );
}

fn criterion_2(gate: &mut Gate) {
    let f = shear(CatalogId::H, monomial(ONE, 1), ONE);
    let h0 = catalog(CatalogId::F0HPart).unwrap();
    let g0 = catalog(CatalogId::F0GPart).unwrap();
    let mut worst: f64 = 0.0;
    for z in grid(0.99, 6, 24) {
        let (h, g) = f.parts(z).unwrap();
        let (eh, eg) = (h0.value(z).unwrap(), g0.value(z).unwrap());
        worst = worst
            .max((h - eh).norm() / eh.norm().max(1.0))
            .max((g - eg).norm() / eg.norm().max(1.0));
    }
    let cfg = QuadratureConfig::default();
    let residual = parabola_residual(&sample_boundary(&f, 0.9999, 4096, &cfg).unwrap());
    let curve = sample_boundary(&f, 0.99, 4096, &cfg).unwrap();
    let rep = convexity_check(&curve, DEFAULT_TOL_BACKTURN);
    let mid = 0.5 * (f.eval(C64::new(0.0, 0.98)).unwrap() + f.eval(C64::new(0.0, -0.98)).unwrap());
    let wn = winding_number(&curve, mid).unwrap();
    gate.record(
        "2",
        worst <= 1e-10 && residual <= 5e-3 && rep.verdict == Verdict::NonConvex && wn == 0,
        format!(
            "parabola map: closed-form error {worst:.3e} (<= 1e-10), residual at 0.9999 {residual:.3e} (<= 5e-3), \
             r=0.99 verdict {:?}, winding at chord midpoint {wn} (0)",
            rep.verdict
        ),
    );
}

fn max_turning_defect(reports: &[ProbeReport]) -> (f64, usize) {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for rep in reports {
        for e in &rep.entries {
            for o in &e.outcomes {
                worst = worst.max((o.curve.total_turning - TAU).abs());
                count += 1;
            }
        }
    }
    (worst, count)
}

fn criterion_3(gate: &mut Gate) -> Vec<ProbeReport> {
    let start = Instant::now();
    let mut reports = Vec::new();
    let mut lines = Vec::new();
    let mut ok = true;
    for id in [
        CatalogId::H,
        CatalogId::HRotMinus1,
        CatalogId::LLambda(I),
        CatalogId::LLambda(C64::from_polar(1.0, FRAC_PI_3)),
    ] {
        let cfg = ProbeConfig::new(PhiSpec::catalog(id), -ONE, default_family(DEFAULT_SEED));
        let rep = probe_admissibility(&cfg).unwrap();
        ok &= rep.summary == Summary::NoFailureFound && rep.errors == 0 && rep.entries.len() >= 74;
        let inconclusive = rep
            .entries
            .iter()
            .flat_map(|e| &e.outcomes)
            .filter(|o| o.disk == Verdict::Inconclusive)
            .count();
        lines.push(format!(
            "{} {:?} ({} dilatations, {} inconclusive radii)",
            rep.phi,
            rep.summary,
            rep.entries.len(),
            inconclusive
        ));
        reports.push(rep);
    }
    let secs = start.elapsed().as_secs_f64();
    gate.record(
        "3",
        ok && secs <= 120.0,
        format!("always-convex positives: {}; {secs:.1}s (<= 120s)", lines.join("; ")),
    );
    reports
}

fn criterion_4(gate: &mut Gate) {
    let suite = rotated_counterexample_suite(DEFAULT_SEED).unwrap();
    let mut ok = suite.all_match;
    let mut parts = Vec::new();
    for c in &suite.cases {
        let cfg = ProbeConfig::new(
            PhiSpec::rotated(CatalogId::H, c.xi),
            -ONE,
            vec![OmegaFamily::Explicit(vec![monomial(-c.xi, 1)])],
        );
        for w in &c.report.failures {
            ok &= reproduce_witness(&cfg, w).unwrap();
        }
        parts.push(format!(
            "xi={:.4}{:+.4}i {:?} (expected {:?})",
            c.xi.re, c.xi.im, c.report.summary, c.expected
        ));
    }
    gate.record("4", ok, format!("rotated counterexamples: {}", parts.join("; ")));
}

fn passing_directions(f: &HarmonicMap, r: f64) -> Vec<usize> {
    let curve = sample_boundary(f, r, 4096, &QuadratureConfig::default()).unwrap();
    (0..64)
        .filter(|k| directional_convexity_check(&curve, PI * *k as f64 / 64.0, DEFAULT_DEADBAND).pass)
        .collect()
}

fn criterion_5(gate: &mut Gate) {
    let k = HarmonicMap::analytic(catalog(CatalogId::Koebe).unwrap());
    let pass = passing_directions(&k, 0.999);
    gate.record(
        "5",
        pass == vec![0],
        format!("Koebe at r=0.999, 64 directions: passing grid indices {pass:?} (exactly [0])"),
    );
}

fn criterion_6(gate: &mut Gate) {
    let cfg = QuadratureConfig::default();
    let h = HarmonicMap::analytic(catalog(CatalogId::H).unwrap());
    let l = HarmonicMap::analytic(catalog(CatalogId::LLambda(I)).unwrap());
    let hs = halfplane_strip_identifier(&h, IDENTIFIER_RADIUS, &cfg).unwrap();
    let ls = halfplane_strip_identifier(&l, IDENTIFIER_RADIUS, &cfg).unwrap();
    let ok_h = matches!(hs, Shape::HalfPlane { normal, offset } if (offset + 0.5).abs() <= 1e-3 && (normal - ONE).norm() <= 1e-3);
    let ok_l = matches!(ls, Shape::Strip { strip_parameter, .. } if (strip_parameter - 0.5).abs() <= 1e-3);
    gate.record(
        "6",
        ok_h && ok_l,
        format!("half-plane/strip identification: H -> {hs:?}; L_i -> {ls:?}"),
    );
}

fn criterion_7(gate: &mut Gate) {
    let cfg = QuadratureConfig::default();
    let mut worst_convex: f64 = 0.0;
    for id in [CatalogId::H, CatalogId::HRotMinus1, CatalogId::LLambda(I), CatalogId::Identity] {
        let phi = catalog(id).unwrap();
        for r in DEFAULT_RADII {
            let v = boundary_rotation_value(&phi, r, default_rotation_samples(r)).unwrap();
            worst_convex = worst_convex.max((v.value_over_pi - 2.0).abs());
        }
    }
    let h = catalog(CatalogId::H).unwrap();
    let b1 = brannan_transform(&h, -ONE, 1, &cfg).unwrap();
    let b2 = brannan_transform(&h, ONE, 2, &cfg).unwrap();
    let ladder_max = |f| {
        DEFAULT_RADII
            .iter()
            .map(|r| boundary_rotation_value(f, *r, default_rotation_samples(*r)).unwrap().value_over_pi)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let (m1, m2) = (ladder_max(&b1), ladder_max(&b2));
    let k = catalog(CatalogId::Koebe).unwrap();
    let mut koebe_gap: f64 = 0.0;
    for z in grid(0.99, 6, 24) {
        let v = k.value(z).unwrap();
        koebe_gap = koebe_gap.max((b1.value(z).unwrap() - v).norm() / v.norm().max(1.0));
    }
    gate.record(
        "7",
        worst_convex <= 1e-9 && m1 <= 4.0 + 1e-6 && m2 <= 6.0 + 1e-6 && koebe_gap <= 1e-10,
        format!(
            "boundary rotation: convex maps |value - 2| <= {worst_convex:.2e} (1e-9); (-1,1) max {m1:.6} (<= 4); \
             (1,2) max {m2:.6} (<= 6); (-1,1) vs Koebe {koebe_gap:.2e} (<= 1e-10)"
        ),
    );
}

fn criterion_8(gate: &mut Gate) {
    let lambda = I;
    let f = shear(CatalogId::LLambda(lambda), monomial(-ONE, 1), -ONE);
    let c = 1.0 / (2.0 - 2.0 * lambda.re);
    let mut worst: f64 = 0.0;
    for z in grid(0.99, 6, 24) {
        let d = f.h.value(z).unwrap() - f.g.value(z).unwrap();
        let want = c * ((ONE - lambda * z) * (ONE - lambda.conj() * z) / ((ONE - z) * (ONE - z))).ln();
        worst = worst.max((d - want).norm());
    }
    let combo = HarmonicMap::analytic(f.h.minus(ONE, &f.g));
    let pass = passing_directions(&combo, 0.999);
    gate.record(
        "8",
        worst <= 1e-9 && pass == vec![0],
        format!("slit strip: formula error {worst:.3e} (<= 1e-9); passing direction indices {pass:?} (exactly [0])"),
    );
}

fn criterion_9(gate: &mut Gate, positives: &[ProbeReport], started: Instant) {
    let cfg = QuadratureConfig::default();
    let mut tangent: f64 = 0.0;
    for (f, r) in [
        (shear(CatalogId::H, monomial(ONE, 1), ONE), 0.9),
        (shear(CatalogId::H, monomial(I, 2), -ONE), 0.9),
        (shear(CatalogId::LLambda(I), monomial(-ONE, 1), -ONE), 0.9),
        (HarmonicMap::analytic(catalog(CatalogId::Koebe).unwrap()), 0.9),
        (HarmonicMap::analytic(catalog(CatalogId::Identity).unwrap()), 0.5),
    ] {
        tangent = tangent.max(tangent_difference_error(&sample_boundary(&f, r, 4096, &cfg).unwrap()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut path: f64 = 0.0;
    let integrands: Vec<hshear::analytic::AnalyticFunction> = vec![
        catalog(CatalogId::H).unwrap(),
        catalog(CatalogId::LLambda(I)).unwrap(),
        catalog(CatalogId::Koebe).unwrap(),
        catalog(CatalogId::MobiusHalfplane(C64::from_polar(1.0, 2.0))).unwrap(),
    ];
    for phi in &integrands {
        for _ in 0..25 {
            let z = C64::from_polar(rng.gen_range(0.0..0.99), rng.gen_range(0.0..TAU));
            let d = |w: C64| phi.d1(w);
            let radial: C64 = integrate_segment(&d, C64::new(0.0, 0.0), z, &cfg).unwrap();
            let bend = z * 0.5 * C64::new(1.0, 0.3);
            let a: C64 = integrate_segment(&d, C64::new(0.0, 0.0), bend, &cfg).unwrap();
            let b: C64 = integrate_segment(&d, bend, z, &cfg).unwrap();
            path = path.max((radial - (a + b)).norm());
        }
    }

    let (turning, curves) = max_turning_defect(positives);
    let secs = started.elapsed().as_secs_f64();
    gate.record(
        "9",
        tangent <= 1e-5 && path <= 1e-11 && turning <= 1e-3 && secs <= 300.0,
        format!(
            "oracle invariants: tangent vs differences {tangent:.2e} (<= 1e-5); path independence {path:.2e} \
             (<= 1e-11); total turning defect over {curves} curves {turning:.2e} (<= 1e-3); gate runtime {secs:.1}s (<= 300s)"
        ),
    );
}

fn main() -> ExitCode {
    let started = Instant::now();
    let mut gate = Gate { failed: 0 };
    criterion_1(&mut gate);
    criterion_2(&mut gate);
    let positives = criterion_3(&mut gate);
    criterion_4(&mut gate);
    criterion_5(&mut gate);
    criterion_6(&mut gate);
    criterion_7(&mut gate);
    criterion_8(&mut gate);
    criterion_9(&mut gate, &positives, started);
    println!("acceptance: {} of 9 criteria failed", gate.failed);
    if gate.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
