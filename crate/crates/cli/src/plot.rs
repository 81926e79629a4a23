//! Convexity reports and their SVG plots. The plot is drawn from the report
//! alone, so re-rendering a saved report gives the same picture.

use std::fmt::Write;

use hshear::geometry::{BoundaryCurve, ConvexityReport, DirectionalReport, TurnWindow};
use hshear::C64;
use serde::{Deserialize, Serialize};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 0.05;
const PARABOLA_POINTS: usize = 400;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityOutput {
    pub phi: String,
    pub omega: String,
    pub eta: C64,
    pub r: f64,
    pub n: usize,
    pub tol_backturn: f64,
    pub report: ConvexityReport,
    pub directional: Option<DirectionalReport>,
    /// Present for the parabola map, whose image lies left of
    /// Re w = −(Im w)² − 1/4.
    pub parabola_residual: Option<f64>,
    /// (θ, Re γ, Im γ) per sample.
    pub points: Vec<[f64; 3]>,
}

impl ConvexityOutput {
    pub fn new(
        phi: String,
        omega: String,
        eta: C64,
        curve: &BoundaryCurve,
        tol_backturn: f64,
        report: ConvexityReport,
        directional: Option<DirectionalReport>,
        parabola_residual: Option<f64>,
    ) -> Self {
        ConvexityOutput {
            phi,
            omega,
            eta,
            r: curve.r,
            n: curve.n(),
            tol_backturn,
            report,
            directional,
            parabola_residual,
            points: (0..curve.n())
                .map(|j| [curve.theta[j], curve.gamma[j].re, curve.gamma[j].im])
                .collect(),
        }
    }
}

fn in_window(theta: f64, w: &TurnWindow) -> bool {
    if w.theta_start <= w.theta_end {
        (w.theta_start..=w.theta_end).contains(&theta)
    } else {
        theta >= w.theta_start || theta <= w.theta_end
    }
}

struct Frame {
    x0: f64,
    y1: f64,
    scale: f64,
    height: f64,
}

impl Frame {
    fn fit(points: &[[f64; 3]]) -> Frame {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points.iter().filter(|p| p[1].is_finite() && p[2].is_finite()) {
            x0 = x0.min(p[1]);
            x1 = x1.max(p[1]);
            y0 = y0.min(p[2]);
            y1 = y1.max(p[2]);
        }
        if !x0.is_finite() {
            (x0, x1, y0, y1) = (-1.0, 1.0, -1.0, 1.0);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-12);
        let pad = MARGIN * span;
        let (x0, x1, y0, y1) = (x0 - pad, x1 + pad, y0 - pad, y1 + pad);
        let scale = WIDTH / (x1 - x0);
        Frame {
            x0,
            y1,
            scale,
            height: ((y1 - y0) * scale).max(1.0),
        }
    }

    fn px(&self, w: C64) -> (f64, f64) {
        ((w.re - self.x0) * self.scale, (self.y1 - w.im) * self.scale)
    }

    fn xmax(&self) -> f64 {
        self.x0 + WIDTH / self.scale
    }

    fn ymin(&self) -> f64 {
        self.y1 - self.height / self.scale
    }
}

fn polyline(frame: &Frame, pts: impl IntoIterator<Item = C64>) -> String {
    let mut s = String::new();
    for w in pts {
        let (x, y) = frame.px(w);
        let _ = write!(s, "{x:.3},{y:.3} ");
    }
    s.trim_end().to_string()
}

/// The curve, the axes through the origin when visible, the witness window
/// of the turning test, and the bounding parabola when the report has one.
pub fn render_svg(out: &ConvexityOutput) -> String {
    let frame = Frame::fit(&out.points);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{h:.0}" viewBox="0 0 {WIDTH:.3} {h:.3}">"#,
        h = frame.height
    );
    let _ = writeln!(
        s,
        "<title>phi={} omega={} eta={} r={} verdict={:?}</title>",
        escape(&out.phi),
        escape(&out.omega),
        hshear::text::complex_to_string(out.eta),
        out.r,
        out.report.verdict
    );
    let _ = writeln!(s, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    let (ox, oy) = frame.px(C64::new(0.0, 0.0));
    if (0.0..=frame.height).contains(&oy) {
        let _ = writeln!(s, r##"<line x1="0" y1="{oy:.3}" x2="{WIDTH:.3}" y2="{oy:.3}" stroke="#bbbbbb"/>"##);
    }
    if (0.0..=WIDTH).contains(&ox) {
        let _ = writeln!(s, r##"<line x1="{ox:.3}" y1="0" x2="{ox:.3}" y2="{:.3}" stroke="#bbbbbb"/>"##, frame.height);
    }

    let curve = polyline(&frame, out.points.iter().map(|p| C64::new(p[1], p[2])));
    let _ = writeln!(s, r##"<polygon points="{curve}" fill="none" stroke="#1f4e9c" stroke-width="1.5"/>"##);

    if out.parabola_residual.is_some() {
        // Re w = −y² − 1/4 stays in the frame while −y² − 1/4 ≥ x0
        let reach = (-frame.x0 - 0.25).max(0.0).sqrt();
        let (lo, hi) = (frame.ymin().max(-reach), frame.y1.min(reach));
        if lo < hi && -0.25 >= frame.x0 && frame.xmax() >= -lo * lo - 0.25 {
            let pts = (0..=PARABOLA_POINTS).map(|k| {
                let y = lo + (hi - lo) * k as f64 / PARABOLA_POINTS as f64;
                C64::new(-y * y - 0.25, y)
            });
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#c0392b" stroke-dasharray="6 4"/>"##,
                polyline(&frame, pts)
            );
        }
    }

    if let Some(w) = &out.report.witness {
        let pts: Vec<C64> = out
            .points
            .iter()
            .filter(|p| in_window(p[0], w))
            .map(|p| C64::new(p[1], p[2]))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r##"<polyline points="{}" fill="none" stroke="#e67e22" stroke-width="4" stroke-opacity="0.8"/>"##,
                polyline(&frame, pts)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
