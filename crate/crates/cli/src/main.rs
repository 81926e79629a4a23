use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use hshear::analytic::PhiSpec;
use hshear::boundary_rotation::vk_membership;
use hshear::geometry::{
    convexity_check, directional_convexity_check, parabola_residual, sample_boundary, DEFAULT_DEADBAND,
    DEFAULT_RADII, DEFAULT_SAMPLES, DEFAULT_TOL_BACKTURN,
};
use hshear::probe::{probe_admissibility, OmegaFamily, ProbeConfig, ProbeReport, DEFAULT_SEED};
use hshear::text::{parse_eta, parse_family, parse_phi, parse_schwarz};
use hshear::{make_schwarz, shear_construct, CatalogId, QuadratureConfig, SchwarzSpec, ShearSystem, C64};
use hshear_cli::output::{check_precision, curve_csv, to_json, write_file, write_table, DEFAULT_PRECISION, OUT_DIR_ENV, SHEAR_COLUMNS};
use hshear_cli::plot::{render_svg, ConvexityOutput};
use hshear_cli::reproduce::{self, Case};
use serde::Serialize;

/// Harmonic shears of analytic maps and numerical tests of their convexity.
#[derive(Parser)]
#[command(name = "hshear", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Absolute quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    quad_tol: f64,
    /// Gauss–Legendre panel order.
    #[arg(long, global = true, default_value_t = 15)]
    quad_order: usize,
    /// Significant digits of numeric output.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: usize,
    /// Directory for relative output paths.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample h, g and f = h + conj(g) of a shear on a circle as CSV.
    Shear {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 0.9)]
        r: f64,
        #[arg(long, default_value_t = 256)]
        n: usize,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turning test of a shear on one circle, as a JSON report.
    Convexity {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "zero")]
        omega: String,
        #[arg(long, default_value = "-1,0", allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 0.99)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n: usize,
        /// Also test convexity in the direction e^{it}.
        #[arg(long, allow_hyphen_values = true)]
        direction: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_TOL_BACKTURN)]
        tol_backturn: f64,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Curve samples: theta, re, im, turning_increment, intra_backturn.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Search a dilatation family for a shear whose image is not convex.
    Probe {
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "-1,0", allow_hyphen_values = true)]
        eta: String,
        /// default | monomial_grid:phases=..,nmax=.. | blaschke_random:count=..,deg=..,seed=..
        /// | explicit:<spec>|<spec>. Repeat to take the union.
        #[arg(long, default_value = "default")]
        family: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_TOL_BACKTURN)]
        tol_backturn: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Boundary rotation of an analytic map along a ladder of radii.
    Vk {
        #[arg(long)]
        phi: String,
        #[arg(long)]
        k: f64,
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Run a named suite and compare with the expected outcomes.
    Reproduce {
        #[arg(long, value_enum)]
        case: Case,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct ProbeOutput<'a> {
    seed: u64,
    family: &'a [String],
    #[serde(flatten)]
    report: &'a ProbeReport,
}

#[derive(Serialize)]
struct VkOutput<'a> {
    phi: String,
    verdict: &'static str,
    #[serde(flatten)]
    report: &'a hshear::boundary_rotation::VkReport,
}

#[derive(Serialize)]
struct ReproduceOutput<'a> {
    case: Case,
    seed: u64,
    pass: bool,
    checks: &'a [reproduce::Check],
}

struct Ctx {
    quad: QuadratureConfig,
    digits: usize,
    out_dir: Option<PathBuf>,
}

impl Ctx {
    fn write(&self, path: &Path, contents: &str) -> Result<()> {
        let p = write_file(path, self.out_dir.as_deref(), contents)?;
        eprintln!("wrote {}", p.display());
        Ok(())
    }

    fn emit(&self, path: Option<&Path>, contents: &str) -> Result<()> {
        match path {
            Some(p) => self.write(p, contents),
            None => {
                let mut out = std::io::stdout().lock();
                let written = out.write_all(contents.as_bytes()).and_then(|_| {
                    if contents.ends_with('\n') {
                        Ok(())
                    } else {
                        out.write_all(b"\n")
                    }
                });
                match written {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(()),
                }
            }
        }
    }
}

fn build_shear(phi: &PhiSpec, omega: &SchwarzSpec, eta: C64, quad: &QuadratureConfig) -> Result<hshear::HarmonicMap> {
    let sys = ShearSystem::new(phi.build()?, make_schwarz(omega)?, eta)?;
    Ok(shear_construct(&sys, quad)?)
}

fn is_parabola_map(phi: &PhiSpec, omega: &SchwarzSpec, eta: C64) -> bool {
    phi.id == CatalogId::H
        && phi.xi.is_none()
        && *omega == SchwarzSpec::Monomial { lambda: C64::new(1.0, 0.0), n: 1 }
        && eta == C64::new(1.0, 0.0)
}

fn run(cli: Cli) -> Result<u8> {
    let g = cli.global;
    let quad = QuadratureConfig::default().with_abs_tol(g.quad_tol).with_order(g.quad_order);
    quad.validate()?;
    let ctx = Ctx {
        quad,
        digits: check_precision(g.precision)?,
        out_dir: g.out_dir,
    };
    match cli.command {
        Command::Shear { phi, omega, eta, r, n, out } => {
            if !(r > 0.0 && r < 1.0) {
                bail!("radius must lie in (0, 1), got {r}");
            }
            if n == 0 {
                bail!("need at least one sample");
            }
            let f = build_shear(&parse_phi(&phi)?, &parse_schwarz(&omega)?, parse_eta(&eta)?, &ctx.quad)?;
            let thetas: Vec<f64> = (0..n).map(|j| std::f64::consts::TAU * j as f64 / n as f64).collect();
            let parts = f.circle_parts(r, &thetas, &ctx.quad)?;
            let rows = thetas.iter().zip(&parts).map(|(t, (h, gg))| {
                let z = C64::from_polar(r, *t);
                let w = h + gg.conj();
                vec![*t, z.re, z.im, w.re, w.im, h.re, h.im, gg.re, gg.im]
            });
            ctx.emit(out.as_deref(), &write_table(&SHEAR_COLUMNS, rows, ctx.digits)?)?;
        }
        Command::Convexity {
            phi,
            omega,
            eta,
            r,
            n,
            direction,
            tol_backturn,
            json,
            svg,
            csv,
        } => {
            let (phi, omega, eta) = (parse_phi(&phi)?, parse_schwarz(&omega)?, parse_eta(&eta)?);
            if !(tol_backturn > 0.0) {
                bail!("--tol-backturn must be positive");
            }
            let f = build_shear(&phi, &omega, eta, &ctx.quad)?;
            let curve = sample_boundary(&f, r, n, &ctx.quad)?;
            let report = convexity_check(&curve, tol_backturn);
            let directional = direction.map(|t| directional_convexity_check(&curve, t, DEFAULT_DEADBAND));
            let parabola = is_parabola_map(&phi, &omega, eta).then(|| parabola_residual(&curve));
            let out = ConvexityOutput::new(phi.to_string(), omega.to_string(), eta, &curve, tol_backturn, report, directional, parabola);
            let text = to_json(&out, ctx.digits)?;
            if let Some(p) = &json {
                ctx.write(p, &text)?;
            }
            if let Some(p) = &svg {
                // plot the rounded report so a saved report re-renders to the same file
                let saved: ConvexityOutput = serde_json::from_str(&text)?;
                ctx.write(p, &render_svg(&saved))?;
            }
            if let Some(p) = &csv {
                ctx.write(p, &curve_csv(&curve, ctx.digits)?)?;
            }
            ctx.emit(None, &text)?;
        }
        Command::Probe {
            phi,
            eta,
            family,
            seed,
            radii,
            n,
            tol_backturn,
            out,
        } => {
            eprintln!("seed: {seed}");
            let families: Vec<OmegaFamily> = family
                .iter()
                .map(|s| parse_family(s, seed))
                .collect::<hshear::Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let mut cfg = ProbeConfig::new(parse_phi(&phi)?, parse_eta(&eta)?, families);
            if let Some(r) = radii {
                cfg.radii = r;
            }
            cfg.n_samples = n;
            cfg.tol_backturn = tol_backturn;
            cfg.quad = ctx.quad;
            let report = probe_admissibility(&cfg)?;
            let text = to_json(
                &ProbeOutput {
                    seed,
                    family: &family,
                    report: &report,
                },
                ctx.digits,
            )?;
            ctx.emit(out.as_deref(), &text)?;
        }
        Command::Vk { phi, k, radii, tol } => {
            let spec = parse_phi(&phi)?;
            let radii = radii.unwrap_or_else(|| DEFAULT_RADII.to_vec());
            let report = vk_membership(&spec.build()?, k, &radii, tol)?;
            let out = VkOutput {
                phi: spec.to_string(),
                verdict: if report.member { "MEMBER" } else { "NOT_MEMBER" },
                report: &report,
            };
            ctx.emit(None, &to_json(&out, ctx.digits)?)?;
        }
        Command::Reproduce { case, seed, json } => {
            eprintln!("seed: {seed}");
            let checks = reproduce::run(case, seed, &ctx.quad)?;
            for c in &checks {
                println!(
                    "{} {}: expected {}, observed {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.expected,
                    c.observed
                );
            }
            let pass = checks.iter().all(|c| c.pass);
            if let Some(p) = &json {
                ctx.write(
                    p,
                    &to_json(
                        &ReproduceOutput {
                            case,
                            seed,
                            pass,
                            checks: &checks,
                        },
                        ctx.digits,
                    )?,
                )?;
            }
            return Ok(if pass { 0 } else { 2 });
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
