//! Canonical text forms for catalog ids, Schwarz specs and shear directions.
//!
//! ```text
//! H | Hm1 | Llambda:re=0,im=1 | koebe | mobius:re=1,im=0 | identity | f0h | f0g
//! zero | monomial:lam_re=0,lam_im=-1,N=1 | blaschke:seed=42,deg=3,scale=1
//! blaschke:zeros=0.3+0.2i;-0.1i,gamma=0,scale=1 | rot:xi_re=0,xi_im=1:<schwarz>
//! eta: `-1,0` or `theta=1.5707963267948966`
//! family: default | monomial_grid:phases=8,nmax=3 | blaschke_random:count=50,deg=3,seed=7
//!         | explicit:<schwarz>|<schwarz>
//! ```

use std::collections::BTreeMap;

use crate::analytic::{CatalogId, PhiSpec, C64};
use crate::error::{Error, Result};
use crate::probe::{default_family, OmegaFamily};
use crate::schwarz::SchwarzSpec;

pub fn complex_to_string(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else if c.re == 0.0 {
        format!("{}i", c.im)
    } else if c.im < 0.0 || c.im.is_sign_negative() {
        format!("{}{}i", c.re, c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    let t = s.trim();
    let err = || Error::parse(s, "expected a complex number such as 0.3-0.2i");
    if t.is_empty() {
        return Err(err());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| err());
    };
    // split at the last sign that is not an exponent sign or the leading sign
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            other => other.parse::<f64>().map_err(|_| err()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| err())?;
            Ok(C64::new(re, imag(&body[k..])?))
        }
        None => Ok(C64::new(0.0, imag(body)?)),
    }
}

/// `key=value` pairs separated by commas.
pub fn parse_params(input: &str, s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    if s.trim().is_empty() {
        return Ok(out);
    }
    for part in s.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::parse(input, format!("expected key=value, got `{part}`")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn take_f64(input: &str, p: &BTreeMap<String, String>, key: &str, default: Option<f64>) -> Result<f64> {
    match p.get(key) {
        Some(v) => v
            .parse::<f64>()
            .map_err(|_| Error::parse(input, format!("`{key}` is not a number"))),
        None => default.ok_or_else(|| Error::parse(input, format!("missing `{key}`"))),
    }
}

fn check_keys(input: &str, p: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    match p.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::parse(input, format!("unknown key `{k}`"))),
        None => Ok(()),
    }
}

pub fn catalog_to_string(id: &CatalogId) -> String {
    match id {
        CatalogId::H => "H".into(),
        CatalogId::HRotMinus1 => "Hm1".into(),
        CatalogId::LLambda(l) => format!("Llambda:re={},im={}", l.re, l.im),
        CatalogId::Koebe => "koebe".into(),
        CatalogId::MobiusHalfplane(c) => format!("mobius:re={},im={}", c.re, c.im),
        CatalogId::Identity => "identity".into(),
        CatalogId::F0HPart => "f0h".into(),
        CatalogId::F0GPart => "f0g".into(),
    }
}

pub fn parse_catalog(s: &str) -> Result<CatalogId> {
    let t = s.trim();
    let (name, rest) = t.split_once(':').unwrap_or((t, ""));
    let p = parse_params(s, rest)?;
    let unit = |p: &BTreeMap<String, String>| -> Result<C64> {
        check_keys(s, p, &["re", "im"])?;
        Ok(C64::new(take_f64(s, p, "re", None)?, take_f64(s, p, "im", None)?))
    };
    let id = match name.to_ascii_lowercase().as_str() {
        "h" => CatalogId::H,
        "hm1" | "h_rot_minus1" => CatalogId::HRotMinus1,
        "llambda" | "l_lambda" => CatalogId::LLambda(unit(&p)?),
        "koebe" => CatalogId::Koebe,
        "mobius" | "mobius_halfplane" => CatalogId::MobiusHalfplane(unit(&p)?),
        "identity" => CatalogId::Identity,
        "f0h" | "f0_h_part" => CatalogId::F0HPart,
        "f0g" | "f0_g_part" => CatalogId::F0GPart,
        _ => return Err(Error::parse(s, "unknown catalog id")),
    };
    if !matches!(id, CatalogId::LLambda(_) | CatalogId::MobiusHalfplane(_)) && !p.is_empty() {
        return Err(Error::parse(s, "this catalog id takes no parameters"));
    }
    id.validated()
}

pub fn phi_to_string(phi: &PhiSpec) -> String {
    match phi.xi {
        Some(xi) => format!("rot:xi_re={},xi_im={}:{}", xi.re, xi.im, catalog_to_string(&phi.id)),
        None => catalog_to_string(&phi.id),
    }
}

/// A catalog id, or `rot:xi_re=..,xi_im=..:<catalog id>` for its rotation.
pub fn parse_phi(s: &str) -> Result<PhiSpec> {
    let t = s.trim();
    if let Some(rest) = t.strip_prefix("rot:") {
        let (params, inner) = rest
            .split_once(':')
            .ok_or_else(|| Error::parse(s, "expected rot:xi_re=..,xi_im=..:<catalog id>"))?;
        let p = parse_params(s, params)?;
        check_keys(s, &p, &["xi_re", "xi_im"])?;
        let xi = C64::new(take_f64(s, &p, "xi_re", None)?, take_f64(s, &p, "xi_im", None)?);
        return Ok(PhiSpec::rotated(
            parse_catalog(inner)?,
            crate::analytic::unimodular("xi", xi)?,
        ));
    }
    Ok(PhiSpec::catalog(parse_catalog(t)?))
}

pub fn schwarz_to_string(spec: &SchwarzSpec) -> String {
    match spec {
        SchwarzSpec::Zero => "zero".into(),
        SchwarzSpec::Monomial { lambda, n } => {
            format!("monomial:lam_re={},lam_im={},N={}", lambda.re, lambda.im, n)
        }
        SchwarzSpec::Blaschke { zeros, gamma, scale } => {
            let zs: Vec<String> = zeros.iter().map(|z| complex_to_string(*z)).collect();
            format!(
                "blaschke:zeros={},gamma={},scale={}",
                zs.join(";"),
                gamma,
                complex_to_string(*scale)
            )
        }
        SchwarzSpec::RandomBlaschke { seed, degree, scale } => {
            format!("blaschke:seed={seed},deg={degree},scale={scale}")
        }
        SchwarzSpec::Rotated { inner, xi } => {
            format!("rot:xi_re={},xi_im={}:{}", xi.re, xi.im, schwarz_to_string(inner))
        }
    }
}

pub fn parse_schwarz(s: &str) -> Result<SchwarzSpec> {
    let t = s.trim();
    let (name, rest) = t.split_once(':').unwrap_or((t, ""));
    match name.to_ascii_lowercase().as_str() {
        "zero" => {
            if !rest.is_empty() {
                return Err(Error::parse(s, "`zero` takes no parameters"));
            }
            Ok(SchwarzSpec::Zero)
        }
        "monomial" => {
            let p = parse_params(s, rest)?;
            check_keys(s, &p, &["lam_re", "lam_im", "N", "n"])?;
            let n = p
                .get("N")
                .or_else(|| p.get("n"))
                .map(|v| v.parse::<u32>())
                .transpose()
                .map_err(|_| Error::parse(s, "`N` must be a positive integer"))?
                .unwrap_or(1);
            Ok(SchwarzSpec::Monomial {
                lambda: C64::new(
                    take_f64(s, &p, "lam_re", Some(1.0))?,
                    take_f64(s, &p, "lam_im", Some(0.0))?,
                ),
                n,
            })
        }
        "blaschke" => {
            let p = parse_params(s, rest)?;
            if p.contains_key("seed") {
                check_keys(s, &p, &["seed", "deg", "scale"])?;
                let seed = p["seed"]
                    .parse::<u64>()
                    .map_err(|_| Error::parse(s, "`seed` must be an unsigned integer"))?;
                let degree = p
                    .get("deg")
                    .map(|v| v.parse::<usize>())
                    .transpose()
                    .map_err(|_| Error::parse(s, "`deg` must be an unsigned integer"))?
                    .unwrap_or(1);
                Ok(SchwarzSpec::RandomBlaschke {
                    seed,
                    degree,
                    scale: take_f64(s, &p, "scale", Some(1.0))?,
                })
            } else {
                check_keys(s, &p, &["zeros", "gamma", "scale"])?;
                let zeros = match p.get("zeros").map(String::as_str) {
                    None | Some("") => Vec::new(),
                    Some(list) => list.split(';').map(parse_complex).collect::<Result<_>>()?,
                };
                let scale = match p.get("scale") {
                    Some(v) => parse_complex(v)?,
                    None => C64::new(1.0, 0.0),
                };
                Ok(SchwarzSpec::Blaschke {
                    zeros,
                    gamma: take_f64(s, &p, "gamma", Some(0.0))?,
                    scale,
                })
            }
        }
        "rot" => {
            let (params, inner) = rest
                .split_once(':')
                .ok_or_else(|| Error::parse(s, "expected rot:xi_re=..,xi_im=..:<spec>"))?;
            let p = parse_params(s, params)?;
            check_keys(s, &p, &["xi_re", "xi_im"])?;
            Ok(SchwarzSpec::Rotated {
                inner: Box::new(parse_schwarz(inner)?),
                xi: C64::new(take_f64(s, &p, "xi_re", None)?, take_f64(s, &p, "xi_im", None)?),
            })
        }
        _ => Err(Error::parse(s, "unknown Schwarz spec")),
    }
}

/// `re,im` for η directly, or `theta=..` for η = e^{2iθ}.
pub fn parse_eta(s: &str) -> Result<C64> {
    let t = s.trim();
    let eta = if let Some(th) = t.strip_prefix("theta=") {
        let th = th
            .parse::<f64>()
            .map_err(|_| Error::parse(s, "theta is not a number"))?;
        C64::from_polar(1.0, 2.0 * th)
    } else {
        let (re, im) = t
            .split_once(',')
            .ok_or_else(|| Error::parse(s, "expected `re,im` or `theta=..`"))?;
        C64::new(
            re.trim().parse().map_err(|_| Error::parse(s, "bad real part"))?,
            im.trim().parse().map_err(|_| Error::parse(s, "bad imaginary part"))?,
        )
    };
    crate::analytic::unimodular("eta", eta)
}

/// A dilatation family. `seed` fills in for a missing seed in the random forms.
pub fn parse_family(s: &str, seed: u64) -> Result<Vec<OmegaFamily>> {
    let t = s.trim();
    let (name, rest) = t.split_once(':').unwrap_or((t, ""));
    let count = |p: &BTreeMap<String, String>, key: &str, default: usize| -> Result<usize> {
        p.get(key)
            .map(|v| v.parse::<usize>())
            .transpose()
            .map_err(|_| Error::parse(s, format!("`{key}` must be an unsigned integer")))
            .map(|v| v.unwrap_or(default))
    };
    match name.to_ascii_lowercase().as_str() {
        "default" if rest.is_empty() => Ok(default_family(seed)),
        "monomial_grid" => {
            let p = parse_params(s, rest)?;
            check_keys(s, &p, &["phases", "nmax"])?;
            let phases = count(&p, "phases", 8)?;
            let n_max = count(&p, "nmax", 3)?;
            if phases == 0 || n_max == 0 {
                return Err(Error::parse(s, "`phases` and `nmax` must be positive"));
            }
            Ok(vec![OmegaFamily::MonomialGrid {
                phases,
                n_max: n_max as u32,
            }])
        }
        "blaschke_random" => {
            let p = parse_params(s, rest)?;
            check_keys(s, &p, &["count", "deg", "seed"])?;
            let seed = match p.get("seed") {
                Some(v) => v
                    .parse::<u64>()
                    .map_err(|_| Error::parse(s, "`seed` must be an unsigned integer"))?,
                None => seed,
            };
            Ok(vec![OmegaFamily::BlaschkeRandom {
                count: count(&p, "count", 50)?,
                max_degree: count(&p, "deg", 3)?,
                seed,
            }])
        }
        "explicit" if !rest.is_empty() => Ok(vec![OmegaFamily::Explicit(
            rest.split('|').map(parse_schwarz).collect::<Result<_>>()?,
        )]),
        _ => Err(Error::parse(s, "unknown family")),
    }
}
