//! The experiment config: one JSON document, unknown fields rejected.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use wbl_core::bergman::{BergmanSettings, Frame, Target};
use wbl_core::moon::{example18_domain, BranchSpec};
use wbl_core::weights::poly_bump_weight;
use wbl_core::{Circle, Domain, Polynomial, QuadSettings, Weight};

pub type Point = [f64; 2];

fn cx(p: Point) -> Complex64 {
    Complex64::new(p[0], p[1])
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSpec {
    pub c: Point,
    pub r: f64,
}

impl CircleSpec {
    fn circle(&self) -> Circle {
        Circle::new(cx(self.c), self.r)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc { c: Point, r: f64 },
    Moon { outer: CircleSpec, inner: CircleSpec },
    TruncatedPlane { r: f64 },
    /// Stage `k` of the nested arc regions; `alphas` holds `alpha_2 .. alpha_k`.
    Example18 { k: usize, alphas: Vec<f64> },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        Ok(match self {
            DomainSpec::Disc { c, r } => Domain::disc(cx(*c), *r)?,
            DomainSpec::Moon { outer, inner } => Domain::moon(outer.circle(), inner.circle())?,
            DomainSpec::TruncatedPlane { r } => Domain::truncated_plane(*r)?,
            DomainSpec::Example18 { k, alphas } => example18_domain(*k, alphas)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub z: Point,
    pub alpha: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Zero,
    ImAbsPlusPower { p: f64 },
    LogPotential { atoms: Vec<Atom> },
    /// `amplitude * max(0, |P|^2 - threshold)^2`, `P` given by Taylor coefficients at 0.
    PolyBump { coeffs: Vec<Point>, threshold: f64, amplitude: f64 },
    Sum { parts: Vec<WeightSpec> },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Zero
    }
}

impl WeightSpec {
    pub fn build(&self) -> Result<Weight> {
        Ok(match self {
            WeightSpec::Zero => Weight::Zero,
            WeightSpec::ImAbsPlusPower { p } => Weight::im_abs_plus_power(*p)?,
            WeightSpec::LogPotential { atoms } => {
                Weight::log_potential(atoms.iter().map(|a| (cx(a.z), a.alpha)).collect())?
            }
            WeightSpec::PolyBump { coeffs, threshold, amplitude } => {
                let p = Polynomial::from_taylor(Complex64::new(0.0, 0.0), coeffs.iter().map(|&c| cx(c)).collect());
                poly_bump_weight(p, *threshold, *amplitude)?
            }
            WeightSpec::Sum { parts } => Weight::sum(parts.iter().map(|w| w.build()).collect::<Result<_>>()?),
        })
    }
}

/// Builtin target functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetTag {
    One,
    Monomial(u32),
    Pole(Complex64),
    InvSqrt,
    CosHalf,
}

impl TargetTag {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "one" {
            return Ok(TargetTag::One);
        }
        if s == "inv-sqrt" {
            return Ok(TargetTag::InvSqrt);
        }
        if s == "cos-half" {
            return Ok(TargetTag::CosHalf);
        }
        if let Some(k) = s.strip_prefix("monomial:") {
            return Ok(TargetTag::Monomial(k.parse().with_context(|| format!("bad monomial degree in {s:?}"))?));
        }
        if let Some(a) = s.strip_prefix("pole:") {
            return Ok(TargetTag::Pole(parse_complex(a).with_context(|| format!("bad pole in {s:?}"))?));
        }
        bail!("unknown target {s:?} (expected one, monomial:k, pole:a, inv-sqrt or cos-half)")
    }

    /// `spec` is needed for `inv-sqrt` only.
    pub fn target<'a>(&self, spec: Option<&'a BranchSpec>) -> Result<Target<'a>> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match *self {
            TargetTag::One => Target::new(|_| Complex64::new(1.0, 0.0)),
            TargetTag::Monomial(k) => Target::new(move |z: Complex64| z.powu(k)),
            TargetTag::Pole(a) => Target::new(move |z: Complex64| 1.0 / (z - a)).with_singular(&[a]),
            TargetTag::CosHalf => Target::new(|z: Complex64| (z * 0.5).cos()),
            TargetTag::InvSqrt => {
                let spec = spec.ok_or_else(|| anyhow!("inv-sqrt needs a branch cut"))?;
                Target::new(move |z| 1.0 / spec.sqrt(z)).with_singular(&[zero])
            }
        })
    }
}

/// Accepts `2`, `-0.5`, `1+2i`, `1-0.5i` and `2i`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let s = s.trim();
    if let Ok(x) = s.parse::<f64>() {
        return Ok(Complex64::new(x, 0.0));
    }
    let body = s.strip_suffix('i').ok_or_else(|| anyhow!("not a number: {s:?}"))?;
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse::<f64>()?, body[i..].parse::<f64>().or_else(|_| unit_im(&body[i..]))?),
        None => (0.0, body.parse::<f64>().or_else(|_| unit_im(body))?),
    };
    Ok(Complex64::new(re, im))
}

fn unit_im(s: &str) -> Result<f64> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => bail!("not a number: {s:?}"),
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuadSpec {
    pub tol: f64,
    pub rule_order: usize,
    pub max_nodes: usize,
    pub min_level: u32,
    pub cond_limit: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        let q = QuadSettings::default();
        let b = BergmanSettings::default();
        Self {
            tol: q.tol,
            rule_order: q.rule_order,
            max_nodes: q.max_nodes,
            min_level: q.min_level,
            cond_limit: b.cond_limit,
        }
    }
}

impl QuadSpec {
    pub fn quad(&self) -> QuadSettings {
        QuadSettings {
            tol: self.tol,
            rule_order: self.rule_order,
            max_nodes: self.max_nodes,
            min_level: self.min_level,
        }
    }

    pub fn bergman(&self) -> BergmanSettings {
        BergmanSettings {
            quad: self.quad(),
            cond_limit: self.cond_limit,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MoonSpec {
    /// Direction of the sqrt branch cut; defaults to the tangency point.
    pub cut: Option<Point>,
    pub probe_radius: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifySpec {
    pub p: f64,
    /// `M`; computed from the `cos(z/2)` norm enclosure when absent.
    #[serde(rename = "M")]
    pub m: Option<f64>,
    pub radius: f64,
    pub poisson_samples: usize,
}

impl Default for CertifySpec {
    fn default() -> Self {
        Self {
            p: 0.5,
            m: None,
            radius: 40.0,
            poisson_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoissonSpec {
    pub p: f64,
    pub samples: usize,
    /// Extra `(x, y)` points, `y > 0`.
    pub points: Vec<Point>,
}

impl Default for PoissonSpec {
    fn default() -> Self {
        Self {
            p: 0.5,
            samples: 100,
            points: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSpec {
    pub atoms: Vec<Atom>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageSpec {
    pub k: usize,
    /// `alpha_2 .. alpha_{k-1}` fixed by earlier stages.
    #[serde(default)]
    pub prior_alphas: Vec<f64>,
    pub degree: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default)]
    pub weight: WeightSpec,
    #[serde(default)]
    pub target: Option<String>,
    /// Expansion center `p`; with `scale` it overrides the domain's default frame.
    #[serde(default)]
    pub center: Option<Point>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub n_max: Option<usize>,
    #[serde(default)]
    pub quad: QuadSpec,
    /// Directory for output files; `--out` wins.
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub moon: MoonSpec,
    #[serde(default)]
    pub certify: CertifySpec,
    #[serde(default)]
    pub poisson: PoissonSpec,
    #[serde(default)]
    pub potential: Option<PotentialSpec>,
    #[serde(default)]
    pub stage: Option<StageSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty config parses")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("config is not valid")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        let q = &self.quad;
        if !(q.tol > 0.0 && q.tol < 1.0) {
            bail!("quad.tol = {} must lie in (0, 1)", q.tol);
        }
        if q.rule_order < 2 || q.max_nodes == 0 {
            bail!("quad.rule_order must be >= 2 and quad.max_nodes positive");
        }
        if let Some(t) = &self.target {
            TargetTag::parse(t)?;
        }
        if let Some(s) = self.scale {
            if !(s > 0.0 && s.is_finite()) {
                bail!("scale = {s} must be positive");
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Domain> {
        self.domain.as_ref().ok_or_else(|| anyhow!("config has no domain"))?.build()
    }

    pub fn target_tag(&self) -> Result<TargetTag> {
        TargetTag::parse(self.target.as_deref().ok_or_else(|| anyhow!("config has no target"))?)
    }

    pub fn n_max(&self) -> Result<usize> {
        self.n_max.ok_or_else(|| anyhow!("config has no n_max"))
    }

    pub fn frame(&self, domain: &Domain) -> Result<Frame> {
        let d = Frame::for_domain(domain);
        if self.center.is_none() && self.scale.is_none() {
            return Ok(d);
        }
        let c = self.center.map(cx).unwrap_or(d.center);
        Ok(Frame::new(c, self.scale.unwrap_or(d.scale))?)
    }

    pub fn branch(&self, domain: &Domain) -> Result<BranchSpec> {
        Ok(BranchSpec::new(domain, self.moon.cut.map(cx))?)
    }
}
