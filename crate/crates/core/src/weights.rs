//! Subharmonic weights `phi` and their Riesz-measure bookkeeping.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::poly::Polynomial;

/// Atoms closer than this to a query point count as located at it.
const ATOM_TOL: f64 = 1e-12;

/// Bounded harmonic remainder added to a logarithmic potential.
pub type Offset = Arc<dyn Fn(Complex64) -> f64 + Send + Sync>;

/// `sum_i alpha_i log|z - z_i| + h(z)` with `|h| <= offset_bound`.
#[derive(Clone)]
pub struct LogPotential {
    atoms: Vec<(Complex64, f64)>,
    offset_bound: f64,
    offset: Option<Offset>,
}

impl LogPotential {
    pub fn atoms(&self) -> &[(Complex64, f64)] {
        &self.atoms
    }

    pub fn offset_bound(&self) -> f64 {
        self.offset_bound
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum()
    }
}

impl fmt::Debug for LogPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LogPotential")
            .field("atoms", &self.atoms)
            .field("offset_bound", &self.offset_bound)
            .field("offset", &self.offset.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

/// A subharmonic weight. Build the non-trivial variants through the checked
/// constructors so their invariants hold.
#[derive(Debug, Clone)]
pub enum Weight {
    Zero,
    /// `|Im z| + |z|^p`, `0 < p < 1`.
    ImAbsPlusPower { p: f64 },
    LogPotential(LogPotential),
    /// `amplitude * chi(|P(z)|^2)` with `chi(x) = max(0, x - threshold)^2`.
    PolyBump {
        poly: Polynomial,
        threshold: f64,
        amplitude: f64,
    },
    Sum(Vec<Weight>),
}

impl Weight {
    pub fn im_abs_plus_power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange(format!("exponent p = {p} must lie in (0, 1)")));
        }
        Ok(Weight::ImAbsPlusPower { p })
    }

    /// `sum alpha_i log|z - z_i|` with all `alpha_i > 0`.
    pub fn log_potential(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        if let Some(&(z, a)) = atoms.iter().find(|(_, a)| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameters(format!(
                "atom at {z} has non-positive mass {a}"
            )));
        }
        Ok(Weight::LogPotential(LogPotential {
            atoms,
            offset_bound: 0.0,
            offset: None,
        }))
    }

    /// Adds a bounded harmonic offset to a logarithmic potential. Harmonicity of
    /// `offset` is the caller's responsibility; only the bound is recorded.
    pub fn with_offset(self, offset: Offset, bound: f64) -> Result<Self> {
        match self {
            Weight::LogPotential(lp) if bound >= 0.0 => Ok(Weight::LogPotential(LogPotential {
                offset: Some(offset),
                offset_bound: bound,
                ..lp
            })),
            Weight::LogPotential(_) => Err(Error::InvalidParameters(format!(
                "offset bound {bound} must be non-negative"
            ))),
            _ => Err(Error::InvalidParameters(
                "harmonic offsets attach to logarithmic potentials only".into(),
            )),
        }
    }

    pub fn sum(parts: Vec<Weight>) -> Self {
        Weight::Sum(parts)
    }

    pub fn evaluate(&self, z: Complex64) -> f64 {
        match self {
            Weight::Zero => 0.0,
            Weight::ImAbsPlusPower { p } => z.im.abs() + z.norm().powf(*p),
            Weight::LogPotential(lp) => {
                let mut v = 0.0;
                for &(zi, a) in &lp.atoms {
                    let d = (z - zi).norm();
                    if d == 0.0 {
                        return f64::NEG_INFINITY;
                    }
                    v += a * d.ln();
                }
                v + lp.offset.as_ref().map_or(0.0, |h| h(z))
            }
            Weight::PolyBump {
                poly,
                threshold,
                amplitude,
            } => {
                let excess = (poly.eval(z).norm_sqr() - threshold).max(0.0);
                amplitude * excess * excess
            }
            Weight::Sum(parts) => parts.iter().map(|w| w.evaluate(z)).sum(),
        }
    }

    /// `e^{-phi(z)}`; infinite at atoms.
    pub fn density(&self, z: Complex64) -> f64 {
        match self {
            Weight::Zero => 1.0,
            Weight::LogPotential(lp) if lp.offset.is_none() => lp
                .atoms
                .iter()
                .map(|&(zi, a)| (z - zi).norm().powf(-a))
                .product(),
            _ => (-self.evaluate(z)).exp(),
        }
    }

    pub fn lelong_number(&self, x: Complex64) -> f64 {
        match self {
            Weight::LogPotential(lp) => lp
                .atoms
                .iter()
                .filter(|(zi, _)| (zi - x).norm() <= ATOM_TOL)
                .map(|a| a.1)
                .sum(),
            Weight::Sum(parts) => parts.iter().map(|w| w.lelong_number(x)).sum(),
            _ => 0.0,
        }
    }

    /// Riesz mass `(1/2pi) Laplacian(phi)` of the closed disc; atomic measures only.
    pub fn mass_on_disc(&self, center: Complex64, radius: f64) -> Result<f64> {
        match self {
            Weight::Zero => Ok(0.0),
            Weight::LogPotential(lp) => Ok(lp
                .atoms
                .iter()
                .filter(|(zi, _)| (zi - center).norm() <= radius + ATOM_TOL)
                .map(|a| a.1)
                .sum()),
            Weight::ImAbsPlusPower { .. } => Err(Error::UnsupportedMeasure(
                "|Im z| + |z|^p carries a non-atomic Riesz measure",
            )),
            Weight::PolyBump { .. } => Err(Error::UnsupportedMeasure(
                "polynomial-bump weights carry an absolutely continuous Riesz measure",
            )),
            Weight::Sum(parts) => parts.iter().map(|w| w.mass_on_disc(center, radius)).sum(),
        }
    }

    /// Riesz mass of the closed unit disc is strictly below 2.
    pub fn satisfies_condition_a(&self) -> Result<bool> {
        Ok(self.mass_on_disc(Complex64::new(0.0, 0.0), 1.0)? < 2.0)
    }

    /// Points where `e^{-phi}` is singular or non-smooth, with the local
    /// singularity order of `e^{-phi}` (`alpha` for an atom of mass `alpha`).
    pub fn singular_points(&self) -> Vec<(Complex64, f64)> {
        match self {
            Weight::LogPotential(lp) => lp.atoms.clone(),
            Weight::ImAbsPlusPower { .. } => vec![(Complex64::new(0.0, 0.0), 0.0)],
            Weight::Sum(parts) => {
                let mut out: Vec<(Complex64, f64)> = Vec::new();
                for (z, a) in parts.iter().flat_map(|w| w.singular_points()) {
                    match out.iter_mut().find(|(zz, _)| (*zz - z).norm() <= ATOM_TOL) {
                        Some(e) => e.1 += a,
                        None => out.push((z, a)),
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }

    /// Horizontal lines `Im z = c` across which `phi` has a kink.
    pub fn kink_lines(&self) -> Vec<f64> {
        match self {
            Weight::ImAbsPlusPower { .. } => vec![0.0],
            Weight::Sum(parts) => {
                let mut out: Vec<f64> = parts.iter().flat_map(|w| w.kink_lines()).collect();
                out.sort_by(|a, b| a.partial_cmp(b).unwrap());
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }

    /// An upper bound for `sup phi` over the domain's bounding box, when one is known.
    pub fn sup_bound(&self, domain: &Domain) -> Option<f64> {
        let bb = domain.bounding_box();
        let corners = [
            Complex64::new(bb.x_min, bb.y_min),
            Complex64::new(bb.x_min, bb.y_max),
            Complex64::new(bb.x_max, bb.y_min),
            Complex64::new(bb.x_max, bb.y_max),
        ];
        let farthest = |p: Complex64| corners.iter().map(|c| (c - p).norm()).fold(0.0, f64::max);
        let bound = match self {
            Weight::Zero => 0.0,
            Weight::ImAbsPlusPower { p } => {
                bb.y_min.abs().max(bb.y_max.abs()) + farthest(Complex64::new(0.0, 0.0)).powf(*p)
            }
            Weight::LogPotential(lp) => {
                lp.atoms.iter().map(|&(zi, a)| a * farthest(zi).ln()).sum::<f64>()
                    + lp.offset_bound
            }
            Weight::PolyBump {
                poly,
                threshold,
                amplitude,
            } => {
                let m = farthest(poly.center()) / poly.scale();
                let b: f64 = poly
                    .scaled_coefficients()
                    .iter()
                    .enumerate()
                    .map(|(k, c)| c.norm() * m.powi(k as i32))
                    .sum();
                let excess = (b * b - threshold).max(0.0);
                amplitude * excess * excess
            }
            Weight::Sum(parts) => {
                let mut total = 0.0;
                for w in parts {
                    total += w.sup_bound(domain)?;
                }
                total
            }
        };
        bound.is_finite().then_some(bound)
    }
}

/// Penalty weight `amplitude * max(0, |P|^2 - threshold)^2`, zero wherever `|P|^2 <= threshold`.
pub fn poly_bump_weight(poly: Polynomial, threshold: f64, amplitude: f64) -> Result<Weight> {
    if !(threshold >= 1.0) {
        return Err(Error::InvalidParameters(format!("threshold {threshold} must be >= 1")));
    }
    if !(amplitude > 0.0) {
        return Err(Error::InvalidParameters(format!("amplitude {amplitude} must be positive")));
    }
    Ok(Weight::PolyBump {
        poly,
        threshold,
        amplitude,
    })
}
