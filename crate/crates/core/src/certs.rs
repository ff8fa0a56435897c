//! Explicit bound checks: the non-density certificate for `cos(z/2)` under
//! `phi = |Im z| + |z|^p`, the Poisson sandwich for `|t|^p`, mass bounds for
//! products of inverse powers, and the mean-value evaluation bound.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gauss::adaptive_gk;
use crate::geometry::{moon_tangency, Domain, Tangency};
use crate::quad::{integrate_with, plane_norm_sq_enclosure, Enclosure, QuadSettings, SingularPoint};
use crate::weights::Weight;

/// `C_p = 2 / cos(p π / 2)`.
pub fn cp_constant(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} must lie in (0, 1)")));
    }
    Ok(2.0 / (p * FRAC_PI_2).cos())
}

/// `C_1 = ln M + 1 - ln sqrt(pi)`.
pub fn c1_constant(m: f64) -> f64 {
    m.ln() + 1.0 - 0.5 * PI.ln()
}

const GK_INTERVALS: usize = 4000;

/// Poisson extension `U(x + iy) = (1/π) ∫ y |t|^p / ((x - t)^2 + y^2) dt` of `|t|^p`.
pub fn poisson_extension(p: f64, x: f64, y: f64, tol: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("p = {p} must lie in (0, 1)")));
    }
    if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::InvalidParameters(format!("need y > 0, got ({x}, {y})")));
    }
    // t = x + y tau gives (1/π) ∫ |x + y tau|^p / (tau^2 + 1) dtau; the kink sits at tau0 = -x/y.
    // On each side put u = |tau - tau0|; near the kink u = v^{1/(1+p)}, beyond u1 use
    // u = u1 / s with s = v^{1/(1-p)}. Both substitutions leave smooth integrands on [0, 1].
    let tau0 = -x / y;
    let u1 = 2.0 * tau0.abs().max(1.0);
    let yp = y.powf(p);
    let a = 1.0 / (1.0 + p);
    let b = 1.0 / (1.0 - p);
    let piece_tol = 0.25 * tol * PI;
    let mut total = 0.0;
    for sign in [-1.0, 1.0] {
        let v_hi = u1.powf(1.0 + p);
        let near = |v: f64| {
            // u^p du = a dv
            let u = v.powf(a);
            let t = tau0 + sign * u;
            yp * a / (t * t + 1.0)
        };
        let (n, _) = adaptive_gk(near, 0.0, v_hi, piece_tol, 1e-14, GK_INTERVALS)?;
        let far = |v: f64| {
            // s^{-p} ds = b dv
            let s = v.powf(b);
            let d = s * tau0 + sign * u1;
            yp * u1.powf(1.0 + p) * b / (d * d + s * s)
        };
        let (f, _) = adaptive_gk(far, 0.0, 1.0, piece_tol, 1e-14, GK_INTERVALS)?;
        total += n + f;
    }
    Ok(total / PI)
}

/// Sample points in the upper half plane: radii log-spaced over `[1e-3, 1e3]`,
/// arguments stepping through `(0, π)`.
pub fn poisson_samples(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let frac = if n > 1 { k as f64 / (n - 1) as f64 } else { 0.5 };
            let r = 10f64.powf(-3.0 + 6.0 * frac);
            let theta = PI * ((k as f64 * 0.618_033_988_749_895).fract() * 0.98 + 0.01);
            (r * theta.cos(), r * theta.sin())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonReport {
    pub p: f64,
    pub c_p: f64,
    pub samples: usize,
    /// Smallest `U / (|z|^p / 4)` observed.
    pub min_lower_ratio: f64,
    /// Largest `U / (C_p |z|^p)` observed.
    pub max_upper_ratio: f64,
}

/// Checks `|z|^p / 4 + tol < U(z) < C_p |z|^p - tol` at every sample.
pub fn poisson_bounds_check(p: f64, samples: &[(f64, f64)], tol: f64) -> Result<PoissonReport> {
    let c_p = cp_constant(p)?;
    let mut min_lower_ratio = f64::INFINITY;
    let mut max_upper_ratio: f64 = 0.0;
    for &(x, y) in samples {
        let u = poisson_extension(p, x, y, tol)?;
        let m = x.hypot(y).powf(p);
        let lo = 0.25 * m;
        let hi = c_p * m;
        if !(u > lo + tol) {
            return Err(Error::BoundViolated { x, y, ratio: u / lo });
        }
        if !(u < hi - tol) {
            return Err(Error::BoundViolated { x, y, ratio: u / hi });
        }
        min_lower_ratio = min_lower_ratio.min(u / lo);
        max_upper_ratio = max_upper_ratio.max(u / hi);
    }
    Ok(PoissonReport {
        p,
        c_p,
        samples: samples.len(),
        min_lower_ratio,
        max_upper_ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialReport {
    pub integral: f64,
    pub err: f64,
    pub total_mass: f64,
    /// Radius of the disc with the same area as `A`.
    pub radius: f64,
    /// `R^{2-α} / (2-α)`, without the angular factor.
    pub radial_bound: f64,
    /// `2π R^{2-α} / (2-α)`, the sharp bound for Lebesgue measure.
    pub lebesgue_bound: f64,
}

/// `∫_A Π |z - z_i|^{-α_i} dλ` next to both forms of the equal-area bound.
pub fn potential_mass_bound(
    alphas: &[f64],
    points: &[Complex64],
    domain: &Domain,
    tol: f64,
) -> Result<PotentialReport> {
    if alphas.len() != points.len() || alphas.is_empty() {
        return Err(Error::InvalidParameters("need one point per mass".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::InvalidParameters("masses must be positive".into()));
    }
    let total: f64 = alphas.iter().sum();
    if total >= 2.0 {
        return Err(Error::MassTooLarge(total));
    }
    let settings = QuadSettings::with_tol(tol);
    let area = integrate_with(domain, &|_| Complex64::new(1.0, 0.0), &[], &[], &settings)?;
    let g = |z: Complex64| {
        let mut v = 1.0;
        for (&zi, &a) in points.iter().zip(alphas) {
            v *= (z - zi).norm().powf(-a);
        }
        Complex64::new(v, 0.0)
    };
    // Coincident atoms merge into one point of summed order.
    let mut pts: Vec<SingularPoint> = Vec::new();
    for (&zi, &a) in points.iter().zip(alphas) {
        match pts.iter_mut().find(|s| (s.z - zi).norm() <= 1e-12) {
            Some(s) => s.order = s.order.map(|o| o + a),
            None => pts.push(SingularPoint::known(zi, a)),
        }
    }
    let r = integrate_with(domain, &g, &pts, &[], &settings)?;
    let radius = (area.value.re / PI).sqrt();
    let e = 2.0 - total;
    let radial_bound = radius.powf(e) / e;
    let lebesgue_bound = 2.0 * PI * radial_bound;
    let slack = r.err + area.err * radius.powf(-total) + 1e-12 * lebesgue_bound;
    if r.value.re > lebesgue_bound + slack {
        return Err(Error::BoundViolated {
            x: r.value.re,
            y: lebesgue_bound,
            ratio: r.value.re / lebesgue_bound,
        });
    }
    Ok(PotentialReport {
        integral: r.value.re,
        err: r.err,
        total_mass: total,
        radius,
        radial_bound,
        lebesgue_bound,
    })
}

/// Lower bound on the distance from `cos(z/2)` to the polynomials in `H^2(C, e^{-|Im z| - |z|^p})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonDensityCertificate {
    pub p: f64,
    pub m: f64,
    pub c_p: f64,
    pub c_1: f64,
    pub y: f64,
    /// `min(1, (π/3) e^{2C_1 + 2C_p Y^p - 2Y})`.
    pub epsilon0_sq: f64,
    /// Natural log of the uncapped bound; stays finite when `epsilon0_sq` underflows.
    pub log_epsilon0_sq: f64,
    /// Stationary point of `r/4 - C_p r^p`; the gap function increases beyond it.
    pub r_star: f64,
    pub gap_samples: usize,
}

/// Largest `Y` the search will accept.
pub const Y_CAP: f64 = 1e6;

/// Number of log-spaced points in `[Y, 10Y]` where the gap inequality is rechecked.
pub const GAP_SAMPLES: usize = 10_000;

/// `ln(1 + 4 e^a)` without overflow.
fn log1p_4exp(a: f64) -> f64 {
    let l4 = 4f64.ln();
    if a + l4 > 30.0 {
        a + l4 + (-(a + l4)).exp().ln_1p()
    } else {
        (4.0 * a.exp()).ln_1p()
    }
}

/// `g(r) = r/4 - ln(1 + 4 e^{C_1 + C_p r^p})`; positive iff `e^{r/4} - 1 > 4 e^{C_1} e^{C_p r^p}`.
pub fn gap_function(p: f64, c_p: f64, c_1: f64, r: f64) -> f64 {
    0.25 * r - log1p_4exp(c_1 + c_p * r.powf(p))
}

pub fn nondensity_certificate(p: f64, m: f64) -> Result<NonDensityCertificate> {
    let c_p = cp_constant(p)?;
    if !(m > 1.0) || !m.is_finite() {
        return Err(Error::InvalidParameters(format!("M = {m} must exceed 1")));
    }
    let c_1 = c1_constant(m);
    let g = |r: f64| gap_function(p, c_p, c_1, r);
    // r/4 - C_p r^p is negative on (0, r*] and increasing after it, and
    // g' >= 1/4 - p C_p r^{p-1} > 0 beyond r*, so g has one sign change.
    let r_star = (4.0 * c_p * p).powf(1.0 / (1.0 - p));
    if !(r_star.is_finite()) || r_star > Y_CAP {
        return Err(Error::NoValidY { cap: Y_CAP });
    }
    let mut lo = r_star.max(1.0);
    let mut hi = lo;
    if g(lo) <= 0.0 {
        hi = 2.0 * lo;
        while g(hi) <= 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 2.0 * Y_CAP {
                return Err(Error::NoValidY { cap: Y_CAP });
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if !(mid > lo && mid < hi) {
                break;
            }
            if g(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let y = if hi > 1.0 { hi } else { f64::from_bits(1f64.to_bits() + 1) };
    if y > Y_CAP {
        return Err(Error::NoValidY { cap: Y_CAP });
    }
    let step = 10f64.ln() / (GAP_SAMPLES - 1) as f64;
    for k in 0..GAP_SAMPLES {
        let r = y * (step * k as f64).exp();
        if !(g(r) > 0.0) {
            return Err(Error::NoValidY { cap: Y_CAP });
        }
    }
    let log_eps = (PI / 3.0).ln() + 2.0 * c_1 + 2.0 * c_p * y.powf(p) - 2.0 * y;
    Ok(NonDensityCertificate {
        p,
        m,
        c_p,
        c_1,
        y,
        epsilon0_sq: log_eps.min(0.0).exp(),
        log_epsilon0_sq: log_eps,
        r_star,
        gap_samples: GAP_SAMPLES,
    })
}

/// Enclosure of `||cos(z/2)||^2` over the plane for `phi = |Im z| + |z|^p`,
/// using `|cos(z/2)|^2 = (cosh y + cos x) / 2 <= e^{|y|}` outside radius `R`.
pub fn cos_half_norm_enclosure(p: f64, radius: f64, settings: &QuadSettings) -> Result<Enclosure> {
    let weight = Weight::im_abs_plus_power(p)?;
    plane_norm_sq_enclosure(&|z: Complex64| (z * 0.5).cos(), radius, &weight, 1.0, 1.0, settings)
}

/// `M = 1 + ||cos(z/2)||`, taken from the upper end of the enclosure.
pub fn norm_budget(enclosure: &Enclosure) -> f64 {
    1.0 + enclosure.upper.sqrt()
}

/// `sqrt(C̃/π) normP / d(z)` with `C̃ = exp(sup phi)`: bounds `|P(z)|` for `||P|| <= normP`.
pub fn pointwise_eval_bound(domain: &Domain, weight: &Weight, z: Complex64, norm_p: f64) -> Result<f64> {
    let d = domain.boundary_distance(z);
    if !(d > 0.0) || !domain.contains(z) {
        return Err(Error::InvalidParameters(format!("{z} is not an interior point")));
    }
    let sup = weight.sup_bound(domain).ok_or(Error::UnboundedWeight)?;
    Ok((sup.exp() / PI).sqrt() * norm_p / d)
}

/// Constant `C'` with `|(w - Q)^2 P(w)| <= C' ||P||` on the probe circle, hence on the
/// whole probe disc and on the inner boundary arc near `Q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentBound {
    pub tangency: Tangency,
    pub c_tilde: f64,
    pub c_prime: f64,
}

pub fn tangent_eval_constant(moon: &Domain, weight: &Weight, probe_radius: Option<f64>) -> Result<TangentBound> {
    let tangency = moon_tangency(moon, probe_radius)?;
    let sup = weight.sup_bound(moon).ok_or(Error::UnboundedWeight)?;
    let c_tilde = sup.exp();
    Ok(TangentBound {
        tangency,
        c_tilde,
        c_prime: (c_tilde / PI).sqrt() / tangency.c,
    })
}
