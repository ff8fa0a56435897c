//! The square-root criterion on moon domains.
//!
//! On a simply connected domain that avoids a ray from the origin, `sqrt(z)` has a
//! holomorphic branch. Polynomials are dense in `H^2(Omega, e^{-phi})` exactly when
//! `1/sqrt(z)` is a limit of polynomials there; the tools below compute the
//! distances, check the change of variables `w = sqrt(z)` node by node, and build
//! finite stages of a family of thin moons whose limit has dense polynomials.

use std::f64::consts::{FRAC_PI_4, PI, TAU};

use num_complex::Complex64;

use crate::bergman::{density_scan, BergmanSettings, Frame, Target, Verdict};
use crate::error::{Error, Result};
use crate::geometry::{Circle, Constraint, Domain, Shape};
use crate::poly::Polynomial;
use crate::quad::{
    apply_rule, integrate_with, resolve_points, weighted_points, Estimate, GridPlan, QuadSettings, QuadratureGrid,
};
use crate::weights::Weight;

const RAY_SAMPLES: usize = 100_000;

/// A branch of `sqrt` with its cut along the ray `{t d : t >= 0}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSpec {
    direction: Complex64,
    theta_cut: f64,
}

impl BranchSpec {
    /// Default direction: towards the tangency point for a moon, the positive
    /// reals for arc regions.
    pub fn new(domain: &Domain, direction: Option<Complex64>) -> Result<Self> {
        let dir = match (direction, domain.shape()) {
            (Some(d), _) => d,
            (None, Shape::Moon { outer, inner }) => {
                let u = (inner.center - outer.center) / (inner.center - outer.center).norm();
                outer.center + u * outer.radius
            }
            (None, Shape::ArcRegion { .. }) => Complex64::new(1.0, 0.0),
            (None, _) => {
                return Err(Error::InvalidParameters("this domain needs an explicit cut direction".into()));
            }
        };
        if !(dir.norm() > 0.0 && dir.norm().is_finite()) {
            return Err(Error::InvalidParameters("cut direction must be a nonzero complex number".into()));
        }
        let dir = dir / dir.norm();
        let origin = Complex64::new(0.0, 0.0);
        if domain.contains(origin) {
            return Err(Error::CutIntersectsDomain(origin));
        }
        let bb = domain.bounding_box();
        let reach = [bb.x_min, bb.x_max]
            .iter()
            .flat_map(|&x| [bb.y_min, bb.y_max].map(|y| Complex64::new(x, y).norm()))
            .fold(0.0, f64::max);
        for k in 0..=RAY_SAMPLES {
            let z = dir * (reach * k as f64 / RAY_SAMPLES as f64);
            if domain.contains(z) {
                return Err(Error::CutIntersectsDomain(z));
            }
        }
        Ok(Self {
            direction: dir,
            theta_cut: dir.arg(),
        })
    }

    pub fn direction(&self) -> Complex64 {
        self.direction
    }

    /// Arguments are taken in `(theta_cut, theta_cut + 2 pi]`.
    pub fn window(&self) -> (f64, f64) {
        (self.theta_cut, self.theta_cut + TAU)
    }

    pub fn sqrt(&self, z: Complex64) -> Complex64 {
        let mut t = z.arg();
        while t <= self.theta_cut {
            t += TAU;
        }
        while t > self.theta_cut + TAU {
            t -= TAU;
        }
        Complex64::from_polar(z.norm().sqrt(), 0.5 * t)
    }
}

pub fn branch_sqrt(spec: &BranchSpec, z: Complex64) -> Complex64 {
    spec.sqrt(z)
}

/// `P(w) = P1(w^2) + w P2(w^2)`. `P` is re-expressed about the origin first.
pub fn parity_split(p: &Polynomial) -> (Polynomial, Polynomial) {
    let zero = Complex64::new(0.0, 0.0);
    let p = if p.center() == zero { p.clone() } else { p.rebase(zero, p.scale()) };
    let s = p.scale();
    let d = p.scaled_coefficients();
    let even: Vec<Complex64> = d.iter().step_by(2).copied().collect();
    let odd: Vec<Complex64> = d.iter().skip(1).step_by(2).map(|c| c / s).collect();
    (
        Polynomial::new_scaled(zero, s * s, even),
        Polynomial::new_scaled(zero, s * s, odd),
    )
}

/// Both sides of `int_Omega |f|^2 e^{-phi} = 4 int_{Omega'} |f(w^2) w|^2 e^{-phi(w^2)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeOfVariables {
    pub lhs: Estimate<f64>,
    pub rhs: Estimate<f64>,
    pub discrepancy: f64,
    pub combined_error: f64,
}

impl ChangeOfVariables {
    pub fn consistent(&self) -> bool {
        self.discrepancy <= self.combined_error
    }
}

fn converged_grid(
    domain: &Domain,
    weight: &Weight,
    g: &(dyn Fn(Complex64) -> f64 + Sync),
    singular: &[Complex64],
    settings: &QuadSettings,
) -> Result<QuadratureGrid> {
    let points = weighted_points(weight, singular);
    let resolved = resolve_points(domain, &|z| Complex64::new(g(z), 0.0), &points)?;
    let plan = GridPlan::new(domain, &resolved, &weight.kink_lines(), settings.rule_order)?;
    QuadratureGrid::build(&plan, &[g], settings.tol, settings)
}

/// `lhs` comes from the plain integrator; `rhs` from the grid nodes pushed
/// through the branch, with the Jacobian `dλ_z = 4|w|^2 dλ_w`.
pub fn change_of_variables_check(
    f: &Target,
    domain: &Domain,
    weight: &Weight,
    spec: &BranchSpec,
    settings: &QuadSettings,
) -> Result<ChangeOfVariables> {
    let integrand = |z: Complex64| f.eval(z).norm_sqr() * weight.density(z);
    let lhs = integrate_with(
        domain,
        &|z| Complex64::new(integrand(z), 0.0),
        &weighted_points(weight, f.singular_points()),
        &weight.kink_lines(),
        settings,
    )?;
    let grid = converged_grid(domain, weight, &integrand, f.singular_points(), settings)?;
    let pulled = |z: Complex64| {
        let w = spec.sqrt(z);
        let z2 = w * w;
        let s = 4.0 * (f.eval(z2) * w).norm_sqr() * weight.density(z2);
        Complex64::new(s / (4.0 * w.norm_sqr()), 0.0)
    };
    let rhs = apply_rule(&grid.nodes, &pulled).re;
    let rhs_err = grid.error_estimate * rhs.abs();
    let lhs = Estimate {
        value: lhs.value.re,
        err: lhs.err,
    };
    let rhs = Estimate { value: rhs, err: rhs_err };
    Ok(ChangeOfVariables {
        lhs,
        rhs,
        discrepancy: (lhs.value - rhs.value).abs(),
        combined_error: lhs.err + rhs.err + 1e-12 * lhs.value.abs(),
    })
}

/// `||1/sqrt(z) - R||^2` computed directly and as `int |1 - sqrt(z) R|^2 e^{-phi} / |z|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseSqrtIdentity {
    pub direct: Estimate<f64>,
    pub transformed: Estimate<f64>,
    pub discrepancy: f64,
    pub combined_error: f64,
}

pub fn inverse_sqrt_identity(
    r: &Polynomial,
    domain: &Domain,
    weight: &Weight,
    spec: &BranchSpec,
    settings: &QuadSettings,
) -> Result<InverseSqrtIdentity> {
    let origin = [Complex64::new(0.0, 0.0)];
    let pts = weighted_points(weight, &origin);
    let kinks = weight.kink_lines();
    let direct = integrate_with(
        domain,
        &|z| Complex64::new((1.0 / spec.sqrt(z) - r.eval(z)).norm_sqr() * weight.density(z), 0.0),
        &pts,
        &kinks,
        settings,
    )?;
    let transformed = integrate_with(
        domain,
        &|z| {
            let v = (1.0 - spec.sqrt(z) * r.eval(z)).norm_sqr() * weight.density(z) / z.norm();
            Complex64::new(v, 0.0)
        },
        &pts,
        &kinks,
        settings,
    )?;
    let direct = Estimate {
        value: direct.value.re,
        err: direct.err,
    };
    let transformed = Estimate {
        value: transformed.value.re,
        err: transformed.err,
    };
    Ok(InverseSqrtIdentity {
        direct,
        transformed,
        discrepancy: (direct.value - transformed.value).abs(),
        combined_error: direct.err + transformed.err + 1e-12 * direct.value.abs(),
    })
}

pub const CRITERION: &str =
    "polynomials are dense in H^2(Omega, e^-phi) if and only if 1/sqrt(z) is a limit of polynomials";

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub distances: Vec<f64>,
    pub budgets: Vec<f64>,
    pub verdict: Verdict,
    pub control_pole: Complex64,
    pub control_distances: Vec<f64>,
    pub control_verdict: Verdict,
    pub criterion: &'static str,
}

/// A point of the complement bounded by the inner boundary curve: the inner
/// center of a moon, or the center of the first excluded disc of an arc region.
fn hole_point(domain: &Domain) -> Option<Complex64> {
    match domain.shape() {
        Shape::Moon { inner, .. } => Some(inner.center),
        Shape::ArcRegion { pieces } => pieces.iter().flatten().find_map(|c| match c {
            Constraint::OutsideCircle(ci) => Some(ci.center),
            _ => None,
        }),
        _ => None,
    }
}

/// Distance scans of `1/sqrt(z)` and of the control `1/(z - p_hole)`.
pub fn moon_density_criterion(
    domain: &Domain,
    weight: &Weight,
    spec: &BranchSpec,
    frame: &Frame,
    n_max: usize,
    settings: &BergmanSettings,
) -> Result<CriterionReport> {
    let origin = Complex64::new(0.0, 0.0);
    if let Shape::Moon { inner, .. } = domain.shape() {
        if (origin - inner.center).norm() >= inner.radius {
            return Err(Error::InvalidParameters("the origin must lie inside the inner circle".into()));
        }
    }
    if domain.exterior_distance(origin) <= 0.0 {
        return Err(Error::InvalidParameters("the origin must lie outside the closed domain".into()));
    }
    let pole = hole_point(domain)
        .ok_or_else(|| Error::InvalidParameters("criterion needs a moon or arc region".into()))?;
    let inv = Target::new(|z| 1.0 / spec.sqrt(z)).with_singular(&[origin]);
    let scan = density_scan(&inv, domain, weight, frame, n_max, settings)?;
    let control = Target::new(move |z| 1.0 / (z - pole)).with_singular(&[pole]);
    let cscan = density_scan(&control, domain, weight, frame, n_max, settings)?;
    Ok(CriterionReport {
        distances: scan.distances,
        budgets: scan.budgets,
        verdict: scan.verdict,
        control_pole: pole,
        control_distances: cscan.distances,
        control_verdict: cscan.verdict,
        criterion: CRITERION,
    })
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    let mut prev = 0.25;
    for (i, &a) in alphas.iter().enumerate() {
        if !(a > 0.0 && a < prev) {
            return Err(Error::InvalidParameters(format!(
                "need 0 < alpha_{} = {a} < {prev}",
                i + 1
            )));
        }
        prev = a;
    }
    Ok(())
}

fn unit() -> Constraint {
    Constraint::InsideCircle(Circle::new(Complex64::new(0.0, 0.0), 1.0))
}

fn excluded(alpha: f64) -> Constraint {
    Constraint::OutsideCircle(Circle::new(Complex64::new(alpha, 0.0), 1.0 - alpha))
}

/// Stage domain `D_k = D_1 ∪ D~_2 ∪ ... ∪ D~_k`; uses `alphas[0..k-1]`.
pub fn example18_domain(k: usize, alphas: &[f64]) -> Result<Domain> {
    if k == 0 || alphas.len() + 1 < k {
        return Err(Error::InvalidParameters(format!(
            "stage {k} needs k >= 1 and at least {} alpha values",
            k.saturating_sub(1)
        )));
    }
    check_alphas(alphas)?;
    let mut pieces = vec![vec![unit(), excluded(0.25), Constraint::OutWedge(FRAC_PI_4)]];
    for j in 2..=k {
        let beta = PI / 2f64.powi(j as i32 + 1);
        pieces.push(vec![unit(), excluded(alphas[j - 2]), Constraint::OutWedge(beta)]);
    }
    Domain::arc_region(pieces)
}

/// Strip `Delta_k = {|z| < 1, |z - alpha_k| > 1 - alpha_k, |arg z| <= pi / 2^{k+1}}`.
pub fn example18_strip(k: usize, alpha_k: f64) -> Result<Domain> {
    if k == 0 || !(alpha_k > 0.0 && alpha_k < 0.25) {
        return Err(Error::InvalidParameters(format!("strip {k} with alpha {alpha_k}")));
    }
    let beta = PI / 2f64.powi(k as i32 + 1);
    Domain::arc_region(vec![vec![unit(), excluded(alpha_k), Constraint::InWedge(beta)]])
}

#[derive(Debug, Clone)]
pub struct Example18Stage {
    pub k: usize,
    pub domain: Domain,
    pub strip: Domain,
}

/// `D_k` and `Delta_k` from `alphas = [alpha_1, ..., alpha_k]`.
pub fn example18_stage(k: usize, alphas: &[f64]) -> Result<Example18Stage> {
    if alphas.len() != k {
        return Err(Error::InvalidParameters(format!("stage {k} needs exactly {k} alpha values")));
    }
    Ok(Example18Stage {
        k,
        domain: example18_domain(k, alphas)?,
        strip: example18_strip(k, alphas[k - 1])?,
    })
}

#[derive(Debug, Clone)]
pub struct StripSearch {
    pub k: usize,
    pub degree: usize,
    pub alphas: Vec<f64>,
    pub poly: Polynomial,
    /// `int_{D_k} |1/sqrt(z) - P|^2 e^{-phi}`.
    pub domain_error: f64,
    pub sup_on_strip: f64,
    pub strip_mass: f64,
    /// `sup_strip |1/sqrt(z) - P|^2 * int_strip e^{-phi}`, below `target`.
    pub strip_bound: f64,
    pub target: f64,
    pub halvings: usize,
}

fn sup_on(domain: &Domain, g: &dyn Fn(Complex64) -> f64) -> f64 {
    const GRID: usize = 400;
    let bb = domain.bounding_box();
    let mut best: f64 = 0.0;
    for i in 0..GRID {
        for j in 0..GRID {
            let z = Complex64::new(
                bb.x_min + (bb.x_max - bb.x_min) * (i as f64 + 0.5) / GRID as f64,
                bb.y_min + (bb.y_max - bb.y_min) * (j as f64 + 0.5) / GRID as f64,
            );
            if domain.contains(z) {
                best = best.max(g(z));
            }
        }
    }
    // the strip is thin near z = 1; sample its closure along the boundary arcs too
    for i in 1..4000 {
        let t = i as f64 / 4000.0;
        for z in [Complex64::from_polar(1.0 - 1e-9, t * PI / 2.0), Complex64::from_polar(1.0 - 1e-9, -t * PI / 2.0)] {
            if domain.contains(z) {
                best = best.max(g(z));
            }
        }
    }
    best
}

/// Best degree-`degree` approximant `P` of `1/sqrt(z)` on `D_k`, then halving
/// of `alpha_k` until the strip bound drops below `2^{-(k+1)}`.
pub fn strip_budget_search(
    k: usize,
    prior_alphas: &[f64],
    weight: &Weight,
    degree: usize,
    settings: &BergmanSettings,
) -> Result<StripSearch> {
    if prior_alphas.len() + 1 != k {
        return Err(Error::InvalidParameters(format!("stage {k} needs {} prior alpha values", k - 1)));
    }
    let domain = example18_domain(k, prior_alphas)?;
    let spec = BranchSpec::new(&domain, Some(Complex64::new(1.0, 0.0)))?;
    let origin = Complex64::new(0.0, 0.0);
    let inv = Target::new(|z| 1.0 / spec.sqrt(z)).with_singular(&[origin]);
    let frame = Frame::for_domain(&domain);
    let fit = crate::bergman::best_poly_approx(&inv, &domain, weight, &frame, degree, None, settings)?;
    let target = 0.5f64.powi(k as i32 + 1);
    let poly = fit.poly.clone();
    let mut alpha = 0.5 * prior_alphas.last().copied().unwrap_or(0.25);
    for halvings in 0..60 {
        let strip = example18_strip(k, alpha)?;
        let sup = sup_on(&strip, &|z| (1.0 / spec.sqrt(z) - poly.eval(z)).norm_sqr());
        let mass = integrate_with(
            &strip,
            &|z| Complex64::new(weight.density(z), 0.0),
            &weighted_points(weight, &[]),
            &weight.kink_lines(),
            &QuadSettings::with_tol(1e-3 * target),
        )?
        .value
        .re;
        if sup * mass < target {
            let mut alphas = prior_alphas.to_vec();
            alphas.push(alpha);
            return Ok(StripSearch {
                k,
                degree,
                alphas,
                poly,
                domain_error: fit.distance * fit.distance,
                sup_on_strip: sup,
                strip_mass: mass,
                strip_bound: sup * mass,
                target,
                halvings,
            });
        }
        alpha *= 0.5;
    }
    Err(Error::ToleranceNotMet {
        value: Complex64::new(alpha, 0.0),
        err: target,
    })
}
