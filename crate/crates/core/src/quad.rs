//! Two-dimensional quadrature over [`Domain`]s.
//!
//! The domain is integrated slice by slice: an outer Gauss rule in `x` between
//! breakpoints where the slice structure changes, and an inner rule in `y` over
//! the exact vertical slice. Subpanels touching an `x` breakpoint use a quadratic
//! map, which absorbs the square-root behaviour of slice lengths there.
//!
//! Singular points strictly inside the domain are cut out as small discs and
//! integrated in polar coordinates with a radial substitution matched to the
//! singularity order. Singular points on or outside the boundary get graded
//! breakpoints instead.
//!
//! A grid is refined by doubling the number of subpanels in every panel; the
//! difference between consecutive levels is the error estimate. Node generation
//! runs on the rayon pool, but nodes are collected and summed in a fixed order
//! with compensated summation, so results are bit-for-bit reproducible.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauss::{adaptive_gk_semi_infinite, gauss_legendre};
use crate::geometry::{finalize_breaks, Domain};
use crate::weights::Weight;

/// Orders at or above this are treated as non-integrable.
const MAX_ORDER: f64 = 1.99;

/// Polar discs stop at this fraction of `|center|`, where rounding of `center + w` sets in.
const CORE_FRACTION: f64 = 1e-9;

/// Relative error floor added to every estimate; level differences can vanish exactly.
const ROUNDING_FLOOR: f64 = 1e-14;

/// Polar discs are graded so that a singularity of order `alpha` becomes `v^(K-1)`.
const RADIAL_GRADING: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadSettings {
    /// Absolute tolerance for [`integrate`]; relative tolerance for grid probes.
    pub tol: f64,
    /// Gauss–Legendre points per subpanel, in each direction.
    pub rule_order: usize,
    /// Refinement stops before a grid would exceed this many nodes.
    pub max_nodes: usize,
    /// Coarsest level whose value takes part in a convergence test.
    pub min_level: u32,
}

impl Default for QuadSettings {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            rule_order: 16,
            max_nodes: 2_000_000,
            min_level: 1,
        }
    }
}

impl QuadSettings {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// A marked point. `order` is the exponent `alpha` in `|g| ~ |z - z0|^-alpha`;
/// `None` asks the integrator to estimate it from the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPoint {
    pub z: Complex64,
    pub order: Option<f64>,
}

impl SingularPoint {
    pub fn known(z: Complex64, order: f64) -> Self {
        Self { z, order: Some(order) }
    }

    pub fn unknown(z: Complex64) -> Self {
        Self { z, order: None }
    }
}

/// A value with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub err: f64,
}

pub type Integral = Estimate<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Patch {
    center: Complex64,
    radius: f64,
    /// `r = radius * v^q`.
    q: f64,
    order: f64,
    /// Inner radius below which `center + w` no longer resolves `w`; the core
    /// disc is integrated as `A(θ) r^{-order}` from one ring of nodes.
    core: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Graded {
    z: Complex64,
    floor: f64,
    reach: f64,
}

/// Level-independent description of a grid: breakpoints, polar discs and graded points.
#[derive(Debug, Clone)]
pub struct GridPlan {
    domain: Domain,
    patches: Vec<Patch>,
    graded: Vec<Graded>,
    kinks: Vec<f64>,
    x_breaks: Vec<f64>,
    rule: (Vec<f64>, Vec<f64>),
    marked: Vec<Complex64>,
}

impl GridPlan {
    /// `points` carry resolved singularity orders; `kinks` are lines `Im z = c`
    /// across which the integrand is not smooth.
    pub fn new(domain: &Domain, points: &[(Complex64, f64)], kinks: &[f64], rule_order: usize) -> Result<Self> {
        if rule_order == 0 {
            return Err(Error::InvalidParameters("rule order must be positive".into()));
        }
        let bb = domain.bounding_box();
        let scale = bb.half_diagonal();
        let mut pts: Vec<(Complex64, f64)> = Vec::new();
        for &(z, a) in points {
            if !(z.re.is_finite() && z.im.is_finite()) {
                continue;
            }
            match pts.iter_mut().find(|(w, _)| (*w - z).norm() <= 1e-12 * scale) {
                Some(e) => e.1 = e.1.max(a),
                None => pts.push((z, a)),
            }
        }

        let mut patches = Vec::new();
        let mut graded = Vec::new();
        for (i, &(z, a)) in pts.iter().enumerate() {
            let bd = domain.boundary_distance(z);
            if domain.contains(z) && bd > 1e-9 * scale {
                if a >= MAX_ORDER {
                    return Err(Error::NonIntegrableSingularity { point: z, order: a });
                }
                let mut rho = 0.5 * bd;
                for (j, &(w, _)) in pts.iter().enumerate() {
                    if j != i {
                        rho = rho.min(0.45 * (w - z).norm());
                    }
                }
                for &c in kinks {
                    let dy = (c - z.im).abs();
                    if dy > 1e-12 * scale {
                        rho = rho.min(0.9 * dy);
                    }
                }
                patches.push(Patch {
                    center: z,
                    radius: rho,
                    q: RADIAL_GRADING / (2.0 - a.max(0.0)),
                    order: a.max(0.0),
                    core: (CORE_FRACTION * z.norm()).min(1e-3 * rho),
                });
            } else {
                let floor = (0.5 * domain.exterior_distance(z)).max(1e-9 * scale);
                graded.push(Graded {
                    z,
                    floor,
                    reach: 0.5 * scale,
                });
            }
        }

        let mut xs = domain.x_breakpoints();
        let mut circles = domain.circles();
        for p in &patches {
            xs.push(p.center.re - p.radius);
            xs.push(p.center.re + p.radius);
            circles.push(crate::geometry::Circle::new(p.center, p.radius));
        }
        for &c in kinks {
            for ci in &circles {
                let dy = c - ci.center.im;
                let h2 = ci.radius * ci.radius - dy * dy;
                if h2 > 0.0 {
                    xs.push(ci.center.re - h2.sqrt());
                    xs.push(ci.center.re + h2.sqrt());
                }
            }
        }
        for g in &graded {
            xs.push(g.z.re);
            let mut d = g.reach;
            while d >= g.floor {
                xs.push(g.z.re - d);
                xs.push(g.z.re + d);
                d *= 0.5;
            }
            xs.push(g.z.re - g.floor);
            xs.push(g.z.re + g.floor);
        }
        let x_breaks = finalize_breaks(xs, bb.x_min, bb.x_max);
        let mut kinks: Vec<f64> = kinks.iter().copied().filter(|c| c.is_finite()).collect();
        kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kinks.dedup();

        Ok(Self {
            domain: domain.clone(),
            patches,
            graded,
            kinks,
            x_breaks,
            rule: gauss_legendre(rule_order),
            marked: pts.iter().map(|p| p.0).collect(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Number of polar discs cut out around interior singular points.
    pub fn polar_discs(&self) -> usize {
        self.patches.len()
    }

    /// Quadrature nodes at refinement `level`, in a fixed order.
    pub fn nodes(&self, level: u32) -> Vec<Node> {
        let m = 1usize << level;
        let (gx, gw) = &self.rule;
        let mut outer: Vec<(f64, f64)> = Vec::new();
        for win in self.x_breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            let h = (b - a) / m as f64;
            if !(h > 0.0) {
                continue;
            }
            for j in 0..m {
                let lo = a + j as f64 * h;
                let map = if m == 1 {
                    Map::Cubic
                } else if j == 0 {
                    Map::Left
                } else if j == m - 1 {
                    Map::Right
                } else {
                    Map::Linear
                };
                for (t, w) in gx.iter().zip(gw) {
                    let (u, du) = map.apply(0.5 * (t + 1.0));
                    outer.push((lo + h * u, 0.5 * w * h * du));
                }
            }
        }

        let slices: Vec<Vec<Node>> = outer
            .par_iter()
            .map(|&(x, wx)| self.slice_nodes(x, wx, m))
            .collect();
        let discs: Vec<Vec<Node>> = self.patches.par_iter().map(|p| self.patch_nodes(p, m)).collect();
        let mut out = Vec::with_capacity(slices.iter().chain(&discs).map(Vec::len).sum());
        for s in slices.into_iter().chain(discs) {
            out.extend(s);
        }
        out
    }

    fn slice_nodes(&self, x: f64, wx: f64, m: usize) -> Vec<Node> {
        let mut ivs = self.domain.vertical_slice(x);
        for p in &self.patches {
            let dx = x - p.center.re;
            let h2 = p.radius * p.radius - dx * dx;
            if h2 > 0.0 {
                let h = h2.sqrt();
                ivs = subtract_interval(&ivs, p.center.im - h, p.center.im + h);
            }
        }
        let (gx, gw) = &self.rule;
        let mut out = Vec::new();
        for (y0, y1) in ivs {
            if !(y1 > y0) {
                continue;
            }
            let len = y1 - y0;
            let mut ys = vec![y0, y1];
            ys.extend(self.kinks.iter().copied());
            for g in &self.graded {
                let dx = (x - g.z.re).abs();
                if dx > g.reach {
                    continue;
                }
                ys.push(g.z.im);
                let mut d = dx.max(g.floor);
                while d <= 2.0 * len {
                    ys.push(g.z.im - d);
                    ys.push(g.z.im + d);
                    d *= 2.0;
                }
            }
            let ys = finalize_breaks(ys, y0, y1);
            for win in ys.windows(2) {
                let h = (win[1] - win[0]) / m as f64;
                if !(h > 0.0) {
                    continue;
                }
                for j in 0..m {
                    let lo = win[0] + j as f64 * h;
                    for (t, w) in gx.iter().zip(gw) {
                        out.push(Node {
                            z: Complex64::new(x, lo + 0.5 * h * (t + 1.0)),
                            w: wx * 0.5 * h * w,
                        });
                    }
                }
            }
        }
        out
    }

    fn patch_nodes(&self, p: &Patch, m: usize) -> Vec<Node> {
        use std::f64::consts::{FRAC_PI_2, TAU};
        let (gx, gw) = &self.rule;
        let rule = |a: f64, b: f64| -> Vec<(f64, f64)> {
            let h = (b - a) / m as f64;
            let mut v = Vec::with_capacity(m * gx.len());
            for j in 0..m {
                let lo = a + j as f64 * h;
                for (t, w) in gx.iter().zip(gw) {
                    v.push((lo + 0.5 * h * (t + 1.0), 0.5 * h * w));
                }
            }
            v
        };
        let mut thetas = Vec::new();
        for k in 0..4 {
            thetas.extend(rule(k as f64 * FRAC_PI_2, (k + 1) as f64 * FRAC_PI_2));
        }
        debug_assert!((4.0 * FRAC_PI_2 - TAU).abs() < 1e-15);
        let q = p.q;
        let rho = p.radius;
        let v_min = (p.core / rho).powf(1.0 / q);
        let v_mid = v_min + 0.25 * (1.0 - v_min);
        let mut radial = rule(v_min, v_mid);
        radial.extend(rule(v_mid, 1.0));
        let mut out = Vec::with_capacity(thetas.len() * (radial.len() + 1));
        if p.core > 0.0 {
            // int_0^core r^{1-a} dr = core^2 / (2 - a) times r^a g on the ring
            let w = p.core * p.core / (2.0 - p.order);
            for &(t, wt) in &thetas {
                out.push(Node {
                    z: p.center + Complex64::from_polar(p.core, t),
                    w: w * wt,
                });
            }
        }
        for &(v, wv) in &radial {
            let r = rho * v.powf(q);
            // r dr = rho^2 q v^(2q-1) dv
            let jac = rho * rho * q * v.powf(2.0 * q - 1.0) * wv;
            for &(t, wt) in &thetas {
                out.push(Node {
                    z: p.center + Complex64::from_polar(r, t),
                    w: jac * wt,
                });
            }
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Map {
    Linear,
    Left,
    Right,
    Cubic,
}

impl Map {
    /// Map of `[0, 1]` onto itself and its derivative.
    fn apply(self, s: f64) -> (f64, f64) {
        match self {
            Map::Linear => (s, 1.0),
            Map::Left => (s * s, 2.0 * s),
            Map::Right => {
                let t = 1.0 - s;
                (1.0 - t * t, 2.0 * t)
            }
            Map::Cubic => (s * s * (3.0 - 2.0 * s), 6.0 * s * (1.0 - s)),
        }
    }
}

fn subtract_interval(ivs: &[(f64, f64)], a: f64, b: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(ivs.len() + 1);
    for &(lo, hi) in ivs {
        if b <= lo || a >= hi {
            out.push((lo, hi));
            continue;
        }
        if a > lo {
            out.push((lo, a));
        }
        if b < hi {
            out.push((b, hi));
        }
    }
    out
}

/// Compensated (Neumaier) sum.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0f64;
    let mut c = 0.0f64;
    for x in it {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

/// `sum w_i g(z_i)`, evaluated in parallel and summed in node order.
pub fn apply_rule<F>(nodes: &[Node], g: &F) -> Complex64
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let terms: Vec<Complex64> = nodes.par_iter().map(|n| g(n.z) * n.w).collect();
    Complex64::new(
        neumaier_sum(terms.iter().map(|t| t.re)),
        neumaier_sum(terms.iter().map(|t| t.im)),
    )
}

/// A converged node set together with the data that produced it.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    pub level: u32,
    pub nodes: Vec<Node>,
    pub singular_points: Vec<Complex64>,
    pub polar_discs: usize,
    pub tol: f64,
    /// Largest relative change among the probes between the last two levels.
    pub error_estimate: f64,
}

impl QuadratureGrid {
    /// Refine `plan` until every nonnegative probe integral changes by at most
    /// `rel_tol` (relative) between consecutive levels.
    pub fn build(
        plan: &GridPlan,
        probes: &[&(dyn Fn(Complex64) -> f64 + Sync)],
        rel_tol: f64,
        settings: &QuadSettings,
    ) -> Result<Self> {
        let mut prev: Option<Vec<f64>> = None;
        let mut last_err = f64::INFINITY;
        let mut level = 0u32;
        let mut count = 0usize;
        loop {
            if count > 0 && count.saturating_mul(4) > settings.max_nodes {
                let first = prev.as_ref().map(|v| v[0]).unwrap_or(f64::NAN);
                return Err(Error::ToleranceNotMet {
                    value: first.into(),
                    err: last_err,
                });
            }
            let nodes = plan.nodes(level);
            count = nodes.len();
            let vals: Vec<f64> = probes
                .iter()
                .map(|p| apply_rule(&nodes, &|z| Complex64::new(p(z), 0.0)).re)
                .collect();
            if let Some(pv) = &prev {
                last_err = vals
                    .iter()
                    .zip(pv)
                    .map(|(a, b)| {
                        let d = (a - b).abs();
                        if d == 0.0 { 0.0 } else { d / a.abs().max(f64::MIN_POSITIVE) }
                    })
                    .map(|e| e + ROUNDING_FLOOR)
                    .fold(0.0, f64::max);
                if level > settings.min_level && last_err <= rel_tol {
                    return Ok(Self {
                        level,
                        nodes,
                        singular_points: plan.marked.clone(),
                        polar_discs: plan.patches.len(),
                        tol: rel_tol,
                        error_estimate: last_err,
                    });
                }
            }
            prev = Some(vals);
            level += 1;
        }
    }
}

/// Local order of `|g|` at `z0`, from mean values on shrinking rings.
pub fn estimate_order<F>(g: &F, z0: Complex64, rho: f64) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    const RINGS: usize = 28;
    const ANGLES: usize = 16;
    let means: Vec<f64> = (0..=RINGS)
        .map(|k| {
            let r = rho * 0.5f64.powi(k as i32);
            (0..ANGLES)
                .map(|j| {
                    let t = std::f64::consts::TAU * (j as f64 + 0.5) / ANGLES as f64 + 0.1234;
                    g(z0 + Complex64::from_polar(r, t)).norm()
                })
                .sum::<f64>()
                / ANGLES as f64
        })
        .collect();
    let tail = &means[RINGS - 4..];
    if tail.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonIntegrableSingularity {
            point: z0,
            order: f64::INFINITY,
        });
    }
    if tail.iter().any(|&m| m == 0.0) {
        return Ok(0.0);
    }
    let slope = tail.windows(2).map(|w| (w[1] / w[0]).log2()).sum::<f64>() / (tail.len() - 1) as f64;
    if slope >= MAX_ORDER {
        return Err(Error::NonIntegrableSingularity { point: z0, order: slope });
    }
    Ok(slope.max(0.0))
}

pub(crate) fn resolve_points<F>(domain: &Domain, g: &F, points: &[SingularPoint]) -> Result<Vec<(Complex64, f64)>>
where
    F: Fn(Complex64) -> Complex64,
{
    points
        .iter()
        .map(|sp| {
            let order = match sp.order {
                Some(a) => a,
                None if domain.contains(sp.z) => {
                    let rho = 0.25 * domain.boundary_distance(sp.z);
                    if rho > 0.0 { estimate_order(g, sp.z, rho)? } else { 0.0 }
                }
                None => 0.0,
            };
            Ok((sp.z, order))
        })
        .collect()
}

/// `int_domain g dλ` to absolute tolerance `settings.tol`.
pub fn integrate_with<F>(
    domain: &Domain,
    g: &F,
    points: &[SingularPoint],
    kinks: &[f64],
    settings: &QuadSettings,
) -> Result<Integral>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let resolved = resolve_points(domain, g, points)?;
    let plan = GridPlan::new(domain, &resolved, kinks, settings.rule_order)?;
    let mut prev: Option<Complex64> = None;
    let mut last_err = f64::INFINITY;
    let mut count = 0usize;
    let mut level = 0u32;
    loop {
        if count > 0 && count.saturating_mul(4) > settings.max_nodes {
            return Err(Error::ToleranceNotMet {
                value: prev.unwrap_or_default(),
                err: last_err,
            });
        }
        let nodes = plan.nodes(level);
        count = nodes.len();
        let v = apply_rule(&nodes, g);
        if let Some(p) = prev {
            last_err = (v - p).norm() + ROUNDING_FLOOR * v.norm();
            if level > settings.min_level && last_err <= settings.tol {
                return Ok(Integral { value: v, err: last_err });
            }
        }
        prev = Some(v);
        level += 1;
    }
}

/// `int_domain g dλ` with default settings and absolute tolerance `tol`.
/// Orders of the listed singular points are estimated from `g`.
pub fn integrate<F>(domain: &Domain, g: F, singular_points: &[Complex64], tol: f64) -> Result<Integral>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let pts: Vec<SingularPoint> = singular_points.iter().map(|&z| SingularPoint::unknown(z)).collect();
    integrate_with(domain, &g, &pts, &[], &QuadSettings::with_tol(tol))
}

/// Singular points of `|f|^2 e^{-phi}`: the weight's, plus `extra` points of `f`.
/// Atoms of mass at least 2, and atoms shared with `f`, have their order estimated.
pub fn weighted_points(weight: &Weight, extra: &[Complex64]) -> Vec<SingularPoint> {
    let mut pts: Vec<SingularPoint> = weight
        .singular_points()
        .into_iter()
        .map(|(z, a)| if a < MAX_ORDER { SingularPoint::known(z, a) } else { SingularPoint::unknown(z) })
        .collect();
    for &z in extra {
        match pts.iter_mut().find(|p| (p.z - z).norm() <= 1e-12) {
            Some(p) => p.order = None,
            None => pts.push(SingularPoint::unknown(z)),
        }
    }
    pts
}

/// `||f||^2 = int |f|^2 e^{-phi} dλ`. `f_singular` lists points where `f` blows up.
pub fn weighted_norm_sq<F>(
    f: &F,
    domain: &Domain,
    weight: &Weight,
    f_singular: &[Complex64],
    settings: &QuadSettings,
) -> Result<Estimate<f64>>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let g = |z: Complex64| Complex64::new(f(z).norm_sqr() * weight.density(z), 0.0);
    let r = integrate_with(domain, &g, &weighted_points(weight, f_singular), &weight.kink_lines(), settings)?;
    Ok(Estimate {
        value: r.value.re.max(0.0),
        err: r.err,
    })
}

/// `<f, g> = int f conj(g) e^{-phi} dλ`.
pub fn inner_product<F, G>(
    f: &F,
    g: &G,
    domain: &Domain,
    weight: &Weight,
    singular: &[Complex64],
    settings: &QuadSettings,
) -> Result<Integral>
where
    F: Fn(Complex64) -> Complex64 + Sync,
    G: Fn(Complex64) -> Complex64 + Sync,
{
    let h = |z: Complex64| f(z) * g(z).conj() * weight.density(z);
    integrate_with(domain, &h, &weighted_points(weight, singular), &weight.kink_lines(), settings)
}

/// Upper bound for the integral over `|z| > R` of `amplitude e^{growth|y|} e^{-|y|-|z|^p}`,
/// namely `amplitude 2π int_R^inf r e^{-r^p} dr`.
pub fn truncation_tail(weight: &Weight, radius: f64, amplitude: f64, growth: f64) -> Result<f64> {
    let Weight::ImAbsPlusPower { p } = *weight else {
        return Err(Error::InvalidParameters("truncation tail needs an |Im z| + |z|^p weight".into()));
    };
    if growth > 1.0 {
        return Err(Error::UnsupportedGrowth(growth));
    }
    if !(radius >= 0.0) || !(amplitude >= 0.0) {
        return Err(Error::InvalidParameters("radius and amplitude must be nonnegative".into()));
    }
    // u = r^p: r e^{-r^p} dr = u^{2/p - 1} e^{-u} du / p
    let k = 2.0 / p - 1.0;
    let u0 = radius.powf(p);
    let (v, _) = adaptive_gk_semi_infinite(
        |u: f64| if u > 0.0 { (k * u.ln() - u).exp() / p } else { 0.0 },
        u0,
        0.0,
        1e-13,
        2000,
    )?;
    Ok(amplitude * std::f64::consts::TAU * v)
}

/// Two-sided enclosure of `||f||^2` on the whole plane, from the truncated plane of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
    pub truncated: Estimate<f64>,
    pub tail: f64,
}

/// `|f|^2 <= amplitude e^{growth |y|}` must hold outside the disc of radius `R`.
pub fn plane_norm_sq_enclosure<F>(
    f: &F,
    radius: f64,
    weight: &Weight,
    amplitude: f64,
    growth: f64,
    settings: &QuadSettings,
) -> Result<Enclosure>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let tail = truncation_tail(weight, radius, amplitude, growth)?;
    let domain = Domain::truncated_plane(radius)?;
    let truncated = weighted_norm_sq(f, &domain, weight, &[], settings)?;
    Ok(Enclosure {
        lower: (truncated.value - truncated.err).max(0.0),
        upper: truncated.value + truncated.err + tail,
        truncated,
        tail,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Circle;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn near_critical_order_away_from_origin() {
        // |z - z0|^{-1.9} on the disc of radius 1/4 around z0: 2π (1/4)^{0.1} / 0.1
        let z0 = c(-0.85, 0.14);
        let d = Domain::disc(z0, 0.25).unwrap();
        let g = |z: Complex64| Complex64::new((z - z0).norm().powf(-1.9), 0.0);
        let want = 2.0 * PI * 0.25f64.powf(0.1) / 0.1;
        let r = integrate_with(&d, &g, &[SingularPoint::known(z0, 1.9)], &[], &QuadSettings::with_tol(1e-9)).unwrap();
        assert!((r.value.re - want).abs() < 1e-8 * want, "{} vs {want}", r.value.re);
    }

    #[test]
    fn disc_area() {
        let r = integrate(&Domain::unit_disc(), |_| c(1.0, 0.0), &[], 1e-12).unwrap();
        assert!((r.value.re - PI).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn inverse_distance_and_strong_singularity() {
        let d = Domain::unit_disc();
        let r = integrate(&d, |z| c(1.0 / z.norm(), 0.0), &[c(0.0, 0.0)], 1e-10).unwrap();
        assert!((r.value.re - 2.0 * PI).abs() < 1e-9, "{r:?}");
        let r = integrate(&d, |z| c(z.norm().powf(-1.5), 0.0), &[c(0.0, 0.0)], 1e-9).unwrap();
        assert!((r.value.re - 4.0 * PI).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn off_center_singularity() {
        // int over disc(0,1) of |z - a|^{-1}, a inside: compare with a moved disc
        let a = c(0.3, -0.2);
        let d = Domain::unit_disc();
        let r = integrate(&d, |z| c(1.0 / (z - a).norm(), 0.0), &[a], 1e-10).unwrap();
        // oracle: polar around a, int_0^{2π} rho(θ) dθ with rho the distance to the unit circle
        let n = 20000;
        let mut s = 0.0;
        for j in 0..n {
            let t = 2.0 * PI * (j as f64 + 0.5) / n as f64;
            let e = Complex64::from_polar(1.0, t);
            let b = (a.conj() * e).re;
            s += -b + (b * b + 1.0 - a.norm_sqr()).sqrt();
        }
        s *= 2.0 * PI / n as f64;
        assert!((r.value.re - s).abs() < 1e-9, "{} vs {s}", r.value.re);
    }

    #[test]
    fn non_integrable_detected() {
        let r = integrate(&Domain::unit_disc(), |z| c(z.norm().powf(-2.2), 0.0), &[c(0.0, 0.0)], 1e-8);
        assert!(matches!(r, Err(Error::NonIntegrableSingularity { .. })), "{r:?}");
    }

    #[test]
    fn norms_and_products() {
        let d = Domain::unit_disc();
        let s = QuadSettings::with_tol(1e-11);
        for k in 0..4 {
            let n = weighted_norm_sq(&|z: Complex64| z.powu(k), &d, &Weight::Zero, &[], &s).unwrap();
            assert!((n.value - PI / (k as f64 + 1.0)).abs() < 1e-10);
        }
        let w = Weight::log_potential(vec![(c(0.0, 0.0), 1.5)]).unwrap();
        let n = weighted_norm_sq(&|_| c(1.0, 0.0), &d, &w, &[], &QuadSettings::with_tol(1e-9)).unwrap();
        assert!((n.value - 4.0 * PI).abs() < 1e-8, "{n:?}");
        let ip = inner_product(&|z: Complex64| z, &|z: Complex64| z * z, &d, &Weight::Zero, &[], &s).unwrap();
        assert!(ip.value.norm() < 1e-11);
        let ip = inner_product(&|z: Complex64| 1.0 / (z - 2.0), &|_| c(1.0, 0.0), &d, &Weight::Zero, &[c(2.0, 0.0)], &s)
            .unwrap();
        assert!((ip.value - c(-PI / 2.0, 0.0)).norm() < 1e-10, "{ip:?}");
    }

    #[test]
    fn moon_area_and_kinked_weight() {
        let m = Domain::moon(Circle::new(c(0.0, 0.0), 1.0), Circle::new(c(0.45, 0.0), 0.55)).unwrap();
        let r = integrate(&m, |_| c(1.0, 0.0), &[], 1e-12).unwrap();
        assert!((r.value.re - PI * (1.0 - 0.55f64.powi(2))).abs() < 1e-11, "{r:?}");
        // e^{-|y|} on the unit disc: 4 int_0^1 e^{-y} sqrt(1-y^2) dy, by 1-D quadrature
        let w = Weight::im_abs_plus_power(0.5).unwrap();
        let n = weighted_norm_sq(
            &|_| c(1.0, 0.0),
            &Domain::unit_disc(),
            &Weight::Sum(vec![w]),
            &[],
            &QuadSettings::with_tol(1e-10),
        )
        .unwrap();
        // oracle in polar coordinates: int_0^{2π} int_0^1 e^{-r|sin t| - sqrt r} r dr dt
        let (xs, ws) = gauss_legendre(40);
        let mut s = 0.0;
        for qt in 0..64 {
            for (xt, wt) in xs.iter().zip(&ws) {
                let t = (qt as f64 + 0.5 * (xt + 1.0)) * (PI / 2.0) / 16.0;
                let wtt = 0.5 * wt * (PI / 2.0) / 16.0;
                for qr in 0..8 {
                    for (xr, wr) in xs.iter().zip(&ws) {
                        // r = u^2
                        let u = (qr as f64 + 0.5 * (xr + 1.0)) / 8.0;
                        let wu = 0.5 * wr / 8.0;
                        let r = u * u;
                        s += wtt * wu * 2.0 * u * r * (-r * t.sin().abs() - u).exp();
                    }
                }
            }
        }
        assert!((n.value - s).abs() < 1e-9, "{} vs {s}", n.value);
    }

    #[test]
    fn tail_values() {
        let w = Weight::im_abs_plus_power(0.5).unwrap();
        let t0 = truncation_tail(&w, 0.0, 1.0, 0.0).unwrap();
        assert!((t0 - 24.0 * PI).abs() < 1e-9);
        let t2 = truncation_tail(&w, 0.0, 2.0, 0.0).unwrap();
        assert!((t2 - 2.0 * t0).abs() < 1e-9);
        // Gamma(4, u)= e^{-u}(u^3+3u^2+6u+6)
        let u = 40f64.sqrt();
        let exact = 4.0 * PI * (-u).exp() * (u.powi(3) + 3.0 * u * u + 6.0 * u + 6.0);
        let t = truncation_tail(&w, 40.0, 1.0, 1.0).unwrap();
        assert!((t - exact).abs() < 1e-10 * exact);
        assert!(matches!(truncation_tail(&w, 40.0, 1.0, 1.5), Err(Error::UnsupportedGrowth(_))));
    }

    #[test]
    fn deterministic() {
        let d = Domain::unit_disc();
        let g = |z: Complex64| (z * 3.0).exp() / (z - 1.5);
        let a = integrate(&d, g, &[], 1e-10).unwrap();
        let b = integrate(&d, g, &[], 1e-10).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
    }
}
