//! Least-squares polynomial approximation in `H^2(Omega, e^{-phi})`.
//!
//! Everything works in the basis `t^k` with `t = (z - p) / s`. A converged
//! quadrature grid turns the weighted norm into a discrete one, and the
//! discrete problem is solved by Householder QR on the rows
//! `sqrt(w_i e^{-phi(z_i)}) [t_i^0 .. t_i^N | f(z_i)]`. The last column of `R`
//! holds `Q^H f` and the residual, which gives every distance `d_0 .. d_N` at once.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::poly::Polynomial;
use crate::quad::{neumaier_sum, resolve_points, weighted_points, GridPlan, QuadSettings, QuadratureGrid};
use crate::weights::Weight;

const ROWS_PER_BLOCK: usize = 2048;

/// Center `p` and scale `s` of the basis `((z - p) / s)^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub center: Complex64,
    pub scale: f64,
}

impl Frame {
    pub fn new(center: Complex64, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameters(format!("scale {scale} must be positive")));
        }
        Ok(Self { center, scale })
    }

    /// Area centroid of the domain and half its bounding-box diagonal.
    pub fn for_domain(domain: &Domain) -> Self {
        let scale = domain.bounding_box().half_diagonal();
        let center = GridPlan::new(domain, &[], &[], 8)
            .map(|plan| {
                let nodes = plan.nodes(2);
                let area = neumaier_sum(nodes.iter().map(|n| n.w));
                let cx = neumaier_sum(nodes.iter().map(|n| n.w * n.z.re));
                let cy = neumaier_sum(nodes.iter().map(|n| n.w * n.z.im));
                Complex64::new(cx / area, cy / area)
            })
            .unwrap_or_else(|_| domain.bounding_box().center());
        Self { center, scale }
    }

    fn t(&self, z: Complex64) -> Complex64 {
        (z - self.center) / self.scale
    }
}

/// A function to approximate, with the points where it is singular.
pub struct Target<'a> {
    f: Box<dyn Fn(Complex64) -> Complex64 + Send + Sync + 'a>,
    singular: Vec<Complex64>,
}

impl<'a> Target<'a> {
    pub fn new<F: Fn(Complex64) -> Complex64 + Send + Sync + 'a>(f: F) -> Self {
        Self {
            f: Box::new(f),
            singular: Vec::new(),
        }
    }

    pub fn with_singular(mut self, points: &[Complex64]) -> Self {
        self.singular.extend_from_slice(points);
        self
    }

    pub fn polynomial(p: Polynomial) -> Target<'static> {
        Target::new(move |z| p.eval(z))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.f)(z)
    }

    pub fn singular_points(&self) -> &[Complex64] {
        &self.singular
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BergmanSettings {
    /// `quad.tol` is the relative tolerance for grid convergence.
    pub quad: QuadSettings,
    /// Condition estimates of the Gram matrix above this are flagged.
    pub cond_limit: f64,
}

impl Default for BergmanSettings {
    fn default() -> Self {
        Self {
            quad: QuadSettings::default(),
            cond_limit: 1e14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub frame: Frame,
    pub degree: usize,
    pub matrix: DMatrix<Complex64>,
    pub cond_estimate: f64,
    pub ill_conditioned: bool,
    pub positive_definite: bool,
    /// Bound on the quadrature error of each entry `G[j][k]`, relative to `sqrt(G[j][j] G[k][k])`.
    pub error_budget: f64,
}

#[derive(Debug, Clone)]
pub struct ApproximationResult {
    pub degree: usize,
    pub poly: Polynomial,
    pub distance: f64,
    /// Lowest degree present in `history`; nonzero only for jet-constrained fits.
    pub first_degree: usize,
    /// `history[i]` is the distance at degree `first_degree + i`.
    pub history: Vec<f64>,
    /// Error budget for each entry of `history`.
    pub budgets: Vec<f64>,
    pub error_budget: f64,
    pub norm: f64,
    pub cond_estimate: f64,
    pub ill_conditioned: bool,
    pub grid_level: u32,
    pub grid_nodes: usize,
}

impl ApproximationResult {
    pub fn distance_at(&self, degree: usize) -> Option<f64> {
        degree.checked_sub(self.first_degree).and_then(|i| self.history.get(i).copied())
    }
}

/// Per-node data of a converged grid.
struct Discrete {
    t: Vec<Complex64>,
    /// `sqrt(w_i e^{-phi(z_i)})`.
    rw: Vec<f64>,
    /// `Q(z_i)`, or 1 without a divisor.
    q: Vec<Complex64>,
    f: Vec<Complex64>,
    level: u32,
    eps: f64,
}

fn zero_order(q: &Polynomial, z: Complex64) -> usize {
    let local = q.rebase(z, 1.0);
    let c = local.scaled_coefficients();
    let big = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    c.iter().take_while(|x| x.norm() <= 1e-10 * big).count()
}

fn check_weight(domain: &Domain, weight: &Weight, divisor: Option<&Polynomial>) -> Result<()> {
    let tol = 1e-12 * domain.bounding_box().half_diagonal();
    for (z, a) in weight.singular_points() {
        let reduced = a - 2.0 * divisor.map(|q| zero_order(q, z)).unwrap_or(0) as f64;
        if reduced >= 2.0 && domain.exterior_distance(z) <= tol {
            return Err(Error::DegenerateWeight(format!(
                "Lelong number {reduced} >= 2 at {z} in the closed domain"
            )));
        }
    }
    Ok(())
}

fn discretize(
    domain: &Domain,
    weight: &Weight,
    frame: &Frame,
    degree: usize,
    target: Option<&Target>,
    divisor: Option<&Polynomial>,
    settings: &BergmanSettings,
) -> Result<Discrete> {
    check_weight(domain, weight, divisor)?;
    let dens = |z: Complex64| {
        let q = divisor.map(|q| q.eval(z).norm_sqr()).unwrap_or(1.0);
        q * weight.density(z)
    };
    let fsq = |z: Complex64| target.map(|t| t.eval(z).norm_sqr()).unwrap_or(0.0);

    let mut points = weighted_points(weight, target.map(|t| t.singular_points()).unwrap_or(&[]));
    if divisor.is_some() {
        for p in points.iter_mut() {
            p.order = None;
        }
    }
    let combined = |z: Complex64| Complex64::new(dens(z) * (1.0 + fsq(z)), 0.0);
    let resolved = resolve_points(domain, &combined, &points)?;
    let plan = GridPlan::new(domain, &resolved, &weight.kink_lines(), settings.quad.rule_order)?;

    let n2 = 2 * degree as u32;
    let p_dens = |z: Complex64| dens(z);
    let p_mono = |z: Complex64| frame.t(z).norm().powi(n2 as i32) * dens(z);
    let p_f = |z: Complex64| fsq(z) * dens(z);
    let mut probes: Vec<&(dyn Fn(Complex64) -> f64 + Sync)> = vec![&p_dens, &p_mono];
    if target.is_some() {
        probes.push(&p_f);
    }
    let grid = QuadratureGrid::build(&plan, &probes, settings.quad.tol, &settings.quad)?;

    let rows: Vec<(Complex64, f64, Complex64, Complex64)> = grid
        .nodes
        .par_iter()
        .map(|n| {
            let rw = (n.w * weight.density(n.z)).sqrt();
            let q = divisor.map(|q| q.eval(n.z)).unwrap_or(Complex64::new(1.0, 0.0));
            let f = target.map(|t| t.eval(n.z)).unwrap_or_default();
            (frame.t(n.z), rw, q, f)
        })
        .collect();
    if let Some(bad) = rows.iter().find(|r| !(r.1.is_finite() && r.3.re.is_finite() && r.3.im.is_finite())) {
        return Err(Error::NonIntegrableSingularity {
            point: bad.0 * frame.scale + frame.center,
            order: f64::INFINITY,
        });
    }
    Ok(Discrete {
        t: rows.iter().map(|r| r.0).collect(),
        rw: rows.iter().map(|r| r.1).collect(),
        q: rows.iter().map(|r| r.2).collect(),
        f: rows.iter().map(|r| r.3).collect(),
        level: grid.level,
        eps: grid.error_estimate,
    })
}

/// Householder QR of a column-major `m x n` block; returns the `n x n` upper factor.
fn householder_r(a: &mut [Complex64], m: usize, n: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    for j in 0..n.min(m) {
        // Work with the column scaled by its largest entry; graded nodes make
        // entries small enough for plain squares to underflow.
        let sc = (j..m).map(|i| a[i + j * m].norm()).fold(0.0, f64::max);
        if !(sc > 0.0 && sc.is_finite()) {
            continue;
        }
        for i in j..m {
            a[i + j * m] /= sc;
        }
        let norm_sq: f64 = (j..m).map(|i| a[i + j * m].norm_sqr()).sum();
        let norm = norm_sq.sqrt();
        let x0 = a[j + j * m];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * norm;
        let v0 = x0 - alpha;
        let vnorm_sq = norm_sq - x0.norm_sqr() + v0.norm_sqr();
        a[j + j * m] = v0;
        for c in j + 1..n {
            let mut s = zero;
            for i in j..m {
                s += a[i + j * m].conj() * a[i + c * m];
            }
            let s = s * (2.0 / vnorm_sq);
            for i in j..m {
                let vi = a[i + j * m];
                a[i + c * m] -= vi * s;
            }
        }
        let alpha = alpha * sc;
        a[j + j * m] = alpha;
        for i in j + 1..m {
            a[i + j * m] = zero;
        }
    }
    let mut r = vec![zero; n * n];
    for c in 0..n {
        for i in 0..=c.min(m.saturating_sub(1)) {
            if i < m {
                r[i + c * n] = a[i + c * m];
            }
        }
    }
    r
}

/// `R` factor of the `rows x n` matrix whose row `i` is produced by `fill`.
/// Blocks are factored in parallel and merged in a fixed order. The diagonal is
/// made real and nonnegative.
fn tsqr<F>(rows: usize, n: usize, fill: F) -> Vec<Complex64>
where
    F: Fn(usize, &mut [Complex64]) + Sync,
{
    let blocks: Vec<(usize, usize)> = (0..rows)
        .step_by(ROWS_PER_BLOCK)
        .map(|s| (s, (s + ROWS_PER_BLOCK).min(rows)))
        .collect();
    let partial: Vec<Vec<Complex64>> = blocks
        .par_iter()
        .map(|&(s, e)| {
            let m = e - s;
            let mut a = vec![Complex64::new(0.0, 0.0); m * n];
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..m {
                fill(s + i, &mut row);
                for (c, v) in row.iter().enumerate() {
                    a[i + c * m] = *v;
                }
            }
            householder_r(&mut a, m, n)
        })
        .collect();
    let mut r = vec![Complex64::new(0.0, 0.0); n * n];
    for p in partial {
        let m = 2 * n;
        let mut a = vec![Complex64::new(0.0, 0.0); m * n];
        for c in 0..n {
            for i in 0..n {
                a[i + c * m] = r[i + c * n];
                a[n + i + c * m] = p[i + c * n];
            }
        }
        r = householder_r(&mut a, m, n);
    }
    for i in 0..n {
        let d = r[i + i * n];
        if d.norm() > 0.0 {
            let ph = d.conj() / d.norm();
            for c in i..n {
                r[i + c * n] *= ph;
            }
        }
    }
    r
}

fn cond_of_r(r: &[Complex64], n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if r.iter().any(|x| !(x.re.is_finite() && x.im.is_finite())) {
        return f64::INFINITY;
    }
    let m = DMatrix::from_fn(n, n, |i, j| r[i + j * n]);
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let c = max / min;
    if c.is_finite() { c * c } else { f64::INFINITY }
}

/// Solve the upper-triangular system `R[..k, ..k] x = b`.
fn back_substitute(r: &[Complex64], n: usize, k: usize, b: &[Complex64]) -> Vec<Complex64> {
    let mut x = vec![Complex64::new(0.0, 0.0); k];
    for i in (0..k).rev() {
        let mut s = b[i];
        for j in i + 1..k {
            s -= r[i + j * n] * x[j];
        }
        let d = r[i + i * n];
        x[i] = if d.norm() > 0.0 { s / d } else { Complex64::new(0.0, 0.0) };
    }
    x
}

/// `G[j][k] = <t^j, t^k>` for `j, k <= n`.
pub fn gram_matrix(domain: &Domain, weight: &Weight, frame: &Frame, n: usize, settings: &BergmanSettings) -> Result<GramMatrix> {
    let d = discretize(domain, weight, frame, n, None, None, settings)?;
    let k = n + 1;
    let chunks: Vec<Vec<Complex64>> = d
        .t
        .par_chunks(ROWS_PER_BLOCK)
        .zip(d.rw.par_chunks(ROWS_PER_BLOCK))
        .map(|(ts, rws)| {
            let mut g = vec![Complex64::new(0.0, 0.0); k * k];
            let mut pw = vec![Complex64::new(0.0, 0.0); k];
            for (t, rw) in ts.iter().zip(rws) {
                let mut v = Complex64::new(*rw, 0.0);
                for e in pw.iter_mut() {
                    *e = v;
                    v *= t;
                }
                for a in 0..k {
                    for b in a..k {
                        g[a + b * k] += pw[a] * pw[b].conj();
                    }
                }
            }
            g
        })
        .collect();
    let mut g = vec![Complex64::new(0.0, 0.0); k * k];
    for c in chunks {
        for (x, y) in g.iter_mut().zip(c) {
            *x += y;
        }
    }
    let matrix = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            Complex64::new(g[i + i * k].re, 0.0)
        } else if i < j {
            g[i + j * k]
        } else {
            g[j + i * k].conj()
        }
    });
    let positive_definite = matrix.clone().cholesky().is_some();
    let r = tsqr(d.t.len(), k, |i, row| {
        let mut v = Complex64::new(d.rw[i], 0.0);
        for e in row.iter_mut() {
            *e = v;
            v *= d.t[i];
        }
    });
    let cond = cond_of_r(&r, k);
    Ok(GramMatrix {
        frame: *frame,
        degree: n,
        matrix,
        cond_estimate: cond,
        ill_conditioned: cond > settings.cond_limit,
        positive_definite,
        error_budget: d.eps,
    })
}

fn distance_budget(eps: f64, norm: f64, d: f64, k: usize) -> f64 {
    let quad = if d > 0.0 {
        (2.0 * eps).sqrt().min(2.0 * eps * norm / d) * norm
    } else {
        (2.0 * eps).sqrt() * norm
    };
    quad + 1e-14 * (k as f64 + 1.0) * norm
}

/// Least squares with a fixed part: minimize over the free coefficients the
/// distance from `f - sum_{k<first} fixed_k t^k` to `span{ Q t^k : first <= k <= n }`.
fn solve(
    d: &Discrete,
    frame: &Frame,
    first: usize,
    n: usize,
    fixed: &[Complex64],
    divisor: Option<&Polynomial>,
    settings: &BergmanSettings,
) -> ApproximationResult {
    let free = n + 1 - first;
    let cols = free + 1;
    let r = tsqr(d.t.len(), cols, |i, row| {
        let rw = d.rw[i];
        let t = d.t[i];
        let mut v = d.q[i] * rw * t.powu(first as u32);
        for e in row.iter_mut().take(free) {
            *e = v;
            v *= t;
        }
        let fixed_val = fixed.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c);
        row[free] = (d.f[i] - fixed_val) * rw;
    });
    let c: Vec<Complex64> = (0..free).map(|i| r[i + free * cols]).collect();
    let rho = r[free + free * cols].norm();
    // after_cols[j]: residual with the first j free columns in use
    let mut after_cols = vec![0.0; free + 1];
    let mut acc = rho * rho;
    after_cols[free] = rho;
    for j in (0..free).rev() {
        acc += c[j].norm_sqr();
        after_cols[j] = acc.sqrt();
    }
    let norm = after_cols[0];
    let (first_degree, history) = if first == 0 {
        (0, after_cols[1..].to_vec())
    } else {
        (first - 1, after_cols)
    };

    let x = back_substitute(&r, cols, free, &c);
    let mut coeffs = fixed.to_vec();
    coeffs.resize(first, Complex64::new(0.0, 0.0));
    coeffs.extend(x);
    let mut poly = Polynomial::new_scaled(frame.center, frame.scale, coeffs);
    if let Some(q) = divisor {
        poly = q.mul(&poly).rebase(frame.center, frame.scale);
    }
    let cond_basis = {
        let rb: Vec<Complex64> = (0..free)
            .flat_map(|j| (0..free).map(move |i| (i, j)))
            .map(|(i, j)| r[i + j * cols])
            .collect();
        if free > 0 { cond_of_r(&rb, free) } else { 1.0 }
    };
    let budgets: Vec<f64> = history
        .iter()
        .map(|&dist| distance_budget(d.eps, norm, dist, n + 1))
        .collect();
    let distance = *history.last().unwrap();
    ApproximationResult {
        degree: n,
        poly,
        distance,
        first_degree,
        error_budget: *budgets.last().unwrap(),
        history,
        budgets,
        norm,
        cond_estimate: cond_basis,
        ill_conditioned: cond_basis > settings.cond_limit,
        grid_level: d.level,
        grid_nodes: d.t.len(),
    }
}

/// Best approximation of `f` by polynomials of degree at most `n`; with a
/// divisor `Q`, by polynomials `Q R` with `deg R <= n`.
pub fn best_poly_approx(
    target: &Target,
    domain: &Domain,
    weight: &Weight,
    frame: &Frame,
    n: usize,
    divisor: Option<&Polynomial>,
    settings: &BergmanSettings,
) -> Result<ApproximationResult> {
    let d = discretize(domain, weight, frame, n, Some(target), divisor, settings)?;
    Ok(solve(&d, frame, 0, n, &[], divisor, settings))
}

/// Best approximation by degree-`n` polynomials whose Taylor coefficients at
/// `frame.center` start with `jet`.
pub fn best_poly_approx_with_jet(
    target: &Target,
    domain: &Domain,
    weight: &Weight,
    frame: &Frame,
    n: usize,
    jet: &[Complex64],
    settings: &BergmanSettings,
) -> Result<ApproximationResult> {
    if jet.is_empty() || jet.len() > n + 1 {
        return Err(Error::InvalidParameters(format!(
            "jet of length {} needs 1 <= length <= n + 1 = {}",
            jet.len(),
            n + 1
        )));
    }
    let d = discretize(domain, weight, frame, n, Some(target), None, settings)?;
    let scaled: Vec<Complex64> = jet
        .iter()
        .enumerate()
        .map(|(k, c)| c * frame.scale.powi(k as i32))
        .collect();
    Ok(solve(&d, frame, jet.len(), n, &scaled, None, settings))
}

/// Orthonormal `f_0 .. f_N` with `f_n = a_n (z - p)^n + ...`, `a_n > 0` maximal
/// within `span{(z - p)^k : n <= k <= N}`.
pub fn extremal_basis(
    domain: &Domain,
    weight: &Weight,
    frame: &Frame,
    n: usize,
    settings: &BergmanSettings,
) -> Result<Vec<Polynomial>> {
    let d = discretize(domain, weight, frame, n, None, None, settings)?;
    let k = n + 1;
    // columns t^N, t^{N-1}, ..., t^0
    let r = tsqr(d.t.len(), k, |i, row| {
        let mut v = Complex64::new(d.rw[i], 0.0);
        for e in row.iter_mut().rev() {
            *e = v;
            v *= d.t[i];
        }
    });
    let cond = cond_of_r(&r, k);
    if cond > settings.cond_limit || (0..k).any(|i| r[i + i * k].re <= 0.0) {
        return Err(Error::IllConditioned { cond });
    }
    let mut out = Vec::with_capacity(k);
    for deg in 0..k {
        let m = n - deg;
        let mut e = vec![Complex64::new(0.0, 0.0); m + 1];
        e[m] = Complex64::new(1.0, 0.0);
        let col = back_substitute(&r, k, m + 1, &e);
        // col[i] multiplies t^{N-i}
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        for (i, v) in col.into_iter().enumerate() {
            coeffs[n - i] = v;
        }
        out.push(Polynomial::new_scaled(frame.center, frame.scale, coeffs));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Decaying,
    Plateau,
    Inconclusive,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Decaying => "decaying",
            Verdict::Plateau => "plateau",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (HEURISTIC)", self.label())
    }
}

/// HEURISTIC classification of a distance sequence `d_0 .. d_N`.
///
/// Decaying: `d_N < 0.05 d_0` with last-quartile log-slope below `-0.05` per
/// degree, or `d_N` at the noise floor. Plateau: last-quartile relative change
/// under 1% with `d_N > 0.2 d_0`.
pub fn classify(distances: &[f64], floor: f64) -> Verdict {
    let Some(&last) = distances.last() else {
        return Verdict::Inconclusive;
    };
    let d0 = distances[0];
    if d0 <= 0.0 || last <= floor.max(1e-12 * d0) {
        return Verdict::Decaying;
    }
    let n = distances.len() - 1;
    let q = (n / 4).max(1).min(n);
    let start = distances[n - q];
    let slope = if start > 0.0 && last > 0.0 { (last / start).ln() / q as f64 } else { f64::NEG_INFINITY };
    if last < 0.05 * d0 && slope < -0.05 {
        return Verdict::Decaying;
    }
    if start > 0.0 && (start - last).abs() / start < 0.01 && last > 0.2 * d0 {
        return Verdict::Plateau;
    }
    Verdict::Inconclusive
}

#[derive(Debug, Clone)]
pub struct DensityScan {
    pub distances: Vec<f64>,
    pub budgets: Vec<f64>,
    pub verdict: Verdict,
    pub result: ApproximationResult,
}

/// `d_0 .. d_N` for `f`, from a single factorization at degree `N`.
pub fn density_scan(
    target: &Target,
    domain: &Domain,
    weight: &Weight,
    frame: &Frame,
    n_max: usize,
    settings: &BergmanSettings,
) -> Result<DensityScan> {
    let result = best_poly_approx(target, domain, weight, frame, n_max, None, settings)?;
    let floor = *result.budgets.last().unwrap();
    Ok(DensityScan {
        distances: result.history.clone(),
        budgets: result.budgets.clone(),
        verdict: classify(&result.history, floor),
        result,
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

    fn origin() -> Frame {
        Frame::new(c(0.0, 0.0), 1.0).unwrap()
    }

    #[test]
    fn disc_gram_is_diagonal() {
        let g = gram_matrix(&Domain::unit_disc(), &Weight::Zero, &origin(), 3, &BergmanSettings::default()).unwrap();
        for j in 0..4 {
            for k in 0..4 {
                let want = if j == k { PI / (j as f64 + 1.0) } else { 0.0 };
                assert!((g.matrix[(j, k)] - want).norm() < 1e-12, "{j} {k} {}", g.matrix[(j, k)]);
            }
        }
        assert!(g.positive_definite && !g.ill_conditioned);
    }

    #[test]
    fn log_potential_gram() {
        let w = Weight::log_potential(vec![(c(0.0, 0.0), 1.0)]).unwrap();
        let g = gram_matrix(&Domain::unit_disc(), &w, &origin(), 5, &BergmanSettings::default()).unwrap();
        for j in 0..6 {
            let want = 2.0 * PI / (2.0 * j as f64 + 1.0);
            assert!((g.matrix[(j, j)].re - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn pole_distances_follow_series() {
        let t = Target::new(|z: Complex64| 1.0 / (z - 2.0)).with_singular(&[c(2.0, 0.0)]);
        let r = best_poly_approx(&t, &Domain::unit_disc(), &Weight::Zero, &origin(), 8, None, &BergmanSettings::default())
            .unwrap();
        for n in 0..=8 {
            let want: f64 = (n + 1..200).map(|k| PI / ((k as f64 + 1.0) * 4f64.powi(k as i32 + 1))).sum::<f64>().sqrt();
            assert!((r.history[n] - want).abs() < 1e-8 * want, "n={n} {} {want}", r.history[n]);
        }
        // Taylor coefficients -1/2^{k+1}
        for k in 0..4 {
            assert!((r.poly.coefficient(k) + 0.5f64.powi(k as i32 + 1)).norm() < 1e-6);
        }
    }

    #[test]
    fn polynomial_target_has_zero_distance() {
        let t = Target::new(|z: Complex64| z * z);
        let r = best_poly_approx(&t, &Domain::unit_disc(), &Weight::Zero, &origin(), 2, None, &BergmanSettings::default())
            .unwrap();
        assert!(r.distance < 1e-12);
        let cs = r.poly.taylor_coefficients();
        assert!((cs[2] - 1.0).norm() < 1e-12 && cs[0].norm() < 1e-12 && cs[1].norm() < 1e-12);
    }

    #[test]
    fn jet_constraints() {
        let s = BergmanSettings::default();
        let d = Domain::unit_disc();
        let t = Target::new(|z: Complex64| z);
        let r = best_poly_approx_with_jet(&t, &d, &Weight::Zero, &origin(), 1, &[c(0.0, 0.0)], &s).unwrap();
        assert!(r.distance < 1e-12);
        let r = best_poly_approx_with_jet(&t, &d, &Weight::Zero, &origin(), 1, &[c(1.0, 0.0)], &s).unwrap();
        assert!((r.distance - PI.sqrt()).abs() < 1e-12);
        assert!((r.poly.coefficient(0) - 1.0).norm() < 1e-14 && (r.poly.coefficient(1) - 1.0).norm() < 1e-12);
        assert_eq!(r.first_degree, 0);
    }

    #[test]
    fn extremal_disc_basis() {
        let b = extremal_basis(&Domain::unit_disc(), &Weight::Zero, &origin(), 5, &BergmanSettings::default()).unwrap();
        for (n, f) in b.iter().enumerate() {
            let a = ((n as f64 + 1.0) / PI).sqrt();
            for k in 0..=5 {
                let want = if k == n { a } else { 0.0 };
                assert!((f.coefficient(k) - want).norm() < 1e-10, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn degenerate_weight_rejected() {
        let w = Weight::log_potential(vec![(c(0.2, 0.0), 2.0)]).unwrap();
        let t = Target::new(|_| c(1.0, 0.0));
        let r = best_poly_approx(&t, &Domain::unit_disc(), &w, &origin(), 2, None, &BergmanSettings::default());
        assert!(matches!(r, Err(Error::DegenerateWeight(_))));
        // factoring out Q = z - 0.2 leaves a bounded weight
        let q = Polynomial::from_taylor(c(0.2, 0.0), vec![c(0.0, 0.0), c(1.0, 0.0)]);
        let t = Target::new(|z: Complex64| z - 0.2);
        let r = best_poly_approx(&t, &Domain::unit_disc(), &w, &origin(), 2, Some(&q), &BergmanSettings::default())
            .unwrap();
        assert!(r.distance < 1e-10, "{}", r.distance);
    }

    #[test]
    fn verdicts() {
        let geo: Vec<f64> = (0..21).map(|n| 0.25f64.powi(n)).collect();
        assert_eq!(classify(&geo, 0.0), Verdict::Decaying);
        let flat: Vec<f64> = (0..21).map(|n| 1.0 + 0.5f64.powi(n)).collect();
        assert_eq!(classify(&flat, 0.0), Verdict::Plateau);
        let slow: Vec<f64> = (0..21).map(|n| 1.0 / (1.0 + n as f64).sqrt()).collect();
        assert_eq!(classify(&slow, 0.0), Verdict::Inconclusive);
        assert_eq!(classify(&[1.0, 0.5, 0.0], 1e-14), Verdict::Decaying);
    }

    #[test]
    fn moon_gram_is_hermitian_pd() {
        let m = Domain::moon(Circle::new(c(0.0, 0.0), 1.0), Circle::new(c(0.45, 0.0), 0.55)).unwrap();
        let g = gram_matrix(&m, &Weight::Zero, &Frame::for_domain(&m), 6, &BergmanSettings::default()).unwrap();
        assert!(g.positive_definite);
        assert_eq!(g.matrix.clone(), g.matrix.adjoint());
    }
}
