//! Planar domains: discs, moons between internally tangent circles, truncated
//! planes and finite unions of circle/wedge constrained pieces.
//!
//! Membership is strict: a point closer than [`GEOM_TOL`] to the boundary is
//! reported as a non-member. Every shape is also exposed as a list of pieces
//! (intersections of elementary constraints) so the quadrature engine can slice
//! it along vertical lines.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance under which a point is treated as lying on the boundary.
pub const GEOM_TOL: f64 = 1e-12;

/// Relative tolerance accepted when checking internal tangency of two circles.
pub const TANGENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Self { center, radius }
    }

    pub fn point_at(&self, t: f64) -> Complex64 {
        self.center + Complex64::from_polar(self.radius, t)
    }

    /// Half-height of the chord cut by the vertical line through `x`.
    fn half_chord(&self, x: f64) -> Option<f64> {
        let dx = x - self.center.re;
        let h2 = self.radius * self.radius - dx * dx;
        (h2 > 0.0).then(|| h2.sqrt())
    }
}

/// Elementary constraint. Wedges are symmetric about the positive real axis
/// with apex at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    InsideCircle(Circle),
    OutsideCircle(Circle),
    /// `|arg z| <= half_angle`, with `0 < half_angle < pi/2`.
    InWedge(f64),
    /// `|arg z| > half_angle`.
    OutWedge(f64),
}

impl Constraint {
    /// Signed distance to the constraint boundary, positive on the admissible side.
    pub fn margin(&self, z: Complex64) -> f64 {
        match *self {
            Constraint::InsideCircle(c) => c.radius - (z - c.center).norm(),
            Constraint::OutsideCircle(c) => (z - c.center).norm() - c.radius,
            Constraint::InWedge(beta) => wedge_margin(z, beta),
            Constraint::OutWedge(beta) => -wedge_margin(z, beta),
        }
    }

    /// Admissible part of the vertical line through `x`, as sorted disjoint intervals.
    pub fn slice(&self, x: f64) -> Vec<(f64, f64)> {
        let full = vec![(f64::NEG_INFINITY, f64::INFINITY)];
        match *self {
            Constraint::InsideCircle(c) => match c.half_chord(x) {
                Some(h) => vec![(c.center.im - h, c.center.im + h)],
                None => Vec::new(),
            },
            Constraint::OutsideCircle(c) => match c.half_chord(x) {
                Some(h) => vec![
                    (f64::NEG_INFINITY, c.center.im - h),
                    (c.center.im + h, f64::INFINITY),
                ],
                None => full,
            },
            Constraint::InWedge(beta) => {
                if x > 0.0 {
                    let h = x * beta.tan();
                    vec![(-h, h)]
                } else {
                    Vec::new()
                }
            }
            Constraint::OutWedge(beta) => {
                if x > 0.0 {
                    let h = x * beta.tan();
                    vec![(f64::NEG_INFINITY, -h), (h, f64::INFINITY)]
                } else {
                    full
                }
            }
        }
    }
}

fn wedge_margin(z: Complex64, beta: f64) -> f64 {
    let r = z.norm();
    if r == 0.0 {
        return 0.0;
    }
    let gap = beta - z.arg().abs();
    if gap.abs() >= PI / 2.0 {
        r * gap.signum()
    } else {
        r * gap.sin()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl BoundingBox {
    fn of_circle(c: &Circle) -> Self {
        Self {
            x_min: c.center.re - c.radius,
            x_max: c.center.re + c.radius,
            y_min: c.center.im - c.radius,
            y_max: c.center.im + c.radius,
        }
    }

    fn union(&self, o: &Self) -> Self {
        Self {
            x_min: self.x_min.min(o.x_min),
            x_max: self.x_max.max(o.x_max),
            y_min: self.y_min.min(o.y_min),
            y_max: self.y_max.max(o.y_max),
        }
    }

    fn intersect(&self, o: &Self) -> Self {
        Self {
            x_min: self.x_min.max(o.x_min),
            x_max: self.x_max.min(o.x_max),
            y_min: self.y_min.max(o.y_min),
            y_max: self.y_max.min(o.y_max),
        }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.x_min + self.x_max),
            0.5 * (self.y_min + self.y_max),
        )
    }

    pub fn half_diagonal(&self) -> f64 {
        0.5 * (self.x_max - self.x_min).hypot(self.y_max - self.y_min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Disc(Circle),
    /// Outer disc minus the closed inner disc; the circles are internally tangent.
    Moon { outer: Circle, inner: Circle },
    /// The disc `|z| < radius`, standing in for the whole plane.
    TruncatedPlane { radius: f64 },
    /// Union of pieces, each the intersection of its constraints. Every piece
    /// must contain at least one `InsideCircle` constraint.
    ArcRegion { pieces: Vec<Vec<Constraint>> },
}

/// A bounded planar domain with its cached bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    shape: Shape,
    bbox: BoundingBox,
    boundary: Vec<BoundaryArc>,
}

impl Domain {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("disc radius {radius} must be positive")));
        }
        Ok(Self::from_shape(Shape::Disc(Circle::new(center, radius))))
    }

    pub fn unit_disc() -> Self {
        Self::from_shape(Shape::Disc(Circle::new(Complex64::new(0.0, 0.0), 1.0)))
    }

    /// A moon domain; fails unless the inner circle is internally tangent to the outer one.
    pub fn moon(outer: Circle, inner: Circle) -> Result<Self> {
        if !(outer.radius > 0.0 && inner.radius > 0.0) {
            return Err(Error::InvalidDomain("moon radii must be positive".into()));
        }
        if inner.radius >= outer.radius {
            return Err(Error::InvalidDomain(
                "inner radius must be smaller than outer radius".into(),
            ));
        }
        let gap = tangency_gap(&outer, &inner);
        if gap.abs() > TANGENCY_TOL * outer.radius {
            return Err(Error::TangencyNotFound { gap });
        }
        Ok(Self::from_shape(Shape::Moon { outer, inner }))
    }

    pub fn truncated_plane(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidDomain(format!("truncation radius {radius} must be positive")));
        }
        Ok(Self::from_shape(Shape::TruncatedPlane { radius }))
    }

    pub fn arc_region(pieces: Vec<Vec<Constraint>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidDomain("arc region needs at least one piece".into()));
        }
        for piece in &pieces {
            if !piece.iter().any(|c| matches!(c, Constraint::InsideCircle(_))) {
                return Err(Error::InvalidDomain(
                    "every arc-region piece needs a bounding inside-circle constraint".into(),
                ));
            }
            for c in piece {
                match *c {
                    Constraint::InsideCircle(ci) | Constraint::OutsideCircle(ci)
                        if !(ci.radius > 0.0) =>
                    {
                        return Err(Error::InvalidDomain("circle radius must be positive".into()))
                    }
                    Constraint::InWedge(b) | Constraint::OutWedge(b)
                        if !(b > 0.0 && b < PI / 2.0) =>
                    {
                        return Err(Error::InvalidDomain(format!(
                            "wedge half-angle {b} must lie in (0, pi/2)"
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(Self::from_shape(Shape::ArcRegion { pieces }))
    }

    fn from_shape(shape: Shape) -> Self {
        let pieces = shape_pieces(&shape);
        let bbox = pieces
            .iter()
            .map(|piece| {
                piece
                    .iter()
                    .filter_map(|c| match c {
                        Constraint::InsideCircle(ci) => Some(BoundingBox::of_circle(ci)),
                        _ => None,
                    })
                    .reduce(|a, b| a.intersect(&b))
                    .expect("validated piece has an inside-circle constraint")
            })
            .reduce(|a, b| a.union(&b))
            .expect("at least one piece");
        let boundary = match shape {
            Shape::ArcRegion { .. } => boundary_arcs(&pieces, &bbox),
            _ => Vec::new(),
        };
        Self { shape, bbox, boundary }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bounding_box(&self) -> BoundingBox {
        self.bbox
    }

    /// The shape as a union of constraint intersections.
    pub fn pieces(&self) -> Vec<Vec<Constraint>> {
        shape_pieces(&self.shape)
    }

    /// Strict membership; points within [`GEOM_TOL`] of the boundary are excluded.
    pub fn contains(&self, z: Complex64) -> bool {
        if !self.bbox.contains(z) {
            return false;
        }
        match &self.shape {
            Shape::Disc(c) => (z - c.center).norm() < c.radius - GEOM_TOL,
            Shape::Moon { outer, inner } => {
                (z - outer.center).norm() < outer.radius - GEOM_TOL
                    && (z - inner.center).norm() > inner.radius + GEOM_TOL
            }
            Shape::TruncatedPlane { radius } => z.norm() < radius - GEOM_TOL,
            Shape::ArcRegion { pieces } => {
                self.raw_contains(pieces, z) && self.boundary_distance(z) > GEOM_TOL
            }
        }
    }

    fn raw_contains(&self, pieces: &[Vec<Constraint>], z: Complex64) -> bool {
        pieces
            .iter()
            .any(|piece| piece.iter().all(|c| c.margin(z) > 0.0))
    }

    /// Euclidean distance from `z` to the boundary; zero outside the closure.
    pub fn boundary_distance(&self, z: Complex64) -> f64 {
        match &self.shape {
            Shape::Disc(c) => (c.radius - (z - c.center).norm()).max(0.0),
            Shape::Moon { outer, inner } => {
                let d_out = outer.radius - (z - outer.center).norm();
                let d_in = (z - inner.center).norm() - inner.radius;
                d_out.min(d_in).max(0.0)
            }
            Shape::TruncatedPlane { radius } => (radius - z.norm()).max(0.0),
            Shape::ArcRegion { pieces } => {
                if !self.raw_contains(pieces, z) {
                    return 0.0;
                }
                self.boundary
                    .iter()
                    .map(|arc| arc.distance(z))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Distance from `z` to the closed domain; zero for points of the closure.
    pub fn exterior_distance(&self, z: Complex64) -> f64 {
        match &self.shape {
            Shape::Disc(c) => ((z - c.center).norm() - c.radius).max(0.0),
            Shape::Moon { outer, inner } => {
                let beyond = (z - outer.center).norm() - outer.radius;
                let hole = inner.radius - (z - inner.center).norm();
                beyond.max(hole).max(0.0)
            }
            Shape::TruncatedPlane { radius } => (z.norm() - radius).max(0.0),
            Shape::ArcRegion { pieces } => {
                if self.raw_contains(pieces, z) {
                    return 0.0;
                }
                self.boundary
                    .iter()
                    .map(|arc| arc.distance(z))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Every circle appearing in a constraint.
    pub fn circles(&self) -> Vec<Circle> {
        let mut out: Vec<Circle> = Vec::new();
        for c in self.pieces().iter().flatten() {
            if let Constraint::InsideCircle(ci) | Constraint::OutsideCircle(ci) = *c {
                if !out.contains(&ci) {
                    out.push(ci);
                }
            }
        }
        out
    }

    /// Breakpoints in `x` where the topology or smoothness of vertical slices changes.
    pub fn x_breakpoints(&self) -> Vec<f64> {
        let pieces = self.pieces();
        let mut circles = Vec::new();
        let mut wedges = Vec::new();
        for c in pieces.iter().flatten() {
            match *c {
                Constraint::InsideCircle(ci) | Constraint::OutsideCircle(ci) => circles.push(ci),
                Constraint::InWedge(b) | Constraint::OutWedge(b) => wedges.push(b),
            }
        }
        let mut xs = vec![self.bbox.x_min, self.bbox.x_max];
        xs.extend(circle_breakpoints(&circles));
        if !wedges.is_empty() {
            xs.push(0.0);
            for &b in &wedges {
                for ci in &circles {
                    for s in ray_circle_params(b, ci).into_iter().chain(ray_circle_params(-b, ci)) {
                        xs.push(s * b.cos());
                    }
                }
            }
        }
        finalize_breaks(xs, self.bbox.x_min, self.bbox.x_max)
    }

    /// The domain's part of the vertical line through `x`.
    pub fn vertical_slice(&self, x: f64) -> Vec<(f64, f64)> {
        let mut acc: Vec<(f64, f64)> = Vec::new();
        for piece in self.pieces() {
            let mut cur = vec![(f64::NEG_INFINITY, f64::INFINITY)];
            for c in &piece {
                cur = intersect_intervals(&cur, &c.slice(x));
                if cur.is_empty() {
                    break;
                }
            }
            acc = union_intervals(&acc, &cur);
        }
        acc
    }
}

fn shape_pieces(shape: &Shape) -> Vec<Vec<Constraint>> {
    match shape {
        Shape::Disc(c) => vec![vec![Constraint::InsideCircle(*c)]],
        Shape::Moon { outer, inner } => vec![vec![
            Constraint::InsideCircle(*outer),
            Constraint::OutsideCircle(*inner),
        ]],
        Shape::TruncatedPlane { radius } => vec![vec![Constraint::InsideCircle(Circle::new(
            Complex64::new(0.0, 0.0),
            *radius,
        ))]],
        Shape::ArcRegion { pieces } => pieces.clone(),
    }
}

/// `|c_in - c_out| + r_in - r_out`; zero for internal tangency.
pub fn tangency_gap(outer: &Circle, inner: &Circle) -> f64 {
    (inner.center - outer.center).norm() + inner.radius - outer.radius
}

/// Sorted, deduplicated breakpoints clipped to `[lo, hi]`.
pub(crate) fn finalize_breaks(mut xs: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    xs.retain(|x| x.is_finite());
    for x in xs.iter_mut() {
        *x = x.clamp(lo, hi);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = (hi - lo).abs().max(1e-300);
    let mut out: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        if out.last().is_none_or(|&l| x - l > 1e-13 * scale) {
            out.push(x);
        }
    }
    out
}

/// Extreme abscissae of each circle and abscissae of pairwise intersections.
pub(crate) fn circle_breakpoints(circles: &[Circle]) -> Vec<f64> {
    let mut xs = Vec::new();
    for (i, a) in circles.iter().enumerate() {
        xs.push(a.center.re - a.radius);
        xs.push(a.center.re + a.radius);
        for b in &circles[i + 1..] {
            for p in circle_intersections(a, b) {
                xs.push(p.re);
            }
        }
    }
    xs
}

/// Intersection points of two circles; a tangency yields a single point.
pub fn circle_intersections(a: &Circle, b: &Circle) -> Vec<Complex64> {
    let d_vec = b.center - a.center;
    let d = d_vec.norm();
    if d == 0.0 {
        return Vec::new();
    }
    let scale = a.radius.max(b.radius);
    if d > a.radius + b.radius + 1e-12 * scale || d < (a.radius - b.radius).abs() - 1e-12 * scale {
        return Vec::new();
    }
    let along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    let h2 = a.radius * a.radius - along * along;
    let u = d_vec / d;
    let base = a.center + u * along;
    if h2 <= 1e-24 * scale * scale {
        return vec![base];
    }
    let h = h2.sqrt();
    let perp = Complex64::new(-u.im, u.re);
    vec![base + perp * h, base - perp * h]
}

/// Distances `s >= 0` along the ray `s e^{i theta}` where it meets the circle.
fn ray_circle_params(theta: f64, c: &Circle) -> Vec<f64> {
    let u = Complex64::from_polar(1.0, theta);
    // |s u - c|^2 = r^2  =>  s^2 - 2 s Re(conj(u) c) + |c|^2 - r^2 = 0
    let b = (u.conj() * c.center).re;
    let disc = b * b - (c.center.norm_sqr() - c.radius * c.radius);
    if disc < 0.0 {
        return Vec::new();
    }
    let root = disc.sqrt();
    [b - root, b + root].into_iter().filter(|&s| s >= 0.0).collect()
}

pub(crate) fn intersect_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if hi > lo {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

pub(crate) fn union_intervals(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut all: Vec<(f64, f64)> = a.iter().chain(b.iter()).copied().collect();
    all.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(all.len());
    for iv in all {
        match out.last_mut() {
            Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
            _ => out.push(iv),
        }
    }
    out
}

/// A piece of the true boundary of an arc region.
#[derive(Debug, Clone, Copy, PartialEq)]
enum BoundaryArc {
    Circle { circle: Circle, t0: f64, t1: f64 },
    Segment { a: Complex64, b: Complex64 },
}

impl BoundaryArc {
    fn distance(&self, z: Complex64) -> f64 {
        match *self {
            BoundaryArc::Circle { circle, t0, t1 } => {
                let rel = z - circle.center;
                let t = rel.arg().rem_euclid(TAU);
                let span = t1 - t0;
                if (t - t0).rem_euclid(TAU) <= span {
                    (rel.norm() - circle.radius).abs()
                } else {
                    (z - circle.point_at(t0)).norm().min((z - circle.point_at(t1)).norm())
                }
            }
            BoundaryArc::Segment { a, b } => {
                let ab = b - a;
                let t = (((z - a) * ab.conj()).re / ab.norm_sqr()).clamp(0.0, 1.0);
                (z - (a + ab * t)).norm()
            }
        }
    }
}

/// Splits every constraint curve at its intersections with the others and keeps
/// the sub-arcs that separate the region from its complement.
fn boundary_arcs(pieces: &[Vec<Constraint>], bbox: &BoundingBox) -> Vec<BoundaryArc> {
    let mut circles = Vec::new();
    let mut rays = Vec::new();
    for c in pieces.iter().flatten() {
        match *c {
            Constraint::InsideCircle(ci) | Constraint::OutsideCircle(ci) => {
                if !circles.contains(&ci) {
                    circles.push(ci)
                }
            }
            Constraint::InWedge(b) | Constraint::OutWedge(b) => {
                for th in [b, -b] {
                    if !rays.contains(&th) {
                        rays.push(th)
                    }
                }
            }
        }
    }
    let reach = bbox
        .x_min
        .abs()
        .max(bbox.x_max.abs())
        .hypot(bbox.y_min.abs().max(bbox.y_max.abs()))
        * 1.01;
    let scale = bbox.half_diagonal().max(1e-300);
    let eps = 1e-7 * scale;
    let inside = |z: Complex64| {
        pieces
            .iter()
            .any(|piece| piece.iter().all(|c| c.margin(z) > 0.0))
    };
    let is_boundary = |p: Complex64, normal: Complex64| inside(p + normal * eps) != inside(p - normal * eps);

    let mut arcs = Vec::new();
    for (i, ci) in circles.iter().enumerate() {
        let mut ts: Vec<f64> = Vec::new();
        for (j, cj) in circles.iter().enumerate() {
            if i != j {
                for p in circle_intersections(ci, cj) {
                    ts.push((p - ci.center).arg().rem_euclid(TAU));
                }
            }
        }
        for &th in &rays {
            for s in ray_circle_params(th, ci) {
                let p = Complex64::from_polar(s, th);
                ts.push((p - ci.center).arg().rem_euclid(TAU));
            }
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        if ts.is_empty() {
            ts.push(0.0);
        }
        let n = ts.len();
        for k in 0..n {
            let t0 = ts[k];
            let t1 = if k + 1 < n { ts[k + 1] } else { ts[0] + TAU };
            if t1 - t0 < 1e-14 {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let p = ci.point_at(tm);
            let normal = Complex64::from_polar(1.0, tm);
            if is_boundary(p, normal) {
                arcs.push(BoundaryArc::Circle { circle: *ci, t0, t1 });
            }
        }
    }
    for &th in &rays {
        let u = Complex64::from_polar(1.0, th);
        let mut ss = vec![0.0, reach];
        for ci in &circles {
            ss.extend(ray_circle_params(th, ci));
        }
        ss.retain(|&s| s <= reach);
        ss.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ss.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let normal = Complex64::new(-u.im, u.re);
        for w in ss.windows(2) {
            let p = u * (0.5 * (w[0] + w[1]));
            if is_boundary(p, normal) {
                arcs.push(BoundaryArc::Segment { a: u * w[0], b: u * w[1] });
            }
        }
    }
    arcs
}

/// Output of [`moon_tangency`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tangency {
    /// The multiple boundary point shared by both circles.
    pub q: Complex64,
    /// Constant with `d(z) >= c |z - q|^2` on the probe circle.
    pub c: f64,
    /// Smallest sampled ratio `d(z) / |z - q|^2`; `c` is this times [`TANGENCY_SAFETY`].
    pub min_ratio: f64,
    pub probe: Circle,
    pub samples: usize,
}

/// Factor applied to the sampled minimum so the bound also holds between samples.
pub const TANGENCY_SAFETY: f64 = 0.99;

/// Number of probe-circle samples used by [`moon_tangency`].
pub const TANGENCY_SAMPLES: usize = 10_000;

/// Default probe radius: midway between the inner and outer radii.
pub fn default_probe_radius(outer: &Circle, inner: &Circle) -> f64 {
    0.5 * (outer.radius + inner.radius)
}

/// Probe circle of the given radius, internally tangent to the outer circle at `q`.
pub fn probe_circle(outer: &Circle, q: Complex64, radius: f64) -> Circle {
    let u = (q - outer.center) / (q - outer.center).norm();
    Circle::new(q - u * radius, radius)
}

/// Locates the tangency point of a moon and a constant `C` with
/// `d(z) >= C |z - Q|^2` on a probe circle through `Q`.
pub fn moon_tangency(moon: &Domain, probe_radius: Option<f64>) -> Result<Tangency> {
    let Shape::Moon { outer, inner } = moon.shape() else {
        return Err(Error::InvalidDomain("moon_tangency needs a moon domain".into()));
    };
    let gap = tangency_gap(outer, inner);
    let offset = inner.center - outer.center;
    if gap.abs() > TANGENCY_TOL * outer.radius || offset.norm() == 0.0 {
        return Err(Error::TangencyNotFound { gap });
    }
    let u = offset / offset.norm();
    let q = outer.center + u * outer.radius;
    let rho = probe_radius.unwrap_or_else(|| default_probe_radius(outer, inner));
    if !(rho > inner.radius && rho < outer.radius) {
        return Err(Error::InvalidParameters(format!(
            "probe radius {rho} must lie strictly between {} and {}",
            inner.radius, outer.radius
        )));
    }
    let probe = probe_circle(outer, q, rho);
    let base = (q - probe.center).arg();
    let mut min_ratio = f64::INFINITY;
    for k in 0..TANGENCY_SAMPLES {
        let t = base + TAU * (k as f64 + 0.5) / TANGENCY_SAMPLES as f64;
        let z = probe.point_at(t);
        let ratio = moon.boundary_distance(z) / (z - q).norm_sqr();
        min_ratio = min_ratio.min(ratio);
    }
    if !(min_ratio > 1e-12) {
        return Err(Error::NoValidC { min_ratio });
    }
    Ok(Tangency {
        q,
        c: TANGENCY_SAFETY * min_ratio,
        min_ratio,
        probe,
        samples: TANGENCY_SAMPLES,
    })
}
