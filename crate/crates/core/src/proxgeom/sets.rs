use super::{random_in_ball, random_unit, InteriorParams, ProxSet, SeededRng};
use crate::error::{Error, Result};
use crate::tolerance::{DYKSTRA, MEMBERSHIP};
use crate::vector::Point;
use rand::Rng;
use std::f64::consts::PI;
use std::sync::Arc;

fn tol(x: &Point) -> f64 {
    MEMBERSHIP * (1.0 + x.norm())
}

fn radial(center: &Point, radius: f64, y: &Point) -> Point {
    let d = y - center;
    let n = d.norm();
    if n == 0.0 {
        let mut e = Point::zeros(center.len());
        e[0] = 1.0;
        center + e * radius
    } else {
        center + d * (radius / n)
    }
}

fn circle_grid(center: &Point, radius: f64, spacing: f64) -> Vec<Point> {
    let n = ((2.0 * PI * radius / spacing).ceil() as usize).max(8);
    (0..n)
        .map(|k| {
            let a = 2.0 * PI * k as f64 / n as f64;
            Point::from_column_slice(&[center[0] + radius * a.cos(), center[1] + radius * a.sin()])
        })
        .collect()
}

/// Intersection points of two circles in the plane.
fn circle_intersections(c1: &Point, r1: f64, c2: &Point, r2: f64) -> Vec<Point> {
    let d = (c2 - c1).norm();
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let e = (c2 - c1) / d;
    let base = c1 + &e * a;
    let perp = Point::from_column_slice(&[-e[1], e[0]]);
    if h == 0.0 {
        vec![base]
    } else {
        vec![&base + &perp * h, &base - &perp * h]
    }
}

fn sphere_sample(center: &Point, radius: f64, rng: &mut SeededRng) -> Point {
    center + random_unit(center.len(), rng) * radius
}

/// Closed ball `B_R(c)`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
    pub interior: Option<InteriorParams>,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Self {
        Self { center, radius, interior: None }
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }
}

impl ProxSet for Ball {
    fn label(&self) -> String {
        format!("ball(c={:?}, R={})", self.center.as_slice(), self.radius)
    }
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn prox_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn contains(&self, x: &Point) -> bool {
        (x - &self.center).norm() <= self.radius + tol(x)
    }
    fn nearest_point(&self, y: &Point) -> Point {
        if (y - &self.center).norm() <= self.radius {
            y.clone()
        } else {
            radial(&self.center, self.radius, y)
        }
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        (0..count).map(|_| sphere_sample(&self.center, self.radius, rng)).collect()
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        match self.dim() {
            1 => Some(vec![
                Point::from_element(1, self.center[0] - self.radius),
                Point::from_element(1, self.center[0] + self.radius),
            ]),
            2 => Some(circle_grid(&self.center, self.radius, spacing)),
            _ => None,
        }
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        (margin <= self.radius).then(|| Arc::new(Ball::new(self.center.clone(), self.radius - margin)) as Arc<dyn ProxSet>)
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        Some((about - &self.center).norm() + self.radius)
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        Some(v.norm())
    }
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct BoxSet {
    pub lo: Point,
    pub hi: Point,
    pub interior: Option<InteriorParams>,
}

impl BoxSet {
    pub fn new(lo: Point, hi: Point) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch(lo.len(), hi.len()));
        }
        if lo.iter().zip(hi.iter()).any(|(a, b)| !(a <= b)) {
            return Err(Error::Precondition("box needs lo <= hi componentwise".into()));
        }
        Ok(Self { lo, hi, interior: None })
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }
}

impl ProxSet for BoxSet {
    fn label(&self) -> String {
        format!("box(lo={:?}, hi={:?})", self.lo.as_slice(), self.hi.as_slice())
    }
    fn dim(&self) -> usize {
        self.lo.len()
    }
    fn prox_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn contains(&self, x: &Point) -> bool {
        let t = tol(x);
        (0..self.dim()).all(|i| x[i] >= self.lo[i] - t && x[i] <= self.hi[i] + t)
    }
    fn nearest_point(&self, y: &Point) -> Point {
        Point::from_fn(self.dim(), |i, _| y[i].clamp(self.lo[i], self.hi[i]))
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        let n = self.dim();
        let side = |i: usize| self.hi[i] - self.lo[i];
        let weights: Vec<f64> = (0..n).map(|i| (0..n).filter(|&k| k != i).map(side).product::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        (0..count)
            .map(|_| {
                let mut pick = rng.random::<f64>() * total;
                let mut axis = n - 1;
                for (i, w) in weights.iter().enumerate() {
                    if pick < *w {
                        axis = i;
                        break;
                    }
                    pick -= w;
                }
                let mut p = Point::from_fn(n, |i, _| self.lo[i] + side(i) * rng.random::<f64>());
                p[axis] = if rng.random::<bool>() { self.hi[axis] } else { self.lo[axis] };
                p
            })
            .collect()
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        match self.dim() {
            1 => Some(vec![self.lo.clone(), self.hi.clone()]),
            2 => {
                let corners = [
                    (self.lo[0], self.lo[1]),
                    (self.hi[0], self.lo[1]),
                    (self.hi[0], self.hi[1]),
                    (self.lo[0], self.hi[1]),
                ];
                let mut pts = Vec::new();
                for k in 0..4 {
                    let (a, b) = (corners[k], corners[(k + 1) % 4]);
                    let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
                    let m = ((len / spacing).ceil() as usize).max(1);
                    for s in 0..m {
                        let f = s as f64 / m as f64;
                        pts.push(Point::from_column_slice(&[a.0 + f * (b.0 - a.0), a.1 + f * (b.1 - a.1)]));
                    }
                }
                Some(pts)
            }
            _ => None,
        }
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        let lo = self.lo.add_scalar(margin);
        let hi = self.hi.add_scalar(-margin);
        BoxSet::new(lo, hi).ok().map(|b| Arc::new(b) as Arc<dyn ProxSet>)
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        let s: f64 = (0..self.dim())
            .map(|i| (about[i] - self.lo[i]).abs().max((about[i] - self.hi[i]).abs()).powi(2))
            .sum();
        Some(s.sqrt())
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        Some(v.norm())
    }
}

/// Half-space `{x : <n, x> <= c}` with unit normal `n`.
#[derive(Debug, Clone)]
pub struct HalfSpace {
    pub normal: Point,
    pub offset: f64,
    pub window: f64,
    pub interior: Option<InteriorParams>,
}

impl HalfSpace {
    pub fn new(normal: Point, offset: f64) -> Result<Self> {
        let n = normal.norm();
        if !(n > 0.0) {
            return Err(Error::Precondition("half-space normal must be nonzero".into()));
        }
        Ok(Self { normal: normal / n, offset: offset / n, window: 10.0, interior: None })
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }
}

impl ProxSet for HalfSpace {
    fn label(&self) -> String {
        format!("half_space(n={:?}, c={})", self.normal.as_slice(), self.offset)
    }
    fn dim(&self) -> usize {
        self.normal.len()
    }
    fn prox_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn contains(&self, x: &Point) -> bool {
        self.normal.dot(x) <= self.offset + tol(x)
    }
    fn nearest_point(&self, y: &Point) -> Point {
        let excess = self.normal.dot(y) - self.offset;
        if excess <= 0.0 {
            y.clone()
        } else {
            y - &self.normal * excess
        }
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        let foot = &self.normal * self.offset;
        (0..count)
            .map(|_| {
                let g = random_in_ball(self.dim(), self.window, rng);
                &foot + &g - &self.normal * self.normal.dot(&g)
            })
            .collect()
    }
    fn boundary_grid(&self, _spacing: f64) -> Option<Vec<Point>> {
        None
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        let mut h = self.clone();
        h.offset -= margin;
        h.interior = None;
        Some(Arc::new(h))
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn bounding_radius(&self, _about: &Point) -> Option<f64> {
        None
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        Some(self.normal.dot(v).abs())
    }
}

/// Intersection of closed convex sets; projection by Dykstra's algorithm.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub parts: Vec<Arc<dyn ProxSet>>,
    pub interior: Option<InteriorParams>,
    pub max_iter: usize,
}

impl Intersection {
    pub fn new(parts: Vec<Arc<dyn ProxSet>>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Precondition("intersection of no sets".into()));
        }
        let d = parts[0].dim();
        for p in &parts {
            if p.dim() != d {
                return Err(Error::DimensionMismatch(d, p.dim()));
            }
            if !p.is_convex() {
                return Err(Error::Precondition(format!("intersection part {} is not convex", p.label())));
            }
        }
        Ok(Self { parts, interior: None, max_iter: 100_000 })
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }
}

impl ProxSet for Intersection {
    fn label(&self) -> String {
        let names: Vec<String> = self.parts.iter().map(|p| p.label()).collect();
        format!("intersection[{}]", names.join(", "))
    }
    fn dim(&self) -> usize {
        self.parts[0].dim()
    }
    fn prox_radius(&self) -> f64 {
        f64::INFINITY
    }
    fn contains(&self, x: &Point) -> bool {
        self.parts.iter().all(|p| p.contains(x))
    }
    fn nearest_point(&self, y: &Point) -> Point {
        if self.contains(y) {
            return y.clone();
        }
        let k = self.parts.len();
        let mut x = y.clone();
        let mut incr = vec![Point::zeros(self.dim()); k];
        for _ in 0..self.max_iter {
            let prev = x.clone();
            for (i, part) in self.parts.iter().enumerate() {
                let z = &x + &incr[i];
                let p = part.nearest_point(&z);
                incr[i] = &z - &p;
                x = p;
            }
            if (&x - &prev).norm() <= DYKSTRA * (1.0 + x.norm()) {
                break;
            }
        }
        x
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let i = rng.random_range(0..self.parts.len());
            let p = self.parts[i].boundary_sample(1, rng).pop().unwrap();
            if self.contains(&p) {
                out.push(p);
            }
        }
        out
    }
    fn boundary_grid(&self, _spacing: f64) -> Option<Vec<Point>> {
        None
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        let parts = self.parts.iter().map(|p| p.eroded(margin)).collect::<Option<Vec<_>>>()?;
        let e = Intersection::new(parts).ok()?;
        // Emptiness check: a point of the eroded set must survive projection.
        let probe = e.nearest_point(&Point::zeros(e.dim()));
        e.contains(&probe).then(|| Arc::new(e) as Arc<dyn ProxSet>)
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        true
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        self.parts.iter().filter_map(|p| p.bounding_radius(about)).reduce(f64::min)
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        self.is_bounded().then(|| v.norm())
    }
}

/// Complement of a union of open balls, `R^n \ ∪ B°_{R_i}(c_i)`.
///
/// A single ball gives the `R`-prox-regular exterior of a ball; two tangent
/// balls of equal radius give a cusp at the contact point.
#[derive(Debug, Clone)]
pub struct BallUnionComplement {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    pub reach: f64,
    pub interior: Option<InteriorParams>,
    pub window: f64,
    kind: &'static str,
}

impl BallUnionComplement {
    pub fn ball_complement(center: Point, radius: f64) -> Self {
        Self {
            centers: vec![center],
            radii: vec![radius],
            reach: radius,
            interior: None,
            window: 10.0,
            kind: "ball_complement",
        }
    }

    /// Complement of the open balls of radius `r` centred at `(±r, 0)`,
    /// which touch at the origin.
    pub fn cusp(r: f64) -> Self {
        Self {
            centers: vec![Point::from_column_slice(&[-r, 0.0]), Point::from_column_slice(&[r, 0.0])],
            radii: vec![r, r],
            reach: r,
            interior: None,
            window: 10.0,
            kind: "cusp",
        }
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }

    fn vertices(&self) -> Vec<Point> {
        let mut out = Vec::new();
        if self.centers[0].len() != 2 {
            return out;
        }
        for i in 0..self.centers.len() {
            for k in i + 1..self.centers.len() {
                for p in circle_intersections(&self.centers[i], self.radii[i], &self.centers[k], self.radii[k]) {
                    if self.contains(&p) {
                        out.push(p);
                    }
                }
            }
        }
        out
    }
}

impl ProxSet for BallUnionComplement {
    fn label(&self) -> String {
        format!("{}(centers={:?}, radii={:?})", self.kind, self.centers.iter().map(|c| c.as_slice().to_vec()).collect::<Vec<_>>(), self.radii)
    }
    fn dim(&self) -> usize {
        self.centers[0].len()
    }
    fn prox_radius(&self) -> f64 {
        self.reach
    }
    fn contains(&self, x: &Point) -> bool {
        let t = tol(x);
        self.centers.iter().zip(&self.radii).all(|(c, r)| (x - c).norm() >= r - t)
    }
    fn nearest_point(&self, y: &Point) -> Point {
        if self.centers.iter().zip(&self.radii).all(|(c, r)| (y - c).norm() >= *r) {
            return y.clone();
        }
        let mut cands: Vec<Point> = self
            .centers
            .iter()
            .zip(&self.radii)
            .map(|(c, r)| radial(c, *r, y))
            .filter(|p| self.contains(p))
            .collect();
        cands.extend(self.vertices());
        cands
            .into_iter()
            .min_by(|a, b| (a - y).norm().total_cmp(&(b - y).norm()))
            .unwrap_or_else(|| y.clone())
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        let total: f64 = self.radii.iter().sum();
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let mut pick = rng.random::<f64>() * total;
            let mut i = 0;
            while i + 1 < self.radii.len() && pick >= self.radii[i] {
                pick -= self.radii[i];
                i += 1;
            }
            let p = sphere_sample(&self.centers[i], self.radii[i], rng);
            if self.contains(&p) {
                out.push(p);
            }
        }
        out
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        if self.dim() != 2 {
            return None;
        }
        let mut pts: Vec<Point> = self
            .centers
            .iter()
            .zip(&self.radii)
            .flat_map(|(c, r)| circle_grid(c, *r, spacing))
            .filter(|p| self.contains(p))
            .collect();
        pts.extend(self.vertices());
        Some(pts)
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        let mut e = self.clone();
        e.radii = self.radii.iter().map(|r| r + margin).collect();
        e.reach = e.radii.iter().copied().fold(f64::INFINITY, f64::min);
        e.interior = None;
        Some(Arc::new(e))
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        false
    }
    fn bounding_radius(&self, _about: &Point) -> Option<f64> {
        None
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        (self.centers.len() == 1 && v.norm() <= self.radii[0]).then(|| v.norm())
    }
}

/// Union of two disjoint closed balls of equal radius; prox-regular with
/// `r` equal to half the gap between them.
#[derive(Debug, Clone)]
pub struct TwoBalls {
    pub c1: Point,
    pub c2: Point,
    pub radius: f64,
    pub interior: Option<InteriorParams>,
}

impl TwoBalls {
    pub fn new(c1: Point, c2: Point, radius: f64) -> Result<Self> {
        if c1.len() != c2.len() {
            return Err(Error::DimensionMismatch(c1.len(), c2.len()));
        }
        if (&c1 - &c2).norm() <= 2.0 * radius {
            return Err(Error::Precondition("balls must be disjoint".into()));
        }
        Ok(Self { c1, c2, radius, interior: None })
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }

    fn balls(&self) -> [Ball; 2] {
        [Ball::new(self.c1.clone(), self.radius), Ball::new(self.c2.clone(), self.radius)]
    }
}

impl ProxSet for TwoBalls {
    fn label(&self) -> String {
        format!("two_balls(c1={:?}, c2={:?}, R={})", self.c1.as_slice(), self.c2.as_slice(), self.radius)
    }
    fn dim(&self) -> usize {
        self.c1.len()
    }
    fn prox_radius(&self) -> f64 {
        ((&self.c1 - &self.c2).norm() - 2.0 * self.radius) / 2.0
    }
    fn contains(&self, x: &Point) -> bool {
        self.balls().iter().any(|b| b.contains(x))
    }
    fn nearest_point(&self, y: &Point) -> Point {
        let [a, b] = self.balls();
        let (pa, pb) = (a.nearest_point(y), b.nearest_point(y));
        if (&pa - y).norm() <= (&pb - y).norm() {
            pa
        } else {
            pb
        }
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        (0..count)
            .map(|_| {
                let c = if rng.random::<bool>() { &self.c1 } else { &self.c2 };
                sphere_sample(c, self.radius, rng)
            })
            .collect()
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        let [a, b] = self.balls();
        let mut g = a.boundary_grid(spacing)?;
        g.extend(b.boundary_grid(spacing)?);
        Some(g)
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        if margin > self.radius {
            return None;
        }
        let mut e = self.clone();
        e.radius -= margin;
        e.interior = None;
        Some(Arc::new(e))
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        false
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        Some((about - &self.c1).norm().max((about - &self.c2).norm()) + self.radius)
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        Some(v.norm())
    }
}

/// Planar crescent `B_{R1}(c1) \ B°_{R2}(c2)`.
#[derive(Debug, Clone)]
pub struct Crescent {
    pub c1: Point,
    pub r1: f64,
    pub c2: Point,
    pub r2: f64,
    pub interior: Option<InteriorParams>,
}

impl Crescent {
    pub fn new(c1: Point, r1: f64, c2: Point, r2: f64) -> Result<Self> {
        if c1.len() != 2 || c2.len() != 2 {
            return Err(Error::Precondition("crescent is planar".into()));
        }
        let d = (&c1 - &c2).norm();
        if d + r1 < r2 {
            return Err(Error::Precondition("crescent is empty".into()));
        }
        Ok(Self { c1, r1, c2, r2, interior: None })
    }

    pub fn with_interior(mut self, p: InteriorParams) -> Self {
        self.interior = Some(p);
        self
    }

    pub fn tips(&self) -> Vec<Point> {
        circle_intersections(&self.c1, self.r1, &self.c2, self.r2)
    }
}

impl ProxSet for Crescent {
    fn label(&self) -> String {
        format!(
            "crescent(c1={:?}, R1={}, c2={:?}, R2={})",
            self.c1.as_slice(),
            self.r1,
            self.c2.as_slice(),
            self.r2
        )
    }
    fn dim(&self) -> usize {
        2
    }
    /// `R2` when the removed arc spans at most a half circle as seen from the
    /// tips, otherwise the half-distance between the tips.
    fn prox_radius(&self) -> f64 {
        let tips = self.tips();
        if tips.is_empty() {
            return self.r2;
        }
        let axis = &self.c2 - &self.c1;
        let axis_n = axis.norm();
        if axis_n == 0.0 {
            return self.r2;
        }
        let v = &tips[0] - &self.c2;
        let cos_phi = v.dot(&axis) / (v.norm() * axis_n);
        if cos_phi <= 0.0 {
            self.r2
        } else {
            self.r2 * (1.0 - cos_phi * cos_phi).sqrt()
        }
    }
    fn contains(&self, x: &Point) -> bool {
        let t = tol(x);
        (x - &self.c1).norm() <= self.r1 + t && (x - &self.c2).norm() >= self.r2 - t
    }
    fn nearest_point(&self, y: &Point) -> Point {
        if (y - &self.c1).norm() <= self.r1 && (y - &self.c2).norm() >= self.r2 {
            return y.clone();
        }
        let mut cands = vec![radial(&self.c1, self.r1, y), radial(&self.c2, self.r2, y)];
        cands.extend(self.tips());
        cands
            .into_iter()
            .filter(|p| self.contains(p))
            .min_by(|a, b| (a - y).norm().total_cmp(&(b - y).norm()))
            .unwrap_or_else(|| {
                // Disjoint circles with the outer one missing: the set is the
                // outer disk, whose radial point is always admissible.
                radial(&self.c1, self.r1, y)
            })
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        let mut out = Vec::with_capacity(count);
        let w = self.r1 / (self.r1 + self.r2);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            let p = if rng.random::<f64>() < w {
                sphere_sample(&self.c1, self.r1, rng)
            } else {
                sphere_sample(&self.c2, self.r2, rng)
            };
            if self.contains(&p) {
                out.push(p);
            }
        }
        out
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        let mut pts: Vec<Point> = circle_grid(&self.c1, self.r1, spacing)
            .into_iter()
            .chain(circle_grid(&self.c2, self.r2, spacing))
            .filter(|p| self.contains(p))
            .collect();
        pts.extend(self.tips());
        Some(pts)
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        if margin >= self.r1 {
            return None;
        }
        Crescent::new(self.c1.clone(), self.r1 - margin, self.c2.clone(), self.r2 + margin)
            .ok()
            .map(|c| Arc::new(c) as Arc<dyn ProxSet>)
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.interior
    }
    fn is_convex(&self) -> bool {
        false
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        Some((about - &self.c1).norm() + self.r1)
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        Some(v.norm())
    }
}

/// `Z + shift`.
#[derive(Debug, Clone)]
pub struct Translated {
    pub base: Arc<dyn ProxSet>,
    pub shift: Point,
}

impl ProxSet for Translated {
    fn label(&self) -> String {
        format!("{} + {:?}", self.base.label(), self.shift.as_slice())
    }
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn prox_radius(&self) -> f64 {
        self.base.prox_radius()
    }
    fn contains(&self, x: &Point) -> bool {
        self.base.contains(&(x - &self.shift))
    }
    fn nearest_point(&self, y: &Point) -> Point {
        self.base.nearest_point(&(y - &self.shift)) + &self.shift
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        self.base.boundary_sample(count, rng).into_iter().map(|p| p + &self.shift).collect()
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        Some(self.base.boundary_grid(spacing)?.into_iter().map(|p| p + &self.shift).collect())
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        Some(Arc::new(Translated { base: self.base.eroded(margin)?, shift: self.shift.clone() }))
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.base.interior_params()
    }
    fn is_convex(&self) -> bool {
        self.base.is_convex()
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        self.base.bounding_radius(&(about - &self.shift))
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        self.base.translation_hausdorff(v)
    }
}

/// Planar rotation of `Z` by `angle` about `center`.
#[derive(Debug, Clone)]
pub struct Rotated {
    pub base: Arc<dyn ProxSet>,
    pub center: Point,
    pub angle: f64,
}

impl Rotated {
    fn rot(&self, p: &Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        let d = p - &self.center;
        Point::from_column_slice(&[self.center[0] + c * d[0] - s * d[1], self.center[1] + s * d[0] + c * d[1]])
    }

    fn rot_vec(v: &Point, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::from_column_slice(&[c * v[0] - s * v[1], s * v[0] + c * v[1]])
    }
}

impl ProxSet for Rotated {
    fn label(&self) -> String {
        format!("rot({}, {})", self.base.label(), self.angle)
    }
    fn dim(&self) -> usize {
        2
    }
    fn prox_radius(&self) -> f64 {
        self.base.prox_radius()
    }
    fn contains(&self, x: &Point) -> bool {
        self.base.contains(&self.rot(x, -self.angle))
    }
    fn nearest_point(&self, y: &Point) -> Point {
        self.rot(&self.base.nearest_point(&self.rot(y, -self.angle)), self.angle)
    }
    fn boundary_sample(&self, count: usize, rng: &mut SeededRng) -> Vec<Point> {
        self.base.boundary_sample(count, rng).iter().map(|p| self.rot(p, self.angle)).collect()
    }
    fn boundary_grid(&self, spacing: f64) -> Option<Vec<Point>> {
        Some(self.base.boundary_grid(spacing)?.iter().map(|p| self.rot(p, self.angle)).collect())
    }
    fn eroded(&self, margin: f64) -> Option<Arc<dyn ProxSet>> {
        Some(Arc::new(Rotated { base: self.base.eroded(margin)?, center: self.center.clone(), angle: self.angle }))
    }
    fn interior_params(&self) -> Option<InteriorParams> {
        self.base.interior_params()
    }
    fn is_convex(&self) -> bool {
        self.base.is_convex()
    }
    fn bounding_radius(&self, about: &Point) -> Option<f64> {
        self.base.bounding_radius(&self.rot(about, -self.angle))
    }
    fn translation_hausdorff(&self, v: &Point) -> Option<f64> {
        self.base.translation_hausdorff(&Self::rot_vec(v, -self.angle))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxgeom::{project, seeded};
    use crate::vector::point;

    fn brute_nearest(set: &dyn ProxSet, y: &Point, n: usize) -> f64 {
        let g = set.boundary_grid(2.0 * PI / n as f64).unwrap();
        let b = g.iter().map(|p| (p - y).norm()).fold(f64::INFINITY, f64::min);
        if set.contains(y) { 0.0 } else { b }
    }

    #[test]
    fn ball_projection() {
        let b = Ball::new(point(&[0.0, 0.0]), 1.0);
        assert_eq!(project(&b, &point(&[2.0, 0.0])).unwrap(), point(&[1.0, 0.0]));
        assert_eq!(b.nearest_point(&point(&[0.2, 0.1])), point(&[0.2, 0.1]));
    }

    #[test]
    fn ball_complement_projection() {
        let z = BallUnionComplement::ball_complement(point(&[0.0, 0.0]), 1.0);
        assert_eq!(project(&z, &point(&[0.5, 0.0])).unwrap(), point(&[1.0, 0.0]));
        let y = point(&[0.3, -0.4]);
        let p = project(&z, &y).unwrap();
        assert!(((&p - &y / 0.5).norm()) < 1e-15);
        assert_eq!(z.prox_radius(), 1.0);
    }

    #[test]
    fn half_space_and_box() {
        let h = HalfSpace::new(point(&[0.0, 1.0]), 0.0).unwrap();
        assert_eq!(h.nearest_point(&point(&[3.0, 2.0])), point(&[3.0, 0.0]));
        let b = BoxSet::new(point(&[-1.0, -1.0]), point(&[1.0, 1.0])).unwrap();
        assert_eq!(b.nearest_point(&point(&[3.0, 0.5])), point(&[1.0, 0.5]));
        for p in b.boundary_sample(50, &mut seeded(1)) {
            assert!(b.contains(&p));
            assert!(p.iter().any(|c| c.abs() == 1.0));
        }
    }

    #[test]
    fn dykstra_matches_box() {
        let h1: Arc<dyn ProxSet> = Arc::new(HalfSpace::new(point(&[1.0, 0.0]), 1.0).unwrap());
        let h2: Arc<dyn ProxSet> = Arc::new(HalfSpace::new(point(&[0.0, 1.0]), 1.0).unwrap());
        let b: Arc<dyn ProxSet> = Arc::new(Ball::new(point(&[0.0, 0.0]), 1.3));
        let i = Intersection::new(vec![h1, h2, b]).unwrap();
        let y = point(&[2.0, 0.3]);
        let p = i.nearest_point(&y);
        assert!((p - point(&[1.0, 0.3])).norm() < 1e-9);
    }

    #[test]
    fn two_balls_reach_and_projection() {
        let z = TwoBalls::new(point(&[-2.0, 0.0]), point(&[2.0, 0.0]), 1.0).unwrap();
        assert_eq!(z.prox_radius(), 1.0);
        let y = point(&[0.1, 0.1]);
        let p = project(&z, &y).unwrap();
        assert!(((&p - &y).norm() - brute_nearest(&z, &y, 1 << 16)).abs() < 1e-6);
        // equidistant point on the symmetry axis is out of reach
        assert!(project(&z, &point(&[0.0, 0.1])).is_err());
    }

    #[test]
    fn crescent_geometry() {
        let c = Crescent::new(point(&[0.0, 0.0]), 1.0, point(&[1.2, 0.0]), 0.8).unwrap();
        let tips = c.tips();
        assert_eq!(tips.len(), 2);
        assert!((tips[0][0] - 0.75).abs() < 1e-12);
        assert!((c.prox_radius() - 0.8).abs() < 1e-12);
        let mut rng = seeded(5);
        for _ in 0..200 {
            let y = point(&[rng.random_range(-1.5..2.0), rng.random_range(-1.5..1.5)]);
            let d = c.distance(&y);
            let brute = brute_nearest(&c, &y, 1 << 15);
            assert!((d - brute).abs() < 2e-4, "y={y:?} d={d} brute={brute}");
        }
    }

    #[test]
    fn cusp_tip_erosion() {
        let r = 1.0;
        let rho = 0.05;
        let z = BallUnionComplement::cusp(r);
        let e = z.eroded(3.0 * rho).unwrap();
        let xb = e.nearest_point(&point(&[0.0, 0.0]));
        let lhs = xb.norm_squared() + rho * rho;
        assert!((lhs - (6.0 * r * rho + 10.0 * rho * rho)).abs() < 1e-12);
    }

    #[test]
    fn rotated_and_translated() {
        let c: Arc<dyn ProxSet> = Arc::new(Crescent::new(point(&[0.0, 0.0]), 1.0, point(&[1.2, 0.0]), 0.8).unwrap());
        let r = Rotated { base: c.clone(), center: point(&[0.0, 0.0]), angle: PI / 2.0 };
        assert!(r.contains(&point(&[0.0, -0.9])));
        assert!(!r.contains(&point(&[0.0, 0.9])));
        let t = Translated { base: c, shift: point(&[1.0, 1.0]) };
        assert!(t.contains(&point(&[0.1, 1.0])));
        assert_eq!(t.nearest_point(&point(&[-1.0, 1.0])), point(&[0.0, 1.0]));
    }
}
