//! Analytic planar shapes, exact measures, membership tests, and
//! rasterization onto uniform cell-centered grids.
//!
//! All shapes are open sets: boundary points are excluded from membership.
//! Rasterization marks a cell interior iff its center lies in the open set
//! and records, for every interior cell, the four directional distances to
//! the boundary in units of the cell size (Shortley–Weller fractions).

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        ((self.x - other.x).powi(2) + (self.y - other.y).powi(2)).sqrt()
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Distance from `p` to the closed segment `[a, b]`.
fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let len2 = d.x * d.x + d.y * d.y;
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len2).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// Proper-or-improper intersection test for two closed segments.
fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = cross(c, d, a);
    let d2 = cross(c, d, b);
    let d3 = cross(a, b, c);
    let d4 = cross(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    let on = |p: Point, q: Point, r: Point, det: f64| {
        det == 0.0
            && r.x >= p.x.min(q.x)
            && r.x <= p.x.max(q.x)
            && r.y >= p.y.min(q.y)
            && r.y <= p.y.max(q.y)
    };
    on(c, d, a, d1) || on(c, d, b, d2) || on(a, b, c, d3) || on(a, b, d, d4)
}

/// Analytic description of a planar open set with exact measure.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    Disk {
        center: Point,
        radius: f64,
    },
    Annulus {
        center: Point,
        r_in: f64,
        r_out: f64,
    },
    Triangle {
        vertices: [Point; 3],
    },
    /// Circular sector: vertex, half-opening angle, radius, and the unit
    /// direction of the bisector.
    Sector {
        vertex: Point,
        half_angle: f64,
        radius: f64,
        direction: Point,
    },
    /// Simple (non-self-intersecting) polygon given by its vertex loop.
    Polygon {
        vertices: Vec<Point>,
    },
    /// Finite union of pairwise disjoint open disks.
    UnionOfDisks {
        disks: Vec<(Point, f64)>,
    },
}

impl DomainSpec {
    pub fn disk(center: Point, radius: f64) -> Self {
        DomainSpec::Disk { center, radius }
    }

    pub fn unit_disk() -> Self {
        DomainSpec::disk(Point::new(0.0, 0.0), 1.0)
    }

    /// Checks every structural invariant of the description.
    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Disk { radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::InvalidSpec(format!("disk radius {radius} must be > 0")));
                }
            }
            DomainSpec::Annulus { r_in, r_out, .. } => {
                if !(*r_in > 0.0 && r_in < r_out) {
                    return Err(Error::InvalidSpec(format!(
                        "annulus radii must satisfy 0 < r_in < r_out, got ({r_in}, {r_out})"
                    )));
                }
            }
            DomainSpec::Triangle { vertices: v } => {
                let area2 = cross(v[0], v[1], v[2]).abs();
                let scale = v[0].dist(v[1]).max(v[1].dist(v[2])).max(v[2].dist(v[0]));
                if area2 <= 1e-12 * scale * scale {
                    return Err(Error::InvalidSpec("triangle vertices are collinear".into()));
                }
            }
            DomainSpec::Sector { half_angle, radius, direction, .. } => {
                if !(*half_angle > 0.0 && *half_angle < PI) {
                    return Err(Error::InvalidSpec(format!(
                        "sector half-angle {half_angle} must lie in (0, \u{3c0})"
                    )));
                }
                if !(*radius > 0.0) {
                    return Err(Error::InvalidSpec(format!("sector radius {radius} must be > 0")));
                }
                if (direction.norm() - 1.0).abs() > 1e-9 {
                    return Err(Error::InvalidSpec(
                        "sector bisector direction must be a unit vector".into(),
                    ));
                }
            }
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                if n < 3 {
                    return Err(Error::InvalidSpec("polygon needs at least 3 vertices".into()));
                }
                for i in 0..n {
                    if vertices[i].dist(vertices[(i + 1) % n]) == 0.0 {
                        return Err(Error::InvalidSpec(format!(
                            "polygon has a zero-length edge at vertex {i}"
                        )));
                    }
                }
                // Simplicity: no two non-adjacent edges may touch.
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    for j in (i + 1)..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        if adjacent {
                            continue;
                        }
                        let (c, d) = (vertices[j], vertices[(j + 1) % n]);
                        if segments_intersect(a, b, c, d) {
                            return Err(Error::InvalidSpec(format!(
                                "polygon is self-intersecting (edges {i} and {j})"
                            )));
                        }
                    }
                }
                if self.measure() <= 0.0 {
                    return Err(Error::InvalidSpec("polygon has zero area".into()));
                }
            }
            DomainSpec::UnionOfDisks { disks } => {
                if disks.is_empty() {
                    return Err(Error::InvalidSpec("union of disks is empty".into()));
                }
                for (i, (c, r)) in disks.iter().enumerate() {
                    if !(*r > 0.0) {
                        return Err(Error::InvalidSpec(format!("disk {i} has radius {r} <= 0")));
                    }
                    for (j, (c2, r2)) in disks.iter().enumerate().skip(i + 1) {
                        if c.dist(*c2) <= r + r2 {
                            return Err(Error::InvalidSpec(format!(
                                "disks {i} and {j} are not disjoint"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Exact analytic area.
    pub fn measure(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius, .. } => PI * radius * radius,
            DomainSpec::Annulus { r_in, r_out, .. } => PI * (r_out * r_out - r_in * r_in),
            DomainSpec::Triangle { vertices: v } => cross(v[0], v[1], v[2]).abs() / 2.0,
            DomainSpec::Sector { half_angle, radius, .. } => half_angle * radius * radius,
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                let mut s = 0.0;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    s += a.x * b.y - b.x * a.y;
                }
                s.abs() / 2.0
            }
            DomainSpec::UnionOfDisks { disks } => disks.iter().map(|(_, r)| PI * r * r).sum(),
        }
    }

    /// Strict membership in the open set; boundary points are excluded.
    pub fn contains(&self, p: Point) -> bool {
        match self {
            DomainSpec::Disk { center, radius } => p.dist(*center) < *radius,
            DomainSpec::Annulus { center, r_in, r_out } => {
                let d = p.dist(*center);
                d > *r_in && d < *r_out
            }
            DomainSpec::Triangle { vertices: v } => {
                let d0 = cross(v[0], v[1], p);
                let d1 = cross(v[1], v[2], p);
                let d2 = cross(v[2], v[0], p);
                (d0 > 0.0 && d1 > 0.0 && d2 > 0.0) || (d0 < 0.0 && d1 < 0.0 && d2 < 0.0)
            }
            DomainSpec::Sector { vertex, half_angle, radius, direction } => {
                let d = p - *vertex;
                let r = d.norm();
                if !(r > 0.0 && r < *radius) {
                    return false;
                }
                // angle between d and the bisector must be strictly below the
                // half-angle; compare cosines (both sides in [0, pi]).
                let cos_phi = (d.x * direction.x + d.y * direction.y) / r;
                cos_phi > (half_angle).cos()
            }
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                // on-edge points are boundary, hence excluded
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    if cross(a, b, p) == 0.0
                        && p.x >= a.x.min(b.x)
                        && p.x <= a.x.max(b.x)
                        && p.y >= a.y.min(b.y)
                        && p.y <= a.y.max(b.y)
                    {
                        return false;
                    }
                }
                // even-odd crossing rule with the half-open convention
                let mut inside = false;
                for i in 0..n {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    if (a.y > p.y) != (b.y > p.y) {
                        let xi = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                        if p.x < xi {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
            DomainSpec::UnionOfDisks { disks } => {
                disks.iter().any(|(c, r)| p.dist(*c) < *r)
            }
        }
    }

    /// Axis-aligned bounding box (lower-left, upper-right).
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            DomainSpec::Disk { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            DomainSpec::Annulus { center, r_out, .. } => (
                Point::new(center.x - r_out, center.y - r_out),
                Point::new(center.x + r_out, center.y + r_out),
            ),
            DomainSpec::Triangle { vertices } => bbox_of(vertices.iter().copied()),
            DomainSpec::Sector { vertex, half_angle, radius, direction } => {
                let theta0 = direction.y.atan2(direction.x);
                let mut pts = vec![
                    *vertex,
                    *vertex + Point::new((theta0 - half_angle).cos(), (theta0 - half_angle).sin()) * *radius,
                    *vertex + Point::new((theta0 + half_angle).cos(), (theta0 + half_angle).sin()) * *radius,
                ];
                // arc points at the axis directions, when the arc passes them
                for k in -4..=4 {
                    let axis = k as f64 * PI / 2.0;
                    if (axis - theta0).abs() <= *half_angle {
                        pts.push(*vertex + Point::new(axis.cos(), axis.sin()) * *radius);
                    }
                }
                bbox_of(pts.into_iter())
            }
            DomainSpec::Polygon { vertices } => bbox_of(vertices.iter().copied()),
            DomainSpec::UnionOfDisks { disks } => {
                let lo = Point::new(
                    disks.iter().map(|(c, r)| c.x - r).fold(f64::INFINITY, f64::min),
                    disks.iter().map(|(c, r)| c.y - r).fold(f64::INFINITY, f64::min),
                );
                let hi = Point::new(
                    disks.iter().map(|(c, r)| c.x + r).fold(f64::NEG_INFINITY, f64::max),
                    disks.iter().map(|(c, r)| c.y + r).fold(f64::NEG_INFINITY, f64::max),
                );
                (lo, hi)
            }
        }
    }

    /// Inradius, exact for disks, annuli, triangles and unions; a 2·area/perimeter
    /// estimate for polygons and a closed form for sectors clipped at a
    /// half-angle of pi/2. Only used to reject degenerate cell sizes.
    pub fn inradius_estimate(&self) -> f64 {
        match self {
            DomainSpec::Disk { radius, .. } => *radius,
            DomainSpec::Annulus { r_in, r_out, .. } => (r_out - r_in) / 2.0,
            DomainSpec::Triangle { vertices: v } => {
                let p = v[0].dist(v[1]) + v[1].dist(v[2]) + v[2].dist(v[0]);
                2.0 * self.measure() / p
            }
            DomainSpec::Sector { half_angle, radius, .. } => {
                let b = half_angle.min(PI / 2.0).sin();
                radius * b / (1.0 + b)
            }
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                let p: f64 = (0..n).map(|i| vertices[i].dist(vertices[(i + 1) % n])).sum();
                2.0 * self.measure() / p
            }
            DomainSpec::UnionOfDisks { disks } => {
                disks.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Distance from an interior point to the boundary; 0 for points outside.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        if !self.contains(p) {
            return 0.0;
        }
        match self {
            DomainSpec::Disk { center, radius } => radius - p.dist(*center),
            DomainSpec::Annulus { center, r_in, r_out } => {
                let d = p.dist(*center);
                (r_out - d).min(d - r_in)
            }
            DomainSpec::Triangle { vertices: v } => (0..3)
                .map(|i| segment_distance(p, v[i], v[(i + 1) % 3]))
                .fold(f64::INFINITY, f64::min),
            DomainSpec::Sector { vertex, half_angle, radius, direction } => {
                let theta0 = direction.y.atan2(direction.x);
                let e1 = *vertex
                    + Point::new((theta0 - half_angle).cos(), (theta0 - half_angle).sin()) * *radius;
                let e2 = *vertex
                    + Point::new((theta0 + half_angle).cos(), (theta0 + half_angle).sin()) * *radius;
                let arc = radius - p.dist(*vertex);
                segment_distance(p, *vertex, e1)
                    .min(segment_distance(p, *vertex, e2))
                    .min(arc)
            }
            DomainSpec::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| segment_distance(p, vertices[i], vertices[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
            DomainSpec::UnionOfDisks { disks } => disks
                .iter()
                .filter(|(c, r)| p.dist(*c) < *r)
                .map(|(c, r)| r - p.dist(*c))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Rasterizes the open set onto a uniform grid of cell size `h`.
    ///
    /// Boundary fractions are located by bisection of the membership
    /// indicator along grid lines to a relative accuracy of 1e-10.
    pub fn rasterize(&self, h: f64) -> Result<GridDomain> {
        self.validate()?;
        if !(h > 0.0) {
            return Err(Error::InvalidInput(format!("cell size h = {h} must be > 0")));
        }
        let inr = self.inradius_estimate();
        if h >= inr {
            return Err(Error::InvalidInput(format!(
                "cell size h = {h} must be below the inradius estimate {inr}"
            )));
        }
        GridDomain::build(self.clone(), h)
    }
}

fn bbox_of(points: impl Iterator<Item = Point>) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo.x = lo.x.min(p.x);
        lo.y = lo.y.min(p.y);
        hi.x = hi.x.max(p.x);
        hi.y = hi.y.max(p.y);
    }
    (lo, hi)
}

/// Grid directions in the order W, E, S, N used throughout the solver.
pub const DIRECTIONS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Smallest admitted boundary fraction; arms below this are clamped to keep
/// the stencil finite. The induced geometric perturbation is O(1e-8 · h).
const MIN_FRACTION: f64 = 1e-8;

/// A rasterized open set: interior mask on a uniform lattice plus
/// Shortley–Weller boundary fractions for every interior cell.
#[derive(Clone, Debug)]
pub struct GridDomain {
    spec: DomainSpec,
    h: f64,
    origin: Point,
    nx: usize,
    ny: usize,
    index: Vec<i32>,
    cells: Vec<(u32, u32)>,
    fractions: Vec<[f64; 4]>,
    neighbors: Vec<[i32; 4]>,
}

impl GridDomain {
    fn build(spec: DomainSpec, h: f64) -> Result<GridDomain> {
        let (lo, hi) = spec.bounding_box();
        // one padding cell on every side so interior cells always have
        // in-lattice neighbors
        let origin = Point::new(lo.x - h, lo.y - h);
        let nx = (((hi.x - lo.x) / h).ceil() as usize).max(1) + 2;
        let ny = (((hi.y - lo.y) / h).ceil() as usize).max(1) + 2;

        let center = |i: usize, j: usize| {
            Point::new(origin.x + (i as f64 + 0.5) * h, origin.y + (j as f64 + 0.5) * h)
        };

        let mut index = vec![-1i32; nx * ny];
        let mut cells = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if spec.contains(center(i, j)) {
                    index[j * nx + i] = cells.len() as i32;
                    cells.push((i as u32, j as u32));
                }
            }
        }
        if cells.is_empty() {
            return Err(Error::EmptyRaster { h });
        }

        let mut fractions = vec![[1.0f64; 4]; cells.len()];
        let mut neighbors = vec![[-1i32; 4]; cells.len()];
        for (k, &(i, j)) in cells.iter().enumerate() {
            let (i, j) = (i as i64, j as i64);
            let c = center(i as usize, j as usize);
            for (d, (di, dj)) in DIRECTIONS.iter().enumerate() {
                let (ni, nj) = (i + di, j + dj);
                let nb = index[nj as usize * nx + ni as usize];
                if nb >= 0 {
                    neighbors[k][d] = nb;
                } else {
                    // neighbor center is exterior: bisect the crossing
                    let dir = Point::new(*di as f64, *dj as f64);
                    let mut t_in = 0.0f64;
                    let mut t_out = 1.0f64;
                    for _ in 0..40 {
                        let t = 0.5 * (t_in + t_out);
                        if spec.contains(c + dir * (t * h)) {
                            t_in = t;
                        } else {
                            t_out = t;
                        }
                    }
                    fractions[k][d] = (0.5 * (t_in + t_out)).clamp(MIN_FRACTION, 1.0);
                }
            }
        }

        Ok(GridDomain { spec, h, origin, nx, ny, index, cells, fractions, neighbors })
    }

    pub fn spec(&self) -> &DomainSpec {
        &self.spec
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn interior_count(&self) -> usize {
        self.cells.len()
    }

    /// Total area of the interior cells, `h² · count`.
    pub fn area(&self) -> f64 {
        self.h * self.h * self.cells.len() as f64
    }

    pub fn cell_center(&self, k: usize) -> Point {
        let (i, j) = self.cells[k];
        Point::new(
            self.origin.x + (i as f64 + 0.5) * self.h,
            self.origin.y + (j as f64 + 0.5) * self.h,
        )
    }

    /// Boundary fractions (W, E, S, N) of cell `k`; 1.0 where the neighbor
    /// cell is interior.
    pub fn fractions(&self, k: usize) -> [f64; 4] {
        self.fractions[k]
    }

    /// Interior neighbor indices (W, E, S, N) of cell `k`; -1 where the
    /// neighbor is exterior.
    pub fn neighbors(&self, k: usize) -> [i32; 4] {
        self.neighbors[k]
    }

    /// Whether cell `k` touches the boundary through any shortened arm.
    pub fn is_boundary_adjacent(&self, k: usize) -> bool {
        self.neighbors[k].iter().any(|&n| n < 0)
    }

    /// Index of the interior cell nearest to `p`.
    pub fn nearest_cell(&self, p: Point) -> Option<usize> {
        let fi = ((p.x - self.origin.x) / self.h - 0.5).round();
        let fj = ((p.y - self.origin.y) / self.h - 0.5).round();
        let ci = (fi.max(0.0) as usize).min(self.nx - 1);
        let cj = (fj.max(0.0) as usize).min(self.ny - 1);
        // search outward in rings around the snapped lattice cell
        for ring in 0..self.nx.max(self.ny) {
            let mut best: Option<(f64, usize)> = None;
            let lo_i = ci.saturating_sub(ring);
            let hi_i = (ci + ring).min(self.nx - 1);
            let lo_j = cj.saturating_sub(ring);
            let hi_j = (cj + ring).min(self.ny - 1);
            for j in lo_j..=hi_j {
                for i in lo_i..=hi_i {
                    if ring > 0 && i != lo_i && i != hi_i && j != lo_j && j != hi_j {
                        continue;
                    }
                    let k = self.index[j * self.nx + i];
                    if k >= 0 {
                        let d = self.cell_center(k as usize).dist(p);
                        if best.map_or(true, |(bd, _)| d < bd) {
                            best = Some((d, k as usize));
                        }
                    }
                }
            }
            if let Some((_, k)) = best {
                return Some(k);
            }
        }
        None
    }

    /// Mean of the interior cell centers.
    pub fn centroid(&self) -> Point {
        let n = self.cells.len() as f64;
        let mut sx = 0.0;
        let mut sy = 0.0;
        for k in 0..self.cells.len() {
            let c = self.cell_center(k);
            sx += c.x;
            sy += c.y;
        }
        Point::new(sx / n, sy / n)
    }

    pub fn lattice_size(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    /// Lattice coordinates of interior cell `k`.
    pub fn lattice_coords(&self, k: usize) -> (usize, usize) {
        let (i, j) = self.cells[k];
        (i as usize, j as usize)
    }

    /// Interior index at lattice position `(i, j)`, if interior.
    pub fn cell_at(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        let k = self.index[j * self.nx + i];
        (k >= 0).then_some(k as usize)
    }

    pub fn origin(&self) -> Point {
        self.origin
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_triangle() -> DomainSpec {
        DomainSpec::Triangle {
            vertices: [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)],
        }
    }

    #[test]
    fn measures_are_exact() {
        assert!((DomainSpec::unit_disk().measure() - PI).abs() < 1e-15);
        let sector = DomainSpec::Sector {
            vertex: Point::new(0.0, 0.0),
            half_angle: PI / 6.0,
            radius: 2.0,
            direction: Point::new(1.0, 0.0),
        };
        // alpha * a^2 / 2 with alpha = pi/3, a = 2
        assert!((sector.measure() - PI / 3.0 * 2.0).abs() < 1e-14);
        let ann = DomainSpec::Annulus { center: Point::new(0.0, 0.0), r_in: 0.5, r_out: 1.0 };
        assert!((ann.measure() - 3.0 * PI / 4.0).abs() < 1e-15);
        assert!((unit_triangle().measure() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn contains_excludes_boundary() {
        let d = DomainSpec::unit_disk();
        assert!(d.contains(Point::new(0.5, 0.0)));
        assert!(!d.contains(Point::new(1.0, 0.0)));
        assert!(!unit_triangle().contains(Point::new(0.6, 0.6)));
        assert!(unit_triangle().contains(Point::new(0.2, 0.2)));
        assert!(!unit_triangle().contains(Point::new(0.5, 0.5))); // on the hypotenuse
    }

    #[test]
    fn polygon_membership_and_validation() {
        let square = DomainSpec::Polygon {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
        };
        square.validate().unwrap();
        assert!(square.contains(Point::new(0.5, 0.5)));
        assert!(!square.contains(Point::new(0.5, 0.0)));
        assert!((square.measure() - 1.0).abs() < 1e-15);

        let bowtie = DomainSpec::Polygon {
            vertices: vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(1.0, 0.0),
                Point::new(0.0, 1.0),
            ],
        };
        assert!(bowtie.validate().is_err());
    }

    #[test]
    fn union_disjointness_enforced() {
        let good = DomainSpec::UnionOfDisks {
            disks: vec![(Point::new(0.0, 0.0), 1.0), (Point::new(3.0, 0.0), 1.0)],
        };
        good.validate().unwrap();
        let bad = DomainSpec::UnionOfDisks {
            disks: vec![(Point::new(0.0, 0.0), 1.0), (Point::new(1.5, 0.0), 1.0)],
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn raster_area_converges() {
        let disk = DomainSpec::unit_disk();
        let g = disk.rasterize(0.01).unwrap();
        assert!((g.area() - PI).abs() / PI < 0.005);

        let tri = unit_triangle();
        let g = tri.rasterize(0.005).unwrap();
        assert!((g.area() - 0.5).abs() / 0.5 < 0.005);
    }

    #[test]
    fn raster_area_error_scales_with_perimeter() {
        // |h^2 count - area| <= C h P with C <= 2
        let cases: Vec<(DomainSpec, f64)> = vec![
            (DomainSpec::unit_disk(), 2.0 * PI),
            (unit_triangle(), 2.0 + 2f64.sqrt()),
            (
                DomainSpec::Annulus { center: Point::new(0.0, 0.0), r_in: 0.5, r_out: 1.0 },
                3.0 * PI,
            ),
        ];
        for (spec, perimeter) in cases {
            for h in [0.02, 0.01, 0.005] {
                let g = spec.rasterize(h).unwrap();
                let err = (g.area() - spec.measure()).abs();
                assert!(
                    err <= 2.0 * h * perimeter,
                    "area error {err} exceeds 2hP = {} for {spec:?} at h = {h}",
                    2.0 * h * perimeter
                );
            }
        }
    }

    #[test]
    fn degenerate_cell_size_rejected() {
        let disk = DomainSpec::unit_disk();
        assert!(matches!(disk.rasterize(2.5), Err(Error::InvalidInput(_))));
        assert!(matches!(disk.rasterize(1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn interior_cells_and_fractions_satisfy_invariants() {
        let spec = DomainSpec::Annulus { center: Point::new(0.2, -0.1), r_in: 0.4, r_out: 1.1 };
        let g = spec.rasterize(0.02).unwrap();
        for k in 0..g.interior_count() {
            assert!(spec.contains(g.cell_center(k)));
            for d in 0..4 {
                let f = g.fractions(k)[d];
                assert!(f > 0.0 && f <= 1.0);
                if g.neighbors(k)[d] >= 0 {
                    assert_eq!(f, 1.0);
                }
            }
        }
    }

    #[test]
    fn monte_carlo_hit_fraction_matches_measure() {
        let specs = vec![
            DomainSpec::unit_disk(),
            unit_triangle(),
            DomainSpec::Sector {
                vertex: Point::new(0.0, 0.0),
                half_angle: PI / 6.0,
                radius: 1.0,
                direction: Point::new(1.0, 0.0),
            },
            DomainSpec::UnionOfDisks {
                disks: vec![(Point::new(0.0, 0.0), 0.6), (Point::new(2.0, 0.3), 0.9)],
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in specs {
            let (lo, hi) = spec.bounding_box();
            let box_area = (hi.x - lo.x) * (hi.y - lo.y);
            let n = 1_000_000usize;
            let mut hits = 0usize;
            for _ in 0..n {
                let p = Point::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y));
                if spec.contains(p) {
                    hits += 1;
                }
            }
            let p_true = spec.measure() / box_area;
            let sigma = (p_true * (1.0 - p_true) / n as f64).sqrt();
            let p_hat = hits as f64 / n as f64;
            assert!(
                (p_hat - p_true).abs() <= 3.0 * sigma,
                "MC fraction {p_hat} vs {p_true} (3 sigma = {})",
                3.0 * sigma
            );
        }
    }

    #[test]
    fn nearest_cell_finds_interior() {
        let g = DomainSpec::unit_disk().rasterize(0.05).unwrap();
        let k = g.nearest_cell(Point::new(0.0, 0.0)).unwrap();
        assert!(g.cell_center(k).norm() < 0.05);
        // a point outside the domain still snaps to an interior cell
        let k = g.nearest_cell(Point::new(1.4, 0.0)).unwrap();
        assert!(g.cell_center(k).dist(Point::new(1.0, 0.0)) < 0.1);
    }
}
