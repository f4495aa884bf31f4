//! Knots, normals and radial distances.
//!
//! Every kernel in the crate is radial, so the only geometric quantities it
//! ever needs are `r = |x - y|` and the normal projection `dr/dn`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{invalid, BkmError, Result};

/// Knots closer than this are treated as coincident.
pub const COINCIDENCE_TOLERANCE: f64 = 1e-12;

/// A point in two or three dimensions.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new2(x: f64, y: f64) -> Self {
        Point {
            coords: [x, y, 0.0],
            dim: 2,
        }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point {
            coords: [x, y, z],
            dim: 3,
        }
    }

    /// Builds a point from a coordinate slice, checking dimension and finiteness.
    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        let p = match *coords {
            [x, y] => Point::new2(x, y),
            [x, y, z] => Point::new3(x, y, z),
            _ => {
                return Err(invalid(format!(
                    "points must have 2 or 3 coordinates, got {}",
                    coords.len()
                )))
            }
        };
        if !p.is_finite() {
            return Err(invalid("point coordinates must be finite"));
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    pub fn x(&self) -> f64 {
        self.coords[0]
    }

    pub fn y(&self) -> f64 {
        self.coords[1]
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut coords = [0.0; 3];
        for (k, c) in coords.iter_mut().enumerate().take(self.dim()) {
            *c = self.coords[k] - other.coords[k];
        }
        Point {
            coords,
            dim: self.dim,
        }
    }

    /// `self + scale * direction`.
    pub fn offset(&self, direction: &Point, scale: f64) -> Point {
        let mut coords = self.coords;
        for (k, c) in coords.iter_mut().enumerate().take(self.dim()) {
            *c += scale * direction.coords[k];
        }
        Point {
            coords,
            dim: self.dim,
        }
    }

    /// Unit vector along coordinate `axis` in the same dimension as `self`.
    pub fn unit_axis(&self, axis: usize) -> Point {
        let mut coords = [0.0; 3];
        coords[axis] = 1.0;
        Point {
            coords,
            dim: self.dim,
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords()).finish()
    }
}

/// Euclidean distance `|x - y|`.
pub fn radial_distance(x: &Point, y: &Point) -> Result<f64> {
    if x.dim != y.dim {
        return Err(invalid(format!(
            "dimension mismatch: {} vs {}",
            x.dim, y.dim
        )));
    }
    Ok(distance(x, y))
}

/// Unchecked distance for points already known to share a dimension.
#[inline]
pub(crate) fn distance(x: &Point, y: &Point) -> f64 {
    let mut sum = 0.0;
    for k in 0..x.dim() {
        let d = x.coords[k] - y.coords[k];
        sum += d * d;
    }
    sum.sqrt()
}

/// `dr/dn` at `x` for `r = |x - source|`, i.e. `((x - source) . n) / r`.
///
/// Returns 0 when `x` coincides with `source`: every radial derivative used
/// with this projection vanishes at `r = 0`.
pub fn normal_projection(x: &Point, source: &Point, normal: &Point) -> f64 {
    let diff = x.sub(source);
    let r = diff.norm();
    if r == 0.0 {
        return 0.0;
    }
    diff.dot(normal) / r
}

/// Which boundary condition a boundary knot carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Prescribed value `u = D(x)`.
    Dirichlet,
    /// Prescribed flux `du/dn = N(x)`.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryKnot {
    pub position: Point,
    /// Outward unit normal.
    pub normal: Point,
    pub kind: BoundaryKind,
}

impl BoundaryKnot {
    /// The normal is rescaled to unit length.
    pub fn new(position: Point, normal: Point, kind: BoundaryKind) -> Result<Self> {
        if position.dim != normal.dim {
            return Err(invalid("knot position and normal differ in dimension"));
        }
        if !position.is_finite() || !normal.is_finite() {
            return Err(invalid("knot position and normal must be finite"));
        }
        let len = normal.norm();
        if len == 0.0 {
            return Err(invalid("knot normal must be non-zero"));
        }
        let mut unit = normal;
        for c in unit.coords.iter_mut() {
            *c /= len;
        }
        Ok(BoundaryKnot {
            position,
            normal: unit,
            kind,
        })
    }
}

/// Boundary knots (with normals and condition kinds) followed by optional
/// interior knots. Matrices built from a knot set always use this order.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    boundary: Vec<BoundaryKnot>,
    interior: Vec<Point>,
}

impl KnotSet {
    pub fn new(boundary: Vec<BoundaryKnot>, interior: Vec<Point>) -> Result<Self> {
        if boundary.is_empty() {
            return Err(invalid("a knot set needs at least one boundary knot"));
        }
        let dim = boundary[0].position.dim;
        if boundary.iter().any(|k| k.position.dim != dim) || interior.iter().any(|p| p.dim != dim) {
            return Err(invalid("all knots must share one dimension"));
        }
        if interior.iter().any(|p| !p.is_finite()) {
            return Err(invalid("interior knots must be finite"));
        }
        let set = KnotSet { boundary, interior };
        set.check_distinct()?;
        Ok(set)
    }

    fn check_distinct(&self) -> Result<()> {
        let pts: Vec<Point> = self.points().collect();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = distance(&pts[i], &pts[j]);
                if d <= COINCIDENCE_TOLERANCE {
                    return Err(BkmError::DegenerateGeometry {
                        first: i,
                        second: j,
                        distance: d,
                    });
                }
            }
        }
        Ok(())
    }

    /// Same boundary, new interior knots.
    pub fn with_interior(&self, interior: Vec<Point>) -> Result<Self> {
        KnotSet::new(self.boundary.clone(), interior)
    }

    /// Reassigns boundary condition kinds with `select(index, knot)`.
    pub fn with_kinds<F>(&self, mut select: F) -> Self
    where
        F: FnMut(usize, &BoundaryKnot) -> BoundaryKind,
    {
        let boundary = self
            .boundary
            .iter()
            .enumerate()
            .map(|(i, k)| BoundaryKnot {
                kind: select(i, k),
                ..*k
            })
            .collect();
        KnotSet {
            boundary,
            interior: self.interior.clone(),
        }
    }

    pub fn dim(&self) -> usize {
        self.boundary[0].position.dim()
    }

    pub fn boundary(&self) -> &[BoundaryKnot] {
        &self.boundary
    }

    pub fn interior(&self) -> &[Point] {
        &self.interior
    }

    /// Number of boundary knots, `N`.
    pub fn boundary_len(&self) -> usize {
        self.boundary.len()
    }

    /// Number of interior knots, `L`.
    pub fn interior_len(&self) -> usize {
        self.interior.len()
    }

    /// `N + L`.
    pub fn len(&self) -> usize {
        self.boundary.len() + self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All knot positions, boundary first.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.boundary
            .iter()
            .map(|k| k.position)
            .chain(self.interior.iter().copied())
    }

    pub fn boundary_points(&self) -> impl Iterator<Item = Point> + '_ {
        self.boundary.iter().map(|k| k.position)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub center: Point,
    pub semi_major: f64,
    pub semi_minor: f64,
}

impl Ellipse {
    /// Axis-aligned ellipse with the major axis along x.
    pub fn new(center: Point, semi_major: f64, semi_minor: f64) -> Result<Self> {
        if center.dim() != 2 || !center.is_finite() {
            return Err(invalid("ellipse center must be a finite 2D point"));
        }
        if !(semi_minor > 0.0 && semi_major >= semi_minor && semi_major.is_finite()) {
            return Err(invalid(format!(
                "ellipse axes must satisfy a >= b > 0, got a = {semi_major}, b = {semi_minor}"
            )));
        }
        Ok(Ellipse {
            center,
            semi_major,
            semi_minor,
        })
    }

    /// Implicit form `((x - cx)/a)^2 + ((y - cy)/b)^2`; below 1 inside.
    pub fn level(&self, p: &Point) -> f64 {
        let u = (p.x() - self.center.x()) / self.semi_major;
        let v = (p.y() - self.center.y()) / self.semi_minor;
        u * u + v * v
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.level(p) < 1.0
    }

    /// Point at parametric angle `t`, scaled towards the center by `scale`.
    pub fn parametric(&self, t: f64, scale: f64) -> Point {
        Point::new2(
            self.center.x() + scale * self.semi_major * t.cos(),
            self.center.y() + scale * self.semi_minor * t.sin(),
        )
    }
}

/// `n` Dirichlet knots at parametric angles `2 pi k / n`, no interior knots.
pub fn ellipse_knots(ellipse: &Ellipse, n: usize) -> Result<KnotSet> {
    if n == 0 {
        return Err(invalid("knot count must be at least 1"));
    }
    let (a, b) = (ellipse.semi_major, ellipse.semi_minor);
    let boundary = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            let normal = Point::new2(b * t.cos(), a * t.sin());
            BoundaryKnot::new(ellipse.parametric(t, 1.0), normal, BoundaryKind::Dirichlet)
        })
        .collect::<Result<Vec<_>>>()?;
    KnotSet::new(boundary, Vec::new())
}
