use rand::Rng;

use super::point::{Point, MAX_DIM};
use crate::error::{Error, Result};

/// Attempt cap shared by every rejection sampler in the crate.
pub const MAX_REJECTION_ATTEMPTS: u64 = 1_000_000;

/// A compact convex region with nonempty interior.
#[derive(Debug, Clone, PartialEq)]
pub enum Workspace {
    Interval { lo: f64, hi: f64 },
    /// Axis-aligned box in 2 or 3 dimensions.
    Box { lo: Point, hi: Point },
    /// Convex polygon given by counterclockwise vertices.
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Workspace {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidWorkspace(format!(
                "interval needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Workspace::Interval { lo, hi })
    }

    pub fn unit_interval() -> Self {
        Workspace::Interval { lo: 0.0, hi: 1.0 }
    }

    pub fn boxed(lo: &[f64], hi: &[f64]) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || lo.len() > MAX_DIM {
            return Err(Error::InvalidWorkspace(format!(
                "box corners must share a dimension in 1..={MAX_DIM}"
            )));
        }
        for (a, b) in lo.iter().zip(hi) {
            if !(a.is_finite() && b.is_finite() && a < b) {
                return Err(Error::InvalidWorkspace(
                    "box needs finite lo < hi on every axis".into(),
                ));
            }
        }
        if lo.len() == 1 {
            return Workspace::interval(lo[0], hi[0]);
        }
        Ok(Workspace::Box {
            lo: Point::new(lo),
            hi: Point::new(hi),
        })
    }

    pub fn unit_square() -> Self {
        Workspace::Box {
            lo: Point::xy(0.0, 0.0),
            hi: Point::xy(1.0, 1.0),
        }
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidWorkspace(
                "polygon needs at least 3 vertices".into(),
            ));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidWorkspace("polygon vertex is not finite".into()));
        }
        let mut turning = 0.0;
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let e1 = [b[0] - a[0], b[1] - a[1]];
            let e2 = [c[0] - b[0], c[1] - b[1]];
            let cross = e1[0] * e2[1] - e1[1] * e2[0];
            if cross <= 0.0 {
                return Err(Error::InvalidWorkspace(format!(
                    "polygon is not strictly convex counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
            let dot = e1[0] * e2[0] + e1[1] * e2[1];
            turning += cross.atan2(dot);
        }
        // A star-shaped vertex order turns left everywhere but winds more than once.
        if (turning - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(Error::InvalidWorkspace(
                "polygon boundary winds more than once".into(),
            ));
        }
        Ok(Workspace::Polygon { vertices })
    }

    pub fn dim(&self) -> usize {
        match self {
            Workspace::Interval { .. } => 1,
            Workspace::Box { lo, .. } => lo.dim(),
            Workspace::Polygon { .. } => 2,
        }
    }

    /// Corners of the axis-aligned bounding box.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Workspace::Interval { lo, hi } => (Point::x(*lo), Point::x(*hi)),
            Workspace::Box { lo, hi } => (*lo, *hi),
            Workspace::Polygon { vertices } => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for v in vertices {
                    for a in 0..2 {
                        lo[a] = lo[a].min(v[a]);
                        hi[a] = hi[a].max(v[a]);
                    }
                }
                (Point::new(&lo), Point::new(&hi))
            }
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Workspace::Interval { lo, hi } => hi - lo,
            Workspace::Box { lo, hi } => (*hi - *lo).norm(),
            Workspace::Polygon { vertices } => {
                let mut d: f64 = 0.0;
                for (i, a) in vertices.iter().enumerate() {
                    for b in &vertices[i + 1..] {
                        d = d.max(((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt());
                    }
                }
                d
            }
        }
    }

    /// Lebesgue measure (length, area, or volume).
    pub fn volume(&self) -> f64 {
        match self {
            Workspace::Interval { lo, hi } => hi - lo,
            Workspace::Box { lo, hi } => (*hi - *lo).coords().iter().product(),
            Workspace::Polygon { vertices } => {
                let n = vertices.len();
                let twice: f64 = (0..n)
                    .map(|i| {
                        let a = vertices[i];
                        let b = vertices[(i + 1) % n];
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum();
                0.5 * twice
            }
        }
    }

    /// Membership test. Polygon edges get a tolerance of a few ulps of the
    /// workspace scale so that projected points always test inside.
    pub fn contains(&self, p: &Point) -> bool {
        if p.dim() != self.dim() || !p.is_finite() {
            return false;
        }
        match self {
            Workspace::Interval { lo, hi } => *lo <= p[0] && p[0] <= *hi,
            Workspace::Box { lo, hi } => (0..lo.dim()).all(|a| lo[a] <= p[a] && p[a] <= hi[a]),
            Workspace::Polygon { vertices } => {
                let tol = 1e-12 * self.diameter().max(1.0);
                let n = vertices.len();
                (0..n).all(|i| {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % n];
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let len = (ex * ex + ey * ey).sqrt();
                    (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / len >= -tol
                })
            }
        }
    }

    /// Euclidean projection onto the region.
    pub fn project(&self, p: &Point) -> Point {
        debug_assert_eq!(p.dim(), self.dim());
        match self {
            Workspace::Interval { lo, hi } => Point::x(p[0].clamp(*lo, *hi)),
            Workspace::Box { lo, hi } => {
                let mut out = *p;
                for a in 0..lo.dim() {
                    out = out.with_coord(a, p[a].clamp(lo[a], hi[a]));
                }
                out
            }
            Workspace::Polygon { vertices } => {
                if self.contains(p) {
                    return *p;
                }
                let n = vertices.len();
                let mut best = *p;
                let mut best_d = f64::INFINITY;
                for i in 0..n {
                    let a = Point::new(&vertices[i]);
                    let b = Point::new(&vertices[(i + 1) % n]);
                    let e = b - a;
                    let t = ((*p - a).dot(&e) / e.norm_sq()).clamp(0.0, 1.0);
                    let q = if t == 1.0 { b } else { a + e * t };
                    let d = (*p - q).norm_sq();
                    if d < best_d {
                        best_d = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    /// Uniform sample from the region.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Point> {
        let (lo, hi) = self.bounding_box();
        let draw = |rng: &mut R| {
            let mut c = [0.0; MAX_DIM];
            for a in 0..lo.dim() {
                c[a] = rng.random_range(lo[a]..hi[a]);
            }
            Point::new(&c[..lo.dim()])
        };
        match self {
            Workspace::Interval { .. } | Workspace::Box { .. } => Ok(draw(rng)),
            Workspace::Polygon { .. } => {
                for _ in 0..MAX_REJECTION_ATTEMPTS {
                    let p = draw(rng);
                    if self.contains(&p) {
                        return Ok(p);
                    }
                }
                Err(Error::DegenerateDistribution {
                    attempts: MAX_REJECTION_ATTEMPTS,
                })
            }
        }
    }

    pub fn check_contains(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: p.dim(),
            });
        }
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutsideWorkspace {
                point: p.to_string(),
            })
        }
    }
}
