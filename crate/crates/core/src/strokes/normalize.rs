use crate::error::{Error, Result};

use super::bezier::{BezierStroke, Point};

/// Strokes of one character in a translation- and scale-free frame.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedChar {
    pub strokes: Vec<BezierStroke>,
    /// Point subtracted before scaling.
    pub barycenter: Point,
    pub scale: f64,
    /// The samples were collinear, so the bounding-box diagonal set the scale.
    pub collinear: bool,
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Area of the convex hull (Andrew's monotone chain).
pub fn hull_area(points: &[Point]) -> f64 {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return 0.0;
    }
    let mut hull: Vec<Point> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let n = hull.len();
    let twice: f64 = (0..n).map(|i| {
        let (a, b) = (hull[i], hull[(i + 1) % n]);
        a.x * b.y - b.x * a.y
    }).sum();
    twice.abs() / 2.0
}

const COLLINEAR_REL: f64 = 1e-9;

/// Moves the sample barycenter to the origin and scales the character so its
/// convex hull has unit area.
pub fn normalize(strokes: &[BezierStroke]) -> Result<NormalizedChar> {
    let pts: Vec<Point> = strokes.iter().flat_map(|s| s.samples.iter().copied()).collect();
    if pts.is_empty() {
        return Err(Error::EmptyInput("strokes"));
    }
    let n = pts.len() as f64;
    let bary = pts.iter().fold(Point::default(), |a, &p| a + p) * (1.0 / n);
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in &pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let diag = lo.dist(hi);
    let area = hull_area(&pts);
    let (scale, collinear) = if area > COLLINEAR_REL * diag * diag && area > 0.0 {
        (1.0 / area.sqrt(), false)
    } else if diag > 0.0 {
        (1.0 / diag, true)
    } else {
        (1.0, true)
    };
    Ok(NormalizedChar {
        strokes: strokes.iter().map(|s| s.map(|p| (p - bary) * scale)).collect(),
        barycenter: bary,
        scale,
        collinear,
    })
}

/// Normalizes two characters independently.
pub fn normalize_pair(a: &[BezierStroke], b: &[BezierStroke]) -> Result<(NormalizedChar, NormalizedChar)> {
    Ok((normalize(a)?, normalize(b)?))
}
