use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// 2-D point; `x` is the column axis, `y` the row axis.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn from_pixel((r, c): (usize, usize)) -> Self {
        Point::new(c as f64, r as f64)
    }

    pub fn dist(self, o: Point) -> f64 {
        (self.x - o.x).hypot(self.y - o.y)
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

pub const DEFAULT_SAMPLES: usize = 32;

/// Cubic Bézier with its equal-arc-length samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BezierStroke {
    pub control: [Point; 4],
    pub samples: Vec<Point>,
}

pub fn bernstein(t: f64) -> [f64; 4] {
    let u = 1.0 - t;
    [u * u * u, 3.0 * u * u * t, 3.0 * u * t * t, t * t * t]
}

pub fn eval_cubic(ctrl: &[Point; 4], t: f64) -> Point {
    let b = bernstein(t);
    ctrl[0] * b[0] + ctrl[1] * b[1] + ctrl[2] * b[2] + ctrl[3] * b[3]
}

impl BezierStroke {
    /// Builds a stroke from control points and resamples it.
    pub fn from_control(control: [Point; 4], m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument("need at least 2 samples per stroke".into()));
        }
        let samples = resample(&control, m);
        Ok(BezierStroke { control, samples })
    }

    pub fn reversed(&self) -> Self {
        let [a, b, c, d] = self.control;
        BezierStroke {
            control: [d, c, b, a],
            samples: self.samples.iter().rev().copied().collect(),
        }
    }

    pub(crate) fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        BezierStroke {
            control: self.control.map(&f),
            samples: self.samples.iter().map(|&p| f(p)).collect(),
        }
    }
}

/// Least-squares cubic through a pixel path with both endpoints pinned.
///
/// The path is treated as a polyline and resampled at fixed arc-length
/// steps, so the fit does not depend on how densely the path is sampled.
/// Parameters start at normalized arc length and are refined by projecting
/// each sample onto the current curve. Returns `m` samples spaced equally
/// in arc length along the fitted curve.
pub fn fit_bezier(path: &[Point], m: usize) -> Result<BezierStroke> {
    if path.len() < 2 {
        return Err(Error::DegenerateStroke);
    }
    let p0 = path[0];
    let p3 = path[path.len() - 1];
    let Some(pts) = polyline_resample(path, FIT_POINTS) else {
        return BezierStroke::from_control([p0; 4], m);
    };
    let mut t: Vec<f64> = (0..FIT_POINTS).map(|i| i as f64 / (FIT_POINTS - 1) as f64).collect();
    let mut control = solve_inner(&pts, &t, p0, p3);
    // Alternate once to settle the parameters, then refine the orthogonal
    // distances with damped Gauss-Newton.
    project(&pts, &mut t, &control);
    control = solve_inner(&pts, &t, p0, p3);
    project(&pts, &mut t, &control);
    let scale = 1.0 + p0.dist(p3);
    // a step may not stretch the curve past the path it approximates, which
    // rules out loops and excursions that no path point pins down
    let path_len: f64 = path.windows(2).map(|w| w[0].dist(w[1])).sum();
    let mut length_cap = path_len.max(curve_length(&control));
    let mut cost = orthogonal_cost(&pts, &t, &control);
    let mut lambda = 1e-3;
    for _ in 0..MAX_ROUNDS {
        let (jtj, jtr) = normal_equations(&pts, &t, &control);
        let mut damped = jtj;
        for (k, row) in damped.iter_mut().enumerate() {
            row[k] += lambda * (jtj[k][k] + 1e-12);
        }
        let Some(step) = solve4(damped, jtr.map(|v| -v)) else {
            break;
        };
        let mut next = control;
        next[1] = next[1] + Point::new(step[0], step[1]);
        next[2] = next[2] + Point::new(step[2], step[3]);
        let mut next_t = t.clone();
        project(&pts, &mut next_t, &next);
        let next_cost = orthogonal_cost(&pts, &next_t, &next);
        let size = step.iter().map(|v| v * v).sum::<f64>().sqrt();
        let next_len = curve_length(&next);
        if next_cost <= cost && next_len <= length_cap {
            length_cap = length_cap.min(path_len.max(next_len));
            control = next;
            t = next_t;
            cost = next_cost;
            lambda = (lambda * 0.3).max(1e-12);
        } else {
            lambda *= 10.0;
        }
        if size < 1e-10 * scale || lambda > 1e8 {
            break;
        }
    }
    BezierStroke::from_control(control, m)
}

const FIT_POINTS: usize = 64;
const MAX_ROUNDS: usize = 100;

/// `n` points equally spaced in arc length along a polyline, or `None` if it
/// has zero length.
fn polyline_resample(path: &[Point], n: usize) -> Option<Vec<Point>> {
    let mut cum = Vec::with_capacity(path.len());
    cum.push(0.0);
    for w in path.windows(2) {
        cum.push(cum[cum.len() - 1] + w[0].dist(w[1]));
    }
    let total = cum[cum.len() - 1];
    if total <= 0.0 {
        return None;
    }
    let mut out = Vec::with_capacity(n);
    let mut j = 0;
    for k in 0..n {
        let s = total * k as f64 / (n - 1) as f64;
        while j + 2 < cum.len() && cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let f = if seg > 0.0 { ((s - cum[j]) / seg).clamp(0.0, 1.0) } else { 0.0 };
        out.push(path[j] + (path[j + 1] - path[j]) * f);
    }
    out[0] = path[0];
    out[n - 1] = path[path.len() - 1];
    Some(out)
}

/// Inner control points minimizing the squared error at parameters `t`.
fn solve_inner(pts: &[Point], t: &[f64], p0: Point, p3: Point) -> [Point; 4] {
    let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
    let mut r1 = Point::default();
    let mut r2 = Point::default();
    for (&p, &ti) in pts.iter().zip(t) {
        let b = bernstein(ti);
        a11 += b[1] * b[1];
        a12 += b[1] * b[2];
        a22 += b[2] * b[2];
        let rest = p - p0 * b[0] - p3 * b[3];
        r1 = r1 + rest * b[1];
        r2 = r2 + rest * b[2];
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() < 1e-12 {
        let d = p3 - p0;
        return [p0, p0 + d * (1.0 / 3.0), p0 + d * (2.0 / 3.0), p3];
    }
    let p1 = (r1 * a22 - r2 * a12) * (1.0 / det);
    let p2 = (r2 * a11 - r1 * a12) * (1.0 / det);
    [p0, p1, p2, p3]
}

fn derivative(ctrl: &[Point; 4], t: f64) -> (Point, Point) {
    let u = 1.0 - t;
    let d1 = (ctrl[1] - ctrl[0]) * (3.0 * u * u) + (ctrl[2] - ctrl[1]) * (6.0 * u * t) + (ctrl[3] - ctrl[2]) * (3.0 * t * t);
    let d2 = (ctrl[2] - ctrl[1] * 2.0 + ctrl[0]) * (6.0 * u) + (ctrl[3] - ctrl[2] * 2.0 + ctrl[1]) * (6.0 * t);
    (d1, d2)
}

/// Moves each interior parameter to the nearby closest point on the curve.
fn project(pts: &[Point], t: &mut [f64], ctrl: &[Point; 4]) {
    for i in 1..t.len() - 1 {
        for _ in 0..4 {
            let diff = eval_cubic(ctrl, t[i]) - pts[i];
            let (d1, d2) = derivative(ctrl, t[i]);
            let num = diff.x * d1.x + diff.y * d1.y;
            let den = d1.x * d1.x + d1.y * d1.y + diff.x * d2.x + diff.y * d2.y;
            if den <= 0.0 {
                break;
            }
            t[i] = (t[i] - num / den).clamp(0.0, 1.0);
        }
    }
}

fn curve_length(ctrl: &[Point; 4]) -> f64 {
    const N: usize = 64;
    let mut prev = ctrl[0];
    let mut total = 0.0;
    for i in 1..=N {
        let p = eval_cubic(ctrl, i as f64 / N as f64);
        total += prev.dist(p);
        prev = p;
    }
    total
}

fn orthogonal_cost(pts: &[Point], t: &[f64], ctrl: &[Point; 4]) -> f64 {
    pts.iter()
        .zip(t)
        .map(|(&p, &ti)| {
            let d = eval_cubic(ctrl, ti) - p;
            d.x * d.x + d.y * d.y
        })
        .sum()
}

/// Gauss-Newton system for the inner control points, with each residual
/// measured along the curve normal at its foot point.
fn normal_equations(pts: &[Point], t: &[f64], ctrl: &[Point; 4]) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut jtj = [[0.0; 4]; 4];
    let mut jtr = [0.0; 4];
    for (&p, &ti) in pts.iter().zip(t) {
        let (d1, _) = derivative(ctrl, ti);
        let len = d1.x.hypot(d1.y);
        if len <= 0.0 {
            continue;
        }
        let n = Point::new(-d1.y / len, d1.x / len);
        let diff = eval_cubic(ctrl, ti) - p;
        let r = diff.x * n.x + diff.y * n.y;
        let b = bernstein(ti);
        let row = [b[1] * n.x, b[1] * n.y, b[2] * n.x, b[2] * n.y];
        for i in 0..4 {
            jtr[i] += row[i] * r;
            for j in 0..4 {
                jtj[i][j] += row[i] * row[j];
            }
        }
    }
    (jtj, jtr)
}

fn solve4(mut a: [[f64; 4]; 4], mut b: [f64; 4]) -> Option<[f64; 4]> {
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = [0.0; 4];
    for r in (0..4).rev() {
        let s: f64 = (r + 1..4).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}

const DENSE: usize = 512;

/// `m` points equally spaced in arc length; the ends are the exact endpoints.
pub fn resample(ctrl: &[Point; 4], m: usize) -> Vec<Point> {
    let ts: Vec<f64> = (0..=DENSE).map(|i| i as f64 / DENSE as f64).collect();
    let pts: Vec<Point> = ts.iter().map(|&t| eval_cubic(ctrl, t)).collect();
    let mut cum = vec![0.0; pts.len()];
    for i in 1..pts.len() {
        cum[i] = cum[i - 1] + pts[i - 1].dist(pts[i]);
    }
    let total = cum[DENSE];
    let mut out = Vec::with_capacity(m);
    out.push(ctrl[0]);
    let mut j = 0;
    for k in 1..m - 1 {
        if total <= 0.0 {
            out.push(ctrl[0]);
            continue;
        }
        let s = total * k as f64 / (m - 1) as f64;
        while j + 1 < DENSE && cum[j + 1] < s {
            j += 1;
        }
        let seg = cum[j + 1] - cum[j];
        let f = if seg > 0.0 { (s - cum[j]) / seg } else { 0.0 };
        out.push(eval_cubic(ctrl, ts[j] + f * (ts[j + 1] - ts[j])));
    }
    out.push(ctrl[3]);
    out
}
