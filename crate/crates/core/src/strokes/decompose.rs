use std::collections::VecDeque;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;

use super::bezier::{fit_bezier, BezierStroke, Point};
use super::graph::{Pixel, SkeletonGraph};

pub const DEFAULT_REMARK_BUDGET: usize = 4;

/// Pixel path followed by the pen for one stroke.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrokeTrace {
    /// Pen positions in drawing order; junctions appear as their centre.
    pub path: Vec<Pixel>,
    /// Every skeleton pixel the stroke covers, including junction members.
    pub pixels: Vec<Pixel>,
    pub closed: bool,
}

/// One sampled way of drawing the skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrokeDecomposition {
    pub traces: Vec<StrokeTrace>,
    pub rng_seed: u64,
    /// Pixels walked over a second time to bridge dead ends, summed over strokes.
    pub remark_budget_used: usize,
}

impl StrokeDecomposition {
    /// Fits one cubic per trace. Single-pixel traces become zero-length strokes.
    pub fn fit(&self, m: usize) -> Result<Vec<BezierStroke>> {
        self.traces
            .iter()
            .map(|t| {
                let mut pts: Vec<Point> = t.path.iter().map(|&p| Point::from_pixel(p)).collect();
                if pts.len() == 1 {
                    pts.push(pts[0]);
                }
                fit_bezier(&pts, m)
            })
            .collect()
    }
}

#[derive(Clone, Copy)]
enum At {
    Pixel(usize),
    Cluster(usize),
}

struct Walker<'g> {
    g: &'g SkeletonGraph,
    marked: Vec<bool>,
    rng: ChaCha8Rng,
    budget: usize,
}

impl<'g> Walker<'g> {
    fn diag_order(&self, n: usize) -> (usize, usize, usize) {
        let (r, c) = self.g.pixel(n);
        (r + c, r, c)
    }

    fn exits(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .g
            .cluster_member_nodes(k)
            .flat_map(|m| self.g.neighbors(m).iter().copied())
            .filter(|&n| !self.marked[n] && self.g.cluster_of(n).is_none())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn start(&mut self) -> Option<At> {
        let free: Vec<usize> = self
            .g
            .endpoint_nodes()
            .iter()
            .copied()
            .filter(|&n| !self.marked[n])
            .collect();
        if !free.is_empty() {
            let weights: Vec<f64> = (0..free.len()).map(|r| 1.0 / (r + 1) as f64).collect();
            let pick = WeightedIndex::new(&weights).expect("positive weights").sample(&mut self.rng);
            return Some(At::Pixel(free[pick]));
        }
        let mut clusters: Vec<usize> = (0..self.g.crosspoints().len())
            .filter(|&k| !self.exits(k).is_empty())
            .collect();
        clusters.sort_by_key(|&k| self.diag_order(self.g.cluster_center_node(k)));
        if let Some(&k) = clusters.first() {
            return Some(At::Cluster(k));
        }
        let n = (0..self.g.node_count())
            .filter(|&n| !self.marked[n])
            .min_by_key(|&n| self.diag_order(n))?;
        Some(match self.g.cluster_of(n) {
            Some(k) => At::Cluster(k),
            None => At::Pixel(n),
        })
    }

    /// Shortest route over already-drawn, non-junction pixels to one that
    /// still has an undrawn neighbour.
    fn remark_route(&self, from: usize, limit: usize) -> Option<Vec<usize>> {
        if limit == 0 {
            return None;
        }
        let mut prev = vec![usize::MAX; self.g.node_count()];
        let mut depth = vec![0usize; self.g.node_count()];
        prev[from] = from;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            if u != from
                && self
                    .g
                    .neighbors(u)
                    .iter()
                    .any(|&v| !self.marked[v] && self.g.cluster_of(v).is_none())
            {
                let mut route = vec![u];
                let mut x = u;
                while prev[x] != from {
                    x = prev[x];
                    route.push(x);
                }
                route.reverse();
                return Some(route);
            }
            if depth[u] == limit {
                continue;
            }
            for &v in self.g.neighbors(u) {
                if prev[v] == usize::MAX && self.marked[v] && self.g.cluster_of(v).is_none() {
                    prev[v] = u;
                    depth[v] = depth[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Uniform index; draws from the stream only when there is a choice.
    fn pick(&mut self, n: usize) -> usize {
        if n > 1 {
            self.rng.gen_range(0..n)
        } else {
            0
        }
    }

    fn mark_cluster(&mut self, k: usize, pixels: &mut Vec<usize>) {
        let members: Vec<usize> = self.g.cluster_member_nodes(k).collect();
        for m in members {
            self.marked[m] = true;
            pixels.push(m);
        }
    }

    fn walk(&mut self, start: At) -> (StrokeTrace, usize) {
        let mut path = Vec::new();
        let mut pixels = Vec::new();
        let mut used = 0usize;
        let mut last_cluster: Option<usize> = None;
        let mut at = start;
        let start_pixel = match start {
            At::Pixel(n) => {
                self.marked[n] = true;
                path.push(n);
                pixels.push(n);
                Some(n)
            }
            At::Cluster(k) => {
                self.mark_cluster(k, &mut pixels);
                path.push(self.g.cluster_center_node(k));
                None
            }
        };
        let mut first = true;
        loop {
            match at {
                At::Cluster(k) => {
                    let exits = self.exits(k);
                    if exits.is_empty() || (!first && self.rng.gen_bool(0.5)) {
                        break;
                    }
                    let e = exits[self.pick(exits.len())];
                    self.marked[e] = true;
                    path.push(e);
                    pixels.push(e);
                    last_cluster = Some(k);
                    at = At::Pixel(e);
                }
                At::Pixel(n) => {
                    if let Some(lc) = last_cluster {
                        if !self.g.neighbors(n).iter().any(|&v| self.g.cluster_of(v) == Some(lc)) {
                            last_cluster = None;
                        }
                    }
                    let junction = self
                        .g
                        .neighbors(n)
                        .iter()
                        .filter_map(|&v| self.g.cluster_of(v))
                        .filter(|&k| Some(k) != last_cluster)
                        .min();
                    if let Some(k) = junction {
                        self.mark_cluster(k, &mut pixels);
                        path.push(self.g.cluster_center_node(k));
                        at = At::Cluster(k);
                        first = false;
                        continue;
                    }
                    let next: Vec<usize> = self
                        .g
                        .neighbors(n)
                        .iter()
                        .copied()
                        .filter(|&v| !self.marked[v] && self.g.cluster_of(v).is_none())
                        .collect();
                    if !next.is_empty() {
                        let v = next[self.pick(next.len())];
                        self.marked[v] = true;
                        path.push(v);
                        pixels.push(v);
                        at = At::Pixel(v);
                    } else if let Some(route) = self.remark_route(n, self.budget - used) {
                        used += route.len();
                        path.extend_from_slice(&route);
                        at = At::Pixel(*route.last().expect("route is non-empty"));
                    } else {
                        break;
                    }
                }
            }
            first = false;
        }
        let mut closed = false;
        if let Some(s) = start_pixel {
            let last = *path.last().expect("path is non-empty");
            if path.len() >= 4 && last != s && self.g.is_adjacent(last, s) {
                path.push(s);
                closed = true;
            }
        }
        pixels.sort_unstable();
        pixels.dedup();
        let trace = StrokeTrace {
            path: path.into_iter().map(|n| self.g.pixel(n)).collect(),
            pixels: pixels.into_iter().map(|n| self.g.pixel(n)).collect(),
            closed,
        };
        (trace, used)
    }
}

/// Samples one decomposition of the skeleton into pen strokes.
///
/// Strokes start at a free endpoint (earlier anti-diagonal positions are
/// favoured), then at a junction with an undrawn branch, then at the
/// top-left undrawn pixel. At each junction the pen lifts or continues with
/// equal probability and picks an undrawn branch uniformly. A stroke stuck at
/// a dead end may retrace up to `remark_budget` drawn pixels to reach an
/// undrawn one. The random stream is only consumed at genuine choices, so a
/// scaled copy of a glyph draws the same decisions. The same graph, seed and
/// budget always give the same result.
pub fn extract_decomposition(graph: &SkeletonGraph, seed: u64, remark_budget: usize) -> StrokeDecomposition {
    let mut w = Walker {
        g: graph,
        marked: vec![false; graph.node_count()],
        rng: ChaCha8Rng::seed_from_u64(seed),
        budget: remark_budget,
    };
    let mut traces = Vec::new();
    let mut total = 0;
    while let Some(start) = w.start() {
        let (t, used) = w.walk(start);
        total += used;
        traces.push(t);
    }
    StrokeDecomposition {
        traces,
        rng_seed: seed,
        remark_budget_used: total,
    }
}
