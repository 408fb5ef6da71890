use super::raster::{RasterGlyph, NEIGHBORS8};

pub type Pixel = (usize, usize);

/// Junction of three or more branches; adjacent junction pixels are merged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crosspoint {
    pub center: Pixel,
    pub members: Vec<Pixel>,
}

/// Pixel graph of a skeleton.
///
/// Two ink pixels are linked when they are 4-adjacent, or diagonal with no
/// shared ink 4-neighbour (m-adjacency), so staircase corners do not create
/// spurious triangles.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    width: usize,
    pixels: Vec<Pixel>,
    index: Vec<Option<usize>>,
    adj: Vec<Vec<usize>>,
    endpoints: Vec<usize>,
    crosspoints: Vec<Crosspoint>,
    cluster_of: Vec<Option<usize>>,
}

fn diag_key(p: Pixel) -> (usize, usize, usize) {
    (p.0 + p.1, p.0, p.1)
}

/// Pixels with 0 or 1 neighbours are endpoints in the walker's sense; only
/// degree 1 is reported as an endpoint.
pub fn build_graph(skeleton: &RasterGlyph) -> SkeletonGraph {
    let width = skeleton.width();
    let pixels: Vec<Pixel> = skeleton.ink_pixels().collect();
    let mut index = vec![None; width * skeleton.height()];
    for (i, &(r, c)) in pixels.iter().enumerate() {
        index[r * width + c] = Some(i);
    }
    let adj: Vec<Vec<usize>> = pixels
        .iter()
        .map(|&(r, c)| {
            NEIGHBORS8
                .iter()
                .filter_map(|&(dr, dc)| {
                    let (nr, nc) = (r as isize + dr, c as isize + dc);
                    if !skeleton.get_i(nr, nc) {
                        return None;
                    }
                    if dr != 0 && dc != 0
                        && (skeleton.get_i(r as isize + dr, c as isize) || skeleton.get_i(r as isize, c as isize + dc))
                    {
                        return None;
                    }
                    index[nr as usize * width + nc as usize]
                })
                .collect()
        })
        .collect();

    let mut endpoints: Vec<usize> = (0..pixels.len()).filter(|&i| adj[i].len() == 1).collect();
    endpoints.sort_by_key(|&i| diag_key(pixels[i]));

    // clusters of branching pixels, 8-connected
    let branching: Vec<bool> = adj.iter().map(|a| a.len() >= 3).collect();
    let mut cluster_of = vec![None; pixels.len()];
    let mut crosspoints = Vec::new();
    for start in 0..pixels.len() {
        if !branching[start] || cluster_of[start].is_some() {
            continue;
        }
        let id = crosspoints.len();
        let mut members = vec![start];
        cluster_of[start] = Some(id);
        let mut k = 0;
        while k < members.len() {
            let (r, c) = pixels[members[k]];
            for (nr, nc) in skeleton.neighbors8(r, c) {
                if let Some(j) = index[nr * width + nc] {
                    if branching[j] && cluster_of[j].is_none() {
                        cluster_of[j] = Some(id);
                        members.push(j);
                    }
                }
            }
            k += 1;
        }
        members.sort_unstable();
        let n = members.len() as f64;
        let (sr, sc) = members
            .iter()
            .fold((0.0, 0.0), |(a, b), &m| (a + pixels[m].0 as f64, b + pixels[m].1 as f64));
        let (cr, cc) = (sr / n, sc / n);
        // nearest to the centroid; ties go to raster order (members are sorted)
        let center = *members
            .iter()
            .min_by(|&&a, &&b| {
                let d = |m: usize| (pixels[m].0 as f64 - cr).powi(2) + (pixels[m].1 as f64 - cc).powi(2);
                d(a).total_cmp(&d(b))
            })
            .expect("cluster has members");
        crosspoints.push(Crosspoint {
            center: pixels[center],
            members: members.iter().map(|&m| pixels[m]).collect(),
        });
    }

    SkeletonGraph {
        width,
        pixels,
        index,
        adj,
        endpoints,
        crosspoints,
        cluster_of,
    }
}

impl SkeletonGraph {
    pub fn node_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixel(&self, node: usize) -> Pixel {
        self.pixels[node]
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn node_at(&self, p: Pixel) -> Option<usize> {
        if p.1 >= self.width {
            return None;
        }
        self.index.get(p.0 * self.width + p.1).copied().flatten()
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    /// Degree-1 pixels, ordered by anti-diagonal (row + col), then row.
    pub fn endpoints(&self) -> Vec<Pixel> {
        self.endpoints.iter().map(|&i| self.pixels[i]).collect()
    }

    pub(crate) fn endpoint_nodes(&self) -> &[usize] {
        &self.endpoints
    }

    pub fn crosspoints(&self) -> &[Crosspoint] {
        &self.crosspoints
    }

    pub(crate) fn cluster_of(&self, node: usize) -> Option<usize> {
        self.cluster_of[node]
    }

    pub(crate) fn cluster_center_node(&self, k: usize) -> usize {
        self.node_at(self.crosspoints[k].center).expect("center is a node")
    }

    pub(crate) fn cluster_member_nodes(&self, k: usize) -> impl Iterator<Item = usize> + '_ {
        self.crosspoints[k]
            .members
            .iter()
            .map(|&p| self.node_at(p).expect("member is a node"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_line_has_two_endpoints() {
        let g = RasterGlyph::from_rows(&[".....", ".###.", "....."]).unwrap();
        let gr = build_graph(&g);
        assert_eq!(gr.endpoints(), vec![(1, 1), (1, 3)]);
        assert!(gr.crosspoints().is_empty());
    }

    #[test]
    fn staircase_is_a_simple_path() {
        let g = RasterGlyph::from_rows(&["##..", ".##.", "..##"]).unwrap();
        let gr = build_graph(&g);
        assert!((0..gr.node_count()).all(|i| gr.degree(i) <= 2));
        assert_eq!(gr.endpoints(), vec![(0, 0), (2, 3)]);
    }

    #[test]
    fn plus_has_one_crosspoint() {
        let g = RasterGlyph::from_rows(&["..#..", "..#..", "#####", "..#..", "..#.."]).unwrap();
        let gr = build_graph(&g);
        assert_eq!(gr.endpoints().len(), 4);
        assert_eq!(gr.crosspoints().len(), 1);
        assert_eq!(gr.crosspoints()[0].center, (2, 2));
    }

    #[test]
    fn isolated_pixel_is_not_an_endpoint() {
        let g = RasterGlyph::from_rows(&["#"]).unwrap();
        let gr = build_graph(&g);
        assert_eq!(gr.node_count(), 1);
        assert!(gr.endpoints().is_empty());
    }
}
