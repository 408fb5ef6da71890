use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::strokes::bezier::{eval_cubic, Point};
use crate::strokes::normalize::hull_area;
use crate::strokes::raster::RasterGlyph;

pub const DEFAULT_JITTER: f64 = 2.0;
pub const MIN_CANVAS: usize = 16;
/// Programs whose hull is smaller than a square of this fraction of the
/// drawable side are redrawn: near-straight glyphs have no stable area scale.
pub const MIN_HULL_FRACTION: f64 = 0.25;

/// Random pen program: the identity of a synthetic class.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphProgram {
    pub class_id: usize,
    pub strokes: Vec<[Point; 4]>,
}

impl GlyphProgram {
    pub fn stroke_count(&self) -> usize {
        self.strokes.len()
    }

    /// 1–4 cubic strokes with control points kept `margin` pixels inside the
    /// canvas. Each stroke spans at least a third of the drawable width and
    /// its control points advance monotonically along the chord, so a single
    /// stroke never loops back on itself.
    pub fn random(rng: &mut impl Rng, class_id: usize, canvas: usize, margin: f64) -> Self {
        let hi = canvas as f64 - 1.0 - margin;
        let span = hi - margin;
        let n = rng.gen_range(1..=4);
        let point = |rng: &mut _| Point::new(rng_coord(rng, margin, hi), rng_coord(rng, margin, hi));
        let strokes = (0..n)
            .map(|_| loop {
                let p0 = point(rng);
                let p3 = point(rng);
                let chord = p3 - p0;
                let len = p0.dist(p3);
                if len < span / 3.0 {
                    continue;
                }
                let normal = Point::new(-chord.y / len, chord.x / len);
                let bend = len / 3.0;
                let p1 = p0 + chord * (1.0 / 3.0) + normal * rng.gen_range(-bend..=bend);
                let p2 = p0 + chord * (2.0 / 3.0) + normal * rng.gen_range(-bend..=bend);
                let inside = |p: Point| (margin..=hi).contains(&p.x) && (margin..=hi).contains(&p.y);
                if inside(p1) && inside(p2) {
                    break [p0, p1, p2, p3];
                }
            })
            .collect();
        GlyphProgram { class_id, strokes }
    }

    /// Convex-hull area of the undistorted strokes, in square pixels.
    pub fn hull_area(&self) -> f64 {
        let pts: Vec<Point> = self
            .strokes
            .iter()
            .flat_map(|c| (0..=32).map(move |i| eval_cubic(c, i as f64 / 32.0)))
            .collect();
        hull_area(&pts)
    }

    /// Draws the program with each control point shifted by up to `jitter`
    /// pixels on each axis. Strokes are traced densely and stamped at width 1.
    pub fn render(&self, canvas: usize, jitter: f64, rng: &mut impl Rng) -> RasterGlyph {
        let mut g = RasterGlyph::blank(canvas, canvas).expect("canvas is non-empty");
        let max = canvas as f64 - 1.0;
        for ctrl in &self.strokes {
            let ctrl = ctrl.map(|p| {
                if jitter > 0.0 {
                    Point::new(
                        (p.x + rng.gen_range(-jitter..=jitter)).clamp(0.0, max),
                        (p.y + rng.gen_range(-jitter..=jitter)).clamp(0.0, max),
                    )
                } else {
                    p
                }
            });
            let poly: f64 = ctrl.windows(2).map(|w| w[0].dist(w[1])).sum();
            let steps = ((poly * 4.0).ceil() as usize).max(8);
            for i in 0..=steps {
                let p = eval_cubic(&ctrl, i as f64 / steps as f64);
                g.set(p.y.round() as usize, p.x.round() as usize, true);
            }
        }
        g
    }
}

fn rng_coord(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..=hi)
}

/// Synthetic glyph corpus: one random program per class, `per_class`
/// jittered renders of each. Output is grouped by class.
pub fn gen_glyphs(n_classes: usize, per_class: usize, canvas: usize, master_seed: u64) -> Result<Vec<(RasterGlyph, usize)>> {
    gen_glyphs_with(n_classes, per_class, canvas, master_seed, DEFAULT_JITTER)
}

pub fn gen_glyphs_with(
    n_classes: usize,
    per_class: usize,
    canvas: usize,
    master_seed: u64,
    jitter: f64,
) -> Result<Vec<(RasterGlyph, usize)>> {
    if canvas < MIN_CANVAS {
        return Err(Error::InvalidArgument(format!("canvas must be at least {MIN_CANVAS} pixels")));
    }
    if !(0.0..=canvas as f64 / 4.0).contains(&jitter) {
        return Err(Error::InvalidArgument("jitter out of range".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    let margin = jitter.ceil() + 1.0;
    let min_area = ((canvas as f64 - 2.0 * margin) * MIN_HULL_FRACTION).powi(2);
    let programs: Vec<GlyphProgram> = (0..n_classes)
        .map(|c| loop {
            let p = GlyphProgram::random(&mut rng, c, canvas, margin);
            if p.hull_area() >= min_area {
                break p;
            }
        })
        .collect();
    let mut out = Vec::with_capacity(n_classes * per_class);
    for p in &programs {
        for _ in 0..per_class {
            out.push((p.render(canvas, jitter, &mut rng), p.class_id));
        }
    }
    Ok(out)
}

/// One N-way one-shot glyph task.
#[derive(Clone, Debug, PartialEq)]
pub struct GlyphEpisode {
    pub support: Vec<(RasterGlyph, String)>,
    pub queries: Vec<(RasterGlyph, String)>,
    pub seed: u64,
}

/// Synthetic `ways`-way episode: two renders of each of `ways` fresh
/// programs, the first as support and the second as query.
pub fn synthetic_episode(ways: usize, canvas: usize, seed: u64) -> Result<GlyphEpisode> {
    let glyphs = gen_glyphs(ways, 2, canvas, seed)?;
    let mut support = Vec::with_capacity(ways);
    let mut queries = Vec::with_capacity(ways);
    for pair in glyphs.chunks(2) {
        let label = format!("class{:03}", pair[0].1);
        support.push((pair[0].0.clone(), label.clone()));
        queries.push((pair[1].0.clone(), label));
    }
    Ok(GlyphEpisode { support, queries, seed })
}

/// Seeded `ways`-way one-shot episodes over labelled glyph sets. Each
/// episode picks `ways` classes present in both sets and one support glyph
/// per class; the query is the sample at the same position of the class in
/// the query set (modulo its size), so identical sets give identical pairs.
/// With `same_source` only `support` is used and the support and query of a
/// class are two distinct samples. Episode `i` uses the seed
/// `master_seed + i`.
pub fn sample_glyph_episodes(
    support: &[(RasterGlyph, String)],
    queries: &[(RasterGlyph, String)],
    ways: usize,
    episodes: usize,
    master_seed: u64,
    same_source: bool,
) -> Result<Vec<GlyphEpisode>> {
    use std::collections::BTreeMap;
    let group = |set: &[(RasterGlyph, String)]| {
        let mut m: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, (_, l)) in set.iter().enumerate() {
            m.entry(l.clone()).or_default().push(i);
        }
        m
    };
    let s_by = group(support);
    let q_by = group(queries);
    let min_samples = if same_source { 2 } else { 1 };
    let classes: Vec<&String> = s_by
        .iter()
        .filter(|(l, v)| v.len() >= min_samples && q_by.contains_key(*l))
        .map(|(l, _)| l)
        .collect();
    if ways < 2 || ways > classes.len() {
        return Err(Error::InvalidArgument(format!(
            "{ways}-way episodes need between 2 and {} usable classes",
            classes.len()
        )));
    }
    let mut out = Vec::with_capacity(episodes);
    for e in 0..episodes {
        let seed = master_seed.wrapping_add(e as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut chosen = rand::seq::index::sample(&mut rng, classes.len(), ways).into_vec();
        chosen.sort_unstable();
        let mut ep = GlyphEpisode {
            support: Vec::with_capacity(ways),
            queries: Vec::with_capacity(ways),
            seed,
        };
        for c in chosen {
            let label = classes[c];
            let pool = &s_by[label];
            if same_source {
                let pick = rand::seq::index::sample(&mut rng, pool.len(), 2);
                ep.support.push(support[pool[pick.index(0)]].clone());
                ep.queries.push(support[pool[pick.index(1)]].clone());
            } else {
                let qpool = &q_by[label];
                let i = rng.gen_range(0..pool.len());
                ep.support.push(support[pool[i]].clone());
                ep.queries.push(queries[qpool[i % qpool.len()]].clone());
            }
        }
        out.push(ep);
    }
    Ok(out)
}

/// Glyph directory laid out as `class/sample.pgm`. Classes and samples are
/// returned in lexicographic order; any other regular file is an error.
pub fn load_glyph_dir(dir: impl AsRef<Path>) -> Result<Vec<(RasterGlyph, String)>> {
    let dir = dir.as_ref();
    let mut classes = sorted_entries(dir)?;
    classes.retain(|p| p.is_dir());
    let mut out = Vec::new();
    for class_dir in classes {
        let name = class_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        for file in sorted_entries(&class_dir)? {
            if file.is_dir() {
                continue;
            }
            let is_pgm = file
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if !is_pgm {
                return Err(Error::Data {
                    path: file,
                    message: "not a PGM file".into(),
                });
            }
            out.push((RasterGlyph::read_pgm(&file)?, name.clone()));
        }
    }
    if out.is_empty() {
        return Err(Error::Data {
            path: dir.to_path_buf(),
            message: "no glyphs found".into(),
        });
    }
    Ok(out)
}

fn sorted_entries(dir: &Path) -> Result<Vec<PathBuf>> {
    let rd = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut v = Vec::new();
    for entry in rd {
        v.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    v.sort();
    Ok(v)
}

/// Writes glyphs as `dir/<label>/<index>.pgm`.
pub fn write_glyph_dir(dir: impl AsRef<Path>, glyphs: &[(RasterGlyph, String)]) -> Result<()> {
    let dir = dir.as_ref();
    for (i, (g, label)) in glyphs.iter().enumerate() {
        let class_dir = dir.join(label);
        std::fs::create_dir_all(&class_dir).map_err(|e| Error::io(&class_dir, e))?;
        g.write_pgm(class_dir.join(format!("{i:04}.pgm")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_grouped() {
        let a = gen_glyphs(5, 2, 32, 7).unwrap();
        let b = gen_glyphs(5, 2, 32, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.iter().map(|(_, c)| *c).collect::<Vec<_>>(), vec![0, 0, 1, 1, 2, 2, 3, 3, 4, 4]);
        assert!(a.iter().all(|(g, _)| g.ink_count() > 0));
        assert_ne!(a, gen_glyphs(5, 2, 32, 8).unwrap());
    }

    #[test]
    fn zero_jitter_renders_are_identical() {
        let g = gen_glyphs_with(4, 3, 24, 1, 0.0).unwrap();
        for c in g.chunks(3) {
            assert_eq!(c[0].0, c[1].0);
            assert_eq!(c[1].0, c[2].0);
        }
    }

    #[test]
    fn small_canvas_rejected() {
        assert!(gen_glyphs(2, 1, 15, 0).is_err());
    }

    #[test]
    fn directory_round_trip() {
        let tmp = tempfile::tempdir().unwrap();
        let glyphs: Vec<(RasterGlyph, String)> = gen_glyphs(3, 1, 20, 2)
            .unwrap()
            .into_iter()
            .map(|(g, c)| (g, format!("class{c}")))
            .collect();
        write_glyph_dir(tmp.path(), &glyphs).unwrap();
        assert_eq!(load_glyph_dir(tmp.path()).unwrap(), glyphs);
        std::fs::write(tmp.path().join("class0").join("notes.txt"), "x").unwrap();
        assert!(load_glyph_dir(tmp.path()).is_err());
    }
}
