use rayon::prelude::*;

use crate::error::{Error, Result};

use super::assign::min_cost_assignment;
use super::bezier::{BezierStroke, DEFAULT_SAMPLES};
use super::decompose::{extract_decomposition, DEFAULT_REMARK_BUDGET};
use super::graph::build_graph;
use super::normalize::{normalize, NormalizedChar};
use super::raster::RasterGlyph;
use super::skeleton::skeletonize;

/// Cost of a stroke with no partner: the diameter of the normalized frame.
pub const UNMATCHED_STROKE_COST: f64 = std::f64::consts::SQRT_2;

pub const DEFAULT_DECOMPOSITIONS: usize = 16;

/// Max pointwise distance between two equally sampled strokes, taking the
/// better of the two drawing directions.
pub fn stroke_distance(s: &BezierStroke, t: &BezierStroke) -> Result<f64> {
    if s.samples.len() != t.samples.len() {
        return Err(Error::SampleCountMismatch(s.samples.len(), t.samples.len()));
    }
    let fwd = s
        .samples
        .iter()
        .zip(&t.samples)
        .map(|(a, b)| a.dist(*b))
        .fold(0.0, f64::max);
    let rev = s
        .samples
        .iter()
        .zip(t.samples.iter().rev())
        .map(|(a, b)| a.dist(*b))
        .fold(0.0, f64::max);
    Ok(fwd.min(rev))
}

/// Mean matched stroke distance under the optimal one-to-one assignment.
/// Extra strokes on either side pay [`UNMATCHED_STROKE_COST`].
pub fn assignment_cost(a: &[BezierStroke], b: &[BezierStroke]) -> Result<f64> {
    let n = a.len().max(b.len());
    if n == 0 {
        return Ok(0.0);
    }
    let mut cost = vec![vec![UNMATCHED_STROKE_COST; n]; n];
    for (i, s) in a.iter().enumerate() {
        for (j, t) in b.iter().enumerate() {
            cost[i][j] = stroke_distance(s, t)?;
        }
    }
    let assign = min_cost_assignment(&cost);
    let mut chosen: Vec<f64> = assign.iter().enumerate().map(|(i, &j)| cost[i][j]).collect();
    // summing in sorted order makes the result independent of argument order
    chosen.sort_by(f64::total_cmp);
    Ok(chosen.iter().sum::<f64>() / n as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlyphParams {
    pub n_decomp: usize,
    pub samples: usize,
    pub remark_budget: usize,
    pub seed: u64,
}

impl GlyphParams {
    pub fn new(n_decomp: usize, seed: u64) -> Self {
        GlyphParams {
            n_decomp,
            samples: DEFAULT_SAMPLES,
            remark_budget: DEFAULT_REMARK_BUDGET,
            seed,
        }
    }
}

impl Default for GlyphParams {
    fn default() -> Self {
        Self::new(DEFAULT_DECOMPOSITIONS, 0)
    }
}

/// Sampled, fitted and normalized decompositions of one glyph.
#[derive(Clone, Debug)]
pub struct GlyphModel {
    pub decompositions: Vec<NormalizedChar>,
}

impl GlyphModel {
    /// Decomposition `j` is drawn with seed `params.seed ^ j`.
    pub fn build(glyph: &RasterGlyph, params: &GlyphParams) -> Result<Self> {
        if params.n_decomp == 0 {
            return Err(Error::InvalidArgument("need at least one decomposition".into()));
        }
        let skeleton = skeletonize(glyph)?;
        let graph = build_graph(&skeleton);
        let decompositions = (0..params.n_decomp as u64)
            .map(|j| {
                let d = extract_decomposition(&graph, params.seed ^ j, params.remark_budget);
                normalize(&d.fit(params.samples)?)
            })
            .collect::<Result<_>>()?;
        Ok(GlyphModel { decompositions })
    }

    /// Best assignment cost over all pairs of decompositions.
    pub fn distance(&self, other: &GlyphModel) -> Result<f64> {
        let pairs: Vec<(usize, usize)> = (0..self.decompositions.len())
            .flat_map(|i| (0..other.decompositions.len()).map(move |j| (i, j)))
            .collect();
        let costs = pairs
            .par_iter()
            .map(|&(i, j)| assignment_cost(&self.decompositions[i].strokes, &other.decompositions[j].strokes))
            .collect::<Result<Vec<f64>>>()?;
        Ok(costs.into_iter().fold(f64::INFINITY, f64::min))
    }
}

/// Stroke-based distance between two glyphs.
pub fn char_distance(a: &RasterGlyph, b: &RasterGlyph, n_decomp: usize, seed: u64) -> Result<f64> {
    let params = GlyphParams::new(n_decomp, seed);
    let (ma, mb) = rayon::join(|| GlyphModel::build(a, &params), || GlyphModel::build(b, &params));
    ma?.distance(&mb?)
}

/// Index of the support glyph closest to the query; ties go to the earlier one.
pub fn classify_models(support: &[GlyphModel], query: &GlyphModel) -> Result<(usize, Vec<f64>)> {
    if support.is_empty() {
        return Err(Error::EmptyInput("support"));
    }
    let dists = support
        .par_iter()
        .map(|s| s.distance(query))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &d) in dists.iter().enumerate() {
        if d < dists[best] {
            best = i;
        }
    }
    Ok((best, dists))
}

/// One-shot classification: returns the label of the nearest support glyph.
/// Labels must be distinct.
pub fn classify_oneshot<'a>(
    support: &'a [(RasterGlyph, String)],
    query: &RasterGlyph,
    params: &GlyphParams,
) -> Result<&'a str> {
    let mut names: Vec<&str> = support.iter().map(|(_, l)| l.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEpisode("support labels must be distinct".into()));
    }
    let models = support
        .par_iter()
        .map(|(g, _)| GlyphModel::build(g, params))
        .collect::<Result<Vec<_>>>()?;
    let q = GlyphModel::build(query, params)?;
    let (best, _) = classify_models(&models, &q)?;
    Ok(&support[best].1)
}

/// Fraction of labelled queries whose nearest support glyph carries the same
/// label. Every glyph is modelled once with `params`.
pub fn oneshot_accuracy(
    support: &[(RasterGlyph, String)],
    queries: &[(RasterGlyph, String)],
    params: &GlyphParams,
) -> Result<f64> {
    if queries.is_empty() {
        return Err(Error::EmptyInput("queries"));
    }
    let mut names: Vec<&str> = support.iter().map(|(_, l)| l.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidEpisode("support labels must be distinct".into()));
    }
    let build = |set: &[(RasterGlyph, String)]| {
        set.par_iter()
            .map(|(g, _)| GlyphModel::build(g, params))
            .collect::<Result<Vec<_>>>()
    };
    let (models, query_models) = rayon::join(|| build(support), || build(queries));
    let (models, query_models) = (models?, query_models?);
    let mut correct = 0;
    for (q, (_, label)) in query_models.iter().zip(queries) {
        let (best, _) = classify_models(&models, q)?;
        if support[best].1 == *label {
            correct += 1;
        }
    }
    Ok(correct as f64 / queries.len() as f64)
}
