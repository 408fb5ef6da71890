//! Stroke-based glyph comparison: thinning, junction graph, sampled pen
//! decompositions, cubic fitting and an assignment distance between glyphs.

pub mod assign;
pub mod bezier;
pub mod decompose;
pub mod distance;
pub mod graph;
pub mod normalize;
pub mod raster;
pub mod skeleton;
pub mod svg;

pub use assign::min_cost_assignment;
pub use bezier::{fit_bezier, BezierStroke, Point, DEFAULT_SAMPLES};
pub use decompose::{extract_decomposition, StrokeDecomposition, StrokeTrace, DEFAULT_REMARK_BUDGET};
pub use distance::{
    assignment_cost, char_distance, classify_models, classify_oneshot, oneshot_accuracy, stroke_distance, GlyphModel, GlyphParams,
    DEFAULT_DECOMPOSITIONS, UNMATCHED_STROKE_COST,
};
pub use graph::{build_graph, Crosspoint, SkeletonGraph};
pub use normalize::{normalize, normalize_pair, NormalizedChar};
pub use raster::RasterGlyph;
pub use skeleton::skeletonize;
pub use svg::strokes_svg;
