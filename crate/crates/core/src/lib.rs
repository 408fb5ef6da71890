//! Compression-based few-shot classification.
//!
//! Compressed lengths stand in for Kolmogorov complexity: [`infodist`] turns
//! them into distances between byte strings and [`fewshot`] classifies a
//! query by the class whose support set is cheapest to reach. [`strokes`]
//! holds a separate, geometric distance for handwritten glyphs.

pub mod compressor;
pub mod data;
pub mod error;
pub mod fewshot;
pub mod infodist;
pub mod strokes;

pub use compressor::{
    check_normality, compressed_length, pair_length, ByteSequence, CodecId, CompressorProfile, CustomCodec,
    NormalityReport, Origin,
};
pub use error::{Error, Result};
pub use fewshot::{
    classify, energy_objective, evaluate, evaluate_with, Classification, CoreStrategy, Episode, EvalOptions,
    EvalReport, LabelSpace,
};
pub use infodist::{cond_complexity, distance_matrix, info_distance, DistanceForm, DistanceMatrix, DistanceSpec};
