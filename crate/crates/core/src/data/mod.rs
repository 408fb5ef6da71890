//! Corpus loading, episode sampling, synthetic glyphs and report files.

pub mod corpus;
pub mod glyphs;
pub mod report;
pub mod text;

pub use corpus::reference_corpus;
pub use glyphs::{
    gen_glyphs, gen_glyphs_with, load_glyph_dir, sample_glyph_episodes, synthetic_episode, write_glyph_dir, GlyphEpisode,
    GlyphProgram,
};
pub use report::{parse_report, read_report, report_to_string, write_report};
pub use text::{load_text_csv, load_text_csv_with, sample_episodes, EpisodeConfig, LoadOptions, Split, TextCorpus};
