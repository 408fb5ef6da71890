//! Ten English paragraphs (500+ bytes each) shipped with the crate, used to
//! calibrate and regression-test compressor behaviour.

use crate::compressor::ByteSequence;

const PARAGRAPHS: [&str; 10] = [
    include_str!("../../fixtures/corpus/p01.txt"),
    include_str!("../../fixtures/corpus/p02.txt"),
    include_str!("../../fixtures/corpus/p03.txt"),
    include_str!("../../fixtures/corpus/p04.txt"),
    include_str!("../../fixtures/corpus/p05.txt"),
    include_str!("../../fixtures/corpus/p06.txt"),
    include_str!("../../fixtures/corpus/p07.txt"),
    include_str!("../../fixtures/corpus/p08.txt"),
    include_str!("../../fixtures/corpus/p09.txt"),
    include_str!("../../fixtures/corpus/p10.txt"),
];

pub fn reference_corpus() -> Vec<ByteSequence> {
    PARAGRAPHS
        .iter()
        .map(|p| ByteSequence::text(p.trim_end()))
        .collect()
}
