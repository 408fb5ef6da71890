//! Compressed-length measurement.
//!
//! Every length is reported in bits (compressed bytes × 8) so that all of the
//! distance arithmetic downstream stays integer-exact until the final ratio.
//! The DEFLATE codec is a single pinned pure-Rust encoder emitting a raw
//! RFC-1951 stream (no zlib or gzip framing), which makes lengths identical on
//! every platform.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use miniz_oxide::deflate::core::{
    compress_to_output, create_comp_flags_from_zip_params, CompressorOxide, TDEFLFlush,
    TDEFLStatus,
};

use crate::error::{Error, Result};

/// Where a byte sequence came from. Decides the separator used when two
/// sequences are concatenated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Origin {
    Text,
    Image,
    Synthetic,
}

/// Immutable byte payload of one sample.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ByteSequence {
    bytes: Arc<[u8]>,
    origin: Origin,
}

impl ByteSequence {
    pub fn new(bytes: impl Into<Arc<[u8]>>, origin: Origin) -> Self {
        ByteSequence {
            bytes: bytes.into(),
            origin,
        }
    }

    pub fn text(s: impl AsRef<str>) -> Self {
        Self::new(s.as_ref().as_bytes(), Origin::Text)
    }

    pub fn synthetic(bytes: impl Into<Arc<[u8]>>) -> Self {
        Self::new(bytes, Origin::Synthetic)
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.bytes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bytes.is_empty()
    }

    /// Separator byte placed between `self` and `other` when they are
    /// concatenated: a space when both are text, NUL otherwise.
    pub fn separator_with(&self, other: &ByteSequence) -> u8 {
        separator(self.origin, other.origin)
    }
}

impl fmt::Debug for ByteSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ByteSequence")
            .field("len", &self.bytes.len())
            .field("origin", &self.origin)
            .finish()
    }
}

pub(crate) fn separator(a: Origin, b: Origin) -> u8 {
    if a == Origin::Text && b == Origin::Text {
        b' '
    } else {
        0x00
    }
}

/// A user-supplied lossless codec. Implementations must be deterministic.
pub trait CustomCodec: Send + Sync {
    fn name(&self) -> &str;
    fn compressed_bits(&self, data: &[u8]) -> u64;
}

#[derive(Clone)]
pub enum CodecId {
    Deflate,
    /// Idealized stored codec: 8 bits per byte plus [`STORE_HEADER_BITS`].
    Store,
    Custom(Arc<dyn CustomCodec>),
}

impl fmt::Debug for CodecId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecId::Deflate => f.write_str("Deflate"),
            CodecId::Store => f.write_str("Store"),
            CodecId::Custom(c) => write!(f, "Custom({})", c.name()),
        }
    }
}

/// Fixed header of the store codec: a 32-bit length field.
pub const STORE_HEADER_BITS: u64 = 32;

pub const DEFAULT_DEFLATE_LEVEL: u8 = 6;

/// Normality slack of raw DEFLATE at level 6 measured on the shipped
/// reference corpus (see `reference_corpus`), rounded up to a multiple of 8.
pub const DEFLATE_NORMALITY_EPSILON_BITS: u64 = 120;

#[derive(Debug, Clone)]
pub struct CompressorProfile {
    pub codec: CodecId,
    pub level: u8,
    /// Measured slack (bits) in the normality axioms.
    pub normality_epsilon: u64,
}

impl CompressorProfile {
    pub fn deflate(level: u8) -> Self {
        CompressorProfile {
            codec: CodecId::Deflate,
            level: level.min(10),
            normality_epsilon: DEFLATE_NORMALITY_EPSILON_BITS,
        }
    }

    pub fn store() -> Self {
        CompressorProfile {
            codec: CodecId::Store,
            level: 0,
            normality_epsilon: 0,
        }
    }

    pub fn custom(codec: Arc<dyn CustomCodec>, normality_epsilon: u64) -> Self {
        CompressorProfile {
            codec: CodecId::Custom(codec),
            level: 0,
            normality_epsilon,
        }
    }

    /// Short identity string, e.g. `deflate-6`.
    pub fn fingerprint(&self) -> String {
        match &self.codec {
            CodecId::Deflate => format!("deflate-{}", self.level),
            CodecId::Store => "store".to_string(),
            CodecId::Custom(c) => format!("custom:{}", c.name()),
        }
    }

    /// Measures the normality slacks on `corpus` and stores their maximum as
    /// this profile's epsilon.
    pub fn calibrate(&mut self, corpus: &[ByteSequence]) -> Result<NormalityReport> {
        let report = check_normality(self, corpus)?;
        self.normality_epsilon = report.epsilon();
        Ok(report)
    }

    pub(crate) fn bits_of(&self, data: &[u8]) -> u64 {
        match &self.codec {
            CodecId::Deflate => 8 * deflate_len(data, self.level) as u64,
            CodecId::Store => 8 * data.len() as u64 + STORE_HEADER_BITS,
            CodecId::Custom(c) => c.compressed_bits(data),
        }
    }

    /// Compressed length of the parts joined in order, with a one-byte
    /// separator (chosen from the neighbouring origins) between consecutive
    /// parts.
    pub(crate) fn bits_of_parts(&self, parts: &[(&[u8], Origin)]) -> u64 {
        if let CodecId::Store = self.codec {
            let body: usize = parts.iter().map(|p| p.0.len()).sum::<usize>()
                + parts.len().saturating_sub(1);
            return 8 * body as u64 + STORE_HEADER_BITS;
        }
        JOIN_BUF.with(|buf| {
            let mut buf = buf.borrow_mut();
            buf.clear();
            for (i, (bytes, origin)) in parts.iter().enumerate() {
                if i > 0 {
                    buf.push(separator(parts[i - 1].1, *origin));
                }
                buf.extend_from_slice(bytes);
            }
            self.bits_of(&buf)
        })
    }
}

thread_local! {
    static DEFLATERS: RefCell<Vec<(u8, CompressorOxide)>> = const { RefCell::new(Vec::new()) };
    static JOIN_BUF: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

/// Raw DEFLATE output length in bytes. The compressor state is kept per
/// thread and reset between calls.
fn deflate_len(data: &[u8], level: u8) -> usize {
    DEFLATERS.with(|cell| {
        let mut pool = cell.borrow_mut();
        let idx = match pool.iter().position(|(l, _)| *l == level) {
            Some(i) => i,
            None => {
                let flags = create_comp_flags_from_zip_params(level.into(), 0, 0);
                pool.push((level, CompressorOxide::new(flags)));
                pool.len() - 1
            }
        };
        let comp = &mut pool[idx].1;
        comp.reset();
        let mut total = 0usize;
        let (status, consumed) = compress_to_output(comp, data, TDEFLFlush::Finish, |chunk| {
            total += chunk.len();
            true
        });
        assert!(
            status == TDEFLStatus::Done && consumed == data.len(),
            "deflate did not finish: {status:?}"
        );
        total
    })
}

/// Compressed length of `x` in bits.
pub fn compressed_length(c: &CompressorProfile, x: &ByteSequence) -> u64 {
    c.bits_of(x.bytes())
}

/// Compressed length of `x ‖ sep ‖ y` in bits.
pub fn pair_length(c: &CompressorProfile, x: &ByteSequence, y: &ByteSequence) -> u64 {
    c.bits_of_parts(&[(x.bytes(), x.origin()), (y.bytes(), y.origin())])
}

/// Empirical slack in the normal-compressor axioms over a corpus, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormalityReport {
    /// max |C(xx) − C(x)|
    pub idempotency_slack: u64,
    /// max max(0, C(x) − C(xy))
    pub monotonicity_slack: u64,
    /// max |C(xy) − C(yx)|
    pub symmetry_slack: u64,
}

impl NormalityReport {
    pub fn epsilon(&self) -> u64 {
        self.idempotency_slack
            .max(self.monotonicity_slack)
            .max(self.symmetry_slack)
    }
}

pub fn check_normality(c: &CompressorProfile, corpus: &[ByteSequence]) -> Result<NormalityReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let singles: Vec<u64> = corpus.iter().map(|x| compressed_length(c, x)).collect();
    let mut report = NormalityReport {
        idempotency_slack: 0,
        monotonicity_slack: 0,
        symmetry_slack: 0,
    };
    for (i, x) in corpus.iter().enumerate() {
        let cxx = pair_length(c, x, x);
        report.idempotency_slack = report.idempotency_slack.max(cxx.abs_diff(singles[i]));
        for (j, y) in corpus.iter().enumerate() {
            if i == j {
                continue;
            }
            let cxy = pair_length(c, x, y);
            let cyx = pair_length(c, y, x);
            report.monotonicity_slack = report
                .monotonicity_slack
                .max(singles[i].saturating_sub(cxy));
            report.symmetry_slack = report.symmetry_slack.max(cxy.abs_diff(cyx));
        }
    }
    Ok(report)
}
