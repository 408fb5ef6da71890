//! Compression-based approximations of the information distance
//! `max{K(x|y), K(y|x)}` and its normalized and context-conditioned forms.

use std::fmt;

use rayon::prelude::*;

use crate::compressor::{compressed_length, pair_length, ByteSequence, CompressorProfile, Origin};
use crate::error::{Error, Result};

/// DEFLATE cannot see further back than its 32 KiB window, so longer context
/// prefixes only cost time.
pub const DEFAULT_CONTEXT_CAP: usize = 32 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceForm {
    /// `max(K(x|y), K(y|x))` in bits.
    MaxRaw,
    /// Normalized compression distance.
    Ncd,
    /// `MaxRaw` with an unlabelled context prefixed to the conditioning side.
    Conditional,
}

impl DistanceForm {
    pub fn as_str(&self) -> &'static str {
        match self {
            DistanceForm::MaxRaw => "max_raw",
            DistanceForm::Ncd => "ncd",
            DistanceForm::Conditional => "conditional",
        }
    }
}

impl fmt::Display for DistanceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for DistanceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max_raw" => Ok(DistanceForm::MaxRaw),
            "ncd" => Ok(DistanceForm::Ncd),
            "conditional" => Ok(DistanceForm::Conditional),
            other => Err(Error::InvalidArgument(format!("unknown distance form {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DistanceSpec {
    pub form: DistanceForm,
    pub compressor: CompressorProfile,
    pub context: Option<ByteSequence>,
    pub context_cap: usize,
}

impl DistanceSpec {
    pub fn new(form: DistanceForm, compressor: CompressorProfile) -> Self {
        DistanceSpec {
            form,
            compressor,
            context: None,
            context_cap: DEFAULT_CONTEXT_CAP,
        }
    }

    pub fn ncd(compressor: CompressorProfile) -> Self {
        Self::new(DistanceForm::Ncd, compressor)
    }

    pub fn max_raw(compressor: CompressorProfile) -> Self {
        Self::new(DistanceForm::MaxRaw, compressor)
    }

    pub fn conditional(compressor: CompressorProfile, context: ByteSequence) -> Self {
        Self::new(DistanceForm::Conditional, compressor).with_context(context)
    }

    pub fn with_context(mut self, context: ByteSequence) -> Self {
        self.context = Some(context);
        self
    }

    pub fn with_context_cap(mut self, cap: usize) -> Self {
        self.context_cap = cap;
        self
    }

    /// e.g. `deflate-6/ncd`
    pub fn fingerprint(&self) -> String {
        let mut s = format!("{}/{}", self.compressor.fingerprint(), self.form);
        if self.form == DistanceForm::Conditional {
            let ctx = self.context.as_ref().map_or(0, |c| c.len().min(self.context_cap));
            s.push_str(&format!("/ctx{ctx}"));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.form == DistanceForm::Conditional && self.context.is_none() {
            return Err(Error::MissingContext);
        }
        Ok(())
    }

    /// The last `context_cap` bytes of the context.
    pub fn effective_context(&self) -> Option<(&[u8], Origin)> {
        self.context.as_ref().map(|c| {
            let bytes = c.bytes();
            let start = bytes.len().saturating_sub(self.context_cap);
            (&bytes[start..], c.origin())
        })
    }
}

/// Approximates `K(x | given)` as `max(0, C(given‖x) − C(given))`.
pub fn cond_complexity(c: &CompressorProfile, x: &ByteSequence, given: &ByteSequence) -> u64 {
    pair_length(c, given, x).saturating_sub(compressed_length(c, given))
}

/// A validated spec with its context resolved; computes singleton lengths and
/// pairwise distances from them.
#[derive(Clone, Copy)]
pub(crate) struct Metric<'s> {
    spec: &'s DistanceSpec,
    context: Option<(&'s [u8], Origin)>,
}

impl<'s> Metric<'s> {
    pub(crate) fn new(spec: &'s DistanceSpec) -> Result<Self> {
        spec.validate()?;
        let context = match spec.form {
            DistanceForm::Conditional => spec.effective_context(),
            _ => None,
        };
        Ok(Metric { spec, context })
    }

    fn joined(&self, parts: &[&ByteSequence]) -> u64 {
        let mut v: Vec<(&[u8], Origin)> = Vec::with_capacity(parts.len() + 1);
        if let Some(ctx) = self.context {
            v.push(ctx);
        }
        v.extend(parts.iter().map(|p| (p.bytes(), p.origin())));
        self.spec.compressor.bits_of_parts(&v)
    }

    /// `C(x)`, or `C(context‖x)` for the conditional form.
    pub(crate) fn single(&self, x: &ByteSequence) -> u64 {
        self.joined(&[x])
    }

    /// Distance between `x` and `y` given their singleton lengths from
    /// [`Metric::single`].
    pub(crate) fn pair(&self, x: &ByteSequence, cx: u64, y: &ByteSequence, cy: u64) -> f64 {
        let cxy = self.joined(&[x, y]);
        let cyx = self.joined(&[y, x]);
        match self.spec.form {
            DistanceForm::MaxRaw | DistanceForm::Conditional => {
                // K(x|y) ≈ C(y‖x) − C(y),  K(y|x) ≈ C(x‖y) − C(x)
                let k_x_given_y = cyx.saturating_sub(cy);
                let k_y_given_x = cxy.saturating_sub(cx);
                k_x_given_y.max(k_y_given_x) as f64
            }
            DistanceForm::Ncd => {
                let hi = cx.max(cy);
                if hi == 0 {
                    return 0.0;
                }
                let joint = cxy.min(cyx);
                joint.saturating_sub(cx.min(cy)) as f64 / hi as f64
            }
        }
    }

    pub(crate) fn distance(&self, x: &ByteSequence, y: &ByteSequence) -> f64 {
        self.pair(x, self.single(x), y, self.single(y))
    }
}

pub fn info_distance(spec: &DistanceSpec, x: &ByteSequence, y: &ByteSequence) -> Result<f64> {
    Ok(Metric::new(spec)?.distance(x, y))
}

/// Row-major matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    values: Vec<f64>,
    pub spec: String,
}

impl DistanceMatrix {
    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_cols();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn with_ids(mut self, row_ids: Vec<String>, col_ids: Vec<String>) -> Result<Self> {
        if row_ids.len() != self.n_rows() || col_ids.len() != self.n_cols() {
            return Err(Error::InvalidArgument("id count does not match matrix shape".into()));
        }
        self.row_ids = row_ids;
        self.col_ids = col_ids;
        Ok(self)
    }

    /// CSV with a header row of column ids and one row per row id; values
    /// carry six decimal places.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![String::new()];
        header.extend(self.col_ids.iter().cloned());
        w.write_record(&header).expect("in-memory csv");
        for (i, id) in self.row_ids.iter().enumerate() {
            let mut rec = vec![id.clone()];
            rec.extend(self.row(i).iter().map(|v| format!("{v:.6}")));
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
    }
}

/// Computes every `info_distance(rows[i], cols[j])`. Singleton lengths are
/// computed once per sample in a pre-pass; cells are filled in parallel and
/// collected in index order.
pub fn distance_matrix(
    spec: &DistanceSpec,
    rows: &[ByteSequence],
    cols: &[ByteSequence],
) -> Result<DistanceMatrix> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("distance matrix rows"));
    }
    if cols.is_empty() {
        return Err(Error::EmptyInput("distance matrix columns"));
    }
    let metric = Metric::new(spec)?;
    let values = matrix_values(&metric, rows, cols);
    Ok(DistanceMatrix {
        row_ids: (0..rows.len()).map(|i| format!("r{i}")).collect(),
        col_ids: (0..cols.len()).map(|j| format!("c{j}")).collect(),
        values,
        spec: spec.fingerprint(),
    })
}

pub(crate) fn matrix_values(
    metric: &Metric<'_>,
    rows: &[ByteSequence],
    cols: &[ByteSequence],
) -> Vec<f64> {
    let row_len: Vec<u64> = rows.par_iter().map(|x| metric.single(x)).collect();
    let col_len: Vec<u64> = if std::ptr::eq(rows, cols) {
        row_len.clone()
    } else {
        cols.par_iter().map(|y| metric.single(y)).collect()
    };
    let n = cols.len();
    (0..rows.len() * n)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / n, k % n);
            metric.pair(&rows[i], row_len[i], &cols[j], col_len[j])
        })
        .collect()
}
