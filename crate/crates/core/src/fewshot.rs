//! Few-shot classification by energy minimization.
//!
//! Each class h gets a core built from its k labelled samples, and a query is
//! assigned to the class whose core it is closest to under the configured
//! distance. Summing that per-query energy over a labelled pool gives the
//! objective `Σ_h Σ_i M(x_i, core_h)`.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::compressor::ByteSequence;
use crate::error::{Error, Result};
use crate::infodist::{matrix_values, DistanceForm, DistanceSpec, Metric};

/// Ordered, duplicate-free list of class identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    classes: Vec<String>,
}

impl LabelSpace {
    pub fn new(classes: Vec<String>) -> Result<Self> {
        if classes.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a label space needs at least 2 classes, got {}",
                classes.len()
            )));
        }
        let mut seen = HashSet::new();
        for c in &classes {
            if !seen.insert(c) {
                return Err(Error::InvalidArgument(format!("duplicate class {c:?}")));
            }
        }
        Ok(LabelSpace { classes })
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.classes[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == name)
    }
}

/// One N-way k-shot task.
#[derive(Debug, Clone, PartialEq)]
pub struct Episode {
    pub labels: LabelSpace,
    /// `support[h]` holds the k labelled samples of class `h`.
    pub support: Vec<Vec<ByteSequence>>,
    /// Query samples with their true class index.
    pub queries: Vec<(ByteSequence, usize)>,
    /// Unlabelled samples, used as conditioning context by the conditional form.
    pub context_pool: Option<Vec<ByteSequence>>,
    pub seed: u64,
}

impl Episode {
    pub fn k(&self) -> usize {
        self.support.first().map_or(0, Vec::len)
    }

    /// Checks the support shape and query labels.
    pub fn validate_structure(&self) -> Result<()> {
        let h = self.labels.len();
        if self.support.len() != h {
            return Err(Error::InvalidEpisode(format!(
                "{} support lists for {h} classes",
                self.support.len()
            )));
        }
        let k = self.k();
        if k == 0 {
            return Err(Error::InvalidEpisode("k must be at least 1".into()));
        }
        for (idx, s) in self.support.iter().enumerate() {
            if s.len() != k {
                return Err(Error::InvalidEpisode(format!(
                    "class {:?} has {} supports, expected {k}",
                    self.labels.name(idx),
                    s.len()
                )));
            }
        }
        if let Some((_, c)) = self.queries.iter().find(|(_, c)| *c >= h) {
            return Err(Error::InvalidEpisode(format!("query class index {c} out of range")));
        }
        Ok(())
    }

    /// Structure plus byte-exact support/query disjointness.
    pub fn validate(&self) -> Result<()> {
        self.validate_structure()?;
        let supports: HashSet<&[u8]> = self.support.iter().flatten().map(|s| s.bytes()).collect();
        if let Some(i) = self
            .queries
            .iter()
            .position(|(q, _)| supports.contains(q.bytes()))
        {
            return Err(Error::InvalidEpisode(format!(
                "query {i} is byte-identical to a support sample"
            )));
        }
        Ok(())
    }

    /// The spec to use for this episode: a conditional spec without its own
    /// context borrows the episode's unlabelled pool.
    fn resolve_spec(&self, spec: &DistanceSpec) -> DistanceSpec {
        if spec.form == DistanceForm::Conditional && spec.context.is_none() {
            if let Some(pool) = self.context_pool.as_ref().filter(|p| !p.is_empty()) {
                return spec.clone().with_context(join(pool));
            }
        }
        spec.clone()
    }
}

/// How a class core is built from its k supports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CoreStrategy {
    /// energy(x, h) = min over supports s of d(x, s)
    #[default]
    NearestSample,
    /// energy(x, h) = d(x, s_1 ‖ … ‖ s_k)
    ConcatCore,
}

impl CoreStrategy {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoreStrategy::NearestSample => "nearest_sample",
            CoreStrategy::ConcatCore => "concat_core",
        }
    }
}

impl fmt::Display for CoreStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CoreStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest_sample" | "nearest" => Ok(CoreStrategy::NearestSample),
            "concat_core" | "concat" => Ok(CoreStrategy::ConcatCore),
            other => Err(Error::InvalidArgument(format!("unknown strategy {other:?}"))),
        }
    }
}

fn join(samples: &[ByteSequence]) -> ByteSequence {
    let origin = samples.first().map_or(crate::compressor::Origin::Synthetic, |s| s.origin());
    let mut out = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if i > 0 {
            out.push(samples[i - 1].separator_with(s));
        }
        out.extend_from_slice(s.bytes());
    }
    ByteSequence::new(out, origin)
}

/// Index of the smallest energy; the earliest class wins ties.
pub fn argmin_energy(energies: &[f64]) -> usize {
    let mut best = 0;
    for (i, &e) in energies.iter().enumerate().skip(1) {
        if e < energies[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: usize,
    /// One energy per class, in label order.
    pub energies: Vec<f64>,
}

/// Energies of every row in `items` against every class of `episode`.
fn energy_rows(
    metric: &Metric<'_>,
    strategy: CoreStrategy,
    episode: &Episode,
    items: &[ByteSequence],
) -> Vec<Vec<f64>> {
    let h = episode.labels.len();
    match strategy {
        CoreStrategy::NearestSample => {
            let flat: Vec<ByteSequence> = episode.support.iter().flatten().cloned().collect();
            let k = episode.k();
            let values = matrix_values(metric, items, &flat);
            values
                .chunks(flat.len())
                .map(|row| {
                    (0..h)
                        .map(|c| {
                            row[c * k..(c + 1) * k]
                                .iter()
                                .copied()
                                .fold(f64::INFINITY, f64::min)
                        })
                        .collect()
                })
                .collect()
        }
        CoreStrategy::ConcatCore => {
            let cores: Vec<ByteSequence> = episode.support.iter().map(|s| join(s)).collect();
            let values = matrix_values(metric, items, &cores);
            values.chunks(h).map(<[f64]>::to_vec).collect()
        }
    }
}

pub fn classify(
    spec: &DistanceSpec,
    strategy: CoreStrategy,
    episode: &Episode,
    query: &ByteSequence,
) -> Result<Classification> {
    episode.validate_structure()?;
    let spec = episode.resolve_spec(spec);
    let metric = Metric::new(&spec)?;
    let energies = energy_rows(&metric, strategy, episode, std::slice::from_ref(query))
        .pop()
        .expect("one row per query");
    Ok(Classification {
        class: argmin_energy(&energies),
        energies,
    })
}

/// `Σ_h Σ_{x ∈ pool[h]} energy(x, h)`.
pub fn energy_objective(
    spec: &DistanceSpec,
    strategy: CoreStrategy,
    episode: &Episode,
    labelled_pool: &[Vec<ByteSequence>],
) -> Result<f64> {
    episode.validate_structure()?;
    if labelled_pool.len() != episode.labels.len() {
        return Err(Error::InvalidArgument(format!(
            "pool has {} classes, label space has {}",
            labelled_pool.len(),
            episode.labels.len()
        )));
    }
    let spec = episode.resolve_spec(spec);
    let metric = Metric::new(&spec)?;
    let mut total = 0.0;
    for (h, members) in labelled_pool.iter().enumerate() {
        if members.is_empty() {
            continue;
        }
        for row in energy_rows(&metric, strategy, episode, members) {
            total += row[h];
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Refuse episodes in which a query is byte-identical to a support.
    pub require_disjoint: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            require_disjoint: true,
        }
    }
}

/// Accuracy statistics over a set of episodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub spec: String,
    pub strategy: CoreStrategy,
    pub episodes: usize,
    pub per_episode_accuracy: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single episode.
    pub std: f64,
    /// Resolved run configuration, so the report can be reproduced.
    #[serde(default)]
    pub config: BTreeMap<String, String>,
}

impl EvalReport {
    pub fn new(spec: String, strategy: CoreStrategy, per_episode_accuracy: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&per_episode_accuracy);
        EvalReport {
            spec,
            strategy,
            episodes: per_episode_accuracy.len(),
            per_episode_accuracy,
            mean,
            std,
            config: BTreeMap::new(),
        }
    }

    /// True when `episodes`, `mean` and `std` match a recomputation from
    /// `per_episode_accuracy` exactly.
    pub fn is_consistent(&self) -> bool {
        let (mean, std) = mean_std(&self.per_episode_accuracy);
        self.episodes == self.per_episode_accuracy.len()
            && mean.to_bits() == self.mean.to_bits()
            && std.to_bits() == self.std.to_bits()
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn evaluate(
    spec: &DistanceSpec,
    strategy: CoreStrategy,
    episodes: &[Episode],
) -> Result<EvalReport> {
    evaluate_with(spec, strategy, episodes, EvalOptions::default())
}

pub fn evaluate_with(
    spec: &DistanceSpec,
    strategy: CoreStrategy,
    episodes: &[Episode],
    options: EvalOptions,
) -> Result<EvalReport> {
    let first = episodes.first().ok_or(Error::EmptyInput("episodes"))?;
    let (h, k) = (first.labels.len(), first.k());
    for (i, ep) in episodes.iter().enumerate() {
        if options.require_disjoint {
            ep.validate()?;
        } else {
            ep.validate_structure()?;
        }
        if ep.queries.is_empty() {
            return Err(Error::InvalidEpisode(format!("episode {i} has no queries")));
        }
        if ep.labels.len() != h || ep.k() != k {
            return Err(Error::InvalidEpisode(format!(
                "episode {i} is {}-way {}-shot, expected {h}-way {k}-shot",
                ep.labels.len(),
                ep.k()
            )));
        }
    }

    let mut accuracies = Vec::with_capacity(episodes.len());
    for ep in episodes {
        let spec = ep.resolve_spec(spec);
        let metric = Metric::new(&spec)?;
        let queries: Vec<ByteSequence> = ep.queries.iter().map(|(q, _)| q.clone()).collect();
        let rows = energy_rows(&metric, strategy, ep, &queries);
        let correct = rows
            .iter()
            .zip(&ep.queries)
            .filter(|(energies, (_, truth))| argmin_energy(energies) == *truth)
            .count();
        accuracies.push(correct as f64 / ep.queries.len() as f64);
    }
    Ok(EvalReport::new(spec.fingerprint(), strategy, accuracies))
}
