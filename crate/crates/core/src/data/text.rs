use std::collections::HashMap;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compressor::ByteSequence;
use crate::error::{Error, Result};
use crate::fewshot::{Episode, LabelSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// Labelled text records. Class ids index into `classes`, which lists labels
/// in first-appearance order.
#[derive(Debug, Clone)]
pub struct TextCorpus {
    pub classes: Vec<String>,
    pub records: Vec<(usize, ByteSequence)>,
    pub split: Split,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Keep at most this many bytes of each document (cut on a UTF-8
    /// boundary).
    pub max_doc_bytes: Option<usize>,
}

impl TextCorpus {
    pub fn label_space(&self) -> Result<LabelSpace> {
        LabelSpace::new(self.classes.clone())
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

pub fn load_text_csv(path: impl AsRef<Path>, split: Split) -> Result<TextCorpus> {
    load_text_csv_with(path, split, LoadOptions::default())
}

/// Reads `label,text` rows (RFC-4180, UTF-8). Rows with more than two fields
/// (e.g. `label,title,body`) have their text fields joined with a space. A
/// first row whose first field is `label` is treated as a header.
pub fn load_text_csv_with(
    path: impl AsRef<Path>,
    split: Split,
    options: LoadOptions,
) -> Result<TextCorpus> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let parse_err = |line: u64, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };

    let mut classes: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut records = Vec::new();
    let mut record = csv::StringRecord::new();
    let mut first = true;
    loop {
        let line = reader.position().line();
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(line, |p| p.line());
                return Err(parse_err(line, e.to_string()));
            }
        }
        let line = record.position().map_or(line, |p| p.line());
        if first {
            first = false;
            if record.get(0).is_some_and(|f| f.trim().eq_ignore_ascii_case("label")) {
                continue;
            }
        }
        if record.len() < 2 {
            return Err(parse_err(line, format!("expected label,text but found {} field(s)", record.len())));
        }
        let label = record[0].trim();
        if label.is_empty() {
            return Err(parse_err(line, "empty label".into()));
        }
        let text = record.iter().skip(1).collect::<Vec<_>>().join(" ");
        if text.trim().is_empty() {
            return Err(parse_err(line, "empty text field".into()));
        }
        let mut text = text.into_bytes();
        if let Some(cap) = options.max_doc_bytes {
            truncate_utf8(&mut text, cap);
        }
        let id = *index.entry(label.to_string()).or_insert_with(|| {
            classes.push(label.to_string());
            classes.len() - 1
        });
        records.push((id, ByteSequence::new(text, crate::compressor::Origin::Text)));
    }
    if records.is_empty() {
        return Err(Error::Data {
            path: path.to_path_buf(),
            message: "no records".into(),
        });
    }
    Ok(TextCorpus {
        classes,
        records,
        split,
    })
}

fn truncate_utf8(bytes: &mut Vec<u8>, cap: usize) {
    if bytes.len() <= cap {
        return;
    }
    let mut end = cap;
    // back off continuation bytes so the cut lands on a char boundary
    while end > 0 && (bytes[end] & 0xC0) == 0x80 {
        end -= 1;
    }
    bytes.truncate(end);
}

#[derive(Debug, Clone, Copy)]
pub struct EpisodeConfig {
    pub ways: usize,
    pub shots: usize,
    pub episodes: usize,
    /// Queries per episode; `None` uses the whole test split.
    pub query_cap: Option<usize>,
    pub master_seed: u64,
}

pub const DEFAULT_QUERY_CAP: usize = 1000;

impl EpisodeConfig {
    pub fn new(ways: usize, shots: usize, episodes: usize, master_seed: u64) -> Self {
        EpisodeConfig {
            ways,
            shots,
            episodes,
            query_cap: Some(DEFAULT_QUERY_CAP),
            master_seed,
        }
    }
}

/// Draws seeded N-way k-shot episodes: supports come from `train`, queries
/// from `test`, so the two never share a record. Episode `i` uses the seed
/// `master_seed + i`.
pub fn sample_episodes(
    train: &TextCorpus,
    test: &TextCorpus,
    cfg: &EpisodeConfig,
) -> Result<Vec<Episode>> {
    if test.is_empty() {
        return Err(Error::EmptyInput("test split"));
    }
    if cfg.shots == 0 {
        return Err(Error::InvalidArgument("shots must be at least 1".into()));
    }
    let n_classes = train.classes.len();
    if cfg.ways < 2 || cfg.ways > n_classes {
        return Err(Error::InvalidArgument(format!(
            "{}-way episodes need between 2 and {n_classes} classes",
            cfg.ways
        )));
    }

    let mut by_class: Vec<Vec<&ByteSequence>> = vec![Vec::new(); n_classes];
    for (c, text) in &train.records {
        by_class[*c].push(text);
    }
    for (c, members) in by_class.iter().enumerate() {
        if members.len() < cfg.shots {
            return Err(Error::NotEnoughRecords {
                class: train.classes[c].clone(),
                available: members.len(),
                needed: cfg.shots,
            });
        }
    }

    // test labels are mapped onto the train label order
    let mut test_records: Vec<(usize, &ByteSequence)> = Vec::with_capacity(test.len());
    for (c, text) in &test.records {
        let name = &test.classes[*c];
        let idx = train
            .classes
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::InvalidArgument(format!("test label {name:?} not in train split")))?;
        test_records.push((idx, text));
    }

    let mut episodes = Vec::with_capacity(cfg.episodes);
    for e in 0..cfg.episodes {
        let seed = cfg.master_seed.wrapping_add(e as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let chosen: Vec<usize> = if cfg.ways == n_classes {
            (0..n_classes).collect()
        } else {
            let mut v = sample(&mut rng, n_classes, cfg.ways).into_vec();
            v.sort_unstable();
            v
        };
        let labels = LabelSpace::new(chosen.iter().map(|&c| train.classes[c].clone()).collect())?;

        let support = chosen
            .iter()
            .map(|&c| {
                let pool = &by_class[c];
                sample(&mut rng, pool.len(), cfg.shots)
                    .into_iter()
                    .map(|i| pool[i].clone())
                    .collect()
            })
            .collect();

        let eligible: Vec<(usize, &ByteSequence)> = test_records
            .iter()
            .filter_map(|(c, t)| chosen.iter().position(|x| x == c).map(|local| (local, *t)))
            .collect();
        let queries = match cfg.query_cap {
            Some(cap) if cap < eligible.len() => {
                let mut idx = sample(&mut rng, eligible.len(), cap).into_vec();
                idx.sort_unstable();
                idx.into_iter()
                    .map(|i| (eligible[i].1.clone(), eligible[i].0))
                    .collect()
            }
            _ => eligible.iter().map(|(c, t)| ((*t).clone(), *c)).collect(),
        };

        episodes.push(Episode {
            labels,
            support,
            queries,
            context_pool: None,
            seed,
        });
    }
    Ok(episodes)
}
