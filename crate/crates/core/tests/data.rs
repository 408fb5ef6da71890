use std::path::Path;

use infoshot::data::*;
use infoshot::Error;
use proptest::prelude::*;

fn csv(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn two_rows_two_labels() {
    let tmp = tempfile::tempdir().unwrap();
    let c = load_text_csv(csv(tmp.path(), "a.csv", "1,first text\n2,second text\n"), Split::Train).unwrap();
    assert_eq!(c.len(), 2);
    assert_eq!(c.classes, vec!["1", "2"]);
    assert_eq!(c.label_space().unwrap().len(), 2);
    assert_eq!(c.records[1].1.bytes(), b"second text");
}

#[test]
fn quoted_commas_are_one_field() {
    let tmp = tempfile::tempdir().unwrap();
    let c = load_text_csv(csv(tmp.path(), "a.csv", "x,\"a, b, c\"\ny,\"say \"\"hi\"\"\"\n"), Split::Test).unwrap();
    assert_eq!(c.records[0].1.bytes(), b"a, b, c");
    assert_eq!(c.records[1].1.bytes(), b"say \"hi\"");
    assert_eq!(c.split, Split::Test);
}

#[test]
fn empty_text_fails_at_its_line() {
    let tmp = tempfile::tempdir().unwrap();
    let err = load_text_csv(csv(tmp.path(), "a.csv", "a,one\nb,two\nc,   \n"), Split::Train).unwrap_err();
    match err {
        Error::Parse { line, .. } => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    assert!(load_text_csv(csv(tmp.path(), "e.csv", ""), Split::Train).is_err());
    assert!(load_text_csv(tmp.path().join("missing.csv"), Split::Train).is_err());
}

#[test]
fn document_cap_cuts_on_a_character_boundary() {
    let tmp = tempfile::tempdir().unwrap();
    let path = csv(tmp.path(), "a.csv", "a,héllo wörld\nb,abcdef\n");
    let opts = LoadOptions { max_doc_bytes: Some(2) };
    let c = load_text_csv_with(path, Split::Train, opts).unwrap();
    assert_eq!(c.records[0].1.bytes(), b"h");
    assert_eq!(c.records[1].1.bytes(), b"ab");
}

fn news_shaped(dir: &Path) -> (TextCorpus, TextCorpus) {
    let mut train = String::from("label,text\n");
    let mut test = String::new();
    for c in 0..4 {
        for i in 0..12 {
            train.push_str(&format!("{c},train document {i} of class {c}\n"));
        }
        for i in 0..7 {
            test.push_str(&format!("{c},test document {i} of class {c}\n"));
        }
    }
    (
        load_text_csv(csv(dir, "train.csv", &train), Split::Train).unwrap(),
        load_text_csv(csv(dir, "test.csv", &test), Split::Test).unwrap(),
    )
}

#[test]
fn episodes_have_the_requested_shape() {
    let tmp = tempfile::tempdir().unwrap();
    let (train, test) = news_shaped(tmp.path());
    let eps = sample_episodes(&train, &test, &EpisodeConfig::new(4, 5, 20, 100)).unwrap();
    assert_eq!(eps.len(), 20);
    for (i, ep) in eps.iter().enumerate() {
        assert_eq!(ep.seed, 100 + i as u64);
        assert_eq!(ep.support.iter().map(Vec::len).sum::<usize>(), 20);
        assert_eq!(ep.queries.len(), 28);
        ep.validate().unwrap();
    }
    assert_eq!(eps, sample_episodes(&train, &test, &EpisodeConfig::new(4, 5, 20, 100)).unwrap());
}

#[test]
fn shots_beyond_the_smallest_class_fail_by_name() {
    let tmp = tempfile::tempdir().unwrap();
    let (train, test) = news_shaped(tmp.path());
    match sample_episodes(&train, &test, &EpisodeConfig::new(4, 13, 1, 0)) {
        Err(Error::NotEnoughRecords { class, needed, .. }) => {
            assert_eq!(class, "0");
            assert_eq!(needed, 13);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn synthetic_episode_pairs_renders_of_one_program() {
    let ep = synthetic_episode(6, 48, 3).unwrap();
    assert_eq!(ep.support.len(), 6);
    assert_eq!(ep.queries.len(), 6);
    for (s, q) in ep.support.iter().zip(&ep.queries) {
        assert_eq!(s.1, q.1);
    }
    assert_eq!(ep, synthetic_episode(6, 48, 3).unwrap());
}

#[test]
fn glyph_episodes_from_directories() {
    let glyphs: Vec<_> = gen_glyphs(5, 3, 32, 1)
        .unwrap()
        .into_iter()
        .map(|(g, c)| (g, format!("c{c}")))
        .collect();
    let eps = sample_glyph_episodes(&glyphs, &glyphs, 4, 6, 50, false).unwrap();
    for ep in &eps {
        assert_eq!(ep.support, ep.queries);
        let mut labels: Vec<&str> = ep.support.iter().map(|(_, l)| l.as_str()).collect();
        labels.dedup();
        assert_eq!(labels.len(), 4);
    }
    let distinct = sample_glyph_episodes(&glyphs, &glyphs, 5, 6, 50, true).unwrap();
    for ep in &distinct {
        for (s, q) in ep.support.iter().zip(&ep.queries) {
            assert_eq!(s.1, q.1);
            assert_ne!(s.0, q.0);
        }
    }
    assert!(sample_glyph_episodes(&glyphs, &glyphs, 6, 1, 0, false).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn record_count_is_lines_minus_header(
        rows in proptest::collection::vec(("[a-c]", "[a-z ,]{0,12}[a-z]"), 1..40),
        header in any::<bool>(),
    ) {
        let tmp = tempfile::tempdir().unwrap();
        let mut body = String::new();
        if header {
            body.push_str("label,text\n");
        }
        for (l, t) in &rows {
            body.push_str(&format!("{l},\"{t}\"\n"));
        }
        let c = load_text_csv(csv(tmp.path(), "p.csv", &body), Split::Train).unwrap();
        prop_assert_eq!(c.len(), rows.len());
        for ((l, t), (id, text)) in rows.iter().zip(&c.records) {
            prop_assert_eq!(&c.classes[*id], l);
            prop_assert_eq!(text.bytes(), t.as_bytes());
        }
    }

    #[test]
    fn renders_are_deterministic(seed in any::<u64>()) {
        prop_assert_eq!(gen_glyphs(3, 2, 24, seed).unwrap(), gen_glyphs(3, 2, 24, seed).unwrap());
    }
}
