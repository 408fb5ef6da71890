use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_infoshot"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn paragraph() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/corpus/p01.txt")
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn version_names_the_codec() {
    let o = run(&["--version"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("deflate") && s.contains("level 6"), "{s}");
}

#[test]
fn dist_of_a_paragraph_with_itself() {
    let p = paragraph();
    let o = run(&["dist", "--a", p.to_str().unwrap(), "--b", p.to_str().unwrap(), "--form", "ncd"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(value(&s, "distance ") <= 0.15);
    for key in ["C(a) ", "C(b) ", "C(ab) ", "C(ba) "] {
        assert!(value(&s, key) > 0.0);
    }
}

#[test]
fn dist_errors_exit_with_two() {
    let p = paragraph();
    let p = p.to_str().unwrap();
    assert_eq!(run(&["dist", "--a", p, "--b", p, "--form", "conditional"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--a", "/nonexistent/x", "--b", p]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--a", p, "--b", p, "--form", "cosine"]).status.code(), Some(2));
    assert_eq!(run(&["dist", "--a", p]).status.code(), Some(2));
}

#[test]
fn dist_conditional_with_context() {
    let p = paragraph();
    let p = p.to_str().unwrap();
    let o = run(&["dist", "--a", p, "--b", p, "--form", "conditional", "--context", p]);
    assert!(o.status.success());
    assert!(value(&stdout(&o), "distance ").is_finite());
}

#[test]
fn dist_of_empty_files_is_finite() {
    let tmp = tempfile::tempdir().unwrap();
    let e = tmp.path().join("empty");
    std::fs::write(&e, "").unwrap();
    let e = e.to_str().unwrap();
    for form in ["ncd", "max_raw"] {
        let o = run(&["dist", "--a", e, "--b", e, "--form", form]);
        assert!(o.status.success());
        assert!(value(&stdout(&o), "distance ").is_finite());
    }
}

const ROWS: [(&str, &str); 9] = [
    ("sport", "the striker scored twice in the second half of the match"),
    ("sport", "a late goal sealed the league title for the home side"),
    ("sport", "the keeper saved a penalty in extra time at the stadium"),
    ("tech", "the new processor doubles cache size and cuts power draw"),
    ("tech", "developers shipped a compiler update with faster builds"),
    ("tech", "the phone maker released a firmware patch for the modem"),
    ("food", "simmer the onions in butter before adding the stock"),
    ("food", "knead the dough and let it rise overnight in the fridge"),
    ("food", "roast the peppers until the skins blister and blacken"),
];

fn write_csv(path: &Path) {
    let mut s = String::from("label,text\n");
    for (l, t) in ROWS {
        s.push_str(&format!("{l},\"{t}\"\n"));
    }
    std::fs::write(path, s).unwrap();
}

#[test]
fn eval_self_queries_score_one_and_report_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("all.csv");
    write_csv(&csv);
    let csv = csv.to_str().unwrap();
    let report = |name: &str| {
        let out = tmp.path().join(name);
        let o = run(&[
            "eval", "--train", csv, "--test", csv, "--ways", "3", "--shots", "3", "--episodes", "4", "--seed", "9",
            "--allow-overlap", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("mean 1.0000"));
        std::fs::read_to_string(out).unwrap()
    };
    let a = report("a.json");
    let b = report("b.json");
    // only the output path differs between the two runs
    assert_eq!(a.replace("a.json", "b.json"), b);
    assert!(a.contains("\"mean\": 1.0"), "{a}");
    assert!(a.contains("\"episode_seeds\""));
}

#[test]
fn eval_refuses_overlap_by_default() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("all.csv");
    write_csv(&csv);
    let csv = csv.to_str().unwrap();
    let o = run(&["eval", "--train", csv, "--test", csv, "--ways", "3", "--shots", "3", "--episodes", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_corpus_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("all.csv");
    write_csv(&csv);
    let csv = csv.to_str().unwrap();
    let o = run(&["eval", "--train", csv, "--test", csv, "--ways", "3", "--shots", "4", "--allow-overlap"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["eval", "--train", "/nonexistent.csv", "--test", csv]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let tmp = tempfile::tempdir().unwrap();
    let csv = tmp.path().join("all.csv");
    write_csv(&csv);
    let cfg = tmp.path().join("run.cfg");
    std::fs::write(&cfg, "# shared settings\nways = 3\nshots = 2\nepisodes = 3\nallow_overlap = true\n").unwrap();
    let csv = csv.to_str().unwrap();
    let base = ["--config", cfg.to_str().unwrap(), "eval", "--train", csv, "--test", csv];
    let o = run(&base);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("config shots=2") && s.contains("over 3 episodes"), "{s}");
    let mut args = base.to_vec();
    args.extend(["--episodes", "5"]);
    assert!(stdout(&run(&args)).contains("over 5 episodes"));
}

fn synthetic_dirs(dir: &Path) -> (String, String) {
    let o = run(&["gen-glyphs", "--out", dir.to_str().unwrap(), "--classes", "20", "--seed", "4"]);
    assert!(o.status.success());
    (
        dir.join("support").to_str().unwrap().to_string(),
        dir.join("query").to_str().unwrap().to_string(),
    )
}

#[test]
fn omniglot_on_the_synthetic_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let (support, query) = synthetic_dirs(tmp.path());
    let o = run(&["omniglot", "--support", &support, "--query", &query, "--decomp", "16", "--episodes", "5"]);
    assert!(o.status.success());
    assert!(value(&stdout(&o), "mean ") >= 0.95);
}

#[test]
fn omniglot_same_directory_is_perfect() {
    let tmp = tempfile::tempdir().unwrap();
    let (support, _) = synthetic_dirs(tmp.path());
    let o = run(&["omniglot", "--support", &support, "--query", &support, "--decomp", "2", "--episodes", "3"]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "mean "), 1.0);
}

#[test]
fn omniglot_is_deterministic_and_writes_svgs() {
    let tmp = tempfile::tempdir().unwrap();
    let (support, query) = synthetic_dirs(tmp.path());
    let svg = tmp.path().join("svg");
    let args = [
        "omniglot", "--support", &support, "--query", &query, "--decomp", "1", "--seed", "7", "--episodes", "2",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let mut with_svg = args.to_vec();
    with_svg.extend(["--svg-out", svg.to_str().unwrap()]);
    assert!(run(&with_svg).status.success());
    let files: Vec<_> = std::fs::read_dir(&svg).unwrap().collect();
    assert_eq!(files.len(), 2 * 2 * 20);
    let one = std::fs::read_to_string(svg.join("ep000_support_class000.svg")).unwrap();
    assert!(one.starts_with("<svg") && one.contains("<path"));
}

#[test]
fn omniglot_rejects_non_pgm_files() {
    let tmp = tempfile::tempdir().unwrap();
    let (support, query) = synthetic_dirs(tmp.path());
    std::fs::write(Path::new(&support).join("class003").join("notes.txt"), "x").unwrap();
    let o = run(&["omniglot", "--support", &support, "--query", &query]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not a PGM"));
}
