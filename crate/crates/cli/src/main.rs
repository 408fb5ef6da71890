use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use infoshot::data::{
    gen_glyphs, load_glyph_dir, load_text_csv_with, sample_episodes, sample_glyph_episodes, write_glyph_dir,
    write_report, EpisodeConfig, LoadOptions, Split,
};
use infoshot::strokes::{build_graph, extract_decomposition, oneshot_accuracy, skeletonize, strokes_svg, GlyphParams};
use infoshot::{
    compressed_length, evaluate_with, info_distance, pair_length, ByteSequence, CompressorProfile, CoreStrategy,
    DistanceForm, DistanceSpec, EvalOptions, EvalReport,
};

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (codec raw-deflate via miniz_oxide 0.8.9, default level 6)");

#[derive(Parser)]
#[command(name = "infoshot", version = VERSION, about = "Compression-distance few-shot classification", args_override_self = true)]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// File of key=value lines supplying defaults for the command's flags
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two files
    Dist(DistArgs),
    /// Few-shot text classification over seeded episodes
    Eval(EvalArgs),
    /// One-shot glyph classification over PGM directories
    Omniglot(OmniglotArgs),
    /// Write a synthetic glyph corpus as support/ and query/ directories
    GenGlyphs(GenArgs),
}

#[derive(Args)]
struct DistArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    /// ncd, max_raw or conditional
    #[arg(long, default_value = "ncd")]
    form: String,
    /// Context file for the conditional form
    #[arg(long)]
    context: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    level: u8,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 4)]
    ways: usize,
    #[arg(long, default_value_t = 5)]
    shots: usize,
    #[arg(long, default_value_t = 20)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// nearest or concat
    #[arg(long, default_value = "nearest")]
    strategy: String,
    #[arg(long, default_value = "ncd")]
    form: String,
    #[arg(long)]
    context: Option<PathBuf>,
    #[arg(long, default_value_t = 6)]
    level: u8,
    /// Queries per episode; 0 uses the whole test split
    #[arg(long, default_value_t = 1000)]
    query_cap: usize,
    /// Keep at most this many bytes of each document
    #[arg(long)]
    max_doc_bytes: Option<usize>,
    /// Allow queries that are byte-identical to a support sample
    #[arg(long)]
    allow_overlap: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OmniglotArgs {
    #[arg(long)]
    support: PathBuf,
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value_t = 16)]
    decomp: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    ways: usize,
    #[arg(long, default_value_t = 20)]
    episodes: usize,
    /// Write one SVG of fitted strokes per episode glyph
    #[arg(long)]
    svg_out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 20)]
    classes: usize,
    #[arg(long, default_value_t = 105)]
    canvas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Errors caused by the caller's input rather than by this program.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() || cause.is::<std::io::Error>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<infoshot::Error>() {
            return match e {
                infoshot::Error::Json(_) => 1,
                _ => 2,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let args = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(1),
    }
}

/// Inserts `--key value` flags from the `--config` file right after the
/// subcommand, so that flags given on the command line still win.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    for (i, a) in args.iter().enumerate() {
        if a == "--config" {
            path = args.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading config {path}"))?;
    let mut extra = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{path}:{}: expected key=value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        match value.trim() {
            "true" => extra.push(format!("--{key}")),
            "false" => {}
            v => {
                extra.push(format!("--{key}"));
                extra.push(v.to_string());
            }
        }
    }
    let commands = ["dist", "eval", "omniglot", "gen-glyphs"];
    let Some(at) = args.iter().position(|a| commands.contains(&a.as_str())) else {
        return Ok(args);
    };
    let mut out = args[..=at].to_vec();
    out.extend(extra);
    out.extend_from_slice(&args[at + 1..]);
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            bail!(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Dist(a) => dist(a),
        Command::Eval(a) => eval(a),
        Command::Omniglot(a) => omniglot(a),
        Command::GenGlyphs(a) => gen(a),
    }
}

fn read_sequence(path: &Path) -> Result<ByteSequence> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => ByteSequence::text(s),
        Err(e) => ByteSequence::synthetic(e.into_bytes()),
    })
}

fn distance_spec(form: &str, context: Option<&Path>, level: u8) -> Result<DistanceSpec> {
    let form: DistanceForm = form.parse().map_err(|e: infoshot::Error| usage(e.to_string()))?;
    if level > 10 {
        bail!(usage("--level must be between 0 and 10"));
    }
    let mut spec = DistanceSpec::new(form, CompressorProfile::deflate(level));
    if let Some(c) = context {
        spec = spec.with_context(read_sequence(c)?);
    }
    if form == DistanceForm::Conditional && context.is_none() {
        bail!(usage("the conditional form needs --context"));
    }
    Ok(spec)
}

fn print_config(config: &BTreeMap<String, String>) {
    for (k, v) in config {
        println!("config {k}={v}");
    }
}

fn dist(a: DistArgs) -> Result<()> {
    let spec = distance_spec(&a.form, a.context.as_deref(), a.level)?;
    let x = read_sequence(&a.a)?;
    let y = read_sequence(&a.b)?;
    let c = &spec.compressor;
    let d = info_distance(&spec, &x, &y)?;
    println!("spec {}", spec.fingerprint());
    println!("C(a)  {}", compressed_length(c, &x));
    println!("C(b)  {}", compressed_length(c, &y));
    println!("C(ab) {}", pair_length(c, &x, &y));
    println!("C(ba) {}", pair_length(c, &y, &x));
    println!("distance {d}");
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    let spec = distance_spec(&a.form, a.context.as_deref(), a.level)?;
    let strategy: CoreStrategy = a.strategy.parse().map_err(|e: infoshot::Error| usage(e.to_string()))?;
    let options = LoadOptions {
        max_doc_bytes: a.max_doc_bytes,
    };
    let train = load_text_csv_with(&a.train, Split::Train, options)?;
    let test = load_text_csv_with(&a.test, Split::Test, options)?;
    let mut cfg = EpisodeConfig::new(a.ways, a.shots, a.episodes, a.seed);
    cfg.query_cap = (a.query_cap > 0).then_some(a.query_cap);
    let episodes = sample_episodes(&train, &test, &cfg)?;
    let eval_options = EvalOptions {
        require_disjoint: !a.allow_overlap,
    };
    let mut report: EvalReport = evaluate_with(&spec, strategy, &episodes, eval_options)?;

    let mut config = BTreeMap::new();
    let mut put = |k: &str, v: String| {
        config.insert(k.to_string(), v);
    };
    put("command", "eval".into());
    put("train", a.train.display().to_string());
    put("test", a.test.display().to_string());
    put("ways", a.ways.to_string());
    put("shots", a.shots.to_string());
    put("episodes", a.episodes.to_string());
    put("seed", a.seed.to_string());
    put("episode_seeds", format!("{}..{}", a.seed, a.seed.wrapping_add(a.episodes as u64)));
    put("strategy", strategy.to_string());
    put("form", a.form.clone());
    put("level", a.level.to_string());
    put("query_cap", a.query_cap.to_string());
    put("allow_overlap", a.allow_overlap.to_string());
    if let Some(c) = &a.context {
        put("context", c.display().to_string());
    }
    if let Some(m) = a.max_doc_bytes {
        put("max_doc_bytes", m.to_string());
    }
    if let Some(o) = &a.out {
        put("out", o.display().to_string());
    }
    report.config = config;

    print_config(&report.config);
    for (i, acc) in report.per_episode_accuracy.iter().enumerate() {
        println!("episode {i} accuracy {acc:.4}");
    }
    println!("mean {:.4} ± {:.4} over {} episodes", report.mean, report.std, report.episodes);
    if let Some(out) = &a.out {
        write_report(&report, out)?;
    }
    Ok(())
}

fn omniglot(a: OmniglotArgs) -> Result<()> {
    if a.decomp == 0 {
        bail!(usage("--decomp must be at least 1"));
    }
    let support = load_glyph_dir(&a.support)?;
    let queries = load_glyph_dir(&a.query)?;
    let episodes = sample_glyph_episodes(&support, &queries, a.ways, a.episodes, a.seed, false)?;
    println!("config command=omniglot");
    println!("config support={}", a.support.display());
    println!("config query={}", a.query.display());
    println!("config decomp={}", a.decomp);
    println!("config seed={}", a.seed);
    println!("config ways={}", a.ways);
    println!("config episodes={}", a.episodes);
    let mut accs = Vec::with_capacity(episodes.len());
    for (i, ep) in episodes.iter().enumerate() {
        let params = GlyphParams::new(a.decomp, ep.seed);
        let acc = oneshot_accuracy(&ep.support, &ep.queries, &params)?;
        println!("episode {i} accuracy {acc:.4}");
        accs.push(acc);
        if let Some(dir) = &a.svg_out {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for (role, set) in [("support", &ep.support), ("query", &ep.queries)] {
                for (g, label) in set.iter() {
                    let graph = build_graph(&skeletonize(g)?);
                    let strokes = extract_decomposition(&graph, params.seed, params.remark_budget).fit(params.samples)?;
                    let name = format!("ep{i:03}_{role}_{label}.svg");
                    std::fs::write(dir.join(&name), strokes_svg(g.width(), g.height(), &strokes))
                        .with_context(|| format!("writing {name}"))?;
                }
            }
        }
    }
    let report = EvalReport::new(format!("strokes/decomp-{}", a.decomp), CoreStrategy::NearestSample, accs);
    println!("mean {:.4} ± {:.4} over {} episodes", report.mean, report.std, report.episodes);
    Ok(())
}

fn gen(a: GenArgs) -> Result<()> {
    let glyphs = gen_glyphs(a.classes, 2, a.canvas, a.seed)?;
    let label = |c: usize| format!("class{c:03}");
    let support: Vec<_> = glyphs.iter().step_by(2).map(|(g, c)| (g.clone(), label(*c))).collect();
    let query: Vec<_> = glyphs.iter().skip(1).step_by(2).map(|(g, c)| (g.clone(), label(*c))).collect();
    for (sub, set) in [("support", &support), ("query", &query)] {
        write_glyph_dir(a.out.join(sub), set)?;
    }
    println!("wrote {} classes to {}", a.classes, a.out.display());
    Ok(())
}
