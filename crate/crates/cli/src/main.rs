//! `funtag`: train, tag, parse, evaluate, and render from the command line.
//!
//! Every subcommand streams its input line by line, writes data to stdout
//! only, and sends diagnostics through the logger (stderr). Exit codes:
//! 0 success, 1 processing error, 2 rejected lines (`parse`) or usage errors.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use funtag_core::{
    default_grammar, evaluate, load_corpus, load_grammar, parse_sentence_line, parse_tagged_line,
    parse_with_cap, render_tagged_line, render_tree, tagged_to_json, train, AnnotatedSentence,
    ChunkType, Correctness, DecodeMode, DecodeOptions, EvalOptions, FunctionTag, Grammar, Model,
    ParseTree, TrainOptions, TreeFormat, DEFAULT_TREE_CAP,
};

const FILE_FORMATS: &str = "\
File formats:

  Corpus — one sentence per line, `%` starts a comment line:
      TYPE@TAG[surface/pos.category, ...]#TYPE@TAG[...]။
    TYPE is one of NC, PPC, AC, RC, CC, SFC, VC. `@TAG` is the optional gold
    function tag (SFC chunks accept only `@Null`); `.category` is the optional
    feature category; `#` separates chunks; a trailing `။` marks a complete
    sentence. Whitespace around delimiters is ignored.
      NC@PSubj[မမ/n.person]#VC@Active[သွား/v.common]#SFC@Null[သည်/sf]။

  Model — header `funtag-model v1`, then tab-separated sections [params],
    [counts.tag_feat], [counts.feat], [counts.next_tag], [counts.tag],
    [prior], [transition]. The probability sections are optional; when absent
    they are re-derived from the counts under the stored smoothing weight.

  Grammar — one rule per line, `#` starts a comment:
      Sentence -> I-sent | I-sent 'CCP' I-sent
    Quoted symbols are function-tag terminals, bare names are nonterminals,
    `|` separates alternatives. The start symbol is `Sentence`.

Every option can also be set through the environment variable named in its
help text (prefix FUNTAG_). RUST_LOG controls diagnostic verbosity
(default: warn).";

#[derive(Parser)]
#[command(
    name = "funtag",
    version,
    about = "Statistical function tagging and grammar checking for chunk-annotated Myanmar text",
    after_long_help = FILE_FORMATS
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a model from a gold-annotated corpus.
    Train(TrainArgs),
    /// Tag chunked sentences with a trained model.
    Tag(TagArgs),
    /// Check tag sequences against the grammar and print parse trees.
    Parse(ParseArgs),
    /// Tag a gold corpus and report precision/recall/F1 per sentence type.
    Eval(EvalArgs),
    /// Re-render parse trees from their JSON form.
    Render(RenderArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Pick the best tag at each chunk, left to right.
    Greedy,
    /// Find the globally best tag sequence.
    Exact,
}

impl ModeArg {
    fn decode_mode(self) -> DecodeMode {
        match self {
            ModeArg::Greedy => DecodeMode::Greedy,
            ModeArg::Exact => DecodeMode::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeFormatArg {
    /// Indented outline, one symbol per line.
    Ascii,
    /// One JSON object per tree.
    Json,
    /// Graphviz digraph.
    Dot,
}

impl TreeFormatArg {
    fn tree_format(self) -> TreeFormat {
        match self {
            TreeFormatArg::Ascii => TreeFormat::Ascii,
            TreeFormatArg::Json => TreeFormat::Json,
            TreeFormatArg::Dot => TreeFormat::Dot,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CorrectArg {
    /// A sentence is correct when the grammar accepts its predicted tags.
    Accept,
    /// A sentence is correct when the predicted tags match the gold tags.
    Match,
}

impl CorrectArg {
    fn correctness(self) -> Correctness {
        match self {
            CorrectArg::Accept => Correctness::Accept,
            CorrectArg::Match => Correctness::Match,
        }
    }
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err("must be a finite number >= 0".to_string()),
    }
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err("must be a finite number > 0".to_string()),
    }
}

fn parse_cap(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        _ => Err("must be an integer >= 1".to_string()),
    }
}

fn parse_fallback(s: &str) -> Result<FunctionTag, String> {
    match FunctionTag::from_name(s) {
        Some(tag) if !tag.is_null() => Ok(tag),
        Some(_) => Err("Null marks dropped chunks and cannot be assigned".to_string()),
        None => Err(format!("unknown function tag `{s}`")),
    }
}

#[derive(Args)]
struct TrainArgs {
    /// Annotated corpus file, or `-` for standard input.
    #[arg(value_name = "CORPUS", default_value = "-")]
    corpus: PathBuf,
    /// Where to write the model file.
    #[arg(short, long, env = "FUNTAG_MODEL", value_name = "PATH")]
    out: PathBuf,
    /// Additive smoothing weight for both probability tables.
    #[arg(long, env = "FUNTAG_ALPHA", value_parser = parse_alpha, default_value_t = 0.0)]
    alpha: f64,
    /// Decode-time probability for unseen transitions (not baked into the model).
    #[arg(long, env = "FUNTAG_EPSILON", value_parser = parse_epsilon, default_value_t = 1e-9)]
    epsilon: f64,
    /// Fail on the first malformed corpus line instead of skipping it.
    #[arg(long, env = "FUNTAG_STRICT")]
    strict: bool,
}

#[derive(Args)]
struct TagArgs {
    /// Chunked sentences (one per line, gold tags not required), or `-` for
    /// standard input.
    #[arg(value_name = "INPUT", default_value = "-")]
    input: PathBuf,
    /// Trained model file.
    #[arg(short, long, env = "FUNTAG_MODEL", value_name = "PATH")]
    model: PathBuf,
    /// Decoding strategy.
    #[arg(long, env = "FUNTAG_MODE", value_enum, default_value = "greedy")]
    mode: ModeArg,
    /// Tag for chunks whose head feature was never seen in training
    /// (default: the most frequent training tag).
    #[arg(long, env = "FUNTAG_FALLBACK", value_parser = parse_fallback, value_name = "TAG")]
    fallback: Option<FunctionTag>,
    /// Re-derive the model's probability tables under this smoothing weight.
    #[arg(long, env = "FUNTAG_ALPHA", value_parser = parse_alpha)]
    alpha: Option<f64>,
    /// Override the model's floor probability for unseen transitions.
    #[arg(long, env = "FUNTAG_EPSILON", value_parser = parse_epsilon)]
    epsilon: Option<f64>,
    /// Output format: tagged lines or one JSON object per line.
    #[arg(long, env = "FUNTAG_FORMAT", value_enum, default_value = "text")]
    format: FormatArg,
    /// Fail on the first malformed input line instead of skipping it.
    #[arg(long, env = "FUNTAG_STRICT")]
    strict: bool,
}

#[derive(Args)]
struct ParseArgs {
    /// Tagged lines or bare tag sequences, or `-` for standard input.
    #[arg(value_name = "INPUT", default_value = "-")]
    input: PathBuf,
    /// Grammar file (default: the built-in grammar).
    #[arg(short, long, env = "FUNTAG_GRAMMAR", value_name = "PATH")]
    grammar: Option<PathBuf>,
    /// Most parse trees reported per sentence.
    #[arg(long, env = "FUNTAG_CAP", value_parser = parse_cap, default_value_t = DEFAULT_TREE_CAP)]
    cap: usize,
    /// Output format: ACCEPT/REJECT lines with trees, or one JSON object per
    /// line.
    #[arg(long, env = "FUNTAG_FORMAT", value_enum, default_value = "text")]
    format: FormatArg,
    /// Fail on the first malformed input line instead of skipping it.
    #[arg(long, env = "FUNTAG_STRICT")]
    strict: bool,
}

#[derive(Args)]
struct EvalArgs {
    /// Gold-annotated corpus, or `-` for standard input.
    #[arg(value_name = "GOLD", default_value = "-")]
    gold: PathBuf,
    /// Trained model file.
    #[arg(short, long, env = "FUNTAG_MODEL", value_name = "PATH")]
    model: PathBuf,
    /// Grammar file (default: the built-in grammar).
    #[arg(short, long, env = "FUNTAG_GRAMMAR", value_name = "PATH")]
    grammar: Option<PathBuf>,
    /// Decoding strategy.
    #[arg(long, env = "FUNTAG_MODE", value_enum, default_value = "greedy")]
    mode: ModeArg,
    /// What counts as a correct sentence.
    #[arg(long, env = "FUNTAG_CORRECT", value_enum, default_value = "match")]
    correct: CorrectArg,
    /// Report format.
    #[arg(long, env = "FUNTAG_FORMAT", value_enum, default_value = "text")]
    format: FormatArg,
    /// Fail on the first malformed corpus line instead of skipping it.
    #[arg(long, env = "FUNTAG_STRICT")]
    strict: bool,
}

#[derive(Args)]
struct RenderArgs {
    /// Parse trees as JSON, one per line, or `-` for standard input.
    #[arg(value_name = "INPUT", default_value = "-")]
    input: PathBuf,
    /// Output form for each tree.
    #[arg(long, env = "FUNTAG_TREE_FORMAT", value_enum, default_value = "ascii")]
    format: TreeFormatArg,
    /// Fail on the first malformed input line instead of skipping it.
    #[arg(long, env = "FUNTAG_STRICT")]
    strict: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Train(args) => cmd_train(args),
        Command::Tag(args) => cmd_tag(args),
        Command::Parse(args) => cmd_parse(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Render(args) => cmd_render(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn open_input(path: &Path) -> Result<Box<dyn BufRead>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        let file = fs::File::open(path)
            .with_context(|| format!("cannot open `{}`", path.display()))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

/// Numbered data lines: blank lines and `%` comment lines are skipped,
/// carriage returns are stripped.
fn data_lines(reader: Box<dyn BufRead>) -> impl Iterator<Item = io::Result<(usize, String)>> {
    reader.lines().enumerate().filter_map(|(i, line)| match line {
        Ok(mut text) => {
            if text.ends_with('\r') {
                text.pop();
            }
            let trimmed = text.trim();
            if trimmed.is_empty() || trimmed.starts_with('%') {
                None
            } else {
                Some(Ok((i + 1, text)))
            }
        }
        Err(e) => Some(Err(e)),
    })
}

fn read_model(path: &Path, alpha: Option<f64>, epsilon: Option<f64>) -> Result<Model> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read model `{}`", path.display()))?;
    let mut model = Model::load(&text)
        .with_context(|| format!("invalid model file `{}`", path.display()))?;
    if let Some(alpha) = alpha {
        model = model.with_smoothing(alpha)?;
    }
    if let Some(epsilon) = epsilon {
        model.set_floor_epsilon(epsilon)?;
    }
    Ok(model)
}

fn read_grammar(path: Option<&Path>) -> Result<Grammar> {
    match path {
        None => Ok(default_grammar()),
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("cannot read grammar `{}`", path.display()))?;
            let loaded = load_grammar(&text)
                .with_context(|| format!("invalid grammar file `{}`", path.display()))?;
            for warning in &loaded.warnings {
                log::warn!("{}: {warning}", path.display());
            }
            Ok(loaded.grammar)
        }
    }
}

fn cmd_train(args: &TrainArgs) -> Result<ExitCode> {
    let reader = open_input(&args.corpus)?;
    let corpus = load_corpus(reader, args.strict)
        .with_context(|| format!("failed to load corpus `{}`", args.corpus.display()))?;
    for error in &corpus.errors {
        log::warn!("{}: {error} (line skipped)", args.corpus.display());
    }
    eprint!("{}", corpus.stats.render(corpus.errors.len()));

    let options = TrainOptions { smoothing_alpha: args.alpha, floor_epsilon: args.epsilon };
    let model = train(&corpus.into_sentences(), &options).context("training failed")?;
    fs::write(&args.out, model.save())
        .with_context(|| format!("cannot write model `{}`", args.out.display()))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_tag(args: &TagArgs) -> Result<ExitCode> {
    let model = read_model(&args.model, args.alpha, args.epsilon)?;
    let options =
        DecodeOptions { mode: args.mode.decode_mode(), fallback: args.fallback };
    let fallback = args.fallback.unwrap_or_else(|| model.fallback_tag());

    let mut out = io::BufWriter::new(io::stdout().lock());
    for line in data_lines(open_input(&args.input)?) {
        let (number, text) = line?;
        let sentence = match parse_sentence_line(&text) {
            Ok(sentence) => sentence,
            Err(e) if args.strict => {
                return Err(e).with_context(|| format!("line {number}"));
            }
            Err(e) => {
                log::warn!("line {number}: {e} (line skipped)");
                continue;
            }
        };
        warn_unknown_features(&model, &sentence, number, fallback);
        let tagged = funtag_core::decode(&model, &sentence, &options);
        match args.format {
            FormatArg::Text => writeln!(out, "{}", render_tagged_line(&tagged))?,
            FormatArg::Json => writeln!(out, "{}", tagged_to_json(&tagged))?,
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn warn_unknown_features(
    model: &Model,
    sentence: &AnnotatedSentence,
    line: usize,
    fallback: FunctionTag,
) {
    for chunk in sentence.chunks() {
        if chunk.chunk_type() == ChunkType::SFC {
            continue;
        }
        let feature = chunk.head_feature();
        if model.prior(feature).is_empty() {
            log::warn!(
                "line {line}: no training data for feature `{feature}`; \
                 falling back to `{fallback}`"
            );
        }
    }
}

fn cmd_parse(args: &ParseArgs) -> Result<ExitCode> {
    let grammar = read_grammar(args.grammar.as_deref())?;

    let mut any_rejected = false;
    let mut out = io::BufWriter::new(io::stdout().lock());
    for line in data_lines(open_input(&args.input)?) {
        let (number, text) = line?;
        let (tags, _terminated) = match parse_tagged_line(&text) {
            Ok(parsed) => parsed,
            Err(e) if args.strict => {
                return Err(e).with_context(|| format!("line {number}"));
            }
            Err(e) => {
                log::warn!("line {number}: {e} (line skipped)");
                continue;
            }
        };
        let outcome = parse_with_cap(&grammar, &tags, args.cap);
        if !outcome.accepted() {
            any_rejected = true;
        }
        match args.format {
            FormatArg::Text => {
                if outcome.accepted() {
                    let note = if outcome.truncated { " truncated" } else { "" };
                    writeln!(out, "ACCEPT trees={}{note}", outcome.trees.len())?;
                    for tree in &outcome.trees {
                        write!(out, "{}", render_tree(tree, TreeFormat::Ascii))?;
                    }
                } else {
                    let prefix = funtag_core::longest_recognized_prefix(&grammar, &tags);
                    writeln!(out, "REJECT prefix={prefix}")?;
                }
            }
            FormatArg::Json => {
                let tag_names: Vec<&str> = tags.iter().map(|t| t.name()).collect();
                let value = if outcome.accepted() {
                    serde_json::json!({
                        "status": "accept",
                        "tags": tag_names,
                        "trees": outcome.trees,
                        "truncated": outcome.truncated,
                    })
                } else {
                    serde_json::json!({
                        "status": "reject",
                        "tags": tag_names,
                        "prefix": funtag_core::longest_recognized_prefix(&grammar, &tags),
                    })
                };
                writeln!(out, "{value}")?;
            }
        }
    }
    out.flush()?;
    Ok(if any_rejected { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn cmd_eval(args: &EvalArgs) -> Result<ExitCode> {
    let model = read_model(&args.model, None, None)?;
    let grammar = read_grammar(args.grammar.as_deref())?;
    let reader = open_input(&args.gold)?;
    let corpus = load_corpus(reader, args.strict)
        .with_context(|| format!("failed to load corpus `{}`", args.gold.display()))?;
    for error in &corpus.errors {
        log::warn!("{}: {error} (line skipped)", args.gold.display());
    }

    let options =
        EvalOptions { mode: args.mode.decode_mode(), correctness: args.correct.correctness() };
    let report = evaluate(&model, &grammar, &corpus.into_sentences(), &options)
        .context("evaluation failed")?;
    match args.format {
        FormatArg::Text => print!("{}", report.render_text()),
        FormatArg::Json => println!("{}", report.render_json()),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_render(args: &RenderArgs) -> Result<ExitCode> {
    let mut out = io::BufWriter::new(io::stdout().lock());
    for line in data_lines(open_input(&args.input)?) {
        let (number, text) = line?;
        let tree: ParseTree = match serde_json::from_str(&text) {
            Ok(tree) => tree,
            Err(e) if args.strict => {
                return Err(e).with_context(|| format!("line {number}"));
            }
            Err(e) => {
                log::warn!("line {number}: not a parse tree: {e} (line skipped)");
                continue;
            }
        };
        let rendered = render_tree(&tree, args.format.tree_format());
        match args.format {
            TreeFormatArg::Json => writeln!(out, "{rendered}")?,
            TreeFormatArg::Ascii | TreeFormatArg::Dot => write!(out, "{rendered}")?,
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
