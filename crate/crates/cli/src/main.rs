use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tecvis_core::aggregate::to_csv;
use tecvis_core::canonical::to_canonical_json;
use tecvis_core::corpus::{
    parse_raw_tweet, raw_tweet_to_json, synthesize_corpus, write_store, StoreError,
};
use tecvis_core::emotion::EmotionLexicon;
use tecvis_core::query::{self, AggregateQuery, CompareQuery, Params, QueryError, TweetsQuery};
use tecvis_core::sentiment::SentimentLexicon;
use tecvis_core::{Analyzer, LexiconError, Store};

mod config;

use config::Config;

/// Exit status classes: 1 usage, 2 data, 3 I/O.
pub enum Failure {
    Usage(anyhow::Error),
    Data(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn usage(e: impl Into<anyhow::Error>) -> Self {
        Failure::Usage(e.into())
    }
    fn data(e: impl Into<anyhow::Error>) -> Self {
        Failure::Data(e.into())
    }
    fn io(e: impl Into<anyhow::Error>) -> Self {
        Failure::Io(e.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (Failure::Usage(e) | Failure::Data(e) | Failure::Io(e)) = self;
        write!(f, "{e:#}")
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::UnknownGroup(_) => Failure::data(e),
            _ => Failure::usage(e),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => Failure::io(e),
            _ => Failure::data(e),
        }
    }
}

fn lexicon_failure(kind: &str, path: &Path, e: LexiconError) -> Failure {
    match e {
        LexiconError::Io { .. } => {
            Failure::io(anyhow::Error::new(e).context(format!("{kind} lexicon")))
        }
        LexiconError::Malformed { .. } => Failure::data(
            anyhow::Error::new(e).context(format!("{kind} lexicon {}", path.display())),
        ),
    }
}

type Result<T> = std::result::Result<T, Failure>;

#[derive(Debug, Parser)]
#[command(
    name = "tecvis",
    version,
    about = "Compare emotions expressed in geotagged tweets"
)]
struct Cli {
    /// TOML file with lexicon paths, scoring constants and server settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate, score and store a JSONL file of raw tweets.
    Ingest(IngestArgs),
    /// Group the stored tweets and print per-group statistics.
    Aggregate(AggregateArgs),
    /// Compare two groups emotion by emotion.
    Compare(CompareArgs),
    /// List the tweets of one group.
    Tweets(TweetsArgs),
    /// Print store metadata.
    Meta(StoreArg),
    /// Write a deterministic synthetic corpus of raw tweets.
    Synth(SynthArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Defaults to the bundled demo lexicon.
    #[arg(long)]
    sentiment_lexicon: Option<PathBuf>,
    /// Defaults to the bundled demo lexicon.
    #[arg(long)]
    emotion_lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct StoreArg {
    #[arg(long)]
    store: PathBuf,
}

#[derive(Debug, Args)]
struct AxisArgs {
    /// state or time.
    #[arg(long)]
    axis: Option<String>,
    /// day, week or month; implies a time axis.
    #[arg(long)]
    granularity: Option<String>,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Comma-separated state codes.
    #[arg(long)]
    states: Option<String>,
    /// Inclusive lower time bound (date or timestamp).
    #[arg(long)]
    from: Option<String>,
    /// Exclusive upper time bound.
    #[arg(long)]
    to: Option<String>,
    #[arg(long)]
    emotion: Option<String>,
    /// Minimum raw score of --emotion.
    #[arg(long, allow_hyphen_values = true)]
    min: Option<String>,
    /// Maximum raw score of --emotion.
    #[arg(long, allow_hyphen_values = true)]
    max: Option<String>,
    /// Limit to one group of another axis (drill-down).
    #[arg(long)]
    restrict_axis: Option<String>,
    #[arg(long)]
    restrict_value: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CompareFormat {
    Table,
    Json,
}

#[derive(Debug, Args)]
struct AggregateArgs {
    #[command(flatten)]
    store: StoreArg,
    #[command(flatten)]
    axis: AxisArgs,
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long, value_enum, default_value = "json")]
    format: TableFormat,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    store: StoreArg,
    #[command(flatten)]
    axis: AxisArgs,
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long, value_enum, default_value = "table")]
    format: CompareFormat,
}

#[derive(Debug, Args)]
struct TweetsArgs {
    #[command(flatten)]
    store: StoreArg,
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long)]
    value: String,
    #[arg(long)]
    limit: Option<String>,
    #[arg(long)]
    offset: Option<String>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// Without a store every endpoint answers 503.
    #[arg(long)]
    store: Option<PathBuf>,
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    port: Option<u16>,
    /// Allowed origin; "*" or omitted allows any.
    #[arg(long)]
    cors_origin: Option<String>,
}

fn push(pairs: &mut Vec<(&'static str, String)>, name: &'static str, value: &Option<String>) {
    if let Some(v) = value {
        pairs.push((name, v.clone()));
    }
}

impl AxisArgs {
    fn pairs(&self, out: &mut Vec<(&'static str, String)>) {
        push(out, "axis", &self.axis);
        push(out, "granularity", &self.granularity);
    }
}

impl FilterArgs {
    fn pairs(&self, out: &mut Vec<(&'static str, String)>) {
        push(out, "states", &self.states);
        push(out, "from", &self.from);
        push(out, "to", &self.to);
        push(out, "emotion", &self.emotion);
        push(out, "min", &self.min);
        push(out, "max", &self.max);
        push(out, "restrict_axis", &self.restrict_axis);
        push(out, "restrict_value", &self.restrict_value);
    }
}

fn open_store(arg: &StoreArg) -> Result<Store> {
    log::info!("opening {}", arg.store.display());
    Ok(Store::open(&arg.store)?)
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(anyhow::Error::new(e).context("writing stdout")))
}

fn ingest(args: &IngestArgs, config: &Config) -> Result<()> {
    let sentiment_path = args
        .sentiment_lexicon
        .as_ref()
        .or(config.sentiment_lexicon.as_ref());
    let emotion_path = args
        .emotion_lexicon
        .as_ref()
        .or(config.emotion_lexicon.as_ref());
    let sentiment = match sentiment_path {
        Some(p) => SentimentLexicon::load(p).map_err(|e| lexicon_failure("sentiment", p, e))?,
        None => SentimentLexicon::bundled(),
    };
    let emotions = match emotion_path {
        Some(p) => EmotionLexicon::load(p).map_err(|e| lexicon_failure("emotion", p, e))?,
        None => EmotionLexicon::bundled(),
    };
    let analyzer = Analyzer::new(sentiment, emotions, config.sentiment);

    let input = std::fs::read_to_string(&args.input).map_err(|e| {
        Failure::io(anyhow::Error::new(e).context(format!("reading {}", args.input.display())))
    })?;
    let mut accepted = Vec::new();
    let mut rejected = 0u64;
    for (i, line) in input.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let raw = match parse_raw_tweet(line) {
            Ok(raw) => raw,
            Err(e) => {
                log::warn!("line {}: {e}", i + 1);
                rejected += 1;
                continue;
            }
        };
        match analyzer.analyze(raw) {
            Ok(t) => accepted.push(t),
            Err(reason) => {
                log::debug!("line {}: rejected ({reason:?})", i + 1);
                rejected += 1;
            }
        }
    }
    log::info!("{} accepted, {rejected} rejected", accepted.len());
    let meta = write_store(&args.output, &accepted, rejected)?;
    emit(&format!("{}\n", to_canonical_json(&meta)))
}

fn aggregate(args: &AggregateArgs) -> Result<()> {
    let mut pairs = Vec::new();
    args.axis.pairs(&mut pairs);
    args.filter.pairs(&mut pairs);
    let q = AggregateQuery::parse(&Params::new(pairs)?)?;
    let store = open_store(&args.store)?;
    match args.format {
        TableFormat::Json => emit(&query::aggregate_body(&store, &q)),
        TableFormat::Csv => emit(&to_csv(&q.run(&store))),
    }
}

fn compare(args: &CompareArgs) -> Result<()> {
    let mut pairs = vec![("a", args.a.clone()), ("b", args.b.clone())];
    args.axis.pairs(&mut pairs);
    args.filter.pairs(&mut pairs);
    let q = CompareQuery::parse(&Params::new(pairs)?)?;
    let store = open_store(&args.store)?;
    match args.format {
        CompareFormat::Json => emit(&query::compare_body(&store, &q)?),
        CompareFormat::Table => {
            let r = q.run(&store)?;
            let mut out = format!(
                "{:<13}{:>10}{:>10}{:>10}  higher\n",
                "emotion", r.key_a.value, r.key_b.value, "delta"
            );
            for row in &r.rows {
                out.push_str(&format!(
                    "{:<13}{:>10.4}{:>10.4}{:>10.4}  {}\n",
                    row.emotion.as_str(),
                    row.score_a,
                    row.score_b,
                    row.delta,
                    row.higher_side.as_str()
                ));
            }
            emit(&out)
        }
    }
}

fn tweets(args: &TweetsArgs) -> Result<()> {
    let mut pairs = vec![("value", args.value.clone())];
    args.axis.pairs(&mut pairs);
    push(&mut pairs, "limit", &args.limit);
    push(&mut pairs, "offset", &args.offset);
    let q = TweetsQuery::parse(&Params::new(pairs)?)?;
    let store = open_store(&args.store)?;
    emit(&query::tweets_body(&store, &q)?)
}

fn synth(args: &SynthArgs) -> Result<()> {
    let mut body = String::new();
    for t in synthesize_corpus(args.n, args.seed) {
        body.push_str(&raw_tweet_to_json(&t));
        body.push('\n');
    }
    std::fs::write(&args.output, body).map_err(|e| {
        Failure::io(anyhow::Error::new(e).context(format!("writing {}", args.output.display())))
    })?;
    emit(&format!("{}\n", args.n))
}

fn serve(args: &ServeArgs, config: &Config) -> Result<()> {
    let store = args
        .store
        .as_ref()
        .map(|p| Store::open(p).map(std::sync::Arc::new))
        .transpose()?;
    if store.is_none() {
        log::warn!("no store given; endpoints will answer 503");
    }
    let server_config = tecvis_server::ServerConfig {
        cors_origin: args
            .cors_origin
            .clone()
            .or_else(|| config.server.cors_origin.clone()),
    };
    let app = tecvis_server::build_app(store, &server_config).map_err(Failure::usage)?;
    let host = args
        .host
        .clone()
        .or_else(|| config.server.host.clone())
        .unwrap_or_else(|| "127.0.0.1".into());
    let port = args.port.or(config.server.port).unwrap_or(8080);
    let addr: std::net::SocketAddr = format!("{host}:{port}")
        .parse()
        .map_err(|e| Failure::usage(anyhow::anyhow!("bad listen address {host}:{port}: {e}")))?;

    let runtime = tokio::runtime::Runtime::new().map_err(Failure::io)?;
    runtime
        .block_on(tecvis_server::serve(addr, app))
        .map_err(Failure::io)
}

fn run(cli: &Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Ingest(a) => ingest(a, &config),
        Command::Aggregate(a) => aggregate(a),
        Command::Compare(a) => compare(a),
        Command::Tweets(a) => tweets(a),
        Command::Meta(a) => emit(&query::meta_body(&open_store(a)?)),
        Command::Synth(a) => synth(a),
        Command::Serve(a) => serve(a, &config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.verbose {
            log::LevelFilter::Info
        } else {
            log::LevelFilter::Warn
        })
        .parse_default_env()
        .init();

    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
