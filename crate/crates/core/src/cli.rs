//! Command-line front end.
//!
//! Exit codes: 0 success, 1 data error, 2 usage or configuration error,
//! 3 prediction-domain error (target missing from the text, no model).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use tempfile::NamedTempFile;

use crate::classifier::NaiveBayesModel;
use crate::corpus::{self, Corpus, CorpusError, CorpusStats, Instance};
use crate::eval::{self, EvaluationReport, ReportFormat, SweepConfig};
use crate::features::{ConfigError, Method, MethodSpec, Resources, WindowSize};
use crate::text::{self, Token};

/// Corpus size of the enriched 60-word Hindi lexical-sample corpus.
pub const ENRICHED_CORPUS_STATS: CorpusStats = CorpusStats {
    word_count: 383_008,
    instance_count: 7_570,
    polysemous_word_count: 60,
};

#[derive(Debug)]
pub enum CliError {
    Data(String),
    Usage(String),
    Prediction(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Prediction(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Data(m) | CliError::Usage(m) | CliError::Prediction(m) => m,
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::NotFound(_) | CorpusError::InvalidFraction(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<eval::EvalError> for CliError {
    fn from(e: eval::EvalError) -> Self {
        match e {
            eval::EvalError::Corpus(c) => c.into(),
            other => CliError::Data(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hwsd",
    version,
    about = "Supervised Hindi word sense disambiguation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print word, instance and target-word counts of a corpus.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
    },
    /// Stratified train/test split into two JSON Lines files.
    Split {
        #[arg(long)]
        corpus: PathBuf,
        /// Output path for the training part.
        #[arg(long)]
        train: PathBuf,
        /// Output path for the test part.
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
    },
    /// Train one model per target word.
    Train {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        model_dir: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Predict the sense of a target word in a piece of text.
    Predict {
        #[arg(long)]
        model_dir: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        text: String,
        #[command(flatten)]
        resources: ResourceArgs,
    },
    /// Evaluate the method × window grid on a fixed train/test pair.
    Eval {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Split a corpus and evaluate the method × window grid.
    Sweep {
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
struct SplitArgs {
    /// Fraction of each sense group used for training.
    #[arg(long, default_value_t = 0.75)]
    ratio: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct ResourceArgs {
    /// Stopword list (one token per line); defaults to the bundled list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    /// Vibhakti list; defaults to the bundled list.
    #[arg(long)]
    vibhakti: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Comma-separated methods: l, c, b, bs, v, l+c, c+bs, l+c+v.
    #[arg(long)]
    methods: Option<String>,
    /// Comma-separated windows or an inclusive range such as 2..5.
    #[arg(long)]
    windows: Option<String>,
    #[arg(long, default_value_t = crate::classifier::DEFAULT_ALPHA)]
    alpha: f64,
    #[command(flatten)]
    resources: ResourceArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>, ConfigError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(str::parse)
        .collect()
}

/// Accepts `2,3,5` or the inclusive range `2..5`.
pub fn parse_windows(s: &str) -> Result<Vec<WindowSize>, CliError> {
    let bad = || CliError::Usage(format!("invalid window list {s:?}"));
    let num = |p: &str| p.trim().parse::<usize>().map_err(|_| bad());
    let values: Vec<usize> = match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(bad());
            }
            (a..=b).collect()
        }
        None => s.split(',').map(num).collect::<Result<_, _>>()?,
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values
        .into_iter()
        .map(WindowSize::new)
        .collect::<Result<_, _>>()?)
}

fn load_resources(args: &ResourceArgs) -> CliResult<Resources> {
    let mut res = Resources::default();
    if let Some(p) = &args.stopwords {
        res.stopwords = corpus::load_wordlist(p).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    if let Some(p) = &args.vibhakti {
        res.vibhakti = corpus::load_wordlist(p).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    Ok(res)
}

fn grid_args(args: &ModelArgs) -> CliResult<(Vec<Method>, Vec<WindowSize>)> {
    let methods = match &args.methods {
        Some(s) => parse_methods(s)?,
        None => Method::SWEEP_DEFAULT.to_vec(),
    };
    if methods.is_empty() {
        return Err(CliError::Usage(format!(
            "no methods given; valid methods: {}",
            Method::NAMES.join(", ")
        )));
    }
    let windows = match &args.windows {
        Some(s) => parse_windows(s)?,
        None => parse_windows("2..5")?,
    };
    if !(args.alpha > 0.0 && args.alpha.is_finite()) {
        return Err(CliError::Usage(format!(
            "alpha must be positive, got {}",
            args.alpha
        )));
    }
    Ok((methods, windows))
}

fn load_existing(path: &Path) -> CliResult<Corpus> {
    let c = corpus::load_corpus(path)?;
    let problems = corpus::validate(&c);
    if !problems.is_empty() {
        return Err(CliError::Data(problems.join("\n")));
    }
    Ok(c)
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// File name of a target's model. Characters that could be path syntax are
/// percent-encoded.
pub fn model_file_name(target: &Token) -> String {
    let mut name = String::new();
    for c in target.as_str().chars() {
        if c.is_alphanumeric() || (!c.is_ascii() && !c.is_control()) || c == '_' {
            name.push(c);
        } else {
            let mut buf = [0u8; 4];
            for b in c.encode_utf8(&mut buf).bytes() {
                name.push_str(&format!("%{b:02X}"));
            }
        }
    }
    name + ".json"
}

fn write_output(bytes: &[u8], out: &Option<PathBuf>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, bytes)
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display()))),
        None => stdout
            .write_all(bytes)
            .map_err(|e| CliError::Data(e.to_string())),
    }
}

fn emit_report(
    report: &EvaluationReport,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    for w in &report.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let format = match output.format {
        Format::Text => ReportFormat::Text,
        Format::Csv => ReportFormat::Csv,
    };
    let bytes = eval::render_report(report, format).map_err(|e| CliError::Data(e.to_string()))?;
    write_output(&bytes, &output.out, stdout)
}

/// Soft comparison against the published ordering, meaningful only on the
/// enriched corpus: is c+bs at window 5 the best row by F1?
pub fn reference_check(stats: &CorpusStats, report: &EvaluationReport) -> Option<String> {
    if *stats != ENRICHED_CORPUS_STATS {
        return None;
    }
    let reference = report.row(Method::CollocationBagNoStop, 5)?;
    let best = report.best_by_f1()?;
    let s = reference.overall?;
    Some(format!(
        "reference check: c+bs@5 P={:.2} R={:.2} F={:.2} (published 0.80/0.85/0.82); best row by F is {} ({})",
        s.precision,
        s.recall,
        s.f1,
        best.spec,
        if best.spec == reference.spec { "matches" } else { "differs" }
    ))
}

fn cmd_stats(path: &Path, stdout: &mut dyn Write) -> CliResult<()> {
    let c = load_existing(path)?;
    let s = corpus::corpus_stats(&c);
    let _ = writeln!(stdout, "words\t{}", s.word_count);
    let _ = writeln!(stdout, "instances\t{}", s.instance_count);
    let _ = writeln!(stdout, "polysemous_words\t{}", s.polysemous_word_count);
    Ok(())
}

fn corpus_bytes(c: &Corpus) -> Vec<u8> {
    let mut buf = Vec::new();
    corpus::write_corpus(c, &mut buf).expect("writing to memory");
    buf
}

fn cmd_split(
    path: &Path,
    train_out: &Path,
    test_out: &Path,
    args: &SplitArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let c = load_existing(path)?;
    let split = corpus::split(&c, args.ratio, args.seed)?;
    for w in &split.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    for (p, part) in [(train_out, &split.train), (test_out, &split.test)] {
        write_atomic(p, &corpus_bytes(part))
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))?;
    }
    let _ = writeln!(
        stdout,
        "train\t{}\ntest\t{}",
        split.train.len(),
        split.test.len()
    );
    Ok(())
}

fn cmd_train(
    path: &Path,
    model_dir: &Path,
    args: &ModelArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let methods = match &args.methods {
        Some(s) => parse_methods(s)?,
        None => vec![Method::CollocationBagNoStop],
    };
    let windows = match &args.windows {
        Some(s) => parse_windows(s)?,
        None => vec![WindowSize::new(5)?],
    };
    let (method, window) = match (methods.as_slice(), windows.as_slice()) {
        ([m], [w]) => (*m, *w),
        _ => {
            return Err(CliError::Usage(
                "train takes exactly one method and one window".into(),
            ))
        }
    };
    let resources = load_resources(&args.resources)?;
    let c = load_existing(path)?;
    if c.is_empty() {
        return Err(CliError::Data(format!(
            "{} has no instances",
            path.display()
        )));
    }
    fs::create_dir_all(model_dir)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", model_dir.display())))?;
    let spec = MethodSpec::new(method, window);
    for (target, insts) in c.by_target() {
        let model =
            NaiveBayesModel::train(&insts, spec, &resources, args.alpha).map_err(|e| match e {
                crate::classifier::ClassifierError::Alpha(_) => CliError::Usage(e.to_string()),
                other => CliError::Data(other.to_string()),
            })?;
        if model.senses.len() == 1 {
            let _ = writeln!(stderr, "warning: target {target} has a single sense");
        }
        let json = model.to_json().map_err(|e| CliError::Data(e.to_string()))?;
        let file = model_dir.join(model_file_name(target));
        write_atomic(&file, json.as_bytes())
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", file.display())))?;
        let _ = writeln!(
            stdout,
            "{target}\t{spec}\tsenses={}\tvocabulary={}",
            model.senses.len(),
            model.vocabulary.len()
        );
    }
    Ok(())
}

fn cmd_predict(
    model_dir: &Path,
    target: &str,
    raw_text: &str,
    resources: &ResourceArgs,
    stdout: &mut dyn Write,
) -> CliResult<()> {
    let target = Token::new(&text::normalize(target))
        .map_err(|e| CliError::Usage(format!("target: {e}")))?;
    let resources = load_resources(resources)?;
    let file = model_dir.join(model_file_name(&target));
    if !file.exists() {
        return Err(CliError::Prediction(format!(
            "no model for target {target} in {}",
            model_dir.display()
        )));
    }
    let model = NaiveBayesModel::load(&file)
        .map_err(|e| CliError::Data(format!("{}: {e}", file.display())))?;
    let tokens = text::tokenize(&text::normalize(raw_text));
    let index = *text::find_target(&tokens, &target).first().ok_or_else(|| {
        CliError::Prediction(format!("target {target} does not occur in the text"))
    })?;
    let inst = Instance::new(tokens, index, "?").map_err(CliError::Data)?;
    let prediction = model
        .predict(&inst, &resources)
        .map_err(|e| CliError::Prediction(e.to_string()))?;
    let ranked = prediction.ranked();
    let best = ranked[0].1;
    let _ = writeln!(stdout, "predicted\t{}", prediction.sense.label);
    for (label, score) in ranked {
        let _ = writeln!(stdout, "{label}\t{score:.6}\t{:.6}", score - best);
    }
    Ok(())
}

fn cmd_eval(
    train: &Path,
    test: &Path,
    model: &ModelArgs,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let (methods, windows) = grid_args(model)?;
    let resources = load_resources(&model.resources)?;
    let train = load_existing(train)?;
    let test = load_existing(test)?;
    if test.is_empty() {
        return Err(CliError::Data("test set is empty".into()));
    }
    let report = eval::evaluate(&train, &test, &methods, &windows, model.alpha, &resources)?;
    emit_report(&report, output, stdout, stderr)
}

fn cmd_sweep(
    path: &Path,
    split: &SplitArgs,
    model: &ModelArgs,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CliResult<()> {
    let (methods, windows) = grid_args(model)?;
    let resources = load_resources(&model.resources)?;
    let c = load_existing(path)?;
    let config = SweepConfig {
        methods,
        windows,
        train_fraction: split.ratio,
        seed: split.seed,
        alpha: model.alpha,
    };
    let report = eval::sweep(&c, &config, &resources)?;
    if let Some(note) = reference_check(&corpus::corpus_stats(&c), &report) {
        let _ = writeln!(stderr, "{note}");
    }
    emit_report(&report, output, stdout, stderr)
}

/// Parses `args` (program name first) and runs the command. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Stats { corpus } => cmd_stats(corpus, stdout),
        Command::Split {
            corpus,
            train,
            test,
            split,
        } => cmd_split(corpus, train, test, split, stdout, stderr),
        Command::Train {
            train,
            model_dir,
            model,
        } => cmd_train(train, model_dir, model, stdout, stderr),
        Command::Predict {
            model_dir,
            target,
            text,
            resources,
        } => cmd_predict(model_dir, target, text, resources, stdout),
        Command::Eval {
            train,
            test,
            model,
            output,
        } => cmd_eval(train, test, model, output, stdout, stderr),
        Command::Sweep {
            corpus,
            split,
            model,
            output,
        } => cmd_sweep(corpus, split, model, output, stdout, stderr),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}
