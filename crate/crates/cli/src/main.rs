//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 I/O or file parse failure, 2 invalid arguments,
//! 3 at least one clip judged fake (detect only), 4 training non-convergence.
//! Logs go to standard error; data goes to files or standard output.

use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use fakestereo::corpus::{build_corpus, CorpusError, CorpusOptions};
use fakestereo::evalrun::{cross_evaluate, extract_split_features, EvalError};
use fakestereo::manifest::{CorpusManifest, ForgeryMethod, ManifestEntry, ManifestError, Split};
use fakestereo::model_file::{load_detector, save_detector, ModelFileError};
use fakestereo::report::{render_csv, render_text, EvalRow};
use fakestereo::stats::render_stats_csv;
use fakestereo::synth::{synthesize_sources, SynthError, SynthOptions};
use fakestereo::wav::{read_wav, write_stereo, WavError};
use fakestereo_core::clip::{Clip, MonoPolicy};
use fakestereo_core::detector::{
    detect, detect_with_copy_check, train_detector, DetectorError, FeatureConfig,
};
use fakestereo_core::features::{feature_stats, ClipFeature, Label};
use fakestereo_core::forgery::{fake_stereo_copy, fake_stereo_haas, FakedSide, FilterSpec, ForgeryError};
use fakestereo_core::svm::SvmError;

const DEFAULT_SEED: u64 = 42;

#[derive(Parser)]
#[command(
    name = "fakestereo",
    version,
    about = "Fake-stereo audio forensics: forge, build corpora, train, detect, evaluate"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forge a fake stereo WAV from a mono (or downmixed stereo) source
    Forge(ForgeArgs),
    /// Synthesize deterministic stereo source WAVs
    Synth(SynthArgs),
    /// Build a labeled train/test corpus from stereo sources
    Corpus(CorpusArgs),
    /// Train the dual-SVM detector from a corpus manifest
    Train(TrainArgs),
    /// Classify stereo WAVs as real or fake
    Detect(DetectArgs),
    /// Evaluate detectors against corpora and report ACC/FAR
    Eval(EvalArgs),
    /// Export per-component feature distribution statistics
    Stats(StatsArgs),
}

// ---------------------------------------------------------------------------
// Errors and exit codes

#[derive(Debug)]
enum CliError {
    /// Exit 1: I/O failures and unparseable input files.
    Io(String),
    /// Exit 2: invalid flags, parameters or filters.
    Usage(String),
    /// Exit 4: the SVM solver did not converge.
    Training(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Training(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) | CliError::Usage(m) | CliError::Training(m) => f.write_str(m),
        }
    }
}

impl From<WavError> for CliError {
    fn from(e: WavError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ForgeryError> for CliError {
    fn from(e: ForgeryError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<ModelFileError> for CliError {
    fn from(e: ModelFileError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SynthError> for CliError {
    fn from(e: SynthError) -> Self {
        match e {
            SynthError::ZeroClips | SynthError::DurationTooShort(_) | SynthError::RateTooLow(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        match e {
            CorpusError::NoSources
            | CorpusError::BadSplit(_)
            | CorpusError::BadCutoff(_)
            | CorpusError::RateBelowCutoff { .. } => CliError::Usage(e.to_string()),
            CorpusError::Forgery(inner) => inner.into(),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<SvmError> for CliError {
    fn from(e: SvmError) -> Self {
        match e {
            SvmError::NoConvergence { .. } => CliError::Training(e.to_string()),
            SvmError::BadPenalty(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<DetectorError> for CliError {
    fn from(e: DetectorError) -> Self {
        match e {
            DetectorError::Svm(inner) => inner.into(),
            DetectorError::EmptyClass(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::EmptyTestSet { .. } => CliError::Usage(e.to_string()),
            EvalError::Svm(inner) => inner.into(),
            EvalError::Detector(inner) => inner.into(),
            _ => CliError::Io(e.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Config overlay: flat key=value files with the same keys as the long flags.
// Command-line flags win over the file; the file wins over built-in defaults.

struct Overlay(BTreeMap<String, String>);

impl Overlay {
    fn load(path: Option<&PathBuf>, allowed: &[&str]) -> Result<Self, CliError> {
        let mut map = BTreeMap::new();
        if let Some(path) = path {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            for (idx, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::Usage(format!(
                        "{}:{}: expected key=value",
                        path.display(),
                        idx + 1
                    )));
                };
                let key = key.trim();
                if !allowed.contains(&key) {
                    return Err(CliError::Usage(format!(
                        "{}:{}: unknown config key {key:?} (known: {})",
                        path.display(),
                        idx + 1,
                        allowed.join(", ")
                    )));
                }
                map.insert(key.to_string(), value.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }
}

fn resolve<T: FromStr>(cli: Option<T>, overlay: &Overlay, key: &str, default: T) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    match cli {
        Some(v) => Ok(v),
        None => Ok(overlay.get(key)?.unwrap_or(default)),
    }
}

fn resolve_required<T: FromStr>(cli: Option<T>, overlay: &Overlay, key: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    match cli {
        Some(v) => Ok(v),
        None => overlay
            .get(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{key}"))),
    }
}

fn resolve_flag(cli: bool, overlay: &Overlay, key: &str) -> Result<bool, CliError> {
    if cli { Ok(true) } else { Ok(overlay.get(key)?.unwrap_or(false)) }
}

fn parse_flag<T: FromStr>(name: &str, raw: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    raw.parse().map_err(|e| CliError::Usage(format!("--{name}: {e}")))
}

fn parse_cutoff_list(name: &str, raw: &str) -> Result<Vec<f64>, CliError> {
    raw.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| parse_flag::<f64>(name, s))
        .collect()
}

fn warn_ad_hoc_rate(path: &Path, rate: u32) {
    if rate != 44100 && rate != 48000 {
        eprintln!(
            "warning: {}: sample rate {rate} Hz is outside the corpus rates (44100/48000); \
             proceeding for ad-hoc use",
            path.display()
        );
    }
}

// ---------------------------------------------------------------------------
// forge

#[derive(Args)]
struct ForgeArgs {
    /// Input WAV: mono, or stereo downmixed by --mono-policy
    input: PathBuf,
    /// Output fake-stereo WAV
    output: PathBuf,
    /// High-pass cutoff frequency in Hz for the haas method [default: 200]
    #[arg(long)]
    cutoff: Option<f64>,
    /// Channel carrying the filtered copy: right or left [default: right]
    #[arg(long)]
    side: Option<String>,
    /// Forgery method: haas or copy [default: haas]
    #[arg(long)]
    method: Option<String>,
    /// Downmix policy for stereo input: left, right or average [default: left]
    #[arg(long)]
    mono_policy: Option<String>,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_forge(args: ForgeArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["cutoff", "side", "method", "mono-policy"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let cutoff = resolve(args.cutoff, &overlay, "cutoff", 200.0)?;
    let side: FakedSide =
        parse_flag("side", &resolve(args.side, &overlay, "side", "right".into())?)?;
    let method: ForgeryMethod =
        parse_flag("method", &resolve(args.method, &overlay, "method", "haas".into())?)?;
    let policy: MonoPolicy = parse_flag(
        "mono-policy",
        &resolve(args.mono_policy, &overlay, "mono-policy", "left".into())?,
    )?;
    eprintln!("[fakestereo] forge {}", args.input.display());

    let mono = match read_wav(&args.input)? {
        Clip::Mono(m) => m,
        Clip::Stereo(s) => {
            eprintln!("note: stereo input downmixed with policy {policy}");
            s.to_mono(policy)
        }
    };
    warn_ad_hoc_rate(&args.input, mono.sample_rate_hz());

    let fake = match method {
        ForgeryMethod::Haas => {
            let spec = FilterSpec::new(cutoff, mono.sample_rate_hz())?;
            fake_stereo_haas(&mono, &spec, side)?
        }
        ForgeryMethod::Copy => fake_stereo_copy(&mono),
    };
    write_stereo(&fake, &args.output)?;
    let cutoff_note = match method {
        ForgeryMethod::Haas => format!("cutoff_hz={cutoff} side={side}"),
        ForgeryMethod::Copy => "".into(),
    };
    println!(
        "forged method={method} {cutoff_note} in={} out={}",
        args.input.display(),
        args.output.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// synth

#[derive(Args)]
struct SynthArgs {
    /// Output directory for the generated WAVs
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of stereo clips to generate [default: 400]
    #[arg(long)]
    count: Option<usize>,
    /// Duration of each clip in seconds [default: 1]
    #[arg(long)]
    duration: Option<f64>,
    /// Sample rate in Hz [default: 44100]
    #[arg(long)]
    rate: Option<u32>,
    /// RNG seed; identical seeds give byte-identical WAVs [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_synth(args: SynthArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["out", "count", "duration", "rate", "seed"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let out: PathBuf = resolve_required(args.out, &overlay, "out")?;
    let opts = SynthOptions {
        count: resolve(args.count, &overlay, "count", 400)?,
        duration_s: resolve(args.duration, &overlay, "duration", 1.0)?,
        sample_rate_hz: resolve(args.rate, &overlay, "rate", 44100)?,
        seed: resolve(args.seed, &overlay, "seed", DEFAULT_SEED)?,
    };
    eprintln!(
        "[fakestereo] synth seed={} count={} duration={}s rate={}",
        opts.seed, opts.count, opts.duration_s, opts.sample_rate_hz
    );
    let paths = synthesize_sources(&opts, &out)?;
    for p in &paths {
        println!("{}", p.display());
    }
    eprintln!("[fakestereo] wrote {} clips under {}", paths.len(), out.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// corpus

#[derive(Args)]
struct CorpusArgs {
    /// Stereo source WAVs, or directories scanned for *.wav (sorted by name)
    #[arg(required = true)]
    sources: Vec<PathBuf>,
    /// Output directory for real/, fake/ and manifest.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Corpus identifier recorded in the manifest [default: corpus]
    #[arg(long)]
    corpus_id: Option<String>,
    /// Comma-separated cutoffs (Hz) forged into the train split [default: 200]
    #[arg(long)]
    train_cutoffs: Option<String>,
    /// Comma-separated cutoffs (Hz) forged into the test split
    /// [default: 200,400,600,800,1000]
    #[arg(long)]
    test_cutoffs: Option<String>,
    /// Train fraction of source files, strictly between 0 and 1 [default: 0.6]
    #[arg(long)]
    split: Option<f64>,
    /// Downmix policy deriving the forged mono: left, right, average
    /// [default: left]
    #[arg(long)]
    mono_policy: Option<String>,
    /// Seed for the split shuffle [default: 42]
    #[arg(long)]
    seed: Option<u64>,
    /// Segment length in seconds [default: 1]
    #[arg(long)]
    segment_seconds: Option<f64>,
    /// Also emit Channel Copy fakes [default: false]
    #[arg(long)]
    include_copy: bool,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn expand_sources(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut sources = Vec::new();
    for path in paths {
        if path.is_dir() {
            let mut in_dir: Vec<PathBuf> = fs::read_dir(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
                .filter_map(|entry| entry.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "wav"))
                .collect();
            in_dir.sort();
            sources.extend(in_dir);
        } else {
            sources.push(path.clone());
        }
    }
    if sources.is_empty() {
        return Err(CliError::Usage("no .wav sources found".into()));
    }
    Ok(sources)
}

fn cmd_corpus(args: CorpusArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &[
        "out",
        "corpus-id",
        "train-cutoffs",
        "test-cutoffs",
        "split",
        "mono-policy",
        "seed",
        "segment-seconds",
        "include-copy",
    ];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let out: PathBuf = resolve_required(args.out, &overlay, "out")?;
    let defaults = CorpusOptions::default();
    let options = CorpusOptions {
        corpus_id: resolve(args.corpus_id, &overlay, "corpus-id", defaults.corpus_id)?,
        train_cutoffs: parse_cutoff_list(
            "train-cutoffs",
            &resolve(args.train_cutoffs, &overlay, "train-cutoffs", "200".into())?,
        )?,
        test_cutoffs: parse_cutoff_list(
            "test-cutoffs",
            &resolve(
                args.test_cutoffs,
                &overlay,
                "test-cutoffs",
                "200,400,600,800,1000".into(),
            )?,
        )?,
        split_ratio: resolve(args.split, &overlay, "split", defaults.split_ratio)?,
        mono_policy: parse_flag(
            "mono-policy",
            &resolve(args.mono_policy, &overlay, "mono-policy", "left".into())?,
        )?,
        seed: resolve(args.seed, &overlay, "seed", DEFAULT_SEED)?,
        segment_seconds: resolve(
            args.segment_seconds,
            &overlay,
            "segment-seconds",
            defaults.segment_seconds,
        )?,
        include_copy_fakes: resolve_flag(args.include_copy, &overlay, "include-copy")?,
    };
    let sources = expand_sources(&args.sources)?;
    eprintln!(
        "[fakestereo] corpus seed={} sources={} split={} train_cutoffs={:?} test_cutoffs={:?}",
        options.seed,
        sources.len(),
        options.split_ratio,
        options.train_cutoffs,
        options.test_cutoffs
    );
    let manifest = build_corpus(&sources, &options, &out)?;
    println!(
        "{} entries ({} train, {} test) -> {}",
        manifest.entries.len(),
        manifest.entries_in(Split::Train).count(),
        manifest.entries_in(Split::Test).count(),
        out.join("manifest.csv").display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// train

#[derive(Args)]
struct TrainArgs {
    /// Corpus manifest CSV
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Soft-margin penalty [default: 0.4]
    #[arg(long = "C")]
    penalty_c: Option<f64>,
    /// Output detector model file
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_train(args: TrainArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["manifest", "C", "out"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let manifest_path: PathBuf = resolve_required(args.manifest, &overlay, "manifest")?;
    let penalty_c = resolve(args.penalty_c, &overlay, "C", 0.4)?;
    let out: PathBuf = resolve_required(args.out, &overlay, "out")?;

    let manifest = CorpusManifest::load(&manifest_path)?;
    manifest.check_files()?;
    manifest.check_split_leak()?;
    eprintln!(
        "[fakestereo] train manifest={} corpus_id={} C={penalty_c}",
        manifest_path.display(),
        manifest.corpus_id
    );

    let config = FeatureConfig::default();
    let items = extract_split_features(&manifest, Split::Train, &config)?;
    let mut real = Vec::new();
    let mut fake_right = Vec::new();
    let mut fake_left = Vec::new();
    let mut skipped_copy = 0usize;
    for item in items {
        match (item.label, item.method, item.faked_side) {
            (Label::Real, _, _) => real.push(item.feature),
            (Label::Fake, Some(ForgeryMethod::Haas), Some(FakedSide::Right)) => {
                fake_right.push(item.feature)
            }
            (Label::Fake, Some(ForgeryMethod::Haas), Some(FakedSide::Left)) => {
                fake_left.push(item.feature)
            }
            (Label::Fake, _, _) => skipped_copy += 1,
        }
    }
    if skipped_copy > 0 {
        eprintln!(
            "note: {skipped_copy} channel-copy fakes excluded from SVM training \
             (the copy check handles them)"
        );
    }

    let model = train_detector(&real, &fake_right, &fake_left, penalty_c, config, &manifest.corpus_id)?;
    save_detector(&model, &out)?;
    println!(
        "trained corpus_id={} C={penalty_c} real={} right_faked={} left_faked={} -> {}",
        manifest.corpus_id,
        real.len(),
        fake_right.len(),
        fake_left.len(),
        out.display()
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// detect

#[derive(Args)]
struct DetectArgs {
    /// Detector model file
    #[arg(long)]
    model: Option<PathBuf>,
    /// Stereo WAVs to classify
    #[arg(required = true)]
    clips: Vec<PathBuf>,
    /// Skip the channel-copy fast path and always run the SVMs
    #[arg(long)]
    no_copy_check: bool,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn score_str(score: Option<f64>) -> String {
    score.map(|s| s.to_string()).unwrap_or_else(|| "-".into())
}

fn cmd_detect(args: DetectArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["model", "no-copy-check"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let model_path: PathBuf = resolve_required(args.model, &overlay, "model")?;
    let copy_check = !resolve_flag(args.no_copy_check, &overlay, "no-copy-check")?;
    let model = load_detector(&model_path)?;
    eprintln!("[fakestereo] detect model={} clips={}", model_path.display(), args.clips.len());

    let mut any_fake = false;
    for path in &args.clips {
        let stereo = match read_wav(path)? {
            Clip::Stereo(s) => s,
            Clip::Mono(_) => {
                return Err(CliError::Io(format!(
                    "{}: mono input cannot be judged as fake stereo",
                    path.display()
                )));
            }
        };
        warn_ad_hoc_rate(path, stereo.sample_rate_hz());
        let verdict = if copy_check {
            detect_with_copy_check(&model, &stereo)?
        } else {
            detect(&model, &stereo)?
        };
        if verdict.label == Label::Fake {
            any_fake = true;
        }
        println!(
            "{}\t{}\t{}\t{}",
            path.display(),
            verdict.label,
            score_str(verdict.score_first),
            score_str(verdict.score_second)
        );
    }
    Ok(if any_fake { 3 } else { 0 })
}

// ---------------------------------------------------------------------------
// eval

#[derive(Args)]
struct EvalArgs {
    /// Comma-separated detector model files
    #[arg(long)]
    models: Option<String>,
    /// Comma-separated corpus manifest CSVs
    #[arg(long)]
    manifests: Option<String>,
    /// Report output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or text [default: csv]
    #[arg(long)]
    format: Option<String>,
    /// Add one row per test cutoff besides the pooled rows
    #[arg(long)]
    per_cutoff: bool,
    /// Disable the channel-copy fast path in the fused scope
    #[arg(long)]
    no_copy_check: bool,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn split_paths(raw: &str) -> Vec<PathBuf> {
    raw.split(',').map(|s| s.trim()).filter(|s| !s.is_empty()).map(PathBuf::from).collect()
}

fn cmd_eval(args: EvalArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["models", "manifests", "out", "format", "per-cutoff", "no-copy-check"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let model_paths = split_paths(&resolve_required::<String>(args.models, &overlay, "models")?);
    let manifest_paths =
        split_paths(&resolve_required::<String>(args.manifests, &overlay, "manifests")?);
    let format = resolve(args.format, &overlay, "format", "csv".to_string())?;
    let per_cutoff = resolve_flag(args.per_cutoff, &overlay, "per-cutoff")?;
    let copy_check = !resolve_flag(args.no_copy_check, &overlay, "no-copy-check")?;
    if format != "csv" && format != "text" {
        return Err(CliError::Usage(format!("--format: expected csv or text, got {format:?}")));
    }

    let mut models = BTreeMap::new();
    for path in &model_paths {
        let model = load_detector(path)?;
        let id = model.svm_right_faked.corpus_id.clone();
        if models.insert(id.clone(), model).is_some() {
            return Err(CliError::Usage(format!("two models share corpus_id {id:?}")));
        }
    }
    let mut manifests = BTreeMap::new();
    for path in &manifest_paths {
        let manifest = CorpusManifest::load(path)?;
        manifest.check_files()?;
        let id = manifest.corpus_id.clone();
        if manifests.insert(id.clone(), manifest).is_some() {
            return Err(CliError::Usage(format!("two manifests share corpus_id {id:?}")));
        }
    }
    eprintln!(
        "[fakestereo] eval grid {}x{} per_cutoff={per_cutoff}",
        models.len(),
        manifests.len()
    );

    let rows: Vec<EvalRow> = cross_evaluate(&models, &manifests, per_cutoff, copy_check)?;
    let rendered = if format == "csv" { render_csv(&rows) } else { render_text(&rows) };
    match &args.out {
        Some(path) => {
            fs::write(path, rendered)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("[fakestereo] wrote {} rows -> {}", rows.len(), path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// stats

#[derive(Args)]
struct StatsArgs {
    /// Corpus manifest CSV
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Stats CSV output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Which split to summarize: train, test or all [default: all]
    #[arg(long)]
    split: Option<String>,
    /// Keep only fakes forged at this cutoff (reals always kept)
    #[arg(long)]
    cutoff: Option<f64>,
    /// Keep only fakes of this faked side: right or left (reals always kept)
    #[arg(long)]
    side: Option<String>,
    /// Flat key=value overlay; keys match this subcommand's long flags
    #[arg(long)]
    config: Option<PathBuf>,
}

fn cmd_stats(args: StatsArgs) -> Result<u8, CliError> {
    const KEYS: &[&str] = &["manifest", "out", "split", "cutoff", "side"];
    let overlay = Overlay::load(args.config.as_ref(), KEYS)?;
    let manifest_path: PathBuf = resolve_required(args.manifest, &overlay, "manifest")?;
    let split_raw: String = resolve(args.split, &overlay, "split", "all".into())?;
    let cutoff: Option<f64> = match args.cutoff {
        Some(c) => Some(c),
        None => overlay.get("cutoff")?,
    };
    let side: Option<FakedSide> = match resolve::<String>(args.side, &overlay, "side", "".into())? {
        s if s.is_empty() => None,
        s => Some(parse_flag("side", &s)?),
    };
    if !matches!(split_raw.as_str(), "train" | "test" | "all") {
        return Err(CliError::Usage(format!("--split: expected train, test or all, got {split_raw:?}")));
    }

    let manifest = CorpusManifest::load(&manifest_path)?;
    manifest.check_files()?;
    eprintln!("[fakestereo] stats manifest={} split={split_raw}", manifest_path.display());

    let wanted = |entry: &&ManifestEntry| -> bool {
        let split_ok = match split_raw.as_str() {
            "train" => entry.split == Split::Train,
            "test" => entry.split == Split::Test,
            _ => true,
        };
        let fake_ok = entry.label == Label::Real
            || (cutoff.is_none_or(|c| entry.cutoff_hz == Some(c))
                && side.is_none_or(|s| entry.faked_side == Some(s)));
        split_ok && fake_ok
    };

    let config = FeatureConfig::default();
    let mut features: Vec<ClipFeature> = Vec::new();
    for entry in manifest.entries.iter().filter(wanted) {
        let path = manifest.resolve(entry);
        let stereo = match read_wav(&path)? {
            Clip::Stereo(s) => s,
            Clip::Mono(_) => {
                return Err(CliError::Io(format!("{}: not a stereo clip", path.display())));
            }
        };
        let feature = config
            .extract(&stereo)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?
            .with_label(entry.label)
            .with_provenance(&entry.path);
        features.push(feature);
    }
    if features.is_empty() {
        return Err(CliError::Usage("no clips match the stats filters".into()));
    }
    let rows = feature_stats(&features, config.num_coeffs);
    let rendered = render_stats_csv(&rows);
    match &args.out {
        Some(path) => {
            fs::write(path, rendered)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            eprintln!("[fakestereo] wrote {} rows -> {}", rows.len(), path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(0)
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Forge(args) => cmd_forge(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Corpus(args) => cmd_corpus(args),
        Command::Train(args) => cmd_train(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
