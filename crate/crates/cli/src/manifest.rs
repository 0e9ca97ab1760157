//! Corpus manifest: the labeled clip inventory.
//!
//! One CSV file per corpus. Corpus-level fields ride in `# key value`
//! comment lines above the fixed header, so plain CSV tooling still reads
//! the records:
//!
//! ```text
//! # corpus_id synth-a
//! # mono_policy left
//! # split_ratio 0.6
//! # seed 42
//! path,label,method,faked_side,cutoff_hz,split,source_clip_id,sample_rate_hz,duration_s
//! real/src0000_seg000.wav,real,,,,train,src0000_seg000,44100,1
//! fake/src0000_seg000_haas_r200.wav,fake,haas,right,200,train,src0000_seg000,44100,1
//! ```
//!
//! Entry paths are relative to the directory the manifest lives in.

use fakestereo_core::{FakedSide, Label, MonoPolicy};
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use thiserror::Error;

pub const MANIFEST_HEADER: &str =
    "path,label,method,faked_side,cutoff_hz,split,source_clip_id,sample_rate_hz,duration_s";

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("manifest references missing files: {}", .0.join(", "))]
    MissingFiles(Vec<String>),
    #[error("schema violation at line {line}: {message}")]
    Schema { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Test,
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Split::Train => f.write_str("train"),
            Split::Test => f.write_str("test"),
        }
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("invalid split {other:?}: expected train or test")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ForgeryMethod {
    Haas,
    Copy,
}

impl fmt::Display for ForgeryMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForgeryMethod::Haas => f.write_str("haas"),
            ForgeryMethod::Copy => f.write_str("copy"),
        }
    }
}

impl FromStr for ForgeryMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "haas" => Ok(ForgeryMethod::Haas),
            "copy" => Ok(ForgeryMethod::Copy),
            other => Err(format!("invalid method {other:?}: expected haas or copy")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// Relative to the manifest's directory; forward slashes.
    pub path: String,
    pub label: Label,
    pub method: Option<ForgeryMethod>,
    pub faked_side: Option<FakedSide>,
    pub cutoff_hz: Option<f64>,
    pub split: Split,
    pub source_clip_id: String,
    pub sample_rate_hz: u32,
    pub duration_s: f64,
}

impl ManifestEntry {
    fn check(&self, line: usize) -> Result<(), ManifestError> {
        let schema = |message: String| ManifestError::Schema { line, message };
        match self.label {
            Label::Real => {
                if self.method.is_some() || self.faked_side.is_some() || self.cutoff_hz.is_some() {
                    return Err(schema(format!(
                        "real entry {} must not carry forgery fields",
                        self.path
                    )));
                }
            }
            Label::Fake => {
                let Some(method) = self.method else {
                    return Err(schema(format!("fake entry {} is missing a method", self.path)));
                };
                if self.faked_side.is_none() {
                    return Err(schema(format!("fake entry {} is missing faked_side", self.path)));
                }
                match method {
                    ForgeryMethod::Haas if self.cutoff_hz.is_none() => {
                        return Err(schema(format!(
                            "haas entry {} is missing cutoff_hz",
                            self.path
                        )));
                    }
                    ForgeryMethod::Copy if self.cutoff_hz.is_some() => {
                        return Err(schema(format!(
                            "copy entry {} must not carry cutoff_hz",
                            self.path
                        )));
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CorpusManifest {
    pub corpus_id: String,
    pub mono_policy: MonoPolicy,
    pub split_ratio: f64,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
    /// Directory entry paths are resolved against; not serialized.
    pub base_dir: PathBuf,
}

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map(|x| x.to_string()).unwrap_or_default()
}

impl CorpusManifest {
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.base_dir.join(&entry.path)
    }

    pub fn entries_in(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# corpus_id {}\n", self.corpus_id));
        out.push_str(&format!("# mono_policy {}\n", self.mono_policy));
        out.push_str(&format!("# split_ratio {}\n", self.split_ratio));
        out.push_str(&format!("# seed {}\n", self.seed));
        out.push_str(MANIFEST_HEADER);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                e.path,
                e.label,
                opt(&e.method),
                opt(&e.faked_side),
                opt(&e.cutoff_hz),
                e.split,
                e.source_clip_id,
                e.sample_rate_hz,
                e.duration_s
            ));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        fs::write(path, self.to_csv())
            .map_err(|e| ManifestError::Io { path: path.display().to_string(), source: e })
    }

    pub fn from_csv(text: &str, base_dir: &Path) -> Result<Self, ManifestError> {
        let mut corpus_id = String::new();
        let mut mono_policy = MonoPolicy::default();
        let mut split_ratio = 0.6;
        let mut seed = 0u64;
        let mut entries = Vec::new();
        let mut header_seen = false;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let parse = |message: String| ManifestError::Parse { line, message };
            if raw.is_empty() {
                continue;
            }
            if let Some(rest) = raw.strip_prefix("# ") {
                let (key, value) = rest.split_once(' ').unwrap_or((rest, ""));
                match key {
                    "corpus_id" => corpus_id = value.to_string(),
                    "mono_policy" => {
                        mono_policy =
                            value.parse().map_err(|e| parse(format!("{e}")))?
                    }
                    "split_ratio" => {
                        split_ratio =
                            value.parse().map_err(|_| parse("bad split_ratio".into()))?
                    }
                    "seed" => seed = value.parse().map_err(|_| parse("bad seed".into()))?,
                    other => return Err(parse(format!("unknown manifest field {other:?}"))),
                }
                continue;
            }
            if !header_seen {
                if raw != MANIFEST_HEADER {
                    return Err(parse(format!(
                        "expected header {MANIFEST_HEADER:?}, found {raw:?}"
                    )));
                }
                header_seen = true;
                continue;
            }

            let fields: Vec<&str> = raw.split(',').collect();
            if fields.len() != 9 {
                return Err(parse(format!("expected 9 fields, found {}", fields.len())));
            }
            let non_empty = |s: &str| -> Option<String> {
                if s.is_empty() { None } else { Some(s.to_string()) }
            };
            let entry = ManifestEntry {
                path: fields[0].to_string(),
                label: fields[1].parse().map_err(|e| parse(format!("{e}")))?,
                method: non_empty(fields[2])
                    .map(|s| s.parse())
                    .transpose()
                    .map_err(parse)?,
                faked_side: non_empty(fields[3])
                    .map(|s| s.parse())
                    .transpose()
                    .map_err(|e| parse(format!("{e}")))?,
                cutoff_hz: non_empty(fields[4])
                    .map(|s| s.parse::<f64>())
                    .transpose()
                    .map_err(|_| parse("bad cutoff_hz".into()))?,
                split: fields[5].parse().map_err(parse)?,
                source_clip_id: fields[6].to_string(),
                sample_rate_hz: fields[7]
                    .parse()
                    .map_err(|_| parse("bad sample_rate_hz".into()))?,
                duration_s: fields[8].parse().map_err(|_| parse("bad duration_s".into()))?,
            };
            entry.check(line)?;
            entries.push(entry);
        }

        if !header_seen {
            return Err(ManifestError::Parse { line: 0, message: "missing header line".into() });
        }
        Ok(Self { corpus_id, mono_policy, split_ratio, seed, entries, base_dir: base_dir.into() })
    }

    /// Loads and validates schema invariants; referenced files are not
    /// checked here, call [`CorpusManifest::check_files`] for that.
    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ManifestError::Io { path: path.display().to_string(), source: e })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_csv(&text, base)
    }

    /// Verifies every referenced file exists, naming all offenders.
    pub fn check_files(&self) -> Result<(), ManifestError> {
        let missing: Vec<String> = self
            .entries
            .iter()
            .filter(|e| !self.resolve(e).is_file())
            .map(|e| e.path.clone())
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(ManifestError::MissingFiles(missing))
        }
    }

    /// No source clip may appear in both splits.
    pub fn check_split_leak(&self) -> Result<(), ManifestError> {
        use std::collections::HashMap;
        let mut seen: HashMap<&str, Split> = HashMap::new();
        for e in &self.entries {
            match seen.insert(&e.source_clip_id, e.split) {
                Some(prev) if prev != e.split => {
                    return Err(ManifestError::Schema {
                        line: 0,
                        message: format!(
                            "source clip {} appears in both splits",
                            e.source_clip_id
                        ),
                    });
                }
                _ => {}
            }
        }
        Ok(())
    }
}
