//! Corpus building: segmentation, forgery generation, split bookkeeping.
//!
//! Splits are assigned at source-file granularity by a seeded shuffle, so a
//! real clip and every fake derived from it land in the same split and no
//! near-duplicate content leaks between train and test.

use crate::manifest::{CorpusManifest, ForgeryMethod, ManifestEntry, ManifestError, Split};
use crate::wav::{read_wav, write_stereo, WavError};
use fakestereo_core::clip::{Clip, MonoPolicy, StereoClip};
use fakestereo_core::forgery::{fake_stereo_copy, fake_stereo_haas, FakedSide, FilterSpec, ForgeryError};
use fakestereo_core::Label;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("no source files given")]
    NoSources,
    #[error("split ratio {0} must be strictly between 0 and 1")]
    BadSplit(f64),
    #[error("cutoff {0} Hz must be positive")]
    BadCutoff(f64),
    #[error("{}: source is not stereo; corpus sources must be real stereo clips", .0.display())]
    NotStereo(PathBuf),
    #[error("{}: sample rate {rate} Hz is not a corpus rate (44100 or 48000)", path.display())]
    UnsupportedRate { path: PathBuf, rate: u32 },
    #[error("{}: sample rate {rate} Hz is below twice the maximum cutoff {cutoff} Hz", path.display())]
    RateBelowCutoff { path: PathBuf, rate: u32, cutoff: f64 },
    #[error("{}: shorter than one segment, nothing to derive", .0.display())]
    SourceTooShort(PathBuf),
    #[error("duplicate source id {0:?}; source file stems must be unique")]
    DuplicateSourceId(String),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Forgery(#[from] ForgeryError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
}

#[derive(Debug, Clone)]
pub struct CorpusOptions {
    pub corpus_id: String,
    /// Cutoffs used to forge the train split (the paper protocol fixes 200 Hz).
    pub train_cutoffs: Vec<f64>,
    /// Cutoffs used to forge the test split.
    pub test_cutoffs: Vec<f64>,
    pub split_ratio: f64,
    pub mono_policy: MonoPolicy,
    pub seed: u64,
    pub segment_seconds: f64,
    /// Also emit Channel Copy fakes (off by default; the evaluated forgery
    /// is Haas).
    pub include_copy_fakes: bool,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            corpus_id: "corpus".into(),
            train_cutoffs: vec![200.0],
            test_cutoffs: vec![200.0, 400.0, 600.0, 800.0, 1000.0],
            split_ratio: 0.6,
            mono_policy: MonoPolicy::Left,
            seed: 42,
            segment_seconds: 1.0,
            include_copy_fakes: false,
        }
    }
}

fn io_err(path: &Path, source: io::Error) -> CorpusError {
    CorpusError::Io { path: path.display().to_string(), source }
}

/// Segments each stereo source, keeps the real clips, and derives Haas fakes
/// at every (cutoff, faked side) pair for the split the source landed in.
/// Writes all WAVs plus `manifest.csv` under `out_dir`.
pub fn build_corpus(
    sources: &[PathBuf],
    options: &CorpusOptions,
    out_dir: &Path,
) -> Result<CorpusManifest, CorpusError> {
    if sources.is_empty() {
        return Err(CorpusError::NoSources);
    }
    if !(options.split_ratio > 0.0 && options.split_ratio < 1.0) {
        return Err(CorpusError::BadSplit(options.split_ratio));
    }
    for &c in options.train_cutoffs.iter().chain(&options.test_cutoffs) {
        if !(c > 0.0) {
            return Err(CorpusError::BadCutoff(c));
        }
    }
    let max_cutoff = options
        .train_cutoffs
        .iter()
        .chain(&options.test_cutoffs)
        .fold(0.0f64, |m, &c| m.max(c));

    // Seeded shuffle assigns each source file to a split.
    let mut order: Vec<usize> = (0..sources.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    order.shuffle(&mut rng);
    let n_train = (options.split_ratio * sources.len() as f64).floor() as usize;
    let train_sources: HashSet<usize> = order[..n_train].iter().copied().collect();

    std::fs::create_dir_all(out_dir.join("real")).map_err(|e| io_err(out_dir, e))?;
    std::fs::create_dir_all(out_dir.join("fake")).map_err(|e| io_err(out_dir, e))?;

    let mut seen_ids: HashSet<String> = HashSet::new();
    let mut entries = Vec::new();

    for (index, source) in sources.iter().enumerate() {
        let stereo = match read_wav(source)? {
            Clip::Stereo(s) => s,
            Clip::Mono(_) => return Err(CorpusError::NotStereo(source.clone())),
        };
        let rate = stereo.sample_rate_hz();
        if rate != 44100 && rate != 48000 {
            return Err(CorpusError::UnsupportedRate { path: source.clone(), rate });
        }
        if (rate as f64) < 2.0 * max_cutoff {
            return Err(CorpusError::RateBelowCutoff {
                path: source.clone(),
                rate,
                cutoff: max_cutoff,
            });
        }

        let source_id = source
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("source{index}"));
        if !seen_ids.insert(source_id.clone()) {
            return Err(CorpusError::DuplicateSourceId(source_id));
        }

        let segments = stereo.segment(options.segment_seconds);
        if segments.is_empty() {
            return Err(CorpusError::SourceTooShort(source.clone()));
        }
        let split = if train_sources.contains(&index) { Split::Train } else { Split::Test };
        let cutoffs = match split {
            Split::Train => &options.train_cutoffs,
            Split::Test => &options.test_cutoffs,
        };

        for (k, segment) in segments.iter().enumerate() {
            let clip_id = format!("{source_id}_seg{k:03}");
            push_real(out_dir, &clip_id, segment, split, &mut entries)?;
            let mono = segment.to_mono(options.mono_policy);
            for &cutoff in cutoffs {
                let spec = FilterSpec::new(cutoff, rate)?;
                for side in [FakedSide::Right, FakedSide::Left] {
                    let fake = fake_stereo_haas(&mono, &spec, side)?;
                    let short = match side {
                        FakedSide::Right => 'r',
                        FakedSide::Left => 'l',
                    };
                    let rel = format!("fake/{clip_id}_haas_{short}{cutoff}.wav");
                    write_stereo(&fake, &out_dir.join(&rel))?;
                    entries.push(ManifestEntry {
                        path: rel,
                        label: Label::Fake,
                        method: Some(ForgeryMethod::Haas),
                        faked_side: Some(side),
                        cutoff_hz: Some(cutoff),
                        split,
                        source_clip_id: clip_id.clone(),
                        sample_rate_hz: rate,
                        duration_s: fake.duration_s(),
                    });
                }
            }
            if options.include_copy_fakes {
                let fake = fake_stereo_copy(&mono);
                let rel = format!("fake/{clip_id}_copy.wav");
                write_stereo(&fake, &out_dir.join(&rel))?;
                entries.push(ManifestEntry {
                    path: rel,
                    label: Label::Fake,
                    method: Some(ForgeryMethod::Copy),
                    // The mono source is channel 1 (left); the copy is
                    // channel 2.
                    faked_side: Some(FakedSide::Right),
                    cutoff_hz: None,
                    split,
                    source_clip_id: clip_id.clone(),
                    sample_rate_hz: rate,
                    duration_s: fake.duration_s(),
                });
            }
        }
    }

    let manifest = CorpusManifest {
        corpus_id: options.corpus_id.clone(),
        mono_policy: options.mono_policy,
        split_ratio: options.split_ratio,
        seed: options.seed,
        entries,
        base_dir: out_dir.to_path_buf(),
    };
    manifest.save(&out_dir.join("manifest.csv"))?;
    Ok(manifest)
}

fn push_real(
    out_dir: &Path,
    clip_id: &str,
    segment: &StereoClip,
    split: Split,
    entries: &mut Vec<ManifestEntry>,
) -> Result<(), CorpusError> {
    let rel = format!("real/{clip_id}.wav");
    write_stereo(segment, &out_dir.join(&rel))?;
    entries.push(ManifestEntry {
        path: rel,
        label: Label::Real,
        method: None,
        faked_side: None,
        cutoff_hz: None,
        split,
        source_clip_id: clip_id.to_string(),
        sample_rate_hz: segment.sample_rate_hz(),
        duration_s: segment.duration_s(),
    });
    Ok(())
}
