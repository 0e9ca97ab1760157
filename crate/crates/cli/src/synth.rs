//! Synthetic stereo source generation.
//!
//! Stands in for real recordings: each channel is an independent mixture of
//! band-limited noise (one-pole low-passed, cutoff 150-250 Hz) and 2-5
//! sinusoids between 400 Hz and 8 kHz, with the pair jointly peak-normalized
//! to 0.9. The bass-heavy bed gives every clip the consistent low-frequency
//! content that a high-pass forgery visibly removes.

use crate::wav::{write_stereo, WavError};
use fakestereo_core::clip::StereoClip;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("clip count must be positive")]
    ZeroClips,
    #[error("duration {0} s is too short for the sample rate")]
    DurationTooShort(f64),
    #[error("sample rate {0} Hz is too low to synthesize the tone band")]
    RateTooLow(u32),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Wav(#[from] WavError),
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub count: usize,
    pub duration_s: f64,
    pub sample_rate_hz: u32,
    pub seed: u64,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self { count: 400, duration_s: 1.0, sample_rate_hz: 44100, seed: 42 }
    }
}

fn channel(rng: &mut ChaCha8Rng, samples: usize, rate: u32) -> Vec<f64> {
    let rate_f = rate as f64;

    // Band-limited noise bed: one-pole low-passed white noise.
    let bed_cutoff = rng.random_range(150.0..250.0);
    let pole = 1.0 - (-TAU * bed_cutoff / rate_f).exp();
    let mut bed = Vec::with_capacity(samples);
    let mut acc = 0.0;
    let mut peak = 0.0f64;
    for _ in 0..samples {
        let white: f64 = rng.random_range(-1.0..1.0);
        acc += pole * (white - acc);
        peak = peak.max(acc.abs());
        bed.push(acc);
    }
    let bed_gain = rng.random_range(0.85..1.0) / peak.max(1e-12);
    let mut signal: Vec<f64> = bed.into_iter().map(|v| v * bed_gain).collect();

    let tone_top = 8000.0f64.min(0.4 * rate_f);
    let tones = rng.random_range(2..=5usize);
    for _ in 0..tones {
        let freq = rng.random_range(400.0f64.ln()..tone_top.ln()).exp();
        let amp = rng.random_range(0.05..0.25);
        let phase = rng.random_range(0.0..TAU);
        let step = TAU * freq / rate_f;
        for (i, s) in signal.iter_mut().enumerate() {
            *s += amp * (step * i as f64 + phase).sin();
        }
    }
    signal
}

fn source_clip(rng: &mut ChaCha8Rng, samples: usize, rate: u32) -> StereoClip {
    let mut left = channel(rng, samples, rate);
    let mut right = channel(rng, samples, rate);
    let peak = left
        .iter()
        .chain(&right)
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-12);
    let gain = 0.9 / peak;
    left.iter_mut().for_each(|v| *v *= gain);
    right.iter_mut().for_each(|v| *v *= gain);
    StereoClip::new(left, right, rate).expect("synthesized channels are valid")
}

/// Writes `count` deterministic stereo WAVs named `srcNNNN.wav` under
/// `out_dir` and returns their paths in order. The same seed always produces
/// byte-identical files.
pub fn synthesize_sources(opts: &SynthOptions, out_dir: &Path) -> Result<Vec<PathBuf>, SynthError> {
    if opts.count == 0 {
        return Err(SynthError::ZeroClips);
    }
    if opts.sample_rate_hz < 8000 {
        return Err(SynthError::RateTooLow(opts.sample_rate_hz));
    }
    let samples = (opts.duration_s * opts.sample_rate_hz as f64).round() as usize;
    if samples == 0 {
        return Err(SynthError::DurationTooShort(opts.duration_s));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| SynthError::Io { path: out_dir.display().to_string(), source: e })?;

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut paths = Vec::with_capacity(opts.count);
    for idx in 0..opts.count {
        let clip = source_clip(&mut rng, samples, opts.sample_rate_hz);
        let path = out_dir.join(format!("src{idx:04}.wav"));
        write_stereo(&clip, &path)?;
        paths.push(path);
    }
    Ok(paths)
}
