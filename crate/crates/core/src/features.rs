//! MFCC feature extraction.
//!
//! Per channel: pre-emphasis, overlapped Hamming-windowed frames, FFT power
//! spectrum, triangular mel filterbank energies, then the cepstrum
//!
//! ```text
//! C(l) = sum_b log10(1 + E(b)) * cos(l * pi/B * (b + 0.5)),  l = 0..L
//! ```
//!
//! averaged over frames. A stereo clip yields the left-channel mean followed
//! by the right-channel mean: `2L` values (80 with the default `L = 40`).

use crate::clip::StereoClip;
use crate::fft::Fft;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("input of {samples} samples is shorter than one frame of {frame_len}")]
    TooShort { samples: usize, frame_len: usize },
    #[error("invalid frame config: {0}")]
    BadFrameConfig(&'static str),
    #[error("invalid mel config: {0}")]
    BadMelConfig(&'static str),
}

/// Ground-truth class of a clip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Real,
    Fake,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Real => f.write_str("real"),
            Label::Fake => f.write_str("fake"),
        }
    }
}

impl core::str::FromStr for Label {
    type Err = crate::ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "real" => Ok(Label::Real),
            "fake" => Ok(Label::Fake),
            _ => Err(crate::ParseEnumError { what: "label", expected: "real, fake" }),
        }
    }
}

/// Framing parameters in samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameConfig {
    pub frame_len: usize,
    pub hop_len: usize,
    pub preemph_coeff: f64,
}

impl FrameConfig {
    /// 25 ms frames with a 10 ms hop, rounded to samples; pre-emphasis 0.95.
    pub fn for_rate(sample_rate_hz: u32) -> Self {
        Self {
            frame_len: libm::round(0.025 * sample_rate_hz as f64) as usize,
            hop_len: libm::round(0.010 * sample_rate_hz as f64) as usize,
            preemph_coeff: 0.95,
        }
    }

    /// FFT size: the frame length rounded up to a power of two.
    pub fn nfft(&self) -> usize {
        self.frame_len.next_power_of_two()
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.frame_len < 2 {
            return Err(FeatureError::BadFrameConfig("frame_len must be at least 2"));
        }
        if self.hop_len == 0 || self.hop_len > self.frame_len {
            return Err(FeatureError::BadFrameConfig("hop_len must be in 1..=frame_len"));
        }
        if !self.preemph_coeff.is_finite() {
            return Err(FeatureError::BadFrameConfig("preemph_coeff must be finite"));
        }
        Ok(())
    }
}

/// Mel filterbank and cepstrum parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelConfig {
    pub num_filters: usize,
    pub min_hz: f64,
    pub max_hz: f64,
    pub num_coeffs: usize,
}

impl MelConfig {
    /// 40 filters over the full band, 40 coefficients.
    pub fn for_rate(sample_rate_hz: u32) -> Self {
        Self { num_filters: 40, min_hz: 0.0, max_hz: sample_rate_hz as f64 / 2.0, num_coeffs: 40 }
    }

    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.num_filters == 0 {
            return Err(FeatureError::BadMelConfig("num_filters must be positive"));
        }
        if self.num_coeffs == 0 || self.num_coeffs > self.num_filters {
            return Err(FeatureError::BadMelConfig("num_coeffs must be in 1..=num_filters"));
        }
        if !(self.min_hz >= 0.0 && self.max_hz > self.min_hz) {
            return Err(FeatureError::BadMelConfig("need 0 <= min_hz < max_hz"));
        }
        Ok(())
    }
}

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * libm::log10(1.0 + hz / 700.0)
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (libm::pow(10.0, mel / 2595.0) - 1.0)
}

/// First-difference pre-emphasis `y[i] = x[i] - coeff*x[i-1]` with the
/// predecessor of the first sample taken as 0.
pub fn pre_emphasize(x: &[f64], coeff: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut prev = 0.0;
    for &v in x {
        out.push(v - coeff * prev);
        prev = v;
    }
    out
}

/// Hamming window value `0.54 - 0.46*cos(2*pi*n/(N-1))` for `0 <= n < N`.
pub fn hamming_window(n: usize, window_len: usize) -> f64 {
    assert!(window_len >= 2, "window length must be at least 2");
    assert!(n < window_len, "window index out of range");
    0.54 - 0.46 * libm::cos(TAU * n as f64 / (window_len - 1) as f64)
}

/// Splits into overlapped frames of `frame_len` advancing by `hop_len`, each
/// multiplied pointwise by the Hamming window. Trailing samples that do not
/// fill a frame are dropped.
pub fn frame_signal(x: &[f64], cfg: &FrameConfig) -> Result<Vec<Vec<f64>>, FeatureError> {
    cfg.validate()?;
    if x.len() < cfg.frame_len {
        return Err(FeatureError::TooShort { samples: x.len(), frame_len: cfg.frame_len });
    }
    let window: Vec<f64> = (0..cfg.frame_len).map(|n| hamming_window(n, cfg.frame_len)).collect();
    let count = (x.len() - cfg.frame_len) / cfg.hop_len + 1;
    let mut frames = Vec::with_capacity(count);
    for k in 0..count {
        let start = k * cfg.hop_len;
        let frame: Vec<f64> = x[start..start + cfg.frame_len]
            .iter()
            .zip(&window)
            .map(|(s, w)| s * w)
            .collect();
        frames.push(frame);
    }
    Ok(frames)
}

/// Triangular unit-peak filters with centers equally spaced on the mel scale.
/// Only the non-zero span of each filter is stored.
#[derive(Debug, Clone)]
pub struct MelFilterbank {
    filters: Vec<(usize, Vec<f64>)>,
}

impl MelFilterbank {
    /// Builds the bank for power-spectrum bins `0 ..= nfft/2` at the given
    /// sample rate.
    pub fn new(mel: &MelConfig, sample_rate_hz: u32, nfft: usize) -> Self {
        let num_bins = nfft / 2 + 1;
        let bin_hz = sample_rate_hz as f64 / nfft as f64;
        let mel_lo = hz_to_mel(mel.min_hz);
        let mel_hi = hz_to_mel(mel.max_hz);
        let step = (mel_hi - mel_lo) / (mel.num_filters + 1) as f64;
        let edge = |i: usize| mel_to_hz(mel_lo + step * i as f64);

        let mut filters = Vec::with_capacity(mel.num_filters);
        for b in 0..mel.num_filters {
            let (lo, center, hi) = (edge(b), edge(b + 1), edge(b + 2));
            let mut first_bin = None;
            let mut weights = Vec::new();
            for k in 0..num_bins {
                let f = k as f64 * bin_hz;
                let w = if f > lo && f <= center {
                    (f - lo) / (center - lo)
                } else if f > center && f < hi {
                    (hi - f) / (hi - center)
                } else {
                    0.0
                };
                if w > 0.0 {
                    if first_bin.is_none() {
                        first_bin = Some(k);
                    }
                    weights.push(w);
                } else if first_bin.is_some() {
                    break;
                }
            }
            filters.push((first_bin.unwrap_or(0), weights));
        }
        Self { filters }
    }

    /// A bank whose filters all weigh every bin by 1 (diagnostics: any input
    /// yields identical energies in every band).
    pub fn flat(num_filters: usize, num_bins: usize) -> Self {
        let weights = alloc::vec![1.0; num_bins];
        Self { filters: alloc::vec![(0, weights); num_filters] }
    }

    pub fn num_filters(&self) -> usize {
        self.filters.len()
    }

    /// Sub-band energies `E(b) = sum_k power[k] * tri_b(f_k)`.
    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.filters
            .iter()
            .map(|(first, weights)| {
                weights
                    .iter()
                    .zip(&power[*first..])
                    .map(|(w, p)| w * p)
                    .sum()
            })
            .collect()
    }
}

/// Mel sub-band energies of one windowed frame. Convenience form that builds
/// the FFT plan and filterbank on the fly; the clip-level extractor caches
/// them instead.
pub fn mel_energies(frame: &[f64], mel: &MelConfig, sample_rate_hz: u32) -> Vec<f64> {
    let nfft = frame.len().next_power_of_two();
    let fft = Fft::new(nfft);
    let bank = MelFilterbank::new(mel, sample_rate_hz, nfft);
    bank.apply(&fft.power_spectrum(frame))
}

/// Cepstral coefficients `C(l)` for `l = 0 .. num_coeffs` from sub-band
/// energies.
pub fn mfcc_frame(energies: &[f64], mel: &MelConfig) -> Vec<f64> {
    let b_total = energies.len();
    debug_assert_eq!(b_total, mel.num_filters);
    let log_e: Vec<f64> = energies.iter().map(|&e| libm::log10(1.0 + e)).collect();
    (0..mel.num_coeffs)
        .map(|l| {
            log_e
                .iter()
                .enumerate()
                .map(|(b, &v)| {
                    v * libm::cos(l as f64 * core::f64::consts::PI / b_total as f64 * (b as f64 + 0.5))
                })
                .sum()
        })
        .collect()
}

/// Per-clip feature vector: left-channel coefficient means followed by
/// right-channel means.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipFeature {
    pub values: Vec<f64>,
    pub label: Option<Label>,
    pub provenance: String,
}

impl ClipFeature {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    pub fn with_label(mut self, label: Label) -> Self {
        self.label = Some(label);
        self
    }

    pub fn with_provenance(mut self, provenance: &str) -> Self {
        self.provenance = String::from(provenance);
        self
    }
}

fn channel_mean_mfcc(
    samples: &[f64],
    fcfg: &FrameConfig,
    mel: &MelConfig,
    bank: &MelFilterbank,
    fft: &Fft,
) -> Result<Vec<f64>, FeatureError> {
    let emphasized = pre_emphasize(samples, fcfg.preemph_coeff);
    let frames = frame_signal(&emphasized, fcfg)?;
    let mut acc = alloc::vec![0.0; mel.num_coeffs];
    for frame in &frames {
        let energies = bank.apply(&fft.power_spectrum(frame));
        for (a, c) in acc.iter_mut().zip(mfcc_frame(&energies, mel)) {
            *a += c;
        }
    }
    let n = frames.len() as f64;
    for a in &mut acc {
        *a /= n;
    }
    Ok(acc)
}

/// Full per-clip pipeline: both channels processed independently, frame
/// coefficients averaged per index, then concatenated left-then-right.
pub fn extract_clip_feature(
    y: &StereoClip,
    fcfg: &FrameConfig,
    mel: &MelConfig,
) -> Result<ClipFeature, FeatureError> {
    fcfg.validate()?;
    mel.validate()?;
    let fft = Fft::new(fcfg.nfft());
    let bank = MelFilterbank::new(mel, y.sample_rate_hz(), fcfg.nfft());
    let mut values = channel_mean_mfcc(y.left(), fcfg, mel, &bank, &fft)?;
    values.extend(channel_mean_mfcc(y.right(), fcfg, mel, &bank, &fft)?);
    Ok(ClipFeature { values, label: None, provenance: String::new() })
}

/// Which half of a feature vector a component belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureChannel {
    Left,
    Right,
}

impl fmt::Display for FeatureChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FeatureChannel::Left => f.write_str("left"),
            FeatureChannel::Right => f.write_str("right"),
        }
    }
}

/// Distribution summary of one feature component within one label group.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStats {
    pub component: usize,
    pub channel: FeatureChannel,
    pub label: Option<Label>,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
    pub mean: f64,
}

/// Linear-interpolation quantile of a sorted slice (the common "type 7"
/// definition: rank `(n-1)*p`).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (n - 1) as f64 * p;
    let lo = libm::floor(rank) as usize;
    let hi = libm::ceil(rank) as usize;
    let frac = rank - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Boxplot-ready summaries, one per (component, label-group) in a fixed
/// order: labels real, fake, then unlabeled; within a label, left-channel
/// components 0..L then right-channel components 0..L.
pub fn feature_stats(features: &[ClipFeature], num_coeffs: usize) -> Vec<ComponentStats> {
    let groups: [Option<Label>; 3] = [Some(Label::Real), Some(Label::Fake), None];
    let mut rows = Vec::new();
    for group in groups {
        let members: Vec<&ClipFeature> = features.iter().filter(|f| f.label == group).collect();
        if members.is_empty() {
            continue;
        }
        for index in 0..2 * num_coeffs {
            let mut values: Vec<f64> = members.iter().map(|f| f.values[index]).collect();
            values.sort_unstable_by(f64::total_cmp);
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let (channel, component) = if index < num_coeffs {
                (FeatureChannel::Left, index)
            } else {
                (FeatureChannel::Right, index - num_coeffs)
            };
            rows.push(ComponentStats {
                component,
                channel,
                label: group,
                min: values[0],
                q1: quantile_sorted(&values, 0.25),
                median: quantile_sorted(&values, 0.5),
                q3: quantile_sorted(&values, 0.75),
                max: values[values.len() - 1],
                mean,
            });
        }
    }
    rows
}
