//! In-memory audio clips.
//!
//! Samples are real values nominally in `[-1.0, 1.0]` (PCM integers are
//! mapped to that range at the file boundary). Derived DSP output such as a
//! filtered channel may overshoot slightly; it is clamped when encoded back
//! to PCM, never in memory.

use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClipError {
    #[error("clip has no samples")]
    Empty,
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("channel lengths differ: left {left}, right {right}")]
    ChannelMismatch { left: usize, right: usize },
    #[error("sample rate must be positive")]
    ZeroRate,
}

/// How a stereo clip is reduced to mono before forging.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MonoPolicy {
    #[default]
    Left,
    Right,
    Average,
}

impl core::fmt::Display for MonoPolicy {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MonoPolicy::Left => f.write_str("left"),
            MonoPolicy::Right => f.write_str("right"),
            MonoPolicy::Average => f.write_str("average"),
        }
    }
}

impl core::str::FromStr for MonoPolicy {
    type Err = crate::ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "left" => Ok(MonoPolicy::Left),
            "right" => Ok(MonoPolicy::Right),
            "average" => Ok(MonoPolicy::Average),
            _ => Err(crate::ParseEnumError { what: "mono policy", expected: "left, right, average" }),
        }
    }
}

fn check_samples(samples: &[f64]) -> Result<(), ClipError> {
    if samples.is_empty() {
        return Err(ClipError::Empty);
    }
    if let Some(index) = samples.iter().position(|s| !s.is_finite()) {
        return Err(ClipError::NonFinite { index });
    }
    Ok(())
}

/// Single-channel audio with its sample rate.
#[derive(Debug, Clone, PartialEq)]
pub struct MonoClip {
    samples: Vec<f64>,
    sample_rate_hz: u32,
}

impl MonoClip {
    pub fn new(samples: Vec<f64>, sample_rate_hz: u32) -> Result<Self, ClipError> {
        if sample_rate_hz == 0 {
            return Err(ClipError::ZeroRate);
        }
        check_samples(&samples)?;
        Ok(Self { samples, sample_rate_hz })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    /// The sample period `T = 1 / rate` used by the forgery filter.
    pub fn sample_period_s(&self) -> f64 {
        1.0 / self.sample_rate_hz as f64
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz as f64
    }

    /// Splits into consecutive non-overlapping windows of
    /// `floor(seconds * rate)` samples; a trailing remainder shorter than one
    /// window is discarded. Panics if `seconds` does not cover at least one
    /// sample.
    pub fn segment(&self, seconds: f64) -> Vec<MonoClip> {
        let window = segment_window(seconds, self.sample_rate_hz);
        self.samples
            .chunks_exact(window)
            .map(|w| MonoClip { samples: w.to_vec(), sample_rate_hz: self.sample_rate_hz })
            .collect()
    }
}

/// Two-channel audio; both channels always have the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct StereoClip {
    left: Vec<f64>,
    right: Vec<f64>,
    sample_rate_hz: u32,
}

impl StereoClip {
    pub fn new(left: Vec<f64>, right: Vec<f64>, sample_rate_hz: u32) -> Result<Self, ClipError> {
        if sample_rate_hz == 0 {
            return Err(ClipError::ZeroRate);
        }
        if left.len() != right.len() {
            return Err(ClipError::ChannelMismatch { left: left.len(), right: right.len() });
        }
        check_samples(&left)?;
        check_samples(&right)?;
        Ok(Self { left, right, sample_rate_hz })
    }

    pub fn left(&self) -> &[f64] {
        &self.left
    }

    pub fn right(&self) -> &[f64] {
        &self.right
    }

    pub fn sample_rate_hz(&self) -> u32 {
        self.sample_rate_hz
    }

    pub fn duration_s(&self) -> f64 {
        self.left.len() as f64 / self.sample_rate_hz as f64
    }

    pub fn segment(&self, seconds: f64) -> Vec<StereoClip> {
        let window = segment_window(seconds, self.sample_rate_hz);
        self.left
            .chunks_exact(window)
            .zip(self.right.chunks_exact(window))
            .map(|(l, r)| StereoClip {
                left: l.to_vec(),
                right: r.to_vec(),
                sample_rate_hz: self.sample_rate_hz,
            })
            .collect()
    }

    /// Reduces to mono: channel selection or the per-sample mean.
    pub fn to_mono(&self, policy: MonoPolicy) -> MonoClip {
        let samples = match policy {
            MonoPolicy::Left => self.left.clone(),
            MonoPolicy::Right => self.right.clone(),
            MonoPolicy::Average => self
                .left
                .iter()
                .zip(&self.right)
                .map(|(l, r)| 0.5 * (l + r))
                .collect(),
        };
        MonoClip { samples, sample_rate_hz: self.sample_rate_hz }
    }
}

fn segment_window(seconds: f64, sample_rate_hz: u32) -> usize {
    assert!(seconds > 0.0, "segment length must be positive");
    let window = libm::floor(seconds * sample_rate_hz as f64) as usize;
    assert!(window >= 1, "segment window must cover at least one sample");
    window
}

/// A clip of either channel count, as found in a WAV file.
#[derive(Debug, Clone, PartialEq)]
pub enum Clip {
    Mono(MonoClip),
    Stereo(StereoClip),
}

impl Clip {
    pub fn sample_rate_hz(&self) -> u32 {
        match self {
            Clip::Mono(c) => c.sample_rate_hz(),
            Clip::Stereo(c) => c.sample_rate_hz(),
        }
    }

    pub fn channels(&self) -> u16 {
        match self {
            Clip::Mono(_) => 1,
            Clip::Stereo(_) => 2,
        }
    }

    pub fn duration_s(&self) -> f64 {
        match self {
            Clip::Mono(c) => c.duration_s(),
            Clip::Stereo(c) => c.duration_s(),
        }
    }

    pub fn segment(&self, seconds: f64) -> Vec<Clip> {
        match self {
            Clip::Mono(c) => c.segment(seconds).into_iter().map(Clip::Mono).collect(),
            Clip::Stereo(c) => c.segment(seconds).into_iter().map(Clip::Stereo).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_empty_and_non_finite() {
        assert_eq!(MonoClip::new(vec![], 44100).unwrap_err(), ClipError::Empty);
        assert_eq!(
            MonoClip::new(vec![0.0, f64::NAN], 44100).unwrap_err(),
            ClipError::NonFinite { index: 1 }
        );
        assert_eq!(MonoClip::new(vec![0.0], 0).unwrap_err(), ClipError::ZeroRate);
    }

    #[test]
    fn stereo_rejects_mismatched_channels() {
        assert_eq!(
            StereoClip::new(vec![0.0, 0.1], vec![0.0], 44100).unwrap_err(),
            ClipError::ChannelMismatch { left: 2, right: 1 }
        );
    }

    #[test]
    fn segments_drop_trailing_remainder() {
        // 10 s at 48 kHz in 1 s windows -> 10 clips of 48000 samples.
        let clip = MonoClip::new(vec![0.0; 480_000], 48000).unwrap();
        let segs = clip.segment(1.0);
        assert_eq!(segs.len(), 10);
        assert!(segs.iter().all(|s| s.samples().len() == 48000));

        // 1.5 s -> one window, remainder dropped.
        let clip = MonoClip::new(vec![0.0; 66_150], 44100).unwrap();
        assert_eq!(clip.segment(1.0).len(), 1);

        // 0.5 s -> no full window.
        let clip = MonoClip::new(vec![0.0; 22_050], 44100).unwrap();
        assert!(clip.segment(1.0).is_empty());
    }

    #[test]
    fn to_mono_policies() {
        let st = StereoClip::new(vec![1.0, 0.0], vec![0.0, 1.0], 44100).unwrap();
        assert_eq!(st.to_mono(MonoPolicy::Left).samples(), &[1.0, 0.0]);
        assert_eq!(st.to_mono(MonoPolicy::Right).samples(), &[0.0, 1.0]);
        assert_eq!(st.to_mono(MonoPolicy::Average).samples(), &[0.5, 0.5]);

        // Identical channels: any policy returns that channel verbatim.
        let same = StereoClip::new(vec![0.2, -0.3], vec![0.2, -0.3], 44100).unwrap();
        for policy in [MonoPolicy::Left, MonoPolicy::Right, MonoPolicy::Average] {
            assert_eq!(same.to_mono(policy).samples(), &[0.2, -0.3]);
        }
    }
}
