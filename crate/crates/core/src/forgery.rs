//! Fake-stereo synthesis: Channel Copy and the Haas-effect high-pass method.
//!
//! The Haas forgery keeps the mono source on one channel and puts a one-pole
//! high-pass-filtered copy of it on the other. The filter is the recursion
//!
//! ```text
//! y[l] = alpha * (x[l] - x[l-1] + y[l-1]),   alpha = 1 / (1 + 2*pi*f_cutoff*T)
//! ```
//!
//! with zero initial conditions `x[0] = y[0] = 0`.

use crate::clip::{MonoClip, StereoClip};
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ForgeryError {
    #[error("cutoff must be positive, got {0} Hz")]
    NonPositiveCutoff(f64),
    #[error("cutoff {cutoff_hz} Hz is not below the Nyquist frequency {nyquist_hz} Hz")]
    CutoffAboveNyquist { cutoff_hz: f64, nyquist_hz: f64 },
    #[error("filter sample period {spec_period_s} s does not match clip rate {clip_rate_hz} Hz")]
    RateMismatch { spec_period_s: f64, clip_rate_hz: u32 },
}

/// One-pole high-pass filter parameters bound to a sample rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    cutoff_hz: f64,
    sample_period_s: f64,
    alpha: f64,
}

impl FilterSpec {
    pub fn new(cutoff_hz: f64, sample_rate_hz: u32) -> Result<Self, ForgeryError> {
        if !(cutoff_hz > 0.0) {
            return Err(ForgeryError::NonPositiveCutoff(cutoff_hz));
        }
        let nyquist_hz = sample_rate_hz as f64 / 2.0;
        if cutoff_hz >= nyquist_hz {
            return Err(ForgeryError::CutoffAboveNyquist { cutoff_hz, nyquist_hz });
        }
        let sample_period_s = 1.0 / sample_rate_hz as f64;
        let alpha = 1.0 / (1.0 + TAU * cutoff_hz * sample_period_s);
        Ok(Self { cutoff_hz, sample_period_s, alpha })
    }

    pub fn cutoff_hz(&self) -> f64 {
        self.cutoff_hz
    }

    pub fn sample_period_s(&self) -> f64 {
        self.sample_period_s
    }

    /// The recursion coefficient; always in `(0, 1)` by construction.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Which channel of the forged stereo carries the filtered copy.
///
/// `Right` means the mono source becomes the left channel and the filtered
/// copy becomes the right channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FakedSide {
    Right,
    Left,
}

impl fmt::Display for FakedSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FakedSide::Right => f.write_str("right"),
            FakedSide::Left => f.write_str("left"),
        }
    }
}

impl core::str::FromStr for FakedSide {
    type Err = crate::ParseEnumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "right" => Ok(FakedSide::Right),
            "left" => Ok(FakedSide::Left),
            _ => Err(crate::ParseEnumError { what: "faked side", expected: "right, left" }),
        }
    }
}

pub(crate) fn high_pass_samples(samples: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut prev_x = 0.0;
    let mut prev_y = 0.0;
    for &x in samples {
        prev_y = alpha * (x - prev_x + prev_y);
        prev_x = x;
        out.push(prev_y);
    }
    out
}

/// Runs the one-pole high-pass recursion over a clip.
pub fn high_pass_filter(x: &MonoClip, spec: &FilterSpec) -> Result<MonoClip, ForgeryError> {
    if spec.sample_period_s != x.sample_period_s() {
        return Err(ForgeryError::RateMismatch {
            spec_period_s: spec.sample_period_s,
            clip_rate_hz: x.sample_rate_hz(),
        });
    }
    let out = high_pass_samples(x.samples(), spec.alpha);
    Ok(MonoClip::new(out, x.sample_rate_hz()).expect("filter output is finite and non-empty"))
}

/// Channel Copy forgery: both stereo channels are the mono source verbatim.
pub fn fake_stereo_copy(x: &MonoClip) -> StereoClip {
    StereoClip::new(x.samples().to_vec(), x.samples().to_vec(), x.sample_rate_hz())
        .expect("source clip is valid")
}

/// Haas-effect forgery: the original channel carries `x` verbatim, the faked
/// channel carries the high-pass-filtered copy.
pub fn fake_stereo_haas(
    x: &MonoClip,
    spec: &FilterSpec,
    side: FakedSide,
) -> Result<StereoClip, ForgeryError> {
    let filtered = high_pass_filter(x, spec)?.into_samples();
    let original = x.samples().to_vec();
    let (left, right) = match side {
        FakedSide::Right => (original, filtered),
        FakedSide::Left => (filtered, original),
    };
    Ok(StereoClip::new(left, right, x.sample_rate_hz()).expect("channels share length"))
}

/// The trivial Channel Copy detector: true iff the channels differ nowhere by
/// more than `tolerance`. Use tolerance 0 for PCM-decoded clips; quantization
/// is deterministic and identical on both copied channels.
pub fn is_channel_copy(y: &StereoClip, tolerance: f64) -> bool {
    y.left()
        .iter()
        .zip(y.right())
        .all(|(l, r)| (l - r).abs() <= tolerance)
}
