//! Core algorithms for synthesizing and detecting fake stereo audio.
//!
//! Fake stereo is mono audio dressed up as two channels, either by copying
//! the mono channel verbatim or by pairing it with a high-pass-filtered copy
//! of itself (the Haas-effect trick). This crate holds everything that does
//! not touch a file: clip types, the forgery filter, the MFCC feature
//! pipeline, a from-scratch soft-margin linear SVM, the dual-classifier
//! detector with OR fusion, and the confusion-matrix arithmetic used for
//! evaluation.
//!
//! The crate is `no_std` (with `alloc`); WAV files, manifests, model files
//! and the command-line front end live in the companion `fakestereo` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod clip;
pub mod detector;
pub mod eval;
pub mod features;
pub mod fft;
pub mod forgery;
pub mod svm;

pub use clip::{Clip, ClipError, MonoClip, MonoPolicy, StereoClip};
pub use detector::{DetectorError, DetectorModel, FeatureConfig, Verdict};
pub use features::{ClipFeature, FrameConfig, Label, MelConfig};
pub use forgery::{FakedSide, FilterSpec, ForgeryError};
pub use svm::{Scaler, SvmError, SvmModel, TrainingSet};

/// Failed textual parse of one of the small closed enums.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseEnumError {
    pub what: &'static str,
    pub expected: &'static str,
}

impl core::fmt::Display for ParseEnumError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "invalid {}: expected one of {}", self.what, self.expected)
    }
}

impl core::error::Error for ParseEnumError {}
