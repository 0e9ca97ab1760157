//! File formats, corpus tooling and evaluation harness around
//! [`fakestereo_core`].
//!
//! Everything here touches the filesystem: WAV I/O, corpus manifests, model
//! persistence, synthetic source generation, evaluation runs and report
//! rendering. The `fakestereo` binary is a thin front end over these
//! modules.

pub mod corpus;
pub mod evalrun;
pub mod manifest;
pub mod model_file;
pub mod report;
pub mod stats;
pub mod synth;
pub mod wav;

pub use fakestereo_core as core;
