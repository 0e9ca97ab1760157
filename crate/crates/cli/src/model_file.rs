//! Text persistence for SVM and detector models.
//!
//! Flat `key value` lines, one field per line, floats at 17 significant
//! digits so parsing is bit-exact and save -> load -> save is byte-identical.
//! A detector document embeds its two SVM documents between
//! `begin <slot>` / `end <slot>` markers.

use fakestereo_core::detector::{DetectorModel, FeatureConfig};
use fakestereo_core::svm::{Scaler, SvmError, SvmModel};
use fakestereo_core::FakedSide;
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported schema version {found}, this build reads version {SCHEMA_VERSION}")]
    SchemaVersion { found: String },
    #[error("expected a {expected} document, found kind {found:?}")]
    WrongKind { expected: &'static str, found: String },
    #[error("inconsistent model: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Svm(#[from] SvmError),
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_vec(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_f64(v)).collect::<Vec<_>>().join(" ")
}

fn svm_document(model: &SvmModel, out: &mut String) {
    let side = match model.faked_side {
        Some(FakedSide::Right) => "right",
        Some(FakedSide::Left) => "left",
        None => "none",
    };
    let _ = writeln!(out, "schema_version {SCHEMA_VERSION}");
    let _ = writeln!(out, "kind svm");
    let _ = writeln!(out, "corpus_id {}", model.corpus_id);
    let _ = writeln!(out, "faked_side {side}");
    let _ = writeln!(out, "penalty_c {}", fmt_f64(model.penalty_c));
    let _ = writeln!(out, "dimension {}", model.dimension());
    let _ = writeln!(out, "bias {}", fmt_f64(model.bias));
    let _ = writeln!(out, "weights {}", fmt_vec(&model.weights));
    let _ = writeln!(out, "scaler_mean {}", fmt_vec(&model.scaler.mean));
    let _ = writeln!(out, "scaler_std {}", fmt_vec(&model.scaler.std));
}

pub fn svm_to_string(model: &SvmModel) -> String {
    let mut out = String::new();
    svm_document(model, &mut out);
    out
}

pub fn detector_to_string(model: &DetectorModel) -> String {
    let mut out = String::new();
    let f = &model.features;
    let _ = writeln!(out, "schema_version {SCHEMA_VERSION}");
    let _ = writeln!(out, "kind detector");
    let _ = writeln!(out, "frame_ms {}", fmt_f64(f.frame_ms));
    let _ = writeln!(out, "hop_ms {}", fmt_f64(f.hop_ms));
    let _ = writeln!(out, "preemph_coeff {}", fmt_f64(f.preemph_coeff));
    let _ = writeln!(out, "num_filters {}", f.num_filters);
    let _ = writeln!(out, "num_coeffs {}", f.num_coeffs);
    let _ = writeln!(out, "min_hz {}", fmt_f64(f.min_hz));
    let _ = writeln!(out, "begin svm_right_faked");
    svm_document(&model.svm_right_faked, &mut out);
    let _ = writeln!(out, "end svm_right_faked");
    let _ = writeln!(out, "begin svm_left_faked");
    svm_document(&model.svm_left_faked, &mut out);
    let _ = writeln!(out, "end svm_left_faked");
    out
}

pub fn save_svm(model: &SvmModel, path: &Path) -> Result<(), ModelFileError> {
    fs::write(path, svm_to_string(model))
        .map_err(|e| ModelFileError::Io { path: path.display().to_string(), source: e })
}

pub fn save_detector(model: &DetectorModel, path: &Path) -> Result<(), ModelFileError> {
    fs::write(path, detector_to_string(model))
        .map_err(|e| ModelFileError::Io { path: path.display().to_string(), source: e })
}

/// Sequential `key value` line reader with position-aware errors.
struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    at: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| !l.is_empty())
            .collect();
        Self { lines, at: 0 }
    }

    fn next_kv(&mut self) -> Result<(usize, &'a str, &'a str), ModelFileError> {
        let Some(&(line, raw)) = self.lines.get(self.at) else {
            return Err(ModelFileError::Parse {
                line: self.lines.last().map(|(l, _)| *l).unwrap_or(0),
                message: "unexpected end of document".into(),
            });
        };
        self.at += 1;
        let (key, value) = raw.split_once(' ').unwrap_or((raw, ""));
        Ok((line, key, value))
    }

    fn expect(&mut self, key: &str) -> Result<(usize, &'a str), ModelFileError> {
        let (line, k, v) = self.next_kv()?;
        if k != key {
            return Err(ModelFileError::Parse {
                line,
                message: format!("expected field {key:?}, found {k:?}"),
            });
        }
        Ok((line, v))
    }

    fn done(&self) -> bool {
        self.at >= self.lines.len()
    }
}

fn parse_f64(line: usize, value: &str) -> Result<f64, ModelFileError> {
    value
        .parse()
        .map_err(|_| ModelFileError::Parse { line, message: format!("bad float {value:?}") })
}

fn parse_vec(line: usize, value: &str) -> Result<Vec<f64>, ModelFileError> {
    value.split(' ').filter(|s| !s.is_empty()).map(|s| parse_f64(line, s)).collect()
}

fn expect_schema_and_kind(lines: &mut Lines, expected: &'static str) -> Result<(), ModelFileError> {
    let (_, version) = lines.expect("schema_version")?;
    if version != SCHEMA_VERSION.to_string() {
        return Err(ModelFileError::SchemaVersion { found: version.to_string() });
    }
    let (_, kind) = lines.expect("kind")?;
    if kind != expected {
        return Err(ModelFileError::WrongKind { expected, found: kind.to_string() });
    }
    Ok(())
}

fn svm_body(lines: &mut Lines) -> Result<SvmModel, ModelFileError> {
    let (_, corpus_id) = lines.expect("corpus_id")?;
    let (side_line, side) = lines.expect("faked_side")?;
    let faked_side = match side {
        "right" => Some(FakedSide::Right),
        "left" => Some(FakedSide::Left),
        "none" => None,
        other => {
            return Err(ModelFileError::Parse {
                line: side_line,
                message: format!("bad faked_side {other:?}"),
            });
        }
    };
    let (line, v) = lines.expect("penalty_c")?;
    let penalty_c = parse_f64(line, v)?;
    let (dim_line, v) = lines.expect("dimension")?;
    let dimension: usize = v.parse().map_err(|_| ModelFileError::Parse {
        line: dim_line,
        message: format!("bad dimension {v:?}"),
    })?;
    let (line, v) = lines.expect("bias")?;
    let bias = parse_f64(line, v)?;
    let (line, v) = lines.expect("weights")?;
    let weights = parse_vec(line, v)?;
    let (line, v) = lines.expect("scaler_mean")?;
    let mean = parse_vec(line, v)?;
    let (line, v) = lines.expect("scaler_std")?;
    let std = parse_vec(line, v)?;

    if weights.len() != dimension || mean.len() != dimension || std.len() != dimension {
        return Err(ModelFileError::Inconsistent(format!(
            "declared dimension {dimension} but found {} weights, {} means, {} stds",
            weights.len(),
            mean.len(),
            std.len()
        )));
    }
    let model = SvmModel {
        weights,
        bias,
        scaler: Scaler { mean, std },
        penalty_c,
        corpus_id: corpus_id.to_string(),
        faked_side,
    };
    model.validate()?;
    Ok(model)
}

pub fn svm_from_str(text: &str) -> Result<SvmModel, ModelFileError> {
    let mut lines = Lines::new(text);
    expect_schema_and_kind(&mut lines, "svm")?;
    svm_body(&mut lines)
}

pub fn load_svm(path: &Path) -> Result<SvmModel, ModelFileError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ModelFileError::Io { path: path.display().to_string(), source: e })?;
    svm_from_str(&text)
}

fn embedded_svm(lines: &mut Lines, slot: &str) -> Result<SvmModel, ModelFileError> {
    let (line, marker) = lines.expect("begin")?;
    if marker != slot {
        return Err(ModelFileError::Parse {
            line,
            message: format!("expected begin {slot}, found begin {marker}"),
        });
    }
    expect_schema_and_kind(lines, "svm")?;
    let model = svm_body(lines)?;
    let (line, marker) = lines.expect("end")?;
    if marker != slot {
        return Err(ModelFileError::Parse {
            line,
            message: format!("expected end {slot}, found end {marker}"),
        });
    }
    Ok(model)
}

pub fn detector_from_str(text: &str) -> Result<DetectorModel, ModelFileError> {
    let mut lines = Lines::new(text);
    expect_schema_and_kind(&mut lines, "detector")?;
    let (line, v) = lines.expect("frame_ms")?;
    let frame_ms = parse_f64(line, v)?;
    let (line, v) = lines.expect("hop_ms")?;
    let hop_ms = parse_f64(line, v)?;
    let (line, v) = lines.expect("preemph_coeff")?;
    let preemph_coeff = parse_f64(line, v)?;
    let (line, v) = lines.expect("num_filters")?;
    let num_filters = v.parse().map_err(|_| ModelFileError::Parse {
        line,
        message: format!("bad num_filters {v:?}"),
    })?;
    let (line, v) = lines.expect("num_coeffs")?;
    let num_coeffs = v.parse().map_err(|_| ModelFileError::Parse {
        line,
        message: format!("bad num_coeffs {v:?}"),
    })?;
    let (line, v) = lines.expect("min_hz")?;
    let min_hz = parse_f64(line, v)?;

    let svm_right_faked = embedded_svm(&mut lines, "svm_right_faked")?;
    let svm_left_faked = embedded_svm(&mut lines, "svm_left_faked")?;
    if !lines.done() {
        let (line, k, _) = lines.next_kv()?;
        return Err(ModelFileError::Parse {
            line,
            message: format!("unexpected trailing field {k:?}"),
        });
    }

    let model = DetectorModel {
        svm_right_faked,
        svm_left_faked,
        features: FeatureConfig { frame_ms, hop_ms, preemph_coeff, num_filters, num_coeffs, min_hz },
    };
    model
        .validate()
        .map_err(|e| ModelFileError::Inconsistent(e.to_string()))?;
    Ok(model)
}

pub fn load_detector(path: &Path) -> Result<DetectorModel, ModelFileError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ModelFileError::Io { path: path.display().to_string(), source: e })?;
    detector_from_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_svm(side: Option<FakedSide>) -> SvmModel {
        SvmModel {
            weights: vec![0.25, -1.5, 3.0e-7],
            bias: -0.125,
            scaler: Scaler { mean: vec![0.1, 0.2, 0.3], std: vec![1.0, 2.0, 0.5] },
            penalty_c: 0.4,
            corpus_id: "demo".into(),
            faked_side: side,
        }
    }

    #[test]
    fn svm_round_trip_is_byte_identical() {
        let model = sample_svm(Some(FakedSide::Right));
        let text = svm_to_string(&model);
        let parsed = svm_from_str(&text).unwrap();
        assert_eq!(parsed, model);
        assert_eq!(svm_to_string(&parsed), text);
    }

    #[test]
    fn scores_survive_persistence_exactly() {
        let model = sample_svm(None);
        let parsed = svm_from_str(&svm_to_string(&model)).unwrap();
        let x = [0.7, -0.3, 12.5];
        let (a, _) = model.decide(&x).unwrap();
        let (b, _) = parsed.decide(&x).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn tampered_dimension_is_rejected() {
        let text = svm_to_string(&sample_svm(None)).replace("dimension 3", "dimension 4");
        assert!(matches!(svm_from_str(&text), Err(ModelFileError::Inconsistent(_))));
    }

    #[test]
    fn version_and_kind_mismatches_are_rejected() {
        let text = svm_to_string(&sample_svm(None)).replace("schema_version 1", "schema_version 9");
        assert!(matches!(svm_from_str(&text), Err(ModelFileError::SchemaVersion { .. })));

        let detector_text = "schema_version 1\nkind detector\n";
        assert!(matches!(
            svm_from_str(detector_text),
            Err(ModelFileError::WrongKind { expected: "svm", .. })
        ));
    }

    #[test]
    fn detector_round_trip_is_byte_identical() {
        let model = DetectorModel {
            svm_right_faked: SvmModel {
                faked_side: Some(FakedSide::Right),
                ..sample_svm(None)
            },
            svm_left_faked: SvmModel { faked_side: Some(FakedSide::Left), ..sample_svm(None) },
            features: fakestereo_core::detector::FeatureConfig {
                num_coeffs: 1,
                num_filters: 40,
                ..Default::default()
            },
        };
        // Feature dimension must match the embedded SVMs (2 * num_coeffs).
        assert_eq!(model.features.feature_dimension(), 2);
        // sample_svm has dimension 3, so validation must fail first.
        assert!(matches!(
            detector_from_str(&detector_to_string(&model)),
            Err(ModelFileError::Inconsistent(_))
        ));

        // Fix the config so it validates, then round-trip.
        let mut ok = model;
        ok.features.num_coeffs = 40;
        let mut right = sample_svm(Some(FakedSide::Right));
        right.weights = vec![0.5; 80];
        right.scaler = Scaler { mean: vec![0.0; 80], std: vec![1.0; 80] };
        ok.svm_right_faked = right.clone();
        ok.svm_left_faked = SvmModel { faked_side: Some(FakedSide::Left), ..right };
        let text = detector_to_string(&ok);
        let parsed = detector_from_str(&text).unwrap();
        assert_eq!(detector_to_string(&parsed), text);
    }
}
