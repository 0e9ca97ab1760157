//! Dual-classifier fake-stereo detector.
//!
//! One SVM is trained against right-channel-faked stereo (the "1st"
//! classifier), the other against left-channel-faked stereo (the "2nd").
//! Verdicts fuse with OR: a clip is real only if both classifiers say real.
//! An optional fast path flags exact channel copies before any SVM runs.

use crate::clip::StereoClip;
use crate::features::{
    extract_clip_feature, ClipFeature, FeatureError, FrameConfig, Label, MelConfig,
};
use crate::forgery::{is_channel_copy, FakedSide};
use crate::svm::{train, SvmError, SvmModel, TrainingSet};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectorError {
    #[error("class {0} has no training features")]
    EmptyClass(&'static str),
    #[error("feature dimension {got} differs from expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

/// Rate-independent feature policy bound to a detector at training time.
/// Frame geometry is stored in milliseconds so clips of different sample
/// rates map into the same 2L-dimensional space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub preemph_coeff: f64,
    pub num_filters: usize,
    pub num_coeffs: usize,
    pub min_hz: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            frame_ms: 25.0,
            hop_ms: 10.0,
            preemph_coeff: 0.95,
            num_filters: 40,
            num_coeffs: 40,
            min_hz: 0.0,
        }
    }
}

impl FeatureConfig {
    pub fn frame_config(&self, sample_rate_hz: u32) -> FrameConfig {
        FrameConfig {
            frame_len: libm::round(self.frame_ms / 1000.0 * sample_rate_hz as f64) as usize,
            hop_len: libm::round(self.hop_ms / 1000.0 * sample_rate_hz as f64) as usize,
            preemph_coeff: self.preemph_coeff,
        }
    }

    pub fn mel_config(&self, sample_rate_hz: u32) -> MelConfig {
        MelConfig {
            num_filters: self.num_filters,
            min_hz: self.min_hz,
            max_hz: sample_rate_hz as f64 / 2.0,
            num_coeffs: self.num_coeffs,
        }
    }

    pub fn feature_dimension(&self) -> usize {
        2 * self.num_coeffs
    }

    pub fn extract(&self, y: &StereoClip) -> Result<ClipFeature, FeatureError> {
        let rate = y.sample_rate_hz();
        extract_clip_feature(y, &self.frame_config(rate), &self.mel_config(rate))
    }
}

/// The ordered classifier pair plus the feature policy they were trained
/// with.
#[derive(Debug, Clone)]
pub struct DetectorModel {
    /// "1st" classifier: real vs right-channel-faked.
    pub svm_right_faked: SvmModel,
    /// "2nd" classifier: real vs left-channel-faked.
    pub svm_left_faked: SvmModel,
    pub features: FeatureConfig,
}

impl DetectorModel {
    pub fn validate(&self) -> Result<(), DetectorError> {
        let expected = self.features.feature_dimension();
        for svm in [&self.svm_right_faked, &self.svm_left_faked] {
            svm.validate()?;
            if svm.dimension() != expected {
                return Err(DetectorError::DimensionMismatch { got: svm.dimension(), expected });
            }
        }
        if self.svm_right_faked.faked_side != Some(FakedSide::Right)
            || self.svm_left_faked.faked_side != Some(FakedSide::Left)
        {
            return Err(SvmError::InvalidModel("faked-side tags do not match their slots").into());
        }
        Ok(())
    }
}

/// Detection outcome. Scores are absent when the channel-copy fast path
/// decided without invoking the SVMs.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub label: Label,
    pub first_label: Option<Label>,
    pub second_label: Option<Label>,
    pub score_first: Option<f64>,
    pub score_second: Option<f64>,
    pub via_channel_copy: bool,
}

/// OR fusion: fake wins if either classifier says fake.
pub fn fuse_labels(first: Label, second: Label) -> Label {
    if first == Label::Fake || second == Label::Fake {
        Label::Fake
    } else {
        Label::Real
    }
}

fn build_class_set(
    real: &[ClipFeature],
    fake: &[ClipFeature],
    expected_dim: usize,
) -> Result<TrainingSet, DetectorError> {
    let mut features = Vec::with_capacity(real.len() + fake.len());
    let mut labels = Vec::with_capacity(real.len() + fake.len());
    for f in real.iter().chain(fake) {
        if f.dimension() != expected_dim {
            return Err(DetectorError::DimensionMismatch {
                got: f.dimension(),
                expected: expected_dim,
            });
        }
        features.push(f.values.clone());
    }
    labels.extend(core::iter::repeat(1.0).take(real.len()));
    labels.extend(core::iter::repeat(-1.0).take(fake.len()));
    Ok(TrainingSet::new(features, labels)?)
}

/// Trains both classifiers: reals labeled +1 against each faked-side
/// population labeled -1.
pub fn train_detector(
    real: &[ClipFeature],
    fake_right_faked: &[ClipFeature],
    fake_left_faked: &[ClipFeature],
    penalty_c: f64,
    features: FeatureConfig,
    corpus_id: &str,
) -> Result<DetectorModel, DetectorError> {
    if real.is_empty() {
        return Err(DetectorError::EmptyClass("real"));
    }
    if fake_right_faked.is_empty() {
        return Err(DetectorError::EmptyClass("fake_right_faked"));
    }
    if fake_left_faked.is_empty() {
        return Err(DetectorError::EmptyClass("fake_left_faked"));
    }
    let dim = features.feature_dimension();

    let mut svm_right_faked = train(&build_class_set(real, fake_right_faked, dim)?, penalty_c)?;
    svm_right_faked.corpus_id = String::from(corpus_id);
    svm_right_faked.faked_side = Some(FakedSide::Right);

    let mut svm_left_faked = train(&build_class_set(real, fake_left_faked, dim)?, penalty_c)?;
    svm_left_faked.corpus_id = String::from(corpus_id);
    svm_left_faked.faked_side = Some(FakedSide::Left);

    Ok(DetectorModel { svm_right_faked, svm_left_faked, features })
}

/// Runs both classifiers on an already-extracted feature vector.
pub fn detect_feature(model: &DetectorModel, feature: &ClipFeature) -> Result<Verdict, DetectorError> {
    let (score_first, first) = model.svm_right_faked.decide(&feature.values)?;
    let (score_second, second) = model.svm_left_faked.decide(&feature.values)?;
    Ok(Verdict {
        label: fuse_labels(first, second),
        first_label: Some(first),
        second_label: Some(second),
        score_first: Some(score_first),
        score_second: Some(score_second),
        via_channel_copy: false,
    })
}

/// Extracts features with the bound configs and fuses both SVM verdicts.
pub fn detect(model: &DetectorModel, y: &StereoClip) -> Result<Verdict, DetectorError> {
    let feature = model.features.extract(y)?;
    detect_feature(model, &feature)
}

/// Channel-copy fast path: an exact copy is fake by definition and never
/// reaches the SVMs (scores stay empty). Everything else falls through to
/// [`detect`].
pub fn detect_with_copy_check(
    model: &DetectorModel,
    y: &StereoClip,
) -> Result<Verdict, DetectorError> {
    if is_channel_copy(y, 0.0) {
        return Ok(Verdict {
            label: Label::Fake,
            first_label: None,
            second_label: None,
            score_first: None,
            score_second: None,
            via_channel_copy: true,
        });
    }
    detect(model, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clip::MonoClip;
    use crate::forgery::fake_stereo_copy;
    use alloc::vec;

    #[test]
    fn fusion_truth_table() {
        assert_eq!(fuse_labels(Label::Real, Label::Real), Label::Real);
        assert_eq!(fuse_labels(Label::Fake, Label::Real), Label::Fake);
        assert_eq!(fuse_labels(Label::Real, Label::Fake), Label::Fake);
        assert_eq!(fuse_labels(Label::Fake, Label::Fake), Label::Fake);
    }

    fn feature(values: Vec<f64>) -> ClipFeature {
        ClipFeature { values, label: None, provenance: String::new() }
    }

    /// Separable toy features in 2 dimensions (the detector does not care
    /// where feature vectors come from).
    fn toy_detector() -> DetectorModel {
        let mut cfg = FeatureConfig::default();
        cfg.num_coeffs = 1; // feature dimension 2
        let real: Vec<ClipFeature> =
            (0..8).map(|i| feature(vec![1.0 + 0.05 * i as f64, 1.0])).collect();
        let fake_right: Vec<ClipFeature> =
            (0..8).map(|i| feature(vec![-1.0 - 0.05 * i as f64, 1.0])).collect();
        let fake_left: Vec<ClipFeature> =
            (0..8).map(|i| feature(vec![1.0, -1.0 - 0.05 * i as f64])).collect();
        train_detector(&real, &fake_right, &fake_left, 0.4, cfg, "toy").unwrap()
    }

    #[test]
    fn trains_separable_toy_features_to_perfection() {
        let model = toy_detector();
        model.validate().unwrap();
        assert_eq!(model.svm_right_faked.penalty_c, 0.4);
        assert_eq!(model.svm_right_faked.corpus_id, "toy");

        for i in 0..8 {
            let real = feature(vec![1.0 + 0.05 * i as f64, 1.0]);
            let v = detect_feature(&model, &real).unwrap();
            assert_eq!(v.label, Label::Real);
            let fr = feature(vec![-1.0 - 0.05 * i as f64, 1.0]);
            assert_eq!(detect_feature(&model, &fr).unwrap().label, Label::Fake);
            let fl = feature(vec![1.0, -1.0 - 0.05 * i as f64]);
            assert_eq!(detect_feature(&model, &fl).unwrap().label, Label::Fake);
        }
    }

    #[test]
    fn empty_class_is_rejected() {
        let cfg = FeatureConfig::default();
        let real = vec![feature(vec![0.0; 80])];
        let err = train_detector(&real, &real, &[], 0.4, cfg, "x").unwrap_err();
        assert_eq!(err, DetectorError::EmptyClass("fake_left_faked"));
    }

    #[test]
    fn copy_fast_path_skips_svms() {
        let model = toy_detector();
        let mono = MonoClip::new(vec![0.1, -0.2, 0.3, 0.05], 44100).unwrap();
        let copy = fake_stereo_copy(&mono);
        let v = detect_with_copy_check(&model, &copy).unwrap();
        assert_eq!(v.label, Label::Fake);
        assert!(v.via_channel_copy);
        assert_eq!(v.score_first, None);
        assert_eq!(v.score_second, None);
    }

    #[test]
    fn short_clip_is_an_error_not_a_verdict() {
        let model = DetectorModel {
            svm_right_faked: SvmModel {
                weights: vec![0.0; 80],
                bias: 0.0,
                scaler: crate::svm::Scaler { mean: vec![0.0; 80], std: vec![1.0; 80] },
                penalty_c: 0.4,
                corpus_id: String::new(),
                faked_side: Some(FakedSide::Right),
            },
            svm_left_faked: SvmModel {
                weights: vec![0.0; 80],
                bias: 0.0,
                scaler: crate::svm::Scaler { mean: vec![0.0; 80], std: vec![1.0; 80] },
                penalty_c: 0.4,
                corpus_id: String::new(),
                faked_side: Some(FakedSide::Left),
            },
            features: FeatureConfig::default(),
        };
        // 100 samples at 44.1 kHz is far below one 25 ms frame.
        let clip = StereoClip::new(vec![0.1; 100], vec![0.2; 100], 44100).unwrap();
        assert!(matches!(
            detect(&model, &clip).unwrap_err(),
            DetectorError::Feature(FeatureError::TooShort { .. })
        ));
    }
}
