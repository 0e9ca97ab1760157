//! Evaluation runs: intra-corpus and train-by-test grids.
//!
//! Features are extracted once per test entry and reused across every
//! scope/cutoff row. Per-classifier scopes are scored against their matching
//! faked-side population (reals vs right-faked for the 1st classifier, reals
//! vs left-faked for the 2nd); the fused scope sees every fake.

use crate::manifest::{CorpusManifest, ForgeryMethod, ManifestError, Split};
use crate::report::EvalRow;
use crate::wav::{read_wav, WavError};
use fakestereo_core::clip::Clip;
use fakestereo_core::detector::{detect_feature, DetectorError, DetectorModel, FeatureConfig};
use fakestereo_core::eval::{Confusion, Scope};
use fakestereo_core::features::{ClipFeature, FeatureError, Label};
use fakestereo_core::forgery::{is_channel_copy, FakedSide};
use fakestereo_core::svm::SvmError;
use std::collections::BTreeMap;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Wav(#[from] WavError),
    #[error(transparent)]
    Manifest(#[from] ManifestError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error("{}: manifest entry is not a stereo clip", .0.display())]
    NotStereo(PathBuf),
    #[error("no test clips match scope {scope} cutoff {cutoff:?}")]
    EmptyTestSet { scope: Scope, cutoff: Option<f64> },
}

/// One test-split clip with its cached feature vector.
pub struct SplitItem {
    pub label: Label,
    pub method: Option<ForgeryMethod>,
    pub faked_side: Option<FakedSide>,
    pub cutoff_hz: Option<f64>,
    pub channel_copy: bool,
    pub feature: ClipFeature,
}

/// Reads and featurizes every clip of one split, in manifest order.
pub fn extract_split_features(
    manifest: &CorpusManifest,
    split: Split,
    config: &FeatureConfig,
) -> Result<Vec<SplitItem>, EvalError> {
    let mut items = Vec::new();
    for entry in manifest.entries_in(split) {
        let path = manifest.resolve(entry);
        let stereo = match read_wav(&path)? {
            Clip::Stereo(s) => s,
            Clip::Mono(_) => return Err(EvalError::NotStereo(path)),
        };
        items.push(SplitItem {
            label: entry.label,
            method: entry.method,
            faked_side: entry.faked_side,
            cutoff_hz: entry.cutoff_hz,
            channel_copy: is_channel_copy(&stereo, 0.0),
            feature: config.extract(&stereo)?,
        });
    }
    Ok(items)
}

fn item_in_scope(item: &SplitItem, scope: Scope, cutoff: Option<f64>) -> bool {
    if item.label == Label::Real {
        return true;
    }
    let side_ok = match scope {
        Scope::Fused => true,
        Scope::First => item.faked_side == Some(FakedSide::Right),
        Scope::Second => item.faked_side == Some(FakedSide::Left),
    };
    let cutoff_ok = match cutoff {
        None => true,
        Some(c) => item.cutoff_hz == Some(c),
    };
    side_ok && cutoff_ok
}

/// Tallies one confusion matrix over the selected items.
pub fn evaluate_items(
    model: &DetectorModel,
    items: &[SplitItem],
    scope: Scope,
    cutoff: Option<f64>,
    copy_check: bool,
) -> Result<Confusion, EvalError> {
    let mut confusion = Confusion::default();
    let mut any = false;
    for item in items.iter().filter(|i| item_in_scope(i, scope, cutoff)) {
        any = true;
        let predicted = match scope {
            Scope::Fused => {
                if copy_check && item.channel_copy {
                    Label::Fake
                } else {
                    detect_feature(model, &item.feature)?.label
                }
            }
            Scope::First => model.svm_right_faked.decide(&item.feature.values)?.1,
            Scope::Second => model.svm_left_faked.decide(&item.feature.values)?.1,
        };
        confusion.record(item.label, predicted);
    }
    if !any {
        return Err(EvalError::EmptyTestSet { scope, cutoff });
    }
    Ok(confusion)
}

fn row(
    model: &DetectorModel,
    manifest: &CorpusManifest,
    confusion: &Confusion,
    scope: Scope,
    cutoff: Option<f64>,
) -> EvalRow {
    EvalRow {
        train_corpus: model.svm_right_faked.corpus_id.clone(),
        test_corpus: manifest.corpus_id.clone(),
        cutoff_hz: cutoff,
        scope,
        acc: confusion.acc(),
        far: confusion.far(),
        n_real: confusion.n_real(),
        n_fake: confusion.n_fake(),
    }
}

/// One evaluation cell: a single (scope, cutoff filter) row over the test
/// split.
pub fn evaluate(
    model: &DetectorModel,
    manifest: &CorpusManifest,
    scope: Scope,
    cutoff: Option<f64>,
    copy_check: bool,
) -> Result<EvalRow, EvalError> {
    let items = extract_split_features(manifest, Split::Test, &model.features)?;
    let confusion = evaluate_items(model, &items, scope, cutoff, copy_check)?;
    Ok(row(model, manifest, &confusion, scope, cutoff))
}

fn haas_cutoffs(items: &[SplitItem]) -> Vec<f64> {
    let mut cutoffs: Vec<f64> = Vec::new();
    for item in items {
        if let (Some(ForgeryMethod::Haas), Some(c)) = (item.method, item.cutoff_hz) {
            if !cutoffs.iter().any(|&x| x == c) {
                cutoffs.push(c);
            }
        }
    }
    cutoffs.sort_by(f64::total_cmp);
    cutoffs
}

/// All rows for one model against one manifest: per scope a pooled row, plus
/// one row per Haas cutoff when `per_cutoff` is set.
pub fn evaluate_rows(
    model: &DetectorModel,
    manifest: &CorpusManifest,
    per_cutoff: bool,
    copy_check: bool,
) -> Result<Vec<EvalRow>, EvalError> {
    let items = extract_split_features(manifest, Split::Test, &model.features)?;
    evaluate_rows_cached(model, manifest, &items, per_cutoff, copy_check)
}

fn evaluate_rows_cached(
    model: &DetectorModel,
    manifest: &CorpusManifest,
    items: &[SplitItem],
    per_cutoff: bool,
    copy_check: bool,
) -> Result<Vec<EvalRow>, EvalError> {
    let mut rows = Vec::new();
    for scope in [Scope::First, Scope::Second, Scope::Fused] {
        let pooled = evaluate_items(model, items, scope, None, copy_check)?;
        rows.push(row(model, manifest, &pooled, scope, None));
        if per_cutoff {
            for cutoff in haas_cutoffs(items) {
                let confusion = evaluate_items(model, items, scope, Some(cutoff), copy_check)?;
                rows.push(row(model, manifest, &confusion, scope, Some(cutoff)));
            }
        }
    }
    Ok(rows)
}

/// The full train-by-test grid. Corpus ids key both maps; features are
/// extracted once per test corpus and shared by every model with the same
/// feature config.
pub fn cross_evaluate(
    models: &BTreeMap<String, DetectorModel>,
    manifests: &BTreeMap<String, CorpusManifest>,
    per_cutoff: bool,
    copy_check: bool,
) -> Result<Vec<EvalRow>, EvalError> {
    let mut rows = Vec::new();
    for manifest in manifests.values() {
        let mut cache: Option<(FeatureConfig, Vec<SplitItem>)> = None;
        for model in models.values() {
            let refresh = match &cache {
                Some((config, _)) => *config != model.features,
                None => true,
            };
            if refresh {
                let items = extract_split_features(manifest, Split::Test, &model.features)?;
                cache = Some((model.features, items));
            }
            let (_, items) = cache.as_ref().expect("cache was just filled");
            rows.extend(evaluate_rows_cached(model, manifest, items, per_cutoff, copy_check)?);
        }
    }
    crate::report::sort_rows(&mut rows);
    Ok(rows)
}
