//! Solver soundness on separable data plus decision-function properties.

use fakestereo_core::features::Label;
use fakestereo_core::svm::{train_detailed, Scaler, SvmModel, TrainOptions, TrainingSet};
use proptest::prelude::*;

fn lcg(state: &mut u64) -> f64 {
    *state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*state >> 11) as f64 / (1u64 << 53) as f64
}

/// 200 points in two disc-shaped blobs around (2,2) and (-2,-2), radius <= 1,
/// so the class hulls are separated by well over the unit margin.
fn blobs(seed: u64) -> TrainingSet {
    let mut state = seed;
    let mut features = Vec::with_capacity(200);
    let mut labels = Vec::with_capacity(200);
    for i in 0..200 {
        let positive = i % 2 == 0;
        let center = if positive { 2.0 } else { -2.0 };
        // Rejection-free: polar sample within radius 1.
        let r = lcg(&mut state).sqrt();
        let theta = lcg(&mut state) * std::f64::consts::TAU;
        features.push(vec![center + r * theta.cos(), center + r * theta.sin()]);
        labels.push(if positive { 1.0 } else { -1.0 });
    }
    TrainingSet::new(features, labels).unwrap()
}

#[test]
fn separable_blobs_c04_perfect_training_accuracy_and_kkt() {
    let ts = blobs(0xB10B5);
    let (model, diag) = train_detailed(&ts, 0.4, &TrainOptions::default()).unwrap();

    // 100% training accuracy, verified exhaustively.
    for (x, &y) in ts.features().iter().zip(ts.labels()) {
        let (_, label) = model.decide(x).unwrap();
        let want = if y > 0.0 { Label::Real } else { Label::Fake };
        assert_eq!(label, want, "point {x:?} misclassified");
    }

    // Dual feasibility: sum(alpha_i y_i) = 0, 0 <= alpha_i <= C.
    let sum: f64 = diag.alphas.iter().zip(ts.labels()).map(|(a, y)| a * y).sum();
    assert!(sum.abs() <= 1e-6, "sum alpha*y = {sum}");
    assert!(diag.alphas.iter().all(|&a| (0.0..=0.4).contains(&a)));

    // KKT complementarity at 1e-3 on every training point.
    let scaled: Vec<Vec<f64>> = ts.features().iter().map(|f| model.scaler.transform(f)).collect();
    for ((x, &y), &alpha) in scaled.iter().zip(ts.labels()).zip(&diag.alphas) {
        let margin = y * (dot(&model.weights, x) + model.bias);
        if alpha <= 0.0 {
            assert!(margin >= 1.0 - 1e-3, "alpha=0 margin {margin}");
        } else if alpha >= 0.4 {
            assert!(margin <= 1.0 + 1e-3, "alpha=C margin {margin}");
        } else {
            assert!((margin - 1.0).abs() <= 1e-3, "free margin {margin}");
        }
    }
}

#[test]
fn overlapping_classes_still_converge_within_the_box() {
    // Heavily overlapping blobs: the solver must still satisfy the dual
    // constraints even when training accuracy cannot be perfect.
    let mut state = 77u64;
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..120 {
        let positive = i % 2 == 0;
        let center = if positive { 0.25 } else { -0.25 };
        features.push(vec![center + lcg(&mut state) * 2.0 - 1.0, lcg(&mut state) * 2.0 - 1.0]);
        labels.push(if positive { 1.0 } else { -1.0 });
    }
    let ts = TrainingSet::new(features, labels).unwrap();
    let (_, diag) = train_detailed(&ts, 0.4, &TrainOptions::default()).unwrap();
    let sum: f64 = diag.alphas.iter().zip(ts.labels()).map(|(a, y)| a * y).sum();
    assert!(sum.abs() <= 1e-6);
    assert!(diag.max_violation <= 1e-4);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// decide() labels are invariant under positive rescaling of (w, b).
    #[test]
    fn label_invariant_under_positive_rescaling(
        weights in proptest::collection::vec(-3.0f64..3.0, 4),
        bias in -2.0f64..2.0,
        scale in 1e-3f64..1e3,
        x in proptest::collection::vec(-5.0f64..5.0, 4),
    ) {
        let base = SvmModel {
            weights: weights.clone(),
            bias,
            scaler: Scaler { mean: vec![0.0; 4], std: vec![1.0; 4] },
            penalty_c: 0.4,
            corpus_id: String::new(),
            faked_side: None,
        };
        let scaled = SvmModel {
            weights: weights.iter().map(|w| w * scale).collect(),
            bias: bias * scale,
            ..base.clone()
        };
        let (s1, l1) = base.decide(&x).unwrap();
        let (s2, l2) = scaled.decide(&x).unwrap();
        // Sign agreement, not score agreement.
        prop_assert_eq!(l1, l2);
        prop_assert!(s1.signum() == s2.signum() || s1 == 0.0 || s2 == 0.0);
    }
}
