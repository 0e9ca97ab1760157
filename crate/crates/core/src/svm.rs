//! From-scratch soft-margin linear SVM.
//!
//! The solver works on the standard box-constrained dual
//!
//! ```text
//! min  f(a) = 1/2 a'Qa - sum(a)    s.t.  0 <= a_i <= C,  sum(a_i y_i) = 0
//! ```
//!
//! with `Q_ij = y_i y_j <x_i, x_j>` on standardized features. Each sweep
//! visits indices in a fixed order; a violating index is paired with the
//! maximal violator on the opposite constraint set (ties broken by lowest
//! index) and the pair is updated analytically. Pair updates keep
//! `sum(a_i y_i) = 0` exact, training is deterministic, and convergence is
//! declared when the maximal KKT violation drops to the tolerance.

use crate::features::Label;
use crate::forgery::FakedSide;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvmError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("feature {index} has dimension {got}, expected {expected}")]
    DimensionMismatch { index: usize, got: usize, expected: usize },
    #[error("feature {index} contains a non-finite value")]
    NonFinite { index: usize },
    #[error("label {0} is not +1 or -1")]
    BadLabel(f64),
    #[error("training set does not contain both classes")]
    SingleClass,
    #[error("penalty C must be positive, got {0}")]
    BadPenalty(f64),
    #[error("no convergence after {sweeps} sweeps (max KKT violation {violation})")]
    NoConvergence { sweeps: usize, violation: f64 },
    #[error("input has dimension {got}, model expects {expected}")]
    InputDimension { got: usize, expected: usize },
    #[error("model is inconsistent: {0}")]
    InvalidModel(&'static str),
}

/// Per-component standardization fitted on the training set.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Scaler {
    /// Per-component mean and population standard deviation; components with
    /// std below 1e-12 are replaced by 1 so standardization stays defined.
    pub fn fit(ts: &TrainingSet) -> Scaler {
        let dim = ts.dimension();
        let n = ts.len() as f64;
        let mut mean = vec![0.0; dim];
        for x in &ts.features {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; dim];
        for x in &ts.features {
            for ((s, v), m) in var.iter_mut().zip(x).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        let std = var
            .into_iter()
            .map(|s| {
                let sd = libm::sqrt(s / n);
                if sd < 1e-12 { 1.0 } else { sd }
            })
            .collect();
        Scaler { mean, std }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

/// Labeled feature vectors with labels in {+1 (real), -1 (fake)}.
#[derive(Debug, Clone)]
pub struct TrainingSet {
    features: Vec<Vec<f64>>,
    labels: Vec<f64>,
}

impl TrainingSet {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<f64>) -> Result<Self, SvmError> {
        if features.is_empty() || features.len() != labels.len() {
            return Err(SvmError::EmptyTrainingSet);
        }
        let expected = features[0].len();
        for (index, x) in features.iter().enumerate() {
            if x.len() != expected {
                return Err(SvmError::DimensionMismatch { index, got: x.len(), expected });
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(SvmError::NonFinite { index });
            }
        }
        for &y in &labels {
            if y != 1.0 && y != -1.0 {
                return Err(SvmError::BadLabel(y));
            }
        }
        if !labels.iter().any(|&y| y > 0.0) || !labels.iter().any(|&y| y < 0.0) {
            return Err(SvmError::SingleClass);
        }
        Ok(Self { features, labels })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.features[0].len()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }
}

/// Trained linear decision function plus the scaler it was fitted with.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Scaler,
    pub penalty_c: f64,
    pub corpus_id: String,
    pub faked_side: Option<FakedSide>,
}

impl SvmModel {
    pub fn dimension(&self) -> usize {
        self.weights.len()
    }

    pub fn validate(&self) -> Result<(), SvmError> {
        if self.scaler.mean.len() != self.weights.len()
            || self.scaler.std.len() != self.weights.len()
        {
            return Err(SvmError::InvalidModel("scaler dimension differs from weights"));
        }
        if self.scaler.std.iter().any(|&s| !(s > 0.0)) {
            return Err(SvmError::InvalidModel("scaler std entries must be positive"));
        }
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(SvmError::InvalidModel("non-finite weights or bias"));
        }
        Ok(())
    }

    /// Signed score `<w, standardize(x)> + b` and its label. A score of
    /// exactly 0 maps to real: ambiguity does not accuse.
    pub fn decide(&self, x: &[f64]) -> Result<(f64, Label), SvmError> {
        if x.len() != self.dimension() {
            return Err(SvmError::InputDimension { got: x.len(), expected: self.dimension() });
        }
        let mut score = self.bias;
        for ((v, m), (s, w)) in x
            .iter()
            .zip(&self.scaler.mean)
            .zip(self.scaler.std.iter().zip(&self.weights))
        {
            score += w * (v - m) / s;
        }
        let label = if score < 0.0 { Label::Fake } else { Label::Real };
        Ok((score, label))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TrainOptions {
    pub max_sweeps: usize,
    pub tolerance: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        Self { max_sweeps: 10_000, tolerance: 1e-4 }
    }
}

/// Solver by-products kept out of the model: final dual variables and
/// convergence diagnostics.
#[derive(Debug, Clone)]
pub struct TrainDiagnostics {
    pub alphas: Vec<f64>,
    pub sweeps: usize,
    pub max_violation: f64,
}

pub fn train(ts: &TrainingSet, penalty_c: f64) -> Result<SvmModel, SvmError> {
    train_detailed(ts, penalty_c, &TrainOptions::default()).map(|(model, _)| model)
}

struct DualState<'a> {
    x: &'a [Vec<f64>],
    y: &'a [f64],
    c: f64,
    alpha: Vec<f64>,
    grad: Vec<f64>,
    gram: Option<Vec<f64>>,
    diag: Vec<f64>,
}

// Above this the Gram matrix is computed per-row instead of stored whole.
const GRAM_CACHE_LIMIT: usize = 4096;

impl<'a> DualState<'a> {
    fn new(x: &'a [Vec<f64>], y: &'a [f64], c: f64) -> Self {
        let n = x.len();
        let gram = if n <= GRAM_CACHE_LIMIT {
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let v = dot(&x[i], &x[j]);
                    g[i * n + j] = v;
                    g[j * n + i] = v;
                }
            }
            Some(g)
        } else {
            None
        };
        let diag = (0..n).map(|i| dot(&x[i], &x[i])).collect();
        Self { x, y, c, alpha: vec![0.0; n], grad: vec![-1.0; n], gram, diag }
    }

    fn kernel_row(&self, i: usize, out: &mut Vec<f64>) {
        let n = self.x.len();
        out.clear();
        if let Some(g) = &self.gram {
            out.extend_from_slice(&g[i * n..(i + 1) * n]);
        } else {
            out.extend(self.x.iter().map(|xk| dot(&self.x[i], xk)));
        }
    }

    fn kernel(&self, i: usize, j: usize) -> f64 {
        match &self.gram {
            Some(g) => g[i * self.x.len() + j],
            None => dot(&self.x[i], &self.x[j]),
        }
    }

    fn in_up(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] < self.c) || (self.y[i] < 0.0 && self.alpha[i] > 0.0)
    }

    fn in_low(&self, i: usize) -> bool {
        (self.y[i] > 0.0 && self.alpha[i] > 0.0) || (self.y[i] < 0.0 && self.alpha[i] < self.c)
    }

    /// -y_i * grad_i; ascent feasibility is judged against this value.
    fn violation_value(&self, i: usize) -> f64 {
        -self.y[i] * self.grad[i]
    }

    fn max_up(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.x.len() {
            if self.in_up(i) {
                let v = self.violation_value(i);
                if best.map_or(true, |(_, bv)| v > bv) {
                    best = Some((i, v));
                }
            }
        }
        best
    }

    fn min_low(&self) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..self.x.len() {
            if self.in_low(i) {
                let v = self.violation_value(i);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((i, v));
                }
            }
        }
        best
    }

    /// Analytic update of the pair (up, low); returns the step size taken.
    fn update_pair(&mut self, up: usize, low: usize, row_up: &mut Vec<f64>, row_low: &mut Vec<f64>) -> f64 {
        let gap = self.violation_value(up) - self.violation_value(low);
        let eta = (self.diag[up] + self.diag[low] - 2.0 * self.kernel(up, low)).max(1e-12);
        let mut t = gap / eta;

        // Box limits in the feasible direction.
        let room = |y: f64, a: f64, ascending: bool| -> f64 {
            if (y > 0.0) == ascending { self.c - a } else { a }
        };
        t = t.min(room(self.y[up], self.alpha[up], true));
        t = t.min(room(self.y[low], self.alpha[low], false));
        if t <= 0.0 {
            return 0.0;
        }

        self.alpha[up] += self.y[up] * t;
        self.alpha[low] -= self.y[low] * t;
        self.alpha[up] = snap(self.alpha[up], self.c);
        self.alpha[low] = snap(self.alpha[low], self.c);

        self.kernel_row(up, row_up);
        self.kernel_row(low, row_low);
        for k in 0..self.x.len() {
            self.grad[k] += self.y[k] * t * (row_up[k] - row_low[k]);
        }
        t
    }
}

fn snap(a: f64, c: f64) -> f64 {
    if a < 1e-12 * c {
        0.0
    } else if a > c * (1.0 - 1e-12) {
        c
    } else {
        a
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn train_detailed(
    ts: &TrainingSet,
    penalty_c: f64,
    options: &TrainOptions,
) -> Result<(SvmModel, TrainDiagnostics), SvmError> {
    if !(penalty_c > 0.0) {
        return Err(SvmError::BadPenalty(penalty_c));
    }
    let scaler = Scaler::fit(ts);
    let x: Vec<Vec<f64>> = ts.features().iter().map(|f| scaler.transform(f)).collect();
    let y = ts.labels();
    let n = x.len();

    let mut state = DualState::new(&x, y, penalty_c);
    let mut row_up = Vec::with_capacity(n);
    let mut row_low = Vec::with_capacity(n);
    let mut sweeps = 0;
    let mut violation = f64::INFINITY;
    let mut converged = false;

    while sweeps < options.max_sweeps {
        sweeps += 1;
        for i in 0..n {
            if state.in_up(i) {
                if let Some((j, low_v)) = state.min_low() {
                    if i != j && state.violation_value(i) - low_v > options.tolerance {
                        state.update_pair(i, j, &mut row_up, &mut row_low);
                        continue;
                    }
                }
            }
            if state.in_low(i) {
                if let Some((j, up_v)) = state.max_up() {
                    if i != j && up_v - state.violation_value(i) > options.tolerance {
                        state.update_pair(j, i, &mut row_up, &mut row_low);
                    }
                }
            }
        }
        violation = match (state.max_up(), state.min_low()) {
            (Some((_, m)), Some((_, mm))) => m - mm,
            _ => 0.0,
        };
        if violation <= options.tolerance {
            converged = true;
            break;
        }
    }
    if !converged && violation > options.tolerance {
        return Err(SvmError::NoConvergence { sweeps, violation });
    }

    // Collapse the dual solution into an explicit weight vector.
    let dim = ts.dimension();
    let mut weights = vec![0.0; dim];
    for i in 0..n {
        let coef = state.alpha[i] * y[i];
        if coef != 0.0 {
            for (w, v) in weights.iter_mut().zip(&x[i]) {
                *w += coef * v;
            }
        }
    }

    // Bias from free support vectors, else the midpoint rule.
    let mut b_sum = 0.0;
    let mut b_count = 0usize;
    for i in 0..n {
        if state.alpha[i] > 0.0 && state.alpha[i] < penalty_c {
            b_sum += y[i] - dot(&weights, &x[i]);
            b_count += 1;
        }
    }
    let bias = if b_count > 0 {
        b_sum / b_count as f64
    } else {
        match (state.max_up(), state.min_low()) {
            (Some((_, m)), Some((_, mm))) => (m + mm) / 2.0,
            _ => 0.0,
        }
    };

    let model = SvmModel {
        weights,
        bias,
        scaler,
        penalty_c,
        corpus_id: String::new(),
        faked_side: None,
    };
    let diagnostics = TrainDiagnostics { alphas: state.alpha, sweeps, max_violation: violation };
    Ok((model, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_set() -> TrainingSet {
        TrainingSet::new(vec![vec![-1.0], vec![1.0]], vec![-1.0, 1.0]).unwrap()
    }

    #[test]
    fn training_set_validation() {
        assert_eq!(TrainingSet::new(vec![], vec![]).unwrap_err(), SvmError::EmptyTrainingSet);
        assert_eq!(
            TrainingSet::new(vec![vec![1.0], vec![1.0, 2.0]], vec![1.0, -1.0]).unwrap_err(),
            SvmError::DimensionMismatch { index: 1, got: 2, expected: 1 }
        );
        assert_eq!(
            TrainingSet::new(vec![vec![1.0], vec![2.0]], vec![1.0, 0.5]).unwrap_err(),
            SvmError::BadLabel(0.5)
        );
        assert_eq!(
            TrainingSet::new(vec![vec![1.0], vec![2.0]], vec![1.0, 1.0]).unwrap_err(),
            SvmError::SingleClass
        );
        assert_eq!(
            TrainingSet::new(vec![vec![f64::INFINITY], vec![2.0]], vec![1.0, -1.0]).unwrap_err(),
            SvmError::NonFinite { index: 0 }
        );
    }

    #[test]
    fn scaler_examples() {
        // Two identical vectors: zero variance, std replaced by 1.
        let ts = TrainingSet::new(vec![vec![3.0, 3.0], vec![3.0, 3.0]], vec![1.0, -1.0]).unwrap();
        let sc = Scaler::fit(&ts);
        assert_eq!(sc.std, vec![1.0, 1.0]);
        assert_eq!(sc.mean, vec![3.0, 3.0]);

        // Vectors [0], [2]: mean 1, population std 1.
        let ts = TrainingSet::new(vec![vec![0.0], vec![2.0]], vec![1.0, -1.0]).unwrap();
        let sc = Scaler::fit(&ts);
        assert_eq!(sc.mean, vec![1.0]);
        assert_eq!(sc.std, vec![1.0]);
    }

    #[test]
    fn scaler_matches_two_pass_oracle() {
        // 100 deterministic pseudo-random 5-dim vectors.
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0
        };
        let features: Vec<Vec<f64>> = (0..100).map(|_| (0..5).map(|_| next()).collect()).collect();
        let labels: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ts = TrainingSet::new(features.clone(), labels).unwrap();
        let sc = Scaler::fit(&ts);
        for d in 0..5 {
            let mean = features.iter().map(|f| f[d]).sum::<f64>() / 100.0;
            let var = features.iter().map(|f| (f[d] - mean) * (f[d] - mean)).sum::<f64>() / 100.0;
            assert!((sc.mean[d] - mean).abs() < 1e-12);
            assert!((sc.std[d] - libm::sqrt(var)).abs() < 1e-12);
        }
    }

    #[test]
    fn toy_symmetric_pair() {
        let ts = toy_set();
        let (model, diag) = train_detailed(&ts, 1.0, &TrainOptions::default()).unwrap();
        // Symmetry forces the boundary through 0.
        assert!(model.bias.abs() < 1e-9, "bias = {}", model.bias);
        let (s_pos, l_pos) = model.decide(&[1.0]).unwrap();
        let (s_neg, l_neg) = model.decide(&[-1.0]).unwrap();
        assert!(s_pos > 0.0 && l_pos == Label::Real);
        assert!(s_neg < 0.0 && l_neg == Label::Fake);
        // Dual feasibility.
        let sum: f64 = diag.alphas.iter().zip(ts.labels()).map(|(a, y)| a * y).sum();
        assert!(sum.abs() <= 1e-6);
        assert!(diag.alphas.iter().all(|&a| (0.0..=1.0).contains(&a)));
    }

    #[test]
    fn decide_examples() {
        let model = SvmModel {
            weights: vec![2.0, -1.0],
            bias: 0.25,
            scaler: Scaler { mean: vec![1.0, 2.0], std: vec![1.0, 1.0] },
            penalty_c: 0.4,
            corpus_id: String::new(),
            faked_side: None,
        };
        // x equal to the scaler mean standardizes to zero: score == bias.
        let (score, label) = model.decide(&[1.0, 2.0]).unwrap();
        assert_eq!(score, 0.25);
        assert_eq!(label, Label::Real);

        // Negating weights and bias negates the score and flips the label.
        let mut neg = model.clone();
        neg.weights.iter_mut().for_each(|w| *w = -*w);
        neg.bias = -neg.bias;
        let (s1, l1) = model.decide(&[3.0, 1.0]).unwrap();
        let (s2, l2) = neg.decide(&[3.0, 1.0]).unwrap();
        assert_eq!(s1, -s2);
        assert_ne!(l1, l2);

        // Exactly zero score maps to real.
        let zero = SvmModel {
            weights: vec![0.0],
            bias: 0.0,
            scaler: Scaler { mean: vec![0.0], std: vec![1.0] },
            penalty_c: 0.4,
            corpus_id: String::new(),
            faked_side: None,
        };
        assert_eq!(zero.decide(&[5.0]).unwrap(), (0.0, Label::Real));

        assert!(matches!(
            model.decide(&[1.0]).unwrap_err(),
            SvmError::InputDimension { got: 1, expected: 2 }
        ));
    }

    #[test]
    fn rejects_bad_penalty() {
        assert_eq!(train(&toy_set(), 0.0).unwrap_err(), SvmError::BadPenalty(0.0));
        assert_eq!(train(&toy_set(), -3.0).unwrap_err(), SvmError::BadPenalty(-3.0));
    }

    #[test]
    fn determinism_two_runs_identical() {
        let mut state = 13u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        let features: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let off = if i % 2 == 0 { 1.5 } else { -1.5 };
                (0..4).map(|_| next() + off).collect()
            })
            .collect();
        let labels: Vec<f64> = (0..60).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let ts = TrainingSet::new(features, labels).unwrap();
        let a = train(&ts, 0.4).unwrap();
        let b = train(&ts, 0.4).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
    }
}
