//! Confusion-matrix arithmetic for detector evaluation.

use crate::features::Label;
use core::fmt;

/// Which decision path an evaluation row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scope {
    /// 1st classifier alone (real vs right-faked).
    First,
    /// 2nd classifier alone (real vs left-faked).
    Second,
    /// OR fusion of both.
    Fused,
}

impl fmt::Display for Scope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scope::First => f.write_str("first"),
            Scope::Second => f.write_str("second"),
            Scope::Fused => f.write_str("fused"),
        }
    }
}

/// Binary confusion counts for real-vs-fake decisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Confusion {
    pub true_real: u64,
    pub real_as_fake: u64,
    pub true_fake: u64,
    pub fake_as_real: u64,
}

impl Confusion {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Real, Label::Real) => self.true_real += 1,
            (Label::Real, Label::Fake) => self.real_as_fake += 1,
            (Label::Fake, Label::Fake) => self.true_fake += 1,
            (Label::Fake, Label::Real) => self.fake_as_real += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.true_real += other.true_real;
        self.real_as_fake += other.real_as_fake;
        self.true_fake += other.true_fake;
        self.fake_as_real += other.fake_as_real;
    }

    pub fn n_real(&self) -> u64 {
        self.true_real + self.real_as_fake
    }

    pub fn n_fake(&self) -> u64 {
        self.true_fake + self.fake_as_real
    }

    pub fn total(&self) -> u64 {
        self.n_real() + self.n_fake()
    }

    /// Fraction of all clips labeled correctly.
    pub fn acc(&self) -> f64 {
        if self.total() == 0 {
            return 0.0;
        }
        (self.true_real + self.true_fake) as f64 / self.total() as f64
    }

    /// False acceptance rate: the fraction of fake clips accepted as real.
    pub fn far(&self) -> f64 {
        if self.n_fake() == 0 {
            return 0.0;
        }
        self.fake_as_real as f64 / self.n_fake() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_classifier() {
        let mut c = Confusion::default();
        for _ in 0..3 {
            c.record(Label::Real, Label::Real);
        }
        for _ in 0..5 {
            c.record(Label::Fake, Label::Fake);
        }
        assert_eq!(c.acc(), 1.0);
        assert_eq!(c.far(), 0.0);
    }

    #[test]
    fn degenerate_always_real_classifier() {
        let mut c = Confusion::default();
        for _ in 0..4 {
            c.record(Label::Real, Label::Real);
        }
        for _ in 0..6 {
            c.record(Label::Fake, Label::Real);
        }
        assert_eq!(c.acc(), 4.0 / 10.0);
        assert_eq!(c.far(), 1.0);
    }

    #[test]
    fn counts_match_brute_force_tally() {
        // 50 deterministic pseudo-random (truth, prediction) pairs against an
        // independent tally.
        let mut state = 5u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state >> 60
        };
        let pairs: alloc::vec::Vec<(Label, Label)> = (0..50)
            .map(|_| {
                let t = if next() % 2 == 0 { Label::Real } else { Label::Fake };
                let p = if next() % 3 == 0 { Label::Fake } else { Label::Real };
                (t, p)
            })
            .collect();
        let mut c = Confusion::default();
        let mut correct = 0u64;
        let mut fake_total = 0u64;
        let mut fake_accepted = 0u64;
        for &(t, p) in &pairs {
            c.record(t, p);
            if t == p {
                correct += 1;
            }
            if t == Label::Fake {
                fake_total += 1;
                if p == Label::Real {
                    fake_accepted += 1;
                }
            }
        }
        assert_eq!(c.total(), 50);
        assert_eq!(c.acc(), correct as f64 / 50.0);
        assert_eq!(c.far(), fake_accepted as f64 / fake_total as f64);
        // Arithmetic closure: acc*total + far*n_fake + reals-called-fake = total.
        let closure = c.acc() * c.total() as f64
            + c.far() * c.n_fake() as f64
            + c.real_as_fake as f64;
        assert!((closure - c.total() as f64).abs() < 1e-9);
    }

    #[test]
    fn merge_is_plain_addition() {
        let a = Confusion { true_real: 1, real_as_fake: 2, true_fake: 3, fake_as_real: 4 };
        let mut b = Confusion { true_real: 10, real_as_fake: 0, true_fake: 5, fake_as_real: 1 };
        b.merge(&a);
        assert_eq!(b, Confusion { true_real: 11, real_as_fake: 2, true_fake: 8, fake_as_real: 5 });
    }
}
