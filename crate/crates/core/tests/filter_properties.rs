//! Property tests for the one-pole high-pass forgery filter.

use fakestereo_core::clip::MonoClip;
use fakestereo_core::forgery::{fake_stereo_haas, high_pass_filter, FakedSide, FilterSpec};
use proptest::prelude::*;
use std::f64::consts::TAU;

fn filter_vec(samples: &[f64], spec: &FilterSpec, rate: u32) -> Vec<f64> {
    let clip = MonoClip::new(samples.to_vec(), rate).unwrap();
    high_pass_filter(&clip, spec).unwrap().into_samples()
}

proptest! {
    /// filter(a*x + b*z) == a*filter(x) + b*filter(z) pointwise.
    #[test]
    fn linearity(
        x in proptest::collection::vec(-1.0f64..1.0, 1..200),
        z_seed in proptest::collection::vec(-1.0f64..1.0, 1..200),
        a in -2.0f64..2.0,
        b in -2.0f64..2.0,
    ) {
        let n = x.len().min(z_seed.len());
        let x = &x[..n];
        let z = &z_seed[..n];
        let spec = FilterSpec::new(200.0, 44100).unwrap();
        let combined: Vec<f64> = x.iter().zip(z).map(|(xv, zv)| a * xv + b * zv).collect();

        let lhs = filter_vec(&combined, &spec, 44100);
        let fx = filter_vec(x, &spec, 44100);
        let fz = filter_vec(z, &spec, 44100);
        for i in 0..n {
            let rhs = a * fx[i] + b * fz[i];
            prop_assert!((lhs[i] - rhs).abs() <= 1e-9 * (1.0 + lhs[i].abs()));
        }
    }

    /// The original channel of a Haas fake is the source, bit for bit.
    #[test]
    fn haas_preserves_original_channel_bit_exactly(
        x in proptest::collection::vec(-1.0f64..1.0, 1..500),
        right_faked in any::<bool>(),
        cutoff in 50.0f64..2000.0,
    ) {
        let clip = MonoClip::new(x.clone(), 44100).unwrap();
        let spec = FilterSpec::new(cutoff, 44100).unwrap();
        let side = if right_faked { FakedSide::Right } else { FakedSide::Left };
        let fake = fake_stereo_haas(&clip, &spec, side).unwrap();
        let original = if right_faked { fake.left() } else { fake.right() };
        prop_assert!(original.iter().zip(&x).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    /// 0 < alpha < 1 for every admissible cutoff/rate combination.
    #[test]
    fn alpha_stays_in_unit_interval(cutoff in 1.0f64..22049.0) {
        let spec = FilterSpec::new(cutoff, 44100).unwrap();
        prop_assert!(spec.alpha() > 0.0 && spec.alpha() < 1.0);
    }
}

/// Frequency-response oracle: FFT of a truncated impulse response, checked
/// against the requirements for a one-pole high-pass (zero DC gain, the -3 dB
/// point near the cutoff, monotone magnitude).
#[test]
fn impulse_response_spectrum() {
    let rate = 44100u32;
    let cutoff = 200.0;
    let n = 8192usize;
    let spec = FilterSpec::new(cutoff, rate).unwrap();
    let mut impulse = vec![0.0; n];
    impulse[0] = 1.0;
    let h = filter_vec(&impulse, &spec, rate);

    // Independent DFT magnitudes (incremental rotation instead of the
    // implementation's FFT).
    let magnitude = |k: usize| -> f64 {
        let step = -TAU * k as f64 / n as f64;
        let (wr, wi) = (step.cos(), step.sin());
        let (mut cr, mut ci) = (1.0, 0.0);
        let mut re = 0.0;
        let mut im = 0.0;
        for &v in &h {
            re += v * cr;
            im += v * ci;
            let next_r = cr * wr - ci * wi;
            ci = cr * wi + ci * wr;
            cr = next_r;
        }
        (re * re + im * im).sqrt()
    };

    assert!(magnitude(0) < 1e-3, "|H(DC)| = {}", magnitude(0));

    let cutoff_bin = (cutoff / rate as f64 * n as f64).round() as usize;
    let at_cutoff = magnitude(cutoff_bin);
    assert!(
        (0.65..=0.76).contains(&at_cutoff),
        "|H(cutoff)| = {at_cutoff}, expected near 1/sqrt(2)"
    );

    // Monotone non-decreasing magnitude over [0, Nyquist/2].
    let mut prev = magnitude(0);
    for k in 1..=n / 4 {
        let cur = magnitude(k);
        assert!(cur >= prev - 1e-12, "magnitude dips at bin {k}: {cur} < {prev}");
        prev = cur;
    }
}
