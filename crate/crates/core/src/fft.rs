//! Minimal power-of-two FFT for the feature pipeline.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;

/// Radix-2 forward FFT with a precomputed twiddle table.
pub struct Fft {
    n: usize,
    twiddle_re: Vec<f64>,
    twiddle_im: Vec<f64>,
}

impl Fft {
    /// `n` must be a power of two.
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT size must be a power of two");
        let half = n / 2;
        let mut twiddle_re = Vec::with_capacity(half);
        let mut twiddle_im = Vec::with_capacity(half);
        for k in 0..half {
            let ang = -TAU * k as f64 / n as f64;
            twiddle_re.push(libm::cos(ang));
            twiddle_im.push(libm::sin(ang));
        }
        Self { n, twiddle_re, twiddle_im }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform of `re + i*im`; both slices must have
    /// length `n`.
    pub fn forward(&self, re: &mut [f64], im: &mut [f64]) {
        let n = self.n;
        assert_eq!(re.len(), n);
        assert_eq!(im.len(), n);
        if n == 1 {
            return;
        }

        // Bit-reversal permutation.
        let mut j = 0usize;
        for i in 0..n {
            if i < j {
                re.swap(i, j);
                im.swap(i, j);
            }
            let mut bit = n >> 1;
            while j & bit != 0 {
                j ^= bit;
                bit >>= 1;
            }
            j |= bit;
        }

        let mut len = 2;
        while len <= n {
            let stride = n / len;
            let half = len / 2;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let wr = self.twiddle_re[k * stride];
                    let wi = self.twiddle_im[k * stride];
                    let a = start + k;
                    let b = a + half;
                    let tr = re[b] * wr - im[b] * wi;
                    let ti = re[b] * wi + im[b] * wr;
                    re[b] = re[a] - tr;
                    im[b] = im[a] - ti;
                    re[a] += tr;
                    im[a] += ti;
                }
            }
            len <<= 1;
        }
    }

    /// Power spectrum `|X_k|^2` over bins `0 ..= n/2` of a real frame,
    /// zero-padded to the transform size.
    pub fn power_spectrum(&self, frame: &[f64]) -> Vec<f64> {
        assert!(frame.len() <= self.n, "frame longer than FFT size");
        let mut re = vec![0.0; self.n];
        let mut im = vec![0.0; self.n];
        re[..frame.len()].copy_from_slice(frame);
        self.forward(&mut re, &mut im);
        (0..=self.n / 2).map(|k| re[k] * re[k] + im[k] * im[k]).collect()
    }
}
