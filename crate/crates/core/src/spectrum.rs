//! Welch power spectral density.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};

/// One-sided PSD estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Psd {
    pub freqs: Vec<f64>,
    pub density: Vec<f64>,
}

impl Psd {
    pub fn resolution(&self) -> f64 {
        self.freqs.get(1).copied().unwrap_or(0.0)
    }

    /// Integrated power over bins with centre frequency in `[low, high)`.
    pub fn band_power(&self, low: f64, high: f64) -> f64 {
        let df = self.resolution();
        self.freqs
            .iter()
            .zip(&self.density)
            .filter(|(f, _)| **f >= low && **f < high)
            .map(|(_, p)| p * df)
            .sum()
    }
}

/// Averaged periodogram over `segment_s` segments with 50 % overlap, a
/// periodic Hann taper and per-segment mean removal.
pub fn welch(x: &[f64], fs: f64, segment_s: f64) -> Result<Psd> {
    let len = (segment_s * fs).round() as usize;
    if len < 2 || x.len() < len {
        return Err(Error::InvalidSignal(format!(
            "{} samples is shorter than one {segment_s} s Welch segment",
            x.len()
        )));
    }
    let hop = len / 2;
    let window: Vec<f64> = (0..len)
        .map(|i| 0.5 * (1.0 - (2.0 * PI * i as f64 / len as f64).cos()))
        .collect();
    let win_energy: f64 = window.iter().map(|w| w * w).sum();
    let fft = FftPlanner::new().plan_fft_forward(len);
    let n_bins = len / 2 + 1;
    let mut acc = vec![0.0; n_bins];
    let mut segments = 0usize;
    let mut buf = vec![Complex::new(0.0, 0.0); len];

    let mut start = 0;
    while start + len <= x.len() {
        let seg = &x[start..start + len];
        let mean = seg.iter().sum::<f64>() / len as f64;
        for ((b, v), w) in buf.iter_mut().zip(seg).zip(&window) {
            *b = Complex::new((v - mean) * w, 0.0);
        }
        fft.process(&mut buf);
        for (a, c) in acc.iter_mut().zip(&buf) {
            *a += c.norm_sqr();
        }
        segments += 1;
        start += hop;
    }

    let scale = 1.0 / (fs * win_energy * segments as f64);
    let density = acc
        .iter()
        .enumerate()
        .map(|(b, p)| {
            // Fold negative frequencies, except at DC and (even-length) Nyquist.
            let fold = if b == 0 || (len.is_multiple_of(2) && b == len / 2) {
                1.0
            } else {
                2.0
            };
            p * scale * fold
        })
        .collect();
    let freqs = (0..n_bins).map(|b| b as f64 * fs / len as f64).collect();
    Ok(Psd { freqs, density })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parseval_for_white_noise() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let x: Vec<f64> = (0..20_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let psd = welch(&x, 200.0, 2.0).unwrap();
        let total = psd.band_power(0.0, 101.0);
        assert!((total - 1.0).abs() < 0.05, "{total}");
    }

    #[test]
    fn sinusoid_peaks_at_its_bin() {
        let fs = 500.0;
        let x: Vec<f64> = (0..5000).map(|i| (2.0 * PI * 10.0 * i as f64 / fs).sin()).collect();
        let psd = welch(&x, fs, 2.0).unwrap();
        assert_eq!(psd.resolution(), 0.5);
        let argmax = (0..psd.density.len())
            .max_by(|&a, &b| psd.density[a].total_cmp(&psd.density[b]))
            .unwrap();
        assert_eq!(psd.freqs[argmax], 10.0);
        // Sine of unit amplitude carries 0.5 power.
        assert!((psd.band_power(9.0, 11.0) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn too_short_errors() {
        assert!(welch(&[0.0; 999], 500.0, 2.0).is_err());
    }
}
