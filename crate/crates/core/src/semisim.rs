//! Semi-simulated contaminated EEG with known ground truth.
//!
//! A one-minute ground truth is assembled from two clean segments; blink
//! segments are zero-padded to the slot length, concatenated into an
//! artifact train following the same slot arrangement, scaled by the
//! mixing coefficient `α` for the requested SNR and added:
//! `contaminated = ground_truth + α · train`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

pub fn rms(x: &[f64]) -> f64 {
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

/// SNR in dB as `10 · log10(RMS(s) / RMS(α m))` (an RMS ratio, not a power
/// ratio).
pub fn snr_db(clean: &[f64], artifact: &[f64], alpha: f64) -> f64 {
    10.0 * (rms(clean) / (alpha.abs() * rms(artifact))).log10()
}

/// Mixing coefficient `α = RMS(s) / (RMS(m) · 10^(snr/10))`.
pub fn alpha_for_snr(clean: &Signal, artifact: &Signal, snr_db: f64) -> Result<f64> {
    alpha_for_snr_slices(clean.samples(), artifact.samples(), snr_db)
}

fn alpha_for_snr_slices(clean: &[f64], artifact: &[f64], snr_db: f64) -> Result<f64> {
    let rm = rms(artifact);
    if !(rm > 0.0) {
        return Err(Error::InvalidSignal("artifact segment has zero RMS".into()));
    }
    if !snr_db.is_finite() {
        return Err(Error::Config(format!("SNR must be finite, got {snr_db}")));
    }
    Ok(rms(clean) / (rm * 10f64.powf(snr_db / 10.0)))
}

/// Places `blink` at sample `position` inside a zero signal of `target_s`.
pub fn pad_blink(blink: &Signal, target_s: f64, position: usize) -> Result<Signal> {
    let n = (target_s * blink.fs()).round() as usize;
    if blink.len() >= n {
        return Err(Error::InvalidSignal(format!(
            "blink of {} samples does not fit a {target_s} s slot ({n} samples)",
            blink.len()
        )));
    }
    if position + blink.len() > n {
        return Err(Error::InvalidSignal(format!(
            "blink at offset {position} overruns the {n}-sample slot"
        )));
    }
    let mut out = vec![0.0; n];
    out[position..position + blink.len()].copy_from_slice(blink.samples());
    blink.with_samples(out)
}

/// One 10 s slot: which clean segment forms the ground truth and which
/// blink segment (if any) is added to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub clean: usize,
    pub blink: Option<usize>,
}

impl Slot {
    pub const fn new(clean: usize, blink: usize) -> Self {
        Self {
            clean,
            blink: Some(blink),
        }
    }
}

/// Ground truth alternates A B A B A B; the blink pairing runs through all
/// four clean × blink combinations.
pub const DEFAULT_ARRANGEMENT: [Slot; 6] = [
    Slot::new(0, 0),
    Slot::new(1, 1),
    Slot::new(0, 1),
    Slot::new(1, 0),
    Slot::new(0, 0),
    Slot::new(1, 1),
];

#[derive(Debug, Clone, PartialEq)]
pub struct SemiSimSpec {
    pub clean_segments: [Signal; 2],
    pub blink_segments: [Signal; 2],
    pub snr_db: f64,
    /// Inclusive range `snr_db` must fall in.
    pub snr_range_db: (f64, f64),
    pub fs: f64,
    pub arrangement: Vec<Slot>,
    pub slot_s: f64,
    /// Blinks are centred in their slot and shifted uniformly by up to
    /// this many seconds either way.
    pub jitter_s: f64,
    pub rng_seed: u64,
}

impl SemiSimSpec {
    /// Built-in synthetic segments: two 10 s clean EEG segments and two
    /// 2 s blink segments at 500 µV, all derived from `seed`.
    pub fn synthetic(fs: f64, seed: u64) -> Result<Self> {
        let clean_segments = [
            synth_clean_eeg(10.0, fs, seed)?,
            synth_clean_eeg(10.0, fs, seed.wrapping_add(1))?,
        ];
        let blink_segments = [
            synth_blink(2.0, fs, 500.0, seed.wrapping_add(2))?,
            synth_blink(2.0, fs, 500.0, seed.wrapping_add(3))?,
        ];
        Ok(Self {
            clean_segments,
            blink_segments,
            snr_db: 0.0,
            snr_range_db: (-7.0, 2.0),
            fs,
            arrangement: DEFAULT_ARRANGEMENT.to_vec(),
            slot_s: 10.0,
            jitter_s: 1.0,
            rng_seed: seed,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.snr_range_db;
        if !(self.snr_db >= lo && self.snr_db <= hi) {
            return Err(Error::Config(format!(
                "SNR {} dB outside configured range [{lo}, {hi}] dB",
                self.snr_db
            )));
        }
        let segs = self.clean_segments.iter().chain(&self.blink_segments);
        for s in segs {
            if (s.fs() - self.fs).abs() > 1e-9 * self.fs {
                return Err(Error::Config(format!(
                    "segment `{}` sampled at {} Hz, expected {} Hz",
                    s.label(),
                    s.fs(),
                    self.fs
                )));
            }
        }
        if self.arrangement.is_empty() {
            return Err(Error::Config("arrangement has no slots".into()));
        }
        for slot in &self.arrangement {
            if slot.clean > 1 || slot.blink.is_some_and(|b| b > 1) {
                return Err(Error::Config(format!("slot {slot:?} refers to a missing segment")));
            }
        }
        if !(self.jitter_s >= 0.0) || !(self.slot_s > 0.0) {
            return Err(Error::Config(
                "slot length must be positive and jitter non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SemiSimResult {
    pub contaminated: Signal,
    pub ground_truth: Signal,
    /// Unscaled blink train; `contaminated = ground_truth + alpha_used · artifact`.
    pub artifact: Signal,
    pub alpha_used: f64,
    /// First sample of each placed blink segment.
    pub blink_onsets: Vec<usize>,
    /// Sample of maximum |amplitude| within each placed blink.
    pub blink_peaks: Vec<usize>,
}

pub fn build_semisim(spec: &SemiSimSpec) -> Result<SemiSimResult> {
    spec.validate()?;
    let fs = spec.fs;
    let slot_len = (spec.slot_s * fs).round() as usize;
    for s in &spec.clean_segments {
        if s.len() < slot_len {
            return Err(Error::InvalidSignal(format!(
                "clean segment `{}` has {} samples, slot needs {slot_len}",
                s.label(),
                s.len()
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.rng_seed);
    let n = slot_len * spec.arrangement.len();
    let mut truth = Vec::with_capacity(n);
    let mut train = Vec::with_capacity(n);
    let mut onsets = Vec::new();
    let mut peaks = Vec::new();
    let max_jitter = (spec.jitter_s * fs).round() as i64;

    for (i, slot) in spec.arrangement.iter().enumerate() {
        let base = i * slot_len;
        truth.extend_from_slice(&spec.clean_segments[slot.clean].samples()[..slot_len]);
        let Some(b) = slot.blink else {
            train.extend(std::iter::repeat_n(0.0, slot_len));
            continue;
        };
        let blink = &spec.blink_segments[b];
        if blink.len() >= slot_len {
            return Err(Error::InvalidSignal(format!(
                "blink segment `{}` is not shorter than the slot",
                blink.label()
            )));
        }
        let free = (slot_len - blink.len()) as i64;
        let jitter = if max_jitter > 0 {
            rng.random_range(-max_jitter..=max_jitter)
        } else {
            0
        };
        let pos = (free / 2 + jitter).clamp(0, free) as usize;
        let padded = pad_blink(blink, spec.slot_s, pos)?;
        train.extend_from_slice(padded.samples());
        onsets.push(base + pos);
        let peak = blink
            .samples()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(j, _)| j)
            .unwrap_or(0);
        peaks.push(base + pos + peak);
    }

    let alpha = alpha_for_snr_slices(&truth, &train, spec.snr_db)?;
    let contaminated: Vec<f64> = truth.iter().zip(&train).map(|(s, m)| s + alpha * m).collect();
    let label = spec.clean_segments[0].label().to_string();
    Ok(SemiSimResult {
        contaminated: Signal::new(contaminated, fs, label.clone())?,
        ground_truth: Signal::new(truth, fs, label.clone())?,
        artifact: Signal::new(train, fs, "blinks")?,
        alpha_used: alpha,
        blink_onsets: onsets,
        blink_peaks: peaks,
    })
}

/// A second channel for the multichannel baseline: the same blink
/// segments, placements and SNR over an independent clean background
/// drawn from `background_seed`.
pub fn second_channel(spec: &SemiSimSpec, background_seed: u64) -> Result<SemiSimSpec> {
    let len_s = |s: &Signal| s.duration();
    let clean_segments = [
        synth_clean_eeg(len_s(&spec.clean_segments[0]), spec.fs, background_seed)?,
        synth_clean_eeg(len_s(&spec.clean_segments[1]), spec.fs, background_seed.wrapping_add(1))?,
    ];
    Ok(SemiSimSpec {
        clean_segments,
        ..spec.clone()
    })
}

/// Target RMS of synthetic clean EEG, µV.
const SYNTH_EEG_RMS: f64 = 15.0;

/// Resting-state-like EEG: Gaussian noise shaped in the frequency domain to
/// a `1/f` power trend plus an alpha peak at 10 Hz, band-limited to
/// 0.5–100 Hz, zero mean. Deterministic per seed.
pub fn synth_clean_eeg(duration_s: f64, fs: f64, seed: u64) -> Result<Signal> {
    let n = (duration_s * fs).round() as usize;
    if n < 2 {
        return Err(Error::InvalidSignal(format!(
            "{duration_s} s at {fs} Hz yields fewer than two samples"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut spec: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(StandardNormal.sample(&mut rng), 0.0))
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut spec);

    let high = 100f64.min(fs / 2.0);
    for (b, bin) in spec.iter_mut().enumerate() {
        let f = b.min(n - b) as f64 * fs / n as f64;
        *bin *= if (0.5..=high).contains(&f) {
            eeg_power(f).sqrt()
        } else {
            0.0
        };
    }
    planner.plan_fft_inverse(n).process(&mut spec);

    let mut x: Vec<f64> = spec.iter().map(|c| c.re).collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    let scale = SYNTH_EEG_RMS / rms(&x);
    x.iter_mut().for_each(|v| *v *= scale);
    Signal::new(x, fs, "synthetic")
}

/// Relative power density of the synthetic background at `f` Hz.
fn eeg_power(f: f64) -> f64 {
    let pink = 1.0 / f.max(1.0);
    let alpha = 0.4 * (-(f - 10.0).powi(2) / (2.0 * 1.2f64.powi(2))).exp();
    pink + alpha
}

/// A raised-cosine blink pulse of 300–400 ms (width drawn from `seed`),
/// peaking at exactly `amplitude_uv` in the middle of a zero segment of
/// `duration_s`.
pub fn synth_blink(duration_s: f64, fs: f64, amplitude_uv: f64, seed: u64) -> Result<Signal> {
    let n = (duration_s * fs).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width_s = rng.random_range(0.3..=0.4);
    let half = ((width_s * fs / 2.0).round() as usize).max(1);
    if 2 * half + 1 > n {
        return Err(Error::InvalidSignal(format!(
            "{duration_s} s segment is too short for a {width_s:.3} s blink"
        )));
    }
    let centre = n / 2;
    let mut x = vec![0.0; n];
    for i in 0..=2 * half {
        let t = (i as f64 - half as f64) / (half + 1) as f64;
        x[centre - half + i] = amplitude_uv * 0.5 * (1.0 + (PI * t).cos());
    }
    Signal::new(x, fs, "blink")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(x: Vec<f64>) -> Signal {
        Signal::new(x, 500.0, "x").unwrap()
    }

    /// Independent two-pass RMS: mean of squares accumulated separately.
    fn rms_oracle(x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for v in x {
            acc += v * v;
        }
        (acc / x.len() as f64).sqrt()
    }

    fn nonzero_runs(x: &[f64]) -> usize {
        let mut runs = 0;
        let mut inside = false;
        for v in x {
            if *v != 0.0 && !inside {
                runs += 1;
            }
            inside = *v != 0.0;
        }
        runs
    }

    #[test]
    fn rms_examples() {
        assert!((rms(&[3.0, 4.0]) - 12.5f64.sqrt()).abs() < 1e-15);
        assert!((rms(&[-2.5; 7]) - 2.5).abs() < 1e-15);
        let x = synth_clean_eeg(3.0, 500.0, 1).unwrap();
        assert!((rms(x.samples()) - rms_oracle(x.samples())).abs() < 1e-12);
    }

    #[test]
    fn alpha_examples() {
        let s = sig(vec![2.0, -2.0]);
        let m = sig(vec![4.0, -4.0]);
        let a = alpha_for_snr(&s, &m, 0.0).unwrap();
        assert!((a - 0.5).abs() < 1e-15);
        assert!(snr_db(s.samples(), m.samples(), a).abs() < 1e-12);
        let one = sig(vec![1.0, -1.0]);
        assert!((alpha_for_snr(&one, &one, 10.0).unwrap() - 0.1).abs() < 1e-15);
        assert!(alpha_for_snr(&one, &sig(vec![0.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn snr_round_trip() {
        let s = synth_clean_eeg(4.0, 500.0, 3).unwrap();
        let m = synth_blink(4.0, 500.0, 350.0, 4).unwrap();
        for target in [-7.0, -3.3, 0.0, 2.0] {
            let a = alpha_for_snr(&s, &m, target).unwrap();
            assert!((snr_db(s.samples(), m.samples(), a) - target).abs() < 1e-9);
        }
    }

    #[test]
    fn padding_places_blink_exactly() {
        let blink = sig(vec![1.0; 500]);
        let padded = pad_blink(&blink, 10.0, 2250).unwrap();
        assert_eq!(padded.len(), 5000);
        let support: Vec<usize> = (0..5000).filter(|&i| padded.samples()[i] != 0.0).collect();
        assert_eq!(support.first(), Some(&2250));
        assert_eq!(support.last(), Some(&2749));
        assert_eq!(support.len(), 500);
        let left = pad_blink(&blink, 10.0, 0).unwrap();
        assert_eq!(left.samples()[0], 1.0);
        assert!(pad_blink(&sig(vec![1.0; 6000]), 10.0, 0).is_err());
        assert!(pad_blink(&blink, 10.0, 4600).is_err());
    }

    #[test]
    fn synthetic_blink_shape() {
        let b = synth_blink(2.0, 500.0, 500.0, 9).unwrap();
        let peak = b.samples().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!((peak - 500.0).abs() < 1e-9);
        let support = b.samples().iter().filter(|v| **v != 0.0).count();
        assert!((150..=201).contains(&support), "{support}");
        assert_eq!(nonzero_runs(b.samples()), 1);
    }

    #[test]
    fn synthetic_eeg_is_deterministic_and_low_heavy() {
        let a = synth_clean_eeg(10.0, 500.0, 42).unwrap();
        assert_eq!(a, synth_clean_eeg(10.0, 500.0, 42).unwrap());
        assert_ne!(a, synth_clean_eeg(10.0, 500.0, 43).unwrap());
        let mean = a.samples().iter().sum::<f64>() / a.len() as f64;
        assert!(mean.abs() < 1e-9);

        // Periodogram oracle on the raw FFT.
        let n = a.len();
        let mut buf: Vec<Complex<f64>> = a.samples().iter().map(|v| Complex::new(*v, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let band = |lo: f64, hi: f64| -> f64 {
            (0..=n / 2)
                .filter(|&b| {
                    let f = b as f64 * 500.0 / n as f64;
                    f >= lo && f < hi
                })
                .map(|b| buf[b].norm_sqr())
                .sum()
        };
        assert!(band(0.5, 20.0) > band(40.0, 100.0));
    }

    #[test]
    fn default_build_has_six_disjoint_blinks() {
        let spec = SemiSimSpec::synthetic(500.0, 7).unwrap();
        let r = build_semisim(&spec).unwrap();
        assert_eq!(r.contaminated.len(), 30_000);
        assert_eq!(r.ground_truth.len(), 30_000);
        assert_eq!(r.blink_onsets.len(), 6);
        let diff: Vec<f64> = r
            .contaminated
            .samples()
            .iter()
            .zip(r.ground_truth.samples())
            .map(|(z, s)| z - s)
            .collect();
        assert_eq!(nonzero_runs(&diff), 6);
        // Additivity holds exactly.
        for i in 0..30_000 {
            let want = r.ground_truth.samples()[i] + r.alpha_used * r.artifact.samples()[i];
            assert_eq!(r.contaminated.samples()[i], want);
        }
        // Ground truth replicates the two clean segments.
        assert_eq!(
            &r.ground_truth.samples()[..5000],
            &r.ground_truth.samples()[10_000..15_000]
        );
        assert_eq!(
            &r.ground_truth.samples()[5000..10_000],
            spec.clean_segments[1].samples()
        );
    }

    #[test]
    fn alpha_matches_recomputation() {
        let spec = SemiSimSpec::synthetic(500.0, 8).unwrap();
        let r = build_semisim(&spec).unwrap();
        let a = alpha_for_snr(&r.ground_truth, &r.artifact, spec.snr_db).unwrap();
        assert_eq!(a, r.alpha_used);
    }

    #[test]
    fn huge_snr_leaves_ground_truth() {
        let mut spec = SemiSimSpec::synthetic(500.0, 9).unwrap();
        spec.snr_range_db = (-100.0, 100.0);
        spec.snr_db = 60.0;
        let r = build_semisim(&spec).unwrap();
        let (a, b) = (r.contaminated.samples(), r.ground_truth.samples());
        let n = a.len() as f64;
        let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        assert!(cov / (va * vb).sqrt() >= 0.9999);
    }

    #[test]
    fn out_of_range_snr_is_rejected() {
        let mut spec = SemiSimSpec::synthetic(500.0, 9).unwrap();
        spec.snr_db = 5.0;
        assert!(matches!(build_semisim(&spec), Err(Error::Config(_))));
    }

    #[test]
    fn same_seed_same_dataset() {
        let a = build_semisim(&SemiSimSpec::synthetic(500.0, 5).unwrap()).unwrap();
        let b = build_semisim(&SemiSimSpec::synthetic(500.0, 5).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn second_channel_shares_blinks_but_not_background() {
        let spec = SemiSimSpec::synthetic(500.0, 5).unwrap();
        let a = build_semisim(&spec).unwrap();
        let b = build_semisim(&second_channel(&spec, 1000).unwrap()).unwrap();
        assert_eq!(a.blink_onsets, b.blink_onsets);
        assert_eq!(a.artifact, b.artifact);
        assert_ne!(a.ground_truth.samples(), b.ground_truth.samples());
        assert_eq!(a.contaminated.len(), b.contaminated.len());
    }
}
