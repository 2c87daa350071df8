//! Zero-centering, Butterworth band-pass and IIR notch, applied forward and
//! backward so the overall response has zero phase.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub bandpass_low: f64,
    pub bandpass_high: f64,
    pub notch_freq: f64,
    pub notch_q: f64,
    /// Order of each Butterworth half (high-pass and low-pass).
    pub filter_order: usize,
    pub normalize: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self {
            bandpass_low: 0.5,
            bandpass_high: 100.0,
            notch_freq: 50.0,
            notch_q: 30.0,
            filter_order: 4,
            normalize: true,
        }
    }
}

impl PreprocessConfig {
    pub fn validate(&self, fs: f64) -> Result<()> {
        let nyquist = fs / 2.0;
        if !(self.bandpass_low > 0.0 && self.bandpass_low < self.bandpass_high) {
            return Err(Error::Config(format!(
                "band-pass edges must satisfy 0 < low < high, got [{}, {}]",
                self.bandpass_low, self.bandpass_high
            )));
        }
        if self.bandpass_high >= nyquist {
            return Err(Error::Config(format!(
                "band-pass high edge {} Hz is not below Nyquist {nyquist} Hz",
                self.bandpass_high
            )));
        }
        if !(self.notch_freq > 0.0 && self.notch_freq < nyquist) {
            return Err(Error::Config(format!(
                "notch frequency {} Hz must lie in (0, {nyquist}) Hz",
                self.notch_freq
            )));
        }
        if !(self.notch_q > 0.0) {
            return Err(Error::Config(format!("notch Q must be positive, got {}", self.notch_q)));
        }
        if self.filter_order == 0 {
            return Err(Error::Config("filter order must be at least 1".into()));
        }
        Ok(())
    }
}

/// One second-order section, `a0` normalized to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Biquad {
    pub b: [f64; 3],
    pub a: [f64; 2],
}

impl Biquad {
    fn dc_gain(&self) -> f64 {
        (self.b[0] + self.b[1] + self.b[2]) / (1.0 + self.a[0] + self.a[1])
    }

    /// Transposed direct-form II state for a constant unit input.
    fn step_state(&self) -> [f64; 2] {
        let y = self.dc_gain();
        [y - self.b[0], self.b[2] - self.a[1] * y]
    }

    fn run(&self, x: &mut [f64], mut z: [f64; 2]) {
        let [b0, b1, b2] = self.b;
        let [a1, a2] = self.a;
        for v in x.iter_mut() {
            let input = *v;
            let y = b0 * input + z[0];
            z[0] = b1 * input - a1 * y + z[1];
            z[1] = b2 * input - a2 * y;
            *v = y;
        }
    }

    /// Complex response at normalized angular frequency `w` (rad/sample).
    fn magnitude(&self, w: f64) -> f64 {
        let (c1, s1, c2, s2) = (w.cos(), w.sin(), (2.0 * w).cos(), (2.0 * w).sin());
        let nr = self.b[0] + self.b[1] * c1 + self.b[2] * c2;
        let ni = -(self.b[1] * s1 + self.b[2] * s2);
        let dr = 1.0 + self.a[0] * c1 + self.a[1] * c2;
        let di = -(self.a[0] * s1 + self.a[1] * s2);
        ((nr * nr + ni * ni) / (dr * dr + di * di)).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pass {
    Low,
    High,
}

/// Cascade of second-order sections.
#[derive(Debug, Clone, PartialEq)]
pub struct Sos {
    sections: Vec<Biquad>,
}

impl Sos {
    pub fn sections(&self) -> &[Biquad] {
        &self.sections
    }

    pub fn butterworth_lowpass(order: usize, cutoff: f64, fs: f64) -> Self {
        Self::butterworth(order, cutoff, fs, Pass::Low)
    }

    pub fn butterworth_highpass(order: usize, cutoff: f64, fs: f64) -> Self {
        Self::butterworth(order, cutoff, fs, Pass::High)
    }

    /// High-pass at `low` cascaded with low-pass at `high`, each of `order`.
    pub fn butterworth_bandpass(order: usize, low: f64, high: f64, fs: f64) -> Self {
        let mut sos = Self::butterworth_highpass(order, low, fs);
        sos.sections.extend(Self::butterworth_lowpass(order, high, fs).sections);
        sos
    }

    fn butterworth(order: usize, cutoff: f64, fs: f64, pass: Pass) -> Self {
        // Bilinear transform with pre-warping; K = tan(pi fc / fs).
        let k = (PI * cutoff / fs).tan();
        let k2 = k * k;
        let mut sections = Vec::with_capacity(order.div_ceil(2));
        for i in 0..order / 2 {
            let theta = PI * (2 * i + 1) as f64 / (2 * order) as f64;
            let q = 1.0 / (2.0 * theta.sin());
            let norm = 1.0 / (1.0 + k / q + k2);
            let a = [2.0 * (k2 - 1.0) * norm, (1.0 - k / q + k2) * norm];
            let b = match pass {
                Pass::Low => [k2 * norm, 2.0 * k2 * norm, k2 * norm],
                Pass::High => [norm, -2.0 * norm, norm],
            };
            sections.push(Biquad { b, a });
        }
        if order % 2 == 1 {
            let norm = 1.0 / (1.0 + k);
            let a = [(k - 1.0) * norm, 0.0];
            let b = match pass {
                Pass::Low => [k * norm, k * norm, 0.0],
                Pass::High => [norm, -norm, 0.0],
            };
            sections.push(Biquad { b, a });
        }
        Self { sections }
    }

    /// Second-order IIR notch with quality factor `q`.
    pub fn notch(freq: f64, q: f64, fs: f64) -> Self {
        let w0 = 2.0 * PI * freq / fs;
        let alpha = w0.sin() / (2.0 * q);
        let norm = 1.0 / (1.0 + alpha);
        let c = -2.0 * w0.cos() * norm;
        Self {
            sections: vec![Biquad {
                b: [norm, c, norm],
                a: [c, (1.0 - alpha) * norm],
            }],
        }
    }

    /// Magnitude of the single-pass response at `freq` Hz.
    pub fn gain_at(&self, freq: f64, fs: f64) -> f64 {
        let w = 2.0 * PI * freq / fs;
        self.sections.iter().map(|s| s.magnitude(w)).product()
    }

    fn order(&self) -> usize {
        self.sections
            .iter()
            .map(|s| if s.a[1] == 0.0 && s.b[2] == 0.0 { 1 } else { 2 })
            .sum()
    }

    /// Causal filtering with steady-state initial conditions scaled to `x[0]`.
    fn filter_in_place(&self, x: &mut [f64]) {
        let Some(&first) = x.first() else { return };
        let mut level = first;
        for s in &self.sections {
            let z = s.step_state();
            s.run(x, [z[0] * level, z[1] * level]);
            level *= s.dc_gain();
        }
    }

    /// Zero-phase forward–backward filtering.
    ///
    /// The input is extended at both ends by an odd reflection of
    /// `3 × order` samples, filtered forward, reversed, filtered again,
    /// reversed and trimmed. Every step is linear in the input.
    pub fn filtfilt(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        if n == 0 {
            return Vec::new();
        }
        let pad = (3 * self.order()).min(n - 1);
        let mut ext = Vec::with_capacity(n + 2 * pad);
        ext.extend((1..=pad).rev().map(|i| 2.0 * x[0] - x[i]));
        ext.extend_from_slice(x);
        ext.extend((1..=pad).map(|i| 2.0 * x[n - 1] - x[n - 1 - i]));

        self.filter_in_place(&mut ext);
        ext.reverse();
        self.filter_in_place(&mut ext);
        ext.reverse();
        ext.drain(..pad);
        ext.truncate(n);
        ext
    }
}

pub fn zero_center(signal: &Signal) -> Result<Signal> {
    let x = signal.samples();
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    let mut out: Vec<f64> = x.iter().map(|v| v - mean).collect();
    // Second pass removes the rounding residue of the first.
    let residue = out.iter().sum::<f64>() / out.len() as f64;
    out.iter_mut().for_each(|v| *v -= residue);
    signal.with_samples(out)
}

pub fn bandpass(signal: &Signal, config: &PreprocessConfig) -> Result<Signal> {
    config.validate(signal.fs())?;
    let sos = Sos::butterworth_bandpass(
        config.filter_order,
        config.bandpass_low,
        config.bandpass_high,
        signal.fs(),
    );
    signal.with_samples(sos.filtfilt(signal.samples()))
}

pub fn notch(signal: &Signal, config: &PreprocessConfig) -> Result<Signal> {
    config.validate(signal.fs())?;
    let sos = Sos::notch(config.notch_freq, config.notch_q, signal.fs());
    signal.with_samples(sos.filtfilt(signal.samples()))
}

/// Full chain: optional zero-centering, band-pass, notch. No detrending.
pub fn preprocess(signal: &Signal, config: &PreprocessConfig) -> Result<Signal> {
    config.validate(signal.fs())?;
    let centered = if config.normalize {
        zero_center(signal)?
    } else {
        signal.clone()
    };
    notch(&bandpass(&centered, config)?, config)
}
