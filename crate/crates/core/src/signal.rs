use crate::error::{Error, Result};

/// A single-channel sampled time series.
///
/// Samples are in microvolts. Construction rejects empty input, a
/// non-positive sampling rate and non-finite samples, so every `Signal`
/// that exists is safe to feed to the numerical code.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
    label: String,
}

impl Signal {
    pub fn new(samples: Vec<f64>, fs: f64, label: impl Into<String>) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSignal(format!(
                "sampling rate must be positive, got {fs}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::InvalidSignal("signal has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSignal(format!(
                "non-finite sample {} at index {i}",
                samples[i]
            )));
        }
        Ok(Self {
            samples,
            fs,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds (`len / fs`).
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same sampling rate and label, new samples.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        Self::new(samples, self.fs, self.label.clone())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Extracts `[start_s, end_s)` as a new signal.
    ///
    /// Bounds are converted to sample indices by rounding; `end_s` may equal
    /// the duration.
    pub fn slice(&self, start_s: f64, end_s: f64) -> Result<Self> {
        if !(start_s.is_finite() && end_s.is_finite()) {
            return Err(Error::InvalidSignal("slice bounds must be finite".into()));
        }
        if end_s <= start_s {
            return Err(Error::InvalidSignal(format!(
                "slice end {end_s} s is not after start {start_s} s"
            )));
        }
        let duration = self.duration();
        let tol = 0.5 / self.fs;
        if start_s < 0.0 || end_s > duration + tol {
            return Err(Error::InvalidSignal(format!(
                "slice [{start_s}, {end_s}) s outside signal duration {duration} s"
            )));
        }
        let a = (start_s * self.fs).round() as usize;
        let b = ((end_s * self.fs).round() as usize).min(self.len());
        if b <= a {
            return Err(Error::InvalidSignal(format!(
                "slice [{start_s}, {end_s}) s contains no samples"
            )));
        }
        self.with_samples(self.samples[a..b].to_vec())
    }
}
