//! Evaluation metrics: RRMSE, correlation, band-power ratios, amplitude
//! threshold blink counting and percentage reduction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semisim::rms;
use crate::signal::Signal;
use crate::spectrum::welch;

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "signals differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.is_empty() {
        return Err(Error::InvalidSignal("empty signal".into()));
    }
    Ok(())
}

/// `100 · RMS(estimate − truth) / RMS(truth)`.
pub fn rrmse(estimate: &[f64], ground_truth: &[f64]) -> Result<f64> {
    same_len(estimate, ground_truth)?;
    let reference = rms(ground_truth);
    if !(reference > 0.0) {
        return Err(Error::InvalidSignal("ground truth has zero RMS".into()));
    }
    let err: Vec<f64> = estimate.iter().zip(ground_truth).map(|(e, g)| e - g).collect();
    Ok(100.0 * rms(&err) / reference)
}

/// Pearson correlation coefficient.
pub fn correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    same_len(a, b)?;
    if a.len() < 2 {
        return Err(Error::InvalidSignal("correlation needs at least two samples".into()));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::InvalidSignal("correlation of a constant signal".into()));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

/// Relative power of the five classical EEG bands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPowers {
    pub delta: f64,
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

pub const BANDS: [(&str, f64, f64); 5] = [
    ("delta", 0.5, 4.0),
    ("theta", 4.0, 8.0),
    ("alpha", 8.0, 13.0),
    ("beta", 13.0, 30.0),
    ("gamma", 30.0, 100.0),
];

impl BandPowers {
    pub fn as_array(&self) -> [f64; 5] {
        [self.delta, self.theta, self.alpha, self.beta, self.gamma]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, f64)> {
        BANDS.iter().map(|b| b.0).zip(self.as_array())
    }

    pub fn sum(&self) -> f64 {
        self.as_array().iter().sum()
    }
}

const WELCH_SEGMENT_S: f64 = 2.0;

/// Band power divided by total power over 0.5–100 Hz, from a Welch PSD
/// (2 s Hann segments, 50 % overlap). Bands are half-open `[low, high)`.
pub fn band_power_ratios(signal: &Signal) -> Result<BandPowers> {
    let fs = signal.fs();
    let psd = welch(signal.samples(), fs, WELCH_SEGMENT_S)?;
    let nyquist = fs / 2.0;
    let top = if nyquist < 100.0 {
        log::warn!("gamma band truncated at Nyquist ({nyquist} Hz)");
        // Keep the Nyquist bin itself.
        nyquist + psd.resolution() / 2.0
    } else {
        100.0
    };
    let total = psd.band_power(0.5, top);
    if !(total > 0.0) {
        return Err(Error::InvalidSignal("no power in 0.5–100 Hz".into()));
    }
    let p = |lo: f64, hi: f64| psd.band_power(lo, hi.min(top)) / total;
    Ok(BandPowers {
        delta: p(0.5, 4.0),
        theta: p(4.0, 8.0),
        alpha: p(8.0, 13.0),
        beta: p(13.0, 30.0),
        gamma: p(30.0, 100.0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlinkConfig {
    /// Multiple of mean |x| a sample must exceed.
    pub threshold_constant: f64,
    pub min_peak_distance_ms: f64,
}

impl Default for BlinkConfig {
    fn default() -> Self {
        Self {
            threshold_constant: 6.0,
            min_peak_distance_ms: 250.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlinkCount {
    pub count: usize,
    pub peaks: Vec<usize>,
    pub threshold: f64,
}

/// Counts large-amplitude events: samples with `|x| > c · mean|x|`, grouped
/// into peaks at least `min_peak_distance_ms` apart.
///
/// Each run of consecutive supra-threshold samples contributes its largest
/// sample. Scanning left to right, a run peak closer than the minimum
/// distance to the current event joins that event (which keeps the larger
/// sample); otherwise it starts a new event.
pub fn count_blinks(signal: &Signal, config: &BlinkConfig) -> Result<BlinkCount> {
    if !(config.threshold_constant > 0.0 && config.min_peak_distance_ms > 0.0) {
        return Err(Error::Config("blink threshold and distance must be positive".into()));
    }
    let x = signal.samples();
    let mean_abs = x.iter().map(|v| v.abs()).sum::<f64>() / x.len() as f64;
    let threshold = config.threshold_constant * mean_abs;
    let min_dist = (config.min_peak_distance_ms / 1000.0 * signal.fs()).round() as usize;

    let mut run_peaks = Vec::new();
    let mut i = 0;
    while i < x.len() {
        if x[i].abs() > threshold {
            let mut best = i;
            while i < x.len() && x[i].abs() > threshold {
                if x[i].abs() > x[best].abs() {
                    best = i;
                }
                i += 1;
            }
            run_peaks.push(best);
        } else {
            i += 1;
        }
    }

    let mut peaks: Vec<usize> = Vec::new();
    for p in run_peaks {
        match peaks.last_mut() {
            Some(last) if p - *last < min_dist => {
                if x[p].abs() > x[*last].abs() {
                    *last = p;
                }
            }
            _ => peaks.push(p),
        }
    }
    Ok(BlinkCount {
        count: peaks.len(),
        peaks,
        threshold,
    })
}

/// `(before − after) / before × 100`; `None` when `before` is zero.
pub fn percentage_reduction(before: usize, after: usize) -> Option<f64> {
    (before > 0).then(|| (before as f64 - after as f64) / before as f64 * 100.0)
}

/// Every metric computable from the supplied signals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rrmse_pct: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cc: Option<f64>,
    pub band_power_contaminated: BandPowers,
    pub band_power_cleaned: BandPowers,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub band_power_ground_truth: Option<BandPowers>,
    pub blinks_before: usize,
    pub blinks_after: usize,
    pub reduction_pct: Option<f64>,
    pub elapsed_s: Option<f64>,
}

pub fn full_report(
    contaminated: &Signal,
    cleaned: &Signal,
    ground_truth: Option<&Signal>,
    blink: &BlinkConfig,
    elapsed_s: Option<f64>,
) -> Result<EvaluationReport> {
    same_len(contaminated.samples(), cleaned.samples())?;
    let (rrmse_pct, cc, band_gt) = match ground_truth {
        Some(gt) => (
            Some(rrmse(cleaned.samples(), gt.samples())?),
            Some(correlation(cleaned.samples(), gt.samples())?),
            Some(band_power_ratios(gt)?),
        ),
        None => (None, None, None),
    };
    let before = count_blinks(contaminated, blink)?.count;
    let after = count_blinks(cleaned, blink)?.count;
    Ok(EvaluationReport {
        rrmse_pct,
        cc,
        band_power_contaminated: band_power_ratios(contaminated)?,
        band_power_cleaned: band_power_ratios(cleaned)?,
        band_power_ground_truth: band_gt,
        blinks_before: before,
        blinks_after: after,
        reduction_pct: percentage_reduction(before, after),
        elapsed_s,
    })
}
