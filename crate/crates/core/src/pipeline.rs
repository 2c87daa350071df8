//! End-to-end cleaning: single-channel E-ASR and the multichannel ASR
//! baseline.

use std::time::Instant;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::asr::{calibrate, process, AsrConfig, AsrState, WindowReport};
use crate::embedding::{diagonal_average, embed, EmbeddingConfig};
use crate::error::{Error, Result};
use crate::preprocess::{preprocess, PreprocessConfig};
use crate::signal::Signal;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EasrConfig {
    pub preprocess: PreprocessConfig,
    pub embedding: EmbeddingConfig,
    pub asr: AsrConfig,
}

impl EasrConfig {
    pub fn validate(&self, signal: &Signal) -> Result<()> {
        self.preprocess.validate(signal.fs())?;
        self.embedding.validate(signal.len())?;
        self.asr.validate()
    }
}

#[derive(Debug, Clone)]
pub struct CleanResult {
    pub cleaned: Signal,
    /// Filtered input, i.e. what the ASR stages saw.
    pub preprocessed: Signal,
    pub rejection_report: Vec<WindowReport>,
    /// Seconds spent in embed, calibrate, process and averaging.
    pub elapsed: f64,
    pub state: AsrState,
}

impl CleanResult {
    pub fn total_rejected(&self) -> usize {
        self.rejection_report.iter().map(|w| w.rejected.len()).sum()
    }

    pub fn windows_with_rejection(&self) -> usize {
        self.rejection_report.iter().filter(|w| !w.rejected.is_empty()).count()
    }
}

/// Preprocess, embed, calibrate on the embedded matrix itself, process
/// and average back to one channel.
pub fn easr_clean(signal: &Signal, config: &EasrConfig) -> Result<CleanResult> {
    run(signal, config, None)
}

/// As [`easr_clean`] but with a previously computed calibration.
pub fn easr_clean_with_state(signal: &Signal, config: &EasrConfig, state: &AsrState) -> Result<CleanResult> {
    run(signal, config, Some(state))
}

fn run(signal: &Signal, config: &EasrConfig, state: Option<&AsrState>) -> Result<CleanResult> {
    config.validate(signal)?;
    let preprocessed = preprocess(signal, &config.preprocess)?;
    let fs = signal.fs();

    let started = Instant::now();
    let embedded = embed(&preprocessed, &config.embedding)?;
    let state = match state {
        Some(s) => s.clone(),
        None => calibrate(embedded.data(), fs, &config.asr)?,
    };
    let out = process(embedded.data(), &state, fs, &config.asr)?;
    let cleaned = diagonal_average(&out.clean, fs)?;
    let elapsed = started.elapsed().as_secs_f64();

    debug_assert_eq!(cleaned.len(), signal.len());
    let cleaned = cleaned.with_label(signal.label().to_string());
    log::debug!(
        "cleaned {} samples: {} components rejected in {} windows, {elapsed:.3} s",
        signal.len(),
        out.total_rejected(),
        out.windows.iter().filter(|w| !w.rejected.is_empty()).count()
    );
    Ok(CleanResult {
        cleaned,
        preprocessed,
        rejection_report: out.windows,
        elapsed,
        state,
    })
}

#[derive(Debug, Clone)]
pub struct MultichannelResult {
    pub cleaned: Vec<Signal>,
    pub rejection_report: Vec<WindowReport>,
    pub elapsed: f64,
}

/// Plain ASR: channels stacked as rows, calibrated and processed without
/// embedding. Inputs are used as given (no preprocessing).
pub fn asr_clean_multichannel(signals: &[Signal], config: &AsrConfig) -> Result<MultichannelResult> {
    if signals.len() < 2 {
        return Err(Error::InvalidSignal(format!(
            "multichannel ASR needs at least 2 channels, got {}",
            signals.len()
        )));
    }
    let (n, fs) = (signals[0].len(), signals[0].fs());
    for s in &signals[1..] {
        if s.len() != n {
            return Err(Error::Dimension(format!(
                "channel '{}' has {} samples, expected {n}",
                s.label(),
                s.len()
            )));
        }
        if s.fs() != fs {
            return Err(Error::InvalidSignal(format!(
                "channel '{}' is sampled at {} Hz, expected {fs}",
                s.label(),
                s.fs()
            )));
        }
    }
    config.validate()?;

    let started = Instant::now();
    let x = DMatrix::from_fn(signals.len(), n, |r, c| signals[r].samples()[c]);
    let state = calibrate(&x, fs, config)?;
    let out = process(&x, &state, fs, config)?;
    let elapsed = started.elapsed().as_secs_f64();

    let cleaned = signals
        .iter()
        .enumerate()
        .map(|(r, s)| s.with_samples(out.clean.row(r).iter().copied().collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(MultichannelResult {
        cleaned,
        rejection_report: out.windows,
        elapsed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asr::AsrState;
    use crate::metrics::correlation;
    use crate::semisim::synth_clean_eeg;

    fn eeg(seconds: f64, seed: u64) -> Signal {
        synth_clean_eeg(seconds, 500.0, seed).unwrap()
    }

    #[test]
    fn clean_eeg_is_mostly_untouched() {
        let s = eeg(30.0, 1);
        let r = easr_clean(&s, &EasrConfig::default()).unwrap();
        assert_eq!(r.cleaned.len(), s.len());
        assert_eq!(r.cleaned.fs(), s.fs());
        assert!(r.elapsed >= 0.0);
        let cc = correlation(r.preprocessed.samples(), r.cleaned.samples()).unwrap();
        assert!(cc >= 0.99, "cc {cc}");
    }

    #[test]
    fn shorter_than_embedding_errors() {
        let s = Signal::new(vec![1.0, -1.0, 0.5], 500.0, "x").unwrap();
        assert!(easr_clean(&s, &EasrConfig::default()).is_err());
    }

    #[test]
    fn saved_state_reproduces_result() {
        let s = eeg(10.0, 2);
        let cfg = EasrConfig::default();
        let a = easr_clean(&s, &cfg).unwrap();
        let state = AsrState::from_json(&a.state.to_json().unwrap()).unwrap();
        let b = easr_clean_with_state(&s, &cfg, &state).unwrap();
        assert_eq!(a.cleaned.samples(), b.cleaned.samples());
        let c = easr_clean(&s, &cfg).unwrap();
        assert_eq!(a.cleaned.samples(), c.cleaned.samples());
    }

    #[test]
    fn multichannel_identical_channels() {
        let s = eeg(20.0, 3);
        let r = asr_clean_multichannel(&[s.clone(), s.clone().with_label("y")], &AsrConfig::default()).unwrap();
        for c in &r.cleaned {
            let err = c
                .samples()
                .iter()
                .zip(s.samples())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-9, "{err}");
        }
        assert_eq!(r.cleaned[1].label(), "y");
    }

    #[test]
    fn multichannel_rejects_bad_input() {
        let a = eeg(5.0, 4);
        let b = a.slice(0.0, 4.0).unwrap();
        let cfg = AsrConfig::default();
        assert!(asr_clean_multichannel(std::slice::from_ref(&a), &cfg).is_err());
        assert!(matches!(
            asr_clean_multichannel(&[a, b], &cfg),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = EasrConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: EasrConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        let partial: EasrConfig = serde_json::from_str(r#"{"asr": {"cutoff_k": 10.0}}"#).unwrap();
        assert_eq!(partial.asr.cutoff_k, 10.0);
        assert_eq!(partial.embedding.m, 90);
    }
}
