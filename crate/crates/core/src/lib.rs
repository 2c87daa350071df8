//! Single-channel EEG artifact removal by artifact subspace reconstruction
//! (ASR) applied to a delay embedding of the channel, plus the tools needed
//! to evaluate it: semi-simulated data, spectral and blink metrics, and
//! signal file I/O.
//!
//! ```no_run
//! use easr_core::{easr_clean, EasrConfig, Signal};
//!
//! let signal = Signal::new(vec![0.0; 30_000], 500.0, "Fp1").unwrap();
//! let result = easr_clean(&signal, &EasrConfig::default()).unwrap();
//! assert_eq!(result.cleaned.len(), signal.len());
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asr;
pub mod embedding;
pub mod error;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod preprocess;
pub mod report;
pub mod semisim;
pub mod signal;
pub mod spectrum;

pub use asr::{calibrate, process, AsrConfig, AsrState, ComponentStats, ProcessOutput, WindowReport, ZScore};
pub use embedding::{diagonal_average, embed, suggest_dimension, EmbeddedMatrix, EmbeddingConfig};
pub use error::{Error, Result};
pub use io::{read_bdf, write_bdf, BdfRecording, SignalFormat};
pub use metrics::{
    band_power_ratios, correlation, count_blinks, full_report, percentage_reduction, rrmse, BandPowers, BlinkConfig,
    EvaluationReport,
};
pub use pipeline::{
    asr_clean_multichannel, easr_clean, easr_clean_with_state, CleanResult, EasrConfig, MultichannelResult,
};
pub use preprocess::{preprocess, PreprocessConfig};
pub use semisim::{build_semisim, SemiSimResult, SemiSimSpec};
pub use signal::Signal;

pub use nalgebra::{DMatrix, DVector};
