//! Shared fixtures for the benchmarks.

use easr_core::{build_semisim, embed, preprocess, DMatrix, EasrConfig, SemiSimSpec, Signal};

pub const FS: f64 = 500.0;

/// The default contaminated channel, already preprocessed.
pub fn contaminated() -> Signal {
    let sim = build_semisim(&SemiSimSpec::synthetic(FS, 0).expect("default spec")).expect("dataset");
    preprocess(&sim.contaminated, &EasrConfig::default().preprocess).expect("preprocess")
}

/// Embedded form of [`contaminated`] with the default dimension.
pub fn embedded() -> DMatrix<f64> {
    embed(&contaminated(), &EasrConfig::default().embedding)
        .expect("embed")
        .into_data()
}
