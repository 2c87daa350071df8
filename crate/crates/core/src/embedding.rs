//! Delay embedding of a single channel into a Hankel matrix and the inverse
//! anti-diagonal averaging.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::Signal;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbeddingConfig {
    /// Embedding dimension (number of delay rows).
    pub m: usize,
    /// Delay between rows in samples. Only 1 is supported.
    pub lag: usize,
    /// Lowest frequency of interest; informs [`suggest_dimension`] only.
    pub f_low_of_interest: Option<f64>,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            m: 90,
            lag: 1,
            f_low_of_interest: None,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.lag != 1 {
            return Err(Error::Config(format!("only lag 1 is supported, got {}", self.lag)));
        }
        if self.m == 0 {
            return Err(Error::Config("embedding dimension must be at least 1".into()));
        }
        if self.m > n {
            return Err(Error::Dimension(format!(
                "embedding dimension {} exceeds signal length {n}",
                self.m
            )));
        }
        Ok(())
    }
}

/// `m × (n - m + 1)` Hankel matrix of lag-1 delay vectors:
/// `data[(i, j)] = x[i + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedMatrix {
    data: DMatrix<f64>,
    fs: f64,
}

impl EmbeddedMatrix {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_data(self) -> DMatrix<f64> {
        self.data
    }

    pub fn m(&self) -> usize {
        self.data.nrows()
    }

    pub fn k_cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn lag(&self) -> usize {
        1
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    /// Length of the series the matrix was built from.
    pub fn signal_len(&self) -> usize {
        self.m() + self.k_cols() - 1
    }
}

/// Smallest `m` with `m >= fs / f_low`.
pub fn suggest_dimension(fs: f64, f_low: f64) -> Result<usize> {
    if !(f_low > 0.0) || !(fs > 0.0) {
        return Err(Error::Config(format!(
            "frequencies must be positive (fs = {fs}, f_low = {f_low})"
        )));
    }
    if f_low > fs / 2.0 {
        log::warn!("lowest frequency of interest {f_low} Hz is above Nyquist");
    }
    let ratio = fs / f_low;
    // Guard against ratios such as 50.000000000001 from decimal inputs.
    let m = if (ratio - ratio.round()).abs() < 1e-9 {
        ratio.round()
    } else {
        ratio.ceil()
    };
    Ok(m as usize)
}

pub fn embed(signal: &Signal, config: &EmbeddingConfig) -> Result<EmbeddedMatrix> {
    let x = signal.samples();
    config.validate(x.len())?;
    let m = config.m;
    if let Some(f_low) = config.f_low_of_interest {
        let suggested = suggest_dimension(signal.fs(), f_low)?;
        if m < suggested {
            log::warn!(
                "embedding dimension {m} is below {suggested}, the minimum for {f_low} Hz at {} Hz",
                signal.fs()
            );
        }
    }
    let k = x.len() - m + 1;
    // Column-major fill: column j is the contiguous slice x[j..j + m].
    let mut buf = Vec::with_capacity(m * k);
    for j in 0..k {
        buf.extend_from_slice(&x[j..j + m]);
    }
    Ok(EmbeddedMatrix {
        data: DMatrix::from_vec(m, k, buf),
        fs: signal.fs(),
    })
}

/// Averages each anti-diagonal `i + j = s` into sample `s`.
pub fn diagonal_average(matrix: &DMatrix<f64>, fs: f64) -> Result<Signal> {
    let (m, k) = matrix.shape();
    if m == 0 || k == 0 {
        return Err(Error::Dimension("cannot average an empty matrix".into()));
    }
    let n = m + k - 1;
    let mut sums = vec![0.0; n];
    for (j, col) in matrix.column_iter().enumerate() {
        for (acc, v) in sums[j..j + m].iter_mut().zip(col.iter()) {
            *acc += v;
        }
    }
    // Anti-diagonal s holds min(s + 1, m, k, n - s) entries.
    let short = m.min(k);
    for (s, acc) in sums.iter_mut().enumerate() {
        let count = (s + 1).min(short).min(n - s);
        *acc /= count as f64;
    }
    Signal::new(sums, fs, "reconstructed")
}
