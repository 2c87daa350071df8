//! Artifact subspace reconstruction.
//!
//! Calibration learns a mixing matrix (the symmetric square root of the data
//! covariance) and one RMS threshold per principal component from windows
//! whose component RMS values look typical. Processing then walks the data
//! in short non-overlapping windows, rejects window components whose
//! variance exceeds the calibrated threshold projected onto that component,
//! and rebuilds the window from the remaining subspace through the mixing
//! matrix.
//!
//! Rows of every data matrix are channels (or delay rows of an embedding);
//! columns are time.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, covariance, pinv_with_cutoff, symmetric_eigen, Eigen};

/// How a component's window RMS values are turned into z-scores when
/// picking calibration windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZScore {
    /// `(x − mean) / std` over all windows.
    Standard,
    /// `(x − median) / (1.4826 · MAD)` over all windows.
    Robust,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AsrConfig {
    pub cutoff_k: f64,
    pub calib_window_s: f64,
    pub process_window_s: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub zscore: ZScore,
}

impl Default for AsrConfig {
    fn default() -> Self {
        Self {
            cutoff_k: 17.0,
            calib_window_s: 1.0,
            process_window_s: 0.5,
            z_min: -3.5,
            z_max: 5.5,
            zscore: ZScore::Robust,
        }
    }
}

impl AsrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cutoff_k > 0.0) {
            return Err(Error::Config(format!(
                "cut-off k must be positive, got {}",
                self.cutoff_k
            )));
        }
        if !(self.calib_window_s > 0.0 && self.calib_window_s.is_finite()) {
            return Err(Error::Config("calibration window must be positive".into()));
        }
        if !(self.process_window_s > 0.0 && self.process_window_s.is_finite()) {
            return Err(Error::Config("processing window must be positive".into()));
        }
        if !(self.z_min < self.z_max) {
            return Err(Error::Config(format!(
                "z-score range ({}, {}) is empty",
                self.z_min, self.z_max
            )));
        }
        Ok(())
    }

    /// Threshold `μ + kσ` for one component. An infinite `k` disables
    /// rejection even when `σ = 0`.
    pub fn threshold(&self, mean: f64, std: f64) -> f64 {
        if self.cutoff_k.is_infinite() {
            f64::INFINITY
        } else {
            mean + self.cutoff_k * std
        }
    }
}

fn window_len(fs: f64, seconds: f64) -> usize {
    ((fs * seconds).round() as usize).max(1)
}

/// Clean-window RMS statistics of one calibration component.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub mean: f64,
    pub std: f64,
    pub threshold: f64,
}

/// Output of calibration.
#[derive(Debug, Clone, PartialEq)]
pub struct AsrState {
    mixing: DMatrix<f64>,
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
    stats: Vec<ComponentStats>,
    cutoff_k: f64,
    clean_windows: Vec<usize>,
    total_windows: usize,
}

impl AsrState {
    pub fn dim(&self) -> usize {
        self.mixing.nrows()
    }

    /// Mixing matrix `M_C` with `M_C M_Cᵀ` equal to the covariance of the
    /// selected calibration windows.
    pub fn mixing(&self) -> &DMatrix<f64> {
        &self.mixing
    }

    /// Calibration eigenvectors `V_C`, one per column, eigenvalues ascending.
    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn stats(&self) -> &[ComponentStats] {
        &self.stats
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.threshold).collect()
    }

    pub fn cutoff_k(&self) -> f64 {
        self.cutoff_k
    }

    /// Indices of the calibration windows judged clean.
    pub fn clean_windows(&self) -> &[usize] {
        &self.clean_windows
    }

    pub fn total_windows(&self) -> usize {
        self.total_windows
    }

    /// Threshold matrix `T = diag(T_i) · V_Cᵀ`.
    pub fn threshold_matrix(&self) -> DMatrix<f64> {
        let t = &self.stats;
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            let v = self.eigvecs[(j, i)];
            if v == 0.0 {
                0.0
            } else {
                t[i].threshold * v
            }
        })
    }

    /// `‖T v‖²`, the variance a window component along `v` may carry
    /// before it is rejected.
    pub fn variance_limit(&self, v: &[f64]) -> f64 {
        let v = DVector::from_column_slice(v);
        let w = self.eigvecs.tr_mul(&v);
        w.iter()
            .zip(&self.stats)
            .map(|(&wi, s)| if wi == 0.0 { 0.0 } else { (s.threshold * wi).powi(2) })
            .sum()
    }

    /// Replaces every threshold, e.g. to disable rejection with `INFINITY`.
    pub fn with_thresholds(mut self, thresholds: &[f64]) -> Result<Self> {
        if thresholds.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{} thresholds for a {}-dimensional state",
                thresholds.len(),
                self.dim()
            )));
        }
        for (s, &t) in self.stats.iter_mut().zip(thresholds) {
            s.threshold = t;
        }
        Ok(self)
    }
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// z-scores of one component's window RMS values. A zero spread yields
/// all-zero scores, so a single window is always its own calibration data.
fn zscores(values: &[f64], method: ZScore) -> Vec<f64> {
    let (center, scale) = match method {
        ZScore::Standard => mean_std(values),
        ZScore::Robust => {
            let mut buf = values.to_vec();
            let med = median(&mut buf);
            let mut dev: Vec<f64> = values.iter().map(|v| (v - med).abs()).collect();
            (med, 1.4826 * median(&mut dev))
        }
    };
    if !(scale > 0.0) {
        return vec![0.0; values.len()];
    }
    values.iter().map(|v| (v - center) / scale).collect()
}

/// Per-component RMS of `y` over consecutive non-overlapping windows of
/// `len` columns. Returns `rms[component][window]`.
fn window_rms(y: &DMatrix<f64>, len: usize) -> Vec<Vec<f64>> {
    let n_windows = y.ncols() / len;
    let mut out = vec![Vec::with_capacity(n_windows); y.nrows()];
    for w in 0..n_windows {
        let block = y.columns(w * len, len);
        for (c, row) in block.row_iter().enumerate() {
            out[c].push((row.norm_squared() / len as f64).sqrt());
        }
    }
    out
}

/// Learns the mixing matrix and per-component thresholds from `x`.
pub fn calibrate(x: &DMatrix<f64>, fs: f64, config: &AsrConfig) -> Result<AsrState> {
    config.validate()?;
    let (m, k) = x.shape();
    if m == 0 {
        return Err(Error::Dimension("calibration data has no rows".into()));
    }
    let win = window_len(fs, config.calib_window_s);
    if k < win {
        return Err(Error::Calibration(format!(
            "{k} samples is shorter than one {} s calibration window ({win} samples); provide a longer input",
            config.calib_window_s
        )));
    }

    // Window selection in the component space of the full data.
    let eig = symmetric_eigen(&covariance(x))?;
    let rms = window_rms(&eig.vectors.tr_mul(x), win);
    let total_windows = rms[0].len();
    let z: Vec<Vec<f64>> = rms.iter().map(|r| zscores(r, config.zscore)).collect();
    let clean: Vec<usize> = (0..total_windows)
        .filter(|&w| z.iter().all(|zc| zc[w] > config.z_min && zc[w] < config.z_max))
        .collect();
    if clean.is_empty() {
        return Err(Error::Calibration(format!(
            "none of {total_windows} calibration windows is clean; provide a longer input"
        )));
    }

    // Mixing matrix and thresholds from the concatenated clean windows.
    let mut calib = DMatrix::zeros(m, clean.len() * win);
    for (i, &w) in clean.iter().enumerate() {
        calib.columns_mut(i * win, win).copy_from(&x.columns(w * win, win));
    }
    let eig = symmetric_eigen(&covariance(&calib))?;
    let mixing = linalg::sqrt_from_eigen(&eig);
    let Eigen { values, vectors } = eig;
    let rms = window_rms(&vectors.tr_mul(&calib), win);
    let stats = rms
        .iter()
        .map(|r| {
            let (mean, std) = mean_std(r);
            ComponentStats {
                mean,
                std,
                threshold: config.threshold(mean, std),
            }
        })
        .collect();
    log::debug!(
        "calibration: {}/{total_windows} clean windows of {win} samples",
        clean.len()
    );

    Ok(AsrState {
        mixing,
        eigvecs: vectors,
        eigvals: values,
        stats,
        cutoff_k: config.cutoff_k,
        clean_windows: clean,
        total_windows,
    })
}

/// Rejection outcome for one processing window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowReport {
    /// First column of the window.
    pub start: usize,
    pub len: usize,
    /// Rejected window components, indexed in ascending-eigenvalue order.
    pub rejected: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessOutput {
    pub clean: DMatrix<f64>,
    pub windows: Vec<WindowReport>,
}

impl ProcessOutput {
    pub fn total_rejected(&self) -> usize {
        self.windows.iter().map(|w| w.rejected.len()).sum()
    }
}

/// Eigendecomposition of a window's covariance and the components whose
/// variance exceeds the state's limit. `None` for zero-variance windows.
///
/// Variances at or below the calibration's eigenvalue clamp
/// (`1e-12 · max` calibration eigenvalue) are round-off and never rejected.
pub fn window_decision(state: &AsrState, window: &DMatrix<f64>) -> Result<Option<(Eigen, Vec<usize>)>> {
    let cov = covariance(window);
    if cov.trace() <= 0.0 {
        return Ok(None);
    }
    let eig = symmetric_eigen(&cov)?;
    let floor = linalg::EIG_CLAMP_REL * state.eigvals.max().max(0.0);
    let rejected = (0..eig.values.len())
        .filter(|&j| {
            let d = eig.values[j];
            d > floor && d > state.variance_limit(eig.vectors.column(j).as_slice())
        })
        .collect();
    Ok(Some((eig, rejected)))
}

/// Relative singular-value cutoff of the pseudoinverse in the
/// reconstruction. `V_Tᵀ M_C` has singular values on the square-root scale
/// of the calibration eigenvalues, which are clamped at `1e-12 · max`, so
/// the matching cutoff is `sqrt(1e-12)`.
pub const RECONSTRUCTION_CUTOFF: f64 = 1e-6;

/// `M_C · (V_Tᵀ M_C)⁺_trunc · V_Tᵀ`, where the rows of `V_Tᵀ M_C` that
/// belong to rejected components are zeroed before the pseudoinverse.
pub fn reconstruction_operator(state: &AsrState, window_eigvecs: &DMatrix<f64>, rejected: &[usize]) -> DMatrix<f64> {
    let mut projected = window_eigvecs.tr_mul(&state.mixing);
    for &j in rejected {
        projected.row_mut(j).fill(0.0);
    }
    &state.mixing * pinv_with_cutoff(&projected, RECONSTRUCTION_CUTOFF) * window_eigvecs.transpose()
}

/// Cleans `x` window by window. Windows are `process_window_s` long; a
/// trailing remainder of at least two columns is its own window, a single
/// leftover column passes through unchanged.
pub fn process(x: &DMatrix<f64>, state: &AsrState, fs: f64, config: &AsrConfig) -> Result<ProcessOutput> {
    config.validate()?;
    let (m, k) = x.shape();
    if m != state.dim() {
        return Err(Error::Dimension(format!(
            "data has {m} rows but the calibration state has dimension {}",
            state.dim()
        )));
    }
    let win = window_len(fs, config.process_window_s);
    let mut clean = x.clone();
    let mut windows = Vec::with_capacity(k.div_ceil(win));
    let mut start = 0;
    while start < k {
        let len = win.min(k - start);
        if len < 2 {
            windows.push(WindowReport {
                start,
                len,
                rejected: Vec::new(),
            });
            break;
        }
        let block = x.columns(start, len).into_owned();
        let rejected = match window_decision(state, &block)? {
            Some((eig, rejected)) if !rejected.is_empty() => {
                let op = reconstruction_operator(state, &eig.vectors, &rejected);
                clean.columns_mut(start, len).copy_from(&(op * &block));
                rejected
            }
            _ => Vec::new(),
        };
        windows.push(WindowReport { start, len, rejected });
        start += len;
    }
    Ok(ProcessOutput { clean, windows })
}

const STATE_FORMAT: &str = "easr-asr-state";
const STATE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    rows: usize,
    cols: usize,
    /// Row-major.
    data: Vec<f64>,
}

impl MatrixDoc {
    fn from_matrix(a: &DMatrix<f64>) -> Self {
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            data: a.transpose().as_slice().to_vec(),
        }
    }

    fn into_matrix(self, name: &str) -> Result<DMatrix<f64>> {
        if self.data.len() != self.rows * self.cols {
            return Err(Error::Format(format!(
                "state matrix `{name}` holds {} values for {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.data))
    }
}

#[derive(Serialize, Deserialize)]
struct StateDoc {
    format: String,
    version: u32,
    cutoff_k: f64,
    total_windows: usize,
    clean_windows: Vec<usize>,
    mixing: MatrixDoc,
    eigvecs: MatrixDoc,
    eigvals: Vec<f64>,
    components: Vec<ComponentStats>,
}

impl AsrState {
    /// Versioned JSON document; matrices stored row-major.
    pub fn to_json(&self) -> Result<String> {
        let finite = self.stats.iter().all(|s| s.threshold.is_finite()) && self.cutoff_k.is_finite();
        if !finite {
            return Err(Error::Numeric(
                "cannot serialize a state with infinite thresholds".into(),
            ));
        }
        let doc = StateDoc {
            format: STATE_FORMAT.into(),
            version: STATE_VERSION,
            cutoff_k: self.cutoff_k,
            total_windows: self.total_windows,
            clean_windows: self.clean_windows.clone(),
            mixing: MatrixDoc::from_matrix(&self.mixing),
            eigvecs: MatrixDoc::from_matrix(&self.eigvecs),
            eigvals: self.eigvals.as_slice().to_vec(),
            components: self.stats.clone(),
        };
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StateDoc = serde_json::from_str(text).map_err(|e| Error::Format(format!("ASR state: {e}")))?;
        if doc.format != STATE_FORMAT || doc.version != STATE_VERSION {
            return Err(Error::Format(format!(
                "unsupported ASR state document {} v{}",
                doc.format, doc.version
            )));
        }
        let mixing = doc.mixing.into_matrix("mixing")?;
        let eigvecs = doc.eigvecs.into_matrix("eigvecs")?;
        let m = mixing.nrows();
        if !mixing.is_square() || eigvecs.shape() != (m, m) || doc.eigvals.len() != m || doc.components.len() != m {
            return Err(Error::Format("ASR state dimensions are inconsistent".into()));
        }
        Ok(Self {
            mixing,
            eigvecs,
            eigvals: DVector::from_vec(doc.eigvals),
            stats: doc.components,
            cutoff_k: doc.cutoff_k,
            clean_windows: doc.clean_windows,
            total_windows: doc.total_windows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    const FS: f64 = 100.0;

    fn noise(m: usize, k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DMatrix::from_fn(m, k, |_, _| StandardNormal.sample(&mut rng))
    }

    /// Low-rank mixed noise so window components differ clearly in variance.
    fn mixed_noise(m: usize, k: usize, seed: u64) -> DMatrix<f64> {
        let mix = noise(m, m, seed ^ 0xabc);
        mix * noise(m, k, seed)
    }

    #[test]
    fn white_noise_thresholds() {
        let x = noise(4, 6000, 1);
        let cfg = AsrConfig::default();
        let state = calibrate(&x, FS, &cfg).unwrap();
        assert_eq!(state.total_windows(), 60);

        // Oracle: recompute window RMS of each component directly.
        let y = state.eigvecs().transpose() * &x;
        for (c, s) in state.stats().iter().enumerate() {
            let rms: Vec<f64> = state
                .clean_windows()
                .iter()
                .map(|&w| {
                    let seg = y.row(c).columns(w * 100, 100).into_owned();
                    (seg.iter().map(|v| v * v).sum::<f64>() / 100.0).sqrt()
                })
                .collect();
            let mean = rms.iter().sum::<f64>() / rms.len() as f64;
            let var = rms.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (rms.len() - 1) as f64;
            assert!((s.mean - mean).abs() < 1e-12);
            assert!((s.std - var.sqrt()).abs() < 1e-12);
            assert!(s.threshold >= s.mean + 16.0 * s.std && s.threshold <= s.mean + 18.0 * s.std);
            assert!((s.mean - 1.0).abs() < 0.1, "component {c}: mean RMS {}", s.mean);
        }
    }

    #[test]
    fn threshold_substitution() {
        let cfg = AsrConfig::default();
        assert_eq!(cfg.threshold(0.0, 1.0), 17.0);
        let inf = AsrConfig {
            cutoff_k: f64::INFINITY,
            ..cfg
        };
        assert_eq!(inf.threshold(2.0, 0.0), f64::INFINITY);
    }

    #[test]
    fn single_window_is_its_own_calibration() {
        let x = noise(3, 100, 2);
        for z in [ZScore::Standard, ZScore::Robust] {
            let cfg = AsrConfig {
                zscore: z,
                ..Default::default()
            };
            let state = calibrate(&x, FS, &cfg).unwrap();
            assert_eq!(state.clean_windows(), &[0]);
            assert!(state.stats().iter().all(|s| s.std == 0.0));
        }
    }

    #[test]
    fn too_short_input_errors() {
        let x = noise(3, 99, 2);
        assert!(matches!(
            calibrate(&x, FS, &AsrConfig::default()),
            Err(Error::Calibration(_))
        ));
    }

    #[test]
    fn mixing_squares_to_covariance() {
        let x = mixed_noise(6, 3000, 3);
        let state = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        let cov = covariance(&x);
        let mc = state.mixing();
        assert!((mc * mc.transpose() - &cov).norm() / cov.norm() < 1e-8);
        let t = state.threshold_matrix();
        let want = DMatrix::from_diagonal(&DVector::from_vec(state.thresholds())) * state.eigvecs().transpose();
        assert!((t - want).amax() < 1e-12);
    }

    #[test]
    fn rank_deficient_calibration_is_accepted() {
        let base = noise(2, 2000, 4);
        let lift = noise(5, 2, 5);
        let x = lift * base;
        let state = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        assert_eq!(state.dim(), 5);
        assert!(state.mixing().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn infinite_thresholds_pass_everything_through() {
        let mut x = mixed_noise(5, 2000, 6);
        x.columns_mut(700, 50).scale_mut(30.0);
        let cfg = AsrConfig {
            cutoff_k: f64::INFINITY,
            ..Default::default()
        };
        let state = calibrate(&x, FS, &cfg).unwrap();
        let out = process(&x, &state, FS, &cfg).unwrap();
        assert_eq!(out.total_rejected(), 0);
        assert!((&out.clean - &x).amax() <= 1e-9 * x.amax());
    }

    #[test]
    fn burst_window_is_rejected() {
        let x0 = mixed_noise(5, 3000, 7);
        let cfg = AsrConfig::default();
        let state = calibrate(&x0, FS, &cfg).unwrap();
        let mut x = x0.clone();
        // Window 13 spans columns 650..700.
        x.columns_mut(650, 50).scale_mut(10.0);
        let out = process(&x, &state, FS, &cfg).unwrap();
        for w in &out.windows {
            // Oracle: compare every window eigenvalue with ‖T v‖² computed from
            // the threshold matrix itself.
            let block = x.columns(w.start, w.len).into_owned();
            let eig = symmetric_eigen(&covariance(&block)).unwrap();
            let t = state.threshold_matrix();
            let expected: Vec<usize> = (0..5)
                .filter(|&j| eig.values[j] > (&t * eig.vectors.column(j)).norm_squared())
                .collect();
            assert_eq!(w.rejected, expected);
            if w.start == 650 {
                assert!(!w.rejected.is_empty());
            } else {
                assert!(w.rejected.is_empty(), "window at {} rejected {:?}", w.start, w.rejected);
            }
        }
    }

    #[test]
    fn reconstruction_rank_and_idempotence() {
        let x0 = mixed_noise(6, 3000, 8);
        let cfg = AsrConfig::default();
        let state = calibrate(&x0, FS, &cfg).unwrap();
        let mut x = x0.clone();
        x.columns_mut(1000, 50).scale_mut(12.0);
        let block = x.columns(1000, 50).into_owned();
        let (eig, rejected) = window_decision(&state, &block).unwrap().unwrap();
        assert!(!rejected.is_empty());
        let op = reconstruction_operator(&state, &eig.vectors, &rejected);
        let cleaned = &op * &block;
        assert!(numerical_rank(&cleaned, 1e-10) <= 6 - rejected.len());
        let twice = &op * &cleaned;
        assert!((&twice - &cleaned).amax() <= 1e-8 * cleaned.amax().max(1.0));
        let op2 = &op * &op;
        assert!((&op2 - &op).amax() <= 1e-8 * op.amax().max(1.0));
    }

    #[test]
    fn no_truncation_operator_is_identity() {
        let x = mixed_noise(4, 1000, 9);
        let state = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        let eig = symmetric_eigen(&covariance(&x.columns(0, 50).into_owned())).unwrap();
        let op = reconstruction_operator(&state, &eig.vectors, &[]);
        assert!((op - DMatrix::<f64>::identity(4, 4)).amax() < 1e-9);
    }

    #[test]
    fn rejections_do_not_grow_with_k() {
        let mut x = mixed_noise(5, 4000, 10);
        for s in [500, 1700, 3100] {
            x.columns_mut(s, 40).scale_mut(8.0);
        }
        let mut last = usize::MAX;
        for k in [2.0, 5.0, 10.0, 17.0, 30.0] {
            let cfg = AsrConfig {
                cutoff_k: k,
                ..Default::default()
            };
            let state = calibrate(&x, FS, &cfg).unwrap();
            let n = process(&x, &state, FS, &cfg).unwrap().total_rejected();
            assert!(n <= last, "k = {k}: {n} > {last}");
            last = n;
        }
    }

    #[test]
    fn window_partition_and_remainder() {
        let x = mixed_noise(3, 1000 + 51, 11);
        let cfg = AsrConfig::default();
        let state = calibrate(&x, FS, &cfg).unwrap();
        let out = process(&x, &state, FS, &cfg).unwrap();
        let lens: Vec<usize> = out.windows.iter().map(|w| w.len).collect();
        assert_eq!(lens.len(), 22);
        assert_eq!(*lens.last().unwrap(), 1);
        assert_eq!(lens.iter().sum::<usize>(), 1051);

        let x = mixed_noise(3, 1002, 11);
        let out = process(&x, &state, FS, &cfg).unwrap();
        assert_eq!(out.windows.last().unwrap().len, 2);
    }

    #[test]
    fn zero_variance_window_passes() {
        let mut x = mixed_noise(3, 1000, 12);
        x.columns_mut(100, 50).fill(3.0);
        let state = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        let out = process(&x, &state, FS, &AsrConfig::default()).unwrap();
        assert_eq!(out.clean.columns(100, 50), x.columns(100, 50));
    }

    #[test]
    fn dimension_mismatch_errors() {
        let state = calibrate(&noise(3, 500, 1), FS, &AsrConfig::default()).unwrap();
        let err = process(&noise(4, 500, 1), &state, FS, &AsrConfig::default());
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn calibration_is_deterministic_and_serializable() {
        let x = mixed_noise(5, 2000, 13);
        let a = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        let b = calibrate(&x, FS, &AsrConfig::default()).unwrap();
        assert_eq!(a, b);
        let back = AsrState::from_json(&a.to_json().unwrap()).unwrap();
        assert_eq!(back, a);
        assert!(AsrState::from_json("{\"format\":\"x\"}").is_err());
    }
}
