//! Time-frequency distributions and spectral densities.
//!
//! The discrete Wigner-Ville distribution of a length-n signal is evaluated
//! on n frequency bins over [-fs/2, fs/2):
//!
//! ```text
//! W_x(t, f) = (1/fs) * sum_tau x[t+tau] * conj(x[t-tau]) * exp(-j 4 pi f tau / fs)
//! ```
//!
//! For the grid frequency `f_m = -fs/2 + m fs/n` the kernel phase reduces to
//! `exp(-j 2 pi m (2 tau) / n)`, so each time slice is the n-point DFT of the
//! lag product accumulated at index `2 tau mod n`. The 1/fs scale makes the
//! frequency marginal exact: `sum_f W_x(t, f) df = |x[t]|^2` for every slice
//! (only the tau = 0 lag survives the bin sum), and the energy identity
//! `sum_{t,f} W df dt = ||x||^2 dt` follows.
//!
//! Because the lag products only populate even DFT indices, the discrete WD
//! is exactly fs/2-periodic in frequency: every feature at `f` repeats at
//! `f - fs/2`. Analytic-signal preprocessing keeps the meaningful content in
//! the nonnegative half-band; [`TFDist::ridge`] therefore scans that half.
//!
//! Lag windows shrink toward the signal edges (zero padding). A circular lag
//! mode is available for exact time-shift covariance tests.
//!
//! Mixture rule: some derivations quote the WD of a sum with a minus on the
//! cross term. Expanding the quadratic kernel gives
//! `W_{x1+x2} = W_{x1} + W_{x2} + 2 Re W_{x1x2}`, and [`mixture_wd_check`]
//! measures exactly that identity; the subtractive variant does not close.

use crate::error::{Error, Result};
use crate::fft::{dft, plan_forward};
use crate::rng::subseed;
use crate::signal::{Signal, SourceModel};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance for grid uniformity and symmetry validation.
const GRID_TOL: f64 = 1e-9;

/// Two-sided power spectral density on a uniform frequency grid.
///
/// The grid must be uniformly spaced, contain zero, and be centered: either
/// fully symmetric about 0 or DFT-style with the single Nyquist node on the
/// negative side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralDensityJson", into = "SpectralDensityJson")]
pub struct SpectralDensity {
    freqs: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpectralDensityJson {
    freqs: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<SpectralDensityJson> for SpectralDensity {
    type Error = Error;
    fn try_from(j: SpectralDensityJson) -> Result<Self> {
        SpectralDensity::new(j.freqs, j.values)
    }
}

impl From<SpectralDensity> for SpectralDensityJson {
    fn from(s: SpectralDensity) -> Self {
        SpectralDensityJson {
            freqs: s.freqs,
            values: s.values,
        }
    }
}

impl SpectralDensity {
    /// Validates the grid (uniform, contains 0, centered about 0 up to the
    /// one-sided Nyquist endpoint) and the values (finite, >= 0).
    pub fn new(freqs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if freqs.len() < 2 || freqs.len() != values.len() {
            return Err(Error::construction(format!(
                "spectral density needs matching grids of >= 2 points, got {}/{}",
                freqs.len(),
                values.len()
            )));
        }
        let step = freqs[1] - freqs[0];
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::construction("frequency grid must increase"));
        }
        for w in freqs.windows(2) {
            if ((w[1] - w[0]) - step).abs() > GRID_TOL * step {
                return Err(Error::construction("frequency grid must be uniform"));
            }
        }
        let tol = GRID_TOL * step;
        if !freqs.iter().any(|&f| f.abs() <= tol) {
            return Err(Error::construction("frequency grid must contain 0"));
        }
        let lo = freqs[0];
        let hi = freqs[freqs.len() - 1];
        if (lo + hi).abs() > tol && (lo + hi + step).abs() > tol {
            return Err(Error::construction(
                "frequency grid must be symmetric about 0 (optionally with a negative-side Nyquist node)",
            ));
        }
        // Rounding in estimators can leave values a hair below zero; clamp
        // within -1e-12, reject anything more negative.
        let mut values = values;
        for v in values.iter_mut() {
            if !v.is_finite() || *v < -1e-12 {
                return Err(Error::construction(
                    "spectral density values must be finite and >= -1e-12",
                ));
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        Ok(SpectralDensity { freqs, values })
    }

    /// Flat density of the given level over `[-band, band]`, sampled with
    /// `step` spacing on a DFT-style grid covering `[-f_max, f_max)`.
    pub fn flat_band(level: f64, band: f64, f_max: f64, step: f64) -> Result<Self> {
        if !(level.is_finite() && level >= 0.0) {
            return Err(Error::construction("level must be finite and >= 0"));
        }
        let n = (2.0 * f_max / step).round() as usize;
        if n < 2 {
            return Err(Error::construction("grid too coarse"));
        }
        let freqs: Vec<f64> = (0..n).map(|i| -f_max + i as f64 * step).collect();
        let values = freqs
            .iter()
            .map(|&f| {
                if f.abs() <= band + GRID_TOL * step {
                    level
                } else {
                    0.0
                }
            })
            .collect();
        SpectralDensity::new(freqs, values)
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Grid spacing in Hz.
    pub fn df(&self) -> f64 {
        self.freqs[1] - self.freqs[0]
    }

    /// Linear interpolation on the grid; zero outside it.
    pub fn sample_at(&self, f: f64) -> f64 {
        sample_uniform(self.freqs[0], self.df(), &self.values, f)
    }

    /// Riemann sum `sum values * df`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.df()
    }

    /// Elementwise sum on an identical grid.
    pub fn add(&self, other: &SpectralDensity) -> Result<SpectralDensity> {
        if self.freqs != other.freqs {
            return Err(Error::shape("spectral density grids differ"));
        }
        SpectralDensity::new(
            self.freqs.clone(),
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Serializes to CSV with a `freq,value` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq,value\n");
        for (f, v) in self.freqs.iter().zip(&self.values) {
            out.push_str(&format!("{f},{v}\n"));
        }
        out
    }

    /// Parses the CSV format written by [`SpectralDensity::to_csv`].
    pub fn from_csv(text: &str) -> Result<SpectralDensity> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or("");
        if header.trim() != "freq,value" {
            return Err(Error::parse(format!("unexpected psd csv header: {header}")));
        }
        let mut freqs = Vec::new();
        let mut values = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let f = cols
                .next()
                .ok_or_else(|| Error::parse("psd csv: missing freq"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(format!("psd csv: {e}")))?;
            let v = cols
                .next()
                .ok_or_else(|| Error::parse("psd csv: missing value"))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::parse(format!("psd csv: {e}")))?;
            freqs.push(f);
            values.push(v);
        }
        SpectralDensity::new(freqs, values)
    }

    /// Serializes to a JSON object with `freqs` and `values` arrays.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("psd json serialization")
    }

    pub fn from_json(text: &str) -> Result<SpectralDensity> {
        serde_json::from_str(text).map_err(|e| Error::parse(format!("psd json: {e}")))
    }
}

/// Distinguishes self-distributions (real up to rounding) from cross
/// distributions (complex) and conditional ratios on a folded band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TfKind {
    Auto,
    Cross,
    Conditional,
}

/// Lag window convention at the signal edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LagMode {
    /// Lags are truncated to the available samples (default).
    ZeroPadded,
    /// Lags wrap modulo the signal length; time shifts are exactly
    /// covariant in this mode.
    Circular,
}

/// Dense time-frequency grid with uniform axes; values are stored complex
/// so auto and cross distributions share one container.
#[derive(Clone, Debug, PartialEq)]
pub struct TFDist {
    kind: TfKind,
    time_axis: Vec<f64>,
    freq_axis: Vec<f64>,
    values: Vec<Complex64>,
}

impl TFDist {
    /// Validates axis uniformity and the value count (`nt * nf`, row-major
    /// over time).
    pub fn new(
        kind: TfKind,
        time_axis: Vec<f64>,
        freq_axis: Vec<f64>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        for (name, axis) in [("time", &time_axis), ("freq", &freq_axis)] {
            if axis.len() < 2 {
                return Err(Error::construction(format!(
                    "{name} axis needs >= 2 points"
                )));
            }
            let step = axis[1] - axis[0];
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::construction(format!(
                    "{name} axis must be strictly increasing"
                )));
            }
            for w in axis.windows(2) {
                if ((w[1] - w[0]) - step).abs() > GRID_TOL * step {
                    return Err(Error::construction(format!(
                        "{name} axis must be uniformly spaced"
                    )));
                }
            }
        }
        if values.len() != time_axis.len() * freq_axis.len() {
            return Err(Error::construction(format!(
                "value count {} does not match {} x {} grid",
                values.len(),
                time_axis.len(),
                freq_axis.len()
            )));
        }
        Ok(TFDist {
            kind,
            time_axis,
            freq_axis,
            values,
        })
    }

    pub fn kind(&self) -> TfKind {
        self.kind
    }

    pub fn time_axis(&self) -> &[f64] {
        &self.time_axis
    }

    pub fn freq_axis(&self) -> &[f64] {
        &self.freq_axis
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nt(&self) -> usize {
        self.time_axis.len()
    }

    pub fn nf(&self) -> usize {
        self.freq_axis.len()
    }

    pub fn dt(&self) -> f64 {
        self.time_axis[1] - self.time_axis[0]
    }

    pub fn df(&self) -> f64 {
        self.freq_axis[1] - self.freq_axis[0]
    }

    pub fn value(&self, t: usize, f: usize) -> Complex64 {
        self.values[t * self.nf() + f]
    }

    /// One time slice as a frequency row.
    pub fn row(&self, t: usize) -> &[Complex64] {
        &self.values[t * self.nf()..(t + 1) * self.nf()]
    }

    /// Largest value magnitude over the grid.
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest imaginary magnitude over the grid; small relative to
    /// [`TFDist::max_abs`] for `Auto` distributions.
    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// `sum values * dt * df` over the full grid.
    pub fn integrate(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() * self.dt() * self.df()
    }

    /// Elementwise complex conjugate.
    pub fn conj(&self) -> TFDist {
        TFDist {
            kind: self.kind,
            time_axis: self.time_axis.clone(),
            freq_axis: self.freq_axis.clone(),
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    /// Frequency reflection `f -> -f` on the periodic DFT grid: bin m maps
    /// to bin `(nf - m) mod nf`. Valid for full-band grids covering
    /// [-fs/2, fs/2).
    pub fn reflect_freq(&self) -> TFDist {
        let nf = self.nf();
        let mut values = Vec::with_capacity(self.values.len());
        for t in 0..self.nt() {
            let row = self.row(t);
            for m in 0..nf {
                values.push(row[(nf - m) % nf]);
            }
        }
        TFDist {
            kind: self.kind,
            time_axis: self.time_axis.clone(),
            freq_axis: self.freq_axis.clone(),
            values,
        }
    }

    /// Per-slice argmax of the real part over the nonnegative-frequency
    /// half-band, returned as frequencies. The discrete WD is fs/2-periodic,
    /// so for analytic inputs the nonnegative half carries the content.
    pub fn ridge(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nt());
        for t in 0..self.nt() {
            let row = self.row(t);
            let mut best = None;
            for (m, &f) in self.freq_axis.iter().enumerate() {
                if f < 0.0 {
                    continue;
                }
                let v = row[m].re;
                if best.is_none_or(|(bv, _)| v > bv) {
                    best = Some((v, f));
                }
            }
            out.push(best.expect("nonempty nonnegative half-band").1);
        }
        out
    }

    /// Serializes to dense CSV with a `time,freq,re,im` header, row-major
    /// over time.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,freq,re,im\n");
        for (t, &tv) in self.time_axis.iter().enumerate() {
            let row = self.row(t);
            for (&fv, v) in self.freq_axis.iter().zip(row) {
                out.push_str(&format!("{tv},{fv},{},{}\n", v.re, v.im));
            }
        }
        out
    }

    /// Serializes to a JSON envelope with axes and nested `re`/`im` rows.
    pub fn to_json(&self) -> String {
        let nf = self.nf();
        let doc = TfDistJson {
            kind: self.kind,
            time_axis: self.time_axis.clone(),
            freq_axis: self.freq_axis.clone(),
            re: (0..self.nt())
                .map(|t| {
                    self.values[t * nf..(t + 1) * nf]
                        .iter()
                        .map(|v| v.re)
                        .collect()
                })
                .collect(),
            im: (0..self.nt())
                .map(|t| {
                    self.values[t * nf..(t + 1) * nf]
                        .iter()
                        .map(|v| v.im)
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("tfdist json serialization")
    }

    /// Parses the JSON envelope written by [`TFDist::to_json`].
    pub fn from_json(text: &str) -> Result<TFDist> {
        let doc: TfDistJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("tfdist json: {e}")))?;
        let nf = doc.freq_axis.len();
        let nt = doc.time_axis.len();
        if doc.re.len() != nt || doc.im.len() != nt {
            return Err(Error::parse("tfdist json: row count mismatch"));
        }
        let mut values = Vec::with_capacity(nt * nf);
        for (re_row, im_row) in doc.re.iter().zip(&doc.im) {
            if re_row.len() != nf || im_row.len() != nf {
                return Err(Error::parse("tfdist json: column count mismatch"));
            }
            for (&re, &im) in re_row.iter().zip(im_row) {
                values.push(Complex64::new(re, im));
            }
        }
        TFDist::new(doc.kind, doc.time_axis, doc.freq_axis, values)
    }
}

#[derive(Serialize, Deserialize)]
struct TfDistJson {
    kind: TfKind,
    time_axis: Vec<f64>,
    freq_axis: Vec<f64>,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Linear interpolation of `values` on the uniform grid starting at `f0`
/// with spacing `step`; zero outside the grid.
pub(crate) fn sample_uniform(f0: f64, step: f64, values: &[f64], f: f64) -> f64 {
    let pos = (f - f0) / step;
    if pos < -GRID_TOL || pos > (values.len() - 1) as f64 + GRID_TOL {
        return 0.0;
    }
    let i = pos.floor().clamp(0.0, (values.len() - 1) as f64) as usize;
    let frac = pos - i as f64;
    if frac.abs() <= GRID_TOL || i + 1 == values.len() {
        values[i]
    } else {
        (1.0 - frac) * values[i] + frac * values[i + 1]
    }
}

/// Centered frequency axis of `n` bins over [-fs/2, fs/2).
pub(crate) fn centered_freq_axis(n: usize, sample_rate: f64) -> Vec<f64> {
    let df = sample_rate / n as f64;
    (0..n).map(|m| -sample_rate / 2.0 + m as f64 * df).collect()
}

/// Accumulates the lag kernel of slice `t` into `out` (length n), indexed by
/// `2 tau mod n`.
fn lag_kernel(a: &[Complex64], b: &[Complex64], t: usize, mode: LagMode, out: &mut [Complex64]) {
    let n = a.len();
    for v in out.iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    match mode {
        LagMode::ZeroPadded => {
            let tmax = t.min(n - 1 - t);
            out[0] = a[t] * b[t].conj();
            for tau in 1..=tmax {
                let k = (2 * tau) % n;
                out[k] += a[t + tau] * b[t - tau].conj();
                out[(n - k) % n] += a[t - tau] * b[t + tau].conj();
            }
        }
        LagMode::Circular => {
            for tau in 0..n {
                let k = (2 * tau) % n;
                out[k] += a[(t + tau) % n] * b[(t + n - tau) % n].conj();
            }
        }
    }
}

fn wigner_pair(x1: &Signal, x2: &Signal, kind: TfKind, mode: LagMode) -> TFDist {
    let n = x1.len();
    let fs = x1.sample_rate();
    let plan = plan_forward(n);
    let scale = 1.0 / fs;
    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|t| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n];
            lag_kernel(x1.samples(), x2.samples(), t, mode, &mut buf);
            plan.process(&mut buf);
            for v in buf.iter_mut() {
                *v *= scale;
            }
            buf
        })
        .collect();
    let values = rows.into_iter().flatten().collect();
    TFDist::new(kind, x1.times(), centered_freq_axis(n, fs), values)
        .expect("wigner grid is valid by construction")
}

/// Discrete Wigner-Ville distribution with edge-truncated lags.
pub fn wigner(x: &Signal) -> TFDist {
    wigner_with(x, LagMode::ZeroPadded)
}

/// Discrete Wigner-Ville distribution with an explicit lag mode.
pub fn wigner_with(x: &Signal, mode: LagMode) -> TFDist {
    wigner_pair(x, x, TfKind::Auto, mode)
}

/// Cross Wigner-Ville distribution of two signals on one grid. Satisfies
/// `cross_wigner(x2, x1) == conj(cross_wigner(x1, x2))`.
pub fn cross_wigner(x1: &Signal, x2: &Signal) -> Result<TFDist> {
    cross_wigner_with(x1, x2, LagMode::ZeroPadded)
}

/// Cross WD with an explicit lag mode.
pub fn cross_wigner_with(x1: &Signal, x2: &Signal, mode: LagMode) -> Result<TFDist> {
    x1.check_same_grid(x2)?;
    Ok(wigner_pair(x1, x2, TfKind::Cross, mode))
}

/// Quadratic superposition residual: max_abs of
/// `W_{x1+x2} - W_{x1} - W_{x2} - 2 Re W_{x1x2}` over the grid. Zero in
/// exact arithmetic; bounded by 1e-9 of the mixture scale in floating point.
pub fn mixture_wd_check(x1: &Signal, x2: &Signal) -> Result<f64> {
    let sum = x1.add(x2)?;
    let w_sum = wigner(&sum);
    let w1 = wigner(x1);
    let w2 = wigner(x2);
    let c12 = cross_wigner(x1, x2)?;
    let mut residual = 0.0f64;
    for (((s, a), b), c) in w_sum
        .values()
        .iter()
        .zip(w1.values())
        .zip(w2.values())
        .zip(c12.values())
    {
        let d = s - a - b - (c + c.conj());
        residual = residual.max(d.norm());
    }
    Ok(residual)
}

/// Wigner-Ville spectrum: the ensemble average of [`wigner`] over
/// `n_realizations` independent realizations of `model`, with realization
/// streams derived from `seed`. Deterministic models collapse to a single
/// evaluation. Realizations are summed in fixed groups so the result is
/// byte-identical for any thread count.
pub fn wv_spectrum(
    model: &SourceModel,
    n: usize,
    sample_rate: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<TFDist> {
    if n_realizations == 0 {
        return Err(Error::construction("n_realizations must be >= 1"));
    }
    if !model.is_stochastic() {
        return Ok(wigner(&model.realize(n, sample_rate, subseed(seed, 0))?));
    }
    let n_groups = n_realizations.min(32);
    let group_sums: Vec<Result<Vec<Complex64>>> = (0..n_groups)
        .into_par_iter()
        .map(|g| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n * n];
            let mut r = g;
            while r < n_realizations {
                let x = model.realize(n, sample_rate, subseed(seed, r as u64))?;
                let w = wigner(&x);
                for (a, v) in acc.iter_mut().zip(w.values()) {
                    *a += v;
                }
                r += n_groups;
            }
            Ok(acc)
        })
        .collect();
    let mut mean = vec![Complex64::new(0.0, 0.0); n * n];
    for gs in group_sums {
        for (m, v) in mean.iter_mut().zip(gs?) {
            *m += v;
        }
    }
    let inv = 1.0 / n_realizations as f64;
    for v in mean.iter_mut() {
        *v *= inv;
    }
    let template = model.realize(n, sample_rate, subseed(seed, 0))?;
    TFDist::new(
        TfKind::Auto,
        template.times(),
        centered_freq_axis(n, sample_rate),
        mean,
    )
}

/// Periodogram estimate of the power spectral density on the centered grid:
/// `S[f_m] = |X[m]|^2 / (n * fs)`. Satisfies `sum S df = mean power`.
pub fn psd(x: &Signal) -> Result<SpectralDensity> {
    let n = x.len();
    let fs = x.sample_rate();
    let mut spec: Vec<Complex64> = x.samples().to_vec();
    dft(&mut spec);
    let scale = 1.0 / (n as f64 * fs);
    let values: Vec<f64> = (0..n)
        .map(|m| spec[(m + n / 2) % n].norm_sqr() * scale)
        .collect();
    SpectralDensity::new(centered_freq_axis(n, fs), values)
}

/// Ensemble-averaged periodogram: the mean of [`psd`] over `n_realizations`
/// draws of `model`. The periodogram of the spectral-shaping synthesis is
/// unbiased at every grid bin, so this converges to the model's target
/// density without window smearing; realizations are summed in fixed groups
/// for thread-count-independent results.
pub fn psd_welch(
    model: &SourceModel,
    n: usize,
    sample_rate: f64,
    n_realizations: usize,
    seed: u64,
) -> Result<SpectralDensity> {
    if n_realizations == 0 {
        return Err(Error::construction("n_realizations must be >= 1"));
    }
    let n_groups = n_realizations.min(32);
    let group_sums: Vec<Result<Vec<f64>>> = (0..n_groups)
        .into_par_iter()
        .map(|g| {
            let mut acc = vec![0.0; n];
            let mut r = g;
            while r < n_realizations {
                let x = model.realize(n, sample_rate, subseed(seed, r as u64))?;
                let p = psd(&x)?;
                for (a, v) in acc.iter_mut().zip(p.values()) {
                    *a += v;
                }
                r += n_groups;
            }
            Ok(acc)
        })
        .collect();
    let mut mean = vec![0.0; n];
    for gs in group_sums {
        for (m, v) in mean.iter_mut().zip(gs?) {
            *m += v;
        }
    }
    let inv = 1.0 / n_realizations as f64;
    for v in mean.iter_mut() {
        *v *= inv;
    }
    SpectralDensity::new(centered_freq_axis(n, sample_rate), mean)
}

/// Welch segment-averaged PSD of a single signal: Hann-windowed overlapping
/// segments, periodograms normalized by the window power and averaged.
/// `overlap` is the fraction of a segment shared with its successor.
pub fn welch_periodogram(x: &Signal, segment_len: usize, overlap: f64) -> Result<SpectralDensity> {
    let n = x.len();
    if segment_len < 2 || !segment_len.is_multiple_of(2) || segment_len > n {
        return Err(Error::usage(format!(
            "segment_len must be even, >= 2, and <= {n}, got {segment_len}"
        )));
    }
    if !(0.0..1.0).contains(&overlap) {
        return Err(Error::usage(format!(
            "overlap must lie in [0, 1), got {overlap}"
        )));
    }
    let hop = ((segment_len as f64) * (1.0 - overlap)).round().max(1.0) as usize;
    let fs = x.sample_rate();
    let window: Vec<f64> = (0..segment_len)
        .map(|k| {
            let w = (PI * k as f64 / segment_len as f64).sin();
            w * w
        })
        .collect();
    let window_power: f64 = window.iter().map(|w| w * w).sum();
    let mut acc = vec![0.0; segment_len];
    let mut count = 0usize;
    let mut start = 0usize;
    while start + segment_len <= n {
        let mut seg: Vec<Complex64> = x.samples()[start..start + segment_len]
            .iter()
            .zip(&window)
            .map(|(v, &w)| v * w)
            .collect();
        dft(&mut seg);
        for (m, a) in acc.iter_mut().enumerate() {
            *a += seg[(m + segment_len / 2) % segment_len].norm_sqr();
        }
        count += 1;
        start += hop;
    }
    if count == 0 {
        return Err(Error::usage("signal shorter than one segment"));
    }
    let scale = 1.0 / (count as f64 * window_power * fs);
    let values = acc.iter().map(|a| a * scale).collect();
    SpectralDensity::new(centered_freq_axis(segment_len, fs), values)
}

/// Magnitude-squared short-time Fourier transform on a coarser time grid.
/// Hann-windowed frames of `window_len` samples advance by `hop`; at least
/// two frames must fit.
pub fn stft(x: &Signal, window_len: usize, hop: usize) -> Result<TFDist> {
    let n = x.len();
    if window_len < 2 || !window_len.is_multiple_of(2) || window_len > n {
        return Err(Error::usage(format!(
            "window_len must be even, >= 2, and <= {n}, got {window_len}"
        )));
    }
    if hop == 0 {
        return Err(Error::usage("hop must be >= 1"));
    }
    let n_frames = if n >= window_len {
        (n - window_len) / hop + 1
    } else {
        0
    };
    if n_frames < 2 {
        return Err(Error::usage(
            "signal too short for two frames at this window/hop",
        ));
    }
    let fs = x.sample_rate();
    let window: Vec<f64> = (0..window_len)
        .map(|k| {
            let w = (PI * k as f64 / window_len as f64).sin();
            w * w
        })
        .collect();
    let mut values = Vec::with_capacity(n_frames * window_len);
    let mut time_axis = Vec::with_capacity(n_frames);
    for frame in 0..n_frames {
        let start = frame * hop;
        let mut seg: Vec<Complex64> = x.samples()[start..start + window_len]
            .iter()
            .zip(&window)
            .map(|(v, &w)| v * w)
            .collect();
        dft(&mut seg);
        for m in 0..window_len {
            let v = seg[(m + window_len / 2) % window_len].norm_sqr();
            values.push(Complex64::new(v, 0.0));
        }
        time_axis.push(x.t0() + (start + window_len / 2) as f64 / fs);
    }
    TFDist::new(
        TfKind::Auto,
        time_axis,
        centered_freq_axis(window_len, fs),
        values,
    )
}
