//! Sub-Nyquist sampling model: sampling filter, aliased-ratio conditional
//! spectra, and frequency-domain MMSE.
//!
//! Sampling a filtered process at rate `fs_sub` folds spectral replicas
//! spaced `fs_sub` apart through the filter. The conditional density of the
//! input given those samples is the aliased ratio
//!
//! ```text
//! S_{X|Y}(f) = sum_k S_X^2(f - k fs_sub) |H(f - k fs_sub)|^2
//!            / sum_k S_Y(f - k fs_sub) |H(f - k fs_sub)|^2
//! ```
//!
//! with `S_Y = S_X + S_noise`, evaluated on the folded band
//! `(-fs_sub/2, fs_sub/2)` and truncated at `|k| <= alias_terms`. The
//! truncation must be lossless: construction checks that replicas beyond
//! `alias_terms` cannot intersect the filtered band. Where the denominator
//! falls below 1e-12 nothing was observed and the ratio is defined as 0.
//!
//! The same ratio applied per time slice of a Wigner-Ville spectrum gives
//! the conditional time-frequency distribution; frequency-domain MMSE is
//! the input power minus the folded-band reconstruction energy.

use crate::error::{Error, Result};
use crate::tfa::{sample_uniform, SpectralDensity, TFDist, TfKind};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Denominator guard: below this nothing was observed and ratios are 0.
const DEN_EPS: f64 = 1e-12;

/// Relative tolerance for band-edge comparisons.
const EDGE_TOL: f64 = 1e-9;

/// Sampling filter frequency response |H(f)|, real and nonnegative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FilterShape {
    /// 1 on |f| <= cutoff, 0 outside.
    IdealLowpass { cutoff: f64 },
    /// 1 everywhere.
    Flat,
    /// Piecewise-linear response on an increasing grid, 0 outside.
    Custom { freqs: Vec<f64>, values: Vec<f64> },
}

impl FilterShape {
    fn validate(&self) -> Result<()> {
        match self {
            FilterShape::IdealLowpass { cutoff } => {
                if !(cutoff.is_finite() && *cutoff >= 0.0) {
                    return Err(Error::construction(format!(
                        "lowpass cutoff must be finite and >= 0, got {cutoff}"
                    )));
                }
            }
            FilterShape::Flat => {}
            FilterShape::Custom { freqs, values } => {
                if freqs.len() < 2 || freqs.len() != values.len() {
                    return Err(Error::construction(
                        "custom filter needs matching grids of >= 2 points",
                    ));
                }
                if freqs.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(Error::construction(
                        "custom filter grid must be strictly increasing",
                    ));
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::construction(
                        "custom filter values must be finite and >= 0",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Amplitude response at `f`.
    pub fn response(&self, f: f64) -> f64 {
        match self {
            FilterShape::IdealLowpass { cutoff } => {
                if f.abs() <= *cutoff {
                    1.0
                } else {
                    0.0
                }
            }
            FilterShape::Flat => 1.0,
            FilterShape::Custom { freqs, values } => {
                if f < freqs[0] || f > freqs[freqs.len() - 1] {
                    return 0.0;
                }
                match freqs.binary_search_by(|g| g.partial_cmp(&f).expect("finite grid")) {
                    Ok(i) => values[i],
                    Err(i) => {
                        let frac = (f - freqs[i - 1]) / (freqs[i] - freqs[i - 1]);
                        (1.0 - frac) * values[i - 1] + frac * values[i]
                    }
                }
            }
        }
    }

    /// Largest |f| where the response can be nonzero; None when unbounded.
    fn support_limit(&self) -> Option<f64> {
        match self {
            FilterShape::IdealLowpass { cutoff } => Some(*cutoff),
            FilterShape::Flat => None,
            FilterShape::Custom { freqs, values } => {
                let lim = freqs
                    .iter()
                    .zip(values)
                    .filter(|(_, v)| **v > 0.0)
                    .map(|(f, _)| f.abs())
                    .fold(0.0, f64::max);
                Some(lim)
            }
        }
    }
}

/// Sub-Nyquist sampling description: rate, filter, and the alias-sum
/// truncation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SamplingSpecJson", into = "SamplingSpecJson")]
pub struct SamplingSpec {
    fs_sub: f64,
    filter: FilterShape,
    alias_terms: usize,
}

#[derive(Serialize, Deserialize)]
struct SamplingSpecJson {
    fs_sub: f64,
    filter: FilterShape,
    alias_terms: usize,
}

impl TryFrom<SamplingSpecJson> for SamplingSpec {
    type Error = Error;
    fn try_from(j: SamplingSpecJson) -> Result<Self> {
        SamplingSpec::new(j.fs_sub, j.filter, j.alias_terms)
    }
}

impl From<SamplingSpec> for SamplingSpecJson {
    fn from(s: SamplingSpec) -> Self {
        SamplingSpecJson {
            fs_sub: s.fs_sub,
            filter: s.filter,
            alias_terms: s.alias_terms,
        }
    }
}

impl SamplingSpec {
    pub fn new(fs_sub: f64, filter: FilterShape, alias_terms: usize) -> Result<Self> {
        if !(fs_sub.is_finite() && fs_sub > 0.0) {
            return Err(Error::construction(format!(
                "fs_sub must be finite and > 0, got {fs_sub}"
            )));
        }
        if alias_terms == 0 {
            return Err(Error::construction("alias_terms must be >= 1"));
        }
        filter.validate()?;
        Ok(SamplingSpec {
            fs_sub,
            filter,
            alias_terms,
        })
    }

    pub fn fs_sub(&self) -> f64 {
        self.fs_sub
    }

    pub fn filter(&self) -> &FilterShape {
        &self.filter
    }

    pub fn alias_terms(&self) -> usize {
        self.alias_terms
    }

    /// Checks that replicas beyond `alias_terms` cannot reach the folded
    /// band: a replica centered at `k fs_sub` with `|k| > K` must sit
    /// entirely outside the filtered signal support `|f| <= band_max`.
    fn check_alias_coverage(&self, band_max: f64) -> Result<()> {
        let support = match self.filter.support_limit() {
            Some(lim) => lim.min(band_max),
            None => band_max,
        };
        let reach = self.fs_sub * (self.alias_terms as f64 + 0.5);
        if reach + EDGE_TOL * self.fs_sub < support {
            return Err(Error::construction(format!(
                "alias_terms = {} truncates active replicas: fs_sub ({} + 1/2) = {reach} \
                 < filtered support {support}; increase alias_terms",
                self.alias_terms, self.alias_terms
            )));
        }
        Ok(())
    }

    /// The aliased num/den ratio at one frequency of the folded band.
    fn ratio(&self, f: f64, num_at: &impl Fn(f64) -> f64, den_at: &impl Fn(f64) -> f64) -> f64 {
        let k_max = self.alias_terms as i64;
        let mut num = 0.0;
        let mut den = 0.0;
        for k in -k_max..=k_max {
            let fk = f - k as f64 * self.fs_sub;
            let h = self.filter.response(fk);
            if h == 0.0 {
                continue;
            }
            let h2 = h * h;
            num += num_at(fk) * h2;
            den += den_at(fk) * h2;
        }
        if den < DEN_EPS {
            0.0
        } else {
            num / den
        }
    }
}

/// Grid frequencies strictly inside the folded band (-fs_sub/2, fs_sub/2).
fn folded_band(freqs: &[f64], fs_sub: f64) -> Result<Vec<f64>> {
    let step = freqs[1] - freqs[0];
    let half = fs_sub / 2.0 - EDGE_TOL * step;
    let folded: Vec<f64> = freqs.iter().copied().filter(|f| f.abs() < half).collect();
    if folded.len() < 2 {
        return Err(Error::construction(format!(
            "folded band (-{0}/2, {0}/2) covers fewer than 2 grid points",
            fs_sub
        )));
    }
    Ok(folded)
}

/// Conditional power spectral density of the input given sub-Nyquist
/// samples: the aliased ratio on the folded band.
pub fn conditional_psd(
    s_x: &SpectralDensity,
    noise_psd: &SpectralDensity,
    spec: &SamplingSpec,
) -> Result<SpectralDensity> {
    if s_x.freqs() != noise_psd.freqs() {
        return Err(Error::shape(
            "signal and noise densities must share one grid",
        ));
    }
    let band_max = s_x.freqs().iter().fold(0.0f64, |m, f| m.max(f.abs()));
    spec.check_alias_coverage(band_max)?;
    let folded = folded_band(s_x.freqs(), spec.fs_sub)?;
    let num_at = |f: f64| {
        let v = s_x.sample_at(f);
        v * v
    };
    let den_at = |f: f64| s_x.sample_at(f) + noise_psd.sample_at(f);
    let values: Vec<f64> = folded
        .iter()
        .map(|&f| spec.ratio(f, &num_at, &den_at))
        .collect();
    SpectralDensity::new(folded, values)
}

/// Conditional Wigner distribution: the aliased ratio applied independently
/// at each time slice, with `W_X(t, .)` as the signal density and
/// `W_Y(t, .)` as the observed density.
pub fn conditional_wd(wv_x: &TFDist, wv_y: &TFDist, spec: &SamplingSpec) -> Result<TFDist> {
    if wv_x.time_axis() != wv_y.time_axis() || wv_x.freq_axis() != wv_y.freq_axis() {
        return Err(Error::shape("conditional_wd inputs must share one grid"));
    }
    if wv_x.kind() != TfKind::Auto || wv_y.kind() != TfKind::Auto {
        return Err(Error::usage(
            "conditional_wd expects auto distributions on both inputs",
        ));
    }
    let band_max = wv_x.freq_axis().iter().fold(0.0f64, |m, f| m.max(f.abs()));
    spec.check_alias_coverage(band_max)?;
    let folded = folded_band(wv_x.freq_axis(), spec.fs_sub)?;
    let f0 = wv_x.freq_axis()[0];
    let step = wv_x.df();
    let mut values = Vec::with_capacity(wv_x.nt() * folded.len());
    for t in 0..wv_x.nt() {
        let sx: Vec<f64> = wv_x.row(t).iter().map(|v| v.re).collect();
        let sy: Vec<f64> = wv_y.row(t).iter().map(|v| v.re).collect();
        let num_at = |f: f64| {
            let v = sample_uniform(f0, step, &sx, f);
            v * v
        };
        let den_at = |f: f64| sample_uniform(f0, step, &sy, f);
        for &f in &folded {
            values.push(Complex64::new(spec.ratio(f, &num_at, &den_at), 0.0));
        }
    }
    TFDist::new(
        TfKind::Conditional,
        wv_x.time_axis().to_vec(),
        folded,
        values,
    )
}

/// Frequency-domain MMSE: input power minus folded-band reconstruction
/// energy, both as Riemann sums on their grids.
pub fn mmse_freq(
    s_x: &SpectralDensity,
    s_x_given_y: &SpectralDensity,
    spec: &SamplingSpec,
) -> Result<f64> {
    check_folded_grid(s_x_given_y, spec)?;
    if (s_x_given_y.df() - s_x.df()).abs() > EDGE_TOL * s_x.df() {
        return Err(Error::shape(
            "conditional density must share the input grid spacing",
        ));
    }
    Ok(s_x.integral() - s_x_given_y.integral())
}

/// Energy of the MMSE reconstruction: the folded-band integral of the
/// conditional density. `mmse_freq + reconstruction_energy` recovers the
/// input power exactly.
pub fn reconstruction_energy(s_x_given_y: &SpectralDensity, spec: &SamplingSpec) -> Result<f64> {
    check_folded_grid(s_x_given_y, spec)?;
    Ok(s_x_given_y.integral())
}

fn check_folded_grid(s_x_given_y: &SpectralDensity, spec: &SamplingSpec) -> Result<()> {
    let half = spec.fs_sub / 2.0 + EDGE_TOL * spec.fs_sub;
    if s_x_given_y.freqs().iter().any(|f| f.abs() > half) {
        return Err(Error::shape(
            "conditional density extends beyond the folded band",
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::SourceModel;
    use crate::tfa::{wigner, wv_spectrum};
    use approx::assert_relative_eq;

    /// Flat density `level` on |f| <= band over a DFT-style grid [-fmax, fmax).
    fn flat(level: f64, band: f64, f_max: f64, n: usize) -> SpectralDensity {
        let step = 2.0 * f_max / n as f64;
        SpectralDensity::flat_band(level, band, f_max, step).unwrap()
    }

    fn lowpass(cutoff: f64) -> FilterShape {
        FilterShape::IdealLowpass { cutoff }
    }

    #[test]
    fn spec_construction_validation() {
        assert!(SamplingSpec::new(0.5, FilterShape::Flat, 1).is_ok());
        assert!(SamplingSpec::new(0.0, FilterShape::Flat, 1).is_err());
        assert!(SamplingSpec::new(0.5, FilterShape::Flat, 0).is_err());
        assert!(SamplingSpec::new(0.5, lowpass(-1.0), 1).is_err());
        assert!(SamplingSpec::new(
            0.5,
            FilterShape::Custom {
                freqs: vec![0.0, -1.0],
                values: vec![1.0, 1.0]
            },
            1
        )
        .is_err());
        assert!(SamplingSpec::new(
            0.5,
            FilterShape::Custom {
                freqs: vec![-1.0, 1.0],
                values: vec![1.0, -0.5]
            },
            1
        )
        .is_err());
    }

    #[test]
    fn custom_filter_interpolates_and_vanishes_outside() {
        let h = FilterShape::Custom {
            freqs: vec![-1.0, 0.0, 1.0],
            values: vec![0.0, 2.0, 0.0],
        };
        assert_relative_eq!(h.response(0.0), 2.0);
        assert_relative_eq!(h.response(0.5), 1.0);
        assert_relative_eq!(h.response(-0.25), 1.5);
        assert_eq!(h.response(1.5), 0.0);
    }

    #[test]
    fn lossless_sampling_recovers_the_input_density() {
        // fs_sub at the signal Nyquist rate, no noise: single active alias,
        // ratio collapses to S_X.
        let n = 256;
        let s_x = flat(1.0, 0.2, 0.5, n);
        let noise = flat(0.0, 0.5, 0.5, n);
        let spec = SamplingSpec::new(1.0, lowpass(0.5), 1).unwrap();
        let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
        for (f, v) in cond.freqs().iter().zip(cond.values()) {
            let expect = s_x.sample_at(*f);
            assert!((v - expect).abs() <= 1e-12, "f={f}: {v} vs {expect}");
        }
        let mmse = mmse_freq(&s_x, &cond, &spec).unwrap();
        assert!(mmse.abs() <= 1e-9, "lossless mmse {mmse}");
        let recon = reconstruction_energy(&cond, &spec).unwrap();
        assert_relative_eq!(recon + mmse, s_x.integral(), max_relative = 1e-12);
    }

    #[test]
    fn half_nyquist_flat_spectrum_matches_hand_evaluated_aliases() {
        // S_X = 1 on |f| <= W with W = 0.25, fs_sub = W, low-pass cutoff W,
        // no noise. On the folded band every frequency sees two unit
        // replicas (three exactly at f = 0), so the ratio is 1 everywhere.
        let n = 512;
        let w = 0.25;
        let s_x = flat(1.0, w, 0.5, n);
        let noise = flat(0.0, 0.5, 0.5, n);
        let spec = SamplingSpec::new(w, lowpass(w), 2).unwrap();
        let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
        for (f, v) in cond.freqs().iter().zip(cond.values()) {
            assert!((v - 1.0).abs() <= 1e-12, "f={f}: {v}");
            assert!(f.abs() < w / 2.0);
        }
        // Hand-evaluated energies: the folded band holds (n/4 - 1) bins of
        // height 1, the input 2W of power.
        let step = 1.0 / n as f64;
        let folded_bins = cond.len() as f64;
        assert_eq!(cond.len(), n / 4 - 1);
        let recon = reconstruction_energy(&cond, &spec).unwrap();
        assert_relative_eq!(recon, folded_bins * step, max_relative = 1e-12);
        let mmse = mmse_freq(&s_x, &cond, &spec).unwrap();
        assert_relative_eq!(
            mmse,
            s_x.integral() - folded_bins * step,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dead_filter_yields_zero_density_and_full_mmse() {
        let n = 256;
        let s_x = flat(1.0, 0.2, 0.5, n);
        let noise = flat(0.0, 0.5, 0.5, n);
        let dead = FilterShape::Custom {
            freqs: vec![-0.5, 0.5],
            values: vec![0.0, 0.0],
        };
        let spec = SamplingSpec::new(0.5, dead, 1).unwrap();
        let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
        assert!(cond.values().iter().all(|v| *v == 0.0));
        let mmse = mmse_freq(&s_x, &cond, &spec).unwrap();
        assert_relative_eq!(mmse, s_x.integral(), max_relative = 1e-12);
        assert_eq!(reconstruction_energy(&cond, &spec).unwrap(), 0.0);
    }

    #[test]
    fn mmse_is_monotone_in_sampling_rate() {
        let n = 512;
        let w = 0.125;
        let s_x = flat(1.0, w, 0.5, n);
        let noise = flat(0.01, 0.5, 0.5, n);
        let mut last = f64::INFINITY;
        for fs_sub in [w / 2.0, w, 2.0 * w] {
            let spec = SamplingSpec::new(fs_sub, lowpass(fs_sub / 2.0), 4).unwrap();
            let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
            let mmse = mmse_freq(&s_x, &cond, &spec).unwrap();
            assert!(
                mmse <= last + 1e-12,
                "mmse not monotone at fs_sub={fs_sub}: {mmse} > {last}"
            );
            assert!(mmse >= -1e-9);
            last = mmse;
        }
    }

    #[test]
    fn single_alias_output_never_exceeds_input_density() {
        // fs_sub wide enough that only k = 0 is active: the ratio is
        // S_X^2/(S_X + noise) <= S_X pointwise.
        let n = 256;
        let s_x = flat(0.7, 0.1, 0.5, n);
        let noise = flat(0.2, 0.5, 0.5, n);
        let spec = SamplingSpec::new(1.0, lowpass(0.15), 1).unwrap();
        let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
        for (f, v) in cond.freqs().iter().zip(cond.values()) {
            let bound = s_x.sample_at(*f);
            assert!(*v <= bound + 1e-12, "f={f}: {v} > {bound}");
        }
    }

    #[test]
    fn alias_truncation_too_small_is_rejected() {
        let n = 256;
        let s_x = flat(1.0, 0.5, 0.5, n);
        let noise = flat(0.0, 0.5, 0.5, n);
        // Flat filter: support is the whole grid (0.5), but one alias term
        // at fs_sub = 0.1 reaches only 0.15.
        let spec = SamplingSpec::new(0.1, FilterShape::Flat, 1).unwrap();
        assert!(conditional_psd(&s_x, &noise, &spec).is_err());
        let enough = SamplingSpec::new(0.1, FilterShape::Flat, 5).unwrap();
        assert!(conditional_psd(&s_x, &noise, &enough).is_ok());
    }

    #[test]
    fn conditional_wd_on_stationary_spectrum_broadcasts_conditional_psd() {
        let n = 128;
        let s_x = flat(1.0, 0.25, 0.5, n);
        let noise = flat(0.05, 0.5, 0.5, n);
        let spec = SamplingSpec::new(0.25, lowpass(0.25), 2).unwrap();
        // Build stationary TF grids whose every slice equals the densities.
        let time_axis: Vec<f64> = (0..4).map(|t| t as f64).collect();
        let to_tf = |d: &SpectralDensity| {
            let row: Vec<Complex64> = d.values().iter().map(|v| Complex64::new(*v, 0.0)).collect();
            let mut values = Vec::new();
            for _ in 0..4 {
                values.extend_from_slice(&row);
            }
            TFDist::new(TfKind::Auto, time_axis.clone(), d.freqs().to_vec(), values).unwrap()
        };
        let wv_x = to_tf(&s_x);
        let s_y = s_x.add(&noise).unwrap();
        let wv_y = to_tf(&s_y);
        let cond_tf = conditional_wd(&wv_x, &wv_y, &spec).unwrap();
        let cond = conditional_psd(&s_x, &noise, &spec).unwrap();
        assert_eq!(cond_tf.kind(), TfKind::Conditional);
        assert_eq!(cond_tf.freq_axis(), cond.freqs());
        for t in 0..cond_tf.nt() {
            for (v, expect) in cond_tf.row(t).iter().zip(cond.values()) {
                assert!((v.re - expect).abs() <= 1e-12);
                assert_eq!(v.im, 0.0);
            }
        }
    }

    #[test]
    fn conditional_wd_matches_direct_per_slice_evaluation() {
        // Chirp WV spectrum against an independently coded alias sum.
        let n = 64;
        let fs = 1.0;
        let model = SourceModel::chirp(0.05, 0.2, 1.0, 0);
        let wv_x = wv_spectrum(&model, n, fs, 1, 3).unwrap();
        // Observed spectrum: signal plus a flat noise floor.
        let floor = 0.02;
        let wv_y = TFDist::new(
            TfKind::Auto,
            wv_x.time_axis().to_vec(),
            wv_x.freq_axis().to_vec(),
            wv_x.values()
                .iter()
                .map(|v| v + Complex64::new(floor, 0.0))
                .collect(),
        )
        .unwrap();
        let fs_sub = 0.25;
        let cutoff = 0.2;
        let spec = SamplingSpec::new(fs_sub, lowpass(cutoff), 3).unwrap();
        let cond = conditional_wd(&wv_x, &wv_y, &spec).unwrap();

        let f0 = wv_x.freq_axis()[0];
        let step = wv_x.df();
        let interp = |row: &[Complex64], f: f64| {
            let pos = (f - f0) / step;
            if pos < -1e-9 || pos > (row.len() - 1) as f64 + 1e-9 {
                return 0.0;
            }
            let i = (pos.floor().max(0.0) as usize).min(row.len() - 1);
            let frac = pos - i as f64;
            if frac.abs() <= 1e-9 || i + 1 == row.len() {
                row[i].re
            } else {
                (1.0 - frac) * row[i].re + frac * row[i + 1].re
            }
        };
        for t in [0, 17, 40, 63] {
            for (m, &f) in cond.freq_axis().iter().enumerate() {
                let mut num = 0.0;
                let mut den = 0.0;
                for k in -3i64..=3 {
                    let fk = f - k as f64 * fs_sub;
                    if fk.abs() > cutoff {
                        continue;
                    }
                    let sx = interp(wv_x.row(t), fk);
                    let sy = interp(wv_y.row(t), fk);
                    num += sx * sx;
                    den += sy;
                }
                let expect = if den < 1e-12 { 0.0 } else { num / den };
                let got = cond.value(t, m).re;
                assert!(
                    (got - expect).abs() <= 1e-12,
                    "t={t} f={f}: {got} vs {expect}"
                );
            }
        }
    }

    #[test]
    fn conditional_wd_rejects_mismatched_or_cross_inputs() {
        let n = 64;
        let s_x = flat(1.0, 0.25, 0.5, n);
        let model = SourceModel::gaussian(s_x, 1);
        let x = model.realize(n, 1.0, 0).unwrap();
        let w = wigner(&x);
        let spec = SamplingSpec::new(0.5, lowpass(0.25), 1).unwrap();
        let model2 = SourceModel::gaussian(flat(1.0, 0.25, 0.5, 32), 2);
        let other = wigner(&model2.realize(32, 1.0, 0).unwrap());
        assert!(conditional_wd(&w, &other, &spec).is_err());
        let c = crate::tfa::cross_wigner(&x, &x).unwrap();
        assert!(conditional_wd(&w, &c, &spec).is_err());
    }

    #[test]
    fn folded_band_narrower_than_grid_is_rejected() {
        let s_x = flat(1.0, 0.2, 0.5, 64);
        let noise = flat(0.0, 0.5, 0.5, 64);
        // fs_sub/2 smaller than one grid step leaves only the zero bin.
        let spec = SamplingSpec::new(0.02, lowpass(0.01), 30).unwrap();
        assert!(conditional_psd(&s_x, &noise, &spec).is_err());
    }

    #[test]
    fn sampling_spec_serde_round_trip() {
        let spec = SamplingSpec::new(0.25, lowpass(0.125), 2).unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        let back: SamplingSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        let toml_text = toml::to_string(&spec).unwrap();
        let back: SamplingSpec = toml::from_str(&toml_text).unwrap();
        assert_eq!(spec, back);
    }
}
