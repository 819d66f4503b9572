//! Complex baseband signals, stochastic source models, and noisy mixtures.
//!
//! [`Signal`] is a uniformly sampled complex vector with a sample rate and a
//! start time. Lengths are even (the lag kernel of the Wigner-Ville
//! distribution pairs samples symmetrically around each time index, and the
//! DFT-domain analytic-signal surgery needs an unambiguous Nyquist bin).
//!
//! [`SourceModel`] wraps the three signal families used across the crate:
//! stationary Gaussian processes synthesized by spectral shaping, linear
//! chirps, and i.i.d. draws from a finite alphabet. Realizations are fully
//! determined by (model seed, realization index), so ensembles are
//! reproducible and parallelizable.
//!
//! [`mix`] forms the observation `y = sqrt(snr) * (x1 + x2) + n` with unit
//! variance noise matched to the field convention.

use crate::error::{Error, Result};
use crate::fft::{dft, idft};
use crate::rng::{seeded_rng, subseed};
use crate::tfa::SpectralDensity;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scalar field the estimation channel works over.
///
/// `Real` draws real Gaussian noise of unit variance; `ComplexCircular`
/// draws circularly symmetric complex noise of unit total variance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldConvention {
    Real,
    ComplexCircular,
}

impl FieldConvention {
    /// Constant relating the mutual-information derivative to the
    /// mmse/cross-correlation sum: 1/2 for real fields, 1 for complex.
    pub fn gsv_constant(self) -> f64 {
        match self {
            FieldConvention::Real => 0.5,
            FieldConvention::ComplexCircular => 1.0,
        }
    }
}

/// Uniformly sampled complex signal.
#[derive(Clone, Debug, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
    sample_rate: f64,
    t0: f64,
}

impl Signal {
    /// Builds a signal, validating the length (>= 2 and even) and the
    /// sample rate (positive and finite).
    pub fn new(samples: Vec<Complex64>, sample_rate: f64, t0: f64) -> Result<Self> {
        if samples.len() < 2 || !samples.len().is_multiple_of(2) {
            return Err(Error::construction(format!(
                "signal length must be even and >= 2, got {}",
                samples.len()
            )));
        }
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return Err(Error::construction(format!(
                "sample_rate must be positive and finite, got {sample_rate}"
            )));
        }
        if !t0.is_finite() {
            return Err(Error::construction(format!("t0 must be finite, got {t0}")));
        }
        Ok(Signal {
            samples,
            sample_rate,
            t0,
        })
    }

    /// Builds a signal from real samples (imaginary parts zero).
    pub fn from_real(re: &[f64], sample_rate: f64, t0: f64) -> Result<Self> {
        Signal::new(
            re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            sample_rate,
            t0,
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Sampling interval in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }

    /// Time axis `t0 + k / sample_rate`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.t0 + k as f64 / self.sample_rate)
            .collect()
    }

    /// Sum of squared magnitudes over all samples.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|v| v.norm_sqr()).sum()
    }

    /// Energy divided by the number of samples.
    pub fn mean_power(&self) -> f64 {
        self.energy() / self.len() as f64
    }

    /// True when every sample has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|v| v.im == 0.0)
    }

    /// Elementwise sum; both signals must share length, rate, and start time.
    pub fn add(&self, other: &Signal) -> Result<Signal> {
        self.check_same_grid(other)?;
        Ok(Signal {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a + b)
                .collect(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        })
    }

    /// Elementwise scaling by a real factor.
    pub fn scale(&self, factor: f64) -> Signal {
        Signal {
            samples: self.samples.iter().map(|v| v * factor).collect(),
            sample_rate: self.sample_rate,
            t0: self.t0,
        }
    }

    pub(crate) fn check_same_grid(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() || self.sample_rate != other.sample_rate || self.t0 != other.t0
        {
            return Err(Error::shape(format!(
                "signal grids differ: ({}, {}, {}) vs ({}, {}, {})",
                self.len(),
                self.sample_rate,
                self.t0,
                other.len(),
                other.sample_rate,
                other.t0
            )));
        }
        Ok(())
    }

    /// Serializes to CSV: a `#` metadata line carrying the sample rate and
    /// start time, a column header, then one `index,re,im` row per sample.
    /// Floats use the shortest representation that parses back bit-exactly.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# sample_rate={} t0={}\n",
            self.sample_rate, self.t0
        ));
        out.push_str("index,re,im\n");
        for (k, v) in self.samples.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", k, v.re, v.im));
        }
        out
    }

    /// Parses the CSV format written by [`Signal::to_csv`].
    pub fn from_csv(text: &str) -> Result<Signal> {
        let mut lines = text.lines();
        let meta = lines
            .next()
            .ok_or_else(|| Error::parse("empty signal csv"))?;
        let meta = meta
            .strip_prefix("# ")
            .ok_or_else(|| Error::parse("signal csv missing `# sample_rate=.. t0=..` line"))?;
        let mut sample_rate = None;
        let mut t0 = None;
        for field in meta.split_whitespace() {
            if let Some(v) = field.strip_prefix("sample_rate=") {
                sample_rate = Some(parse_f64(v)?);
            } else if let Some(v) = field.strip_prefix("t0=") {
                t0 = Some(parse_f64(v)?);
            }
        }
        let sample_rate =
            sample_rate.ok_or_else(|| Error::parse("signal csv missing sample_rate"))?;
        let t0 = t0.ok_or_else(|| Error::parse("signal csv missing t0"))?;
        let header = lines.next().unwrap_or("");
        if header.trim() != "index,re,im" {
            return Err(Error::parse(format!(
                "unexpected signal csv header: {header}"
            )));
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split(',');
            let _idx = cols
                .next()
                .ok_or_else(|| Error::parse(format!("row {lineno}: missing index")))?;
            let re = parse_f64(
                cols.next()
                    .ok_or_else(|| Error::parse(format!("row {lineno}: missing re")))?,
            )?;
            let im = parse_f64(
                cols.next()
                    .ok_or_else(|| Error::parse(format!("row {lineno}: missing im")))?,
            )?;
            samples.push(Complex64::new(re, im));
        }
        Signal::new(samples, sample_rate, t0)
    }

    /// Serializes to a JSON object with `sample_rate`, `t0`, and parallel
    /// `re`/`im` arrays.
    pub fn to_json(&self) -> String {
        let doc = SignalJson {
            sample_rate: self.sample_rate,
            t0: self.t0,
            re: self.samples.iter().map(|v| v.re).collect(),
            im: self.samples.iter().map(|v| v.im).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("signal json serialization")
    }

    /// Parses the JSON format written by [`Signal::to_json`].
    pub fn from_json(text: &str) -> Result<Signal> {
        let doc: SignalJson =
            serde_json::from_str(text).map_err(|e| Error::parse(format!("signal json: {e}")))?;
        if doc.re.len() != doc.im.len() {
            return Err(Error::parse("signal json: re/im lengths differ"));
        }
        Signal::new(
            doc.re
                .iter()
                .zip(&doc.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
            doc.sample_rate,
            doc.t0,
        )
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse(format!("bad float {s:?}: {e}")))
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    sample_rate: f64,
    t0: f64,
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Finite alphabet with draw probabilities, normalized to unit mean power.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    atoms: Vec<Complex64>,
    probs: Vec<f64>,
}

impl Alphabet {
    /// Validates that probabilities are nonnegative and sum to 1 within
    /// 1e-12, and that the mean power `sum p|a|^2` is 1 within 1e-12.
    pub fn new(atoms: Vec<Complex64>, probs: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != probs.len() {
            return Err(Error::construction(format!(
                "alphabet needs matching nonempty atoms/probs, got {}/{}",
                atoms.len(),
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::construction("alphabet probabilities must be >= 0"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::construction(format!(
                "alphabet probabilities sum to {total}, expected 1"
            )));
        }
        let power: f64 = atoms
            .iter()
            .zip(&probs)
            .map(|(a, &p)| p * a.norm_sqr())
            .sum();
        if (power - 1.0).abs() > 1e-12 {
            return Err(Error::construction(format!(
                "alphabet mean power is {power}, expected 1"
            )));
        }
        Ok(Alphabet { atoms, probs })
    }

    /// Antipodal binary alphabet `{+1, -1}` with equal probabilities.
    pub fn bpsk() -> Self {
        Alphabet::new(
            vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            vec![0.5, 0.5],
        )
        .expect("bpsk alphabet is valid")
    }

    pub fn atoms(&self) -> &[Complex64] {
        &self.atoms
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// True for `{a, -a}` with equal probabilities, the shape required by
    /// sign-flip correlation coupling.
    pub fn is_symmetric_binary(&self) -> bool {
        self.atoms.len() == 2
            && (self.atoms[0] + self.atoms[1]).norm() <= 1e-12
            && (self.probs[0] - 0.5).abs() <= 1e-12
    }

    /// Draws one atom index using the inverse CDF of the probabilities.
    fn draw_index(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (i, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i;
            }
        }
        self.probs.len() - 1
    }
}

/// Kind-specific parameters of a signal source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    /// Stationary Gaussian process with the given two-sided power spectral
    /// density. `real_valued` selects Hermitian-symmetric synthesis (real
    /// samples) instead of circular complex synthesis.
    GaussianPsd {
        psd: SpectralDensity,
        #[serde(default)]
        real_valued: bool,
    },
    /// Linear-frequency complex exponential scaled by `amplitude`.
    Chirp {
        f_start: f64,
        f_end: f64,
        amplitude: f64,
    },
    /// I.i.d. draws from a finite alphabet.
    DiscreteAlphabet { alphabet: Alphabet },
}

/// A seeded signal source; `realize` maps a realization index to a signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub kind: ModelKind,
    pub seed: u64,
}

impl SourceModel {
    pub fn gaussian(psd: SpectralDensity, seed: u64) -> Self {
        SourceModel {
            kind: ModelKind::GaussianPsd {
                psd,
                real_valued: false,
            },
            seed,
        }
    }

    pub fn gaussian_real(psd: SpectralDensity, seed: u64) -> Self {
        SourceModel {
            kind: ModelKind::GaussianPsd {
                psd,
                real_valued: true,
            },
            seed,
        }
    }

    pub fn chirp(f_start: f64, f_end: f64, amplitude: f64, seed: u64) -> Self {
        SourceModel {
            kind: ModelKind::Chirp {
                f_start,
                f_end,
                amplitude,
            },
            seed,
        }
    }

    pub fn discrete(alphabet: Alphabet, seed: u64) -> Self {
        SourceModel {
            kind: ModelKind::DiscreteAlphabet { alphabet },
            seed,
        }
    }

    /// True when realizations depend on the seed.
    pub fn is_stochastic(&self) -> bool {
        !matches!(self.kind, ModelKind::Chirp { .. })
    }

    /// Generates realization `realization` on an `n`-sample grid. The
    /// effective seed is `subseed(model seed, realization)`, so distinct
    /// realizations are independent and any one of them can be regenerated
    /// in isolation.
    pub fn realize(&self, n: usize, sample_rate: f64, realization: u64) -> Result<Signal> {
        match &self.kind {
            ModelKind::GaussianPsd { psd, real_valued } => gaussian_realization(
                psd,
                n,
                sample_rate,
                subseed(self.seed, realization),
                *real_valued,
            ),
            ModelKind::Chirp {
                f_start,
                f_end,
                amplitude,
            } => Ok(gen_chirp(*f_start, *f_end, n, sample_rate)?.scale(*amplitude)),
            ModelKind::DiscreteAlphabet { alphabet } => {
                gen_discrete(alphabet, n, sample_rate, subseed(self.seed, realization))
            }
        }
    }

    /// Generates a correlated pair `(x1, x2)` with pairwise correlation
    /// `rho`.
    ///
    /// Supported couplings:
    /// - `rho == 0`: independent realizations (stochastic pairs must carry
    ///   distinct seeds);
    /// - `|rho| == 1`: (sign-flipped) copy; both models must be identical;
    /// - intermediate `rho`, Gaussian pair with identical psd: shared white
    ///   spectral draws mixed as `rho * z1 + sqrt(1-rho^2) * z2`;
    /// - intermediate `rho`, symmetric binary alphabets: per-sample sign
    ///   flip applied to `x1`'s draw with keep probability `(1+rho)/2`.
    ///
    /// Deterministic models only support `rho == 0`. Anything else returns
    /// `Usage`.
    pub fn realize_pair(
        m1: &SourceModel,
        m2: &SourceModel,
        rho: f64,
        n: usize,
        sample_rate: f64,
        realization: u64,
    ) -> Result<(Signal, Signal)> {
        if !(rho.is_finite() && (-1.0..=1.0).contains(&rho)) {
            return Err(Error::construction(format!(
                "correlation must lie in [-1, 1], got {rho}"
            )));
        }
        if rho == 0.0 {
            if m1.is_stochastic() && m2.is_stochastic() && m1.seed == m2.seed {
                return Err(Error::usage(
                    "independent pair models share a seed; give each model its own seed",
                ));
            }
            return Ok((
                m1.realize(n, sample_rate, realization)?,
                m2.realize(n, sample_rate, realization)?,
            ));
        }
        if !m1.is_stochastic() || !m2.is_stochastic() {
            return Err(Error::usage(
                "nonzero correlation requires stochastic models on both inputs",
            ));
        }
        if rho.abs() == 1.0 {
            if m1.kind != m2.kind {
                return Err(Error::usage(
                    "correlation +/-1 requires identical pair models",
                ));
            }
            let x1 = m1.realize(n, sample_rate, realization)?;
            let x2 = x1.scale(rho.signum());
            return Ok((x1, x2));
        }
        match (&m1.kind, &m2.kind) {
            (
                ModelKind::GaussianPsd {
                    psd: p1,
                    real_valued: r1,
                },
                ModelKind::GaussianPsd {
                    psd: p2,
                    real_valued: r2,
                },
            ) => {
                if p1 != p2 || r1 != r2 {
                    return Err(Error::usage(
                        "intermediate correlation requires Gaussian pair models with identical psd",
                    ));
                }
                let z1 = white_draws(n, subseed(m1.seed, realization));
                let z2 = white_draws(n, subseed(m2.seed, realization));
                let mixed: Vec<Complex64> = z1
                    .iter()
                    .zip(&z2)
                    .map(|(a, b)| rho * a + (1.0 - rho * rho).sqrt() * b)
                    .collect();
                let x1 = shape_spectrum(&z1, p1, n, sample_rate, *r1)?;
                let x2 = shape_spectrum(&mixed, p1, n, sample_rate, *r1)?;
                Ok((x1, x2))
            }
            (
                ModelKind::DiscreteAlphabet { alphabet: a1 },
                ModelKind::DiscreteAlphabet { alphabet: a2 },
            ) => {
                if !a1.is_symmetric_binary() || a1 != a2 {
                    return Err(Error::usage(
                        "intermediate correlation requires identical symmetric binary alphabets",
                    ));
                }
                let x1 = m1.realize(n, sample_rate, realization)?;
                let keep_p = 0.5 * (1.0 + rho);
                let mut rng = seeded_rng(subseed(
                    subseed(m1.seed, m2.seed),
                    subseed(realization, 1),
                ));
                let samples: Vec<Complex64> = x1
                    .samples()
                    .iter()
                    .map(|&v| if rng.gen::<f64>() < keep_p { v } else { -v })
                    .collect();
                let x2 = Signal::new(samples, sample_rate, x1.t0())?;
                Ok((x1, x2))
            }
            _ => Err(Error::usage(
                "intermediate correlation is only supported for matched Gaussian or symmetric binary pairs",
            )),
        }
    }
}

/// Two-input additive-noise channel `y = sqrt(snr) * (x1 + x2) + n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureChannel {
    pub x1: SourceModel,
    pub x2: SourceModel,
    /// Pairwise correlation injected between the input draws.
    pub input_correlation: f64,
    pub snr: f64,
    pub field_convention: FieldConvention,
}

impl MixtureChannel {
    pub fn new(
        x1: SourceModel,
        x2: SourceModel,
        input_correlation: f64,
        snr: f64,
        field_convention: FieldConvention,
    ) -> Result<Self> {
        if !(input_correlation.is_finite() && (-1.0..=1.0).contains(&input_correlation)) {
            return Err(Error::construction(format!(
                "input_correlation must lie in [-1, 1], got {input_correlation}"
            )));
        }
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(Error::construction(format!(
                "snr must be >= 0 and finite, got {snr}"
            )));
        }
        Ok(MixtureChannel {
            x1,
            x2,
            input_correlation,
            snr,
            field_convention,
        })
    }

    /// Realizes the input pair and the observation for one realization
    /// index. The noise stream is derived from both model seeds so it is
    /// independent of the input draws.
    pub fn realize(
        &self,
        n: usize,
        sample_rate: f64,
        realization: u64,
    ) -> Result<(Signal, Signal, Signal)> {
        let (x1, x2) = SourceModel::realize_pair(
            &self.x1,
            &self.x2,
            self.input_correlation,
            n,
            sample_rate,
            realization,
        )?;
        let noise_seed = subseed(
            subseed(self.x1.seed, 0x6e6f_6973).wrapping_add(self.x2.seed),
            realization,
        );
        let y = mix(&x1, &x2, self.snr, self.field_convention, noise_seed)?;
        Ok((x1, x2, y))
    }
}

/// One realization of a zero-mean stationary Gaussian process whose
/// ensemble PSD equals `psd`: white Gaussian DFT coefficients scaled by
/// `sqrt(psd)` (circular complex synthesis).
pub fn gen_gaussian_process(
    psd: &SpectralDensity,
    n: usize,
    sample_rate: f64,
    seed: u64,
) -> Result<Signal> {
    gaussian_realization(psd, n, sample_rate, seed, false)
}

fn gaussian_realization(
    psd: &SpectralDensity,
    n: usize,
    sample_rate: f64,
    seed: u64,
    real_valued: bool,
) -> Result<Signal> {
    let z = white_draws(n, seed);
    shape_spectrum(&z, psd, n, sample_rate, real_valued)
}

/// Unit-variance circular white draws used as spectral shaping input.
fn white_draws(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) / 2f64.sqrt()
        })
        .collect()
}

/// Scales white spectral draws by the target psd and inverse-transforms.
///
/// Complex synthesis sets `X[m] = sqrt(psd(f_m) * n * fs) * z[m]`, giving a
/// circular process whose expected periodogram is `psd`. Real synthesis
/// symmetrizes: bin pairs `(m, n-m)` share one draw with Hermitian symmetry
/// and the pair scaling uses `(psd(f) + psd(-f)) / 2`, which preserves the
/// total power `integral psd df` exactly.
fn shape_spectrum(
    z: &[Complex64],
    psd: &SpectralDensity,
    n: usize,
    sample_rate: f64,
    real_valued: bool,
) -> Result<Signal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::construction(format!(
            "signal length must be even and >= 2, got {n}"
        )));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::construction(format!(
            "sample_rate must be positive and finite, got {sample_rate}"
        )));
    }
    let nf = n as f64;
    // DFT bin m covers frequency m*fs/n below Nyquist and (m-n)*fs/n from
    // the Nyquist bin up, so bin n/2 lands on the grid node -fs/2.
    let bin_freq = |m: usize| -> f64 {
        if m < n / 2 {
            m as f64 * sample_rate / nf
        } else {
            (m as f64 - nf) * sample_rate / nf
        }
    };
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    if real_valued {
        // DC and Nyquist carry real draws at full psd weight; interior
        // bin pairs share one complex draw at the symmetrized psd, which
        // keeps the total power at exactly `integral psd df`.
        spec[0] = Complex64::new(z[0].re * 2f64.sqrt(), 0.0)
            * (psd.sample_at(0.0) * nf * sample_rate).sqrt();
        let m_nyq = n / 2;
        spec[m_nyq] = Complex64::new(z[m_nyq].re * 2f64.sqrt(), 0.0)
            * (psd.sample_at(-sample_rate / 2.0) * nf * sample_rate).sqrt();
        for m in 1..n / 2 {
            let f = bin_freq(m);
            let sym = 0.5 * (psd.sample_at(f) + psd.sample_at(-f));
            let scale = (sym * nf * sample_rate / 2.0).sqrt();
            let v = Complex64::new(z[m].re, z[m].im) * 2f64.sqrt() * scale;
            spec[m] = v;
            spec[n - m] = v.conj();
        }
    } else {
        for (m, slot) in spec.iter_mut().enumerate() {
            let s = psd.sample_at(bin_freq(m));
            *slot = z[m] * (s * nf * sample_rate).sqrt();
        }
    }
    idft(&mut spec);
    if real_valued {
        for v in spec.iter_mut() {
            *v = Complex64::new(v.re, 0.0);
        }
    }
    Signal::new(spec, sample_rate, 0.0)
}

/// Unit-amplitude linear chirp sweeping `f_start` to `f_end` over the
/// signal duration: `x[k] = exp(j phi(t_k))` with
/// `phi(t) = 2 pi (f_start t + (f_end - f_start) t^2 / (2 T))`.
pub fn gen_chirp(f_start: f64, f_end: f64, n: usize, sample_rate: f64) -> Result<Signal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::construction(format!(
            "signal length must be even and >= 2, got {n}"
        )));
    }
    if !(sample_rate.is_finite() && sample_rate > 0.0) {
        return Err(Error::construction(format!(
            "sample_rate must be positive and finite, got {sample_rate}"
        )));
    }
    let nyq = sample_rate / 2.0;
    for f in [f_start, f_end] {
        if !(f.is_finite() && f.abs() <= nyq) {
            return Err(Error::construction(format!(
                "chirp frequency {f} outside the Nyquist band [-{nyq}, {nyq}]"
            )));
        }
    }
    let duration = n as f64 / sample_rate;
    let slope = (f_end - f_start) / duration;
    let samples = (0..n)
        .map(|k| {
            let t = k as f64 / sample_rate;
            let phase = 2.0 * PI * (f_start * t + 0.5 * slope * t * t);
            Complex64::from_polar(1.0, phase)
        })
        .collect();
    Signal::new(samples, sample_rate, 0.0)
}

/// I.i.d. draws from a finite alphabet via inverse-CDF sampling.
pub fn gen_discrete(alphabet: &Alphabet, n: usize, sample_rate: f64, seed: u64) -> Result<Signal> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::construction(format!(
            "signal length must be even and >= 2, got {n}"
        )));
    }
    let mut rng = seeded_rng(seed);
    let samples = (0..n)
        .map(|_| alphabet.atoms()[alphabet.draw_index(&mut rng)])
        .collect();
    Signal::new(samples, sample_rate, 0.0)
}

/// One-sided (analytic) version of `x` by DFT bin surgery: negative bins
/// zeroed, interior positive bins doubled, DC and Nyquist unchanged. For
/// real input the real part of the output equals the input.
///
/// Inputs that are already one-sided (strictly negative bins below
/// `1e-12` of the spectrum norm) pass through unchanged, making the
/// operation idempotent.
pub fn analytic_signal(x: &Signal) -> Result<Signal> {
    let n = x.len();
    let mut spec: Vec<Complex64> = x.samples().to_vec();
    dft(&mut spec);
    let norm = spec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let tol = 1e-12 * norm;
    if spec[n / 2 + 1..].iter().all(|v| v.norm() <= tol) {
        return Ok(x.clone());
    }
    for v in spec[1..n / 2].iter_mut() {
        *v *= 2.0;
    }
    for v in spec[n / 2 + 1..].iter_mut() {
        *v = Complex64::new(0.0, 0.0);
    }
    idft(&mut spec);
    Signal::new(spec, x.sample_rate(), x.t0())
}

/// Observation `y = sqrt(snr) * (x1 + x2) + n` with unit-variance noise
/// drawn per the field convention.
pub fn mix(
    x1: &Signal,
    x2: &Signal,
    snr: f64,
    field: FieldConvention,
    seed: u64,
) -> Result<Signal> {
    x1.check_same_grid(x2)?;
    if !(snr.is_finite() && snr >= 0.0) {
        return Err(Error::construction(format!(
            "snr must be >= 0 and finite, got {snr}"
        )));
    }
    let gain = snr.sqrt();
    let mut rng = seeded_rng(seed);
    let samples = x1
        .samples()
        .iter()
        .zip(x2.samples())
        .map(|(a, b)| {
            let noise = match field {
                FieldConvention::Real => Complex64::new(rng.sample::<f64, _>(StandardNormal), 0.0),
                FieldConvention::ComplexCircular => {
                    Complex64::new(
                        rng.sample::<f64, _>(StandardNormal),
                        rng.sample::<f64, _>(StandardNormal),
                    ) / 2f64.sqrt()
                }
            };
            gain * (a + b) + noise
        })
        .collect();
    Signal::new(samples, x1.sample_rate(), x1.t0())
}
