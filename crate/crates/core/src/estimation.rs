//! Conditional-mean estimation, MMSE, mutual information, and the scalar
//! I-MMSE sweep for one- and two-input channels.
//!
//! The channel is `y = sqrt(snr) (x1 [+ x2]) + n` with unit-variance noise
//! of the declared field convention. Priors are unit-power: scalar Gaussian
//! or a finite alphabet; pairs may carry correlation rho (jointly Gaussian,
//! or sign-coupled symmetric binary alphabets).
//!
//! Closed forms (jointly Gaussian inputs, D = 1 + 2 snr (1 + rho)):
//!
//! ```text
//! I       = c ln D            (c = 1/2 real, 1 complex circular)
//! E[xi|y] = sqrt(snr) (1+rho)/D * y
//! mmse_i  = 1 - snr (1+rho)^2 / D
//! psi_12  = rho - snr (1+rho)^2 / D
//! ```
//!
//! so `dI/dsnr = c (mmse_1 + mmse_2 + psi_12 + psi_21)` closes exactly.
//! psi is the cross-covariance of estimation errors,
//! `psi_ij = E[(x_i - E[x_i|y]) (x_j - E[x_j|y])*]`; this is the unique
//! bilinear cross-term for which the Gaussian identity holds.
//!
//! Non-Gaussian quantities use Gauss-Hermite quadrature (finite alphabets)
//! and chunk-deterministic Monte Carlo: fixed sample chunks with per-chunk
//! subseeds, combined in chunk order, so results are byte-identical for any
//! thread count.

use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;
use crate::rng::{seeded_rng, subseed};
use crate::signal::{Alphabet, FieldConvention};
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Gauss-Hermite order for alphabet mutual information; tripling it moves
/// results by less than 1e-8 for the built-in priors.
pub const QUAD_ORDER: usize = 64;

/// Monte Carlo chunk count; fixed so parallel and serial runs agree.
const MC_CHUNKS: usize = 64;

/// Scalar input prior, normalized to unit second moment.
#[derive(Clone, Debug, PartialEq)]
pub enum Prior {
    /// Zero-mean unit-variance Gaussian of the channel's field.
    Gaussian,
    /// Finite alphabet with probabilities.
    Discrete(Alphabet),
}

impl Prior {
    fn is_gaussian(&self) -> bool {
        matches!(self, Prior::Gaussian)
    }

    fn check_field(&self, field: FieldConvention) -> Result<()> {
        if let (Prior::Discrete(a), FieldConvention::Real) = (self, field) {
            if a.atoms().iter().any(|v| v.im != 0.0) {
                return Err(Error::usage(
                    "real field convention requires real alphabet atoms",
                ));
            }
        }
        Ok(())
    }
}

/// Joint discrete support: (x1 atom, x2 atom, probability).
type JointAtoms = Vec<(Complex64, Complex64, f64)>;

/// Posterior machinery for `y = sqrt(snr) (x1 [+ x2]) + n`.
#[derive(Clone, Debug)]
pub struct ConditionalEstimator {
    priors: Vec<Prior>,
    input_correlation: f64,
    snr: f64,
    field: FieldConvention,
    /// Joint support for all-discrete inputs, built once.
    joint_atoms: Option<JointAtoms>,
}

impl ConditionalEstimator {
    pub fn single(prior: Prior, snr: f64, field: FieldConvention) -> Result<Self> {
        Self::build(vec![prior], 0.0, snr, field)
    }

    pub fn pair(
        prior1: Prior,
        prior2: Prior,
        rho: f64,
        snr: f64,
        field: FieldConvention,
    ) -> Result<Self> {
        Self::build(vec![prior1, prior2], rho, snr, field)
    }

    fn build(priors: Vec<Prior>, rho: f64, snr: f64, field: FieldConvention) -> Result<Self> {
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(Error::construction(format!(
                "snr must be finite and >= 0, got {snr}"
            )));
        }
        if !(rho.is_finite() && (-1.0..=1.0).contains(&rho)) {
            return Err(Error::construction(format!(
                "correlation must lie in [-1, 1], got {rho}"
            )));
        }
        for p in &priors {
            p.check_field(field)?;
        }
        let joint_atoms = match priors.as_slice() {
            [Prior::Discrete(a)] => Some(
                a.atoms()
                    .iter()
                    .zip(a.probs())
                    .map(|(&atom, &p)| (atom, Complex64::new(0.0, 0.0), p))
                    .collect(),
            ),
            [Prior::Discrete(a1), Prior::Discrete(a2)] => {
                Some(joint_discrete_support(a1, a2, rho)?)
            }
            [Prior::Gaussian, Prior::Gaussian] | [Prior::Gaussian] => None,
            [_, _] => {
                return Err(Error::usage(
                    "pair priors must be both Gaussian or both discrete",
                ));
            }
            _ => return Err(Error::construction("1 or 2 priors required")),
        };
        Ok(ConditionalEstimator {
            priors,
            input_correlation: rho,
            snr,
            field,
            joint_atoms,
        })
    }

    pub fn n_inputs(&self) -> usize {
        self.priors.len()
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn field_convention(&self) -> FieldConvention {
        self.field
    }

    pub fn input_correlation(&self) -> f64 {
        self.input_correlation
    }

    /// The same estimator at a different operating snr.
    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        Self::build(self.priors.clone(), self.input_correlation, snr, self.field)
    }

    fn all_gaussian(&self) -> bool {
        self.priors.iter().all(Prior::is_gaussian)
    }

    /// Squared-distance scale of the noise density exponent:
    /// exp(-beta |y - m|^2) with beta = 1/2 real, 1 complex.
    fn beta(&self) -> f64 {
        match self.field {
            FieldConvention::Real => 0.5,
            FieldConvention::ComplexCircular => 1.0,
        }
    }

    /// log of the noise density at distance-squared d2 from its mean.
    fn ln_noise_density(&self, d2: f64) -> f64 {
        match self.field {
            FieldConvention::Real => -0.5 * (2.0 * PI).ln() - 0.5 * d2,
            FieldConvention::ComplexCircular => -PI.ln() - d2,
        }
    }

    /// Conditional means E[x_i | y], one per input.
    pub fn cond_mean(&self, y: Complex64) -> Vec<Complex64> {
        let s = self.snr;
        if let Some(atoms) = &self.joint_atoms {
            // Posterior-weighted atom sums with a log-sum-exp shift.
            let rs = s.sqrt();
            let beta = self.beta();
            let d2: Vec<f64> = atoms
                .iter()
                .map(|(a, b, _)| beta * (y - rs * (a + b)).norm_sqr())
                .collect();
            let dmin = d2.iter().copied().fold(f64::INFINITY, f64::min);
            let mut z = 0.0;
            let mut m1 = Complex64::new(0.0, 0.0);
            let mut m2 = Complex64::new(0.0, 0.0);
            for ((a, b, p), d) in atoms.iter().zip(&d2) {
                let w = p * (dmin - d).exp();
                z += w;
                m1 += w * a;
                m2 += w * b;
            }
            let mut out = vec![m1 / z];
            if self.n_inputs() == 2 {
                out.push(m2 / z);
            }
            return out;
        }
        // Jointly Gaussian: linear conditioning.
        let gain = match self.n_inputs() {
            1 => s.sqrt() / (1.0 + s),
            _ => {
                let rho = self.input_correlation;
                s.sqrt() * (1.0 + rho) / (1.0 + 2.0 * s * (1.0 + rho))
            }
        };
        vec![gain * y; self.n_inputs()]
    }

    /// Draws one joint input realization.
    fn draw_inputs(&self, rng: &mut impl rand::Rng) -> Vec<Complex64> {
        if let Some(atoms) = &self.joint_atoms {
            let u: f64 = Uniform::new(0.0, 1.0).sample(rng);
            let mut acc = 0.0;
            let mut pick = &atoms[atoms.len() - 1];
            for entry in atoms {
                acc += entry.2;
                if u < acc {
                    pick = entry;
                    break;
                }
            }
            let mut out = vec![pick.0];
            if self.n_inputs() == 2 {
                out.push(pick.1);
            }
            return out;
        }
        let z1 = self.draw_noise(rng);
        if self.n_inputs() == 1 {
            return vec![z1];
        }
        let z2 = self.draw_noise(rng);
        let rho = self.input_correlation;
        vec![z1, rho * z1 + (1.0 - rho * rho).sqrt() * z2]
    }

    fn draw_noise(&self, rng: &mut impl rand::Rng) -> Complex64 {
        match self.field {
            FieldConvention::Real => {
                let v: f64 = StandardNormal.sample(rng);
                Complex64::new(v, 0.0)
            }
            FieldConvention::ComplexCircular => {
                let a: f64 = StandardNormal.sample(rng);
                let b: f64 = StandardNormal.sample(rng);
                Complex64::new(a, b) / 2.0f64.sqrt()
            }
        }
    }

    fn draw_observation(&self, rng: &mut impl rand::Rng) -> (Vec<Complex64>, Complex64) {
        let x = self.draw_inputs(rng);
        let n = self.draw_noise(rng);
        let sum: Complex64 = x.iter().sum();
        (x.clone(), self.snr.sqrt() * sum + n)
    }

    /// ln p_Y(y) of the marginal observation density.
    fn ln_marginal(&self, y: Complex64) -> f64 {
        if let Some(atoms) = &self.joint_atoms {
            let rs = self.snr.sqrt();
            let beta = self.beta();
            // log-sum-exp over atoms.
            let terms: Vec<f64> = atoms
                .iter()
                .map(|(a, b, p)| p.ln() - beta * (y - rs * (a + b)).norm_sqr())
                .collect();
            let tmax = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let rest: f64 = terms.iter().map(|t| (t - tmax).exp()).sum();
            self.ln_noise_density(0.0) + tmax + rest.ln()
        } else {
            // y is zero-mean Gaussian with variance D per field convention.
            let d = self.marginal_variance();
            match self.field {
                FieldConvention::Real => -0.5 * (2.0 * PI * d).ln() - y.re * y.re / (2.0 * d),
                FieldConvention::ComplexCircular => -(PI * d).ln() - y.norm_sqr() / d,
            }
        }
    }

    fn marginal_variance(&self) -> f64 {
        match self.n_inputs() {
            1 => 1.0 + self.snr,
            _ => 1.0 + 2.0 * self.snr * (1.0 + self.input_correlation),
        }
    }
}

/// Joint pmf of a correlated discrete pair. Independent pairs take the
/// product law; rho = +/-1 copies (negates) identical alphabets; other rho
/// uses the sign-flip coupling of symmetric binary alphabets.
fn joint_discrete_support(a1: &Alphabet, a2: &Alphabet, rho: f64) -> Result<JointAtoms> {
    if rho == 0.0 {
        let mut out = Vec::with_capacity(a1.atoms().len() * a2.atoms().len());
        for (&a, &pa) in a1.atoms().iter().zip(a1.probs()) {
            for (&b, &pb) in a2.atoms().iter().zip(a2.probs()) {
                out.push((a, b, pa * pb));
            }
        }
        return Ok(out);
    }
    if rho.abs() == 1.0 {
        if a1 != a2 {
            return Err(Error::usage(
                "correlation +/-1 requires identical alphabets",
            ));
        }
        return Ok(a1
            .atoms()
            .iter()
            .zip(a1.probs())
            .map(|(&a, &p)| (a, rho.signum() * a, p))
            .collect());
    }
    if a1 != a2 || !a1.is_symmetric_binary() {
        return Err(Error::usage(
            "intermediate correlation requires identical symmetric binary alphabets",
        ));
    }
    let keep = (1.0 + rho) / 2.0;
    let mut out = Vec::with_capacity(4);
    for (&a, &p) in a1.atoms().iter().zip(a1.probs()) {
        out.push((a, a, p * keep));
        out.push((a, -a, p * (1.0 - keep)));
    }
    Ok(out)
}

/// Closed-form mutual information in nats; Gaussian priors only.
pub fn closed_form_mi(est: &ConditionalEstimator) -> Result<f64> {
    if !est.all_gaussian() {
        return Err(Error::usage(
            "closed-form mutual information requires Gaussian priors",
        ));
    }
    let d = est.marginal_variance();
    Ok(derivative_constant(est.field) * d.ln())
}

/// Closed-form per-input MMSE; Gaussian priors only.
pub fn closed_form_mmse(est: &ConditionalEstimator) -> Result<Vec<f64>> {
    if !est.all_gaussian() {
        return Err(Error::usage("closed-form mmse requires Gaussian priors"));
    }
    let s = est.snr;
    match est.n_inputs() {
        1 => Ok(vec![1.0 / (1.0 + s)]),
        _ => {
            let rho = est.input_correlation;
            let d = 1.0 + 2.0 * s * (1.0 + rho);
            let m = 1.0 - s * (1.0 + rho) * (1.0 + rho) / d;
            Ok(vec![m, m])
        }
    }
}

/// Closed-form psi_12 (cross-covariance of estimation errors); Gaussian
/// pairs only.
pub fn closed_form_psi(est: &ConditionalEstimator) -> Result<Complex64> {
    if !est.all_gaussian() || est.n_inputs() != 2 {
        return Err(Error::usage("closed-form psi requires a Gaussian pair"));
    }
    let s = est.snr;
    let rho = est.input_correlation;
    let d = 1.0 + 2.0 * s * (1.0 + rho);
    Ok(Complex64::new(rho - s * (1.0 + rho) * (1.0 + rho) / d, 0.0))
}

/// GSV derivative constant c: 1/2 for the real field, 1 for complex
/// circular.
pub fn derivative_constant(field: FieldConvention) -> f64 {
    field.gsv_constant()
}

fn check_mc_args(n_samples: usize) -> Result<()> {
    if n_samples < 1000 {
        return Err(Error::usage(format!(
            "Monte Carlo needs n_samples >= 1000, got {n_samples}"
        )));
    }
    Ok(())
}

/// Splits `n` into the fixed chunk layout used by every MC routine.
fn chunk_sizes(n: usize) -> Vec<usize> {
    let chunks = MC_CHUNKS.min(n);
    let base = n / chunks;
    let extra = n % chunks;
    (0..chunks).map(|c| base + usize::from(c < extra)).collect()
}

/// Monte Carlo E|x_i - E[x_i|y]|^2 with its standard error.
pub fn mmse_mc(
    est: &ConditionalEstimator,
    input_index: usize,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    check_mc_args(n_samples)?;
    if input_index >= est.n_inputs() {
        return Err(Error::usage(format!(
            "input_index {input_index} out of range for {} inputs",
            est.n_inputs()
        )));
    }
    let stats: Vec<(f64, f64)> = chunk_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(c, m)| {
            let mut rng = seeded_rng(subseed(seed, c as u64));
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..m {
                let (x, y) = est.draw_observation(&mut rng);
                let e = (x[input_index] - est.cond_mean(y)[input_index]).norm_sqr();
                sum += e;
                sumsq += e * e;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = stats
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// Monte Carlo psi estimates: (psi12, psi21, stderr). psi21 is the exact
/// conjugate of psi12 by construction of the per-sample products.
pub fn psi_mc(
    est: &ConditionalEstimator,
    n_samples: usize,
    seed: u64,
) -> Result<(Complex64, Complex64, f64)> {
    check_mc_args(n_samples)?;
    if est.n_inputs() != 2 {
        return Err(Error::usage("psi requires a two-input estimator"));
    }
    let stats: Vec<(Complex64, f64)> = chunk_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(c, m)| {
            let mut rng = seeded_rng(subseed(seed, c as u64));
            let mut sum = Complex64::new(0.0, 0.0);
            let mut sumsq = 0.0;
            for _ in 0..m {
                let (x, y) = est.draw_observation(&mut rng);
                let xhat = est.cond_mean(y);
                let v = (x[0] - xhat[0]) * (x[1] - xhat[1]).conj();
                sum += v;
                sumsq += v.norm_sqr();
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = stats
        .iter()
        .fold((Complex64::new(0.0, 0.0), 0.0), |(a, b), (s, q)| {
            (a + s, b + q)
        });
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
    Ok((mean, mean.conj(), (var / n).sqrt()))
}

/// Mutual information evaluation method.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMethod {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

/// I(x; y) or I(x1, x2; y) in nats, with a standard error for Monte Carlo.
pub fn mutual_info(
    est: &ConditionalEstimator,
    method: MiMethod,
    n_samples: usize,
    seed: u64,
) -> Result<(f64, Option<f64>)> {
    match method {
        MiMethod::ClosedForm => Ok((closed_form_mi(est)?, None)),
        MiMethod::Quadrature => Ok((quadrature_mi(est)?, None)),
        MiMethod::MonteCarlo => {
            let (v, se) = monte_carlo_mi(est, n_samples, seed)?;
            Ok((v, Some(se)))
        }
    }
}

/// Gauss-Hermite mutual information for finite alphabets: the observation
/// depends on the inputs only through their sum, so pairs reduce to the
/// composite sum alphabet. I = E[ln p(y|x)] - E[ln p_Y(y)], with the first
/// term the exact noise entropy and the second integrated per atom.
fn quadrature_mi(est: &ConditionalEstimator) -> Result<f64> {
    let atoms = est
        .joint_atoms
        .as_ref()
        .ok_or_else(|| Error::usage("quadrature mutual information requires discrete priors"))?;
    let (nodes, weights) = gauss_hermite(QUAD_ORDER)?;
    let rs = est.snr.sqrt();
    let root_pi = PI.sqrt();
    let mut expect_ln_py = 0.0;
    match est.field {
        FieldConvention::Real => {
            // n = sqrt(2) u, u Gauss-Hermite distributed.
            for (a, b, p) in atoms {
                let center = rs * (a + b);
                let mut acc = 0.0;
                for (u, w) in nodes.iter().zip(&weights) {
                    let y = center + Complex64::new(2.0f64.sqrt() * u, 0.0);
                    acc += w * est.ln_marginal(y);
                }
                expect_ln_py += p * acc / root_pi;
            }
        }
        FieldConvention::ComplexCircular => {
            // n = u + j v with u, v ~ N(0, 1/2): tensor rule with unit
            // Gauss-Hermite scaling.
            for (a, b, p) in atoms {
                let center = rs * (a + b);
                let mut acc = 0.0;
                for (u, wu) in nodes.iter().zip(&weights) {
                    for (v, wv) in nodes.iter().zip(&weights) {
                        let y = center + Complex64::new(*u, *v);
                        acc += wu * wv * est.ln_marginal(y);
                    }
                }
                expect_ln_py += p * acc / (root_pi * root_pi);
            }
        }
    }
    let expect_ln_cond = match est.field {
        FieldConvention::Real => -0.5 * (2.0 * PI).ln() - 0.5,
        FieldConvention::ComplexCircular => -PI.ln() - 1.0,
    };
    Ok(expect_ln_cond - expect_ln_py)
}

/// Monte Carlo mutual information: the average log-likelihood ratio
/// ln p(y|x) - ln p_Y(y).
fn monte_carlo_mi(est: &ConditionalEstimator, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    check_mc_args(n_samples)?;
    let rs = est.snr.sqrt();
    let stats: Vec<(f64, f64)> = chunk_sizes(n_samples)
        .into_par_iter()
        .enumerate()
        .map(|(c, m)| {
            let mut rng = seeded_rng(subseed(seed, c as u64));
            let mut sum = 0.0;
            let mut sumsq = 0.0;
            for _ in 0..m {
                let (x, y) = est.draw_observation(&mut rng);
                let sum_x: Complex64 = x.iter().sum();
                let d2 = (y - rs * sum_x).norm_sqr();
                let v = est.ln_noise_density(d2) - est.ln_marginal(y);
                sum += v;
                sumsq += v * v;
            }
            (sum, sumsq)
        })
        .collect();
    let (sum, sumsq) = stats
        .iter()
        .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
    let n = n_samples as f64;
    let mean = sum / n;
    let var = ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok((mean, (var / n).sqrt()))
}

/// One snr grid point of an I-MMSE sweep.
#[derive(Clone, Debug, Serialize)]
pub struct ImmsePoint {
    pub snr: f64,
    pub mi: f64,
    /// Central-difference derivative of mi, step `delta`.
    pub dmi_dsnr: f64,
    pub delta: f64,
    pub mmse: Vec<f64>,
    pub mmse_stderr: Vec<f64>,
    pub psi12_re: f64,
    pub psi12_im: f64,
    pub psi_stderr: f64,
    /// dmi_dsnr - c (sum mmse + 2 Re psi12).
    pub residual: f64,
    pub residual_stderr: f64,
}

/// I-MMSE sweep report: identity components on an snr grid.
#[derive(Clone, Debug, Serialize)]
pub struct ImmseReport {
    pub field_convention: FieldConvention,
    pub derivative_constant: f64,
    pub n_inputs: usize,
    pub input_correlation: f64,
    pub mi_method: MiMethod,
    pub n_samples: usize,
    pub seed: u64,
    pub points: Vec<ImmsePoint>,
}

impl ImmseReport {
    /// CSV with one row per snr point. Single-input reports leave the
    /// x2 and psi columns empty.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "snr,mi,dmi_dsnr,delta,mmse1,mmse1_stderr,mmse2,mmse2_stderr,\
             psi12_re,psi12_im,psi_stderr,residual,residual_stderr\n",
        );
        for p in &self.points {
            let pair = self.n_inputs == 2;
            let opt = |on: bool, v: f64| if on { format!("{v}") } else { String::new() };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                p.snr,
                p.mi,
                p.dmi_dsnr,
                p.delta,
                p.mmse[0],
                p.mmse_stderr[0],
                opt(pair, p.mmse.get(1).copied().unwrap_or(0.0)),
                opt(pair, p.mmse_stderr.get(1).copied().unwrap_or(0.0)),
                opt(pair, p.psi12_re),
                opt(pair, p.psi12_im),
                opt(pair, p.psi_stderr),
                p.residual,
                p.residual_stderr,
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("immse report serialization")
    }

    /// Largest |residual| over the grid.
    pub fn max_abs_residual(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.residual.abs())
            .fold(0.0, f64::max)
    }
}

/// Central-difference step at snr s: small enough that the O(delta^2)
/// derivative error stays below 1e-3 for the built-in priors, and never
/// crossing zero.
fn derivative_step(s: f64) -> f64 {
    (0.02 * (1.0 + s)).min(s / 2.0)
}

/// Mutual information via the best deterministic method for the priors.
fn mi_auto(est: &ConditionalEstimator) -> Result<(f64, MiMethod)> {
    if est.all_gaussian() {
        Ok((closed_form_mi(est)?, MiMethod::ClosedForm))
    } else {
        Ok((quadrature_mi(est)?, MiMethod::Quadrature))
    }
}

/// Sweeps the I-MMSE identity over an snr grid: mutual information, its
/// central-difference derivative, every mmse and psi component, and the
/// identity residual per point. Gaussian priors use closed forms; discrete
/// priors use quadrature information and Monte Carlo moments.
pub fn immse_sweep(
    est: &ConditionalEstimator,
    snr_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<ImmseReport> {
    if snr_grid.len() < 3 {
        return Err(Error::usage(
            "snr grid needs >= 3 points for central differences",
        ));
    }
    if snr_grid[0] <= 0.0 || snr_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage(
            "snr grid must be positive and strictly increasing",
        ));
    }
    let c = derivative_constant(est.field);
    let points: Vec<Result<ImmsePoint>> = snr_grid
        .par_iter()
        .enumerate()
        .map(|(i, &s)| {
            let point_seed = subseed(seed, i as u64);
            let at = est.with_snr(s)?;
            let (mi, _) = mi_auto(&at)?;
            let delta = derivative_step(s);
            let (hi, _) = mi_auto(&est.with_snr(s + delta)?)?;
            let (lo, _) = mi_auto(&est.with_snr(s - delta)?)?;
            let dmi = (hi - lo) / (2.0 * delta);
            let (mmse, mmse_stderr) = if at.all_gaussian() {
                (closed_form_mmse(&at)?, vec![0.0; at.n_inputs()])
            } else {
                let mut vals = Vec::new();
                let mut errs = Vec::new();
                for idx in 0..at.n_inputs() {
                    let (v, e) = mmse_mc(&at, idx, n_samples, subseed(point_seed, idx as u64))?;
                    vals.push(v);
                    errs.push(e);
                }
                (vals, errs)
            };
            let (psi12, psi_stderr) = if at.n_inputs() == 2 {
                if at.all_gaussian() {
                    (closed_form_psi(&at)?, 0.0)
                } else {
                    let (p12, _, se) = psi_mc(&at, n_samples, subseed(point_seed, 9))?;
                    (p12, se)
                }
            } else {
                (Complex64::new(0.0, 0.0), 0.0)
            };
            let identity_sum = mmse.iter().sum::<f64>() + 2.0 * psi12.re;
            let residual = dmi - c * identity_sum;
            let moment_var: f64 =
                mmse_stderr.iter().map(|e| e * e).sum::<f64>() + 4.0 * psi_stderr * psi_stderr;
            let residual_stderr = c * moment_var.sqrt();
            Ok(ImmsePoint {
                snr: s,
                mi,
                dmi_dsnr: dmi,
                delta,
                mmse,
                mmse_stderr,
                psi12_re: psi12.re,
                psi12_im: psi12.im,
                psi_stderr,
                residual,
                residual_stderr,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(points.len());
    for p in points {
        rows.push(p?);
    }
    let mi_method = if est.all_gaussian() {
        MiMethod::ClosedForm
    } else {
        MiMethod::Quadrature
    };
    Ok(ImmseReport {
        field_convention: est.field,
        derivative_constant: c,
        n_inputs: est.n_inputs(),
        input_correlation: est.input_correlation,
        mi_method,
        n_samples,
        seed,
        points: rows,
    })
}
