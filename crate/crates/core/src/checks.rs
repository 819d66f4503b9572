//! End-to-end property checks shared by the CLI `validate` subcommand and
//! the acceptance tests. Every runner pins its own scale, seeds, and
//! tolerances, and reports each measured residual next to the bound it was
//! held to, so the command line and the test gate always agree.
//!
//! The conditional-psd runner carries its own oracle: a finite-dimensional
//! Wiener solve on the length-n circulant model (time-domain covariance
//! matrices, explicit filter and decimation operators, one linear solve),
//! evaluated without the aliased-ratio formula it cross-checks.

use crate::error::{Error, Result};
use crate::estimation::{
    closed_form_mmse, closed_form_psi, derivative_constant, immse_sweep, mmse_mc, psi_mc,
    ConditionalEstimator, Prior,
};
use crate::sampling::{conditional_psd, mmse_freq, FilterShape, SamplingSpec};
use crate::signal::{
    analytic_signal, Alphabet, FieldConvention, MixtureChannel, Signal, SourceModel,
};
use crate::tfa::{cross_wigner, mixture_wd_check, wigner, SpectralDensity, TFDist};
use crate::tfimmse::{
    evaluate_terms, reduce_independent, tf_immse_derivative, ImmseTerm, Reduction, Variant,
    INDEPENDENT_INDICES,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// Relative bound for the WD marginal, energy, and realness residuals.
const WD_TOL: f64 = 1e-9;
/// Relative bound for the quadratic superposition residual.
const MIX_TOL: f64 = 1e-9;
/// Absolute bound for derivative-identity residuals (central differences).
const IDENTITY_TOL: f64 = 2e-3;
/// Absolute bound for hand-evaluated conditional-psd cases.
const PSD_EXACT_TOL: f64 = 1e-12;
/// Absolute bound for the lossless-case mmse.
const PSD_MMSE_TOL: f64 = 1e-9;
/// Relative bound against the finite-dimensional Wiener solve.
const WIENER_REL_TOL: f64 = 0.05;
/// Relative bound for exact term-table identities.
const TF_EXACT_TOL: f64 = 1e-12;
/// Relative bound for the real-input regrouping identity.
const REGROUP_TOL: f64 = 1e-9;
/// Monte Carlo sample count for the estimation checks.
const MC_SAMPLES: usize = 1_000_000;

/// Outcome of one check: a pass flag plus measured values beside their
/// bounds.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub name: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CheckReport {
    fn new(name: &'static str) -> Self {
        CheckReport {
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    /// Records `value <= bound`, failing the check otherwise.
    fn bound(&mut self, label: &str, value: f64, bound: f64) {
        let ok = value <= bound;
        self.passed &= ok;
        self.details.push(format!(
            "{}: {label} {value:.3e} <= {bound:.3e}",
            if ok { "ok" } else { "FAIL" }
        ));
    }

    /// Records a hard assertion.
    fn require(&mut self, label: &str, ok: bool) {
        self.passed &= ok;
        self.details
            .push(format!("{}: {label}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    /// One pass/fail line followed by indented details.
    pub fn render(&self) -> String {
        let mut out = format!(
            "{} {}\n",
            if self.passed { "PASS" } else { "FAIL" },
            self.name
        );
        for d in &self.details {
            out.push_str("  ");
            out.push_str(d);
            out.push('\n');
        }
        out
    }
}

fn run(name: &'static str, body: impl FnOnce(&mut CheckReport) -> Result<()>) -> CheckReport {
    let mut report = CheckReport::new(name);
    if let Err(e) = body(&mut report) {
        report.passed = false;
        report.details.push(format!("error: {e}"));
    }
    report
}

/// Worst-case WD residuals of one signal: per-slice frequency marginal vs
/// instantaneous power, total energy vs `||x||^2 dt`, and grid realness.
/// All three are relative to their natural scales.
#[derive(Clone, Copy, Debug, Default)]
pub struct WdSummary {
    pub marginal_rel: f64,
    pub energy_rel: f64,
    pub realness_rel: f64,
}

impl WdSummary {
    fn fold(self, other: WdSummary) -> WdSummary {
        WdSummary {
            marginal_rel: self.marginal_rel.max(other.marginal_rel),
            energy_rel: self.energy_rel.max(other.energy_rel),
            realness_rel: self.realness_rel.max(other.realness_rel),
        }
    }

    pub fn worst(self) -> f64 {
        self.marginal_rel
            .max(self.energy_rel)
            .max(self.realness_rel)
    }
}

/// Measures the WD property residuals of `w = wigner(x)`.
pub fn wd_summary(x: &Signal, w: &TFDist) -> WdSummary {
    let df = w.df();
    let mut marginal_rel = 0.0f64;
    for t in 0..w.nt() {
        let marginal: f64 = w.row(t).iter().map(|v| v.re).sum::<f64>() * df;
        let expect = x.samples()[t].norm_sqr();
        marginal_rel = marginal_rel.max((marginal - expect).abs() / expect.max(1e-30));
    }
    let total = w.integrate().re;
    let expect = x.energy() * x.dt();
    let energy_rel = (total - expect).abs() / expect.abs().max(1e-30);
    let peak = w.max_abs();
    let realness_rel = if peak > 0.0 { w.max_imag() / peak } else { 0.0 };
    WdSummary {
        marginal_rel,
        energy_rel,
        realness_rel,
    }
}

fn white_psd() -> Result<SpectralDensity> {
    SpectralDensity::flat_band(1.0, 0.5, 0.5, 1.0 / 64.0)
}

/// WD property suite: 50 random analytic signals of length 256, worst
/// marginal / energy / realness residuals bounded at 1e-9 relative.
pub fn check_wd_properties() -> CheckReport {
    run("wd-properties", |r| {
        let model = SourceModel::gaussian(white_psd()?, 0x5731);
        let mut worst = WdSummary::default();
        for rr in 0..50 {
            let x = analytic_signal(&model.realize(256, 1.0, rr)?)?;
            let w = wigner(&x);
            worst = worst.fold(wd_summary(&x, &w));
        }
        r.bound(
            "worst slice marginal residual over 50 analytic signals",
            worst.marginal_rel,
            WD_TOL,
        );
        r.bound("worst energy residual", worst.energy_rel, WD_TOL);
        r.bound("worst realness residual", worst.realness_rel, WD_TOL);
        Ok(())
    })
}

/// Quadratic superposition: `W_{x1+x2} - W_{x1} - W_{x2} - 2 Re W_{x1x2}`
/// vanishes to rounding on 50 random pairs, measured against the mixture
/// peak. Also states the cross-term sign convention.
pub fn check_mixture_identity() -> CheckReport {
    run("mixture-superposition", |r| {
        let m1 = SourceModel::gaussian(white_psd()?, 0xA1);
        let m2 = SourceModel::gaussian(white_psd()?, 0xB2);
        let mut worst = 0.0f64;
        for rr in 0..50 {
            let x1 = m1.realize(256, 1.0, rr)?;
            let x2 = m2.realize(256, 1.0, rr)?;
            let residual = mixture_wd_check(&x1, &x2)?;
            let scale = wigner(&x1.add(&x2)?).max_abs();
            worst = worst.max(residual / scale);
        }
        r.bound(
            "worst superposition residual over 50 pairs (relative to mixture peak)",
            worst,
            MIX_TOL,
        );
        r.note(
            "sign note: the interference term enters with a plus sign, \
             W_{x1+x2} = W_{x1} + W_{x2} + 2 Re W_{x1x2}; accounts that \
             subtract the cross term do not satisfy the quadratic expansion, \
             and the residual above is evaluated against the plus form",
        );
        Ok(())
    })
}

/// Single-user derivative identity on snr {0.5, 1, 2, 5}: closed-form real
/// Gaussian residuals within 2e-3, and binary antipodal inputs within
/// 2e-3 plus Monte Carlo slack at 10^6 samples.
pub fn check_single_user_identity() -> CheckReport {
    run("single-user-identity", |r| {
        let grid = [0.5, 1.0, 2.0, 5.0];
        let est = ConditionalEstimator::single(Prior::Gaussian, 1.0, FieldConvention::Real)?;
        let sweep = immse_sweep(&est, &grid, 1000, 0xA3)?;
        r.bound(
            "gaussian: max |dI/dsnr - mmse/2| over the grid",
            sweep.max_abs_residual(),
            IDENTITY_TOL,
        );
        let bpsk = ConditionalEstimator::single(
            Prior::Discrete(Alphabet::bpsk()),
            1.0,
            FieldConvention::Real,
        )?;
        let sweep_b = immse_sweep(&bpsk, &grid, MC_SAMPLES, 0xB5)?;
        for p in &sweep_b.points {
            r.bound(
                &format!("bpsk snr {}: |residual|", p.snr),
                p.residual.abs(),
                IDENTITY_TOL + 3.0 * p.residual_stderr,
            );
        }
        Ok(())
    })
}

/// Two-user decomposition at snr 1, real field: independent inputs against
/// the pinned constants (1/3, 2/3, -1/3), then rho = 0.5 against the joint
/// Gaussian closed forms, with Monte Carlo moments at 10^6 samples.
pub fn check_two_user_decomposition() -> CheckReport {
    run("two-user-decomposition", |r| {
        let field = FieldConvention::Real;
        let c = derivative_constant(field);
        for (rho, tag) in [(0.0, "independent"), (0.5, "rho 0.5")] {
            let est =
                ConditionalEstimator::pair(Prior::Gaussian, Prior::Gaussian, rho, 1.0, field)?;
            let want_mmse = closed_form_mmse(&est)?;
            let want_psi = closed_form_psi(&est)?;
            let want_dmi = c * (want_mmse.iter().sum::<f64>() + 2.0 * want_psi.re);
            if rho == 0.0 {
                r.require(
                    "closed forms at rho 0 equal 1/3, 2/3, -1/3",
                    (want_dmi - 1.0 / 3.0).abs() <= 1e-15
                        && want_mmse.iter().all(|m| (m - 2.0 / 3.0).abs() <= 1e-15)
                        && (want_psi.re + 1.0 / 3.0).abs() <= 1e-15
                        && want_psi.im == 0.0,
                );
            }
            let sweep = immse_sweep(&est, &[0.5, 1.0, 2.0], 1000, 0x77)?;
            let dmi = sweep.points[1].dmi_dsnr;
            r.bound(
                &format!("{tag}: |dI/dsnr - exact|"),
                (dmi - want_dmi).abs(),
                IDENTITY_TOL,
            );
            let (m1, se1) = mmse_mc(&est, 0, MC_SAMPLES, 0x41)?;
            let (m2, se2) = mmse_mc(&est, 1, MC_SAMPLES, 0x42)?;
            let (p12, p21, sep) = psi_mc(&est, MC_SAMPLES, 0x43)?;
            r.bound(
                &format!("{tag}: |mmse1 - exact|"),
                (m1 - want_mmse[0]).abs(),
                3.0 * se1,
            );
            r.bound(
                &format!("{tag}: |mmse2 - exact|"),
                (m2 - want_mmse[1]).abs(),
                3.0 * se2,
            );
            r.bound(
                &format!("{tag}: |psi12 - exact|"),
                (p12 - want_psi).norm(),
                3.0 * sep,
            );
            r.require(&format!("{tag}: psi21 = conj(psi12)"), p21 == p12.conj());
            let ident = (dmi - c * (m1 + m2 + 2.0 * p12.re)).abs();
            let ident_se = c * (se1 * se1 + se2 * se2 + 4.0 * sep * sep).sqrt();
            r.bound(
                &format!("{tag}: identity residual"),
                ident,
                IDENTITY_TOL + 3.0 * ident_se,
            );
        }
        Ok(())
    })
}

/// Exact finite-dimensional Wiener MMSE of the circulant model behind a
/// sampling spec: time-domain covariances from the densities, an explicit
/// filter-and-decimate observation operator, and one linear solve. The
/// grid's rate is taken as 1, so `1/fs_sub` must be an integer decimation.
pub fn wiener_mmse_circulant(
    s_x: &SpectralDensity,
    s_n: &SpectralDensity,
    spec: &SamplingSpec,
) -> Result<f64> {
    let n = s_x.len();
    let freqs = s_x.freqs();
    if s_n.freqs() != freqs {
        return Err(Error::shape("densities must share one grid"));
    }
    let decim_f = 1.0 / spec.fs_sub();
    let decim = decim_f.round() as usize;
    if decim == 0 || (decim_f - decim as f64).abs() > 1e-9 || !n.is_multiple_of(decim) {
        return Err(Error::usage(
            "circulant Wiener solve needs an integer decimation dividing the grid",
        ));
    }
    let gains: Vec<f64> = freqs.iter().map(|&f| spec.filter().response(f)).collect();
    let cx = circulant_kernel(freqs, s_x.values(), s_x.df());
    let cn = circulant_kernel(freqs, s_n.values(), s_n.df());
    let g = circulant_kernel(freqs, &gains, 1.0 / n as f64);
    let c_x = circulant(&cx);
    let c = &c_x + circulant(&cn);
    let gm = circulant(&g);
    let m = n / decim;
    let b = DMatrix::from_fn(m, n, |k, j| gm[(k * decim, j)]);
    let c_xy = &c_x * b.adjoint();
    let s_y = &b * &c * b.adjoint();
    let z = s_y
        .lu()
        .solve(&c_xy.adjoint())
        .ok_or_else(|| Error::construction("singular observation covariance"))?;
    let est = &c_xy * &z;
    let mut tr = 0.0;
    for i in 0..n {
        tr += (c_x[(i, i)] - est[(i, i)]).re;
    }
    Ok(tr / n as f64)
}

/// `kernel[d] = scale * sum_m gains[m] e^{j 2 pi f_m d}` for integer lags.
fn circulant_kernel(freqs: &[f64], gains: &[f64], scale: f64) -> Vec<Complex64> {
    (0..freqs.len())
        .map(|d| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&f, &g) in freqs.iter().zip(gains) {
                acc += g * Complex64::from_polar(1.0, TAU * f * d as f64);
            }
            scale * acc
        })
        .collect()
}

fn circulant(kernel: &[Complex64]) -> DMatrix<Complex64> {
    let n = kernel.len();
    DMatrix::from_fn(n, n, |a, b| kernel[(a + n - b) % n])
}

/// Conditional PSD suite: lossless sampling reproduces the input density,
/// the half-rate flat case matches the two-replica hand value, and a
/// band-limited case matches the finite-dimensional Wiener solve.
pub fn check_conditional_psd() -> CheckReport {
    run("conditional-psd", |r| {
        let step = 1.0 / 512.0;
        let s_x = SpectralDensity::flat_band(1.25, 0.2, 0.5, step)?;
        let zero = SpectralDensity::new(s_x.freqs().to_vec(), vec![0.0; s_x.len()])?;
        let spec = SamplingSpec::new(0.5, FilterShape::IdealLowpass { cutoff: 0.25 }, 4)?;
        let cpsd = conditional_psd(&s_x, &zero, &spec)?;
        let mut worst = 0.0f64;
        for (f, v) in cpsd.freqs().iter().zip(cpsd.values()) {
            worst = worst.max((v - s_x.sample_at(*f)).abs());
        }
        r.bound("lossless: worst |S_XgY - S_X|", worst, PSD_EXACT_TOL);
        r.bound(
            "lossless: mmse",
            mmse_freq(&s_x, &cpsd, &spec)?.abs(),
            PSD_MMSE_TOL,
        );

        let s_x2 = SpectralDensity::flat_band(1.0, 0.25, 0.5, step)?;
        let s_n2 = SpectralDensity::flat_band(0.5, 0.5, 0.5, step)?;
        let spec2 = SamplingSpec::new(0.25, FilterShape::IdealLowpass { cutoff: 0.25 }, 4)?;
        let cpsd2 = conditional_psd(&s_x2, &s_n2, &spec2)?;
        // Two equal replicas per folded bin: (S^2 + S^2) / 2(S + S_N).
        let hand = 2.0 / 3.0;
        let mut worst2 = 0.0f64;
        for v in cpsd2.values() {
            worst2 = worst2.max((v - hand).abs());
        }
        r.bound("half-rate flat: worst |S_XgY - 2/3|", worst2, PSD_EXACT_TOL);
        let mmse_hand = s_x2.integral() - hand * cpsd2.len() as f64 * cpsd2.df();
        r.bound(
            "half-rate flat: |mmse - hand sum|",
            (mmse_freq(&s_x2, &cpsd2, &spec2)? - mmse_hand).abs(),
            PSD_EXACT_TOL,
        );

        let n = 256;
        let freqs: Vec<f64> = (0..n).map(|m| (m as f64 - 128.0) / 256.0).collect();
        let sx3: Vec<f64> = freqs
            .iter()
            .map(|f| if f.abs() <= 0.2 { 1.0 } else { 0.0 })
            .collect();
        let s_x3 = SpectralDensity::new(freqs.clone(), sx3)?;
        let s_n3 = SpectralDensity::new(freqs, vec![0.1; n])?;
        let spec3 = SamplingSpec::new(0.25, FilterShape::IdealLowpass { cutoff: 0.11 }, 4)?;
        let cpsd3 = conditional_psd(&s_x3, &s_n3, &spec3)?;
        let lib = mmse_freq(&s_x3, &cpsd3, &spec3)?;
        let oracle = wiener_mmse_circulant(&s_x3, &s_n3, &spec3)?;
        r.note(format!(
            "band-limited: aliased-ratio mmse {lib:.6}, length-256 Wiener solve {oracle:.6}"
        ));
        r.bound(
            "band-limited: |mmse - Wiener| / Wiener",
            (lib - oracle).abs() / oracle,
            WIENER_REL_TOL,
        );
        Ok(())
    })
}

/// Term-table suite: structure of the 18 terms on a synthetic grid, the
/// independence bound on a deep complex ensemble (500 realizations of
/// length 256), and the real-input regrouping identity.
pub fn check_tf_term_suite() -> CheckReport {
    run("tf-term-suite", |r| {
        let psd = SpectralDensity::flat_band(1.25, 0.4, 0.5, 0.05)?;
        let x1 = SourceModel::gaussian(psd.clone(), 11).realize(32, 1.0, 0)?;
        let x2 = SourceModel::gaussian(psd, 22).realize(32, 1.0, 0)?;
        let y = x1.add(&x2)?;
        let w1 = wigner(&x1);
        let w2 = wigner(&x2);
        let c12 = cross_wigner(&x1, &x2)?;
        let wy = wigner(&y);
        let spec = SamplingSpec::new(0.5, FilterShape::IdealLowpass { cutoff: 0.25 }, 4)?;
        let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, Variant::SquaredNumerator)?;
        r.require("term table has exactly 18 rows", report.terms.len() == 18);
        let direct: Complex64 = report.terms.iter().map(ImmseTerm::signed).sum();
        r.bound(
            "|total - signed term sum| / scale",
            (report.total - direct).norm() / direct.norm().max(1.0),
            TF_EXACT_TOL,
        );
        let cross_free: Vec<usize> = report
            .terms
            .iter()
            .filter(|t| t.numerator.iter().all(|f| !f.is_cross()))
            .map(|t| t.index)
            .collect();
        r.require(
            "independence subset {1,2,6,7,11,15} is exactly the cross-free terms",
            cross_free == INDEPENDENT_INDICES,
        );

        // Narrowband complex ensemble: the folded-band denominator mean
        // stays several standard errors above zero at this depth, so the
        // bootstrap spread is meaningful rather than ratio-noise.
        let psd6 = SpectralDensity::flat_band(40.0, 0.0125, 0.5, 1.0 / 512.0)?;
        let ch = MixtureChannel::new(
            SourceModel::gaussian(psd6.clone(), 0x1201),
            SourceModel::gaussian(psd6, 0x3405),
            0.0,
            1.0,
            FieldConvention::ComplexCircular,
        )?;
        let spec6 = SamplingSpec::new(0.025, FilterShape::IdealLowpass { cutoff: 0.0125 }, 4)?;
        let (_, rep) = tf_immse_derivative(
            &ch,
            &spec6,
            256,
            1.0,
            500,
            Variant::SquaredNumerator,
            Reduction::None,
        )?;
        let stats = rep
            .ensemble
            .as_ref()
            .ok_or_else(|| Error::construction("stochastic run lost its ensemble stats"))?;
        r.note(format!(
            "independent ensemble: 500 realizations, n 256, guarded cells {}",
            rep.guarded_cells
        ));
        let mut worst_ratio = 0.0f64;
        for term in &rep.terms {
            if INDEPENDENT_INDICES.contains(&term.index) {
                continue;
            }
            let se = stats.term_stderr[term.index - 1];
            worst_ratio = worst_ratio.max(term.value.norm() / (3.0 * se));
        }
        r.bound("worst excluded |term| / (3 stderr)", worst_ratio, 1.0);
        let reduced = reduce_independent(&rep);
        let gap = (reduced.reduced_total - rep.total).norm();
        r.bound(
            "|reduced - full| / (3 aggregate stderr)",
            gap / (3.0 * stats.excluded_sum_stderr),
            1.0,
        );

        let psd_r = SpectralDensity::flat_band(1.25, 0.4, 0.5, 0.05)?;
        let ch_r = MixtureChannel::new(
            SourceModel::gaussian_real(psd_r.clone(), 0x51),
            SourceModel::gaussian_real(psd_r, 0x52),
            0.4,
            1.0,
            FieldConvention::Real,
        )?;
        let spec_r = SamplingSpec::new(0.5, FilterShape::IdealLowpass { cutoff: 0.25 }, 4)?;
        let (_, rep_r) = tf_immse_derivative(
            &ch_r,
            &spec_r,
            128,
            1.0,
            120,
            Variant::SquaredNumerator,
            Reduction::Real,
        )?;
        r.require(
            "real regrouping produced aggregates",
            rep_r.aggregates.is_some(),
        );
        r.bound(
            "real regrouping |reduced - total| / |total|",
            (rep_r.reduced_total - rep_r.total).norm() / rep_r.total.norm(),
            REGROUP_TOL,
        );
        Ok(())
    })
}

/// Reproducibility: reruns of every stochastic report are byte-identical,
/// including on a single-thread pool.
pub fn check_reproducibility() -> CheckReport {
    run("reproducibility", |r| {
        let est = ConditionalEstimator::single(
            Prior::Discrete(Alphabet::bpsk()),
            1.0,
            FieldConvention::Real,
        )?;
        let grid = [0.5, 1.0, 2.0];
        let a = immse_sweep(&est, &grid, 50_000, 0x97)?;
        let b = immse_sweep(&est, &grid, 50_000, 0x97)?;
        r.require(
            "identity sweep reruns byte-identical (json and csv)",
            a.to_json() == b.to_json() && a.to_csv() == b.to_csv(),
        );
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| Error::construction(e.to_string()))?;
        let c = pool.install(|| immse_sweep(&est, &grid, 50_000, 0x97))?;
        r.require(
            "identity sweep byte-identical on a single-thread pool",
            a.to_json() == c.to_json(),
        );

        let psd = SpectralDensity::flat_band(1.25, 0.4, 0.5, 0.05)?;
        let ch = MixtureChannel::new(
            SourceModel::gaussian_real(psd.clone(), 7),
            SourceModel::gaussian_real(psd, 8),
            0.3,
            1.0,
            FieldConvention::Real,
        )?;
        let spec = SamplingSpec::new(0.5, FilterShape::IdealLowpass { cutoff: 0.25 }, 4)?;
        let run_tf =
            || tf_immse_derivative(&ch, &spec, 64, 1.0, 120, Variant::Literal, Reduction::Real);
        let (v1, t1) = run_tf()?;
        let (v2, t2) = run_tf()?;
        r.require(
            "term pipeline reruns byte-identical (scalar, json, csv)",
            v1 == v2 && t1.to_json() == t2.to_json() && t1.to_csv() == t2.to_csv(),
        );

        let x = SourceModel::gaussian(white_psd()?, 0x11).realize(64, 1.0, 3)?;
        r.require(
            "distribution serialization reruns byte-identical (csv)",
            wigner(&x).to_csv() == wigner(&x).to_csv(),
        );
        Ok(())
    })
}

/// Runs every check in its published order.
pub fn run_all() -> Vec<CheckReport> {
    vec![
        check_wd_properties(),
        check_mixture_identity(),
        check_single_user_identity(),
        check_two_user_decomposition(),
        check_conditional_psd(),
        check_tf_term_suite(),
        check_reproducibility(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wiener_solve_agrees_with_the_aliased_ratio_on_a_small_grid() {
        let n = 64;
        let freqs: Vec<f64> = (0..n).map(|m| (m as f64 - 32.0) / 64.0).collect();
        let sx: Vec<f64> = freqs
            .iter()
            .map(|f| if f.abs() <= 0.2 { 1.0 } else { 0.0 })
            .collect();
        let s_x = SpectralDensity::new(freqs.clone(), sx).unwrap();
        let s_n = SpectralDensity::new(freqs, vec![0.1; n]).unwrap();
        let spec = SamplingSpec::new(0.25, FilterShape::IdealLowpass { cutoff: 0.11 }, 4).unwrap();
        let cpsd = conditional_psd(&s_x, &s_n, &spec).unwrap();
        let lib = mmse_freq(&s_x, &cpsd, &spec).unwrap();
        let oracle = wiener_mmse_circulant(&s_x, &s_n, &spec).unwrap();
        assert!((lib - oracle).abs() <= 1e-9 * oracle, "{lib} vs {oracle}");
    }

    #[test]
    fn wiener_solve_is_lossless_at_full_rate_without_noise() {
        let n = 64;
        let freqs: Vec<f64> = (0..n).map(|m| (m as f64 - 32.0) / 64.0).collect();
        let sx: Vec<f64> = freqs
            .iter()
            .map(|f| if f.abs() <= 0.2 { 1.0 } else { 0.0 })
            .collect();
        let s_x = SpectralDensity::new(freqs.clone(), sx).unwrap();
        let s_n = SpectralDensity::new(freqs, vec![1e-9; n]).unwrap();
        let spec = SamplingSpec::new(0.5, FilterShape::IdealLowpass { cutoff: 0.25 }, 4).unwrap();
        let mmse = wiener_mmse_circulant(&s_x, &s_n, &spec).unwrap();
        assert!(mmse.abs() <= 1e-6, "{mmse}");
    }

    #[test]
    fn wiener_solve_rejects_non_integer_decimation() {
        let n = 64;
        let freqs: Vec<f64> = (0..n).map(|m| (m as f64 - 32.0) / 64.0).collect();
        let s_x = SpectralDensity::new(freqs.clone(), vec![1.0; n]).unwrap();
        let s_n = SpectralDensity::new(freqs, vec![0.1; n]).unwrap();
        let spec = SamplingSpec::new(0.3, FilterShape::IdealLowpass { cutoff: 0.15 }, 4).unwrap();
        assert!(wiener_mmse_circulant(&s_x, &s_n, &spec).is_err());
    }

    #[test]
    fn wd_summary_measures_the_module_invariants() {
        let x = analytic_signal(
            &SourceModel::gaussian(white_psd().unwrap(), 3)
                .realize(128, 1.0, 0)
                .unwrap(),
        )
        .unwrap();
        let w = wigner(&x);
        let s = wd_summary(&x, &w);
        assert!(s.worst() <= 1e-9, "{s:?}");
    }

    #[test]
    fn failed_bound_marks_the_report() {
        let mut r = CheckReport::new("demo");
        r.bound("fits", 1.0, 2.0);
        assert!(r.passed);
        r.bound("breaks", 3.0, 2.0);
        assert!(!r.passed);
        let text = r.render();
        assert!(text.starts_with("FAIL demo"));
        assert!(text.contains("ok: fits"));
        assert!(text.contains("FAIL: breaks"));
    }

    #[test]
    fn conditional_psd_check_passes() {
        let report = check_conditional_psd();
        assert!(report.passed, "{}", report.render());
    }

    #[test]
    fn reproducibility_check_passes() {
        let report = check_reproducibility();
        assert!(report.passed, "{}", report.render());
    }
}
