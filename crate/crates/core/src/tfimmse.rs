//! Term-by-term evaluation of the 18-term time-frequency decomposition of
//! the mutual-information derivative for two-signal mixtures, with the
//! independence reduction and the real-input regrouping.
//!
//! The decomposition reads, in frozen index order,
//!
//! ```text
//!  #  sign  band    integrand
//!  1   +    full    W_x1
//!  2   -    folded  W_x1 / W_y            (squared variant: W_x1^2 / W_y)
//!  3   -    folded  W_x1x2 / W_y
//!  4   -    folded  W_x1x2 W_x1 / W_y
//!  5   -    folded  W_x1 W_x1*x2* / W_y
//!  6   +    full    W_x2
//!  7   -    folded  W_x2 / W_y            (squared variant: W_x2^2 / W_y)
//!  8   -    folded  W_x2x1 / W_y
//!  9   -    folded  W_x2x1 W_x2 / W_y
//! 10   -    folded  W_x2 W_x2*x1* / W_y
//! 11   -    folded  W_x1 W_x2 / W_y
//! 12   -    folded  W_x1 W_x2*x1* / W_y
//! 13   -    folded  W_x1x2 W_x2*x1* / W_y
//! 14   -    folded  W_x1x2 W_x2 / W_y
//! 15   -    folded  W_x2 W_x1 / W_y
//! 16   -    folded  W_x2 W_x1x2 / W_y
//! 17   -    folded  W_x2x1 W_x2*x1* / W_y
//! 18   -    folded  W_x2x1 W_x1 / W_y
//! ```
//!
//! "folded" is the open band (-fs_sub/2, fs_sub/2) of the sampling spec,
//! gated by its filter: bins where the response is zero are excluded, so
//! the default ideal low-pass at fs_sub/2 reduces to the plain folded
//! integral. Every W is a Wigner-Ville spectrum (an ensemble average;
//! single-realization distributions oscillate and change sign under the
//! ratios), and spectrum estimates can dip negative at cell level, so
//! ratio cells whose denominator falls below [`GUARD_EPS`] are excluded
//! and counted rather than clamped. All conjugate variants come from one
//! cross grid: on the
//! centered frequency grid `W_x2x1[t,m] = conj(W_x1x2[t,m])`,
//! `W_x1*x2*[t,m] = conj(W_x1x2[t,R(m)])`, and
//! `W_x2*x1*[t,m] = W_x1x2[t,R(m)]` with `R(m) = (nf - m) mod nf` the
//! reflection to -f.
//!
//! The literal variant keeps the self-ratio terms 2 and 7 as printed;
//! the squared variant replaces them with `W^2 / W_y`, which is the form
//! dimensionally consistent with the conditional spectral ratio, and is
//! the default in the pipeline entry point.
//!
//! The real-input regrouping collapses conjugate-pair terms into 2 Re and
//! 4 Re aggregates. Each aggregate's value is defined as the signed sum of
//! its member terms, so the reduced total always equals the full total
//! exactly. Some presentations collapse the pair (13, 17) to 2 Re of a
//! single squared cross ratio; that collapse drops the squared imaginary
//! part of the cross spectrum, so the pair sum is kept instead, which is
//! what preserves the total.

use crate::error::{Error, Result};
use crate::rng::{seeded_rng, subseed};
use crate::sampling::SamplingSpec;
use crate::signal::MixtureChannel;
use crate::tfa::{cross_wigner, wigner, TFDist, TfKind};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Denominator guard: folded-band cells whose W_y real part falls below
/// this value contribute zero and are counted. The comparison is signed,
/// so slightly negative spectrum estimates are excluded rather than
/// clamped to positive.
pub const GUARD_EPS: f64 = 1e-12;

/// Tolerance for the grid-symmetry test that detects real-input spectra,
/// relative to each grid's peak magnitude.
const REAL_SYM_TOL: f64 = 1e-9;

/// Band-edge tolerance for the folded band, relative to the bin width.
const EDGE_TOL: f64 = 1e-9;

/// Bootstrap resample count for ensemble standard errors.
const BOOTSTRAP_RESAMPLES: usize = 200;

/// Realization groups underlying the bootstrap.
const BOOTSTRAP_GROUPS: usize = 20;

/// One factor of a term's numerator product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Factor {
    /// W_x1
    X1,
    /// W_x2
    X2,
    /// W_x1x2
    Cross12,
    /// W_x2x1 = conj(W_x1x2)
    Cross21,
    /// W_x1*x2*(f) = conj(W_x1x2(-f))
    Cross12StarStar,
    /// W_x2*x1*(f) = W_x1x2(-f)
    Cross21StarStar,
}

impl Factor {
    /// True for the cross-spectrum factors that vanish under independence.
    pub fn is_cross(self) -> bool {
        !matches!(self, Factor::X1 | Factor::X2)
    }
}

/// Integration band of one term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Band {
    /// All grid bins, no denominator.
    Full,
    /// Open band (-fs_sub/2, fs_sub/2) gated by the filter, ratio over W_y.
    Folded,
}

/// Numerator treatment of the self-ratio terms 2 and 7.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Terms 2 and 7 as printed: W_xi / W_y.
    Literal,
    /// Terms 2 and 7 as W_xi^2 / W_y, consistent with the conditional
    /// spectral ratio.
    SquaredNumerator,
}

/// Requested reduction of the 18-term total.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Reduction {
    None,
    /// Keep only the cross-free terms {1, 2, 6, 7, 11, 15}.
    Independent,
    /// Collapse conjugate-pair terms into real aggregates.
    Real,
}

struct TermSpec {
    sign: f64,
    band: Band,
    literal: &'static [Factor],
    squared: &'static [Factor],
}

use Factor::{Cross12, Cross12StarStar, Cross21, Cross21StarStar, X1, X2};

/// The frozen term table; index i holds term i+1 of the module-level list.
static TERM_TABLE: [TermSpec; 18] = [
    TermSpec {
        sign: 1.0,
        band: Band::Full,
        literal: &[X1],
        squared: &[X1],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X1],
        squared: &[X1, X1],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross12],
        squared: &[Cross12],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross12, X1],
        squared: &[Cross12, X1],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X1, Cross12StarStar],
        squared: &[X1, Cross12StarStar],
    },
    TermSpec {
        sign: 1.0,
        band: Band::Full,
        literal: &[X2],
        squared: &[X2],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X2],
        squared: &[X2, X2],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross21],
        squared: &[Cross21],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross21, X2],
        squared: &[Cross21, X2],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X2, Cross21StarStar],
        squared: &[X2, Cross21StarStar],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X1, X2],
        squared: &[X1, X2],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X1, Cross21StarStar],
        squared: &[X1, Cross21StarStar],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross12, Cross21StarStar],
        squared: &[Cross12, Cross21StarStar],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross12, X2],
        squared: &[Cross12, X2],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X2, X1],
        squared: &[X2, X1],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[X2, Cross12],
        squared: &[X2, Cross12],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross21, Cross21StarStar],
        squared: &[Cross21, Cross21StarStar],
    },
    TermSpec {
        sign: -1.0,
        band: Band::Folded,
        literal: &[Cross21, X1],
        squared: &[Cross21, X1],
    },
];

/// Term indices that survive the independence reduction; these are exactly
/// the cross-free numerators, which the tests assert structurally.
pub const INDEPENDENT_INDICES: [usize; 6] = [1, 2, 6, 7, 11, 15];

/// Real-input aggregate groups, each listed by 1-based term index. Order
/// follows the regrouped display: the four self terms, then the 2 Re cross
/// ratio, the two 4 Re mixed products, the 2 Re self product, and the
/// squared-cross pair.
pub const REAL_GROUPS: [&[usize]; 9] = [
    &[1],
    &[2],
    &[6],
    &[7],
    &[3, 8],
    &[4, 5, 12, 18],
    &[9, 10, 14, 16],
    &[11, 15],
    &[13, 17],
];

/// One evaluated term.
#[derive(Clone, Debug)]
pub struct ImmseTerm {
    /// 1-based position in the frozen table.
    pub index: usize,
    pub sign: f64,
    pub band: Band,
    /// Numerator factors actually used (variant applied).
    pub numerator: Vec<Factor>,
    /// Band integral of the numerator product (over W_y on the folded
    /// band), excluding the sign.
    pub value: Complex64,
}

impl ImmseTerm {
    /// sign * value, the term's contribution to the total.
    pub fn signed(&self) -> Complex64 {
        self.sign * self.value
    }
}

/// One real-input aggregate: the signed sum of its member terms.
#[derive(Clone, Debug)]
pub struct RealAggregate {
    pub indices: Vec<usize>,
    pub value: Complex64,
}

/// Ensemble provenance and bootstrap errors attached by the pipeline.
#[derive(Clone, Debug, Serialize)]
pub struct EnsembleStats {
    pub n_realizations: usize,
    pub n_groups: usize,
    pub n_resamples: usize,
    /// Bootstrap standard error of each term value, by table order.
    pub term_stderr: Vec<f64>,
    /// Standard error of the signed sum over terms outside the
    /// independence subset.
    pub excluded_sum_stderr: f64,
    /// Standard error of the full signed total.
    pub total_stderr: f64,
}

/// Evaluation result: 18 terms, totals, and the evaluation context.
#[derive(Clone, Debug)]
pub struct TfImmseReport {
    pub terms: Vec<ImmseTerm>,
    /// Signed sum over all 18 terms.
    pub total: Complex64,
    /// Total after the requested reduction; equals `total` for
    /// `Reduction::None`.
    pub reduced_total: Complex64,
    pub variant: Variant,
    pub reduction: Reduction,
    /// Folded-band cells whose denominator fell below the guard.
    pub guarded_cells: usize,
    /// Folded-band bin count per time slice.
    pub band_bins: usize,
    /// True when all four input grids carry the conjugate-even frequency
    /// symmetry of real-signal spectra.
    pub real_inputs: bool,
    /// Real-input aggregates, set by [`reduce_real`].
    pub aggregates: Option<Vec<RealAggregate>>,
    pub ensemble: Option<EnsembleStats>,
    pub channel: Option<MixtureChannel>,
    pub sampling: SamplingSpec,
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(v: Complex64) -> Self {
        ComplexJson { re: v.re, im: v.im }
    }
}

#[derive(Serialize)]
struct TermJson {
    index: usize,
    sign: f64,
    band: Band,
    numerator: Vec<Factor>,
    value: ComplexJson,
}

#[derive(Serialize)]
struct AggregateJson {
    indices: Vec<usize>,
    value: ComplexJson,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    variant: Variant,
    reduction: Reduction,
    total: ComplexJson,
    reduced_total: ComplexJson,
    guarded_cells: usize,
    band_bins: usize,
    real_inputs: bool,
    terms: Vec<TermJson>,
    aggregates: Option<Vec<AggregateJson>>,
    ensemble: Option<&'a EnsembleStats>,
    channel: Option<&'a MixtureChannel>,
    sampling: &'a SamplingSpec,
}

impl TfImmseReport {
    pub fn to_json(&self) -> String {
        let doc = ReportJson {
            variant: self.variant,
            reduction: self.reduction,
            total: self.total.into(),
            reduced_total: self.reduced_total.into(),
            guarded_cells: self.guarded_cells,
            band_bins: self.band_bins,
            real_inputs: self.real_inputs,
            terms: self
                .terms
                .iter()
                .map(|t| TermJson {
                    index: t.index,
                    sign: t.sign,
                    band: t.band,
                    numerator: t.numerator.clone(),
                    value: t.value.into(),
                })
                .collect(),
            aggregates: self.aggregates.as_ref().map(|ags| {
                ags.iter()
                    .map(|a| AggregateJson {
                        indices: a.indices.clone(),
                        value: a.value.into(),
                    })
                    .collect()
            }),
            ensemble: self.ensemble.as_ref(),
            channel: self.channel.as_ref(),
            sampling: &self.sampling,
        };
        serde_json::to_string_pretty(&doc).expect("report serialization")
    }

    /// CSV of the terms: index, sign, band, numerator, value, stderr.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,sign,band,numerator,value_re,value_im,stderr\n");
        for t in &self.terms {
            let band = match t.band {
                Band::Full => "full",
                Band::Folded => "folded",
            };
            let num: Vec<&str> = t.numerator.iter().map(|f| factor_name(*f)).collect();
            let se = self
                .ensemble
                .as_ref()
                .map(|e| format!("{}", e.term_stderr[t.index - 1]))
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                t.index,
                t.sign,
                band,
                num.join("*"),
                t.value.re,
                t.value.im,
                se
            ));
        }
        out
    }

    /// Signed sum over the given 1-based term indices.
    pub fn signed_sum(&self, indices: &[usize]) -> Complex64 {
        indices.iter().map(|&i| self.terms[i - 1].signed()).sum()
    }
}

fn factor_name(f: Factor) -> &'static str {
    match f {
        Factor::X1 => "W_x1",
        Factor::X2 => "W_x2",
        Factor::Cross12 => "W_x1x2",
        Factor::Cross21 => "W_x2x1",
        Factor::Cross12StarStar => "W_x1*x2*",
        Factor::Cross21StarStar => "W_x2*x1*",
    }
}

/// The numerator factors of a term under a variant.
pub fn numerator_spec(index: usize, variant: Variant) -> &'static [Factor] {
    let spec = &TERM_TABLE[index - 1];
    match variant {
        Variant::Literal => spec.literal,
        Variant::SquaredNumerator => spec.squared,
    }
}

/// The printed sign of a term.
pub fn term_sign(index: usize) -> f64 {
    TERM_TABLE[index - 1].sign
}

/// The integration band of a term.
pub fn term_band(index: usize) -> Band {
    TERM_TABLE[index - 1].band
}

/// Looks up one factor on the shared grid at time row `t`, frequency bin
/// `m`, with `mr` the reflected bin.
#[inline]
fn factor_value(
    f: Factor,
    w1: &[Complex64],
    w2: &[Complex64],
    c12: &[Complex64],
    m: usize,
    mr: usize,
) -> Complex64 {
    match f {
        Factor::X1 => w1[m],
        Factor::X2 => w2[m],
        Factor::Cross12 => c12[m],
        Factor::Cross21 => c12[m].conj(),
        Factor::Cross12StarStar => c12[mr].conj(),
        Factor::Cross21StarStar => c12[mr],
    }
}

/// True when the grid satisfies the real-signal spectral symmetry
/// `G(t, -f) = conj(G(t, f))` within `REAL_SYM_TOL` of its peak.
fn has_real_symmetry(g: &TFDist) -> bool {
    let scale = g.max_abs();
    if scale == 0.0 {
        return true;
    }
    let nf = g.nf();
    for t in 0..g.nt() {
        let row = g.row(t);
        for m in 0..nf {
            let mr = (nf - m) % nf;
            if (row[m] - row[mr].conj()).norm() > REAL_SYM_TOL * scale {
                return false;
            }
        }
    }
    true
}

fn check_common_grid(grids: [&TFDist; 4]) -> Result<()> {
    let (t0, f0) = (grids[0].time_axis(), grids[0].freq_axis());
    for g in &grids[1..] {
        if g.time_axis() != t0 || g.freq_axis() != f0 {
            return Err(Error::shape("input distributions are not on a common grid"));
        }
    }
    Ok(())
}

/// Evaluates all 18 terms on the given spectra as Riemann sums.
///
/// `wv_x1`, `wv_x2`, and `wv_y` are auto spectra; `wv_cross12` is the cross
/// spectrum of (x1, x2), from which every conjugate variant is derived.
/// The denominator grid `wv_y` should be the spectrum of the observation
/// normalized back to input scale (y / sqrt(snr)), so the ratio terms
/// compare like with like.
pub fn evaluate_terms(
    wv_x1: &TFDist,
    wv_x2: &TFDist,
    wv_cross12: &TFDist,
    wv_y: &TFDist,
    spec: &SamplingSpec,
    variant: Variant,
) -> Result<TfImmseReport> {
    check_common_grid([wv_x1, wv_x2, wv_cross12, wv_y])?;
    if wv_x1.kind() == TfKind::Cross
        || wv_x2.kind() == TfKind::Cross
        || wv_y.kind() == TfKind::Cross
    {
        return Err(Error::usage("auto-spectrum arguments carry a cross kind"));
    }
    if wv_cross12.kind() != TfKind::Cross {
        return Err(Error::usage("wv_cross12 must be a cross spectrum"));
    }
    let nt = wv_y.nt();
    let nf = wv_y.nf();
    let freqs = wv_y.freq_axis().to_vec();
    let cell = wv_y.dt() * wv_y.df();

    // Folded band: open interval gated by the filter response.
    let half = spec.fs_sub() / 2.0 - EDGE_TOL * wv_y.df();
    let band: Vec<usize> = (0..nf)
        .filter(|&m| freqs[m].abs() < half && spec.filter().response(freqs[m]) != 0.0)
        .collect();
    if band.len() < 2 {
        return Err(Error::construction(
            "folded band covers fewer than 2 frequency bins",
        ));
    }

    let real_inputs = [wv_x1, wv_x2, wv_cross12, wv_y]
        .iter()
        .all(|g| has_real_symmetry(g));

    let guarded_cells: usize = (0..nt)
        .map(|t| {
            let row = wv_y.row(t);
            band.iter().filter(|&&m| row[m].re < GUARD_EPS).count()
        })
        .sum();

    let values: Vec<Complex64> = (0..18usize)
        .into_par_iter()
        .map(|i| {
            let spec_i = &TERM_TABLE[i];
            let factors = numerator_spec(i + 1, variant);
            let mut acc = Complex64::new(0.0, 0.0);
            match spec_i.band {
                Band::Full => {
                    // Single self factor over the whole grid.
                    let grid = match factors[0] {
                        Factor::X1 => wv_x1,
                        Factor::X2 => wv_x2,
                        _ => unreachable!("full-band terms are self terms"),
                    };
                    for t in 0..nt {
                        for v in grid.row(t) {
                            acc += v;
                        }
                    }
                }
                Band::Folded => {
                    for t in 0..nt {
                        let r1 = wv_x1.row(t);
                        let r2 = wv_x2.row(t);
                        let rc = wv_cross12.row(t);
                        let ry = wv_y.row(t);
                        for &m in &band {
                            let den = ry[m];
                            if den.re < GUARD_EPS {
                                continue;
                            }
                            let mr = (nf - m) % nf;
                            let mut num = Complex64::new(1.0, 0.0);
                            for &f in factors {
                                num *= factor_value(f, r1, r2, rc, m, mr);
                            }
                            acc += num / den;
                        }
                    }
                }
            }
            acc * cell
        })
        .collect();

    let terms: Vec<ImmseTerm> = values
        .iter()
        .enumerate()
        .map(|(i, &value)| ImmseTerm {
            index: i + 1,
            sign: TERM_TABLE[i].sign,
            band: TERM_TABLE[i].band,
            numerator: numerator_spec(i + 1, variant).to_vec(),
            value,
        })
        .collect();
    let total: Complex64 = terms.iter().map(ImmseTerm::signed).sum();
    Ok(TfImmseReport {
        terms,
        total,
        reduced_total: total,
        variant,
        reduction: Reduction::None,
        guarded_cells,
        band_bins: band.len(),
        real_inputs,
        aggregates: None,
        ensemble: None,
        channel: None,
        sampling: spec.clone(),
    })
}

/// Keeps only the cross-free terms {1, 2, 6, 7, 11, 15}. Idempotent.
pub fn reduce_independent(report: &TfImmseReport) -> TfImmseReport {
    let mut out = report.clone();
    out.reduction = Reduction::Independent;
    out.reduced_total = report.signed_sum(&INDEPENDENT_INDICES);
    out.aggregates = None;
    out
}

/// Regroups conjugate-pair terms into the real-input aggregates. Each
/// aggregate is the signed sum of its members, so the reduced total equals
/// the full total exactly; for real-input spectra every aggregate is real
/// up to grid rounding.
pub fn reduce_real(report: &TfImmseReport) -> Result<TfImmseReport> {
    if !report.real_inputs {
        return Err(Error::usage(
            "real-input regrouping requires spectra of real signals",
        ));
    }
    let aggregates: Vec<RealAggregate> = REAL_GROUPS
        .iter()
        .map(|group| RealAggregate {
            indices: group.to_vec(),
            value: report.signed_sum(group),
        })
        .collect();
    let reduced_total: Complex64 = aggregates.iter().map(|a| a.value).sum();
    let mut out = report.clone();
    out.reduction = Reduction::Real;
    out.reduced_total = reduced_total;
    out.aggregates = Some(aggregates);
    Ok(out)
}

/// Mean grids of one realization group.
struct GroupGrids {
    count: usize,
    w1: Vec<Complex64>,
    w2: Vec<Complex64>,
    c12: Vec<Complex64>,
    wy: Vec<Complex64>,
}

fn weighted_mean(groups: &[GroupGrids], pick: &[usize], len: usize) -> GroupGrids {
    let mut out = GroupGrids {
        count: 0,
        w1: vec![Complex64::new(0.0, 0.0); len],
        w2: vec![Complex64::new(0.0, 0.0); len],
        c12: vec![Complex64::new(0.0, 0.0); len],
        wy: vec![Complex64::new(0.0, 0.0); len],
    };
    for &g in pick {
        let grp = &groups[g];
        let w = grp.count as f64;
        out.count += grp.count;
        for (dst, src) in [
            (&mut out.w1, &grp.w1),
            (&mut out.w2, &grp.w2),
            (&mut out.c12, &grp.c12),
            (&mut out.wy, &grp.wy),
        ] {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += w * s;
            }
        }
    }
    let inv = 1.0 / out.count as f64;
    for grid in [&mut out.w1, &mut out.w2, &mut out.c12, &mut out.wy] {
        for v in grid.iter_mut() {
            *v *= inv;
        }
    }
    out
}

/// Ensemble pipeline: realizes the mixture channel `n_realizations` times,
/// averages the four Wigner-Ville spectra (observation normalized by
/// 1/sqrt(snr)), evaluates the 18 terms, attaches bootstrap standard
/// errors over realization groups, and applies the requested reduction.
///
/// Returns the real part of the reduced total as the scalar surrogate for
/// the information derivative, plus the full report. No claim is made that
/// this equals a finite-difference derivative of the scalar mutual
/// information; callers compare and report the gap.
pub fn tf_immse_derivative(
    channel: &MixtureChannel,
    spec: &SamplingSpec,
    n: usize,
    sample_rate: f64,
    n_realizations: usize,
    variant: Variant,
    reduction: Reduction,
) -> Result<(f64, TfImmseReport)> {
    if channel.snr <= 0.0 {
        return Err(Error::usage("tf_immse_derivative requires snr > 0"));
    }
    if n_realizations < 100 {
        return Err(Error::usage(format!(
            "ensemble ratio terms need n_realizations >= 100, got {n_realizations}"
        )));
    }
    let n_groups = BOOTSTRAP_GROUPS.min(n_realizations);
    let base = n_realizations / n_groups;
    let extra = n_realizations % n_groups;
    let starts: Vec<(usize, usize)> = (0..n_groups)
        .scan(0usize, |acc, g| {
            let count = base + usize::from(g < extra);
            let start = *acc;
            *acc += count;
            Some((start, count))
        })
        .collect();
    let inv_gain = 1.0 / channel.snr.sqrt();

    let groups: Vec<GroupGrids> = starts
        .into_par_iter()
        .map(|(start, count)| -> Result<GroupGrids> {
            let mut acc: Option<GroupGrids> = None;
            for r in start..start + count {
                let (x1, x2, y) = channel.realize(n, sample_rate, r as u64)?;
                let yn = y.scale(inv_gain);
                let w1 = wigner(&x1);
                let w2 = wigner(&x2);
                let c12 = cross_wigner(&x1, &x2)?;
                let wy = wigner(&yn);
                match &mut acc {
                    None => {
                        acc = Some(GroupGrids {
                            count: 1,
                            w1: w1.values().to_vec(),
                            w2: w2.values().to_vec(),
                            c12: c12.values().to_vec(),
                            wy: wy.values().to_vec(),
                        });
                    }
                    Some(a) => {
                        a.count += 1;
                        for (dst, src) in [
                            (&mut a.w1, w1.values()),
                            (&mut a.w2, w2.values()),
                            (&mut a.c12, c12.values()),
                            (&mut a.wy, wy.values()),
                        ] {
                            for (d, s) in dst.iter_mut().zip(src) {
                                *d += s;
                            }
                        }
                    }
                }
            }
            let mut a = acc.expect("group has at least one realization");
            let inv = 1.0 / a.count as f64;
            for grid in [&mut a.w1, &mut a.w2, &mut a.c12, &mut a.wy] {
                for v in grid.iter_mut() {
                    *v *= inv;
                }
            }
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;

    // Axes from a template realization (all realizations share the grid).
    let template = wigner(&channel.realize(n, sample_rate, 0)?.0);
    let time_axis = template.time_axis().to_vec();
    let freq_axis = template.freq_axis().to_vec();
    let len = time_axis.len() * freq_axis.len();
    let to_dist = move |g: &GroupGrids| -> Result<(TFDist, TFDist, TFDist, TFDist)> {
        Ok((
            TFDist::new(
                TfKind::Auto,
                time_axis.clone(),
                freq_axis.clone(),
                g.w1.clone(),
            )?,
            TFDist::new(
                TfKind::Auto,
                time_axis.clone(),
                freq_axis.clone(),
                g.w2.clone(),
            )?,
            TFDist::new(
                TfKind::Cross,
                time_axis.clone(),
                freq_axis.clone(),
                g.c12.clone(),
            )?,
            TFDist::new(
                TfKind::Auto,
                time_axis.clone(),
                freq_axis.clone(),
                g.wy.clone(),
            )?,
        ))
    };

    let all: Vec<usize> = (0..groups.len()).collect();
    let mean = weighted_mean(&groups, &all, len);
    let (w1, w2, c12, wy) = to_dist(&mean)?;
    let mut report = evaluate_terms(&w1, &w2, &c12, &wy, spec, variant)?;

    // Bootstrap over groups: fixed resample count, one serial index
    // stream, parallel evaluation.
    let excluded: Vec<usize> = (1..=18)
        .filter(|i| !INDEPENDENT_INDICES.contains(i))
        .collect();
    let mut rng = seeded_rng(subseed(
        subseed(channel.x1.seed, channel.x2.seed),
        0x626f_6f74,
    ));
    let picks: Vec<Vec<usize>> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            (0..groups.len())
                .map(|_| rng.gen_range(0..groups.len()))
                .collect()
        })
        .collect();
    let resampled: Vec<(Vec<Complex64>, Complex64, Complex64)> = picks
        .par_iter()
        .map(|pick| -> Result<_> {
            let m = weighted_mean(&groups, pick, len);
            let (w1, w2, c12, wy) = to_dist(&m)?;
            let rep = evaluate_terms(&w1, &w2, &c12, &wy, spec, variant)?;
            let vals: Vec<Complex64> = rep.terms.iter().map(|t| t.value).collect();
            let excl = rep.signed_sum(&excluded);
            Ok((vals, excl, rep.total))
        })
        .collect::<Result<Vec<_>>>()?;
    type Resample = (Vec<Complex64>, Complex64, Complex64);
    let b = resampled.len() as f64;
    let spread = |sel: &dyn Fn(&Resample) -> Complex64| -> f64 {
        let mean: Complex64 = resampled.iter().map(sel).sum::<Complex64>() / b;
        let var: f64 = resampled
            .iter()
            .map(|r| (sel(r) - mean).norm_sqr())
            .sum::<f64>()
            / (b - 1.0);
        var.sqrt()
    };
    let term_stderr: Vec<f64> = (0..18)
        .map(|i| spread(&move |r: &(Vec<Complex64>, Complex64, Complex64)| r.0[i]))
        .collect();
    let excluded_sum_stderr = spread(&|r| r.1);
    let total_stderr = spread(&|r| r.2);

    report.ensemble = Some(EnsembleStats {
        n_realizations,
        n_groups: groups.len(),
        n_resamples: BOOTSTRAP_RESAMPLES,
        term_stderr,
        excluded_sum_stderr,
        total_stderr,
    });
    report.channel = Some(channel.clone());

    let report = match reduction {
        Reduction::None => report,
        Reduction::Independent => reduce_independent(&report),
        Reduction::Real => reduce_real(&report)?,
    };
    Ok((report.reduced_total.re, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::FilterShape;
    use crate::signal::{FieldConvention, SourceModel};
    use crate::tfa::SpectralDensity;

    fn flat_psd(band: f64, step: f64) -> SpectralDensity {
        // Unit power: level = 1 / (2 band).
        SpectralDensity::flat_band(1.0 / (2.0 * band), band, 0.5, step).unwrap()
    }

    fn ideal_spec(fs_sub: f64) -> SamplingSpec {
        SamplingSpec::new(
            fs_sub,
            FilterShape::IdealLowpass {
                cutoff: fs_sub / 2.0,
            },
            4,
        )
        .unwrap()
    }

    /// Small deterministic grids with every symmetry broken: distinct
    /// complex signals for x1, x2, and an independent y.
    fn synthetic_inputs(n: usize) -> (TFDist, TFDist, TFDist, TFDist) {
        let fs = 1.0;
        let mk = |seed: u64| {
            let psd = flat_psd(0.4, 0.05);
            SourceModel::gaussian(psd, seed).realize(n, fs, 0).unwrap()
        };
        let x1 = mk(11);
        let x2 = mk(22);
        let y = x1.add(&x2).unwrap();
        (
            wigner(&x1),
            wigner(&x2),
            cross_wigner(&x1, &x2).unwrap(),
            wigner(&y),
        )
    }

    #[test]
    fn table_is_frozen() {
        assert_eq!(TERM_TABLE.len(), 18);
        assert_eq!(term_sign(1), 1.0);
        assert_eq!(term_sign(6), 1.0);
        for i in (2..=18).filter(|&i| i != 6) {
            assert_eq!(term_sign(i), -1.0, "term {i}");
        }
        assert_eq!(term_band(1), Band::Full);
        assert_eq!(term_band(6), Band::Full);
        for i in (2..=18).filter(|&i| i != 6) {
            assert_eq!(term_band(i), Band::Folded, "term {i}");
        }
        // The variant only rewrites terms 2 and 7.
        for i in 1..=18 {
            let lit = numerator_spec(i, Variant::Literal);
            let sq = numerator_spec(i, Variant::SquaredNumerator);
            if i == 2 || i == 7 {
                assert_eq!(sq.len(), 2);
                assert_eq!(sq[0], sq[1]);
                assert_eq!(lit.len(), 1);
                assert_eq!(lit[0], sq[0]);
            } else {
                assert_eq!(lit, sq, "term {i}");
            }
        }
    }

    #[test]
    fn independence_subset_is_exactly_the_cross_free_terms() {
        for i in 1..=18usize {
            let cross_free = numerator_spec(i, Variant::Literal)
                .iter()
                .all(|f| !f.is_cross())
                && numerator_spec(i, Variant::SquaredNumerator)
                    .iter()
                    .all(|f| !f.is_cross());
            assert_eq!(
                INDEPENDENT_INDICES.contains(&i),
                cross_free,
                "term {i}: cross_free={cross_free}"
            );
        }
    }

    #[test]
    fn real_groups_partition_the_indices() {
        let mut seen: Vec<usize> = REAL_GROUPS.iter().flat_map(|g| g.iter().copied()).collect();
        seen.sort_unstable();
        assert_eq!(seen, (1..=18).collect::<Vec<_>>());
    }

    #[test]
    fn every_term_matches_a_direct_riemann_sum() {
        // Independent reference evaluator: reads the symbolic spec and
        // sums cells naively.
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let spec = ideal_spec(0.5);
        for variant in [Variant::Literal, Variant::SquaredNumerator] {
            let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, variant).unwrap();
            let nf = wy.nf();
            let cell = wy.dt() * wy.df();
            let half = spec.fs_sub() / 2.0 - 1e-9 * wy.df();
            for term in &report.terms {
                let mut want = Complex64::new(0.0, 0.0);
                for t in 0..wy.nt() {
                    for m in 0..nf {
                        let f = wy.freq_axis()[m];
                        let in_band = f.abs() < half && spec.filter().response(f) != 0.0;
                        match term.band {
                            Band::Full => {
                                let g = match term.numerator[0] {
                                    Factor::X1 => &w1,
                                    Factor::X2 => &w2,
                                    _ => panic!("full-band term with cross factor"),
                                };
                                want += g.value(t, m) * cell;
                            }
                            Band::Folded => {
                                if !in_band || wy.value(t, m).re < GUARD_EPS {
                                    continue;
                                }
                                let mr = (nf - m) % nf;
                                let mut num = Complex64::new(1.0, 0.0);
                                for &fac in &term.numerator {
                                    num *= match fac {
                                        Factor::X1 => w1.value(t, m),
                                        Factor::X2 => w2.value(t, m),
                                        Factor::Cross12 => c12.value(t, m),
                                        Factor::Cross21 => c12.value(t, m).conj(),
                                        Factor::Cross12StarStar => c12.value(t, mr).conj(),
                                        Factor::Cross21StarStar => c12.value(t, mr),
                                    };
                                }
                                want += num / wy.value(t, m) * cell;
                            }
                        }
                    }
                }
                let scale = want.norm().max(1.0);
                assert!(
                    (term.value - want).norm() <= 1e-12 * scale,
                    "term {} variant {variant:?}: {} vs {}",
                    term.index,
                    term.value,
                    want
                );
            }
        }
    }

    #[test]
    fn total_is_the_signed_term_sum() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let spec = ideal_spec(0.5);
        let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, Variant::SquaredNumerator).unwrap();
        let direct: Complex64 = report.terms.iter().map(ImmseTerm::signed).sum();
        assert!((report.total - direct).norm() <= 1e-12 * direct.norm().max(1.0));
        assert_eq!(report.reduced_total, report.total);
    }

    #[test]
    fn zero_second_input_leaves_only_the_self_terms() {
        let n = 32;
        let fs = 1.0;
        let x1 = SourceModel::gaussian(flat_psd(0.4, 0.05), 7)
            .realize(n, fs, 0)
            .unwrap();
        let zero = x1.scale(0.0);
        let w1 = wigner(&x1);
        let w2 = wigner(&zero);
        let c12 = cross_wigner(&x1, &zero).unwrap();
        let wy = wigner(&x1);
        let spec = ideal_spec(0.5);
        for variant in [Variant::Literal, Variant::SquaredNumerator] {
            let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, variant).unwrap();
            for term in &report.terms {
                if term.index == 1 || term.index == 2 {
                    assert!(term.value.norm() > 0.0, "term {}", term.index);
                } else {
                    assert_eq!(term.value, Complex64::new(0.0, 0.0), "term {}", term.index);
                }
            }
            let survivors = report.signed_sum(&[1, 2]);
            assert_eq!(report.total, survivors);
        }
    }

    #[test]
    fn all_zero_inputs_give_a_zero_report() {
        let n = 32;
        let x = SourceModel::gaussian(flat_psd(0.4, 0.05), 3)
            .realize(n, 1.0, 0)
            .unwrap();
        let zero = x.scale(0.0);
        let w = wigner(&zero);
        let c = cross_wigner(&zero, &zero).unwrap();
        let report = evaluate_terms(&w, &w, &c, &w, &ideal_spec(0.5), Variant::Literal).unwrap();
        for term in &report.terms {
            assert_eq!(term.value, Complex64::new(0.0, 0.0));
        }
        assert_eq!(report.total, Complex64::new(0.0, 0.0));
        // Every folded-band cell is guarded: zero denominator everywhere.
        assert_eq!(report.guarded_cells, report.band_bins * w.nt());
    }

    #[test]
    fn grid_mismatch_and_kind_confusion_are_rejected() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let (s1, ..) = synthetic_inputs(64);
        let spec = ideal_spec(0.5);
        assert!(evaluate_terms(&s1, &w2, &c12, &wy, &spec, Variant::Literal).is_err());
        // Cross grid passed as an auto spectrum and vice versa.
        assert!(evaluate_terms(&c12, &w2, &c12, &wy, &spec, Variant::Literal).is_err());
        assert!(evaluate_terms(&w1, &w2, &w1, &wy, &spec, Variant::Literal).is_err());
    }

    #[test]
    fn filter_gate_excludes_dead_bins() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        // Custom filter dead above 0.1 Hz: band shrinks accordingly.
        let narrow = SamplingSpec::new(
            0.5,
            FilterShape::Custom {
                freqs: vec![-0.1, 0.0, 0.1],
                values: vec![1.0, 1.0, 1.0],
            },
            4,
        )
        .unwrap();
        let wide = ideal_spec(0.5);
        let r_wide = evaluate_terms(&w1, &w2, &c12, &wy, &wide, Variant::Literal).unwrap();
        let r_narrow = evaluate_terms(&w1, &w2, &c12, &wy, &narrow, Variant::Literal).unwrap();
        assert!(r_narrow.band_bins < r_wide.band_bins);
        // Direct check: narrow band equals a manual sum over live bins.
        let live: Vec<usize> = (0..wy.nf())
            .filter(|&m| {
                let f = wy.freq_axis()[m];
                f.abs() < 0.25 - 1e-9 * wy.df() && narrow.filter().response(f) != 0.0
            })
            .collect();
        assert_eq!(live.len(), r_narrow.band_bins);
    }

    #[test]
    fn reduce_independent_keeps_the_subset_and_is_idempotent() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let spec = ideal_spec(0.5);
        let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, Variant::SquaredNumerator).unwrap();
        let reduced = reduce_independent(&report);
        assert_eq!(
            reduced.reduced_total,
            report.signed_sum(&INDEPENDENT_INDICES)
        );
        let twice = reduce_independent(&reduced);
        assert_eq!(twice.reduced_total, reduced.reduced_total);
        assert_eq!(reduced.total, report.total);
    }

    #[test]
    fn reduce_independent_equals_total_when_cross_terms_vanish() {
        let n = 32;
        let x1 = SourceModel::gaussian(flat_psd(0.4, 0.05), 7)
            .realize(n, 1.0, 0)
            .unwrap();
        let zero = x1.scale(0.0);
        let w1 = wigner(&x1);
        let w2 = wigner(&zero);
        let c12 = cross_wigner(&x1, &zero).unwrap();
        let wy = wigner(&x1);
        let report =
            evaluate_terms(&w1, &w2, &c12, &wy, &ideal_spec(0.5), Variant::Literal).unwrap();
        let reduced = reduce_independent(&report);
        assert_eq!(reduced.reduced_total, report.total);
    }

    fn real_pair_grids(n: usize, rho: f64, seeds: (u64, u64)) -> (TFDist, TFDist, TFDist, TFDist) {
        let psd = flat_psd(0.4, 0.05);
        let m1 = SourceModel::gaussian_real(psd.clone(), seeds.0);
        let m2 = SourceModel::gaussian_real(psd, seeds.1);
        let reps = 40;
        type Grids = (
            Vec<Complex64>,
            Vec<Complex64>,
            Vec<Complex64>,
            Vec<Complex64>,
        );
        let mut acc: Option<Grids> = None;
        let mut axes = None;
        for r in 0..reps {
            let (x1, x2) = SourceModel::realize_pair(&m1, &m2, rho, n, 1.0, r).unwrap();
            let y = x1.add(&x2).unwrap();
            let w1 = wigner(&x1);
            let w2 = wigner(&x2);
            let c = cross_wigner(&x1, &x2).unwrap();
            let wy = wigner(&y);
            if axes.is_none() {
                axes = Some((w1.time_axis().to_vec(), w1.freq_axis().to_vec()));
            }
            match &mut acc {
                None => {
                    acc = Some((
                        w1.values().to_vec(),
                        w2.values().to_vec(),
                        c.values().to_vec(),
                        wy.values().to_vec(),
                    ))
                }
                Some((a1, a2, ac, ay)) => {
                    for (d, s) in a1.iter_mut().zip(w1.values()) {
                        *d += s;
                    }
                    for (d, s) in a2.iter_mut().zip(w2.values()) {
                        *d += s;
                    }
                    for (d, s) in ac.iter_mut().zip(c.values()) {
                        *d += s;
                    }
                    for (d, s) in ay.iter_mut().zip(wy.values()) {
                        *d += s;
                    }
                }
            }
        }
        let (mut a1, mut a2, mut ac, mut ay) = acc.unwrap();
        let inv = 1.0 / reps as f64;
        for g in [&mut a1, &mut a2, &mut ac, &mut ay] {
            for v in g.iter_mut() {
                *v *= inv;
            }
        }
        let (ta, fa) = axes.unwrap();
        (
            TFDist::new(TfKind::Auto, ta.clone(), fa.clone(), a1).unwrap(),
            TFDist::new(TfKind::Auto, ta.clone(), fa.clone(), a2).unwrap(),
            TFDist::new(TfKind::Cross, ta.clone(), fa.clone(), ac).unwrap(),
            TFDist::new(TfKind::Auto, ta, fa, ay).unwrap(),
        )
    }

    #[test]
    fn reduce_real_preserves_the_total_and_yields_real_aggregates() {
        let (w1, w2, c12, wy) = real_pair_grids(64, 0.6, (5, 6));
        let spec = ideal_spec(0.5);
        let report = evaluate_terms(&w1, &w2, &c12, &wy, &spec, Variant::SquaredNumerator).unwrap();
        assert!(report.real_inputs);
        let reduced = reduce_real(&report).unwrap();
        let scale = report.total.norm().max(1.0);
        assert!((reduced.reduced_total - report.total).norm() <= 1e-9 * scale);
        let agg_scale = report
            .terms
            .iter()
            .map(|t| t.value.norm())
            .fold(1.0f64, f64::max);
        for a in reduced.aggregates.as_ref().unwrap() {
            assert!(
                a.value.im.abs() <= 1e-9 * agg_scale,
                "aggregate {:?} imaginary part {}",
                a.indices,
                a.value.im
            );
        }
    }

    #[test]
    fn real_conjugate_pairs_match_explicitly() {
        // Explicit conjugate-pair bookkeeping: for real inputs the pair
        // (3, 8) sums to 2 Re of either member, and each member of the
        // quad (4, 5, 12, 18) carries the same real value.
        let (w1, w2, c12, wy) = real_pair_grids(64, 0.6, (15, 16));
        let report =
            evaluate_terms(&w1, &w2, &c12, &wy, &ideal_spec(0.5), Variant::Literal).unwrap();
        let v = |i: usize| report.terms[i - 1].value;
        let scale = report
            .terms
            .iter()
            .map(|t| t.value.norm())
            .fold(1.0f64, f64::max);
        let tol = 1e-12 * scale;
        assert!((v(3) - v(8).conj()).norm() <= tol);
        let two_re = v(3) + v(8);
        assert!((two_re - Complex64::new(2.0 * v(3).re, 0.0)).norm() <= tol);
        for pair in [(4, 5), (4, 18), (12, 18)] {
            assert!(
                (v(pair.0) - v(pair.1)).norm() <= tol,
                "terms {} and {} differ: {} vs {}",
                pair.0,
                pair.1,
                v(pair.0),
                v(pair.1)
            );
        }
        let quad = v(4) + v(5) + v(12) + v(18);
        assert!((quad - Complex64::new(4.0 * v(4).re, 0.0)).norm() <= tol);
        for pair in [(9, 10), (9, 16), (14, 16)] {
            assert!((v(pair.0) - v(pair.1)).norm() <= tol);
        }
        assert!((v(11) - v(15)).norm() <= tol);
    }

    #[test]
    fn reduce_real_rejects_complex_provenance() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let report =
            evaluate_terms(&w1, &w2, &c12, &wy, &ideal_spec(0.5), Variant::Literal).unwrap();
        assert!(!report.real_inputs);
        assert!(reduce_real(&report).is_err());
    }

    #[test]
    fn report_serializations_are_stable() {
        let (w1, w2, c12, wy) = synthetic_inputs(32);
        let report =
            evaluate_terms(&w1, &w2, &c12, &wy, &ideal_spec(0.5), Variant::Literal).unwrap();
        let j1 = report.to_json();
        let j2 = report.to_json();
        assert_eq!(j1, j2);
        assert!(j1.contains("\"terms\""));
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), 19);
        assert!(csv.contains("W_x1*x2*"));
    }

    fn unit_channel(rho: f64, snr: f64, seeds: (u64, u64)) -> MixtureChannel {
        let psd = flat_psd(0.4, 0.05);
        MixtureChannel::new(
            SourceModel::gaussian_real(psd.clone(), seeds.0),
            SourceModel::gaussian_real(psd, seeds.1),
            rho,
            snr,
            FieldConvention::Real,
        )
        .unwrap()
    }

    /// Complex circular inputs keep the folded-band denominator mean at
    /// full strength (no half-rate image splits it), so with a short
    /// grid and a deep ensemble every ratio cell stays several standard
    /// errors clear of the guard. The statistical bound tests use this.
    fn complex_channel(rho: f64, snr: f64, seeds: (u64, u64)) -> MixtureChannel {
        let psd = flat_psd(0.4, 0.05);
        MixtureChannel::new(
            SourceModel::gaussian(psd.clone(), seeds.0),
            SourceModel::gaussian(psd, seeds.1),
            rho,
            snr,
            FieldConvention::ComplexCircular,
        )
        .unwrap()
    }

    #[test]
    fn pipeline_rejects_thin_ensembles_and_zero_snr() {
        let ch = unit_channel(0.0, 1.0, (1, 2));
        let spec = ideal_spec(0.5);
        assert!(
            tf_immse_derivative(&ch, &spec, 64, 1.0, 50, Variant::Literal, Reduction::None)
                .is_err()
        );
        let ch0 = unit_channel(0.0, 0.0, (1, 2));
        assert!(
            tf_immse_derivative(&ch0, &spec, 64, 1.0, 200, Variant::Literal, Reduction::None)
                .is_err()
        );
    }

    #[test]
    fn independent_ensemble_cross_terms_vanish_within_bootstrap_error() {
        let ch = complex_channel(0.0, 1.0, (101, 202));
        let spec = ideal_spec(0.5);
        let (_, report) = tf_immse_derivative(
            &ch,
            &spec,
            32,
            1.0,
            1200,
            Variant::SquaredNumerator,
            Reduction::None,
        )
        .unwrap();
        assert_eq!(report.guarded_cells, 0, "denominator dipped to the guard");
        let stats = report.ensemble.as_ref().unwrap();
        for term in &report.terms {
            if INDEPENDENT_INDICES.contains(&term.index) {
                continue;
            }
            let se = stats.term_stderr[term.index - 1];
            assert!(
                term.value.norm() <= 3.0 * se,
                "term {}: |value| {} > 3 x stderr {}",
                term.index,
                term.value.norm(),
                se
            );
        }
        let reduced = reduce_independent(&report);
        let gap = (reduced.reduced_total - report.total).norm();
        assert!(
            gap <= 3.0 * stats.excluded_sum_stderr,
            "reduced-full gap {gap} vs stderr {}",
            stats.excluded_sum_stderr
        );
    }

    #[test]
    fn information_loss_shrinks_as_noise_vanishes() {
        // With x2 absent the reduced functional is term1 - term2; as snr
        // grows the normalized observation spectrum approaches the input
        // spectrum, so the folded ratio approaches the band energy and
        // the difference decreases.
        let psd = flat_psd(0.4, 0.05);
        let spec = ideal_spec(1.0);
        let mut last = f64::INFINITY;
        for snr in [1.0, 10.0, 100.0] {
            let ch = MixtureChannel::new(
                SourceModel::gaussian_real(psd.clone(), 31),
                SourceModel::chirp(0.1, 0.1, 0.0, 0),
                0.0,
                snr,
                FieldConvention::Real,
            )
            .unwrap();
            let (_, report) = tf_immse_derivative(
                &ch,
                &spec,
                64,
                1.0,
                160,
                Variant::SquaredNumerator,
                Reduction::None,
            )
            .unwrap();
            let loss = (report.terms[0].signed() + report.terms[1].signed()).re;
            assert!(
                loss < last,
                "snr {snr}: term1-term2 {loss} did not decrease from {last}"
            );
            // x2 is identically zero, so every other term vanishes.
            for term in &report.terms[2..] {
                if term.index == 6 || term.index == 7 {
                    continue;
                }
                assert_eq!(term.value, Complex64::new(0.0, 0.0), "term {}", term.index);
            }
            last = loss;
        }
    }

    #[test]
    fn correlation_separates_totals_beyond_bootstrap_error() {
        let spec = ideal_spec(0.5);
        let (_, indep) = tf_immse_derivative(
            &complex_channel(0.0, 1.0, (41, 42)),
            &spec,
            32,
            1.0,
            1200,
            Variant::SquaredNumerator,
            Reduction::None,
        )
        .unwrap();
        let (_, corr) = tf_immse_derivative(
            &complex_channel(0.9, 1.0, (41, 42)),
            &spec,
            32,
            1.0,
            1200,
            Variant::SquaredNumerator,
            Reduction::None,
        )
        .unwrap();
        let gap = (corr.total - indep.total).norm();
        let se_i = indep.ensemble.as_ref().unwrap().total_stderr;
        let se_c = corr.ensemble.as_ref().unwrap().total_stderr;
        let se = se_i.hypot(se_c);
        assert!(gap > 5.0 * se, "gap {gap} vs 5 x stderr {}", 5.0 * se);
    }

    #[test]
    fn pipeline_is_deterministic() {
        let ch = unit_channel(0.3, 1.0, (7, 8));
        let spec = ideal_spec(0.5);
        let run = || {
            tf_immse_derivative(&ch, &spec, 64, 1.0, 120, Variant::Literal, Reduction::Real)
                .unwrap()
        };
        let (v1, r1) = run();
        let (v2, r2) = run();
        assert_eq!(v1, v2);
        assert_eq!(r1.to_json(), r2.to_json());
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let (v3, r3) = pool.install(run);
        assert_eq!(v1, v3);
        assert_eq!(r1.to_json(), r3.to_json());
    }
}
