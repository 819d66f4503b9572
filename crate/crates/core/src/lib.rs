//! Time-frequency I-MMSE analysis toolkit.
//!
//! Signal models and mixtures ([`signal`]), Wigner-Ville distributions and
//! spectra ([`tfa`]), sub-Nyquist conditional spectra ([`sampling`]),
//! estimation-theoretic quantities ([`estimation`]), and the time-frequency
//! decomposition of the mutual-information derivative ([`tfimmse`]).

pub mod checks;
pub mod cli;
pub mod error;
pub mod estimation;
pub mod fft;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod signal;
pub mod svg;
pub mod tfa;
pub mod tfimmse;

pub use error::{Error, Result};
pub use estimation::{
    closed_form_mi, closed_form_mmse, closed_form_psi, immse_sweep, mmse_mc, mutual_info, psi_mc,
    ConditionalEstimator, ImmsePoint, ImmseReport, MiMethod, Prior,
};
pub use sampling::{
    conditional_psd, conditional_wd, mmse_freq, reconstruction_energy, FilterShape, SamplingSpec,
};
pub use signal::{
    analytic_signal, mix, Alphabet, FieldConvention, MixtureChannel, ModelKind, Signal, SourceModel,
};
pub use tfa::{
    cross_wigner, mixture_wd_check, psd, psd_welch, stft, welch_periodogram, wigner, wigner_with,
    wv_spectrum, LagMode, SpectralDensity, TFDist, TfKind,
};
pub use tfimmse::{
    evaluate_terms, reduce_independent, reduce_real, tf_immse_derivative, Band, Factor, ImmseTerm,
    RealAggregate, Reduction, TfImmseReport, Variant, INDEPENDENT_INDICES, REAL_GROUPS,
};
