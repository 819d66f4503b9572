//! C ABI over the tfimmse library: opaque distribution handles, status
//! codes with a thread-local message slot, and flat-argument entry points
//! for the wigner, sampling, immse, and tf-immse pipelines. Every call is
//! panic-caught; nothing unwinds across the boundary. The header is
//! generated into `include/tfimmse.h` at build time.

use num_complex::Complex64;
use std::cell::RefCell;
use std::ffi::c_char;
use std::fmt::Display;
use std::panic::{catch_unwind, AssertUnwindSafe};
use tfimmse::estimation::{immse_sweep, ConditionalEstimator, Prior};
use tfimmse::sampling::{
    conditional_psd, mmse_freq, reconstruction_energy, FilterShape, SamplingSpec,
};
use tfimmse::signal::{
    analytic_signal, Alphabet, FieldConvention, MixtureChannel, Signal, SourceModel,
};
use tfimmse::tfa::{cross_wigner, wigner, SpectralDensity, TFDist};
use tfimmse::tfimmse::{tf_immse_derivative, Reduction, Variant};

/// Call outcome. Anything but `Ok` leaves a message readable through
/// `tfi_last_error`.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfiStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Arguments were structurally invalid (sizes, ranges, enums).
    InvalidArgument = 2,
    /// The library rejected the request.
    RuntimeError = 3,
    /// An internal panic was caught at the boundary.
    Panic = 4,
}

/// Channel field convention.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfiField {
    Real = 0,
    Complex = 1,
}

impl From<TfiField> for FieldConvention {
    fn from(f: TfiField) -> FieldConvention {
        match f {
            TfiField::Real => FieldConvention::Real,
            TfiField::Complex => FieldConvention::ComplexCircular,
        }
    }
}

/// Input prior for the estimation entry points.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfiPrior {
    Gaussian = 0,
    Bpsk = 1,
}

impl From<TfiPrior> for Prior {
    fn from(p: TfiPrior) -> Prior {
        match p {
            TfiPrior::Gaussian => Prior::Gaussian,
            TfiPrior::Bpsk => Prior::Discrete(Alphabet::bpsk()),
        }
    }
}

/// Term-table numerator variant.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TfiVariant {
    Literal = 0,
    Squared = 1,
}

impl From<TfiVariant> for Variant {
    fn from(v: TfiVariant) -> Variant {
        match v {
            TfiVariant::Literal => Variant::Literal,
            TfiVariant::Squared => Variant::SquaredNumerator,
        }
    }
}

/// Opaque time-frequency distribution handle.
pub struct TfiDist {
    inner: TFDist,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn fail(status: TfiStatus, message: impl Display) -> TfiStatus {
    LAST_ERROR.with(|slot| {
        let mut bytes = message.to_string().into_bytes();
        bytes.retain(|&b| b != 0);
        *slot.borrow_mut() = bytes;
    });
    status
}

fn runtime(e: impl Display) -> TfiStatus {
    fail(TfiStatus::RuntimeError, e)
}

fn guard(body: impl FnOnce() -> TfiStatus) -> TfiStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => fail(TfiStatus::Panic, "internal panic caught at the C boundary"),
    }
}

/// Copies the message of the most recent failure on this thread into
/// `buf` (NUL-terminated, truncated to `cap`). Returns the full message
/// length in bytes, excluding the terminator; 0 means no stored message.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or be null (then only the
/// length is returned).
#[no_mangle]
pub unsafe extern "C" fn tfi_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tfi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

unsafe fn complex_slice(re: *const f64, im: *const f64, n: usize) -> Option<Vec<Complex64>> {
    if re.is_null() {
        return None;
    }
    let re = unsafe { std::slice::from_raw_parts(re, n) };
    let im = if im.is_null() {
        None
    } else {
        Some(unsafe { std::slice::from_raw_parts(im, n) })
    };
    Some(
        (0..n)
            .map(|i| Complex64::new(re[i], im.map_or(0.0, |s| s[i])))
            .collect(),
    )
}

fn build_signal(
    samples: Vec<Complex64>,
    sample_rate: f64,
    analytic: bool,
) -> Result<Signal, TfiStatus> {
    let x = Signal::new(samples, sample_rate, 0.0).map_err(runtime)?;
    if analytic {
        analytic_signal(&x).map_err(runtime)
    } else {
        Ok(x)
    }
}

/// Wigner distribution of one signal. `im` may be null for a real
/// signal. On success `*out` owns a handle to free with `tfi_dist_free`.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `n` readable doubles;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn tfi_wigner(
    re: *const f64,
    im: *const f64,
    n: usize,
    sample_rate: f64,
    analytic: bool,
    out: *mut *mut TfiDist,
) -> TfiStatus {
    guard(|| {
        if out.is_null() {
            return fail(TfiStatus::NullArgument, "out handle pointer is null");
        }
        let Some(samples) = (unsafe { complex_slice(re, im, n) }) else {
            return fail(TfiStatus::NullArgument, "sample pointer is null");
        };
        let x = match build_signal(samples, sample_rate, analytic) {
            Ok(x) => x,
            Err(status) => return status,
        };
        let dist = Box::new(TfiDist { inner: wigner(&x) });
        unsafe { *out = Box::into_raw(dist) };
        TfiStatus::Ok
    })
}

/// Cross-Wigner distribution of two equal-length signals.
///
/// # Safety
/// All non-null data pointers must cover `n` doubles; `out` must be
/// valid. `im1`/`im2` may be null.
#[no_mangle]
pub unsafe extern "C" fn tfi_cross_wigner(
    re1: *const f64,
    im1: *const f64,
    re2: *const f64,
    im2: *const f64,
    n: usize,
    sample_rate: f64,
    out: *mut *mut TfiDist,
) -> TfiStatus {
    guard(|| {
        if out.is_null() {
            return fail(TfiStatus::NullArgument, "out handle pointer is null");
        }
        let (Some(s1), Some(s2)) = (unsafe { complex_slice(re1, im1, n) }, unsafe {
            complex_slice(re2, im2, n)
        }) else {
            return fail(TfiStatus::NullArgument, "sample pointer is null");
        };
        let x1 = match build_signal(s1, sample_rate, false) {
            Ok(x) => x,
            Err(status) => return status,
        };
        let x2 = match build_signal(s2, sample_rate, false) {
            Ok(x) => x,
            Err(status) => return status,
        };
        match cross_wigner(&x1, &x2) {
            Ok(w) => {
                unsafe { *out = Box::into_raw(Box::new(TfiDist { inner: w })) };
                TfiStatus::Ok
            }
            Err(e) => runtime(e),
        }
    })
}

/// Number of time slices in a distribution; 0 for a null handle.
///
/// # Safety
/// `dist` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tfi_dist_time_bins(dist: *const TfiDist) -> usize {
    if dist.is_null() {
        return 0;
    }
    unsafe { &*dist }.inner.nt()
}

/// Number of frequency bins in a distribution; 0 for a null handle.
///
/// # Safety
/// `dist` must be null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn tfi_dist_freq_bins(dist: *const TfiDist) -> usize {
    if dist.is_null() {
        return 0;
    }
    unsafe { &*dist }.inner.nf()
}

/// Copies the grid row-major (time outer, frequency inner) into the two
/// arrays, each of capacity `cap` >= time_bins * freq_bins. `out_im` may
/// be null to take only real parts.
///
/// # Safety
/// `dist` must be a live handle; `out_re` (and `out_im` when non-null)
/// must point to `cap` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn tfi_dist_copy(
    dist: *const TfiDist,
    out_re: *mut f64,
    out_im: *mut f64,
    cap: usize,
) -> TfiStatus {
    guard(|| {
        if dist.is_null() || out_re.is_null() {
            return fail(TfiStatus::NullArgument, "dist and out_re must be non-null");
        }
        let d = &unsafe { &*dist }.inner;
        let need = d.nt() * d.nf();
        if cap < need {
            return fail(
                TfiStatus::InvalidArgument,
                format!("capacity {cap} is below the {need}-cell grid"),
            );
        }
        for t in 0..d.nt() {
            for (m, v) in d.row(t).iter().enumerate() {
                let i = t * d.nf() + m;
                unsafe {
                    *out_re.add(i) = v.re;
                    if !out_im.is_null() {
                        *out_im.add(i) = v.im;
                    }
                }
            }
        }
        TfiStatus::Ok
    })
}

/// Grid integral with the cell area weight.
///
/// # Safety
/// `dist` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn tfi_dist_integral(
    dist: *const TfiDist,
    out_re: *mut f64,
    out_im: *mut f64,
) -> TfiStatus {
    guard(|| {
        if dist.is_null() || out_re.is_null() || out_im.is_null() {
            return fail(TfiStatus::NullArgument, "all arguments must be non-null");
        }
        let v = unsafe { &*dist }.inner.integrate();
        unsafe {
            *out_re = v.re;
            *out_im = v.im;
        }
        TfiStatus::Ok
    })
}

/// Releases a distribution handle. Null is a no-op.
///
/// # Safety
/// `dist` must be null or an owned handle that is not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tfi_dist_free(dist: *mut TfiDist) {
    if !dist.is_null() {
        drop(unsafe { Box::from_raw(dist) });
    }
}

/// Reconstruction loss of a flat-band source observed through a filtered
/// sub-Nyquist sampler with flat noise: writes the frequency-domain mmse
/// and the reconstruction energy.
///
/// # Safety
/// `out_mmse` and `out_recon_energy` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn tfi_sampling_mmse(
    psd_level: f64,
    psd_band: f64,
    noise_level: f64,
    f_max: f64,
    grid_step: f64,
    fs_sub: f64,
    cutoff: f64,
    alias_terms: u32,
    out_mmse: *mut f64,
    out_recon_energy: *mut f64,
) -> TfiStatus {
    guard(|| {
        if out_mmse.is_null() || out_recon_energy.is_null() {
            return fail(TfiStatus::NullArgument, "out pointers must be non-null");
        }
        let body = || -> Result<(f64, f64), tfimmse::error::Error> {
            let s_x = SpectralDensity::flat_band(psd_level, psd_band, f_max, grid_step)?;
            let s_n = SpectralDensity::flat_band(noise_level, f_max, f_max, grid_step)?;
            let spec = SamplingSpec::new(
                fs_sub,
                FilterShape::IdealLowpass { cutoff },
                alias_terms as usize,
            )?;
            let cpsd = conditional_psd(&s_x, &s_n, &spec)?;
            Ok((
                mmse_freq(&s_x, &cpsd, &spec)?,
                reconstruction_energy(&cpsd, &spec)?,
            ))
        };
        match body() {
            Ok((mmse, recon)) => {
                unsafe {
                    *out_mmse = mmse;
                    *out_recon_energy = recon;
                }
                TfiStatus::Ok
            }
            Err(e) => runtime(e),
        }
    })
}

/// I-MMSE identity sweep for one- or two-input channels with unit-power
/// priors. Writes, per grid point, the information derivative, the
/// identity residual, and its standard error. `prior2` is ignored when
/// `n_inputs` is 1.
///
/// # Safety
/// `snr_grid` must cover `grid_len` doubles; the three out arrays must
/// each cover `grid_len` writable doubles.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tfi_immse_sweep(
    prior1: TfiPrior,
    prior2: TfiPrior,
    n_inputs: u32,
    rho: f64,
    field: TfiField,
    snr_grid: *const f64,
    grid_len: usize,
    n_samples: u64,
    seed: u64,
    out_dmi_dsnr: *mut f64,
    out_residual: *mut f64,
    out_residual_stderr: *mut f64,
) -> TfiStatus {
    guard(|| {
        if snr_grid.is_null()
            || out_dmi_dsnr.is_null()
            || out_residual.is_null()
            || out_residual_stderr.is_null()
        {
            return fail(
                TfiStatus::NullArgument,
                "all array pointers must be non-null",
            );
        }
        let grid = unsafe { std::slice::from_raw_parts(snr_grid, grid_len) };
        let est = match n_inputs {
            1 => ConditionalEstimator::single(prior1.into(), 1.0, field.into()),
            2 => ConditionalEstimator::pair(prior1.into(), prior2.into(), rho, 1.0, field.into()),
            k => {
                return fail(
                    TfiStatus::InvalidArgument,
                    format!("n_inputs must be 1 or 2, got {k}"),
                )
            }
        };
        let est = match est {
            Ok(e) => e,
            Err(e) => return runtime(e),
        };
        match immse_sweep(&est, grid, n_samples as usize, seed) {
            Ok(report) => {
                for (i, p) in report.points.iter().enumerate() {
                    unsafe {
                        *out_dmi_dsnr.add(i) = p.dmi_dsnr;
                        *out_residual.add(i) = p.residual;
                        *out_residual_stderr.add(i) = p.residual_stderr;
                    }
                }
                TfiStatus::Ok
            }
            Err(e) => runtime(e),
        }
    })
}

/// Evaluates the 18-term time-frequency decomposition on an ensemble of
/// flat-band Gaussian mixtures. Writes the signed term values into the
/// two length-18 arrays (table order), the grand total, and the guarded
/// cell count.
///
/// # Safety
/// `out_terms_re` and `out_terms_im` must each cover 18 writable
/// doubles; the scalar out pointers must be valid.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn tfi_tf_immse(
    psd_level: f64,
    psd_band: f64,
    psd_step: f64,
    x2_enabled: bool,
    rho: f64,
    snr: f64,
    field: TfiField,
    n: usize,
    sample_rate: f64,
    n_realizations: usize,
    fs_sub: f64,
    cutoff: f64,
    alias_terms: u32,
    variant: TfiVariant,
    seed: u64,
    out_terms_re: *mut f64,
    out_terms_im: *mut f64,
    out_total_re: *mut f64,
    out_total_im: *mut f64,
    out_guarded_cells: *mut usize,
) -> TfiStatus {
    guard(|| {
        if out_terms_re.is_null()
            || out_terms_im.is_null()
            || out_total_re.is_null()
            || out_total_im.is_null()
            || out_guarded_cells.is_null()
        {
            return fail(TfiStatus::NullArgument, "all out pointers must be non-null");
        }
        if !x2_enabled && rho != 0.0 {
            return fail(
                TfiStatus::InvalidArgument,
                "x2_enabled = false requires rho = 0",
            );
        }
        let body = || -> Result<_, tfimmse::error::Error> {
            let psd1 =
                SpectralDensity::flat_band(psd_level, psd_band, 0.5 * sample_rate, psd_step)?;
            let level2 = if x2_enabled { psd_level } else { 0.0 };
            let psd2 = SpectralDensity::flat_band(level2, psd_band, 0.5 * sample_rate, psd_step)?;
            let (m1, m2) = match field {
                TfiField::Real => (
                    SourceModel::gaussian_real(psd1, seed),
                    SourceModel::gaussian_real(psd2, seed.wrapping_add(1)),
                ),
                TfiField::Complex => (
                    SourceModel::gaussian(psd1, seed),
                    SourceModel::gaussian(psd2, seed.wrapping_add(1)),
                ),
            };
            let channel = MixtureChannel::new(m1, m2, rho, snr, field.into())?;
            let spec = SamplingSpec::new(
                fs_sub,
                FilterShape::IdealLowpass { cutoff },
                alias_terms as usize,
            )?;
            let (_, report) = tf_immse_derivative(
                &channel,
                &spec,
                n,
                sample_rate,
                n_realizations,
                variant.into(),
                Reduction::None,
            )?;
            Ok(report)
        };
        match body() {
            Ok(report) => {
                for (i, term) in report.terms.iter().enumerate() {
                    let v = term.signed();
                    unsafe {
                        *out_terms_re.add(i) = v.re;
                        *out_terms_im.add(i) = v.im;
                    }
                }
                unsafe {
                    *out_total_re = report.total.re;
                    *out_total_im = report.total.im;
                    *out_guarded_cells = report.guarded_cells;
                }
                TfiStatus::Ok
            }
            Err(e) => runtime(e),
        }
    })
}
