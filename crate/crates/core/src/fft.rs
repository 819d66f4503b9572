//! Shared FFT plumbing.
//!
//! Thin wrapper over rustfft with a process-wide plan cache. Forward
//! transforms are unnormalized DFTs; inverse transforms divide by n, so
//! `idft(dft(x)) == x` up to rounding.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::{Arc, Mutex, OnceLock};

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

/// Returns a cached forward-DFT plan of length `n`; the plan is `Send + Sync`
/// and cheap to clone into worker threads.
pub fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_forward(n)
}

/// Returns a cached inverse-DFT plan of length `n` (unnormalized).
pub fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_inverse(n)
}

/// In-place unnormalized forward DFT.
pub fn dft(data: &mut [Complex64]) {
    plan_forward(data.len()).process(data);
}

/// In-place inverse DFT normalized by 1/n.
pub fn idft(data: &mut [Complex64]) {
    let n = data.len();
    plan_inverse(n).process(data);
    let scale = 1.0 / n as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn round_trip_recovers_input() {
        let n = 64;
        let orig: Vec<Complex64> = (0..n)
            .map(|k| Complex64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut data = orig.clone();
        dft(&mut data);
        idft(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn single_tone_lands_in_one_bin() {
        let n = 32;
        let k0 = 5;
        let mut data: Vec<Complex64> = (0..n)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * (k0 * k) as f64 / n as f64))
            .collect();
        dft(&mut data);
        for (m, v) in data.iter().enumerate() {
            let expect = if m == k0 { n as f64 } else { 0.0 };
            assert!((v.norm() - expect).abs() < 1e-9, "bin {m}: {v}");
        }
    }
}
