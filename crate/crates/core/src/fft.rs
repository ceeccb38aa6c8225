//! Shared FFT plumbing over rustfft with a global plan cache.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanKey = (usize, bool);

fn cache() -> &'static Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<dyn Fft<f64>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut guard = cache().lock().unwrap();
    guard
        .entry((len, inverse))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// In-place unnormalized forward transform: X[m] = Σ_l x[l] e^{−2πiml/N}.
pub fn fft_forward(buf: &mut [Complex64]) {
    plan(buf.len(), false).process(buf);
}

/// In-place unnormalized inverse transform: x[l] = Σ_m X[m] e^{+2πiml/N}.
pub fn fft_inverse(buf: &mut [Complex64]) {
    plan(buf.len(), true).process(buf);
}

/// Plan handles for hot loops that reuse a scratch buffer.
pub fn plan_pair(len: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    (plan(len, false), plan(len, true))
}

/// Forward transform of a real signal.
pub fn fft_of_real(x: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    buf
}

/// Real part of the normalized inverse transform.
pub fn real_inverse(spectrum: &[Complex64]) -> Vec<f64> {
    let mut buf = spectrum.to_vec();
    fft_inverse(&mut buf);
    let scale = 1.0 / spectrum.len() as f64;
    buf.iter().map(|c| c.re * scale).collect()
}

/// Signed integer frequency of FFT bin m for length n.
pub fn signed_freq(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}
