//! Thin wrappers over `rustfft` with a per-thread plan cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward transform: X[m] = Σ x[n] e^{-j2πmn/L}.
pub fn fft_in_place(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// Normalized inverse transform (1/L scaling), so `ifft(fft(x)) == x`.
pub fn ifft_in_place(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Unitary DFT, out[m] = L^{-1/2} Σ v[n] e^{-j2πmn/L}.
pub fn dft(v: &[Complex64]) -> Vec<Complex64> {
    let mut out = v.to_vec();
    fft_in_place(&mut out);
    let scale = 1.0 / (v.len().max(1) as f64).sqrt();
    out.iter_mut().for_each(|x| *x *= scale);
    out
}

/// Inverse of [`dft`] (its Hermitian adjoint).
pub fn idft(v: &[Complex64]) -> Vec<Complex64> {
    let mut out = v.to_vec();
    if out.is_empty() {
        return out;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(out.len()));
    fft.process(&mut out);
    let scale = 1.0 / (v.len() as f64).sqrt();
    out.iter_mut().for_each(|x| *x *= scale);
    out
}
