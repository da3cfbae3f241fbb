//! Thin wrapper over `rustfft` with the normalization used throughout:
//! ψ̂(k) = (1/N) Σ_j ψ_j e^{−ikθ_j}, and synthesis without a factor.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Coefficients ψ̂(k) stored at index k mod N.
pub fn analysis(samples: &[Complex64]) -> Vec<Complex64> {
    let n = samples.len();
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let s = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= s);
    buf
}

/// Samples Σ_k c_k e^{ikθ_j} from coefficients stored at index k mod N.
pub fn synthesis(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut buf = coeffs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(&mut buf));
    buf
}

pub fn analysis_real(samples: &[f64]) -> Vec<Complex64> {
    analysis(&samples.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>())
}

/// Signed frequency of FFT slot `idx` for length n, in (−n/2, n/2].
pub fn freq(idx: usize, n: usize) -> i64 {
    if idx <= n / 2 {
        idx as i64
    } else {
        idx as i64 - n as i64
    }
}
