//! Two-dimensional FFT on row-major square buffers.
//!
//! Plans are cached in a thread-local planner, so a transform never shares
//! mutable state across threads.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

const TILE: usize = 32;

fn transpose(buf: &mut [Complex64], n: usize) {
    // tiled so both sides of each swap stay in cache
    for bi in (0..n).step_by(TILE) {
        for bj in (bi..n).step_by(TILE) {
            for i in bi..(bi + TILE).min(n) {
                let j0 = if bi == bj { i + 1 } else { bj };
                for j in j0..(bj + TILE).min(n) {
                    buf.swap(i * n + j, j * n + i);
                }
            }
        }
    }
}

fn transform(buf: &mut [Complex64], n: usize, direction: FftDirection) {
    debug_assert_eq!(buf.len(), n * n);
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft(n, direction));
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    // rows (x2 axis), then columns (x1 axis) through a transpose
    fft.process_with_scratch(buf, &mut scratch);
    transpose(buf, n);
    fft.process_with_scratch(buf, &mut scratch);
    transpose(buf, n);
}

/// Unnormalized forward transform `U_k = sum_j u_j exp(-2 pi i j.k / n)`.
pub fn forward(buf: &mut [Complex64], n: usize) {
    transform(buf, n, FftDirection::Forward);
}

/// Inverse transform including the `1/n^2` factor.
pub fn inverse(buf: &mut [Complex64], n: usize) {
    transform(buf, n, FftDirection::Inverse);
    let scale = 1.0 / (n * n) as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}
