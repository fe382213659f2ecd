//! Band-limited (trigonometric) interpolation on tensor-product point sets.

use num_complex::Complex64;

use super::field::{Field, Space};
use super::grid::Grid2D;
use crate::error::Result;

/// Row of weights mapping DFT coefficients to the interpolant at `y`.
/// Points outside the closed box `[-L/2, L/2]` get an all-zero row.
fn weights(grid: &Grid2D, y: f64) -> Vec<Complex64> {
    let n = grid.n();
    let half = 0.5 * grid.box_length();
    if y.abs() > half * (1.0 + 1e-14) {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    let s = y - grid.coord(0);
    let inv_n = 1.0 / n as f64;
    (0..n)
        .map(|k| {
            let phase = grid.wavenumber(k) * s;
            if k == n / 2 {
                Complex64::new(phase.cos() * inv_n, 0.0)
            } else {
                Complex64::from_polar(inv_n, phase)
            }
        })
        .collect()
}

/// Evaluates the trigonometric interpolant of `u` at every `(ys1[a], ys2[b])`.
///
/// The result is row-major with `ys2` varying fastest. Points outside the box
/// evaluate to zero rather than to the periodic extension.
pub fn sample_tensor(u: &Field, ys1: &[f64], ys2: &[f64]) -> Vec<Complex64> {
    let spec = u.to_spectral();
    let g = *spec.grid();
    let n = g.n();
    let coeffs = spec.values();
    let zero = Complex64::new(0.0, 0.0);

    let w1: Vec<Vec<Complex64>> = ys1.iter().map(|&y| weights(&g, y)).collect();
    let w2: Vec<Vec<Complex64>> = ys2.iter().map(|&y| weights(&g, y)).collect();

    // contract along the first axis
    let mut partial = vec![zero; ys1.len() * n];
    for (a, row_w) in w1.iter().enumerate() {
        let out = &mut partial[a * n..(a + 1) * n];
        for (k1, w) in row_w.iter().enumerate() {
            if *w == zero {
                continue;
            }
            let src = &coeffs[k1 * n..(k1 + 1) * n];
            for (o, c) in out.iter_mut().zip(src) {
                *o += w * c;
            }
        }
    }

    let mut result = vec![zero; ys1.len() * ys2.len()];
    for a in 0..ys1.len() {
        let t = &partial[a * n..(a + 1) * n];
        for (b, row_w) in w2.iter().enumerate() {
            result[a * ys2.len() + b] = row_w.iter().zip(t).map(|(w, c)| w * c).sum();
        }
    }
    result
}

/// Resamples `u` onto `target`, evaluating `u(scale * x)` at each target point.
pub fn resample_scaled(u: &Field, target: Grid2D, scale: f64) -> Result<Field> {
    let ys: Vec<f64> = target.coords().iter().map(|x| scale * x).collect();
    let values = sample_tensor(u, &ys, &ys);
    Field::from_values(target, values, Space::Physical)
}
