use super::ConservationRecord;
use crate::error::{Error, Result};

/// Least-squares quadratic `c0 + c1 t + c2 t^2` through the second moment.
#[derive(Clone, Copy, Debug)]
pub struct VirialFit {
    pub coeffs: [f64; 3],
    /// `4 E(u0)`, the value the leading coefficient should take.
    pub expected_leading: f64,
    /// `|c2 - 4E| / max(|4E|, eps)`.
    pub leading_coeff_error: f64,
    /// `|c2 - 4E|`.
    pub leading_coeff_abs_error: f64,
}

const LEADING_EPS: f64 = 1e-12;

/// Solves the 3x3 system by Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = ((row + 1)..3).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}

/// Quadratic least squares on `(t, y)`, returned in the monomial basis of `t`.
pub(crate) fn quadratic_fit(t: &[f64], y: &[f64]) -> Option<[f64; 3]> {
    let n = t.len() as f64;
    let shift = t.iter().sum::<f64>() / n;
    let scale = t.iter().map(|v| (v - shift).abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (ti, yi) in t.iter().zip(y) {
        let s = (ti - shift) / scale;
        let basis = [1.0, s, s * s];
        for i in 0..3 {
            aty[i] += basis[i] * yi;
            for j in 0..3 {
                ata[i][j] += basis[i] * basis[j];
            }
        }
    }
    let [b0, b1, b2] = solve3(ata, aty)?;
    // y = b0 + b1 (t - m)/s + b2 (t - m)^2/s^2
    let c2 = b2 / (scale * scale);
    let c1 = b1 / scale - 2.0 * b2 * shift / (scale * scale);
    let c0 = b0 - b1 * shift / scale + b2 * shift * shift / (scale * scale);
    Some([c0, c1, c2])
}

/// Fits `int |x|^2 |u(t)|^2 = 4 E(u0) t^2 + c t + int |x|^2 |u0|^2`.
pub fn virial_check(records: &[ConservationRecord], e0: f64) -> Result<VirialFit> {
    if let Some(bad) = records.iter().find(|r| !r.moment_valid) {
        return Err(Error::InvalidMoment(bad.t));
    }
    if records.len() < 5 {
        return Err(Error::Insufficient(format!(
            "virial fit needs at least 5 records, got {}",
            records.len()
        )));
    }
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let y: Vec<f64> = records.iter().map(|r| r.second_moment).collect();
    let coeffs = quadratic_fit(&t, &y)
        .ok_or_else(|| Error::Insufficient("degenerate sampling times".into()))?;
    let expected = 4.0 * e0;
    let abs = (coeffs[2] - expected).abs();
    Ok(VirialFit {
        coeffs,
        expected_leading: expected,
        leading_coeff_error: abs / expected.abs().max(LEADING_EPS),
        leading_coeff_abs_error: abs,
    })
}
