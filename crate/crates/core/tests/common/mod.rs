//! Oracles written independently of the library code paths they check.

#![allow(dead_code)]

use std::f64::consts::PI;

use dsbu::{Field, Grid2D, Space};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real_field(grid: Grid2D, rng: &mut ChaCha8Rng) -> Field {
    let v = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    Field::from_values(grid, v, Space::Physical).unwrap()
}

pub fn random_complex_field(grid: Grid2D, rng: &mut ChaCha8Rng) -> Field {
    let v = (0..grid.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Field::from_values(grid, v, Space::Physical).unwrap()
}

/// Signed frequency index of DFT bin `k`.
fn signed(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// `B f` for the discrete multiplier `xi1^2/|xi|^2` (value `zero` at the
/// origin), by one direct `O(n^4)` double sum per output point.
pub fn brute_force_b(f: &Field, zero: f64) -> Vec<Complex64> {
    let g = f.grid();
    let n = g.n();
    let u = f.to_physical().values().to_vec();
    let mut out = vec![Complex64::new(0.0, 0.0); n * n];
    // kernel K(d) = (1/n^2) sum_k m(k) e^{2 pi i k.d/n}, then out = K * u
    let mut kernel = vec![0.0f64; n * n];
    for d1 in 0..n {
        for d2 in 0..n {
            let mut s = 0.0;
            for k1 in 0..n {
                for k2 in 0..n {
                    let (a, b) = (signed(k1, n), signed(k2, n));
                    let m = if k1 == 0 && k2 == 0 { zero } else { a * a / (a * a + b * b) };
                    let ph = 2.0 * PI * ((k1 * d1 + k2 * d2) % n) as f64 / n as f64;
                    s += m * ph.cos();
                }
            }
            kernel[d1 * n + d2] = s / (n * n) as f64;
        }
    }
    for i in 0..n {
        for j in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for a in 0..n {
                for b in 0..n {
                    let d = ((i + n - a) % n) * n + (j + n - b) % n;
                    s += u[a * n + b] * kernel[d];
                }
            }
            out[i * n + j] = s;
        }
    }
    out
}

/// Mass of the radial Townes profile `Q'' + Q'/r - Q + Q^3 = 0`, by
/// bisection on `Q(0)` with a classical RK4 shooting integrator.
pub fn townes_mass() -> f64 {
    fn shoot(q0: f64) -> (bool, f64) {
        let h = 5e-4;
        let f = |r: f64, q: f64, p: f64| (p, -p / r + q - q * q * q);
        let mut r = 1e-8;
        let (mut q, mut p) = (q0, 0.0);
        let mut mass = 0.0;
        while r < 12.0 {
            let (a1, b1) = f(r, q, p);
            let (a2, b2) = f(r + h / 2.0, q + h / 2.0 * a1, p + h / 2.0 * b1);
            let (a3, b3) = f(r + h / 2.0, q + h / 2.0 * a2, p + h / 2.0 * b2);
            let (a4, b4) = f(r + h, q + h * a3, p + h * b3);
            let qn = q + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
            let pn = p + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
            mass += 0.5 * h * (q * q * r + qn * qn * (r + h));
            r += h;
            q = qn;
            p = pn;
            if q < 0.0 {
                return (true, mass);
            }
            if p > 0.0 {
                return (false, mass);
            }
        }
        (false, mass)
    }
    let (mut lo, mut hi) = (1.5, 3.0);
    for _ in 0..55 {
        let mid = 0.5 * (lo + hi);
        if shoot(mid).0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    2.0 * PI * shoot(lo).1
}

/// Sup over grid centres of the mass in a disk (`square = false`, `size` the
/// radius) or square (`size` the side), by direct summation.
pub fn brute_force_window(u: &Field, size: f64, square: bool) -> f64 {
    let g = u.grid();
    let n = g.n() as i64;
    let dx = g.dx();
    let dens: Vec<f64> = u.to_physical().values().iter().map(|v| v.norm_sqr()).collect();
    let min_image = |d: i64| {
        let m = d.rem_euclid(n);
        if m >= n / 2 {
            m - n
        } else {
            m
        }
    };
    let mut best = 0.0f64;
    for c1 in 0..n {
        for c2 in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let (d1, d2) = (min_image(i - c1) as f64 * dx, min_image(j - c2) as f64 * dx);
                    let inside = if square {
                        d1.abs() <= size / 2.0 && d2.abs() <= size / 2.0
                    } else {
                        d1 * d1 + d2 * d2 <= size * size
                    };
                    if inside {
                        s += dens[(i * n + j) as usize];
                    }
                }
            }
            best = best.max(s * dx * dx);
        }
    }
    best
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}
