//! Rectangle-rule quadratures on the periodic box.

use super::field::{Field, Space};
use super::operators::OperatorParams;

/// Boundary samples must fall below this fraction of `sup|u|` for the second
/// moment to stand in for the whole-plane integral.
pub const MOMENT_DECAY_TOL: f64 = 1e-10;

/// `int |u|^2`.
pub fn mass(u: &Field) -> f64 {
    let g = u.grid();
    let s: f64 = u.values().iter().map(|v| v.norm_sqr()).sum();
    match u.space() {
        Space::Physical => s * g.cell_area(),
        Space::Spectral => s * g.cell_area() / g.len() as f64,
    }
}

/// `int |grad u|^2`, evaluated spectrally.
pub fn gradient_norm_sq(u: &Field) -> f64 {
    let spec = u.to_spectral();
    let g = spec.grid();
    let xi = g.wavenumbers();
    let n = g.n();
    let mut s = 0.0;
    for (k1, a) in xi.iter().enumerate() {
        let row = &spec.values()[k1 * n..(k1 + 1) * n];
        for (v, b) in row.iter().zip(&xi) {
            s += (a * a + b * b) * v.norm_sqr();
        }
    }
    s * g.cell_area() / g.len() as f64
}

/// `int L(|u|^2) |u|^2`, as the quadratic form of the symbol of `L` on the
/// spectrum of `|u|^2`.
pub fn quartic_term(u: &Field, p: &OperatorParams) -> f64 {
    let w = u.density().into_spectral();
    let g = w.grid();
    let xi = g.wavenumbers();
    let n = g.n();
    let mut s = 0.0;
    for (k1, a) in xi.iter().enumerate() {
        let row = &w.values()[k1 * n..(k1 + 1) * n];
        for (v, b) in row.iter().zip(&xi) {
            s += p.symbol(*a, *b) * v.norm_sqr();
        }
    }
    s * g.cell_area() / g.len() as f64
}

/// `E(u) = 1/2 int |grad u|^2 - 1/4 int L(|u|^2)|u|^2`.
pub fn energy(u: &Field, p: &OperatorParams) -> f64 {
    0.5 * gradient_norm_sq(u) - 0.25 * quartic_term(u, p)
}

/// `int |u|^4`.
pub fn l4_norm_4(u: &Field) -> f64 {
    let phys = u.to_physical();
    let s: f64 = phys.values().iter().map(|v| v.norm_sqr().powi(2)).sum();
    s * u.grid().cell_area()
}

/// Second moment together with a flag telling whether the field has decayed
/// at the box boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMoment {
    pub value: f64,
    pub valid: bool,
    /// `max |u|` on the outermost rows and columns over `sup|u|`.
    pub boundary_ratio: f64,
}

/// `int |x|^2 |u|^2` with centred coordinates.
pub fn second_moment(u: &Field) -> SecondMoment {
    let phys = u.to_physical();
    let g = phys.grid();
    let n = g.n();
    let x = g.coords();
    let mut s = 0.0;
    let mut sup = 0.0f64;
    let mut edge = 0.0f64;
    for (i, x1) in x.iter().enumerate() {
        for (j, x2) in x.iter().enumerate() {
            let a = phys.values()[i * n + j];
            let m2 = a.norm_sqr();
            s += (x1 * x1 + x2 * x2) * m2;
            let m = m2.sqrt();
            sup = sup.max(m);
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                edge = edge.max(m);
            }
        }
    }
    let boundary_ratio = if sup > 0.0 { edge / sup } else { 0.0 };
    SecondMoment {
        value: s * g.cell_area(),
        valid: boundary_ratio <= MOMENT_DECAY_TOL,
        boundary_ratio,
    }
}

/// `int x |u|^2` (both components).
pub fn first_moment(u: &Field) -> [f64; 2] {
    let phys = u.to_physical();
    let g = phys.grid();
    let n = g.n();
    let x = g.coords();
    let mut m = [0.0; 2];
    for (i, x1) in x.iter().enumerate() {
        for (j, x2) in x.iter().enumerate() {
            let w = phys.values()[i * n + j].norm_sqr();
            m[0] += x1 * w;
            m[1] += x2 * w;
        }
    }
    let da = g.cell_area();
    [m[0] * da, m[1] * da]
}
