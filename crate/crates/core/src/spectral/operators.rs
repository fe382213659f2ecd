//! The nonlocal multipliers `B` (symbol `xi1^2 / |xi|^2`) and `L = nu I + gamma B`.

use num_complex::Complex64;

use super::field::{Field, Space};
use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Inputs to `B` must be real up to this relative imaginary part.
pub const REALITY_TOL: f64 = 1e-12;

/// Value given to the symbol of `B` at `xi = 0`, where `xi1^2/|xi|^2` has
/// no limit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZeroMode {
    /// `m(0) = 0`: `B` annihilates constants.
    Zero,
    /// `m(0) = 1/2`, the angular mean of the symbol. On a periodic box this
    /// makes `B` agree with the sum over periodic images of the whole-plane
    /// operator, so scaling identities hold up to the box truncation error.
    #[default]
    AngularMean,
}

impl ZeroMode {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            ZeroMode::Zero => 0.0,
            ZeroMode::AngularMean => 0.5,
        }
    }
}

/// Coefficients of `L = nu I + gamma B`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    nu: f64,
    gamma: f64,
    zero_mode: ZeroMode,
}

impl OperatorParams {
    pub fn new(nu: i32, gamma: f64) -> Result<Self> {
        if nu != 1 && nu != -1 {
            return Err(Error::Domain(format!("nu must be ±1, got {nu}")));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
        }
        Ok(Self {
            nu: nu as f64,
            gamma,
            zero_mode: ZeroMode::default(),
        })
    }

    /// `gamma = 0`: the nonlocal part switched off, leaving the cubic NLS.
    pub fn cubic_nls(nu: i32) -> Result<Self> {
        if nu != 1 && nu != -1 {
            return Err(Error::Domain(format!("nu must be ±1, got {nu}")));
        }
        Ok(Self {
            nu: nu as f64,
            gamma: 0.0,
            zero_mode: ZeroMode::default(),
        })
    }

    pub fn with_zero_mode(mut self, zero_mode: ZeroMode) -> Self {
        self.zero_mode = zero_mode;
        self
    }

    #[inline]
    pub fn zero_mode(&self) -> ZeroMode {
        self.zero_mode
    }

    #[inline]
    pub fn nu(&self) -> f64 {
        self.nu
    }

    #[inline]
    pub fn nu_sign(&self) -> i32 {
        self.nu as i32
    }

    #[inline]
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_focusing(&self) -> bool {
        self.nu > 0.0
    }

    /// Negative-energy data exist exactly when `-nu < gamma`.
    pub fn admits_negative_energy(&self) -> bool {
        -self.nu < self.gamma
    }

    /// Symbol of `L` at one wavenumber.
    #[inline]
    pub fn symbol(&self, xi1: f64, xi2: f64) -> f64 {
        self.nu + self.gamma * b_symbol(xi1, xi2, self.zero_mode)
    }
}

/// `xi1^2 / (xi1^2 + xi2^2)`, with the origin value taken from `zero`.
#[inline]
pub fn b_symbol(xi1: f64, xi2: f64, zero: ZeroMode) -> f64 {
    let r = xi1 * xi1 + xi2 * xi2;
    if r == 0.0 {
        zero.value()
    } else {
        xi1 * xi1 / r
    }
}

/// 2/3-rule mask: keeps modes with `|k'| < n/3` on both axes.
fn keep_mode(grid: &Grid2D, k1: usize, k2: usize) -> bool {
    let cut = grid.n() as i64 / 3;
    grid.mode(k1).abs() < cut && grid.mode(k2).abs() < cut
}

/// Multiplies the spectrum by `symbol(xi1, xi2)` in place.
pub(crate) fn apply_symbol(spec: &mut Field, symbol: impl Fn(f64, f64) -> f64, dealias: bool) {
    debug_assert_eq!(spec.space(), Space::Spectral);
    let grid = *spec.grid();
    let xi = grid.wavenumbers();
    let n = grid.n();
    let vals = spec.values_mut();
    for k1 in 0..n {
        for k2 in 0..n {
            let idx = k1 * n + k2;
            if dealias && !keep_mode(&grid, k1, k2) {
                vals[idx] = Complex64::new(0.0, 0.0);
            } else {
                vals[idx] *= symbol(xi[k1], xi[k2]);
            }
        }
    }
}

fn check_real(f: &Field) -> Result<Field> {
    let phys = f.to_physical();
    let rel = phys.relative_imag();
    if rel > REALITY_TOL {
        return Err(Error::Domain(format!(
            "operator input must be real (relative imaginary part {rel:.3e})"
        )));
    }
    Ok(phys)
}

fn multiplier(f: &Field, symbol: impl Fn(f64, f64) -> f64, dealias: bool) -> Result<Field> {
    let phys = check_real(f)?;
    let mut spec = phys.into_spectral();
    apply_symbol(&mut spec, symbol, dealias);
    let mut out = spec.into_physical();
    // symbol is real and even: the exact result is real
    out.values_mut().iter_mut().for_each(|v| v.im = 0.0);
    Ok(out)
}

/// `B f` for a real field `f`.
pub fn apply_b(f: &Field, zero: ZeroMode) -> Result<Field> {
    multiplier(f, |a, b| b_symbol(a, b, zero), false)
}

/// `L f = nu f + gamma B f` for a real field `f`.
pub fn apply_l(f: &Field, p: &OperatorParams) -> Result<Field> {
    multiplier(f, |a, b| p.symbol(a, b), false)
}

/// `L f` with optional 2/3-rule truncation of `f` before applying the symbol.
pub fn apply_l_dealiased(f: &Field, p: &OperatorParams, dealias: bool) -> Result<Field> {
    multiplier(f, |a, b| p.symbol(a, b), dealias)
}

/// `<B f, g>` by the rectangle rule, for real `f` and `g` on the same grid.
pub fn b_inner(f: &Field, g: &Field, zero: ZeroMode) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    let bf = apply_b(f, zero)?;
    let g = g.to_physical();
    let s: f64 = bf
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a.re * b.re)
        .sum();
    Ok(s * f.grid().cell_area())
}
