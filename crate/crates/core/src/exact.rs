//! Closed-form solutions built from a ground-state profile `R`: the standing
//! wave `R(x) e^{it}` and its pseudo-conformal image
//! `e^{i|x|^2/(4t) - i/t} R(x/t) / |t|`, which blows up at `t = 0`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{self, apply_l, interp, Field, Grid2D, OperatorParams, Space};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionKind {
    StandingWave,
    PseudoConformalStandingWave,
}

/// A closed-form solution tied to a profile and the interval where it may be
/// evaluated.
#[derive(Clone, Debug)]
pub struct AnalyticSolution {
    pub kind: SolutionKind,
    pub profile: Field,
    /// Closed interval for the standing wave, `[-1, 0)` for the blow-up solution.
    pub valid: (f64, f64),
}

impl AnalyticSolution {
    pub fn standing_wave(profile: Field) -> Self {
        Self {
            kind: SolutionKind::StandingWave,
            profile,
            valid: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn pc_blowup(profile: Field) -> Self {
        Self {
            kind: SolutionKind::PseudoConformalStandingWave,
            profile,
            valid: (-1.0, 0.0),
        }
    }

    /// Evaluates at `t`, on `target` for the blow-up solution (ignored for
    /// the standing wave, which lives on the profile grid).
    pub fn eval(&self, t: f64, target: Grid2D) -> Result<Field> {
        match self.kind {
            SolutionKind::StandingWave => Ok(eval_standing_wave(&self.profile, t)),
            SolutionKind::PseudoConformalStandingWave => {
                eval_pc_blowup(&self.profile, t, target)
            }
        }
    }
}

/// `R e^{it}` on the grid of `R`.
pub fn eval_standing_wave(r: &Field, t: f64) -> Field {
    r.to_physical().scaled(Complex64::from_polar(1.0, t))
}

/// The grid of `R` shrunk by `|t|`: the natural sampling of `R(x/t)`.
pub fn pc_grid(profile_grid: &Grid2D, t: f64) -> Result<Grid2D> {
    profile_grid.scaled(t.abs())
}

/// `e^{i|x|^2/(4t) - i/t} R(x/t) / |t|` for `t in [-1, 0)`, with `R(x/t)`
/// obtained by trigonometric interpolation of `R` (zero outside its box).
pub fn eval_pc_blowup(r: &Field, t: f64, target: Grid2D) -> Result<Field> {
    if !(t < 0.0 && t >= -1.0) {
        return Err(Error::Domain(format!(
            "blow-up solution is defined for t in [-1, 0), got {t}"
        )));
    }
    let src = r.grid();
    let min_abs_t = target.dx() / src.dx();
    if target.dx() > t.abs() * src.dx() * (1.0 + 1e-12) {
        return Err(Error::Resolution { min_abs_t });
    }
    let x = target.coords();
    let ys: Vec<f64> = x.iter().map(|v| v / t).collect();
    let samples = interp::sample_tensor(r, &ys, &ys);
    let n = target.n();
    let inv = 1.0 / t.abs();
    let mut values = samples;
    for (i, x1) in x.iter().enumerate() {
        for (j, x2) in x.iter().enumerate() {
            let phase = (x1 * x1 + x2 * x2) / (4.0 * t) - 1.0 / t;
            values[i * n + j] *= Complex64::from_polar(inv, phase);
        }
    }
    Field::from_values(target, values, Space::Physical)
}

/// `||i (u(t+h) - u(t-h))/(2h) + Delta u(t) + L(|u(t)|^2) u(t)||_2 / ||u(t)||_2`.
pub fn pde_residual(
    u: &Field,
    u_minus: &Field,
    u_plus: &Field,
    h: f64,
    p: &OperatorParams,
) -> Result<f64> {
    u.grid().check_same(u_minus.grid())?;
    u.grid().check_same(u_plus.grid())?;
    if !(h > 0.0) {
        return Err(Error::Usage(format!("h must be positive, got {h}")));
    }
    let u = u.to_physical();
    let lap = spectral::laplacian(&u);
    let pot = apply_l(&u.density(), p)?;
    let dt = u_plus.sub(u_minus)?;
    let i_over = Complex64::new(0.0, 1.0 / (2.0 * h));
    let mut res = lap;
    for (((v, d), w), q) in res
        .values_mut()
        .iter_mut()
        .zip(dt.values())
        .zip(u.values())
        .zip(pot.values())
    {
        *v += i_over * d + w * q.re;
    }
    Ok(res.l2_norm() / u.l2_norm())
}
