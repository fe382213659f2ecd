//! Positive ground state `R` of `Delta R - R + L(R^2) R = 0` by spectral
//! renormalization, and the sharp constant `C_opt = 2 / ||R||_2^2`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    self, apply_l, gradient_norm_sq, mass, quartic_term, Field, Grid2D, OperatorParams, Space,
};

/// Iteration controls for [`solve_ground_state`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateConfig {
    /// Converged when `||residual||_2 <= tol * min(1, ||R||_2)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Amplitude of the Gaussian `A exp(-|x|^2/2)` used as the first iterate.
    pub initial_amplitude: f64,
}

impl Default for GroundStateConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 2000,
            initial_amplitude: 2.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateResult {
    /// Real, positive profile with its peak at the origin.
    pub profile: Field,
    pub c_opt: f64,
    /// `||Delta R - R + L(R^2) R||_2`.
    pub residual: f64,
    pub iterations: usize,
    /// `int L(R^2) R^2 / (||grad R||^2 ||R||^2)`; equals `c_opt` at the optimizer.
    pub sharpness_ratio: f64,
    pub params: OperatorParams,
    /// Residual after every iteration.
    pub history: Vec<f64>,
}

impl GroundStateResult {
    pub fn mass(&self) -> f64 {
        mass(&self.profile)
    }

    /// Critical mass `2 / C_opt`.
    pub fn critical_mass(&self) -> f64 {
        2.0 / self.c_opt
    }
}

fn nonlinear_term(r: &Field, p: &OperatorParams) -> Result<Field> {
    let pot = apply_l(&r.density(), p)?;
    let mut out = r.to_physical();
    for (v, w) in out.values_mut().iter_mut().zip(pot.values()) {
        *v *= w.re;
    }
    Ok(out)
}

/// `||Delta R - R + L(R^2) R||_2`.
pub fn residual(r: &Field, p: &OperatorParams) -> Result<f64> {
    let lap = spectral::laplacian(r);
    let nl = nonlinear_term(r, p)?;
    let phys = r.to_physical();
    let mut res = lap;
    for ((v, u), w) in res.values_mut().iter_mut().zip(phys.values()).zip(nl.values()) {
        *v = *v - u + w;
    }
    Ok(res.l2_norm())
}

fn take_real(f: &mut Field) {
    f.values_mut().iter_mut().for_each(|v| v.im = 0.0);
}

/// Moves the largest sample to the origin cell.
fn recenter(r: Field) -> Field {
    let n = r.grid().n();
    let (idx, _) = r
        .values()
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, v)| if v.re > bv { (i, v.re) } else { (bi, bv) });
    let (i, j) = (idx / n, idx % n);
    let o = r.grid().origin_index() as isize;
    r.roll(o - i as isize, o - j as isize)
}

pub fn solve_ground_state(
    grid: Grid2D,
    p: &OperatorParams,
    cfg: &GroundStateConfig,
) -> Result<GroundStateResult> {
    if !p.is_focusing() {
        return Err(Error::Domain(
            "ground states are sought only in the focusing case nu = +1".into(),
        ));
    }
    let symbol: Vec<f64> = grid.laplacian_symbol().iter().map(|k2| 1.0 + k2).collect();
    let mut r = Field::gaussian(grid, cfg.initial_amplitude, 1.0, 1.0);
    let mut history = Vec::new();

    for it in 1..=cfg.max_iter {
        let r_hat = r.to_spectral();
        let n_hat = nonlinear_term(&r, p)?.into_spectral();

        let mut num = 0.0;
        let mut den = 0.0;
        for ((a, b), s) in r_hat.values().iter().zip(n_hat.values()).zip(&symbol) {
            num += s * a.norm_sqr();
            den += (a.conj() * b).re;
        }
        if !(den > 0.0) {
            return Err(Error::Domain(format!(
                "renormalization quotient lost positivity at iteration {it}"
            )));
        }
        let factor = (num / den).powf(1.5);

        let values: Vec<Complex64> = n_hat
            .values()
            .iter()
            .zip(&symbol)
            .map(|(v, s)| v * (factor / s))
            .collect();
        let mut next = Field::from_values(grid, values, Space::Spectral)?.into_physical();
        take_real(&mut next);
        if !next.is_finite() {
            return Err(Error::Domain(format!("iterate became non-finite at {it}")));
        }
        r = next;

        let res = residual(&r, p)?;
        history.push(res);
        let norm = r.l2_norm();
        if res <= cfg.tol * norm.min(1.0) {
            return Ok(finish(r, p, res, it, history));
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_iter,
        last_residual: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

fn finish(
    r: Field,
    p: &OperatorParams,
    residual: f64,
    iterations: usize,
    history: Vec<f64>,
) -> GroundStateResult {
    let total: f64 = r.values().iter().map(|v| v.re).sum();
    let r = if total < 0.0 {
        r.scaled(Complex64::new(-1.0, 0.0))
    } else {
        r
    };
    let r = recenter(r);
    let m = mass(&r);
    let g = gradient_norm_sq(&r);
    let q = quartic_term(&r, p);
    GroundStateResult {
        c_opt: 2.0 / m,
        sharpness_ratio: q / (g * m),
        profile: r,
        residual,
        iterations,
        params: *p,
        history,
    }
}

/// Both sides of `int L(|u|^2)|u|^2 <= C_opt ||grad u||^2 ||u||^2`.
#[derive(Clone, Copy, Debug)]
pub struct SharpInequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

pub fn verify_sharp_inequality(
    u: &Field,
    ground: &GroundStateResult,
    p: &OperatorParams,
) -> Result<SharpInequalityReport> {
    if !p.is_focusing() {
        return Err(Error::Domain("sharp inequality is stated for nu = +1".into()));
    }
    let m = mass(u);
    if m == 0.0 {
        return Err(Error::Domain("zero field".into()));
    }
    let lhs = quartic_term(u, p);
    let rhs = ground.c_opt * gradient_norm_sq(u) * m;
    Ok(SharpInequalityReport {
        lhs,
        rhs,
        ratio: lhs / rhs,
    })
}
