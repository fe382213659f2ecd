//! Strang splitting with both substeps solved exactly.
//!
//! `Lin(tau)`: `u_hat <- exp(-i |xi|^2 tau) u_hat` (free flow).
//! `Nonlin(tau)`: `u <- exp(i tau L(|u|^2)) u` pointwise; `L(|u|^2)` is real
//! so `|u|` is untouched and the rotation is the exact flow of that part.

use num_complex::Complex64;

use super::SimulationState;
use crate::error::{Error, Result};
use crate::spectral::{fft, Grid2D, OperatorParams};

/// By-products of one step, computed without extra transforms.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    /// `int |grad u|^2` at the end of the step.
    pub gradient_norm_sq: f64,
    pub sup_abs: f64,
    /// `max |L(|u|^2)|` at the midpoint of the step.
    pub max_potential: f64,
}

/// Precomputed symbols for repeated steps on one grid.
#[derive(Clone, Debug)]
pub struct Stepper {
    grid: Grid2D,
    lap: Vec<f64>,
    xi_sq: Vec<f64>,
    l_symbol: Vec<f64>,
    cached_tau: f64,
    free_phase: Vec<Complex64>,
}

impl Stepper {
    /// `dealias` zeroes the outer third of the spectrum of `|u|^2` before `L`
    /// acts on it.
    pub fn new(grid: Grid2D, params: &OperatorParams, dealias: bool) -> Self {
        let n = grid.n();
        let xi = grid.wavenumbers();
        let cut = n as i64 / 3;
        let mut l_symbol = Vec::with_capacity(grid.len());
        for k1 in 0..n {
            for k2 in 0..n {
                let keep = !dealias || (grid.mode(k1).abs() < cut && grid.mode(k2).abs() < cut);
                l_symbol.push(if keep { params.symbol(xi[k1], xi[k2]) } else { 0.0 });
            }
        }
        Self {
            grid,
            lap: grid.laplacian_symbol(),
            xi_sq: xi.iter().map(|k| k * k).collect(),
            l_symbol,
            cached_tau: f64::NAN,
            free_phase: Vec::new(),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    fn free_flow(&mut self, u: &mut [Complex64], tau: f64) {
        if tau != self.cached_tau {
            // exp(-i |xi|^2 tau) factors over the two axes
            let axis: Vec<Complex64> = self
                .xi_sq
                .iter()
                .map(|k2| Complex64::from_polar(1.0, -k2 * tau))
                .collect();
            self.free_phase.clear();
            for a in &axis {
                self.free_phase.extend(axis.iter().map(|b| a * b));
            }
            self.cached_tau = tau;
        }
        for (v, ph) in u.iter_mut().zip(&self.free_phase) {
            *v *= ph;
        }
    }

    /// Physical `L(|u|^2)` (real part only; the imaginary part is roundoff).
    pub fn potential(&self, u: &[Complex64]) -> Vec<f64> {
        let n = self.grid.n();
        let mut w: Vec<Complex64> = u.iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
        fft::forward(&mut w, n);
        for (v, s) in w.iter_mut().zip(&self.l_symbol) {
            *v *= s;
        }
        fft::inverse(&mut w, n);
        w.into_iter().map(|v| v.re).collect()
    }

    /// One Strang step of size `dt` (either sign). On non-finite output the
    /// state is left untouched and an overflow error carries a copy of it.
    pub fn step(&mut self, state: &mut SimulationState, dt: f64) -> Result<StepInfo> {
        if !(dt.is_finite() && dt != 0.0) {
            return Err(Error::Usage(format!("time step must be finite and nonzero, got {dt}")));
        }
        state.u.grid().check_same(&self.grid)?;
        let n = self.grid.n();
        let mut u = state.u.values().to_vec();

        fft::forward(&mut u, n);
        self.free_flow(&mut u, 0.5 * dt);
        fft::inverse(&mut u, n);

        let pot = self.potential(&u);
        let mut max_potential = 0.0f64;
        for (v, p) in u.iter_mut().zip(&pot) {
            let (sin, cos) = (dt * p).sin_cos();
            *v *= Complex64::new(cos, sin);
            max_potential = max_potential.max(p.abs());
        }

        fft::forward(&mut u, n);
        self.free_flow(&mut u, 0.5 * dt);
        let mut grad = 0.0;
        for (v, k2) in u.iter().zip(&self.lap) {
            grad += k2 * v.norm_sqr();
        }
        let gradient_norm_sq = grad * self.grid.cell_area() / self.grid.len() as f64;
        fft::inverse(&mut u, n);

        let finite = u.iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite || !gradient_norm_sq.is_finite() {
            return Err(Error::Overflow {
                t: state.t + dt,
                step: state.step_index + 1,
                last_finite: Box::new(state.clone()),
            });
        }

        let (mut sup_sq, mut quartic) = (0.0f64, 0.0);
        for v in &u {
            let a = v.norm_sqr();
            sup_sq = sup_sq.max(a);
            quartic += a * a;
        }
        let sup_abs = sup_sq.sqrt();
        let l4_next = quartic * self.grid.cell_area();
        state.u.values_mut().copy_from_slice(&u);
        state.l4_accum += 0.5 * dt * (state.l4_now + l4_next);
        state.l4_now = l4_next;
        state.t += dt;
        state.step_index += 1;

        Ok(StepInfo {
            gradient_norm_sq,
            sup_abs,
            max_potential,
        })
    }
}

/// Single step on a copy of `s`, for callers that do not keep a [`Stepper`].
pub fn strang_step(s: &SimulationState, dt: f64) -> Result<SimulationState> {
    if !(dt > 0.0) {
        return Err(Error::Usage(format!("dt must be positive, got {dt}")));
    }
    let mut stepper = Stepper::new(*s.u.grid(), &s.params, false);
    let mut next = s.clone();
    stepper.step(&mut next, dt)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{mass, Field, ZeroMode};

    fn params() -> OperatorParams {
        OperatorParams::new(1, 1.0).unwrap()
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid2D::new(16, 10.0).unwrap();
        let s = SimulationState::new(Field::zeros(g), params());
        let next = strang_step(&s, 0.1).unwrap();
        assert_eq!(next.u.sup_abs(), 0.0);
        assert_eq!(next.t, 0.1);
        assert_eq!(next.step_index, 1);
    }

    #[test]
    fn constant_rotates_at_nu_a_squared_when_b_kills_constants() {
        let g = Grid2D::new(16, 10.0).unwrap();
        let a = 1.7;
        let p = params().with_zero_mode(ZeroMode::Zero);
        let s = SimulationState::new(Field::from_real_fn(g, |_, _| a), p);
        let dt = 0.3;
        let next = strang_step(&s, dt).unwrap();
        let expect = Complex64::from_polar(a, a * a * dt);
        for v in next.u.values() {
            assert!((v - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn constant_rotates_with_angular_mean_zero_mode() {
        let g = Grid2D::new(16, 10.0).unwrap();
        let a = 1.2;
        let p = OperatorParams::new(-1, 0.6).unwrap();
        let s = SimulationState::new(Field::from_real_fn(g, |_, _| a), p);
        let dt = 0.25;
        let next = strang_step(&s, dt).unwrap();
        let expect = Complex64::from_polar(a, (-1.0 + 0.3) * a * a * dt);
        for v in next.u.values() {
            assert!((v - expect).norm() < 1e-13);
        }
    }

    #[test]
    fn rejects_bad_dt() {
        let g = Grid2D::new(16, 10.0).unwrap();
        let s = SimulationState::new(Field::zeros(g), params());
        assert!(strang_step(&s, 0.0).is_err());
        assert!(strang_step(&s, -1.0).is_err());
    }

    #[test]
    fn overflow_keeps_last_finite_state() {
        let g = Grid2D::new(16, 10.0).unwrap();
        let s = SimulationState::new(Field::gaussian(g, 1e200, 1.0, 1.0), params());
        match strang_step(&s, 0.1) {
            Err(Error::Overflow { last_finite, .. }) => {
                assert_eq!(last_finite.t, 0.0);
                assert!(last_finite.u.is_finite());
            }
            other => panic!("expected overflow, got {other:?}"),
        }
    }

    #[test]
    fn reversible_and_mass_preserving() {
        let g = Grid2D::new(64, 20.0).unwrap();
        let u0 = Field::from_fn(g, |a, b| {
            Complex64::new(1.5 * (-(a * a + 2.0 * b * b) / 2.0).exp(), 0.3 * (-(a - 1.0).powi(2) - b * b).exp())
        });
        let mut s = SimulationState::new(u0.clone(), params());
        let mut st = Stepper::new(g, &params(), false);
        let m0 = mass(&u0);
        for _ in 0..20 {
            st.step(&mut s, 0.01).unwrap();
        }
        assert!((mass(&s.u) - m0).abs() <= 1e-13 * m0);
        for _ in 0..20 {
            st.step(&mut s, -0.01).unwrap();
        }
        let err = s.u.sub(&u0).unwrap().l2_norm() / u0.l2_norm();
        assert!(err < 1e-12, "{err}");
    }
}
