//! Time integration of `i u_t + Delta u + L(|u|^2) u = 0` and the diagnostics
//! recorded along a trajectory.

mod blowup;
mod initial;
mod run;
mod stepper;
mod virial;

pub use blowup::{estimate_t_star, BlowupEstimate, FitMethod};
pub use initial::{
    negative_energy_gaussian, search_negative_energy, NegativeEnergyData, DEFAULT_ASPECTS,
};
pub use run::{run, run_with, DtPolicy, EvolveConfig, RunOutput, StopReason};
pub use stepper::{strang_step, StepInfo, Stepper};
pub use virial::{virial_check, VirialFit};

use crate::spectral::{
    gradient_norm_sq, l4_norm_4, mass, quartic_term, second_moment, Field, OperatorParams,
};

/// Current point of a trajectory.
#[derive(Clone, Debug)]
pub struct SimulationState {
    pub t: f64,
    pub u: Field,
    pub step_index: usize,
    /// `int_0^t int |u|^4 dx ds`, trapezoid rule at step granularity.
    pub l4_accum: f64,
    pub params: OperatorParams,
    /// `int |u(t)|^4`, cached for the next trapezoid update.
    pub(crate) l4_now: f64,
}

impl SimulationState {
    pub fn new(u: Field, params: OperatorParams) -> Self {
        Self::at_time(u, params, 0.0)
    }

    pub fn at_time(u: Field, params: OperatorParams, t: f64) -> Self {
        let u = u.into_physical();
        let l4_now = l4_norm_4(&u);
        Self {
            t,
            u,
            step_index: 0,
            l4_accum: 0.0,
            params,
            l4_now,
        }
    }

    /// Samples every monitored quantity at the current time.
    pub fn record(&self, dt_used: f64) -> ConservationRecord {
        let m2 = second_moment(&self.u);
        let grad = gradient_norm_sq(&self.u);
        ConservationRecord {
            t: self.t,
            mass: mass(&self.u),
            energy: 0.5 * grad - 0.25 * quartic_term(&self.u, &self.params),
            gradient_norm_sq: grad,
            second_moment: m2.value,
            moment_valid: m2.valid,
            sup_abs: self.u.sup_abs(),
            l4_accum: self.l4_accum,
            dt_used,
        }
    }
}

/// Monitored quantities at one sampling instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConservationRecord {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub gradient_norm_sq: f64,
    pub second_moment: f64,
    pub moment_valid: bool,
    pub sup_abs: f64,
    pub l4_accum: f64,
    pub dt_used: f64,
}

impl ConservationRecord {
    pub const CSV_HEADER: &'static str =
        "t,mass,energy,grad_sq,second_moment,moment_valid,sup_abs,l4_accum,dt";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{},{:e},{:e},{:e}",
            self.t,
            self.mass,
            self.energy,
            self.gradient_norm_sq,
            self.second_moment,
            u8::from(self.moment_valid),
            self.sup_abs,
            self.l4_accum,
            self.dt_used
        )
    }

    pub fn from_csv_row(row: &str) -> Option<Self> {
        let cols: Vec<&str> = row.trim().split(',').collect();
        if cols.len() != 9 {
            return None;
        }
        let f = |i: usize| cols[i].trim().parse::<f64>().ok();
        Some(Self {
            t: f(0)?,
            mass: f(1)?,
            energy: f(2)?,
            gradient_norm_sq: f(3)?,
            second_moment: f(4)?,
            moment_valid: match cols[5].trim() {
                "1" => true,
                "0" => false,
                _ => return None,
            },
            sup_abs: f(6)?,
            l4_accum: f(7)?,
            dt_used: f(8)?,
        })
    }
}

/// Largest `|q(t) - q(t0)| / |q(t0)|` over the records.
pub fn max_relative_drift(records: &[ConservationRecord], q: impl Fn(&ConservationRecord) -> f64) -> f64 {
    let Some(first) = records.first() else {
        return 0.0;
    };
    let q0 = q(first);
    let scale = q0.abs().max(f64::MIN_POSITIVE);
    records
        .iter()
        .map(|r| (q(r) - q0).abs() / scale)
        .fold(0.0, f64::max)
}
