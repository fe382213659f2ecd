use super::blowup::{estimate_t_star, BlowupEstimate};
use super::stepper::Stepper;
use super::{ConservationRecord, SimulationState};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = min(dt0, c_adapt / max|L(|u|^2)|)`.
    Adaptive { dt0: f64, c_adapt: f64 },
}

impl DtPolicy {
    /// Adaptive policy with `dt0 = 0.25 dx^2` and `c_adapt = 0.1`.
    pub fn default_for(dx: f64) -> Self {
        DtPolicy::Adaptive {
            dt0: 0.25 * dx * dx,
            c_adapt: 0.1,
        }
    }

    fn dt(&self, max_potential: f64) -> f64 {
        match *self {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::Adaptive { dt0, c_adapt } => {
                if max_potential > 0.0 {
                    dt0.min(c_adapt / max_potential)
                } else {
                    dt0
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvolveConfig {
    pub t_end: f64,
    pub dt: DtPolicy,
    /// Records are taken at `t0 + k * sample_interval` exactly.
    pub sample_interval: f64,
    /// Stop once `sup|u|` exceeds this; `0.5/dx` by default.
    pub sup_guard: f64,
    /// Stop once `int |grad u|^2` exceeds this; `sup_guard^2` by default.
    pub gradient_guard_sq: f64,
    pub dealias: bool,
    pub max_steps: usize,
}

impl EvolveConfig {
    pub fn new(dx: f64, t_end: f64, sample_interval: f64) -> Self {
        let guard = 0.5 / dx;
        Self {
            t_end,
            dt: DtPolicy::default_for(dx),
            sample_interval,
            sup_guard: guard,
            gradient_guard_sq: guard * guard,
            dealias: false,
            max_steps: 50_000_000,
        }
    }

    pub fn with_dt(mut self, dt: DtPolicy) -> Self {
        self.dt = dt;
        self
    }

    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        let dt_ok = match self.dt {
            DtPolicy::Fixed(dt) => positive(dt),
            DtPolicy::Adaptive { dt0, c_adapt } => positive(dt0) && positive(c_adapt),
        };
        if !dt_ok {
            return Err(Error::Usage(format!("invalid time step policy {:?}", self.dt)));
        }
        if !positive(self.sample_interval) {
            return Err(Error::Usage("sample_interval must be positive".into()));
        }
        if !(self.sup_guard > 0.0 && self.gradient_guard_sq > 0.0) {
            return Err(Error::Usage("guards must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Completed,
    SupGuard,
    GradientGuard,
    NonFinite,
    StepLimit,
}

impl StopReason {
    pub fn is_blowup(self) -> bool {
        matches!(
            self,
            StopReason::SupGuard | StopReason::GradientGuard | StopReason::NonFinite
        )
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub state: SimulationState,
    pub records: Vec<ConservationRecord>,
    pub stop: StopReason,
    /// Present when the run stopped on a guard and the terminal regime could be fitted.
    pub estimate: Option<BlowupEstimate>,
}

pub fn run(s0: SimulationState, cfg: &EvolveConfig) -> Result<RunOutput> {
    run_with(s0, cfg, |_, _| Ok(()))
}

/// Like [`run`], calling `on_sample` with the state and record at every
/// sampling instant (including `t0` and the terminal state).
pub fn run_with<F>(s0: SimulationState, cfg: &EvolveConfig, mut on_sample: F) -> Result<RunOutput>
where
    F: FnMut(&SimulationState, &ConservationRecord) -> Result<()>,
{
    cfg.validate()?;
    if !(cfg.t_end > s0.t) {
        return Err(Error::Usage(format!(
            "t_end = {} must exceed the initial time {}",
            cfg.t_end, s0.t
        )));
    }
    let grid = *s0.u.grid();
    let mut stepper = Stepper::new(grid, &s0.params, cfg.dealias);
    let mut state = s0;
    let t0 = state.t;

    let max_potential0 = stepper
        .potential(state.u.values())
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut max_potential = max_potential0;

    let first = state.record(0.0);
    on_sample(&state, &first)?;
    let mut records = vec![first];
    let mut sample_k = 1usize;
    let mut stop = StopReason::Completed;
    let mut last_dt = 0.0;

    loop {
        let next_sample = (t0 + sample_k as f64 * cfg.sample_interval).min(cfg.t_end);
        let remaining = next_sample - state.t;
        let mut dt = cfg.dt.dt(max_potential);
        let mut landed = false;
        if dt >= remaining * (1.0 - 1e-9) {
            dt = remaining;
            landed = true;
        }

        let info = match stepper.step(&mut state, dt) {
            Ok(info) => info,
            Err(Error::Overflow { .. }) => {
                stop = StopReason::NonFinite;
                break;
            }
            Err(e) => return Err(e),
        };
        last_dt = dt;
        max_potential = info.max_potential;

        if landed {
            state.t = next_sample;
        }
        if info.sup_abs > cfg.sup_guard {
            stop = StopReason::SupGuard;
            break;
        }
        if info.gradient_norm_sq > cfg.gradient_guard_sq {
            stop = StopReason::GradientGuard;
            break;
        }
        if landed {
            let rec = state.record(dt);
            on_sample(&state, &rec)?;
            records.push(rec);
            sample_k += 1;
            if next_sample >= cfg.t_end {
                break;
            }
        }
        if state.step_index >= cfg.max_steps {
            stop = StopReason::StepLimit;
            break;
        }
    }

    if stop != StopReason::Completed && records.last().map(|r| r.t) != Some(state.t) {
        let rec = state.record(last_dt);
        on_sample(&state, &rec)?;
        records.push(rec);
    }

    let estimate = if stop.is_blowup() {
        estimate_t_star(&records).ok()
    } else {
        None
    };
    Ok(RunOutput {
        state,
        records,
        stop,
        estimate,
    })
}
