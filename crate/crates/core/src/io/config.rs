//! `key = value` run configuration.
//!
//! One file fully determines a run. Lines are `key = value`; `#` starts a
//! comment. Unknown keys, keys that do not apply to the selected mode,
//! duplicates and out-of-range values are rejected with the line number.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::concentration::ScheduleKind;
use crate::error::{Error, Result};
use crate::evolution::DtPolicy;
use crate::ground_state::GroundStateConfig;
use crate::spectral::{Grid2D, OperatorParams, ZeroMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    GroundState,
    Evolve,
    Analyze,
    Verify,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::GroundState => "ground-state",
            Mode::Evolve => "evolve",
            Mode::Analyze => "analyze",
            Mode::Verify => "verify",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ground-state" => Ok(Mode::GroundState),
            "evolve" => Ok(Mode::Evolve),
            "analyze" => Ok(Mode::Analyze),
            "verify" => Ok(Mode::Verify),
            _ => Err(format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// `A exp(-x1^2/(2 w1^2) - x2^2/(2 w2^2))`.
    Gaussian { amplitude: f64, width1: f64, width2: f64 },
    /// Amplitude continuation of a Gaussian until the energy is negative.
    NegativeEnergy,
    /// The ground state, solved on the run grid.
    StandingWave,
    /// The pseudo-conformal blow-up solution at time `t0` in `[-1, 0)`.
    PcBlowup { t0: f64 },
    Snapshot { path: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepperConfig {
    pub dt0: f64,
    pub adaptive: bool,
    pub c_adapt: f64,
    pub dealias: bool,
}

impl StepperConfig {
    pub fn policy(&self) -> DtPolicy {
        if self.adaptive {
            DtPolicy::Adaptive {
                dt0: self.dt0,
                c_adapt: self.c_adapt,
            }
        } else {
            DtPolicy::Fixed(self.dt0)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScheduleConfig {
    pub kind: ScheduleKind,
    pub epsilon: f64,
    pub c_side: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Simulation grid; for `analyze`, the grid of the reference ground state.
    pub grid: Grid2D,
    pub params: OperatorParams,
    pub ground_state: GroundStateConfig,
    pub initial: Option<InitialCondition>,
    pub stepper: StepperConfig,
    pub t_end: f64,
    pub sample_interval: f64,
    /// Write a snapshot every this many samples; 0 disables snapshots.
    pub snapshot_every: usize,
    pub schedule: ScheduleConfig,
    pub input_dir: Option<PathBuf>,
    pub t_star: Option<f64>,
    pub c_opt: Option<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

const COMMON: &[&str] = &["mode", "n", "box_length", "nu", "gamma", "zero_mode", "output_dir"];
const GROUND_STATE: &[&str] = &["tol", "max_iter", "initial_amplitude"];
const EVOLVE: &[&str] = &[
    "initial",
    "amplitude",
    "width1",
    "width2",
    "t0",
    "snapshot_path",
    "t_end",
    "sample_interval",
    "dt0",
    "adaptive",
    "c_adapt",
    "dealias",
    "snapshot_every",
];
const ANALYZE: &[&str] = &[
    "input_dir",
    "schedule",
    "epsilon",
    "c_side",
    "eta",
    "t_star",
    "c_opt",
];
const VERIFY: &[&str] = &["seed"];

fn allowed(mode: Mode) -> Vec<&'static str> {
    let mut keys = COMMON.to_vec();
    match mode {
        Mode::GroundState => keys.extend(GROUND_STATE),
        Mode::Evolve => {
            keys.extend(GROUND_STATE);
            keys.extend(EVOLVE);
        }
        Mode::Analyze => {
            keys.extend(GROUND_STATE);
            keys.extend(ANALYZE);
        }
        Mode::Verify => keys.extend(VERIFY),
    }
    keys
}

fn known(key: &str) -> bool {
    [COMMON, GROUND_STATE, EVOLVE, ANALYZE, VERIFY]
        .iter()
        .any(|set| set.contains(&key))
}

struct Entries {
    map: BTreeMap<String, (usize, String)>,
    /// Line reported for missing keys: one past the last line.
    end_line: usize,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Config {
        line,
        msg: msg.into(),
    }
}

impl Entries {
    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.map.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn line(&self, key: &str) -> usize {
        self.map.get(key).map_or(self.end_line, |(l, _)| *l)
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<Option<(usize, T)>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse::<T>()
                .map(|x| Some((line, x)))
                .map_err(|_| err(line, format!("cannot parse `{v}` as the value of {key}"))),
        }
    }

    fn require<T: FromStr>(&self, key: &str, mode: Mode) -> Result<(usize, T)> {
        self.parse(key)?
            .ok_or_else(|| err(self.end_line, format!("missing required key `{key}` for mode {mode}")))
    }

    fn f64_checked(
        &self,
        key: &str,
        default: Option<f64>,
        mode: Mode,
        ok: impl Fn(f64) -> bool,
        what: &str,
    ) -> Result<f64> {
        let (line, v) = match (self.parse::<f64>(key)?, default) {
            (Some(found), _) => found,
            (None, Some(d)) => return Ok(d),
            (None, None) => self.require(key, mode)?,
        };
        if v.is_finite() && ok(v) {
            Ok(v)
        } else {
            Err(err(line, format!("{key} {what}, got {v}")))
        }
    }

    fn positive(&self, key: &str, default: Option<f64>, mode: Mode) -> Result<f64> {
        self.f64_checked(key, default, mode, |v| v > 0.0, "must be positive")
    }
}

fn tokenize(text: &str) -> Result<Entries> {
    let mut map = BTreeMap::new();
    let mut end_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        end_line = line + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(err(line, format!("expected `key = value`, got `{content}`")));
        };
        let (k, v) = (k.trim(), v.trim());
        if !known(k) {
            return Err(err(line, format!("unknown key `{k}`")));
        }
        if v.is_empty() {
            return Err(err(line, format!("empty value for {k}")));
        }
        if let Some((first, _)) = map.insert(k.to_string(), (line, v.to_string())) {
            return Err(err(line, format!("duplicate key `{k}` (first set on line {first})")));
        }
    }
    Ok(Entries { map, end_line })
}

/// Parses a config whose `mode` key is required.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_inner(text, None)
}

/// Parses a config for a subcommand; a `mode` key, if present, must agree.
pub fn parse_config_for(text: &str, mode: Mode) -> Result<RunConfig> {
    parse_config_inner(text, Some(mode))
}

fn parse_config_inner(text: &str, expected: Option<Mode>) -> Result<RunConfig> {
    let e = tokenize(text)?;
    let declared: Option<(usize, Mode)> = match e.raw("mode") {
        None => None,
        Some((line, v)) => Some((line, v.parse::<Mode>().map_err(|m| err(line, m))?)),
    };
    let mode = match (declared, expected) {
        (Some((line, m)), Some(x)) if m != x => {
            return Err(err(line, format!("config is for mode {m} but was run as {x}")));
        }
        (Some((_, m)), _) => m,
        (None, Some(x)) => x,
        (None, None) => return Err(err(e.end_line, "missing required key `mode`")),
    };

    let allowed = allowed(mode);
    for (k, (line, _)) in &e.map {
        if !allowed.contains(&k.as_str()) {
            return Err(err(*line, format!("key `{k}` does not apply to mode {mode}")));
        }
    }

    let grid_required = matches!(mode, Mode::GroundState | Mode::Evolve);
    // verify checks the sharp constant to 1e-6, which needs the reference grid
    let (n_default, l_default) = match mode {
        _ if grid_required => (None, None),
        Mode::Verify => (Some(512), Some(48.0)),
        _ => (Some(256), Some(40.0)),
    };
    let n = match (e.parse::<usize>("n")?, n_default) {
        (Some((_, n)), _) => n,
        (None, Some(d)) => d,
        (None, None) => e.require::<usize>("n", mode)?.1,
    };
    let box_length = e.positive("box_length", l_default, mode)?;
    let grid = Grid2D::new(n, box_length).map_err(|g| err(e.line("n"), g.to_string()))?;

    let nu = match e.parse::<i32>("nu") {
        Ok(Some((_, v))) => v,
        Ok(None) => 1,
        Err(_) => return Err(err(e.line("nu"), "nu must be ±1")),
    };
    if nu != 1 && nu != -1 {
        return Err(err(e.line("nu"), "nu must be ±1"));
    }
    let gamma_default = (mode == Mode::Verify).then_some(1.0);
    let gamma = match (e.parse::<f64>("gamma")?, gamma_default) {
        (Some((_, g)), _) => g,
        (None, Some(d)) => d,
        (None, None) => e.require::<f64>("gamma", mode)?.1,
    };
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(err(e.line("gamma"), "gamma must be positive"));
    }
    let zero_mode = match e.raw("zero_mode") {
        None | Some((_, "angular_mean")) => ZeroMode::AngularMean,
        Some((_, "zero")) => ZeroMode::Zero,
        Some((line, v)) => {
            return Err(err(line, format!("zero_mode must be `angular_mean` or `zero`, got `{v}`")))
        }
    };
    let params = OperatorParams::new(nu, gamma)?.with_zero_mode(zero_mode);

    let gs_default = GroundStateConfig::default();
    let ground_state = GroundStateConfig {
        tol: e.positive("tol", Some(gs_default.tol), mode)?,
        max_iter: e.parse::<usize>("max_iter")?.map_or(gs_default.max_iter, |(_, v)| v),
        initial_amplitude: e.positive("initial_amplitude", Some(gs_default.initial_amplitude), mode)?,
    };

    let initial = if mode == Mode::Evolve {
        Some(parse_initial(&e, mode)?)
    } else {
        None
    };

    let evolve = mode == Mode::Evolve;
    // may be negative when starting the pseudo-conformal solution at t0 < 0
    let t_end = if evolve {
        e.f64_checked("t_end", None, mode, |_| true, "must be finite")?
    } else {
        0.0
    };
    let sample_interval = if evolve {
        e.positive("sample_interval", None, mode)?
    } else {
        0.0
    };
    let dx = grid.dx();
    let stepper = StepperConfig {
        dt0: e.positive("dt0", Some(0.25 * dx * dx), mode)?,
        adaptive: parse_bool(&e, "adaptive", true)?,
        c_adapt: e.positive("c_adapt", Some(0.1), mode)?,
        dealias: parse_bool(&e, "dealias", false)?,
    };
    let snapshot_every = e.parse::<usize>("snapshot_every")?.map_or(1, |(_, v)| v);

    let kind = match e.raw("schedule") {
        None | Some((_, "parabolic")) => ScheduleKind::ParabolicMinusEps,
        Some((_, "conic")) => ScheduleKind::Conic,
        Some((line, v)) => {
            return Err(err(line, format!("schedule must be `parabolic` or `conic`, got `{v}`")))
        }
    };
    let schedule = ScheduleConfig {
        kind,
        epsilon: e.f64_checked("epsilon", Some(0.1), mode, |v| v > 0.0 && v < 0.5, "must lie in (0, 1/2)")?,
        c_side: e.positive("c_side", Some(10.0), mode)?,
        eta: e.positive("eta", Some(0.1), mode)?,
    };
    let input_dir = if mode == Mode::Analyze {
        Some(PathBuf::from(e.require::<String>("input_dir", mode)?.1))
    } else {
        None
    };
    let t_star = e.parse::<f64>("t_star")?.map(|(_, v)| v);
    let c_opt = match e.parse::<f64>("c_opt")? {
        Some((line, v)) if !(v > 0.0) => return Err(err(line, "c_opt must be positive")),
        other => other.map(|(_, v)| v),
    };
    let seed = e.parse::<u64>("seed")?.map_or(1, |(_, v)| v);
    let output_dir = e
        .raw("output_dir")
        .map_or_else(|| PathBuf::from("out"), |(_, v)| PathBuf::from(v));

    Ok(RunConfig {
        mode,
        grid,
        params,
        ground_state,
        initial,
        stepper,
        t_end,
        sample_interval,
        snapshot_every,
        schedule,
        input_dir,
        t_star,
        c_opt,
        seed,
        output_dir,
    })
}

fn parse_bool(e: &Entries, key: &str, default: bool) -> Result<bool> {
    match e.raw(key) {
        None => Ok(default),
        Some((_, "true")) => Ok(true),
        Some((_, "false")) => Ok(false),
        Some((line, v)) => Err(err(line, format!("{key} must be `true` or `false`, got `{v}`"))),
    }
}

fn parse_initial(e: &Entries, mode: Mode) -> Result<InitialCondition> {
    let (line, kind) = e.require::<String>("initial", mode)?;
    let ic = match kind.as_str() {
        "gaussian" => InitialCondition::Gaussian {
            amplitude: e.positive("amplitude", None, mode)?,
            width1: e.positive("width1", Some(1.0), mode)?,
            width2: e.positive("width2", Some(1.0), mode)?,
        },
        "negative_energy" => InitialCondition::NegativeEnergy,
        "standing_wave" => InitialCondition::StandingWave,
        "pc_blowup" => InitialCondition::PcBlowup {
            t0: e.f64_checked("t0", Some(-1.0), mode, |v| (-1.0..0.0).contains(&v), "must lie in [-1, 0)")?,
        },
        "snapshot" => InitialCondition::Snapshot {
            path: PathBuf::from(e.require::<String>("snapshot_path", mode)?.1),
        },
        other => {
            return Err(err(
                line,
                format!("initial must be one of gaussian, negative_energy, standing_wave, pc_blowup, snapshot; got `{other}`"),
            ))
        }
    };
    let used: &[&str] = match ic {
        InitialCondition::Gaussian { .. } => &["amplitude", "width1", "width2"],
        InitialCondition::PcBlowup { .. } => &["t0"],
        InitialCondition::Snapshot { .. } => &["snapshot_path"],
        _ => &[],
    };
    for k in ["amplitude", "width1", "width2", "t0", "snapshot_path"] {
        if !used.contains(&k) && e.raw(k).is_some() {
            return Err(err(e.line(k), format!("key `{k}` does not apply to initial = {kind}")));
        }
    }
    Ok(ic)
}
