//! Subcommand drivers behind the `dsbu` binary.
//!
//! Every output file is a pure function of the config, so reruns are
//! byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::concentration::{theorem6_trace, theorem7_trace, LambdaSchedule, Snapshot};
use crate::error::{Error, Result};
use crate::evolution::{
    estimate_t_star, max_relative_drift, negative_energy_gaussian, run_with, EvolveConfig,
    SimulationState,
};
use crate::exact::eval_pc_blowup;
use crate::ground_state::{solve_ground_state, GroundStateResult};
use crate::io::config::{InitialCondition, Mode, RunConfig};
use crate::io::snapshot::{read_snapshot, write_snapshot, SnapshotMeta};
use crate::io::{csv_text, read_records_csv, write_atomic, write_records_csv};
use crate::spectral::{energy, gradient_norm_sq, mass, Field};
use crate::verify::{oracle_table, TABLE_HEADER};

pub const SNAPSHOT_DIR: &str = "snapshots";
pub const RECORDS_FILE: &str = "records.csv";

/// Runs the mode of `cfg`, writing into `out_dir` and reporting on `stdout`.
pub fn execute(cfg: &RunConfig, out_dir: &Path, stdout: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    let report = match cfg.mode {
        Mode::GroundState => ground_state(cfg, out_dir)?,
        Mode::Evolve => evolve(cfg, out_dir)?,
        Mode::Analyze => analyze(cfg, out_dir)?,
        Mode::Verify => verify(cfg)?,
    };
    stdout.write_all(report.as_bytes())?;
    Ok(())
}

fn meta(t: f64, cfg: &RunConfig) -> SnapshotMeta {
    SnapshotMeta {
        t,
        nu: cfg.params.nu_sign(),
        gamma: cfg.params.gamma(),
    }
}

fn ground_state_summary(gs: &GroundStateResult) -> String {
    let g = gs.profile.grid();
    let min = gs
        .profile
        .values()
        .iter()
        .fold(f64::INFINITY, |m, v| m.min(v.re));
    let mut s = String::new();
    let _ = writeln!(s, "n = {}", g.n());
    let _ = writeln!(s, "box_length = {}", g.box_length());
    let _ = writeln!(s, "nu = {}", gs.params.nu_sign());
    let _ = writeln!(s, "gamma = {}", gs.params.gamma());
    let _ = writeln!(s, "iterations = {}", gs.iterations);
    let _ = writeln!(s, "residual = {:e}", gs.residual);
    let _ = writeln!(s, "c_opt = {:.15e}", gs.c_opt);
    let _ = writeln!(s, "sharpness_ratio = {:.15e}", gs.sharpness_ratio);
    let _ = writeln!(s, "mass = {:.15e}", gs.mass());
    let _ = writeln!(s, "critical_mass = {:.15e}", gs.critical_mass());
    let _ = writeln!(s, "energy = {:e}", energy(&gs.profile, &gs.params));
    let _ = writeln!(s, "gradient_norm_sq = {:.15e}", gradient_norm_sq(&gs.profile));
    let _ = writeln!(s, "min_value = {:e}", min);
    s
}

fn ground_state(cfg: &RunConfig, out: &Path) -> Result<String> {
    let gs = solve_ground_state(cfg.grid, &cfg.params, &cfg.ground_state)?;
    write_snapshot(&out.join("ground_state.dsbu"), &gs.profile, &meta(0.0, cfg))?;
    let history = csv_text(
        "iteration,residual",
        gs.history.iter().enumerate().map(|(i, r)| format!("{},{:e}", i + 1, r)),
    );
    write_atomic(&out.join("ground_state_history.csv"), history.as_bytes())?;
    let summary = ground_state_summary(&gs);
    write_atomic(&out.join("ground_state.txt"), summary.as_bytes())?;
    Ok(summary)
}

fn initial_state(cfg: &RunConfig) -> Result<SimulationState> {
    let grid = cfg.grid;
    let p = cfg.params;
    let ic = cfg
        .initial
        .as_ref()
        .ok_or_else(|| Error::Usage("evolve needs an initial condition".into()))?;
    Ok(match ic {
        InitialCondition::Gaussian {
            amplitude,
            width1,
            width2,
        } => SimulationState::new(Field::gaussian(grid, *amplitude, *width1, *width2), p),
        InitialCondition::NegativeEnergy => {
            SimulationState::new(negative_energy_gaussian(grid, &p)?.field, p)
        }
        InitialCondition::StandingWave => {
            let gs = solve_ground_state(grid, &p, &cfg.ground_state)?;
            SimulationState::new(gs.profile, p)
        }
        InitialCondition::PcBlowup { t0 } => {
            let profile_grid = grid.scaled(1.0 / t0.abs())?;
            let gs = solve_ground_state(profile_grid, &p, &cfg.ground_state)?;
            let u = eval_pc_blowup(&gs.profile, *t0, grid)?;
            SimulationState::at_time(u, p, *t0)
        }
        InitialCondition::Snapshot { path } => {
            let (u, m) = read_snapshot(path)?;
            if !u.grid().same_as(&grid) {
                return Err(Error::Usage(format!(
                    "snapshot {} has grid n = {}, L = {}; the config asks for n = {}, L = {}",
                    path.display(),
                    u.grid().n(),
                    u.grid().box_length(),
                    grid.n(),
                    grid.box_length()
                )));
            }
            SimulationState::at_time(u, p, m.t)
        }
    })
}

fn snapshot_name(k: usize) -> String {
    format!("snap_{k:06}.dsbu")
}

fn evolve(cfg: &RunConfig, out: &Path) -> Result<String> {
    let s0 = initial_state(cfg)?;
    let e0 = energy(&s0.u, &s0.params);
    let mut ecfg = EvolveConfig::new(cfg.grid.dx(), cfg.t_end, cfg.sample_interval)
        .with_dt(cfg.stepper.policy());
    ecfg.dealias = cfg.stepper.dealias;

    let snap_dir = out.join(SNAPSHOT_DIR);
    if cfg.snapshot_every > 0 {
        fs::create_dir_all(&snap_dir)?;
    }
    let mut k = 0usize;
    let output = run_with(s0, &ecfg, |s, _| {
        if cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0 {
            write_snapshot(&snap_dir.join(snapshot_name(k)), &s.u, &meta(s.t, cfg))?;
        }
        k += 1;
        Ok(())
    })?;
    // the terminal state is always kept, whatever the cadence
    if cfg.snapshot_every > 0 && (k - 1) % cfg.snapshot_every != 0 {
        write_snapshot(&snap_dir.join(snapshot_name(k - 1)), &output.state.u, &meta(output.state.t, cfg))?;
    }
    write_records_csv(&out.join(RECORDS_FILE), &output.records)?;

    let mut s = String::new();
    let _ = writeln!(s, "stop = {:?}", output.stop);
    let _ = writeln!(s, "steps = {}", output.state.step_index);
    let _ = writeln!(s, "t_final = {:e}", output.state.t);
    let _ = writeln!(s, "initial_energy = {:e}", e0);
    let _ = writeln!(s, "mass_drift = {:e}", max_relative_drift(&output.records, |r| r.mass));
    let _ = writeln!(s, "energy_drift = {:e}", max_relative_drift(&output.records, |r| r.energy));
    let _ = writeln!(s, "records = {}", output.records.len());
    if let Some(est) = &output.estimate {
        let _ = writeln!(s, "t_star = {:.12e}", est.t_star_estimate);
        let _ = writeln!(s, "t_star_method = {}", est.method.tag());
        let _ = writeln!(s, "fit_window = {:e},{:e}", est.fit_window[0], est.fit_window[1]);
        let _ = writeln!(s, "fit_residual = {:e}", est.fit_residual);
        let _ = writeln!(s, "fit_exponent = {:e}", est.exponent);
    } else if output.stop.is_blowup() {
        let _ = writeln!(s, "t_star = unavailable (terminal regime too short to fit)");
    }
    write_atomic(&out.join("summary.txt"), s.as_bytes())?;
    Ok(s)
}

fn load_snapshots(dir: &Path) -> Result<Vec<(PathBuf, Snapshot, SnapshotMeta)>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dsbu"))
        .collect();
    paths.sort();
    let mut out = Vec::with_capacity(paths.len());
    for p in paths {
        let (u, m) = read_snapshot(&p)?;
        out.push((p, Snapshot { t: m.t, u }, m));
    }
    out.sort_by(|a, b| a.1.t.total_cmp(&b.1.t));
    Ok(out)
}

fn analyze(cfg: &RunConfig, out: &Path) -> Result<String> {
    let input = cfg
        .input_dir
        .as_ref()
        .ok_or_else(|| Error::Usage("analyze needs input_dir".into()))?;
    let loaded = load_snapshots(&input.join(SNAPSHOT_DIR))?;
    if loaded.is_empty() {
        return Err(Error::Insufficient(format!("no snapshots under {}", input.display())));
    }
    for (path, _, m) in &loaded {
        if m.nu != cfg.params.nu_sign() || m.gamma != cfg.params.gamma() {
            return Err(Error::Usage(format!(
                "{} was written with nu = {}, gamma = {}; the config says nu = {}, gamma = {}",
                path.display(),
                m.nu,
                m.gamma,
                cfg.params.nu_sign(),
                cfg.params.gamma()
            )));
        }
    }
    let snapshots: Vec<Snapshot> = loaded.into_iter().map(|(_, s, _)| s).collect();

    let t_star = match cfg.t_star {
        Some(t) => t,
        None => estimate_t_star(&read_records_csv(&input.join(RECORDS_FILE))?)?.t_star_estimate,
    };
    let c_opt = match cfg.c_opt {
        Some(c) => c,
        None => solve_ground_state(cfg.grid, &cfg.params, &cfg.ground_state)?.c_opt,
    };
    let sc = cfg.schedule;
    let schedule = LambdaSchedule::new(sc.kind, sc.epsilon, t_star)?;
    let t6 = theorem6_trace(&snapshots, &schedule, c_opt, &cfg.params)?;
    let t7 = theorem7_trace(&snapshots, sc.c_side, t_star, sc.eta)?;

    let rows = csv_text(
        crate::concentration::ConcentrationRecord::CSV_HEADER,
        t6.records.iter().map(|r| r.to_csv_row()),
    );
    write_atomic(&out.join("theorem6.csv"), rows.as_bytes())?;
    let rows = csv_text(
        "t,side,best_mass,yx,yy,l2",
        t7.records.iter().map(|r| {
            format!(
                "{:e},{:e},{:e},{:e},{:e},{:e}",
                r.t, r.side, r.best_mass, r.best_center[0], r.best_center[1], r.l2
            )
        }),
    );
    write_atomic(&out.join("theorem7.csv"), rows.as_bytes())?;

    let sm = &t6.summary;
    let mut s = String::new();
    let _ = writeln!(s, "snapshots = {}", snapshots.len());
    let _ = writeln!(s, "t_star = {:.12e}", t_star);
    let _ = writeln!(s, "c_opt = {:.12e}", c_opt);
    let _ = writeln!(s, "critical_mass = {:.12e}", sm.critical_mass);
    let _ = writeln!(s, "lambda_exponent = {}", schedule.exponent());
    let _ = writeln!(s, "terminal_start_t = {:e}", sm.terminal_start_t);
    let _ = writeln!(s, "terminal_min_mass = {:e}", sm.terminal_min_mass);
    let _ = writeln!(s, "terminal_ratio = {:.6}", sm.terminal_ratio);
    let _ = writeln!(s, "final_ratio = {:.6}", sm.final_ratio);
    let _ = writeln!(s, "terminal_ratio_t_star_minus_2pct = {:.6}", sm.sensitivity[0]);
    let _ = writeln!(s, "terminal_ratio_t_star_plus_2pct = {:.6}", sm.sensitivity[1]);
    let _ = writeln!(s, "lambda_grad_increasing = {}", sm.lambda_grad_increasing);
    let _ = writeln!(s, "skipped_theorem6 = {}", sm.skipped.len());
    let _ = writeln!(s, "square_c_side = {}", sc.c_side);
    let _ = writeln!(s, "square_terminal_max_l2 = {:e}", t7.terminal_max);
    let _ = writeln!(s, "square_terminal_min_l2 = {:e}", t7.terminal_min);
    let _ = writeln!(s, "eta = {}", t7.eta);
    let _ = writeln!(s, "above_eta = {}", t7.above_eta);
    let _ = writeln!(s, "skipped_theorem7 = {}", t7.skipped.len());
    if let Some(last) = t6.records.last() {
        let _ = writeln!(s, "final_rescaled_energy = {:e}", last.rescaled_energy);
        let _ = writeln!(s, "final_rescaled_quartic = {:e}", last.rescaled_quartic);
    }
    let _ = writeln!(s, "final_mass = {:e}", mass(&snapshots[snapshots.len() - 1].u));
    write_atomic(&out.join("analysis.txt"), s.as_bytes())?;
    Ok(s)
}

fn verify(cfg: &RunConfig) -> Result<String> {
    let rows = oracle_table(cfg.seed, cfg.grid)?;
    let mut s = String::new();
    let _ = writeln!(s, "{TABLE_HEADER}");
    for r in &rows {
        let _ = writeln!(s, "{r}");
    }
    let failed = rows.iter().filter(|r| !r.passed()).count();
    let _ = writeln!(s, "{} checks, {} failed", rows.len(), failed);
    if failed > 0 {
        return Err(Error::Domain(format!("{failed} oracle checks failed\n{s}")));
    }
    Ok(s)
}
