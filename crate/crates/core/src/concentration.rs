//! Windowed-mass functionals and the rescaled-snapshot diagnostics used to
//! measure mass concentration near blow-up.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{
    energy, fft, gradient_norm_sq, quartic_term, Field, Grid2D, OperatorParams, Space,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WindowShape {
    /// Disk of the given radius.
    Disk,
    /// Axis-aligned square of the given side length.
    Square,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowSpec {
    pub shape: WindowShape,
    pub size: f64,
}

impl WindowSpec {
    pub fn disk(radius: f64) -> Self {
        Self {
            shape: WindowShape::Disk,
            size: radius,
        }
    }

    pub fn square(side: f64) -> Self {
        Self {
            shape: WindowShape::Square,
            size: side,
        }
    }

    /// A cell belongs to the window iff its centre does.
    fn contains(&self, d1: f64, d2: f64) -> bool {
        match self.shape {
            WindowShape::Disk => d1 * d1 + d2 * d2 <= self.size * self.size,
            WindowShape::Square => {
                let h = 0.5 * self.size;
                d1.abs() <= h && d2.abs() <= h
            }
        }
    }

    /// True when the window reaches half a period in some direction.
    fn exceeds(&self, grid: &Grid2D) -> bool {
        let l = grid.box_length();
        match self.shape {
            WindowShape::Disk => 2.0 * self.size >= l,
            WindowShape::Square => self.size >= l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowedMass {
    pub best_mass: f64,
    /// Grid index `(i, j)` of the maximizing centre.
    pub best_index: (usize, usize),
    pub best_center: [f64; 2],
    /// The window did not fit in the box; `best_mass` is the total mass.
    pub clamped: bool,
}

fn window_kernel(grid: &Grid2D, w: &WindowSpec) -> Vec<Complex64> {
    let n = grid.n();
    let dx = grid.dx();
    let mut k = vec![Complex64::new(0.0, 0.0); grid.len()];
    for a in 0..n {
        let d1 = grid.mode(a) as f64 * dx;
        for b in 0..n {
            let d2 = grid.mode(b) as f64 * dx;
            if w.contains(d1, d2) {
                k[a * n + b] = Complex64::new(1.0, 0.0);
            }
        }
    }
    k
}

/// `max_y int_{window(y)} |u|^2` over grid centres `y`, by periodic
/// convolution of `|u|^2` with the window indicator. Ties go to the
/// lexicographically smallest index.
pub fn windowed_mass_sup(u: &Field, w: &WindowSpec) -> Result<WindowedMass> {
    let grid = *u.grid();
    if !(w.size > grid.dx()) {
        return Err(Error::Usage(format!(
            "window size {} must exceed the cell size {}",
            w.size,
            grid.dx()
        )));
    }
    if w.exceeds(&grid) {
        let o = grid.origin_index();
        return Ok(WindowedMass {
            best_mass: crate::spectral::mass(u),
            best_index: (o, o),
            best_center: [0.0, 0.0],
            clamped: true,
        });
    }
    let n = grid.n();
    let density = u.density();
    let mut kernel = window_kernel(&grid, w);
    let mut dens = density.into_values();
    fft::forward(&mut dens, n);
    fft::forward(&mut kernel, n);
    for (a, b) in dens.iter_mut().zip(&kernel) {
        *a *= b;
    }
    fft::inverse(&mut dens, n);
    let area = grid.cell_area();
    let (mut best, mut idx) = (f64::NEG_INFINITY, 0);
    for (k, v) in dens.iter().enumerate() {
        if v.re > best {
            best = v.re;
            idx = k;
        }
    }
    let (i, j) = (idx / n, idx % n);
    Ok(WindowedMass {
        best_mass: best * area,
        best_index: (i, j),
        best_center: [grid.coord(i), grid.coord(j)],
        clamped: false,
    })
}

/// `v(x) = rho u(rho x)` with `rho = 1/||grad u||_2`, sampled on the grid
/// scaled by `1/rho` so that every sample maps onto a sample of `u`.
#[derive(Clone, Debug)]
pub struct Rescaled {
    pub v: Field,
    pub rho: f64,
}

pub fn rescaled_snapshot(u: &Field) -> Result<Rescaled> {
    let g = gradient_norm_sq(u);
    if !(g > 0.0) {
        return Err(Error::Domain("rescaling needs a nonzero gradient".into()));
    }
    let rho = 1.0 / g.sqrt();
    let grid = u.grid().scaled(1.0 / rho)?;
    let values = u
        .to_physical()
        .values()
        .iter()
        .map(|v| v * rho)
        .collect();
    Ok(Rescaled {
        v: Field::from_values(grid, values, Space::Physical)?,
        rho,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScheduleKind {
    /// `lambda = (T* - t)^(1/2 - eps)`.
    ParabolicMinusEps,
    /// `lambda = (T* - t)^(1 - eps)`.
    Conic,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSchedule {
    pub kind: ScheduleKind,
    pub epsilon: f64,
    pub t_star: f64,
}

impl LambdaSchedule {
    pub fn new(kind: ScheduleKind, epsilon: f64, t_star: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(Error::Usage(format!("epsilon must lie in (0, 1/2), got {epsilon}")));
        }
        Ok(Self {
            kind,
            epsilon,
            t_star,
        })
    }

    pub fn exponent(&self) -> f64 {
        match self.kind {
            ScheduleKind::ParabolicMinusEps => 0.5 - self.epsilon,
            ScheduleKind::Conic => 1.0 - self.epsilon,
        }
    }

    /// `None` once `t >= t_star`.
    pub fn radius(&self, t: f64) -> Option<f64> {
        let gap = self.t_star - t;
        (gap > 0.0).then(|| gap.powf(self.exponent()))
    }

    pub fn with_t_star(mut self, t_star: f64) -> Self {
        self.t_star = t_star;
        self
    }
}

/// One snapshot of a trajectory.
#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub u: Field,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcentrationRecord {
    pub t: f64,
    pub window: WindowSpec,
    pub best_mass: f64,
    pub best_center: [f64; 2],
    pub rho: f64,
    pub rescaled_quartic: f64,
    pub rescaled_energy: f64,
    pub gradient_norm_sq: f64,
    pub clamped: bool,
}

impl ConcentrationRecord {
    pub const CSV_HEADER: &'static str =
        "t,lambda,best_mass,yx,yy,rho,rescaled_energy,rescaled_quartic";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            self.t,
            self.window.size,
            self.best_mass,
            self.best_center[0],
            self.best_center[1],
            self.rho,
            self.rescaled_energy,
            self.rescaled_quartic
        )
    }
}

/// Terminal segment: contiguous tail over which `key >= key_last / 10`.
fn terminal_start(keys: &[f64]) -> usize {
    let Some(last) = keys.last() else { return 0 };
    let threshold = last / 10.0;
    keys.iter().rposition(|k| *k < threshold).map_or(0, |i| i + 1)
}

fn parallel_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync,
{
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    let chunk = items.len().div_ceil(workers).max(1);
    std::thread::scope(|s| {
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("analysis worker panicked"))
            .collect()
    })
}

fn analyze_snapshot(
    snap: &Snapshot,
    window: WindowSpec,
    p: &OperatorParams,
) -> Result<ConcentrationRecord> {
    let wm = windowed_mass_sup(&snap.u, &window)?;
    let resc = rescaled_snapshot(&snap.u)?;
    let g = gradient_norm_sq(&snap.u);
    Ok(ConcentrationRecord {
        t: snap.t,
        window,
        best_mass: wm.best_mass,
        best_center: wm.best_center,
        rho: resc.rho,
        rescaled_quartic: quartic_term(&resc.v, p),
        rescaled_energy: energy(&resc.v, p),
        gradient_norm_sq: g,
        clamped: wm.clamped,
    })
}

#[derive(Clone, Debug)]
pub struct Theorem6Summary {
    pub critical_mass: f64,
    /// `min best_mass` over the terminal decade of gradient growth.
    pub terminal_min_mass: f64,
    pub terminal_ratio: f64,
    pub terminal_start_t: f64,
    /// `best_mass / critical_mass` at the last resolved snapshot.
    pub final_ratio: f64,
    /// `lambda(t) ||grad u(t)||_2` per record.
    pub lambda_grad: Vec<f64>,
    pub lambda_grad_increasing: bool,
    /// Terminal ratio with `t_star` moved by -2% and +2% of `t_star - t_first`.
    pub sensitivity: [f64; 2],
    /// Snapshot times skipped because the schedule was not positive there.
    pub skipped: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct Theorem6Trace {
    pub records: Vec<ConcentrationRecord>,
    pub summary: Theorem6Summary,
}

fn theorem6_records(
    snapshots: &[Snapshot],
    schedule: &LambdaSchedule,
    p: &OperatorParams,
) -> Result<(Vec<ConcentrationRecord>, Vec<f64>)> {
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for s in snapshots {
        match schedule.radius(s.t) {
            Some(r) if r > s.u.grid().dx() => jobs.push((s, WindowSpec::disk(r))),
            _ => skipped.push(s.t),
        }
    }
    let records = parallel_map(&jobs, |(s, w)| analyze_snapshot(s, *w, p))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok((records, skipped))
}

fn terminal_min(records: &[ConcentrationRecord]) -> (f64, f64) {
    let keys: Vec<f64> = records.iter().map(|r| r.gradient_norm_sq).collect();
    let start = terminal_start(&keys);
    let seg = &records[start.min(records.len())..];
    let min = seg.iter().map(|r| r.best_mass).fold(f64::INFINITY, f64::min);
    (min, seg.first().map_or(f64::NAN, |r| r.t))
}

/// Disk windows of radius `lambda(t)` around the best centre; the liminf of
/// the windowed mass is replaced by its minimum over the terminal decade of
/// gradient growth.
pub fn theorem6_trace(
    snapshots: &[Snapshot],
    schedule: &LambdaSchedule,
    c_opt: f64,
    p: &OperatorParams,
) -> Result<Theorem6Trace> {
    let (records, skipped) = theorem6_records(snapshots, schedule, p)?;
    if records.is_empty() {
        return Err(Error::Insufficient("no snapshot inside the schedule's support".into()));
    }
    let critical = 2.0 / c_opt;
    let (terminal_min_mass, terminal_start_t) = terminal_min(&records);

    let lambda_grad: Vec<f64> = records
        .iter()
        .map(|r| r.window.size * r.gradient_norm_sq.sqrt())
        .collect();
    let keys: Vec<f64> = records.iter().map(|r| r.gradient_norm_sq).collect();
    let tail = &lambda_grad[terminal_start(&keys)..];
    let lambda_grad_increasing = tail.windows(2).all(|w| w[1] >= w[0]);

    let span = schedule.t_star - snapshots.first().map_or(schedule.t_star, |s| s.t);
    let terminal: Vec<&Snapshot> = snapshots
        .iter()
        .filter(|s| s.t >= terminal_start_t)
        .collect();
    let mut sensitivity = [f64::NAN; 2];
    for (slot, sign) in sensitivity.iter_mut().zip([-1.0, 1.0]) {
        let shifted = schedule.with_t_star(schedule.t_star + sign * 0.02 * span);
        let masses = parallel_map(&terminal, |s| match shifted.radius(s.t) {
            Some(r) if r > s.u.grid().dx() => {
                windowed_mass_sup(&s.u, &WindowSpec::disk(r)).map(|w| Some(w.best_mass))
            }
            _ => Ok(None),
        });
        let mut min = f64::INFINITY;
        for m in masses {
            if let Some(m) = m? {
                min = min.min(m);
            }
        }
        if min.is_finite() {
            *slot = min / critical;
        }
    }

    Ok(Theorem6Trace {
        summary: Theorem6Summary {
            critical_mass: critical,
            terminal_min_mass,
            terminal_ratio: terminal_min_mass / critical,
            terminal_start_t,
            final_ratio: records.last().map_or(f64::NAN, |r| r.best_mass) / critical,
            lambda_grad,
            lambda_grad_increasing,
            sensitivity,
            skipped,
        },
        records,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SquareRecord {
    pub t: f64,
    pub side: f64,
    pub best_mass: f64,
    pub best_center: [f64; 2],
    /// `sqrt(best_mass)`, the L2 norm over the best square.
    pub l2: f64,
}

#[derive(Clone, Debug)]
pub struct Theorem7Trace {
    pub records: Vec<SquareRecord>,
    /// Max of `sqrt(best_mass)` over the terminal decade of `t_star - t`.
    pub terminal_max: f64,
    /// Min of `sqrt(best_mass)` over the same segment.
    pub terminal_min: f64,
    pub eta: f64,
    pub above_eta: bool,
    pub skipped: Vec<f64>,
}

/// Square windows of side `c_side * sqrt(t_star - t)`; the terminal segment
/// is the last decade of `t_star - t`.
pub fn theorem7_trace(
    snapshots: &[Snapshot],
    c_side: f64,
    t_star: f64,
    eta: f64,
) -> Result<Theorem7Trace> {
    if !(c_side > 0.0) {
        return Err(Error::Usage("C_side must be positive".into()));
    }
    let mut skipped = Vec::new();
    let mut jobs = Vec::new();
    for s in snapshots {
        let gap = t_star - s.t;
        if gap > 0.0 {
            jobs.push((s, WindowSpec::square(c_side * gap.sqrt())));
        } else {
            skipped.push(s.t);
        }
    }
    let results = parallel_map(&jobs, |(s, w)| {
        windowed_mass_sup(&s.u, w).map(|wm| SquareRecord {
            t: s.t,
            side: w.size,
            best_mass: wm.best_mass,
            best_center: wm.best_center,
            l2: wm.best_mass.max(0.0).sqrt(),
        })
    });
    let records = results.into_iter().collect::<Result<Vec<_>>>()?;
    if records.is_empty() {
        return Err(Error::Insufficient("no snapshot before t_star".into()));
    }
    let inverse_gaps: Vec<f64> = records.iter().map(|r| 1.0 / (t_star - r.t)).collect();
    let seg = &records[terminal_start(&inverse_gaps)..];
    let terminal_max = seg.iter().map(|r| r.l2).fold(0.0, f64::max);
    let terminal_min = seg.iter().map(|r| r.l2).fold(f64::INFINITY, f64::min);
    Ok(Theorem7Trace {
        records,
        terminal_max,
        terminal_min,
        eta,
        above_eta: terminal_max > eta,
        skipped,
    })
}
