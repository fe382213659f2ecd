//! Extrapolation of the blow-up time from the gradient trace.
//!
//! The rate bound `||grad u(t)||_2 >= C / sqrt(T* - t)` suggests the model
//! `1/||grad u||^2 = a (T* - t)`. Solutions that blow up faster (the
//! pseudo-conformal one has `||grad u|| ~ 1/|t|`) follow `a (T* - t)^p` with
//! `p > 1`, so both models are fitted and the one with the smaller relative
//! residual wins.

use super::ConservationRecord;
use crate::error::{Error, Result};

/// Minimum number of records in the fit window.
pub const MIN_FIT_RECORDS: usize = 8;
/// The linear model is kept outright when it fits to this relative misfit.
const LINEAR_EXACT: f64 = 1e-8;
/// Required growth of `||grad u||^2` over the run.
pub const MIN_GROWTH: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FitMethod {
    /// `1/||grad u||^2 = a (T* - t)`.
    InverseGradientLinear,
    /// `1/||grad u||^2 = a (T* - t)^p`, `p` fitted.
    PowerLaw,
}

impl FitMethod {
    pub fn tag(self) -> &'static str {
        match self {
            FitMethod::InverseGradientLinear => "inverse-gradient-linear",
            FitMethod::PowerLaw => "power-law",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BlowupEstimate {
    pub t_star_estimate: f64,
    pub method: FitMethod,
    pub fit_window: [f64; 2],
    /// RMS relative misfit of `1/||grad u||^2` over the window.
    pub fit_residual: f64,
    /// Fitted exponent (1 for the linear model).
    pub exponent: f64,
}

struct Fit {
    t_star: f64,
    exponent: f64,
    residual: f64,
}

fn linear_fit(t: &[f64], y: &[f64]) -> Option<Fit> {
    let n = t.len() as f64;
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for (a, b) in t.iter().zip(y) {
        stt += (a - tm) * (a - tm);
        sty += (a - tm) * (b - ym);
    }
    let slope = sty / stt;
    if !(slope < 0.0) {
        return None;
    }
    let intercept = ym - slope * tm;
    let t_star = -intercept / slope;
    Some(Fit {
        t_star,
        exponent: 1.0,
        residual: relative_misfit(t, y, |s| intercept + slope * s),
    })
}

fn relative_misfit(t: &[f64], y: &[f64], model: impl Fn(f64) -> f64) -> f64 {
    let s: f64 = t
        .iter()
        .zip(y)
        .map(|(a, b)| ((model(*a) - b) / b).powi(2))
        .sum();
    (s / t.len() as f64).sqrt()
}

/// For fixed `t_star`, log-linear regression of `ln y` on `ln(t_star - t)`.
fn power_law_at(t: &[f64], ly: &[f64], t_star: f64) -> (f64, f64, f64) {
    let n = t.len() as f64;
    let lx: Vec<f64> = t.iter().map(|a| (t_star - a).ln()).collect();
    let xm = lx.iter().sum::<f64>() / n;
    let ym = ly.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (a, b) in lx.iter().zip(ly) {
        sxx += (a - xm) * (a - xm);
        sxy += (a - xm) * (b - ym);
    }
    let p = sxy / sxx;
    let c = ym - p * xm;
    let rss: f64 = lx.iter().zip(ly).map(|(a, b)| (c + p * a - b).powi(2)).sum();
    (rss, p, c)
}

fn power_law_fit(t: &[f64], y: &[f64]) -> Option<Fit> {
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let t_b = *t.last()?;
    let width = t_b - t[0];
    // scan the offset s = T* - t_b on a log grid, then refine by golden section
    let lo = (width * 1e-6).ln();
    let hi = (width * 1e2).ln();
    let steps = 400;
    let obj = |ls: f64| power_law_at(t, &ly, t_b + ls.exp()).0;
    let mut best = (f64::INFINITY, lo);
    for k in 0..=steps {
        let ls = lo + (hi - lo) * k as f64 / steps as f64;
        let v = obj(ls);
        if v < best.0 {
            best = (v, ls);
        }
    }
    let h = (hi - lo) / steps as f64;
    let (mut a, mut b) = (best.1 - h, best.1 + h);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (obj(c), obj(d));
    for _ in 0..200 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = obj(d);
        }
        if (b - a).abs() < 1e-14 {
            break;
        }
    }
    let ls = 0.5 * (a + b);
    let t_star = t_b + ls.exp();
    let (_, p, c0) = power_law_at(t, &ly, t_star);
    if !(p.is_finite() && p > 0.0) {
        return None;
    }
    Some(Fit {
        t_star,
        exponent: p,
        residual: relative_misfit(t, y, |s| (c0 + p * (t_star - s).ln()).exp()),
    })
}

/// Fits the terminal decade of gradient growth: the contiguous tail of the
/// records over which `||grad u||^2 >= max / 10`.
pub fn estimate_t_star(records: &[ConservationRecord]) -> Result<BlowupEstimate> {
    let recs: Vec<&ConservationRecord> = records
        .iter()
        .filter(|r| r.gradient_norm_sq.is_finite() && r.gradient_norm_sq > 0.0)
        .collect();
    let (Some(first), Some(last)) = (recs.first(), recs.last()) else {
        return Err(Error::NoBlowup("no records".into()));
    };
    let g0 = first.gradient_norm_sq;
    let g_last = last.gradient_norm_sq;
    let g_max = recs.iter().map(|r| r.gradient_norm_sq).fold(0.0, f64::max);
    if g_max < MIN_GROWTH * g0 || g_last < 0.5 * g_max {
        return Err(Error::NoBlowup(format!(
            "gradient norm grew by {:.2}x (need {MIN_GROWTH}x and growth at the end of the run)",
            g_max / g0
        )));
    }
    let threshold = g_last / MIN_GROWTH;
    let start = recs
        .iter()
        .rposition(|r| r.gradient_norm_sq < threshold)
        .map_or(0, |i| i + 1);
    let window = &recs[start..];
    if window.len() < MIN_FIT_RECORDS {
        return Err(Error::Insufficient(format!(
            "{} records in the terminal regime, need {MIN_FIT_RECORDS}",
            window.len()
        )));
    }
    let t: Vec<f64> = window.iter().map(|r| r.t).collect();
    let y: Vec<f64> = window.iter().map(|r| 1.0 / r.gradient_norm_sq).collect();
    let fit_window = [t[0], *t.last().unwrap()];

    let linear = linear_fit(&t, &y).filter(|f| f.t_star > fit_window[1]);
    let power = power_law_fit(&t, &y);
    let (fit, method) = match (linear, power) {
        (Some(l), Some(p)) if l.residual > LINEAR_EXACT && p.residual < 0.5 * l.residual => {
            (p, FitMethod::PowerLaw)
        }
        (Some(l), _) => (l, FitMethod::InverseGradientLinear),
        (None, Some(p)) => (p, FitMethod::PowerLaw),
        (None, None) => {
            return Err(Error::NoBlowup("no model fits the terminal gradient trace".into()))
        }
    };
    Ok(BlowupEstimate {
        t_star_estimate: fit.t_star,
        method,
        fit_window,
        fit_residual: fit.residual,
        exponent: fit.exponent,
    })
}
