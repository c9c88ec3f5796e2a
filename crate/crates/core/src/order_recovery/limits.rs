//! The two limit formulas for a single order:
//!
//!   α = lim_{t→0} t u'(x0,t) / (u(x0,t) − a(x0)),
//!   α = −lim_{t→∞} t u'(x0,t) / u(x0,t).
//!
//! Both limits are approached like α + c t^{±α}, which is what the window
//! fits extrapolate.

use crate::error::{domain, Error, Result};
use crate::forward::ObservationSeries;
use crate::optimize::{nelder_mead, NelderMeadOptions};

use super::{RecoveryReport, RecoveryStatus, WindowFit};

/// Decade-to-decade spread above which the short-time extrapolation is unstable.
pub(crate) const DECADE_SPREAD: f64 = 0.05;
/// |u − a| below this fraction of the data scale is treated as rounding noise.
const NOISE_FLOOR: f64 = 1e-13;
/// Samples with |u − a| below this fraction of the scale are too close to
/// a(x0) for a reliable ratio.
const USABLE_FLOOR: f64 = 1e-9;
const MIN_WINDOW: usize = 4;

fn sigmoid(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

fn logit(p: f64) -> f64 {
    let p = p.clamp(1e-3, 1.0 - 1e-3);
    (p / (1.0 - p)).ln()
}

/// d/dx of the Lagrange interpolant through (xs, ·) at xs[c], as weights.
fn lagrange_derivative_weights(xs: &[f64], c: usize) -> Vec<f64> {
    let x = xs[c];
    (0..xs.len())
        .map(|k| {
            if k == c {
                (0..xs.len())
                    .filter(|&m| m != c)
                    .map(|m| 1.0 / (x - xs[m]))
                    .sum()
            } else {
                let num: f64 = (0..xs.len())
                    .filter(|&m| m != k && m != c)
                    .map(|m| x - xs[m])
                    .product();
                let den: f64 = (0..xs.len())
                    .filter(|&m| m != k)
                    .map(|m| xs[k] - xs[m])
                    .product();
                num / den
            }
        })
        .collect()
}

/// Half-width of the difference stencil.
pub(crate) const STENCIL: usize = 2;

/// t·u'(t) = du/d(ln t) at samples STENCIL..len−STENCIL, from the
/// five-point interpolant in ln t (fourth order on any spacing).
pub(crate) fn log_derivative(t: &[f64], u: &[f64]) -> Vec<f64> {
    let s: Vec<f64> = t.iter().map(|x| x.ln()).collect();
    (STENCIL..t.len().saturating_sub(STENCIL))
        .map(|i| {
            let w = lagrange_derivative_weights(&s[i - STENCIL..=i + STENCIL], STENCIL);
            w.iter()
                .zip(&u[i - STENCIL..=i + STENCIL])
                .map(|(a, b)| a * b)
                .sum()
        })
        .collect()
}

/// Fits r ≈ α + c t^{sign·α} with α ∈ (0, 1): Nelder–Mead for the global
/// search, then Gauss–Newton to pin the stationary point to rounding level.
pub(crate) fn fit_window(t: &[f64], r: &[f64], sign: f64) -> Result<WindowFit> {
    let sse = |alpha: f64, c: f64| -> f64 {
        t.iter()
            .zip(r)
            .map(|(&ti, &ri)| {
                let e = ri - alpha - c * ti.powf(sign * alpha);
                e * e
            })
            .sum()
    };
    // start from the ratio nearest to the limit
    let r_near = if sign > 0.0 { r[0] } else { r[r.len() - 1] };
    let opts = NelderMeadOptions {
        step: 0.5,
        sd_tolerance: 1e-30,
        max_iters: 4000,
        restarts: 3,
    };
    let m = nelder_mead(
        &|p: &[f64]| sse(sigmoid(p[0]), p[1]),
        &[logit(r_near), 0.0],
        &opts,
    )?;
    let (mut alpha, mut c) = (sigmoid(m.x[0]), m.x[1]);
    let mut best = sse(alpha, c);
    for _ in 0..20 {
        // normal equations of the 2×2 linearized problem
        let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&ti, &ri) in t.iter().zip(r) {
            let p = ti.powf(sign * alpha);
            let e = ri - alpha - c * p;
            let j1 = 1.0 + c * p * sign * ti.ln();
            let j2 = p;
            a11 += j1 * j1;
            a12 += j1 * j2;
            a22 += j2 * j2;
            b1 += j1 * e;
            b2 += j2 * e;
        }
        let det = a11 * a22 - a12 * a12;
        if !(det.abs() > 0.0) {
            break;
        }
        let da = (a22 * b1 - a12 * b2) / det;
        let dc = (a11 * b2 - a12 * b1) / det;
        let (na, nc) = (alpha + da, c + dc);
        if !(na > 0.0 && na < 1.0) {
            break;
        }
        let v = sse(na, nc);
        if !(v <= best) {
            break;
        }
        let done = da.abs() <= 1e-15 * na && dc.abs() <= 1e-15 * nc.abs().max(1e-300);
        (alpha, c, best) = (na, nc, v);
        if done {
            break;
        }
    }
    Ok(WindowFit {
        t_lo: t[0],
        t_hi: t[t.len() - 1],
        alpha,
        c,
        residual: (best / t.len() as f64).sqrt(),
    })
}

fn decade_of(t: f64) -> i32 {
    (t.log10() + 1e-9).floor() as i32
}

/// Short-time limit, for data sampled on a grid refined toward t = 0 and
/// the initial value `a_x0 = a(x0)`.
pub fn recover_alpha_short_time(
    series: &ObservationSeries,
    a_x0: f64,
) -> Result<RecoveryReport<f64>> {
    let mut report = RecoveryReport::new("short-time");
    let (t, h) = series.positive_times();
    let scale = h.iter().fold(a_x0.abs(), |m, v| m.max(v.abs()));
    let dev: Vec<f64> = h.iter().map(|v| v - a_x0).collect();
    let max_dev = dev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 || max_dev <= NOISE_FLOOR * scale || t.len() <= 2 * STENCIL {
        return Err(Error::Degenerate(
            "observation never departs from the initial value".into(),
        ));
    }
    let d = log_derivative(&t, &h);
    let usable = USABLE_FLOOR * scale;
    let mut rows: Vec<(f64, f64)> = Vec::new();
    for i in STENCIL..t.len().saturating_sub(STENCIL) {
        if dev[i - STENCIL..=i + STENCIL]
            .iter()
            .any(|v| v.abs() < usable)
        {
            continue;
        }
        let r = d[i - STENCIL] / dev[i];
        if r.is_finite() {
            rows.push((t[i], r));
        }
    }
    report.diagnostics.ratios = rows.clone();
    if let Some(&(t0, _)) = rows.first() {
        let i = t.partition_point(|&s| s < t0);
        report.note(format!(
            "conditioning: |u - a(x0)| = {:e} at the smallest usable t = {t0:e} (scale {scale:e})",
            dev[i].abs()
        ));
    }

    let mut windows: Vec<Vec<(f64, f64)>> = Vec::new();
    for &(ti, ri) in &rows {
        match windows.last_mut() {
            Some(w) if decade_of(w[0].0) == decade_of(ti) => w.push((ti, ri)),
            _ => windows.push(vec![(ti, ri)]),
        }
    }
    windows.retain(|w| w.len() >= MIN_WINDOW);
    if windows.is_empty() {
        return Err(Error::Degenerate(
            "no decade holds enough usable samples near t = 0".into(),
        ));
    }
    for w in windows.iter().take(2) {
        let (tw, rw): (Vec<f64>, Vec<f64>) = w.iter().copied().unzip();
        report.diagnostics.fits.push(fit_window(&tw, &rw, 1.0)?);
    }
    let first = report.diagnostics.fits[0];
    report.estimate = Some(first.alpha);
    report
        .diagnostics
        .residuals
        .push(("fit_rms".into(), first.residual));
    match report.diagnostics.fits.get(1) {
        Some(second) if (second.alpha - first.alpha).abs() > DECADE_SPREAD => {
            report.status = RecoveryStatus::ExtrapolationUnstable;
            report.note(format!(
                "decade estimates differ: {} vs {}",
                first.alpha, second.alpha
            ));
        }
        None => report.note("only one usable decade; stability not cross-checked"),
        _ => {}
    }
    Ok(report)
}

/// Long-time limit from the last decade of a long series.
pub fn recover_alpha_long_time(series: &ObservationSeries) -> Result<RecoveryReport<f64>> {
    let mut report = RecoveryReport::new("long-time");
    let (t, h) = series.positive_times();
    if h.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate("observation is identically zero".into()));
    }
    if t.len() <= 2 * STENCIL {
        return Err(Error::Degenerate("too few positive sample times".into()));
    }
    let first = h[0].abs();
    let last = h[h.len() - 1].abs();
    if !(last < 0.1 * first) {
        report.status = RecoveryStatus::InsufficientHorizon;
        report.note(format!(
            "|u(T)| = {last:e} has not decayed below 0.1 |u(t_1)| = {:e}",
            0.1 * first
        ));
        return Ok(report);
    }
    let t_end = t[t.len() - 1];
    let start = t.partition_point(|&s| s < 0.1 * t_end).max(STENCIL) - STENCIL;
    let (tw, hw) = (&t[start..], &h[start..]);
    if hw.iter().any(|&v| v > 0.0) && hw.iter().any(|&v| v < 0.0) {
        return Err(domain("observation changes sign in the long-time window"));
    }
    if hw.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        report.status = RecoveryStatus::ExtrapolationUnstable;
        report.note("observation underflows in the long-time window (exponential decay)");
        return Ok(report);
    }
    let d = log_derivative(tw, hw);
    let rows: Vec<(f64, f64)> = (STENCIL..tw.len().saturating_sub(STENCIL))
        .map(|i| (tw[i], -d[i - STENCIL] / hw[i]))
        .collect();
    report.diagnostics.ratios = rows.clone();
    if rows.len() < MIN_WINDOW {
        report.status = RecoveryStatus::InsufficientHorizon;
        report.note(format!("only {} samples in the last decade", rows.len()));
        return Ok(report);
    }
    let (rmin, rmax) = rows
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(_, r)| {
            (a.min(r), b.max(r))
        });
    if !(rmin > 0.0) || rmax > 1.5 * rmin {
        report.status = RecoveryStatus::ExtrapolationUnstable;
        report.note(format!(
            "ratio has no power-law plateau on the last decade: range [{rmin}, {rmax}]"
        ));
        return Ok(report);
    }
    let (tr, rr): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
    let fit = fit_window(&tr, &rr, -1.0)?;
    report.diagnostics.fits.push(fit);
    report
        .diagnostics
        .residuals
        .push(("fit_rms".into(), fit.residual));
    report.estimate = Some(fit.alpha);
    Ok(report)
}
