//! Least-squares recovery of (α, p) for Σ p_j ∂_t^{α_j} u = Δu.
//!
//! The admissible set 0 < α_ℓ < … < α_1 < 1, p > 0 is mapped onto R^{2ℓ} by
//! α_1 = σ(y_1), α_{j+1} = α_j σ(y_{j+1}), p_j = exp(z_j), so Nelder–Mead
//! runs unconstrained.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::forward::{discrete_l2, operator_weights, ObservationSeries, OrderSpectrum, Scenario};
use crate::optimize::{nelder_mead, NelderMeadOptions};

use super::{RecoveryReport, RecoveryStatus, StartRecord};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiTermOptions {
    pub starts: usize,
    pub seed: u64,
    /// Tikhonov weight ε on ‖α‖² + ‖p‖².
    pub epsilon: f64,
    /// Best misfit above this fraction of ‖h‖ reports a stalled optimizer.
    pub stall_tolerance: f64,
    pub nm: NelderMeadOptions,
}

impl Default for MultiTermOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            seed: 42,
            epsilon: 0.0,
            stall_tolerance: 0.05,
            nm: NelderMeadOptions {
                step: 0.5,
                sd_tolerance: 1e-16,
                max_iters: 1500,
                restarts: 2,
            },
        }
    }
}

fn sigmoid(y: f64) -> f64 {
    1.0 / (1.0 + (-y).exp())
}

/// θ = (y_1..y_ℓ, z_1..z_ℓ) ↦ spectrum; fails when rounding collapses the ordering.
pub fn spectrum_from_unconstrained(theta: &[f64]) -> Result<OrderSpectrum> {
    if theta.is_empty() || !theta.len().is_multiple_of(2) {
        return Err(invalid(format!(
            "parameter vector of odd length {}",
            theta.len()
        )));
    }
    let ell = theta.len() / 2;
    let mut alphas = Vec::with_capacity(ell);
    let mut prev = 1.0;
    for &y in &theta[..ell] {
        prev *= sigmoid(y);
        alphas.push(prev);
    }
    let weights = theta[ell..].iter().map(|z| z.exp()).collect();
    OrderSpectrum::new(alphas, weights)
}

pub fn unconstrained_from_spectrum(s: &OrderSpectrum) -> Vec<f64> {
    let logit = |p: f64| (p / (1.0 - p)).ln();
    let mut prev = 1.0;
    let mut theta: Vec<f64> = s
        .alphas()
        .iter()
        .map(|&a| {
            let y = logit(a / prev);
            prev = a;
            y
        })
        .collect();
    theta.extend(s.weights().iter().map(|p| p.ln()));
    theta
}

/// Linear interpolation of the series onto `times` (exact at shared nodes).
pub(crate) fn resample(series: &ObservationSeries, times: &[f64]) -> Result<Vec<f64>> {
    let (ts, hs) = (series.times(), series.values());
    let end = *ts.last().unwrap();
    times
        .iter()
        .map(|&t| {
            if t < ts[0] || t > end * (1.0 + 1e-12) {
                return Err(invalid(format!(
                    "time {t} lies outside the observation window [{}, {end}]",
                    ts[0]
                )));
            }
            let i = ts.partition_point(|&s| s < t);
            if i < ts.len() && (ts[i] - t).abs() <= 1e-12 * t.abs().max(1e-300) {
                return Ok(hs[i]);
            }
            let i = i.clamp(1, ts.len() - 1);
            let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
            Ok(hs[i - 1] * (1.0 - w) + hs[i] * w)
        })
        .collect()
}

/// Minimizes ‖u[α, p](x0, ·) − h‖_{L²(0,T)} over ℓ-term spectra, with the
/// scenario's grid, modes and initial data as the internal forward model.
pub fn recover_multiterm(
    series: &ObservationSeries,
    ell: usize,
    scenario: &Scenario,
    opts: &MultiTermOptions,
) -> Result<RecoveryReport<OrderSpectrum>> {
    if ell == 0 {
        return Err(invalid("term count must be at least 1"));
    }
    if opts.starts == 0 {
        return Err(invalid("at least one start is required"));
    }
    if !scenario.boundary.is_homogeneous() {
        return Err(invalid(
            "multi-term recovery expects homogeneous boundary data",
        ));
    }
    let times = scenario.grid.times();
    let h = resample(series, times)?;
    let h_norm = discrete_l2(times, &h);
    let norm_sq = if h_norm > 0.0 { h_norm * h_norm } else { 1.0 };

    let misfit = |s: &OrderSpectrum| -> Result<f64> {
        let w = operator_weights(s, &scenario.grid)?;
        let u = scenario.observe_with_weights(&w)?;
        let d: Vec<f64> = u.values().iter().zip(&h).map(|(x, y)| x - y).collect();
        Ok(discrete_l2(times, &d))
    };
    let objective = |theta: &[f64]| -> f64 {
        let Ok(s) = spectrum_from_unconstrained(theta) else {
            return f64::INFINITY;
        };
        let Ok(m) = misfit(&s) else {
            return f64::INFINITY;
        };
        let reg: f64 = s.alphas().iter().chain(s.weights()).map(|v| v * v).sum();
        (m * m + opts.epsilon * reg) / norm_sq
    };

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let starts: Vec<Vec<f64>> = (0..opts.starts)
        .map(|_| {
            let mut th: Vec<f64> = (0..ell).map(|_| rng.random_range(-2.0..2.0)).collect();
            th.extend((0..ell).map(|_| rng.random_range(-1.5..1.5)));
            th
        })
        .collect();

    let mut report = RecoveryReport::new("multiterm");
    let initial: Vec<f64> = starts
        .iter()
        .map(|th| spectrum_from_unconstrained(th).and_then(|s| misfit(&s)))
        .collect::<Result<_>>()?;
    let (lo, hi) = initial
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi - lo <= 1e-12 * h_norm {
        report.status = RecoveryStatus::NonIdentifiable;
        report.note(format!(
            "misfit is identical ({lo:e}) at every start: the data does not constrain the orders"
        ));
        report.estimate = Some(spectrum_from_unconstrained(&starts[0])?);
        report.diagnostics.residuals.push(("misfit".into(), lo));
        return Ok(report);
    }

    let runs: Vec<(StartRecord, Vec<f64>)> = starts
        .par_iter()
        .enumerate()
        .map(|(index, th)| {
            let m = nelder_mead(&objective, th, &opts.nm)?;
            let s = spectrum_from_unconstrained(&m.x)?;
            let raw = misfit(&s)?;
            let record = StartRecord {
                index,
                estimate: s.alphas().iter().chain(s.weights()).copied().collect(),
                misfit: raw,
                iterations: m.iterations,
            };
            Ok::<_, Error>((record, m.x))
        })
        .collect::<Result<_>>()?;
    let (best, theta) = runs
        .iter()
        .min_by(|a, b| {
            a.0.misfit
                .total_cmp(&b.0.misfit)
                .then(a.0.index.cmp(&b.0.index))
        })
        .expect("at least one start");
    let best_misfit = best.misfit;
    report.estimate = Some(spectrum_from_unconstrained(theta)?);
    report
        .diagnostics
        .residuals
        .push(("misfit".into(), best_misfit));
    report
        .diagnostics
        .residuals
        .push(("relative_misfit".into(), best_misfit / h_norm));
    report.diagnostics.starts = runs.into_iter().map(|r| r.0).collect();
    if best_misfit > opts.stall_tolerance * h_norm {
        report.status = RecoveryStatus::OptimizerStalled;
        report.note(format!(
            "best misfit {best_misfit:e} exceeds {} x |h| = {:e}",
            opts.stall_tolerance,
            opts.stall_tolerance * h_norm
        ));
    }
    Ok(report)
}
