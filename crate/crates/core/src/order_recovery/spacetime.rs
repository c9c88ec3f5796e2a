use std::fmt;

use crate::error::{domain, invalid, Result};
use crate::forward::{discrete_l2, ObservationSeries};
use crate::mittag_leffler::ml_relax;
use crate::optimize::golden_section;
use crate::spectral::{EigenSystem, ModalCoefficients};

use super::{limits::recover_alpha_long_time, Estimate, RecoveryReport, RecoveryStatus};

const GAMMA_WIDTH: f64 = 1e-4;
const FLAT: f64 = 1e-12;

/// Time order α ∈ (0, 1) and space order γ ∈ (0, 2] of ∂_t^α u = −(−Δ)^{γ/2} u.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimeOrders {
    alpha: f64,
    gamma: f64,
}

impl SpaceTimeOrders {
    pub fn new(alpha: f64, gamma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(domain(format!(
                "time order must lie in (0, 1), got {alpha}"
            )));
        }
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(domain(format!(
                "space order must lie in (0, 2], got {gamma}"
            )));
        }
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

impl fmt::Display for SpaceTimeOrders {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(alpha={}, gamma={})", self.alpha, self.gamma)
    }
}

impl Estimate for SpaceTimeOrders {
    fn fields(&self) -> Vec<(String, f64)> {
        vec![("alpha".into(), self.alpha), ("gamma".into(), self.gamma)]
    }
}

/// u(x0, t_j) for known modal data, ML-exact.
fn spacetime_series(alpha: f64, rates: &[f64], weights: &[f64], times: &[f64]) -> Result<Vec<f64>> {
    times
        .iter()
        .map(|&t| {
            rates
                .iter()
                .zip(weights)
                .filter(|(_, &w)| w != 0.0)
                .map(|(&l, &w)| ml_relax(alpha, l, t).map(|e| w * e))
                .sum()
        })
        .collect()
}

/// Two-stage recovery of (α, γ): α from the long-time limit, then γ by
/// golden-section search of the L² misfit with the modal data `a` known.
pub fn recover_spacetime(
    series: &ObservationSeries,
    eig: &EigenSystem,
    a: &ModalCoefficients,
) -> Result<RecoveryReport<SpaceTimeOrders>> {
    if a.len() != eig.count() {
        return Err(crate::error::Error::LengthMismatch {
            expected: eig.count(),
            got: a.len(),
        });
    }
    if !(a.as_slice()[0] > 0.0) {
        return Err(invalid("space-time recovery needs (a, phi_1) > 0"));
    }
    let mut report = RecoveryReport::new("spacetime");
    let stage1 = recover_alpha_long_time(series)?;
    report.diagnostics.ratios = stage1.diagnostics.ratios.clone();
    report.diagnostics.fits = stage1.diagnostics.fits.clone();
    report.diagnostics.notes = stage1.diagnostics.notes.clone();
    let Some(alpha) = stage1.estimate else {
        report.status = stage1.status;
        report.note("time-order stage failed; space order not attempted");
        return Ok(report);
    };
    report.status = stage1.status;

    let phi = eig.phi_all(series.x0());
    let weights: Vec<f64> = a.as_slice().iter().zip(&phi).map(|(c, p)| c * p).collect();
    let times = series.times();
    let misfit = |gamma: f64| -> f64 {
        let Ok(rates) = eig.fractional_eigenvalues(gamma) else {
            return f64::INFINITY;
        };
        match spacetime_series(alpha, &rates, &weights, times) {
            Ok(u) => {
                let d: Vec<f64> = u.iter().zip(series.values()).map(|(x, y)| x - y).collect();
                discrete_l2(times, &d)
            }
            Err(_) => f64::INFINITY,
        }
    };
    let probes: Vec<f64> = [0.05, 0.5, 1.0, 1.5, 1.95]
        .iter()
        .map(|&g| misfit(g))
        .collect();
    let (lo, hi) = probes
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if hi - lo < FLAT {
        report.status = RecoveryStatus::FlatObjective;
        report.note(format!(
            "misfit varies by {:e} over the space-order range",
            hi - lo
        ));
        return Ok(report);
    }
    let (gamma, value) = golden_section(&misfit, 0.0, 2.0, GAMMA_WIDTH)?;
    report.diagnostics.residuals.push((
        "alpha_fit_rms".into(),
        stage1
            .diagnostics
            .residuals
            .first()
            .map_or(f64::NAN, |r| r.1),
    ));
    report
        .diagnostics
        .residuals
        .push(("gamma_misfit".into(), value));
    report.estimate = Some(SpaceTimeOrders::new(alpha, gamma.min(2.0))?);
    Ok(report)
}
