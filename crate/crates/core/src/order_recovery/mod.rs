//! Identification of fractional orders from a single interior sensor.

mod experiments;
mod limits;
mod multiterm;
mod spacetime;

use std::fmt::{self, Write as _};

pub use experiments::{distinguishability, lipschitz_ratio, LipschitzEntry, LipschitzTable};
pub use limits::{recover_alpha_long_time, recover_alpha_short_time};
pub(crate) use multiterm::resample;
pub use multiterm::{
    recover_multiterm, spectrum_from_unconstrained, unconstrained_from_spectrum, MultiTermOptions,
};
pub use spacetime::{recover_spacetime, SpaceTimeOrders};

use crate::forward::OrderSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RecoveryStatus {
    Converged,
    /// Successive windows of the limit extrapolation disagree, or the ratio
    /// shows no plateau at all.
    ExtrapolationUnstable,
    /// The series does not decay far enough for the long-time limit.
    InsufficientHorizon,
    /// Best misfit stayed above the requested fraction of the data norm.
    OptimizerStalled,
    /// The objective is constant over the search interval.
    FlatObjective,
    /// Every parameter reproduces the data equally well.
    NonIdentifiable,
}

impl RecoveryStatus {
    pub fn label(self) -> &'static str {
        match self {
            RecoveryStatus::Converged => "converged",
            RecoveryStatus::ExtrapolationUnstable => "extrapolation-unstable",
            RecoveryStatus::InsufficientHorizon => "insufficient-horizon",
            RecoveryStatus::OptimizerStalled => "optimizer-stalled",
            RecoveryStatus::FlatObjective => "flat-objective",
            RecoveryStatus::NonIdentifiable => "non-identifiable",
        }
    }

    pub fn is_converged(self) -> bool {
        self == RecoveryStatus::Converged
    }
}

impl fmt::Display for RecoveryStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Two-parameter fit r(t) ≈ α + c t^{±α} on one window of the ratio table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowFit {
    pub t_lo: f64,
    pub t_hi: f64,
    pub alpha: f64,
    pub c: f64,
    /// RMS residual of the fit.
    pub residual: f64,
}

/// One multi-start run.
#[derive(Debug, Clone, PartialEq)]
pub struct StartRecord {
    pub index: usize,
    pub estimate: Vec<f64>,
    pub misfit: f64,
    pub iterations: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// (t, r(t)) for the limit formulas.
    pub ratios: Vec<(f64, f64)>,
    pub fits: Vec<WindowFit>,
    /// Named scalar residuals of each stage.
    pub residuals: Vec<(String, f64)>,
    pub starts: Vec<StartRecord>,
    pub notes: Vec<String>,
}

/// Parameters that a report can print as `name = value` lines.
pub trait Estimate {
    fn fields(&self) -> Vec<(String, f64)>;
}

impl Estimate for f64 {
    fn fields(&self) -> Vec<(String, f64)> {
        vec![("alpha".into(), *self)]
    }
}

impl Estimate for OrderSpectrum {
    fn fields(&self) -> Vec<(String, f64)> {
        let mut out: Vec<(String, f64)> = self
            .alphas()
            .iter()
            .enumerate()
            .map(|(j, &a)| (format!("alpha_{}", j + 1), a))
            .collect();
        out.extend(
            self.weights()
                .iter()
                .enumerate()
                .map(|(j, &p)| (format!("p_{}", j + 1), p)),
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryReport<E> {
    pub method: &'static str,
    pub estimate: Option<E>,
    pub status: RecoveryStatus,
    pub diagnostics: Diagnostics,
}

impl<E> RecoveryReport<E> {
    pub(crate) fn new(method: &'static str) -> Self {
        Self {
            method,
            estimate: None,
            status: RecoveryStatus::Converged,
            diagnostics: Diagnostics::default(),
        }
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.diagnostics.notes.push(s.into());
    }
}

impl<E: Estimate> RecoveryReport<E> {
    /// `key = value` report; floats use the shortest round-trip form so the
    /// text is reproducible bit for bit.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method = {}", self.method);
        let _ = writeln!(s, "status = {}", self.status);
        match &self.estimate {
            Some(e) => {
                for (k, v) in e.fields() {
                    let _ = writeln!(s, "{k} = {v:?}");
                }
            }
            None => s.push_str("estimate = none\n"),
        }
        for (k, v) in &self.diagnostics.residuals {
            let _ = writeln!(s, "residual.{k} = {v:?}");
        }
        for f in &self.diagnostics.fits {
            let _ = writeln!(
                s,
                "fit [{:?}, {:?}] alpha = {:?} c = {:?} rms = {:?}",
                f.t_lo, f.t_hi, f.alpha, f.c, f.residual
            );
        }
        for st in &self.diagnostics.starts {
            let _ = writeln!(
                s,
                "start {} misfit = {:?} iterations = {} estimate = {:?}",
                st.index, st.misfit, st.iterations, st.estimate
            );
        }
        for n in &self.diagnostics.notes {
            let _ = writeln!(s, "note: {n}");
        }
        s
    }

    /// (t, r) ratio table as CSV.
    pub fn ratios_csv(&self) -> String {
        let mut s = String::from("t,r\n");
        for (t, r) in &self.diagnostics.ratios {
            let _ = writeln!(s, "{t:?},{r:?}");
        }
        s
    }
}
