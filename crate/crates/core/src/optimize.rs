//! Thin wrappers over argmin's Nelder–Mead and golden-section solvers.

use argmin::core::{
    CostFunction, Error as ArgminError, Executor, State, TerminationReason, TerminationStatus,
};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;

use crate::error::{Error, Result};

/// Cost assigned to non-finite objective values so the simplex ordering stays total.
const PENALTY: f64 = 1e300;

struct Objective<'a, F>(&'a F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<'_, F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, ArgminError> {
        let v = (self.0)(p);
        Ok(if v.is_finite() { v } else { PENALTY })
    }
}

struct Scalar<'a, F>(&'a F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<'_, F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> std::result::Result<f64, ArgminError> {
        let v = (self.0)(*p);
        Ok(if v.is_finite() { v } else { PENALTY })
    }
}

fn wrap(e: ArgminError) -> Error {
    Error::Accuracy(format!("optimizer failure: {e}"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Initial simplex edge length along each axis.
    pub step: f64,
    /// Stop when the standard deviation of simplex costs falls below this.
    pub sd_tolerance: f64,
    pub max_iters: u64,
    /// Fresh-simplex restarts from the incumbent after convergence.
    pub restarts: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            step: 0.25,
            sd_tolerance: 1e-14,
            max_iters: 2000,
            restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
    /// false when the iteration cap was hit before the simplex collapsed.
    pub converged: bool,
}

/// Minimizes `f` from `x0` by Nelder–Mead with axis-aligned initial simplices.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: &[f64],
    opts: &NelderMeadOptions,
) -> Result<Minimum> {
    if x0.is_empty() {
        return Err(crate::error::invalid(
            "Nelder-Mead needs at least one parameter",
        ));
    }
    let mut best = Minimum {
        x: x0.to_vec(),
        value: Objective(f).cost(&x0.to_vec()).map_err(wrap)?,
        iterations: 0,
        converged: false,
    };
    let mut step = opts.step;
    for _ in 0..=opts.restarts {
        let mut simplex = vec![best.x.clone()];
        for i in 0..best.x.len() {
            let mut v = best.x.clone();
            v[i] += step;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(opts.sd_tolerance)
            .map_err(wrap)?;
        let res = Executor::new(Objective(f), solver)
            .configure(|s| s.max_iters(opts.max_iters))
            .run()
            .map_err(wrap)?;
        let state = res.state();
        let converged = matches!(
            state.get_termination_status(),
            TerminationStatus::Terminated(TerminationReason::SolverConverged)
        );
        let improved = state.get_best_cost() < best.value;
        best.iterations += state.get_iter();
        best.converged = converged;
        if improved {
            best.value = state.get_best_cost();
            best.x = state.get_best_param().cloned().unwrap_or(best.x);
        } else {
            break;
        }
        step *= 0.5;
    }
    Ok(best)
}

/// Golden-section minimization of a unimodal `f` on (lo, hi) to bracket width `tol`.
pub fn golden_section<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let init = lo + 0.381_966_011_250_105_1 * (hi - lo);
    // argmin's tolerance is relative to |x1| + |x2| ≤ 2 max(|lo|, |hi|)
    let rel = tol / (2.0 * lo.abs().max(hi.abs()));
    let solver = GoldenSectionSearch::new(lo, hi)
        .and_then(|s| s.with_tolerance(rel))
        .map_err(wrap)?;
    let res = Executor::new(Scalar(f), solver)
        .configure(|s| s.param(init).max_iters(500))
        .run()
        .map_err(wrap)?;
    let state = res.state();
    let x = state.get_best_param().copied().unwrap_or(init);
    Ok((x, state.get_best_cost()))
}
