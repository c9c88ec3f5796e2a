use rayon::prelude::*;

use crate::error::{domain, invalid, Error, Result};
use crate::forward::l1::{march, operator_weights, L1Weights};
use crate::forward::types::{
    BoundaryData, LiftSamples, ObservationSeries, OrderSpectrum, SolutionField, TimeGrid,
    WeightFunction,
};
use crate::mittag_leffler::ml_relax;
use crate::quadrature::GaussLegendre;
use crate::spectral::{EigenSystem, ModalCoefficients};

/// Time-fractional operator of an L1-discretized model.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeOperator {
    /// Σ p_j ∂_t^{α_j}
    MultiTerm(OrderSpectrum),
    /// ∫_0^1 μ(α) ∂_t^α dα by Gauss–Legendre quadrature of the given order.
    Distributed {
        mu: WeightFunction,
        quad_order: usize,
    },
}

impl TimeOperator {
    /// The discrete order spectrum that the solver actually integrates.
    pub fn spectrum(&self) -> Result<OrderSpectrum> {
        match self {
            TimeOperator::MultiTerm(s) => Ok(s.clone()),
            TimeOperator::Distributed { mu, quad_order } => distributed_spectrum(mu, *quad_order),
        }
    }

    pub fn weights(&self, grid: &TimeGrid) -> Result<L1Weights> {
        operator_weights(&self.spectrum()?, grid)
    }

    fn describe(&self) -> String {
        match self {
            TimeOperator::MultiTerm(s) => format!("multi-term L1 {s}"),
            TimeOperator::Distributed { mu, quad_order } => format!(
                "distributed-order L1 Kq={quad_order} mu_nodes={}",
                mu.nodes().len()
            ),
        }
    }
}

/// Gauss–Legendre discretization of ∫_0^1 μ(α) ∂^α dα as Σ w_k μ(α_k) ∂^{α_k},
/// dropping nodes where μ vanishes.
pub fn distributed_spectrum(mu: &WeightFunction, quad_order: usize) -> Result<OrderSpectrum> {
    if quad_order < 4 {
        return Err(invalid(format!(
            "distributed-order quadrature needs at least 4 nodes, got {quad_order}"
        )));
    }
    let rule = GaussLegendre::new(quad_order);
    let mut terms: Vec<(f64, f64)> = rule
        .mapped(0.0, 1.0)
        .map(|(a, w)| (a, w * mu.eval(a)))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    if terms.is_empty() {
        return Err(Error::Degenerate(
            "weight function vanishes at every quadrature node".into(),
        ));
    }
    terms.sort_by(|x, y| y.0.total_cmp(&x.0));
    let (alphas, weights) = terms.into_iter().unzip();
    OrderSpectrum::new(alphas, weights)
}

fn check_modes(a: &ModalCoefficients, eig: &EigenSystem) -> Result<()> {
    if a.len() != eig.count() {
        return Err(Error::LengthMismatch {
            expected: eig.count(),
            got: a.len(),
        });
    }
    Ok(())
}

fn relaxation_modes(
    alpha: f64,
    rates: &[f64],
    a: &[f64],
    grid: &TimeGrid,
) -> Result<Vec<Vec<f64>>> {
    rates
        .par_iter()
        .zip(a.par_iter())
        .map(|(&lambda, &an)| {
            if an == 0.0 {
                return Ok(vec![0.0; grid.times().len()]);
            }
            grid.times()
                .iter()
                .map(|&t| ml_relax(alpha, lambda, t).map(|e| an * e))
                .collect()
        })
        .collect()
}

/// u = Σ a_n E_{α,1}(−λ_n t^α) φ_n, mode-exact. α = 1 gives the heat equation.
pub fn solve_single_modal(
    alpha: f64,
    a: &ModalCoefficients,
    eig: &EigenSystem,
    grid: &TimeGrid,
    xs: &[f64],
) -> Result<SolutionField> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "time order must lie in (0, 1], got {alpha}"
        )));
    }
    check_modes(a, eig)?;
    let modal = relaxation_modes(alpha, eig.eigenvalues(), a.as_slice(), grid)?;
    let tag = format!(
        "single-term ML-exact alpha={alpha} N={} K={}",
        eig.count(),
        grid.steps()
    );
    Ok(SolutionField::assemble(eig, grid, xs, modal, None, tag))
}

/// u = Σ a_n E_{α,1}(−λ_n^{γ/2} t^α) φ_n for ∂_t^α u = −(−Δ)^{γ/2} u.
pub fn solve_spacetime_modal(
    alpha: f64,
    gamma: f64,
    a: &ModalCoefficients,
    eig: &EigenSystem,
    grid: &TimeGrid,
    xs: &[f64],
) -> Result<SolutionField> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "time order must lie in (0, 1], got {alpha}"
        )));
    }
    check_modes(a, eig)?;
    let rates = eig.fractional_eigenvalues(gamma)?;
    let modal = relaxation_modes(alpha, &rates, a.as_slice(), grid)?;
    let tag = format!(
        "space-time ML-exact alpha={alpha} gamma={gamma} N={} K={}",
        eig.count(),
        grid.steps()
    );
    Ok(SolutionField::assemble(eig, grid, xs, modal, None, tag))
}

/// Σ p_j ∂_t^{α_j} u = Δu with homogeneous Dirichlet data, by L1 stepping per mode.
pub fn solve_multi_modal(
    spectrum: &OrderSpectrum,
    a: &ModalCoefficients,
    eig: &EigenSystem,
    grid: &TimeGrid,
    xs: &[f64],
) -> Result<SolutionField> {
    solve_with_boundary(
        &TimeOperator::MultiTerm(spectrum.clone()),
        a,
        &BoundaryData::homogeneous(),
        eig,
        grid,
        xs,
    )
}

/// D_t^{(μ)} u = Δu with homogeneous Dirichlet data.
pub fn solve_distributed_modal(
    mu: &WeightFunction,
    quad_order: usize,
    a: &ModalCoefficients,
    eig: &EigenSystem,
    grid: &TimeGrid,
    xs: &[f64],
) -> Result<SolutionField> {
    solve_with_boundary(
        &TimeOperator::Distributed {
            mu: mu.clone(),
            quad_order,
        },
        a,
        &BoundaryData::homogeneous(),
        eig,
        grid,
        xs,
    )
}

/// Linear lift of the boundary data and the modal source it induces.
///
/// Returns w sampled at the boundary on `grid` and f_n(t_j) = −D[(w, φ_n)](t_j)
/// with D the operator encoded by `weights`. Since Δw = 0 the remainder
/// v = u − w solves the homogeneous-boundary problem with source f.
pub fn lift_boundary(
    g: &BoundaryData,
    eig: &EigenSystem,
    grid: &TimeGrid,
    weights: &L1Weights,
) -> Result<(LiftSamples, Vec<Vec<f64>>)> {
    let times = grid.times();
    let left: Vec<f64> = times.iter().map(|&t| g.left.eval(t)).collect();
    let right: Vec<f64> = times.iter().map(|&t| g.right.eval(t)).collect();
    if let Some(v) = left.iter().chain(&right).find(|v| !v.is_finite()) {
        return Err(invalid(format!("boundary data is not finite: {v}")));
    }
    let lift = LiftSamples { left, right };
    if g.is_homogeneous() {
        return Ok((lift, vec![vec![0.0; times.len()]; eig.count()]));
    }
    let dl: Vec<f64> = (0..times.len())
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                weights.apply(j, &lift.left)
            }
        })
        .collect();
    let dr: Vec<f64> = (0..times.len())
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                weights.apply(j, &lift.right)
            }
        })
        .collect();
    let (cl, cr) = lift_projections(eig);
    let sources = cl
        .iter()
        .zip(&cr)
        .map(|(&l, &r)| dl.iter().zip(&dr).map(|(a, b)| -(l * a + r * b)).collect())
        .collect();
    Ok((lift, sources))
}

/// ((1 − x/L), φ_n) and (x/L, φ_n) in closed form.
fn lift_projections(eig: &EigenSystem) -> (Vec<f64>, Vec<f64>) {
    let c = (2.0 * eig.length()).sqrt() / std::f64::consts::PI;
    (1..=eig.count())
        .map(|n| {
            let nf = n as f64;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            (c / nf, sign * c / nf)
        })
        .unzip()
}

/// General L1 solver with Dirichlet data `g` handled by linear lifting.
pub fn solve_with_boundary(
    op: &TimeOperator,
    a: &ModalCoefficients,
    g: &BoundaryData,
    eig: &EigenSystem,
    grid: &TimeGrid,
    xs: &[f64],
) -> Result<SolutionField> {
    check_modes(a, eig)?;
    let weights = op.weights(grid)?;
    let homogeneous = g.is_homogeneous();
    let (lift, sources) = lift_boundary(g, eig, grid, &weights)?;
    if !homogeneous {
        let (l0, r0) = (lift.left[0], lift.right[0]);
        if l0.abs() > 1e-12 || r0.abs() > 1e-12 {
            log::warn!(
                "boundary data g(0)=({l0}, {r0}) is incompatible with initial data vanishing \
                 at the endpoints; the solution is understood in the weak sense"
            );
        }
    }
    let (cl, cr) = lift_projections(eig);
    let modal: Vec<Vec<f64>> = eig
        .eigenvalues()
        .par_iter()
        .enumerate()
        .map(|(n, &lambda)| {
            let v0 = if homogeneous {
                a.as_slice()[n]
            } else {
                a.as_slice()[n] - cl[n] * lift.left[0] - cr[n] * lift.right[0]
            };
            if homogeneous && v0 == 0.0 {
                return Ok(vec![0.0; grid.times().len()]);
            }
            march(
                &weights,
                lambda,
                v0,
                (!homogeneous).then_some(&sources[n][..]),
            )
        })
        .collect::<Result<_>>()?;
    let tag = format!(
        "{} N={} K={} boundary={}",
        op.describe(),
        eig.count(),
        grid.steps(),
        if homogeneous { "homogeneous" } else { "lifted" }
    );
    let lift = (!homogeneous).then_some(lift);
    Ok(SolutionField::assemble(eig, grid, xs, modal, lift, tag))
}

/// A fixed observation setup: initial data, boundary data, time grid and
/// sensor. Parameter studies evaluate many operators against one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub eig: EigenSystem,
    pub a: ModalCoefficients,
    pub boundary: BoundaryData,
    pub grid: TimeGrid,
    pub x0: f64,
}

impl Scenario {
    pub fn new(
        eig: EigenSystem,
        a: ModalCoefficients,
        boundary: BoundaryData,
        grid: TimeGrid,
        x0: f64,
    ) -> Result<Self> {
        check_modes(&a, &eig)?;
        if !eig.domain().contains_interior(x0) {
            return Err(invalid(format!(
                "sensor x0={x0} must lie strictly inside the domain"
            )));
        }
        Ok(Self {
            eig,
            a,
            boundary,
            grid,
            x0,
        })
    }

    /// Homogeneous-boundary scenario.
    pub fn interior(
        eig: EigenSystem,
        a: ModalCoefficients,
        grid: TimeGrid,
        x0: f64,
    ) -> Result<Self> {
        Self::new(eig, a, BoundaryData::homogeneous(), grid, x0)
    }

    /// Observation of the L1 solution of `op` at the sensor.
    pub fn observe(&self, op: &TimeOperator) -> Result<ObservationSeries> {
        let field = solve_with_boundary(op, &self.a, &self.boundary, &self.eig, &self.grid, &[])?;
        observe(&field, self.x0)
    }

    /// Observation for precomputed operator weights (homogeneous boundary only
    /// needs the weights, which lets callers cache them).
    pub fn observe_with_weights(&self, weights: &L1Weights) -> Result<ObservationSeries> {
        if !self.boundary.is_homogeneous() {
            return Err(invalid("cached weights require homogeneous boundary data"));
        }
        let modes: Vec<Vec<f64>> = self
            .eig
            .eigenvalues()
            .par_iter()
            .zip(self.a.as_slice().par_iter())
            .map(|(&lambda, &an)| {
                if an == 0.0 {
                    Ok(vec![0.0; self.grid.times().len()])
                } else {
                    march(weights, lambda, an, None)
                }
            })
            .collect::<Result<_>>()?;
        let phi = self.eig.phi_all(self.x0);
        let values = (0..self.grid.times().len())
            .map(|j| modes.iter().zip(&phi).map(|(m, p)| m[j] * p).sum())
            .collect();
        ObservationSeries::new(self.x0, self.grid.times().to_vec(), values)
    }
}

/// h_j = u(x0, t_j) by modal synthesis at x0.
pub fn observe(field: &SolutionField, x0: f64) -> Result<ObservationSeries> {
    let domain = field.eigensystem().domain();
    if !domain.contains_interior(x0) {
        return Err(invalid(format!(
            "sensor x0={x0} must lie strictly inside (0, {})",
            domain.length()
        )));
    }
    let values = (0..field.grid().times().len())
        .map(|j| field.synthesize_at(x0, j))
        .collect();
    ObservationSeries::new(x0, field.grid().times().to_vec(), values)
}
