//! Reconstruction of a distributed-order weight μ from one sensor, and the
//! stability / distinguishability experiments that go with it.

use std::cell::RefCell;
use std::fmt::{self, Write as _};

use crate::error::{invalid, Result};
use crate::forward::{
    caputo_l1_weights, discrete_l2, BoundaryProfile, L1Weights, ObservationSeries, Scenario,
    TimeGrid, TimeOperator, WeightFunction,
};
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::order_recovery::resample;
use crate::quadrature::GaussLegendre;

/// Node values below this are projected to zero.
pub const ZERO_FLOOR: f64 = 1e-10;
/// More nodes than the data can resolve only produce regularization artifacts.
pub const MAX_NODES: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightRecoveryOptions {
    /// Gauss–Legendre order of the internal forward model.
    pub quad_order: usize,
    /// Starting node value.
    pub initial_value: f64,
    /// Misfit above this fraction of ‖h‖ reports a stalled optimizer.
    pub stall_tolerance: f64,
    pub nm: NelderMeadOptions,
}

impl Default for WeightRecoveryOptions {
    fn default() -> Self {
        Self {
            quad_order: 16,
            initial_value: 1.0,
            stall_tolerance: 0.05,
            nm: NelderMeadOptions {
                step: 0.5,
                sd_tolerance: 1e-18,
                max_iters: 6000,
                restarts: 3,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightStatus {
    Converged,
    OptimizerStalled,
    /// The data cannot be told apart from zero; no weight is returned.
    AllZero,
}

impl fmt::Display for WeightStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightStatus::Converged => "converged",
            WeightStatus::OptimizerStalled => "optimizer-stalled",
            WeightStatus::AllZero => "all-zero-estimate",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightEstimate {
    pub weight: Option<WeightFunction>,
    pub epsilon: f64,
    /// ‖u[μ](x0,·) − h‖_{L²(0,T)}
    pub misfit: f64,
    /// misfit² + ε‖μ‖²_{L²(0,1)}
    pub objective: f64,
    /// Objective value each time the optimizer found a better point.
    pub history: Vec<f64>,
    pub status: WeightStatus,
}

impl WeightEstimate {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "method = weight");
        let _ = writeln!(s, "status = {}", self.status);
        let _ = writeln!(s, "epsilon = {:?}", self.epsilon);
        let _ = writeln!(s, "misfit = {:?}", self.misfit);
        let _ = writeln!(s, "objective = {:?}", self.objective);
        let _ = writeln!(s, "improvements = {}", self.history.len());
        if let Some(w) = &self.weight {
            let _ = writeln!(s, "mass = {:?}", w.mass());
        }
        s
    }

    /// (node, value) rows; empty body for the all-zero status.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("node,value\n");
        if let Some(w) = &self.weight {
            for (n, v) in w.nodes().iter().zip(w.values()) {
                let _ = writeln!(s, "{n:?},{v:?}");
            }
        }
        s
    }
}

/// L1 tables of every quadrature node, so a weight change only re-mixes them.
struct DistributedModel {
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    tables: Vec<L1Weights>,
}

impl DistributedModel {
    fn new(quad_order: usize, grid: &TimeGrid) -> Result<Self> {
        if quad_order < 4 {
            return Err(invalid(format!(
                "distributed-order quadrature needs at least 4 nodes, got {quad_order}"
            )));
        }
        let (nodes, quad_weights): (Vec<f64>, Vec<f64>) =
            GaussLegendre::new(quad_order).mapped(0.0, 1.0).unzip();
        let tables = nodes
            .iter()
            .map(|&a| caputo_l1_weights(a, grid))
            .collect::<Result<_>>()?;
        Ok(Self {
            nodes,
            quad_weights,
            tables,
        })
    }

    /// Σ_k w_k μ(α_k) B^{(α_k)}; the zero weight gives the zero operator.
    fn operator(&self, mu: impl Fn(f64) -> f64) -> L1Weights {
        let mut total = self.tables[0]
            .clone()
            .scaled(self.quad_weights[0] * mu(self.nodes[0]));
        for k in 1..self.nodes.len() {
            let c = self.quad_weights[k] * mu(self.nodes[k]);
            if c != 0.0 {
                total.add_scaled(c, &self.tables[k]);
            }
        }
        total
    }
}

fn interpolate(nodes: &[f64], values: &[f64], s: f64) -> f64 {
    let i = nodes.partition_point(|&x| x <= s).clamp(1, nodes.len() - 1) - 1;
    let w = ((s - nodes[i]) / (nodes[i + 1] - nodes[i])).clamp(0.0, 1.0);
    values[i] * (1.0 - w) + values[i + 1] * w
}

fn l2_sq(nodes: &[f64], v: &[f64]) -> f64 {
    nodes
        .windows(2)
        .zip(v.windows(2))
        .map(|(s, v)| (s[1] - s[0]) * (v[0] * v[0] + v[0] * v[1] + v[1] * v[1]) / 3.0)
        .sum()
}

/// Tikhonov-regularized nonnegative fit of μ on `m` uniform nodes.
///
/// Node values are optimized as exp(y) with values under [`ZERO_FLOOR`]
/// projected to zero; the forward model is the scenario's L1 solver at the
/// fixed quadrature order.
pub fn recover_weight(
    series: &ObservationSeries,
    scenario: &Scenario,
    m: usize,
    epsilon: f64,
    opts: &WeightRecoveryOptions,
) -> Result<WeightEstimate> {
    if !(2..=MAX_NODES).contains(&m) {
        return Err(invalid(format!(
            "node count must lie in [2, {MAX_NODES}], got {m}"
        )));
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(invalid(format!(
            "regularization must be >= 0, got {epsilon}"
        )));
    }
    if !scenario.boundary.is_homogeneous() {
        return Err(invalid("weight recovery expects homogeneous boundary data"));
    }
    let times = scenario.grid.times();
    let h = resample(series, times)?;
    let h_norm = discrete_l2(times, &h);
    if h_norm == 0.0 {
        return Ok(WeightEstimate {
            weight: None,
            epsilon,
            misfit: 0.0,
            objective: 0.0,
            history: Vec::new(),
            status: WeightStatus::AllZero,
        });
    }
    let nodes: Vec<f64> = (0..m).map(|k| k as f64 / (m - 1) as f64).collect();
    let model = DistributedModel::new(opts.quad_order, &scenario.grid)?;
    let project = |y: &[f64]| -> Vec<f64> {
        y.iter()
            .map(|v| {
                let x = v.exp();
                if x < ZERO_FLOOR {
                    0.0
                } else {
                    x
                }
            })
            .collect()
    };
    let misfit = |values: &[f64]| -> Result<f64> {
        let w = model.operator(|s| interpolate(&nodes, values, s));
        let u = scenario.observe_with_weights(&w)?;
        let d: Vec<f64> = u.values().iter().zip(&h).map(|(a, b)| a - b).collect();
        Ok(discrete_l2(times, &d))
    };
    let tikhonov = |values: &[f64], mis: f64| mis * mis + epsilon * l2_sq(&nodes, values);
    let history = RefCell::new(Vec::new());
    let objective = |y: &[f64]| -> f64 {
        let values = project(y);
        let Ok(mis) = misfit(&values) else {
            return f64::INFINITY;
        };
        let j = tikhonov(&values, mis);
        let mut hist = history.borrow_mut();
        if hist.last().is_none_or(|&b| j < b) {
            hist.push(j);
        }
        // normalized so the simplex tolerance is scale-free
        j / (h_norm * h_norm)
    };
    let y0 = vec![opts.initial_value.max(ZERO_FLOOR).ln(); m];
    let best = nelder_mead(&objective, &y0, &opts.nm)?;
    let values = project(&best.x);
    let mis = misfit(&values)?;
    let obj = tikhonov(&values, mis);
    let history = history.into_inner();
    if values.iter().all(|&v| v == 0.0) {
        return Ok(WeightEstimate {
            weight: None,
            epsilon,
            misfit: mis,
            objective: obj,
            history,
            status: WeightStatus::AllZero,
        });
    }
    let status = if mis > opts.stall_tolerance * h_norm {
        WeightStatus::OptimizerStalled
    } else {
        WeightStatus::Converged
    };
    Ok(WeightEstimate {
        weight: Some(WeightFunction::new(nodes, values)?),
        epsilon,
        misfit: mis,
        objective: obj,
        history,
        status,
    })
}

/// (‖u[μ] − u[ω]‖_{L²(0,T)} at the sensor, ‖μ − ω‖_{L∞(0,1)}).
pub fn weight_distance(
    mu: &WeightFunction,
    omega: &WeightFunction,
    scenario: &Scenario,
    quad_order: usize,
) -> Result<(f64, f64)> {
    let op = |w: &WeightFunction| TimeOperator::Distributed {
        mu: w.clone(),
        quad_order,
    };
    let u = scenario.observe(&op(mu))?;
    let v = scenario.observe(&op(omega))?;
    Ok((u.l2_distance(&v)?, mu.sup_distance(omega)))
}

fn check_profile(p: &BoundaryProfile, horizon: f64) -> Result<()> {
    if !p.is_nonnegative() {
        return Err(invalid(format!(
            "boundary profile {p:?} is not nonnegative"
        )));
    }
    if p.is_zero() {
        return Ok(());
    }
    match p.compact_support() {
        Some((a, b)) if a > 0.0 && b < horizon => Ok(()),
        _ => Err(invalid(format!(
            "boundary profile {p:?} is not compactly supported in (0, {horizon})"
        ))),
    }
}

/// Sensor distance between the solutions for μ and ω driven only by
/// boundary data (zero initial data).
pub fn nonhomogeneous_distinguishability(
    mu: &WeightFunction,
    omega: &WeightFunction,
    scenario: &Scenario,
    quad_order: usize,
) -> Result<f64> {
    if scenario.a.as_slice().iter().any(|&c| c != 0.0) {
        return Err(invalid(
            "boundary-driven experiment requires zero initial data",
        ));
    }
    let horizon = scenario.grid.horizon();
    check_profile(&scenario.boundary.left, horizon)?;
    check_profile(&scenario.boundary.right, horizon)?;
    weight_distance(mu, omega, scenario, quad_order).map(|d| d.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{distributed_spectrum, operator_weights, BoundaryData};
    use crate::spectral::{EigenSystem, ModalCoefficients};

    #[test]
    fn cached_operator_matches_direct_assembly() {
        let grid = TimeGrid::graded(1.0, 40, 2.0).unwrap();
        let model = DistributedModel::new(8, &grid).unwrap();
        let mu = WeightFunction::uniform(vec![0.0, 2.0, 1.0, 0.0]).unwrap();
        let cached = model.operator(|s| mu.eval(s));
        let direct = operator_weights(&distributed_spectrum(&mu, 8).unwrap(), &grid).unwrap();
        for j in 1..=40 {
            for k in 0..j {
                let (a, b) = (cached.weight(j, k), direct.weight(j, k));
                assert!((a - b).abs() <= 1e-12 * b.abs(), "{j} {k}");
            }
        }
    }

    #[test]
    fn interpolation_and_norm() {
        let nodes = [0.0, 0.5, 1.0];
        assert_eq!(interpolate(&nodes, &[0.0, 1.0, 0.0], 0.25), 0.5);
        assert_eq!(interpolate(&nodes, &[0.0, 1.0, 0.0], 1.0), 0.0);
        let w = WeightFunction::new(nodes.to_vec(), vec![1.0, 3.0, 2.0]).unwrap();
        assert!((l2_sq(&nodes, &[1.0, 3.0, 2.0]) - w.l2_norm_sq()).abs() < 1e-15);
    }

    #[test]
    fn zero_data_gives_all_zero_status() {
        let eig = EigenSystem::interval(1.0, 4).unwrap();
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let sc = Scenario::interior(eig, ModalCoefficients::zeros(4), g.clone(), 0.5).unwrap();
        let h = ObservationSeries::new(0.5, g.times().to_vec(), vec![0.0; 17]).unwrap();
        let e = recover_weight(&h, &sc, 6, 1e-6, &Default::default()).unwrap();
        assert_eq!(e.status, WeightStatus::AllZero);
        assert!(e.weight.is_none());
        assert_eq!(e.to_csv(), "node,value\n");
    }

    #[test]
    fn node_cap_is_enforced() {
        let eig = EigenSystem::interval(1.0, 2).unwrap();
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        let sc = Scenario::interior(eig, ModalCoefficients::unit(2, 1), g.clone(), 0.5).unwrap();
        let h = ObservationSeries::new(0.5, g.times().to_vec(), vec![1.0; 5]).unwrap();
        assert!(recover_weight(&h, &sc, 17, 0.0, &Default::default()).is_err());
        assert!(recover_weight(&h, &sc, 6, -1.0, &Default::default()).is_err());
    }

    #[test]
    fn boundary_preconditions() {
        let eig = EigenSystem::interval(1.0, 4).unwrap();
        let g = TimeGrid::uniform(1.0, 16).unwrap();
        let mu = WeightFunction::uniform(vec![1.0, 1.0]).unwrap();
        let bad = BoundaryData::new(BoundaryProfile::Constant(1.0), BoundaryProfile::Zero).unwrap();
        let sc = Scenario::new(
            eig.clone(),
            ModalCoefficients::zeros(4),
            bad,
            g.clone(),
            0.5,
        )
        .unwrap();
        assert!(nonhomogeneous_distinguishability(&mu, &mu, &sc, 8).is_err());
        let neg = BoundaryData::new(
            BoundaryProfile::Bump {
                start: 0.2,
                end: 0.4,
                height: -1.0,
            },
            BoundaryProfile::Zero,
        )
        .unwrap();
        let sc = Scenario::new(eig, ModalCoefficients::zeros(4), neg, g, 0.5).unwrap();
        assert!(nonhomogeneous_distinguishability(&mu, &mu, &sc, 8).is_err());
    }
}
