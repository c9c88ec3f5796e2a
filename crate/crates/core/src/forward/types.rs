use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::spectral::EigenSystem;

/// Orders 1 > α_1 > … > α_ℓ > 0 with positive weights p_j.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSpectrum {
    alphas: Vec<f64>,
    weights: Vec<f64>,
}

impl OrderSpectrum {
    pub fn new(alphas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(invalid("an order spectrum needs at least one term"));
        }
        if alphas.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: alphas.len(),
                got: weights.len(),
            });
        }
        if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a < 1.0)) {
            return Err(invalid(format!("orders must lie in (0, 1), got {a}")));
        }
        if alphas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(invalid(format!(
                "orders must be strictly decreasing, got {alphas:?}"
            )));
        }
        if let Some(p) = weights.iter().find(|p| !(**p > 0.0 && p.is_finite())) {
            return Err(invalid(format!("order weights must be positive, got {p}")));
        }
        Ok(Self { alphas, weights })
    }

    /// Single term ∂_t^α with unit weight.
    pub fn single(alpha: f64) -> Result<Self> {
        Self::new(vec![alpha], vec![1.0])
    }

    pub fn ell(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.alphas
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }
}

impl fmt::Display for OrderSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "alphas={:?} p={:?}", self.alphas, self.weights)
    }
}

/// Continuous piecewise-linear weight μ ≥ 0, μ ≢ 0 on [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl WeightFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(invalid("a weight function needs at least two nodes"));
        }
        if nodes.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: nodes.len(),
                got: values.len(),
            });
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(invalid("weight nodes must start at 0 and end at 1"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("weight nodes must be strictly increasing"));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
            return Err(invalid(format!(
                "weight values must be finite and >= 0, got {v}"
            )));
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(invalid("weight function vanishes identically"));
        }
        Ok(Self { nodes, values })
    }

    /// `values` at the uniform nodes k/(M−1), k = 0..M−1.
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        let m = values.len();
        if m < 2 {
            return Err(invalid("a weight function needs at least two nodes"));
        }
        let nodes = (0..m).map(|k| k as f64 / (m - 1) as f64).collect();
        Self::new(nodes, values)
    }

    /// Samples `f` on `m` uniform nodes.
    pub fn sampled<F: Fn(f64) -> f64>(m: usize, f: F) -> Result<Self> {
        let values = (0..m)
            .map(|k| f(k as f64 / (m - 1).max(1) as f64))
            .collect();
        Self::uniform(values)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.nodes.clone(),
            self.values.iter().map(|v| v * c).collect(),
        )
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        if alpha <= 0.0 {
            return self.values[0];
        }
        if alpha >= 1.0 {
            return *self.values.last().unwrap();
        }
        let i = self.nodes.partition_point(|&s| s <= alpha).max(1) - 1;
        let (s0, s1) = (self.nodes[i], self.nodes[i + 1]);
        let w = (alpha - s0) / (s1 - s0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// ∫_0^1 μ.
    pub fn mass(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(s, v)| 0.5 * (s[1] - s[0]) * (v[0] + v[1]))
            .sum()
    }

    /// ∫_0^1 μ², exact for the piecewise-linear interpolant.
    pub fn l2_norm_sq(&self) -> f64 {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(s, v)| (s[1] - s[0]) * (v[0] * v[0] + v[0] * v[1] + v[1] * v[1]) / 3.0)
            .sum()
    }

    /// sup |μ − ω| over [0, 1]; exact because the difference is piecewise
    /// linear on the union of both node sets.
    pub fn sup_distance(&self, other: &WeightFunction) -> f64 {
        self.nodes
            .iter()
            .chain(other.nodes.iter())
            .map(|&s| (self.eval(s) - other.eval(s)).abs())
            .fold(0.0, f64::max)
    }
}

/// How the nodes of a [`TimeGrid`] are distributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grading {
    Uniform,
    /// t_j = T (j/K)^r
    Graded(f64),
    Custom,
}

/// Strictly increasing time nodes 0 = t_0 < … < t_K = T.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    times: Vec<f64>,
    grading: Grading,
}

impl TimeGrid {
    pub fn uniform(horizon: f64, steps: usize) -> Result<Self> {
        Self::graded(horizon, steps, 1.0).map(|mut g| {
            g.grading = Grading::Uniform;
            g
        })
    }

    /// t_j = T (j/K)^r, clustered toward t = 0 for r > 1.
    pub fn graded(horizon: f64, steps: usize, exponent: f64) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(invalid(format!("horizon must be positive, got {horizon}")));
        }
        if steps == 0 {
            return Err(invalid("a time grid needs at least one step"));
        }
        if !(exponent >= 1.0 && exponent.is_finite()) {
            return Err(invalid(format!(
                "grading exponent must be >= 1, got {exponent}"
            )));
        }
        let k = steps as f64;
        let mut times: Vec<f64> = (0..=steps)
            .map(|j| horizon * (j as f64 / k).powf(exponent))
            .collect();
        times[steps] = horizon;
        let grading = if exponent == 1.0 {
            Grading::Uniform
        } else {
            Grading::Graded(exponent)
        };
        Self::check(&times)?;
        Ok(Self { times, grading })
    }

    pub fn from_times(times: Vec<f64>) -> Result<Self> {
        Self::check(&times)?;
        Ok(Self {
            times,
            grading: Grading::Custom,
        })
    }

    /// 0 followed by `per_decade` log-spaced points per decade on [t_min, T].
    pub fn log_spaced(t_min: f64, horizon: f64, per_decade: usize) -> Result<Self> {
        if !(t_min > 0.0 && horizon > t_min) {
            return Err(invalid("log-spaced grid needs 0 < t_min < T"));
        }
        let decades = (horizon / t_min).log10();
        let n = ((decades * per_decade as f64).ceil() as usize).max(1);
        let mut times = vec![0.0];
        times.extend((0..=n).map(|i| t_min * 10f64.powf(decades * i as f64 / n as f64)));
        *times.last_mut().unwrap() = horizon;
        Self::from_times(times)
    }

    fn check(times: &[f64]) -> Result<()> {
        if times.len() < 2 {
            return Err(invalid("a time grid needs at least two nodes"));
        }
        if times[0] != 0.0 {
            return Err(invalid("time grids start at t = 0"));
        }
        if times
            .windows(2)
            .any(|w| !(w[1] > w[0]) || !w[1].is_finite())
        {
            return Err(invalid("time nodes must be strictly increasing and finite"));
        }
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn is_uniform(&self) -> bool {
        self.grading == Grading::Uniform
    }

    /// Every `factor`-th node, which is again a grid of the same kind.
    pub fn coarsened(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(invalid(format!(
                "cannot coarsen {} steps by {factor}",
                self.steps()
            )));
        }
        Ok(Self {
            times: self.times.iter().step_by(factor).copied().collect(),
            grading: self.grading,
        })
    }
}

/// Time profile of one Dirichlet boundary value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum BoundaryProfile {
    #[default]
    Zero,
    Constant(f64),
    /// C^∞ bump of the given height supported on (start, end).
    Bump {
        start: f64,
        end: f64,
        height: f64,
    },
}

impl BoundaryProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            BoundaryProfile::Zero => 0.0,
            BoundaryProfile::Constant(c) => c,
            BoundaryProfile::Bump { start, end, height } => {
                if t <= start || t >= end {
                    return 0.0;
                }
                let s = (2.0 * t - (start + end)) / (end - start);
                height * (1.0 - 1.0 / (1.0 - s * s)).exp()
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            BoundaryProfile::Zero => true,
            BoundaryProfile::Constant(c) => c == 0.0,
            BoundaryProfile::Bump { height, .. } => height == 0.0,
        }
    }

    /// Support interval when it is compact inside (0, ∞).
    pub fn compact_support(&self) -> Option<(f64, f64)> {
        match *self {
            BoundaryProfile::Bump { start, end, .. } if start > 0.0 => Some((start, end)),
            _ => None,
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        match *self {
            BoundaryProfile::Zero => true,
            BoundaryProfile::Constant(c) => c >= 0.0,
            BoundaryProfile::Bump { height, .. } => height >= 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            BoundaryProfile::Zero => Ok(()),
            BoundaryProfile::Constant(c) if c.is_finite() => Ok(()),
            BoundaryProfile::Bump { start, end, height }
                if start >= 0.0 && end > start && height.is_finite() =>
            {
                Ok(())
            }
            other => Err(invalid(format!("invalid boundary profile {other:?}"))),
        }
    }
}

/// Dirichlet data g(0, t) and g(L, t).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundaryData {
    pub left: BoundaryProfile,
    pub right: BoundaryProfile,
}

impl BoundaryData {
    pub fn new(left: BoundaryProfile, right: BoundaryProfile) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        Ok(Self { left, right })
    }

    pub fn homogeneous() -> Self {
        Self::default()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }
}

/// Lift values g(0, t_j), g(L, t_j) on the solver grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftSamples {
    pub left: Vec<f64>,
    pub right: Vec<f64>,
}

impl LiftSamples {
    /// w(x, t_j) = g_left(t_j)(1 − x/L) + g_right(t_j) x/L.
    pub fn value(&self, length: f64, x: f64, j: usize) -> f64 {
        let s = x / length;
        self.left[j] * (1.0 - s) + self.right[j] * s
    }
}

/// Space-time solution values u(x_i, t_j) with the modal trajectories
/// that produced them.
#[derive(Debug, Clone)]
pub struct SolutionField {
    xs: Vec<f64>,
    grid: TimeGrid,
    /// u(x_i, t_j) stored at `j * xs.len() + i`.
    values: Vec<f64>,
    /// modal[n][j] = coefficient of φ_{n+1} at t_j (homogeneous part).
    modal: Vec<Vec<f64>>,
    eig: EigenSystem,
    lift: Option<LiftSamples>,
    provenance: String,
}

impl SolutionField {
    pub(crate) fn assemble(
        eig: &EigenSystem,
        grid: &TimeGrid,
        xs: &[f64],
        modal: Vec<Vec<f64>>,
        lift: Option<LiftSamples>,
        provenance: String,
    ) -> Self {
        let nx = xs.len();
        let nt = grid.times().len();
        let mut values = vec![0.0; nx * nt];
        if nx > 0 {
            let phis: Vec<Vec<f64>> = xs.iter().map(|&x| eig.phi_all(x)).collect();
            for j in 0..nt {
                for (i, phi) in phis.iter().enumerate() {
                    let mut u: f64 = modal.iter().zip(phi).map(|(c, p)| c[j] * p).sum();
                    if let Some(l) = &lift {
                        u += l.value(eig.length(), xs[i], j);
                    }
                    values[j * nx + i] = u;
                }
            }
        }
        Self {
            xs: xs.to_vec(),
            grid: grid.clone(),
            values,
            modal,
            eig: eig.clone(),
            lift,
            provenance,
        }
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn eigensystem(&self) -> &EigenSystem {
        &self.eig
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// u(x_i, t_j).
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.xs.len() + i]
    }

    /// All x values at time index j.
    pub fn row(&self, j: usize) -> &[f64] {
        let nx = self.xs.len();
        &self.values[j * nx..(j + 1) * nx]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn modal(&self) -> &[Vec<f64>] {
        &self.modal
    }

    pub fn lift(&self) -> Option<&LiftSamples> {
        self.lift.as_ref()
    }

    /// u(x, t_j) by modal synthesis at an arbitrary point.
    pub fn synthesize_at(&self, x: f64, j: usize) -> f64 {
        let mut u: f64 = self
            .modal
            .iter()
            .enumerate()
            .map(|(n, c)| c[j] * self.eig.phi(n + 1, x))
            .sum();
        if let Some(l) = &self.lift {
            u += l.value(self.eig.length(), x, j);
        }
        u
    }
}

/// Single-point time series h_j = u(x0, t_j).
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationSeries {
    x0: f64,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ObservationSeries {
    /// Times must be nonnegative and strictly increasing; a sample at t = 0
    /// is allowed and carries the initial value.
    pub fn new(x0: f64, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(invalid(format!(
                "sensor location must be interior, got {x0}"
            )));
        }
        if times.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: times.len(),
                got: values.len(),
            });
        }
        if times.is_empty() {
            return Err(invalid("empty observation series"));
        }
        if times[0] < 0.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid(
                "observation times must be >= 0 and strictly increasing",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("observation values must be finite"));
        }
        Ok(Self { x0, times, values })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.x0, self.times.clone(), values)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            x0: self.x0,
            times: self.times.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// Samples with t_j > 0 only.
    pub fn positive_times(&self) -> (Vec<f64>, Vec<f64>) {
        self.times
            .iter()
            .zip(&self.values)
            .filter(|(t, _)| **t > 0.0)
            .map(|(t, v)| (*t, *v))
            .unzip()
    }

    /// Discrete L²(0, T) norm (trapezoid rule over the sample times).
    pub fn l2_norm(&self) -> f64 {
        discrete_l2(&self.times, &self.values)
    }

    /// Discrete L²(0, T) distance to a series on the same times.
    pub fn l2_distance(&self, other: &ObservationSeries) -> Result<f64> {
        if self.times != other.times {
            return Err(invalid("series are sampled on different times"));
        }
        let diff: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(discrete_l2(&self.times, &diff))
    }
}

/// Trapezoid-rule L² norm of samples `v` at `t`.
pub fn discrete_l2(t: &[f64], v: &[f64]) -> f64 {
    discrete_l2_sq(t, v).sqrt()
}

pub fn discrete_l2_sq(t: &[f64], v: &[f64]) -> f64 {
    if t.len() < 2 {
        return v.iter().map(|x| x * x).sum();
    }
    t.windows(2)
        .zip(v.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] * v[0] + v[1] * v[1]))
        .sum()
}
