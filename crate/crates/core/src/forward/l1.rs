//! L1 discretization of the Caputo derivative and implicit modal stepping.
//!
//! On nodes t_0 < … < t_K the Caputo derivative of a piecewise-linear
//! interpolant is
//!
//!   ∂_t^α v(t_j) ≈ Σ_{k<j} b_{j,k} (v_{k+1} − v_k),
//!   b_{j,k} = [(t_j − t_k)^{1−α} − (t_j − t_{k+1})^{1−α}] / (Γ(2−α) (t_{k+1} − t_k)),
//!
//! which on a uniform grid depends on j − k only.

use crate::error::{domain, Error, Result};
use crate::forward::types::{OrderSpectrum, TimeGrid};

#[derive(Debug, Clone, PartialEq)]
enum Layout {
    /// b_{j,k} = coeffs[j − 1 − k]
    Toeplitz(Vec<f64>),
    /// b_{j,k} = rows[j − 1][k]
    Triangular(Vec<Vec<f64>>),
}

/// Convolution weights of a (possibly multi-term) L1 Caputo operator.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Weights {
    layout: Layout,
    steps: usize,
}

/// L1 weights of ∂_t^α on `grid`.
pub fn caputo_l1_weights(alpha: f64, grid: &TimeGrid) -> Result<L1Weights> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(domain(format!(
            "Caputo order must lie in (0, 1), got {alpha}"
        )));
    }
    let t = grid.times();
    let steps = grid.steps();
    let e = 1.0 - alpha;
    let c = 1.0 / libm::tgamma(2.0 - alpha);
    let layout = if grid.is_uniform() {
        let tau = t[1] - t[0];
        let scale = c * tau.powf(-alpha);
        let mut prev = 0.0f64;
        let coeffs = (0..steps)
            .map(|m| {
                let next = ((m + 1) as f64).powf(e);
                let w = scale * (next - prev);
                prev = next;
                w
            })
            .collect();
        Layout::Toeplitz(coeffs)
    } else {
        let rows = (1..=steps)
            .map(|j| {
                let tj = t[j];
                (0..j)
                    .map(|k| {
                        let h = t[k + 1] - t[k];
                        c * ((tj - t[k]).powf(e) - (tj - t[k + 1]).powf(e)) / h
                    })
                    .collect()
            })
            .collect();
        Layout::Triangular(rows)
    };
    Ok(L1Weights { layout, steps })
}

/// Weights of Σ_j p_j ∂_t^{α_j} on `grid`.
pub fn operator_weights(spectrum: &OrderSpectrum, grid: &TimeGrid) -> Result<L1Weights> {
    let mut terms = spectrum.terms();
    let (a0, p0) = terms.next().expect("spectrum has at least one term");
    let mut total = caputo_l1_weights(a0, grid)?.scaled(p0);
    for (a, p) in terms {
        total.add_scaled(p, &caputo_l1_weights(a, grid)?);
    }
    Ok(total)
}

impl L1Weights {
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// b_{j,k} for 0 ≤ k < j ≤ K.
    pub fn weight(&self, j: usize, k: usize) -> f64 {
        assert!(
            k < j && j <= self.steps,
            "weight index ({j},{k}) out of range"
        );
        match &self.layout {
            Layout::Toeplitz(c) => c[j - 1 - k],
            Layout::Triangular(rows) => rows[j - 1][k],
        }
    }

    /// Discrete Caputo derivative of the samples `v` at t_j.
    pub fn apply(&self, j: usize, v: &[f64]) -> f64 {
        (0..j).map(|k| self.weight(j, k) * (v[k + 1] - v[k])).sum()
    }

    pub fn scaled(mut self, p: f64) -> Self {
        match &mut self.layout {
            Layout::Toeplitz(c) => c.iter_mut().for_each(|w| *w *= p),
            Layout::Triangular(rows) => rows.iter_mut().flatten().for_each(|w| *w *= p),
        }
        self
    }

    /// self += p · other (same grid).
    pub fn add_scaled(&mut self, p: f64, other: &L1Weights) {
        assert_eq!(self.steps, other.steps, "weights from different grids");
        match (&mut self.layout, &other.layout) {
            (Layout::Toeplitz(a), Layout::Toeplitz(b)) => {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += p * y)
            }
            (Layout::Triangular(a), Layout::Triangular(b)) => a
                .iter_mut()
                .flatten()
                .zip(b.iter().flatten())
                .for_each(|(x, y)| *x += p * y),
            _ => panic!("weights from different grid layouts"),
        }
    }
}

/// Implicit L1 march for D u = −λ u + f, u(0) = a, where D is the operator
/// encoded by `weights`. `source`, when present, holds f(t_j) for j = 0..=K.
pub fn march(weights: &L1Weights, lambda: f64, a: f64, source: Option<&[f64]>) -> Result<Vec<f64>> {
    let k_steps = weights.steps;
    if let Some(f) = source {
        if f.len() != k_steps + 1 {
            return Err(Error::LengthMismatch {
                expected: k_steps + 1,
                got: f.len(),
            });
        }
    }
    let mut u = Vec::with_capacity(k_steps + 1);
    u.push(a);
    let mut du: Vec<f64> = Vec::with_capacity(k_steps);
    for j in 1..=k_steps {
        let (diag, history) = match &weights.layout {
            Layout::Toeplitz(c) => {
                let h: f64 = du
                    .iter()
                    .zip(c[1..j].iter().rev())
                    .map(|(d, w)| d * w)
                    .sum();
                (c[0], h)
            }
            Layout::Triangular(rows) => {
                let row = &rows[j - 1];
                let h: f64 = du.iter().zip(&row[..j - 1]).map(|(d, w)| d * w).sum();
                (row[j - 1], h)
            }
        };
        let denom = diag + lambda;
        if !(denom > 0.0) || !denom.is_finite() {
            return Err(Error::SingularStep(format!(
                "implicit coefficient {denom} at step {j}"
            )));
        }
        let f = source.map_or(0.0, |f| f[j]);
        let prev = u[j - 1];
        let next = (diag * prev - history + f) / denom;
        du.push(next - prev);
        u.push(next);
    }
    Ok(u)
}

/// Per-mode trajectory of Σ p_j ∂^{α_j} u = −λ u + f with u(0) = a.
pub fn step_modal_multiterm(
    spectrum: &OrderSpectrum,
    lambda: f64,
    a: f64,
    grid: &TimeGrid,
    source: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if !(lambda >= 0.0) {
        return Err(domain(format!("decay rate must be >= 0, got {lambda}")));
    }
    march(&operator_weights(spectrum, grid)?, lambda, a, source)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mittag_leffler::ml_relax;

    #[test]
    fn single_step_weight() {
        let tau = 0.3;
        let g = TimeGrid::uniform(tau, 1).unwrap();
        for &alpha in &[0.2, 0.5, 0.9] {
            let w = caputo_l1_weights(alpha, &g).unwrap();
            let want = tau.powf(-alpha) / libm::tgamma(2.0 - alpha);
            assert!((w.weight(1, 0) - want).abs() < 1e-14 * want);
        }
    }

    #[test]
    fn exact_for_linear_functions() {
        // ∂^α t = t^{1−α}/Γ(2−α) on any grid
        let grids = [
            TimeGrid::uniform(2.0, 17).unwrap(),
            TimeGrid::graded(2.0, 17, 2.5).unwrap(),
            TimeGrid::from_times(vec![0.0, 0.1, 0.15, 0.7, 1.0, 1.9]).unwrap(),
        ];
        for g in &grids {
            for &alpha in &[0.1, 0.5, 0.85] {
                let w = caputo_l1_weights(alpha, g).unwrap();
                let v = g.times().to_vec();
                for j in 1..=g.steps() {
                    let tj = g.times()[j];
                    let want = tj.powf(1.0 - alpha) / libm::tgamma(2.0 - alpha);
                    assert!((w.apply(j, &v) - want).abs() < 1e-12 * want.max(1.0));
                }
            }
        }
    }

    #[test]
    fn near_unit_order_concentrates_on_last_increment() {
        let g = TimeGrid::uniform(1.0, 50).unwrap();
        let w = caputo_l1_weights(0.999, &g).unwrap();
        let j = 50;
        let last = w.weight(j, j - 1);
        let rest: f64 = (0..j - 1).map(|k| w.weight(j, k)).sum();
        // backward difference weight is 1/τ
        assert!((last * 0.02 - 1.0).abs() < 0.01);
        assert!(rest < 0.01 * last);
        // and the weights decrease away from the diagonal
        assert!((1..j).all(|k| w.weight(j, k) > w.weight(j, k - 1)));
    }

    #[test]
    fn rejects_invalid_orders() {
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        assert!(caputo_l1_weights(0.0, &g).is_err());
        assert!(caputo_l1_weights(1.0, &g).is_err());
    }

    #[test]
    fn zero_rate_keeps_initial_value() {
        let s = OrderSpectrum::new(vec![0.7, 0.2], vec![1.0, 3.0]).unwrap();
        let g = TimeGrid::graded(1.0, 64, 2.0).unwrap();
        let u = step_modal_multiterm(&s, 0.0, 1.7, &g, None).unwrap();
        assert!(u.iter().all(|&v| (v - 1.7).abs() < 1e-14));
    }

    #[test]
    fn single_term_converges_to_relaxation() {
        let s = OrderSpectrum::single(0.6).unwrap();
        let lambda = 2.0;
        let exact = ml_relax(0.6, lambda, 1.0).unwrap();
        let errs: Vec<f64> = [64, 128, 256]
            .iter()
            .map(|&k| {
                let g = TimeGrid::uniform(1.0, k).unwrap();
                let u = step_modal_multiterm(&s, lambda, 1.0, &g, None).unwrap();
                (u[k] - exact).abs()
            })
            .collect();
        assert!(errs[0] > errs[1] && errs[1] > errs[2], "{errs:?}");
        assert!(errs[2] < 1e-3);
    }

    #[test]
    fn two_term_trajectory_positive_and_decreasing() {
        let s = OrderSpectrum::new(vec![0.8, 0.4], vec![1.0, 1.0]).unwrap();
        let g = TimeGrid::graded(2.0, 400, 2.5).unwrap();
        let u = step_modal_multiterm(&s, 5.0, 1.0, &g, None).unwrap();
        assert!(u.iter().all(|&v| v > 0.0));
        assert!(u.windows(2).all(|w| w[1] < w[0]));
        // self-convergence against a 4x finer run at T
        let fine = TimeGrid::graded(2.0, 1600, 2.5).unwrap();
        let uf = step_modal_multiterm(&s, 5.0, 1.0, &fine, None).unwrap();
        assert!((u[400] - uf[1600]).abs() < 2e-3 * uf[1600]);
    }

    #[test]
    fn source_length_is_checked() {
        let s = OrderSpectrum::single(0.5).unwrap();
        let g = TimeGrid::uniform(1.0, 4).unwrap();
        let err = step_modal_multiterm(&s, 1.0, 1.0, &g, Some(&[0.0; 3])).unwrap_err();
        assert!(matches!(
            err,
            Error::LengthMismatch {
                expected: 5,
                got: 3
            }
        ));
    }

    #[test]
    fn uniform_and_general_layouts_agree() {
        let s = OrderSpectrum::new(vec![0.9, 0.3], vec![0.5, 2.0]).unwrap();
        let g = TimeGrid::uniform(1.0, 40).unwrap();
        let custom = TimeGrid::from_times(g.times().to_vec()).unwrap();
        let a = step_modal_multiterm(&s, 3.0, 1.0, &g, None).unwrap();
        let b = step_modal_multiterm(&s, 3.0, 1.0, &custom, None).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-13);
        }
    }
}
