//! Dirichlet eigensystem of −d²/dx² on (0, L) and modal projection/synthesis.

use std::f64::consts::PI;

use crate::error::{domain, invalid, Error, Result};
use crate::quadrature::CompositeRule;

/// Number of Gauss–Legendre panels used by [`EigenSystem::project`].
pub const PROJECTION_PANELS: usize = 8;

/// The interval (0, L) with homogeneous Dirichlet conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    length: f64,
}

impl DomainSpec {
    pub fn new(length: f64) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid(format!(
                "domain length must be positive, got {length}"
            )));
        }
        Ok(Self { length })
    }

    /// Only one-dimensional domains are supported.
    pub fn with_dimension(dimension: usize, length: f64) -> Result<Self> {
        if dimension != 1 {
            return Err(invalid(format!(
                "only the interval (d = 1) is supported, got d = {dimension}"
            )));
        }
        Self::new(length)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// True for points strictly inside (0, L).
    pub fn contains_interior(&self, x: f64) -> bool {
        x > 0.0 && x < self.length
    }
}

/// Modal coefficients a_n = (a, φ_n), n = 1..N, stored zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalCoefficients(Vec<f64>);

impl ModalCoefficients {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(invalid(format!(
                "modal coefficient {} is not finite",
                i + 1
            )));
        }
        Ok(Self(values))
    }

    pub fn zeros(count: usize) -> Self {
        Self(vec![0.0; count])
    }

    /// The coefficient vector of φ_mode (mode is one-based).
    pub fn unit(count: usize, mode: usize) -> Self {
        assert!(
            mode >= 1 && mode <= count,
            "mode {mode} outside 1..={count}"
        );
        let mut v = vec![0.0; count];
        v[mode - 1] = 1.0;
        Self(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self(self.0.iter().map(|v| v * factor).collect())
    }

    /// Zero-pads or truncates to `count` modes.
    pub fn resized(&self, count: usize) -> Self {
        let mut v = self.0.clone();
        v.resize(count, 0.0);
        Self(v)
    }
}

/// Eigenpairs λ_n = (nπ/L)², φ_n(x) = √(2/L) sin(nπx/L), n = 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    domain: DomainSpec,
    eigenvalues: Vec<f64>,
}

impl EigenSystem {
    pub fn new(domain: DomainSpec, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(invalid("an eigensystem needs at least one mode"));
        }
        let l = domain.length();
        let eigenvalues = (1..=count)
            .map(|n| {
                let k = n as f64 * PI / l;
                k * k
            })
            .collect();
        Ok(Self {
            domain,
            eigenvalues,
        })
    }

    /// Eigensystem of the interval (0, `length`) truncated to `count` modes.
    pub fn interval(length: f64, count: usize) -> Result<Self> {
        Self::new(DomainSpec::new(length)?, count)
    }

    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn length(&self) -> f64 {
        self.domain.length()
    }

    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// φ_mode(x), one-based mode index.
    pub fn phi(&self, mode: usize, x: f64) -> f64 {
        let l = self.length();
        (2.0 / l).sqrt() * (mode as f64 * PI * x / l).sin()
    }

    /// φ_1(x), …, φ_N(x) at one point.
    pub fn phi_all(&self, x: f64) -> Vec<f64> {
        (1..=self.count()).map(|n| self.phi(n, x)).collect()
    }

    /// λ_n^{γ/2}, the symbol of (−Δ)^{γ/2}. γ = 2 returns λ_n itself.
    pub fn fractional_eigenvalues(&self, gamma: f64) -> Result<Vec<f64>> {
        if !(gamma > 0.0 && gamma <= 2.0) {
            return Err(domain(format!(
                "space order must lie in (0, 2], got {gamma}"
            )));
        }
        if gamma == 2.0 {
            return Ok(self.eigenvalues.clone());
        }
        Ok(self
            .eigenvalues
            .iter()
            .map(|l| l.powf(0.5 * gamma))
            .collect())
    }

    /// a_n ≈ ∫_0^L f φ_n dx by composite Gauss–Legendre with `quad_points`
    /// total nodes (8 panels of degree max(16, quad_points/8)).
    pub fn project<F: Fn(f64) -> f64>(&self, f: F, quad_points: usize) -> ModalCoefficients {
        if quad_points < 4 * self.count() {
            log::warn!(
                "projection with {quad_points} quadrature points aliases {} modes; use at least {}",
                self.count(),
                4 * self.count()
            );
        }
        let degree = (quad_points / PROJECTION_PANELS).max(16);
        let rule = CompositeRule::new(0.0, self.length(), PROJECTION_PANELS, degree);
        let samples: Vec<(f64, f64)> = rule
            .points
            .iter()
            .zip(&rule.weights)
            .map(|(&x, &w)| (x, w * f(x)))
            .collect();
        let coeffs = (1..=self.count())
            .map(|n| samples.iter().map(|&(x, wf)| wf * self.phi(n, x)).sum())
            .collect();
        ModalCoefficients(coeffs)
    }

    /// Σ_n a_n φ_n(x) at one point, summed in mode order.
    pub fn synthesize_at(&self, coeffs: &[f64], x: f64) -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, a)| a * self.phi(i + 1, x))
            .sum()
    }

    pub fn synthesize(&self, coeffs: &ModalCoefficients, xs: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.count() {
            return Err(Error::LengthMismatch {
                expected: self.count(),
                got: coeffs.len(),
            });
        }
        Ok(xs
            .iter()
            .map(|&x| self.synthesize_at(coeffs.as_slice(), x))
            .collect())
    }
}

/// `count` equispaced points covering [0, L] including both ends.
pub fn uniform_points(length: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * length],
        _ => (0..count)
            .map(|i| length * i as f64 / (count - 1) as f64)
            .collect(),
    }
}
