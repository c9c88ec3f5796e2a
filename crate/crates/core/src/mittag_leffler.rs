//! Mittag-Leffler function E_{α,β}(z) on the closed negative real axis.
//!
//! Three evaluation branches are combined:
//!
//! - the power series Σ z^k / Γ(αk + β), used for |z| ≤ [`TAYLOR_LIMIT`]
//!   whenever no partial term exceeds [`TAYLOR_MAX_TERM`] (bounded
//!   cancellation);
//! - the large-argument expansion −Σ_{k≥1} z^{-k} / Γ(β − αk), plus the
//!   exponential pole contributions when α ≥ 1, used for
//!   |z| ≥ [`ASYMPTOTIC_LIMIT`] once its smallest term certifies the tolerance;
//! - the Hankel-contour integral collapsed onto the branch cut, which is a
//!   real integral over (0, ∞) with an exponentially damped integrand, used
//!   in between and as the fallback of both other branches.
//!
//! All branches are real arithmetic. Complex arguments are not supported.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature;

/// Upper end of the band served by the power series.
pub const TAYLOR_LIMIT: f64 = 5.0;
/// Lower end of the band served by the large-argument expansion.
pub const ASYMPTOTIC_LIMIT: f64 = 50.0;
/// Largest partial-sum term tolerated by the power series.
pub const TAYLOR_MAX_TERM: f64 = 1e2;

const TAYLOR_MAX_ITER: usize = 200_000;
const SERIES_EPS: f64 = 1e-18;
const ASYMPTOTIC_CERT: f64 = 1e-15;
const INTEGRAL_ABS_TOL: f64 = 1e-15;
const INTEGRAL_UPPER: f64 = 64.0;

/// Parameters (α, β) of the two-parameter Mittag-Leffler function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    alpha: f64,
    beta: f64,
}

impl MLParams {
    /// Accepts 0 < α ≤ 2 and β > 0.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(domain(format!("alpha must lie in (0, 2], got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Reciprocal gamma function, zero at the poles of Γ.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x > 0.0 {
        if x < 170.0 {
            1.0 / libm::tgamma(x)
        } else {
            (-libm::lgamma(x)).exp()
        }
    } else if x > -170.0 {
        1.0 / libm::tgamma(x)
    } else {
        // 1/Γ(x) = Γ(1 - x) sin(πx) / π
        libm::lgamma(1.0 - x).exp() * sin_pi(x) / PI
    }
}

/// sin(πx) with exact zeros at the integers.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).floor();
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    (PI * r).sin()
}

fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// Evaluates E_{α,β}(z) for real z ≤ 0.
pub fn ml_eval(params: MLParams, z: f64) -> Result<f64> {
    if !(z <= 0.0) || !z.is_finite() {
        return Err(domain(format!("argument must be finite and <= 0, got {z}")));
    }
    let MLParams { alpha, beta } = params;
    let x = -z;
    if x == 0.0 {
        return Ok(rgamma(beta));
    }
    if x <= TAYLOR_LIMIT {
        if let Some(v) = taylor(alpha, beta, z) {
            return Ok(v);
        }
    }
    if x >= ASYMPTOTIC_LIMIT {
        if let Some(v) = asymptotic(alpha, beta, z) {
            return Ok(v);
        }
    }
    if let Some(v) = integral(alpha, beta, z) {
        return Ok(v);
    }
    if let Some(v) = asymptotic(alpha, beta, z) {
        return Ok(v);
    }
    Err(Error::Accuracy(format!(
        "no branch certified E_{{{alpha},{beta}}}({z})"
    )))
}

/// Per-mode relaxation factor E_{α,1}(−λ t^α).
pub fn ml_relax(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    check_relax_args(alpha, lambda, t)?;
    if t == 0.0 || lambda == 0.0 {
        return Ok(1.0);
    }
    if alpha == 1.0 {
        return Ok((-lambda * t).exp());
    }
    ml_eval(MLParams::new(alpha, 1.0)?, -lambda * t.powf(alpha))
}

/// Time derivative of [`ml_relax`]: −λ t^{α−1} E_{α,α}(−λ t^α), for t > 0.
pub fn ml_relax_deriv(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    check_relax_args(alpha, lambda, t)?;
    if t <= 0.0 {
        return Err(domain("relaxation derivative is singular at t = 0"));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    if alpha == 1.0 {
        return Ok(-lambda * (-lambda * t).exp());
    }
    let e = ml_eval(MLParams::new(alpha, alpha)?, -lambda * t.powf(alpha))?;
    Ok(-lambda * t.powf(alpha - 1.0) * e)
}

fn check_relax_args(alpha: f64, lambda: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(domain(format!(
            "relaxation order must lie in (0, 1], got {alpha}"
        )));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(format!("decay rate must be >= 0, got {lambda}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(domain(format!("time must be >= 0, got {t}")));
    }
    Ok(())
}

/// Power series branch. `None` when cancellation cannot be bounded.
pub fn taylor(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let x = z.abs();
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..TAYLOR_MAX_ITER {
        let arg = k as f64 * alpha + beta;
        let mag = if k == 0 {
            rgamma(beta)
        } else if arg < 150.0 && k < 300 {
            x.powi(k as i32) * rgamma(arg)
        } else {
            (k as f64 * ln_x - libm::lgamma(arg)).exp()
        };
        if !mag.is_finite() || mag > TAYLOR_MAX_TERM {
            return None;
        }
        let term = if z < 0.0 && k % 2 == 1 { -mag } else { mag };
        neumaier_add(&mut sum, &mut comp, term);
        // Γ is increasing past ~1.46, so once terms shrink they keep shrinking.
        if k > 0 && mag <= prev && arg > 2.0 && mag < SERIES_EPS {
            return Some(sum + comp);
        }
        prev = mag;
    }
    None
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, term: f64) {
    let t = *sum + term;
    if sum.abs() >= term.abs() {
        *comp += (*sum - t) + term;
    } else {
        *comp += (term - t) + *sum;
    }
    *sum = t;
}

/// Large-argument branch: −Σ z^{−k}/Γ(β−αk) plus pole contributions for α ≥ 1.
///
/// `None` unless the smallest term of the divergent tail drops below the
/// certification level. For α = 1 only integer β are supported, where the
/// series terminates.
pub fn asymptotic(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let x = z.abs();
    if x == 0.0 {
        return None;
    }
    let mut residue = 0.0;
    if alpha >= 1.0 {
        if alpha == 1.0 {
            if beta != beta.floor() {
                return None;
            }
            // Simple pole at s = z on the real axis; (−x)^{1−β} is real here.
            let m = 1 - beta as i64;
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            residue = sign * x.powf(m as f64) * (-x).exp();
        } else {
            residue = pole_contribution(alpha, beta, x);
        }
    }
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut prev = f64::INFINITY;
    let mut zero_run = 0;
    for k in 1..10_000usize {
        let arg = beta - alpha * k as f64;
        let rg = rgamma(arg);
        if rg == 0.0 {
            zero_run += 1;
            // α = 1 with integer β: every remaining term vanishes.
            if alpha == 1.0 && arg <= 0.0 {
                return Some(residue + sum + comp);
            }
            if zero_run > 64 {
                return Some(residue + sum + comp);
            }
            continue;
        }
        zero_run = 0;
        let mag = if arg > -150.0 {
            (-(k as f64) * ln_x).exp() * rg.abs()
        } else {
            (libm::lgamma(1.0 - arg) - k as f64 * ln_x).exp() * sin_pi(arg).abs() / PI
        };
        if mag > prev && arg < 0.0 && prev > ASYMPTOTIC_CERT {
            return None;
        }
        // z^{-k} = (−1)^k x^{-k}
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 } * rg.signum();
        neumaier_add(&mut sum, &mut comp, -sign * mag);
        if mag < ASYMPTOTIC_CERT * 1e-3 {
            return Some(residue + sum + comp);
        }
        if !mag.is_finite() {
            return None;
        }
        prev = prev.min(mag);
    }
    None
}

/// Contribution (2/α) Re[s^{1−β} e^s] of the conjugate poles s = x^{1/α} e^{±iπ/α}.
fn pole_contribution(alpha: f64, beta: f64, x: f64) -> f64 {
    let rho = x.powf(1.0 / alpha);
    let theta = PI / alpha;
    let modulus = rho.powf(1.0 - beta) * (rho * theta.cos()).exp();
    let phase = theta * (1.0 - beta) + rho * theta.sin();
    2.0 / alpha * modulus * phase.cos()
}

/// Branch-cut integral branch, valid for α ≠ 1.
///
/// For β < 1 + α,
/// E_{α,β}(−x) = (1/π) ∫_0^∞ e^{−r} r^{α−β} [r^α sin(πβ) − x sin(π(α−β))]
///               / (r^{2α} + 2x r^α cos(πα) + x²) dr,
/// plus the pole contribution when α > 1. Larger β are reduced with
/// E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z.
pub fn integral(alpha: f64, beta: f64, z: f64) -> Option<f64> {
    let x = z.abs();
    if alpha == 1.0 || x == 0.0 {
        return None;
    }
    let mut steps = 0usize;
    let mut b = beta;
    while b >= 1.0 + alpha {
        b -= alpha;
        steps += 1;
    }
    if steps > 0 && x < 0.5 {
        // the reduction divides by z
        return None;
    }
    let mut value = cut_integral(alpha, b, x)?;
    if alpha > 1.0 {
        value += pole_contribution(alpha, b, x);
    }
    for _ in 0..steps {
        value = (value - rgamma(b)) / z;
        b += alpha;
    }
    Some(value)
}

fn cut_integral(alpha: f64, beta: f64, x: f64) -> Option<f64> {
    let p = alpha - beta;
    let s_beta = sin_pi(beta);
    let s_ab = sin_pi(alpha - beta);
    let c_a = cos_pi(alpha);
    let body = |r: f64| -> f64 {
        let ra = r.powf(alpha);
        let den = ra * ra + 2.0 * x * ra * c_a + x * x;
        (-r).exp() * (ra * s_beta - x * s_ab) / den
    };

    // Near the origin, substitute r = r0 v^q so that r^{p} dr is regular.
    let mut r0 = 1.0f64;
    let mut breaks = Vec::new();
    if c_a < 0.0 {
        // Peak of 1/den where r^α = −x cos(πα).
        let peak = (-x * c_a).powf(1.0 / alpha);
        let width = (x * sin_pi(alpha).abs() / (alpha * peak.powf(alpha - 1.0))).max(1e-300);
        r0 = r0.min(0.5 * peak);
        for k in [-16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0] {
            breaks.push(peak + k * width);
        }
    }
    let q = if p < 0.0 { 1.0 / (1.0 + p) } else { 1.0 };
    let near = quadrature::adaptive(
        |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let r = r0 * v.powf(q);
            // r^p · dr/dv = r0^{1+p} q v^{q(1+p)−1}
            let jac = r0.powf(1.0 + p) * q * v.powf(q * (1.0 + p) - 1.0);
            body(r) * jac
        },
        0.0,
        1.0,
        INTEGRAL_ABS_TOL,
        0.0,
    );
    let mut pts = vec![r0];
    breaks.retain(|&b| b > r0 && b < INTEGRAL_UPPER);
    pts.extend(breaks);
    pts.push(INTEGRAL_UPPER);
    pts.dedup();
    let mut total = near.value;
    let mut err = near.error;
    for w in pts.windows(2) {
        let seg = quadrature::adaptive(
            |r: f64| body(r) * r.powf(p),
            w[0],
            w[1],
            INTEGRAL_ABS_TOL,
            0.0,
        );
        total += seg.value;
        err += seg.error;
    }
    let value = total / PI;
    if !value.is_finite() || err / PI > 1e-12 {
        return None;
    }
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
        ml_eval(MLParams::new(alpha, beta).unwrap(), z).unwrap()
    }

    #[test]
    fn exponential_identity() {
        assert!((ml(1.0, 1.0, -1.0) - (-1.0f64).exp()).abs() < 1e-15);
        for &x in &[0.3, 4.0, 12.0, 49.0, 80.0, 700.0] {
            assert!((ml(1.0, 1.0, -x) - (-x).exp()).abs() < 1e-14, "x={x}");
        }
        // E_{1,2}(z) = (e^z − 1)/z
        for &x in &[0.7f64, 20.0, 90.0] {
            let want = ((-x).exp() - 1.0) / -x;
            assert!((ml(1.0, 2.0, -x) - want).abs() < 1e-14, "x={x}");
        }
    }

    #[test]
    fn zero_argument_gives_reciprocal_gamma() {
        assert_eq!(ml(0.5, 1.0, 0.0), 1.0);
        assert!((ml(0.3, 2.5, 0.0) - 1.0 / libm::tgamma(2.5)).abs() < 1e-15);
    }

    #[test]
    fn erfc_identity() {
        for &x in &[0.1f64, 1.0, 2.0, 3.5, 6.0, 10.0, 25.0] {
            let want = (x * x).exp() * libm::erfc(x);
            let got = ml(0.5, 1.0, -x);
            assert!((got - want).abs() < 1e-12, "x={x}: {got} vs {want}");
        }
        assert!((ml(0.5, 1.0, -2.0) - 4f64.exp() * libm::erfc(2.0)).abs() < 1e-13);
    }

    #[test]
    fn cosine_identity() {
        let x = PI * PI / 4.0;
        assert!(ml(2.0, 1.0, -x).abs() < 1e-13);
        for &x in &[0.5f64, 3.0, 9.0, 30.0, 100.0, 1e4] {
            let got = ml(2.0, 1.0, -x);
            assert!((got - x.sqrt().cos()).abs() < 1e-11, "x={x}: {got}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(MLParams::new(0.0, 1.0).is_err());
        assert!(MLParams::new(2.5, 1.0).is_err());
        assert!(MLParams::new(0.5, 0.0).is_err());
        let p = MLParams::new(0.5, 1.0).unwrap();
        assert!(matches!(ml_eval(p, 0.1), Err(Error::Domain(_))));
        assert!(matches!(ml_eval(p, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn relax_values() {
        assert!((ml_relax(1.0, 2.0, 1.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
        assert_eq!(ml_relax(0.37, 5.0, 0.0).unwrap(), 1.0);
        let want = 4f64.exp() * libm::erfc(2.0);
        assert!((ml_relax(0.5, 1.0, 4.0).unwrap() - want).abs() < 1e-13);
        assert!(ml_relax(1.2, 1.0, 1.0).is_err());
        assert!(ml_relax(0.5, -1.0, 1.0).is_err());
    }

    #[test]
    fn relax_derivative_values() {
        let d = ml_relax_deriv(1.0, 2.0, 1.0).unwrap();
        assert!((d + 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!(matches!(
            ml_relax_deriv(0.5, 1.0, 0.0),
            Err(Error::Domain(_))
        ));
        let d = ml_relax_deriv(0.5, 1.0, 1.0).unwrap();
        assert!((d + ml(0.5, 0.5, -1.0)).abs() < 1e-15);
    }

    #[test]
    fn relax_derivative_matches_central_differences() {
        let (alpha, lambda, t) = (0.7, 3.0, 0.5);
        let exact = ml_relax_deriv(alpha, lambda, t).unwrap();
        let fd = |h: f64| {
            (ml_relax(alpha, lambda, t + h).unwrap() - ml_relax(alpha, lambda, t - h).unwrap())
                / (2.0 * h)
        };
        let errs: Vec<f64> = [1e-2, 5e-3, 2.5e-3]
            .iter()
            .map(|&h| (fd(h) - exact).abs())
            .collect();
        // O(h²): each halving cuts the error by ~4
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!((3.5..4.5).contains(&ratio), "ratio {ratio}, errs {errs:?}");
        }
    }

    #[test]
    fn rgamma_poles_and_reflection() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!((rgamma(-0.5) + 0.5 / PI.sqrt()).abs() < 1e-15);
        let far = rgamma(-160.5);
        assert!((far / -1.90275171208759e285 - 1.0).abs() < 1e-12);
    }
}
