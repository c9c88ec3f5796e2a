//! Gauss–Legendre rules and an adaptive Gauss–Kronrod integrator.

use std::f64::consts::PI;

/// Gauss–Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi's initial guess, refined by Newton.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `degree` nodes each.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, degree: usize) -> Self {
        let rule = GaussLegendre::new(degree);
        let h = (b - a) / panels as f64;
        let mut points = Vec::with_capacity(panels * degree);
        let mut weights = Vec::with_capacity(panels * degree);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (x, w) in rule.mapped(lo, lo + h) {
                points.push(x);
                weights.push(w);
            }
        }
        Self { points, weights }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Adaptive Gauss–Kronrod (7/15) integration by recursive bisection.
///
/// Subintervals are accepted once their Kronrod/Gauss discrepancy falls below
/// a share of `abs_tol` proportional to their length, or below `rel_tol`
/// times their own magnitude.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Integral {
    if a == b {
        return Integral {
            value: 0.0,
            error: 0.0,
        };
    }
    let total = (b - a).abs();
    let mut value = 0.0;
    let mut error = 0.0;
    let mut stack = vec![(a, b, 0usize)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(&mut f, lo, hi);
        let share = abs_tol * ((hi - lo).abs() / total).max(1e-3);
        if e <= share || e <= rel_tol * v.abs() || depth >= 48 {
            value += v;
            error += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    Integral { value, error }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = GaussLegendre::new(8);
        // exact up to degree 15
        for k in 0..16 {
            let got = rule.integrate(-1.0, 1.0, |x| x.powi(k));
            let want = if k % 2 == 1 {
                0.0
            } else {
                2.0 / (k as f64 + 1.0)
            };
            assert!((got - want).abs() < 1e-14, "k={k}: {got} vs {want}");
        }
        let w: f64 = rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn high_degree_rule_is_accurate() {
        let rule = GaussLegendre::new(64);
        let got = rule.integrate(0.0, PI, f64::sin);
        assert!((got - 2.0).abs() < 1e-14);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kronrod_constants_integrate_polynomials() {
        // G7 exact to degree 13, K15 to degree 22.
        let mut f = |x: f64| x.powi(22) + 3.0 * x.powi(13);
        let (v, _) = gk15(&mut f, -1.0, 1.0);
        assert!((v - 2.0 / 23.0).abs() < 1e-15);
        let mut g = |x: f64| x.powi(12);
        let (v, e) = gk15(&mut g, -1.0, 1.0);
        assert!((v - 2.0 / 13.0).abs() < 1e-15);
        assert!(e < 1e-15);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let eps = 1e-4;
        let r = adaptive(|x| eps / (x * x + eps * eps), -1.0, 1.0, 1e-13, 0.0);
        let want = 2.0 * (1.0 / eps).atan();
        assert!((r.value - want).abs() < 1e-11, "{} vs {}", r.value, want);
    }

    #[test]
    fn composite_rule_matches_closed_form() {
        let rule = CompositeRule::new(0.0, 1.0, 8, 16);
        let got = rule.integrate(|x| (3.0 * x).exp());
        assert!((got - ((3.0f64).exp() - 1.0) / 3.0).abs() < 1e-13);
    }
}
