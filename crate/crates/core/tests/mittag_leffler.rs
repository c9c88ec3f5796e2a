use fracdiff_core::mittag_leffler::{
    asymptotic, integral, ml_eval, ml_relax, ml_relax_deriv, taylor, MLParams, ASYMPTOTIC_LIMIT,
    TAYLOR_LIMIT,
};

fn load(name: &str) -> Vec<[f64; 4]> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

fn ml(alpha: f64, beta: f64, z: f64) -> f64 {
    ml_eval(MLParams::new(alpha, beta).unwrap(), z).unwrap()
}

#[test]
fn matches_high_precision_series_near_origin() {
    let rows = load("ml_taylor_oracle.csv");
    assert_eq!(rows.len(), 200);
    let worst = rows
        .iter()
        .map(|&[a, b, z, want]| (ml(a, b, z) - want).abs())
        .fold(0.0, f64::max);
    assert!(worst < 1e-11, "worst abs error {worst:e}");
}

#[test]
fn matches_reference_in_intermediate_band() {
    for [a, b, z, want] in load("ml_wide_oracle.csv") {
        let got = ml(a, b, z);
        assert!(
            (got - want).abs() < 1e-12,
            "E_{{{a},{b}}}({z}) = {got}, want {want}"
        );
    }
}

#[test]
fn normalization_at_zero() {
    for i in 1..20 {
        let alpha = 0.1 * i as f64;
        for j in 1..=30 {
            let beta = 0.1 * j as f64;
            let got = ml(alpha, beta, 0.0);
            let want = 1.0 / libm::tgamma(beta);
            assert!((got - want).abs() < 1e-13);
        }
    }
}

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

#[test]
fn relaxation_is_positive_and_decreasing() {
    let xs = log_grid(1e-6, 1e6, 12);
    for i in 1..=9 {
        let alpha = 0.1 * i as f64;
        let vals: Vec<f64> = xs.iter().map(|&x| ml(alpha, 1.0, -x)).collect();
        assert!(vals.iter().all(|&v| v > 0.0), "alpha={alpha}");
        for (w, x) in vals.windows(2).zip(&xs) {
            assert!(w[1] < w[0], "alpha={alpha} not decreasing at x={x}");
        }
    }
}

#[test]
fn algebraic_decay_plateau() {
    for &alpha in &[0.3, 0.5, 0.8] {
        for &beta in &[0.5, 1.0, 1.5] {
            // when 1/Γ(β−α) = 0 the leading x^{-1} term is absent and
            // (1+x)|E| keeps decaying instead of levelling off
            let leading = fracdiff_core::mittag_leffler::rgamma(beta - alpha) != 0.0;
            let mut x = 100.0;
            while x <= 1e7 {
                let f = |x: f64| (1.0 + x) * ml(alpha, beta, -x).abs();
                let (a, b) = (f(x), f(10.0 * x));
                assert!(a.is_finite() && b.is_finite());
                assert!(b < 1.05 * a, "alpha={alpha} beta={beta} x={x}: grows");
                if leading {
                    assert!(
                        (a - b).abs() < 0.05 * a.max(b),
                        "alpha={alpha} beta={beta} x={x}: {a} vs {b}"
                    );
                }
                x *= 10.0;
            }
        }
    }
}

#[test]
fn large_arguments_stay_accurate() {
    // E_{1/2,1}(−x) = exp(x²) erfc(x) ≈ 1/(x√π) (1 − 1/(2x²) + 3/(4x⁴))
    for &x in &[1e3, 1e5, 1e8] {
        let got = ml(0.5, 1.0, -x);
        let want = (1.0 - 0.5 / (x * x) + 0.75 / x.powi(4)) / (x * std::f64::consts::PI.sqrt());
        assert!((got - want).abs() < 1e-15, "x={x}");
    }
}

#[test]
fn branches_agree_around_switch_points() {
    // Each neighbour of a switch point must agree with the integral branch.
    for &alpha in &[0.6, 0.75, 0.9, 1.3, 1.7] {
        for &beta in &[0.6, 1.0, 1.4] {
            for &x in &[0.8 * TAYLOR_LIMIT, TAYLOR_LIMIT, 1.2 * TAYLOR_LIMIT] {
                let z = -x;
                if let Some(t) = taylor(alpha, beta, z) {
                    let i = integral(alpha, beta, z).unwrap();
                    assert!((t - i).abs() < 1e-10, "taylor a={alpha} b={beta} x={x}");
                }
            }
        }
    }
    for &alpha in &[0.2, 0.5, 0.8, 0.95] {
        for &beta in &[0.5, 1.0, 2.0] {
            for &x in &[
                0.8 * ASYMPTOTIC_LIMIT,
                ASYMPTOTIC_LIMIT,
                1.2 * ASYMPTOTIC_LIMIT,
            ] {
                let z = -x;
                let a = asymptotic(alpha, beta, z).expect("certified at the switch point");
                let i = integral(alpha, beta, z).unwrap();
                assert!((a - i).abs() < 1e-10, "asymptotic a={alpha} b={beta} x={x}");
            }
        }
    }
}

#[test]
fn relax_derivative_second_order_differences() {
    for &(alpha, lambda, t) in &[(0.7, 3.0, 0.5), (0.3, 10.0, 2.0), (0.95, 1.0, 0.2)] {
        let exact = ml_relax_deriv(alpha, lambda, t).unwrap();
        let err = |h: f64| {
            let fd = (ml_relax(alpha, lambda, t + h).unwrap()
                - ml_relax(alpha, lambda, t - h).unwrap())
                / (2.0 * h);
            (fd - exact).abs()
        };
        let h = 0.02 * t;
        let (e1, e2, e3) = (err(h), err(h / 2.0), err(h / 4.0));
        assert!((3.3..4.7).contains(&(e1 / e2)), "{e1} {e2}");
        assert!((3.3..4.7).contains(&(e2 / e3)), "{e2} {e3}");
    }
}
