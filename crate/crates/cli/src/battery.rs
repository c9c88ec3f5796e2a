//! Named experiment batteries. Each check records the measured value next to
//! the threshold it was held to.

use std::f64::consts::PI;

use fracdiff_core::forward::{
    observe, solve_distributed_modal, solve_multi_modal, solve_single_modal, solve_spacetime_modal,
    solve_with_boundary, step_modal_multiterm, BoundaryData, BoundaryProfile, OrderSpectrum,
    Scenario, TimeGrid, TimeOperator, WeightFunction,
};
use fracdiff_core::mittag_leffler::ml_relax;
use fracdiff_core::order_recovery::{distinguishability, lipschitz_ratio, LipschitzTable};
use fracdiff_core::spectral::{uniform_points, EigenSystem, ModalCoefficients};
use fracdiff_core::weight_recovery::{nonhomogeneous_distinguishability, weight_distance};

use crate::config::RunConfig;
use crate::CliError;

/// Checks plus the named CSV tables a battery writes.
type Checks = (Vec<Check>, Vec<(String, String)>);

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Battery {
    Consistency,
    Positivity,
    Lipschitz,
    Distinguishability,
    WeightStability,
}

impl Battery {
    pub fn name(self) -> &'static str {
        match self {
            Battery::Consistency => "consistency",
            Battery::Positivity => "positivity",
            Battery::Lipschitz => "lipschitz",
            Battery::Distinguishability => "distinguishability",
            Battery::WeightStability => "weight-stability",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable acceptance rule, e.g. "< 1e-10".
    pub rule: String,
    pub pass: bool,
    /// Why a check failed before it could be measured.
    pub reason: Option<String>,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("< {limit:e}"),
            pass: value < limit,
            reason: None,
        }
    }

    fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("> {limit:e}"),
            pass: value > limit,
            reason: None,
        }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            rule: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
            reason: None,
        }
    }

    fn failed(name: impl Into<String>, value: f64, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value,
            rule: "precondition".into(),
            pass: false,
            reason: Some(reason.into()),
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        match &self.reason {
            Some(r) => format!("{verdict} {} value={:?} ({r})", self.name, self.value),
            None => format!(
                "{verdict} {} value={:?} rule={}",
                self.name, self.value, self.rule
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryReport {
    pub battery: Battery,
    pub checks: Vec<Check>,
    /// Extra CSV tables as (file name, contents).
    pub tables: Vec<(String, String)>,
}

impl BatteryReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        let mut s = format!("battery = {}\n", self.battery.name());
        for c in &self.checks {
            s.push_str(&c.line());
            s.push('\n');
        }
        let passed = self.checks.iter().filter(|c| c.pass).count();
        s.push_str(&format!("passed = {passed}/{}\n", self.checks.len()));
        s
    }
}

fn solver(e: fracdiff_core::Error) -> CliError {
    CliError::Solver(e.to_string())
}

pub fn run(battery: Battery, config: Option<&RunConfig>) -> Result<BatteryReport, CliError> {
    let (checks, tables) = match battery {
        Battery::Consistency => (consistency()?, vec![]),
        Battery::Positivity => (positivity(config)?, vec![]),
        Battery::Lipschitz => lipschitz()?,
        Battery::Distinguishability => (distinguishability_checks()?, vec![]),
        Battery::WeightStability => weight_stability()?,
    };
    Ok(BatteryReport {
        battery,
        checks,
        tables,
    })
}

/// max |u − u_heat| / max |u_heat| over t ∈ [0.1, 1] at x0 = 0.5, a = φ_1, L = 1.
///
/// Normalized by the sup of the heat solution rather than pointwise: for
/// α < 1 the relaxation keeps an algebraic tail t^{−α}/(λ Γ(1−α)) that
/// eventually dominates e^{−λt} in relative terms.
pub fn heat_deviation(alpha: f64) -> Result<f64, CliError> {
    let eig = EigenSystem::interval(1.0, 1).map_err(solver)?;
    let grid = TimeGrid::uniform(1.0, 100).map_err(solver)?;
    let f = solve_single_modal(alpha, &ModalCoefficients::unit(1, 1), &eig, &grid, &[])
        .map_err(solver)?;
    let h = observe(&f, 0.5).map_err(solver)?;
    let phi = eig.phi(1, 0.5);
    let (mut diff, mut peak) = (0.0f64, 0.0f64);
    for (&t, &v) in h.times().iter().zip(h.values()) {
        if t >= 0.1 - 1e-12 {
            let want = phi * (-PI * PI * t).exp();
            diff = diff.max((v - want).abs());
            peak = peak.max(want.abs());
        }
    }
    Ok(diff / peak)
}

/// Empirical L1 orders (K = 256 → 512 → 1024) on graded grids, max norm
/// against the Mittag-Leffler relaxation.
pub fn l1_orders(alpha: f64) -> Result<[f64; 2], CliError> {
    let lambda = PI * PI;
    let s = OrderSpectrum::single(alpha).map_err(solver)?;
    let err = |k: usize| -> Result<f64, CliError> {
        let g = TimeGrid::graded(1.0, k, 2.0 / alpha).map_err(solver)?;
        let u = step_modal_multiterm(&s, lambda, 1.0, &g, None).map_err(solver)?;
        let mut worst: f64 = 0.0;
        for (v, &t) in u.iter().zip(g.times()) {
            worst = worst.max((v - ml_relax(alpha, lambda, t).map_err(solver)?).abs());
        }
        Ok(worst)
    };
    let (e1, e2, e3) = (err(256)?, err(512)?, err(1024)?);
    Ok([(e1 / e2).log2(), (e2 / e3).log2()])
}

fn bump_weight(center: f64, width: f64) -> Result<WeightFunction, CliError> {
    WeightFunction::new(
        vec![0.0, center - width, center, center + width, 1.0],
        vec![0.0, 0.0, 1.0 / width, 0.0, 0.0],
    )
    .map_err(solver)
}

/// L² distances between distributed solutions with unit-mass bumps of the
/// given half-widths around 0.5 and the single-term α = 0.5 solution.
pub fn collapse_distances(widths: &[f64]) -> Result<Vec<f64>, CliError> {
    let eig = EigenSystem::interval(1.0, 8).map_err(solver)?;
    let a = eig.project(|x| x * (1.0 - x), 64);
    let g = TimeGrid::graded(1.0, 400, 4.0).map_err(solver)?;
    let single = observe(
        &solve_single_modal(0.5, &a, &eig, &g, &[]).map_err(solver)?,
        0.3,
    )
    .map_err(solver)?;
    widths
        .iter()
        .map(|&w| {
            let f = solve_distributed_modal(&bump_weight(0.5, w)?, 64, &a, &eig, &g, &[])
                .map_err(solver)?;
            observe(&f, 0.3)
                .and_then(|h| h.l2_distance(&single))
                .map_err(solver)
        })
        .collect()
}

fn consistency() -> Result<Vec<Check>, CliError> {
    let mut out = vec![
        Check::below("heat-limit-exact", heat_deviation(1.0)?, 1e-10),
        Check::below("heat-limit-near", heat_deviation(0.999)?, 1e-2),
    ];
    for alpha in [0.3, 0.5, 0.8] {
        let [p, q] = l1_orders(alpha)?;
        let target = 2.0 - alpha;
        for (i, order) in [p, q].into_iter().enumerate() {
            out.push(Check::within(
                format!("l1-order-alpha{alpha}-{}", 256 << i),
                order,
                target - 0.3,
                target + 0.3,
            ));
        }
    }

    // one-term multi-term stepping against the exact single-term solution
    let eig = EigenSystem::interval(1.0, 1).map_err(solver)?;
    let a = ModalCoefficients::unit(1, 1);
    let g = TimeGrid::uniform(1.0, 4096).map_err(solver)?;
    let exact = observe(
        &solve_single_modal(0.5, &a, &eig, &g, &[]).map_err(solver)?,
        0.5,
    )
    .map_err(solver)?;
    let spec = OrderSpectrum::single(0.5).map_err(solver)?;
    let stepped = observe(
        &solve_multi_modal(&spec, &a, &eig, &g, &[]).map_err(solver)?,
        0.5,
    )
    .map_err(solver)?;
    let last = g.steps();
    out.push(Check::below(
        "single-term-horizon",
        (exact.values()[last] - stepped.values()[last]).abs(),
        1e-4,
    ));

    // γ = 2 is the ordinary Laplacian
    let eig = EigenSystem::interval(1.0, 8).map_err(solver)?;
    let a = eig.project(|x| x * (1.0 - x), 64);
    let g = TimeGrid::graded(2.0, 64, 2.0).map_err(solver)?;
    let s = observe(
        &solve_single_modal(0.6, &a, &eig, &g, &[]).map_err(solver)?,
        0.3,
    )
    .map_err(solver)?;
    let st = observe(
        &solve_spacetime_modal(0.6, 2.0, &a, &eig, &g, &[]).map_err(solver)?,
        0.3,
    )
    .map_err(solver)?;
    out.push(Check::below(
        "spacetime-gamma2",
        s.l2_distance(&st).map_err(solver)?,
        1e-14,
    ));

    let d = collapse_distances(&[0.2, 0.1, 0.05])?;
    for (i, pair) in d.windows(2).enumerate() {
        out.push(Check::above(
            format!("collapse-decrease-{}", i + 1),
            pair[0] - pair[1],
            0.0,
        ));
    }
    Ok(out)
}

/// Nonnegative-data scenarios; `min` is checked against −1e−6 ‖a‖_∞ and the
/// temporal peak must be positive at every interior output point.
fn positivity_of(
    name: &str,
    op: &TimeOperator,
    a_fn: &dyn Fn(f64) -> f64,
    boundary: BoundaryData,
    eig: &EigenSystem,
    grid: &TimeGrid,
    out: &mut Vec<Check>,
) -> Result<(), CliError> {
    let xs = uniform_points(eig.length(), 41);
    let a_max = xs.iter().map(|&x| a_fn(x).abs()).fold(0.0, f64::max);
    let a = eig.project(a_fn, 256.max(4 * eig.count()));
    let f = solve_with_boundary(op, &a, &boundary, eig, grid, &xs).map_err(solver)?;
    let min = f.values().iter().copied().fold(f64::INFINITY, f64::min);
    // zero data: only the boundary scales the answer
    let scale = if a_max > 0.0 { a_max } else { 1.0 };
    out.push(Check::above(format!("{name}-min"), min, -1e-6 * scale));
    let peak_min = (1..xs.len() - 1)
        .map(|i| {
            (0..=grid.steps())
                .map(|j| f.value(i, j))
                .fold(f64::MIN, f64::max)
        })
        .fold(f64::INFINITY, f64::min);
    out.push(Check::above(format!("{name}-peak"), peak_min, 0.0));
    Ok(())
}

fn positivity(config: Option<&RunConfig>) -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    if let Some(cfg) = config {
        // the maximum principle presupposes a ≥ 0
        let f = cfg.initial_function()?;
        let xs = uniform_points(cfg.domain.length, 201);
        let min_a = xs.iter().map(|&x| f(x)).fold(f64::INFINITY, f64::min);
        if min_a < 0.0 {
            out.push(Check::failed(
                "config-initial-nonnegative",
                min_a,
                format!("precondition a >= 0 violated: initial data reaches {min_a:e}"),
            ));
        } else {
            let eig = cfg.eigensystem(cfg.space.modes)?;
            let boundary = cfg.boundary_data()?;
            let mut sub = Vec::new();
            positivity_of(
                "config",
                &cfg.operator()?,
                &*f,
                boundary,
                &eig,
                &cfg.grid()?,
                &mut sub,
            )?;
            out.push(Check::above(
                "config-initial-nonnegative",
                min_a,
                -f64::MIN_POSITIVE,
            ));
            out.extend(sub);
        }
    }

    let eig = EigenSystem::interval(1.0, 64).map_err(solver)?;
    let g = TimeGrid::graded(1.0, 400, 3.0).map_err(solver)?;
    let parabola = |x: f64| x * (1.0 - x);
    let spec = |a: Vec<f64>, p: Vec<f64>| {
        OrderSpectrum::new(a, p)
            .map(TimeOperator::MultiTerm)
            .map_err(solver)
    };
    let hom = BoundaryData::homogeneous();
    positivity_of(
        "single",
        &spec(vec![0.5], vec![1.0])?,
        &parabola,
        hom,
        &eig,
        &g,
        &mut out,
    )?;
    positivity_of(
        "multiterm",
        &spec(vec![0.7, 0.3], vec![1.0, 0.5])?,
        &parabola,
        hom,
        &eig,
        &g,
        &mut out,
    )?;
    let distributed = TimeOperator::Distributed {
        mu: WeightFunction::uniform(vec![1.0, 1.0]).map_err(solver)?,
        quad_order: 16,
    };
    // skewed data; a compactly supported bump would undershoot after modal truncation
    let skewed = |x: f64| 4.0 * x * x * (1.0 - x);
    positivity_of(
        "distributed",
        &distributed,
        &skewed,
        hom,
        &eig,
        &g,
        &mut out,
    )?;
    let left = BoundaryProfile::Bump {
        start: 0.25,
        end: 0.5,
        height: 1.0,
    };
    let b = BoundaryData::new(left, BoundaryProfile::Zero).map_err(solver)?;
    positivity_of(
        "boundary-driven",
        &spec(vec![0.7, 0.3], vec![1.0, 0.5])?,
        &|_| 0.0,
        b,
        &eig,
        &g,
        &mut out,
    )?;
    Ok(out)
}

fn unit_scenario() -> Result<Scenario, CliError> {
    let eig = EigenSystem::interval(1.0, 4).map_err(solver)?;
    let g = TimeGrid::graded(1.0, 256, 3.0).map_err(solver)?;
    Scenario::interior(eig, ModalCoefficients::unit(4, 1), g, 0.3).map_err(solver)
}

/// Perturbations of (0.5, 1) by 2^{-k}, k = 4..10, in the order and in the weight.
pub fn lipschitz_tables() -> Result<[LipschitzTable; 2], CliError> {
    let sc = unit_scenario()?;
    let base = OrderSpectrum::single(0.5).map_err(solver)?;
    let family = |f: &dyn Fn(f64) -> fracdiff_core::Result<OrderSpectrum>| -> Result<LipschitzTable, CliError> {
        let pairs = (4..=10)
            .map(|k| f(2f64.powi(-k)).map(|s| (base.clone(), s)))
            .collect::<fracdiff_core::Result<Vec<_>>>()
            .map_err(solver)?;
        lipschitz_ratio(&pairs, &sc).map_err(solver)
    };
    Ok([
        family(&|d| OrderSpectrum::single(0.5 + d))?,
        family(&|d| OrderSpectrum::new(vec![0.5], vec![1.0 + d]))?,
    ])
}

fn lipschitz() -> Result<Checks, CliError> {
    let [orders, weights] = lipschitz_tables()?;
    let spread = |t: &LipschitzTable| match (t.max_ratio(), t.min_ratio()) {
        (Some(hi), Some(lo)) => hi / lo,
        _ => f64::INFINITY,
    };
    Ok((
        vec![
            Check::below("lipschitz-order-family", spread(&orders), 3.0),
            Check::below("lipschitz-weight-family", spread(&weights), 3.0),
        ],
        vec![
            ("lipschitz_orders.csv".into(), orders.to_csv()),
            ("lipschitz_weights.csv".into(), weights.to_csv()),
        ],
    ))
}

fn boundary_scenario() -> Result<Scenario, CliError> {
    let eig = EigenSystem::interval(1.0, 32).map_err(solver)?;
    let g = TimeGrid::uniform(1.0, 400).map_err(solver)?;
    let left = BoundaryProfile::Bump {
        start: 0.25,
        end: 0.5,
        height: 1.0,
    };
    let b = BoundaryData::new(left, BoundaryProfile::Zero).map_err(solver)?;
    Scenario::new(eig, ModalCoefficients::zeros(32), b, g, 0.3).map_err(solver)
}

/// μ ≡ 1 against ω(α) = 2α with zero initial data and a boundary bump on (T/4, T/2).
pub fn nonhomogeneous_separation() -> Result<f64, CliError> {
    let mu = WeightFunction::uniform(vec![1.0, 1.0]).map_err(solver)?;
    let omega = WeightFunction::uniform(vec![0.0, 2.0]).map_err(solver)?;
    nonhomogeneous_distinguishability(&mu, &omega, &boundary_scenario()?, 16).map_err(solver)
}

fn distinguishability_checks() -> Result<Vec<Check>, CliError> {
    let sc = unit_scenario()?;
    let op = |a: Vec<f64>, p: Vec<f64>| {
        OrderSpectrum::new(a, p)
            .map(TimeOperator::MultiTerm)
            .map_err(solver)
    };
    let mut out = Vec::new();
    let pairs = [
        (
            "orders-0.5-vs-0.6",
            op(vec![0.5], vec![1.0])?,
            op(vec![0.6], vec![1.0])?,
        ),
        (
            "weights-1-vs-2",
            op(vec![0.5], vec![1.0])?,
            op(vec![0.5], vec![2.0])?,
        ),
        (
            "two-term-vs-one-term",
            op(vec![0.8, 0.4], vec![1.0, 0.5])?,
            op(vec![0.8], vec![1.5])?,
        ),
    ];
    for (name, a, b) in pairs {
        out.push(Check::above(
            name,
            distinguishability(&a, &b, &sc).map_err(solver)?,
            0.0,
        ));
    }
    // equal-mass weights on disjoint halves of (0, 1)
    let mu = WeightFunction::uniform(vec![0.0, 4.0, 0.0, 0.0, 0.0]).map_err(solver)?;
    let omega = WeightFunction::uniform(vec![0.0, 0.0, 0.0, 4.0, 0.0]).map_err(solver)?;
    let (d, _) = weight_distance(&mu, &omega, &sc, 32).map_err(solver)?;
    out.push(Check::above("weights-disjoint-support", d, 1e-3));
    out.push(Check::above(
        "weights-boundary-driven",
        nonhomogeneous_separation()?,
        1e-6,
    ));
    Ok(out)
}

/// ‖u_μ − u_ω‖ / ‖μ − ω‖_∞ for μ ≡ 1, ω = 1 + s sin(πα), s = 0.1·2^{-k}, k = 0..4.
pub fn weight_stability_ratios() -> Result<Vec<(f64, f64, f64)>, CliError> {
    let sc = unit_scenario()?;
    let mu = WeightFunction::uniform(vec![1.0, 1.0]).map_err(solver)?;
    (0..=4)
        .map(|k| {
            let s = 0.1 * 2f64.powi(-k);
            let omega = WeightFunction::sampled(9, |a| 1.0 + s * (PI * a).sin()).map_err(solver)?;
            let (d, w) = weight_distance(&mu, &omega, &sc, 16).map_err(solver)?;
            Ok((s, d, d / w))
        })
        .collect()
}

fn weight_stability() -> Result<Checks, CliError> {
    let rows = weight_stability_ratios()?;
    let mut csv = String::from("amplitude,distance,ratio\n");
    for (s, d, r) in &rows {
        csv.push_str(&format!("{s:?},{d:?},{r:?}\n"));
    }
    let (lo, hi) = rows.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| {
        (a.min(r.2), b.max(r.2))
    });
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|(s, d, _)| Check::above(format!("distance-amplitude-{s}"), *d, 0.0))
        .collect();
    checks.push(Check::below("stability-ratio-spread", hi / lo, 10.0));
    Ok((checks, vec![("weight_stability.csv".into(), csv)]))
}
