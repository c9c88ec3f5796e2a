use fracdiff_core::forward::*;
use fracdiff_core::spectral::{EigenSystem, ModalCoefficients};
use fracdiff_core::weight_recovery::*;

const X0: f64 = 0.3;

fn data_and_model(truth: &WeightFunction) -> (ObservationSeries, Scenario) {
    let f = |x: f64| x * (1.0 - x);
    let (k, n) = (128, 8);
    let fine = TimeGrid::graded(1.0, 4 * k, 2.5).unwrap();
    let eig_d = EigenSystem::interval(1.0, 2 * n).unwrap();
    let a_d = eig_d.project(f, 256);
    let data = Scenario::interior(eig_d, a_d, fine.clone(), X0)
        .unwrap()
        .observe(&TimeOperator::Distributed {
            mu: truth.clone(),
            quad_order: 64,
        })
        .unwrap();
    let eig = EigenSystem::interval(1.0, n).unwrap();
    let a = eig.project(f, 256);
    (
        data,
        Scenario::interior(eig, a, fine.coarsened(4).unwrap(), X0).unwrap(),
    )
}

fn unit_scenario() -> Scenario {
    let eig = EigenSystem::interval(1.0, 4).unwrap();
    let g = TimeGrid::graded(1.0, 256, 3.0).unwrap();
    Scenario::interior(eig, ModalCoefficients::unit(4, 1), g, X0).unwrap()
}

#[test]
fn constant_weight_is_recovered() {
    let (h, sc) = data_and_model(&WeightFunction::uniform(vec![1.0, 1.0]).unwrap());
    let e = recover_weight(&h, &sc, 6, 1e-6, &Default::default()).unwrap();
    assert_eq!(e.status, WeightStatus::Converged);
    let w = e.weight.unwrap();
    for &v in &w.values()[1..5] {
        assert!((v - 1.0).abs() <= 0.1, "{:?}", w.values());
    }
    assert!(w.values().iter().all(|&v| v >= 0.0));
}

#[test]
fn narrow_bump_mass_concentrates_next_to_it() {
    let truth = WeightFunction::new(
        vec![0.0, 0.55, 0.6, 0.65, 1.0],
        vec![0.0, 0.0, 20.0, 0.0, 0.0],
    )
    .unwrap();
    let (h, sc) = data_and_model(&truth);
    // 8 nodes put 4/7 and 5/7 on either side of 0.6
    let w = recover_weight(&h, &sc, 8, 1e-8, &Default::default())
        .unwrap()
        .weight
        .unwrap();
    let hat = |k: usize| {
        if k == 0 || k == 7 {
            0.5 / 7.0
        } else {
            1.0 / 7.0
        }
    };
    let mass: Vec<f64> = w
        .values()
        .iter()
        .enumerate()
        .map(|(k, v)| v * hat(k))
        .collect();
    let total: f64 = mass.iter().sum();
    assert!((mass[4] + mass[5]) / total >= 0.7, "{:?}", w.values());
}

#[test]
fn regularization_shrinks_the_estimate() {
    let truth = WeightFunction::uniform(vec![0.5, 1.5, 1.0]).unwrap();
    let (h, sc) = data_and_model(&truth);
    let est: Vec<WeightEstimate> = [1e-8, 1e-6, 1e-4]
        .iter()
        .map(|&eps| recover_weight(&h, &sc, 5, eps, &Default::default()).unwrap())
        .collect();
    let norms: Vec<f64> = est
        .iter()
        .map(|e| e.weight.as_ref().unwrap().l2_norm_sq())
        .collect();
    assert!(
        norms.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-3)),
        "{norms:?}"
    );
    let misfits: Vec<f64> = est.iter().map(|e| e.misfit).collect();
    assert!(
        misfits.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-3)),
        "{misfits:?}"
    );
}

#[test]
fn identical_weights_have_zero_distance() {
    let mu = WeightFunction::uniform(vec![1.0, 2.0, 0.5]).unwrap();
    let (d, w) = weight_distance(&mu, &mu, &unit_scenario(), 16).unwrap();
    assert!(d < 1e-12 && w < 1e-12);
}

#[test]
fn stability_ratios_are_bounded() {
    let sc = unit_scenario();
    let mu = WeightFunction::uniform(vec![1.0, 1.0]).unwrap();
    let ratios: Vec<f64> = (0..=4)
        .map(|k| {
            let s = 0.1 * 2f64.powi(-k);
            let omega =
                WeightFunction::sampled(9, |a| 1.0 + s * (std::f64::consts::PI * a).sin()).unwrap();
            let (d, w) = weight_distance(&mu, &omega, &sc, 16).unwrap();
            assert!(d > 0.0);
            d / w
        })
        .collect();
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    assert!(hi / lo < 10.0, "{ratios:?}");
}

#[test]
fn disjoint_supports_are_distinguishable() {
    let mu = WeightFunction::uniform(vec![0.0, 4.0, 0.0, 0.0, 0.0]).unwrap();
    let omega = WeightFunction::uniform(vec![0.0, 0.0, 0.0, 4.0, 0.0]).unwrap();
    assert!((mu.mass() - omega.mass()).abs() < 1e-14);
    let (d, _) = weight_distance(&mu, &omega, &unit_scenario(), 32).unwrap();
    assert!(d > 1e-3, "{d}");
}

fn boundary_scenario(left: BoundaryProfile) -> Scenario {
    let eig = EigenSystem::interval(1.0, 32).unwrap();
    let g = TimeGrid::uniform(1.0, 400).unwrap();
    let b = BoundaryData::new(left, BoundaryProfile::Zero).unwrap();
    Scenario::new(eig, ModalCoefficients::zeros(32), b, g, X0).unwrap()
}

#[test]
fn boundary_driven_separation() {
    let bump = BoundaryProfile::Bump {
        start: 0.25,
        end: 0.5,
        height: 1.0,
    };
    let sc = boundary_scenario(bump);
    let mu = WeightFunction::uniform(vec![1.0, 1.0]).unwrap();
    let omega = WeightFunction::uniform(vec![0.0, 2.0]).unwrap();
    assert!(nonhomogeneous_distinguishability(&mu, &omega, &sc, 16).unwrap() > 1e-6);
    assert!(nonhomogeneous_distinguishability(&mu, &mu, &sc, 16).unwrap() < 1e-10);
    // without boundary forcing both solutions vanish
    let quiet = boundary_scenario(BoundaryProfile::Zero);
    assert_eq!(
        nonhomogeneous_distinguishability(&mu, &omega, &quiet, 16).unwrap(),
        0.0
    );
}
