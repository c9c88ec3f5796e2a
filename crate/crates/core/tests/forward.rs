use fracdiff_core::forward::*;
use fracdiff_core::mittag_leffler::ml_relax;
use fracdiff_core::spectral::{uniform_points, EigenSystem, ModalCoefficients};
use std::f64::consts::PI;

fn bump_weight(center: f64, width: f64) -> WeightFunction {
    WeightFunction::new(
        vec![0.0, center - width, center, center + width, 1.0],
        vec![0.0, 0.0, 1.0 / width, 0.0, 0.0],
    )
    .unwrap()
}

#[test]
fn l1_order_on_graded_grids() {
    let lambda = PI * PI;
    for &alpha in &[0.3, 0.5, 0.8] {
        let s = OrderSpectrum::single(alpha).unwrap();
        let err = |k: usize| {
            let g = TimeGrid::graded(1.0, k, 2.0 / alpha).unwrap();
            let u = step_modal_multiterm(&s, lambda, 1.0, &g, None).unwrap();
            u.iter()
                .zip(g.times())
                .map(|(v, &t)| (v - ml_relax(alpha, lambda, t).unwrap()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2, e3) = (err(256), err(512), err(1024));
        for order in [(e1 / e2).log2(), (e2 / e3).log2()] {
            assert!(
                (order - (2.0 - alpha)).abs() <= 0.3,
                "alpha={alpha} order={order}"
            );
        }
    }
}

#[test]
fn multi_single_term_matches_relaxation_away_from_origin() {
    let eig = EigenSystem::interval(1.0, 1).unwrap();
    let a = ModalCoefficients::unit(1, 1);
    let g = TimeGrid::uniform(1.0, 4096).unwrap();
    let s = solve_single_modal(0.5, &a, &eig, &g, &[0.5]).unwrap();
    let m = solve_multi_modal(&OrderSpectrum::single(0.5).unwrap(), &a, &eig, &g, &[0.5]).unwrap();
    let (hs, hm) = (observe(&s, 0.5).unwrap(), observe(&m, 0.5).unwrap());
    // the L1 error decays like τ t^{α−1}, so it is pinned at the horizon
    let last = g.steps();
    assert!((hs.values()[last] - hm.values()[last]).abs() < 1e-4);
    assert!(hs.l2_distance(&hm).unwrap() < 2e-3);
}

#[test]
fn observe_first_mode_closed_form() {
    let l = 2.0;
    let eig = EigenSystem::interval(l, 3).unwrap();
    let a = ModalCoefficients::new(vec![0.7, 0.0, 0.0]).unwrap();
    let g = TimeGrid::uniform(1.5, 12).unwrap();
    let f = solve_single_modal(0.4, &a, &eig, &g, &[]).unwrap();
    let h = observe(&f, l / 2.0).unwrap();
    let lambda = (PI / l).powi(2);
    for (&t, &v) in h.times().iter().zip(h.values()) {
        let want = (2.0 / l).sqrt() * 0.7 * ml_relax(0.4, lambda, t).unwrap();
        assert!((v - want).abs() < 1e-14);
    }
}

#[test]
fn distributed_bump_collapses_to_single_term() {
    let eig = EigenSystem::interval(1.0, 8).unwrap();
    let a = eig.project(|x| x * (1.0 - x), 64);
    let g = TimeGrid::graded(1.0, 400, 4.0).unwrap();
    let single = observe(&solve_single_modal(0.5, &a, &eig, &g, &[]).unwrap(), 0.3).unwrap();
    let d: Vec<f64> = [0.2, 0.1, 0.05]
        .iter()
        .map(|&w| {
            let f = solve_distributed_modal(&bump_weight(0.5, w), 64, &a, &eig, &g, &[]).unwrap();
            observe(&f, 0.3).unwrap().l2_distance(&single).unwrap()
        })
        .collect();
    assert!(d[0] > d[1] && d[1] > d[2], "{d:?}");
}

#[test]
fn distributed_quadrature_self_convergence() {
    let eig = EigenSystem::interval(1.0, 8).unwrap();
    let a = eig.project(|x| x * (1.0 - x), 64);
    let g = TimeGrid::uniform(1.0, 200).unwrap();
    let mu = WeightFunction::sampled(6, |s| 1.0 + s).unwrap();
    let h = |kq| {
        observe(
            &solve_distributed_modal(&mu, kq, &a, &eig, &g, &[]).unwrap(),
            0.3,
        )
        .unwrap()
    };
    assert!(h(8).l2_distance(&h(16)).unwrap() < 1e-6);
}

#[test]
fn first_mode_decays_monotonically_on_every_path() {
    let eig = EigenSystem::interval(1.0, 4).unwrap();
    let a = ModalCoefficients::unit(4, 1);
    let g = TimeGrid::graded(3.0, 300, 2.0).unwrap();
    let fields = [
        solve_single_modal(0.6, &a, &eig, &g, &[]).unwrap(),
        solve_spacetime_modal(0.6, 1.4, &a, &eig, &g, &[]).unwrap(),
        solve_multi_modal(
            &OrderSpectrum::new(vec![0.9, 0.2], vec![1.0, 0.5]).unwrap(),
            &a,
            &eig,
            &g,
            &[],
        )
        .unwrap(),
        solve_distributed_modal(
            &WeightFunction::uniform(vec![1.0; 5]).unwrap(),
            8,
            &a,
            &eig,
            &g,
            &[],
        )
        .unwrap(),
    ];
    for f in &fields {
        let h = observe(f, 0.37).unwrap();
        assert!(
            h.values().windows(2).all(|w| w[1] <= w[0]),
            "{}",
            f.provenance()
        );
        assert!(h.values().iter().all(|&v| v > 0.0));
    }
}

#[test]
fn initial_row_matches_synthesized_data() {
    let eig = EigenSystem::interval(1.0, 32).unwrap();
    let a = eig.project(|x| x.sin() * (1.0 - x), 128);
    let xs = uniform_points(1.0, 17);
    let g = TimeGrid::uniform(1.0, 10).unwrap();
    let want = eig.synthesize(&a, &xs).unwrap();
    let f = solve_distributed_modal(
        &WeightFunction::uniform(vec![1.0, 2.0]).unwrap(),
        8,
        &a,
        &eig,
        &g,
        &xs,
    )
    .unwrap();
    for (u, v) in f.row(0).iter().zip(&want) {
        assert!((u - v).abs() < 1e-10);
    }
}

#[test]
fn nonnegative_data_stays_nonnegative() {
    let eig = EigenSystem::interval(1.0, 64).unwrap();
    let xs = uniform_points(1.0, 41);
    let g = TimeGrid::graded(1.0, 400, 3.0).unwrap();
    let spec = OrderSpectrum::new(vec![0.7, 0.3], vec![1.0, 0.5]).unwrap();
    let op = TimeOperator::MultiTerm(spec);

    // interior data, homogeneous boundary
    let a = eig.project(|x| x * (1.0 - x), 256);
    let norm = 0.25;
    let f = solve_with_boundary(&op, &a, &BoundaryData::homogeneous(), &eig, &g, &xs).unwrap();
    assert!(f.values().iter().all(|&u| u >= -1e-6 * norm));

    // zero data, bump on the left boundary
    let bump = BoundaryProfile::Bump {
        start: 0.25,
        end: 0.5,
        height: 1.0,
    };
    let b = BoundaryData::new(bump, BoundaryProfile::Zero).unwrap();
    let f = solve_with_boundary(&op, &ModalCoefficients::zeros(64), &b, &eig, &g, &xs).unwrap();
    let min = f.values().iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min >= -1e-6, "{min}");
    for (i, x) in xs.iter().enumerate().take(xs.len() - 1).skip(1) {
        let peak = (0..=g.steps())
            .map(|j| f.value(i, j))
            .fold(f64::MIN, f64::max);
        assert!(peak > 0.0, "x={x}");
    }
}
