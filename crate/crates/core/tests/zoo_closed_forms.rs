//! Closed-form values of the metric catalog.

use approx::assert_relative_eq;
use finsler::error::Error;
use finsler::geometry::{flag_curvature, mean_cartan, mean_landsberg, s_curvature};
use finsler::verify::SamplePlan;
use finsler::zoo::{self, EuclideanNorm, MinkowskiNorm, RandersNorm};

#[test]
fn funk_at_origin() {
    let m = zoo::funk_ball_shifted(&[0.0, 0.0]).unwrap();
    assert_relative_eq!(m.value(&[0.0, 0.0], &[1.0, 0.0]), 1.0, epsilon = 1e-15);
    let m = zoo::funk_ball_shifted(&[0.3, 0.0, 0.0]).unwrap();
    let y = [0.4, -1.0, 0.5];
    let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert_relative_eq!(m.value(&[0.0; 3], &y), norm + 0.3 * y[0], epsilon = 1e-14);
}

#[test]
fn funk_rejects_large_shift() {
    assert!(matches!(zoo::funk_ball_shifted(&[1.0, 0.0]), Err(Error::InvalidParameter(_))));
}

#[test]
fn implicit_funk_at_origin_is_phi() {
    let phi = RandersNorm::new(&[0.3, 0.1]).unwrap();
    let m = zoo::funk_implicit(2, phi.clone()).unwrap();
    let y = [0.7, -0.2];
    assert_relative_eq!(m.value(&[0.0, 0.0], &y), phi.eval(&y[..]), epsilon = 1e-14);
}

#[test]
fn implicit_funk_matches_ball_closed_form() {
    for n in [2, 3] {
        let implicit = zoo::funk_implicit(n, EuclideanNorm).unwrap();
        let closed = zoo::funk_ball_shifted(&vec![0.0; n]).unwrap();
        for at in SamplePlan::new(100, 17).tangent_samples(&closed).unwrap() {
            let a = implicit.value(&at.x, &at.y);
            let b = closed.value(&at.x, &at.y);
            assert!((a - b).abs() <= 1e-10 * b, "n={n} x={:?}: {a} vs {b}", at.x);
        }
    }
}

#[test]
fn funk_pde_holds() {
    let metrics = [
        zoo::funk_implicit(2, EuclideanNorm).unwrap(),
        zoo::funk_implicit(2, RandersNorm::new(&[0.3, 0.1]).unwrap()).unwrap(),
        zoo::funk_implicit(3, RandersNorm::new(&[0.0, 0.4, -0.2]).unwrap()).unwrap(),
    ];
    for m in &metrics {
        for at in SamplePlan::new(50, 23).tangent_samples(m).unwrap() {
            let r = zoo::funk_pde_residual(m, &at.x, &at.y).unwrap();
            assert!(r <= 1e-8, "{}: residual {r:e} at {:?}", m.name(), at.x);
        }
    }
}

#[test]
fn sphere_and_hyperbolic_curvature() {
    for (spec, k) in [("riemannian:dimension=2;model=sphere", 1.0), ("riemannian:dimension=3;model=hyperbolic_disk", -1.0)] {
        let m = zoo::MetricSpec::load(spec).unwrap().build().unwrap();
        for (at, u) in SamplePlan::new(50, 2).flags(&m).unwrap() {
            let observed = flag_curvature(&m, &at, &u).unwrap();
            assert!((observed - k).abs() <= 1e-8, "{spec}: {observed}");
            assert!(mean_cartan(&m, &at).unwrap().norm() <= 1e-10);
            assert!(mean_landsberg(&m, &at).unwrap().norm() <= 1e-10);
            assert!(s_curvature(&m, &at).unwrap().abs() <= 1e-4);
        }
    }
}

#[test]
fn szabo_gate_accepts_and_rejects() {
    assert!(zoo::szabo_epsilon(0.5).is_ok());
    assert!(zoo::szabo_epsilon(-0.3).is_ok());
    match zoo::szabo_epsilon(-0.8) {
        Err(Error::InvalidProfile { condition, .. }) => assert!(!condition.is_empty()),
        other => panic!("expected a profile error, got {other:?}"),
    }
    let bound = zoo::szabo_epsilon_lower_bound(1e-6);
    assert!((bound + 2f64.sqrt() / 3.0).abs() < 1e-3, "{bound}");
}

#[test]
fn szabo_is_berwald_with_nonpositive_curvature() {
    let m = zoo::szabo_epsilon(0.5).unwrap();
    for (at, u) in SamplePlan::new(100, 4).flags(&m).unwrap() {
        assert!(flag_curvature(&m, &at, &u).unwrap() <= 1e-8);
        assert!(mean_landsberg(&m, &at).unwrap().norm() <= 1e-7);
        assert!(finsler::geometry::berwald_defect(&m, &at).unwrap() <= 1e-7);
    }
}

#[test]
fn randers_rejects_long_beta() {
    let spec = zoo::MetricSpec::load("randers:dimension=2;b=1.1,0").unwrap();
    assert!(spec.build().is_err());
}
