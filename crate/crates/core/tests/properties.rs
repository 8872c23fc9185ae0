//! Property-based checks of the jet algebra and of metric identities.

use finsler::geometry::{fundamental_tensor, mean_cartan, riemann};
use finsler::jets::{layout::layout, Jet1, Scalar};
use finsler::verify::{ClaimSuite, SamplePlan};
use finsler::zoo;
use nalgebra::DVector;
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

fn jet(v: f64, order: usize) -> Jet1 {
    Jet1::variable(v, &[1.0], layout(1, order).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_ln_round_trip(v in 0.1f64..5.0) {
        let x = jet(v, 4);
        let back = x.exp().ln();
        for k in 0..=4usize {
            let idx = vec![0; k];
            prop_assert!(close(back.derivative(&idx).unwrap(), x.derivative(&idx).unwrap(), 1e-12));
        }
    }

    #[test]
    fn pythagorean_identity(v in -4.0f64..4.0) {
        let x = jet(v, 4);
        let one = x.sin().square() + x.cos().square();
        prop_assert!(close(*one.value(), 1.0, 1e-14));
        for k in 1..=4usize {
            prop_assert!(one.derivative(&vec![0; k]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn reciprocal_and_sqrt(v in 0.2f64..10.0) {
        let x = jet(v, 3);
        let r = x.recip() * x.clone();
        let s = x.sqrt().square() - x.clone();
        for k in 1..=3usize {
            prop_assert!(r.derivative(&vec![0; k]).unwrap().abs() < 1e-10);
            prop_assert!(s.derivative(&vec![0; k]).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn powf_matches_power_rule(v in 0.1f64..4.0, p in -2.5f64..2.5) {
        let d3 = jet(v, 3).powf(p).derivative(&[0, 0, 0]).unwrap();
        let expected = p * (p - 1.0) * (p - 2.0) * v.powf(p - 3.0);
        prop_assert!(close(d3, expected, 1e-10));
    }

    #[test]
    fn mixed_partials_commute(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let lay = layout(2, 3).unwrap();
        let x = Jet1::variable(a, &[1.0, 0.0], lay);
        let y = Jet1::variable(b, &[0.0, 1.0], lay);
        let f = (x.clone() * y.clone()).sin() * x.exp() + y.square() * x;
        prop_assert!(close(f.derivative(&[0, 1]).unwrap(), f.derivative(&[1, 0]).unwrap(), 1e-13));
        prop_assert!(close(f.derivative(&[0, 0, 1]).unwrap(), f.derivative(&[1, 0, 0]).unwrap(), 1e-13));
    }

    #[test]
    fn funk_flag_curvature_is_constant(a in -0.6f64..0.6, seed in 0u64..1000) {
        let m = zoo::funk_ball_shifted(&[a, 0.5 * a]).unwrap();
        for (at, u) in SamplePlan::new(5, seed).flags(&m).unwrap() {
            let k = finsler::geometry::flag_curvature(&m, &at, &u).unwrap();
            prop_assert!((k + 0.25).abs() <= 2.5e-7, "K = {}", k);
        }
    }

    #[test]
    fn randers_identities(b0 in -0.6f64..0.6, b1 in -0.6f64..0.6, seed in 0u64..1000) {
        let spec = zoo::MetricSpec::load(&format!("randers:dimension=2;b={b0},{b1}")).unwrap();
        let m = spec.build().unwrap();
        for at in SamplePlan::new(5, seed).tangent_samples(&m).unwrap() {
            let f = m.value(&at.x, &at.y);
            let y2: Vec<f64> = at.y.iter().map(|v| 3.7 * v).collect();
            prop_assert!(close(m.value(&at.x, &y2), 3.7 * f, 1e-13));
            let g = fundamental_tensor(&m, &at).unwrap();
            let y = DVector::from_row_slice(&at.y);
            prop_assert!(close(g.inner(&y, &y), f * f, 1e-12));
            prop_assert!(g.g.clone().symmetric_eigen().eigenvalues.min() > 0.0);
            prop_assert!(mean_cartan(&m, &at).unwrap().contract_y().abs() < 1e-10);
            let r = riemann(&m, &at).unwrap();
            prop_assert!((&r.r * &y).norm() <= 1e-9 * (1.0 + r.scale()));
        }
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), count in 1usize..20) {
        let m = zoo::funk_ball_shifted(&[0.2, 0.1]).unwrap();
        let a = SamplePlan::new(count, seed).flags(&m).unwrap();
        let b = SamplePlan::new(count, seed).flags(&m).unwrap();
        prop_assert_eq!(a.len(), count);
        for ((p, u), (q, v)) in a.iter().zip(&b) {
            prop_assert_eq!(&p.x, &q.x);
            prop_assert_eq!(&p.y, &q.y);
            prop_assert_eq!(u, v);
            prop_assert!(m.domain().contains(&p.x));
        }
    }

    #[test]
    fn claim_files_round_trip(tol in 1e-12f64..1.0, seed in any::<u64>(), count in 1usize..500, value in -10.0f64..10.0) {
        let text = format!(r#"
[[claim]]
id = "c"
statement = "s"
metric = {{ kind = "szabo_epsilon", epsilon = 0.25 }}
quantity = "s_curvature"
target = {{ kind = "value", value = {value:?} }}
tolerance = {{ value = {tol:?}, kind = "absolute" }}
samples = {{ count = {count}, seed = {seed} }}
"#);
        let suite = ClaimSuite::from_toml(&text).unwrap();
        prop_assert_eq!(ClaimSuite::from_toml(&suite.to_toml().unwrap()).unwrap(), suite);
    }

    #[test]
    fn szabo_gate_threshold(eps in -1.0f64..2.0) {
        let accepted = zoo::szabo_epsilon(eps).is_ok();
        let bound = -(2f64.sqrt()) / 3.0;
        if eps > bound + 1e-3 {
            prop_assert!(accepted);
        } else if eps < bound - 1e-3 {
            prop_assert!(!accepted);
        }
    }
}
