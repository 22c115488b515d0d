use marketdyn::dynamics::*;
use marketdyn::families::*;
use proptest::prelude::*;

fn families() -> impl Strategy<Value = FMapFamily> {
    prop_oneof![
        Just(FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog }),
        Just(FMapFamily::PiecewiseAffine { c: CKernel::ExpSqLog }),
        (0.0..0.9f64).prop_map(|kappa| FMapFamily::Spefam { dev: Deviation::Quadratic { kappa } }),
        Just(FMapFamily::SmoothC4(SmoothC4::new(CKernel::ExpSqLog, BKind::LogOdd, 3.0, 1.0 / 3.0).unwrap())),
        Just(FMapFamily::Asymmetric { c: CKernel::ExpAbsLog, gamma_above: 0.3, gamma_below: 0.15 }),
    ]
}

fn models() -> impl Strategy<Value = ModelSpec> {
    (2usize..7, 0.0..0.95f64, families(), 0.05..0.95f64, -0.2..0.0f64).prop_map(|(n, alpha, f, a, b)| {
        let g = if b > -0.1 { GMapFamily::Linear { a } } else { GMapFamily::Quadratic { a, b } };
        ModelSpec::new(n, alpha, f, g).unwrap()
    })
}

fn case() -> impl Strategy<Value = (ModelSpec, MarketState)> {
    models().prop_flat_map(|m| {
        let n = m.n;
        (Just(m), prop::collection::vec(0.0..=1.0f64, n), prop::collection::vec(0.2..5.0f64, n))
            .prop_map(|(m, x, p)| (m, MarketState::new(x, p).unwrap()))
    })
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn fractions_stay_in_unit_interval((m, s) in case()) {
        let t = step_full(&m, &s).unwrap();
        prop_assert!(t.x.iter().all(|v| (0.0..=1.0).contains(v)));
        prop_assert!(t.p.iter().all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn permutation_equivariant((m, s) in case(), shift in 1usize..6) {
        let n = s.n();
        let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
        let ps = MarketState { x: perm.iter().map(|&j| s.x[j]).collect(), p: perm.iter().map(|&j| s.p[j]).collect() };
        let a = step_full(&m, &s).unwrap();
        let b = step_full(&m, &ps).unwrap();
        for (k, &j) in perm.iter().enumerate() {
            prop_assert!(close(b.x[k], a.x[j], 1e-14), "x {} vs {}", b.x[k], a.x[j]);
            prop_assert!(close(b.p[k], a.p[j], 1e-14));
        }
    }

    #[test]
    fn price_scale_equivariant((m, s) in case(), lambda in 0.1..10.0f64) {
        let scaled = MarketState { x: s.x.clone(), p: s.p.iter().map(|p| p * lambda).collect() };
        let a = step_full(&m, &s).unwrap();
        let b = step_full(&m, &scaled).unwrap();
        for i in 0..s.n() {
            prop_assert!(close(b.x[i], a.x[i], 1e-12));
            prop_assert!(close(b.p[i], a.p[i] * lambda, 1e-12));
        }
    }

    #[test]
    fn skew_map_commutes_with_projection((m, s) in case()) {
        let a = project_to_skew(&step_full(&m, &s).unwrap());
        let b = step_skew(&m, &project_to_skew(&s)).unwrap();
        for i in 0..s.n() {
            prop_assert!(close(a.x[i], b.x[i], 1e-12));
        }
        for i in 0..s.n() - 1 {
            prop_assert!(close(a.rho[i], b.rho[i], 1e-12));
        }
    }

    #[test]
    fn inverse_round_trip((m, s) in case()) {
        let s = MarketState { x: s.x.iter().map(|v| 0.02 + 0.96 * v).collect(), p: s.p };
        let t = step_full(&m, &s).unwrap();
        let back = inverse_step(&m, &t).unwrap();
        for i in 0..s.n() {
            prop_assert!((back.x[i] - s.x[i]).abs() <= 1e-10);
            prop_assert!(close(back.p[i], s.p[i], 1e-10));
        }
    }

    #[test]
    fn synchronized_is_fixed(m in models(), x in 0.0..=1.0f64, p in 0.1..10.0f64) {
        let s = MarketState::synchronized(m.n, x, p);
        prop_assert_eq!(step_full(&m, &s).unwrap(), s);
    }

    #[test]
    fn simulation_is_deterministic((m, s) in case()) {
        let a = simulate(&m, &s, 50, 7).unwrap();
        let b = simulate(&m, &s, 50, 7).unwrap();
        prop_assert_eq!(a, b);
    }
}
