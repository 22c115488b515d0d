use approx::assert_relative_eq;
use marketdyn::dynamics::{ModelSpec, SkewState};
use marketdyn::families::{BKind, CKernel, FMapFamily, GMapFamily, SmoothC4};
use marketdyn::stability::*;
use marketdyn::StabilityError;
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const K_LOG_ODD: f64 = 0.318_989_477;

fn smooth() -> FMapFamily {
    FMapFamily::SmoothC4(SmoothC4::new(CKernel::ExpSqLog, BKind::LogOdd, 3.0, 1.0 / 3.0).unwrap())
}

fn rotation_model(theta: f64, g: GMapFamily) -> ModelSpec {
    let f = smooth();
    let f_p = transverse_inputs(&ModelSpec::new(2, 0.0, f, g).unwrap(), 0.5).unwrap().0;
    let alpha = alpha_for_theta(theta, f_p, g.slope()).unwrap();
    ModelSpec::new(2, alpha, f, g).unwrap()
}

#[test]
fn inertia_for_a_thirty_degree_rotation() {
    let m = rotation_model(PI / 6.0, GMapFamily::Linear { a: 0.5 });
    assert_relative_eq!(m.alpha, 0.580_003_085_6, epsilon = 1e-9);
    let (f_p, _) = transverse_inputs(&m, 0.5).unwrap();
    assert_relative_eq!(f_p, -K_LOG_ODD, epsilon = 1e-9);
    assert_relative_eq!(theta_of(&m, 0.5).unwrap(), PI / 6.0, epsilon = 1e-12);
    let e = eigen_transverse(&m, 0.5).unwrap();
    assert_eq!(e.classification, Classification::Elliptic);
    let target = Complex64::from_polar(1.0, PI / 6.0);
    assert!((e.lambda_plus - target).norm() < 1e-12);
    assert!((e.lambda_minus - target.conj()).norm() < 1e-12);
}

#[test]
fn eigen_product_is_one_on_elliptic_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut n = 0;
    while n < 1000 {
        let alpha = rng.gen_range(0.0..1.0);
        let f_p = -rng.gen_range(1e-3..3.0);
        let g_p = rng.gen_range(1e-3..3.0);
        let e = transverse_eigen_from(alpha, f_p, g_p);
        if e.classification != Classification::Elliptic {
            continue;
        }
        n += 1;
        assert!((e.lambda_plus * e.lambda_minus - 1.0).norm() < 1e-12);
        assert!((e.lambda_plus.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn eigen_classification_boundaries() {
    assert_eq!(transverse_eigen_from(0.5, 0.0, 1.0).classification, Classification::Parabolic);
    assert_eq!(transverse_eigen_from(0.5, -1.0, 0.0).classification, Classification::Parabolic);
    assert_eq!(transverse_eigen_from(0.0, -1.0, 1.0).classification, Classification::Elliptic);
    assert_eq!(transverse_eigen_from(0.0, -2.0, 1.0).classification, Classification::Hyperbolic);
    assert_eq!(transverse_eigen_from(0.0, 1.0, 1.0).classification, Classification::Hyperbolic);
    let e = transverse_eigen_from(0.0, -2.0, 1.0);
    assert!((e.lambda_plus * e.lambda_minus - 1.0).norm() < 1e-12);
    assert_relative_eq!(theta_from(0.0, -1.0, 1.0).unwrap(), PI, epsilon = 1e-15);
    assert!(theta_from(0.0, -2.0, 1.0).is_err());
    assert!(theta_from(0.0, 1.0, 1.0).is_err());
    assert!(alpha_for_theta(0.0, -1.0, 1.0).is_err());
    assert!(alpha_for_theta(PI / 6.0, -0.001, 1.0).is_err());
}

#[test]
fn margin_matches_closed_form_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut n = 0;
    while n < 100 {
        let inp = NormalFormInputs {
            alpha: rng.gen_range(0.0..0.99),
            g_p: rng.gen_range(0.05..2.0),
            k_g: rng.gen_range(-3.0..3.0),
            f_p: -rng.gen_range(0.05..2.0),
            f_rho2: rng.gen_range(-3.0..3.0),
            f_rho3: rng.gen_range(-3.0..3.0),
            f_rho2x: rng.gen_range(-3.0..3.0),
        };
        let Ok(theta) = inp.theta() else { continue };
        if theta.sin() < 1e-2 {
            continue;
        }
        n += 1;
        let nf = inp.normal_form().unwrap();
        assert_relative_eq!(8.0 * nf.margin, 8.0 * inp.closed_form_margin(), max_relative = 1e-10);
    }
}

fn third_partials_fd(frame: &NormalFrame, m: &ModelSpec) -> ThirdDerivatives {
    let map = |x: f64, y: f64| {
        let img = frame.step(m, &NormalCoords { mu: 0.5, z: Complex64::new(x, y) }).unwrap();
        (img.z.re, img.z.im)
    };
    let stencil = |h: f64, pick: fn((f64, f64)) -> f64| {
        let v = |x: f64, y: f64| pick(map(x, y));
        let xxx = (v(2.0 * h, 0.0) - 2.0 * v(h, 0.0) + 2.0 * v(-h, 0.0) - v(-2.0 * h, 0.0)) / (2.0 * h.powi(3));
        let yyy = (v(0.0, 2.0 * h) - 2.0 * v(0.0, h) + 2.0 * v(0.0, -h) - v(0.0, -2.0 * h)) / (2.0 * h.powi(3));
        let xxy = (v(h, h) - 2.0 * v(0.0, h) + v(-h, h) - v(h, -h) + 2.0 * v(0.0, -h) - v(-h, -h)) / (2.0 * h.powi(3));
        let xyy = (v(h, h) - 2.0 * v(h, 0.0) + v(h, -h) - v(-h, h) + 2.0 * v(-h, 0.0) - v(-h, -h)) / (2.0 * h.powi(3));
        [xxx, xxy, xyy, yyy]
    };
    let rich = |pick: fn((f64, f64)) -> f64| {
        let (a, b) = (stencil(1e-2, pick), stencil(5e-3, pick));
        [0, 1, 2, 3].map(|i| (4.0 * b[i] - a[i]) / 3.0)
    };
    ThirdDerivatives { x: rich(|p| p.0), y: rich(|p| p.1) }
}

#[test]
fn third_partials_match_the_real_map() {
    for (theta, g) in [
        (PI / 6.0, GMapFamily::Linear { a: 0.5 }),
        (PI / 3.0, GMapFamily::Quadratic { a: 0.8, b: -0.1 }),
        (0.4, GMapFamily::Quadratic { a: 0.6, b: 0.15 }),
    ] {
        let m = rotation_model(theta, g);
        let frame = NormalFrame::new(&m).unwrap();
        let rep = analyze_stability(&m).unwrap();
        let d = rep.f_derivatives.unwrap();
        let inp = NormalFormInputs {
            alpha: m.alpha,
            g_p: rep.g_derivatives.g_p,
            k_g: rep.g_derivatives.k_g,
            f_p: d.f_p,
            f_rho2: d.f_rho2,
            f_rho3: d.f_rho3,
            f_rho2x: d.f_rho2x,
        };
        let want = inp.third_derivatives().unwrap();
        let got = third_partials_fd(&frame, &m);
        for i in 0..4 {
            assert!((want.x[i] - got.x[i]).abs() < 1e-6 * (1.0 + want.x[i].abs()), "X[{i}] {} vs {}", want.x[i], got.x[i]);
            assert!((want.y[i] - got.y[i]).abs() < 1e-6 * (1.0 + want.y[i].abs()), "Y[{i}] {} vs {}", want.y[i], got.y[i]);
        }
    }
}

#[test]
fn analytic_jacobian_matches_differences() {
    for mu in [0.4, 0.5, 0.6] {
        for g in [GMapFamily::Linear { a: 0.5 }, GMapFamily::Quadratic { a: 0.7, b: 0.2 }] {
            let m = ModelSpec::new(2, 0.3, smooth(), g).unwrap();
            let p = SkewState::new(vec![mu, mu], vec![1.0]).unwrap();
            let num = numeric_jacobian(&m, &p, 1e-5).unwrap();
            let ana = jacobian_skew(&m, mu).unwrap();
            assert!((num - ana).abs().max() < 1e-6, "mu = {mu}: {num} vs {ana}");
        }
    }
}

#[test]
fn original_coordinate_jacobian_is_conjugate() {
    let m = ModelSpec::new(2, 0.3, smooth(), GMapFamily::Linear { a: 0.5 }).unwrap();
    let jo = jacobian_skew_original(&m, 0.5).unwrap();
    let jc = jacobian_skew(&m, 0.5).unwrap();
    let p = Matrix3::new(0.5, 0.5, 0.0, 0.5, -0.5, 0.0, 0.0, 0.0, 1.0);
    let conj = p * jo * p.try_inverse().unwrap();
    assert!((conj - jc).abs().max() < 1e-14);
    let fixed = jo * Vector3::new(1.0, 1.0, 0.0);
    assert!((fixed - Vector3::new(1.0, 1.0, 0.0)).abs().max() < 1e-14);
}

#[test]
fn numeric_jacobian_rejects_bad_steps() {
    let m = ModelSpec::new(2, 0.3, smooth(), GMapFamily::Linear { a: 0.5 }).unwrap();
    let p = SkewState::new(vec![0.5, 0.5], vec![1.0]).unwrap();
    assert!(matches!(numeric_jacobian(&m, &p, 1e-2), Err(StabilityError::StepSize(_))));
    assert!(matches!(numeric_jacobian(&m, &p, 1e-9), Err(StabilityError::StepSize(_))));
}

#[test]
fn normal_frame_round_trips_and_rotates() {
    let m = rotation_model(PI / 6.0, GMapFamily::Linear { a: 0.5 });
    let frame = NormalFrame::new(&m).unwrap();
    let s = SkewState::new(vec![0.52, 0.47], vec![1.03]).unwrap();
    let back = frame.from_normal(&frame.to_normal(&s)).unwrap();
    assert!((back.x[0] - s.x[0]).abs() < 1e-15 && (back.x[1] - s.x[1]).abs() < 1e-15);
    assert_relative_eq!(back.rho[0], s.rho[0], max_relative = 1e-15);
    let z0 = Complex64::new(1e-3, 0.0);
    let one = frame.step(&m, &NormalCoords { mu: 0.5, z: z0 }).unwrap();
    let lin = Complex64::from_polar(1.0, PI / 6.0) * z0;
    assert!((one.z - lin).norm() < 1e-5 * z0.norm());
    let tiny = frame.from_normal(&NormalCoords { mu: 0.5, z: Complex64::new(1e-4, 0.0) }).unwrap();
    let c = corroborate(&m, &tiny, 12, 12).unwrap();
    assert!((c.measured_theta - PI / 6.0).abs() < 1e-3);
}

#[test]
fn smooth_family_is_stable_with_closed_form_margin() {
    let m = rotation_model(PI / 6.0, GMapFamily::Linear { a: 0.5 });
    let rep = analyze_stability(&m).unwrap();
    assert_eq!(rep.verdict, Verdict::Stable, "{}", rep.reason);
    let want = (1.0 - m.alpha) * (-2.0) / 8.0;
    assert_relative_eq!(rep.margin().unwrap(), want, max_relative = 1e-12);
    assert_relative_eq!(rep.closed_form_margin.unwrap(), want, max_relative = 1e-12);
}

#[test]
fn verdicts_for_degenerate_and_hyperbolic_cases() {
    let lin = GMapFamily::Linear { a: 0.5 };
    let kinked = ModelSpec::new(2, 0.5, FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog }, lin).unwrap();
    let r = analyze_stability(&kinked).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.hypothesis("smooth_c4").is_some());

    let flat = ModelSpec::new(2, 0.5, FMapFamily::PiecewiseAffine { c: CKernel::ExpSqLog }, lin).unwrap();
    let r = analyze_stability(&flat).unwrap();
    assert_eq!(r.eigen.unwrap().classification, Classification::Parabolic);
    assert_eq!(r.verdict, Verdict::Unstable);

    let steep = ModelSpec::new(2, 0.0, smooth(), GMapFamily::Linear { a: 5.0 }).unwrap();
    let r = analyze_stability(&steep).unwrap();
    assert_eq!(r.eigen.unwrap().classification, Classification::Hyperbolic);
    assert_eq!(r.verdict, Verdict::Unstable);

    let quad = rotation_model(PI / 6.0, GMapFamily::Quadratic { a: 0.5, b: -0.1 });
    let r = analyze_stability(&quad).unwrap();
    assert_eq!(r.verdict, Verdict::Inconclusive);
    assert!(r.reason.contains("g_odd"));

    let three = ModelSpec::new(3, 0.5, smooth(), lin).unwrap();
    assert!(matches!(analyze_stability(&three), Err(StabilityError::Precondition(_))));
}
