//! Hand-derived values for the map families.

use approx::assert_abs_diff_eq;
use marketdyn::families::*;

fn smooth_default() -> FMapFamily {
    FMapFamily::SmoothC4(SmoothC4::new(CKernel::ExpSqLog, BKind::LogOdd, 3.0, 1.0 / 3.0).unwrap())
}

fn k_default() -> f64 {
    (1.0 - (-(3f64.ln()).powi(2)).exp()) / (2.0 * 3f64.ln())
}

#[test]
fn piecewise_affine_values() {
    let f = FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog };
    assert_abs_diff_eq!(eval_f(&f, 2.0, 0.6).unwrap(), 0.3, epsilon = 1e-15);
    assert_abs_diff_eq!(eval_f(&f, 0.5, 0.4).unwrap(), 0.7, epsilon = 1e-15);
    assert_eq!(eval_f(&f, 1.0, 0.37).unwrap(), 0.37);
    let g = FMapFamily::PiecewiseAffine { c: CKernel::ExpSqLog };
    let e = std::f64::consts::E;
    assert_abs_diff_eq!(eval_f(&g, e, 0.5).unwrap(), 0.5 / e, epsilon = 1e-15);
}

#[test]
fn damped_and_iterated() {
    let f = FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog };
    assert_abs_diff_eq!(eval_f_alpha(&f, 0.9, 2.0, 0.6).unwrap(), 0.57, epsilon = 1e-15);
    assert_abs_diff_eq!(iterate_f_alpha(&f, 0.0, 2.0, 1.0, 3).unwrap(), 0.125, epsilon = 1e-15);
    assert_eq!(iterate_f_alpha(&f, 0.4, 2.0, 0.8, 0).unwrap(), 0.8);
}

#[test]
fn rejects_bad_inputs() {
    let f = FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog };
    assert!(matches!(eval_f(&f, 0.0, 0.5), Err(marketdyn::FamilyError::InvalidRatio(_))));
    assert!(matches!(eval_f(&f, -1.0, 0.5), Err(marketdyn::FamilyError::InvalidRatio(_))));
    assert!(matches!(eval_f(&f, 2.0, 1.5), Err(marketdyn::FamilyError::InvalidFraction(_))));
    assert!(eval_f(&f, f64::NAN, 0.5).is_err());
}

#[test]
fn spefam_values() {
    let z = FMapFamily::Spefam { dev: Deviation::Zero };
    assert_abs_diff_eq!(eval_f(&z, 2.0, 0.6).unwrap(), 0.3, epsilon = 1e-15);
    assert_abs_diff_eq!(eval_f(&z, 0.5, 0.4).unwrap(), 0.7, epsilon = 1e-15);
    let q = FMapFamily::Spefam { dev: Deviation::Quadratic { kappa: 1.0 } };
    assert_abs_diff_eq!(eval_f(&q, 2.0, 0.6).unwrap(), 0.36, epsilon = 1e-15);
    assert_abs_diff_eq!(eval_f(&q, 0.5, 0.4).unwrap(), 0.64, epsilon = 1e-15);
}

#[test]
fn smooth_values() {
    let f = smooth_default();
    let k = k_default();
    assert_abs_diff_eq!(k, 0.318_989_477, epsilon = 1e-9);
    let c4 = (-(4f64.ln()).powi(2)).exp();
    assert_abs_diff_eq!(eval_f(&f, 4.0, 0.5).unwrap(), 0.5 * c4, epsilon = 1e-15);
    assert_abs_diff_eq!(eval_f(&f, 2.0, 0.5).unwrap(), 0.5 - k * 2f64.ln(), epsilon = 1e-15);
    assert_abs_diff_eq!(eval_f(&f, 0.5, 0.5).unwrap(), 0.5 + k * 2f64.ln(), epsilon = 1e-15);
    for &x in &[0.0, 0.1, 0.2, 1.0 / 3.0, 0.7, 1.0] {
        assert_eq!(eval_f(&f, 1.0, x).unwrap(), x);
    }
    // continuity across rho0 and x0
    let c3 = (-(3f64.ln()).powi(2)).exp();
    for &x in &[0.05, 0.2, 0.5, 0.9] {
        assert_abs_diff_eq!(eval_f(&f, 3.0 - 1e-12, x).unwrap(), c3 * x, epsilon = 1e-10);
    }
    let left = eval_f(&f, 1.7, 1.0 / 3.0 - 1e-13).unwrap();
    let right = eval_f(&f, 1.7, 1.0 / 3.0 + 1e-13).unwrap();
    assert_abs_diff_eq!(left, right, epsilon = 1e-11);
}

#[test]
fn smooth_center_derivatives() {
    let k = k_default();
    let d = f_center_derivatives(&smooth_default()).unwrap();
    assert_abs_diff_eq!(d.f_p, -k, epsilon = 1e-14);
    assert_abs_diff_eq!(d.f_rho2, k, epsilon = 1e-14);
    assert_abs_diff_eq!(d.f_rho3, -2.0 * k, epsilon = 1e-14);
    assert_abs_diff_eq!(d.f_rho2x, -2.0, epsilon = 1e-14);
    assert_eq!(d.f_rhox, 0.0);
    assert_eq!(d.f_rhox2, 0.0);
    // f'_rho^2 = -f'_rho at the centre under reflection symmetry
    assert_abs_diff_eq!(d.f_rho2, -d.f_p, epsilon = 1e-14);
}

#[test]
fn affine_with_kinked_kernel_is_non_smooth() {
    let f = FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog };
    assert!(matches!(f_center_derivatives(&f), Err(marketdyn::FamilyError::NonSmooth(_))));
}

#[test]
fn asymmetric_envelope_match() {
    let f = FMapFamily::Asymmetric { c: CKernel::ExpAbsLog, gamma_above: 0.3, gamma_below: 0.15 };
    for &r in &[1.5, 2.0, 5.0] {
        let lo = eval_f_dx(&f, r, 0.0).unwrap();
        let hi = eval_f_dx(&f, 1.0 / r, 1.0).unwrap();
        assert_abs_diff_eq!(lo, hi, epsilon = 1e-14);
    }
    // reflection symmetry is broken on purpose
    let resid = eval_f(&f, 0.5, 0.3).unwrap() - 1.0 + eval_f(&f, 2.0, 0.7).unwrap();
    assert!(resid.abs() > 1e-3);
}

#[test]
fn g_values() {
    let lin = GMapFamily::Linear { a: 0.5 };
    let quad = GMapFamily::Quadratic { a: 0.5, b: -0.1 };
    assert_abs_diff_eq!(eval_g(&lin, 0.4).unwrap(), 0.2, epsilon = 1e-15);
    assert_abs_diff_eq!(eval_g(&quad, 0.4).unwrap(), 0.184, epsilon = 1e-15);
    assert!(eval_g(&lin, 1.5).is_err());
    assert_abs_diff_eq!(g_center_derivatives(&lin).k_g, 0.5, epsilon = 1e-15);
    assert_abs_diff_eq!(g_center_derivatives(&quad).k_g, 1.1, epsilon = 1e-15);
    assert_abs_diff_eq!(compute_s_g(&lin), 3.0, epsilon = 1e-15);
    assert!(compute_s_g(&GMapFamily::Linear { a: 1.0 }).is_infinite());
}

#[test]
fn c_n_values() {
    assert_abs_diff_eq!(compute_c_n(5, 0.5).unwrap(), 0.3, epsilon = 1e-15);
    assert_abs_diff_eq!(compute_c_n(5, 2.0).unwrap(), 1.0 / 6.0, epsilon = 1e-15);
    let expect = ((5.0 - 3.5) * 3.5 - 4.0) / (4.0 * 3.5);
    assert_abs_diff_eq!(compute_c_n(5, 3.5).unwrap(), expect, epsilon = 1e-15);
    assert_eq!(compute_c_n(5, 1.0).unwrap(), 0.0);
    assert!(compute_c_n(5, 4.0).is_err());
    assert!(compute_c_n(2, 0.5).is_err());
    assert!(compute_c_n(4, 2.0).is_err());
    assert!(compute_c_n(4, 0.5).is_ok());
}

#[test]
fn validators_accept_reference_families() {
    for f in [
        FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog },
        FMapFamily::Spefam { dev: Deviation::Zero },
        smooth_default(),
    ] {
        let r = validate_f(&f, 2, 41);
        assert!(r.all_pass(), "{f:?}: {:?}", r.failures().collect::<Vec<_>>());
    }
    let r = validate_g(&GMapFamily::Linear { a: 0.5 }, 2, 0);
    assert!(r.all_pass());
    let r = validate_g(&GMapFamily::Quadratic { a: 0.5, b: 0.1 }, 2, 0);
    assert_eq!(r.get("g.hg2").unwrap().status, marketdyn::Status::Fail);
    let r = validate_g(&GMapFamily::Linear { a: 1.5 }, 2, 0);
    assert_eq!(r.get("g.hg1").unwrap().status, marketdyn::Status::Fail);
}

#[test]
fn validator_rejects_large_deviation_for_many_sellers() {
    let f = FMapFamily::Spefam { dev: Deviation::Quadratic { kappa: 0.2 } };
    let ok = validate_f(&f, 2, 41);
    assert!(ok.all_pass(), "{:?}", ok.failures().collect::<Vec<_>>());
    let r = validate_f(&f, 3, 41);
    assert_eq!(r.get("f.spefam.c_n").unwrap().status, marketdyn::Status::Fail);
}
