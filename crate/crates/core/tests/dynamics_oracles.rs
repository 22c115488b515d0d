//! Single steps checked against values worked out by hand.

use approx::assert_abs_diff_eq;
use marketdyn::dynamics::*;
use marketdyn::families::*;

fn model(n: usize, alpha: f64) -> ModelSpec {
    ModelSpec::new(
        n,
        alpha,
        FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog },
        GMapFamily::Linear { a: 0.5 },
    )
    .unwrap()
}

#[test]
fn two_seller_step() {
    let m = model(2, 0.0);
    let s = MarketState::new(vec![0.6, 0.4], vec![1.0, 1.0]).unwrap();
    let t = step_full(&m, &s).unwrap();
    assert_abs_diff_eq!(t.p[0], 1.1, epsilon = 1e-15);
    assert_abs_diff_eq!(t.p[1], 0.9, epsilon = 1e-15);
    let x1 = 0.6 * 0.9 / 1.1;
    assert_abs_diff_eq!(t.x[0], x1, epsilon = 1e-15);
    assert_abs_diff_eq!(t.x[1], 1.0 - x1, epsilon = 1e-15);

    let k = step_skew(&m, &project_to_skew(&s)).unwrap();
    assert_abs_diff_eq!(k.rho[0], 1.1 / 0.9, epsilon = 1e-15);
    assert_abs_diff_eq!(k.x[0], x1, epsilon = 1e-15);
}

#[test]
fn three_seller_step() {
    let m = model(3, 0.25);
    let s = MarketState::new(vec![0.2, 0.5, 0.8], vec![1.0, 1.0, 1.0]).unwrap();
    let t = step_full(&m, &s).unwrap();
    let p = [1.0 - 0.5 * 0.45, 1.0, 1.0 + 0.5 * 0.45];
    for (got, want) in t.p.iter().zip(p) {
        assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
    }
    let r1 = p[0] / ((p[1] + p[2]) / 2.0);
    let x1 = 0.25 * 0.2 + 0.75 * (1.0 - r1 * 0.8);
    assert_abs_diff_eq!(t.x[0], x1, epsilon = 1e-15);
    let r3 = p[2] / ((p[0] + p[1]) / 2.0);
    let x3 = 0.25 * 0.8 + 0.75 * (0.8 / r3);
    assert_abs_diff_eq!(t.x[2], x3, epsilon = 1e-15);
    assert_abs_diff_eq!(t.x[1], 0.5, epsilon = 1e-15);
}

#[test]
fn alternative_two_seller_step() {
    let m = model(2, 0.0);
    let s = MarketState::new(vec![0.6, 0.4], vec![1.0, 1.0]).unwrap();
    let t = step_alt2(&m, &s).unwrap();
    assert_abs_diff_eq!(t.x[0], 0.6 / 1.1, epsilon = 1e-15);
    assert_abs_diff_eq!(t.x[1], 1.0 - 0.9 * 0.6, epsilon = 1e-15);
    assert!(step_alt2(&model(3, 0.0), &MarketState::synchronized(3, 0.5, 1.0)).is_err());
}

#[test]
fn synchronized_states_are_fixed() {
    for n in [2, 3, 6] {
        let m = model(n, 0.3);
        let s = MarketState::synchronized(n, 0.37, 2.5);
        let t = step_full(&m, &s).unwrap();
        assert_eq!(t, s);
        assert_eq!(distance_to_fixed_set(&t), 0.0);
    }
}

#[test]
fn simulate_records_initial_and_final() {
    let m = model(2, 0.0);
    let s = MarketState::new(vec![0.6, 0.4], vec![1.0, 1.0]).unwrap();
    let o = simulate(&m, &s, 1, 1).unwrap();
    assert_eq!(o.len(), 2);
    assert_eq!(o.t, vec![0, 1]);
    let o = simulate(&m, &s, 10, 4).unwrap();
    assert_eq!(o.t, vec![0, 4, 8, 10]);
    assert!(simulate(&m, &s, 10, 0).is_err());
}

#[test]
fn inverse_undoes_step() {
    let m = model(3, 0.2);
    let s = MarketState::new(vec![0.3, 0.55, 0.7], vec![1.2, 0.9, 1.0]).unwrap();
    let back = inverse_step(&m, &step_full(&m, &s).unwrap()).unwrap();
    for i in 0..3 {
        assert_abs_diff_eq!(back.x[i], s.x[i], epsilon = 1e-10);
        assert_abs_diff_eq!(back.p[i], s.p[i], epsilon = 1e-10);
    }
}

#[test]
fn rejects_bad_states() {
    assert!(MarketState::new(vec![0.5, 1.2], vec![1.0, 1.0]).is_err());
    assert!(MarketState::new(vec![0.5, 0.5], vec![1.0, 0.0]).is_err());
    assert!(MarketState::new(vec![0.5, 0.5], vec![1.0]).is_err());
    let m = model(3, 0.0);
    assert!(step_full(&m, &MarketState::synchronized(2, 0.5, 1.0)).is_err());
    assert!(ModelSpec::new(1, 0.0, m.f, m.g).is_err());
    assert!(ModelSpec::new(2, 1.0, m.f, m.g).is_err());
}

#[test]
fn csv_round_trip() {
    let m = model(3, 0.1);
    let s = MarketState::new(vec![0.3, 0.55, 0.7], vec![1.2, 0.9, 1.0]).unwrap();
    let o = simulate(&m, &s, 20, 3).unwrap();
    let mut buf = Vec::new();
    o.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("t,x_1,x_2,x_3,p_1,p_2,p_3,rho_1,rho_2,mean_x,price_product,dist_fixed\n"));
    let back = Orbit::read_csv(&buf[..]).unwrap();
    assert_eq!(back.t, o.t);
    assert_eq!(back.x, o.x);
    assert_eq!(back.p, o.p);
    assert!(Orbit::read_csv("t,x_1\n0,zz\n".as_bytes()).is_err());
}
