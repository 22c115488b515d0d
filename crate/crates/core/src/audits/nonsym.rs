use crate::dynamics::{ModelSpec, Orbit};
use crate::families::FMapFamily;
use crate::report::{AuditReport, Check, Status};

const ANCHOR: &str = "non-symmetric-envelope";
const SLACK: f64 = 1e-12;

/// Grid check that `f` matches its slopes at the two fixed points and stays within
/// `gamma` of its linearisations there.
pub fn envelope_defect(f: &FMapFamily, gamma: f64) -> f64 {
    let mut worst: f64 = 0.0;
    let xs: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
    for i in 1..=60 {
        let r = (3.0 * i as f64 / 60.0).exp();
        let c = f.dx(r, 0.0);
        worst = worst.max((c - f.dx(1.0 / r, 1.0)).abs());
        let ci = f.dx(1.0 / r, 1.0);
        for &x in &xs {
            let v = f.value(r, x);
            worst = worst.max(c * x - v).max(v - c * x - gamma * (1.0 - c));
            let w = f.value(1.0 / r, x);
            let top = 1.0 - ci * (1.0 - x);
            worst = worst.max(w - top).max(top - gamma * (1.0 - ci) - w);
        }
    }
    worst
}

/// Two sellers without reflection symmetry: `2<x> - 1 - gamma` and `2<x> - 1 + gamma`
/// contract by the slope at the fixed points, so `[(1-gamma)/2, (1+gamma)/2]` is invariant.
/// The two inequalities are checked separately on steps with `rho_1 >= 1` and `rho_1 < 1`.
pub fn audit_nonsym_bounds(orbit: &Orbit, model: &ModelSpec, gamma: f64) -> AuditReport {
    let mut rep = AuditReport::new();
    let names = [
        "nonsym.upper_rho_above",
        "nonsym.upper_rho_below",
        "nonsym.lower_rho_above",
        "nonsym.lower_rho_below",
        "nonsym.interval_invariant",
    ];
    let na = |rep: &mut AuditReport, why: String| {
        for name in names {
            rep.push(Check::not_applicable(name, ANCHOR, why.clone()));
        }
    };
    if model.n != 2 || !orbit.is_stepwise() {
        na(&mut rep, "needs a stepwise two-seller orbit".into());
        return rep;
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        na(&mut rep, format!("gamma = {gamma} outside (0, 1)"));
        return rep;
    }
    let defect = envelope_defect(&model.f, gamma);
    rep.constant("nonsym.envelope_defect", defect);
    if defect > SLACK {
        na(&mut rep, format!("f violates the envelope conditions by {defect:e}"));
        return rep;
    }
    let a = model.alpha;
    // [upper above, upper below, lower above, lower below] as (steps, violations, worst)
    let mut acc = [(0usize, 0usize, f64::NEG_INFINITY); 4];
    let (mut inv, mut inv_n) = (0, 0);
    let (il, ih) = ((1.0 - gamma) / 2.0, (1.0 + gamma) / 2.0);
    for k in 0..orbit.len() - 1 {
        let s = 2.0 * orbit.mean_x(k) - 1.0;
        let s1 = 2.0 * orbit.mean_x(k + 1) - 1.0;
        let r = orbit.rho[k + 1][0];
        let slope = if r > 1.0 {
            model.f.dx(r, 0.0)
        } else if r < 1.0 {
            model.f.dx(r, 1.0)
        } else {
            1.0
        };
        let kappa = a + (1.0 - a) * slope;
        let du = (s1 - gamma) - kappa * (s - gamma);
        let dl = kappa * (s + gamma) - (s1 + gamma);
        let side = usize::from(r < 1.0);
        for (j, d) in [(side, du), (2 + side, dl)] {
            acc[j].0 += 1;
            acc[j].1 += usize::from(d > SLACK);
            acc[j].2 = acc[j].2.max(d);
        }
        let m = orbit.mean_x(k);
        if m >= il - SLACK && m <= ih + SLACK {
            inv_n += 1;
            let m1 = orbit.mean_x(k + 1);
            inv += usize::from(m1 < il - SLACK || m1 > ih + SLACK);
        }
    }
    for (j, &(n, bad, worst)) in acc.iter().enumerate() {
        let st = if n == 0 { Status::NotApplicable } else { Status::from_bool(bad == 0) };
        rep.push(Check::new(names[j], st, worst, SLACK, ANCHOR).with_detail(format!("{bad} of {n} steps violate")));
    }
    let st = if inv_n == 0 { Status::NotApplicable } else { Status::from_bool(inv == 0) };
    rep.push(Check::new(names[4], st, inv as f64, SLACK, ANCHOR).with_detail(format!("{inv} of {inv_n} steps leave")));
    rep
}
