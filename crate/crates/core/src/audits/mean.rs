use crate::dynamics::{ModelSpec, Orbit};
use crate::families::{symmetry_residual, CKernel, FMapFamily};
use crate::report::{AuditReport, Check, Status};

const ANCHOR_TWO: &str = "mean-volume-two-sellers";
const ANCHOR_BAND: &str = "mean-volume-band";
const EXACT: f64 = 1e-14;
const SLACK: f64 = 1e-12;

/// Invariants of the mean buyer fraction.
///
/// Two sellers with a symmetric `f`: `S_t = 2<x^t> - 1` keeps its sign, never grows,
/// and strictly shrinks whenever the step moves `rho_1` away from 1.
/// More sellers with the price-elastic family: the band
/// `[1/(N-1), N - 1/(N-1)]` for `N <x>` is invariant and attracts from both sides.
pub fn audit_mean_volume(orbit: &Orbit, model: &ModelSpec) -> AuditReport {
    let mut rep = AuditReport::new();
    if !orbit.is_stepwise() {
        rep.push(Check::not_applicable("mean.stepwise", ANCHOR_TWO, "orbit was recorded with a stride"));
        return rep;
    }
    rep.constant("mean_x.final", orbit.mean_x(orbit.len() - 1));
    if model.n == 2 {
        two_sellers(&mut rep, orbit, model);
    } else {
        many_sellers(&mut rep, orbit, model);
    }
    rep
}

fn two_sellers(rep: &mut AuditReport, orbit: &Orbit, model: &ModelSpec) {
    let sym = symmetry_residual(&model.f, 40);
    if sym > SLACK {
        for name in ["mean.half_preserved", "mean.sign_preserved", "mean.non_increasing", "mean.strict_decrease"] {
            rep.push(Check::not_applicable(name, ANCHOR_TWO, format!("f is not reflection symmetric ({sym:e})")));
        }
        return;
    }
    let s: Vec<f64> = (0..orbit.len()).map(|k| 2.0 * orbit.mean_x(k) - 1.0).collect();
    let (mut half, mut half_bad, mut sign_bad, mut grow_bad, mut strict_bad, mut strict_n) = (0, 0, 0, 0, 0, 0);
    let mut grow: f64 = 0.0;
    for k in 0..s.len() - 1 {
        let (a, b) = (s[k], s[k + 1]);
        if a.abs() <= EXACT {
            half += 1;
            if b.abs() > EXACT {
                half_bad += 1;
            }
            continue;
        }
        if b.abs() > EXACT && a.signum() != b.signum() {
            sign_bad += 1;
        }
        grow = grow.max(b.abs() - a.abs());
        if b.abs() > a.abs() + SLACK {
            grow_bad += 1;
        }
        let moved = orbit.rho[k + 1][0].ln().abs() > 1e-6;
        if moved && a.abs() > 1e-9 {
            strict_n += 1;
            if b.abs() >= a.abs() {
                strict_bad += 1;
            }
        }
    }
    let push = |rep: &mut AuditReport, name: &str, bad: usize, n: usize, measured: f64, tol: f64| {
        let status = if n == 0 { Status::NotApplicable } else { Status::from_bool(bad == 0) };
        rep.push(Check::new(name, status, measured, tol, ANCHOR_TWO).with_detail(format!("{bad} of {n} steps violate")));
    };
    let steps = s.len() - 1;
    push(rep, "mean.half_preserved", half_bad, half, half_bad as f64, EXACT);
    push(rep, "mean.sign_preserved", sign_bad, steps - half, sign_bad as f64, EXACT);
    push(rep, "mean.non_increasing", grow_bad, steps - half, grow, SLACK);
    push(rep, "mean.strict_decrease", strict_bad, strict_n, strict_bad as f64, 0.0);
}

fn admissible_many(f: &FMapFamily) -> bool {
    matches!(f, FMapFamily::Spefam { .. } | FMapFamily::PiecewiseAffine { c: CKernel::ExpAbsLog })
}

fn many_sellers(rep: &mut AuditReport, orbit: &Orbit, model: &ModelSpec) {
    let names = ["mean.band_lower_invariant", "mean.band_upper_invariant", "mean.below_band_increase", "mean.above_band_decrease"];
    if !admissible_many(&model.f) {
        for name in names {
            rep.push(Check::not_applicable(name, ANCHOR_BAND, "needs the price-elastic family"));
        }
        return;
    }
    let nf = model.n as f64;
    let lo = 1.0 / (nf - 1.0);
    let hi = nf - lo;
    rep.constant("mean.band_lower", lo / nf);
    rep.constant("mean.band_upper", hi / nf);
    let tot: Vec<f64> = orbit.x.iter().map(|x| x.iter().sum()).collect();
    let mut counts = [(0usize, 0usize); 4];
    for k in 0..tot.len() - 1 {
        let (a, b) = (tot[k], tot[k + 1]);
        let moved = orbit.prices(k + 1).windows(2).any(|w| w[0] != w[1]);
        if a >= lo - SLACK {
            counts[0].0 += 1;
            counts[0].1 += usize::from(b < lo - SLACK);
        }
        if a <= hi + SLACK {
            counts[1].0 += 1;
            counts[1].1 += usize::from(b > hi + SLACK);
        }
        if a < lo - SLACK && moved {
            counts[2].0 += 1;
            counts[2].1 += usize::from(b <= a);
        }
        if a > hi + SLACK && moved {
            counts[3].0 += 1;
            counts[3].1 += usize::from(b >= a);
        }
    }
    for (name, (n, bad)) in names.iter().zip(counts) {
        let status = if n == 0 { Status::NotApplicable } else { Status::from_bool(bad == 0) };
        rep.push(
            Check::new(name, status, bad as f64, SLACK, ANCHOR_BAND).with_detail(format!("{bad} of {n} steps violate")),
        );
    }
}
