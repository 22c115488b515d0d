use super::constants::{compute_t_n, contraction_gamma};
use crate::dynamics::{ModelSpec, Orbit};
use crate::report::{AuditReport, Check, Status};

const ANCHOR: &str = "bounded-price-ratios";
const ANCHOR_UNIFORM: &str = "uniform-ratio-bound";
const ANCHOR_CONTRACT: &str = "ratio-contraction";

/// `max_i max(rho_i, 1/rho_i)` of recorded state `k`.
pub fn rho_excursion(orbit: &Orbit, k: usize) -> f64 {
    orbit.rho[k].iter().fold(1.0_f64, |m, &r| m.max(r).max(1.0 / r))
}

/// Largest excursion over the recorded states from index `from` on.
pub fn tail_max(orbit: &Orbit, from: usize) -> f64 {
    (from..orbit.len()).map(|k| rho_excursion(orbit, k)).fold(1.0, f64::max)
}

/// Finite supremum of the ratios and, when `bound` is given, the first recorded time
/// after which the orbit stays inside it.
pub fn audit_rho_bounds(orbit: &Orbit, bound: Option<f64>) -> AuditReport {
    let mut rep = AuditReport::new();
    let ex: Vec<f64> = (0..orbit.len()).map(|k| rho_excursion(orbit, k)).collect();
    let max = ex.iter().cloned().fold(1.0, f64::max);
    rep.constant("rho.max", max);
    rep.constant("rho.tail_max", tail_max(orbit, orbit.len() / 2));
    rep.push(
        Check::new("rho.finite_max", Status::from_bool(max.is_finite()), max, f64::INFINITY, ANCHOR)
            .with_detail("sup over recorded states of max(rho_i, 1/rho_i)"),
    );
    match bound {
        Some(b) if b.is_finite() => {
            let k = (0..ex.len()).rev().take_while(|&k| ex[k] <= b).last();
            let t_prime = k.map(|k| orbit.t[k] as f64).unwrap_or(f64::NAN);
            rep.constant("rho.t_prime", t_prime);
            rep.push(
                Check::new("rho.uniform_entry", Status::from_bool(k.is_some()), t_prime, b, ANCHOR_UNIFORM)
                    .with_detail(match k {
                        Some(_) => format!("inside {b} from t = {t_prime} to the end"),
                        None => format!("final state lies outside {b}"),
                    }),
            );
        }
        _ => rep.push(Check::not_applicable("rho.uniform_entry", ANCHOR_UNIFORM, "no finite bound")),
    }
    rep
}

/// Two sellers: after `T_2` consecutive steps with `rho_1 >= 2` the next step shrinks
/// `rho_1` by at least `gamma`; symmetrically below `1/2`.
pub fn audit_ratio_contraction(orbit: &Orbit, model: &ModelSpec) -> AuditReport {
    let mut rep = AuditReport::new();
    let name = "rho.contraction";
    if model.n != 2 || !orbit.is_stepwise() {
        rep.push(Check::not_applicable(name, ANCHOR_CONTRACT, "needs a stepwise two-seller orbit"));
        return rep;
    }
    let (Ok(gamma), Ok(t2)) = (contraction_gamma(model), compute_t_n(&model.f, model.alpha, 2)) else {
        rep.push(Check::not_applicable(name, ANCHOR_CONTRACT, "no contraction constant below 1"));
        return rep;
    };
    let t2 = t2 as usize;
    let r: Vec<f64> = orbit.rho.iter().map(|v| v[0]).collect();
    let mut triggers = 0;
    let mut worst: f64 = 0.0;
    let mut bad = 0;
    for end in t2..r.len().saturating_sub(1) {
        let window = &r[end + 1 - t2..=end];
        let factor = if window.iter().all(|&v| v >= 2.0) {
            r[end + 1] / r[end]
        } else if window.iter().all(|&v| v <= 0.5) {
            r[end] / r[end + 1]
        } else {
            continue;
        };
        triggers += 1;
        worst = worst.max(factor);
        if factor > gamma * (1.0 + 1e-12) {
            bad += 1;
        }
    }
    rep.constant("gamma", gamma);
    if triggers == 0 {
        rep.push(Check::not_applicable(name, ANCHOR_CONTRACT, "never triggered"));
    } else {
        rep.push(
            Check::new(name, Status::from_bool(bad == 0), worst, gamma, ANCHOR_CONTRACT)
                .with_detail(format!("{triggers} triggers, {bad} violations")),
        );
    }
    rep
}
