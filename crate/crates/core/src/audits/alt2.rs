use crate::dynamics::{step_alt2, MarketState, ModelSpec, Orbit, OrbitKind};
use crate::error::AuditError;
use crate::report::{AuditReport, Check, Status};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ANCHOR: &str = "alternative-ratio-model";

/// In the mean-price variant `<x> > 1/2` is invariant, while `<x> < 1/2` is not.
pub fn audit_alt2_mean(orbit: &Orbit) -> AuditReport {
    let mut rep = AuditReport::new();
    if orbit.kind != OrbitKind::Alt2 || !orbit.is_stepwise() {
        rep.push(Check::not_applicable("alt2.upper_half_invariant", ANCHOR, "needs a stepwise orbit of the mean-price variant"));
        return rep;
    }
    let m: Vec<f64> = (0..orbit.len()).map(|k| orbit.mean_x(k)).collect();
    let (mut n, mut bad, mut up) = (0, 0, 0);
    for w in m.windows(2) {
        if w[0] > 0.5 {
            n += 1;
            bad += usize::from(w[1] <= 0.5);
        }
        if w[0] < 0.5 && w[1] > 0.5 {
            up += 1;
        }
    }
    let status = if n == 0 { Status::NotApplicable } else { Status::from_bool(bad == 0) };
    rep.push(Check::new("alt2.upper_half_invariant", status, bad as f64, 0.0, ANCHOR).with_detail(format!("{bad} of {n} steps leave")));
    rep.constant("alt2.upward_crossings", up as f64);
    rep
}

/// Result of a random search for a step that lifts `<x>` from below to above 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossingSearch {
    pub draws: usize,
    pub count: usize,
    pub first: Option<(MarketState, MarketState)>,
}

/// Samples `x` uniformly with `<x> < 1/2` and `rho_1` log-uniform in `[1/4, 4]`, then
/// applies one step of the mean-price variant.
pub fn search_alt2_upward_crossing(model: &ModelSpec, seed: u64, draws: usize) -> Result<CrossingSearch, AuditError> {
    if model.n != 2 {
        return Err(AuditError::Precondition("the mean-price variant needs two sellers".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = CrossingSearch { draws, count: 0, first: None };
    let span = 4f64.ln();
    for _ in 0..draws {
        let x: Vec<f64> = (0..2).map(|_| rng.gen::<f64>()).collect();
        if x[0] + x[1] >= 1.0 {
            continue;
        }
        let rho = (rng.gen_range(-span..span)).exp();
        let s = MarketState::new(x, vec![rho, 1.0])?;
        let t = step_alt2(model, &s)?;
        if t.x[0] + t.x[1] > 1.0 {
            out.count += 1;
            if out.first.is_none() {
                out.first = Some((s, t));
            }
        }
    }
    Ok(out)
}
