use crate::dynamics::Orbit;
use crate::report::{AuditReport, Check, Status};

const ANCHOR: &str = "bounded-fractions";
const ANCHOR_GAP: &str = "uniform-fraction-gap";

fn gap(x: &[f64]) -> f64 {
    let last = x[x.len() - 1];
    x.iter().map(|v| (v - last).abs()).fold(0.0, f64::max)
}

/// Fractions stay away from 0 and 1, and the spread against the last seller settles
/// below 1 over the second half of the run.
pub fn audit_fraction_bounds(orbit: &Orbit) -> AuditReport {
    let mut rep = AuditReport::new();
    let eps = orbit
        .x
        .iter()
        .flatten()
        .map(|&v| v.min(1.0 - v))
        .fold(f64::INFINITY, f64::min);
    rep.constant("fractions.epsilon", eps);
    rep.push(
        Check::new("fractions.epsilon", Status::from_bool(eps > 0.0), eps, 0.0, ANCHOR)
            .with_detail("min over states of min(x_i, 1 - x_i)"),
    );
    let tail = (orbit.len() / 2..orbit.len()).map(|k| gap(&orbit.x[k])).fold(0.0, f64::max);
    rep.constant("fractions.initial_gap", gap(&orbit.x[0]));
    rep.constant("fractions.tail_gap", tail);
    rep.push(
        Check::new("fractions.tail_gap", Status::from_bool(tail < 1.0), tail, 1.0, ANCHOR_GAP)
            .with_detail("max_i |x_i - x_N| over the last half"),
    );
    rep
}
