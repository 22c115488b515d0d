use crate::dynamics::Orbit;
use crate::report::{AuditReport, Check, Status};

const ANCHOR: &str = "perpetual-crossings";
const TIE: f64 = 1e-14;

/// Index of the extremum of `v`, or `None` when another entry is within the tie tolerance.
fn extremal(v: &[f64], max: bool) -> Option<usize> {
    let better = |a: f64, b: f64| if max { a > b } else { a < b };
    let mut best = 0;
    for i in 1..v.len() {
        if better(v[i], v[best]) {
            best = i;
        }
    }
    let tied = v.iter().enumerate().any(|(i, &x)| i != best && (x - v[best]).abs() <= TIE);
    (!tied).then_some(best)
}

fn longest_run(ids: &[Option<usize>]) -> Option<usize> {
    let mut best = None;
    let mut run = 0;
    let mut prev = None;
    for id in ids {
        match id {
            Some(i) => {
                run = if prev == Some(*i) { run + 1 } else { 1 };
                prev = Some(*i);
                best = Some(best.map_or(run, |b: usize| b.max(run)));
            }
            None => {
                run = 0;
                prev = None;
            }
        }
    }
    best
}

/// The sellers holding the smallest and largest fraction and price keep changing:
/// no index stays extremal for `window` consecutive recorded steps.
pub fn audit_crossings(orbit: &Orbit, window: usize) -> AuditReport {
    let mut rep = AuditReport::new();
    let series: [(&str, bool, bool); 4] = [
        ("crossings.x_argmin", false, false),
        ("crossings.x_argmax", false, true),
        ("crossings.p_argmin", true, false),
        ("crossings.p_argmax", true, true),
    ];
    for (name, price, max) in series {
        if !orbit.is_stepwise() {
            rep.push(Check::not_applicable(name, ANCHOR, "orbit was recorded with a stride"));
            continue;
        }
        let ids: Vec<Option<usize>> = (0..orbit.len())
            .map(|k| if price { extremal(&orbit.prices(k), max) } else { extremal(&orbit.x[k], max) })
            .collect();
        let changes = ids.windows(2).filter(|w| w[0].is_some() && w[1].is_some() && w[0] != w[1]).count();
        match longest_run(&ids) {
            None => rep.push(Check::not_applicable(name, ANCHOR, "every state is tied")),
            Some(run) => rep.push(
                Check::new(name, Status::from_bool(run < window), run as f64, window as f64, ANCHOR)
                    .with_detail(format!("longest dwell {run} states, {changes} changes")),
            ),
        }
    }
    rep
}
