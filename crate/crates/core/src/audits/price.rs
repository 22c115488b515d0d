use crate::dynamics::{ModelSpec, Orbit};
use crate::families::GMapFamily;
use crate::report::{AuditReport, Check, Status};

const ANCHOR: &str = "realistic-prices";
const SLACK: f64 = 1e-12;

/// Monotonicity of `P_t = prod_i p_i^t`.
///
/// When `sum_i g(x_i - <x>_i) <= 0` always holds, `P_t` never increases and prices
/// stay bounded. For two sellers with quadratic `g` and `b` in `(a^2/2, a/2)` the
/// product never decreases, prices stay away from zero, and each step multiplies
/// `P_t` by `1 + (2b - a^2 + b^2 d^2) d^2` with `d = x_1 - x_2`.
pub fn audit_price_product(orbit: &Orbit, model: &ModelSpec) -> AuditReport {
    let mut rep = AuditReport::new();
    let Some(p) = orbit.p.as_ref() else {
        rep.push(Check::not_applicable("price.product", ANCHOR, "orbit carries no prices"));
        return rep;
    };
    let lnp: Vec<f64> = p.iter().map(|v| v.iter().map(|x| x.ln()).sum()).collect();
    rep.constant("price.ln_product_initial", lnp[0]);
    rep.constant("price.ln_product_final", lnp[lnp.len() - 1]);
    rep.constant("dist_fixed.initial", orbit.dist_fixed(0));
    rep.constant("dist_fixed.final", orbit.dist_fixed(orbit.len() - 1));
    let pmax = p.iter().flatten().cloned().fold(0.0, f64::max);
    let pmin = p.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    rep.constant("price.max", pmax);
    rep.constant("price.min", pmin);

    let sum_nonpositive = match model.g {
        GMapFamily::Linear { .. } => true,
        GMapFamily::Quadratic { b, .. } => b <= 0.0,
    };
    if sum_nonpositive {
        let rise = lnp.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        rep.push(
            Check::new("price.product_non_increasing", Status::from_bool(rise <= SLACK), rise, SLACK, ANCHOR)
                .with_detail("largest step change of ln P"),
        );
        rep.push(Check::new("price.max_bounded", Status::from_bool(pmax.is_finite()), pmax, f64::INFINITY, ANCHOR));
    }

    if let GMapFamily::Quadratic { a, b } = model.g {
        if model.n == 2 && b > a * a / 2.0 && b < a / 2.0 {
            let drop = lnp.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max);
            rep.push(
                Check::new("price.product_non_decreasing", Status::from_bool(drop <= SLACK), drop, SLACK, ANCHOR)
                    .with_detail("largest step decrease of ln P"),
            );
            rep.push(Check::new("price.min_positive", Status::from_bool(pmin > 0.0), pmin, 0.0, ANCHOR));
            if orbit.is_stepwise() {
                let mut worst: f64 = 0.0;
                for k in 0..orbit.len() - 1 {
                    let d = orbit.x[k][0] - orbit.x[k][1];
                    let rhs = 1.0 + (2.0 * b - a * a + b * b * d * d) * d * d;
                    let lhs = (lnp[k + 1] - lnp[k]).exp();
                    worst = worst.max((lhs - rhs).abs());
                }
                rep.push(
                    Check::new("price.step_identity", Status::from_bool(worst <= SLACK), worst, SLACK, ANCHOR)
                        .with_detail("P_{t+1}/P_t against 1 + (2b - a^2 + b^2 d^2) d^2"),
                );
            }
        }
    }
    if rep.checks.is_empty() {
        rep.push(Check::not_applicable("price.product", ANCHOR, "g satisfies neither sign condition"));
    }
    rep
}
