use crate::dynamics::{step_skew, ModelSpec, SkewState};
use crate::error::PeriodicError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodicMethod {
    Newton,
    Bisection,
    Trivial,
}

/// A closed orbit of the two-seller skew map starting at `rho_1 = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicOrbit {
    pub start: SkewState,
    /// `rho_1` at `t = 0, 1, ..., period - 1`.
    pub rho_pattern: Vec<f64>,
    /// Sup-norm distance between the start and its image after one period.
    pub residual: f64,
    /// The synchronized state, returned when the requested amplitude is 1.
    pub degenerate: bool,
    pub method: PeriodicMethod,
}

const RETURN_TOL: f64 = 1e-9;

fn orbit_of(model: &ModelSpec, x1: f64, x2: f64, period: usize) -> Result<Vec<SkewState>, PeriodicError> {
    let mut s = SkewState::new(vec![x1, x2], vec![1.0])?;
    let mut out = vec![s.clone()];
    for _ in 0..period {
        s = step_skew(model, &s)?;
        out.push(s.clone());
    }
    Ok(out)
}

fn return_residual(states: &[SkewState]) -> f64 {
    let (a, b) = (&states[0], &states[states.len() - 1]);
    let dx = a.x.iter().zip(&b.x).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
    dx.max((a.rho[0] - b.rho[0]).abs())
}

/// Residuals of the cycle conditions: `rho_1` reaches `rho` after one step and both
/// fractions return after `period` steps.
fn equations(model: &ModelSpec, z: [f64; 2], rho: f64, period: usize) -> Option<[f64; 2]> {
    if !(0.0..=1.0).contains(&z[0]) || !(0.0..=1.0).contains(&z[1]) {
        return None;
    }
    let st = orbit_of(model, z[0], z[1], period).ok()?;
    Some([st[1].rho[0].ln() - rho.ln(), st[period].x[0] - z[0]])
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].abs().max(v[1].abs())
}

fn newton(model: &ModelSpec, rho: f64, period: usize) -> Option<([f64; 2], usize)> {
    let up = rho > 1.0;
    let mut z = if up { [0.7, 0.3] } else { [0.3, 0.7] };
    let mut r = equations(model, z, rho, period)?;
    for it in 0..60 {
        if norm(r) <= 1e-13 {
            return Some((z, it));
        }
        let h = 1e-7;
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let (mut zp, mut zm) = (z, z);
            zp[j] += h;
            zm[j] -= h;
            let (rp, rm) = (equations(model, zp, rho, period)?, equations(model, zm, rho, period)?);
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if !det.is_finite() || det.abs() < 1e-14 {
            return None;
        }
        let dz = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut lambda = 1.0;
        loop {
            let cand = [z[0] + lambda * dz[0], z[1] + lambda * dz[1]];
            if let Some(rc) = equations(model, cand, rho, period) {
                if norm(rc) < norm(r) {
                    z = cand;
                    r = rc;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                return None;
            }
        }
    }
    (norm(r) <= 1e-13).then_some((z, 60))
}

/// Solves the first cycle condition on the slice `x_2 = 1 - x_1`.
fn bisection(model: &ModelSpec, rho: f64, period: usize) -> Option<[f64; 2]> {
    let e = |x1: f64| equations(model, [x1, 1.0 - x1], rho, period).map(|r| r[0]);
    let (mut lo, mut hi) = if rho > 1.0 { (0.5, 1.0) } else { (0.0, 0.5) };
    let (flo, fhi) = (e(lo)?, e(hi - 1e-15).unwrap_or(f64::INFINITY));
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = e(mid)?;
        if fm.signum() == flo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let x1 = 0.5 * (lo + hi);
    Some([x1, 1.0 - x1])
}

/// Finds the two-seller cycle along which `rho_1` runs through `(1, rho, 1, 1/rho)`.
pub fn find_periodic_orbit(model: &ModelSpec, rho: f64, period: usize) -> Result<PeriodicOrbit, PeriodicError> {
    if model.n != 2 {
        return Err(PeriodicError::Precondition(format!("needs two sellers, got {}", model.n)));
    }
    if period != 4 {
        return Err(PeriodicError::Precondition(format!("only period 4 is supported, got {period}")));
    }
    if !(rho.is_finite() && rho > 0.0) {
        return Err(PeriodicError::Precondition(format!("amplitude must be positive, got {rho}")));
    }
    if rho == 1.0 {
        let start = SkewState::new(vec![0.5, 0.5], vec![1.0])?;
        return Ok(PeriodicOrbit {
            start,
            rho_pattern: vec![1.0; period],
            residual: 0.0,
            degenerate: true,
            method: PeriodicMethod::Trivial,
        });
    }
    let mut best = f64::INFINITY;
    let attempts = [
        newton(model, rho, period).map(|(z, _)| (z, PeriodicMethod::Newton)),
        bisection(model, rho, period).map(|z| (z, PeriodicMethod::Bisection)),
    ];
    for (z, method) in attempts.into_iter().flatten() {
        let states = orbit_of(model, z[0], z[1], period)?;
        let residual = return_residual(&states);
        best = best.min(residual);
        let pattern: Vec<f64> = states[..period].iter().map(|s| s.rho[0]).collect();
        let want = [1.0, rho, 1.0, 1.0 / rho];
        let pattern_ok = pattern.iter().zip(want).all(|(a, b)| (a - b).abs() <= RETURN_TOL * b.max(1.0));
        if residual <= RETURN_TOL && pattern_ok {
            return Ok(PeriodicOrbit { start: states[0].clone(), rho_pattern: pattern, residual, degenerate: false, method });
        }
    }
    Err(PeriodicError::NotFound {
        reason: "neither Newton nor the symmetric-slice search closed the cycle".into(),
        residual: best,
        iterations: 60,
    })
}
