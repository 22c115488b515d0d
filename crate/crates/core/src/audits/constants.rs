use crate::dynamics::ModelSpec;
use crate::error::AuditError;
use crate::families::{compute_s_g, eval_g, iterate_f_alpha, FMapFamily};
use serde::Serialize;

/// Iteration cap for [`compute_t_n`].
pub const T_N_CAP: u64 = 1_000_000;

fn t_n_ratios(n: usize) -> (f64, f64) {
    let nf = n as f64;
    (nf * (nf - 1.0) / (1.0 + (nf - 2.0) * (nf + 1.0)), (nf - 1.0) / nf)
}

/// Least `t` with `f_alpha^t(rho_hi, 1) < f_alpha^t(rho_lo, 0)`.
pub fn compute_t_n(f: &FMapFamily, alpha: f64, n: usize) -> Result<u64, AuditError> {
    if n < 2 {
        return Err(AuditError::Precondition(format!("needs N >= 2, got {n}")));
    }
    let (hi, lo) = t_n_ratios(n);
    iterate_f_alpha(f, alpha, hi, 1.0, 0)?;
    let (mut a, mut b) = (1.0_f64, 0.0_f64);
    for t in 1..=T_N_CAP {
        a = (a + (1.0 - alpha) * (f.value(hi, a) - a)).clamp(0.0, 1.0);
        b = (b + (1.0 - alpha) * (f.value(lo, b) - b)).clamp(0.0, 1.0);
        if a < b {
            return Ok(t);
        }
    }
    Err(AuditError::NoCrossing(T_N_CAP))
}

/// Explicit eventual bound on the price ratios and whether it is known to apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RhoBound {
    pub bound: f64,
    pub applicable: bool,
    pub s_g: f64,
    pub t_n: u64,
}

/// `2 S_g^{T_2}` for two sellers; `N + 1` for more, valid when `S_g <= ((N+1)/N)^{1/T_N}`.
pub fn uniform_rho_bound(model: &ModelSpec) -> Result<RhoBound, AuditError> {
    let t_n = compute_t_n(&model.f, model.alpha, model.n)?;
    let s_g = compute_s_g(&model.g);
    if model.n == 2 {
        let bound = 2.0 * s_g.powf(t_n as f64);
        return Ok(RhoBound { bound, applicable: bound.is_finite(), s_g, t_n });
    }
    let nf = model.n as f64;
    let limit = ((nf + 1.0) / nf).powf(1.0 / t_n as f64);
    Ok(RhoBound { bound: nf + 1.0, applicable: s_g <= limit, s_g, t_n })
}

/// `(1 + g(A - B)) / (1 + g(B - A))` with `A = f_alpha^{T_2}(2, 1)`, `B = f_alpha^{T_2}(1/2, 0)`.
pub fn contraction_gamma(model: &ModelSpec) -> Result<f64, AuditError> {
    if model.n != 2 {
        return Err(AuditError::Precondition("the contraction constant needs two sellers".into()));
    }
    let t = compute_t_n(&model.f, model.alpha, 2)?;
    let a = iterate_f_alpha(&model.f, model.alpha, 2.0, 1.0, t)?;
    let b = iterate_f_alpha(&model.f, model.alpha, 0.5, 0.0, t)?;
    let den = 1.0 + eval_g(&model.g, b - a)?;
    if den <= 0.0 {
        return Err(AuditError::NotContracting(f64::INFINITY));
    }
    let gamma = (1.0 + eval_g(&model.g, a - b)?) / den;
    if gamma >= 1.0 {
        return Err(AuditError::NotContracting(gamma));
    }
    Ok(gamma)
}

/// Many-seller analogue of [`contraction_gamma`], maximised over the competitor slack.
pub fn gamma_n(model: &ModelSpec) -> Result<f64, AuditError> {
    if model.n < 3 {
        return Err(AuditError::Precondition("needs N >= 3".into()));
    }
    let n = model.n;
    let nf = n as f64;
    let t = compute_t_n(&model.f, model.alpha, n)?;
    let (hi, lo) = t_n_ratios(n);
    let f1 = iterate_f_alpha(&model.f, model.alpha, hi, 1.0, t)?;
    let f0 = iterate_f_alpha(&model.f, model.alpha, lo, 0.0, t)?;
    let top = (nf - 2.0) / (nf - 1.0);
    let m = 1000;
    let mut best = f64::NEG_INFINITY;
    for k in 0..=m {
        let x = top * k as f64 / m as f64;
        let num = 1.0 + eval_g(&model.g, f1 - f0 / (nf - 1.0) - x)?;
        let den = 1.0 + eval_g(&model.g, f0 - f1 / (nf - 1.0) - x)?;
        if den <= 0.0 {
            return Ok(f64::INFINITY);
        }
        best = best.max(num / den);
    }
    Ok(best)
}
