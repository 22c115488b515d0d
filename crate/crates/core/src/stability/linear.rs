use crate::dynamics::ModelSpec;
use crate::error::StabilityError;
use crate::families::f_rho_at_unit;
use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::Serialize;

/// Nature of the transverse eigenvalues of a synchronized fixed point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// Double eigenvalue 1.
    Parabolic,
    /// Conjugate pair on the unit circle.
    Elliptic,
    /// Real pair `lambda, 1/lambda` off the unit circle.
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransverseEigen {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub classification: Classification,
}

pub(crate) fn require_two(model: &ModelSpec) -> Result<(), StabilityError> {
    if model.n != 2 {
        return Err(StabilityError::Precondition(format!("needs two sellers, got {}", model.n)));
    }
    Ok(())
}

/// `(f'_rho(1, mu), g'(0))`.
pub fn transverse_inputs(model: &ModelSpec, mu: f64) -> Result<(f64, f64), StabilityError> {
    require_two(model)?;
    if !(0.0..=1.0).contains(&mu) {
        return Err(StabilityError::Domain(format!("mu = {mu} outside [0, 1]")));
    }
    let f_p = f_rho_at_unit(&model.f, mu).map_err(|e| StabilityError::Domain(e.to_string()))?;
    Ok((f_p, model.g.slope()))
}

/// Jacobian of the skew map at `(mu, mu, 1)` in coordinates `(mu, Delta, eps)` with
/// `Delta = (x_1 - x_2)/2` and `eps = ln rho_1`.
pub fn jacobian_skew(model: &ModelSpec, mu: f64) -> Result<Matrix3<f64>, StabilityError> {
    let (f_p, g_p) = transverse_inputs(model, mu)?;
    let w = 1.0 - model.alpha;
    Ok(Matrix3::new(
        1.0, 0.0, 0.0,
        0.0, 1.0 + 4.0 * w * f_p * g_p, w * f_p,
        0.0, 4.0 * g_p, 1.0,
    ))
}

/// The same Jacobian in the original coordinates `(x_1, x_2, rho_1)`.
pub fn jacobian_skew_original(model: &ModelSpec, mu: f64) -> Result<Matrix3<f64>, StabilityError> {
    let (f_p, g_p) = transverse_inputs(model, mu)?;
    let w = 1.0 - model.alpha;
    let a = 2.0 * w * f_p * g_p;
    Ok(Matrix3::new(
        1.0 + a, -a, w * f_p,
        -a, 1.0 + a, -w * f_p,
        2.0 * g_p, -2.0 * g_p, 1.0,
    ))
}

/// `lambda = 1 + 2A +- 2 sqrt(A (1 + A))` with `A = (1 - alpha) f_p g_p`.
pub fn transverse_eigen_from(alpha: f64, f_p: f64, g_p: f64) -> TransverseEigen {
    let a = (1.0 - alpha) * f_p * g_p;
    let root = Complex64::new(a * (1.0 + a), 0.0).sqrt() * 2.0;
    let centre = Complex64::new(1.0 + 2.0 * a, 0.0);
    let classification = if f_p * g_p == 0.0 {
        Classification::Parabolic
    } else if (-1.0..0.0).contains(&a) {
        Classification::Elliptic
    } else {
        Classification::Hyperbolic
    };
    TransverseEigen { lambda_plus: centre + root, lambda_minus: centre - root, classification }
}

pub fn eigen_transverse(model: &ModelSpec, mu: f64) -> Result<TransverseEigen, StabilityError> {
    let (f_p, g_p) = transverse_inputs(model, mu)?;
    Ok(transverse_eigen_from(model.alpha, f_p, g_p))
}

/// Rotation angle `arccos(1 + 2(1 - alpha) f_p g_p)` of the elliptic pair.
pub fn theta_from(alpha: f64, f_p: f64, g_p: f64) -> Result<f64, StabilityError> {
    if f_p.is_nan() || f_p >= 0.0 {
        return Err(StabilityError::Precondition(format!("needs f'_rho < 0, got {f_p}")));
    }
    if g_p.is_nan() || g_p <= 0.0 {
        return Err(StabilityError::Precondition(format!("needs g'(0) > 0, got {g_p}")));
    }
    let a = (1.0 - alpha) * f_p * g_p;
    if a < -1.0 {
        return Err(StabilityError::Precondition(format!("needs (1 - alpha) f_p g_p >= -1, got {a}")));
    }
    Ok((1.0 + 2.0 * a).clamp(-1.0, 1.0).acos())
}

pub fn theta_of(model: &ModelSpec, mu: f64) -> Result<f64, StabilityError> {
    let (f_p, g_p) = transverse_inputs(model, mu)?;
    theta_from(model.alpha, f_p, g_p)
}

/// Inertia that places the eigenvalues at `exp(+-i theta)`.
pub fn alpha_for_theta(theta: f64, f_p: f64, g_p: f64) -> Result<f64, StabilityError> {
    if !(theta > 0.0 && theta <= std::f64::consts::PI) {
        return Err(StabilityError::Precondition(format!("theta must lie in (0, pi], got {theta}")));
    }
    if !(f_p < 0.0 && g_p > 0.0) {
        return Err(StabilityError::Precondition("needs f'_rho < 0 < g'(0)".into()));
    }
    let alpha = 1.0 - (1.0 - theta.cos()) / (2.0 * f_p.abs() * g_p);
    if !(0.0..1.0).contains(&alpha) {
        return Err(StabilityError::Precondition(format!("theta = {theta} needs alpha = {alpha}, outside [0, 1)")));
    }
    Ok(alpha)
}
