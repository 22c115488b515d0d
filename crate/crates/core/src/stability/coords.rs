use super::linear::theta_of;
use crate::dynamics::{step_skew, ModelSpec, SkewState};
use crate::error::StabilityError;
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

/// `(mu, Delta, eps)` with `mu = (x_1 + x_2)/2`, `Delta = (x_1 - x_2)/2`, `eps = ln rho_1`.
pub fn to_centered(s: &SkewState) -> Vector3<f64> {
    Vector3::new(0.5 * (s.x[0] + s.x[1]), 0.5 * (s.x[0] - s.x[1]), s.rho[0].ln())
}

pub fn from_centered(v: &Vector3<f64>) -> Result<SkewState, StabilityError> {
    Ok(SkewState::new(vec![v[0] + v[1], v[0] - v[1]], vec![v[2].exp()])?)
}

/// The skew map written in centred coordinates.
pub fn centered_step(model: &ModelSpec, v: &Vector3<f64>) -> Result<Vector3<f64>, StabilityError> {
    Ok(to_centered(&step_skew(model, &from_centered(v)?)?))
}

/// Central-difference Jacobian of [`centered_step`] at `point`.
pub fn numeric_jacobian(model: &ModelSpec, point: &SkewState, h: f64) -> Result<Matrix3<f64>, StabilityError> {
    if !(1e-8..=1e-3).contains(&h) {
        return Err(StabilityError::StepSize(h));
    }
    let c = to_centered(point);
    let mut jac = Matrix3::zeros();
    for j in 0..3 {
        let mut up = c;
        let mut dn = c;
        up[j] += h;
        dn[j] -= h;
        let d = (centered_step(model, &up)? - centered_step(model, &dn)?) / (2.0 * h);
        if d.iter().any(|v| !v.is_finite()) {
            return Err(StabilityError::NonFinite(format!("column {j}")));
        }
        jac.set_column(j, &d);
    }
    Ok(jac)
}

/// Mean fraction and complex normal coordinate `z = x + i y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalCoords {
    pub mu: f64,
    pub z: Complex64,
}

/// Linear change of variables that turns the transverse linearisation into a rotation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFrame {
    pub theta: f64,
    pub g_p: f64,
}

impl NormalFrame {
    pub fn new(model: &ModelSpec) -> Result<Self, StabilityError> {
        let theta = theta_of(model, 0.5)?;
        if theta.sin() == 0.0 {
            return Err(StabilityError::Precondition("sin(theta) = 0".into()));
        }
        Ok(Self { theta, g_p: model.g.slope() })
    }

    pub fn to_normal(&self, s: &SkewState) -> NormalCoords {
        let v = to_centered(s);
        let (c, sn) = (self.theta.cos(), self.theta.sin());
        let y = ((c - 1.0) * v[2] - 4.0 * self.g_p * v[1]) / sn;
        NormalCoords { mu: v[0], z: Complex64::new(v[2], y) }
    }

    pub fn from_normal(&self, n: &NormalCoords) -> Result<SkewState, StabilityError> {
        let (c, sn) = (self.theta.cos(), self.theta.sin());
        let (x, y) = (n.z.re, n.z.im);
        let delta = ((c - 1.0) * x - sn * y) / (4.0 * self.g_p);
        from_centered(&Vector3::new(n.mu, delta, x))
    }

    pub fn step(&self, model: &ModelSpec, n: &NormalCoords) -> Result<NormalCoords, StabilityError> {
        Ok(self.to_normal(&step_skew(model, &self.from_normal(n)?)?))
    }
}

pub fn to_normal_coords(model: &ModelSpec, s: &SkewState) -> Result<NormalCoords, StabilityError> {
    Ok(NormalFrame::new(model)?.to_normal(s))
}

pub fn from_normal_coords(model: &ModelSpec, n: &NormalCoords) -> Result<SkewState, StabilityError> {
    NormalFrame::new(model)?.from_normal(n)
}
