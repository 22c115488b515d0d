use super::linear::theta_from;
use crate::error::StabilityError;
use num_complex::Complex64;
use serde::Serialize;

/// Centre data entering the third-order normal form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalFormInputs {
    pub alpha: f64,
    pub g_p: f64,
    pub k_g: f64,
    pub f_p: f64,
    pub f_rho2: f64,
    pub f_rho3: f64,
    pub f_rho2x: f64,
}

/// Third partials of the transverse map in normal coordinates, ordered
/// `[xxx, xxy, xyy, yyy]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThirdDerivatives {
    pub x: [f64; 4],
    pub y: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm {
    pub theta: f64,
    pub third: ThirdDerivatives,
    pub c2: Complex64,
    /// `Re(exp(-i theta) c_2)`.
    pub margin: f64,
}

impl NormalFormInputs {
    pub fn theta(&self) -> Result<f64, StabilityError> {
        theta_from(self.alpha, self.f_p, self.g_p)
    }

    pub fn third_derivatives(&self) -> Result<ThirdDerivatives, StabilityError> {
        let theta = self.theta()?;
        let (c, s) = (theta.cos(), theta.sin());
        if s == 0.0 {
            return Err(StabilityError::Precondition("sin(theta) = 0".into()));
        }
        let w = 1.0 - self.alpha;
        let (gp, k, fp) = (self.g_p, self.k_g, self.f_p);
        let (f2, f3, f2x) = (self.f_rho2, self.f_rho3, self.f_rho2x);
        let a = (c - 1.0) / (2.0 * gp);
        let b = s / (2.0 * gp);
        let x = [a * a * a * k, -a * a * b * k, b * b * a * k, -b * b * b * k];
        let fg = fp * gp;
        let y = [
            -w * (4.0 * fg * c.powi(3) / s + 2.0 * fg / s * x[0] + 12.0 * gp * c.powi(3) / s * f2
                + 4.0 * gp * c.powi(3) / s * f3
                - 3.0 * (1.0 - c) * c * c / s * f2x),
            w * (4.0 * fg * c * c - 2.0 * fg / s * x[1] + 12.0 * gp * c * c * f2 + 4.0 * gp * c * c * f3
                + (3.0 * c - 2.0) * c * f2x),
            -w * (4.0 * fg * s * c + 2.0 * fg / s * x[2]
                + s * (12.0 * gp * c * f2 + 4.0 * gp * c * f3 - (1.0 - 3.0 * c) * f2x)),
            w * (4.0 * fg * s * s - 2.0 * fg / s * x[3] + s * s * (12.0 * gp * f2 + 4.0 * gp * f3)
                + 3.0 * s * s * f2x),
        ];
        Ok(ThirdDerivatives { x, y })
    }

    pub fn normal_form(&self) -> Result<NormalForm, StabilityError> {
        let theta = self.theta()?;
        let third = self.third_derivatives()?;
        let c2 = c2_from_third(&third);
        let margin = (Complex64::from_polar(1.0, -theta) * c2).re;
        Ok(NormalForm { theta, third, c2, margin })
    }

    /// `(1 - alpha) f'''_{rho rho x} / 8`.
    pub fn closed_form_margin(&self) -> f64 {
        (1.0 - self.alpha) * self.f_rho2x / 8.0
    }
}

/// `c_2 = [(X_xxx + X_xyy + Y_xxy + Y_yyy) + i (Y_xxx - X_xxy + Y_xyy - X_yyy)] / 8`.
pub fn c2_from_third(t: &ThirdDerivatives) -> Complex64 {
    let (x, y) = (&t.x, &t.y);
    Complex64::new(x[0] + x[2] + y[1] + y[3], y[0] - x[1] + y[2] - x[3]) / 8.0
}
