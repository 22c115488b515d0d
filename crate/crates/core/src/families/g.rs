use crate::error::FamilyError;
use serde::Serialize;

/// The price-revision map `g(d)`, applied to the buyer-fraction gap `d` in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GMapFamily {
    Linear { a: f64 },
    Quadratic { a: f64, b: f64 },
}

impl GMapFamily {
    pub fn value(&self, d: f64) -> f64 {
        match *self {
            GMapFamily::Linear { a } => a * d,
            GMapFamily::Quadratic { a, b } => a * d + b * d * d,
        }
    }

    pub fn slope(&self) -> f64 {
        match *self {
            GMapFamily::Linear { a } | GMapFamily::Quadratic { a, .. } => a,
        }
    }

    pub fn is_odd(&self) -> bool {
        match *self {
            GMapFamily::Linear { .. } => true,
            GMapFamily::Quadratic { b, .. } => b == 0.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GMapFamily::Linear { .. } => "linear",
            GMapFamily::Quadratic { .. } => "quadratic",
        }
    }
}

pub fn eval_g(g: &GMapFamily, d: f64) -> Result<f64, FamilyError> {
    if !(-1.0..=1.0).contains(&d) {
        return Err(FamilyError::InvalidDifference(d));
    }
    Ok(g.value(d))
}

/// Derivatives of `g` at 0 together with `K_g = 4 g'^3 - 6 g' g'' + 2 g'''`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GDerivatives {
    pub g_p: f64,
    pub g_pp: f64,
    pub g_ppp: f64,
    pub k_g: f64,
}

pub fn g_center_derivatives(g: &GMapFamily) -> GDerivatives {
    let (g_p, g_pp, g_ppp) = match *g {
        GMapFamily::Linear { a } => (a, 0.0, 0.0),
        GMapFamily::Quadratic { a, b } => (a, 2.0 * b, 0.0),
    };
    GDerivatives { g_p, g_pp, g_ppp, k_g: 4.0 * g_p.powi(3) - 6.0 * g_p * g_pp + 2.0 * g_ppp }
}

/// `(1 + g(1)) / (1 + g(-1))`, infinite when `g(-1) <= -1`.
pub fn compute_s_g(g: &GMapFamily) -> f64 {
    let lo = 1.0 + g.value(-1.0);
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        (1.0 + g.value(1.0)) / lo
    }
}
