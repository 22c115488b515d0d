use super::f::FMapFamily;
use super::g::{g_center_derivatives, GDerivatives, GMapFamily};
use super::kernels::BKernel;
use crate::error::FamilyError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DerivativeSource {
    Analytic,
    FiniteDifference,
}

/// Partial derivatives of `f` at `(1, 1/2)`, all taken with respect to `rho` and `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FDerivatives {
    pub f_p: f64,
    pub f_rho2: f64,
    pub f_rho3: f64,
    pub f_rho2x: f64,
    pub f_rhox: f64,
    pub f_rhox2: f64,
    pub source: DerivativeSource,
    /// Right-minus-left jumps of `d^n/drho^n f(rho, 1/2)` at `rho = 1`, orders 1 to 4.
    /// Entries that were not resolved are NaN.
    pub jumps: [f64; 4],
}

impl FDerivatives {
    pub fn max_jump(&self) -> f64 {
        self.jumps.iter().filter(|j| j.is_finite()).fold(0.0, |m, j| m.max(j.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeBundle {
    pub f: FDerivatives,
    pub g: GDerivatives,
}

impl DerivativeBundle {
    pub fn new(f: &FMapFamily, g: &GMapFamily) -> Result<Self, FamilyError> {
        Ok(Self { f: f_center_derivatives(f)?, g: g_center_derivatives(g) })
    }
}

/// Jumps of `b(1/rho)` against `-b(rho)` derivatives at 1, i.e. the reflection defect.
fn b_jumps(b: BKernel) -> [f64; 4] {
    let d = |n| b.deriv(n, 1.0);
    let (b1, b2, b3, b4) = (d(1), d(2), d(3), d(4));
    // left derivatives of 1/2 + b(1/rho); right ones are -b^(n)(1)
    let left = [-b1, b2 + 2.0 * b1, -b3 - 6.0 * b2 - 6.0 * b1, b4 + 12.0 * b3 + 36.0 * b2 + 24.0 * b1];
    let right = [-b1, -b2, -b3, -b4];
    [right[0] - left[0], right[1] - left[1], right[2] - left[2], right[3] - left[3]]
}

/// Derivatives of `f` at the symmetric centre, analytic for the smooth family and
/// from central differences otherwise.
pub fn f_center_derivatives(f: &FMapFamily) -> Result<FDerivatives, FamilyError> {
    if let FMapFamily::SmoothC4(s) = f {
        let (l, r) = s.c.d1_at_one();
        if l != r {
            return Err(FamilyError::NonSmooth(format!(
                "c'(1) jumps from {l} to {r}, so f'_rho x is discontinuous"
            )));
        }
        return Ok(FDerivatives {
            f_p: -s.b.deriv(1, 1.0),
            f_rho2: -s.b.deriv(2, 1.0),
            f_rho3: -s.b.deriv(3, 1.0),
            f_rho2x: s.c.d2(1.0),
            f_rhox: r,
            f_rhox2: 0.0,
            source: DerivativeSource::Analytic,
            jumps: b_jumps(s.b),
        });
    }
    let h = 1e-4;
    let right = (f.dx(1.0 + h, 0.5) - 1.0) / h;
    let left = (1.0 - f.dx(1.0 - h, 0.5)) / h;
    if (right - left).abs() > 1e-3 {
        return Err(FamilyError::NonSmooth(format!(
            "f''_rho x is {left:.6} from below and {right:.6} from above"
        )));
    }
    let mut d = fd_center_derivatives(f, 0.5);
    if let FMapFamily::PiecewiseAffine { .. } = f {
        d.f_p = f_rho_at_unit(f, 0.5)?;
    }
    let fh = |r: f64| f.value(r, 0.5);
    let q = 1e-3;
    let j1 = (fh(1.0 + q) - fh(1.0)) / q - (fh(1.0) - fh(1.0 - q)) / q;
    let j2 = (fh(1.0 + 2.0 * q) - 2.0 * fh(1.0 + q) + fh(1.0)) / (q * q)
        - (fh(1.0) - 2.0 * fh(1.0 - q) + fh(1.0 - 2.0 * q)) / (q * q);
    d.jumps = [j1, j2, f64::NAN, f64::NAN];
    Ok(d)
}

fn richardson(d: impl Fn(f64) -> f64, h: f64) -> f64 {
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Richardson-refined central differences at `(1, mu)`.
///
/// First and second orders use `h = 1e-4`; the third-order stencil uses `h = 1e-2`
/// because roundoff dominates below that.
pub fn fd_center_derivatives(f: &FMapFamily, mu: f64) -> FDerivatives {
    let v = |r: f64| f.value(r, mu);
    let vx = |r: f64| f.dx(r, mu);
    let d1 = |g: &dyn Fn(f64) -> f64, h: f64| (g(1.0 + h) - g(1.0 - h)) / (2.0 * h);
    let d2 = |g: &dyn Fn(f64) -> f64, h: f64| (g(1.0 + h) - 2.0 * g(1.0) + g(1.0 - h)) / (h * h);
    let d3 = |g: &dyn Fn(f64) -> f64, h: f64| {
        (g(1.0 + 2.0 * h) - 2.0 * g(1.0 + h) + 2.0 * g(1.0 - h) - g(1.0 - 2.0 * h)) / (2.0 * h * h * h)
    };
    let hx = 1e-4;
    let vxx = |r: f64| (f.dx(r, mu + hx) - f.dx(r, mu - hx)) / (2.0 * hx);
    FDerivatives {
        f_p: richardson(|h| d1(&v, h), 1e-4),
        f_rho2: richardson(|h| d2(&v, h), 1e-4),
        f_rho3: richardson(|h| d3(&v, h), 1e-2),
        f_rho2x: richardson(|h| d2(&vx, h), 1e-4),
        f_rhox: richardson(|h| d1(&vx, h), 1e-4),
        f_rhox2: richardson(|h| d1(&vxx, h), 1e-3),
        source: DerivativeSource::FiniteDifference,
        jumps: [f64::NAN; 4],
    }
}

/// `f'_rho(1, mu)`, analytic for the smooth family inside its affine strip.
pub fn f_rho_at_unit(f: &FMapFamily, mu: f64) -> Result<f64, FamilyError> {
    match f {
        FMapFamily::SmoothC4(s) => {
            if mu < s.x0 || mu > 1.0 - s.x0 {
                return Err(FamilyError::OutOfDomain(format!(
                    "mu = {mu} outside the affine strip [{}, {}]",
                    s.x0,
                    1.0 - s.x0
                )));
            }
            let (l, r) = s.c.d1_at_one();
            if l != r {
                return Err(FamilyError::NonSmooth("c'(1) is discontinuous".into()));
            }
            Ok(-s.b.deriv(1, 1.0) + r * (mu - 0.5))
        }
        FMapFamily::PiecewiseAffine { c } => {
            let (l, r) = c.d1_at_one();
            if l != r {
                return Err(FamilyError::NonSmooth("c'(1) is discontinuous".into()));
            }
            Ok(r * mu)
        }
        _ => {
            let h = 1e-6;
            let right = (f.value(1.0 + h, mu) - mu) / h;
            let left = (mu - f.value(1.0 - h, mu)) / h;
            if (right - left).abs() > 1e-4 {
                return Err(FamilyError::NonSmooth(format!(
                    "f'_rho(1, {mu}) is {left:.6} from below and {right:.6} from above"
                )));
            }
            Ok(0.5 * (right + left))
        }
    }
}
