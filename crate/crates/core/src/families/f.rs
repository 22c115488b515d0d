use super::kernels::{BKernel, BKind, CKernel};
use crate::error::FamilyError;
use serde::Serialize;

/// Upper bound on the deviation term of the price-elastic family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Deviation {
    Zero,
    /// `kappa (1 - 1/rho)/rho x (1 - x)` for `rho >= 1`, `kappa (1 - rho) rho x (1 - x)` below.
    /// Admissible and monotone for `kappa` in `[0, 1)`.
    Quadratic { kappa: f64 },
}

impl Deviation {
    pub fn value(self, rho: f64, x: f64) -> f64 {
        match self {
            Deviation::Zero => 0.0,
            Deviation::Quadratic { kappa } => kappa * Self::weight(rho) * x * (1.0 - x),
        }
    }

    pub fn dx(self, rho: f64, x: f64) -> f64 {
        match self {
            Deviation::Zero => 0.0,
            Deviation::Quadratic { kappa } => kappa * Self::weight(rho) * (1.0 - 2.0 * x),
        }
    }

    /// Largest admissible `f_dev / x` at this ratio.
    pub fn envelope(rho: f64) -> f64 {
        Self::gap(rho)
    }

    fn weight(rho: f64) -> f64 {
        Self::gap(rho) * rho.min(1.0 / rho)
    }

    fn gap(rho: f64) -> f64 {
        if rho >= 1.0 {
            1.0 - 1.0 / rho
        } else {
            1.0 - rho
        }
    }
}

/// Smooth family: `c(rho) x` beyond `rho0`, an affine strip through `(1/2, 1/2 - b)`
/// for `x >= x0`, and a monotone cubic Hermite bridge on `[0, x0]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothC4 {
    pub c: CKernel,
    pub b: BKernel,
    pub rho0: f64,
    pub x0: f64,
}

impl SmoothC4 {
    pub fn new(c: CKernel, b: BKind, rho0: f64, x0: f64) -> Result<Self, FamilyError> {
        if !(rho0.is_finite() && rho0 > 1.0) {
            return Err(FamilyError::InvalidParameter {
                name: "rho0",
                reason: format!("must exceed 1, got {rho0}"),
            });
        }
        if !(x0 > 0.0 && x0 < 0.5) {
            return Err(FamilyError::InvalidParameter {
                name: "x0",
                reason: format!("must lie in (0, 1/2), got {x0}"),
            });
        }
        let c0 = c.value(rho0);
        let b = match b {
            BKind::LogOdd => BKernel::LogOdd { k: (1.0 - c0) / (2.0 * rho0.ln()) },
            BKind::Linear => BKernel::Linear { slope: (1.0 - c0) / (2.0 * (rho0 - 1.0)) },
        };
        Ok(Self { c, b, rho0, x0 })
    }

    fn affine(&self, rho: f64, x: f64) -> f64 {
        0.5 - self.b.value(rho) + self.c.value(rho) * (x - 0.5)
    }

    fn hermite_slopes(&self, rho: f64) -> (f64, f64, f64) {
        let y1 = self.affine(rho, self.x0);
        let delta = y1 / self.x0;
        let m1 = self.c.value(rho);
        let mut m0 = delta;
        if delta > 0.0 {
            let beta = m1 / delta;
            if 1.0 + beta * beta > 9.0 {
                m0 = delta * (9.0 - beta * beta).max(0.0).sqrt();
            }
        }
        (y1, m0, m1)
    }

    /// Value on `rho >= 1`.
    fn upper(&self, rho: f64, x: f64) -> f64 {
        if rho > self.rho0 {
            return self.c.value(rho) * x;
        }
        if x >= self.x0 {
            return self.affine(rho, x);
        }
        let (y1, m0, m1) = self.hermite_slopes(rho);
        let h = self.x0;
        let t = x / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (t3 - 2.0 * t2 + t) * h * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * h * m1
    }

    fn upper_dx(&self, rho: f64, x: f64) -> f64 {
        if rho > self.rho0 || x >= self.x0 {
            return self.c.value(rho);
        }
        let (y1, m0, m1) = self.hermite_slopes(rho);
        let h = self.x0;
        let t = x / h;
        let t2 = t * t;
        (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1 / h + (3.0 * t2 - 2.0 * t) * m1
    }
}

/// The buyer-response map `f(rho, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FMapFamily {
    /// `c(rho) x` above parity, `1 - c(rho)(1 - x)` below.
    PiecewiseAffine { c: CKernel },
    /// `x/rho + f_dev` above parity, `1 - rho(1 - x) - f_dev(rho, 1 - x)` below.
    Spefam { dev: Deviation },
    SmoothC4(SmoothC4),
    /// Like the affine family with a quadratic correction whose weight differs on the
    /// two sides of parity; matches envelopes but is not reflection symmetric.
    Asymmetric { c: CKernel, gamma_above: f64, gamma_below: f64 },
}

impl FMapFamily {
    /// Evaluates without input validation.
    pub fn value(&self, rho: f64, x: f64) -> f64 {
        if rho == 1.0 {
            return x;
        }
        let y = match *self {
            FMapFamily::PiecewiseAffine { c } => {
                let cr = c.value(rho);
                if rho > 1.0 {
                    cr * x
                } else {
                    1.0 - cr * (1.0 - x)
                }
            }
            FMapFamily::Spefam { dev } => {
                if rho > 1.0 {
                    x / rho + dev.value(rho, x)
                } else {
                    1.0 - rho * (1.0 - x) - dev.value(rho, 1.0 - x)
                }
            }
            FMapFamily::SmoothC4(s) => {
                if rho > 1.0 {
                    s.upper(rho, x)
                } else {
                    1.0 - s.upper(1.0 / rho, 1.0 - x)
                }
            }
            FMapFamily::Asymmetric { c, gamma_above, gamma_below } => {
                let cr = c.value(rho);
                if rho > 1.0 {
                    cr * x + gamma_above * (1.0 - cr) * x * x
                } else {
                    let u = 1.0 - x;
                    1.0 - cr * u - gamma_below * (1.0 - cr) * u * u
                }
            }
        };
        y.clamp(0.0, 1.0)
    }

    /// `df/dx` without input validation.
    pub fn dx(&self, rho: f64, x: f64) -> f64 {
        if rho == 1.0 {
            return 1.0;
        }
        match *self {
            FMapFamily::PiecewiseAffine { c } => c.value(rho),
            FMapFamily::Spefam { dev } => {
                if rho > 1.0 {
                    1.0 / rho + dev.dx(rho, x)
                } else {
                    rho + dev.dx(rho, 1.0 - x)
                }
            }
            FMapFamily::SmoothC4(s) => {
                if rho > 1.0 {
                    s.upper_dx(rho, x)
                } else {
                    s.upper_dx(1.0 / rho, 1.0 - x)
                }
            }
            FMapFamily::Asymmetric { c, gamma_above, gamma_below } => {
                let cr = c.value(rho);
                if rho > 1.0 {
                    cr + 2.0 * gamma_above * (1.0 - cr) * x
                } else {
                    cr + 2.0 * gamma_below * (1.0 - cr) * (1.0 - x)
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            FMapFamily::PiecewiseAffine { .. } => "piecewise-affine",
            FMapFamily::Spefam { .. } => "spefam",
            FMapFamily::SmoothC4(_) => "smooth-c4",
            FMapFamily::Asymmetric { .. } => "asymmetric",
        }
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<(), FamilyError> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(FamilyError::InvalidRatio(rho))
    }
}

pub(crate) fn check_x(x: f64) -> Result<(), FamilyError> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(FamilyError::InvalidFraction(x))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), FamilyError> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(FamilyError::InvalidParameter {
            name: "alpha",
            reason: format!("must lie in [0, 1), got {alpha}"),
        })
    }
}

pub fn eval_f(f: &FMapFamily, rho: f64, x: f64) -> Result<f64, FamilyError> {
    check_rho(rho)?;
    check_x(x)?;
    Ok(f.value(rho, x))
}

pub fn eval_f_dx(f: &FMapFamily, rho: f64, x: f64) -> Result<f64, FamilyError> {
    check_rho(rho)?;
    check_x(x)?;
    Ok(f.dx(rho, x))
}

/// Keeps a fraction of `alpha` of the previous buyers: `alpha x + (1 - alpha) f(rho, x)`.
pub fn eval_f_alpha(f: &FMapFamily, alpha: f64, rho: f64, x: f64) -> Result<f64, FamilyError> {
    check_alpha(alpha)?;
    Ok(x + (1.0 - alpha) * (eval_f(f, rho, x)? - x))
}

/// `t`-fold composition of `x -> f_alpha(rho, x)` at fixed `rho`.
pub fn iterate_f_alpha(
    f: &FMapFamily,
    alpha: f64,
    rho: f64,
    x: f64,
    t: u64,
) -> Result<f64, FamilyError> {
    check_alpha(alpha)?;
    check_rho(rho)?;
    check_x(x)?;
    let mut y = x;
    for _ in 0..t {
        y = (y + (1.0 - alpha) * (f.value(rho, y) - y)).clamp(0.0, 1.0);
    }
    Ok(y)
}
