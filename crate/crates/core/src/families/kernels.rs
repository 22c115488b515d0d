use serde::Serialize;

/// Slope kernel `c(rho)` shared by the affine-type families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CKernel {
    /// `exp(-|ln rho|)`, i.e. `min(rho, 1/rho)`.
    ExpAbsLog,
    /// `exp(-(ln rho)^2)`.
    ExpSqLog,
}

impl CKernel {
    pub fn value(self, rho: f64) -> f64 {
        match self {
            CKernel::ExpAbsLog => {
                if rho >= 1.0 {
                    1.0 / rho
                } else {
                    rho
                }
            }
            CKernel::ExpSqLog => {
                let l = rho.ln();
                (-l * l).exp()
            }
        }
    }

    /// First derivative. At `rho = 1` the right-sided value is returned.
    pub fn d1(self, rho: f64) -> f64 {
        match self {
            CKernel::ExpAbsLog => {
                if rho >= 1.0 {
                    -1.0 / (rho * rho)
                } else {
                    1.0
                }
            }
            CKernel::ExpSqLog => {
                let l = rho.ln();
                -2.0 * l * self.value(rho) / rho
            }
        }
    }

    /// Second derivative. At `rho = 1` the right-sided value is returned.
    pub fn d2(self, rho: f64) -> f64 {
        match self {
            CKernel::ExpAbsLog => {
                if rho >= 1.0 {
                    2.0 / (rho * rho * rho)
                } else {
                    0.0
                }
            }
            CKernel::ExpSqLog => {
                let l = rho.ln();
                self.value(rho) * (4.0 * l * l + 2.0 * l - 2.0) / (rho * rho)
            }
        }
    }

    /// `(left, right)` derivative at `rho = 1`.
    pub fn d1_at_one(self) -> (f64, f64) {
        match self {
            CKernel::ExpAbsLog => (1.0, -1.0),
            CKernel::ExpSqLog => (0.0, 0.0),
        }
    }

    /// `c(rho) = c(1/rho)` holds for both kernels.
    pub fn is_log_even(self) -> bool {
        true
    }
}

/// Shape of the offset `b(rho)` used by [`super::SmoothC4`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BKind {
    /// `b = k ln rho`; reflection symmetry then holds to all orders at `rho = 1`.
    LogOdd,
    /// `b = (1 - c(rho0))/2 * (rho - 1)/(rho0 - 1)`; only `C^1` across `rho = 1`.
    Linear,
}

/// Resolved `b(rho)` with its coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum BKernel {
    LogOdd { k: f64 },
    Linear { slope: f64 },
}

impl BKernel {
    pub fn value(self, rho: f64) -> f64 {
        match self {
            BKernel::LogOdd { k } => k * rho.ln(),
            BKernel::Linear { slope } => slope * (rho - 1.0),
        }
    }

    /// Derivative of order `n` (1 to 4).
    pub fn deriv(self, n: u32, rho: f64) -> f64 {
        match self {
            BKernel::LogOdd { k } => {
                let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                let fact = (1..n).map(f64::from).product::<f64>();
                sign * k * fact / rho.powi(n as i32)
            }
            BKernel::Linear { slope } => {
                if n == 1 {
                    slope
                } else {
                    0.0
                }
            }
        }
    }
}
