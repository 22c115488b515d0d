//! Buyer-response maps `f`, price-revision maps `g`, their derivatives and validators.

mod cn;
mod derivatives;
mod f;
mod g;
mod kernels;
mod validate;

pub use cn::compute_c_n;
pub use derivatives::{
    f_center_derivatives, f_rho_at_unit, fd_center_derivatives, DerivativeBundle, DerivativeSource,
    FDerivatives,
};
pub use f::{eval_f, eval_f_alpha, eval_f_dx, iterate_f_alpha, Deviation, FMapFamily, SmoothC4};
pub use g::{compute_s_g, eval_g, g_center_derivatives, GDerivatives, GMapFamily};
pub use kernels::{BKernel, BKind, CKernel};
pub use validate::{symmetry_residual, validate_f, validate_g};
