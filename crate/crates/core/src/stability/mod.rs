//! Linearisation and third-order normal form at the symmetric synchronized point.

mod analysis;
mod coords;
mod linear;
mod normal_form;

pub use analysis::{analyze_stability, corroborate, transverse_distance, Corroboration, Hypothesis, StabilityReport, Verdict};
pub use coords::{
    centered_step, from_centered, from_normal_coords, numeric_jacobian, to_centered, to_normal_coords,
    NormalCoords, NormalFrame,
};
pub use linear::{
    alpha_for_theta, eigen_transverse, jacobian_skew, jacobian_skew_original, theta_from, theta_of,
    transverse_eigen_from, transverse_inputs, Classification, TransverseEigen,
};
pub use normal_form::{c2_from_third, NormalForm, NormalFormInputs, ThirdDerivatives};
