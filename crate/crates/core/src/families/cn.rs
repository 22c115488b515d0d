use crate::error::FamilyError;

/// Admissible deviation size `C_N(rho)` for the price-elastic family with `N` sellers.
///
/// Defined on `(0, 1)` for `N >= 3` and on `(1, N - 1)` for `N >= 5`; `C_N(1) = 0`.
pub fn compute_c_n(n: usize, rho: f64) -> Result<f64, FamilyError> {
    if n < 3 {
        return Err(FamilyError::OutOfDomain(format!("needs N >= 3, got {n}")));
    }
    let nf = n as f64;
    if !(rho > 0.0 && rho < nf - 1.0) {
        return Err(FamilyError::OutOfDomain(format!("rho = {rho} outside (0, {})", n - 1)));
    }
    if rho == 1.0 {
        return Ok(0.0);
    }
    let m = nf - 2.0;
    if rho < 1.0 {
        let a = 1.0 - rho;
        let b = a * a * m / (nf - 1.0 - m * rho);
        return Ok(a.min(b));
    }
    if n < 5 {
        return Err(FamilyError::OutOfDomain(format!("rho > 1 needs N >= 5, got {n}")));
    }
    let t1 = 1.0 - 1.0 / rho;
    let t2 = m * (rho - 1.0) / (rho * (1.0 + m * rho));
    let t4 = ((nf - rho) * rho - (nf - 1.0)) / ((nf - 1.0) * rho);
    let mut v = t1.min(t2).min(t4);
    if rho < m {
        v = v.min((rho - 1.0) * (1.0 / rho - 1.0 / m));
    }
    Ok(v)
}
