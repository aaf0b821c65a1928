//! Euclidean time evolution as a time shift of test functions, expectation
//! values of `H` and `M^2`, and polynomials in `exp(-beta H)`.

pub mod chebyshev;

pub use chebyshev::{
    chebyshev_approx, chebyshev_approx_capped, clenshaw, ChebyshevApprox, CERTIFICATION_POINTS, DEFAULT_DEGREE_CAP,
    VERIFICATION_POINTS,
};

use crate::error::{domain, Error, Result};
use crate::hilbert::{EuclideanTestFunction, InnerProduct, SectorWeight};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Default finite-difference step for `H`.
pub const DEFAULT_STEP: f64 = 1e-4;

/// Relative norm below which a vector is treated as null.
const NULL_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatShift {
    pub beta: f64,
}

impl HeatShift {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta >= 0.0) {
            return domain(format!("heat shift {beta} must be nonnegative"));
        }
        Ok(Self { beta })
    }

    pub fn apply(&self, g: &EuclideanTestFunction) -> Result<EuclideanTestFunction> {
        heat_shift(g, self.beta)
    }
}

/// `exp(-beta H) g`: every profile moves to later time by `beta`.
pub fn heat_shift(g: &EuclideanTestFunction, beta: f64) -> Result<EuclideanTestFunction> {
    if !(beta >= 0.0) {
        return domain(format!("heat shift {beta} must be nonnegative"));
    }
    g.time_shifted(beta)
}

pub fn heat_matrix_element(ip: &InnerProduct, f: &EuclideanTestFunction, g: &EuclideanTestFunction, beta: f64) -> Result<Complex64> {
    ip.inner_product(f, &heat_shift(g, beta)?)
}

fn norm_or_null(ip: &InnerProduct, f: &EuclideanTestFunction) -> Result<f64> {
    let n = ip.norm_squared(f)?;
    if !(n > NULL_THRESHOLD) {
        return Err(Error::NullVector(n));
    }
    Ok(n)
}

/// `<f|M^2|f> / <f|f>`.
pub fn mass_squared_expectation(ip: &InnerProduct, f: &EuclideanTestFunction) -> Result<f64> {
    let n = norm_or_null(ip, f)?;
    Ok(ip.inner_product_weighted(f, f, SectorWeight::MassSquared)?.re / n)
}

/// `<f|exp(-s H)|f>` for either sign of `s`, shifting the ket.
fn shifted_norm(ip: &InnerProduct, f: &EuclideanTestFunction, s: f64) -> Result<f64> {
    Ok(ip.inner_product(f, &f.time_shifted(s)?)?.re)
}

/// `<f|H|f> / <f|f>` from a Richardson-extrapolated central difference of
/// `<f|exp(-s H)|f>` at `s = 0`.
pub fn hamiltonian_expectation(ip: &InnerProduct, f: &EuclideanTestFunction, step: f64) -> Result<f64> {
    if !(step > 0.0) {
        return domain(format!("step {step} must be positive"));
    }
    let n = norm_or_null(ip, f)?;
    let d = |h: f64| -> Result<f64> { Ok((shifted_norm(ip, f, -h)? - shifted_norm(ip, f, h)?) / (2.0 * h)) };
    let (d1, d2) = (d(step)?, d(step / 2.0)?);
    Ok((4.0 * d2 - d1) / 3.0 / n)
}

/// `<f|H^2|f> / <f|f>` from the second central difference.
pub fn hamiltonian_second_moment(ip: &InnerProduct, f: &EuclideanTestFunction, step: f64) -> Result<f64> {
    let n = norm_or_null(ip, f)?;
    let f0 = shifted_norm(ip, f, 0.0)?;
    let d = |h: f64| -> Result<f64> { Ok((shifted_norm(ip, f, -h)? - 2.0 * f0 + shifted_norm(ip, f, h)?) / (h * h)) };
    let (d1, d2) = (d(step)?, d(step / 2.0)?);
    Ok((4.0 * d2 - d1) / 3.0 / n)
}

/// `<f| P(exp(-beta H)) |g>` evaluated on the spectral measure: the
/// polynomial is applied to `exp(-beta E)` at each quadrature node of the
/// intermediate energy. This equals `sum_k a_k <f|exp(-k beta H)|g>` exactly
/// but never forms the ill-conditioned monomial coefficients.
pub fn polynomial_operator_element(
    ip: &InnerProduct,
    f: &EuclideanTestFunction,
    g: &EuclideanTestFunction,
    approx: &ChebyshevApprox,
    beta: f64,
) -> Result<Complex64> {
    if !(beta > 0.0) {
        return domain(format!("beta {beta} must be positive"));
    }
    let weight = |e: f64| approx.eval((-beta * e).exp());
    ip.inner_product_weighted(f, g, SectorWeight::Energy(&weight))
}

/// The same element as a literal sum of `k beta` heat shifts with the
/// monomial coefficients. Accurate only at low degree.
pub fn polynomial_operator_element_by_shifts(
    ip: &InnerProduct,
    f: &EuclideanTestFunction,
    g: &EuclideanTestFunction,
    approx: &ChebyshevApprox,
    beta: f64,
) -> Result<Complex64> {
    if !(beta > 0.0) {
        return domain(format!("beta {beta} must be positive"));
    }
    let terms: Vec<Result<Complex64>> = approx
        .coefficients
        .par_iter()
        .enumerate()
        .map(|(k, a)| Ok(a * heat_matrix_element(ip, f, g, k as f64 * beta)?))
        .collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for t in terms {
        acc += t?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests;
