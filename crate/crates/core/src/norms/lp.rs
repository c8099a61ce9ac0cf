use super::{Method, NormFlags, NormResult};
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::quadrature::{adaptive_mean, Integrand, QuadratureSpec};

/// `‖P‖_{L^p(T^n)}`; a quasi-norm for `p < 1`.
///
/// `p = 2` and monomials use Parseval, other even `p ≤ 8` the expansion of `P^{p/2}`,
/// everything else quadrature of `|P|^p`.
pub fn lp_norm(p: &Polynomial, exponent: f64, spec: &QuadratureSpec) -> Result<NormResult> {
    check_exponent(exponent)?;
    if exponent == 2.0 || p.num_terms() <= 1 {
        // a single term has constant modulus on the torus
        let v = p.coefficient_functionals().parseval_l2;
        return Ok(NormResult::exact(v, Method::ExactParseval));
    }
    if matches!(exponent, 4.0 | 6.0 | 8.0) {
        return lp_norm_exact_even(p, exponent as u32);
    }
    lp_norm_quadrature(p, exponent, spec)
}

/// Quadrature path only, for any `p > 0`.
pub fn lp_norm_quadrature(p: &Polynomial, exponent: f64, spec: &QuadratureSpec) -> Result<NormResult> {
    check_exponent(exponent)?;
    if p.is_zero() {
        return Ok(NormResult::exact(0.0, Method::Quadrature));
    }
    let est = adaptive_mean(p, Integrand::Power(exponent), spec)?;
    let value = est.value.powf(1.0 / exponent);
    let rel = if est.value > 0.0 {
        est.error_estimate / est.value
    } else {
        est.error_estimate
    };
    Ok(NormResult {
        value,
        method: Method::Quadrature,
        error_estimate: value * rel / exponent,
        converged: est.converged,
        flags: NormFlags::default(),
    })
}

/// `‖P‖_p` for `p ∈ {2, 4, 6, 8}` from `‖P^{p/2}‖_2` via Parseval.
pub fn lp_norm_exact_even(p: &Polynomial, exponent: u32) -> Result<NormResult> {
    if !matches!(exponent, 2 | 4 | 6 | 8) {
        return Err(Error::invalid(format!(
            "exact even-p path supports p in {{2, 4, 6, 8}}, got {exponent}"
        )));
    }
    let q = p.pow(exponent / 2);
    let s = q.coefficient_functionals().parseval_l2;
    let value = s.powf(2.0 / exponent as f64);
    Ok(NormResult {
        value,
        method: Method::ExactEvenConvolution,
        error_estimate: 4.0 * f64::EPSILON * exponent as f64 * value,
        converged: true,
        flags: NormFlags::default(),
    })
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("exponent p must be positive, got {p}")));
    }
    Ok(())
}
