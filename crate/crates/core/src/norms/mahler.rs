use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use num_complex::Complex64;

use super::roots::{roots_of_coefficients, DEFAULT_ROOT_TOL};
use super::{Method, NormFlags, NormResult};
use crate::error::{Error, Result};
use crate::polynomial::{MultiIndex, Polynomial};
use crate::quadrature::{
    adaptive_mean, horner, pairwise_sum, refine, Axis, Integrand, QuadratureSpec, StagedEvaluator,
    CLAMP_FLOOR,
};

/// Roots closer than this to the unit circle raise [`NormFlags::near_unit_roots`].
const NEAR_UNIT: f64 = 1e-9;
/// Leading inner coefficients below this fraction of the largest one are
/// treated as vanished.
const TRIM: f64 = 1e-13;

/// `log M` of a univariate polynomial from its ascending coefficients via
/// `log|a_m| + Σ log⁺|α_i|`. Returns the log-measure and whether some root
/// sits on the unit circle to within `1e-9`.
pub fn log_mahler_of_coefficients(c: &[Complex64]) -> Result<(f64, bool)> {
    let top = c
        .iter()
        .rposition(|x| x.re != 0.0 || x.im != 0.0)
        .ok_or_else(|| Error::invalid("Mahler measure of the zero polynomial has no logarithm"))?;
    if top == 0 {
        return Ok((c[0].norm().ln(), false));
    }
    let rs = roots_of_coefficients(&c[..=top], DEFAULT_ROOT_TOL)?;
    let mut log = rs.leading.norm().ln();
    let mut near = false;
    for cl in &rs.clusters {
        let r = cl.center.norm();
        near |= (r - 1.0).abs() < NEAR_UNIT;
        if cl.multiplicity == 1 {
            log += r.ln().max(0.0);
        } else if r - cl.radius > 1.0 {
            // the product of a cluster is well conditioned even when the
            // individual members are not
            log += cl.members.iter().map(|&i| rs.roots[i].norm().ln()).sum::<f64>();
        } else if r + cl.radius < 1.0 {
        } else {
            log += cl.multiplicity as f64 * r.ln().max(0.0);
        }
    }
    Ok((log, near))
}

/// Lehmer's formula `M(P) = |a_m| Π max(1, |α_i|)`; falls back to
/// log-quadrature when the root finder fails. `M(0) = 0`.
pub fn mahler_univariate(p: &Polynomial) -> Result<NormResult> {
    if p.n() != 1 {
        return Err(Error::invalid(format!(
            "mahler_univariate needs one variable, got {}",
            p.n()
        )));
    }
    if p.is_zero() {
        return Ok(NormResult::exact(0.0, Method::ExactRoots));
    }
    if let Some(k) = p.as_constant() {
        return Ok(NormResult::exact(k.norm(), Method::ExactRoots));
    }
    let c = p.univariate_coefficients()?;
    match log_mahler_of_coefficients(&c) {
        Ok((log, near)) => {
            let value = log.exp();
            let m = (c.len() - 1).max(1) as f64;
            Ok(NormResult {
                value,
                method: Method::ExactRoots,
                error_estimate: 16.0 * f64::EPSILON * m * value,
                converged: true,
                flags: NormFlags {
                    near_unit_roots: near,
                    ..NormFlags::default()
                },
            })
        }
        Err(Error::RootsNotConverged { .. }) => {
            let mut r = mahler_log_quadrature(p, &QuadratureSpec::for_dimension(1))?;
            r.flags.fallback = true;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

/// `exp ∫ log|P|` by plain torus quadrature. Kept as a cross-check.
pub fn mahler_log_quadrature(p: &Polynomial, spec: &QuadratureSpec) -> Result<NormResult> {
    if p.is_zero() {
        return Ok(NormResult::exact(0.0, Method::Quadrature));
    }
    let est = adaptive_mean(p, Integrand::Log, spec)?;
    let value = est.value.exp();
    Ok(NormResult {
        value,
        method: Method::Quadrature,
        error_estimate: value * est.error_estimate.exp_m1(),
        converged: est.converged,
        flags: NormFlags {
            clamped_nodes: est.clamped_nodes,
            ..NormFlags::default()
        },
    })
}

/// Mahler measure with the default quadrature rule for the dimension.
pub fn mahler_measure(p: &Polynomial) -> Result<NormResult> {
    let (q, _) = p.compress_variables();
    mahler_measure_with(p, &QuadratureSpec::for_dimension(q.n()))
}

/// Mahler measure `exp ∫_{T^n} log|P|`.
///
/// One variable uses roots. In several variables the last variable is
/// integrated exactly by roots at every node of a grid over the others:
///
/// `log M(P) = log M(A) + ∫ (log M_{z_n} P(z', ·) − log|A(z')|) dz'`
///
/// where `A` is the leading coefficient of `P` in `z_n`. The recursion on `A`
/// removes the logarithmic singularities of `log|A|` from the grid sum.
pub fn mahler_measure_with(p: &Polynomial, spec: &QuadratureSpec) -> Result<NormResult> {
    if p.is_zero() {
        return Ok(NormResult::exact(0.0, Method::ExactRoots));
    }
    let lm = log_mahler(p, spec)?;
    let value = lm.log.exp();
    let method = if lm.iterated {
        Method::IteratedMixed
    } else if lm.flags.fallback {
        Method::Quadrature
    } else {
        Method::ExactRoots
    };
    let error_estimate = if lm.iterated || lm.flags.fallback {
        value * lm.error.exp_m1()
    } else {
        16.0 * f64::EPSILON * p.total_degree().max(1) as f64 * value
    };
    Ok(NormResult {
        value,
        method,
        error_estimate,
        converged: lm.converged,
        flags: lm.flags,
    })
}

struct LogMahler {
    log: f64,
    error: f64,
    converged: bool,
    iterated: bool,
    flags: NormFlags,
}

fn log_mahler(p: &Polynomial, spec: &QuadratureSpec) -> Result<LogMahler> {
    let (q, _) = p.compress_variables();
    if q.n() == 1 {
        let r = mahler_univariate(&q)?;
        return Ok(LogMahler {
            log: r.value.ln(),
            error: if r.value > 0.0 { r.error_estimate / r.value } else { 0.0 },
            converged: r.converged,
            iterated: false,
            flags: r.flags,
        });
    }
    let n = q.n();
    let d = q.partial_degrees()[n - 1];
    let lead_terms: Vec<(MultiIndex, Complex64)> = q
        .terms()
        .filter(|(a, _)| a.get(n - 1) == d)
        .map(|(a, c)| (MultiIndex::new(a.as_slice()[..n - 1].to_vec()), *c))
        .collect();
    let lead = Polynomial::from_terms(n - 1, lead_terms)?;
    let outer = log_mahler(&lead, spec)?;

    let eval = StagedEvaluator::new(&q);
    let clamped = AtomicUsize::new(0);
    let near = AtomicBool::new(false);
    let fallback = AtomicBool::new(false);
    let leaf = |c: &[Complex64]| inner_excess(c, &clamped, &near, &fallback);
    let est = refine(spec, &Integrand::Log, |points| {
        let axes = vec![Axis::periodic_shifted(points, 0.5); n - 1];
        eval.reduce_prefix(&axes, &leaf)
    })?;
    let flags = NormFlags {
        clamped_nodes: outer.flags.clamped_nodes + clamped.load(Ordering::Relaxed),
        near_unit_roots: outer.flags.near_unit_roots || near.load(Ordering::Relaxed),
        fallback: outer.flags.fallback || fallback.load(Ordering::Relaxed),
    };
    Ok(LogMahler {
        log: outer.log + est.value,
        error: outer.error + est.error_estimate,
        converged: outer.converged && est.converged,
        iterated: true,
        flags,
    })
}

/// `log M_z(Σ c_k z^k) − log|c_d|` for the dense inner coefficients at one
/// outer node.
fn inner_excess(c: &[Complex64], clamped: &AtomicUsize, near: &AtomicBool, fallback: &AtomicBool) -> f64 {
    let d = c.len() - 1;
    let scale = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        clamped.fetch_add(1, Ordering::Relaxed);
        return 0.0;
    }
    let a = c[d].norm();
    if a < CLAMP_FLOOR {
        clamped.fetch_add(1, Ordering::Relaxed);
    }
    let log_a = a.max(CLAMP_FLOOR).ln();
    let top = c.iter().rposition(|x| x.norm() > TRIM * scale).unwrap_or(0);
    let trimmed = &c[..=top];
    match log_mahler_of_coefficients(trimmed) {
        Ok((log, is_near)) => {
            if is_near {
                near.store(true, Ordering::Relaxed);
            }
            log - log_a
        }
        Err(_) => {
            fallback.store(true, Ordering::Relaxed);
            let axis = Axis::periodic_shifted(4096, 0.5);
            let logs: Vec<f64> = axis
                .angles
                .iter()
                .map(|&t| horner(trimmed, Complex64::cis(t)).norm().max(CLAMP_FLOOR).ln())
                .collect();
            pairwise_sum(&logs) / axis.len() as f64 - log_a
        }
    }
}
