use serde::{Deserialize, Serialize};

use super::{Method, NormFlags, NormResult};
use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::quadrature::{pairwise_sum, Axis, QuadratureSpec, StagedEvaluator};

/// Largest number of grid nodes materialized at once.
const POINT_BUDGET: usize = 1 << 22;
const MAX_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrliczSpec {
    /// Exponent of `ψ_α(t) = exp(t^α) − 1`, in `(0, 1]`.
    pub alpha: f64,
    /// Relative width at which bisection stops.
    pub rel_tol: f64,
}

impl OrliczSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        let s = OrliczSpec { alpha, rel_tol: 1e-10 };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid(format!("alpha must lie in (0, 1], got {}", self.alpha)));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol must be positive"));
        }
        Ok(())
    }
}

/// `G(s) = ∫ ψ_α(|P|/λ)` at `s = λ^{−α}` and `G'(s)`, from `u = |P|^α`:
/// `ψ_α(|P|/λ) = exp(u s) − 1`.
fn g_and_slope(u: &[f64], s: f64, a: &mut Vec<f64>, b: &mut Vec<f64>) -> (f64, f64) {
    a.clear();
    b.clear();
    for &x in u {
        let t = x * s;
        if t > 700.0 {
            a.push(f64::INFINITY);
            b.push(f64::INFINITY);
        } else {
            let e = t.exp_m1();
            a.push(e);
            b.push(x * (e + 1.0));
        }
    }
    let w = 1.0 / u.len() as f64;
    (pairwise_sum(a) * w, pairwise_sum(b) * w)
}

/// Solves `F(λ) = 1` on one grid of samples of `|P|`, starting near
/// `guess`. Returns `(λ_hi, λ_lo)` with `F(λ_hi) ≤ 1 < F(λ_lo)` and
/// `λ_hi ≤ λ_lo (1 + rel_tol)`.
///
/// `G(s)` is increasing and convex in `s = λ^{−α}`, so Newton steps from the
/// upper end of a bracket never leave it; a probe just below each Newton
/// iterate closes the bracket once the step is small.
fn solve_on_grid(values: &[f64], alpha: f64, rel_tol: f64, guess: Option<f64>) -> Result<(f64, f64)> {
    let l1 = pairwise_sum(values) / values.len() as f64;
    if !(l1 > 0.0) {
        return Err(Error::invalid("polynomial vanishes on the quadrature grid"));
    }
    let u: Vec<f64> = values.iter().map(|&t| t.powf(alpha)).collect();
    let (mut sa, mut sb) = (Vec::with_capacity(u.len()), Vec::with_capacity(u.len()));
    let mut g = |s: f64| g_and_slope(&u, s, &mut sa, &mut sb);

    let start = guess.unwrap_or(l1).powf(-alpha);
    let mut factor = if guess.is_some() { 1.0 + 1e-3 } else { 2.0 };
    let (mut lo, mut hi) = (start, start);
    let mut g_hi = g(hi);
    let mut steps = 0;
    while !(g_hi.0 > 1.0) {
        lo = hi;
        hi *= factor;
        factor *= factor;
        g_hi = g(hi);
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::invalid("Luxemburg bracket did not close"));
        }
    }
    if lo == hi {
        loop {
            lo /= factor;
            factor *= factor;
            if g(lo).0 <= 1.0 {
                break;
            }
            hi = lo;
            steps += 1;
            if steps > MAX_STEPS {
                return Err(Error::invalid("Luxemburg bracket did not close"));
            }
        }
        g_hi = g(hi);
    }

    // relative width in s that maps to rel_tol in λ
    let tol_s = alpha * rel_tol;
    let mut depth = 0;
    while hi / lo - 1.0 > tol_s && depth < MAX_STEPS {
        let (value, slope) = g_hi;
        let newton = hi - (value - 1.0) / slope;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo * hi).sqrt()
        };
        let probe = next * (1.0 - 0.5 * tol_s);
        if probe > lo && g(probe).0 <= 1.0 {
            lo = probe;
        }
        let g_next = g(next);
        if g_next.0 > 1.0 {
            hi = next;
            g_hi = g_next;
        } else {
            lo = lo.max(next);
        }
        depth += 1;
    }
    Ok((lo.powf(-1.0 / alpha), hi.powf(-1.0 / alpha)))
}

/// Luxemburg norm `inf{λ > 0 : ∫ ψ_α(|P|/λ) dz ≤ 1}` with
/// `ψ_α(t) = exp(t^α) − 1`.
///
/// Each grid level samples `|P|` once and solves for `λ` on those samples;
/// levels double until successive solutions agree to `quad.rel_tol`.
pub fn orlicz_luxemburg_norm(p: &Polynomial, spec: &OrliczSpec, quad: &QuadratureSpec) -> Result<NormResult> {
    spec.validate()?;
    quad.validate()?;
    if p.is_zero() {
        return Err(Error::invalid("Luxemburg norm of the zero polynomial is not defined here"));
    }
    let (q, _) = p.compress_variables();
    if let Some(c) = q.as_constant() {
        let (hi, lo) = solve_on_grid(&[c.norm()], spec.alpha, spec.rel_tol, None)?;
        return Ok(NormResult {
            value: hi,
            method: Method::Quadrature,
            error_estimate: hi - lo,
            converged: true,
            flags: NormFlags::default(),
        });
    }
    let n = q.n();
    let budget_per_dim = (POINT_BUDGET as f64).powf(1.0 / n as f64).floor() as usize;
    let cap = quad.max_points_per_dim.min(budget_per_dim.max(quad.base_points_per_dim));
    let eval = StagedEvaluator::new(&q);
    let sample = |points: usize| -> Vec<f64> {
        let axes = vec![Axis::periodic(points); n];
        eval.values(&axes).into_iter().map(|z| z.norm()).collect()
    };

    let mut points = quad.base_points_per_dim;
    let (mut prev, mut prev_lo) = solve_on_grid(&sample(points), spec.alpha, spec.rel_tol, None)?;
    let mut gap = f64::INFINITY;
    let mut converged = false;
    while points * 2 <= cap {
        points *= 2;
        let (cur, lo) = solve_on_grid(&sample(points), spec.alpha, spec.rel_tol, Some(prev))?;
        gap = (cur - prev).abs();
        prev = cur;
        prev_lo = lo;
        if gap <= quad.rel_tol * cur {
            converged = true;
            break;
        }
    }
    Ok(NormResult {
        value: prev,
        method: Method::Quadrature,
        error_estimate: gap.min(f64::MAX).max(prev - prev_lo),
        converged,
        flags: NormFlags::default(),
    })
}
