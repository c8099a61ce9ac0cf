//! Integration of functions of `|P|` over the torus `T^n` with the
//! normalized Lebesgue measure.
//!
//! The full torus uses the equispaced periodic rule, which is exact for
//! trigonometric polynomials of bandwidth below the grid size. Box subsets
//! use composite Gauss-Legendre rules on the clipped coordinates.

mod engine;

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;

pub use engine::{gauss_legendre, horner, pairwise_sum, pairwise_sum_complex, Axis, StagedEvaluator};

/// Values of `|P|` below this are clamped before taking logarithms.
pub const CLAMP_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub base_points_per_dim: usize,
    pub max_points_per_dim: usize,
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn new(base: usize, max: usize, rel_tol: f64) -> Result<Self> {
        let spec = QuadratureSpec {
            base_points_per_dim: base,
            max_points_per_dim: max,
            rel_tol,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_points_per_dim < 8 {
            return Err(Error::invalid("base_points_per_dim must be at least 8"));
        }
        if self.max_points_per_dim < self.base_points_per_dim {
            return Err(Error::invalid("max_points_per_dim must be >= base_points_per_dim"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol must be positive"));
        }
        Ok(())
    }

    /// Default rule for `n` variables.
    ///
    /// One-variable integrands with algebraic singularities (`|1+z|^{1/2}`)
    /// converge only like `N^{-3/2}`, so the one-dimensional cap is higher
    /// than the multivariate ones.
    pub fn for_dimension(n: usize) -> Self {
        match n {
            0 | 1 => QuadratureSpec {
                base_points_per_dim: 64,
                max_points_per_dim: 1 << 20,
                rel_tol: 1e-8,
            },
            2 => QuadratureSpec {
                base_points_per_dim: 64,
                max_points_per_dim: 4096,
                rel_tol: 1e-8,
            },
            _ => QuadratureSpec {
                base_points_per_dim: 64,
                max_points_per_dim: 512,
                rel_tol: 1e-6,
            },
        }
    }

    /// Cheaper rule used when sweeping large corpora. Non-convergence is
    /// absorbed by the error-driven slack of the checks.
    pub fn verification(n: usize) -> Self {
        match n {
            0 | 1 => QuadratureSpec {
                base_points_per_dim: 64,
                max_points_per_dim: 1 << 14,
                rel_tol: 1e-9,
            },
            2 => QuadratureSpec {
                base_points_per_dim: 32,
                max_points_per_dim: 256,
                rel_tol: 1e-7,
            },
            _ => QuadratureSpec {
                base_points_per_dim: 16,
                max_points_per_dim: 64,
                rel_tol: 1e-6,
            },
        }
    }
}

/// Product of half-open angle intervals `[a_j, b_j) ⊆ [0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxSubset {
    pub intervals: Vec<(f64, f64)>,
}

impl BoxSubset {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() {
            return Err(Error::invalid("a box needs at least one coordinate"));
        }
        for &(a, b) in &intervals {
            if !(0.0 <= a && a < b && b <= TAU) {
                return Err(Error::invalid(format!(
                    "interval [{a}, {b}) is empty or outside [0, 2π)"
                )));
            }
        }
        Ok(BoxSubset { intervals })
    }

    pub fn full(n: usize) -> Self {
        BoxSubset {
            intervals: vec![(0.0, TAU); n],
        }
    }

    /// `[0, π)` in the first coordinate.
    pub fn half_first(n: usize) -> Self {
        let mut b = BoxSubset::full(n);
        b.intervals[0] = (0.0, PI);
        b
    }

    /// Measure 1/4: `[0, π/2)` for one variable, `[0, π)²` in the first two
    /// coordinates otherwise.
    pub fn quarter(n: usize) -> Self {
        let mut b = BoxSubset::full(n);
        if n == 1 {
            b.intervals[0] = (0.0, PI / 2.0);
        } else {
            b.intervals[0] = (0.0, PI);
            b.intervals[1] = (0.0, PI);
        }
        b
    }

    /// Cube `[0, 2π·θ^{1/n})^n` of measure `θ`.
    pub fn product_of_measure(n: usize, theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::invalid(format!("measure must lie in (0, 1], got {theta}")));
        }
        let side = TAU * theta.powf(1.0 / n as f64);
        BoxSubset::new(vec![(0.0, side.min(TAU)); n])
    }

    pub fn n(&self) -> usize {
        self.intervals.len()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|(a, b)| (b - a) / TAU).product()
    }

    pub fn is_full(&self) -> bool {
        self.intervals.iter().all(|&(a, b)| a == 0.0 && b == TAU)
    }

    /// Disjoint boxes whose union is the complement of `self`.
    pub fn complement(&self) -> Vec<BoxSubset> {
        let n = self.n();
        let mut out = Vec::new();
        for j in 0..n {
            let (a, b) = self.intervals[j];
            for piece in [(0.0, a), (b, TAU)] {
                if piece.0 >= piece.1 {
                    continue;
                }
                let mut intervals = Vec::with_capacity(n);
                intervals.extend_from_slice(&self.intervals[..j]);
                intervals.push(piece);
                intervals.extend(std::iter::repeat_n((0.0, TAU), n - j - 1));
                out.push(BoxSubset { intervals });
            }
        }
        out
    }
}

/// Pointwise map applied to `|P|` before averaging.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Integrand {
    /// `t ↦ t^p`.
    Power(f64),
    /// `t ↦ log t`, clamped at [`CLAMP_FLOOR`].
    Log,
    /// `t ↦ exp((t/λ)^α) − 1`.
    Orlicz { alpha: f64, lambda: f64 },
}

impl Integrand {
    fn apply(&self, z: Complex64, clamped: &AtomicUsize) -> f64 {
        match *self {
            Integrand::Power(p) => {
                let s = z.norm_sqr();
                if p == 2.0 {
                    s
                } else {
                    s.powf(0.5 * p)
                }
            }
            Integrand::Log => {
                let t = z.norm();
                if t < CLAMP_FLOOR {
                    clamped.fetch_add(1, Ordering::Relaxed);
                    CLAMP_FLOOR.ln()
                } else {
                    t.ln()
                }
            }
            Integrand::Orlicz { alpha, lambda } => orlicz_psi(z.norm() / lambda, alpha),
        }
    }

    /// Value of the integrand for a constant polynomial.
    fn on_constant(&self, t: f64) -> f64 {
        self.apply(Complex64::new(t, 0.0), &AtomicUsize::new(0))
    }
}

/// `ψ_α(t) = exp(t^α) − 1`, infinite once the exponent passes 700.
pub fn orlicz_psi(t: f64, alpha: f64) -> f64 {
    let e = t.powf(alpha);
    if e > 700.0 {
        f64::INFINITY
    } else {
        e.exp_m1()
    }
}

/// Result of an adaptive torus average. The value may be negative (log).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimate {
    pub value: f64,
    /// Gap between the last two refinement levels.
    pub error_estimate: f64,
    pub converged: bool,
    pub points_per_dim: usize,
    pub clamped_nodes: usize,
}

/// Row-major values of `P` on the periodic grid with `points_per_dim[j]`
/// nodes along coordinate `j`.
pub fn grid_evaluate(p: &Polynomial, points_per_dim: &[usize]) -> Result<Vec<Complex64>> {
    if points_per_dim.len() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: points_per_dim.len(),
        });
    }
    if points_per_dim.contains(&0) {
        return Err(Error::invalid("every grid dimension needs at least one node"));
    }
    let axes: Vec<Axis> = points_per_dim.iter().map(|&n| Axis::periodic(n)).collect();
    Ok(StagedEvaluator::new(p).values(&axes))
}

/// Arithmetic mean with deterministic pairwise summation.
pub fn mean_on_grid(values: &[Complex64]) -> Result<Complex64> {
    if values.is_empty() {
        return Err(Error::invalid("mean of an empty grid"));
    }
    Ok(pairwise_sum_complex(values) / values.len() as f64)
}

/// Writes grid values as interleaved little-endian `f64` pairs (re, im).
pub fn dump_grid(values: &[Complex64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(values.len() * 16);
    for v in values {
        bytes.extend_from_slice(&v.re.to_le_bytes());
        bytes.extend_from_slice(&v.im.to_le_bytes());
    }
    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&bytes).map_err(|e| Error::io(path, e))
}

fn converged_between(prev: f64, cur: f64, integrand: &Integrand, rel_tol: f64) -> bool {
    let gap = (cur - prev).abs();
    match integrand {
        Integrand::Log => gap < rel_tol,
        _ => gap <= rel_tol * cur.abs() || (gap == 0.0),
    }
}

pub(crate) fn refine<G>(spec: &QuadratureSpec, integrand: &Integrand, mut level: G) -> Result<QuadEstimate>
where
    G: FnMut(usize) -> f64,
{
    spec.validate()?;
    let mut n = spec.base_points_per_dim;
    let mut prev = level(n);
    loop {
        let next = n * 2;
        if next > spec.max_points_per_dim {
            return Ok(QuadEstimate {
                value: prev,
                error_estimate: f64::INFINITY,
                converged: false,
                points_per_dim: n,
                clamped_nodes: 0,
            });
        }
        let cur = level(next);
        let gap = (cur - prev).abs();
        let done = converged_between(prev, cur, integrand, spec.rel_tol);
        if done || next * 2 > spec.max_points_per_dim {
            return Ok(QuadEstimate {
                value: cur,
                error_estimate: if gap.is_nan() { f64::INFINITY } else { gap },
                converged: done,
                points_per_dim: next,
                clamped_nodes: 0,
            });
        }
        prev = cur;
        n = next;
    }
}

/// `∫_{T^n} f(|P|) dz`, doubling the grid until two successive levels agree.
///
/// The stopping test is relative, except for `Log` where it is absolute
/// (the log-mean may be zero). Variables absent from `P` are integrated out
/// exactly.
pub fn adaptive_mean(p: &Polynomial, integrand: Integrand, spec: &QuadratureSpec) -> Result<QuadEstimate> {
    mean_on_box(p, integrand, &BoxSubset::full(p.n()), spec)
}

/// `∫_E f(|P|) dz` over a box `E` (not divided by the measure of `E`).
pub fn mean_on_box(
    p: &Polynomial,
    integrand: Integrand,
    e: &BoxSubset,
    spec: &QuadratureSpec,
) -> Result<QuadEstimate> {
    spec.validate()?;
    if e.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: p.n(),
            found: e.n(),
        });
    }
    if !(e.measure() > 0.0) {
        return Err(Error::invalid("box has zero measure"));
    }
    let (q, kept) = p.compress_variables();
    let dropped_measure: f64 = (0..p.n())
        .filter(|j| !kept.contains(j))
        .map(|j| (e.intervals[j].1 - e.intervals[j].0) / TAU)
        .product();

    if let Some(c) = q.as_constant() {
        let value = integrand.on_constant(c.norm()) * e.measure();
        let clamped = usize::from(matches!(integrand, Integrand::Log) && c.norm() < CLAMP_FLOOR);
        return Ok(QuadEstimate {
            value,
            error_estimate: 0.0,
            converged: true,
            points_per_dim: spec.base_points_per_dim,
            clamped_nodes: clamped,
        });
    }

    let intervals: Vec<(f64, f64)> = kept.iter().map(|&j| e.intervals[j]).collect();
    let eval = StagedEvaluator::new(&q);
    let clamped = AtomicUsize::new(0);
    let mut last_clamped = 0;
    let f = |z: Complex64| integrand.apply(z, &clamped);
    // Torus zeros often sit at roots of unity; midpoints keep log|P| finite
    // at every node without changing exactness for trigonometric polynomials.
    let shift = if matches!(integrand, Integrand::Log) { 0.5 } else { 0.0 };
    let mut est = refine(spec, &integrand, |n| {
        let axes: Vec<Axis> = intervals
            .iter()
            .map(|&(a, b)| {
                if a == 0.0 && b == TAU {
                    Axis::periodic_shifted(n, shift)
                } else {
                    Axis::interval(a, b, n)
                }
            })
            .collect();
        clamped.store(0, Ordering::Relaxed);
        let v = eval.reduce(&axes, &f);
        last_clamped = clamped.load(Ordering::Relaxed);
        v
    })?;
    est.value *= dropped_measure;
    est.error_estimate *= dropped_measure;
    est.clamped_nodes = last_clamped;
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::MultiIndex;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn one_plus_z() -> Polynomial {
        Polynomial::univariate_real(&[1.0, 1.0])
    }

    #[test]
    fn grid_values() {
        let z = Polynomial::variable(1, 0);
        let v = grid_evaluate(&z, &[4]).unwrap();
        let expect = [c(1.0), Complex64::new(0.0, 1.0), c(-1.0), Complex64::new(0.0, -1.0)];
        for (a, b) in v.iter().zip(expect) {
            assert!((a - b).norm() < 1e-15);
        }
        let v = grid_evaluate(&Polynomial::constant(2, Complex64::new(2.0, -1.0)), &[3, 5]).unwrap();
        assert!(v.iter().all(|&x| x == Complex64::new(2.0, -1.0)));
        let v = grid_evaluate(&one_plus_z(), &[2]).unwrap();
        assert!((v[0] - c(2.0)).norm() < 1e-15 && v[1].norm() < 1e-15);
        assert!(grid_evaluate(&one_plus_z(), &[2, 2]).is_err());
    }

    #[test]
    fn grid_means() {
        let v = grid_evaluate(&one_plus_z(), &[4]).unwrap();
        let sq: Vec<Complex64> = v.iter().map(|x| c(x.norm_sqr())).collect();
        assert!((mean_on_grid(&sq).unwrap() - c(2.0)).norm() < 1e-15);
        let v = grid_evaluate(&Polynomial::variable(1, 0), &[7]).unwrap();
        assert!(mean_on_grid(&v).unwrap().norm() < 1e-15);
        assert_eq!(mean_on_grid(&[c(5.0); 3]).unwrap(), c(5.0));
        assert!(mean_on_grid(&[]).is_err());
    }

    #[test]
    fn adaptive_examples() {
        let spec = QuadratureSpec::for_dimension(1);
        let r = adaptive_mean(&one_plus_z(), Integrand::Power(4.0), &spec).unwrap();
        assert!((r.value - 6.0).abs() < 1e-12 && r.converged);

        let k = Polynomial::constant(1, c(3.0));
        let r = adaptive_mean(&k, Integrand::Log, &spec).unwrap();
        assert_eq!(r.value, 3f64.ln());

        // the torus zero at z = −1 limits log-quadrature to O(1/N)
        let r = adaptive_mean(&one_plus_z(), Integrand::Log, &spec).unwrap();
        assert!(r.value.abs() < 1e-6, "{r:?}");
        assert!(r.value.abs() <= 2.0 * r.error_estimate + 1e-12, "{r:?}");
    }

    #[test]
    fn box_examples() {
        let spec = QuadratureSpec::for_dimension(1);
        let p = Polynomial::univariate_real(&[1.0, 0.5, 0.25]);
        let full = mean_on_box(&p, Integrand::Power(1.0), &BoxSubset::full(1), &spec).unwrap();
        let plain = adaptive_mean(&p, Integrand::Power(1.0), &spec).unwrap();
        assert_eq!(full, plain);

        let half = BoxSubset::half_first(1);
        let r = mean_on_box(&Polynomial::constant(1, c(1.0)), Integrand::Power(1.0), &half, &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-15);
        let r = mean_on_box(&Polynomial::variable(1, 0), Integrand::Power(1.0), &half, &spec).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);

        assert!(BoxSubset::new(vec![(1.0, 1.0)]).is_err());
    }

    #[test]
    fn box_additivity_in_two_variables() {
        let spec = QuadratureSpec::for_dimension(2);
        let p = Polynomial::from_terms(
            2,
            vec![
                (MultiIndex::new(vec![0, 0]), c(2.0)),
                (MultiIndex::new(vec![1, 2]), Complex64::new(0.5, 0.5)),
                (MultiIndex::new(vec![2, 0]), c(-0.7)),
            ],
        )
        .unwrap();
        let e = BoxSubset::new(vec![(0.5, 2.5), (1.0, 6.0)]).unwrap();
        let inside = mean_on_box(&p, Integrand::Power(1.5), &e, &spec).unwrap().value;
        let outside: f64 = e
            .complement()
            .iter()
            .map(|b| mean_on_box(&p, Integrand::Power(1.5), b, &spec).unwrap().value)
            .sum();
        let total = adaptive_mean(&p, Integrand::Power(1.5), &spec).unwrap().value;
        assert!(((inside + outside) - total).abs() < 1e-8 * total);
        let m: f64 = e.complement().iter().map(BoxSubset::measure).sum();
        assert!((m + e.measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_boxes_have_expected_measure() {
        assert!((BoxSubset::half_first(3).measure() - 0.5).abs() < 1e-15);
        assert!((BoxSubset::quarter(1).measure() - 0.25).abs() < 1e-15);
        assert!((BoxSubset::quarter(2).measure() - 0.25).abs() < 1e-15);
        let b = BoxSubset::product_of_measure(3, 0.3).unwrap();
        assert!((b.measure() - 0.3).abs() < 1e-14);
    }

    #[test]
    fn dropped_variables_are_integrated_exactly() {
        let spec = QuadratureSpec::for_dimension(3);
        let p = Polynomial::from_terms(
            3,
            vec![(MultiIndex::new(vec![0, 1, 0]), c(1.0)), (MultiIndex::new(vec![0, 0, 0]), c(1.0))],
        )
        .unwrap();
        let e = BoxSubset::new(vec![(0.0, PI), (0.0, TAU), (0.0, TAU)]).unwrap();
        let r = mean_on_box(&p, Integrand::Power(2.0), &e, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-14);
    }

    #[test]
    fn grid_dump_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        let v = grid_evaluate(&one_plus_z(), &[2]).unwrap();
        dump_grid(&v, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(bytes.len(), 32);
        assert_eq!(f64::from_le_bytes(bytes[..8].try_into().unwrap()), 2.0);
    }
}
