//! Dimension-by-dimension evaluation of a polynomial on tensor grids.
//!
//! Variables are consumed in order. At each prefix node the polynomial is
//! collapsed to its coefficients in the remaining variables, so the cost per
//! grid node is proportional to the number of distinct exponent suffixes
//! rather than to the number of terms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::polynomial::Polynomial;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Nodes and normalized weights along one torus coordinate.
#[derive(Clone, Debug)]
pub struct Axis {
    pub angles: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Axis {
    /// Equispaced periodic rule `θ_k = 2πk/N` with weights `1/N`.
    pub fn periodic(n: usize) -> Axis {
        Axis::periodic_shifted(n, 0.0)
    }

    /// Periodic rule shifted by `shift` grid cells; `0.5` gives midpoints.
    pub fn periodic_shifted(n: usize, shift: f64) -> Axis {
        let h = std::f64::consts::TAU / n as f64;
        Axis {
            angles: (0..n).map(|k| (k as f64 + shift) * h).collect(),
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Composite Gauss-Legendre rule on `[a, b]` with roughly `N·(b−a)/2π`
    /// nodes; weights sum to `(b−a)/2π`.
    pub fn interval(a: f64, b: f64, n: usize) -> Axis {
        const ORDER: usize = 8;
        let len = b - a;
        let target = (n as f64 * len / std::f64::consts::TAU).ceil() as usize;
        let panels = target.div_ceil(ORDER).max(1);
        let (x, w) = gauss_legendre(ORDER);
        let h = len / panels as f64;
        let mut angles = Vec::with_capacity(panels * ORDER);
        let mut weights = Vec::with_capacity(panels * ORDER);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(&w) {
                angles.push(mid + 0.5 * h * xi);
                weights.push(0.5 * h * wi / std::f64::consts::TAU);
            }
        }
        Axis { angles, weights }
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m {
        let mut t = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=m {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (t * p1 - p0) / (t * t - 1.0);
            let dt = p1 / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = t;
        w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    (x, w)
}

/// Deterministic pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

pub fn pairwise_sum_complex(v: &[Complex64]) -> Complex64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum_complex(&v[..mid]) + pairwise_sum_complex(&v[mid..])
}

#[derive(Clone, Debug)]
struct Stage {
    /// For each input suffix: (output suffix index, exponent of this variable).
    links: Vec<(u32, u32)>,
    out_len: usize,
    max_exp: u32,
}

/// Precomputed suffix structure of a polynomial.
#[derive(Clone, Debug)]
pub struct StagedEvaluator {
    n: usize,
    stages: Vec<Stage>,
    top: Vec<Complex64>,
}

impl StagedEvaluator {
    pub fn new(p: &Polynomial) -> StagedEvaluator {
        let n = p.n();
        let last_deg = p.partial_degrees()[n - 1] as usize;
        // suffix tables, built from the last variable backwards
        let mut stages: Vec<Stage> = Vec::with_capacity(n - 1);
        let mut next_index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        for e in 0..=last_deg as u32 {
            next_index.insert(vec![e], e as usize);
        }
        let mut next_len = last_deg + 1;
        for j in (0..n - 1).rev() {
            let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
            for (alpha, _) in p.terms() {
                let suffix = alpha.as_slice()[j..].to_vec();
                let len = index.len();
                index.entry(suffix).or_insert(len);
            }
            let mut links = vec![(0u32, 0u32); index.len()];
            let mut max_exp = 0;
            for (suffix, &i) in &index {
                let out = next_index[&suffix[1..]];
                links[i] = (out as u32, suffix[0]);
                max_exp = max_exp.max(suffix[0]);
            }
            stages.push(Stage {
                links,
                out_len: next_len,
                max_exp,
            });
            next_len = index.len();
            next_index = index;
        }
        stages.reverse();
        let mut top = vec![ZERO; next_len];
        for (alpha, c) in p.terms() {
            top[next_index[alpha.as_slice()]] += c;
        }
        StagedEvaluator { n, stages, top }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn power_tables(&self, axes: &[Axis]) -> Vec<Vec<Complex64>> {
        axes.iter()
            .zip(&self.stages)
            .map(|(axis, stage)| {
                let w = stage.max_exp as usize + 1;
                let mut t = Vec::with_capacity(axis.len() * w);
                for &theta in &axis.angles {
                    for e in 0..w {
                        t.push(Complex64::cis(e as f64 * theta));
                    }
                }
                t
            })
            .collect()
    }

    fn collapse(&self, j: usize, c: &[Complex64], pow: &[Complex64], k: usize) -> Vec<Complex64> {
        let stage = &self.stages[j];
        let w = stage.max_exp as usize + 1;
        let row = &pow[k * w..(k + 1) * w];
        let mut out = vec![ZERO; stage.out_len];
        for (&cs, &(o, e)) in c.iter().zip(&stage.links) {
            out[o as usize] += cs * row[e as usize];
        }
        out
    }

    /// Weighted sum over the first `n − 1` axes of `leaf(coefficients)`,
    /// where `coefficients` are the dense ascending coefficients of the
    /// polynomial in the last variable at each prefix node.
    pub fn reduce_prefix<F>(&self, axes: &[Axis], leaf: &F) -> f64
    where
        F: Fn(&[Complex64]) -> f64 + Sync,
    {
        assert_eq!(axes.len(), self.n - 1);
        let pow = self.power_tables(axes);
        if axes.is_empty() {
            return leaf(&self.top);
        }
        let axis = &axes[0];
        let terms: Vec<f64> = (0..axis.len())
            .into_par_iter()
            .map(|k| {
                let next = self.collapse(0, &self.top, &pow[0], k);
                axis.weights[k] * self.walk(1, &next, axes, &pow, leaf)
            })
            .collect();
        pairwise_sum(&terms)
    }

    fn walk<F>(&self, j: usize, c: &[Complex64], axes: &[Axis], pow: &[Vec<Complex64>], leaf: &F) -> f64
    where
        F: Fn(&[Complex64]) -> f64,
    {
        if j == axes.len() {
            return leaf(c);
        }
        let axis = &axes[j];
        let terms: Vec<f64> = (0..axis.len())
            .map(|k| {
                let next = self.collapse(j, c, &pow[j], k);
                axis.weights[k] * self.walk(j + 1, &next, axes, pow, leaf)
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// Weighted sum of `f(P(node))` over the full tensor grid.
    pub fn reduce<F>(&self, axes: &[Axis], f: &F) -> f64
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        assert_eq!(axes.len(), self.n);
        let last = &axes[self.n - 1];
        let zs: Vec<Complex64> = last.angles.iter().map(|&t| Complex64::cis(t)).collect();
        let leaf = |coeffs: &[Complex64]| {
            let terms: Vec<f64> = zs
                .iter()
                .zip(&last.weights)
                .map(|(&z, &w)| w * f(horner(coeffs, z)))
                .collect();
            pairwise_sum(&terms)
        };
        self.reduce_prefix(&axes[..self.n - 1], &leaf)
    }

    /// All grid values in row-major order (first axis slowest).
    pub fn values(&self, axes: &[Axis]) -> Vec<Complex64> {
        assert_eq!(axes.len(), self.n);
        let pow = self.power_tables(&axes[..self.n - 1]);
        let zs: Vec<Complex64> = axes[self.n - 1]
            .angles
            .iter()
            .map(|&t| Complex64::cis(t))
            .collect();
        let mut out = Vec::with_capacity(axes.iter().map(Axis::len).product());
        self.collect_values(0, &self.top, &axes[..self.n - 1], &pow, &zs, &mut out);
        out
    }

    fn collect_values(
        &self,
        j: usize,
        c: &[Complex64],
        axes: &[Axis],
        pow: &[Vec<Complex64>],
        zs: &[Complex64],
        out: &mut Vec<Complex64>,
    ) {
        if j == axes.len() {
            out.extend(zs.iter().map(|&z| horner(c, z)));
            return;
        }
        for k in 0..axes[j].len() {
            let next = self.collapse(j, c, &pow[j], k);
            self.collect_values(j + 1, &next, axes, pow, zs, out);
        }
    }
}

/// Evaluates ascending coefficients at `z`.
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
}
