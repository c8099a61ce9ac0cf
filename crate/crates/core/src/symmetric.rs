//! Elementary symmetric and power-sum polynomials, Newton's identities,
//! the normalized family `U_{m,n}` and Monte Carlo moments under Steinhaus
//! sampling.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::binomial_u64;
use crate::error::{Error, Result};
use crate::norms::{Method, NormFlags, NormResult};
use crate::polynomial::{MultiIndex, Polynomial};

/// Largest `C(n, m)` expanded into explicit terms by [`u_mn`].
pub const U_MN_TERM_CAP: u64 = 2_000_000;
/// Largest `k` accepted by [`newton_decompose`].
pub const NEWTON_MAX_K: u32 = 8;

fn real(c: f64) -> Complex64 {
    Complex64::new(c, 0.0)
}

/// `p_{k,n}(z) = z_1^k + … + z_n^k`.
pub fn power_sum(k: u32, n: usize) -> Result<Polynomial> {
    if k == 0 || n == 0 {
        return Err(Error::invalid("power_sum needs k >= 1 and n >= 1"));
    }
    Polynomial::from_terms(
        n,
        (0..n).map(|j| {
            let mut a = vec![0u32; n];
            a[j] = k;
            (MultiIndex::new(a), real(1.0))
        }),
    )
}

fn multiaffine_homogeneous(m: usize, n: usize, c: f64) -> Result<Polynomial> {
    if m == 0 || m > n {
        return Err(Error::invalid(format!("need 1 <= k <= n, got k = {m}, n = {n}")));
    }
    let count = binomial_u64(n as u64, m as u64)?;
    if count > U_MN_TERM_CAP {
        return Err(Error::invalid(format!(
            "C({n}, {m}) = {count} terms exceeds the expansion cap {U_MN_TERM_CAP}"
        )));
    }
    Polynomial::from_terms(
        n,
        (0..n).combinations(m).map(|idx| {
            let mut a = vec![0u32; n];
            for i in idx {
                a[i] = 1;
            }
            (MultiIndex::new(a), real(c))
        }),
    )
}

/// `e_{k,n}(z) = Σ_{i_1<…<i_k} z_{i_1}⋯z_{i_k}`.
pub fn elementary_symmetric(k: usize, n: usize) -> Result<Polynomial> {
    multiaffine_homogeneous(k, n, 1.0)
}

/// `U_{m,n}(z) = m! e_{m,n}(z/√n)`.
pub fn u_mn(m: usize, n: usize) -> Result<Polynomial> {
    let factorial: f64 = (1..=m).map(|i| i as f64).product();
    multiaffine_homogeneous(m, n, factorial * (n as f64).powf(-(m as f64) / 2.0))
}

/// `e_{k}(z)` by the `O(nk)` recurrence, without expanding the polynomial.
pub fn elementary_symmetric_eval(k: usize, z: &[Complex64]) -> Complex64 {
    let mut e = vec![Complex64::new(0.0, 0.0); k + 1];
    e[0] = real(1.0);
    for &zi in z {
        for j in (1..=k).rev() {
            let prev = e[j - 1];
            e[j] += zi * prev;
        }
    }
    e[k]
}

/// `U_{m,n}` evaluated at `z` in `O(nm)`.
pub fn u_mn_eval(m: usize, z: &[Complex64]) -> Complex64 {
    let n = z.len() as f64;
    let factorial: f64 = (1..=m).map(|i| i as f64).product();
    elementary_symmetric_eval(m, z) * (factorial * n.powf(-(m as f64) / 2.0))
}

/// `k! e_k = Σ a_j p_1^{j_1} ⋯ p_k^{j_k}` over `j_1 + 2j_2 + … + k j_k = k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonDecomposition {
    pub k: u32,
    /// `(j_1, …, j_k)` and its integer coefficient, in lexicographic order.
    pub terms: Vec<(Vec<u32>, i64)>,
    /// Largest coefficient difference between the expansion at `n = k` and
    /// `k! e_{k,k}`.
    pub residual: f64,
}

impl NewtonDecomposition {
    /// Terms of `w_k`, i.e. everything except `p_1^k`.
    pub fn w_terms(&self) -> impl Iterator<Item = &(Vec<u32>, i64)> {
        self.terms.iter().filter(|(j, _)| j[1..].iter().any(|&x| x != 0))
    }

    /// `Σ a_j Π p_{i,n}^{j_i}` as a polynomial in `n` variables.
    pub fn expand(&self, n: usize) -> Result<Polynomial> {
        let sums = (1..=self.k)
            .map(|i| power_sum(i, n))
            .collect::<Result<Vec<_>>>()?;
        let mut acc = Polynomial::zero(n);
        for (j, a) in &self.terms {
            let mut t = Polynomial::constant(n, real(*a as f64));
            for (i, &ji) in j.iter().enumerate() {
                if ji > 0 {
                    t = t.mul(&sums[i].pow(ji))?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Structural equality `expand(n) == k! e_{k,n}`.
    pub fn verify(&self, n: usize) -> Result<bool> {
        Ok(self.expand(n)? == self.k_factorial_e(n)?)
    }

    fn k_factorial_e(&self, n: usize) -> Result<Polynomial> {
        let f: f64 = (1..=self.k).map(|i| i as f64).product();
        Ok(elementary_symmetric(self.k as usize, n)?.scale(real(f)))
    }
}

/// Newton-Girard: with `E_k = k! e_k`,
/// `E_k = Σ_{i=1}^k (−1)^{i−1} (k−1)!/(k−i)! · E_{k−i} p_i`.
pub fn newton_decompose(k: u32) -> Result<NewtonDecomposition> {
    if k == 0 || k > NEWTON_MAX_K {
        return Err(Error::invalid(format!("k must lie in 1..={NEWTON_MAX_K}, got {k}")));
    }
    let ku = k as usize;
    let mut e: Vec<BTreeMap<Vec<u32>, i64>> = vec![BTreeMap::from([(vec![0u32; ku], 1)])];
    for step in 1..=ku {
        let mut next = BTreeMap::new();
        for i in 1..=step {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let falling: i64 = ((step - i + 1)..step).map(|x| x as i64).product();
            for (j, c) in &e[step - i] {
                let mut j = j.clone();
                j[i - 1] += 1;
                *next.entry(j).or_insert(0) += sign * falling * c;
            }
        }
        next.retain(|_, c| *c != 0);
        e.push(next);
    }
    let mut d = NewtonDecomposition {
        k,
        terms: e.pop().unwrap_or_default().into_iter().collect(),
        residual: 0.0,
    };
    let lhs = d.k_factorial_e(ku)?;
    let rhs = d.expand(ku)?;
    d.residual = rhs
        .sub(&lhs)?
        .terms()
        .map(|(_, c)| c.norm())
        .fold(0.0, f64::max);
    Ok(d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinhausMCSpec {
    pub samples: usize,
    pub seed: u64,
    /// Number of batches for the batch-means standard error.
    pub batch: usize,
}

impl SteinhausMCSpec {
    pub fn new(samples: usize, seed: u64) -> Self {
        SteinhausMCSpec {
            samples,
            seed,
            batch: 100,
        }
    }
}

/// Monte Carlo estimate of `E|P(z)|^p` for independent uniform phases.
///
/// `value` is the moment itself, not its `p`-th root; `error_estimate` is
/// the batch-means standard error.
pub fn steinhaus_moment_mc(p: &Polynomial, exponent: f64, spec: &SteinhausMCSpec) -> Result<NormResult> {
    steinhaus_moment_mc_fn(p.n(), |z| p.evaluate(z).unwrap_or_default(), exponent, spec)
}

/// As [`steinhaus_moment_mc`] for any function of `n` phases.
pub fn steinhaus_moment_mc_fn<F>(n: usize, f: F, exponent: f64, spec: &SteinhausMCSpec) -> Result<NormResult>
where
    F: Fn(&[Complex64]) -> Complex64 + Sync,
{
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::invalid(format!("exponent p must be positive, got {exponent}")));
    }
    if spec.samples < 100 {
        return Err(Error::invalid("at least 100 samples are required"));
    }
    if spec.batch < 2 || spec.batch > spec.samples {
        return Err(Error::invalid("batch count must lie in 2..=samples"));
    }
    let b = spec.batch;
    let means: Vec<f64> = (0..b)
        .into_par_iter()
        .map(|i| {
            let size = spec.samples / b + usize::from(i < spec.samples % b);
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i as u64);
            let mut z = vec![Complex64::new(0.0, 0.0); n];
            let mut sum = 0.0;
            for _ in 0..size {
                for zj in z.iter_mut() {
                    *zj = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                }
                sum += f(&z).norm().powf(exponent);
            }
            sum / size as f64
        })
        .collect();
    let mean = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (b - 1) as f64;
    Ok(NormResult {
        value: mean,
        method: Method::MonteCarlo,
        error_estimate: (var / b as f64).sqrt(),
        converged: true,
        flags: NormFlags::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lp_norm_exact_even;

    #[test]
    fn power_sums() {
        let p = power_sum(1, 3).unwrap();
        assert_eq!(p.num_terms(), 3);
        assert_eq!(p.to_string(), Polynomial::build(3, [(vec![1, 0, 0], real(1.0)), (vec![0, 1, 0], real(1.0)), (vec![0, 0, 1], real(1.0))]).unwrap().to_string());
        let p = power_sum(4, 5).unwrap();
        let d = p.degree_profile().unwrap();
        assert_eq!((d.max_partial, d.total, d.homogeneous), (4, 4, true));
    }

    #[test]
    fn elementary() {
        assert_eq!(elementary_symmetric(2, 3).unwrap().num_terms(), 3);
        let top = elementary_symmetric(4, 4).unwrap();
        assert_eq!(top.num_terms(), 1);
        assert_eq!(top.coefficient(&MultiIndex::new(vec![1; 4])), real(1.0));
        assert_eq!(elementary_symmetric(2, 5).unwrap().num_terms(), 10);
        assert_eq!(elementary_symmetric(3, 6).unwrap().num_terms(), 20);
        assert!(elementary_symmetric(4, 3).is_err());
        let d = elementary_symmetric(3, 6).unwrap().degree_profile().unwrap();
        assert_eq!((d.max_partial, d.total, d.homogeneous), (1, 3, true));
    }

    #[test]
    fn newton_small_cases() {
        let d = newton_decompose(2).unwrap();
        assert_eq!(d.terms, vec![(vec![0, 1], -1), (vec![2, 0], 1)]);
        let d = newton_decompose(3).unwrap();
        assert_eq!(d.terms, vec![(vec![0, 0, 1], 2), (vec![1, 1, 0], -3), (vec![3, 0, 0], 1)]);
        for k in 1..=NEWTON_MAX_K {
            let d = newton_decompose(k).unwrap();
            assert_eq!(d.residual, 0.0);
            for (j, _) in &d.terms {
                let weight: u32 = j.iter().enumerate().map(|(i, &x)| (i as u32 + 1) * x).sum();
                assert_eq!(weight, k);
            }
            assert_eq!(d.w_terms().count(), d.terms.len() - 1);
            // |a_j| counts permutations of cycle type j
            let total: i64 = d.terms.iter().map(|(_, a)| a.abs()).sum();
            assert_eq!(total, (1..=k as i64).product::<i64>());
        }
        assert!(newton_decompose(0).is_err() && newton_decompose(9).is_err());
    }

    #[test]
    fn newton_identity_structural() {
        for k in 2..=4u32 {
            let d = newton_decompose(k).unwrap();
            for n in k as usize..=k as usize + 2 {
                assert!(d.verify(n).unwrap(), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn u_mn_family() {
        let u = u_mn(2, 2).unwrap();
        assert_eq!(u.num_terms(), 1);
        assert!((u.coefficient(&MultiIndex::new(vec![1, 1])) - real(1.0)).norm() < 1e-15);
        for n in [1usize, 5, 17] {
            let l2 = u_mn(1, n).unwrap().coefficient_functionals().parseval_l2;
            assert!((l2 - 1.0).abs() < 1e-14);
        }
        for n in [2usize, 8, 64] {
            let l2 = u_mn(2, n).unwrap().coefficient_functionals().parseval_l2;
            assert!((l2 * l2 - 2.0 * (n as f64 - 1.0) / n as f64).abs() < 1e-13);
        }
        assert!(u_mn(3, 2).is_err());
        assert!(u_mn(4, 400).is_err());
    }

    #[test]
    fn fast_evaluation_matches_expansion() {
        let z: Vec<Complex64> = (0..7).map(|j| Complex64::from_polar(1.0, 0.37 * j as f64 + 0.1)).collect();
        for m in 1..=4 {
            let direct = u_mn(m, 7).unwrap().evaluate(&z).unwrap();
            assert!((direct - u_mn_eval(m, &z)).norm() < 1e-12);
        }
    }

    #[test]
    fn mc_examples() {
        let spec = SteinhausMCSpec::new(10_000, 7);
        let z1 = Polynomial::variable(1, 0);
        let r = steinhaus_moment_mc(&z1, 2.0, &spec).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12 && r.method == Method::MonteCarlo);

        let q = power_sum(2, 16).unwrap().scale(real(1.0 / 16.0));
        let r = steinhaus_moment_mc(&q, 2.0, &spec).unwrap();
        assert!((r.value - 1.0 / 16.0).abs() <= 4.0 * r.error_estimate, "{r:?}");

        let n = 256;
        let r = steinhaus_moment_mc_fn(n, |z| u_mn_eval(1, z), 4.0, &spec).unwrap();
        assert!((r.value - (2.0 - 1.0 / n as f64)).abs() <= 3.0 * r.error_estimate, "{r:?}");

        let again = steinhaus_moment_mc(&q, 2.0, &spec).unwrap();
        assert_eq!(again, steinhaus_moment_mc(&q, 2.0, &spec).unwrap());
    }

    #[test]
    fn mc_agrees_with_exact_even() {
        let p = u_mn(2, 6).unwrap();
        let exact = lp_norm_exact_even(&p, 4).unwrap().value.powi(4);
        let r = steinhaus_moment_mc(&p, 4.0, &SteinhausMCSpec::new(20_000, 3)).unwrap();
        assert!((r.value - exact).abs() <= 4.0 * r.error_estimate);
    }
}
