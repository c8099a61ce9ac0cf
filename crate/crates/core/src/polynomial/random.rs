use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{MultiIndex, Polynomial};
use crate::corpus::{CoefficientLaw, CorpusSpec, PolyKind};
use crate::error::{Error, Result};

/// Upper bound on the number of terms drawn for one random polynomial.
const MAX_TERMS: usize = 10;

/// All monomials admissible for `kind` at degree `degree`.
///
/// `General` yields every `α` with `|α| ≤ degree`; `Homogeneous` those with
/// `|α| = degree`; `Multiaffine` the 0/1 vectors with `|α| = degree`.
pub fn enumerate_monomials(n: usize, degree: u32, kind: PolyKind) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    let cap = match kind {
        PolyKind::Multiaffine => 1,
        _ => degree,
    };
    fn rec(
        j: usize,
        remaining: u32,
        cap: u32,
        exact: bool,
        current: &mut Vec<u32>,
        out: &mut Vec<MultiIndex>,
    ) {
        if j == current.len() {
            if !exact || remaining == 0 {
                out.push(MultiIndex(current.clone()));
            }
            return;
        }
        for e in 0..=remaining.min(cap) {
            current[j] = e;
            rec(j + 1, remaining - e, cap, exact, current, out);
        }
        current[j] = 0;
    }
    let exact = !matches!(kind, PolyKind::General);
    rec(0, degree, cap, exact, &mut current, &mut out);
    out
}

/// Seeded source of random coefficients and polynomials.
///
/// Each corpus member gets its own ChaCha stream, so member `i` does not
/// depend on how many draws earlier members consumed.
pub struct PolySampler {
    rng: ChaCha8Rng,
    law: CoefficientLaw,
}

impl PolySampler {
    pub fn new(seed: u64, stream: u64, law: CoefficientLaw) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        PolySampler { rng, law }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn coefficient(&mut self) -> Complex64 {
        match self.law {
            CoefficientLaw::Gaussian => {
                let normal = Normal::new(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap();
                loop {
                    let c = Complex64::new(normal.sample(&mut self.rng), normal.sample(&mut self.rng));
                    if c != Complex64::new(0.0, 0.0) {
                        return c;
                    }
                }
            }
            CoefficientLaw::Rademacher => {
                let s = if self.rng.random::<bool>() { 1.0 } else { -1.0 };
                Complex64::new(s, 0.0)
            }
            CoefficientLaw::Steinhaus => {
                let t = self.rng.random::<f64>() * std::f64::consts::TAU;
                Complex64::from_polar(1.0, t)
            }
        }
    }

    /// Draws a polynomial of the given kind. For `General`, `degree` is a
    /// cap on the total degree; otherwise it is the exact total degree.
    pub fn polynomial(&mut self, n: usize, kind: PolyKind, degree: u32) -> Result<Polynomial> {
        if n == 0 {
            return Err(Error::invalid("n must be at least 1"));
        }
        if kind == PolyKind::Multiaffine && degree as usize > n {
            return Err(Error::Unsatisfiable(format!(
                "multiaffine degree {degree} exceeds n = {n}"
            )));
        }
        let monomials = enumerate_monomials(n, degree, kind);
        debug_assert!(!monomials.is_empty());
        let t = self.rng.random_range(1..=monomials.len().min(MAX_TERMS));
        let mut chosen = index::sample(&mut self.rng, monomials.len(), t).into_vec();
        chosen.sort_unstable();
        let mut terms = Vec::with_capacity(t);
        for i in chosen {
            terms.push((monomials[i].clone(), self.coefficient()));
        }
        Polynomial::from_terms(n, terms)
    }
}

/// Member `index` of the corpus described by `spec`.
pub fn random_polynomial(spec: &CorpusSpec, index: u64) -> Result<Polynomial> {
    spec.validate()?;
    let mut sampler = PolySampler::new(spec.seed, index, spec.coefficient_law);
    let degree = match spec.kind {
        PolyKind::General => spec.max_total_degree,
        _ => match spec.exact_degree {
            Some(m) => m,
            None => sampler.rng().random_range(1..=spec.max_total_degree),
        },
    };
    sampler.polynomial(spec.n, spec.kind, degree)
}
