//! Sparse polynomials in `n` complex variables.
//!
//! A [`Polynomial`] is a finite map from exponent vectors to complex
//! coefficients, kept in canonical form: no stored coefficient is zero and
//! terms are ordered lexicographically by exponent. Every operation returns a
//! new canonical value.

mod interchange;
mod random;

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use interchange::{PolyJson, TermJson};
pub use random::{enumerate_monomials, random_polynomial, PolySampler};

/// Exponent vector `α = (α_1, …, α_n)` of a monomial `z^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    /// The index with a single `1` in position `j`.
    pub fn unit(n: usize, j: usize) -> Self {
        let mut e = vec![0; n];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|α| = Σ α_j`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0[j]
    }

    fn sum(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Degree functionals of a nonzero polynomial.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    /// Total degree `max |α|`.
    pub total: u32,
    /// Partial degrees `d_j = max α_j`.
    pub per_variable: Vec<u32>,
    /// `deg_∞ = max_j d_j`.
    pub max_partial: u32,
    /// Every stored term has `|α| = total`.
    pub homogeneous: bool,
}

/// Compensated summation; naive sums of many inexact terms drift by `N·ε`.
#[derive(Default)]
struct NeumaierSum {
    sum: f64,
    carry: f64,
}

impl NeumaierSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        self.carry += if self.sum.abs() >= x.abs() {
            (self.sum - t) + x
        } else {
            (x - t) + self.sum
        };
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Coefficient functionals `L(P) = Σ|c_α|`, `H(P) = max|c_α|` and the
/// Parseval norm `(Σ|c_α|²)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientFunctionals {
    pub length: f64,
    pub height: f64,
    pub parseval_l2: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, Complex64>,
}

fn check_coefficient(c: Complex64) -> Result<()> {
    if c.re.is_finite() && c.im.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("non-finite coefficient {c}")))
    }
}

impl Polynomial {
    /// Builds a canonical polynomial from raw `(exponents, coefficient)` pairs.
    ///
    /// Duplicate exponent vectors are summed in input order and zero
    /// coefficients are dropped.
    pub fn build<I>(n: usize, raw_terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (Vec<i64>, Complex64)>,
    {
        if n == 0 {
            return Err(Error::invalid("a polynomial needs at least one variable"));
        }
        let mut terms = Vec::new();
        for (index, c) in raw_terms {
            if index.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: index.len(),
                });
            }
            let mut alpha = Vec::with_capacity(n);
            for &e in &index {
                if e < 0 {
                    return Err(Error::NegativeExponent {
                        index: index.clone(),
                        exponent: e,
                    });
                }
                let e = u32::try_from(e)
                    .map_err(|_| Error::invalid(format!("exponent {e} out of range")))?;
                alpha.push(e);
            }
            terms.push((MultiIndex(alpha), c));
        }
        Polynomial::from_terms(n, terms)
    }

    /// Typed variant of [`Polynomial::build`].
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Polynomial>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        if n == 0 {
            return Err(Error::invalid("a polynomial needs at least one variable"));
        }
        let mut map: BTreeMap<MultiIndex, Complex64> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: alpha.len(),
                });
            }
            check_coefficient(c)?;
            *map.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        map.retain(|_, c| !is_zero(*c));
        Ok(Polynomial { n, terms: map })
    }

    pub fn zero(n: usize) -> Polynomial {
        assert!(n >= 1);
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: Complex64) -> Polynomial {
        Polynomial::monomial(n, MultiIndex::zero(n), c)
    }

    pub fn monomial(n: usize, alpha: MultiIndex, c: Complex64) -> Polynomial {
        assert!(n >= 1 && alpha.len() == n);
        let mut terms = BTreeMap::new();
        if !is_zero(c) {
            terms.insert(alpha, c);
        }
        Polynomial { n, terms }
    }

    /// The coordinate function `z_j` (0-based).
    pub fn variable(n: usize, j: usize) -> Polynomial {
        Polynomial::monomial(n, MultiIndex::unit(n, j), Complex64::new(1.0, 0.0))
    }

    /// Univariate polynomial from ascending coefficients `c_0, c_1, …`.
    pub fn univariate(coeffs: &[Complex64]) -> Polynomial {
        let mut terms = BTreeMap::new();
        for (k, &c) in coeffs.iter().enumerate() {
            if !is_zero(c) {
                terms.insert(MultiIndex(vec![k as u32]), c);
            }
        }
        Polynomial { n: 1, terms }
    }

    /// Univariate polynomial with real ascending coefficients.
    pub fn univariate_real(coeffs: &[f64]) -> Polynomial {
        let c: Vec<Complex64> = coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Polynomial::univariate(&c)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is a constant (including zero).
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.len() {
            0 => Some(Complex64::new(0.0, 0.0)),
            1 => {
                let (alpha, c) = self.terms.iter().next().unwrap();
                (alpha.order() == 0).then_some(*c)
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl ExactSizeIterator<Item = (&MultiIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> Complex64 {
        self.terms
            .get(alpha)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    fn check_same_n(&self, other: &Polynomial) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_n(other)?;
        let mut terms = self.terms.clone();
        for (alpha, c) in &other.terms {
            *terms
                .entry(alpha.clone())
                .or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        terms.retain(|_, c| !is_zero(*c));
        Ok(Polynomial { n: self.n, terms })
    }

    pub fn sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (a.clone(), c * s))
            .filter(|(_, c)| !is_zero(*c))
            .collect();
        Polynomial { n: self.n, terms }
    }

    pub fn mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_same_n(other)?;
        // Accumulate in a hash map; BTreeMap insertion dominates for wide
        // products such as squares of elementary symmetric polynomials.
        let mut acc: HashMap<MultiIndex, Complex64> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *acc.entry(a.sum(b)).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !is_zero(*c)).collect();
        Ok(Polynomial { n: self.n, terms })
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut result = Polynomial::constant(self.n, Complex64::new(1.0, 0.0));
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base).expect("same n");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).expect("same n");
            }
        }
        result
    }

    /// Degree profile, or `None` for the zero polynomial.
    pub fn degree_profile(&self) -> Option<DegreeProfile> {
        if self.is_zero() {
            return None;
        }
        let per_variable = self.partial_degrees();
        let total = self.terms.keys().map(MultiIndex::order).max().unwrap_or(0);
        let homogeneous = self.terms.keys().all(|a| a.order() == total);
        Some(DegreeProfile {
            total,
            max_partial: per_variable.iter().copied().max().unwrap_or(0),
            per_variable,
            homogeneous,
        })
    }

    /// `deg(P_j)` for each variable; all zeros for the zero polynomial.
    pub fn partial_degrees(&self) -> Vec<u32> {
        let mut d = vec![0u32; self.n];
        for alpha in self.terms.keys() {
            for (dj, &e) in d.iter_mut().zip(alpha.as_slice()) {
                *dj = (*dj).max(e);
            }
        }
        d
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    pub fn max_partial_degree(&self) -> u32 {
        self.partial_degrees().into_iter().max().unwrap_or(0)
    }

    /// Fixes every variable except `j` (0-based) and returns the univariate
    /// polynomial `P_j`. `values` holds the `n - 1` fixed coordinates in
    /// order, skipping position `j`.
    pub fn partial_substitute(&self, j: usize, values: &[Complex64]) -> Result<Polynomial> {
        if j >= self.n {
            return Err(Error::invalid(format!(
                "variable index {j} out of range for n = {}",
                self.n
            )));
        }
        if values.len() != self.n - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n - 1,
                found: values.len(),
            });
        }
        let mut coeffs: BTreeMap<u32, Complex64> = BTreeMap::new();
        for (alpha, c) in &self.terms {
            let mut v = *c;
            let mut fixed = values.iter();
            for (i, &e) in alpha.as_slice().iter().enumerate() {
                if i == j {
                    continue;
                }
                let u = fixed.next().unwrap();
                v *= u.powu(e);
            }
            *coeffs
                .entry(alpha.get(j))
                .or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let terms = coeffs
            .into_iter()
            .filter(|(_, c)| !is_zero(*c))
            .map(|(e, c)| (MultiIndex(vec![e]), c))
            .collect();
        Ok(Polynomial { n: 1, terms })
    }

    /// `P(r z)`: each coefficient multiplied by `r^{|α|}`.
    pub fn dilate(&self, r: f64) -> Result<Polynomial> {
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::invalid(format!("dilation radius must be > 0, got {r}")));
        }
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (a.clone(), c * r.powi(a.order() as i32)))
            .filter(|(_, c)| !is_zero(*c))
            .collect();
        Ok(Polynomial { n: self.n, terms })
    }

    pub fn coefficient_functionals(&self) -> CoefficientFunctionals {
        let mut length = NeumaierSum::default();
        let mut height: f64 = 0.0;
        let mut sq = NeumaierSum::default();
        for c in self.terms.values() {
            let m = c.norm();
            length.add(m);
            height = height.max(m);
            sq.add(c.norm_sqr());
        }
        CoefficientFunctionals {
            length: length.total(),
            height,
            parseval_l2: sq.total().sqrt(),
        }
    }

    pub fn evaluate(&self, z: &[Complex64]) -> Result<Complex64> {
        if z.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: z.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (alpha, c) in &self.terms {
            let mut v = *c;
            for (zj, &e) in z.iter().zip(alpha.as_slice()) {
                if e > 0 {
                    v *= zj.powu(e);
                }
            }
            acc += v;
        }
        Ok(acc)
    }

    /// Dense ascending coefficients of a univariate polynomial.
    pub fn univariate_coefficients(&self) -> Result<Vec<Complex64>> {
        if self.n != 1 {
            return Err(Error::invalid(format!(
                "expected a univariate polynomial, got n = {}",
                self.n
            )));
        }
        let deg = self.total_degree() as usize;
        let mut c = vec![Complex64::new(0.0, 0.0); deg + 1];
        for (alpha, v) in &self.terms {
            c[alpha.get(0) as usize] = *v;
        }
        Ok(c)
    }

    /// Drops the variables that do not occur; returns the reduced polynomial
    /// and the indices of the kept variables. A constant keeps variable 0.
    pub fn compress_variables(&self) -> (Polynomial, Vec<usize>) {
        let d = self.partial_degrees();
        let mut kept: Vec<usize> = (0..self.n).filter(|&j| d[j] > 0).collect();
        if kept.is_empty() {
            kept.push(0);
        }
        if kept.len() == self.n {
            return (self.clone(), kept);
        }
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (MultiIndex(kept.iter().map(|&j| a.get(j)).collect()), *c))
            .collect();
        (
            Polynomial {
                n: kept.len(),
                terms,
            },
            kept,
        )
    }

    /// Structural equality with a relative coefficient tolerance.
    pub fn approx_eq(&self, other: &Polynomial, rel_tol: f64) -> bool {
        if self.n != other.n {
            return false;
        }
        let scale = self
            .coefficient_functionals()
            .height
            .max(other.coefficient_functionals().height)
            .max(f64::MIN_POSITIVE);
        let keys: std::collections::BTreeSet<&MultiIndex> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .all(|a| (self.coefficient(a) - other.coefficient(a)).norm() <= rel_tol * scale)
    }
}

pub(crate) fn is_zero(c: Complex64) -> bool {
    c.re == 0.0 && c.im == 0.0
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (alpha, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (j, &e) in alpha.as_slice().iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "·z{}", j + 1)?,
                    _ => write!(f, "·z{}^{e}", j + 1)?,
                }
            }
        }
        Ok(())
    }
}
