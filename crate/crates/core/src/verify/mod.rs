//! Inequality checks over polynomial corpora, sharpness scans and reports.

mod report;
mod scan;

pub use report::{
    checks_to_csv, read_run, run_to_json, scan_to_csv, scan_to_json, write_run, write_scan, ReportFormat,
};
pub use scan::{sharpness_scan, ScanFamily, ScanParams, ScanRow, ScanTable};

use std::collections::HashMap;
use std::f64::consts::{E, LN_2};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{central_binomial, interpolation_constant, ln_arestov_lambda};
use crate::corpus::polynomial_hash;
use crate::error::{Error, Result};
use crate::norms::{lp_norm, mahler_measure_with, orlicz_luxemburg_norm, Method, NormResult, OrliczSpec};
use crate::polynomial::Polynomial;
use crate::quadrature::{mean_on_box, BoxSubset, Integrand, QuadratureSpec};

/// Slack for checks whose every quantity is exact.
pub const EXACT_SLACK: f64 = 1e-9;
/// Multiplier on the summed relative error estimates of quadrature-backed
/// quantities.
pub const SLACK_FACTOR: f64 = 10.0;
/// Checks with a ratio above this keep full witness polynomials.
pub const NEAR_FAIL_RATIO: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    /// `‖P‖_q ≤ 2^n Π d_j^{1/p−1/q} ‖P‖_p` for `p < q`.
    Nikolskii,
    /// The same constant with the norms swapped.
    NikolskiiPrinted,
    /// `‖P‖_q ≤ √(q/min(p,2))^{deg P} ‖P‖_p`.
    Thm21,
    /// `‖P‖_q ≤ √(q/p)^m ‖P‖_p` for `m`-homogeneous `P`.
    Bayart,
    /// `‖P(rz)‖_q ≤ ‖P‖_p` at `r = √(p/q)`.
    Weissler,
    /// `‖P‖_p ≤ Π Λ(p, d_j) M(P)`.
    MahlerMain,
    /// `‖P‖_p ≤ Λ(p, m)^n M(P)` with `m = deg_∞ P`.
    MahlerCor,
    /// `‖P‖_{ψ_{1/m}} ≤ (2^n (e−1))^m M(P)`.
    Orlicz,
    /// `‖PQ‖_p ≥ (Λ(p, m) Λ(p, k))^{−n} ‖P‖_p ‖Q‖_p`.
    ProductLower,
    /// `M(P+Q) ≤ C(2m, m)^{n/2} (M(P) + M(Q))`.
    MahlerTriangle,
    /// `‖P‖_p ≤ C(θ) Λ(p, m)^n ‖P‖_1^{1−θ} ‖P‖_{L¹(E)}^θ`.
    Interpolation,
    /// `M(f) ≤ C(α) (∫_A |f|)^α (∫_{A'} |f|)^{1−α}`.
    GeoMeanLemma,
}

kebab_enum_str!(TheoremId {
    Nikolskii => "nikolskii",
    NikolskiiPrinted => "nikolskii-printed",
    Thm21 => "thm21",
    Bayart => "bayart",
    Weissler => "weissler",
    MahlerMain => "mahler-main",
    MahlerCor => "mahler-cor",
    Orlicz => "orlicz",
    ProductLower => "product-lower",
    MahlerTriangle => "mahler-triangle",
    Interpolation => "interpolation",
    GeoMeanLemma => "geo-mean-lemma",
});

impl TheoremId {
    pub const ALL: [TheoremId; 12] = [
        TheoremId::Nikolskii,
        TheoremId::NikolskiiPrinted,
        TheoremId::Thm21,
        TheoremId::Bayart,
        TheoremId::Weissler,
        TheoremId::MahlerMain,
        TheoremId::MahlerCor,
        TheoremId::Orlicz,
        TheoremId::ProductLower,
        TheoremId::MahlerTriangle,
        TheoremId::Interpolation,
        TheoremId::GeoMeanLemma,
    ];

    /// Whether the check compares two exponents `p < q`.
    pub fn needs_q(self) -> bool {
        matches!(
            self,
            TheoremId::Nikolskii
                | TheoremId::NikolskiiPrinted
                | TheoremId::Thm21
                | TheoremId::Bayart
                | TheoremId::Weissler
        )
    }
}

/// Parameters of one verification run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParams {
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
}

impl Default for VerifyParams {
    fn default() -> Self {
        VerifyParams {
            p: 1.0,
            q: None,
            theta: None,
        }
    }
}

impl VerifyParams {
    pub fn new(p: f64) -> Self {
        VerifyParams {
            p,
            ..Self::default()
        }
    }

    pub fn with_q(mut self, q: f64) -> Self {
        self.q = Some(q);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = Some(theta);
        self
    }

    fn validate(&self, id: TheoremId) -> Result<()> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(Error::invalid(format!("p must be positive, got {}", self.p)));
        }
        if id.needs_q() {
            match self.q {
                Some(q) if q > self.p && q.is_finite() => {}
                Some(q) => return Err(Error::invalid(format!("{id} needs p < q, got p = {}, q = {q}", self.p))),
                None => return Err(Error::invalid(format!("{id} needs --q"))),
            }
        }
        if let Some(t) = self.theta {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::invalid(format!("theta must lie in (0, 1], got {t}")));
            }
        }
        Ok(())
    }

    fn theta(&self) -> f64 {
        self.theta.unwrap_or(0.5)
    }
}

/// Parameters attached to a single check record.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
}

impl CheckParams {
    /// `key=value` pairs joined by `;`, in field order.
    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        let mut real = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                parts.push(format!("{k}={v}"));
            }
        };
        real("p", self.p);
        real("q", self.q);
        real("theta", self.theta);
        real("r", self.r);
        if let Some(m) = self.m {
            parts.push(format!("m={m}"));
        }
        if let Some(k) = self.k {
            parts.push(format!("k={k}"));
        }
        if let Some(n) = self.n {
            parts.push(format!("n={n}"));
        }
        if let Some(s) = &self.set {
            parts.push(format!("set={s}"));
        }
        if let Some(v) = &self.variant {
            parts.push(format!("variant={v}"));
        }
        parts.join(";")
    }
}

/// A norm or measure that entered a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub label: String,
    pub value: f64,
    pub method: Method,
    pub error_estimate: f64,
    pub converged: bool,
}

impl Quantity {
    fn new(label: impl Into<String>, r: &NormResult) -> Self {
        Quantity {
            label: label.into(),
            value: finite(r.value),
            method: r.method,
            error_estimate: finite(r.error_estimate),
            converged: r.converged,
        }
    }

    fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.error_estimate
        } else {
            self.error_estimate / self.value.abs()
        }
    }
}

fn finite(x: f64) -> f64 {
    if x.is_nan() {
        f64::MAX
    } else {
        x.clamp(-f64::MAX, f64::MAX)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremCheck {
    pub theorem_id: TheoremId,
    /// Position of the (first) witness in the corpus.
    pub index: usize,
    pub params: CheckParams,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    pub slack: f64,
    pub methods: Vec<Method>,
    /// Content hashes of the polynomials involved.
    pub witness: Vec<String>,
    pub quantities: Vec<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_polynomials: Option<Vec<Polynomial>>,
}

/// Every check of one theorem over one corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRun {
    pub theorem_id: TheoremId,
    pub params: VerifyParams,
    pub corpus_size: usize,
    pub checked: usize,
    pub skipped: usize,
    pub checks: Vec<TheoremCheck>,
}

impl CheckRun {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &TheoremCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn max_ratio(&self) -> f64 {
        self.checks.iter().map(|c| c.ratio).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Key {
    Lp(u64),
    Mahler,
    Dilated { r: u64, p: u64 },
    Orlicz(u64),
    BoxL1(SetKind, u64),
    ComplementL1(SetKind, u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum SetKind {
    Full,
    Half,
    Quarter,
    Product,
}

impl SetKind {
    fn name(self) -> &'static str {
        match self {
            SetKind::Full => "full",
            SetKind::Half => "half",
            SetKind::Quarter => "quarter",
            SetKind::Product => "product",
        }
    }

    fn build(self, n: usize, theta: f64) -> Result<BoxSubset> {
        Ok(match self {
            SetKind::Full => BoxSubset::full(n),
            SetKind::Half => BoxSubset::half_first(n),
            SetKind::Quarter => BoxSubset::quarter(n),
            SetKind::Product => BoxSubset::product_of_measure(n, theta)?,
        })
    }
}

fn quadrature_for(n: usize) -> QuadratureSpec {
    QuadratureSpec::verification(n)
}

fn from_quad(value: f64, error: f64, converged: bool) -> NormResult {
    NormResult {
        value,
        method: Method::Quadrature,
        error_estimate: error,
        converged,
        flags: Default::default(),
    }
}

fn compute(p: &Polynomial, key: Key) -> Result<NormResult> {
    let quad = quadrature_for(p.n());
    match key {
        Key::Lp(e) => lp_norm(p, f64::from_bits(e), &quad),
        Key::Mahler => mahler_measure_with(p, &quad),
        Key::Dilated { r, p: e } => lp_norm(&p.dilate(f64::from_bits(r))?, f64::from_bits(e), &quad),
        Key::Orlicz(a) => orlicz_luxemburg_norm(p, &OrliczSpec::new(f64::from_bits(a))?, &quad),
        Key::BoxL1(kind, theta) => {
            let e = kind.build(p.n(), f64::from_bits(theta))?;
            let est = mean_on_box(p, Integrand::Power(1.0), &e, &quad)?;
            Ok(from_quad(est.value, est.error_estimate, est.converged))
        }
        Key::ComplementL1(kind, theta) => {
            let e = kind.build(p.n(), f64::from_bits(theta))?;
            let (mut value, mut error, mut converged) = (0.0, 0.0, true);
            for piece in e.complement() {
                let est = mean_on_box(p, Integrand::Power(1.0), &piece, &quad)?;
                value += est.value;
                error += est.error_estimate;
                converged &= est.converged;
            }
            Ok(from_quad(value, error, converged))
        }
    }
}

/// Runs inequality checks over a fixed corpus, caching per-polynomial norms
/// across theorems.
pub struct Verifier {
    polys: Vec<Polynomial>,
    hashes: Vec<String>,
    cache: Vec<Mutex<HashMap<Key, NormResult>>>,
}

impl Verifier {
    pub fn new(polys: Vec<Polynomial>) -> Self {
        let hashes = polys.iter().map(polynomial_hash).collect();
        let cache = polys.iter().map(|_| Mutex::new(HashMap::new())).collect();
        Verifier { polys, hashes, cache }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn polynomials(&self) -> &[Polynomial] {
        &self.polys
    }

    fn get(&self, i: usize, key: Key) -> Result<NormResult> {
        if let Some(r) = self.cache[i].lock().expect("cache lock").get(&key) {
            return Ok(*r);
        }
        let r = compute(&self.polys[i], key)?;
        self.cache[i].lock().expect("cache lock").insert(key, r);
        Ok(r)
    }

    fn lp(&self, i: usize, p: f64) -> Result<NormResult> {
        self.get(i, Key::Lp(p.to_bits()))
    }

    fn mahler(&self, i: usize) -> Result<NormResult> {
        self.get(i, Key::Mahler)
    }

    /// All checks of `id` over the corpus. Members that violate the
    /// theorem's hypotheses are counted in `skipped`.
    pub fn check(&self, id: TheoremId, params: &VerifyParams) -> Result<CheckRun> {
        params.validate(id)?;
        let per_member: Vec<Option<Vec<TheoremCheck>>> = (0..self.len())
            .into_par_iter()
            .map(|i| self.instance(id, params, i))
            .collect::<Result<_>>()?;
        let skipped = per_member.iter().filter(|c| c.is_none()).count();
        Ok(CheckRun {
            theorem_id: id,
            params: *params,
            corpus_size: self.len(),
            checked: self.len() - skipped,
            skipped,
            checks: per_member.into_iter().flatten().flatten().collect(),
        })
    }

    fn finish(
        &self,
        id: TheoremId,
        members: &[usize],
        params: CheckParams,
        lhs: f64,
        rhs: f64,
        quantities: Vec<Quantity>,
    ) -> TheoremCheck {
        let (lhs, rhs) = (finite(lhs), finite(rhs));
        let ratio = if rhs > 0.0 {
            finite(lhs / rhs)
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::MAX
        };
        let exact = quantities.iter().all(|q| q.method.is_exact());
        let slack = if exact {
            EXACT_SLACK
        } else {
            let summed: f64 = quantities.iter().map(Quantity::relative_error).sum();
            finite((SLACK_FACTOR * summed).max(EXACT_SLACK))
        };
        let mut methods: Vec<Method> = Vec::new();
        for q in &quantities {
            if !methods.contains(&q.method) {
                methods.push(q.method);
            }
        }
        TheoremCheck {
            theorem_id: id,
            index: members[0],
            params,
            lhs,
            rhs,
            ratio,
            pass: ratio <= 1.0 + slack,
            slack,
            methods,
            witness: members.iter().map(|&i| self.hashes[i].clone()).collect(),
            quantities,
            witness_polynomials: (ratio > NEAR_FAIL_RATIO)
                .then(|| members.iter().map(|&i| self.polys[i].clone()).collect()),
        }
    }

    fn instance(&self, id: TheoremId, vp: &VerifyParams, i: usize) -> Result<Option<Vec<TheoremCheck>>> {
        let poly = &self.polys[i];
        let n = poly.n();
        let nf = n as f64;
        let degs = poly.partial_degrees();
        let total = poly.total_degree();
        let m = poly.max_partial_degree();
        let p = vp.p;
        let q = vp.q.unwrap_or(f64::NAN);
        let base = CheckParams {
            p: Some(p),
            q: vp.q.filter(|_| id.needs_q()),
            ..CheckParams::default()
        };
        let one = |params: CheckParams, lhs: f64, rhs: f64, qs: Vec<Quantity>| {
            Ok(Some(vec![self.finish(id, &[i], params, lhs, rhs, qs)]))
        };

        match id {
            TheoremId::Nikolskii | TheoremId::NikolskiiPrinted => {
                let ln_factor = nf * LN_2
                    + (1.0 / p - 1.0 / q) * degs.iter().map(|&d| (d.max(1) as f64).ln()).sum::<f64>();
                let (np, nq) = (self.lp(i, p)?, self.lp(i, q)?);
                let qs = vec![Quantity::new(format!("L{p}"), &np), Quantity::new(format!("L{q}"), &nq)];
                let (lhs, rhs) = if id == TheoremId::Nikolskii {
                    (nq.value, ln_factor.exp() * np.value)
                } else {
                    (np.value, ln_factor.exp() * nq.value)
                };
                one(base, lhs, rhs, qs)
            }
            TheoremId::Thm21 | TheoremId::Bayart => {
                let homogeneous = poly.degree_profile().is_some_and(|d| d.homogeneous);
                if id == TheoremId::Bayart && !homogeneous {
                    return Ok(None);
                }
                let c2 = if id == TheoremId::Bayart { q / p } else { q / p.min(2.0) };
                let (np, nq) = (self.lp(i, p)?, self.lp(i, q)?);
                let rhs = (0.5 * total as f64 * c2.ln()).exp() * np.value;
                let params = CheckParams {
                    m: Some(total),
                    ..base
                };
                let qs = vec![Quantity::new(format!("L{p}"), &np), Quantity::new(format!("L{q}"), &nq)];
                one(params, nq.value, rhs, qs)
            }
            TheoremId::Weissler => {
                let r = (p / q).sqrt();
                let dilated = self.get(
                    i,
                    Key::Dilated {
                        r: r.to_bits(),
                        p: q.to_bits(),
                    },
                )?;
                let np = self.lp(i, p)?;
                let params = CheckParams { r: Some(r), ..base };
                let qs = vec![Quantity::new(format!("L{q}(rz)"), &dilated), Quantity::new(format!("L{p}"), &np)];
                one(params, dilated.value, np.value, qs)
            }
            TheoremId::MahlerMain | TheoremId::MahlerCor => {
                let np = self.lp(i, p)?;
                let mm = self.mahler(i)?;
                let ln_lambda = if id == TheoremId::MahlerMain {
                    degs.iter().map(|&d| ln_arestov_lambda(p, d)).sum::<f64>()
                } else {
                    nf * ln_arestov_lambda(p, m)
                };
                let params = CheckParams {
                    m: (id == TheoremId::MahlerCor).then_some(m),
                    ..base
                };
                let qs = vec![Quantity::new(format!("L{p}"), &np), Quantity::new("M", &mm)];
                one(params, np.value, ln_lambda.exp() * mm.value, qs)
            }
            TheoremId::Orlicz => {
                if m == 0 {
                    return Ok(None);
                }
                let alpha = 1.0 / m as f64;
                let no = self.get(i, Key::Orlicz(alpha.to_bits()))?;
                let mm = self.mahler(i)?;
                let ln_c = m as f64 * (nf * LN_2 + (E - 1.0).ln());
                let params = CheckParams {
                    m: Some(m),
                    ..CheckParams::default()
                };
                let qs = vec![Quantity::new(format!("psi_1/{m}"), &no), Quantity::new("M", &mm)];
                one(params, no.value, ln_c.exp() * mm.value, qs)
            }
            TheoremId::ProductLower => self.product_lower(vp, i),
            TheoremId::MahlerTriangle => self.mahler_triangle(i),
            TheoremId::Interpolation => self.interpolation(vp, i),
            TheoremId::GeoMeanLemma => self.geo_mean(vp, i),
        }
    }

    fn product_lower(&self, vp: &VerifyParams, i: usize) -> Result<Option<Vec<TheoremCheck>>> {
        let id = TheoremId::ProductLower;
        if self.len() < 2 {
            return Ok(None);
        }
        let j = (i + 1) % self.len();
        let (a, b) = (&self.polys[i], &self.polys[j]);
        if a.n() != b.n() {
            return Ok(None);
        }
        let nf = a.n() as f64;
        let (m, k) = (a.max_partial_degree(), b.max_partial_degree());
        let p = vp.p;
        let prod = a.mul(b)?;
        let npq = lp_norm(&prod, p, &quadrature_for(prod.n()))?;
        let (na, nb) = (self.lp(i, p)?, self.lp(j, p)?);
        let ln_c = -nf * (ln_arestov_lambda(p, m) + ln_arestov_lambda(p, k));
        let params = CheckParams {
            p: Some(p),
            m: Some(m),
            k: Some(k),
            ..CheckParams::default()
        };
        let qs = vec![
            Quantity::new(format!("L{p}(P)"), &na),
            Quantity::new(format!("L{p}(Q)"), &nb),
            Quantity::new(format!("L{p}(PQ)"), &npq),
        ];
        let mut out = vec![self.finish(id, &[i, j], params, ln_c.exp() * na.value * nb.value, npq.value, qs)];

        // coefficient form through Parseval and central binomials
        let l2 = |x: &Polynomial| x.coefficient_functionals().parseval_l2;
        let ln_binom = |d: u32| central_binomial(d).map(|c| (c as f64).ln());
        let ln_c2 = -0.5 * nf * (ln_binom(m)? + ln_binom(k)?);
        let exact = |v: f64| NormResult::exact(v, Method::ExactParseval);
        let (ca, cb, cab) = (exact(l2(a)), exact(l2(b)), exact(l2(&prod)));
        let params = CheckParams {
            m: Some(m),
            k: Some(k),
            variant: Some("coefficient".into()),
            ..CheckParams::default()
        };
        let qs = vec![
            Quantity::new("l2(P)", &ca),
            Quantity::new("l2(Q)", &cb),
            Quantity::new("l2(PQ)", &cab),
        ];
        out.push(self.finish(id, &[i, j], params, ln_c2.exp() * ca.value * cb.value, cab.value, qs));
        Ok(Some(out))
    }

    fn mahler_triangle(&self, i: usize) -> Result<Option<Vec<TheoremCheck>>> {
        let id = TheoremId::MahlerTriangle;
        let a = &self.polys[i];
        let m = a.max_partial_degree();
        let partner = (1..self.len())
            .map(|s| (i + s) % self.len())
            .find(|&j| self.polys[j].n() == a.n() && self.polys[j].max_partial_degree() == m);
        let Some(j) = partner else {
            return Ok(None);
        };
        let b = &self.polys[j];
        let nf = a.n() as f64;
        let sum = a.add(b)?;
        let msum = mahler_measure_with(&sum, &quadrature_for(sum.n()))?;
        let (ma, mb) = (self.mahler(i)?, self.mahler(j)?);
        let qs = vec![
            Quantity::new("M(P+Q)", &msum),
            Quantity::new("M(P)", &ma),
            Quantity::new("M(Q)", &mb),
        ];
        let ln_binom = (central_binomial(m)? as f64).ln();
        let params = CheckParams {
            m: Some(m),
            ..CheckParams::default()
        };
        let rhs = (0.5 * nf * ln_binom).exp() * (ma.value + mb.value);
        let mut out = vec![self.finish(id, &[i, j], params, msum.value, rhs, qs.clone())];
        if a.n() == 1 {
            let params = CheckParams {
                m: Some(m),
                variant: Some("kappa-2^m".into()),
                ..CheckParams::default()
            };
            let rhs = 2f64.powi(m as i32) * (ma.value + mb.value);
            out.push(self.finish(id, &[i, j], params, msum.value, rhs, qs));
        }
        Ok(Some(out))
    }

    fn sets(theta: f64) -> Vec<SetKind> {
        if theta == 1.0 {
            vec![SetKind::Full]
        } else {
            vec![SetKind::Half, SetKind::Quarter, SetKind::Product]
        }
    }

    fn interpolation(&self, vp: &VerifyParams, i: usize) -> Result<Option<Vec<TheoremCheck>>> {
        let id = TheoremId::Interpolation;
        let poly = &self.polys[i];
        let (n, m, p, theta) = (poly.n(), poly.max_partial_degree(), vp.p, vp.theta());
        let np = self.lp(i, p)?;
        let l1 = self.lp(i, 1.0)?;
        let ln_c = interpolation_constant(theta)?.ln() + n as f64 * ln_arestov_lambda(p, m);
        let mut out = Vec::new();
        for kind in Self::sets(theta) {
            let e = kind.build(n, theta)?;
            if e.measure() < theta * (1.0 - 1e-12) {
                continue;
            }
            let le = self.get(i, Key::BoxL1(kind, theta.to_bits()))?;
            let rhs = (ln_c + (1.0 - theta) * l1.value.ln() + theta * le.value.ln()).exp();
            let params = CheckParams {
                p: Some(p),
                theta: Some(theta),
                m: Some(m),
                set: Some(kind.name().into()),
                ..CheckParams::default()
            };
            let qs = vec![
                Quantity::new(format!("L{p}"), &np),
                Quantity::new("L1", &l1),
                Quantity::new(format!("L1({})", kind.name()), &le),
            ];
            out.push(self.finish(id, &[i], params, np.value, rhs, qs));
        }
        Ok(Some(out))
    }

    fn geo_mean(&self, vp: &VerifyParams, i: usize) -> Result<Option<Vec<TheoremCheck>>> {
        let id = TheoremId::GeoMeanLemma;
        let poly = &self.polys[i];
        let (n, theta) = (poly.n(), vp.theta());
        let mm = self.mahler(i)?;
        let l1 = self.lp(i, 1.0)?;
        let mut out = Vec::new();
        for kind in [SetKind::Half, SetKind::Quarter, SetKind::Product] {
            let e = kind.build(n, theta)?;
            let alpha = e.measure();
            if !(alpha > 0.0 && alpha < 1.0) {
                continue;
            }
            let ia = self.get(i, Key::BoxL1(kind, theta.to_bits()))?;
            let ic = self.get(i, Key::ComplementL1(kind, theta.to_bits()))?;
            let rhs = (interpolation_constant(alpha)?.ln() + alpha * ia.value.ln() + (1.0 - alpha) * ic.value.ln()).exp();
            let params = CheckParams {
                theta: Some(alpha),
                set: Some(kind.name().into()),
                ..CheckParams::default()
            };
            let qs = vec![
                Quantity::new("M", &mm),
                Quantity::new(format!("L1({})", kind.name()), &ia),
                Quantity::new(format!("L1({}')", kind.name()), &ic),
            ];
            out.push(self.finish(id, &[i], params, mm.value, rhs, qs));

            // the weaker two-factor form with constant 2
            let rhs2 = 2.0 * ((1.0 - alpha) * l1.value.ln() + alpha * ia.value.ln()).exp();
            let params = CheckParams {
                theta: Some(alpha),
                set: Some(kind.name().into()),
                variant: Some("constant-2".into()),
                ..CheckParams::default()
            };
            let qs = vec![
                Quantity::new("M", &mm),
                Quantity::new("L1", &l1),
                Quantity::new(format!("L1({})", kind.name()), &ia),
            ];
            out.push(self.finish(id, &[i], params, mm.value, rhs2, qs));
        }
        Ok(Some(out))
    }
}

/// Checks `id` over `corpus`; an error when every member is skipped.
pub fn check_inequality(id: TheoremId, corpus: &[Polynomial], params: &VerifyParams) -> Result<CheckRun> {
    let run = Verifier::new(corpus.to_vec()).check(id, params)?;
    if run.checked == 0 {
        return Err(Error::EmptyResult(id.to_string()));
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn product_of_binomials(d: &[u32]) -> Polynomial {
        let n = d.len();
        let mut acc = Polynomial::constant(n, c(1.0));
        for (j, &dj) in d.iter().enumerate() {
            let f = Polynomial::constant(n, c(1.0)).add(&Polynomial::variable(n, j)).unwrap();
            acc = acc.mul(&f.pow(dj)).unwrap();
        }
        acc
    }

    #[test]
    fn ids_round_trip() {
        for id in TheoremId::ALL {
            assert_eq!(id.to_string().parse::<TheoremId>().unwrap(), id);
        }
        assert!(matches!("nope".parse::<TheoremId>(), Err(Error::UnknownId(_))));
    }

    #[test]
    fn mahler_main_sharp() {
        let p = product_of_binomials(&[3, 2]);
        let run = check_inequality(TheoremId::MahlerMain, &[p], &VerifyParams::new(2.0)).unwrap();
        let ch = &run.checks[0];
        assert!((ch.ratio - 1.0).abs() < 1e-6, "{ch:?}");
        assert!(ch.pass && ch.witness_polynomials.is_some());
    }

    #[test]
    fn bayart_example() {
        let p = Polynomial::build(2, [(vec![1, 1], c(1.0))]).unwrap();
        let run = check_inequality(TheoremId::Bayart, &[p], &VerifyParams::new(2.0).with_q(4.0)).unwrap();
        let ch = &run.checks[0];
        assert_eq!((ch.lhs, ch.rhs, ch.ratio, ch.pass), (1.0, 2.0, 0.5, true));
        assert_eq!(ch.slack, EXACT_SLACK);
    }

    #[test]
    fn thm21_constant_is_tight() {
        let k = Polynomial::constant(2, c(-3.5));
        for (p, q) in [(1.0, 2.0), (0.5, 3.0), (2.0, 4.0)] {
            let run = check_inequality(TheoremId::Thm21, std::slice::from_ref(&k), &VerifyParams::new(p).with_q(q)).unwrap();
            assert_eq!(run.checks[0].ratio, 1.0);
            assert!(run.all_pass());
        }
    }

    #[test]
    fn bayart_skips_inhomogeneous() {
        let p = Polynomial::univariate_real(&[1.0, 1.0]);
        let err = check_inequality(TheoremId::Bayart, &[p], &VerifyParams::new(1.0).with_q(2.0));
        assert!(matches!(err, Err(Error::EmptyResult(_))));
    }

    #[test]
    fn parameter_validation() {
        let p = Polynomial::univariate_real(&[1.0, 1.0]);
        let v = Verifier::new(vec![p]);
        assert!(v.check(TheoremId::Thm21, &VerifyParams::new(1.0)).is_err());
        assert!(v.check(TheoremId::Thm21, &VerifyParams::new(2.0).with_q(1.0)).is_err());
        assert!(v.check(TheoremId::Interpolation, &VerifyParams::new(1.0).with_theta(0.0)).is_err());
    }

    #[test]
    fn pair_theorems_account_for_every_member() {
        let polys = vec![
            Polynomial::univariate_real(&[1.0, 2.0]),
            Polynomial::univariate_real(&[0.5, 0.0, 1.0]),
            Polynomial::univariate_real(&[-1.0, 1.0]),
        ];
        let v = Verifier::new(polys);
        for id in [TheoremId::ProductLower, TheoremId::MahlerTriangle] {
            let run = v.check(id, &VerifyParams::new(1.0)).unwrap();
            assert_eq!(run.checked + run.skipped, 3);
            assert!(run.all_pass(), "{run:?}");
        }
        let tri = v.check(TheoremId::MahlerTriangle, &VerifyParams::new(1.0)).unwrap();
        assert_eq!((tri.checked, tri.skipped), (2, 1));
    }

    #[test]
    fn interpolation_full_torus_matches_corollary() {
        let polys = vec![
            Polynomial::build(2, [(vec![2, 1], c(1.0)), (vec![0, 0], c(-0.3)), (vec![1, 0], c(0.7))]).unwrap(),
            Polynomial::univariate_real(&[2.0, -1.0, 0.25]),
        ];
        let v = Verifier::new(polys);
        let vp = VerifyParams::new(1.5).with_theta(1.0);
        let interp = v.check(TheoremId::Interpolation, &vp).unwrap();
        let cor = v.check(TheoremId::MahlerCor, &vp).unwrap();
        for (a, b) in interp.checks.iter().zip(&cor.checks) {
            let l1 = a.quantities[1].value;
            let mahler = b.quantities[1].value;
            assert!((a.ratio * l1 / mahler / b.ratio - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn geo_mean_constant_is_tight() {
        let k = Polynomial::constant(2, c(2.0));
        let run = check_inequality(TheoremId::GeoMeanLemma, &[k], &VerifyParams::new(1.0)).unwrap();
        let main: Vec<_> = run.checks.iter().filter(|c| c.params.variant.is_none()).collect();
        assert_eq!(main.len(), 3);
        for ch in main {
            assert!((ch.ratio - 1.0).abs() < 1e-12 && ch.pass, "{ch:?}");
        }
    }
}
