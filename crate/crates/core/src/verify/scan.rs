use serde::{Deserialize, Serialize};

use super::CheckParams;
use crate::constants::{binomial_u64, kwapien_lower_bound, ln_arestov_lambda};
use crate::error::{Error, Result};
use crate::norms::{lp_norm, lp_norm_exact_even, mahler_univariate, Method, NormResult};
use crate::polynomial::Polynomial;
use crate::quadrature::QuadratureSpec;
use crate::symmetric::{steinhaus_moment_mc_fn, u_mn, u_mn_eval, SteinhausMCSpec};

/// Largest `C(n, m)` for which `‖U_{m,n}‖` is computed by exact expansion.
const EXACT_TERM_LIMIT: u64 = 2_100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanFamily {
    /// `‖U_{m,n}‖_q / ‖U_{m,n}‖_p` against the Gamma-ratio lower bound as `n` grows.
    Kwapien,
    /// `‖P(rz)‖_q^q − ‖P‖_p^q` for `P = 1 + εz` over a grid of `r²`.
    WeisslerViolation,
    /// `‖(1+z)^m‖_p / (Λ(p, m) M)` over a grid of `m`.
    ArestovSharp,
}

kebab_enum_str!(ScanFamily {
    Kwapien => "kwapien",
    WeisslerViolation => "weissler-violation",
    ArestovSharp => "arestov-sharp",
});

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanParams {
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub m: Option<u32>,
    pub eps: Option<f64>,
    /// `m` values, `r²` values or `n` values depending on the family.
    pub grid: Option<Vec<f64>>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub params: CheckParams,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub error_estimate: f64,
    pub method: Method,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub family: ScanFamily,
    pub rows: Vec<ScanRow>,
}

fn grid_integers(grid: &[f64], what: &str) -> Result<Vec<u32>> {
    grid.iter()
        .map(|&g| {
            if g >= 0.0 && g.fract() == 0.0 && g <= u32::MAX as f64 {
                Ok(g as u32)
            } else {
                Err(Error::invalid(format!("{what} grid needs non-negative integers, got {g}")))
            }
        })
        .collect()
}

pub fn sharpness_scan(family: ScanFamily, params: &ScanParams) -> Result<ScanTable> {
    let rows = match family {
        ScanFamily::ArestovSharp => arestov_sharp(params)?,
        ScanFamily::WeisslerViolation => weissler_violation(params)?,
        ScanFamily::Kwapien => kwapien(params)?,
    };
    Ok(ScanTable { family, rows })
}

fn arestov_sharp(sp: &ScanParams) -> Result<Vec<ScanRow>> {
    let ps = sp.p.map(|p| vec![p]).unwrap_or_else(|| vec![0.5, 1.0, 2.0, 3.0]);
    let ms = match &sp.grid {
        Some(g) => grid_integers(g, "m")?,
        None => (1..=8).collect(),
    };
    let quad = QuadratureSpec::for_dimension(1);
    let mut rows = Vec::new();
    for &p in &ps {
        for &m in &ms {
            let poly = Polynomial::univariate_real(&[1.0, 1.0]).pow(m);
            let norm = lp_norm(&poly, p, &quad)?;
            let mahler = mahler_univariate(&poly)?;
            let value = norm.value / (ln_arestov_lambda(p, m).exp() * mahler.value);
            rows.push(ScanRow {
                params: CheckParams {
                    p: Some(p),
                    m: Some(m),
                    ..CheckParams::default()
                },
                value,
                reference: Some(1.0),
                error_estimate: value * (norm.relative_error() + mahler.relative_error()),
                method: norm.method,
            });
        }
    }
    Ok(rows)
}

/// `‖1 + εrz‖_4^4 − ‖1 + εz‖_2^4 = 4ε²r² + ε⁴r⁴ − 2ε² − ε⁴`.
pub fn weissler_closed_form_margin(eps: f64, r2: f64) -> f64 {
    let e2 = eps * eps;
    4.0 * e2 * r2 + e2 * e2 * r2 * r2 - 2.0 * e2 - e2 * e2
}

fn weissler_violation(sp: &ScanParams) -> Result<Vec<ScanRow>> {
    let p = sp.p.unwrap_or(2.0);
    let q = sp.q.unwrap_or(4.0);
    if !(p > 0.0 && q > p) {
        return Err(Error::invalid(format!("need 0 < p < q, got p = {p}, q = {q}")));
    }
    let eps = sp.eps.unwrap_or(0.05);
    let critical = p / q;
    let grid = sp
        .grid
        .clone()
        .unwrap_or_else(|| [-0.02, -0.01, 0.0, 0.01, 0.02].iter().map(|d| critical + d).collect());
    let poly = Polynomial::univariate_real(&[1.0, eps]);
    let quad = QuadratureSpec::for_dimension(1);
    let np = lp_norm(&poly, p, &quad)?;
    let closed = p == 2.0 && q == 4.0;
    let mut rows = Vec::new();
    for r2 in grid {
        if !(r2 > 0.0 && r2 <= 1.0) {
            return Err(Error::invalid(format!("r² must lie in (0, 1], got {r2}")));
        }
        let r = r2.sqrt();
        let nq = lp_norm(&poly.dilate(r)?, q, &quad)?;
        let value = nq.value.powf(q) - np.value.powf(q);
        let scale = nq.value.powf(q) + np.value.powf(q);
        rows.push(ScanRow {
            params: CheckParams {
                p: Some(p),
                q: Some(q),
                r: Some(r),
                variant: Some(format!("eps={eps}")),
                ..CheckParams::default()
            },
            value,
            reference: closed.then(|| weissler_closed_form_margin(eps, r2)),
            error_estimate: scale * q * (nq.relative_error() + np.relative_error()) + 4.0 * f64::EPSILON * scale,
            method: if nq.method.is_exact() && np.method.is_exact() {
                Method::ExactEvenConvolution
            } else {
                Method::Quadrature
            },
        });
    }
    Ok(rows)
}

fn is_small_even(x: f64) -> bool {
    matches!(x, 2.0 | 4.0 | 6.0 | 8.0)
}

fn kwapien(sp: &ScanParams) -> Result<Vec<ScanRow>> {
    let p = sp.p.unwrap_or(2.0);
    let q = sp.q.unwrap_or(4.0);
    let m = sp.m.unwrap_or(2);
    let ns = match &sp.grid {
        Some(g) => grid_integers(g, "n")?,
        None => vec![2, 4, 8, 16, 32, 64],
    };
    let bound = kwapien_lower_bound(p, q, m)?.gamma_form;
    let mc = SteinhausMCSpec::new(sp.samples.unwrap_or(100_000), sp.seed.unwrap_or(0));
    let mut rows = Vec::new();
    for n in ns {
        if (n as usize) < m as usize {
            return Err(Error::invalid(format!("u_mn needs n >= m, got n = {n}, m = {m}")));
        }
        let terms = binomial_u64(n as u64, m as u64)?;
        let (value, error, method) = if is_small_even(p) && is_small_even(q) && terms <= EXACT_TERM_LIMIT {
            let u = u_mn(m as usize, n as usize)?;
            let a = lp_norm_exact_even(&u, q as u32)?;
            let b = lp_norm_exact_even(&u, p as u32)?;
            let v = a.value / b.value;
            (v, v * (a.relative_error() + b.relative_error()), Method::ExactEvenConvolution)
        } else {
            let f = |z: &[num_complex::Complex64]| u_mn_eval(m as usize, z);
            let a: NormResult = steinhaus_moment_mc_fn(n as usize, f, q, &mc)?;
            let b: NormResult = steinhaus_moment_mc_fn(n as usize, f, p, &mc)?;
            let v = a.value.powf(1.0 / q) / b.value.powf(1.0 / p);
            let rel = a.relative_error() / q + b.relative_error() / p;
            (v, v * rel, Method::MonteCarlo)
        };
        rows.push(ScanRow {
            params: CheckParams {
                p: Some(p),
                q: Some(q),
                m: Some(m),
                n: Some(n as usize),
                ..CheckParams::default()
            },
            value,
            reference: Some(bound),
            error_estimate: error,
            method,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weissler_margins() {
        let sp = ScanParams {
            grid: Some(vec![0.5, 0.51]),
            ..ScanParams::default()
        };
        let t = sharpness_scan(ScanFamily::WeisslerViolation, &sp).unwrap();
        let (at, past) = (&t.rows[0], &t.rows[1]);
        assert!(at.value < 0.0 && (at.value - at.reference.unwrap()).abs() < 1e-12);
        assert!((past.value - 9.5376e-5).abs() < 1e-8 && (past.value - past.reference.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn arestov_rows_are_one() {
        let sp = ScanParams {
            p: Some(2.0),
            grid: Some(vec![1.0, 4.0]),
            ..ScanParams::default()
        };
        let t = sharpness_scan(ScanFamily::ArestovSharp, &sp).unwrap();
        assert!(t.rows.iter().all(|r| (r.value - 1.0).abs() < 1e-12));
    }

    #[test]
    fn kwapien_trend_approaches_bound_from_below() {
        let sp = ScanParams {
            m: Some(1),
            grid: Some(vec![1.0, 4.0, 16.0]),
            ..ScanParams::default()
        };
        let t = sharpness_scan(ScanFamily::Kwapien, &sp).unwrap();
        let mut prev = 0.0;
        for r in &t.rows {
            let n = r.params.n.unwrap() as f64;
            assert!((r.value - (2.0 - 1.0 / n).powf(0.25)).abs() < 1e-14);
            assert!(r.value > prev && r.value <= r.reference.unwrap());
            prev = r.value;
        }
        assert!(sharpness_scan(ScanFamily::Kwapien, &ScanParams { grid: Some(vec![1.5]), ..Default::default() }).is_err());
    }
}
