//! Closed-form constants: the Gamma function, Arestov's `Λ(p, m)`,
//! Khintchine-Kahane comparison constants, Stirling brackets and the
//! interpolation constant.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::quadrature::{adaptive_mean, Integrand, QuadratureSpec};

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `Γ(x)` for real `x`, poles excluded. Overflows to `+∞` past `x ≈ 171.6`.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.floor() && x <= 21.0 {
        return (1..x as u64).map(|k| k as f64).product();
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    // split the power so t^(x+1/2) does not overflow before e^{-t} scales it
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return ln_gamma(x + 1.0) - x.ln();
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// Digamma `ψ(x) = Γ'(x)/Γ(x)` for `x > 0`.
pub fn digamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 8.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    acc + x.ln() - 0.5 / x
        - r * (1.0 / 12.0 - r * (1.0 / 120.0 - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r / 132.0))))
}

/// Trigamma `ψ'(x)` for `x > 0`.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 8.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    acc + 1.0 / x
        + r / 2.0
        + r / x * (1.0 / 6.0 - r * (1.0 / 30.0 - r * (1.0 / 42.0 - r * (1.0 / 30.0 - r * 5.0 / 66.0))))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaMinimum {
    /// Golden-section estimate from Γ values alone.
    pub golden_section: f64,
    /// Refined by Newton's method on `ψ(x) = 0`.
    pub x_min: f64,
    pub gamma_min: f64,
}

/// Location of the minimum of `Γ` on `(0, ∞)`.
///
/// Γ is so flat near its minimum that comparisons of function values stall
/// near `√ε`; the golden-section bracket is finished by Newton on digamma.
pub fn gamma_minimum() -> GammaMinimum {
    let golden = golden_section_min(gamma, 1.0, 2.0, 1e-10);
    let mut x = golden;
    for _ in 0..20 {
        let step = digamma(x) / trigamma(x);
        x -= step;
        if step.abs() < 1e-16 {
            break;
        }
    }
    GammaMinimum {
        golden_section: golden,
        x_min: x,
        gamma_min: gamma(x),
    }
}

/// Golden-section search for a minimum of a unimodal `f` on `[a, b]`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// `C(2m, m)`, or an error when it does not fit in `u64`.
pub fn central_binomial(m: u32) -> Result<u64> {
    binomial_u64(2 * m as u64, m as u64)
}

pub fn binomial_u64(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return Err(Error::invalid(format!("C({n}, {k}) overflows u64")));
        }
    }
    Ok(acc as u64)
}

/// `ln Λ(p, m) = m ln 2 − ln π / 2p + (ln Γ((mp+1)/2) − ln Γ((mp+2)/2)) / p`.
pub fn ln_arestov_lambda(p: f64, m: u32) -> f64 {
    let mp = m as f64 * p;
    m as f64 * LN_2 - PI.ln() / (2.0 * p) + (ln_gamma((mp + 1.0) / 2.0) - ln_gamma((mp + 2.0) / 2.0)) / p
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaValue {
    pub p: f64,
    pub m: u32,
    pub value_gamma_form: f64,
    pub value_integral_form: f64,
    pub consistency_gap: f64,
}

impl LambdaValue {
    pub fn value(&self) -> f64 {
        self.value_gamma_form
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be positive, got {p}")));
    }
    Ok(())
}

/// Arestov's constant `Λ(p, m) = ‖(1+z)^m‖_{L^p(T)}` in both the Gamma form
/// and by quadrature of `|1+z|^{mp}`.
pub fn arestov_lambda(p: f64, m: u32) -> Result<LambdaValue> {
    check_p(p)?;
    let gamma_form = ln_arestov_lambda(p, m).exp();
    let spec = QuadratureSpec {
        base_points_per_dim: 64,
        max_points_per_dim: 1 << 20,
        rel_tol: 1e-10,
    };
    let one_plus_z = Polynomial::univariate_real(&[1.0, 1.0]);
    let mean = adaptive_mean(&one_plus_z, Integrand::Power(m as f64 * p), &spec)?;
    let integral_form = mean.value.powf(1.0 / p);
    Ok(LambdaValue {
        p,
        m,
        value_gamma_form: gamma_form,
        value_integral_form: integral_form,
        consistency_gap: (gamma_form - integral_form).abs() / gamma_form,
    })
}

/// Leading term `(2/(πp))^{1/2p} 2^m m^{−1/2p}` of `Λ(p, m)` as `m → ∞`.
pub fn arestov_lambda_asymptotic(p: f64, m: u32) -> Result<f64> {
    check_p(p)?;
    if m == 0 {
        return Err(Error::invalid("the asymptotic form needs m >= 1"));
    }
    let ln = (2.0 / (PI * p)).ln() / (2.0 * p) + m as f64 * LN_2 - (m as f64).ln() / (2.0 * p);
    Ok(ln.exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `Λ(k/m, m) < 2^m`.
pub fn eq1_bound_check(m: u32, k: u32) -> Result<BoundCheck> {
    if m == 0 || k == 0 {
        return Err(Error::invalid("m and k must be at least 1"));
    }
    let ln_lhs = ln_arestov_lambda(k as f64 / m as f64, m);
    let ln_rhs = m as f64 * LN_2;
    Ok(BoundCheck {
        lhs: ln_lhs.exp(),
        rhs: ln_rhs.exp(),
        holds: ln_lhs < ln_rhs,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KwapienBound {
    /// `Γ(qm/2+1)^{1/q} / Γ(pm/2+1)^{1/p}`.
    pub gamma_form: f64,
    /// `m^{1/2q} m^{−1/2p} (q/p)^{m/2}`.
    pub stirling_form: f64,
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    check_p(p)?;
    if !(q > p && q.is_finite()) {
        return Err(Error::invalid(format!("need 0 < p < q, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// Kwapień's lower bound for the best constant `C(p, q)^m` on degree-`m`
/// polynomials.
pub fn kwapien_lower_bound(p: f64, q: f64, m: u32) -> Result<KwapienBound> {
    check_pq(p, q)?;
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let mf = m as f64;
    let ln_gamma_form = ln_gamma(q * mf / 2.0 + 1.0) / q - ln_gamma(p * mf / 2.0 + 1.0) / p;
    let ln_stirling = mf.ln() * (1.0 / (2.0 * q) - 1.0 / (2.0 * p)) + 0.5 * mf * (q / p).ln();
    Ok(KwapienBound {
        gamma_form: ln_gamma_form.exp(),
        stirling_form: ln_stirling.exp(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonConstants {
    /// `√(q/p)`, valid for homogeneous polynomials.
    pub bayart: f64,
    /// `√(q/min(p, 2))`.
    pub thm21_upper: f64,
}

pub fn comparison_constants(p: f64, q: f64) -> Result<ComparisonConstants> {
    check_pq(p, q)?;
    Ok(ComparisonConstants {
        bayart: (q / p).sqrt(),
        thm21_upper: (q / p.min(2.0)).sqrt(),
    })
}

/// `√(2π) x^{x+1/2} e^{−x}` and the same times `e^{1/12x}`; they bracket
/// `Γ(x+1)` strictly.
pub fn stirling_bracket(x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("x must be positive, got {x}")));
    }
    let ln_lower = 0.5 * (2.0 * PI).ln() + (x + 0.5) * x.ln() - x;
    Ok((ln_lower.exp(), (ln_lower + 1.0 / (12.0 * x)).exp()))
}

/// `C(θ) = 1 / (θ^θ (1−θ)^{1−θ})` with `0⁰ = 1`; lies in `[1, 2]`.
pub fn interpolation_constant(theta: f64) -> Result<f64> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::invalid(format!("theta must lie in (0, 1], got {theta}")));
    }
    Ok(1.0 / (xlogx_exp(theta) * xlogx_exp(1.0 - theta)))
}

/// `x^x` with `0^0 = 1`.
fn xlogx_exp(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        x.powf(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn gamma_landmarks() {
        assert!(rel(gamma(0.5), PI.sqrt()) < 1e-14);
        assert_eq!(gamma(5.0), 24.0);
        // reference values from mpmath at 30 digits
        let cases = [
            (0.1, 9.513_507_698_668_731_8),
            (1.5, 0.886_226_925_452_758_01),
            (7.3, 1_271.423_633_663_909_3),
            (33.7, 3.032_162_654_739_841_6e36),
            (170.5, 5.562_092_414_560_000e305),
        ];
        for (x, g) in cases {
            assert!(rel(gamma(x), g) < 1e-12, "Γ({x}) = {} vs {g}", gamma(x));
            assert!((ln_gamma(x) - g.ln()).abs() < 1e-12 * g.ln().abs().max(1.0));
        }
        assert!(rel(ln_gamma(1000.5), 5_908.674_175_848_677_5) < 1e-13);
    }

    #[test]
    fn gamma_minimum_location() {
        let g = gamma_minimum();
        assert!((g.x_min - 1.461_632_144_968_362_3).abs() < 1e-8, "{g:?}");
        assert!((g.golden_section - g.x_min).abs() < 1e-6);
        assert!(digamma(g.x_min).abs() < 1e-14);
    }

    #[test]
    fn lambda_examples() {
        for m in 0..=15u32 {
            let l = arestov_lambda(2.0, m).unwrap();
            let c = central_binomial(m).unwrap();
            assert_eq!((l.value() * l.value()).round() as u64, c);
            assert!(l.consistency_gap < 1e-8);
        }
        assert!(rel(arestov_lambda(1.0, 2).unwrap().value(), 2.0) < 1e-14);
        assert!(rel(arestov_lambda(1.0, 1).unwrap().value(), 4.0 / PI) < 1e-14);
        assert!((arestov_lambda(0.7, 0).unwrap().value() - 1.0).abs() < 1e-15);
        assert!(arestov_lambda(0.0, 1).is_err());
    }

    #[test]
    fn lambda_asymptotics() {
        let a = ln_arestov_lambda(2.0, 100).exp() / arestov_lambda_asymptotic(2.0, 100).unwrap();
        assert!((a - 1.0).abs() < 0.01);
        let a = ln_arestov_lambda(1.0, 200).exp() / arestov_lambda_asymptotic(1.0, 200).unwrap();
        assert!((a - 1.0).abs() < 0.01);
        let mut prev = f64::INFINITY;
        for m in 2..60 {
            let r = arestov_lambda_asymptotic(1.5, m).unwrap() / 2f64.powi(m as i32);
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn eq1_examples() {
        let b = eq1_bound_check(1, 1).unwrap();
        assert!(rel(b.lhs, 4.0 / PI) < 1e-14 && b.rhs == 2.0 && b.holds);
        let b = eq1_bound_check(3, 1).unwrap();
        assert!(rel(b.lhs, 8.0 * (2.0 / PI).powi(3)) < 1e-13 && b.holds);
        assert!(eq1_bound_check(5, 2).unwrap().holds);
    }

    #[test]
    fn kwapien_examples() {
        let k = kwapien_lower_bound(2.0, 4.0, 1).unwrap();
        assert!(rel(k.gamma_form, 2f64.powf(0.25)) < 1e-14);
        for m in 1..=50 {
            assert!(kwapien_lower_bound(2.0, 4.0, m).unwrap().gamma_form <= 2f64.powf(m as f64 / 2.0));
        }
        let ratio = |m| {
            let k = kwapien_lower_bound(2.0, 4.0, m).unwrap();
            k.gamma_form / k.stirling_form
        };
        let r20 = ratio(20);
        for m in 20..=200 {
            assert!((ratio(m) / r20 - 1.0).abs() < 0.05);
        }
        assert!(kwapien_lower_bound(4.0, 2.0, 3).is_err());
    }

    #[test]
    fn comparison_examples() {
        let s2 = 2f64.sqrt();
        let c = comparison_constants(1.0, 2.0).unwrap();
        assert!((c.bayart - s2).abs() < 1e-15 && (c.thm21_upper - s2).abs() < 1e-15);
        let c = comparison_constants(2.0, 4.0).unwrap();
        assert!((c.bayart - s2).abs() < 1e-15 && (c.thm21_upper - s2).abs() < 1e-15);
        let c = comparison_constants(0.5, 3.0).unwrap();
        assert!((c.bayart - 6f64.sqrt()).abs() < 1e-15 && c.thm21_upper == c.bayart);
        assert!(comparison_constants(3.0, 3.0).is_err());
    }

    #[test]
    fn stirling_examples() {
        let (lo, hi) = stirling_bracket(1.0).unwrap();
        assert!((lo - 0.922_137).abs() < 1e-6 && (hi - 1.002_274).abs() < 1e-6);
        let (lo, hi) = stirling_bracket(10.0).unwrap();
        assert!(lo < 3_628_800.0 && 3_628_800.0 < hi);
        for x in 1..=50 {
            let x = x as f64;
            let (lo, hi) = stirling_bracket(x).unwrap();
            let g = gamma(x + 1.0);
            assert!((hi - lo) / g <= (1.0 / (12.0 * x)).exp_m1() + 1e-15);
        }
    }

    #[test]
    fn interpolation_examples() {
        assert!((interpolation_constant(0.5).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(interpolation_constant(1.0).unwrap(), 1.0);
        assert!(interpolation_constant(0.0).is_err());
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..1000 {
            let t = i as f64 / 1000.0;
            let v = t.powf(t) * (1.0 - t).powf(1.0 - t);
            if v < best.0 {
                best = (v, t);
            }
        }
        assert!((best.0 - 0.5).abs() < 1e-12 && (best.1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn binomials() {
        assert_eq!(central_binomial(15).unwrap(), 155_117_520);
        assert_eq!(binomial_u64(6, 3).unwrap(), 20);
        assert!(central_binomial(40).is_err());
    }
}
