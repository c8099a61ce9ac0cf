//! Roots of univariate complex polynomials.
//!
//! Aberth-Ehrlich simultaneous iteration from Newton-polygon starting
//! points, with a companion-matrix fallback. Numerically multiple roots come
//! back as tight clusters; [`RootSet::clusters`] groups them so callers can
//! use the well-conditioned cluster centroid instead of the scattered
//! individual approximations.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::polynomial::Polynomial;
use crate::quadrature::horner;

const EPS: f64 = f64::EPSILON;
const MAX_ITER: usize = 1000;

/// Default residual bound for [`roots_univariate`].
pub const DEFAULT_ROOT_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct RootCluster {
    pub center: Complex64,
    pub multiplicity: usize,
    /// Indices into [`RootSet::roots`].
    pub members: Vec<usize>,
    /// Radius of the union of inclusion disks around the members.
    pub radius: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub leading: Complex64,
    pub roots: Vec<Complex64>,
    pub clusters: Vec<RootCluster>,
    /// Largest normalized residual `|P(α)| / (|a_m| max(1,|α|)^m)`.
    pub residual: f64,
    pub used_fallback: bool,
}

/// Roots of a univariate polynomial of degree at least one.
pub fn roots_univariate(p: &Polynomial, tol: f64) -> Result<RootSet> {
    let c = p.univariate_coefficients()?;
    roots_of_coefficients(&c, tol)
}

/// Roots from dense ascending coefficients. Trailing zeros are ignored.
pub fn roots_of_coefficients(coeffs: &[Complex64], tol: f64) -> Result<RootSet> {
    let top = coeffs
        .iter()
        .rposition(|c| c.re != 0.0 || c.im != 0.0)
        .ok_or_else(|| Error::invalid("the zero polynomial has no finite root set"))?;
    if top == 0 {
        return Err(Error::invalid("a constant polynomial has no roots"));
    }
    let coeffs = &coeffs[..=top];
    let leading = coeffs[top];
    let zeros = coeffs.iter().position(|c| c.re != 0.0 || c.im != 0.0).unwrap();
    let reduced = &coeffs[zeros..];

    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let mut used_fallback = false;
    match reduced.len() - 1 {
        0 => {}
        1 => roots.push(-reduced[0] / reduced[1]),
        2 => roots.extend(quadratic(reduced)),
        _ => {
            let found = match aberth(reduced) {
                Some(r) if max_residual(reduced, &r) < tol => r,
                Some(r) if backward_ok(reduced, &r) => r,
                _ => {
                    used_fallback = true;
                    let mut r = companion_roots(reduced)?;
                    for z in r.iter_mut() {
                        *z = newton_polish(reduced, *z);
                    }
                    r
                }
            };
            roots.extend(found);
        }
    }
    let residual = max_residual(coeffs, &roots);
    if !(residual < tol) && !backward_ok(coeffs, &roots) {
        return Err(Error::RootsNotConverged {
            degree: top,
            residual,
        });
    }
    let clusters = clusters(coeffs, &roots);
    Ok(RootSet {
        leading,
        roots,
        clusters,
        residual,
        used_fallback,
    })
}

fn quadratic(c: &[Complex64]) -> [Complex64; 2] {
    let (a, b, cc) = (c[2], c[1], c[0]);
    let disc = (b * b - 4.0 * a * cc).sqrt();
    // pick the sign that avoids cancellation
    let q = if (b.conj() * disc).re >= 0.0 {
        -0.5 * (b + disc)
    } else {
        -0.5 * (b - disc)
    };
    if q.norm() == 0.0 {
        [Complex64::new(0.0, 0.0); 2]
    } else {
        [q / a, cc / q]
    }
}

fn normalized_residual(c: &[Complex64], z: Complex64) -> f64 {
    let m = (c.len() - 1) as i32;
    horner(c, z).norm() / (c[c.len() - 1].norm() * z.norm().max(1.0).powi(m))
}

fn max_residual(c: &[Complex64], roots: &[Complex64]) -> f64 {
    roots
        .iter()
        .map(|&z| normalized_residual(c, z))
        .fold(0.0, f64::max)
}

/// Every root is an exact root of a polynomial within a small relative
/// perturbation of the coefficients.
fn backward_ok(c: &[Complex64], roots: &[Complex64]) -> bool {
    let m = (c.len() - 1) as f64;
    roots.iter().all(|&z| {
        let r = z.norm();
        let bound: f64 = if r <= 1.0 {
            c.iter().rev().fold(0.0, |acc, ci| acc * r + ci.norm())
        } else {
            let y = 1.0 / r;
            c.iter().fold(0.0, |acc, ci| acc * y + ci.norm()) * r.powi(c.len() as i32 - 1)
        };
        horner(c, z).norm() <= 64.0 * EPS * m * bound
    })
}

/// Returns `p(z)/p'(z)` and whether `p(z)` is at rounding level.
fn newton_ratio(c: &[Complex64], z: Complex64) -> (Complex64, bool) {
    let m = c.len() - 1;
    let r = z.norm();
    if r <= 1.0 {
        let mut p = c[m];
        let mut dp = Complex64::new(0.0, 0.0);
        let mut bound = c[m].norm();
        for k in (0..m).rev() {
            dp = dp * z + p;
            p = p * z + c[k];
            bound = bound * r + c[k].norm();
        }
        (p / dp, p.norm() <= 4.0 * EPS * (m as f64) * bound)
    } else {
        // evaluate the reversed polynomial at y = 1/z
        let y = 1.0 / z;
        let ry = y.norm();
        let mut q = c[0];
        let mut dq = Complex64::new(0.0, 0.0);
        let mut bound = c[0].norm();
        for ck in &c[1..=m] {
            dq = dq * y + q;
            q = q * y + ck;
            bound = bound * ry + ck.norm();
        }
        let ratio = z * q / (m as f64 * q - y * dq);
        (ratio, q.norm() <= 4.0 * EPS * (m as f64) * bound)
    }
}

/// Starting points on circles whose radii come from the upper convex hull
/// of `(k, log|c_k|)`.
fn initial_guesses(c: &[Complex64]) -> Vec<Complex64> {
    let m = c.len() - 1;
    let pts: Vec<(usize, f64)> = c
        .iter()
        .enumerate()
        .filter(|(_, ci)| ci.norm() > 0.0)
        .map(|(k, ci)| (k, ci.norm().ln()))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(m);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let k = j - i;
        let radius = ((yi - yj) / k as f64).exp();
        for t in 0..k {
            let angle = std::f64::consts::TAU * (t as f64 / k as f64) + 0.4 + (i as f64) * 0.7;
            out.push(Complex64::from_polar(radius, angle));
        }
    }
    debug_assert_eq!(out.len(), m);
    out
}

fn aberth(c: &[Complex64]) -> Option<Vec<Complex64>> {
    let m = c.len() - 1;
    let mut z = initial_guesses(c);
    let mut done = vec![false; m];
    for _ in 0..MAX_ITER {
        let mut all = true;
        for i in 0..m {
            if done[i] {
                continue;
            }
            let (ratio, small) = newton_ratio(c, z[i]);
            if small || !ratio.is_finite() {
                done[i] = small;
                if !small {
                    // stationary point of p: nudge off it
                    z[i] *= Complex64::from_polar(1.0 + 1e-8, 1e-3);
                    all = false;
                }
                continue;
            }
            let s: Complex64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                if w.norm() <= EPS * z[i].norm() {
                    done[i] = true;
                }
            }
            all = false;
        }
        if all {
            return Some(z);
        }
    }
    z.iter().all(|v| v.is_finite()).then_some(z)
}

fn companion_roots(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = c.len() - 1;
    let lead = c[m];
    let mut a = DMatrix::<Complex64>::zeros(m, m);
    for i in 1..m {
        a[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..m {
        a[(i, m - 1)] = -c[i] / lead;
    }
    let ev: Vec<Complex64> = Schur::new(a)
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .unwrap_or_default();
    if ev.len() != m || ev.iter().any(|v| !v.is_finite()) {
        return Err(Error::RootsNotConverged {
            degree: m,
            residual: f64::INFINITY,
        });
    }
    Ok(ev)
}

fn newton_polish(c: &[Complex64], mut z: Complex64) -> Complex64 {
    for _ in 0..3 {
        let before = horner(c, z).norm();
        let (ratio, small) = newton_ratio(c, z);
        if small || !ratio.is_finite() {
            break;
        }
        let cand = z - ratio;
        if horner(c, cand).norm() < before {
            z = cand;
        } else {
            break;
        }
    }
    z
}

/// Groups roots whose Weierstrass inclusion disks overlap.
fn clusters(c: &[Complex64], roots: &[Complex64]) -> Vec<RootCluster> {
    let m = roots.len();
    let lead = c[c.len() - 1];
    let radii: Vec<f64> = (0..m)
        .map(|i| {
            let mut denom = lead;
            for j in 0..m {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let floor = 4.0 * EPS * roots[i].norm().max(1e-300);
            if denom.norm() == 0.0 {
                // exact duplicates (zero roots, closed forms) merge at distance 0
                return floor;
            }
            let w = horner(c, roots[i]).norm() / denom.norm();
            if w.is_finite() {
                (m as f64 * w).max(floor)
            } else {
                f64::INFINITY
            }
        })
        .collect();
    // union-find over overlapping disks
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    for i in 0..m {
        for j in i + 1..m {
            if (roots[i] - roots[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; m];
    for i in 0..m {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
        .into_iter()
        .map(|members| {
            let k = members.len();
            let centroid = members.iter().map(|&i| roots[i]).sum::<Complex64>() / k as f64;
            let radius = members
                .iter()
                .map(|&i| (roots[i] - centroid).norm() + radii[i])
                .fold(0.0, f64::max);
            let center = if k > 1 {
                polish_center(c, k, centroid, radius)
            } else {
                centroid
            };
            RootCluster {
                center,
                multiplicity: k,
                members,
                radius,
            }
        })
        .collect()
}

/// A `k`-fold root is a simple root of `P^{(k−1)}`; Newton on that
/// derivative sharpens the centroid. The result is kept only if it stays
/// inside the cluster.
fn polish_center(c: &[Complex64], k: usize, centroid: Complex64, radius: f64) -> Complex64 {
    let m = c.len() - 1;
    if k > m {
        return centroid;
    }
    let deriv: Vec<Complex64> = (0..=m - (k - 1))
        .map(|j| {
            let factor: f64 = ((j + 1)..=(j + k - 1)).map(|t| t as f64).product();
            c[j + k - 1] * factor
        })
        .collect();
    if deriv.len() < 2 {
        return centroid;
    }
    let mut z = centroid;
    for _ in 0..30 {
        let (ratio, small) = newton_ratio(&deriv, z);
        if small || !ratio.is_finite() {
            break;
        }
        z -= ratio;
        if ratio.norm() <= EPS * z.norm() {
            break;
        }
    }
    if z.is_finite() && (z - centroid).norm() <= radius {
        z
    } else {
        centroid
    }
}
