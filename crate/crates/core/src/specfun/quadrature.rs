//! Gauss–Laguerre and Chebyshev–Gauss rules.

use crate::error::{domain, Error, Result};
use std::f64::consts::PI;

pub const MAX_LAGUERRE_ORDER: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    /// ∫₀^∞ f(x) e^{−x} dx
    GaussLaguerre,
    /// ∫₋₁¹ f(x) / √(1−x²) dx
    ChebyshevGauss,
}

/// Nodes and weights of an n-point rule. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    kind: QuadratureKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn kind(&self) -> QuadratureKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Natural logarithms of the weights; finite even where the weights
    /// themselves underflow.
    pub fn ln_weights(&self) -> &[f64] {
        &self.ln_weights
    }

    /// Applies the rule: `Σ wᵢ f(xᵢ)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// `Σ wᵢ e^{xᵢ} f(xᵢ)`: a Gauss–Laguerre rule applied to an integrand
    /// that does not carry the e^{−x} factor itself.
    pub fn integrate_unweighted<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(|(&x, &lw)| {
                let v = f(x);
                if v == 0.0 {
                    0.0
                } else {
                    (lw + x).exp() * v
                }
            })
            .sum()
    }
}

/// n-point Gauss–Laguerre rule.
///
/// Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi
/// matrix (Golub–Welsch), polished by Newton steps on `L_n`. Weights use
/// `w = x / ((n+1)² L_{n+1}(x)²)`, evaluated in log space.
pub fn gauss_laguerre_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 || n > MAX_LAGUERRE_ORDER {
        return Err(domain(
            "gauss_laguerre_rule",
            format!("order {n} outside 1..={MAX_LAGUERRE_ORDER}"),
        ));
    }
    let (mut nodes, _) = jacobi_eigen_laguerre(n)?;
    for x in nodes.iter_mut() {
        *x = newton_polish(n, *x);
    }
    let ln_n1 = ((n + 1) as f64).ln();
    let ln_weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (p, _, scale) = laguerre_scaled(n + 1, x);
            x.ln() - 2.0 * ln_n1 - 2.0 * (p.abs().ln() + scale)
        })
        .collect();
    let weights = ln_weights.iter().map(|lw| lw.exp()).collect();
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLaguerre,
        nodes,
        weights,
        ln_weights,
    })
}

/// n-point Chebyshev–Gauss rule: `t_p = cos((2p−1)π/(2n))`, weights `π/n`.
pub fn chebyshev_gauss_rule(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(domain("chebyshev_gauss_rule", "order must be positive"));
    }
    let nf = n as f64;
    let nodes: Vec<f64> = (1..=n)
        .map(|p| ((2 * p - 1) as f64 * PI / (2.0 * nf)).cos())
        .collect();
    let w = PI / nf;
    Ok(QuadratureRule {
        kind: QuadratureKind::ChebyshevGauss,
        nodes,
        weights: vec![w; n],
        ln_weights: vec![w.ln(); n],
    })
}

/// Eigenvalues (ascending) of the Laguerre Jacobi matrix and the squared
/// first components of the normalized eigenvectors, which are the
/// Golub–Welsch weights.
pub(crate) fn jacobi_eigen_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut d: Vec<f64> = (0..n).map(|i| (2 * i + 1) as f64).collect();
    // e[i] couples rows i and i+1
    let mut e: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
    e[n - 1] = 0.0;
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

// Implicit QL with Wilkinson shifts; `z` carries the first row of the
// accumulated rotation matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    const MAX_SWEEPS: usize = 60;
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::NonConvergence {
                    what: "tridiagonal QL eigen-iteration",
                    iterations: MAX_SWEEPS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let fz = z[i + 1];
                z[i + 1] = s * z[i] + c * fz;
                z[i] = c * z[i] - s * fz;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `(p_n, p_{n−1}, s)` with `L_k(x) = p_k e^s`; rescales to stay finite.
pub(crate) fn laguerre_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    const BIG: f64 = 1e150;
    let mut prev = 1.0;
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let mut cur = 1.0 - x;
    let mut scale = 0.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 - x) * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            scale += BIG.ln();
        }
    }
    (cur, prev, scale)
}

fn newton_polish(n: usize, mut x: f64) -> f64 {
    let nf = n as f64;
    for _ in 0..4 {
        let (p, pm1, _) = laguerre_scaled(n, x);
        let dp = nf * (p - pm1) / x;
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        let next = x - step;
        if !(next > 0.0) {
            break;
        }
        x = next;
        if step.abs() <= 4.0 * f64::EPSILON * x {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma;
    use approx::assert_relative_eq;

    #[test]
    fn one_point_rule() {
        let r = gauss_laguerre_rule(1).unwrap();
        assert_relative_eq!(r.nodes()[0], 1.0, max_relative = 1e-14);
        assert_relative_eq!(r.weights()[0], 1.0, max_relative = 1e-14);
    }

    #[test]
    fn two_point_rule_matches_closed_form() {
        let r = gauss_laguerre_rule(2).unwrap();
        let s2 = 2f64.sqrt();
        assert_relative_eq!(r.nodes()[0], 2.0 - s2, max_relative = 1e-14);
        assert_relative_eq!(r.nodes()[1], 2.0 + s2, max_relative = 1e-14);
        assert_relative_eq!(r.weights()[0], (2.0 + s2) / 4.0, max_relative = 1e-13);
        assert_relative_eq!(r.weights()[1], (2.0 - s2) / 4.0, max_relative = 1e-13);
    }

    #[test]
    fn formula_weights_agree_with_eigenvector_weights() {
        for n in [3, 10, 40] {
            let r = gauss_laguerre_rule(n).unwrap();
            let (_, gw) = jacobi_eigen_laguerre(n).unwrap();
            for (w, v) in r.weights().iter().zip(&gw) {
                // Eigenvector components lose relative accuracy in the far tail.
                if *v > 1e-12 {
                    assert_relative_eq!(*w, *v, max_relative = 1e-8);
                }
            }
        }
    }

    #[test]
    fn moments_exact_up_to_degree_2n_minus_1() {
        for n in [1, 2, 5, 20, 100] {
            let r = gauss_laguerre_rule(n).unwrap();
            assert!(r.nodes().windows(2).all(|w| w[0] < w[1]));
            assert!(r.nodes()[0] > 0.0);
            for k in 0..2 * n {
                let kf = k as f64;
                let ln_fact = ln_gamma(kf + 1.0);
                let sum: f64 = r
                    .nodes()
                    .iter()
                    .zip(r.ln_weights())
                    .map(|(&x, &lw)| (lw + kf * x.ln() - ln_fact).exp())
                    .sum();
                assert!((sum - 1.0).abs() < 1e-9, "n = {n}, k = {k}: {sum}");
            }
        }
    }

    #[test]
    fn high_order_rule_builds() {
        let r = gauss_laguerre_rule(MAX_LAGUERRE_ORDER).unwrap();
        let s: f64 = r.ln_weights().iter().map(|lw| lw.exp()).sum();
        assert!((s - 1.0).abs() < 1e-10);
        assert!(gauss_laguerre_rule(MAX_LAGUERRE_ORDER + 1).is_err());
        assert!(gauss_laguerre_rule(0).is_err());
    }

    #[test]
    fn unweighted_integration() {
        // ∫₀^∞ e^{−2x} dx = 1/2
        let r = gauss_laguerre_rule(100).unwrap();
        let v = r.integrate_unweighted(|x| (-2.0 * x).exp());
        assert_relative_eq!(v, 0.5, max_relative = 1e-9);
    }

    #[test]
    fn chebyshev_rules() {
        let r1 = chebyshev_gauss_rule(1).unwrap();
        assert!(r1.nodes()[0].abs() < 1e-16);
        assert_relative_eq!(r1.weights()[0], PI);
        let r2 = chebyshev_gauss_rule(2).unwrap();
        assert_relative_eq!(r2.nodes()[0], 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(r2.nodes()[1], -(0.5f64.sqrt()), max_relative = 1e-15);
        let r = chebyshev_gauss_rule(100).unwrap();
        assert_relative_eq!(r.weights().iter().sum::<f64>(), PI, max_relative = 1e-14);
        assert!(r.nodes().iter().all(|t| t.abs() < 1.0));
        // ∫ x^k / √(1−x²) = π (k−1)!!/k!! for even k
        let mut expect = PI;
        for k in (2..=198).step_by(2) {
            expect *= (k - 1) as f64 / k as f64;
            let got = r.integrate(|x| x.powi(k));
            assert_relative_eq!(got, expect, max_relative = 1e-9);
        }
        assert!(r.integrate(|x| x.powi(37)).abs() < 1e-12);
        assert!(chebyshev_gauss_rule(0).is_err());
    }
}
