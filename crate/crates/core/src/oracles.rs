//! Reference computations that share no code path with the production
//! special functions. Used by the `validate` command and the tests.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Adaptive Simpson quadrature of `f` on `[a, b]` to absolute tolerance
/// `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `γ(s, x)` by direct integration of `t^{s−1}e^{−t}`; needs `s ≥ 1` so the
/// integrand is bounded.
pub fn lower_gamma_by_integration(s: f64, x: f64) -> f64 {
    let f = |t: f64| if t == 0.0 { 0.0 } else { t.powf(s - 1.0) * (-t).exp() };
    adaptive_simpson(&f, 0.0, x, 1e-13)
}

/// `Q_{1/2}(a, b)` as the tail `P(X > b²)` of `X = (Z + a)²`, `Z` standard
/// normal, by integrating the normal density.
pub fn marcum_half_by_integration(a: f64, b: f64) -> f64 {
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
    let upper = |lo: f64| {
        // ∫_lo^∞ φ, cut off where the density is below f64 resolution.
        let hi = lo.max(0.0) + 40.0;
        if lo >= hi {
            return 0.0;
        }
        let mut total = 0.0;
        let mut x = lo;
        while x < hi {
            let next = (x + 1.0).min(hi);
            total += adaptive_simpson(&phi, x, next, 1e-15);
            x = next;
        }
        total
    };
    upper(b - a) + upper(b + a)
}

/// `₂F₁(a, b; c; −1)` from its defining series, with repeated averaging of
/// the partial sums (Euler transform) to tame the slow alternating tail.
/// Requires `c − a − b > −1`.
pub fn hyp2f1_minus1_direct(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(c - a - b > -1.0) || !(c > 0.0) {
        return Err(Error::Degenerate(format!(
            "direct series for 2F1({a}, {b}; {c}; -1) does not converge"
        )));
    }
    const HEAD: usize = 400;
    const LEVELS: usize = 40;
    let mut sums = Vec::with_capacity(HEAD + LEVELS + 1);
    let mut term = 1.0;
    let mut s = 0.0;
    for n in 0..=HEAD + LEVELS {
        s += term;
        sums.push(s);
        let nf = n as f64;
        term *= -(a + nf) * (b + nf) / ((c + nf) * (nf + 1.0));
        if term == 0.0 {
            return Ok(s);
        }
    }
    let mut row: Vec<f64> = sums[HEAD..].to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    Ok(row[0])
}
