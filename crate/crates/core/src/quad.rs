//! Quadrature rules: tanh-sinh (double exponential), Gauss-Jacobi and
//! generalized Gauss-Laguerre via Golub-Welsch, and adaptive Simpson.
//!
//! Tanh-sinh integrands receive `(x, x - a, b - x)` so kernels with endpoint
//! singularities can form `1 - r` (or `r`) without cancellation; the node map
//! produces those offsets directly.

use crate::error::{Error, Result};
use crate::polys::{jacobi, jacobi_deriv, laguerre, laguerre_deriv};
use crate::special::{gamma, ln_gamma};
use nalgebra::DMatrix;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

/// Value plus a crude error estimate (last refinement change).
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub est_error: f64,
    pub nodes: usize,
}

/// Tanh-sinh rule on (a, b) with level doubling until the change drops
/// below `tol` relative. Integrand gets `(x, x - a, b - x)`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64, f64, f64) -> f64,
{
    assert!(b > a);
    let scale = 0.5 * (b - a);
    let umax = 6.8f64;

    // contribution of one abscissa u (plus symmetric partner handled by caller)
    let eval = |u: f64| -> f64 {
        let s = 0.5 * PI * u.sinh();
        let ch = s.cosh();
        // dx/du, with the interval scale folded in
        let w = scale * 0.5 * PI * u.cosh() / (ch * ch);
        if !w.is_finite() || w < 1e-305 {
            return 0.0;
        }
        // offsets from the endpoints, exact where x itself would round
        let off_right = (b - a) / (1.0 + (2.0 * s).exp());
        let off_left = (b - a) / (1.0 + (-2.0 * s).exp());
        let x = a + off_left;
        let v = f(x, off_left, off_right);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };

    let mut h = 1.0f64;
    // level 0: nodes at u = k*h
    let mut total = eval(0.0);
    {
        let mut k = 1;
        loop {
            let u = k as f64 * h;
            if u > umax {
                break;
            }
            total += eval(u) + eval(-u);
            k += 1;
        }
    }
    let mut value = total * h;
    let mut nodes = (2.0 * umax / h) as usize + 1;

    let mut prev_change = f64::INFINITY;
    for _level in 1..=11 {
        h *= 0.5;
        // add the new midpoints only
        let mut add = 0.0;
        let mut k = 1usize;
        loop {
            let u = k as f64 * h;
            if u > umax {
                break;
            }
            add += eval(u) + eval(-u);
            nodes += 2;
            k += 2;
        }
        let new_value = value * 0.5 + add * h;
        let change = (new_value - value).abs();
        value = new_value;
        if change <= tol * value.abs().max(1e-300) || (change < 1e-16 && prev_change < 1e-16) {
            return Ok(Quadrature {
                value,
                est_error: change,
                nodes,
            });
        }
        prev_change = change;
    }
    // a final sanity: accept if the last two refinements were already tiny in
    // absolute terms (integral is genuinely ~0)
    if prev_change < tol {
        return Ok(Quadrature {
            value,
            est_error: prev_change,
            nodes,
        });
    }
    Err(Error::Quadrature(format!(
        "tanh-sinh stalled at change {prev_change:.3e} (target {tol:.3e})"
    )))
}

/// Golub-Welsch: nodes/weights from the symmetric tridiagonal recurrence matrix.
fn golub_welsch(diag: &[f64], offdiag: &[f64], mu0: f64) -> Vec<(f64, f64)> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = diag[i];
        if i + 1 < n {
            m[(i, i + 1)] = offdiag[i];
            m[(i + 1, i)] = offdiag[i];
        }
    }
    let eig = m.symmetric_eigen();
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|j| {
            let x = eig.eigenvalues[j];
            let v0 = eig.eigenvectors[(0, j)];
            (x, mu0 * v0 * v0)
        })
        .collect();
    out.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap());
    out
}

/// Gauss-Jacobi nodes/weights on (0,1) for the weight x^beta (1-x)^alpha.
///
/// `integrate` with these pairs approximates `∫_0^1 x^beta (1-x)^alpha f(x) dx ≈ Σ w_i f(x_i)`.
pub fn gauss_jacobi_01(n: usize, alpha: f64, beta: f64) -> Arc<Vec<(f64, f64)>> {
    assert!(n >= 2 && alpha > -1.0 && beta > -1.0);
    let key = (1u8, n, alpha.to_bits(), beta.to_bits());
    if let Some(r) = rule_cache(&key) {
        return r;
    }
    // standard [-1,1] rule with weight (1-u)^alpha (1+u)^beta, then map u = 2x-1
    let mut diag = Vec::with_capacity(n);
    let mut off = Vec::with_capacity(n - 1);
    let (a, b) = (alpha, beta);
    diag.push((b - a) / (a + b + 2.0));
    for k in 1..n {
        let kf = k as f64;
        let denom = 2.0 * kf + a + b;
        diag.push((b * b - a * a) / (denom * (denom + 2.0)));
        let num = 4.0 * kf * (kf + a) * (kf + b) * (kf + a + b);
        let den = denom * denom * (denom + 1.0) * (denom - 1.0);
        off.push((num / den).sqrt());
    }
    // mu0 = ∫ (1-u)^a (1+u)^b du = 2^{a+b+1} B(a+1, b+1)
    let mu0 = ((a + b + 1.0) * (2.0f64).ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
        - ln_gamma(a + b + 2.0))
    .exp();
    let std_rule = golub_welsch(&diag, &off, mu0);
    // the eigensolver carries O(1e-10) node noise at large n; polish the
    // roots with Newton and rebuild the weights from the derivative formula
    // w_i = C / ((1 - u^2) P_n'(u)^2)
    let nf = n as f64;
    let ln_c = (a + b + 1.0) * (2.0f64).ln() + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0)
        - ln_gamma(nf + 1.0)
        - ln_gamma(nf + a + b + 1.0);
    let c = ln_c.exp();
    // map to (0,1): x = (1+u)/2; weight picks up 2^{-(a+b+1)} from the density change
    let scale = (2.0f64).powf(-(a + b + 1.0));
    let rule: Vec<(f64, f64)> = std_rule
        .into_iter()
        .map(|(u0, _)| {
            let mut u = u0;
            for _ in 0..3 {
                let d = jacobi_deriv(n, a, b, u);
                if d != 0.0 {
                    u -= jacobi(n, a, b, u) / d;
                }
            }
            let d = jacobi_deriv(n, a, b, u);
            let w = c / ((1.0 - u * u) * d * d);
            (0.5 * (1.0 + u), w * scale)
        })
        .collect();
    cache_rule(key, rule)
}

/// Generalized Gauss-Laguerre nodes/weights for the weight x^gamma e^{-x} on (0, inf).
pub fn gauss_laguerre(n: usize, gamma_exp: f64) -> Arc<Vec<(f64, f64)>> {
    assert!(n >= 2 && gamma_exp > -1.0);
    let key = (2u8, n, gamma_exp.to_bits(), 0u64);
    if let Some(r) = rule_cache(&key) {
        return r;
    }
    let g = gamma_exp;
    let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + g + 1.0).collect();
    let off: Vec<f64> = (1..n)
        .map(|k| ((k as f64) * (k as f64 + g)).sqrt())
        .collect();
    let mu0 = gamma(g + 1.0);
    let raw = golub_welsch(&diag, &off, mu0);
    // Newton polish + weight formula w_i = Gamma(n+g+1)/(n! x_i L'(x_i)^2)
    let nf = n as f64;
    let c = (ln_gamma(nf + g + 1.0) - ln_gamma(nf + 1.0)).exp();
    let rule: Vec<(f64, f64)> = raw
        .into_iter()
        .map(|(x0, _)| {
            let mut x = x0;
            for _ in 0..3 {
                let d = laguerre_deriv(n, g, x);
                if d != 0.0 {
                    x -= laguerre(n, g, x) / d;
                }
            }
            let d = laguerre_deriv(n, g, x);
            (x, c / (x * d * d))
        })
        .collect();
    cache_rule(key, rule)
}

/// Gauss-Legendre on (a, b).
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let base = gauss_jacobi_01(n, 0.0, 0.0);
    base.iter()
        .map(|&(x, w)| (a + (b - a) * x, w * (b - a)))
        .collect()
}

type RuleKey = (u8, usize, u64, u64);
static RULES: Lazy<Mutex<HashMap<RuleKey, Arc<Vec<(f64, f64)>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn rule_cache(key: &RuleKey) -> Option<Arc<Vec<(f64, f64)>>> {
    RULES.lock().unwrap().get(key).cloned()
}

fn cache_rule(key: RuleKey, rule: Vec<(f64, f64)>) -> Arc<Vec<(f64, f64)>> {
    let arc = Arc::new(rule);
    RULES.lock().unwrap().insert(key, arc.clone());
    arc
}

/// Adaptive Simpson on [a, b]; the second rule for cross-validations.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-14 {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(Error::Quadrature("adaptive Simpson depth exhausted".into()));
        }
        Ok(rec(f, a, m, fa, flm, fm, left, tol * 0.5, depth - 1)?
            + rec(f, m, b, fm, frm, fb, right, tol * 0.5, depth - 1)?)
    }
    let fa = f(a);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}
