//! Squared-Bessel continuous-spectrum demo: the kernel
//! `J(u) = sum (e^{i pi} u)^n / (n!)^2` (so `J(z^2/4) = J_0(z)`), its Hankel
//! transform `H f(x) = ∫ J(lambda x) f(lambda) dlambda` (an involution), and
//! the time-fractional solution on the built-in closed-form pair
//! f(x) = e^{-x}, Hf = e^{-lambda}.

use crate::error::{Error, Result};
use crate::gml::GMLEvaluator;
use crate::quad::{adaptive_simpson, gauss_laguerre};
use std::f64::consts::PI;

/// J(u) by series for |u| <= 30, by the J_0 Hankel asymptotics beyond.
pub fn j_kernel(u: f64) -> f64 {
    if u.abs() <= 30.0 {
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for n in 1..200 {
            term *= -u / ((n * n) as f64);
            sum += term;
            if term.abs() < 1e-17 * sum.abs().max(1e-3) {
                break;
            }
        }
        sum
    } else if u > 0.0 {
        bessel_j0_asymptotic(2.0 * u.sqrt())
    } else {
        // J(-v) = I_0(2 sqrt(v)): grows; not used by the damped integrals
        let z = 2.0 * (-u).sqrt();
        bessel_i0(z)
    }
}

/// Hankel asymptotic expansion of J_0(z), 5 terms; |error| < 5e-8 for z >= 10.
fn bessel_j0_asymptotic(z: f64) -> f64 {
    let w = 8.0 * z;
    let w2 = w * w;
    // P: 1 - 9/(2! w^2) + 11025/(4! w^4) - 18261468225/(6! w^6) ...
    let p = 1.0 - 9.0 / (2.0 * w2) + 11025.0 / (24.0 * w2 * w2)
        - 1.0805063e8 / (720.0 * w2 * w2 * w2);
    let q = -1.0 / w + 225.0 / (6.0 * w2 * w) - 893025.0 / (120.0 * w2 * w2 * w);
    let chi = z - PI / 4.0;
    (2.0 / (PI * z)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn bessel_i0(z: f64) -> f64 {
    // series; only reached by negative arguments of J, which the damped
    // integrals never produce
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let q = z * z / 4.0;
    for n in 1..300 {
        term *= q / ((n * n) as f64);
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// The built-in closed-form Hankel pair.
pub struct HankelDemo {
    nodes: usize,
}

impl Default for HankelDemo {
    fn default() -> Self {
        HankelDemo { nodes: 96 }
    }
}

impl HankelDemo {
    pub fn new() -> Self {
        Self::default()
    }

    /// f(x) = e^{-x}
    pub fn f(&self, x: f64) -> f64 {
        (-x).exp()
    }

    /// H f(lambda) = e^{-lambda} (fixed point of the involution)
    pub fn hf(&self, lambda: f64) -> f64 {
        (-lambda).exp()
    }

    /// `∫_0^inf J(lambda x) Hf(lambda) dlambda`, which must reproduce f(x).
    pub fn involution_residual(&self, x: f64) -> Result<f64> {
        let recovered = self.integral(|_| 1.0, x)?;
        Ok((recovered - self.f(x)).abs())
    }

    /// Gauss-Laguerre evaluation of `∫ g(lambda) e^{-lambda} J(lambda x) dlambda`
    /// with adaptive node doubling. Nodes whose weight is below 1e-20 are
    /// skipped: |g| <= 1 and |J| <= 1 on the damped range, so they cannot
    /// contribute.
    fn integral(&self, g: impl Fn(f64) -> f64, x: f64) -> Result<f64> {
        let eval = |n: usize| -> f64 {
            gauss_laguerre(n, 0.0)
                .iter()
                .filter(|&&(_, w)| w > 1e-20)
                .map(|&(l, w)| w * g(l) * j_kernel(l * x))
                .sum()
        };
        let mut n = self.nodes;
        let mut prev = eval(n);
        for _ in 0..3 {
            n *= 2;
            let next = eval(n);
            if (next - prev).abs() <= 1e-10 * next.abs().max(1e-12) {
                return Ok(next);
            }
            prev = next;
        }
        Ok(prev)
    }

    /// The time-fractional squared-Bessel solution
    /// `u(t,x) = ∫ E(-lambda t^alpha) Hf(lambda) J(lambda x) dlambda`.
    pub fn solve(&self, gml: &GMLEvaluator, t: f64, x: f64) -> Result<f64> {
        if t < 0.0 || x < 0.0 {
            return Err(Error::Domain("demo needs t, x >= 0".into()));
        }
        let ta = if t == 0.0 { 0.0 } else { t.powf(gml.alpha()) };
        self.integral(
            |l| {
                if ta == 0.0 {
                    1.0
                } else {
                    gml.eval(-l * ta, 1e-12)
                        .map(|r| r.real())
                        .unwrap_or(f64::NAN)
                }
            },
            x,
        )
    }

    /// Second rule for the x = 0 scalar `∫ E(-lambda t^alpha) e^{-lambda} dlambda`:
    /// adaptive Simpson on a truncated domain.
    pub fn solve_x0_simpson(&self, gml: &GMLEvaluator, t: f64) -> Result<f64> {
        let ta = t.powf(gml.alpha());
        adaptive_simpson(
            &|l: f64| {
                let e = if ta == 0.0 {
                    1.0
                } else {
                    gml.eval(-l * ta, 1e-12).map(|r| r.real()).unwrap_or(f64::NAN)
                };
                e * (-l).exp()
            },
            0.0,
            46.0,
            1e-12,
        )
    }
}
