//! The generalized Mittag-Leffler function: the Laplace transform of the
//! inverse self-similar Markov process attached to a Bernstein function.
//!
//! Three evaluation regimes with automatic dispatch:
//!  * power series `1 + (1/phi_a'(0+)) sum z^n / (n W(n))` inside |z| < phi(inf),
//!  * a Mellin-Barnes contour for negative real arguments (catalog closed
//!    forms of W only),
//!  * the residue asymptotic `C(p) q^{-p} / phi_a'(0+)` at large -z with
//!    caller-registered pole data.

use crate::bernstein::BernsteinSpec;
use crate::error::{Error, Result};
use crate::special::ln_gamma_complex;
use crate::wphi::WEvaluator;
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Series,
    MellinBarnes,
    Asymptotic,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Series => write!(f, "series"),
            Method::MellinBarnes => write!(f, "mellin_barnes"),
            Method::Asymptotic => write!(f, "asymptotic"),
        }
    }
}

/// Evaluation result with provenance.
#[derive(Debug, Clone, Copy)]
pub struct EvalReport {
    pub value: Complex64,
    pub method: Method,
    pub terms_or_nodes: usize,
    pub est_error: f64,
}

impl EvalReport {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

/// Pole data for the residue asymptotics (Custom pole detection is out of
/// scope; the caller registers what it knows about phi_alpha).
#[derive(Debug, Clone, Copy)]
pub struct PoleData {
    /// pole order p of phi_alpha (simple pole at -p)
    pub p: f64,
    /// residue constant C_p = lim_{z->p} (z-p) phi_alpha(-z); only needed
    /// when p is not an integer
    pub c_p: Option<f64>,
}

pub struct GMLEvaluator {
    base: BernsteinSpec,
    alpha: f64,
    w: WEvaluator,
    prime0: f64,
    radius: f64,
    /// a = a_{phi_alpha} v -1, in [-1, 0]
    abscissa: f64,
    pole: Option<PoleData>,
    max_terms: usize,
}

impl GMLEvaluator {
    pub fn new(base: &BernsteinSpec, alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha <= 1.0, "alpha must lie in (0, 1]");
        let w = WEvaluator::for_phi_alpha(base, alpha);
        let prime0 = alpha * base.phi_prime_at_zero();
        let a_resc = base.phi_alpha(alpha).a_phi();
        GMLEvaluator {
            base: base.clone(),
            alpha,
            prime0,
            radius: base.phi_inf(),
            abscissa: a_resc.max(-1.0),
            pole: None,
            max_terms: 512,
            w,
        }
    }

    /// Register pole data of phi_alpha for the asymptotic regime. The stable
    /// family gets `p = 1` automatically (its phi_alpha has a simple pole at -1).
    pub fn with_pole(mut self, pole: PoleData) -> Self {
        self.pole = Some(pole);
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base(&self) -> &BernsteinSpec {
        &self.base
    }

    pub fn w(&self) -> &WEvaluator {
        &self.w
    }

    pub fn prime0(&self) -> f64 {
        self.prime0
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Effective series radius; Poisson-type finite radii get a 1e-3 guard band.
    fn series_radius(&self) -> f64 {
        if self.radius.is_finite() {
            self.radius - 1e-3
        } else {
            f64::INFINITY
        }
    }

    /// Power series with the n = 0 term hard-coded to 1 (the summand's
    /// limiting value there is phi_alpha'(0+), which the prefactor cancels).
    pub fn eval_series(&self, z: Complex64, tol: f64) -> Result<EvalReport> {
        self.series_impl(z, tol, self.max_terms)
    }

    fn series_impl(&self, z: Complex64, tol: f64, max_terms: usize) -> Result<EvalReport> {
        if z.norm() >= self.series_radius() {
            return Err(Error::Radius(format!(
                "|z| = {} >= series radius {}",
                z.norm(),
                self.series_radius()
            )));
        }
        if z.norm() == 0.0 {
            return Ok(EvalReport {
                value: Complex64::new(1.0, 0.0),
                method: Method::Series,
                terms_or_nodes: 1,
                est_error: 0.0,
            });
        }
        let ln_mod_z = z.norm().ln();
        let arg_z = z.arg();
        let lp = self.prime0.ln();
        let mut sum = Complex64::new(1.0, 0.0);
        let mut prev_mag = f64::INFINITY;
        for n in 1..=max_terms {
            let nf = n as f64;
            let lw = self.w.w_log_integer(n)?;
            let lt = nf * ln_mod_z - nf.ln() - lw - lp;
            let mag = lt.exp();
            let phase = nf * arg_z;
            let term = Complex64::new(mag * phase.cos(), mag * phase.sin());
            sum += term;
            if mag <= tol * sum.norm().max(1e-300) && mag <= prev_mag && n >= 3 {
                return Ok(EvalReport {
                    value: sum,
                    method: Method::Series,
                    terms_or_nodes: n,
                    est_error: mag,
                });
            }
            prev_mag = mag;
        }
        Err(Error::NonConvergence(format!(
            "series did not reach tol {tol} within {max_terms} terms"
        )))
    }

    /// Mellin-Barnes contour for E(-q), q > 0:
    /// `(1/(2 pi i phi')) ∫ Gamma(xi) Gamma(-xi) / W(-xi) q^{-xi} dxi` along Re(xi) = a.
    pub fn eval_mellin_barnes(&self, q: f64, tol: f64) -> Result<EvalReport> {
        if q <= 0.0 {
            return Err(Error::Domain("Mellin-Barnes route needs q > 0".into()));
        }
        if !self.w.supports_complex() {
            return Err(Error::Unsupported(
                "no complex closed form for W: Mellin-Barnes unavailable".into(),
            ));
        }
        if self.abscissa >= 0.0 {
            return Err(Error::Contour(format!(
                "abscissa {} leaves no contour strip",
                self.abscissa
            )));
        }
        let a = (self.abscissa.abs() / 2.0).min(0.45);
        let lnq = q.ln();

        // Re of the integrand at xi = a + ib, in log-assembled form
        let g = |b: f64| -> Complex64 {
            let xi = Complex64::new(a, b);
            let ln_int = ln_gamma_complex(xi) + ln_gamma_complex(-xi)
                - self.w.w_log_complex(-xi).expect("closed form checked")
                - xi * lnq;
            ln_int.exp()
        };

        // truncation height from the integrand's |b|^{2a-1/2} e^{-pi|b|/2} decay, with a measured prefactor
        let decay = |b: f64| b.powf(2.0 * a - 0.5) * (-PI * b / 2.0).exp();
        let c_meas = g(2.0).norm() / decay(2.0);
        let scale = g(0.0).norm().max(1e-300);
        let target = (tol * scale).max(1e-305) / c_meas.max(1e-300);
        let mut height = 10.0f64;
        for _ in 0..60 {
            let next = (2.0 / PI)
                * ((2.0 * a - 0.5) * height.max(2.0).ln() - target.ln().min(0.0)).max(1.0);
            if (next - height).abs() < 0.5 {
                height = next.max(10.0);
                break;
            }
            height = next.max(10.0);
        }

        // oscillation e^{-i b ln q}: resolve the period, then refine by halving
        let mut h = (0.25f64).min(PI / (4.0 * (1.0 + lnq.abs())));
        // (value, node count, absolute-scale sum h * sum |g|)
        let trapezoid = |h: f64| -> (f64, usize, f64) {
            let n = (height / h).ceil() as usize;
            let mut s = 0.5 * g(0.0).re;
            let mut s_abs = 0.5 * g(0.0).norm();
            for k in 1..=n {
                let v = g(k as f64 * h);
                s += v.re;
                s_abs += v.norm();
            }
            let norm = PI * self.prime0;
            (s * h / norm, n + 1, s_abs * h / norm)
        };
        let (mut value, _, _) = trapezoid(h);
        let mut est = f64::INFINITY;
        for _ in 0..8 {
            h *= 0.5;
            let (v2, nodes, s_abs) = trapezoid(h);
            est = (v2 - value).abs();
            value = v2;
            // the second branch is the roundoff floor of the cancelling sum:
            // values below it are returned as ~0 with est_error telling so
            if est <= tol * value.abs().max(1e-300) || est <= 1e-15 * s_abs {
                return Ok(EvalReport {
                    value: Complex64::new(value, 0.0),
                    method: Method::MellinBarnes,
                    terms_or_nodes: nodes,
                    est_error: est,
                });
            }
        }
        Err(Error::Quadrature(format!(
            "Mellin-Barnes trapezoid stalled at change {est:.3e}"
        )))
    }

    /// Residue asymptotics `E(-q) ~ C(p) q^{-p} / phi_alpha'(0+)` for large q.
    pub fn eval_asymptotic(&self, q: f64, pole: PoleData) -> Result<f64> {
        let p = pole.p;
        assert!(q > 0.0 && p > 0.0);
        let is_int = (p - p.round()).abs() < 1e-9;
        let c = if is_int {
            let w_neg = self
                .w
                .w_complex(Complex64::new(-p.round(), 0.0))
                .map_err(|_| Error::Domain("W(-p) unavailable for this spec".into()))?;
            if !w_neg.norm().is_finite() || w_neg.norm() == 0.0 {
                return Err(Error::Domain(format!("W(-p) = {w_neg} is degenerate")));
            }
            let sign = if (p.round() as i64) % 2 == 0 { 1.0 } else { -1.0 };
            sign / (p * w_neg.re)
        } else {
            let c_p = pole.c_p.ok_or_else(|| {
                Error::Domain("non-integer pole order needs the residue constant C_p".into())
            })?;
            let w1m = self
                .w
                .w_complex(Complex64::new(1.0 - p, 0.0))
                .map_err(|_| Error::Domain("W(1-p) unavailable for this spec".into()))?;
            let g = crate::special::gamma(p) * crate::special::gamma(-p);
            g * c_p / w1m.re
        };
        Ok(c * q.powf(-p) / self.prime0)
    }

    /// Regime dispatch on the real line.
    pub fn eval(&self, z: f64, tol: f64) -> Result<EvalReport> {
        if z == 0.0 {
            return Ok(EvalReport {
                value: Complex64::new(1.0, 0.0),
                method: Method::Series,
                terms_or_nodes: 1,
                est_error: 0.0,
            });
        }
        if z.abs() < self.series_radius() {
            // series first with a short budget; fall through on slow convergence
            if let Ok(rep) = self.series_impl(Complex64::new(z, 0.0), tol, 100) {
                return Ok(rep);
            }
        }
        if z < 0.0 {
            match self.eval_mellin_barnes(-z, tol) {
                Ok(rep) => return Ok(rep),
                Err(Error::Unsupported(_)) => {}
                Err(e) => return Err(e),
            }
            if let Some(pole) = self.pole {
                let v = self.eval_asymptotic(-z, pole)?;
                return Ok(EvalReport {
                    value: Complex64::new(v, 0.0),
                    method: Method::Asymptotic,
                    terms_or_nodes: 1,
                    // order estimate: the next term of the expansion in 1/q
                    est_error: (v * (pole.p + 1.0) / -z).abs(),
                });
            }
        }
        // last resort: full-budget series (errors propagate)
        self.eval_series(Complex64::new(z, 0.0), tol)
    }

    /// z-th moment of the inverse process at time t:
    /// `t^{alpha z} Gamma(z) / (phi_alpha'(0+) W(z))`.
    pub fn mellin_of_inverse(&self, z: Complex64, t: f64) -> Result<Complex64> {
        assert!(t > 0.0);
        if z.re <= self.abscissa {
            return Err(Error::Domain(format!(
                "moment needs Re(z) > {}",
                self.abscissa
            )));
        }
        let is_pos_int = z.im == 0.0 && z.re > 0.5 && (z.re - z.re.round()).abs() < 1e-12;
        let lw = if is_pos_int {
            Complex64::new(self.w.w_log_integer(z.re.round() as usize)?, 0.0)
        } else {
            self.w.w_log_complex(z)?
        };
        let ln_val = Complex64::new(self.alpha * t.ln(), 0.0) * z + ln_gamma_complex(z)
            - lw
            - self.prime0.ln();
        Ok(ln_val.exp())
    }

    /// Series derivative d/dt E(q t^alpha) (term-wise; justified inside the
    /// convergence disk).
    pub fn f_q_deriv(&self, q: f64, t: f64, tol: f64) -> Result<f64> {
        assert!(t > 0.0);
        let z = q * t.powf(self.alpha);
        if z.abs() >= self.series_radius() {
            return Err(Error::Radius(format!(
                "|q| t^alpha = {} outside series radius",
                z.abs()
            )));
        }
        if q == 0.0 {
            return Ok(0.0);
        }
        // (alpha/phi') sum_{n>=1} q^n t^{alpha n - 1} / W(n)
        let lq = q.abs().ln();
        let lt = t.ln();
        let sign_q = q.signum();
        let mut sum = 0.0f64;
        let mut prev = f64::INFINITY;
        for n in 1..=self.max_terms {
            let nf = n as f64;
            let lw = self.w.w_log_integer(n)?;
            let lmag = nf * lq + (self.alpha * nf - 1.0) * lt - lw;
            let mag = lmag.exp();
            let term = if sign_q < 0.0 && n % 2 == 1 { -mag } else { mag };
            sum += term;
            if mag <= tol * sum.abs().max(1e-300) && mag <= prev && n >= 3 {
                return Ok(self.alpha / self.prime0 * sum);
            }
            prev = mag;
        }
        Err(Error::NonConvergence(
            "derivative series exhausted its budget".into(),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinSpec;
    use approx::assert_relative_eq;

    fn stable_half() -> GMLEvaluator {
        GMLEvaluator::new(&BernsteinSpec::stable(0.5), 0.5)
    }

    #[test]
    fn series_at_zero_is_one() {
        let g = stable_half();
        let r = g.eval(0.0, 1e-12).unwrap();
        assert_eq!(r.real(), 1.0);
        assert_eq!(r.method, Method::Series);
    }

    #[test]
    fn drift_series_is_exponential() {
        // E(z) = e^{z/alpha} for drift b=1
        let g = GMLEvaluator::new(&BernsteinSpec::drift(1.0), 0.5);
        let r = g.eval_series(Complex64::new(1.0, 0.0), 1e-13).unwrap();
        assert_relative_eq!(r.real(), 7.3890560989306502, max_relative = 1e-12);
    }

    #[test]
    fn stable_series_matches_classical_ml() {
        // E_{1/2}(-1) = e erfc(1)
        let g = stable_half();
        let r = g.eval_series(Complex64::new(-1.0, 0.0), 1e-13).unwrap();
        assert_relative_eq!(r.real(), 0.427583576155807, max_relative = 1e-10);
    }

    #[test]
    fn mellin_barnes_drift() {
        let g = GMLEvaluator::new(&BernsteinSpec::drift(1.0), 0.5);
        let r = g.eval_mellin_barnes(1.0, 1e-13).unwrap();
        assert_relative_eq!(r.real(), 0.13533528323661269, max_relative = 1e-12);
    }

    #[test]
    fn mellin_barnes_stable() {
        let g = stable_half();
        let r = g.eval_mellin_barnes(2.0, 1e-12).unwrap();
        assert_relative_eq!(r.real(), 0.25539567631050574, max_relative = 1e-10);
    }

    #[test]
    fn dispatch_uses_mb_for_large_negative() {
        let g = stable_half();
        let r = g.eval(-30.0, 1e-10).unwrap();
        assert_eq!(r.method, Method::MellinBarnes);
        assert_relative_eq!(r.real(), 0.018795888861416751, max_relative = 1e-6);
    }

    #[test]
    fn poisson_inside_radius() {
        // near the radius edge the term ratio approaches 0.99: the 512-term
        // budget reaches ~1e-4 accuracy there, which the report discloses
        let g = GMLEvaluator::new(&BernsteinSpec::poisson(0.5), 1.0);
        let r = g.eval(0.99, 1e-3).unwrap();
        assert_eq!(r.method, Method::Series);
        assert!(r.real().is_finite() && r.real() > 1.0);
        assert!(r.est_error < 1e-3 * r.real());
        // outside the radius is rejected
        assert!(matches!(g.eval(1.01, 1e-10), Err(Error::Radius(_))));
    }

    #[test]
    fn poisson_series_value_frozen() {
        // q-series at z = 0.5, qq = 0.5, alpha = 0.5 (mpmath oracle)
        let g = GMLEvaluator::new(&BernsteinSpec::poisson(0.5), 0.5);
        let r = g.eval(0.5, 1e-13).unwrap();
        assert_relative_eq!(r.real(), 5.4740361611162813, max_relative = 1e-11);
        let r = g.eval(-0.5, 1e-13).unwrap();
        assert_relative_eq!(r.real(), 0.2760864840202878, max_relative = 1e-11);
    }

    #[test]
    fn asymptotic_stable() {
        // E_alpha(-q) ~ q^{-1}/Gamma(1-alpha); alpha=0.5, q=1000 -> 1/(sqrt(pi) 1000)
        let g = stable_half();
        let v = g
            .eval_asymptotic(1000.0, PoleData { p: 1.0, c_p: None })
            .unwrap();
        assert_relative_eq!(v, 5.6418958354775628e-4, max_relative = 1e-12);
    }

    #[test]
    fn moments_of_inverse() {
        let g = stable_half();
        // E[zeta_1] = 1/Gamma(1.5)
        let m1 = g.mellin_of_inverse(Complex64::new(1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(m1.re, 1.1283791670955126, max_relative = 1e-12);

        let g = GMLEvaluator::new(&BernsteinSpec::drift(1.0), 0.5);
        let m2 = g.mellin_of_inverse(Complex64::new(2.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(m2.re, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn moment_time_scaling() {
        // M_{zeta_t}(z) = t^{alpha z} M_{zeta_1}(z) at t=2, z=3
        let g = stable_half();
        let at_t = g.mellin_of_inverse(Complex64::new(3.0, 0.0), 2.0).unwrap();
        let at_1 = g.mellin_of_inverse(Complex64::new(3.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(
            at_t.re,
            2.0f64.powf(1.5) * at_1.re,
            max_relative = 1e-12
        );
    }

    #[test]
    fn derivative_matches_moment_at_zero() {
        // d/dq E(-q)|_{q=0} = -E[zeta_1]
        let g = stable_half();
        let h = 1e-4;
        let d = (g.eval(h, 1e-13).unwrap().real() - g.eval(-h, 1e-13).unwrap().real()) / (2.0 * h);
        let m1 = g.mellin_of_inverse(Complex64::new(1.0, 0.0), 1.0).unwrap().re;
        assert_relative_eq!(d, m1, max_relative = 1e-6);
    }

    #[test]
    fn laplace_bound() {
        // |E(-q)| <= 1 for q >= 0 (Laplace transform of a probability law)
        for g in [
            stable_half(),
            GMLEvaluator::new(&BernsteinSpec::drift(1.0), 0.5),
            GMLEvaluator::new(&BernsteinSpec::poisson(0.5), 0.5),
        ] {
            for &q in &[0.0, 0.1, 0.5, 0.9, 2.0, 5.0] {
                if q >= g.radius() {
                    continue;
                }
                let v = g.eval(-q, 1e-11).unwrap().real();
                assert!(v <= 1.0 + 1e-10 && v >= 0.0, "q={q} v={v}");
            }
        }
    }

    #[test]
    fn term_identity_stable_reduction() {
        // (1/phi') 1/(n W(n)) = 1/Gamma(alpha n + 1), log-space, n=1..30
        for &alpha in &[0.3, 0.5, 0.7] {
            let g = GMLEvaluator::new(&BernsteinSpec::stable(alpha), alpha);
            for n in 1..=30 {
                let lhs = -(g.prime0().ln()) - (n as f64).ln() - g.w().w_log_integer(n).unwrap();
                let rhs = -crate::special::ln_gamma(alpha * n as f64 + 1.0);
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0),
                    "alpha={alpha} n={n}: {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn series_derivative_consistency() {
        // f_q_deriv vs central difference of the series
        let g = stable_half();
        let (q, t): (f64, f64) = (-1.0, 1.2);
        let h = 1e-5;
        let fp = g
            .eval(q * (t + h).powf(0.5), 1e-13)
            .unwrap()
            .real();
        let fm = g
            .eval(q * (t - h).powf(0.5), 1e-13)
            .unwrap()
            .real();
        let num = (fp - fm) / (2.0 * h);
        let ana = g.f_q_deriv(q, t, 1e-13).unwrap();
        assert_relative_eq!(num, ana, max_relative = 1e-7);
    }
}
