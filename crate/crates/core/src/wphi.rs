//! The unique positive-definite solution of W(z+1) = phi(z) W(z), W(1) = 1.
//!
//! Integer arguments work for any phi (running products, memoized, with an
//! overflow-free log companion). Complex arguments are only available through
//! the catalog closed forms; generic phi has no computable representation at
//! non-integer arguments and such requests return `Unsupported`.

use crate::bernstein::{BernsteinSpec, Kind};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, ln_gamma_complex};
use num_complex::Complex64;
use std::sync::RwLock;

/// Closed forms for W at complex arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    /// phi_alpha of the stable family: W(z) = Gamma(alpha z)/Gamma(alpha)
    StableGamma { alpha: f64 },
    /// linear phi(z) = c z: W(z) = c^{z-1} Gamma(z)
    DriftGamma { c: f64 },
    /// Poisson rescale: W(n+1) = (q_a; q_a)_n at integers (no complex form)
    QPochhammer { q_alpha: f64 },
}

/// Evaluator for W_phi, usually built on an already-rescaled phi_alpha.
pub struct WEvaluator {
    spec: BernsteinSpec,
    closed: Option<ClosedForm>,
    /// ln W(n) for n = 1.., extended lazily; cache[k] = ln W(k+1)
    cache: RwLock<Vec<f64>>,
    cache_bound: usize,
}

impl WEvaluator {
    /// Evaluator for W_{phi_alpha} where `base` is the un-rescaled phi.
    pub fn for_phi_alpha(base: &BernsteinSpec, alpha: f64) -> Self {
        let closed = match &base.kind {
            Kind::Drift => Some(ClosedForm::DriftGamma {
                c: alpha * base.b * base.rescale_factor(),
            }),
            Kind::StableLamperti { index } => {
                let eff = alpha * base.rescale_factor();
                if (eff - *index).abs() < 1e-12 {
                    Some(ClosedForm::StableGamma { alpha: *index })
                } else {
                    None
                }
            }
            Kind::PoissonQ { q } => Some(ClosedForm::QPochhammer {
                q_alpha: q.powf(alpha * base.rescale_factor()),
            }),
            Kind::Custom { .. } => None,
        };
        WEvaluator {
            spec: base.phi_alpha(alpha),
            closed,
            cache: RwLock::new(vec![0.0]),
            cache_bound: 512,
        }
    }

    /// Direct evaluator on an already-built phi (no further rescale).
    pub fn new(spec: BernsteinSpec) -> Self {
        WEvaluator::for_phi_alpha(&spec, 1.0)
    }

    pub fn spec(&self) -> &BernsteinSpec {
        &self.spec
    }

    pub fn closed_form(&self) -> Option<ClosedForm> {
        self.closed
    }

    /// W(n) = prod_{k=1}^{n-1} phi(k); may overflow for large n, see `w_log_integer`.
    pub fn w_integer(&self, n: usize) -> Result<f64> {
        let lw = self.w_log_integer(n)?;
        let v = lw.exp();
        if !v.is_finite() {
            return Err(Error::Overflow(format!(
                "W({n}) exceeds f64 range; use w_log_integer"
            )));
        }
        Ok(v)
    }

    /// ln W(n), exact-in-structure running sum of ln phi(k).
    pub fn w_log_integer(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("W is indexed from n = 1".into()));
        }
        if n > self.cache_bound {
            return Err(Error::Domain(format!(
                "integer cache bound {} exceeded (n = {n})",
                self.cache_bound
            )));
        }
        {
            let c = self.cache.read().unwrap();
            if n <= c.len() {
                return Ok(c[n - 1]);
            }
        }
        let mut c = self.cache.write().unwrap();
        while c.len() < n {
            let k = c.len(); // next phi argument: W(k+1) = phi(k) W(k)
            let p = self.spec.phi(k as f64)?;
            if p <= 0.0 {
                return Err(Error::Domain(format!("phi({k}) = {p} <= 0")));
            }
            let prev = *c.last().unwrap();
            c.push(prev + p.ln());
        }
        Ok(c[n - 1])
    }

    /// W at complex z via the catalog closed form.
    pub fn w_complex(&self, z: Complex64) -> Result<Complex64> {
        match self.closed {
            Some(ClosedForm::StableGamma { alpha }) => {
                let la = ln_gamma(alpha);
                Ok((ln_gamma_complex(z * alpha) - la).exp())
            }
            Some(ClosedForm::DriftGamma { c }) => {
                let lnc = c.ln();
                Ok(((z - Complex64::new(1.0, 0.0)) * lnc + ln_gamma_complex(z)).exp())
            }
            Some(ClosedForm::QPochhammer { .. }) | None => Err(Error::Unsupported(
                "W at complex arguments needs a gamma-type closed form".into(),
            )),
        }
    }

    /// ln W at complex z via the catalog closed form (Mellin-Barnes path).
    pub fn w_log_complex(&self, z: Complex64) -> Result<Complex64> {
        match self.closed {
            Some(ClosedForm::StableGamma { alpha }) => {
                Ok(ln_gamma_complex(z * alpha) - ln_gamma(alpha))
            }
            Some(ClosedForm::DriftGamma { c }) => {
                Ok((z - Complex64::new(1.0, 0.0)) * c.ln() + ln_gamma_complex(z))
            }
            _ => Err(Error::Unsupported(
                "W at complex arguments needs a gamma-type closed form".into(),
            )),
        }
    }

    pub fn supports_complex(&self) -> bool {
        matches!(
            self.closed,
            Some(ClosedForm::StableGamma { .. }) | Some(ClosedForm::DriftGamma { .. })
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinSpec;
    use approx::assert_relative_eq;

    #[test]
    fn w_at_one_is_one() {
        for spec in [
            BernsteinSpec::drift(1.0),
            BernsteinSpec::stable(0.5),
            BernsteinSpec::poisson(0.5),
        ] {
            let w = WEvaluator::for_phi_alpha(&spec, 0.5);
            assert_eq!(w.w_integer(1).unwrap(), 1.0);
            assert_eq!(w.w_log_integer(1).unwrap(), 0.0);
        }
    }

    #[test]
    fn stable_rescaled_w2() {
        // W(2) = phi_alpha(1) = Gamma(1)/Gamma(0.5)
        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::stable(0.5), 0.5);
        assert_relative_eq!(w.w_integer(2).unwrap(), 0.5641895835, max_relative = 1e-9);
    }

    #[test]
    fn poisson_q_pochhammer() {
        // qq = 0.5, alpha = 1: W(3) = (1-0.5)(1-0.25) = 0.375
        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::poisson(0.5), 1.0);
        assert_relative_eq!(w.w_integer(3).unwrap(), 0.375, max_relative = 1e-13);
    }

    #[test]
    fn drift_log_w() {
        // phi_alpha(z) = alpha z, W(n) = alpha^{n-1} Gamma(n); alpha=0.5, n=4
        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::drift(1.0), 0.5);
        assert_relative_eq!(
            w.w_log_integer(4).unwrap(),
            -0.28768207245178093,
            max_relative = 1e-12
        );
    }

    #[test]
    fn log_and_linear_agree() {
        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::stable(0.5), 0.5);
        for n in 1..=20 {
            let a = w.w_integer(n).unwrap();
            let b = w.w_log_integer(n).unwrap().exp();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn complex_closed_forms() {
        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::stable(0.5), 0.5);
        // W(1) = 1, W(3) = Gamma(1.5)/Gamma(0.5) = 0.5
        let one = w.w_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert_relative_eq!(one.re, 1.0, max_relative = 1e-13);
        let three = w.w_complex(Complex64::new(3.0, 0.0)).unwrap();
        assert_relative_eq!(three.re, 0.5, max_relative = 1e-13);

        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::drift(1.0), 0.5);
        let v = w.w_complex(Complex64::new(2.5, 0.0)).unwrap();
        assert_relative_eq!(v.re, 0.46999280149331259, max_relative = 1e-13);

        let w = WEvaluator::for_phi_alpha(&BernsteinSpec::poisson(0.5), 0.5);
        assert!(w.w_complex(Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn functional_equation_integers() {
        for (spec, alpha) in [
            (BernsteinSpec::drift(2.0), 0.5),
            (BernsteinSpec::stable(0.3), 0.3),
            (BernsteinSpec::poisson(0.25), 0.7),
        ] {
            let w = WEvaluator::for_phi_alpha(&spec, alpha);
            let phi_a = spec.phi_alpha(alpha);
            for n in 1..=30 {
                let lhs = w.w_log_integer(n + 1).unwrap();
                let rhs = w.w_log_integer(n).unwrap() + phi_a.phi(n as f64).unwrap().ln();
                assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
            }
        }
    }
}
