//! Bernstein functions of the form phi(u) = b u + u ∫_0^1 r^{u-1} m(r) dr,
//! with the catalog entries (pure drift, stable-Lamperti, Poisson) carried in
//! closed form and custom tails evaluated by quadrature.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::special::ln_gamma;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// Levy-measure tail in multiplicative coordinates; called as m(r, 1-r) so
/// kernels with an endpoint singularity at r -> 1 see an exact offset.
pub type TailFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum Kind {
    /// phi(u) = b u
    Drift,
    /// phi(u) = Gamma(u + index)/Gamma(u), the Lamperti exponent of the
    /// stable subordinator; m(r) = r^index (1-r)^{-index} / Gamma(1-index).
    StableLamperti { index: f64 },
    /// phi(u) = 1 - q^u, Poisson of rate 1 with jumps |ln q|; m = 1_{q <= r < 1}.
    PoissonQ { q: f64 },
    /// caller-supplied non-decreasing tail on (0,1)
    Custom { tail: TailFn, label: String },
}

impl fmt::Debug for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Drift => write!(f, "Drift"),
            Kind::StableLamperti { index } => write!(f, "StableLamperti({index})"),
            Kind::PoissonQ { q } => write!(f, "PoissonQ({q})"),
            Kind::Custom { label, .. } => write!(f, "Custom({label})"),
        }
    }
}

/// A Bernstein function together with its derived constants.
///
/// `scale` represents pre-composition with u -> scale*u, so `phi_alpha` stays
/// inside the type and catalog closed forms survive the rescaling.
#[derive(Clone, Debug)]
pub struct BernsteinSpec {
    pub kind: Kind,
    pub b: f64,
    scale: f64,
    a_phi: f64,
    phi_inf: f64,
    prime0: f64,
}

/// Result of the class-membership checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub in_b: bool,
    pub in_b_diamond: bool,
    pub a_phi: f64,
}

impl BernsteinSpec {
    pub fn drift(b: f64) -> Self {
        assert!(b > 0.0, "drift coefficient must be positive");
        BernsteinSpec {
            kind: Kind::Drift,
            b,
            scale: 1.0,
            a_phi: f64::NEG_INFINITY,
            phi_inf: f64::INFINITY,
            prime0: b,
        }
    }

    pub fn stable(index: f64) -> Self {
        assert!(
            index > 0.0 && index < 1.0,
            "stable index must lie in (0,1)"
        );
        BernsteinSpec {
            kind: Kind::StableLamperti { index },
            b: 0.0,
            scale: 1.0,
            a_phi: -index,
            phi_inf: f64::INFINITY,
            prime0: ln_gamma(index).exp(),
        }
    }

    pub fn poisson(q: f64) -> Self {
        assert!(q > 0.0 && q < 1.0, "poisson parameter must lie in (0,1)");
        BernsteinSpec {
            kind: Kind::PoissonQ { q },
            b: 0.0,
            scale: 1.0,
            a_phi: f64::NEG_INFINITY,
            phi_inf: 1.0,
            prime0: -q.ln(),
        }
    }

    /// Custom spec from a non-decreasing tail m on (0,1). The abscissa is
    /// probed numerically when not supplied.
    pub fn custom(
        b: f64,
        tail: TailFn,
        label: impl Into<String>,
        a_phi: Option<f64>,
    ) -> Result<Self> {
        let mut spec = BernsteinSpec {
            kind: Kind::Custom {
                tail,
                label: label.into(),
            },
            b,
            scale: 1.0,
            a_phi: 0.0,
            phi_inf: f64::INFINITY,
            prime0: 0.0,
        };
        spec.a_phi = match a_phi {
            Some(a) => a,
            None => spec.probe_abscissa(),
        };
        spec.prime0 = spec.compute_prime0()?;
        spec.phi_inf = spec.compute_phi_inf();
        Ok(spec)
    }

    /// Tail value m(r); accounts for the rescale (tail_scaled(r) = m(r^{1/scale})).
    ///
    /// Quadrature nodes may round onto the endpoints; boundary values are the
    /// one-sided limits (possibly infinite, which the rules discard).
    pub fn tail(&self, r: f64) -> f64 {
        self.tail_om(r, 1.0 - r)
    }

    /// Tail value with an exact `1 - r` offset (kernels singular at r = 1).
    pub fn tail_om(&self, r: f64, one_minus_r: f64) -> f64 {
        let (rb, omrb) = if self.scale == 1.0 {
            (r, one_minus_r)
        } else {
            // r^{1/scale}; 1 - r^{1/s} = -expm1(ln(r)/s) keeps the offset exact
            let rb = r.powf(1.0 / self.scale);
            let omrb = if r > 0.0 {
                -(r.ln() / self.scale).exp_m1()
            } else {
                1.0
            };
            (rb, omrb)
        };
        match &self.kind {
            Kind::Drift => 0.0,
            Kind::StableLamperti { index } => {
                rb.powf(*index) * omrb.powf(-*index) * crate::special::rgamma(1.0 - *index)
            }
            Kind::PoissonQ { q } => {
                if rb >= *q {
                    1.0
                } else {
                    0.0
                }
            }
            Kind::Custom { tail, .. } => tail(rb, omrb),
        }
    }

    /// Analyticity abscissa a_phi (after rescale).
    pub fn a_phi(&self) -> f64 {
        if self.a_phi.is_infinite() {
            self.a_phi
        } else {
            self.a_phi / self.scale
        }
    }

    /// phi(inf), the series radius of the associated generalized Mittag-Leffler function.
    pub fn phi_inf(&self) -> f64 {
        self.phi_inf
    }

    /// phi'(0+) = b + ∫ m(r)/r dr, by closed form or quadrature.
    pub fn phi_prime_at_zero(&self) -> f64 {
        self.prime0 * self.scale
    }

    /// phi at a real argument.
    pub fn phi(&self, u: f64) -> Result<f64> {
        Ok(self.phi_complex(Complex64::new(u, 0.0))?.re)
    }

    /// phi at a complex argument with Re z > a_phi.
    pub fn phi_complex(&self, z: Complex64) -> Result<Complex64> {
        let zs = z * self.scale;
        if zs.re <= self.a_phi {
            return Err(Error::Domain(format!(
                "phi evaluated at Re(z)={} <= abscissa {}",
                zs.re, self.a_phi
            )));
        }
        match &self.kind {
            Kind::Drift => Ok(zs * self.b),
            Kind::StableLamperti { index } => {
                if zs.norm() < 1e-14 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                // Gamma(z+a)/Gamma(z)
                let ln = crate::special::ln_gamma_complex(zs + Complex64::new(*index, 0.0))
                    - crate::special::ln_gamma_complex(zs);
                Ok(ln.exp())
            }
            Kind::PoissonQ { q } => {
                let lnq = q.ln();
                Ok(Complex64::new(1.0, 0.0) - (zs * lnq).exp())
            }
            Kind::Custom { tail, .. } => {
                // safety margin against near-divergent quadrature
                if !self.a_phi.is_infinite() && zs.re <= self.a_phi + 0.01 {
                    return Err(Error::Domain(format!(
                        "custom phi needs Re(z) > a_phi + 0.01 = {}",
                        self.a_phi + 0.01
                    )));
                }
                let tail = tail.clone();
                let bz = zs * self.b;
                let re = tanh_sinh(
                    |_r, xl, xr| {
                        let p = (xl.ln() * (zs - Complex64::new(1.0, 0.0))).exp();
                        (p * tail(xl, xr)).re
                    },
                    0.0,
                    1.0,
                    1e-12,
                )?;
                let im = if zs.im == 0.0 {
                    0.0
                } else {
                    tanh_sinh(
                        |_r, xl, xr| {
                            let p = (xl.ln() * (zs - Complex64::new(1.0, 0.0))).exp();
                            (p * tail(xl, xr)).im
                        },
                        0.0,
                        1.0,
                        1e-12,
                    )?
                    .value
                };
                Ok(bz + zs * Complex64::new(re.value, im))
            }
        }
    }

    fn compute_prime0(&self) -> Result<f64> {
        match &self.kind {
            Kind::Drift => Ok(self.b),
            Kind::StableLamperti { index } => Ok(ln_gamma(*index).exp()),
            Kind::PoissonQ { q } => Ok(-q.ln()),
            Kind::Custom { tail, .. } => {
                let tail = tail.clone();
                let q = tanh_sinh(|_r, xl, xr| tail(xl, xr) / xl, 0.0, 1.0, 1e-11).map_err(|_| {
                    Error::NotInB("∫ m(r)/r dr did not converge: phi'(0+) = ∞".into())
                })?;
                if !q.value.is_finite() {
                    return Err(Error::NotInB("phi'(0+) diverges".into()));
                }
                Ok(self.b + q.value)
            }
        }
    }

    fn compute_phi_inf(&self) -> f64 {
        match &self.kind {
            Kind::Drift | Kind::StableLamperti { .. } => f64::INFINITY,
            Kind::PoissonQ { .. } => 1.0,
            Kind::Custom { tail, .. } => {
                if self.b > 0.0 {
                    return f64::INFINITY;
                }
                // phi(inf) = total Levy mass = lim_{r->1} m; diverges iff m blows up at 1
                let probe = tail(1.0 - 1e-9, 1e-9);
                if probe > 1e9 {
                    f64::INFINITY
                } else {
                    // phi(u) -> ∫_0^1 u r^{u-1} m(r) dr -> m(1-)
                    probe
                }
            }
        }
    }

    /// Bisection probe for the custom abscissa: smallest real z where the
    /// integral ∫ r^{z-1} m(r) dr still converges, to 1e-3.
    fn probe_abscissa(&self) -> f64 {
        let converges = |z: f64| -> bool {
            // truncated at three lower endpoints; a convergent integral has
            // geometrically shrinking increments, a divergent one does not
            let val = |eps: f64| -> Option<f64> {
                tanh_sinh(
                    |_r, xl, xr| (eps + xl).powf(z - 1.0) * self.tail_om(eps + xl, xr),
                    eps,
                    1.0,
                    1e-9,
                )
                .ok()
                .map(|q| q.value)
            };
            match (val(1e-6), val(1e-9), val(1e-12)) {
                (Some(a), Some(b), Some(c)) => {
                    // the increment ratio behaves like 1000^{-(z - a_phi)}:
                    // below 1 convergent, at/above 1 divergent
                    let d1 = (b - a).abs();
                    let d2 = (c - b).abs();
                    c.is_finite() && d2 <= 0.999 * d1.max(1e-13 * c.abs().max(1.0))
                }
                _ => false,
            }
        };
        // expand downward until divergence
        let mut lo = -0.25f64;
        let mut hi = 0.0f64;
        while converges(lo) {
            hi = lo;
            lo *= 2.0;
            if lo < -64.0 {
                return f64::NEG_INFINITY;
            }
        }
        while hi - lo > 1e-3 {
            let mid = 0.5 * (lo + hi);
            if converges(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The rescaled function phi_alpha(u) = phi(alpha u); stays in B with
    /// phi_alpha'(0+) = alpha phi'(0+).
    pub fn phi_alpha(&self, alpha: f64) -> BernsteinSpec {
        assert!(alpha > 0.0);
        let mut out = self.clone();
        out.scale = self.scale * alpha;
        out
    }

    pub(crate) fn rescale_factor(&self) -> f64 {
        self.scale
    }

    /// Class membership for the operator theory at order `alpha`.
    ///
    /// Catalog entries carry their published classification; the numeric
    /// limit probe (heuristic) only runs for Custom specs sitting exactly on
    /// the boundary a_phi = -alpha.
    pub fn membership(&self, alpha: f64) -> Membership {
        assert!(alpha > 0.0 && alpha < 1.0);
        let a = self.a_phi();
        let in_b = self.prime0.is_finite();
        let in_diamond = if !in_b || a > -alpha {
            false
        } else if a < -alpha {
            true
        } else {
            match &self.kind {
                // boundary case: published classification
                Kind::StableLamperti { .. } => true,
                Kind::Drift | Kind::PoissonQ { .. } => true,
                Kind::Custom { .. } => {
                    // heuristic limit u*phi(u-alpha) -> 0 at u in {1e-3,1e-4,1e-5}
                    let probe: Vec<f64> = [1e-3, 1e-4, 1e-5]
                        .iter()
                        .filter_map(|&u| self.phi(u - alpha).ok().map(|p| u * p))
                        .collect();
                    probe.len() == 3 && probe.iter().all(|v| v.abs() < 1e-2) && {
                        // extrapolate: values should shrink with u
                        probe[2].abs() <= probe[0].abs().max(1e-12)
                    }
                }
            }
        };
        Membership {
            in_b,
            in_b_diamond: in_diamond,
            a_phi: a,
        }
    }

    /// The bold transform: an evaluator for z phi(z-alpha)/(z-alpha) together
    /// with the shifted tail r^{-alpha} m(r).
    pub fn bold_phi(&self, alpha: f64) -> Result<BoldPhi> {
        let m = self.membership(alpha);
        if !m.in_b_diamond {
            return Err(Error::Domain(format!(
                "spec {:?} is not in B_diamond for alpha={alpha}",
                self.kind
            )));
        }
        let prime0 = if m.a_phi < -alpha {
            Some(-self.phi(-alpha)? / alpha)
        } else {
            None
        };
        // Bernstein-ness of the transform per the shifted-tail criterion:
        // r^{-alpha} m(r) non-decreasing. (The stable family passes; the
        // Poisson shifted tail r^{-alpha} 1_{q<=r} decreases on (q,1) and the
        // transform genuinely fails to be Bernstein there.)
        let tail_monotone = {
            let grid: Vec<f64> = (1..120).map(|i| i as f64 / 120.0).collect();
            grid.windows(2).all(|w| {
                let v0 = w[0].powf(-alpha) * self.tail(w[0]);
                let v1 = w[1].powf(-alpha) * self.tail(w[1]);
                v0 <= v1 + 1e-12 * v1.abs().max(1.0)
            })
        };
        Ok(BoldPhi {
            base: self.clone(),
            alpha,
            prime0,
            is_bernstein: tail_monotone,
        })
    }
}

/// Evaluator for the transform z -> z phi(z-alpha)/(z-alpha).
#[derive(Clone, Debug)]
pub struct BoldPhi {
    pub base: BernsteinSpec,
    pub alpha: f64,
    /// -phi(-alpha)/alpha when a_phi < -alpha, else undefined
    pub prime0: Option<f64>,
    /// whether r^{-alpha} m(r) is non-decreasing (transform is Bernstein)
    pub is_bernstein: bool,
}

impl BoldPhi {
    /// Evaluate the transform at real z > 0 (z = alpha handled by its limit).
    pub fn eval(&self, z: f64) -> Result<f64> {
        if (z - self.alpha).abs() < 1e-9 {
            // z/(z-a) phi(z-a) -> alpha phi'(0+)
            return Ok(self.alpha * self.base.phi_prime_at_zero());
        }
        Ok(z * self.base.phi(z - self.alpha)? / (z - self.alpha))
    }

    /// Shifted tail m_alpha(r) = r^{-alpha} m(r).
    pub fn tail(&self, r: f64) -> f64 {
        r.powf(-self.alpha) * self.base.tail(r)
    }

    pub fn tail_om(&self, r: f64, one_minus_r: f64) -> f64 {
        r.powf(-self.alpha) * self.base.tail_om(r, one_minus_r)
    }
}

impl BernsteinSpec {
    /// Complex phi for catalog entries (used by the Mellin-Barnes integrand).
    pub fn phi_complex_strict(&self, z: Complex64) -> Result<Complex64> {
        self.phi_complex(z)
    }
}

/// `name[:key=value,...]` grammar: `drift:b=1`, `stable:alpha=0.5`, `poisson:q=0.5`.
///
/// `stable` without a parameter is completed by the caller (the CLI fills the
/// global `--alpha`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpecString {
    pub name: String,
    pub params: Vec<(String, f64)>,
}

impl FromStr for SpecString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut it = s.splitn(2, ':');
        let name = it.next().unwrap().trim().to_lowercase();
        if name.is_empty() {
            return Err(Error::Parse("empty spec string".into()));
        }
        let mut params = Vec::new();
        if let Some(rest) = it.next() {
            for kv in rest.split(',') {
                let mut kvit = kv.splitn(2, '=');
                let k = kvit.next().unwrap().trim().to_string();
                let v = kvit
                    .next()
                    .ok_or_else(|| Error::Parse(format!("missing '=' in '{kv}'")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
                params.push((k, v));
            }
        }
        Ok(SpecString { name, params })
    }
}

impl SpecString {
    /// Build the catalog spec; `default_alpha` completes a bare `stable`.
    pub fn build(&self, default_alpha: Option<f64>) -> Result<BernsteinSpec> {
        let get = |key: &str| -> Option<f64> {
            self.params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
        };
        let check_keys = |allowed: &[&str]| -> Result<()> {
            for (k, _) in &self.params {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::Parse(format!(
                        "unknown key '{k}' for spec '{}'",
                        self.name
                    )));
                }
            }
            Ok(())
        };
        match self.name.as_str() {
            "drift" => {
                check_keys(&["b"])?;
                Ok(BernsteinSpec::drift(get("b").unwrap_or(1.0)))
            }
            "stable" => {
                check_keys(&["alpha"])?;
                let idx = get("alpha").or(default_alpha).ok_or_else(|| {
                    Error::Parse("stable spec needs alpha (flag or key)".into())
                })?;
                Ok(BernsteinSpec::stable(idx))
            }
            "poisson" => {
                check_keys(&["q"])?;
                let q = get("q")
                    .ok_or_else(|| Error::Parse("poisson spec needs q".into()))?;
                Ok(BernsteinSpec::poisson(q))
            }
            other => Err(Error::Parse(format!(
                "unknown spec '{other}' (expected drift|stable|poisson)"
            ))),
        }
    }
}

impl fmt::Display for BernsteinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Drift => write!(f, "drift:b={}", self.b)?,
            Kind::StableLamperti { index } => write!(f, "stable:alpha={index}")?,
            Kind::PoissonQ { q } => write!(f, "poisson:q={q}")?,
            Kind::Custom { label, .. } => write!(f, "custom:{label}")?,
        }
        if self.scale != 1.0 {
            write!(f, " (rescaled by {})", self.scale)?;
        }
        Ok(())
    }
}
