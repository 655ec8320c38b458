//! The self-similar multiplicative-convolution operator
//! `D f(t) = t^{1-alpha} b f'(t) + t^{-alpha} ∫_0^t f'(y) m(y/t) dy`,
//! built either on a Bernstein tail m (base flavor) or on the shifted tail
//! r^{-alpha} m(r) (bold flavor, the one with eigenfunctions F_q).

use crate::bernstein::{BernsteinSpec, Kind};
use crate::error::{Error, Result};
use crate::gml::GMLEvaluator;
use crate::quad::{gauss_jacobi_01, gauss_legendre, tanh_sinh};
use num_complex::Complex64;
use std::sync::Arc;

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A test function with an optional analytic derivative (finite differences
/// otherwise).
#[derive(Clone)]
pub struct DifferentiableFn {
    f: RealFn,
    df: Option<RealFn>,
}

impl DifferentiableFn {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        DifferentiableFn {
            f: Arc::new(f),
            df: None,
        }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        DifferentiableFn {
            f: Arc::new(f),
            df: Some(Arc::new(df)),
        }
    }

    /// p_w(y) = y^w
    pub fn power(w: f64) -> Self {
        DifferentiableFn::with_derivative(move |y| y.powf(w), move |y| w * y.powf(w - 1.0))
    }

    pub fn exp() -> Self {
        DifferentiableFn::with_derivative(|y| y.exp(), |y| y.exp())
    }

    /// e^{-y}, decaying test function for the characteristic operator
    pub fn exp_neg() -> Self {
        DifferentiableFn::with_derivative(|y| (-y).exp(), |y| -(-y).exp())
    }

    pub fn constant(c: f64) -> Self {
        DifferentiableFn::with_derivative(move |_| c, |_| 0.0)
    }

    /// the dilation d_c g = g(c .)
    pub fn dilate(&self, c: f64) -> Self {
        let f = self.f.clone();
        let df = self.df.clone();
        DifferentiableFn {
            f: Arc::new(move |y| f(c * y)),
            df: df.map(|d| {
                let d = d.clone();
                Arc::new(move |y: f64| c * d(c * y)) as RealFn
            }),
        }
    }

    /// the involution (Lambda g)(y) = g(1/y)
    pub fn involute(&self) -> Self {
        let f = self.f.clone();
        let df = self.df.clone();
        DifferentiableFn {
            f: Arc::new(move |y| f(1.0 / y)),
            df: df.map(|d| {
                let d = d.clone();
                Arc::new(move |y: f64| -d(1.0 / y) / (y * y)) as RealFn
            }),
        }
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.f)(y)
    }

    pub fn deriv(&self, y: f64) -> f64 {
        match &self.df {
            Some(d) => d(y),
            None => {
                let h = 6e-6 * y.abs().max(1.0);
                ((self.f)(y + h) - (self.f)(y - h)) / (2.0 * h)
            }
        }
    }
}

/// Quadrature rule for the convolution integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rule {
    /// Gauss-Jacobi with weight (1-r)^exponent; for kernels with a declared
    /// endpoint power at r -> 1 (stable family: exponent = -alpha)
    GaussJacobi { exponent: f64 },
    TanhSinh,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rule: Rule,
    pub nodes: usize,
    pub tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rule: Rule::TanhSinh,
            nodes: 200,
            tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Flavor {
    Base,
    Bold,
}

/// The operator, with its kernel, drift and quadrature configuration.
pub struct ConvOperator {
    spec: BernsteinSpec,
    alpha: f64,
    flavor: Flavor,
    pub quad: QuadConfig,
    /// lower edge of the kernel support (PoissonQ jumps at q)
    support_lo: f64,
}

impl ConvOperator {
    /// Operator with kernel m itself (symbol phi).
    pub fn base(spec: &BernsteinSpec, alpha: f64) -> Self {
        let quad = default_quad(spec, alpha, Flavor::Base);
        ConvOperator {
            spec: spec.clone(),
            alpha,
            flavor: Flavor::Base,
            quad,
            support_lo: support_lo(spec),
        }
    }

    /// Operator with the shifted kernel r^{-alpha} m(r) (symbol bold-phi);
    /// requires membership in B_diamond.
    pub fn bold(spec: &BernsteinSpec, alpha: f64) -> Result<Self> {
        spec.bold_phi(alpha)?;
        let quad = default_quad(spec, alpha, Flavor::Bold);
        Ok(ConvOperator {
            spec: spec.clone(),
            alpha,
            flavor: Flavor::Bold,
            quad,
            support_lo: support_lo(spec),
        })
    }

    pub fn with_quad(mut self, quad: QuadConfig) -> Self {
        self.quad = quad;
        self
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn kernel(&self, r: f64, one_minus_r: f64) -> f64 {
        match self.flavor {
            Flavor::Base => self.spec.tail_om(r, one_minus_r),
            Flavor::Bold => r.powf(-self.alpha) * self.spec.tail_om(r, one_minus_r),
        }
    }

    /// Apply the operator at t > 0.
    pub fn apply(&self, g: &DifferentiableFn, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Err(Error::Domain("operator needs t > 0".into()));
        }
        let drift_part = t.powf(1.0 - self.alpha) * self.spec.b * g.deriv(t);
        if matches!(self.spec.kind, Kind::Drift) {
            return Ok(drift_part);
        }
        // t^{-alpha} ∫_0^t g'(y) m(y/t) dy = t^{1-alpha} ∫_lo^1 g'(t r) m(r) dr
        let integral = self.convolution_integral(g, t)?;
        Ok(drift_part + t.powf(1.0 - self.alpha) * integral)
    }

    fn convolution_integral(&self, g: &DifferentiableFn, t: f64) -> Result<f64> {
        let lo = self.support_lo;
        let f = |r: f64, _xl: f64, xr: f64| g.deriv(t * r) * self.kernel(r, xr);
        match self.quad.rule {
            Rule::TanhSinh => Ok(tanh_sinh(f, lo, 1.0, self.quad.tol)?.value),
            Rule::GaussJacobi { exponent } => {
                // weight (1-r)^exponent, smooth remainder handed to the rule
                let smooth =
                    |r: f64, omr: f64| g.deriv(t * r) * self.kernel(r, omr) * omr.powf(-exponent);
                let integrate = |n: usize| -> f64 {
                    let rule = gauss_jacobi_01(n, exponent, 0.0);
                    rule.iter()
                        .map(|&(x, w)| {
                            let r = lo + (1.0 - lo) * x;
                            let omr = (1.0 - lo) * (1.0 - x);
                            w * smooth(r, omr) * (1.0 - lo).powf(exponent + 1.0)
                        })
                        .sum()
                };
                let mut n = self.quad.nodes;
                let mut prev = integrate(n);
                for _ in 0..2 {
                    n *= 2;
                    let next = integrate(n);
                    let change = (next - prev).abs();
                    if change <= self.quad.tol * next.abs().max(1e-300) {
                        return Ok(next);
                    }
                    prev = next;
                }
                // the declared weight does not capture a left-endpoint
                // singularity of g'; the double-exponential rule does
                Ok(tanh_sinh(f, lo, 1.0, self.quad.tol)?.value)
            }
        }
    }

    /// Closed-form action on powers: `D p_z = Phi(z) p_{z-alpha}` — the
    /// quadrature oracle.
    pub fn power_action(&self, z: Complex64, t: f64) -> Result<Complex64> {
        if t <= 0.0 {
            return Err(Error::Domain("power action needs t > 0".into()));
        }
        let symbol = self.symbol(z)?;
        let p = Complex64::new(t.ln(), 0.0) * (z - self.alpha);
        Ok(symbol * p.exp())
    }

    /// The operator symbol: phi (base) or bold-phi (bold) at complex z.
    pub fn symbol(&self, z: Complex64) -> Result<Complex64> {
        match self.flavor {
            Flavor::Base => self.spec.phi_complex(z),
            Flavor::Bold => {
                let za = z - Complex64::new(self.alpha, 0.0);
                if za.norm() < 1e-9 {
                    return Ok(Complex64::new(
                        self.alpha * self.spec.phi_prime_at_zero(),
                        0.0,
                    ));
                }
                Ok(z * self.spec.phi_complex(za)? / za)
            }
        }
    }

    /// Scaling-property residual `|D(d_c g)(t) - c^alpha (D g)(c t)|`.
    pub fn scaling_check(&self, g: &DifferentiableFn, c: f64, t: f64) -> Result<f64> {
        let lhs = self.apply(&g.dilate(c), t)?;
        let rhs = c.powf(self.alpha) * self.apply(g, c * t)?;
        Ok((lhs - rhs).abs())
    }
}

fn support_lo(spec: &BernsteinSpec) -> f64 {
    match &spec.kind {
        Kind::PoissonQ { q } => *q,
        _ => 0.0,
    }
}

fn default_quad(spec: &BernsteinSpec, alpha: f64, flavor: Flavor) -> QuadConfig {
    match (&spec.kind, flavor) {
        // stable kernels carry the declared (1-r)^{-index} endpoint power
        (Kind::StableLamperti { index }, _) => QuadConfig {
            rule: Rule::GaussJacobi { exponent: -index },
            nodes: 200,
            tol: 1e-10,
        },
        _ => {
            let _ = alpha;
            QuadConfig::default()
        }
    }
}

/// Eigenfunction F_q(t) = E(q t^alpha) as a test function; the derivative is
/// the term-wise differentiated series.
pub fn f_q(gml: &GMLEvaluator, q: f64, tol: f64) -> Result<DifferentiableFn> {
    let alpha = gml.alpha();
    let base = gml.base().clone();
    let g1 = GMLEvaluator::new(&base, alpha);
    let g2 = GMLEvaluator::new(&base, alpha);
    Ok(DifferentiableFn::with_derivative(
        move |t: f64| {
            g1.eval(q * t.powf(alpha), tol)
                .map(|r| r.real())
                .expect("F_q evaluation inside checked radius")
        },
        move |t: f64| {
            g2.f_q_deriv(q, t, tol)
                .expect("F_q' evaluation inside checked radius")
        },
    ))
}

/// Relative eigenrelation residual `|D F_q(t) - q F_q(t)| / max(1, |q F_q|)`
/// for a bold operator.
pub fn eigen_residual(
    gml: &GMLEvaluator,
    op: &ConvOperator,
    q: f64,
    t: f64,
) -> Result<f64> {
    if op.flavor != Flavor::Bold {
        return Err(Error::Domain(
            "the eigenrelation holds for the bold operator".into(),
        ));
    }
    if (q * t.powf(op.alpha)).abs() >= gml.radius() {
        return Err(Error::Radius(format!(
            "|q| t^alpha = {} outside phi(inf) = {}",
            (q * t.powf(op.alpha)).abs(),
            gml.radius()
        )));
    }
    if q == 0.0 {
        return Ok(0.0);
    }
    let fq = f_q(gml, q, 1e-12)?;
    let lhs = op.apply(&fq, t)?;
    let rhs = q * fq.eval(t);
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}

/// The closed-form bold operator of the Poisson family:
/// `t^{-a} f(t) - (tq)^{-a} f(tq) + a ∫_{tq}^t f(y) y^{-a-1} dy`.
pub fn poisson_bold_closed(f: &DifferentiableFn, q: f64, alpha: f64, t: f64) -> Result<f64> {
    assert!(q > 0.0 && q < 1.0 && t > 0.0);
    let rule = gauss_legendre(96, q * t, t);
    let integral: f64 = rule
        .iter()
        .map(|&(y, w)| w * f.eval(y) * y.powf(-alpha - 1.0))
        .sum();
    Ok(t.powf(-alpha) * f.eval(t) - (q * t).powf(-alpha) * f.eval(q * t) + alpha * integral)
}

/// Characteristic operator of the Lamperti process,
/// `A f(t) = t^{-alpha} ( b t f'(t) + ∫_t^inf f'(r) m(t/r) dr )`,
/// via the log substitution r = t e^y.
pub fn char_operator(
    spec: &BernsteinSpec,
    alpha: f64,
    g: &DifferentiableFn,
    t: f64,
) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("characteristic operator needs t > 0".into()));
    }
    let local = spec.b * t * g.deriv(t);
    if matches!(spec.kind, Kind::Drift) {
        return Ok(t.powf(-alpha) * local);
    }
    // integrand(y) = g'(t e^y) m(e^{-y}) t e^y on (0, inf)
    let integrand = |y: f64| -> f64 {
        let emy = (-y).exp();
        let one_minus = -(-y).exp_m1(); // 1 - e^{-y}, exact for small y
        if emy <= 0.0 || one_minus <= 0.0 {
            return 0.0;
        }
        g.deriv(t * (y.exp())) * spec.tail_om(emy, one_minus) * t * y.exp()
    };
    // scan for the truncation point where the integrand has died off; the
    // interior probes guard against a tail that merely underflows while the
    // mid-range still grows (e.g. exponentially growing g)
    let scale = local.abs().max(integrand(0.5).abs()).max(1e-12);
    let mut y_max = 2.0f64;
    loop {
        let decayed = [1.0, 0.75, 0.5, 0.25].iter().all(|&f| {
            let v = integrand(y_max * f);
            v.is_finite() && (v.abs() < 1e-14 * scale || y_max * f < 1.5)
        });
        if decayed {
            break;
        }
        y_max *= 2.0;
        if y_max > 1e4 {
            return Err(Error::Quadrature(
                "characteristic-operator integrand does not decay (growing g?)".into(),
            ));
        }
    }
    let q = tanh_sinh(|y, _, _| integrand(y), 0.0, y_max, 1e-11)?;
    Ok(t.powf(-alpha) * (local + q.value))
}

/// Intertwining residual `|D^{phi}(Lambda g)(t) + t^{-2 alpha} (A g)(1/t)|`,
/// relative-normalized.
pub fn intertwining_residual(
    spec: &BernsteinSpec,
    alpha: f64,
    g: &DifferentiableFn,
    t: f64,
) -> Result<f64> {
    let op = ConvOperator::base(spec, alpha);
    let lhs = op.apply(&g.involute(), t)?;
    let rhs = -t.powf(-2.0 * alpha) * char_operator(spec, alpha, g, 1.0 / t)?;
    Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
}
