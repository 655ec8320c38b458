//! Named invariant suites behind the `verify` command: each check re-runs a
//! structural identity at its published tolerance and reports the measured
//! residual.

use crate::bernstein::BernsteinSpec;
use crate::error::Result;
use crate::gml::GMLEvaluator;
use crate::spectral::SpectralModel;
use crate::ssconv::{
    eigen_residual, f_q, intertwining_residual, poisson_bold_closed, ConvOperator,
    DifferentiableFn,
};
use crate::stoch::{mc_laplace, mc_moment, sample_inverse_exact, SimConfig};
use num_complex::Complex64;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

fn check(name: impl Into<String>, residual: f64, tol: f64) -> CheckResult {
    CheckResult {
        name: name.into(),
        residual,
        tol,
        pass: residual.is_finite() && residual <= tol,
    }
}

/// Power-action oracle across the catalog kernels, base and bold flavors.
pub fn power_suite(tol_scale: f64) -> Result<Vec<CheckResult>> {
    let tol = 1e-8 * tol_scale;
    let mut out = Vec::new();
    let cases: Vec<(&str, BernsteinSpec, f64)> = vec![
        ("drift", BernsteinSpec::drift(1.0), 0.5),
        ("stable", BernsteinSpec::stable(0.5), 0.5),
        ("poisson", BernsteinSpec::poisson(0.5), 0.3),
    ];
    for (name, spec, alpha) in cases {
        for bold in [false, true] {
            let op = if bold {
                ConvOperator::bold(&spec, alpha)?
            } else {
                ConvOperator::base(&spec, alpha)
            };
            for &z in &[0.5f64, 1.0, 2.0, 3.5] {
                for &t in &[0.5f64, 1.0, 2.0] {
                    let quad = op.apply(&DifferentiableFn::power(z), t)?;
                    let oracle = op.power_action(Complex64::new(z, 0.0), t)?.re;
                    let r = (quad - oracle).abs() / oracle.abs().max(1.0);
                    out.push(check(
                        format!(
                            "power {name} {} z={z} t={t}",
                            if bold { "bold" } else { "base" }
                        ),
                        r,
                        tol,
                    ));
                }
            }
        }
    }
    Ok(out)
}

/// Eigenrelation residuals for the bold operators on the stated (q, t) grid.
pub fn eigen_suite(tol_scale: f64) -> Result<Vec<CheckResult>> {
    let tol = 1e-6 * tol_scale;
    let mut out = Vec::new();
    for (name, spec, alpha) in [
        ("drift", BernsteinSpec::drift(1.0), 0.5),
        ("stable", BernsteinSpec::stable(0.5), 0.5),
    ] {
        let gml = GMLEvaluator::new(&spec, alpha);
        let op = ConvOperator::bold(&spec, alpha)?;
        for &q in &[-2.0f64, -1.0, 1.0] {
            for &t in &[0.5f64, 1.0, 2.0] {
                let r = eigen_residual(&gml, &op, q, t)?;
                out.push(check(format!("eigen {name} q={q} t={t}"), r, tol));
            }
        }
    }
    // Poisson through its closed-form operator, radius-limited grid
    let spec = BernsteinSpec::poisson(0.5);
    let alpha = 0.3;
    let gml = GMLEvaluator::new(&spec, alpha);
    for &q in &[-0.5f64, 0.5] {
        for &t in &[0.5f64, 1.0, 2.0] {
            if (q * t.powf(alpha)).abs() > 0.9 {
                continue;
            }
            let fq = f_q(&gml, q, 1e-12)?;
            let lhs = poisson_bold_closed(&fq, 0.5, alpha, t)?;
            let rhs = q * fq.eval(t);
            let r = (lhs - rhs).abs() / rhs.abs().max(1.0);
            out.push(check(format!("eigen poisson q={q} t={t}"), r, tol));
        }
    }
    Ok(out)
}

/// Dilation-scaling residuals on non-power test functions.
pub fn scaling_suite(tol_scale: f64) -> Result<Vec<CheckResult>> {
    let tol = 1e-7 * tol_scale;
    let mut out = Vec::new();
    for (name, spec, alpha) in [
        ("stable", BernsteinSpec::stable(0.5), 0.5),
        ("poisson", BernsteinSpec::poisson(0.5), 0.3),
        ("drift", BernsteinSpec::drift(1.0), 0.5),
    ] {
        let op = ConvOperator::bold(&spec, alpha)?;
        for &(c, t) in &[(1.5f64, 0.8f64), (2.0, 1.0), (0.7, 1.3)] {
            let r = op.scaling_check(&DifferentiableFn::exp(), c, t)?;
            let scale = op.apply(&DifferentiableFn::exp(), c * t)?.abs().max(1.0);
            out.push(check(
                format!("scaling {name} c={c} t={t}"),
                r / scale,
                tol,
            ));
        }
    }
    // intertwining rides along: it is the other structural operator identity
    let spec = BernsteinSpec::stable(0.5);
    for &t in &[1.0f64, 2.0] {
        let r = intertwining_residual(&spec, 0.5, &DifferentiableFn::power(-0.25), t)?;
        out.push(check(format!("intertwining stable t={t}"), r, tol));
    }
    Ok(out)
}

/// Biorthogonality matrices for all four spectral models, m, n <= 10.
pub fn biorth_suite(tol_scale: f64) -> Result<Vec<CheckResult>> {
    let tol = 1e-8 * tol_scale;
    let mut out = Vec::new();
    let models = [
        SpectralModel::laguerre(),
        SpectralModel::jacobi(3.0, 1.0)?,
        SpectralModel::gen_laguerre(2.0)?,
        SpectralModel::gen_jacobi(5.5, 2.5)?,
    ];
    for model in models {
        let rule = model.quad(256);
        let mut worst = 0.0f64;
        for mm in 0..=10usize {
            for n in 0..=10usize {
                let g: f64 = rule
                    .iter()
                    .map(|&(x, w)| w * model.p(mm, x) * model.v(n, x))
                    .sum();
                let want = if mm == n { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        out.push(check(format!("biorth {model:?}"), worst, tol));
    }
    Ok(out)
}

/// Monte Carlo moments and Laplace values against the analytic oracles
/// (statistical tolerances: multiples of the standard error).
pub fn mc_suite(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let cfg = SimConfig::new(seed).with_samples(100_000);
    let spec = BernsteinSpec::stable(0.5);
    let gml = GMLEvaluator::new(&spec, 0.5);
    let samples = sample_inverse_exact(&spec, 0.5, 1.0, &cfg)?;

    let m1 = mc_moment(&samples, 1);
    let want = gml
        .mellin_of_inverse(Complex64::new(1.0, 0.0), 1.0)?
        .re;
    out.push(check(
        "mc stable mean vs 1/Gamma(1.5)",
        (m1.mean - want).abs(),
        4.0 * m1.std_error,
    ));

    let m2 = mc_moment(&samples, 2);
    let want2 = gml
        .mellin_of_inverse(Complex64::new(2.0, 0.0), 1.0)?
        .re;
    out.push(check(
        "mc stable second moment",
        (m2.mean - want2).abs(),
        4.0 * m2.std_error,
    ));

    let m3 = mc_moment(&samples, 3);
    let want3 = gml
        .mellin_of_inverse(Complex64::new(3.0, 0.0), 1.0)?
        .re;
    out.push(check(
        "mc stable third moment",
        (m3.mean - want3).abs(),
        4.0 * m3.std_error,
    ));

    for &q in &[0.25f64, 0.5, 1.0, 2.0] {
        let e = mc_laplace(&samples, q);
        let oracle = gml.eval(-q, 1e-11)?.real();
        out.push(check(
            format!("mc stable laplace q={q}"),
            (e.mean - oracle).abs(),
            4.0 * e.std_error,
        ));
    }

    // drift: deterministic
    let dsamples = sample_inverse_exact(&BernsteinSpec::drift(1.0), 0.5, 1.0, &cfg)?;
    let e = mc_laplace(&dsamples, 1.0);
    out.push(check(
        "mc drift laplace exact",
        (e.mean - 0.13533528323661269).abs(),
        1e-12,
    ));
    Ok(out)
}

/// Cauchy-equation residuals on single-mode data.
pub fn cauchy_suite(tol_scale: f64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let spec = BernsteinSpec::stable(0.5);
    let gml = GMLEvaluator::new(&spec, 0.5);
    let op = ConvOperator::bold(&spec, 0.5)?;
    for (model, x, tol) in [
        (SpectralModel::laguerre(), 0.5, 1e-6),
        (SpectralModel::jacobi(3.0, 1.0)?, 0.5, 1e-6),
        (SpectralModel::gen_laguerre(2.0)?, 0.5, 1e-5),
    ] {
        let me = model.clone();
        let f = move |y: f64| me.p(1, y);
        let r = model.cauchy_residual(&gml, &op, &f, 1.0, x, 4)?;
        out.push(check(
            format!("cauchy {model:?} mode 1"),
            r,
            tol * tol_scale,
        ));
    }
    // drift spec against the classical semigroup identity
    let dspec = BernsteinSpec::drift(1.0);
    let dgml = GMLEvaluator::new(&dspec, 0.5);
    let dop = ConvOperator::bold(&dspec, 0.5)?;
    let model = SpectralModel::laguerre();
    let me = model.clone();
    let f = move |y: f64| me.p(1, y) - 0.3 * me.p(2, y);
    let r = model.cauchy_residual(&dgml, &dop, &f, 1.0, 0.5, 4)?;
    out.push(check("cauchy laguerre drift poly", r, 1e-8 * tol_scale));
    Ok(out)
}

/// All suites.
pub fn all_suites(seed: u64, tol_scale: f64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    out.extend(power_suite(tol_scale)?);
    out.extend(eigen_suite(tol_scale)?);
    out.extend(scaling_suite(tol_scale)?);
    out.extend(biorth_suite(tol_scale)?);
    out.extend(mc_suite(seed)?);
    out.extend(cauchy_suite(tol_scale)?);
    Ok(out)
}

pub fn suite_by_name(name: &str, seed: u64, tol_scale: f64) -> Result<Vec<CheckResult>> {
    match name {
        "power" => power_suite(tol_scale),
        "eigen" => eigen_suite(tol_scale),
        "scaling" => scaling_suite(tol_scale),
        "biorth" => biorth_suite(tol_scale),
        "mc" => mc_suite(seed),
        "cauchy" => cauchy_suite(tol_scale),
        "all" => all_suites(seed, tol_scale),
        other => Err(crate::error::Error::Config(format!(
            "unknown suite '{other}' (power|eigen|scaling|biorth|mc|cauchy|all)"
        ))),
    }
}
