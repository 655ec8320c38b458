//! Python extension module `_ssfrac`: the main evaluators, samplers and the
//! spectral solver behind a thin class surface.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use ssfrac::bernstein::{BernsteinSpec, SpecString};
use ssfrac::gml::GMLEvaluator;
use ssfrac::spectral::SpectralModel;
use ssfrac::stoch::{sample_inverse_exact, sample_inverse_path, SimConfig};
use ssfrac::Complex64;

fn err(e: ssfrac::Error) -> PyErr {
    match e {
        ssfrac::Error::Parse(m) | ssfrac::Error::Config(m) => PyValueError::new_err(m),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn build_spec(phi: &str, alpha: Option<f64>) -> PyResult<BernsteinSpec> {
    let s: SpecString = phi.parse().map_err(err)?;
    s.build(alpha).map_err(err)
}

/// A Bernstein function from its spec string (drift:b=1, stable:alpha=0.5,
/// poisson:q=0.5).
#[pyclass]
struct Phi {
    spec: BernsteinSpec,
}

#[pymethods]
impl Phi {
    #[new]
    #[pyo3(signature = (spec, alpha=None))]
    fn new(spec: &str, alpha: Option<f64>) -> PyResult<Self> {
        Ok(Phi {
            spec: build_spec(spec, alpha)?,
        })
    }

    fn __repr__(&self) -> String {
        format!("Phi({})", self.spec)
    }

    fn eval(&self, u: f64) -> PyResult<f64> {
        self.spec.phi(u).map_err(err)
    }

    fn prime_at_zero(&self) -> f64 {
        self.spec.phi_prime_at_zero()
    }

    /// (in_B, in_B_diamond, abscissa)
    fn membership(&self, alpha: f64) -> (bool, bool, f64) {
        let m = self.spec.membership(alpha);
        (m.in_b, m.in_b_diamond, m.a_phi)
    }

    /// the transform z phi(z - alpha)/(z - alpha) at real z
    fn bold(&self, alpha: f64, z: f64) -> PyResult<f64> {
        self.spec.bold_phi(alpha).map_err(err)?.eval(z).map_err(err)
    }
}

/// The generalized Mittag-Leffler evaluator for a given phi and order alpha.
#[pyclass]
struct Gml {
    inner: GMLEvaluator,
}

#[pymethods]
impl Gml {
    #[new]
    #[pyo3(signature = (phi, alpha))]
    fn new(phi: &str, alpha: f64) -> PyResult<Self> {
        let spec = build_spec(phi, Some(alpha))?;
        Ok(Gml {
            inner: GMLEvaluator::new(&spec, alpha),
        })
    }

    /// (value, method, terms_or_nodes, est_error) with automatic dispatch
    #[pyo3(signature = (z, tol=1e-10))]
    fn eval(&self, z: f64, tol: f64) -> PyResult<(f64, String, usize, f64)> {
        let rep = self.inner.eval(z, tol).map_err(err)?;
        Ok((
            rep.real(),
            rep.method.to_string(),
            rep.terms_or_nodes,
            rep.est_error,
        ))
    }

    /// z-th moment of the inverse process at time t
    fn moment(&self, z: f64, t: f64) -> PyResult<f64> {
        Ok(self
            .inner
            .mellin_of_inverse(Complex64::new(z, 0.0), t)
            .map_err(err)?
            .re)
    }

    fn radius(&self) -> f64 {
        self.inner.radius()
    }
}

/// Sample the inverse process zeta_t.
#[pyfunction]
#[pyo3(signature = (phi, alpha, t, n=10_000, seed=0, sampler="exact"))]
fn sample_inverse(
    phi: &str,
    alpha: f64,
    t: f64,
    n: usize,
    seed: u64,
    sampler: &str,
) -> PyResult<Vec<f64>> {
    let spec = build_spec(phi, Some(alpha))?;
    let cfg = SimConfig::new(seed).with_samples(n);
    match sampler {
        "exact" => sample_inverse_exact(&spec, alpha, t, &cfg).map_err(err),
        "path" => sample_inverse_path(&spec, alpha, t, &cfg).map_err(err),
        other => Err(PyValueError::new_err(format!(
            "sampler must be exact|path, got '{other}'"
        ))),
    }
}

/// A spectral model from its string form (laguerre, jacobi:l1=..,mu=.., ...).
#[pyclass]
struct Model {
    inner: SpectralModel,
}

#[pymethods]
impl Model {
    #[new]
    fn new(model: &str) -> PyResult<Self> {
        let inner = parse_model_str(model).map_err(err)?;
        Ok(Model { inner })
    }

    fn __repr__(&self) -> String {
        format!("Model({:?})", self.inner)
    }

    fn eigenvalue(&self, n: usize) -> f64 {
        self.inner.eigenvalue(n)
    }

    fn p(&self, n: usize, x: f64) -> f64 {
        self.inner.p(n, x)
    }

    fn v(&self, n: usize, x: f64) -> f64 {
        self.inner.v(n, x)
    }

    /// u(t, x) over the x grid for the initial datum "mode:k" or monomial
    /// coefficients "poly:c0,c1,..."
    #[pyo3(signature = (phi, alpha, f, t, xs, modes=32))]
    fn solve(
        &self,
        phi: &str,
        alpha: f64,
        f: &str,
        t: f64,
        xs: Vec<f64>,
        modes: usize,
    ) -> PyResult<Vec<f64>> {
        let spec = build_spec(phi, Some(alpha))?;
        let gml = GMLEvaluator::new(&spec, alpha);
        let coeffs = if let Some(k) = f.strip_prefix("mode:") {
            let k: usize = k
                .parse()
                .map_err(|_| PyValueError::new_err(format!("bad mode '{k}'")))?;
            let mut c = vec![0.0; k + 1];
            c[k] = 1.0;
            c
        } else if let Some(list) = f.strip_prefix("poly:") {
            let mono: Vec<f64> = list
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|_| PyValueError::new_err(format!("bad coefficient '{v}'")))
                })
                .collect::<PyResult<_>>()?;
            let func = move |x: f64| mono.iter().rev().fold(0.0, |s, &a| s * x + a);
            self.inner.expand(&func, modes - 1).map_err(err)?
        } else {
            return Err(PyValueError::new_err(
                "initial datum must be mode:k or poly:c0,c1,...",
            ));
        };
        xs.iter()
            .map(|&x| self.inner.solve_with_coeffs(&gml, &coeffs, t, x).map_err(err))
            .collect()
    }

    /// worst |<P_m, V_n> - delta_mn| for m, n <= nmax
    #[pyo3(signature = (nmax=10))]
    fn biorth_defect(&self, nmax: usize) -> f64 {
        let rule = self.inner.quad(256);
        let mut worst = 0.0f64;
        for mm in 0..=nmax {
            for n in 0..=nmax {
                let g: f64 = rule
                    .iter()
                    .map(|&(x, w)| w * self.inner.p(mm, x) * self.inner.v(n, x))
                    .sum();
                let want = if mm == n { 1.0 } else { 0.0 };
                worst = worst.max((g - want).abs());
            }
        }
        worst
    }
}

fn parse_model_str(s: &str) -> Result<SpectralModel, ssfrac::Error> {
    let mut it = s.splitn(2, ':');
    let name = it.next().unwrap().trim().to_lowercase();
    let mut get = std::collections::HashMap::new();
    if let Some(rest) = it.next() {
        for kv in rest.split(',') {
            let mut kvit = kv.splitn(2, '=');
            let k = kvit.next().unwrap().trim().to_string();
            let v: f64 = kvit
                .next()
                .ok_or_else(|| ssfrac::Error::Parse(format!("missing '=' in '{kv}'")))?
                .trim()
                .parse()
                .map_err(|_| ssfrac::Error::Parse(format!("bad number in '{kv}'")))?;
            get.insert(k, v);
        }
    }
    let need = |m: &std::collections::HashMap<String, f64>, k: &str| {
        m.get(k)
            .copied()
            .ok_or_else(|| ssfrac::Error::Parse(format!("model '{name}' needs '{k}'")))
    };
    match name.as_str() {
        "laguerre" => Ok(SpectralModel::laguerre()),
        "jacobi" => SpectralModel::jacobi(need(&get, "l1")?, need(&get, "mu")?),
        "gen-laguerre" | "gen_laguerre" => SpectralModel::gen_laguerre(need(&get, "m")?),
        "gen-jacobi" | "gen_jacobi" => {
            SpectralModel::gen_jacobi(need(&get, "l1")?, need(&get, "m")?)
        }
        other => Err(ssfrac::Error::Parse(format!("unknown model '{other}'"))),
    }
}

/// Run a named verification suite; returns (name, residual, tol, pass) rows.
#[pyfunction]
#[pyo3(signature = (suite="all", seed=42, tol_scale=1.0))]
fn verify(suite: &str, seed: u64, tol_scale: f64) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let rows = ssfrac::verify::suite_by_name(suite, seed, tol_scale).map_err(err)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.name, r.residual, r.tol, r.pass))
        .collect())
}

#[pymodule]
fn _ssfrac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Phi>()?;
    m.add_class::<Gml>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(sample_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
