//! Monte Carlo layer: exact samplers for the right-inverse of the Lamperti
//! process (drift and stable families) and a path sampler that simulates the
//! subordinator on a grid, builds the exponential functional and reads off
//! the first passage.
//!
//! Determinism contract: streams are keyed by (seed, sample index) through
//! ChaCha8 counter streams, so estimates are bit-identical however the sample
//! range is partitioned across threads.

use crate::bernstein::{BernsteinSpec, Kind};
use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    pub seed: u64,
    pub n_samples: usize,
    /// time step of the subordinator grid (path sampler)
    pub dt: f64,
    /// small-jump threshold delta; `None` picks the largest delta whose
    /// neglected variance is below 1e-6 per unit time
    pub jump_cutoff: Option<f64>,
    /// entrance-law proxy: the process starts at eps instead of 0
    pub eps_start: f64,
    /// maximum simulated subordinator clock time
    pub horizon: f64,
}

impl SimConfig {
    pub fn new(seed: u64) -> Self {
        SimConfig {
            seed,
            n_samples: 10_000,
            dt: 1e-3,
            jump_cutoff: None,
            eps_start: 1e-3,
            horizon: 400.0,
        }
    }

    pub fn with_samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_start = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dt <= 0.0 || self.eps_start <= 0.0 || self.n_samples == 0 {
            return Err(Error::Config(
                "dt, eps_start must be positive and n_samples >= 1".into(),
            ));
        }
        if let Some(d) = self.jump_cutoff {
            if d <= 0.0 {
                return Err(Error::Config("jump_cutoff must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
}

fn estimate(values: impl Iterator<Item = f64>) -> McEstimate {
    let vals: Vec<f64> = values.collect();
    let n = vals.len();
    let mean = vals.iter().sum::<f64>() / n as f64;
    let var = if n > 1 {
        vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0)
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n,
    }
}

/// Mean and standard error of e^{-q zeta} over a sample set.
pub fn mc_laplace(samples: &[f64], q: f64) -> McEstimate {
    assert!(q >= 0.0);
    estimate(samples.iter().map(|&z| (-q * z).exp()))
}

/// k-th sample moment.
pub fn mc_moment(samples: &[f64], k: u32) -> McEstimate {
    assert!(k >= 1);
    estimate(samples.iter().map(|&z| z.powi(k as i32)))
}

fn stream(seed: u64, idx: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(idx);
    rng
}

fn clamp_open01(u: f64) -> f64 {
    u.clamp(1e-15, 1.0 - 1e-15)
}

/// Standard positive alpha-stable variate (E e^{-u S} = e^{-u^alpha}),
/// Chambers-Mallows-Stuck construction.
fn sample_positive_stable(alpha: f64, rng: &mut ChaCha8Rng) -> f64 {
    let u = clamp_open01(rng.random::<f64>()) * PI;
    let w = -clamp_open01(rng.random::<f64>()).ln();
    let s1 = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    let s2 = (((1.0 - alpha) * u).sin() / w).powf((1.0 - alpha) / alpha);
    s1 * s2
}

/// Exact sampler for zeta_t. Drift: deterministic t^alpha/(b alpha).
/// Stable (matching index): zeta_t = (t/S)^alpha with S positive stable.
pub fn sample_inverse_exact(
    spec: &BernsteinSpec,
    alpha: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    assert!(t > 0.0 && alpha > 0.0 && alpha < 1.0);
    match &spec.kind {
        Kind::Drift => {
            let z = t.powf(alpha) / (spec.b * alpha);
            Ok(vec![z; cfg.n_samples])
        }
        Kind::StableLamperti { index } => {
            if (index - alpha).abs() > 1e-12 {
                return Err(Error::Unsupported(
                    "exact stable sampler needs the process index to equal alpha".into(),
                ));
            }
            Ok((0..cfg.n_samples as u64)
                .into_par_iter()
                .map(|i| {
                    let mut rng = stream(cfg.seed, i);
                    let s = sample_positive_stable(alpha, &mut rng);
                    (t / s).powf(alpha)
                })
                .collect())
        }
        _ => Err(Error::Unsupported(
            "exact sampler covers drift and stable specs; use the path sampler".into(),
        )),
    }
}

/// Small-jump compensation: mean drift of the neglected jumps below delta,
/// `∫_0^delta nu-bar(y) dy - delta nu-bar(delta)` (by parts from the tail).
fn small_jump_mean(spec: &BernsteinSpec, delta: f64) -> Result<f64> {
    let q = tanh_sinh(
        |y, _, _| {
            let e = (-y).exp();
            spec.tail_om(e, -(-y).exp_m1())
        },
        0.0,
        delta,
        1e-10,
    )?;
    Ok(q.value - delta * tail_at(spec, delta))
}

/// Variance of the neglected jumps per unit time,
/// `2 ∫_0^delta y nu-bar(y) dy - delta^2 nu-bar(delta)`.
fn small_jump_var(spec: &BernsteinSpec, delta: f64) -> Result<f64> {
    let q = tanh_sinh(
        |y, _, _| {
            let e = (-y).exp();
            y * spec.tail_om(e, -(-y).exp_m1())
        },
        0.0,
        delta,
        1e-10,
    )?;
    Ok(2.0 * q.value - delta * delta * tail_at(spec, delta))
}

fn tail_at(spec: &BernsteinSpec, y: f64) -> f64 {
    let e = (-y).exp();
    spec.tail_om(e, -(-y).exp_m1())
}

fn auto_cutoff(spec: &BernsteinSpec) -> Result<f64> {
    let mut d = 1e-2;
    for _ in 0..24 {
        if small_jump_var(spec, d)? < 1e-6 {
            return Ok(d);
        }
        d *= 0.5;
    }
    Err(Error::Config(
        "could not find a jump cutoff with neglected variance < 1e-6".into(),
    ))
}

/// Inverse-transform sample of the jump law conditioned above delta:
/// solves nu-bar(y) = u nu-bar(delta). Stable has a closed form; Poisson's
/// measure is a point mass; otherwise bisection on the tail.
fn sample_jump(spec: &BernsteinSpec, delta: f64, tail_delta: f64, u: f64) -> f64 {
    match &spec.kind {
        Kind::StableLamperti { index } => {
            // (e^y - 1)^{-a} = u (e^delta - 1)^{-a}
            let base = delta.exp_m1();
            (base * u.powf(-1.0 / index)).ln_1p()
        }
        Kind::PoissonQ { q } => -q.ln(),
        _ => {
            let target = u * tail_delta;
            let mut lo = delta;
            let mut hi = delta.max(1.0);
            while tail_at(spec, hi) > target {
                lo = hi;
                hi *= 2.0;
                if hi > 1e9 {
                    break;
                }
            }
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if tail_at(spec, mid) > target {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        }
    }
}

fn sample_poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    // Knuth's product method; means here are << 1
    let l = (-mean).exp();
    let mut k = 0usize;
    let mut p = 1.0;
    loop {
        p *= clamp_open01(rng.random::<f64>());
        if p <= l {
            return k;
        }
        k += 1;
        if k > 10_000 {
            return k;
        }
    }
}

struct PathParams {
    b_eff: f64,
    rate: f64,
    delta: f64,
}

/// One subordinator path: the exponential functional
/// `I(h) = ∫_0^{tau_h} e^{alpha T_r} dr` up to the first passage over h,
/// evaluated exactly on the piecewise-linear path.
fn path_functional(
    spec: &BernsteinSpec,
    alpha: f64,
    pp: &PathParams,
    h: f64,
    cfg: &SimConfig,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let mut level = 0.0f64; // T
    let mut integral = 0.0f64;
    let mut clock = 0.0f64;
    let tail_delta = tail_at(spec, pp.delta);

    // advance through one linear segment of length len; returns true when h crossed
    macro_rules! drift_segment {
        ($len:expr) => {{
            let len: f64 = $len;
            let end_level = level + pp.b_eff * len;
            // integral of e^{alpha T} over the segment
            let seg = |l: f64| -> f64 {
                if pp.b_eff > 0.0 {
                    // exp_m1 keeps the increment exact for tiny drift rates
                    (alpha * level).exp() * (alpha * pp.b_eff * l).exp_m1()
                        / (alpha * pp.b_eff)
                } else {
                    l * (alpha * level).exp()
                }
            };
            if end_level > h && pp.b_eff > 0.0 {
                let lc = (h - level) / pp.b_eff;
                integral += seg(lc);
                level = h;
                true
            } else {
                integral += seg(len);
                level = end_level;
                false
            }
        }};
    }

    while clock < cfg.horizon {
        let n_jumps = if pp.rate > 0.0 {
            sample_poisson_count(pp.rate * cfg.dt, rng)
        } else {
            0
        };
        let mut times: Vec<f64> = (0..n_jumps)
            .map(|_| clamp_open01(rng.random::<f64>()) * cfg.dt)
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = 0.0f64;
        let mut done = false;
        for jt in times {
            if drift_segment!(jt - prev) {
                done = true;
                break;
            }
            let jump = sample_jump(spec, pp.delta, tail_delta, clamp_open01(rng.random::<f64>()));
            let new_level = level + jump;
            if new_level > h {
                done = true;
                level = new_level;
                break;
            }
            level = new_level;
            prev = jt;
        }
        if !done {
            done = drift_segment!(cfg.dt - prev);
        }
        if done {
            return Ok(integral);
        }
        clock += cfg.dt;
    }
    Err(Error::Horizon(format!(
        "subordinator never reached level {h} within horizon {}",
        cfg.horizon
    )))
}

/// Path sampler for zeta_t. The entrance law is approached by starting the
/// process at a small level eps: zeta_t = eps^alpha I(tau_h), h = ln(t/eps).
/// The law converges at rate O(eps^alpha), so the default start level is
/// driven to 1e-7; per-sample extrapolation schemes are avoided because they
/// are mean-correct but distort the sample law.
pub fn sample_inverse_path(
    spec: &BernsteinSpec,
    alpha: f64,
    t: f64,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    assert!(t > 0.0 && alpha > 0.0 && alpha < 1.0);
    if cfg.eps_start >= t {
        return Err(Error::Config(format!(
            "eps_start {} must be < t = {t}",
            cfg.eps_start
        )));
    }
    let eps = cfg.eps_start.min(1e-7);
    let has_jumps = !matches!(spec.kind, Kind::Drift);
    let (delta, rate, b_eff) = if has_jumps {
        let delta = match cfg.jump_cutoff {
            Some(d) => d,
            None => auto_cutoff(spec)?,
        };
        let rate = tail_at(spec, delta);
        if rate <= 0.0 {
            return Err(Error::Config(format!(
                "jump cutoff {delta} lies outside the support of the Levy tail"
            )));
        }
        let mut b_eff = spec.b + small_jump_mean(spec, delta)?;
        // quadrature residue of an exactly-compensated mean is noise
        if b_eff.abs() < 1e-13 * (spec.b + rate * delta).max(1e-3) {
            b_eff = 0.0;
        }
        (delta, rate, b_eff)
    } else {
        (1.0, 0.0, spec.b)
    };
    let pp = PathParams {
        b_eff,
        rate,
        delta,
    };

    // Arithmetic subordinators (the Poisson family: all jumps equal |ln q|)
    // admit no pathwise entrance law: the epsilon-start law oscillates
    // log-periodically, and a common-path Richardson pair degenerates. There
    // the start level is dithered uniformly over one lattice period and the
    // raw functional returned with a small epsilon instead.
    let lattice_span = match &spec.kind {
        Kind::PoissonQ { q } if b_eff == 0.0 => -q.ln(),
        _ => 0.0,
    };
    if lattice_span > 0.0 {
        // piecewise-constant level and exact in-step jump placement make the
        // construction independent of dt; take coarse steps
        let mut cfg_eff = *cfg;
        cfg_eff.dt = cfg.dt.max(0.1);
        return (0..cfg.n_samples as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = stream(cfg.seed, i);
                let u: f64 = rng.random();
                let eps_s = eps * (-u * lattice_span).exp();
                let h = (t / eps_s).ln();
                let functional = path_functional(spec, alpha, &pp, h, &cfg_eff, &mut rng)?;
                Ok(eps_s.powf(alpha) * functional)
            })
            .collect();
    }

    let h = (t / eps).ln();
    (0..cfg.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(cfg.seed, i);
            let functional = path_functional(spec, alpha, &pp, h, cfg, &mut rng)?;
            Ok(eps.powf(alpha) * functional)
        })
        .collect()
}

/// JSON summary of a sampling run.
#[derive(Debug, Clone, Serialize)]
pub struct McSummary {
    pub t: f64,
    pub mean: f64,
    pub std_error: f64,
    pub n: usize,
    pub seed: u64,
}

pub fn summarize(samples: &[f64], t: f64, seed: u64) -> McSummary {
    let e = estimate(samples.iter().copied());
    McSummary {
        t,
        mean: e.mean,
        std_error: e.std_error,
        n: e.n,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::BernsteinSpec;
    use crate::gml::GMLEvaluator;
    use approx::assert_relative_eq;

    #[test]
    fn drift_exact_is_deterministic() {
        let cfg = SimConfig::new(7).with_samples(16);
        let s = sample_inverse_exact(&BernsteinSpec::drift(1.0), 0.5, 1.0, &cfg).unwrap();
        for z in s {
            assert_relative_eq!(z, 2.0);
        }
    }

    #[test]
    fn stable_exact_first_moment() {
        let cfg = SimConfig::new(42).with_samples(100_000);
        let s = sample_inverse_exact(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg).unwrap();
        let m = mc_moment(&s, 1);
        let want = 1.1283791670955126; // 1/Gamma(1.5)
        assert!(
            (m.mean - want).abs() <= 4.0 * m.std_error,
            "mean {} vs {} (4se = {})",
            m.mean,
            want,
            4.0 * m.std_error
        );
    }

    #[test]
    fn stable_exact_self_similarity() {
        // zeta_2 should match 2^alpha zeta_1 in first two moments
        let cfg = SimConfig::new(11).with_samples(60_000);
        let s1 = sample_inverse_exact(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg).unwrap();
        let s2 = sample_inverse_exact(
            &BernsteinSpec::stable(0.5),
            0.5,
            2.0,
            &SimConfig::new(12).with_samples(60_000),
        )
        .unwrap();
        let w = 2.0f64.powf(0.5);
        for k in 1..=2 {
            let m1 = mc_moment(&s1, k);
            let m2 = mc_moment(&s2, k);
            let se = (w.powi(2 * k as i32) * m1.std_error.powi(2) + m2.std_error.powi(2)).sqrt();
            assert!(
                (m2.mean - w.powi(k as i32) * m1.mean).abs() <= 4.0 * se,
                "k={k}"
            );
        }
    }

    #[test]
    fn laplace_at_zero() {
        let s = vec![0.3, 1.7, 2.2];
        let e = mc_laplace(&s, 0.0);
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn drift_laplace_exact_value() {
        let cfg = SimConfig::new(1).with_samples(10);
        let s = sample_inverse_exact(&BernsteinSpec::drift(1.0), 0.5, 1.0, &cfg).unwrap();
        let e = mc_laplace(&s, 1.0);
        assert_relative_eq!(e.mean, 0.13533528323661269, max_relative = 1e-13);
    }

    #[test]
    fn path_sampler_drift_matches_closed_form() {
        // deterministic: zeta = (t^a - eps^a)/(a b), entrance bias ~ 6e-4
        let cfg = SimConfig::new(3).with_samples(4).with_dt(1e-4);
        let s = sample_inverse_path(&BernsteinSpec::drift(1.0), 0.5, 1.0, &cfg).unwrap();
        for z in s {
            assert!((z - 2.0).abs() < 1e-3, "z = {z}");
        }
    }

    #[test]
    fn path_vs_exact_stable() {
        let n = 4_000;
        let cfg = SimConfig::new(5).with_samples(n).with_dt(2e-3);
        let exact = sample_inverse_exact(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg).unwrap();
        let path = sample_inverse_path(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg).unwrap();
        let me = mc_moment(&exact, 1);
        let mp = mc_moment(&path, 1);
        let se = (me.std_error.powi(2) + mp.std_error.powi(2)).sqrt();
        assert!(
            (me.mean - mp.mean).abs() <= 5.0 * se,
            "exact {} vs path {} (5se = {})",
            me.mean,
            mp.mean,
            5.0 * se
        );
    }

    #[test]
    fn path_sampler_poisson_vs_series() {
        let n = 30_000;
        let cfg = SimConfig::new(9).with_samples(n).with_dt(1e-3);
        let spec = BernsteinSpec::poisson(0.5);
        let samples = sample_inverse_path(&spec, 0.5, 1.0, &cfg).unwrap();
        let e = mc_laplace(&samples, 0.5);
        let oracle = GMLEvaluator::new(&spec, 0.5).eval(-0.5, 1e-11).unwrap().real();
        assert!(
            (e.mean - oracle).abs() <= 4.0 * e.std_error.max(1e-4),
            "mc {} vs series {} (4se = {})",
            e.mean,
            oracle,
            4.0 * e.std_error
        );
    }

    #[test]
    fn determinism_across_thread_counts() {
        let cfg = SimConfig::new(123).with_samples(500);
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = pool1
            .install(|| sample_inverse_exact(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg))
            .unwrap();
        let b = pool4
            .install(|| sample_inverse_exact(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg))
            .unwrap();
        assert_eq!(a, b);
        let a = pool1
            .install(|| sample_inverse_path(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg))
            .unwrap();
        let b = pool4
            .install(|| sample_inverse_path(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn path_sampler_first_three_moments() {
        // both samplers must match the analytic moments; the exact route is
        // covered elsewhere, this pins the path route
        let cfg = SimConfig::new(21).with_samples(4_000).with_dt(2e-3);
        let spec = BernsteinSpec::stable(0.5);
        let samples = sample_inverse_path(&spec, 0.5, 1.0, &cfg).unwrap();
        let gml = GMLEvaluator::new(&spec, 0.5);
        for k in 1..=3u32 {
            let m = mc_moment(&samples, k);
            let want = gml
                .mellin_of_inverse(num_complex::Complex64::new(k as f64, 0.0), 1.0)
                .unwrap()
                .re;
            assert!(
                (m.mean - want).abs() <= 4.0 * m.std_error.max(1e-3),
                "k={k}: {} vs {} (4se {})",
                m.mean,
                want,
                4.0 * m.std_error
            );
        }
    }

    #[test]
    fn eps_robustness() {
        let base = SimConfig::new(77).with_samples(3_000).with_dt(2e-3);
        let at = |eps: f64| {
            let cfg = base.with_eps(eps);
            let s = sample_inverse_path(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg).unwrap();
            mc_moment(&s, 1)
        };
        let a = at(1e-7);
        let b = at(5e-8);
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.mean - b.mean).abs() <= 2.0 * se,
            "{} vs {} (2se = {})",
            a.mean,
            b.mean,
            2.0 * se
        );
    }

    #[test]
    fn horizon_error_when_level_unreachable() {
        let mut cfg = SimConfig::new(2).with_samples(2);
        cfg.horizon = 0.05; // far too short to reach ln(t/eps)
        let r = sample_inverse_path(&BernsteinSpec::stable(0.5), 0.5, 1.0, &cfg);
        assert!(matches!(r, Err(Error::Horizon(_))));
    }

    #[test]
    fn drift_moments_are_exact() {
        let cfg = SimConfig::new(4).with_samples(32);
        let s = sample_inverse_exact(&BernsteinSpec::drift(1.0), 0.5, 1.0, &cfg).unwrap();
        let m2 = mc_moment(&s, 2);
        assert_eq!(m2.mean, 4.0);
        assert_eq!(m2.std_error, 0.0);
    }

    #[test]
    fn bad_configs_are_rejected() {
        let spec = BernsteinSpec::poisson(0.5);
        let mut cfg = SimConfig::new(1).with_samples(4);
        cfg.jump_cutoff = Some(2.0); // beyond |ln 0.5|: no jump mass above
        assert!(matches!(
            sample_inverse_path(&spec, 0.5, 1.0, &cfg),
            Err(Error::Config(_))
        ));
        let cfg = SimConfig::new(1).with_eps(2.0);
        assert!(matches!(
            sample_inverse_path(&spec, 0.5, 1.0, &cfg),
            Err(Error::Config(_))
        ));
    }
}
