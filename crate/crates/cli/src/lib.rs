//! Command-line surface: evaluation, simulation, solving and the named
//! verification suites, with CSV/JSON artifacts written atomically.
//!
//! Exit codes: 0 success, 1 failed verification, 2 argument/config parse
//! error, 3 evaluation/model error.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ssfrac::bernstein::{BernsteinSpec, SpecString};
use ssfrac::gml::GMLEvaluator;
use ssfrac::stoch::{sample_inverse_exact, sample_inverse_path, summarize, SimConfig};
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

mod grids;
mod modelstr;

use grids::parse_grid;
use modelstr::parse_model;

#[derive(Parser)]
#[command(
    name = "ssfrac",
    about = "Generalized fractional calculus: Mittag-Leffler-type functions, inverse self-similar processes, spectral Cauchy solvers",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the generalized Mittag-Leffler function on a grid of arguments
    GmlEval(GmlEvalArgs),
    /// Sample the inverse process and summarize moments
    Simulate(SimulateArgs),
    /// Solve the self-similar Cauchy problem on a (t, x) grid
    Solve(SolveArgs),
    /// Run the named invariant suites and print a pass/fail table
    Verify(VerifyArgs),
}

#[derive(Args)]
struct CommonOpts {
    /// Bernstein function: name[:key=value,...], e.g. drift:b=1, stable:alpha=0.5, poisson:q=0.5
    #[arg(long)]
    phi: Option<String>,
    /// order of the fractional operator, in (0,1)
    #[arg(long)]
    alpha: Option<f64>,
    /// plain-text config file (key=value per line, '#' comments); flags override
    #[arg(long)]
    config: Option<PathBuf>,
    /// output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GmlEvalArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// arguments: comma list "0,-1,-2" or range "start:stop:count"
    #[arg(long, alias = "q", allow_hyphen_values = true)]
    z: Option<String>,
    /// evaluation route; "asymptotic" is available for the stable family
    /// (its transform has the known simple pole at -1)
    #[arg(long, value_parser = ["auto", "series", "mellin-barnes", "asymptotic"])]
    method: Option<String>,
    /// relative tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// output format
    #[arg(long, value_parser = ["csv", "json"])]
    format: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// time points, comma list or range
    #[arg(long)]
    t: Option<String>,
    /// sampler route
    #[arg(long, value_parser = ["exact", "path"])]
    sampler: Option<String>,
    /// number of samples
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// write the raw samples as CSV (one column per t) to this path
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonOpts,
    /// spectral model: laguerre, jacobi:l1=..,mu=.., gen-laguerre:m=.., gen-jacobi:l1=..,m=..
    #[arg(long)]
    model: Option<String>,
    /// initial datum: mode:k or poly:c0,c1,... (monomial coefficients)
    #[arg(long)]
    f: Option<String>,
    /// time points
    #[arg(long)]
    t: Option<String>,
    /// space points
    #[arg(long)]
    x: Option<String>,
    /// truncation (number of modes)
    #[arg(long, alias = "N", default_value_t = 32)]
    modes: usize,
}

#[derive(Args)]
struct VerifyArgs {
    /// suite: eigen|power|scaling|biorth|mc|cauchy|all
    #[arg(long, default_value = "all")]
    suite: String,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// multiply every suite tolerance by this factor
    #[arg(long, default_value_t = 1.0)]
    tol_scale: f64,
}

/// Run with the given argument vector (excluding argv[0] convention handled
/// by the caller); returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            // clap help/version are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprint!("{e}");
            return 2;
        }
    };
    let result = match cli.command {
        Command::GmlEval(a) => cmd_gml_eval(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Parse(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Eval(msg)) => {
            eprintln!("error: {msg}");
            3
        }
    }
}

pub enum CliError {
    Parse(String),
    Eval(String),
}

impl From<ssfrac::Error> for CliError {
    fn from(e: ssfrac::Error) -> Self {
        match e {
            ssfrac::Error::Parse(m) => CliError::Parse(m),
            ssfrac::Error::Config(m) => CliError::Parse(m),
            other => CliError::Eval(other.to_string()),
        }
    }
}

type CliResult = Result<i32, CliError>;

/// key=value config file; '#' starts a comment; unknown keys are hard errors.
fn load_config(path: &Path, allowed: &[&str]) -> Result<HashMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read config {}: {e}", path.display())))?;
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.splitn(2, '=');
        let k = it.next().unwrap().trim().to_string();
        let v = it
            .next()
            .ok_or_else(|| {
                CliError::Parse(format!("config line {}: missing '='", lineno + 1))
            })?
            .trim()
            .to_string();
        if !allowed.contains(&k.as_str()) {
            return Err(CliError::Parse(format!(
                "config line {}: unknown key '{k}'",
                lineno + 1
            )));
        }
        map.insert(k, v);
    }
    Ok(map)
}

fn merge<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &HashMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(v) => v
            .parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Parse(format!("config key '{key}': bad value '{v}'"))),
        None => Ok(None),
    }
}

fn require<T>(v: Option<T>, what: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Parse(format!("missing required parameter: {what}")))
}

fn build_phi(s: &str, alpha: Option<f64>) -> Result<BernsteinSpec, CliError> {
    let spec: SpecString = s.parse().map_err(CliError::from)?;
    spec.build(alpha).map_err(CliError::from)
}

/// 17 significant digits, the round-trippable f64 form.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write atomically: temp file in the destination directory, then rename.
/// Nothing is left behind on failure.
fn write_artifact(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        None => {
            print!("{content}");
            Ok(())
        }
        Some(p) => {
            let dir = p.parent().filter(|d| !d.as_os_str().is_empty());
            let mut tmp = tempfile::NamedTempFile::new_in(dir.unwrap_or(Path::new(".")))
                .map_err(|e| CliError::Eval(format!("temp file: {e}")))?;
            use std::io::Write;
            tmp.write_all(content.as_bytes())
                .map_err(|e| CliError::Eval(format!("write: {e}")))?;
            tmp.persist(p)
                .map_err(|e| CliError::Eval(format!("rename into place: {e}")))?;
            Ok(())
        }
    }
}

fn cmd_gml_eval(a: GmlEvalArgs) -> CliResult {
    const KEYS: [&str; 7] = ["phi", "alpha", "z", "method", "tol", "format", "out"];
    let cfg = match &a.common.config {
        Some(p) => load_config(p, &KEYS)?,
        None => HashMap::new(),
    };
    let phi_s = require(merge(a.common.phi, &cfg, "phi")?, "--phi")?;
    let alpha = require(merge(a.common.alpha, &cfg, "alpha")?, "--alpha")?;
    let z_s = require(merge(a.z, &cfg, "z")?, "--z")?;
    let method = merge(a.method, &cfg, "method")?.unwrap_or_else(|| "auto".into());
    let tol = merge(a.tol, &cfg, "tol")?.unwrap_or(1e-10);
    let format = merge(a.format, &cfg, "format")?.unwrap_or_else(|| "csv".into());
    let out = a.common.out.or_else(|| cfg.get("out").map(PathBuf::from));

    let spec = build_phi(&phi_s, Some(alpha))?;
    let zs = parse_grid(&z_s).map_err(CliError::Parse)?;
    let g = if matches!(spec.kind, ssfrac::bernstein::Kind::StableLamperti { .. }) {
        GMLEvaluator::new(&spec, alpha)
            .with_pole(ssfrac::gml::PoleData { p: 1.0, c_p: None })
    } else {
        GMLEvaluator::new(&spec, alpha)
    };

    let mut rows = Vec::new();
    for &z in &zs {
        let rep = match method.as_str() {
            "auto" => g.eval(z, tol),
            "series" => g.eval_series(ssfrac::Complex64::new(z, 0.0), tol),
            "mellin-barnes" => g.eval_mellin_barnes(-z, tol),
            "asymptotic" => g
                .eval_asymptotic(-z, ssfrac::gml::PoleData { p: 1.0, c_p: None })
                .map(|v| ssfrac::gml::EvalReport {
                    value: ssfrac::Complex64::new(v, 0.0),
                    method: ssfrac::gml::Method::Asymptotic,
                    terms_or_nodes: 1,
                    est_error: (v * 2.0 / -z).abs(),
                }),
            other => return Err(CliError::Parse(format!("unknown method '{other}'"))),
        }
        .map_err(CliError::from)?;
        rows.push((z, rep.real(), rep.method.to_string(), rep.est_error));
    }

    let content = match format.as_str() {
        "csv" => {
            let mut s = String::from("z,value,method,est_error\n");
            for (z, v, m, e) in &rows {
                writeln!(s, "{},{},{m},{}", fmt17(*z), fmt17(*v), fmt17(*e)).unwrap();
            }
            s
        }
        "json" => {
            #[derive(Serialize)]
            struct Row {
                z: f64,
                value: f64,
                method: String,
                est_error: f64,
            }
            let rows: Vec<Row> = rows
                .into_iter()
                .map(|(z, value, method, est_error)| Row {
                    z,
                    value,
                    method,
                    est_error,
                })
                .collect();
            let doc = serde_json::json!({ "phi": phi_s, "alpha": alpha, "rows": rows });
            serde_json::to_string_pretty(&doc).unwrap() + "\n"
        }
        other => return Err(CliError::Parse(format!("unknown format '{other}'"))),
    };
    write_artifact(out.as_deref(), &content)?;
    Ok(0)
}

fn cmd_simulate(a: SimulateArgs) -> CliResult {
    const KEYS: [&str; 7] = ["phi", "alpha", "t", "sampler", "n", "seed", "out"];
    let cfg = match &a.common.config {
        Some(p) => load_config(p, &KEYS)?,
        None => HashMap::new(),
    };
    let phi_s = require(merge(a.common.phi, &cfg, "phi")?, "--phi")?;
    let alpha = require(merge(a.common.alpha, &cfg, "alpha")?, "--alpha")?;
    let t_s = require(merge(a.t, &cfg, "t")?, "--t")?;
    let sampler = merge(a.sampler, &cfg, "sampler")?.unwrap_or_else(|| "exact".into());
    let n = merge(a.n, &cfg, "n")?.unwrap_or(10_000);
    let seed = merge(a.seed, &cfg, "seed")?.unwrap_or(0);
    let out = a.common.out.or_else(|| cfg.get("out").map(PathBuf::from));

    let spec = build_phi(&phi_s, Some(alpha))?;
    let ts = parse_grid(&t_s).map_err(CliError::Parse)?;
    let sim = SimConfig::new(seed).with_samples(n);

    let mut summaries = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for &t in &ts {
        let samples = match sampler.as_str() {
            "exact" => sample_inverse_exact(&spec, alpha, t, &sim),
            "path" => sample_inverse_path(&spec, alpha, t, &sim),
            other => return Err(CliError::Parse(format!("unknown sampler '{other}'"))),
        }
        .map_err(CliError::from)?;
        summaries.push(summarize(&samples, t, seed));
        columns.push(samples);
    }

    if let Some(dump) = &a.dump {
        let mut s = ts
            .iter()
            .map(|t| format!("t={t}"))
            .collect::<Vec<_>>()
            .join(",")
            + "\n";
        for i in 0..n {
            let row = columns
                .iter()
                .map(|c| fmt17(c[i]))
                .collect::<Vec<_>>()
                .join(",");
            s.push_str(&row);
            s.push('\n');
        }
        write_artifact(Some(dump), &s)?;
    }

    let doc = serde_json::json!({
        "phi": phi_s,
        "alpha": alpha,
        "sampler": sampler,
        "seed": seed,
        "summaries": summaries,
    });
    write_artifact(
        out.as_deref(),
        &(serde_json::to_string_pretty(&doc).unwrap() + "\n"),
    )?;
    Ok(0)
}

fn cmd_solve(a: SolveArgs) -> CliResult {
    const KEYS: [&str; 8] = ["model", "phi", "alpha", "f", "t", "x", "modes", "out"];
    let cfg = match &a.common.config {
        Some(p) => load_config(p, &KEYS)?,
        None => HashMap::new(),
    };
    let model_s = require(merge(a.model, &cfg, "model")?, "--model")?;
    let phi_s = require(merge(a.common.phi, &cfg, "phi")?, "--phi")?;
    let alpha = require(merge(a.common.alpha, &cfg, "alpha")?, "--alpha")?;
    let f_s = require(merge(a.f, &cfg, "f")?, "--f")?;
    let t_s = require(merge(a.t, &cfg, "t")?, "--t")?;
    let x_s = require(merge(a.x, &cfg, "x")?, "--x")?;
    let modes = merge(Some(a.modes), &cfg, "modes")?.unwrap_or(32);
    let out = a.common.out.or_else(|| cfg.get("out").map(PathBuf::from));

    let model = parse_model(&model_s).map_err(CliError::from)?;
    let spec = build_phi(&phi_s, Some(alpha))?;
    let gml = GMLEvaluator::new(&spec, alpha);
    let ts = parse_grid(&t_s).map_err(CliError::Parse)?;
    let xs = parse_grid(&x_s).map_err(CliError::Parse)?;

    // initial datum
    let coeffs: Vec<f64> = if let Some(k) = f_s.strip_prefix("mode:") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Parse(format!("bad mode index '{k}'")))?;
        if k >= modes {
            return Err(CliError::Parse(format!(
                "mode {k} outside the truncation {modes}"
            )));
        }
        let mut c = vec![0.0; k + 1];
        c[k] = 1.0;
        c
    } else if let Some(list) = f_s.strip_prefix("poly:") {
        let mono: Vec<f64> = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Parse(format!("bad coefficient '{v}'")))
            })
            .collect::<Result<_, _>>()?;
        let f = move |x: f64| mono.iter().rev().fold(0.0, |s, &a| s * x + a);
        model.expand(&f, modes - 1).map_err(CliError::from)?
    } else {
        return Err(CliError::Parse(format!(
            "initial datum '{f_s}' is neither mode:k nor poly:c0,c1,..."
        )));
    };

    let mut csv = String::from("t");
    for &x in &xs {
        csv.push(',');
        csv.push_str(&fmt17(x));
    }
    csv.push('\n');
    for &t in &ts {
        csv.push_str(&fmt17(t));
        for &x in &xs {
            let u = model
                .solve_with_coeffs(&gml, &coeffs, t, x)
                .map_err(CliError::from)?;
            csv.push(',');
            csv.push_str(&fmt17(u));
        }
        csv.push('\n');
    }
    write_artifact(out.as_deref(), &csv)?;

    // metadata sidecar next to the grid artifact
    if let Some(p) = &out {
        let meta = serde_json::json!({
            "model": model_s,
            "phi": phi_s,
            "alpha": alpha,
            "f": f_s,
            "modes": modes,
            "quadrature": {"rule": "gauss (weight-matched)", "nodes": 256},
            "t": ts,
            "x": xs,
        });
        let mut meta_path = p.clone();
        let ext = match p.extension().and_then(|e| e.to_str()) {
            Some(e) => format!("{e}.meta.json"),
            None => "meta.json".into(),
        };
        meta_path.set_extension(ext);
        write_artifact(
            Some(&meta_path),
            &(serde_json::to_string_pretty(&meta).unwrap() + "\n"),
        )?;
    }
    Ok(0)
}

fn cmd_verify(a: VerifyArgs) -> CliResult {
    let results =
        ssfrac::verify::suite_by_name(&a.suite, a.seed, a.tol_scale).map_err(CliError::from)?;
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(8);
    println!("{:<width$}  {:>12}  {:>12}  result", "check", "residual", "tolerance");
    let mut all_pass = true;
    for r in &results {
        println!(
            "{:<width$}  {:>12.4e}  {:>12.4e}  {}",
            r.name,
            r.residual,
            r.tol,
            if r.pass { "pass" } else { "FAIL" }
        );
        all_pass &= r.pass;
    }
    println!(
        "{} checks, {} failed",
        results.len(),
        results.iter().filter(|r| !r.pass).count()
    );
    Ok(if all_pass { 0 } else { 1 })
}
