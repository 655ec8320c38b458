//! Spectral-model strings: laguerre, jacobi:l1=..,mu=.., gen-laguerre:m=..,
//! gen-jacobi:l1=..,m=..

use ssfrac::error::Error;
use ssfrac::spectral::SpectralModel;

pub fn parse_model(s: &str) -> Result<SpectralModel, Error> {
    let mut it = s.splitn(2, ':');
    let name = it.next().unwrap().trim().to_lowercase();
    let mut params = std::collections::HashMap::new();
    if let Some(rest) = it.next() {
        for kv in rest.split(',') {
            let mut kvit = kv.splitn(2, '=');
            let k = kvit.next().unwrap().trim().to_string();
            let v: f64 = kvit
                .next()
                .ok_or_else(|| Error::Parse(format!("missing '=' in '{kv}'")))?
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number in '{kv}'")))?;
            params.insert(k, v);
        }
    }
    let take = |params: &mut std::collections::HashMap<String, f64>,
                key: &str|
     -> Result<f64, Error> {
        params
            .remove(key)
            .ok_or_else(|| Error::Parse(format!("model '{name}' needs parameter '{key}'")))
    };
    let model = match name.as_str() {
        "laguerre" => SpectralModel::laguerre(),
        "jacobi" => {
            let l1 = take(&mut params, "l1")?;
            let mu = take(&mut params, "mu")?;
            SpectralModel::jacobi(l1, mu)?
        }
        "gen-laguerre" | "gen_laguerre" => {
            let m = take(&mut params, "m")?;
            SpectralModel::gen_laguerre(m)?
        }
        "gen-jacobi" | "gen_jacobi" => {
            let l1 = take(&mut params, "l1")?;
            let m = take(&mut params, "m")?;
            SpectralModel::gen_jacobi(l1, m)?
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown model '{other}' (laguerre|jacobi|gen-laguerre|gen-jacobi)"
            )))
        }
    };
    if let Some(k) = params.keys().next() {
        return Err(Error::Parse(format!(
            "unknown parameter '{k}' for model '{name}'"
        )));
    }
    Ok(model)
}
