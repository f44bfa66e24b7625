//! Simulation config files: one `key=value` per line, `#` comments.
//!
//! Required keys: `test_kind` (FET|BET), `m`, `pi0`, `B`, `alpha`, `seed`,
//! `procedures` (comma-separated ids), and `N` for FET. Optional: `rho`
//! (default 0), and rate overrides `p_null`/`p_alt` (FET, defaults 0.1/0.2)
//! or `lambda_null`/`lambda_alt` (BET, defaults 2/10), interpreted as the
//! shared rate under the null and the group-2 rate under the alternative.

use anyhow::{bail, Context, Result};
use discrete_fwer::{ProcedureId, SimConfig, TestKind};
use std::collections::BTreeMap;
use std::path::Path;

const KNOWN_KEYS: &[&str] = &[
    "test_kind", "m", "pi0", "N", "rho", "B", "alpha", "seed", "procedures",
    "p_null", "p_alt", "lambda_null", "lambda_alt",
];

pub fn parse_sim_config(path: &Path) -> Result<(SimConfig, Vec<ProcedureId>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    parse_config(&text)
}

fn parse_config(text: &str) -> Result<(SimConfig, Vec<ProcedureId>)> {
    let mut entries = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("line {}: expected key=value, got {line:?}", idx + 1);
        };
        let key = key.trim();
        if !KNOWN_KEYS.contains(&key) {
            bail!("unknown key: {key}");
        }
        if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
            bail!("duplicate key: {key}");
        }
    }

    let required = |key: &str| -> Result<&str> {
        entries
            .get(key)
            .map(String::as_str)
            .with_context(|| format!("missing key: {key}"))
    };
    fn parsed<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        value
            .parse()
            .map_err(|e| anyhow::anyhow!("key {key}: invalid value {value:?} ({e})"))
    }
    let optional = |key: &str, default: f64| -> Result<f64> {
        match entries.get(key) {
            Some(v) => parsed(key, v),
            None => Ok(default),
        }
    };

    let test_kind: TestKind = parsed("test_kind", required("test_kind")?)?;
    let m: usize = parsed("m", required("m")?)?;
    let pi0: f64 = parsed("pi0", required("pi0")?)?;
    let replicates: u64 = parsed("B", required("B")?)?;
    let alpha: f64 = parsed("alpha", required("alpha")?)?;
    let seed: u64 = parsed("seed", required("seed")?)?;
    let rho: f64 = optional("rho", 0.0)?;

    let mut config = match test_kind {
        TestKind::Fet => {
            let n: u64 = parsed("N", required("N")?)?;
            let p_null = optional("p_null", 0.1)?;
            let p_alt = optional("p_alt", 0.2)?;
            let mut cfg = SimConfig::fet(m, pi0, n);
            cfg.null_rates = (p_null, p_null);
            cfg.alt_rates = (p_null, p_alt);
            cfg
        }
        TestKind::Bet => {
            let l_null = optional("lambda_null", 2.0)?;
            let l_alt = optional("lambda_alt", 10.0)?;
            let mut cfg = SimConfig::bet(m, pi0, rho);
            cfg.null_rates = (l_null, l_null);
            cfg.alt_rates = (l_null, l_alt);
            cfg
        }
    };
    config.rho = rho;
    config.replicates = replicates;
    config.alpha = alpha;
    config.seed = seed;
    config.validate().map_err(|e| anyhow::anyhow!("{e}"))?;

    let procedures = required("procedures")?
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<ProcedureId>()
                .map_err(|e| anyhow::anyhow!("key procedures: {e}"))
        })
        .collect::<Result<Vec<_>>>()?;
    if procedures.is_empty() {
        bail!("key procedures: empty list");
    }
    Ok((config, procedures))
}
