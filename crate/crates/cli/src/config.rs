//! `key = value` files for `verify`, merged under the command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use matcone::suite::SuiteConfig;

use crate::UsageError;

/// Settings of one `verify` run after merging file and flags.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifySettings {
    pub suite: SuiteConfig,
    pub out: PathBuf,
    pub json: bool,
    pub workers: Option<usize>,
    pub reproducible: bool,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            suite: SuiteConfig::default(),
            out: PathBuf::from("matcone-report.json"),
            json: false,
            workers: None,
            reproducible: false,
        }
    }
}

const KEYS: [&str; 9] = [
    "seed", "samples", "dims", "z-cap", "out", "json", "filter", "workers", "reproducible",
];

/// Parses `key = value` lines; blank lines and `#` comments are ignored and
/// `_` in keys is read as `-`.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected 'key = value'", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(UsageError(format!("config line {}: unknown key '{key}'", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

pub fn load(path: &Path) -> Result<VerifySettings, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
    apply(VerifySettings::default(), &parse_file(&text)?)
}

fn apply(mut s: VerifySettings, map: &BTreeMap<String, String>) -> Result<VerifySettings, UsageError> {
    for (key, value) in map {
        match key.as_str() {
            "seed" => s.suite.seed = parse_value(key, value)?,
            "samples" => s.suite.samples = parse_value(key, value)?,
            "dims" => s.suite.dims = parse_dims(value)?,
            "z-cap" => s.suite.z_cap = parse_value(key, value)?,
            "out" => s.out = PathBuf::from(value),
            "json" => s.json = parse_value(key, value)?,
            "filter" => s.suite.filter = Some(value.clone()),
            "workers" => s.workers = Some(parse_value(key, value)?),
            "reproducible" => s.reproducible = parse_value(key, value)?,
            _ => unreachable!("keys are checked while parsing"),
        }
    }
    Ok(s)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, UsageError> {
    value
        .parse()
        .map_err(|_| UsageError(format!("config key '{key}': cannot parse '{value}'")))
}

/// Parses `n,m,k,l[;n,m,k,l...]`.
pub fn parse_dims(text: &str) -> Result<Vec<[usize; 4]>, UsageError> {
    text.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|tuple| {
            let parts: Vec<usize> = tuple
                .split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| UsageError(format!("dims: '{tuple}' is not a list of integers")))?;
            <[usize; 4]>::try_from(parts)
                .map_err(|_| UsageError(format!("dims: '{tuple}' needs four entries n,m,k,l")))
        })
        .collect()
}
