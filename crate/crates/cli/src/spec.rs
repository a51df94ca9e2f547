//! Textual specs for fields and domains, plus the plain-text `key=value`
//! configuration file. Command-line flags always override file entries.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use nonloc_core::fields::ScalarField;
use nonloc_core::{Domain, DomainF, FieldF};

use crate::error::{CliError, Result};

/// `key=value` lines; `#` starts a comment, blank lines are ignored.
pub struct FileConfig(BTreeMap<String, String>);

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig(BTreeMap::new())
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::empty());
        };
        let text = std::fs::read_to_string(path)?;
        let mut map = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    i + 1
                ))
            })?;
            map.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(FileConfig(map))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.0.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                CliError::Config(format!("config key '{key}': cannot parse '{raw}'"))
            }),
        }
    }

    pub fn flag(&self, key: &str) -> Result<bool> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Flag value if given, else file entry, else the default.
pub fn resolve<T: FromStr + Clone>(
    flag: &Option<T>,
    file: &FileConfig,
    key: &str,
    default: T,
) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v.clone());
    }
    Ok(file.get(key)?.unwrap_or(default))
}

/// Flag value if given, else file entry, else `None`.
pub fn resolve_opt<T: FromStr + Clone>(
    flag: &Option<T>,
    file: &FileConfig,
    key: &str,
) -> Result<Option<T>> {
    if let Some(v) = flag {
        return Ok(Some(v.clone()));
    }
    file.get(key)
}

/// Field catalog entry: `name[:key=value[,key=value]...]`.
///
/// Supported names and parameters (all parameters optional):
/// - `constant` — `c` (default 0)
/// - `linear` — `slope` (1), `offset` (0); gradient along the first axis
/// - `indicator` — `height` (a number, or the literal `delta`), `radius` (0.5)
/// - `loglog` — `lambda` (3)
/// - `moser` — `n` (1000), `q` (1.5)
#[derive(Clone, Debug, PartialEq)]
pub enum FieldSpec {
    Constant { c: f64 },
    Linear { slope: f64, offset: f64 },
    Indicator { height: HeightSpec, radius: f64 },
    Loglog { lambda: f64 },
    Moser { n: u64, q: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HeightSpec {
    /// Height equal to the current level parameter `delta`.
    Delta,
    Value(f64),
}

fn kv_pairs(body: &str, spec: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for part in body.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| {
            CliError::Config(format!("field spec '{spec}': expected key=value, got '{part}'"))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn num(map: &BTreeMap<String, String>, key: &str, default: f64, spec: &str) -> Result<f64> {
    match map.get(key) {
        None => Ok(default),
        Some(raw) => raw.parse().map_err(|_| {
            CliError::Config(format!("field spec '{spec}': cannot parse {key}='{raw}'"))
        }),
    }
}

fn check_keys(map: &BTreeMap<String, String>, allowed: &[&str], spec: &str) -> Result<()> {
    for k in map.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(CliError::Config(format!(
                "field spec '{spec}': unknown parameter '{k}' (allowed: {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

impl FromStr for FieldSpec {
    type Err = CliError;

    fn from_str(spec: &str) -> Result<Self> {
        let (name, body) = match spec.split_once(':') {
            Some((n, b)) => (n, b),
            None => (spec, ""),
        };
        let map = kv_pairs(body, spec)?;
        match name {
            "constant" => {
                check_keys(&map, &["c"], spec)?;
                Ok(FieldSpec::Constant { c: num(&map, "c", 0.0, spec)? })
            }
            "linear" => {
                check_keys(&map, &["slope", "offset"], spec)?;
                Ok(FieldSpec::Linear {
                    slope: num(&map, "slope", 1.0, spec)?,
                    offset: num(&map, "offset", 0.0, spec)?,
                })
            }
            "indicator" => {
                check_keys(&map, &["height", "radius"], spec)?;
                let height = match map.get("height").map(String::as_str) {
                    None => HeightSpec::Value(1.0),
                    Some("delta") => HeightSpec::Delta,
                    Some(raw) => HeightSpec::Value(raw.parse().map_err(|_| {
                        CliError::Config(format!(
                            "field spec '{spec}': height must be a number or 'delta'"
                        ))
                    })?),
                };
                Ok(FieldSpec::Indicator {
                    height,
                    radius: num(&map, "radius", 0.5, spec)?,
                })
            }
            "loglog" => {
                check_keys(&map, &["lambda"], spec)?;
                Ok(FieldSpec::Loglog { lambda: num(&map, "lambda", 3.0, spec)? })
            }
            "moser" => {
                check_keys(&map, &["n", "q"], spec)?;
                Ok(FieldSpec::Moser {
                    n: num(&map, "n", 1000.0, spec)? as u64,
                    q: num(&map, "q", 1.5, spec)?,
                })
            }
            other => Err(CliError::Config(format!(
                "unknown field '{other}' (known: constant, linear, indicator, loglog, moser)"
            ))),
        }
    }
}

impl FieldSpec {
    /// Instantiate for dimension `d`; `delta` resolves `height=delta`.
    pub fn build(&self, d: usize, delta: f64) -> Result<FieldF> {
        Ok(match *self {
            FieldSpec::Constant { c } => ScalarField::constant(c),
            FieldSpec::Linear { slope, offset } => {
                if d == 1 {
                    ScalarField::linear_1d(slope, offset)
                } else {
                    let mut gradient = [0.0; 3];
                    gradient[0] = slope;
                    ScalarField::linear(gradient, offset)
                }
            }
            FieldSpec::Indicator { height, radius } => {
                let h = match height {
                    HeightSpec::Delta => delta,
                    HeightSpec::Value(v) => v,
                };
                ScalarField::indicator(Domain::ball0(radius, d)?, h)
            }
            FieldSpec::Loglog { lambda } => ScalarField::loglog(lambda)?,
            FieldSpec::Moser { n, q } => ScalarField::moser(n, q)?,
        })
    }
}

/// Domain spec: `a,b` for an interval (requires `d = 1`) or `ball:R` for the
/// centered ball of radius `R` in dimension `d`.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainSpec {
    Interval { a: f64, b: f64 },
    Ball { radius: f64 },
}

impl FromStr for DomainSpec {
    type Err = CliError;

    fn from_str(spec: &str) -> Result<Self> {
        if let Some(body) = spec.strip_prefix("ball:") {
            let radius: f64 = body.parse().map_err(|_| {
                CliError::Config(format!("domain spec '{spec}': cannot parse radius"))
            })?;
            return Ok(DomainSpec::Ball { radius });
        }
        let (a, b) = spec.split_once(',').ok_or_else(|| {
            CliError::Config(format!("domain spec '{spec}': expected 'a,b' or 'ball:R'"))
        })?;
        let parse = |s: &str| {
            s.trim().parse::<f64>().map_err(|_| {
                CliError::Config(format!("domain spec '{spec}': cannot parse '{s}'"))
            })
        };
        Ok(DomainSpec::Interval { a: parse(a)?, b: parse(b)? })
    }
}

impl DomainSpec {
    pub fn build(&self, d: usize) -> Result<DomainF> {
        match *self {
            DomainSpec::Interval { a, b } => {
                if d != 1 {
                    return Err(CliError::Config(format!(
                        "interval domain requires d = 1, got d = {d}"
                    )));
                }
                Ok(Domain::interval(a, b)?)
            }
            DomainSpec::Ball { radius } => Ok(Domain::ball0(radius, d)?),
        }
    }
}

/// Comma-separated list of reals (for sweep grids).
#[derive(Clone, Debug, PartialEq)]
pub struct ValueList(pub Vec<f64>);

impl FromStr for ValueList {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let vals: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|_| {
                    CliError::Config(format!("value list '{s}': cannot parse '{p}'"))
                })
            })
            .collect::<Result<_>>()?;
        if vals.is_empty() {
            return Err(CliError::Config("value list is empty".into()));
        }
        Ok(ValueList(vals))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_specs_parse() {
        assert_eq!(
            "indicator:height=delta".parse::<FieldSpec>().unwrap(),
            FieldSpec::Indicator { height: HeightSpec::Delta, radius: 0.5 }
        );
        assert_eq!(
            "linear:slope=2,offset=-1".parse::<FieldSpec>().unwrap(),
            FieldSpec::Linear { slope: 2.0, offset: -1.0 }
        );
        assert_eq!(
            "moser:n=10000".parse::<FieldSpec>().unwrap(),
            FieldSpec::Moser { n: 10_000, q: 1.5 }
        );
        assert!("linear:color=red".parse::<FieldSpec>().is_err());
        assert!("mystery".parse::<FieldSpec>().is_err());
    }

    #[test]
    fn domain_specs_parse() {
        assert_eq!(
            "0,1".parse::<DomainSpec>().unwrap(),
            DomainSpec::Interval { a: 0.0, b: 1.0 }
        );
        assert_eq!(
            "ball:0.5".parse::<DomainSpec>().unwrap(),
            DomainSpec::Ball { radius: 0.5 }
        );
        assert!("nope".parse::<DomainSpec>().is_err());
    }
}
