//! Experiment configuration: a flat `key = value` file merged with
//! command-line overrides, validated before anything runs.
//!
//! ```text
//! # comments start with '#'
//! signal = damped
//! interval = -1 1
//! n_points = 8
//! schemes = chebyshev,equispaced
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::adc::SplitPolicy;
use crate::bench::{Scheme, DEFAULT_GRID_DENSITY, MIN_GRID_DENSITY};
use crate::cheb::Interval;
use crate::error::{Error, Result};
use crate::signal::SignalSpec;

/// Environment variable naming the directory relative output paths resolve
/// against.
pub const OUT_DIR_ENV: &str = "CHEBARCH_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::UnknownTag {
                kind: "output format",
                value: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub signal: SignalSpec,
    pub interval: Interval,
    pub n_points: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub schemes: Vec<Scheme>,
    pub error_target_percent: Option<f64>,
    pub grid_density: usize,
    pub bits: u32,
    pub t_sar: f64,
    pub policy: SplitPolicy,
    pub baseline_points: Option<usize>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            signal: SignalSpec::harmonic(),
            interval: Interval::UNIT,
            n_points: 8,
            n_min: 2,
            n_max: 16,
            schemes: Scheme::ALL.to_vec(),
            error_target_percent: None,
            grid_density: DEFAULT_GRID_DENSITY,
            bits: 8,
            t_sar: 2.0,
            policy: SplitPolicy::BothAdjacent,
            baseline_points: None,
            format: OutputFormat::Csv,
            output: None,
            jobs: 1,
        }
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::InvalidParameter {
            field: "config",
            reason: format!("line {}: expected `key = value`", lineno + 1),
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}

fn parse_field<T: FromStr>(field: &'static str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| invalid(field, format!("cannot parse `{value}`")))
}

fn parse_interval(value: &str) -> Result<Interval> {
    let parts: Vec<&str> = value.split(|c: char| c == ',' || c.is_whitespace()).filter(|p| !p.is_empty()).collect();
    if parts.len() != 2 {
        return Err(invalid("interval", format!("expected `lo hi`, got `{value}`")));
    }
    let lo: f64 = parse_field("interval", parts[0])?;
    let hi: f64 = parse_field("interval", parts[1])?;
    Interval::new(lo, hi).map_err(|e| invalid("interval", e.to_string()))
}

impl ExperimentConfig {
    /// Builds a config from key-value pairs on top of the defaults.
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (key, value) in map {
            match key.as_str() {
                "signal" => {
                    cfg.signal = value.parse().map_err(|e: Error| invalid("signal", e.to_string()))?
                }
                "interval" => cfg.interval = parse_interval(value)?,
                "n_points" => cfg.n_points = parse_field("n_points", value)?,
                "n_min" => cfg.n_min = parse_field("n_min", value)?,
                "n_max" => cfg.n_max = parse_field("n_max", value)?,
                "schemes" => {
                    cfg.schemes = value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.parse().map_err(|e: Error| invalid("schemes", e.to_string())))
                        .collect::<Result<_>>()?
                }
                "error_target_percent" => cfg.error_target_percent = Some(parse_field("error_target_percent", value)?),
                "grid_density" => cfg.grid_density = parse_field("grid_density", value)?,
                "bits" => cfg.bits = parse_field("bits", value)?,
                "t_sar" => cfg.t_sar = parse_field("t_sar", value)?,
                "policy" => cfg.policy = value.parse().map_err(|e: Error| invalid("policy", e.to_string()))?,
                "baseline_points" => cfg.baseline_points = Some(parse_field("baseline_points", value)?),
                "format" => cfg.format = value.parse().map_err(|e: Error| invalid("format", e.to_string()))?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "jobs" => cfg.jobs = parse_field("jobs", value)?,
                other => {
                    return Err(Error::UnknownTag {
                        kind: "config key",
                        value: other.to_string(),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` (when given) and applies `overrides` on top.
    pub fn load(path: Option<&Path>, overrides: &BTreeMap<String, String>) -> Result<Self> {
        let mut map = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| invalid("config", format!("{}: {e}", p.display())))?;
                parse_kv(&text)?
            }
            None => BTreeMap::new(),
        };
        map.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        Self::from_map(&map)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < 2 {
            return Err(invalid("n_points", format!("must be at least 2, got {}", self.n_points)));
        }
        if self.n_min < 2 {
            return Err(invalid("n_min", format!("must be at least 2, got {}", self.n_min)));
        }
        if self.n_max < self.n_min {
            return Err(invalid("n_max", format!("must be at least n_min = {}", self.n_min)));
        }
        if self.schemes.is_empty() {
            return Err(invalid("schemes", "at least one scheme is required"));
        }
        if let Some(t) = self.error_target_percent {
            if t.is_nan() || t <= 0.0 {
                return Err(invalid("error_target_percent", format!("must be positive, got {t}")));
            }
        }
        if self.grid_density < MIN_GRID_DENSITY {
            return Err(invalid(
                "grid_density",
                format!("must be at least {MIN_GRID_DENSITY}, got {}", self.grid_density),
            ));
        }
        if !(1..=62).contains(&self.bits) {
            return Err(invalid("bits", format!("must be in 1..=62, got {}", self.bits)));
        }
        if self.t_sar.is_nan() || self.t_sar < 0.0 {
            return Err(invalid("t_sar", format!("must be non-negative, got {}", self.t_sar)));
        }
        if self.baseline_points == Some(0) {
            return Err(invalid("baseline_points", "must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs", "must be at least 1"));
        }
        Ok(())
    }

    /// Output path with relative paths placed under `$CHEBARCH_OUT_DIR` when set.
    pub fn resolved_output(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|p| resolve_output(p))
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_are_valid() {
        assert!(ExperimentConfig::default().validate().is_ok());
        assert_eq!(ExperimentConfig::from_map(&BTreeMap::new()).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn kv_file() {
        let text = "# sweep\nsignal = damped\ninterval = 0 2  # shifted\n\nschemes = equispaced\nt_sar=inf\n";
        let cfg = ExperimentConfig::from_map(&parse_kv(text).unwrap()).unwrap();
        assert_eq!(cfg.signal, SignalSpec::damped());
        assert_eq!(cfg.interval, Interval::new(0.0, 2.0).unwrap());
        assert_eq!(cfg.schemes, vec![Scheme::Equispaced]);
        assert!(cfg.t_sar.is_infinite());
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("grid_density", "10"),
            ("interval", "1 1"),
            ("n_points", "x"),
            ("bits", "0"),
            ("t_sar", "-1"),
            ("schemes", "spline"),
            ("jobs", "0"),
        ];
        for (key, value) in cases {
            let err = ExperimentConfig::from_map(&map(&[(key, value)])).unwrap_err();
            match err {
                Error::InvalidParameter { field, .. } => assert_eq!(field, key),
                other => panic!("{key}: unexpected {other:?}"),
            }
        }
        assert!(matches!(
            ExperimentConfig::from_map(&map(&[("colour", "red")])),
            Err(Error::UnknownTag { .. })
        ));
        assert!(parse_kv("no equals sign").is_err());
    }

    #[test]
    fn overrides_win() {
        let dir = std::env::temp_dir().join(format!("chebarch-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("exp.cfg");
        std::fs::write(&path, "n_points = 12\nbits = 10\n").unwrap();
        let cfg = ExperimentConfig::load(Some(&path), &map(&[("bits", "6")])).unwrap();
        assert_eq!((cfg.n_points, cfg.bits), (12, 6));
        std::fs::remove_dir_all(dir).unwrap();
    }
}
