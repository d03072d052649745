//! Sweep configuration: presets, flat `key = value` files and overrides.
//!
//! A config is built in three layers: the experiment preset, then an
//! optional file, then command-line flags. Later layers win. Every layer
//! goes through [`SweepConfig::set`], so a file key and the flag of the same
//! name accept exactly the same syntax.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use locrelay_core::metrics::Fading;
use locrelay_core::PolicyKind;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}:{line}: expected `key = value`, found {text:?}")]
    Syntax { path: PathBuf, line: usize, text: String },
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value {value:?} for {key}: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn bad(key: &str, value: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::BadValue {
        key: key.to_owned(),
        value: value.to_owned(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExperimentKind {
    /// Average rate against SNR at fixed density.
    RateVsSnr,
    /// Average rate against relay density at fixed SNR.
    RateVsLambda,
    /// Outage probability against SNR.
    OutageVsSnr,
    DistCheck,
    Custom,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::RateVsSnr,
        ExperimentKind::RateVsLambda,
        ExperimentKind::OutageVsSnr,
        ExperimentKind::DistCheck,
        ExperimentKind::Custom,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ExperimentKind::RateVsSnr => "rate-vs-snr",
            ExperimentKind::RateVsLambda => "rate-vs-lambda",
            ExperimentKind::OutageVsSnr => "outage-vs-snr",
            ExperimentKind::DistCheck => "dist-check",
            ExperimentKind::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().to_ascii_lowercase();
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    AverageRate,
    Outage,
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rate" | "average-rate" => Ok(Metric::AverageRate),
            "outage" => Ok(Metric::Outage),
            other => Err(format!("unknown metric {other:?} (expected rate or outage)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub experiment: ExperimentKind,
    pub metric: Metric,
    pub snr_db: Vec<f64>,
    pub lambda: Vec<f64>,
    pub d: Vec<f64>,
    pub alpha: f64,
    /// Target rate for outage, bits/sec/Hz.
    pub rho: f64,
    /// Radius of the simulation window around the mid-point.
    pub tau: f64,
    pub policies: Vec<PolicyKind>,
    pub fading: Vec<Fading>,
    pub n_trials: u64,
    pub master_seed: u64,
    pub output_path: Option<PathBuf>,
    pub strict: bool,
}

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

impl SweepConfig {
    /// Defaults for `experiment`. The custom experiment starts with empty
    /// grids, which must be filled in before [`validate`](Self::validate)
    /// passes.
    pub fn preset(experiment: ExperimentKind) -> Self {
        let mut cfg = SweepConfig {
            experiment,
            metric: Metric::AverageRate,
            snr_db: range(0.0, 20.0, 1.0),
            lambda: vec![1.0],
            d: vec![1.0],
            alpha: 4.0,
            rho: 1.0,
            tau: 10.0,
            policies: PolicyKind::ALL.to_vec(),
            fading: Fading::ALL.to_vec(),
            n_trials: DEFAULT_TRIALS,
            master_seed: DEFAULT_SEED,
            output_path: None,
            strict: false,
        };
        match experiment {
            ExperimentKind::RateVsSnr => {}
            ExperimentKind::RateVsLambda => {
                cfg.snr_db = vec![5.0];
                cfg.lambda = vec![0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0];
                cfg.d = vec![1.0, 1.5];
            }
            ExperimentKind::OutageVsSnr => {
                cfg.metric = Metric::Outage;
                cfg.d = vec![1.0, 1.5];
                cfg.snr_db = range(0.0, 30.0, 0.5);
            }
            ExperimentKind::DistCheck => {
                cfg.snr_db = vec![5.0];
                cfg.policies = vec![PolicyKind::Optimum];
            }
            ExperimentKind::Custom => {
                cfg.snr_db.clear();
                cfg.lambda.clear();
                cfg.d.clear();
            }
        }
        cfg
    }

    /// Sets one key from its textual form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim() {
            "experiment" => self.experiment = value.parse().map_err(|e| bad(key, value, e))?,
            "metric" => self.metric = value.parse().map_err(|e| bad(key, value, e))?,
            "snr_db" | "snr-db" => self.snr_db = parse_grid(key, value)?,
            "lambda" => self.lambda = parse_grid(key, value)?,
            "d" => self.d = parse_grid(key, value)?,
            "alpha" => self.alpha = parse_real(key, value)?,
            "rho" => self.rho = parse_real(key, value)?,
            "tau" => self.tau = parse_real(key, value)?,
            "policies" => {
                self.policies = split_list(value)
                    .map(|p| p.parse::<PolicyKind>().map_err(|e| bad(key, p, e.to_string())))
                    .collect::<Result<_, _>>()?;
            }
            "fading" => self.fading = parse_fading(key, value)?,
            "trials" | "n_trials" => self.n_trials = value.parse().map_err(|_| bad(key, value, "expected a count"))?,
            "seed" | "master_seed" => {
                self.master_seed = value
                    .parse()
                    .map_err(|_| bad(key, value, "expected an unsigned integer"))?
            }
            "out" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            "strict" => self.strict = value.parse().map_err(|_| bad(key, value, "expected true or false"))?,
            other => return Err(ConfigError::UnknownKey(other.to_owned())),
        }
        Ok(())
    }

    /// Applies every `key = value` line of `text`. Blank lines and lines
    /// starting with `#` are skipped.
    pub fn apply_str(&mut self, text: &str, origin: &Path) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                path: origin.to_owned(),
                line: i + 1,
                text: raw.to_owned(),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        self.apply_str(&text, path)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |msg: String| Err(ConfigError::Invalid(msg));
        for (name, grid) in [("snr_db", &self.snr_db), ("lambda", &self.lambda), ("d", &self.d)] {
            if grid.is_empty() {
                return invalid(format!("{name} grid is empty"));
            }
        }
        if let Some(x) = self.snr_db.iter().find(|x| !x.is_finite()) {
            return invalid(format!("snr_db must be finite, got {x}"));
        }
        if let Some(x) = self.lambda.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return invalid(format!("lambda must be positive, got {x}"));
        }
        if let Some(x) = self.d.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
            return invalid(format!("d must be positive, got {x}"));
        }
        if !(self.alpha >= 2.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha must be at least 2, got {}", self.alpha));
        }
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return invalid(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return invalid(format!("tau must be positive, got {}", self.tau));
        }
        if self.policies.is_empty() {
            return invalid("no policies selected".into());
        }
        if self.fading.is_empty() {
            return invalid("no fading mode selected".into());
        }
        if self.n_trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        Ok(())
    }
}

fn split_list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

fn parse_real(key: &str, value: &str) -> Result<f64, ConfigError> {
    value.parse().map_err(|_| bad(key, value, "expected a number"))
}

/// Inclusive arithmetic range; values are rounded to 1e-9 so decimal steps
/// print cleanly.
fn range(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as u64;
    (0..=n)
        .map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9)
        .collect()
}

/// Comma list whose items are numbers or inclusive `start:stop:step` ranges.
pub fn parse_grid(key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    let mut out = Vec::new();
    for item in split_list(value) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            [x] => out.push(parse_real(key, x)?),
            [a, b, step] => {
                let (a, b, step) = (parse_real(key, a)?, parse_real(key, b)?, parse_real(key, step)?);
                if !(step > 0.0) || !(b >= a) || !(a.is_finite() && b.is_finite()) {
                    return Err(bad(key, item, "range needs start <= stop and a positive step"));
                }
                out.extend(range(a, b, step));
            }
            _ => return Err(bad(key, item, "expected a number or start:stop:step")),
        }
    }
    if out.is_empty() {
        return Err(bad(key, value, "empty list"));
    }
    Ok(out)
}

fn parse_fading(key: &str, value: &str) -> Result<Vec<Fading>, ConfigError> {
    if value.eq_ignore_ascii_case("both") {
        return Ok(Fading::ALL.to_vec());
    }
    let mut modes: Vec<Fading> = split_list(value)
        .map(|f| {
            f.parse::<Fading>()
                .map_err(|_| bad(key, f, "expected none, rayleigh or both"))
        })
        .collect::<Result<_, _>>()?;
    modes.sort();
    modes.dedup();
    if modes.is_empty() {
        return Err(bad(key, value, "empty list"));
    }
    Ok(modes)
}
