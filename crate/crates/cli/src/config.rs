use clap::{Args, ValueEnum};
use ebit::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const SEED_ENV: &str = "EBIT_SEED";
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum CommandName {
    Entropy,
    Schmidt,
    Concentrate,
    Dilute,
    Monotone,
    Measures,
    Ratio,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A complete, serializable description of one run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    /// `start:stop:step`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// `AxB`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Fields set in `over` replace those in `self`.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            command: over.command.or(self.command),
            seed: over.seed.or(self.seed),
            output_path: over.output_path.or(self.output_path),
            format: over.format.or(self.format),
            state: over.state.or(self.state),
            p: over.p.or(self.p),
            k: over.k.or(self.k),
            n: over.n.or(self.n),
            rates: over.rates.or(self.rates),
            trials: over.trials.or(self.trials),
            dims: over.dims.or(self.dims),
            depth: over.depth.or(self.depth),
        }
    }

    /// Flag or config seed, then `EBIT_SEED`, then the built-in default.
    pub fn resolved_seed(&self) -> Result<u64> {
        if let Some(s) = self.seed {
            return Ok(s);
        }
        match std::env::var(SEED_ENV) {
            Ok(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::Validation(format!("{SEED_ENV}={v:?} is not a 64-bit unsigned integer"))),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    pub fn require<'a, T>(&self, v: &'a Option<T>, flag: &str) -> Result<&'a T> {
        v.as_ref()
            .ok_or_else(|| Error::Validation(format!("missing --{flag}")))
    }

    pub fn dims(&self) -> Result<Option<(usize, usize)>> {
        self.dims.as_deref().map(parse_dims).transpose()
    }
}

pub fn parse_dims(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Validation(format!("dims {s:?} is not of the form AxB"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let a: usize = a.trim().parse().map_err(|_| bad())?;
    let b: usize = b.trim().parse().map_err(|_| bad())?;
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn parse_k_list(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::Validation(format!("{x:?} is not a copy count")))
        })
        .collect()
}

pub fn parse_rates(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::Validation(format!("rates {s:?} is not start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|x| x.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    ebit::asymptotic::rate_grid(nums[0], nums[1], nums[2])
}

/// Flags shared by every subcommand; each command reads the ones it needs.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// State file (JSON)
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Smaller squared Schmidt coefficient of the two-term source
    #[arg(long)]
    pub p: Option<f64>,
    /// Copy count or comma-separated list
    #[arg(long)]
    pub k: Option<String>,
    /// Copies for dilution
    #[arg(long)]
    pub n: Option<u64>,
    /// Rate grid start:stop:step
    #[arg(long)]
    pub rates: Option<String>,
    #[arg(long)]
    pub trials: Option<u64>,
    /// Fixed local dimensions AxB
    #[arg(long)]
    pub dims: Option<String>,
    /// Protocol depth (maximum for sweeps)
    #[arg(long)]
    pub depth: Option<usize>,
    /// Seed; defaults to $EBIT_SEED, then 1
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RunConfig JSON; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Flags {
    pub fn resolve(self, command: Option<CommandName>) -> Result<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let (Some(want), Some(have)) = (command, base.command) {
            if want != have {
                return Err(Error::Validation(format!(
                    "config is for `{}`, not `{}`",
                    have.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default(),
                    want.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default(),
                )));
            }
        }
        let over = RunConfig {
            command,
            seed: self.seed,
            output_path: self.out,
            format: self.format,
            state: self.state,
            p: self.p,
            k: self.k.as_deref().map(parse_k_list).transpose()?,
            n: self.n,
            rates: self.rates,
            trials: self.trials,
            dims: self.dims,
            depth: self.depth,
        };
        let cfg = base.overlay(over);
        if cfg.command.is_none() {
            return Err(Error::Validation("no command given and none in the config".into()));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let file = RunConfig {
            command: Some(CommandName::Ratio),
            p: Some(0.1),
            k: Some(vec![1, 2]),
            ..RunConfig::default()
        };
        let over = RunConfig {
            p: Some(0.3),
            ..RunConfig::default()
        };
        let merged = file.overlay(over);
        assert_eq!(merged.p, Some(0.3));
        assert_eq!(merged.k, Some(vec![1, 2]));
    }

    #[test]
    fn config_roundtrip() {
        let cfg = RunConfig {
            command: Some(CommandName::Dilute),
            seed: Some(9),
            format: Some(Format::Json),
            rates: Some("0:1:0.5".into()),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(text, r#"{"command":"dilute","seed":9,"format":"json","rates":"0:1:0.5"}"#);
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), cfg);
        assert!(serde_json::from_str::<RunConfig>(r#"{"colour":1}"#).is_err());
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_dims("3x4").unwrap(), (3, 4));
        assert!(parse_dims("3x0").is_err());
        assert!(parse_dims("34").is_err());
        assert_eq!(parse_k_list("1, 10,100").unwrap(), vec![1, 10, 100]);
        assert!(parse_k_list("1,a").is_err());
        assert_eq!(parse_rates("0:1:0.25").unwrap().len(), 5);
        assert!(parse_rates("0:1").is_err());
    }
}
