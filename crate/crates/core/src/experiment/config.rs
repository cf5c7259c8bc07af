//! Flat `key = value` experiment manifests with flag overrides.
//!
//! ```text
//! # Fixed-rep resistance run
//! experiment = resist
//! group = S3
//! n = 60
//! t = 1
//! trials = 500
//! rho = fixed:2
//! seed = 7
//! ```
//!
//! Blank lines and `#` comments are skipped. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const KEYS: &[&str] = &[
    "experiment",
    "group",
    "n",
    "t",
    "t_from",
    "trials",
    "rho",
    "method",
    "seed",
    "alpha",
    "ell",
    "output",
    "timing",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Resist,
    Moments,
    Tails,
    Cayley,
    Kappa,
    Catalog,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::Resist => "resist",
            ExperimentKind::Moments => "moments",
            ExperimentKind::Tails => "tails",
            ExperimentKind::Cayley => "cayley",
            ExperimentKind::Kappa => "kappa",
            ExperimentKind::Catalog => "catalog",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "resist" => ExperimentKind::Resist,
            "moments" => ExperimentKind::Moments,
            "tails" => ExperimentKind::Tails,
            "cayley" => ExperimentKind::Cayley,
            "kappa" => ExperimentKind::Kappa,
            "catalog" => ExperimentKind::Catalog,
            other => return Err(Error::Config(format!("unknown experiment `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoSelector {
    /// `ρ = σ^n` for catalog irrep `σ`.
    Fixed(usize),
    /// Each trial draws `ρ` from the Plancherel measure of `K^n`.
    Plancherel,
}

impl FromStr for RhoSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "plancherel" {
            return Ok(RhoSelector::Plancherel);
        }
        s.strip_prefix("fixed:")
            .and_then(|i| i.parse().ok())
            .map(RhoSelector::Fixed)
            .ok_or_else(|| {
                Error::Config(format!(
                    "rho must be `fixed:<index>` or `plancherel`, got `{s}`"
                ))
            })
    }
}

impl fmt::Display for RhoSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RhoSelector::Fixed(i) => write!(f, "fixed:{i}"),
            RhoSelector::Plancherel => f.write_str("plancherel"),
        }
    }
}

impl Serialize for RhoSelector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `auto`: pattern certificate always, exact `X_H` when the closure
/// completes, power iteration when the dimension is within the matrix-free
/// cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cert,
    Power,
    Dense,
    #[default]
    Auto,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "cert" => Method::Cert,
            "power" => Method::Power,
            "dense" => Method::Dense,
            "auto" => Method::Auto,
            other => return Err(Error::Config(format!("unknown method `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub group: String,
    pub n: Option<usize>,
    pub t: Option<usize>,
    /// First `t` of a Cayley sweep; defaults to `t`.
    pub t_from: Option<usize>,
    pub trials: Option<usize>,
    pub rho: Option<RhoSelector>,
    pub method: Method,
    pub seed: Option<u64>,
    pub alpha: Option<f64>,
    /// Threshold in the `Pr[d < ℓ]` tail bound.
    pub ell: usize,
    pub output: Option<PathBuf>,
    /// Fill `runtime_ms`; off by default so reruns are byte-identical.
    pub timing: bool,
}

/// Raw key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default)]
pub struct RawConfig(BTreeMap<String, String>);

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}`")));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }
}

fn parse_field<T: FromStr>(raw: &RawConfig, key: &str) -> Result<Option<T>> {
    raw.get(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("invalid value `{v}` for `{key}`")))
        })
        .transpose()
}

fn parse_seed(v: &str) -> Result<u64> {
    let parsed = match v.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => v.parse(),
    };
    parsed.map_err(|_| Error::Config(format!("invalid seed `{v}`")))
}

/// Merges `file` (if any) with `overrides` and validates the result for the
/// chosen experiment.
pub fn parse_config(file: Option<&RawConfig>, overrides: &RawConfig) -> Result<ExperimentConfig> {
    let mut raw = file.cloned().unwrap_or_default();
    for (k, v) in &overrides.0 {
        raw.set(k, v)?;
    }
    let experiment: ExperimentKind = parse_field(&raw, "experiment")?
        .ok_or_else(|| Error::Config("missing required field `experiment`".into()))?;
    let group_field = raw
        .get("group")
        .ok_or_else(|| Error::Config("missing required field `group`".into()))?;
    // `S3^60` is shorthand for `group = S3`, `n = 60`
    let (group, power) = match group_field.split_once('^') {
        Some((g, p)) => (
            g.to_string(),
            Some(
                p.parse::<usize>()
                    .map_err(|_| Error::Config(format!("invalid group `{group_field}`")))?,
            ),
        ),
        None => (group_field.to_string(), None),
    };
    let config = ExperimentConfig {
        experiment,
        group,
        n: parse_field(&raw, "n")?.or(power),
        t: parse_field(&raw, "t")?,
        t_from: parse_field(&raw, "t_from")?,
        trials: parse_field(&raw, "trials")?,
        rho: parse_field(&raw, "rho")?,
        method: parse_field(&raw, "method")?.unwrap_or_default(),
        seed: raw.get("seed").map(parse_seed).transpose()?,
        alpha: parse_field(&raw, "alpha")?,
        ell: parse_field(&raw, "ell")?.unwrap_or(2),
        output: raw.get("output").map(PathBuf::from),
        timing: parse_field(&raw, "timing")?.unwrap_or(false),
    };
    config.validate()?;
    Ok(config)
}

impl ExperimentConfig {
    fn validate(&self) -> Result<()> {
        let required: &[&str] = match self.experiment {
            ExperimentKind::Catalog | ExperimentKind::Kappa => &[],
            ExperimentKind::Resist => &["n", "t", "trials", "rho", "seed"],
            ExperimentKind::Moments | ExperimentKind::Tails | ExperimentKind::Cayley => {
                &["n", "t", "trials", "seed"]
            }
        };
        for key in required {
            let present = match *key {
                "n" => self.n.is_some(),
                "t" => self.t.is_some(),
                "trials" => self.trials.is_some(),
                "rho" => self.rho.is_some(),
                "seed" => self.seed.is_some(),
                _ => unreachable!(),
            };
            if !present {
                return Err(Error::Config(format!(
                    "missing required field `{key}` for experiment `{}`",
                    self.experiment.as_str()
                )));
            }
        }
        for (key, v) in [
            ("n", self.n),
            ("t", self.t),
            ("trials", self.trials),
            ("t_from", self.t_from),
        ] {
            if v == Some(0) {
                return Err(Error::Config(format!("`{key}` must be at least 1")));
            }
        }
        if let (Some(from), Some(t)) = (self.t_from, self.t) {
            if from > t {
                return Err(Error::Config(format!("t_from = {from} exceeds t = {t}")));
            }
        }
        if let Some(a) = self.alpha {
            if a.is_nan() || a <= 0.0 {
                return Err(Error::Config(format!("alpha must be positive, got {a}")));
            }
        }
        if self.ell == 0 {
            return Err(Error::Config("`ell` must be at least 1".into()));
        }
        Ok(())
    }

    pub(crate) fn need(&self, v: Option<usize>, key: &str) -> Result<usize> {
        v.ok_or_else(|| Error::Config(format!("missing required field `{key}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(pairs: &[(&str, &str)]) -> RawConfig {
        let mut raw = RawConfig::default();
        for (k, v) in pairs {
            raw.set(k, v).unwrap();
        }
        raw
    }

    #[test]
    fn file_and_overrides() {
        let file = RawConfig::parse(
            "# comment\nexperiment = resist\ngroup = S3\nn = 60\nt = 1\ntrials = 500\nrho = fixed:2\nseed = 7 # inline\n",
        )
        .unwrap();
        let c = parse_config(Some(&file), &RawConfig::default()).unwrap();
        assert_eq!(c.seed, Some(7));
        assert_eq!(c.rho, Some(RhoSelector::Fixed(2)));
        assert_eq!(c.method, Method::Auto);
        assert_eq!(c.ell, 2);
        let c = parse_config(
            Some(&file),
            &flags(&[("seed", "0x10"), ("method", "dense")]),
        )
        .unwrap();
        assert_eq!(c.seed, Some(16));
        assert_eq!(c.method, Method::Dense);
    }

    #[test]
    fn rejections() {
        assert!(RawConfig::parse("colour = red").is_err());
        assert!(RawConfig::parse("just a line").is_err());
        let missing = flags(&[
            ("experiment", "resist"),
            ("group", "S3"),
            ("n", "4"),
            ("t", "2"),
        ]);
        let err = parse_config(None, &missing).unwrap_err().to_string();
        assert!(err.contains("trials"), "{err}");
        let bad = flags(&[
            ("experiment", "catalog"),
            ("group", "S3"),
            ("method", "fast"),
        ]);
        assert!(parse_config(None, &bad).is_err());
        let zero = flags(&[
            ("experiment", "tails"),
            ("group", "S3"),
            ("n", "4"),
            ("t", "0"),
            ("trials", "1"),
            ("seed", "1"),
        ]);
        assert!(parse_config(None, &zero).is_err());
        assert!("fixed:x".parse::<RhoSelector>().is_err());
    }

    #[test]
    fn group_power_shorthand() {
        let c = parse_config(
            None,
            &flags(&[("experiment", "catalog"), ("group", "S3^60")]),
        )
        .unwrap();
        assert_eq!((c.group.as_str(), c.n), ("S3", Some(60)));
        let c = parse_config(
            None,
            &flags(&[("experiment", "catalog"), ("group", "S3^60"), ("n", "5")]),
        )
        .unwrap();
        assert_eq!(c.n, Some(5));
    }
}
