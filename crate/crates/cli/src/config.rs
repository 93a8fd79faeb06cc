//! Experiment configuration: a flat `key = value` document.
//!
//! ```text
//! # phase damping sweep point
//! model = phase_damping
//! gamma = 0.5
//! steps = 100
//! initial_coin = localized
//! output_dir = out/pd-0.5
//! ```
//!
//! Blank lines and `#` comments are ignored; values may be double-quoted.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use qw3::coin::Spinor;
use qw3::stochastic::{DEFAULT_BROKEN_LINK_RUNS, DEFAULT_UNITARY_NOISE_RUNS};
use qw3::walk::{localized_coin, nonlocalized_coin};
use qw3::Complex64;
use thiserror::Error;

pub const DEFAULT_STEPS: usize = 100;

const KEYS: &[&str] = &[
    "model",
    "steps",
    "gamma",
    "sigma_a",
    "p",
    "runs",
    "initial_coin",
    "master_seed",
    "output_dir",
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{0}` given more than once")]
    DuplicateKey(String),
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("unknown model `{0}` (expected coherent, phase_damping, amplitude_damping, unitary_noise or broken_links)")]
    UnknownModel(String),
    #[error("invalid value for `{key}`: `{value}`")]
    InvalidValue { key: &'static str, value: String },
    #[error("`{key}` = {value} is out of range: {reason}")]
    OutOfRange {
        key: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("key `{key}` does not apply to model {model}")]
    NotApplicable { key: &'static str, model: Model },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model {
    Coherent,
    PhaseDamping { gamma: f64 },
    AmplitudeDamping { gamma: f64 },
    UnitaryNoise { sigma_a: f64 },
    BrokenLinks { p: f64 },
}

impl Model {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Coherent => "coherent",
            Model::PhaseDamping { .. } => "phase_damping",
            Model::AmplitudeDamping { .. } => "amplitude_damping",
            Model::UnitaryNoise { .. } => "unitary_noise",
            Model::BrokenLinks { .. } => "broken_links",
        }
    }

    pub fn is_density(&self) -> bool {
        matches!(
            self,
            Model::PhaseDamping { .. } | Model::AmplitudeDamping { .. }
        )
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Model::UnitaryNoise { .. } | Model::BrokenLinks { .. })
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCoin {
    Localized,
    Nonlocalized,
    Custom(Spinor),
}

impl InitialCoin {
    pub fn amplitudes(&self) -> Spinor {
        match self {
            InitialCoin::Localized => localized_coin(),
            InitialCoin::Nonlocalized => nonlocalized_coin(),
            InitialCoin::Custom(v) => *v,
        }
    }
}

impl fmt::Display for InitialCoin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InitialCoin::Localized => f.write_str("localized"),
            InitialCoin::Nonlocalized => f.write_str("nonlocalized"),
            InitialCoin::Custom(v) => {
                let parts: Vec<String> = v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
                f.write_str(&parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: Model,
    pub steps: usize,
    /// Trajectory count; `None` for deterministic models.
    pub runs: Option<usize>,
    pub initial_coin: InitialCoin,
    pub master_seed: u64,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    /// Same experiment writing to a different directory.
    pub fn with_output_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output_dir = dir.into();
        self
    }
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut kv: BTreeMap<&'static str, String> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        let key = key.trim();
        let known = KEYS
            .iter()
            .copied()
            .find(|k| *k == key)
            .ok_or_else(|| ConfigError::UnknownKey(key.to_string()))?;
        let value = unquote(value.trim()).to_string();
        if kv.insert(known, value).is_some() {
            return Err(ConfigError::DuplicateKey(known.to_string()));
        }
    }

    let model_name = kv.remove("model").ok_or(ConfigError::Missing("model"))?;
    let model = match model_name.as_str() {
        "coherent" => Model::Coherent,
        "phase_damping" => Model::PhaseDamping {
            gamma: unit_interval(&mut kv, "gamma")?,
        },
        "amplitude_damping" => Model::AmplitudeDamping {
            gamma: unit_interval(&mut kv, "gamma")?,
        },
        "unitary_noise" => {
            let sigma_a = number(&mut kv, "sigma_a")?.ok_or(ConfigError::Missing("sigma_a"))?;
            if !(sigma_a >= 0.0) {
                return Err(ConfigError::OutOfRange {
                    key: "sigma_a",
                    value: sigma_a.to_string(),
                    reason: "must be non-negative",
                });
            }
            Model::UnitaryNoise { sigma_a }
        }
        "broken_links" => Model::BrokenLinks {
            p: unit_interval(&mut kv, "p")?,
        },
        other => return Err(ConfigError::UnknownModel(other.to_string())),
    };

    let steps = integer(&mut kv, "steps")?.unwrap_or(DEFAULT_STEPS as u64) as usize;
    if steps < 1 {
        return Err(ConfigError::OutOfRange {
            key: "steps",
            value: steps.to_string(),
            reason: "must be at least 1",
        });
    }

    let runs = match model {
        Model::UnitaryNoise { .. } | Model::BrokenLinks { .. } => {
            let default = if matches!(model, Model::UnitaryNoise { .. }) {
                DEFAULT_UNITARY_NOISE_RUNS
            } else {
                DEFAULT_BROKEN_LINK_RUNS
            };
            let runs = integer(&mut kv, "runs")?.map_or(default, |r| r as usize);
            if runs < 1 {
                return Err(ConfigError::OutOfRange {
                    key: "runs",
                    value: runs.to_string(),
                    reason: "must be at least 1",
                });
            }
            Some(runs)
        }
        _ => None,
    };

    let initial_coin = match kv.remove("initial_coin") {
        None => InitialCoin::Localized,
        Some(v) => parse_initial_coin(&v)?,
    };
    let master_seed = integer(&mut kv, "master_seed")?.unwrap_or(0);
    let output_dir = kv
        .remove("output_dir")
        .map_or_else(|| PathBuf::from("out"), PathBuf::from);

    // Whatever is left is a known key that the chosen model does not use.
    if let Some(key) = kv.keys().next() {
        let key = KEYS.iter().copied().find(|k| k == key).expect("known key");
        return Err(ConfigError::NotApplicable { key, model });
    }

    Ok(ExperimentConfig {
        model,
        steps,
        runs,
        initial_coin,
        master_seed,
        output_dir,
    })
}

fn unquote(v: &str) -> &str {
    v.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(v)
}

fn number(
    kv: &mut BTreeMap<&'static str, String>,
    key: &'static str,
) -> Result<Option<f64>, ConfigError> {
    match kv.remove(key) {
        None => Ok(None),
        Some(v) => match v.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Some(x)),
            _ => Err(ConfigError::InvalidValue { key, value: v }),
        },
    }
}

fn integer(
    kv: &mut BTreeMap<&'static str, String>,
    key: &'static str,
) -> Result<Option<u64>, ConfigError> {
    match kv.remove(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| ConfigError::InvalidValue { key, value: v }),
    }
}

fn unit_interval(
    kv: &mut BTreeMap<&'static str, String>,
    key: &'static str,
) -> Result<f64, ConfigError> {
    let x = number(kv, key)?.ok_or(ConfigError::Missing(key))?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(ConfigError::OutOfRange {
            key,
            value: x.to_string(),
            reason: "must lie in [0, 1]",
        })
    }
}

fn parse_initial_coin(v: &str) -> Result<InitialCoin, ConfigError> {
    match v {
        "localized" => return Ok(InitialCoin::Localized),
        "nonlocalized" => return Ok(InitialCoin::Nonlocalized),
        _ => {}
    }
    let invalid = || ConfigError::InvalidValue {
        key: "initial_coin",
        value: v.to_string(),
    };
    let parts: Vec<Complex64> = v
        .split(',')
        .map(|s| parse_complex(s.trim()).ok_or_else(invalid))
        .collect::<Result<_, _>>()?;
    let amps: Spinor = parts.try_into().map_err(|_| invalid())?;
    let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(ConfigError::OutOfRange {
            key: "initial_coin",
            value: v.to_string(),
            reason: "amplitudes must be normalized",
        });
    }
    Ok(InitialCoin::Custom(amps))
}

/// Parses `1`, `-0.5`, `0.3i`, `i`, `-i`, `0.6+0.8i`, `0.6-0.8i`.
fn parse_complex(s: &str) -> Option<Complex64> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return None;
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    // Split at the last sign that is not part of an exponent or leading.
    let split = body
        .char_indices()
        .rev()
        .find(|&(i, c)| {
            (c == '+' || c == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E')
        })
        .map(|(i, _)| i);
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re.parse::<f64>().ok()?, im))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_coherent() {
        let cfg = parse_config("model=coherent\nsteps=100\ninitial_coin=localized\n").unwrap();
        assert_eq!(cfg.model, Model::Coherent);
        assert_eq!(cfg.steps, 100);
        assert_eq!(cfg.runs, None);
        assert_eq!(cfg.initial_coin, InitialCoin::Localized);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn defaults_follow_model() {
        let cfg = parse_config("model = \"unitary_noise\"\nsigma_a = 0.1").unwrap();
        assert_eq!(cfg.runs, Some(400));
        assert_eq!(cfg.steps, 100);
        let cfg = parse_config("model = broken_links # comment\np = 0.1").unwrap();
        assert_eq!(cfg.runs, Some(1000));
    }

    #[test]
    fn missing_gamma_is_named() {
        let err = parse_config("model=phase_damping\nsteps=100").unwrap_err();
        assert_eq!(err, ConfigError::Missing("gamma"));
        assert!(err.to_string().contains("gamma"));
    }

    #[test]
    fn p_out_of_range() {
        let err = parse_config("model=broken_links\np=1.5").unwrap_err();
        assert!(matches!(err, ConfigError::OutOfRange { key: "p", .. }));
    }

    #[test]
    fn rejections() {
        assert_eq!(
            parse_config("model=coherent\ncolour=blue").unwrap_err(),
            ConfigError::UnknownKey("colour".into())
        );
        assert_eq!(
            parse_config("model=coherent\nsteps=3\nsteps=4").unwrap_err(),
            ConfigError::DuplicateKey("steps".into())
        );
        assert_eq!(
            parse_config("model=diffusion").unwrap_err(),
            ConfigError::UnknownModel("diffusion".into())
        );
        assert_eq!(
            parse_config("steps=4").unwrap_err(),
            ConfigError::Missing("model")
        );
        assert_eq!(
            parse_config("model coherent").unwrap_err(),
            ConfigError::Syntax { line: 1 }
        );
        assert!(matches!(
            parse_config("model=coherent\nsteps=0").unwrap_err(),
            ConfigError::OutOfRange { key: "steps", .. }
        ));
        assert!(matches!(
            parse_config("model=coherent\nsteps=ten").unwrap_err(),
            ConfigError::InvalidValue { key: "steps", .. }
        ));
        assert_eq!(
            parse_config("model=coherent\ngamma=0.2").unwrap_err(),
            ConfigError::NotApplicable {
                key: "gamma",
                model: Model::Coherent
            }
        );
        assert!(matches!(
            parse_config("model=unitary_noise\nsigma_a=-1").unwrap_err(),
            ConfigError::OutOfRange { key: "sigma_a", .. }
        ));
    }

    #[test]
    fn custom_coin() {
        let cfg = parse_config("model=coherent\ninitial_coin = 0.6, 0.8i, 0").unwrap();
        assert_eq!(
            cfg.initial_coin,
            InitialCoin::Custom([
                Complex64::new(0.6, 0.0),
                Complex64::new(0.0, 0.8),
                Complex64::new(0.0, 0.0)
            ])
        );
        assert!(matches!(
            parse_config("model=coherent\ninitial_coin = 1, 1, 0").unwrap_err(),
            ConfigError::OutOfRange {
                key: "initial_coin",
                ..
            }
        ));
        assert!(matches!(
            parse_config("model=coherent\ninitial_coin = 1, 0").unwrap_err(),
            ConfigError::InvalidValue {
                key: "initial_coin",
                ..
            }
        ));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("i"), Some(Complex64::new(0.0, 1.0)));
        assert_eq!(parse_complex("-i"), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_complex("0.6-0.8i"), Some(Complex64::new(0.6, -0.8)));
        assert_eq!(parse_complex("1e-3+2i"), Some(Complex64::new(1e-3, 2.0)));
        assert_eq!(parse_complex("-2"), Some(Complex64::new(-2.0, 0.0)));
        assert_eq!(parse_complex("x"), None);
    }
}
