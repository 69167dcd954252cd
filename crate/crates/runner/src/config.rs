//! Run configuration: a TOML document whose nested tables are flattened to
//! dotted keys (`params.impact`, `tolerance.rel`, `profile.kind`, ...),
//! optionally overridden by `key=value` pairs from the command line.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use abphase::Tolerance;

use crate::error::{config, Result, RunnerError};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ABPHASE_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioKind {
    AbFluxString,
    AbLattice,
    ClassicalDevice,
    NeutronPhase,
    NeutronEmf,
    IdentityCheck,
    Inertness,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 7] = [
        ScenarioKind::AbFluxString,
        ScenarioKind::AbLattice,
        ScenarioKind::ClassicalDevice,
        ScenarioKind::NeutronPhase,
        ScenarioKind::NeutronEmf,
        ScenarioKind::IdentityCheck,
        ScenarioKind::Inertness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::AbFluxString => "ab-flux-string",
            ScenarioKind::AbLattice => "ab-lattice",
            ScenarioKind::ClassicalDevice => "classical-device",
            ScenarioKind::NeutronPhase => "neutron-phase",
            ScenarioKind::NeutronEmf => "neutron-emf",
            ScenarioKind::IdentityCheck => "identity-check",
            ScenarioKind::Inertness => "inertness",
        }
    }

    /// Numeric parameters and their defaults. The defaults reproduce the
    /// canonical geometry: a = 1, R = 0.1, v = 0.01, e = -1, Φ = 2π.
    pub fn schema(self) -> &'static [(&'static str, f64)] {
        match self {
            ScenarioKind::AbFluxString => &[
                ("impact", 1.0),
                ("radius", 0.1),
                ("flux", TAU),
                ("charge", -1.0),
                ("speed", 0.01),
                ("fringe_scale", 1.0),
            ],
            ScenarioKind::AbLattice => &[
                ("impact", 1.0),
                ("radius", 0.1),
                ("flux", TAU),
                ("charge", -1.0),
                ("speed", 0.01),
                ("n_z", 512.0),
                ("n_r", 4.0),
                ("n_phi", 16.0),
                ("length_ratio", 100.0),
                ("model_tolerance", 0.01),
            ],
            ScenarioKind::ClassicalDevice => &[
                ("impact", 1.0),
                ("radius", 0.1),
                ("flux", TAU),
                ("charge", -1.0),
                ("speed", 0.01),
                ("shells", 16.0),
            ],
            ScenarioKind::NeutronPhase => &[
                ("moment", 1.0),
                ("speed", 0.01),
                ("t_start", -8.0),
                ("t_end", 8.0),
            ],
            ScenarioKind::NeutronEmf => &[
                ("radius", 1.0),
                ("length_ratio", 10.0),
                ("offset_x", 0.5),
                ("offset_z", 0.5),
                ("moment", 1.0),
                ("speed", 0.01),
                ("phi_points", 64.0),
            ],
            ScenarioKind::IdentityCheck => &[
                ("samples", 10_000.0),
                ("seed", 1.0),
                ("rs", 1.0),
                ("z0", 1.0),
                ("moment", 1.0),
                ("charge", -1.0),
                ("speed", 0.01),
            ],
            ScenarioKind::Inertness => &[
                ("atomic_distance", 1e-8),
                ("electron_distance", 1e-4),
                ("n_atoms", 1e12),
            ],
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = RunnerError;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
                config(format!(
                    "unknown scenario `{s}` (expected one of: {})",
                    names.join(", ")
                ))
            })
    }
}

/// One parameter varied over a list of values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

/// Field waveform for `neutron-phase`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Constant { value: f64 },
    Sinusoid { amplitude: f64, period: f64, phase: f64 },
    Gaussian { amplitude: f64, tau: f64, center: f64 },
    Table { times: Vec<f64>, values: Vec<f64> },
}

impl Default for ProfileSpec {
    fn default() -> Self {
        ProfileSpec::Gaussian {
            amplitude: 1.0,
            tau: 1.0,
            center: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    /// Every schema parameter, defaults filled in.
    pub parameters: BTreeMap<String, f64>,
    pub sweep: Option<Sweep>,
    pub profile: Option<ProfileSpec>,
    pub output_path: PathBuf,
    pub tolerances: Tolerance,
    /// Worker threads for sweep points; 1 runs serially.
    pub workers: usize,
    /// Fill the `wall_ms` column (breaks byte-identical reruns).
    pub timing: bool,
}

/// Value of a flattened key: a number, a list of numbers, a flag or text.
#[derive(Debug, Clone, PartialEq)]
pub enum RawValue {
    Number(f64),
    List(Vec<f64>),
    Bool(bool),
    Text(String),
}

impl RawValue {
    /// Parse a command-line `--set` value.
    pub fn parse_cli(s: &str) -> RawValue {
        let s = s.trim();
        if let Ok(x) = s.parse::<f64>() {
            return RawValue::Number(x);
        }
        if let Ok(b) = s.parse::<bool>() {
            return RawValue::Bool(b);
        }
        let trimmed = s.trim_start_matches('[').trim_end_matches(']');
        if trimmed.contains(',') {
            let parsed: std::result::Result<Vec<f64>, _> =
                trimmed.split(',').map(|p| p.trim().parse::<f64>()).collect();
            if let Ok(list) = parsed {
                return RawValue::List(list);
            }
        }
        RawValue::Text(s.to_string())
    }

    fn from_toml(key: &str, v: &toml::Value) -> Result<RawValue> {
        match v {
            toml::Value::Integer(i) => Ok(RawValue::Number(*i as f64)),
            toml::Value::Float(x) => Ok(RawValue::Number(*x)),
            toml::Value::Boolean(b) => Ok(RawValue::Bool(*b)),
            toml::Value::String(s) => Ok(RawValue::Text(s.clone())),
            toml::Value::Array(items) => items
                .iter()
                .map(|item| match item {
                    toml::Value::Integer(i) => Ok(*i as f64),
                    toml::Value::Float(x) => Ok(*x),
                    _ => Err(config(format!("`{key}` must be a list of numbers"))),
                })
                .collect::<Result<Vec<_>>>()
                .map(RawValue::List),
            other => Err(config(format!("`{key}` has unsupported value {other}"))),
        }
    }
}

/// Flat `dotted.key -> value` view of a config document.
pub type FlatConfig = BTreeMap<String, RawValue>;

fn flatten_into(prefix: &str, table: &toml::Table, out: &mut FlatConfig) -> Result<()> {
    for (k, v) in table {
        let key = if prefix.is_empty() {
            k.clone()
        } else {
            format!("{prefix}.{k}")
        };
        match v {
            toml::Value::Table(t) => flatten_into(&key, t, out)?,
            other => {
                out.insert(key.clone(), RawValue::from_toml(&key, other)?);
            }
        }
    }
    Ok(())
}

pub fn parse_document(text: &str) -> Result<FlatConfig> {
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| config(format!("malformed config: {e}")))?;
    let mut flat = FlatConfig::new();
    flatten_into("", &table, &mut flat)?;
    Ok(flat)
}

pub fn load_file(path: &Path) -> Result<FlatConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| config(format!("cannot read {}: {e}", path.display())))?;
    parse_document(&text)
}

/// Apply `key=value` overrides; bare keys address `params.<key>`.
pub fn apply_overrides(flat: &mut FlatConfig, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| config(format!("override `{item}` is not key=value")))?;
        let key = key.trim();
        let key = if key.contains('.') || TOP_LEVEL.contains(&key) {
            key.to_string()
        } else {
            format!("params.{key}")
        };
        flat.insert(key, RawValue::parse_cli(value));
    }
    Ok(())
}

const TOP_LEVEL: [&str; 4] = ["scenario", "output", "workers", "timing"];

fn number(flat: &FlatConfig, key: &str) -> Result<Option<f64>> {
    match flat.get(key) {
        None => Ok(None),
        Some(RawValue::Number(x)) => Ok(Some(*x)),
        Some(other) => Err(config(format!("`{key}` must be a number, got {other:?}"))),
    }
}

fn list(flat: &FlatConfig, key: &str) -> Result<Option<Vec<f64>>> {
    match flat.get(key) {
        None => Ok(None),
        Some(RawValue::List(v)) => Ok(Some(v.clone())),
        Some(RawValue::Number(x)) => Ok(Some(vec![*x])),
        Some(other) => Err(config(format!(
            "`{key}` must be a list of numbers, got {other:?}"
        ))),
    }
}

fn text<'a>(flat: &'a FlatConfig, key: &str) -> Result<Option<&'a str>> {
    match flat.get(key) {
        None => Ok(None),
        Some(RawValue::Text(s)) => Ok(Some(s)),
        Some(other) => Err(config(format!("`{key}` must be text, got {other:?}"))),
    }
}

fn profile_from(flat: &FlatConfig, scenario: ScenarioKind) -> Result<ProfileSpec> {
    let kind = text(flat, "profile.kind")?.unwrap_or("gaussian");
    let allowed: &[&str] = match kind {
        "constant" => &["kind", "value"],
        "sinusoid" => &["kind", "amplitude", "period", "phase"],
        "gaussian" => &["kind", "amplitude", "tau", "center"],
        "table" => &["kind", "times", "values"],
        other => {
            return Err(config(format!(
                "unknown profile kind `{other}` (constant, sinusoid, gaussian, table)"
            )))
        }
    };
    let unknown: Vec<String> = flat
        .keys()
        .filter_map(|k| k.strip_prefix("profile."))
        .filter(|k| !allowed.contains(k))
        .map(|k| format!("profile.{k}"))
        .collect();
    if !unknown.is_empty() {
        return Err(RunnerError::UnknownKeys {
            scenario: scenario.name().into(),
            keys: unknown,
            allowed: allowed.iter().map(|k| format!("profile.{k}")).collect(),
        });
    }
    let num = |k: &str, d: f64| -> Result<f64> { Ok(number(flat, &format!("profile.{k}"))?.unwrap_or(d)) };
    Ok(match kind {
        "constant" => ProfileSpec::Constant {
            value: num("value", 1.0)?,
        },
        "sinusoid" => ProfileSpec::Sinusoid {
            amplitude: num("amplitude", 1.0)?,
            period: num("period", 16.0)?,
            phase: num("phase", 0.0)?,
        },
        "gaussian" => ProfileSpec::Gaussian {
            amplitude: num("amplitude", 1.0)?,
            tau: num("tau", 1.0)?,
            center: num("center", 0.0)?,
        },
        _ => {
            let times = list(flat, "profile.times")?;
            let values = list(flat, "profile.values")?;
            match (times, values) {
                (Some(times), Some(values)) => ProfileSpec::Table { times, values },
                (t, v) => {
                    let mut keys = Vec::new();
                    if t.is_none() {
                        keys.push("profile.times".to_string());
                    }
                    if v.is_none() {
                        keys.push("profile.values".to_string());
                    }
                    return Err(RunnerError::MissingKeys {
                        scenario: scenario.name().into(),
                        keys,
                    });
                }
            }
        }
    })
}

impl ScenarioConfig {
    /// Validate a flattened document against the scenario schema.
    pub fn from_flat(flat: &FlatConfig) -> Result<Self> {
        let scenario: ScenarioKind = match text(flat, "scenario")? {
            Some(name) => name.parse()?,
            None => {
                return Err(RunnerError::MissingKeys {
                    scenario: "<none>".into(),
                    keys: vec!["scenario".into()],
                })
            }
        };
        let schema = scenario.schema();

        let mut allowed: Vec<String> = [
            "scenario",
            "output",
            "workers",
            "timing",
            "tolerance.rel",
            "tolerance.abs",
            "tolerance.max_evals",
            "sweep.param",
            "sweep.values",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        allowed.extend(schema.iter().map(|(k, _)| format!("params.{k}")));
        let unknown: Vec<String> = flat
            .keys()
            .filter(|k| {
                let profile_ok = scenario == ScenarioKind::NeutronPhase && k.starts_with("profile.");
                !profile_ok && !allowed.contains(k)
            })
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(RunnerError::UnknownKeys {
                scenario: scenario.name().into(),
                keys: unknown,
                allowed,
            });
        }

        let mut parameters = BTreeMap::new();
        for (key, default) in schema {
            let value = number(flat, &format!("params.{key}"))?.unwrap_or(*default);
            if !value.is_finite() {
                return Err(config(format!("params.{key} must be finite")));
            }
            parameters.insert(key.to_string(), value);
        }

        let sweep = match (text(flat, "sweep.param")?, list(flat, "sweep.values")?) {
            (None, None) => None,
            (Some(param), Some(values)) => {
                if !parameters.contains_key(param) {
                    return Err(config(format!(
                        "sweep parameter `{param}` is not a parameter of {scenario}"
                    )));
                }
                if values.is_empty() {
                    return Err(config("sweep.values is empty"));
                }
                Some(Sweep {
                    param: param.to_string(),
                    values,
                })
            }
            (Some(_), None) => {
                return Err(RunnerError::MissingKeys {
                    scenario: scenario.name().into(),
                    keys: vec!["sweep.values".into()],
                })
            }
            (None, Some(_)) => {
                return Err(RunnerError::MissingKeys {
                    scenario: scenario.name().into(),
                    keys: vec!["sweep.param".into()],
                })
            }
        };

        let profile = if scenario == ScenarioKind::NeutronPhase {
            Some(profile_from(flat, scenario)?)
        } else {
            None
        };

        let defaults = Tolerance::default();
        let tolerances = Tolerance {
            rel: number(flat, "tolerance.rel")?.unwrap_or(defaults.rel),
            abs: number(flat, "tolerance.abs")?.unwrap_or(defaults.abs),
            max_evals: number(flat, "tolerance.max_evals")?
                .map(|x| x as usize)
                .unwrap_or(defaults.max_evals),
        };
        if !(tolerances.rel > 0.0 && tolerances.abs > 0.0) {
            return Err(config("tolerances must be positive"));
        }

        let workers = number(flat, "workers")?.unwrap_or(1.0);
        if !(workers >= 1.0 && workers.fract() == 0.0) {
            return Err(config("workers must be a positive integer"));
        }
        let timing = match flat.get("timing") {
            None => false,
            Some(RawValue::Bool(b)) => *b,
            Some(other) => return Err(config(format!("`timing` must be true/false, got {other:?}"))),
        };

        let output_path = match text(flat, "output")? {
            Some(p) => PathBuf::from(p),
            None => default_output_dir().join(format!("{}.csv", scenario.name())),
        };

        Ok(Self {
            scenario,
            parameters,
            sweep,
            profile,
            output_path,
            tolerances,
            workers: workers as usize,
            timing,
        })
    }

    /// Config with only a scenario name: every parameter at its default.
    pub fn defaults(scenario: ScenarioKind) -> Self {
        let mut flat = FlatConfig::new();
        flat.insert("scenario".into(), RawValue::Text(scenario.name().into()));
        Self::from_flat(&flat).expect("defaults satisfy every schema")
    }

    pub fn param(&self, key: &str) -> f64 {
        self.parameters[key]
    }
}

pub fn default_output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}
