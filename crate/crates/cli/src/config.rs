//! Run configuration: a flat JSON object.
//!
//! ```json
//! {
//!   "mode": "evolve",
//!   "g_values": [0.8, 1.0, 1.2],
//!   "tau_end": 20.0,
//!   "dtau": 0.001,
//!   "sample_every": 10,
//!   "initial_state": {"u": 0.0, "phi": 0.0, "n_th": 0.0}
//! }
//! ```

use std::fmt;
use std::path::PathBuf;

use serde_json::{Map, Value};
use squeezecav_core::{IntegrationControl, StsState};

pub const DEFAULT_DTAU: f64 = 1e-3;
pub const DEFAULT_SAMPLE_EVERY: usize = 10;
pub const DEFAULT_FOCK_DIM: usize = 64;
pub const DEFAULT_OUTPUT_DIR: &str = "out";
pub const MAX_FOCK_DIM: usize = 512;
pub const MAX_G: f64 = 1e3;

const KNOWN_KEYS: [&str; 9] = [
    "mode",
    "g_values",
    "tau_end",
    "dtau",
    "sample_every",
    "delta_values",
    "fock_dim",
    "output_dir",
    "initial_state",
];

/// Help text for `--help`.
pub const SCHEMA_HELP: &str = "\
Config file: a JSON object with these keys (unknown keys are rejected).

  mode           string, required. evolve | steady | threshold | oracle-compare | figures.
                 The positional <MODE> argument overrides it.
  g_values       array of pump ratios g >= 0 (<= 1000). Required except in figures mode.
                 threshold mode needs g > 0.
  delta_values   array of fractions delta > 0. Required in threshold mode.
  tau_end        final dimensionless time, > 0. Defaults: evolve 20, threshold 20,
                 oracle-compare 5; figures mode uses per-figure spans unless set.
  dtau           RK4 step, 0 < dtau <= tau_end. Default 0.001.
  sample_every   positive integer, keep every k-th step. Default 10.
  fock_dim       initial Fock truncation for oracle-compare, 2..=512. Default 64.
                 The basis doubles on demand up to 512.
  output_dir     directory for CSV files and manifest.json. Default \"out\".
  initial_state  object {\"u\", \"phi\", \"n_th\"}, u >= 0, n_th >= 0. Default vacuum.
                 Used by evolve and oracle-compare.

Outputs:
  evolve          evolve_g<g>.csv: tau,u,n_th,dx,dy,dxdy,n_mean,n_svs,g2
  steady          steady.csv: g,u_ss,n_th_ss,n_mean_ss,dx_ss,dy_ss,product_ss,g2_ss
  threshold       threshold.csv: g,delta,tau_star,dx,product,g2
  oracle-compare  oracle_compare.csv: one deviation row per g
  figures         fig1a fig1b fig2a fig2b fig2c fig3a fig3b fig3c fig4 fig4-inset
                  fig5a fig5b fig6 (.csv)
Every run writes manifest.json. Undefined values (g2 at vacuum) are written as nan.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Mode {
    Evolve,
    Steady,
    Threshold,
    OracleCompare,
    Figures,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Evolve,
        Mode::Steady,
        Mode::Threshold,
        Mode::OracleCompare,
        Mode::Figures,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Evolve => "evolve",
            Mode::Steady => "steady",
            Mode::Threshold => "threshold",
            Mode::OracleCompare => "oracle-compare",
            Mode::Figures => "figures",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.as_str() == s)
    }

    fn default_tau_end(self) -> Option<f64> {
        match self {
            Mode::Evolve | Mode::Threshold => Some(20.0),
            Mode::OracleCompare => Some(5.0),
            Mode::Steady | Mode::Figures => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config is not valid JSON: {0}")]
    Syntax(String),
    #[error("config must be a JSON object")]
    NotAnObject,
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("missing required config key `{0}`")]
    Missing(&'static str),
    #[error("config key `{key}`: {msg}")]
    Invalid { key: &'static str, msg: String },
}

impl ConfigError {
    /// The offending key, if the error is about one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey(k) => Some(k),
            ConfigError::Missing(k) | ConfigError::Invalid { key: k, .. } => Some(k),
            _ => None,
        }
    }
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

/// Command-line values that replace config keys before validation.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub output_dir: Option<PathBuf>,
    pub dtau: Option<f64>,
    pub tau_end: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub g_values: Vec<f64>,
    /// `None` only in steady and figures mode, where spans are fixed per dataset.
    pub tau_end: Option<f64>,
    pub dtau: f64,
    pub sample_every: usize,
    pub delta_values: Vec<f64>,
    pub fock_dim: usize,
    pub output_dir: PathBuf,
    pub initial_state: StsState,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        RunConfig {
            mode,
            g_values: Vec::new(),
            tau_end: mode.default_tau_end(),
            dtau: DEFAULT_DTAU,
            sample_every: DEFAULT_SAMPLE_EVERY,
            delta_values: Vec::new(),
            fock_dim: DEFAULT_FOCK_DIM,
            output_dir: PathBuf::from(DEFAULT_OUTPUT_DIR),
            initial_state: StsState::vacuum(),
        }
    }

    /// Integration control over `[0, tau_end]` with this config's step settings.
    pub fn control(&self, tau_end: f64) -> squeezecav_core::Result<IntegrationControl> {
        IntegrationControl::new(self.dtau, tau_end, self.sample_every)
    }

    /// Flat JSON echo of the validated config, for the manifest.
    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "mode": self.mode.as_str(),
            "g_values": self.g_values,
            "tau_end": self.tau_end,
            "dtau": self.dtau,
            "sample_every": self.sample_every,
            "delta_values": self.delta_values,
            "fock_dim": self.fock_dim,
            "output_dir": self.output_dir.to_string_lossy(),
            "initial_state": {
                "u": self.initial_state.u,
                "phi": self.initial_state.phi,
                "n_th": self.initial_state.n_th,
            },
        })
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    let Value::Object(map) = value else {
        return Err(ConfigError::NotAnObject);
    };
    from_map(&map, overrides)
}

fn from_map(map: &Map<String, Value>, ov: &Overrides) -> Result<RunConfig, ConfigError> {
    if let Some(k) = map.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(ConfigError::UnknownKey(k.clone()));
    }
    let mode = match ov.mode {
        Some(m) => m,
        None => {
            let s = map.get("mode").ok_or(ConfigError::Missing("mode"))?;
            let s = s.as_str().ok_or_else(|| invalid("mode", "expected a string"))?;
            Mode::parse(s).ok_or_else(|| invalid("mode", format!("unknown mode {s:?}")))?
        }
    };
    let mut cfg = RunConfig::new(mode);

    match map.get("g_values") {
        Some(v) => cfg.g_values = number_list(v, "g_values")?,
        None if mode != Mode::Figures => return Err(ConfigError::Missing("g_values")),
        None => {}
    }
    for &g in &cfg.g_values {
        if !(0.0..=MAX_G).contains(&g) {
            return Err(invalid("g_values", format!("pump ratio {g} outside [0, {MAX_G}]")));
        }
        if mode == Mode::Threshold && g == 0.0 {
            return Err(invalid("g_values", "threshold search needs g > 0"));
        }
    }

    match map.get("delta_values") {
        Some(v) => cfg.delta_values = number_list(v, "delta_values")?,
        None if mode == Mode::Threshold => return Err(ConfigError::Missing("delta_values")),
        None => {}
    }
    if let Some(&d) = cfg.delta_values.iter().find(|&&d| d <= 0.0) {
        return Err(invalid("delta_values", format!("fraction {d} must be > 0")));
    }

    if let Some(v) = map.get("tau_end") {
        cfg.tau_end = Some(number(v, "tau_end")?);
    }
    if let Some(t) = ov.tau_end {
        cfg.tau_end = Some(t);
    }
    if let Some(v) = map.get("dtau") {
        cfg.dtau = number(v, "dtau")?;
    }
    if let Some(d) = ov.dtau {
        cfg.dtau = d;
    }
    if !(cfg.dtau > 0.0 && cfg.dtau.is_finite()) {
        return Err(invalid("dtau", format!("step {} must be finite and > 0", cfg.dtau)));
    }
    if let Some(t) = cfg.tau_end {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid("tau_end", format!("{t} must be finite and > 0")));
        }
        if cfg.dtau > t {
            return Err(invalid("dtau", format!("step {} exceeds tau_end {t}", cfg.dtau)));
        }
    }

    if let Some(v) = map.get("sample_every") {
        cfg.sample_every = integer(v, "sample_every")?;
        if cfg.sample_every == 0 {
            return Err(invalid("sample_every", "must be >= 1"));
        }
    }
    if let Some(v) = map.get("fock_dim") {
        cfg.fock_dim = integer(v, "fock_dim")?;
        if !(2..=MAX_FOCK_DIM).contains(&cfg.fock_dim) {
            return Err(invalid(
                "fock_dim",
                format!("{} outside 2..={MAX_FOCK_DIM}", cfg.fock_dim),
            ));
        }
    }
    if let Some(v) = map.get("output_dir") {
        let s = v.as_str().ok_or_else(|| invalid("output_dir", "expected a string"))?;
        if s.is_empty() {
            return Err(invalid("output_dir", "must not be empty"));
        }
        cfg.output_dir = PathBuf::from(s);
    }
    if let Some(dir) = &ov.output_dir {
        cfg.output_dir = dir.clone();
    }
    if let Some(v) = map.get("initial_state") {
        cfg.initial_state = initial_state(v)?;
    }
    Ok(cfg)
}

fn number(v: &Value, key: &'static str) -> Result<f64, ConfigError> {
    let x = v.as_f64().ok_or_else(|| invalid(key, "expected a number"))?;
    if !x.is_finite() {
        return Err(invalid(key, "must be finite"));
    }
    Ok(x)
}

fn integer(v: &Value, key: &'static str) -> Result<usize, ConfigError> {
    v.as_u64()
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| invalid(key, "expected a nonnegative integer"))
}

fn number_list(v: &Value, key: &'static str) -> Result<Vec<f64>, ConfigError> {
    let items = v
        .as_array()
        .ok_or_else(|| invalid(key, "expected an array of numbers"))?;
    if items.is_empty() {
        return Err(invalid(key, "must not be empty"));
    }
    items.iter().map(|x| number(x, key)).collect()
}

fn initial_state(v: &Value) -> Result<StsState, ConfigError> {
    const KEY: &str = "initial_state";
    let obj = v
        .as_object()
        .ok_or_else(|| invalid(KEY, "expected an object {u, phi, n_th}"))?;
    if let Some(k) = obj.keys().find(|k| !["u", "phi", "n_th"].contains(&k.as_str())) {
        return Err(invalid(KEY, format!("unknown field `{k}`")));
    }
    let field = |name: &str| -> Result<f64, ConfigError> {
        match obj.get(name) {
            None => Ok(0.0),
            Some(x) => x
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| invalid(KEY, format!("`{name}` must be a finite number"))),
        }
    };
    StsState::new(field("u")?, field("phi")?, field("n_th")?).map_err(|e| invalid(KEY, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_defaults() {
        let cfg = parse_config(r#"{"mode":"steady","g_values":[0.8]}"#).unwrap();
        assert_eq!(cfg.mode, Mode::Steady);
        assert_eq!(cfg.g_values, vec![0.8]);
        assert_eq!(cfg.dtau, 1e-3);
        assert_eq!(cfg.sample_every, 10);
        assert_eq!(cfg.fock_dim, 64);
        assert!(cfg.initial_state.is_vacuum());
    }

    #[test]
    fn missing_g_values_names_key() {
        let err = parse_config(r#"{"mode":"evolve"}"#).unwrap_err();
        assert_eq!(err, ConfigError::Missing("g_values"));
        assert_eq!(err.key(), Some("g_values"));
    }

    #[test]
    fn threshold_sweep() {
        let cfg = parse_config(r#"{"mode":"threshold","g_values":[1,5,10,50,100],"delta_values":[0.1,0.2]}"#).unwrap();
        assert_eq!(cfg.g_values, vec![1.0, 5.0, 10.0, 50.0, 100.0]);
        assert_eq!(cfg.delta_values, vec![0.1, 0.2]);
        assert_eq!(cfg.tau_end, Some(20.0));
    }

    #[test]
    fn rejects_bad_input() {
        let cases = [
            (r#"{"mode":"steady","g_values":[0.8],"gvalues":[1]}"#, "gvalues"),
            (r#"{"mode":"threshold","g_values":[1]}"#, "delta_values"),
            (r#"{"mode":"evolve","g_values":[-0.1]}"#, "g_values"),
            (r#"{"mode":"evolve","g_values":[]}"#, "g_values"),
            (r#"{"mode":"evolve","g_values":[1],"dtau":0}"#, "dtau"),
            (r#"{"mode":"evolve","g_values":[1],"tau_end":-1}"#, "tau_end"),
            (r#"{"mode":"evolve","g_values":[1],"sample_every":0}"#, "sample_every"),
            (r#"{"mode":"evolve","g_values":[1],"sample_every":1.5}"#, "sample_every"),
            (
                r#"{"mode":"oracle-compare","g_values":[1],"fock_dim":1024}"#,
                "fock_dim",
            ),
            (
                r#"{"mode":"evolve","g_values":[1],"initial_state":{"u":-1}}"#,
                "initial_state",
            ),
            (r#"{"mode":"sideways","g_values":[1]}"#, "mode"),
            (r#"{"g_values":[1]}"#, "mode"),
        ];
        for (text, key) in cases {
            let err = parse_config(text).unwrap_err();
            assert_eq!(err.key(), Some(key), "{text}: {err}");
        }
        assert!(matches!(parse_config("[1]"), Err(ConfigError::NotAnObject)));
        assert!(matches!(parse_config("{"), Err(ConfigError::Syntax(_))));
    }

    #[test]
    fn overrides_win() {
        let ov = Overrides {
            mode: Some(Mode::Evolve),
            dtau: Some(5e-4),
            tau_end: Some(3.0),
            output_dir: Some("elsewhere".into()),
        };
        let cfg = parse_config_with(r#"{"mode":"steady","g_values":[0.5],"tau_end":9}"#, &ov).unwrap();
        assert_eq!(cfg.mode, Mode::Evolve);
        assert_eq!(cfg.dtau, 5e-4);
        assert_eq!(cfg.tau_end, Some(3.0));
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));
    }

    #[test]
    fn figures_need_no_g_values() {
        let cfg = parse_config(r#"{"mode":"figures"}"#).unwrap();
        assert!(cfg.g_values.is_empty());
        assert_eq!(cfg.tau_end, None);
    }
}
