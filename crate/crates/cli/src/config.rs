use std::path::Path;

use cstar_schur::verify::RunOptions;
use cstar_schur::{AlgebraShape, Error, GenConfig, Style, DEFAULT_TOL};
use serde::Deserialize;

use crate::{Common, Paren, SearchKind};

pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

pub const TOL_ENV: &str = "CSTAR_SCHUR_TOL";

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_USAGE
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Options read from `--config`. Command-line flags take precedence.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub suite: Option<String>,
    pub kind: Option<SearchKind>,
    pub shape: Option<String>,
    pub n: Option<usize>,
    pub d: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub style: Option<String>,
    pub entry_scale: Option<f64>,
    pub stop_on_first: Option<bool>,
    pub entrywise_constant: Option<bool>,
    pub schur_power_paren: Option<Paren>,
    pub no_timing: Option<bool>,
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {what} {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::usage(format!("malformed {what} {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| Failure::usage(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(path, text + "\n")
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

/// Common options after merging flags, the config file, the environment and defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub shape: AlgebraShape,
    pub shape_given: bool,
    pub n: Option<usize>,
    pub seed: u64,
    pub trials: Option<u64>,
    pub tol: f64,
    pub style: Style,
    pub entry_scale: f64,
    pub run: RunOptions,
}

impl Settings {
    pub fn gen(&self, n: usize) -> GenConfig {
        GenConfig::new(self.seed, self.shape.clone(), n)
            .with_style(self.style)
            .with_entry_scale(self.entry_scale)
    }
}

fn env_tol() -> CliResult<Option<f64>> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .map(Some)
            .map_err(|_| Failure::usage(format!("{TOL_ENV}={v:?} is not a number"))),
        Err(_) => Ok(None),
    }
}

pub fn load_config(common: &Common) -> CliResult<RunConfig> {
    match &common.config {
        Some(path) => read_json(path, "config"),
        None => Ok(RunConfig::default()),
    }
}

pub fn settings(common: &Common, file: &RunConfig, stop_on_first: bool) -> CliResult<Settings> {
    let shape_text = common.shape.clone().or_else(|| file.shape.clone());
    let shape_given = shape_text.is_some();
    let shape: AlgebraShape = shape_text.as_deref().unwrap_or("1").parse()?;
    let tol = match common.tol.or(file.tol) {
        Some(t) => t,
        None => env_tol()?.unwrap_or(DEFAULT_TOL),
    };
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Failure::usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let style = match common.style.as_deref().or(file.style.as_deref()) {
        Some(s) => s.parse()?,
        None => Style::Complex,
    };
    let entry_scale = common.entry_scale.or(file.entry_scale).unwrap_or(1.0);
    let n = common.n.or(file.n);
    if n == Some(0) {
        return Err(Failure::usage("n must be at least 1"));
    }
    let run = RunOptions {
        threads: common.threads.or(file.threads).unwrap_or(0),
        timing: !(common.no_timing || file.no_timing.unwrap_or(false)),
        stop_on_first: stop_on_first || file.stop_on_first.unwrap_or(false),
    };
    Ok(Settings {
        shape,
        shape_given,
        n,
        seed: common.seed.or(file.seed).unwrap_or(0),
        trials: common.trials.or(file.trials),
        tol,
        style,
        entry_scale,
        run,
    })
}
