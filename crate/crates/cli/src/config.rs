//! Run configuration: flags over an optional JSON config file over defaults.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qes_core::models::{H2Spec, H4Spec, Mode, ModelSpec};
use qes_core::solve::SolverConfig;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelId {
    H2,
    H4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Default)]
pub struct ModelArgs {
    /// Model family.
    #[arg(long, value_enum)]
    pub model: Option<ModelId>,
    /// Number of Bethe roots (polynomial degree of the wavefunction factor).
    #[arg(long)]
    pub n: Option<usize>,
    /// Angular momentum; a comma-separated list where a command accepts several.
    #[arg(long = "l", value_delimiter = ',', allow_negative_numbers = true)]
    pub ell: Vec<i32>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    /// Treat rho as an unknown (H4 only).
    #[arg(long)]
    pub table_mode: bool,
    /// JSON config file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SolverArgs {
    /// Number of multi-start Newton starts.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Search interval for an unknown, as KEY=LO:HI (repeatable).
    #[arg(long = "seed-box", value_name = "KEY=LO:HI", allow_hyphen_values = true)]
    pub seed_box: Vec<String>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub model: Option<ModelId>,
    pub n: Option<usize>,
    #[serde(alias = "l")]
    pub ell: Option<Vec<i32>>,
    pub omega: Option<f64>,
    pub gamma: Option<f64>,
    pub rho: Option<f64>,
    pub table_mode: Option<bool>,
    pub solver: Option<SolverConfig>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub grid_n: Option<usize>,
    pub r_max: Option<f64>,
    pub samples: Option<usize>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, String> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }
}

/// Fully resolved model selection.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub models: Vec<ModelSpec>,
    pub mode: Mode,
    pub solver: SolverConfig,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    /// The single model of a command that takes one `ℓ`.
    pub fn single(&self) -> Result<&ModelSpec, String> {
        match self.models.as_slice() {
            [m] => Ok(m),
            _ => Err("this command takes a single --l value".into()),
        }
    }
}

fn parse_box(s: &str) -> Result<(String, (f64, f64)), String> {
    let bad = || format!("bad --seed-box {s:?}; expected KEY=LO:HI");
    let (key, range) = s.split_once('=').ok_or_else(bad)?;
    let (lo, hi) = range.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if key.trim().is_empty() {
        return Err(bad());
    }
    Ok((key.trim().to_string(), (lo, hi)))
}

pub fn solver_config(args: &SolverArgs, file: &FileConfig, default_starts: usize) -> Result<SolverConfig, String> {
    let mut cfg = file.solver.clone().unwrap_or_else(|| SolverConfig { starts: default_starts, ..Default::default() });
    if let Some(s) = args.starts {
        cfg.starts = s;
    }
    let mut boxes: BTreeMap<String, (f64, f64)> = cfg.boxes.clone();
    for b in &args.seed_box {
        let (k, v) = parse_box(b)?;
        boxes.insert(k, v);
    }
    cfg.boxes = boxes;
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

/// Builds the model list from flags and config, checking coupling
/// consistency: H2 takes `omega`; H4 takes `gamma` and either `rho` or
/// table mode.
pub fn resolve(
    m: &ModelArgs,
    s: &SolverArgs,
    o: &OutputArgs,
    default_format: Format,
    default_starts: usize,
) -> Result<(RunConfig, FileConfig), String> {
    let file = FileConfig::load(m.config.as_deref())?;
    let model = m.model.or(file.model).ok_or("--model is required (h2 or h4)")?;
    let n = m.n.or(file.n).ok_or("--n is required")?;
    let ells = if m.ell.is_empty() { file.ell.clone().unwrap_or_default() } else { m.ell.clone() };
    if ells.is_empty() {
        return Err("--l is required".into());
    }
    let table_mode = m.table_mode || file.table_mode.unwrap_or(false);
    let omega = m.omega.or(file.omega);
    let gamma = m.gamma.or(file.gamma);
    let rho = m.rho.or(file.rho);
    let mut models = Vec::new();
    let mode = match model {
        ModelId::H2 => {
            if gamma.is_some() || rho.is_some() || table_mode {
                return Err("h2 takes --omega only (no --gamma, --rho or --table-mode)".into());
            }
            let omega = omega.ok_or("h2 requires --omega")?;
            for &ell in &ells {
                models.push(ModelSpec::H2(H2Spec::new(omega, ell, n).map_err(|e| e.to_string())?));
            }
            Mode::Fixed
        }
        ModelId::H4 => {
            if omega.is_some() {
                return Err("h4 takes --gamma, not --omega".into());
            }
            let gamma = gamma.ok_or("h4 requires --gamma")?;
            if table_mode && rho.is_some() {
                return Err("--rho and --table-mode are exclusive".into());
            }
            if !table_mode && rho.is_none() {
                return Err("h4 requires --rho or --table-mode".into());
            }
            for &ell in &ells {
                models.push(ModelSpec::H4(H4Spec::new(gamma, rho.unwrap_or(0.0), ell, n).map_err(|e| e.to_string())?));
            }
            if table_mode {
                Mode::Table
            } else {
                Mode::Fixed
            }
        }
    };
    let solver = solver_config(s, &file, default_starts)?;
    let format = o.format.or(file.format).unwrap_or(default_format);
    let out = o.out.clone().or_else(|| file.out.clone());
    Ok((RunConfig { models, mode, solver, format, out }, file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn margs(model: ModelId) -> ModelArgs {
        ModelArgs { model: Some(model), n: Some(1), ell: vec![1], ..Default::default() }
    }

    #[test]
    fn coupling_consistency() {
        let s = SolverArgs::default();
        let o = OutputArgs::default();
        let mut h2 = margs(ModelId::H2);
        assert!(resolve(&h2, &s, &o, Format::Json, 100).is_err());
        h2.omega = Some(0.1);
        assert!(resolve(&h2, &s, &o, Format::Json, 100).is_ok());
        h2.gamma = Some(1.0);
        assert!(resolve(&h2, &s, &o, Format::Json, 100).is_err());

        let mut h4 = margs(ModelId::H4);
        h4.gamma = Some(1.0);
        assert!(resolve(&h4, &s, &o, Format::Json, 100).is_err());
        h4.table_mode = true;
        let (cfg, _) = resolve(&h4, &s, &o, Format::Json, 100).unwrap();
        assert_eq!(cfg.mode, Mode::Table);
        h4.rho = Some(0.3);
        assert!(resolve(&h4, &s, &o, Format::Json, 100).is_err());
    }

    #[test]
    fn seed_boxes_parse() {
        assert_eq!(parse_box("E=-10:5").unwrap(), ("E".to_string(), (-10.0, 5.0)));
        assert!(parse_box("E=-10").is_err());
        assert!(parse_box("=1:2").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"model":"h2","n":0,"l":[2],"omega":4.0,"solver":{"starts":7}}"#).unwrap();
        let mut m = ModelArgs { config: Some(path), ..Default::default() };
        let (cfg, _) = resolve(&m, &SolverArgs::default(), &OutputArgs::default(), Format::Json, 100).unwrap();
        assert_eq!(cfg.solver.starts, 7);
        assert_eq!(cfg.models[0].ell(), 2);
        m.ell = vec![3];
        let s = SolverArgs { starts: Some(9), ..Default::default() };
        let (cfg, _) = resolve(&m, &s, &OutputArgs::default(), Format::Json, 100).unwrap();
        assert_eq!(cfg.solver.starts, 9);
        assert_eq!(cfg.models[0].ell(), 3);
    }
}
