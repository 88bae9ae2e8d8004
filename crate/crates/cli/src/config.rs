//! Run configuration: a JSON file, overlaid by command-line flags.

use std::path::{Path, PathBuf};

use rabi_core::{DynamicsConfig, Method, ModelParams, SpectrumConfig, TimeAxis};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsBlock {
    pub nbar: f64,
    pub t_max: f64,
    pub t_step: f64,
    pub axis: TimeAxis,
    pub methods: Vec<Method>,
    /// Raise `n_tr` to the size the initial coherent state needs.
    pub auto_n_tr: bool,
}

impl Default for DynamicsBlock {
    fn default() -> Self {
        let d = DynamicsConfig::default();
        Self {
            nbar: d.nbar,
            t_max: d.t_max,
            t_step: d.t_step,
            axis: d.axis,
            methods: vec![Method::Exact, Method::Rwa],
            auto_n_tr: true,
        }
    }
}

impl DynamicsBlock {
    pub fn config(&self, method: Method) -> DynamicsConfig {
        DynamicsConfig {
            nbar: self.nbar,
            t_max: self.t_max,
            t_step: self.t_step,
            axis: self.axis,
            method,
        }
    }
}

/// Coupling grid: an explicit list, or `g_min..=g_max` in steps of `g_step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridBlock {
    pub g_min: f64,
    pub g_max: f64,
    pub g_step: f64,
    pub g_list: Option<Vec<f64>>,
    /// Levels per row.
    pub levels: usize,
}

impl Default for GridBlock {
    fn default() -> Self {
        Self {
            g_min: 0.0,
            g_max: 3.0,
            g_step: 0.02,
            g_list: None,
            levels: 6,
        }
    }
}

impl GridBlock {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        if let Some(list) = &self.g_list {
            if list.is_empty() {
                return Err("g_list must not be empty".into());
            }
            return Ok(list.clone());
        }
        if self.g_step.is_nan() || self.g_step <= 0.0 || self.g_max < self.g_min {
            return Err(format!(
                "bad coupling grid: g_min={} g_max={} g_step={}",
                self.g_min, self.g_max, self.g_step
            ));
        }
        let count = ((self.g_max - self.g_min) / self.g_step + 1e-9).floor() as usize + 1;
        // multiply rather than accumulate so grid points are reproducible
        Ok((0..count).map(|i| self.g_min + i as f64 * self.g_step).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyBlock {
    pub oracle_cut: usize,
    pub levels: usize,
}

impl Default for VerifyBlock {
    fn default() -> Self {
        Self {
            oracle_cut: 400,
            levels: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub spectrum: SpectrumConfig,
    pub dynamics: DynamicsBlock,
    pub sweep: GridBlock,
    pub verify: VerifyBlock,
    pub output_dir: PathBuf,
    pub format: Format,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelParams::default(),
            spectrum: SpectrumConfig::default(),
            dynamics: DynamicsBlock::default(),
            sweep: GridBlock::default(),
            verify: VerifyBlock::default(),
            output_dir: PathBuf::from("out"),
            format: Format::Csv,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("parsing {}: {e}", path.display()))
    }
}

/// Flags shared by every subcommand; each one that is present overrides the file.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// JSON run configuration
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub omega: Option<f64>,
    #[arg(long, global = true)]
    pub omega_eg: Option<f64>,
    #[arg(long, global = true)]
    pub g: Option<f64>,
    #[arg(long, global = true)]
    pub n_tr: Option<usize>,
    #[arg(long, global = true)]
    pub nbar: Option<f64>,
    #[arg(long, global = true)]
    pub kappa: Option<f64>,
    /// End of the dynamics grid, in units of the chosen axis
    #[arg(long, global = true)]
    pub tau_max: Option<f64>,
    #[arg(long, global = true)]
    pub t_step: Option<f64>,
    #[arg(long, global = true, value_parser = parse_axis)]
    pub axis: Option<TimeAxis>,
    /// Dynamics methods, comma separated: exact, rwa, perturbative, printed
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_method)]
    pub method: Option<Vec<Method>>,
    /// Keep n_tr as given even if the initial state needs more
    #[arg(long, global = true)]
    pub fixed_n_tr: bool,
    #[arg(long, global = true)]
    pub g_min: Option<f64>,
    #[arg(long, global = true)]
    pub g_max: Option<f64>,
    #[arg(long, global = true)]
    pub g_step: Option<f64>,
    /// Explicit coupling list, comma separated
    #[arg(long, global = true, value_delimiter = ',')]
    pub g_list: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub oracle_cut: Option<usize>,
    /// Worker threads for grid and time-sample parallelism
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: rabi_core::Error| e.to_string())
}

fn parse_axis(s: &str) -> Result<TimeAxis, String> {
    match s {
        "tau" => Ok(TimeAxis::Tau),
        "omega-t" | "omega_t" => Ok(TimeAxis::OmegaT),
        other => Err(format!("unknown axis {other:?}; use tau or omega-t")),
    }
}

impl Overrides {
    pub fn resolve(&self) -> Result<RunConfig, String> {
        let mut c = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($src:expr, $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(self.omega, c.model.omega);
        set!(self.omega_eg, c.model.omega_eg);
        set!(self.g, c.model.g);
        set!(self.n_tr, c.model.n_tr);
        set!(self.nbar, c.dynamics.nbar);
        set!(self.kappa, c.spectrum.kappa);
        set!(self.tau_max, c.dynamics.t_max);
        set!(self.t_step, c.dynamics.t_step);
        set!(self.axis, c.dynamics.axis);
        set!(self.method, c.dynamics.methods);
        set!(self.g_min, c.sweep.g_min);
        set!(self.g_max, c.sweep.g_max);
        set!(self.g_step, c.sweep.g_step);
        set!(self.oracle_cut, c.verify.oracle_cut);
        set!(self.output_dir, c.output_dir);
        set!(self.format, c.format);
        if self.g_list.is_some() {
            c.sweep.g_list = self.g_list.clone();
        }
        if self.jobs.is_some() {
            c.jobs = self.jobs;
        }
        if self.fixed_n_tr {
            c.dynamics.auto_n_tr = false;
        }
        Ok(c)
    }
}
