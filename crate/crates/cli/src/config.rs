//! Run configuration: one TOML file with flat sections, every default
//! materialized before use and echoed next to the artifacts.

use std::path::Path;

use serde::{Deserialize, Serialize};

use nlcomp_core::simulator::{ClassifyOptions, InitialData, ProfileSpec, RunOptions};
use nlcomp_core::speed::SemiWaveOptions;
use nlcomp_core::thresholds::MuStarOptions;
use nlcomp_core::{Kernel, KernelSpec, ModelParams};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelParams,
    pub kernel1: KernelSpec,
    /// Same as `kernel1` when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel2: Option<KernelSpec>,
    pub initial: InitialSection,
    pub grid: GridSection,
    pub run: RunSection,
    pub classify: ClassifyOptions,
    pub output: OutputSection,
    pub eigen: EigenSection,
    pub lsigma: LsigmaSection,
    pub semiwave: SemiwaveSection,
    pub mustar: MustarSection,
    pub scenario: ScenarioSection,
    pub sweep: SweepSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelParams::default(),
            kernel1: KernelSpec::Uniform { radius: 1.0 },
            kernel2: None,
            initial: InitialSection::default(),
            grid: GridSection::default(),
            run: RunSection::default(),
            classify: ClassifyOptions::default(),
            output: OutputSection::default(),
            eigen: EigenSection::default(),
            lsigma: LsigmaSection::default(),
            semiwave: SemiwaveSection::default(),
            mustar: MustarSection::default(),
            scenario: ScenarioSection::default(),
            sweep: SweepSection::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialSection {
    pub h0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g0: Option<f64>,
    pub u0: ProfileSpec,
    pub v0: ProfileSpec,
}

impl Default for InitialSection {
    fn default() -> Self {
        InitialSection {
            h0: 2.0,
            g0: None,
            u0: ProfileSpec::Parabola {
                height: 0.5,
                left: None,
                right: None,
            },
            v0: ProfileSpec::Constant { value: 1.0 },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    /// Sixteen nodes per kernel radius when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dx: Option<f64>,
    /// Sized from the spreading speed when omitted.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub horizon: f64,
    pub probe_interval: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub snapshot_times: Vec<f64>,
    pub allow_absent_native: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        RunSection {
            horizon: 100.0,
            probe_interval: 0.5,
            dt: None,
            snapshot_times: Vec::new(),
            allow_absent_native: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Artifact directory, relative to the output root.
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: "nlcomp-out".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EigenSection {
    /// Left endpoint of every interval.
    pub a: f64,
    pub lengths: Vec<f64>,
    /// Nodes per kernel radius.
    pub per_radius: f64,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for EigenSection {
    fn default() -> Self {
        EigenSection {
            a: 0.0,
            lengths: vec![0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            per_radius: 16.0,
            max_iter: 2_000_000,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LsigmaSection {
    /// Levels as fractions of `d1`.
    pub fractions: Vec<f64>,
}

impl Default for LsigmaSection {
    fn default() -> Self {
        LsigmaSection {
            fractions: vec![0.2, 0.5, 0.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiwaveSection {
    pub rho: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_sw: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    pub sweep_tol: f64,
    pub max_sweeps: usize,
    pub relaxation: f64,
    pub speed_tol: f64,
}

impl Default for SemiwaveSection {
    fn default() -> Self {
        let o = SemiWaveOptions::default();
        SemiwaveSection {
            rho: 1e-3,
            x_sw: o.x_sw,
            nodes: o.n,
            sweep_tol: o.sweep_tol,
            max_sweeps: o.max_sweeps,
            relaxation: o.relaxation,
            speed_tol: o.speed_tol,
        }
    }
}

impl SemiwaveSection {
    pub fn options(&self) -> SemiWaveOptions {
        SemiWaveOptions {
            x_sw: self.x_sw,
            n: self.nodes,
            sweep_tol: self.sweep_tol,
            max_sweeps: self.max_sweeps,
            relaxation: self.relaxation,
            speed_tol: self.speed_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MustarSection {
    pub mu_min: f64,
    pub mu_max: f64,
    pub tol: f64,
    pub horizon_cap: f64,
    pub strict: bool,
    pub prescan: usize,
    pub verify_doubling: bool,
}

impl Default for MustarSection {
    fn default() -> Self {
        let o = MuStarOptions::default();
        MustarSection {
            mu_min: 0.1,
            mu_max: 50.0,
            tol: o.tol,
            horizon_cap: o.horizon_cap,
            strict: o.strict,
            prescan: o.prescan,
            verify_doubling: o.verify_doubling,
        }
    }
}

impl MustarSection {
    pub fn options(&self) -> MuStarOptions {
        MuStarOptions {
            tol: self.tol,
            horizon_cap: self.horizon_cap,
            strict: self.strict,
            prescan: self.prescan,
            verify_doubling: self.verify_doubling,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    /// Template name; the command line argument takes precedence.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Overrides the template's horizon.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Dotted key of the swept value, e.g. `model.mu`.
    pub parameter: String,
    pub values: Vec<f64>,
    pub workers: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            parameter: "model.mu".into(),
            values: vec![0.5, 1.0, 2.0, 4.0],
            workers: 1,
        }
    }
}

/// Line number (1-based) of a byte offset.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Sets `path = value` in a TOML table, creating intermediate tables.
/// The value is read as TOML and falls back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Parse { line: 0, message: format!("override '{assignment}' is not key=value") })?;
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let keys: Vec<&str> = path.trim().split('.').collect();
    let (last, parents) = keys.split_last().expect("split yields one item");
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Parse { line: 0, message: format!("'{k}' in '{path}' is not a table") })?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parses text plus overrides, fills defaults and validates.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Parse {
            line: e.span().map(|s| line_of(text, s.start)).unwrap_or(0),
            message: e.message().to_string(),
        })?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let cfg: RunConfig = toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| CliError::Parse {
            line: 0,
            message: e.message().to_string(),
        })?;
        let cfg = cfg.materialize()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let text = match path {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?,
            None => String::new(),
        };
        Self::parse(&text, overrides)
    }

    fn materialize(mut self) -> Result<Self, CliError> {
        if self.kernel2.is_none() {
            self.kernel2 = Some(self.kernel1.clone());
        }
        if self.grid.dx.is_none() {
            let (j1, j2) = self.kernels()?;
            self.grid.dx = Some(j1.support_radius().min(j2.support_radius()) / 16.0);
        }
        Ok(self)
    }

    fn validate(&self) -> Result<(), CliError> {
        let invalid = |e: nlcomp_core::Error| CliError::Validation(e.to_string());
        self.model.validate().map_err(invalid)?;
        let (j1, j2) = self.kernels()?;
        let dx = self.dx();
        j1.check_resolved(dx).map_err(invalid)?;
        j2.check_resolved(dx).map_err(invalid)?;
        self.initial_data().resolve(self.run.allow_absent_native).map_err(invalid)?;
        if self.run.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::Validation("run.snapshot_times must be sorted".into()));
        }
        if !(self.run.horizon > 0.0 && self.run.probe_interval > 0.0) {
            return Err(CliError::Validation("run.horizon and run.probe_interval must be positive".into()));
        }
        if self.sweep.workers == 0 {
            return Err(CliError::Validation("sweep.workers must be at least 1".into()));
        }
        Ok(())
    }

    pub fn kernels(&self) -> Result<(Kernel, Kernel), CliError> {
        let build = |s: &KernelSpec| s.build().map_err(|e| CliError::Validation(e.to_string()));
        let j1 = build(&self.kernel1)?;
        let j2 = match &self.kernel2 {
            Some(s) if s != &self.kernel1 => build(s)?,
            _ => j1.clone(),
        };
        Ok((j1, j2))
    }

    pub fn dx(&self) -> f64 {
        self.grid.dx.expect("materialized")
    }

    pub fn initial_data(&self) -> InitialData {
        InitialData {
            h0: self.initial.h0,
            g0: self.initial.g0,
            u0: self.initial.u0.clone(),
            v0: self.initial.v0.clone(),
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            dx: self.dx(),
            x_max: self.grid.x_max,
            dt: self.run.dt,
            horizon: self.run.horizon,
            probe_interval: self.run.probe_interval,
            snapshot_times: self.run.snapshot_times.clone(),
            allow_absent_native: self.run.allow_absent_native,
        }
    }

    /// The materialized configuration as TOML.
    pub fn echo(&self) -> String {
        toml::to_string(self).expect("configuration serializes")
    }
}
