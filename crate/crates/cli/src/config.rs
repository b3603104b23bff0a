//! Run configuration shared by the command line and the JSON sidecar.

use std::path::PathBuf;

use biharmonic::junction::{BoundaryScan, SimControl};
use biharmonic::Family;
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::grid_spec::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    #[serde(default)]
    pub output_format: OutputFormat,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Subcommand)]
#[serde(tag = "command", content = "parameters", rename_all = "kebab-case")]
pub enum Command {
    /// Sample one drive period with its extrema, load term and impulse.
    Waveform(WaveformParams),
    /// Diode efficiency over an alpha x zeta grid.
    EfficiencyMap(EfficiencyMapParams),
    /// Mean junction voltage over an i_dc x zeta grid.
    IvMap(IvMapParams),
    /// Zero-voltage channel edges along a zeta grid.
    Channel(ChannelParams),
    /// Shot noise along a zeta sweep at fixed total drive.
    NoiseSweep(NoiseSweepParams),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Waveform(_) => "waveform",
            Command::EfficiencyMap(_) => "efficiency-map",
            Command::IvMap(_) => "iv-map",
            Command::Channel(_) => "channel",
            Command::NoiseSweep(_) => "noise-sweep",
        }
    }

    /// Fill phase and axis defaults that depend on other parameters.
    pub fn resolved(mut self) -> Self {
        match &mut self {
            Command::Waveform(p) => {
                p.theta.get_or_insert(p.family.base_phase());
            }
            Command::EfficiencyMap(p) => {
                p.theta.get_or_insert(p.family.base_phase());
            }
            Command::IvMap(p) => {
                p.theta.get_or_insert(p.family.base_phase());
                fill_axis_default(&p.zeta_grid, &mut p.log_ratio_grid);
            }
            Command::Channel(p) => {
                p.theta.get_or_insert(p.family.base_phase());
                fill_axis_default(&p.zeta_grid, &mut p.log_ratio_grid);
            }
            Command::NoiseSweep(_) => {}
        }
        self
    }
}

fn fill_axis_default(zeta_grid: &Option<GridSpec>, log_ratio_grid: &mut Option<GridSpec>) {
    if zeta_grid.is_none() && log_ratio_grid.is_none() {
        *log_ratio_grid = Some(GridSpec {
            start: -3.0,
            stop: 3.0,
            count: 25,
        });
    }
}

pub fn parse_family(s: &str) -> Result<Family, String> {
    match s {
        "cos-cos" => Ok(Family::CosCos),
        "sin-sin" => Ok(Family::SinSin),
        other => Err(format!("unknown family `{other}` (expected cos-cos or sin-sin)")),
    }
}

fn default_cos_cos() -> Family {
    Family::CosCos
}

fn default_sin_sin() -> Family {
    Family::SinSin
}

fn default_two_thirds() -> f64 {
    2.0 / 3.0
}

fn default_one() -> f64 {
    1.0
}

fn default_junction_current() -> f64 {
    1.18
}

fn default_slow_omega() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct WaveformParams {
    #[arg(long, value_parser = parse_family, default_value = "cos-cos")]
    #[serde(default = "default_cos_cos")]
    pub family: Family,
    #[arg(long, default_value_t = 2.0 / 3.0)]
    #[serde(default = "default_two_thirds")]
    pub zeta: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub alpha: f64,
    /// Second-harmonic phase; defaults to the family's base phase.
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub omega: f64,
    /// Samples per drive period.
    #[arg(long, default_value_t = 512)]
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    512
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MapMode {
    /// `eta_ac = 2 D` from the waveform extrema.
    #[default]
    ClosedForm,
    /// Critical currents from junction simulation.
    Ode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct EfficiencyMapParams {
    #[arg(long, value_parser = parse_family, default_value = "cos-cos")]
    #[serde(default = "default_cos_cos")]
    pub family: Family,
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    #[arg(long, default_value = "0.05:4:80", allow_hyphen_values = true)]
    #[serde(default = "default_alpha_grid")]
    pub alpha_grid: GridSpec,
    #[arg(long, default_value = "0:1:200", allow_hyphen_values = true)]
    #[serde(default = "default_unit_grid")]
    pub zeta_grid: GridSpec,
    #[arg(long, value_enum, default_value_t = MapMode::ClosedForm)]
    #[serde(default)]
    pub mode: MapMode,
    /// Drive amplitude `I0` (ode mode).
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub i0: f64,
    /// Critical current `I_c` (ode mode).
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub ic: f64,
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "default_slow_omega")]
    pub omega: f64,
    #[command(flatten)]
    #[serde(default)]
    pub control: ControlOverrides,
}

fn default_alpha_grid() -> GridSpec {
    GridSpec {
        start: 0.05,
        stop: 4.0,
        count: 80,
    }
}

fn default_unit_grid() -> GridSpec {
    GridSpec {
        start: 0.0,
        stop: 1.0,
        count: 200,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct IvMapParams {
    #[arg(long, value_parser = parse_family, default_value = "sin-sin")]
    #[serde(default = "default_sin_sin")]
    pub family: Family,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    /// Drive amplitude `I0`.
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub i0: f64,
    /// Critical current `I_c`; currents and voltages are reported in units of it.
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub ic: f64,
    /// Drive frequency in units of the junction's characteristic frequency.
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "default_slow_omega")]
    pub omega: f64,
    /// Bias grid in units of `I_c`.
    #[arg(long, default_value = "-1:1:41", allow_hyphen_values = true)]
    #[serde(default = "default_bias_grid")]
    pub i_dc_grid: GridSpec,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "log_ratio_grid")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_grid: Option<GridSpec>,
    /// Grid in `ln((1 - zeta)/zeta)`; the default axis is -3:3:25.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_ratio_grid: Option<GridSpec>,
    #[command(flatten)]
    #[serde(default)]
    pub control: ControlOverrides,
}

fn default_bias_grid() -> GridSpec {
    GridSpec {
        start: -1.0,
        stop: 1.0,
        count: 41,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelMethod {
    /// Closed-form edges in the slow-drive limit.
    #[default]
    Adiabatic,
    /// Critical-current search on the simulated junction.
    Ode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct ChannelParams {
    #[arg(long, value_parser = parse_family, default_value = "sin-sin")]
    #[serde(default = "default_sin_sin")]
    pub family: Family,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub alpha: f64,
    #[arg(long)]
    #[serde(default)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub i0: f64,
    #[arg(long, default_value_t = 1.18)]
    #[serde(default = "default_junction_current")]
    pub ic: f64,
    #[arg(long, default_value_t = 0.01)]
    #[serde(default = "default_slow_omega")]
    pub omega: f64,
    #[arg(long, value_enum, default_value_t = ChannelMethod::Adiabatic)]
    #[serde(default)]
    pub method: ChannelMethod,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "log_ratio_grid")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeta_grid: Option<GridSpec>,
    /// Grid in `ln((1 - zeta)/zeta)`; the default axis is -3:3:25.
    #[arg(long, allow_hyphen_values = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub log_ratio_grid: Option<GridSpec>,
    #[command(flatten)]
    #[serde(default)]
    pub control: ControlOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
#[command(allow_negative_numbers = true)]
pub struct NoiseSweepParams {
    /// Total drive `e (V_1 + V_2) / (hbar w)`.
    #[arg(long, default_value_t = 8.1)]
    #[serde(default = "default_total")]
    pub total: f64,
    /// Dc bias `e V_dc / (hbar w)`.
    #[arg(long, default_value_t = 4.0)]
    #[serde(default = "default_q")]
    pub q: f64,
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub phi: f64,
    #[arg(long, default_value = "0.01:0.99:490", allow_hyphen_values = true)]
    #[serde(default = "default_noise_grid")]
    pub zeta_grid: GridSpec,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub conductance: f64,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_one")]
    pub fano: f64,
}

fn default_total() -> f64 {
    8.1
}

fn default_q() -> f64 {
    4.0
}

fn default_noise_grid() -> GridSpec {
    GridSpec {
        start: 0.01,
        stop: 0.99,
        count: 490,
    }
}

/// Optional overrides of the simulation and boundary-search defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize, Args)]
#[serde(deny_unknown_fields)]
pub struct ControlOverrides {
    /// Integration step in units of the relaxation time.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transient_periods: Option<u32>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub average_periods: Option<u32>,
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_phase: Option<f64>,
    /// Voltage below which the junction counts as superconducting.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_threshold: Option<f64>,
    /// Bisection tolerance on the critical current.
    #[arg(long)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_tolerance: Option<f64>,
}

impl ControlOverrides {
    pub fn sim_control(&self, omega: f64) -> SimControl {
        let mut control = SimControl::for_omega(omega);
        if let Some(dt) = self.dt {
            control.dt = dt;
        }
        if let Some(n) = self.transient_periods {
            control.transient_periods = n;
        }
        if let Some(n) = self.average_periods {
            control.average_periods = n;
        }
        if let Some(phase) = self.initial_phase {
            control.initial_phase = phase;
        }
        control
    }

    pub fn boundary_scan(&self, omega: f64) -> BoundaryScan {
        let mut scan = BoundaryScan::new(self.sim_control(omega));
        if let Some(v) = self.v_threshold {
            scan.v_threshold = v;
        }
        if let Some(t) = self.bias_tolerance {
            scan.tolerance = t;
        }
        scan
    }
}
