//! Overdamped RCSJ junction under a biharmonic drive.
//!
//! In units where the critical current is 1 and time is measured in
//! `1/w_c` (`w_c = 2 e I_c R / hbar`), the phase obeys
//!
//! ```text
//! dphi/dtau = i_dc + i_ac(tau) - sin(phi)
//! ```
//!
//! and the dc voltage is `<dphi/dtau>` in units of `hbar w_c / (2e)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{MapResult, SweepGrid};
use crate::waveform::{self, BiharmonicSpec, Family};

/// Largest step that resolves both one drive period and one relaxation time
/// with at least 100 steps.
pub fn max_step(omega: f64) -> f64 {
    (0.01 * TAU / omega).min(0.01)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionConfig {
    /// `I_dc / I_c`.
    pub i_dc: f64,
    /// Drive with `amplitude = I0 / I_c` and `omega = w / w_c`.
    pub drive: BiharmonicSpec,
    /// Physical `I_c`, only used to re-dimensionalize outputs.
    pub critical_current: f64,
}

impl JunctionConfig {
    pub fn new(i_dc: f64, drive: BiharmonicSpec) -> Self {
        Self {
            i_dc,
            drive,
            critical_current: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.drive.validate()?;
        if !self.i_dc.is_finite() {
            return Err(Error::invalid("i_dc", "must be finite"));
        }
        if !(self.critical_current > 0.0 && self.critical_current.is_finite()) {
            return Err(Error::invalid("critical_current", "must be finite and > 0"));
        }
        Ok(())
    }
}

/// Time-stepping controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimControl {
    /// Requested step in `1/w_c`. The integrator rounds it down so that a
    /// drive period is an integer number of steps.
    pub dt: f64,
    pub transient_periods: u32,
    pub average_periods: u32,
    pub initial_phase: f64,
}

impl SimControl {
    /// Default controls for drive frequency `omega`: the largest allowed step,
    /// at least 200 relaxation times (and 2 periods) of transient and at least
    /// 20000 relaxation times (and 4 periods) of averaging.
    pub fn for_omega(omega: f64) -> Self {
        let period = TAU / omega;
        Self {
            dt: max_step(omega),
            transient_periods: ((200.0 / period).ceil() as u32).max(2),
            average_periods: ((20_000.0 / period).ceil() as u32).max(4),
            initial_phase: 0.0,
        }
    }

    pub fn validate(&self, omega: f64) -> Result<()> {
        let limit = max_step(omega);
        if !(self.dt > 0.0 && self.dt <= limit * (1.0 + 1e-12)) {
            return Err(Error::invalid(
                "dt",
                format!("{} must be in (0, {limit}] for omega = {omega}", self.dt),
            ));
        }
        if self.transient_periods < 1 {
            return Err(Error::invalid("transient_periods", "must be >= 1"));
        }
        if self.average_periods < 1 {
            return Err(Error::invalid("average_periods", "must be >= 1"));
        }
        if !self.initial_phase.is_finite() {
            return Err(Error::invalid("initial_phase", "must be finite"));
        }
        Ok(())
    }

    pub fn with_initial_phase(self, initial_phase: f64) -> Self {
        Self { initial_phase, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JunctionResult {
    /// `<dphi/dtau>` in units of `w_c`.
    pub mean_voltage: f64,
    /// Net `2 pi` phase slips per drive period over the averaging window.
    pub winding_number_rate: f64,
}

/// Integrate the phase equation with fixed-step classical RK4 and average
/// `dphi/dtau` over an integer number of drive periods.
pub fn integrate_phase(config: &JunctionConfig, control: &SimControl) -> Result<JunctionResult> {
    config.validate()?;
    let omega = config.drive.omega;
    control.validate(omega)?;

    let period = TAU / omega;
    let steps = (period / control.dt).ceil().max(1.0) as usize;
    let h = period / steps as f64;

    // Total forcing sampled at every half step of one period.
    let half = h / 2.0;
    let forcing: Vec<f64> = (0..2 * steps)
        .map(|k| config.i_dc + config.drive.evaluate(k as f64 * half))
        .collect();

    let mut phi = control.initial_phase;
    let run_periods = |phi: &mut f64, periods: u32, offset: u32| -> Result<()> {
        for p in 0..periods {
            let mut x = *phi;
            for j in 0..steps {
                let f0 = forcing[2 * j];
                let fm = forcing[2 * j + 1];
                let f1 = if j + 1 == steps { forcing[0] } else { forcing[2 * j + 2] };
                let k1 = f0 - x.sin();
                let k2 = fm - (x + half * k1).sin();
                let k3 = fm - (x + half * k2).sin();
                let k4 = f1 - (x + h * k3).sin();
                x += h / 6.0 * (k1 + 2.0 * (k2 + k3) + k4);
            }
            if !x.is_finite() {
                return Err(Error::IntegrationFailure {
                    tau: (offset + p + 1) as f64 * period,
                });
            }
            *phi = x;
        }
        Ok(())
    };

    run_periods(&mut phi, control.transient_periods, 0)?;
    let start = phi;
    run_periods(&mut phi, control.average_periods, control.transient_periods)?;
    let advance = phi - start;

    let span = control.average_periods as f64 * period;
    Ok(JunctionResult {
        mean_voltage: advance / span,
        winding_number_rate: advance / TAU / control.average_periods as f64,
    })
}

/// Direction of a critical-current search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }
}

/// Settings for locating zero-voltage boundaries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryScan {
    pub control: SimControl,
    /// `|<dphi/dtau>|` below this counts as zero voltage.
    pub v_threshold: f64,
    /// Final bracket width of the bisection.
    pub tolerance: f64,
    /// Every bias is simulated from each of these initial phases; any running
    /// run marks the bias as running.
    pub initial_phases: Vec<f64>,
    /// Doubling search gives up beyond this `|i_dc|`.
    pub max_bias: f64,
}

impl BoundaryScan {
    pub fn new(control: SimControl) -> Self {
        Self {
            control,
            v_threshold: 1e-4,
            tolerance: 1e-4,
            initial_phases: vec![0.0, FRAC_PI_2, PI],
            max_bias: 64.0,
        }
    }

    pub fn for_omega(omega: f64) -> Self {
        Self::new(SimControl::for_omega(omega))
    }

    fn validate(&self) -> Result<()> {
        if !(self.v_threshold > 0.0) {
            return Err(Error::invalid("v_threshold", "must be > 0"));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::invalid("tolerance", "must be > 0"));
        }
        if self.initial_phases.is_empty() {
            return Err(Error::invalid("initial_phases", "need at least one initial phase"));
        }
        if !(self.max_bias > 0.5) {
            return Err(Error::invalid("max_bias", "must exceed 0.5"));
        }
        Ok(())
    }

    fn is_running(&self, drive: &BiharmonicSpec, i_dc: f64) -> Result<bool> {
        for &phase in &self.initial_phases {
            let config = JunctionConfig::new(i_dc, *drive);
            let result = integrate_phase(&config, &self.control.with_initial_phase(phase))?;
            if result.mean_voltage.abs() >= self.v_threshold {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Outcome of a critical-current search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ChannelEdge {
    /// Signed bias of the last zero-voltage point.
    Edge(f64),
    /// The junction already runs at zero bias.
    EmptyChannel,
}

/// Largest `|i_dc|` in `direction` that keeps `|V| < v_threshold`, found by
/// doubling out from zero and then bisecting.
pub fn critical_current(drive: &BiharmonicSpec, direction: Direction, scan: &BoundaryScan) -> Result<ChannelEdge> {
    scan.validate()?;
    drive.validate()?;
    if scan.is_running(drive, 0.0)? {
        return Ok(ChannelEdge::EmptyChannel);
    }
    let sign = direction.sign();
    let mut lo = 0.0;
    let mut hi = 0.5;
    while !scan.is_running(drive, sign * hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > scan.max_bias {
            return Err(Error::BracketNotFound { limit: scan.max_bias });
        }
    }
    while hi - lo > scan.tolerance {
        let mid = 0.5 * (lo + hi);
        if scan.is_running(drive, sign * mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ChannelEdge::Edge(sign * lo))
}

/// Zero-voltage interval in units of `I_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub lower: f64,
    pub upper: f64,
}

impl Channel {
    pub fn is_empty(&self) -> bool {
        self.lower > self.upper
    }

    /// `|lower + upper| / |upper - lower|`, undefined for a degenerate channel.
    pub fn efficiency(&self) -> Option<f64> {
        let width = (self.upper - self.lower).abs();
        (width > 0.0 && !self.is_empty()).then(|| (self.lower + self.upper).abs() / width)
    }
}

/// Both critical currents and the resulting efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiodeEfficiency {
    pub eta: f64,
    pub i_c_plus: f64,
    pub i_c_minus: f64,
}

/// Zero-voltage channel found by simulation, or `None` when the junction
/// runs at zero bias.
pub fn ode_channel(drive: &BiharmonicSpec, scan: &BoundaryScan) -> Result<Option<Channel>> {
    let upper = match critical_current(drive, Direction::Positive, scan)? {
        ChannelEdge::Edge(v) => v,
        ChannelEdge::EmptyChannel => return Ok(None),
    };
    let lower = match critical_current(drive, Direction::Negative, scan)? {
        ChannelEdge::Edge(v) => v,
        ChannelEdge::EmptyChannel => return Ok(None),
    };
    Ok(Some(Channel { lower, upper }))
}

/// `eta = |i_c+ + i_c-| / |i_c+ - i_c-|`; `None` when the channel is empty.
pub fn diode_efficiency(drive: &BiharmonicSpec, scan: &BoundaryScan) -> Result<Option<DiodeEfficiency>> {
    let Some(channel) = ode_channel(drive, scan)? else {
        return Ok(None);
    };
    Ok(channel.efficiency().map(|eta| DiodeEfficiency {
        eta,
        i_c_plus: channel.upper,
        i_c_minus: channel.lower,
    }))
}

/// Channel in the adiabatic limit: zero voltage requires
/// `-1 <= i_dc + (I0/I_c) f(t) <= 1` at all times, so
/// `lower = -1 - (I0/I_c) m` and `upper = 1 - (I0/I_c) M`.
pub fn adiabatic_channel(family: Family, alpha: f64, theta: f64, zeta: f64, i0_over_ic: f64) -> Result<Channel> {
    if !(i0_over_ic >= 0.0 && i0_over_ic.is_finite()) {
        return Err(Error::invalid("i0_over_ic", "must be finite and >= 0"));
    }
    let e = waveform::canonical_extrema(family, theta, zeta, alpha)?;
    Ok(Channel {
        lower: -1.0 - i0_over_ic * e.minimum,
        upper: 1.0 - i0_over_ic * e.maximum,
    })
}

/// How [`efficiency_map`] fills its cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum EfficiencyMode {
    /// `eta_ac = 2 D` from the waveform extrema.
    ClosedForm,
    /// Simulated `eta` from both critical currents.
    Ode {
        /// `I0 / I_c`.
        amplitude: f64,
        omega: f64,
        scan: BoundaryScan,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyMap {
    /// Rows are `alpha`, columns `zeta`.
    pub map: MapResult,
    /// `zeta_opt(alpha)` for every row.
    pub optimal_zeta: Vec<f64>,
}

/// Diode efficiency over an `alpha x zeta` grid.
pub fn efficiency_map(
    alpha_grid: &SweepGrid,
    zeta_grid: &SweepGrid,
    family: Family,
    theta: f64,
    mode: &EfficiencyMode,
) -> Result<EfficiencyMap> {
    if alpha_grid.first() <= 0.0 {
        return Err(Error::invalid("alpha_grid", "alpha must be > 0"));
    }
    if zeta_grid.first() < 0.0 || zeta_grid.last() > 1.0 {
        return Err(Error::invalid("zeta_grid", "zeta must lie in [0, 1]"));
    }
    if matches!(mode, EfficiencyMode::ClosedForm) && waveform::canonical_phase(family, theta).is_none() {
        return Err(Error::invalid("theta", "closed-form mode needs a canonical phase"));
    }
    let cells: Vec<(f64, f64)> = alpha_grid
        .values()
        .iter()
        .flat_map(|&a| zeta_grid.values().iter().map(move |&z| (a, z)))
        .collect();
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(alpha, zeta)| match mode {
            EfficiencyMode::ClosedForm => waveform::waveform_diode_efficiency(family, alpha, theta, zeta).ok(),
            EfficiencyMode::Ode { amplitude, omega, scan } => {
                let drive = BiharmonicSpec {
                    family,
                    zeta,
                    alpha,
                    theta,
                    amplitude: *amplitude,
                    omega: *omega,
                };
                diode_efficiency(&drive, scan).ok().flatten().map(|d| d.eta)
            }
        })
        .collect();
    let optimal_zeta = alpha_grid
        .values()
        .iter()
        .map(|&a| waveform::optimal_zeta(a))
        .collect::<Result<Vec<_>>>()?;
    Ok(EfficiencyMap {
        map: MapResult::new(alpha_grid.clone(), zeta_grid.clone(), values),
        optimal_zeta,
    })
}

/// `ln((1 - zeta) / zeta)`.
pub fn log_zeta_ratio(zeta: f64) -> f64 {
    ((1.0 - zeta) / zeta).ln()
}

/// Inverse of [`log_zeta_ratio`].
pub fn zeta_from_log_ratio(ratio: f64) -> f64 {
    1.0 / (1.0 + ratio.exp())
}

/// Ascending `zeta` grid whose points are uniform in `ln((1 - zeta)/zeta)`.
pub fn zeta_grid_from_log_ratio(log_ratio_grid: &SweepGrid) -> Result<SweepGrid> {
    let mut zetas: Vec<f64> = log_ratio_grid.values().iter().map(|&r| zeta_from_log_ratio(r)).collect();
    zetas.reverse();
    SweepGrid::from_values(zetas)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoltageMap {
    /// Rows are `zeta`, columns `i_dc`.
    pub map: MapResult,
    /// `ln((1 - zeta)/zeta)` per row.
    pub log_zeta_ratio: Vec<f64>,
    /// Adiabatic channel per row (`None` at non-canonical phases).
    pub channels: Vec<Option<Channel>>,
}

/// Mean voltage over an `i_dc x zeta` grid for a fixed drive template.
pub fn voltage_map(
    i_dc_grid: &SweepGrid,
    zeta_grid: &SweepGrid,
    template: &BiharmonicSpec,
    control: &SimControl,
) -> Result<VoltageMap> {
    template.validate()?;
    control.validate(template.omega)?;
    let drives = zeta_grid
        .values()
        .iter()
        .map(|&z| template.with_zeta(z))
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, f64)> = (0..drives.len())
        .flat_map(|r| i_dc_grid.values().iter().map(move |&i| (r, i)))
        .collect();
    let values: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(r, i_dc)| {
            integrate_phase(&JunctionConfig::new(i_dc, drives[r]), control)
                .ok()
                .map(|res| res.mean_voltage)
        })
        .collect();
    let channels = drives
        .iter()
        .map(|d| adiabatic_channel(d.family, d.alpha, d.theta, d.zeta, d.amplitude).ok())
        .collect();
    Ok(VoltageMap {
        map: MapResult::new(zeta_grid.clone(), i_dc_grid.clone(), values),
        log_zeta_ratio: zeta_grid.values().iter().map(|&z| log_zeta_ratio(z)).collect(),
        channels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IvPoint {
    pub i_dc: f64,
    pub mean_voltage: f64,
    pub winding_number_rate: f64,
}

/// `(i_dc, <dphi/dtau>)` along a bias grid.
pub fn iv_curve(drive: &BiharmonicSpec, i_dc_grid: &SweepGrid, control: &SimControl) -> Result<Vec<IvPoint>> {
    i_dc_grid
        .values()
        .par_iter()
        .map(|&i_dc| {
            let r = integrate_phase(&JunctionConfig::new(i_dc, *drive), control)?;
            Ok(IvPoint {
                i_dc,
                mean_voltage: r.mean_voltage,
                winding_number_rate: r.winding_number_rate,
            })
        })
        .collect()
}
