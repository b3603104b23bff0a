//! Validation and execution of a resolved [`Command`].

use biharmonic::grid::{refine_argmax, SweepGrid};
use biharmonic::junction::{
    adiabatic_channel, efficiency_map, log_zeta_ratio, ode_channel, voltage_map, zeta_grid_from_log_ratio,
    BoundaryScan, Channel, EfficiencyMode, SimControl,
};
use biharmonic::shotnoise::{self, NoiseSetup, MAX_TRUNCATION, TAIL_TOLERANCE};
use biharmonic::waveform::{self, canonical_phase, BiharmonicSpec, Family, CANONICAL_PHASE_TOL};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::*;
use crate::error::{as_flag, CliError};
use crate::grid_spec::GridSpec;

/// Column-oriented result of one run; `None` marks a masked cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Option<f64>>>,
}

/// Table plus the numbers worth reading without opening it.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub summary: Value,
    pub tolerances: Value,
}

/// A command whose parameters have all been checked.
#[derive(Debug, Clone)]
pub enum Job {
    Waveform {
        spec: BiharmonicSpec,
        samples: usize,
    },
    EfficiencyMap {
        family: Family,
        theta: f64,
        alpha: SweepGrid,
        zeta: SweepGrid,
        mode: EfficiencyMode,
    },
    IvMap {
        template: BiharmonicSpec,
        i_dc: SweepGrid,
        zeta: SweepGrid,
        control: SimControl,
    },
    Channel {
        template: BiharmonicSpec,
        zeta: SweepGrid,
        ode: Option<BoundaryScan>,
    },
    NoiseSweep {
        total: f64,
        phi: f64,
        setup: NoiseSetup,
        zeta: SweepGrid,
    },
}

/// Largest number of cells a single map may hold.
pub const MAX_MAP_CELLS: usize = 1 << 24;

fn map_size(rows: &SweepGrid, cols: &SweepGrid, flag: &str) -> Result<(), CliError> {
    ensure(
        rows.len().saturating_mul(cols.len()) <= MAX_MAP_CELLS,
        flag,
        format!("{} x {} cells exceeds {MAX_MAP_CELLS}", rows.len(), cols.len()),
    )
}

fn ensure(ok: bool, flag: &str, reason: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::invalid(flag, reason))
    }
}

fn finite(value: f64, flag: &str) -> Result<(), CliError> {
    ensure(value.is_finite(), flag, format!("{value} is not finite"))
}

fn positive(value: f64, flag: &str) -> Result<(), CliError> {
    ensure(value > 0.0 && value.is_finite(), flag, format!("{value} must be finite and > 0"))
}

fn grid(spec: &GridSpec, flag: &str) -> Result<SweepGrid, CliError> {
    spec.to_grid().map_err(|e| as_flag(e, flag))
}

fn unit_interval(grid: &SweepGrid, flag: &str) -> Result<(), CliError> {
    ensure(
        grid.first() >= 0.0 && grid.last() <= 1.0,
        flag,
        "zeta values must lie in [0, 1]",
    )
}

fn shape(zeta: f64, alpha: f64) -> Result<(), CliError> {
    ensure((0.0..=1.0).contains(&zeta), "--zeta", format!("{zeta} is outside [0, 1]"))?;
    positive(alpha, "--alpha")
}

fn drive_ratio(i0: f64, ic: f64) -> Result<f64, CliError> {
    ensure(i0 >= 0.0 && i0.is_finite(), "--i0", format!("{i0} must be finite and >= 0"))?;
    positive(ic, "--ic")?;
    Ok(i0 / ic)
}

fn control(overrides: &ControlOverrides, omega: f64) -> Result<SimControl, CliError> {
    let c = overrides.sim_control(omega);
    c.validate(omega).map_err(|e| match e {
        biharmonic::Error::InvalidParameter { name, reason } => {
            CliError::invalid(format!("--{}", name.replace('_', "-")), reason)
        }
        other => CliError::Compute(other),
    })?;
    Ok(c)
}

fn scan(overrides: &ControlOverrides, omega: f64) -> Result<BoundaryScan, CliError> {
    control(overrides, omega)?;
    let s = overrides.boundary_scan(omega);
    positive(s.v_threshold, "--v-threshold")?;
    positive(s.tolerance, "--bias-tolerance")?;
    Ok(s)
}

fn zeta_axis(zeta_grid: &Option<GridSpec>, log_ratio_grid: &Option<GridSpec>) -> Result<SweepGrid, CliError> {
    match (zeta_grid, log_ratio_grid) {
        (Some(_), Some(_)) => Err(CliError::invalid(
            "--zeta-grid",
            "give either --zeta-grid or --log-ratio-grid, not both",
        )),
        (Some(z), None) => {
            let g = grid(z, "--zeta-grid")?;
            unit_interval(&g, "--zeta-grid")?;
            Ok(g)
        }
        (None, Some(r)) => {
            let g = grid(r, "--log-ratio-grid")?;
            ensure(
                g.first() >= -700.0 && g.last() <= 700.0,
                "--log-ratio-grid",
                "values must lie in [-700, 700]",
            )?;
            zeta_grid_from_log_ratio(&g).map_err(|_| {
                CliError::invalid("--log-ratio-grid", "points collapse to the same zeta in double precision")
            })
        }
        (None, None) => Err(CliError::invalid("--log-ratio-grid", "no zeta axis given")),
    }
}

fn theta_of(theta: Option<f64>, family: Family) -> Result<f64, CliError> {
    let t = theta.unwrap_or(family.base_phase());
    finite(t, "--theta")?;
    Ok(t)
}

fn canonical_theta(family: Family, theta: f64) -> Result<(), CliError> {
    ensure(
        canonical_phase(family, theta).is_some(),
        "--theta",
        format!("{theta} is not an optimal phase of this family (closed forms need one within {CANONICAL_PHASE_TOL})"),
    )
}

fn junction_drive(
    family: Family,
    alpha: f64,
    theta: f64,
    ratio: f64,
    omega: f64,
    zeta: f64,
) -> Result<BiharmonicSpec, CliError> {
    positive(alpha, "--alpha")?;
    positive(omega, "--omega")?;
    Ok(BiharmonicSpec {
        family,
        zeta,
        alpha,
        theta,
        amplitude: ratio,
        omega,
    })
}

impl Job {
    /// Check every parameter against the preconditions of the computation it feeds.
    pub fn plan(command: &Command) -> Result<Job, CliError> {
        match command {
            Command::Waveform(p) => {
                shape(p.zeta, p.alpha)?;
                let theta = theta_of(p.theta, p.family)?;
                ensure(p.amplitude >= 0.0 && p.amplitude.is_finite(), "--amplitude", "must be finite and >= 0")?;
                positive(p.omega, "--omega")?;
                ensure((2..=1_000_000).contains(&p.samples), "--samples", "must be between 2 and 1000000")?;
                let spec = BiharmonicSpec {
                    family: p.family,
                    zeta: p.zeta,
                    alpha: p.alpha,
                    theta,
                    amplitude: p.amplitude,
                    omega: p.omega,
                };
                Ok(Job::Waveform { spec, samples: p.samples })
            }
            Command::EfficiencyMap(p) => {
                let theta = theta_of(p.theta, p.family)?;
                let alpha = grid(&p.alpha_grid, "--alpha-grid")?;
                ensure(alpha.first() > 0.0, "--alpha-grid", "alpha must be > 0")?;
                let zeta = grid(&p.zeta_grid, "--zeta-grid")?;
                unit_interval(&zeta, "--zeta-grid")?;
                map_size(&alpha, &zeta, "--zeta-grid")?;
                let mode = match p.mode {
                    MapMode::ClosedForm => {
                        canonical_theta(p.family, theta)?;
                        EfficiencyMode::ClosedForm
                    }
                    MapMode::Ode => {
                        let ratio = drive_ratio(p.i0, p.ic)?;
                        positive(p.omega, "--omega")?;
                        EfficiencyMode::Ode {
                            amplitude: ratio,
                            omega: p.omega,
                            scan: scan(&p.control, p.omega)?,
                        }
                    }
                };
                Ok(Job::EfficiencyMap {
                    family: p.family,
                    theta,
                    alpha,
                    zeta,
                    mode,
                })
            }
            Command::IvMap(p) => {
                let theta = theta_of(p.theta, p.family)?;
                let ratio = drive_ratio(p.i0, p.ic)?;
                let zeta = zeta_axis(&p.zeta_grid, &p.log_ratio_grid)?;
                let template = junction_drive(p.family, p.alpha, theta, ratio, p.omega, zeta.first())?;
                let i_dc = grid(&p.i_dc_grid, "--i-dc-grid")?;
                map_size(&zeta, &i_dc, "--i-dc-grid")?;
                let control = control(&p.control, p.omega)?;
                Ok(Job::IvMap {
                    template,
                    i_dc,
                    zeta,
                    control,
                })
            }
            Command::Channel(p) => {
                let theta = theta_of(p.theta, p.family)?;
                let ratio = drive_ratio(p.i0, p.ic)?;
                let zeta = zeta_axis(&p.zeta_grid, &p.log_ratio_grid)?;
                let template = junction_drive(p.family, p.alpha, theta, ratio, p.omega, zeta.first())?;
                let ode = match p.method {
                    ChannelMethod::Adiabatic => {
                        canonical_theta(p.family, theta)?;
                        None
                    }
                    ChannelMethod::Ode => Some(scan(&p.control, p.omega)?),
                };
                Ok(Job::Channel { template, zeta, ode })
            }
            Command::NoiseSweep(p) => {
                ensure(
                    p.total > 0.0 && p.total <= 2000.0,
                    "--total",
                    format!("{} must lie in (0, 2000]", p.total),
                )?;
                finite(p.q, "--q")?;
                finite(p.phi, "--phi")?;
                positive(p.conductance, "--conductance")?;
                positive(p.fano, "--fano")?;
                let zeta = grid(&p.zeta_grid, "--zeta-grid")?;
                ensure(
                    zeta.first() > 0.0 && zeta.last() < 1.0,
                    "--zeta-grid",
                    "zeta must lie strictly inside (0, 1)",
                )?;
                Ok(Job::NoiseSweep {
                    total: p.total,
                    phi: p.phi,
                    setup: NoiseSetup {
                        q: p.q,
                        conductance: p.conductance,
                        fano: p.fano,
                    },
                    zeta,
                })
            }
        }
    }

    pub fn execute(&self) -> Result<Outcome, CliError> {
        match self {
            Job::Waveform { spec, samples } => run_waveform(spec, *samples),
            Job::EfficiencyMap {
                family,
                theta,
                alpha,
                zeta,
                mode,
            } => run_efficiency_map(*family, *theta, alpha, zeta, mode),
            Job::IvMap {
                template,
                i_dc,
                zeta,
                control,
            } => run_iv_map(template, i_dc, zeta, control),
            Job::Channel { template, zeta, ode } => run_channel(template, zeta, ode.as_ref()),
            Job::NoiseSweep {
                total,
                phi,
                setup,
                zeta,
            } => run_noise_sweep(*total, *phi, setup, zeta),
        }
    }
}

fn run_waveform(spec: &BiharmonicSpec, samples: usize) -> Result<Outcome, CliError> {
    let normalized = waveform::normalize(spec).ok();
    let extrema = match &normalized {
        Some(n) => n.extrema,
        None => waveform::numerical_extrema(spec),
    };
    let period = spec.period();
    let rows = (0..samples)
        .map(|k| {
            let t = period * k as f64 / samples as f64;
            vec![Some(t), Some(spec.evaluate(t)), normalized.as_ref().map(|n| n.evaluate(t))]
        })
        .collect();
    let canonical = spec.canonical_phase().is_some();
    let summary = json!({
        "maximum": extrema.maximum,
        "minimum": extrema.minimum,
        "load_term": normalized.as_ref().map(|n| n.load_term()),
        "branch": format!("{:?}", extrema.branch).to_lowercase(),
        "canonical_phase": canonical,
        "eta_ac": normalized.as_ref().map(|n| 2.0 * n.load_term()),
        "impulse": normalized.as_ref().map(waveform::impulse),
        "impulse_closed_form": normalized.as_ref().map(waveform::impulse_closed_form),
        "optimal_zeta": waveform::optimal_zeta(spec.alpha).ok(),
    });
    Ok(Outcome {
        table: Table {
            columns: vec!["t", "f", "f_star"],
            rows,
        },
        summary,
        tolerances: json!({ "canonical_phase": CANONICAL_PHASE_TOL }),
    })
}

fn run_efficiency_map(
    family: Family,
    theta: f64,
    alpha: &SweepGrid,
    zeta: &SweepGrid,
    mode: &EfficiencyMode,
) -> Result<Outcome, CliError> {
    let result = efficiency_map(alpha, zeta, family, theta, mode)?;
    let mut rows = Vec::with_capacity(alpha.len() * zeta.len());
    let mut ridge = Vec::with_capacity(alpha.len());
    for (r, &a) in alpha.values().iter().enumerate() {
        let row = result.map.row(r);
        for (c, &z) in zeta.values().iter().enumerate() {
            rows.push(vec![Some(z), Some(a), row[c], Some(result.optimal_zeta[r])]);
        }
        let best = refine_argmax(zeta.values(), row);
        ridge.push(json!({
            "alpha": a,
            "zeta_argmax": best.map(|e| e.x),
            "eta_max": best.map(|e| e.value),
            "zeta_opt": result.optimal_zeta[r],
        }));
    }
    let tolerances = match mode {
        EfficiencyMode::ClosedForm => json!({ "canonical_phase": CANONICAL_PHASE_TOL }),
        EfficiencyMode::Ode { scan, .. } => scan_tolerances(scan),
    };
    Ok(Outcome {
        table: Table {
            columns: vec!["zeta", "alpha", "eta_ac", "zeta_opt"],
            rows,
        },
        summary: json!({ "masked": result.map.masked, "ridge": ridge }),
        tolerances,
    })
}

fn control_tolerances(control: &SimControl) -> Value {
    json!({
        "dt": control.dt,
        "transient_periods": control.transient_periods,
        "average_periods": control.average_periods,
        "initial_phase": control.initial_phase,
    })
}

fn scan_tolerances(scan: &BoundaryScan) -> Value {
    json!({
        "control": control_tolerances(&scan.control),
        "v_threshold": scan.v_threshold,
        "bias_tolerance": scan.tolerance,
        "initial_phases": scan.initial_phases,
        "max_bias": scan.max_bias,
    })
}

fn channel_cells(channel: Option<&Channel>) -> [Option<f64>; 2] {
    [channel.map(|c| c.lower), channel.map(|c| c.upper)]
}

fn run_iv_map(
    template: &BiharmonicSpec,
    i_dc: &SweepGrid,
    zeta: &SweepGrid,
    control: &SimControl,
) -> Result<Outcome, CliError> {
    let result = voltage_map(i_dc, zeta, template, control)?;
    let mut rows = Vec::with_capacity(i_dc.len() * zeta.len());
    for (r, &z) in zeta.values().iter().enumerate() {
        let [lower, upper] = channel_cells(result.channels[r].as_ref());
        for (c, &i) in i_dc.values().iter().enumerate() {
            rows.push(vec![
                Some(i),
                Some(result.log_zeta_ratio[r]),
                result.map.get(r, c),
                Some(z),
                lower,
                upper,
            ]);
        }
    }
    let reversed = rows
        .iter()
        .filter(|row| matches!((row[0], row[2]), (Some(i), Some(v)) if i > 0.0 && v < 0.0))
        .count();
    Ok(Outcome {
        table: Table {
            columns: vec!["i_dc", "log_zeta_ratio", "v_jj", "zeta", "channel_lower", "channel_upper"],
            rows,
        },
        summary: json!({
            "masked": result.map.masked,
            "i0_over_ic": template.amplitude,
            "omega": template.omega,
            "reversed_cells": reversed,
        }),
        tolerances: json!({ "control": control_tolerances(control) }),
    })
}

fn run_channel(template: &BiharmonicSpec, zeta: &SweepGrid, ode: Option<&BoundaryScan>) -> Result<Outcome, CliError> {
    let channels: Vec<Option<Channel>> = match ode {
        None => zeta
            .values()
            .iter()
            .map(|&z| {
                adiabatic_channel(template.family, template.alpha, template.theta, z, template.amplitude)
                    .map(Some)
            })
            .collect::<biharmonic::Result<_>>()?,
        Some(scan) => zeta
            .values()
            .par_iter()
            .map(|&z| ode_channel(&template.with_zeta(z)?, scan))
            .collect::<biharmonic::Result<_>>()?,
    };
    let rows = zeta
        .values()
        .iter()
        .zip(&channels)
        .map(|(&z, ch)| {
            let [lower, upper] = channel_cells(ch.as_ref());
            vec![
                Some(z),
                Some(log_zeta_ratio(z)).filter(|v| v.is_finite()),
                lower,
                upper,
                ch.as_ref().and_then(Channel::efficiency),
            ]
        })
        .collect();
    let tolerances = match ode {
        None => json!({ "canonical_phase": CANONICAL_PHASE_TOL }),
        Some(scan) => scan_tolerances(scan),
    };
    Ok(Outcome {
        table: Table {
            columns: vec!["zeta", "log_zeta_ratio", "channel_lower", "channel_upper", "eta"],
            rows,
        },
        summary: json!({
            "method": if ode.is_some() { "ode" } else { "adiabatic" },
            "empty_channels": channels.iter().filter(|c| c.is_none_or(|c| c.is_empty())).count(),
        }),
        tolerances,
    })
}

fn run_noise_sweep(total: f64, phi: f64, setup: &NoiseSetup, zeta: &SweepGrid) -> Result<Outcome, CliError> {
    let sweep = shotnoise::noise_sweep(total, setup, phi, zeta)?;
    let rows = zeta
        .values()
        .iter()
        .enumerate()
        .map(|(k, &z)| vec![Some(z), sweep.current_noise[k], sweep.excess_noise[k]])
        .collect();
    Ok(Outcome {
        table: Table {
            columns: vec!["zeta", "S", "S_ac"],
            rows,
        },
        summary: json!({
            "bias_quanta": sweep.bias_quanta,
            "q_rounded": sweep.q_rounded,
            "masked": sweep.masked,
            "S_min": sweep.current_noise_min,
            "S_ac_min": sweep.excess_noise_min,
        }),
        tolerances: json!({
            "tail_mass": TAIL_TOLERANCE,
            "max_truncation": MAX_TRUNCATION,
        }),
    })
}
