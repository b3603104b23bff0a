//! Photon-assisted shot noise of a tunnel junction under the voltage drive
//! `V_dc + V_1 cos(wt) + V_2 cos(2wt + phi)`, in the low-temperature limit.
//!
//! Units: `hbar = e = 1`, energies in units of `w`. A drive enters only
//! through the photon coefficients `a_n`, the Fourier amplitudes of the phase
//! factor `exp(-i int_0^t V_ac)`:
//!
//! ```text
//! a_n = sum_m J_{n-2m}(z1) J_m(z2) exp(-i m phi),   z1 = V_1/w,  z2 = V_2/(2w)
//! ```
//!
//! Noise values are returned in units of `w` and carry the `G F` prefactor
//! from [`NoiseSetup`]; with the default `G = F = 1` they are in units of `G F w`.

pub mod bessel;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{self, SweepGrid};

pub use bessel::{bessel_j, bessel_j_orders};

/// Accepted truncation: `|1 - sum |a_n|^2|` at most this.
pub const TAIL_TOLERANCE: f64 = 1e-12;
/// Truncation order is never grown beyond this.
pub const MAX_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpectrum {
    /// `e V_1 / w`.
    pub z1: f64,
    /// `e V_2 / (2 w)`.
    pub z2: f64,
    /// Phase of the `2w` tone.
    pub phi: f64,
}

impl DriveSpectrum {
    pub fn new(z1: f64, z2: f64, phi: f64) -> Result<Self> {
        let s = Self { z1, z2, phi };
        s.validate()?;
        Ok(s)
    }

    /// Split a total amplitude `e (V_1 + V_2) / w` with `zeta = V_1 / (V_1 + V_2)`.
    pub fn from_total(total: f64, zeta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&zeta) {
            return Err(Error::invalid("zeta", format!("{zeta} is outside [0, 1]")));
        }
        Self::new(zeta * total, (1.0 - zeta) * total / 2.0, phi)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z1 >= 0.0 && self.z1.is_finite()) {
            return Err(Error::invalid("z1", "must be finite and >= 0"));
        }
        if !(self.z2 >= 0.0 && self.z2.is_finite()) {
            return Err(Error::invalid("z2", "must be finite and >= 0"));
        }
        if !self.phi.is_finite() {
            return Err(Error::invalid("phi", "must be finite"));
        }
        Ok(())
    }

    /// Initial truncation order before doubling.
    pub fn initial_truncation(&self) -> usize {
        (self.z1 + 2.0 * self.z2).ceil() as usize + 20
    }

    /// Phase `int_0^t V_ac dt'` at fundamental phase `x = w t`.
    fn accumulated_phase(&self, x: f64) -> f64 {
        self.z1 * x.sin() + self.z2 * (2.0 * x + self.phi).sin()
    }
}

/// `a_n` for `n` in `[-n_max, n_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhotonCoefficients {
    /// `values[k]` holds `a_{k - n_max}`.
    pub values: Vec<Complex64>,
    pub n_max: usize,
    /// `1 - sum |a_n|^2` over the stored range.
    pub tail_mass: f64,
}

impl PhotonCoefficients {
    fn from_values(values: Vec<Complex64>, n_max: usize) -> Self {
        let mass: f64 = values.iter().map(|a| a.norm_sqr()).sum();
        Self {
            values,
            n_max,
            tail_mass: 1.0 - mass,
        }
    }

    /// `a_n`, zero outside the stored range.
    pub fn get(&self, n: i64) -> Complex64 {
        let k = n + self.n_max as i64;
        if k < 0 || k >= self.values.len() as i64 {
            Complex64::new(0.0, 0.0)
        } else {
            self.values[k as usize]
        }
    }

    /// `|a_n|^2`.
    pub fn weight(&self, n: i64) -> f64 {
        self.get(n).norm_sqr()
    }

    /// `(n, a_n)` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let offset = self.n_max as i64;
        self.values.iter().enumerate().map(move |(k, a)| (k as i64 - offset, *a))
    }

    pub fn is_converged(&self) -> bool {
        self.tail_mass.abs() <= TAIL_TOLERANCE
    }

    /// Bound on how much [`noise_power`] at bias `q` can still move from
    /// coefficients outside the stored range.
    ///
    /// `G F (|q| + n_max + 1 + r / (1 - r)) |tail_mass|`, where `r` is the
    /// decay ratio of the outermost stored weights and the last term accounts
    /// for tail mass sitting beyond `n_max + 1`. Infinite when the stored
    /// weights are not yet decaying.
    pub fn truncation_bound(&self, q: f64, setup: &NoiseSetup) -> f64 {
        let tail = self.tail_mass.abs();
        if tail == 0.0 {
            return 0.0;
        }
        let edge = self.n_max as i64;
        let ratio = [1, -1]
            .into_iter()
            .map(|side| {
                let outer = self.weight(side * edge);
                let inner = self.weight(side * (edge - 1));
                if outer == 0.0 { 0.0 } else { outer / inner }
            })
            .fold(0.0, f64::max);
        if edge < 1 || !(ratio < 1.0) {
            return f64::INFINITY;
        }
        setup.scale() * (q.abs() + self.n_max as f64 + 1.0 + ratio / (1.0 - ratio)) * tail
    }
}

/// Orders beyond this carry `J_m(z2)` below double precision.
fn second_tone_reach(z2: f64) -> usize {
    (z2 + 12.0 * z2.cbrt() + 40.0).ceil() as usize
}

/// Bessel-sum coefficients at a fixed truncation order.
///
/// Every stored `a_n` is exact to rounding; only `|n| > n_max` is dropped.
pub fn photon_coefficients_at(spec: &DriveSpectrum, n_max: usize) -> Result<PhotonCoefficients> {
    spec.validate()?;
    let m_max = second_tone_reach(spec.z2);
    let j1 = bessel_j_orders(n_max + 2 * m_max, spec.z1);
    let j2 = bessel_j_orders(m_max, spec.z2);
    let signed = |table: &[f64], k: i64| -> f64 {
        let idx = k.unsigned_abs() as usize;
        match table.get(idx) {
            Some(&v) if k < 0 && idx % 2 == 1 => -v,
            Some(&v) => v,
            None => 0.0,
        }
    };
    let m_max = m_max as i64;
    let phases: Vec<Complex64> = (-m_max..=m_max)
        .map(|m| Complex64::from_polar(1.0, -(m as f64) * spec.phi))
        .collect();

    let values = (-(n_max as i64)..=n_max as i64)
        .map(|n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for m in -m_max..=m_max {
                let jm = signed(&j2, m);
                if jm == 0.0 {
                    continue;
                }
                acc += phases[(m + m_max) as usize] * (signed(&j1, n - 2 * m) * jm);
            }
            acc
        })
        .collect();
    Ok(PhotonCoefficients::from_values(values, n_max))
}

/// Grow the truncation by doubling from `max(n_max, z1 + 2 z2 + 20)` until the
/// tail mass drops below [`TAIL_TOLERANCE`].
fn grow_until_converged(
    spec: &DriveSpectrum,
    n_max: usize,
    compute: impl Fn(&DriveSpectrum, usize) -> Result<PhotonCoefficients>,
) -> Result<PhotonCoefficients> {
    spec.validate()?;
    let mut order = n_max.max(spec.initial_truncation());
    loop {
        let coeffs = compute(spec, order)?;
        if coeffs.is_converged() {
            return Ok(coeffs);
        }
        if order >= MAX_TRUNCATION {
            return Err(Error::Convergence {
                n_max: order,
                tail_mass: coeffs.tail_mass,
            });
        }
        order = (order * 2).min(MAX_TRUNCATION);
    }
}

/// Photon coefficients from the Bessel sum, with automatic truncation.
pub fn photon_coefficients(spec: &DriveSpectrum, n_max: usize) -> Result<PhotonCoefficients> {
    grow_until_converged(spec, n_max, photon_coefficients_at)
}

/// Photon coefficients as discrete Fourier coefficients of
/// `exp(-i int_0^t V_ac)` sampled on a uniform periodic grid.
///
/// Independent of the Bessel route; used to cross-check it.
pub fn photon_coefficients_quadrature(spec: &DriveSpectrum, n_max: usize) -> Result<PhotonCoefficients> {
    grow_until_converged(spec, n_max, |s, order| {
        let bandwidth = order as f64 + s.z1 + 2.0 * s.z2;
        let samples = (4.0 * bandwidth).max(4096.0).ceil() as usize;
        let samples = samples.next_power_of_two();
        let step = TAU / samples as f64;
        let twiddles: Vec<Complex64> = (0..samples)
            .map(|k| Complex64::from_polar(1.0, k as f64 * step))
            .collect();
        let field: Vec<Complex64> = (0..samples)
            .map(|k| Complex64::from_polar(1.0, -s.accumulated_phase(k as f64 * step)))
            .collect();
        let values = (-(order as i64)..=order as i64)
            .map(|n| {
                let stride = n.rem_euclid(samples as i64) as usize;
                let sum: Complex64 = field
                    .iter()
                    .enumerate()
                    .map(|(k, f)| f * twiddles[(k * stride) % samples])
                    .sum();
                sum / samples as f64
            })
            .collect();
        Ok(PhotonCoefficients::from_values(values, order))
    })
}

/// Bias and junction constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSetup {
    /// `e V_dc / w`; any real value for [`noise_power`].
    pub q: f64,
    pub conductance: f64,
    pub fano: f64,
}

impl NoiseSetup {
    pub fn new(q: f64) -> Self {
        Self {
            q,
            conductance: 1.0,
            fano: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.q.is_finite() {
            return Err(Error::invalid("q", "must be finite"));
        }
        if !(self.conductance > 0.0 && self.conductance.is_finite()) {
            return Err(Error::invalid("conductance", "must be finite and > 0"));
        }
        if !(self.fano > 0.0 && self.fano.is_finite()) {
            return Err(Error::invalid("fano", "must be finite and > 0"));
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        self.conductance * self.fano
    }
}

/// Current noise `S = G F sum_n |q + n| |a_n|^2`.
pub fn noise_power(coeffs: &PhotonCoefficients, setup: &NoiseSetup) -> f64 {
    let sum: f64 = coeffs
        .iter()
        .map(|(n, a)| (setup.q + n as f64).abs() * a.norm_sqr())
        .sum();
    setup.scale() * sum
}

/// Excess noise at integer bias `N`:
/// `2 G F sum_{k>=1} k |a_{-N-k}|^2` for `N >= 0`, `2 G F sum_{k>=1} k |a_{-N+k}|^2` for `N < 0`.
///
/// Only the `G F` prefactor of `setup` is used.
pub fn excess_noise(coeffs: &PhotonCoefficients, bias_quanta: i64, setup: &NoiseSetup) -> f64 {
    let reach = coeffs.n_max as i64 + bias_quanta.abs() + 1;
    let sum: f64 = (1..=reach)
        .map(|k| {
            let index = if bias_quanta >= 0 { -bias_quanta - k } else { -bias_quanta + k };
            k as f64 * coeffs.weight(index)
        })
        .sum();
    2.0 * setup.scale() * sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepMinimum {
    pub zeta: f64,
    pub value: f64,
}

/// Noise along a `zeta` sweep at fixed total amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweep {
    pub zeta: SweepGrid,
    pub total: f64,
    pub phi: f64,
    pub setup: NoiseSetup,
    /// Integer bias used for the excess noise.
    pub bias_quanta: i64,
    /// True when `q` was not an integer and had to be rounded.
    pub q_rounded: bool,
    pub current_noise: Vec<Option<f64>>,
    pub excess_noise: Vec<Option<f64>>,
    pub current_noise_min: Option<SweepMinimum>,
    pub excess_noise_min: Option<SweepMinimum>,
    /// Points whose coefficients failed to converge.
    pub masked: usize,
}

/// Sweep `zeta = V_1 / (V_1 + V_2)` at fixed `total = e (V_1 + V_2) / w`.
pub fn noise_sweep(total: f64, setup: &NoiseSetup, phi: f64, zeta_grid: &SweepGrid) -> Result<NoiseSweep> {
    setup.validate()?;
    if !(total > 0.0 && total.is_finite()) {
        return Err(Error::invalid("total", "must be finite and > 0"));
    }
    if !phi.is_finite() {
        return Err(Error::invalid("phi", "must be finite"));
    }
    if zeta_grid.first() <= 0.0 || zeta_grid.last() >= 1.0 {
        return Err(Error::invalid("zeta_grid", "zeta must lie strictly inside (0, 1)"));
    }
    let bias_quanta = setup.q.round() as i64;
    let q_rounded = bias_quanta as f64 != setup.q;

    let points: Vec<Option<(f64, f64)>> = zeta_grid
        .values()
        .par_iter()
        .map(|&zeta| {
            let spec = DriveSpectrum::from_total(total, zeta, phi).ok()?;
            let coeffs = photon_coefficients(&spec, 0).ok()?;
            Some((noise_power(&coeffs, setup), excess_noise(&coeffs, bias_quanta, setup)))
        })
        .collect();

    let current_noise: Vec<Option<f64>> = points.iter().map(|p| p.map(|v| v.0)).collect();
    let excess: Vec<Option<f64>> = points.iter().map(|p| p.map(|v| v.1)).collect();
    let minimum = |ys: &[Option<f64>]| {
        grid::refine_argmin(zeta_grid.values(), ys).map(|e| SweepMinimum {
            zeta: e.x,
            value: e.value,
        })
    };
    Ok(NoiseSweep {
        zeta: zeta_grid.clone(),
        total,
        phi,
        setup: *setup,
        bias_quanta,
        q_rounded,
        current_noise_min: minimum(&current_noise),
        excess_noise_min: minimum(&excess),
        masked: points.iter().filter(|p| p.is_none()).count(),
        current_noise,
        excess_noise: excess,
    })
}
