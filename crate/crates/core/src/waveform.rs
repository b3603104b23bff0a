//! Algebra of the biharmonic drive
//!
//! ```text
//! f(t) = I0 * [ zeta * h(w t) + alpha * (1 - zeta) * h(2 w t + theta) ]
//! ```
//!
//! with `h = cos` ([`Family::CosCos`]) or `h = sin` ([`Family::SinSin`]).
//! `zeta` is the relative weight of the fundamental and `alpha` a prefactor
//! on the second harmonic, so the harmonic amplitudes are
//! `I1 = I0 * zeta` and `I2 = I0 * alpha * (1 - zeta)`.
//!
//! The closed forms here are exact at the canonical phases (`theta = 0, pi`
//! for cos-cos and `theta = +-pi/2` for sin-sin). At any other phase only
//! [`numerical_extrema`] applies. All shape quantities (extrema, load term,
//! `eta_ac`) are computed at unit amplitude; callers scale by `I0`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used to snap a user-supplied phase onto a canonical value.
pub const CANONICAL_PHASE_TOL: f64 = 1e-6;

/// Which harmonic basis the drive uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// `zeta cos(wt) + alpha (1 - zeta) cos(2wt + theta)`
    CosCos,
    /// `zeta sin(wt) + alpha (1 - zeta) sin(2wt + theta)`
    SinSin,
}

impl Family {
    fn harmonic(self, x: f64) -> f64 {
        match self {
            Family::CosCos => x.cos(),
            Family::SinSin => x.sin(),
        }
    }

    fn harmonic_derivative(self, x: f64) -> f64 {
        match self {
            Family::CosCos => -x.sin(),
            Family::SinSin => x.cos(),
        }
    }

    /// Phase at which the shape is described by [`closed_form_extrema`].
    pub fn base_phase(self) -> f64 {
        match self {
            Family::CosCos => 0.0,
            Family::SinSin => FRAC_PI_2,
        }
    }

    /// Phase of `w t` where the fundamental harmonic has its maximum.
    fn fundamental_peak(self) -> f64 {
        match self {
            Family::CosCos => 0.0,
            Family::SinSin => FRAC_PI_2,
        }
    }
}

/// Canonical phases, i.e. those with closed-form extrema.
///
/// `Base` is the phase of [`Family::base_phase`]; `Flipped` is the other
/// canonical phase (`pi` for cos-cos, `-pi/2` for sin-sin), whose waveform is
/// the negated, time-shifted base waveform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CanonicalPhase {
    Base,
    Flipped,
}

/// Wrap an angle into `(-pi, pi]`.
pub fn wrap_phase(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(TAU);
    if t > PI {
        t -= TAU;
    }
    t
}

/// Classify `theta` as one of the canonical phases for `family`.
pub fn canonical_phase(family: Family, theta: f64) -> Option<CanonicalPhase> {
    let near = |a: f64, b: f64| wrap_phase(a - b).abs() <= CANONICAL_PHASE_TOL;
    match family {
        Family::CosCos if near(theta, 0.0) => Some(CanonicalPhase::Base),
        Family::CosCos if near(theta, PI) => Some(CanonicalPhase::Flipped),
        Family::SinSin if near(theta, FRAC_PI_2) => Some(CanonicalPhase::Base),
        Family::SinSin if near(theta, -FRAC_PI_2) => Some(CanonicalPhase::Flipped),
        _ => None,
    }
}

/// Full description of a two-tone drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiharmonicSpec {
    pub family: Family,
    /// Relative weight of the fundamental, in `[0, 1]`.
    pub zeta: f64,
    /// Second-harmonic prefactor, `> 0`.
    pub alpha: f64,
    /// Relative phase of the second harmonic, radians.
    pub theta: f64,
    /// Overall scale `I0`.
    pub amplitude: f64,
    /// Angular frequency of the fundamental.
    pub omega: f64,
}

impl BiharmonicSpec {
    /// Unit amplitude, unit frequency drive.
    pub fn new(family: Family, zeta: f64, alpha: f64, theta: f64) -> Result<Self> {
        let spec = Self {
            family,
            zeta,
            alpha,
            theta,
            amplitude: 1.0,
            omega: 1.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_amplitude(self, amplitude: f64) -> Result<Self> {
        let spec = Self { amplitude, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_omega(self, omega: f64) -> Result<Self> {
        let spec = Self { omega, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_zeta(self, zeta: f64) -> Result<Self> {
        let spec = Self { zeta, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        let spec = Self { alpha, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_theta(self, theta: f64) -> Result<Self> {
        let spec = Self { theta, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        validate_shape(self.zeta, self.alpha)?;
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        if !(self.amplitude >= 0.0 && self.amplitude.is_finite()) {
            return Err(Error::invalid("amplitude", "must be finite and >= 0"));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::invalid("omega", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Fundamental amplitude `I0 * zeta`.
    pub fn first_harmonic(&self) -> f64 {
        self.amplitude * self.zeta
    }

    /// Second-harmonic amplitude `I0 * alpha * (1 - zeta)`.
    pub fn second_harmonic(&self) -> f64 {
        self.amplitude * self.alpha * (1.0 - self.zeta)
    }

    pub fn period(&self) -> f64 {
        TAU / self.omega
    }

    /// Drive value at time `t` (in units of the inverse reference frequency).
    pub fn evaluate(&self, t: f64) -> f64 {
        self.evaluate_phase(self.omega * t)
    }

    /// Drive value at fundamental phase `x = w t`.
    pub fn evaluate_phase(&self, x: f64) -> f64 {
        let h = self.family;
        self.amplitude
            * (self.zeta * h.harmonic(x) + self.alpha * (1.0 - self.zeta) * h.harmonic(2.0 * x + self.theta))
    }

    fn derivative_phase(&self, x: f64) -> f64 {
        let h = self.family;
        self.amplitude
            * (self.zeta * h.harmonic_derivative(x)
                + 2.0 * self.alpha * (1.0 - self.zeta) * h.harmonic_derivative(2.0 * x + self.theta))
    }

    pub fn canonical_phase(&self) -> Option<CanonicalPhase> {
        canonical_phase(self.family, self.theta)
    }
}

fn validate_shape(zeta: f64, alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&zeta) {
        return Err(Error::invalid("zeta", format!("{zeta} is outside [0, 1]")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be finite and > 0")));
    }
    Ok(())
}

/// Which piecewise branch produced the extremum that depends on `zeta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Stationary point strictly inside the period (vertex of the quadratic).
    Interior,
    /// Extremum where the fundamental harmonic is itself at `+-1`.
    Endpoint,
}

/// Maximum `M`, minimum `m` and load term `D = (M + m) / (2 (M - m))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveformExtrema {
    pub maximum: f64,
    pub minimum: f64,
    pub load_term: f64,
    pub branch: Branch,
}

impl WaveformExtrema {
    pub fn from_bounds(maximum: f64, minimum: f64, branch: Branch) -> Self {
        let spread = maximum - minimum;
        let load_term = if spread > 0.0 {
            (maximum + minimum) / (2.0 * spread)
        } else {
            0.0
        };
        Self {
            maximum,
            minimum,
            load_term,
            branch,
        }
    }

    /// Extrema of the waveform multiplied by `factor` (negative flips roles).
    pub fn scaled(&self, factor: f64) -> Self {
        if factor >= 0.0 {
            Self::from_bounds(self.maximum * factor, self.minimum * factor, self.branch)
        } else {
            Self::from_bounds(self.minimum * factor, self.maximum * factor, self.branch)
        }
    }

    /// Extrema of the negated waveform.
    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }
}

/// Closed-form extrema of the unit-amplitude shape at the base phase
/// (`theta = 0` for cos-cos, `theta = pi/2` for sin-sin).
///
/// Writing `c = cos(wt)`, the cos-cos shape is the quadratic
/// `2a c^2 + zeta c - a` with `a = alpha (1 - zeta)`. Its maximum is always at
/// `c = 1`; the minimum sits at the vertex `c = -zeta / (4a)` while that lies
/// in `[-1, 1]`, i.e. for `zeta < 4 alpha / (1 + 4 alpha)`, and at `c = -1`
/// otherwise. The sin-sin shape at `theta = pi/2` is the reflection
/// `M_ss = -m_cc`, `m_ss = -M_cc`.
pub fn closed_form_extrema(family: Family, zeta: f64, alpha: f64) -> Result<WaveformExtrema> {
    validate_shape(zeta, alpha)?;
    let a = alpha * (1.0 - zeta);
    let maximum = zeta + a;
    // Ties at the branch point go to the endpoint branch.
    let (minimum, branch) = if zeta < 4.0 * a {
        if a <= 0.0 {
            return Err(Error::BranchSelection { zeta, alpha });
        }
        (-zeta * zeta / (8.0 * a) - a, Branch::Interior)
    } else {
        (a - zeta, Branch::Endpoint)
    };
    let cos_cos = WaveformExtrema::from_bounds(maximum, minimum, branch);
    Ok(match family {
        Family::CosCos => cos_cos,
        Family::SinSin => cos_cos.negated(),
    })
}

/// Closed-form extrema at any canonical phase.
///
/// The flipped phase is the negated, time-shifted base waveform, so its
/// extrema are `(-m, -M)` of the base.
pub fn canonical_extrema(family: Family, theta: f64, zeta: f64, alpha: f64) -> Result<WaveformExtrema> {
    let base = closed_form_extrema(family, zeta, alpha)?;
    match canonical_phase(family, theta) {
        Some(CanonicalPhase::Base) => Ok(base),
        Some(CanonicalPhase::Flipped) => Ok(base.negated()),
        None => Err(Error::invalid(
            "theta",
            format!("{theta} is not a canonical phase for {family:?}"),
        )),
    }
}

/// Extrema by dense scan of one period plus golden-section refinement.
///
/// Works at any phase and includes the spec's amplitude.
pub fn numerical_extrema(spec: &BiharmonicSpec) -> WaveformExtrema {
    const SAMPLES: usize = 16_384;
    let step = TAU / SAMPLES as f64;
    let values: Vec<f64> = (0..SAMPLES).map(|i| spec.evaluate_phase(i as f64 * step)).collect();

    let mut best_max = (f64::NEG_INFINITY, 0.0);
    let mut best_min = (f64::INFINITY, 0.0);
    for i in 0..SAMPLES {
        let prev = values[(i + SAMPLES - 1) % SAMPLES];
        let next = values[(i + 1) % SAMPLES];
        let here = values[i];
        let centre = i as f64 * step;
        if here >= prev && here >= next {
            let (x, v) = golden_section(|x| -spec.evaluate_phase(x), centre - step, centre + step);
            if -v > best_max.0 {
                best_max = (-v, x);
            }
        }
        if here <= prev && here <= next {
            let (x, v) = golden_section(|x| spec.evaluate_phase(x), centre - step, centre + step);
            if v < best_min.0 {
                best_min = (v, x);
            }
        }
    }
    // Polish on the derivative when it brackets a sign change.
    let polish = |x: f64| {
        let (lo, hi) = (x - step, x + step);
        let (dl, dh) = (spec.derivative_phase(lo), spec.derivative_phase(hi));
        if dl.signum() != dh.signum() && dl != 0.0 && dh != 0.0 {
            bisect_root(|y| spec.derivative_phase(y), lo, hi)
        } else {
            x
        }
    };
    let x_max = polish(best_max.1);
    let x_min = polish(best_min.1);
    let maximum = best_max.0.max(spec.evaluate_phase(x_max));
    let minimum = best_min.0.min(spec.evaluate_phase(x_min));

    let on_fundamental_peak = |x: f64| 1.0 - spec.family.harmonic(x).abs() < 1e-9;
    let branch = if on_fundamental_peak(x_max) && on_fundamental_peak(x_min) {
        Branch::Endpoint
    } else {
        Branch::Interior
    };
    WaveformExtrema::from_bounds(maximum, minimum, branch)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Load term `D` at a canonical phase.
pub fn load_term(family: Family, alpha: f64, theta: f64, zeta: f64) -> Result<f64> {
    Ok(canonical_extrema(family, theta, zeta, alpha)?.load_term)
}

/// Piecewise load term of the sin-sin drive at `theta = pi/2`, written
/// directly in `zeta` and `alpha` rather than through the extrema.
///
/// Both branches evaluate to `-1/8` at the branch point `4 alpha / (1 + 4 alpha)`.
pub fn sinsin_load_term_piecewise(alpha: f64, zeta: f64) -> Result<f64> {
    validate_shape(zeta, alpha)?;
    let branch_point = 4.0 * alpha / (1.0 + 4.0 * alpha);
    if zeta < branch_point {
        let spread = -4.0 * alpha * (zeta - 1.0) + zeta;
        Ok(zeta * (8.0 * alpha * (zeta - 1.0) + zeta) / (2.0 * spread * spread))
    } else {
        Ok(alpha * (zeta - 1.0) / (2.0 * zeta))
    }
}

/// Waveform mapped affinely onto the image `[-1/2, 1/2]`:
/// `f*(t) = f(t) / (M - m) - D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedWaveform {
    pub source: BiharmonicSpec,
    /// Extrema of `source` including its amplitude.
    pub extrema: WaveformExtrema,
}

impl NormalizedWaveform {
    pub fn evaluate(&self, t: f64) -> f64 {
        let spread = self.extrema.maximum - self.extrema.minimum;
        self.source.evaluate(t) / spread - self.extrema.load_term
    }

    pub fn load_term(&self) -> f64 {
        self.extrema.load_term
    }
}

/// Normalize `spec`. Canonical phases use the closed forms, anything else the
/// numerical scan.
pub fn normalize(spec: &BiharmonicSpec) -> Result<NormalizedWaveform> {
    spec.validate()?;
    let extrema = match spec.canonical_phase() {
        Some(_) => canonical_extrema(spec.family, spec.theta, spec.zeta, spec.alpha)?.scaled(spec.amplitude),
        None => numerical_extrema(spec),
    };
    if !(extrema.maximum > extrema.minimum) {
        return Err(Error::Degenerate(format!(
            "waveform has zero spread (max = min = {})",
            extrema.maximum
        )));
    }
    Ok(NormalizedWaveform {
        source: *spec,
        extrema,
    })
}

/// Magnitude of the impulse of `f*` over the half period that starts at a
/// peak of the fundamental harmonic, by composite Simpson quadrature.
///
/// Over that window both harmonics integrate to zero and only the constant
/// `-D` survives, so the result equals `pi |D| / w`.
pub fn impulse(norm: &NormalizedWaveform) -> f64 {
    const INTERVALS: usize = 4096;
    let omega = norm.source.omega;
    let start = norm.source.family.fundamental_peak() / omega;
    let h = PI / omega / INTERVALS as f64;
    let mut sum = norm.evaluate(start) + norm.evaluate(start + h * INTERVALS as f64);
    for i in 1..INTERVALS {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * norm.evaluate(start + h * i as f64);
    }
    (sum * h / 3.0).abs()
}

/// `pi |D| / w`, the closed form of [`impulse`].
pub fn impulse_closed_form(norm: &NormalizedWaveform) -> f64 {
    PI * norm.load_term().abs() / norm.source.omega
}

/// `zeta_opt = 2 alpha / (1 + 2 alpha)`: the fundamental amplitude is twice
/// the second-harmonic amplitude.
pub fn optimal_zeta(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::invalid("alpha", format!("{alpha} must be finite and > 0")));
    }
    Ok(2.0 * alpha / (1.0 + 2.0 * alpha))
}

/// Sign of the dc term accompanying the drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DcSign {
    Negative,
    Zero,
    Positive,
}

/// Direction of the rectified transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transport {
    Positive,
    Negative,
}

/// How the transport relates to the dc term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DcRelation {
    /// No dc term.
    Unbiased,
    AlongDc,
    AgainstDc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimalPhase {
    pub theta: f64,
    pub transport: Transport,
    pub relation: DcRelation,
}

/// The two optimal phases for `family`, labelled by transport direction and,
/// for a nonzero dc term, by whether they push along or against it.
///
/// Cos-cos at `theta = 0` has `D > 0` and rectifies towards positive bias;
/// `theta = pi` towards negative. For sin-sin, `theta = pi/2` has `D < 0` and
/// rectifies towards negative bias, `-pi/2` towards positive.
pub fn optimal_phases(family: Family, dc: DcSign) -> [OptimalPhase; 2] {
    let (positive_theta, negative_theta) = match family {
        Family::CosCos => (0.0, PI),
        Family::SinSin => (-FRAC_PI_2, FRAC_PI_2),
    };
    let relation = |transport: Transport| match (dc, transport) {
        (DcSign::Zero, _) => DcRelation::Unbiased,
        (DcSign::Positive, Transport::Positive) | (DcSign::Negative, Transport::Negative) => DcRelation::AlongDc,
        _ => DcRelation::AgainstDc,
    };
    [
        OptimalPhase {
            theta: positive_theta,
            transport: Transport::Positive,
            relation: relation(Transport::Positive),
        },
        OptimalPhase {
            theta: negative_theta,
            transport: Transport::Negative,
            relation: relation(Transport::Negative),
        },
    ]
}

/// Pick the optimal phase with the requested relation to the dc term.
pub fn select_optimal_phase(family: Family, dc: DcSign, relation: DcRelation) -> Option<f64> {
    optimal_phases(family, dc)
        .into_iter()
        .find(|p| p.relation == relation)
        .map(|p| p.theta)
}

/// Perturbative fast-driving efficiency estimate
/// `3 I1^2 I2 / (32 Ic^3 (w/wc)^4) |cos theta|`.
///
/// Kept for comparison: it treats the two harmonics as independent
/// contributions, which the ratchet scaling below does not.
pub fn efficiency_estimate_perturbative(
    i1: f64,
    i2: f64,
    critical_current: f64,
    omega_ratio: f64,
    theta: f64,
) -> Result<f64> {
    if !(critical_current > 0.0) {
        return Err(Error::invalid("critical_current", "must be > 0"));
    }
    if !(omega_ratio > 0.0) {
        return Err(Error::invalid("omega_ratio", "must be > 0"));
    }
    if i1 < 0.0 || i2 < 0.0 {
        return Err(Error::invalid("i1/i2", "harmonic amplitudes must be >= 0"));
    }
    Ok(3.0 * i1 * i1 * i2 / (32.0 * critical_current.powi(3) * omega_ratio.powi(4)) * theta.cos().abs())
}

/// Ratchet scaling `C alpha zeta^2 (1 - zeta)`; maximal at `zeta = 2/3` for every `alpha`.
pub fn efficiency_scaling_ru(alpha: f64, zeta: f64, c: f64) -> f64 {
    c * alpha * zeta * zeta * (1.0 - zeta)
}

/// Waveform-level diode efficiency `eta_ac = 2 D` (signed).
pub fn waveform_diode_efficiency(family: Family, alpha: f64, theta: f64, zeta: f64) -> Result<f64> {
    Ok(2.0 * load_term(family, alpha, theta, zeta)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn cc(zeta: f64, alpha: f64, theta: f64) -> BiharmonicSpec {
        BiharmonicSpec::new(Family::CosCos, zeta, alpha, theta).unwrap()
    }

    #[test]
    fn evaluate_examples() {
        assert!((cc(1.0, 1.0, 0.0).evaluate(0.0) - 1.0).abs() < EPS);
        assert!((cc(2.0 / 3.0, 1.0, 0.0).evaluate(0.0) - 1.0).abs() < EPS);
        let ss = BiharmonicSpec::new(Family::SinSin, 2.0 / 3.0, 1.0, FRAC_PI_2).unwrap();
        assert!((ss.evaluate(FRAC_PI_2) - 1.0 / 3.0).abs() < EPS);
    }

    #[test]
    fn evaluate_is_periodic() {
        let s = cc(0.4, 1.7, 0.3).with_omega(2.5).unwrap();
        for i in 0..20 {
            let t = 0.37 * i as f64;
            assert!((s.evaluate(t) - s.evaluate(t + s.period())).abs() < 1e-12);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(BiharmonicSpec::new(Family::CosCos, 1.1, 1.0, 0.0).is_err());
        assert!(BiharmonicSpec::new(Family::CosCos, -0.1, 1.0, 0.0).is_err());
        assert!(BiharmonicSpec::new(Family::CosCos, 0.5, 0.0, 0.0).is_err());
        assert!(cc(0.5, 1.0, 0.0).with_omega(0.0).is_err());
        assert!(cc(0.5, 1.0, 0.0).with_amplitude(-1.0).is_err());
    }

    #[test]
    fn closed_form_examples() {
        let e = closed_form_extrema(Family::CosCos, 0.0, 1.0).unwrap();
        assert_eq!((e.maximum, e.minimum), (1.0, -1.0));

        let e = closed_form_extrema(Family::CosCos, 2.0 / 3.0, 1.0).unwrap();
        assert!((e.maximum - 1.0).abs() < EPS);
        assert!((e.minimum + 0.5).abs() < EPS);
        assert_eq!(e.branch, Branch::Interior);
    }

    #[test]
    fn branch_point_is_continuous_at_four_fifths() {
        let zeta = 0.8;
        let a: f64 = 1.0 - zeta;
        let interior = -zeta * zeta / (8.0 * a) - a;
        let endpoint = a - zeta;
        assert!((interior + 0.6).abs() < EPS);
        assert!((endpoint + 0.6).abs() < EPS);
        let e = closed_form_extrema(Family::CosCos, zeta, 1.0).unwrap();
        assert!((e.minimum + 0.6).abs() < EPS);
    }

    #[test]
    fn zeta_one_routes_to_endpoint() {
        for family in [Family::CosCos, Family::SinSin] {
            let e = closed_form_extrema(family, 1.0, 3.0).unwrap();
            assert_eq!(e.branch, Branch::Endpoint);
            assert_eq!((e.maximum, e.minimum), (1.0, -1.0));
            assert_eq!(e.load_term, 0.0);
        }
    }

    #[test]
    fn alpha_one_matches_printed_piecewise_minimum() {
        for i in 0..=100 {
            let zeta = i as f64 / 100.0;
            let printed = if zeta <= 0.8 {
                (9.0 * zeta * zeta - 16.0 * zeta + 8.0) / (8.0 * zeta - 8.0)
            } else {
                1.0 - 2.0 * zeta
            };
            let e = closed_form_extrema(Family::CosCos, zeta, 1.0).unwrap();
            assert!((e.maximum - 1.0).abs() < EPS, "M at {zeta}");
            assert!((e.minimum - printed).abs() < 1e-12, "m at {zeta}");
        }
    }

    #[test]
    fn numerical_extrema_examples() {
        let e = numerical_extrema(&cc(2.0 / 3.0, 1.0, 0.0));
        assert!((e.maximum - 1.0).abs() < 1e-10);
        assert!((e.minimum + 0.5).abs() < 1e-10);

        let ss = BiharmonicSpec::new(Family::SinSin, 1.0, 1.0, FRAC_PI_2).unwrap();
        let e = numerical_extrema(&ss);
        assert!((e.maximum - 1.0).abs() < 1e-12);
        assert!((e.minimum + 1.0).abs() < 1e-12);

        let closed = closed_form_extrema(Family::CosCos, 0.3, 2.0).unwrap();
        let e = numerical_extrema(&cc(0.3, 2.0, 0.0));
        assert!((e.maximum - closed.maximum).abs() < 1e-10);
        assert!((e.minimum - closed.minimum).abs() < 1e-10);
        assert_eq!(e.branch, closed.branch);
    }

    #[test]
    fn load_term_examples() {
        assert_eq!(load_term(Family::CosCos, 1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!((load_term(Family::CosCos, 1.0, 0.0, 2.0 / 3.0).unwrap() - 1.0 / 6.0).abs() < EPS);
        for alpha in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let zeta = 4.0 * alpha / (1.0 + 4.0 * alpha);
            let d = load_term(Family::SinSin, alpha, FRAC_PI_2, zeta).unwrap();
            assert!((d + 0.125).abs() < EPS, "alpha {alpha}: {d}");
        }
        assert!(load_term(Family::CosCos, 1.0, 0.3, 0.5).is_err());
    }

    #[test]
    fn piecewise_form_matches_extrema_route() {
        for alpha in [0.25, 0.5, 1.0, 2.0, 4.0] {
            for i in 0..=200 {
                let zeta = i as f64 / 200.0;
                let via_extrema = load_term(Family::SinSin, alpha, FRAC_PI_2, zeta).unwrap();
                let piecewise = sinsin_load_term_piecewise(alpha, zeta).unwrap();
                assert!((via_extrema - piecewise).abs() < 1e-12, "alpha {alpha} zeta {zeta}");
            }
        }
    }

    #[test]
    fn canonical_phase_snapping() {
        assert_eq!(canonical_phase(Family::CosCos, -PI), Some(CanonicalPhase::Flipped));
        assert_eq!(canonical_phase(Family::CosCos, TAU), Some(CanonicalPhase::Base));
        assert_eq!(canonical_phase(Family::SinSin, FRAC_PI_2 - 2.7e-8), Some(CanonicalPhase::Base));
        assert_eq!(canonical_phase(Family::SinSin, 0.0), None);
    }

    #[test]
    fn normalize_examples() {
        let n = normalize(&cc(1.0, 1.0, 0.0)).unwrap();
        for i in 0..50 {
            let t = 0.13 * i as f64;
            assert!((n.evaluate(t) - t.cos() / 2.0).abs() < EPS);
        }
        let zero = cc(0.5, 1.0, 0.0).with_amplitude(0.0).unwrap();
        assert!(matches!(normalize(&zero), Err(Error::Degenerate(_))));
        let zero_generic = cc(0.5, 1.0, 0.4).with_amplitude(0.0).unwrap();
        assert!(matches!(normalize(&zero_generic), Err(Error::Degenerate(_))));
    }

    #[test]
    fn normalized_image_is_half_unit() {
        let n = normalize(&cc(2.0 / 3.0, 1.0, 0.0).with_amplitude(2.5).unwrap()).unwrap();
        for i in 0..20_000 {
            let v = n.evaluate(TAU * i as f64 / 20_000.0);
            assert!(v.abs() <= 0.5 + 1e-12);
        }
        // Maximum at wt = 0, interior minimum where cos(wt) = -zeta / (4a) = -1/2.
        assert!((n.evaluate(0.0) - 0.5).abs() < 1e-12);
        assert!((n.evaluate(2.0 * PI / 3.0) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn impulse_examples() {
        let n = normalize(&cc(0.0, 1.0, 0.0)).unwrap();
        assert!(impulse(&n) < 1e-12);
        let n = normalize(&cc(2.0 / 3.0, 1.0, 0.0)).unwrap();
        assert!((impulse(&n) - PI / 6.0).abs() < 1e-10);
        assert!((impulse_closed_form(&n) - PI / 6.0).abs() < EPS);
        let fast = normalize(&cc(2.0 / 3.0, 1.0, 0.0).with_omega(3.0).unwrap()).unwrap();
        assert!((impulse(&fast) - PI / 18.0).abs() < 1e-10);
    }

    #[test]
    fn optimal_zeta_examples() {
        assert!((optimal_zeta(1.0).unwrap() - 2.0 / 3.0).abs() < EPS);
        assert_eq!(optimal_zeta(0.5).unwrap(), 0.5);
        let mut prev = 0.0;
        for k in 0..=6 {
            let z = optimal_zeta(10f64.powi(k)).unwrap();
            assert!(z > prev && z < 1.0);
            prev = z;
        }
        assert!(1.0 - optimal_zeta(1e6).unwrap() < 1e-6);
        assert!(optimal_zeta(0.0).is_err());
        assert!(optimal_zeta(-1.0).is_err());
    }

    #[test]
    fn optimal_phase_sets() {
        let cos = optimal_phases(Family::CosCos, DcSign::Zero);
        assert_eq!([cos[0].theta, cos[1].theta], [0.0, PI]);
        assert!(cos.iter().all(|p| p.relation == DcRelation::Unbiased));
        let sin = optimal_phases(Family::SinSin, DcSign::Zero);
        let mut thetas = [sin[0].theta, sin[1].theta];
        thetas.sort_by(f64::total_cmp);
        assert_eq!(thetas, [-FRAC_PI_2, FRAC_PI_2]);

        assert_eq!(select_optimal_phase(Family::CosCos, DcSign::Positive, DcRelation::AlongDc), Some(0.0));
        assert_eq!(select_optimal_phase(Family::CosCos, DcSign::Positive, DcRelation::AgainstDc), Some(PI));
        assert_eq!(select_optimal_phase(Family::CosCos, DcSign::Negative, DcRelation::AlongDc), Some(PI));
        assert_eq!(select_optimal_phase(Family::CosCos, DcSign::Negative, DcRelation::AgainstDc), Some(0.0));
    }

    #[test]
    fn optimal_phase_labels_follow_load_term_sign() {
        // The load term's sign at the optimum tells which way the drive rectifies.
        for family in [Family::CosCos, Family::SinSin] {
            for p in optimal_phases(family, DcSign::Zero) {
                let d = load_term(family, 1.0, p.theta, 2.0 / 3.0).unwrap();
                match p.transport {
                    Transport::Positive => assert!(d > 0.0),
                    Transport::Negative => assert!(d < 0.0),
                }
            }
        }
    }

    #[test]
    fn perturbative_estimate_examples() {
        assert!(efficiency_estimate_perturbative(1.0, 0.5, 1.0, 1.0, FRAC_PI_2).unwrap() < 1e-17);
        assert_eq!(efficiency_estimate_perturbative(1.0, 0.0, 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((efficiency_estimate_perturbative(1.0, 0.5, 1.0, 1.0, 0.0).unwrap() - 3.0 / 64.0).abs() < EPS);
        assert!(efficiency_estimate_perturbative(1.0, 0.5, 0.0, 1.0, 0.0).is_err());
        assert!(efficiency_estimate_perturbative(1.0, 0.5, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ru_scaling_examples() {
        assert_eq!(efficiency_scaling_ru(1.0, 0.0, 1.0), 0.0);
        assert_eq!(efficiency_scaling_ru(1.0, 1.0, 1.0), 0.0);
        assert!((efficiency_scaling_ru(1.0, 2.0 / 3.0, 1.0) - 4.0 / 27.0).abs() < EPS);
        for alpha in [0.1, 1.0, 7.0] {
            let best = (0..=3000)
                .map(|i| i as f64 / 3000.0)
                .max_by(|a, b| efficiency_scaling_ru(alpha, *a, 1.0).total_cmp(&efficiency_scaling_ru(alpha, *b, 1.0)))
                .unwrap();
            assert!((best - 2.0 / 3.0).abs() < 1e-3);
        }
    }

    #[test]
    fn waveform_efficiency_examples() {
        assert!((waveform_diode_efficiency(Family::CosCos, 1.0, 0.0, 2.0 / 3.0).unwrap() - 1.0 / 3.0).abs() < EPS);
        assert_eq!(waveform_diode_efficiency(Family::CosCos, 1.0, 0.0, 0.0).unwrap(), 0.0);
    }
}
