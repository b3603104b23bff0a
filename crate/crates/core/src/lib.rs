//! Desk-scale toolkit for biharmonically driven tunnel junctions.
//!
//! * [`waveform`] holds the exact algebra of the two-tone drive
//!   `zeta*h(wt) + alpha*(1-zeta)*h(2wt+theta)`: extrema, load term,
//!   normalization, impulse and the optimal amplitude/phase laws.
//! * [`junction`] integrates the overdamped RCSJ phase equation under that
//!   drive and extracts averaged voltages, critical currents, diode
//!   efficiencies, IV curves and parameter maps.
//! * [`shotnoise`] computes photon-assisted shot noise of a tunnel junction
//!   at low temperature from Bessel-sum photon coefficients.
//! * [`grid`] provides the sweep grids and map containers shared by all of
//!   the above.

pub mod error;
pub mod grid;
pub mod junction;
pub mod shotnoise;
pub mod waveform;

pub use error::{Error, Result};
pub use grid::{MapResult, SweepGrid};
pub use waveform::{BiharmonicSpec, Family};
