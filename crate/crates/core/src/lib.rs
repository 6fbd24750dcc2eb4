//! Simulation library for underwater optical wireless channels and the
//! asymptotic secret key rate of a continuous-variable QKD protocol with
//! virtual photon subtraction running over them.
//!
//! The crate is organised around four layers:
//!
//! - [`ocean_optics`] — wavelength- and depth-dependent absorption,
//!   scattering and attenuation of ocean water (bio-optical model driven
//!   by chlorophyll profiles), the empirical seawater refractive index,
//!   and Beer-Lambert path attenuation for horizontal and slant paths.
//! - [`beam`] / [`turbulence`] — Gaussian-beam propagation through a
//!   discrete-cell turbulence model: random cell spacings and curved
//!   interfaces composed as 2x2 ray-transfer matrices acting on the
//!   complex beam parameter.
//! - [`channel`] — Monte-Carlo channel transmittance combining turbulent
//!   beam spreading with attenuation, aperture integration, and the
//!   statistics of the received-intensity distribution.
//! - [`cvqkd`] — the photon-subtraction postselection filter, success
//!   probability, two-mode covariance propagation, mutual information,
//!   Holevo bound, and the secret key rate.
//!
//! All operations are pure functions of their inputs. Monte-Carlo sampling
//! uses counter-based per-sample RNG streams so results are bitwise
//! reproducible regardless of thread count; with the `parallel` feature
//! (default) samples are evaluated on a rayon pool, without it on the
//! current thread.

// Negated comparisons like `!(x >= 0.0)` are used on purpose throughout
// the validation paths: they reject NaN, which the suggested `x < 0.0`
// would silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beam;
pub mod channel;
pub mod cvqkd;
pub mod ocean_optics;
pub mod quad;
pub mod seed;
pub mod turbulence;

pub use beam::{ComplexBeamParameter, GaussianBeam, RayTransferMatrix};
pub use channel::{ApertureSpec, TransmittanceModel, TransmittanceStats};
pub use cvqkd::{ChannelSetting, CovarianceBlock, KeyRateReport, SubtractionSetting, TmsvParams};
pub use ocean_optics::{ChlorophyllProfile, PathGeometry, SpectralTable, SpectralTables};
pub use turbulence::{SampleSeed, TurbulenceCellSequence, TurbulenceConfig};
