//! Beer-Lambert path attenuation for horizontal and slant links.

use crate::quad::{self, QuadError};

use super::{attenuation_coefficient, ChlorophyllProfile, OceanOpticsError, SpectralTables};

/// Absolute tolerance on the slant-path optical-depth integral.
pub const OPTICAL_DEPTH_TOLERANCE: f64 = 1e-8;

/// Link geometry between transmitter and receiver.
///
/// `Sdc` is a horizontal path at constant depth. `Ddc` is a slant path at
/// elevation `theta` (radians, measured from horizontal) with the receiver
/// above the transmitter: receiver depth is `depth_tx - range * sin(theta)`.
/// Downward links are expressed by swapping endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathGeometry {
    Sdc { depth: f64, range: f64 },
    Ddc { depth_tx: f64, range: f64, theta: f64 },
}

impl PathGeometry {
    pub fn sdc(depth: f64, range: f64) -> Result<Self, OceanOpticsError> {
        if !(depth >= 0.0 && range >= 0.0) || !depth.is_finite() || !range.is_finite() {
            return Err(OceanOpticsError::InvalidGeometry {
                detail: format!("horizontal path needs depth >= 0 and range >= 0, got depth {depth}, range {range}"),
            });
        }
        Ok(PathGeometry::Sdc { depth, range })
    }

    pub fn ddc(depth_tx: f64, range: f64, theta: f64) -> Result<Self, OceanOpticsError> {
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(OceanOpticsError::InvalidGeometry {
                detail: format!("slant path needs 0 < theta <= pi/2, got {theta}"),
            });
        }
        if !(depth_tx >= 0.0 && range >= 0.0) {
            return Err(OceanOpticsError::InvalidGeometry {
                detail: format!("slant path needs depth >= 0 and range >= 0, got depth {depth_tx}, range {range}"),
            });
        }
        let depth_rx = depth_tx - range * theta.sin();
        if depth_rx < 0.0 {
            return Err(OceanOpticsError::InvalidGeometry {
                detail: format!("receiver depth {depth_rx:.3} m is above the surface"),
            });
        }
        Ok(PathGeometry::Ddc { depth_tx, range, theta })
    }

    /// Physical path length between the endpoints (m).
    pub fn range(&self) -> f64 {
        match *self {
            PathGeometry::Sdc { range, .. } | PathGeometry::Ddc { range, .. } => range,
        }
    }

    /// Transmitter depth (m).
    pub fn depth_tx(&self) -> f64 {
        match *self {
            PathGeometry::Sdc { depth, .. } => depth,
            PathGeometry::Ddc { depth_tx, .. } => depth_tx,
        }
    }
}

/// Beer-Lambert intensity factor in (0, 1] for the given path.
///
/// Horizontal paths use `exp(-c(lambda, d) z)` at the fixed depth. Slant
/// paths integrate the depth-dependent attenuation over the traversed
/// depth interval, `exp(-integral c(lambda, x) dx / sin(theta))`, by
/// adaptive quadrature.
pub fn path_attenuation_factor(
    geometry: &PathGeometry,
    wavelength_nm: f64,
    profile: &ChlorophyllProfile,
    tables: &SpectralTables,
) -> Result<f64, OceanOpticsError> {
    let optical_depth = match *geometry {
        PathGeometry::Sdc { depth, range } => {
            attenuation_coefficient(wavelength_nm, depth, profile, tables)? * range
        }
        PathGeometry::Ddc { depth_tx, range, theta } => {
            let depth_rx = depth_tx - range * theta.sin();
            // Propagate table-domain errors eagerly; inside the quadrature
            // closure the coefficient is then infallible.
            attenuation_coefficient(wavelength_nm, depth_tx, profile, tables)?;
            let integrand = |x: f64| {
                attenuation_coefficient(wavelength_nm, x, profile, tables)
                    .expect("wavelength validated before quadrature")
            };
            let integral =
                quad::adaptive_simpson(&integrand, depth_rx, depth_tx, OPTICAL_DEPTH_TOLERANCE)
                    .map_err(|e| match e {
                        QuadError::ToleranceNotMet { tolerance } => {
                            OceanOpticsError::QuadratureFailure { tolerance }
                        }
                        QuadError::BadInterval { .. } => OceanOpticsError::InvalidGeometry {
                            detail: "slant path depth interval is inverted".into(),
                        },
                    })?;
            integral / theta.sin()
        }
    };
    Ok((-optical_depth).exp())
}
