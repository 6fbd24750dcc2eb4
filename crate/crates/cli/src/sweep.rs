//! Sweep orchestration and CSV emission.
//!
//! A sweep walks one axis (wavelength, depth, distance or angle), runs
//! the Monte-Carlo channel once per point, feeds the mean transmittance
//! into the key-rate pipeline for every configured photon-subtraction
//! count, and emits one CSV row per (point, m) pair. Rows are generated
//! in sweep order with per-point seeds derived from the master seed, so
//! the byte stream is identical across runs and thread counts.

use std::io::Write;
use std::time::Instant;

use thiserror::Error;

use uowc_core::channel::{
    monte_carlo_transmittance, ChannelError, TransmittanceModel, WaterAttenuation,
};
use uowc_core::cvqkd::{secret_key_rate, ChannelSetting, QkdError, SubtractionSetting};
use uowc_core::ocean_optics::{OceanOpticsError, PathGeometry};
use uowc_core::seed::derive_seed;

use crate::config::{GeometryKind, SimulationConfig, SweepAxis};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep point {index} ({axis} = {value}): {source}")]
    Point {
        index: usize,
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<SweepError>,
    },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Optics(#[from] OceanOpticsError),
    #[error(transparent)]
    Qkd(#[from] QkdError),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

/// One CSV row: a sweep point evaluated at one subtraction count.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub photons: u32,
    pub tc_mean: f64,
    pub tc_std: f64,
    pub p_success: f64,
    pub i_ab: f64,
    pub chi_be: f64,
    pub key_rate: f64,
    pub secure: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub rows: Vec<SweepRow>,
}

pub const CSV_HEADER: &str =
    "axis,axis_value,m,tc_mean,tc_std,p_success,i_ab,chi_be,key_rate,secure";

impl SweepResult {
    /// Serialises rows with 17 significant digits so every f64
    /// round-trips exactly.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{:.16e},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                self.axis.name(),
                row.axis_value,
                row.photons,
                row.tc_mean,
                row.tc_std,
                row.p_success,
                row.i_ab,
                row.chi_be,
                row.key_rate,
                row.secure,
            )?;
        }
        Ok(())
    }

    #[cfg(test)]
    pub fn to_csv_string(&self) -> String {
        let mut buffer = Vec::new();
        self.write_csv(&mut buffer).expect("writing to a Vec cannot fail");
        String::from_utf8(buffer).expect("CSV is ASCII")
    }
}

/// Geometry of one sweep point after applying the axis value.
fn point_geometry(
    config: &SimulationConfig,
    axis: SweepAxis,
    value: f64,
    range_default: f64,
) -> Result<(PathGeometry, f64), SweepError> {
    // Returns the geometry and the wavelength (nm) for this point.
    let mut wavelength_nm = config.wavelength_nm;
    let mut depth = config.depth_m;
    let mut range = range_default;
    let mut kind = config.geometry;
    match axis {
        SweepAxis::Wavelength => wavelength_nm = value,
        SweepAxis::Depth => depth = value,
        SweepAxis::Distance => range = value,
        SweepAxis::Angle => kind = GeometryKind::Ddc { theta_rad: value.to_radians() },
    }
    let geometry = match kind {
        GeometryKind::Sdc => PathGeometry::sdc(depth, range)?,
        GeometryKind::Ddc { theta_rad } => PathGeometry::ddc(depth, range, theta_rad)?,
    };
    Ok((geometry, wavelength_nm))
}

/// Builds the channel model for one sweep point.
fn point_model(
    config: &SimulationConfig,
    axis: SweepAxis,
    value: f64,
) -> Result<TransmittanceModel, SweepError> {
    let range = match axis {
        SweepAxis::Distance => value,
        _ => config.distance_m,
    };
    let (geometry, wavelength_nm) = point_geometry(config, axis, value, range)?;
    let mut beam = config.beam;
    beam.wavelength = wavelength_nm * 1e-9;
    let turbulence = if config.turbulence_enabled {
        let mut t = config.turbulence.clone();
        t.wavelength_nm = wavelength_nm;
        Some(t)
    } else {
        None
    };
    let water = if config.attenuation_enabled {
        Some(WaterAttenuation {
            profile: config.profile.clone(),
            tables: config.tables.clone(),
        })
    } else {
        None
    };
    Ok(TransmittanceModel {
        beam,
        wavelength_nm,
        apertures: config.apertures,
        geometry,
        turbulence,
        water,
    })
}

/// Runs the configured sweep. Progress and wall time go to `diagnostics`
/// (the CLI passes stderr); the CSV content is returned, not written.
pub fn run_sweep(
    config: &SimulationConfig,
    mut diagnostics: Option<&mut dyn Write>,
) -> Result<SweepResult, SweepError> {
    let started = Instant::now();
    let points = config.sweep.points();
    let mut rows = Vec::with_capacity(points.len() * config.qkd.photon_counts.len());
    for (index, &value) in points.iter().enumerate() {
        let row_block = evaluate_point(config, index, value).map_err(|source| {
            SweepError::Point {
                index,
                axis: config.sweep.axis.name(),
                value,
                source: Box::new(source),
            }
        })?;
        rows.extend(row_block);
        if let Some(out) = diagnostics.as_deref_mut() {
            let _ = writeln!(
                out,
                "[{}/{}] {} = {:.6} done, elapsed {:.2?}",
                index + 1,
                points.len(),
                config.sweep.axis.name(),
                value,
                started.elapsed()
            );
        }
    }
    if let Some(out) = diagnostics {
        let _ = writeln!(
            out,
            "sweep finished: {} rows in {:.2?}",
            rows.len(),
            started.elapsed()
        );
    }
    Ok(SweepResult { axis: config.sweep.axis, rows })
}

fn evaluate_point(
    config: &SimulationConfig,
    index: usize,
    value: f64,
) -> Result<Vec<SweepRow>, SweepError> {
    let model = point_model(config, config.sweep.axis, value)?;
    let point_seed = derive_seed(config.seed, index as u64);
    let stats = monte_carlo_transmittance(&model, config.samples, point_seed)?;
    let channel = ChannelSetting::new(stats.mean, config.qkd.epsilon)?;
    let mut rows = Vec::with_capacity(config.qkd.photon_counts.len());
    for &photons in &config.qkd.photon_counts {
        let subtraction = SubtractionSetting::new(photons, config.qkd.beamsplitter_t)?;
        let report = secret_key_rate(&config.qkd.tmsv, &subtraction, &channel, config.qkd.beta)?;
        rows.push(SweepRow {
            axis_value: value,
            photons,
            tc_mean: stats.mean,
            tc_std: stats.std,
            p_success: report.p_success,
            i_ab: report.i_ab,
            chi_be: report.chi_be,
            key_rate: report.key_rate,
            secure: report.secure,
        });
    }
    Ok(rows)
}
