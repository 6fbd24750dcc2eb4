//! Configuration file loading and validation.
//!
//! The config is a TOML document with nested sections; every field is
//! optional and falls back to the built-in defaults below, so an empty
//! file is a valid run. Unknown keys are hard errors: a typo in a physics
//! parameter must not silently fall back to a default.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use uowc_core::beam::GaussianBeam;
use uowc_core::channel::ApertureSpec;
use uowc_core::cvqkd::TmsvParams;
use uowc_core::ocean_optics::{
    load_profile_table, ChlorophyllProfile, IndexModel, SpectralTables, SPECTRAL_DOMAIN_NM,
};
use uowc_core::turbulence::TurbulenceConfig;

// Default operating point. Beam and apertures follow the reference
// simulation settings; water is brackish at 290 K (16.85 C); the QKD
// source is a V = 20 TMSV with reverse reconciliation at 0.95 and excess
// noise 0.01. Fluctuation magnitudes and the curvature range are the
// calibrated knobs of the discrete-cell turbulence ensemble.
pub const DEFAULT_PROFILE: &str = "S1";
pub const DEFAULT_WAVELENGTH_NM: f64 = 480.0;
pub const DEFAULT_DEPTH_M: f64 = 200.0;
pub const DEFAULT_BEAM_WAIST_M: f64 = 0.04;
pub const DEFAULT_TX_RADIUS_M: f64 = 0.08;
pub const DEFAULT_RX_RADIUS_M: f64 = 0.8;
pub const DEFAULT_SALINITY_PPT: f64 = 12.5;
pub const DEFAULT_TEMPERATURE_C: f64 = 16.85;
pub const DEFAULT_CELLS_PER_METER: f64 = 5.0;
pub const DEFAULT_SIGMA_SALINITY_PPT: f64 = 0.5;
pub const DEFAULT_SIGMA_TEMPERATURE_C: f64 = 1.0;
pub const DEFAULT_CURVATURE_MIN_M: f64 = 1e-4;
pub const DEFAULT_CURVATURE_MAX_M: f64 = 1.0;
pub const DEFAULT_TMSV_VARIANCE: f64 = 20.0;
pub const DEFAULT_SUBTRACT_PHOTONS: &[u32] = &[0, 1, 2, 3, 4, 5];
pub const DEFAULT_BEAMSPLITTER_T: f64 = 0.5;
pub const DEFAULT_BETA: f64 = 0.95;
pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_THETA_DEG: f64 = 45.0;
pub const DEFAULT_DISTANCE_M: f64 = 10.0;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_OUTPUT: &str = "sweep.csv";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config field `{field}` is invalid: {detail}")]
    Validation { field: String, detail: String },
    #[error(transparent)]
    Tables(#[from] uowc_core::ocean_optics::OceanOpticsError),
    #[error(transparent)]
    Qkd(#[from] uowc_core::cvqkd::QkdError),
    #[error(transparent)]
    Beam(#[from] uowc_core::beam::BeamError),
    #[error(transparent)]
    Channel(#[from] uowc_core::channel::ChannelError),
}

fn invalid(field: &str, detail: impl Into<String>) -> ConfigError {
    ConfigError::Validation { field: field.to_string(), detail: detail.into() }
}

// ---------------------------------------------------------------------
// Raw TOML layer
// ---------------------------------------------------------------------

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    profile: Option<String>,
    wavelength_nm: Option<f64>,
    depth_m: Option<f64>,
    distance_m: Option<f64>,
    attenuation: Option<bool>,
    samples: Option<usize>,
    seed: Option<u64>,
    output: Option<PathBuf>,
    geometry: Option<RawGeometry>,
    turbulence: Option<RawTurbulence>,
    apertures: Option<RawApertures>,
    qkd: Option<RawQkd>,
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    kind: Option<String>,
    theta_deg: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTurbulence {
    enabled: Option<bool>,
    cells_per_meter: Option<f64>,
    mean_salinity_ppt: Option<f64>,
    mean_temperature_c: Option<f64>,
    sigma_salinity_ppt: Option<f64>,
    sigma_temperature_c: Option<f64>,
    curvature_min_m: Option<f64>,
    curvature_max_m: Option<f64>,
    index_model: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawApertures {
    beam_waist_m: Option<f64>,
    tx_radius_m: Option<f64>,
    rx_radius_m: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQkd {
    variance_v: Option<f64>,
    zeta: Option<f64>,
    subtract_photons: Option<Vec<u32>>,
    beamsplitter_t: Option<f64>,
    beta: Option<f64>,
    epsilon: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: Option<String>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
}

// ---------------------------------------------------------------------
// Validated layer
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Wavelength,
    Depth,
    Distance,
    Angle,
}

impl SweepAxis {
    fn parse(name: &str) -> Option<SweepAxis> {
        match name {
            "wavelength" => Some(SweepAxis::Wavelength),
            "depth" => Some(SweepAxis::Depth),
            "distance" => Some(SweepAxis::Distance),
            "angle" => Some(SweepAxis::Angle),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Wavelength => "wavelength",
            SweepAxis::Depth => "depth",
            SweepAxis::Distance => "distance",
            SweepAxis::Angle => "angle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    /// Evenly spaced sweep points, inclusive of both endpoints. The last
    /// point is pinned to `stop` so rounding cannot push it outside a
    /// validated domain.
    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.stop
                } else {
                    self.start + h * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeometryKind {
    Sdc,
    Ddc { theta_rad: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QkdConfig {
    pub tmsv: TmsvParams,
    pub photon_counts: Vec<u32>,
    pub beamsplitter_t: f64,
    pub beta: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub profile: ChlorophyllProfile,
    pub tables: SpectralTables,
    pub wavelength_nm: f64,
    pub depth_m: f64,
    /// Link length (m) used when the sweep axis does not carry it.
    pub distance_m: f64,
    pub geometry: GeometryKind,
    pub attenuation_enabled: bool,
    pub turbulence_enabled: bool,
    pub turbulence: TurbulenceConfig,
    pub beam: GaussianBeam,
    pub apertures: ApertureSpec,
    pub qkd: QkdConfig,
    pub sweep: SweepSpec,
    pub samples: usize,
    pub seed: u64,
    pub output: PathBuf,
}

/// Loads and validates a config file. `path: None` means "all defaults".
/// `data_dir` points at an alternative spectral/profile table directory
/// (the CLI wires the environment variable through here).
pub fn load_config(
    path: Option<&Path>,
    data_dir: Option<&Path>,
) -> Result<SimulationConfig, ConfigError> {
    let raw: RawConfig = match path {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            toml::from_str(&text)?
        }
        None => RawConfig::default(),
    };
    validate(raw, data_dir)
}

fn validate(raw: RawConfig, data_dir: Option<&Path>) -> Result<SimulationConfig, ConfigError> {
    let (tables, profiles) = match data_dir {
        Some(dir) => (
            SpectralTables::from_dir(dir)?,
            load_profile_table(&dir.join("chlorophyll_profiles.dat"))?,
        ),
        None => (SpectralTables::builtin(), ChlorophyllProfile::standard_set()),
    };
    tables.validate_domain()?;

    let profile_label = raw.profile.unwrap_or_else(|| DEFAULT_PROFILE.to_string());
    let profile = profiles
        .iter()
        .find(|p| p.label.eq_ignore_ascii_case(&profile_label))
        .cloned()
        .ok_or_else(|| invalid("profile", format!("unknown water class `{profile_label}`")))?;

    let wavelength_nm = raw.wavelength_nm.unwrap_or(DEFAULT_WAVELENGTH_NM);
    let (lo, hi) = SPECTRAL_DOMAIN_NM;
    if !(wavelength_nm >= lo && wavelength_nm <= hi) {
        return Err(invalid(
            "wavelength_nm",
            format!("{wavelength_nm} outside the spectral domain [{lo}, {hi}] nm"),
        ));
    }

    let depth_m = raw.depth_m.unwrap_or(DEFAULT_DEPTH_M);
    if !(depth_m >= 0.0) {
        return Err(invalid("depth_m", format!("{depth_m} must be non-negative")));
    }

    let distance_m = raw.distance_m.unwrap_or(DEFAULT_DISTANCE_M);
    if !(distance_m >= 0.0) {
        return Err(invalid("distance_m", format!("{distance_m} must be non-negative")));
    }

    let geometry_raw = raw.geometry.unwrap_or_default();
    let kind_name = geometry_raw.kind.unwrap_or_else(|| "sdc".to_string());
    let theta_deg = geometry_raw.theta_deg.unwrap_or(DEFAULT_THETA_DEG);
    let geometry = match kind_name.as_str() {
        "sdc" => GeometryKind::Sdc,
        "ddc" => {
            if !(theta_deg > 0.0 && theta_deg <= 90.0) {
                return Err(invalid(
                    "geometry.theta_deg",
                    format!("{theta_deg} must lie in (0, 90] degrees"),
                ));
            }
            GeometryKind::Ddc { theta_rad: theta_deg.to_radians() }
        }
        other => {
            return Err(invalid(
                "geometry.kind",
                format!("`{other}` is not one of sdc, ddc"),
            ))
        }
    };

    let turbulence_raw = raw.turbulence.unwrap_or_default();
    let turbulence_enabled = turbulence_raw.enabled.unwrap_or(true);
    let index_model_name = turbulence_raw
        .index_model
        .unwrap_or_else(|| IndexModel::Standard.name().to_string());
    let index_model = IndexModel::parse(&index_model_name).ok_or_else(|| {
        invalid(
            "turbulence.index_model",
            format!("`{index_model_name}` is not one of standard, quan-fry-1995"),
        )
    })?;
    let turbulence = TurbulenceConfig {
        cells_per_meter: turbulence_raw.cells_per_meter.unwrap_or(DEFAULT_CELLS_PER_METER),
        mean_salinity: turbulence_raw.mean_salinity_ppt.unwrap_or(DEFAULT_SALINITY_PPT),
        mean_temperature: turbulence_raw
            .mean_temperature_c
            .unwrap_or(DEFAULT_TEMPERATURE_C),
        sigma_salinity: turbulence_raw
            .sigma_salinity_ppt
            .unwrap_or(DEFAULT_SIGMA_SALINITY_PPT),
        sigma_temperature: turbulence_raw
            .sigma_temperature_c
            .unwrap_or(DEFAULT_SIGMA_TEMPERATURE_C),
        curvature_range: (
            turbulence_raw.curvature_min_m.unwrap_or(DEFAULT_CURVATURE_MIN_M),
            turbulence_raw.curvature_max_m.unwrap_or(DEFAULT_CURVATURE_MAX_M),
        ),
        wavelength_nm,
        index_model,
    };
    turbulence.validate().map_err(|e| invalid("turbulence", e.to_string()))?;

    let apertures_raw = raw.apertures.unwrap_or_default();
    let beam = GaussianBeam::new(
        apertures_raw.beam_waist_m.unwrap_or(DEFAULT_BEAM_WAIST_M),
        wavelength_nm * 1e-9,
    )?;
    let apertures = ApertureSpec::new(
        apertures_raw.tx_radius_m.unwrap_or(DEFAULT_TX_RADIUS_M),
        apertures_raw.rx_radius_m.unwrap_or(DEFAULT_RX_RADIUS_M),
    )?;

    let qkd_raw = raw.qkd.unwrap_or_default();
    let tmsv = match (qkd_raw.variance_v, qkd_raw.zeta) {
        (Some(_), Some(_)) => {
            return Err(invalid(
                "qkd",
                "give either variance_v or zeta, not both",
            ))
        }
        (None, Some(zeta)) => TmsvParams::from_zeta(zeta)?,
        (variance, None) => TmsvParams::from_variance(variance.unwrap_or(DEFAULT_TMSV_VARIANCE))?,
    };
    let photon_counts = qkd_raw
        .subtract_photons
        .unwrap_or_else(|| DEFAULT_SUBTRACT_PHOTONS.to_vec());
    if photon_counts.is_empty() {
        return Err(invalid("qkd.subtract_photons", "list must not be empty"));
    }
    let beamsplitter_t = qkd_raw.beamsplitter_t.unwrap_or(DEFAULT_BEAMSPLITTER_T);
    if !(beamsplitter_t > 0.0 && beamsplitter_t <= 1.0) {
        return Err(invalid(
            "qkd.beamsplitter_t",
            format!("{beamsplitter_t} must lie in (0, 1]"),
        ));
    }
    let beta = qkd_raw.beta.unwrap_or(DEFAULT_BETA);
    if !(0.0..=1.0).contains(&beta) {
        return Err(invalid("qkd.beta", format!("{beta} must lie in [0, 1]")));
    }
    let epsilon = qkd_raw.epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(epsilon >= 0.0) {
        return Err(invalid("qkd.epsilon", format!("{epsilon} must be non-negative")));
    }
    let qkd = QkdConfig { tmsv, photon_counts, beamsplitter_t, beta, epsilon };

    let sweep_raw = raw.sweep.unwrap_or_default();
    let axis_name = sweep_raw.axis.unwrap_or_else(|| "distance".to_string());
    let axis = SweepAxis::parse(&axis_name).ok_or_else(|| {
        invalid(
            "sweep.axis",
            format!("`{axis_name}` is not one of wavelength, depth, distance, angle"),
        )
    })?;
    let (default_start, default_stop, default_steps) = match axis {
        SweepAxis::Wavelength => (lo, hi, 61),
        SweepAxis::Depth => (0.0, 400.0, 81),
        SweepAxis::Distance => (1.0, 60.0, 60),
        SweepAxis::Angle => (5.0, 90.0, 18),
    };
    let sweep = SweepSpec {
        axis,
        start: sweep_raw.start.unwrap_or(default_start),
        stop: sweep_raw.stop.unwrap_or(default_stop),
        steps: sweep_raw.steps.unwrap_or(default_steps),
    };
    if sweep.steps == 0 {
        return Err(invalid("sweep.steps", "must be at least 1"));
    }
    if !(sweep.start <= sweep.stop) {
        return Err(invalid(
            "sweep",
            format!("start {} must not exceed stop {}", sweep.start, sweep.stop),
        ));
    }
    match axis {
        SweepAxis::Wavelength => {
            if sweep.start < lo || sweep.stop > hi {
                return Err(invalid(
                    "sweep",
                    format!(
                        "wavelength sweep [{}, {}] leaves the spectral domain [{lo}, {hi}] nm",
                        sweep.start, sweep.stop
                    ),
                ));
            }
        }
        SweepAxis::Depth => {
            if sweep.start < 0.0 {
                return Err(invalid("sweep", "depth sweep must start at or below the surface"));
            }
        }
        SweepAxis::Distance => {
            if sweep.start < 0.0 {
                return Err(invalid("sweep", "distance sweep must be non-negative"));
            }
        }
        SweepAxis::Angle => {
            if !matches!(geometry, GeometryKind::Ddc { .. }) {
                return Err(invalid(
                    "sweep.axis",
                    "angle sweeps need geometry.kind = \"ddc\"",
                ));
            }
            if sweep.start <= 0.0 || sweep.stop > 90.0 {
                return Err(invalid(
                    "sweep",
                    format!(
                        "angle sweep [{}, {}] must stay inside (0, 90] degrees",
                        sweep.start, sweep.stop
                    ),
                ));
            }
        }
    }

    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(invalid("samples", "must be at least 1"));
    }

    Ok(SimulationConfig {
        profile,
        tables,
        wavelength_nm,
        depth_m,
        distance_m,
        geometry,
        attenuation_enabled: raw.attenuation.unwrap_or(true),
        turbulence_enabled,
        turbulence,
        beam,
        apertures,
        qkd,
        sweep,
        samples,
        seed: raw.seed.unwrap_or(DEFAULT_SEED),
        output: raw.output.unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
    })
}
