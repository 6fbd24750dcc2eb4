//! Bio-optical model of ocean water: absorption, scattering and total
//! attenuation over wavelength and depth, the seawater refractive index,
//! and Beer-Lambert path factors.
//!
//! Absorption combines pure water, fulvic and humic acids, and a
//! chlorophyll power law; scattering combines pure water with small and
//! large particulates. All constituent concentrations derive from the
//! chlorophyll profile of the water class, so a single profile row drives
//! the full spectrum at every depth.

mod path;
mod profiles;
mod refractive;
mod spectra;

pub use path::{path_attenuation_factor, PathGeometry, OPTICAL_DEPTH_TOLERANCE};
pub use profiles::{
    load_profile_table, parse_profile_table, particulate_concentrations, ChlorophyllProfile,
    WaterComposition,
};
pub use refractive::{
    refractive_index, refractive_index_unchecked, IndexModel, RefractiveIndexCoefficients,
    SALINITY_RANGE_PPT, TEMPERATURE_RANGE_C, WAVELENGTH_RANGE_NM,
};
pub use spectra::{
    SpectralTable, SpectralTables, CHL_SPECIFIC_A_FILE, CHL_SPECIFIC_B_FILE,
    WATER_ABSORPTION_FILE,
};

use thiserror::Error;

/// Working spectral domain (nm) of the attenuation model.
pub const SPECTRAL_DOMAIN_NM: (f64, f64) = (400.0, 700.0);

/// Specific absorption of fulvic acid at the exponential-fit reference
/// (m^2/mg) and its wavelength decay rate (1/nm).
pub const FULVIC_SPECIFIC_ABSORPTION: f64 = 35.959;
pub const FULVIC_DECAY_PER_NM: f64 = 0.0189;

/// Specific absorption of humic acid (m^2/mg) and its decay rate (1/nm).
pub const HUMIC_SPECIFIC_ABSORPTION: f64 = 18.828;
pub const HUMIC_DECAY_PER_NM: f64 = 0.01105;

/// Exponent of the chlorophyll normalisation in the absorption power law.
/// The reference concentration is 1 mg/m^3, making the term dimensionless.
pub const CHLOROPHYLL_POWER: f64 = 0.602;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OceanOpticsError {
    #[error("wavelength {wavelength_nm} nm outside tabulated domain [{min_nm}, {max_nm}] nm")]
    OutOfSpectralDomain {
        wavelength_nm: f64,
        min_nm: f64,
        max_nm: f64,
    },
    #[error("{what} = {value} outside empirical validity range [{min}, {max}]")]
    OutOfValidityRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("profile {label}: sigma denominator {denominator} is not positive")]
    NonPositiveDenominator { label: String, denominator: f64 },
    #[error("profile {label}: {detail}")]
    InvalidProfile { label: String, detail: String },
    #[error("unknown water profile `{label}`")]
    UnknownProfile { label: String },
    #[error("malformed table: {detail}")]
    TableFormat { detail: String },
    #[error("invalid path geometry: {detail}")]
    InvalidGeometry { detail: String },
    #[error("optical-depth quadrature did not reach tolerance {tolerance:e}")]
    QuadratureFailure { tolerance: f64 },
}

/// Total absorption coefficient a (1/m) at `wavelength_nm` and depth `d`:
/// pure water, fulvic and humic acid terms with exponential wavelength
/// decay, and the chlorophyll power-law term
/// `A(lambda) Cc^(-B(lambda)) * Cc^0.602`.
pub fn absorption_coefficient(
    wavelength_nm: f64,
    depth_m: f64,
    profile: &ChlorophyllProfile,
    tables: &SpectralTables,
) -> Result<f64, OceanOpticsError> {
    let composition = particulate_concentrations(profile.concentration_at(depth_m));
    absorption_from_composition(wavelength_nm, &composition, tables)
}

/// Absorption from an explicit constituent composition.
pub fn absorption_from_composition(
    wavelength_nm: f64,
    composition: &WaterComposition,
    tables: &SpectralTables,
) -> Result<f64, OceanOpticsError> {
    check_spectral_domain(wavelength_nm)?;
    let a_w = tables.water_absorption.value_at(wavelength_nm)?;
    let a_f = FULVIC_SPECIFIC_ABSORPTION
        * composition.c_f
        * (-FULVIC_DECAY_PER_NM * wavelength_nm).exp();
    let a_h = HUMIC_SPECIFIC_ABSORPTION
        * composition.c_h
        * (-HUMIC_DECAY_PER_NM * wavelength_nm).exp();
    let a_c = if composition.c_c > 0.0 {
        // Single powf keeps the Cc -> 0 limit finite: the specific
        // absorption diverges like Cc^-B while the concentration factor
        // vanishes like Cc^0.602, and B < 0.602 everywhere.
        let b = tables.chl_specific_b.value_at(wavelength_nm)?;
        let a = tables.chl_specific_a.value_at(wavelength_nm)?;
        a * composition.c_c.powf(CHLOROPHYLL_POWER - b)
    } else {
        tables.chl_specific_b.value_at(wavelength_nm)?;
        tables.chl_specific_a.value_at(wavelength_nm)?;
        0.0
    };
    Ok(a_w + a_f + a_h + a_c)
}

/// Total scattering coefficient b (1/m): pure water plus small and large
/// particulate terms, each with a `(400/lambda)^k` spectral law.
pub fn scattering_coefficient(
    wavelength_nm: f64,
    depth_m: f64,
    profile: &ChlorophyllProfile,
) -> Result<f64, OceanOpticsError> {
    let composition = particulate_concentrations(profile.concentration_at(depth_m));
    scattering_from_composition(wavelength_nm, &composition)
}

/// Scattering from an explicit constituent composition.
pub fn scattering_from_composition(
    wavelength_nm: f64,
    composition: &WaterComposition,
) -> Result<f64, OceanOpticsError> {
    check_spectral_domain(wavelength_nm)?;
    let ratio = 400.0 / wavelength_nm;
    let b_w = 0.005826 * ratio.powf(4.322);
    let b_s = 1.1513 * ratio.powf(1.7) * composition.c_s;
    let b_l = 0.3411 * ratio.powf(0.3) * composition.c_l;
    Ok(b_w + b_s + b_l)
}

/// Total attenuation c = a + b (1/m).
pub fn attenuation_coefficient(
    wavelength_nm: f64,
    depth_m: f64,
    profile: &ChlorophyllProfile,
    tables: &SpectralTables,
) -> Result<f64, OceanOpticsError> {
    let composition = particulate_concentrations(profile.concentration_at(depth_m));
    let a = absorption_from_composition(wavelength_nm, &composition, tables)?;
    let b = scattering_from_composition(wavelength_nm, &composition)?;
    Ok(a + b)
}

fn check_spectral_domain(wavelength_nm: f64) -> Result<(), OceanOpticsError> {
    let (lo, hi) = SPECTRAL_DOMAIN_NM;
    if wavelength_nm.is_finite() && (lo..=hi).contains(&wavelength_nm) {
        Ok(())
    } else {
        Err(OceanOpticsError::OutOfSpectralDomain {
            wavelength_nm,
            min_nm: lo,
            max_nm: hi,
        })
    }
}
