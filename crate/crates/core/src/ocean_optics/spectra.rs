//! Tabulated spectral data with linear interpolation.

use std::fs;
use std::path::Path;

use super::{OceanOpticsError, SPECTRAL_DOMAIN_NM};

/// Ordered `(wavelength_nm, value)` pairs, linearly interpolated on query.
/// Wavelengths must be strictly increasing; queries outside the tabulated
/// range are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTable {
    points: Vec<(f64, f64)>,
}

impl SpectralTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, OceanOpticsError> {
        if points.len() < 2 {
            return Err(OceanOpticsError::TableFormat {
                detail: "spectral table needs at least two points".into(),
            });
        }
        for pair in points.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(OceanOpticsError::TableFormat {
                    detail: format!(
                        "wavelengths not strictly increasing at {} nm",
                        pair[1].0
                    ),
                });
            }
        }
        Ok(Self { points })
    }

    /// Parses the plain-text two-column format: one `wavelength value` pair
    /// per line, `#` starts a comment, blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, OceanOpticsError> {
        let mut points = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let (Some(w), Some(v)) = (cols.next(), cols.next()) else {
                return Err(OceanOpticsError::TableFormat {
                    detail: format!("line {}: expected two columns", lineno + 1),
                });
            };
            if cols.next().is_some() {
                return Err(OceanOpticsError::TableFormat {
                    detail: format!("line {}: more than two columns", lineno + 1),
                });
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| OceanOpticsError::TableFormat {
                    detail: format!("line {}: bad number `{s}`", lineno + 1),
                })
            };
            points.push((parse(w)?, parse(v)?));
        }
        Self::new(points)
    }

    pub fn load(path: &Path) -> Result<Self, OceanOpticsError> {
        let text = fs::read_to_string(path).map_err(|e| OceanOpticsError::TableFormat {
            detail: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn min_wavelength(&self) -> f64 {
        self.points[0].0
    }

    pub fn max_wavelength(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    /// Linear interpolation at `wavelength_nm`.
    pub fn value_at(&self, wavelength_nm: f64) -> Result<f64, OceanOpticsError> {
        if !(wavelength_nm >= self.min_wavelength() && wavelength_nm <= self.max_wavelength()) {
            return Err(OceanOpticsError::OutOfSpectralDomain {
                wavelength_nm,
                min_nm: self.min_wavelength(),
                max_nm: self.max_wavelength(),
            });
        }
        let idx = self
            .points
            .partition_point(|&(w, _)| w <= wavelength_nm)
            .min(self.points.len() - 1);
        let (w1, v1) = self.points[idx];
        if wavelength_nm == w1 {
            return Ok(v1);
        }
        let (w0, v0) = self.points[idx - 1];
        let t = (wavelength_nm - w0) / (w1 - w0);
        Ok(v0 + t * (v1 - v0))
    }
}

/// The three spectral tables the bio-optical absorption model needs:
/// pure-water absorption and the chlorophyll-specific power-law constants
/// `A(lambda)`, `B(lambda)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTables {
    pub water_absorption: SpectralTable,
    pub chl_specific_a: SpectralTable,
    pub chl_specific_b: SpectralTable,
}

pub const WATER_ABSORPTION_FILE: &str = "water_absorption.dat";
pub const CHL_SPECIFIC_A_FILE: &str = "chl_specific_a.dat";
pub const CHL_SPECIFIC_B_FILE: &str = "chl_specific_b.dat";

impl SpectralTables {
    /// Tables compiled into the binary (Smith-Baker pure-water absorption,
    /// Bricaud power-law constants), covering 400-700 nm.
    pub fn builtin() -> Self {
        Self {
            water_absorption: SpectralTable::parse(include_str!(
                "../../data/water_absorption.dat"
            ))
            .expect("embedded water absorption table is valid"),
            chl_specific_a: SpectralTable::parse(include_str!("../../data/chl_specific_a.dat"))
                .expect("embedded A(lambda) table is valid"),
            chl_specific_b: SpectralTable::parse(include_str!("../../data/chl_specific_b.dat"))
                .expect("embedded B(lambda) table is valid"),
        }
    }

    /// Loads the three tables from a directory using the standard file
    /// names (`water_absorption.dat`, `chl_specific_a.dat`,
    /// `chl_specific_b.dat`).
    pub fn from_dir(dir: &Path) -> Result<Self, OceanOpticsError> {
        Ok(Self {
            water_absorption: SpectralTable::load(&dir.join(WATER_ABSORPTION_FILE))?,
            chl_specific_a: SpectralTable::load(&dir.join(CHL_SPECIFIC_A_FILE))?,
            chl_specific_b: SpectralTable::load(&dir.join(CHL_SPECIFIC_B_FILE))?,
        })
    }

    /// Checks that each table spans the working spectral domain.
    pub fn validate_domain(&self) -> Result<(), OceanOpticsError> {
        let (lo, hi) = SPECTRAL_DOMAIN_NM;
        for (name, table) in [
            ("water_absorption", &self.water_absorption),
            ("chl_specific_a", &self.chl_specific_a),
            ("chl_specific_b", &self.chl_specific_b),
        ] {
            if table.min_wavelength() > lo || table.max_wavelength() < hi {
                return Err(OceanOpticsError::TableFormat {
                    detail: format!(
                        "{name} covers [{}, {}] nm, need [{lo}, {hi}]",
                        table.min_wavelength(),
                        table.max_wavelength()
                    ),
                });
            }
        }
        Ok(())
    }
}
