//! Chlorophyll depth profiles for the S1-S9 oceanic water classes and the
//! one-parameter particulate model tied to them.

use std::fs;
use std::path::Path;

use super::OceanOpticsError;

const SQRT_TWO_PI: f64 = 2.506628274631000502415765284811;

/// One row of the S1-S9 water-class table: the chlorophyll concentration
/// over depth is a Gaussian bump on top of a linearly drifting background,
///
/// `Cc(d) = b0 + s*d + h / (sigma sqrt(2 pi)) * exp(-(d - d_max)^2 / (2 sigma^2))`
///
/// with `sigma` derived so the curve reproduces the tabulated peak value
/// at `d_max` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ChlorophyllProfile {
    /// Water class name (S1-S9).
    pub label: String,
    /// Background surface concentration b0 (mg/m^3).
    pub b0: f64,
    /// Vertical gradient s (mg/m^3 per m); zero or negative.
    pub s_gradient: f64,
    /// Chlorophyll above background level h.
    pub h_total: f64,
    /// Depth of maximum concentration (m).
    pub d_max: f64,
    /// Concentration at `d_max` (mg/m^3).
    pub c_at_dmax: f64,
    /// Depth of negligible concentration (m), when tabulated.
    pub d_inf: Option<f64>,
    sigma: f64,
}

impl ChlorophyllProfile {
    pub fn new(
        label: impl Into<String>,
        b0: f64,
        s_gradient: f64,
        h_total: f64,
        d_max: f64,
        c_at_dmax: f64,
        d_inf: Option<f64>,
    ) -> Result<Self, OceanOpticsError> {
        let label = label.into();
        if !(d_max > 0.0 && h_total > 0.0 && c_at_dmax > b0) {
            return Err(OceanOpticsError::InvalidProfile {
                label,
                detail: "requires d_max > 0, h > 0 and c(d_max) > b0".into(),
            });
        }
        let denominator = c_at_dmax - b0 - s_gradient * d_max;
        if denominator <= 0.0 {
            return Err(OceanOpticsError::NonPositiveDenominator {
                label,
                denominator,
            });
        }
        if s_gradient > 0.0 {
            return Err(OceanOpticsError::InvalidProfile {
                label,
                detail: "gradient must be zero or negative".into(),
            });
        }
        let sigma = h_total / (SQRT_TWO_PI * denominator);
        Ok(Self {
            label,
            b0,
            s_gradient,
            h_total,
            d_max,
            c_at_dmax,
            d_inf,
            sigma,
        })
    }

    /// Standard deviation of the Gaussian term,
    /// `sigma = h / (sqrt(2 pi) (C(d_max) - b0 - s d_max))`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Chlorophyll concentration at depth `d` (m), clamped below at zero
    /// (the linear term goes negative at great depth).
    pub fn concentration_at(&self, d: f64) -> f64 {
        debug_assert!(d >= 0.0, "depth must be non-negative");
        let gauss = self.h_total / (self.sigma * SQRT_TWO_PI)
            * (-(d - self.d_max).powi(2) / (2.0 * self.sigma * self.sigma)).exp();
        (self.b0 + self.s_gradient * d + gauss).max(0.0)
    }

    /// The nine tabulated water classes.
    pub fn standard_set() -> Vec<ChlorophyllProfile> {
        parse_profile_table(include_str!("../../data/chlorophyll_profiles.dat"))
            .expect("embedded profile table is valid")
    }

    /// Looks a class up by label (case-insensitive) in the standard set.
    pub fn by_label(label: &str) -> Result<ChlorophyllProfile, OceanOpticsError> {
        Self::standard_set()
            .into_iter()
            .find(|p| p.label.eq_ignore_ascii_case(label))
            .ok_or_else(|| OceanOpticsError::UnknownProfile {
                label: label.to_string(),
            })
    }
}

/// Parses the structured profile table: one row per class with columns
/// `label c_surf b0 s_x1e3 h d_max c_dmax d_inf`, `#` comments. The
/// gradient column carries the table's `S x 1e-3` scaling; `d_inf` may be
/// `-` for classes without a tabulated value.
pub fn parse_profile_table(text: &str) -> Result<Vec<ChlorophyllProfile>, OceanOpticsError> {
    let mut rows = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 8 {
            return Err(OceanOpticsError::TableFormat {
                detail: format!("profile line {}: expected 8 columns, got {}", lineno + 1, cols.len()),
            });
        }
        let num = |s: &str| {
            s.parse::<f64>().map_err(|_| OceanOpticsError::TableFormat {
                detail: format!("profile line {}: bad number `{s}`", lineno + 1),
            })
        };
        let label = cols[0];
        // cols[1] is the informational surface-concentration range.
        let b0 = num(cols[2])?;
        let s_gradient = num(cols[3])? * 1e-3;
        let h_total = num(cols[4])?;
        let d_max = num(cols[5])?;
        let c_at_dmax = num(cols[6])?;
        let d_inf = if cols[7] == "-" { None } else { Some(num(cols[7])?) };
        rows.push(ChlorophyllProfile::new(
            label, b0, s_gradient, h_total, d_max, c_at_dmax, d_inf,
        )?);
    }
    if rows.is_empty() {
        return Err(OceanOpticsError::TableFormat {
            detail: "profile table is empty".into(),
        });
    }
    Ok(rows)
}

pub fn load_profile_table(path: &Path) -> Result<Vec<ChlorophyllProfile>, OceanOpticsError> {
    let text = fs::read_to_string(path).map_err(|e| OceanOpticsError::TableFormat {
        detail: format!("{}: {e}", path.display()),
    })?;
    parse_profile_table(&text)
}

/// Concentrations of the optically active constituents at one depth.
/// All in mg/m^3 except the particulates `c_s`, `c_l` in g/m^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaterComposition {
    /// Chlorophyll-a (mg/m^3).
    pub c_c: f64,
    /// Fulvic acid (mg/m^3).
    pub c_f: f64,
    /// Humic acid (mg/m^3).
    pub c_h: f64,
    /// Small particulate matter (g/m^3).
    pub c_s: f64,
    /// Large particulate matter (g/m^3).
    pub c_l: f64,
}

/// One-parameter particulate model: fulvic/humic acids and small/large
/// particulates as empirical exponential functions of the chlorophyll
/// concentration.
pub fn particulate_concentrations(c_c: f64) -> WaterComposition {
    debug_assert!(c_c >= 0.0, "chlorophyll concentration must be non-negative");
    WaterComposition {
        c_c,
        c_f: 1.74098 * c_c * (-0.12327 * c_c).exp(),
        c_h: 0.19334 * c_c * (-0.12343 * c_c).exp(),
        c_s: 0.01739 * c_c * (-0.11631 * c_c).exp(),
        c_l: 0.76284 * c_c * (-0.03092 * c_c).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s1() -> ChlorophyllProfile {
        ChlorophyllProfile::by_label("S1").unwrap()
    }

    #[test]
    fn standard_set_has_nine_classes() {
        let set = ChlorophyllProfile::standard_set();
        assert_eq!(set.len(), 9);
        assert_eq!(set[0].label, "S1");
        assert_eq!(set[8].label, "S9");
        assert!(set[8].d_inf.is_none());
        assert_eq!(set[8].s_gradient, 0.0);
    }

    #[test]
    fn sigma_s1_matches_hand_evaluation() {
        // 11.87 / (sqrt(2 pi) * (0.708 - 0.0429 + 0.103e-3 * 115.4))
        assert!((s1().sigma() - 6.99489).abs() < 1e-5);
    }

    #[test]
    fn sigma_unit_case() {
        // h = sqrt(2 pi) and unit denominator force sigma = 1.
        let p = ChlorophyllProfile::new("unit", 0.0, 0.0, SQRT_TWO_PI, 10.0, 1.0, None).unwrap();
        assert!((p.sigma() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_s9_from_table_row() {
        let p = ChlorophyllProfile::by_label("S9").unwrap();
        let expected = 130.6 / (SQRT_TWO_PI * (136.5 - 0.555));
        assert!((p.sigma() - expected).abs() < 1e-12);
    }

    #[test]
    fn non_positive_denominator_is_rejected() {
        assert!(ChlorophyllProfile::new("ok", 0.5, 0.0, 1.0, 10.0, 0.6, None).is_ok());
        // Gradient line overtaking the peak at d_max zeroes the sigma
        // denominator, which signals an inconsistent row.
        let err = ChlorophyllProfile::new("bad", 0.5, 0.02, 1.0, 10.0, 0.6, None);
        assert!(matches!(
            err,
            Err(OceanOpticsError::NonPositiveDenominator { .. })
        ));
    }

    #[test]
    fn concentration_closed_loop_at_dmax() {
        // Sigma is constructed so the curve reproduces the tabulated peak.
        for p in ChlorophyllProfile::standard_set() {
            let got = p.concentration_at(p.d_max);
            assert!(
                ((got - p.c_at_dmax) / p.c_at_dmax).abs() < 1e-9,
                "{}: {got} vs {}",
                p.label,
                p.c_at_dmax
            );
        }
    }

    #[test]
    fn concentration_negligible_at_d_inf() {
        let p = s1();
        let at_inf = p.concentration_at(p.d_inf.unwrap());
        assert!(at_inf <= 0.05 * p.c_at_dmax, "got {at_inf}");
    }

    #[test]
    fn concentration_clamped_at_depth() {
        // The linear term forces negatives around 500 m for S1.
        assert_eq!(s1().concentration_at(500.0), 0.0);
    }

    #[test]
    fn s9_surface_value_follows_the_curve() {
        // With zero gradient the surface value is b0 plus the Gaussian
        // tail, which underflows for the narrow S9 bump.
        let p = ChlorophyllProfile::by_label("S9").unwrap();
        assert!((p.concentration_at(0.0) - 0.555).abs() < 1e-12);
    }

    #[test]
    fn particulates_vanish_with_chlorophyll() {
        let c = particulate_concentrations(0.0);
        assert_eq!((c.c_f, c.c_h, c.c_s, c.c_l), (0.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn particulates_at_unit_chlorophyll() {
        let c = particulate_concentrations(1.0);
        assert!((c.c_f - 1.539068).abs() < 1e-5, "c_f {}", c.c_f);
        assert!((c.c_l - 0.739615).abs() < 1e-5, "c_l {}", c.c_l);
    }

    #[test]
    fn particulates_positive_iff_chlorophyll_present() {
        for profile in ChlorophyllProfile::standard_set() {
            for depth in [0.0, profile.d_max, 2.0 * profile.d_max, 400.0] {
                let c_c = profile.concentration_at(depth);
                let c = particulate_concentrations(c_c);
                for value in [c.c_f, c.c_h, c.c_s, c.c_l] {
                    assert!(value >= 0.0);
                    assert_eq!(value > 0.0, c_c > 0.0, "{} at {depth} m", profile.label);
                }
            }
        }
    }

    #[test]
    fn unknown_label_is_an_error() {
        assert!(matches!(
            ChlorophyllProfile::by_label("S10"),
            Err(OceanOpticsError::UnknownProfile { .. })
        ));
    }
}
