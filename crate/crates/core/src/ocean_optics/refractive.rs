//! Empirical seawater refractive index as a function of salinity,
//! temperature and wavelength.

use super::OceanOpticsError;

/// Validity ranges of the empirical fit.
pub const TEMPERATURE_RANGE_C: (f64, f64) = (0.0, 30.0);
pub const SALINITY_RANGE_PPT: (f64, f64) = (0.0, 35.0);
pub const WAVELENGTH_RANGE_NM: (f64, f64) = (400.0, 700.0);

/// The ten coefficients of the empirical index formula
///
/// `n = n0 + (n1 + n2 T + n3 T^2) S + n4 T^2
///      + (n5 + n6 S + n7 T)/lambda + n8/lambda^2 + n9/lambda^3`
///
/// with S in parts per thousand, T in degrees Celsius, lambda in nm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefractiveIndexCoefficients(pub [f64; 10]);

/// Selectable coefficient sets. `Standard` is the working default; it
/// carries a positive n8 and yields fresh-water indices near 1.358.
/// `QuanFry1995` is the original published fit (n1 = 1.779e-4,
/// n8 = -4382) and lands near the familiar 1.333. Both are kept because
/// the two disagree on the n8 sign and downstream results should be
/// comparable under either.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndexModel {
    #[default]
    Standard,
    QuanFry1995,
}

impl IndexModel {
    pub fn coefficients(self) -> RefractiveIndexCoefficients {
        match self {
            IndexModel::Standard => RefractiveIndexCoefficients([
                1.31405, 1.1779e-4, -1.05e-6, 1.6e-8, -2.02e-6, 15.868, 0.01155, -0.00423,
                4328.0, 1.1455e6,
            ]),
            IndexModel::QuanFry1995 => RefractiveIndexCoefficients([
                1.31405, 1.779e-4, -1.05e-6, 1.6e-8, -2.02e-6, 15.868, 0.01155, -0.00423,
                -4382.0, 1.1455e6,
            ]),
        }
    }

    pub fn parse(name: &str) -> Option<IndexModel> {
        match name {
            "standard" | "default" => Some(IndexModel::Standard),
            "quan-fry-1995" => Some(IndexModel::QuanFry1995),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IndexModel::Standard => "standard",
            IndexModel::QuanFry1995 => "quan-fry-1995",
        }
    }
}

/// Evaluates the empirical refractive index. Arguments outside the
/// fit's validity range are errors.
pub fn refractive_index(
    salinity_ppt: f64,
    temperature_c: f64,
    wavelength_nm: f64,
    coefficients: &RefractiveIndexCoefficients,
) -> Result<f64, OceanOpticsError> {
    check_range("salinity", salinity_ppt, SALINITY_RANGE_PPT)?;
    check_range("temperature", temperature_c, TEMPERATURE_RANGE_C)?;
    check_range("wavelength", wavelength_nm, WAVELENGTH_RANGE_NM)?;
    Ok(refractive_index_unchecked(
        salinity_ppt,
        temperature_c,
        wavelength_nm,
        coefficients,
    ))
}

/// Same formula without the validity-range guard. Used by the turbulence
/// sampler after clamping perturbed inputs into range.
pub fn refractive_index_unchecked(
    s: f64,
    t: f64,
    lambda: f64,
    coefficients: &RefractiveIndexCoefficients,
) -> f64 {
    let n = &coefficients.0;
    n[0] + (n[1] + n[2] * t + n[3] * t * t) * s
        + n[4] * t * t
        + (n[5] + n[6] * s + n[7] * t) / lambda
        + n[8] / (lambda * lambda)
        + n[9] / (lambda * lambda * lambda)
}

fn check_range(what: &'static str, value: f64, (lo, hi): (f64, f64)) -> Result<(), OceanOpticsError> {
    if value.is_finite() && (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(OceanOpticsError::OutOfValidityRange {
            what,
            value,
            min: lo,
            max: hi,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_cold_water_reduces_to_lambda_terms() {
        let c = IndexModel::Standard.coefficients();
        let n = refractive_index(0.0, 0.0, 500.0, &c).unwrap();
        let expected = c.0[0] + c.0[5] / 500.0 + c.0[8] / 500.0f64.powi(2) + c.0[9] / 500.0f64.powi(3);
        assert!((n - expected).abs() < 1e-15);
    }

    #[test]
    fn standard_set_at_sodium_line() {
        let n = refractive_index(0.0, 20.0, 589.0, &IndexModel::Standard.coefficients()).unwrap();
        assert!((n - 1.3581).abs() < 2e-4, "got {n}");
    }

    #[test]
    fn quan_fry_set_near_fresh_water_index() {
        let n = refractive_index(0.0, 20.0, 589.0, &IndexModel::QuanFry1995.coefficients()).unwrap();
        assert!((n - 1.3330).abs() < 2e-4, "got {n}");
    }

    #[test]
    fn normal_dispersion_for_both_sets() {
        // n decreases with wavelength over the whole validity range.
        for model in [IndexModel::Standard, IndexModel::QuanFry1995] {
            let c = model.coefficients();
            for (s, t) in [(0.0, 0.0), (12.5, 16.85), (35.0, 30.0)] {
                let mut last = f64::INFINITY;
                for w in (400..=700).step_by(5) {
                    let n = refractive_index(s, t, w as f64, &c).unwrap();
                    assert!(n < last, "{model:?} not dispersive at {w} nm (S={s}, T={t})");
                    last = n;
                }
            }
        }
    }

    #[test]
    fn out_of_range_arguments_are_errors() {
        let c = IndexModel::Standard.coefficients();
        assert!(refractive_index(-1.0, 10.0, 500.0, &c).is_err());
        assert!(refractive_index(10.0, 31.0, 500.0, &c).is_err());
        assert!(refractive_index(10.0, 10.0, 399.0, &c).is_err());
        assert!(refractive_index(10.0, 10.0, f64::NAN, &c).is_err());
    }

    #[test]
    fn model_names_round_trip() {
        for m in [IndexModel::Standard, IndexModel::QuanFry1995] {
            assert_eq!(IndexModel::parse(m.name()), Some(m));
        }
        assert_eq!(IndexModel::parse("nope"), None);
    }
}
