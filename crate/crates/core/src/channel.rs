//! Monte-Carlo channel transmittance.
//!
//! A transmittance sample combines two independent factors: the
//! Beer-Lambert attenuation of the path and the geometric fraction of the
//! (turbulence-spread) Gaussian beam collected by the receiver aperture,
//! normalised to the fraction launched through the transmitter aperture.
//! The collection ratio is capped at one: the receiver can never collect
//! more power than was transmitted, which the centred-Gaussian aperture
//! model would otherwise permit by a fraction `exp(-2 tx^2/w0^2)`.
//!
//! Samples are keyed by counter-based RNG streams, so a run is bitwise
//! reproducible at any thread count; aggregation walks samples in stream
//! order.

use thiserror::Error;

use crate::beam::{BeamError, GaussianBeam};
use crate::ocean_optics::{
    path_attenuation_factor, ChlorophyllProfile, OceanOpticsError, PathGeometry, SpectralTables,
};
use crate::turbulence::{
    output_spot_radius, sample_cell_sequence, SampleSeed, TurbulenceCellSequence,
    TurbulenceConfig, TurbulenceError,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("aperture radii must be positive, got tx {tx} and rx {rx}")]
    InvalidAperture { tx: f64, rx: f64 },
    #[error("need at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
    #[error("channel model: {detail}")]
    InvalidModel { detail: String },
    #[error(transparent)]
    Turbulence(#[from] TurbulenceError),
    #[error(transparent)]
    Optics(#[from] OceanOpticsError),
    #[error(transparent)]
    Beam(#[from] BeamError),
}

/// Transmitter and receiver aperture radii (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureSpec {
    pub tx_radius: f64,
    pub rx_radius: f64,
}

impl ApertureSpec {
    pub fn new(tx_radius: f64, rx_radius: f64) -> Result<Self, ChannelError> {
        if tx_radius > 0.0 && rx_radius > 0.0 {
            Ok(Self { tx_radius, rx_radius })
        } else {
            Err(ChannelError::InvalidAperture { tx: tx_radius, rx: rx_radius })
        }
    }
}

/// Power of a centred Gaussian irradiance profile collected by a disk:
/// `I0 (pi w^2 / 2) (1 - exp(-2 r^2 / w^2))`.
pub fn power_in_disk(spot_radius: f64, peak_irradiance: f64, disk_radius: f64) -> f64 {
    debug_assert!(spot_radius > 0.0 && disk_radius > 0.0);
    let captured = -(-2.0 * disk_radius * disk_radius / (spot_radius * spot_radius)).exp_m1();
    peak_irradiance * std::f64::consts::FRAC_PI_2 * spot_radius * spot_radius * captured
}

/// Fraction of total beam power inside a disk of radius `r` for spot `w`.
fn captured_fraction(spot_radius: f64, disk_radius: f64) -> f64 {
    -(-2.0 * disk_radius * disk_radius / (spot_radius * spot_radius)).exp_m1()
}

/// Everything one transmittance sample depends on. `turbulence: None`
/// means ideal ballistic propagation (diffraction only); `water: None`
/// disables attenuation. The wavelength is carried in nm alongside the
/// beam's metre value: the attenuation tables and index formula work in
/// nm, and deriving one unit from the other would shift the value by an
/// ulp and spill table lookups at the domain edge.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceModel {
    pub beam: GaussianBeam,
    pub wavelength_nm: f64,
    pub apertures: ApertureSpec,
    pub geometry: PathGeometry,
    pub turbulence: Option<TurbulenceConfig>,
    pub water: Option<WaterAttenuation>,
}

/// Water column driving the Beer-Lambert factor.
#[derive(Debug, Clone, PartialEq)]
pub struct WaterAttenuation {
    pub profile: ChlorophyllProfile,
    pub tables: SpectralTables,
}

impl TransmittanceModel {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if (self.wavelength_nm * 1e-9 - self.beam.wavelength).abs() > 1e-6 * self.beam.wavelength
        {
            return Err(ChannelError::InvalidModel {
                detail: format!(
                    "wavelength_nm {} disagrees with beam wavelength {} m",
                    self.wavelength_nm, self.beam.wavelength
                ),
            });
        }
        if let Some(turbulence) = &self.turbulence {
            turbulence.validate()?;
            if (turbulence.wavelength_nm - self.wavelength_nm).abs() > 1e-9 {
                return Err(ChannelError::InvalidModel {
                    detail: format!(
                        "turbulence wavelength {} nm does not match channel wavelength {} nm",
                        turbulence.wavelength_nm, self.wavelength_nm
                    ),
                });
            }
        }
        Ok(())
    }

    /// Beer-Lambert factor of the path; constant across samples.
    pub fn attenuation_factor(&self) -> Result<f64, ChannelError> {
        match &self.water {
            Some(water) => Ok(path_attenuation_factor(
                &self.geometry,
                self.wavelength_nm,
                &water.profile,
                &water.tables,
            )?),
            None => Ok(1.0),
        }
    }

    /// Spot radius at the receiver for the given sample stream.
    fn sample_spot_radius(&self, seed: SampleSeed) -> Result<f64, ChannelError> {
        let range = self.geometry.range();
        match (&self.turbulence, range > 0.0) {
            (Some(config), true) => {
                let sequence = sample_cell_sequence(config, range, seed)?;
                Ok(output_spot_radius(&self.beam, &sequence)?)
            }
            (Some(config), false) => {
                config.validate()?;
                Ok(self.beam.waist_radius)
            }
            (None, _) => Ok(self.beam.diffraction_spot_radius(range, 1.0)),
        }
    }

    /// Receiver-to-transmitter power ratio for a given receiver-plane
    /// spot, capped at one.
    fn collection_ratio(&self, spot_radius: f64) -> f64 {
        let received = captured_fraction(spot_radius, self.apertures.rx_radius);
        let launched = captured_fraction(self.beam.waist_radius, self.apertures.tx_radius);
        (received / launched).min(1.0)
    }
}

/// One transmittance realization in (0, 1]: attenuation factor times the
/// capped collection ratio for an explicit cell sequence.
pub fn transmittance_sample(
    model: &TransmittanceModel,
    sequence: &TurbulenceCellSequence,
) -> Result<f64, ChannelError> {
    model.validate()?;
    let spot = output_spot_radius(&model.beam, sequence)?;
    Ok(model.attenuation_factor()? * model.collection_ratio(spot))
}

/// One transmittance realization drawn from the model's own ensemble.
pub fn transmittance_sample_seeded(
    model: &TransmittanceModel,
    seed: SampleSeed,
) -> Result<f64, ChannelError> {
    model.validate()?;
    let spot = model.sample_spot_radius(seed)?;
    Ok(model.attenuation_factor()? * model.collection_ratio(spot))
}

/// Histogram over uniform bins spanning the sample range. With a
/// degenerate range every count lands in the first bin.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

pub const HISTOGRAM_BINS: usize = 64;

impl Histogram {
    pub fn from_samples(samples: &[f64]) -> Self {
        let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = max - min;
        let edges: Vec<f64> = (0..=HISTOGRAM_BINS)
            .map(|i| min + span * i as f64 / HISTOGRAM_BINS as f64)
            .collect();
        let mut counts = vec![0u64; HISTOGRAM_BINS];
        for &x in samples {
            let bin = if span > 0.0 {
                (((x - min) / span) * HISTOGRAM_BINS as f64) as usize
            } else {
                0
            };
            counts[bin.min(HISTOGRAM_BINS - 1)] += 1;
        }
        Self { edges, counts }
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }
}

/// Gaussian fit of a normalized-intensity sample set.
#[derive(Debug, Clone, PartialEq)]
pub enum IntensityPdf {
    Normal {
        mu: f64,
        sigma: f64,
        /// Normal density evaluated on the histogram bin centers.
        curve: Vec<(f64, f64)>,
    },
    /// All samples identical; no meaningful density curve exists.
    PointMass { value: f64 },
}

impl IntensityPdf {
    pub fn mu(&self) -> f64 {
        match self {
            IntensityPdf::Normal { mu, .. } => *mu,
            IntensityPdf::PointMass { value } => *value,
        }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            IntensityPdf::Normal { sigma, .. } => *sigma,
            IntensityPdf::PointMass { .. } => 0.0,
        }
    }
}

/// Fits `PDF(I) = exp(-(I - mu)^2 / (2 sigma^2)) / sqrt(2 pi sigma^2)`
/// with the sample mean and unbiased standard deviation, evaluating the
/// curve on a 64-bin histogram grid.
pub fn fit_intensity_pdf(samples: &[f64]) -> Result<IntensityPdf, ChannelError> {
    if samples.len() < 2 {
        return Err(ChannelError::InsufficientSamples { need: 2, got: samples.len() });
    }
    let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let max = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        // Identical samples: the mean summed in floating point may drift
        // off the common value, so report the value itself.
        return Ok(IntensityPdf::PointMass { value: min });
    }
    let (mu, sigma) = mean_and_std(samples);
    if sigma == 0.0 {
        return Ok(IntensityPdf::PointMass { value: mu });
    }
    let histogram = Histogram::from_samples(samples);
    let norm = 1.0 / (sigma * (2.0 * std::f64::consts::PI).sqrt());
    let curve = histogram
        .bin_centers()
        .into_iter()
        .map(|x| {
            let z = (x - mu) / sigma;
            (x, norm * (-0.5 * z * z).exp())
        })
        .collect();
    Ok(IntensityPdf::Normal { mu, sigma, curve })
}

fn mean_and_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Monte-Carlo ensemble summary for one channel configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmittanceStats {
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Unbiased standard deviation; zero by convention for one sample.
    pub std: f64,
    pub histogram: Histogram,
    pub fit: IntensityPdf,
}

/// Runs `sample_count` independent realizations on per-sample RNG
/// streams derived from `master_seed`. The sample vector is ordered by
/// stream index and the reduction walks it sequentially, so the result is
/// identical whether samples were evaluated in parallel or not.
pub fn monte_carlo_transmittance(
    model: &TransmittanceModel,
    sample_count: usize,
    master_seed: u64,
) -> Result<TransmittanceStats, ChannelError> {
    if sample_count == 0 {
        return Err(ChannelError::InsufficientSamples { need: 1, got: 0 });
    }
    model.validate()?;
    let attenuation = model.attenuation_factor()?;
    let samples = collect_samples(model, sample_count, master_seed, attenuation)?;
    let (mean, std) = mean_and_std(&samples);
    let histogram = Histogram::from_samples(&samples);
    let fit = if samples.len() >= 2 {
        fit_intensity_pdf(&samples)?
    } else {
        IntensityPdf::PointMass { value: mean }
    };
    Ok(TransmittanceStats { samples, mean, std, histogram, fit })
}

fn sample_one(
    model: &TransmittanceModel,
    attenuation: f64,
    master_seed: u64,
    stream: u64,
) -> Result<f64, ChannelError> {
    let seed = SampleSeed::new(master_seed).with_stream(stream);
    let spot = model.sample_spot_radius(seed)?;
    Ok(attenuation * model.collection_ratio(spot))
}

#[cfg(feature = "parallel")]
fn collect_samples(
    model: &TransmittanceModel,
    sample_count: usize,
    master_seed: u64,
    attenuation: f64,
) -> Result<Vec<f64>, ChannelError> {
    (0..sample_count as u64)
        .into_par_iter()
        .map(|stream| sample_one(model, attenuation, master_seed, stream))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn collect_samples(
    model: &TransmittanceModel,
    sample_count: usize,
    master_seed: u64,
    attenuation: f64,
) -> Result<Vec<f64>, ChannelError> {
    (0..sample_count as u64)
        .map(|stream| sample_one(model, attenuation, master_seed, stream))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ocean_optics::IndexModel;

    fn beam() -> GaussianBeam {
        GaussianBeam::new(0.04, 480e-9).unwrap()
    }

    fn default_turbulence() -> TurbulenceConfig {
        TurbulenceConfig {
            cells_per_meter: 5.0,
            mean_salinity: 12.5,
            mean_temperature: 16.85,
            sigma_salinity: 0.5,
            sigma_temperature: 1.0,
            curvature_range: (1e-4, 1.0),
            wavelength_nm: 480.0,
            index_model: IndexModel::Standard,
        }
    }

    fn turbulence_only_model(range: f64) -> TransmittanceModel {
        TransmittanceModel {
            beam: beam(),
            wavelength_nm: 480.0,
            apertures: ApertureSpec::new(0.08, 0.8).unwrap(),
            geometry: PathGeometry::sdc(200.0, range).unwrap(),
            turbulence: Some(default_turbulence()),
            water: None,
        }
    }

    #[test]
    fn power_in_disk_limits() {
        let w = 0.12;
        let total = std::f64::consts::FRAC_PI_2 * w * w;
        assert_eq!(power_in_disk(w, 1.0, f64::INFINITY), total);
        let at_w = power_in_disk(w, 1.0, w) / total;
        assert!((at_w - 0.8646647167633873).abs() < 1e-15);
        let narrow = power_in_disk(w, 1.0, w / 10.0) / total;
        assert!((narrow - 0.019801326693244747).abs() < 1e-15);
    }

    #[test]
    fn power_in_disk_matches_polar_quadrature() {
        // Independent check of the closed form on a 100-point random
        // grid: integrate the Gaussian irradiance over the disk in polar
        // coordinates, composite Simpson in r times midpoint slices in
        // the angle.
        let quadrature = |w: f64, r: f64| {
            let radial = |rr: f64| rr * (-2.0 * rr * rr / (w * w)).exp();
            // Beyond six spot radii the integrand is e^-72 of its peak;
            // truncating there keeps the Simpson nodes on the feature
            // when the disk dwarfs the spot.
            let r_eff = r.min(6.0 * w);
            let n = 4000;
            let h = r_eff / n as f64;
            let mut sum = radial(0.0) + radial(r_eff);
            for i in 1..n {
                sum += if i % 2 == 1 { 4.0 } else { 2.0 } * radial(i as f64 * h);
            }
            let radial_integral = sum * h / 3.0;
            let slices = 64;
            (0..slices)
                .map(|_| radial_integral * 2.0 * std::f64::consts::PI / slices as f64)
                .sum::<f64>()
        };
        let mut state = 4242u64;
        let mut uniform = move || {
            state = crate::seed::derive_seed(state, 1);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let w = 0.01 + 2.0 * uniform();
            let r = 0.01 + 2.0 * uniform();
            let numeric = quadrature(w, r);
            let closed = power_in_disk(w, 1.0, r);
            assert!(
                ((numeric - closed) / closed).abs() < 1e-9,
                "w {w}, r {r}: {numeric} vs {closed}"
            );
        }
    }

    #[test]
    fn power_in_disk_monotone_in_radius() {
        // Strictly increasing while the captured fraction is still
        // resolvable below one (the tail saturates in f64 past ~4 spot
        // radii).
        let mut last = 0.0;
        for i in 1..=75 {
            let p = power_in_disk(0.3, 1.0, i as f64 * 0.01);
            assert!(p > last, "not increasing at r = {}", i as f64 * 0.01);
            last = p;
        }
    }

    #[test]
    fn lossless_wide_apertures_give_unity() {
        let model = TransmittanceModel {
            apertures: ApertureSpec::new(1e9, 1e9).unwrap(),
            ..turbulence_only_model(10.0)
        };
        let t = transmittance_sample_seeded(&model, SampleSeed::new(3)).unwrap();
        assert!((t - 1.0).abs() < 1e-12, "got {t}");
    }

    #[test]
    fn attenuation_passes_through() {
        // Disable turbulence, huge apertures: the sample equals the
        // Beer-Lambert factor alone.
        let profile = ChlorophyllProfile::by_label("S1").unwrap();
        let tables = SpectralTables::builtin();
        let model = TransmittanceModel {
            beam: beam(),
            wavelength_nm: 480.0,
            apertures: ApertureSpec::new(1e9, 1e9).unwrap(),
            geometry: PathGeometry::sdc(200.0, 25.0).unwrap(),
            turbulence: None,
            water: Some(WaterAttenuation { profile: profile.clone(), tables: tables.clone() }),
        };
        let expected = path_attenuation_factor(
            &model.geometry,
            480.0,
            &profile,
            &tables,
        )
        .unwrap();
        let got = transmittance_sample_seeded(&model, SampleSeed::new(0)).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn factors_combine_multiplicatively() {
        let profile = ChlorophyllProfile::by_label("S1").unwrap();
        let tables = SpectralTables::builtin();
        let both = TransmittanceModel {
            water: Some(WaterAttenuation { profile, tables }),
            ..turbulence_only_model(15.0)
        };
        let turb_only = TransmittanceModel { water: None, ..both.clone() };
        let atten = both.attenuation_factor().unwrap();
        let seed = SampleSeed::new(11);
        let t_both = transmittance_sample_seeded(&both, seed).unwrap();
        let t_turb = transmittance_sample_seeded(&turb_only, seed).unwrap();
        assert!((t_both - atten * t_turb).abs() < 1e-15);
    }

    #[test]
    fn samples_stay_in_unit_interval() {
        let model = turbulence_only_model(30.0);
        for seed in 0..500u64 {
            let t = transmittance_sample_seeded(&model, SampleSeed::new(seed)).unwrap();
            assert!(t > 0.0 && t <= 1.0, "seed {seed}: {t}");
        }
    }

    #[test]
    fn default_setup_mean_band_at_ten_meters() {
        // Directional check at the default operating point: turbulence
        // drags the 100k-sample mean strictly below the no-turbulence
        // value while staying above one half.
        let model = turbulence_only_model(10.0);
        let stats = monte_carlo_transmittance(&model, 100_000, 42).unwrap();
        let no_turbulence = transmittance_sample_seeded(
            &TransmittanceModel { turbulence: None, ..model },
            SampleSeed::new(0),
        )
        .unwrap();
        assert!((no_turbulence - 1.0).abs() < 1e-12);
        assert!(stats.mean >= 0.5 && stats.mean <= 1.0, "mean {}", stats.mean);
        assert!(stats.mean < no_turbulence, "mean {} not below {no_turbulence}", stats.mean);
    }

    #[test]
    fn single_sample_has_zero_std() {
        let model = turbulence_only_model(10.0);
        let stats = monte_carlo_transmittance(&model, 1, 7).unwrap();
        assert_eq!(stats.std, 0.0);
        assert_eq!(stats.mean, stats.samples[0]);
    }

    #[test]
    fn disabled_turbulence_collapses_the_ensemble() {
        let model = TransmittanceModel { turbulence: None, ..turbulence_only_model(10.0) };
        let stats = monte_carlo_transmittance(&model, 64, 7).unwrap();
        assert_eq!(stats.std, 0.0);
        assert!(stats.samples.iter().all(|&s| s == stats.samples[0]));
        assert!(matches!(stats.fit, IntensityPdf::PointMass { .. }));
    }

    #[test]
    fn monte_carlo_is_seed_deterministic() {
        let model = turbulence_only_model(12.0);
        let a = monte_carlo_transmittance(&model, 256, 41).unwrap();
        let b = monte_carlo_transmittance(&model, 256, 41).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = monte_carlo_transmittance(&model, 256, 40).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn fit_two_point_case() {
        match fit_intensity_pdf(&[0.0, 2.0]).unwrap() {
            IntensityPdf::Normal { mu, sigma, curve } => {
                assert_eq!(mu, 1.0);
                assert!((sigma - std::f64::consts::SQRT_2).abs() < 1e-15);
                assert_eq!(curve.len(), HISTOGRAM_BINS);
            }
            other => panic!("expected normal fit, got {other:?}"),
        }
    }

    #[test]
    fn fit_degenerates_to_point_mass() {
        let samples = vec![0.7; 32];
        assert_eq!(
            fit_intensity_pdf(&samples).unwrap(),
            IntensityPdf::PointMass { value: 0.7 }
        );
        assert!(matches!(
            fit_intensity_pdf(&[1.0]),
            Err(ChannelError::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn fluctuation_spread_direction_over_distance() {
        // The fitted sigma of the normalized received power grows from
        // 5 m to 20 m with the default ensemble: at short range nearly
        // every realization is fully captured, at 20 m the spread beam
        // explores the whole (0, 1] band.
        let sigma_at = |range: f64| {
            let stats =
                monte_carlo_transmittance(&turbulence_only_model(range), 20_000, 9).unwrap();
            stats.fit.sigma()
        };
        let s5 = sigma_at(5.0);
        let s20 = sigma_at(20.0);
        assert!(s20 > s5, "sigma(20 m) = {s20} vs sigma(5 m) = {s5}");
    }

    #[test]
    fn histogram_counts_sum_to_sample_count() {
        let model = turbulence_only_model(20.0);
        let stats = monte_carlo_transmittance(&model, 999, 3).unwrap();
        assert_eq!(stats.histogram.counts.iter().sum::<u64>(), 999);
        assert!(stats.mean >= stats.samples.iter().copied().fold(f64::INFINITY, f64::min));
        assert!(stats.mean <= stats.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    }

    #[test]
    fn zero_range_is_unity() {
        let model = turbulence_only_model(0.0);
        let t = transmittance_sample_seeded(&model, SampleSeed::new(5)).unwrap();
        assert_eq!(t, 1.0);
    }
}
