//! Gaussian-beam propagation in the 2x2 ray-transfer (ABCD) formalism.
//!
//! Matrices use the reduced (height, index-times-angle) convention:
//! translation through a medium carries the index inside the B entry,
//! `[[1, z/n], [0, 1]]`, and refraction at a curved index step is
//! `[[1, 0], [-(n_out - n_in)/R, 1]]`. Every element then has unit
//! determinant, which composition preserves.
//!
//! The complex beam parameter stored here is the reduced one: its real
//! part is the index-scaled distance from the waist and its imaginary
//! part is `k w0^2 / 2` with `k` the vacuum wavenumber, so waist and spot
//! size are always extracted with the vacuum wavelength.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    #[error("interface curvature radius must be non-zero")]
    ZeroCurvature,
    #[error("Moebius denominator magnitude {magnitude:e} below cutoff")]
    DegenerateTransform { magnitude: f64 },
    #[error("beam parameter has non-positive imaginary part {imag}")]
    NonPhysicalBeam { imag: f64 },
    #[error("invalid beam element: {detail}")]
    InvalidElement { detail: String },
}

/// Smallest Moebius denominator magnitude treated as non-degenerate.
pub const DENOMINATOR_CUTOFF: f64 = 1e-30;

/// 2x2 real ray-transfer matrix; `b` in metres, `c` in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayTransferMatrix {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl RayTransferMatrix {
    pub const IDENTITY: RayTransferMatrix = RayTransferMatrix {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Translation over physical distance `z` in a medium of index `n`.
    pub fn propagation(z: f64, n: f64) -> Result<Self, BeamError> {
        if !(z >= 0.0) || !(n >= 1.0) {
            return Err(BeamError::InvalidElement {
                detail: format!("propagation needs z >= 0 and n >= 1, got z = {z}, n = {n}"),
            });
        }
        Ok(Self { a: 1.0, b: z / n, c: 0.0, d: 1.0 })
    }

    /// Refraction at an index step across a spherical interface of signed
    /// curvature radius `r`. Reduces to identity when the indices match.
    pub fn interface(n_in: f64, n_out: f64, r: f64) -> Result<Self, BeamError> {
        if r == 0.0 {
            return Err(BeamError::ZeroCurvature);
        }
        if !(n_in >= 1.0) || !(n_out >= 1.0) {
            return Err(BeamError::InvalidElement {
                detail: format!("interface needs indices >= 1, got {n_in} and {n_out}"),
            });
        }
        Ok(Self { a: 1.0, b: 0.0, c: -(n_out - n_in) / r, d: 1.0 })
    }

    /// Matrix for `self` acting first, `next` acting second.
    pub fn then(&self, next: &RayTransferMatrix) -> RayTransferMatrix {
        RayTransferMatrix {
            a: next.a * self.a + next.b * self.c,
            b: next.a * self.b + next.b * self.d,
            c: next.c * self.a + next.d * self.c,
            d: next.c * self.b + next.d * self.d,
        }
    }

    /// Determinant `a d - b c`, evaluated with compensated products so
    /// cancellation between the two terms costs only one ulp.
    pub fn determinant(&self) -> f64 {
        let w = self.b * self.c;
        let err = (-self.b).mul_add(self.c, w);
        let diff = self.a.mul_add(self.d, -w);
        diff + err
    }
}

/// Reduced complex beam parameter `q = x + i y` with `y = k w^2 / 2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexBeamParameter {
    pub real: f64,
    pub imag: f64,
}

impl ComplexBeamParameter {
    pub fn new(real: f64, imag: f64) -> Result<Self, BeamError> {
        if imag > 0.0 {
            Ok(Self { real, imag })
        } else {
            Err(BeamError::NonPhysicalBeam { imag })
        }
    }

    /// Moebius transform `q' = (A q + B) / (C q + D)`.
    pub fn transform(&self, m: &RayTransferMatrix) -> Result<Self, BeamError> {
        let num_re = m.a * self.real + m.b;
        let num_im = m.a * self.imag;
        let den_re = m.c * self.real + m.d;
        let den_im = m.c * self.imag;
        let den_sq = den_re * den_re + den_im * den_im;
        if den_sq.sqrt() <= DENOMINATOR_CUTOFF {
            return Err(BeamError::DegenerateTransform { magnitude: den_sq.sqrt() });
        }
        let real = (num_re * den_re + num_im * den_im) / den_sq;
        // The imaginary part reduces to Im(q) det(M) / |den|^2 exactly;
        // evaluating it that way keeps positivity structural instead of
        // hanging it on the cancellation of two nearly equal products
        // when the chain focuses near the output plane.
        let imag = self.imag * m.determinant() / den_sq;
        Self::new(real, imag)
    }

    /// Waist radius of the beam this parameter describes,
    /// `w0 = sqrt(2 Im(q) / k)` with `k` the vacuum wavenumber.
    pub fn waist_radius(&self, wavenumber: f64) -> Result<f64, BeamError> {
        if self.imag <= 0.0 {
            return Err(BeamError::NonPhysicalBeam { imag: self.imag });
        }
        Ok((2.0 * self.imag / wavenumber).sqrt())
    }

    /// 1/e^2 irradiance radius at the evaluation plane,
    /// `w = sqrt(2 |q|^2 / (k Im(q)))`. Coincides with the waist radius
    /// when the plane sits at the waist (Re(q) = 0) and reproduces
    /// `w0 sqrt(1 + (z/zR)^2)` under free propagation.
    pub fn spot_radius(&self, wavenumber: f64) -> Result<f64, BeamError> {
        if self.imag <= 0.0 {
            return Err(BeamError::NonPhysicalBeam { imag: self.imag });
        }
        let norm_sq = self.real * self.real + self.imag * self.imag;
        Ok((2.0 * norm_sq / (wavenumber * self.imag)).sqrt())
    }
}

/// Launch parameters of a collimated Gaussian beam (waist at the
/// transmitter aperture).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianBeam {
    /// Waist radius w0 (m).
    pub waist_radius: f64,
    /// Vacuum wavelength (m).
    pub wavelength: f64,
}

impl GaussianBeam {
    pub fn new(waist_radius: f64, wavelength: f64) -> Result<Self, BeamError> {
        if !(waist_radius > 0.0 && wavelength > 0.0) {
            return Err(BeamError::InvalidElement {
                detail: format!(
                    "beam needs positive waist and wavelength, got {waist_radius} and {wavelength}"
                ),
            });
        }
        Ok(Self { waist_radius, wavelength })
    }

    /// Vacuum wavenumber k = 2 pi / lambda (1/m).
    pub fn wavenumber(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.wavelength
    }

    /// Rayleigh range zR = k w0^2 / 2 = pi w0^2 / lambda (m).
    pub fn rayleigh_range(&self) -> f64 {
        0.5 * self.wavenumber() * self.waist_radius * self.waist_radius
    }

    /// Beam parameter at the waist, q0 = i zR.
    pub fn initial_parameter(&self) -> ComplexBeamParameter {
        ComplexBeamParameter { real: 0.0, imag: self.rayleigh_range() }
    }

    /// Diffraction-limited spot radius after free propagation over `z`
    /// in a homogeneous medium of index `n`.
    pub fn diffraction_spot_radius(&self, z: f64, n: f64) -> f64 {
        let zr = self.rayleigh_range();
        self.waist_radius * (1.0 + (z / (n * zr)).powi(2)).sqrt()
    }
}
