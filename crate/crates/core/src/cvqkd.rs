//! Key-rate analysis of a coherent-state CV-QKD protocol with virtual
//! photon subtraction.
//!
//! Virtual subtraction of `m` photons is realised as postselection on
//! Alice's heterodyne outcomes with a Poisson-shaped acceptance filter.
//! The surviving ensemble is summarised by a two-mode covariance block
//! `(V_A, V_B, phi)` in shot-noise units, which a thermal-loss channel
//! maps forward; mutual information and the Holevo bound under collective
//! attacks then come from the block alone, and the asymptotic key is
//!
//! `K = P(m) (beta I_AB - chi_BE)`
//!
//! with `P(m)` the postselection success probability. Bob uses homodyne
//! detection and reconciliation is reverse.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QkdError {
    #[error("invalid parameter: {detail}")]
    InvalidParameter { detail: String },
    #[error("beamsplitter-squeezing product T zeta^2 = {t_zeta_sq} must stay below 1")]
    InvalidRegime { t_zeta_sq: f64 },
    #[error("conditional variance {value} is not positive; block is unphysical")]
    NonPositiveConditionalVariance { value: f64 },
    #[error("unphysical covariance block: {detail}")]
    UnphysicalState { detail: String },
}

/// Eigenvalues this far below one are treated as unphysical rather than
/// rounding error.
pub const EIGENVALUE_SLACK: f64 = 1e-6;

/// Two-mode squeezed vacuum source: squeezing parameter `zeta` in (0, 1)
/// and variance `V = (1 + zeta^2) / (1 - zeta^2)` in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TmsvParams {
    pub zeta: f64,
    pub variance_v: f64,
}

impl TmsvParams {
    pub fn from_zeta(zeta: f64) -> Result<Self, QkdError> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(QkdError::InvalidParameter {
                detail: format!("squeezing parameter must lie in (0, 1), got {zeta}"),
            });
        }
        let z2 = zeta * zeta;
        Ok(Self { zeta, variance_v: (1.0 + z2) / (1.0 - z2) })
    }

    pub fn from_variance(variance_v: f64) -> Result<Self, QkdError> {
        if !(variance_v > 1.0) {
            return Err(QkdError::InvalidParameter {
                detail: format!("TMSV variance must exceed 1, got {variance_v}"),
            });
        }
        let zeta = ((variance_v - 1.0) / (variance_v + 1.0)).sqrt();
        Ok(Self { zeta, variance_v })
    }
}

/// Photon-subtraction setting: `photons = 0` selects the plain Gaussian
/// protocol (no filter, unit success probability).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubtractionSetting {
    pub photons: u32,
    /// Transmittance of the tap beamsplitter in (0, 1].
    pub t_bs: f64,
}

impl SubtractionSetting {
    pub fn new(photons: u32, t_bs: f64) -> Result<Self, QkdError> {
        if !(t_bs > 0.0 && t_bs <= 1.0) {
            return Err(QkdError::InvalidParameter {
                detail: format!("beamsplitter transmittance must lie in (0, 1], got {t_bs}"),
            });
        }
        Ok(Self { photons, t_bs })
    }
}

/// Channel parameters: transmittance and excess noise in shot-noise
/// units. The combined noise referred to the channel input is
/// `chi = (1 - T_c)/T_c + epsilon`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSetting {
    pub t_c: f64,
    pub epsilon: f64,
}

impl ChannelSetting {
    pub fn new(t_c: f64, epsilon: f64) -> Result<Self, QkdError> {
        if !(t_c > 0.0 && t_c <= 1.0) {
            return Err(QkdError::InvalidParameter {
                detail: format!("channel transmittance must lie in (0, 1], got {t_c}"),
            });
        }
        if !(epsilon >= 0.0) {
            return Err(QkdError::InvalidParameter {
                detail: format!("excess noise must be non-negative, got {epsilon}"),
            });
        }
        Ok(Self { t_c, epsilon })
    }

    pub fn chi(&self) -> f64 {
        (1.0 - self.t_c) / self.t_c + self.epsilon
    }
}

/// Two-mode Gaussian state summary `(V_A I, phi sigma_z; phi sigma_z,
/// V_B I)` in shot-noise units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceBlock {
    pub v_a: f64,
    pub v_b: f64,
    pub phi: f64,
}

impl CovarianceBlock {
    /// Exact TMSV block `(V, sqrt(V^2 - 1), V)`.
    pub fn tmsv(variance_v: f64) -> Self {
        Self {
            v_a: variance_v,
            v_b: variance_v,
            phi: (variance_v * variance_v - 1.0).sqrt(),
        }
    }

    /// Heisenberg-type physicality indicator `V_A V_B - phi^2`; at least
    /// one for physical blocks.
    pub fn physicality(&self) -> f64 {
        self.v_a * self.v_b - self.phi * self.phi
    }
}

/// Postselection filter: probability of accepting heterodyne outcome
/// `(x_a, p_a)` for `m`-photon subtraction. A Poisson mass in
/// `nu s = (1 - T) zeta^2 (x_a^2 + p_a^2) / 2`, hence always in [0, 1].
pub fn acceptance_filter(x_a: f64, p_a: f64, zeta: f64, t_bs: f64, photons: u32) -> f64 {
    let nu_s = 0.5 * (1.0 - t_bs) * zeta * zeta * (x_a * x_a + p_a * p_a);
    poisson_mass(photons, nu_s)
}

fn poisson_mass(m: u32, rate: f64) -> f64 {
    if rate == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    let mut mass = (-rate).exp();
    for k in 1..=m {
        mass *= rate / k as f64;
    }
    mass
}

/// Success probability of the `m`-photon postselection over the Gaussian
/// ensemble of heterodyne outcomes: `P(m) = u^m / (1 + u)^(m + 1)` with
/// `u = nu (V + 1)` and `nu = (1 - T) zeta^2 / 2`.
pub fn success_probability(photons: u32, zeta: f64, t_bs: f64, variance_v: f64) -> f64 {
    let u = 0.5 * (1.0 - t_bs) * zeta * zeta * (variance_v + 1.0);
    if u == 0.0 {
        return if photons == 0 { 1.0 } else { 0.0 };
    }
    u.powi(photons as i32) / (1.0 + u).powi(photons as i32 + 1)
}

/// Covariance block of the state surviving `m`-photon subtraction, before
/// the channel: with `Vbar = (m + 1) / (1 - T zeta^2)`,
/// `V_A = 2 Vbar - 1`, `phi = 2 sqrt(T) zeta Vbar`, `V_B = 2 T zeta^2 Vbar + 1`.
pub fn subtracted_covariance(
    photons: u32,
    zeta: f64,
    t_bs: f64,
) -> Result<CovarianceBlock, QkdError> {
    let t_zeta_sq = t_bs * zeta * zeta;
    if t_zeta_sq >= 1.0 {
        return Err(QkdError::InvalidRegime { t_zeta_sq });
    }
    let v_bar = (photons as f64 + 1.0) / (1.0 - t_zeta_sq);
    Ok(CovarianceBlock {
        v_a: 2.0 * v_bar - 1.0,
        v_b: 2.0 * t_zeta_sq * v_bar + 1.0,
        phi: 2.0 * t_bs.sqrt() * zeta * v_bar,
    })
}

/// Propagates a block through the thermal-loss channel: `V_A` unchanged,
/// `phi -> sqrt(T_c) phi`, `V_B -> T_c (V_B + chi)`.
pub fn apply_channel(block: &CovarianceBlock, channel: &ChannelSetting) -> CovarianceBlock {
    CovarianceBlock {
        v_a: block.v_a,
        v_b: channel.t_c * (block.v_b + channel.chi()),
        phi: channel.t_c.sqrt() * block.phi,
    }
}

/// Shannon mutual information (bits per use) for Alice heterodyne / Bob
/// homodyne: `I = log2(V_A' / V_A|B) / 2` with `V_A' = (V_A + 1)/2` and
/// `V_A|B = V_A' - phi^2 / (2 V_B)`.
pub fn mutual_information_hom(block: &CovarianceBlock) -> Result<f64, QkdError> {
    let v_a_het = 0.5 * (block.v_a + 1.0);
    let conditional = v_a_het - block.phi * block.phi / (2.0 * block.v_b);
    if !(conditional > 0.0) {
        return Err(QkdError::NonPositiveConditionalVariance { value: conditional });
    }
    Ok(0.5 * (v_a_het / conditional).log2())
}

/// Bosonic entropy kernel `G(x) = (x+1) log2(x+1) - x log2 x`, continuous
/// at zero with `G(0) = 0`.
pub fn entropy_g(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (x + 1.0) * (x + 1.0).log2() - x * x.log2()
}

/// Symplectic eigenvalues of the two-mode block:
/// `lambda_{1,2}^2 = (Delta +/- sqrt(Delta^2 - 4 D^2)) / 2` with
/// `Delta = V_A^2 + V_B^2 - 2 phi^2` and `D = V_A V_B - phi^2`.
pub fn symplectic_eigenvalues(block: &CovarianceBlock) -> Result<(f64, f64), QkdError> {
    let delta = block.v_a * block.v_a + block.v_b * block.v_b - 2.0 * block.phi * block.phi;
    let d = block.physicality();
    let radicand = delta * delta - 4.0 * d * d;
    if radicand < 0.0 {
        return Err(QkdError::UnphysicalState {
            detail: format!("discriminant {radicand} is negative"),
        });
    }
    let root = radicand.sqrt();
    let lambda1 = (0.5 * (delta + root)).sqrt();
    let lambda2 = (0.5 * (delta - root)).sqrt();
    Ok((lambda1, lambda2))
}

/// Clamps an eigenvalue into the physical domain [1, inf): values within
/// `EIGENVALUE_SLACK` below one are rounded up, anything lower is an
/// error.
fn guard_eigenvalue(lambda: f64, which: &str) -> Result<f64, QkdError> {
    if lambda >= 1.0 {
        Ok(lambda)
    } else if lambda >= 1.0 - EIGENVALUE_SLACK {
        Ok(1.0)
    } else {
        Err(QkdError::UnphysicalState {
            detail: format!("symplectic eigenvalue {which} = {lambda} below 1"),
        })
    }
}

/// Holevo bound (bits per use) on Eve's information for reverse
/// reconciliation with homodyne Bob:
/// `chi_BE = G((l1-1)/2) + G((l2-1)/2) - G((l3-1)/2)` where `l1, l2` are
/// the pre-measurement symplectic eigenvalues and
/// `l3 = sqrt(V_A (V_A - phi^2 / V_B))` is Alice's eigenvalue after Bob's
/// homodyne detection.
pub fn holevo_bound_hom(block: &CovarianceBlock) -> Result<f64, QkdError> {
    let (lambda1, lambda2) = symplectic_eigenvalues(block)?;
    let lambda1 = guard_eigenvalue(lambda1, "lambda1")?;
    let lambda2 = guard_eigenvalue(lambda2, "lambda2")?;
    let conditioned = block.v_a * (block.v_a - block.phi * block.phi / block.v_b);
    if conditioned < 0.0 {
        return Err(QkdError::UnphysicalState {
            detail: format!("post-measurement invariant {conditioned} is negative"),
        });
    }
    let lambda3 = guard_eigenvalue(conditioned.sqrt(), "lambda3")?;
    Ok(entropy_g(0.5 * (lambda1 - 1.0)) + entropy_g(0.5 * (lambda2 - 1.0))
        - entropy_g(0.5 * (lambda3 - 1.0)))
}

/// Full key-rate report for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    /// Mutual information between Alice and Bob (bits per use).
    pub i_ab: f64,
    /// Holevo bound on Eve (bits per use).
    pub chi_be: f64,
    /// Postselection success probability.
    pub p_success: f64,
    /// Asymptotic key rate `P (beta I_AB - chi_BE)`; negative values are
    /// reported as-is.
    pub key_rate: f64,
    /// Whether the key rate is strictly positive.
    pub secure: bool,
}

/// Composes the pipeline: source block (plain TMSV for `m = 0`,
/// photon-subtracted otherwise), channel propagation, mutual information,
/// Holevo bound and success probability.
pub fn secret_key_rate(
    tmsv: &TmsvParams,
    subtraction: &SubtractionSetting,
    channel: &ChannelSetting,
    beta: f64,
) -> Result<KeyRateReport, QkdError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(QkdError::InvalidParameter {
            detail: format!("reconciliation efficiency must lie in [0, 1], got {beta}"),
        });
    }
    let (source_block, p_success) = if subtraction.photons == 0 {
        (CovarianceBlock::tmsv(tmsv.variance_v), 1.0)
    } else {
        (
            subtracted_covariance(subtraction.photons, tmsv.zeta, subtraction.t_bs)?,
            success_probability(
                subtraction.photons,
                tmsv.zeta,
                subtraction.t_bs,
                tmsv.variance_v,
            ),
        )
    };
    let received = apply_channel(&source_block, channel);
    let i_ab = mutual_information_hom(&received)?;
    let chi_be = holevo_bound_hom(&received)?;
    let key_rate = p_success * (beta * i_ab - chi_be);
    Ok(KeyRateReport { i_ab, chi_be, p_success, key_rate, secure: key_rate > 0.0 })
}
