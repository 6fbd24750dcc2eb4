//! Adaptive Simpson quadrature for 1-D integrals of smooth functions.

use thiserror::Error;

/// Hard cap on interval subdivisions (2^20).
pub const MAX_SUBDIVISIONS: u32 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature failed to reach tolerance {tolerance:e} within {MAX_SUBDIVISIONS} subdivisions")]
    ToleranceNotMet { tolerance: f64 },
    #[error("quadrature interval [{a}, {b}] is not finite and ordered")]
    BadInterval { a: f64, b: f64 },
}

/// Integrates `f` over `[a, b]` by adaptive Simpson subdivision to the
/// given absolute tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tolerance: f64,
) -> Result<f64, QuadError> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(QuadError::BadInterval { a, b });
    }
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut budget = MAX_SUBDIVISIONS;
    let value = recurse(f, a, b, fa, fm, fb, whole, tolerance, &mut budget);
    if budget == 0 {
        return Err(QuadError::ToleranceNotMet { tolerance });
    }
    Ok(value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tolerance: f64,
    budget: &mut u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // Richardson error estimate for composite vs single Simpson.
    if delta.abs() <= 15.0 * tolerance || (b - a) < f64::EPSILON * (a.abs() + b.abs()) {
        return left + right + delta / 15.0;
    }
    if *budget == 0 {
        return left + right + delta / 15.0;
    }
    *budget -= 1;
    let half_tol = 0.5 * tolerance;
    recurse(f, a, m, fa, flm, fm, left, half_tol, budget)
        + recurse(f, m, b, fm, frm, fb, right, half_tol, budget)
}
