//! Coherence estimation from measured coincidence rates.

use super::{analytic_parts, PhaseSettings, ScanResult};
use crate::error::{Error, Result};
use crate::twinstate::Coherence;

/// λ read off the asymmetry of the two fringe peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    /// Clamped into `[0, 1]`.
    pub lambda: Coherence,
    /// `5A/4` before clamping.
    pub raw: f64,
    pub out_of_range: bool,
}

/// Inverts `A = 4λ/5`, the peak asymmetry at `φ_L = π/2` between
/// `φ_R = π/2` (`first`) and `φ_R = 3π/2` (`second`).
pub fn estimate_lambda_from_ratio(first: f64, second: f64) -> Result<RatioEstimate> {
    if !(first.is_finite() && second.is_finite() && first > 0.0 && second > 0.0) {
        return Err(Error::invalid(format!(
            "peak intensities must be positive, got ({first}, {second})"
        )));
    }
    let raw = 1.25 * super::asymmetry(first, second);
    let clamped = raw.clamp(0.0, 1.0);
    Ok(RatioEstimate {
        lambda: Coherence::new(clamped)?,
        raw,
        out_of_range: clamped != raw,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub lambda: Coherence,
    /// Fitted constant `C`.
    pub scale: f64,
    /// Sum of squared residuals at the optimum.
    pub residual: f64,
}

const MIN_POINTS: usize = 8;
const SIGNAL_FLOOR: f64 = 1e-14;

/// Least-squares fit of `(λ, C)` in the closed-form signal to a scan.
pub fn fit_lambda(scan: &ScanResult) -> Result<FitResult> {
    fit_samples(scan.phi_l, &scan.samples)
}

/// Fit to raw `(φ_R, intensity)` pairs taken at fixed `φ_L`.
///
/// The model is `C (a_i + λ b_i)`. For fixed λ the optimal `C` is linear
/// least squares; the remaining profile in λ is stationary at a single
/// closed-form point, which is compared against the bounds `λ = 0, 1`.
pub fn fit_samples(phi_l: f64, samples: &[(f64, f64)]) -> Result<FitResult> {
    PhaseSettings::new(phi_l, 0.0)?;
    if samples.len() < MIN_POINTS {
        return Err(Error::invalid(format!(
            "fit needs at least {MIN_POINTS} points, got {}",
            samples.len()
        )));
    }
    if let Some(bad) = samples.iter().find(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::invalid(format!("non-finite sample {bad:?}")));
    }
    if samples.iter().all(|&(_, y)| y.abs() < SIGNAL_FLOOR) {
        return Err(Error::FitFailure("all intensities vanish".into()));
    }

    let parts: Vec<(f64, f64, f64)> = samples
        .iter()
        .map(|&(phi_r, y)| {
            let (a, b) = analytic_parts(PhaseSettings { phi_l, phi_r });
            (a, b, y)
        })
        .collect();

    let (mut u, mut v, mut p, mut q, mut r) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(a, b, y) in &parts {
        u += y * a;
        v += y * b;
        p += a * a;
        q += a * b;
        r += b * b;
    }

    let mut candidates = vec![0.0, 1.0];
    let denom = v * q - u * r;
    if denom.abs() > 0.0 {
        let stationary = (u * q - v * p) / denom;
        if stationary.is_finite() && stationary > 0.0 && stationary < 1.0 {
            candidates.push(stationary);
        }
    }

    let residual_at = |lambda: f64, scale: f64| -> f64 {
        parts
            .iter()
            .map(|&(a, b, y)| {
                let e = y - scale * (a + lambda * b);
                e * e
            })
            .sum()
    };

    let best = candidates
        .into_iter()
        .filter_map(|lambda| {
            let num = u + lambda * v;
            let den = p + 2.0 * lambda * q + lambda * lambda * r;
            (den > 0.0 && num > 0.0).then(|| {
                let scale = num / den;
                (lambda, scale, residual_at(lambda, scale))
            })
        })
        .min_by(|x, y| x.2.total_cmp(&y.2));

    match best {
        Some((lambda, scale, residual)) => Ok(FitResult {
            lambda: Coherence::new(lambda)?,
            scale,
            residual,
        }),
        None => Err(Error::FitFailure(
            "no positive scale reproduces the data; is phi_L a signal zero?".into(),
        )),
    }
}
