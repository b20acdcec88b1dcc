//! Monte Carlo robustness of the coherence readout against phase noise.
//!
//! Each sample multiplies `φ_L` and `φ_R` by independent random factors and
//! keeps them fixed across the whole `φ_R` scan, modelling a miscalibrated
//! pair of magnets. Sample `k` draws from its own ChaCha stream keyed by
//! `(seed, k)`, so results do not depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interferometer::{asymmetry, PhaseSettings, PreparedState, PEAK_ANGLES};
use crate::twinstate::Coherence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseDistribution {
    /// Factor uniform on `[1 - a, 1 + a]`.
    Uniform,
    /// Factor `1 + a z`, `z` standard normal truncated to `|z| ≤ 3`.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub rel_amplitude: f64,
    pub distribution: NoiseDistribution,
    pub n_samples: usize,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(
        rel_amplitude: f64,
        distribution: NoiseDistribution,
        n_samples: usize,
        seed: u64,
    ) -> Result<Self> {
        let noise = NoiseSpec { rel_amplitude, distribution, n_samples, seed };
        noise.validate()?;
        Ok(noise)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rel_amplitude) {
            return Err(Error::invalid(format!(
                "relative amplitude must lie in [0, 1), got {}",
                self.rel_amplitude
            )));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("at least one noise sample is required"));
        }
        Ok(())
    }

    /// Multiplicative factors `(f_L, f_R)` of sample `index`.
    pub fn factors(&self, index: usize) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let a = self.rel_amplitude;
        let mut draw = || match self.distribution {
            NoiseDistribution::Uniform => 1.0 + a * rng.random_range(-1.0..=1.0),
            NoiseDistribution::Gaussian => loop {
                let z: f64 = rng.sample(StandardNormal);
                if z.abs() <= 3.0 {
                    break 1.0 + a * z;
                }
            },
        };
        let left = draw();
        let right = draw();
        (left, right)
    }

    fn perturb(&self, phases: PhaseSettings, index: usize) -> PhaseSettings {
        let (fl, fr) = self.factors(index);
        PhaseSettings { phi_l: phases.phi_l * fl, phi_r: phases.phi_r * fr }
    }
}

fn check_index(noise: &NoiseSpec, index: usize) -> Result<()> {
    if index >= noise.n_samples {
        return Err(Error::invalid(format!(
            "sample index {index} out of range for {} samples",
            noise.n_samples
        )));
    }
    Ok(())
}

/// Coincidence rate with the phases of noise sample `sample_index`.
pub fn perturbed_signal(
    lambda: Coherence,
    phases: PhaseSettings,
    noise: &NoiseSpec,
    sample_index: usize,
) -> Result<f64> {
    noise.validate()?;
    check_index(noise, sample_index)?;
    let state = PreparedState::new(lambda)?;
    Ok(state.signal(noise.perturb(phases, sample_index)))
}

/// Distribution summary of the ensemble at one grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Band {
    pub p05: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p95: f64,
    pub mean: f64,
    pub std: f64,
}

impl Band {
    fn from_samples(values: &mut [f64]) -> Band {
        values.sort_by(f64::total_cmp);
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = if values.len() > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        Band {
            p05: percentile(values, 5.0),
            p25: percentile(values, 25.0),
            p50: percentile(values, 50.0),
            p75: percentile(values, 75.0),
            p95: percentile(values, 95.0),
            mean,
            std: var.sqrt(),
        }
    }

    pub fn width(&self) -> f64 {
        self.p95 - self.p05
    }
}

/// Percentile `q` (0–100) of sorted data, interpolating linearly between order statistics.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty(), "percentile of empty data");
    let pos = (q / 100.0).clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub lambda: Coherence,
    pub phi_l: f64,
    pub grid: Vec<f64>,
    pub noise: NoiseSpec,
    /// One band per grid point.
    pub bands: Vec<Band>,
    /// Peak asymmetry of each sample, in sample order.
    pub asymmetry: Vec<f64>,
}

impl EnsembleStats {
    pub fn asymmetry_percentile(&self, q: f64) -> f64 {
        let mut sorted = self.asymmetry.clone();
        sorted.sort_by(f64::total_cmp);
        percentile(&sorted, q)
    }

    pub fn asymmetry_median(&self) -> f64 {
        self.asymmetry_percentile(50.0)
    }

    /// Trapezoidal integral of the 5–95 band width over `φ_R`.
    pub fn band_area(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.bands.windows(2))
            .map(|(x, b)| 0.5 * (x[1] - x[0]) * (b[0].width() + b[1].width()))
            .sum()
    }
}

/// Runs `noise.n_samples` perturbed `φ_R` scans and summarises them.
pub fn ensemble_scan(
    lambda: Coherence,
    phi_l: f64,
    grid: &[f64],
    noise: &NoiseSpec,
) -> Result<EnsembleStats> {
    noise.validate()?;
    PhaseSettings::new(phi_l, 0.0)?;
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("grid point {bad} is not finite")));
    }
    let state = PreparedState::new(lambda)?;

    let per_sample: Vec<(Vec<f64>, f64)> = (0..noise.n_samples)
        .into_par_iter()
        .map(|k| {
            let curve = grid
                .iter()
                .map(|&phi_r| state.signal(noise.perturb(PhaseSettings { phi_l, phi_r }, k)))
                .collect();
            let first = state.signal(noise.perturb(PhaseSettings { phi_l, phi_r: PEAK_ANGLES.0 }, k));
            let second = state.signal(noise.perturb(PhaseSettings { phi_l, phi_r: PEAK_ANGLES.1 }, k));
            (curve, asymmetry(first, second))
        })
        .collect();

    let bands = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut column: Vec<f64> = per_sample.iter().map(|(c, _)| c[i]).collect();
            Band::from_samples(&mut column)
        })
        .collect();
    let asymmetry = per_sample.iter().map(|(_, a)| *a).collect();

    Ok(EnsembleStats { lambda, phi_l, grid: grid.to_vec(), noise: *noise, bands, asymmetry })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    /// λ of the ensemble with the smaller median asymmetry.
    pub lower: Coherence,
    pub higher: Coherence,
    /// 5th percentile of the higher distribution minus 95th of the lower.
    pub gap: f64,
    pub distinguishable: bool,
}

/// Compares the asymmetry distributions of two ensembles.
pub fn separation_report(a: &EnsembleStats, b: &EnsembleStats) -> Result<SeparationReport> {
    if a.grid != b.grid || a.phi_l != b.phi_l {
        return Err(Error::invalid("ensembles were computed on different grids"));
    }
    if a.noise != b.noise {
        return Err(Error::invalid("ensembles were computed with different noise specs"));
    }
    let (lo, hi) = if a.asymmetry_median() <= b.asymmetry_median() { (a, b) } else { (b, a) };
    let gap = hi.asymmetry_percentile(5.0) - lo.asymmetry_percentile(95.0);
    Ok(SeparationReport { lower: lo.lambda, higher: hi.lambda, gap, distinguishable: gap > 0.0 })
}
