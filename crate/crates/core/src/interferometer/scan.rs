use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{analytic_parts, PhaseSettings, PreparedState};
use crate::error::{Error, Result};
use crate::twinstate::Coherence;

/// A coincidence-rate curve over `φ_R` at fixed `φ_L` and λ.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub phi_l: f64,
    pub lambda: Coherence,
    /// `(φ_R, intensity)`, strictly increasing in `φ_R`.
    pub samples: Vec<(f64, f64)>,
    /// Least-squares constant `C` relating the intensities to the closed form
    /// with `C = 1`; `None` when the closed form vanishes on the whole grid.
    pub normalization: Option<f64>,
}

/// A local maximum located on a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub phi: f64,
    pub height: f64,
}

/// `n` equispaced points covering `[0, 2π]` with both endpoints.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| TAU * k as f64 / (n - 1) as f64).collect(),
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("phi_R grid is empty"));
    }
    if let Some(bad) = grid.iter().find(|p| !(0.0..=TAU).contains(*p)) {
        return Err(Error::invalid(format!("phi_R grid point {bad} outside [0, 2pi]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("phi_R grid must be strictly increasing"));
    }
    Ok(())
}

/// Closed-form intensities with `C = 1` for the given curve parameters.
pub(crate) fn analytic_curve(lambda: Coherence, phi_l: f64, grid: &[f64]) -> Vec<f64> {
    grid.iter()
        .map(|&phi_r| {
            let (a, b) = analytic_parts(PhaseSettings { phi_l, phi_r });
            a + lambda.value() * b
        })
        .collect()
}

/// Scans `φ_R` over `grid` at fixed `φ_L` through the full pipeline.
pub fn scan(lambda: Coherence, phi_l: f64, grid: &[f64]) -> Result<ScanResult> {
    validate_grid(grid)?;
    PhaseSettings::new(phi_l, 0.0)?;
    let state = PreparedState::new(lambda)?;
    let samples: Vec<(f64, f64)> = grid
        .par_iter()
        .map(|&phi_r| (phi_r, state.signal(PhaseSettings { phi_l, phi_r })))
        .collect();

    let model = analytic_curve(lambda, phi_l, grid);
    let gg: f64 = model.iter().map(|g| g * g).sum();
    let yg: f64 = samples.iter().zip(&model).map(|((_, y), g)| y * g).sum();
    let normalization = (gg > 1e-300).then(|| yg / gg);

    Ok(ScanResult { phi_l, lambda, samples, normalization })
}

/// Vertex of the parabola through three points, or `None` if they are collinear.
fn parabola_vertex(p: [(f64, f64); 3]) -> Option<(f64, f64)> {
    let [(x0, y0), (x1, y1), (x2, y2)] = p;
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let a = (d12 - d01) / (x2 - x0);
    if a.abs() < f64::EPSILON * (y0.abs() + y1.abs() + y2.abs()).max(f64::MIN_POSITIVE) {
        return None;
    }
    let b = d01 - a * (x0 + x1);
    let c = y0 - a * x0 * x0 - b * x0;
    let xv = -b / (2.0 * a);
    Some((xv, c - b * b / (4.0 * a)))
}

impl ScanResult {
    pub fn phi_r(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn intensities(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.1)
    }

    /// Closed-form values with `C = 1` on this scan's grid.
    pub fn analytic(&self) -> Vec<f64> {
        let grid: Vec<f64> = self.phi_r().collect();
        analytic_curve(self.lambda, self.phi_l, &grid)
    }

    /// Grid argmax among samples whose index is in `range`, refined by a
    /// three-point parabola when both neighbours exist.
    pub fn peak_in(&self, range: std::ops::Range<usize>) -> Option<Peak> {
        let index = range
            .filter(|&i| i < self.samples.len())
            .max_by(|&a, &b| self.samples[a].1.total_cmp(&self.samples[b].1))?;
        let (phi, height) = self.samples[index];
        if index == 0 || index + 1 >= self.samples.len() {
            return Some(Peak { index, phi, height });
        }
        let pts = [self.samples[index - 1], self.samples[index], self.samples[index + 1]];
        match parabola_vertex(pts) {
            Some((x, y)) if x >= pts[0].0 && x <= pts[2].0 && y >= height => {
                Some(Peak { index, phi: x, height: y })
            }
            _ => Some(Peak { index, phi, height }),
        }
    }

    /// The two tallest interior local maxima, refined and ordered by `φ_R`.
    ///
    /// Fringe lobes are separated by the curve's own minima, which need not
    /// sit at `φ_R = π`.
    pub fn lobe_peaks(&self) -> (Option<Peak>, Option<Peak>) {
        let y: Vec<f64> = self.intensities().collect();
        let mut maxima: Vec<usize> =
            (1..y.len().saturating_sub(1)).filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1]).collect();
        maxima.sort_by(|&a, &b| y[b].total_cmp(&y[a]));
        maxima.truncate(2);
        maxima.sort_unstable();
        let mut peaks = maxima.into_iter().filter_map(|i| self.peak_in(i..i + 1));
        (peaks.next(), peaks.next())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_contains_both_endpoints() {
        let g = uniform_grid(5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[4], TAU);
        assert!(uniform_grid(0).is_empty());
    }

    #[test]
    fn grid_validation() {
        let lam = Coherence::new(0.5).unwrap();
        assert!(scan(lam, 1.0, &[]).is_err());
        assert!(scan(lam, 1.0, &[0.0, 0.0]).is_err());
        assert!(scan(lam, 1.0, &[0.5, 0.2]).is_err());
        assert!(scan(lam, 1.0, &[0.0, 7.0]).is_err());
        assert!(scan(lam, f64::NAN, &[0.0, 1.0]).is_err());
        assert!(scan(lam, 1.0, &[0.0, TAU]).is_ok());
    }

    #[test]
    fn parabola_vertex_of_exact_quadratic() {
        let f = |x: f64| -2.0 * (x - 0.3).powi(2) + 1.5;
        let (x, y) = parabola_vertex([(0.0, f(0.0)), (0.25, f(0.25)), (0.6, f(0.6))]).unwrap();
        assert_relative_eq!(x, 0.3, epsilon = 1e-12);
        assert_relative_eq!(y, 1.5, epsilon = 1e-12);
        assert!(parabola_vertex([(0.0, 1.0), (1.0, 2.0), (2.0, 3.0)]).is_none());
    }

    #[test]
    fn normalization_is_absent_when_model_vanishes() {
        let s = scan(Coherence::new(0.5).unwrap(), 0.0, &uniform_grid(16)).unwrap();
        assert!(s.normalization.is_none());
        assert!(s.intensities().all(|y| y.abs() < 1e-14));
    }

    #[test]
    fn lobe_peaks_follow_the_curve_minima() {
        let lam = |x| Coherence::new(x).unwrap();
        let grid = uniform_grid(512);
        let (a, b) = scan(lam(0.0), std::f64::consts::FRAC_PI_2, &grid).unwrap().lobe_peaks();
        let (a, b) = (a.unwrap(), b.unwrap());
        // λ = 0 maxima sit where cos φ_R = -1/3
        assert_relative_eq!(a.phi, (-1.0f64 / 3.0).acos(), epsilon = 1e-4);
        assert_relative_eq!(b.phi, TAU - (-1.0f64 / 3.0).acos(), epsilon = 1e-4);
        // at λ = 1 the signal falls monotonically through π
        let (_, b) = scan(lam(1.0), std::f64::consts::FRAC_PI_2, &grid).unwrap().lobe_peaks();
        assert!(b.unwrap().phi > 1.5 * std::f64::consts::PI);
    }
}
