use std::path::Path;

use serde_json::{json, Value};
use twinsg_core::interferometer::{asymmetry, fit_samples, uniform_grid, Peak, PEAK_ANGLES};
use twinsg_core::selftest::{self, Fault, SelftestOptions};
use twinsg_core::twinstate::{linear_entropy, purity, rho0};
use twinsg_core::{
    ensemble_scan, scan as run_scan, separation_report, signal, Coherence, EnsembleStats, NoiseDistribution,
    NoiseSpec, PhaseSettings,
};

use crate::error::CliError;
use crate::input::read_scan;
use crate::output::{emit, Format, Table};
use crate::{Dist, InjectedFault, OutputArgs};

const CURVE_LAMBDAS: [f64; 3] = [0.0, 0.5, 1.0];

fn coherence(lambda: f64) -> Result<Coherence, CliError> {
    Coherence::new(lambda).map_err(CliError::from)
}

fn check_grid(n: usize) -> Result<Vec<f64>, CliError> {
    if n < 2 {
        return Err(CliError::Validation(format!("grid needs at least 2 points, got {n}")));
    }
    Ok(uniform_grid(n))
}

fn check_phi_l(phi_l: f64) -> Result<(), CliError> {
    PhaseSettings::new(phi_l, 0.0)?;
    Ok(())
}

/// Renders, writes, and echoes `summary` to stdout when data went to a file
/// (stderr otherwise, so stdout stays machine-readable).
fn finish(table: &Table, output: &OutputArgs, summary: &[String]) -> Result<(), CliError> {
    let out = output.out.as_deref();
    let format = Format::resolve(output.format, out);
    emit(&table.render(format), out)?;
    for line in summary {
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

pub fn scan(lambda: f64, phi_l: f64, grid: usize, output: &OutputArgs) -> Result<(), CliError> {
    let l = coherence(lambda)?;
    check_phi_l(phi_l)?;
    let grid = check_grid(grid)?;
    let s = run_scan(l, phi_l, &grid)?;
    let rows = s.samples.iter().zip(s.analytic()).map(|(&(x, y), g)| vec![x, y, g]).collect();
    let table = Table {
        command: "scan",
        params: vec![("lambda", json!(lambda)), ("phi_l", json!(phi_l)), ("grid", json!(grid.len()))],
        seed: None,
        notes: vec![("normalization", json!(s.normalization))],
        columns: vec!["phi_r", "intensity", "analytic_intensity"],
        rows,
    };
    let mut summary = vec![format!("scan: {} points at lambda={lambda}, phi_l={phi_l}", grid.len())];
    if let Some(c) = s.normalization {
        summary.push(format!("intensity / analytic_intensity = {c:.15}"));
    }
    finish(&table, output, &summary)
}

fn describe_peak(p: Option<Peak>) -> String {
    match p {
        Some(p) => format!("{:.9e} at phi_r={:.6}", p.height, p.phi),
        None => "none".into(),
    }
}

pub fn curves(phi_l: f64, grid: usize, output: &OutputArgs) -> Result<(), CliError> {
    check_phi_l(phi_l)?;
    let grid = check_grid(grid)?;
    let mut rows = Vec::with_capacity(3 * grid.len());
    let mut peaks = Vec::new();
    for lambda in CURVE_LAMBDAS {
        let l = coherence(lambda)?;
        let s = run_scan(l, phi_l, &grid)?;
        rows.extend(s.samples.iter().zip(s.analytic()).map(|(&(x, y), g)| vec![x, y, g, lambda]));
        let (first, second) = s.lobe_peaks();
        let ratio = match (first, second) {
            (Some(a), Some(b)) => format!("{:.9}", a.height / b.height),
            _ => "n/a".into(),
        };
        let at = |phi_r| signal(l, PhaseSettings { phi_l, phi_r }).map_err(CliError::from);
        let (i1, i2) = (at(PEAK_ANGLES.0)?, at(PEAK_ANGLES.1)?);
        peaks.push(format!(
            "lambda={lambda}: first lobe {}, second lobe {}, lobe ratio {ratio}; I(pi/2)/I(3pi/2) = {:.9}, asymmetry {:.9}",
            describe_peak(first),
            describe_peak(second),
            i1 / i2,
            asymmetry(i1, i2)
        ));
    }
    let table = Table {
        command: "curves",
        params: vec![("phi_l", json!(phi_l)), ("grid", json!(grid.len())), ("lambdas", json!("0,0.5,1"))],
        seed: None,
        notes: vec![("peaks", json!(peaks))],
        columns: vec!["phi_r", "intensity", "analytic_intensity", "lambda"],
        rows,
    };
    finish(&table, output, &peaks)
}

fn verdict(a: &EnsembleStats, b: &EnsembleStats) -> Result<(Value, String), CliError> {
    let r = separation_report(a, b)?;
    let (lo, hi) = (a.lambda.value(), b.lambda.value());
    let text = format!(
        "lambda {lo} vs {hi}: gap {:.6} -> {}",
        r.gap,
        if r.distinguishable { "distinguishable" } else { "not distinguishable" }
    );
    let value = json!({ "lambda_a": lo, "lambda_b": hi, "gap": r.gap, "distinguishable": r.distinguishable });
    Ok((value, text))
}

pub fn noise(
    phi_l: f64,
    grid: usize,
    rel_amp: f64,
    dist: Dist,
    samples: usize,
    seed: u64,
    output: &OutputArgs,
) -> Result<(), CliError> {
    check_phi_l(phi_l)?;
    let grid = check_grid(grid)?;
    let distribution = match dist {
        Dist::Uniform => NoiseDistribution::Uniform,
        Dist::Gaussian => NoiseDistribution::Gaussian,
    };
    let noise = NoiseSpec::new(rel_amp, distribution, samples, seed)?;

    let mut rows = Vec::new();
    let mut ensembles = Vec::new();
    let mut medians = Vec::new();
    for lambda in CURVE_LAMBDAS {
        let l = coherence(lambda)?;
        let clean = run_scan(l, phi_l, &grid)?;
        let stats = ensemble_scan(l, phi_l, &grid, &noise)?;
        for ((&(x, y), g), b) in clean.samples.iter().zip(clean.analytic()).zip(&stats.bands) {
            rows.push(vec![x, y, g, lambda, b.p05, b.p25, b.p50, b.p75, b.p95, b.mean, b.std]);
        }
        medians.push(json!({
            "lambda": lambda,
            "p05": stats.asymmetry_percentile(5.0),
            "median": stats.asymmetry_median(),
            "p95": stats.asymmetry_percentile(95.0),
        }));
        ensembles.push(stats);
    }

    let mut verdicts = Vec::new();
    let mut summary = Vec::new();
    for (i, j) in [(0, 2), (0, 1), (1, 2)] {
        let (v, text) = verdict(&ensembles[i], &ensembles[j])?;
        verdicts.push(v);
        summary.push(text);
    }
    let table = Table {
        command: "noise",
        params: vec![
            ("phi_l", json!(phi_l)),
            ("grid", json!(grid.len())),
            ("rel_amp", json!(rel_amp)),
            ("dist", json!(format!("{dist:?}").to_lowercase())),
            ("samples", json!(samples)),
        ],
        seed: Some(seed),
        notes: vec![("asymmetry", json!(medians)), ("verdicts", json!(verdicts))],
        columns: vec![
            "phi_r",
            "intensity",
            "analytic_intensity",
            "lambda",
            "p05",
            "p25",
            "p50",
            "p75",
            "p95",
            "mean",
            "std",
        ],
        rows,
    };
    finish(&table, output, &summary)
}

pub fn estimate(input: &Path, phi_l: Option<f64>, format: Option<Format>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(input).map_err(|e| CliError::Io(format!("{}: {e}", input.display())))?;
    let file = read_scan(&text)?;
    let phi_l = phi_l
        .or(file.phi_l)
        .ok_or_else(|| CliError::Parse("no phi_l recorded in the file; pass --phi-l".into()))?;
    if file.samples.is_empty() {
        return Err(CliError::Parse("file has no data rows".into()));
    }
    // the file parsed, so anything the fit rejects is a fit failure
    let fit = fit_samples(phi_l, &file.samples).map_err(|e| match e {
        twinsg_core::Error::InvalidArgument(m) | twinsg_core::Error::FitFailure(m) => CliError::Fit(m),
        other => CliError::from(other),
    })?;
    let rho = rho0(fit.lambda);
    let (gamma, entropy) = (purity(&rho), linear_entropy(&rho));
    match format {
        Some(Format::Json) => {
            let report = json!({
                "lambda": fit.lambda.value(),
                "scale": fit.scale,
                "residual": fit.residual,
                "purity": gamma,
                "linear_entropy": entropy,
                "points": file.samples.len(),
                "phi_l": phi_l,
            });
            println!("{}", serde_json::to_string_pretty(&report).expect("finite values"));
        }
        _ => {
            println!("lambda         = {:.16e}", fit.lambda.value());
            println!("scale          = {:.16e}", fit.scale);
            println!("residual       = {:.16e}", fit.residual);
            println!("purity         = {gamma:.16e}");
            println!("linear_entropy = {entropy:.16e}");
        }
    }
    Ok(())
}

pub fn selftest(seed: u64, fault: Option<InjectedFault>) -> Result<(), CliError> {
    let fault = match fault {
        None => Fault::None,
        Some(InjectedFault::TransposedD) => Fault::TransposedWigner,
    };
    let report = selftest::run(SelftestOptions { seed, fault });
    println!("{report}");
    if report.all_passed() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(CliError::Selftest(names.join("; ")))
    }
}
