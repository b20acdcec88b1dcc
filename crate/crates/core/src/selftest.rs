//! Invariant suite run by `twinsg selftest`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::interferometer::{
    analytic_signal, evolve, phase_object_operator, polarizer_operator, sided_block,
    sided_exchange_operator, PhaseSettings, PreparedState,
};
use crate::linalg::{commutator, im, max_abs_diff, re, Mat3, Mat36, Mat6};
use crate::spinops::{self, clebsch_gordan_11, exp_i_theta, f_x, f_y, f_z, BASIS_M};
use crate::twinstate::{self, is_physical_density, Coherence, TwoAtomSpinState, POSITIVITY_TOL};

/// Faults that can be injected to confirm the suite notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Replace every `d¹(β)` by its transpose.
    TransposedWigner,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SelftestOptions {
    pub seed: u64,
    pub fault: Fault,
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed deviation and the tolerance it was held to.
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<40} {:>6} {:>12} {:>10}", "check", "result", "worst", "tolerance")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<40} {:>6} {:>12.3e} {:>10.0e}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.worst,
                c.tolerance
            )?;
        }
        write!(f, "{} checks in {:.2?}", self.checks.len(), self.elapsed)
    }
}

struct Suite {
    rng: ChaCha8Rng,
    fault: Fault,
    checks: Vec<Check>,
}

impl Suite {
    /// `d¹(β)`, or its transpose under the injected fault.
    fn wigner(&self, beta: f64) -> Mat3 {
        let d = spinops::wigner_d1(beta).expect("finite angle");
        match self.fault {
            Fault::None => d,
            Fault::TransposedWigner => d.transpose(),
        }
    }

    /// The axis-switching rotation `D(β)`.
    fn axis_rotation(&self, beta: f64) -> Mat3 {
        match spinops::RotationConvention::AXIS_SWITCH {
            spinops::RotationConvention::Active => self.wigner(beta),
            spinops::RotationConvention::Passive => self.wigner(-beta),
        }
    }

    fn longitudinal_phase(&self, phi: f64) -> Mat3 {
        self.axis_rotation(-FRAC_PI_2) * exp_i_theta(&f_z(), phi) * self.axis_rotation(FRAC_PI_2)
    }

    fn phase_object(&self, p: PhaseSettings) -> Mat6 {
        sided_block(&self.longitudinal_phase(p.phi_l), &self.longitudinal_phase(p.phi_r))
    }

    fn record(&mut self, name: &'static str, worst: f64, tolerance: f64) {
        self.checks.push(Check { name, passed: worst.is_finite() && worst <= tolerance, worst, tolerance });
    }

    fn angle(&mut self) -> f64 {
        self.rng.random_range(0.0..TAU)
    }

    fn lambda(&mut self) -> Coherence {
        Coherence::new(self.rng.random_range(0.0..=1.0)).expect("in range")
    }
}

fn worst<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn lambda_grid(n: usize) -> impl Iterator<Item = Coherence> {
    (0..n).map(move |k| Coherence::new(k as f64 / (n - 1) as f64).expect("in range"))
}

pub fn run(options: SelftestOptions) -> SelftestReport {
    let start = Instant::now();
    let mut s = Suite { rng: ChaCha8Rng::seed_from_u64(options.seed), fault: options.fault, checks: Vec::new() };

    let (fx, fy, fz) = (f_x(), f_y(), f_z());
    let i = im(1.0);
    let comm = worst([
        max_abs_diff(&commutator(&fx, &fy), &(fz * i)),
        max_abs_diff(&commutator(&fy, &fz), &(fx * i)),
        max_abs_diff(&commutator(&fz, &fx), &(fy * i)),
        max_abs_diff(&(fx * fx + fy * fy + fz * fz), &(Mat3::identity() * re(2.0))),
    ]);
    s.record("spin-1 commutators and Casimir", comm, 1e-12);

    let betas: Vec<f64> = (0..100).map(|_| s.rng.random_range(-TAU..TAU)).collect();
    let ortho = worst(betas.iter().map(|&b| {
        let d = s.wigner(b);
        max_abs_diff(&(d.transpose() * d), &Mat3::identity()).max((d.determinant() - re(1.0)).norm())
    }));
    s.record("d1 orthogonal, unit determinant", ortho, 1e-12);

    let pairs: Vec<(f64, f64)> =
        (0..100).map(|_| (s.rng.random_range(-TAU..TAU), s.rng.random_range(-TAU..TAU))).collect();
    let group = worst(pairs.iter().map(|&(a, b)| max_abs_diff(&(s.wigner(a) * s.wigner(b)), &s.wigner(a + b))));
    s.record("d1 group property", group, 1e-12);

    let switch = worst((0..32).map(|k| {
        let phi = TAU * k as f64 / 32.0;
        max_abs_diff(&s.longitudinal_phase(phi), &exp_i_theta(&fx, phi))
    }))
    .max(max_abs_diff(
        &(s.axis_rotation(-FRAC_PI_2) * fz * s.axis_rotation(FRAC_PI_2)),
        &fx,
    ));
    s.record("axis-switch identity D(-pi/2) Fz D(pi/2) = Fx", switch, 1e-12);

    let mut cg = 0.0_f64;
    for m1 in BASIS_M {
        for m2 in BASIS_M {
            for n1 in BASIS_M {
                for n2 in BASIS_M {
                    let mut sum = 0.0;
                    for f in 0..=2 {
                        for m in -f..=f {
                            sum += clebsch_gordan_11(m1, m2, f, m).unwrap() * clebsch_gordan_11(n1, n2, f, m).unwrap();
                        }
                    }
                    let delta = if (m1, m2) == (n1, n2) { 1.0 } else { 0.0 };
                    cg = cg.max((sum - delta).abs());
                }
            }
        }
    }
    let singlet_overlap = twinstate::singlet().inner(&TwoAtomSpinState::coupled(0, 0).unwrap()).norm();
    s.record("CG completeness, singlet = |F=0,M=0>", cg.max((singlet_overlap - 1.0).abs()), 1e-12);

    let rho_dev = worst(lambda_grid(11).map(|l| {
        let rho = twinstate::rho0(l);
        let diag = is_physical_density(&crate::linalg::to_dynamic(&rho.0), POSITIVITY_TOL);
        let purity_err = (twinstate::purity(&rho) - (5.0 + 4.0 * l.value().powi(2)) / 9.0).abs();
        if diag.is_physical() { purity_err } else { f64::INFINITY }
    }));
    s.record("initial density valid, purity formula", rho_dev, 1e-12);

    let p = polarizer_operator();
    s.record("polarizer idempotent and Hermitian", max_abs_diff(&(p * p), &p).max(max_abs_diff(&p, &p.adjoint())), 1e-12);

    let mut unitarity = 0.0_f64;
    let mut exchange = max_abs_diff(&(sided_exchange_operator() * p), &(p * sided_exchange_operator()));
    let ex = sided_exchange_operator();
    for _ in 0..20 {
        let phases = PhaseSettings { phi_l: s.angle(), phi_r: s.angle() };
        let o1 = s.phase_object(phases);
        let o: Mat36 = o1.kronecker(&o1);
        unitarity = unitarity.max(max_abs_diff(&(o * o.adjoint()), &Mat36::identity()));
        exchange = exchange.max(max_abs_diff(&(ex * o), &(o * ex)));
        let reference = phase_object_operator(phases);
        exchange = exchange.max(max_abs_diff(&(ex * reference), &(reference * ex)));
    }
    s.record("phase object unitary", unitarity, 1e-12);
    s.record("exchange symmetry of devices", exchange, 1e-12);

    let mut positivity = 0.0_f64;
    for _ in 0..10 {
        let l = s.lambda();
        let phases = PhaseSettings { phi_l: s.angle(), phi_r: s.angle() };
        let e = evolve(l, phases).expect("non-degenerate");
        let d = e.density.diagnostics(POSITIVITY_TOL);
        positivity = positivity.max(if d.is_physical() { (-d.min_eigenvalue).max(0.0) } else { f64::INFINITY });
    }
    s.record("density positive through pipeline", positivity, POSITIVITY_TOL);

    let mut lr = 0.0_f64;
    for _ in 0..50 {
        let l = s.lambda();
        let (a, b) = (s.angle(), s.angle());
        let st = PreparedState::new(l).expect("non-degenerate");
        let x = st.signal_with(&s.phase_object(PhaseSettings { phi_l: a, phi_r: b }));
        let y = st.signal_with(&s.phase_object(PhaseSettings { phi_l: b, phi_r: a }));
        lr = lr.max((x - y).abs());
    }
    s.record("left-right signal symmetry", lr, 1e-12);

    let survival = worst(lambda_grid(11).map(|l| (PreparedState::new(l).unwrap().survival() - 2.0 / 3.0).abs()));
    s.record("survival probability 2/3 for all lambda", survival, 1e-12);

    // ratio pipeline / closed form must be one constant across points and λ
    let mut ratios = Vec::new();
    let grid: Vec<f64> = (0..16).map(|k| TAU * k as f64 / 16.0).collect();
    for l in lambda_grid(5) {
        let st = PreparedState::new(l).unwrap();
        for &a in &grid {
            for &b in &grid {
                let phases = PhaseSettings { phi_l: a, phi_r: b };
                let closed = analytic_signal(l, phases, 1.0);
                if closed > 1e-6 {
                    ratios.push(st.signal_with(&s.phase_object(phases)) / closed);
                }
            }
        }
    }
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    s.record("pipeline matches closed-form signal", (hi - lo) / hi.abs(), 1e-9);

    let zero = Coherence::new(0.0).unwrap();
    let one = Coherence::new(1.0).unwrap();
    let (s0, s1) = (PreparedState::new(zero).unwrap(), PreparedState::new(one).unwrap());
    let insens = worst((0..32).map(|k| {
        let phases = PhaseSettings { phi_l: TAU * k as f64 / 32.0, phi_r: PI };
        (s0.signal_with(&s.phase_object(phases)) - s1.signal_with(&s.phase_object(phases))).abs()
    }));
    s.record("lambda-insensitivity at phi_R = pi", insens, 1e-12);

    SelftestReport { checks: s.checks, elapsed: start.elapsed() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clean_build_passes() {
        let report = run(SelftestOptions::default());
        assert!(report.all_passed(), "{report}");
    }

    #[test]
    fn transposed_wigner_is_caught_by_axis_switch_check() {
        let report = run(SelftestOptions { seed: 0, fault: Fault::TransposedWigner });
        let failed: Vec<&str> = report.failures().map(|c| c.name).collect();
        assert!(failed.iter().any(|n| n.starts_with("axis-switch identity")), "{report}");
    }
}
