//! The verification suite: eleven identity and oracle checks run at fixed
//! reference parameters.
//!
//! Every criterion is a list of [`Check`]s, each a non-negative error metric
//! against a threshold. A criterion passes when all of its checks do; its
//! headline metric is the check closest to (or furthest past) its threshold.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::coherent::{hn, ln_hn_abs2, normalization, normalization_closed_form, radius_of_convergence, CoherentState, Truncation};
use crate::error::{Error, Result};
use crate::family::FamilyConfig;
use crate::functional::{z_product_closed, z_product_direct, ZSpec, ZVariant};
use crate::measure::{verify_case, MeasureCase, MomentReport};
use crate::position::{
    energy_on_grid, evolve_grid, excited_state, fidelity, gram_deviation, gram_matrix, hamiltonian_residual, uncertainty, wavepacket, Grid, GridFn,
};
use crate::specfun::ln_factorial;
use crate::ETA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub metric: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    fn new(label: impl Into<String>, metric: f64, threshold: f64) -> Self {
        // NaN never passes
        let pass = metric <= threshold;
        Check { label: label.into(), metric, threshold, pass }
    }

    fn failed(label: impl Into<String>, err: &Error) -> Self {
        Check { label: format!("{}: {err}", label.into()), metric: f64::INFINITY, threshold: 0.0, pass: false }
    }

    fn severity(&self) -> f64 {
        if self.metric.is_nan() {
            f64::INFINITY
        } else if self.threshold > 0.0 {
            self.metric / self.threshold
        } else if self.metric == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub criterion: u32,
    pub name: &'static str,
    pub status: Status,
    /// Metric of the worst check.
    pub metric: f64,
    pub threshold: f64,
    /// Labels of the failing checks.
    pub details: Vec<String>,
    pub checks: Vec<Check>,
}

impl CriterionResult {
    fn from_checks(criterion: u32, name: &'static str, checks: Vec<Check>) -> Self {
        let worst = checks.iter().max_by(|a, b| a.severity().total_cmp(&b.severity()));
        let (metric, threshold) = worst.map_or((f64::NAN, 0.0), |c| (c.metric, c.threshold));
        let details: Vec<String> = checks.iter().filter(|c| !c.pass).map(|c| c.label.clone()).collect();
        let status = if checks.is_empty() || !details.is_empty() { Status::Fail } else { Status::Pass };
        CriterionResult { criterion, name, status, metric, threshold, details, checks }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

/// A deliberately wrong constant in one measure, to exercise the failure path.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFault {
    pub case: String,
    pub factor: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportOptions {
    /// Criterion names or numbers to run; all when empty.
    pub only: Vec<String>,
    pub measure_fault: Option<MeasureFault>,
    /// Run criteria on separate threads.
    pub parallel: bool,
}

pub const CRITERIA: [(u32, &str); 11] = [
    (1, "oscillator"),
    (2, "products"),
    (3, "normalization"),
    (4, "measures"),
    (5, "degeneration"),
    (6, "evolution"),
    (7, "action"),
    (8, "annihilation"),
    (9, "ladder"),
    (10, "uncertainty"),
    (11, "radius"),
];

fn selected(opts: &ReportOptions) -> Result<Vec<(u32, &'static str)>> {
    if opts.only.is_empty() {
        return Ok(CRITERIA.to_vec());
    }
    let mut out = Vec::new();
    for want in &opts.only {
        let hit = CRITERIA.iter().find(|(k, name)| want.eq_ignore_ascii_case(name) || want.parse::<u32>() == Ok(*k));
        match hit {
            Some(c) if !out.contains(c) => out.push(*c),
            Some(_) => {}
            None => {
                let names: Vec<&str> = CRITERIA.iter().map(|c| c.1).collect();
                return Err(Error::Config(format!("unknown criterion '{want}'; expected a number 1-11 or one of {}", names.join(", "))));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Runs the selected criteria in numerical order.
pub fn run(opts: &ReportOptions) -> Result<Report> {
    if let Some(f) = &opts.measure_fault {
        if !MeasureCase::reference_catalog().iter().any(|m| m.name().eq_ignore_ascii_case(&f.case)) {
            return Err(Error::Config(format!("fault injection names unknown measure '{}'", f.case)));
        }
        if !(f.factor.is_finite() && f.factor > 0.0) {
            return Err(Error::Config(format!("fault factor must be positive, got {}", f.factor)));
        }
    }
    let todo = selected(opts)?;
    let eval = |k: u32| run_one(k, opts);
    let criteria: Vec<CriterionResult> = if opts.parallel {
        std::thread::scope(|s| {
            let handles: Vec<_> = todo.iter().map(|&(k, _)| s.spawn(move || eval(k))).collect();
            handles.into_iter().map(|h| h.join().expect("criterion thread panicked")).collect()
        })
    } else {
        todo.iter().map(|&(k, _)| eval(k)).collect()
    };
    let pass = criteria.iter().all(CriterionResult::passed);
    Ok(Report { pass, criteria })
}

/// Runs a single criterion.
pub fn run_one(k: u32, opts: &ReportOptions) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == k).map_or("unknown", |c| c.1);
    let checks = match k {
        1 => oscillator(),
        2 => products(),
        3 => closed_normalizations(),
        4 => measures(opts.measure_fault.as_ref()),
        5 => degeneration(),
        6 => evolution(),
        7 => action(),
        8 => annihilation(),
        9 => ladder(),
        10 => minimum_uncertainty(),
        11 => radius(),
        _ => vec![Check::failed(format!("criterion {k}"), &Error::Config("no such criterion".into()))],
    };
    CriterionResult::from_checks(k, name, checks)
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs()
    }
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).norm() / b.norm()
    }
}

fn attempt(label: &str, f: impl FnOnce() -> Result<Vec<Check>>) -> Vec<Check> {
    f().unwrap_or_else(|e| vec![Check::failed(label, &e)])
}

fn oscillator_config() -> (FamilyConfig, ZSpec) {
    // γ_const = √2β = 1, 𝒵 = √γ
    (FamilyConfig::type_d(ETA, 0.0).expect("valid oscillator"), ZSpec::constant(1.0))
}

fn poschl_teller() -> FamilyConfig {
    FamilyConfig::type_a(0.5 * ETA, 1.0, 0.5 * ETA, 0.0, 0.0).expect("valid Pöschl-Teller")
}

fn scaling() -> FamilyConfig {
    FamilyConfig::self_similar(1.0, 0.5, 1.0).expect("valid scaling family")
}

fn disk() -> (FamilyConfig, ZSpec) {
    (FamilyConfig::type_c(-3.0 * ETA, 1.0, 0.0).expect("valid disk"), ZSpec::new(ZVariant::TypeCG, 0.0))
}

fn oscillator_labels() -> [Complex64; 3] {
    [Complex64::new(0.3, 0.0), Complex64::new(0.7, 0.0), Complex64::new(0.5, 0.5)]
}

fn oscillator() -> Vec<Check> {
    const TOL: f64 = 1e-10;
    attempt("oscillator", || {
        let (cfg, zs) = oscillator_config();
        let mut checks = Vec::new();
        let h_err = (0..=30)
            .map(|n| hn(&cfg, &zs, n).map(|h| crel(h, Complex64::new((0.5 * ln_factorial(n)).exp(), 0.0))))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(Check::new("h_n vs sqrt(n!), n <= 30", h_err, TOL));
        let states = oscillator_labels()
            .iter()
            .map(|&z| CoherentState::build(&cfg, &zs, z, Truncation::Auto))
            .collect::<Result<Vec<_>>>()?;
        for s in &states {
            let x = s.z.norm_sqr();
            checks.push(Check::new(format!("normalization at z = {}", s.z), rel(normalization(&cfg, &zs, x)?, (-0.5 * x).exp()), TOL));
            let coeff_err = s
                .c
                .iter()
                .enumerate()
                .filter(|(n, _)| *n <= 30)
                .map(|(n, &c)| {
                    let want = (-0.5 * x).exp() * s.z.powu(n as u32) / (0.5 * ln_factorial(n)).exp();
                    if want.norm() < 1e-280 {
                        0.0
                    } else {
                        crel(c, want)
                    }
                })
                .fold(0.0, f64::max);
            checks.push(Check::new(format!("coefficients at z = {}", s.z), coeff_err, TOL));
        }
        for a in &states {
            for b in &states {
                // ⟨z′|z⟩ = exp(−½(|z′|² + |z|² − 2z z̄′))
                let want = (-0.5 * (a.z.norm_sqr() + b.z.norm_sqr() - 2.0 * b.z * a.z.conj())).exp();
                checks.push(Check::new(format!("overlap <{}|{}>", a.z, b.z), crel(a.overlap(b)?, want), TOL));
            }
        }
        Ok(checks)
    })
}

/// The seven 𝒵 variants at their reference parameters.
pub fn reference_functionals() -> Vec<(FamilyConfig, ZSpec)> {
    let pt = poschl_teller();
    let (dcfg, dzs) = disk();
    vec![
        oscillator_config(),
        (dcfg, dzs),
        (pt, ZSpec::new(ZVariant::TypeAPT1, 0.0)),
        (pt, ZSpec::new(ZVariant::TypeABG, 0.0)),
        (pt, ZSpec::new(ZVariant::TypeAWhittaker { sigma: 0.5 }, 0.0)),
        (scaling(), ZSpec::new(ZVariant::SsR, 0.0)),
        (scaling(), ZSpec::new(ZVariant::SsRamanujan { c: 0.3 }, 0.0)),
    ]
}

fn products() -> Vec<Check> {
    reference_functionals()
        .into_iter()
        .flat_map(|(cfg, zs)| {
            let label = format!("{} on {}, n <= 30", zs.variant.name(), cfg.kind);
            attempt(&label.clone(), || {
                let mut worst: f64 = 0.0;
                for n in 0..=30 {
                    let d = z_product_direct(&zs, &cfg, n)?;
                    let c = z_product_closed(&zs, &cfg, n)?;
                    worst = worst.max((d.ln_mod - c.ln_mod).exp_m1().abs());
                }
                Ok(vec![Check::new(label, worst, 1e-10)])
            })
        })
        .collect()
}

fn closed_normalizations() -> Vec<Check> {
    let pt = poschl_teller();
    let sech_cfg = FamilyConfig::type_a(0.5 * ETA, 0.8, 0.0, 0.0, 0.0).expect("valid sech family");
    let wide = [0.1, 0.7, 1.5, 3.0, 6.0];
    let inner = [0.05, 0.2, 0.4, 0.6, 0.8];
    let cases: Vec<(FamilyConfig, ZSpec, [f64; 5])> = vec![
        (disk().0, disk().1, inner),
        (pt, ZSpec::new(ZVariant::TypeAPT1, 0.0), inner),
        (pt, ZSpec::new(ZVariant::TypeABG, 0.0), wide),
        (pt, ZSpec::new(ZVariant::TypeAWhittaker { sigma: 0.5 }, 0.0), wide),
        (sech_cfg, ZSpec::constant(sech_cfg.kappa()), wide),
        (scaling(), ZSpec::new(ZVariant::SsR, 0.0), wide),
        (scaling(), ZSpec::new(ZVariant::SsRamanujan { c: 0.0 }, 0.0), wide),
        (scaling(), ZSpec::new(ZVariant::SsRamanujan { c: 1e-3 }, 0.0), [0.1, 0.5, 1.0, 1.5, 2.0]),
    ];
    cases
        .into_iter()
        .flat_map(|(cfg, zs, xs)| {
            let label = format!("{} on {}", zs.variant.name(), cfg.kind);
            attempt(&label.clone(), || {
                let mut worst: f64 = 0.0;
                for x in xs {
                    let closed = normalization_closed_form(&cfg, &zs, x)
                        .ok_or_else(|| Error::Unsupported(format!("no closed form for {label}")))??;
                    worst = worst.max(rel(normalization(&cfg, &zs, x)?, closed));
                }
                Ok(vec![Check::new(label, worst, 1e-9)])
            })
        })
        .collect()
}

fn moment_tolerance(mc: &MeasureCase) -> f64 {
    match mc {
        MeasureCase::RamanujanQ { .. } | MeasureCase::RamanujanGeneralQ { .. } => 1e-5,
        _ => 1e-6,
    }
}

fn apply_fault(report: &mut MomentReport, fault: Option<&MeasureFault>) {
    let Some(f) = fault.filter(|f| f.case.eq_ignore_ascii_case(report.case.name())) else {
        return;
    };
    let tol = moment_tolerance(&report.case);
    for row in &mut report.rows {
        row.moment *= f.factor;
        row.rel_err = rel(row.moment, row.target);
        row.pass = row.rel_err <= tol;
    }
    report.pass = report.rows.iter().all(|r| r.pass);
}

fn measures(fault: Option<&MeasureFault>) -> Vec<Check> {
    MeasureCase::reference_catalog()
        .into_iter()
        .flat_map(|mc| {
            let tol = moment_tolerance(&mc);
            attempt(mc.name(), || {
                let mut report = verify_case(&mc, 8, tol)?;
                apply_fault(&mut report, fault);
                Ok(report
                    .rows
                    .iter()
                    .map(|r| {
                        let metric = if r.rel_err.is_nan() { f64::INFINITY } else { r.rel_err };
                        Check::new(format!("{} moment n = {}", mc.name(), r.n), metric, tol)
                    })
                    .collect())
            })
        })
        .collect()
}

fn degeneration() -> Vec<Check> {
    attempt("ramanujanGeneralQ c = 1e-6", || {
        let general = MeasureCase::RamanujanGeneralQ { r1: 1.0, q: 0.5, c: 1e-6 };
        let report = verify_case(&general, 6, 1e-5)?;
        let targets = ln_hn_abs2(&scaling(), &ZSpec::new(ZVariant::SsR, 0.0), 6)?;
        Ok(report
            .rows
            .iter()
            .map(|r| {
                let metric = if r.moment.is_nan() { f64::INFINITY } else { rel(r.moment, targets[r.n].exp()) };
                Check::new(format!("c = 1e-6 moment n = {} vs c = 0 target", r.n), metric, 1e-5)
            })
            .collect())
    })
}

fn packet_grid() -> Grid {
    Grid::new(-8.0, 8.0, 1024).expect("valid grid")
}

fn evolution() -> Vec<Check> {
    let mut checks = attempt("evolve additivity", || {
        let mut checks = Vec::new();
        let states = [
            (oscillator_config(), Complex64::new(0.7, 0.2)),
            (disk(), Complex64::new(0.5, 0.0)),
            ((poschl_teller(), ZSpec::new(ZVariant::TypeABG, 0.4)), Complex64::new(0.8, -0.3)),
            ((scaling(), ZSpec::new(ZVariant::SsR, 0.0)), Complex64::new(1.2, 0.0)),
        ];
        for ((cfg, zs), z) in states {
            let s = CoherentState::build(&cfg, &zs, z, Truncation::Auto)?;
            let mut worst: f64 = 0.0;
            for (t1, t2) in [(0.3, 0.45), (1.7, -0.6), (2.5, 3.1)] {
                let two = s.evolve(t1, 1.0).evolve(t2, 1.0);
                let one = s.evolve(t1 + t2, 1.0);
                worst = worst.max(two.c.iter().zip(&one.c).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
            }
            checks.push(Check::new(format!("additivity {} on {}", zs.variant.name(), cfg.kind), worst, 1e-13));
        }
        Ok(checks)
    });
    checks.extend(attempt("grid evolution", || {
        let (cfg, zs) = oscillator_config();
        let g = packet_grid();
        let mut checks = Vec::new();
        for z in [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.5)] {
            let s = CoherentState::build(&cfg, &zs, z, Truncation::Auto)?;
            let moved = evolve_grid(&cfg, &wavepacket(&s, &g)?, 0.5, 1e-3)?;
            let phased = wavepacket(&s.evolve(0.5, 1.0), &g)?;
            checks.push(Check::new(format!("grid infidelity at z = {z}, t = 0.5"), 1.0 - fidelity(&moved, &phased)?, 1e-4));
        }
        Ok(checks)
    }));
    checks
}

fn action() -> Vec<Check> {
    attempt("action", || {
        let mut checks = Vec::new();
        let cases = [
            (oscillator_config(), 0.7),
            ((FamilyConfig::type_d(1.3, 0.4)?, ZSpec::constant(0.6)), 0.7),
            ((FamilyConfig::type_c(-2.0, 0.6, 0.0)?, ZSpec::constant(0.9)), 0.7),
        ];
        for ((cfg, zs), z) in cases {
            let c = match zs.variant {
                ZVariant::Const { c } => c,
                _ => unreachable!(),
            };
            let s = CoherentState::build(&cfg, &zs, Complex64::new(z, 0.0), Truncation::Auto)?;
            let (series, scalar) = s.energy_expectation();
            let want = (z * c).powi(2);
            checks.push(Check::new(format!("sum |c_n|^2 e_n = |zc|^2 on {} (c = {c})", cfg.kind), rel(series, want), 1e-12));
            if let Some(scalar) = scalar {
                checks.push(Check::new(format!("scalar energy form on {}", cfg.kind), rel(scalar, want), 1e-12));
            }
            let drift = [0.4, 2.0, 11.0].iter().map(|&t| rel(s.evolve(t, 1.0).energy_expectation().0, series)).fold(0.0, f64::max);
            checks.push(Check::new(format!("<H> invariant under evolution on {}", cfg.kind), drift, 1e-12));
            let omega = 2.0;
            checks.push(Check::new(format!("<H> = omega J on {}", cfg.kind), rel(omega * s.action_variable(omega)?, series), 1e-12));
        }
        Ok(checks)
    })
}

fn annihilation() -> Vec<Check> {
    attempt("annihilation", || {
        let mut checks = Vec::new();
        let cases = [oscillator_config(), (FamilyConfig::type_d(1.3, 0.4)?, ZSpec::constant(0.6)), (FamilyConfig::type_c(-2.0, 0.6, 0.0)?, ZSpec::constant(0.9))];
        for (cfg, zs) in cases {
            for z in [0.3, 0.8] {
                let s = CoherentState::build(&cfg, &zs, Complex64::new(z, 0.0), Truncation::Auto)?;
                checks.push(Check::new(format!("ladder residual on {} at z = {z}", cfg.kind), s.annihilation_check()?, 1e-12));
            }
        }
        Ok(checks)
    })
}

/// Normalised Hermite function by the three-term recurrence.
fn hermite_fn(n: usize, x: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * x * x).exp();
    for k in 0..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn ladder() -> Vec<Check> {
    let mut checks = attempt("oscillator ladder", || {
        let (cfg, _) = oscillator_config();
        let g = packet_grid();
        let mut checks = Vec::new();
        let states = (0..=4).map(|n| excited_state(&cfg, &g, n)).collect::<Result<Vec<_>>>()?;
        for (n, f) in states.iter().enumerate() {
            let oracle = GridFn::new(g, g.points().iter().map(|&x| Complex64::new(hermite_fn(n, x), 0.0)).collect())?;
            let overlap = f.inner(&oracle)?.norm() / (f.norm() * oracle.norm());
            checks.push(Check::new(format!("1 - |<psi_{n}|hermite_{n}>|"), 1.0 - overlap, 1e-6));
            checks.push(Check::new(format!("oscillator residual n = {n}"), hamiltonian_residual(&cfg, f, n as f64)?, 1e-5));
        }
        checks.push(Check::new("oscillator Gram off-diagonal, n <= 4", gram_deviation(&gram_matrix(&states)?), 1e-5));
        Ok(checks)
    });
    checks.extend(attempt("trigonometric ladder", || {
        let cfg = FamilyConfig::type_a(ETA, 1.0, 0.0, 0.0, 0.0)?;
        let g = Grid::default_for(&cfg)?;
        let k2 = cfg.kappa().powi(2);
        let mut checks = Vec::new();
        let states = (0..=1).map(|n| excited_state(&cfg, &g, n)).collect::<Result<Vec<_>>>()?;
        for (n, f) in states.iter().enumerate() {
            let e = k2 * (n * (n + 2)) as f64;
            checks.push(Check::new(format!("typeA rho = 1 level {n}: |<H> - e_n|"), (energy_on_grid(&cfg, f)? - e).abs(), 1e-4));
            checks.push(Check::new(format!("typeA rho = 1 residual n = {n}"), hamiltonian_residual(&cfg, f, e)?, 1e-5));
        }
        checks.push(Check::new("typeA Gram off-diagonal, n <= 1", gram_deviation(&gram_matrix(&states)?), 1e-5));
        Ok(checks)
    }));
    checks
}

fn minimum_uncertainty() -> Vec<Check> {
    attempt("uncertainty", || {
        let (cfg, zs) = oscillator_config();
        let g = packet_grid();
        let mut checks = Vec::new();
        let labels = [
            Complex64::new(0.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, -0.5),
            Complex64::new(-0.7, 0.3),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.6, 0.8),
        ];
        for z in labels {
            let s = CoherentState::build(&cfg, &zs, z, Truncation::Auto)?;
            let u = uncertainty(&wavepacket(&s, &g)?);
            checks.push(Check::new(format!("|dx dp - 1/2| at z = {z}"), (u.product - 0.5).abs(), 1e-3));
        }
        let s = CoherentState::build(&cfg, &zs, Complex64::new(0.7, 0.0), Truncation::Auto)?;
        let start = wavepacket(&s, &g)?;
        for t in [0.5, 1.0, 2.0] {
            let u = uncertainty(&evolve_grid(&cfg, &start, t, 1e-3)?);
            checks.push(Check::new(format!("|dx dp - 1/2| after grid evolution to t = {t}"), (u.product - 0.5).abs(), 2e-3));
        }
        Ok(checks)
    })
}

fn radius() -> Vec<Check> {
    attempt("radius", || {
        let mut checks = Vec::new();
        let (cfg, zs) = disk();
        checks.push(Check::new("typeC_G radius |r - 1|", (radius_of_convergence(&cfg, &zs, 200)? - 1.0).abs(), 0.05));
        let unbounded = [
            oscillator_config(),
            (FamilyConfig::type_d(1.3, 0.4)?, ZSpec::constant(0.6)),
            (scaling(), ZSpec::new(ZVariant::SsR, 0.0)),
        ];
        for (cfg, zs) in unbounded {
            // 1/r must vanish
            let r = radius_of_convergence(&cfg, &zs, 200)?;
            checks.push(Check::new(format!("1/radius for {} on {}", zs.variant.name(), cfg.kind), 1.0 / r, 0.0));
        }
        // |(c; q⁻¹)ₙ₊₁| ~ cⁿ q^{−n(n+1)/2} cancels the q-growth: r² = q/(cR₁(1 − q))
        let (c, q) = (0.3, 0.5);
        let r = radius_of_convergence(&scaling(), &ZSpec::new(ZVariant::SsRamanujan { c }, 0.0), 200)?;
        checks.push(Check::new("ss_Ramanujan c = 0.3 radius vs sqrt(q/(c R1 (1 - q)))", rel(r, (q / (c * (1.0 - q))).sqrt()), 0.05));
        Ok(checks)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selection() {
        let opts = ReportOptions { only: vec!["measures".into(), "1".into(), "Measures".into()], ..Default::default() };
        assert_eq!(selected(&opts).unwrap(), vec![(1, "oscillator"), (4, "measures")]);
        let bad = ReportOptions { only: vec!["nope".into()], ..Default::default() };
        assert!(matches!(selected(&bad), Err(Error::Config(_))));
        assert_eq!(selected(&ReportOptions::default()).unwrap().len(), 11);
    }

    #[test]
    fn worst_check_heads_the_criterion() {
        let r = CriterionResult::from_checks(
            1,
            "x",
            vec![Check::new("a", 1e-12, 1e-10), Check::new("b", 5e-11, 1e-10), Check::new("c", 0.0, 0.0)],
        );
        assert_eq!(r.status, Status::Pass);
        assert_eq!((r.metric, r.threshold), (5e-11, 1e-10));
        let r = CriterionResult::from_checks(2, "y", vec![Check::new("a", f64::NAN, 1.0), Check::new("b", 0.5, 1.0)]);
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.details, vec!["a".to_string()]);
        assert_eq!(CriterionResult::from_checks(3, "z", vec![]).status, Status::Fail);
    }

    #[test]
    fn hermite_oracle_is_orthonormal() {
        let g = packet_grid();
        let f = |n| GridFn::new(g, g.points().iter().map(|&x| Complex64::new(hermite_fn(n, x), 0.0)).collect()).unwrap();
        assert!((f(3).norm() - 1.0).abs() < 1e-12);
        assert!(f(2).inner(&f(4)).unwrap().norm() < 1e-12);
    }

    #[test]
    fn fault_names_the_moment() {
        let opts = ReportOptions { measure_fault: Some(MeasureFault { case: "hoFlat".into(), factor: 1.001 }), ..Default::default() };
        let r = run_one(4, &opts);
        assert_eq!(r.status, Status::Fail);
        assert!(r.details.iter().any(|d| d == "hoFlat moment n = 0"));
        let bad = ReportOptions { measure_fault: Some(MeasureFault { case: "nope".into(), factor: 2.0 }), ..Default::default() };
        assert!(run(&bad).is_err());
    }
}
