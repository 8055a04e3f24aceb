use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use sis_core::algebra::SpectralTable;
use sis_core::coherent::{CoherentState, Truncation};
use sis_core::functional::{eval_z, ZValue};
use sis_core::measure::{verify_case, MeasureCase};
use sis_core::position::{evolve_grid, excited_state, wavepacket, Grid, GridFn};
use sis_core::report::{self, MeasureFault, ReportOptions};
use sis_core::{Complex64, Error, Result};

use crate::args::{Command, Resolved};
use crate::output::{emit, Output, Table};

/// What a command produced; verification commands can fail without an error.
pub enum Outcome {
    Done,
    VerificationFailed(String),
}

pub fn run(cmd: &Command, r: &Resolved) -> Result<Outcome> {
    let text = match cmd {
        Command::Spectrum => spectrum(r)?.render(r.output)?,
        Command::Coeffs => coeffs(r)?.render(r.output)?,
        Command::State => state_output(&build_state(r, r.z)?).render(r.output)?,
        Command::Overlap { z2, with } => overlap(r, *z2, with.as_deref())?.render(r.output)?,
        Command::Evolve { t, omega } => {
            if !(t.is_finite() && omega.is_finite()) {
                return Err(Error::Config("t and omega must be finite".into()));
            }
            state_output(&build_state(r, r.z)?.evolve(*t, *omega)).render(r.output)?
        }
        Command::Action { omega } => action(r, *omega)?.render(r.output)?,
        Command::VerifyMeasure { case, params, nmoments } => {
            let (out, pass) = verify_measure(case, params.as_deref(), *nmoments, r.tol)?;
            emit(&out.render(r.output)?, r.out.as_deref())?;
            return Ok(if pass { Outcome::Done } else { Outcome::VerificationFailed(format!("measure {case} failed the moment check")) });
        }
        Command::Wavefunction { n, packet, grid } => {
            let cfg = r.family()?;
            let g = grid_for(grid.as_deref(), &cfg)?;
            let f = if *packet { wavepacket(&build_state(r, r.z)?, &g)? } else { excited_state(&cfg, &g, *n)? };
            grid_output(&f).render(r.output)?
        }
        Command::EvolveGrid { t, dt, n, grid } => {
            let cfg = r.family()?;
            let g = grid_for(grid.as_deref(), &cfg)?;
            let start = match n {
                Some(n) => excited_state(&cfg, &g, *n)?,
                None => wavepacket(&build_state(r, r.z)?, &g)?,
            };
            grid_output(&evolve_grid(&cfg, &start, *t, *dt)?).render(r.output)?
        }
        Command::Report { only, inject_measure_fault, serial } => {
            let opts = ReportOptions { only: only.clone(), measure_fault: parse_fault(inject_measure_fault.as_deref())?, parallel: !serial };
            let started = Instant::now();
            let rep = report::run(&opts)?;
            let elapsed = started.elapsed().as_secs_f64();
            let mut table = Table::new(&["criterion", "name", "status", "metric", "threshold"]);
            for c in &rep.criteria {
                let status = if c.passed() { "pass" } else { "fail" };
                table.push(vec![(c.criterion as usize).into(), c.name.into(), status.into(), c.metric.into(), c.threshold.into()]);
            }
            let json = json!({
                "pass": rep.pass,
                "criteria": rep.criteria,
                "meta": { "wall_clock_seconds": elapsed, "parallel": opts.parallel },
            });
            emit(&Output { json, table }.render(r.output)?, r.out.as_deref())?;
            if rep.pass {
                return Ok(Outcome::Done);
            }
            let failed: Vec<String> = rep
                .criteria
                .iter()
                .filter(|c| !c.passed())
                .map(|c| format!("criterion {} ({}): {}", c.criterion, c.name, c.details.join("; ")))
                .collect();
            return Ok(Outcome::VerificationFailed(failed.join("\n")));
        }
    };
    emit(&text, r.out.as_deref())?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct SpectrumRow {
    n: usize,
    #[serde(rename = "R")]
    r: f64,
    e: f64,
    #[serde(rename = "P")]
    p: f64,
}

fn spectrum(r: &Resolved) -> Result<Output<Vec<SpectrumRow>>> {
    let nmax = r.nmax.unwrap_or(64);
    let t = SpectralTable::build(&r.family()?, nmax)?;
    let rows: Vec<SpectrumRow> = (1..=nmax).map(|n| SpectrumRow { n, r: t.r_seq[n - 1], e: t.e[n], p: t.ln_p[n].exp() }).collect();
    let mut table = Table::new(&["n", "R", "e", "P"]);
    for s in &rows {
        table.push(vec![s.n.into(), s.r.into(), s.e.into(), s.p.into()]);
    }
    Ok(Output { json: rows, table })
}

#[derive(Serialize)]
struct CoeffRow {
    n: usize,
    zprod_abs: f64,
    zprod_arg: f64,
    h: Complex64,
}

fn coeffs(r: &Resolved) -> Result<Output<Vec<CoeffRow>>> {
    let cfg = r.family()?;
    let zs = r.zspec()?;
    let nmax = r.nmax.unwrap_or(64);
    let t = SpectralTable::build(&cfg, nmax.max(1))?;
    let mut acc = ZValue::ONE;
    let mut rows = Vec::with_capacity(nmax + 1);
    for n in 0..=nmax {
        if n > 0 {
            acc = acc * eval_z(&zs, &cfg, n)?;
        }
        // hₙ = √Pₙ / Π𝒵
        let h = Complex64::from_polar((0.5 * t.ln_p[n] - acc.ln_mod).exp(), 0.0 - acc.phase);
        rows.push(CoeffRow { n, zprod_abs: acc.modulus(), zprod_arg: acc.phase, h });
    }
    let mut table = Table::new(&["n", "zprod_abs", "zprod_arg", "h_re", "h_im"]);
    for c in &rows {
        table.push(vec![c.n.into(), c.zprod_abs.into(), c.zprod_arg.into(), c.h.re.into(), c.h.im.into()]);
    }
    Ok(Output { json: rows, table })
}

fn build_state(r: &Resolved, z: Complex64) -> Result<CoherentState> {
    let truncation = r.nmax.map_or(Truncation::Auto, Truncation::Fixed);
    let s = CoherentState::build(&r.family()?, &r.zspec()?, z, truncation)?;
    log::info!("state at z = {z}: {} terms, tail {:.3e}", s.nmax + 1, s.tail);
    Ok(s)
}

fn state_output(s: &CoherentState) -> Output<CoherentState> {
    let mut table = Table::new(&["n", "re", "im", "abs2"]);
    for (n, c) in s.c.iter().enumerate() {
        table.push(vec![n.into(), c.re.into(), c.im.into(), c.norm_sqr().into()]);
    }
    Output { json: s.clone(), table }
}

fn overlap(r: &Resolved, z2: Option<Complex64>, with: Option<&Path>) -> Result<Output<serde_json::Value>> {
    let a = build_state(r, r.z)?;
    let b = match (z2, with) {
        (Some(z2), _) => build_state(r, z2)?,
        (None, Some(p)) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            let s: CoherentState = serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
            s.validate()?;
            s
        }
        (None, None) => return Err(Error::Config("overlap needs --z2 or --with".into())),
    };
    let v = a.overlap(&b)?;
    let mut table = Table::new(&["re", "im", "abs2"]);
    table.push(vec![v.re.into(), v.im.into(), v.norm_sqr().into()]);
    Ok(Output { json: json!({ "z": a.z, "other": b.z, "overlap": v, "abs2": v.norm_sqr() }), table })
}

fn action(r: &Resolved, omega: f64) -> Result<Output<serde_json::Value>> {
    let s = build_state(r, r.z)?;
    let (energy, scalar) = s.energy_expectation();
    let j = match s.action_variable(omega) {
        Ok(j) => Some(j),
        Err(Error::Unsupported(why)) => {
            log::warn!("no action variable: {why}");
            None
        }
        Err(e) => return Err(e),
    };
    let mut table = Table::new(&["omega", "energy", "energy_scalar", "action"]);
    table.push(vec![omega.into(), energy.into(), scalar.into(), j.into()]);
    Ok(Output { json: json!({ "omega": omega, "energy": energy, "energy_scalar": scalar, "action": j }), table })
}

fn measure_case(name: &str, params: Option<&str>) -> Result<MeasureCase> {
    let reference = MeasureCase::reference_catalog()
        .into_iter()
        .find(|m| m.name().eq_ignore_ascii_case(name))
        .ok_or_else(|| {
            let names: Vec<&str> = MeasureCase::reference_catalog().iter().map(|m| m.name()).collect();
            Error::Config(format!("unknown measure case '{name}'; expected one of {}", names.join(", ")))
        })?;
    match params {
        None => Ok(reference),
        Some(p) => {
            let v: serde_json::Value = serde_json::from_str(p).map_err(|e| Error::Config(format!("--params: {e}")))?;
            MeasureCase::from_name(reference.name(), &v)
        }
    }
}

fn verify_measure(case: &str, params: Option<&str>, nmoments: usize, tol: f64) -> Result<(Output<sis_core::measure::MomentReport>, bool)> {
    let mc = measure_case(case, params)?;
    let rep = verify_case(&mc, nmoments, tol)?;
    let mut table = Table::new(&["n", "moment", "target", "rel_err", "pass"]);
    for row in &rep.rows {
        table.push(vec![row.n.into(), row.moment.into(), row.target.into(), row.rel_err.into(), row.pass.into()]);
    }
    let pass = rep.pass;
    Ok((Output { json: rep, table }, pass))
}

fn grid_for(spec: Option<&str>, cfg: &sis_core::family::FamilyConfig) -> Result<Grid> {
    match spec {
        Some(s) => Grid::parse(s),
        None => Grid::default_for(cfg),
    }
}

#[derive(Serialize)]
struct GridRow {
    x: f64,
    psi: Complex64,
    abs2: f64,
}

fn grid_output(f: &GridFn) -> Output<Vec<GridRow>> {
    let rows: Vec<GridRow> = f.grid.points().into_iter().zip(&f.values).map(|(x, &psi)| GridRow { x, psi, abs2: psi.norm_sqr() }).collect();
    let mut table = Table::new(&["x", "re", "im", "abs2"]);
    for g in &rows {
        table.push(vec![g.x.into(), g.psi.re.into(), g.psi.im.into(), g.abs2.into()]);
    }
    Output { json: rows, table }
}

fn parse_fault(s: Option<&str>) -> Result<Option<MeasureFault>> {
    let Some(s) = s else { return Ok(None) };
    let (case, factor) = s.split_once(':').ok_or_else(|| Error::Config(format!("--inject-measure-fault expects case:factor, got '{s}'")))?;
    let factor = factor.parse::<f64>().map_err(|e| Error::Config(format!("--inject-measure-fault factor '{factor}': {e}")))?;
    Ok(Some(MeasureFault { case: case.to_owned(), factor }))
}
