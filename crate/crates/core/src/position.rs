//! Position-space realisation on a uniform grid.
//!
//! Ground states come from the analytic antiderivative of W, excited states
//! from the raising chain Ψₙ(·; a₁) ∝ [W(·, a₁) − η d/dx] Ψₙ₋₁(·; a₂), and time
//! evolution from a Crank–Nicolson propagator. Units are ħ = m = 1, so
//! H = −½ d²/dx² + V₋.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::algebra::SpectralTable;
use crate::coherent::CoherentState;
use crate::error::{Error, Result};
use crate::family::{FamilyConfig, FamilyKind};
use crate::ETA;

/// Relative size allowed at the boundary points of a decaying state.
pub const BOUNDARY_TOL: f64 = 1e-6;
const EDGE_SLACK: f64 = 1e-12;

/// Uniform grid with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub xmin: f64,
    pub xmax: f64,
    pub npoints: usize,
}

impl Grid {
    pub fn new(xmin: f64, xmax: f64, npoints: usize) -> Result<Self> {
        if !(xmin.is_finite() && xmax.is_finite() && xmax > xmin) {
            return Err(Error::Grid(format!("grid needs finite xmin < xmax, got [{xmin}, {xmax}]")));
        }
        if npoints < 64 {
            return Err(Error::Grid(format!("grid needs at least 64 points, got {npoints}")));
        }
        Ok(Grid { xmin, xmax, npoints })
    }

    /// Parses `xmin:xmax:npoints`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!("grid must be xmin:xmax:npoints, got {s:?}")));
        }
        let num = |p: &str| p.trim().parse::<f64>().map_err(|e| Error::Config(format!("grid bound {p:?}: {e}")));
        let n = parts[2].trim().parse::<usize>().map_err(|e| Error::Config(format!("grid size {:?}: {e}", parts[2])))?;
        Grid::new(num(parts[0])?, num(parts[1])?, n)
    }

    /// A grid covering the family's domain with 1024 points.
    pub fn default_for(cfg: &FamilyConfig) -> Result<Self> {
        match cfg.kind {
            FamilyKind::TypeD => {
                let centre = -cfg.delta / cfg.beta;
                let half = 8.0 / (SQRT_2 * cfg.beta).sqrt();
                Grid::new(centre - half, centre + half, 1024)
            }
            FamilyKind::TypeA => Grid::new(-cfg.lambda, PI / cfg.beta - cfg.lambda, 1024),
            FamilyKind::TypeC => Grid::new(0.0, (160.0 / (SQRT_2 * cfg.beta)).sqrt(), 1024),
            FamilyKind::SelfSimilar => Err(unsupported()),
        }
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / (self.npoints - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.npoints {
            self.xmax
        } else {
            self.xmin + i as f64 * self.dx()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.npoints).map(|i| self.x(i)).collect()
    }

    /// Checks that the grid lies inside the family's domain.
    pub fn check_for(&self, cfg: &FamilyConfig) -> Result<()> {
        match cfg.kind {
            FamilyKind::TypeD => Ok(()),
            FamilyKind::TypeA => {
                let (lo, hi) = (-cfg.lambda, PI / cfg.beta - cfg.lambda);
                let slack = EDGE_SLACK * (hi - lo);
                if self.xmin < lo - slack || self.xmax > hi + slack {
                    return Err(Error::Grid(format!("typeA grid must lie in [{lo}, {hi}], got [{}, {}]", self.xmin, self.xmax)));
                }
                Ok(())
            }
            FamilyKind::TypeC => {
                if self.xmin < 0.0 {
                    return Err(Error::Grid(format!("typeC grid needs xmin >= 0, got {}", self.xmin)));
                }
                Ok(())
            }
            FamilyKind::SelfSimilar => Err(unsupported()),
        }
    }

    /// Trapezoid weights.
    fn weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.npoints {
            0.5 * self.dx()
        } else {
            self.dx()
        }
    }
}

fn unsupported() -> Error {
    Error::Unsupported("self-similar families have no position-space realisation".into())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFn {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridFn {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.npoints {
            return Err(Error::Grid(format!("{} values for a grid of {} points", values.len(), grid.npoints)));
        }
        Ok(GridFn { grid, values })
    }

    /// ∫ f̄ g dx by the trapezoid rule.
    pub fn inner(&self, other: &GridFn) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Grid("functions live on different grids".into()));
        }
        Ok(self.values.iter().zip(&other.values).enumerate().map(|(i, (a, b))| a.conj() * b * self.grid.weight(i)).sum())
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().enumerate().map(|(i, v)| v.norm_sqr() * self.grid.weight(i)).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Grid(format!("cannot normalise a function of norm {n}")));
        }
        self.values.iter_mut().for_each(|v| *v /= n);
        Ok(self)
    }

    /// Largest boundary magnitude relative to the maximum.
    pub fn boundary_ratio(&self) -> f64 {
        let max = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let edge = self.values[0].norm().max(self.values[self.values.len() - 1].norm());
        edge / max
    }

    pub fn check_boundary(&self, what: &str) -> Result<()> {
        let r = self.boundary_ratio();
        if !(r <= BOUNDARY_TOL) {
            return Err(Error::Grid(format!(
                "{what} does not decay on the grid: boundary/max = {r:.3e} > {BOUNDARY_TOL:e}; widen the grid"
            )));
        }
        Ok(())
    }

    /// 5-point first derivative, one-sided at the two outermost points.
    pub fn derivative(&self) -> Vec<Complex64> {
        let h = self.grid.dx();
        stencil(&self.values, [[-25.0, 48.0, -36.0, 16.0, -3.0], [-3.0, -10.0, 18.0, -6.0, 1.0], [1.0, -8.0, 0.0, 8.0, -1.0]], -1.0, 12.0 * h)
    }

    /// 5-point second derivative, one-sided at the two outermost points.
    pub fn second_derivative(&self) -> Vec<Complex64> {
        let h = self.grid.dx();
        stencil(&self.values, [[35.0, -104.0, 114.0, -56.0, 11.0], [11.0, -20.0, 6.0, 4.0, -1.0], [-1.0, 16.0, -30.0, 16.0, -1.0]], 1.0, 12.0 * h * h)
    }

    /// Rows (x, re, im, |f|²).
    pub fn rows(&self) -> Vec<(f64, f64, f64, f64)> {
        self.values.iter().enumerate().map(|(i, v)| (self.grid.x(i), v.re, v.im, v.norm_sqr())).collect()
    }
}

/// Applies [edge, next-to-edge, centred] 5-point weights; the right edge
/// mirrors the left weights with `parity` (−1 for odd derivatives).
fn stencil(f: &[Complex64], w: [[f64; 5]; 3], parity: f64, scale: f64) -> Vec<Complex64> {
    let n = f.len();
    let dot = |c: &[f64; 5], idx: [usize; 5]| -> Complex64 { c.iter().zip(idx).map(|(c, i)| *c * f[i]).sum::<Complex64>() / scale };
    (0..n)
        .map(|i| match i {
            0 => dot(&w[0], [0, 1, 2, 3, 4]),
            1 => dot(&w[1], [0, 1, 2, 3, 4]),
            _ if i == n - 1 => parity * dot(&w[0], [n - 1, n - 2, n - 3, n - 4, n - 5]),
            _ if i == n - 2 => parity * dot(&w[1], [n - 1, n - 2, n - 3, n - 4, n - 5]),
            _ => dot(&w[2], [i - 2, i - 1, i, i + 1, i + 2]),
        })
        .collect()
}

/// ln Ψ₀ up to a constant.
fn ln_ground(cfg: &FamilyConfig, a: f64, x: f64) -> f64 {
    match cfg.kind {
        FamilyKind::TypeD => -SQRT_2 * (0.5 * cfg.beta * x * x + cfg.delta * x),
        FamilyKind::TypeC => -SQRT_2 * (a + cfg.delta) * x.ln() - SQRT_2 * cfg.beta * x * x / 4.0,
        FamilyKind::TypeA => {
            let u = cfg.beta * (x + cfg.lambda);
            let rho = (a + cfg.gamma) / ETA;
            let d = SQRT_2 * cfg.delta / cfg.beta;
            rho * u.sin().ln() + d * (0.5 * u).tan().ln()
        }
        FamilyKind::SelfSimilar => f64::NAN,
    }
}

/// Exponents (left, right) of Ψ₀ at singular domain edges, if any.
fn edge_exponents(cfg: &FamilyConfig, a: f64) -> Option<(f64, f64)> {
    match cfg.kind {
        FamilyKind::TypeA => {
            let rho = (a + cfg.gamma) / ETA;
            let d = SQRT_2 * cfg.delta / cfg.beta;
            Some((rho + d, rho - d))
        }
        FamilyKind::TypeC => {
            let e = -SQRT_2 * (a + cfg.delta);
            Some((e, f64::INFINITY))
        }
        _ => None,
    }
}

fn ground_state_at(cfg: &FamilyConfig, a: f64, grid: &Grid) -> Result<GridFn> {
    if let Some((left, right)) = edge_exponents(cfg, a) {
        if !(left > 0.0 && right > 0.0) {
            return Err(Error::Domain(format!(
                "ground state of {} at a = {a} does not vanish at the domain edges (exponents {left}, {right}); it is not normalisable",
                cfg.kind
            )));
        }
    }
    let logs: Vec<f64> = grid.points().iter().map(|&x| ln_ground(cfg, a, x)).collect();
    let max = logs.iter().copied().filter(|l| l.is_finite()).fold(f64::NEG_INFINITY, f64::max);
    let values = logs
        .iter()
        .map(|&l| Complex64::new(if l.is_finite() { (l - max).exp() } else { 0.0 }, 0.0))
        .collect();
    GridFn::new(*grid, values)?.normalized()
}

/// Ψ₀ ∝ exp(−√2∫W(x, a₁)dx), normalised on the grid.
pub fn ground_state(cfg: &FamilyConfig, grid: &Grid) -> Result<GridFn> {
    cfg.validate()?;
    grid.check_for(cfg)?;
    let f = ground_state_at(cfg, cfg.orbit_point(1), grid)?;
    f.check_boundary("ground state")?;
    Ok(f)
}

/// A real eigenfunction sampled with its exact derivative.
struct Rung {
    f: Vec<f64>,
    d: Vec<f64>,
    /// Orbit index k of the Hamiltonian H₋(a_k) it belongs to.
    k: usize,
    energy: f64,
}

fn ground_rung(cfg: &FamilyConfig, grid: &Grid, k: usize) -> Result<Rung> {
    let a = cfg.orbit_point(k);
    let f: Vec<f64> = ground_state_at(cfg, a, grid)?.values.iter().map(|v| v.re).collect();
    // Ψ₀' = −√2 W Ψ₀
    let d = grid
        .points()
        .iter()
        .zip(&f)
        .map(|(&x, &v)| cfg.superpotential(x, a).map(|w| -SQRT_2 * w * v).unwrap_or(0.0))
        .collect();
    Ok(Rung { f, d, k, energy: 0.0 })
}

/// [W(·, a_{k−1}) − η d/dx] applied to an eigenfunction of H₋(a_k). The new
/// derivative uses ψ'' = 2(V₋(a_k) − E)ψ, so no finite differences enter.
fn raise(cfg: &FamilyConfig, grid: &Grid, r: &Rung) -> Rung {
    let (lower, upper) = (cfg.orbit_point(r.k - 1), cfg.orbit_point(r.k));
    let n = grid.npoints;
    let (mut f, mut d) = (vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        let x = grid.x(i);
        if let (Ok((w, dw)), Ok((v, _))) = (cfg.superpotential_and_derivative(x, lower), cfg.partner_potentials(x, upper)) {
            let dd = 2.0 * (v - r.energy) * r.f[i];
            f[i] = w * r.f[i] - ETA * r.d[i];
            d[i] = dw * r.f[i] + w * r.d[i] - ETA * dd;
        }
    }
    let scale = f.iter().enumerate().map(|(i, v)| v * v * grid.weight(i)).sum::<f64>().sqrt();
    f.iter_mut().chain(d.iter_mut()).for_each(|v| *v /= scale);
    Rung { f, d, k: r.k - 1, energy: r.energy + cfg.remainder_at(lower) }
}

fn rung_fn(grid: &Grid, r: &Rung) -> Result<GridFn> {
    GridFn::new(*grid, r.f.iter().map(|&v| Complex64::new(v, 0.0)).collect())?.normalized()
}

/// Ψₙ on the a₁ orbit, without boundary or residual checks.
fn ladder(cfg: &FamilyConfig, grid: &Grid, n: usize) -> Result<GridFn> {
    // Ψ₀ on the orbit started at a_{n+1}, raised with W(·, aₙ) … W(·, a₁)
    let mut r = ground_rung(cfg, grid, n + 1)?;
    for _ in 0..n {
        r = raise(cfg, grid, &r);
    }
    rung_fn(grid, &r)
}

/// Ψ₀ … Ψ_nmax; the raising chain is shared for constant-parameter orbits.
fn ladder_all(cfg: &FamilyConfig, grid: &Grid, nmax: usize) -> Result<Vec<GridFn>> {
    if cfg.kind == FamilyKind::TypeD {
        let mut r = ground_rung(cfg, grid, 1)?;
        let mut out = vec![rung_fn(grid, &r)?];
        for _ in 0..nmax {
            // a constant orbit: lowering the index only relabels it
            r.k = 2;
            r = raise(cfg, grid, &r);
            out.push(rung_fn(grid, &r)?);
        }
        return Ok(out);
    }
    (0..=nmax).map(|n| ladder(cfg, grid, n)).collect()
}

/// Ψₙ built by the raising chain and renormalised on the grid.
pub fn excited_state(cfg: &FamilyConfig, grid: &Grid, n: usize) -> Result<GridFn> {
    cfg.validate()?;
    grid.check_for(cfg)?;
    let f = ladder(cfg, grid, n)?;
    f.check_boundary(&format!("Psi_{n}"))?;
    if n > 0 {
        let e = SpectralTable::build(cfg, n)?.e[n];
        let r = hamiltonian_residual(cfg, &f, e)?;
        if r > 1e-3 * e.max(1.0) {
            return Err(Error::Grid(format!("Psi_{n}: eigen-residual {r:.3e} at e = {e}; the grid is too coarse")));
        }
    }
    Ok(f)
}

fn potential(cfg: &FamilyConfig, x: f64) -> Option<f64> {
    cfg.partner_potentials(x, cfg.orbit_point(1)).ok().map(|(v, _)| v).filter(|v| v.is_finite())
}

/// Hf = −½f'' + V₋f at every point where V₋ is finite.
fn apply_hamiltonian(cfg: &FamilyConfig, f: &GridFn) -> Vec<Option<Complex64>> {
    let d2 = f.second_derivative();
    (0..f.grid.npoints).map(|i| potential(cfg, f.grid.x(i)).map(|v| -0.5 * d2[i] + v * f.values[i])).collect()
}

/// ‖(H − E)f‖/‖f‖ over interior points.
pub fn hamiltonian_residual(cfg: &FamilyConfig, f: &GridFn, e: f64) -> Result<f64> {
    cfg.validate()?;
    let hf = apply_hamiltonian(cfg, f);
    let n = f.grid.npoints;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 2..n - 2 {
        if let Some(h) = hf[i] {
            num += (h - e * f.values[i]).norm_sqr();
            den += f.values[i].norm_sqr();
        }
    }
    Ok((num / den).sqrt())
}

/// ⟨f|H|f⟩/⟨f|f⟩.
pub fn energy_on_grid(cfg: &FamilyConfig, f: &GridFn) -> Result<f64> {
    cfg.validate()?;
    let hf = apply_hamiltonian(cfg, f);
    let h = GridFn::new(f.grid, hf.into_iter().map(|v| v.unwrap_or_default()).collect())?;
    Ok(f.inner(&h)?.re / f.norm().powi(2))
}

/// Gᵢⱼ = ⟨fᵢ|fⱼ⟩.
pub fn gram_matrix(fns: &[GridFn]) -> Result<Vec<Vec<Complex64>>> {
    fns.iter().map(|a| fns.iter().map(|b| a.inner(b)).collect()).collect()
}

/// Largest |Gᵢⱼ − δᵢⱼ|.
pub fn gram_deviation(g: &[Vec<Complex64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in g.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            let id = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - id).norm());
        }
    }
    worst
}

/// Σ cₙΨₙ(x), dropping coefficients whose remaining mass is below 1e−15.
pub fn wavepacket(s: &CoherentState, grid: &Grid) -> Result<GridFn> {
    if s.tail > 1e-10 {
        return Err(Error::Config(format!("state tail {:.3e} exceeds 1e-10", s.tail)));
    }
    grid.check_for(&s.cfg)?;
    let probs = s.probabilities();
    let mut nuse = s.nmax;
    let mut rest = 0.0;
    while nuse > 0 && rest + probs[nuse] <= 1e-15 {
        rest += probs[nuse];
        nuse -= 1;
    }
    let states = ladder_all(&s.cfg, grid, nuse)?;
    let mut values = vec![Complex64::new(0.0, 0.0); grid.npoints];
    for (c, f) in s.c.iter().zip(&states) {
        for (v, p) in values.iter_mut().zip(&f.values) {
            *v += c * p;
        }
    }
    let f = GridFn::new(*grid, values)?;
    f.check_boundary("wavepacket")?;
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uncertainty {
    pub dx: f64,
    pub dp: f64,
    pub product: f64,
    pub mean_x: f64,
    pub mean_p: f64,
}

/// Δx, Δp and their product; momenta from central differences.
pub fn uncertainty(f: &GridFn) -> Uncertainty {
    let g = &f.grid;
    let norm2 = f.norm().powi(2);
    let d = f.derivative();
    let (mut x1, mut x2, mut p1, mut p2) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..g.npoints {
        let w = g.weight(i) / norm2;
        let x = g.x(i);
        let rho = f.values[i].norm_sqr();
        x1 += w * x * rho;
        x2 += w * x * x * rho;
        // ⟨p⟩ = ∫ f̄(−i f'), ⟨p²⟩ = ∫|f'|²
        p1 += w * (f.values[i].conj() * Complex64::new(0.0, -1.0) * d[i]).re;
        p2 += w * d[i].norm_sqr();
    }
    let dx = (x2 - x1 * x1).max(0.0).sqrt();
    let dp = (p2 - p1 * p1).max(0.0).sqrt();
    Uncertainty { dx, dp, product: dx * dp, mean_x: x1, mean_p: p1 }
}

/// Crank–Nicolson propagation of i∂ψ/∂t = (−½∂² + V₋)ψ with ψ = 0 at both ends.
pub fn evolve_grid(cfg: &FamilyConfig, f: &GridFn, t: f64, dt: f64) -> Result<GridFn> {
    cfg.validate()?;
    f.grid.check_for(cfg)?;
    if !(dt > 0.0 && t >= 0.0) {
        return Err(Error::Config(format!("evolve_grid needs dt > 0 and t >= 0, got t = {t}, dt = {dt}")));
    }
    let steps_f = (t / dt).round();
    if (steps_f * dt - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::Config(format!("t = {t} is not a multiple of dt = {dt}")));
    }
    let steps = steps_f as usize;
    let g = f.grid;
    let n = g.npoints;
    let h2 = g.dx() * g.dx();
    // interior unknowns 1..n−2; H = tridiag(−1/(2h²), 1/h² + V, −1/(2h²))
    let m = n - 2;
    let v: Vec<f64> = (1..n - 1)
        .map(|i| potential(cfg, g.x(i)).ok_or_else(|| Error::Grid(format!("potential is singular at interior x = {}", g.x(i)))))
        .collect::<Result<_>>()?;
    let off = -0.5 / h2;
    let half = Complex64::new(0.0, 0.5 * dt);
    let diag_l: Vec<Complex64> = v.iter().map(|&vi| 1.0 + half * (1.0 / h2 + vi)).collect();
    let diag_r: Vec<Complex64> = v.iter().map(|&vi| 1.0 - half * (1.0 / h2 + vi)).collect();
    let off_l = half * off;
    let off_r = -half * off;

    // Thomas factorisation of the constant left-hand matrix
    let mut cprime = vec![Complex64::new(0.0, 0.0); m];
    let mut denom = vec![Complex64::new(0.0, 0.0); m];
    denom[0] = diag_l[0];
    cprime[0] = off_l / denom[0];
    for i in 1..m {
        denom[i] = diag_l[i] - off_l * cprime[i - 1];
        cprime[i] = off_l / denom[i];
    }

    let mut psi: Vec<Complex64> = f.values[1..n - 1].to_vec();
    let start_norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..steps {
        for i in 0..m {
            let mut r = diag_r[i] * psi[i];
            if i > 0 {
                r += off_r * psi[i - 1];
            }
            if i + 1 < m {
                r += off_r * psi[i + 1];
            }
            rhs[i] = r;
        }
        psi[0] = rhs[0] / denom[0];
        for i in 1..m {
            psi[i] = (rhs[i] - off_l * psi[i - 1]) / denom[i];
        }
        for i in (0..m - 1).rev() {
            let next = psi[i + 1];
            psi[i] -= cprime[i] * next;
        }
    }
    let end_norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
    let drift = (end_norm / start_norm - 1.0).abs();
    if !(drift <= 1e-10 * (1.0 + steps as f64 / 1000.0)) {
        return Err(Error::Grid(format!("Crank-Nicolson norm drift {drift:.3e} after {steps} steps")));
    }
    let mut values = Vec::with_capacity(n);
    values.push(Complex64::new(0.0, 0.0));
    values.extend(psi);
    values.push(Complex64::new(0.0, 0.0));
    GridFn::new(g, values)
}

/// |⟨a|b⟩|²/(‖a‖²‖b‖²).
pub fn fidelity(a: &GridFn, b: &GridFn) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr() / (a.norm() * b.norm()).powi(2))
}
