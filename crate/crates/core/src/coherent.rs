//! Coherent states in the energy eigenbasis.
//!
//! A state is stored through its Glauber coefficients cₙ = 𝒩 zⁿ / hₙ, with
//! hₙ = √Pₙ / Π_{k=1}^{n} 𝒵_k carrying the temporal-stability phase e^{iαeₙ}.
//! Magnitudes are assembled in log space and exponentiated once.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::SpectralTable;
use crate::error::{Error, Result};
use crate::family::{FamilyConfig, FamilyKind};
use crate::functional::{eval_z, ZSpec, ZValue, ZVariant};
use crate::specfun::{bessel_i, confluent_1f1, ln_gamma_pos, ln_q_poch_inf, q_exp};
use crate::ETA;

/// Default truncation tolerance for the discarded probability mass.
pub const TAIL_TOL: f64 = 1e-12;
/// Truncation used before auto-extension.
pub const DEFAULT_NMAX: usize = 64;
/// Largest truncation ever built.
pub const MAX_NMAX: usize = 4096;

const SERIES_TAIL_TOL: f64 = 1e-17;

/// ln|hₙ|², arg hₙ and eₙ for n = 0…nmax.
#[derive(Debug, Clone)]
struct Expansion {
    ln_h2: Vec<f64>,
    h_phase: Vec<f64>,
    energy: Vec<f64>,
}

fn expansion(cfg: &FamilyConfig, zs: &ZSpec, nmax: usize) -> Result<Expansion> {
    let table = SpectralTable::build(cfg, nmax.max(1))?;
    let mut ln_h2 = Vec::with_capacity(nmax + 1);
    let mut h_phase = Vec::with_capacity(nmax + 1);
    let mut acc = ZValue::ONE;
    for n in 0..=nmax {
        if n > 0 {
            acc = acc * eval_z(zs, cfg, n)?;
        }
        let l = table.ln_p[n] - 2.0 * acc.ln_mod;
        if !l.is_finite() {
            return Err(Error::Domain(format!("|h_{n}|^2 is not finite for {}", zs.variant.name())));
        }
        ln_h2.push(l);
        h_phase.push(-acc.phase);
    }
    Ok(Expansion { ln_h2, h_phase, energy: table.e[..=nmax].to_vec() })
}

/// hₙ = √Pₙ / Π_{k=1}^{n} 𝒵_k; h₀ = 1.
pub fn hn(cfg: &FamilyConfig, zs: &ZSpec, n: usize) -> Result<Complex64> {
    zs.check(cfg)?;
    let ex = expansion(cfg, zs, n)?;
    Ok(Complex64::from_polar((0.5 * ex.ln_h2[n]).exp(), ex.h_phase[n]))
}

/// ln|hₙ|² for n = 0…nmax.
pub fn ln_hn_abs2(cfg: &FamilyConfig, zs: &ZSpec, nmax: usize) -> Result<Vec<f64>> {
    zs.check(cfg)?;
    Ok(expansion(cfg, zs, nmax)?.ln_h2)
}

/// The series Σ xⁿ/|hₙ|² summed in log space.
#[derive(Debug, Clone)]
struct Summed {
    ex: Expansion,
    ln_terms: Vec<f64>,
    ln_total: f64,
    /// Relative mass beyond the last computed term.
    beyond: f64,
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|&l| (l - m).exp()).sum::<f64>().ln()
}

fn summed(cfg: &FamilyConfig, zs: &ZSpec, x: f64) -> Result<Summed> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("normalization needs a finite x = |z|^2 >= 0, got {x}")));
    }
    let mut n = DEFAULT_NMAX;
    loop {
        let ex = expansion(cfg, zs, n)?;
        let ln_terms: Vec<f64> = if x == 0.0 {
            (0..=n).map(|k| if k == 0 { 0.0 } else { f64::NEG_INFINITY }).collect()
        } else {
            ex.ln_h2.iter().enumerate().map(|(k, l)| k as f64 * x.ln() - l).collect()
        };
        let ln_total = log_sum_exp(&ln_terms);
        let ratio = (ln_terms[n] - ln_terms[n - 1]).exp();
        let beyond = if x == 0.0 {
            0.0
        } else if ratio < 1.0 {
            (ln_terms[n] - ln_total).exp() * ratio / (1.0 - ratio)
        } else {
            f64::INFINITY
        };
        if beyond <= SERIES_TAIL_TOL {
            return Ok(Summed { ex, ln_terms, ln_total, beyond });
        }
        if n >= MAX_NMAX {
            return Err(Error::Domain(format!(
                "normalization series does not converge at x = {x} within {MAX_NMAX} terms (last term ratio {ratio:.6}); x is at or beyond the radius of convergence squared"
            )));
        }
        n = (2 * n).min(MAX_NMAX);
    }
}

/// 𝒩(x) = [Σ xⁿ/|hₙ|²]^{−1/2}.
pub fn normalization(cfg: &FamilyConfig, zs: &ZSpec, x: f64) -> Result<f64> {
    zs.check(cfg)?;
    Ok((-0.5 * summed(cfg, zs, x)?.ln_total).exp())
}

/// The catalogued closed form of 𝒩(x), where one exists for the pairing.
pub fn normalization_closed_form(cfg: &FamilyConfig, zs: &ZSpec, x: f64) -> Option<Result<f64>> {
    if zs.check(cfg).is_err() {
        return None;
    }
    let inv_sqrt = |s: Result<f64>| s.map(|s| 1.0 / s.sqrt());
    let unit_disk = |x: f64| {
        if x < 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("closed form needs x < 1, got {x}")))
        }
    };
    let nu = 2.0 * cfg.a1 / ETA;
    Some(match (cfg.kind, zs.variant) {
        (FamilyKind::TypeC | FamilyKind::TypeD, ZVariant::Const { c }) => Ok((-c * c * x / (2.0 * cfg.gamma_const())).exp()),
        (FamilyKind::TypeA, ZVariant::Const { c }) if (2.0 * cfg.rho() - 1.0).abs() < 1e-12 => {
            Ok((1.0 / (c * x.sqrt() / cfg.kappa()).cosh()).sqrt())
        }
        (_, ZVariant::TypeCG) => unit_disk(x).map(|_| (1.0 - x).powf(-0.5 * cfg.a1 / ETA)),
        (_, ZVariant::TypeAPT1) => unit_disk(x).map(|_| (1.0 - x).powf(0.5 * (nu + 1.0))),
        (_, ZVariant::TypeABG) => {
            if x == 0.0 {
                Ok(1.0)
            } else {
                inv_sqrt(bessel_i(nu, 2.0 * x.sqrt()).map(|i| (ln_gamma_pos(nu + 1.0) - 0.5 * nu * x.ln()).exp() * i))
            }
        }
        (_, ZVariant::TypeAWhittaker { sigma }) => inv_sqrt(confluent_1f1(2.0 - sigma, 2.0, x)),
        (_, ZVariant::SsR) => {
            let q = cfg.q();
            inv_sqrt(cfg.remainder(1).and_then(|r1| q_exp(0.5, q, x * r1 * (1.0 - q) / q.sqrt())))
        }
        // equals the series with signed factors (c; q⁻¹)_{n+1}, which is the
        // normalization while every factor 1 − c q^{−j} entering is positive
        (_, ZVariant::SsRamanujan { c }) => {
            let q = cfg.q();
            cfg.remainder(1).and_then(|r1| {
                let y = x * r1 * (1.0 - q);
                let (num, _) = ln_q_poch_inf(-c * y / q, q)?;
                let (den, _) = ln_q_poch_inf(-y, q)?;
                Ok((0.5 * (num - den)).exp())
            })
        }
        _ => return None,
    })
}

/// Radius of convergence in |z| estimated from the ratio |hₙ|²/|hₙ₋₁|² at n = nprobe.
///
/// Ratios that are still growing (end/middle > 1.5) or radii above 10⁶ are
/// reported as infinite.
pub fn radius_of_convergence(cfg: &FamilyConfig, zs: &ZSpec, nprobe: usize) -> Result<f64> {
    if nprobe < 16 {
        return Err(Error::Config(format!("radius probe needs nprobe >= 16, got {nprobe}")));
    }
    zs.check(cfg)?;
    let ln_h2 = expansion(cfg, zs, nprobe)?.ln_h2;
    let ratio = |n: usize| (ln_h2[n] - ln_h2[n - 1]).exp();
    let (end, mid) = (ratio(nprobe), ratio(nprobe / 2));
    let radius = end.sqrt();
    if end / mid > 1.5 || radius > 1e6 {
        Ok(f64::INFINITY)
    } else {
        Ok(radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Truncation {
    /// Start at 64 terms and double until the tail is below [`TAIL_TOL`].
    Auto,
    /// Exactly this many terms; an error if the tail exceeds [`TAIL_TOL`].
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentState {
    pub cfg: FamilyConfig,
    pub zs: ZSpec,
    pub z: Complex64,
    pub nmax: usize,
    /// Coefficients of |Ψₙ⟩, n = 0…nmax.
    pub c: Vec<Complex64>,
    pub norm_factor: f64,
    /// Probability mass discarded by the truncation.
    pub tail: f64,
    pub energies: Vec<f64>,
}

impl CoherentState {
    pub fn build(cfg: &FamilyConfig, zs: &ZSpec, z: Complex64, truncation: Truncation) -> Result<Self> {
        zs.check(cfg)?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain(format!("label z must be finite, got {z}")));
        }
        let s = summed(cfg, zs, z.norm_sqr())?;
        let last = s.ln_terms.len() - 1;
        let prob = |n: usize| (s.ln_terms[n] - s.ln_total).exp();
        // mass beyond index n, including the estimate past the computed terms
        let tail_after = |n: usize| ((n + 1)..=last).map(prob).sum::<f64>() + s.beyond;
        let (nmax, tail) = match truncation {
            Truncation::Auto => {
                let mut n = DEFAULT_NMAX.min(last);
                while tail_after(n) > TAIL_TOL && n < last {
                    n = (2 * n).min(last);
                }
                (n, tail_after(n))
            }
            Truncation::Fixed(n) => {
                if n > MAX_NMAX {
                    return Err(Error::Config(format!("nmax {n} exceeds the cap {MAX_NMAX}")));
                }
                let tail = if n >= last { s.beyond } else { tail_after(n) };
                if tail > TAIL_TOL {
                    return Err(Error::NoConvergence(format!(
                        "nmax = {n} leaves probability {tail:.3e} above tolerance {TAIL_TOL:e}; increase nmax"
                    )));
                }
                (n, tail)
            }
        };
        let ex = if nmax > last { expansion(cfg, zs, nmax)? } else { s.ex };
        let ln_norm = -0.5 * s.ln_total;
        let (ln_r, arg) = (z.norm().ln(), z.arg());
        let c = (0..=nmax)
            .map(|n| {
                if n > 0 && z == Complex64::new(0.0, 0.0) {
                    return Complex64::new(0.0, 0.0);
                }
                let nf = n as f64;
                let ln_mod = ln_norm - 0.5 * ex.ln_h2[n] + if n == 0 { 0.0 } else { nf * ln_r };
                Complex64::from_polar(ln_mod.exp(), nf * arg - ex.h_phase[n])
            })
            .collect();
        Ok(CoherentState {
            cfg: *cfg,
            zs: *zs,
            z,
            nmax,
            c,
            norm_factor: ln_norm.exp(),
            tail,
            energies: ex.energy[..=nmax].to_vec(),
        })
    }

    /// Structural checks for a state read back from a dump.
    pub fn validate(&self) -> Result<()> {
        self.zs.check(&self.cfg)?;
        if self.c.len() != self.nmax + 1 || self.energies.len() != self.nmax + 1 {
            return Err(Error::Config(format!(
                "state with nmax = {} carries {} coefficients and {} energies",
                self.nmax,
                self.c.len(),
                self.energies.len()
            )));
        }
        let mass: f64 = self.probabilities().iter().sum();
        if (mass + self.tail - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!("state is not normalised: probability {mass} plus tail {}", self.tail)));
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.c.iter().map(|c| c.norm_sqr()).collect()
    }

    /// ⟨self|other⟩ = Σ c̄ₙ(self) cₙ(other).
    pub fn overlap(&self, other: &CoherentState) -> Result<Complex64> {
        if self.cfg != other.cfg || self.zs.variant != other.zs.variant {
            return Err(Error::Config("overlap needs two states of the same family and functional".into()));
        }
        Ok(self.c.iter().zip(&other.c).map(|(a, b)| a.conj() * b).sum())
    }

    /// Time evolution: α → α + Ωt, i.e. cₙ → cₙ e^{−iΩt eₙ}.
    pub fn evolve(&self, t: f64, omega: f64) -> CoherentState {
        let mut s = self.clone();
        s.zs.alpha += omega * t;
        for (c, e) in s.c.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -omega * t * e);
        }
        s
    }

    /// Whether R and 𝒵 are constant along the orbit.
    pub fn scalar_exact(&self) -> bool {
        matches!(self.cfg.kind, FamilyKind::TypeC | FamilyKind::TypeD) && matches!(self.zs.variant, ZVariant::Const { .. })
    }

    fn lowering_eigenvalue(&self) -> Result<Complex64> {
        Ok(self.z * eval_z(&self.zs, &self.cfg, 0)?.to_complex())
    }

    /// Σ|cₙ|²eₙ, and the scalar form |z𝒵(a₀)|² where it is exact.
    pub fn energy_expectation(&self) -> (f64, Option<f64>) {
        let series = self.c.iter().zip(&self.energies).map(|(c, e)| c.norm_sqr() * e).sum();
        if self.scalar_exact() {
            return (series, self.lowering_eigenvalue().ok().map(|l| l.norm_sqr()));
        }
        if let Ok(shifted) = self.shifted_orbit_estimate() {
            log::debug!("scalar energy form is not exact for {}; shifted-orbit value {shifted}", self.zs.variant.name());
        }
        (series, None)
    }

    /// |z𝒵(a₀) 𝒩(a₀-orbit)/𝒩|².
    fn shifted_orbit_estimate(&self) -> Result<f64> {
        let x = self.z.norm_sqr();
        let back = normalization(&self.cfg.shifted_back(), &self.zs, x)?;
        Ok((self.lowering_eigenvalue()?.norm() * back / self.norm_factor).powi(2))
    }

    /// J with ⟨Ĥ⟩ = ΩJ.
    pub fn action_variable(&self, omega: f64) -> Result<f64> {
        if !self.scalar_exact() {
            return Err(Error::Unsupported(format!(
                "the action identity is scalar only for constant remainder and constant functional (types C/D with const), got {} with {}",
                self.cfg.kind,
                self.zs.variant.name()
            )));
        }
        if !(omega > 0.0) {
            return Err(Error::Config(format!("omega must be positive, got {omega}")));
        }
        Ok(self.energy_expectation().0 / omega)
    }

    /// max over n of |√eₙ₊₁ cₙ₊₁ − λcₙ| with λ = z𝒵(a₀).
    pub fn annihilation_check(&self) -> Result<f64> {
        if !self.scalar_exact() {
            return Err(Error::Unsupported(format!(
                "the annihilation eigenvalue is operator-valued for {} on {}; only constant configurations are checked",
                self.zs.variant.name(),
                self.cfg.kind
            )));
        }
        let lambda = self.lowering_eigenvalue()?;
        Ok((0..self.nmax)
            .map(|n| (self.energies[n + 1].sqrt() * self.c[n + 1] - lambda * self.c[n]).norm())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::ln_factorial;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn osc() -> (FamilyConfig, ZSpec) {
        (FamilyConfig::type_d(ETA, 0.0).unwrap(), ZSpec::constant(1.0))
    }

    fn disk() -> (FamilyConfig, ZSpec) {
        (FamilyConfig::type_c(-3.0 * ETA, 1.0, 0.0).unwrap(), ZSpec::new(ZVariant::TypeCG, 0.0))
    }

    fn pt(v: ZVariant) -> (FamilyConfig, ZSpec) {
        (FamilyConfig::type_a(0.5 * ETA, 1.0, 0.5 * ETA, 0.0, 0.0).unwrap(), ZSpec::new(v, 0.0))
    }

    fn ss(v: ZVariant) -> (FamilyConfig, ZSpec) {
        (FamilyConfig::self_similar(1.0, 0.5, 1.0).unwrap(), ZSpec::new(v, 0.0))
    }

    fn sech() -> (FamilyConfig, ZSpec) {
        let cfg = FamilyConfig::type_a(0.5 * ETA, 0.8, 0.0, 0.0, 0.0).unwrap();
        let k = cfg.kappa();
        (cfg, ZSpec::constant(k))
    }

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hn_values() {
        let (cfg, zs) = osc();
        assert_relative_eq!(hn(&cfg, &zs, 4).unwrap().re, 24f64.sqrt(), max_relative = 1e-13);
        assert_eq!(hn(&cfg, &zs, 0).unwrap(), z(1.0, 0.0));
        let (cfg, zs) = pt(ZVariant::TypeABG);
        assert_relative_eq!(hn(&cfg, &zs, 2).unwrap().norm(), 12f64.sqrt(), max_relative = 1e-12);
        // the phase of hₙ is +αeₙ
        let (cfg, _) = osc();
        let h = hn(&cfg, &ZSpec::constant(1.0).with_alpha(0.3), 3).unwrap();
        assert_relative_eq!(h.arg(), 0.9, max_relative = 1e-13);
    }

    #[test]
    fn normalization_examples() {
        let (cfg, zs) = osc();
        assert_relative_eq!(normalization(&cfg, &zs, 1.0).unwrap(), (-0.5f64).exp(), max_relative = 1e-13);
        let (cfg, zs) = disk();
        assert_relative_eq!(normalization(&cfg, &zs, 0.36).unwrap(), 0.512, max_relative = 1e-12);
        assert!(matches!(normalization(&cfg, &zs, 1.2), Err(Error::Domain(_))));
        let (cfg, zs) = pt(ZVariant::TypeABG);
        assert_relative_eq!(normalization(&cfg, &zs, 1.0).unwrap(), 1.0 / 1.590_636_854_637_329f64.sqrt(), max_relative = 1e-12);
        assert_eq!(normalization(&cfg, &zs, 0.0).unwrap(), 1.0);
    }

    fn closed_form_cases() -> Vec<((FamilyConfig, ZSpec), Vec<f64>)> {
        let inner = vec![0.05, 0.2, 0.4, 0.6, 0.8];
        let wide = vec![0.1, 0.7, 1.5, 3.0, 6.0];
        vec![
            (osc(), wide.clone()),
            ((FamilyConfig::type_c(-1.0, 0.6, 0.0).unwrap(), ZSpec::constant(0.9)), wide.clone()),
            (disk(), inner.clone()),
            (pt(ZVariant::TypeAPT1), inner),
            (pt(ZVariant::TypeABG), wide.clone()),
            (pt(ZVariant::TypeAWhittaker { sigma: 0.5 }), wide.clone()),
            (sech(), wide.clone()),
            (ss(ZVariant::SsR), wide.clone()),
            (ss(ZVariant::SsRamanujan { c: 0.0 }), wide.clone()),
            (ss(ZVariant::SsRamanujan { c: 1e-3 }), vec![0.1, 0.5, 1.0, 1.5, 2.0]),
        ]
    }

    #[test]
    fn series_matches_closed_forms() {
        for ((cfg, zs), xs) in closed_form_cases() {
            for x in xs {
                assert!(normalization_closed_form(&cfg, &zs, x).is_some(), "{:?} {:?}", cfg.kind, zs.variant);
                let series = normalization(&cfg, &zs, x).unwrap();
                let closed = normalization_closed_form(&cfg, &zs, x).unwrap().unwrap();
                assert_relative_eq!(series, closed, max_relative = 1e-9);
            }
        }
        assert!(normalization_closed_form(&pt(ZVariant::TypeABG).0, &ZSpec::constant(1.0), 0.3).is_none());
    }

    #[test]
    fn radius_probe() {
        let (cfg, zs) = disk();
        let r = radius_of_convergence(&cfg, &zs, 200).unwrap();
        assert!((r - 1.0).abs() < 0.05, "{r}");
        assert!(radius_of_convergence(&osc().0, &osc().1, 200).unwrap().is_infinite());
        let (cfg, zs) = ss(ZVariant::SsR);
        assert!(radius_of_convergence(&cfg, &zs, 200).unwrap().is_infinite());
        assert!(radius_of_convergence(&cfg, &zs, 8).is_err());
    }

    #[test]
    fn dump_reads_back() {
        let (cfg, zs) = disk();
        let s = CoherentState::build(&cfg, &zs.with_alpha(0.2), z(0.4, -0.1), Truncation::Auto).unwrap();
        let back: CoherentState = serde_json::from_str(&serde_json::to_string(&s).unwrap()).unwrap();
        assert_eq!(back, s);
        back.validate().unwrap();
        let mut broken = back.clone();
        broken.c.pop();
        assert!(broken.validate().is_err());
        broken = back;
        broken.c[0] *= 2.0;
        assert!(broken.validate().is_err());
    }

    #[test]
    fn build_examples() {
        let (cfg, zs) = osc();
        let s = CoherentState::build(&cfg, &zs, z(0.0, 0.0), Truncation::Auto).unwrap();
        assert_eq!(s.c[0], z(1.0, 0.0));
        assert!(s.c[1..].iter().all(|c| c.norm() == 0.0));

        let s = CoherentState::build(&cfg, &zs, z(0.5, 0.0), Truncation::Auto).unwrap();
        for n in 0..10 {
            let want = (-0.125 + n as f64 * 0.5f64.ln() - 0.5 * ln_factorial(n)).exp();
            assert_relative_eq!(s.c[n].re, want, max_relative = 1e-13);
        }
        assert_relative_eq!(s.c[2].re, 0.156_004_886, max_relative = 1e-8);
        assert_eq!(s.c[0].re, s.norm_factor);

        let (cfg, zs) = ss(ZVariant::SsR);
        let zs = zs.with_alpha(1.0);
        let s = CoherentState::build(&cfg, &zs, z(0.3, 0.0), Truncation::Auto).unwrap();
        let q: f64 = 0.5;
        let xi2 = 0.09 * (1.0 - q) / q.sqrt();
        let raw: Vec<f64> = (0..12)
            .map(|n| {
                let nf = n as f64;
                let qq: f64 = (1..=n).map(|k| 1.0 - q.powi(k)).product();
                q.powf(nf * nf / 4.0) * xi2.powf(nf / 2.0) / qq.sqrt()
            })
            .collect();
        let norm = 1.0 / q_exp(0.5, q, xi2).unwrap().sqrt();
        for n in 0..12 {
            assert_relative_eq!(s.c[n].norm(), norm * raw[n], max_relative = 1e-12);
            let e = (1.0 - q.powi(n as i32)) / (1.0 - q);
            assert!((s.c[n].arg() + e).abs() < 1e-12);
        }
    }

    #[test]
    fn truncation_errors() {
        let (cfg, zs) = osc();
        let r = CoherentState::build(&cfg, &zs, z(3.0, 0.0), Truncation::Fixed(10));
        assert!(matches!(r, Err(Error::NoConvergence(_))));
        let s = CoherentState::build(&cfg, &zs, z(3.0, 0.0), Truncation::Fixed(100)).unwrap();
        assert_eq!(s.c.len(), 101);
        assert!(s.tail <= TAIL_TOL);
        let (cfg, zs) = disk();
        assert!(CoherentState::build(&cfg, &zs, z(1.1, 0.0), Truncation::Auto).is_err());
        let s = CoherentState::build(&cfg, &zs, z(0.9, 0.0), Truncation::Auto).unwrap();
        assert!(s.nmax > DEFAULT_NMAX);
    }

    #[test]
    fn overlaps() {
        let (cfg, zs) = osc();
        let st = |w: Complex64| CoherentState::build(&cfg, &zs, w, Truncation::Auto).unwrap();
        let (a, b) = (st(z(0.5, 0.0)), st(z(0.3, 0.0)));
        assert_relative_eq!(a.overlap(&a).unwrap().re, 1.0, max_relative = 1e-13);
        assert_relative_eq!(b.overlap(&a).unwrap().re, (-0.02f64).exp(), max_relative = 1e-13);
        let (w1, w2) = (z(0.2, -0.4), z(0.5, 0.5));
        let want = (-0.5 * (w1.norm_sqr() + w2.norm_sqr()) + w1.conj() * w2).exp();
        let got = st(w1).overlap(&st(w2)).unwrap();
        assert!((got - want).norm() < 1e-13);

        let (cfg, zs) = disk();
        let st = |w: Complex64| CoherentState::build(&cfg, &zs, w, Truncation::Auto).unwrap();
        assert_relative_eq!(st(z(0.0, 0.0)).overlap(&st(z(0.5, 0.0))).unwrap().re, 0.649_519_052_838_329, max_relative = 1e-12);
        let (w1, w2) = (z(0.3, 0.2), z(-0.1, 0.4));
        let want = ((1.0 - w1.norm_sqr()) * (1.0 - w2.norm_sqr())).powf(1.5) / (Complex64::new(1.0, 0.0) - w1.conj() * w2).powi(3);
        assert!((st(w1).overlap(&st(w2)).unwrap() - want).norm() < 1e-12);

        let (cfg, zs) = ss(ZVariant::SsR);
        let st = |w: Complex64| CoherentState::build(&cfg, &zs, w, Truncation::Auto).unwrap();
        let scale = 0.5 / 0.5f64.sqrt();
        let w1 = z(0.8, 0.0);
        let w2 = z(1.2, 0.0);
        let want = q_exp(0.5, 0.5, (w1 * w2).re * scale).unwrap()
            / (q_exp(0.5, 0.5, w1.norm_sqr() * scale).unwrap() * q_exp(0.5, 0.5, w2.norm_sqr() * scale).unwrap()).sqrt();
        assert_relative_eq!(st(w1).overlap(&st(w2)).unwrap().re, want, max_relative = 1e-12);

        let other = CoherentState::build(&osc().0, &osc().1, w1, Truncation::Auto).unwrap();
        assert!(matches!(st(w1).overlap(&other), Err(Error::Config(_))));
    }

    #[test]
    fn evolution() {
        let (cfg, zs) = osc();
        let s = CoherentState::build(&cfg, &zs, z(0.5, 0.0), Truncation::Auto).unwrap();
        assert_eq!(s.evolve(0.0, 1.0).c, s.c);
        let t = s.evolve(2.0, 1.0);
        assert_eq!(t.zs.alpha, 2.0);
        let rebuilt = CoherentState::build(&cfg, &zs.with_alpha(2.0), s.z, Truncation::Auto).unwrap();
        for n in 0..=s.nmax {
            let phased = s.c[n] * Complex64::from_polar(1.0, -2.0 * n as f64);
            assert!((t.c[n] - phased).norm() <= 1e-14);
            assert!((t.c[n] - rebuilt.c[n]).norm() <= 1e-14);
        }
        let revived = s.evolve(2.0 * std::f64::consts::PI, 1.0);
        assert_relative_eq!(s.overlap(&revived).unwrap().norm(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn energy_and_action() {
        let (cfg, zs) = osc();
        let s = CoherentState::build(&cfg, &zs, z(0.7, 0.0), Truncation::Auto).unwrap();
        let (series, scalar) = s.energy_expectation();
        assert_relative_eq!(series, 0.49, max_relative = 1e-12);
        assert_relative_eq!(scalar.unwrap(), 0.49, max_relative = 1e-12);
        assert_relative_eq!(s.action_variable(1.0).unwrap(), 0.49, max_relative = 1e-12);
        assert_relative_eq!(s.action_variable(2.0).unwrap(), 0.245, max_relative = 1e-12);
        let zero = CoherentState::build(&cfg, &zs, z(0.0, 0.0), Truncation::Auto).unwrap();
        assert_eq!(zero.energy_expectation(), (0.0, Some(0.0)));
        assert_eq!(zero.action_variable(1.0).unwrap(), 0.0);

        let (cfg, zs) = pt(ZVariant::TypeABG);
        let s = CoherentState::build(&cfg, &zs, z(0.5, 0.0), Truncation::Auto).unwrap();
        let (series, scalar) = s.energy_expectation();
        assert!(scalar.is_none());
        // oracle: eₙ = κ²n(n+2ρ) weighted by xⁿΓ(ν+1)/(n!Γ(ν+n+1))
        let k2 = cfg.kappa().powi(2);
        let (mut num, mut den) = (0.0, 0.0);
        for n in 0..40 {
            let w = (n as f64 * 0.25f64.ln() - ln_factorial(n) - ln_factorial(n + 1)).exp();
            num += w * k2 * (n * (n + 2)) as f64;
            den += w;
        }
        assert_relative_eq!(series, num / den, max_relative = 1e-12);
        assert!(matches!(s.action_variable(1.0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn annihilation() {
        let (cfg, zs) = osc();
        for w in [z(0.5, 0.0), z(0.3, 0.4)] {
            let s = CoherentState::build(&cfg, &zs.with_alpha(0.4), w, Truncation::Auto).unwrap();
            assert!(s.annihilation_check().unwrap() <= 1e-13);
            assert!(s.evolve(1.3, 1.0).annihilation_check().unwrap() <= 1e-13);
        }
        let s = CoherentState::build(&cfg, &zs, z(0.0, 0.0), Truncation::Auto).unwrap();
        assert_eq!(s.annihilation_check().unwrap(), 0.0);
        let cfg_c = FamilyConfig::type_c(-2.0, 0.8, 0.0).unwrap();
        let s = CoherentState::build(&cfg_c, &ZSpec::constant(1.7), z(0.8, 0.0), Truncation::Auto).unwrap();
        assert!(s.annihilation_check().unwrap() <= 1e-13);
        let (cfg, zs) = disk();
        let s = CoherentState::build(&cfg, &zs, z(0.5, 0.0), Truncation::Auto).unwrap();
        assert!(matches!(s.annihilation_check(), Err(Error::Unsupported(_))));
    }

    fn any_pairing() -> impl Strategy<Value = (FamilyConfig, ZSpec, f64)> {
        prop_oneof![
            (0.1f64..2.0, 0.1f64..2.0).prop_map(|(b, c)| (FamilyConfig::type_d(b, 0.0).unwrap(), ZSpec::constant(c), 2.0)),
            (-4.0f64..-0.2, 0.2f64..2.0).prop_map(|(a1, b)| (FamilyConfig::type_c(a1, b, 0.0).unwrap(), ZSpec::new(ZVariant::TypeCG, 0.0), 0.85)),
            (0.2f64..2.0).prop_map(|a1| (
                FamilyConfig::type_a(a1, 1.0, 0.5 * ETA, 0.0, 0.0).unwrap(),
                ZSpec::new(ZVariant::TypeAPT1, 0.0),
                0.85
            )),
            (0.2f64..2.0).prop_map(|a1| (FamilyConfig::type_a(a1, 1.0, 0.5 * ETA, 0.0, 0.0).unwrap(), ZSpec::new(ZVariant::TypeABG, 0.0), 3.0)),
            (0.1f64..0.9).prop_map(|q| (FamilyConfig::self_similar(1.0, q, 1.0).unwrap(), ZSpec::new(ZVariant::SsR, 0.0), 2.0)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn states_are_normalized((cfg, zs, rmax) in any_pairing(), r in 0.0f64..1.0, th in 0.0f64..std::f64::consts::TAU, alpha in -2.0f64..2.0) {
            let w = Complex64::from_polar(r * rmax.sqrt(), th);
            let s = CoherentState::build(&cfg, &zs.with_alpha(alpha), w, Truncation::Auto).unwrap();
            let total: f64 = s.probabilities().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-10);
            prop_assert!(total >= 1.0 - 10.0 * TAIL_TOL - 1e-14);
            prop_assert_eq!(s.c[0], Complex64::new(s.norm_factor, 0.0));
        }

        #[test]
        fn evolution_is_additive((cfg, zs, rmax) in any_pairing(), t1 in -3.0f64..3.0, t2 in -3.0f64..3.0) {
            let s = CoherentState::build(&cfg, &zs, Complex64::new(0.6 * rmax.sqrt(), 0.1), Truncation::Auto).unwrap();
            let a = s.evolve(t1, 1.0).evolve(t2, 1.0);
            let b = s.evolve(t1 + t2, 1.0);
            for (x, y) in a.c.iter().zip(&b.c) {
                prop_assert!((x - y).norm() <= 1e-13);
            }
            prop_assert!((a.energy_expectation().0 - s.energy_expectation().0).abs() <= 1e-12);
        }

        #[test]
        fn labels_are_continuous((cfg, zs, rmax) in any_pairing(), r in 0.1f64..0.9, th in 0.0f64..std::f64::consts::TAU) {
            let w = Complex64::from_polar(r * rmax.sqrt(), th);
            let d = 1e-6;
            let a = CoherentState::build(&cfg, &zs, w, Truncation::Fixed(MAX_NMAX.min(256))).unwrap();
            let b = CoherentState::build(&cfg, &zs, w + d, Truncation::Fixed(MAX_NMAX.min(256))).unwrap();
            let dist: f64 = a.c.iter().zip(&b.c).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(dist <= 50.0 * d, "quotient {}", dist / d);
        }
    }
}
