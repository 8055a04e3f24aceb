//! Energy ladder and nested remainder products of a shape-invariant family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{FamilyConfig, FamilyKind};
use crate::specfun::{ln_factorial, ln_gamma_pos, ln_q_poch};

/// R(a₁…a_nmax), eₙ and ln Pₙ for one orbit.
///
/// `r_seq[k-1]` holds R(aₖ); `e` and `ln_p` are indexed by n = 0…nmax.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralTable {
    pub cfg: FamilyConfig,
    pub nmax: usize,
    pub r_seq: Vec<f64>,
    pub e: Vec<f64>,
    pub ln_p: Vec<f64>,
}

impl SpectralTable {
    pub fn build(cfg: &FamilyConfig, nmax: usize) -> Result<Self> {
        if nmax < 1 {
            return Err(Error::Config("spectral table needs nmax >= 1".into()));
        }
        cfg.validate()?;
        let orbit = cfg.parameter_orbit(nmax, false)?;
        let r_seq: Vec<f64> = orbit.iter().map(|&a| cfg.remainder_at(a)).collect();
        let mut e = Vec::with_capacity(nmax + 1);
        e.push(0.0);
        for r in &r_seq {
            e.push(e.last().unwrap() + r);
        }
        // Pₙ = Π_{k=1}^{n} Σ_{s=k}^{n} R(a_s), with suffix sums to avoid
        // differencing nearly equal energies
        let mut ln_p = vec![0.0; nmax + 1];
        for n in 1..=nmax {
            let mut suffix = 0.0;
            let mut acc = 0.0;
            for k in (1..=n).rev() {
                suffix += r_seq[k - 1];
                acc += suffix.ln();
            }
            ln_p[n] = acc;
        }
        Ok(SpectralTable { cfg: *cfg, nmax, r_seq, e, ln_p })
    }

    fn check(&self, n: usize) -> Result<()> {
        if n > self.nmax {
            return Err(Error::OutOfRange { index: n, max: self.nmax });
        }
        Ok(())
    }

    pub fn energy(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.e[n])
    }

    pub fn ln_nested_product(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok(self.ln_p[n])
    }

    /// Pₙ; P₀ = 1.
    pub fn nested_product(&self, n: usize) -> Result<f64> {
        self.ln_nested_product(n).map(f64::exp)
    }

    /// ln Π_{k=0}^{n−1}(eₙ − eₖ): the same product built from energy gaps.
    pub fn ln_nested_product_from_gaps(&self, n: usize) -> Result<f64> {
        self.check(n)?;
        Ok((0..n).map(|k| (self.e[n] - self.e[k]).ln()).sum())
    }

    /// Cₙ = Pₙ^{−1/2}; C₀ = 1.
    pub fn cn_normalizer(&self, n: usize) -> Result<f64> {
        self.ln_nested_product(n).map(|l| (-0.5 * l).exp())
    }
}

pub fn build_spectral_table(cfg: &FamilyConfig, nmax: usize) -> Result<SpectralTable> {
    SpectralTable::build(cfg, nmax)
}

/// ln of the family's closed-form nested product.
pub fn ln_closed_form_nested_product(cfg: &FamilyConfig, n: usize) -> Result<f64> {
    cfg.validate()?;
    if n == 0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok(match cfg.kind {
        // γⁿ n!
        FamilyKind::TypeC | FamilyKind::TypeD => nf * cfg.gamma_const().ln() + ln_factorial(n),
        // κ^{2n} Γ(n+1) Γ(2ρ+2n) / Γ(2ρ+n)
        FamilyKind::TypeA => {
            let two_rho = 2.0 * cfg.rho();
            2.0 * nf * cfg.kappa().ln() + ln_factorial(n) + ln_gamma_pos(two_rho + 2.0 * nf) - ln_gamma_pos(two_rho + nf)
        }
        // [R₁/(1−q)]ⁿ q^{n(n−1)/2} (q;q)ₙ
        FamilyKind::SelfSimilar => {
            let q = cfg.q();
            let r1 = cfg.remainder(1)?;
            nf * (r1 / (1.0 - q)).ln() + 0.5 * nf * (nf - 1.0) * q.ln() + ln_q_poch(q, q, n).0
        }
    })
}

pub fn closed_form_nested_product(cfg: &FamilyConfig, n: usize) -> Result<f64> {
    ln_closed_form_nested_product(cfg, n).map(f64::exp)
}
