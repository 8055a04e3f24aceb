//! The 𝒵 functional catalog.
//!
//! Each variant fixes a modulus rule evaluated on the orbit point a_j and the
//! temporal-stability phase e^{−iαR(a_j)}. Values are carried as
//! (log-modulus, phase) pairs so that long orbit products neither overflow
//! nor underflow.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::family::{FamilyConfig, FamilyKind};
use crate::specfun::{ln_gamma, ln_gamma_pos, ln_q_poch};
use crate::ETA;

/// The affine auxiliary function g(a; c, d) = c·a + d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GFunction {
    pub c: f64,
    pub d: f64,
}

impl GFunction {
    pub fn new(c: f64, d: f64) -> Self {
        GFunction { c, d }
    }
}

pub fn g_aux(a: f64, g: GFunction) -> f64 {
    g.c * a + g.d
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ZVariant {
    /// 𝒵 = c on every orbit point.
    Const { c: f64 },
    /// √g(a; −γ/η, 0) on the typeC orbit (the disk / Perelomov state).
    #[serde(rename = "typeC_G")]
    TypeCG,
    /// √(g(a; 2κ/η, κ) g(a; 2κ/η, 2κ)) (Pöschl–Teller, γ = η/2).
    #[serde(rename = "typeA_PT1")]
    TypeAPT1,
    /// The Barut–Girardello form (γ = η/2).
    #[serde(rename = "typeA_BG")]
    TypeABG,
    /// The Whittaker-measure form with parameter σ < 2.
    #[serde(rename = "typeA_Whittaker")]
    TypeAWhittaker { sigma: f64 },
    /// 𝒵 = R(a_j) on a scaling orbit.
    #[serde(rename = "ss_R")]
    SsR,
    /// 𝒵 = R(a_j)·√(1 − c·a₁/a_{j+1}), 0 ≤ c < 1.
    #[serde(rename = "ss_Ramanujan")]
    SsRamanujan { c: f64 },
}

impl ZVariant {
    pub fn name(&self) -> &'static str {
        match self {
            ZVariant::Const { .. } => "const",
            ZVariant::TypeCG => "typeC_G",
            ZVariant::TypeAPT1 => "typeA_PT1",
            ZVariant::TypeABG => "typeA_BG",
            ZVariant::TypeAWhittaker { .. } => "typeA_Whittaker",
            ZVariant::SsR => "ss_R",
            ZVariant::SsRamanujan { .. } => "ss_Ramanujan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZSpec {
    pub variant: ZVariant,
    #[serde(default)]
    pub alpha: f64,
}

const GAMMA_TOL: f64 = 1e-12;

impl ZSpec {
    pub fn new(variant: ZVariant, alpha: f64) -> Self {
        ZSpec { variant, alpha }
    }

    pub fn constant(c: f64) -> Self {
        ZSpec::new(ZVariant::Const { c }, 0.0)
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// Checks that the variant belongs to the family and its parameters are in range.
    pub fn check(&self, cfg: &FamilyConfig) -> Result<()> {
        cfg.validate()?;
        if !self.alpha.is_finite() {
            return Err(Error::Config("alpha must be finite".into()));
        }
        let need = |kind: FamilyKind| -> Result<()> {
            if cfg.kind != kind {
                return Err(Error::Config(format!("{} requires a {} family, got {}", self.variant.name(), kind, cfg.kind)));
            }
            Ok(())
        };
        match self.variant {
            ZVariant::Const { c } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::Config(format!("const functional needs c > 0, got {c}")));
                }
            }
            ZVariant::TypeCG => {
                need(FamilyKind::TypeC)?;
                if !(cfg.a1 / ETA < 0.0) {
                    return Err(Error::Config(format!("typeC_G needs rho_C = a1/eta < 0, got {}", cfg.a1 / ETA)));
                }
            }
            ZVariant::TypeAPT1 | ZVariant::TypeABG => {
                need(FamilyKind::TypeA)?;
                if (cfg.gamma - 0.5 * ETA).abs() > GAMMA_TOL {
                    return Err(Error::Config(format!(
                        "{} is defined for gamma = eta/2 = {}, got gamma = {}",
                        self.variant.name(),
                        0.5 * ETA,
                        cfg.gamma
                    )));
                }
                if !(cfg.a1 > 0.0) {
                    return Err(Error::Config(format!("{} needs nu = 2 a1/eta > 0", self.variant.name())));
                }
            }
            ZVariant::TypeAWhittaker { sigma } => {
                need(FamilyKind::TypeA)?;
                if !(sigma < 2.0) {
                    return Err(Error::Config(format!("typeA_Whittaker needs sigma < 2, got {sigma}")));
                }
            }
            ZVariant::SsR => need(FamilyKind::SelfSimilar)?,
            ZVariant::SsRamanujan { c } => {
                need(FamilyKind::SelfSimilar)?;
                if !(0.0..1.0).contains(&c) {
                    return Err(Error::Config(format!("ss_Ramanujan needs 0 <= c < 1, got {c}")));
                }
            }
        }
        Ok(())
    }
}

/// A complex number stored as ln|z| and arg z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZValue {
    pub ln_mod: f64,
    pub phase: f64,
}

impl ZValue {
    pub const ONE: ZValue = ZValue { ln_mod: 0.0, phase: 0.0 };

    pub fn modulus(&self) -> f64 {
        self.ln_mod.exp()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.ln_mod.exp(), self.phase)
    }
}

impl std::ops::Mul for ZValue {
    type Output = ZValue;

    fn mul(self, o: ZValue) -> ZValue {
        ZValue { ln_mod: self.ln_mod + o.ln_mod, phase: self.phase + o.phase }
    }
}

/// ν = 2a₁/η of the base orbit.
fn nu(cfg: &FamilyConfig) -> f64 {
    2.0 * cfg.a1 / ETA
}

/// Square root of a product of real factors over a quotient, allowing negative
/// values only where the variant permits a complex root.
fn sqrt_ratio(num: f64, den: f64, j: usize, label: &str) -> Result<ZValue> {
    let r = num / den;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("{label}: square root of negative value {r} at orbit index {j}")));
    }
    Ok(ZValue { ln_mod: 0.5 * r.ln(), phase: 0.0 })
}

/// 𝒵_j for j ≥ 0, where j = 0 is the backward point a₀.
pub fn eval_z(zs: &ZSpec, cfg: &FamilyConfig, j: usize) -> Result<ZValue> {
    let a = cfg.orbit_point(j);
    let phase = -zs.alpha * cfg.remainder_at(a);
    let base = match zs.variant {
        ZVariant::Const { c } => ZValue { ln_mod: c.ln(), phase: 0.0 },
        ZVariant::TypeCG => {
            let g = g_aux(a, GFunction::new(-cfg.gamma_const() / ETA, 0.0));
            sqrt_ratio(g, 1.0, j, "typeC_G")?
        }
        ZVariant::TypeAPT1 => {
            let k = cfg.kappa();
            let g1 = g_aux(a, GFunction::new(2.0 * k / ETA, k));
            let g2 = g_aux(a, GFunction::new(2.0 * k / ETA, 2.0 * k));
            sqrt_ratio(g1 * g2, 1.0, j, "typeA_PT1")?
        }
        ZVariant::TypeABG => {
            let (k, v) = (cfg.kappa(), nu(cfg));
            let g1 = g_aux(a, GFunction::new(2.0 / ETA, 1.0));
            let g2 = g_aux(a, GFunction::new(2.0 / ETA, 2.0));
            let den = g_aux(a, GFunction::new(1.0 / (k * ETA), (1.0 + 0.5 * v) / k));
            if den == 0.0 {
                return Err(Error::Domain(format!("typeA_BG: vanishing denominator at orbit index {j}")));
            }
            sqrt_ratio(g1 * g2, den * den, j, "typeA_BG")?
        }
        ZVariant::TypeAWhittaker { sigma } => {
            let (b, g, k, v, rho) = (cfg.beta, cfg.gamma, cfg.kappa(), nu(cfg), cfg.rho());
            let a3 = cfg.orbit_point(j + 2);
            let num = g_aux(a, GFunction::new(b, b * g))
                * g_aux(a, GFunction::new(b, b * g + 0.5 * k))
                * g_aux(a3, GFunction::new(4.0 / ETA, -2.0 * v - 4.0 * sigma));
            let den = g_aux(a, GFunction::new(1.0 / ETA, rho + g / ETA)) * g_aux(a3, GFunction::new(1.0 / ETA, -0.5 * v));
            if den == 0.0 {
                return Err(Error::Domain(format!("typeA_Whittaker: vanishing denominator at orbit index {j}")));
            }
            sqrt_ratio(num, den, j, "typeA_Whittaker")?
        }
        ZVariant::SsR => ZValue { ln_mod: cfg.remainder_at(a).ln(), phase: 0.0 },
        ZVariant::SsRamanujan { c } => {
            let f = 1.0 - c * cfg.a1 / cfg.orbit_point(j + 1);
            // principal root: negative factors contribute a phase of π/2
            ZValue {
                ln_mod: cfg.remainder_at(a).ln() + 0.5 * f.abs().ln(),
                phase: if f < 0.0 { FRAC_PI_2 } else { 0.0 },
            }
        }
    };
    Ok(ZValue { ln_mod: base.ln_mod, phase: base.phase + phase })
}

/// Π_{k=0}^{n−1} 𝒵_{j+k} by direct multiplication.
pub fn z_product_direct_from(zs: &ZSpec, cfg: &FamilyConfig, j: usize, n: usize) -> Result<ZValue> {
    let mut acc = ZValue::ONE;
    for k in 0..n {
        acc = acc * eval_z(zs, cfg, j + k)?;
    }
    Ok(acc)
}

/// Π_{k=0}^{n−1} 𝒵_{1+k}: the product entering hₙ.
pub fn z_product_direct(zs: &ZSpec, cfg: &FamilyConfig, n: usize) -> Result<ZValue> {
    z_product_direct_from(zs, cfg, 1, n)
}

/// eₙ accumulated in the same order as the spectral table.
fn energy(cfg: &FamilyConfig, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    cfg.parameter_orbit(n, false)
        .map(|o| o.iter().fold(0.0, |e, &a| e + cfg.remainder_at(a)))
        .unwrap_or(f64::NAN)
}

fn lg(x: f64) -> Result<f64> {
    if x > 0.0 {
        Ok(ln_gamma_pos(x))
    } else {
        ln_gamma(x).map(|g| g.ln_abs)
    }
}

/// The closed form of Π_{k=0}^{n−1} 𝒵_{1+k}.
pub fn z_product_closed(zs: &ZSpec, cfg: &FamilyConfig, n: usize) -> Result<ZValue> {
    zs.check(cfg)?;
    let phase = -zs.alpha * energy(cfg, n);
    if n == 0 {
        return Ok(ZValue { ln_mod: 0.0, phase });
    }
    let nf = n as f64;
    let (ln_mod, extra_phase) = match zs.variant {
        ZVariant::Const { c } => (nf * c.ln(), 0.0),
        // √(γⁿ Γ(n−ρ)/Γ(−ρ))
        ZVariant::TypeCG => {
            let rho = cfg.a1 / ETA;
            (0.5 * (nf * cfg.gamma_const().ln() + lg(nf - rho)? - lg(-rho)?), 0.0)
        }
        // κⁿ √(Γ(ν+2n+1)/Γ(ν+1))
        ZVariant::TypeAPT1 => {
            let v = nu(cfg);
            (nf * cfg.kappa().ln() + 0.5 * (lg(v + 2.0 * nf + 1.0)? - lg(v + 1.0)?), 0.0)
        }
        // κⁿ √(Γ(ν+2n+1)/Γ(ν+1)) · Γ(ν+1)/Γ(ν+n+1)
        ZVariant::TypeABG => {
            let v = nu(cfg);
            let pt = nf * cfg.kappa().ln() + 0.5 * (lg(v + 2.0 * nf + 1.0)? - lg(v + 1.0)?);
            (pt + lg(v + 1.0)? - lg(v + nf + 1.0)?, 0.0)
        }
        // κⁿ √(Γ(2n+2ρ)Γ(n+2−σ) / (Γ(2−σ)Γ(n+2ρ)Γ(n+2)))
        ZVariant::TypeAWhittaker { sigma } => {
            let r2 = 2.0 * cfg.rho();
            let s = lg(2.0 * nf + r2)? + lg(nf + 2.0 - sigma)? - lg(2.0 - sigma)? - lg(nf + r2)? - lg(nf + 2.0)?;
            (nf * cfg.kappa().ln() + 0.5 * s, 0.0)
        }
        // R₁ⁿ q^{n(n−1)/2}
        ZVariant::SsR => (nf * cfg.remainder(1)?.ln() + 0.5 * nf * (nf - 1.0) * cfg.q().ln(), 0.0),
        // R₁ⁿ q^{n(n−1)/2} √((c;q⁻¹)_{n+1}/(1−c))
        ZVariant::SsRamanujan { c } => {
            let q = cfg.q();
            let base = nf * cfg.remainder(1)?.ln() + 0.5 * nf * (nf - 1.0) * q.ln();
            let (lp, _) = ln_q_poch(c, 1.0 / q, n + 1);
            let negatives = (1..=n).filter(|&m| c * q.powi(-(m as i32)) > 1.0).count();
            (base + 0.5 * (lp - (1.0 - c).ln()), FRAC_PI_2 * negatives as f64)
        }
    };
    Ok(ZValue { ln_mod, phase: phase + extra_phase })
}

/// Π_{k=0}^{n−1} g(a_{j+k}; c, d) by direct multiplication.
pub fn g_product_direct(cfg: &FamilyConfig, g: GFunction, j: usize, n: usize) -> f64 {
    (0..n).map(|k| g_aux(cfg.orbit_point(j + k), g)).product()
}

/// Π_{k=0}^{n−1} g(a_{j+k}; c, d) as a Γ ratio on a translation orbit.
pub fn g_product_gamma(cfg: &FamilyConfig, g: GFunction, j: usize, n: usize) -> Result<f64> {
    let ratio = |step: f64, start: f64| -> Result<f64> {
        // step^n Γ(start + n)/Γ(start)
        let top = ln_gamma(start + n as f64)?;
        let bot = ln_gamma(start)?;
        Ok(step.powi(n as i32) * top.sign * bot.sign * (top.ln_abs - bot.ln_abs).exp())
    };
    let jf = j as f64;
    let shift = g.d / (g.c * ETA);
    match cfg.kind {
        FamilyKind::TypeA => ratio(g.c * ETA, 0.5 * nu(cfg) + jf + shift - 1.0),
        FamilyKind::TypeC => ratio(-g.c * ETA, jf - cfg.a1 / ETA - shift - 1.0),
        _ => Err(Error::Unsupported("g-products in Gamma form exist for translation orbits only".into())),
    }
}
