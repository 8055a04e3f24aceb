//! Resolution-of-unity measures.
//!
//! Each case stores the moment-problem solution 𝒲(ρ) = π𝒩²(ρ)w(ρ) in the
//! moment variable ρ = |z|², and is checked against ∫ρⁿ𝒲(ρ)dρ = |hₙ|² by
//! double-exponential quadrature.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};

use crate::coherent::ln_hn_abs2;
use crate::error::{Error, Result};
use crate::family::FamilyConfig;
use crate::functional::{ZSpec, ZVariant};
use crate::specfun::{bessel_k, bessel_k_integral, ln_gamma_pos, ln_q_poch_inf, quad_01, quad_split, whittaker_w};
use crate::ETA;

const QUAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "camelCase", deny_unknown_fields)]
pub enum MeasureCase {
    /// Oscillator: 𝒲 = k e^{−kρ}, k = c²/γ.
    #[serde(rename = "hoFlat")]
    HoFlat { gamma_const: f64, c: f64 },
    /// Disk: −(ρ_C + 1)(1 − ρ)^{−ρ_C−2} on [0, 1).
    DiskTypeC { rho_c: f64 },
    /// e^{−√ρ}/(2√ρ).
    SechTypeA,
    /// 2ρ^{ν/2}K_ν(2√ρ)/Γ(ν + 1).
    #[serde(rename = "besselBG")]
    BesselBg { nu: f64 },
    /// Γ(2 − σ)e^{−ρ/2}W_{σ,1/2}(ρ).
    #[serde(rename = "whittakerPT")]
    WhittakerPt { sigma: f64 },
    /// The c → 0 member of the general Ramanujan case.
    RamanujanQ { r1: f64, q: f64 },
    /// [R₁(1−q)(1−c)/(q ln(1/q))]·(−cs;q)_∞/(−s/q;q)_∞ with s = ρR₁(1−q).
    RamanujanGeneralQ { r1: f64, q: f64, c: f64 },
}

impl MeasureCase {
    pub fn name(&self) -> &'static str {
        match self {
            MeasureCase::HoFlat { .. } => "hoFlat",
            MeasureCase::DiskTypeC { .. } => "diskTypeC",
            MeasureCase::SechTypeA => "sechTypeA",
            MeasureCase::BesselBg { .. } => "besselBG",
            MeasureCase::WhittakerPt { .. } => "whittakerPT",
            MeasureCase::RamanujanQ { .. } => "ramanujanQ",
            MeasureCase::RamanujanGeneralQ { .. } => "ramanujanGeneralQ",
        }
    }

    /// The seven cases at their reference parameters.
    pub fn reference_catalog() -> Vec<MeasureCase> {
        vec![
            MeasureCase::HoFlat { gamma_const: 1.0, c: 1.0 },
            MeasureCase::DiskTypeC { rho_c: -3.0 },
            MeasureCase::SechTypeA,
            MeasureCase::BesselBg { nu: 1.0 },
            MeasureCase::WhittakerPt { sigma: 0.5 },
            MeasureCase::RamanujanQ { r1: 1.0, q: 0.5 },
            MeasureCase::RamanujanGeneralQ { r1: 1.0, q: 0.5, c: 0.3 },
        ]
    }

    /// Builds a case from its name and a JSON object of parameters.
    pub fn from_name(name: &str, params: &serde_json::Value) -> Result<Self> {
        let mut obj = match params {
            serde_json::Value::Object(m) => m.clone(),
            serde_json::Value::Null => serde_json::Map::new(),
            _ => return Err(Error::Config("measure parameters must be a JSON object".into())),
        };
        obj.insert("case".into(), serde_json::Value::String(name.into()));
        let mc: MeasureCase =
            serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| Error::Config(format!("measure case {name}: {e}")))?;
        mc.validate()?;
        Ok(mc)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        match *self {
            MeasureCase::HoFlat { gamma_const, c } => {
                if !(gamma_const > 0.0 && c > 0.0) {
                    return bad(format!("hoFlat needs gamma_const > 0 and c > 0, got {gamma_const}, {c}"));
                }
            }
            MeasureCase::DiskTypeC { rho_c } => {
                if !(rho_c < -1.0) {
                    return bad(format!("diskTypeC needs rho_c < -1 for finite moments, got {rho_c}"));
                }
            }
            MeasureCase::SechTypeA => {}
            MeasureCase::BesselBg { nu } => {
                if !(nu > 0.0) {
                    return bad(format!("besselBG needs nu > 0, got {nu}"));
                }
            }
            MeasureCase::WhittakerPt { sigma } => {
                // 𝒲 changes sign near ρ = 0 for σ ∈ (1, 2)
                if !(sigma < 1.0) {
                    return bad(format!("whittakerPT needs sigma < 1 for a positive weight, got {sigma}"));
                }
            }
            MeasureCase::RamanujanQ { r1, q } | MeasureCase::RamanujanGeneralQ { r1, q, .. } => {
                if !(r1 > 0.0 && q > 0.0 && q < 1.0) {
                    return bad(format!("{} needs r1 > 0 and 0 < q < 1, got {r1}, {q}", self.name()));
                }
                if let MeasureCase::RamanujanGeneralQ { c, .. } = *self {
                    if !(0.0..1.0).contains(&c) {
                        return bad(format!("ramanujanGeneralQ needs 0 <= c < 1, got {c}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Upper end of the ρ domain (1 for the disk, ∞ otherwise).
    pub fn domain_end(&self) -> f64 {
        match self {
            MeasureCase::DiskTypeC { .. } => 1.0,
            _ => f64::INFINITY,
        }
    }

    /// The family and functional whose |hₙ|² this measure reproduces.
    pub fn pairing(&self) -> Result<(FamilyConfig, ZSpec)> {
        self.validate()?;
        Ok(match *self {
            MeasureCase::HoFlat { gamma_const, c } => (FamilyConfig::type_d(gamma_const / std::f64::consts::SQRT_2, 0.0)?, ZSpec::constant(c)),
            MeasureCase::DiskTypeC { rho_c } => (FamilyConfig::type_c(rho_c * ETA, 1.0, 0.0)?, ZSpec::new(ZVariant::TypeCG, 0.0)),
            MeasureCase::SechTypeA => {
                let cfg = FamilyConfig::type_a(0.5 * ETA, 1.0, 0.0, 0.0, 0.0)?;
                (cfg, ZSpec::constant(cfg.kappa()))
            }
            MeasureCase::BesselBg { nu } => (FamilyConfig::type_a(0.5 * nu * ETA, 1.0, 0.5 * ETA, 0.0, 0.0)?, ZSpec::new(ZVariant::TypeABG, 0.0)),
            MeasureCase::WhittakerPt { sigma } => (
                FamilyConfig::type_a(0.5 * ETA, 1.0, 0.5 * ETA, 0.0, 0.0)?,
                ZSpec::new(ZVariant::TypeAWhittaker { sigma }, 0.0),
            ),
            MeasureCase::RamanujanQ { r1, q } => (FamilyConfig::self_similar(1.0, q, r1)?, ZSpec::new(ZVariant::SsR, 0.0)),
            MeasureCase::RamanujanGeneralQ { r1, q, c } => (FamilyConfig::self_similar(1.0, q, r1)?, ZSpec::new(ZVariant::SsRamanujan { c }, 0.0)),
        })
    }

    /// ln 𝒲 at ρ, with `rest` = 1 − ρ supplied separately on the unit interval.
    fn ln_w(&self, rho: f64, rest: f64) -> Result<f64> {
        Ok(match *self {
            MeasureCase::HoFlat { gamma_const, c } => {
                let k = c * c / gamma_const;
                k.ln() - k * rho
            }
            MeasureCase::DiskTypeC { rho_c } => (-(rho_c + 1.0)).ln() + (-rho_c - 2.0) * rest.ln(),
            MeasureCase::SechTypeA => -rho.sqrt() - LN_2 - 0.5 * rho.ln(),
            MeasureCase::BesselBg { nu } => {
                let x = 2.0 * rho.sqrt();
                let k = if (nu - nu.round()).abs() > 1e-6 { bessel_k(nu, x)? } else { bessel_k_integral(nu, x) };
                LN_2 + 0.5 * nu * rho.ln() + k.ln() - ln_gamma_pos(nu + 1.0)
            }
            MeasureCase::WhittakerPt { sigma } => ln_gamma_pos(2.0 - sigma) - 0.5 * rho + whittaker_w(sigma, 0.5, rho)?.ln(),
            MeasureCase::RamanujanQ { r1, q } => MeasureCase::RamanujanGeneralQ { r1, q, c: 0.0 }.ln_w(rho, rest)?,
            MeasureCase::RamanujanGeneralQ { r1, q, c } => {
                let s = rho * r1 * (1.0 - q);
                let pre = (r1 * (1.0 - q) * (1.0 - c) / (q * (1.0 / q).ln())).ln();
                let num = if c == 0.0 { 0.0 } else { ln_q_poch_inf(-c * s, q)?.0 };
                pre + num - ln_q_poch_inf(-s / q, q)?.0
            }
        })
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        let ok = rho >= 0.0 && rho < self.domain_end() && rho.is_finite();
        let open_at_zero = matches!(self, MeasureCase::SechTypeA | MeasureCase::BesselBg { .. } | MeasureCase::WhittakerPt { .. });
        if !ok || (open_at_zero && rho == 0.0) {
            return Err(Error::Domain(format!("rho = {rho} is outside the domain of {}", self.name())));
        }
        Ok(())
    }
}

/// 𝒲(ρ).
pub fn distribution_w(mc: &MeasureCase, rho: f64) -> Result<f64> {
    mc.validate()?;
    mc.check_rho(rho)?;
    Ok(mc.ln_w(rho, 1.0 - rho)?.exp())
}

/// w = 𝒲/(π𝒩²), with 𝒩² supplied by the caller.
pub fn weight_w(mc: &MeasureCase, rho: f64, n_sq: f64) -> Result<f64> {
    Ok(distribution_w(mc, rho)? / (PI * n_sq))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentRow {
    pub n: usize,
    pub moment: f64,
    pub target: f64,
    pub rel_err: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub case: MeasureCase,
    pub rows: Vec<MomentRow>,
    pub pass: bool,
}

impl MomentReport {
    pub fn max_rel_err(&self) -> f64 {
        self.rows.iter().map(|r| if r.rel_err.is_nan() { f64::INFINITY } else { r.rel_err }).fold(0.0, f64::max)
    }
}

/// ln ∫ρⁿ𝒲(ρ)dρ, or None if the quadrature does not converge.
fn ln_moment(mc: &MeasureCase, n: usize) -> Option<f64> {
    let nf = n as f64;
    let ln_g = |rho: f64, rest: f64| -> f64 {
        let v = mc.ln_w(rho, rest).map(|l| nf * rho.ln() + l).unwrap_or(f64::NAN);
        if v.is_nan() {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    // locate the peak of ρⁿ𝒲 on a log grid and integrate the rescaled integrand
    if mc.domain_end() == 1.0 {
        let grid = (1..200).map(|k| k as f64 / 200.0);
        let (peak, ln_peak) = grid.map(|u| (u, ln_g(u, 1.0 - u))).fold((0.5, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        log::trace!("{} n={n}: peak near {peak}", mc.name());
        let r = quad_01(|u, v| (ln_g(u, v) - ln_peak).exp(), QUAD_TOL);
        return r.converged.then(|| r.value.ln() + ln_peak);
    }
    let grid = (0..=320).map(|k| 10f64.powf(-8.0 + k as f64 * 0.05));
    let (peak, ln_peak) = grid.map(|r| (r, ln_g(r, 1.0 - r))).fold((1.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let r = quad_split(|rho| (ln_g(rho, 1.0 - rho) - ln_peak).exp(), peak, QUAD_TOL);
    log::trace!("{} n={n}: split at {peak}, converged {}", mc.name(), r.converged);
    r.converged.then(|| r.value.ln() + ln_peak)
}

/// Checks ∫ρⁿ𝒲 = |hₙ|² for n = 0…n_max against the pairing (cfg, zs).
pub fn verify_moments(mc: &MeasureCase, cfg: &FamilyConfig, zs: &ZSpec, n_max: usize, tol: f64) -> Result<MomentReport> {
    mc.validate()?;
    let (want_cfg, want_zs) = mc.pairing()?;
    if cfg.kind != want_cfg.kind || zs.variant.name() != want_zs.variant.name() {
        return Err(Error::Config(format!(
            "measure {} pairs with {} / {}, got {} / {}",
            mc.name(),
            want_cfg.kind,
            want_zs.variant.name(),
            cfg.kind,
            zs.variant.name()
        )));
    }
    let targets = ln_hn_abs2(cfg, zs, n_max)?;
    let rows: Vec<MomentRow> = (0..=n_max)
        .map(|n| {
            let target = targets[n].exp();
            match ln_moment(mc, n) {
                Some(l) => {
                    let rel_err = (l - targets[n]).exp_m1().abs();
                    MomentRow { n, moment: l.exp(), target, rel_err, pass: rel_err <= tol }
                }
                None => MomentRow { n, moment: f64::NAN, target, rel_err: f64::NAN, pass: false },
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(MomentReport { case: *mc, rows, pass })
}

/// [`verify_moments`] on the case's own pairing.
pub fn verify_case(mc: &MeasureCase, n_max: usize, tol: f64) -> Result<MomentReport> {
    let (cfg, zs) = mc.pairing()?;
    verify_moments(mc, &cfg, &zs, n_max, tol)
}

/// Φ(ξ) = Σ (iξ)ⁿ|hₙ|²/n! for the oscillator: a geometric series 1/(1 − iξ/k).
pub fn ho_phi(gamma_const: f64, c: f64, xi: f64) -> Complex64 {
    let k = c * c / gamma_const;
    1.0 / Complex64::new(1.0, -xi / k)
}

/// 𝒲(ρ) recovered from Φ by closing the inverse Fourier contour around the
/// pole ξ = −ik.
pub fn ho_phi_reconstruct(gamma_const: f64, c: f64, rho: f64) -> f64 {
    let k = c * c / gamma_const;
    let pole = Complex64::new(0.0, -k);
    // 1 − iξ/k = (−i/k)(ξ − pole)
    let residue = (-Complex64::i() * pole * rho).exp() / Complex64::new(0.0, -1.0 / k);
    // clockwise contour: −2πi Res / 2π
    (-Complex64::i() * residue).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherent::normalization;
    use crate::specfun::{gamma, quad_semiinf};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn distribution_examples() {
        assert_eq!(distribution_w(&MeasureCase::HoFlat { gamma_const: 1.0, c: 1.0 }, 0.0).unwrap(), 1.0);
        assert_relative_eq!(
            distribution_w(&MeasureCase::WhittakerPt { sigma: 0.0 }, 1.0).unwrap(),
            (-1.0f64).exp(),
            max_relative = 1e-12
        );
        // the Γ(ν + 1) normalisation is part of the weight
        let k = 0.179_906_657_952_092_2;
        assert_relative_eq!(
            distribution_w(&MeasureCase::BesselBg { nu: 1.5 }, 1.0).unwrap(),
            2.0 * k / gamma(2.5).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(distribution_w(&MeasureCase::DiskTypeC { rho_c: -3.0 }, 0.25).unwrap(), 1.5, max_relative = 1e-14);
        assert!(distribution_w(&MeasureCase::DiskTypeC { rho_c: -3.0 }, 1.0).is_err());
        assert!(distribution_w(&MeasureCase::SechTypeA, -1.0).is_err());
        assert!(MeasureCase::WhittakerPt { sigma: 1.5 }.validate().is_err());
        assert!(MeasureCase::DiskTypeC { rho_c: -0.5 }.validate().is_err());
    }

    #[test]
    fn weights() {
        let ho = MeasureCase::HoFlat { gamma_const: 1.0, c: 1.0 };
        let (cfg, zs) = ho.pairing().unwrap();
        for rho in [0.0, 0.7, 3.0] {
            let n2 = normalization(&cfg, &zs, rho).unwrap().powi(2);
            assert_relative_eq!(weight_w(&ho, rho, n2).unwrap(), 1.0 / PI, max_relative = 1e-12);
        }
        let wh = MeasureCase::WhittakerPt { sigma: 0.5 };
        let (cfg, zs) = wh.pairing().unwrap();
        for rho in [0.3, 1.0, 4.0] {
            let n2 = normalization(&cfg, &zs, rho).unwrap().powi(2);
            let phi = crate::specfun::confluent_1f1(1.5, 2.0, rho).unwrap();
            let want = gamma(1.5).unwrap() * (-0.5 * rho).exp() * phi * whittaker_w(0.5, 0.5, rho).unwrap() / PI;
            assert_relative_eq!(weight_w(&wh, rho, n2).unwrap(), want, max_relative = 1e-9);
        }
        let sech = MeasureCase::SechTypeA;
        let (cfg, zs) = sech.pairing().unwrap();
        for rho in [0.2, 2.0] {
            let n2 = normalization(&cfg, &zs, rho).unwrap().powi(2);
            let s = rho.sqrt();
            assert_relative_eq!(weight_w(&sech, rho, n2).unwrap(), (-s).exp() * s.cosh() / (2.0 * PI * s), max_relative = 1e-9);
        }
    }

    #[test]
    fn moment_examples() {
        let r = verify_case(&MeasureCase::HoFlat { gamma_const: 1.0, c: 1.0 }, 5, 1e-9).unwrap();
        assert!(r.pass, "{r:?}");
        assert_relative_eq!(r.rows[5].moment, 120.0, max_relative = 1e-9);
        let r = verify_case(&MeasureCase::DiskTypeC { rho_c: -3.0 }, 1, 1e-9).unwrap();
        assert_relative_eq!(r.rows[1].moment, 1.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(r.rows[1].target, 1.0 / 3.0, max_relative = 1e-12);
        let r = verify_case(&MeasureCase::BesselBg { nu: 1.5 }, 2, 1e-6).unwrap();
        let want = gamma(3.0).unwrap() * gamma(4.5).unwrap() / gamma(2.5).unwrap();
        assert_relative_eq!(r.rows[2].moment, want, max_relative = 1e-6);
        assert!(r.pass);
    }

    #[test]
    fn reference_catalog_moments() {
        for mc in MeasureCase::reference_catalog() {
            let tol = if matches!(mc, MeasureCase::RamanujanQ { .. } | MeasureCase::RamanujanGeneralQ { .. }) { 1e-5 } else { 1e-6 };
            let r = verify_case(&mc, 8, tol).unwrap();
            if let MeasureCase::RamanujanGeneralQ { .. } = mc {
                // only the low moments are finite at c = 0.3
                assert!(r.rows[0].pass && r.rows[1].pass, "{r:?}");
                assert!(!r.pass);
            } else {
                assert!(r.pass, "{}: {:?}", mc.name(), r.rows);
            }
        }
    }

    #[test]
    fn pairing_mismatch_is_rejected() {
        let (cfg, zs) = MeasureCase::SechTypeA.pairing().unwrap();
        assert!(verify_moments(&MeasureCase::DiskTypeC { rho_c: -3.0 }, &cfg, &zs, 2, 1e-6).is_err());
    }

    #[test]
    fn general_ramanujan_small_c_moments() {
        // exact moments carry the factor Π(1 − c2^j)^{-1} relative to c = 0
        let c = 1e-6;
        let r = verify_case(&MeasureCase::RamanujanGeneralQ { r1: 1.0, q: 0.5, c }, 6, 1e-8).unwrap();
        assert!(r.pass, "{:?}", r.rows);
    }

    #[test]
    fn fourier_route() {
        assert_eq!(ho_phi_reconstruct(1.0, 1.0, 0.0), 1.0);
        assert_relative_eq!(ho_phi_reconstruct(1.0, 1.0, 2.0), (-2.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(ho_phi_reconstruct(1.0, 2f64.sqrt(), 1.0), 2.0 * (-2.0f64).exp(), max_relative = 1e-14);
        let mc = MeasureCase::HoFlat { gamma_const: 2.0, c: 1.3 };
        for rho in [0.0, 0.4, 3.0] {
            assert_relative_eq!(ho_phi_reconstruct(2.0, 1.3, rho), distribution_w(&mc, rho).unwrap(), max_relative = 1e-14);
        }
        // Φ is the characteristic function of 𝒲
        for xi in [0.3, 1.7] {
            let re = quad_semiinf(|r| (xi * r).cos() * distribution_w(&mc, r).unwrap(), 1e-12).value;
            let im = quad_semiinf(|r| (xi * r).sin() * distribution_w(&mc, r).unwrap(), 1e-12).value;
            let phi = ho_phi(2.0, 1.3, xi);
            assert!((Complex64::new(re, im) - phi).norm() < 1e-10);
        }
    }

    #[test]
    fn named_construction() {
        let mc = MeasureCase::from_name("whittakerPT", &serde_json::json!({"sigma": 0.25})).unwrap();
        assert_eq!(mc, MeasureCase::WhittakerPt { sigma: 0.25 });
        assert_eq!(MeasureCase::from_name("sechTypeA", &serde_json::Value::Null).unwrap(), MeasureCase::SechTypeA);
        assert!(MeasureCase::from_name("besselBG", &serde_json::json!({"nu": 1.0, "extra": 2})).is_err());
        assert!(MeasureCase::from_name("nope", &serde_json::Value::Null).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn weights_are_positive(idx in 0usize..7) {
            let mc = MeasureCase::reference_catalog()[idx];
            for k in 1..=64 {
                let rho = if mc.domain_end() == 1.0 { k as f64 / 65.0 } else { 0.25 * k as f64 };
                prop_assert!(distribution_w(&mc, rho).unwrap() > 0.0);
            }
        }

        #[test]
        fn conversion_round_trips(idx in 0usize..7, rho in 0.01f64..0.95) {
            let mc = MeasureCase::reference_catalog()[idx];
            let (cfg, zs) = mc.pairing().unwrap();
            let n2 = normalization(&cfg, &zs, rho).unwrap().powi(2);
            let w = weight_w(&mc, rho, n2).unwrap();
            let back = PI * n2 * w;
            let direct = distribution_w(&mc, rho).unwrap();
            prop_assert!((back - direct).abs() <= 1e-14 * direct.abs().max(1.0));
        }

        #[test]
        fn small_c_limit(rho in 0.0f64..20.0, c in 1e-9f64..1e-4) {
            let base = distribution_w(&MeasureCase::RamanujanQ { r1: 1.0, q: 0.5 }, rho).unwrap();
            let gen = distribution_w(&MeasureCase::RamanujanGeneralQ { r1: 1.0, q: 0.5, c }, rho).unwrap();
            let s = rho * 0.5;
            prop_assert!((gen / base - 1.0).abs() <= c * (1.0 + 2.0 * s / 0.5) + 1e-12);
        }
    }
}
