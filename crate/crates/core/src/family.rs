//! Shape-invariant potential families.
//!
//! A family fixes the parameter orbit a₁, a₂, … (translation by ±η or scaling
//! by q), the remainder R(aₖ) left over in the shape-invariance condition, and
//! for the translational types a closed-form superpotential W(x, a).

use serde::{Deserialize, Serialize};
use std::f64::consts::SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::ETA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FamilyKind {
    #[serde(rename = "typeA")]
    TypeA,
    #[serde(rename = "typeC")]
    TypeC,
    #[serde(rename = "typeD")]
    TypeD,
    #[serde(rename = "selfSimilar")]
    SelfSimilar,
}

impl FamilyKind {
    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::TypeA => "typeA",
            FamilyKind::TypeC => "typeC",
            FamilyKind::TypeD => "typeD",
            FamilyKind::SelfSimilar => "selfSimilar",
        }
    }

    /// Parses a kind name; the types without a coherent-state construction
    /// (B, E, F) are reported as deferred.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "typeA" | "A" | "a" => Ok(FamilyKind::TypeA),
            "typeC" | "C" | "c" => Ok(FamilyKind::TypeC),
            "typeD" | "D" | "d" => Ok(FamilyKind::TypeD),
            "selfSimilar" | "self-similar" | "ss" => Ok(FamilyKind::SelfSimilar),
            "typeB" | "B" | "b" => Err(Error::Deferred {
                kind: "typeB",
                reason: "Morse-type systems have finitely many normalizable bound states; their coherent states are left to other constructions",
            }),
            "typeE" | "E" | "e" => Err(Error::Deferred {
                kind: "typeE",
                reason: "energy-degenerate eigenstates are not covered by the ladder construction",
            }),
            "typeF" | "F" | "f" => Err(Error::Deferred {
                kind: "typeF",
                reason: "energy-degenerate eigenstates are not covered by the ladder construction",
            }),
            other => Err(Error::Config(format!("unknown family kind '{other}'"))),
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Wire form of a family; kind is a free string so that deferred kinds get a
/// proper diagnostic instead of a generic parse error.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFamily {
    kind: String,
    #[serde(default)]
    a1: f64,
    #[serde(default)]
    beta: f64,
    #[serde(default)]
    gamma: f64,
    #[serde(default)]
    delta: f64,
    #[serde(default)]
    lambda: f64,
    #[serde(default)]
    q: Option<f64>,
    #[serde(default)]
    r_scale: Option<f64>,
}

impl TryFrom<RawFamily> for FamilyConfig {
    type Error = Error;

    fn try_from(r: RawFamily) -> Result<Self> {
        let cfg = FamilyConfig {
            kind: FamilyKind::parse(&r.kind)?,
            a1: r.a1,
            beta: r.beta,
            gamma: r.gamma,
            delta: r.delta,
            lambda: r.lambda,
            q: r.q,
            r_scale: r.r_scale,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A validated shape-invariant family in natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFamily")]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    pub a1: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_scale: Option<f64>,
}

impl FamilyConfig {
    pub fn type_a(a1: f64, beta: f64, gamma: f64, delta: f64, lambda: f64) -> Result<Self> {
        let cfg = FamilyConfig { kind: FamilyKind::TypeA, a1, beta, gamma, delta, lambda, q: None, r_scale: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn type_c(a1: f64, beta: f64, delta: f64) -> Result<Self> {
        let cfg = FamilyConfig { kind: FamilyKind::TypeC, a1, beta, gamma: 0.0, delta, lambda: 0.0, q: None, r_scale: None };
        cfg.validate()?;
        Ok(cfg)
    }

    /// The oscillator family; its orbit is pinned at a = β.
    pub fn type_d(beta: f64, delta: f64) -> Result<Self> {
        let cfg = FamilyConfig { kind: FamilyKind::TypeD, a1: beta, beta, gamma: 0.0, delta, lambda: 0.0, q: None, r_scale: None };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn self_similar(a1: f64, q: f64, r_scale: f64) -> Result<Self> {
        let cfg = FamilyConfig {
            kind: FamilyKind::SelfSimilar,
            a1,
            beta: 0.0,
            gamma: 0.0,
            delta: 0.0,
            lambda: 0.0,
            q: Some(q),
            r_scale: Some(r_scale),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a JSON family document; unknown keys are rejected.
    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawFamily = serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        raw.try_into()
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [self.a1, self.beta, self.gamma, self.delta, self.lambda];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("family constants must be finite".into()));
        }
        match self.kind {
            FamilyKind::TypeA => {
                if !(self.beta > 0.0) {
                    return Err(Error::Config(format!("typeA requires beta > 0, got {}", self.beta)));
                }
                if !((self.a1 + self.gamma) / ETA > 0.0) {
                    return Err(Error::Config(format!(
                        "typeA requires rho = (a1 + gamma)/eta > 0, got {}",
                        (self.a1 + self.gamma) / ETA
                    )));
                }
            }
            FamilyKind::TypeC | FamilyKind::TypeD => {
                if !(self.beta > 0.0) {
                    return Err(Error::Config(format!("{} requires beta > 0, got {}", self.kind, self.beta)));
                }
            }
            FamilyKind::SelfSimilar => {
                let q = self.q.ok_or_else(|| Error::Config("selfSimilar requires q".into()))?;
                let c = self.r_scale.ok_or_else(|| Error::Config("selfSimilar requires r_scale".into()))?;
                if !(q > 0.0 && q < 1.0) {
                    return Err(Error::Config(format!("selfSimilar requires 0 < q < 1, got {q}")));
                }
                if !(c > 0.0) || !(c * self.a1 > 0.0) {
                    return Err(Error::Config(format!(
                        "selfSimilar requires r_scale > 0 and r_scale*a1 > 0, got r_scale = {c}, a1 = {}",
                        self.a1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn q(&self) -> f64 {
        self.q.unwrap_or(f64::NAN)
    }

    pub fn r_scale(&self) -> f64 {
        self.r_scale.unwrap_or(f64::NAN)
    }

    /// κ = ηβ (typeA).
    pub fn kappa(&self) -> f64 {
        ETA * self.beta
    }

    /// ρ = (a₁ + γ)/η (typeA).
    pub fn rho(&self) -> f64 {
        (self.a1 + self.gamma) / ETA
    }

    /// Constant remainder √2β of types C and D.
    pub fn gamma_const(&self) -> f64 {
        SQRT_2 * self.beta
    }

    /// One step forward along the orbit.
    fn step(&self, a: f64) -> f64 {
        match self.kind {
            FamilyKind::TypeA => a + ETA,
            FamilyKind::TypeC => a - ETA,
            FamilyKind::TypeD => a,
            FamilyKind::SelfSimilar => self.q() * a,
        }
    }

    fn step_back(&self, a: f64) -> f64 {
        match self.kind {
            FamilyKind::TypeA => a - ETA,
            FamilyKind::TypeC => a + ETA,
            FamilyKind::TypeD => a,
            FamilyKind::SelfSimilar => a / self.q(),
        }
    }

    fn start(&self) -> f64 {
        match self.kind {
            FamilyKind::TypeD => self.beta,
            _ => self.a1,
        }
    }

    /// aₖ for k ≥ 1, and the backward point a₀ for k = 0.
    pub fn orbit_point(&self, k: usize) -> f64 {
        if k == 0 {
            return self.step_back(self.start());
        }
        let mut a = self.start();
        for _ in 1..k {
            a = self.step(a);
        }
        a
    }

    /// a₁ … a_count, optionally preceded by a₀.
    pub fn parameter_orbit(&self, count: usize, with_backward: bool) -> Result<Vec<f64>> {
        if count == 0 {
            return Err(Error::Config("parameter_orbit needs count >= 1".into()));
        }
        let mut out = Vec::with_capacity(count + 1);
        if with_backward {
            out.push(self.orbit_point(0));
        }
        let mut a = self.start();
        out.push(a);
        for _ in 1..count {
            a = self.step(a);
            out.push(a);
        }
        Ok(out)
    }

    /// R evaluated at an arbitrary orbit parameter.
    pub fn remainder_at(&self, a: f64) -> f64 {
        match self.kind {
            FamilyKind::TypeA => self.beta * self.beta * ETA * (2.0 * (a + self.gamma) + ETA),
            FamilyKind::TypeC | FamilyKind::TypeD => self.gamma_const(),
            FamilyKind::SelfSimilar => self.r_scale() * a,
        }
    }

    /// R(aₖ) for k ≥ 1.
    pub fn remainder(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Err(Error::Config("remainder index starts at 1".into()));
        }
        Ok(self.remainder_at(self.orbit_point(k)))
    }

    /// The same family re-based so that its first orbit point is a_{1+shift}.
    pub fn shifted(&self, shift: usize) -> FamilyConfig {
        let mut c = *self;
        if self.kind != FamilyKind::TypeD {
            c.a1 = self.orbit_point(1 + shift);
        }
        c
    }

    /// The family re-based one step backwards (first point a₀).
    pub fn shifted_back(&self) -> FamilyConfig {
        let mut c = *self;
        if self.kind != FamilyKind::TypeD {
            c.a1 = self.orbit_point(0);
        }
        c
    }

    fn trig_arg(&self, x: f64) -> Result<f64> {
        let u = self.beta * (x + self.lambda);
        if !(u > 0.0 && u < std::f64::consts::PI) {
            return Err(Error::Domain(format!("typeA needs beta*(x+lambda) in (0, pi), got {u} at x = {x}")));
        }
        Ok(u)
    }

    /// W(x, a) and dW/dx.
    ///
    /// For typeA the sign is W = −[β(a+γ)cot u + δ csc u], u = β(x+λ), which
    /// makes sin^ρ u the normalizable ground state.
    pub fn superpotential_and_derivative(&self, x: f64, a: f64) -> Result<(f64, f64)> {
        match self.kind {
            FamilyKind::TypeD => Ok((self.beta * x + self.delta, self.beta)),
            FamilyKind::TypeC => {
                if !(x > 0.0) {
                    return Err(Error::Domain(format!("typeC superpotential needs x > 0, got {x}")));
                }
                let s = a + self.delta;
                Ok((s / x + 0.5 * self.beta * x, -s / (x * x) + 0.5 * self.beta))
            }
            FamilyKind::TypeA => {
                let u = self.trig_arg(x)?;
                let (sn, cs) = u.sin_cos();
                let csc = 1.0 / sn;
                let cot = cs / sn;
                let b = self.beta * (a + self.gamma);
                let w = -(b * cot + self.delta * csc);
                let dw = self.beta * (b * csc * csc + self.delta * csc * cot);
                Ok((w, dw))
            }
            FamilyKind::SelfSimilar => Err(Error::Unsupported(
                "self-similar families have no closed-form superpotential".into(),
            )),
        }
    }

    pub fn superpotential(&self, x: f64, a: f64) -> Result<f64> {
        self.superpotential_and_derivative(x, a).map(|(w, _)| w)
    }

    /// (V₋, V₊) = W² ∓ η W'.
    pub fn partner_potentials(&self, x: f64, a: f64) -> Result<(f64, f64)> {
        let (w, dw) = self.superpotential_and_derivative(x, a)?;
        Ok((w * w - ETA * dw, w * w + ETA * dw))
    }
}
