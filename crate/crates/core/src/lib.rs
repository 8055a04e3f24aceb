//! Generalized coherent states for shape-invariant potentials.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: ln-Gamma, ₁F₁, Bessel I/K, Whittaker W, q-Pochhammer symbols,
//!   the q-exponential and double-exponential quadrature.
//! * [`family`]: shape-invariant families (parameter orbits, remainders,
//!   superpotentials).
//! * [`algebra`]: energy ladder eₙ and the nested remainder products.
//! * [`functional`]: the catalog of 𝒵 functionals and their orbit products.
//! * [`coherent`]: coefficients hₙ, normalization, overlaps, time evolution and
//!   the action identity.
//! * [`measure`]: closed-form resolution-of-unity measures and moment checks.
//! * [`position`]: grid wavefunctions from the SUSY ladder, wavepackets and a
//!   Crank–Nicolson propagator.
//! * [`report`]: the verification suite behind `sis report`.
//!
//! Units are natural throughout: ħ = m = Ω = 1, so η = 1/√2 and energies are in
//! units of ħΩ.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod algebra;
pub mod coherent;
pub mod error;
pub mod family;
pub mod functional;
pub mod measure;
pub mod position;
pub mod report;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// η = √(ħ/2mΩ) in natural units.
pub const ETA: f64 = std::f64::consts::FRAC_1_SQRT_2;
