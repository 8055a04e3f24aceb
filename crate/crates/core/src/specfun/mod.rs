//! Special functions and quadrature used by the closed forms.

pub mod bessel;
pub mod gamma;
pub mod hyper;
pub mod qseries;
pub mod quad;

pub use bessel::{bessel_i, bessel_k, bessel_k_integral};
pub use gamma::{gamma, ln_factorial, ln_gamma, ln_gamma_pos, LnGamma};
pub use hyper::{confluent_1f1, kummer_u, whittaker_m, whittaker_w};
pub use qseries::{ln_q_poch, ln_q_poch_inf, q_exp, q_poch, q_poch_inf};
pub use quad::{exp_sinh, quad_01, quad_semiinf, quad_split, tanh_sinh, QuadResult};
