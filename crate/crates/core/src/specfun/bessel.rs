//! Modified Bessel functions I_ν and K_ν of real order and argument.

use std::f64::consts::PI;

use super::gamma::{ln_gamma, sin_pi};
use crate::error::{Error, Result};

/// Orders closer than this to an integer are refused by [`bessel_k`].
pub const INTEGER_ORDER_GUARD: f64 = 1e-6;

/// I_ν(x) by its power series, for ν ≥ 0 and x ≥ 0.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if nu < 0.0 || x < 0.0 {
        return Err(Error::Domain(format!("bessel_i needs nu >= 0 and x >= 0, got nu = {nu}, x = {x}")));
    }
    bessel_i_series(nu, x)
}

/// Series for I_ν with any real order (negative orders feed the K combination).
fn bessel_i_series(nu: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let half = 0.5 * x;
    let q = half * half;
    let lg = ln_gamma(nu + 1.0)?;
    let mut term = lg.sign * (nu * half.ln() - lg.ln_abs).exp();
    let mut sum = term;
    let mut quiet = 0;
    let mut k = 0usize;
    while quiet < 3 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (kf + nu + 1.0));
        sum += term;
        k += 1;
        if term.abs() < 1e-17 * sum.abs() {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if k > 100_000 {
            return Err(Error::NoConvergence(format!("I_{nu}({x}) series")));
        }
    }
    Ok(sum)
}

/// K_ν(x) for non-integer ν and x > 0.
///
/// Small arguments use π[I₋ν − I_ν]/(2 sin πν). Mid-range arguments use the
/// integral ∫₀^∞ e^{−x cosh t} cosh(νt) dt, where the I combination cancels
/// badly; large arguments use the asymptotic expansion.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if (nu - nu.round()).abs() <= INTEGER_ORDER_GUARD {
        return Err(Error::Domain(format!(
            "K_nu via the I-combination requires non-integer order; |nu - round(nu)| = {:.3e} <= {INTEGER_ORDER_GUARD:e}",
            (nu - nu.round()).abs()
        )));
    }
    if !(x > 0.0) {
        return Err(Error::Domain(format!("bessel_k needs x > 0, got {x}")));
    }
    if x <= 2.0 {
        bessel_k_icombo(nu, x)
    } else if x <= 30.0 {
        Ok(bessel_k_integral(nu, x))
    } else {
        Ok(bessel_k_asymptotic(nu, x))
    }
}

/// π[I₋ν(x) − I_ν(x)] / (2 sin πν).
pub fn bessel_k_icombo(nu: f64, x: f64) -> Result<f64> {
    let s = sin_pi(nu);
    if s == 0.0 {
        return Err(Error::Domain(format!("sin(pi nu) vanishes at nu = {nu}")));
    }
    Ok(PI * (bessel_i_series(-nu, x)? - bessel_i_series(nu, x)?) / (2.0 * s))
}

/// ∫₀^∞ e^{−x cosh t} cosh(νt) dt by the trapezoid rule; valid for every real
/// order, including integers.
pub fn bessel_k_integral(nu: f64, x: f64) -> f64 {
    // the integrand is entire; the step shrinks like x^{-1/2} to keep the
    // strip error far below rounding
    let h = (0.5 / x.sqrt()).min(0.1);
    let nu = nu.abs();
    let log_term = |t: f64| -x * (t.cosh() - 1.0) + nu * t + (0.5 * (1.0 + (-2.0 * nu * t).exp())).ln();
    let mut sum = 0.5;
    let mut k = 1;
    loop {
        let t = k as f64 * h;
        let v = log_term(t).exp();
        sum += v;
        if v < 1e-18 * sum || k > 100_000 {
            break;
        }
        k += 1;
    }
    (-x).exp() * h * sum
}

fn bessel_k_asymptotic(nu: f64, x: f64) -> f64 {
    let m = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        let next = term * (m - (2.0 * kf - 1.0).powi(2)) / (kf * 8.0 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (PI / (2.0 * x)).sqrt() * (-x).exp() * sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn k_half(x: f64) -> f64 {
        (PI / (2.0 * x)).sqrt() * (-x).exp()
    }

    #[test]
    fn bessel_i_values() {
        assert_eq!(bessel_i(0.0, 0.0).unwrap(), 1.0);
        assert_relative_eq!(bessel_i(1.0, 2.0).unwrap(), 1.590_636_854_637_329, max_relative = 1e-12);
        let x = 1.0f64;
        assert_relative_eq!(bessel_i(0.5, x).unwrap(), (2.0 / (PI * x)).sqrt() * x.sinh(), max_relative = 1e-13);
        assert_relative_eq!(bessel_i(0.5, 1.0).unwrap(), 0.937_674_888_245_488_2, max_relative = 1e-12);
        assert!(bessel_i(-1.0, 1.0).is_err());
    }

    #[test]
    fn half_integer_k() {
        for x in [0.1, 1.0, 1.9, 2.5, 7.0, 29.0, 35.0, 120.0] {
            assert_relative_eq!(bessel_k(0.5, x).unwrap(), k_half(x), max_relative = 1e-9);
            let k15 = k_half(x) * (1.0 + 1.0 / x);
            assert_relative_eq!(bessel_k(1.5, x).unwrap(), k15, max_relative = 1e-9);
        }
        assert_relative_eq!(bessel_k(0.5, 1.0).unwrap(), 0.461_068_504_447_894_1, max_relative = 1e-12);
        assert_relative_eq!(bessel_k(1.5, 2.0).unwrap(), 0.179_906_657_952_092_2, max_relative = 1e-11);
    }

    #[test]
    fn large_argument_ratio() {
        let x = 400.0;
        assert_relative_eq!(bessel_k(0.5, x).unwrap() / k_half(x), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn routes_agree_near_switch_points() {
        for nu in [0.3, 1.7, 2.25] {
            for x in [1.5, 2.0] {
                assert_relative_eq!(bessel_k_icombo(nu, x).unwrap(), bessel_k_integral(nu, x), max_relative = 1e-11);
            }
            assert_relative_eq!(bessel_k_integral(nu, 30.0), bessel_k_asymptotic(nu, 30.0), max_relative = 1e-12);
        }
    }

    #[test]
    fn recurrence_in_order() {
        // K_{ν+1} = K_{ν−1} + (2ν/x) K_ν
        for (nu, x) in [(1.3, 0.7), (2.4, 5.0), (1.6, 40.0)] {
            let lhs = bessel_k(nu + 1.0, x).unwrap();
            let rhs = bessel_k(nu - 1.0, x).unwrap() + 2.0 * nu / x * bessel_k(nu, x).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
        }
    }

    #[test]
    fn integer_order_refused_but_integral_available() {
        assert!(matches!(bessel_k(1.0, 1.0), Err(Error::Domain(_))));
        assert!(bessel_k(2.0 + 5e-7, 1.0).is_err());
        // K_1(1) from mpmath
        assert_relative_eq!(bessel_k_integral(1.0, 1.0), 0.601_907_230_197_234_6, max_relative = 1e-13);
        assert_relative_eq!(bessel_k_integral(0.0, 1e-3), 7.023_688_800_562_381, max_relative = 1e-12);
    }
}
