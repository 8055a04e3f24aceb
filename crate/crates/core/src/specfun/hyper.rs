//! Confluent hypergeometric functions and Whittaker functions.

use super::gamma::{ln_gamma, ln_gamma_pos};
use super::quad::exp_sinh;
use crate::error::{Error, Result};

const MAX_TERMS: usize = 1_000_000;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Kummer's ₁F₁(a; b; x) by its power series.
pub fn confluent_1f1(a: f64, b: f64, x: f64) -> Result<f64> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain(format!("1F1 lower parameter b = {b} is a non-positive integer")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut quiet = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * x / (nf + 1.0);
        sum += term;
        if term.abs() < 1e-16 * sum.abs() || term == 0.0 {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        if !sum.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence(format!("1F1({a}; {b}; {x}) series did not settle")))
}

/// Tricomi's U(a, b, x) for x > 0.
///
/// For a > 0 the Laplace-type integral is used; smaller `a` are reached by
/// the three-term recurrence in `a`.
pub fn kummer_u(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("U(a, b, x) needs x > 0, got {x}")));
    }
    if a > 0.0 {
        return kummer_u_integral(a, b, x);
    }
    // lift a into (0, 1], then recur downwards:
    // U(a−1) = (2a − b + x)U(a) − a(a − b + 1)U(a + 1)
    let steps = (-a).floor() as usize + 1;
    let top = a + steps as f64;
    let mut upper = kummer_u_integral(top + 1.0, b, x)?;
    let mut cur = kummer_u_integral(top, b, x)?;
    let mut ak = top;
    for _ in 0..steps {
        let lower = (2.0 * ak - b + x) * cur - ak * (ak - b + 1.0) * upper;
        upper = cur;
        cur = lower;
        ak -= 1.0;
    }
    Ok(cur)
}

fn kummer_u_integral(a: f64, b: f64, x: f64) -> Result<f64> {
    let lg = ln_gamma_pos(a);
    let f = |t: f64| ((a - 1.0) * t.ln() + (b - a - 1.0) * t.ln_1p() - x * t - lg).exp();
    let r = exp_sinh(f, 0.0, 1.0 / x, 1e-14);
    if !r.converged && r.abs_err_estimate > 1e-11 * r.value.abs() {
        return Err(Error::NoConvergence(format!("U({a}, {b}, {x}) integral did not converge")));
    }
    Ok(r.value)
}

/// Whittaker M_{κ,μ}(x) = e^{−x/2} x^{μ+1/2} ₁F₁(μ − κ + 1/2; 1 + 2μ; x).
pub fn whittaker_m(kappa: f64, mu: f64, x: f64) -> Result<f64> {
    let f = confluent_1f1(mu - kappa + 0.5, 1.0 + 2.0 * mu, x)?;
    Ok((-0.5 * x + (mu + 0.5) * x.ln()).exp() * f)
}

/// Whittaker W_{σ,μ}(x) for x > 0, through Tricomi's U.
pub fn whittaker_w(sigma: f64, mu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("W needs x > 0, got {x}")));
    }
    if sigma >= 2.0 {
        return Err(Error::Domain(format!("W_(sigma, mu) is only supported for sigma < 2, got {sigma}")));
    }
    let a = mu - sigma + 0.5;
    if is_nonpositive_integer(a) {
        return Err(Error::Domain(format!("degenerate Whittaker parameters: mu - sigma + 1/2 = {a}")));
    }
    let u = kummer_u(a, 1.0 + 2.0 * mu, x)?;
    Ok((-0.5 * x + (mu + 0.5) * x.ln()).exp() * u)
}

/// W_{κ,μ} from two M functions; valid for non-integer 2μ.
pub fn whittaker_w_from_m(kappa: f64, mu: f64, x: f64) -> Result<f64> {
    let c1 = ln_gamma(-2.0 * mu)?;
    let d1 = ln_gamma(0.5 - mu - kappa)?;
    let c2 = ln_gamma(2.0 * mu)?;
    let d2 = ln_gamma(0.5 + mu - kappa)?;
    let t1 = c1.sign * d1.sign * (c1.ln_abs - d1.ln_abs).exp() * whittaker_m(kappa, mu, x)?;
    let t2 = c2.sign * d2.sign * (c2.ln_abs - d2.ln_abs).exp() * whittaker_m(kappa, -mu, x)?;
    Ok(t1 + t2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    #[test]
    fn series_identities() {
        assert_eq!(confluent_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert_relative_eq!(confluent_1f1(1.0, 1.0, 1.0).unwrap(), E, max_relative = 1e-14);
        assert_relative_eq!(confluent_1f1(2.0, 2.0, 1.0).unwrap(), E, max_relative = 1e-14);
        // mpmath hyp1f1(1.5, 2, 1)
        assert_relative_eq!(confluent_1f1(1.5, 2.0, 1.0).unwrap(), 2.178_583_481_267_2, max_relative = 1e-12);
        // terminating series: 1F1(−2; b; x) = 1 − 2x/b + x²/(b(b+1))
        let (b, x) = (1.5, 0.8);
        assert_relative_eq!(confluent_1f1(-2.0, b, x).unwrap(), 1.0 - 2.0 * x / b + x * x / (b * (b + 1.0)), max_relative = 1e-14);
        assert!(confluent_1f1(1.0, -3.0, 1.0).is_err());
    }

    #[test]
    fn kummer_u_closed_forms() {
        // U(a, a + 1, x) = x^{−a}
        for (a, x) in [(0.5, 0.3), (1.7, 2.0), (3.0, 11.0)] {
            assert_relative_eq!(kummer_u(a, a + 1.0, x).unwrap(), x.powf(-a), max_relative = 1e-12);
        }
        // U(0, b, x) = 1 and U(−1, b, x) = x − b
        assert_relative_eq!(kummer_u(0.0, 2.0, 1.3).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(kummer_u(-1.0, 2.0, 3.5).unwrap(), 1.5, max_relative = 1e-11);
    }

    #[test]
    fn whittaker_closed_form() {
        assert_relative_eq!(whittaker_w(0.0, 0.5, 2.0).unwrap(), (-1.0f64).exp(), max_relative = 1e-12);
        // mpmath whitw(0.5, 0.5, 1)
        assert_relative_eq!(whittaker_w(0.5, 0.5, 1.0).unwrap(), 0.728_047_218_2, max_relative = 1e-9);
    }

    #[test]
    fn whittaker_small_argument_limit() {
        // W_{σ,1/2}(x) → 1/Γ(1 − σ) as x → 0⁺
        let lim = 1.0 / std::f64::consts::PI.sqrt();
        assert_relative_eq!(whittaker_w(0.5, 0.5, 1e-9).unwrap(), lim, max_relative = 1e-6);
    }

    #[test]
    fn two_routes_agree_for_non_integer_two_mu() {
        for (k, m, x) in [(0.3, 0.35, 0.7), (0.5, 0.25, 2.5), (-0.4, 0.7, 5.0), (1.2, 0.15, 3.0)] {
            let u = whittaker_w(k, m, x).unwrap();
            let mm = whittaker_w_from_m(k, m, x).unwrap();
            assert_relative_eq!(u, mm, max_relative = 1e-10);
        }
    }

    #[test]
    fn degenerate_parameters_rejected() {
        assert!(whittaker_w(1.0, 0.5, 1.0).is_err());
        assert!(whittaker_w(2.5, 0.5, 1.0).is_err());
        assert!(whittaker_w(0.5, 0.5, 0.0).is_err());
    }
}
